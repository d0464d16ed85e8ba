//! 26 × 26 visual similarity ratings for upper-case letters.

use std::path::Path;

use super::{io_err, IngestError};

const SYNTHETIC: &str = include_str!("../../assets/letter_ratings_synthetic.csv");
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct LetterRatings {
    pub source: String,
    values: [[f64; 26]; 26],
}

impl LetterRatings {
    /// CSV with a header row and a header column of letters, in any order.
    pub fn parse(text: &str, source: &str) -> Result<Self, IngestError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());
        let fmt = |m: String| IngestError::Format(m);
        let header = rdr.headers().map_err(|e| fmt(e.to_string()))?.clone();
        let cols: Vec<usize> = header.iter().skip(1).map(letter_index).collect::<Result<_, _>>()?;
        let mut values = [[f64::NAN; 26]; 26];
        for rec in rdr.records() {
            let rec = rec.map_err(|e| fmt(e.to_string()))?;
            let row = letter_index(&rec[0])?;
            for (&col, cell) in cols.iter().zip(rec.iter().skip(1)) {
                values[row][col] = cell.parse().map_err(|_| fmt(format!("bad rating {cell:?}")))?;
            }
        }
        for (a, row) in values.iter().enumerate() {
            if let Some(b) = row.iter().position(|v| v.is_nan()) {
                let missing = if row.iter().all(|v| v.is_nan()) { a } else { b };
                return Err(IngestError::MissingLetter((b'A' + missing as u8) as char));
            }
        }
        for (a, b) in (0..26).flat_map(|a| (a + 1..26).map(move |b| (a, b))) {
            let (ab, ba) = (values[a][b], values[b][a]);
            if (ab - ba).abs() > SYMMETRY_TOLERANCE {
                return Err(IngestError::Asymmetric { a: (b'A' + a as u8) as char, b: (b'A' + b as u8) as char, ab, ba });
            }
        }
        Ok(Self { source: source.to_string(), values })
    }

    /// Placeholder matrix for tests and demos; not real rating data.
    pub fn synthetic() -> Self {
        Self::parse(SYNTHETIC, "SYNTHETIC (tests only, not human ratings)").expect("bundled synthetic ratings are valid")
    }

    pub fn get(&self, a: u8, b: u8) -> Option<f64> {
        let (a, b) = (a.to_ascii_uppercase(), b.to_ascii_uppercase());
        (a.is_ascii_uppercase() && b.is_ascii_uppercase()).then(|| self.values[(a - b'A') as usize][(b - b'A') as usize])
    }

    pub fn is_synthetic(&self) -> bool {
        self.source.starts_with("SYNTHETIC")
    }
}

fn letter_index(cell: &str) -> Result<usize, IngestError> {
    match cell.as_bytes() {
        [c] if c.is_ascii_alphabetic() => Ok((c.to_ascii_uppercase() - b'A') as usize),
        _ => Err(IngestError::Format(format!("expected a single letter label, found {cell:?}"))),
    }
}

pub fn load_letter_ratings(path: &Path) -> Result<LetterRatings, IngestError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    LetterRatings::parse(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_scaled() -> String {
        let mut s = String::from("x");
        for c in b'A'..=b'Z' {
            s.push(',');
            s.push(c as char);
        }
        for a in 0..26u8 {
            s.push('\n');
            s.push((b'A' + a) as char);
            for b in 0..26u8 {
                s.push_str(if a == b { ",5" } else { ",1" });
            }
        }
        s
    }

    #[test]
    fn loads_identity_matrix() {
        let r = LetterRatings::parse(&identity_scaled(), "t").unwrap();
        assert_eq!(r.get(b'a', b'A'), Some(5.0));
        assert_eq!(r.get(b'Q', b'O'), Some(1.0));
        assert_eq!(r.get(b'1', b'O'), None);
    }

    #[test]
    fn asymmetry_rejected() {
        let text = identity_scaled().replacen("\nB,1,5", "\nB,2,5", 1);
        assert!(matches!(LetterRatings::parse(&text, "t"), Err(IngestError::Asymmetric { a: 'A', b: 'B', .. })));
    }

    #[test]
    fn missing_letter_rejected() {
        let text = identity_scaled().lines().take(26).collect::<Vec<_>>().join("\n");
        assert_eq!(LetterRatings::parse(&text, "t"), Err(IngestError::MissingLetter('Z')));
    }

    #[test]
    fn synthetic_is_labelled() {
        let r = LetterRatings::synthetic();
        assert!(r.is_synthetic());
        assert_eq!(r.get(b'O', b'Q'), r.get(b'Q', b'O'));
    }
}
