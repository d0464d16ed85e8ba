//! Bundled per-condition reference values: human priming sizes, DNN cosine
//! means, coding-scheme match values, priming-model predictions and pixel baseline.

use std::sync::OnceLock;

use serde::Serialize;

use super::IngestError;
use crate::lexicon::catalog;

pub const FIXTURE_CSV: &str = include_str!("../../assets/fixtures.csv");

/// Columns holding predicted reaction times; negated on load so that larger
/// means more priming, like every other column.
pub const RT_COLUMNS: [&str; 2] = ["SCM", "IA"];
pub const PRIMING: &str = "Priming-ARB";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnGroup {
    Human,
    Cnn,
    Vit,
    CodingScheme,
    PrimingModel,
    Baseline,
}

fn group_of(name: &str) -> ColumnGroup {
    match name {
        PRIMING => ColumnGroup::Human,
        n if n.starts_with("ViT") => ColumnGroup::Vit,
        "Absolute" | "SC" | "BOB" | "OOB" | "SOB" => ColumnGroup::CodingScheme,
        "SCM" | "IA" | "LTRS" => ColumnGroup::PrimingModel,
        "PixCS" => ColumnGroup::Baseline,
        _ => ColumnGroup::Cnn,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixtureColumn {
    pub name: String,
    pub group: ColumnGroup,
    /// True when the stored values were sign-flipped on load.
    pub negated: bool,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixtureTable {
    pub short_codes: Vec<String>,
    pub columns: Vec<FixtureColumn>,
}

impl FixtureTable {
    pub fn parse(text: &str) -> Result<Self, IngestError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let fmt = |m: String| IngestError::Format(m);
        let header = rdr.headers().map_err(|e| fmt(e.to_string()))?.clone();
        if header.get(0) != Some("short_code") {
            return Err(fmt("first fixture column must be short_code".into()));
        }
        let mut columns: Vec<FixtureColumn> = header
            .iter()
            .skip(1)
            .map(|name| FixtureColumn {
                name: name.to_string(),
                group: group_of(name),
                negated: RT_COLUMNS.contains(&name),
                values: Vec::with_capacity(28),
            })
            .collect();
        let mut short_codes = Vec::with_capacity(28);
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| fmt(e.to_string()))?;
            short_codes.push(rec[0].to_string());
            for (col, cell) in columns.iter_mut().zip(rec.iter().skip(1)) {
                let v: f64 = cell.parse().map_err(|_| fmt(format!("row {}: bad number {cell:?} in {}", i + 1, col.name)))?;
                col.values.push(if col.negated { -v } else { v });
            }
        }
        let expected = catalog().short_codes();
        if short_codes != expected {
            return Err(fmt(format!("rows must be the 28 conditions in catalog order, found {short_codes:?}")));
        }
        if let Some(c) = columns.iter().find(|c| c.values.len() != 28) {
            return Err(fmt(format!("column {} has {} values", c.name, c.values.len())));
        }
        Ok(Self { short_codes, columns })
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|c| c.name.eq_ignore_ascii_case(name)).map(|c| c.values.as_slice())
    }

    pub fn value(&self, short_code: &str, column: &str) -> Option<f64> {
        let row = self.short_codes.iter().position(|s| s == short_code)?;
        self.column(column).map(|c| c[row])
    }

    pub fn priming(&self) -> &[f64] {
        self.column(PRIMING).expect("fixture has priming column")
    }

    pub fn names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }
}

/// The bundled table, parsed once.
pub fn load_fixtures() -> &'static FixtureTable {
    static TABLE: OnceLock<FixtureTable> = OnceLock::new();
    TABLE.get_or_init(|| FixtureTable::parse(FIXTURE_CSV).expect("bundled fixtures are valid"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_values() {
        let t = load_fixtures();
        assert_eq!(t.value("TL56", PRIMING), Some(32.46));
        assert_eq!(t.value("ALD-ARB", PRIMING), Some(0.0));
        assert_eq!(t.value("ID", PRIMING), Some(42.69));
        assert_eq!(t.value("SUB3", "Absolute"), Some(0.25));
        assert_eq!(t.value("ID", "SCM"), Some(-63.0));
        assert_eq!(t.value("TH", "IA"), Some(-143.0));
        assert_eq!(t.columns.len(), 21);
    }

    #[test]
    fn groups_and_negation() {
        let t = load_fixtures();
        let negated: Vec<&str> = t.columns.iter().filter(|c| c.negated).map(|c| c.name.as_str()).collect();
        assert_eq!(negated, RT_COLUMNS);
        assert_eq!(t.columns.iter().filter(|c| c.group == ColumnGroup::Cnn).count(), 7);
        assert_eq!(t.columns.iter().filter(|c| c.group == ColumnGroup::Vit).count(), 4);
    }

    #[test]
    fn rejects_misordered_rows() {
        let mut lines: Vec<&str> = FIXTURE_CSV.lines().collect();
        lines.swap(1, 2);
        assert!(FixtureTable::parse(&lines.join("\n")).is_err());
    }
}
