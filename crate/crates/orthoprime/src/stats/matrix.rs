use serde::Serialize;

use super::{kendall_tau, CorrelationReport, StatsError};
use crate::exec::Exec;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationMatrix {
    pub names: Vec<String>,
    /// `cells[i][j]` correlates column `i` with column `j`.
    pub cells: Vec<Vec<CorrelationReport>>,
}

impl CorrelationMatrix {
    pub fn tau(&self, i: usize, j: usize) -> f64 {
        self.cells[i][j].tau
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric");
        for n in &self.names {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for (name, row) in self.names.iter().zip(&self.cells) {
            out.push_str(name);
            for c in row {
                out.push_str(&format!(",{:.4}{}", c.tau, c.stars));
            }
            out.push('\n');
        }
        out
    }
}

/// Pairwise Kendall tau over named columns. Only the upper triangle is
/// computed; the lower triangle mirrors it, so the result is exactly symmetric.
pub fn correlation_matrix(columns: &[(&str, &[f64])], exec: Exec) -> Result<CorrelationMatrix, StatsError> {
    if columns.len() < 2 {
        return Err(StatsError::TooShort { n: columns.len(), min: 2 });
    }
    let k = columns.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i..k).map(move |j| (i, j))).collect();
    let upper = exec.map(&pairs, |&(i, j)| {
        let (xn, x) = columns[i];
        let (yn, y) = columns[j];
        kendall_tau(x, y).map(|t| CorrelationReport::new(xn, yn, t, None, x.len()))
    });
    let mut cells: Vec<Vec<Option<CorrelationReport>>> = vec![vec![None; k]; k];
    for (&(i, j), r) in pairs.iter().zip(upper) {
        let r = r?;
        let mut mirrored = r.clone();
        std::mem::swap(&mut mirrored.x, &mut mirrored.y);
        cells[j][i] = Some(mirrored);
        cells[i][j] = Some(r);
    }
    Ok(CorrelationMatrix {
        names: columns.iter().map(|c| c.0.to_string()).collect(),
        cells: cells.into_iter().map(|row| row.into_iter().map(Option::unwrap).collect()).collect(),
    })
}
