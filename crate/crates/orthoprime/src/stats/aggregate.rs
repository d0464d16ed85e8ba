use serde::Serialize;

use super::StatsError;
use crate::lexicon::catalog;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionSummary {
    pub condition_index: u8,
    pub short_code: &'static str,
    pub values: Vec<f64>,
    pub mean: f64,
    pub count: usize,
}

/// Groups `(condition_index, similarity)` pairs into the 28 conditions, in
/// catalog order. Conditions without data have a NaN mean and zero count.
pub fn aggregate_by_condition(pairs: &[(u8, f64)]) -> Result<Vec<ConditionSummary>, StatsError> {
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); 28];
    for &(c, v) in pairs {
        if !(1..=28).contains(&c) {
            return Err(StatsError::UnknownCondition(c));
        }
        values[c as usize - 1].push(v);
    }
    Ok(catalog()
        .iter()
        .zip(values)
        .map(|(cond, values)| {
            let count = values.len();
            let mean = if count == 0 { f64::NAN } else { values.iter().sum::<f64>() / count as f64 };
            ConditionSummary { condition_index: cond.index, short_code: cond.short_code, values, mean, count }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionDistribution {
    pub short_code: &'static str,
    pub priming: f64,
    pub mean: f64,
    pub values: Vec<f64>,
}

/// Per-condition value lists ordered by human priming size, largest first.
pub fn condition_distributions(summaries: &[ConditionSummary], priming: &[f64]) -> Result<Vec<ConditionDistribution>, StatsError> {
    if summaries.len() != priming.len() {
        return Err(StatsError::LengthMismatch { left: summaries.len(), right: priming.len() });
    }
    let mut out: Vec<ConditionDistribution> = summaries
        .iter()
        .zip(priming)
        .map(|(s, &p)| ConditionDistribution { short_code: s.short_code, priming: p, mean: s.mean, values: s.values.clone() })
        .collect();
    out.sort_by(|a, b| b.priming.total_cmp(&a.priming));
    Ok(out)
}

/// Long-format CSV: one `short_code,priming,value` line per observation.
pub fn distributions_csv(d: &[ConditionDistribution]) -> String {
    let mut out = String::from("short_code,priming,value\n");
    for c in d {
        for v in &c.values {
            out.push_str(&format!("{},{},{}\n", c.short_code, c.priming, v));
        }
    }
    out
}
