//! Kendall's tau-b in O(n log n) (Knight's merge-sort algorithm).

use statrs::function::erf::erfc;

use super::StatsError;

/// Tie-corrected rank correlation and its normal-approximation test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tau {
    pub tau: f64,
    /// Two-sided p-value from the tie-adjusted variance of C − D.
    pub p_value: f64,
    pub z: f64,
}

pub(crate) fn validate(x: &[f64], y: &[f64]) -> Result<(), StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch { left: x.len(), right: y.len() });
    }
    if x.len() < 3 {
        return Err(StatsError::TooShort { n: x.len(), min: 3 });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    Ok(())
}

/// Sizes of runs of equal values in a sorted slice (runs of length ≥ 2).
fn tie_groups(sorted: impl Iterator<Item = f64>) -> Vec<u64> {
    let mut groups = Vec::new();
    let mut prev = None;
    let mut run = 0u64;
    for v in sorted {
        if Some(v) == prev {
            run += 1;
        } else {
            if run > 1 {
                groups.push(run);
            }
            run = 1;
            prev = Some(v);
        }
    }
    if run > 1 {
        groups.push(run);
    }
    groups
}

/// Sorts `v` in place, returning the number of inversions.
fn merge_count(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = merge_count(&mut v[..mid], &mut buf[..mid]) + merge_count(&mut v[mid..], &mut buf[mid..]);
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[j] < v[i] {
            buf[k] = v[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    swaps
}

pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<Tau, StatsError> {
    validate(x, y)?;
    let n = x.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(y[a].total_cmp(&y[b])));

    let x_ties = tie_groups(idx.iter().map(|&i| x[i]));
    // Joint ties: consecutive equal (x, y) pairs in the lexicographic order.
    let mut joint = 0u64;
    let mut run = 1u64;
    for w in idx.windows(2) {
        if x[w[0]] == x[w[1]] && y[w[0]] == y[w[1]] {
            run += 1;
        } else {
            joint += run * (run - 1) / 2;
            run = 1;
        }
    }
    joint += run * (run - 1) / 2;

    let mut ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
    let mut buf = vec![0.0; n];
    let swaps = merge_count(&mut ys, &mut buf);
    let y_ties = tie_groups(ys.iter().copied());

    let pairs = |g: &[u64]| g.iter().map(|t| t * (t - 1) / 2).sum::<u64>();
    let n0 = (n * (n - 1) / 2) as u64;
    let (n1, n2) = (pairs(&x_ties), pairs(&y_ties));
    if n1 == n0 || n2 == n0 {
        return Err(StatsError::Constant);
    }
    // C − D = n0 − n1 − n2 + n3 − 2·swaps
    let s = n0 as i64 - n1 as i64 - n2 as i64 + joint as i64 - 2 * swaps as i64;
    let tau = s as f64 / (((n0 - n1) as f64) * ((n0 - n2) as f64)).sqrt();

    let nf = n as f64;
    let sum = |g: &[u64], f: &dyn Fn(f64) -> f64| g.iter().map(|&t| f(t as f64)).sum::<f64>();
    let v0 = nf * (nf - 1.0) * (2.0 * nf + 5.0);
    let vt = sum(&x_ties, &|t| t * (t - 1.0) * (2.0 * t + 5.0));
    let vu = sum(&y_ties, &|t| t * (t - 1.0) * (2.0 * t + 5.0));
    let v1 = sum(&x_ties, &|t| t * (t - 1.0)) * sum(&y_ties, &|t| t * (t - 1.0)) / (2.0 * nf * (nf - 1.0));
    let v2 = sum(&x_ties, &|t| t * (t - 1.0) * (t - 2.0)) * sum(&y_ties, &|t| t * (t - 1.0) * (t - 2.0))
        / (9.0 * nf * (nf - 1.0) * (nf - 2.0));
    let var = (v0 - vt - vu) / 18.0 + v1 + v2;
    let z = s as f64 / var.sqrt();
    let p_value = erfc(z.abs() / std::f64::consts::SQRT_2).clamp(f64::MIN_POSITIVE, 1.0);
    Ok(Tau { tau: tau.clamp(-1.0, 1.0), p_value, z })
}
