//! Shape diagnostics for sampled curves.

use crate::sweep::OutputRow;

/// Indices `i` where the slope changes sign strictly between `i-1` and `i+1`.
pub fn interior_extrema(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| (values[i] - values[i - 1]) * (values[i + 1] - values[i]) < 0.0)
        .collect()
}

/// Largest increase between consecutive samples; `<= 0` for a non-increasing curve.
pub fn max_increase(values: &[f64]) -> f64 {
    values
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Fraction of indices in `from..` where `upper[i] >= lower[i]`.
pub fn dominance_fraction(upper: &[f64], lower: &[f64], from: usize) -> f64 {
    let n = upper.len().min(lower.len());
    if from >= n {
        return 0.0;
    }
    let hits = (from..n).filter(|&i| upper[i] >= lower[i]).count();
    hits as f64 / (n - from) as f64
}

/// Rows split into consecutive runs of equal `beta`.
pub fn group_by_beta(rows: &[OutputRow]) -> Vec<(f64, Vec<&OutputRow>)> {
    let mut groups: Vec<(f64, Vec<&OutputRow>)> = Vec::new();
    for row in rows {
        match groups.last_mut() {
            Some((b, g)) if *b == row.beta => g.push(row),
            _ => groups.push((row.beta, vec![row])),
        }
    }
    groups
}

pub fn column(rows: &[&OutputRow], f: impl Fn(&OutputRow) -> f64) -> Vec<f64> {
    rows.iter().map(|r| f(r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extrema() {
        assert_eq!(interior_extrema(&[0.0, 1.0, 0.0, 1.0]), vec![1, 2]);
        assert!(interior_extrema(&[0.0, 1.0, 1.0, 2.0]).is_empty());
        assert!(interior_extrema(&[1.0]).is_empty());
        assert!(interior_extrema(&[]).is_empty());
    }

    #[test]
    fn monotone() {
        assert!(max_increase(&[3.0, 2.0, 2.0, 1.0]) <= 0.0);
        assert_eq!(max_increase(&[3.0, 2.0, 2.5]), 0.5);
        assert_eq!(dominance_fraction(&[1.0, 2.0, -1.0, 3.0], &[0.0; 4], 1), 2.0 / 3.0);
    }
}
