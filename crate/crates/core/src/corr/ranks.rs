//! Average-tie ranking.

use crate::error::{Error, Result};

/// Ranks of a column, from least to greatest, starting at 1. Tied values
/// receive the mean of the ranks they occupy, so the rank sum is always
/// n(n+1)/2.
pub fn ranks_average_ties(column: &[f64]) -> Result<Vec<f64>> {
    let n = column.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    for (row, &v) in column.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite { row, column: 0 });
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| column[a].total_cmp(&column[b]));

    let mut ranks = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && column[order[end]] == column[order[start]] {
            end += 1;
        }
        // Positions start..end (0-based) share ranks start+1..end; average them.
        let avg = (start + end + 1) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = avg;
        }
        start = end;
    }
    Ok(ranks)
}
