//! Pearson's r and Kendall's τ-b.

use super::StatsError;

fn check_pair(xs: &[f64], ys: &[f64]) -> Result<(), StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::LengthMismatch { left: xs.len(), right: ys.len() });
    }
    if xs.len() < 2 {
        return Err(StatsError::TooFewPoints { needed: 2, got: xs.len() });
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    Ok(())
}

/// Sample Pearson correlation, clamped to `[-1, 1]`.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, StatsError> {
    check_pair(xs, ys)?;
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ConstantInput);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Integer pair counts behind τ-b.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KendallCounts {
    /// Concordant minus discordant pairs.
    pub score: i64,
    /// Pairs not tied in x.
    pub untied_x: u64,
    /// Pairs not tied in y.
    pub untied_y: u64,
}

impl KendallCounts {
    pub fn tau_b(&self) -> Result<f64, StatsError> {
        if self.untied_x == 0 || self.untied_y == 0 {
            return Err(StatsError::AllTied);
        }
        Ok(self.score as f64 / ((self.untied_x as f64) * (self.untied_y as f64)).sqrt())
    }
}

fn tied_pairs_in_runs<T: PartialEq>(sorted: &[T]) -> u64 {
    let mut total = 0u64;
    let mut run = 1u64;
    for i in 1..=sorted.len() {
        if i < sorted.len() && sorted[i] == sorted[i - 1] {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total
}

/// Merge sort counting inversions (strictly decreasing pairs).
fn sort_counting_swaps(v: &mut [f64], buf: &mut Vec<f64>) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = sort_counting_swaps(&mut v[..mid], buf) + sort_counting_swaps(&mut v[mid..], buf);
    buf.clear();
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if v[j] < v[i] {
            swaps += (mid - i) as u64;
            buf.push(v[j]);
            j += 1;
        } else {
            buf.push(v[i]);
            i += 1;
        }
    }
    buf.extend_from_slice(&v[i..mid]);
    buf.extend_from_slice(&v[j..n]);
    v.copy_from_slice(buf);
    swaps
}

/// Knight's O(n log n) pair counting.
pub fn kendall_counts(xs: &[f64], ys: &[f64]) -> Result<KendallCounts, StatsError> {
    check_pair(xs, ys)?;
    let n = xs.len() as u64;
    // Adding 0.0 folds -0.0 into 0.0 so the sort order agrees with `==`.
    let mut pairs: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(x, y)| (x + 0.0, y + 0.0)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let all = n * (n - 1) / 2;
    let tied_x = tied_pairs_in_runs(&pairs.iter().map(|p| p.0).collect::<Vec<_>>());
    let tied_xy = tied_pairs_in_runs(&pairs);
    let mut y: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let mut buf = Vec::with_capacity(y.len());
    let swaps = sort_counting_swaps(&mut y, &mut buf);
    let tied_y = tied_pairs_in_runs(&y);

    // Pairs tied in neither coordinate are concordant or discordant; discordant ones are the
    // inversions left in y after sorting by (x, y).
    let untied_both = all + tied_xy - tied_x - tied_y;
    let score = untied_both as i64 - 2 * swaps as i64;
    Ok(KendallCounts { score, untied_x: all - tied_x, untied_y: all - tied_y })
}

/// Kendall τ-b: `(C − D) / sqrt((C + D + Tx)(C + D + Ty))`.
pub fn kendall_tau(xs: &[f64], ys: &[f64]) -> Result<f64, StatsError> {
    kendall_counts(xs, ys)?.tau_b()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pearson_examples() {
        assert!((pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
        assert!((pearson(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap() - 0.8).abs() < 1e-12);
        assert_eq!(pearson(&[1.0, 1.0], &[1.0, 2.0]), Err(StatsError::ConstantInput));
        assert!(matches!(pearson(&[1.0], &[1.0]), Err(StatsError::TooFewPoints { .. })));
    }

    #[test]
    fn kendall_examples() {
        assert_eq!(kendall_tau(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
        assert!((kendall_tau(&[1.0, 2.0, 3.0], &[3.0, 1.0, 2.0]).unwrap() + 1.0 / 3.0).abs() < 1e-15);
        // One x-tie: C = 2, D = 0, Tx = 1, Ty = 0.
        let t = kendall_tau(&[1.0, 1.0, 2.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(t, 2.0 / (3.0f64 * 2.0).sqrt());
        assert_eq!(kendall_tau(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(StatsError::AllTied));
        assert_eq!(kendall_tau(&[0.0, -0.0, 1.0], &[-0.0, 0.0, 1.0]), Ok(1.0));
    }
}
