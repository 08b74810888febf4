use serde::{Deserialize, Serialize};

use crate::sections::{Component, Field2D, GridField};

/// Default ridge threshold in units of the median absolute first difference.
pub const DEFAULT_KAPPA: f64 = 10.0;

/// Knobs of the grid detectors. The default is the plain detector: strict
/// slice minima and jumps above `kappa` times the pooled median difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub kappa: f64,
    /// Discard slice minima whose prominence along the slice is below this
    /// fraction of the field's range over valid cells.
    pub min_prominence: Option<f64>,
    /// Keep only jumps that are at least as large as the jumps of both
    /// neighbours along the same axis.
    pub suppress_non_maxima: bool,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            kappa: DEFAULT_KAPPA,
            min_prominence: None,
            suppress_non_maxima: false,
        }
    }
}

/// Every row and column as `(stride, length, start)` into the flat values.
fn slices(field: &Field2D) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
    let rows = (0..field.nv).map(move |j| (1, field.nu, j * field.nu));
    let cols = (0..field.nu).map(move |i| (field.nu, field.nv, i));
    rows.chain(cols)
}

fn valid(x: f64) -> bool {
    !x.is_nan()
}

/// Strict interior minima along every row and column. A cell qualifies if
/// it is strictly below both neighbours of one slice; a masked neighbour
/// disqualifies it for that slice. The result is a mask over the field.
pub fn slice_minima(field: &Field2D) -> Vec<bool> {
    slice_minima_with(field, None)
}

/// [`slice_minima`] keeping only minima whose slice prominence exceeds
/// `min_prominence` times the range of the field.
pub fn slice_minima_with(field: &Field2D, min_prominence: Option<f64>) -> Vec<bool> {
    let vals = &field.values;
    let threshold = min_prominence.map(|frac| frac * range(field));
    let mut out = vec![false; vals.len()];
    for (stride, len, start) in slices(field) {
        let at = |k: usize| vals[start + k * stride];
        for k in 1..len.saturating_sub(1) {
            let (l, m, r) = (at(k - 1), at(k), at(k + 1));
            if !(valid(l) && valid(m) && valid(r) && m < l && m < r) {
                continue;
            }
            if let Some(t) = threshold {
                if prominence(&at, len, k) <= t {
                    continue;
                }
            }
            out[start + k * stride] = true;
        }
    }
    out
}

/// Height of the lower of the two walls around the minimum at `k`: each
/// wall is the highest value met before the slice drops below the minimum,
/// ends, or reaches a masked cell.
fn prominence(at: &impl Fn(usize) -> f64, len: usize, k: usize) -> f64 {
    let m = at(k);
    let wall = |idx: &mut dyn Iterator<Item = usize>| {
        let mut top = m;
        for q in idx {
            let x = at(q);
            if !valid(x) || x < m {
                break;
            }
            top = top.max(x);
        }
        top
    };
    let left = wall(&mut (0..k).rev());
    let right = wall(&mut (k + 1..len));
    left.min(right) - m
}

fn range(field: &Field2D) -> f64 {
    let (lo, hi) = field
        .values
        .iter()
        .filter(|x| valid(**x))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(*x), hi.max(*x)));
    if lo.is_finite() {
        hi - lo
    } else {
        0.0
    }
}

/// Median of `|f(k+1) - f(k)|` over all valid pairs of both axes.
pub fn median_abs_difference(field: &Field2D) -> f64 {
    let vals = &field.values;
    let mut diffs = Vec::new();
    for (stride, len, start) in slices(field) {
        for k in 0..len.saturating_sub(1) {
            let (a, b) = (vals[start + k * stride], vals[start + (k + 1) * stride]);
            if valid(a) && valid(b) {
                diffs.push((b - a).abs());
            }
        }
    }
    if diffs.is_empty() {
        return 0.0;
    }
    let mid = diffs.len() / 2;
    let (_, m, _) = diffs.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *m;
    if diffs.len() % 2 == 1 {
        upper
    } else {
        let lower = diffs[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    }
}

/// Cells where the jump of the one-sided differences `|D⁺ - D⁻|` along a
/// row or column exceeds `kappa` times the median absolute difference.
/// Both neighbours must be valid.
pub fn singularity_mask(field: &Field2D, kappa: f64) -> Vec<bool> {
    singularity_mask_with(
        field,
        &DetectorConfig {
            kappa,
            ..DetectorConfig::default()
        },
    )
}

pub fn singularity_mask_with(field: &Field2D, config: &DetectorConfig) -> Vec<bool> {
    let vals = &field.values;
    let threshold = config.kappa * median_abs_difference(field);
    let mut out = vec![false; vals.len()];
    for (stride, len, start) in slices(field) {
        let at = |k: usize| vals[start + k * stride];
        let jump = |k: usize| -> Option<f64> {
            if k == 0 || k + 1 >= len {
                return None;
            }
            let (l, m, r) = (at(k - 1), at(k), at(k + 1));
            (valid(l) && valid(m) && valid(r)).then(|| ((r - m) - (m - l)).abs())
        };
        for k in 1..len.saturating_sub(1) {
            let Some(j) = jump(k) else { continue };
            if j <= threshold {
                continue;
            }
            if config.suppress_non_maxima {
                let left = k.checked_sub(1).and_then(jump).unwrap_or(0.0);
                let right = jump(k + 1).unwrap_or(0.0);
                if j < left || j < right {
                    continue;
                }
            }
            out[start + k * stride] = true;
        }
    }
    out
}

/// Cell centres of the set cells of `mask`.
pub fn mask_points(grid: &GridField, mask: &[bool]) -> Vec<[f64; 2]> {
    let mut out = Vec::new();
    for j in 0..grid.nv {
        for i in 0..grid.nu {
            if mask[j * grid.nu + i] {
                out.push([grid.u(i), grid.v(j)]);
            }
        }
    }
    out
}

/// Slice minima of the total descriptor, as `(u, v)` cell centres.
pub fn detect_minima(grid: &GridField) -> Vec<[f64; 2]> {
    mask_points(grid, &slice_minima(&grid.field(Component::Total)))
}

/// Singular cells of the total descriptor at the default threshold.
pub fn detect_singularities(grid: &GridField) -> Vec<bool> {
    singularity_mask(&grid.field(Component::Total), DEFAULT_KAPPA)
}

/// Minima together with singular cells of one component.
pub fn detection_mask(grid: &GridField, component: Component, config: &DetectorConfig) -> Vec<bool> {
    let field = grid.field(component);
    let minima = slice_minima_with(&field, config.min_prominence);
    let ridges = singularity_mask_with(&field, config);
    minima.iter().zip(&ridges).map(|(a, b)| *a || *b).collect()
}

/// Cells of `a` with a cell of `b` in their 3x3 neighbourhood, and the
/// other way round.
pub fn crossing_mask(nu: usize, nv: usize, a: &[bool], b: &[bool]) -> Vec<bool> {
    let near = |m: &[bool], i: usize, j: usize| {
        let (i0, i1) = (i.saturating_sub(1), (i + 1).min(nu - 1));
        let (j0, j1) = (j.saturating_sub(1), (j + 1).min(nv - 1));
        (j0..=j1).any(|jj| (i0..=i1).any(|ii| m[jj * nu + ii]))
    };
    let mut out = vec![false; nu * nv];
    for j in 0..nv {
        for i in 0..nu {
            let k = j * nu + i;
            out[k] = (a[k] && near(b, i, j)) || (b[k] && near(a, i, j));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(nu: usize, nv: usize, f: impl Fn(f64, f64) -> f64) -> Field2D {
        let c = |n: usize, k: usize| -1.0 + 2.0 * (k as f64 + 0.5) / n as f64;
        Field2D::from_fn(nu, nv, |i, j| Some(f(c(nu, i), c(nv, j))))
    }

    #[test]
    fn one_dimensional_minimum() {
        let f = Field2D {
            nu: 5,
            nv: 1,
            values: vec![3.0, 2.0, 1.0, 2.0, 3.0],
        };
        assert_eq!(slice_minima(&f), vec![false, false, true, false, false]);
    }

    #[test]
    fn constant_field_has_no_minima() {
        let f = field(20, 20, |_, _| 1.0);
        assert!(slice_minima(&f).iter().all(|m| !m));
    }

    #[test]
    fn masked_neighbour_disqualifies() {
        let f = Field2D {
            nu: 4,
            nv: 1,
            values: vec![3.0, 1.0, f64::NAN, 3.0],
        };
        assert!(slice_minima(&f).iter().all(|m| !m));
    }

    #[test]
    fn kink_column_is_flagged() {
        // 41 columns, the centre one on u = 0. The jump there is 2Δ against
        // a median difference of Δ, so the threshold must sit below 2.
        let f = field(41, 30, |u, _| u.abs());
        let m = singularity_mask(&f, 1.5);
        for j in 0..30 {
            for i in 0..41 {
                assert_eq!(m[j * 41 + i], i == 20, "cell ({i}, {j})");
            }
        }
        assert!(singularity_mask(&f, DEFAULT_KAPPA).iter().all(|x| !x));
    }

    #[test]
    fn smooth_field_has_no_ridges() {
        let f = field(50, 50, |u, v| u * u + v * v);
        assert!(singularity_mask(&f, DEFAULT_KAPPA).iter().all(|m| !m));
    }

    #[test]
    fn prominence_filter_drops_shallow_dips() {
        let mut values = vec![10.0, 5.0, 0.0, 5.0, 10.0, 10.0 - 1e-6, 10.0];
        let f = Field2D { nu: 7, nv: 1, values: values.clone() };
        assert_eq!(slice_minima(&f).iter().filter(|m| **m).count(), 2);
        let kept = slice_minima_with(&f, Some(1e-3));
        assert_eq!(kept.iter().filter(|m| **m).count(), 1);
        assert!(kept[2]);
        values[5] = 10.0;
        let f = Field2D { nu: 7, nv: 1, values };
        assert_eq!(slice_minima(&f).iter().filter(|m| **m).count(), 1);
    }

    #[test]
    fn non_maximum_suppression_thins_ridges() {
        let f = field(40, 1, |u, _| (u - 0.013).abs().sqrt());
        let config = DetectorConfig {
            kappa: 0.5,
            ..DetectorConfig::default()
        };
        let plain = singularity_mask_with(&f, &config);
        let thin = singularity_mask_with(
            &f,
            &DetectorConfig {
                suppress_non_maxima: true,
                ..config
            },
        );
        let flagged = |m: &[bool]| (0..40).filter(|k| m[*k]).collect::<Vec<_>>();
        assert_eq!(flagged(&plain), vec![18, 20, 21]);
        // The kink lies in cell 20 (centres at -0.975 + 0.05 k); its
        // neighbour 21 is dropped, the secondary peak at 18 survives.
        assert_eq!(flagged(&thin), vec![18, 20]);
    }

    #[test]
    fn median_of_even_count() {
        let f = Field2D {
            nu: 3,
            nv: 1,
            values: vec![0.0, 1.0, 4.0],
        };
        assert_eq!(median_abs_difference(&f), 2.0);
    }

    #[test]
    fn crossing_of_two_diagonals() {
        let n = 6;
        let a: Vec<bool> = (0..n * n).map(|k| k % n == k / n).collect();
        let b: Vec<bool> = (0..n * n).map(|k| k % n + k / n == n - 1).collect();
        let c = crossing_mask(n, n, &a, &b);
        let hits: Vec<(usize, usize)> = (0..n * n).filter(|k| c[*k]).map(|k| (k % n, k / n)).collect();
        assert_eq!(hits, vec![(2, 2), (3, 2), (2, 3), (3, 3)]);
    }
}
