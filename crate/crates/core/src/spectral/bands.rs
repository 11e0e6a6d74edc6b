use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transfer::{MonodromySource, Rotation};

/// Relative tolerance on the lifted rotation number when comparing it with a level `2 pi L`.
const LEVEL_EPS: f64 = 1e-14;

fn level_eps(target: f64) -> f64 {
    LEVEL_EPS * target.abs().max(1.0)
}

/// Arcs narrower than this are measured from the discriminant slope instead of
/// from their bisected endpoints.
const RESOLVED_WIDTH: f64 = 1e-9;

/// A closed arc `[left, right]` of the unit circle in angle coordinates.
///
/// `left` lies in `[0, 2 pi)` and `right = left + length`, so `right` may
/// exceed `2 pi` when the arc wraps through angle zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub left: f64,
    pub right: f64,
}

impl Arc {
    /// Normalizes `left` into `[0, 2 pi)` and keeps the length.
    pub fn new(left: f64, right: f64) -> Self {
        let len = (right - left).clamp(0.0, TAU);
        let l = left.rem_euclid(TAU);
        let l = if l >= TAU { 0.0 } else { l };
        Self {
            left: l,
            right: l + len,
        }
    }

    pub fn length(&self) -> f64 {
        self.right - self.left
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.left + self.right)
    }

    /// Whether the angle `tau` (any representative) lies in the arc.
    pub fn contains(&self, tau: f64) -> bool {
        let t = (tau - self.left).rem_euclid(TAU);
        t <= self.length() || self.length() >= TAU
    }

    /// Angular distance from `tau` to the nearer endpoint, for `tau` inside.
    pub fn edge_distance(&self, tau: f64) -> f64 {
        if self.length() >= TAU {
            return f64::INFINITY;
        }
        let t = (tau - self.left).rem_euclid(TAU);
        t.min(self.length() - t)
    }
}

/// One band unit: the arc over which the rotation number climbs from `2 pi level`
/// to `2 pi (level + 1)`. Each unit carries density-of-states mass `1/q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandUnit {
    pub arc: Arc,
    pub level: i64,
    /// Lebesgue measure of the unit. Equals `arc.length()` when resolved,
    /// otherwise `4/|Delta'|` at the centre.
    pub width: f64,
    /// `ln(width)`, finite even when `width` underflows.
    pub log_width: f64,
}

/// Bands and gaps of a periodic word.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandList {
    pub q: usize,
    /// Maximal arcs where `|Delta| <= 2`, sorted by `left`.
    pub bands: Vec<Arc>,
    /// Open gaps, sorted by `left`.
    pub gaps: Vec<Arc>,
    /// `|Delta| - 2` at each band edge, two entries per band (left, right).
    pub edge_residuals: Vec<f64>,
    /// Points where a gap closes (`|Delta|` touches 2 from inside).
    pub touch_points: Vec<f64>,
    /// The `q` band units in order of increasing rotation number.
    pub units: Vec<BandUnit>,
}

impl BandList {
    /// Lebesgue measure of the spectrum.
    pub fn measure(&self) -> f64 {
        self.units.iter().map(|u| u.width).sum()
    }

    /// `ln` of the Lebesgue measure, computed without underflow.
    pub fn log_measure(&self) -> f64 {
        let m = self.units.iter().map(|u| u.log_width).fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return m;
        }
        m + self.units.iter().map(|u| (u.log_width - m).exp()).sum::<f64>().ln()
    }

    pub fn band_containing(&self, tau: f64) -> Option<&Arc> {
        self.bands.iter().find(|b| b.contains(tau))
    }

    pub fn unit_containing(&self, tau: f64) -> Option<&BandUnit> {
        self.units.iter().find(|u| u.arc.contains(tau))
    }

    /// Sum of `width^gamma` over units: the Hausdorff content of the natural cover.
    pub fn hausdorff_content(&self, gamma: f64) -> f64 {
        self.units.iter().map(|u| (gamma * u.log_width).exp()).sum()
    }

    /// The list with every arc translated by `phi`.
    pub fn shifted(&self, phi: f64) -> BandList {
        let sh = |a: &Arc| Arc::new(a.left + phi, a.right + phi);
        let mut out = self.clone();
        out.bands = self.bands.iter().map(sh).collect();
        out.gaps = self.gaps.iter().map(sh).collect();
        out.touch_points = self.touch_points.iter().map(|t| (t + phi).rem_euclid(TAU)).collect();
        for u in &mut out.units {
            u.arc = sh(&u.arc);
        }
        out.bands.sort_by(|a, b| a.left.total_cmp(&b.left));
        out.gaps.sort_by(|a, b| a.left.total_cmp(&b.left));
        out
    }
}

pub(crate) fn rotation_at<S: MonodromySource + ?Sized>(src: &S, tau: f64) -> Rotation {
    src.circle(tau, false, true).rotation().expect("lift requested")
}

fn abs_discriminant<S: MonodromySource + ?Sized>(src: &S, tau: f64) -> f64 {
    src.circle(tau, false, false).discriminant().abs()
}

/// Bisects a monotone predicate that is false at `lo` and true at `hi`,
/// down to adjacent floating-point numbers.
fn bisect(mut lo: f64, mut hi: f64, pred: impl Fn(f64) -> bool) -> (f64, f64) {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// Locates bands by counting rotation-number levels on a uniform grid of
/// `grid_size` cells and bisecting each level crossing to full precision.
///
/// Every band is found regardless of grid spacing, because the rotation
/// number climbs by exactly `2 pi` across each band. Gaps whose discriminant
/// excess is at most `edge_tol` are reported as touch points.
pub fn band_list_of<S: MonodromySource + ?Sized>(src: &S, grid_size: usize, edge_tol: f64) -> Result<BandList> {
    let q = src.period();
    if grid_size < 8 * q {
        return Err(Error::GridTooCoarse {
            grid: grid_size,
            detail: format!("need at least 8q = {} cells", 8 * q),
        });
    }
    let n = grid_size;
    let grid: Vec<f64> = (0..=n).map(|i| TAU * i as f64 / n as f64).collect();
    let rots: Vec<Rotation> = map_grid(&grid, |t| rotation_at(src, t));
    let r: Vec<f64> = rots.iter().map(|x| x.r).collect();
    let climb = (r[n] - r[0]) / TAU;
    if (climb - q as f64).abs() > 1e-6 {
        return Err(Error::GridTooCoarse {
            grid: grid_size,
            detail: format!("rotation number climbs {climb} turns, expected {q}"),
        });
    }
    let r0 = r[0] / TAU;
    let on_level = rots[0].in_gap || (r0 - r0.round()).abs() <= 1e-12;
    let levels: Vec<i64> = if on_level {
        let l0 = r0.round() as i64;
        (l0..=l0 + q as i64).collect()
    } else {
        let l0 = r0.ceil() as i64;
        (l0..l0 + q as i64).collect()
    };

    let geq = |level: i64| {
        let target = TAU * level as f64;
        move |t: f64| rotation_at(src, t).r >= target - level_eps(target)
    };
    let leq = |level: i64| {
        let target = TAU * level as f64;
        move |t: f64| rotation_at(src, t).r <= target + level_eps(target)
    };
    // Level set {R = 2 pi L} as [first, last] inside [0, 2 pi]; `after` is the
    // end of the previous level set, a lower bound for `first`.
    let level_set = |level: i64, after: Option<f64>| -> (f64, f64) {
        let target = TAU * level as f64;
        let first = match r.iter().position(|&x| x >= target - level_eps(target)) {
            Some(0) => 0.0,
            Some(i) => {
                let pred = geq(level);
                let mut lo = grid[i - 1];
                let mut hi = grid[i];
                if let Some(a) = after.filter(|&a| a > lo && a < hi) {
                    lo = a;
                    // Units below resolution end within a few ulps of their start.
                    let probe = a + 16.0 * f64::EPSILON * a.abs().max(1.0);
                    if probe < hi && pred(probe) {
                        hi = probe;
                    }
                }
                bisect(lo, hi, pred).1
            }
            None => TAU,
        };
        let last = match r.iter().rposition(|&x| x <= target + level_eps(target)) {
            Some(i) if i == n => TAU,
            Some(i) => {
                let p = leq(level);
                bisect(grid[i], grid[i + 1], |t| !p(t)).0
            }
            None => 0.0,
        };
        (first, last)
    };
    let mut sets: Vec<(f64, f64)> = Vec::with_capacity(levels.len());
    for &l in &levels {
        let after = sets.last().map(|s: &(f64, f64)| s.1);
        sets.push(level_set(l, after));
    }

    // Units between consecutive level sets.
    let mut raw_units: Vec<(f64, f64, i64)> = Vec::with_capacity(q);
    for k in 0..levels.len() - 1 {
        raw_units.push((sets[k].1, sets[k + 1].0, levels[k]));
    }
    // Gap candidates as (start, end) in unrolled coordinates.
    let mut gap_sets: Vec<(f64, f64)> = Vec::new();
    if on_level {
        let last = sets.len() - 1;
        gap_sets.push((sets[last].0, sets[0].1 + TAU));
        gap_sets.extend(sets[1..last].iter().copied());
    } else {
        let last = *levels.last().unwrap();
        raw_units.push((sets[sets.len() - 1].1, sets[0].0 + TAU, last));
        gap_sets.extend(sets.iter().copied());
    }
    debug_assert_eq!(raw_units.len(), q);

    let units: Vec<BandUnit> = raw_units
        .iter()
        .map(|&(a, b, level)| make_unit(src, a, b.max(a), level))
        .collect();

    // Classify each gap candidate: open gap or touch point.
    let mut gaps = Vec::new();
    let mut touch_points = Vec::new();
    for &(s, e) in &gap_sets {
        let mid = 0.5 * (s + e);
        let excess = if e > s { abs_discriminant(src, mid) - 2.0 } else { 0.0 };
        if excess > edge_tol {
            gaps.push(Arc::new(s, e));
        } else {
            touch_points.push(mid.rem_euclid(TAU));
        }
    }
    gaps.sort_by(|a, b| a.left.total_cmp(&b.left));
    touch_points.sort_by(f64::total_cmp);

    // Bands: complements of the open gaps.
    let bands: Vec<Arc> = if gaps.is_empty() {
        vec![Arc::new(units[0].arc.left, units[0].arc.left + TAU)]
    } else {
        let m = gaps.len();
        (0..m)
            .map(|i| {
                let g = gaps[i];
                let next = gaps[(i + 1) % m];
                let mut right = next.left;
                while right < g.right {
                    right += TAU;
                }
                Arc::new(g.right, right)
            })
            .collect::<Vec<_>>()
    };
    let mut bands = bands;
    bands.sort_by(|a, b| a.left.total_cmp(&b.left));
    let edge_residuals = if gaps.is_empty() {
        Vec::new()
    } else {
        bands
            .iter()
            .flat_map(|b| {
                [
                    abs_discriminant(src, b.left) - 2.0,
                    abs_discriminant(src, b.right) - 2.0,
                ]
            })
            .collect()
    };
    Ok(BandList {
        q,
        bands,
        gaps,
        edge_residuals,
        touch_points,
        units,
    })
}

fn make_unit<S: MonodromySource + ?Sized>(src: &S, a: f64, b: f64, level: i64) -> BandUnit {
    let arc = Arc::new(a, b);
    let len = b - a;
    let e = src.circle(0.5 * (a + b), len < RESOLVED_WIDTH, false);
    // A resolved unit is a band, so its centre is elliptic. A hyperbolic centre
    // means the edges were placed by rounding noise around a band far below
    // resolution, which is then measured like any unresolved band.
    if len >= RESOLVED_WIDTH && e.discriminant().abs() <= 2.0 {
        return BandUnit {
            arc,
            level,
            width: len,
            log_width: len.ln(),
        };
    }
    let e = if e.dm.is_some() {
        e
    } else {
        src.circle(0.5 * (a + b), true, false)
    };
    // Across a thin band Delta sweeps [-2, 2] almost linearly.
    let log_width = 4f64.ln() - e.log_abs_discriminant_derivative().unwrap_or(f64::NEG_INFINITY);
    let log_width = log_width.min(len.max(f64::MIN_POSITIVE).ln());
    BandUnit {
        arc,
        level,
        width: log_width.exp(),
        log_width,
    }
}

#[cfg(feature = "parallel")]
pub(crate) fn map_grid<T: Send>(grid: &[f64], f: impl Fn(f64) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    grid.par_iter().map(|&t| f(t)).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_grid<T: Send>(grid: &[f64], f: impl Fn(f64) -> T + Sync + Send) -> Vec<T> {
    grid.iter().map(|&t| f(t)).collect()
}
