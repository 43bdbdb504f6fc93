//! Thickening and discrete closure of point sets.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::grid::Grid;
use crate::error::{Error, Result};
use crate::space::{for_each_window_point, in_space, Limits, Window};

/// Where thickened and complemented sets live.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Domain {
    /// `X_level ∩ [lo, hi]^level`.
    Space { window: Window },
    /// Every integer point of `[lo, hi]^dim`.
    Cube { dim: usize, lo: i64, hi: i64 },
}

impl Domain {
    pub fn dim(&self) -> usize {
        match *self {
            Domain::Space { window } => window.level,
            Domain::Cube { dim, .. } => dim,
        }
    }

    pub fn contains(&self, c: &[i64]) -> bool {
        match *self {
            Domain::Space { window } => window.contains(c) && in_space(c, window.level),
            Domain::Cube { dim, lo, hi } => c.len() == dim && c.iter().all(|&x| lo <= x && x <= hi),
        }
    }

    pub fn points(&self, limits: &Limits) -> Result<Vec<Vec<i64>>> {
        let mut out = Vec::new();
        match *self {
            Domain::Space { window } => for_each_window_point(&window, limits, |c| out.push(c.to_vec()))?,
            Domain::Cube { dim, lo, hi } => {
                let side = lo.abs_diff(hi) as usize + 1;
                let grid = Grid::new(dim, side, limits)?;
                out = (0..grid.len)
                    .map(|i| grid.coords(i).into_iter().map(|x| x + lo).collect())
                    .collect();
            }
        }
        Ok(out)
    }
}

fn check_dims(set: &BTreeSet<Vec<i64>>, d: usize) -> Result<()> {
    match set.iter().find(|p| p.len() != d) {
        Some(p) => Err(Error::Dimension {
            expected: d,
            got: p.len(),
        }),
        None => Ok(()),
    }
}

/// Domain points within max-metric distance `t` of `set`.
pub fn thicken(set: &BTreeSet<Vec<i64>>, t: u64, domain: &Domain) -> Result<BTreeSet<Vec<i64>>> {
    let d = domain.dim();
    check_dims(set, d)?;
    let t = i64::try_from(t).map_err(|_| Error::Parameter("radius too large".into()))?;
    let span = (2 * t as u128 + 1).checked_pow(d as u32).unwrap_or(u128::MAX);
    Limits::default().check_points("ball points", span.saturating_mul(set.len() as u128))?;
    let width = 2 * t + 1;
    let mut out = BTreeSet::new();
    for p in set {
        for code in 0..span as i64 {
            let mut c = code;
            let mut q = p.clone();
            for x in q.iter_mut().rev() {
                *x += c % width - t;
                c /= width;
            }
            if domain.contains(&q) {
                out.insert(q);
            }
        }
    }
    Ok(out)
}

/// Domain points outside `covered`, together with their domain neighbours
/// that differ by one in a single coordinate.
pub fn complement_closure(covered: &BTreeSet<Vec<i64>>, domain: &Domain) -> Result<BTreeSet<Vec<i64>>> {
    let d = domain.dim();
    check_dims(covered, d)?;
    let mut out = BTreeSet::new();
    for p in domain.points(&Limits::default())? {
        if covered.contains(&p) {
            continue;
        }
        for axis in 0..d {
            for step in [-1, 1] {
                let mut q = p.clone();
                q[axis] += step;
                if domain.contains(&q) {
                    out.insert(q);
                }
            }
        }
        out.insert(p);
    }
    Ok(out)
}

/// Chebyshev dilation of a dense mask by `t`, one axis at a time.
pub(crate) fn dilate(grid: &Grid, mask: &[bool], t: usize) -> Vec<bool> {
    let mut cur = mask.to_vec();
    let side = grid.side;
    for axis in 0..grid.dim {
        let stride = grid.stride(axis);
        let mut next = vec![false; grid.len];
        let mut prefix = vec![0usize; side + 1];
        for start in 0..grid.len {
            if grid.coord(start, axis) != 0 {
                continue;
            }
            for x in 0..side {
                prefix[x + 1] = prefix[x] + usize::from(cur[start + x * stride]);
            }
            for x in 0..side {
                let lo = x.saturating_sub(t);
                let hi = (x + t).min(side - 1);
                next[start + x * stride] = prefix[hi + 1] > prefix[lo];
            }
        }
        cur = next;
    }
    cur
}
