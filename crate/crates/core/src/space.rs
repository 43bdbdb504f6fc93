//! Integer points of the grids `Xₙ`, finite windows, and the cross-level
//! metric on their disjoint union.
//!
//! `Xₙ` is the union of the lines in `ℝⁿ` that are parallel to a coordinate
//! axis and pass through the lattice `(nℤ)ⁿ`. An integer vector of length `n`
//! lies in `Xₙ` exactly when at most one of its coordinates is not a multiple
//! of `n`. Points at different levels are compared by zero-padding to the
//! longer length, taking the max-metric distance, and flooring the result at
//! the offset `c(l, k) = l + (l+1) + … + (k−1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of levels a computation may touch.
pub const DEFAULT_MAX_LEVEL: usize = 16;

/// Size caps applied before anything is materialized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Largest number of window points that may be enumerated.
    pub max_points: u64,
    /// Largest number of family members (or per-axis indices) that may be
    /// instantiated.
    pub max_members: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_points: 4_000_000,
            max_members: 1_000_000,
        }
    }
}

impl Limits {
    /// A single cap used for both points and members.
    pub fn uniform(cap: u64) -> Self {
        Limits {
            max_points: cap,
            max_members: cap,
        }
    }

    pub(crate) fn check_points(&self, what: &'static str, needed: u128) -> Result<()> {
        if needed > self.max_points as u128 {
            return Err(Error::Capacity {
                what,
                needed,
                cap: self.max_points,
            });
        }
        Ok(())
    }

    pub(crate) fn check_members(&self, what: &'static str, needed: u128) -> Result<()> {
        if needed > self.max_members as u128 {
            return Err(Error::Capacity {
                what,
                needed,
                cap: self.max_members,
            });
        }
        Ok(())
    }
}

/// True iff `coords` is an integer point of `X_level`.
pub fn membership(coords: &[i64], level: usize) -> Result<bool> {
    if level == 0 {
        return Err(Error::Parameter("level must be positive".into()));
    }
    if coords.len() != level {
        return Err(Error::Dimension {
            expected: level,
            got: coords.len(),
        });
    }
    Ok(in_space(coords, level))
}

#[inline]
pub(crate) fn in_space(coords: &[i64], level: usize) -> bool {
    let n = level as i64;
    coords.iter().filter(|&&x| x.rem_euclid(n) != 0).count() <= 1
}

/// Offset `c(l, k)` between levels; symmetric, zero on the diagonal.
pub fn level_offset(l: usize, k: usize) -> u64 {
    let (lo, hi) = if l <= k { (l, k) } else { (k, l) };
    let tri = |x: usize| (x as u64) * (x as u64).saturating_sub(1) / 2;
    tri(hi) - tri(lo)
}

/// An ordered pair of levels with its offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelPair {
    pub l: usize,
    pub k: usize,
    pub offset: u64,
}

impl LevelPair {
    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a == 0 || b == 0 {
            return Err(Error::Parameter("levels must be positive".into()));
        }
        let (l, k) = if a <= b { (a, b) } else { (b, a) };
        Ok(LevelPair {
            l,
            k,
            offset: level_offset(l, k),
        })
    }
}

/// An integer point of `X_level`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawPoint")]
pub struct Point {
    level: usize,
    coords: Vec<i64>,
}

#[derive(Deserialize)]
struct RawPoint {
    level: usize,
    coords: Vec<i64>,
}

impl TryFrom<RawPoint> for Point {
    type Error = Error;

    fn try_from(raw: RawPoint) -> Result<Self> {
        Point::new(raw.level, raw.coords)
    }
}

impl Point {
    pub fn new(level: usize, coords: Vec<i64>) -> Result<Self> {
        if !membership(&coords, level)? {
            return Err(Error::NotInSpace { level, coords });
        }
        Ok(Point { level, coords })
    }

    /// Caller guarantees the point lies in `X_level`.
    pub(crate) fn from_parts(level: usize, coords: Vec<i64>) -> Self {
        debug_assert!(coords.len() == level && in_space(&coords, level));
        Point { level, coords }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<i64> {
        self.coords
    }
}

/// Max-metric distance between two coordinate vectors, zero-padding the
/// shorter one.
pub fn padded_max_dist(a: &[i64], b: &[i64]) -> u64 {
    let len = a.len().max(b.len());
    (0..len)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            x.abs_diff(y)
        })
        .max()
        .unwrap_or(0)
}

/// The metric on the disjoint union of the levels.
pub fn dist(a: &Point, b: &Point) -> u64 {
    padded_max_dist(&a.coords, &b.coords).max(level_offset(a.level, b.level))
}

/// The box `[lo, hi]^level`, intersected with `X_level` when points are
/// enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawWindow")]
pub struct Window {
    pub level: usize,
    pub lo: i64,
    pub hi: i64,
}

#[derive(Deserialize)]
struct RawWindow {
    level: usize,
    lo: i64,
    hi: i64,
}

impl TryFrom<RawWindow> for Window {
    type Error = Error;

    fn try_from(raw: RawWindow) -> Result<Self> {
        Window::new(raw.level, raw.lo, raw.hi)
    }
}

impl Window {
    pub fn new(level: usize, lo: i64, hi: i64) -> Result<Self> {
        if level == 0 {
            return Err(Error::Parameter("window level must be positive".into()));
        }
        if lo > hi {
            return Err(Error::Parameter(format!("window bounds reversed: {lo} > {hi}")));
        }
        Ok(Window { level, lo, hi })
    }

    pub fn side(&self) -> u64 {
        self.lo.abs_diff(self.hi)
    }

    pub fn contains(&self, coords: &[i64]) -> bool {
        coords.len() == self.level && coords.iter().all(|&x| self.lo <= x && x <= self.hi)
    }

    /// Multiples of the level inside `[lo, hi]`, as `(first, last)`.
    pub(crate) fn lattice_range(&self) -> Option<(i64, i64)> {
        lattice_in(self.lo, self.hi, self.level as i64)
    }

    /// Exact number of points of `X_level` in the window.
    pub fn point_count(&self) -> u128 {
        let n = self.level as u32;
        let per_axis = self.side() as u128 + 1;
        let lattice = match self.lattice_range() {
            Some((a, b)) => ((b - a) / self.level as i64) as u128 + 1,
            None => 0,
        };
        if n == 1 {
            return per_axis;
        }
        let off = per_axis - lattice;
        let lat_pow = |e: u32| lattice.checked_pow(e).unwrap_or(u128::MAX);
        lat_pow(n)
            .saturating_add((n as u128).saturating_mul(off).saturating_mul(lat_pow(n - 1)))
    }
}

/// First and last multiple of `step` in `[lo, hi]`.
pub(crate) fn lattice_in(lo: i64, hi: i64, step: i64) -> Option<(i64, i64)> {
    let first = ceil_mult(lo, step);
    let last = floor_mult(hi, step);
    (first <= last).then_some((first, last))
}

#[inline]
pub(crate) fn floor_mult(x: i64, step: i64) -> i64 {
    x.div_euclid(step) * step
}

#[inline]
pub(crate) fn ceil_mult(x: i64, step: i64) -> i64 {
    -floor_mult(-x, step)
}

/// All integer points of `X_{w.level} ∩ [lo, hi]^level`, in lexicographic
/// order.
pub fn window_points(w: &Window, limits: &Limits) -> Result<Vec<Point>> {
    limits.check_points("window points", w.point_count())?;
    let mut out = Vec::with_capacity(w.point_count() as usize);
    let mut cur = Vec::with_capacity(w.level);
    enumerate(w, &mut cur, false, &mut |c| {
        out.push(Point::from_parts(w.level, c.to_vec()))
    });
    Ok(out)
}

/// Visits window points lexicographically without collecting them.
pub(crate) fn for_each_window_point(w: &Window, limits: &Limits, mut f: impl FnMut(&[i64])) -> Result<()> {
    limits.check_points("window points", w.point_count())?;
    let mut cur = Vec::with_capacity(w.level);
    enumerate(w, &mut cur, false, &mut f);
    Ok(())
}

fn enumerate(w: &Window, cur: &mut Vec<i64>, off_used: bool, f: &mut impl FnMut(&[i64])) {
    if cur.len() == w.level {
        f(cur);
        return;
    }
    let n = w.level as i64;
    for x in w.lo..=w.hi {
        let on_lattice = x.rem_euclid(n) == 0;
        if !on_lattice && off_used {
            continue;
        }
        cur.push(x);
        enumerate(w, cur, off_used || !on_lattice, f);
        cur.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(level: usize, c: &[i64]) -> Point {
        Point::new(level, c.to_vec()).unwrap()
    }

    #[test]
    fn membership_examples() {
        assert!(membership(&[3, 0], 2).unwrap());
        assert!(!membership(&[1, 1], 2).unwrap());
        assert!(membership(&[0, 0, 5], 3).unwrap());
        assert_eq!(
            membership(&[1, 2, 3], 2),
            Err(Error::Dimension { expected: 2, got: 3 })
        );
    }

    #[test]
    fn dist_examples() {
        assert_eq!(dist(&p(1, &[0]), &p(2, &[0, 0])), 1);
        assert_eq!(dist(&p(1, &[6]), &p(3, &[6, 0, 0])), 3);
        assert_eq!(dist(&p(2, &[0, 2]), &p(2, &[4, 2])), 4);
    }

    #[test]
    fn offsets_are_triangular_sums() {
        for l in 1..10 {
            assert_eq!(level_offset(l, l), 0);
            for k in l + 1..12 {
                let brute: u64 = (l..k).map(|j| j as u64).sum();
                assert_eq!(level_offset(l, k), brute);
                assert_eq!(LevelPair::new(k, l).unwrap().offset, brute);
            }
        }
    }

    #[test]
    fn window_point_examples() {
        let lim = Limits::default();
        let pts = window_points(&Window::new(1, 0, 3).unwrap(), &lim).unwrap();
        let got: Vec<_> = pts.iter().map(|p| p.coords().to_vec()).collect();
        assert_eq!(got, vec![vec![0], vec![1], vec![2], vec![3]]);

        let pts = window_points(&Window::new(2, 0, 2).unwrap(), &lim).unwrap();
        let got: Vec<_> = pts.iter().map(|p| p.coords().to_vec()).collect();
        // oracle: all nine points of {0,1,2}² filtered by membership
        let mut want = Vec::new();
        for x in 0..=2 {
            for y in 0..=2 {
                if membership(&[x, y], 2).unwrap() {
                    want.push(vec![x, y]);
                }
            }
        }
        assert_eq!(want.len(), 8);
        assert_eq!(got, want);

        let pts = window_points(&Window::new(3, 1, 2).unwrap(), &lim).unwrap();
        assert!(pts.is_empty());
    }

    #[test]
    fn point_count_matches_enumeration() {
        let lim = Limits::default();
        for level in 1..=4 {
            for lo in -3..=1 {
                for hi in lo..lo + 7 {
                    let w = Window::new(level, lo, hi).unwrap();
                    let pts = window_points(&w, &lim).unwrap();
                    assert_eq!(pts.len() as u128, w.point_count(), "{w:?}");
                    assert!(pts.windows(2).all(|s| s[0] < s[1]));
                }
            }
        }
    }

    #[test]
    fn capacity_is_enforced() {
        let w = Window::new(6, 0, 60).unwrap();
        let err = window_points(&w, &Limits::uniform(1000)).unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
    }

    #[test]
    fn point_json_validates_membership() {
        let ok: Point = serde_json::from_str(r#"{"level":2,"coords":[3,0]}"#).unwrap();
        assert_eq!(ok.coords(), &[3, 0]);
        assert!(serde_json::from_str::<Point>(r#"{"level":2,"coords":[1,1]}"#).is_err());
        assert!(serde_json::from_str::<Window>(r#"{"level":2,"lo":3,"hi":1}"#).is_err());
    }
}
