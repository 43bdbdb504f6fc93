//! Families of subsets of a level, stored symbolically, and exact checks of
//! r-disjointness, R-boundedness and covering on a window.
//!
//! A [`BoxFamily`] is a list of templates. A template assigns one
//! [`AxisPiece`] to every axis; each piece ranges over its own integer index,
//! so a template stands for the infinite family of boxes obtained by choosing
//! one index per axis. Each box is intersected with `X_level` and clipped to
//! the window before anything is measured.
//!
//! Two independent routes are provided through [`Checker`]:
//! [`Mode::Symbolic`] works per axis and never enumerates members, and
//! [`Mode::Pointwise`] materializes every member as a point set and compares
//! points directly. Both report the same extremal value, so their verdicts
//! agree.

mod line;
mod pointwise;
mod symbolic;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{in_space, Limits, Point, Window};

pub use pointwise::{first_uncovered as first_uncovered_points, set_diameter, set_dist, verify_cover_points, PointFamily};

/// One factor of a template: a (possibly periodic) closed interval, or the
/// multiples of a stride.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AxisPiece {
    /// `[lo + p·i, hi + p·i]` for every `i ∈ ℤ`, or just `[lo, hi]` when
    /// `period` is absent.
    Interval {
        lo: i64,
        hi: i64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        period: Option<i64>,
    },
    /// `{stride · i}` for every `i ∈ ℤ`.
    Singleton { stride: i64 },
}

impl AxisPiece {
    pub fn interval(lo: i64, hi: i64) -> Self {
        AxisPiece::Interval { lo, hi, period: None }
    }

    pub fn periodic(lo: i64, hi: i64, period: i64) -> Self {
        AxisPiece::Interval {
            lo,
            hi,
            period: Some(period),
        }
    }

    pub fn singleton(stride: i64) -> Self {
        AxisPiece::Singleton { stride }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            AxisPiece::Interval { lo, hi, period } => {
                if lo > hi {
                    return Err(Error::Parameter(format!("interval [{lo}, {hi}] is reversed")));
                }
                if let Some(p) = period {
                    if p < 1 {
                        return Err(Error::Parameter(format!("period {p} must be positive")));
                    }
                }
            }
            AxisPiece::Singleton { stride } => {
                if stride < 1 {
                    return Err(Error::Parameter(format!("stride {stride} must be positive")));
                }
            }
        }
        Ok(())
    }

    /// The interval produced by index `i`.
    pub fn instance(&self, i: i64) -> (i64, i64) {
        match *self {
            AxisPiece::Interval { lo, hi, period } => {
                let shift = period.map_or(0, |p| p * i);
                (lo + shift, hi + shift)
            }
            AxisPiece::Singleton { stride } => (stride * i, stride * i),
        }
    }

    /// Indices whose instance meets `[lo, hi]`, as an inclusive range.
    pub fn index_range(&self, lo: i64, hi: i64) -> Option<(i64, i64)> {
        let (first, last) = match *self {
            AxisPiece::Interval { lo: a, hi: b, period: None } => {
                return (a <= hi && lo <= b).then_some((0, 0));
            }
            AxisPiece::Interval { lo: a, hi: b, period: Some(p) } => {
                // a + p·i ≤ hi and b + p·i ≥ lo
                (-(b - lo).div_euclid(p), (hi - a).div_euclid(p))
            }
            AxisPiece::Singleton { stride } => (-(-lo).div_euclid(stride), hi.div_euclid(stride)),
        };
        (first <= last).then_some((first, last))
    }

    /// Whether some instance contains `v`.
    pub fn covers(&self, v: i64) -> bool {
        match *self {
            AxisPiece::Interval { lo, hi, period: None } => lo <= v && v <= hi,
            AxisPiece::Interval { lo, hi, period: Some(p) } => (v - lo).rem_euclid(p) <= hi - lo,
            AxisPiece::Singleton { stride } => v.rem_euclid(stride) == 0,
        }
    }

    fn period(&self) -> i64 {
        match *self {
            AxisPiece::Interval { period, .. } => period.unwrap_or(0),
            AxisPiece::Singleton { stride } => stride,
        }
    }

    /// Whether the two pieces can produce the same interval for some indices.
    fn can_coincide(&self, other: &AxisPiece) -> bool {
        // x + p·i = y + q·j has a solution iff gcd(p, q) divides x − y
        fn congruent(x: i64, p: i64, y: i64, q: i64) -> bool {
            let g = gcd(p, q);
            if g == 0 {
                x == y
            } else {
                (x - y).rem_euclid(g) == 0
            }
        }
        let (a0, a1) = self.instance(0);
        let (b0, b1) = other.instance(0);
        a1 - a0 == b1 - b0 && congruent(a0, self.period(), b0, other.period())
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A symbolic family of boxes at one level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawFamily")]
pub struct BoxFamily {
    level: usize,
    label: String,
    templates: Vec<Vec<AxisPiece>>,
}

#[derive(Deserialize)]
struct RawFamily {
    level: usize,
    label: String,
    templates: Vec<Vec<AxisPiece>>,
}

impl TryFrom<RawFamily> for BoxFamily {
    type Error = Error;

    fn try_from(raw: RawFamily) -> Result<Self> {
        BoxFamily::new(raw.level, raw.label, raw.templates)
    }
}

impl BoxFamily {
    /// Validates piece shapes and rejects template pairs that could produce
    /// the same box.
    pub fn new(level: usize, label: impl Into<String>, templates: Vec<Vec<AxisPiece>>) -> Result<Self> {
        if level == 0 {
            return Err(Error::Parameter("family level must be positive".into()));
        }
        for t in &templates {
            if t.len() != level {
                return Err(Error::Dimension {
                    expected: level,
                    got: t.len(),
                });
            }
            for piece in t {
                piece.validate()?;
            }
        }
        for (i, s) in templates.iter().enumerate() {
            for (j, t) in templates.iter().enumerate().skip(i + 1) {
                if s.iter().zip(t).all(|(a, b)| a.can_coincide(b)) {
                    return Err(Error::DuplicateMember { first: i, second: j });
                }
            }
        }
        Ok(BoxFamily {
            level,
            label: label.into(),
            templates,
        })
    }

    pub fn empty(level: usize, label: impl Into<String>) -> Self {
        BoxFamily {
            level,
            label: label.into(),
            templates: Vec::new(),
        }
    }

    /// A finite family of fixed boxes.
    pub fn fixed(level: usize, label: impl Into<String>, boxes: &[Vec<(i64, i64)>]) -> Result<Self> {
        let templates = boxes
            .iter()
            .map(|b| b.iter().map(|&(lo, hi)| AxisPiece::interval(lo, hi)).collect())
            .collect();
        BoxFamily::new(level, label, templates)
    }

    /// Concatenates the templates of several families at the same level.
    pub fn union(label: impl Into<String>, parts: &[&BoxFamily]) -> Result<Self> {
        let level = parts
            .first()
            .map(|f| f.level)
            .ok_or_else(|| Error::Parameter("union of no families".into()))?;
        let mut templates = Vec::new();
        for f in parts {
            if f.level != level {
                return Err(Error::LevelMismatch {
                    family: f.level,
                    window: level,
                });
            }
            templates.extend(f.templates.iter().cloned());
        }
        BoxFamily::new(level, label, templates)
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn templates(&self) -> &[Vec<AxisPiece>] {
        &self.templates
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// The box of `template` at `index`.
    pub fn instance(&self, template: usize, index: &[i64]) -> Vec<(i64, i64)> {
        self.templates[template]
            .iter()
            .zip(index)
            .map(|(piece, &i)| piece.instance(i))
            .collect()
    }

    /// Whether some member contains the point (the point is assumed to lie
    /// in `X_level`).
    pub fn contains(&self, coords: &[i64]) -> bool {
        self.templates
            .iter()
            .any(|t| t.iter().zip(coords).all(|(piece, &v)| piece.covers(v)))
    }

    /// Every member meeting the window, with its clipped point set.
    pub fn materialize(&self, w: &Window, limits: &Limits) -> Result<PointFamily> {
        check_level(self, w)?;
        pointwise::materialize(self, w, limits)
    }
}

pub(crate) fn check_level(f: &BoxFamily, w: &Window) -> Result<()> {
    if f.level != w.level {
        return Err(Error::LevelMismatch {
            family: f.level,
            window: w.level,
        });
    }
    Ok(())
}

/// Identifies one member: template position and per-axis index, with the
/// (unclipped) box it instantiates. Members of a [`PointFamily`] use their
/// list position as `template`, an empty `index`, and their bounding box.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MemberRef {
    pub template: usize,
    pub index: Vec<i64>,
    pub bounds: Vec<[i64; 2]>,
}

impl MemberRef {
    pub(crate) fn of(f: &BoxFamily, template: usize, index: Vec<i64>) -> Self {
        let bounds = f
            .instance(template, &index)
            .into_iter()
            .map(|(a, b)| [a, b])
            .collect();
        MemberRef { template, index, bounds }
    }

    /// Points of the member inside `X_level ∩ w`, sorted.
    pub fn points(&self, w: &Window) -> Vec<Vec<i64>> {
        let b: Vec<(i64, i64)> = self.bounds.iter().map(|&[a, b]| (a, b)).collect();
        box_points(&b, w)
    }
}

/// Integer points of `box ∩ X_level ∩ w`, sorted and deduplicated.
pub fn box_points(bounds: &[(i64, i64)], w: &Window) -> Vec<Vec<i64>> {
    let n = w.level;
    let clipped: Option<Vec<(i64, i64)>> = bounds
        .iter()
        .map(|&(a, b)| {
            let (a, b) = (a.max(w.lo), b.min(w.hi));
            (a <= b).then_some((a, b))
        })
        .collect();
    let Some(clipped) = clipped else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let mut cur = vec![0i64; n];
    fn rec(axis: usize, off: bool, c: &[(i64, i64)], n: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if axis == c.len() {
            out.push(cur.clone());
            return;
        }
        for v in c[axis].0..=c[axis].1 {
            let lat = v.rem_euclid(n) == 0;
            if off && !lat {
                continue;
            }
            cur[axis] = v;
            rec(axis + 1, off || !lat, c, n, cur, out);
        }
    }
    rec(0, false, &clipped, n as i64, &mut cur, &mut out);
    debug_assert!(out.iter().all(|p| in_space(p, n)));
    out
}

/// Evidence attached to a failed check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Witness {
    /// Two distinct members closer than required.
    Pair { a: MemberRef, b: MemberRef, distance: u64 },
    /// A member wider than allowed.
    Diameter { member: MemberRef, diameter: u64 },
    /// A window point outside every member.
    Uncovered { point: Point },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub verdict: bool,
    pub witness: Option<Witness>,
}

impl VerifyReport {
    pub fn pass() -> Self {
        VerifyReport {
            verdict: true,
            witness: None,
        }
    }

    pub fn fail(witness: Witness) -> Self {
        VerifyReport {
            verdict: false,
            witness: Some(witness),
        }
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            None => write!(f, "pass"),
            Some(Witness::Pair { distance, .. }) => write!(f, "fail: members at distance {distance}"),
            Some(Witness::Diameter { diameter, .. }) => write!(f, "fail: member of diameter {diameter}"),
            Some(Witness::Uncovered { point }) => write!(f, "fail: {:?} uncovered", point.coords()),
        }
    }
}

/// The closest pair of distinct members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosestPair {
    pub a: MemberRef,
    pub b: MemberRef,
    pub distance: u64,
}

/// The widest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Widest {
    pub member: MemberRef,
    pub diameter: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Symbolic,
    Pointwise,
}

/// Runs family checks with a fixed route and size caps.
#[derive(Debug, Clone, Copy, Default)]
pub struct Checker {
    pub mode: Mode,
    pub limits: Limits,
}

impl Checker {
    pub fn symbolic() -> Self {
        Checker {
            mode: Mode::Symbolic,
            limits: Limits::default(),
        }
    }

    pub fn pointwise() -> Self {
        Checker {
            mode: Mode::Pointwise,
            limits: Limits::default(),
        }
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub fn closest_pair(&self, f: &BoxFamily, w: &Window) -> Result<Option<ClosestPair>> {
        check_level(f, w)?;
        match self.mode {
            Mode::Symbolic => symbolic::closest_pair(f, w, &self.limits),
            Mode::Pointwise => Ok(f.materialize(w, &self.limits)?.closest_pair()),
        }
    }

    pub fn widest(&self, f: &BoxFamily, w: &Window) -> Result<Option<Widest>> {
        check_level(f, w)?;
        match self.mode {
            Mode::Symbolic => symbolic::widest(f, w, &self.limits),
            Mode::Pointwise => Ok(f.materialize(w, &self.limits)?.widest()),
        }
    }

    /// Lexicographically first window point outside every member.
    pub fn first_uncovered(&self, fs: &[&BoxFamily], w: &Window) -> Result<Option<Point>> {
        for f in fs {
            check_level(f, w)?;
        }
        match self.mode {
            Mode::Symbolic => symbolic::first_uncovered(fs, w, &self.limits),
            Mode::Pointwise => {
                let mats = fs
                    .iter()
                    .map(|f| f.materialize(w, &self.limits))
                    .collect::<Result<Vec<_>>>()?;
                let refs: Vec<&PointFamily> = mats.iter().collect();
                pointwise::first_uncovered(&refs, w, &self.limits)
            }
        }
    }

    pub fn verify_disjoint(&self, f: &BoxFamily, r: u64, w: &Window) -> Result<VerifyReport> {
        Ok(disjoint_report(self.closest_pair(f, w)?, r))
    }

    pub fn verify_bounded(&self, f: &BoxFamily, bound: u64, w: &Window) -> Result<VerifyReport> {
        Ok(bounded_report(self.widest(f, w)?, bound))
    }

    pub fn verify_cover(&self, fs: &[&BoxFamily], w: &Window) -> Result<VerifyReport> {
        Ok(cover_report(self.first_uncovered(fs, w)?))
    }
}

pub(crate) fn disjoint_report(closest: Option<ClosestPair>, r: u64) -> VerifyReport {
    match closest {
        Some(c) if c.distance < r => VerifyReport::fail(Witness::Pair {
            a: c.a,
            b: c.b,
            distance: c.distance,
        }),
        _ => VerifyReport::pass(),
    }
}

pub(crate) fn bounded_report(widest: Option<Widest>, bound: u64) -> VerifyReport {
    match widest {
        Some(w) if w.diameter > bound => VerifyReport::fail(Witness::Diameter {
            member: w.member,
            diameter: w.diameter,
        }),
        _ => VerifyReport::pass(),
    }
}

pub(crate) fn cover_report(uncovered: Option<Point>) -> VerifyReport {
    match uncovered {
        Some(point) => VerifyReport::fail(Witness::Uncovered { point }),
        None => VerifyReport::pass(),
    }
}

/// Symbolic r-disjointness check with default caps.
pub fn verify_disjoint(f: &BoxFamily, r: u64, w: &Window) -> Result<VerifyReport> {
    Checker::symbolic().verify_disjoint(f, r, w)
}

/// Symbolic R-boundedness check with default caps.
pub fn verify_bounded(f: &BoxFamily, bound: u64, w: &Window) -> Result<VerifyReport> {
    Checker::symbolic().verify_bounded(f, bound, w)
}

/// Symbolic cover check with default caps.
pub fn verify_cover(fs: &[&BoxFamily], w: &Window) -> Result<VerifyReport> {
    Checker::symbolic().verify_cover(fs, w)
}
