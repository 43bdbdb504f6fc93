//! One-dimensional pieces of clipped members.

use crate::space::{ceil_mult, floor_mult, lattice_in};

/// The nonempty integer set `{lo, lo+step, …, hi}`. When `step > 1` both
/// endpoints are multiples of `step`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Prog {
    pub lo: i64,
    pub hi: i64,
    pub step: i64,
}

impl Prog {
    pub fn full(lo: i64, hi: i64) -> Option<Prog> {
        (lo <= hi).then_some(Prog { lo, hi, step: 1 })
    }

    /// Multiples of `step` in `[lo, hi]`.
    pub fn lattice(lo: i64, hi: i64, step: i64) -> Option<Prog> {
        lattice_in(lo, hi, step).map(|(lo, hi)| Prog { lo, hi, step })
    }

    /// Minimum `|x − y|` over `x ∈ self`, `y ∈ other`.
    pub fn dist(&self, other: &Prog) -> u64 {
        if self.step == other.step {
            return interval_gap(self.lo, self.hi, other.lo, other.hi);
        }
        let (iv, lat) = if self.step == 1 { (self, other) } else { (other, self) };
        debug_assert_eq!(iv.step, 1);
        let s = lat.step;
        if lattice_in(iv.lo.max(lat.lo), iv.hi.min(lat.hi), s).is_some() {
            return 0;
        }
        let mut best = u64::MAX;
        if lat.lo < iv.lo {
            let below = floor_mult(iv.lo - 1, s).min(lat.hi);
            best = best.min(iv.lo.abs_diff(below));
        }
        if lat.hi > iv.hi {
            let above = ceil_mult(iv.hi + 1, s).max(lat.lo);
            best = best.min(above.abs_diff(iv.hi));
        }
        best
    }
}

pub(crate) fn interval_gap(a_lo: i64, a_hi: i64, b_lo: i64, b_hi: i64) -> u64 {
    if a_hi < b_lo {
        b_lo.abs_diff(a_hi)
    } else if b_hi < a_lo {
        a_lo.abs_diff(b_hi)
    } else {
        0
    }
}
