//! Explicit covers: the three interval families on the line, their lift to
//! two families on each level `n ≥ 6k`, product brick covers for the low
//! levels, and the windowed certificate assembling all of them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{AxisPiece, BoxFamily, Checker, VerifyReport};
use crate::ordinal::Ordinal;
use crate::space::{level_offset, Window};

/// Which case of `⌊(n − 2k)/k⌋` selected the `V1`/`V2` patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    /// `⌊(n − 2k)/k⌋ = 2m`
    Even,
    /// `⌊(n − 2k)/k⌋ = 2m + 1`
    Odd,
}

/// How the last `V2` interval of each period is placed when lifted to a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailRule {
    /// The tail exactly as in the line families. It ends within `k` of the
    /// next multiple of `n`, so on levels `n ≥ 2` two tails on different
    /// axes that end at the same lattice point are closer than `k`.
    Full,
    /// The tail is cut at `in + n − k`. The removed part lies inside the
    /// `V0` interval around `(i+1)n`, so covering is unchanged.
    #[default]
    Clearance,
}

/// The families `V0`, `V1`, `V2` on `X₁ = ℝ` for scales `n ≥ 6k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineFamilies {
    pub n: i64,
    pub k: i64,
    pub m: i64,
    pub parity: Parity,
    #[serde(rename = "V0")]
    pub v0: BoxFamily,
    #[serde(rename = "V1")]
    pub v1: BoxFamily,
    #[serde(rename = "V2")]
    pub v2: BoxFamily,
}

struct LinePieces {
    m: i64,
    parity: Parity,
    v0: AxisPiece,
    v1: Vec<AxisPiece>,
    v2: Vec<AxisPiece>,
}

fn check_scales(n: i64, k: i64) -> Result<()> {
    if k < 1 {
        return Err(Error::Parameter(format!("k = {k} must be at least 1")));
    }
    if n < 6 * k {
        return Err(Error::Parameter(format!("n = {n} must be at least 6k = {}", 6 * k)));
    }
    Ok(())
}

fn line_pieces(n: i64, k: i64, tail: TailRule) -> Result<LinePieces> {
    check_scales(n, k)?;
    let q = (n - 2 * k) / k;
    let (m, parity) = if q % 2 == 0 { (q / 2, Parity::Even) } else { (q / 2, Parity::Odd) };
    let inner = match parity {
        Parity::Even => m - 1,
        Parity::Odd => m,
    };
    let v0 = AxisPiece::periodic(-k, k, n);
    let v1 = (1..=inner)
        .map(|j| AxisPiece::periodic(2 * j * k, (2 * j + 1) * k, n))
        .collect();
    let mut v2: Vec<AxisPiece> = (1..=inner)
        .map(|j| AxisPiece::periodic((2 * j - 1) * k, 2 * j * k, n))
        .collect();
    let (lo, hi) = match parity {
        Parity::Even => (2 * m * k - k, 2 * m * k + 2 * k),
        Parity::Odd => (2 * m * k + k, 2 * m * k + 3 * k),
    };
    let hi = match tail {
        TailRule::Full => hi,
        TailRule::Clearance => hi.min(n - k),
    };
    v2.push(AxisPiece::periodic(lo, hi, n));
    Ok(LinePieces {
        m,
        parity,
        v0,
        v1,
        v2,
    })
}

fn single_axis(label: &str, pieces: &[AxisPiece]) -> Result<BoxFamily> {
    BoxFamily::new(1, label, pieces.iter().map(|&p| vec![p]).collect())
}

/// `V0 = {[in−k, in+k]}` and the parity-dependent `V1`, `V2`.
pub fn build_line_families(n: i64, k: i64) -> Result<LineFamilies> {
    let p = line_pieces(n, k, TailRule::Full)?;
    Ok(LineFamilies {
        n,
        k,
        m: p.m,
        parity: p.parity,
        v0: single_axis("V0", &[p.v0])?,
        v1: single_axis("V1", &p.v1)?,
        v2: single_axis("V2", &p.v2)?,
    })
}

/// `U0 = W0 ∪ W1` and `U1 = W2` on level `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridFamilies {
    pub n: i64,
    pub k: i64,
    pub tail: TailRule,
    #[serde(rename = "U0")]
    pub u0: BoxFamily,
    #[serde(rename = "U1")]
    pub u1: BoxFamily,
}

/// Grid families with the default [`TailRule::Clearance`].
pub fn build_grid_families(n: i64, k: i64) -> Result<GridFamilies> {
    build_grid_families_with(n, k, TailRule::default())
}

pub fn build_grid_families_with(n: i64, k: i64, tail: TailRule) -> Result<GridFamilies> {
    let p = line_pieces(n, k, tail)?;
    let level = n as usize;
    let lattice = AxisPiece::singleton(n);
    // one interval on axis j, lattice singletons elsewhere
    let lines = |pieces: &[AxisPiece]| -> Vec<Vec<AxisPiece>> {
        (0..level)
            .flat_map(|j| {
                pieces.iter().map(move |&piece| {
                    (0..level)
                        .map(|b| if b == j { piece } else { lattice })
                        .collect::<Vec<_>>()
                })
            })
            .collect()
    };
    let mut u0 = vec![vec![p.v0; level]];
    u0.extend(lines(&p.v1));
    Ok(GridFamilies {
        n,
        k,
        tail,
        u0: BoxFamily::new(level, "U0", u0)?,
        u1: BoxFamily::new(level, "U1", lines(&p.v2))?,
    })
}

impl GridFamilies {
    /// Intersection with the coordinate subspace spanned by the first `dim`
    /// axes. Members whose interval runs along a dropped axis miss the
    /// subspace (their interval avoids multiples of `n`) and are removed.
    pub fn section(&self, dim: usize) -> Result<GridFamilies> {
        if dim == 0 || dim > self.n as usize {
            return Err(Error::Parameter(format!("section dimension {dim} outside 1..={}", self.n)));
        }
        let cut = |f: &BoxFamily| -> Result<BoxFamily> {
            let lattice = AxisPiece::singleton(self.n);
            let templates = f
                .templates()
                .iter()
                .filter(|t| t[dim..].iter().all(|p| *p == lattice || p.covers(0)))
                .map(|t| t[..dim].to_vec())
                .collect();
            BoxFamily::new(dim, f.label(), templates)
        };
        Ok(GridFamilies {
            n: self.n,
            k: self.k,
            tail: self.tail,
            u0: cut(&self.u0)?,
            u1: cut(&self.u1)?,
        })
    }
}

/// The `2^d` product families built from `A = {[6ri, 6ri+3r]}` and
/// `B = {[6ri+3r, 6r(i+1)]}`, one per choice of `A` or `B` on each axis.
/// Every family is `r`-disjoint (in fact `3r`-disjoint) with members of
/// diameter `3r`, and together they cover `ℤ^d`.
pub fn build_brick_cover(d: usize, r: i64) -> Result<Vec<BoxFamily>> {
    if d == 0 || d > 20 {
        return Err(Error::Parameter(format!("brick dimension {d} outside 1..=20")));
    }
    if r < 1 {
        return Err(Error::Parameter(format!("r = {r} must be at least 1")));
    }
    let a = AxisPiece::periodic(0, 3 * r, 6 * r);
    let b = AxisPiece::periodic(3 * r, 6 * r, 6 * r);
    (0..1usize << d)
        .map(|pattern| {
            let mut name = String::from("brick[");
            let template: Vec<AxisPiece> = (0..d)
                .map(|axis| {
                    let use_b = pattern >> (d - 1 - axis) & 1 == 1;
                    name.push(if use_b { 'B' } else { 'A' });
                    if use_b {
                        b
                    } else {
                        a
                    }
                })
                .collect();
            name.push(']');
            BoxFamily::new(d, name, vec![template])
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelFamilies {
    pub n: i64,
    #[serde(rename = "U0")]
    pub u0: BoxFamily,
    #[serde(rename = "U1")]
    pub u1: BoxFamily,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Residual {
    pub r: i64,
    /// Brick families for every level below `6k`, each tagged with its level.
    pub families: Vec<BoxFamily>,
}

/// Windowed evidence that the high levels are covered by two `k`-disjoint,
/// `3k`-bounded families while the finitely many low levels have finite
/// asymptotic dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoasdimCertificate {
    pub k: i64,
    pub n_max: usize,
    /// Each level is checked on `[0, window]^n`.
    pub window: i64,
    pub levels: Vec<LevelFamilies>,
    pub residual: Residual,
    /// `ω + 1`, split as limit part `ω` plus finite part `1` (two families).
    pub ordinal: String,
}

pub fn build_coasdim_certificate(k: i64, window: i64, n_max: usize, r: i64) -> Result<CoasdimCertificate> {
    if k < 1 {
        return Err(Error::Parameter(format!("k = {k} must be at least 1")));
    }
    if n_max == 0 || n_max > 64 {
        return Err(Error::Parameter(format!("n_max = {n_max} outside 1..=64")));
    }
    if window < 12 * n_max as i64 {
        return Err(Error::Parameter(format!(
            "window side {window} must be at least 12·n_max = {}",
            12 * n_max
        )));
    }
    if r < 1 {
        return Err(Error::Parameter(format!("r = {r} must be at least 1")));
    }
    let first_grid = 6 * k;
    let mut levels = Vec::new();
    for n in first_grid..=n_max as i64 {
        let g = build_grid_families(n, k)?;
        levels.push(LevelFamilies { n, u0: g.u0, u1: g.u1 });
    }
    let mut families = Vec::new();
    for n in 1..first_grid.min(n_max as i64 + 1) {
        families.extend(build_brick_cover(n as usize, r)?);
    }
    Ok(CoasdimCertificate {
        k,
        n_max,
        window,
        levels,
        residual: Residual { r, families },
        ordinal: Ordinal::omega_plus(1).to_string(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Disjoint,
    Bounded,
    Cover,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckLine {
    pub level: usize,
    pub family: String,
    pub check: CheckKind,
    /// The `r` or `R` the check was run with; absent for cover checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameter: Option<u64>,
    pub report: VerifyReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub verdict: bool,
    pub checks: Vec<CheckLine>,
    /// Smallest offset between two distinct grid levels; members on
    /// different levels are at least this far apart.
    pub cross_level_gap: Option<u64>,
}

impl CoasdimCertificate {
    pub fn verify(&self, checker: &Checker) -> Result<CertificateReport> {
        let k = self.k as u64;
        let mut checks = Vec::new();
        let mut push = |level: usize, family: &str, check, parameter, report| {
            checks.push(CheckLine {
                level,
                family: family.to_string(),
                check,
                parameter,
                report,
            })
        };
        for lv in &self.levels {
            let level = lv.n as usize;
            let w = Window::new(level, 0, self.window)?;
            for f in [&lv.u0, &lv.u1] {
                push(level, f.label(), CheckKind::Disjoint, Some(k), checker.verify_disjoint(f, k, &w)?);
                push(level, f.label(), CheckKind::Bounded, Some(3 * k), checker.verify_bounded(f, 3 * k, &w)?);
            }
            push(level, "U0+U1", CheckKind::Cover, None, checker.verify_cover(&[&lv.u0, &lv.u1], &w)?);
        }
        let r = self.residual.r as u64;
        let mut residual_levels: Vec<usize> = self.residual.families.iter().map(BoxFamily::level).collect();
        residual_levels.dedup();
        for level in residual_levels {
            let w = Window::new(level, 0, self.window)?;
            let fams: Vec<&BoxFamily> = self.residual.families.iter().filter(|f| f.level() == level).collect();
            let bound = 3 * r * level as u64;
            for f in &fams {
                push(level, f.label(), CheckKind::Disjoint, Some(r), checker.verify_disjoint(f, r, &w)?);
                push(level, f.label(), CheckKind::Bounded, Some(bound), checker.verify_bounded(f, bound, &w)?);
            }
            push(level, "bricks", CheckKind::Cover, None, checker.verify_cover(&fams, &w)?);
        }
        let grid_levels: Vec<usize> = self.levels.iter().map(|l| l.n as usize).collect();
        let cross_level_gap = grid_levels
            .iter()
            .enumerate()
            .flat_map(|(i, &a)| grid_levels[i + 1..].iter().map(move |&b| level_offset(a, b)))
            .min();
        let verdict = checks.iter().all(|c| c.report.verdict) && cross_level_gap.is_none_or(|g| g >= k);
        Ok(CertificateReport {
            verdict,
            checks,
            cross_level_gap,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{verify_bounded, verify_cover, verify_disjoint};

    /// `{[lo + n·i, hi + n·i]}` written out on `[a, b]`, straight from the
    /// displayed set-builder formulas.
    fn spelled(lo: i64, hi: i64, n: i64, a: i64, b: i64) -> Vec<(i64, i64)> {
        (-5..=10)
            .map(|i| (lo + n * i, hi + n * i))
            .filter(|&(x, y)| y >= a && x <= b)
            .collect()
    }

    fn listed(f: &BoxFamily, a: i64, b: i64) -> Vec<(i64, i64)> {
        let mut out: Vec<(i64, i64)> = f
            .templates()
            .iter()
            .flat_map(|t| {
                let (s, e) = t[0].index_range(a, b).unwrap();
                (s..=e).map(move |i| t[0].instance(i))
            })
            .collect();
        out.sort();
        out
    }

    #[test]
    fn line_families_for_six_and_one() {
        let lf = build_line_families(6, 1).unwrap();
        assert_eq!((lf.m, lf.parity), (2, Parity::Even));
        assert_eq!(listed(&lf.v0, 0, 30), spelled(-1, 1, 6, 0, 30));
        assert_eq!(listed(&lf.v1, 0, 30), spelled(2, 3, 6, 0, 30));
        let mut v2 = spelled(1, 2, 6, 0, 30);
        v2.extend(spelled(3, 6, 6, 0, 30));
        v2.sort();
        assert_eq!(listed(&lf.v2, 0, 30), v2);
    }

    #[test]
    fn parity_case_split() {
        let lf = build_line_families(9, 1).unwrap();
        assert_eq!((lf.m, lf.parity), (3, Parity::Odd));
        assert!(matches!(build_line_families(5, 1), Err(Error::Parameter(_))));
        assert!(matches!(build_grid_families(11, 2), Err(Error::Parameter(_))));
        for k in 1..4 {
            for n in 6 * k..6 * k + 20 {
                let lf = build_line_families(n, k).unwrap();
                let q = (n - 2 * k) / k;
                match lf.parity {
                    Parity::Even => assert_eq!(q, 2 * lf.m),
                    Parity::Odd => assert_eq!(q, 2 * lf.m + 1),
                }
            }
        }
    }

    #[test]
    fn line_families_verify() {
        for k in 1..4 {
            for n in 6 * k..6 * k + 13 {
                let lf = build_line_families(n, k).unwrap();
                let w = Window::new(1, -3 * n, 5 * n).unwrap();
                let v01 = BoxFamily::union("V0+V1", &[&lf.v0, &lf.v1]).unwrap();
                let ku = k as u64;
                assert!(verify_disjoint(&v01, ku, &w).unwrap().verdict, "n={n} k={k}");
                assert!(verify_disjoint(&lf.v2, ku, &w).unwrap().verdict, "n={n} k={k}");
                for f in [&lf.v0, &lf.v1, &lf.v2] {
                    assert!(verify_bounded(f, 3 * ku, &w).unwrap().verdict);
                }
                assert!(verify_cover(&[&lf.v0, &lf.v1, &lf.v2], &w).unwrap().verdict);
            }
        }
    }

    #[test]
    fn grid_axis_one_member_through_origin() {
        let g = build_grid_families(6, 1).unwrap();
        // W1 template along axis 0
        let t = &g.u0.templates()[1];
        assert_eq!(t[0], AxisPiece::periodic(2, 3, 6));
        assert!(t[1..].iter().all(|p| *p == AxisPiece::singleton(6)));
        let b = g.u0.instance(1, &[2, 0, 0, 0, 0, 0]);
        assert_eq!(b[0], (14, 15));
        assert!(b[1..].iter().all(|&x| x == (0, 0)));
        for x in 14..=15 {
            let p = [x, 0, 0, 0, 0, 0];
            assert!(crate::space::membership(&p, 6).unwrap());
            assert!(g.u0.contains(&p));
        }
    }

    #[test]
    fn lattice_points_lie_in_star_members() {
        let g = build_grid_families(7, 1).unwrap();
        let star = &g.u0.templates()[0];
        for p in [[0i64; 7], [7, -14, 0, 21, 7, 0, 0]] {
            assert!(star.iter().zip(&p).all(|(piece, &v)| piece.covers(v)));
        }
    }

    #[test]
    fn full_tail_breaks_disjointness_on_grids() {
        let g = build_grid_families_with(6, 1, TailRule::Full).unwrap();
        let w = Window::new(6, 0, 12).unwrap();
        let rep = verify_disjoint(&g.u1, 1, &w).unwrap();
        assert!(!rep.verdict);
        let Some(crate::families::Witness::Pair { a, b, distance }) = rep.witness else {
            panic!("expected pair witness")
        };
        assert_eq!(distance, 0);
        let shared = crate::families::set_dist(&a.points(&w), &b.points(&w));
        assert_eq!(shared, 0);
        // the line families themselves are fine
        let lf = build_line_families(6, 1).unwrap();
        let w1 = Window::new(1, 0, 30).unwrap();
        assert!(verify_disjoint(&lf.v2, 1, &w1).unwrap().verdict);
    }

    #[test]
    fn plane_section_keeps_planar_members() {
        let g = build_grid_families(6, 1).unwrap();
        let s = g.section(2).unwrap();
        assert_eq!((s.u0.level(), s.u0.templates().len()), (2, 1 + 2));
        assert_eq!(s.u1.templates().len(), 2 * 2);
        let lim = crate::space::Limits::default();
        let w6 = Window::new(6, 0, 24).unwrap();
        let w2 = Window::new(2, 0, 24).unwrap();
        for (full, cut) in [(&g.u0, &s.u0), (&g.u1, &s.u1)] {
            let mut want: Vec<Vec<Vec<i64>>> = full
                .materialize(&w6, &lim)
                .unwrap()
                .members
                .into_iter()
                .map(|m| {
                    m.into_iter()
                        .filter(|p| p[2..].iter().all(|&x| x == 0))
                        .map(|p| p[..2].to_vec())
                        .collect::<Vec<_>>()
                })
                .filter(|m| !m.is_empty())
                .collect();
            let mut got: Vec<Vec<Vec<i64>>> = cut
                .materialize(&w2, &lim)
                .unwrap()
                .members
                .into_iter()
                .map(|m| m.into_iter().filter(|p| p.iter().filter(|&&x| x % 6 != 0).count() <= 1).collect::<Vec<_>>())
                .filter(|m| !m.is_empty())
                .collect();
            want.sort();
            got.sort();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn brick_cover_shapes() {
        let fams = build_brick_cover(1, 1).unwrap();
        assert_eq!(fams.len(), 2);
        let w = Window::new(1, 0, 60).unwrap();
        for f in &fams {
            assert!(verify_disjoint(f, 3, &w).unwrap().verdict);
            assert!(!verify_disjoint(f, 4, &w).unwrap().verdict);
            assert!(verify_bounded(f, 3, &w).unwrap().verdict);
        }
        let refs: Vec<&BoxFamily> = fams.iter().collect();
        assert!(verify_cover(&refs, &w).unwrap().verdict);
        assert!(verify_cover(&refs, &Window::new(1, 0, 0).unwrap()).unwrap().verdict);
        assert!(fams[0].contains(&[0]));

        let fams = build_brick_cover(2, 1).unwrap();
        assert_eq!(fams.len(), 4);
        let refs: Vec<&BoxFamily> = fams.iter().collect();
        let w = Window::new(2, 0, 60).unwrap();
        assert!(Checker::pointwise().verify_cover(&refs, &w).unwrap().verdict);
    }

    #[test]
    fn certificate_degenerate_split() {
        let c = build_coasdim_certificate(3, 96, 8, 1).unwrap();
        assert!(c.levels.is_empty());
        let levels: Vec<usize> = c.residual.families.iter().map(BoxFamily::level).collect();
        assert_eq!(levels.len(), (1..=8).map(|d| 1 << d).sum::<usize>());
        assert!(matches!(build_coasdim_certificate(1, 95, 8, 1), Err(Error::Parameter(_))));
    }

    #[test]
    fn certificate_residual_counts() {
        let c = build_coasdim_certificate(1, 96, 8, 2).unwrap();
        assert_eq!(c.levels.iter().map(|l| l.n).collect::<Vec<_>>(), vec![6, 7, 8]);
        for d in 1..6usize {
            let count = c.residual.families.iter().filter(|f| f.level() == d).count();
            assert_eq!(count, 1 << d);
        }
        assert_eq!(c.ordinal, "w+1");
    }
}
