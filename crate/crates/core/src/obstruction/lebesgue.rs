//! Spanning components of cell covers of a cube.
//!
//! If the cube `[0, N]^d` is covered by at most `d` closed sets, the `i`-th
//! set has a connected component meeting both facets `xᵢ = 0` and
//! `xᵢ = N`. Cells are unit cubes indexed by their lower corner, so the
//! facets are the cells with `xᵢ = 0` and with `xᵢ = N − 1`.

use serde::{Deserialize, Serialize};

use super::grid::{Adjacency, DisjointSets, Grid};
use crate::error::{Error, Result};
use crate::par;
use crate::space::Limits;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledCells {
    pub label: String,
    pub cells: Vec<Vec<i64>>,
}

/// Labeled unions of unit cells in `[0, side]^dim`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawCover")]
pub struct CellCover {
    pub dim: usize,
    pub side: usize,
    pub sets: Vec<LabeledCells>,
}

#[derive(Deserialize)]
struct RawCover {
    dim: usize,
    side: usize,
    sets: Vec<LabeledCells>,
}

impl TryFrom<RawCover> for CellCover {
    type Error = Error;

    fn try_from(raw: RawCover) -> Result<Self> {
        CellCover::new(raw.dim, raw.side, raw.sets)
    }
}

impl CellCover {
    pub fn new(dim: usize, side: usize, sets: Vec<LabeledCells>) -> Result<Self> {
        if dim == 0 || side == 0 {
            return Err(Error::Parameter("cell cover needs positive dim and side".into()));
        }
        for s in &sets {
            for c in &s.cells {
                if c.len() != dim {
                    return Err(Error::Dimension {
                        expected: dim,
                        got: c.len(),
                    });
                }
                if c.iter().any(|&x| x < 0 || x as usize >= side) {
                    return Err(Error::InvalidInput(format!(
                        "cell {c:?} of set {:?} lies outside [0, {side})^{dim}",
                        s.label
                    )));
                }
            }
        }
        Ok(CellCover { dim, side, sets })
    }

    /// Builds a cover from per-cell label lists on the lexicographic grid.
    pub fn from_masks(dim: usize, side: usize, labels: &[String], masks: &[Vec<bool>]) -> Result<Self> {
        let grid = Grid::new(dim, side, &Limits::default())?;
        let sets = labels
            .iter()
            .zip(masks)
            .map(|(label, mask)| LabeledCells {
                label: label.clone(),
                cells: (0..grid.len).filter(|&i| mask[i]).map(|i| grid.coords(i)).collect(),
            })
            .collect();
        CellCover::new(dim, side, sets)
    }
}

/// A component of set `set` meeting both facets orthogonal to `axis`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanWitness {
    pub set: usize,
    pub label: String,
    pub axis: usize,
    pub component: Vec<Vec<i64>>,
    /// Component cells with `x_axis = 0`.
    pub low: Vec<Vec<i64>>,
    /// Component cells with `x_axis = side − 1`.
    pub high: Vec<Vec<i64>>,
}

fn masks(grid: &Grid, c: &CellCover) -> Vec<Vec<bool>> {
    c.sets
        .iter()
        .map(|s| {
            let mut m = vec![false; grid.len];
            for cell in &s.cells {
                m[grid.index(cell).expect("validated on construction")] = true;
            }
            m
        })
        .collect()
}

pub(crate) fn spanning_component(grid: &Grid, mask: &[bool], axis: usize, adj: Adjacency) -> Option<Vec<usize>> {
    let last = grid.side as i64 - 1;
    grid.components(mask, adj).into_iter().find(|comp| {
        comp.iter().any(|&i| grid.coord(i, axis) == 0) && comp.iter().any(|&i| grid.coord(i, axis) == last)
    })
}

/// Looks for a spanning component of set `i` along axis `i`, for each set
/// that has a matching axis, in order.
///
/// Returns `Ok(None)` only when the search is not guaranteed to succeed:
/// more sets than axes, or face adjacency. With at most `dim` sets and
/// closed adjacency a miss is a [`Error::Contradiction`].
pub fn lebesgue_witness(c: &CellCover, adj: Adjacency) -> Result<Option<SpanWitness>> {
    let grid = Grid::new(c.dim, c.side, &Limits::default())?;
    let ms = masks(&grid, c);
    if let Some(i) = (0..grid.len).find(|&i| !ms.iter().any(|m| m[i])) {
        return Err(Error::InvalidInput(format!("cell {:?} is not covered", grid.coords(i))));
    }
    let last = grid.side as i64 - 1;
    for (set, mask) in ms.iter().enumerate().take(c.dim) {
        if let Some(comp) = spanning_component(&grid, mask, set, adj) {
            let pick = |v: i64| -> Vec<Vec<i64>> {
                comp.iter()
                    .filter(|&&i| grid.coord(i, set) == v)
                    .map(|&i| grid.coords(i))
                    .collect()
            };
            return Ok(Some(SpanWitness {
                set,
                label: c.sets[set].label.clone(),
                axis: set,
                low: pick(0),
                high: pick(last),
                component: comp.iter().map(|&i| grid.coords(i)).collect(),
            }));
        }
    }
    if c.sets.len() <= c.dim && adj == Adjacency::Closed {
        return Err(Error::Contradiction(format!(
            "cover of [0,{}]^{} by {} sets has no spanning component",
            c.side,
            c.dim,
            c.sets.len()
        )));
    }
    Ok(None)
}

/// Checks a witness from scratch: every cell lies in the set, the cells are
/// connected, and both facets are met.
pub fn verify_span_witness(c: &CellCover, w: &SpanWitness, adj: Adjacency) -> Result<bool> {
    let grid = Grid::new(c.dim, c.side, &Limits::default())?;
    let Some(set) = c.sets.get(w.set) else { return Ok(false) };
    let mask = &masks(&grid, c)[w.set];
    let cells: Option<Vec<usize>> = w.component.iter().map(|x| grid.index(x)).collect();
    let Some(cells) = cells else { return Ok(false) };
    if set.label != w.label || w.axis >= c.dim || cells.is_empty() || !cells.iter().all(|&i| mask[i]) {
        return Ok(false);
    }
    Ok(connected_and_spanning(&grid, &cells, w.axis, adj))
}

fn connected_and_spanning(grid: &Grid, cells: &[usize], axis: usize, adj: Adjacency) -> bool {
    let mut member = vec![usize::MAX; grid.len];
    for (k, &i) in cells.iter().enumerate() {
        member[i] = k;
    }
    let mut ds = DisjointSets::new(cells.len());
    let mut nb = Vec::new();
    for (k, &i) in cells.iter().enumerate() {
        grid.neighbors(i, adj, &mut nb);
        for &j in &nb {
            if member[j] != usize::MAX {
                ds.union(k, member[j]);
            }
        }
    }
    let root = ds.find(0);
    let last = grid.side as i64 - 1;
    (0..cells.len()).all(|k| ds.find(k) == root)
        && cells.iter().any(|&i| grid.coord(i, axis) == 0)
        && cells.iter().any(|&i| grid.coord(i, axis) == last)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExhaustiveSummary {
    pub dim: usize,
    pub side: usize,
    pub sets: usize,
    /// Every cell gets a nonempty label subset, so each labeling is a cover.
    pub labelings: u64,
    pub witnessed: u64,
    /// Labelings with no spanning component.
    pub missing: u64,
    /// Witnesses rejected by the independent re-check.
    pub rejected: u64,
    pub first_missing: Option<u64>,
}

/// Cell neighbourhoods and facets as bitmasks, for grids of at most 64 cells.
struct Small {
    grid: Grid,
    nbr: Vec<u64>,
    low: Vec<u64>,
    high: Vec<u64>,
}

impl Small {
    fn new(dim: usize, side: usize, adj: Adjacency) -> Result<Small> {
        let grid = Grid::new(dim, side, &Limits::default())?;
        if grid.len > 64 {
            return Err(Error::Unsupported(format!("exhaustive search needs at most 64 cells, got {}", grid.len)));
        }
        let mut nb = Vec::new();
        let nbr = (0..grid.len)
            .map(|i| {
                grid.neighbors(i, adj, &mut nb);
                nb.iter().fold(0u64, |m, &j| m | 1 << j)
            })
            .collect();
        let facet = |v: i64| -> Vec<u64> {
            (0..dim)
                .map(|a| (0..grid.len).filter(|&i| grid.coord(i, a) == v).fold(0u64, |m, i| m | 1 << i))
                .collect()
        };
        let low = facet(0);
        let high = facet(side as i64 - 1);
        Ok(Small { grid, nbr, low, high })
    }

    fn flood(&self, set: u64, seed: u64) -> u64 {
        let mut comp = seed;
        loop {
            let mut next = comp;
            let mut bits = comp;
            while bits != 0 {
                let b = bits.trailing_zeros();
                bits &= bits - 1;
                next |= self.nbr[b as usize] & set;
            }
            if next == comp {
                return comp;
            }
            comp = next;
        }
    }

    fn span(&self, set: u64, axis: usize) -> Option<u64> {
        let mut rest = set & self.low[axis];
        while rest != 0 {
            let seed = rest & rest.wrapping_neg();
            let comp = self.flood(set, seed);
            if comp & self.high[axis] != 0 {
                return Some(comp);
            }
            rest &= !comp;
        }
        None
    }
}

/// Runs the spanning search on every labeling of `[0, side]^dim` in which
/// each cell carries a nonempty subset of `sets` labels, re-checking each
/// witness with union-find.
pub fn exhaustive_lebesgue(dim: usize, side: usize, sets: usize, adj: Adjacency) -> Result<ExhaustiveSummary> {
    if sets == 0 || sets > 6 {
        return Err(Error::Parameter(format!("set count {sets} outside 1..=6")));
    }
    let small = Small::new(dim, side, adj)?;
    let cells = small.grid.len;
    let choices = (1u64 << sets) - 1;
    let total = (choices as u128).checked_pow(cells as u32).unwrap_or(u128::MAX);
    if total > 1 << 40 {
        return Err(Error::Capacity {
            what: "labelings",
            needed: total,
            cap: 1 << 40,
        });
    }
    let total = total as u64;
    #[derive(Clone, Copy, Default)]
    struct Tally {
        witnessed: u64,
        missing: u64,
        rejected: u64,
        first_missing: Option<u64>,
    }
    let tally = par::fold_chunks(
        0..total,
        1 << 14,
        Tally::default(),
        |mut t, code| {
            let mut masks = [0u64; 6];
            let mut c = code;
            for cell in 0..cells {
                let subset = c % choices + 1;
                c /= choices;
                for (s, m) in masks.iter_mut().enumerate().take(sets) {
                    if subset >> s & 1 == 1 {
                        *m |= 1 << cell;
                    }
                }
            }
            let found = (0..sets.min(dim)).find_map(|s| small.span(masks[s], s).map(|comp| (s, comp)));
            match found {
                Some((s, comp)) => {
                    let cells: Vec<usize> = (0..64).filter(|&i| comp >> i & 1 == 1).collect();
                    if comp & !masks[s] == 0 && connected_and_spanning(&small.grid, &cells, s, adj) {
                        t.witnessed += 1;
                    } else {
                        t.rejected += 1;
                    }
                }
                None => {
                    t.missing += 1;
                    t.first_missing.get_or_insert(code);
                }
            }
            t
        },
        |a, b| Tally {
            witnessed: a.witnessed + b.witnessed,
            missing: a.missing + b.missing,
            rejected: a.rejected + b.rejected,
            first_missing: a.first_missing.or(b.first_missing),
        },
    );
    Ok(ExhaustiveSummary {
        dim,
        side,
        sets,
        labelings: total,
        witnessed: tally.witnessed,
        missing: tally.missing,
        rejected: tally.rejected,
        first_missing: tally.first_missing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cover(dim: usize, side: usize, sets: &[(&str, Vec<Vec<i64>>)]) -> CellCover {
        CellCover::new(
            dim,
            side,
            sets.iter()
                .map(|(l, c)| LabeledCells {
                    label: l.to_string(),
                    cells: c.clone(),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn whole_interval_spans() {
        let c = cover(1, 4, &[("all", (0..4).map(|x| vec![x]).collect())]);
        let w = lebesgue_witness(&c, Adjacency::Closed).unwrap().unwrap();
        assert_eq!(w.component.len(), 4);
        assert_eq!((w.low.clone(), w.high.clone()), (vec![vec![0]], vec![vec![3]]));
        assert!(verify_span_witness(&c, &w, Adjacency::Closed).unwrap());
    }

    #[test]
    fn columns_example() {
        let col = |xs: &[i64]| -> Vec<Vec<i64>> { xs.iter().flat_map(|&x| (0..3).map(move |y| vec![x, y])).collect() };
        let c = cover(2, 3, &[("1", col(&[0])), ("2", col(&[1, 2]))]);
        let w = lebesgue_witness(&c, Adjacency::Closed).unwrap().unwrap();
        assert_eq!((w.set, w.axis), (1, 1));
        assert_eq!(w.component.len(), 6);
        assert!(verify_span_witness(&c, &w, Adjacency::Closed).unwrap());
    }

    #[test]
    fn uncovered_cell_is_rejected() {
        let c = cover(2, 2, &[("a", vec![vec![0, 0], vec![0, 1], vec![1, 0]])]);
        assert!(matches!(lebesgue_witness(&c, Adjacency::Closed), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn checkerboard_needs_closed_adjacency() {
        let (mut even, mut odd) = (Vec::new(), Vec::new());
        for x in 0..3 {
            for y in 0..3 {
                if (x + y) % 2 == 0 { even.push(vec![x, y]) } else { odd.push(vec![x, y]) }
            }
        }
        let c = cover(2, 3, &[("odd", odd), ("even", even)]);
        assert!(lebesgue_witness(&c, Adjacency::Face).unwrap().is_none());
        let w = lebesgue_witness(&c, Adjacency::Closed).unwrap().unwrap();
        // the odd cells chain through corners
        assert_eq!(w.label, "odd");
        assert!(!verify_span_witness(&c, &w, Adjacency::Face).unwrap());
    }

    #[test]
    fn more_sets_than_axes_may_miss() {
        let cells = |pts: &[[i64; 1]]| pts.iter().map(|p| p.to_vec()).collect::<Vec<_>>();
        let c = cover(1, 3, &[("a", cells(&[[0]])), ("b", cells(&[[1], [2]]))]);
        assert!(lebesgue_witness(&c, Adjacency::Closed).unwrap().is_none());
    }

    #[test]
    fn bitmask_search_agrees_with_bfs() {
        let small = Small::new(2, 3, Adjacency::Closed).unwrap();
        for code in (0..3u64.pow(9)).step_by(97) {
            let mut masks = vec![vec![false; 9]; 2];
            let mut bits = [0u64; 2];
            let mut c = code;
            for cell in 0..9 {
                let subset = c % 3 + 1;
                c /= 3;
                for (s, (mask, b)) in masks.iter_mut().zip(&mut bits).enumerate() {
                    if subset >> s & 1 == 1 {
                        mask[cell] = true;
                        *b |= 1 << cell;
                    }
                }
            }
            let labels = vec!["a".to_string(), "b".to_string()];
            let cover = CellCover::from_masks(2, 3, &labels, &masks).unwrap();
            let w = lebesgue_witness(&cover, Adjacency::Closed).unwrap().unwrap();
            let fast = (0..2).find_map(|s| small.span(bits[s], s).map(|m| (s, m))).unwrap();
            let comp: Vec<usize> = (0..9).filter(|&i| fast.1 >> i & 1 == 1).collect();
            assert_eq!(w.set, fast.0);
            let slow: Vec<usize> = w.component.iter().map(|x| small.grid.index(x).unwrap()).collect();
            assert_eq!(slow, comp);
        }
    }

    #[test]
    fn two_by_two_is_exhaustively_witnessed() {
        let s = exhaustive_lebesgue(2, 2, 2, Adjacency::Closed).unwrap();
        assert_eq!(s.labelings, 81);
        assert_eq!((s.witnessed, s.missing, s.rejected), (81, 0, 0));
        let f = exhaustive_lebesgue(2, 2, 2, Adjacency::Face).unwrap();
        assert!(f.missing > 0);
    }

    #[test]
    fn json_shape() {
        let c: CellCover =
            serde_json::from_str(r#"{"dim":1,"side":2,"sets":[{"label":"a","cells":[[0],[1]]}]}"#).unwrap();
        assert_eq!(c.sets[0].cells.len(), 2);
        assert!(serde_json::from_str::<CellCover>(r#"{"dim":1,"side":2,"sets":[{"label":"a","cells":[[2]]}]}"#).is_err());
    }
}
