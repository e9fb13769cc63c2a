//! Coherent mixed subdivisions induced by lifting functions, and the mixed
//! cells that drive the polyhedral homotopy.
//!
//! Two routes are provided. [`induce_subdivision`] computes every cell from
//! the lower facets of the lifted Minkowski sum (exact, any cell type).
//! [`fine_mixed_cells`] enumerates only the fine mixed cells of a square
//! collection by a depth-first search over edge tuples with linear
//! programming pruning; it scales to the supports met by the solvers.

use num_traits::{Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::hull;
use crate::lp::{self, Constraint};
use crate::rational::{self, q_to_f64, qi, Q, QVec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubdivisionError {
    #[error("the union of the supports does not affinely span the ambient space")]
    SpanDeficient,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("the lifting does not induce a fine mixed subdivision")]
    NonFine,
    #[error("no fine mixed subdivision found after {0} liftings")]
    RetriesExhausted(usize),
}

/// Upper bound (exclusive) of the default random integer lifts.
pub const DEFAULT_LIFT_RANGE: i64 = 1 << 16;

/// Supports together with one lift value per point.
#[derive(Clone, Debug)]
pub struct LiftedSupport {
    pub supports: Vec<Vec<Vec<i64>>>,
    pub lifts: Vec<Vec<Q>>,
}

impl LiftedSupport {
    pub fn new(supports: Vec<Vec<Vec<i64>>>, lifts: Vec<Vec<Q>>) -> Result<LiftedSupport, SubdivisionError> {
        let n = supports.first().and_then(|a| a.first()).map_or(0, |p| p.len());
        for (a, l) in supports.iter().zip(&lifts) {
            if a.len() != l.len() {
                return Err(SubdivisionError::DimensionMismatch { expected: a.len(), got: l.len() });
            }
            if let Some(p) = a.iter().find(|p| p.len() != n) {
                return Err(SubdivisionError::DimensionMismatch { expected: n, got: p.len() });
            }
        }
        if supports.len() != lifts.len() {
            return Err(SubdivisionError::DimensionMismatch { expected: supports.len(), got: lifts.len() });
        }
        Ok(LiftedSupport { supports, lifts })
    }

    /// Integer lifts drawn uniformly from `[0, range)`.
    pub fn random<R: Rng>(supports: &[Vec<Vec<i64>>], range: i64, rng: &mut R) -> LiftedSupport {
        let lifts = supports.iter().map(|a| a.iter().map(|_| qi(rng.gen_range(0..range))).collect()).collect();
        LiftedSupport { supports: supports.to_vec(), lifts }
    }

    pub fn ambient_dim(&self) -> usize {
        self.supports.first().and_then(|a| a.first()).map_or(0, |p| p.len())
    }

    fn lifted(&self, i: usize, j: usize) -> QVec {
        let mut v = rational::qvec(&self.supports[i][j]);
        v.push(self.lifts[i][j].clone());
        v
    }

    fn spans(&self) -> bool {
        let pts: Vec<QVec> = self.supports.iter().flatten().map(|p| rational::qvec(p)).collect();
        !pts.is_empty() && crate::polytope::affine_dimension(&pts) == self.ambient_dim()
    }
}

/// A cell of a mixed subdivision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    /// Indices into each support of the points forming the cell.
    pub subsets: Vec<Vec<usize>>,
    /// Exposing direction `(w, -1)` of the lifted cell (maximum convention).
    pub omega: QVec,
    /// Dimensions of `conv(C_i)`.
    pub type_vec: Vec<usize>,
    /// Euclidean volume of `conv(C_1 + ... + C_k)`.
    pub volume: Q,
}

impl Cell {
    pub fn is_mixed(&self) -> bool {
        self.type_vec.iter().all(|&t| t > 0)
    }

    pub fn is_fine_mixed(&self) -> bool {
        let n = self.omega.len() - 1;
        self.is_mixed() && self.subsets.iter().map(|c| c.len() - 1).sum::<usize>() == n
    }

    /// The vector `nu` with `omega = (-nu, -1)`.
    pub fn nu(&self) -> QVec {
        let n = self.omega.len() - 1;
        self.omega[..n].iter().map(|x| -x.clone()).collect()
    }

    /// The points of the cell.
    pub fn points(&self, supports: &[Vec<Vec<i64>>]) -> Vec<Vec<Vec<i64>>> {
        self.subsets
            .iter()
            .enumerate()
            .map(|(i, c)| c.iter().map(|&j| supports[i][j].clone()).collect())
            .collect()
    }
}

/// The cells of a coherent subdivision.
#[derive(Clone, Debug)]
pub struct MixedSubdivision {
    pub cells: Vec<Cell>,
}

impl MixedSubdivision {
    pub fn is_fine_mixed(&self) -> bool {
        self.cells.iter().all(|c| c.is_fine_mixed())
    }
}

fn sum_points(sets: &[Vec<QVec>]) -> Vec<QVec> {
    let n = sets[0][0].len();
    let mut acc = vec![vec![Q::zero(); n]];
    for s in sets {
        let mut next = Vec::with_capacity(acc.len() * s.len());
        for a in &acc {
            for b in s {
                next.push(rational::add(a, b));
            }
        }
        let h = hull::hull(&next);
        acc = h.vertices.iter().map(|&i| next[i].clone()).collect();
    }
    acc
}

fn make_cell(l: &LiftedSupport, omega: QVec) -> Cell {
    let n = l.ambient_dim();
    let mut subsets = Vec::new();
    let mut type_vec = Vec::new();
    let mut cell_pts = Vec::new();
    for i in 0..l.supports.len() {
        let vals: Vec<Q> = (0..l.supports[i].len()).map(|j| rational::dot(&l.lifted(i, j), &omega)).collect();
        let max = vals.iter().max().unwrap().clone();
        let idx: Vec<usize> = (0..vals.len()).filter(|&j| vals[j] == max).collect();
        let pts: Vec<QVec> = idx.iter().map(|&j| rational::qvec(&l.supports[i][j])).collect();
        type_vec.push(crate::polytope::affine_dimension(&pts));
        cell_pts.push(pts);
        subsets.push(idx);
    }
    let sum = sum_points(&cell_pts);
    let volume = if sum[0].len() == n { hull::volume(&sum) } else { Q::zero() };
    Cell { subsets, omega, type_vec, volume }
}

/// The coherent subdivision induced by a lifting: one cell per lower facet
/// of the lifted Minkowski sum.
pub fn induce_subdivision(l: &LiftedSupport) -> Result<MixedSubdivision, SubdivisionError> {
    if !l.spans() {
        return Err(SubdivisionError::SpanDeficient);
    }
    let n = l.ambient_dim();
    let lifted: Vec<Vec<QVec>> = (0..l.supports.len())
        .map(|i| {
            let pts: Vec<QVec> = (0..l.supports[i].len()).map(|j| l.lifted(i, j)).collect();
            let h = hull::hull(&pts);
            h.vertices.iter().map(|&j| pts[j].clone()).collect()
        })
        .collect();
    let sum = sum_points(&lifted);
    let h = hull::hull(&sum);
    let mut cells = Vec::new();
    if h.dim < n + 1 {
        // All lifted points lie on a hyperplane: the trivial subdivision.
        let eq = h.equalities.iter().find(|e| !e.normal[n].is_zero()).expect("spanning support");
        let s = -eq.normal[n].clone();
        let omega: QVec = eq.normal.iter().map(|x| x / &s).collect();
        cells.push(make_cell(l, omega));
    } else {
        for f in &h.facets {
            if f.normal[n].is_negative() {
                let s = -f.normal[n].clone();
                let omega: QVec = f.normal.iter().map(|x| x / &s).collect();
                cells.push(make_cell(l, omega));
            }
        }
    }
    Ok(MixedSubdivision { cells })
}

/// Cells of the given type, e.g. `(1, ..., 1)` for the mixed cells of a
/// square collection.
pub fn mixed_cells(s: &MixedSubdivision, type_filter: &[usize]) -> Vec<Cell> {
    s.cells.iter().filter(|c| c.type_vec == type_filter).cloned().collect()
}

/// Constraint rows (in `w`) saying the pair `{a, b}` of support `i` is
/// lifted-maximal for `(w, -1)`.
fn pair_constraints(l: &LiftedSupport, i: usize, a: usize, b: usize) -> Vec<Constraint<f64>> {
    let pts = &l.supports[i];
    let lf: Vec<f64> = l.lifts[i].iter().map(q_to_f64).collect();
    let n = pts[0].len();
    let mut out = Vec::with_capacity(pts.len());
    let diff = |p: usize, q: usize| -> Vec<f64> { (0..n).map(|k| (pts[p][k] - pts[q][k]) as f64).collect() };
    out.push(Constraint { coeffs: diff(a, b), rhs: lf[a] - lf[b], equality: true });
    for c in 0..pts.len() {
        if c != a && c != b {
            out.push(Constraint { coeffs: diff(c, a), rhs: lf[c] - lf[a], equality: false });
        }
    }
    out
}

/// Enumerate the fine mixed cells of a square collection under the given
/// lifting. Fails with [`SubdivisionError::NonFine`] when the lifting is
/// not generic enough to induce a fine mixed subdivision.
pub fn fine_mixed_cells(l: &LiftedSupport) -> Result<Vec<Cell>, SubdivisionError> {
    let n = l.ambient_dim();
    if l.supports.len() != n {
        return Err(SubdivisionError::DimensionMismatch { expected: n, got: l.supports.len() });
    }
    if !l.spans() {
        return Err(SubdivisionError::SpanDeficient);
    }
    // Candidate lower edges of each lifted support.
    let mut cands: Vec<Vec<(usize, usize, Vec<Constraint<f64>>)>> = Vec::with_capacity(n);
    for i in 0..n {
        let m = l.supports[i].len();
        let mut ci = Vec::new();
        for a in 0..m {
            for b in a + 1..m {
                let cons = pair_constraints(l, i, a, b);
                if lp::feasible_point(n, &cons).is_some() {
                    ci.push((a, b, cons));
                }
            }
        }
        if ci.is_empty() {
            return Ok(vec![]);
        }
        cands.push(ci);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| cands[i].len());
    let mut cells = Vec::new();
    let mut chosen: Vec<(usize, usize)> = vec![(0, 0); n];
    let mut nonfine = false;
    dfs(l, &cands, &order, 0, &mut chosen, &mut Vec::new(), &mut cells, &mut nonfine);
    if nonfine {
        return Err(SubdivisionError::NonFine);
    }
    cells.sort_by(|a: &Cell, b: &Cell| a.subsets.cmp(&b.subsets));
    Ok(cells)
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    l: &LiftedSupport,
    cands: &[Vec<(usize, usize, Vec<Constraint<f64>>)>],
    order: &[usize],
    depth: usize,
    chosen: &mut Vec<(usize, usize)>,
    acc: &mut Vec<Constraint<f64>>,
    cells: &mut Vec<Cell>,
    nonfine: &mut bool,
) {
    let n = order.len();
    let i = order[depth];
    for (a, b, cons) in &cands[i] {
        chosen[i] = (*a, *b);
        if depth + 1 == n {
            match exact_cell(l, chosen) {
                Leaf::Cell(c) => cells.push(c),
                Leaf::Tie => *nonfine = true,
                Leaf::None => {}
            }
            continue;
        }
        let base = acc.len();
        acc.extend(cons.iter().cloned());
        if lp::feasible_point(n, acc).is_some() {
            dfs(l, cands, order, depth + 1, chosen, acc, cells, nonfine);
        }
        acc.truncate(base);
    }
}

enum Leaf {
    Cell(Cell),
    Tie,
    None,
}

fn exact_cell(l: &LiftedSupport, chosen: &[(usize, usize)]) -> Leaf {
    let n = chosen.len();
    let mut rows = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    for (i, &(a, b)) in chosen.iter().enumerate() {
        let pa = rational::qvec(&l.supports[i][a]);
        let pb = rational::qvec(&l.supports[i][b]);
        rows.push(rational::sub(&pa, &pb));
        rhs.push(&l.lifts[i][a] - &l.lifts[i][b]);
    }
    let Some(w) = rational::solve(&rows, &rhs) else {
        return Leaf::None;
    };
    let mut tie = false;
    for (i, &(a, _)) in chosen.iter().enumerate() {
        let pa = rational::qvec(&l.supports[i][a]);
        let va = rational::dot(&pa, &w) - &l.lifts[i][a];
        for (c, pc) in l.supports[i].iter().enumerate() {
            if c == a || c == chosen[i].1 {
                continue;
            }
            let vc = rational::dot(&rational::qvec(pc), &w) - &l.lifts[i][c];
            if vc > va {
                return Leaf::None;
            }
            if vc == va {
                tie = true;
            }
        }
    }
    if tie {
        return Leaf::Tie;
    }
    let mut omega = w;
    omega.push(qi(-1));
    Leaf::Cell(Cell {
        subsets: chosen.iter().map(|&(a, b)| vec![a, b]).collect(),
        omega,
        type_vec: vec![1; n],
        volume: rational::det(&rows).abs(),
    })
}

/// Fine mixed cells under random integer lifts in `[0, range)`, retrying
/// with fresh lifts (at most `max_tries` in total) until the lifting is
/// generic. Returns the lifting used with its cells.
pub fn random_fine_mixed_cells(
    supports: &[Vec<Vec<i64>>],
    range: i64,
    seed: u64,
    max_tries: usize,
) -> Result<(LiftedSupport, Vec<Cell>), SubdivisionError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..max_tries {
        let l = LiftedSupport::random(supports, range, &mut rng);
        match fine_mixed_cells(&l) {
            Ok(cells) => return Ok((l, cells)),
            Err(SubdivisionError::NonFine) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(SubdivisionError::RetriesExhausted(max_tries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;

    #[test]
    fn trivial_lift_single_simplex() {
        let a = vec![vec![vec![0, 0], vec![1, 0], vec![0, 1]]];
        let l = LiftedSupport::new(a, vec![vec![qi(0), qi(0), qi(0)]]).unwrap();
        let s = induce_subdivision(&l).unwrap();
        assert_eq!(s.cells.len(), 1);
        assert_eq!(s.cells[0].subsets, vec![vec![0, 1, 2]]);
        assert_eq!(s.cells[0].volume, qf(1, 2));
    }

    #[test]
    fn span_deficient() {
        let a = vec![vec![vec![0, 0], vec![1, 1]], vec![vec![2, 2], vec![0, 0]]];
        let l = LiftedSupport::new(a, vec![vec![qi(0), qi(1)], vec![qi(0), qi(1)]]).unwrap();
        assert_eq!(induce_subdivision(&l).unwrap_err(), SubdivisionError::SpanDeficient);
    }

    fn example_lifting() -> LiftedSupport {
        let a1 = vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]];
        let a2 = vec![vec![0, 0], vec![1, 2], vec![2, 1]];
        let l1 = vec![qi(2), qi(3), qi(3), qi(3)];
        let l2 = vec![qi(1), qi(1), qi(1)];
        LiftedSupport::new(vec![a1, a2], vec![l1, l2]).unwrap()
    }

    fn sorted_cells(mut v: Vec<(QVec, Q)>) -> Vec<(QVec, Q)> {
        v.sort();
        v
    }

    #[test]
    fn square_and_triangle_mixed_cells() {
        let l = example_lifting();
        let expected = sorted_cells(vec![
            (vec![qf(1, 2), qf(1, 2), qi(-1)], qi(2)),
            (vec![qi(-2), qi(1), qi(-1)], qi(1)),
            (vec![qi(1), qi(-2), qi(-1)], qi(1)),
        ]);
        let sub = induce_subdivision(&l).unwrap();
        let mixed = mixed_cells(&sub, &[1, 1]);
        let got = sorted_cells(mixed.iter().map(|c| (c.omega.clone(), c.volume.clone())).collect());
        assert_eq!(got, expected);
        let fine = fine_mixed_cells(&l).unwrap();
        let got = sorted_cells(fine.iter().map(|c| (c.omega.clone(), c.volume.clone())).collect());
        assert_eq!(got, expected);
        // Non-mixed cells tile the rest of the Minkowski sum.
        let total: Q = sub.cells.iter().map(|c| c.volume.clone()).sum();
        // vol(A1 + A2) = vol(A1) + vol(A2) + MV = 1 + 3/2 + 4.
        assert_eq!(total, qf(13, 2));
    }

    #[test]
    fn dilated_square_five_quadrangles() {
        let pi = qf(355, 113);
        let mut pts = Vec::new();
        let mut lifts = Vec::new();
        for x in 0..=3 {
            for y in 0..=3 {
                pts.push(vec![x, y]);
                let boundary = x == 0 || x == 3 || y == 0 || y == 3;
                lifts.push(if boundary { pi.clone() } else { qi(1) });
            }
        }
        let l = LiftedSupport::new(vec![pts], vec![lifts]).unwrap();
        let sub = induce_subdivision(&l).unwrap();
        assert_eq!(sub.cells.len(), 5);
        let one = qi(1);
        let mut dirs: Vec<QVec> = sub.cells.iter().map(|c| c.omega.clone()).collect();
        dirs.sort();
        let mut expected = vec![
            vec![qi(0), qi(0), qi(-1)],
            vec![qi(0), &one - &pi, qi(-1)],
            vec![&one - &pi, qi(0), qi(-1)],
            vec![qi(0), &pi - &one, qi(-1)],
            vec![&pi - &one, qi(0), qi(-1)],
        ];
        expected.sort();
        assert_eq!(dirs, expected);
        for c in &sub.cells {
            let pts: Vec<QVec> = c.points(&l.supports)[0].iter().map(|p| rational::qvec(p)).collect();
            assert_eq!(hull::hull(&pts).vertices.len(), 4);
        }
    }

    #[test]
    fn fine_cells_agree_with_lower_hull_on_random_lifts() {
        let supports = vec![
            vec![vec![0, 0, 0], vec![2, 0, 0], vec![0, 1, 1], vec![1, 1, 0], vec![0, 0, 2]],
            vec![vec![1, 0, 0], vec![0, 2, 0], vec![0, 0, 1], vec![1, 1, 1]],
            vec![vec![0, 0, 0], vec![1, 0, 1], vec![0, 1, 0], vec![2, 2, 1]],
        ];
        let (l, fine) = random_fine_mixed_cells(&supports, 1000, 7, 10).unwrap();
        let sub = induce_subdivision(&l).unwrap();
        let mut a: Vec<_> = mixed_cells(&sub, &[1, 1, 1]).into_iter().map(|c| (c.subsets, c.volume)).collect();
        let mut b: Vec<_> = fine.into_iter().map(|c| (c.subsets, c.volume)).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn nongeneric_lift_is_reported() {
        let a = vec![vec![vec![0, 0], vec![1, 0], vec![2, 0], vec![0, 1]], vec![vec![0, 0], vec![0, 1], vec![1, 0]]];
        let l = LiftedSupport::new(a, vec![vec![qi(0); 4], vec![qi(0), qi(0), qi(5)]]).unwrap();
        assert_eq!(fine_mixed_cells(&l).unwrap_err(), SubdivisionError::NonFine);
    }
}
