//! Mixed volumes by three independent formulas, and the defect /
//! essentiality tests that characterize positivity.

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polytope::Polytope;
use crate::rational::{qi, Q, QVec};
use crate::subdivision::{self, SubdivisionError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MixedVolumeError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("the lattice-point formula needs integral polytopes")]
    NonIntegral,
    #[error(transparent)]
    Subdivision(#[from] SubdivisionError),
}

/// Which formula computes the mixed volume.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MvMethod {
    /// Inclusion–exclusion over volumes of partial Minkowski sums.
    AlternatingVolume,
    /// Inclusion–exclusion over lattice-point counts of partial sums.
    LatticePoints,
    /// Sum of the volumes of fine mixed cells under a random lifting.
    MixedCells,
}

/// `dim(P_1 + ... + P_k) - k`.
pub fn defect(polys: &[Polytope]) -> i64 {
    let mut sum = polys[0].clone();
    for p in &polys[1..] {
        sum = sum.minkowski_sum(p).expect("equal dimensions");
    }
    sum.dim() as i64 - polys.len() as i64
}

/// Every nonempty subcollection has nonnegative defect.
pub fn is_essential(polys: &[Polytope]) -> bool {
    let k = polys.len();
    (1..(1u64 << k)).all(|mask| {
        let sub: Vec<Polytope> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| polys[i].clone()).collect();
        defect(&sub) >= 0
    })
}

fn check_tuple(polys: &[Polytope]) -> Result<usize, MixedVolumeError> {
    let n = polys.len();
    for p in polys {
        if p.ambient_dim() != n {
            return Err(MixedVolumeError::DimensionMismatch { expected: n, got: p.ambient_dim() });
        }
    }
    Ok(n)
}

/// Partial Minkowski sums over all nonempty subsets, indexed by bitmask.
fn subset_sums(polys: &[Polytope]) -> Vec<Option<Polytope>> {
    let k = polys.len();
    let mut sums: Vec<Option<Polytope>> = vec![None; 1 << k];
    for mask in 1usize..(1 << k) {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        sums[mask] = Some(if rest == 0 {
            polys[low].clone()
        } else {
            sums[rest].as_ref().unwrap().minkowski_sum(&polys[low]).expect("equal dimensions")
        });
    }
    sums
}

/// Mixed volume `MV(P_1, ..., P_n)` of `n` polytopes in `R^n`.
pub fn mixed_volume(polys: &[Polytope], method: MvMethod) -> Result<Q, MixedVolumeError> {
    mixed_volume_seeded(polys, method, 0x5eed)
}

/// As [`mixed_volume`], with the seed for the random lifting explicit.
pub fn mixed_volume_seeded(polys: &[Polytope], method: MvMethod, seed: u64) -> Result<Q, MixedVolumeError> {
    let n = check_tuple(polys)?;
    match method {
        MvMethod::AlternatingVolume => {
            let sums = subset_sums(polys);
            let mut total = Q::zero();
            for (mask, s) in sums.iter().enumerate().skip(1) {
                let size = mask.count_ones() as usize;
                let v = s.as_ref().unwrap().volume();
                if (n - size) % 2 == 0 {
                    total += v;
                } else {
                    total -= v;
                }
            }
            Ok(total)
        }
        MvMethod::LatticePoints => {
            if !polys.iter().all(|p| p.is_integral()) {
                return Err(MixedVolumeError::NonIntegral);
            }
            let sums = subset_sums(polys);
            let mut total: i64 = if n % 2 == 0 { 1 } else { -1 };
            for (mask, s) in sums.iter().enumerate().skip(1) {
                let size = mask.count_ones() as usize;
                let c = s.as_ref().unwrap().lattice_points().len() as i64;
                if (n - size) % 2 == 0 {
                    total += c;
                } else {
                    total -= c;
                }
            }
            Ok(qi(total))
        }
        MvMethod::MixedCells => {
            if polys.iter().any(|p| p.dim() == 0) || !is_spanning(polys) {
                return Ok(Q::zero());
            }
            if !polys.iter().all(|p| p.is_integral()) {
                return mixed_cells_rational(polys, seed);
            }
            let supports: Vec<Vec<Vec<i64>>> = polys.iter().map(|p| p.integer_vertices().unwrap()).collect();
            Ok(qi(mixed_volume_of_supports_seeded(&supports, seed)?))
        }
    }
}

fn is_spanning(polys: &[Polytope]) -> bool {
    let pts: Vec<QVec> = polys.iter().flat_map(|p| p.vertices().to_vec()).collect();
    crate::polytope::affine_dimension(&pts) == polys.len()
}

/// Rational vertices: scale everything by a common denominator, compute the
/// integral mixed volume and rescale by `L^n`.
fn mixed_cells_rational(polys: &[Polytope], seed: u64) -> Result<Q, MixedVolumeError> {
    use num_integer::Integer;
    let n = polys.len();
    let l = polys
        .iter()
        .flat_map(|p| p.vertices().iter().flatten())
        .fold(num_bigint::BigInt::from(1), |acc, x| acc.lcm(x.denom()));
    let lq = Q::from_integer(l.clone());
    let supports: Vec<Vec<Vec<i64>>> = polys
        .iter()
        .map(|p| {
            p.vertices()
                .iter()
                .map(|v| v.iter().map(|x| (x * &lq).to_integer().try_into().expect("coordinates fit in i64")).collect())
                .collect()
        })
        .collect();
    let mv = mixed_volume_of_supports_seeded(&supports, seed)?;
    let mut scale = Q::from_integer(1.into());
    for _ in 0..n {
        scale *= lq.clone();
    }
    Ok(qi(mv) / scale)
}

/// Mixed volume of the convex hulls of integer supports, via fine mixed
/// cells under a random lifting (default seed).
pub fn mixed_volume_of_supports(supports: &[Vec<Vec<i64>>]) -> Result<i64, MixedVolumeError> {
    mixed_volume_of_supports_seeded(supports, 0x5eed)
}

pub fn mixed_volume_of_supports_seeded(supports: &[Vec<Vec<i64>>], seed: u64) -> Result<i64, MixedVolumeError> {
    let n = supports.len();
    if let Some(p) = supports.iter().flatten().find(|p| p.len() != n) {
        return Err(MixedVolumeError::DimensionMismatch { expected: n, got: p.len() });
    }
    if supports.iter().any(|a| a.len() < 2) {
        return Ok(0);
    }
    let pts: Vec<QVec> = supports.iter().flatten().map(|p| crate::rational::qvec(p)).collect();
    if crate::polytope::affine_dimension(&pts) < n {
        return Ok(0);
    }
    let (_, cells) = subdivision::random_fine_mixed_cells(supports, subdivision::DEFAULT_LIFT_RANGE, seed, 10)?;
    let total: Q = cells.iter().map(|c| c.volume.clone()).sum();
    Ok(i64::try_from(total.to_integer()).expect("mixed volume fits in i64"))
}
