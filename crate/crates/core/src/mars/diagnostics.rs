use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use super::{offset, MarsError, Setup};
use crate::iset::ISet;
use crate::linalg::{kernel_basis, project_onto, supplementary_basis, RatVector, Rational};
use crate::model::{AffineFn, TilingSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Invariance {
    Pass,
    /// Footprints of `tile` and `tile + delta` are not related by the same
    /// translation as at the other samples.
    Fail {
        tile: Vec<i64>,
        delta: Vec<i64>,
    },
}

impl Invariance {
    pub fn passed(&self) -> bool {
        matches!(self, Invariance::Pass)
    }
}

/// `0`, `(3, -2, 1, ..)` and `(5, 5, ..)`, truncated to `t` coordinates.
pub fn default_samples(t: usize) -> Vec<Vec<i64>> {
    let second = [3, -2, 1, -1, 2, -3];
    vec![
        vec![0; t],
        (0..t).map(|k| second[k % second.len()]).collect(),
        vec![5; t],
    ]
}

/// Checks that, for every offset, the footprint of `tile + delta` is the
/// footprint of `tile` moved by one translation that does not depend on the
/// sampled tile. Unit offsets are always checked besides `deltas`.
pub fn verify_invariance(
    deps: &[AffineFn],
    tiling: &TilingSpec,
    samples: &[Vec<i64>],
    deltas: &[Vec<i64>],
) -> Result<Invariance, MarsError> {
    let setup = Setup::new(deps, tiling)?;
    let t = setup.t();
    let mut all: BTreeSet<Vec<i64>> = deltas
        .iter()
        .filter(|d| d.iter().any(|&x| x != 0))
        .cloned()
        .collect();
    for j in 0..t {
        for sign in [1, -1] {
            let mut e = vec![0; t];
            e[j] = sign;
            all.insert(e);
        }
    }
    let mut cache: BTreeMap<Vec<i64>, (ISet, Option<Vec<i64>>)> = BTreeMap::new();
    let mut footprint = |tile: Vec<i64>| -> Result<(ISet, Option<Vec<i64>>), MarsError> {
        if let Some(hit) = cache.get(&tile) {
            return Ok(hit.clone());
        }
        let f = setup.footprint(&tile)?;
        let lex = f.lexmin()?;
        cache.insert(tile, (f.clone(), lex.clone()));
        Ok((f, lex))
    };
    for delta in &all {
        let mut shift: Option<Vec<i64>> = None;
        for tile in samples {
            let fail = Invariance::Fail {
                tile: tile.clone(),
                delta: delta.clone(),
            };
            let (here, here_min) = footprint(tile.clone())?;
            let (there, there_min) = footprint(offset(tile, delta))?;
            let (a, b) = match (here_min, there_min) {
                (None, None) => continue,
                (Some(a), Some(b)) => (a, b),
                _ => return Ok(fail),
            };
            let u: Vec<i64> = b.iter().zip(&a).map(|(x, y)| x - y).collect();
            if shift.as_ref().is_some_and(|s| *s != u) {
                return Ok(fail);
            }
            if !there.equal(&here.translate(&u)?)? {
                return Ok(fail);
            }
            shift = Some(u);
        }
    }
    Ok(Invariance::Pass)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FdFamily {
    /// Dependences (0-based) whose footprint from the tile meets the
    /// footprint of tile 0.
    pub deps: Vec<usize>,
    pub tiles: Vec<Vec<i64>>,
    /// Distinct projections `W_i`, for each `i` in `deps`.
    pub projections: Vec<(usize, Vec<RatVector>)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FdReport {
    pub radius: i64,
    pub families: Vec<FdFamily>,
}

/// Groups the consumer tiles of tile 0 in `[-radius, radius]^t` by the exact
/// set of dependences through which they reach its footprint.
pub fn fd_partition(
    deps: &[AffineFn],
    tiling: &TilingSpec,
    radius: i64,
) -> Result<FdReport, MarsError> {
    let setup = Setup::new(deps, tiling)?;
    let t = setup.t();
    let f0 = setup.footprint(&vec![0; t])?;
    let complements: Vec<_> = deps
        .iter()
        .map(|d| supplementary_basis(&kernel_basis(&d.linear())))
        .collect();
    let mut groups: BTreeMap<Vec<usize>, Vec<Vec<i64>>> = BTreeMap::new();
    let mut delta = vec![-radius; t];
    loop {
        let mut reached = Vec::new();
        for i in 0..deps.len() {
            if !setup.footprint_of(i, &delta)?.intersect(&f0)?.is_empty()? {
                reached.push(i);
            }
        }
        if !reached.is_empty() {
            groups.entry(reached).or_default().push(delta.clone());
        }
        let mut k = t;
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            if delta[k] < radius {
                delta[k] += 1;
                break;
            }
            delta[k] = -radius;
        }
        if delta.iter().all(|&x| x == -radius) {
            break;
        }
    }
    let families = groups
        .into_iter()
        .map(|(ds, tiles)| {
            let projections = ds
                .iter()
                .map(|&i| {
                    let ws: BTreeSet<RatVector> = tiles
                        .iter()
                        .map(|d| project_onto(&complements[i], &setup.lift(d)))
                        .collect();
                    (i, ws.into_iter().collect())
                })
                .collect();
            FdFamily {
                deps: ds,
                tiles,
                projections,
            }
        })
        .collect();
    Ok(FdReport { radius, families })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TripleStatus {
    Pass {
        m: Rational,
    },
    Fail,
    /// `(A_i v_j) . d_k = 0`: no multiple can reach the destination period.
    OrthogonalSkipped,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleVerdict {
    pub dep: usize,
    pub source_hyperplane: usize,
    pub dest_hyperplane: usize,
    pub dot: Rational,
    pub status: TripleStatus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionReport {
    pub triples: Vec<TripleVerdict>,
    pub overall: bool,
}

/// For each dependence `i`, source hyperplane `j` and destination hyperplane
/// `k`: is there an integer `m` with `m ((A_i v_j) . d_k) = z_k`?
pub fn tiled_destination_condition(
    deps: &[AffineFn],
    source: &TilingSpec,
    dest: &TilingSpec,
) -> Result<ConditionReport, MarsError> {
    Setup::new(deps, source)?;
    if dest.space != deps[0].target {
        return Err(MarsError::TilingSpace {
            expected: deps[0].target.clone(),
            found: dest.space.clone(),
        });
    }
    let v = source.scaled_normals();
    let mut triples = Vec::new();
    for (i, d) in deps.iter().enumerate() {
        let a = d.linear();
        for (j, vj) in v.iter().enumerate() {
            let image = a.mul_vec(vj);
            for (k, dk) in dest.normals.iter().enumerate() {
                let dot = image.dot(&RatVector::from_ints(dk));
                let status = if dot.is_zero() {
                    TripleStatus::OrthogonalSkipped
                } else {
                    let m = Rational::from_integer(dest.sizes[k].into()) / &dot;
                    if m.is_integer() {
                        TripleStatus::Pass { m }
                    } else {
                        TripleStatus::Fail
                    }
                };
                triples.push(TripleVerdict {
                    dep: i,
                    source_hyperplane: j,
                    dest_hyperplane: k,
                    dot,
                    status,
                });
            }
        }
    }
    let overall = triples.iter().all(|t| t.status != TripleStatus::Fail);
    Ok(ConditionReport { triples, overall })
}
