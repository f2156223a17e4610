//! Brute-force ground truth.
//!
//! Tiles are rebuilt point by point from the hyperplane inequalities and
//! dependences are evaluated pointwise, so nothing here goes through the set
//! algebra. The comparison helpers at the bottom read symbolic results only
//! through point enumeration.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::iset::SetError;
use crate::mars::{FamilyIndex, MarsPartition};
use crate::model::{AffineFn, TilingSpec};

pub type Point = Vec<i64>;

/// `(producer tile, other consumer tiles)` to the points with that key.
pub type FlowGrouping = BTreeMap<(Point, Vec<Point>), Vec<Point>>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("tiles are unbounded: {count} hyperplanes in dimension {dim}")]
    UnboundedTiles { count: usize, dim: usize },
    #[error("tile box of radius {radius} misses family offset {delta:?}")]
    TileBoxTooSmall { radius: i64, delta: Vec<i64> },
    #[error("data box misses footprint point {0:?}")]
    DataBoxTooSmall(Point),
    #[error(transparent)]
    Set(#[from] SetError),
}

/// Consumer signature (sorted tile offsets) to the sorted points having it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SignatureGrouping {
    pub groups: BTreeMap<Vec<Point>, Vec<Point>>,
}

fn for_each_in_box(bounds: &[(i64, i64)], mut f: impl FnMut(&[i64])) {
    if bounds.iter().any(|(lo, hi)| lo > hi) {
        return;
    }
    let mut p: Vec<i64> = bounds.iter().map(|b| b.0).collect();
    loop {
        f(&p);
        let mut k = bounds.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            if p[k] < bounds[k].1 {
                p[k] += 1;
                break;
            }
            p[k] = bounds[k].0;
        }
    }
}

/// Integer points of `T(t)`, lexicographically sorted.
pub fn tile_points(tiling: &TilingSpec, t: &[i64]) -> Result<Vec<Point>, OracleError> {
    let (count, dim) = (tiling.count(), tiling.dim());
    if count != dim {
        return Err(OracleError::UnboundedTiles { count, dim });
    }
    // the tile lies in the parallelepiped spanned from sum t_j v_j
    let v = tiling.scaled_normals();
    let mut lo = vec![i64::MAX; dim];
    let mut hi = vec![i64::MIN; dim];
    for corner in 0..(1u32 << count) {
        for k in 0..dim {
            let mut c = crate::linalg::rat(0);
            for (j, vj) in v.iter().enumerate() {
                let coef = t[j] + i64::from(corner >> j & 1 == 1);
                c += &vj.0[k] * crate::linalg::rat(coef);
            }
            lo[k] = lo[k].min(c.floor().to_integer().to_i64().expect("tile corner fits"));
            hi[k] = hi[k].max(c.ceil().to_integer().to_i64().expect("tile corner fits"));
        }
    }
    let bounds: Vec<(i64, i64)> = lo.into_iter().zip(hi).collect();
    let mut out = Vec::new();
    for_each_in_box(&bounds, |x| {
        if tiling.in_tile(x, t) {
            out.push(x.to_vec());
        }
    });
    Ok(out)
}

fn in_box(y: &[i64], bx: Option<&[(i64, i64)]>) -> bool {
    bx.is_none_or(|b| y.iter().zip(b).all(|(v, (lo, hi))| lo <= v && v <= hi))
}

/// `{ B(x) : x in T(t) }` within `data_box`, sorted.
pub fn oracle_footprint(
    dep: &AffineFn,
    tiling: &TilingSpec,
    t: &[i64],
    data_box: Option<&[(i64, i64)]>,
) -> Result<Vec<Point>, OracleError> {
    let pts: BTreeSet<Point> = tile_points(tiling, t)?
        .iter()
        .map(|x| dep.apply(x))
        .filter(|y| in_box(y, data_box))
        .collect();
    Ok(pts.into_iter().collect())
}

fn signatures(
    deps: &[AffineFn],
    tiling: &TilingSpec,
    radius: i64,
    data_box: Option<&[(i64, i64)]>,
) -> Result<BTreeMap<Point, BTreeSet<Point>>, OracleError> {
    let t = tiling.count();
    let zero = vec![0; t];
    let mut sig: BTreeMap<Point, BTreeSet<Point>> = BTreeMap::new();
    for d in deps {
        for y in oracle_footprint(d, tiling, &zero, None)? {
            if !in_box(&y, data_box) {
                return Err(OracleError::DataBoxTooSmall(y));
            }
            sig.entry(y).or_default();
        }
    }
    let mut deltas = Vec::new();
    for_each_in_box(&vec![(-radius, radius); t], |d| deltas.push(d.to_vec()));
    for delta in deltas {
        for x in tile_points(tiling, &delta)? {
            for d in deps {
                if let Some(s) = sig.get_mut(&d.apply(&x)) {
                    s.insert(delta.clone());
                }
            }
        }
    }
    Ok(sig)
}

/// Groups the footprint of tile 0 by the set of tiles in
/// `[-radius, radius]^t` consuming each point. A `data_box` must contain the
/// whole footprint.
pub fn oracle_mars(
    deps: &[AffineFn],
    tiling: &TilingSpec,
    radius: i64,
    data_box: Option<&[(i64, i64)]>,
) -> Result<SignatureGrouping, OracleError> {
    let mut out = SignatureGrouping::default();
    for (y, s) in signatures(deps, tiling, radius, data_box)? {
        out.groups
            .entry(s.into_iter().collect())
            .or_default()
            .push(y);
    }
    Ok(out)
}

/// Grouping of the flow into tile 0 used by the uniform-dependence method,
/// reading the destination as the iteration space itself: points of the
/// footprint outside tile 0 are keyed by their producing tile together with
/// the other tiles consuming them.
pub fn uniform_flow_grouping(
    deps: &[AffineFn],
    tiling: &TilingSpec,
    radius: i64,
) -> Result<FlowGrouping, OracleError> {
    let zero = vec![0; tiling.count()];
    let mut out = FlowGrouping::new();
    for (y, s) in signatures(deps, tiling, radius, None)? {
        let producer = tiling.tile_of(&y);
        if producer == zero {
            continue;
        }
        let consumers: Vec<Point> = s.into_iter().filter(|d| *d != producer).collect();
        out.entry((producer, consumers)).or_default().push(y);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgreementRow {
    /// Family indices.
    pub signature: Vec<usize>,
    pub symbolic_points: usize,
    pub oracle_points: usize,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Agreement {
    pub rows: Vec<AgreementRow>,
    /// Oracle consumer offsets that belong to no known family.
    pub unknown_offsets: Vec<Point>,
}

impl Agreement {
    pub fn matched(&self) -> usize {
        self.rows.iter().filter(|r| r.matches).count()
    }

    pub fn agree(&self) -> bool {
        self.unknown_offsets.is_empty() && self.rows.iter().all(|r| r.matches)
    }
}

/// Compares a partition at tile 0 with the oracle grouping, mapping oracle
/// tile offsets to families through `index`.
pub fn compare(
    partition: &MarsPartition,
    index: &FamilyIndex,
    grouping: &SignatureGrouping,
    radius: i64,
) -> Result<Agreement, OracleError> {
    for f in &partition.offsets {
        if f.delta.iter().any(|x| x.abs() > radius) {
            return Err(OracleError::TileBoxTooSmall {
                radius,
                delta: f.delta.clone(),
            });
        }
    }
    let mut unknown = BTreeSet::new();
    let mut expected: BTreeMap<Vec<usize>, BTreeSet<Point>> = BTreeMap::new();
    for (sig, pts) in &grouping.groups {
        let mut fams = BTreeSet::new();
        for d in sig {
            match index.family_of(d) {
                Some(k) => {
                    fams.insert(k);
                }
                None => {
                    unknown.insert(d.clone());
                }
            }
        }
        expected
            .entry(fams.into_iter().collect())
            .or_default()
            .extend(pts.iter().cloned());
    }
    let mut actual: BTreeMap<Vec<usize>, BTreeSet<Point>> = BTreeMap::new();
    for m in &partition.mars {
        let mut sig = m.signature.clone();
        sig.sort_unstable();
        actual.entry(sig).or_default().extend(m.set.points()?);
    }
    let keys: BTreeSet<&Vec<usize>> = expected.keys().chain(actual.keys()).collect();
    let empty = BTreeSet::new();
    let rows = keys
        .into_iter()
        .map(|k| {
            let a = actual.get(k).unwrap_or(&empty);
            let e = expected.get(k).unwrap_or(&empty);
            AgreementRow {
                signature: k.clone(),
                symbolic_points: a.len(),
                oracle_points: e.len(),
                matches: a == e,
            }
        })
        .collect();
    Ok(Agreement {
        rows,
        unknown_offsets: unknown.into_iter().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond(s: i64) -> TilingSpec {
        TilingSpec::new("S", vec![vec![1, 1], vec![-1, 1]], vec![s, s])
    }

    #[test]
    fn single_dependence_footprint() {
        let dep = AffineFn::new("S", "A", vec![vec![1, 0]], vec![0]);
        let f = oracle_footprint(&dep, &diamond(4), &[0, 0], None).unwrap();
        assert_eq!(f, vec![vec![-1], vec![0], vec![1]]);
    }

    #[test]
    fn identity_footprint_is_the_tile() {
        let dep = AffineFn::new("S", "S", vec![vec![1, 0], vec![0, 1]], vec![0, 0]);
        let tiling = diamond(4);
        let f = oracle_footprint(&dep, &tiling, &[1, -1], None).unwrap();
        assert_eq!(f, tile_points(&tiling, &[1, -1]).unwrap());
        assert_eq!(f.len(), 8);
    }

    #[test]
    fn matmul_footprint_is_a_block() {
        let dep = AffineFn::new("S", "A", vec![vec![1, 0, 0], vec![0, 0, 1]], vec![0, 0]);
        let tiling = TilingSpec::canonical("S", vec![4, 4, 4]);
        let f = oracle_footprint(&dep, &tiling, &[0, 0, 0], None).unwrap();
        assert_eq!(f.len(), 16);
        assert!(f
            .iter()
            .all(|y| (0..4).contains(&y[0]) && (0..4).contains(&y[1])));
    }

    #[test]
    fn empty_dependence_list_gives_empty_grouping() {
        let g = oracle_mars(&[], &diamond(4), 2, None).unwrap();
        assert!(g.groups.is_empty());
    }

    #[test]
    fn single_dependence_grouping() {
        let dep = AffineFn::new("S", "A", vec![vec![1, 0]], vec![0]);
        let g = oracle_mars(&[dep], &diamond(4), 3, None).unwrap();
        assert_eq!(g.groups.len(), 3);
        let pts: Vec<Vec<Point>> = g.groups.values().cloned().collect();
        let mut flat: Vec<Point> = pts.concat();
        flat.sort();
        assert_eq!(flat, vec![vec![-1], vec![0], vec![1]]);
        assert!(pts.iter().all(|p| p.len() == 1));
    }

    #[test]
    fn data_box_must_hold_the_footprint() {
        let dep = AffineFn::new("S", "A", vec![vec![1, 0]], vec![0]);
        let deps = [dep];
        let small = [(0, 1)];
        assert_eq!(
            oracle_mars(&deps, &diamond(4), 2, Some(&small)),
            Err(OracleError::DataBoxTooSmall(vec![-1]))
        );
        assert!(oracle_mars(&deps, &diamond(4), 2, Some(&[(-1, 1)])).is_ok());
    }

    #[test]
    fn unbounded_tiles_are_rejected() {
        let tiling = TilingSpec::new("S", vec![vec![1, 0]], vec![4]);
        assert!(matches!(
            tile_points(&tiling, &[0]),
            Err(OracleError::UnboundedTiles { count: 1, dim: 2 })
        ));
    }
}
