use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{classify, MarsError, Setup};
use crate::iset::SetError;
use crate::linalg::{
    column_echelon, inverse, kernel_basis, project_onto, rank, supplementary_basis, RatMatrix,
    RatVector, Rational,
};
use crate::model::{AffineFn, TilingSpec};

type Point = Vec<i64>;
type Bounds = Vec<(i64, i64)>;

/// A class of consumer tile offsets that all see the same footprint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OffsetFamily {
    /// Smallest member by (L1 norm, lexicographic order).
    pub delta: Vec<i64>,
    /// Projection of `V delta` onto the orthogonal complement of the kernel.
    pub w: RatVector,
    /// `A_i V delta` for every dependence `i`.
    pub image_shifts: Vec<RatVector>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct Key {
    image: RatVector,
    phase: RatVector,
}

pub(crate) fn key_of(setup: &Setup<'_>, delta: &[i64]) -> Key {
    let d = RatVector::from_ints(delta);
    Key {
        image: setup.m[0].mul_vec(&d),
        phase: setup.v.mul_vec(&d).fract(),
    }
}

/// Maps tile offsets to the index of their family.
#[derive(Debug, Clone)]
pub struct FamilyIndex {
    m1: RatMatrix,
    v: RatMatrix,
    keys: BTreeMap<Key, usize>,
}

impl FamilyIndex {
    pub fn new(
        deps: &[AffineFn],
        tiling: &TilingSpec,
        families: &[OffsetFamily],
    ) -> Result<Self, MarsError> {
        let setup = Setup::new(deps, tiling)?;
        let keys = families
            .iter()
            .enumerate()
            .map(|(k, f)| (key_of(&setup, &f.delta), k))
            .collect();
        Ok(FamilyIndex {
            m1: setup.m[0].clone(),
            v: setup.v,
            keys,
        })
    }

    pub fn family_of(&self, delta: &[i64]) -> Option<usize> {
        let d = RatVector::from_ints(delta);
        let key = Key {
            image: self.m1.mul_vec(&d),
            phase: self.v.mul_vec(&d).fract(),
        };
        self.keys.get(&key).copied()
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}

/// Box of tile offsets scanned when picking the smallest family member.
const CANON_POINTS: usize = 250_000;

/// All offset families of consumer tiles of tile 0, zero family first.
pub fn offset_families(
    deps: &[AffineFn],
    tiling: &TilingSpec,
) -> Result<Vec<OffsetFamily>, MarsError> {
    let class = classify(deps)?;
    if !class.verdict.has_shared_kernel() {
        return Err(MarsError::MultipleNullSpaces);
    }
    let setup = Setup::new(deps, tiling)?;
    let deltas = representatives(&setup)?;
    let complement = supplementary_basis(&kernel_basis(&deps[0].linear()));
    Ok(deltas
        .into_iter()
        .map(|delta| {
            let p = setup.lift(&delta);
            let d = RatVector::from_ints(&delta);
            OffsetFamily {
                w: project_onto(&complement, &p),
                image_shifts: setup.m.iter().map(|m| m.mul_vec(&d)).collect(),
                delta,
            }
        })
        .collect())
}

fn floor_i64(r: &Rational) -> Result<i64, MarsError> {
    r.floor()
        .to_integer()
        .to_i64()
        .ok_or(MarsError::Set(SetError::Overflow))
}

fn ceil_i64(r: &Rational) -> Result<i64, MarsError> {
    r.ceil()
        .to_integer()
        .to_i64()
        .ok_or(MarsError::Set(SetError::Overflow))
}

fn l1_lex(d: &[i64]) -> (i64, Vec<i64>) {
    (d.iter().map(|x| x.abs()).sum(), d.to_vec())
}

/// Calls `f` on every point of the integer box, last coordinate fastest.
fn for_box(
    bounds: &[(i64, i64)],
    mut f: impl FnMut(&[i64]) -> Result<(), MarsError>,
) -> Result<(), MarsError> {
    if bounds.iter().any(|(lo, hi)| lo > hi) {
        return Ok(());
    }
    let mut p: Vec<i64> = bounds.iter().map(|b| b.0).collect();
    loop {
        f(&p)?;
        let mut k = bounds.len();
        loop {
            if k == 0 {
                return Ok(());
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

/// Smallest representative of every family whose footprint meets the
/// footprint of tile 0.
///
/// The overlap condition bounds `A_i V delta` inside a box. With a unimodular
/// `U` such that `A_1 V U = [H | 0]`, writing `delta = U (z', z'')` bounds
/// `z'`, while `z''` only moves `delta` along the kernel and matters through
/// the phase of `V delta`, which is periodic with the denominator of `V`.
fn representatives(setup: &Setup<'_>) -> Result<Vec<Vec<i64>>, MarsError> {
    let t = setup.t();
    let zero = vec![0; t];
    let f0 = setup.footprint(&zero)?;
    let Some(bbox) = f0.bounding_box()? else {
        return Ok(vec![zero]);
    };

    let scale = Rational::from_integer(setup.m[0].denominator_lcm());
    let m1_int: Vec<Vec<i64>> = (0..setup.m[0].rows())
        .map(|r| {
            (0..t)
                .map(|j| {
                    (setup.m[0].get(r, j) * &scale)
                        .to_integer()
                        .to_i64()
                        .ok_or(MarsError::Set(SetError::Overflow))
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    let (_, u, r) = column_echelon(&m1_int, t);
    let umat = RatMatrix::from_int_rows(&u, t);

    // admissible interval of each row of A_i V delta, per dependence
    let mut windows: Vec<Vec<(Rational, Rational)>> = Vec::new();
    let mut zrange: Vec<Option<(i64, i64)>> = vec![None; r];
    for (i, m) in setup.m.iter().enumerate() {
        let b = &setup.deps[i].offset;
        let mut rows = Vec::with_capacity(m.rows());
        for row in 0..m.rows() {
            let (mut lo_hull, mut hi_hull) = (Rational::zero(), Rational::zero());
            for j in 0..t {
                let e = m.get(row, j);
                if e.is_positive() {
                    hi_hull += e;
                } else {
                    lo_hull += e;
                }
            }
            let lo = Rational::from_integer(BigInt::from(bbox[row].0 - b[row])) - hi_hull;
            let hi = Rational::from_integer(BigInt::from(bbox[row].1 - b[row])) - lo_hull;
            rows.push((lo, hi));
        }
        if r > 0 {
            let h = m.mul(&umat);
            let mut chosen: Vec<usize> = Vec::new();
            for row in 0..h.rows() {
                let mut trial = chosen.clone();
                trial.push(row);
                let sub = RatMatrix::from_rows(
                    &trial
                        .iter()
                        .map(|&q| RatVector(h.row(q).0[..r].to_vec()))
                        .collect::<Vec<_>>(),
                    r,
                );
                if rank(&sub) == trial.len() {
                    chosen = trial;
                }
                if chosen.len() == r {
                    break;
                }
            }
            let sub = RatMatrix::from_rows(
                &chosen
                    .iter()
                    .map(|&q| RatVector(h.row(q).0[..r].to_vec()))
                    .collect::<Vec<_>>(),
                r,
            );
            let inv = inverse(&sub).expect("chosen rows are independent");
            for (k, slot) in zrange.iter_mut().enumerate() {
                let (mut lo, mut hi) = (Rational::zero(), Rational::zero());
                for (l, &q) in chosen.iter().enumerate() {
                    let c = inv.get(k, l);
                    let (a, bnd) = (c * &rows[q].0, c * &rows[q].1);
                    if a < bnd {
                        lo += a;
                        hi += bnd;
                    } else {
                        lo += bnd;
                        hi += a;
                    }
                }
                let (lo, hi) = (ceil_i64(&lo)?, floor_i64(&hi)?);
                *slot = Some(match *slot {
                    None => (lo, hi),
                    Some((a, b)) => (a.min(lo), b.max(hi)),
                });
            }
        }
        windows.push(rows);
    }

    let period = setup
        .v
        .denominator_lcm()
        .to_i64()
        .ok_or(MarsError::Set(SetError::Overflow))?;
    let mut bounds: Vec<(i64, i64)> = zrange.into_iter().map(|z| z.unwrap_or((0, -1))).collect();
    bounds.extend(std::iter::repeat_n((0, period - 1), t - r));

    // The footprint is finite, so overlap is decided on its points. Images of
    // tiles with the same phase are integer translates of one base image.
    let f0_points: HashSet<Vec<i64>> = f0.points()?.into_iter().collect();
    let mut bases: BTreeMap<(usize, RatVector), (Vec<i64>, Vec<Point>)> = BTreeMap::new();
    // integer form of the family key: scaled A_1 V delta and the phase of V delta
    let v_int: Vec<Vec<i64>> = (0..setup.v.rows())
        .map(|r| {
            (0..t)
                .map(|j| {
                    (setup.v.get(r, j) * Rational::from_integer(BigInt::from(period)))
                        .to_integer()
                        .to_i64()
                        .ok_or(MarsError::Set(SetError::Overflow))
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    let int_key = |delta: &[i64]| -> Vec<i64> {
        let dot = |row: &Vec<i64>| -> i64 { row.iter().zip(delta).map(|(a, b)| a * b).sum() };
        m1_int
            .iter()
            .map(dot)
            .chain(v_int.iter().map(|row| dot(row).rem_euclid(period)))
            .collect()
    };
    let mut found: BTreeMap<Vec<i64>, Vec<i64>> = BTreeMap::new();
    found.insert(int_key(&zero), zero.clone());
    // integer copies of A_i V and the windows, scaled by a common denominator
    let fast: Vec<(Vec<Point>, Bounds)> = setup
        .m
        .iter()
        .zip(&windows)
        .map(|(m, rows)| {
            let scale = Rational::from_integer(m.denominator_lcm());
            let int = |x: Rational| {
                x.to_integer()
                    .to_i64()
                    .ok_or(MarsError::Set(SetError::Overflow))
            };
            let mat = (0..m.rows())
                .map(|r| {
                    (0..t)
                        .map(|j| int(m.get(r, j) * &scale))
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            let win = rows
                .iter()
                .map(|(lo, hi)| Ok((ceil_i64(&(lo * &scale))?, floor_i64(&(hi * &scale))?)))
                .collect::<Result<Vec<_>, MarsError>>()?;
            Ok((mat, win))
        })
        .collect::<Result<_, MarsError>>()?;
    for_box(&bounds, |z| {
        let delta: Vec<i64> = (0..t)
            .map(|row| u[row].iter().zip(z).map(|(a, b)| a * b).sum())
            .collect();
        let reachable: Vec<usize> = fast
            .iter()
            .enumerate()
            .filter(|(_, (mat, win))| {
                mat.iter().zip(win).all(|(row, (lo, hi))| {
                    let x: i64 = row.iter().zip(&delta).map(|(a, b)| a * b).sum();
                    *lo <= x && x <= *hi
                })
            })
            .map(|(i, _)| i)
            .collect();
        if reachable.is_empty() {
            return Ok(());
        }
        let key = int_key(&delta);
        if found.contains_key(&key) {
            return Ok(());
        }
        let phase = setup.lift(&delta).fract();
        for i in reachable {
            let m = &setup.m[i];
            let slot = (i, phase.clone());
            if !bases.contains_key(&slot) {
                let pts = setup.footprint_of(i, &delta)?.points()?;
                bases.insert(slot.clone(), (delta.clone(), pts));
            }
            let (base, pts) = &bases[&slot];
            let step: Vec<i64> = delta.iter().zip(base).map(|(a, b)| a - b).collect();
            let moved = m
                .mul_vec(&RatVector::from_ints(&step))
                .to_ints()
                .ok_or(MarsError::Set(SetError::Overflow))?;
            let hit = pts.iter().any(|p| {
                let y: Vec<i64> = p.iter().zip(&moved).map(|(a, b)| a + b).collect();
                f0_points.contains(&y)
            });
            if hit {
                found.insert(key, delta);
                return Ok(());
            }
        }
        Ok(())
    })?;

    // replace every representative by the smallest member of its family
    let mut radius = found.values().map(|d| l1_lex(d).0).max().unwrap_or(0);
    while radius > 0 && (2 * radius as usize + 1).pow(t as u32) > CANON_POINTS {
        radius -= 1;
    }
    let window = vec![(-radius, radius); t];
    for_box(&window, |delta| {
        if let Some(best) = found.get_mut(&int_key(delta)) {
            if l1_lex(delta) < l1_lex(best) {
                *best = delta.to_vec();
            }
        }
        Ok(())
    })?;

    let mut reps: Vec<Vec<i64>> = found.into_values().collect();
    reps.sort_by_key(|d| l1_lex(d));
    Ok(reps)
}
