//! Maximal atomic irredundant sets of a tiled footprint.
//!
//! All sets are built at one concrete tile. Consumer tiles are grouped into
//! offset families: two tile offsets belong to the same family exactly when
//! they produce the same footprint, which is the case when their translations
//! differ by an integer vector of the shared null space. The partition is then
//! obtained by splitting the footprint against every family footprint.

mod build;
mod diagnostics;
mod families;

use std::cell::RefCell;
use std::collections::BTreeMap;

use thiserror::Error;

use crate::iset::{ISet, SetError};
use crate::linalg::{kernel_basis, RatMatrix, RatVector, SubspaceBasis};
use crate::model::{AffineFn, TilingSpec};

pub use build::{
    build_mars, check_partition, exclude_within, BuildOptions, Mars, MarsPartition, PartitionCheck,
};
pub use diagnostics::{
    default_samples, fd_partition, tiled_destination_condition, verify_invariance, ConditionReport,
    FdFamily, FdReport, Invariance, TripleStatus, TripleVerdict,
};
pub use families::{offset_families, FamilyIndex, OffsetFamily};

pub const DEFAULT_MAX_FAMILIES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MarsError {
    #[error("no dependences to analyze")]
    NoDependences,
    #[error("dependences do not share {0} space")]
    MixedSpaces(&'static str),
    #[error("tiling is on space `{found}` but dependences start in `{expected}`")]
    TilingSpace { expected: String, found: String },
    #[error("dependence {dep} does not match the tiled space dimension {dim}")]
    DimensionMismatch { dep: usize, dim: usize },
    #[error("footprint of dependence {0} is unbounded: the tiles are unbounded along a direction it does not collapse")]
    UnboundedFootprint(usize),
    #[error("dependences have different null spaces; consumer offsets are not translation invariant (use the F_D partition instead)")]
    MultipleNullSpaces,
    #[error("{found} offset families exceed the limit of {max}")]
    TooManyFamilies { found: usize, max: usize },
    #[error(transparent)]
    Set(#[from] SetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    Uniform,
    UniformlyIntersecting,
    SharedNullSpace,
    MultipleNullSpaces,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Uniform => "Uniform",
            Verdict::UniformlyIntersecting => "UniformlyIntersecting",
            Verdict::SharedNullSpace => "SharedNullSpace",
            Verdict::MultipleNullSpaces => "MultipleNullSpaces",
        }
    }

    /// Whether consumer offsets can be grouped into finitely many families.
    pub fn has_shared_kernel(self) -> bool {
        self != Verdict::MultipleNullSpaces
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepClass {
    pub verdict: Verdict,
    /// One kernel per distinct linear part, in order of first appearance.
    pub kernels: Vec<SubspaceBasis>,
}

pub fn classify(deps: &[AffineFn]) -> Result<DepClass, MarsError> {
    let first = deps.first().ok_or(MarsError::NoDependences)?;
    if deps.iter().any(|d| d.source != first.source) {
        return Err(MarsError::MixedSpaces("a source"));
    }
    if deps.iter().any(|d| d.target != first.target) {
        return Err(MarsError::MixedSpaces("a target"));
    }
    let mut parts: Vec<&Vec<Vec<i64>>> = Vec::new();
    for d in deps {
        if !parts.contains(&&d.matrix) {
            parts.push(&d.matrix);
        }
    }
    let kernels: Vec<SubspaceBasis> = parts
        .iter()
        .map(|m| kernel_basis(&RatMatrix::from_int_rows(m, first.input_dim())))
        .collect();
    let identity = |m: &Vec<Vec<i64>>| {
        m.len() == first.input_dim()
            && m.iter()
                .enumerate()
                .all(|(i, row)| row.iter().enumerate().all(|(j, &v)| v == i64::from(i == j)))
    };
    let verdict = if parts.len() == 1 && identity(parts[0]) {
        Verdict::Uniform
    } else if parts.len() == 1 {
        Verdict::UniformlyIntersecting
    } else if kernels.iter().all(|k| k.same_span(&kernels[0])) {
        Verdict::SharedNullSpace
    } else {
        Verdict::MultipleNullSpaces
    };
    Ok(DepClass { verdict, kernels })
}

type ImageCache = BTreeMap<(usize, RatVector), (Vec<i64>, ISet)>;

/// Shared geometry of one analysis: dependences, tiling and the tile-offset
/// maps `delta -> A_i V delta`.
pub(crate) struct Setup<'a> {
    pub deps: &'a [AffineFn],
    pub tiling: &'a TilingSpec,
    /// Scaled normals as columns, `dim x t`.
    pub v: RatMatrix,
    /// `A_i V` per dependence.
    pub m: Vec<RatMatrix>,
    /// Per dependence and phase of `V t`: a base tile and its image. Tiles of
    /// equal phase differ by an integer translation, so their images do too.
    images: RefCell<ImageCache>,
}

impl<'a> Setup<'a> {
    pub fn new(deps: &'a [AffineFn], tiling: &'a TilingSpec) -> Result<Self, MarsError> {
        let first = deps.first().ok_or(MarsError::NoDependences)?;
        if first.source != tiling.space {
            return Err(MarsError::TilingSpace {
                expected: first.source.clone(),
                found: tiling.space.clone(),
            });
        }
        if deps.iter().any(|d| d.source != first.source) {
            return Err(MarsError::MixedSpaces("a source"));
        }
        if deps.iter().any(|d| d.target != first.target) {
            return Err(MarsError::MixedSpaces("a target"));
        }
        let dim = tiling.dim();
        for (i, d) in deps.iter().enumerate() {
            if d.input_dim() != dim || d.output_dim() != first.output_dim() {
                return Err(MarsError::DimensionMismatch { dep: i, dim });
            }
        }
        // tiles are unbounded along the directions orthogonal to every normal
        let free = kernel_basis(&tiling.normal_matrix());
        for (i, d) in deps.iter().enumerate() {
            let a = d.linear();
            if free.vectors().iter().any(|u| !a.mul_vec(u).is_zero()) {
                return Err(MarsError::UnboundedFootprint(i));
            }
        }
        let v = tiling.scaled_matrix();
        let m = deps.iter().map(|d| d.linear().mul(&v)).collect();
        Ok(Setup {
            deps,
            tiling,
            v,
            m,
            images: RefCell::new(BTreeMap::new()),
        })
    }

    pub fn t(&self) -> usize {
        self.tiling.count()
    }

    pub fn out_dim(&self) -> usize {
        self.deps[0].output_dim()
    }

    /// Translation `V delta` of the tile offset `delta`.
    pub fn lift(&self, delta: &[i64]) -> RatVector {
        self.v.mul_vec(&RatVector::from_ints(delta))
    }

    pub fn footprint_of(&self, dep: usize, tile: &[i64]) -> Result<ISet, MarsError> {
        let phase = self.lift(tile).fract();
        let key = (dep, phase);
        if let Some((base, image)) = self.images.borrow().get(&key) {
            let step: Vec<i64> = tile.iter().zip(base).map(|(a, b)| a - b).collect();
            let shift = self.m[dep]
                .mul_vec(&RatVector::from_ints(&step))
                .to_ints()
                .ok_or(MarsError::Set(SetError::Overflow))?;
            return Ok(image.translate(&shift)?);
        }
        let image = self.deps[dep].image(&self.tiling.tile_set(tile))?;
        self.images
            .borrow_mut()
            .insert(key, (tile.to_vec(), image.clone()));
        Ok(image)
    }

    pub fn footprint(&self, tile: &[i64]) -> Result<ISet, MarsError> {
        let mut acc = ISet::empty(self.out_dim());
        for i in 0..self.deps.len() {
            acc = acc.union(&self.footprint_of(i, tile)?)?;
        }
        Ok(acc.coalesce()?)
    }
}

/// Union over all dependences of the images of tile `t`.
pub fn combined_footprint(
    deps: &[AffineFn],
    tiling: &TilingSpec,
    t: &[i64],
) -> Result<ISet, MarsError> {
    Setup::new(deps, tiling)?.footprint(t)
}

/// Adds `delta` to the tile coordinates `t`.
pub(crate) fn offset(t: &[i64], delta: &[i64]) -> Vec<i64> {
    t.iter().zip(delta).map(|(a, b)| a + b).collect()
}

#[cfg(test)]
mod tests;
