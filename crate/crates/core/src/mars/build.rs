use std::collections::BTreeSet;

use super::diagnostics::{default_samples, verify_invariance, Invariance};
use super::{
    classify, offset, offset_families, MarsError, OffsetFamily, Setup, Verdict,
    DEFAULT_MAX_FAMILIES,
};
use crate::iset::ISet;
use crate::model::{AffineFn, TilingSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildOptions {
    /// Tile whose footprint is partitioned; `None` means tile 0.
    pub tile: Option<Vec<i64>>,
    pub max_families: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            tile: None,
            max_families: DEFAULT_MAX_FAMILIES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mars {
    /// Indices into [`MarsPartition::offsets`] of the consuming families.
    pub signature: Vec<usize>,
    pub set: ISet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarsPartition {
    pub destination: String,
    pub tile: Vec<i64>,
    pub verdict: Verdict,
    pub footprint: ISet,
    pub offsets: Vec<OffsetFamily>,
    pub mars: Vec<Mars>,
    pub invariance: Invariance,
}

impl MarsPartition {
    /// Offsets of the families in a signature.
    pub fn signature_deltas(&self, signature: &[usize]) -> Vec<Vec<i64>> {
        signature
            .iter()
            .map(|&k| self.offsets[k].delta.clone())
            .collect()
    }
}

/// Partitions the combined footprint of one tile by consumer families.
///
/// Starting from the whole footprint, each family footprint splits every
/// current block into the part it consumes and the part it does not; the
/// blocks left at the end are exactly the non-empty sets
/// `M_C = (n_{f in C} Phi_f) \ (u_{f not in C} Phi_f)`.
pub fn build_mars(
    deps: &[AffineFn],
    tiling: &TilingSpec,
    opts: &BuildOptions,
) -> Result<MarsPartition, MarsError> {
    let class = classify(deps)?;
    if !class.verdict.has_shared_kernel() {
        return Err(MarsError::MultipleNullSpaces);
    }
    let setup = Setup::new(deps, tiling)?;
    let offsets = offset_families(deps, tiling)?;
    if offsets.len() > opts.max_families {
        return Err(MarsError::TooManyFamilies {
            found: offsets.len(),
            max: opts.max_families,
        });
    }
    let tile = opts.tile.clone().unwrap_or_else(|| vec![0; setup.t()]);
    let footprint = setup.footprint(&tile)?;

    let mut blocks: Vec<(Vec<usize>, ISet)> = Vec::new();
    if !footprint.is_empty()? {
        blocks.push((vec![0], footprint.clone()));
    }
    for (k, fam) in offsets.iter().enumerate().skip(1) {
        // blocks already lie inside the footprint, so phi need not be clipped
        let phi = setup.footprint(&offset(&tile, &fam.delta))?;
        let mut next = Vec::with_capacity(blocks.len() * 2);
        for (sig, set) in blocks {
            let inside = set.intersect(&phi)?.coalesce()?;
            if inside.is_empty()? {
                next.push((sig, set));
                continue;
            }
            let outside = set.subtract(&phi)?.coalesce()?;
            if !outside.is_empty()? {
                next.push((sig.clone(), outside));
            }
            let mut sig = sig;
            sig.push(k);
            next.push((sig, inside));
        }
        blocks = next;
    }
    let mut mars: Vec<Mars> = blocks
        .into_iter()
        .map(|(signature, set)| Mars { signature, set })
        .collect();
    mars.sort_by(|a, b| (a.signature.len(), &a.signature).cmp(&(b.signature.len(), &b.signature)));

    let deltas: Vec<Vec<i64>> = offsets.iter().skip(1).map(|f| f.delta.clone()).collect();
    let invariance = verify_invariance(deps, tiling, &default_samples(setup.t()), &deltas)?;
    Ok(MarsPartition {
        destination: deps[0].target.clone(),
        tile,
        verdict: class.verdict,
        footprint,
        offsets,
        mars,
        invariance,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionCheck {
    pub disjoint: bool,
    pub covers: bool,
    pub non_empty: bool,
    pub distinct_signatures: bool,
}

impl PartitionCheck {
    pub fn ok(&self) -> bool {
        self.disjoint && self.covers && self.non_empty && self.distinct_signatures
    }
}

/// Symbolic check of the partition laws against the footprint.
pub fn check_partition(p: &MarsPartition) -> Result<PartitionCheck, MarsError> {
    let mut disjoint = true;
    for (k, a) in p.mars.iter().enumerate() {
        for b in &p.mars[k + 1..] {
            if !a.set.intersect(&b.set)?.is_empty()? {
                disjoint = false;
            }
        }
    }
    let mut union = ISet::empty(p.footprint.dim());
    let mut non_empty = true;
    for m in &p.mars {
        non_empty &= !m.set.is_empty()?;
        union = union.union(&m.set)?;
    }
    let sigs: BTreeSet<&Vec<usize>> = p.mars.iter().map(|m| &m.signature).collect();
    Ok(PartitionCheck {
        disjoint,
        covers: union.equal(&p.footprint)?,
        non_empty,
        distinct_signatures: sigs.len() == p.mars.len(),
    })
}

/// Drops the sets lying entirely inside `region` (usually the producing
/// tile itself, which leaves the flow between tiles).
pub fn exclude_within(p: &MarsPartition, region: &ISet) -> Result<MarsPartition, MarsError> {
    let mut out = p.clone();
    out.mars.clear();
    for m in &p.mars {
        if !m.set.is_subset(region)? {
            out.mars.push(m.clone());
        }
    }
    Ok(out)
}
