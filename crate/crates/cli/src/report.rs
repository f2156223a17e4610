//! JSON analysis report, schema version 1.
//!
//! Every list is emitted in a fixed order (families by size then lexicographic
//! offset, sets by signature, cells as produced by the set algebra) so two runs
//! on the same input give identical bytes. Rationals are strings `n` or `n/d`.

use affine_mars::linalg::fmt_rational;
use affine_mars::mars::{ConditionReport, FdReport, Invariance, Mars, MarsPartition, TripleStatus};
use affine_mars::oracle::Agreement;
use affine_mars::{DepClass, ISet, MarsError, RatVector};
use serde::{Deserialize, Serialize};

use crate::Problem;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AnalysisReport {
    pub schema: u32,
    pub program_digest: String,
    pub source: String,
    pub destination: String,
    pub classification: Classification,
    /// Absent when no partition was built.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariance: Option<InvarianceReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tile: Option<Vec<i64>>,
    pub offsets: Vec<OffsetReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub footprint: Option<SetReport>,
    pub exclude_self: bool,
    pub mars: Vec<MarsReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fd_report: Option<FdJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conjecture_check: Option<ConditionJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: String,
    /// Basis of each distinct kernel.
    pub kernels: Vec<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub tile: Vec<i64>,
    pub delta: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OffsetReport {
    pub delta: Vec<i64>,
    pub w: Vec<String>,
    pub image_shifts: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetReport {
    pub points: usize,
    pub set: ISet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarsReport {
    /// Indices into `offsets`.
    pub signature: Vec<usize>,
    pub offsets: Vec<Vec<i64>>,
    pub points: usize,
    pub set: ISet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdJson {
    pub radius: i64,
    pub families: Vec<FdFamilyJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdFamilyJson {
    pub deps: Vec<usize>,
    pub tiles: Vec<Vec<i64>>,
    pub projections: Vec<Projection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub dep: usize,
    pub vectors: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionJson {
    pub overall: bool,
    pub triples: Vec<TripleJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TripleJson {
    pub dep: usize,
    pub source_hyperplane: usize,
    pub dest_hyperplane: usize,
    pub dot: String,
    /// `pass`, `fail` or `orthogonal-skipped`.
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OracleSummary {
    pub agree: bool,
    pub tile_box: i64,
    pub matched: usize,
    pub groups: usize,
    pub unknown_offsets: Vec<Vec<i64>>,
}

impl OracleSummary {
    pub fn new(a: &Agreement, tile_box: i64) -> Self {
        OracleSummary {
            agree: a.agree(),
            tile_box,
            matched: a.matched(),
            groups: a.rows.len(),
            unknown_offsets: a.unknown_offsets.clone(),
        }
    }
}

fn strings(v: &RatVector) -> Vec<String> {
    v.0.iter().map(fmt_rational).collect()
}

pub(crate) fn assemble(
    problem: &Problem,
    class: &DepClass,
    partition: Option<&MarsPartition>,
    exclude_self: bool,
    fd: Option<&FdReport>,
    conjecture: Option<&ConditionReport>,
) -> Result<AnalysisReport, MarsError> {
    let classification = Classification {
        verdict: class.verdict.name().to_string(),
        kernels: class
            .kernels
            .iter()
            .map(|k| k.vectors().iter().map(strings).collect())
            .collect(),
    };
    let mut report = AnalysisReport {
        schema: SCHEMA_VERSION,
        program_digest: problem.digest.clone(),
        source: problem.tiling.space.clone(),
        destination: problem.destination.clone(),
        classification,
        invariance: None,
        tile: None,
        offsets: Vec::new(),
        footprint: None,
        exclude_self,
        mars: Vec::new(),
        fd_report: fd.map(fd_json),
        conjecture_check: conjecture.map(condition_json),
        oracle: None,
    };
    if let Some(p) = partition {
        report.invariance = Some(match &p.invariance {
            Invariance::Pass => InvarianceReport {
                passed: true,
                witness: None,
            },
            Invariance::Fail { tile, delta } => InvarianceReport {
                passed: false,
                witness: Some(Witness {
                    tile: tile.clone(),
                    delta: delta.clone(),
                }),
            },
        });
        report.tile = Some(p.tile.clone());
        report.offsets = p
            .offsets
            .iter()
            .map(|f| OffsetReport {
                delta: f.delta.clone(),
                w: strings(&f.w),
                image_shifts: f.image_shifts.iter().map(strings).collect(),
            })
            .collect();
        report.footprint = Some(SetReport {
            points: p.footprint.points()?.len(),
            set: p.footprint.clone(),
        });
        report.mars = p
            .mars
            .iter()
            .map(|m| {
                Ok(MarsReport {
                    signature: m.signature.clone(),
                    offsets: p.signature_deltas(&m.signature),
                    points: m.set.points()?.len(),
                    set: m.set.clone(),
                })
            })
            .collect::<Result<_, MarsError>>()?;
    }
    Ok(report)
}

fn fd_json(r: &FdReport) -> FdJson {
    FdJson {
        radius: r.radius,
        families: r
            .families
            .iter()
            .map(|f| FdFamilyJson {
                deps: f.deps.clone(),
                tiles: f.tiles.clone(),
                projections: f
                    .projections
                    .iter()
                    .map(|(dep, vs)| Projection {
                        dep: *dep,
                        vectors: vs.iter().map(strings).collect(),
                    })
                    .collect(),
            })
            .collect(),
    }
}

fn condition_json(r: &ConditionReport) -> ConditionJson {
    ConditionJson {
        overall: r.overall,
        triples: r
            .triples
            .iter()
            .map(|t| {
                let (status, m) = match &t.status {
                    TripleStatus::Pass { m } => ("pass", Some(fmt_rational(m))),
                    TripleStatus::Fail => ("fail", None),
                    TripleStatus::OrthogonalSkipped => ("orthogonal-skipped", None),
                };
                TripleJson {
                    dep: t.dep,
                    source_hyperplane: t.source_hyperplane,
                    dest_hyperplane: t.dest_hyperplane,
                    dot: fmt_rational(&t.dot),
                    status: status.to_string(),
                    m,
                }
            })
            .collect(),
    }
}

impl AnalysisReport {
    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// `fresh` with its sets replaced by the ones recorded here. The recorded
    /// offsets must be the fresh ones.
    pub fn overlay(&self, fresh: &MarsPartition) -> Result<MarsPartition, String> {
        let deltas: Vec<&Vec<i64>> = self.offsets.iter().map(|o| &o.delta).collect();
        let expected: Vec<&Vec<i64>> = fresh.offsets.iter().map(|o| &o.delta).collect();
        if deltas != expected {
            return Err("report offsets differ from the program's offset families".into());
        }
        let mut out = fresh.clone();
        out.mars = Vec::with_capacity(self.mars.len());
        for m in &self.mars {
            if m.signature.iter().any(|&k| k >= fresh.offsets.len()) {
                return Err(format!(
                    "signature {:?} names an unknown family",
                    m.signature
                ));
            }
            if m.set.dim() != fresh.footprint.dim() {
                return Err(format!(
                    "set of signature {:?} has the wrong dimension",
                    m.signature
                ));
            }
            out.mars.push(Mars {
                signature: m.signature.clone(),
                set: m.set.clone(),
            });
        }
        Ok(out)
    }
}
