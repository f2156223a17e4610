//! Driver behind the `mars` binary: program loading, the analysis pipeline,
//! oracle verification and SVG rendering.

pub mod render;
pub mod report;

use std::fmt::Write as _;

use affine_mars::mars::DEFAULT_MAX_FAMILIES;
use affine_mars::oracle::{self, Agreement};
use affine_mars::{
    build_mars, classify, exclude_within, fd_partition, load_program, tiled_destination_condition,
    AffineFn, BuildOptions, FamilyIndex, MarsError, MarsPartition, Program, TilingSpec, Verdict,
};
use serde_json::json;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use report::{AnalysisReport, OracleSummary, SCHEMA_VERSION};

/// Environment variable overriding the default family limit.
pub const MAX_FAMILIES_ENV: &str = "MARS_MAX_FAMILIES";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{message}")]
    Refused { regime: String, message: String },
    #[error("symbolic and oracle groupings disagree on {mismatched} of {total} groups")]
    Mismatch { mismatched: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Refused { .. } => 2,
            CliError::Mismatch { .. } => 3,
        }
    }

    /// JSON object written to stderr.
    pub fn to_json(&self) -> serde_json::Value {
        let mut err = json!({
            "kind": match self {
                CliError::Input(_) => "input",
                CliError::Refused { .. } => "refusal",
                CliError::Mismatch { .. } => "mismatch",
            },
            "message": self.to_string(),
        });
        if let CliError::Refused { regime, .. } = self {
            err["regime"] = json!(regime);
        }
        json!({ "error": err })
    }
}

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

impl From<MarsError> for CliError {
    fn from(e: MarsError) -> Self {
        match e {
            MarsError::MultipleNullSpaces => CliError::Refused {
                regime: Verdict::MultipleNullSpaces.name().into(),
                message: format!(
                    "{}: the dependences have different null spaces, so footprints of distinct \
                     consumer tiles are not translates of one another and no finite offset set exists",
                    Verdict::MultipleNullSpaces.name()
                ),
            },
            MarsError::TooManyFamilies { .. } => CliError::Refused {
                regime: "TooManyFamilies".into(),
                message: format!("{e}; raise --max-families or {MAX_FAMILIES_ENV}"),
            },
            other => CliError::Input(other.to_string()),
        }
    }
}

/// Lowercase hex SHA-256 of the program text.
pub fn digest(text: &str) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(text.as_bytes())))
}

/// A loaded program narrowed to the dependences into one destination.
pub struct Problem {
    pub program: Program,
    pub digest: String,
    pub destination: String,
    pub deps: Vec<AffineFn>,
    pub tiling: TilingSpec,
}

impl Problem {
    pub fn load(text: &str, dest: Option<&str>) -> Result<Problem, CliError> {
        let program = load_program(text).map_err(input)?;
        let destination = match dest {
            Some(d) => {
                if program.space(d).is_none() {
                    return Err(CliError::Input(format!("unknown destination space `{d}`")));
                }
                d.to_string()
            }
            None => {
                let all = program.destinations();
                match all.len() {
                    0 => return Err(CliError::Input("program has no dependences".into())),
                    1 => all[0].clone(),
                    _ => {
                        return Err(CliError::Input(format!(
                            "several destination spaces ({}); choose one with --dest",
                            all.join(", ")
                        )))
                    }
                }
            }
        };
        let deps = program.deps_into(&destination);
        let Some(first) = deps.first() else {
            return Err(CliError::Input(format!(
                "no dependence targets `{destination}`"
            )));
        };
        let tiling = program.tiling_for(&first.source).cloned().ok_or_else(|| {
            CliError::Input(format!("source space `{}` has no tiling", first.source))
        })?;
        Ok(Problem {
            digest: digest(text),
            program,
            destination,
            deps,
            tiling,
        })
    }

    /// Tiling of the destination space, if it is tiled.
    pub fn destination_tiling(&self) -> Option<&TilingSpec> {
        self.program.tiling_for(&self.destination)
    }

    pub fn build(
        &self,
        max_families: usize,
        tile: Option<Vec<i64>>,
    ) -> Result<MarsPartition, CliError> {
        Ok(build_mars(
            &self.deps,
            &self.tiling,
            &BuildOptions { tile, max_families },
        )?)
    }
}

/// Family limit from the flag, then the environment, then the default.
pub fn max_families(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var(MAX_FAMILIES_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            CliError::Input(format!(
                "{MAX_FAMILIES_ENV}={v:?} is not a non-negative integer"
            ))
        }),
        Err(_) => Ok(DEFAULT_MAX_FAMILIES),
    }
}

#[derive(Debug, Clone, Default)]
pub struct AnalyzeOptions {
    pub dest: Option<String>,
    pub exclude_self: bool,
    pub max_families: Option<usize>,
    pub fd: bool,
    pub fd_box: i64,
}

pub fn analyze(text: &str, opts: &AnalyzeOptions) -> Result<AnalysisReport, CliError> {
    let problem = Problem::load(text, opts.dest.as_deref())?;
    let class = classify(&problem.deps)?;
    let fd = if opts.fd {
        Some(fd_partition(&problem.deps, &problem.tiling, opts.fd_box)?)
    } else {
        None
    };
    let conjecture = match problem.destination_tiling() {
        Some(dt) => Some(tiled_destination_condition(
            &problem.deps,
            &problem.tiling,
            dt,
        )?),
        None => None,
    };
    if class.verdict == Verdict::MultipleNullSpaces {
        if fd.is_none() {
            return Err(MarsError::MultipleNullSpaces.into());
        }
        return Ok(report::assemble(
            &problem,
            &class,
            None,
            false,
            fd.as_ref(),
            conjecture.as_ref(),
        )?);
    }
    let mut partition = problem.build(max_families(opts.max_families)?, None)?;
    if opts.exclude_self {
        partition = exclude_within(&partition, &self_region(&problem, &partition.tile)?)?;
    }
    Ok(report::assemble(
        &problem,
        &class,
        Some(&partition),
        opts.exclude_self,
        fd.as_ref(),
        conjecture.as_ref(),
    )?)
}

/// Destination points owned by `tile` of the destination tiling, or of the
/// source tiling when data is written in place.
fn self_region(problem: &Problem, tile: &[i64]) -> Result<affine_mars::ISet, CliError> {
    let tiling = match problem.destination_tiling() {
        Some(t) => t,
        None if problem.destination == problem.tiling.space => &problem.tiling,
        None => {
            return Err(CliError::Input(format!(
                "--exclude-self needs a tiling of `{}`",
                problem.destination
            )))
        }
    };
    if tiling.count() != tile.len() {
        return Err(CliError::Input(format!(
            "--exclude-self: tile {tile:?} is not a tile of `{}`",
            problem.destination
        )));
    }
    Ok(tiling.tile_set(tile))
}

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    pub dest: Option<String>,
    pub tile_box: Option<i64>,
    pub data_box: Option<i64>,
    pub max_families: Option<usize>,
    /// Analysis report whose sets are checked instead of a fresh build.
    pub report: Option<String>,
}

pub struct Verification {
    pub agreement: Agreement,
    pub partition: MarsPartition,
    pub radius: i64,
}

impl Verification {
    /// Per-group match table followed by the `agree: k/n groups` line.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<28} {:>9} {:>7}  match",
            "signature", "symbolic", "oracle"
        );
        for row in &self.agreement.rows {
            let sig: Vec<String> = row
                .signature
                .iter()
                .map(|&k| format!("{:?}", self.partition.offsets[k].delta))
                .collect();
            let _ = writeln!(
                out,
                "{:<28} {:>9} {:>7}  {}",
                sig.join(" "),
                row.symbolic_points,
                row.oracle_points,
                if row.matches { "yes" } else { "NO" }
            );
        }
        for d in &self.agreement.unknown_offsets {
            let _ = writeln!(out, "oracle offset {d:?} belongs to no family");
        }
        let _ = writeln!(
            out,
            "agree: {}/{} groups",
            self.agreement.matched(),
            self.agreement.rows.len()
        );
        out
    }
}

pub fn verify(text: &str, opts: &VerifyOptions) -> Result<Verification, CliError> {
    let problem = Problem::load(text, opts.dest.as_deref())?;
    let mut partition = problem.build(max_families(opts.max_families)?, None)?;
    if let Some(report_text) = &opts.report {
        let saved: AnalysisReport =
            serde_json::from_str(report_text).map_err(|e| input(format!("report: {e}")))?;
        if saved.program_digest != problem.digest {
            return Err(CliError::Input(
                "report was produced from a different program".into(),
            ));
        }
        partition = saved.overlay(&partition).map_err(input)?;
    }
    let needed = partition
        .offsets
        .iter()
        .flat_map(|f| f.delta.iter().map(|x| x.abs()))
        .max()
        .unwrap_or(0)
        + 1;
    let radius = opts.tile_box.unwrap_or(needed);
    let data_box = opts
        .data_box
        .map(|n| vec![(-n, n); problem.deps[0].output_dim()]);
    let grouping = oracle::oracle_mars(&problem.deps, &problem.tiling, radius, data_box.as_deref())
        .map_err(input)?;
    let index = FamilyIndex::new(&problem.deps, &problem.tiling, &partition.offsets)?;
    let agreement = oracle::compare(&partition, &index, &grouping, radius).map_err(input)?;
    Ok(Verification {
        agreement,
        partition,
        radius,
    })
}

#[derive(Debug, Clone, Default)]
pub struct RenderOptions {
    pub dest: Option<String>,
    /// Tile to draw; tile 0 when absent.
    pub tile: Option<Vec<i64>>,
    pub exclude_self: bool,
    pub max_families: Option<usize>,
}

pub fn render(text: &str, opts: &RenderOptions) -> Result<String, CliError> {
    let problem = Problem::load(text, opts.dest.as_deref())?;
    if problem.tiling.dim() != 2 {
        return Err(CliError::Refused {
            regime: "RenderingUnsupported".into(),
            message: format!(
                "rendering unsupported: iteration space has dimension {}",
                problem.tiling.dim()
            ),
        });
    }
    if let Some(t) = &opts.tile {
        if t.len() != problem.tiling.count() {
            return Err(CliError::Input(format!(
                "--tile has {} coordinates, the tiling has {} hyperplanes",
                t.len(),
                problem.tiling.count()
            )));
        }
    }
    let mut partition = problem.build(max_families(opts.max_families)?, opts.tile.clone())?;
    if opts.exclude_self {
        partition = exclude_within(&partition, &self_region(&problem, &partition.tile)?)?;
    }
    let data_tiling = problem
        .destination_tiling()
        .or((problem.destination == problem.tiling.space).then_some(&problem.tiling));
    render::render_svg(&partition, data_tiling)
}
