use std::path::{Path, PathBuf};
use std::process::ExitCode;

use affine_mars_cli::{
    analyze, render, verify, AnalyzeOptions, CliError, OracleSummary, RenderOptions, VerifyOptions,
};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "mars",
    version,
    about = "Maximal atomic irredundant sets of tiled affine programs"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the dependences and partition the footprint of tile 0
    Analyze {
        file: PathBuf,
        /// Destination space (required when several spaces are written)
        #[arg(long)]
        dest: Option<String>,
        /// Drop the sets produced inside tile 0 itself
        #[arg(long)]
        exclude_self: bool,
        /// Write the JSON report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Refuse when there are more offset families than this
        #[arg(long)]
        max_families: Option<usize>,
        /// Add the per-dependence flow partition (also allows multiple null spaces)
        #[arg(long)]
        fd: bool,
        /// Radius of the tile box used by --fd
        #[arg(long, default_value_t = 3)]
        fd_box: i64,
        /// Also compare against the brute-force oracle
        #[arg(long)]
        oracle: bool,
    },
    /// Compare the symbolic partition with the brute-force oracle
    Verify {
        file: PathBuf,
        #[arg(long)]
        dest: Option<String>,
        /// Radius of the box of consumer tiles enumerated by the oracle
        #[arg(long)]
        tile_box: Option<i64>,
        /// Radius of the data box the footprint must fit in
        #[arg(long)]
        data_box: Option<i64>,
        #[arg(long)]
        max_families: Option<usize>,
        /// Check the sets of this analysis report instead of recomputing them
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Draw the partition of a 2-D iteration space as SVG
    Render {
        file: PathBuf,
        #[arg(long)]
        svg: PathBuf,
        #[arg(long)]
        dest: Option<String>,
        /// Tile to draw, e.g. --tile 1,0
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        tile: Option<Vec<i64>>,
        /// Leave out the sets produced inside the drawn tile
        #[arg(long)]
        exclude_self: bool,
        #[arg(long)]
        max_families: Option<usize>,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Command::Analyze {
            file,
            dest,
            exclude_self,
            out,
            max_families,
            fd,
            fd_box,
            oracle,
        } => {
            let text = read(&file)?;
            let mut report = analyze(
                &text,
                &AnalyzeOptions {
                    dest: dest.clone(),
                    exclude_self,
                    max_families,
                    fd,
                    fd_box,
                },
            )?;
            if oracle && !report.mars.is_empty() {
                let v = verify(
                    &text,
                    &VerifyOptions {
                        dest,
                        max_families,
                        ..Default::default()
                    },
                )?;
                report.oracle = Some(OracleSummary::new(&v.agreement, v.radius));
            }
            match out {
                Some(path) => write(&path, &report.to_json()),
                None => {
                    print!("{}", report.to_json());
                    Ok(())
                }
            }
        }
        Command::Verify {
            file,
            dest,
            tile_box,
            data_box,
            max_families,
            report,
        } => {
            let text = read(&file)?;
            let report = report.as_deref().map(read).transpose()?;
            let v = verify(
                &text,
                &VerifyOptions {
                    dest,
                    tile_box,
                    data_box,
                    max_families,
                    report,
                },
            )?;
            print!("{}", v.table());
            if v.agreement.agree() {
                Ok(())
            } else {
                Err(CliError::Mismatch {
                    mismatched: v.agreement.rows.len() - v.agreement.matched(),
                    total: v.agreement.rows.len(),
                })
            }
        }
        Command::Render {
            file,
            svg,
            dest,
            tile,
            exclude_self,
            max_families,
        } => {
            let text = read(&file)?;
            let opts = RenderOptions {
                dest,
                tile,
                exclude_self,
                max_families,
            };
            write(&svg, &render(&text, &opts)?)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
