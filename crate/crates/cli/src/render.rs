//! SVG drawing of a partition whose data space has at most two dimensions.
//!
//! Output is plain text built in a fixed order, so it can be compared byte for
//! byte against golden files.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use affine_mars::{MarsPartition, TilingSpec};

use crate::CliError;

const CELL: i64 = 24;
const MARGIN: i64 = 20;
const LEGEND_ROW: i64 = 22;

const PALETTE: [&str; 12] = [
    "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#edc948", "#b07aa1", "#ff9da7",
    "#9c755f", "#bab0ac", "#8cd17d", "#d37295",
];

/// Grid of data points in the drawing window, keyed by `(x, y)`.
struct Grid {
    x: (i64, i64),
    y: (i64, i64),
}

impl Grid {
    fn px(&self, x: i64) -> i64 {
        MARGIN + (x - self.x.0) * CELL
    }

    /// Rows grow upwards.
    fn py(&self, y: i64) -> i64 {
        MARGIN + (self.y.1 - y) * CELL
    }

    fn width(&self) -> i64 {
        (self.x.1 - self.x.0 + 1) * CELL
    }

    fn height(&self) -> i64 {
        (self.y.1 - self.y.0 + 1) * CELL
    }
}

fn xy(p: &[i64]) -> (i64, i64) {
    (p[0], p.get(1).copied().unwrap_or(0))
}

/// Unit edges separating cells where `key` changes, as SVG path commands.
fn boundaries<K: PartialEq>(grid: &Grid, key: impl Fn(i64, i64) -> K) -> String {
    let mut d = String::new();
    for y in grid.y.0..=grid.y.1 {
        for x in grid.x.0 - 1..=grid.x.1 {
            if key(x, y) != key(x + 1, y) {
                let _ = write!(d, "M{} {}v{}", grid.px(x + 1), grid.py(y), CELL);
            }
        }
    }
    for x in grid.x.0..=grid.x.1 {
        for y in grid.y.0 - 1..=grid.y.1 {
            if key(x, y) != key(x, y + 1) {
                let _ = write!(d, "M{} {}h{}", grid.px(x), grid.py(y), CELL);
            }
        }
    }
    d
}

/// Draws `partition`, with tile boundaries of `data_tiling` when given.
pub fn render_svg(
    partition: &MarsPartition,
    data_tiling: Option<&TilingSpec>,
) -> Result<String, CliError> {
    let dim = partition.footprint.dim();
    if dim > 2 {
        return Err(CliError::Refused {
            regime: "RenderingUnsupported".into(),
            message: format!("rendering unsupported: data space has dimension {dim}"),
        });
    }
    let mut owner: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    let mut counts = Vec::with_capacity(partition.mars.len());
    for (k, m) in partition.mars.iter().enumerate() {
        let pts = m.set.points().map_err(|e| CliError::Input(e.to_string()))?;
        counts.push(pts.len());
        for p in pts {
            owner.insert(xy(&p), k);
        }
    }
    let footprint: Vec<(i64, i64)> = partition
        .footprint
        .points()
        .map_err(|e| CliError::Input(e.to_string()))?
        .iter()
        .map(|p| xy(p))
        .collect();
    let Some(first) = footprint.first() else {
        return Err(CliError::Input(
            "footprint is empty; nothing to render".into(),
        ));
    };
    let (mut lo, mut hi) = (*first, *first);
    for &(x, y) in &footprint {
        lo = (lo.0.min(x), lo.1.min(y));
        hi = (hi.0.max(x), hi.1.max(y));
    }
    let pad_y = i64::from(dim == 2);
    let grid = Grid {
        x: (lo.0 - 1, hi.0 + 1),
        y: (lo.1 - pad_y, hi.1 + pad_y),
    };

    let legend_top = MARGIN * 2 + grid.height();
    let width = (MARGIN * 2 + grid.width()).max(360);
    let height = legend_top + LEGEND_ROW * partition.mars.len() as i64 + MARGIN;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(
        out,
        "<title>MARS of {} at tile {:?}</title>",
        partition.destination, partition.tile
    );
    out.push_str("<style>\n");
    out.push_str("text { font-family: monospace; font-size: 12px; }\n");
    out.push_str(
        ".tiles { fill: none; stroke: #999999; stroke-width: 1; stroke-dasharray: 3 2; }\n",
    );
    out.push_str(".footprint { fill: none; stroke: #000000; stroke-width: 2; }\n");
    for k in 0..partition.mars.len() {
        let _ = writeln!(
            out,
            ".m{k} {{ fill: {}; stroke: #ffffff; stroke-width: 1; }}",
            PALETTE[k % PALETTE.len()]
        );
    }
    out.push_str("</style>\n");

    for k in 0..partition.mars.len() {
        let _ = writeln!(out, r#"<g class="m{k}">"#);
        for (&(x, y), _) in owner.iter().filter(|(_, &o)| o == k) {
            let _ = writeln!(
                out,
                r#"<rect x="{}" y="{}" width="{CELL}" height="{CELL}"/>"#,
                grid.px(x),
                grid.py(y)
            );
        }
        out.push_str("</g>\n");
    }

    if let Some(tiling) = data_tiling {
        let d = boundaries(&grid, |x, y| {
            let p: Vec<i64> = if dim == 2 { vec![x, y] } else { vec![x] };
            tiling.tile_of(&p)
        });
        let _ = writeln!(out, r#"<path class="tiles" d="{d}"/>"#);
    }
    let d = boundaries(&grid, |x, y| footprint.binary_search(&(x, y)).is_ok());
    let _ = writeln!(out, r#"<path class="footprint" d="{d}"/>"#);

    for (k, m) in partition.mars.iter().enumerate() {
        let top = legend_top + LEGEND_ROW * k as i64;
        let offsets: Vec<String> = partition
            .signature_deltas(&m.signature)
            .iter()
            .map(|d| format!("{d:?}"))
            .collect();
        let _ = writeln!(
            out,
            r#"<rect class="m{k}" x="{MARGIN}" y="{top}" width="14" height="14"/><text x="{}" y="{}">{} ({} point{})</text>"#,
            MARGIN + 22,
            top + 12,
            offsets.join(" "),
            counts[k],
            if counts[k] == 1 { "" } else { "s" }
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}
