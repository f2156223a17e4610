//! Program description: spaces, affine dependences and tilings.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::iset::{Cell, ISet, SetError};
use crate::linalg::{inverse, rank, RatMatrix, RatVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Iteration,
    Data,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Space {
    pub name: String,
    pub dim: usize,
    pub kind: SpaceKind,
}

/// `B(x) = A x + b` from `source` to `target`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineFn {
    pub source: String,
    pub target: String,
    #[serde(rename = "A")]
    pub matrix: Vec<Vec<i64>>,
    #[serde(rename = "b")]
    pub offset: Vec<i64>,
}

impl AffineFn {
    pub fn new(source: &str, target: &str, matrix: Vec<Vec<i64>>, offset: Vec<i64>) -> Self {
        AffineFn {
            source: source.to_string(),
            target: target.to_string(),
            matrix,
            offset,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.matrix.first().map_or(0, Vec::len)
    }

    pub fn output_dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn linear(&self) -> RatMatrix {
        RatMatrix::from_int_rows(&self.matrix, self.input_dim())
    }

    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        self.matrix
            .iter()
            .zip(&self.offset)
            .map(|(row, b)| row.iter().zip(x).map(|(a, v)| a * v).sum::<i64>() + b)
            .collect()
    }

    pub fn image(&self, s: &ISet) -> Result<ISet, SetError> {
        s.image(&self.matrix, &self.offset)
    }
}

/// Tiles `T(t) = { x : s_j t_j <= n_j . x < s_j (t_j + 1) }`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TilingSpec {
    pub space: String,
    pub normals: Vec<Vec<i64>>,
    pub sizes: Vec<i64>,
}

impl TilingSpec {
    pub fn new(space: &str, normals: Vec<Vec<i64>>, sizes: Vec<i64>) -> Self {
        TilingSpec {
            space: space.to_string(),
            normals,
            sizes,
        }
    }

    /// Canonical tiling along the coordinate axes.
    pub fn canonical(space: &str, sizes: Vec<i64>) -> Self {
        let d = sizes.len();
        let normals = (0..d)
            .map(|j| (0..d).map(|k| i64::from(j == k)).collect())
            .collect();
        TilingSpec::new(space, normals, sizes)
    }

    /// Number of hyperplanes.
    pub fn count(&self) -> usize {
        self.normals.len()
    }

    pub fn dim(&self) -> usize {
        self.normals.first().map_or(0, Vec::len)
    }

    pub fn normal_matrix(&self) -> RatMatrix {
        RatMatrix::from_int_rows(&self.normals, self.dim())
    }

    /// Vectors `v_j` with `n_k . v_j = s_j [j = k]`, taken inside the span of
    /// the normals (dual basis through the Gram matrix).
    pub fn scaled_normals(&self) -> Vec<RatVector> {
        let n = self.normal_matrix();
        let gram = n.mul(&n.transpose());
        let g_inv = inverse(&gram).expect("independent normals give a regular Gram matrix");
        let nt = n.transpose();
        (0..self.count())
            .map(|j| {
                let col = g_inv.column(j).scale(&crate::linalg::rat(self.sizes[j]));
                nt.mul_vec(&col)
            })
            .collect()
    }

    /// Scaled normals as the columns of a `dim x count` matrix.
    pub fn scaled_matrix(&self) -> RatMatrix {
        RatMatrix::from_columns(&self.scaled_normals(), self.dim())
    }

    pub fn tile_set(&self, t: &[i64]) -> ISet {
        assert_eq!(t.len(), self.count(), "tile coordinate length");
        let mut cell = Cell::universe(self.dim());
        for ((n, &s), &tj) in self.normals.iter().zip(&self.sizes).zip(t) {
            let neg: Vec<i64> = n.iter().map(|a| -a).collect();
            cell = cell.ge(n, -s * tj).ge(&neg, s * (tj + 1) - 1);
        }
        ISet::from_cell(cell)
    }

    /// Tile coordinates of the point `x`.
    pub fn tile_of(&self, x: &[i64]) -> Vec<i64> {
        self.normals
            .iter()
            .zip(&self.sizes)
            .map(|(n, &s)| {
                let dot: i64 = n.iter().zip(x).map(|(a, v)| a * v).sum();
                Integer::div_floor(&dot, &s)
            })
            .collect()
    }

    pub fn in_tile(&self, x: &[i64], t: &[i64]) -> bool {
        self.tile_of(x) == t
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub spaces: Vec<Space>,
    pub deps: Vec<AffineFn>,
    pub tilings: Vec<TilingSpec>,
    pub domain_bounds: BTreeMap<String, Vec<(i64, i64)>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{path}: {message}")]
pub struct ModelError {
    pub path: String,
    pub message: String,
}

fn fail<T>(path: impl Into<String>, message: impl Into<String>) -> Result<T, ModelError> {
    Err(ModelError {
        path: path.into(),
        message: message.into(),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProgram {
    #[serde(default)]
    #[allow(dead_code)]
    description: Option<String>,
    spaces: Vec<Space>,
    #[serde(default)]
    deps: Vec<AffineFn>,
    #[serde(default)]
    tilings: Vec<TilingSpec>,
    #[serde(default, rename = "domainBounds")]
    domain_bounds: BTreeMap<String, Vec<(i64, i64)>>,
}

/// Parses and validates a JSON program document.
pub fn load_program(text: &str) -> Result<Program, ModelError> {
    let raw: RawProgram = serde_json::from_str(text).or_else(|e| fail("$", e.to_string()))?;
    Program::new(raw.spaces, raw.deps, raw.tilings, raw.domain_bounds)
}

impl Program {
    pub fn new(
        spaces: Vec<Space>,
        deps: Vec<AffineFn>,
        tilings: Vec<TilingSpec>,
        domain_bounds: BTreeMap<String, Vec<(i64, i64)>>,
    ) -> Result<Program, ModelError> {
        let p = Program {
            spaces,
            deps,
            tilings,
            domain_bounds,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn space(&self, name: &str) -> Option<&Space> {
        self.spaces.iter().find(|s| s.name == name)
    }

    pub fn tiling_for(&self, space: &str) -> Option<&TilingSpec> {
        self.tilings.iter().find(|t| t.space == space)
    }

    /// Dependences whose target is `space`.
    pub fn deps_into(&self, space: &str) -> Vec<AffineFn> {
        self.deps
            .iter()
            .filter(|d| d.target == space)
            .cloned()
            .collect()
    }

    /// Distinct dependence targets, in order of first appearance.
    pub fn destinations(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for d in &self.deps {
            if !out.contains(&d.target) {
                out.push(d.target.clone());
            }
        }
        out
    }

    fn validate(&self) -> Result<(), ModelError> {
        let mut names = BTreeSet::new();
        for (k, s) in self.spaces.iter().enumerate() {
            let path = format!("$.spaces[{k}]");
            if s.name.is_empty() {
                return fail(path, "empty space name");
            }
            if s.dim == 0 {
                return fail(path, "dim must be at least 1");
            }
            if !names.insert(s.name.as_str()) {
                return fail(path, format!("duplicate space name `{}`", s.name));
            }
        }
        let dim_of = |name: &str, path: &str| -> Result<usize, ModelError> {
            match self.space(name) {
                Some(s) => Ok(s.dim),
                None => fail(path, format!("unknown space `{name}`")),
            }
        };
        for (k, d) in self.deps.iter().enumerate() {
            let path = format!("$.deps[{k}]");
            let src = dim_of(&d.source, &format!("{path}.source"))?;
            let dst = dim_of(&d.target, &format!("{path}.target"))?;
            if d.matrix.len() != dst {
                return fail(
                    format!("{path}.A"),
                    format!(
                        "dimension mismatch: {} rows, target `{}` has dim {dst}",
                        d.matrix.len(),
                        d.target
                    ),
                );
            }
            for (r, row) in d.matrix.iter().enumerate() {
                if row.len() != src {
                    return fail(
                        format!("{path}.A[{r}]"),
                        format!(
                            "dimension mismatch: {} columns, source `{}` has dim {src}",
                            row.len(),
                            d.source
                        ),
                    );
                }
            }
            if d.offset.len() != dst {
                return fail(
                    format!("{path}.b"),
                    format!(
                        "dimension mismatch: length {}, target dim {dst}",
                        d.offset.len()
                    ),
                );
            }
        }
        let mut tiled = BTreeSet::new();
        for (k, t) in self.tilings.iter().enumerate() {
            let path = format!("$.tilings[{k}]");
            let dim = dim_of(&t.space, &format!("{path}.space"))?;
            if !tiled.insert(t.space.as_str()) {
                return fail(
                    path,
                    format!("more than one tiling for space `{}`", t.space),
                );
            }
            if t.normals.is_empty() {
                return fail(format!("{path}.normals"), "at least one normal is required");
            }
            if t.normals.len() > dim {
                return fail(
                    format!("{path}.normals"),
                    format!("{} normals exceed dim {dim}", t.normals.len()),
                );
            }
            if t.sizes.len() != t.normals.len() {
                return fail(
                    format!("{path}.sizes"),
                    format!("{} sizes for {} normals", t.sizes.len(), t.normals.len()),
                );
            }
            for (j, n) in t.normals.iter().enumerate() {
                if n.len() != dim {
                    return fail(
                        format!("{path}.normals[{j}]"),
                        format!("dimension mismatch: length {}, space dim {dim}", n.len()),
                    );
                }
            }
            for (j, &s) in t.sizes.iter().enumerate() {
                if s <= 0 {
                    return fail(format!("{path}.sizes[{j}]"), "tile sizes must be positive");
                }
            }
            if rank(&t.normal_matrix()) < t.normals.len() {
                return fail(format!("{path}.normals"), "dependent normals");
            }
        }
        for (name, bounds) in &self.domain_bounds {
            let path = format!("$.domainBounds.{name}");
            let dim = dim_of(name, &path)?;
            if bounds.len() != dim {
                return fail(
                    path,
                    format!(
                        "dimension mismatch: {} bounds, space dim {dim}",
                        bounds.len()
                    ),
                );
            }
        }
        Ok(())
    }
}
