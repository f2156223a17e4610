//! Integer sets over `Z^d`.
//!
//! An [`ISet`] is a finite union of [`Cell`]s; a cell is a conjunction of
//! affine inequalities, affine equalities and divisibility constraints. All
//! operations are exact on integer points. Cells of a set may overlap; the
//! set is their union.
//!
//! Set difference distributes negated constraints and may multiply the number
//! of cells by the number of constraints of the subtrahend; at the scale this
//! crate targets (tiles of a few hundred points, a handful of consumer
//! families) that is cheap.

mod elim;

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use elim::Budget;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("integer overflow in constraint arithmetic")]
    Overflow,
    #[error("emptiness undecided: elimination exceeded its cell budget")]
    Undecided,
    #[error("set is unbounded along dimension {0}")]
    Unbounded(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstraintKind {
    /// `coeffs . x + constant >= 0`
    Ineq,
    /// `coeffs . x + constant = 0`
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AffineConstraint {
    pub coeffs: Vec<i64>,
    pub constant: i64,
    pub kind: ConstraintKind,
}

impl AffineConstraint {
    pub fn eval(&self, x: &[i64]) -> i128 {
        affine_value(&self.coeffs, self.constant, x)
    }

    pub fn holds(&self, x: &[i64]) -> bool {
        match self.kind {
            ConstraintKind::Ineq => self.eval(x) >= 0,
            ConstraintKind::Eq => self.eval(x) == 0,
        }
    }
}

/// `modulus | coeffs . x + constant`
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DivisibilityConstraint {
    pub coeffs: Vec<i64>,
    pub constant: i64,
    pub modulus: i64,
}

impl DivisibilityConstraint {
    pub fn holds(&self, x: &[i64]) -> bool {
        affine_value(&self.coeffs, self.constant, x).rem_euclid(self.modulus as i128) == 0
    }
}

fn affine_value(coeffs: &[i64], constant: i64, x: &[i64]) -> i128 {
    coeffs
        .iter()
        .zip(x)
        .fold(constant as i128, |acc, (&a, &v)| {
            acc + a as i128 * v as i128
        })
}

fn gcd_all(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    dim: usize,
    ineqs: Vec<AffineConstraint>,
    divs: Vec<DivisibilityConstraint>,
}

impl Cell {
    pub fn universe(dim: usize) -> Self {
        Cell {
            dim,
            ineqs: Vec::new(),
            divs: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constraints(&self) -> &[AffineConstraint] {
        &self.ineqs
    }

    pub fn divisibility(&self) -> &[DivisibilityConstraint] {
        &self.divs
    }

    /// Adds `coeffs . x + constant >= 0`.
    pub fn ge(mut self, coeffs: &[i64], constant: i64) -> Self {
        assert_eq!(coeffs.len(), self.dim);
        self.ineqs.push(AffineConstraint {
            coeffs: coeffs.to_vec(),
            constant,
            kind: ConstraintKind::Ineq,
        });
        self
    }

    /// Adds `coeffs . x + constant = 0`.
    pub fn eq(mut self, coeffs: &[i64], constant: i64) -> Self {
        assert_eq!(coeffs.len(), self.dim);
        self.ineqs.push(AffineConstraint {
            coeffs: coeffs.to_vec(),
            constant,
            kind: ConstraintKind::Eq,
        });
        self
    }

    /// Adds `modulus | coeffs . x + constant`.
    pub fn divisible(mut self, coeffs: &[i64], constant: i64, modulus: i64) -> Self {
        assert_eq!(coeffs.len(), self.dim);
        assert!(modulus > 0);
        self.divs.push(DivisibilityConstraint {
            coeffs: coeffs.to_vec(),
            constant,
            modulus,
        });
        self
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.ineqs.iter().all(|c| c.holds(x)) && self.divs.iter().all(|d| d.holds(x))
    }

    fn conjoin(&self, other: &Cell) -> Cell {
        let mut out = self.clone();
        out.ineqs.extend(other.ineqs.iter().cloned());
        out.divs.extend(other.divs.iter().cloned());
        out
    }

    /// Canonical form: gcd-reduced constraints, syntactically dominated
    /// inequalities dropped, opposite inequality pairs folded into
    /// equalities, constraints sorted. Returns `None` when a constraint is
    /// trivially unsatisfiable.
    pub(crate) fn normalized(self) -> Option<Cell> {
        let dim = self.dim;
        let mut eqs: BTreeMap<Vec<i64>, i64> = BTreeMap::new();
        let mut lows: BTreeMap<Vec<i64>, i64> = BTreeMap::new();
        let mut divs: Vec<DivisibilityConstraint> = Vec::new();

        let add_eq = |eqs: &mut BTreeMap<Vec<i64>, i64>, mut coeffs: Vec<i64>, mut c: i64| {
            let g = gcd_all(&coeffs);
            if g == 0 {
                return c == 0;
            }
            if c % g != 0 {
                return false;
            }
            let lead_neg = coeffs.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0);
            let s = if lead_neg { -g } else { g };
            coeffs.iter_mut().for_each(|x| *x /= s);
            c /= s;
            match eqs.get(&coeffs) {
                Some(&old) => old == c,
                None => {
                    eqs.insert(coeffs, c);
                    true
                }
            }
        };

        for c in self.ineqs {
            match c.kind {
                ConstraintKind::Eq => {
                    if !add_eq(&mut eqs, c.coeffs, c.constant) {
                        return None;
                    }
                }
                ConstraintKind::Ineq => {
                    let g = gcd_all(&c.coeffs);
                    if g == 0 {
                        if c.constant < 0 {
                            return None;
                        }
                        continue;
                    }
                    let coeffs: Vec<i64> = c.coeffs.iter().map(|x| x / g).collect();
                    let k = c.constant.div_euclid(g);
                    lows.entry(coeffs)
                        .and_modify(|old| *old = (*old).min(k))
                        .or_insert(k);
                }
            }
        }

        for d in self.divs {
            let m = d.modulus;
            let coeffs: Vec<i64> = d.coeffs.iter().map(|x| x.rem_euclid(m)).collect();
            let c = d.constant.rem_euclid(m);
            let g = coeffs.iter().fold(m, |g, &x| g.gcd(&x));
            if coeffs.iter().all(|&x| x == 0) {
                if c != 0 {
                    return None;
                }
                continue;
            }
            if c % g != 0 {
                return None;
            }
            let m = m / g;
            if m == 1 {
                continue;
            }
            divs.push(DivisibilityConstraint {
                coeffs: coeffs.iter().map(|x| x / g).collect(),
                constant: c / g,
                modulus: m,
            });
        }

        // fold opposite inequality pairs
        let keys: Vec<Vec<i64>> = lows.keys().cloned().collect();
        for k in keys {
            let Some(&c1) = lows.get(&k) else { continue };
            let neg: Vec<i64> = k.iter().map(|x| -x).collect();
            if let Some(&c2) = lows.get(&neg) {
                if c1 + c2 < 0 {
                    return None;
                }
                if c1 + c2 == 0 {
                    lows.remove(&k);
                    lows.remove(&neg);
                    if !add_eq(&mut eqs, k, c1) {
                        return None;
                    }
                }
            }
        }

        // inequalities parallel to an equality are either implied or violated
        let mut ineqs = Vec::new();
        for (coeffs, c) in lows {
            let neg: Vec<i64> = coeffs.iter().map(|x| -x).collect();
            if let Some(&e) = eqs.get(&coeffs) {
                // coeffs.x = -e, so the inequality reads c - e >= 0
                if c - e < 0 {
                    return None;
                }
                continue;
            }
            if let Some(&e) = eqs.get(&neg) {
                // coeffs.x = e
                if c + e < 0 {
                    return None;
                }
                continue;
            }
            ineqs.push(AffineConstraint {
                coeffs,
                constant: c,
                kind: ConstraintKind::Ineq,
            });
        }
        for (coeffs, constant) in eqs {
            ineqs.push(AffineConstraint {
                coeffs,
                constant,
                kind: ConstraintKind::Eq,
            });
        }
        ineqs.sort();
        divs.sort();
        divs.dedup();
        Some(Cell { dim, ineqs, divs })
    }

    fn translate(&self, v: &[i64]) -> Result<Cell, SetError> {
        let shift = |coeffs: &[i64], constant: i64| -> Result<i64, SetError> {
            // c.(x - v) + k = c.x + (k - c.v)
            let cv = affine_value(coeffs, 0, v);
            i64::try_from(constant as i128 - cv).map_err(|_| SetError::Overflow)
        };
        let mut out = self.clone();
        for c in &mut out.ineqs {
            c.constant = shift(&c.coeffs, c.constant)?;
        }
        for d in &mut out.divs {
            d.constant = shift(&d.coeffs, d.constant)?;
        }
        Ok(out)
    }

    /// Negations of the constraints of this cell, in order. Each entry is
    /// the constraint as a single-constraint cell followed by the disjoint
    /// pieces of its complement.
    /// Drops inequalities and divisibility constraints implied by the rest of
    /// the cell; `None` if the cell has no integer point.
    fn without_redundancy(&self, budget: &mut Budget) -> Result<Option<Cell>, SetError> {
        if !elim::is_feasible(self, budget)? {
            return Ok(None);
        }
        let mut cell = self.clone();
        let mut k = 0;
        while k < cell.ineqs.len() {
            if cell.ineqs[k].kind == ConstraintKind::Ineq {
                let mut rest = cell.clone();
                let c = rest.ineqs.remove(k);
                let neg: Vec<i64> = c.coeffs.iter().map(|x| -x).collect();
                if !elim::is_feasible(&rest.clone().ge(&neg, -c.constant - 1), budget)? {
                    cell = rest;
                    continue;
                }
            }
            k += 1;
        }
        let mut k = 0;
        while k < cell.divs.len() {
            let mut rest = cell.clone();
            let d = rest.divs.remove(k);
            let mut implied = true;
            for r in 1..d.modulus {
                if elim::is_feasible(
                    &rest.clone().divisible(&d.coeffs, d.constant - r, d.modulus),
                    budget,
                )? {
                    implied = false;
                    break;
                }
            }
            if implied {
                cell = rest;
            } else {
                k += 1;
            }
        }
        Ok(cell.normalized())
    }

    fn split_constraints(&self) -> Vec<(Cell, Vec<Cell>)> {
        let mut out = Vec::new();
        let dim = self.dim;
        let ge_pair = |coeffs: &[i64], c: i64| {
            let keep = Cell::universe(dim).ge(coeffs, c);
            let neg: Vec<i64> = coeffs.iter().map(|x| -x).collect();
            let not = Cell::universe(dim).ge(&neg, -c - 1);
            (keep, vec![not])
        };
        for c in &self.ineqs {
            match c.kind {
                ConstraintKind::Ineq => out.push(ge_pair(&c.coeffs, c.constant)),
                ConstraintKind::Eq => {
                    out.push(ge_pair(&c.coeffs, c.constant));
                    let neg: Vec<i64> = c.coeffs.iter().map(|x| -x).collect();
                    out.push(ge_pair(&neg, -c.constant));
                }
            }
        }
        for d in &self.divs {
            let keep = Cell::universe(dim).divisible(&d.coeffs, d.constant, d.modulus);
            let nots = (1..d.modulus)
                .map(|r| Cell::universe(dim).divisible(&d.coeffs, d.constant - r, d.modulus))
                .collect();
            out.push((keep, nots));
        }
        out
    }
}

fn var_name(k: usize, dim: usize) -> String {
    const SHORT: [&str; 3] = ["i", "j", "k"];
    if dim <= 3 {
        SHORT[k].to_string()
    } else {
        format!("x{k}")
    }
}

fn fmt_affine(coeffs: &[i64], constant: i64) -> String {
    let dim = coeffs.len();
    let mut s = String::new();
    for (k, &a) in coeffs.iter().enumerate() {
        if a == 0 {
            continue;
        }
        let name = var_name(k, dim);
        let mag = a.abs();
        let term = if mag == 1 {
            name
        } else {
            format!("{mag}{name}")
        };
        if s.is_empty() {
            s = if a < 0 { format!("-{term}") } else { term };
        } else {
            s.push_str(if a < 0 { " - " } else { " + " });
            s.push_str(&term);
        }
    }
    if s.is_empty() {
        return constant.to_string();
    }
    if constant != 0 {
        s.push_str(if constant < 0 { " - " } else { " + " });
        s.push_str(&constant.abs().to_string());
    }
    s
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for c in &self.ineqs {
            let op = match c.kind {
                ConstraintKind::Ineq => ">=",
                ConstraintKind::Eq => "=",
            };
            parts.push(format!("{} {op} 0", fmt_affine(&c.coeffs, c.constant)));
        }
        for d in &self.divs {
            parts.push(format!(
                "{} | {}",
                d.modulus,
                fmt_affine(&d.coeffs, d.constant)
            ));
        }
        if parts.is_empty() {
            write!(f, "true")
        } else {
            write!(f, "{}", parts.join(" and "))
        }
    }
}

/// Finite union of cells in a fixed dimension.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ISet {
    dim: usize,
    cells: Vec<Cell>,
}

impl ISet {
    pub fn empty(dim: usize) -> Self {
        ISet {
            dim,
            cells: Vec::new(),
        }
    }

    pub fn universe(dim: usize) -> Self {
        ISet::from_cell(Cell::universe(dim))
    }

    pub fn from_cell(cell: Cell) -> Self {
        ISet::from_cells(cell.dim, vec![cell])
    }

    /// Builds a set from cells, normalizing them and dropping trivially
    /// infeasible ones. Panics if a cell has the wrong dimension.
    pub fn from_cells(dim: usize, cells: Vec<Cell>) -> Self {
        assert!(
            cells.iter().all(|c| c.dim == dim),
            "cell dimension mismatch"
        );
        let mut out: Vec<Cell> = cells.into_iter().filter_map(Cell::normalized).collect();
        out.sort();
        out.dedup();
        ISet { dim, cells: out }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    fn check_dim(&self, other: &ISet) -> Result<(), SetError> {
        if self.dim != other.dim {
            return Err(SetError::DimensionMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        x.len() == self.dim && self.cells.iter().any(|c| c.contains(x))
    }

    /// Drops cells with no integer point.
    fn pruned(self, budget: &mut Budget) -> Result<ISet, SetError> {
        let mut cells = Vec::with_capacity(self.cells.len());
        for c in self.cells {
            if elim::is_feasible(&c, budget)? {
                cells.push(c);
            }
        }
        Ok(ISet {
            dim: self.dim,
            cells,
        })
    }

    /// Same set with fewer constraints and cells: constraints implied by the
    /// rest of their cell are dropped, as are cells contained in another
    /// cell.
    pub fn coalesce(&self) -> Result<ISet, SetError> {
        let mut budget = Budget::new();
        let mut cells = Vec::with_capacity(self.cells.len());
        for c in &self.cells {
            if let Some(c) = c.without_redundancy(&mut budget)? {
                cells.push(c);
            }
        }
        cells.sort();
        cells.dedup();
        let mut keep = vec![true; cells.len()];
        for a in 0..cells.len() {
            for b in 0..cells.len() {
                if a != b && keep[b] && cell_minus(&cells[a], &cells[b], &mut budget)?.is_empty() {
                    keep[a] = false;
                    break;
                }
            }
        }
        let cells = cells
            .into_iter()
            .zip(keep)
            .filter(|(_, k)| *k)
            .map(|(c, _)| c)
            .collect();
        Ok(ISet::from_cells(self.dim, cells))
    }

    pub fn union(&self, other: &ISet) -> Result<ISet, SetError> {
        self.check_dim(other)?;
        let mut cells = self.cells.clone();
        cells.extend(other.cells.iter().cloned());
        Ok(ISet::from_cells(self.dim, cells))
    }

    pub fn intersect(&self, other: &ISet) -> Result<ISet, SetError> {
        self.check_dim(other)?;
        let mut cells = Vec::new();
        for a in &self.cells {
            for b in &other.cells {
                cells.push(a.conjoin(b));
            }
        }
        ISet::from_cells(self.dim, cells).pruned(&mut Budget::new())
    }

    pub fn subtract(&self, other: &ISet) -> Result<ISet, SetError> {
        self.check_dim(other)?;
        let mut budget = Budget::new();
        let mut result = Vec::new();
        for a in &self.cells {
            let mut pieces = vec![a.clone()];
            for b in &other.cells {
                let mut next = Vec::new();
                for p in &pieces {
                    next.extend(cell_minus(p, b, &mut budget)?);
                }
                pieces = next;
                if pieces.is_empty() {
                    break;
                }
            }
            result.extend(pieces);
        }
        Ok(ISet::from_cells(self.dim, result))
    }

    /// `{ x + v : x in self }`
    pub fn translate(&self, v: &[i64]) -> Result<ISet, SetError> {
        if v.len() != self.dim {
            return Err(SetError::DimensionMismatch(self.dim, v.len()));
        }
        let cells = self
            .cells
            .iter()
            .map(|c| c.translate(v))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ISet::from_cells(self.dim, cells))
    }

    /// Exact image `{ M x + b : x in self }` of the integer points.
    pub fn image(&self, matrix: &[Vec<i64>], offset: &[i64]) -> Result<ISet, SetError> {
        let out_dim = matrix.len();
        if offset.len() != out_dim {
            return Err(SetError::DimensionMismatch(out_dim, offset.len()));
        }
        if let Some(row) = matrix.iter().find(|r| r.len() != self.dim) {
            return Err(SetError::DimensionMismatch(self.dim, row.len()));
        }
        let n = self.dim;
        let mut budget = Budget::new();
        let mut cells = Vec::new();
        for cell in &self.cells {
            // variables: x (n of them) followed by y (out_dim)
            let lift = |coeffs: &[i64]| {
                let mut v = coeffs.to_vec();
                v.extend(std::iter::repeat_n(0, out_dim));
                v
            };
            let mut joint = Cell::universe(n + out_dim);
            for c in &cell.ineqs {
                joint.ineqs.push(AffineConstraint {
                    coeffs: lift(&c.coeffs),
                    constant: c.constant,
                    kind: c.kind,
                });
            }
            for d in &cell.divs {
                joint.divs.push(DivisibilityConstraint {
                    coeffs: lift(&d.coeffs),
                    constant: d.constant,
                    modulus: d.modulus,
                });
            }
            for (r, row) in matrix.iter().enumerate() {
                // y_r - row.x - b_r = 0
                let mut coeffs: Vec<i64> = row.iter().map(|a| -a).collect();
                coeffs.extend((0..out_dim).map(|k| i64::from(k == r)));
                joint.ineqs.push(AffineConstraint {
                    coeffs,
                    constant: -offset[r],
                    kind: ConstraintKind::Eq,
                });
            }
            let Some(joint) = joint.normalized() else {
                continue;
            };
            let xs: Vec<usize> = (0..n).collect();
            cells.extend(elim::project_out(&joint, &xs, &mut budget)?);
        }
        ISet::from_cells(out_dim, cells).pruned(&mut budget)
    }

    /// Keeps the listed coordinates (in the given order), projecting the
    /// others away.
    pub fn project_onto(&self, keep: &[usize]) -> Result<ISet, SetError> {
        let dim = self.dim;
        let matrix: Vec<Vec<i64>> = keep
            .iter()
            .map(|&k| (0..dim).map(|j| i64::from(j == k)).collect())
            .collect();
        self.image(&matrix, &vec![0; keep.len()])
    }

    pub fn is_empty(&self) -> Result<bool, SetError> {
        let mut budget = Budget::new();
        for c in &self.cells {
            if elim::is_feasible(c, &mut budget)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_subset(&self, other: &ISet) -> Result<bool, SetError> {
        self.subtract(other)?.is_empty()
    }

    pub fn equal(&self, other: &ISet) -> Result<bool, SetError> {
        self.check_dim(other)?;
        Ok(self.is_subset(other)? && other.is_subset(self)?)
    }

    /// Integer points inside the closed box, in lexicographic order.
    pub fn enumerate(&self, bounds: &[(i64, i64)]) -> Vec<Vec<i64>> {
        assert_eq!(bounds.len(), self.dim, "box dimension mismatch");
        let mut out = Vec::new();
        if self.cells.is_empty() || bounds.iter().any(|(lo, hi)| lo > hi) {
            return out;
        }
        let mut p: Vec<i64> = bounds.iter().map(|b| b.0).collect();
        loop {
            if self.contains(&p) {
                out.push(p.clone());
            }
            // odometer, last coordinate fastest
            let mut k = self.dim;
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                if p[k] < bounds[k].1 {
                    p[k] += 1;
                    break;
                }
                p[k] = bounds[k].0;
            }
            if self.dim == 0 {
                return out;
            }
        }
    }

    /// Tight integer bounding box, `None` for the empty set.
    pub fn bounding_box(&self) -> Result<Option<Vec<(i64, i64)>>, SetError> {
        if self.is_empty()? {
            return Ok(None);
        }
        let mut bounds = Vec::with_capacity(self.dim);
        for k in 0..self.dim {
            let line = self.project_onto(&[k])?;
            let mut lo: Option<i64> = None;
            let mut hi: Option<i64> = None;
            for cell in &line.cells {
                let (clo, chi) = line_bounds(cell).ok_or(SetError::Unbounded(k))?;
                lo = Some(lo.map_or(clo, |v| v.min(clo)));
                hi = Some(hi.map_or(chi, |v| v.max(chi)));
            }
            bounds.push((lo.unwrap(), hi.unwrap()));
        }
        Ok(Some(bounds))
    }

    /// All integer points, in lexicographic order. Errors on unbounded sets.
    pub fn points(&self) -> Result<Vec<Vec<i64>>, SetError> {
        match self.bounding_box()? {
            None => Ok(Vec::new()),
            Some(b) => Ok(self.enumerate(&b)),
        }
    }

    /// Lexicographically smallest point.
    pub fn lexmin(&self) -> Result<Option<Vec<i64>>, SetError> {
        if self.is_empty()? {
            return Ok(None);
        }
        let mut fixed: Vec<i64> = Vec::with_capacity(self.dim);
        let mut current = self.clone();
        for k in 0..self.dim {
            let line = current.project_onto(&[k])?;
            let mut best: Option<i64> = None;
            for cell in &line.cells {
                let (lo, hi) = line_bounds(cell).ok_or(SetError::Unbounded(k))?;
                if let Some(v) = (lo..=hi).find(|&v| cell.contains(&[v])) {
                    best = Some(best.map_or(v, |b| b.min(v)));
                }
            }
            let v = best.expect("non-empty projection has a point");
            fixed.push(v);
            let mut coeffs = vec![0; self.dim];
            coeffs[k] = 1;
            let pin = ISet::from_cell(Cell::universe(self.dim).eq(&coeffs, -v));
            current = current.intersect(&pin)?;
        }
        Ok(Some(fixed))
    }
}

/// Bounds of a normalized one-dimensional cell; `None` if unbounded.
fn line_bounds(cell: &Cell) -> Option<(i64, i64)> {
    let mut lo: Option<i64> = None;
    let mut hi: Option<i64> = None;
    for c in &cell.ineqs {
        let a = c.coeffs[0];
        let k = c.constant;
        match c.kind {
            ConstraintKind::Eq => {
                let v = -k / a;
                lo = Some(v);
                hi = Some(v);
            }
            ConstraintKind::Ineq if a > 0 => {
                // a x + k >= 0
                let v = Integer::div_ceil(&(-k), &a);
                lo = Some(lo.map_or(v, |o: i64| o.max(v)));
            }
            ConstraintKind::Ineq => {
                let v = Integer::div_floor(&k, &(-a));
                hi = Some(hi.map_or(v, |o: i64| o.min(v)));
            }
        }
    }
    Some((lo?, hi?))
}

fn cell_minus(a: &Cell, b: &Cell, budget: &mut Budget) -> Result<Vec<Cell>, SetError> {
    if !elim::is_feasible(&a.conjoin(b), budget)? {
        return Ok(vec![a.clone()]);
    }
    let mut pieces = Vec::new();
    let mut prefix = a.clone();
    for (keep, nots) in b.split_constraints() {
        let mut implied = true;
        for n in nots {
            let piece = prefix.conjoin(&n);
            if elim::is_feasible(&piece, budget)? {
                implied = false;
                pieces.extend(piece.normalized());
            }
        }
        if implied {
            // the prefix already satisfies this constraint
            continue;
        }
        prefix = prefix.conjoin(&keep);
        match prefix.clone().normalized() {
            Some(p) => prefix = p,
            None => break,
        }
    }
    Ok(pieces)
}

impl fmt::Display for ISet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars: Vec<String> = (0..self.dim).map(|k| var_name(k, self.dim)).collect();
        if self.cells.is_empty() {
            return write!(f, "{{ [{}] : false }}", vars.join(", "));
        }
        let cells: Vec<String> = self.cells.iter().map(|c| c.to_string()).collect();
        write!(f, "{{ [{}] : {} }}", vars.join(", "), cells.join(" or "))
    }
}

/// Wire form: `{"dim": d, "cells": [{"ineqs": [[c.., const, kind]], "divs": [[c.., const, mod]]}]}`
/// with `kind` 0 for `>= 0` and 1 for `= 0`.
#[derive(Serialize, Deserialize)]
struct CellRepr {
    ineqs: Vec<Vec<i64>>,
    divs: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
struct ISetRepr {
    dim: usize,
    cells: Vec<CellRepr>,
}

impl Serialize for ISet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let cells = self
            .cells
            .iter()
            .map(|c| CellRepr {
                ineqs: c
                    .ineqs
                    .iter()
                    .map(|a| {
                        let mut row = a.coeffs.clone();
                        row.push(a.constant);
                        row.push(match a.kind {
                            ConstraintKind::Ineq => 0,
                            ConstraintKind::Eq => 1,
                        });
                        row
                    })
                    .collect(),
                divs: c
                    .divs
                    .iter()
                    .map(|d| {
                        let mut row = d.coeffs.clone();
                        row.push(d.constant);
                        row.push(d.modulus);
                        row
                    })
                    .collect(),
            })
            .collect();
        ISetRepr {
            dim: self.dim,
            cells,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ISet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = ISetRepr::deserialize(deserializer)?;
        let dim = repr.dim;
        let mut cells = Vec::with_capacity(repr.cells.len());
        for c in repr.cells {
            let mut cell = Cell::universe(dim);
            for row in c.ineqs {
                if row.len() != dim + 2 {
                    return Err(D::Error::custom(format!(
                        "constraint row has {} entries, expected {}",
                        row.len(),
                        dim + 2
                    )));
                }
                let kind = match row[dim + 1] {
                    0 => ConstraintKind::Ineq,
                    1 => ConstraintKind::Eq,
                    other => {
                        return Err(D::Error::custom(format!("unknown constraint kind {other}")))
                    }
                };
                cell.ineqs.push(AffineConstraint {
                    coeffs: row[..dim].to_vec(),
                    constant: row[dim],
                    kind,
                });
            }
            for row in c.divs {
                if row.len() != dim + 2 || row[dim + 1] < 1 {
                    return Err(D::Error::custom("malformed divisibility row"));
                }
                cell.divs.push(DivisibilityConstraint {
                    coeffs: row[..dim].to_vec(),
                    constant: row[dim],
                    modulus: row[dim + 1],
                });
            }
            cells.push(cell);
        }
        Ok(ISet::from_cells(dim, cells))
    }
}

#[cfg(test)]
mod tests;
