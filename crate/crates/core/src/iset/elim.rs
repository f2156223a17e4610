//! Exact existential elimination over the integers.
//!
//! A variable `q` is removed from a conjunction in one of four ways:
//!
//! * it occurs in an equality `a*q + r = 0`: substitute `q = -r / a` and
//!   keep `a | r` as a divisibility constraint;
//! * it has no divisibility constraints and every lower (or every upper)
//!   bound has unit coefficient: plain Fourier-Motzkin, which is exact in
//!   that case;
//! * otherwise the least feasible `q` is `ceil(l_k / a_k) + kappa` for some
//!   lower bound `k` and some `kappa` below the period of the divisibility
//!   constraints on `q`; substituting each candidate gives a finite, exact
//!   disjunction (symmetrically for upper bounds);
//! * with no bounds at all, `q` ranges over one period of its residues.
//!
//! No rational relaxation is involved, so the result is exact for bounded
//! and unbounded cells alike.

use num_integer::Integer;

use super::{AffineConstraint, Cell, ConstraintKind, DivisibilityConstraint, SetError};

/// Caps the number of cells produced by one top-level operation.
pub(crate) struct Budget {
    remaining: usize,
}

impl Budget {
    pub(crate) fn new() -> Self {
        Budget {
            remaining: 2_000_000,
        }
    }

    fn spend(&mut self, n: usize) -> Result<(), SetError> {
        if n > self.remaining {
            return Err(SetError::Undecided);
        }
        self.remaining -= n;
        Ok(())
    }
}

fn narrow(v: i128) -> Result<i64, SetError> {
    i64::try_from(v).map_err(|_| SetError::Overflow)
}

/// `q := num / den` with `den >= 1`; `num` has a zero coefficient at `q`.
struct Substitution<'a> {
    q: usize,
    num: &'a [i128],
    num_const: i128,
    den: i128,
}

impl Substitution<'_> {
    fn apply(&self, coeffs: &[i64], constant: i64) -> Result<(Vec<i64>, i64), SetError> {
        let cq = coeffs[self.q] as i128;
        let mut out = Vec::with_capacity(coeffs.len() - 1);
        for (k, &c) in coeffs.iter().enumerate() {
            if k == self.q {
                continue;
            }
            out.push(if cq == 0 {
                c
            } else {
                narrow(cq * self.num[k] + self.den * c as i128)?
            });
        }
        let constant = if cq == 0 {
            constant
        } else {
            narrow(cq * self.num_const + self.den * constant as i128)?
        };
        Ok((out, constant))
    }

    fn run(&self, cell: &Cell) -> Result<Option<Cell>, SetError> {
        let mut out = Cell::universe(cell.dim - 1);
        for c in &cell.ineqs {
            let (coeffs, constant) = self.apply(&c.coeffs, c.constant)?;
            out.ineqs.push(AffineConstraint {
                coeffs,
                constant,
                kind: c.kind,
            });
        }
        for d in &cell.divs {
            let scaled = d.coeffs[self.q] != 0;
            let (coeffs, constant) = self.apply(&d.coeffs, d.constant)?;
            let modulus = if scaled {
                narrow(d.modulus as i128 * self.den)?
            } else {
                d.modulus
            };
            out.divs.push(DivisibilityConstraint {
                coeffs,
                constant,
                modulus,
            });
        }
        if self.den > 1 {
            let mut coeffs = Vec::with_capacity(cell.dim - 1);
            for (k, &v) in self.num.iter().enumerate() {
                if k != self.q {
                    coeffs.push(narrow(v)?);
                }
            }
            out.divs.push(DivisibilityConstraint {
                coeffs,
                constant: narrow(self.num_const)?,
                modulus: narrow(self.den)?,
            });
        }
        Ok(out.normalized())
    }
}

fn drop_column(cell: &Cell, q: usize) -> Cell {
    let strip = |v: &[i64]| {
        v.iter()
            .enumerate()
            .filter(|&(k, _)| k != q)
            .map(|(_, &x)| x)
            .collect::<Vec<_>>()
    };
    Cell {
        dim: cell.dim - 1,
        ineqs: cell
            .ineqs
            .iter()
            .map(|c| AffineConstraint {
                coeffs: strip(&c.coeffs),
                constant: c.constant,
                kind: c.kind,
            })
            .collect(),
        divs: cell
            .divs
            .iter()
            .map(|d| DivisibilityConstraint {
                coeffs: strip(&d.coeffs),
                constant: d.constant,
                modulus: d.modulus,
            })
            .collect(),
    }
}

#[derive(Debug)]
enum Plan {
    /// `q` is unconstrained (or bounded on one side only, without residues).
    Drop,
    Equality(usize),
    Fourier,
    LowerWitness(i64),
    UpperWitness(i64),
    Residues(i64),
}

fn plan(cell: &Cell, q: usize) -> (usize, Plan) {
    let eq = cell
        .ineqs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.kind == ConstraintKind::Eq && c.coeffs[q] != 0)
        .min_by_key(|(_, c)| c.coeffs[q].abs());
    if let Some((idx, c)) = eq {
        return (c.coeffs[q].unsigned_abs() as usize, Plan::Equality(idx));
    }
    let period = cell
        .divs
        .iter()
        .filter(|d| d.coeffs[q] != 0)
        .fold(1i64, |acc, d| {
            let step = d.modulus / d.coeffs[q].gcd(&d.modulus);
            acc.lcm(&step)
        });
    let has_divs = cell.divs.iter().any(|d| d.coeffs[q] != 0);
    let lowers: Vec<i64> = cell
        .ineqs
        .iter()
        .filter(|c| c.coeffs[q] > 0)
        .map(|c| c.coeffs[q])
        .collect();
    let uppers: Vec<i64> = cell
        .ineqs
        .iter()
        .filter(|c| c.coeffs[q] < 0)
        .map(|c| -c.coeffs[q])
        .collect();
    if lowers.is_empty() && uppers.is_empty() {
        return if has_divs {
            (period as usize, Plan::Residues(period))
        } else {
            (0, Plan::Drop)
        };
    }
    if !has_divs {
        if lowers.is_empty() || uppers.is_empty() {
            return (1, Plan::Drop);
        }
        if lowers.iter().all(|&a| a == 1) || uppers.iter().all(|&b| b == 1) {
            return (1 + lowers.len() * uppers.len() / 16, Plan::Fourier);
        }
    }
    let cost = |side: &[i64]| side.iter().map(|&a| a as usize).sum::<usize>() * period as usize;
    match (lowers.is_empty(), uppers.is_empty()) {
        (false, true) => (cost(&lowers), Plan::LowerWitness(period)),
        (true, false) => (cost(&uppers), Plan::UpperWitness(period)),
        _ if cost(&lowers) <= cost(&uppers) => (cost(&lowers), Plan::LowerWitness(period)),
        _ => (cost(&uppers), Plan::UpperWitness(period)),
    }
}

fn fourier(cell: &Cell, q: usize) -> Result<Option<Cell>, SetError> {
    let mut rest = Cell::universe(cell.dim);
    rest.divs = cell.divs.clone();
    let mut lowers = Vec::new();
    let mut uppers = Vec::new();
    for c in &cell.ineqs {
        match c.coeffs[q].signum() {
            0 => rest.ineqs.push(c.clone()),
            1 => lowers.push(c),
            _ => uppers.push(c),
        }
    }
    for l in &lowers {
        for u in &uppers {
            let a = l.coeffs[q] as i128;
            let b = -u.coeffs[q] as i128;
            let coeffs = l
                .coeffs
                .iter()
                .zip(&u.coeffs)
                .map(|(&x, &y)| narrow(b * x as i128 + a * y as i128))
                .collect::<Result<Vec<_>, _>>()?;
            let constant = narrow(b * l.constant as i128 + a * u.constant as i128)?;
            rest.ineqs.push(AffineConstraint {
                coeffs,
                constant,
                kind: ConstraintKind::Ineq,
            });
        }
    }
    Ok(drop_column(&rest, q).normalized())
}

/// Eliminates variable `q`, returning an exact disjunction over the other
/// variables. Every returned cell is normalized.
pub(crate) fn eliminate(cell: &Cell, q: usize, budget: &mut Budget) -> Result<Vec<Cell>, SetError> {
    let (_, plan) = plan(cell, q);
    let mut out = Vec::new();
    match plan {
        Plan::Drop => {
            let mut kept = cell.clone();
            kept.ineqs.retain(|c| c.coeffs[q] == 0);
            out.extend(drop_column(&kept, q).normalized());
        }
        Plan::Fourier => out.extend(fourier(cell, q)?),
        Plan::Equality(idx) => {
            let mut rest = cell.clone();
            let eq = rest.ineqs.remove(idx);
            let (a, sign) = if eq.coeffs[q] > 0 {
                (eq.coeffs[q] as i128, -1i128)
            } else {
                (-(eq.coeffs[q] as i128), 1i128)
            };
            // a*q + r = 0  =>  q = -r / a   (after making a positive)
            let num: Vec<i128> = eq
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| if k == q { 0 } else { sign * c as i128 })
                .collect();
            let sub = Substitution {
                q,
                num: &num,
                num_const: sign * eq.constant as i128,
                den: a,
            };
            out.extend(sub.run(&rest)?);
        }
        Plan::Residues(period) => {
            let zeros = vec![0i128; cell.dim];
            for k in 0..period {
                let sub = Substitution {
                    q,
                    num: &zeros,
                    num_const: k as i128,
                    den: 1,
                };
                out.extend(sub.run(cell)?);
            }
        }
        Plan::LowerWitness(period) | Plan::UpperWitness(period) => {
            let lower = matches!(plan, Plan::LowerWitness(_));
            for c in &cell.ineqs {
                let cq = c.coeffs[q];
                if (lower && cq <= 0) || (!lower && cq >= 0) {
                    continue;
                }
                let a = cq.abs() as i128;
                // lower: a*q + r >= 0, witness q = (-r + rho + a*kappa) / a
                // upper: -a*q + r >= 0, witness q = (r - rho - a*kappa) / a
                let sign: i128 = if lower { -1 } else { 1 };
                let base: Vec<i128> = c
                    .coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, &v)| if k == q { 0 } else { sign * v as i128 })
                    .collect();
                for rho in 0..a {
                    for kappa in 0..period as i128 {
                        let shift = -sign * (rho + a * kappa);
                        let sub = Substitution {
                            q,
                            num: &base,
                            num_const: sign * c.constant as i128 + shift,
                            den: a,
                        };
                        out.extend(sub.run(cell)?);
                    }
                }
            }
        }
    }
    budget.spend(out.len() + 1)?;
    Ok(out)
}

fn best_var(cell: &Cell, vars: &[usize]) -> usize {
    vars.iter()
        .copied()
        .min_by_key(|&q| (plan(cell, q).0, q))
        .expect("no variable to eliminate")
}

/// Eliminates the variables at the given positions, keeping the others in
/// order.
pub(crate) fn project_out(
    cell: &Cell,
    vars: &[usize],
    budget: &mut Budget,
) -> Result<Vec<Cell>, SetError> {
    let mut done = Vec::new();
    let mut stack = vec![(cell.clone(), vars.to_vec())];
    while let Some((c, remaining)) = stack.pop() {
        if remaining.is_empty() {
            done.push(c);
            continue;
        }
        let q = best_var(&c, &remaining);
        let rest: Vec<usize> = remaining
            .iter()
            .filter(|&&v| v != q)
            .map(|&v| if v > q { v - 1 } else { v })
            .collect();
        for next in eliminate(&c, q, budget)? {
            stack.push((next, rest.clone()));
        }
    }
    Ok(done)
}

/// Integer feasibility of a single cell.
pub(crate) fn is_feasible(cell: &Cell, budget: &mut Budget) -> Result<bool, SetError> {
    let Some(start) = cell.clone().normalized() else {
        return Ok(false);
    };
    let mut stack = vec![start];
    while let Some(c) = stack.pop() {
        if c.dim == 0 {
            // normalization has already evaluated every constant constraint
            return Ok(true);
        }
        let vars: Vec<usize> = (0..c.dim).collect();
        let q = best_var(&c, &vars);
        stack.extend(eliminate(&c, q, budget)?);
    }
    Ok(false)
}
