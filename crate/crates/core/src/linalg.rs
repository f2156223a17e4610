//! Exact rational linear algebra.
//!
//! Everything here works over arbitrary-precision rationals. Bases are kept
//! orthogonal but never normalized, so no irrational numbers appear; the
//! scaling is folded into Gram-matrix solves instead.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn rat(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Renders a rational as `n` or `n/d`.
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Converts an integral rational to `i64`, if it is one and it fits.
pub fn to_i64(r: &Rational) -> Option<i64> {
    if r.is_integer() {
        r.numer().to_i64()
    } else {
        None
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatVector(pub Vec<Rational>);

impl RatVector {
    pub fn zeros(dim: usize) -> Self {
        RatVector(vec![Rational::zero(); dim])
    }

    pub fn from_ints(v: &[i64]) -> Self {
        RatVector(v.iter().map(|&x| rat(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn dot(&self, other: &RatVector) -> Rational {
        assert_eq!(self.dim(), other.dim(), "dot product of mismatched vectors");
        self.0
            .iter()
            .zip(&other.0)
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn scale(&self, k: &Rational) -> RatVector {
        RatVector(self.0.iter().map(|x| x * k).collect())
    }

    pub fn add(&self, other: &RatVector) -> RatVector {
        RatVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &RatVector) -> RatVector {
        RatVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Integer entries, when every component is integral and fits in `i64`.
    pub fn to_ints(&self) -> Option<Vec<i64>> {
        self.0.iter().map(to_i64).collect()
    }

    /// Componentwise fractional part, each entry in `[0, 1)`.
    pub fn fract(&self) -> RatVector {
        RatVector(self.0.iter().map(|x| x - x.floor()).collect())
    }
}

impl fmt::Debug for RatVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(fmt_rational).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl fmt::Display for RatVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Builds a matrix from integer rows. All rows must have `cols` entries.
    pub fn from_int_rows(rows: &[Vec<i64>], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged integer matrix");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, rat(v));
            }
        }
        m
    }

    pub fn from_rows(rows: &[RatVector], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.dim(), cols, "ragged rational matrix");
            for (j, v) in row.0.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[RatVector], rows: usize) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.dim(), rows);
            for (i, v) in col.0.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> RatVector {
        RatVector(self.entries[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn column(&self, j: usize) -> RatVector {
        RatVector((0..self.rows).map(|i| self.get(i, j).clone()).collect())
    }

    pub fn mul_vec(&self, v: &RatVector) -> RatVector {
        assert_eq!(self.cols, v.dim(), "matrix-vector dimension mismatch");
        RatVector((0..self.rows).map(|i| self.row(i).dot(v)).collect())
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = RatMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Rational::zero();
                for k in 0..self.cols {
                    acc += self.get(i, k) * other.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut out = RatMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    /// Least common multiple of all entry denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.entries
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }

    /// Integer rows of `scale * self`, when they are integral.
    fn scaled_integer_rows(&self) -> Vec<Vec<BigInt>> {
        let scale = Rational::from_integer(self.denominator_lcm());
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| (self.get(i, j) * &scale).to_integer())
                    .collect()
            })
            .collect()
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| format!("{:?}", self.row(i)))
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

/// Basis of a linear subspace of `Q^ambient_dim`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceBasis {
    ambient_dim: usize,
    vectors: Vec<RatVector>,
}

impl SubspaceBasis {
    /// Wraps independent vectors; panics if they are not independent.
    pub fn new(ambient_dim: usize, vectors: Vec<RatVector>) -> Self {
        assert!(vectors.iter().all(|v| v.dim() == ambient_dim));
        assert_eq!(
            rank(&RatMatrix::from_rows(&vectors, ambient_dim)),
            vectors.len(),
            "basis vectors must be linearly independent"
        );
        SubspaceBasis {
            ambient_dim,
            vectors,
        }
    }

    pub fn empty(ambient_dim: usize) -> Self {
        SubspaceBasis {
            ambient_dim,
            vectors: Vec::new(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[RatVector] {
        &self.vectors
    }

    pub fn as_rows(&self) -> RatMatrix {
        RatMatrix::from_rows(&self.vectors, self.ambient_dim)
    }

    /// Whether `v` lies in the span.
    pub fn contains(&self, v: &RatVector) -> bool {
        let mut rows = self.vectors.clone();
        rows.push(v.clone());
        rank(&RatMatrix::from_rows(&rows, self.ambient_dim)) == self.dim()
    }

    /// Whether both bases span the same subspace.
    pub fn same_span(&self, other: &SubspaceBasis) -> bool {
        self.ambient_dim == other.ambient_dim
            && self.dim() == other.dim()
            && other.vectors.iter().all(|v| self.contains(v))
    }
}

/// Fraction-free (Bareiss) forward elimination on integer rows.
///
/// Returns the echelon rows and the pivot column of each nonzero row.
fn bareiss_echelon(mut rows: Vec<Vec<BigInt>>, cols: usize) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        for i in r + 1..rows.len() {
            for j in c + 1..cols {
                let v = &rows[r][c] * &rows[i][j] - &rows[i][c] * &rows[r][j];
                rows[i][j] = v / &prev;
            }
            rows[i][c] = BigInt::zero();
        }
        prev = rows[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

pub fn rank(a: &RatMatrix) -> usize {
    if a.rows() == 0 || a.cols() == 0 {
        return 0;
    }
    bareiss_echelon(a.scaled_integer_rows(), a.cols()).1.len()
}

/// Basis of `{x : Ax = 0}`, one vector per free column.
pub fn kernel_basis(a: &RatMatrix) -> SubspaceBasis {
    let cols = a.cols();
    if a.rows() == 0 {
        let vectors = (0..cols)
            .map(|j| {
                let mut v = RatVector::zeros(cols);
                v.0[j] = Rational::one();
                v
            })
            .collect();
        return SubspaceBasis {
            ambient_dim: cols,
            vectors,
        };
    }
    let (echelon, pivots) = bareiss_echelon(a.scaled_integer_rows(), cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut vectors = Vec::with_capacity(free.len());
    for &f in &free {
        let mut x = RatVector::zeros(cols);
        x.0[f] = Rational::one();
        // back-substitute pivot variables, bottom row first
        for (r, &pc) in pivots.iter().enumerate().rev() {
            let mut acc = Rational::zero();
            for (e, xj) in echelon[r].iter().zip(&x.0).skip(pc + 1) {
                if !e.is_zero() {
                    acc += Rational::from_integer(e.clone()) * xj;
                }
            }
            x.0[pc] = -acc / Rational::from_integer(echelon[r][pc].clone());
        }
        vectors.push(normalize_direction(x));
    }
    SubspaceBasis {
        ambient_dim: cols,
        vectors,
    }
}

/// Scales a direction vector to primitive integer form with a positive
/// leading entry. Spans are unaffected.
fn normalize_direction(v: RatVector) -> RatVector {
    let den = v.0.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> =
        v.0.iter()
            .map(|x| (x * Rational::from_integer(den.clone())).to_integer())
            .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v;
    }
    let sign = match ints.iter().find(|x| !x.is_zero()) {
        Some(lead) if lead.is_negative() => -BigInt::one(),
        _ => BigInt::one(),
    };
    RatVector(
        ints.into_iter()
            .map(|x| Rational::from_integer(x / &g * &sign))
            .collect(),
    )
}

/// Orthogonal complement of `span(k)`.
pub fn supplementary_basis(k: &SubspaceBasis) -> SubspaceBasis {
    if k.dim() == 0 {
        return kernel_basis(&RatMatrix::zeros(0, k.ambient_dim()));
    }
    kernel_basis(&k.as_rows())
}

/// Solves `M x = rhs` for square nonsingular `M`. Returns `None` if singular.
pub fn solve(m: &RatMatrix, rhs: &RatVector) -> Option<RatVector> {
    let n = m.rows();
    assert_eq!(n, m.cols(), "solve needs a square matrix");
    assert_eq!(n, rhs.dim());
    let mut a: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut row = m.row(i).0;
            row.push(rhs.0[i].clone());
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        let pivot = a[c][c].clone();
        for v in a[c].iter_mut() {
            *v /= &pivot;
        }
        let pivot_row = a[c].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != c && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, p) in row.iter_mut().zip(&pivot_row).skip(c) {
                    *v -= &f * p;
                }
            }
        }
    }
    Some(RatVector(a.into_iter().map(|row| row[n].clone()).collect()))
}

/// Inverse of a square matrix, or `None` if singular.
pub fn inverse(m: &RatMatrix) -> Option<RatMatrix> {
    let n = m.rows();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = RatVector::zeros(n);
        e.0[j] = Rational::one();
        cols.push(solve(m, &e)?);
    }
    Some(RatMatrix::from_columns(&cols, n))
}

/// Orthogonal projection of `v` onto `span(s)`, via the Gram system
/// `(S S^T) c = S v`, `p = S^T c`.
pub fn project_onto(s: &SubspaceBasis, v: &RatVector) -> RatVector {
    assert_eq!(s.ambient_dim(), v.dim(), "projection dimension mismatch");
    if s.dim() == 0 {
        return RatVector::zeros(v.dim());
    }
    let rows = s.as_rows();
    let gram = rows.mul(&rows.transpose());
    let rhs = rows.mul_vec(v);
    let c = solve(&gram, &rhs).expect("Gram matrix of an independent family is nonsingular");
    rows.transpose().mul_vec(&c)
}

/// Unimodular column reduction of an integer matrix.
///
/// Returns `(h, u, r)` where `u` is unimodular (`t x t`), `x * u = h`, the
/// first `r` columns of `h` are linearly independent (lower echelon), and the
/// remaining columns are zero. Entries of `x` must be integers.
pub fn column_echelon(x: &[Vec<i64>], t: usize) -> (Vec<Vec<i64>>, Vec<Vec<i64>>, usize) {
    let m = x.len();
    let mut h: Vec<Vec<i128>> = x
        .iter()
        .map(|row| row.iter().map(|&v| v as i128).collect())
        .collect();
    let mut u: Vec<Vec<i128>> = (0..t)
        .map(|i| (0..t).map(|j| i128::from(i == j)).collect())
        .collect();
    let col_op = |mat: &mut Vec<Vec<i128>>, dst: usize, src: usize, q: i128| {
        for row in mat.iter_mut() {
            row[dst] -= q * row[src];
        }
    };
    let swap = |mat: &mut Vec<Vec<i128>>, a: usize, b: usize| {
        for row in mat.iter_mut() {
            row.swap(a, b);
        }
    };
    let mut p = 0;
    for i in 0..m {
        if p == t {
            break;
        }
        loop {
            let best = (p..t)
                .filter(|&j| h[i][j] != 0)
                .min_by_key(|&j| h[i][j].abs());
            let Some(b) = best else { break };
            swap(&mut h, p, b);
            swap(&mut u, p, b);
            let mut done = true;
            for j in p + 1..t {
                if h[i][j] != 0 {
                    let q = h[i][j].div_euclid(h[i][p]);
                    col_op(&mut h, j, p, q);
                    col_op(&mut u, j, p, q);
                    if h[i][j] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if h[i][p] != 0 {
            p += 1;
        }
    }
    let narrow = |mat: Vec<Vec<i128>>| -> Vec<Vec<i64>> {
        mat.into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|v| i64::try_from(v).expect("column echelon entry overflow"))
                    .collect()
            })
            .collect()
    };
    (narrow(h), narrow(u), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(rows: &[&[i64]]) -> RatMatrix {
        let cols = rows.first().map_or(0, |r| r.len());
        RatMatrix::from_int_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>(), cols)
    }

    #[test]
    fn kernel_of_projection_map() {
        let k = kernel_basis(&ints(&[&[1, 0]]));
        assert_eq!(k.vectors(), &[RatVector::from_ints(&[0, 1])]);
    }

    #[test]
    fn kernel_of_identity_is_trivial() {
        assert_eq!(kernel_basis(&RatMatrix::identity(2)).dim(), 0);
    }

    #[test]
    fn kernels_of_counterexample_rows() {
        assert_eq!(kernel_basis(&ints(&[&[1, -1], &[1, 1]])).dim(), 0);
        let k1 = kernel_basis(&ints(&[&[1, -1]]));
        assert!(k1.same_span(&SubspaceBasis::new(2, vec![RatVector::from_ints(&[1, 1])])));
        let k2 = kernel_basis(&ints(&[&[1, 1]]));
        assert!(k2.same_span(&SubspaceBasis::new(2, vec![RatVector::from_ints(&[1, -1])])));
    }

    #[test]
    fn supplementary_examples() {
        let k = SubspaceBasis::new(2, vec![RatVector::from_ints(&[0, 1])]);
        assert_eq!(
            supplementary_basis(&k).vectors(),
            &[RatVector::from_ints(&[1, 0])]
        );

        let full = supplementary_basis(&SubspaceBasis::empty(2));
        assert_eq!(
            full.vectors(),
            &[RatVector::from_ints(&[1, 0]), RatVector::from_ints(&[0, 1])]
        );

        let diag = SubspaceBasis::new(2, vec![RatVector::from_ints(&[1, 1])]);
        let sup = supplementary_basis(&diag);
        assert_eq!(sup.dim(), 1);
        assert!(sup.vectors()[0].dot(&diag.vectors()[0]).is_zero());
        assert!(sup.same_span(&SubspaceBasis::new(2, vec![RatVector::from_ints(&[1, -1])])));
    }

    #[test]
    fn projection_examples() {
        let ei = SubspaceBasis::new(2, vec![RatVector::from_ints(&[1, 0])]);
        // scaled normal (s/2, s/2) at s = 4
        assert_eq!(
            project_onto(&ei, &RatVector::from_ints(&[2, 2])),
            RatVector::from_ints(&[2, 0])
        );

        let full = SubspaceBasis::new(
            2,
            vec![RatVector::from_ints(&[1, 0]), RatVector::from_ints(&[0, 1])],
        );
        assert_eq!(
            project_onto(&full, &RatVector::from_ints(&[3, 7])),
            RatVector::from_ints(&[3, 7])
        );

        let diag = SubspaceBasis::new(2, vec![RatVector::from_ints(&[1, 1])]);
        assert_eq!(
            project_onto(&diag, &RatVector::from_ints(&[2, 0])),
            RatVector::from_ints(&[1, 1])
        );
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&ints(&[&[1, 0]])), 1);
        assert_eq!(rank(&RatMatrix::identity(2)), 2);
        assert_eq!(rank(&ints(&[&[1, 1], &[2, 2]])), 1);
        assert_eq!(rank(&RatMatrix::zeros(3, 2)), 0);
    }

    #[test]
    fn rank_with_fractions() {
        let mut m = RatMatrix::zeros(2, 2);
        m.set(0, 0, ratio(1, 2));
        m.set(0, 1, ratio(1, 3));
        m.set(1, 0, ratio(3, 2));
        m.set(1, 1, rat(1));
        assert_eq!(rank(&m), 1);
    }

    #[test]
    fn column_echelon_reduces_to_hermite_shape() {
        let x = vec![vec![2, 4, 6], vec![1, 1, 1]];
        let (h, u, r) = column_echelon(&x, 3);
        assert_eq!(r, 2);
        // x * u == h
        for i in 0..2 {
            for j in 0..3 {
                let v: i64 = (0..3).map(|k| x[i][k] * u[k][j]).sum();
                assert_eq!(v, h[i][j]);
            }
            assert_eq!(h[i][2], 0);
        }
        let det = {
            let um = RatMatrix::from_int_rows(&u, 3);
            let inv = inverse(&um).unwrap();
            inv.denominator_lcm()
        };
        assert_eq!(det, BigInt::one(), "u must be unimodular");
    }

    fn small_matrix() -> impl Strategy<Value = (usize, usize, Vec<i64>)> {
        (1usize..=6, 1usize..=6).prop_flat_map(|(r, c)| {
            (
                Just(r),
                Just(c),
                proptest::collection::vec(-3i64..=3, r * c),
            )
        })
    }

    fn build((r, c, e): &(usize, usize, Vec<i64>)) -> RatMatrix {
        let rows: Vec<Vec<i64>> = e.chunks(*c).map(|ch| ch.to_vec()).collect();
        // mix in fractions on the first row
        let mut m = RatMatrix::from_int_rows(&rows, *c);
        for j in 0..*c {
            let v = m.get(0, j) / rat(2);
            m.set(0, j, v);
        }
        assert_eq!(m.rows(), *r);
        m
    }

    proptest! {
        #[test]
        fn kernel_vectors_are_annihilated(spec in small_matrix()) {
            let a = build(&spec);
            let k = kernel_basis(&a);
            for v in k.vectors() {
                prop_assert!(a.mul_vec(v).is_zero());
            }
            prop_assert_eq!(k.dim() + rank(&a), a.cols());
        }

        #[test]
        fn supplementary_completes_the_space(spec in small_matrix()) {
            let a = build(&spec);
            let k = kernel_basis(&a);
            let s = supplementary_basis(&k);
            let mut all = k.vectors().to_vec();
            all.extend(s.vectors().iter().cloned());
            prop_assert_eq!(rank(&RatMatrix::from_rows(&all, a.cols())), a.cols());
            for u in s.vectors() {
                for v in k.vectors() {
                    prop_assert!(u.dot(v).is_zero());
                }
            }
        }

        #[test]
        fn projection_is_idempotent_and_orthogonal(
            spec in small_matrix(),
            v in proptest::collection::vec(-5i64..=5, 6),
        ) {
            let a = build(&spec);
            let s = supplementary_basis(&kernel_basis(&a));
            let v = RatVector::from_ints(&v[..a.cols()]);
            let p = project_onto(&s, &v);
            prop_assert_eq!(project_onto(&s, &p), p.clone());
            let resid = v.sub(&p);
            for u in s.vectors() {
                prop_assert!(resid.dot(u).is_zero());
            }
        }
    }
}
