//! Dense constraint functions over `[q]^n` and their matrix flattenings.
//!
//! Entries are stored row-major in base `q`: the first argument is the most
//! significant digit. All domain elements are 0-based here.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Base-`q` digits of `index`, most significant first, padded to `len`.
pub fn digits(mut index: usize, q: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = index % q;
        index /= q;
    }
    out
}

/// Inverse of [`digits`].
pub fn index_of_digits(xs: &[usize], q: usize) -> usize {
    xs.iter().fold(0, |acc, &x| acc * q + x)
}

/// `q^n`, panicking on overflow.
pub fn pow_usize(q: usize, n: usize) -> usize {
    (0..n).fold(1usize, |acc, _| acc.checked_mul(q).expect("q^n overflows usize"))
}

/// All tuples of `[q]^n` in lexicographic order.
pub fn tuples(q: usize, n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..pow_usize(q, n)).map(move |i| digits(i, q, n))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConstraintFunction {
    q: usize,
    arity: usize,
    entries: Vec<Scalar>,
}

impl ConstraintFunction {
    pub fn new(q: usize, arity: usize, entries: Vec<Scalar>) -> Result<Self> {
        if q == 0 {
            return Err(Error::Precondition("domain size must be at least 1".into()));
        }
        if arity == 0 {
            return Err(Error::Precondition("arity must be at least 1".into()));
        }
        let expected = pow_usize(q, arity);
        if entries.len() != expected {
            return Err(Error::EntryCount { expected, found: entries.len() });
        }
        Ok(ConstraintFunction { q, arity, entries })
    }

    /// Convenience constructor from small integers.
    pub fn from_ints(q: usize, arity: usize, entries: &[i64]) -> Result<Self> {
        Self::new(q, arity, entries.iter().map(|&v| Scalar::from_int(v)).collect())
    }

    pub fn from_fn(q: usize, arity: usize, mut f: impl FnMut(&[usize]) -> Scalar) -> Result<Self> {
        let entries = tuples(q, arity).map(|x| f(&x)).collect();
        Self::new(q, arity, entries)
    }

    /// The equality function `E_n`: 1 when all arguments agree.
    pub fn equality(q: usize, n: usize) -> Result<Self> {
        Self::from_fn(q, n, |x| {
            if x.iter().all(|&v| v == x[0]) { Scalar::one() } else { Scalar::zero() }
        })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn index_of(&self, x: &[usize]) -> Result<usize> {
        if x.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: x.len() });
        }
        if let Some(&bad) = x.iter().find(|&&v| v >= self.q) {
            return Err(Error::DomainOutOfRange { value: bad, q: self.q });
        }
        Ok(index_of_digits(x, self.q))
    }

    pub fn evaluate(&self, x: &[usize]) -> Result<&Scalar> {
        Ok(&self.entries[self.index_of(x)?])
    }

    /// Unchecked evaluation for hot loops; panics on malformed input.
    pub fn at(&self, x: &[usize]) -> &Scalar {
        debug_assert_eq!(x.len(), self.arity);
        &self.entries[index_of_digits(x, self.q)]
    }

    /// The `q^m × q^d` flattening. Row digits are `x_1..x_m`; column digits
    /// are `x_n, x_{n-1}, .., x_{m+1}`, most significant first.
    pub fn flatten(&self, m: usize, d: usize) -> Result<FlatMatrix> {
        if m + d != self.arity {
            return Err(Error::InvalidSplit { m, d, n: self.arity });
        }
        let (rows, cols) = (pow_usize(self.q, m), pow_usize(self.q, d));
        let mut x = vec![0; self.arity];
        let entries = (0..rows * cols)
            .map(|i| {
                let (r, c) = (i / cols, i % cols);
                x[..m].copy_from_slice(&digits(r, self.q, m));
                let mut col = digits(c, self.q, d);
                col.reverse();
                x[m..].copy_from_slice(&col);
                self.at(&x).clone()
            })
            .collect();
        Ok(FlatMatrix { rows, cols, entries })
    }

    /// Inverse of [`ConstraintFunction::flatten`].
    pub fn unflatten(mat: &FlatMatrix, q: usize, m: usize, d: usize) -> Result<Self> {
        if mat.rows != pow_usize(q, m) || mat.cols != pow_usize(q, d) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} is not a ({m},{d}) flattening over q={q}",
                mat.rows, mat.cols
            )));
        }
        Self::from_fn(q, m + d, |x| {
            let r = index_of_digits(&x[..m], q);
            let mut col = x[m..].to_vec();
            col.reverse();
            mat.get(r, index_of_digits(&col, q)).clone()
        })
    }

    pub fn conjugate(&self) -> Self {
        ConstraintFunction {
            q: self.q,
            arity: self.arity,
            entries: self.entries.iter().map(Scalar::conj).collect(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(Scalar::is_real)
    }

    /// `F(σ(x))` as a function of `x`: the relabeled function `x ↦ F(σx)`.
    pub fn relabel(&self, sigma: &[usize]) -> Self {
        let entries = tuples(self.q, self.arity)
            .map(|x| {
                let y: Vec<usize> = x.iter().map(|&v| sigma[v]).collect();
                self.at(&y).clone()
            })
            .collect();
        ConstraintFunction { q: self.q, arity: self.arity, entries }
    }
}

impl fmt::Display for ConstraintFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q={} n={} [", self.q, self.arity)?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "]")
    }
}

/// A dense row-major matrix of exact scalars.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FlatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Scalar>,
}

impl FlatMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Scalar>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::EntryCount { expected: rows * cols, found: entries.len() });
        }
        Ok(FlatMatrix { rows, cols, entries })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let entries = (0..rows * cols).map(|i| f(i / cols, i % cols)).collect();
        FlatMatrix { rows, cols, entries }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        FlatMatrix { rows, cols, entries: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { Scalar::one() } else { Scalar::zero() })
    }

    pub fn scalar(value: Scalar) -> Self {
        FlatMatrix { rows: 1, cols: 1, entries: vec![value] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Scalar> {
        self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.entries[r * self.cols + c]
    }

    pub fn matmul(&self, other: &FlatMatrix) -> Result<FlatMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = FlatMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for m in 0..self.cols {
                let a = self.get(r, m);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(m, c);
                    if !b.is_zero() {
                        out.entries[r * other.cols + c] += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product; the left factor supplies the most significant digits.
    pub fn kron(&self, other: &FlatMatrix) -> FlatMatrix {
        let (rows, cols) = (self.rows * other.rows, self.cols * other.cols);
        FlatMatrix::from_fn(rows, cols, |r, c| {
            let a = self.get(r / other.rows, c / other.cols);
            if a.is_zero() {
                return Scalar::zero();
            }
            a * other.get(r % other.rows, c % other.cols)
        })
    }

    pub fn conj_transpose(&self) -> FlatMatrix {
        FlatMatrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn transpose(&self) -> FlatMatrix {
        FlatMatrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn scale(&self, s: &Scalar) -> FlatMatrix {
        FlatMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|e| e * s).collect() }
    }

    pub fn add(&self, other: &FlatMatrix) -> Result<FlatMatrix> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch("matrix sum".into()));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(FlatMatrix { rows: self.rows, cols: self.cols, entries })
    }
}

impl fmt::Display for FlatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(xs: &[i64]) -> Vec<Scalar> {
        xs.iter().map(|&v| Scalar::from_int(v)).collect()
    }

    #[test]
    fn equality_values() {
        let e3 = ConstraintFunction::equality(2, 3).unwrap();
        assert_eq!(e3.evaluate(&[0, 0, 0]).unwrap(), &Scalar::one());
        assert_eq!(e3.evaluate(&[0, 1, 0]).unwrap(), &Scalar::zero());
        assert!(matches!(e3.evaluate(&[0, 0]), Err(Error::ArityMismatch { .. })));
        assert!(matches!(e3.evaluate(&[0, 2, 0]), Err(Error::DomainOutOfRange { .. })));
    }

    #[test]
    fn binary_flattenings() {
        let f = ConstraintFunction::from_ints(2, 2, &[1, 2, 3, 4]).unwrap();
        assert_eq!(f.flatten(1, 1).unwrap(), FlatMatrix::new(2, 2, ints(&[1, 2, 3, 4])).unwrap());
        assert_eq!(f.flatten(2, 0).unwrap(), FlatMatrix::new(4, 1, ints(&[1, 2, 3, 4])).unwrap());
        assert_eq!(f.flatten(0, 2).unwrap(), FlatMatrix::new(1, 4, ints(&[1, 3, 2, 4])).unwrap());
        assert!(f.flatten(1, 2).is_err());
    }

    #[test]
    fn ternary_column_digits_are_reversed() {
        let f = ConstraintFunction::from_ints(2, 3, &[0, 1, 2, 3, 4, 5, 6, 7]).unwrap();
        let m = f.flatten(1, 2).unwrap();
        for x in tuples(2, 3) {
            let col = x[2] * 2 + x[1];
            assert_eq!(m.get(x[0], col), f.at(&x));
        }
    }

    #[test]
    fn unflatten_inverts_every_split() {
        let f = ConstraintFunction::from_fn(3, 3, |x| Scalar::from_int((x[0] * 9 + x[1] * 3 + x[2]) as i64 - 5)).unwrap();
        for m in 0..=3 {
            let flat = f.flatten(m, 3 - m).unwrap();
            assert_eq!(ConstraintFunction::unflatten(&flat, 3, m, 3 - m).unwrap(), f);
        }
    }

    #[test]
    fn conjugation() {
        let f = ConstraintFunction::new(1, 1, vec!["1+2i".parse().unwrap()]).unwrap();
        assert_eq!(f.conjugate().entries()[0].to_string(), "1-2i");
        assert_eq!(f.conjugate().conjugate(), f);
        let g = ConstraintFunction::from_ints(2, 1, &[3, 5]).unwrap();
        assert_eq!(g.conjugate(), g);
    }

    #[test]
    fn kron_and_adjoint() {
        let a = FlatMatrix::new(1, 2, ints(&[1, 2])).unwrap();
        let b = FlatMatrix::new(2, 1, ints(&[3, 4])).unwrap();
        assert_eq!(a.kron(&b), FlatMatrix::new(2, 2, ints(&[3, 6, 4, 8])).unwrap());
        assert_eq!(a.matmul(&b).unwrap(), FlatMatrix::scalar(Scalar::from_int(11)));
        assert_eq!(a.conj_transpose().conj_transpose(), a);
    }
}
