//! Expressions over the fundamental gadgets.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::holant::Gadget;
use crate::perm::Permutation;
use crate::scalar::Scalar;
use crate::tensor::{digits, pow_usize, ConstraintFunction, FlatMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GadgetExpr {
    /// `𝔼^{1,0}`.
    E10,
    /// `𝔼^{1,2}`.
    E12,
    /// `𝕊`.
    Swap,
    /// `𝔽_j`, an index into the function table.
    Func(usize),
    /// `𝕀`, shorthand for `𝔼^{1,2} ∘ (𝔼^{1,2})*`.
    Identity,
    /// The empty gadget, unit of `⊗`.
    Empty,
    Compose(Box<GadgetExpr>, Box<GadgetExpr>),
    Tensor(Box<GadgetExpr>, Box<GadgetExpr>),
    Adjoint(Box<GadgetExpr>),
}

impl GadgetExpr {
    pub fn compose(self, other: GadgetExpr) -> GadgetExpr {
        GadgetExpr::Compose(Box::new(self), Box::new(other))
    }

    /// Tensor product, dropping empty factors.
    pub fn tensor(self, other: GadgetExpr) -> GadgetExpr {
        match (self, other) {
            (GadgetExpr::Empty, x) | (x, GadgetExpr::Empty) => x,
            (a, b) => GadgetExpr::Tensor(Box::new(a), Box::new(b)),
        }
    }

    pub fn adjoint(self) -> GadgetExpr {
        GadgetExpr::Adjoint(Box::new(self))
    }

    /// Left-to-right composition of the factors; `None` when empty.
    pub fn compose_all(factors: impl IntoIterator<Item = GadgetExpr>) -> Option<GadgetExpr> {
        factors.into_iter().reduce(GadgetExpr::compose)
    }

    pub fn tensor_all(factors: impl IntoIterator<Item = GadgetExpr>) -> GadgetExpr {
        factors.into_iter().fold(GadgetExpr::Empty, GadgetExpr::tensor)
    }

    /// `𝕀^{⊗n}`.
    pub fn identity_power(n: usize) -> GadgetExpr {
        GadgetExpr::tensor_all((0..n).map(|_| GadgetExpr::Identity))
    }

    /// The top-level composition factors, left to right.
    pub fn factors(&self) -> Vec<&GadgetExpr> {
        match self {
            GadgetExpr::Compose(a, b) => {
                let mut out = a.factors();
                out.extend(b.factors());
                out
            }
            x => vec![x],
        }
    }

    /// Rewrites the derived leaf `𝕀` in terms of `𝔼^{1,2}`.
    pub fn expand(&self) -> GadgetExpr {
        match self {
            GadgetExpr::Identity => GadgetExpr::E12.compose(GadgetExpr::E12.adjoint()),
            GadgetExpr::Compose(a, b) => a.expand().compose(b.expand()),
            GadgetExpr::Tensor(a, b) => a.expand().tensor(b.expand()),
            GadgetExpr::Adjoint(a) => a.expand().adjoint(),
            x => x.clone(),
        }
    }

    /// `(k, ℓ)` given the arities of the function table.
    pub fn shape(&self, arities: &[usize]) -> Result<(usize, usize)> {
        Ok(match self {
            GadgetExpr::E10 => (1, 0),
            GadgetExpr::E12 => (1, 2),
            GadgetExpr::Swap => (2, 2),
            GadgetExpr::Identity => (1, 1),
            GadgetExpr::Empty => (0, 0),
            GadgetExpr::Func(j) => {
                (*arities.get(*j).ok_or(Error::UnknownFunction { index: *j, count: arities.len() })?, 0)
            }
            GadgetExpr::Compose(a, b) => {
                let ((k1, l1), (k2, l2)) = (a.shape(arities)?, b.shape(arities)?);
                if l1 != k2 {
                    return Err(Error::ArityMismatch { expected: l1, found: k2 });
                }
                (k1, l2)
            }
            GadgetExpr::Tensor(a, b) => {
                let ((k1, l1), (k2, l2)) = (a.shape(arities)?, b.shape(arities)?);
                (k1 + k2, l1 + l2)
            }
            GadgetExpr::Adjoint(a) => {
                let (k, l) = a.shape(arities)?;
                (l, k)
            }
        })
    }

    /// The signature matrix, computed bottom-up on sparse matrices.
    pub fn evaluate(&self, q: usize, functions: &[ConstraintFunction]) -> Result<FlatMatrix> {
        Ok(self.sparse(q, functions)?.to_dense())
    }

    fn sparse(&self, q: usize, functions: &[ConstraintFunction]) -> Result<Sparse> {
        Ok(match self {
            GadgetExpr::E10 => Sparse { rows: q, cols: 1, data: (0..q).map(|_| vec![(0, Scalar::one())]).collect() },
            GadgetExpr::E12 => Sparse { rows: q, cols: q * q, data: (0..q).map(|a| vec![(a * q + a, Scalar::one())]).collect() },
            GadgetExpr::Swap => Sparse {
                rows: q * q,
                cols: q * q,
                data: (0..q * q).map(|r| vec![((r % q) * q + r / q, Scalar::one())]).collect(),
            },
            GadgetExpr::Identity => Sparse::identity(q),
            GadgetExpr::Empty => Sparse::identity(1),
            GadgetExpr::Func(j) => {
                let f = functions.get(*j).ok_or(Error::UnknownFunction { index: *j, count: functions.len() })?;
                if f.q() != q {
                    return Err(Error::DomainMismatch(q, f.q()));
                }
                Sparse::from_dense(&f.flatten(f.arity(), 0)?)
            }
            GadgetExpr::Compose(a, b) => a.sparse(q, functions)?.matmul(&b.sparse(q, functions)?)?,
            GadgetExpr::Tensor(a, b) => a.sparse(q, functions)?.kron(&b.sparse(q, functions)?),
            GadgetExpr::Adjoint(a) => a.sparse(q, functions)?.conj_transpose(),
        })
    }

    /// Builds the gadget with the gadget operations.
    pub fn to_gadget(&self, q: usize, functions: &[ConstraintFunction]) -> Result<Gadget> {
        Ok(match self {
            GadgetExpr::E10 => Gadget::equality(q, 1, 0),
            GadgetExpr::E12 => Gadget::equality(q, 1, 2),
            GadgetExpr::Swap => Gadget::swap(q),
            GadgetExpr::Identity => Gadget::identity(q),
            GadgetExpr::Empty => Gadget::empty(q),
            GadgetExpr::Func(j) => {
                let f = functions.get(*j).ok_or(Error::UnknownFunction { index: *j, count: functions.len() })?;
                Gadget::function(f.clone())
            }
            GadgetExpr::Compose(a, b) => a.to_gadget(q, functions)?.compose(&b.to_gadget(q, functions)?)?,
            GadgetExpr::Tensor(a, b) => a.to_gadget(q, functions)?.tensor(&b.to_gadget(q, functions)?)?,
            GadgetExpr::Adjoint(a) => a.to_gadget(q, functions)?.adjoint(),
        })
    }

    /// Number of leaves.
    pub fn size(&self) -> usize {
        match self {
            GadgetExpr::Compose(a, b) | GadgetExpr::Tensor(a, b) => a.size() + b.size(),
            GadgetExpr::Adjoint(a) => a.size(),
            _ => 1,
        }
    }
}

impl fmt::Display for GadgetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GadgetExpr::E10 => write!(f, "E10"),
            GadgetExpr::E12 => write!(f, "E12"),
            GadgetExpr::Swap => write!(f, "S"),
            GadgetExpr::Func(j) => write!(f, "F{}", j + 1),
            GadgetExpr::Identity => write!(f, "I"),
            GadgetExpr::Empty => write!(f, "1"),
            GadgetExpr::Compose(a, b) => write!(f, "({a} ∘ {b})"),
            GadgetExpr::Tensor(a, b) => write!(f, "({a} ⊗ {b})"),
            GadgetExpr::Adjoint(a) => write!(f, "{a}*"),
        }
    }
}

/// Row lists of nonzero entries, sorted by column.
struct Sparse {
    rows: usize,
    cols: usize,
    data: Vec<Vec<(usize, Scalar)>>,
}

impl Sparse {
    fn identity(n: usize) -> Sparse {
        Sparse { rows: n, cols: n, data: (0..n).map(|r| vec![(r, Scalar::one())]).collect() }
    }

    fn from_dense(m: &FlatMatrix) -> Sparse {
        let data = (0..m.rows())
            .map(|r| (0..m.cols()).filter(|&c| !m.get(r, c).is_zero()).map(|c| (c, m.get(r, c).clone())).collect())
            .collect();
        Sparse { rows: m.rows(), cols: m.cols(), data }
    }

    fn to_dense(&self) -> FlatMatrix {
        let mut entries = vec![Scalar::zero(); self.rows * self.cols];
        for (r, row) in self.data.iter().enumerate() {
            for (c, v) in row {
                entries[r * self.cols + c] = v.clone();
            }
        }
        FlatMatrix::new(self.rows, self.cols, entries).expect("sized")
    }

    fn matmul(&self, other: &Sparse) -> Result<Sparse> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!("{}×{} times {}×{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let data = self
            .data
            .iter()
            .map(|row| {
                let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
                for (m, a) in row {
                    for (c, b) in &other.data[*m] {
                        *acc.entry(*c).or_insert_with(Scalar::zero) += &(a * b);
                    }
                }
                acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
            })
            .collect();
        Ok(Sparse { rows: self.rows, cols: other.cols, data })
    }

    fn kron(&self, other: &Sparse) -> Sparse {
        let mut data = Vec::with_capacity(self.rows * other.rows);
        for row in &self.data {
            for orow in &other.data {
                data.push(
                    row.iter()
                        .flat_map(|(c, a)| orow.iter().map(move |(d, b)| (c * other.cols + d, a * b)))
                        .collect(),
                );
            }
        }
        Sparse { rows: self.rows * other.rows, cols: self.cols * other.cols, data }
    }

    fn conj_transpose(&self) -> Sparse {
        let mut data = vec![vec![]; self.cols];
        for (r, row) in self.data.iter().enumerate() {
            for (c, v) in row {
                data[*c].push((r, v.conj()));
            }
        }
        Sparse { rows: self.cols, cols: self.rows, data }
    }
}

/// `S_σ^{k,k}`: entry `(x, y)` is 1 iff `x_i = y_{σ(i)}` for all `i`.
pub fn permutation_matrix(q: usize, sigma: &Permutation) -> FlatMatrix {
    let k = sigma.len();
    let n = pow_usize(q, k);
    FlatMatrix::from_fn(n, n, |r, c| {
        let (x, y) = (digits(r, q, k), digits(c, q, k));
        Scalar::from_int((0..k).all(|i| x[i] == y[sigma.apply(i)]) as i64)
    })
}

/// Adjacent transpositions `(a a+1)` (0-based `a`) sorting the one-line form
/// of `σ` by insertion, in the order performed. Their composition in this
/// order yields `𝕊_σ`.
pub fn swap_layers(sigma: &Permutation) -> Vec<usize> {
    let mut line = sigma.images().to_vec();
    let mut out = vec![];
    for i in 1..line.len() {
        let mut j = i;
        while j > 0 && line[j - 1] > line[j] {
            line.swap(j - 1, j);
            out.push(j - 1);
            j -= 1;
        }
    }
    out
}

/// `𝕊_σ` as layers `𝕀^{⊗a} ⊗ 𝕊 ⊗ 𝕀^{⊗(k-a-2)}`; the identity gives `𝕀^{⊗k}`.
pub fn permutation_gadget(sigma: &Permutation) -> GadgetExpr {
    let k = sigma.len();
    let layers = swap_layers(sigma).into_iter().map(|a| {
        GadgetExpr::identity_power(a).tensor(GadgetExpr::Swap).tensor(GadgetExpr::identity_power(k - a - 2))
    });
    GadgetExpr::compose_all(layers).unwrap_or_else(|| GadgetExpr::identity_power(k))
}

/// `(𝔼^{2,1} ⊗ 𝕀^{⊗(m-2)}) ∘ .. ∘ (𝔼^{2,1} ⊗ 𝕀^{⊗0})`, shape `(m, 1)` for `m ≥ 2`.
fn merge_chain(m: usize) -> GadgetExpr {
    GadgetExpr::compose_all((0..m - 1).rev().map(|i| GadgetExpr::E12.adjoint().tensor(GadgetExpr::identity_power(i))))
        .expect("m ≥ 2")
}

/// `(𝔼^{1,2} ⊗ 𝕀^{⊗0}) ∘ .. ∘ (𝔼^{1,2} ⊗ 𝕀^{⊗(d-2)})`, shape `(1, d)` for `d ≥ 2`.
fn split_chain(d: usize) -> GadgetExpr {
    GadgetExpr::compose_all((0..d - 1).map(|i| GadgetExpr::E12.tensor(GadgetExpr::identity_power(i)))).expect("d ≥ 2")
}

/// An expression over `𝔼^{1,2}` and `𝔼^{1,0}` (with `𝕀`) whose signature
/// matrix is `E^{m,d}`. Shapes with `m > d` and `d ≤ 1` are adjoints of the
/// mirrored shape.
pub fn equality_expression(m: usize, d: usize) -> GadgetExpr {
    let e01 = || GadgetExpr::E10.adjoint();
    match (m, d) {
        (0, 0) => e01().compose(GadgetExpr::E10),
        (1, 0) => GadgetExpr::E10,
        (0, 1) => e01(),
        (1, 1) => GadgetExpr::Identity,
        (0, _) => e01().compose(split_chain(d)),
        (1, _) => split_chain(d),
        (_, 0) | (_, 1) => equality_expression(d, m).adjoint(),
        _ => merge_chain(m).compose(split_chain(d)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equality_shapes() {
        for m in 0..4 {
            for d in 0..4 {
                let expr = equality_expression(m, d);
                assert_eq!(expr.shape(&[]).unwrap(), (m, d));
                let got = expr.evaluate(2, &[]).unwrap();
                if m + d == 0 {
                    assert_eq!(got, FlatMatrix::scalar(Scalar::from_int(2)));
                } else {
                    assert_eq!(got, ConstraintFunction::equality(2, m + d).unwrap().flatten(m, d).unwrap());
                }
                assert_eq!(expr.expand().evaluate(2, &[]).unwrap(), got);
                assert_eq!(expr.to_gadget(2, &[]).unwrap().signature_matrix(), got);
            }
        }
    }

    #[test]
    fn permutation_layers() {
        let sigma = Permutation::from_cycles(4, &[&[1, 3], &[2, 4]]).unwrap();
        assert_eq!(swap_layers(&sigma), vec![1, 0, 2, 1]);
        let expr = permutation_gadget(&sigma);
        assert_eq!(expr.factors().len(), 4);
        assert_eq!(expr.evaluate(2, &[]).unwrap(), permutation_matrix(2, &sigma));
        assert_eq!(Gadget::permutation(2, &sigma).signature_matrix(), permutation_matrix(2, &sigma));
        for sigma in Permutation::all(3) {
            let m = permutation_gadget(&sigma).evaluate(3, &[]).unwrap();
            assert_eq!(m, permutation_matrix(3, &sigma));
        }
        assert_eq!(permutation_gadget(&Permutation::identity(2)), GadgetExpr::identity_power(2));
    }
}
