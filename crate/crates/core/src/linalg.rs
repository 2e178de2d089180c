//! Exact incremental Gaussian elimination.

use crate::scalar::Scalar;

/// A linearly independent set of vectors kept in echelon form.
#[derive(Clone, Debug)]
pub struct Basis {
    len: usize,
    rows: Vec<(usize, Vec<Scalar>)>,
}

impl Basis {
    pub fn new(len: usize) -> Self {
        Basis { len, rows: Vec::new() }
    }

    pub fn vector_len(&self) -> usize {
        self.len
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.len, "vector length mismatch");
        let mut v = v.to_vec();
        for (pivot, row) in &self.rows {
            if v[*pivot].is_zero() {
                continue;
            }
            let factor = v[*pivot].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x -= &(&factor * r);
                }
            }
        }
        v
    }

    /// Adds `v` if it is independent of the current span; reports whether it was.
    pub fn insert(&mut self, v: &[Scalar]) -> bool {
        let v = self.reduce(v);
        let Some(pivot) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[pivot].inv().expect("nonzero pivot");
        let row = v.iter().map(|x| x * &inv).collect();
        self.rows.push((pivot, row));
        true
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.reduce(v).iter().all(Scalar::is_zero)
    }

    /// The echelon rows spanning the stored space.
    pub fn vectors(&self) -> impl Iterator<Item = &[Scalar]> {
        self.rows.iter().map(|(_, r)| r.as_slice())
    }
}

/// Rank of a list of equal-length vectors.
pub fn rank<'a>(vectors: impl IntoIterator<Item = &'a [Scalar]>, len: usize) -> usize {
    let mut b = Basis::new(len);
    for v in vectors {
        b.insert(v);
    }
    b.rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Vec<Scalar> {
        xs.iter().map(|&x| Scalar::from_int(x)).collect()
    }

    #[test]
    fn rank_and_membership() {
        let mut b = Basis::new(3);
        assert!(b.insert(&v(&[1, 2, 3])));
        assert!(b.insert(&v(&[0, 1, 1])));
        assert!(!b.insert(&v(&[2, 5, 7])));
        assert!(b.contains(&v(&[1, 3, 4])));
        assert!(!b.contains(&v(&[0, 0, 1])));
        assert_eq!(b.rank(), 2);
        assert!(!b.insert(&v(&[0, 0, 0])));
    }
}
