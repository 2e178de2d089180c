//! Exact checkers for Vandermonde-style cancellation.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::{digits, pow_usize};

/// Largest number of exponent tuples a premise check will enumerate.
pub const PREMISE_CAP: usize = 1 << 20;

/// Classes of row indices with equal rows, and the coefficient sum of each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassSums {
    pub classes: Vec<Vec<usize>>,
    pub sums: Vec<Scalar>,
}

impl ClassSums {
    pub fn all_vanish(&self) -> bool {
        self.sums.iter().all(Scalar::is_zero)
    }
}

/// `Σ_i a_i Π_j b_ij^{p_j}`.
pub fn premise_sum(a: &[Scalar], b: &[Vec<Scalar>], p: &[usize]) -> Scalar {
    a.iter()
        .zip(b)
        .map(|(ai, row)| {
            row.iter().zip(p).fold(ai.clone(), |acc, (bij, &e)| &acc * &bij.pow(e as u32))
        })
        .sum()
}

/// Verifies that `Σ_i a_i Π_j b_ij^{p_j} = 0` for every `p ∈ [0, bound)^J`,
/// then returns the sums of `a` over classes of equal rows of `b`.
/// A failing premise is reported with the first failing exponent tuple.
pub fn vandermonde_class_sums(a: &[Scalar], b: &[Vec<Scalar>], bound: usize) -> Result<ClassSums> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!("{} coefficients for {} rows", a.len(), b.len())));
    }
    let width = b.first().map_or(0, Vec::len);
    if b.iter().any(|row| row.len() != width) {
        return Err(Error::DimensionMismatch("rows of unequal length".into()));
    }
    let count = (bound as u128).checked_pow(width as u32).unwrap_or(u128::MAX);
    if count > PREMISE_CAP as u128 {
        return Err(Error::CapExceeded { terms: count.to_string(), cap: PREMISE_CAP as u64 });
    }
    // powers[i][j][e] = b_ij^e
    let powers: Vec<Vec<Vec<Scalar>>> = b
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    let mut acc = vec![Scalar::one()];
                    for e in 1..bound {
                        let next = &acc[e - 1] * x;
                        acc.push(next);
                    }
                    acc
                })
                .collect()
        })
        .collect();
    for index in 0..count as usize {
        let p = if bound == 0 { vec![] } else { digits(index, bound, width) };
        let mut total = Scalar::zero();
        for (ai, rows) in a.iter().zip(&powers) {
            let mut term = ai.clone();
            for (j, &e) in p.iter().enumerate() {
                if term.is_zero() {
                    break;
                }
                term *= &rows[j][e];
            }
            total += &term;
        }
        if !total.is_zero() {
            return Err(Error::PremiseFails { exponents: p });
        }
    }
    let mut classes: Vec<Vec<usize>> = vec![];
    for i in 0..b.len() {
        match classes.iter_mut().find(|c| b[c[0]] == b[i]) {
            Some(c) => c.push(i),
            None => classes.push(vec![i]),
        }
    }
    let sums = classes.iter().map(|c| c.iter().map(|&i| a[i].clone()).sum()).collect();
    Ok(ClassSums { classes, sums })
}

/// The tuple form: `a` is indexed by `[q]^m` (row-major), `b` by `[q] × J`.
/// Classes are tuples whose coordinatewise rows of `b` agree; exponents are
/// bounded by `q` for every pair `(h, j)`.
pub fn vandermonde_tuple_class_sums(a: &[Scalar], b: &[Vec<Scalar>], m: usize) -> Result<ClassSums> {
    let q = b.len();
    if a.len() != pow_usize(q, m) {
        return Err(Error::DimensionMismatch(format!("{} coefficients for [{q}]^{m}", a.len())));
    }
    let rows: Vec<Vec<Scalar>> =
        (0..a.len()).map(|t| digits(t, q, m).iter().flat_map(|&i| b[i].iter().cloned()).collect()).collect();
    vandermonde_class_sums(a, &rows, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: i64) -> Scalar {
        Scalar::from_int(v)
    }

    #[test]
    fn single_coefficient_must_vanish() {
        assert_eq!(
            vandermonde_class_sums(&[s(3)], &[vec![s(5)]], 1).unwrap_err(),
            Error::PremiseFails { exponents: vec![0] }
        );
        assert!(vandermonde_class_sums(&[s(0)], &[vec![s(5)]], 1).unwrap().all_vanish());
    }

    #[test]
    fn cancellation_within_a_class() {
        let sums = vandermonde_class_sums(&[s(1), s(-1)], &[vec![s(2)], vec![s(2)]], 2).unwrap();
        assert_eq!(sums.classes, vec![vec![0, 1]]);
        assert!(sums.all_vanish());
    }

    #[test]
    fn distinct_rows_report_exponent() {
        let err = vandermonde_class_sums(&[s(1), s(-1)], &[vec![s(1)], vec![s(2)]], 2).unwrap_err();
        assert_eq!(err, Error::PremiseFails { exponents: vec![1] });
    }

    #[test]
    fn tuple_form() {
        // a_(1,2) = 1, a_(2,1) = -1 with equal rows: one class of size 2 plus singletons.
        let b = vec![vec![s(7)], vec![s(7)]];
        let a = vec![s(0), s(1), s(-1), s(0)];
        let sums = vandermonde_tuple_class_sums(&a, &b, 2).unwrap();
        assert_eq!(sums.classes.len(), 1);
        assert!(sums.all_vanish());
    }
}
