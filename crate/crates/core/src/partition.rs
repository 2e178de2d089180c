//! Exact partition functions by exhaustive enumeration of assignments.

use crate::csp::{CFSet, LabeledInstance};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default bound on the number of enumerated assignments.
pub const DEFAULT_TERM_CAP: u64 = 10_000_000;

/// Number of assignments a pinned evaluation enumerates: `q^{#unlabeled}`.
pub fn extension_count(q: usize, instance: &LabeledInstance) -> u128 {
    let free = instance.unlabeled_variables().len() as u32;
    (q as u128).checked_pow(free).unwrap_or(u128::MAX)
}

/// `Z_{F,α}(K)`, ignoring labels.
pub fn partition_function(set: &CFSet, instance: &LabeledInstance) -> Result<Scalar> {
    partition_function_capped(set, instance, DEFAULT_TERM_CAP)
}

pub fn partition_function_capped(set: &CFSet, instance: &LabeledInstance, cap: u64) -> Result<Scalar> {
    let fixed = vec![None; instance.num_variables()];
    enumerate(set, instance, &fixed, cap)
}

/// `Z^ψ_{F,α}(K)`: the sum over extensions of `ψ`, weighted by `α_φ / α_ψ`.
pub fn pinned_partition(set: &CFSet, instance: &LabeledInstance, psi: &[usize]) -> Result<Scalar> {
    pinned_partition_capped(set, instance, psi, DEFAULT_TERM_CAP)
}

pub fn pinned_partition_capped(set: &CFSet, instance: &LabeledInstance, psi: &[usize], cap: u64) -> Result<Scalar> {
    if psi.len() != instance.k() {
        return Err(Error::LabelCount(psi.len(), instance.k()));
    }
    if let Some(&value) = psi.iter().find(|&&x| x >= set.q()) {
        return Err(Error::DomainOutOfRange { value, q: set.q() });
    }
    let mut fixed = vec![None; instance.num_variables()];
    for (i, &v) in instance.labels().iter().enumerate() {
        fixed[v] = Some(psi[i]);
    }
    enumerate(set, instance, &fixed, cap)
}

/// Sums over all assignments agreeing with `fixed`, in lexicographic order of
/// the free variables. Fixed variables contribute no weight.
fn enumerate(set: &CFSet, instance: &LabeledInstance, fixed: &[Option<usize>], cap: u64) -> Result<Scalar> {
    instance.check_against(set)?;
    let q = set.q();
    let free: Vec<usize> = (0..fixed.len()).filter(|&v| fixed[v].is_none()).collect();
    let terms = (q as u128).checked_pow(free.len() as u32);
    match terms {
        Some(t) if t <= cap as u128 => {}
        _ => {
            let shown = terms.map_or_else(|| format!("{q}^{}", free.len()), |t| t.to_string());
            return Err(Error::CapExceeded { terms: shown, cap });
        }
    }
    let weights = if set.has_unit_weights() { None } else { Some(set.weight_vec()) };
    let mut phi: Vec<usize> = fixed.iter().map(|x| x.unwrap_or(0)).collect();
    let mut args = Vec::new();
    let mut total = Scalar::zero();
    loop {
        let mut term = Scalar::one();
        for c in instance.constraints() {
            args.clear();
            args.extend(c.vars.iter().map(|&v| phi[v]));
            let value = set.function(c.function).at(&args);
            if value.is_zero() {
                term = Scalar::zero();
                break;
            }
            term *= value;
        }
        if !term.is_zero() {
            if let Some(w) = &weights {
                for &v in &free {
                    term *= &w[phi[v]];
                }
            }
            total += &term;
        }
        // Odometer over the free variables, last one fastest.
        let mut i = free.len();
        loop {
            if i == 0 {
                return Ok(total);
            }
            i -= 1;
            let v = free[i];
            phi[v] += 1;
            if phi[v] < q {
                break;
            }
            phi[v] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::Constraint;
    use crate::tensor::{tuples, ConstraintFunction};

    fn set(q: usize, arity: usize, entries: &[i64]) -> CFSet {
        CFSet::unweighted(vec![ConstraintFunction::from_ints(q, arity, entries).unwrap()]).unwrap()
    }

    #[test]
    fn single_variable_counts_domain() {
        let k = LabeledInstance::anonymous(1, vec![], vec![]).unwrap();
        assert_eq!(partition_function(&set(2, 1, &[1, 1]), &k).unwrap(), Scalar::from_int(2));
    }

    #[test]
    fn edge_homomorphisms_into_k2() {
        let k = LabeledInstance::anonymous(2, vec![Constraint::new(0, vec![0, 1])], vec![]).unwrap();
        assert_eq!(partition_function(&set(2, 2, &[0, 1, 1, 0]), &k).unwrap(), Scalar::from_int(2));
    }

    #[test]
    fn doubled_argument() {
        let k = LabeledInstance::anonymous(1, vec![Constraint::new(0, vec![0, 0])], vec![]).unwrap();
        assert_eq!(partition_function(&set(2, 2, &[1, 0, 0, 2]), &k).unwrap(), Scalar::from_int(3));
    }

    #[test]
    fn pinned_identities() {
        let f = set(3, 2, &[1, 2, 0, 0, 1, 3, 2, 2, 1])
            .with_weights(Some(vec![Scalar::ratio(1, 2), Scalar::from_int(3), Scalar::from_int(-1)]))
            .unwrap();
        let k = LabeledInstance::anonymous(
            3,
            vec![Constraint::new(0, vec![0, 2]), Constraint::new(0, vec![2, 1]), Constraint::new(0, vec![1, 1])],
            vec![0, 1],
        )
        .unwrap();
        let w = f.weight_vec();
        let mut sum = Scalar::zero();
        for psi in tuples(3, 2) {
            sum += &(&w[psi[0]] * &w[psi[1]] * pinned_partition(&f, &k, &psi).unwrap());
        }
        assert_eq!(sum, partition_function(&f, &k).unwrap());
        let u = LabeledInstance::identity(2);
        assert_eq!(pinned_partition(&f, &u, &[2, 1]).unwrap(), Scalar::one());
        let k0 = k.forget_labels(0).unwrap();
        assert_eq!(pinned_partition(&f, &k0, &[]).unwrap(), partition_function(&f, &k0).unwrap());
    }

    #[test]
    fn cap_is_enforced() {
        let k = LabeledInstance::anonymous(10, vec![], vec![]).unwrap();
        let err = partition_function_capped(&set(2, 1, &[1, 1]), &k, 1000).unwrap_err();
        assert!(err.is_cap());
        assert_eq!(extension_count(2, &k), 1024);
    }
}
