//! Recovering `σ` with `ψ = σ ∘ φ` from the intertwiners of `Aut(F)`.

use crate::csp::{CFSet, LabeledInstance};
use crate::error::{Error, Result};
use crate::interpolation::pli_instances;
use crate::intertwiners::{intertwiner_basis, same_orbit_via_intertwiners, PermutationGroup};
use crate::partition::pinned_partition;
use crate::perm::Permutation;
use crate::scalar::Scalar;
use crate::structure::automorphisms;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SigmaWitness {
    /// An automorphism with `ψ = σ ∘ φ`.
    Sigma(Permutation),
    /// No such automorphism; `K` separates the two pinnings.
    Distinguished { instance: LabeledInstance, z_phi: Scalar, z_psi: Scalar },
}

/// Tests whether `φ([k])` and `ψ([k])` share an orbit of `Aut(F)` through the
/// orbit basis of `C_{Aut(F)}(k, 0)`. On success the automorphism is taken
/// from the group; otherwise instances with `k` labels, at most `k + 2`
/// variables and at most `instance_bound` constraints are searched for one
/// with `Z^φ(K) ≠ Z^ψ(K)`.
pub fn witness_sigma(set: &CFSet, phi: &[usize], psi: &[usize], instance_bound: usize) -> Result<SigmaWitness> {
    let k = phi.len();
    if k == 0 {
        return Err(Error::Precondition("at least one label is needed".into()));
    }
    if psi.len() != k {
        return Err(Error::LabelCount(k, psi.len()));
    }
    let q = set.q();
    if let Some(&v) = phi.iter().chain(psi).find(|&&v| v >= q) {
        return Err(Error::DomainOutOfRange { value: v, q });
    }
    let aut = PermutationGroup::from_elements(q, automorphisms(set))?;
    let space = intertwiner_basis(&aut, k, 0);
    if same_orbit_via_intertwiners(phi, psi, &space)? {
        let sigma = aut.carrier(phi, psi).expect("orbit basis and group agree");
        return Ok(SigmaWitness::Sigma(sigma.clone()));
    }
    let candidates = pli_instances(&set.arities(), k, k + 2, instance_bound);
    let examined = candidates.len();
    for instance in candidates {
        let z_phi = pinned_partition(set, &instance, phi)?;
        let z_psi = pinned_partition(set, &instance, psi)?;
        if z_phi != z_psi {
            return Ok(SigmaWitness::Distinguished { instance, z_phi, z_psi });
        }
    }
    Err(Error::Inconclusive { examined })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::ConstraintFunction;

    fn single(entries: &[i64]) -> CFSet {
        CFSet::unweighted(vec![ConstraintFunction::from_ints(2, 2, entries).unwrap()]).unwrap()
    }

    #[test]
    fn identity_and_swap() {
        let set = single(&[0, 1, 1, 0]);
        assert_eq!(witness_sigma(&set, &[0, 1], &[0, 1], 2).unwrap(), SigmaWitness::Sigma(Permutation::identity(2)));
        assert_eq!(witness_sigma(&set, &[0], &[1], 2).unwrap(), SigmaWitness::Sigma(Permutation::transposition(2, 0, 1)));
    }

    #[test]
    fn diagonal_separates() {
        let set = single(&[1, 0, 0, 2]);
        match witness_sigma(&set, &[0], &[1], 2).unwrap() {
            SigmaWitness::Distinguished { instance, z_phi, z_psi } => {
                assert_eq!(pinned_partition(&set, &instance, &[0]).unwrap(), z_phi);
                assert_ne!(z_phi, z_psi);
            }
            other => panic!("expected a separating instance, got {other:?}"),
        }
        assert!(matches!(witness_sigma(&set, &[], &[], 2), Err(Error::Precondition(_))));
    }
}
