//! A quick randomized pass over the core identities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::csp::{CFSet, LabeledInstance};
use crate::error::{Error, Result};
use crate::holant::{csp_to_grid, decompose, holant_value, instance_gadget};
use crate::intertwiners::{intertwiner_basis, is_intertwiner, two_generated_subgroups};
use crate::io;
use crate::partition::{partition_function, pinned_partition};
use crate::random;
use crate::structure::contract_twins;
use crate::tensor::tuples;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub cases: usize,
    /// First few failing cases, described.
    pub failures: Vec<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelfTestReport {
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl SelfTestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }
}

type Check = fn(&mut ChaCha8Rng, usize) -> Result<Vec<String>>;

const CHECKS: [(&str, Check); 7] = [
    ("pinned multiplicativity", multiplicativity),
    ("twin contraction", twins),
    ("gadget functoriality", functoriality),
    ("generator decomposition", decomposition),
    ("csp-holant bridge", bridge),
    ("orbit-basis intertwiners", intertwiners),
    ("json round trip", round_trip),
];

/// Runs every check on `cases` random inputs drawn from `seed`.
pub fn run(seed: u64, cases: usize) -> SelfTestReport {
    let checks = CHECKS
        .iter()
        .enumerate()
        .map(|(i, &(name, check))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            let failures = check(&mut rng, cases).unwrap_or_else(|e| vec![format!("error: {e}")]);
            CheckResult { name, cases, failures }
        })
        .collect();
    SelfTestReport { seed, checks }
}

const VALUES: [i64; 4] = [0, 1, 2, 3];

fn random_instance(rng: &mut ChaCha8Rng, set: &CFSet, k: usize) -> LabeledInstance {
    let (n, m) = (rng.gen_range(k.max(1)..=4), rng.gen_range(0..=3));
    random::instance(rng, &set.arities(), n, m, k)
}

fn multiplicativity(rng: &mut ChaCha8Rng, cases: usize) -> Result<Vec<String>> {
    let mut out = vec![];
    for case in 0..cases {
        let q = rng.gen_range(1..=3);
        let weighted = rng.gen_bool(0.5);
        let set = random::function_set(rng, q, 2, 2, &VALUES, weighted);
        let k = rng.gen_range(0..=2);
        let a = random_instance(rng, &set, k);
        let b = random_instance(rng, &set, k);
        let ab = a.product(&b)?;
        for psi in tuples(q, k) {
            let lhs = pinned_partition(&set, &ab, &psi)?;
            let rhs = pinned_partition(&set, &a, &psi)? * pinned_partition(&set, &b, &psi)?;
            if lhs != rhs {
                out.push(format!("case {case}: {lhs} vs {rhs} at {psi:?}"));
            }
        }
    }
    Ok(out)
}

fn twins(rng: &mut ChaCha8Rng, cases: usize) -> Result<Vec<String>> {
    let mut out = vec![];
    for case in 0..cases {
        let q = rng.gen_range(1..=3);
        let set = random::function_set(rng, q, 2, 2, &[0, 1], true);
        let inst = random_instance(rng, &set, 0);
        let c = match contract_twins(&set) {
            Ok(c) => c,
            Err(Error::VanishingWeight { .. }) => continue,
            Err(e) => return Err(e),
        };
        let (lhs, rhs) = (partition_function(&c.set, &inst)?, partition_function(&set, &inst)?);
        if lhs != rhs {
            out.push(format!("case {case}: {lhs} vs {rhs}"));
        }
    }
    Ok(out)
}

fn functoriality(rng: &mut ChaCha8Rng, cases: usize) -> Result<Vec<String>> {
    let mut out = vec![];
    for case in 0..cases {
        let q = rng.gen_range(1..=3);
        let set = random::function_set(rng, q, 2, 2, &VALUES, false);
        let (k, m, l) = (rng.gen_range(0..=2), rng.gen_range(0..=2), rng.gen_range(0..=2));
        let a = random::gadget(rng, set.functions(), 3, k, m);
        let b = random::gadget(rng, set.functions(), 3, m, l);
        let (ta, tb) = (a.signature_matrix(), b.signature_matrix());
        if a.compose(&b)?.signature_matrix() != ta.matmul(&tb)? {
            out.push(format!("case {case}: composition"));
        }
        if a.tensor(&b)?.signature_matrix() != ta.kron(&tb) {
            out.push(format!("case {case}: tensor"));
        }
        if a.adjoint().signature_matrix() != ta.conj_transpose() {
            out.push(format!("case {case}: adjoint"));
        }
    }
    Ok(out)
}

fn decomposition(rng: &mut ChaCha8Rng, cases: usize) -> Result<Vec<String>> {
    let mut out = vec![];
    for case in 0..cases {
        let q = rng.gen_range(1..=2);
        let set = random::function_set(rng, q, 2, 2, &VALUES, false);
        let (k, l) = (rng.gen_range(0..=2), rng.gen_range(0..=2));
        let g = random::bipartite_gadget(rng, set.functions(), 6, k, l);
        let d = decompose(&g)?;
        if d.expr().evaluate(q, g.functions())? != g.signature_matrix() {
            out.push(format!("case {case}: {d}"));
        }
    }
    Ok(out)
}

fn bridge(rng: &mut ChaCha8Rng, cases: usize) -> Result<Vec<String>> {
    let mut out = vec![];
    for case in 0..cases {
        let q = rng.gen_range(1..=3);
        let set = random::function_set(rng, q, 2, 2, &VALUES, false);
        let k = rng.gen_range(0..=2);
        let inst = random_instance(rng, &set, k);
        let closed = inst.forget_labels(0)?;
        if holant_value(&csp_to_grid(&set, &closed)?)? != partition_function(&set, &closed)? {
            out.push(format!("case {case}: closed value"));
        }
        let k_out = rng.gen_range(0..=k);
        let t = instance_gadget(&set, &inst, k_out)?.signature_matrix();
        for psi in tuples(q, k) {
            let row = psi[..k_out].iter().fold(0, |acc, &x| acc * q + x);
            let col = psi[k_out..].iter().fold(0, |acc, &x| acc * q + x);
            if *t.get(row, col) != pinned_partition(&set, &inst, &psi)? {
                out.push(format!("case {case}: entry {psi:?}"));
            }
        }
    }
    Ok(out)
}

fn intertwiners(_: &mut ChaCha8Rng, _: usize) -> Result<Vec<String>> {
    let mut out = vec![];
    for g in two_generated_subgroups(3) {
        for k in 0..=2 {
            for l in 0..=(2 - k) {
                for b in intertwiner_basis(&g, k, l).basis() {
                    if !is_intertwiner(b, &g, k, l)? {
                        out.push(format!("group of order {} at ({k},{l})", g.order()));
                    }
                }
            }
        }
    }
    Ok(out)
}

fn round_trip(rng: &mut ChaCha8Rng, cases: usize) -> Result<Vec<String>> {
    let mut out = vec![];
    for case in 0..cases {
        let (q, weighted) = (rng.gen_range(1..=3), rng.gen_bool(0.5));
        let set = random::function_set(rng, q, 2, 2, &VALUES, weighted);
        if io::parse_function_set_str(&io::function_set_to_json(&set).to_string())? != set {
            out.push(format!("case {case}: function set"));
        }
        let inst = random::instance(rng, &set.arities(), 3, 3, 2);
        if io::parse_instance_str(&io::instance_to_json(&inst).to_string(), Some(&set))? != inst {
            out.push(format!("case {case}: instance"));
        }
        let g = random::gadget(rng, set.functions(), 4, 1, 1);
        if io::parse_gadget_str(&io::gadget_to_json(&g).to_string())? != g {
            out.push(format!("case {case}: gadget"));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    #[test]
    fn selftest_passes() {
        let report = super::run(1, 10);
        assert!(report.passed(), "{report:?}");
        assert_eq!(report, super::run(1, 10));
    }
}
