//! Finite lists of candidate witness instances.

use std::collections::HashSet;

use crate::csp::{CFSet, Constraint, LabeledInstance};
use crate::error::{Error, Result};
use crate::interpolation::balance::well_balanced_extension;
use crate::interpolation::families::{build_family_one, build_family_three, build_family_two};
use crate::perm::next_permutation;
use crate::structure::configurations;

/// Raw enumeration budget per variable count; larger counts are skipped.
const RAW_LIMIT: u128 = 1 << 21;

fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut cur = vec![];
    fn go(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    go(0, n, r, &mut cur, &mut out);
    out
}

fn orderings(set: &[usize]) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..set.len()).collect();
    let mut out = vec![];
    loop {
        out.push(order.iter().map(|&i| set[i]).collect());
        if !next_permutation(&mut order) {
            return out;
        }
    }
}

/// The part of an instance left after dropping isolated labeled variables is
/// nonempty and connected.
fn core_connected(inst: &LabeledInstance) -> bool {
    let mut keep = vec![true; inst.num_variables()];
    let mut touched = vec![false; inst.num_variables()];
    for c in inst.constraints() {
        for &v in &c.vars {
            touched[v] = true;
        }
    }
    for &v in inst.labels() {
        keep[v] = touched[v];
    }
    if !keep.iter().any(|&x| x) {
        return false;
    }
    let core = inst.forget_labels(0).expect("zero labels").induced(&keep);
    core.is_connected()
}

fn push_unique(inst: LabeledInstance, seen: &mut HashSet<(usize, usize, Vec<Constraint>)>, out: &mut Vec<LabeledInstance>) {
    if seen.insert(inst.canonical_form()) {
        out.push(inst);
    }
}

/// Simple instances with `k` labeled variables and at most `max_vars`
/// variables whose non-isolated part is connected, up to label-preserving
/// renaming, ordered by variable count and then constraint count.
pub fn simple_instances(arities: &[usize], k: usize, max_vars: usize) -> Vec<LabeledInstance> {
    let mut out = vec![];
    let mut seen = HashSet::new();
    for n in k.max(1)..=max_vars {
        let mut slots: Vec<(usize, Vec<Vec<usize>>)> = vec![];
        for (j, &arity) in arities.iter().enumerate() {
            for s in combinations(n, arity) {
                if s.iter().all(|&v| v < k) {
                    continue;
                }
                slots.push((j, orderings(&s)));
            }
        }
        let raw = slots.iter().try_fold(1u128, |acc, (_, o)| acc.checked_mul(o.len() as u128 + 1));
        if raw.map_or(true, |r| r > RAW_LIMIT) {
            continue;
        }
        let mut level = vec![];
        let mut choice = vec![0usize; slots.len()];
        loop {
            let constraints: Vec<Constraint> = slots
                .iter()
                .zip(&choice)
                .filter(|(_, &c)| c > 0)
                .map(|((j, o), &c)| Constraint::new(*j, o[c - 1].clone()))
                .collect();
            let inst = LabeledInstance::anonymous(n, constraints, (0..k).collect()).expect("valid by construction");
            if core_connected(&inst) {
                push_unique(inst, &mut seen, &mut level);
            }
            let mut i = slots.len();
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                choice[i] += 1;
                if choice[i] <= slots[i].1.len() {
                    break;
                }
                choice[i] = 0;
            }
            if choice.iter().all(|&c| c == 0) {
                break;
            }
        }
        level.sort_by_key(|inst| inst.constraints().len());
        out.extend(level);
    }
    out
}

/// Instances with repeated arguments or repeated constraints allowed: up to
/// `max_vars` variables and `max_constraints` constraints, non-isolated part
/// connected, up to renaming.
pub fn pli_instances(arities: &[usize], k: usize, max_vars: usize, max_constraints: usize) -> Vec<LabeledInstance> {
    let mut out = vec![];
    let mut seen = HashSet::new();
    for n in k.max(1)..=max_vars {
        let mut atoms = vec![];
        for (j, &arity) in arities.iter().enumerate() {
            for x in crate::tensor::tuples(n, arity) {
                atoms.push(Constraint::new(j, x));
            }
        }
        for size in 0..=max_constraints {
            let raw = (atoms.len() as u128 + size as u128).checked_pow(size as u32);
            if raw.map_or(true, |r| r > RAW_LIMIT) {
                break;
            }
            let mut level = vec![];
            multisets(atoms.len(), size, &mut |pick| {
                let constraints = pick.iter().map(|&i| atoms[i].clone()).collect();
                let inst = LabeledInstance::anonymous(n, constraints, (0..k).collect()).expect("valid by construction");
                if core_connected(&inst) {
                    push_unique(inst, &mut seen, &mut level);
                }
            });
            out.extend(level);
        }
    }
    out
}

fn multisets(items: usize, size: usize, visit: &mut impl FnMut(&[usize])) {
    fn go(start: usize, items: usize, size: usize, cur: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
        if cur.len() == size {
            visit(cur);
            return;
        }
        for i in start..items {
            cur.push(i);
            go(i, items, size, cur, visit);
            cur.pop();
        }
    }
    go(0, items, size, &mut vec![], visit);
}

/// Vectors in `[0, bound)^len` with coordinate sum `total`, in lexicographic
/// order, at most `limit` of them.
pub fn bounded_compositions(len: usize, bound: u32, total: u32, limit: usize) -> Vec<Vec<u32>> {
    let mut out = vec![];
    fn go(i: usize, left: u32, len: usize, bound: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>, limit: usize) {
        if out.len() >= limit {
            return;
        }
        if i == len {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let room = (len - i - 1) as u32 * (bound - 1);
        for p in (0..bound.min(left + 1)).rev() {
            if left - p > room {
                break;
            }
            cur.push(p);
            go(i + 1, left - p, len, bound, cur, out, limit);
            cur.pop();
        }
    }
    if bound > 0 {
        go(0, total, len, bound, &mut vec![], &mut out, limit);
    }
    out
}

/// Keeps the labels listed in `keep`, in that order, and erases the rest.
fn project(inst: &LabeledInstance, keep: &[usize]) -> Result<LabeledInstance> {
    let labels: Vec<usize> = keep.iter().map(|&c| inst.labels()[c]).collect();
    let rebuilt = LabeledInstance::new(inst.names().to_vec(), inst.constraints().to_vec(), labels)?;
    Ok(rebuilt.without_isolated_unlabeled())
}

/// A bounded prefix of the finite witness list: the three families over
/// exponent vectors in increasing total, pairwise products of the first
/// members, then labels beyond the original `k` erased and untouched erased
/// variables dropped. Unary-only sets get the power instances `K_p` and the
/// single pinned constraints instead.
pub fn witness_catalog(set: &CFSet, phi: &[usize], psi: Option<&[usize]>, cap: usize) -> Result<Vec<LabeledInstance>> {
    if set.is_empty() {
        return Err(Error::Precondition("the function set is empty".into()));
    }
    let q = set.q();
    let k = phi.len();
    let bound = 2 * q as u32;
    let t = set.len();
    let n = set.max_arity();
    let mut out = vec![];
    if n == 1 {
        let mut total = 0;
        while out.len() < cap && total < bound * t as u32 {
            for p in bounded_compositions(t, bound, total, cap - out.len()) {
                let constraints = p
                    .iter()
                    .enumerate()
                    .flat_map(|(j, &m)| (0..m).map(move |_| Constraint::new(j, vec![k])))
                    .collect();
                out.push(LabeledInstance::anonymous(k + 1, constraints, (0..k).collect())?);
            }
            total += 1;
        }
        for j in 0..t {
            for c in 0..k {
                if out.len() < cap {
                    out.push(LabeledInstance::anonymous(k, vec![Constraint::new(j, vec![c])], (0..k).collect())?);
                }
            }
        }
        return Ok(out);
    }
    let wb = well_balanced_extension(phi, q, n)?;
    let psi_ext = psi.map(|p| wb.extend_companion(p, None));
    let psi_ext = psi_ext.as_deref();
    let m = configurations(set).len();
    let split = |flat: &[u32], parts: usize| -> Vec<Vec<u32>> { (0..parts).map(|h| flat[h * m..(h + 1) * m].to_vec()).collect() };
    let mut members = vec![];
    let budget = cap.max(1);
    let mut total = 0u32;
    let max_total = bound.saturating_sub(1) * (m * n) as u32;
    while members.len() < budget && total <= max_total {
        for p in bounded_compositions(m, bound, total, budget - members.len()) {
            members.push(build_family_one(set, &wb.phi, psi_ext, &p)?);
        }
        for (fi, f) in set.functions().iter().enumerate() {
            let a = f.arity();
            if members.len() >= budget {
                break;
            }
            for flat in bounded_compositions(a * m, bound, total, budget - members.len()) {
                members.push(build_family_two(set, fi, &wb.phi, psi_ext, &split(&flat, a))?);
            }
            for c in 0..wb.labels() {
                if members.len() >= budget {
                    break;
                }
                for flat in bounded_compositions((a - 1) * m, bound, total, budget - members.len()) {
                    members.push(build_family_three(set, fi, &wb.phi, psi_ext, c, &split(&flat, a - 1))?);
                }
            }
        }
        total += 1;
    }
    let seeds = members.len().min(8);
    for i in 0..seeds {
        for j in i..seeds {
            members.push(members[i].product(&members[j])?);
        }
    }
    let keep = &wb.original;
    for inst in &members {
        if out.len() >= cap {
            break;
        }
        out.push(project(inst, keep)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::partition_function;
    use crate::tensor::ConstraintFunction;

    #[test]
    fn compositions() {
        let all = bounded_compositions(3, 2, 2, usize::MAX);
        assert_eq!(all, vec![vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 1]]);
        assert_eq!(bounded_compositions(2, 4, 0, 10), vec![vec![0, 0]]);
        assert!(bounded_compositions(2, 2, 3, 10).is_empty());
    }

    #[test]
    fn simple_catalog_small_counts() {
        // One binary function: the bare variable, the two-variable edge,
        // and the connected shapes on three variables.
        let cat = simple_instances(&[2], 0, 2);
        assert_eq!(cat.len(), 2);
        assert!(cat.iter().all(|k| k.is_simple()));
        let three = simple_instances(&[2], 0, 3);
        assert!(three.iter().all(|k| k.is_simple() && k.is_connected()));
        let labeled = simple_instances(&[2], 1, 2);
        assert!(labeled.iter().all(|k| k.k() == 1 && k.is_simple()));
    }

    #[test]
    fn pli_catalog_contains_loops() {
        let cat = pli_instances(&[2], 0, 1, 1);
        assert_eq!(cat.len(), 2);
        assert!(!cat[1].is_simple());
    }

    #[test]
    fn unary_catalog_is_powers() {
        let set = CFSet::unweighted(vec![ConstraintFunction::from_ints(2, 1, &[0, 2]).unwrap()]).unwrap();
        let cat = witness_catalog(&set, &[], None, 100).unwrap();
        assert_eq!(cat.len(), 4);
        assert_eq!(cat[2].constraints().len(), 2);
    }

    #[test]
    fn catalog_separates_equality_from_diagonal() {
        let f = CFSet::unweighted(vec![ConstraintFunction::equality(2, 2).unwrap()]).unwrap();
        let g = CFSet::unweighted(vec![ConstraintFunction::from_ints(2, 2, &[1, 0, 0, 2]).unwrap()]).unwrap();
        let cat = witness_catalog(&f, &[], None, 50).unwrap();
        assert!(!cat.is_empty());
        assert!(cat.iter().all(|k| k.is_simple()));
        assert!(cat.iter().any(|k| partition_function(&f, k).unwrap() != partition_function(&g, k).unwrap()));
    }
}
