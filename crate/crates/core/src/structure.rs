//! Twins, isomorphisms, direct sums, connectivity and the universal-element
//! augmentation.

use std::collections::HashMap;

use crate::csp::{CFSet, Constraint, LabeledInstance};
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::scalar::Scalar;
use crate::tensor::{tuples, ConstraintFunction};

/// An element `(j, x, r)` of the configuration index: function `j`, the
/// `n_j - 1` remaining arguments `x`, and the free slot `r` (0-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pub j: usize,
    pub x: Vec<usize>,
    pub r: usize,
}

impl Configuration {
    /// The full argument tuple with `i` placed in slot `r`.
    pub fn fill(&self, i: usize) -> Vec<usize> {
        let mut args = Vec::with_capacity(self.x.len() + 1);
        args.extend_from_slice(&self.x[..self.r]);
        args.push(i);
        args.extend_from_slice(&self.x[self.r..]);
        args
    }
}

/// All configurations of `set` in order of `j`, then `x`, then `r`.
pub fn configurations(set: &CFSet) -> Vec<Configuration> {
    let mut out = vec![];
    for (j, f) in set.functions().iter().enumerate() {
        for x in tuples(set.q(), f.arity() - 1) {
            for r in 0..f.arity() {
                out.push(Configuration { j, x: x.clone(), r });
            }
        }
    }
    out
}

/// The values `F_j(x_1..x_{r-1}, i, x_r..)` over all configurations.
pub fn twin_signature(set: &CFSet, configs: &[Configuration], i: usize) -> Vec<Scalar> {
    configs.iter().map(|c| set.function(c.j).at(&c.fill(i)).clone()).collect()
}

/// Twin classes, each sorted, ordered by smallest element.
pub fn twin_classes(set: &CFSet) -> Vec<Vec<usize>> {
    let configs = configurations(set);
    let mut index: HashMap<Vec<Scalar>, usize> = HashMap::new();
    let mut classes: Vec<Vec<usize>> = vec![];
    for i in 0..set.q() {
        let key = twin_signature(set, &configs, i);
        let c = *index.entry(key).or_insert_with(|| {
            classes.push(vec![]);
            classes.len() - 1
        });
        classes[c].push(i);
    }
    classes
}

/// The result of merging twin classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contraction {
    pub set: CFSet,
    pub classes: Vec<Vec<usize>>,
    /// Contracted element of each original element.
    pub class_of: Vec<usize>,
}

/// Merges every twin class into one element whose weight is the class total.
pub fn contract_twins(set: &CFSet) -> Result<Contraction> {
    let classes = twin_classes(set);
    let mut class_of = vec![0; set.q()];
    for (c, members) in classes.iter().enumerate() {
        for &i in members {
            class_of[i] = c;
        }
    }
    let reps: Vec<usize> = classes.iter().map(|c| c[0]).collect();
    let s = classes.len();
    let alpha = set.weight_vec();
    let mut weights = vec![];
    for (c, members) in classes.iter().enumerate() {
        let total: Scalar = members.iter().map(|&i| alpha[i].clone()).sum();
        if total.is_zero() {
            return Err(Error::VanishingWeight { class: c });
        }
        weights.push(total);
    }
    let functions = set
        .functions()
        .iter()
        .map(|f| {
            ConstraintFunction::from_fn(s, f.arity(), |y| {
                let x: Vec<usize> = y.iter().map(|&c| reps[c]).collect();
                f.at(&x).clone()
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Contraction { set: CFSet::new(s, functions, Some(weights))?, classes, class_of })
}

/// Whether `F_j(x) = G_j(σx)` for all `j, x` and `α_i = β_{σ(i)}`.
pub fn is_isomorphism(sigma: &Permutation, f: &CFSet, g: &CFSet) -> Result<bool> {
    f.check_compatible(g)?;
    if f.q() != g.q() || sigma.len() != f.q() {
        return Err(Error::Precondition("isomorphism needs a common domain".into()));
    }
    let (alpha, beta) = (f.weight_vec(), g.weight_vec());
    if (0..f.q()).any(|i| alpha[i] != beta[sigma.apply(i)]) {
        return Ok(false);
    }
    for (fj, gj) in f.functions().iter().zip(g.functions()) {
        for x in tuples(f.q(), fj.arity()) {
            if fj.at(&x) != gj.at(&sigma.apply_tuple(&x)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Per-element invariant: the weight and, for each function and slot, the
/// sorted multiset of values with the element in that slot.
fn fingerprint(set: &CFSet, i: usize) -> (Scalar, Vec<Vec<Scalar>>) {
    let mut parts = vec![];
    for f in set.functions() {
        for r in 0..f.arity() {
            let mut values: Vec<Scalar> = tuples(set.q(), f.arity() - 1)
                .map(|x| f.at(&Configuration { j: 0, x, r }.fill(i)).clone())
                .collect();
            values.sort();
            parts.push(values);
        }
    }
    (set.weight_vec()[i].clone(), parts)
}

/// All domain-weighted isomorphisms in lexicographic order. Sets on
/// different domains have none.
pub fn find_isomorphisms(f: &CFSet, g: &CFSet) -> Result<Vec<Permutation>> {
    f.check_compatible(g)?;
    if f.q() != g.q() {
        return Ok(vec![]);
    }
    let q = f.q();
    let fp_g: Vec<_> = (0..q).map(|i| fingerprint(g, i)).collect();
    let candidates: Vec<Vec<usize>> = (0..q)
        .map(|i| {
            let fp = fingerprint(f, i);
            (0..q).filter(|&y| fp_g[y] == fp).collect()
        })
        .collect();
    let mut out = vec![];
    let mut images = Vec::with_capacity(q);
    let mut used = vec![false; q];
    search(&candidates, &mut images, &mut used, &mut |sigma| {
        let sigma = Permutation::new(sigma.to_vec()).expect("bijection");
        if is_isomorphism(&sigma, f, g).expect("checked compatible") {
            out.push(sigma);
        }
    });
    Ok(out)
}

fn search(candidates: &[Vec<usize>], images: &mut Vec<usize>, used: &mut [bool], visit: &mut impl FnMut(&[usize])) {
    let i = images.len();
    if i == candidates.len() {
        visit(images);
        return;
    }
    for &y in &candidates[i] {
        if !used[y] {
            used[y] = true;
            images.push(y);
            search(candidates, images, used, visit);
            images.pop();
            used[y] = false;
        }
    }
}

/// `Aut(F, α)`.
pub fn automorphisms(set: &CFSet) -> Vec<Permutation> {
    find_isomorphisms(set, set).expect("a set is compatible with itself")
}

/// Block function on the disjoint union of the two domains, zero on mixed tuples.
pub fn direct_sum(f: &ConstraintFunction, g: &ConstraintFunction) -> Result<ConstraintFunction> {
    if f.arity() != g.arity() {
        return Err(Error::ArityMismatch { expected: f.arity(), found: g.arity() });
    }
    if f.arity() < 2 {
        return Err(Error::Precondition("the direct sum needs arity above 1".into()));
    }
    let qf = f.q();
    ConstraintFunction::from_fn(qf + g.q(), f.arity(), |x| {
        if x.iter().all(|&v| v < qf) {
            f.at(x).clone()
        } else if x.iter().all(|&v| v >= qf) {
            let y: Vec<usize> = x.iter().map(|&v| v - qf).collect();
            g.at(&y).clone()
        } else {
            Scalar::zero()
        }
    })
}

/// Function-wise direct sum of two compatible sets; weights are concatenated.
pub fn direct_sum_sets(f: &CFSet, g: &CFSet) -> Result<CFSet> {
    f.check_compatible(g)?;
    let functions =
        f.functions().iter().zip(g.functions()).map(|(a, b)| direct_sum(a, b)).collect::<Result<Vec<_>>>()?;
    let mut weights = f.weight_vec();
    weights.extend(g.weight_vec());
    CFSet::new(f.q() + g.q(), functions, Some(weights))
}

/// Classes of the transitive closure of "co-occur in a nonzero tuple".
pub fn connected_components(f: &ConstraintFunction) -> Result<Vec<Vec<usize>>> {
    if f.arity() < 2 {
        return Err(Error::Precondition("connectivity needs arity above 1".into()));
    }
    let q = f.q();
    let mut parent: Vec<usize> = (0..q).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for x in tuples(q, f.arity()) {
        if f.at(&x).is_zero() {
            continue;
        }
        for w in x.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = vec![];
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for i in 0..q {
        let root = find(&mut parent, i);
        let c = *slot.entry(root).or_insert_with(|| {
            classes.push(vec![]);
            classes.len() - 1
        });
        classes[c].push(i);
    }
    Ok(classes)
}

pub fn is_connected(f: &ConstraintFunction) -> Result<bool> {
    Ok(connected_components(f)?.len() == 1)
}

/// Adds a universal element `0_F` as the last domain element. Functions of
/// arity at least 2 take value 1 whenever an argument is `0_F`; a unary `F`
/// becomes the binary `(x, y) ↦ [x = y] F(x)` on old elements, 1 if either
/// argument is `0_F`. The new element gets weight 1.
pub fn augment_universal(set: &CFSet) -> Result<CFSet> {
    let q = set.q();
    let zero = q;
    let functions = set
        .functions()
        .iter()
        .map(|f| {
            if f.arity() == 1 {
                ConstraintFunction::from_fn(q + 1, 2, |x| {
                    if x[0] == zero || x[1] == zero {
                        Scalar::one()
                    } else if x[0] == x[1] {
                        f.at(&x[..1]).clone()
                    } else {
                        Scalar::zero()
                    }
                })
            } else {
                ConstraintFunction::from_fn(q + 1, f.arity(), |x| {
                    if x.contains(&zero) { Scalar::one() } else { f.at(x).clone() }
                })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut weights = set.weight_vec();
    weights.push(Scalar::one());
    CFSet::new(q + 1, functions, Some(weights))
}

/// `K^F_{V∖S}`: drops the variables in `removed` and every constraint
/// touching them, then reads the remaining constraints against `f`. Binary
/// stand-ins for unary functions of `f` merge their two variables. The
/// result is unlabeled.
pub fn restrict_instance(instance: &LabeledInstance, removed: &[bool], f: &CFSet) -> Result<LabeledInstance> {
    let n = instance.num_variables();
    if removed.len() != n {
        return Err(Error::DimensionMismatch(format!("subset mask of length {} for {n} variables", removed.len())));
    }
    let arities = f.arities();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            x = p[x];
        }
        x
    }
    let kept: Vec<&Constraint> =
        instance.constraints().iter().filter(|c| c.vars.iter().all(|&v| !removed[v])).collect();
    for c in &kept {
        if c.function >= arities.len() {
            return Err(Error::UnknownFunction { index: c.function, count: arities.len() });
        }
        if arities[c.function] == 1 {
            if c.vars.len() != 2 {
                return Err(Error::ArityMismatch { expected: 2, found: c.vars.len() });
            }
            let (a, b) = (find(&mut parent, c.vars[0]), find(&mut parent, c.vars[1]));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut index = vec![usize::MAX; n];
    let mut names = vec![];
    for v in 0..n {
        if !removed[v] && find(&mut parent, v) == v {
            index[v] = names.len();
            names.push(instance.names()[v].clone());
        }
    }
    let constraints = kept
        .iter()
        .map(|c| {
            let vars: Vec<usize> = c.vars.iter().map(|&v| index[find(&mut parent, v)]).collect();
            let vars = if arities[c.function] == 1 { vars[..1].to_vec() } else { vars };
            Constraint::new(c.function, vars)
        })
        .collect();
    LabeledInstance::new(names, constraints, vec![])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::partition_function;

    fn one(q: usize, arity: usize, e: &[i64]) -> CFSet {
        CFSet::unweighted(vec![ConstraintFunction::from_ints(q, arity, e).unwrap()]).unwrap()
    }

    #[test]
    fn twin_class_examples() {
        assert_eq!(twin_classes(&one(2, 2, &[1, 1, 1, 1])), vec![vec![0, 1]]);
        assert_eq!(twin_classes(&one(2, 2, &[1, 0, 0, 1])), vec![vec![0], vec![1]]);
        assert_eq!(twin_classes(&one(3, 1, &[3, 3, 5])), vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn contraction_examples() {
        let c = contract_twins(&one(2, 2, &[1, 1, 1, 1])).unwrap();
        assert_eq!(c.set.q(), 1);
        assert_eq!(c.set.weight_vec(), vec![Scalar::from_int(2)]);
        let free = one(2, 2, &[1, 0, 0, 2]);
        assert_eq!(contract_twins(&free).unwrap().set, free);
        let cancel = one(2, 1, &[1, 1]).with_weights(Some(vec![Scalar::one(), Scalar::from_int(-1)])).unwrap();
        assert_eq!(contract_twins(&cancel).unwrap_err(), Error::VanishingWeight { class: 0 });
    }

    #[test]
    fn isomorphism_examples() {
        let e2 = one(2, 2, &[1, 0, 0, 1]);
        let swap = Permutation::new(vec![1, 0]).unwrap();
        assert!(is_isomorphism(&swap, &e2, &e2).unwrap());
        assert_eq!(automorphisms(&e2).len(), 2);
        let a = one(2, 2, &[1, 0, 0, 2]);
        let b = one(2, 2, &[2, 0, 0, 1]);
        assert!(is_isomorphism(&swap, &a, &b).unwrap());
        assert_eq!(automorphisms(&a), vec![Permutation::identity(2)]);
        assert!(find_isomorphisms(&a, &one(2, 1, &[1, 1])).is_err());
    }

    #[test]
    fn direct_sums_and_components() {
        let e2 = ConstraintFunction::equality(2, 2).unwrap();
        assert_eq!(direct_sum(&e2, &e2).unwrap(), ConstraintFunction::equality(4, 2).unwrap().clone());
        let ones = ConstraintFunction::from_ints(1, 3, &[1]).unwrap();
        let s = direct_sum(&ones, &ones).unwrap();
        assert_eq!(s.entries().iter().filter(|v| v.is_one()).count(), 2);
        assert!(direct_sum(&ConstraintFunction::from_ints(1, 1, &[1]).unwrap(), &ConstraintFunction::from_ints(1, 1, &[1]).unwrap()).is_err());
        let all = ConstraintFunction::from_ints(2, 2, &[1, 1, 1, 1]).unwrap();
        assert_eq!(connected_components(&all).unwrap(), vec![vec![0, 1]]);
        assert_eq!(connected_components(&direct_sum(&all, &all).unwrap()).unwrap(), vec![vec![0, 1], vec![2, 3]]);
        let zero = ConstraintFunction::from_ints(2, 2, &[0, 0, 0, 0]).unwrap();
        assert_eq!(connected_components(&zero).unwrap().len(), 2);
    }

    #[test]
    fn augmentation_examples() {
        let a = augment_universal(&one(2, 1, &[3, 5])).unwrap();
        assert_eq!(a.function(0), &ConstraintFunction::from_ints(3, 2, &[3, 0, 1, 0, 5, 1, 1, 1, 1]).unwrap());
        let b = augment_universal(&one(2, 2, &[1, 0, 0, 1])).unwrap();
        assert_eq!(b.function(0), &ConstraintFunction::from_ints(3, 2, &[1, 0, 1, 0, 1, 1, 1, 1, 1]).unwrap());
        assert!(is_connected(b.function(0)).unwrap());
    }

    #[test]
    fn restriction_edge_cases() {
        let f = one(2, 2, &[1, 2, 0, 1]);
        let k = LabeledInstance::anonymous(2, vec![Constraint::new(0, vec![0, 1])], vec![0]).unwrap();
        let none = restrict_instance(&k, &[false, false], &f).unwrap();
        assert_eq!(none.constraints(), k.constraints());
        let all = restrict_instance(&k, &[true, true], &f).unwrap();
        assert_eq!(partition_function(&f, &all).unwrap(), Scalar::one());
        let unary = one(2, 1, &[3, 5]);
        let k = LabeledInstance::anonymous(3, vec![Constraint::new(0, vec![0, 1]), Constraint::new(0, vec![1, 2])], vec![]).unwrap();
        let merged = restrict_instance(&k, &[false, false, false], &unary).unwrap();
        assert_eq!(merged.num_variables(), 1);
        assert_eq!(partition_function(&unary, &merged).unwrap(), Scalar::from_int(9 + 25));
    }
}
