//! Constraint function sets, k-labeled instances and their product monoid.

use std::collections::{BTreeSet, HashSet};

use crate::error::{Error, Result};
use crate::perm::next_permutation;
use crate::scalar::Scalar;
use crate::tensor::ConstraintFunction;

/// An ordered list of constraint functions on a common domain `[q]`, with
/// optional nonzero domain weights.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CFSet {
    q: usize,
    functions: Vec<ConstraintFunction>,
    weights: Option<Vec<Scalar>>,
}

impl CFSet {
    pub fn new(q: usize, functions: Vec<ConstraintFunction>, weights: Option<Vec<Scalar>>) -> Result<Self> {
        if q == 0 {
            return Err(Error::Precondition("domain size must be at least 1".into()));
        }
        if let Some(f) = functions.iter().find(|f| f.q() != q) {
            return Err(Error::DomainMismatch(q, f.q()));
        }
        if let Some(w) = &weights {
            if w.len() != q {
                return Err(Error::WeightCount { expected: q, found: w.len() });
            }
            if let Some(index) = w.iter().position(Scalar::is_zero) {
                return Err(Error::ZeroWeight { index });
            }
        }
        // All-ones weights are stored as absent so equal sets compare equal.
        let weights = weights.filter(|w| !w.iter().all(Scalar::is_one));
        Ok(CFSet { q, functions, weights })
    }

    /// A unit-weight set; the domain size is taken from the first function.
    pub fn unweighted(functions: Vec<ConstraintFunction>) -> Result<Self> {
        let q = functions
            .first()
            .map(ConstraintFunction::q)
            .ok_or_else(|| Error::Precondition("cannot infer q from an empty function list".into()))?;
        CFSet::new(q, functions, None)
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn functions(&self) -> &[ConstraintFunction] {
        &self.functions
    }

    pub fn function(&self, j: usize) -> &ConstraintFunction {
        &self.functions[j]
    }

    pub fn arities(&self) -> Vec<usize> {
        self.functions.iter().map(ConstraintFunction::arity).collect()
    }

    pub fn max_arity(&self) -> usize {
        self.functions.iter().map(ConstraintFunction::arity).max().unwrap_or(0)
    }

    pub fn weights(&self) -> Option<&[Scalar]> {
        self.weights.as_deref()
    }

    /// The weight vector with absent weights expanded to all ones.
    pub fn weight_vec(&self) -> Vec<Scalar> {
        match &self.weights {
            Some(w) => w.clone(),
            None => vec![Scalar::one(); self.q],
        }
    }

    pub fn with_weights(&self, weights: Option<Vec<Scalar>>) -> Result<Self> {
        CFSet::new(self.q, self.functions.clone(), weights)
    }

    pub fn has_unit_weights(&self) -> bool {
        self.weights.as_ref().map_or(true, |w| w.iter().all(Scalar::is_one))
    }

    /// Same number of functions and equal arities index by index.
    pub fn is_compatible(&self, other: &CFSet) -> bool {
        self.arities() == other.arities()
    }

    pub fn check_compatible(&self, other: &CFSet) -> Result<()> {
        if self.is_compatible(other) {
            Ok(())
        } else {
            Err(Error::Incompatible(format!("arities {:?} vs {:?}", self.arities(), other.arities())))
        }
    }

    pub fn conjugate(&self) -> CFSet {
        CFSet {
            q: self.q,
            functions: self.functions.iter().map(ConstraintFunction::conjugate).collect(),
            weights: self.weights.as_ref().map(|w| w.iter().map(Scalar::conj).collect()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constraint {
    pub function: usize,
    pub vars: Vec<usize>,
}

impl Constraint {
    pub fn new(function: usize, vars: Vec<usize>) -> Self {
        Constraint { function, vars }
    }
}

/// Where a variable of a product instance came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    /// The merged variable carrying label `i` (0-based).
    Label(usize),
    Left(usize),
    Right(usize),
}

/// A #CSP instance with `k` labeled variables. Variables are indexed
/// `0..n` in a stable order; constraints are kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LabeledInstance {
    names: Vec<String>,
    constraints: Vec<Constraint>,
    labels: Vec<usize>,
}

impl LabeledInstance {
    pub fn new(names: Vec<String>, mut constraints: Vec<Constraint>, labels: Vec<usize>) -> Result<Self> {
        let n = names.len();
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::Precondition(format!("variable name {name} is not unique")));
            }
        }
        for c in &constraints {
            if let Some(&v) = c.vars.iter().find(|&&v| v >= n) {
                return Err(Error::UnknownVariable(format!("#{v}")));
            }
        }
        let mut labeled = vec![false; n];
        for &v in &labels {
            if v >= n {
                return Err(Error::UnknownVariable(format!("#{v}")));
            }
            if labeled[v] {
                return Err(Error::DuplicateLabel(names[v].clone()));
            }
            labeled[v] = true;
        }
        constraints.sort();
        Ok(LabeledInstance { names, constraints, labels })
    }

    /// An instance on `n` variables named `v1..vn`.
    pub fn anonymous(n: usize, constraints: Vec<Constraint>, labels: Vec<usize>) -> Result<Self> {
        Self::new((1..=n).map(|i| format!("v{i}")).collect(), constraints, labels)
    }

    /// `U_k`: `k` labeled variables and no constraints.
    pub fn identity(k: usize) -> Self {
        Self::anonymous(k, vec![], (0..k).collect()).expect("valid identity instance")
    }

    pub fn num_variables(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.labels.len()
    }

    /// Label index (0-based) carried by variable `v`, if any.
    pub fn label_of(&self, v: usize) -> Option<usize> {
        self.labels.iter().position(|&u| u == v)
    }

    pub fn unlabeled_variables(&self) -> Vec<usize> {
        let labeled: HashSet<usize> = self.labels.iter().copied().collect();
        (0..self.num_variables()).filter(|v| !labeled.contains(v)).collect()
    }

    /// Checks function indices and tuple lengths against `set`.
    pub fn check_against(&self, set: &CFSet) -> Result<()> {
        for c in &self.constraints {
            if c.function >= set.len() {
                return Err(Error::UnknownFunction { index: c.function, count: set.len() });
            }
            let arity = set.function(c.function).arity();
            if c.vars.len() != arity {
                return Err(Error::ArityMismatch { expected: arity, found: c.vars.len() });
            }
        }
        Ok(())
    }

    pub fn product(&self, other: &LabeledInstance) -> Result<LabeledInstance> {
        self.product_with_provenance(other).map(|(k, _)| k)
    }

    /// Glues label `i` of `self` to label `i` of `other`. Variables of the
    /// result are the merged labeled ones first, then the unlabeled variables
    /// of `self`, then those of `other`.
    pub fn product_with_provenance(&self, other: &LabeledInstance) -> Result<(LabeledInstance, Vec<Origin>)> {
        if self.k() != other.k() {
            return Err(Error::LabelCount(self.k(), other.k()));
        }
        let k = self.k();
        let mut origin: Vec<Origin> = (0..k).map(Origin::Label).collect();
        let mut map_left = vec![usize::MAX; self.num_variables()];
        let mut map_right = vec![usize::MAX; other.num_variables()];
        for i in 0..k {
            map_left[self.labels[i]] = i;
            map_right[other.labels[i]] = i;
        }
        for v in self.unlabeled_variables() {
            map_left[v] = origin.len();
            origin.push(Origin::Left(v));
        }
        for v in other.unlabeled_variables() {
            map_right[v] = origin.len();
            origin.push(Origin::Right(v));
        }
        let remap = |c: &Constraint, map: &[usize]| Constraint::new(c.function, c.vars.iter().map(|&v| map[v]).collect());
        let constraints = self
            .constraints
            .iter()
            .map(|c| remap(c, &map_left))
            .chain(other.constraints.iter().map(|c| remap(c, &map_right)))
            .collect();
        let instance = LabeledInstance::anonymous(origin.len(), constraints, (0..k).collect())?;
        Ok((instance, origin))
    }

    /// Distinct variables within each constraint, no repeated constraint up
    /// to variable order, and every constraint touches an unlabeled variable.
    pub fn is_simple(&self) -> bool {
        let labeled: HashSet<usize> = self.labels.iter().copied().collect();
        let mut seen = HashSet::new();
        for c in &self.constraints {
            let set: BTreeSet<usize> = c.vars.iter().copied().collect();
            if set.len() != c.vars.len() {
                return false;
            }
            if c.vars.iter().all(|v| labeled.contains(v)) {
                return false;
            }
            let mut key = c.vars.clone();
            key.sort_unstable();
            if !seen.insert((c.function, key)) {
                return false;
            }
        }
        true
    }

    /// `K_{F→G}`: the same structure, validated for use against `g`.
    pub fn replace_functions(&self, f: &CFSet, g: &CFSet) -> Result<LabeledInstance> {
        f.check_compatible(g)?;
        self.check_against(f)?;
        Ok(self.clone())
    }

    /// Keeps labels `1..=k'` only.
    pub fn forget_labels(&self, k_prime: usize) -> Result<LabeledInstance> {
        if k_prime > self.k() {
            return Err(Error::Precondition(format!("cannot keep {k_prime} of {} labels", self.k())));
        }
        let mut out = self.clone();
        out.labels.truncate(k_prime);
        Ok(out)
    }

    /// Removes unlabeled variables that occur in no constraint.
    pub fn without_isolated_unlabeled(&self) -> LabeledInstance {
        let mut used = vec![false; self.num_variables()];
        for &v in &self.labels {
            used[v] = true;
        }
        for c in &self.constraints {
            for &v in &c.vars {
                used[v] = true;
            }
        }
        self.induced(&used)
    }

    /// The instance restricted to variables with `keep[v]`; constraints that
    /// touch a dropped variable are removed. Labels on dropped variables are
    /// not allowed.
    pub fn induced(&self, keep: &[bool]) -> LabeledInstance {
        let mut map = vec![usize::MAX; self.num_variables()];
        let mut names = vec![];
        for v in 0..self.num_variables() {
            if keep[v] {
                map[v] = names.len();
                names.push(self.names[v].clone());
            }
        }
        let constraints = self
            .constraints
            .iter()
            .filter(|c| c.vars.iter().all(|&v| keep[v]))
            .map(|c| Constraint::new(c.function, c.vars.iter().map(|&v| map[v]).collect()))
            .collect();
        let labels = self.labels.iter().map(|&v| map[v]).collect();
        LabeledInstance::new(names, constraints, labels).expect("induced instance stays valid")
    }

    /// Connectivity of the variable/constraint incidence graph. Instances
    /// without variables count as connected.
    pub fn is_connected(&self) -> bool {
        let n = self.num_variables();
        if n == 0 {
            return true;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut x = x;
            while p[x] != r {
                let next = p[x];
                p[x] = r;
                x = next;
            }
            r
        }
        for c in &self.constraints {
            for w in c.vars.windows(2) {
                let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                parent[a] = b;
            }
        }
        let root = find(&mut parent, 0);
        (1..n).all(|v| find(&mut parent, v) == root)
    }

    /// Canonical form under renaming of unlabeled variables: labeled
    /// variables become `0..k` in label order and the unlabeled ones are
    /// ordered to minimise the sorted constraint list. Brute force; intended
    /// for small instances in tests.
    pub fn canonical_form(&self) -> (usize, usize, Vec<Constraint>) {
        let k = self.k();
        let unlabeled = self.unlabeled_variables();
        let mut order: Vec<usize> = (0..unlabeled.len()).collect();
        let mut best: Option<Vec<Constraint>> = None;
        loop {
            let mut map = vec![0; self.num_variables()];
            for (i, &v) in self.labels.iter().enumerate() {
                map[v] = i;
            }
            for (i, &v) in unlabeled.iter().enumerate() {
                map[v] = k + order[i];
            }
            let mut cs: Vec<Constraint> = self
                .constraints
                .iter()
                .map(|c| Constraint::new(c.function, c.vars.iter().map(|&v| map[v]).collect()))
                .collect();
            cs.sort();
            if best.as_ref().map_or(true, |b| cs < *b) {
                best = Some(cs);
            }
            if !next_permutation(&mut order) {
                break;
            }
        }
        (self.num_variables(), k, best.unwrap_or_default())
    }

    /// Equality up to a label-preserving renaming of variables.
    pub fn is_isomorphic_to(&self, other: &LabeledInstance) -> bool {
        self.canonical_form() == other.canonical_form()
    }

    /// Number of constraints plus number of variables, the ordering key of catalogs.
    pub fn size(&self) -> usize {
        self.constraints.len() + self.num_variables()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(f: usize, vars: &[usize]) -> Constraint {
        Constraint::new(f, vars.to_vec())
    }

    #[test]
    fn product_identity_and_commutativity() {
        let k1 = LabeledInstance::anonymous(3, vec![c(0, &[0, 2]), c(0, &[2, 1])], vec![0, 1]).unwrap();
        let k2 = LabeledInstance::anonymous(3, vec![c(0, &[2, 0])], vec![1, 0]).unwrap();
        let u = LabeledInstance::identity(2);
        assert!(k1.product(&u).unwrap().is_isomorphic_to(&k1));
        assert!(k1.product(&k2).unwrap().is_isomorphic_to(&k2.product(&k1).unwrap()));
        assert!(k1.product(&LabeledInstance::identity(1)).is_err());
    }

    #[test]
    fn one_labeled_product_shares_the_labeled_variable() {
        let a = LabeledInstance::anonymous(2, vec![c(0, &[0, 1])], vec![0]).unwrap();
        let (p, origin) = a.product_with_provenance(&a).unwrap();
        assert_eq!(p.num_variables(), 3);
        assert_eq!(p.constraints(), &[c(0, &[0, 1]), c(0, &[0, 2])]);
        assert_eq!(origin, vec![Origin::Label(0), Origin::Left(1), Origin::Right(1)]);
    }

    #[test]
    fn simplicity() {
        assert!(!LabeledInstance::anonymous(1, vec![c(0, &[0, 0])], vec![]).unwrap().is_simple());
        assert!(LabeledInstance::identity(3).is_simple());
        assert!(!LabeledInstance::anonymous(2, vec![c(0, &[0, 1])], vec![0, 1]).unwrap().is_simple());
        let dup = LabeledInstance::anonymous(2, vec![c(0, &[0, 1]), c(0, &[1, 0])], vec![]).unwrap();
        assert!(!dup.is_simple());
        let two = LabeledInstance::anonymous(2, vec![c(0, &[0, 1]), c(1, &[1, 0])], vec![]).unwrap();
        assert!(two.is_simple());
    }

    #[test]
    fn labels_must_be_injective() {
        let err = LabeledInstance::anonymous(2, vec![], vec![1, 1]).unwrap_err();
        assert_eq!(err, Error::DuplicateLabel("v2".into()));
    }

    #[test]
    fn forgetting_labels() {
        let u = LabeledInstance::identity(3);
        assert_eq!(u.forget_labels(3).unwrap(), u);
        let f = u.forget_labels(1).unwrap();
        assert_eq!((f.k(), f.unlabeled_variables().len()), (1, 2));
        assert!(u.forget_labels(4).is_err());
    }
}
