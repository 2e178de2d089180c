//! Intertwiner spaces of permutation groups on `[q]` and their relation to
//! gadget signature matrices.

mod span;
mod witness;

pub use span::{gadget_span, SpanConfig, SpanReport, SpanStatus};
pub use witness::{witness_sigma, SigmaWitness};

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::scalar::Scalar;
use crate::tensor::{digits, index_of_digits, pow_usize, FlatMatrix};

#[derive(Clone, Debug)]
pub struct PermutationGroup {
    q: usize,
    generators: Vec<Permutation>,
    elements: OnceLock<Vec<Permutation>>,
}

impl PermutationGroup {
    pub fn new(q: usize, generators: Vec<Permutation>) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.len() != q) {
            return Err(Error::DimensionMismatch(format!("generator on {} points for q = {q}", g.len())));
        }
        Ok(PermutationGroup { q, generators, elements: OnceLock::new() })
    }

    pub fn trivial(q: usize) -> Self {
        PermutationGroup::new(q, vec![]).expect("no generators")
    }

    pub fn symmetric(q: usize) -> Self {
        let mut gens = vec![];
        if q >= 2 {
            gens.push(Permutation::transposition(q, 0, 1));
            gens.push(Permutation::new((0..q).map(|i| (i + 1) % q).collect()).expect("cycle"));
        }
        PermutationGroup::new(q, gens).expect("sized")
    }

    /// A group given by all of its elements, which are taken as generators.
    pub fn from_elements(q: usize, elements: Vec<Permutation>) -> Result<Self> {
        PermutationGroup::new(q, elements)
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    /// Every element, sorted, identity first.
    pub fn elements(&self) -> &[Permutation] {
        self.elements.get_or_init(|| {
            let id = Permutation::identity(self.q);
            let mut seen: BTreeSet<Permutation> = BTreeSet::from([id.clone()]);
            let mut queue = VecDeque::from([id]);
            while let Some(p) = queue.pop_front() {
                for g in &self.generators {
                    let next = g.compose(&p);
                    if seen.insert(next.clone()) {
                        queue.push_back(next);
                    }
                }
            }
            seen.into_iter().collect()
        })
    }

    pub fn order(&self) -> usize {
        self.elements().len()
    }

    pub fn contains(&self, sigma: &Permutation) -> bool {
        self.elements().binary_search(sigma).is_ok()
    }

    /// An element mapping `x` to `y` coordinatewise.
    pub fn carrier(&self, x: &[usize], y: &[usize]) -> Option<&Permutation> {
        if x.len() != y.len() {
            return None;
        }
        self.elements().iter().find(|s| s.apply_tuple(x) == y)
    }
}

impl PartialEq for PermutationGroup {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.elements() == other.elements()
    }
}

impl Eq for PermutationGroup {}

/// Subgroups of `𝔖_q` generated by at most two elements, each listed once,
/// ordered by size.
pub fn two_generated_subgroups(q: usize) -> Vec<PermutationGroup> {
    let all = Permutation::all(q);
    let mut seen = HashSet::new();
    let mut out = vec![];
    for (i, a) in all.iter().enumerate() {
        for b in &all[i..] {
            let g = PermutationGroup::new(q, vec![a.clone(), b.clone()]).expect("sized");
            if seen.insert(g.elements().to_vec()) {
                out.push(g);
            }
        }
    }
    out.sort_by_key(PermutationGroup::order);
    out
}

/// `C_G(k, ℓ)` with its orbit basis.
#[derive(Clone, Debug)]
pub struct IntertwinerSpace {
    q: usize,
    k: usize,
    l: usize,
    /// Orbit of each entry, in row-major order.
    orbit_of: Vec<usize>,
    basis: Vec<FlatMatrix>,
}

impl IntertwinerSpace {
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.k, self.l)
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[FlatMatrix] {
        &self.basis
    }

    /// The orbits as sets of row-major entry indices.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]; self.basis.len()];
        for (i, &o) in self.orbit_of.iter().enumerate() {
            out[o].push(i);
        }
        out
    }

    /// Whether `t` is constant on every orbit.
    pub fn contains(&self, t: &FlatMatrix) -> bool {
        if t.rows() != pow_usize(self.q, self.k) || t.cols() != pow_usize(self.q, self.l) {
            return false;
        }
        let mut value: Vec<Option<&Scalar>> = vec![None; self.basis.len()];
        t.entries().iter().zip(&self.orbit_of).all(|(x, &o)| match value[o] {
            Some(v) => v == x,
            None => {
                value[o] = Some(x);
                true
            }
        })
    }
}

/// Orbit basis of `C_G(k, ℓ)`: the indicator matrices of the orbits of `G`
/// acting diagonally on `[q]^k × [q]^ℓ`, ordered by least entry.
pub fn intertwiner_basis(group: &PermutationGroup, k: usize, l: usize) -> IntertwinerSpace {
    let q = group.q();
    let n = k + l;
    let total = pow_usize(q, n);
    let mut orbit_of = vec![usize::MAX; total];
    let mut count = 0;
    for start in 0..total {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        orbit_of[start] = count;
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            let x = digits(i, q, n);
            for g in group.generators() {
                let j = index_of_digits(&g.apply_tuple(&x), q);
                if orbit_of[j] == usize::MAX {
                    orbit_of[j] = count;
                    stack.push(j);
                }
            }
        }
        count += 1;
    }
    let (rows, cols) = (pow_usize(q, k), pow_usize(q, l));
    let basis = (0..count)
        .map(|o| FlatMatrix::from_fn(rows, cols, |r, c| Scalar::from_int((orbit_of[r * cols + c] == o) as i64)))
        .collect();
    IntertwinerSpace { q, k, l, orbit_of, basis }
}

/// `P_σ`, with `(P_σ)_{σ(b), b} = 1`.
pub fn permutation_action(sigma: &Permutation) -> FlatMatrix {
    let q = sigma.len();
    FlatMatrix::from_fn(q, q, |a, b| Scalar::from_int((a == sigma.apply(b)) as i64))
}

fn tensor_power(m: &FlatMatrix, n: usize) -> FlatMatrix {
    (0..n).fold(FlatMatrix::scalar(Scalar::one()), |acc, _| acc.kron(m))
}

/// `P_σ^{⊗k} T = T P_σ^{⊗ℓ}` for every generator `σ`.
pub fn is_intertwiner(t: &FlatMatrix, group: &PermutationGroup, k: usize, l: usize) -> Result<bool> {
    let q = group.q();
    if t.rows() != pow_usize(q, k) || t.cols() != pow_usize(q, l) {
        return Err(Error::DimensionMismatch(format!(
            "{}×{} matrix for shape ({k},{l}) at q = {q}",
            t.rows(),
            t.cols()
        )));
    }
    for g in group.generators() {
        let p = permutation_action(g);
        if tensor_power(&p, k).matmul(t)? != t.matmul(&tensor_power(&p, l))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Some element of `G` maps `x` to `y` coordinatewise.
pub fn same_orbit(x: &[usize], y: &[usize], group: &PermutationGroup) -> bool {
    group.carrier(x, y).is_some()
}

/// `v_x = v_y` for every basis vector `v` of `C_G(k, 0)`.
pub fn same_orbit_via_intertwiners(x: &[usize], y: &[usize], space: &IntertwinerSpace) -> Result<bool> {
    let (k, l) = space.shape();
    if l != 0 || x.len() != k || y.len() != k {
        return Err(Error::DimensionMismatch(format!("tuples of length {}, {} against C_G({k},{l})", x.len(), y.len())));
    }
    let q = space.q();
    if let Some(&v) = x.iter().chain(y).find(|&&v| v >= q) {
        return Err(Error::DomainOutOfRange { value: v, q });
    }
    let (i, j) = (index_of_digits(x, q), index_of_digits(y, q));
    Ok(space.basis().iter().all(|v| v.get(i, 0) == v.get(j, 0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holant::permutation_matrix;
    use crate::tensor::ConstraintFunction;

    #[test]
    fn groups() {
        assert_eq!(PermutationGroup::symmetric(3).order(), 6);
        assert_eq!(PermutationGroup::trivial(4).order(), 1);
        let subs = two_generated_subgroups(3);
        assert_eq!(subs.iter().map(PermutationGroup::order).collect::<Vec<_>>(), [1, 2, 2, 2, 3, 6]);
        assert_eq!(two_generated_subgroups(4).len(), 30);
    }

    #[test]
    fn orbit_bases() {
        let s2 = PermutationGroup::symmetric(2);
        let c = intertwiner_basis(&s2, 2, 0);
        assert_eq!(c.orbits(), [vec![0, 3], vec![1, 2]]);
        assert_eq!(intertwiner_basis(&PermutationGroup::trivial(2), 1, 2).dimension(), 8);
        let s3 = PermutationGroup::symmetric(3);
        let c = intertwiner_basis(&s3, 1, 1);
        assert!(c.contains(&FlatMatrix::identity(3)));
        assert!(c.contains(&FlatMatrix::from_fn(3, 3, |_, _| Scalar::one())));
        assert_eq!(c.dimension(), 2);
        for g in two_generated_subgroups(3) {
            for b in intertwiner_basis(&g, 1, 2).basis() {
                assert!(is_intertwiner(b, &g, 1, 2).unwrap());
            }
        }
    }

    #[test]
    fn standard_intertwiners() {
        for g in two_generated_subgroups(3) {
            assert!(is_intertwiner(&FlatMatrix::identity(3), &g, 1, 1).unwrap());
            let e20 = ConstraintFunction::equality(3, 2).unwrap().flatten(2, 0).unwrap();
            assert!(is_intertwiner(&e20, &g, 2, 0).unwrap());
            let s = permutation_matrix(3, &Permutation::transposition(2, 0, 1));
            assert!(is_intertwiner(&s, &g, 2, 2).unwrap());
        }
        let v = FlatMatrix::from_fn(2, 1, |r, _| Scalar::from_int(r as i64));
        assert!(!is_intertwiner(&v, &PermutationGroup::symmetric(2), 1, 0).unwrap());
        assert!(is_intertwiner(&v, &PermutationGroup::symmetric(2), 2, 0).is_err());
    }

    #[test]
    fn orbit_queries() {
        let s2 = PermutationGroup::symmetric(2);
        let t = PermutationGroup::trivial(2);
        assert!(same_orbit(&[0, 1], &[0, 1], &t));
        assert!(same_orbit(&[0, 1], &[1, 0], &s2));
        assert!(!same_orbit(&[0, 1], &[1, 0], &t));
        let c = intertwiner_basis(&s2, 2, 0);
        assert!(same_orbit_via_intertwiners(&[0, 1], &[1, 0], &c).unwrap());
        assert!(!same_orbit_via_intertwiners(&[0, 1], &[1, 1], &c).unwrap());
    }
}
