//! Signature grids and gadgets in the context of `Holant(F | EQ)`.
//!
//! A gadget lists its dangling edges as `outputs` and `inputs`. The signature
//! matrix assigns `x_1..x_k` to the outputs in list order and `y_ℓ..y_1` to the
//! inputs in list order, so input list position `p` carries `y_{ℓ-p+1}`.

mod decompose;
mod expr;

pub use decompose::{decompose, Decomposition, Stage};
pub use expr::{equality_expression, permutation_gadget, permutation_matrix, swap_layers, GadgetExpr};

use crate::csp::{CFSet, LabeledInstance};
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::scalar::Scalar;
use crate::tensor::{pow_usize, ConstraintFunction, FlatMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Signature {
    /// `E_deg`. A degree-0 equality vertex still carries a value and
    /// contributes `q`.
    Eq,
    /// Index into the gadget's function table.
    Fn(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub signature: Signature,
    /// Incident edges in argument order; a self-loop appears twice.
    pub edges: Vec<usize>,
}

impl Vertex {
    pub fn eq(edges: Vec<usize>) -> Self {
        Vertex { signature: Signature::Eq, edges }
    }

    pub fn func(j: usize, edges: Vec<usize>) -> Self {
        Vertex { signature: Signature::Fn(j), edges }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gadget {
    q: usize,
    functions: Vec<ConstraintFunction>,
    vertices: Vec<Vertex>,
    edges: usize,
    outputs: Vec<usize>,
    inputs: Vec<usize>,
}

impl Gadget {
    pub fn new(
        q: usize,
        functions: Vec<ConstraintFunction>,
        vertices: Vec<Vertex>,
        edges: usize,
        outputs: Vec<usize>,
        inputs: Vec<usize>,
    ) -> Result<Self> {
        if q == 0 {
            return Err(Error::Precondition("domain size must be positive".into()));
        }
        if let Some(f) = functions.iter().find(|f| f.q() != q) {
            return Err(Error::DomainMismatch(q, f.q()));
        }
        let mut count = vec![0usize; edges];
        for v in &vertices {
            if let Signature::Fn(j) = v.signature {
                let f = functions.get(j).ok_or(Error::UnknownFunction { index: j, count: functions.len() })?;
                if f.arity() != v.edges.len() {
                    return Err(Error::ArityMismatch { expected: f.arity(), found: v.edges.len() });
                }
            }
            for &e in &v.edges {
                if e >= edges {
                    return Err(Error::Precondition(format!("edge {e} out of range")));
                }
                count[e] += 1;
            }
        }
        let mut dangling = vec![false; edges];
        for &e in outputs.iter().chain(&inputs) {
            if e >= edges || dangling[e] {
                return Err(Error::Precondition(format!("dangling edge {e} listed twice or out of range")));
            }
            dangling[e] = true;
        }
        for e in 0..edges {
            match (count[e], dangling[e]) {
                (1, true) | (2, false) => {}
                (c, d) => {
                    return Err(Error::Precondition(format!(
                        "edge {e} has {c} endpoints and is {}listed as dangling",
                        if d { "" } else { "not " }
                    )))
                }
            }
        }
        Ok(Gadget { q, functions, vertices, edges, outputs, inputs })
    }

    /// A closed grid.
    pub fn grid(q: usize, functions: Vec<ConstraintFunction>, vertices: Vec<Vertex>, edges: usize) -> Result<Self> {
        Gadget::new(q, functions, vertices, edges, vec![], vec![])
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn functions(&self) -> &[ConstraintFunction] {
        &self.functions
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    /// `(k, ℓ)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.outputs.len(), self.inputs.len())
    }

    /// `𝔼^{m,d}`: one equality vertex with `m` outputs and `d` inputs.
    pub fn equality(q: usize, m: usize, d: usize) -> Self {
        let vertex = Vertex::eq((0..m + d).collect());
        Gadget::new(q, vec![], vec![vertex], m + d, (0..m).collect(), (m..m + d).collect()).expect("valid")
    }

    /// `𝕀 = 𝔼^{1,1}`.
    pub fn identity(q: usize) -> Self {
        Gadget::equality(q, 1, 1)
    }

    /// The gadget with no vertices and no edges; `T = [1]`.
    pub fn empty(q: usize) -> Self {
        Gadget::new(q, vec![], vec![], 0, vec![], vec![]).expect("valid")
    }

    /// `𝔽`: one vertex with every edge an output, edge `i` the `i`-th argument.
    pub fn function(f: ConstraintFunction) -> Self {
        let (q, n) = (f.q(), f.arity());
        Gadget::new(q, vec![f], vec![Vertex::func(0, (0..n).collect())], n, (0..n).collect(), vec![]).expect("valid")
    }

    /// `𝕊_σ` built from `k` copies of `𝕀`: output `i` shares its `E_2` with the
    /// input in top-to-bottom position `σ(i)`.
    pub fn permutation(q: usize, sigma: &Permutation) -> Self {
        let k = sigma.len();
        let vertices = (0..k).map(|i| Vertex::eq(vec![i, k + i])).collect();
        // Input edge k+i sits at top-to-bottom position σ(i), i.e. list position k-1-σ(i).
        let mut inputs = vec![0; k];
        for i in 0..k {
            inputs[k - 1 - sigma.apply(i)] = k + i;
        }
        Gadget::new(q, vec![], vertices, 2 * k, (0..k).collect(), inputs).expect("valid")
    }

    /// `𝕊 = 𝕊_{(1 2)}`.
    pub fn swap(q: usize) -> Self {
        Gadget::permutation(q, &Permutation::transposition(2, 0, 1))
    }

    /// Appends another gadget's vertices, edges and functions, returning the
    /// edge offset. Equal functions share a table entry.
    fn absorb(&mut self, other: &Gadget) -> usize {
        let map: Vec<usize> = other
            .functions
            .iter()
            .map(|f| match self.functions.iter().position(|g| g == f) {
                Some(i) => i,
                None => {
                    self.functions.push(f.clone());
                    self.functions.len() - 1
                }
            })
            .collect();
        let offset = self.edges;
        for v in &other.vertices {
            let signature = match v.signature {
                Signature::Eq => Signature::Eq,
                Signature::Fn(j) => Signature::Fn(map[j]),
            };
            self.vertices.push(Vertex { signature, edges: v.edges.iter().map(|e| e + offset).collect() });
        }
        self.edges += other.edges;
        offset
    }

    fn check_q(&self, other: &Gadget) -> Result<()> {
        if self.q != other.q {
            return Err(Error::DomainMismatch(self.q, other.q));
        }
        Ok(())
    }

    /// `𝒦₁ ⊗ 𝒦₂`, with `𝒦₁` above `𝒦₂`.
    pub fn tensor(&self, other: &Gadget) -> Result<Gadget> {
        self.check_q(other)?;
        let mut out = self.clone();
        let offset = out.absorb(other);
        out.outputs.extend(other.outputs.iter().map(|e| e + offset));
        let mut inputs: Vec<usize> = other.inputs.iter().map(|e| e + offset).collect();
        inputs.extend(&self.inputs);
        out.inputs = inputs;
        Ok(out)
    }

    /// `𝒦*`: reflected, with conjugated signatures.
    pub fn adjoint(&self) -> Gadget {
        let mut out = self.clone();
        out.functions = self.functions.iter().map(ConstraintFunction::conjugate).collect();
        out.outputs = self.inputs.iter().rev().copied().collect();
        out.inputs = self.outputs.iter().rev().copied().collect();
        out
    }

    /// `𝒦₁ ∘ 𝒦₂` with adjacent equality vertices contracted.
    pub fn compose(&self, other: &Gadget) -> Result<Gadget> {
        self.compose_with(other, true)
    }

    /// `𝒦₁ ∘ 𝒦₂`: input `i` of `𝒦₁` (list order) is merged with output `k-1-i`
    /// of `𝒦₂`.
    pub fn compose_with(&self, other: &Gadget, contract: bool) -> Result<Gadget> {
        self.check_q(other)?;
        let k = self.inputs.len();
        if other.outputs.len() != k {
            return Err(Error::ArityMismatch { expected: k, found: other.outputs.len() });
        }
        let mut out = self.clone();
        let offset = out.absorb(other);
        for i in 0..k {
            let keep = self.inputs[i];
            let gone = other.outputs[k - 1 - i] + offset;
            for v in &mut out.vertices {
                for e in &mut v.edges {
                    if *e == gone {
                        *e = keep;
                    }
                }
            }
        }
        out.inputs = other.inputs.iter().map(|e| e + offset).collect();
        let mut out = out.compacted();
        if contract {
            out = out.contract_equalities();
        }
        Ok(out)
    }

    /// Renumbers edges densely and drops edges no vertex uses.
    fn compacted(mut self) -> Gadget {
        let mut used = vec![false; self.edges];
        for v in &self.vertices {
            for &e in &v.edges {
                used[e] = true;
            }
        }
        let mut map = vec![usize::MAX; self.edges];
        let mut next = 0;
        for e in 0..self.edges {
            if used[e] {
                map[e] = next;
                next += 1;
            }
        }
        for v in &mut self.vertices {
            for e in &mut v.edges {
                *e = map[*e];
            }
        }
        self.outputs = self.outputs.iter().map(|&e| map[e]).collect();
        self.inputs = self.inputs.iter().map(|&e| map[e]).collect();
        self.edges = next;
        self
    }

    /// Endpoints of each edge as `(vertex, slot)` pairs.
    fn endpoints(&self) -> Vec<Vec<(usize, usize)>> {
        let mut ends = vec![vec![]; self.edges];
        for (vi, v) in self.vertices.iter().enumerate() {
            for (slot, &e) in v.edges.iter().enumerate() {
                ends[e].push((vi, slot));
            }
        }
        ends
    }

    /// Contracts every edge joining two equality vertices, self-loops
    /// included: `E_a` and `E_b` become `E_{a+b-2}`.
    pub fn contract_equalities(&self) -> Gadget {
        let mut g = self.clone();
        loop {
            let ends = g.endpoints();
            let found = (0..g.edges).find(|&e| {
                ends[e].len() == 2 && ends[e].iter().all(|&(v, _)| g.vertices[v].signature == Signature::Eq)
            });
            let Some(e) = found else { break };
            let (a, b) = (ends[e][0].0, ends[e][1].0);
            let mut merged: Vec<usize> = g.vertices[a].edges.iter().copied().filter(|&x| x != e).collect();
            if a != b {
                merged.extend(g.vertices[b].edges.iter().copied().filter(|&x| x != e));
            }
            g.vertices[a].edges = merged;
            if a != b {
                g.vertices.remove(b);
            }
            g = g.compacted();
        }
        g
    }

    /// Erases `E_2` vertices sitting on an edge with at least one internal
    /// side, after contracting equality edges.
    pub fn normalize(&self) -> Gadget {
        let mut g = self.contract_equalities();
        loop {
            let ends = g.endpoints();
            let found = g.vertices.iter().enumerate().find_map(|(vi, v)| {
                if v.signature != Signature::Eq || v.edges.len() != 2 || v.edges[0] == v.edges[1] {
                    return None;
                }
                let internal = v.edges.iter().position(|&e| ends[e].len() == 2)?;
                Some((vi, v.edges[internal], v.edges[1 - internal]))
            });
            let Some((vi, inner, other)) = found else { break };
            let (w, slot) = *ends[inner].iter().find(|&&(x, _)| x != vi).expect("internal edge");
            g.vertices[w].edges[slot] = other;
            g.vertices.remove(vi);
            g = g.compacted();
        }
        g
    }

    /// Variables of the evaluation: one per class of equality vertices and
    /// one per edge without an equality endpoint. Returns the variable of
    /// each edge and the number of variables.
    fn variables(&self) -> (Vec<usize>, usize) {
        let n = self.vertices.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let ends = self.endpoints();
        for e in &ends {
            if e.len() == 2 && e.iter().all(|&(v, _)| self.vertices[v].signature == Signature::Eq) {
                let (a, b) = (find(&mut parent, e[0].0), find(&mut parent, e[1].0));
                parent[a] = b;
            }
        }
        let mut var_of_vertex = vec![usize::MAX; n];
        let mut count = 0;
        for v in 0..n {
            if self.vertices[v].signature == Signature::Eq {
                let r = find(&mut parent, v);
                if var_of_vertex[r] == usize::MAX {
                    var_of_vertex[r] = count;
                    count += 1;
                }
                var_of_vertex[v] = var_of_vertex[r];
            }
        }
        let mut var_of_edge = vec![0; self.edges];
        for (e, end) in ends.iter().enumerate() {
            match end.iter().find(|&&(v, _)| self.vertices[v].signature == Signature::Eq) {
                Some(&(v, _)) => var_of_edge[e] = var_of_vertex[v],
                None => {
                    var_of_edge[e] = count;
                    count += 1;
                }
            }
        }
        (var_of_edge, count)
    }

    /// `T(𝒦) ∈ 𝔽^{q^k × q^ℓ}`, by summing over assignments to the variables
    /// of [`Gadget::variables`].
    pub fn signature_matrix(&self) -> FlatMatrix {
        let q = self.q;
        let (k, l) = self.shape();
        let (var_of_edge, count) = self.variables();
        let mut out = vec![Scalar::zero(); pow_usize(q, k) * pow_usize(q, l)];
        let cols = pow_usize(q, l);
        let factors: Vec<(&ConstraintFunction, Vec<usize>)> = self
            .vertices
            .iter()
            .filter_map(|v| match v.signature {
                Signature::Fn(j) => Some((&self.functions[j], v.edges.iter().map(|&e| var_of_edge[e]).collect())),
                Signature::Eq => None,
            })
            .collect();
        let out_vars: Vec<usize> = self.outputs.iter().map(|&e| var_of_edge[e]).collect();
        // Input list position p carries y_{ℓ-p}, so column digits read the list backwards.
        let in_vars: Vec<usize> = self.inputs.iter().rev().map(|&e| var_of_edge[e]).collect();
        let mut values = vec![0usize; count];
        let mut args = vec![];
        loop {
            let mut term = Scalar::one();
            for (f, vars) in &factors {
                args.clear();
                args.extend(vars.iter().map(|&v| values[v]));
                let x = f.at(&args);
                if x.is_zero() {
                    term = Scalar::zero();
                    break;
                }
                term *= x;
            }
            if !term.is_zero() {
                let row = out_vars.iter().fold(0, |acc, &v| acc * q + values[v]);
                let col = in_vars.iter().fold(0, |acc, &v| acc * q + values[v]);
                out[row * cols + col] += &term;
            }
            let mut i = count;
            loop {
                if i == 0 {
                    return FlatMatrix::new(pow_usize(q, k), cols, out).expect("sized");
                }
                i -= 1;
                values[i] += 1;
                if values[i] < q {
                    break;
                }
                values[i] = 0;
            }
        }
    }

    /// Holant value with dangling edges pinned: output `i` to `x[i]`, input
    /// list position `p` to `y[ℓ-1-p]`. Direct sum over edge assignments.
    pub fn pinned_value(&self, x: &[usize], y: &[usize]) -> Result<Scalar> {
        let (k, l) = self.shape();
        if x.len() != k || y.len() != l {
            return Err(Error::DimensionMismatch(format!("pins of length {}+{} for shape ({k},{l})", x.len(), y.len())));
        }
        let mut fixed = vec![None; self.edges];
        for (i, &e) in self.outputs.iter().enumerate() {
            fixed[e] = Some(x[i]);
        }
        for (p, &e) in self.inputs.iter().enumerate() {
            fixed[e] = Some(y[l - 1 - p]);
        }
        let free: Vec<usize> = (0..self.edges).filter(|&e| fixed[e].is_none()).collect();
        let mut sigma: Vec<usize> = fixed.iter().map(|v| v.unwrap_or(0)).collect();
        let isolated = self.vertices.iter().filter(|v| v.signature == Signature::Eq && v.edges.is_empty()).count();
        let scale = Scalar::from_int(self.q as i64).pow(isolated as u32);
        let mut total = Scalar::zero();
        let mut args = vec![];
        loop {
            let mut term = Scalar::one();
            for v in &self.vertices {
                args.clear();
                args.extend(v.edges.iter().map(|&e| sigma[e]));
                let value = match v.signature {
                    Signature::Eq => {
                        if args.windows(2).all(|w| w[0] == w[1]) {
                            continue;
                        }
                        Scalar::zero()
                    }
                    Signature::Fn(j) => self.functions[j].at(&args).clone(),
                };
                if value.is_zero() {
                    term = Scalar::zero();
                    break;
                }
                term *= &value;
            }
            total += &term;
            let mut i = free.len();
            loop {
                if i == 0 {
                    return Ok(total * scale);
                }
                i -= 1;
                sigma[free[i]] += 1;
                if sigma[free[i]] < self.q {
                    break;
                }
                sigma[free[i]] = 0;
            }
        }
    }

    /// Whether every dangling edge meets an equality vertex and every internal
    /// edge joins an equality vertex to a constraint vertex.
    pub fn is_bipartite_eq(&self) -> bool {
        self.endpoints().iter().all(|end| end.iter().filter(|&&(v, _)| self.vertices[v].signature == Signature::Eq).count() == 1)
    }

    /// Structural equality up to renumbering vertices and edges: signatures
    /// compared by value, constraint argument order and dangling order
    /// preserved.
    pub fn is_isomorphic_to(&self, other: &Gadget) -> bool {
        if self.q != other.q
            || self.shape() != other.shape()
            || self.vertices.len() != other.vertices.len()
            || self.edges != other.edges
        {
            return false;
        }
        let mut pi = vec![usize::MAX; self.vertices.len()];
        let mut used = vec![false; other.vertices.len()];
        self.match_vertices(other, 0, &mut pi, &mut used)
    }

    fn same_signature(&self, a: &Vertex, other: &Gadget, b: &Vertex) -> bool {
        a.edges.len() == b.edges.len()
            && match (a.signature, b.signature) {
                (Signature::Eq, Signature::Eq) => true,
                (Signature::Fn(i), Signature::Fn(j)) => self.functions[i] == other.functions[j],
                _ => false,
            }
    }

    fn match_vertices(&self, other: &Gadget, i: usize, pi: &mut [usize], used: &mut [bool]) -> bool {
        if i == self.vertices.len() {
            return self.check_vertex_map(other, pi);
        }
        for j in 0..other.vertices.len() {
            if !used[j] && self.same_signature(&self.vertices[i], other, &other.vertices[j]) {
                used[j] = true;
                pi[i] = j;
                if self.match_vertices(other, i + 1, pi, used) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }

    /// Given the vertex bijection, edges at constraint slots and dangling
    /// positions are forced; the remaining edges only need matching endpoint
    /// multisets.
    fn check_vertex_map(&self, other: &Gadget, pi: &[usize]) -> bool {
        let ends_a = self.endpoints();
        let ends_b = other.endpoints();
        let key_a = |e: usize| {
            let mut k: Vec<usize> = ends_a[e].iter().map(|&(v, _)| pi[v]).collect();
            k.sort_unstable();
            k
        };
        let key_b = |t: usize| {
            let mut k: Vec<usize> = ends_b[t].iter().map(|&(v, _)| v).collect();
            k.sort_unstable();
            k
        };
        let mut image = vec![usize::MAX; self.edges];
        for (a, b) in self.outputs.iter().zip(&other.outputs).chain(self.inputs.iter().zip(&other.inputs)) {
            image[*a] = *b;
        }
        for (vi, v) in self.vertices.iter().enumerate() {
            if let Signature::Fn(_) = v.signature {
                for (slot, &e) in v.edges.iter().enumerate() {
                    let target = other.vertices[pi[vi]].edges[slot];
                    if image[e] != usize::MAX && image[e] != target {
                        return false;
                    }
                    image[e] = target;
                }
            }
        }
        let mut taken = vec![false; other.edges];
        for e in 0..self.edges {
            if image[e] == usize::MAX {
                continue;
            }
            let t = image[e];
            if taken[t] || key_a(e) != key_b(t) {
                return false;
            }
            taken[t] = true;
        }
        let mut rest_a: Vec<Vec<usize>> = (0..self.edges).filter(|&e| image[e] == usize::MAX).map(key_a).collect();
        let mut rest_b: Vec<Vec<usize>> = (0..other.edges).filter(|&t| !taken[t]).map(key_b).collect();
        rest_a.sort();
        rest_b.sort();
        rest_a == rest_b
    }
}

/// `Ω_K` with the first `k_out` labels as outputs and the rest as inputs
/// (label `k_out + j` is `y_j`). Variables become equality vertices in
/// variable order, constraints become constraint vertices in constraint
/// order. Domain weights are not representable and are rejected.
pub fn instance_gadget(set: &CFSet, instance: &LabeledInstance, k_out: usize) -> Result<Gadget> {
    instance.check_against(set)?;
    if !set.has_unit_weights() {
        return Err(Error::Precondition("gadgets carry no domain weights".into()));
    }
    if k_out > instance.k() {
        return Err(Error::Precondition(format!("{k_out} outputs requested from {} labels", instance.k())));
    }
    let n = instance.num_variables();
    let mut var_edges: Vec<Vec<usize>> = vec![vec![]; n];
    let mut vertices = vec![];
    let mut edges = 0;
    let mut constraint_vertices = vec![];
    for c in instance.constraints() {
        let mut es = vec![];
        for &v in &c.vars {
            var_edges[v].push(edges);
            es.push(edges);
            edges += 1;
        }
        constraint_vertices.push(Vertex::func(c.function, es));
    }
    let mut dangling = vec![];
    for &v in instance.labels() {
        var_edges[v].push(edges);
        dangling.push(edges);
        edges += 1;
    }
    vertices.extend(var_edges.into_iter().map(Vertex::eq));
    vertices.extend(constraint_vertices);
    let outputs = dangling[..k_out].to_vec();
    let inputs = dangling[k_out..].iter().rev().copied().collect();
    Gadget::new(set.q(), set.functions().to_vec(), vertices, edges, outputs, inputs)
}

/// `Ω_K`: every label an output.
pub fn csp_to_grid(set: &CFSet, instance: &LabeledInstance) -> Result<Gadget> {
    instance_gadget(set, instance, instance.k())
}

/// Holant value of a closed grid, by direct summation over edge assignments.
pub fn holant_value(grid: &Gadget) -> Result<Scalar> {
    if grid.shape() != (0, 0) {
        return Err(Error::Precondition("holant_value needs a grid without dangling edges".into()));
    }
    grid.pinned_value(&[], &[])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::Constraint;
    use crate::partition::{partition_function, pinned_partition};
    use crate::tensor::tuples;

    fn f2(entries: &[i64]) -> ConstraintFunction {
        ConstraintFunction::from_ints(2, 2, entries).unwrap()
    }

    #[test]
    fn small_grids() {
        let lp = Gadget::grid(2, vec![], vec![Vertex::eq(vec![0, 0])], 1).unwrap();
        assert_eq!(holant_value(&lp).unwrap(), Scalar::from_int(2));
        let e2 = ConstraintFunction::equality(2, 2).unwrap();
        let lp = Gadget::grid(2, vec![e2], vec![Vertex::func(0, vec![0, 0])], 1).unwrap();
        assert_eq!(holant_value(&lp).unwrap(), Scalar::from_int(2));
        let pair = Gadget::grid(2, vec![], vec![Vertex::eq(vec![0]), Vertex::eq(vec![0])], 1).unwrap();
        assert_eq!(holant_value(&pair).unwrap(), Scalar::from_int(2));
        assert_eq!(holant_value(&Gadget::empty(3)).unwrap(), Scalar::one());
    }

    #[test]
    fn fundamental_matrices() {
        assert_eq!(Gadget::identity(3).signature_matrix(), FlatMatrix::identity(3));
        let e = ConstraintFunction::equality(2, 4).unwrap();
        assert_eq!(Gadget::equality(2, 2, 2).signature_matrix(), e.flatten(2, 2).unwrap());
        let f = ConstraintFunction::from_ints(2, 3, &[1, 2, 3, 4, 5, 6, 7, 8]).unwrap();
        assert_eq!(Gadget::function(f.clone()).signature_matrix(), f.flatten(3, 0).unwrap());
        assert_eq!(Gadget::equality(2, 0, 0).signature_matrix(), FlatMatrix::scalar(Scalar::from_int(2)));
        let s = Gadget::swap(2).signature_matrix();
        for x in tuples(2, 2) {
            for y in tuples(2, 2) {
                let expect = (x[0] == y[1] && x[1] == y[0]) as i64;
                assert_eq!(s.get(x[0] * 2 + x[1], y[0] * 2 + y[1]), &Scalar::from_int(expect));
            }
        }
    }

    #[test]
    fn operations_match_matrices() {
        let a = Gadget::function(f2(&[1, 2, 0, 3])).compose(&Gadget::equality(2, 1, 0)).unwrap_err();
        assert!(matches!(a, Error::ArityMismatch { .. }));
        let f = Gadget::function(f2(&[1, 2, 0, 3]));
        let g = f.adjoint().tensor(&Gadget::identity(2)).unwrap();
        let h = Gadget::equality(2, 3, 1);
        let comp = h.compose(&g).unwrap();
        let expect = h.signature_matrix().matmul(&g.signature_matrix()).unwrap();
        assert_eq!(comp.signature_matrix(), expect);
        assert_eq!(h.compose_with(&g, false).unwrap().signature_matrix(), expect);
        let t = f.tensor(&h).unwrap();
        assert_eq!(t.signature_matrix(), f.signature_matrix().kron(&h.signature_matrix()));
        assert_eq!(comp.adjoint().signature_matrix(), expect.conj_transpose());
        assert!(comp.adjoint().adjoint().is_isomorphic_to(&comp));
    }

    #[test]
    fn identity_from_splitters() {
        let e12 = Gadget::equality(2, 1, 2);
        let i = e12.compose(&e12.adjoint()).unwrap();
        assert!(i.is_isomorphic_to(&Gadget::identity(2)));
        let s = Gadget::swap(2).normalize();
        assert_eq!(s.signature_matrix(), Gadget::swap(2).signature_matrix());
    }

    #[test]
    fn bridge_to_partition_functions() {
        let set = CFSet::unweighted(vec![f2(&[1, 2, 0, 1]), ConstraintFunction::from_ints(2, 1, &[3, 1]).unwrap()]).unwrap();
        let k = LabeledInstance::anonymous(
            4,
            vec![Constraint::new(0, vec![0, 2]), Constraint::new(0, vec![2, 3]), Constraint::new(1, vec![3]), Constraint::new(0, vec![1, 1])],
            vec![0, 1, 3],
        )
        .unwrap();
        let g = instance_gadget(&set, &k, 1).unwrap();
        let t = g.signature_matrix();
        for psi in tuples(2, 3) {
            let col = psi[1] * 2 + psi[2];
            assert_eq!(t.get(psi[0], col), &pinned_partition(&set, &k, &psi).unwrap());
            assert_eq!(g.pinned_value(&psi[..1], &psi[1..]).unwrap(), pinned_partition(&set, &k, &psi).unwrap());
        }
        let closed = k.forget_labels(0).unwrap();
        let grid = csp_to_grid(&set, &closed).unwrap();
        assert_eq!(holant_value(&grid).unwrap(), partition_function(&set, &closed).unwrap());
    }
}
