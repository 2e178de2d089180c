//! Seeded generators for function sets, instances and gadgets.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::csp::{CFSet, Constraint, LabeledInstance};
use crate::holant::{Gadget, Vertex};
use crate::scalar::Scalar;
use crate::tensor::{pow_usize, ConstraintFunction};

/// A function with entries drawn uniformly from `values`.
pub fn function<R: Rng>(rng: &mut R, q: usize, arity: usize, values: &[i64]) -> ConstraintFunction {
    let entries = (0..pow_usize(q, arity)).map(|_| Scalar::from_int(*values.choose(rng).expect("values"))).collect();
    ConstraintFunction::new(q, arity, entries).expect("sized")
}

/// `t` functions with arities in `1..=max_arity`, optionally with weights
/// drawn from `1..=3`.
pub fn function_set<R: Rng>(rng: &mut R, q: usize, t: usize, max_arity: usize, values: &[i64], weighted: bool) -> CFSet {
    let functions = (0..t)
        .map(|_| {
            let arity = rng.gen_range(1..=max_arity);
            function(rng, q, arity, values)
        })
        .collect();
    let weights = weighted.then(|| (0..q).map(|_| Scalar::from_int(rng.gen_range(1..=3))).collect());
    CFSet::new(q, functions, weights).expect("valid")
}

/// An instance on `n` variables with `m` constraints over `arities`, the
/// first `k` of a random variable order labeled.
pub fn instance<R: Rng>(rng: &mut R, arities: &[usize], n: usize, m: usize, k: usize) -> LabeledInstance {
    let constraints = (0..m)
        .map(|_| {
            let j = rng.gen_range(0..arities.len());
            Constraint::new(j, (0..arities[j]).map(|_| rng.gen_range(0..n)).collect())
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    LabeledInstance::anonymous(n, constraints, order[..k.min(n)].to_vec()).expect("valid")
}

/// A gadget with up to `max_vertices` vertices before padding, `k` outputs
/// and `l` inputs. Edge ends are paired at random, so self-loops, parallel
/// edges and constraint-constraint edges all occur.
pub fn gadget<R: Rng>(rng: &mut R, functions: &[ConstraintFunction], max_vertices: usize, k: usize, l: usize) -> Gadget {
    let q = functions.first().map_or(2, ConstraintFunction::q);
    let count = rng.gen_range(1..=max_vertices.max(1));
    let mut vertices: Vec<(Option<usize>, usize)> = (0..count)
        .map(|_| {
            if functions.is_empty() || rng.gen_bool(0.5) {
                (None, rng.gen_range(0..=3))
            } else {
                let j = rng.gen_range(0..functions.len());
                (Some(j), functions[j].arity())
            }
        })
        .collect();
    let mut slots: usize = vertices.iter().map(|v| v.1).sum();
    while slots < k + l || (slots - k - l) % 2 == 1 {
        vertices.push((None, 1));
        slots += 1;
    }
    let mut ends: Vec<(usize, usize)> =
        vertices.iter().enumerate().flat_map(|(vi, &(_, d))| (0..d).map(move |s| (vi, s))).collect();
    ends.shuffle(rng);
    let mut incidence: Vec<Vec<usize>> = vertices.iter().map(|&(_, d)| vec![0; d]).collect();
    let dangling = k + l;
    for (e, &(vi, s)) in ends[..dangling].iter().enumerate() {
        incidence[vi][s] = e;
    }
    let internal = (slots - dangling) / 2;
    for (i, pair) in ends[dangling..].chunks(2).enumerate() {
        for &(vi, s) in pair {
            incidence[vi][s] = dangling + i;
        }
    }
    let vertices = vertices
        .iter()
        .zip(incidence)
        .map(|(&(sig, _), edges)| match sig {
            None => Vertex::eq(edges),
            Some(j) => Vertex::func(j, edges),
        })
        .collect();
    Gadget::new(q, functions.to_vec(), vertices, dangling + internal, (0..k).collect(), (k..k + l).collect())
        .expect("valid by construction")
}

/// A gadget in which every edge has exactly one equality endpoint: `c`
/// constraint vertices and `v` equality vertices, in shuffled vertex order,
/// with `c + v ≤ max_vertices`.
pub fn bipartite_gadget<R: Rng>(
    rng: &mut R,
    functions: &[ConstraintFunction],
    max_vertices: usize,
    k: usize,
    l: usize,
) -> Gadget {
    let q = functions.first().map_or(2, ConstraintFunction::q);
    let max_vertices = max_vertices.max(2);
    let c = if functions.is_empty() { 0 } else { rng.gen_range(0..max_vertices) };
    let v = rng.gen_range(1..=max_vertices - c);
    let picks: Vec<usize> = (0..c).map(|_| rng.gen_range(0..functions.len())).collect();
    let mut eq_edges: Vec<Vec<usize>> = vec![vec![]; v];
    let mut edges = 0;
    let mut dangling = vec![];
    for _ in 0..k + l {
        eq_edges[rng.gen_range(0..v)].push(edges);
        dangling.push(edges);
        edges += 1;
    }
    let mut f_vertices = vec![];
    for &j in &picks {
        let mut es = vec![];
        for _ in 0..functions[j].arity() {
            eq_edges[rng.gen_range(0..v)].push(edges);
            es.push(edges);
            edges += 1;
        }
        f_vertices.push(Vertex::func(j, es));
    }
    for es in &mut eq_edges {
        es.shuffle(rng);
    }
    let mut vertices: Vec<Vertex> = eq_edges.into_iter().map(Vertex::eq).chain(f_vertices).collect();
    vertices.shuffle(rng);
    dangling.shuffle(rng);
    let outputs = dangling[..k].to_vec();
    let inputs = dangling[k..].to_vec();
    Gadget::new(q, functions.to_vec(), vertices, edges, outputs, inputs).expect("valid by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_are_valid_and_seeded() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let set = function_set(&mut rng, 3, 2, 2, &[0, 1, 2], true);
        for _ in 0..50 {
            let g = gadget(&mut rng, set.functions(), 5, 1, 2);
            assert_eq!(g.shape(), (1, 2));
            let b = bipartite_gadget(&mut rng, set.functions(), 5, 2, 1);
            assert!(b.is_bipartite_eq());
            let inst = instance(&mut rng, &set.arities(), 3, 2, 2);
            assert!(inst.check_against(&set).is_ok());
        }
        let again = function_set(&mut ChaCha8Rng::seed_from_u64(7), 3, 2, 2, &[0, 1, 2], true);
        assert_eq!(again, set);
    }
}
