//! Spans of gadget signature matrices.

use std::collections::HashSet;

use crate::csp::CFSet;
use crate::error::{Error, Result};
use crate::intertwiners::{intertwiner_basis, PermutationGroup};
use crate::linalg::Basis;
use crate::scalar::Scalar;
use crate::structure::automorphisms;
use crate::tensor::{pow_usize, FlatMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanConfig {
    /// Largest vertex count enumerated.
    pub bound: usize,
    /// Largest number of gadgets evaluated over all bounds.
    pub gadget_cap: usize,
}

impl Default for SpanConfig {
    fn default() -> Self {
        SpanConfig { bound: 6, gadget_cap: 200_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpanStatus {
    /// The span reached `dim C_{Aut(F)}(k, ℓ)`.
    Certified,
    /// The dimension did not move over the last two bounds.
    Stalled,
    BoundReached,
    CapReached,
}

impl SpanStatus {
    pub fn name(self) -> &'static str {
        match self {
            SpanStatus::Certified => "certified",
            SpanStatus::Stalled => "stalled",
            SpanStatus::BoundReached => "bound-reached",
            SpanStatus::CapReached => "cap-reached",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SpanReport {
    pub k: usize,
    pub l: usize,
    /// `dim C_{Aut(F)}(k, ℓ)`.
    pub target: usize,
    /// Span dimension after each bound `1, 2, ..`.
    pub dimensions: Vec<usize>,
    /// Independent signature matrices, in discovery order.
    pub basis: Vec<FlatMatrix>,
    /// Whether every enumerated matrix lies in `C_{Aut(F)}(k, ℓ)`.
    pub within_intertwiners: bool,
    pub gadgets: usize,
    pub status: SpanStatus,
}

impl SpanReport {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

/// Span of `T(𝒦)` over gadgets `𝒦` in the bipartite class with `k` outputs,
/// `ℓ` inputs and at most `config.bound` vertices, grown one vertex count at
/// a time. Such a gadget is a multiset of constraint vertices together with
/// a partition of all edge ends (dangling ends first) into equality vertices.
pub fn gadget_span(set: &CFSet, k: usize, l: usize, config: &SpanConfig) -> Result<SpanReport> {
    if !set.has_unit_weights() {
        return Err(Error::Precondition("gadgets carry no domain weights".into()));
    }
    if set.conjugate().functions().iter().any(|f| !set.functions().contains(f)) {
        return Err(Error::Precondition("the function set is not closed under conjugation".into()));
    }
    let q = set.q();
    let aut = PermutationGroup::from_elements(q, automorphisms(set))?;
    let space = intertwiner_basis(&aut, k, l);
    let len = pow_usize(q, k + l);
    let (rows, cols) = (pow_usize(q, k), pow_usize(q, l));
    let mut report = SpanReport {
        k,
        l,
        target: space.dimension(),
        dimensions: vec![],
        basis: vec![],
        within_intertwiners: true,
        gadgets: 0,
        status: SpanStatus::BoundReached,
    };
    let mut echelon = Basis::new(len);
    let mut seen: HashSet<Vec<Scalar>> = HashSet::new();
    let arities = set.arities();
    'bounds: for b in 1..=config.bound {
        for c in 0..b {
            let v = b - c;
            for pick in multisets(set.len(), c) {
                let slot_count = k + l + pick.iter().map(|&j| arities[j]).sum::<usize>();
                let mut stop = false;
                set_partitions(slot_count, v, &mut |blocks| {
                    report.gadgets += 1;
                    if report.gadgets > config.gadget_cap {
                        stop = true;
                        return false;
                    }
                    let t = evaluate(set, k + l, &pick, blocks, v);
                    if seen.insert(t.clone()) {
                        let m = FlatMatrix::new(rows, cols, t).expect("sized");
                        if !space.contains(&m) {
                            report.within_intertwiners = false;
                        }
                        if echelon.insert(m.entries()) {
                            report.basis.push(m);
                        }
                    }
                    true
                });
                if stop {
                    report.status = SpanStatus::CapReached;
                    report.dimensions.push(echelon.rank());
                    break 'bounds;
                }
            }
        }
        report.dimensions.push(echelon.rank());
        if echelon.rank() == report.target {
            report.status = SpanStatus::Certified;
            break;
        }
        if let [.., a, b, c] = report.dimensions[..] {
            if a == b && b == c {
                report.status = SpanStatus::Stalled;
                break;
            }
        }
    }
    Ok(report)
}

/// Row-major entries of the gadget whose slot `s` sits on equality vertex
/// `blocks[s]`; the first `dangling` slots are the outputs then the inputs
/// top to bottom, the rest the arguments of the constraint vertices `pick`.
fn evaluate(set: &CFSet, dangling: usize, pick: &[usize], blocks: &[usize], v: usize) -> Vec<Scalar> {
    let q = set.q();
    let mut out = vec![Scalar::zero(); pow_usize(q, dangling)];
    let mut factors = vec![];
    let mut at = dangling;
    for &j in pick {
        let n = set.function(j).arity();
        factors.push((set.function(j), &blocks[at..at + n]));
        at += n;
    }
    // Isolated equality vertices only arise with no slots at all.
    let scale = if blocks.is_empty() { Scalar::from_int(q as i64).pow(v as u32) } else { Scalar::one() };
    let mut values = vec![0usize; v];
    let mut args = vec![];
    loop {
        let mut term = scale.clone();
        for (f, bs) in &factors {
            args.clear();
            args.extend(bs.iter().map(|&b| values[b]));
            term *= f.at(&args);
            if term.is_zero() {
                break;
            }
        }
        if !term.is_zero() {
            let index = blocks[..dangling].iter().fold(0, |acc, &b| acc * q + values[b]);
            out[index] += &term;
        }
        let mut i = v;
        loop {
            if i == 0 {
                return out;
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

fn multisets(items: usize, size: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, items: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..items {
            cur.push(i);
            go(i, items, size, cur, out);
            cur.pop();
        }
    }
    let mut out = vec![];
    go(0, items, size, &mut vec![], &mut out);
    out
}

/// Visits every partition of `n` slots into exactly `v` blocks as a
/// restricted growth string; stops when `visit` returns false.
fn set_partitions(n: usize, v: usize, visit: &mut impl FnMut(&[usize]) -> bool) {
    if n == 0 {
        // The isolated-vertex case is handled by the caller's scale.
        if v > 0 {
            visit(&[]);
        }
        return;
    }
    fn go(i: usize, used: usize, n: usize, v: usize, cur: &mut Vec<usize>, visit: &mut impl FnMut(&[usize]) -> bool) -> bool {
        if i == n {
            return used < v || visit(cur);
        }
        if n - i < v - used {
            return true;
        }
        for b in 0..=used.min(v - 1) {
            cur.push(b);
            let go_on = go(i + 1, used.max(b + 1), n, v, cur, visit);
            cur.pop();
            if !go_on {
                return false;
            }
        }
        true
    }
    go(0, 0, n, v, &mut vec![], visit);
}
