//! Building a bipartite gadget from the fundamental gadgets.

use std::fmt;

use crate::error::{Error, Result};
use crate::holant::expr::{equality_expression, permutation_gadget, GadgetExpr};
use crate::holant::{Gadget, Signature};
use crate::perm::Permutation;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stage {
    /// `𝕊_σ`.
    Permutation(Permutation),
    /// `𝔼^{m_1,d_1} ⊗ .. ⊗ 𝔼^{m_r,d_r}`, one block per equality vertex.
    Equalities(Vec<(usize, usize)>),
    /// `𝔽_j ⊗ 𝕀^{⊗identity}`.
    Constraint { function: usize, identity: usize },
}

impl Stage {
    pub fn expr(&self) -> GadgetExpr {
        match self {
            Stage::Permutation(sigma) => permutation_gadget(sigma),
            Stage::Equalities(blocks) => GadgetExpr::tensor_all(blocks.iter().map(|&(m, d)| equality_expression(m, d))),
            Stage::Constraint { function, identity } => {
                GadgetExpr::Func(*function).tensor(GadgetExpr::identity_power(*identity))
            }
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stage::Permutation(sigma) => write!(f, "S_{}", sigma.cycle_string()),
            Stage::Equalities(blocks) => {
                let parts: Vec<String> = blocks.iter().map(|(m, d)| format!("E^{{{m},{d}}}")).collect();
                if parts.is_empty() {
                    write!(f, "1")
                } else {
                    write!(f, "{}", parts.join(" ⊗ "))
                }
            }
            Stage::Constraint { function, identity: 0 } => write!(f, "F{}", function + 1),
            Stage::Constraint { function, identity } => write!(f, "F{} ⊗ I^{identity}", function + 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    /// Composed left to right. Identity permutations are omitted.
    pub stages: Vec<Stage>,
}

impl Decomposition {
    pub fn expr(&self) -> GadgetExpr {
        GadgetExpr::compose_all(self.stages.iter().map(Stage::expr)).unwrap_or(GadgetExpr::Empty)
    }
}

impl fmt::Display for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.stages.iter().map(|s| format!("[{s}]")).collect();
        write!(f, "{}", parts.join(" ∘ "))
    }
}

/// Writes `𝒦` as `𝕊_ρ ∘ 𝒦₀ ∘ 𝕊_{σ_1} ∘ (𝔽_{j_1} ⊗ 𝕀^{⊗..}) ∘ .. ∘ 𝕊_υ`.
///
/// Equality vertices are contracted first; afterwards every edge must have
/// exactly one equality endpoint. Each equality vertex feeds its block of
/// `𝒦₀` with its edges to constraint vertices (incidence order) above its
/// dangling inputs (top-to-bottom order). Constraint vertices are peeled off
/// in vertex order, each permutation moving the strands of its arguments to
/// the top and keeping the rest in order.
pub fn decompose(gadget: &Gadget) -> Result<Decomposition> {
    let g = gadget.contract_equalities();
    if !g.is_bipartite_eq() {
        return Err(Error::Precondition(
            "every edge needs exactly one equality endpoint after contracting equality edges".into(),
        ));
    }
    let (k, l) = g.shape();
    let mut out_pos = vec![None; g.edge_count()];
    for (i, &e) in g.outputs().iter().enumerate() {
        out_pos[e] = Some(i);
    }
    // Top-to-bottom position of each input.
    let mut in_pos = vec![None; g.edge_count()];
    for (p, &e) in g.inputs().iter().enumerate() {
        in_pos[e] = Some(l - 1 - p);
    }

    let mut blocks = vec![];
    let mut k0_outputs = vec![];
    let mut strands = vec![];
    for v in g.vertices().iter().filter(|v| v.signature == Signature::Eq) {
        let mut outs: Vec<usize> = v.edges.iter().filter_map(|&e| out_pos[e]).collect();
        let mut ins: Vec<usize> = v.edges.iter().filter_map(|&e| in_pos[e]).collect();
        let internal: Vec<usize> =
            v.edges.iter().copied().filter(|&e| out_pos[e].is_none() && in_pos[e].is_none()).collect();
        outs.sort_unstable();
        ins.sort_unstable();
        blocks.push((outs.len(), internal.len() + ins.len()));
        k0_outputs.extend(outs);
        strands.extend(internal.into_iter().map(Strand::Edge));
        strands.extend(ins.into_iter().map(Strand::Input));
    }

    let mut stages = vec![];
    let mut rho = vec![0; k];
    for (pos, &i) in k0_outputs.iter().enumerate() {
        rho[i] = pos;
    }
    push_permutation(&mut stages, Permutation::new(rho)?);
    stages.push(Stage::Equalities(blocks));

    for v in g.vertices() {
        let Signature::Fn(j) = v.signature else { continue };
        let n = v.edges.len();
        let mut images = vec![usize::MAX; strands.len()];
        for (a, &e) in v.edges.iter().enumerate() {
            let i = strands.iter().position(|&s| s == Strand::Edge(e)).expect("edge strand present");
            images[i] = a;
        }
        let mut rest = vec![];
        let mut next = n;
        for (i, image) in images.iter_mut().enumerate() {
            if *image == usize::MAX {
                *image = next;
                next += 1;
                rest.push(strands[i]);
            }
        }
        push_permutation(&mut stages, Permutation::new(images)?);
        stages.push(Stage::Constraint { function: j, identity: rest.len() });
        strands = rest;
    }

    let upsilon = strands
        .iter()
        .map(|s| match s {
            Strand::Input(p) => Ok(*p),
            Strand::Edge(e) => Err(Error::Precondition(format!("edge {e} reaches no constraint vertex"))),
        })
        .collect::<Result<Vec<_>>>()?;
    push_permutation(&mut stages, Permutation::new(upsilon)?);
    Ok(Decomposition { stages })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Strand {
    Edge(usize),
    Input(usize),
}

fn push_permutation(stages: &mut Vec<Stage>, sigma: Permutation) {
    if !sigma.is_identity() {
        stages.push(Stage::Permutation(sigma));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::{CFSet, Constraint, LabeledInstance};
    use crate::holant::{instance_gadget, Vertex};
    use crate::tensor::ConstraintFunction;

    fn check(g: &Gadget) -> Decomposition {
        let d = decompose(g).unwrap();
        assert_eq!(d.expr().evaluate(g.q(), g.functions()).unwrap(), g.signature_matrix(), "{d}");
        d
    }

    #[test]
    fn equalities_map_to_their_expressions() {
        for m in 0..4 {
            for d in 0..4 {
                let dec = check(&Gadget::equality(2, m, d));
                assert_eq!(dec.expr(), equality_expression(m, d));
            }
        }
    }

    #[test]
    fn single_binary_constraint() {
        let f = ConstraintFunction::from_ints(2, 2, &[1, 2, 3, 4]).unwrap();
        let set = CFSet::unweighted(vec![f]).unwrap();
        let k = LabeledInstance::anonymous(2, vec![Constraint::new(0, vec![0, 1])], vec![0]).unwrap();
        let dec = check(&instance_gadget(&set, &k, 1).unwrap());
        assert_eq!(dec.stages.len(), 2);
        let k = LabeledInstance::anonymous(2, vec![Constraint::new(0, vec![1, 0])], vec![0, 1]).unwrap();
        check(&instance_gadget(&set, &k, 1).unwrap());
        check(&instance_gadget(&set, &k, 0).unwrap());
    }

    #[test]
    fn three_equality_blocks() {
        let f1 = ConstraintFunction::from_ints(2, 3, &[1, 2, 0, 3, 5, 1, 2, 7]).unwrap();
        let f2 = ConstraintFunction::from_ints(2, 2, &[2, 1, 3, 1]).unwrap();
        // Edges: 0 A-F2, 1 A-F1, 2 A out, 3 B-F1, 4 B in, 5 B in, 6 C-F1, 7 C-F2, 8 C out, 9 C out.
        let vertices = vec![
            Vertex::eq(vec![0, 1, 2]),
            Vertex::eq(vec![3, 4, 5]),
            Vertex::eq(vec![6, 7, 8, 9]),
            Vertex::func(0, vec![3, 1, 6]),
            Vertex::func(1, vec![7, 0]),
        ];
        let g = Gadget::new(2, vec![f1, f2], vertices, 10, vec![8, 2, 9], vec![5, 4]).unwrap();
        let dec = check(&g);
        let shown: Vec<String> = dec.stages.iter().map(|s| s.to_string()).collect();
        assert_eq!(
            shown,
            [
                "S_(1 2)",
                "E^{1,2} ⊗ E^{0,3} ⊗ E^{2,2}",
                "S_(1 4 5 6 3)",
                "F1 ⊗ I^4",
                "S_(1 2 3 4)",
                "F2 ⊗ I^2",
            ]
        );
    }

    #[test]
    fn rejects_dangling_constraint_edges() {
        let f = ConstraintFunction::from_ints(2, 1, &[1, 2]).unwrap();
        let g = Gadget::function(f);
        assert!(matches!(decompose(&g), Err(Error::Precondition(_))));
    }
}
