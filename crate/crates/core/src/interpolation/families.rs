//! The three instance families used to separate non-isomorphic sets.
//!
//! Instances carry `ℓ = (n-1)K` labeled variables, variable `c` carrying
//! label `c`, followed by the free variables. Exponent vectors are aligned
//! with [`configurations`](crate::structure::configurations).

use std::collections::HashMap;

use crate::csp::{CFSet, Constraint, LabeledInstance};
use crate::error::{Error, Result};
use crate::interpolation::balance::{bucket_structure, BucketStructure};
use crate::structure::{configurations, Configuration};
use crate::tensor::index_of_digits;

/// One copy of `F_j` attached to a free variable in slot `r`, its other
/// arguments taken from block `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Attachment {
    j: usize,
    a: usize,
    r: usize,
    arity: usize,
}

struct Layout {
    n: usize,
    labels: usize,
    structure: Option<BucketStructure>,
    configs: Vec<Configuration>,
}

fn layout(set: &CFSet, phi: &[usize], psi: Option<&[usize]>) -> Result<Layout> {
    let n = set.max_arity();
    if n == 0 {
        return Err(Error::Precondition("the function set is empty".into()));
    }
    let structure = if n >= 2 {
        Some(bucket_structure(phi, psi, set.q(), n)?)
    } else if phi.is_empty() {
        None
    } else {
        return Err(Error::Precondition("unary-only sets carry no block labels".into()));
    };
    Ok(Layout { n, labels: phi.len(), structure, configs: configurations(set) })
}

impl Layout {
    /// Chooses the blocks `P_{j,x,r}`: for fixed `(j, x)` consecutive runs of
    /// the selected blocks of `ext(x)`, in increasing `r`, never using block `avoid`.
    fn attachments(&self, set: &CFSet, exponents: &[u32], avoid: Option<usize>) -> Result<Vec<Attachment>> {
        if exponents.len() != self.configs.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} exponents for {} configurations",
                exponents.len(),
                self.configs.len()
            )));
        }
        let limit = 2 * set.q() as u32;
        if let Some(&p) = exponents.iter().find(|&&p| p >= limit) {
            return Err(Error::Precondition(format!("exponent {p} is not below 2q = {limit}")));
        }
        let mut out = vec![];
        let mut cursors: HashMap<(usize, &[usize]), usize> = HashMap::new();
        for (config, &p) in self.configs.iter().zip(exponents) {
            if p == 0 {
                continue;
            }
            let arity = set.function(config.j).arity();
            if arity == 1 {
                out.extend((0..p).map(|_| Attachment { j: config.j, a: 0, r: 0, arity }));
                continue;
            }
            let bs = self.structure.as_ref().expect("arity above 1 implies a block layout");
            let mut ext = config.x.clone();
            ext.resize(self.n - 1, 0);
            let pool: Vec<usize> =
                bs.selected[index_of_digits(&ext, set.q())].iter().copied().filter(|&a| Some(a) != avoid).collect();
            let cursor = cursors.entry((config.j, config.x.as_slice())).or_insert(0);
            let end = *cursor + p as usize;
            if end > pool.len() {
                return Err(Error::Precondition(format!(
                    "bucket capacity exceeded: {} blocks needed, {} available",
                    end,
                    pool.len()
                )));
            }
            out.extend(pool[*cursor..end].iter().map(|&a| Attachment { j: config.j, a, r: config.r, arity }));
            *cursor = end;
        }
        Ok(out)
    }

    fn label(&self, a: usize, d: usize) -> usize {
        let blocks = self.structure.as_ref().map_or(0, |b| b.blocks);
        a + d * blocks
    }

    fn attach(&self, attachment: &Attachment, free: usize) -> Constraint {
        let mut vars: Vec<usize> = (0..attachment.arity - 1).map(|d| self.label(attachment.a, d)).collect();
        vars.insert(attachment.r, free);
        Constraint::new(attachment.j, vars)
    }

    fn instance(&self, free: usize, constraints: Vec<Constraint>) -> Result<LabeledInstance> {
        let names = (0..self.labels).map(|c| format!("u{}", c + 1)).chain((1..=free).map(|h| format!("v{h}")));
        LabeledInstance::new(names.collect(), constraints, (0..self.labels).collect())
    }
}

/// One free variable `v` with `p_{j,x,r}` copies of `F_j` attached per configuration.
pub fn build_family_one(set: &CFSet, phi: &[usize], psi: Option<&[usize]>, exponents: &[u32]) -> Result<LabeledInstance> {
    let layout = layout(set, phi, psi)?;
    let v = layout.labels;
    let constraints = layout.attachments(set, exponents, None)?.iter().map(|at| layout.attach(at, v)).collect();
    layout.instance(1, constraints)
}

/// Free variables `v_1..v_{n_F}` joined by the anchor `(F, v_1, .., v_{n_F})`,
/// each carrying its own family-one attachments.
pub fn build_family_two(
    set: &CFSet,
    f_index: usize,
    phi: &[usize],
    psi: Option<&[usize]>,
    exponents: &[Vec<u32>],
) -> Result<LabeledInstance> {
    let layout = layout(set, phi, psi)?;
    let arity = anchor_arity(set, f_index)?;
    if exponents.len() != arity {
        return Err(Error::DimensionMismatch(format!("{} exponent vectors for arity {arity}", exponents.len())));
    }
    let base = layout.labels;
    let mut constraints = vec![Constraint::new(f_index, (base..base + arity).collect())];
    for (h, p) in exponents.iter().enumerate() {
        constraints.extend(layout.attachments(set, p, None)?.iter().map(|at| layout.attach(at, base + h)));
    }
    layout.instance(arity, constraints)
}

/// The anchor `(F, u_c, v_1, .., v_{n_F-1})` with the first argument on the
/// labeled variable `c`; for unary `F` the single constraint `(F, u_c)`.
pub fn build_family_three(
    set: &CFSet,
    f_index: usize,
    phi: &[usize],
    psi: Option<&[usize]>,
    c: usize,
    exponents: &[Vec<u32>],
) -> Result<LabeledInstance> {
    let layout = layout(set, phi, psi)?;
    let arity = anchor_arity(set, f_index)?;
    if c >= layout.labels {
        return Err(Error::Precondition(format!("label {} does not exist", c + 1)));
    }
    if exponents.len() != arity - 1 {
        return Err(Error::DimensionMismatch(format!("{} exponent vectors for arity {arity}", exponents.len())));
    }
    let base = layout.labels;
    let anchor_block = c % layout.structure.as_ref().map_or(1, |b| b.blocks.max(1));
    let mut anchor = vec![c];
    anchor.extend(base..base + arity - 1);
    let mut constraints = vec![Constraint::new(f_index, anchor)];
    for (h, p) in exponents.iter().enumerate() {
        constraints.extend(layout.attachments(set, p, Some(anchor_block))?.iter().map(|at| layout.attach(at, base + h)));
    }
    layout.instance(arity - 1, constraints)
}

fn anchor_arity(set: &CFSet, f_index: usize) -> Result<usize> {
    if f_index >= set.len() {
        return Err(Error::UnknownFunction { index: f_index, count: set.len() });
    }
    Ok(set.function(f_index).arity())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interpolation::balance::well_balanced_extension;
    use crate::partition::pinned_partition;
    use crate::scalar::Scalar;
    use crate::tensor::ConstraintFunction;

    fn e2() -> CFSet {
        CFSet::unweighted(vec![ConstraintFunction::equality(2, 2).unwrap()]).unwrap()
    }

    #[test]
    fn empty_exponents() {
        let set = e2();
        let wb = well_balanced_extension(&[], 2, 2).unwrap();
        let zero = vec![0; configurations(&set).len()];
        let k1 = build_family_one(&set, &wb.phi, None, &zero).unwrap();
        assert!(k1.constraints().is_empty());
        assert_eq!(pinned_partition(&set, &k1, &wb.phi).unwrap(), Scalar::from_int(2));
        let k2 = build_family_two(&set, 0, &wb.phi, None, &[zero.clone(), zero.clone()]).unwrap();
        assert_eq!(pinned_partition(&set, &k2, &wb.phi).unwrap(), Scalar::from_int(2));
        let k3 = build_family_three(&set, 0, &wb.phi, None, 3, &[zero]).unwrap();
        assert_eq!(pinned_partition(&set, &k3, &wb.phi).unwrap(), Scalar::one());
        assert!(k1.is_simple() && k2.is_simple() && k3.is_simple());
    }

    #[test]
    fn single_attachment_sums_one_slice() {
        let set = CFSet::unweighted(vec![ConstraintFunction::from_ints(2, 2, &[1, 2, 3, 5]).unwrap()]).unwrap();
        let wb = well_balanced_extension(&[], 2, 2).unwrap();
        let configs = configurations(&set);
        for (i, config) in configs.iter().enumerate() {
            let mut p = vec![0; configs.len()];
            p[i] = 1;
            let k = build_family_one(&set, &wb.phi, None, &p).unwrap();
            let expected: Scalar = (0..2).map(|v| set.function(0).at(&config.fill(v)).clone()).sum();
            assert_eq!(pinned_partition(&set, &k, &wb.phi).unwrap(), expected);
        }
    }

    #[test]
    fn capacity_and_exponent_limits() {
        let set = e2();
        let configs = configurations(&set).len();
        assert!(build_family_one(&set, &[0, 1], None, &vec![1; configs]).is_err());
        let wb = well_balanced_extension(&[], 2, 2).unwrap();
        assert!(build_family_one(&set, &wb.phi, None, &vec![4; configs]).is_err());
    }
}
