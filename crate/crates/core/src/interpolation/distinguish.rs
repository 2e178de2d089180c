//! Deciding isomorphism of pinned function sets, with a verified
//! distinguishing instance when none exists.

use std::cell::{OnceCell, RefCell};
use std::collections::HashMap;
use std::rc::Rc;
use std::sync::Arc;

use crate::csp::{CFSet, LabeledInstance};
use crate::error::{Error, Result};
use crate::interpolation::catalog::{pli_instances, simple_instances, witness_catalog};
use crate::partition::{pinned_partition_capped, DEFAULT_TERM_CAP};
use crate::perm::Permutation;
use crate::scalar::Scalar;
use crate::structure::{contract_twins, find_isomorphisms};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistinguishConfig {
    /// Bound on assignments enumerated per evaluation; larger candidates are skipped.
    pub term_cap: u64,
    /// Bound on the prefix of the family catalog that is searched.
    pub catalog_cap: usize,
    /// Variable bound of the simple-instance catalog.
    pub simple_vars: usize,
    pub general_vars: usize,
    pub general_constraints: usize,
}

impl Default for DistinguishConfig {
    fn default() -> Self {
        DistinguishConfig { term_cap: DEFAULT_TERM_CAP, catalog_cap: 2000, simple_vars: 3, general_vars: 2, general_constraints: 3 }
    }
}

/// Which catalog a witness came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Source {
    /// Small connected simple instances.
    Simple,
    /// The three families and their products, labels erased.
    Families,
    /// Small instances with repeated arguments or constraints.
    General,
}

impl Source {
    const ALL: [Source; 3] = [Source::Simple, Source::Families, Source::General];

    pub fn name(self) -> &'static str {
        match self {
            Source::Simple => "simple",
            Source::Families => "families",
            Source::General => "general",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub instance: Arc<LabeledInstance>,
    pub z_f: Scalar,
    pub z_g: Scalar,
    pub source: Source,
    /// Candidates evaluated before this one was found, plus one.
    pub examined: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// `ψ = σ∘φ` and `σ` is a domain-weighted isomorphism.
    Isomorphic { sigma: Permutation },
    /// No isomorphism exists, but twin contraction makes the sets isomorphic
    /// compatibly with the pins, so every instance takes equal values.
    /// `sigma` maps contracted classes of the first set to those of the second.
    Equivalent { sigma: Permutation },
    Witness(Witness),
}

impl Outcome {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self, Outcome::Isomorphic { .. })
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Outcome::Witness(w) => Some(w),
            _ => None,
        }
    }
}

fn check_pins(set: &CFSet, pins: &[usize]) -> Result<()> {
    match pins.iter().find(|&&x| x >= set.q()) {
        Some(&value) => Err(Error::DomainOutOfRange { value, q: set.q() }),
        None => Ok(()),
    }
}

fn respects(sigma: &Permutation, phi: &[usize], psi: &[usize]) -> bool {
    phi.iter().zip(psi).all(|(&a, &b)| sigma.apply(a) == b)
}

/// An isomorphism of the twin contractions carrying the contracted pins
/// along. `None` when a contraction has a vanishing class weight.
pub fn contracted_isomorphism(f: &CFSet, g: &CFSet, phi: &[usize], psi: &[usize]) -> Result<Option<Permutation>> {
    let (cf, cg) = match (contract_twins(f), contract_twins(g)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(Error::VanishingWeight { .. }), _) | (_, Err(Error::VanishingWeight { .. })) => return Ok(None),
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    let pf: Vec<usize> = phi.iter().map(|&x| cf.class_of[x]).collect();
    let pg: Vec<usize> = psi.iter().map(|&x| cg.class_of[x]).collect();
    Ok(find_isomorphisms(&cf.set, &cg.set)?.into_iter().find(|s| respects(s, &pf, &pg)))
}

/// Exact comparison of one candidate; `None` when either side exceeds the cap.
fn compare(f: &CFSet, g: &CFSet, phi: &[usize], psi: &[usize], inst: &LabeledInstance, cap: u64) -> Result<Option<(Scalar, Scalar)>> {
    let zf = match pinned_partition_capped(f, inst, phi, cap) {
        Ok(z) => z,
        Err(e) if e.is_cap() => return Ok(None),
        Err(e) => return Err(e),
    };
    let zg = match pinned_partition_capped(g, inst, psi, cap) {
        Ok(z) => z,
        Err(e) if e.is_cap() => return Ok(None),
        Err(e) => return Err(e),
    };
    Ok(Some((zf, zg)))
}

/// Returns `σ` with `ψ = σ∘φ`, or an instance with `Z^φ_F ≠ Z^ψ_G`.
///
/// Candidates are tried in catalog order: simple instances, the family
/// catalog, then small general instances. Every witness is verified exactly.
pub fn distinguish(f: &CFSet, g: &CFSet, phi: &[usize], psi: &[usize], config: &DistinguishConfig) -> Result<Outcome> {
    f.check_compatible(g)?;
    if phi.len() != psi.len() {
        return Err(Error::LabelCount(phi.len(), psi.len()));
    }
    check_pins(f, phi)?;
    check_pins(g, psi)?;
    if let Some(sigma) = find_isomorphisms(f, g)?.into_iter().find(|s| respects(s, phi, psi)) {
        return Ok(Outcome::Isomorphic { sigma });
    }
    if let Some(sigma) = contracted_isomorphism(f, g, phi, psi)? {
        return Ok(Outcome::Equivalent { sigma });
    }
    let (big, big_pins, other_pins) = if f.q() >= g.q() { (f, phi, psi) } else { (g, psi, phi) };
    let mut examined = 0;
    for source in Source::ALL {
        let members = match source {
            Source::Simple => simple_instances(&f.arities(), phi.len(), config.simple_vars),
            Source::Families => witness_catalog(big, big_pins, Some(other_pins), config.catalog_cap)?,
            Source::General => pli_instances(&f.arities(), phi.len(), config.general_vars, config.general_constraints),
        };
        for inst in members {
            examined += 1;
            if let Some((z_f, z_g)) = compare(f, g, phi, psi, &inst, config.term_cap)? {
                if z_f != z_g {
                    return Ok(Outcome::Witness(Witness { instance: Arc::new(inst), z_f, z_g, source, examined }));
                }
            }
        }
    }
    Err(Error::Inconclusive { examined })
}

/// Catalogs shared by all sets with the same domain size and arities.
struct Catalog {
    q: usize,
    arities: Vec<usize>,
    stages: [OnceCell<Vec<Arc<LabeledInstance>>>; 3],
}

/// Lexicographically least relabeling of a set, with the permutation `σ`
/// achieving it (`canon(σx) = F(x)`).
fn canonical_key(set: &CFSet) -> (Vec<Scalar>, Permutation) {
    let q = set.q();
    let mut best: Option<(Vec<Scalar>, Permutation)> = None;
    for sigma in Permutation::all(q) {
        let inv = sigma.inverse();
        let alpha = set.weight_vec();
        let mut key: Vec<Scalar> = (0..q).map(|y| alpha[inv.apply(y)].clone()).collect();
        for f in set.functions() {
            key.extend(f.relabel(inv.images()).entries().iter().cloned());
        }
        if best.as_ref().map_or(true, |(b, _)| key < *b) {
            best = Some((key, sigma));
        }
    }
    best.expect("at least one permutation")
}

/// Largest domain for which canonical forms are precomputed.
const CANONICAL_MAX_Q: usize = 5;

/// A function set with cached invariants and lazily cached values on the
/// shared catalogs.
pub struct Prepared {
    set: CFSet,
    canonical: Option<(Vec<Scalar>, Permutation)>,
    contracted: Option<Vec<Scalar>>,
    values: RefCell<HashMap<(usize, usize), Rc<Vec<OnceCell<Option<Scalar>>>>>>,
}

impl Prepared {
    pub fn set(&self) -> &CFSet {
        &self.set
    }
}

/// Batch distinguisher for unpinned sets. Values of each set on each catalog
/// member are computed once.
pub struct Distinguisher {
    config: DistinguishConfig,
    catalogs: RefCell<Vec<Rc<Catalog>>>,
}

impl Distinguisher {
    pub fn new(config: DistinguishConfig) -> Self {
        Distinguisher { config, catalogs: RefCell::new(vec![]) }
    }

    pub fn config(&self) -> &DistinguishConfig {
        &self.config
    }

    pub fn prepare(&self, set: CFSet) -> Result<Prepared> {
        let small = set.q() <= CANONICAL_MAX_Q;
        let canonical = small.then(|| canonical_key(&set));
        let contracted = match contract_twins(&set) {
            Ok(c) if small && c.classes.len() < set.q() => Some(canonical_key(&c.set).0),
            Ok(_) if small => canonical.as_ref().map(|c| c.0.clone()),
            Ok(_) | Err(Error::VanishingWeight { .. }) => None,
            Err(e) => return Err(e),
        };
        Ok(Prepared { set, canonical, contracted, values: RefCell::new(HashMap::new()) })
    }

    fn catalog(&self, q: usize, arities: &[usize]) -> (usize, Rc<Catalog>) {
        let mut catalogs = self.catalogs.borrow_mut();
        if let Some(i) = catalogs.iter().position(|c| c.q == q && c.arities == arities) {
            return (i, catalogs[i].clone());
        }
        let c = Rc::new(Catalog { q, arities: arities.to_vec(), stages: Default::default() });
        catalogs.push(c.clone());
        (catalogs.len() - 1, c)
    }

    fn stage<'a>(&self, catalog: &'a Catalog, big: &CFSet, source: Source) -> Result<&'a [Arc<LabeledInstance>]> {
        let index = source as usize;
        if catalog.stages[index].get().is_none() {
            let members = match source {
                Source::Simple => simple_instances(&catalog.arities, 0, self.config.simple_vars),
                Source::Families => witness_catalog(big, &[], Some(&[]), self.config.catalog_cap)?,
                Source::General => {
                    pli_instances(&catalog.arities, 0, self.config.general_vars, self.config.general_constraints)
                }
            };
            let _ = catalog.stages[index].set(members.into_iter().map(Arc::new).collect());
        }
        Ok(catalog.stages[index].get().expect("just filled"))
    }

    fn value(&self, p: &Prepared, key: (usize, usize), slot: usize, len: usize, inst: &LabeledInstance) -> Result<Option<Scalar>> {
        let cells = {
            let mut values = p.values.borrow_mut();
            values.entry(key).or_insert_with(|| Rc::new((0..len).map(|_| OnceCell::new()).collect())).clone()
        };
        if let Some(v) = cells[slot].get() {
            return Ok(v.clone());
        }
        let v = match pinned_partition_capped(&p.set, inst, &[], self.config.term_cap) {
            Ok(z) => Some(z),
            Err(e) if e.is_cap() => None,
            Err(e) => return Err(e),
        };
        let _ = cells[slot].set(v.clone());
        Ok(v)
    }

    /// [`distinguish`] with empty pins, using the cached invariants.
    pub fn distinguish(&self, f: &Prepared, g: &Prepared) -> Result<Outcome> {
        f.set.check_compatible(&g.set)?;
        match (&f.canonical, &g.canonical) {
            (Some((kf, sf)), Some((kg, sg))) if f.set.q() == g.set.q() => {
                if kf == kg {
                    return Ok(Outcome::Isomorphic { sigma: sg.inverse().compose(sf) });
                }
            }
            (Some(_), Some(_)) => {}
            _ => {
                if let Some(sigma) = find_isomorphisms(&f.set, &g.set)?.into_iter().next() {
                    return Ok(Outcome::Isomorphic { sigma });
                }
            }
        }
        let maybe_equivalent = match (&f.contracted, &g.contracted) {
            (Some(a), Some(b)) => a == b,
            _ => true,
        };
        if maybe_equivalent {
            if let Some(sigma) = contracted_isomorphism(&f.set, &g.set, &[], &[])? {
                return Ok(Outcome::Equivalent { sigma });
            }
        }
        let big = if f.set.q() >= g.set.q() { &f.set } else { &g.set };
        let (id, catalog) = self.catalog(big.q(), &big.arities());
        let mut examined = 0;
        for source in Source::ALL {
            let members = self.stage(&catalog, big, source)?;
            let key = (id, source as usize);
            for (slot, inst) in members.iter().enumerate() {
                examined += 1;
                let zf = self.value(f, key, slot, members.len(), inst)?;
                let zg = self.value(g, key, slot, members.len(), inst)?;
                if let (Some(z_f), Some(z_g)) = (zf, zg) {
                    if z_f != z_g {
                        return Ok(Outcome::Witness(Witness { instance: inst.clone(), z_f, z_g, source, examined }));
                    }
                }
            }
        }
        Err(Error::Inconclusive { examined })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::partition_function;
    use crate::tensor::ConstraintFunction;

    fn set(q: usize, arity: usize, entries: &[i64]) -> CFSet {
        CFSet::unweighted(vec![ConstraintFunction::from_ints(q, arity, entries).unwrap()]).unwrap()
    }

    #[test]
    fn identical_sets_are_isomorphic() {
        let f = set(3, 2, &[1, 2, 0, 0, 1, 2, 2, 0, 1]);
        let out = distinguish(&f, &f, &[2, 0], &[2, 0], &DistinguishConfig::default()).unwrap();
        assert!(out.is_isomorphic());
    }

    #[test]
    fn equality_against_diagonal() {
        let f = set(2, 2, &[1, 0, 0, 1]);
        let g = set(2, 2, &[1, 0, 0, 2]);
        let out = distinguish(&f, &g, &[], &[], &DistinguishConfig::default()).unwrap();
        let w = out.witness().unwrap();
        assert_eq!(partition_function(&f, &w.instance).unwrap(), w.z_f);
        assert_eq!(partition_function(&g, &w.instance).unwrap(), w.z_g);
        assert_ne!(w.z_f, w.z_g);
        assert!(w.instance.is_simple());
    }

    #[test]
    fn swapped_diagonal() {
        let f = set(2, 2, &[1, 0, 0, 2]);
        let g = set(2, 2, &[2, 0, 0, 1]);
        let out = distinguish(&f, &g, &[], &[], &DistinguishConfig::default()).unwrap();
        assert_eq!(out, Outcome::Isomorphic { sigma: Permutation::new(vec![1, 0]).unwrap() });
    }

    #[test]
    fn pins_must_be_carried() {
        let f = set(2, 2, &[1, 0, 0, 2]);
        let out = distinguish(&f, &f, &[0], &[1], &DistinguishConfig::default()).unwrap();
        let w = out.witness().unwrap();
        assert_eq!(w.instance.k(), 1);
        assert_ne!(w.z_f, w.z_g);
    }

    #[test]
    fn twins_give_equivalence() {
        let f = set(2, 2, &[1, 1, 1, 1]);
        let out = distinguish(&f, &f, &[0], &[1], &DistinguishConfig::default()).unwrap();
        assert!(out.is_isomorphic());
        let g = set(2, 1, &[1, 1]).with_weights(Some(vec![Scalar::from_int(1), Scalar::from_int(3)])).unwrap();
        let h = set(2, 1, &[1, 1]).with_weights(Some(vec![Scalar::from_int(2), Scalar::from_int(2)])).unwrap();
        let out = distinguish(&g, &h, &[], &[], &DistinguishConfig::default()).unwrap();
        assert!(matches!(out, Outcome::Equivalent { .. }));
    }

    #[test]
    fn unary_needs_repeated_constraints() {
        let f = set(2, 1, &[0, 2]);
        let g = set(2, 1, &[1, 1]);
        let out = distinguish(&f, &g, &[], &[], &DistinguishConfig::default()).unwrap();
        let w = out.witness().unwrap();
        assert!(!w.instance.is_simple());
        assert_ne!(w.z_f, w.z_g);
    }

    #[test]
    fn batch_agrees_with_direct() {
        let d = Distinguisher::new(DistinguishConfig::default());
        let sets = [set(2, 2, &[1, 0, 0, 1]), set(2, 2, &[1, 0, 0, 2]), set(2, 2, &[2, 0, 0, 1]), set(1, 2, &[2])];
        let prepared: Vec<_> = sets.iter().map(|s| d.prepare(s.clone()).unwrap()).collect();
        for (a, pa) in sets.iter().zip(&prepared) {
            for (b, pb) in sets.iter().zip(&prepared) {
                let batch = d.distinguish(pa, pb).unwrap();
                let direct = distinguish(a, b, &[], &[], &DistinguishConfig::default()).unwrap();
                assert_eq!(batch.is_isomorphic(), direct.is_isomorphic());
                if let Outcome::Isomorphic { sigma } = &batch {
                    assert!(crate::structure::is_isomorphism(sigma, a, b).unwrap());
                }
                if let Some(w) = batch.witness() {
                    assert_ne!(partition_function(a, &w.instance).unwrap(), partition_function(b, &w.instance).unwrap());
                }
            }
        }
    }
}
