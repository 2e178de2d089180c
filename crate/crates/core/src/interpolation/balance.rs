//! Block layout of labels, buckets, and the well-balanced extension.
//!
//! For maximum arity `n`, a pin map on `(n-1)K` labels is read as `K` blocks:
//! label `a + dK` (0-based `a < K`, `d < n-1`) is the `d`-th coordinate of
//! block `a`. The bucket of a pattern `x ∈ [q]^{n-1}` holds the blocks whose
//! coordinates read `x`.

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::tensor::{digits, index_of_digits, pow_usize};

/// Bucket sizes required of a well-balanced map: `2n·q^n`.
pub fn bucket_threshold(q: usize, n: usize) -> usize {
    2 * n * pow_usize(q, n)
}

/// Blocks of each pattern, indexed by the base-`q` index of the pattern.
pub fn buckets(phi: &[usize], q: usize, n: usize) -> Result<Vec<Vec<usize>>> {
    if n < 2 {
        return Err(Error::Precondition("buckets need maximum arity at least 2".into()));
    }
    let width = n - 1;
    if phi.len() % width != 0 {
        return Err(Error::Precondition(format!("{} labels do not form blocks of {width}", phi.len())));
    }
    let blocks = phi.len() / width;
    let mut out = vec![vec![]; pow_usize(q, width)];
    for a in 0..blocks {
        let pattern: Vec<usize> = (0..width).map(|d| phi[a + d * blocks]).collect();
        out[index_of_digits(&pattern, q)].push(a);
    }
    Ok(out)
}

pub fn is_well_balanced(phi: &[usize], q: usize, n: usize) -> bool {
    let threshold = bucket_threshold(q, n);
    buckets(phi, q, n).map_or(false, |b| b.iter().all(|x| x.len() >= threshold))
}

/// A well-balanced pin map together with the positions of the original labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WellBalanced {
    pub phi: Vec<usize>,
    pub blocks: usize,
    pub n: usize,
    /// New label index of each original label.
    pub original: Vec<usize>,
}

impl WellBalanced {
    pub fn labels(&self) -> usize {
        self.phi.len()
    }

    /// Carries a companion map along the same re-indexing. Padding and fresh
    /// labels get `σ(φ')` when `sigma` is given, else element 0.
    pub fn extend_companion(&self, psi: &[usize], sigma: Option<&Permutation>) -> Vec<usize> {
        let mut out: Vec<usize> = match sigma {
            Some(s) => self.phi.iter().map(|&x| s.apply(x)).collect(),
            None => vec![0; self.phi.len()],
        };
        for (c, &label) in self.original.iter().enumerate() {
            out[label] = psi[c];
        }
        out
    }
}

/// Extends `phi` until every bucket holds at least `2n·q^n` blocks.
///
/// The original `k` labels fill a `K₀ × (n-1)` grid column by column
/// (`K₀ = ⌈k/(n-1)⌉`), unused cells are padded with element 0, and fresh
/// blocks are appended cycling through the patterns in lexicographic order,
/// skipping patterns whose bucket is already full.
pub fn well_balanced_extension(phi: &[usize], q: usize, n: usize) -> Result<WellBalanced> {
    if n < 2 {
        return Err(Error::Precondition("well-balancing needs maximum arity at least 2".into()));
    }
    if let Some(&value) = phi.iter().find(|&&x| x >= q) {
        return Err(Error::DomainOutOfRange { value, q });
    }
    let width = n - 1;
    let k0 = phi.len().div_ceil(width);
    let mut columns: Vec<Vec<usize>> = vec![vec![0; width]; k0];
    let mut cell_of = vec![(0, 0); phi.len()];
    for (c, &x) in phi.iter().enumerate() {
        let (a, d) = (c % k0, c / k0);
        columns[a][d] = x;
        cell_of[c] = (a, d);
    }
    let patterns = pow_usize(q, width);
    let threshold = bucket_threshold(q, n);
    let mut counts = vec![0usize; patterns];
    for col in &columns {
        counts[index_of_digits(col, q)] += 1;
    }
    while counts.iter().any(|&c| c < threshold) {
        for (p, count) in counts.iter_mut().enumerate() {
            if *count < threshold {
                columns.push(digits(p, q, width));
                *count += 1;
            }
        }
    }
    let blocks = columns.len();
    let mut out = vec![0; blocks * width];
    for (a, col) in columns.iter().enumerate() {
        for (d, &x) in col.iter().enumerate() {
            out[a + d * blocks] = x;
        }
    }
    let original = cell_of.iter().map(|&(a, d)| a + d * blocks).collect();
    Ok(WellBalanced { phi: out, blocks, n, original })
}

/// The pigeonhole data for a pair of pin maps on the same block layout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BucketStructure {
    pub n: usize,
    pub q_f: usize,
    pub blocks: usize,
    /// `I_x` for each pattern index.
    pub buckets: Vec<Vec<usize>>,
    /// `s(x)`: the common companion pattern of the selected blocks.
    pub image: Vec<Vec<usize>>,
    /// `J_x ⊆ I_x`, the selected blocks.
    pub selected: Vec<Vec<usize>>,
}

/// Selects within each bucket the blocks sharing a companion pattern. Among
/// groups with at least `2n·q_f` blocks the one with the lexicographically
/// smallest block list wins; without such a group the largest is taken.
/// Without a companion map every bucket is selected whole.
pub fn bucket_structure(phi: &[usize], psi: Option<&[usize]>, q_f: usize, n: usize) -> Result<BucketStructure> {
    let buckets = buckets(phi, q_f, n)?;
    let width = n - 1;
    let blocks = phi.len() / width;
    if let Some(psi) = psi {
        if psi.len() != phi.len() {
            return Err(Error::LabelCount(psi.len(), phi.len()));
        }
    }
    let need = 2 * n * q_f;
    let mut image = vec![];
    let mut selected = vec![];
    for (p, members) in buckets.iter().enumerate() {
        match psi {
            None => {
                image.push(digits(p, q_f, width));
                selected.push(members.clone());
            }
            Some(psi) => {
                let mut groups: Vec<(Vec<usize>, Vec<usize>)> = vec![];
                for &a in members {
                    let key: Vec<usize> = (0..width).map(|d| psi[a + d * blocks]).collect();
                    match groups.iter_mut().find(|(k, _)| *k == key) {
                        Some((_, g)) => g.push(a),
                        None => groups.push((key, vec![a])),
                    }
                }
                let best = groups
                    .iter()
                    .filter(|(_, g)| g.len() >= need)
                    .min_by(|x, y| x.1.cmp(&y.1))
                    .or_else(|| groups.iter().max_by(|x, y| x.1.len().cmp(&y.1.len()).then(y.1.cmp(&x.1))));
                let (key, group) = best.cloned().unwrap_or_else(|| (vec![0; width], vec![]));
                image.push(key);
                selected.push(group);
            }
        }
    }
    Ok(BucketStructure { n, q_f, blocks, buckets, image, selected })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_map_on_two_elements() {
        let wb = well_balanced_extension(&[], 2, 2).unwrap();
        let b = buckets(&wb.phi, 2, 2).unwrap();
        assert_eq!(b.iter().map(Vec::len).collect::<Vec<_>>(), vec![16, 16]);
        assert!(wb.labels() <= 2 * 2 * 8);
        assert!(is_well_balanced(&wb.phi, 2, 2));
    }

    #[test]
    fn already_balanced_is_unchanged() {
        let wb = well_balanced_extension(&[], 2, 3).unwrap();
        assert_eq!(well_balanced_extension(&wb.phi, 2, 3).unwrap().phi, wb.phi);
    }

    #[test]
    fn original_labels_survive() {
        let phi = [1, 0, 2, 2, 1];
        for n in 2..=3 {
            let wb = well_balanced_extension(&phi, 3, n).unwrap();
            assert!(is_well_balanced(&wb.phi, 3, n));
            for (c, &label) in wb.original.iter().enumerate() {
                assert_eq!(wb.phi[label], phi[c]);
            }
        }
    }

    #[test]
    fn companion_selection_is_constant() {
        let wb = well_balanced_extension(&[], 2, 2).unwrap();
        let psi: Vec<usize> = (0..wb.labels()).map(|c| c % 3 % 2).collect();
        let bs = bucket_structure(&wb.phi, Some(&psi), 2, 2).unwrap();
        for (p, group) in bs.selected.iter().enumerate() {
            assert!(group.len() >= 8);
            assert!(group.iter().all(|&a| psi[a] == bs.image[p][0]));
            assert!(group.iter().all(|a| bs.buckets[p].contains(a)));
        }
    }
}
