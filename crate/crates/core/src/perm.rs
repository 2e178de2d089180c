//! Permutations of `[q]`, stored 0-based as image lists.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || seen[i] {
                return Err(Error::Precondition(format!("{images:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(Permutation(images))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// The transposition of `a` and `b` on `n` points.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(a, b);
        Permutation(images)
    }

    /// Builds a permutation from 1-based cycles, e.g. `[[1, 3], [2, 4]]`.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        for cycle in cycles {
            for (i, &a) in cycle.iter().enumerate() {
                let b = cycle[(i + 1) % cycle.len()];
                if a == 0 || b == 0 || a > n || b > n {
                    return Err(Error::DomainOutOfRange { value: a.max(b), q: n });
                }
                images[a - 1] = b - 1;
            }
        }
        Permutation::new(images)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn apply_tuple(&self, xs: &[usize]) -> Vec<usize> {
        xs.iter().map(|&x| self.0[x]).collect()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Every permutation of `n` points in lexicographic order of image lists.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut current: Vec<usize> = (0..n).collect();
        let mut out = vec![Permutation(current.clone())];
        while next_permutation(&mut current) {
            out.push(Permutation(current.clone()));
        }
        out
    }

    /// 1-based cycle notation without fixed points; `()` for the identity.
    pub fn cycle_string(&self) -> String {
        let mut seen = vec![false; self.len()];
        let mut out = String::new();
        for start in 0..self.len() {
            if seen[start] || self.0[start] == start {
                continue;
            }
            let mut cycle = vec![];
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push((i + 1).to_string());
                i = self.0[i];
            }
            out.push_str(&format!("({})", cycle.join(" ")));
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

/// Advances `xs` to the next lexicographic permutation; false at the last one.
pub fn next_permutation(xs: &mut [usize]) -> bool {
    if xs.len() < 2 {
        return false;
    }
    let Some(i) = (0..xs.len() - 1).rev().find(|&i| xs[i] < xs[i + 1]) else {
        return false;
    };
    let j = (i + 1..xs.len()).rev().find(|&j| xs[j] > xs[i]).expect("successor exists");
    xs.swap(i, j);
    xs[i + 1..].reverse();
    true
}

/// One-line notation, 1-based: `[2,1,3]`.
impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_enumeration() {
        let all = Permutation::all(3);
        assert_eq!(all.len(), 6);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert!(all[0].is_identity());
    }

    #[test]
    fn composition_and_cycles() {
        let s = Permutation::from_cycles(4, &[&[1, 3], &[2, 4]]).unwrap();
        assert_eq!(s.cycle_string(), "(1 3)(2 4)");
        assert!(s.compose(&s).is_identity());
        let c = Permutation::from_cycles(3, &[&[1, 2, 3]]).unwrap();
        assert_eq!(c.compose(&c.inverse()), Permutation::identity(3));
        assert_eq!(c.to_string(), "[2,3,1]");
        assert!(Permutation::new(vec![0, 0]).is_err());
    }
}
