//! Permutations of `[n] = {1, ..., n}` in one-line notation.
//!
//! Every public index is 1-based; storage is 0-based.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_index, Result, TrapError};

/// A bijection of `[n]`, stored as its word `σ(1) σ(2) ... σ(n)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n).collect(),
        }
    }

    /// Builds a permutation from its 1-based word.
    pub fn from_images(word: &[usize]) -> Result<Self> {
        let n = word.len();
        let mut seen = vec![false; n];
        let mut images = Vec::with_capacity(n);
        for &w in word {
            if w == 0 || w > n || seen[w - 1] {
                return Err(TrapError::NotAPermutation(word.to_vec()));
            }
            seen[w - 1] = true;
            images.push(w - 1);
        }
        Ok(Self { images })
    }

    #[cfg(test)]
    pub(crate) fn from_zero_based(images: Vec<usize>) -> Self {
        debug_assert!({
            let mut s = images.clone();
            s.sort_unstable();
            s.iter().enumerate().all(|(i, &x)| i == x)
        });
        Self { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// `σ(i)` for 1-based `i`.
    pub fn image(&self, i: usize) -> usize {
        self.images[i - 1] + 1
    }

    /// `σ⁻¹(i)` for 1-based `i`.
    pub fn preimage(&self, i: usize) -> usize {
        self.images.iter().position(|&x| x == i - 1).unwrap() + 1
    }

    /// The 1-based word.
    pub fn word(&self) -> Vec<usize> {
        self.images.iter().map(|x| x + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x] = i;
        }
        Self { images: inv }
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.degree() != other.degree() {
            return Err(TrapError::DegreeMismatch {
                expected: self.degree(),
                got: other.degree(),
            });
        }
        Ok(Self {
            images: other.images.iter().map(|&j| self.images[j]).collect(),
        })
    }

    /// Block sum `α ⊗ β`: `α` on the first `m` points, `β` shifted by `m` on the rest.
    pub fn tensor_sum(&self, other: &Self) -> Self {
        let m = self.degree();
        let mut images = self.images.clone();
        images.extend(other.images.iter().map(|&x| x + m));
        Self { images }
    }

    /// The block shuffle `c_{m,n}`: `i ↦ i + n` for `i ≤ m`, `i ↦ i − m` otherwise.
    pub fn block_shuffle(m: usize, n: usize) -> Self {
        let images = (0..m + n)
            .map(|i| if i < m { i + n } else { i - m })
            .collect();
        Self { images }
    }

    /// `α_p`: delete the letter `p` from the word and decrement every letter above `p`.
    pub fn delete_index(&self, p: usize) -> Result<Self> {
        check_index(p, self.degree())?;
        let p0 = p - 1;
        let images = self
            .images
            .iter()
            .filter(|&&x| x != p0)
            .map(|&x| if x > p0 { x - 1 } else { x })
            .collect();
        Ok(Self { images })
    }

    /// Delete the letter sitting at position `pos`, i.e. `α_{α(pos)}`.
    pub fn delete_position(&self, pos: usize) -> Result<Self> {
        check_index(pos, self.degree())?;
        self.delete_index(self.image(pos))
    }

    /// Left action on sequences: position `σ(i)` of the result holds `xs[i]`.
    pub fn apply<T: Clone>(&self, xs: &[T]) -> Result<Vec<T>> {
        if xs.len() != self.degree() {
            return Err(TrapError::DegreeMismatch {
                expected: self.degree(),
                got: xs.len(),
            });
        }
        let inv = self.inverse();
        Ok(inv.images.iter().map(|&j| xs[j].clone()).collect())
    }

    /// The cycle `(a, a+1, ..., b)` in `𝔖_n`, sending `a → a+1 → ... → b → a`.
    /// Empty ranges (`b ≤ a`) give the identity.
    pub fn cycle(n: usize, a: usize, b: usize) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        if a < b {
            for i in a..b {
                images[i - 1] = i;
            }
            images[b - 1] = a - 1;
        }
        Self { images }
    }

    /// The transposition `(i, j)`; `(i, i)` is the identity.
    pub fn transposition(n: usize, i: usize, j: usize) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(i - 1, j - 1);
        Self { images }
    }

    /// True when the word increases on positions `1..=split` and on `split+1..=n`.
    pub fn is_shuffle(&self, split: usize) -> bool {
        let (head, tail) = self.images.split_at(split.min(self.degree()));
        head.windows(2).all(|w| w[0] < w[1]) && tail.windows(2).all(|w| w[0] < w[1])
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        images.shuffle(rng);
        Self { images }
    }

    /// Uniform `(split, n − split)`-shuffle.
    pub fn random_shuffle<R: Rng + ?Sized>(n: usize, split: usize, rng: &mut R) -> Self {
        let mut positions: Vec<usize> = (0..n).collect();
        positions.shuffle(rng);
        let mut head = positions[..split].to_vec();
        let mut tail = positions[split..].to_vec();
        head.sort_unstable();
        tail.sort_unstable();
        head.extend(tail);
        Self { images: head }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.word())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.word())
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.word().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let word = Vec::<usize>::deserialize(deserializer)?;
        Permutation::from_images(&word).map_err(serde::de::Error::custom)
    }
}
