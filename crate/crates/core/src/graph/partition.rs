use rand::seq::index;

use crate::error::{check_len, invalid, Error, Result};
use crate::rng;

/// A two-community label vector with entries in `{+1, -1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    labels: Vec<i8>,
}

/// How [`perturb_partition`] moves nodes between communities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbMode {
    /// Swap the first `⌊s/2⌋` nodes of each community; keeps balance.
    Shift,
    /// Flip `s` uniformly chosen labels; does not re-balance.
    RandomRelabel,
}

impl Partition {
    pub fn new(labels: Vec<i8>) -> Result<Self> {
        if let Some(pos) = labels.iter().position(|&l| l != 1 && l != -1) {
            return Err(invalid("labels", format!("entry {pos} is {}, expected +1 or -1", labels[pos])));
        }
        Ok(Self { labels })
    }

    /// First `⌈n/2⌉` nodes labelled `+1`, the rest `-1`.
    pub fn halves(n: usize) -> Self {
        let plus = n.div_ceil(2);
        let labels = (0..n).map(|i| if i < plus { 1 } else { -1 }).collect();
        Self { labels }
    }

    pub fn from_signs<I: IntoIterator<Item = bool>>(positive: I) -> Self {
        let labels = positive.into_iter().map(|p| if p { 1 } else { -1 }).collect();
        Self { labels }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    #[inline]
    pub fn label(&self, node: usize) -> i8 {
        self.labels[node]
    }

    pub fn sum(&self) -> i64 {
        self.labels.iter().map(|&l| i64::from(l)).sum()
    }

    pub fn is_balanced(&self) -> bool {
        self.sum() == 0
    }

    /// Community sizes `(n_plus, n_minus)`.
    pub fn sizes(&self) -> (usize, usize) {
        let plus = self.labels.iter().filter(|&&l| l == 1).count();
        (plus, self.labels.len() - plus)
    }

    pub fn negated(&self) -> Self {
        Self { labels: self.labels.iter().map(|&l| -l).collect() }
    }

    pub fn hamming(&self, other: &Partition) -> Result<usize> {
        check_len(self.len(), other.len())?;
        Ok(self.labels.iter().zip(&other.labels).filter(|(a, b)| a != b).count())
    }

    /// Relabels nodes: node `i` of `self` becomes node `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        check_len(self.len(), perm.len())?;
        let mut labels = vec![0i8; self.len()];
        for (i, &p) in perm.iter().enumerate() {
            labels[p] = self.labels[i];
        }
        Self::new(labels)
    }
}

/// Hamming distance minimised over the global sign flip.
pub fn distortion(x: &Partition, y: &Partition) -> Result<usize> {
    let h = x.hamming(y)?;
    Ok(h.min(x.len() - h))
}

pub fn perturb_partition(x: &Partition, s: usize, mode: PerturbMode, seed: u64) -> Result<Partition> {
    let n = x.len();
    if 2 * s > n {
        return Err(invalid("s", format!("s = {s} exceeds n/2 = {}", n / 2)));
    }
    let mut labels = x.labels.clone();
    match mode {
        PerturbMode::Shift => {
            let half = s / 2;
            let plus: Vec<usize> = (0..n).filter(|&i| labels[i] == 1).take(half).collect();
            let minus: Vec<usize> = (0..n).filter(|&i| labels[i] == -1).take(half).collect();
            if plus.len() < half || minus.len() < half {
                return Err(Error::OutOfRange(format!("a community has fewer than s/2 = {half} nodes")));
            }
            for i in plus.into_iter().chain(minus) {
                labels[i] = -labels[i];
            }
        }
        PerturbMode::RandomRelabel => {
            let mut rng = rng::stream(seed);
            for i in index::sample(&mut rng, n, s) {
                labels[i] = -labels[i];
            }
        }
    }
    Ok(Partition { labels })
}
