//! Permutations on `0..n` in image-array form, degree at most 2^16.
//!
//! Products compose left to right: `(a * b)` moves `i` to `b(a(i))`, so
//! conjugation `a^x = x⁻¹·a·x` relabels cycles through `x`.

use thiserror::Error;

/// Largest supported degree.
pub const MAX_DEGREE: usize = 1 << 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("degree {0} exceeds {MAX_DEGREE}")]
    DegreeTooLarge(usize),
    #[error("image array is not a bijection on 0..{0}")]
    NotBijection(usize),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("point {point} out of range for degree {degree}")]
    PointOutOfRange { point: usize, degree: usize },
    #[error("element order exceeds u64")]
    OrderOverflow,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u16>,
}

impl std::fmt::Debug for Permutation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Permutation[{self}]")
    }
}

impl Permutation {
    pub fn identity(n: usize) -> Result<Self, PermError> {
        if n == 0 || n > MAX_DEGREE {
            return Err(PermError::DegreeTooLarge(n));
        }
        Ok(Permutation {
            images: (0..n as u32).map(|i| i as u16).collect(),
        })
    }

    pub fn from_images(images: Vec<u16>) -> Result<Self, PermError> {
        let n = images.len();
        if n == 0 || n > MAX_DEGREE {
            return Err(PermError::DegreeTooLarge(n));
        }
        let mut seen = vec![false; n];
        for &img in &images {
            let img = img as usize;
            if img >= n || seen[img] {
                return Err(PermError::NotBijection(n));
            }
            seen[img] = true;
        }
        Ok(Permutation { images })
    }

    /// Build from disjoint-or-not cycles on `0..n`; points absent from every
    /// cycle are fixed. Cycles apply left to right.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self, PermError> {
        let mut p = Self::identity(n)?;
        for cycle in cycles {
            let mut c = Self::identity(n)?;
            for w in cycle.windows(2) {
                let (a, b) = (w[0], w[1]);
                if a >= n || b >= n {
                    return Err(PermError::PointOutOfRange { point: a.max(b), degree: n });
                }
                c.images[a] = b as u16;
            }
            if cycle.len() > 1 {
                let (first, last) = (cycle[0], cycle[cycle.len() - 1]);
                c.images[last] = first as u16;
            }
            p = p.mul(&c)?;
        }
        Ok(p)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u16] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &img)| i == img as usize)
    }

    pub fn mul(&self, other: &Permutation) -> Result<Permutation, PermError> {
        if self.degree() != other.degree() {
            return Err(PermError::DegreeMismatch(self.degree(), other.degree()));
        }
        let images = self
            .images
            .iter()
            .map(|&m| other.images[m as usize])
            .collect();
        Ok(Permutation { images })
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0u16; self.degree()];
        for (i, &img) in self.images.iter().enumerate() {
            images[img as usize] = i as u16;
        }
        Permutation { images }
    }

    /// Nontrivial cycles, each starting at its smallest point, sorted by
    /// that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.apply(start) == start {
                seen[start] = true;
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut p = self.apply(start);
            while p != start {
                seen[p] = true;
                cycle.push(p);
                p = self.apply(p);
            }
            out.push(cycle);
        }
        out
    }

    /// Order as the lcm of cycle lengths.
    pub fn order(&self) -> Result<u64, PermError> {
        let mut acc: u128 = 1;
        for cycle in self.cycles() {
            let len = cycle.len() as u128;
            let g = gcd(acc, len);
            acc = (acc / g).checked_mul(len).ok_or(PermError::OrderOverflow)?;
            if acc > u64::MAX as u128 {
                return Err(PermError::OrderOverflow);
            }
        }
        Ok(acc as u64)
    }

    /// Number of points with p(i) = i.
    pub fn fixed_points(&self) -> usize {
        self.images
            .iter()
            .enumerate()
            .filter(|(i, &img)| *i == img as usize)
            .count()
    }

    pub fn is_even(&self) -> bool {
        self.cycles().iter().map(|c| c.len() - 1).sum::<usize>() % 2 == 0
    }
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl std::fmt::Display for Permutation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            write!(f, "(")?;
            for (k, p) in c.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{p}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}
