//! Linear algebra over GF(2) on at most 64 dimensions, with vector-orbit
//! sweeps and quadratic-form invariants on at most 24 dimensions.
//!
//! Rows are machine words: bit `j` of row `i` is the matrix entry `(i, j)`.
//! Vectors are words with bit `i` holding coordinate `i`; matrices act on
//! column vectors, so `apply` computes `M·v` one row-parity at a time.

use thiserror::Error;

/// Largest matrix dimension supported by the word-per-row representation.
pub const MAX_DIM: usize = 64;

/// Largest dimension for exhaustive sweeps over the full vector space.
pub const MAX_SWEEP_DIM: usize = 24;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("dimension {0} exceeds the {MAX_DIM}-bit row representation")]
    DimensionTooLarge(usize),
    #[error("dimension {0} exceeds the 2^{MAX_SWEEP_DIM} sweep bound")]
    SweepTooLarge(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("row {0} has bits set beyond the declared dimension")]
    RowOutOfRange(usize),
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("empty generator list")]
    NoGenerators,
    #[error("Gram matrix must be symmetric with zero diagonal")]
    BadGram,
    #[error("quadratic form is degenerate")]
    DegenerateForm,
    #[error("form has odd dimension {0}; type is defined for dimension 2m")]
    OddDimension(usize),
}

fn mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// A square matrix over GF(2), one `u64` word per row.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitMatrix {
    n: usize,
    rows: Vec<u64>,
}

impl std::fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BitMatrix {}x{}:", self.n, self.n)?;
        for r in &self.rows {
            for j in 0..self.n {
                write!(f, "{}", (r >> j) & 1)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl BitMatrix {
    pub fn zero(n: usize) -> Result<Self, Gf2Error> {
        if n == 0 || n > MAX_DIM {
            return Err(Gf2Error::DimensionTooLarge(n));
        }
        Ok(BitMatrix { n, rows: vec![0; n] })
    }

    pub fn identity(n: usize) -> Result<Self, Gf2Error> {
        let mut m = Self::zero(n)?;
        for i in 0..n {
            m.rows[i] = 1u64 << i;
        }
        Ok(m)
    }

    pub fn from_rows(n: usize, rows: Vec<u64>) -> Result<Self, Gf2Error> {
        if n == 0 || n > MAX_DIM {
            return Err(Gf2Error::DimensionTooLarge(n));
        }
        if rows.len() != n {
            return Err(Gf2Error::DimensionMismatch(rows.len(), n));
        }
        for (i, r) in rows.iter().enumerate() {
            if r & !mask(n) != 0 {
                return Err(Gf2Error::RowOutOfRange(i));
            }
        }
        Ok(BitMatrix { n, rows })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn entry(&self, i: usize, j: usize) -> bool {
        (self.rows[i] >> j) & 1 == 1
    }

    pub fn set_entry(&mut self, i: usize, j: usize, v: bool) {
        if v {
            self.rows[i] |= 1 << j;
        } else {
            self.rows[i] &= !(1 << j);
        }
    }

    pub fn is_identity(&self) -> bool {
        self.rows.iter().enumerate().all(|(i, r)| *r == 1u64 << i)
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.n != other.n {
            return Err(Gf2Error::DimensionMismatch(self.n, other.n));
        }
        let mut rows = vec![0u64; self.n];
        for i in 0..self.n {
            let mut acc = 0u64;
            let mut a = self.rows[i];
            while a != 0 {
                let j = a.trailing_zeros() as usize;
                acc ^= other.rows[j];
                a &= a - 1;
            }
            rows[i] = acc;
        }
        Ok(BitMatrix { n: self.n, rows })
    }

    pub fn add(&self, other: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.n != other.n {
            return Err(Gf2Error::DimensionMismatch(self.n, other.n));
        }
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a ^ b)
            .collect();
        Ok(BitMatrix { n: self.n, rows })
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut rows = vec![0u64; self.n];
        for i in 0..self.n {
            let mut r = self.rows[i];
            while r != 0 {
                let j = r.trailing_zeros() as usize;
                rows[j] |= 1 << i;
                r &= r - 1;
            }
        }
        BitMatrix { n: self.n, rows }
    }

    /// `M·v` with `v` a column vector packed into a word.
    pub fn apply(&self, v: u64) -> u64 {
        let mut out = 0u64;
        for (i, r) in self.rows.iter().enumerate() {
            out |= (((r & v).count_ones() & 1) as u64) << i;
        }
        out
    }

    /// Gauss-Jordan inverse, if the matrix is invertible.
    pub fn inverse(&self) -> Result<BitMatrix, Gf2Error> {
        let n = self.n;
        let mut a = self.rows.clone();
        let mut b = BitMatrix::identity(n).expect("dim already validated").rows;
        let mut row = 0usize;
        for col in 0..n {
            let Some(p) = (row..n).find(|&r| (a[r] >> col) & 1 == 1) else {
                return Err(Gf2Error::NotInvertible);
            };
            a.swap(row, p);
            b.swap(row, p);
            for r in 0..n {
                if r != row && (a[r] >> col) & 1 == 1 {
                    a[r] ^= a[row];
                    b[r] ^= b[row];
                }
            }
            row += 1;
        }
        Ok(BitMatrix { n, rows: b })
    }

    pub fn pow(&self, mut e: u64) -> Result<BitMatrix, Gf2Error> {
        let mut acc = BitMatrix::identity(self.n)?;
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            base = base.mul(&base)?;
            e >>= 1;
        }
        Ok(acc)
    }
}

/// Row rank.
pub fn rank(m: &BitMatrix) -> usize {
    let mut rows: Vec<u64> = m.rows.clone();
    let mut r = 0usize;
    for col in 0..m.n {
        if let Some(p) = (r..rows.len()).find(|&i| (rows[i] >> col) & 1 == 1) {
            rows.swap(r, p);
            for i in 0..rows.len() {
                if i != r && (rows[i] >> col) & 1 == 1 {
                    rows[i] ^= rows[r];
                }
            }
            r += 1;
        }
    }
    r
}

/// Basis of `{v : M·v = 0}`. `rank(m) + kernel_basis(m).len() == dim`.
pub fn kernel_basis(m: &BitMatrix) -> Vec<u64> {
    let n = m.n;
    let mut rows = m.rows.clone();
    // Reduced row echelon form, remembering which column each pivot sits in.
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut r = 0usize;
    for col in 0..n {
        if let Some(p) = (r..rows.len()).find(|&i| (rows[i] >> col) & 1 == 1) {
            rows.swap(r, p);
            for i in 0..rows.len() {
                if i != r && (rows[i] >> col) & 1 == 1 {
                    rows[i] ^= rows[r];
                }
            }
            pivots.push((r, col));
            r += 1;
        }
    }
    let pivot_cols: u64 = pivots.iter().fold(0, |acc, &(_, c)| acc | (1 << c));
    let mut basis = Vec::new();
    for free in 0..n {
        if (pivot_cols >> free) & 1 == 1 {
            continue;
        }
        let mut v = 1u64 << free;
        for &(pr, pc) in &pivots {
            if (rows[pr] >> free) & 1 == 1 {
                v |= 1 << pc;
            }
        }
        debug_assert_eq!(m.apply(v), 0);
        basis.push(v);
    }
    basis
}

/// Dimension of the fixed space `{v : M·v = v}`, i.e. the nullity of `M + I`.
pub fn fixed_space_dimension(m: &BitMatrix) -> usize {
    let id = BitMatrix::identity(m.n).expect("dim validated at construction");
    let s = m.add(&id).expect("same dimension");
    m.n - rank(&s)
}

/// Orbit sweep domain. Over GF(2) every nonzero vector spans its own
/// projective point, so both modes walk the same set; the label records
/// which reading the caller wants.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VectorOrbitMode {
    NonzeroVectors,
    ProjectivePoints,
}

/// Result of a full orbit sweep: sizes ascending, one representative each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorOrbits {
    pub dim: usize,
    pub sizes: Vec<usize>,
    pub reps: Vec<u64>,
}

/// Orbits of the group generated by `gens` on the nonzero vectors of
/// GF(2)^n, by exhaustive sweep with a visited bitset. Single-threaded
/// reference path; n ≤ 24.
pub fn orbits_on_vectors(
    gens: &[BitMatrix],
    _mode: VectorOrbitMode,
) -> Result<VectorOrbits, Gf2Error> {
    let first = gens.first().ok_or(Gf2Error::NoGenerators)?;
    let n = first.dim();
    if n > MAX_SWEEP_DIM {
        return Err(Gf2Error::SweepTooLarge(n));
    }
    for g in gens {
        if g.dim() != n {
            return Err(Gf2Error::DimensionMismatch(g.dim(), n));
        }
        g.inverse()?; // orbits of a group action require invertible generators
    }
    let total: usize = 1usize << n;
    let mut visited = vec![0u64; (total + 63) / 64];
    let mut pairs: Vec<(usize, u64)> = Vec::new();
    let mut stack: Vec<u64> = Vec::new();
    for start in 1..total as u64 {
        if visited[(start >> 6) as usize] >> (start & 63) & 1 == 1 {
            continue;
        }
        visited[(start >> 6) as usize] |= 1 << (start & 63);
        stack.push(start);
        let mut size = 0usize;
        while let Some(v) = stack.pop() {
            size += 1;
            for g in gens {
                let w = g.apply(v);
                let slot = &mut visited[(w >> 6) as usize];
                let bit = 1u64 << (w & 63);
                if *slot & bit == 0 {
                    *slot |= bit;
                    stack.push(w);
                }
            }
        }
        pairs.push((size, start));
    }
    pairs.sort();
    Ok(VectorOrbits {
        dim: n,
        sizes: pairs.iter().map(|p| p.0).collect(),
        reps: pairs.iter().map(|p| p.1).collect(),
    })
}

/// A quadratic form on GF(2)^(2m): values on the basis plus the Gram matrix
/// of its polar form `b(u,v) = q(u+v) + q(u) + q(v)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticFormGf2 {
    n: usize,
    gram: BitMatrix,
    diag: u64,
    upper: Vec<u64>, // gram rows masked to columns above the diagonal
}

/// Witt type of a non-degenerate form on GF(2)^(2m).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormType {
    Plus,
    Minus,
}

impl QuadraticFormGf2 {
    pub fn new(gram: BitMatrix, diag: u64) -> Result<Self, Gf2Error> {
        let n = gram.dim();
        if diag & !mask(n) != 0 {
            return Err(Gf2Error::RowOutOfRange(0));
        }
        if gram != gram.transpose() {
            return Err(Gf2Error::BadGram);
        }
        for i in 0..n {
            if gram.entry(i, i) {
                return Err(Gf2Error::BadGram);
            }
        }
        // Row i keeps only the columns j > i, so evaluate sums each
        // unordered pair once.
        let upper = (0..n).map(|i| gram.rows[i] & !mask(i + 1)).collect();
        Ok(QuadraticFormGf2 { n, gram, diag, upper })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn gram(&self) -> &BitMatrix {
        &self.gram
    }

    pub fn diagonal(&self) -> u64 {
        self.diag
    }

    /// Standard hyperbolic (plus-type) form on 2m dimensions:
    /// q(v) = Σ v_{2i}·v_{2i+1}.
    pub fn hyperbolic(m: usize) -> Result<Self, Gf2Error> {
        let n = 2 * m;
        let mut gram = BitMatrix::zero(n)?;
        for i in 0..m {
            gram.set_entry(2 * i, 2 * i + 1, true);
            gram.set_entry(2 * i + 1, 2 * i, true);
        }
        Self::new(gram, 0)
    }

    /// Plus-type form twisted on one hyperbolic pair into the anisotropic
    /// binary form x² + xy + y², giving the minus type overall.
    pub fn minus_type(m: usize) -> Result<Self, Gf2Error> {
        let base = Self::hyperbolic(m)?;
        Self::new(base.gram, 0b11)
    }

    pub fn evaluate(&self, v: u64) -> bool {
        let mut acc = (v & self.diag).count_ones();
        let mut w = v;
        while w != 0 {
            let i = w.trailing_zeros() as usize;
            acc += (self.upper[i] & v).count_ones();
            w &= w - 1;
        }
        acc & 1 == 1
    }

    /// Polar form `b(u, v)`; bilinear, recovered from q.
    pub fn polar(&self, u: u64, v: u64) -> bool {
        let s = (self.evaluate(u ^ v) as u32) + (self.evaluate(u) as u32) + (self.evaluate(v) as u32);
        s & 1 == 1
    }

    pub fn is_nondegenerate(&self) -> bool {
        rank(&self.gram) == self.n
    }

    /// The form `v ↦ q(g·v)` for invertible `g` (a basis change).
    pub fn transform(&self, g: &BitMatrix) -> Result<Self, Gf2Error> {
        if g.dim() != self.n {
            return Err(Gf2Error::DimensionMismatch(g.dim(), self.n));
        }
        g.inverse()?;
        let gt = g.transpose();
        let gram = gt.mul(&self.gram)?.mul(g)?;
        let mut diag = 0u64;
        for i in 0..self.n {
            // column i of g
            let col = gt.rows[i];
            if self.evaluate(col) {
                diag |= 1 << i;
            }
        }
        Self::new(gram, diag)
    }

    /// Number of nonzero singular vectors (q = 0), by exhaustive count.
    pub fn singular_count(&self) -> Result<usize, Gf2Error> {
        if self.n > MAX_SWEEP_DIM {
            return Err(Gf2Error::SweepTooLarge(self.n));
        }
        let total = 1u64 << self.n;
        let mut count = 0usize;
        for v in 1..total {
            if !self.evaluate(v) {
                count += 1;
            }
        }
        Ok(count)
    }
}

/// Witt type of a non-degenerate even-dimensional form, decided by the
/// exhaustive singular-vector count: plus iff the count is
/// (2^(m-1)+1)(2^m-1) for dimension 2m.
pub fn quadratic_form_type(q: &QuadraticFormGf2) -> Result<FormType, Gf2Error> {
    if q.n % 2 != 0 {
        return Err(Gf2Error::OddDimension(q.n));
    }
    if !q.is_nondegenerate() {
        return Err(Gf2Error::DegenerateForm);
    }
    let m = q.n / 2;
    let count = q.singular_count()?;
    let plus = ((1usize << (m - 1)) + 1) * ((1usize << m) - 1);
    let minus = ((1usize << (m - 1)) - 1) * ((1usize << m) + 1);
    if count == plus {
        Ok(FormType::Plus)
    } else if count == minus {
        Ok(FormType::Minus)
    } else {
        Err(Gf2Error::DegenerateForm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn companion_x3_x_1() -> BitMatrix {
        // Companion matrix of x^3 + x + 1: e0 -> e1 -> e2 -> e0 + e1.
        // Column convention: M·e_j = column j.
        let mut m = BitMatrix::zero(3).unwrap();
        m.set_entry(1, 0, true); // col 0 = e1
        m.set_entry(2, 1, true); // col 1 = e2
        m.set_entry(0, 2, true); // col 2 = e0 + e1
        m.set_entry(1, 2, true);
        m
    }

    #[test]
    fn identity_and_mul() {
        let id = BitMatrix::identity(5).unwrap();
        let c = companion_x3_x_1();
        assert!(id.is_identity());
        assert_eq!(c.mul(&BitMatrix::identity(3).unwrap()).unwrap(), c);
        assert!(c.mul(&id).is_err());
    }

    #[test]
    fn companion_has_order_seven() {
        let c = companion_x3_x_1();
        let mut p = BitMatrix::identity(3).unwrap();
        let mut order = 0;
        for k in 1..=8 {
            p = p.mul(&c).unwrap();
            if p.is_identity() {
                order = k;
                break;
            }
        }
        assert_eq!(order, 7);
    }

    #[test]
    fn inverse_roundtrip() {
        let c = companion_x3_x_1();
        let inv = c.inverse().unwrap();
        assert!(c.mul(&inv).unwrap().is_identity());
    }

    #[test]
    fn rank_kernel_split() {
        let c = companion_x3_x_1();
        assert_eq!(rank(&c), 3);
        assert!(kernel_basis(&c).is_empty());
        let z = BitMatrix::zero(4).unwrap();
        assert_eq!(rank(&z), 0);
        assert_eq!(kernel_basis(&z).len(), 4);
    }

    #[test]
    fn fixed_space_of_identity_is_everything() {
        let id = BitMatrix::identity(24).unwrap();
        assert_eq!(fixed_space_dimension(&id), 24);
    }

    #[test]
    fn fixed_space_of_companion_is_trivial() {
        // Exhaustive oracle: count vectors with M·v = v.
        let c = companion_x3_x_1();
        let fixed = (0u64..8).filter(|&v| c.apply(v) == v).count();
        assert_eq!(fixed, 1); // the zero vector only
        assert_eq!(fixed_space_dimension(&c), 0);
    }

    #[test]
    fn singer_orbit_on_gf2_cubed() {
        let c = companion_x3_x_1();
        let orbits = orbits_on_vectors(&[c], VectorOrbitMode::ProjectivePoints).unwrap();
        assert_eq!(orbits.sizes, vec![7]);
    }

    #[test]
    fn identity_orbits_are_singletons() {
        let id = BitMatrix::identity(4).unwrap();
        let orbits = orbits_on_vectors(&[id], VectorOrbitMode::NonzeroVectors).unwrap();
        assert_eq!(orbits.sizes, vec![1; 15]);
    }

    #[test]
    fn hyperbolic_plane_is_plus() {
        let q = QuadraticFormGf2::hyperbolic(1).unwrap();
        // Singular nonzero vectors of x·y on GF(2)^2: (1,0) and (0,1).
        assert_eq!(q.singular_count().unwrap(), 2);
        assert_eq!(quadratic_form_type(&q).unwrap(), FormType::Plus);
    }

    #[test]
    fn anisotropic_plane_is_minus() {
        let q = QuadraticFormGf2::minus_type(1).unwrap();
        assert_eq!(q.singular_count().unwrap(), 0);
        assert_eq!(quadratic_form_type(&q).unwrap(), FormType::Minus);
    }

    #[test]
    fn polar_form_matches_gram() {
        let q = QuadraticFormGf2::hyperbolic(3).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(q.polar(1 << i, 1 << j), q.gram().entry(i, j));
            }
        }
    }

    #[test]
    fn ten_dimensional_plus_count() {
        let q = QuadraticFormGf2::hyperbolic(5).unwrap();
        assert_eq!(q.singular_count().unwrap(), 17 * 31);
        assert_eq!(quadratic_form_type(&q).unwrap(), FormType::Plus);
    }
}
