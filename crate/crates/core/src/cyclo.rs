//! Exact cyclotomic arithmetic.
//!
//! A value is a dense rational polynomial in ζ_n reduced mod the n-th
//! cyclotomic polynomial. Each value carries its own conductor n, so
//! character values stay in the small field Q(ζ_ord) of their column
//! instead of one huge field per table. Sums mixing many conductors go
//! through `RootSum`, a sparse accumulator over a canonical basis of
//! prime-power roots, which never materializes a large dense field.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num::{BigInt, BigRational, Integer, One, Zero};
use once_cell::sync::Lazy;
use thiserror::Error;

/// Guard against pathological conductors; every dense table is O(n·φ(n)).
pub const MAX_CONDUCTOR: u64 = 5000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CycloError {
    #[error("conductor must be positive")]
    ConductorZero,
    #[error("conductor {n} exceeds the supported bound {max}", max = MAX_CONDUCTOR)]
    ConductorTooLarge { n: u64 },
    #[error("exponent {k} is not coprime to the conductor {n}")]
    NotCoprime { k: u64, n: u64 },
    #[error("conductor {from} does not divide {to}")]
    NotDivisor { from: u64, to: u64 },
}

pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut a = 0u32;
            while n % p == 0 {
                n /= p;
                a += 1;
            }
            out.push((p, a));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .map(|(p, a)| (p - 1) * p.pow(a - 1))
        .product::<u64>()
        .max(1)
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d != n / d {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a / a.gcd(&b) * b
}

fn inv_mod(a: u64, m: u64) -> u64 {
    // Extended Euclid; assumes gcd(a, m) = 1 and m > 1.
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1);
    (s0.rem_euclid(m as i128)) as u64
}

/// Dense data for one conductor: the cyclotomic polynomial and reduction
/// rows expressing x^k mod Φ_n for every k needed by products and lifts.
struct CycloTable {
    deg: usize,
    /// Coefficients of Φ_n, ascending degree, length deg + 1.
    phi: Vec<BigInt>,
    /// Row j gives x^{deg+j} as a dense integer vector of length deg.
    rows: Vec<Vec<BigInt>>,
}

static TABLES: Lazy<Mutex<HashMap<u64, Arc<CycloTable>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Coefficients of Φ_n, ascending degree. Built by dividing x^n − 1 by the
/// cyclotomic polynomials of the proper divisors.
fn cyclotomic_poly(n: u64) -> Vec<BigInt> {
    // x^n − 1.
    let mut poly: Vec<BigInt> = vec![BigInt::zero(); n as usize + 1];
    poly[0] = -BigInt::one();
    poly[n as usize] = BigInt::one();
    for d in divisors(n) {
        if d == n {
            continue;
        }
        let phi_d = table(d).expect("divisor conductor is within bounds");
        poly = divide_exact(&poly, &phi_d.phi);
    }
    poly
}

fn divide_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dn = num.len() - 1;
    let dd = den.len() - 1;
    assert!(den[dd].is_one(), "divisor must be monic");
    let mut rem: Vec<BigInt> = num.to_vec();
    let mut quot = vec![BigInt::zero(); dn - dd + 1];
    for k in (0..=dn - dd).rev() {
        let c = rem[k + dd].clone();
        if !c.is_zero() {
            for i in 0..dd {
                let delta = &c * &den[i];
                rem[k + i] -= delta;
            }
            rem[k + dd] = BigInt::zero();
        }
        quot[k] = c;
    }
    debug_assert!(rem.iter().all(|c| c.is_zero()), "division must be exact");
    quot
}

fn table(n: u64) -> Result<Arc<CycloTable>, CycloError> {
    if n == 0 {
        return Err(CycloError::ConductorZero);
    }
    if n > MAX_CONDUCTOR {
        return Err(CycloError::ConductorTooLarge { n });
    }
    if let Some(t) = TABLES.lock().expect("table lock").get(&n) {
        return Ok(Arc::clone(t));
    }
    let phi = cyclotomic_poly(n);
    let deg = phi.len() - 1;
    // Reduction rows for exponents deg .. max(n, 2·deg−1) − 1, enough for
    // products of reduced values and for lifting ζ_d into ζ_n.
    let highest = (n as usize).max(if deg == 0 { 0 } else { 2 * deg - 1 });
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    if deg > 0 && highest > deg {
        let base: Vec<BigInt> = (0..deg).map(|i| -phi[i].clone()).collect();
        rows.push(base);
        for _ in deg + 1..highest {
            let prev = rows.last().expect("just pushed");
            let carry = prev[deg - 1].clone();
            let mut next = vec![BigInt::zero(); deg];
            for i in 1..deg {
                next[i] = prev[i - 1].clone();
            }
            if !carry.is_zero() {
                let base = &rows[0];
                for i in 0..deg {
                    next[i] += &carry * &base[i];
                }
            }
            rows.push(next);
        }
    }
    let t = Arc::new(CycloTable { deg, phi, rows });
    TABLES
        .lock()
        .expect("table lock")
        .entry(n)
        .or_insert_with(|| Arc::clone(&t));
    Ok(t)
}

/// Reduce a raw coefficient vector (powers of ζ_n from 0 upward) to the
/// dense basis 1, ζ, …, ζ^{φ(n)−1}. Exponents are folded mod n first, so
/// inputs of any length are safe.
fn reduce_raw(n: u64, raw: Vec<BigRational>) -> Result<Vec<BigRational>, CycloError> {
    let t = table(n)?;
    let mut out = vec![BigRational::zero(); t.deg];
    for (k, c) in raw.into_iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let k = k % n as usize;
        if k < t.deg {
            out[k] += c;
        } else {
            let row = &t.rows[k - t.deg];
            for i in 0..t.deg {
                if !row[i].is_zero() {
                    out[i] += &c * BigRational::from(row[i].clone());
                }
            }
        }
    }
    Ok(out)
}

/// An element of Q(ζ_n) in the power basis mod Φ_n.
#[derive(Clone, Debug)]
pub struct Cyclotomic {
    n: u64,
    coeffs: Vec<BigRational>,
}

impl Cyclotomic {
    pub fn zero(n: u64) -> Result<Self, CycloError> {
        let t = table(n)?;
        Ok(Cyclotomic {
            n,
            coeffs: vec![BigRational::zero(); t.deg],
        })
    }

    pub fn from_rational(q: BigRational) -> Self {
        Cyclotomic {
            n: 1,
            coeffs: vec![q],
        }
    }

    pub fn from_integer(k: i64) -> Self {
        Self::from_rational(BigRational::from(BigInt::from(k)))
    }

    /// ζ_n^k.
    pub fn zeta(n: u64, k: u64) -> Result<Self, CycloError> {
        if n == 0 {
            return Err(CycloError::ConductorZero);
        }
        let mut raw = vec![BigRational::zero(); (k % n) as usize + 1];
        *raw.last_mut().expect("nonempty") = BigRational::one();
        Ok(Cyclotomic {
            n,
            coeffs: reduce_raw(n, raw)?,
        })
    }

    /// Build from coefficients of 1, ζ_n, …; longer vectors are reduced.
    pub fn from_coeffs(n: u64, coeffs: Vec<BigRational>) -> Result<Self, CycloError> {
        Ok(Cyclotomic {
            n,
            coeffs: reduce_raw(n, coeffs)?,
        })
    }

    pub fn conductor(&self) -> u64 {
        self.n
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The rational value, if the element lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn is_integer(&self) -> bool {
        self.as_rational().is_some_and(|q| q.is_integer())
    }

    /// Rewrite in Q(ζ_m) for n | m.
    pub fn lift_to(&self, m: u64) -> Result<Cyclotomic, CycloError> {
        if m == self.n {
            return Ok(self.clone());
        }
        if m == 0 || m % self.n != 0 {
            return Err(CycloError::NotDivisor { from: self.n, to: m });
        }
        let step = (m / self.n) as usize;
        let mut raw = vec![BigRational::zero(); (self.coeffs.len() - 1) * step + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                raw[i * step] = c.clone();
            }
        }
        Ok(Cyclotomic {
            n: m,
            coeffs: reduce_raw(m, raw)?,
        })
    }

    pub fn add(&self, other: &Cyclotomic) -> Result<Cyclotomic, CycloError> {
        let m = lcm_u64(self.n, other.n);
        let mut a = self.lift_to(m)?;
        let b = other.lift_to(m)?;
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x += y;
        }
        Ok(a)
    }

    pub fn sub(&self, other: &Cyclotomic) -> Result<Cyclotomic, CycloError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Cyclotomic {
        Cyclotomic {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn scale(&self, q: &BigRational) -> Cyclotomic {
        Cyclotomic {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    pub fn mul(&self, other: &Cyclotomic) -> Result<Cyclotomic, CycloError> {
        // Rational fast paths keep table work off the common case.
        if let Some(q) = self.as_rational() {
            return Ok(other.scale(&q));
        }
        if let Some(q) = other.as_rational() {
            return Ok(self.scale(&q));
        }
        let m = lcm_u64(self.n, other.n);
        let a = self.lift_to(m)?;
        let b = other.lift_to(m)?;
        let mut raw = vec![BigRational::zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    raw[i + j] += x * y;
                }
            }
        }
        Ok(Cyclotomic {
            n: m,
            coeffs: reduce_raw(m, raw)?,
        })
    }

    /// Substitution ζ ↦ ζ^k, a field automorphism when gcd(k, n) = 1.
    pub fn galois(&self, k: u64) -> Result<Cyclotomic, CycloError> {
        let k = k % self.n;
        if k.gcd(&self.n) != 1 {
            return Err(CycloError::NotCoprime { k, n: self.n });
        }
        let mut raw = vec![BigRational::zero(); self.n as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                raw[(i as u64 * k % self.n) as usize] += c;
            }
        }
        Ok(Cyclotomic {
            n: self.n,
            coeffs: reduce_raw(self.n, raw)?,
        })
    }

    /// Complex conjugation ζ ↦ ζ^{−1}.
    pub fn conj(&self) -> Cyclotomic {
        if self.n == 1 {
            return self.clone();
        }
        self.galois(self.n - 1)
            .expect("n−1 is always coprime to n")
    }

    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }

    /// |z|² = z·conj(z).
    pub fn norm_squared(&self) -> Result<Cyclotomic, CycloError> {
        self.mul(&self.conj())
    }

    /// Rewrite at the smallest possible conductor.
    pub fn reduced(&self) -> Result<Cyclotomic, CycloError> {
        let mut s = RootSum::new();
        s.add_scaled(self, &BigRational::one());
        s.to_cyclotomic()
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        if self.n == other.n {
            return self.coeffs == other.coeffs;
        }
        // Cross-conductor comparison goes through the sparse basis, so no
        // large dense field is ever built just to compare.
        let mut s = RootSum::new();
        s.add_scaled(self, &BigRational::one());
        let minus_one = -BigRational::one();
        s.add_scaled(other, &minus_one);
        s.is_zero()
    }
}

impl Eq for Cyclotomic {}

/// Key for one basis monomial: factors (p^a, t) with p ∤ t and
/// 1 ≤ t < φ(p^a), sorted by prime power. The empty product is 1.
type Monomial = Vec<(u64, u64)>;

/// Sparse exact accumulator of rational multiples of roots of unity, kept
/// in a canonical product basis of prime-power roots. Sums over values of
/// many different conductors reduce here term by term; zero and rational
/// tests are then immediate.
#[derive(Clone, Debug, Default)]
pub struct RootSum {
    terms: BTreeMap<Monomial, BigRational>,
}

impl RootSum {
    pub fn new() -> Self {
        RootSum::default()
    }

    /// Add c·ζ_n^k.
    pub fn add_root(&mut self, n: u64, k: u64, c: &BigRational) {
        if c.is_zero() {
            return;
        }
        // Reduce the fraction k/n so the root is written at its true order.
        let k = k % n;
        let g = if k == 0 { n } else { k.gcd(&n) };
        let (n, k) = (n / g, k / g);
        // Split ζ_n^k over the prime-power parts of n.
        let mut factors: Vec<(u64, u64, u64)> = Vec::new(); // (p, p^a, exponent)
        for (p, a) in factorize(n) {
            let q = p.pow(a);
            let e = (k % q) * (inv_mod(n / q, q) % q) % q;
            factors.push((p, q, e));
        }
        // Expand out-of-range factors by the relation
        // ζ^{(p−1)p^{a−1}} = −Σ_{i<p−1} ζ^{i·p^{a−1}}.
        let mut partial: Vec<(BigRational, Monomial)> = vec![(c.clone(), Vec::new())];
        for (p, q, e) in factors {
            let phi = q / p * (p - 1);
            let mut next: Vec<(BigRational, Monomial)> = Vec::new();
            for (coeff, mono) in partial {
                if e == 0 {
                    next.push((coeff, mono));
                } else if e < phi {
                    let mut m = mono.clone();
                    m.push((q, e));
                    next.push((coeff, m));
                } else {
                    let r = e - phi;
                    let step = q / p;
                    for i in 0..p - 1 {
                        let t = r + i * step;
                        let mut m = mono.clone();
                        if t != 0 {
                            m.push((q, t));
                        }
                        next.push((-coeff.clone(), m));
                    }
                }
            }
            partial = next;
        }
        for (coeff, mut mono) in partial {
            mono.sort_unstable();
            let entry = self.terms.entry(mono.clone()).or_insert_with(BigRational::zero);
            *entry += coeff;
            if entry.is_zero() {
                self.terms.remove(&mono);
            }
        }
    }

    /// Add c times a dense value.
    pub fn add_scaled(&mut self, v: &Cyclotomic, c: &BigRational) {
        if c.is_zero() {
            return;
        }
        for (i, coeff) in v.coeffs().iter().enumerate() {
            if !coeff.is_zero() {
                let scaled = coeff * c;
                self.add_root(v.conductor(), i as u64, &scaled);
            }
        }
    }

    pub fn add_rational(&mut self, q: &BigRational) {
        self.add_root(1, 0, q);
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (mono, c) = self.terms.iter().next().expect("length checked");
                if mono.is_empty() {
                    Some(c.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Smallest conductor whose cyclotomic field contains the value.
    pub fn conductor(&self) -> u64 {
        let mut n = 1u64;
        for mono in self.terms.keys() {
            for &(q, _) in mono {
                n = lcm_u64(n, q);
            }
        }
        n
    }

    /// Densify at the minimal conductor.
    pub fn to_cyclotomic(&self) -> Result<Cyclotomic, CycloError> {
        let n = self.conductor();
        let mut raw = vec![BigRational::zero(); n as usize];
        for (mono, c) in &self.terms {
            let mut e = 0u64;
            for &(q, t) in mono {
                e = (e + t * (n / q)) % n;
            }
            raw[e as usize] += c;
        }
        Cyclotomic::from_coeffs(n, raw)
    }
}
