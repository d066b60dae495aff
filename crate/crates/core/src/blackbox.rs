//! Black-box group elements and finitely generated groups.
//!
//! Elements expose multiplication, inversion and equality only; everything
//! here works for both concrete backends (permutations and GF(2) matrices)
//! without looking inside beyond those operations, except where an
//! operation is defined for one backend only and says so.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::gf2::{BitMatrix, Gf2Error};
use crate::perm::{PermError, Permutation};

/// Iteration cap for matrix element orders.
pub const DEFAULT_ORDER_CAP: u64 = 1 << 20;

/// Slot count floor and scramble length for product replacement.
const MIN_SLOTS: usize = 10;
const SCRAMBLE_STEPS: usize = 60;

#[derive(Debug, Error)]
pub enum BlackboxError {
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Mat(#[from] Gf2Error),
    #[error("elements come from different backends")]
    BackendMismatch,
    #[error("generator list is empty")]
    EmptyGenerators,
    #[error("enumeration exceeded cap {cap}")]
    Overflow { cap: usize },
    #[error("element order exceeds cap {cap}")]
    OrderOverflow { cap: u64 },
    #[error("element is not an involution")]
    NotInvolution,
    #[error("operation requires the permutation backend")]
    PermRequired,
}

/// A group element in one of the two concrete backends.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum GroupElement {
    Perm(Permutation),
    Mat(BitMatrix),
}

impl GroupElement {
    pub fn backend_name(&self) -> &'static str {
        match self {
            GroupElement::Perm(_) => "perm",
            GroupElement::Mat(_) => "gf2",
        }
    }

    /// Degree for permutations, dimension for matrices.
    pub fn size(&self) -> usize {
        match self {
            GroupElement::Perm(p) => p.degree(),
            GroupElement::Mat(m) => m.dim(),
        }
    }

    pub fn identity_like(&self) -> GroupElement {
        match self {
            GroupElement::Perm(p) => {
                GroupElement::Perm(Permutation::identity(p.degree()).expect("valid degree"))
            }
            GroupElement::Mat(m) => {
                GroupElement::Mat(BitMatrix::identity(m.dim()).expect("valid dimension"))
            }
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            GroupElement::Perm(p) => p.is_identity(),
            GroupElement::Mat(m) => m.is_identity(),
        }
    }

    pub fn mul(&self, other: &GroupElement) -> Result<GroupElement, BlackboxError> {
        match (self, other) {
            (GroupElement::Perm(a), GroupElement::Perm(b)) => Ok(GroupElement::Perm(a.mul(b)?)),
            (GroupElement::Mat(a), GroupElement::Mat(b)) => Ok(GroupElement::Mat(a.mul(b)?)),
            _ => Err(BlackboxError::BackendMismatch),
        }
    }

    pub fn inverse(&self) -> Result<GroupElement, BlackboxError> {
        match self {
            GroupElement::Perm(p) => Ok(GroupElement::Perm(p.inverse())),
            GroupElement::Mat(m) => Ok(GroupElement::Mat(m.inverse()?)),
        }
    }

    pub fn pow(&self, e: i64) -> Result<GroupElement, BlackboxError> {
        let (mut base, mut e) = if e < 0 {
            (self.inverse()?, e.unsigned_abs())
        } else {
            (self.clone(), e as u64)
        };
        let mut acc = self.identity_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// `x⁻¹·self·x`.
    pub fn conj(&self, x: &GroupElement) -> Result<GroupElement, BlackboxError> {
        x.inverse()?.mul(self)?.mul(x)
    }

    /// Commutator `[self, other] = self⁻¹·other⁻¹·self·other`.
    pub fn comm(&self, other: &GroupElement) -> Result<GroupElement, BlackboxError> {
        self.inverse()?.mul(&other.inverse()?)?.mul(self)?.mul(other)
    }

    pub fn commutes_with(&self, other: &GroupElement) -> Result<bool, BlackboxError> {
        Ok(self.mul(other)? == other.mul(self)?)
    }
}

/// Order of an element. Permutations use the lcm of cycle lengths; matrices
/// iterate multiplication up to `cap`.
pub fn element_order_with_cap(g: &GroupElement, cap: u64) -> Result<u64, BlackboxError> {
    match g {
        GroupElement::Perm(p) => p.order().map_err(|_| BlackboxError::OrderOverflow { cap }),
        GroupElement::Mat(m) => {
            let mut acc = m.clone();
            let mut k = 1u64;
            while !acc.is_identity() {
                if k >= cap {
                    return Err(BlackboxError::OrderOverflow { cap });
                }
                acc = acc.mul(m)?;
                k += 1;
            }
            Ok(k)
        }
    }
}

pub fn element_order(g: &GroupElement) -> Result<u64, BlackboxError> {
    element_order_with_cap(g, DEFAULT_ORDER_CAP)
}

/// Fully enumerated element set: closure list in discovery order plus a
/// membership index.
pub struct ElementCache {
    list: Vec<GroupElement>,
    index: HashMap<GroupElement, usize>,
}

impl ElementCache {
    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.list
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.index.contains_key(g)
    }

    pub fn position(&self, g: &GroupElement) -> Option<usize> {
        self.index.get(g).copied()
    }
}

/// Multiset of element orders. Full mode carries exact multiplicities from
/// an enumeration; sampled mode records presence only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderSpectrum {
    Full(BTreeMap<u64, usize>),
    Sampled(BTreeSet<u64>),
}

impl OrderSpectrum {
    pub fn orders(&self) -> BTreeSet<u64> {
        match self {
            OrderSpectrum::Full(m) => m.keys().copied().collect(),
            OrderSpectrum::Sampled(s) => s.clone(),
        }
    }

    pub fn contains(&self, order: u64) -> bool {
        match self {
            OrderSpectrum::Full(m) => m.contains_key(&order),
            OrderSpectrum::Sampled(s) => s.contains(&order),
        }
    }

    pub fn is_full(&self) -> bool {
        matches!(self, OrderSpectrum::Full(_))
    }
}

/// Product-replacement state: a slot vector scrambled in place plus a
/// rattle accumulator that takes every replaced slot on the right.
struct ReplacementState {
    slots: Vec<GroupElement>,
    acc: GroupElement,
    rng: ChaCha8Rng,
}

impl ReplacementState {
    fn new(gens: &[GroupElement], seed: u64) -> Result<Self, BlackboxError> {
        let count = MIN_SLOTS.max(2 * gens.len());
        let slots: Vec<GroupElement> = (0..count).map(|i| gens[i % gens.len()].clone()).collect();
        let mut state = ReplacementState {
            acc: gens[0].identity_like(),
            slots,
            rng: ChaCha8Rng::seed_from_u64(seed),
        };
        for _ in 0..SCRAMBLE_STEPS {
            state.step()?;
        }
        Ok(state)
    }

    fn step(&mut self) -> Result<(), BlackboxError> {
        let n = self.slots.len();
        let i = self.rng.gen_range(0..n);
        let mut j = self.rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let variant = self.rng.gen_range(0..4u8);
        let other = match variant {
            0 | 2 => self.slots[j].clone(),
            _ => self.slots[j].inverse()?,
        };
        self.slots[i] = match variant {
            0 | 1 => self.slots[i].mul(&other)?,
            _ => other.mul(&self.slots[i])?,
        };
        self.acc = self.acc.mul(&self.slots[i])?;
        Ok(())
    }

    fn draw(&mut self) -> Result<GroupElement, BlackboxError> {
        self.step()?;
        Ok(self.acc.clone())
    }
}

/// A group given by generators, with optional cached enumeration and a
/// deterministic random-element stream.
pub struct GeneratedGroup {
    gens: Vec<GroupElement>,
    cache: Option<ElementCache>,
    state: Option<ReplacementState>,
    seed: u64,
}

impl GeneratedGroup {
    pub fn new(gens: Vec<GroupElement>) -> Result<Self, BlackboxError> {
        let first = gens.first().ok_or(BlackboxError::EmptyGenerators)?;
        for g in &gens[1..] {
            if g.backend_name() != first.backend_name() || g.size() != first.size() {
                return Err(BlackboxError::BackendMismatch);
            }
        }
        Ok(GeneratedGroup {
            gens,
            cache: None,
            state: None,
            seed: 0,
        })
    }

    pub fn with_seed(gens: Vec<GroupElement>, seed: u64) -> Result<Self, BlackboxError> {
        let mut g = Self::new(gens)?;
        g.reseed(seed)?;
        Ok(g)
    }

    /// Reset the random stream. Two groups seeded identically produce
    /// identical draw sequences.
    pub fn reseed(&mut self, seed: u64) -> Result<(), BlackboxError> {
        self.seed = seed;
        self.state = Some(ReplacementState::new(&self.gens, seed)?);
        Ok(())
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.gens
    }

    pub fn identity(&self) -> GroupElement {
        self.gens[0].identity_like()
    }

    /// Next element of the replacement stream. Seeds with 0 on first use if
    /// no seed was set explicitly.
    pub fn random_element(&mut self) -> Result<GroupElement, BlackboxError> {
        if self.state.is_none() {
            self.state = Some(ReplacementState::new(&self.gens, self.seed)?);
        }
        self.state.as_mut().expect("just initialized").draw()
    }

    /// Breadth-first closure of the generators. Fails with `Overflow` once
    /// the element count passes `cap`; the partial set is discarded. The
    /// result is cached and reused by later calls with a sufficient cap.
    pub fn enumerate(&mut self, cap: usize) -> Result<&ElementCache, BlackboxError> {
        if let Some(c) = &self.cache {
            if c.len() <= cap {
                return Ok(self.cache.as_ref().expect("cache checked"));
            }
            return Err(BlackboxError::Overflow { cap });
        }
        let id = self.identity();
        let mut list = vec![id.clone()];
        let mut index = HashMap::new();
        index.insert(id, 0usize);
        let mut queue = VecDeque::from([0usize]);
        while let Some(at) = queue.pop_front() {
            for g in &self.gens {
                let next = list[at].mul(g)?;
                if !index.contains_key(&next) {
                    index.insert(next.clone(), list.len());
                    list.push(next);
                    if list.len() > cap {
                        return Err(BlackboxError::Overflow { cap });
                    }
                    queue.push_back(list.len() - 1);
                }
            }
        }
        self.cache = Some(ElementCache { list, index });
        Ok(self.cache.as_ref().expect("just filled"))
    }

    pub fn cached(&self) -> Option<&ElementCache> {
        self.cache.as_ref()
    }

    /// Exact order multiset over a full enumeration.
    pub fn order_spectrum(&mut self, cap: usize) -> Result<OrderSpectrum, BlackboxError> {
        self.enumerate(cap)?;
        let cache = self.cache.as_ref().expect("enumerated");
        let mut counts = BTreeMap::new();
        for g in cache.elements() {
            *counts.entry(element_order(g)?).or_insert(0usize) += 1;
        }
        Ok(OrderSpectrum::Full(counts))
    }

    /// Orders seen in `samples` random draws; presence only.
    pub fn sampled_spectrum(&mut self, samples: usize) -> Result<OrderSpectrum, BlackboxError> {
        let mut seen = BTreeSet::new();
        seen.insert(1); // the identity is always present
        for _ in 0..samples {
            let g = self.random_element()?;
            seen.insert(element_order(&g)?);
        }
        Ok(OrderSpectrum::Sampled(seen))
    }

    /// Orbit lengths on the permutation domain, sorted descending.
    pub fn orbit_lengths(&self) -> Result<Vec<usize>, BlackboxError> {
        let degree = match &self.gens[0] {
            GroupElement::Perm(p) => p.degree(),
            GroupElement::Mat(_) => return Err(BlackboxError::PermRequired),
        };
        let mut seen = vec![false; degree];
        let mut lengths = Vec::new();
        for start in 0..degree {
            if seen[start] {
                continue;
            }
            let mut stack = vec![start];
            seen[start] = true;
            let mut size = 0usize;
            while let Some(p) = stack.pop() {
                size += 1;
                for g in &self.gens {
                    if let GroupElement::Perm(perm) = g {
                        let q = perm.apply(p);
                        if !seen[q] {
                            seen[q] = true;
                            stack.push(q);
                        }
                    }
                }
            }
            lengths.push(size);
        }
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        Ok(lengths)
    }
}

/// Conjugacy classes of an enumerated group, indexed in discovery order
/// (class 0 is the identity's).
pub struct ConjugacyClasses {
    pub class_of: Vec<usize>,
    pub reps: Vec<usize>,
    pub sizes: Vec<usize>,
    pub orders: Vec<u64>,
}

impl ConjugacyClasses {
    pub fn count(&self) -> usize {
        self.reps.len()
    }
}

/// Partition the cache into conjugacy classes by closing each element under
/// conjugation by the generators.
pub fn conjugacy_classes(
    cache: &ElementCache,
    gens: &[GroupElement],
) -> Result<ConjugacyClasses, BlackboxError> {
    let n = cache.len();
    let mut class_of = vec![usize::MAX; n];
    let mut reps = Vec::new();
    let mut sizes = Vec::new();
    let mut orders = Vec::new();
    for start in 0..n {
        if class_of[start] != usize::MAX {
            continue;
        }
        let id = reps.len();
        reps.push(start);
        orders.push(element_order(&cache.elements()[start])?);
        class_of[start] = id;
        let mut stack = vec![start];
        let mut size = 0usize;
        while let Some(at) = stack.pop() {
            size += 1;
            for g in gens {
                let c = cache.elements()[at].conj(g)?;
                let pos = cache
                    .position(&c)
                    .expect("conjugate of a member stays in the closed set");
                if class_of[pos] == usize::MAX {
                    class_of[pos] = id;
                    stack.push(pos);
                }
            }
        }
        sizes.push(size);
    }
    Ok(ConjugacyClasses {
        class_of,
        reps,
        sizes,
        orders,
    })
}

/// Elements of an involution's centralizer from random draws.
///
/// For each draw g, let c = [t, g]. Odd order 2k+1 yields g·c^k; even order
/// 2k yields c^k and [t, g⁻¹]^k. Every output is checked to commute with t.
pub fn bray_centralizer_elements(
    t: &GroupElement,
    grp: &mut GeneratedGroup,
    count: usize,
) -> Result<Vec<GroupElement>, BlackboxError> {
    if element_order(t)? != 2 {
        return Err(BlackboxError::NotInvolution);
    }
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let g = grp.random_element()?;
        let c = t.comm(&g)?;
        let n = element_order(&c)?;
        if n % 2 == 1 {
            let k = (n / 2) as i64;
            let elt = g.mul(&c.pow(k)?)?;
            assert!(elt.commutes_with(t)?, "Bray odd-case output must centralize t");
            out.push(elt);
        } else {
            let k = (n / 2) as i64;
            let first = c.pow(k)?;
            assert!(first.commutes_with(t)?, "Bray even-case output must centralize t");
            out.push(first);
            if out.len() < count {
                let second = t.comm(&g.inverse()?)?.pow(k)?;
                assert!(second.commutes_with(t)?, "Bray even-case output must centralize t");
                out.push(second);
            }
        }
    }
    Ok(out)
}

/// Elements of `elements` commuting with every element of `targets`.
pub fn centralizer_bruteforce(
    elements: &[GroupElement],
    targets: &[GroupElement],
) -> Result<Vec<GroupElement>, BlackboxError> {
    let mut out = Vec::new();
    'outer: for g in elements {
        for t in targets {
            if !g.commutes_with(t)? {
                continue 'outer;
            }
        }
        out.push(g.clone());
    }
    Ok(out)
}

/// Search `elements` for a witness x with `a^x = b`.
pub fn is_conjugate_bruteforce(
    a: &GroupElement,
    b: &GroupElement,
    elements: &[GroupElement],
) -> Result<Option<GroupElement>, BlackboxError> {
    for x in elements {
        if a.conj(x)? == *b {
            return Ok(Some(x.clone()));
        }
    }
    Ok(None)
}
