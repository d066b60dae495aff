//! Character tables: loading, validation, and exact class arithmetic.
//!
//! A table file declares the group order, the conjugacy classes (name,
//! size, element order, prime power maps) and the irreducible characters
//! as a square array of exact values. Loading validates the table against
//! the identities a genuine character table must satisfy, so downstream
//! counting arguments start from checked data.

use std::collections::{BTreeMap, HashSet, VecDeque};

use num::{BigInt, BigRational, BigUint, One, Signed, Zero};
use serde::Deserialize;
use thiserror::Error;

use crate::blackbox::{self, BlackboxError, GeneratedGroup, GroupElement};
use crate::cyclo::{factorize, Cyclotomic, CycloError, RootSum};

#[derive(Debug, Error)]
pub enum TableError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("table JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad number in {what}: `{text}`")]
    BadNumber { what: String, text: String },
    #[error("table has no classes")]
    Empty,
    #[error("first class must be the identity (order 1, size 1)")]
    IdentityFirst,
    #[error("duplicate class name `{0}`")]
    DuplicateClassName(String),
    #[error("class sizes sum to {got}, group order is {order}")]
    SizesSum { got: BigUint, order: BigUint },
    #[error("size of class {class} does not divide the group order")]
    SizeDividesOrder { class: String },
    #[error("expected {classes} rows of {classes} values, found row {row} with {got}")]
    Shape { classes: usize, row: usize, got: usize },
    #[error("character {row} has degree `{got}`, not a positive integer")]
    DegreeNotPositive { row: usize, got: String },
    #[error("value at row {row}, class {class} has conductor {n} not dividing the declared conductor")]
    ConductorMismatch { row: usize, class: String, n: u64 },
    #[error("power map key `{key}` of class {class} is not a prime")]
    PowerMapPrime { class: String, key: String },
    #[error("power map {prime} of class {class} points outside the table")]
    PowerMapTarget { class: String, prime: u64 },
    #[error("power map {prime} of class {class} lands on a class of the wrong order")]
    PowerMapOrder { class: String, prime: u64 },
    #[error("class {class} lacks a power map for prime {prime} dividing its element order")]
    PowerMapMissing { class: String, prime: u64 },
    #[error("rows {row_a} and {row_b} are not orthogonal")]
    RowOrthogonality { row_a: usize, row_b: usize },
    #[error("column norm of class {class} does not match its centralizer order")]
    ColumnNorm { class: String },
    #[error("columns {class_a} and {class_b} are not orthogonal")]
    ColumnOrthogonality { class_a: String, class_b: String },
    #[error("no class named `{0}`")]
    UnknownClass(String),
    #[error("class index {0} out of range")]
    ClassIndex(usize),
    #[error("multiplication coefficient ({a}, {b} -> {c}) is not a non-negative integer: {got}")]
    CmcInvalid {
        a: String,
        b: String,
        c: String,
        got: String,
    },
    #[error("no route to the {k}-th power map of class {class} from its stored prime maps")]
    MissingPrimeMap { class: String, k: u64 },
    #[error(transparent)]
    Cyclo(#[from] CycloError),
    #[error(transparent)]
    Group(#[from] BlackboxError),
    #[error("table classes cannot be matched to the enumerated classes")]
    NoAlignment,
}

#[derive(Clone, Debug)]
pub struct ClassData {
    pub name: String,
    pub size: BigUint,
    pub order: u64,
    pub power_maps: BTreeMap<u64, usize>,
}

pub struct CharacterTable {
    name: String,
    order: BigUint,
    conductor: BigUint,
    classes: Vec<ClassData>,
    irreducibles: Vec<Vec<Cyclotomic>>,
}

#[derive(Deserialize)]
struct TableFile {
    name: String,
    order: String,
    conductor: String,
    classes: Vec<ClassFile>,
    irreducibles: Vec<Vec<ValueFile>>,
}

#[derive(Deserialize)]
struct ClassFile {
    name: String,
    size: String,
    order: u64,
    #[serde(default)]
    powermap: BTreeMap<String, usize>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ValueFile {
    Rational(String),
    Cyclo { n: u64, coeffs: Vec<String> },
}

fn parse_biguint(what: &str, text: &str) -> Result<BigUint, TableError> {
    text.parse().map_err(|_| TableError::BadNumber {
        what: what.into(),
        text: text.into(),
    })
}

fn parse_rational(what: &str, text: &str) -> Result<BigRational, TableError> {
    text.trim().parse().map_err(|_| TableError::BadNumber {
        what: what.into(),
        text: text.into(),
    })
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn big_rat(b: &BigUint) -> BigRational {
    BigRational::from(BigInt::from(b.clone()))
}

impl CharacterTable {
    pub fn load(path: &std::path::Path) -> Result<Self, TableError> {
        let text = std::fs::read_to_string(path).map_err(|source| TableError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json_str(&text)
    }

    pub fn from_json_str(text: &str) -> Result<Self, TableError> {
        let file: TableFile = serde_json::from_str(text)?;
        let order = parse_biguint("order", &file.order)?;
        let conductor = parse_biguint("conductor", &file.conductor)?;
        let mut classes = Vec::with_capacity(file.classes.len());
        for cf in &file.classes {
            let mut power_maps = BTreeMap::new();
            for (key, &target) in &cf.powermap {
                let p: u64 = key.parse().map_err(|_| TableError::PowerMapPrime {
                    class: cf.name.clone(),
                    key: key.clone(),
                })?;
                if !is_prime(p) {
                    return Err(TableError::PowerMapPrime {
                        class: cf.name.clone(),
                        key: key.clone(),
                    });
                }
                power_maps.insert(p, target);
            }
            classes.push(ClassData {
                name: cf.name.clone(),
                size: parse_biguint(&format!("size of {}", cf.name), &cf.size)?,
                order: cf.order,
                power_maps,
            });
        }
        let mut irreducibles = Vec::with_capacity(file.irreducibles.len());
        for (row, raw) in file.irreducibles.iter().enumerate() {
            let mut values = Vec::with_capacity(raw.len());
            for (col, vf) in raw.iter().enumerate() {
                let what = format!("value at row {row}, column {col}");
                let v = match vf {
                    ValueFile::Rational(text) => {
                        Cyclotomic::from_rational(parse_rational(&what, text)?)
                    }
                    ValueFile::Cyclo { n, coeffs } => {
                        let mut parsed = Vec::with_capacity(coeffs.len());
                        for c in coeffs {
                            parsed.push(parse_rational(&what, c)?);
                        }
                        Cyclotomic::from_coeffs(*n, parsed)?
                    }
                };
                values.push(v);
            }
            irreducibles.push(values);
        }
        let table = CharacterTable {
            name: file.name,
            order,
            conductor,
            classes,
            irreducibles,
        };
        table.validate()?;
        Ok(table)
    }

    fn validate(&self) -> Result<(), TableError> {
        let k = self.classes.len();
        if k == 0 {
            return Err(TableError::Empty);
        }
        if self.classes[0].order != 1 || !self.classes[0].size.is_one() {
            return Err(TableError::IdentityFirst);
        }
        let mut names = HashSet::new();
        for c in &self.classes {
            if !names.insert(c.name.as_str()) {
                return Err(TableError::DuplicateClassName(c.name.clone()));
            }
        }
        let total: BigUint = self.classes.iter().map(|c| c.size.clone()).sum();
        if total != self.order {
            return Err(TableError::SizesSum {
                got: total,
                order: self.order.clone(),
            });
        }
        for c in &self.classes {
            if (&self.order % &c.size) != BigUint::zero() {
                return Err(TableError::SizeDividesOrder {
                    class: c.name.clone(),
                });
            }
        }
        if self.irreducibles.len() != k {
            return Err(TableError::Shape {
                classes: k,
                row: self.irreducibles.len(),
                got: 0,
            });
        }
        for (row, values) in self.irreducibles.iter().enumerate() {
            if values.len() != k {
                return Err(TableError::Shape {
                    classes: k,
                    row,
                    got: values.len(),
                });
            }
        }
        for (row, values) in self.irreducibles.iter().enumerate() {
            let d = &values[0];
            let ok = d
                .as_rational()
                .is_some_and(|q| q.is_integer() && q.numer().is_positive());
            if !ok {
                return Err(TableError::DegreeNotPositive {
                    row,
                    got: format!("{:?}", d.coeffs()),
                });
            }
        }
        for (row, values) in self.irreducibles.iter().enumerate() {
            for (col, v) in values.iter().enumerate() {
                let n = BigUint::from(v.conductor());
                if (&self.conductor % &n) != BigUint::zero() {
                    return Err(TableError::ConductorMismatch {
                        row,
                        class: self.classes[col].name.clone(),
                        n: v.conductor(),
                    });
                }
            }
        }
        self.validate_power_maps()?;
        self.validate_orthogonality()?;
        Ok(())
    }

    fn validate_power_maps(&self) -> Result<(), TableError> {
        let k = self.classes.len();
        for c in &self.classes {
            for (&p, &target) in &c.power_maps {
                if target >= k {
                    return Err(TableError::PowerMapTarget {
                        class: c.name.clone(),
                        prime: p,
                    });
                }
                // ord(c^p) = ord(c)/gcd(ord(c), p) for prime p.
                let want = if c.order % p == 0 {
                    c.order / p
                } else {
                    c.order
                };
                if self.classes[target].order != want {
                    return Err(TableError::PowerMapOrder {
                        class: c.name.clone(),
                        prime: p,
                    });
                }
            }
            for (p, _) in factorize(c.order) {
                if !c.power_maps.contains_key(&p) {
                    return Err(TableError::PowerMapMissing {
                        class: c.name.clone(),
                        prime: p,
                    });
                }
            }
        }
        Ok(())
    }

    fn validate_orthogonality(&self) -> Result<(), TableError> {
        let k = self.classes.len();
        // Row orthogonality, every pair: Σ_c |c|·χ_i(c)·conj(χ_j(c)) is
        // |G| on the diagonal and 0 off it.
        for i in 0..k {
            for j in i..k {
                let mut rational = BigRational::zero();
                let mut tail = RootSum::new();
                for c in 0..k {
                    let x = &self.irreducibles[i][c];
                    let y = &self.irreducibles[j][c];
                    if x.is_zero() || y.is_zero() {
                        continue;
                    }
                    let w = big_rat(&self.classes[c].size);
                    match (x.as_rational(), y.as_rational()) {
                        (Some(a), Some(b)) => rational += a * b * w,
                        _ => {
                            let prod = x.mul(&y.conj())?;
                            tail.add_scaled(&prod, &w);
                        }
                    }
                }
                tail.add_rational(&rational);
                let expect = if i == j {
                    big_rat(&self.order)
                } else {
                    BigRational::zero()
                };
                if tail.as_rational() != Some(expect) {
                    return Err(TableError::RowOrthogonality { row_a: i, row_b: j });
                }
            }
        }
        // Column norms: Σ_χ |χ(c)|² equals the centralizer order.
        for c in 0..k {
            let mut sum = RootSum::new();
            for row in &self.irreducibles {
                let v = &row[c];
                if v.is_zero() {
                    continue;
                }
                sum.add_scaled(&v.norm_squared()?, &BigRational::one());
            }
            let centralizer = big_rat(&(&self.order / &self.classes[c].size));
            if sum.as_rational() != Some(centralizer) {
                return Err(TableError::ColumnNorm {
                    class: self.classes[c].name.clone(),
                });
            }
        }
        // Full column pairs are affordable for small tables only.
        if k <= 64 {
            for c in 0..k {
                for d in c + 1..k {
                    let mut sum = RootSum::new();
                    for row in &self.irreducibles {
                        let x = &row[c];
                        let y = &row[d];
                        if x.is_zero() || y.is_zero() {
                            continue;
                        }
                        sum.add_scaled(&x.mul(&y.conj())?, &BigRational::one());
                    }
                    if !sum.is_zero() {
                        return Err(TableError::ColumnOrthogonality {
                            class_a: self.classes[c].name.clone(),
                            class_b: self.classes[d].name.clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    pub fn conductor(&self) -> &BigUint {
        &self.conductor
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[ClassData] {
        &self.classes
    }

    pub fn class(&self, index: usize) -> Result<&ClassData, TableError> {
        self.classes.get(index).ok_or(TableError::ClassIndex(index))
    }

    pub fn class_index(&self, name: &str) -> Result<usize, TableError> {
        self.classes
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| TableError::UnknownClass(name.into()))
    }

    pub fn value(&self, row: usize, class: usize) -> &Cyclotomic {
        &self.irreducibles[row][class]
    }

    pub fn row_count(&self) -> usize {
        self.irreducibles.len()
    }

    pub fn degree(&self, row: usize) -> BigUint {
        self.irreducibles[row][0]
            .as_rational()
            .expect("degrees validated at load")
            .to_integer()
            .to_biguint()
            .expect("degrees are positive")
    }

    pub fn centralizer_order(&self, class: usize) -> Result<BigUint, TableError> {
        let c = self.class(class)?;
        Ok(&self.order / &c.size)
    }

    /// True when every character is real on the class, i.e. the class is
    /// closed under inversion.
    pub fn is_real_class(&self, class: usize) -> Result<bool, TableError> {
        self.class(class)?;
        Ok(self.irreducibles.iter().all(|row| row[class].is_real()))
    }

    /// True when every character value on the class is rational.
    pub fn is_rational_class(&self, class: usize) -> Result<bool, TableError> {
        self.class(class)?;
        Ok(self
            .irreducibles
            .iter()
            .all(|row| row[class].as_rational().is_some()))
    }

    /// Classes matching every probe (character row, exact value).
    pub fn identify_class(&self, probes: &[(usize, Cyclotomic)]) -> Vec<usize> {
        (0..self.classes.len())
            .filter(|&c| {
                probes
                    .iter()
                    .all(|(row, v)| self.irreducibles[*row][c] == *v)
            })
            .collect()
    }

    /// Number of ways a fixed element of class c factors as a·b over a in
    /// class `a` and b in class `b`:
    /// |A|·|B|/|G| · Σ_χ χ(a)χ(b)conj(χ(c))/χ(1).
    pub fn class_mult_coefficient(
        &self,
        a: usize,
        b: usize,
        c: usize,
    ) -> Result<BigUint, TableError> {
        let pair = self.cmc_pair(a, b)?;
        self.cmc_finish(&pair, a, b, c)
    }

    /// All coefficients for a fixed (a, b), one per target class. Shares
    /// the per-row pair products across the targets.
    pub fn cmc_vector(&self, a: usize, b: usize) -> Result<Vec<BigUint>, TableError> {
        let pair = self.cmc_pair(a, b)?;
        (0..self.classes.len())
            .map(|c| self.cmc_finish(&pair, a, b, c))
            .collect()
    }

    fn cmc_pair(&self, a: usize, b: usize) -> Result<Vec<Option<Cyclotomic>>, TableError> {
        self.class(a)?;
        self.class(b)?;
        let mut out = Vec::with_capacity(self.irreducibles.len());
        for (row, values) in self.irreducibles.iter().enumerate() {
            let x = &values[a];
            let y = &values[b];
            if x.is_zero() || y.is_zero() {
                out.push(None);
                continue;
            }
            let inv_deg = BigRational::new(BigInt::one(), BigInt::from(self.degree(row)));
            out.push(Some(x.mul(y)?.scale(&inv_deg)));
        }
        Ok(out)
    }

    fn cmc_finish(
        &self,
        pair: &[Option<Cyclotomic>],
        a: usize,
        b: usize,
        c: usize,
    ) -> Result<BigUint, TableError> {
        self.class(c)?;
        let invalid = |got: String| TableError::CmcInvalid {
            a: self.classes[a].name.clone(),
            b: self.classes[b].name.clone(),
            c: self.classes[c].name.clone(),
            got,
        };
        let mut rational = BigRational::zero();
        let mut tail = RootSum::new();
        for (row, p) in pair.iter().enumerate() {
            let Some(p) = p else { continue };
            let z = &self.irreducibles[row][c];
            if z.is_zero() {
                continue;
            }
            match (p.as_rational(), z.as_rational()) {
                (Some(x), Some(y)) => rational += x * y,
                _ => tail.add_scaled(&p.mul(&z.conj())?, &BigRational::one()),
            }
        }
        tail.add_rational(&rational);
        let sum = tail
            .as_rational()
            .ok_or_else(|| invalid("an irrational value".into()))?;
        let weight = big_rat(&self.classes[a].size) * big_rat(&self.classes[b].size)
            / big_rat(&self.order);
        let total = sum * weight;
        if !total.is_integer() || total.numer().is_negative() {
            return Err(invalid(total.to_string()));
        }
        Ok(total
            .to_integer()
            .to_biguint()
            .expect("non-negative checked"))
    }

    /// Class of the k-th powers of a class. Routes through the stored
    /// prime maps, searching products of stored primes that reach k in the
    /// exponent ring; fails only when no such route exists.
    pub fn power_class(&self, class: usize, k: u64) -> Result<usize, TableError> {
        let start = self.class(class)?;
        let n = start.order;
        let k = k % n;
        if k == 0 {
            return Ok(0);
        }
        if k == 1 {
            return Ok(class);
        }
        let missing = || TableError::MissingPrimeMap {
            class: start.name.clone(),
            k,
        };
        // The search space is classes × exponents mod n; cap it so a
        // malformed table with a huge declared order cannot spin forever.
        const STATE_CAP: usize = 1 << 20;
        let mut seen = HashSet::new();
        let mut queue = VecDeque::from([(class, 1u64)]);
        seen.insert((class, 1u64));
        while let Some((at, e)) = queue.pop_front() {
            for (&p, &target) in &self.classes[at].power_maps {
                let ne = ((e as u128 * (p % n) as u128) % n as u128) as u64;
                if ne == k {
                    return Ok(target);
                }
                if seen.len() < STATE_CAP && seen.insert((target, ne)) {
                    queue.push_back((target, ne));
                }
            }
        }
        Err(missing())
    }
}

/// Class data computed directly from an enumerated group: sizes, orders,
/// and power maps for every prime dividing the group order.
pub struct ComputedClasses {
    pub reps: Vec<GroupElement>,
    pub sizes: Vec<usize>,
    pub orders: Vec<u64>,
    pub power_maps: Vec<BTreeMap<u64, usize>>,
    pub class_of_position: Vec<usize>,
}

impl ComputedClasses {
    pub fn count(&self) -> usize {
        self.reps.len()
    }
}

pub fn compute_classes(
    group: &mut GeneratedGroup,
    cap: usize,
) -> Result<ComputedClasses, TableError> {
    group.enumerate(cap)?;
    let gens = group.generators().to_vec();
    let cache = group.cached().expect("just enumerated");
    let cc = blackbox::conjugacy_classes(cache, &gens)?;
    let order = cache.len() as u64;
    let primes: Vec<u64> = factorize(order).into_iter().map(|(p, _)| p).collect();
    let mut reps = Vec::with_capacity(cc.count());
    let mut power_maps = Vec::with_capacity(cc.count());
    for &rep_pos in &cc.reps {
        let rep = cache.elements()[rep_pos].clone();
        let mut maps = BTreeMap::new();
        for &p in &primes {
            let powered = rep.pow(p as i64)?;
            let pos = cache
                .position(&powered)
                .expect("power of a member stays in the group");
            maps.insert(p, cc.class_of[pos]);
        }
        reps.push(rep);
        power_maps.push(maps);
    }
    Ok(ComputedClasses {
        reps,
        sizes: cc.sizes,
        orders: cc.orders,
        power_maps,
        class_of_position: cc.class_of,
    })
}

/// Match table classes to computed classes by order, size and power-map
/// structure. Returns `assignment[table_index] = computed_index`. When the
/// table has symmetries several assignments may fit; any one is returned,
/// and every counting formula downstream is invariant under that choice.
pub fn align_classes(
    table: &CharacterTable,
    computed: &ComputedClasses,
) -> Result<Vec<usize>, TableError> {
    let k = table.class_count();
    if computed.count() != k {
        return Err(TableError::NoAlignment);
    }
    let candidates: Vec<Vec<usize>> = table
        .classes()
        .iter()
        .map(|tc| {
            (0..k)
                .filter(|&ci| {
                    computed.orders[ci] == tc.order
                        && BigUint::from(computed.sizes[ci]) == tc.size
                })
                .collect()
        })
        .collect();
    // Assign the most constrained classes first.
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&i| candidates[i].len());

    fn consistent(
        table: &CharacterTable,
        computed: &ComputedClasses,
        assignment: &[Option<usize>],
        t: usize,
        c: usize,
    ) -> bool {
        // Forward maps of t must land on the assigned image of the target.
        for (&p, &tt) in &table.classes()[t].power_maps {
            if let Some(ct) = assignment[tt] {
                match computed.power_maps[c].get(&p) {
                    Some(&actual) if actual == ct => {}
                    Some(_) => return false,
                    None => {}
                }
            }
        }
        // Maps of already-assigned classes into t must agree as well.
        for (s, slot) in assignment.iter().enumerate() {
            let Some(cs) = slot else { continue };
            for (&p, &tt) in &table.classes()[s].power_maps {
                if tt == t {
                    if let Some(&actual) = computed.power_maps[*cs].get(&p) {
                        if actual != c {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn search(
        table: &CharacterTable,
        computed: &ComputedClasses,
        order: &[usize],
        depth: usize,
        candidates: &[Vec<usize>],
        assignment: &mut [Option<usize>],
        used: &mut [bool],
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let t = order[depth];
        for &c in &candidates[t] {
            if used[c] || !consistent(table, computed, assignment, t, c) {
                continue;
            }
            assignment[t] = Some(c);
            used[c] = true;
            if search(table, computed, order, depth + 1, candidates, assignment, used) {
                return true;
            }
            assignment[t] = None;
            used[c] = false;
        }
        false
    }

    let mut assignment: Vec<Option<usize>> = vec![None; k];
    let mut used = vec![false; k];
    if !search(
        table,
        computed,
        &order,
        0,
        &candidates,
        &mut assignment,
        &mut used,
    ) {
        return Err(TableError::NoAlignment);
    }
    Ok(assignment
        .into_iter()
        .map(|a| a.expect("search filled every slot"))
        .collect())
}
