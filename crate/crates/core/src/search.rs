//! Targeted subgroup search: inverter censuses, cheap screening, exact
//! certification, conjugacy deduplication, and the pipeline stringing them
//! together.
//!
//! The pipeline fixes a seed tuple inside an ambient group, censuses the
//! involutions inverting the last seed element, extends the seed tuple by
//! each inverter, screens the candidate subgroups cheaply, certifies the
//! survivors exactly, and partitions the witnesses into ambient conjugacy
//! classes. Witnesses are stored as straight-line programs over the ambient
//! generators, so a witness file plus the ambient group file is enough to
//! re-run every certificate.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::time::{Duration, Instant};

use num::bigint::BigUint;
use num::ToPrimitive;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blackbox::{
    centralizer_bruteforce, element_order, element_order_with_cap, BlackboxError, ElementCache,
    GeneratedGroup, GroupElement,
};
use crate::chartab::{align_classes, compute_classes, CharacterTable, ComputedClasses, TableError};
use crate::files::{self, FilesError};
use crate::slp::{Slp, SlpError};

/// Random-element budget for an inverter census when the caller sets none.
pub const DEFAULT_DRAW_BUDGET: u64 = 10_000_000;
/// Random-order samples drawn by `quick_reject` when the caller sets none.
pub const DEFAULT_SCREEN_SAMPLES: usize = 100;
/// Ambient enumeration cap when the caller sets none.
pub const DEFAULT_ENUMERATION_CAP: usize = 1 << 20;
/// Tuple draws for a presentation-generator search when the caller sets none.
pub const DEFAULT_PRESENTATION_TRIES: u64 = 20_000;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(transparent)]
    Blackbox(#[from] BlackboxError),
    #[error(transparent)]
    Slp(#[from] SlpError),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Files(#[from] FilesError),
    #[error("config: {0}")]
    Config(String),
    #[error("unknown profile `{0}`")]
    UnknownProfile(String),
    #[error("profile `{name}`: {msg}")]
    BadProfile { name: String, msg: String },
    #[error("class `{0}` is not real: inverter counting needs elements conjugate to their inverses")]
    NonRealTarget(String),
    #[error("relator `{relator}` does not evaluate to the identity")]
    RelatorFails { relator: String },
    #[error("relators hold but the image is proper: order {got} < {want}")]
    DegenerateImage { got: u64, want: u64 },
    #[error("enumerated order {got}, profile expects {want}")]
    OrderMismatch { got: u64, want: u64 },
    #[error("order spectrum {got:?} differs from profile spectrum {want:?}")]
    SpectrumMismatch { got: Vec<u64>, want: Vec<u64> },
    #[error("profile `{0}` is not order-spectrum characterised; a matching spectrum would not identify the group")]
    NotCharacterised(String),
    #[error("no presentation generator tuple found in {tries} tries")]
    PresentationSearchExhausted { tries: u64 },
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<SearchError>,
    },
}

fn stage<T>(name: &'static str, r: Result<T, SearchError>) -> Result<T, SearchError> {
    r.map_err(|e| SearchError::Stage {
        stage: name,
        source: Box::new(e),
    })
}

// ---------------------------------------------------------------------------
// Target profiles

/// A named relator: a word over the profile generators that must evaluate
/// to the identity. Words are (generator index, exponent) pairs multiplied
/// left to right.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relator {
    pub name: String,
    pub word: Vec<(usize, i64)>,
}

/// A cheap fingerprint over a fixed candidate-generator layout: the sorted
/// orders of designated words must match `expected` exactly. Only applied
/// when the candidate tuple has exactly `arity` generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeSpec {
    pub arity: usize,
    pub words: Vec<Vec<(usize, i64)>>,
    /// Sorted multiset of the expected word orders.
    pub expected: Vec<u64>,
    pub order_cap: u64,
}

/// Everything the search needs to know about the group it is looking for.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TargetProfile {
    pub name: String,
    pub order: u64,
    /// Orders of elements present in the target.
    pub spectrum: BTreeSet<u64>,
    /// Whether (order, spectrum) pins the group down up to isomorphism.
    /// Only then is `certify_by_order_spectrum` a certificate.
    pub spectrum_characterised: bool,
    /// Generator count of the presentation.
    pub arity: usize,
    /// Relators presenting the target itself.
    pub relators: Vec<Relator>,
    /// Largest order of a proper quotient of the target. An image element
    /// whose order exceeds this bound certifies the image is not proper.
    pub proper_quotient_max: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeSpec>,
}

impl TargetProfile {
    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |msg: String| SearchError::BadProfile {
            name: self.name.clone(),
            msg,
        };
        if self.name.is_empty() {
            return Err(bad("name is empty".into()));
        }
        if self.order < 2 {
            return Err(bad(format!("order {} is not a group order above 1", self.order)));
        }
        if !self.spectrum.contains(&1) {
            return Err(bad("spectrum must contain 1".into()));
        }
        if self.spectrum.iter().any(|&o| o == 0 || o > self.order) {
            return Err(bad("spectrum entry outside 1..=order".into()));
        }
        if self.arity == 0 {
            return Err(bad("arity must be positive".into()));
        }
        if self.relators.is_empty() {
            return Err(bad("relator list is empty".into()));
        }
        for r in &self.relators {
            if r.word.iter().any(|&(g, _)| g >= self.arity) {
                return Err(bad(format!(
                    "relator `{}` references a generator outside arity {}",
                    r.name, self.arity
                )));
            }
        }
        if self.proper_quotient_max >= self.order {
            return Err(bad("proper quotient bound must be below the order".into()));
        }
        if let Some(p) = &self.probe {
            if p.words.len() != p.expected.len() {
                return Err(bad("probe word and expectation counts differ".into()));
            }
            if !p.expected.windows(2).all(|w| w[0] <= w[1]) {
                return Err(bad("probe expectation must be sorted".into()));
            }
        }
        Ok(())
    }
}

fn rel(name: &str, word: &[(usize, i64)]) -> Relator {
    Relator {
        name: name.into(),
        word: word.to_vec(),
    }
}

fn word_pow(base: &[(usize, i64)], e: usize) -> Vec<(usize, i64)> {
    let mut out = Vec::with_capacity(base.len() * e);
    for _ in 0..e {
        out.extend_from_slice(base);
    }
    out
}

pub fn builtin_profile_names() -> &'static [&'static str] {
    &["a5", "psl2_8", "psl2_13", "psl2_16", "psu3_4", "pgl2_13", "a12"]
}

/// The shipped profiles. Two-generator presentations follow the generator
/// layout of the matching fixture files; the three-generator ones use a
/// translation t, a field-multiplication m and an inversion w.
pub fn builtin_profile(name: &str) -> Result<TargetProfile, SearchError> {
    let comm = |a: usize, b: usize| vec![(a, -1i64), (b, -1), (a, 1), (b, 1)];
    let profile = match name {
        "a5" => TargetProfile {
            name: "a5".into(),
            order: 60,
            spectrum: [1, 2, 3, 5].into(),
            spectrum_characterised: true,
            arity: 2,
            relators: vec![
                rel("a^2", &[(0, 2)]),
                rel("b^3", &[(1, 3)]),
                rel("(ab)^5", &word_pow(&[(0, 1), (1, 1)], 5)),
            ],
            proper_quotient_max: 1,
            probe: None,
        },
        "psl2_13" => {
            // The probe is defined over the pipeline's candidate layout
            // (g13, g6, j): the six non-central involutions of the dihedral
            // group <g6, j>, each multiplied by g13.
            let mut words = Vec::new();
            for i in 0..6i64 {
                let mut w: Vec<(usize, i64)> = Vec::new();
                if i > 0 {
                    w.push((1, i));
                }
                w.push((2, 1));
                w.push((0, 1));
                words.push(w);
            }
            TargetProfile {
                name: "psl2_13".into(),
                order: 1092,
                spectrum: [1, 2, 3, 6, 7, 13].into(),
                spectrum_characterised: true,
                arity: 2,
                relators: vec![
                    rel("x^2", &[(0, 2)]),
                    rel("y^3", &[(1, 3)]),
                    rel("(xy)^7", &word_pow(&[(0, 1), (1, 1)], 7)),
                    rel("[x,y]^6", &word_pow(&comm(0, 1), 6)),
                ],
                proper_quotient_max: 1,
                probe: Some(ProbeSpec {
                    arity: 3,
                    words,
                    expected: vec![3, 6, 7, 7, 7, 13],
                    order_cap: 1 << 20,
                }),
            }
        }
        "pgl2_13" => TargetProfile {
            name: "pgl2_13".into(),
            order: 2184,
            spectrum: [1, 2, 3, 4, 6, 7, 12, 13, 14].into(),
            spectrum_characterised: false,
            arity: 2,
            relators: vec![
                rel("u^2", &[(0, 2)]),
                rel("v^13", &[(1, 13)]),
                rel("(uv^2)^4", &word_pow(&[(0, 1), (1, 2)], 4)),
                rel("(uvuv^4)^2", &word_pow(&[(0, 1), (1, 1), (0, 1), (1, 4)], 2)),
            ],
            proper_quotient_max: 2,
            probe: None,
        },
        "psl2_8" => TargetProfile {
            name: "psl2_8".into(),
            order: 504,
            spectrum: [1, 2, 3, 7, 9].into(),
            spectrum_characterised: true,
            arity: 3,
            relators: borel_relators_8(),
            proper_quotient_max: 1,
            probe: None,
        },
        "psl2_16" => TargetProfile {
            name: "psl2_16".into(),
            order: 4080,
            spectrum: [1, 2, 3, 5, 15, 17].into(),
            spectrum_characterised: true,
            arity: 3,
            relators: borel_relators_16(),
            proper_quotient_max: 1,
            probe: None,
        },
        "psu3_4" => {
            let uv = [(0usize, 1i64), (1, 1)];
            let mut r5 = word_pow(&uv, 3);
            r5.extend(word_pow(&[(0, 1), (1, -1)], 3));
            let r5 = word_pow(&r5, 3);
            let mut r6 = vec![(0, 1), (1, -1)];
            r6.extend(word_pow(&uv, 5));
            let r6 = word_pow(&r6, 4);
            TargetProfile {
                name: "psu3_4".into(),
                order: 62400,
                spectrum: [1, 2, 3, 4, 5, 10, 13, 15].into(),
                spectrum_characterised: true,
                arity: 2,
                relators: vec![
                    rel("j^2", &[(0, 2)]),
                    rel("g^3", &[(1, 3)]),
                    rel("(jg^-1jg)^5", &word_pow(&[(0, 1), (1, -1), (0, 1), (1, 1)], 5)),
                    rel("(jg)^15", &word_pow(&uv, 15)),
                    rel("((jg)^3(jg^-1)^3)^3", &r5),
                    rel("(jg^-1(jg)^5)^4", &r6),
                ],
                proper_quotient_max: 1,
                probe: None,
            }
        }
        "a12" => TargetProfile {
            name: "a12".into(),
            order: 239_500_800,
            spectrum: [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 14, 15, 20, 21, 30, 35].into(),
            spectrum_characterised: false,
            arity: 2,
            relators: vec![
                rel("x^3", &[(0, 3)]),
                rel("y^10", &[(1, 10)]),
                rel("(xy)^11", &word_pow(&[(0, 1), (1, 1)], 11)),
                rel("[x,y]^2", &word_pow(&comm(0, 1), 2)),
                rel("(xy^-2xy^2)^2", &word_pow(&[(0, 1), (1, -2), (0, 1), (1, 2)], 2)),
                rel("[x,y^3]^2", &word_pow(&[(0, -1), (1, -3), (0, 1), (1, 3)], 2)),
                rel("(xy^-4xy^4)^2", &word_pow(&[(0, 1), (1, -4), (0, 1), (1, 4)], 2)),
                rel("[x,y^5]^2", &word_pow(&[(0, -1), (1, -5), (0, 1), (1, 5)], 2)),
            ],
            proper_quotient_max: 1,
            probe: None,
        },
        other => return Err(SearchError::UnknownProfile(other.into())),
    };
    profile.validate()?;
    Ok(profile)
}

fn borel_common(q_minus_1: i64, commutator_count: i64) -> Vec<Relator> {
    let mut rels = vec![
        rel("t^2", &[(0, 2)]),
        rel(&format!("m^{q_minus_1}"), &[(1, q_minus_1)]),
        rel("w^2", &[(2, 2)]),
        rel("(mw)^2", &[(1, 1), (2, 1), (1, 1), (2, 1)]),
        rel("(tw)^3", &[(0, 1), (2, 1), (0, 1), (2, 1), (0, 1), (2, 1)]),
    ];
    for i in 1..=commutator_count {
        rels.push(rel(
            &format!("[t,t^(m^{i})]"),
            &[(0, -1), (1, -i), (0, -1), (1, i), (0, 1), (1, -i), (0, 1), (1, i)],
        ));
    }
    rels
}

fn add_rel(i: i64, mid: i64, last: i64) -> Relator {
    rel(
        &format!("add({i})"),
        &[(0, 1), (1, -i), (0, 1), (1, mid), (0, 1), (1, last)],
    )
}

// The additive relators encode the Zech logarithm table of the field:
// add(i) says 1 + g^i = g^z(i) inside the translation subgroup.
fn borel_relators_8() -> Vec<Relator> {
    let mut rels = borel_common(7, 3);
    for (i, mid, last) in [
        (1, -2, 3),
        (2, -4, 6),
        (3, 2, 1),
        (4, -1, 5),
        (5, 1, 4),
        (6, 4, 2),
    ] {
        rels.push(add_rel(i, mid, last));
    }
    rels
}

fn borel_relators_16() -> Vec<Relator> {
    let mut rels = borel_common(15, 4);
    for (i, mid, last) in [
        (1, -3, 4),
        (2, -6, 8),
        (3, -11, 14),
        (4, 3, 1),
        (5, -5, 10),
        (6, -7, 13),
        (7, -2, 9),
        (8, 6, 2),
        (9, 2, 7),
        (10, 5, 5),
        (11, -1, 12),
        (12, 1, 11),
        (13, 7, 6),
        (14, 11, 3),
    ] {
        rels.push(add_rel(i, mid, last));
    }
    rels
}

// ---------------------------------------------------------------------------
// Inverter censuses and expected counts

/// Result of an inverter census. `involutions` is sorted canonically so the
/// same census always lists its findings in the same order.
#[derive(Clone, Debug)]
pub struct InverterCensus {
    pub involutions: Vec<GroupElement>,
    pub draws: u64,
    pub expected: Option<usize>,
    /// The expected count was reached.
    pub complete: bool,
    pub budget_exhausted: bool,
    pub warning: Option<String>,
}

/// Collect involutions j of the ambient sampler with g^j = g^-1 and
/// `filter(j)`, by random draws. Every even-order draw contributes the
/// involution in its cyclic subgroup. Stops at `expected` matches or after
/// `budget` draws; falling short of an expected count is reported as a
/// partial-result warning, not an error.
pub fn find_inverting_involutions<F>(
    ambient: &mut GeneratedGroup,
    g: &GroupElement,
    expected: Option<usize>,
    mut filter: F,
    budget: u64,
) -> Result<InverterCensus, SearchError>
where
    F: FnMut(&GroupElement) -> bool,
{
    if g.is_identity() {
        return Err(SearchError::Config(
            "the inverted element must not be the identity".into(),
        ));
    }
    let g_inv = g.inverse()?;
    let mut found: BTreeSet<GroupElement> = BTreeSet::new();
    let reached = |found: &BTreeSet<GroupElement>| expected.is_some_and(|e| found.len() >= e);
    let mut draws = 0;
    while draws < budget && !reached(&found) {
        let z = ambient.random_element()?;
        draws += 1;
        let o = element_order(&z)?;
        if o % 2 != 0 {
            continue;
        }
        let j = if o == 2 { z } else { z.pow((o / 2) as i64)? };
        if found.contains(&j) || g.conj(&j)? != g_inv || !filter(&j) {
            continue;
        }
        found.insert(j);
    }
    let complete = reached(&found);
    let budget_exhausted = !complete && draws >= budget;
    let warning = match expected {
        Some(e) if !complete => Some(format!(
            "partial census: {} of {} expected inverting involutions after {} draws",
            found.len(),
            e,
            draws
        )),
        _ => None,
    };
    Ok(InverterCensus {
        involutions: found.into_iter().collect(),
        draws,
        expected,
        complete,
        budget_exhausted,
        warning,
    })
}

/// The same census by a full scan of an enumerated ambient group. Oracle
/// counterpart of `find_inverting_involutions`.
pub fn inverting_involutions_exhaustive<F>(
    cache: &ElementCache,
    g: &GroupElement,
    mut filter: F,
) -> Result<Vec<GroupElement>, SearchError>
where
    F: FnMut(&GroupElement) -> bool,
{
    if g.is_identity() {
        return Err(SearchError::Config(
            "the inverted element must not be the identity".into(),
        ));
    }
    let g_inv = g.inverse()?;
    let mut found = BTreeSet::new();
    for x in cache.elements() {
        if x.is_identity() || !x.mul(x)?.is_identity() {
            continue;
        }
        if g.conj(x)? == g_inv && filter(x) {
            found.insert(x.clone());
        }
    }
    Ok(found.into_iter().collect())
}

/// Number of involutions j in `invol_class` with g^j = g^-1 and j·g again
/// in `invol_class`, for g in `target_class`: the class multiplication
/// coefficient of (invol, invol, target). The pairing j <-> (j, j·g) is a
/// bijection because j·g is an involution exactly when j inverts g.
pub fn expected_inverter_count(
    table: &CharacterTable,
    invol_class: usize,
    target_class: usize,
) -> Result<BigUint, SearchError> {
    let ic = table.class(invol_class)?;
    if ic.order != 2 {
        return Err(SearchError::Config(format!(
            "class `{}` has element order {}, expected an involution class",
            ic.name, ic.order
        )));
    }
    ensure_real_target(table, target_class)?;
    Ok(table.class_mult_coefficient(invol_class, invol_class, target_class)?)
}

/// Total number of involutions inverting an element of `target_class`:
/// the sum of CMC(c1, c2, target) over all ordered pairs of involution
/// classes, since j·g may land in a different class than j. An involution
/// target g is additionally inverted by g itself, a pairing the class
/// sums miss because its complementary factor j·g is the identity.
pub fn expected_total_inverter_count(
    table: &CharacterTable,
    target_class: usize,
) -> Result<BigUint, SearchError> {
    ensure_real_target(table, target_class)?;
    let invols: Vec<usize> = (0..table.class_count())
        .filter(|&i| table.classes()[i].order == 2)
        .collect();
    let mut total = BigUint::from(0u32);
    for &c1 in &invols {
        for &c2 in &invols {
            total += table.class_mult_coefficient(c1, c2, target_class)?;
        }
    }
    if table.classes()[target_class].order == 2 {
        total += BigUint::from(1u32);
    }
    Ok(total)
}

fn ensure_real_target(table: &CharacterTable, target_class: usize) -> Result<(), SearchError> {
    if !table.is_real_class(target_class)? {
        return Err(SearchError::NonRealTarget(
            table.class(target_class)?.name.clone(),
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Screening

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Screen {
    Pass,
    Reject { reason: String },
}

/// Cheap necessary checks: generator orders, the profile probe (when the
/// candidate layout matches its arity), and sampled element orders must all
/// stay inside the target spectrum. A pass is evidence, not a certificate;
/// a reject is definitive because every check is a consequence of S being
/// isomorphic to the target.
pub fn quick_reject(
    candidate: &mut GeneratedGroup,
    profile: &TargetProfile,
    samples: usize,
) -> Result<Screen, SearchError> {
    let max_order = *profile
        .spectrum
        .iter()
        .max()
        .expect("validated profiles have a nonempty spectrum");
    let gens = candidate.generators().to_vec();
    for (i, g) in gens.iter().enumerate() {
        if let Some(reason) = order_outside_spectrum(g, profile, max_order, &format!("generator {i}"))? {
            return Ok(Screen::Reject { reason });
        }
    }
    if let Some(probe) = &profile.probe {
        if probe.arity == gens.len() {
            let mut got = Vec::with_capacity(probe.words.len());
            for w in &probe.words {
                let el = Slp::from_word(probe.arity, w)?.evaluate(&gens)?;
                match element_order_with_cap(&el, probe.order_cap) {
                    Ok(o) => got.push(o),
                    Err(BlackboxError::OrderOverflow { cap }) => {
                        return Ok(Screen::Reject {
                            reason: format!("probe word order exceeds cap {cap}"),
                        })
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            got.sort_unstable();
            if got != probe.expected {
                return Ok(Screen::Reject {
                    reason: format!(
                        "probe orders {:?} differ from expected {:?}",
                        got, probe.expected
                    ),
                });
            }
        }
    }
    for _ in 0..samples {
        let z = candidate.random_element()?;
        if let Some(reason) = order_outside_spectrum(&z, profile, max_order, "sampled element")? {
            return Ok(Screen::Reject { reason });
        }
    }
    Ok(Screen::Pass)
}

fn order_outside_spectrum(
    g: &GroupElement,
    profile: &TargetProfile,
    max_order: u64,
    what: &str,
) -> Result<Option<String>, SearchError> {
    match element_order_with_cap(g, max_order) {
        Ok(o) if profile.spectrum.contains(&o) => Ok(None),
        Ok(o) => Ok(Some(format!(
            "{what} has order {o}, outside the target spectrum"
        ))),
        Err(BlackboxError::OrderOverflow { .. }) => Ok(Some(format!(
            "{what} has order above the spectrum maximum {max_order}"
        ))),
        Err(e) => Err(e.into()),
    }
}

// ---------------------------------------------------------------------------
// Certification

/// How an epimorphic image was upgraded to an isomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NonDegeneracy {
    /// The image was enumerated and has the full target order.
    EnumeratedOrder { order: u64 },
    /// Some image element's order exceeds the largest proper quotient of
    /// the target, so the image cannot be a proper quotient.
    ElementOrder {
        word: String,
        order: u64,
        quotient_bound: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationCertificate {
    pub profile: String,
    pub relators_checked: Vec<String>,
    pub nondegeneracy: NonDegeneracy,
    /// Programs over the ambient generators producing the presentation
    /// generators, when the certificate was issued inside a larger group.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator_slps: Option<Vec<String>>,
}

/// Check every relator on `gens` and upgrade the resulting epimorphism to
/// an isomorphism. The relators holding makes ⟨gens⟩ an epimorphic image of
/// the presented group; an element order too large for any proper quotient,
/// or a full enumeration, rules the proper images out.
pub fn certify_presentation(
    gens: &[GroupElement],
    profile: &TargetProfile,
) -> Result<PresentationCertificate, SearchError> {
    if gens.len() != profile.arity {
        return Err(SearchError::Config(format!(
            "profile `{}` expects {} generators, got {}",
            profile.name,
            profile.arity,
            gens.len()
        )));
    }
    let mut relators_checked = Vec::with_capacity(profile.relators.len());
    for r in &profile.relators {
        let el = Slp::from_word(profile.arity, &r.word)?.evaluate(gens)?;
        if !el.is_identity() {
            return Err(SearchError::RelatorFails {
                relator: r.name.clone(),
            });
        }
        relators_checked.push(r.name.clone());
    }
    let nondegeneracy = match nondegeneracy_witness(gens, profile)? {
        Some((word, order)) => NonDegeneracy::ElementOrder {
            word,
            order,
            quotient_bound: profile.proper_quotient_max,
        },
        None => {
            let mut grp = GeneratedGroup::new(gens.to_vec())?;
            let n = grp.enumerate(profile.order as usize)?.len() as u64;
            if n != profile.order {
                return Err(SearchError::DegenerateImage {
                    got: n,
                    want: profile.order,
                });
            }
            NonDegeneracy::EnumeratedOrder { order: n }
        }
    };
    Ok(PresentationCertificate {
        profile: profile.name.clone(),
        relators_checked,
        nondegeneracy,
        generator_slps: None,
    })
}

/// First generator or generator product whose order rules out every proper
/// quotient, with that order.
fn nondegeneracy_witness(
    gens: &[GroupElement],
    profile: &TargetProfile,
) -> Result<Option<(String, u64)>, SearchError> {
    let bound = profile.proper_quotient_max;
    for (i, g) in gens.iter().enumerate() {
        let o = element_order_with_cap(g, profile.order)?;
        if o > bound {
            return Ok(Some((format!("g{i}"), o)));
        }
    }
    for (i, a) in gens.iter().enumerate() {
        for (j, b) in gens.iter().enumerate() {
            let o = element_order_with_cap(&a.mul(b)?, profile.order)?;
            if o > bound {
                return Ok(Some((format!("g{i}*g{j}"), o)));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumCertificate {
    pub profile: String,
    pub order: u64,
    pub spectrum: Vec<u64>,
}

/// Certify by enumerated order plus order spectrum. Only sound for profiles
/// flagged spectrum-characterised, where that pair determines the group up
/// to isomorphism; refuses to run otherwise.
pub fn certify_by_order_spectrum(
    group: &mut GeneratedGroup,
    profile: &TargetProfile,
) -> Result<SpectrumCertificate, SearchError> {
    if !profile.spectrum_characterised {
        return Err(SearchError::NotCharacterised(profile.name.clone()));
    }
    let spectrum = group.order_spectrum(profile.order as usize)?;
    let order = group
        .cached()
        .expect("order_spectrum enumerates")
        .len() as u64;
    if order != profile.order {
        return Err(SearchError::OrderMismatch {
            got: order,
            want: profile.order,
        });
    }
    let got = spectrum.orders();
    if got != profile.spectrum {
        return Err(SearchError::SpectrumMismatch {
            got: got.into_iter().collect(),
            want: profile.spectrum.iter().copied().collect(),
        });
    }
    Ok(SpectrumCertificate {
        profile: profile.name.clone(),
        order,
        spectrum: got.into_iter().collect(),
    })
}

// ---------------------------------------------------------------------------
// Words over an enumerated group

/// Breadth-first spanning tree of an enumerated group's Cayley graph,
/// giving every element a word (and so a straight-line program) in the
/// generators.
pub struct CayleyWords {
    arity: usize,
    /// parent[pos] = (previous position, generator index); None at the
    /// identity.
    parent: Vec<Option<(usize, usize)>>,
}

impl CayleyWords {
    pub fn build(gens: &[GroupElement], cache: &ElementCache) -> Result<Self, SearchError> {
        if gens.is_empty() {
            return Err(SearchError::Config("no generators for the word map".into()));
        }
        let identity_pos = cache
            .position(&gens[0].identity_like())
            .ok_or_else(|| SearchError::Config("cache lacks the identity".into()))?;
        let mut parent = vec![None; cache.len()];
        let mut visited = vec![false; cache.len()];
        visited[identity_pos] = true;
        let mut queue = VecDeque::from([identity_pos]);
        while let Some(p) = queue.pop_front() {
            for (gi, g) in gens.iter().enumerate() {
                let y = cache.elements()[p].mul(g)?;
                let q = cache.position(&y).ok_or_else(|| {
                    SearchError::Config("cache is not closed under the generators".into())
                })?;
                if !visited[q] {
                    visited[q] = true;
                    parent[q] = Some((p, gi));
                    queue.push_back(q);
                }
            }
        }
        if visited.iter().any(|v| !v) {
            return Err(SearchError::Config(
                "the given tuple does not generate the cached group".into(),
            ));
        }
        Ok(CayleyWords {
            arity: gens.len(),
            parent,
        })
    }

    /// Generator-index word for the element at `pos`; empty at the identity.
    pub fn word_for(&self, pos: usize) -> Vec<usize> {
        let mut word = Vec::new();
        let mut at = pos;
        while let Some((prev, gi)) = self.parent[at] {
            word.push(gi);
            at = prev;
        }
        word.reverse();
        word
    }

    pub fn slp_for(&self, pos: usize) -> Result<Slp, SearchError> {
        let word: Vec<(usize, i64)> = self.word_for(pos).into_iter().map(|g| (g, 1)).collect();
        Ok(Slp::from_word(self.arity, &word)?)
    }
}

// ---------------------------------------------------------------------------
// Witnesses

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessCertificates {
    pub order: u64,
    pub spectrum: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub presentation: Option<PresentationCertificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum_certificate: Option<SpectrumCertificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centralizer_size: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fusion_notes: Vec<String>,
}

/// A found subgroup: programs over the ambient generators producing its
/// generators, plus the certificates established for it. The programs are
/// the durable part; everything else can be recomputed from them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupWitness {
    pub profile: String,
    #[serde(rename = "slps")]
    pub slp_texts: Vec<String>,
    pub certificates: WitnessCertificates,
}

/// Re-run a witness's certificates from its programs alone. Fusion notes
/// are annotations and are carried over; everything else is recomputed.
/// The ambient cache is needed only to recompute a stored centralizer size.
pub fn recertify_witness(
    ambient_gens: &[GroupElement],
    witness: &SubgroupWitness,
    profile: &TargetProfile,
    ambient_cache: Option<&ElementCache>,
) -> Result<WitnessCertificates, SearchError> {
    let arity = ambient_gens.len();
    let gens: Vec<GroupElement> = witness
        .slp_texts
        .iter()
        .map(|t| Slp::parse(t, arity)?.evaluate(ambient_gens).map_err(SearchError::from))
        .collect::<Result<_, _>>()?;
    let mut grp = GeneratedGroup::new(gens.clone())?;
    let spectrum = grp.order_spectrum(witness.certificates.order as usize)?;
    let order = grp.cached().expect("just enumerated").len() as u64;
    let presentation = match &witness.certificates.presentation {
        Some(stored) => {
            let pgens: Vec<GroupElement> = match &stored.generator_slps {
                Some(texts) => texts
                    .iter()
                    .map(|t| {
                        Slp::parse(t, arity)?
                            .evaluate(ambient_gens)
                            .map_err(SearchError::from)
                    })
                    .collect::<Result<_, _>>()?,
                None => gens.clone(),
            };
            let mut fresh = certify_presentation(&pgens, profile)?;
            fresh.generator_slps = stored.generator_slps.clone();
            Some(fresh)
        }
        None => None,
    };
    let spectrum_certificate = match &witness.certificates.spectrum_certificate {
        Some(_) => Some(certify_by_order_spectrum(&mut grp, profile)?),
        None => None,
    };
    let centralizer_size = match (witness.certificates.centralizer_size, ambient_cache) {
        (Some(_), Some(cache)) => Some(centralizer_bruteforce(cache.elements(), &gens)?.len() as u64),
        (stored, _) => stored,
    };
    Ok(WitnessCertificates {
        order,
        spectrum: spectrum.orders().into_iter().collect(),
        presentation,
        spectrum_certificate,
        centralizer_size,
        fusion_notes: witness.certificates.fusion_notes.clone(),
    })
}

// ---------------------------------------------------------------------------
// Deduplication

/// One ambient-conjugacy class of witnesses (brute-force mode), or one
/// witness labeled by its invariants (invariant mode).
#[derive(Clone, Debug, Serialize)]
pub struct WitnessClass {
    pub members: Vec<usize>,
    /// Per member, a program over the ambient generators whose value
    /// conjugates the first member's subgroup onto that member's subgroup.
    /// Brute-force mode only.
    pub conjugator_slps: Vec<Option<String>>,
    pub merged_with_witness: bool,
    pub invariant: String,
}

pub enum DedupContext<'a> {
    /// Exact conjugacy over an enumerated ambient group, with explicit
    /// conjugating witnesses.
    Enumerated {
        cache: &'a ElementCache,
        words: &'a CayleyWords,
    },
    /// No enumeration: witnesses with different invariants are distinct;
    /// equal invariants are never merged without a witness, so every
    /// witness stays its own class, labeled for comparison.
    ByInvariant,
}

fn invariant_label(c: &WitnessCertificates) -> String {
    format!(
        "order={} spectrum={:?} centralizer={}",
        c.order,
        c.spectrum,
        c.centralizer_size
            .map_or_else(|| "?".into(), |n| n.to_string())
    )
}

/// Partition witnesses into ambient conjugacy classes. In brute-force mode
/// two witnesses merge exactly when some enumerated ambient element
/// conjugates one subgroup onto the other, and that element is returned as
/// a program.
pub fn dedup_subgroups(
    ambient_gens: &[GroupElement],
    witnesses: &[SubgroupWitness],
    ctx: DedupContext,
) -> Result<Vec<WitnessClass>, SearchError> {
    match ctx {
        DedupContext::ByInvariant => Ok(witnesses
            .iter()
            .enumerate()
            .map(|(i, w)| WitnessClass {
                members: vec![i],
                conjugator_slps: vec![None],
                merged_with_witness: false,
                invariant: invariant_label(&w.certificates),
            })
            .collect()),
        DedupContext::Enumerated { cache, words } => {
            let arity = ambient_gens.len();
            // Subgroups as position sets in the ambient cache.
            let mut gens_of = Vec::with_capacity(witnesses.len());
            let mut set_of: Vec<BTreeSet<usize>> = Vec::with_capacity(witnesses.len());
            for w in witnesses {
                let gens: Vec<GroupElement> = w
                    .slp_texts
                    .iter()
                    .map(|t| {
                        Slp::parse(t, arity)?
                            .evaluate(ambient_gens)
                            .map_err(SearchError::from)
                    })
                    .collect::<Result<_, _>>()?;
                let mut grp = GeneratedGroup::new(gens.clone())?;
                let sub = grp.enumerate(w.certificates.order as usize)?;
                let positions = sub
                    .elements()
                    .iter()
                    .map(|el| {
                        cache.position(el).ok_or_else(|| {
                            SearchError::Config(
                                "witness subgroup leaves the enumerated ambient group".into(),
                            )
                        })
                    })
                    .collect::<Result<BTreeSet<usize>, _>>()?;
                gens_of.push(gens);
                set_of.push(positions);
            }
            let identity_slp = Slp::from_word(arity, &[])?;
            let mut classes: Vec<WitnessClass> = Vec::new();
            let mut rep_of_class: Vec<usize> = Vec::new();
            'witness: for i in 0..witnesses.len() {
                for (k, class) in classes.iter_mut().enumerate() {
                    let r = rep_of_class[k];
                    if set_of[r].len() != set_of[i].len() {
                        continue;
                    }
                    if set_of[r] == set_of[i] {
                        class.members.push(i);
                        class.conjugator_slps.push(Some(identity_slp.to_text()));
                        continue 'witness;
                    }
                    if let Some(xpos) = conjugating_position(cache, &gens_of[r], &set_of[i])? {
                        class.members.push(i);
                        class
                            .conjugator_slps
                            .push(Some(words.slp_for(xpos)?.to_text()));
                        continue 'witness;
                    }
                }
                classes.push(WitnessClass {
                    members: vec![i],
                    conjugator_slps: vec![Some(identity_slp.to_text())],
                    merged_with_witness: true,
                    invariant: invariant_label(&witnesses[i].certificates),
                });
                rep_of_class.push(i);
            }
            Ok(classes)
        }
    }
}

/// Position of some ambient element x with S^x inside the target position
/// set, S given by its generators. Mapping the generators into a subgroup
/// of equal order carries all of S with them.
fn conjugating_position(
    cache: &ElementCache,
    sub_gens: &[GroupElement],
    target: &BTreeSet<usize>,
) -> Result<Option<usize>, SearchError> {
    'x: for (pos, x) in cache.elements().iter().enumerate() {
        for g in sub_gens {
            let conj = g.conj(x)?;
            match cache.position(&conj) {
                Some(p) if target.contains(&p) => {}
                _ => continue 'x,
            }
        }
        return Ok(Some(pos));
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Presentation-generator search

/// Random search for a tuple satisfying the profile presentation and
/// generating the whole (enumerable) group. Returns the tuple and programs
/// producing it over the group's own generators. Draws are guided by the
/// single-generator power relators, so only elements of the right orders
/// are tried.
pub fn find_presentation_generators(
    group: &mut GeneratedGroup,
    profile: &TargetProfile,
    tries: u64,
) -> Result<(Vec<GroupElement>, Vec<Slp>), SearchError> {
    let gens = group.generators().to_vec();
    let cache = group.enumerate(profile.order as usize)?;
    let total = cache.len();
    let elements = cache.elements().to_vec();
    let words = CayleyWords::build(&gens, group.cached().expect("just enumerated"))?;

    // Per generator symbol, the exact order required by a g_i^e relator.
    let mut wanted: Vec<Option<u64>> = vec![None; profile.arity];
    for r in &profile.relators {
        if let [(g, e)] = r.word[..] {
            let e = e.unsigned_abs();
            if e > 0 {
                let slot = &mut wanted[g];
                *slot = Some(slot.map_or(e, |cur| cur.min(e)));
            }
        }
    }
    let mut pools: Vec<Vec<usize>> = vec![Vec::new(); profile.arity];
    let mut order_of = HashMap::new();
    for (pos, el) in elements.iter().enumerate() {
        let o = element_order(el)?;
        order_of.insert(pos, o);
        for (slot, want) in wanted.iter().enumerate() {
            match want {
                Some(w) if *w == o => pools[slot].push(pos),
                None if o > 1 => pools[slot].push(pos),
                _ => {}
            }
        }
    }
    if pools.iter().any(|p| p.is_empty()) {
        return Err(SearchError::PresentationSearchExhausted { tries: 0 });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(group.seed());
    let relator_slps: Vec<Slp> = profile
        .relators
        .iter()
        .map(|r| Slp::from_word(profile.arity, &r.word))
        .collect::<Result<_, _>>()?;
    for _ in 0..tries {
        let picks: Vec<usize> = pools
            .iter()
            .map(|pool| pool[rng.gen_range(0..pool.len())])
            .collect();
        let tuple: Vec<GroupElement> = picks.iter().map(|&p| elements[p].clone()).collect();
        let mut ok = true;
        for r in &relator_slps {
            if !r.evaluate(&tuple)?.is_identity() {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        // The relators make ⟨tuple⟩ an image of the target, so its order
        // divides the target order; generating the whole group needs the
        // whole order, which the ambient already has.
        let mut sub = GeneratedGroup::new(tuple.clone())?;
        if sub.enumerate(total)?.len() != total {
            continue;
        }
        let slps = picks
            .iter()
            .map(|&p| words.slp_for(p))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok((tuple, slps));
    }
    Err(SearchError::PresentationSearchExhausted { tries })
}

// ---------------------------------------------------------------------------
// A5 embedding classification

#[derive(Clone, Debug, Serialize)]
pub struct A5Embedding {
    /// Orbit lengths on the permutation domain, largest first.
    pub orbit_lengths: Vec<usize>,
    pub centralizer_size: Option<u64>,
    pub certificate: PresentationCertificate,
}

/// Certify that a permutation pair presents A5 and report how the copy sits
/// in its domain: orbit lengths, plus the ambient centralizer size when an
/// enumerated ambient is supplied.
pub fn classify_a5_embedding(
    gens: &[GroupElement],
    ambient: Option<&ElementCache>,
) -> Result<A5Embedding, SearchError> {
    let profile = builtin_profile("a5")?;
    let certificate = certify_presentation(gens, &profile)?;
    let grp = GeneratedGroup::new(gens.to_vec())?;
    let mut orbit_lengths = grp.orbit_lengths()?;
    orbit_lengths.sort_unstable_by(|a, b| b.cmp(a));
    let centralizer_size = match ambient {
        Some(cache) => Some(centralizer_bruteforce(cache.elements(), gens)?.len() as u64),
        None => None,
    };
    Ok(A5Embedding {
        orbit_lengths,
        centralizer_size,
        certificate,
    })
}

// ---------------------------------------------------------------------------
// Pipeline configuration

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProfileRef {
    Name(String),
    Inline(Box<TargetProfile>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassSelection {
    /// Restrict the census to involutions of this ambient class (with the
    /// cofactor j·g in the same class). When absent, all inverting
    /// involutions are collected and the expected count sums over all
    /// involution class pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub involution: Option<String>,
    pub target: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub draws: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enumeration_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub screen_samples: Option<usize>,
    /// Tuple draws for the in-candidate presentation-generator search;
    /// 0 disables the presentation stage.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub presentation_tries: Option<u64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CensusMode {
    #[default]
    Random,
    /// Full scan of the enumerated ambient group: the oracle counterpart
    /// of the random census.
    Exhaustive,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// Ambient group file: a path, or a name resolved under the data
    /// directory environment variable.
    pub ambient: String,
    /// Programs over the ambient generators producing the seed elements.
    /// The last seed is the element whose inverters are censused.
    pub seed_slps: Vec<String>,
    pub profile: ProfileRef,
    /// Character table of the ambient group, for expected census counts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classes: Option<ClassSelection>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Budgets::is_default")]
    pub budgets: Budgets,
    /// Optional conjugator program: every seed is replaced by its
    /// conjugate under this element before anything else runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conjugate_seed_by: Option<String>,
    /// Record orbit lengths of certified candidates (permutation ambients).
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub classify_orbits: bool,
    #[serde(default, skip_serializing_if = "CensusMode::is_default")]
    pub census: CensusMode,
}

impl Budgets {
    fn is_default(&self) -> bool {
        *self == Budgets::default()
    }
}

impl CensusMode {
    fn is_default(&self) -> bool {
        *self == CensusMode::default()
    }
}

impl PipelineConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, SearchError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SearchError::Config(format!("reading {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| SearchError::Config(format!("parsing {}: {e}", path.display())))
    }
}

// ---------------------------------------------------------------------------
// Pipeline report

#[derive(Clone, Debug, Serialize)]
pub struct CandidateRejection {
    pub candidate: usize,
    pub stage: &'static str,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassSummary {
    pub members: Vec<usize>,
    pub order: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub centralizer_size: Option<u64>,
    pub merged_with_witness: bool,
    pub invariant: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub profile: String,
    pub ambient: String,
    pub seed: u64,
    pub census_mode: CensusMode,
    pub draw_budget: u64,
    pub screen_samples: usize,
    /// CMC-derived expected inverter count, as a decimal string.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_inverters: Option<String>,
    /// Table class the seed element was found to lie in.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed_class: Option<String>,
    pub inverters_found: usize,
    pub census_draws: u64,
    pub census_complete: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub census_warning: Option<String>,
    pub rejections: Vec<CandidateRejection>,
    pub witness_count: usize,
    pub classes: Vec<ClassSummary>,
    #[serde(skip)]
    pub wall: Duration,
}

pub struct PipelineOutcome {
    pub report: SearchReport,
    pub witnesses: Vec<SubgroupWitness>,
    pub classes: Vec<WitnessClass>,
}

// ---------------------------------------------------------------------------
// Pipeline

struct ClassFilterData {
    position_of: HashMap<GroupElement, usize>,
    class_of_position: Vec<usize>,
    invol_computed: usize,
    g: GroupElement,
}

impl ClassFilterData {
    fn accepts(&self, j: &GroupElement) -> bool {
        let Some(&jp) = self.position_of.get(j) else {
            return false;
        };
        if self.class_of_position[jp] != self.invol_computed {
            return false;
        }
        let Ok(cof) = j.mul(&self.g) else { return false };
        match self.position_of.get(&cof) {
            Some(&cp) => self.class_of_position[cp] == self.invol_computed,
            None => false,
        }
    }
}

struct TableContext {
    table: CharacterTable,
    computed: ComputedClasses,
    assignment: Vec<usize>,
}

impl TableContext {
    /// Table class index of the computed class containing the cached
    /// position `pos`.
    fn table_class_of(&self, pos: usize) -> Option<usize> {
        let c = self.computed.class_of_position[pos];
        self.assignment.iter().position(|&a| a == c)
    }
}

fn resolve_profile(r: &ProfileRef) -> Result<TargetProfile, SearchError> {
    match r {
        ProfileRef::Name(n) => builtin_profile(n),
        ProfileRef::Inline(p) => {
            p.validate()?;
            Ok((**p).clone())
        }
    }
}

struct CandidateOutcome {
    index: usize,
    rejection: Option<(&'static str, String)>,
    witness: Option<SubgroupWitness>,
}

/// Run the whole search: seed evaluation, ambient enumeration, inverter
/// census, screening, certification, centralizers, and deduplication.
/// Deterministic for a fixed config at `jobs` = 1; candidate testing runs
/// in parallel for `jobs` > 1 with results merged in candidate order.
pub fn run_pipeline(config: &PipelineConfig, jobs: usize) -> Result<PipelineOutcome, SearchError> {
    let started = Instant::now();
    let profile = stage("load-profile", resolve_profile(&config.profile))?;
    let ambient_gens = stage(
        "load-ambient",
        files::load_group_by_name(&config.ambient).map_err(SearchError::from),
    )?;
    let arity = ambient_gens.len();

    // seed-eval
    let mut seed_slp_texts = config.seed_slps.clone();
    let mut seeds: Vec<GroupElement> = stage(
        "seed-eval",
        config
            .seed_slps
            .iter()
            .map(|t| {
                Ok(Slp::parse(t, arity)?
                    .evaluate(&ambient_gens)
                    .map_err(SearchError::from)?)
            })
            .collect::<Result<Vec<_>, SearchError>>(),
    )?;
    if seeds.is_empty() {
        return Err(SearchError::Stage {
            stage: "seed-eval",
            source: Box::new(SearchError::Config("no seed programs given".into())),
        });
    }

    // conjugate-seed-by-witness
    if let Some(ctext) = &config.conjugate_seed_by {
        let conjugated = stage("conjugate-seed", {
            (|| {
                let cslp = Slp::parse(ctext, arity)?;
                let c = cslp.evaluate(&ambient_gens)?;
                let template = Slp::from_word(2, &[(0, -1), (1, 1), (0, 1)])?;
                let mut new_texts = Vec::with_capacity(seeds.len());
                let mut new_seeds = Vec::with_capacity(seeds.len());
                for text in &seed_slp_texts {
                    let sslp = Slp::parse(text, arity)?;
                    let composed = template.substitute(&[cslp.clone(), sslp])?;
                    new_seeds.push(composed.evaluate(&ambient_gens)?);
                    new_texts.push(composed.to_text());
                }
                debug_assert!(new_seeds
                    .iter()
                    .zip(&seeds)
                    .map(|(n, s)| Ok::<_, SearchError>(*n == s.conj(&c)?))
                    .all(|r| r.unwrap_or(false)));
                Ok((new_texts, new_seeds))
            })()
        })?;
        (seed_slp_texts, seeds) = conjugated;
    }
    let g = seeds.last().expect("nonempty").clone();
    if g.is_identity() {
        return Err(SearchError::Stage {
            stage: "seed-eval",
            source: Box::new(SearchError::Config(
                "the inverted seed element must not be the identity".into(),
            )),
        });
    }

    // enumerate-ambient: the pipeline needs the enumeration for witness
    // programs, class alignment, and exact deduplication.
    let enum_cap = config
        .budgets
        .enumeration_cap
        .unwrap_or(DEFAULT_ENUMERATION_CAP);
    let mut ambient = GeneratedGroup::with_seed(ambient_gens.clone(), config.seed)?;
    stage(
        "enumerate-ambient",
        ambient.enumerate(enum_cap).map(|_| ()).map_err(SearchError::from),
    )?;
    let words = stage(
        "enumerate-ambient",
        CayleyWords::build(
            &ambient_gens,
            ambient.cached().expect("just enumerated"),
        ),
    )?;

    // align-table
    let table_ctx: Option<TableContext> = match &config.table {
        Some(tpath) => Some(stage("align-table", {
            (|| {
                let path = files::resolve_data_path(tpath)?;
                let table = CharacterTable::load(&path)?;
                let computed = compute_classes(&mut ambient, enum_cap)?;
                let assignment = align_classes(&table, &computed)?;
                Ok(TableContext {
                    table,
                    computed,
                    assignment,
                })
            })()
        })?),
        None => None,
    };

    let mut seed_class_name = None;
    let mut expected_big: Option<BigUint> = None;
    let mut class_filter: Option<ClassFilterData> = None;
    if let Some(ctx) = &table_ctx {
        let selection = config.classes.as_ref().ok_or_else(|| SearchError::Stage {
            stage: "align-table",
            source: Box::new(SearchError::Config(
                "a table is configured but no classes are named".into(),
            )),
        })?;
        let outcome = stage("align-table", {
            (|| {
                let cache = ambient.cached().expect("enumerated above");
                let gpos = cache
                    .position(&g)
                    .expect("seed evaluated over the ambient generators");
                let g_table_class = ctx
                    .table_class_of(gpos)
                    .expect("alignment covers every class");
                // Class names inside a power-map orbit of equal order and
                // size can be permuted by a table automorphism, so the
                // configured name is validated by order and size and the
                // counting runs against the seed's aligned class, where
                // every coefficient is well defined.
                let named_idx = ctx.table.class_index(&selection.target)?;
                let named = ctx.table.class(named_idx)?;
                let actual = ctx.table.class(g_table_class)?;
                if named.order != actual.order || named.size != actual.size {
                    return Err(SearchError::Config(format!(
                        "seed element lies in class {} (order {}, size {}), \
                         configured target {} has order {}, size {}",
                        actual.name, actual.order, actual.size, named.name, named.order, named.size
                    )));
                }
                let invol_idx = match &selection.involution {
                    Some(name) => {
                        let idx = ctx.table.class_index(name)?;
                        if ctx.table.class(idx)?.order != 2 {
                            return Err(SearchError::Config(format!(
                                "configured involution class {} has element order {}",
                                name,
                                ctx.table.class(idx)?.order
                            )));
                        }
                        Some(idx)
                    }
                    None => None,
                };
                let expected = match invol_idx {
                    Some(i) => expected_inverter_count(&ctx.table, i, g_table_class)?,
                    None => expected_total_inverter_count(&ctx.table, g_table_class)?,
                };
                let filter = invol_idx.map(|i| {
                    let position_of: HashMap<GroupElement, usize> = cache
                        .elements()
                        .iter()
                        .cloned()
                        .enumerate()
                        .map(|(p, el)| (el, p))
                        .collect();
                    ClassFilterData {
                        position_of,
                        class_of_position: ctx.computed.class_of_position.clone(),
                        invol_computed: ctx.assignment[i],
                        g: g.clone(),
                    }
                });
                Ok((actual.name.clone(), expected, filter))
            })()
        })?;
        seed_class_name = Some(outcome.0);
        expected_big = Some(outcome.1);
        class_filter = outcome.2;
    }
    let expected_count: Option<usize> = match &expected_big {
        Some(b) => Some(b.to_usize().ok_or_else(|| SearchError::Stage {
            stage: "inverter-census",
            source: Box::new(SearchError::Config(
                "expected inverter count does not fit a machine word".into(),
            )),
        })?),
        None => None,
    };

    // inverter-census
    let draw_budget = config.budgets.draws.unwrap_or(DEFAULT_DRAW_BUDGET);
    let filter = |j: &GroupElement| class_filter.as_ref().is_none_or(|f| f.accepts(j));
    let census = stage(
        "inverter-census",
        match config.census {
            CensusMode::Random => {
                find_inverting_involutions(&mut ambient, &g, expected_count, filter, draw_budget)
            }
            CensusMode::Exhaustive => {
                let cache = ambient.cached().expect("enumerated above");
                let involutions = inverting_involutions_exhaustive(cache, &g, filter)?;
                let complete = expected_count.is_none_or(|e| involutions.len() == e);
                let warning = (!complete).then(|| {
                    format!(
                        "exhaustive census found {} inverting involutions, expected {}",
                        involutions.len(),
                        expected_count.expect("incomplete implies expected")
                    )
                });
                Ok(InverterCensus {
                    involutions,
                    draws: 0,
                    expected: expected_count,
                    complete,
                    budget_exhausted: false,
                    warning,
                })
            }
        },
    )?;

    // screen + certify + centralizer, per candidate
    let samples = config
        .budgets
        .screen_samples
        .unwrap_or(DEFAULT_SCREEN_SAMPLES);
    let presentation_tries = config
        .budgets
        .presentation_tries
        .unwrap_or(DEFAULT_PRESENTATION_TRIES);
    let cache = ambient.cached().expect("enumerated above");
    let process = |(index, j): (usize, &GroupElement)| -> Result<CandidateOutcome, SearchError> {
        process_candidate(
            index,
            j,
            &seeds,
            &seed_slp_texts,
            &profile,
            config,
            samples,
            presentation_tries,
            cache,
            &words,
            table_ctx.as_ref(),
        )
    };
    let mut outcomes: Vec<CandidateOutcome> = stage(
        "candidates",
        if jobs > 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| SearchError::Config(format!("thread pool: {e}")))?;
            pool.install(|| {
                use rayon::prelude::*;
                census
                    .involutions
                    .par_iter()
                    .enumerate()
                    .map(process)
                    .collect::<Result<Vec<_>, _>>()
            })
        } else {
            census
                .involutions
                .iter()
                .enumerate()
                .map(process)
                .collect()
        },
    )?;
    outcomes.sort_by_key(|o| o.index);

    let mut rejections = Vec::new();
    let mut witnesses = Vec::new();
    for o in outcomes {
        match (o.rejection, o.witness) {
            (Some((stage, reason)), _) => rejections.push(CandidateRejection {
                candidate: o.index,
                stage,
                reason,
            }),
            (None, Some(w)) => witnesses.push(w),
            (None, None) => unreachable!("a candidate either rejects or witnesses"),
        }
    }

    // dedup
    let classes = stage(
        "dedup",
        dedup_subgroups(
            &ambient_gens,
            &witnesses,
            DedupContext::Enumerated {
                cache,
                words: &words,
            },
        ),
    )?;

    let class_summaries = classes
        .iter()
        .map(|c| {
            let lead = &witnesses[c.members[0]];
            ClassSummary {
                members: c.members.clone(),
                order: lead.certificates.order,
                centralizer_size: lead.certificates.centralizer_size,
                merged_with_witness: c.merged_with_witness,
                invariant: c.invariant.clone(),
            }
        })
        .collect();

    let report = SearchReport {
        profile: profile.name.clone(),
        ambient: config.ambient.clone(),
        seed: config.seed,
        census_mode: config.census,
        draw_budget,
        screen_samples: samples,
        expected_inverters: expected_big.map(|b| b.to_string()),
        seed_class: seed_class_name,
        inverters_found: census.involutions.len(),
        census_draws: census.draws,
        census_complete: census.complete,
        census_warning: census.warning,
        rejections,
        witness_count: witnesses.len(),
        classes: class_summaries,
        wall: started.elapsed(),
    };
    Ok(PipelineOutcome {
        report,
        witnesses,
        classes,
    })
}

#[allow(clippy::too_many_arguments)]
fn process_candidate(
    index: usize,
    j: &GroupElement,
    seeds: &[GroupElement],
    seed_slp_texts: &[String],
    profile: &TargetProfile,
    config: &PipelineConfig,
    samples: usize,
    presentation_tries: u64,
    cache: &ElementCache,
    words: &CayleyWords,
    table_ctx: Option<&TableContext>,
) -> Result<CandidateOutcome, SearchError> {
    let reject = |stage: &'static str, reason: String| {
        Ok(CandidateOutcome {
            index,
            rejection: Some((stage, reason)),
            witness: None,
        })
    };
    let mut cgens = seeds.to_vec();
    cgens.push(j.clone());
    let candidate_seed = config.seed.wrapping_add(index as u64 + 1);
    let mut candidate = GeneratedGroup::with_seed(cgens.clone(), candidate_seed)?;

    match quick_reject(&mut candidate, profile, samples)? {
        Screen::Pass => {}
        Screen::Reject { reason } => return reject("screen", reason),
    }

    let mut fusion_notes = Vec::new();
    let mut spectrum_certificate = None;
    let mut presentation = None;
    if profile.spectrum_characterised {
        match certify_by_order_spectrum(&mut candidate, profile) {
            Ok(cert) => spectrum_certificate = Some(cert),
            Err(e) => return reject("certify", e.to_string()),
        }
    }
    if presentation_tries > 0 {
        match find_presentation_generators(&mut candidate, profile, presentation_tries) {
            Ok((pgens, pslps)) => {
                let mut cert = certify_presentation(&pgens, profile)?;
                // Rewrite the programs from candidate generators to the
                // ambient generators: seeds keep their configured programs
                // and the inverter gets its spanning-tree word.
                let jpos = cache
                    .position(j)
                    .expect("inverters come from the enumerated ambient");
                let mut basis: Vec<Slp> = Vec::with_capacity(seed_slp_texts.len() + 1);
                for text in seed_slp_texts {
                    basis.push(Slp::parse(text, words.arity)?);
                }
                basis.push(words.slp_for(jpos)?);
                let texts = pslps
                    .iter()
                    .map(|p| Ok::<_, SearchError>(p.substitute(&basis)?.to_text()))
                    .collect::<Result<Vec<_>, _>>()?;
                cert.generator_slps = Some(texts);
                presentation = Some(cert);
            }
            Err(SearchError::PresentationSearchExhausted { tries }) => {
                if spectrum_certificate.is_none() {
                    return reject(
                        "certify",
                        format!("no presentation generator tuple found in {tries} tries"),
                    );
                }
                fusion_notes
                    .push(format!("presentation generators not found in {tries} tries"));
            }
            Err(SearchError::Blackbox(BlackboxError::Overflow { cap })) => {
                if spectrum_certificate.is_none() {
                    return reject(
                        "certify",
                        format!("candidate enumeration exceeded the target order {cap}"),
                    );
                }
                unreachable!("spectrum certificate bounds the candidate order");
            }
            Err(e) => return Err(e),
        }
    }
    if spectrum_certificate.is_none() && presentation.is_none() {
        return reject(
            "certify",
            "no certification route: profile is not spectrum-characterised and the \
             presentation stage is disabled"
                .into(),
        );
    }

    // The certificates above bound the candidate by the profile order, so
    // this enumeration cannot overflow.
    let spectrum = candidate.order_spectrum(profile.order as usize)?;
    let order = candidate.cached().expect("just enumerated").len() as u64;
    let centralizer_size =
        Some(centralizer_bruteforce(cache.elements(), &cgens)?.len() as u64);

    if let Some(ctx) = table_ctx {
        let jpos = cache.position(j).expect("inverter lies in the ambient");
        if let Some(tc) = ctx.table_class_of(jpos) {
            fusion_notes.push(format!(
                "inverting involution lies in ambient class {}",
                ctx.table.class(tc).expect("valid index").name
            ));
        }
    }
    if config.classify_orbits {
        if let Ok(mut lengths) = candidate.orbit_lengths() {
            lengths.sort_unstable_by(|a, b| b.cmp(a));
            fusion_notes.push(format!("orbit lengths {lengths:?}"));
        }
    }

    let jpos = cache.position(j).expect("inverter lies in the ambient");
    let mut slp_texts = seed_slp_texts.to_vec();
    slp_texts.push(words.slp_for(jpos)?.to_text());
    let witness = SubgroupWitness {
        profile: profile.name.clone(),
        slp_texts,
        certificates: WitnessCertificates {
            order,
            spectrum: spectrum.orders().into_iter().collect(),
            presentation,
            spectrum_certificate,
            centralizer_size,
            fusion_notes,
        },
    };
    Ok(CandidateOutcome {
        index,
        rejection: None,
        witness: Some(witness),
    })
}
