//! Randomized property suites: group laws and order identities for
//! elements, program evaluation as a word homomorphism, substitution and
//! transport semantics, exact cyclotomic ring laws, power-map composition,
//! census-versus-counting consistency, screen soundness on true
//! embeddings, fusion enumeration consistency, and GF(2) invariants.

use std::collections::BTreeSet;
use std::path::PathBuf;

use num::BigUint;
use once_cell::sync::Lazy;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use groupsleuth_core::blackbox::{element_order, ElementCache, GeneratedGroup, GroupElement};
use groupsleuth_core::chartab::{align_classes, compute_classes, CharacterTable};
use groupsleuth_core::cyclo::Cyclotomic;
use groupsleuth_core::files;
use groupsleuth_core::fusion::{enumerate_possible_fusions, verify_fusion};
use groupsleuth_core::gf2::{
    fixed_space_dimension, orbits_on_vectors, quadratic_form_type, BitMatrix, FormType,
    QuadraticFormGf2, VectorOrbitMode,
};
use groupsleuth_core::perm::Permutation;
use groupsleuth_core::search::{
    builtin_profile, expected_total_inverter_count, quick_reject, CayleyWords, Screen,
};
use groupsleuth_core::slp::{HomByImages, Instr, Slp};

fn data_path(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(rel)
}

fn fixture(name: &str) -> Vec<GroupElement> {
    files::load_group(&data_path(&format!("groups/{name}.json"))).unwrap()
}

fn table(name: &str) -> CharacterTable {
    CharacterTable::load(&data_path(&format!("tables/{name}.json"))).unwrap()
}

// ---------------------------------------------------------------------------
// Strategies

fn perm8() -> impl Strategy<Value = GroupElement> {
    Just((0..8u16).collect::<Vec<u16>>())
        .prop_shuffle()
        .prop_map(|v| GroupElement::Perm(Permutation::from_images(v).unwrap()))
}

fn word(arity: usize) -> impl Strategy<Value = Vec<(usize, i64)>> {
    prop::collection::vec((0..arity, -5i64..=5), 1..12)
}

type InstrSpec = (u8, prop::sample::Index, prop::sample::Index, i64);

fn build_program(arity: usize, specs: &[InstrSpec]) -> Slp {
    let mut instrs: Vec<Instr> = (0..arity).map(Instr::LoadGen).collect();
    for (op, ia, ib, e) in specs {
        let n = instrs.len();
        let instr = match op % 4 {
            0 => Instr::LoadGen(ia.index(arity)),
            1 => Instr::Mul(ia.index(n), ib.index(n)),
            2 => Instr::Inv(ia.index(n)),
            _ => Instr::Pow(ia.index(n), *e),
        };
        instrs.push(instr);
    }
    let ret = instrs.len() - 1;
    Slp::from_instructions(arity, instrs, ret).unwrap()
}

fn program(arity: usize, max_len: usize) -> impl Strategy<Value = Slp> {
    prop::collection::vec(
        (0u8..4, any::<prop::sample::Index>(), any::<prop::sample::Index>(), -6i64..=6),
        1..max_len,
    )
    .prop_map(move |specs| build_program(arity, &specs))
}

fn bitmat(dim: usize) -> impl Strategy<Value = BitMatrix> {
    prop::collection::vec(0u64..(1u64 << dim), dim)
        .prop_map(move |rows| BitMatrix::from_rows(dim, rows).unwrap())
}

fn invertible(dim: usize) -> impl Strategy<Value = BitMatrix> {
    bitmat(dim).prop_filter("invertible", |m| m.inverse().is_ok())
}

fn cyclo_in(n: u64) -> impl Strategy<Value = Cyclotomic> {
    prop::collection::vec((0..n, -4i64..=4), 1..=3).prop_map(move |terms| {
        let mut acc = Cyclotomic::from_integer(0);
        for (k, c) in terms {
            let z = Cyclotomic::zeta(n, k).unwrap();
            let t = z.mul(&Cyclotomic::from_integer(c)).unwrap();
            acc = acc.add(&t).unwrap();
        }
        acc
    })
}

fn cyclo_triple() -> impl Strategy<Value = (Cyclotomic, Cyclotomic, Cyclotomic)> {
    prop_oneof![Just(1u64), Just(3), Just(4), Just(5), Just(8), Just(12)]
        .prop_flat_map(|n| (cyclo_in(n), cyclo_in(n), cyclo_in(n)))
}

static D12: Lazy<Vec<GroupElement>> = Lazy::new(|| fixture("d12"));

/// Dihedral cover of the Klein group, its element list in cache order, and
/// the projection of each element computed independently through words.
struct CoverTable {
    hom: HomByImages,
    elements: Vec<GroupElement>,
    projection: Vec<GroupElement>,
}

static COVER: Lazy<CoverTable> = Lazy::new(|| {
    let perm = |v: &[u16]| GroupElement::Perm(Permutation::from_images(v.to_vec()).unwrap());
    let r = perm(&[1, 2, 3, 0]);
    let s = perm(&[0, 3, 2, 1]);
    let a = perm(&[1, 0, 2, 3]);
    let b = perm(&[0, 1, 3, 2]);
    let hom = HomByImages::new(vec![r.clone(), s.clone()], vec![a.clone(), b.clone()]).unwrap();
    let gens = vec![r, s];
    let mut cover = GeneratedGroup::new(gens.clone()).unwrap();
    let cache = cover.enumerate(16).unwrap();
    let words = CayleyWords::build(&gens, cache).unwrap();
    let images = [a, b];
    let projection = (0..cache.len())
        .map(|pos| words.slp_for(pos).unwrap().evaluate(&images).unwrap())
        .collect();
    CoverTable { hom, elements: cache.elements().to_vec(), projection }
});

// ---------------------------------------------------------------------------
// Element laws

proptest! {
    #[test]
    fn permutation_group_laws(a in perm8(), b in perm8(), c in perm8()) {
        let ab_c = a.mul(&b).unwrap().mul(&c).unwrap();
        let a_bc = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(ab_c, a_bc);

        let e = a.identity_like();
        prop_assert_eq!(a.mul(&a.inverse().unwrap()).unwrap(), e.clone());
        prop_assert_eq!(e.mul(&a).unwrap(), a.clone());

        let ab_inv = a.mul(&b).unwrap().inverse().unwrap();
        let b_inv_a_inv = b.inverse().unwrap().mul(&a.inverse().unwrap()).unwrap();
        prop_assert_eq!(ab_inv, b_inv_a_inv);
    }

    #[test]
    fn element_order_laws(g in perm8(), x in perm8()) {
        let o = element_order(&g).unwrap();
        prop_assert!(o >= 1);
        prop_assert!(g.pow(o as i64).unwrap().is_identity());
        prop_assert_eq!(element_order(&g.inverse().unwrap()).unwrap(), o);
        prop_assert_eq!(element_order(&g.conj(&x).unwrap()).unwrap(), o);
    }
}

#[test]
fn element_orders_divide_group_order() {
    let mut grp = GeneratedGroup::new(fixture("s5")).unwrap();
    let cache = grp.enumerate(200).unwrap();
    for e in cache.elements() {
        assert_eq!(120 % element_order(e).unwrap(), 0);
    }
}

// ---------------------------------------------------------------------------
// Enumeration

#[test]
fn enumeration_is_closed_and_contains_identity() {
    for name in ["a5", "s5", "d12", "psl2_13"] {
        let gens = fixture(name);
        let mut grp = GeneratedGroup::new(gens.clone()).unwrap();
        let cache = grp.enumerate(2000).unwrap();
        assert!(cache.contains(&gens[0].identity_like()), "{name}");
        for e in cache.elements() {
            assert!(cache.contains(&e.inverse().unwrap()), "{name}");
            for g in &gens {
                assert!(cache.contains(&e.mul(g).unwrap()), "{name}");
            }
        }
    }
}

#[test]
fn subgroup_orders_divide_ambient_orders() {
    for (sub, amb) in [
        ("a5", "s5"),
        ("a5_in6", "a6"),
        ("psl2_13", "pgl2_13"),
        ("c13_6", "psl2_13"),
    ] {
        let mut s = GeneratedGroup::new(fixture(sub)).unwrap();
        let mut a = GeneratedGroup::new(fixture(amb)).unwrap();
        let s_cache = s.enumerate(4000).unwrap();
        let a_cache = a.enumerate(4000).unwrap();
        assert_eq!(a_cache.len() % s_cache.len(), 0, "{sub} in {amb}");
        for e in s_cache.elements() {
            assert!(a_cache.contains(e), "{sub} element outside {amb}");
        }
    }
}

#[test]
fn class_sizes_partition_the_group() {
    for name in ["a5", "s5", "d12", "pgl2_13"] {
        let mut grp = GeneratedGroup::new(fixture(name)).unwrap();
        let computed = compute_classes(&mut grp, 4000).unwrap();
        let total: usize = computed.sizes.iter().sum();
        assert_eq!(total, grp.cached().unwrap().len(), "{name}");
    }
}

#[test]
fn seeded_draws_are_reproducible() {
    let gens = fixture("psl2_13");
    let mut one = GeneratedGroup::with_seed(gens.clone(), 42).unwrap();
    let mut two = GeneratedGroup::with_seed(gens, 42).unwrap();
    for _ in 0..200 {
        assert_eq!(one.random_element().unwrap(), two.random_element().unwrap());
    }
}

// ---------------------------------------------------------------------------
// Programs

proptest! {
    #[test]
    fn word_evaluation_is_a_homomorphism(w1 in word(2), w2 in word(2)) {
        let gens = &*D12;
        let mut joined = w1.clone();
        joined.extend_from_slice(&w2);
        let left = Slp::from_word(2, &joined).unwrap().evaluate(gens).unwrap();
        let right = Slp::from_word(2, &w1).unwrap().evaluate(gens).unwrap()
            .mul(&Slp::from_word(2, &w2).unwrap().evaluate(gens).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn program_text_round_trips(p in program(2, 40)) {
        let text = p.to_text();
        let back = Slp::parse(&text, 2).unwrap();
        prop_assert_eq!(back.to_text(), text);
        let gens = &*D12;
        prop_assert_eq!(back.evaluate(gens).unwrap(), p.evaluate(gens).unwrap());
    }

    #[test]
    fn substitution_matches_composed_evaluation(
        outer in program(2, 30),
        p0 in program(2, 30),
        p1 in program(2, 30),
    ) {
        let gens = &*D12;
        let spliced = outer.substitute(&[p0.clone(), p1.clone()]).unwrap();
        let direct = outer
            .evaluate(&[p0.evaluate(gens).unwrap(), p1.evaluate(gens).unwrap()])
            .unwrap();
        prop_assert_eq!(spliced.evaluate(gens).unwrap(), direct);
    }

    #[test]
    fn lift_then_project_matches_transport(p in program(2, 98)) {
        let t = &*COVER;
        let lifted = t.hom.lift(&p).unwrap();
        let direct = t.hom.transport(&p).unwrap();
        let pos = t.elements.iter().position(|e| *e == lifted).unwrap();
        prop_assert_eq!(&t.projection[pos], &direct);
    }
}

// ---------------------------------------------------------------------------
// Cyclotomic arithmetic

proptest! {
    #[test]
    fn cyclotomic_ring_laws((x, y, z) in cyclo_triple()) {
        prop_assert_eq!(x.add(&y).unwrap(), y.add(&x).unwrap());
        prop_assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
        prop_assert_eq!(
            x.add(&y).unwrap().add(&z).unwrap(),
            x.add(&y.add(&z).unwrap()).unwrap()
        );
        prop_assert_eq!(
            x.mul(&y).unwrap().mul(&z).unwrap(),
            x.mul(&y.mul(&z).unwrap()).unwrap()
        );
        prop_assert_eq!(
            x.mul(&y.add(&z).unwrap()).unwrap(),
            x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap()
        );
    }

    #[test]
    fn conjugation_is_a_ring_involution((x, y, _z) in cyclo_triple()) {
        prop_assert_eq!(x.conj().conj(), x.clone());
        prop_assert_eq!(x.add(&y).unwrap().conj(), x.conj().add(&y.conj()).unwrap());
        prop_assert_eq!(x.mul(&y).unwrap().conj(), x.conj().mul(&y.conj()).unwrap());
        prop_assert!(x.mul(&x.conj()).unwrap().is_real());
    }
}

#[test]
fn roots_of_unity_multiply_by_exponent() {
    for n in [1u64, 3, 4, 5, 8, 12, 13] {
        for a in 0..n {
            for b in 0..n {
                let za = Cyclotomic::zeta(n, a).unwrap();
                let zb = Cyclotomic::zeta(n, b).unwrap();
                let prod = za.mul(&zb).unwrap();
                assert_eq!(prod, Cyclotomic::zeta(n, (a + b) % n).unwrap(), "n={n} a={a} b={b}");
            }
        }
        let mut acc = Cyclotomic::from_integer(1);
        let z = Cyclotomic::zeta(n, 1).unwrap();
        for _ in 0..n {
            acc = acc.mul(&z).unwrap();
        }
        assert_eq!(acc, Cyclotomic::from_integer(1), "zeta_{n}^{n}");
    }
}

// ---------------------------------------------------------------------------
// Tables

#[test]
fn power_maps_compose_for_coprime_exponents() {
    let shipped = ["a5", "a6", "a12", "c13_6", "d12", "pgl2_13", "psl2_13", "s5"];
    let pairs = [(2u64, 3u64), (2, 5), (3, 5), (2, 7), (3, 7), (5, 7), (2, 13), (3, 13)];
    let mut exercised = 0usize;
    for name in shipped {
        let tab = table(name);
        for c in 0..tab.class_count() {
            for (p, q) in pairs {
                // Tables carry prime maps only for primes dividing the
                // group order; compositions needing any other prime after
                // reduction are not computable and are skipped.
                let Ok(step) = tab.power_class(c, p) else { continue };
                let Ok(composed) = tab.power_class(step, q) else { continue };
                let Ok(direct) = tab.power_class(c, p * q) else { continue };
                assert_eq!(composed, direct, "{name}: class {c}, exponents {p},{q}");
                exercised += 1;
            }
        }
    }
    assert!(exercised > 200, "only {exercised} compositions were computable");
}

/// Counting by characters agrees with a literal inverter scan: for every
/// class representative, the number of involutions conjugating it to its
/// inverse equals the character-derived total.
#[test]
fn inverter_scan_matches_character_counts() {
    let tab = table("psl2_13");
    let mut grp = GeneratedGroup::new(fixture("psl2_13")).unwrap();
    let computed = compute_classes(&mut grp, 2000).unwrap();
    let assignment = align_classes(&tab, &computed).unwrap();
    let cache = grp.cached().unwrap();
    for c in 0..tab.class_count() {
        let g = &computed.reps[assignment[c]];
        let g_inv = g.inverse().unwrap();
        let scanned = cache
            .elements()
            .iter()
            .filter(|x| {
                element_order(x).unwrap() == 2 && g.conj(x).unwrap() == g_inv
            })
            .count();
        match expected_total_inverter_count(&tab, c) {
            Ok(expected) => assert_eq!(BigUint::from(scanned), expected, "class {c}"),
            // A non-real class is never conjugate to its inverse at all.
            Err(_) => assert_eq!(scanned, 0, "class {c}"),
        }
    }
}

// ---------------------------------------------------------------------------
// Screening

/// The cheap screen must never reject a genuine copy of the target: every
/// conjugate of a true generating pair passes.
#[test]
fn screen_accepts_true_embeddings() {
    let profile = builtin_profile("a5").unwrap();
    let a5_gens = fixture("a5");
    let mut ambient = GeneratedGroup::with_seed(fixture("s5"), 19).unwrap();
    for round in 0..50 {
        let s = ambient.random_element().unwrap();
        let conjugated: Vec<GroupElement> =
            a5_gens.iter().map(|g| g.conj(&s).unwrap()).collect();
        let mut candidate = GeneratedGroup::with_seed(conjugated, round).unwrap();
        match quick_reject(&mut candidate, &profile, 40).unwrap() {
            Screen::Pass => {}
            Screen::Reject { reason } => panic!("round {round}: rejected a true copy: {reason}"),
        }
    }
}

// ---------------------------------------------------------------------------
// Fusion

#[test]
fn enumerated_fusions_all_verify() {
    for (sub_t, amb_t) in [
        ("a5", "s5"),
        ("a5", "a6"),
        ("psl2_13", "pgl2_13"),
        ("c13_6", "psl2_13"),
    ] {
        let sub = table(sub_t);
        let amb = table(amb_t);
        let maps = enumerate_possible_fusions(&sub, &amb).unwrap();
        assert!(!maps.is_empty(), "{sub_t} in {amb_t}");
        for map in &maps {
            let violations = verify_fusion(&sub, &amb, map).unwrap();
            assert!(violations.is_empty(), "{sub_t} in {amb_t}: {map:?} -> {violations:?}");
        }
    }
}

// ---------------------------------------------------------------------------
// GF(2) invariants

proptest! {
    #[test]
    fn fixed_space_is_a_conjugation_invariant(m in bitmat(8), g in invertible(8)) {
        let conj = g.mul(&m).unwrap().mul(&g.inverse().unwrap()).unwrap();
        prop_assert_eq!(fixed_space_dimension(&conj), fixed_space_dimension(&m));
    }

    #[test]
    fn orbit_sizes_sum_and_divide(m in invertible(6)) {
        let orbits = orbits_on_vectors(
            std::slice::from_ref(&m),
            VectorOrbitMode::NonzeroVectors,
        ).unwrap();
        let total: usize = orbits.sizes.iter().sum();
        prop_assert_eq!(total, 63);
        let order = element_order(&GroupElement::Mat(m)).unwrap();
        for &s in &orbits.sizes {
            prop_assert_eq!(order % s as u64, 0);
        }
    }

    #[test]
    fn form_type_survives_basis_change(g in invertible(6)) {
        let plus = QuadraticFormGf2::hyperbolic(3).unwrap();
        let minus = QuadraticFormGf2::minus_type(3).unwrap();
        let plus_moved = plus.transform(&g).unwrap();
        let minus_moved = minus.transform(&g).unwrap();
        prop_assert_eq!(plus_moved.singular_count().unwrap(), plus.singular_count().unwrap());
        prop_assert_eq!(minus_moved.singular_count().unwrap(), minus.singular_count().unwrap());
        prop_assert_eq!(quadratic_form_type(&plus_moved).unwrap(), FormType::Plus);
        prop_assert_eq!(quadratic_form_type(&minus_moved).unwrap(), FormType::Minus);
    }
}

#[test]
fn minus_form_singular_count_in_dimension_ten() {
    let q = QuadraticFormGf2::minus_type(5).unwrap();
    // (2^4 - 1)(2^5 + 1)
    assert_eq!(q.singular_count().unwrap(), 495);
    assert_eq!(quadratic_form_type(&q).unwrap(), FormType::Minus);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..30 {
        let rows: Vec<u64> = (0..10).map(|_| rng.gen::<u64>() & 0x3ff).collect();
        let m = BitMatrix::from_rows(10, rows).unwrap();
        if m.inverse().is_err() {
            continue;
        }
        let moved = q.transform(&m).unwrap();
        assert_eq!(moved.singular_count().unwrap(), 495);
        assert_eq!(quadratic_form_type(&moved).unwrap(), FormType::Minus);
    }
}

// ---------------------------------------------------------------------------
// Cache coherence

#[test]
fn cache_positions_are_consistent() {
    let mut grp = GeneratedGroup::new(fixture("a5")).unwrap();
    let cache: &ElementCache = grp.enumerate(100).unwrap();
    let mut seen = BTreeSet::new();
    for (i, e) in cache.elements().iter().enumerate() {
        assert_eq!(cache.position(e), Some(i));
        assert!(seen.insert(e.clone()), "duplicate element in cache");
    }
    assert_eq!(seen.len(), 60);
}
