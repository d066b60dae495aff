//! Acceptance suite: one test per criterion, each printing a single
//! `criterion N: PASS` line (run with `--nocapture` to see them).
//! Criteria gated on optional large-table exports print `SKIP (gated)`
//! instead of silently passing when the export files are absent.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::Instant;

use num::{BigUint, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use groupsleuth_core::blackbox::{
    bray_centralizer_elements, centralizer_bruteforce, element_order, GeneratedGroup,
    GroupElement,
};
use groupsleuth_core::chartab::{align_classes, compute_classes, CharacterTable};
use groupsleuth_core::cyclo::Cyclotomic;
use groupsleuth_core::files;
use groupsleuth_core::fusion::{
    enumerate_possible_fusions, fusion_from_embedding, verify_fusion,
};
use groupsleuth_core::gf2::{
    fixed_space_dimension, orbits_on_vectors, quadratic_form_type, BitMatrix, FormType,
    QuadraticFormGf2, VectorOrbitMode,
};
use groupsleuth_core::perm::Permutation;
use groupsleuth_core::search::{
    builtin_profile, certify_presentation, classify_a5_embedding, run_pipeline, CayleyWords,
    CensusMode, PipelineConfig, SearchError,
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

fn perm(images: &[u16]) -> GroupElement {
    GroupElement::Perm(Permutation::from_images(images.to_vec()).unwrap())
}

/// Every class multiplication coefficient of the four desk-scale tables
/// must equal a literal count of factorisations in the enumerated group.
#[test]
fn criterion_1_coefficients_match_bruteforce_pair_counts() {
    let started = Instant::now();
    for (tname, gname) in [("a5", "a5"), ("s5", "s5"), ("d12", "d12"), ("pgl2_13", "pgl2_13")] {
        let tab = table(tname);
        let mut grp = GeneratedGroup::new(fixture(gname)).unwrap();
        let computed = compute_classes(&mut grp, 1 << 14).unwrap();
        let assignment = align_classes(&tab, &computed).unwrap();
        let cache = grp.cached().unwrap();
        let k = tab.class_count();

        let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (pos, &ci) in computed.class_of_position.iter().enumerate() {
            members[ci].push(pos);
        }

        for a in 0..k {
            for c in 0..k {
                // Count x in A with x^-1 z in B for a fixed z in C; this is
                // the number of pairs (x, y) in A x B with x y = z.
                let z = &computed.reps[assignment[c]];
                let mut counts = vec![0u64; k];
                for &xpos in &members[assignment[a]] {
                    let x = &cache.elements()[xpos];
                    let y = x.inverse().unwrap().mul(z).unwrap();
                    let ypos = cache.position(&y).unwrap();
                    counts[computed.class_of_position[ypos]] += 1;
                }
                for b in 0..k {
                    let expected = tab.class_mult_coefficient(a, b, c).unwrap();
                    assert_eq!(
                        expected,
                        BigUint::from(counts[assignment[b]]),
                        "{tname}: triple ({a},{b},{c})"
                    );
                }
            }
        }
    }
    let wall = started.elapsed();
    assert!(wall.as_secs() < 30, "took {wall:.1?}, budget is 30 s");
    println!("criterion 1: PASS (4 tables, every triple, {wall:.1?})");
}

/// Counting claims on the 194-class table export, when it is present.
/// The identification claim additionally needs the 2^(1+24).Co1 export.
#[test]
fn criterion_2_monster_scale_counting_claims() {
    let path = data_path("exports/monster.json");
    if !path.exists() {
        println!("criterion 2: SKIP (gated: data/exports/monster.json not present)");
        return;
    }
    let started = Instant::now();
    let tab = CharacterTable::load(&path).unwrap();
    assert_eq!(tab.class_count(), 194);
    let idx = |n: &str| tab.class_index(n).unwrap();
    let cmc = |a: &str, b: &str, c: &str| tab.class_mult_coefficient(idx(a), idx(b), idx(c)).unwrap();
    assert_eq!(cmc("2B", "2B", "6B"), BigUint::from(14_152_320u64));
    assert_eq!(cmc("2B", "2B", "6E"), BigUint::from(466_560u64));
    assert_eq!(cmc("2B", "2B", "6F"), BigUint::from(91_530u64));
    assert_eq!(cmc("2B", "2B", "5B"), BigUint::from(3_150_000u64));
    assert_eq!(cmc("2B", "2B", "7B"), BigUint::from(72_030u64));
    // 2^4 * 3^3 * 13^2
    assert_eq!(tab.centralizer_order(idx("13A")).unwrap(), BigUint::from(73_008u64));

    let co_path = data_path("exports/g_2_1_24_co1.json");
    if !co_path.exists() {
        println!(
            "criterion 2: PASS counting, SKIP identification (gated: \
             data/exports/g_2_1_24_co1.json not present)"
        );
        return;
    }
    let co = CharacterTable::load(&co_path).unwrap();
    let row = (0..co.row_count())
        .find(|&r| co.degree(r) == BigUint::from(299u32))
        .expect("a 299-dimensional row");
    let hits = co.identify_class(&[(row, Cyclotomic::from_integer(-13))]);
    let names: BTreeSet<&str> = hits
        .into_iter()
        .filter(|&c| co.classes()[c].order == 4)
        .map(|c| co.classes()[c].name.as_str())
        .collect();
    assert_eq!(names, BTreeSet::from(["4F", "4G"]));
    let wall = started.elapsed();
    assert!(wall.as_secs() < 60, "took {wall:.1?}, budget is 60 s");
    println!("criterion 2: PASS ({wall:.1?})");
}

/// Enumeration closes at the full order from the shipped generator files.
#[test]
fn criterion_3_enumeration_orders() {
    let started = Instant::now();
    for (name, order) in [("psl2_16", 4080usize), ("psu3_4", 62_400)] {
        let mut grp = GeneratedGroup::new(fixture(name)).unwrap();
        assert_eq!(grp.enumerate(1 << 17).unwrap().len(), order, "{name}");
    }
    let wall = started.elapsed();
    assert!(wall.as_secs() < 60, "took {wall:.1?}, budget is 60 s");
    println!("criterion 3: PASS (psl2_16 -> 4080, psu3_4 -> 62400, {wall:.1?})");
}

/// Shipped generators certify against their presentation profiles, and
/// perturbing any one relator exponent fails naming exactly that relator.
#[test]
fn criterion_4_presentation_certificates_and_mutants() {
    let mut mutants = 0usize;
    for (pname, fix) in [
        ("pgl2_13", "pres_pgl2_13"),
        ("a12", "a12"),
        ("a5", "a5"),
        ("psu3_4", "psu3_4"),
    ] {
        let gens = fixture(fix);
        let profile = builtin_profile(pname).unwrap();
        let cert = certify_presentation(&gens, &profile).unwrap();
        assert_eq!(cert.relators_checked.len(), profile.relators.len());

        for ri in 0..profile.relators.len() {
            // Appending one extra letter changes the relator's value from
            // the identity to a generator image, which is never trivial on
            // a faithful tuple, so the mutant must fail and must name the
            // relator that was touched.
            let mut mutant = profile.clone();
            let word = &mut mutant.relators[ri].word;
            let last = word.len() - 1;
            word[last].1 += 1;
            let err = certify_presentation(&gens, &mutant).unwrap_err();
            match err {
                SearchError::RelatorFails { relator } => {
                    assert_eq!(relator, profile.relators[ri].name, "{pname} mutant {ri}")
                }
                other => panic!("{pname} mutant {ri}: expected a relator failure, got {other}"),
            }
            mutants += 1;
        }
    }
    println!("criterion 4: PASS (4 profiles, {mutants} single-relator mutants all caught)");
}

/// The subgroup pipeline over the index-2 ambient group finds exactly the
/// subgroup a brute-force argument pins down: the unique index-2 subgroup
/// (the closure of the squares), one witness class, trivial centralizer,
/// bit-identical across reruns and census modes at a fixed seed.
#[test]
fn criterion_5_pipeline_matches_bruteforce_scan() {
    let started = Instant::now();
    let mut config = PipelineConfig::load(&data_path("configs/pipeline_psl2_13_in_pgl2_13.json"))
        .unwrap();
    // The config ships with data-directory-relative names; the test runs
    // without the environment variable, so patch in absolute paths.
    config.ambient = data_path("groups/pgl2_13.json").to_string_lossy().into_owned();
    config.table = Some(data_path("tables/pgl2_13.json").to_string_lossy().into_owned());

    let ambient = fixture("pgl2_13");
    let mut grp = GeneratedGroup::new(ambient.clone()).unwrap();
    let cache = grp.enumerate(4000).unwrap();
    let order = cache.len();
    assert_eq!(order, 2184);

    // Brute-force oracle: the set of squares, closed under multiplication,
    // is the smallest subgroup containing every square, and any subgroup of
    // half the order is normal with abelian (hence square-free) quotient,
    // so it contains the closure. Index 2 here means the closure is the
    // one and only candidate subgroup of order 1092.
    let elements = cache.elements();
    let mut socle: BTreeSet<usize> = elements
        .iter()
        .map(|x| cache.position(&x.mul(x).unwrap()).unwrap())
        .collect();
    loop {
        let current: Vec<usize> = socle.iter().copied().collect();
        let before = socle.len();
        for &i in &current {
            for &j in &current {
                let p = cache.position(&elements[i].mul(&elements[j]).unwrap()).unwrap();
                socle.insert(p);
            }
        }
        if socle.len() == before {
            break;
        }
    }
    assert_eq!(socle.len() * 2, order, "squares-closure must have index 2");

    // Its centralizer in the ambient group is trivial.
    let socle_elements: Vec<GroupElement> =
        socle.iter().map(|&p| elements[p].clone()).collect();
    assert_eq!(centralizer_bruteforce(elements, &socle_elements).unwrap().len(), 1);

    let subgroup_positions = |witness_slps: &[String]| -> BTreeSet<usize> {
        let gens: Vec<GroupElement> = witness_slps
            .iter()
            .map(|t| Slp::parse(t, ambient.len()).unwrap().evaluate(&ambient).unwrap())
            .collect();
        let mut sub = GeneratedGroup::new(gens).unwrap();
        let sub_cache = sub.enumerate(4000).unwrap();
        sub_cache
            .elements()
            .iter()
            .map(|e| cache.position(e).unwrap())
            .collect()
    };

    let first = run_pipeline(&config, 1).unwrap();
    assert_eq!(first.classes.len(), 1, "exactly one witness class");
    assert!(!first.witnesses.is_empty());
    for w in &first.witnesses {
        assert_eq!(w.certificates.order, 1092);
        assert_eq!(w.certificates.centralizer_size, Some(1));
        assert_eq!(subgroup_positions(&w.slp_texts), socle, "witness subgroup is the socle");
    }

    // Deterministic: a rerun reproduces the report and witnesses exactly.
    let second = run_pipeline(&config, 1).unwrap();
    assert_eq!(
        serde_json::to_string(&first.report).unwrap(),
        serde_json::to_string(&second.report).unwrap()
    );
    assert_eq!(
        serde_json::to_string(&first.witnesses).unwrap(),
        serde_json::to_string(&second.witnesses).unwrap()
    );

    // The exhaustive census must land on the same single class.
    let mut exhaustive = config.clone();
    exhaustive.census = CensusMode::Exhaustive;
    let swept = run_pipeline(&exhaustive, 1).unwrap();
    assert_eq!(swept.classes.len(), 1);
    for w in &swept.witnesses {
        assert_eq!(subgroup_positions(&w.slp_texts), socle);
    }

    let wall = started.elapsed();
    assert!(wall.as_secs() < 300, "took {wall:.1?}, budget is 5 min");
    println!(
        "criterion 5: PASS (1 class, trivial centralizer, deterministic, {wall:.1?})"
    );
}

/// The three shipped degree-12 embedding witnesses produce the three
/// expected orbit profiles, and the {6,6} witness certifies the
/// presentation as part of its classification.
#[test]
fn criterion_6_embedding_orbit_profiles() {
    for (fix, lengths) in [
        ("a5_in_a12_o12", vec![12usize]),
        ("a5_in_a12_o66", vec![6, 6]),
        ("a5_in_a12_o651", vec![6, 5, 1]),
    ] {
        let emb = classify_a5_embedding(&fixture(fix), None).unwrap();
        assert_eq!(emb.orbit_lengths, lengths, "{fix}");
    }
    let split = classify_a5_embedding(&fixture("a5_in_a12_o66"), None).unwrap();
    let profile = builtin_profile("a5").unwrap();
    assert_eq!(split.certificate.relators_checked.len(), profile.relators.len());
    certify_presentation(&fixture("a5_in_a12_o66"), &profile).unwrap();
    println!("criterion 6: PASS (profiles {{12}}, {{6,6}}, {{6,5,1}}; {{6,6}} certified)");
}

fn companion(dim: usize, low_terms: &[usize]) -> BitMatrix {
    // Companion matrix of x^dim + (terms), column convention: M e_j = col j.
    let mut m = BitMatrix::zero(dim).unwrap();
    for j in 0..dim - 1 {
        m.set_entry(j + 1, j, true);
    }
    for &t in low_terms {
        m.set_entry(t, dim - 1, true);
    }
    m
}

fn random_invertible(dim: usize, rng: &mut ChaCha8Rng) -> BitMatrix {
    loop {
        let rows: Vec<u64> = (0..dim)
            .map(|_| rng.gen::<u64>() & ((1u64 << dim) - 1))
            .collect();
        let m = BitMatrix::from_rows(dim, rows).unwrap();
        if m.inverse().is_ok() {
            return m;
        }
    }
}

/// Fixed-space dimensions, the Singer orbit, the singular-vector count of
/// the split ten-dimensional quadratic form under basis change, and a full
/// sweep of the 2^24 vectors under an order-7 matrix.
#[test]
fn criterion_7_gf2_module_suite() {
    // Fixed spaces: a fixed-point-free block, a mixed block, the identity.
    let c3 = companion(3, &[0, 1]); // x^3 + x + 1
    let c4 = companion(4, &[0, 1]); // x^4 + x + 1
    assert_eq!(fixed_space_dimension(&c3), 0);
    let mut mixed = BitMatrix::zero(24).unwrap();
    for i in 0..4 {
        mixed.set_entry(i, i, true);
    }
    for b in 0..5 {
        for r in 0..4 {
            for c in 0..4 {
                if c4.entry(r, c) {
                    mixed.set_entry(4 + 4 * b + r, 4 + 4 * b + c, true);
                }
            }
        }
    }
    assert_eq!(fixed_space_dimension(&mixed), 4);
    assert_eq!(fixed_space_dimension(&BitMatrix::identity(24).unwrap()), 24);

    // The shipped order-7 Singer matrix is transitive on GF(2)^3 \ {0}.
    let singer = match &fixture("singer7_gf2")[0] {
        GroupElement::Mat(m) => m.clone(),
        other => panic!("expected a matrix generator, got {other:?}"),
    };
    assert!(singer.pow(7).unwrap().is_identity());
    let orbits = orbits_on_vectors(&[singer], VectorOrbitMode::NonzeroVectors).unwrap();
    assert_eq!(orbits.sizes, vec![7]);

    // Split form in dimension 10: (2^4 + 1)(2^5 - 1) = 527 singular
    // vectors, invariant under 100 random changes of basis.
    let q = QuadraticFormGf2::hyperbolic(5).unwrap();
    assert_eq!(q.singular_count().unwrap(), 527);
    assert_eq!(quadratic_form_type(&q).unwrap(), FormType::Plus);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let basis = random_invertible(10, &mut rng);
        let moved = q.transform(&basis).unwrap();
        assert_eq!(moved.singular_count().unwrap(), 527);
        assert_eq!(quadratic_form_type(&moved).unwrap(), FormType::Plus);
    }

    // Full 2^24 sweep for a conjugated order-7 block matrix: every nonzero
    // vector lies in an orbit of size exactly 7.
    let started = Instant::now();
    let mut blocks = BitMatrix::zero(24).unwrap();
    for b in 0..8 {
        for r in 0..3 {
            for c in 0..3 {
                if c3.entry(r, c) {
                    blocks.set_entry(3 * b + r, 3 * b + c, true);
                }
            }
        }
    }
    let t = random_invertible(24, &mut rng);
    let m = t.inverse().unwrap().mul(&blocks).unwrap().mul(&t).unwrap();
    assert!(!m.is_identity());
    assert!(m.pow(7).unwrap().is_identity());
    let sweep = orbits_on_vectors(&[m], VectorOrbitMode::NonzeroVectors).unwrap();
    assert_eq!(sweep.sizes.len(), ((1usize << 24) - 1) / 7);
    assert!(sweep.sizes.iter().all(|&s| s == 7));
    let wall = started.elapsed();
    assert!(wall.as_secs() < 120, "sweep took {wall:.1?}, budget is 120 s");
    println!("criterion 7: PASS (fixed spaces 0/4/24, Singer orbit, 527 singular, sweep {wall:.1?})");
}

fn random_program(rng: &mut ChaCha8Rng, arity: usize) -> Slp {
    let mut instrs: Vec<Instr> = (0..arity).map(Instr::LoadGen).collect();
    let extra = rng.gen_range(1..=20);
    for _ in 0..extra {
        let n = instrs.len();
        let pick = |rng: &mut ChaCha8Rng| rng.gen_range(0..n);
        let instr = match rng.gen_range(0..4u8) {
            0 => Instr::LoadGen(rng.gen_range(0..arity)),
            1 => Instr::Mul(pick(rng), pick(rng)),
            2 => Instr::Inv(pick(rng)),
            _ => Instr::Pow(pick(rng), rng.gen_range(-6..=6)),
        };
        instrs.push(instr);
    }
    let ret = instrs.len() - 1;
    Slp::from_instructions(arity, instrs, ret).unwrap()
}

/// Structural identities that need no external values: the column counting
/// identity and orthogonality on every shipped table, commutation of the
/// involution-centralizer sampler, program transport through a central
/// quotient, and fusion maps recovered from explicit embeddings.
#[test]
fn criterion_8_property_suites() {
    // Sum over C of CMC(A,B,C)|C| counts all of A x B, on every table.
    let shipped = ["a5", "a6", "a12", "c13_6", "d12", "pgl2_13", "psl2_13", "s5"];
    for name in shipped {
        let tab = table(name);
        let k = tab.class_count();
        for a in 0..k {
            for b in 0..k {
                let mut sum = BigUint::zero();
                for c in 0..k {
                    sum += tab.class_mult_coefficient(a, b, c).unwrap() * &tab.classes()[c].size;
                }
                let expect = &tab.classes()[a].size * &tab.classes()[b].size;
                assert_eq!(sum, expect, "{name}: classes ({a},{b})");
            }
        }
    }

    // Orthogonality is enforced by the loader itself; loading is the check.
    // The large export joins in when present, with a counting spot-check on
    // an involution row (the full triple sweep there is out of desk budget).
    let monster = data_path("exports/monster.json");
    let mut orthogonality_note = "8 shipped tables";
    if monster.exists() {
        let tab = CharacterTable::load(&monster).unwrap();
        let a = tab.class_index("2B").unwrap();
        let k = tab.class_count();
        let mut sum = BigUint::zero();
        for c in 0..k {
            sum += tab.class_mult_coefficient(a, a, c).unwrap() * &tab.classes()[c].size;
        }
        assert_eq!(sum, &tab.classes()[a].size * &tab.classes()[a].size);
        orthogonality_note = "8 shipped tables plus the large export";
    }

    // Involution-centralizer sampling: every output commutes with the seed.
    let mut draws = 0usize;
    for name in ["a5", "s5", "d12", "psl2_13", "psu3_4"] {
        let mut grp = GeneratedGroup::with_seed(fixture(name), 11).unwrap();
        let t = loop {
            let x = grp.random_element().unwrap();
            let o = element_order(&x).unwrap();
            if o % 2 == 0 {
                break x.pow((o / 2) as i64).unwrap();
            }
        };
        let outputs = bray_centralizer_elements(&t, &mut grp, 2000).unwrap();
        assert!(!outputs.is_empty());
        for y in &outputs {
            assert!(y.commutes_with(&t).unwrap());
        }
        draws += 2000;
    }
    assert_eq!(draws, 10_000);

    // Transport through a central quotient: evaluating a program in the
    // covering group and projecting agrees with evaluating it directly in
    // the quotient, with the projection computed independently from words.
    let r = perm(&[1, 2, 3, 0]); // order 4 rotation
    let s = perm(&[0, 3, 2, 1]); // reflection
    let a = perm(&[1, 0, 2, 3]);
    let b = perm(&[0, 1, 3, 2]);
    let hom = HomByImages::new(vec![r.clone(), s.clone()], vec![a.clone(), b.clone()]).unwrap();
    let relators = [
        Slp::from_word(2, &[(0, 4)]).unwrap(),
        Slp::from_word(2, &[(1, 2)]).unwrap(),
        Slp::from_word(2, &[(0, 1), (1, 1), (0, 1), (1, 1)]).unwrap(),
    ];
    assert!(hom.respects_relators(&relators).unwrap());
    let cover_gens = vec![r, s];
    let mut cover = GeneratedGroup::new(cover_gens.clone()).unwrap();
    let cache = cover.enumerate(16).unwrap();
    assert_eq!(cache.len(), 8);
    let words = CayleyWords::build(&cover_gens, cache).unwrap();
    let image_gens = [a, b];
    let projection: Vec<GroupElement> = (0..cache.len())
        .map(|pos| words.slp_for(pos).unwrap().evaluate(&image_gens).unwrap())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..1000 {
        let prog = random_program(&mut rng, 2);
        let lifted = hom.lift(&prog).unwrap();
        let direct = hom.transport(&prog).unwrap();
        let pos = cache.position(&lifted).unwrap();
        assert_eq!(projection[pos], direct);
    }

    // Fusion maps recovered from explicit embeddings pass verification and
    // appear among the enumerated possibilities.
    for (sub_t, amb_t, sub_f, amb_f) in [
        ("a5", "s5", "a5", "s5"),
        ("a5", "a6", "a5_in6", "a6"),
        ("psl2_13", "pgl2_13", "psl2_13", "pgl2_13"),
        ("c13_6", "psl2_13", "c13_6", "psl2_13"),
    ] {
        let sub_table = table(sub_t);
        let amb_table = table(amb_t);
        let mut sub_group = GeneratedGroup::new(fixture(sub_f)).unwrap();
        let mut amb_group = GeneratedGroup::new(fixture(amb_f)).unwrap();
        let map = fusion_from_embedding(&sub_table, &amb_table, &mut sub_group, &mut amb_group, 1 << 14)
            .unwrap();
        let violations = verify_fusion(&sub_table, &amb_table, &map).unwrap();
        assert!(violations.is_empty(), "{sub_t} in {amb_t}: {violations:?}");
        let possible = enumerate_possible_fusions(&sub_table, &amb_table).unwrap();
        assert!(possible.contains(&map), "{sub_t} in {amb_t}");
    }

    println!(
        "criterion 8: PASS (counting identity and orthogonality on {orthogonality_note}, \
         10^4 commuting draws, 10^3 transported programs, 4 fusion pairs)"
    );
}
