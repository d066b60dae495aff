//! Fusion maps: how subgroup conjugacy classes land in an ambient group.
//!
//! A fusion map assigns to each class of a subgroup table the ambient
//! class containing it. The map is constrained hard: identity to identity,
//! element orders preserved, power maps intertwined, centralizers dividing,
//! and every restricted ambient character must decompose into subgroup
//! irreducibles with non-negative integer multiplicities.

use num::{BigInt, BigRational, BigUint, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blackbox::GeneratedGroup;
use crate::chartab::{align_classes, compute_classes, CharacterTable, TableError};
use crate::cyclo::RootSum;

#[derive(Debug, Error)]
pub enum FusionError {
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("subgroup element {0} is not in the ambient group")]
    NotASubgroup(String),
    #[error("subgroup and ambient groups use different backends or degrees")]
    BackendMismatch,
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("fusion JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// One way a candidate fusion map fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FusionViolation {
    WrongLength { expected: usize, got: usize },
    IdentityMoved,
    OrderMismatch { sub_class: String, amb_class: String },
    PowerMapMismatch { sub_class: String, prime: u64 },
    CentralizerMismatch { sub_class: String },
    RestrictionNotCharacter { amb_row: usize, sub_row: usize, got: String },
}

impl std::fmt::Display for FusionViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FusionViolation::WrongLength { expected, got } => {
                write!(f, "map has {got} entries for {expected} subgroup classes")
            }
            FusionViolation::IdentityMoved => write!(f, "identity class does not map to identity"),
            FusionViolation::OrderMismatch { sub_class, amb_class } => {
                write!(f, "class {sub_class} maps to {amb_class} of a different element order")
            }
            FusionViolation::PowerMapMismatch { sub_class, prime } => {
                write!(f, "power map {prime} of class {sub_class} does not commute with the fusion")
            }
            FusionViolation::CentralizerMismatch { sub_class } => {
                write!(
                    f,
                    "centralizer order of {sub_class} does not divide its ambient centralizer"
                )
            }
            FusionViolation::RestrictionNotCharacter { amb_row, sub_row, got } => {
                write!(
                    f,
                    "restriction of ambient character {amb_row} has multiplicity {got} \
                     at subgroup character {sub_row}"
                )
            }
        }
    }
}

fn big_rat(b: &BigUint) -> BigRational {
    BigRational::from(BigInt::from(b.clone()))
}

/// Check a candidate map and report every violation found.
pub fn verify_fusion(
    sub: &CharacterTable,
    amb: &CharacterTable,
    map: &[usize],
) -> Result<Vec<FusionViolation>, FusionError> {
    let mut out = Vec::new();
    if map.len() != sub.class_count() {
        out.push(FusionViolation::WrongLength {
            expected: sub.class_count(),
            got: map.len(),
        });
        return Ok(out);
    }
    for &a in map {
        amb.class(a)?;
    }
    if map[0] != 0 {
        out.push(FusionViolation::IdentityMoved);
    }
    for (i, &a) in map.iter().enumerate() {
        let sc = sub.class(i)?;
        let ac = amb.class(a)?;
        if sc.order != ac.order {
            out.push(FusionViolation::OrderMismatch {
                sub_class: sc.name.clone(),
                amb_class: ac.name.clone(),
            });
            continue;
        }
        for (&p, &target) in &sc.power_maps {
            match ac.power_maps.get(&p) {
                Some(&amb_target) if amb_target == map[target] => {}
                Some(_) => out.push(FusionViolation::PowerMapMismatch {
                    sub_class: sc.name.clone(),
                    prime: p,
                }),
                // A valid ambient table stores maps for every prime
                // dividing the (equal) element order, so this only
                // triggers for extra primes the subgroup happens to list.
                None => {}
            }
        }
        let sub_cent = sub.centralizer_order(i)?;
        let amb_cent = amb.centralizer_order(a)?;
        if (&amb_cent % &sub_cent) != BigUint::zero() {
            out.push(FusionViolation::CentralizerMismatch {
                sub_class: sc.name.clone(),
            });
        }
    }
    if out.is_empty() {
        restriction_violations(sub, amb, map, &mut out)?;
    }
    Ok(out)
}

/// Multiplicity ⟨χ∘f, ψ⟩ over the subgroup for every pair of an ambient
/// character χ and a subgroup irreducible ψ; push a violation whenever the
/// value is not a non-negative integer.
fn restriction_violations(
    sub: &CharacterTable,
    amb: &CharacterTable,
    map: &[usize],
    out: &mut Vec<FusionViolation>,
) -> Result<(), FusionError> {
    let inv_order = BigRational::new(BigInt::from(1), BigInt::from(sub.order().clone()));
    for amb_row in 0..amb.row_count() {
        for sub_row in 0..sub.row_count() {
            let mut rational = BigRational::zero();
            let mut tail = RootSum::new();
            for (i, &a) in map.iter().enumerate() {
                let x = amb.value(amb_row, a);
                let y = sub.value(sub_row, i);
                if x.is_zero() || y.is_zero() {
                    continue;
                }
                let w = big_rat(&sub.class(i)?.size);
                match (x.as_rational(), y.as_rational()) {
                    (Some(p), Some(q)) => rational += p * q * w,
                    _ => tail.add_scaled(&x.mul(&y.conj()).map_err(TableError::from)?, &w),
                }
            }
            tail.add_rational(&rational);
            let bad = |got: String| FusionViolation::RestrictionNotCharacter {
                amb_row,
                sub_row,
                got,
            };
            match tail.as_rational() {
                None => out.push(bad("an irrational value".into())),
                Some(s) => {
                    let m = s * &inv_order;
                    if !m.is_integer() || m.numer().is_negative() {
                        out.push(bad(m.to_string()));
                    }
                }
            }
        }
    }
    Ok(())
}

/// All maps passing every fusion constraint, found by backtracking over
/// subgroup classes in decreasing element order so that power-map images
/// are forced before their sources' targets are needed.
pub fn enumerate_possible_fusions(
    sub: &CharacterTable,
    amb: &CharacterTable,
) -> Result<Vec<Vec<usize>>, FusionError> {
    let k = sub.class_count();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| {
        sub.classes()[j]
            .order
            .cmp(&sub.classes()[i].order)
            .then(i.cmp(&j))
    });

    // Candidates by order and centralizer divisibility.
    let mut candidates: Vec<Vec<usize>> = Vec::with_capacity(k);
    for i in 0..k {
        let sc = sub.class(i)?;
        let sub_cent = sub.centralizer_order(i)?;
        let mut cand = Vec::new();
        for a in 0..amb.class_count() {
            if amb.classes()[a].order != sc.order {
                continue;
            }
            if (&amb.centralizer_order(a)? % &sub_cent) != BigUint::zero() {
                continue;
            }
            cand.push(a);
        }
        candidates.push(cand);
    }

    fn assign(
        sub: &CharacterTable,
        amb: &CharacterTable,
        map: &mut [Option<usize>],
        i: usize,
        a: usize,
        trail: &mut Vec<usize>,
    ) -> bool {
        match map[i] {
            Some(existing) => return existing == a,
            None => {}
        }
        map[i] = Some(a);
        trail.push(i);
        // Force the images of all stored powers.
        for (&p, &target) in &sub.classes()[i].power_maps {
            if let Some(&amb_target) = amb.classes()[a].power_maps.get(&p) {
                if !assign(sub, amb, map, target, amb_target, trail) {
                    return false;
                }
            }
        }
        true
    }

    fn search(
        sub: &CharacterTable,
        amb: &CharacterTable,
        order: &[usize],
        depth: usize,
        candidates: &[Vec<usize>],
        map: &mut Vec<Option<usize>>,
        found: &mut Vec<Vec<usize>>,
    ) -> Result<(), FusionError> {
        if depth == order.len() {
            let full: Vec<usize> = map.iter().map(|m| m.expect("all assigned")).collect();
            if verify_fusion(sub, amb, &full)?.is_empty() {
                found.push(full);
            }
            return Ok(());
        }
        let i = order[depth];
        if map[i].is_some() {
            return search(sub, amb, order, depth + 1, candidates, map, found);
        }
        for &a in &candidates[i] {
            let mut trail = Vec::new();
            let ok = assign(sub, amb, map, i, a, &mut trail);
            if ok {
                search(sub, amb, order, depth + 1, candidates, map, found)?;
            }
            for t in trail {
                map[t] = None;
            }
        }
        Ok(())
    }

    let mut map: Vec<Option<usize>> = vec![None; k];
    map[0] = Some(0);
    let mut found = Vec::new();
    search(sub, amb, &order, 0, &candidates, &mut map, &mut found)?;
    found.sort();
    found.dedup();
    Ok(found)
}

/// Compute the fusion map of a concrete embedding: the subgroup generators
/// must live in the ambient group's backend, and both tables must match
/// their groups. Both groups are enumerated up to `cap`.
pub fn fusion_from_embedding(
    sub_table: &CharacterTable,
    amb_table: &CharacterTable,
    sub_group: &mut GeneratedGroup,
    amb_group: &mut GeneratedGroup,
    cap: usize,
) -> Result<Vec<usize>, FusionError> {
    let sg = sub_group.generators()[0].clone();
    let ag = amb_group.generators()[0].clone();
    if sg.backend_name() != ag.backend_name() || sg.size() != ag.size() {
        return Err(FusionError::BackendMismatch);
    }
    let sub_computed = compute_classes(sub_group, cap)?;
    let amb_computed = compute_classes(amb_group, cap)?;
    let sub_assign = align_classes(sub_table, &sub_computed)?;
    let amb_assign = align_classes(amb_table, &amb_computed)?;
    let amb_cache = amb_group.cached().expect("enumerated above");

    // Invert the ambient alignment: computed class -> table class.
    let mut amb_table_of = vec![usize::MAX; amb_computed.count()];
    for (t, &c) in amb_assign.iter().enumerate() {
        amb_table_of[c] = t;
    }

    let mut map = vec![0usize; sub_table.class_count()];
    for (t, &sc) in sub_assign.iter().enumerate() {
        let rep = &sub_computed.reps[sc];
        let pos = amb_cache
            .position(rep)
            .ok_or_else(|| FusionError::NotASubgroup(format!("{rep:?}")))?;
        map[t] = amb_table_of[amb_computed.class_of_position[pos]];
    }
    Ok(map)
}

/// Serialized fusion map: class names of the subgroup table in order,
/// giving the ambient class name each one fuses into.
#[derive(Serialize, Deserialize)]
pub struct FusionFile {
    pub subgroup: String,
    pub ambient: String,
    pub map: Vec<String>,
}

impl FusionFile {
    pub fn load(path: &std::path::Path) -> Result<Self, FusionError> {
        let text = std::fs::read_to_string(path).map_err(|source| FusionError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Resolve the named ambient classes to indices.
    pub fn resolve(&self, amb: &CharacterTable) -> Result<Vec<usize>, FusionError> {
        self.map
            .iter()
            .map(|name| amb.class_index(name).map_err(FusionError::from))
            .collect()
    }
}

/// Render a computed map as names for output files.
pub fn fusion_to_names(
    sub: &CharacterTable,
    amb: &CharacterTable,
    map: &[usize],
) -> Result<FusionFile, FusionError> {
    let names = map
        .iter()
        .map(|&a| amb.class(a).map(|c| c.name.clone()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FusionFile {
        subgroup: sub.name().into(),
        ambient: amb.name().into(),
        map: names,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blackbox::GroupElement;
    use crate::perm::Permutation;

    const A4_TABLE: &str = r#"{
      "name": "alt4",
      "order": "12",
      "conductor": "3",
      "classes": [
        {"name": "1a", "size": "1", "order": 1, "powermap": {"2": 0, "3": 0}},
        {"name": "2a", "size": "3", "order": 2, "powermap": {"2": 0, "3": 1}},
        {"name": "3a", "size": "4", "order": 3, "powermap": {"2": 3, "3": 0}},
        {"name": "3b", "size": "4", "order": 3, "powermap": {"2": 2, "3": 0}}
      ],
      "irreducibles": [
        ["1", "1", "1", "1"],
        ["1", "1", {"n": 3, "coeffs": ["0", "1"]}, {"n": 3, "coeffs": ["-1", "-1"]}],
        ["1", "1", {"n": 3, "coeffs": ["-1", "-1"]}, {"n": 3, "coeffs": ["0", "1"]}],
        ["3", "-1", "0", "0"]
      ]
    }"#;

    const C3_TABLE: &str = r#"{
      "name": "cyc3",
      "order": "3",
      "conductor": "3",
      "classes": [
        {"name": "1a", "size": "1", "order": 1, "powermap": {"3": 0}},
        {"name": "3a", "size": "1", "order": 3, "powermap": {"3": 0, "2": 2}},
        {"name": "3b", "size": "1", "order": 3, "powermap": {"3": 0, "2": 1}}
      ],
      "irreducibles": [
        ["1", "1", "1"],
        ["1", {"n": 3, "coeffs": ["0", "1"]}, {"n": 3, "coeffs": ["-1", "-1"]}],
        ["1", {"n": 3, "coeffs": ["-1", "-1"]}, {"n": 3, "coeffs": ["0", "1"]}]
      ]
    }"#;

    fn tables() -> (CharacterTable, CharacterTable) {
        (
            CharacterTable::from_json_str(C3_TABLE).unwrap(),
            CharacterTable::from_json_str(A4_TABLE).unwrap(),
        )
    }

    #[test]
    fn valid_fusions_pass_and_are_enumerated() {
        let (c3, a4) = tables();
        let all = enumerate_possible_fusions(&c3, &a4).unwrap();
        assert_eq!(all, vec![vec![0, 2, 3], vec![0, 3, 2]]);
        for map in &all {
            assert!(verify_fusion(&c3, &a4, map).unwrap().is_empty());
        }
    }

    #[test]
    fn broken_maps_report_violations() {
        let (c3, a4) = tables();
        // Wrong order: 3a cannot fuse into the involution class.
        let v = verify_fusion(&c3, &a4, &[0, 1, 3]).unwrap();
        assert!(v
            .iter()
            .any(|x| matches!(x, FusionViolation::OrderMismatch { .. })));
        // Collapsing both cube-root classes breaks the squaring map.
        let v = verify_fusion(&c3, &a4, &[0, 2, 2]).unwrap();
        assert!(v
            .iter()
            .any(|x| matches!(x, FusionViolation::PowerMapMismatch { .. })));
        // Identity must stay put.
        let v = verify_fusion(&c3, &a4, &[1, 2, 3]).unwrap();
        assert!(v.contains(&FusionViolation::IdentityMoved));
        // Length mismatch short-circuits.
        let v = verify_fusion(&c3, &a4, &[0, 2]).unwrap();
        assert_eq!(
            v,
            vec![FusionViolation::WrongLength { expected: 3, got: 2 }]
        );
    }

    #[test]
    fn embedding_recovers_a_legal_fusion() {
        let (c3, a4) = tables();
        let mut sub = GeneratedGroup::new(vec![GroupElement::Perm(
            Permutation::from_cycles(4, &[&[0, 1, 2]]).unwrap(),
        )])
        .unwrap();
        let mut amb = GeneratedGroup::new(vec![
            GroupElement::Perm(Permutation::from_cycles(4, &[&[0, 1], &[2, 3]]).unwrap()),
            GroupElement::Perm(Permutation::from_cycles(4, &[&[0, 1, 2]]).unwrap()),
        ])
        .unwrap();
        let map = fusion_from_embedding(&c3, &a4, &mut sub, &mut amb, 100).unwrap();
        let legal = enumerate_possible_fusions(&c3, &a4).unwrap();
        assert!(legal.contains(&map));
        assert!(verify_fusion(&c3, &a4, &map).unwrap().is_empty());
    }

    #[test]
    fn non_subgroup_is_detected() {
        let (c3, _) = tables();
        // Two cyclic groups of order three on disjoint supports: each
        // aligns with the table, but neither contains the other's
        // elements, so locating a representative fails.
        let mut sub = GeneratedGroup::new(vec![GroupElement::Perm(
            Permutation::from_cycles(4, &[&[1, 2, 3]]).unwrap(),
        )])
        .unwrap();
        let mut amb = GeneratedGroup::new(vec![GroupElement::Perm(
            Permutation::from_cycles(4, &[&[0, 1, 2]]).unwrap(),
        )])
        .unwrap();
        let c3_table = CharacterTable::from_json_str(C3_TABLE).unwrap();
        let err = fusion_from_embedding(&c3, &c3_table, &mut sub, &mut amb, 100);
        assert!(matches!(err, Err(FusionError::NotASubgroup(_))));
    }

    #[test]
    fn fusion_file_round_trip() {
        let (c3, a4) = tables();
        let map = vec![0usize, 2, 3];
        let file = fusion_to_names(&c3, &a4, &map).unwrap();
        assert_eq!(file.map, vec!["1a", "3a", "3b"]);
        let back = file.resolve(&a4).unwrap();
        assert_eq!(back, map);
    }
}
