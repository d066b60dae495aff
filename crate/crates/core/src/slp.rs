//! Straight-line programs over abstract generator symbols.
//!
//! A program is a list of instructions in single-assignment form; register
//! k holds the value of instruction k. Programs are the portable currency
//! for words: the same program can be evaluated over any generator tuple of
//! matching arity, in any backend, and so transports elements along
//! generator correspondences.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::blackbox::{BlackboxError, GroupElement};

#[derive(Debug, Error)]
pub enum SlpError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: register r{label} assigned twice")]
    RegisterRewrite { line: usize, label: u64 },
    #[error("line {line}: register r{label} read before assignment")]
    ReadBeforeWrite { line: usize, label: u64 },
    #[error("generator index {index} out of range for arity {arity}")]
    BadGenerator { index: usize, arity: usize },
    #[error("program expects {expected} generators, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("program has no instructions")]
    EmptyProgram,
    #[error("arity must be positive")]
    ZeroArity,
    #[error("instruction {at} references register {operand} not yet computed")]
    ForwardReference { at: usize, operand: usize },
    #[error("return register {ret} out of range")]
    BadReturn { ret: usize },
    #[error("generator lists differ in length: {domain} vs {images}")]
    ImageCountMismatch { domain: usize, images: usize },
    #[error("kernel list is not closed under the group operations")]
    KernelNotClosed,
    #[error("no kernel adjustment satisfies the predicate")]
    NotFound,
    #[error(transparent)]
    Eval(#[from] BlackboxError),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Instr {
    /// Load generator by index.
    LoadGen(usize),
    /// Product of two earlier registers.
    Mul(usize, usize),
    /// Inverse of an earlier register.
    Inv(usize),
    /// Integer power of an earlier register.
    Pow(usize, i64),
}

/// A validated straight-line program with a designated return register.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Slp {
    arity: usize,
    instrs: Vec<Instr>,
    ret: usize,
}

impl Slp {
    pub fn from_instructions(
        arity: usize,
        instrs: Vec<Instr>,
        ret: usize,
    ) -> Result<Self, SlpError> {
        if arity == 0 {
            return Err(SlpError::ZeroArity);
        }
        if instrs.is_empty() {
            return Err(SlpError::EmptyProgram);
        }
        for (at, instr) in instrs.iter().enumerate() {
            let check = |operand: usize| {
                if operand >= at {
                    Err(SlpError::ForwardReference { at, operand })
                } else {
                    Ok(())
                }
            };
            match *instr {
                Instr::LoadGen(index) => {
                    if index >= arity {
                        return Err(SlpError::BadGenerator { index, arity });
                    }
                }
                Instr::Mul(a, b) => {
                    check(a)?;
                    check(b)?;
                }
                Instr::Inv(a) | Instr::Pow(a, _) => check(a)?,
            }
        }
        if ret >= instrs.len() {
            return Err(SlpError::BadReturn { ret });
        }
        Ok(Slp { arity, instrs, ret })
    }

    /// Program computing a word in the generators: each letter is a
    /// generator index with a sign. The empty word yields the identity.
    pub fn from_word(arity: usize, word: &[(usize, i64)]) -> Result<Self, SlpError> {
        let mut b = SlpBuilder::new(arity)?;
        let mut acc: Option<usize> = None;
        for &(index, sign) in word {
            let g = b.gen(index)?;
            let letter = match sign {
                1 => g,
                -1 => b.inv(g),
                e => b.pow(g, e),
            };
            acc = Some(match acc {
                None => letter,
                Some(prev) => b.mul(prev, letter),
            });
        }
        let ret = match acc {
            Some(r) => r,
            None => {
                let g = b.gen(0)?;
                b.pow(g, 0)
            }
        };
        Ok(b.finish(ret))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.instrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instrs.is_empty()
    }

    /// Evaluate over a concrete generator tuple.
    pub fn evaluate(&self, gens: &[GroupElement]) -> Result<GroupElement, SlpError> {
        if gens.len() != self.arity {
            return Err(SlpError::ArityMismatch {
                expected: self.arity,
                got: gens.len(),
            });
        }
        let mut regs: Vec<GroupElement> = Vec::with_capacity(self.instrs.len());
        for instr in &self.instrs {
            let value = match *instr {
                Instr::LoadGen(index) => gens[index].clone(),
                Instr::Mul(a, b) => regs[a].mul(&regs[b])?,
                Instr::Inv(a) => regs[a].inverse()?,
                Instr::Pow(a, e) => regs[a].pow(e)?,
            };
            regs.push(value);
        }
        Ok(regs.swap_remove(self.ret))
    }

    /// Splice a program for each generator symbol into this one. The result
    /// computes, over the inner generator tuple, what `self` computes over
    /// the values of `gens`. All `gens` must share one arity, which becomes
    /// the arity of the result.
    pub fn substitute(&self, gens: &[Slp]) -> Result<Slp, SlpError> {
        if gens.len() != self.arity {
            return Err(SlpError::ArityMismatch {
                expected: self.arity,
                got: gens.len(),
            });
        }
        let inner_arity = gens[0].arity;
        let mut instrs = Vec::new();
        let mut gen_reg = Vec::with_capacity(gens.len());
        for g in gens {
            if g.arity != inner_arity {
                return Err(SlpError::ArityMismatch {
                    expected: inner_arity,
                    got: g.arity,
                });
            }
            let base = instrs.len();
            for instr in &g.instrs {
                instrs.push(match *instr {
                    Instr::LoadGen(k) => Instr::LoadGen(k),
                    Instr::Mul(a, b) => Instr::Mul(a + base, b + base),
                    Instr::Inv(a) => Instr::Inv(a + base),
                    Instr::Pow(a, e) => Instr::Pow(a + base, e),
                });
            }
            gen_reg.push(base + g.ret);
        }
        let base = instrs.len();
        for instr in &self.instrs {
            instrs.push(match *instr {
                // A generator reference becomes an alias of the register
                // holding that generator's spliced value.
                Instr::LoadGen(k) => Instr::Pow(gen_reg[k], 1),
                Instr::Mul(a, b) => Instr::Mul(a + base, b + base),
                Instr::Inv(a) => Instr::Inv(a + base),
                Instr::Pow(a, e) => Instr::Pow(a + base, e),
            });
        }
        Slp::from_instructions(inner_arity, instrs, base + self.ret)
    }

    /// Render in the line-oriented text form accepted by `parse`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, instr) in self.instrs.iter().enumerate() {
            match *instr {
                Instr::LoadGen(i) => writeln!(out, "r{k} = g{i}"),
                Instr::Mul(a, b) => writeln!(out, "r{k} = r{a} * r{b}"),
                Instr::Inv(a) => writeln!(out, "r{k} = r{a}^-1"),
                Instr::Pow(a, e) => writeln!(out, "r{k} = r{a}^{e}"),
            }
            .expect("string writes cannot fail");
        }
        writeln!(out, "return r{}", self.ret).expect("string writes cannot fail");
        out
    }

    /// Parse the text form. Register labels may be arbitrary non-negative
    /// integers; they are remapped to instruction indices. Each label must
    /// be assigned exactly once, before any use.
    pub fn parse(text: &str, arity: usize) -> Result<Self, SlpError> {
        if arity == 0 {
            return Err(SlpError::ZeroArity);
        }
        let mut labels: BTreeMap<u64, usize> = BTreeMap::new();
        let mut instrs = Vec::new();
        let mut ret: Option<usize> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let stripped = raw.split('#').next().unwrap_or("").trim();
            if stripped.is_empty() {
                continue;
            }
            if ret.is_some() {
                return Err(SlpError::Parse {
                    line,
                    msg: "content after return".into(),
                });
            }
            if let Some(rest) = stripped.strip_prefix("return") {
                let label = parse_reg(rest.trim(), line)?;
                let reg = *labels
                    .get(&label)
                    .ok_or(SlpError::ReadBeforeWrite { line, label })?;
                ret = Some(reg);
                continue;
            }
            let (lhs, rhs) = stripped.split_once('=').ok_or_else(|| SlpError::Parse {
                line,
                msg: "expected `rK = ...` or `return rK`".into(),
            })?;
            let label = parse_reg(lhs.trim(), line)?;
            if labels.contains_key(&label) {
                return Err(SlpError::RegisterRewrite { line, label });
            }
            let rhs = rhs.trim();
            let resolve = |name: &str, labels: &BTreeMap<u64, usize>| -> Result<usize, SlpError> {
                let label = parse_reg(name.trim(), line)?;
                labels
                    .get(&label)
                    .copied()
                    .ok_or(SlpError::ReadBeforeWrite { line, label })
            };
            let instr = if let Some(gen) = rhs.strip_prefix('g') {
                let index: usize = gen.trim().parse().map_err(|_| SlpError::Parse {
                    line,
                    msg: format!("bad generator `{rhs}`"),
                })?;
                if index >= arity {
                    return Err(SlpError::BadGenerator { index, arity });
                }
                Instr::LoadGen(index)
            } else if let Some((a, b)) = rhs.split_once('*') {
                Instr::Mul(resolve(a, &labels)?, resolve(b, &labels)?)
            } else if let Some((a, e)) = rhs.split_once('^') {
                let exp: i64 = e.trim().parse().map_err(|_| SlpError::Parse {
                    line,
                    msg: format!("bad exponent `{}`", e.trim()),
                })?;
                let reg = resolve(a, &labels)?;
                if exp == -1 {
                    Instr::Inv(reg)
                } else {
                    Instr::Pow(reg, exp)
                }
            } else {
                return Err(SlpError::Parse {
                    line,
                    msg: format!("unrecognized right-hand side `{rhs}`"),
                });
            };
            labels.insert(label, instrs.len());
            instrs.push(instr);
        }
        let ret = ret.ok_or(SlpError::EmptyProgram)?;
        Slp::from_instructions(arity, instrs, ret)
    }
}

fn parse_reg(token: &str, line: usize) -> Result<u64, SlpError> {
    token
        .strip_prefix('r')
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| SlpError::Parse {
            line,
            msg: format!("expected register, got `{token}`"),
        })
}

/// Incremental program construction; returned handles are register indices.
pub struct SlpBuilder {
    arity: usize,
    instrs: Vec<Instr>,
}

impl SlpBuilder {
    pub fn new(arity: usize) -> Result<Self, SlpError> {
        if arity == 0 {
            return Err(SlpError::ZeroArity);
        }
        Ok(SlpBuilder {
            arity,
            instrs: Vec::new(),
        })
    }

    pub fn gen(&mut self, index: usize) -> Result<usize, SlpError> {
        if index >= self.arity {
            return Err(SlpError::BadGenerator {
                index,
                arity: self.arity,
            });
        }
        self.instrs.push(Instr::LoadGen(index));
        Ok(self.instrs.len() - 1)
    }

    pub fn mul(&mut self, a: usize, b: usize) -> usize {
        self.instrs.push(Instr::Mul(a, b));
        self.instrs.len() - 1
    }

    pub fn inv(&mut self, a: usize) -> usize {
        self.instrs.push(Instr::Inv(a));
        self.instrs.len() - 1
    }

    pub fn pow(&mut self, a: usize, e: i64) -> usize {
        self.instrs.push(Instr::Pow(a, e));
        self.instrs.len() - 1
    }

    pub fn finish(self, ret: usize) -> Slp {
        Slp::from_instructions(self.arity, self.instrs, ret)
            .expect("builder maintains the program invariants")
    }
}

/// A homomorphism presented by where the domain generators go.
pub struct HomByImages {
    domain_gens: Vec<GroupElement>,
    images: Vec<GroupElement>,
}

impl HomByImages {
    pub fn new(
        domain_gens: Vec<GroupElement>,
        images: Vec<GroupElement>,
    ) -> Result<Self, SlpError> {
        if domain_gens.len() != images.len() {
            return Err(SlpError::ImageCountMismatch {
                domain: domain_gens.len(),
                images: images.len(),
            });
        }
        if domain_gens.is_empty() {
            return Err(SlpError::EmptyProgram);
        }
        Ok(HomByImages {
            domain_gens,
            images,
        })
    }

    pub fn arity(&self) -> usize {
        self.domain_gens.len()
    }

    pub fn domain_gens(&self) -> &[GroupElement] {
        &self.domain_gens
    }

    pub fn images(&self) -> &[GroupElement] {
        &self.images
    }

    /// Value of a domain word written as a program.
    pub fn lift(&self, word: &Slp) -> Result<GroupElement, SlpError> {
        word.evaluate(&self.domain_gens)
    }

    /// Image of a domain word: the same program over the image tuple.
    pub fn transport(&self, word: &Slp) -> Result<GroupElement, SlpError> {
        word.evaluate(&self.images)
    }

    /// Check that every relator program vanishes on the images. Passing the
    /// domain relators here certifies the generator assignment extends to a
    /// homomorphism.
    pub fn respects_relators(&self, relators: &[Slp]) -> Result<bool, SlpError> {
        for r in relators {
            if !self.transport(r)?.is_identity() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Check a candidate kernel list: must contain the identity and be closed
/// under inversion and multiplication.
pub fn verify_kernel_closed(kernel: &[GroupElement]) -> Result<(), SlpError> {
    if kernel.is_empty() || !kernel.iter().any(|k| k.is_identity()) {
        return Err(SlpError::KernelNotClosed);
    }
    let member = |g: &GroupElement| kernel.contains(g);
    for a in kernel {
        if !member(&a.inverse()?) {
            return Err(SlpError::KernelNotClosed);
        }
        for b in kernel {
            if !member(&a.mul(b)?) {
                return Err(SlpError::KernelNotClosed);
            }
        }
    }
    Ok(())
}

/// Walk the coset w·K and return the first member satisfying `pred`.
///
/// This is how a preimage under a quotient map is corrected to the member
/// with a wanted property (a particular order, a specific value) when only
/// the coset is determined.
pub fn adjust_by_kernel<F>(
    w: &GroupElement,
    kernel: &[GroupElement],
    mut pred: F,
) -> Result<GroupElement, SlpError>
where
    F: FnMut(&GroupElement) -> Result<bool, SlpError>,
{
    for q in kernel {
        let candidate = w.mul(q)?;
        if pred(&candidate)? {
            return Ok(candidate);
        }
    }
    Err(SlpError::NotFound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blackbox::element_order;
    use crate::gf2::BitMatrix;
    use crate::perm::Permutation;

    fn perm(n: usize, cycles: &[&[usize]]) -> GroupElement {
        GroupElement::Perm(Permutation::from_cycles(n, cycles).unwrap())
    }

    fn s4_gens() -> Vec<GroupElement> {
        vec![perm(4, &[&[0, 1]]), perm(4, &[&[0, 1, 2, 3]])]
    }

    #[test]
    fn word_evaluation_matches_direct_product() {
        let gens = s4_gens();
        let slp = Slp::from_word(2, &[(0, 1), (1, 1), (0, -1)]).unwrap();
        let direct = gens[0]
            .mul(&gens[1])
            .unwrap()
            .mul(&gens[0].inverse().unwrap())
            .unwrap();
        assert_eq!(slp.evaluate(&gens).unwrap(), direct);
    }

    #[test]
    fn empty_word_is_identity() {
        let slp = Slp::from_word(2, &[]).unwrap();
        assert!(slp.evaluate(&s4_gens()).unwrap().is_identity());
    }

    #[test]
    fn text_round_trip() {
        let mut b = SlpBuilder::new(2).unwrap();
        let s = b.gen(0).unwrap();
        let t = b.gen(1).unwrap();
        let st = b.mul(s, t);
        let c = b.pow(st, 3);
        let ci = b.inv(c);
        let w = b.mul(ci, t);
        let slp = b.finish(w);
        let text = slp.to_text();
        let back = Slp::parse(&text, 2).unwrap();
        assert_eq!(back, slp);
        assert_eq!(back.evaluate(&s4_gens()).unwrap(), slp.evaluate(&s4_gens()).unwrap());
    }

    #[test]
    fn parse_accepts_sparse_labels() {
        let text = "r17 = g1\nr3 = r17 * r17\nr99 = r3^-1\nreturn r99\n";
        let slp = Slp::parse(text, 2).unwrap();
        let gens = s4_gens();
        let t2 = gens[1].mul(&gens[1]).unwrap();
        assert_eq!(slp.evaluate(&gens).unwrap(), t2.inverse().unwrap());
    }

    #[test]
    fn parse_rejects_rewrite_and_forward_reads() {
        let rewrite = "r0 = g0\nr0 = g1\nreturn r0\n";
        assert!(matches!(
            Slp::parse(rewrite, 2),
            Err(SlpError::RegisterRewrite { line: 2, label: 0 })
        ));
        let forward = "r0 = r1 * r1\nreturn r0\n";
        assert!(matches!(
            Slp::parse(forward, 2),
            Err(SlpError::ReadBeforeWrite { line: 1, label: 1 })
        ));
        let bad_gen = "r0 = g5\nreturn r0\n";
        assert!(matches!(
            Slp::parse(bad_gen, 2),
            Err(SlpError::BadGenerator { index: 5, arity: 2 })
        ));
    }

    #[test]
    fn power_instruction_handles_negatives_and_zero() {
        let gens = s4_gens();
        let mut b = SlpBuilder::new(2).unwrap();
        let t = b.gen(1).unwrap();
        let p = b.pow(t, -3);
        let slp = b.finish(p);
        let expected = gens[1].pow(-3).unwrap();
        assert_eq!(slp.evaluate(&gens).unwrap(), expected);

        let mut b = SlpBuilder::new(2).unwrap();
        let t = b.gen(1).unwrap();
        let z = b.pow(t, 0);
        let slp = b.finish(z);
        assert!(slp.evaluate(&gens).unwrap().is_identity());
    }

    #[test]
    fn quotient_of_s4_by_klein_four() {
        // S4 → S3 sending the transposition and 4-cycle to (1 2) and (0 2):
        // the action on the three 2+2 set partitions.
        let hom = HomByImages::new(
            s4_gens(),
            vec![perm(3, &[&[1, 2]]), perm(3, &[&[0, 2]])],
        )
        .unwrap();
        // Relators of the symmetric group on the pair: s², t⁴, (st)³.
        let s2 = Slp::parse("r0 = g0\nr1 = r0^2\nreturn r1\n", 2).unwrap();
        let t4 = Slp::parse("r0 = g1\nr1 = r0^4\nreturn r1\n", 2).unwrap();
        let st3 = Slp::parse("r0 = g0\nr1 = g1\nr2 = r0 * r1\nr3 = r2^3\nreturn r3\n", 2).unwrap();
        assert!(hom.respects_relators(&[s2, t4, st3]).unwrap());

        let word = Slp::from_word(2, &[(1, 1), (0, 1), (1, -1)]).unwrap();
        let lifted = hom.lift(&word).unwrap();
        let imaged = hom.transport(&word).unwrap();
        // The image of a product is the product of the images.
        let by_parts = hom.images()[1]
            .mul(&hom.images()[0])
            .unwrap()
            .mul(&hom.images()[1].inverse().unwrap())
            .unwrap();
        assert_eq!(imaged, by_parts);
        assert_eq!(element_order(&lifted).unwrap(), 2);

        // Kernel = the Klein four-group of double transpositions.
        let kernel = vec![
            perm(4, &[]),
            perm(4, &[&[0, 1], &[2, 3]]),
            perm(4, &[&[0, 2], &[1, 3]]),
            perm(4, &[&[0, 3], &[1, 2]]),
        ];
        verify_kernel_closed(&kernel).unwrap();
        // (0 1 2 3) has order 4 but its coset mod the kernel contains an
        // element of order 2 with the same image.
        let w = perm(4, &[&[0, 1, 2, 3]]);
        let fixed = adjust_by_kernel(&w, &kernel, |g| Ok(element_order(g)? == 2)).unwrap();
        assert_eq!(element_order(&fixed).unwrap(), 2);
    }

    /// 4×4 unitriangular matrices with nonzero entries above the diagonal
    /// only in row 0 and column 3: an extraspecial group of order 32.
    fn heisenberg_gen(a: bool, b: bool, c: bool, d: bool) -> GroupElement {
        let mut m = BitMatrix::identity(4).unwrap();
        m.set_entry(0, 1, a);
        m.set_entry(0, 2, b);
        m.set_entry(1, 3, c);
        m.set_entry(2, 3, d);
        GroupElement::Mat(m)
    }

    #[test]
    fn extraspecial_quotient_to_elementary_abelian() {
        let domain = vec![
            heisenberg_gen(true, false, false, false),
            heisenberg_gen(false, true, false, false),
            heisenberg_gen(false, false, true, false),
            heisenberg_gen(false, false, false, true),
        ];
        // Image: four commuting transpositions on eight points.
        let images = vec![
            perm(8, &[&[0, 1]]),
            perm(8, &[&[2, 3]]),
            perm(8, &[&[4, 5]]),
            perm(8, &[&[6, 7]]),
        ];
        let hom = HomByImages::new(domain.clone(), images).unwrap();
        // Squares and all pairwise commutators die in the quotient.
        let mut relators = Vec::new();
        for i in 0..4 {
            relators.push(Slp::from_word(4, &[(i, 2)]).unwrap());
            for j in (i + 1)..4 {
                relators.push(
                    Slp::from_word(4, &[(i, -1), (j, -1), (i, 1), (j, 1)]).unwrap(),
                );
            }
        }
        assert!(hom.respects_relators(&relators).unwrap());

        // The kernel is the two-element center.
        let mut z = BitMatrix::identity(4).unwrap();
        z.set_entry(0, 3, true);
        let center = GroupElement::Mat(z);
        let kernel = vec![domain[0].identity_like(), center.clone()];
        verify_kernel_closed(&kernel).unwrap();

        // x_a and x_c fail to commute, so x_a·x_c squares to the central
        // involution and both coset members have order 4: no adjustment
        // can reach order 2.
        let w = domain[0].mul(&domain[2]).unwrap();
        assert_eq!(element_order(&w).unwrap(), 4);
        assert!(matches!(
            adjust_by_kernel(&w, &kernel, |g| Ok(element_order(g)? == 2)),
            Err(SlpError::NotFound)
        ));
        // But the coset member equal to w·z is reachable by predicate.
        let target = w.mul(&center).unwrap();
        let found = adjust_by_kernel(&w, &kernel, |g| Ok(*g == target)).unwrap();
        assert_eq!(found, target);
    }

    #[test]
    fn substitute_splices_generator_programs() {
        let gens = s4_gens();
        // outer computes a^-1 * b * a over its two symbols
        let outer = Slp::from_word(2, &[(0, -1), (1, 1), (0, 1)]).unwrap();
        let inner_a = Slp::from_word(2, &[(1, 2)]).unwrap();
        let inner_b = Slp::from_word(2, &[(0, 1), (1, -1)]).unwrap();
        let spliced = outer.substitute(&[inner_a.clone(), inner_b.clone()]).unwrap();
        assert_eq!(spliced.arity(), 2);
        let a = inner_a.evaluate(&gens).unwrap();
        let b = inner_b.evaluate(&gens).unwrap();
        let expect = a.inverse().unwrap().mul(&b).unwrap().mul(&a).unwrap();
        assert_eq!(spliced.evaluate(&gens).unwrap(), expect);
        // round-trips through the text form
        let reparsed = Slp::parse(&spliced.to_text(), 2).unwrap();
        assert_eq!(reparsed.evaluate(&gens).unwrap(), expect);
    }

    #[test]
    fn substitute_rejects_mixed_arities() {
        let outer = Slp::from_word(2, &[(0, 1), (1, 1)]).unwrap();
        let one = Slp::from_word(1, &[(0, 1)]).unwrap();
        let two = Slp::from_word(2, &[(1, 1)]).unwrap();
        assert!(matches!(
            outer.substitute(&[one.clone()]),
            Err(SlpError::ArityMismatch { .. })
        ));
        assert!(matches!(
            outer.substitute(&[one, two]),
            Err(SlpError::ArityMismatch { .. })
        ));
    }
}
