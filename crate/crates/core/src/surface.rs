//! Orbifold surface groups, generating vectors and the homology of the associated covers.
//!
//! The orbifold group of signature `(q | r₁..r_m)` is
//! `⟨α₁..α_q, β₁..β_q, γ₁..γ_m | ∏[αᵢ,βᵢ]·∏γⱼ, γⱼ^{rⱼ}⟩` with `[a,b] = a b a⁻¹ b⁻¹`.
//! Generators are numbered α₁..α_q, β₁..β_q, γ₁..γ_m.

use std::collections::VecDeque;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::FiniteGroupModel;
use crate::linalg::{snf, IntMatrix};
use crate::poly::IntPoly;

pub const MAX_GROUP_ORDER: usize = 128;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbifoldSignature {
    pub q: u32,
    #[serde(default)]
    pub periods: Vec<u32>,
}

impl OrbifoldSignature {
    pub fn new(q: u32, periods: Vec<u32>) -> Result<Self> {
        if let Some(r) = periods.iter().find(|&&r| r < 2) {
            return Err(Error::InvalidGeneratingVector(format!("period {} must be at least 2", r)));
        }
        Ok(OrbifoldSignature { q, periods })
    }

    pub fn generator_count(&self) -> usize {
        2 * self.q as usize + self.periods.len()
    }

    pub fn generator_name(&self, k: usize) -> String {
        let q = self.q as usize;
        if k < q {
            format!("α{}", k + 1)
        } else if k < 2 * q {
            format!("β{}", k - q + 1)
        } else {
            format!("γ{}", k - 2 * q + 1)
        }
    }

    /// Defining relators: the long relation first, then `γⱼ^{rⱼ}`.
    pub fn relators(&self) -> Vec<Word> {
        let q = self.q as usize;
        let mut long = Vec::new();
        for i in 0..q {
            let (a, b) = (i, q + i);
            long.extend([Letter::pos(a), Letter::pos(b), Letter::neg(a), Letter::neg(b)]);
        }
        for j in 0..self.periods.len() {
            long.push(Letter::pos(2 * q + j));
        }
        let mut out = vec![long];
        for (j, &r) in self.periods.iter().enumerate() {
            out.push(vec![Letter::pos(2 * q + j); r as usize]);
        }
        out
    }
}

impl fmt::Display for OrbifoldSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p: Vec<String> = self.periods.iter().map(u32::to_string).collect();
        if p.is_empty() {
            write!(f, "({}|-)", self.q)
        } else {
            write!(f, "({}|{})", self.q, p.join(","))
        }
    }
}

/// A generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn pos(generator: usize) -> Self {
        Letter { generator, inverse: false }
    }

    pub fn neg(generator: usize) -> Self {
        Letter { generator, inverse: true }
    }

    pub fn inverted(self) -> Self {
        Letter { generator: self.generator, inverse: !self.inverse }
    }
}

pub type Word = Vec<Letter>;

pub fn invert_word(w: &[Letter]) -> Word {
    w.iter().rev().map(|l| l.inverted()).collect()
}

/// Images of the orbifold generators in a finite group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratingVector {
    pub signature: OrbifoldSignature,
    pub group: FiniteGroupModel,
    /// Group element indices for α₁..α_q, β₁..β_q, γ₁..γ_m.
    pub images: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValidationIssue {
    ImageCount { expected: usize, found: usize },
    UnknownElement { position: usize, index: usize },
    LongRelation { product: String },
    PeriodMismatch { position: usize, period: u32, order: usize },
    NotSurjective { generated: usize, order: usize },
    GroupTooLarge { order: usize },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::ImageCount { expected, found } => {
                write!(f, "expected {} generator images, found {}", expected, found)
            }
            ValidationIssue::UnknownElement { position, index } => {
                write!(f, "image {} refers to element {} outside the group", position, index)
            }
            ValidationIssue::LongRelation { product } => {
                write!(f, "long relation evaluates to {} instead of the identity", product)
            }
            ValidationIssue::PeriodMismatch { position, period, order } => {
                write!(f, "γ{} has order {} but period {}", position + 1, order, period)
            }
            ValidationIssue::NotSurjective { generated, order } => {
                write!(f, "images generate a subgroup of order {} in a group of order {}", generated, order)
            }
            ValidationIssue::GroupTooLarge { order } => {
                write!(f, "group order {} exceeds the supported {}", order, MAX_GROUP_ORDER)
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

impl GeneratingVector {
    pub fn new(signature: OrbifoldSignature, group: FiniteGroupModel, images: Vec<usize>) -> Self {
        GeneratingVector { signature, group, images }
    }

    /// Product of the images along a word.
    pub fn evaluate(&self, w: &[Letter]) -> usize {
        w.iter().fold(self.group.identity(), |acc, l| {
            let x = self.images[l.generator];
            self.group.mul(acc, if l.inverse { self.group.inv(x) } else { x })
        })
    }

    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();
        let n = self.group.order();
        let expected = self.signature.generator_count();
        if self.images.len() != expected {
            issues.push(ValidationIssue::ImageCount { expected, found: self.images.len() });
            return ValidationReport { issues };
        }
        for (position, &index) in self.images.iter().enumerate() {
            if index >= n {
                issues.push(ValidationIssue::UnknownElement { position, index });
            }
        }
        if !issues.is_empty() {
            return ValidationReport { issues };
        }
        let long = self.evaluate(&self.signature.relators()[0]);
        if long != self.group.identity() {
            issues.push(ValidationIssue::LongRelation { product: self.group.label(long) });
        }
        let q = self.signature.q as usize;
        for (j, &r) in self.signature.periods.iter().enumerate() {
            let order = self.group.element_order(self.images[2 * q + j]);
            if order != r as usize {
                issues.push(ValidationIssue::PeriodMismatch { position: j, period: r, order });
            }
        }
        let generated = self.group.generated(&self.images).iter().filter(|&&b| b).count();
        if generated != n {
            issues.push(ValidationIssue::NotSurjective { generated, order: n });
        }
        if n > MAX_GROUP_ORDER {
            issues.push(ValidationIssue::GroupTooLarge { order: n });
        }
        ValidationReport { issues }
    }

    fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            let msgs: Vec<String> = report.issues.iter().map(|i| i.to_string()).collect();
            Err(Error::InvalidGeneratingVector(msgs.join("; ")))
        }
    }

    pub fn cover_genus(&self) -> Result<u64> {
        cover_genus(&self.signature, self.group.order() as u64)
    }
}

/// Riemann–Hurwitz: `2b − 2 = n(2q − 2 + Σ(1 − 1/rⱼ))`.
pub fn cover_genus(sig: &OrbifoldSignature, n: u64) -> Result<u64> {
    let n = n as i128;
    let mut twice = n * (2 * sig.q as i128 - 2);
    for &r in &sig.periods {
        let r = r as i128;
        if n % r != 0 {
            return Err(Error::NonIntegralGenus(format!("period {} does not divide {}", r, n)));
        }
        twice += n - n / r;
    }
    if twice % 2 != 0 || twice < -2 {
        return Err(Error::NonIntegralGenus(format!("2b-2 = {} for {} over {}", twice, n, sig)));
    }
    Ok(((twice + 2) / 2) as u64)
}

/// Order in which the Schreier tree explores generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TransversalOrder {
    /// α's, β's, γ's.
    #[default]
    Standard,
    Reversed,
}

/// Schreier generator `t_c · x · t_{c·x}⁻¹`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SchreierGenerator {
    pub coset: usize,
    pub generator: usize,
}

/// Presentation of `ker ρ` from one Reidemeister–Schreier pass.
#[derive(Clone, Debug)]
pub struct KernelPresentation {
    pub cosets: usize,
    /// Transversal word for every coset (group element).
    pub transversal: Vec<Word>,
    /// Free generators: the Schreier generators off the spanning tree.
    pub generators: Vec<SchreierGenerator>,
    /// Rewritten relators as sequences of `(generator index, ±1)`.
    pub relators: Vec<Vec<(usize, i8)>>,
    /// Invariant factors of the abelianization (`0` for each free summand).
    pub abelianization: Vec<BigInt>,
}

struct Schreier<'a> {
    gv: &'a GeneratingVector,
    ngens: usize,
    transversal: Vec<Word>,
    /// symbol (coset * ngens + gen) → column index, None on tree edges
    column: Vec<Option<usize>>,
    symbols: Vec<SchreierGenerator>,
}

impl<'a> Schreier<'a> {
    fn build(gv: &'a GeneratingVector, order: TransversalOrder) -> Self {
        let n = gv.group.order();
        let ngens = gv.signature.generator_count();
        let mut gens: Vec<usize> = (0..ngens).collect();
        if order == TransversalOrder::Reversed {
            gens.reverse();
        }
        let e = gv.group.identity();
        let mut transversal: Vec<Option<Word>> = vec![None; n];
        transversal[e] = Some(Vec::new());
        let mut tree = vec![false; n * ngens];
        let mut queue = VecDeque::from([e]);
        while let Some(c) = queue.pop_front() {
            for &x in &gens {
                let d = gv.group.mul(c, gv.images[x]);
                if transversal[d].is_none() {
                    let mut w = transversal[c].clone().unwrap();
                    w.push(Letter::pos(x));
                    transversal[d] = Some(w);
                    tree[c * ngens + x] = true;
                    queue.push_back(d);
                }
            }
        }
        let mut column = vec![None; n * ngens];
        let mut symbols = Vec::new();
        for c in 0..n {
            for x in 0..ngens {
                if !tree[c * ngens + x] {
                    column[c * ngens + x] = Some(symbols.len());
                    symbols.push(SchreierGenerator { coset: c, generator: x });
                }
            }
        }
        Schreier {
            gv,
            ngens,
            transversal: transversal.into_iter().map(|w| w.expect("images generate")).collect(),
            column,
            symbols,
        }
    }

    fn rewrite(&self, start: usize, w: &[Letter]) -> (usize, Vec<(usize, i8)>) {
        let g = &self.gv.group;
        let mut c = start;
        let mut out = Vec::new();
        for l in w {
            let x = self.gv.images[l.generator];
            if l.inverse {
                c = g.mul(c, g.inv(x));
                if let Some(col) = self.column[c * self.ngens + l.generator] {
                    out.push((col, -1));
                }
            } else {
                if let Some(col) = self.column[c * self.ngens + l.generator] {
                    out.push((col, 1));
                }
                c = g.mul(c, x);
            }
        }
        (c, out)
    }

    fn abelian_rewrite(&self, start: usize, w: &[Letter]) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.symbols.len()];
        for (col, s) in self.rewrite(start, w).1 {
            v[col] += s as i32;
        }
        v
    }

    fn relators(&self) -> Vec<Vec<(usize, i8)>> {
        let rels = self.gv.signature.relators();
        let mut out = Vec::new();
        for c in 0..self.gv.group.order() {
            for r in &rels {
                let (end, word) = self.rewrite(c, r);
                debug_assert_eq!(end, c);
                out.push(word);
            }
        }
        out
    }

    fn symbol_word(&self, s: SchreierGenerator) -> Word {
        let mut w = self.transversal[s.coset].clone();
        w.push(Letter::pos(s.generator));
        let d = self.gv.group.mul(s.coset, self.gv.images[s.generator]);
        w.extend(invert_word(&self.transversal[d]));
        w
    }
}

fn relation_matrix(s: &Schreier<'_>, relators: &[Vec<(usize, i8)>]) -> IntMatrix {
    let cols = s.symbols.len();
    let mut m = IntMatrix::zeros(relators.len(), cols);
    for (i, r) in relators.iter().enumerate() {
        for &(col, sign) in r {
            let v = m.get(i, col) + BigInt::from(sign);
            m.set(i, col, v);
        }
    }
    m
}

pub fn kernel_presentation(gv: &GeneratingVector) -> Result<KernelPresentation> {
    gv.ensure_valid()?;
    let s = Schreier::build(gv, TransversalOrder::Standard);
    let relators = s.relators();
    let d = snf(&relation_matrix(&s, &relators));
    let rank = d.rank();
    let mut abelianization: Vec<BigInt> = d.diagonal[..rank].iter().filter(|x| !x.is_one()).cloned().collect();
    abelianization.extend(std::iter::repeat_n(BigInt::zero(), s.symbols.len() - rank));
    Ok(KernelPresentation {
        cosets: gv.group.order(),
        transversal: s.transversal.clone(),
        generators: s.symbols.clone(),
        relators,
        abelianization,
    })
}

/// First homology of the cover `ker ρ` with a fixed basis, ready to compute actions.
pub struct CoverHomology<'a> {
    schreier: Schreier<'a>,
    genus: usize,
    /// columns of V spanning the free part
    to_basis: IntMatrix,
    /// rows of V⁻¹: basis classes as symbol vectors
    from_basis: IntMatrix,
}

impl<'a> CoverHomology<'a> {
    pub fn new(gv: &'a GeneratingVector) -> Result<Self> {
        Self::with_order(gv, TransversalOrder::Standard)
    }

    pub fn with_order(gv: &'a GeneratingVector, order: TransversalOrder) -> Result<Self> {
        gv.ensure_valid()?;
        let s = Schreier::build(gv, order);
        let relators = s.relators();
        let d = snf(&relation_matrix(&s, &relators));
        let torsion: Vec<String> = d
            .diagonal
            .iter()
            .filter(|x| !x.is_zero() && !x.is_one())
            .map(|x| x.to_string())
            .collect();
        if !torsion.is_empty() {
            return Err(Error::KernelTorsion(torsion));
        }
        let r = d.rank();
        let cols = s.symbols.len();
        let genus = cols - r;
        let expected = 2 * gv.cover_genus()? as usize;
        if genus != expected {
            return Err(Error::InvalidGeneratingVector(format!(
                "abelianized kernel has rank {} but the cover genus predicts {}",
                genus, expected
            )));
        }
        let mut to_basis = IntMatrix::zeros(cols, genus);
        let mut from_basis = IntMatrix::zeros(genus, cols);
        for i in 0..cols {
            for j in 0..genus {
                to_basis.set(i, j, d.right.get(i, r + j).clone());
                from_basis.set(j, i, d.right_inverse().get(r + j, i).clone());
            }
        }
        Ok(CoverHomology { schreier: s, genus: genus / 2, to_basis, from_basis })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    /// Coordinates of the class of a kernel word.
    pub fn class_of(&self, w: &[Letter]) -> Result<Vec<BigInt>> {
        let (end, _) = self.schreier.rewrite(self.schreier.gv.group.identity(), w);
        if end != self.schreier.gv.group.identity() {
            return Err(Error::InvalidGeneratingVector("word is not in the kernel".into()));
        }
        let v = self.schreier.abelian_rewrite(self.schreier.gv.group.identity(), w);
        let row = IntMatrix::new(1, v.len(), v)?;
        Ok(row.try_mul(&self.to_basis)?.entries().to_vec())
    }

    /// Matrix of `η ↦ ℓηℓ⁻¹` on column vectors, for any lift `ℓ` of `k`.
    pub fn action(&self, k: usize) -> Result<IntMatrix> {
        let gv = self.schreier.gv;
        if k >= gv.group.order() {
            return Err(Error::InvalidGeneratingVector(format!("element {} is not in the group", k)));
        }
        let lift = &self.schreier.transversal[k];
        let lift_inv = invert_word(lift);
        let cols = self.schreier.symbols.len();
        let mut images = IntMatrix::zeros(cols, cols);
        let e = gv.group.identity();
        for (i, &sym) in self.schreier.symbols.iter().enumerate() {
            let mut w = lift.clone();
            w.extend(self.schreier.symbol_word(sym));
            w.extend(lift_inv.iter().copied());
            for (j, v) in self.schreier.abelian_rewrite(e, &w).into_iter().enumerate() {
                images.set(i, j, v);
            }
        }
        let rowwise = self.from_basis.try_mul(&images)?.try_mul(&self.to_basis)?;
        Ok(rowwise.transpose())
    }
}

pub fn homology_action(gv: &GeneratingVector, k: usize) -> Result<IntMatrix> {
    CoverHomology::new(gv)?.action(k)
}

/// `(x^d−1)^{2q−2+m}(x−1)² / ∏(x^{d/rᵢ}−1)`
pub fn nielsen_charpoly(q: u32, d: u32, periods: &[u32]) -> Result<IntPoly> {
    let e = 2 * q as i64 - 2 + periods.len() as i64;
    let xd = IntPoly::x_pow_minus_one(d as usize);
    let x1 = IntPoly::x_pow_minus_one(1);
    let num = &x1.pow(2) * &xd.pow(e.max(0) as u32);
    let mut den = xd.pow((-e).max(0) as u32);
    for &r in periods {
        if r == 0 || !d.is_multiple_of(r) {
            return Err(Error::InexactDivision(format!("period {} does not divide {}", r, d)));
        }
        den = &den * &IntPoly::x_pow_minus_one((d / r) as usize);
    }
    num.div_exact(&den)
}
