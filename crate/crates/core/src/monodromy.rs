//! Abelian monodromy test: extension obstruction, stabilizer index and
//! minimal pullback degree.
//!
//! `ι: H₁(B;ℤ) → H₁(F;G)` is `α ↦ Σᵢ Tᵢα ⊗ gᵢ` where `Tᵢ` is the transfer
//! along the component `Dᵢ` followed by the push-forward to `F`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::abelian::{element_order, AbelianElement, FiniteAbelianGroup};
use crate::error::{Error, Result};
use crate::fibration::{FibrationComponent, GroupData, InvariantRow, VirtualFibration};
use crate::linalg::{image_cardinality, snf, stabilizer_lattice, IntMatrix, ModularMap};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentAction {
    /// `2f × 2b`, acting on column vectors.
    pub transfer_push: IntMatrix,
    pub weight: AbelianElement,
    pub d: u64,
    pub e: u64,
    pub r: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonodromyProblem {
    b: u64,
    f: u64,
    group: FiniteAbelianGroup,
    components: Vec<ComponentAction>,
    fibration: VirtualFibration,
}

/// A class in `H₁(F, punctures; G)`: free coordinates plus one boundary
/// coefficient per branch component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelativeClass {
    pub free_part: Vec<AbelianElement>,
    pub boundary: Vec<AbelianElement>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealizationReport {
    pub obstruction: AbelianElement,
    pub obstruction_order: u64,
    pub stabilizer_index: BigInt,
    pub minimal_degree: BigInt,
    pub realized: InvariantRow,
}

impl MonodromyProblem {
    pub fn new(b: u64, f: u64, group: FiniteAbelianGroup, components: Vec<ComponentAction>) -> Result<Self> {
        for (i, c) in components.iter().enumerate() {
            let t = &c.transfer_push;
            if t.rows() as u64 != 2 * f || t.cols() as u64 != 2 * b {
                return Err(Error::Dimension(format!(
                    "component {}: transfer matrix is {}x{}, expected {}x{}",
                    i + 1,
                    t.rows(),
                    t.cols(),
                    2 * f,
                    2 * b
                )));
            }
        }
        Self::assemble(b, f, group, components)
    }

    fn assemble(b: u64, f: u64, group: FiniteAbelianGroup, components: Vec<ComponentAction>) -> Result<Self> {
        let etale = components.iter().all(|c| c.d * (b - 1) == c.e * (f - 1));
        let vf_components = components
            .iter()
            .map(|c| FibrationComponent::new(c.d, c.e, c.r).with_weight(c.weight.clone()))
            .collect();
        let fibration = VirtualFibration::new(b, f, GroupData::Abelian(group.clone()), vf_components, etale)?;
        Ok(MonodromyProblem { b, f, group, components, fibration })
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn f(&self) -> u64 {
        self.f
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn components(&self) -> &[ComponentAction] {
        &self.components
    }

    pub fn fibration(&self) -> &VirtualFibration {
        &self.fibration
    }

    /// Number of coordinates of the base lattice the transfers act on.
    pub fn base_rank(&self) -> usize {
        self.components[0].transfer_push.cols()
    }

    /// `o(θ) = Σᵢ eᵢ·gᵢ`
    pub fn obstruction(&self) -> AbelianElement {
        self.components
            .iter()
            .fold(self.group.zero(), |acc, c| &acc + &c.weight.times(c.e as i64))
    }

    /// One integer matrix per cyclic factor `ℤ/n_j` of `G`: `A_j = Σᵢ cᵢⱼ Tᵢ`.
    pub fn iota_maps(&self) -> Vec<ModularMap> {
        let rows = 2 * self.f as usize;
        let cols = self.base_rank();
        self.group
            .factors()
            .iter()
            .enumerate()
            .map(|(j, &n)| {
                let mut a = IntMatrix::zeros(rows, cols);
                for c in &self.components {
                    let coef = BigInt::from(c.weight.coords()[j]);
                    if !coef.is_zero() {
                        a = &a + &c.transfer_push.scale(&coef);
                    }
                }
                ModularMap::new(a, n)
            })
            .collect()
    }

    /// `ι(α)` as `2f` elements of `G`.
    pub fn iota(&self, alpha: &[BigInt]) -> Result<Vec<AbelianElement>> {
        let mut out = vec![self.group.zero(); 2 * self.f as usize];
        for c in &self.components {
            let v = c.transfer_push.mul_vec(alpha)?;
            for (slot, x) in out.iter_mut().zip(v) {
                let k = x.mod_floor(&BigInt::from(self.group.exponent())).to_i64().unwrap_or(0);
                *slot = &*slot + &c.weight.times(k);
            }
        }
        Ok(out)
    }

    pub fn stabilizer_index(&self) -> Result<BigInt> {
        image_cardinality(&self.iota_maps())
    }

    /// Columns form a basis of `ker ι`.
    pub fn stabilizer_basis(&self) -> Result<IntMatrix> {
        stabilizer_lattice(&self.iota_maps())
    }

    pub fn minimal_pullback_degree(&self) -> Result<BigInt> {
        let o = BigInt::from(element_order(&self.obstruction()));
        Ok(o.lcm(&self.stabilizer_index()?))
    }

    pub fn realize(&self) -> Result<RealizationReport> {
        let obstruction = self.obstruction();
        let obstruction_order = element_order(&obstruction);
        let stabilizer_index = self.stabilizer_index()?;
        let minimal_degree = BigInt::from(obstruction_order).lcm(&stabilizer_index);
        let deg = minimal_degree
            .to_u64()
            .ok_or_else(|| Error::OutOfRange(format!("pullback degree {} is too large", minimal_degree)))?;
        let realized = self.fibration.realized_invariants(deg)?;
        Ok(RealizationReport { obstruction, obstruction_order, stabilizer_index, minimal_degree, realized })
    }

    /// Pulls back along the abelian cover of `B` whose homology image is a
    /// sublattice of `ker ι` of index `deg`. The transfers of the result act on
    /// that sublattice; `deg` must be a multiple of the stabilizer index.
    pub fn pullback(&self, deg: u64) -> Result<MonodromyProblem> {
        let index = self.stabilizer_index()?;
        let deg_big = BigInt::from(deg);
        if deg == 0 || !deg_big.is_multiple_of(&index) {
            return Err(Error::InvalidFibration(format!(
                "pullback degree {} is not a multiple of the stabilizer index {}",
                deg, index
            )));
        }
        let mut lattice = self.stabilizer_basis()?;
        let extra = &deg_big / &index;
        if lattice.cols() > 0 {
            for i in 0..lattice.rows() {
                let v = lattice.get(i, 0) * &extra;
                lattice.set(i, 0, v);
            }
        }
        let components = self
            .components
            .iter()
            .map(|c| -> Result<ComponentAction> {
                Ok(ComponentAction {
                    transfer_push: c.transfer_push.try_mul(&lattice)?,
                    e: c.e * deg,
                    ..c.clone()
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::assemble(deg * (self.b - 1) + 1, self.f, self.group.clone(), components)
    }

    /// The class `θ` whose boundary carries the weights of the problem.
    pub fn tautological_class(&self, free_part: Vec<AbelianElement>) -> RelativeClass {
        RelativeClass { free_part, boundary: self.components.iter().map(|c| c.weight.clone()).collect() }
    }

    /// `χ(α)★θ = θ + α̂(∂θ)`: the free part moves by `Σᵢ Tᵢα ⊗ hᵢ` where `hᵢ`
    /// is the boundary coefficient of `θ` on `Dᵢ`.
    pub fn apply_monodromy(&self, theta: &RelativeClass, alpha: &[BigInt]) -> Result<RelativeClass> {
        if theta.boundary.len() != self.components.len() {
            return Err(Error::MismatchedWeights(format!(
                "{} boundary coefficients for {} components",
                theta.boundary.len(),
                self.components.len()
            )));
        }
        if theta.free_part.len() != 2 * self.f as usize {
            return Err(Error::MismatchedWeights(format!(
                "free part has {} coordinates, expected {}",
                theta.free_part.len(),
                2 * self.f
            )));
        }
        if theta.boundary.iter().chain(&theta.free_part).any(|h| h.group() != &self.group) {
            return Err(Error::MismatchedWeights("coefficients lie in a different group".into()));
        }
        let mut free = theta.free_part.clone();
        let exp = BigInt::from(self.group.exponent());
        for (c, h) in self.components.iter().zip(&theta.boundary) {
            let v = c.transfer_push.mul_vec(alpha)?;
            for (slot, x) in free.iter_mut().zip(v) {
                let k = x.mod_floor(&exp).to_i64().unwrap_or(0);
                *slot = &*slot + &h.times(k);
            }
        }
        Ok(RelativeClass { free_part: free, boundary: theta.boundary.clone() })
    }
}

/// Index of a lattice given by basis columns; `None` when not of full rank.
pub fn lattice_index(basis: &IntMatrix) -> Option<BigInt> {
    let d = snf(basis);
    if d.rank() < basis.rows() {
        return None;
    }
    Some(d.diagonal.iter().product())
}
