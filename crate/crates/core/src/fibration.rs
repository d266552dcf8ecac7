//! Virtual Kodaira fibrations and their closed-form invariants.
//!
//! A component `Dᵢ` of the branch divisor in `F × B` has degree `dᵢ` over `B`
//! and `eᵢ` over `F`. Over a point of `B` the fibre `F` therefore meets `Dᵢ` in
//! `dᵢ` points, each with local ramification order `rᵢ`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::abelian::{element_order, AbelianElement, FiniteAbelianGroup};
use crate::error::{Error, Result};

pub type Rational = BigRational;

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FibrationComponent {
    pub d: u64,
    pub e: u64,
    pub r: u64,
    pub weight: Option<AbelianElement>,
}

impl FibrationComponent {
    pub fn new(d: u64, e: u64, r: u64) -> Self {
        FibrationComponent { d, e, r, weight: None }
    }

    pub fn with_weight(mut self, w: AbelianElement) -> Self {
        self.weight = Some(w);
        self
    }
}

/// The coefficient group: a concrete abelian group or only its order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupData {
    Abelian(FiniteAbelianGroup),
    Order(u64),
}

impl GroupData {
    pub fn order(&self) -> u64 {
        match self {
            GroupData::Abelian(g) => g.order(),
            GroupData::Order(n) => *n,
        }
    }

    pub fn abelian(&self) -> Option<&FiniteAbelianGroup> {
        match self {
            GroupData::Abelian(g) => Some(g),
            GroupData::Order(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VirtualFibration {
    pub b: u64,
    pub f: u64,
    pub group: GroupData,
    pub components: Vec<FibrationComponent>,
    pub etale_both_ways: bool,
}

/// Virtual Chern numbers, signature and slope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VirtualInvariants {
    pub c2: Rational,
    pub c1_sq: Rational,
    pub sigma: Rational,
    pub slope: Rational,
}

/// One line of the invariant table of a realized double Kodaira fibration.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InvariantRow {
    pub g_b1: BigInt,
    pub g_f1: BigInt,
    pub g_b2: BigInt,
    pub g_f2: BigInt,
    pub c2: BigInt,
    pub c1_sq: BigInt,
    pub sigma: BigInt,
    pub slope: Rational,
}

impl InvariantRow {
    pub const HEADER: [&'static str; 8] = ["g(B1)", "g(F1)", "g(B2)", "g(F2)", "c2", "c1^2", "sigma", "slope"];

    pub fn cells(&self) -> [String; 8] {
        [
            self.g_b1.to_string(),
            self.g_f1.to_string(),
            self.g_b2.to_string(),
            self.g_f2.to_string(),
            self.c2.to_string(),
            self.c1_sq.to_string(),
            self.sigma.to_string(),
            format_rational(&self.slope),
        ]
    }
}

impl fmt::Display for InvariantRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.cells().join(", "))
    }
}

/// `p/q`, or `p` for integers.
pub fn format_rational(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Schema(format!("not a rational number: {:?}", s));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(int(s.trim().parse::<BigInt>().map_err(|_| bad())?)),
    }
}

impl VirtualFibration {
    pub fn new(b: u64, f: u64, group: GroupData, components: Vec<FibrationComponent>, etale_both_ways: bool) -> Result<Self> {
        let vf = VirtualFibration { b, f, group, components, etale_both_ways };
        vf.check()?;
        Ok(vf)
    }

    fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidFibration(m));
        if self.b < 2 || self.f < 2 {
            return bad(format!("genera b={} and f={} must be at least 2", self.b, self.f));
        }
        if self.components.is_empty() {
            return bad("no branch components".into());
        }
        let n = self.group.order();
        if n < 2 {
            return bad("the group must be non-trivial".into());
        }
        for (i, c) in self.components.iter().enumerate() {
            if c.d == 0 || c.e == 0 {
                return bad(format!("component {}: degrees must be positive", i + 1));
            }
            if c.r < 2 || !n.is_multiple_of(c.r) {
                return bad(format!("component {}: ramification order {} does not divide |G|={}", i + 1, c.r, n));
            }
            if let Some(w) = &c.weight {
                match self.group.abelian() {
                    Some(g) if w.group() == g => {}
                    _ => return bad(format!("component {}: weight lies outside the coefficient group", i + 1)),
                }
                if element_order(w) != c.r {
                    return bad(format!(
                        "component {}: weight {} has order {} but r={}",
                        i + 1,
                        w,
                        element_order(w),
                        c.r
                    ));
                }
            }
            if self.etale_both_ways && c.d * (self.b - 1) != c.e * (self.f - 1) {
                return bad(format!(
                    "component {}: d(b-1) = {} differs from e(f-1) = {}",
                    i + 1,
                    c.d * (self.b - 1),
                    c.e * (self.f - 1)
                ));
            }
        }
        Ok(())
    }

    pub fn order(&self) -> u64 {
        self.group.order()
    }

    /// Each component is the graph of a map between the factors.
    pub fn is_graph_type(&self) -> bool {
        self.components.iter().all(|c| c.d == 1 || c.e == 1)
    }

    /// Genus of each component when both projections are unramified.
    pub fn component_genera(&self) -> Vec<u64> {
        self.components.iter().map(|c| c.d * (self.b - 1) + 1).collect()
    }

    fn weighted_sum(&self, by_d: bool, term: impl Fn(u64) -> Rational) -> Rational {
        self.components
            .iter()
            .map(|c| int(if by_d { c.d } else { c.e }) * term(c.r))
            .fold(Rational::zero(), |a, b| a + b)
    }

    pub fn virtual_invariants(&self) -> VirtualInvariants {
        let n = int(self.order());
        let e_b = int(2 - 2 * self.b as i64);
        let e_f = int(2 - 2 * self.f as i64);
        let punct = self.weighted_sum(true, |r| rat(r as i64 - 1, r as i64));
        let sq = self.weighted_sum(true, |r| rat(r as i64 * r as i64 - 1, r as i64 * r as i64));
        let c2 = &n * &e_b * (e_f - punct);
        let c1_sq = int(2) * &c2 - &n * &e_b * sq;
        let sigma = (&c1_sq - int(2) * &c2) / int(3);
        let slope = &c1_sq / &c2;
        VirtualInvariants { c2, c1_sq, sigma, slope }
    }

    /// `σ = (2/3)|G|(f−1)Σ eᵢ(1 − 1/rᵢ²)`, valid for double étale data.
    pub fn double_etale_signature(&self) -> Result<Rational> {
        if !self.etale_both_ways {
            return Err(Error::InvalidFibration("double étale flag is not set".into()));
        }
        let s = self.weighted_sum(false, |r| rat(r as i64 * r as i64 - 1, r as i64 * r as i64));
        Ok(rat(2, 3) * int(self.order()) * int(self.f - 1) * s)
    }

    /// `(2/3)|G|(b−1)Σ dᵢ(1 − 1/rᵢ²)`
    pub fn base_side_signature(&self) -> Rational {
        let s = self.weighted_sum(true, |r| rat(r as i64 * r as i64 - 1, r as i64 * r as i64));
        rat(2, 3) * int(self.order()) * int(self.b - 1) * s
    }

    /// Étale pullback along a degree `deg` cover of the base.
    pub fn pullback(&self, deg: u64) -> Result<VirtualFibration> {
        if deg == 0 {
            return Err(Error::InvalidFibration("pullback degree must be positive".into()));
        }
        let components = self
            .components
            .iter()
            .map(|c| FibrationComponent { e: c.e * deg, ..c.clone() })
            .collect();
        VirtualFibration::new(deg * (self.b - 1) + 1, self.f, self.group.clone(), components, self.etale_both_ways)
    }

    /// Invariants of the fibration obtained after pulling back by `deg`.
    pub fn realized_invariants(&self, deg: u64) -> Result<InvariantRow> {
        let n = self.order() as i64;
        let pb = self.pullback(deg)?;
        let g_b1 = pb.b as i64;
        let genus = |twice: Rational, what: &str| -> Result<BigInt> {
            let g = (twice + int(2)) / int(2);
            if !g.is_integer() || g.is_negative() {
                return Err(Error::NonIntegralGenus(format!("{} = {}", what, format_rational(&g))));
            }
            Ok(g.to_integer())
        };
        let ram = |by_d: bool| self.weighted_sum(by_d, |r| rat(r as i64 - 1, r as i64));
        let g_f1 = genus(int(n) * (int(2 * self.f as i64 - 2) + ram(true)), "g(F1)")?;
        let g_f2 = genus(int(n) * (int(2 * g_b1 - 2) + int(deg) * ram(false)), "g(F2)")?;
        let inv = pb.virtual_invariants();
        let whole = |x: &Rational, what: &str| -> Result<BigInt> {
            if !x.is_integer() {
                return Err(Error::NonIntegralGenus(format!("{} = {}", what, format_rational(x))));
            }
            Ok(x.to_integer())
        };
        Ok(InvariantRow {
            g_b1: BigInt::from(g_b1),
            g_f1,
            g_b2: BigInt::from(self.f),
            g_f2,
            c2: whole(&inv.c2, "c2")?,
            c1_sq: whole(&inv.c1_sq, "c1^2")?,
            sigma: whole(&inv.sigma, "sigma")?,
            slope: inv.slope,
        })
    }
}

/// Outcome of [`free_action_possible`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FreeAction {
    Impossible,
    /// Euler characteristic allows a quotient of genus `quotient_genus`;
    /// existence for non-abelian groups is not decided.
    NecessaryConditionsMet { quotient_genus: u64 },
    ExistsAbelian { quotient_genus: u64 },
}

/// Whether a group of order `n` can act freely on a curve of genus `g`.
///
/// Passing `abelian` decides existence for that abelian group, which then
/// needs at most `2q` generators.
pub fn free_action_possible(g: u64, n: u64, abelian: Option<&FiniteAbelianGroup>) -> FreeAction {
    if g < 2 || n == 0 || !(2 * g - 2).is_multiple_of(n) {
        return FreeAction::Impossible;
    }
    let k = (2 * g - 2) / n;
    if !k.is_multiple_of(2) || k < 2 {
        return FreeAction::Impossible;
    }
    let quotient_genus = k / 2 + 1;
    match abelian {
        None => FreeAction::NecessaryConditionsMet { quotient_genus },
        Some(a) if a.order() != n => FreeAction::Impossible,
        Some(a) if a.min_generators() as u64 <= 2 * quotient_genus => FreeAction::ExistsAbelian { quotient_genus },
        Some(_) => FreeAction::Impossible,
    }
}

impl VirtualInvariants {
    pub fn sigma_is_integral(&self) -> bool {
        self.sigma.is_integer()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(b: u64, f: u64, n: u64, rs: &[u64]) -> VirtualFibration {
        let comps = rs.iter().map(|&r| FibrationComponent::new(1, 1, r)).collect();
        VirtualFibration::new(b, f, GroupData::Order(n), comps, false).unwrap()
    }

    #[test]
    fn graph_signatures() {
        assert_eq!(graph(3, 3, 2, &[2, 2]).virtual_invariants().sigma, int(4));
        assert_eq!(graph(2, 2, 3, &[3, 3, 3]).virtual_invariants().sigma, rat(16, 3));
    }

    #[test]
    fn double_etale() {
        let vf = VirtualFibration::new(2, 2, GroupData::Order(2), vec![FibrationComponent::new(4, 4, 2)], true).unwrap();
        assert_eq!(vf.double_etale_signature().unwrap(), int(4));
        assert_eq!(vf.virtual_invariants().sigma, int(4));
        let g4 = VirtualFibration::new(
            3,
            2,
            GroupData::Order(2),
            vec![FibrationComponent::new(1, 2, 2), FibrationComponent::new(1, 2, 2)],
            true,
        )
        .unwrap();
        assert_eq!(g4.virtual_invariants().sigma, int(4));
        assert_eq!(g4.double_etale_signature().unwrap(), int(4));
        assert!(graph(2, 2, 2, &[2]).double_etale_signature().is_err());
    }

    #[test]
    fn rejects_inconsistent_data() {
        let c = vec![FibrationComponent::new(2, 1, 2)];
        assert!(VirtualFibration::new(3, 3, GroupData::Order(2), c, true).is_err());
        let c = vec![FibrationComponent::new(1, 1, 3)];
        assert!(VirtualFibration::new(3, 3, GroupData::Order(2), c, false).is_err());
        let z2 = FiniteAbelianGroup::cyclic(2).unwrap();
        let c = vec![FibrationComponent::new(1, 1, 2).with_weight(z2.zero())];
        assert!(VirtualFibration::new(3, 3, GroupData::Abelian(z2), c, false).is_err());
    }

    #[test]
    fn pullback_scales_signature() {
        let vf = graph(3, 3, 2, &[2, 2]);
        let pb = vf.pullback(4).unwrap();
        assert_eq!(pb.b, 9);
        assert_eq!(pb.virtual_invariants().sigma, int(16));
        assert_eq!(vf.pullback(1).unwrap().virtual_invariants(), vf.virtual_invariants());
    }

    #[test]
    fn realized_rows() {
        let row = graph(2, 2, 3, &[3, 3, 3]).realized_invariants(9).unwrap();
        assert_eq!(row.cells(), ["10", "7", "2", "55", "216", "576", "48", "8/3"].map(String::from));
        let vf = VirtualFibration::new(2, 2, GroupData::Order(2), vec![FibrationComponent::new(2, 2, 2)], true).unwrap();
        let row = vf.realized_invariants(8).unwrap();
        assert_eq!(row.cells(), ["9", "4", "2", "25", "96", "240", "16", "5/2"].map(String::from));
        let row = graph(3, 3, 2, &[2, 2, 2, 2]).realized_invariants(2).unwrap();
        assert_eq!(row.cells(), ["5", "7", "3", "13", "96", "240", "16", "5/2"].map(String::from));
    }

    #[test]
    fn free_actions() {
        assert_eq!(free_action_possible(5, 8, None), FreeAction::Impossible);
        assert_eq!(free_action_possible(2, 2, None), FreeAction::Impossible);
        let v4 = FiniteAbelianGroup::new(vec![2, 2]).unwrap();
        assert_eq!(free_action_possible(5, 4, Some(&v4)), FreeAction::ExistsAbelian { quotient_genus: 2 });
        assert_eq!(free_action_possible(3, 2, None), FreeAction::NecessaryConditionsMet { quotient_genus: 2 });
        let big = FiniteAbelianGroup::new(vec![2; 5]).unwrap();
        assert_eq!(free_action_possible(33, 32, Some(&big)), FreeAction::Impossible);
    }

    #[test]
    fn rationals() {
        assert_eq!(format_rational(&rat(5, 2)), "5/2");
        assert_eq!(format_rational(&int(-4)), "-4");
        assert_eq!(parse_rational("23/10").unwrap(), rat(23, 10));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
