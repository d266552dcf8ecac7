//! Problem files: versioned JSON documents carrying one payload per kind.
//!
//! Matrices are lists of rows and act on column vectors. Group elements are
//! written as labels: coordinates such as `"1"` or `"(1,0)"` for abelian
//! groups, or the labels of a bundled multiplication table.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use kodaira_core::fibration::{FibrationComponent, GroupData, VirtualFibration};
use kodaira_core::group::{bundled, FiniteGroupModel};
use kodaira_core::monodromy::{ComponentAction, MonodromyProblem};
use kodaira_core::surface::{homology_action, GeneratingVector, OrbifoldSignature};
use kodaira_core::{AbelianElement, FiniteAbelianGroup, IntMatrix};

use crate::Failure;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    VirtualFibration,
    MonodromyProblem,
    GeneratingVector,
    EnumerationRequest,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope {
    schema_version: u32,
    kind: Kind,
    payload: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    corpus: Option<CorpusMeta>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupSpec {
    Cyclic(u64),
    Abelian(Vec<u64>),
    /// Only the order; enough for virtual invariants.
    Order(u64),
    /// A bundled multiplication table.
    Table(String),
}

pub type Matrix = Vec<Vec<i64>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FibrationComponentSpec {
    pub d: u64,
    pub e: u64,
    pub r: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VirtualFibrationSpec {
    pub b: u64,
    pub f: u64,
    pub group: GroupSpec,
    pub components: Vec<FibrationComponentSpec>,
    pub etale_both_ways: bool,
    /// Also report the invariants after an étale pullback of this degree.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pullback_degree: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonodromyComponentSpec {
    pub d: u64,
    pub e: u64,
    pub r: u64,
    pub weight: String,
    /// `2f × 2b` transfer followed by push-forward.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transfer: Option<Matrix>,
    /// Factors whose product, left to right, is the transfer.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transfer_product: Option<Vec<Matrix>>,
    /// Graph of a deck transformation of `cover`, acting on its homology.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deck_element: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonodromySpec {
    pub b: u64,
    pub f: u64,
    pub group: GroupSpec,
    pub components: Vec<MonodromyComponentSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cover: Option<GeneratingVectorSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratingVectorSpec {
    pub q: u32,
    pub periods: Vec<u32>,
    pub group: GroupSpec,
    /// Images of `α₁..α_q, β₁..β_q, γ₁..γₘ`.
    pub images: Vec<String>,
    /// Elements whose action on the homology of the cover is reported.
    pub elements: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum TableKind {
    Graph,
    Sig4,
    Fpf,
    Nielsen,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnumerationSpec {
    pub table: TableKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_max: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus_max: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedRow {
    pub g_b1: u64,
    pub g_f1: u64,
    pub g_b2: u64,
    pub g_f2: u64,
    pub c2: u64,
    pub c1_sq: u64,
    pub sigma: u64,
    pub slope: String,
}

impl ExpectedRow {
    pub fn cells(&self) -> [String; 8] {
        [
            self.g_b1.to_string(),
            self.g_f1.to_string(),
            self.g_b2.to_string(),
            self.g_f2.to_string(),
            self.c2.to_string(),
            self.c1_sq.to_string(),
            self.sigma.to_string(),
            self.slope.clone(),
        ]
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stabilizer_index: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minimal_degree: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub row: Option<ExpectedRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub charpoly: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusMeta {
    pub id: String,
    pub description: String,
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<Expected>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Problem {
    VirtualFibration(VirtualFibrationSpec),
    Monodromy(MonodromySpec),
    GeneratingVector(GeneratingVectorSpec),
    Enumeration(EnumerationSpec),
}

impl Problem {
    pub fn kind(&self) -> Kind {
        match self {
            Problem::VirtualFibration(_) => Kind::VirtualFibration,
            Problem::Monodromy(_) => Kind::MonodromyProblem,
            Problem::GeneratingVector(_) => Kind::GeneratingVector,
            Problem::Enumeration(_) => Kind::EnumerationRequest,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemFile {
    pub problem: Problem,
    pub corpus: Option<CorpusMeta>,
}

fn schema<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Schema(e.to_string())
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, Failure> {
        let env: Envelope = serde_json::from_str(text).map_err(schema)?;
        if env.schema_version != SCHEMA_VERSION {
            return Err(Failure::Schema(format!(
                "unsupported schema_version {} (expected {})",
                env.schema_version, SCHEMA_VERSION
            )));
        }
        let p = env.payload;
        let problem = match env.kind {
            Kind::VirtualFibration => Problem::VirtualFibration(serde_json::from_value(p).map_err(schema)?),
            Kind::MonodromyProblem => Problem::Monodromy(serde_json::from_value(p).map_err(schema)?),
            Kind::GeneratingVector => Problem::GeneratingVector(serde_json::from_value(p).map_err(schema)?),
            Kind::EnumerationRequest => Problem::Enumeration(serde_json::from_value(p).map_err(schema)?),
        };
        Ok(ProblemFile { problem, corpus: env.corpus })
    }

    pub fn id(&self) -> Option<&str> {
        self.corpus.as_ref().map(|c| c.id.as_str())
    }

    pub fn expected(&self) -> Option<&Expected> {
        self.corpus.as_ref().and_then(|c| c.expected.as_ref())
    }

    /// Sorted keys, two-space indentation, trailing newline.
    pub fn to_canonical_json(&self) -> String {
        let payload = match &self.problem {
            Problem::VirtualFibration(s) => serde_json::to_value(s),
            Problem::Monodromy(s) => serde_json::to_value(s),
            Problem::GeneratingVector(s) => serde_json::to_value(s),
            Problem::Enumeration(s) => serde_json::to_value(s),
        }
        .expect("payloads serialize");
        let env = Envelope {
            schema_version: SCHEMA_VERSION,
            kind: self.problem.kind(),
            payload,
            corpus: self.corpus.clone(),
        };
        canonical_json(&serde_json::to_value(env).expect("envelope serializes"))
    }
}

/// serde_json keeps object keys sorted unless `preserve_order` is enabled.
pub fn canonical_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn invariant<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Invariant(e.to_string())
}

pub fn abelian_group(spec: &GroupSpec) -> Result<FiniteAbelianGroup, Failure> {
    match spec {
        GroupSpec::Cyclic(n) => FiniteAbelianGroup::cyclic(*n).map_err(schema),
        GroupSpec::Abelian(f) => FiniteAbelianGroup::new(f.clone()).map_err(schema),
        other => Err(Failure::Schema(format!("expected an abelian group, got {:?}", other))),
    }
}

pub fn group_model(spec: &GroupSpec) -> Result<FiniteGroupModel, Failure> {
    match spec {
        GroupSpec::Table(name) => bundled::group(name).map_err(schema),
        GroupSpec::Order(_) => Err(Failure::Schema("a generating vector needs a concrete group".into())),
        other => Ok(FiniteGroupModel::Abelian(abelian_group(other)?)),
    }
}

pub fn parse_abelian_element(g: &FiniteAbelianGroup, label: &str) -> Result<AbelianElement, Failure> {
    let inner = label.trim().trim_start_matches('(').trim_end_matches(')');
    let coords = inner
        .split(',')
        .map(|c| c.trim().parse::<i64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| Failure::Schema(format!("bad group element {:?}", label)))?;
    g.element(&coords).map_err(schema)
}

pub fn parse_element(model: &FiniteGroupModel, label: &str) -> Result<usize, Failure> {
    match model {
        FiniteGroupModel::Abelian(g) => {
            let x = parse_abelian_element(g, label)?;
            Ok(FiniteGroupModel::abelian_index(g, &x))
        }
        FiniteGroupModel::Table(_) => model
            .find_label(label)
            .ok_or_else(|| Failure::Schema(format!("unknown group element {:?}", label))),
    }
}

fn matrix(rows: &Matrix) -> Result<IntMatrix, Failure> {
    IntMatrix::from_rows(rows).map_err(schema)
}

impl GeneratingVectorSpec {
    pub fn build(&self) -> Result<GeneratingVector, Failure> {
        let model = group_model(&self.group)?;
        let signature = OrbifoldSignature::new(self.q, self.periods.clone()).map_err(schema)?;
        let images = self.images.iter().map(|l| parse_element(&model, l)).collect::<Result<Vec<_>, _>>()?;
        Ok(GeneratingVector::new(signature, model, images))
    }
}

impl VirtualFibrationSpec {
    pub fn build(&self) -> Result<VirtualFibration, Failure> {
        let group = match &self.group {
            GroupSpec::Order(n) => GroupData::Order(*n),
            other => GroupData::Abelian(abelian_group(other)?),
        };
        let components = self
            .components
            .iter()
            .map(|c| {
                let comp = FibrationComponent::new(c.d, c.e, c.r);
                match (&c.weight, group.abelian()) {
                    (Some(w), Some(g)) => Ok(comp.with_weight(parse_abelian_element(g, w)?)),
                    (Some(_), None) => Err(Failure::Schema("weights need an abelian group".into())),
                    (None, _) => Ok(comp),
                }
            })
            .collect::<Result<Vec<_>, Failure>>()?;
        VirtualFibration::new(self.b, self.f, group, components, self.etale_both_ways).map_err(invariant)
    }
}

impl MonodromySpec {
    pub fn build(&self) -> Result<MonodromyProblem, Failure> {
        let group = abelian_group(&self.group)?;
        let cover = self.cover.as_ref().map(GeneratingVectorSpec::build).transpose()?;
        let mut components = Vec::new();
        for (i, c) in self.components.iter().enumerate() {
            let transfer_push = match (&c.transfer, &c.transfer_product, &c.deck_element) {
                (Some(m), None, None) => matrix(m)?,
                (None, Some(ms), None) if !ms.is_empty() => {
                    let mut acc = matrix(&ms[0])?;
                    for m in &ms[1..] {
                        acc = acc.try_mul(&matrix(m)?).map_err(schema)?;
                    }
                    acc
                }
                (None, None, Some(label)) => {
                    let gv = cover
                        .as_ref()
                        .ok_or_else(|| Failure::Schema(format!("component {}: deck_element needs a cover", i + 1)))?;
                    let k = parse_element(&gv.group, label)?;
                    homology_action(gv, k).map_err(invariant)?
                }
                _ => {
                    return Err(Failure::Schema(format!(
                        "component {}: give exactly one of transfer, transfer_product, deck_element",
                        i + 1
                    )))
                }
            };
            components.push(ComponentAction {
                transfer_push,
                weight: parse_abelian_element(&group, &c.weight)?,
                d: c.d,
                e: c.e,
                r: c.r,
            });
        }
        MonodromyProblem::new(self.b, self.f, group, components).map_err(invariant)
    }
}
