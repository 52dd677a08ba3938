//! Machine-readable reports. Rationals are `"p/q"` strings and an infinite
//! Rokhlin dimension is the string `"infinity"`.

use parok::action::PartialAction;
use parok::bimodule::{imprimitivity_bimodule_verify, BimoduleReport};
use parok::decomp::{is_n_decomposable, orbit_type_decomposition, stratification};
use parok::exact::format_q;
use parok::fdcstar::{crossed_product_blocks, fixed_point_algebra, morita_equivalent};
use parok::globalize::globalize;
use parok::group::Element;
use parok::rokhlin::{
    rokhlin_dimension, towers_exist, NonexistenceProof, RokhlinDim, RokhlinError, SearchOptions, TowerCertificate,
    TowerSearch,
};
use serde::{Deserialize, Serialize};

use crate::instance::{Instance, InstanceFile};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Header {
    pub schema_version: u32,
    pub tool_version: String,
    pub instance_digest: String,
}

impl Header {
    pub fn new(inst: &Instance) -> Self {
        Header { schema_version: SCHEMA_VERSION, tool_version: TOOL_VERSION.into(), instance_digest: inst.digest() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seeds {
    /// Seed of the random central element used for the numeric block split.
    pub blocks: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub element: Element,
    pub point: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreenessSection {
    pub free: bool,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stratum {
    pub k: usize,
    pub points: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orbit {
    pub points: Vec<String>,
    pub stabilizer: Vec<Element>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateOut {
    pub d: usize,
    /// `levels[j][x] = f_1^(j)(x)`.
    pub levels: Vec<Vec<String>>,
}

impl CertificateOut {
    fn new(c: &TowerCertificate) -> Self {
        CertificateOut { d: c.d, levels: c.levels.iter().map(|l| l.iter().map(format_q).collect()).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BudgetOverrun {
    pub d: usize,
    pub orbit: Vec<String>,
    pub explored: u64,
    pub explored_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RokhlinSection {
    /// Absent when the budget ran out first.
    pub dimension: Option<RokhlinDim>,
    pub dimension_commuting: Option<RokhlinDim>,
    pub certificate: Option<CertificateOut>,
    /// Point indices refer to the carrier order.
    pub nonexistence: Vec<NonexistenceProof>,
    pub budget_exceeded: Option<BudgetOverrun>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CrossedProductSection {
    pub dimension: usize,
    pub blocks: Option<Vec<usize>>,
    pub center_dimension: Option<usize>,
    pub integrality_residual: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MoritaSection {
    /// Fixed point algebra versus crossed product, by block count.
    pub equivalent: Option<bool>,
    /// Whether the Rokhlin dimension is finite.
    pub hypothesis_holds: Option<bool>,
    pub bimodule: BimoduleReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GlobalizationSection {
    pub envelope_size: usize,
    pub free: bool,
    /// `splitting[g]` as carrier labels.
    pub splitting: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    #[serde(flatten)]
    pub header: Header,
    pub seeds: Seeds,
    pub budget: u64,
    pub group: String,
    pub group_order: usize,
    pub carrier: Vec<String>,
    pub freeness: FreenessSection,
    pub strata: Vec<Stratum>,
    /// The `n` with the `n`-decomposition property, if any.
    pub decomposable_with: Option<usize>,
    pub orbits: Vec<Orbit>,
    pub rokhlin: RokhlinSection,
    pub crossed_product: CrossedProductSection,
    pub fixed_point_blocks: Vec<usize>,
    pub morita: MoritaSection,
    pub globalization: GlobalizationSection,
}

fn overrun(inst: &Instance, e: RokhlinError) -> BudgetOverrun {
    match e {
        RokhlinError::SearchBudgetExceeded { d, orbit, explored, explored_fraction } => {
            BudgetOverrun { d, orbit: inst.labels_of(&orbit), explored, explored_fraction }
        }
        RokhlinError::BoundViolated => panic!("solver contradicted the dimension bound: {e}"),
    }
}

pub fn rokhlin_section(inst: &Instance, opts: &SearchOptions) -> RokhlinSection {
    match rokhlin_dimension(&inst.action, opts) {
        Ok(r) => RokhlinSection {
            dimension: Some(r.dim),
            dimension_commuting: Some(r.dim_commuting),
            certificate: r.certificate.as_ref().map(CertificateOut::new),
            nonexistence: r.proofs,
            budget_exceeded: None,
        },
        Err(e) => RokhlinSection {
            dimension: None,
            dimension_commuting: None,
            certificate: None,
            nonexistence: Vec::new(),
            budget_exceeded: Some(overrun(inst, e)),
        },
    }
}

pub fn analyze(inst: &Instance, seed: u64, opts: &SearchOptions) -> Report {
    let pa: &PartialAction = &inst.action;
    let freeness = pa.freeness();
    let strata = stratification(pa)
        .strata
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.is_empty())
        .map(|(i, s)| Stratum { k: i + 1, points: inst.labels_of(s) })
        .collect();
    let gpd = pa.translation_groupoid();
    let orbits = gpd
        .orbits
        .iter()
        .zip(&gpd.stabilizers)
        .map(|(o, h)| Orbit { points: inst.labels_of(o), stabilizer: h.members().to_vec() })
        .collect();
    let rokhlin = rokhlin_section(inst, opts);
    let dim_cp: usize = pa.group().elements().map(|g| pa.domain_size(g)).sum();
    let fixed = fixed_point_algebra(pa);
    let (crossed_product, equivalent) = match crossed_product_blocks(pa, seed) {
        Ok(b) => (
            CrossedProductSection {
                dimension: dim_cp,
                blocks: Some(b.combinatorial.blocks.clone()),
                center_dimension: Some(b.numeric.center_dim),
                integrality_residual: Some(b.numeric.integrality_residual),
                error: None,
            },
            Some(morita_equivalent(&fixed.algebra, &b.combinatorial)),
        ),
        Err(e) => (
            CrossedProductSection {
                dimension: dim_cp,
                blocks: None,
                center_dimension: None,
                integrality_residual: None,
                error: Some(e.to_string()),
            },
            None,
        ),
    };
    let gr = globalize(pa);
    Report {
        header: Header::new(inst),
        seeds: Seeds { blocks: seed },
        budget: opts.budget,
        group: pa.group().spec().to_string(),
        group_order: pa.order(),
        carrier: inst.labels.clone(),
        freeness: FreenessSection {
            free: freeness.free,
            witness: freeness.witness.map(|(g, x)| Witness { element: g, point: inst.labels[x].clone() }),
        },
        strata,
        decomposable_with: (1..=pa.order()).find(|&n| is_n_decomposable(pa, n)),
        orbits,
        morita: MoritaSection {
            equivalent,
            hypothesis_holds: rokhlin.dimension.map(|d| d != RokhlinDim::Infinite),
            bimodule: imprimitivity_bimodule_verify(pa, seed),
        },
        rokhlin,
        crossed_product,
        fixed_point_blocks: fixed.algebra.blocks,
        globalization: GlobalizationSection {
            envelope_size: gr.envelope.size(),
            free: gr.envelope.is_free(),
            splitting: gr.splitting.iter().map(|p| inst.labels_of(p)).collect(),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TowersReport {
    #[serde(flatten)]
    pub header: Header,
    pub d: usize,
    pub budget: u64,
    pub found: Option<bool>,
    pub certificate: Option<CertificateOut>,
    pub nonexistence: Option<NonexistenceProof>,
    pub budget_exceeded: Option<BudgetOverrun>,
}

pub fn towers(inst: &Instance, d: usize, opts: &SearchOptions) -> TowersReport {
    let mut r = TowersReport {
        header: Header::new(inst),
        d,
        budget: opts.budget,
        found: None,
        certificate: None,
        nonexistence: None,
        budget_exceeded: None,
    };
    match towers_exist(&inst.action, d, opts) {
        Ok(TowerSearch::Found(c)) => {
            r.found = Some(true);
            r.certificate = Some(CertificateOut::new(&c));
        }
        Ok(TowerSearch::Nonexistent(p)) => {
            r.found = Some(false);
            r.nonexistence = Some(p);
        }
        Err(e) => r.budget_exceeded = Some(overrun(inst, e)),
    }
    r
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GlobalizeReport {
    #[serde(flatten)]
    pub header: Header,
    /// Envelope points are labelled `g*x` after a representative.
    pub envelope: InstanceFile,
    /// Carrier label to envelope label.
    pub embedding: Vec<(String, String)>,
    pub splitting: Vec<Vec<String>>,
}

pub fn globalize_report(inst: &Instance) -> GlobalizeReport {
    let gr = globalize(&inst.action);
    let labels: Vec<String> = gr.classes.iter().map(|&(g, x)| format!("{g}*{}", inst.labels[x])).collect();
    let envelope = Instance { action: gr.envelope.clone(), labels: labels.clone() };
    GlobalizeReport {
        header: Header::new(inst),
        envelope: InstanceFile::from_instance(&envelope),
        embedding: gr.embedding.iter().enumerate().map(|(x, &y)| (inst.labels[x].clone(), labels[y].clone())).collect(),
        splitting: gr.splitting.iter().map(|p| inst.labels_of(p)).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Extension {
    pub k: usize,
    pub ideal: Vec<String>,
    pub total: Vec<String>,
    pub quotient: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Part {
    pub representative: Vec<Element>,
    pub points: Vec<String>,
    pub tau_points: Vec<String>,
    /// `H_τ` as elements of the group.
    pub stabilizer: Vec<Element>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DecomposeReport {
    #[serde(flatten)]
    pub header: Header,
    pub strata: Vec<Stratum>,
    pub chain: Vec<Extension>,
    pub decomposable_with: Option<usize>,
    pub parts: Vec<Part>,
}

pub fn decompose(inst: &Instance) -> DecomposeReport {
    let pa = &inst.action;
    let s = stratification(pa);
    let n = (1..=pa.order()).find(|&n| is_n_decomposable(pa, n));
    let parts = match n {
        Some(n) => orbit_type_decomposition(pa, n)
            .expect("decomposable")
            .into_iter()
            .map(|p| Part {
                representative: p.representative,
                points: inst.labels_of(&p.points),
                tau_points: inst.labels_of(&p.tau_points),
                stabilizer: p.subsystem.elements,
            })
            .collect(),
        None => Vec::new(),
    };
    DecomposeReport {
        header: Header::new(inst),
        strata: s
            .strata
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_empty())
            .map(|(i, p)| Stratum { k: i + 1, points: inst.labels_of(p) })
            .collect(),
        chain: s
            .chain
            .iter()
            .filter(|e| !e.ideal.points.is_empty())
            .map(|e| Extension {
                k: e.k,
                ideal: inst.labels_of(&e.ideal.points),
                total: inst.labels_of(&e.total.points),
                quotient: inst.labels_of(&e.quotient.points),
            })
            .collect(),
        decomposable_with: n,
        parts,
    }
}
