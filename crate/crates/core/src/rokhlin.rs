//! Exact Rokhlin towers for finite partial actions.
//!
//! On a finite carrier the tower conditions can be met with `ε = 0`, and
//! equivariance forces `f_g^(j) = α_g(f_1^(j) 1_{g⁻¹})`. The unknowns are the
//! level functions `v_j = f_1^(j) ≥ 0` and the remaining conditions read
//!
//! * orthogonality: for each level and each point `x`, at most one arrow
//!   `y → x` starts in `supp v_j` (counted with multiplicity);
//! * partition of unity: `Σ_j Σ_{arrows y→x} v_j(y) = 1` for every `x`.
//!
//! Both only couple points of one groupoid orbit, so orbits are solved
//! independently. Call `y` *admissible* when no two arrows out of `y` share a
//! target, and let `N(y)` be the set of targets. Level supports are then
//! independent sets of the conflict graph `N(y) ∩ N(y') ≠ ∅`. Since
//! enlarging a support only adds LP variables, it suffices to try multisets
//! of `d + 1` maximal independent sets, each with an exact feasibility solve.
//! For `d = 0` the problem is an exact cover of the orbit by sets `N(y)`.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{PartialAction, Point};
use crate::exact::{feasible_point, format_q, Q};
use crate::exact_cover::ExactCover;
use crate::group::Element;
use crate::par::{self, Exec};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// A Rokhlin dimension value; `Infinite` compares above every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RokhlinDim {
    Finite(usize),
    Infinite,
}

impl fmt::Display for RokhlinDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RokhlinDim::Finite(d) => write!(f, "{d}"),
            RokhlinDim::Infinite => f.write_str("infinity"),
        }
    }
}

impl Serialize for RokhlinDim {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            RokhlinDim::Finite(d) => s.serialize_u64(*d as u64),
            RokhlinDim::Infinite => s.serialize_str("infinity"),
        }
    }
}

impl<'de> Deserialize<'de> for RokhlinDim {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(n) => Ok(RokhlinDim::Finite(n as usize)),
            Raw::Text(t) if t == "infinity" => Ok(RokhlinDim::Infinite),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("expected a count or \"infinity\", got {t:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Patterns (or exact-cover nodes) per orbit.
    pub budget: u64,
    pub exec: Exec,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { budget: DEFAULT_BUDGET, exec: Exec::default() }
    }
}

/// Level functions `f_1^(j)`, `j = 0..=d`, on the whole carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerCertificate {
    pub d: usize,
    pub levels: Vec<Vec<Q>>,
}

/// Full tower family `towers[j][g][x] = f_g^(j)(x)`.
pub type Towers = Vec<Vec<Vec<Q>>>;

impl TowerCertificate {
    /// `f_g^(j) = α_g(f_1^(j) 1_{g⁻¹})`.
    pub fn towers(&self, pa: &PartialAction) -> Towers {
        self.levels
            .iter()
            .map(|v| pa.group().elements().map(|g| pa.alpha(g, v)).collect())
            .collect()
    }

    /// Appends a zero level.
    pub fn padded(&self) -> TowerCertificate {
        let n = self.levels.first().map_or(0, Vec::len);
        let mut levels = self.levels.clone();
        levels.push(vec![Q::zero(); n]);
        TowerCertificate { d: self.d + 1, levels }
    }
}

/// Why an orbit admits no towers at a given level count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Obstruction {
    /// No point of the orbit is admissible; `θ_g(y) = y` with `g ≠ 1`.
    NonFree { g: Element, y: Point },
    /// Every multiset of maximal supports was tried.
    PatternsExhausted { maximal_supports: usize, patterns: u64 },
    /// Some point is not reached by any admissible point.
    Uncovered { x: Point },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitObstruction {
    pub orbit: Vec<Point>,
    pub reason: Obstruction,
}

/// Record of an exhaustive search that found no towers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonexistenceProof {
    pub d: usize,
    /// Every infeasible orbit, in orbit order.
    pub orbits: Vec<OrbitObstruction>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TowerSearch {
    Found(TowerCertificate),
    Nonexistent(NonexistenceProof),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RokhlinError {
    #[error("search budget exceeded at d = {d} on orbit {orbit:?} after {explored} steps")]
    SearchBudgetExceeded {
        d: usize,
        orbit: Vec<Point>,
        explored: u64,
        /// Share of the pattern space covered, when it is known.
        explored_fraction: Option<f64>,
    },
    #[error("free action without towers below |G|; this contradicts the dimension bound")]
    BoundViolated,
}

/// Per-orbit arrow multiplicities in local coordinates.
struct OrbitData {
    points: Vec<Point>,
    /// `count[y][x]` = number of `g` with `θ_g(y) = x`.
    count: Vec<Vec<u32>>,
    fixed: Option<(Element, Point)>,
}

impl OrbitData {
    fn new(pa: &PartialAction, points: &[Point]) -> Self {
        let local = |p: Point| points.binary_search(&p).expect("orbit is closed");
        let k = points.len();
        let mut count = vec![vec![0u32; k]; k];
        let mut fixed = None;
        for (ly, &y) in points.iter().enumerate() {
            for g in pa.group().elements() {
                if let Some(x) = pa.apply(g, y) {
                    count[ly][local(x)] += 1;
                    if g != 0 && x == y && fixed.is_none() {
                        fixed = Some((g, y));
                    }
                }
            }
        }
        OrbitData { points: points.to_vec(), count, fixed }
    }

    fn admissible(&self) -> Vec<usize> {
        (0..self.points.len()).filter(|&y| self.count[y].iter().all(|&c| c <= 1)).collect()
    }

    fn targets(&self, y: usize) -> Vec<usize> {
        (0..self.points.len()).filter(|&x| self.count[y][x] > 0).collect()
    }
}

enum OrbitOutcome {
    Levels(Vec<Vec<Q>>),
    Infeasible(Obstruction),
    Budget { explored: u64, fraction: Option<f64> },
}

fn solve_orbit(data: &OrbitData, d: usize, budget: u64) -> OrbitOutcome {
    let k = data.points.len();
    let admissible = data.admissible();
    if admissible.is_empty() {
        let (g, y) = data.fixed.expect("an inadmissible point lies on a fixed point");
        return OrbitOutcome::Infeasible(Obstruction::NonFree { g, y });
    }
    let targets: Vec<Vec<usize>> = (0..k).map(|y| data.targets(y)).collect();
    let mut reached = vec![false; k];
    for &y in &admissible {
        for &x in &targets[y] {
            reached[x] = true;
        }
    }
    if let Some(x) = (0..k).find(|&x| !reached[x]) {
        return OrbitOutcome::Infeasible(Obstruction::Uncovered { x: data.points[x] });
    }

    // Exact cover: a level-0 solution, padded with zero levels when d > 0.
    let mut ec = ExactCover::new(k);
    for &y in &admissible {
        ec.add_row(&targets[y]);
    }
    let cover = ec.solve_first(budget);
    if let Some(rows) = cover.solution {
        let mut levels = vec![vec![Q::zero(); k]; d + 1];
        for r in rows {
            levels[0][admissible[r]] = Q::one();
        }
        return OrbitOutcome::Levels(levels);
    }
    if cover.exhausted_budget {
        return OrbitOutcome::Budget { explored: cover.nodes, fraction: None };
    }
    if d == 0 {
        return OrbitOutcome::Infeasible(Obstruction::PatternsExhausted { maximal_supports: 0, patterns: cover.nodes });
    }

    let maximal = match maximal_independent_sets(&admissible, &targets, k, budget) {
        Some(m) => m,
        None => return OrbitOutcome::Budget { explored: budget, fraction: None },
    };
    let total = multiset_count(maximal.len(), d + 1);
    let mut pattern = vec![0usize; d + 1];
    let mut explored = 0u64;
    loop {
        if explored >= budget {
            return OrbitOutcome::Budget { explored, fraction: Some(explored as f64 / total) };
        }
        explored += 1;
        if let Some(levels) = pattern_feasible(&pattern, &maximal, &targets, k) {
            return OrbitOutcome::Levels(levels);
        }
        // next non-decreasing tuple
        let mut i = d + 1;
        loop {
            if i == 0 {
                return OrbitOutcome::Infeasible(Obstruction::PatternsExhausted {
                    maximal_supports: maximal.len(),
                    patterns: explored,
                });
            }
            i -= 1;
            if pattern[i] + 1 < maximal.len() {
                let v = pattern[i] + 1;
                for p in pattern.iter_mut().skip(i) {
                    *p = v;
                }
                break;
            }
        }
    }
}

fn multiset_count(m: usize, r: usize) -> f64 {
    // C(m + r - 1, r)
    (0..r).fold(1.0, |acc, i| acc * (m + i) as f64 / (i + 1) as f64)
}

fn pattern_feasible(
    pattern: &[usize],
    maximal: &[Vec<usize>],
    targets: &[Vec<usize>],
    k: usize,
) -> Option<Vec<Vec<Q>>> {
    let mut covered = vec![false; k];
    let vars: Vec<(usize, usize)> = pattern
        .iter()
        .enumerate()
        .flat_map(|(j, &m)| maximal[m].iter().map(move |&y| (j, y)))
        .collect();
    for &(_, y) in &vars {
        for &x in &targets[y] {
            covered[x] = true;
        }
    }
    if covered.iter().any(|c| !c) {
        return None;
    }
    let rows: Vec<Vec<Q>> = (0..k)
        .map(|x| {
            vars.iter()
                .map(|&(_, y)| if targets[y].binary_search(&x).is_ok() { Q::one() } else { Q::zero() })
                .collect()
        })
        .collect();
    let sol = feasible_point(&rows, &vec![Q::one(); k])?;
    let mut levels = vec![vec![Q::zero(); k]; pattern.len()];
    for ((j, y), v) in vars.into_iter().zip(sol) {
        levels[j][y] = v;
    }
    Some(levels)
}

/// Bron-Kerbosch with pivoting on the compatibility graph. `None` when more
/// than `budget` recursive calls are needed.
fn maximal_independent_sets(
    vertices: &[usize],
    targets: &[Vec<usize>],
    k: usize,
    budget: u64,
) -> Option<Vec<Vec<usize>>> {
    let mut hit = vec![vec![false; k]; k];
    for &y in vertices {
        for &x in &targets[y] {
            hit[y][x] = true;
        }
    }
    let compatible = |a: usize, b: usize| a != b && (0..k).all(|x| !(hit[a][x] && hit[b][x]));
    struct Bk<'a, F: Fn(usize, usize) -> bool> {
        compatible: &'a F,
        out: Vec<Vec<usize>>,
        calls: u64,
        budget: u64,
    }
    impl<F: Fn(usize, usize) -> bool> Bk<'_, F> {
        fn run(&mut self, r: &mut Vec<usize>, p: Vec<usize>, x: Vec<usize>) -> bool {
            self.calls += 1;
            if self.calls > self.budget {
                return false;
            }
            if p.is_empty() && x.is_empty() {
                let mut s = r.clone();
                s.sort_unstable();
                self.out.push(s);
                return true;
            }
            let pivot = p
                .iter()
                .chain(&x)
                .copied()
                .max_by_key(|&u| p.iter().filter(|&&v| (self.compatible)(u, v)).count())
                .expect("nonempty");
            let candidates: Vec<usize> = p.iter().copied().filter(|&v| !(self.compatible)(pivot, v)).collect();
            let (mut p, mut x) = (p, x);
            for v in candidates {
                let np = p.iter().copied().filter(|&w| (self.compatible)(v, w)).collect();
                let nx = x.iter().copied().filter(|&w| (self.compatible)(v, w)).collect();
                r.push(v);
                if !self.run(r, np, nx) {
                    return false;
                }
                r.pop();
                p.retain(|&w| w != v);
                x.push(v);
            }
            true
        }
    }
    let mut bk = Bk { compatible: &compatible, out: Vec::new(), calls: 0, budget };
    if !bk.run(&mut Vec::new(), vertices.to_vec(), Vec::new()) {
        return None;
    }
    bk.out.sort();
    Some(bk.out)
}

/// Searches for towers with `d + 1` levels.
pub fn towers_exist(pa: &PartialAction, d: usize, opts: &SearchOptions) -> Result<TowerSearch, RokhlinError> {
    let gpd = pa.translation_groupoid();
    let outcomes = par::map(opts.exec, gpd.orbits.clone(), |orbit| {
        let data = OrbitData::new(pa, &orbit);
        (orbit, solve_orbit(&data, d, opts.budget))
    });
    let mut levels = vec![vec![Q::zero(); pa.size()]; d + 1];
    let mut infeasible = Vec::new();
    let mut exceeded = None;
    for (orbit, outcome) in outcomes {
        match outcome {
            OrbitOutcome::Levels(local) => {
                for (j, lv) in local.into_iter().enumerate() {
                    for (i, v) in lv.into_iter().enumerate() {
                        levels[j][orbit[i]] = v;
                    }
                }
            }
            OrbitOutcome::Infeasible(reason) => infeasible.push(OrbitObstruction { orbit, reason }),
            OrbitOutcome::Budget { explored, fraction } => {
                if exceeded.is_none() {
                    exceeded = Some(RokhlinError::SearchBudgetExceeded {
                        d,
                        orbit,
                        explored,
                        explored_fraction: fraction,
                    });
                }
            }
        }
    }
    // One infeasible orbit settles nonexistence even if others ran out of budget.
    if !infeasible.is_empty() {
        return Ok(TowerSearch::Nonexistent(NonexistenceProof { d, orbits: infeasible }));
    }
    if let Some(e) = exceeded {
        return Err(e);
    }
    Ok(TowerSearch::Found(TowerCertificate { d, levels }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RokhlinResult {
    pub dim: RokhlinDim,
    /// With commuting towers; equal to `dim` since all towers commute.
    pub dim_commuting: RokhlinDim,
    pub certificate: Option<TowerCertificate>,
    /// Proofs for every level count that failed.
    pub proofs: Vec<NonexistenceProof>,
}

/// Least `d ≤ |G| − 1` with towers, or infinity for non-free actions.
pub fn rokhlin_dimension(pa: &PartialAction, opts: &SearchOptions) -> Result<RokhlinResult, RokhlinError> {
    let mut proofs = Vec::new();
    for d in 0..pa.order() {
        match towers_exist(pa, d, opts)? {
            TowerSearch::Found(cert) => {
                let dim = RokhlinDim::Finite(d);
                return Ok(RokhlinResult { dim, dim_commuting: dim, certificate: Some(cert), proofs });
            }
            TowerSearch::Nonexistent(p) => proofs.push(p),
        }
    }
    if pa.is_free() {
        return Err(RokhlinError::BoundViolated);
    }
    Ok(RokhlinResult {
        dim: RokhlinDim::Infinite,
        dim_commuting: RokhlinDim::Infinite,
        certificate: None,
        proofs,
    })
}

/// First violated condition found by [`verify_certificate`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateViolation {
    #[error("certificate has the wrong shape")]
    Shape,
    #[error("level {j} takes a value outside [0,1] at point {x}")]
    OutOfRange { j: usize, x: Point },
    #[error("f_{g}^({j}) is nonzero at {x}, outside X_{g}")]
    Support { j: usize, g: Element, x: Point },
    #[error("equivariance fails for level {j}, g = {g}, h = {h} at point {y}")]
    Equivariance { j: usize, g: Element, h: Element, y: Point },
    #[error("f_{g}^({j}) f_{h}^({j}) is nonzero at point {x}")]
    Orthogonality { j: usize, g: Element, h: Element, x: Point },
    #[error("towers sum to {sum} at point {x}")]
    PartitionOfUnity { x: Point, sum: String },
    #[error("tower condition ({condition}) fails with witnesses {witnesses}")]
    Condition { condition: u8, witnesses: String },
}

/// Exact check of a certificate: shape and range, then the reduced conditions
/// on the derived towers, then the original tower conditions at `ε = 0` with
/// witnesses from `{δ_x} ∪ {1_g}`.
pub fn verify_certificate(pa: &PartialAction, cert: &TowerCertificate) -> Result<(), CertificateViolation> {
    if cert.levels.len() != cert.d + 1 || cert.levels.iter().any(|l| l.len() != pa.size()) {
        return Err(CertificateViolation::Shape);
    }
    for (j, lv) in cert.levels.iter().enumerate() {
        if let Some(x) = lv.iter().position(|v| v.is_negative() || v > &Q::one()) {
            return Err(CertificateViolation::OutOfRange { j, x });
        }
    }
    let towers = cert.towers(pa);
    verify_towers(pa, &towers)?;
    check_tower_conditions(pa, &towers)
}

/// The reduced conditions on an arbitrary tower family.
pub fn verify_towers(pa: &PartialAction, towers: &Towers) -> Result<(), CertificateViolation> {
    let group = pa.group();
    let n = pa.size();
    if towers.iter().any(|t| t.len() != pa.order() || t.iter().any(|f| f.len() != n)) {
        return Err(CertificateViolation::Shape);
    }
    for (j, tower) in towers.iter().enumerate() {
        for g in group.elements() {
            if let Some(x) = (0..n).find(|&x| !pa.in_domain(g, x) && !tower[g][x].is_zero()) {
                return Err(CertificateViolation::Support { j, g, x });
            }
        }
        // f_{gh}(θ_g(y)) = f_h(y) for y ∈ X_{g⁻¹} ∩ X_h
        for g in group.elements() {
            for h in group.elements() {
                for y in 0..n {
                    let Some(gy) = pa.apply(g, y) else { continue };
                    if pa.in_domain(h, y) && tower[group.mul(g, h)][gy] != tower[h][y] {
                        return Err(CertificateViolation::Equivariance { j, g, h, y });
                    }
                }
            }
        }
        for g in group.elements() {
            for h in group.elements().filter(|&h| h != g) {
                if let Some(x) = (0..n).find(|&x| !(&tower[g][x] * &tower[h][x]).is_zero()) {
                    return Err(CertificateViolation::Orthogonality { j, g, h, x });
                }
            }
        }
    }
    for x in 0..n {
        let sum: Q = towers.iter().flat_map(|t| t.iter().map(|f| &f[x])).sum();
        if !sum.is_one() {
            return Err(CertificateViolation::PartitionOfUnity { x, sum: format_q(&sum) });
        }
    }
    Ok(())
}

fn check_tower_conditions(pa: &PartialAction, towers: &Towers) -> Result<(), CertificateViolation> {
    let group = pa.group();
    let n = pa.size();
    let mul = |a: &[Q], b: &[Q]| -> Vec<Q> { a.iter().zip(b).map(|(x, y)| x * y).collect() };
    let mut witnesses: Vec<(String, Vec<Q>)> = (0..n)
        .map(|p| (format!("d{p}"), (0..n).map(|i| if i == p { Q::one() } else { Q::zero() }).collect()))
        .collect();
    witnesses.extend(group.elements().map(|g| (format!("1_{g}"), pa.unit::<Q>(g))));
    let zero_on = |v: &[Q]| v.iter().all(Zero::is_zero);

    for (j, tower) in towers.iter().enumerate() {
        for g in group.elements() {
            let ginv = group.inv(g);
            for h in group.elements() {
                let gh = group.mul(g, h);
                for (xn, xw) in &witnesses {
                    if (0..n).any(|p| !pa.in_domain(ginv, p) && !xw[p].is_zero()) {
                        continue;
                    }
                    let lhs = pa.alpha(g, &mul(&tower[h], xw));
                    let rhs = mul(&tower[gh], &pa.alpha(g, xw));
                    let diff: Vec<Q> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
                    for (an, a) in &witnesses {
                        if !zero_on(&mul(&diff, a)) {
                            return Err(CertificateViolation::Condition {
                                condition: 1,
                                witnesses: format!("j={j} g={g} h={h} x={xn} a={an}"),
                            });
                        }
                    }
                }
            }
        }
        for g in group.elements() {
            for h in group.elements().filter(|&h| h != g) {
                let prod = mul(&tower[g], &tower[h]);
                for (an, a) in &witnesses {
                    if !zero_on(&mul(&prod, a)) {
                        return Err(CertificateViolation::Condition {
                            condition: 2,
                            witnesses: format!("j={j} g={g} h={h} a={an}"),
                        });
                    }
                }
            }
        }
    }
    let total: Vec<Q> = (0..n).map(|x| towers.iter().flat_map(|t| t.iter().map(|f| &f[x])).sum()).collect();
    for (an, a) in &witnesses {
        let diff: Vec<Q> = mul(&total, a).iter().zip(a).map(|(u, v)| u - v).collect();
        if !zero_on(&diff) {
            return Err(CertificateViolation::Condition { condition: 3, witnesses: format!("a={an}") });
        }
    }
    // Condition (4) and the commuting-towers condition hold identically:
    // functions on a set commute.
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error("inputs have inconsistent sizes")]
    ShapeMismatch,
    #[error("precondition violated at point {point}: {reason}")]
    PreconditionViolated { reason: String, point: Point },
}

/// Orthogonal lifts in the commutative finite model.
///
/// Ideals are subsets `A_j ⊆ X`, `J ⊆ X`, and the quotient map is
/// restriction to `X ∖ J`. Given `[0,1]`-valued `x_j` supported in `A_j`
/// with `x_j x_k` supported in `J` for `j ≠ k`, returns pairwise orthogonal
/// `y_j ≤ x_j` agreeing with `x_j` off `J`.
pub fn orthogonal_lifts(
    size: usize,
    ideal: &[Point],
    supports: &[Vec<Point>],
    xs: &[Vec<Q>],
) -> Result<Vec<Vec<Q>>, LiftError> {
    if supports.len() != xs.len() || xs.iter().any(|x| x.len() != size) {
        return Err(LiftError::ShapeMismatch);
    }
    let mut in_j = vec![false; size];
    for &p in ideal {
        if p >= size {
            return Err(LiftError::ShapeMismatch);
        }
        in_j[p] = true;
    }
    for (j, (x, a)) in xs.iter().zip(supports).enumerate() {
        for p in 0..size {
            if x[p].is_negative() || x[p] > Q::one() {
                return Err(LiftError::PreconditionViolated { reason: format!("x_{j} is not a contraction"), point: p });
            }
            if !x[p].is_zero() && !a.contains(&p) {
                return Err(LiftError::PreconditionViolated { reason: format!("x_{j} leaves A_{j}"), point: p });
            }
        }
    }
    for j in 0..xs.len() {
        for k in j + 1..xs.len() {
            if let Some(p) = (0..size).find(|&p| !in_j[p] && !(&xs[j][p] * &xs[k][p]).is_zero()) {
                return Err(LiftError::PreconditionViolated {
                    reason: format!("x_{j} x_{k} is not supported in J"),
                    point: p,
                });
            }
        }
    }
    Ok(lift(xs))
}

fn positive_part(v: Q) -> Q {
    if v.is_negative() {
        Q::zero()
    } else {
        v
    }
}

fn lift(xs: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let n = xs.len();
    if n <= 1 {
        return xs.to_vec();
    }
    let size = xs[0].len();
    let last = &xs[n - 1];
    // y_n = (x_n − Σ_{j<n} x_j)_+,  z_j = (x_j − x_n)_+
    let y_last: Vec<Q> = (0..size)
        .map(|p| {
            let s: Q = xs[..n - 1].iter().map(|x| &x[p]).sum();
            positive_part(&last[p] - s)
        })
        .collect();
    let zs: Vec<Vec<Q>> = xs[..n - 1]
        .iter()
        .map(|x| (0..size).map(|p| positive_part(&x[p] - &last[p])).collect())
        .collect();
    let mut out = lift(&zs);
    out.push(y_last);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::fixtures::*;
    use crate::exact::q;

    fn opts() -> SearchOptions {
        SearchOptions::default()
    }

    #[test]
    fn ri1_level_zero() {
        let pa = ri1();
        let TowerSearch::Found(cert) = towers_exist(&pa, 0, &opts()).unwrap() else { panic!() };
        assert_eq!(cert.levels, vec![vec![q(1), q(0), q(1)]]);
        verify_certificate(&pa, &cert).unwrap();
        let r = rokhlin_dimension(&pa, &opts()).unwrap();
        assert_eq!((r.dim, r.dim_commuting), (RokhlinDim::Finite(0), RokhlinDim::Finite(0)));
    }

    #[test]
    fn ri2_is_infinite() {
        let pa = ri2();
        for d in 0..3 {
            let TowerSearch::Nonexistent(p) = towers_exist(&pa, d, &opts()).unwrap() else { panic!() };
            assert_eq!(p.orbits[0].reason, Obstruction::NonFree { g: 1, y: 0 });
        }
        assert_eq!(rokhlin_dimension(&pa, &opts()).unwrap().dim, RokhlinDim::Infinite);
    }

    #[test]
    fn ri3_constant_one() {
        let pa = ri3();
        let TowerSearch::Found(cert) = towers_exist(&pa, 0, &opts()).unwrap() else { panic!() };
        assert_eq!(cert.levels, vec![vec![q(1); 3]]);
        verify_certificate(&pa, &cert).unwrap();
    }

    #[test]
    fn bad_certificates_are_rejected() {
        let pa = ri1();
        let bad = TowerCertificate { d: 0, levels: vec![vec![q(1), q(1), q(1)]] };
        let err = verify_certificate(&pa, &bad).unwrap_err();
        assert!(matches!(
            err,
            CertificateViolation::Orthogonality { x: 0 | 1, .. } | CertificateViolation::PartitionOfUnity { x: 0 | 1, .. }
        ));
        let zero = TowerCertificate { d: 0, levels: vec![vec![q(0); 3]] };
        assert!(matches!(verify_certificate(&pa, &zero), Err(CertificateViolation::PartitionOfUnity { .. })));
    }

    #[test]
    fn pattern_search_finds_higher_levels() {
        // Force the pattern route on a free orbit by asking for d = 2.
        let data = OrbitData::new(&ri1(), &[0, 1]);
        let admissible = data.admissible();
        let targets: Vec<Vec<usize>> = (0..2).map(|y| data.targets(y)).collect();
        let maximal = maximal_independent_sets(&admissible, &targets, 2, 100).unwrap();
        assert_eq!(maximal, vec![vec![0], vec![1]]);
        let levels = pattern_feasible(&[0, 1], &maximal, &targets, 2).unwrap();
        let sums: Vec<Q> = (0..2).map(|x| &levels[0][x] + &levels[1][x]).collect();
        assert!(sums.iter().all(|s| s <= &q(1)));
    }

    #[test]
    fn dimension_serialization() {
        assert!(RokhlinDim::Finite(5) < RokhlinDim::Infinite);
        assert_eq!(RokhlinDim::Infinite.to_string(), "infinity");
    }

    #[test]
    fn lifts_examples() {
        let one = |s: &[usize]| -> Vec<Q> { (0..3).map(|p| q(s.contains(&p) as i64)).collect() };
        let ys = orthogonal_lifts(3, &[1], &[vec![0, 1], vec![1, 2]], &[one(&[0, 1]), one(&[1, 2])]).unwrap();
        assert_eq!(ys, vec![one(&[0]), one(&[2])]);
        let single = orthogonal_lifts(3, &[], &[vec![0, 1, 2]], &[one(&[0, 2])]).unwrap();
        assert_eq!(single, vec![one(&[0, 2])]);
        let err = orthogonal_lifts(3, &[], &[vec![0, 1], vec![1, 2]], &[one(&[0, 1]), one(&[1, 2])]);
        assert!(matches!(err, Err(LiftError::PreconditionViolated { point: 1, .. })));
    }
}
