//! Grid models of partial actions on intervals and circles.
//!
//! A [`GridAction`] is a finite partial action whose points carry real
//! coordinates and a chain or cycle adjacency. Tower functions are admissible
//! when they change by at most `L·h` across every edge, a discrete stand-in
//! for continuity. [`residual`] measures how far a tower family is from the
//! tower conditions with respect to a finite test set, exactly.

use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::action::{PartialAction, Point};
use crate::exact::{q, q_frac, q_to_f64, Q};
use crate::group::{build_group, Element, GroupSpec};
use crate::par::{self, Exec};
use crate::rokhlin::TowerCertificate;

pub const DEFAULT_LIPSCHITZ: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("delta must lie strictly between 0 and 1/4, got {0}")]
    BadDelta(f64),
    #[error("grid size {0} is odd; the half shift needs an even grid")]
    OddGrid(usize),
    #[error("grid size {0} is below 16")]
    GridTooCoarse(usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("level {j}, element {g} jumps by more than L*h across edge {edge:?}")]
    NotAdmissible { j: usize, g: Element, edge: (Point, Point) },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

#[derive(Debug, Clone)]
pub struct GridAction {
    pub action: PartialAction,
    pub coords: Vec<Q>,
    /// Component label per point.
    pub components: Vec<usize>,
    pub edges: Vec<(Point, Point)>,
    pub spacing: Q,
    pub lipschitz: f64,
}

impl GridAction {
    pub fn new(
        action: PartialAction,
        coords: Vec<Q>,
        components: Vec<usize>,
        edges: Vec<(Point, Point)>,
        spacing: Q,
        lipschitz: f64,
    ) -> Result<Self, GridError> {
        let n = action.size();
        if coords.len() != n || components.len() != n {
            return Err(GridError::ShapeMismatch("coordinates or components".into()));
        }
        if lipschitz.is_nan() || lipschitz <= 0.0 || !spacing.is_positive() {
            return Err(GridError::InvalidGrid("spacing and Lipschitz bound must be positive".into()));
        }
        let mut adjacent = vec![Vec::new(); n];
        for &(p, r) in &edges {
            if p >= n || r >= n || p == r || components[p] != components[r] {
                return Err(GridError::InvalidGrid(format!("bad edge ({p}, {r})")));
            }
            adjacent[p].push(r);
            adjacent[r].push(p);
        }
        for &(p, r) in &edges {
            for g in action.group().elements() {
                if let (Some(gp), Some(gr)) = (action.apply(g, p), action.apply(g, r)) {
                    if !adjacent[gp].contains(&gr) {
                        return Err(GridError::InvalidGrid(format!(
                            "element {g} breaks adjacency of ({p}, {r})"
                        )));
                    }
                }
            }
        }
        Ok(GridAction { action, coords, components, edges, spacing, lipschitz })
    }

    /// Isolated points at integer coordinates; every tower is admissible.
    pub fn discrete(action: PartialAction) -> Self {
        let n = action.size();
        GridAction {
            action,
            coords: (0..n as i64).map(q).collect(),
            components: (0..n).collect(),
            edges: Vec::new(),
            spacing: Q::one(),
            lipschitz: 1.0,
        }
    }

    pub fn size(&self) -> usize {
        self.action.size()
    }

    /// Largest admissible jump `L·h`.
    pub fn band(&self) -> Q {
        Q::from_float(self.lipschitz).expect("finite Lipschitz bound") * &self.spacing
    }
}

/// Tower values `values[j][g][x] = f_g^(j)(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumericTowers {
    pub d: usize,
    pub values: Vec<Vec<Vec<Q>>>,
}

impl NumericTowers {
    pub fn zeros(ga: &GridAction, d: usize) -> Self {
        let n = ga.size();
        NumericTowers { d, values: vec![vec![vec![Q::zero(); n]; ga.action.order()]; d + 1] }
    }

    pub fn from_certificate(pa: &PartialAction, cert: &TowerCertificate) -> Self {
        NumericTowers { d: cert.d, values: cert.towers(pa) }
    }

    /// Keeps the first `levels` levels.
    pub fn truncate(&self, levels: usize) -> Self {
        assert!(levels >= 1 && levels <= self.values.len());
        NumericTowers { d: levels - 1, values: self.values[..levels].to_vec() }
    }

    fn check_shape(&self, ga: &GridAction) -> Result<(), GridError> {
        let ok = self.values.len() == self.d + 1
            && self
                .values
                .iter()
                .all(|t| t.len() == ga.action.order() && t.iter().all(|f| f.len() == ga.size()));
        if ok {
            Ok(())
        } else {
            Err(GridError::ShapeMismatch("tower values".into()))
        }
    }

    /// Range, support and Lipschitz band.
    pub fn check_admissible(&self, ga: &GridAction) -> Result<(), GridError> {
        self.check_shape(ga)?;
        let band = ga.band();
        for (j, tower) in self.values.iter().enumerate() {
            for (g, f) in tower.iter().enumerate() {
                for (x, v) in f.iter().enumerate() {
                    if v.is_negative() || v > &Q::one() {
                        return Err(GridError::ShapeMismatch(format!("f_{g}^({j}) leaves [0,1] at {x}")));
                    }
                    if !v.is_zero() && !ga.action.in_domain(g, x) {
                        return Err(GridError::ShapeMismatch(format!("f_{g}^({j}) is nonzero off X_{g} at {x}")));
                    }
                }
                for &(p, r) in &ga.edges {
                    if (&f[p] - &f[r]).abs() > band {
                        return Err(GridError::NotAdmissible { j, g, edge: (p, r) });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Sup-norm violation of each tower condition (1) to (3).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualBreakdown {
    pub conditions: [Q; 3],
}

impl ResidualBreakdown {
    pub fn value(&self) -> Q {
        self.conditions.iter().max().cloned().expect("three entries")
    }
}

/// Test set enlarged by its restrictions to the domains; used for `x`.
fn witness_functions<T: Clone + Zero + One>(pa: &PartialAction, test_set: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = test_set.to_vec();
    for a in test_set {
        for g in pa.group().elements().skip(1) {
            let r: Vec<T> = a
                .iter()
                .enumerate()
                .map(|(x, v)| if pa.in_domain(g, x) { v.clone() } else { T::zero() })
                .collect();
            out.push(r);
        }
    }
    out
}

trait Scalar: Clone + Zero + One + Signed + PartialOrd {}
impl<T: Clone + Zero + One + Signed + PartialOrd> Scalar for T {}

fn sup_product<T: Scalar>(u: &[T], a: &[T]) -> T {
    u.iter().zip(a).map(|(x, y)| (x.clone() * y.clone()).abs()).fold(T::zero(), |m, v| if v > m { v } else { m })
}

fn residual_generic<T: Scalar>(pa: &PartialAction, towers: &[Vec<Vec<T>>], test_set: &[Vec<T>]) -> [T; 3] {
    let group = pa.group();
    let n = pa.size();
    let witnesses = witness_functions(pa, test_set);
    let mut worst = [T::zero(), T::zero(), T::zero()];
    let bump = |slot: &mut T, v: T| {
        if v > *slot {
            *slot = v;
        }
    };
    for tower in towers {
        for g in group.elements() {
            let ginv = group.inv(g);
            let usable: Vec<&Vec<T>> = witnesses
                .iter()
                .filter(|x| (0..n).all(|p| x[p].is_zero() || pa.in_domain(ginv, p)))
                .collect();
            for h in group.elements() {
                let gh = group.mul(g, h);
                for x in &usable {
                    let fx: Vec<T> = tower[h].iter().zip(x.iter()).map(|(u, v)| u.clone() * v.clone()).collect();
                    let lhs = pa.alpha(g, &fx);
                    let ax = pa.alpha(g, x);
                    let diff: Vec<T> = (0..n).map(|p| lhs[p].clone() - tower[gh][p].clone() * ax[p].clone()).collect();
                    for a in test_set {
                        bump(&mut worst[0], sup_product(&diff, a));
                    }
                }
            }
        }
        for g in group.elements() {
            for h in group.elements().filter(|&h| h != g) {
                let prod: Vec<T> = (0..n).map(|p| tower[g][p].clone() * tower[h][p].clone()).collect();
                for a in test_set {
                    bump(&mut worst[1], sup_product(&prod, a));
                }
            }
        }
    }
    let total: Vec<T> = (0..n)
        .map(|p| towers.iter().flat_map(|t| t.iter()).fold(T::zero(), |s, f| s + f[p].clone()))
        .collect();
    let deficit: Vec<T> = total.into_iter().map(|s| s - T::one()).collect();
    for a in test_set {
        bump(&mut worst[2], sup_product(&deficit, a));
    }
    worst
}

/// Per-condition residuals. Witnesses `a` range over the test set and `x`
/// over the test set together with its restrictions to each domain.
pub fn residual_breakdown(
    ga: &GridAction,
    towers: &NumericTowers,
    test_set: &[Vec<Q>],
) -> Result<ResidualBreakdown, GridError> {
    towers.check_admissible(ga)?;
    if test_set.iter().any(|a| a.len() != ga.size()) {
        return Err(GridError::ShapeMismatch("test function length".into()));
    }
    Ok(ResidualBreakdown { conditions: residual_generic(&ga.action, &towers.values, test_set) })
}

/// Largest violation of the tower conditions; condition (4) vanishes on
/// commutative algebras.
pub fn residual(ga: &GridAction, towers: &NumericTowers, test_set: &[Vec<Q>]) -> Result<Q, GridError> {
    residual_breakdown(ga, towers, test_set).map(|r| r.value())
}

fn piecewise(x: &Q, knots: &[(Q, Q)]) -> Q {
    // linear interpolation between consecutive knots
    for w in knots.windows(2) {
        let ((x0, y0), (x1, y1)) = (&w[0], &w[1]);
        if x >= x0 && x <= x1 {
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
        }
    }
    Q::zero()
}

fn cyclic2() -> Arc<crate::group::FiniteGroup> {
    Arc::new(build_group(&GroupSpec::cyclic(2)).expect("cyclic(2)"))
}

/// The half-interval shift on `(0,2]` sampled at `k·2/m`.
#[derive(Debug, Clone)]
pub struct ShiftExample {
    pub grid: GridAction,
    pub towers: NumericTowers,
    pub test_set: Vec<Vec<Q>>,
    pub delta: Q,
    /// `max(‖e_δ a − a‖, ‖f_δ a − a‖)` over the relevant test functions.
    pub bound: Q,
}

/// Grid coordinates `k·2/m`, `k = 1..=m`, with `σ(x) = x + 1 mod 2` on
/// `(0,1) ∪ (1,2)`. The towers are `e_δ` and `f_δ − e_δ` cut at `1`; the
/// second level jumps at `1`, so the band is `L = 1/h`.
pub fn example_4_5(delta: f64, m: usize) -> Result<ShiftExample, GridError> {
    if !(delta > 0.0 && delta < 0.25) {
        return Err(GridError::BadDelta(delta));
    }
    if m % 2 == 1 || m == 0 {
        return Err(GridError::OddGrid(m));
    }
    let dq = Q::from_float(delta).expect("finite");
    let half = m / 2;
    let coords: Vec<Q> = (1..=m as i64).map(|k| q_frac(2 * k, m as i64)).collect();
    let idx = |k: usize| k - 1;
    let in_u = |k: usize| k != half && k != m;
    let shift: Vec<(Point, Point)> = (1..=m)
        .filter(|&k| in_u(k))
        .map(|k| (idx(k), idx(if k < half { k + half } else { k - half })))
        .collect();
    let pa = PartialAction::new(
        cyclic2(),
        m,
        &[(0..m).collect(), shift.iter().map(|&(s, _)| s).collect()],
        &[(0..m).map(|p| (p, p)).collect(), shift],
    )
    .map_err(|e| GridError::InvalidGrid(e.to_string()))?;
    let edges = (0..m - 1).map(|p| (p, p + 1)).collect();
    let spacing = q_frac(2, m as i64);
    let lipschitz = q_to_f64(&(Q::one() / &spacing));
    let grid = GridAction::new(pa, coords.clone(), vec![0; m], edges, spacing, lipschitz)?;

    let (zero, one, two) = (q(0), q(1), q(2));
    let f_delta: Vec<Q> = coords.iter().map(|x| piecewise(x, &[(zero.clone(), zero.clone()), (dq.clone(), one.clone()), (two.clone(), one.clone())])).collect();
    let e_delta: Vec<Q> = coords
        .iter()
        .map(|x| {
            piecewise(
                x,
                &[
                    (zero.clone(), zero.clone()),
                    (dq.clone(), one.clone()),
                    (&one - &dq, one.clone()),
                    (one.clone(), zero.clone()),
                    (&one + &dq, one.clone()),
                    (&two - &dq, one.clone()),
                    (two.clone(), zero.clone()),
                ],
            )
        })
        .collect();
    let (minus, plus): (Element, Element) = (1, 0);
    let mut towers = NumericTowers::zeros(&grid, 1);
    for (p, x) in coords.iter().enumerate() {
        let rest = &f_delta[p] - &e_delta[p];
        if x < &one {
            towers.values[0][minus][p] = e_delta[p].clone();
            towers.values[1][minus][p] = rest;
        } else {
            towers.values[0][plus][p] = e_delta[p].clone();
            towers.values[1][plus][p] = rest;
        }
    }

    // x/2, tents on (0,1) and (1,2), and min(1, 4x)
    let test_set: Vec<Vec<Q>> = vec![
        coords.iter().map(|x| x / &two).collect(),
        coords.iter().map(|x| piecewise(x, &[(zero.clone(), zero.clone()), (q_frac(1, 2), one.clone()), (one.clone(), zero.clone())])).collect(),
        coords.iter().map(|x| piecewise(x, &[(one.clone(), zero.clone()), (q_frac(3, 2), one.clone()), (two.clone(), zero.clone())])).collect(),
        coords.iter().map(|x| piecewise(x, &[(zero.clone(), zero.clone()), (q_frac(1, 4), one.clone()), (two.clone(), one.clone())])).collect(),
    ];
    let in_cu = |a: &Vec<Q>| (1..=m).all(|k| in_u(k) || a[idx(k)].is_zero());
    let sup_diff = |w: &[Q], a: &[Q]| sup_product(&w.iter().map(|v| v - Q::one()).collect::<Vec<_>>(), a);
    let bound = test_set
        .iter()
        .map(|a| {
            let fb = sup_diff(&f_delta, a);
            if in_cu(a) {
                fb.max(sup_diff(&e_delta, a))
            } else {
                fb
            }
        })
        .max()
        .expect("nonempty test set");
    Ok(ShiftExample { grid, towers, test_set, delta: dq, bound })
}

/// The antipodal map on the punctured circle tensored with the flip on two
/// points.
#[derive(Debug, Clone)]
pub struct FlipExample {
    pub grid: GridAction,
    /// `(a, a)` and `(b, b)`.
    pub test_set: Vec<Vec<Q>>,
    pub epsilon: Q,
}

fn flip_check(m: usize) -> Result<(), GridError> {
    if m % 2 == 1 {
        return Err(GridError::OddGrid(m));
    }
    if m < 16 {
        return Err(GridError::GridTooCoarse(m));
    }
    Ok(())
}

fn flip_test_set(coords: &[Q], epsilon: &Q) -> Vec<Vec<Q>> {
    let (zero, one, two) = (q(0), q(1), q(2));
    let a = coords
        .iter()
        .map(|x| piecewise(x, &[(zero.clone(), zero.clone()), (epsilon.clone(), one.clone()), (&two - epsilon, one.clone()), (two.clone(), zero.clone())]))
        .collect();
    let b = coords
        .iter()
        .map(|x| {
            piecewise(
                x,
                &[
                    (zero.clone(), zero.clone()),
                    (epsilon.clone(), one.clone()),
                    (&one - epsilon, one.clone()),
                    (one.clone(), zero.clone()),
                    (&one + epsilon, one.clone()),
                    (&two - epsilon, one.clone()),
                    (two.clone(), zero.clone()),
                ],
            )
        })
        .collect();
    vec![a, b]
}

/// Two copies of the grid `k·2/m`, `k = 1..m`, identifying the punctured
/// circle with `(0,2)`. Point `(c, k)` has index `c·(m−1) + k − 1`.
pub fn example_3_2(m: usize) -> Result<FlipExample, GridError> {
    flip_check(m)?;
    let half = m / 2;
    let per = m - 1;
    let at = |c: usize, k: usize| c * per + k - 1;
    let mut coords = Vec::with_capacity(2 * per);
    for _ in 0..2 {
        coords.extend((1..m as i64).map(|k| q_frac(2 * k, m as i64)));
    }
    let mut shift = Vec::new();
    for c in 0..2 {
        for k in (1..m).filter(|&k| k != half) {
            let t = if k < half { k + half } else { k - half };
            shift.push((at(c, k), at(1 - c, t)));
        }
    }
    let size = 2 * per;
    let pa = PartialAction::new(
        cyclic2(),
        size,
        &[(0..size).collect(), shift.iter().map(|&(s, _)| s).collect()],
        &[(0..size).map(|p| (p, p)).collect(), shift],
    )
    .map_err(|e| GridError::InvalidGrid(e.to_string()))?;
    let edges = (0..2).flat_map(|c| (1..m - 1).map(move |k| (at(c, k), at(c, k + 1)))).collect();
    let components = (0..size).map(|p| p / per).collect();
    let grid = GridAction::new(pa, coords.clone(), components, edges, q_frac(2, m as i64), DEFAULT_LIPSCHITZ)?;
    let epsilon = q_frac(3, 16);
    let test_set = flip_test_set(&coords, &epsilon);
    Ok(FlipExample { grid, test_set, epsilon })
}

/// The global model on the full circle with projections `p_{−1} = (1,0)`,
/// `p_1 = (0,1)`. Point `(c, k)`, `k = 0..m`, has index `c·m + k`.
pub fn example_3_2_global(m: usize) -> Result<(FlipExample, NumericTowers), GridError> {
    flip_check(m)?;
    let half = m / 2;
    let at = |c: usize, k: usize| c * m + k;
    let mut coords = Vec::with_capacity(2 * m);
    for _ in 0..2 {
        coords.extend((0..m as i64).map(|k| q_frac(2 * k, m as i64)));
    }
    let size = 2 * m;
    let perm: Vec<Point> = (0..size).map(|p| at(1 - p / m, (p % m + half) % m)).collect();
    let pa = PartialAction::global(cyclic2(), &[(0..size).collect(), perm])
        .map_err(|e| GridError::InvalidGrid(e.to_string()))?;
    let edges = (0..2).flat_map(|c| (0..m).map(move |k| (at(c, k), at(c, (k + 1) % m)))).collect();
    let components = (0..size).map(|p| p / m).collect();
    let grid = GridAction::new(pa, coords.clone(), components, edges, q_frac(2, m as i64), DEFAULT_LIPSCHITZ)?;
    let epsilon = q_frac(3, 16);
    let test_set = flip_test_set(&coords, &epsilon);
    let mut towers = NumericTowers::zeros(&grid, 0);
    for p in 0..size {
        // f_1 = (0,1), f_{-1} = (1,0)
        let slot = if p < m { 1 } else { 0 };
        towers.values[0][slot][p] = Q::one();
    }
    Ok((FlipExample { grid, test_set, epsilon }, towers))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchParams {
    pub d: usize,
    pub epsilon: f64,
    pub seed: u64,
    pub restarts: usize,
    pub iterations: usize,
    pub exec: Exec,
}

impl SearchParams {
    pub fn new(d: usize, epsilon: f64, seed: u64, restarts: usize) -> Self {
        SearchParams { d, epsilon, seed, restarts, iterations: 400, exec: Exec::default() }
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub towers: NumericTowers,
    pub best_residual: Q,
    /// Restart that produced the towers.
    pub restart: usize,
    /// Whether the residual is below the requested `ε`.
    pub within_epsilon: bool,
}

struct Weights {
    /// `max_a |a(y)|`
    point: Vec<f64>,
    /// `[g][y]`: `max_x |x(θ_{g⁻¹} y)|` over usable witnesses.
    moved: Vec<Vec<f64>>,
}

fn weights(pa: &PartialAction, test_set: &[Vec<f64>]) -> Weights {
    let n = pa.size();
    let point = (0..n).map(|y| test_set.iter().map(|a| a[y].abs()).fold(0.0, f64::max)).collect();
    let witnesses = witness_functions(pa, test_set);
    let group = pa.group();
    let moved = group
        .elements()
        .map(|g| {
            let ginv = group.inv(g);
            let usable: Vec<&Vec<f64>> = witnesses
                .iter()
                .filter(|x| (0..n).all(|p| x[p] == 0.0 || pa.in_domain(ginv, p)))
                .collect();
            (0..n)
                .map(|y| match pa.apply(ginv, y) {
                    Some(z) => usable.iter().map(|x| x[z].abs()).fold(0.0, f64::max),
                    None => 0.0,
                })
                .collect()
        })
        .collect();
    Weights { point, moved }
}

/// Largest `g ≤ f` changing by at most `band` across edges.
fn lipschitz_envelope(f: &mut [f64], edges: &[(Point, Point)], band: f64) {
    loop {
        let mut changed = false;
        for &(p, r) in edges {
            if f[p] > f[r] + band {
                f[p] = f[r] + band;
                changed = true;
            }
            if f[r] > f[p] + band {
                f[r] = f[p] + band;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
}

fn project_admissible(pa: &PartialAction, t: &mut [Vec<Vec<f64>>], edges: &[(Point, Point)], band: f64) {
    for tower in t.iter_mut() {
        for (g, f) in tower.iter_mut().enumerate() {
            for (x, v) in f.iter_mut().enumerate() {
                *v = if pa.in_domain(g, x) { v.clamp(0.0, 1.0) } else { 0.0 };
            }
            lipschitz_envelope(f, edges, band);
        }
    }
}

fn sweep(pa: &PartialAction, t: &mut [Vec<Vec<f64>>], w: &Weights, rate: f64) {
    let group = pa.group();
    let n = pa.size();
    // equivariance: f_h(θ_{g⁻¹} y) against f_{gh}(y)
    for tower in t.iter_mut() {
        for g in group.elements().skip(1) {
            let ginv = group.inv(g);
            for h in group.elements() {
                let gh = group.mul(g, h);
                for y in 0..n {
                    let c = rate * w.point[y] * w.moved[g][y];
                    if c == 0.0 {
                        continue;
                    }
                    let z = pa.apply(ginv, y).expect("weight vanishes off X_g");
                    if pa.in_domain(h, z) {
                        let mid = 0.5 * (tower[h][z] + tower[gh][y]);
                        tower[h][z] += c * (mid - tower[h][z]);
                        tower[gh][y] += c * (mid - tower[gh][y]);
                    } else {
                        tower[gh][y] -= c * tower[gh][y];
                    }
                }
            }
        }
    }
    // orthogonality: shrink everything but the largest entry of each level
    for tower in t.iter_mut() {
        for y in 0..n {
            let c = rate * w.point[y];
            if c == 0.0 {
                continue;
            }
            let top = (0..tower.len()).fold(0, |b, g| if tower[g][y] > tower[b][y] { g } else { b });
            for (g, f) in tower.iter_mut().enumerate() {
                if g != top {
                    f[y] *= 1.0 - c;
                }
            }
        }
    }
    // partition of unity
    for y in 0..n {
        let c = rate * w.point[y];
        if c == 0.0 {
            continue;
        }
        let s: f64 = t.iter().flat_map(|tw| tw.iter().map(|f| f[y])).sum();
        if s > 1e-12 {
            let scale = 1.0 + c * (1.0 / s - 1.0);
            for tw in t.iter_mut() {
                for f in tw.iter_mut() {
                    f[y] *= scale;
                }
            }
        } else {
            let slots: usize = (0..t[0].len()).filter(|&g| pa.in_domain(g, y)).count() * t.len();
            for tw in t.iter_mut() {
                for (g, f) in tw.iter_mut().enumerate() {
                    if pa.in_domain(g, y) {
                        f[y] = c / slots as f64;
                    }
                }
            }
        }
    }
}

/// Alternating projections with random restarts. Never certifies
/// nonexistence; a large best residual is only evidence.
pub fn search_towers(ga: &GridAction, test_set: &[Vec<Q>], params: &SearchParams) -> Result<SearchOutcome, GridError> {
    if test_set.iter().any(|a| a.len() != ga.size()) {
        return Err(GridError::ShapeMismatch("test function length".into()));
    }
    let pa = &ga.action;
    let n = pa.size();
    let order = pa.order();
    let test_f: Vec<Vec<f64>> = test_set.iter().map(|a| a.iter().map(q_to_f64).collect()).collect();
    let w = weights(pa, &test_f);
    // shrink the band slightly so the exact check survives rounding
    let band = q_to_f64(&ga.band()) * (1.0 - 1e-9);
    let restarts = params.restarts.max(1);
    let runs = par::map_range(params.exec, restarts, |r| {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed.wrapping_add(r as u64));
        let mut t: Vec<Vec<Vec<f64>>> = (0..=params.d)
            .map(|_| (0..order).map(|_| (0..n).map(|_| 0.0).collect()).collect())
            .collect();
        // random runs of constant slot choice along the point order
        let mut p = 0;
        while p < n {
            let len = rng.gen_range(1..=(n / 4).max(1));
            let (j, g) = (rng.gen_range(0..=params.d), rng.gen_range(0..order));
            for x in p..(p + len).min(n) {
                t[j][g][x] = 1.0;
            }
            p += len;
        }
        project_admissible(pa, &mut t, &ga.edges, band);
        let mut best = (f64::INFINITY, t.clone());
        for it in 0..params.iterations {
            let rate = 0.5 * (1.0 - it as f64 / params.iterations as f64) + 0.05;
            sweep(pa, &mut t, &w, rate);
            project_admissible(pa, &mut t, &ga.edges, band);
            if (it + 1) % 50 == 0 || it + 1 == params.iterations {
                let r = residual_generic(pa, &t, &test_f).into_iter().fold(0.0, f64::max);
                if r < best.0 {
                    best = (r, t.clone());
                }
            }
        }
        best
    });
    let (restart, (_, values)) = runs
        .into_iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.0.total_cmp(&b.0).then(i.cmp(j)))
        .expect("at least one restart");
    let values: Vec<Vec<Vec<Q>>> = values
        .into_iter()
        .map(|tw| tw.into_iter().map(|f| f.into_iter().map(|v| Q::from_float(v).expect("finite")).collect()).collect())
        .collect();
    let towers = NumericTowers { d: params.d, values };
    let best_residual = residual(ga, &towers, test_set)?;
    let within_epsilon = q_to_f64(&best_residual) < params.epsilon;
    Ok(SearchOutcome { towers, best_residual, restart, within_epsilon })
}
