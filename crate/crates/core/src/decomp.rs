//! The n-decomposition property, the tuple-size stratification and the
//! orbit-type decomposition of decomposable partial actions.
//!
//! For `σ ⊆ G` write `X_σ = ∩_{g∈σ} X_g`. A point's domain tuple is
//! `τ(x) = {g : x ∈ X_g}`; `θ_g` carries `τ(x)` to `g·τ(x)`, so each stratum
//! `X_{=k} = {x : |τ(x)| = k}` is invariant.

use std::sync::Arc;

use thiserror::Error;

use crate::action::{PartialAction, Point, SubAction};
use crate::group::{Element, FiniteGroup};
use crate::tuples::{orbit_of, stabilizer_and_section, tuple_space, Tuple};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompError {
    #[error("point {0} is outside the carrier")]
    PointOutOfRange(Point),
    #[error("not {n}-decomposable: point {point} lies in {found} domains")]
    NotDecomposable { n: usize, point: Point, found: usize },
    #[error("X_tau is empty for tau = {0:?}")]
    EmptyStratum(Tuple),
    #[error("{0:?} is not an n-tuple containing the identity")]
    BadTuple(Vec<Element>),
}

pub fn domain_tuple(pa: &PartialAction, x: Point) -> Result<Tuple, DecompError> {
    if x >= pa.size() {
        return Err(DecompError::PointOutOfRange(x));
    }
    Ok(pa.domain_tuple(x))
}

/// `X_σ`.
pub fn intersection_of_domains(pa: &PartialAction, sigma: &[Element]) -> Vec<Point> {
    (0..pa.size()).filter(|&x| sigma.iter().all(|&g| pa.in_domain(g, x))).collect()
}

/// Pointwise criterion: every point lies in exactly `n` domains.
fn pointwise_decomposable(pa: &PartialAction, n: usize) -> Option<(Point, usize)> {
    (0..pa.size())
        .map(|x| (x, pa.domain_tuple(x).len()))
        .find(|&(_, k)| k != n)
}

/// Set form: `X = ∪_{τ∈T_n} X_τ` and `X_τ ∩ X_g = ∅` for `g ∉ τ`.
fn set_form_decomposable(pa: &PartialAction, n: usize) -> bool {
    let Ok(ts) = tuple_space(pa.group().clone(), n) else {
        return false;
    };
    let mut covered = vec![false; pa.size()];
    for tau in &ts.tuples {
        let x_tau = intersection_of_domains(pa, tau);
        for &x in &x_tau {
            covered[x] = true;
            if pa.group().elements().any(|g| tau.binary_search(&g).is_err() && pa.in_domain(g, x)) {
                return false;
            }
        }
    }
    covered.into_iter().all(|c| c)
}

/// Checks both forms of the definition and asserts they agree.
pub fn is_n_decomposable(pa: &PartialAction, n: usize) -> bool {
    if n == 0 || n > pa.order() {
        return false;
    }
    let pointwise = pointwise_decomposable(pa, n).is_none();
    let set_form = set_form_decomposable(pa, n);
    assert_eq!(pointwise, set_form, "decomposability criteria disagree for n = {n}");
    pointwise
}

/// One step of the chain: `X_{=k}` is an invariant ideal of `X_{≤k}` with
/// quotient `X_{≤k−1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extension {
    pub k: usize,
    pub ideal: SubAction,
    pub total: SubAction,
    pub quotient: SubAction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stratification {
    /// `strata[k - 1] = X_{=k}` for `k = 1..=|G|`.
    pub strata: Vec<Vec<Point>>,
    /// Extensions for `k = 2..=|G|`, empty strata included.
    pub chain: Vec<Extension>,
}

pub fn stratification(pa: &PartialAction) -> Stratification {
    let order = pa.order();
    let mut strata = vec![Vec::new(); order];
    for x in 0..pa.size() {
        strata[pa.domain_tuple(x).len() - 1].push(x);
    }
    let up_to = |k: usize| -> Vec<Point> {
        (0..pa.size()).filter(|&x| pa.domain_tuple(x).len() <= k).collect()
    };
    let chain = (2..=order)
        .map(|k| {
            let ideal = pa.restrict(&strata[k - 1]).expect("strata are invariant");
            let total = pa.restrict(&up_to(k)).expect("filtration levels are invariant");
            let quotient = pa.restrict(&up_to(k - 1)).expect("filtration levels are invariant");
            Extension { k, ideal, total, quotient }
        })
        .collect();
    Stratification { strata, chain }
}

/// Union of restrictions with disjoint point sets, re-indexed by original
/// points in increasing order.
pub fn glue(group: &Arc<FiniteGroup>, parts: &[&SubAction]) -> SubAction {
    let mut points: Vec<Point> = parts.iter().flat_map(|p| p.points.iter().copied()).collect();
    points.sort_unstable();
    let pos = |x: Point| points.binary_search(&x).expect("point of a part");
    let order = group.order();
    let mut domains = vec![Vec::new(); order];
    let mut maps = vec![Vec::new(); order];
    for part in parts {
        for g in 0..order {
            for (i, &x) in part.points.iter().enumerate() {
                if part.action.in_domain(g, i) {
                    domains[g].push(pos(x));
                }
                if let Some(j) = part.action.apply(g, i) {
                    maps[g].push((pos(x), pos(part.points[j])));
                }
            }
        }
    }
    let action = PartialAction::new(group.clone(), points.len(), &domains, &maps)
        .expect("disjoint union of partial actions");
    SubAction { action, points }
}

impl Stratification {
    /// Rebuilds `X_{≤|G|}` bottom-up from `X_{=1}` and the ideals, checking
    /// each intermediate total along the way.
    pub fn reassemble(&self, pa: &PartialAction) -> Option<PartialAction> {
        let mut current = pa.restrict(&self.strata[0]).ok()?;
        for ext in &self.chain {
            if current != ext.quotient {
                return None;
            }
            current = glue(pa.group(), &[&current, &ext.ideal]);
            if current != ext.total {
                return None;
            }
        }
        Some(current.action)
    }
}

/// The part `X_{G·τ_z}` of a decomposable action, with its subsystem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitTypePart {
    /// Representative `τ_z`: the lexicographically least tuple of the class.
    pub representative: Tuple,
    /// `X_{G·τ_z}`, sorted.
    pub points: Vec<Point>,
    /// `X_{τ_z}`, sorted.
    pub tau_points: Vec<Point>,
    pub subsystem: GlobalSubsystem,
}

/// `H_τ ↷ X_τ` as a global action of `H_τ` in its own numbering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalSubsystem {
    /// `elements[i]` is the element of `G` numbered `i` in the subgroup.
    pub elements: Vec<Element>,
    pub action: PartialAction,
    /// `points[i]` is the point of `X` numbered `i`.
    pub points: Vec<Point>,
}

fn check_decomposable(pa: &PartialAction, n: usize) -> Result<(), DecompError> {
    if let Some((point, found)) = pointwise_decomposable(pa, n) {
        return Err(DecompError::NotDecomposable { n, point, found });
    }
    Ok(())
}

/// Parts indexed by the `Lt`-orbit classes that occur, ordered by
/// representative.
pub fn orbit_type_decomposition(pa: &PartialAction, n: usize) -> Result<Vec<OrbitTypePart>, DecompError> {
    check_decomposable(pa, n)?;
    let group = pa.group();
    let mut reps: Vec<Tuple> = (0..pa.size())
        .map(|x| orbit_of(group, &pa.domain_tuple(x)).swap_remove(0))
        .collect();
    reps.sort();
    reps.dedup();
    reps.into_iter()
        .map(|tau| {
            // X_{G·τ} = ∪_{g ∈ τ⁻¹} X_{gτ}
            let mut points: Vec<Point> = tau
                .iter()
                .flat_map(|&t| {
                    let g = group.inv(t);
                    let shifted: Vec<Element> = tau.iter().map(|&s| group.mul(g, s)).collect();
                    intersection_of_domains(pa, &shifted)
                })
                .collect();
            points.sort_unstable();
            points.dedup();
            let subsystem = global_subsystem(pa, &tau)?;
            Ok(OrbitTypePart { tau_points: subsystem.points.clone(), representative: tau, points, subsystem })
        })
        .collect()
}

pub fn global_subsystem(pa: &PartialAction, tau: &[Element]) -> Result<GlobalSubsystem, DecompError> {
    let mut tau = tau.to_vec();
    tau.sort_unstable();
    tau.dedup();
    let n = tau.len();
    if tau.first() != Some(&0) || tau.iter().any(|&g| g >= pa.order()) {
        return Err(DecompError::BadTuple(tau));
    }
    check_decomposable(pa, n)?;
    let points = intersection_of_domains(pa, &tau);
    if points.is_empty() {
        return Err(DecompError::EmptyStratum(tau));
    }
    let group = pa.group();
    let section = stabilizer_and_section(group, &tau);
    let elements = section.stabilizer.members().to_vec();
    let h = Arc::new(group.subgroup_as_group(&section.stabilizer));
    let pos = |x: Point| points.binary_search(&x).expect("X_tau is invariant under H_tau");
    let perms: Vec<Vec<Point>> = elements
        .iter()
        .map(|&g| points.iter().map(|&x| pos(pa.apply(g, x).expect("X_tau ⊆ X_(h^-1)"))).collect())
        .collect();
    let action = PartialAction::global(h, &perms).expect("restriction of theta to X_tau is an action");
    Ok(GlobalSubsystem { elements, action, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::fixtures::*;

    #[test]
    fn domain_tuples() {
        let pa = ri1();
        assert_eq!(domain_tuple(&pa, 0).unwrap(), vec![0, 1]);
        assert_eq!(domain_tuple(&pa, 2).unwrap(), vec![0]);
        assert_eq!(domain_tuple(&pa, 3), Err(DecompError::PointOutOfRange(3)));
    }

    #[test]
    fn decomposability() {
        let pa = ri1();
        assert!(!is_n_decomposable(&pa, 1));
        assert!(!is_n_decomposable(&pa, 2));
        let sub = pa.restrict(&[0, 1]).unwrap().action;
        assert!(is_n_decomposable(&sub, 2));
        assert!(is_n_decomposable(&ri3(), 1));
        assert!(is_n_decomposable(&ri2(), 2));
    }

    #[test]
    fn ri1_strata_and_chain() {
        let pa = ri1();
        let s = stratification(&pa);
        assert_eq!(s.strata, vec![vec![2], vec![0, 1]]);
        assert_eq!(s.chain.len(), 1);
        assert_eq!(s.chain[0].quotient.points, vec![2]);
        assert_eq!(s.reassemble(&pa), Some(pa));

        let s = stratification(&ri3());
        assert_eq!(s.strata, vec![vec![0, 1, 2], vec![]]);
        assert_eq!(s.reassemble(&ri3()), Some(ri3()));
    }

    #[test]
    fn orbit_type_parts() {
        let sub = ri1().restrict(&[0, 1]).unwrap().action;
        let parts = orbit_type_decomposition(&sub, 2).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].representative, vec![0, 1]);
        assert_eq!(parts[0].tau_points, vec![0, 1]);
        assert_eq!(parts[0].subsystem.action.apply(1, 0), Some(1));

        let parts = orbit_type_decomposition(&ri3(), 1).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].subsystem.elements, vec![0]);
        assert_eq!(parts[0].points, vec![0, 1, 2]);

        assert!(matches!(
            orbit_type_decomposition(&ri1(), 2),
            Err(DecompError::NotDecomposable { n: 2, point: 2, found: 1 })
        ));
    }

    #[test]
    fn subsystems() {
        let sub = global_subsystem(&ri2(), &[0, 1]).unwrap();
        assert!(sub.action.is_global());
        assert_eq!(sub.action.apply(1, 0), Some(0));
        assert!(matches!(global_subsystem(&ri1(), &[0, 1]), Err(DecompError::NotDecomposable { .. })));
    }
}
