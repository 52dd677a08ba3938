//! Partial actions of finite groups on finite sets.
//!
//! A partial action consists of domains `X_g ⊆ X` and bijections
//! `θ_g : X_{g⁻¹} → X_g` with `X_1 = X`, `θ_1 = id` and `θ_g ∘ θ_h ⊆ θ_{gh}`.
//! On function algebras the induced action is `α_g(f) = f ∘ θ_{g⁻¹}` on
//! `X_g`, extended by zero.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{build_group, Element, FiniteGroup, GroupError, GroupSpec, Subgroup};

pub type Point = usize;

/// Unvalidated partial-action data, indexed by group element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawPartialAction {
    pub group: GroupSpec,
    pub size: usize,
    /// `domains[g]` lists the points of `X_g`.
    pub domains: Vec<Vec<Point>>,
    /// `maps[g]` lists pairs `(x, θ_g(x))` for `x ∈ X_{g⁻¹}`.
    pub maps: Vec<Vec<(Point, Point)>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("expected {expected} {what} entries (one per group element), found {found}")]
    WrongElementCount { what: &'static str, expected: usize, found: usize },
    #[error("point {point} listed for element {g} is outside the carrier")]
    PointOutOfRange { g: Element, point: Point },
    #[error("the identity domain is not the whole carrier (point {missing} missing)")]
    IdentityDomainNotFull { missing: Point },
    #[error("map for element {g} is not a bijection X_(g^-1) -> X_g: {detail}")]
    NotBijective { g: Element, detail: String },
    #[error("map for element {g} is not inverted by the map for its inverse at point {x}")]
    InverseMismatch { g: Element, x: Point },
    #[error("composition axiom fails for g={g}, h={h} at point {x}")]
    CompositionViolation { g: Element, h: Element, x: Point },
}

/// A validated partial action.
#[derive(Clone, PartialEq, Eq)]
pub struct PartialAction {
    group: Arc<FiniteGroup>,
    size: usize,
    /// `maps[g][x] = Some(θ_g(x))` iff `x ∈ X_{g⁻¹}`.
    maps: Vec<Vec<Option<Point>>>,
    /// `dom[g][x]` iff `x ∈ X_g`.
    dom: Vec<Vec<bool>>,
}

impl fmt::Debug for PartialAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PartialAction")
            .field("group", &self.group)
            .field("size", &self.size)
            .field("domains", &self.group.elements().map(|g| self.domain(g)).collect::<Vec<_>>())
            .finish()
    }
}

/// Validates raw data, building the group with the default order cap.
pub fn validate(raw: &RawPartialAction) -> Result<PartialAction, ValidationError> {
    let group = Arc::new(build_group(&raw.group)?);
    PartialAction::new(group, raw.size, &raw.domains, &raw.maps)
}

impl PartialAction {
    pub fn new(
        group: Arc<FiniteGroup>,
        size: usize,
        domains: &[Vec<Point>],
        maps: &[Vec<(Point, Point)>],
    ) -> Result<Self, ValidationError> {
        let order = group.order();
        if domains.len() != order {
            return Err(ValidationError::WrongElementCount {
                what: "domain",
                expected: order,
                found: domains.len(),
            });
        }
        if maps.len() != order {
            return Err(ValidationError::WrongElementCount {
                what: "map",
                expected: order,
                found: maps.len(),
            });
        }
        let mut dom = vec![vec![false; size]; order];
        for (g, d) in domains.iter().enumerate() {
            for &x in d {
                if x >= size {
                    return Err(ValidationError::PointOutOfRange { g, point: x });
                }
                dom[g][x] = true;
            }
        }
        if let Some(missing) = (0..size).find(|&x| !dom[0][x]) {
            return Err(ValidationError::IdentityDomainNotFull { missing });
        }
        let mut table = vec![vec![None; size]; order];
        for (g, pairs) in maps.iter().enumerate() {
            let ginv = group.inv(g);
            let mut hit = vec![false; size];
            for &(x, y) in pairs {
                for p in [x, y] {
                    if p >= size {
                        return Err(ValidationError::PointOutOfRange { g, point: p });
                    }
                }
                if !dom[ginv][x] {
                    return Err(ValidationError::NotBijective {
                        g,
                        detail: format!("source {x} is not in X_(g^-1)"),
                    });
                }
                if !dom[g][y] {
                    return Err(ValidationError::NotBijective {
                        g,
                        detail: format!("target {y} is not in X_g"),
                    });
                }
                if table[g][x].is_some() {
                    return Err(ValidationError::NotBijective {
                        g,
                        detail: format!("source {x} mapped twice"),
                    });
                }
                if hit[y] {
                    return Err(ValidationError::NotBijective {
                        g,
                        detail: format!("target {y} hit twice"),
                    });
                }
                hit[y] = true;
                table[g][x] = Some(y);
            }
            if let Some(x) = (0..size).find(|&x| dom[ginv][x] && table[g][x].is_none()) {
                return Err(ValidationError::NotBijective {
                    g,
                    detail: format!("source {x} in X_(g^-1) is unmapped"),
                });
            }
            if let Some(y) = (0..size).find(|&y| dom[g][y] && !hit[y]) {
                return Err(ValidationError::NotBijective {
                    g,
                    detail: format!("target {y} in X_g is not hit"),
                });
            }
        }
        for g in 0..order {
            let ginv = group.inv(g);
            for x in 0..size {
                if let Some(y) = table[g][x] {
                    if table[ginv][y] != Some(x) {
                        return Err(ValidationError::InverseMismatch { g, x });
                    }
                }
            }
        }
        for g in 0..order {
            for h in 0..order {
                let gh = group.mul(g, h);
                for x in 0..size {
                    let Some(hx) = table[h][x] else { continue };
                    let Some(ghx) = table[g][hx] else { continue };
                    if table[gh][x] != Some(ghx) {
                        return Err(ValidationError::CompositionViolation { g, h, x });
                    }
                }
            }
        }
        Ok(PartialAction { group, size, maps: table, dom })
    }

    /// The global action of `G` on itself by left translation, or any global
    /// action given by a permutation per element.
    pub fn global(group: Arc<FiniteGroup>, perms: &[Vec<Point>]) -> Result<Self, ValidationError> {
        let size = perms.first().map_or(0, Vec::len);
        let all: Vec<Point> = (0..size).collect();
        let domains = vec![all; group.order()];
        let maps: Vec<Vec<(Point, Point)>> =
            perms.iter().map(|p| p.iter().copied().enumerate().collect()).collect();
        Self::new(group, size, &domains, &maps)
    }

    /// The trivial partial action: `X_g = ∅` for `g ≠ 1`.
    pub fn trivial(group: Arc<FiniteGroup>, size: usize) -> Self {
        let order = group.order();
        let mut domains = vec![Vec::new(); order];
        let mut maps = vec![Vec::new(); order];
        domains[0] = (0..size).collect();
        maps[0] = (0..size).map(|x| (x, x)).collect();
        Self::new(group, size, &domains, &maps).expect("trivial partial action is valid")
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    /// Number of carrier points.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    #[inline]
    pub fn in_domain(&self, g: Element, x: Point) -> bool {
        self.dom[g][x]
    }

    /// `θ_g(x)` when `x ∈ X_{g⁻¹}`.
    #[inline]
    pub fn apply(&self, g: Element, x: Point) -> Option<Point> {
        self.maps[g][x]
    }

    pub fn domain(&self, g: Element) -> Vec<Point> {
        (0..self.size).filter(|&x| self.dom[g][x]).collect()
    }

    pub fn domain_size(&self, g: Element) -> usize {
        self.dom[g].iter().filter(|&&b| b).count()
    }

    /// `τ(x) = {g : x ∈ X_g}`, sorted.
    pub fn domain_tuple(&self, x: Point) -> Vec<Element> {
        self.group.elements().filter(|&g| self.dom[g][x]).collect()
    }

    pub fn is_global(&self) -> bool {
        self.dom.iter().all(|d| d.iter().all(|&b| b))
    }

    /// All arrows `(g, x, θ_g(x))`, ordered by `g` then `x`.
    pub fn arrows(&self) -> Vec<Arrow> {
        let mut out = Vec::new();
        for g in self.group.elements() {
            for x in 0..self.size {
                if let Some(y) = self.maps[g][x] {
                    out.push(Arrow { g, source: x, target: y });
                }
            }
        }
        out
    }

    /// Back to raw form (the inverse of [`validate`] on valid input).
    pub fn to_raw(&self) -> RawPartialAction {
        RawPartialAction {
            group: self.group.spec().clone(),
            size: self.size,
            domains: self.group.elements().map(|g| self.domain(g)).collect(),
            maps: self
                .group
                .elements()
                .map(|g| {
                    (0..self.size).filter_map(|x| self.maps[g][x].map(|y| (x, y))).collect()
                })
                .collect(),
        }
    }

    /// `α_g(f) = f ∘ θ_{g⁻¹}` on `X_g`, zero elsewhere. Only the values of `f`
    /// on `X_{g⁻¹}` matter.
    pub fn alpha<T: Clone + Zero>(&self, g: Element, f: &[T]) -> Vec<T> {
        let ginv = self.group.inv(g);
        (0..self.size)
            .map(|y| match self.maps[ginv][y] {
                Some(x) => f[x].clone(),
                None => T::zero(),
            })
            .collect()
    }

    /// Indicator function `1_g` of `X_g`.
    pub fn unit<T: Zero + num_traits::One>(&self, g: Element) -> Vec<T> {
        self.dom[g].iter().map(|&b| if b { T::one() } else { T::zero() }).collect()
    }

    /// Whether every nonidentity element acts without fixed points.
    pub fn freeness(&self) -> Freeness {
        for g in self.group.elements().skip(1) {
            for x in 0..self.size {
                if self.maps[g][x] == Some(x) {
                    return Freeness { free: false, witness: Some((g, x)) };
                }
            }
        }
        Freeness { free: true, witness: None }
    }

    pub fn is_free(&self) -> bool {
        self.freeness().free
    }

    pub fn translation_groupoid(&self) -> TranslationGroupoid {
        TranslationGroupoid::new(self)
    }

    /// Restriction to a subset, which must be a union of orbits.
    pub fn restrict(&self, subset: &[Point]) -> Result<SubAction, InvarianceError> {
        let mut inside = vec![false; self.size];
        for &x in subset {
            if x >= self.size {
                return Err(InvarianceError::PointOutOfRange(x));
            }
            inside[x] = true;
        }
        for a in self.arrows() {
            if inside[a.source] != inside[a.target] {
                let a = if inside[a.source] {
                    a
                } else {
                    Arrow { g: self.group.inv(a.g), source: a.target, target: a.source }
                };
                return Err(InvarianceError::NotInvariant { witness: a });
            }
        }
        let points: Vec<Point> = (0..self.size).filter(|&x| inside[x]).collect();
        Ok(self.restrict_unchecked(points))
    }

    /// Restriction to an arbitrary subset `S`: `θ_g` is cut down to the
    /// pairs with both ends in `S`.
    pub fn restrict_to(&self, subset: &[Point]) -> SubAction {
        let mut points: Vec<Point> = subset.iter().copied().filter(|&x| x < self.size).collect();
        points.sort_unstable();
        points.dedup();
        let mut index = vec![usize::MAX; self.size];
        for (i, &x) in points.iter().enumerate() {
            index[x] = i;
        }
        let order = self.order();
        let mut domains = vec![Vec::new(); order];
        let mut maps = vec![Vec::new(); order];
        for g in 0..order {
            for (i, &x) in points.iter().enumerate() {
                if let Some(y) = self.maps[g][x] {
                    if index[y] != usize::MAX {
                        maps[g].push((i, index[y]));
                        domains[g].push(index[y]);
                    }
                }
            }
            domains[g].sort_unstable();
        }
        let action = PartialAction::new(self.group.clone(), points.len(), &domains, &maps)
            .expect("restriction of a partial action is a partial action");
        SubAction { action, points }
    }

    pub(crate) fn restrict_unchecked(&self, points: Vec<Point>) -> SubAction {
        let mut index = vec![usize::MAX; self.size];
        for (i, &x) in points.iter().enumerate() {
            index[x] = i;
        }
        let order = self.order();
        let mut domains = vec![Vec::new(); order];
        let mut maps = vec![Vec::new(); order];
        for g in 0..order {
            for (i, &x) in points.iter().enumerate() {
                if self.dom[g][x] {
                    domains[g].push(i);
                }
                if let Some(y) = self.maps[g][x] {
                    maps[g].push((i, index[y]));
                }
            }
        }
        let action = PartialAction::new(self.group.clone(), points.len(), &domains, &maps)
            .expect("restriction to an invariant subset is a partial action");
        SubAction { action, points }
    }

    /// Splits along an invariant subset: the restriction to `subset` and the
    /// restriction to its complement (the quotient by the corresponding
    /// invariant ideal).
    pub fn restrict_and_quotient(
        &self,
        subset: &[Point],
    ) -> Result<(SubAction, SubAction), InvarianceError> {
        let ideal = self.restrict(subset)?;
        let keep: BTreeSet<Point> = ideal.points.iter().copied().collect();
        let rest: Vec<Point> = (0..self.size).filter(|x| !keep.contains(x)).collect();
        Ok((ideal, self.restrict_unchecked(rest)))
    }

    /// Adjoins a point `∞ = size` lying only in `X_1`.
    pub fn minimal_partial_unitization(&self) -> PartialAction {
        let n = self.size;
        let mut raw_domains: Vec<Vec<Point>> = self.group.elements().map(|g| self.domain(g)).collect();
        raw_domains[0].push(n);
        let mut raw_maps = self.to_raw().maps;
        raw_maps[0].push((n, n));
        PartialAction::new(self.group.clone(), n + 1, &raw_domains, &raw_maps)
            .expect("unitization is a partial action")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Arrow {
    pub g: Element,
    pub source: Point,
    pub target: Point,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Freeness {
    pub free: bool,
    /// `(g, x)` with `g ≠ 1`, `x ∈ X_{g⁻¹}` and `θ_g(x) = x`.
    pub witness: Option<(Element, Point)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvarianceError {
    #[error("point {0} is outside the carrier")]
    PointOutOfRange(Point),
    #[error("subset is not invariant: arrow ({}, {} -> {}) leaves it", witness.g, witness.source, witness.target)]
    NotInvariant { witness: Arrow },
}

/// A restriction together with the original indices of its points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubAction {
    pub action: PartialAction,
    /// `points[i]` is the original index of point `i`.
    pub points: Vec<Point>,
}

/// Arrows, orbits and isotropy of a partial action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationGroupoid {
    pub arrows: Vec<Arrow>,
    /// Orbits, each sorted, ordered by least point.
    pub orbits: Vec<Vec<Point>>,
    /// `orbit_index[x]` is the orbit containing `x`.
    pub orbit_index: Vec<usize>,
    /// Isotropy group at each orbit's least point.
    pub stabilizers: Vec<Subgroup>,
}

impl TranslationGroupoid {
    fn new(pa: &PartialAction) -> Self {
        let arrows = pa.arrows();
        let n = pa.size();
        let mut orbit_index = vec![usize::MAX; n];
        let mut orbits = Vec::new();
        for start in 0..n {
            if orbit_index[start] != usize::MAX {
                continue;
            }
            // Arrows compose, so the orbit of x is {θ_g(x)}.
            let id = orbits.len();
            let mut orbit: Vec<Point> =
                pa.group.elements().filter_map(|g| pa.apply(g, start)).collect();
            orbit.sort_unstable();
            orbit.dedup();
            for &y in &orbit {
                orbit_index[y] = id;
            }
            orbits.push(orbit);
        }
        let stabilizers = orbits
            .iter()
            .map(|o| stabilizer(pa, o[0]))
            .collect();
        TranslationGroupoid { arrows, orbits, orbit_index, stabilizers }
    }

    pub fn orbit_count(&self) -> usize {
        self.orbits.len()
    }
}

/// `{g : x ∈ X_{g⁻¹}, θ_g(x) = x}`.
pub fn stabilizer(pa: &PartialAction, x: Point) -> Subgroup {
    let members: Vec<Element> = pa.group.elements().filter(|&g| pa.apply(g, x) == Some(x)).collect();
    pa.group.subgroup(&members).expect("isotropy is a subgroup")
}

/// Parameters of [`random_partial_action`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomParams {
    pub group: GroupSpec,
    /// Size of the ambient global `G`-set.
    pub ambient: usize,
    /// Probability that an ambient point is kept, in `[0, 1]`.
    pub keep: f64,
}

/// Restricts a random global action to a random subset.
///
/// The ambient `G`-set is a disjoint union of coset spaces `G/H` of total
/// size exactly `ambient`; each point is then kept independently.
pub fn random_partial_action(seed: u64, params: &RandomParams) -> Result<PartialAction, GroupError> {
    let group = Arc::new(build_group(&params.group)?);
    Ok(random_partial_action_in(seed, &group, params.ambient, params.keep))
}

pub fn random_partial_action_in(
    seed: u64,
    group: &Arc<FiniteGroup>,
    ambient: usize,
    keep: f64,
) -> PartialAction {
    let keep = keep.clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let subgroups = all_small_subgroups(group);
    let order = group.order();

    // global action as permutations of 0..ambient
    let mut perms: Vec<Vec<Point>> = vec![Vec::with_capacity(ambient); order];
    let mut filled = 0;
    while filled < ambient {
        let remaining = ambient - filled;
        let fitting: Vec<&Subgroup> =
            subgroups.iter().filter(|h| order / h.order() <= remaining).collect();
        // Favour free orbits half of the time when they fit.
        let h = if order <= remaining && rng.gen_bool(0.5) {
            &subgroups[0]
        } else {
            fitting.choose(&mut rng).expect("whole group always fits")
        };
        let cosets = group
            .coset_decomposition(h, crate::group::CosetSide::Left)
            .expect("subgroup of this group");
        let coset_of = |g: Element| cosets.iter().position(|c| c.contains(&g)).unwrap();
        for (g, perm) in perms.iter_mut().enumerate() {
            for c in &cosets {
                perm.push(filled + coset_of(group.mul(g, c[0])));
            }
        }
        filled += cosets.len();
    }

    let kept: Vec<bool> = (0..ambient).map(|_| rng.gen_bool(keep)).collect();
    let points: Vec<Point> = (0..ambient).filter(|&y| kept[y]).collect();
    let mut index = vec![usize::MAX; ambient];
    for (i, &y) in points.iter().enumerate() {
        index[y] = i;
    }
    let mut domains = vec![Vec::new(); order];
    let mut maps = vec![Vec::new(); order];
    for g in 0..order {
        let ginv = group.inv(g);
        for (i, &y) in points.iter().enumerate() {
            if kept[perms[ginv][y]] {
                domains[g].push(i);
            }
            let gy = perms[g][y];
            if kept[gy] {
                maps[g].push((i, index[gy]));
            }
        }
    }
    PartialAction::new(group.clone(), points.len(), &domains, &maps)
        .expect("restriction of a global action is a partial action")
}

/// Subgroups generated by at most two elements, trivial subgroup first.
fn all_small_subgroups(group: &FiniteGroup) -> Vec<Subgroup> {
    let mut set = BTreeSet::new();
    for a in group.elements() {
        for b in group.elements() {
            set.insert(group.subgroup_closure(&[a, b]).expect("in range"));
        }
    }
    let mut v: Vec<Subgroup> = set.into_iter().collect();
    v.sort_by_key(|h| (h.order(), h.members().to_vec()));
    v
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn c2() -> Arc<FiniteGroup> {
        Arc::new(build_group(&GroupSpec::cyclic(2)).unwrap())
    }

    /// Cyclic(2) on {0,1,2}, the generator swapping 0 and 1.
    pub fn ri1() -> PartialAction {
        PartialAction::new(
            c2(),
            3,
            &[vec![0, 1, 2], vec![0, 1]],
            &[vec![(0, 0), (1, 1), (2, 2)], vec![(0, 1), (1, 0)]],
        )
        .unwrap()
    }

    /// Cyclic(2) fixing a single point.
    pub fn ri2() -> PartialAction {
        PartialAction::new(c2(), 1, &[vec![0], vec![0]], &[vec![(0, 0)], vec![(0, 0)]]).unwrap()
    }

    /// Trivial partial action of cyclic(2) on three points.
    pub fn ri3() -> PartialAction {
        PartialAction::trivial(c2(), 3)
    }
}
