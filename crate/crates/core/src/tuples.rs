//! The space `T_n(G)` of `n`-element subsets of `G` containing `1`, with the
//! left-translation partial action `Lt_g(τ) = gτ` defined for `g⁻¹ ∈ τ`.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::action::PartialAction;
use crate::group::{Element, FiniteGroup, Subgroup};

/// A tuple: sorted element indices, always containing `0`.
pub type Tuple = Vec<Element>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TupleError {
    #[error("n = {n} is outside 1..={order}")]
    NOutOfRange { n: usize, order: usize },
    #[error("{0:?} is not a tuple of this space")]
    TupleNotInSpace(Vec<Element>),
}

#[derive(Debug, Clone)]
pub struct TupleSpace {
    pub group: Arc<FiniteGroup>,
    pub n: usize,
    /// Tuples in lexicographic order.
    pub tuples: Vec<Tuple>,
    /// `Lt` as a partial action on tuple indices.
    pub lt: PartialAction,
    /// Orbits of `Lt` as sorted tuple indices, ordered by least member.
    pub orbits: Vec<Vec<usize>>,
    /// `kappa[t]` is the orbit of tuple `t`.
    pub kappa: Vec<usize>,
    /// `eta[z]` is the chosen representative tuple index of orbit `z`
    /// (the lexicographically least).
    pub eta: Vec<usize>,
    index: HashMap<Tuple, usize>,
}

/// `H_τ`, `m_τ` and a section `x_0 = 1, x_1, …, x_{m_τ}` of right cosets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleSection {
    pub stabilizer: Subgroup,
    pub m: usize,
    pub reps: Vec<Element>,
}

/// `gτ`, sorted.
pub fn translate(group: &FiniteGroup, g: Element, tau: &[Element]) -> Tuple {
    let mut t: Tuple = tau.iter().map(|&x| group.mul(g, x)).collect();
    t.sort_unstable();
    t
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn combinations(items: &[Element], k: usize) -> Vec<Vec<Element>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(items: &[Element], k: usize, start: usize, cur: &mut Vec<Element>, out: &mut Vec<Vec<Element>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(items, k, 0, &mut cur, &mut out);
    out
}

pub fn tuple_space(group: Arc<FiniteGroup>, n: usize) -> Result<TupleSpace, TupleError> {
    let order = group.order();
    if n == 0 || n > order {
        return Err(TupleError::NOutOfRange { n, order });
    }
    let others: Vec<Element> = group.elements().skip(1).collect();
    let tuples: Vec<Tuple> = combinations(&others, n - 1)
        .into_iter()
        .map(|mut rest| {
            rest.insert(0, 0);
            rest
        })
        .collect();
    let index: HashMap<Tuple, usize> = tuples.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();

    let mut domains = vec![Vec::new(); order];
    let mut maps = vec![Vec::new(); order];
    for g in group.elements() {
        let ginv = group.inv(g);
        for (i, t) in tuples.iter().enumerate() {
            if t.binary_search(&g).is_ok() {
                domains[g].push(i);
            }
            if t.binary_search(&ginv).is_ok() {
                maps[g].push((i, index[&translate(&group, g, t)]));
            }
        }
    }
    let lt = PartialAction::new(group.clone(), tuples.len(), &domains, &maps)
        .expect("left translation of tuples is a partial action");
    let groupoid = lt.translation_groupoid();
    let eta = groupoid.orbits.iter().map(|o| o[0]).collect();
    Ok(TupleSpace {
        group,
        n,
        tuples,
        lt,
        orbits: groupoid.orbits,
        kappa: groupoid.orbit_index,
        eta,
        index,
    })
}

impl TupleSpace {
    pub fn index_of(&self, tau: &[Element]) -> Result<usize, TupleError> {
        let mut t = tau.to_vec();
        t.sort_unstable();
        self.index
            .get(&t)
            .copied()
            .ok_or_else(|| TupleError::TupleNotInSpace(tau.to_vec()))
    }

    pub fn stabilizer_and_section(&self, tau: &[Element]) -> Result<TupleSection, TupleError> {
        let t = &self.tuples[self.index_of(tau)?];
        Ok(stabilizer_and_section(&self.group, t))
    }

    /// `G·τ = {gτ : g⁻¹ ∈ τ}`, in lexicographic order.
    pub fn orbit_of(&self, tau: &[Element]) -> Result<Vec<Tuple>, TupleError> {
        let t = &self.tuples[self.index_of(tau)?];
        Ok(orbit_of(&self.group, t))
    }
}

/// Set-level computation, independent of the `Lt` groupoid.
pub fn orbit_of(group: &FiniteGroup, tau: &[Element]) -> Vec<Tuple> {
    let mut out: Vec<Tuple> = tau.iter().map(|&x| translate(group, group.inv(x), tau)).collect();
    out.sort();
    out.dedup();
    out
}

pub fn stabilizer_and_section(group: &FiniteGroup, tau: &[Element]) -> TupleSection {
    let members: Vec<Element> =
        tau.iter().copied().filter(|&h| translate(group, h, tau) == tau).collect();
    let stabilizer = group.subgroup(&members).expect("stabilizer of a set is a subgroup");
    let mut covered = vec![false; group.order()];
    let mut reps = Vec::new();
    for &x in tau {
        if covered[x] {
            continue;
        }
        reps.push(x);
        for &h in stabilizer.members() {
            covered[group.mul(h, x)] = true;
        }
    }
    let m = tau.len() / stabilizer.order() - 1;
    TupleSection { stabilizer, m, reps }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_group, GroupSpec};

    fn grp(spec: GroupSpec) -> Arc<FiniteGroup> {
        Arc::new(build_group(&spec).unwrap())
    }

    #[test]
    fn small_spaces() {
        let ts = tuple_space(grp(GroupSpec::cyclic(5)), 1).unwrap();
        assert_eq!(ts.tuples, vec![vec![0]]);
        assert_eq!(ts.lt, PartialAction::trivial(ts.group.clone(), 1));

        let ts = tuple_space(grp(GroupSpec::cyclic(3)), 2).unwrap();
        assert_eq!(ts.tuples, vec![vec![0, 1], vec![0, 2]]);
        assert_eq!(ts.lt.apply(1, 1), Some(0));
        assert_eq!(ts.orbits.len(), 1);
        assert_eq!(ts.eta, vec![0]);

        assert_eq!(tuple_space(grp(GroupSpec::cyclic(4)), 3).unwrap().tuples.len(), 3);
        assert!(matches!(
            tuple_space(grp(GroupSpec::cyclic(4)), 5),
            Err(TupleError::NOutOfRange { .. })
        ));
    }

    #[test]
    fn sections() {
        let ts = tuple_space(grp(GroupSpec::cyclic(2)), 2).unwrap();
        let s = ts.stabilizer_and_section(&[0, 1]).unwrap();
        assert_eq!((s.stabilizer.order(), s.m, s.reps), (2, 0, vec![0]));

        let ts = tuple_space(grp(GroupSpec::cyclic(3)), 2).unwrap();
        let s = ts.stabilizer_and_section(&[0, 1]).unwrap();
        assert_eq!((s.stabilizer.order(), s.m, s.reps), (1, 1, vec![0, 1]));

        let ts = tuple_space(grp(GroupSpec::symmetric(3)), 6).unwrap();
        let s = ts.stabilizer_and_section(&[0, 1, 2, 3, 4, 5]).unwrap();
        assert_eq!((s.stabilizer.order(), s.m), (6, 0));
        assert!(matches!(ts.stabilizer_and_section(&[1]), Err(TupleError::TupleNotInSpace(_))));
    }

    #[test]
    fn orbits() {
        let ts = tuple_space(grp(GroupSpec::cyclic(3)), 2).unwrap();
        assert_eq!(ts.orbit_of(&[0, 1]).unwrap(), vec![vec![0, 1], vec![0, 2]]);
        let ts = tuple_space(grp(GroupSpec::cyclic(4)), 4).unwrap();
        assert_eq!(ts.orbit_of(&[0, 1, 2, 3]).unwrap().len(), 1);
        let ts = tuple_space(grp(GroupSpec::cyclic(4)), 2).unwrap();
        assert_eq!(ts.orbit_of(&[0, 2]).unwrap(), vec![vec![0, 2]]);
    }
}
