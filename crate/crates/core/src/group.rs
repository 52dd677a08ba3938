//! Finite groups given by multiplication tables.
//!
//! Elements are dense indices `0..order` with `0` the identity. Named
//! families use a fixed ordering so instance files and reports are stable:
//!
//! * `cyclic(n)`: residues `0..n`, product is addition mod `n`.
//! * `dihedral(n)`: the symmetries of an `n`-gon (order `2n`); index `k < n`
//!   is the rotation `r^k`, index `n + k` is the reflection `s r^k`.
//! * `symmetric(n)`: permutations of `0..n` in lexicographic order, with
//!   `(p q)(i) = p(q(i))`.
//! * `klein4`: `Z/2 x Z/2` with `1 = (1,0)`, `2 = (0,1)`, `3 = (1,1)`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default cap on group order. Tuple spaces grow like `2^|G|`.
pub const DEFAULT_MAX_ORDER: usize = 24;

pub type Element = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("group table is empty")]
    Empty,
    #[error("group table row {row} has length {len}, expected {order}")]
    NotSquare { row: usize, len: usize, order: usize },
    #[error("table entry ({a}, {b}) = {value} is not an element")]
    EntryOutOfRange { a: Element, b: Element, value: usize },
    #[error("element 0 is not a two-sided identity: fails against element {element}")]
    NoIdentity { element: Element },
    #[error("element {element} has no inverse")]
    NoInverse { element: Element },
    #[error("table is not associative: ({a}*{b})*{c} != {a}*({b}*{c})")]
    NonAssociative { a: Element, b: Element, c: Element },
    #[error("group order {order} exceeds the configured maximum {max}")]
    OrderTooLarge { order: usize, max: usize },
    #[error("invalid family parameter: {0}")]
    BadParameter(String),
    #[error("element {element} out of range for a group of order {order}")]
    ElementOutOfRange { element: usize, order: usize },
    #[error("the given set is not a subgroup")]
    NotASubgroup,
}

/// How a group is described in instance files and generator parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Family { family: Family, #[serde(default)] n: usize },
    Table { table: Vec<Vec<usize>> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Cyclic,
    Dihedral,
    Symmetric,
    Klein4,
}

impl GroupSpec {
    pub fn cyclic(n: usize) -> Self {
        GroupSpec::Family { family: Family::Cyclic, n }
    }
    pub fn dihedral(n: usize) -> Self {
        GroupSpec::Family { family: Family::Dihedral, n }
    }
    pub fn symmetric(n: usize) -> Self {
        GroupSpec::Family { family: Family::Symmetric, n }
    }
    pub fn klein4() -> Self {
        GroupSpec::Family { family: Family::Klein4, n: 4 }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Family { family: Family::Klein4, .. } => write!(f, "klein4"),
            GroupSpec::Family { family, n } => {
                let name = match family {
                    Family::Cyclic => "cyclic",
                    Family::Dihedral => "dihedral",
                    Family::Symmetric => "symmetric",
                    Family::Klein4 => unreachable!(),
                };
                write!(f, "{name}({n})")
            }
            GroupSpec::Table { table } => write!(f, "table(order {})", table.len()),
        }
    }
}

/// A finite group as a validated multiplication table.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<Element>,
    inverse: Vec<Element>,
    spec: GroupSpec,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup({})", self.spec)
    }
}

/// Builds a group with the default order cap.
pub fn build_group(spec: &GroupSpec) -> Result<FiniteGroup, GroupError> {
    FiniteGroup::from_spec(spec, DEFAULT_MAX_ORDER)
}

impl FiniteGroup {
    pub fn from_spec(spec: &GroupSpec, max_order: usize) -> Result<Self, GroupError> {
        let table = match spec {
            GroupSpec::Family { family, n } => family_table(*family, *n, max_order)?,
            GroupSpec::Table { table } => table.clone(),
        };
        Self::from_table_with(table, spec.clone(), max_order)
    }

    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let spec = GroupSpec::Table { table: table.clone() };
        Self::from_table_with(table, spec, DEFAULT_MAX_ORDER)
    }

    fn from_table_with(
        rows: Vec<Vec<usize>>,
        spec: GroupSpec,
        max_order: usize,
    ) -> Result<Self, GroupError> {
        let order = rows.len();
        if order == 0 {
            return Err(GroupError::Empty);
        }
        if order > max_order {
            return Err(GroupError::OrderTooLarge { order, max: max_order });
        }
        let mut table = Vec::with_capacity(order * order);
        for (a, row) in rows.iter().enumerate() {
            if row.len() != order {
                return Err(GroupError::NotSquare { row: a, len: row.len(), order });
            }
            for (b, &value) in row.iter().enumerate() {
                if value >= order {
                    return Err(GroupError::EntryOutOfRange { a, b, value });
                }
                table.push(value);
            }
        }
        let mul = |a: usize, b: usize| table[a * order + b];
        for x in 0..order {
            if mul(0, x) != x || mul(x, 0) != x {
                return Err(GroupError::NoIdentity { element: x });
            }
        }
        let mut inverse = vec![0; order];
        for x in 0..order {
            match (0..order).find(|&y| mul(x, y) == 0 && mul(y, x) == 0) {
                Some(y) => inverse[x] = y,
                None => return Err(GroupError::NoInverse { element: x }),
            }
        }
        for a in 0..order {
            for b in 0..order {
                let ab = mul(a, b);
                for c in 0..order {
                    if mul(ab, c) != mul(a, mul(b, c)) {
                        return Err(GroupError::NonAssociative { a, b, c });
                    }
                }
            }
        }
        Ok(FiniteGroup { order, table, inverse, spec })
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: Element, b: Element) -> Element {
        self.table[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: Element) -> Element {
        self.inverse[a]
    }

    pub fn identity(&self) -> Element {
        0
    }

    pub fn elements(&self) -> std::ops::Range<Element> {
        0..self.order
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    /// The multiplication table as rows.
    pub fn table_rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    pub fn element_order(&self, g: Element) -> usize {
        let mut k = 1;
        let mut x = g;
        while x != 0 {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    fn check(&self, g: usize) -> Result<(), GroupError> {
        if g >= self.order {
            Err(GroupError::ElementOutOfRange { element: g, order: self.order })
        } else {
            Ok(())
        }
    }

    /// Smallest subgroup containing `seed`.
    pub fn subgroup_closure(&self, seed: &[Element]) -> Result<Subgroup, GroupError> {
        for &g in seed {
            self.check(g)?;
        }
        let mut members: BTreeSet<Element> = BTreeSet::from([0]);
        members.extend(seed.iter().copied());
        // In a finite group closure under products already gives inverses.
        loop {
            let current: Vec<_> = members.iter().copied().collect();
            let before = members.len();
            for &a in &current {
                for &b in &current {
                    members.insert(self.mul(a, b));
                }
            }
            if members.len() == before {
                break;
            }
        }
        Ok(Subgroup { members: members.into_iter().collect() })
    }

    /// Checks that `members` is a subgroup and wraps it.
    pub fn subgroup(&self, members: &[Element]) -> Result<Subgroup, GroupError> {
        for &g in members {
            self.check(g)?;
        }
        let set: BTreeSet<Element> = members.iter().copied().collect();
        if !set.contains(&0) {
            return Err(GroupError::NotASubgroup);
        }
        for &a in &set {
            if !set.contains(&self.inv(a)) {
                return Err(GroupError::NotASubgroup);
            }
            for &b in &set {
                if !set.contains(&self.mul(a, b)) {
                    return Err(GroupError::NotASubgroup);
                }
            }
        }
        Ok(Subgroup { members: set.into_iter().collect() })
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup { members: self.elements().collect() }
    }

    /// `H` as a group in its own right; element `i` is `h.members()[i]`.
    pub fn subgroup_as_group(&self, h: &Subgroup) -> FiniteGroup {
        let members = h.members();
        let local = |g: Element| members.binary_search(&g).expect("closed under products");
        let table = members
            .iter()
            .map(|&a| members.iter().map(|&b| local(self.mul(a, b))).collect())
            .collect();
        FiniteGroup::from_table(table).expect("a subgroup is a group")
    }

    /// Partition of `G` into cosets `gH` (left) or `Hg` (right), ordered by
    /// least element. Each block is sorted.
    pub fn coset_decomposition(
        &self,
        h: &Subgroup,
        side: CosetSide,
    ) -> Result<Vec<Vec<Element>>, GroupError> {
        // Re-validate: the subgroup may come from a different group.
        let h = self.subgroup(h.members())?;
        let mut seen = vec![false; self.order];
        let mut blocks = Vec::new();
        for g in self.elements() {
            if seen[g] {
                continue;
            }
            let mut block: Vec<Element> = h
                .members()
                .iter()
                .map(|&x| match side {
                    CosetSide::Left => self.mul(g, x),
                    CosetSide::Right => self.mul(x, g),
                })
                .collect();
            block.sort_unstable();
            for &x in &block {
                seen[x] = true;
            }
            blocks.push(block);
        }
        Ok(blocks)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CosetSide {
    Left,
    Right,
}

/// A subgroup, stored as its sorted member list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Subgroup {
    members: Vec<Element>,
}

impl Subgroup {
    pub fn members(&self) -> &[Element] {
        &self.members
    }
    pub fn order(&self) -> usize {
        self.members.len()
    }
    pub fn contains(&self, g: Element) -> bool {
        self.members.binary_search(&g).is_ok()
    }
    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }
}

fn family_table(family: Family, n: usize, max_order: usize) -> Result<Vec<Vec<usize>>, GroupError> {
    match family {
        Family::Cyclic => {
            if n == 0 {
                return Err(GroupError::BadParameter("cyclic(0)".into()));
            }
            if n > max_order {
                return Err(GroupError::OrderTooLarge { order: n, max: max_order });
            }
            Ok((0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect())
        }
        Family::Dihedral => {
            if n < 1 {
                return Err(GroupError::BadParameter("dihedral(0)".into()));
            }
            if 2 * n > max_order {
                return Err(GroupError::OrderTooLarge { order: 2 * n, max: max_order });
            }
            // (f, k) encodes s^f r^k; r^k s = s r^{-k}.
            let enc = |f: usize, k: usize| f * n + k;
            let mut rows = vec![vec![0; 2 * n]; 2 * n];
            for (a, row) in rows.iter_mut().enumerate() {
                let (fa, ka) = (a / n, a % n);
                for (b, entry) in row.iter_mut().enumerate() {
                    let (fb, kb) = (b / n, b % n);
                    // s^fa r^ka s^fb r^kb = s^(fa+fb) r^(±ka + kb)
                    let k = if fb == 0 { ka + kb } else { n - ka + kb };
                    *entry = enc((fa + fb) % 2, k % n);
                }
            }
            Ok(rows)
        }
        Family::Symmetric => {
            if n == 0 {
                return Err(GroupError::BadParameter("symmetric(0)".into()));
            }
            let order: usize = (1..=n).product();
            if order > max_order {
                return Err(GroupError::OrderTooLarge { order, max: max_order });
            }
            let perms = permutations(n);
            let index = |p: &Vec<usize>| perms.binary_search(p).expect("closed under composition");
            Ok(perms
                .iter()
                .map(|p| {
                    perms
                        .iter()
                        .map(|q| index(&(0..n).map(|i| p[q[i]]).collect()))
                        .collect()
                })
                .collect())
        }
        Family::Klein4 => {
            if 4 > max_order {
                return Err(GroupError::OrderTooLarge { order: 4, max: max_order });
            }
            Ok((0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect())
        }
    }
}

/// All permutations of `0..n` in lexicographic order.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}
