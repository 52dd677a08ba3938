#![allow(dead_code)]

use std::sync::Arc;

use parok::action::PartialAction;
use parok::group::{build_group, FiniteGroup, GroupSpec};

pub fn c2() -> Arc<FiniteGroup> {
    Arc::new(build_group(&GroupSpec::cyclic(2)).unwrap())
}

pub fn group(spec: GroupSpec) -> Arc<FiniteGroup> {
    Arc::new(build_group(&spec).unwrap())
}

/// The generator swaps 0 and 1; point 2 lies only in the identity domain.
pub fn ri1() -> PartialAction {
    PartialAction::new(
        c2(),
        3,
        &[vec![0, 1, 2], vec![0, 1]],
        &[vec![(0, 0), (1, 1), (2, 2)], vec![(0, 1), (1, 0)]],
    )
    .unwrap()
}

/// The generator fixes the only point.
pub fn ri2() -> PartialAction {
    PartialAction::new(c2(), 1, &[vec![0], vec![0]], &[vec![(0, 0)], vec![(0, 0)]]).unwrap()
}

/// Only the identity acts, on three points.
pub fn ri3() -> PartialAction {
    PartialAction::trivial(c2(), 3)
}
