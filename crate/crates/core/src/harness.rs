//! Seeded randomized checks of the structural theorems on finite models.
//!
//! Each check draws a corpus of random partial actions, computes both sides
//! of an equality or inequality with the exact solver, and records every
//! disagreement together with a shrunk counterexample.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::action::{random_partial_action_in, PartialAction, Point, RawPartialAction};
use crate::bimodule::imprimitivity_bimodule_verify;
use crate::decomp::{orbit_type_decomposition, stratification};
use crate::fdcstar::{crossed_product_blocks, fixed_point_algebra, morita_equivalent};
use crate::globalize::globalize;
use crate::group::{build_group, GroupSpec};
use crate::par::{self, Exec};
use crate::rokhlin::{rokhlin_dimension, RokhlinDim, RokhlinError, RokhlinResult, SearchOptions};

pub const DEFAULT_COUNT: usize = 100;
pub const MAX_POINTS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HarnessOptions {
    pub exec: Exec,
    pub search: SearchOptions,
}

/// Groups of order 2, 3, 4 and 6.
pub fn corpus_groups() -> Vec<GroupSpec> {
    vec![
        GroupSpec::cyclic(2),
        GroupSpec::cyclic(3),
        GroupSpec::cyclic(4),
        GroupSpec::klein4(),
        GroupSpec::cyclic(6),
        GroupSpec::symmetric(3),
    ]
}

/// Per-instance seeds derived from the corpus seed.
pub fn instance_seeds(seed: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.gen()).collect()
}

/// One corpus instance: a random group, at most twelve points and a mixed
/// keep probability.
pub fn corpus_instance(instance_seed: u64) -> PartialAction {
    let mut rng = ChaCha8Rng::seed_from_u64(instance_seed);
    let specs = corpus_groups();
    let spec = specs.choose(&mut rng).expect("nonempty");
    let group = Arc::new(build_group(spec).expect("corpus groups are valid"));
    let ambient = rng.gen_range(1..=MAX_POINTS);
    let keep = *[0.4, 0.6, 0.8, 1.0].choose(&mut rng).expect("nonempty");
    random_partial_action_in(rng.gen(), &group, ambient, keep)
}

pub fn corpus(seed: u64, count: usize) -> Vec<PartialAction> {
    instance_seeds(seed, count).into_iter().map(corpus_instance).collect()
}

/// A corpus instance restricted to one nonempty stratum, hence
/// `n`-decomposable for some `n`.
pub fn decomposable_instance(instance_seed: u64) -> PartialAction {
    let pa = corpus_instance(instance_seed);
    let strata = stratification(&pa).strata;
    let nonempty: Vec<&Vec<Point>> = strata.iter().filter(|s| !s.is_empty()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(instance_seed ^ 0x5eed);
    match nonempty.choose(&mut rng) {
        Some(s) => pa.restrict(s).expect("strata are invariant").action,
        None => pa,
    }
}

/// A random union of groupoid orbits.
pub fn random_invariant_subset(pa: &PartialAction, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s: Vec<Point> = pa
        .translation_groupoid()
        .orbits
        .into_iter()
        .filter(|_| rng.gen_bool(0.5))
        .flatten()
        .collect();
    s.sort_unstable();
    s
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub index: usize,
    pub seed: u64,
    pub instance: RawPartialAction,
    /// Smallest failing restriction found by deleting points.
    pub minimal: RawPartialAction,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Note {
    pub index: usize,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckReport {
    pub theorem: String,
    pub statement: String,
    pub seed: u64,
    pub instance_count: usize,
    pub instance_seeds: Vec<u64>,
    pub passed: usize,
    pub failures: Vec<Failure>,
    /// Instances where the solver ran out of budget.
    pub undecided: Vec<Note>,
    /// Observations outside the theorem's hypothesis.
    pub informational: Vec<Note>,
}

impl CheckReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

enum Outcome {
    Pass,
    Fail { lhs: String, rhs: String },
    Undecided(String),
    Outside(String),
}

fn dim(pa: &PartialAction, opts: &HarnessOptions) -> Result<RokhlinResult, RokhlinError> {
    rokhlin_dimension(pa, &opts.search)
}

fn plus(a: RokhlinDim, b: RokhlinDim) -> RokhlinDim {
    match (a, b) {
        (RokhlinDim::Finite(x), RokhlinDim::Finite(y)) => RokhlinDim::Finite(x + y),
        _ => RokhlinDim::Infinite,
    }
}

macro_rules! solve {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return Outcome::Undecided(e.to_string()),
        }
    };
}

fn globalization_outcome(pa: &PartialAction, _s: &[Point], opts: &HarnessOptions) -> Outcome {
    let lhs = solve!(dim(pa, opts));
    let rhs = solve!(dim(&globalize(pa).envelope, opts));
    if (lhs.dim, lhs.dim_commuting) == (rhs.dim, rhs.dim_commuting) {
        Outcome::Pass
    } else {
        Outcome::Fail {
            lhs: format!("{} (commuting {})", lhs.dim, lhs.dim_commuting),
            rhs: format!("{} (commuting {})", rhs.dim, rhs.dim_commuting),
        }
    }
}

fn strata_outcome(pa: &PartialAction, _s: &[Point], opts: &HarnessOptions) -> Outcome {
    let n = match (0..pa.size()).map(|x| pa.domain_tuple(x).len()).max() {
        Some(n) => n,
        None => return Outcome::Pass,
    };
    let parts = match orbit_type_decomposition(pa, n) {
        Ok(p) => p,
        Err(e) => return Outcome::Outside(format!("not decomposable: {e}")),
    };
    let lhs = solve!(dim(pa, opts)).dim;
    let mut rhs = RokhlinDim::Finite(0);
    for part in &parts {
        rhs = rhs.max(solve!(dim(&part.subsystem.action, opts)).dim);
    }
    if lhs == rhs {
        Outcome::Pass
    } else {
        Outcome::Fail { lhs: lhs.to_string(), rhs: rhs.to_string() }
    }
}

fn split(pa: &PartialAction, s: &[Point]) -> (PartialAction, PartialAction) {
    let (inner, outer) = pa.restrict_and_quotient(s).expect("subset is invariant");
    (inner.action, outer.action)
}

fn monotonicity_outcome(pa: &PartialAction, s: &[Point], opts: &HarnessOptions) -> Outcome {
    let (inner, outer) = split(pa, s);
    let whole = solve!(dim(pa, opts)).dim;
    let a = solve!(dim(&inner, opts)).dim;
    let b = solve!(dim(&outer, opts)).dim;
    if a <= whole && b <= whole {
        Outcome::Pass
    } else {
        Outcome::Fail { lhs: format!("max({a}, {b})"), rhs: whole.to_string() }
    }
}

fn extension_outcome(pa: &PartialAction, s: &[Point], opts: &HarnessOptions) -> Outcome {
    let (inner, outer) = split(pa, s);
    let whole = solve!(dim(pa, opts)).dim;
    let a = solve!(dim(&inner, opts)).dim;
    let b = solve!(dim(&outer, opts)).dim;
    let bound = plus(plus(a, b), RokhlinDim::Finite(1));
    if whole <= bound {
        Outcome::Pass
    } else {
        Outcome::Fail { lhs: whole.to_string(), rhs: format!("{a} + {b} + 1") }
    }
}

fn free_iff_finite_outcome(pa: &PartialAction, _s: &[Point], opts: &HarnessOptions) -> Outcome {
    let d = solve!(dim(pa, opts)).dim;
    let free = pa.is_free();
    let expected = if free { RokhlinDim::Finite(0) } else { RokhlinDim::Infinite };
    if d == expected {
        Outcome::Pass
    } else {
        Outcome::Fail { lhs: d.to_string(), rhs: format!("free = {free}") }
    }
}

fn morita_outcome(pa: &PartialAction, _s: &[Point], opts: &HarnessOptions) -> Outcome {
    let d = solve!(dim(pa, opts)).dim;
    let cp = match crossed_product_blocks(pa, 0) {
        Ok(b) => b.combinatorial,
        Err(e) => return Outcome::Fail { lhs: "crossed product blocks".into(), rhs: e.to_string() },
    };
    let fixed = fixed_point_algebra(pa).algebra;
    let morita = morita_equivalent(&fixed, &cp);
    if d == RokhlinDim::Infinite {
        return Outcome::Outside(format!(
            "non-free: Morita equivalence {} (fixed point blocks {:?}, crossed product blocks {:?})",
            if morita { "holds" } else { "fails" },
            fixed.blocks,
            cp.blocks
        ));
    }
    let report = imprimitivity_bimodule_verify(pa, 0);
    if morita && report.all_hold() {
        Outcome::Pass
    } else {
        Outcome::Fail {
            lhs: format!("morita = {morita}, bimodule failures {:?}", report.failures),
            rhs: "morita = true, all bimodule clauses".into(),
        }
    }
}

type CheckFn = fn(&PartialAction, &[Point], &HarnessOptions) -> Outcome;

/// Deletes points while the check keeps failing.
fn shrink(pa: &PartialAction, s: &[Point], check: CheckFn, opts: &HarnessOptions) -> PartialAction {
    let mut current = pa.clone();
    let mut subset: Vec<Point> = s.to_vec();
    'outer: loop {
        for x in 0..current.size() {
            let keep: Vec<Point> = (0..current.size()).filter(|&y| y != x).collect();
            let sub = current.restrict_to(&keep);
            // arrows only disappear, so the subset stays invariant
            let new_subset: Vec<Point> = subset.iter().filter(|&&y| y != x).map(|&y| if y > x { y - 1 } else { y }).collect();
            if matches!(check(&sub.action, &new_subset, opts), Outcome::Fail { .. }) {
                current = sub.action;
                subset = new_subset;
                continue 'outer;
            }
        }
        return current;
    }
}

fn run_check(
    theorem: &str,
    statement: &str,
    seed: u64,
    count: usize,
    generate: fn(u64) -> PartialAction,
    needs_subset: bool,
    check: CheckFn,
    opts: &HarnessOptions,
) -> CheckReport {
    let seeds = instance_seeds(seed, count);
    let outcomes = par::map(opts.exec, seeds.iter().copied().enumerate().collect(), |(i, s)| {
        let pa = generate(s);
        let subset = if needs_subset { random_invariant_subset(&pa, s.rotate_left(17)) } else { Vec::new() };
        let outcome = check(&pa, &subset, opts);
        let minimal = match outcome {
            Outcome::Fail { .. } => Some(shrink(&pa, &subset, check, opts)),
            _ => None,
        };
        (i, s, pa, outcome, minimal)
    });
    let mut report = CheckReport {
        theorem: theorem.into(),
        statement: statement.into(),
        seed,
        instance_count: count,
        instance_seeds: seeds,
        passed: 0,
        failures: Vec::new(),
        undecided: Vec::new(),
        informational: Vec::new(),
    };
    for (index, s, pa, outcome, minimal) in outcomes {
        match outcome {
            Outcome::Pass => report.passed += 1,
            Outcome::Fail { lhs, rhs } => report.failures.push(Failure {
                index,
                seed: s,
                instance: pa.to_raw(),
                minimal: minimal.expect("shrunk on failure").to_raw(),
                lhs,
                rhs,
            }),
            Outcome::Undecided(text) => report.undecided.push(Note { index, text }),
            Outcome::Outside(text) => report.informational.push(Note { index, text }),
        }
    }
    report
}

pub fn check_globalization_theorem(seed: u64, count: usize, opts: &HarnessOptions) -> CheckReport {
    run_check(
        "globalization",
        "dim_Rok(pa) = dim_Rok(globalization), with and without commuting towers",
        seed,
        count,
        corpus_instance,
        false,
        globalization_outcome,
        opts,
    )
}

pub fn check_strata_theorem(seed: u64, count: usize, opts: &HarnessOptions) -> CheckReport {
    run_check(
        "strata",
        "dim_Rok of an n-decomposable pa = max over orbit types of dim_Rok(H_tau on X_tau)",
        seed,
        count,
        decomposable_instance,
        false,
        strata_outcome,
        opts,
    )
}

pub fn check_monotonicity(seed: u64, count: usize, opts: &HarnessOptions) -> CheckReport {
    run_check(
        "monotonicity",
        "dim_Rok(restriction) <= dim_Rok(pa) and dim_Rok(complement) <= dim_Rok(pa)",
        seed,
        count,
        corpus_instance,
        true,
        monotonicity_outcome,
        opts,
    )
}

pub fn check_morita(seed: u64, count: usize, opts: &HarnessOptions) -> CheckReport {
    run_check(
        "morita",
        "dim_Rok(pa) finite implies A^alpha Morita equivalent to the crossed product, via the imprimitivity bimodule",
        seed,
        count,
        corpus_instance,
        false,
        morita_outcome,
        opts,
    )
}

pub fn check_free_iff_finite(seed: u64, count: usize, opts: &HarnessOptions) -> CheckReport {
    run_check(
        "free-iff-finite",
        "dim_Rok(pa) finite iff pa is free, and then dim_Rok(pa) = 0 (stronger than the |G|-1 bound)",
        seed,
        count,
        corpus_instance,
        false,
        free_iff_finite_outcome,
        opts,
    )
}

pub fn check_extension_bound(seed: u64, count: usize, opts: &HarnessOptions) -> CheckReport {
    run_check(
        "extension-bound",
        "dim_Rok(pa) <= dim_Rok(restriction) + dim_Rok(complement) + 1",
        seed,
        count,
        corpus_instance,
        true,
        extension_outcome,
        opts,
    )
}

/// All six checks in a fixed order.
pub fn run_all(seed: u64, count: usize, opts: &HarnessOptions) -> Vec<CheckReport> {
    vec![
        check_globalization_theorem(seed, count, opts),
        check_strata_theorem(seed, count, opts),
        check_monotonicity(seed, count, opts),
        check_morita(seed, count, opts),
        check_free_iff_finite(seed, count, opts),
        check_extension_bound(seed, count, opts),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::fixtures::*;

    #[test]
    fn fixtures_pass_every_check() {
        let opts = HarnessOptions::default();
        for pa in [ri1(), ri2(), ri3()] {
            for check in [globalization_outcome, free_iff_finite_outcome] {
                assert!(matches!(check(&pa, &[], &opts), Outcome::Pass));
            }
        }
        let pair = ri1().restrict(&[0, 1]).unwrap().action;
        for pa in [pair, ri2(), ri3()] {
            assert!(matches!(strata_outcome(&pa, &[], &opts), Outcome::Pass));
        }
        assert!(matches!(strata_outcome(&ri1(), &[], &opts), Outcome::Outside(_)));
        assert!(matches!(morita_outcome(&ri1(), &[], &opts), Outcome::Pass));
        assert!(matches!(morita_outcome(&ri2(), &[], &opts), Outcome::Outside(_)));
    }

    #[test]
    fn reports_are_reproducible() {
        let opts = HarnessOptions::default();
        let a = check_free_iff_finite(3, 12, &opts);
        let b = check_free_iff_finite(3, 12, &HarnessOptions { exec: Exec::Sequential, ..opts });
        assert_eq!(a, b);
        assert!(a.ok());
        assert_eq!(a.passed, 12);
    }

    #[test]
    fn shrinking_reaches_a_minimal_instance() {
        // a deliberately false claim: every instance is free
        fn claim(pa: &PartialAction, _: &[Point], _: &HarnessOptions) -> Outcome {
            if pa.is_free() {
                Outcome::Pass
            } else {
                Outcome::Fail { lhs: "non-free".into(), rhs: "free".into() }
            }
        }
        assert!(matches!(claim(&ri1(), &[], &HarnessOptions::default()), Outcome::Pass));
        let pa = PartialAction::global(c2(), &[vec![0, 1, 2], vec![1, 0, 2]]).unwrap();
        let small = shrink(&pa, &[], claim, &HarnessOptions::default());
        assert_eq!(small.size(), 1);
    }
}
