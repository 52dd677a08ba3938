//! Worked examples, one block per module.

mod common;

use common::*;
use num_traits::{One, Zero};
use parok::action::{random_partial_action, validate, PartialAction, RandomParams, RawPartialAction, ValidationError};
use parok::decomp::{global_subsystem, is_n_decomposable, orbit_type_decomposition, stratification};
use parok::exact::{q, q_frac, Q};
use parok::fdcstar::{
    block_structure, crossed_product, crossed_product_blocks_combinatorial, fixed_point_algebra, isomorphic,
    morita_equivalent, FdAlgebra,
};
use parok::bimodule::imprimitivity_bimodule_verify;
use parok::globalize::{central_splitting, globalize, verify_globalization};
use parok::grid::{example_3_2, example_3_2_global, example_4_5, residual, GridAction, GridError, NumericTowers};
use parok::group::{build_group, CosetSide, FiniteGroup, GroupError, GroupSpec};
use parok::rokhlin::{
    orthogonal_lifts, rokhlin_dimension, towers_exist, verify_certificate, CertificateViolation, RokhlinDim,
    SearchOptions, TowerCertificate, TowerSearch,
};
use parok::tuples::tuple_space;

fn opts() -> SearchOptions {
    SearchOptions::default()
}

// groups

#[test]
fn cyclic_two_adds_mod_two() {
    let g = build_group(&GroupSpec::cyclic(2)).unwrap();
    assert_eq!(g.order(), 2);
    assert_eq!(g.table_rows(), vec![vec![0, 1], vec![1, 0]]);
}

#[test]
fn klein_table_is_all_involutions() {
    let table = vec![vec![0, 1, 2, 3], vec![1, 0, 3, 2], vec![2, 3, 0, 1], vec![3, 2, 1, 0]];
    let g = build_group(&GroupSpec::Table { table }).unwrap();
    assert!(g.elements().all(|a| g.inv(a) == a));
}

#[test]
fn nonassociative_table_names_a_triple() {
    // a Latin square with identity 0 that is not a group
    let table = vec![
        vec![0, 1, 2, 3, 4],
        vec![1, 0, 3, 4, 2],
        vec![2, 4, 0, 1, 3],
        vec![3, 2, 4, 0, 1],
        vec![4, 3, 1, 2, 0],
    ];
    match FiniteGroup::from_table(table.clone()) {
        Err(GroupError::NonAssociative { a, b, c }) => {
            assert_ne!(table[table[a][b]][c], table[a][table[b][c]]);
        }
        other => panic!("expected NonAssociative, got {other:?}"),
    }
}

#[test]
fn subgroup_closures() {
    let c4 = build_group(&GroupSpec::cyclic(4)).unwrap();
    assert_eq!(c4.subgroup_closure(&[]).unwrap().members(), &[0]);
    assert_eq!(c4.subgroup_closure(&[2]).unwrap().members(), &[0, 2]);
    assert_eq!(c4.subgroup_closure(&[0, 1, 2, 3]).unwrap().order(), 4);
}

#[test]
fn coset_partitions() {
    let c4 = build_group(&GroupSpec::cyclic(4)).unwrap();
    let h = c4.subgroup(&[0, 2]).unwrap();
    assert_eq!(c4.coset_decomposition(&h, CosetSide::Left).unwrap(), vec![vec![0, 2], vec![1, 3]]);
    assert_eq!(c4.coset_decomposition(&c4.whole(), CosetSide::Right).unwrap(), vec![vec![0, 1, 2, 3]]);

    let s3 = build_group(&GroupSpec::symmetric(3)).unwrap();
    let t = s3.elements().find(|&a| s3.element_order(a) == 2).unwrap();
    let h = s3.subgroup(&[0, t]).unwrap();
    for side in [CosetSide::Left, CosetSide::Right] {
        let blocks = s3.coset_decomposition(&h, side).unwrap();
        assert_eq!(blocks.len(), 3);
        assert!(blocks.iter().all(|b| b.len() == 2));
    }
}

// pactions

fn ri1_raw() -> RawPartialAction {
    RawPartialAction {
        group: GroupSpec::cyclic(2),
        size: 3,
        domains: vec![vec![0, 1, 2], vec![0, 1]],
        maps: vec![vec![(0, 0), (1, 1), (2, 2)], vec![(0, 1), (1, 0)]],
    }
}

#[test]
fn validation_examples() {
    assert_eq!(validate(&ri1_raw()).unwrap(), ri1());

    let mut bad = ri1_raw();
    bad.maps[1] = vec![(0, 1), (1, 1)];
    assert!(matches!(validate(&bad), Err(ValidationError::NotBijective { g: 1, .. })));

    // θ_1 and θ_2 both swap, but θ_1∘θ_1 = id
    let raw = RawPartialAction {
        group: GroupSpec::cyclic(4),
        size: 2,
        domains: vec![vec![0, 1]; 4],
        maps: vec![
            vec![(0, 0), (1, 1)],
            vec![(0, 1), (1, 0)],
            vec![(0, 1), (1, 0)],
            vec![(0, 1), (1, 0)],
        ],
    };
    assert!(matches!(validate(&raw), Err(ValidationError::CompositionViolation { .. })));
}

#[test]
fn freeness_examples() {
    assert!(ri1().is_free());
    let f = ri2().freeness();
    assert!(!f.free);
    assert_eq!(f.witness, Some((1, 0)));
    assert!(ri3().is_free());
}

#[test]
fn groupoid_examples() {
    let t = ri1().translation_groupoid();
    assert_eq!(ri1().arrows().len(), 5);
    assert_eq!(t.orbit_count(), 2);
    assert_eq!(ri2().arrows().len(), 2);
    assert_eq!(ri2().translation_groupoid().orbit_count(), 1);
    assert_eq!(parok::action::stabilizer(&ri2(), 0).order(), 2);
    assert_eq!(ri3().arrows().len(), 3);
    assert_eq!(ri3().translation_groupoid().orbit_count(), 3);
    for x in 0..3 {
        assert!(parok::action::stabilizer(&ri1(), x).is_trivial());
    }
}

#[test]
fn restriction_examples() {
    let (ideal, rest) = ri1().restrict_and_quotient(&[0, 1]).unwrap();
    assert!(ideal.action.is_global());
    assert_eq!(ideal.points, vec![0, 1]);
    assert_eq!(rest.points, vec![2]);
    assert_eq!(rest.action.size(), 1);

    let err = ri1().restrict_and_quotient(&[0]).unwrap_err();
    match err {
        parok::action::InvarianceError::NotInvariant { witness } => {
            assert_eq!((witness.g, witness.source, witness.target), (1, 0, 1));
        }
        other => panic!("{other:?}"),
    }

    let (all, none) = ri1().restrict_and_quotient(&[0, 1, 2]).unwrap();
    assert_eq!(all.action, ri1());
    assert_eq!(none.action.size(), 0);
}

#[test]
fn globalization_examples() {
    let gr = globalize(&ri1());
    assert_eq!(gr.envelope.size(), 4);
    assert!(gr.envelope.is_free());
    verify_globalization(&ri1(), &gr).unwrap();
    // ι(0) and ι(1) are paired, ι(2) with its g-translate
    let y2 = gr.embedding[2];
    assert_eq!(gr.envelope.apply(1, gr.embedding[0]), Some(gr.embedding[1]));
    assert!(!gr.embedding.contains(&gr.envelope.apply(1, y2).unwrap()));

    let gr3 = globalize(&ri3());
    assert_eq!(gr3.envelope.size(), 6);
    assert!(gr3.translate_of_x(0).iter().all(|y| !gr3.translate_of_x(1).contains(y)));

    let swap = PartialAction::global(c2(), &[vec![0, 1], vec![1, 0]]).unwrap();
    let grs = globalize(&swap);
    assert_eq!(grs.envelope.size(), 2);
}

#[test]
fn splitting_examples() {
    // later translates take precedence
    let gr = globalize(&ri1());
    assert_eq!(central_splitting(&gr), vec![vec![2], vec![0, 1, 2]]);
    let swap = PartialAction::global(c2(), &[vec![0, 1], vec![1, 0]]).unwrap();
    assert_eq!(central_splitting(&globalize(&swap)), vec![vec![], vec![0, 1]]);
    assert_eq!(central_splitting(&globalize(&ri3())), vec![vec![0, 1, 2], vec![0, 1, 2]]);
}

#[test]
fn unitization_examples() {
    let plus = ri1().minimal_partial_unitization();
    assert_eq!(plus.size(), 4);
    assert_eq!(plus.domain(1), vec![0, 1]);
    assert!(plus.is_free());
    let swap = PartialAction::global(c2(), &[vec![0, 1], vec![1, 0]]).unwrap();
    let u = swap.minimal_partial_unitization();
    assert!(!u.is_global());
    assert!(u.is_free());
}

#[test]
fn generator_examples() {
    let p = |keep| RandomParams { group: GroupSpec::cyclic(3), ambient: 7, keep };
    assert!(random_partial_action(5, &p(1.0)).unwrap().is_global());
    assert_eq!(random_partial_action(5, &p(0.0)).unwrap().size(), 0);
    assert_eq!(random_partial_action(9, &p(0.6)).unwrap(), random_partial_action(9, &p(0.6)).unwrap());
}

// tuples

#[test]
fn tuple_space_examples() {
    let c3 = group(GroupSpec::cyclic(3));
    let t1 = tuple_space(c3.clone(), 1).unwrap();
    assert_eq!(t1.tuples, vec![vec![0]]);
    assert!(t1.lt.group().elements().skip(1).all(|g| t1.lt.domain(g).is_empty()));

    let t2 = tuple_space(c3.clone(), 2).unwrap();
    assert_eq!(t2.tuples, vec![vec![0, 1], vec![0, 2]]);
    // g·{1, g²} = {g, 1}
    assert_eq!(t2.lt.apply(1, 1), Some(0));
    assert_eq!(t2.orbits, vec![vec![0, 1]]);
    assert_eq!(t2.orbit_of(&[0, 1]).unwrap().len(), 2);

    let c4 = group(GroupSpec::cyclic(4));
    assert_eq!(tuple_space(c4.clone(), 3).unwrap().tuples.len(), 3);
    let t42 = tuple_space(c4.clone(), 2).unwrap();
    assert_eq!(t42.orbit_of(&[0, 2]).unwrap(), vec![vec![0, 2]]);
    assert_eq!(tuple_space(c4, 4).unwrap().orbit_of(&[0, 1, 2, 3]).unwrap().len(), 1);
}

#[test]
fn stabilizer_examples() {
    let s = tuple_space(c2(), 2).unwrap().stabilizer_and_section(&[0, 1]).unwrap();
    assert_eq!((s.stabilizer.order(), s.m, s.reps.clone()), (2, 0, vec![0]));
    let s = tuple_space(group(GroupSpec::cyclic(3)), 2).unwrap().stabilizer_and_section(&[0, 1]).unwrap();
    assert_eq!((s.stabilizer.order(), s.m, s.reps.clone()), (1, 1, vec![0, 1]));
    let s3 = group(GroupSpec::symmetric(3));
    let s = tuple_space(s3, 6).unwrap().stabilizer_and_section(&[0, 1, 2, 3, 4, 5]).unwrap();
    assert_eq!((s.stabilizer.order(), s.m), (6, 0));
}

// decomp

#[test]
fn domain_tuple_examples() {
    assert_eq!(parok::decomp::domain_tuple(&ri1(), 0).unwrap(), vec![0, 1]);
    assert_eq!(parok::decomp::domain_tuple(&ri1(), 2).unwrap(), vec![0]);
    let swap = PartialAction::global(c2(), &[vec![0, 1], vec![1, 0]]).unwrap();
    assert!((0..2).all(|x| swap.domain_tuple(x) == vec![0, 1]));
}

#[test]
fn decomposability_examples() {
    assert!((1..=2).all(|n| !is_n_decomposable(&ri1(), n)));
    let sub = ri1().restrict(&[0, 1]).unwrap();
    assert!(is_n_decomposable(&sub.action, 2));
    assert!(is_n_decomposable(&ri3(), 1));
}

#[test]
fn stratification_examples() {
    let s = stratification(&ri1());
    assert_eq!(s.strata, vec![vec![2], vec![0, 1]]);
    assert_eq!(s.chain.len(), 1);
    assert_eq!(s.chain[0].ideal.points, vec![0, 1]);
    assert_eq!(s.chain[0].quotient.points, vec![2]);
    assert_eq!(stratification(&ri3()).strata, vec![vec![0, 1, 2], vec![]]);
    assert_eq!(stratification(&ri2()).strata, vec![vec![], vec![0]]);
}

#[test]
fn orbit_type_examples() {
    let sub = ri1().restrict(&[0, 1]).unwrap().action;
    let parts = orbit_type_decomposition(&sub, 2).unwrap();
    assert_eq!(parts.len(), 1);
    assert_eq!(parts[0].representative, vec![0, 1]);
    assert_eq!(parts[0].tau_points, vec![0, 1]);
    assert_eq!(parts[0].subsystem.elements, vec![0, 1]);

    let parts = orbit_type_decomposition(&ri3(), 1).unwrap();
    assert_eq!(parts.len(), 1);
    assert_eq!(parts[0].subsystem.elements, vec![0]);
    assert_eq!(parts[0].subsystem.action.translation_groupoid().orbit_count(), 3);

    // a disjoint union of two 2-decomposable actions; with the cyclic group
    // of order two there is a single 2-tuple, so use order four, where
    // {1, g²} and {1, g} lie in different classes
    let c4 = group(GroupSpec::cyclic(4));
    let pa = PartialAction::new(
        c4,
        4,
        &[vec![0, 1, 2, 3], vec![2], vec![0, 1], vec![3]],
        &[vec![(0, 0), (1, 1), (2, 2), (3, 3)], vec![(3, 2)], vec![(0, 1), (1, 0)], vec![(2, 3)]],
    )
    .unwrap();
    assert!(is_n_decomposable(&pa, 2));
    assert_eq!(orbit_type_decomposition(&pa, 2).unwrap().len(), 2);
}

#[test]
fn global_subsystem_examples() {
    let sub = ri1().restrict(&[0, 1]).unwrap().action;
    let s = global_subsystem(&sub, &[0, 1]).unwrap();
    assert!(s.action.is_global());
    assert_eq!(s.action.apply(1, 0), Some(1));
    let t = global_subsystem(&ri3(), &[0]).unwrap();
    assert_eq!(t.action.order(), 1);
    let f = global_subsystem(&ri2(), &[0, 1]).unwrap();
    assert!(f.action.is_global());
    assert_eq!(f.action.apply(1, 0), Some(0));
}

// fdcstar

#[test]
fn crossed_product_dimensions() {
    assert_eq!(crossed_product(&ri3()).dim(), 3);
    assert_eq!(crossed_product(&ri1()).dim(), 5);
    assert_eq!(crossed_product(&ri2()).dim(), 2);
    for pa in [ri1(), ri2(), ri3()] {
        crossed_product(&pa).check_invariants().unwrap();
    }
}

#[test]
fn block_examples() {
    let blocks = |pa: &PartialAction| block_structure(&crossed_product(pa), 1).unwrap().algebra.blocks;
    assert_eq!(blocks(&ri1()), vec![1, 2]);
    assert_eq!(blocks(&ri2()), vec![1, 1]);
    let swap = PartialAction::global(c2(), &[vec![0, 1], vec![1, 0]]).unwrap();
    assert_eq!(blocks(&swap), vec![2]);

    let comb = |pa: &PartialAction| crossed_product_blocks_combinatorial(pa, 1).unwrap().blocks;
    assert_eq!(comb(&ri1()), vec![1, 2]);
    assert_eq!(comb(&ri2()), vec![1, 1]);
    let c3 = group(GroupSpec::cyclic(3));
    let rot = PartialAction::global(c3, &[vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]).unwrap();
    assert_eq!(comb(&rot), vec![3]);
}

#[test]
fn fixed_point_examples() {
    assert_eq!(fixed_point_algebra(&ri1()).algebra.blocks, vec![1, 1]);
    assert_eq!(fixed_point_algebra(&ri2()).algebra.blocks, vec![1]);
    assert_eq!(fixed_point_algebra(&ri3()).algebra.blocks, vec![1, 1, 1]);
}

#[test]
fn morita_examples() {
    let a = FdAlgebra::new(vec![1, 2]);
    let b = FdAlgebra::new(vec![1, 1]);
    assert!(morita_equivalent(&a, &b));
    assert!(!isomorphic(&a, &b));
    assert!(!morita_equivalent(&b, &FdAlgebra::new(vec![1])));
    assert!(morita_equivalent(&a, &a) && isomorphic(&a, &a));
}

#[test]
fn bimodule_examples() {
    let r = imprimitivity_bimodule_verify(&ri1(), 0);
    assert!(r.all_hold(), "{:?}", r.failures);
    assert_eq!(r.right_span_dim, 5);

    let r = imprimitivity_bimodule_verify(&ri2(), 0);
    assert!(r.x_alpha && r.positivity && r.compatibility && r.associativity);
    assert!(!r.right_full);
    assert_eq!((r.right_span_dim, r.algebra_dim), (1, 2));

    assert!(imprimitivity_bimodule_verify(&ri3(), 0).all_hold());
}

// rokhlin

#[test]
fn tower_examples() {
    match towers_exist(&ri1(), 0, &opts()).unwrap() {
        TowerSearch::Found(c) => {
            verify_certificate(&ri1(), &c).unwrap();
            // f_1 + f_g = 1 on the orbit {0,1}, so f_1 is 1 at exactly one of them
            assert!(c.levels[0][2].is_one());
            assert_eq!(c.levels[0][0].clone() + c.levels[0][1].clone(), q(1));
        }
        other => panic!("{other:?}"),
    }
    for d in 0..3 {
        assert!(matches!(towers_exist(&ri2(), d, &opts()).unwrap(), TowerSearch::Nonexistent(_)));
    }
    match towers_exist(&ri3(), 0, &opts()).unwrap() {
        TowerSearch::Found(c) => assert!(c.levels[0].iter().all(|v| v.is_one())),
        other => panic!("{other:?}"),
    }
}

#[test]
fn dimension_examples() {
    let r = rokhlin_dimension(&ri1(), &opts()).unwrap();
    assert_eq!((r.dim, r.dim_commuting), (RokhlinDim::Finite(0), RokhlinDim::Finite(0)));
    assert_eq!(rokhlin_dimension(&ri2(), &opts()).unwrap().dim, RokhlinDim::Infinite);
    assert_eq!(rokhlin_dimension(&ri3(), &opts()).unwrap().dim, RokhlinDim::Finite(0));
}

#[test]
fn certificate_examples() {
    let good = TowerCertificate { d: 0, levels: vec![vec![q(1), q(0), q(1)]] };
    verify_certificate(&ri1(), &good).unwrap();

    let bad = TowerCertificate { d: 0, levels: vec![vec![q(1), q(1), q(1)]] };
    match verify_certificate(&ri1(), &bad) {
        Err(CertificateViolation::Orthogonality { x, .. }) | Err(CertificateViolation::PartitionOfUnity { x, .. }) => {
            assert!(x < 2)
        }
        other => panic!("{other:?}"),
    }

    let zero = TowerCertificate { d: 0, levels: vec![vec![Q::zero(); 3]] };
    assert!(matches!(verify_certificate(&ri1(), &zero), Err(CertificateViolation::PartitionOfUnity { .. })));
}

#[test]
fn lift_examples() {
    let x = vec![q(0), q_frac(1, 2), q(1)];
    assert_eq!(orthogonal_lifts(3, &[], &[vec![1, 2]], std::slice::from_ref(&x)).unwrap(), vec![x]);

    // points 1,2,3 as indices 0,1,2; J = {1}
    let y = orthogonal_lifts(3, &[1], &[vec![0, 1], vec![1, 2]], &[vec![q(1), q(1), q(0)], vec![q(0), q(1), q(1)]])
        .unwrap();
    assert_eq!(y[0], vec![q(1), q(0), q(0)]);
    assert_eq!(y[1], vec![q(0), q(0), q(1)]);

    // a chain on four points
    let xs = vec![
        vec![q(1), q_frac(1, 2), q(0), q(0)],
        vec![q(0), q_frac(1, 3), q(1), q_frac(1, 4)],
        vec![q(0), q(0), q_frac(2, 3), q(1)],
    ];
    let supports = vec![vec![0, 1], vec![1, 2, 3], vec![2, 3]];
    let j = [1, 2, 3];
    let y = orthogonal_lifts(4, &j, &supports, &xs).unwrap();
    for a in 0..3 {
        for p in 0..4 {
            assert!(y[a][p] >= Q::zero() && y[a][p] <= xs[a][p]);
            if !j.contains(&p) {
                assert_eq!(y[a][p], xs[a][p]);
            }
            for b in a + 1..3 {
                assert!((y[a][p].clone() * y[b][p].clone()).is_zero());
            }
        }
    }
}

// gridtowers

#[test]
fn residual_examples() {
    let c = match towers_exist(&ri1(), 0, &opts()).unwrap() {
        TowerSearch::Found(c) => c,
        other => panic!("{other:?}"),
    };
    let ga = GridAction::discrete(ri1());
    let ones = vec![vec![q(1); 3]];
    assert!(residual(&ga, &NumericTowers::from_certificate(&ri1(), &c), &ones).unwrap().is_zero());
    assert_eq!(residual(&ga, &NumericTowers::zeros(&ga, 0), &ones).unwrap(), q(1));

    let ex = example_4_5(0.125, 64).unwrap();
    let r = residual(&ex.grid, &ex.towers, &ex.test_set).unwrap();
    assert!(r <= ex.bound, "{r} > {}", ex.bound);
}

#[test]
fn shift_example_shape_and_errors() {
    let ex = example_4_5(0.125, 64).unwrap();
    assert_eq!(ex.towers.d, 1);
    assert!(matches!(example_4_5(0.125, 63), Err(GridError::OddGrid(63))));
    assert!(matches!(example_4_5(0.3, 64), Err(GridError::BadDelta(_))));
}

#[test]
fn flip_example_shape_and_errors() {
    let ex = example_3_2(128).unwrap();
    let a = &ex.test_set[0];
    let lo = q_frac(3, 16);
    let hi = q(2) - q_frac(3, 16);
    for (p, x) in ex.grid.coords.iter().enumerate() {
        if *x >= lo && *x <= hi {
            assert!(a[p].is_one(), "a({x}) = {}", a[p]);
        }
    }
    assert_eq!(ex.epsilon, q_frac(3, 16));
    assert!(matches!(example_3_2(8), Err(GridError::GridTooCoarse(8))));

    let (global, towers) = example_3_2_global(128).unwrap();
    assert!(residual(&global.grid, &towers, &global.test_set).unwrap().is_zero());
}
