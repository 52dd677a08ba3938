//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on failure.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use parok::action::validate;
use parok::decomp::stratification;
use parok::exact::{q, q_frac, q_to_f64, Q};
use parok::fdcstar::{crossed_product_blocks, FdAlgebra};
use parok::bimodule::imprimitivity_bimodule_verify;
use parok::globalize::{equivariantly_isomorphic, globalize, globalize_by_enumeration, verify_globalization};
use parok::grid::{example_3_2, example_4_5, residual, residual_breakdown, search_towers, SearchParams};
use parok::harness::{self, corpus, corpus_groups, HarnessOptions};
use parok::rokhlin::{
    orthogonal_lifts, rokhlin_dimension, towers_exist, verify_certificate, RokhlinDim, SearchOptions, TowerSearch,
};
use parok::tuples::{orbit_of, translate, tuple_space};

const SEED: u64 = 7;
const COUNT: usize = 100;

type Verdict = Result<String, String>;

fn timed(limit: Duration, f: impl FnOnce() -> Verdict) -> Verdict {
    let start = Instant::now();
    let v = f()?;
    let took = start.elapsed();
    if took > limit {
        return Err(format!("{v}; took {took:?}, limit {limit:?}"));
    }
    Ok(format!("{v} [{took:.2?}]"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn trivial_action() -> Verdict {
    let pa = ri3();
    let blocks = crossed_product_blocks(&pa, SEED).map_err(|e| e.to_string())?;
    ensure(blocks.numeric.algebra == FdAlgebra::new(vec![1, 1, 1]), || format!("blocks {:?}", blocks.numeric.algebra.blocks))?;
    let r = rokhlin_dimension(&pa, &SearchOptions::default()).map_err(|e| e.to_string())?;
    ensure(r.dim == RokhlinDim::Finite(0), || format!("dim {}", r.dim))?;
    let cert = r.certificate.ok_or("no certificate")?;
    ensure(cert.levels == vec![vec![Q::one(); 3]], || "certificate is not f_1 = 1".into())?;
    verify_certificate(&pa, &cert).map_err(|e| e.to_string())?;
    Ok("blocks [1,1,1], dim 0, f_1 = 1".into())
}

fn report_verdict(r: &harness::CheckReport) -> Verdict {
    ensure(r.failures.is_empty(), || format!("{} counterexamples, first {:?}", r.failures.len(), r.failures[0]))?;
    ensure(r.undecided.is_empty(), || format!("{} undecided instances", r.undecided.len()))?;
    Ok(format!("{}/{} instances, 0 counterexamples", r.passed, r.instance_count))
}

fn free_iff_finite() -> Verdict {
    report_verdict(&harness::check_free_iff_finite(SEED, COUNT, &HarnessOptions::default()))
}

fn globalization() -> Verdict {
    report_verdict(&harness::check_globalization_theorem(SEED, COUNT, &HarnessOptions::default()))
}

fn strata() -> Verdict {
    let r = harness::check_strata_theorem(SEED, 50, &HarnessOptions::default());
    ensure(r.informational.is_empty(), || format!("non-decomposable inputs: {:?}", r.informational))?;
    report_verdict(&r)
}

fn block_oracles() -> Verdict {
    let mut worst = 0.0f64;
    for (i, pa) in corpus(SEED, COUNT).iter().enumerate() {
        let b = crossed_product_blocks(pa, SEED + i as u64).map_err(|e| format!("instance {i}: {e}"))?;
        let domains: usize = pa.group().elements().map(|g| pa.domain_size(g)).sum();
        ensure(b.numeric.algebra.dimension() == domains, || {
            format!("instance {i}: sum of squares {} vs {domains}", b.numeric.algebra.dimension())
        })?;
        worst = worst.max(b.numeric.integrality_residual);
    }
    ensure(worst < 1e-6, || format!("integrality residual {worst:e}"))?;
    Ok(format!("{COUNT} instances agree, worst integrality residual {worst:.1e}"))
}

fn morita() -> Verdict {
    let mut free = 0;
    for (i, pa) in corpus(SEED, COUNT).iter().enumerate().filter(|(_, p)| p.is_free()) {
        let r = imprimitivity_bimodule_verify(pa, SEED);
        ensure(r.all_hold(), || format!("instance {i}: {:?}", r.failures))?;
        free += 1;
    }
    let r = imprimitivity_bimodule_verify(&ri2(), SEED);
    ensure(!r.right_full && r.right_span_dim == 1 && r.algebra_dim == 2, || {
        format!("RI2 right fullness {} with span {} of {}", r.right_full, r.right_span_dim, r.algebra_dim)
    })?;
    Ok(format!("{free} free instances pass all clauses; RI2 right span 1 of 2"))
}

fn shift_example() -> Verdict {
    let ex = example_4_5(0.125, 64).map_err(|e| e.to_string())?;
    ensure(ex.towers.d == 1, || "towers do not have two levels".into())?;
    let r = residual(&ex.grid, &ex.towers, &ex.test_set).map_err(|e| e.to_string())?;
    ensure(r <= ex.bound, || format!("residual {} above bound {}", q_to_f64(&r), q_to_f64(&ex.bound)))?;
    Ok(format!("residual {:.4} <= bound {:.4}", q_to_f64(&r), q_to_f64(&ex.bound)))
}

fn flip_example() -> Verdict {
    let ex = example_3_2(128).map_err(|e| e.to_string())?;
    ensure(ex.grid.lipschitz == 8.0 && ex.epsilon == q_frac(3, 16), || "wrong parameters".into())?;
    let zero = search_towers(&ex.grid, &ex.test_set, &SearchParams::new(0, 3.0 / 16.0, SEED, 500)).map_err(|e| e.to_string())?;
    let one = search_towers(&ex.grid, &ex.test_set, &SearchParams::new(1, 3.0 / 16.0, SEED, 500)).map_err(|e| e.to_string())?;
    ensure(zero.best_residual >= q_frac(1, 16), || format!("d = 0 reached {}", q_to_f64(&zero.best_residual)))?;
    ensure(one.best_residual <= Q::new(1.into(), 1000.into()), || format!("d = 1 only reached {}", q_to_f64(&one.best_residual)))?;
    Ok(format!(
        "evidence only: best d=0 residual {:.4} >= 1/16, best d=1 residual {:.1e}",
        q_to_f64(&zero.best_residual),
        q_to_f64(&one.best_residual)
    ))
}

fn random_lift_inputs(rng: &mut ChaCha8Rng) -> (usize, Vec<usize>, Vec<Vec<usize>>, Vec<Vec<Q>>) {
    let size = rng.gen_range(1..=8);
    let count = rng.gen_range(1..=4);
    let ideal: Vec<usize> = (0..size).filter(|_| rng.gen_bool(0.4)).collect();
    let supports: Vec<Vec<usize>> = (0..count).map(|_| (0..size).filter(|_| rng.gen_bool(0.6)).collect()).collect();
    let mut xs: Vec<Vec<Q>> = supports
        .iter()
        .map(|a| (0..size).map(|p| if a.contains(&p) { q_frac(rng.gen_range(0..=4), 4) } else { q(0) }).collect())
        .collect();
    // off the ideal at most one function may be nonzero
    for p in (0..size).filter(|p| !ideal.contains(p)) {
        let mut seen = false;
        for x in xs.iter_mut() {
            if !x[p].is_zero() {
                if seen {
                    x[p] = q(0);
                }
                seen = true;
            }
        }
    }
    (size, ideal, supports, xs)
}

fn properties() -> Verdict {
    let pas = corpus(SEED, COUNT);
    let mut certs = 0;
    for (i, pa) in pas.iter().enumerate() {
        let err = |m: &str| format!("instance {i}: {m}");
        // partial-action identities
        let round = validate(&pa.to_raw()).map_err(|e| err(&e.to_string()))?;
        ensure(&round == pa, || err("raw round trip"))?;
        let g = pa.group();
        for a in g.elements() {
            for b in g.elements() {
                for x in 0..pa.size() {
                    if let Some(y) = pa.apply(b, x).and_then(|y| pa.apply(a, y)) {
                        ensure(pa.apply(g.mul(a, b), x) == Some(y), || err("composition"))?;
                    }
                }
            }
        }
        // globalization by two routes
        let gr = globalize(pa);
        verify_globalization(pa, &gr).map_err(|e| err(&format!("{e:?}")))?;
        ensure(equivariantly_isomorphic(&gr, &globalize_by_enumeration(pa)), || err("globalization routes"))?;
        // stratification reassembles
        let st = stratification(pa);
        ensure(st.reassemble(pa).as_ref() == Some(pa), || err("stratification"))?;
        // certificates verify and stay valid with an extra zero level
        if pa.is_free() {
            let TowerSearch::Found(cert) = towers_exist(pa, 0, &SearchOptions::default()).map_err(|e| err(&e.to_string()))? else {
                return Err(err("free instance without level-0 towers"));
            };
            verify_certificate(pa, &cert).map_err(|e| err(&e.to_string()))?;
            verify_certificate(pa, &cert.padded()).map_err(|e| err(&e.to_string()))?;
            certs += 1;
        }
    }
    // tuple equivariance
    for spec in corpus_groups() {
        let grp = group(spec.clone());
        for n in 1..=grp.order() {
            let space = tuple_space(grp.clone(), n).map_err(|e| e.to_string())?;
            for (t, tau) in space.tuples.iter().enumerate() {
                for g in grp.elements() {
                    if let Some(s) = space.lt.apply(g, t) {
                        ensure(space.tuples[s] == translate(&grp, g, tau), || format!("{spec} Lt mismatch"))?;
                    }
                }
                for other in orbit_of(&grp, tau) {
                    let k = space.index_of(&other).map_err(|e| format!("{spec}: {e}"))?;
                    ensure(space.kappa[k] == space.kappa[t], || format!("{spec} orbit label"))?;
                }
            }
        }
    }
    // orthogonal lift postconditions
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..500 {
        let (size, ideal, supports, xs) = random_lift_inputs(&mut rng);
        let ys = orthogonal_lifts(size, &ideal, &supports, &xs).map_err(|e| e.to_string())?;
        for (j, y) in ys.iter().enumerate() {
            for p in 0..size {
                ensure(!(y[p] < q(0)) && y[p] <= xs[j][p], || "lift exceeds input".into())?;
                ensure(ideal.contains(&p) || y[p] == xs[j][p], || "lift changes quotient".into())?;
                for z in &ys[j + 1..] {
                    ensure((&y[p] * &z[p]).is_zero(), || "lifts not orthogonal".into())?;
                }
            }
        }
    }
    // grid residual: dropping a level never lowers the partition-of-unity term
    let ex = example_4_5(0.125, 64).map_err(|e| e.to_string())?;
    let full = residual_breakdown(&ex.grid, &ex.towers, &ex.test_set).map_err(|e| e.to_string())?;
    let cut = residual_breakdown(&ex.grid, &ex.towers.truncate(1), &ex.test_set).map_err(|e| e.to_string())?;
    ensure(cut.conditions[2] >= full.conditions[2], || "truncation lowered condition (3)".into())?;
    Ok(format!("{COUNT} instances, {certs} certificates, 500 lift inputs"))
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, Duration, fn() -> Verdict)> = vec![
        ("1 trivial action", Duration::from_secs(1), trivial_action),
        ("2 free iff finite", Duration::from_secs(300), free_iff_finite),
        ("3 globalization", Duration::from_secs(300), globalization),
        ("4 decomposable strata", Duration::from_secs(300), strata),
        ("5 crossed-product block oracles", Duration::from_secs(300), block_oracles),
        ("6 Morita bimodule", Duration::from_secs(300), morita),
        ("7 shift example towers", Duration::from_secs(1), shift_example),
        ("8 flip example obstruction", Duration::from_secs(600), flip_example),
        ("9 property suites", Duration::from_secs(300), properties),
    ];
    let mut failed = 0;
    for (name, limit, run) in criteria {
        match timed(limit, run) {
            Ok(msg) => println!("PASS criterion {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
