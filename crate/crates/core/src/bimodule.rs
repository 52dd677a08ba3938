//! Exact verification of the `A^α`-`A⋊G` imprimitivity bimodule structure on
//! the function algebra `A` of a finite partial action.
//!
//! Crossed-product elements are kept here in the form `Σ_g a_g u_g` with
//! `a_g ∈ A_g`, and multiplied with the defining rule
//! `(a_g u_g)(b_h u_h) = α_g(α_{g⁻¹}(a_g) b_h) u_{gh}`, independently of the
//! structure constants of [`crate::fdcstar::crossed_product`].
//!
//! With `x_α = Σ_g 1_g`:
//! `⟨x,y⟩_{A^α} = Σ_g α_g(x y* 1_{g⁻¹})`,
//! `⟨x,y⟩_{A⋊G} = Σ_g x* α_g(y 1_{g⁻¹}) u_g` and
//! `x·ξ = Σ_g α_{g⁻¹}(x ξ(g))`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::action::PartialAction;
use crate::exact::{definiteness, q, q_frac, q_to_f64, rank, Definiteness, Q};
use crate::fdcstar::{crossed_product, fixed_point_algebra, CrossedProductIndex};

/// Function on `X`.
pub type Func = Vec<Q>;
/// `Σ_g a_g u_g`, indexed by `g`.
pub type CpElement = Vec<Func>;

fn times(a: &[Q], b: &[Q]) -> Func {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

fn plus(a: &[Q], b: &[Q]) -> Func {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn cp_zero(pa: &PartialAction) -> CpElement {
    vec![vec![Q::zero(); pa.size()]; pa.order()]
}

pub fn cp_mul(pa: &PartialAction, a: &CpElement, b: &CpElement) -> CpElement {
    let group = pa.group();
    let mut out = cp_zero(pa);
    for g in group.elements() {
        if a[g].iter().all(Zero::is_zero) {
            continue;
        }
        let pulled = pa.alpha(group.inv(g), &a[g]);
        for h in group.elements() {
            if b[h].iter().all(Zero::is_zero) {
                continue;
            }
            let term = pa.alpha(g, &times(&pulled, &b[h]));
            let gh = group.mul(g, h);
            out[gh] = plus(&out[gh], &term);
        }
    }
    out
}

pub fn cp_star(pa: &PartialAction, a: &CpElement) -> CpElement {
    let group = pa.group();
    let mut out = cp_zero(pa);
    for g in group.elements() {
        out[group.inv(g)] = pa.alpha(group.inv(g), &a[g]);
    }
    out
}

/// `⟨x,y⟩_{A^α}`.
pub fn left_inner(pa: &PartialAction, x: &[Q], y: &[Q]) -> Func {
    let xy = times(x, y);
    pa.group().elements().fold(vec![Q::zero(); pa.size()], |acc, g| {
        let restricted = times(&xy, &pa.unit::<Q>(pa.group().inv(g)));
        plus(&acc, &pa.alpha(g, &restricted))
    })
}

/// `⟨x,y⟩_{A⋊G}`.
pub fn right_inner(pa: &PartialAction, x: &[Q], y: &[Q]) -> CpElement {
    pa.group()
        .elements()
        .map(|g| {
            let restricted = times(y, &pa.unit::<Q>(pa.group().inv(g)));
            times(x, &pa.alpha(g, &restricted))
        })
        .collect()
}

/// `x·ξ`.
pub fn right_action(pa: &PartialAction, x: &[Q], xi: &CpElement) -> Func {
    pa.group().elements().fold(vec![Q::zero(); pa.size()], |acc, g| {
        plus(&acc, &pa.alpha(pa.group().inv(g), &times(x, &xi[g])))
    })
}

fn coords(idx: &CrossedProductIndex, a: &CpElement) -> Vec<Q> {
    idx.entries.iter().map(|&(g, x)| a[g][x].clone()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BimoduleReport {
    /// `x_α ≥ 1` and `x_α ∈ A^α` (centrality is automatic in commutative `A`).
    pub x_alpha: bool,
    /// Both inner products positive, and definite, on the test family.
    pub positivity: bool,
    /// `⟨x,y⟩_{A⋊G}·ξ = ⟨x, y·ξ⟩_{A⋊G}` on basis triples.
    pub compatibility: bool,
    /// `⟨x,y⟩_{A^α}·z = x·⟨y,z⟩_{A⋊G}` on basis triples.
    pub associativity: bool,
    /// `⟨x, x_α⁻¹⟩_{A^α} = x` on a basis of `A^α`.
    pub left_full: bool,
    /// The values `⟨δ_a, δ_b⟩_{A⋊G}` span `A⋊G`.
    pub right_full: bool,
    pub right_span_dim: usize,
    pub algebra_dim: usize,
    pub family_size: usize,
    pub failures: Vec<String>,
}

impl BimoduleReport {
    pub fn all_hold(&self) -> bool {
        self.x_alpha
            && self.positivity
            && self.compatibility
            && self.associativity
            && self.left_full
            && self.right_full
    }
}

fn test_family(n: usize, seed: u64) -> Vec<Func> {
    let delta = |i: usize| -> Func { (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect() };
    let mut fam: Vec<Func> = (0..n).map(delta).collect();
    if n > 0 {
        fam.push(vec![Q::one(); n]);
    }
    for i in 1..n {
        fam.push((0..n).map(|j| q((j == i - 1) as i64 - (j == i) as i64)).collect());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..3 {
        let v: Func = (0..n).map(|_| q_frac(rng.gen_range(-5..=5), rng.gen_range(1..=4))).collect();
        if v.iter().any(|c| !c.is_zero()) {
            fam.push(v);
        }
    }
    fam
}

pub fn imprimitivity_bimodule_verify(pa: &PartialAction, seed: u64) -> BimoduleReport {
    let n = pa.size();
    let group = pa.group();
    let alg = crossed_product(pa);
    let idx = CrossedProductIndex::new(pa);
    let mut failures = Vec::new();

    let x_alpha: Func = group
        .elements()
        .fold(vec![Q::zero(); n], |acc, g| plus(&acc, &pa.unit::<Q>(g)));
    let mut x_alpha_ok = x_alpha.iter().all(|v| v >= &Q::one());
    for h in group.elements() {
        let lhs = pa.alpha(h, &times(&x_alpha, &pa.unit::<Q>(group.inv(h))));
        if lhs != times(&x_alpha, &pa.unit::<Q>(h)) {
            x_alpha_ok = false;
            failures.push(format!("x_alpha is not fixed by alpha_{h}"));
        }
    }

    let family = test_family(n, seed);
    let mut positivity = true;
    let zero = vec![Q::zero(); n];
    if left_inner(pa, &zero, &zero).iter().any(|c| !c.is_zero())
        || right_inner(pa, &zero, &zero).iter().flatten().any(|c| !c.is_zero())
    {
        positivity = false;
        failures.push("inner product of zero is nonzero".into());
    }
    for (t, x) in family.iter().enumerate() {
        let l = left_inner(pa, x, x);
        if l.iter().any(Signed::is_negative) || l.iter().all(Zero::is_zero) {
            positivity = false;
            failures.push(format!("<x,x> in A^alpha not positive definite for family member {t}"));
        }
        let r = coords(&idx, &right_inner(pa, x, x));
        if r.iter().all(Zero::is_zero) {
            positivity = false;
            failures.push(format!("<x,x> in A x G vanishes for family member {t}"));
            continue;
        }
        let m = alg.left_matrix(&r);
        let dim = m.len();
        let screen = SymmetricEigen::new(DMatrix::from_fn(dim, dim, |i, j| q_to_f64(&m[i][j])));
        let float_ok = screen.eigenvalues.iter().all(|&e| e >= -1e-10);
        let exact_ok = matches!(definiteness(&m), Definiteness::PositiveSemidefinite { .. });
        if float_ok != exact_ok {
            failures.push(format!("float screen and exact test disagree for family member {t}"));
        }
        if !exact_ok {
            positivity = false;
            failures.push(format!("<x,x> in A x G not positive for family member {t}"));
        }
    }

    let delta = |i: usize| -> Func { (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect() };
    let mut compatibility = true;
    'outer: for a in 0..n {
        for b in 0..n {
            let ip = right_inner(pa, &delta(a), &delta(b));
            for &(g, c) in &idx.entries {
                let mut xi = cp_zero(pa);
                xi[g][c] = Q::one();
                let lhs = cp_mul(pa, &ip, &xi);
                let rhs = right_inner(pa, &delta(a), &right_action(pa, &delta(b), &xi));
                if lhs != rhs {
                    compatibility = false;
                    failures.push(format!("compatibility fails at (d{a}, d{b}, d{c}u{g})"));
                    break 'outer;
                }
            }
        }
    }

    let mut associativity = true;
    'assoc: for a in 0..n {
        for b in 0..n {
            let l = left_inner(pa, &delta(a), &delta(b));
            for c in 0..n {
                let lhs = times(&l, &delta(c));
                let rhs = right_action(pa, &delta(a), &right_inner(pa, &delta(b), &delta(c)));
                if lhs != rhs {
                    associativity = false;
                    failures.push(format!("inner products not associative at (d{a}, d{b}, d{c})"));
                    break 'assoc;
                }
            }
        }
    }

    let inv_x_alpha: Func = x_alpha.iter().map(|v| v.recip()).collect();
    let mut left_full = true;
    for (t, x) in fixed_point_algebra(pa).basis.iter().enumerate() {
        if &left_inner(pa, x, &inv_x_alpha) != x {
            left_full = false;
            failures.push(format!("<x, x_alpha^-1> != x for fixed point basis element {t}"));
        }
    }

    let span: Vec<Vec<Q>> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .map(|(a, b)| coords(&idx, &right_inner(pa, &delta(a), &delta(b))))
        .collect();
    let right_span_dim = if span.is_empty() { 0 } else { rank(&span) };
    let algebra_dim = alg.dim();
    let right_full = right_span_dim == algebra_dim;
    if !right_full {
        failures.push(format!("right inner products span {right_span_dim} of {algebra_dim} dimensions"));
    }

    BimoduleReport {
        x_alpha: x_alpha_ok,
        positivity,
        compatibility,
        associativity,
        left_full,
        right_full,
        right_span_dim,
        algebra_dim,
        family_size: family.len(),
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::fixtures::*;

    #[test]
    fn ri1_all_clauses() {
        let r = imprimitivity_bimodule_verify(&ri1(), 0);
        assert!(r.all_hold(), "{:?}", r.failures);
        assert_eq!((r.right_span_dim, r.algebra_dim), (5, 5));
    }

    #[test]
    fn ri2_fails_only_right_fullness() {
        let r = imprimitivity_bimodule_verify(&ri2(), 0);
        assert!(r.x_alpha && r.positivity && r.compatibility && r.associativity && r.left_full);
        assert!(!r.right_full);
        assert_eq!((r.right_span_dim, r.algebra_dim), (1, 2));
    }

    #[test]
    fn ri3_all_clauses() {
        let r = imprimitivity_bimodule_verify(&ri3(), 4);
        assert!(r.all_hold(), "{:?}", r.failures);
    }

    #[test]
    fn star_reverses_products() {
        let pa = ri1();
        let mut a = cp_zero(&pa);
        a[1][0] = q(2);
        a[0][2] = q(3);
        let mut b = cp_zero(&pa);
        b[1][1] = q(5);
        b[0][0] = q(1);
        let lhs = cp_star(&pa, &cp_mul(&pa, &a, &b));
        let rhs = cp_mul(&pa, &cp_star(&pa, &b), &cp_star(&pa, &a));
        assert_eq!(lhs, rhs);
    }
}
