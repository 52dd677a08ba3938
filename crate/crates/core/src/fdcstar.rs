//! Crossed products and fixed point algebras of finite partial actions as
//! explicit finite-dimensional *-algebras, and their matrix block sizes.
//!
//! The crossed product has basis `δ_x u_g` (`x ∈ X_g`) with
//! `(δ_x u_g)(δ_y u_h) = δ_x u_{gh}` when `y = θ_{g⁻¹}(x)` and `0` otherwise,
//! and `(δ_x u_g)* = δ_{θ_{g⁻¹}(x)} u_{g⁻¹}`. The trace `τ(δ_x u_g) = [g = 1]`
//! makes this basis orthonormal, so left multiplication by a self-adjoint
//! element is a symmetric matrix.

use std::collections::HashMap;

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{PartialAction, Point};
use crate::exact::{nullspace, Q};
use crate::group::{Element, FiniteGroup};

/// Sparse linear combination of basis elements, sorted by index.
pub type Combination = Vec<(usize, Q)>;

/// Eigenvalues closer than this (relative to the spectral radius) are
/// treated as equal.
pub const EIGEN_SEPARATION: f64 = 1e-8;
/// Allowed distance of an ideal dimension from an integer.
pub const INTEGRALITY_TOLERANCE: f64 = 1e-6;
/// Extra attempts with fresh central elements after a collision.
pub const RETRIES: u64 = 3;
const NULL_TOLERANCE: f64 = 1e-9;

/// A *-algebra with exact rational structure constants, a unit and a
/// faithful trace.
#[derive(Debug, Clone, PartialEq)]
pub struct StarAlgebra {
    pub labels: Vec<String>,
    product: Vec<Vec<Combination>>,
    star: Vec<Combination>,
    trace: Vec<Q>,
    unit: Vec<Q>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraViolation {
    #[error("product is not associative on basis triple ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("star is not involutive on basis element {0}")]
    StarNotInvolutive(usize),
    #[error("star is not anti-multiplicative on basis pair ({0}, {1})")]
    StarNotAntiMultiplicative(usize, usize),
    #[error("unit fails on basis element {0}")]
    UnitFails(usize),
    #[error("basis is not orthonormal for the trace at ({0}, {1})")]
    NotOrthonormal(usize, usize),
}

fn merge(mut terms: Vec<(usize, Q)>) -> Combination {
    terms.sort_by_key(|t| t.0);
    let mut out: Combination = Vec::with_capacity(terms.len());
    for (i, c) in terms {
        match out.last_mut() {
            Some((j, d)) if *j == i => *d += c,
            _ => out.push((i, c)),
        }
    }
    out.retain(|(_, c)| !c.is_zero());
    out
}

impl StarAlgebra {
    pub fn new(
        labels: Vec<String>,
        product: Vec<Vec<Combination>>,
        star: Vec<Combination>,
        trace: Vec<Q>,
        unit: Vec<Q>,
    ) -> Self {
        StarAlgebra { labels, product, star, trace, unit }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn product_of(&self, i: usize, j: usize) -> &Combination {
        &self.product[i][j]
    }

    pub fn star_of(&self, i: usize) -> &Combination {
        &self.star[i]
    }

    pub fn unit(&self) -> &[Q] {
        &self.unit
    }

    pub fn basis(&self, i: usize) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.dim()];
        v[i] = Q::one();
        v
    }

    fn comb_mul(&self, a: &Combination, b: &Combination) -> Combination {
        let mut terms = Vec::new();
        for (i, x) in a {
            for (j, y) in b {
                for (k, z) in &self.product[*i][*j] {
                    terms.push((*k, x * y * z));
                }
            }
        }
        merge(terms)
    }

    fn comb_star(&self, a: &Combination) -> Combination {
        merge(a.iter().flat_map(|(i, x)| self.star[*i].iter().map(move |(k, z)| (*k, x * z))).collect())
    }

    pub fn mul(&self, a: &[Q], b: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.dim()];
        for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, y) in b.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
                for (k, z) in &self.product[i][j] {
                    out[*k] += x * y * z;
                }
            }
        }
        out
    }

    /// Real scalars: the star is linear on rational coefficients.
    pub fn star(&self, a: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.dim()];
        for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (k, z) in &self.star[i] {
                out[*k] += x * z;
            }
        }
        out
    }

    pub fn trace(&self, a: &[Q]) -> Q {
        a.iter().zip(&self.trace).map(|(x, t)| x * t).sum()
    }

    /// Matrix of left multiplication by `a` (column `j` is `a·b_j`).
    pub fn left_matrix(&self, a: &[Q]) -> Vec<Vec<Q>> {
        let n = self.dim();
        let mut m = vec![vec![Q::zero(); n]; n];
        for (k, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for j in 0..n {
                for (r, z) in &self.product[k][j] {
                    m[*r][j] += x * z;
                }
            }
        }
        m
    }

    /// Exact check of associativity, the involution, the unit and
    /// orthonormality of the basis for the trace.
    pub fn check_invariants(&self) -> Result<(), AlgebraViolation> {
        let n = self.dim();
        let unit: Combination =
            merge(self.unit.iter().cloned().enumerate().filter(|(_, c)| !c.is_zero()).collect());
        for i in 0..n {
            let bi = vec![(i, Q::one())];
            if self.comb_star(&self.star[i]) != bi {
                return Err(AlgebraViolation::StarNotInvolutive(i));
            }
            if self.comb_mul(&unit, &bi) != bi || self.comb_mul(&bi, &unit) != bi {
                return Err(AlgebraViolation::UnitFails(i));
            }
            for j in 0..n {
                let bj = vec![(j, Q::one())];
                let lhs = self.comb_star(&self.product[i][j]);
                let rhs = self.comb_mul(&self.star[j], &self.star[i]);
                if lhs != rhs {
                    return Err(AlgebraViolation::StarNotAntiMultiplicative(i, j));
                }
                let gram: Q = self
                    .comb_mul(&self.star[i], &bj)
                    .iter()
                    .map(|(k, c)| c * &self.trace[*k])
                    .sum();
                if gram != if i == j { Q::one() } else { Q::zero() } {
                    return Err(AlgebraViolation::NotOrthonormal(i, j));
                }
                for k in 0..n {
                    let bk = vec![(k, Q::one())];
                    let left = self.comb_mul(&self.product[i][j], &bk);
                    let right = self.comb_mul(&bi, &self.product[j][k]);
                    if left != right {
                        return Err(AlgebraViolation::NotAssociative(i, j, k));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Index of `δ_x u_g` in the crossed-product basis (ordered by `g`, then `x`).
#[derive(Debug, Clone)]
pub struct CrossedProductIndex {
    pub entries: Vec<(Element, Point)>,
    index: Vec<Vec<Option<usize>>>,
}

impl CrossedProductIndex {
    pub fn new(pa: &PartialAction) -> Self {
        let mut entries = Vec::new();
        let mut index = vec![vec![None; pa.size()]; pa.order()];
        for g in pa.group().elements() {
            for x in pa.domain(g) {
                index[g][x] = Some(entries.len());
                entries.push((g, x));
            }
        }
        CrossedProductIndex { entries, index }
    }

    pub fn get(&self, g: Element, x: Point) -> Option<usize> {
        self.index[g][x]
    }
}

pub fn crossed_product(pa: &PartialAction) -> StarAlgebra {
    let group = pa.group();
    let idx = CrossedProductIndex::new(pa);
    let n = idx.entries.len();
    let one = || Q::one();
    let mut product = vec![vec![Vec::new(); n]; n];
    for (i, &(g, x)) in idx.entries.iter().enumerate() {
        let back = pa.apply(group.inv(g), x).expect("x in X_g");
        for (j, &(h, y)) in idx.entries.iter().enumerate() {
            if y == back {
                let k = idx.get(group.mul(g, h), x).expect("x in X_gh by the composition axiom");
                product[i][j] = vec![(k, one())];
            }
        }
    }
    let star = idx
        .entries
        .iter()
        .map(|&(g, x)| {
            let ginv = group.inv(g);
            let y = pa.apply(ginv, x).expect("x in X_g");
            vec![(idx.get(ginv, y).expect("y in X_(g^-1)"), one())]
        })
        .collect();
    let trace = idx.entries.iter().map(|&(g, _)| if g == 0 { one() } else { Q::zero() }).collect();
    let unit = idx.entries.iter().map(|&(g, _)| if g == 0 { one() } else { Q::zero() }).collect();
    let labels = idx.entries.iter().map(|&(g, x)| format!("d{x}u{g}")).collect();
    StarAlgebra::new(labels, product, star, trace, unit)
}

/// The group algebra, as the crossed product of the action on one point.
pub fn group_algebra(group: std::sync::Arc<FiniteGroup>) -> StarAlgebra {
    let perms = vec![vec![0]; group.order()];
    let pa = PartialAction::global(group, &perms).expect("action on a point");
    crossed_product(&pa)
}

/// Sizes of the matrix blocks of a finite-dimensional C*-algebra, ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FdAlgebra {
    pub blocks: Vec<usize>,
}

impl FdAlgebra {
    pub fn new(mut blocks: Vec<usize>) -> Self {
        blocks.sort_unstable();
        FdAlgebra { blocks }
    }

    pub fn dimension(&self) -> usize {
        self.blocks.iter().map(|m| m * m).sum()
    }
}

/// Morita equivalent iff the block counts agree.
pub fn morita_equivalent(a: &FdAlgebra, b: &FdAlgebra) -> bool {
    a.blocks.len() == b.blocks.len()
}

pub fn isomorphic(a: &FdAlgebra, b: &FdAlgebra) -> bool {
    a.blocks == b.blocks
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BlockError {
    #[error("no central element with separated spectrum after {attempts} attempts (center dimension {center_dim})")]
    NotSemisimpleOrDegenerate { attempts: u64, center_dim: usize },
    #[error("ideal dimension {value} is not the square of an integer within tolerance")]
    IntegralityFailure { value: f64 },
    #[error("left multiplication by z* is not the transpose of that by z (deviation {0:e})")]
    NotOrthonormal(f64),
    #[error("numeric blocks {numeric:?} disagree with orbit/stabilizer blocks {combinatorial:?}")]
    RoutesDisagree { numeric: Vec<usize>, combinatorial: Vec<usize> },
}

/// Block sizes found numerically, with diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockDecomposition {
    pub algebra: FdAlgebra,
    pub center_dim: usize,
    /// Largest distance of an ideal dimension from the nearest integer.
    pub integrality_residual: f64,
    pub attempts: u64,
}

fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Orthonormal basis (columns) of the center, from the nullspace of the
/// commutator system `Σ_k c_k [b_k, b_i] = 0`.
fn center_basis(alg: &StarAlgebra) -> DMatrix<f64> {
    let n = alg.dim();
    let mut normal = DMatrix::<f64>::zeros(n, n);
    let mut rows: HashMap<usize, Vec<(usize, f64)>> = HashMap::new();
    for i in 0..n {
        rows.clear();
        for k in 0..n {
            for (r, c) in alg.product_of(k, i) {
                rows.entry(*r).or_default().push((k, to_f64(c)));
            }
            for (r, c) in alg.product_of(i, k) {
                rows.entry(*r).or_default().push((k, -to_f64(c)));
            }
        }
        for entries in rows.values() {
            for &(k1, v1) in entries {
                for &(k2, v2) in entries {
                    normal[(k1, k2)] += v1 * v2;
                }
            }
        }
    }
    let eig = SymmetricEigen::new(normal);
    let scale = eig.eigenvalues.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let null: Vec<usize> =
        (0..n).filter(|&i| eig.eigenvalues[i].abs() <= NULL_TOLERANCE * scale).collect();
    let mut basis = DMatrix::<f64>::zeros(n, null.len());
    for (c, &i) in null.iter().enumerate() {
        basis.set_column(c, &eig.eigenvectors.column(i));
    }
    basis
}

fn left_matrix_f64(alg: &StarAlgebra, a: &DVector<f64>) -> DMatrix<f64> {
    let n = alg.dim();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for k in (0..n).filter(|&k| a[k] != 0.0) {
        for j in 0..n {
            for (r, z) in alg.product_of(k, j) {
                m[(*r, j)] += a[k] * to_f64(z);
            }
        }
    }
    m
}

/// Numeric Artin-Wedderburn decomposition.
///
/// A random self-adjoint central `h` acts on each block `M_{m_k}` as a
/// scalar `λ_k`. With `L_h` the (Hermitian) left multiplication matrix, the
/// eigenprojection `P_k` applied to the unit gives the minimal central
/// projection `p_k`, and `tr(L_{p_k}) = m_k²`.
pub fn block_structure(alg: &StarAlgebra, seed: u64) -> Result<BlockDecomposition, BlockError> {
    let n = alg.dim();
    if n == 0 {
        return Ok(BlockDecomposition {
            algebra: FdAlgebra::new(Vec::new()),
            center_dim: 0,
            integrality_residual: 0.0,
            attempts: 0,
        });
    }
    let center = center_basis(alg);
    let k_dim = center.ncols();
    let unit = DVector::from_iterator(n, alg.unit().iter().map(|v| Complex::new(to_f64(v), 0.0)));
    let traces: Vec<f64> = (0..n)
        .map(|k| (0..n).map(|j| alg.product_of(k, j).iter().filter(|(r, _)| *r == j).map(|(_, c)| to_f64(c)).sum::<f64>()).sum())
        .collect();
    for attempt in 0..=RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt));
        let r = DVector::from_iterator(k_dim, (0..k_dim).map(|_| rng.gen_range(-1.0..1.0)));
        let phase: f64 = rng.gen_range(0.1..1.4);
        let z = &center * r;
        let lz = left_matrix_f64(alg, &z);
        let mut zstar = DVector::<f64>::zeros(n);
        for k in (0..n).filter(|&k| z[k] != 0.0) {
            for (i, c) in alg.star_of(k) {
                zstar[*i] += z[k] * to_f64(c);
            }
        }
        let asym = (left_matrix_f64(alg, &zstar) - lz.transpose()).amax();
        let scale = lz.amax().max(1.0);
        if asym > 1e-9 * scale {
            return Err(BlockError::NotOrthonormal(asym));
        }
        // h = c z + c̄ z*: a complex phase separates conjugate characters
        let (re, im) = (phase.cos(), phase.sin());
        let lh = DMatrix::from_fn(n, n, |i, j| {
            Complex::new(re * (lz[(i, j)] + lz[(j, i)]), im * (lz[(i, j)] - lz[(j, i)]))
        });
        let eig = SymmetricEigen::new(lh);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let radius = eig.eigenvalues.amax().max(1.0);
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        for &i in &order {
            match clusters.last_mut() {
                Some(c)
                    if eig.eigenvalues[i] - eig.eigenvalues[*c.last().unwrap()]
                        <= EIGEN_SEPARATION * radius =>
                {
                    c.push(i)
                }
                _ => clusters.push(vec![i]),
            }
        }
        if clusters.len() != k_dim {
            continue;
        }
        let mut blocks = Vec::with_capacity(k_dim);
        let mut residual = 0.0f64;
        for c in &clusters {
            let mut p = DVector::<Complex<f64>>::zeros(n);
            for &i in c {
                let u = eig.eigenvectors.column(i);
                p += u * u.dotc(&unit);
            }
            // tr(L_p) is linear in p
            let trace = p.iter().zip(&traces).fold(Complex::new(0.0, 0.0), |s, (a, t)| s + a * *t);
            let ideal_dim = trace.re;
            let rounded = ideal_dim.round();
            residual = residual.max((ideal_dim - rounded).abs()).max(trace.im.abs());
            if (ideal_dim - rounded).abs() > INTEGRALITY_TOLERANCE || rounded < 1.0 {
                return Err(BlockError::IntegralityFailure { value: ideal_dim });
            }
            let sq = rounded as usize;
            let m = (sq as f64).sqrt().round() as usize;
            if m * m != sq {
                return Err(BlockError::IntegralityFailure { value: ideal_dim });
            }
            blocks.push(m);
        }
        let algebra = FdAlgebra::new(blocks);
        if algebra.dimension() != n {
            return Err(BlockError::IntegralityFailure { value: algebra.dimension() as f64 });
        }
        return Ok(BlockDecomposition { algebra, center_dim: k_dim, integrality_residual: residual, attempts: attempt + 1 });
    }
    Err(BlockError::NotSemisimpleOrDegenerate { attempts: RETRIES + 1, center_dim: k_dim })
}

/// Orbit/stabilizer route: an orbit `O` with isotropy `S` contributes blocks
/// `|O|·d` for each block size `d` of the group algebra of `S`.
pub fn crossed_product_blocks_combinatorial(pa: &PartialAction, seed: u64) -> Result<FdAlgebra, BlockError> {
    let gpd = pa.translation_groupoid();
    let mut cache: HashMap<Vec<Element>, Vec<usize>> = HashMap::new();
    let mut blocks = Vec::new();
    for (orbit, stab) in gpd.orbits.iter().zip(&gpd.stabilizers) {
        let sizes = match cache.get(stab.members()) {
            Some(s) => s.clone(),
            None => {
                let h = std::sync::Arc::new(pa.group().subgroup_as_group(stab));
                let s = block_structure(&group_algebra(h), seed)?.algebra.blocks;
                cache.insert(stab.members().to_vec(), s.clone());
                s
            }
        };
        blocks.extend(sizes.iter().map(|d| orbit.len() * d));
    }
    Ok(FdAlgebra::new(blocks))
}

/// Both routes to the crossed-product blocks, cross-checked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossedProductBlocks {
    pub numeric: BlockDecomposition,
    pub combinatorial: FdAlgebra,
}

pub fn crossed_product_blocks(pa: &PartialAction, seed: u64) -> Result<CrossedProductBlocks, BlockError> {
    let numeric = block_structure(&crossed_product(pa), seed)?;
    let combinatorial = crossed_product_blocks_combinatorial(pa, seed)?;
    if numeric.algebra != combinatorial {
        return Err(BlockError::RoutesDisagree {
            numeric: numeric.algebra.blocks,
            combinatorial: combinatorial.blocks,
        });
    }
    Ok(CrossedProductBlocks { numeric, combinatorial })
}

/// `A^α` with an exact basis of functions on `X`.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointAlgebra {
    pub basis: Vec<Vec<Q>>,
    pub algebra: FdAlgebra,
}

/// Solves `α_g(x·a) = x·α_g(a)` for all `a ∈ A_{g⁻¹}` (tested on the basis
/// `δ_y`, `y ∈ X_{g⁻¹}`) and compares with the count of groupoid orbits.
pub fn fixed_point_algebra(pa: &PartialAction) -> FixedPointAlgebra {
    let n = pa.size();
    let delta = |y: Point| -> Vec<Q> { (0..n).map(|w| if w == y { Q::one() } else { Q::zero() }).collect() };
    let times = |a: &[Q], b: &[Q]| -> Vec<Q> { a.iter().zip(b).map(|(x, y)| x * y).collect() };
    let mut rows = Vec::new();
    for g in pa.group().elements() {
        let ginv = pa.group().inv(g);
        for y in pa.domain(ginv) {
            let a = delta(y);
            let alpha_a = pa.alpha(g, &a);
            let cols: Vec<(Vec<Q>, Vec<Q>)> = (0..n)
                .map(|z| {
                    let dz = delta(z);
                    (pa.alpha(g, &times(&dz, &a)), times(&dz, &alpha_a))
                })
                .collect();
            for w in 0..n {
                let row: Vec<Q> = cols.iter().map(|(l, r)| &l[w] - &r[w]).collect();
                if row.iter().any(|c| !c.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    let basis = nullspace(&rows, n);
    let orbits = pa.translation_groupoid().orbit_count();
    assert_eq!(basis.len(), orbits, "fixed point algebra dimension differs from the orbit count");
    FixedPointAlgebra { algebra: FdAlgebra::new(vec![1; basis.len()]), basis }
}
