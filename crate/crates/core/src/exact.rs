//! Exact rational linear algebra: row reduction, semidefiniteness and a
//! phase-one simplex for `A x = b, x >= 0`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Formats a rational as `"p/q"` (always with a denominator).
pub fn format_q(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `"p/q"` or a bare integer.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Q::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Q::from_integer),
    }
}

pub fn q_to_f64(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(rows: &mut [Vec<Q>]) -> Vec<usize> {
    let m = rows.len();
    if m == 0 {
        return Vec::new();
    }
    let n = rows[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    if !p.is_zero() {
                        *x = &*x - &f * p;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<Q>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Basis of `{x : A x = 0}` where `A` has `ncols` columns.
pub fn nullspace(rows: &[Vec<Q>], ncols: usize) -> Vec<Vec<Q>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); ncols];
            v[f] = Q::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

/// Outcome of an exact semidefiniteness test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Definiteness {
    /// Symmetric and positive semidefinite; carries the rank.
    PositiveSemidefinite { rank: usize },
    NotSymmetric,
    NotPositive,
}

/// Exact `L D L^T`-style elimination with diagonal pivoting.
///
/// A symmetric matrix is PSD iff elimination never meets a negative pivot
/// and every zero-diagonal remainder is identically zero.
pub fn definiteness(matrix: &[Vec<Q>]) -> Definiteness {
    let n = matrix.len();
    for i in 0..n {
        for j in 0..i {
            if matrix[i][j] != matrix[j][i] {
                return Definiteness::NotSymmetric;
            }
        }
    }
    // Zero rows/columns do not affect the verdict.
    let live: Vec<usize> = (0..n).filter(|&i| matrix[i].iter().any(|x| !x.is_zero())).collect();
    let mut a: Vec<Vec<Q>> =
        live.iter().map(|&i| live.iter().map(|&j| matrix[i][j].clone()).collect()).collect();
    let mut rank = 0;
    while !a.is_empty() {
        let k = a.len();
        if (0..k).any(|i| a[i][i].is_negative()) {
            return Definiteness::NotPositive;
        }
        let Some(p) = (0..k).find(|&i| a[i][i].is_positive()) else {
            if a.iter().all(|row| row.iter().all(Zero::is_zero)) {
                break;
            }
            return Definiteness::NotPositive;
        };
        rank += 1;
        let pivot = a[p][p].clone();
        let col: Vec<Q> = (0..k).map(|i| a[i][p].clone()).collect();
        let mut next = Vec::with_capacity(k - 1);
        for i in (0..k).filter(|&i| i != p) {
            let mut row = Vec::with_capacity(k - 1);
            for j in (0..k).filter(|&j| j != p) {
                if col[i].is_zero() || col[j].is_zero() {
                    row.push(a[i][j].clone());
                } else {
                    row.push(&a[i][j] - &col[i] * &col[j] / &pivot);
                }
            }
            next.push(row);
        }
        a = next;
    }
    Definiteness::PositiveSemidefinite { rank }
}

/// Finds `x >= 0` with `A x = b`, or `None` if infeasible.
///
/// Phase one of the simplex method on an exact tableau, with Bland's rule
/// for both entering and leaving variables so it terminates.
pub fn feasible_point(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    if m == 0 {
        return Some(vec![Q::zero(); n]);
    }
    let width = n + m + 1;
    let rhs = width - 1;
    let mut t: Vec<Vec<Q>> = Vec::with_capacity(m + 1);
    for i in 0..m {
        let flip = b[i].is_negative();
        let mut row = vec![Q::zero(); width];
        for j in 0..n {
            row[j] = if flip { -a[i][j].clone() } else { a[i][j].clone() };
        }
        row[n + i] = Q::one();
        row[rhs] = b[i].abs();
        t.push(row);
    }
    // reduced costs of the artificial objective
    let mut cost = vec![Q::zero(); width];
    for row in &t {
        for j in 0..n {
            cost[j] -= &row[j];
        }
        cost[rhs] -= &row[rhs];
    }
    t.push(cost);
    let mut basis: Vec<usize> = (n..n + m).collect();

    while let Some(enter) = (0..n + m).find(|&j| t[m][j].is_negative()) {
        let mut leave: Option<usize> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let better = match leave {
                    None => true,
                    Some(l) => {
                        let lhs = &t[i][rhs] * &t[l][enter];
                        let rhs_v = &t[l][rhs] * &t[i][enter];
                        lhs < rhs_v || (lhs == rhs_v && basis[i] < basis[l])
                    }
                };
                if better {
                    leave = Some(i);
                }
            }
        }
        let Some(r) = leave else {
            // Unbounded direction cannot occur for a bounded-below objective.
            break;
        };
        let inv = t[r][enter].recip();
        for x in t[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != r && !row[enter].is_zero() {
                let f = row[enter].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    if !p.is_zero() {
                        *x = &*x - &f * p;
                    }
                }
            }
        }
        basis[r] = enter;
    }
    if !t[m][rhs].is_zero() {
        return None;
    }
    let mut x = vec![Q::zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = t[i][rhs].clone();
        }
    }
    Some(x)
}
