//! Enveloping (global) actions and the central splitting of their unit.
//!
//! The envelope is `Y = (G × X)/∼` with `(g,x) ∼ (h,y)` iff `x ∈ X_{g⁻¹h}`
//! and `θ_{h⁻¹g}(x) = y`, acted on by `g·[h,x] = [gh,x]`, with `ι(x) = [1,x]`.
//! Classes are numbered by first appearance when scanning `(g, x)` with `g`
//! outermost, so `ι(x) = x`.

use thiserror::Error;

use crate::action::{PartialAction, Point};
use crate::group::Element;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Globalization {
    /// Global action on `Y`.
    pub envelope: PartialAction,
    /// `embedding[x] = ι(x)`.
    pub embedding: Vec<Point>,
    /// A representative `(g, x)` of each class of `Y`.
    pub classes: Vec<(Element, Point)>,
    /// `splitting[g] = p_g`, as points of `X`.
    pub splitting: Vec<Vec<Point>>,
}

impl Globalization {
    /// `σ_g(ι(X))` as a sorted list of points of `Y`.
    pub fn translate_of_x(&self, g: Element) -> Vec<Point> {
        let mut v: Vec<Point> = self
            .embedding
            .iter()
            .map(|&y| self.envelope.apply(g, y).expect("envelope is global"))
            .collect();
        v.sort_unstable();
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GlobalizationViolation {
    #[error("envelope is not a global action")]
    NotGlobal,
    #[error("embedding is not injective")]
    NotInjective,
    #[error("iota(X_{g}) differs from iota(X) ∩ sigma_{g}(iota(X))")]
    DomainMismatch { g: Element },
    #[error("sigma_{g} does not extend theta_{g} at point {x}")]
    NotExtension { g: Element, x: Point },
    #[error("point {y} of the envelope is not in any translate of iota(X)")]
    NotMinimal { y: Point },
    #[error("the translates of the central splitting do not partition the envelope (point {y})")]
    SplittingNotPartition { y: Point },
    #[error("p_{g} is not contained in X")]
    SplittingOutsideX { g: Element },
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }
    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Builds the envelope by merging related pairs with a union-find.
pub fn globalize(pa: &PartialAction) -> Globalization {
    let g = pa.group();
    let (order, n) = (pa.order(), pa.size());
    let id = |a: Element, x: Point| a * n + x;
    let mut uf = UnionFind::new(order * n);
    for a in g.elements() {
        for b in g.elements() {
            let (k, kinv) = (g.mul(g.inv(a), b), g.mul(g.inv(b), a));
            for x in 0..n {
                if pa.in_domain(k, x) {
                    let y = pa.apply(kinv, x).expect("x in X_k = X_(k^-1)^-1");
                    uf.union(id(a, x), id(b, y));
                }
            }
        }
    }
    let mut class_of_root = vec![usize::MAX; order * n];
    let mut class = vec![0; order * n];
    let mut classes = Vec::new();
    for a in g.elements() {
        for x in 0..n {
            let r = uf.find(id(a, x));
            if class_of_root[r] == usize::MAX {
                class_of_root[r] = classes.len();
                classes.push((a, x));
            }
            class[id(a, x)] = class_of_root[r];
        }
    }
    assemble(pa, classes, |a, x| class[id(a, x)])
}

/// Builds the envelope a second way, by testing the relation directly and
/// taking the least related pair as canonical representative.
pub fn globalize_by_enumeration(pa: &PartialAction) -> Globalization {
    let g = pa.group();
    let n = pa.size();
    let related = |a: Element, x: Point, b: Element, y: Point| {
        let k = g.mul(g.inv(a), b);
        pa.in_domain(k, x) && pa.apply(g.mul(g.inv(b), a), x) == Some(y)
    };
    let canonical = |a: Element, x: Point| -> (Element, Point) {
        g.elements()
            .flat_map(|b| (0..n).map(move |y| (b, y)))
            .find(|&(b, y)| related(a, x, b, y))
            .expect("the relation is reflexive")
    };
    let mut reps: Vec<(Element, Point)> = Vec::new();
    let mut table = vec![usize::MAX; pa.order() * n];
    for a in g.elements() {
        for x in 0..n {
            let c = canonical(a, x);
            let idx = match reps.iter().position(|&r| r == c) {
                Some(i) => i,
                None => {
                    reps.push(c);
                    reps.len() - 1
                }
            };
            table[a * n + x] = idx;
        }
    }
    assemble(pa, reps, |a, x| table[a * n + x])
}

fn assemble(
    pa: &PartialAction,
    classes: Vec<(Element, Point)>,
    class: impl Fn(Element, Point) -> usize,
) -> Globalization {
    let g = pa.group();
    let perms: Vec<Vec<Point>> = g
        .elements()
        .map(|a| classes.iter().map(|&(b, x)| class(g.mul(a, b), x)).collect())
        .collect();
    let envelope = if classes.is_empty() {
        PartialAction::trivial(g.clone(), 0)
    } else {
        PartialAction::global(g.clone(), &perms).expect("left translation on classes is an action")
    };
    let embedding = (0..pa.size()).map(|x| class(0, x)).collect();
    let mut gr = Globalization { envelope, embedding, classes, splitting: Vec::new() };
    gr.splitting = central_splitting(&gr);
    gr
}

/// `p_k = σ_{g_k}⁻¹(σ_{g_k}(ιX) ∖ ∪_{j>k} σ_{g_j}(ιX))`, in the group's
/// canonical order, returned as subsets of `X`.
pub fn central_splitting(gr: &Globalization) -> Vec<Vec<Point>> {
    let g = gr.envelope.group();
    let ny = gr.envelope.size();
    let translates: Vec<Vec<bool>> = g
        .elements()
        .map(|a| {
            let mut mask = vec![false; ny];
            for y in gr.translate_of_x(a) {
                mask[y] = true;
            }
            mask
        })
        .collect();
    let mut at_x = vec![usize::MAX; ny];
    for (x, &y) in gr.embedding.iter().enumerate() {
        at_x[y] = x;
    }
    g.elements()
        .map(|k| {
            let mut p: Vec<Point> = (0..ny)
                .filter(|&y| translates[k][y] && !(k + 1..g.order()).any(|j| translates[j][y]))
                .map(|y| {
                    let back = gr.envelope.apply(g.inv(k), y).expect("global");
                    at_x[back]
                })
                .collect();
            p.sort_unstable();
            p
        })
        .collect()
}

/// Checks the enveloping-action conditions and the splitting.
pub fn verify_globalization(pa: &PartialAction, gr: &Globalization) -> Result<(), GlobalizationViolation> {
    let env = &gr.envelope;
    if !env.is_global() {
        return Err(GlobalizationViolation::NotGlobal);
    }
    let ny = env.size();
    let mut in_x = vec![false; ny];
    for &y in &gr.embedding {
        if y >= ny || in_x[y] {
            return Err(GlobalizationViolation::NotInjective);
        }
        in_x[y] = true;
    }
    let g = pa.group();
    for a in g.elements() {
        let image: Vec<Point> = pa.domain(a).iter().map(|&x| gr.embedding[x]).collect();
        let mut expected: Vec<Point> =
            gr.translate_of_x(a).into_iter().filter(|&y| in_x[y]).collect();
        let mut image = image;
        image.sort_unstable();
        expected.sort_unstable();
        if image != expected {
            return Err(GlobalizationViolation::DomainMismatch { g: a });
        }
        for x in 0..pa.size() {
            if let Some(t) = pa.apply(a, x) {
                if env.apply(a, gr.embedding[x]) != Some(gr.embedding[t]) {
                    return Err(GlobalizationViolation::NotExtension { g: a, x });
                }
            }
        }
    }
    let mut covered = vec![0usize; ny];
    let mut hit = vec![false; ny];
    for a in g.elements() {
        for y in gr.translate_of_x(a) {
            hit[y] = true;
        }
        let Some(p) = gr.splitting.get(a) else {
            return Err(GlobalizationViolation::SplittingOutsideX { g: a });
        };
        for &x in p {
            if x >= pa.size() {
                return Err(GlobalizationViolation::SplittingOutsideX { g: a });
            }
            covered[env.apply(a, gr.embedding[x]).expect("global")] += 1;
        }
    }
    if let Some(y) = (0..ny).find(|&y| !hit[y]) {
        return Err(GlobalizationViolation::NotMinimal { y });
    }
    if let Some(y) = (0..ny).find(|&y| covered[y] != 1) {
        return Err(GlobalizationViolation::SplittingNotPartition { y });
    }
    Ok(())
}

/// Whether `σ_g ι_a(x) ↦ σ_g ι_b(x)` is a well-defined equivariant bijection.
pub fn equivariantly_isomorphic(a: &Globalization, b: &Globalization) -> bool {
    let (ea, eb) = (&a.envelope, &b.envelope);
    if ea.size() != eb.size() || a.embedding.len() != b.embedding.len() || ea.group() != eb.group() {
        return false;
    }
    let g = ea.group();
    let mut phi = vec![usize::MAX; ea.size()];
    for x in 0..a.embedding.len() {
        for s in g.elements() {
            let ya = ea.apply(s, a.embedding[x]).expect("global");
            let yb = eb.apply(s, b.embedding[x]).expect("global");
            if phi[ya] == usize::MAX {
                phi[ya] = yb;
            } else if phi[ya] != yb {
                return false;
            }
        }
    }
    let mut seen = vec![false; eb.size()];
    for &y in &phi {
        if y == usize::MAX || seen[y] {
            return false;
        }
        seen[y] = true;
    }
    g.elements().all(|s| {
        (0..ea.size()).all(|y| eb.apply(s, phi[y]) == ea.apply(s, y).map(|z| phi[z]))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::fixtures::*;

    #[test]
    fn ri1_envelope() {
        let pa = ri1();
        let gr = globalize(&pa);
        assert_eq!(gr.envelope.size(), 4);
        assert_eq!(gr.embedding, vec![0, 1, 2]);
        assert_eq!(gr.classes, vec![(0, 0), (0, 1), (0, 2), (1, 2)]);
        // free involution pairing {[1,0],[1,1]} and {[1,2],[g,2]}
        assert_eq!(gr.envelope.apply(1, 0), Some(1));
        assert_eq!(gr.envelope.apply(1, 2), Some(3));
        assert!(gr.envelope.is_free());
        verify_globalization(&pa, &gr).unwrap();
        assert_eq!(gr.splitting, vec![vec![2], vec![0, 1, 2]]);
    }

    #[test]
    fn ri3_doubles_and_global_is_fixed() {
        let gr = globalize(&ri3());
        assert_eq!(gr.envelope.size(), 6);
        assert_eq!(gr.splitting, vec![vec![0, 1, 2], vec![0, 1, 2]]);
        verify_globalization(&ri3(), &gr).unwrap();

        let global = PartialAction::global(c2(), &[vec![0, 1], vec![1, 0]]).unwrap();
        let gr = globalize(&global);
        assert_eq!(gr.envelope, global);
        assert_eq!(gr.splitting, vec![vec![], vec![0, 1]]);
    }

    #[test]
    fn two_constructions_agree() {
        for pa in [ri1(), ri2(), ri3()] {
            let a = globalize(&pa);
            let b = globalize_by_enumeration(&pa);
            verify_globalization(&pa, &b).unwrap();
            assert!(equivariantly_isomorphic(&a, &b));
        }
    }

    #[test]
    fn empty_carrier() {
        let pa = PartialAction::trivial(c2(), 0);
        let gr = globalize(&pa);
        assert_eq!(gr.envelope.size(), 0);
        verify_globalization(&pa, &gr).unwrap();
    }
}
