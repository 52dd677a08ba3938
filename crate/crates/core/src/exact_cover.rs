//! Algorithm X with dancing links.
//!
//! Array-backed: node `0` is the root header, nodes `1..=columns` are column
//! headers, the rest are row entries.

#[derive(Debug, Clone)]
pub struct ExactCover {
    left: Vec<usize>,
    right: Vec<usize>,
    up: Vec<usize>,
    down: Vec<usize>,
    col: Vec<usize>,
    row: Vec<usize>,
    size: Vec<usize>,
    columns: usize,
    rows: usize,
}

/// Result of a search: the first cover found (row indices, ascending) and
/// the number of search nodes visited.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverSearch {
    pub solution: Option<Vec<usize>>,
    pub nodes: u64,
    pub exhausted_budget: bool,
}

impl ExactCover {
    pub fn new(columns: usize) -> Self {
        let n = columns + 1;
        let mut s = ExactCover {
            left: (0..n).map(|i| if i == 0 { columns } else { i - 1 }).collect(),
            right: (0..n).map(|i| if i == columns { 0 } else { i + 1 }).collect(),
            up: (0..n).collect(),
            down: (0..n).collect(),
            col: (0..n).collect(),
            row: vec![usize::MAX; n],
            size: vec![0; n],
            columns,
            rows: 0,
        };
        if columns == 0 {
            s.left[0] = 0;
            s.right[0] = 0;
        }
        s
    }

    /// Adds a row covering the given columns (`0`-based). Returns its index.
    pub fn add_row(&mut self, cols: &[usize]) -> usize {
        let r = self.rows;
        self.rows += 1;
        let mut first: Option<usize> = None;
        for &c in cols {
            assert!(c < self.columns, "column {c} out of range");
            let header = c + 1;
            let node = self.col.len();
            self.col.push(header);
            self.row.push(r);
            // vertical: insert above header (at the bottom)
            let last = self.up[header];
            self.up.push(last);
            self.down.push(header);
            self.down[last] = node;
            self.up[header] = node;
            self.size[header] += 1;
            // horizontal ring
            match first {
                None => {
                    self.left.push(node);
                    self.right.push(node);
                    first = Some(node);
                }
                Some(f) => {
                    let l = self.left[f];
                    self.left.push(l);
                    self.right.push(f);
                    self.right[l] = node;
                    self.left[f] = node;
                }
            }
            self.size.push(0);
        }
        r
    }

    fn cover(&mut self, c: usize) {
        let (l, r) = (self.left[c], self.right[c]);
        self.right[l] = r;
        self.left[r] = l;
        let mut i = self.down[c];
        while i != c {
            let mut j = self.right[i];
            while j != i {
                let (u, d) = (self.up[j], self.down[j]);
                self.down[u] = d;
                self.up[d] = u;
                self.size[self.col[j]] -= 1;
                j = self.right[j];
            }
            i = self.down[i];
        }
    }

    fn uncover(&mut self, c: usize) {
        let mut i = self.up[c];
        while i != c {
            let mut j = self.left[i];
            while j != i {
                let (u, d) = (self.up[j], self.down[j]);
                self.down[u] = j;
                self.up[d] = j;
                self.size[self.col[j]] += 1;
                j = self.left[j];
            }
            i = self.up[i];
        }
        let (l, r) = (self.left[c], self.right[c]);
        self.right[l] = c;
        self.left[r] = c;
    }

    /// Depth-first search for the first exact cover, visiting at most
    /// `budget` nodes.
    pub fn solve_first(&mut self, budget: u64) -> CoverSearch {
        let mut partial = Vec::new();
        let mut nodes = 0;
        let mut out = None;
        let mut exhausted = false;
        self.search(&mut partial, &mut nodes, budget, &mut out, &mut exhausted);
        CoverSearch {
            solution: out.map(|mut v: Vec<usize>| {
                v.sort_unstable();
                v
            }),
            nodes,
            exhausted_budget: exhausted,
        }
    }

    fn search(
        &mut self,
        partial: &mut Vec<usize>,
        nodes: &mut u64,
        budget: u64,
        out: &mut Option<Vec<usize>>,
        exhausted: &mut bool,
    ) -> bool {
        *nodes += 1;
        if *nodes > budget {
            *exhausted = true;
            return true;
        }
        if self.right[0] == 0 {
            *out = Some(partial.clone());
            return true;
        }
        // column with fewest candidates, leftmost on ties
        let mut c = self.right[0];
        let mut j = self.right[c];
        while j != 0 {
            if self.size[j] < self.size[c] {
                c = j;
            }
            j = self.right[j];
        }
        if self.size[c] == 0 {
            return false;
        }
        self.cover(c);
        let mut r = self.down[c];
        while r != c {
            partial.push(self.row[r]);
            let mut j = self.right[r];
            while j != r {
                self.cover(self.col[j]);
                j = self.right[j];
            }
            let done = self.search(partial, nodes, budget, out, exhausted);
            let mut j = self.left[r];
            while j != r {
                self.uncover(self.col[j]);
                j = self.left[j];
            }
            partial.pop();
            if done {
                self.uncover(c);
                return true;
            }
            r = self.down[r];
        }
        self.uncover(c);
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn knuth_example() {
        // Columns A..G; the unique cover is rows {0, 3, 4}.
        let rows: [&[usize]; 6] = [
            &[2, 4, 5],
            &[0, 3, 6],
            &[1, 2, 5],
            &[0, 3],
            &[1, 6],
            &[3, 4, 6],
        ];
        let mut ec = ExactCover::new(7);
        for r in rows {
            ec.add_row(r);
        }
        let res = ec.solve_first(1_000);
        assert_eq!(res.solution, Some(vec![0, 3, 4]));
        // structure restored after search
        assert_eq!(ec.solve_first(1_000).solution, Some(vec![0, 3, 4]));
    }

    #[test]
    fn no_cover_and_empty_problem() {
        let mut ec = ExactCover::new(2);
        ec.add_row(&[0, 1]);
        ec.add_row(&[1]);
        assert_eq!(ec.solve_first(100).solution, Some(vec![0]));
        let mut ec = ExactCover::new(2);
        ec.add_row(&[0]);
        assert_eq!(ec.solve_first(100).solution, None);
        let mut ec = ExactCover::new(0);
        assert_eq!(ec.solve_first(100).solution, Some(vec![]));
    }

    #[test]
    fn budget_is_reported() {
        let mut ec = ExactCover::new(3);
        ec.add_row(&[0]);
        ec.add_row(&[1]);
        ec.add_row(&[2]);
        let res = ec.solve_first(2);
        assert!(res.exhausted_budget);
    }
}
