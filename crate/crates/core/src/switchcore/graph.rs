//! The graph instance of switching: Seidel and Godsil-McKay switching as
//! plans over the alphabet `{0, 1}` acting on adjacency matrices.
//!
//! Graph file format: a `GRAPH <n>` header, then one `u v` edge per line
//! (0-indexed); `#` starts a comment line.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{BitFlip, Coefficient, Partition, SwitchPlan};
use crate::error::{Error, Result};

/// Simple undirected loop-free graph stored as a 0/1 adjacency matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SimpleGraph {
    n: usize,
    adj: Vec<u8>,
}

impl SimpleGraph {
    pub fn empty(n: usize) -> Self {
        SimpleGraph { n, adj: vec![0; n * n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        for x in [u, v] {
            if x >= self.n {
                return Err(Error::IndexOutOfRange { index: x, size: self.n });
            }
        }
        if u == v {
            return Err(Error::Invalid(format!("loop at vertex {u}")));
        }
        self.adj[u * self.n + v] = 1;
        self.adj[v * self.n + u] = 1;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.n + v] == 1
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|u| (u + 1..self.n).map(move |v| (u, v)))
            .filter(|&(u, v)| self.adjacent(u, v))
            .collect()
    }

    pub fn adjacency_matrix(&self) -> Vec<Vec<i64>> {
        (0..self.n)
            .map(|u| (0..self.n).map(|v| self.adj[u * self.n + v] as i64).collect())
            .collect()
    }

    /// `J − I − 2A`.
    pub fn seidel_matrix(&self) -> Vec<Vec<i64>> {
        (0..self.n)
            .map(|u| {
                (0..self.n)
                    .map(|v| if u == v { 0 } else { 1 - 2 * self.adj[u * self.n + v] as i64 })
                    .collect()
            })
            .collect()
    }

    fn neighbours_in(&self, v: usize, set: &[usize]) -> usize {
        set.iter().filter(|&&u| self.adjacent(v, u)).count()
    }

    /// Applies a plan over `{0, 1}` to the adjacency matrix.
    pub fn apply_plan(&self, plan: &SwitchPlan<BitFlip>) -> Result<SimpleGraph> {
        if plan.rows().size() != self.n || plan.cols().size() != self.n {
            return Err(Error::Dimension(format!("plan does not match {} vertices", self.n)));
        }
        let mut out = self.clone();
        plan.for_each_cell(|i, j, a| out.adj[i * self.n + j] = a.act(self.adj[i * self.n + j]));
        let n = self.n;
        let symmetric = (0..n).all(|u| out.adj[u * n + u] == 0 && (0..u).all(|v| out.adj[u * n + v] == out.adj[v * n + u]));
        if !symmetric {
            return Err(Error::Condition("plan breaks symmetry or adds a loop".into()));
        }
        Ok(out)
    }
}

impl fmt::Display for SimpleGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "GRAPH {}", self.n)?;
        for (u, v) in self.edges() {
            writeln!(f, "{u} {v}")?;
        }
        Ok(())
    }
}

impl FromStr for SimpleGraph {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let bad = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };
        let (hl, header) = lines.next().ok_or_else(|| bad(1, "empty input"))?;
        let n = match header.split_whitespace().collect::<Vec<_>>()[..] {
            ["GRAPH", n] => n.parse::<usize>().map_err(|_| bad(hl, "bad vertex count"))?,
            _ => return Err(bad(hl, "expected `GRAPH <n>`")),
        };
        let mut g = SimpleGraph::empty(n);
        for (ln, line) in lines {
            let ends: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| bad(ln, "non-integer vertex")))
                .collect::<Result<_>>()?;
            match ends[..] {
                [u, v] => g.add_edge(u, v).map_err(|e| bad(ln, &e.to_string()))?,
                _ => return Err(bad(ln, "expected `u v`")),
            }
        }
        Ok(g)
    }
}

/// Complements adjacency between `S` and its complement.
///
/// Realized as the rank-2 plan with row and column cells `(S, V∖S)` and the
/// transposition on both off-diagonal submatrices.
pub fn seidel_switch(g: &SimpleGraph, s: &[usize]) -> Result<SimpleGraph> {
    let n = g.n();
    let mut inside = vec![false; n];
    for &v in s {
        if v >= n {
            return Err(Error::IndexOutOfRange { index: v, size: n });
        }
        inside[v] = true;
    }
    let (sv, rest): (Vec<usize>, Vec<usize>) = (0..n).partition(|&v| inside[v]);
    if sv.is_empty() || rest.is_empty() {
        return Ok(g.clone());
    }
    let part = || Partition::new(n, vec![sv.clone(), rest.clone()]);
    let coeffs = vec![vec![BitFlip::Keep, BitFlip::Flip], vec![BitFlip::Flip, BitFlip::Keep]];
    let plan = SwitchPlan::new(part()?, part()?, coeffs)?;
    g.apply_plan(&plan)
}

/// Godsil-McKay switching with switching cells `cells` and the remaining
/// vertices `outside`.
///
/// Checks that the cells are equitable among themselves and that each
/// outside vertex has 0, half or all of its neighbours in every cell, then
/// flips adjacency between each outside vertex and the cells it meets in
/// exactly half.
pub fn gm_switch(g: &SimpleGraph, cells: &[Vec<usize>], outside: &[usize]) -> Result<SimpleGraph> {
    let n = g.n();
    let mut all: Vec<Vec<usize>> = cells.to_vec();
    all.extend(outside.iter().map(|&v| vec![v]));
    let covered: usize = all.iter().map(Vec::len).sum();
    if covered != n {
        return Err(Error::Invalid(format!("cells and outside cover {covered} of {n} vertices")));
    }
    Partition::new(n, all.clone())?;
    if outside.is_empty() {
        return Ok(g.clone());
    }
    for (i, ci) in cells.iter().enumerate() {
        for (j, cj) in cells.iter().enumerate() {
            let d0 = g.neighbours_in(ci[0], cj);
            if let Some(&v) = ci.iter().find(|&&v| g.neighbours_in(v, cj) != d0) {
                return Err(Error::Condition(format!(
                    "vertex {v} of cell {i} does not have {d0} neighbours in cell {j}"
                )));
            }
        }
    }
    let mut flips = Vec::with_capacity(outside.len());
    for &v in outside {
        let mut row = Vec::with_capacity(cells.len());
        for (i, ci) in cells.iter().enumerate() {
            let d = g.neighbours_in(v, ci);
            let half = ci.len() % 2 == 0 && 2 * d == ci.len();
            if !(d == 0 || d == ci.len() || half) {
                return Err(Error::Condition(format!(
                    "vertex {v} has {d} of {} neighbours in cell {i}",
                    ci.len()
                )));
            }
            row.push(if half { BitFlip::Flip } else { BitFlip::Keep });
        }
        flips.push(row);
    }
    // Rows and columns: switching cells first, then outside singletons.
    let (t, o) = (cells.len(), outside.len());
    let mut coeffs = vec![vec![BitFlip::Keep; t + o]; t + o];
    for (a, row) in flips.iter().enumerate() {
        for (i, &c) in row.iter().enumerate() {
            coeffs[t + a][i] = c;
            coeffs[i][t + a] = c;
        }
    }
    let plan = SwitchPlan::new_relaxed(Partition::new(n, all.clone())?, Partition::new(n, all)?, coeffs)?;
    g.apply_plan(&plan)
}

/// Characteristic polynomial `det(xI − M)` by Berkowitz's division-free
/// algorithm. Coefficients are indexed by degree.
pub fn char_poly(m: &[Vec<i64>]) -> Result<Vec<BigInt>> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension("characteristic polynomial of a non-square matrix".into()));
    }
    let a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    // Highest degree first while iterating.
    let mut p: Vec<BigInt> = vec![BigInt::one()];
    for r in 0..n {
        // Leading r×r block, column C = a[0..r][r], row R = a[r][0..r].
        let mut toeplitz = Vec::with_capacity(r + 2);
        toeplitz.push(BigInt::one());
        toeplitz.push(-&a[r][r]);
        let mut v: Vec<BigInt> = (0..r).map(|i| a[i][r].clone()).collect();
        for _ in 0..r {
            let rv: BigInt = (0..r).map(|i| &a[r][i] * &v[i]).sum();
            toeplitz.push(-rv);
            v = (0..r).map(|i| (0..r).map(|j| &a[i][j] * &v[j]).sum()).collect();
        }
        let mut next = vec![BigInt::zero(); r + 2];
        for (row, slot) in next.iter_mut().enumerate() {
            for (col, pc) in p.iter().enumerate() {
                if row >= col {
                    *slot += &toeplitz[row - col] * pc;
                }
            }
        }
        p = next;
    }
    p.reverse();
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> Vec<BigInt> {
        c.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn char_poly_small() {
        let k3 = SimpleGraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(char_poly(&k3.adjacency_matrix()).unwrap(), poly(&[-2, -3, 0, 1]));
        assert_eq!(char_poly(&vec![vec![0; 4]; 4]).unwrap(), poly(&[0, 0, 0, 0, 1]));
        assert_eq!(char_poly(&[vec![1, 2], vec![3, 4]]).unwrap(), poly(&[-2, -5, 1]));
        assert_eq!(char_poly(&[]).unwrap(), poly(&[1]));
        assert!(char_poly(&[vec![1, 2]]).is_err());
    }

    #[test]
    fn seidel_trivial_sets() {
        let g = SimpleGraph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(seidel_switch(&g, &[]).unwrap(), g);
        assert_eq!(seidel_switch(&g, &[0, 1, 2, 3]).unwrap(), g);
    }

    #[test]
    fn seidel_path() {
        let p3 = SimpleGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let s = seidel_switch(&p3, &[1]).unwrap();
        assert!(s.edges().is_empty());
        assert_eq!(char_poly(&p3.seidel_matrix()).unwrap(), char_poly(&s.seidel_matrix()).unwrap());
        assert_eq!(seidel_switch(&s, &[1]).unwrap(), p3);
    }

    #[test]
    fn gm_trivial_and_violations() {
        let g = SimpleGraph::from_edges(4, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(gm_switch(&g, &[vec![0, 1, 2, 3]], &[]).unwrap(), g);
        // Vertex 3 sees one of three vertices in the cell.
        let h = SimpleGraph::from_edges(4, &[(0, 1), (1, 2), (0, 2), (3, 0)]).unwrap();
        assert!(matches!(gm_switch(&h, &[vec![0, 1, 2]], &[3]), Err(Error::Condition(_))));
        assert!(gm_switch(&h, &[vec![0, 1]], &[3]).is_err());
    }

    #[test]
    fn graph_format_round_trip() {
        let g = SimpleGraph::from_edges(5, &[(0, 4), (1, 2)]).unwrap();
        let back: SimpleGraph = g.to_string().parse().unwrap();
        assert_eq!(back, g);
        assert!("GRAPH 2\n0 0\n".parse::<SimpleGraph>().is_err());
        assert!("GRAPH 2\n0 2\n".parse::<SimpleGraph>().is_err());
        assert!("GRAF 2\n".parse::<SimpleGraph>().is_err());
    }
}
