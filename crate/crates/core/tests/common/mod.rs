#![allow(dead_code)]

use bhswitch::switchcore::SimpleGraph;
use bhswitch::BHMatrix;
use rand::Rng;

pub fn data(name: &str) -> BHMatrix {
    let path = format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).unwrap().parse().unwrap()
}

pub fn seeds() -> Vec<(&'static str, BHMatrix)> {
    ["bh12_3.txt", "bh12_4.txt", "bh6_3a.txt", "bh6_3b.txt"].into_iter().map(|n| (n, data(n))).collect()
}

/// Exact determinant by fraction-free elimination (Bareiss) in i128.
pub fn bareiss_det(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m.to_vec();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    if n == 0 {
        1
    } else {
        sign * a[n - 1][n - 1]
    }
}

/// `det(xI − M)` at integer `x`.
pub fn char_poly_at(m: &[Vec<i64>], x: i64) -> i128 {
    let n = m.len();
    let shifted: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { x as i128 } else { 0 } - m[i][j] as i128).collect())
        .collect();
    bareiss_det(&shifted)
}

pub fn random_graph<R: Rng>(n: usize, p: f64, rng: &mut R) -> SimpleGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    SimpleGraph::from_edges(n, &edges).unwrap()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Equivalence by trying every pair of permutations and solving for the
/// scalings directly.
pub fn brute_force_equivalent(a: &BHMatrix, b: &BHMatrix) -> bool {
    let (n, k) = (a.n(), a.k());
    if b.n() != n || b.k() != k {
        return false;
    }
    let perms = permutations(n);
    perms.iter().any(|p| {
        perms.iter().any(|q| {
            // b[i][j] = a[p i][q j] + s_i − t_j: fix t_0 = 0.
            let d = |i: usize, j: usize| (b.get(i, j) as usize + k - a.get(p[i], q[j]) as usize) % k;
            (0..n).all(|i| (0..n).all(|j| (d(i, j) + d(0, 0)) % k == (d(i, 0) + d(0, j)) % k))
        })
    })
}

/// Godsil–McKay conditions checked directly from the adjacency matrix.
pub fn gm_conditions_hold(g: &SimpleGraph, cells: &[Vec<usize>]) -> bool {
    let deg_into = |v: usize, cell: &[usize]| cell.iter().filter(|&&u| u != v && g.adjacent(v, u)).count();
    for ci in cells {
        for cj in cells {
            let d = deg_into(ci[0], cj);
            if ci.iter().any(|&v| deg_into(v, cj) != d) {
                return false;
            }
        }
    }
    (0..g.n()).filter(|v| !cells.iter().any(|c| c.contains(v))).all(|v| {
        cells.iter().all(|c| {
            let d = deg_into(v, c);
            d == 0 || d == c.len() || 2 * d == c.len()
        })
    })
}

/// 4-profile of a real (k = 2) matrix: sorted `|Σ_j h_aj h_bj h_cj h_dj|`
/// over all row quadruples. A monomial-equivalence invariant.
pub fn four_profile(h: &BHMatrix) -> Vec<i64> {
    assert_eq!(h.k(), 2);
    let n = h.n();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    let s: i64 = (0..n)
                        .map(|j| if (h.get(a, j) + h.get(b, j) + h.get(c, j) + h.get(d, j)) % 2 == 0 { 1 } else { -1 })
                        .sum();
                    out.push(s.abs());
                }
            }
        }
    }
    out.sort_unstable();
    out
}
