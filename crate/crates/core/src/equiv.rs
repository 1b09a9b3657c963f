//! Monomial equivalence: colored-graph encoding, a canonical certificate and
//! an exact backtracking decision with witness.
//!
//! The encoding has a vertex `(row, i, e)` and `(col, j, e)` for every index
//! and `e ∈ [0, k)`, with `(row, i, e) ~ (col, j, f)` iff `f − e ≡ h_ij`.
//! Each row's copies are linked in the order `e → e + 1` by a path through
//! two extra vertices of distinct colors, so an isomorphism must rotate, not
//! reflect, every row. Isomorphic encodings then come exactly from monomial
//! equivalences, and equal certificates mean equivalent matrices.

use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};
use std::fmt;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::bmatrix::{Axis, BHMatrix, Monomial};
use crate::error::{Error, Result};

/// Largest `n·k` accepted by [`certificate`].
pub const MAX_CERT_SIZE: usize = 512;

/// Colored graph; vertices `0..n·k` are row copies (color 0), then `n·k`
/// column copies (color 1), then the orientation paths (colors 2 and 3).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredGraph {
    pub colors: Vec<u8>,
    pub adj: Vec<Vec<usize>>,
}

impl ColoredGraph {
    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }
}

pub fn encode_graph(h: &BHMatrix) -> ColoredGraph {
    let (n, k) = (h.n(), h.k());
    let nk = n * k;
    let mut adj = vec![Vec::with_capacity(n + 1); 4 * nk];
    for i in 0..n {
        for e in 0..k {
            for j in 0..n {
                let f = (e + h.get(i, j) as usize) % k;
                let (r, c) = (i * k + e, nk + j * k + f);
                adj[r].push(c);
                adj[c].push(r);
            }
        }
    }
    let mut link = |a: usize, b: usize| {
        adj[a].push(b);
        adj[b].push(a);
    };
    for i in 0..n {
        for e in 0..k {
            let (t, u) = (2 * nk + 2 * (i * k + e), 2 * nk + 2 * (i * k + e) + 1);
            link(i * k + e, t);
            link(t, u);
            link(u, i * k + (e + 1) % k);
        }
    }
    let colors = (0..4 * nk)
        .map(|v| match v {
            _ if v < nk => 0,
            _ if v < 2 * nk => 1,
            _ => 2 + ((v - 2 * nk) % 2) as u8,
        })
        .collect();
    ColoredGraph { colors, adj }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Certificate {
    pub digest: [u8; 32],
    pub canonical_graph: Vec<u64>,
}

impl Certificate {
    pub fn hex(&self) -> String {
        hex::encode(self.digest)
    }
}

impl fmt::Debug for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Certificate({})", self.hex())
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.hex())
    }
}

/// Canonical certificate of `H` under monomial equivalence.
pub fn certificate(h: &BHMatrix) -> Result<Certificate> {
    if h.n() * h.k() > MAX_CERT_SIZE {
        return Err(Error::CapExceeded(format!(
            "certificate needs n·k ≤ {MAX_CERT_SIZE}, got {}",
            h.n() * h.k()
        )));
    }
    let g = encode_graph(h);
    let canonical_graph = Canonizer::new(&g).run();
    let mut hasher = Sha256::new();
    hasher.update((h.n() as u64).to_le_bytes());
    hasher.update((h.k() as u64).to_le_bytes());
    for w in &canonical_graph {
        hasher.update(w.to_le_bytes());
    }
    let digest: [u8; 32] = hasher.finalize().into();
    Ok(Certificate { digest, canonical_graph })
}

/// Ordered partition of the vertex set; a cell is named by its first
/// position in `lab`.
#[derive(Clone)]
struct OrderedPartition {
    lab: Vec<usize>,
    pos: Vec<usize>,
    cell_start: Vec<usize>,
    cell_end: Vec<usize>,
    cells: usize,
}

impl OrderedPartition {
    fn from_colors(colors: &[u8]) -> Self {
        let v = colors.len();
        let mut lab: Vec<usize> = (0..v).collect();
        lab.sort_by_key(|&x| (colors[x], x));
        let mut pos = vec![0; v];
        for (p, &x) in lab.iter().enumerate() {
            pos[x] = p;
        }
        let mut part = OrderedPartition { lab, pos, cell_start: vec![0; v], cell_end: vec![0; v], cells: 0 };
        let mut s = 0;
        while s < v {
            let c = colors[part.lab[s]];
            let mut e = s;
            while e < v && colors[part.lab[e]] == c {
                e += 1;
            }
            part.mark_cell(s, e);
            s = e;
        }
        part
    }

    fn mark_cell(&mut self, s: usize, e: usize) {
        for p in s..e {
            self.cell_start[p] = s;
        }
        self.cell_end[s] = e;
        self.cells += 1;
    }

    fn is_discrete(&self) -> bool {
        self.cells == self.lab.len()
    }

    /// First smallest non-singleton cell.
    fn target_cell(&self) -> Option<usize> {
        let mut best: Option<(usize, usize)> = None;
        let mut s = 0;
        while s < self.lab.len() {
            let len = self.cell_end[s] - s;
            if len > 1 && best.map_or(true, |(_, l)| len < l) {
                best = Some((s, len));
            }
            s = self.cell_end[s];
        }
        best.map(|(s, _)| s)
    }

    /// Moves `v` to the front of its cell and makes it a singleton.
    fn individualize(&mut self, v: usize) -> usize {
        let p = self.pos[v];
        let s = self.cell_start[p];
        let e = self.cell_end[s];
        let other = self.lab[s];
        self.lab.swap(s, p);
        self.pos[other] = p;
        self.pos[v] = s;
        self.cells -= 1;
        self.mark_cell(s, s + 1);
        self.mark_cell(s + 1, e);
        s
    }
}

struct Leaf {
    path: Vec<usize>,
    traces: Vec<Vec<u64>>,
    graph: Vec<u64>,
    lab: Vec<usize>,
}

struct Canonizer<'a> {
    g: &'a ColoredGraph,
    words: usize,
    first: Option<Leaf>,
    best: Option<Leaf>,
    automorphisms: Vec<Vec<usize>>,
    cnt: Vec<u32>,
}

impl<'a> Canonizer<'a> {
    fn new(g: &'a ColoredGraph) -> Self {
        let v = g.vertex_count();
        Canonizer {
            g,
            words: v.div_ceil(64),
            first: None,
            best: None,
            automorphisms: Vec::new(),
            cnt: vec![0; v],
        }
    }

    fn run(mut self) -> Vec<u64> {
        let mut part = OrderedPartition::from_colors(&self.g.colors);
        let mut trace = Vec::new();
        let starts: Vec<usize> = (0..part.lab.len()).filter(|&p| part.cell_start[p] == p).collect();
        self.refine(&mut part, starts, &mut trace);
        let mut traces = vec![trace];
        let _ = self.search(part, &mut Vec::new(), &mut traces, false);
        self.best.expect("search reaches at least one leaf").graph
    }

    /// Equitable refinement. Records every split (cell, count, fragment
    /// size) and the final cell count into `trace`.
    fn refine(&mut self, part: &mut OrderedPartition, initial: Vec<usize>, trace: &mut Vec<u64>) {
        let v = part.lab.len();
        let mut queued = vec![false; v];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for s in initial {
            queued[s] = true;
            queue.push_back(s);
        }
        let mut touched: Vec<usize> = Vec::new();
        while let Some(ws) = queue.pop_front() {
            queued[ws] = false;
            if part.is_discrete() {
                break;
            }
            let we = part.cell_end[ws];
            for p in ws..we {
                for &u in &self.g.adj[part.lab[p]] {
                    if self.cnt[u] == 0 {
                        touched.push(u);
                    }
                    self.cnt[u] += 1;
                }
            }
            let mut cells: Vec<usize> = touched.iter().map(|&u| part.cell_start[part.pos[u]]).collect();
            cells.sort_unstable();
            cells.dedup();
            for cs in cells {
                let ce = part.cell_end[cs];
                if ce - cs == 1 {
                    continue;
                }
                let cnt = &self.cnt;
                part.lab[cs..ce].sort_by_key(|&x| cnt[x]);
                for p in cs..ce {
                    part.pos[part.lab[p]] = p;
                }
                if cnt[part.lab[cs]] == cnt[part.lab[ce - 1]] {
                    continue;
                }
                let was_queued = queued[cs];
                let mut frags = Vec::new();
                let mut s = cs;
                while s < ce {
                    let c = cnt[part.lab[s]];
                    let mut e = s;
                    while e < ce && cnt[part.lab[e]] == c {
                        e += 1;
                    }
                    frags.push((s, e));
                    trace.push(((cs as u64) << 40) | ((c as u64) << 20) | (e - s) as u64);
                    s = e;
                }
                part.cells -= 1;
                for &(s, e) in &frags {
                    part.mark_cell(s, e);
                }
                let largest = frags
                    .iter()
                    .enumerate()
                    .max_by(|a, b| (a.1 .1 - a.1 .0).cmp(&(b.1 .1 - b.1 .0)).then(b.0.cmp(&a.0)))
                    .map(|(i, _)| i)
                    .expect("at least two fragments");
                for (i, &(s, _)) in frags.iter().enumerate() {
                    if queued[s] || (!was_queued && i == largest) {
                        continue;
                    }
                    queued[s] = true;
                    queue.push_back(s);
                }
            }
            for &u in &touched {
                self.cnt[u] = 0;
            }
            touched.clear();
        }
        trace.push(u64::MAX - part.cells as u64);
    }

    fn leaf_graph(&self, part: &OrderedPartition) -> Vec<u64> {
        let v = part.lab.len();
        let mut rows = vec![0u64; v * self.words];
        for (p, &x) in part.lab.iter().enumerate() {
            for &u in &self.g.adj[x] {
                let q = part.pos[u];
                rows[p * self.words + q / 64] |= 1 << (q % 64);
            }
        }
        rows
    }

    /// `Less` means the node cannot lead to a better leaf.
    fn compare_prefix(&self, traces: &[Vec<u64>]) -> Ordering {
        match &self.best {
            None => Ordering::Greater,
            Some(best) => {
                for (a, b) in traces.iter().zip(&best.traces) {
                    match a.cmp(b) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                Ordering::Equal
            }
        }
    }

    /// Returns the depth to jump back to after an automorphism was found.
    fn search(
        &mut self,
        part: OrderedPartition,
        fixed: &mut Vec<usize>,
        traces: &mut Vec<Vec<u64>>,
        improving: bool,
    ) -> Option<usize> {
        let improving = improving
            || match self.compare_prefix(traces) {
                Ordering::Less => return None,
                Ordering::Greater => true,
                Ordering::Equal => false,
            };
        if part.is_discrete() {
            return self.visit_leaf(&part, fixed, traces, improving);
        }
        let ts = part.target_cell().expect("non-discrete partition has a target");
        let mut candidates: Vec<usize> = part.lab[ts..part.cell_end[ts]].to_vec();
        candidates.sort_unstable();
        let mut explored: Vec<usize> = Vec::new();
        for &w in &candidates {
            if !explored.is_empty() && self.same_orbit(fixed, &explored, w) {
                continue;
            }
            explored.push(w);
            let mut child = part.clone();
            let s = child.individualize(w);
            let mut trace = Vec::new();
            self.refine(&mut child, vec![s], &mut trace);
            fixed.push(w);
            traces.push(trace);
            let jump = self.search(child, fixed, traces, improving && explored.len() == 1);
            traces.pop();
            fixed.pop();
            if jump.is_some_and(|d| d < fixed.len()) {
                return jump;
            }
        }
        None
    }

    /// Whether `w` shares an orbit with an explored vertex under the stored
    /// automorphisms that fix `fixed` pointwise.
    fn same_orbit(&self, fixed: &[usize], explored: &[usize], w: usize) -> bool {
        let gens: Vec<&Vec<usize>> = self
            .automorphisms
            .iter()
            .filter(|a| fixed.iter().all(|&x| a[x] == x))
            .collect();
        if gens.is_empty() {
            return false;
        }
        let v = self.g.vertex_count();
        let mut parent: Vec<usize> = (0..v).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for a in gens {
            for x in 0..v {
                let (rx, ry) = (find(&mut parent, x), find(&mut parent, a[x]));
                if rx != ry {
                    parent[rx] = ry;
                }
            }
        }
        let rw = find(&mut parent, w);
        explored.iter().any(|&e| find(&mut parent, e) == rw)
    }

    /// An automorphism onto the first or best leaf makes the whole subtree
    /// below their common ancestor redundant; its depth is returned.
    fn visit_leaf(
        &mut self,
        part: &OrderedPartition,
        fixed: &[usize],
        traces: &[Vec<u64>],
        improving: bool,
    ) -> Option<usize> {
        let graph = self.leaf_graph(part);
        let reference = [&self.first, &self.best].into_iter().flatten().find(|r| r.graph == graph);
        if let Some(reference) = reference {
            let mut auto = vec![0; part.lab.len()];
            for (p, &x) in part.lab.iter().enumerate() {
                auto[x] = reference.lab[p];
            }
            let common = fixed.iter().zip(&reference.path).take_while(|(a, b)| a == b).count();
            self.automorphisms.push(auto);
            return Some(common);
        }
        let leaf = Leaf { path: fixed.to_vec(), traces: traces.to_vec(), graph, lab: part.lab.clone() };
        let better = match &self.best {
            None => true,
            Some(best) => improving || (leaf.traces.as_slice(), &leaf.graph) > (best.traces.as_slice(), &best.graph),
        };
        if self.first.is_none() {
            self.first = Some(Leaf {
                path: leaf.path.clone(),
                traces: leaf.traces.clone(),
                graph: leaf.graph.clone(),
                lab: leaf.lab.clone(),
            });
        }
        if better {
            self.best = Some(leaf);
        }
        None
    }
}

/// Per-row invariant: sorted multiset of rotation-normalized difference
/// counting vectors against every other row.
fn row_signatures(h: &BHMatrix) -> Vec<Vec<Vec<i64>>> {
    let n = h.n();
    (0..n)
        .map(|i| {
            let mut sig: Vec<Vec<i64>> = (0..n)
                .filter(|&j| j != i)
                .map(|j| min_rotation(&h.inner_product_counts(Axis::Rows, i, j)))
                .collect();
            sig.sort_unstable();
            sig
        })
        .collect()
}

fn min_rotation(v: &[i64]) -> Vec<i64> {
    let k = v.len();
    (0..k)
        .map(|r| (0..k).map(|t| v[(t + r) % k]).collect::<Vec<i64>>())
        .min()
        .unwrap_or_default()
}

/// `Some((L, R))` with `apply_monomial(A, L, R) == B` iff the matrices are
/// monomially equivalent. Certificates are compared first when both fit
/// under the size cap.
pub fn equivalent_monomial(a: &BHMatrix, b: &BHMatrix) -> Option<(Monomial, Monomial)> {
    if a.n() != b.n() || a.k() != b.k() {
        return None;
    }
    if a.n() * a.k() <= MAX_CERT_SIZE {
        let (ca, cb) = rayon::join(|| certificate(a), || certificate(b));
        if let (Ok(ca), Ok(cb)) = (ca, cb) {
            if ca != cb {
                return None;
            }
        }
    }
    equivalence_witness(a, b)
}

/// Exact backtracking decision without the certificate prefilter.
pub fn equivalence_witness(a: &BHMatrix, b: &BHMatrix) -> Option<(Monomial, Monomial)> {
    if a.n() != b.n() || a.k() != b.k() {
        return None;
    }
    let (sa, sb) = (row_signatures(a), row_signatures(b));
    let mut sorted_a = sa.clone();
    let mut sorted_b = sb.clone();
    sorted_a.sort_unstable();
    sorted_b.sort_unstable();
    if sorted_a != sorted_b {
        return None;
    }
    let n = a.n();
    (0..n)
        .into_par_iter()
        .filter(|&r| sa[r] == sb[0])
        .find_map_first(|r0| Matcher::new(a, b, &sa, &sb, r0).run())
}

/// Backtracking state once row 0 of `B` is matched to row `r0` of `A` with
/// scale 0. Column scalings are then determined by the column matching,
/// so only row permutation, row scaling and column permutation remain.
struct Matcher<'a> {
    a: &'a BHMatrix,
    b: &'a BHMatrix,
    sa: &'a [Vec<Vec<i64>>],
    sb: &'a [Vec<Vec<i64>>],
    r0: usize,
    /// `B[i][j] − B[0][j]`.
    db: Vec<u32>,
    /// `A[r][c] − A[r0][c]`.
    da: Vec<u32>,
    pl: Vec<usize>,
    sl: Vec<u32>,
    used: Vec<bool>,
}

impl<'a> Matcher<'a> {
    fn new(a: &'a BHMatrix, b: &'a BHMatrix, sa: &'a [Vec<Vec<i64>>], sb: &'a [Vec<Vec<i64>>], r0: usize) -> Self {
        let (n, k) = (a.n(), a.k() as u32);
        let db = (0..n * n).map(|p| (b.get(p / n, p % n) + k - b.get(0, p % n)) % k).collect();
        let da = (0..n * n).map(|p| (a.get(p / n, p % n) + k - a.get(r0, p % n)) % k).collect();
        let mut used = vec![false; n];
        used[r0] = true;
        Matcher { a, b, sa, sb, r0, db, da, pl: vec![r0], sl: vec![0], used }
    }

    fn run(mut self) -> Option<(Monomial, Monomial)> {
        let n = self.a.n();
        self.step(1, vec![0; n], vec![0; n])
    }

    /// Refines column classes by one more matched row; `None` if the class
    /// multisets of the two sides disagree.
    fn refine(&self, i: usize, r: usize, s: u32, cb: &[u32], ca: &[u32]) -> Option<(Vec<u32>, Vec<u32>)> {
        let (n, k) = (self.a.n(), self.a.k() as u32);
        let key_b: Vec<u64> = (0..n).map(|j| ((cb[j] as u64) << 16) | self.db[i * n + j] as u64).collect();
        let key_a: Vec<u64> = (0..n)
            .map(|c| ((ca[c] as u64) << 16) | ((self.da[r * n + c] + s) % k) as u64)
            .collect();
        let mut count: HashMap<u64, i64> = HashMap::new();
        for &x in &key_b {
            *count.entry(x).or_default() += 1;
        }
        for &x in &key_a {
            *count.entry(x).or_default() -= 1;
        }
        if count.values().any(|&c| c != 0) {
            return None;
        }
        let mut keys: Vec<u64> = count.into_keys().collect();
        keys.sort_unstable();
        let id = |x: u64| keys.binary_search(&x).expect("key present") as u32;
        Some((key_b.iter().map(|&x| id(x)).collect(), key_a.iter().map(|&x| id(x)).collect()))
    }

    fn step(&mut self, i: usize, cb: Vec<u32>, ca: Vec<u32>) -> Option<(Monomial, Monomial)> {
        let (n, k) = (self.a.n(), self.a.k());
        if i == n {
            return self.witness(&cb, &ca);
        }
        let counts_b = self.b.inner_product_counts(Axis::Rows, i, 0);
        for r in 0..n {
            if self.used[r] || self.sa[r] != self.sb[i] {
                continue;
            }
            let counts_a = self.a.inner_product_counts(Axis::Rows, r, self.r0);
            for s in 0..k {
                // B row i vs row 0 must equal A row r vs r0 shifted by s.
                if (0..k).any(|d| counts_b[(d + s) % k] != counts_a[d]) {
                    continue;
                }
                if !self.pairs_consistent(i, r, s as u32) {
                    continue;
                }
                let Some((nb, na)) = self.refine(i, r, s as u32, &cb, &ca) else {
                    continue;
                };
                self.used[r] = true;
                self.pl.push(r);
                self.sl.push(s as u32);
                if let Some(w) = self.step(i + 1, nb, na) {
                    return Some(w);
                }
                self.sl.pop();
                self.pl.pop();
                self.used[r] = false;
            }
        }
        None
    }

    /// Difference counts of row `i` against earlier matched rows agree
    /// under the chosen scales.
    fn pairs_consistent(&self, i: usize, r: usize, s: u32) -> bool {
        let k = self.a.k();
        (1..i).all(|i2| {
            let (r2, s2) = (self.pl[i2], self.sl[i2]);
            let shift = (s as usize + k - s2 as usize) % k;
            let cb = self.b.inner_product_counts(Axis::Rows, i, i2);
            let ca = self.a.inner_product_counts(Axis::Rows, r, r2);
            (0..k).all(|d| cb[(d + shift) % k] == ca[d])
        })
    }

    fn witness(&self, cb: &[u32], ca: &[u32]) -> Option<(Monomial, Monomial)> {
        let (n, k) = (self.a.n(), self.a.k());
        let mut by_class: HashMap<u32, Vec<usize>> = HashMap::new();
        for c in (0..n).rev() {
            by_class.entry(ca[c]).or_default().push(c);
        }
        let pr: Vec<usize> = cb
            .iter()
            .map(|cls| by_class.get_mut(cls).and_then(Vec::pop))
            .collect::<Option<_>>()?;
        let sr: Vec<u32> = (0..n)
            .map(|j| ((self.a.get(self.r0, pr[j]) as usize + k - self.b.get(0, j) as usize) % k) as u32)
            .collect();
        let left = Monomial::new(self.pl.clone(), self.sl.clone(), k).ok()?;
        let right = Monomial::new(pr, sr, k).ok()?;
        (self.a.apply_monomial(&left, &right).ok()? == *self.b).then_some((left, right))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{fourier, kronecker};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scramble(h: &BHMatrix, rng: &mut ChaCha8Rng) -> BHMatrix {
        let l = Monomial::random(h.n(), h.k(), rng);
        let r = Monomial::random(h.n(), h.k(), rng);
        h.apply_monomial(&l, &r).unwrap()
    }

    #[test]
    fn encoding_shape() {
        let g = encode_graph(&fourier(2));
        assert_eq!(g.vertex_count(), 16);
        assert!(g.adj[..4].iter().all(|a| a.len() == 4));
        assert!(g.adj[4..8].iter().all(|a| a.len() == 2));
        let h = fourier(5);
        assert_eq!(encode_graph(&h).vertex_count(), 4 * 5 * 5);
    }

    #[test]
    fn scrambles_share_certificates() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for h in [fourier(4), fourier(6), kronecker(&fourier(2), &fourier(3))] {
            let c = certificate(&h).unwrap();
            for _ in 0..30 {
                assert_eq!(certificate(&scramble(&h, &mut rng)).unwrap(), c);
            }
        }
    }

    #[test]
    fn certificate_cap() {
        assert!(matches!(certificate(&fourier(23)), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn witness_reproduces_scramble() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for h in [fourier(3), fourier(7), kronecker(&fourier(2), &kronecker(&fourier(2), &fourier(2)))] {
            for _ in 0..10 {
                let s = scramble(&h, &mut rng);
                let (l, r) = equivalent_monomial(&h, &s).expect("scramble is equivalent");
                assert_eq!(h.apply_monomial(&l, &r).unwrap(), s);
            }
        }
    }

    #[test]
    fn order_four_real_hadamard_is_one_class() {
        let a = kronecker(&fourier(2), &fourier(2));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            assert!(equivalent_monomial(&scramble(&a, &mut rng), &scramble(&a, &mut rng)).is_some());
        }
    }

    #[test]
    fn different_shapes_are_inequivalent() {
        assert!(equivalent_monomial(&fourier(2), &fourier(3)).is_none());
        assert!(equivalent_monomial(&fourier(4), &fourier(4).lift(2)).is_none());
    }

    #[test]
    fn fourier_four_against_product_over_fourth_roots() {
        let f4 = fourier(4);
        let f22 = kronecker(&fourier(2), &fourier(2)).lift(2);
        let exact = equivalence_witness(&f4, &f22).is_some();
        assert_eq!(equivalent_monomial(&f4, &f22).is_some(), exact);
        assert!(!exact);
    }
}
