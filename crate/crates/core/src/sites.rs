//! Switchable configurations: Fourier sets, generalized Hall forms, and the
//! general rank-1 and rank-2 block conditions. Every finder emits plans
//! that `switchcore::apply_switch` accepts.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use rayon::prelude::*;

use crate::bmatrix::{BHMatrix, Monomial, UMatrix};
use crate::cyclo::Cyc;
use crate::error::{Error, Result};
use crate::switchcore::{apply_switch, Partition, RootMul, SwitchPlan};

/// Row-subset searches refuse orders above this.
pub const MAX_SEARCH_ORDER: usize = 24;
/// ... and root orders above this.
pub const MAX_SEARCH_K: usize = 6;

fn check_search_caps(h: &BHMatrix) -> Result<()> {
    if h.n() > MAX_SEARCH_ORDER || h.k() > MAX_SEARCH_K {
        return Err(Error::CapExceeded(format!(
            "site search needs n ≤ {MAX_SEARCH_ORDER} and k ≤ {MAX_SEARCH_K} (got n={}, k={}); supply row sets explicitly",
            h.n(),
            h.k()
        )));
    }
    Ok(())
}

/// All `r`-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if r > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        out.push(idx.clone());
        let Some(p) = (0..r).rev().find(|&p| idx[p] != p + n - r) else {
            return out;
        };
        idx[p] += 1;
        for q in p + 1..r {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

/// Lexicographic successor; `false` once `v` is the last permutation.
fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("pivot has a successor");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn md(x: i64, k: usize) -> u32 {
    x.rem_euclid(k as i64) as u32
}

/// Column `c` restricted to `rows`, normalized so the first row is 0.
fn column_type(h: &BHMatrix, rows: &[usize], c: usize) -> Vec<u32> {
    let base = h.get(rows[0], c) as i64;
    rows.iter().map(|&r| md(h.get(r, c) as i64 - base, h.k())).collect()
}

/// Given `k` rows and one representative column per type, finds labels
/// `σ` (rows) and `φ` (types), both bijections onto `Z_k`, with
/// `N[i][t] = d_i + σ_i φ_t` where `N` is the normalized type table.
/// Returns `(σ, φ)`.
fn fourier_frame(types: &[Vec<u32>], k: usize) -> Option<(Vec<usize>, Vec<usize>)> {
    if types.len() != k || k < 2 {
        return None;
    }
    let bijective = |v: &[usize]| {
        let mut seen = vec![false; k];
        v.iter().all(|&x| !std::mem::replace(&mut seen[x], true))
    };
    for i1 in 1..k {
        let phi: Vec<usize> = types
            .iter()
            .map(|t| md(t[i1] as i64 - types[0][i1] as i64, k) as usize)
            .collect();
        if !bijective(&phi) {
            continue;
        }
        let mut of_label = vec![0; k];
        for (t, &b) in phi.iter().enumerate() {
            of_label[b] = t;
        }
        let sigma: Option<Vec<usize>> = (0..k)
            .map(|i| {
                let d = types[of_label[0]][i] as i64;
                let s = md(types[of_label[1]][i] as i64 - d, k) as i64;
                types
                    .iter()
                    .zip(&phi)
                    .all(|(t, &b)| t[i] == md(d + s * b as i64, k))
                    .then_some(s as usize)
            })
            .collect();
        if let Some(sigma) = sigma.filter(|s| bijective(s)) {
            return Some((sigma, phi));
        }
    }
    None
}

/// Rows `row_set` (in `F_k` row order) read `F_k ⊗ j_m` over the column
/// blocks after applying `normalizer`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourierSite {
    pub row_set: Vec<usize>,
    pub col_blocks: Vec<Vec<usize>>,
    pub normalizer: (Monomial, Monomial),
}

impl FourierSite {
    fn build(h: &BHMatrix, row_set: Vec<usize>, col_blocks: Vec<Vec<usize>>) -> Self {
        let (n, k) = (h.n(), h.k());
        let mut pl = row_set.clone();
        pl.extend((0..n).filter(|r| !row_set.contains(r)));
        let pr: Vec<usize> = col_blocks.concat();
        let sr: Vec<u32> = pr.iter().map(|&c| h.get(row_set[0], c)).collect();
        let c0 = col_blocks[0][0];
        let sl: Vec<u32> = pl
            .iter()
            .enumerate()
            .map(|(t, &r)| if t < k { md(h.get(row_set[0], c0) as i64 - h.get(r, c0) as i64, k) } else { 0 })
            .collect();
        let normalizer = (
            Monomial::new(pl, sl, k).expect("row order is a permutation"),
            Monomial::new(pr, sr, k).expect("blocks partition the columns"),
        );
        FourierSite { row_set, col_blocks, normalizer }
    }

    pub fn m(&self) -> usize {
        self.col_blocks[0].len()
    }

    /// Checks that the normalized rows equal `F_k ⊗ j_m`.
    pub fn validate(&self, h: &BHMatrix) -> Result<()> {
        let k = h.k();
        let bad = |msg: String| Err(Error::Invalid(format!("Fourier site: {msg}")));
        if self.row_set.len() != k || self.col_blocks.len() != k {
            return bad(format!("needs {k} rows and {k} blocks"));
        }
        let m = h.n() / k;
        if h.n() % k != 0 || self.col_blocks.iter().any(|b| b.len() != m) {
            return bad("blocks must all have size n/k".into());
        }
        let (l, r) = &self.normalizer;
        if l.perm()[..k] != self.row_set[..] || r.perm() != self.col_blocks.concat() {
            return bad("normalizer does not match rows and blocks".into());
        }
        let kk = h.apply_monomial(l, r)?;
        for t in 0..k {
            for j in 0..h.n() {
                if kk.get(t, j) as usize != t * (j / m) % k {
                    return bad(format!("normalized entry ({t}, {j}) is off"));
                }
            }
        }
        Ok(())
    }

    pub fn plan(&self, block: usize, coeff: u32, k: usize) -> Result<SwitchPlan<RootMul>> {
        if block >= self.col_blocks.len() {
            return Err(Error::IndexOutOfRange { index: block, size: self.col_blocks.len() });
        }
        let n = self.normalizer.0.len();
        let mut rows = self.row_set.clone();
        rows.sort_unstable();
        SwitchPlan::new(
            Partition::new(n, vec![rows])?,
            Partition::new(n, vec![self.col_blocks[block].clone()])?,
            vec![vec![RootMul::new(coeff as i64, k)]],
        )
    }
}

impl fmt::Display for FourierSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rows {} blocks {} left {} right {}", join(&self.row_set), join_cells(&self.col_blocks), self.normalizer.0, self.normalizer.1)
    }
}

fn join(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn join_cells(cells: &[Vec<usize>]) -> String {
    cells.iter().map(|c| join(c)).collect::<Vec<_>>().join("|")
}

/// Every `k`-subset of rows whose normalized columns are `F_k ⊗ j_m`.
pub fn find_fourier_sites(h: &BHMatrix) -> Result<Vec<FourierSite>> {
    let (n, k) = (h.n(), h.k());
    if k < 2 || n % k != 0 {
        return Ok(Vec::new());
    }
    check_search_caps(h)?;
    let m = n / k;
    let sites = combinations(n, k)
        .into_par_iter()
        .filter_map(|rows| {
            let mut groups: BTreeMap<Vec<u32>, Vec<usize>> = BTreeMap::new();
            for c in 0..n {
                groups.entry(column_type(h, &rows, c)).or_default().push(c);
                if groups.len() > k {
                    return None;
                }
            }
            if groups.len() != k || groups.values().any(|g| g.len() != m) {
                return None;
            }
            let types: Vec<Vec<u32>> = groups.keys().cloned().collect();
            let (sigma, phi) = fourier_frame(&types, k)?;
            let mut row_set = vec![0; k];
            for (i, &s) in sigma.iter().enumerate() {
                row_set[s] = rows[i];
            }
            let mut col_blocks = vec![Vec::new(); k];
            for (g, &b) in groups.into_values().zip(&phi) {
                col_blocks[b] = g;
            }
            Some(FourierSite::build(h, row_set, col_blocks))
        })
        .collect();
    Ok(sites)
}

/// Multiplies the `block`-th `k × m` block of the site by `ζ^coeff`.
pub fn fourier_set_switch(h: &BHMatrix, site: &FourierSite, block: usize, coeff: u32) -> Result<BHMatrix> {
    site.validate(h)?;
    if coeff as usize % h.k() == 0 {
        return Ok(h.clone());
    }
    apply_switch(h, &site.plan(block, coeff, h.k())?)
}

/// The circulant-bordered form of order `k + k·n`:
///
/// ```text
/// [ S            F_k ⊗ j_n ]
/// [ (F_k ⊗ j_n)*    A_ij   ]
/// ```
#[derive(Clone, Debug)]
pub struct GenHallForm {
    pub k: usize,
    pub n: usize,
    /// First-row exponents of the circulant block `S`.
    pub s: Vec<u32>,
    /// `λ_m = Σ_j ζ^{s_j + j m}`.
    pub lambdas: Vec<Cyc>,
    /// `A_ij` with `i`, `j` in `0..k`.
    pub blocks: Vec<Vec<BHMatrix>>,
}

impl GenHallForm {
    pub fn block_rows(&self, m: usize) -> Vec<usize> {
        (self.k + m * self.n..self.k + (m + 1) * self.n).collect()
    }

    /// Row sums and column sums of `A_ij`.
    pub fn block_sums(&self, i: usize, j: usize) -> (Vec<Cyc>, Vec<Cyc>) {
        line_sums(&self.blocks[i][j])
    }

    pub fn plan(&self, m: usize, coeff: u32) -> Result<SwitchPlan<RootMul>> {
        let k = self.k;
        if m >= k {
            return Err(Error::IndexOutOfRange { index: m, size: k });
        }
        if coeff as usize % k == 0 {
            return Err(Error::Invalid("generalized Hall switch needs a non-trivial coefficient".into()));
        }
        let order = k + k * self.n;
        let top: Vec<usize> = (0..k).collect();
        let part = || Partition::new(order, vec![top.clone(), self.block_rows(m)]);
        let id = RootMul::new(0, k);
        let coeffs = vec![
            vec![id, RootMul::new(coeff as i64, k)],
            vec![RootMul::new(-(coeff as i64), k), id],
        ];
        SwitchPlan::new(part()?, part()?, coeffs)
    }
}

fn line_sums(a: &BHMatrix) -> (Vec<Cyc>, Vec<Cyc>) {
    let (n, k) = (a.n(), a.k());
    let sum = |cells: &mut dyn Iterator<Item = u32>| {
        let mut counts = vec![0i64; k];
        for e in cells {
            counts[e as usize] += 1;
        }
        Cyc::from_counts(k, &counts)
    };
    let rows = (0..n).map(|i| sum(&mut a.row(i).iter().copied())).collect();
    let cols = (0..n).map(|j| sum(&mut (0..n).map(|i| a.get(i, j)))).collect();
    (rows, cols)
}

fn submatrix(h: &BHMatrix, rows: &[usize], cols: &[usize]) -> BHMatrix {
    assert_eq!(rows.len(), cols.len());
    BHMatrix::from_fn(rows.len(), h.k(), |i, j| h.get(rows[i], cols[j]) as i64)
}

/// Verifies the literal generalized Hall layout and its block-sum
/// conclusions.
pub fn check_genhall_form(h: &BHMatrix, k: usize) -> Result<GenHallForm> {
    if k < 2 {
        return Err(Error::Invalid("generalized Hall form needs k ≥ 2".into()));
    }
    if h.k() != k {
        return Err(Error::OrderMismatch(k, h.k()));
    }
    let order = h.n();
    if order % k != 0 || order / k < 2 {
        return Err(Error::Dimension(format!("order {order} is not k + k·n with n ≥ 1 for k = {k}")));
    }
    let n = order / k - 1;
    h.ensure_hadamard()?;
    let fail = |msg: String| Err(Error::Condition(msg));
    let s: Vec<u32> = h.row(0)[..k].to_vec();
    for i in 0..k {
        for j in 0..k {
            if h.get(i, j) != s[(j + k - i) % k] {
                return fail(format!("top-left block is not circulant at ({i}, {j})"));
            }
        }
    }
    let top: Vec<usize> = (0..k).collect();
    if !submatrix(h, &top, &top).is_butson_hadamard() {
        return fail("top-left circulant block is not Hadamard".into());
    }
    for i in 0..k {
        for c in k..order {
            let b = (c - k) / n;
            if h.get(i, c) as usize != i * b % k {
                return fail(format!("top border differs from F_k ⊗ j_n at ({i}, {c})"));
            }
            if h.get(c, i) != md(-((i * b) as i64), k) {
                return fail(format!("left border differs from (F_k ⊗ j_n)* at ({c}, {i})"));
            }
        }
    }
    let lambdas: Vec<Cyc> = (0..k)
        .map(|m| {
            let mut counts = vec![0i64; k];
            for (j, &sj) in s.iter().enumerate() {
                counts[(sj as usize + j * m) % k] += 1;
            }
            Cyc::from_counts(k, &counts)
        })
        .collect();
    let block = |i: usize| -> Vec<usize> { (k + i * n..k + (i + 1) * n).collect() };
    let blocks: Vec<Vec<BHMatrix>> = (0..k)
        .map(|i| (0..k).map(|j| submatrix(h, &block(i), &block(j))).collect())
        .collect();
    for (i, row) in blocks.iter().enumerate() {
        for (j, a) in row.iter().enumerate() {
            let target = if i == j { -&lambdas[i].conj() } else { Cyc::zero(k) };
            let (rs, cs) = line_sums(a);
            if let Some(x) = rs.iter().chain(&cs).find(|x| **x != target) {
                return fail(format!("block A_{i}{j} has a line sum {x}, expected {target}"));
            }
        }
    }
    Ok(GenHallForm { k, n, s, lambdas, blocks })
}

/// Rank-2 switch of the border blocks for block position `m`.
pub fn genhall_switch(h: &BHMatrix, form: &GenHallForm, m: usize, coeff: u32) -> Result<BHMatrix> {
    if form.k != h.k() || form.k + form.k * form.n != h.n() {
        return Err(Error::Invalid("form does not describe this matrix".into()));
    }
    apply_switch(h, &form.plan(m, coeff)?)
}

/// A monomial image of `H` in literal generalized Hall layout:
/// `matrix = apply_monomial(H, left, right)`.
#[derive(Clone, Debug)]
pub struct GenHallLayout {
    pub left: Monomial,
    pub right: Monomial,
    pub matrix: BHMatrix,
    pub form: GenHallForm,
}

/// Monomial rearrangements of `H` into generalized Hall layout, at most
/// `limit` of them, ordered by the row set that becomes the top block.
///
/// Returns `H` itself first when it is already in layout. Otherwise each
/// `k`-subset of rows is tried as the top block: `k` of its column types
/// must be Fourier-like with multiplicity at least `n`, the `k` leftover
/// columns must admit a circulant arrangement, and the remaining rows
/// must split into `k` groups matching the conjugate left border.
pub fn find_genhall_layouts(h: &BHMatrix, limit: usize) -> Result<Vec<GenHallLayout>> {
    let (order, k) = (h.n(), h.k());
    if k < 2 || order % k != 0 || order / k < 2 || limit == 0 {
        return Ok(Vec::new());
    }
    if let Ok(form) = check_genhall_form(h, k) {
        let id = Monomial::identity(order, k);
        return Ok(vec![GenHallLayout { left: id.clone(), right: id, matrix: h.clone(), form }]);
    }
    check_search_caps(h)?;
    let subsets = combinations(order, k);
    let mut found: Vec<GenHallLayout> = Vec::new();
    for chunk in subsets.chunks(64) {
        let batch: Vec<GenHallLayout> = chunk.par_iter().filter_map(|r1| layout_for_rows(h, r1)).collect();
        found.extend(batch);
        if found.len() >= limit {
            found.truncate(limit);
            break;
        }
    }
    Ok(found)
}

fn layout_for_rows(h: &BHMatrix, r1: &[usize]) -> Option<GenHallLayout> {
    let (order, k) = (h.n(), h.k());
    let nb = order / k - 1;
    let mut groups: BTreeMap<Vec<u32>, Vec<usize>> = BTreeMap::new();
    for c in 0..order {
        groups.entry(column_type(h, r1, c)).or_default().push(c);
    }
    let types: Vec<(Vec<u32>, Vec<usize>)> = groups.into_iter().collect();
    let candidates: Vec<usize> = (0..types.len()).filter(|&t| types[t].1.len() >= nb).collect();
    let units: Vec<(usize, usize)> = (1..k)
        .filter(|u| u.gcd(&k) == 1)
        .map(|u| (u, (1..k).find(|v| u * v % k == 1).expect("unit has an inverse")))
        .collect();
    for chosen in combinations(candidates.len(), k) {
        let chosen: Vec<usize> = chosen.iter().map(|&i| candidates[i]).collect();
        let chosen_types: Vec<Vec<u32>> = chosen.iter().map(|&t| types[t].0.clone()).collect();
        let Some((sigma, phi)) = fourier_frame(&chosen_types, k) else {
            continue;
        };
        let surplus: usize = chosen.iter().map(|&t| types[t].1.len() - nb).sum();
        let others: Vec<usize> = (0..types.len())
            .filter(|t| !chosen.contains(t))
            .flat_map(|t| types[t].1.iter().copied())
            .collect();
        if surplus + others.len() != k {
            continue;
        }
        for left_out in surplus_choices(&chosen.iter().map(|&t| types[t].1.clone()).collect::<Vec<_>>(), nb) {
            let mut c1: Vec<usize> = others.clone();
            c1.extend(left_out.iter().flatten());
            c1.sort_unstable();
            for &(u, uinv) in &units {
                for a in 0..k {
                    for c in 0..k {
                        let mut r1_order = vec![0; k];
                        for (i, &s) in sigma.iter().enumerate() {
                            r1_order[(u * s + a) % k] = r1[i];
                        }
                        let mut block_cols = vec![Vec::new(); k];
                        for (slot, &t) in chosen.iter().enumerate() {
                            let cols: Vec<usize> =
                                types[t].1.iter().copied().filter(|x| !left_out[slot].contains(x)).collect();
                            block_cols[(uinv * phi[slot] + c) % k] = cols;
                        }
                        let mut c1_order = c1.clone();
                        loop {
                            if let Some(layout) = assemble(h, &r1_order, &block_cols, &c1_order) {
                                return Some(layout);
                            }
                            if !next_permutation(&mut c1_order) {
                                break;
                            }
                        }
                    }
                }
            }
        }
    }
    None
}

/// For each chosen type, every way of leaving out its surplus columns.
fn surplus_choices(cols: &[Vec<usize>], nb: usize) -> Vec<Vec<Vec<usize>>> {
    const MAX_CHOICES: usize = 256;
    let mut acc: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for group in cols {
        let extra = group.len() - nb;
        let picks: Vec<Vec<usize>> = combinations(group.len(), extra)
            .into_iter()
            .map(|idx| idx.iter().map(|&i| group[i]).collect())
            .collect();
        let mut next = Vec::new();
        for prefix in &acc {
            for p in &picks {
                let mut v = prefix.clone();
                v.push(p.clone());
                next.push(v);
                if next.len() >= MAX_CHOICES {
                    break;
                }
            }
        }
        acc = next;
    }
    acc
}

fn assemble(h: &BHMatrix, r1_order: &[usize], block_cols: &[Vec<usize>], c1: &[usize]) -> Option<GenHallLayout> {
    let (order, k) = (h.n(), h.k());
    let nb = order / k - 1;
    let g = |r: usize, c: usize| h.get(r, c) as i64;
    // Top rows against block columns: K[t][col] = t·b.
    let c0 = block_cols[0][0];
    let sl_top: Vec<i64> = r1_order.iter().map(|&r| g(r1_order[0], c0) - g(r, c0)).collect();
    let mut sr = vec![0i64; order];
    for (b, cols) in block_cols.iter().enumerate() {
        for &col in cols {
            sr[col] = g(r1_order[0], col);
            for (t, &r) in r1_order.iter().enumerate() {
                if md(g(r, col) + sl_top[t] - sr[col], k) as usize != t * b % k {
                    return None;
                }
            }
        }
    }
    // Leftover columns: circulant top-left block.
    let top = |t: usize, col: usize| g(r1_order[t], col) + sl_top[t];
    sr[c1[0]] = 0;
    for j in 1..k {
        sr[c1[j]] = sr[c1[j - 1]] + top(1, c1[j]) - top(0, c1[j - 1]);
    }
    let s: Vec<u32> = (0..k).map(|j| md(top(0, c1[j]) - sr[c1[j]], k)).collect();
    for t in 0..k {
        for j in 0..k {
            if md(top(t, c1[j]) - sr[c1[j]], k) != s[(j + k - t) % k] {
                return None;
            }
        }
    }
    // Remaining rows: conjugate Fourier border on the leftover columns.
    let mut groups = vec![Vec::new(); k];
    let mut sl_rest = vec![0i64; order];
    for r in (0..order).filter(|r| !r1_order.contains(r)) {
        sl_rest[r] = sr[c1[0]] - g(r, c1[0]);
        let p = |j: usize| md(g(r, c1[j]) + sl_rest[r] - sr[c1[j]], k) as usize;
        let b = (k - p(1)) % k;
        if (0..k).any(|j| p(j) != (k - j * b % k) % k) {
            return None;
        }
        groups[b].push(r);
    }
    if groups.iter().any(|grp| grp.len() != nb) {
        return None;
    }
    let mut pl: Vec<usize> = r1_order.to_vec();
    pl.extend(groups.iter().flatten());
    let sl: Vec<u32> = pl
        .iter()
        .enumerate()
        .map(|(i, &r)| md(if i < k { sl_top[i] } else { sl_rest[r] }, k))
        .collect();
    let mut pr: Vec<usize> = c1.to_vec();
    pr.extend(block_cols.iter().flatten());
    let srs: Vec<u32> = pr.iter().map(|&c| md(sr[c], k)).collect();
    let left = Monomial::new(pl, sl, k).ok()?;
    let right = Monomial::new(pr, srs, k).ok()?;
    let matrix = h.apply_monomial(&left, &right).ok()?;
    let form = check_genhall_form(&matrix, k).ok()?;
    Some(GenHallLayout { left, right, matrix, form })
}

/// Whether columns from distinct cells are orthogonal on the rows `r1`.
/// `cells` must partition all columns.
pub fn check_rank1_conditions(h: &BHMatrix, r1: &[usize], cells: &[Vec<usize>]) -> bool {
    let Ok(p) = Partition::new(h.n(), cells.to_vec()) else {
        return false;
    };
    if !p.rest().is_empty() || r1.is_empty() || r1.iter().any(|&r| r >= h.n()) {
        return false;
    }
    let k = h.k();
    let orth = |c: usize, d: usize| {
        let mut counts = vec![0i64; k];
        for &r in r1 {
            counts[(h.get(r, c) as usize + k - h.get(r, d) as usize) % k] += 1;
        }
        crate::cyclo::counts_vanish(k, &counts)
    };
    cells.iter().enumerate().all(|(i, ci)| {
        cells[i + 1..]
            .iter()
            .all(|cj| ci.iter().all(|&c| cj.iter().all(|&d| orth(c, d))))
    })
}

/// Rows and column cells of `A ⊗ B` meeting the rank-1 conditions: the
/// first `B.n` rows, and cells `C_i = {a·B.n + i}`.
pub fn kron_rank1_partition(a: &BHMatrix, b: &BHMatrix) -> (Vec<usize>, Vec<Vec<usize>>) {
    let bn = b.n();
    let r1 = (0..bn).collect();
    let cells = (0..bn).map(|i| (0..a.n()).map(|x| x * bn + i).collect()).collect();
    (r1, cells)
}

/// Rows `rows` and a column partition satisfying the rank-1 conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rank1Site {
    pub rows: Vec<usize>,
    pub cells: Vec<Vec<usize>>,
}

impl Rank1Site {
    pub fn new(h: &BHMatrix, rows: Vec<usize>, cells: Vec<Vec<usize>>) -> Result<Self> {
        if cells.len() < 2 {
            return Err(Error::Degenerate("a single column cell only rescales rows".into()));
        }
        if !check_rank1_conditions(h, &rows, &cells) {
            return Err(Error::Condition("columns from distinct cells are not orthogonal on the rows".into()));
        }
        Ok(Rank1Site { rows, cells })
    }

    pub fn plan(&self, cell: usize, coeff: u32, k: usize) -> Result<SwitchPlan<RootMul>> {
        if cell >= self.cells.len() {
            return Err(Error::IndexOutOfRange { index: cell, size: self.cells.len() });
        }
        let n = self.cells.iter().map(Vec::len).sum();
        SwitchPlan::new(
            Partition::new(n, vec![self.rows.clone()])?,
            Partition::new(n, vec![self.cells[cell].clone()])?,
            vec![vec![RootMul::new(coeff as i64, k)]],
        )
    }
}

impl fmt::Display for Rank1Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rows {} cells {}", join(&self.rows), join_cells(&self.cells))
    }
}

pub fn rank1_switch(h: &BHMatrix, site: &Rank1Site, cell: usize, coeff: u32) -> Result<BHMatrix> {
    if !check_rank1_conditions(h, &site.rows, &site.cells) {
        return Err(Error::Condition("rank-1 site does not hold for this matrix".into()));
    }
    if coeff as usize % h.k() == 0 {
        return Ok(h.clone());
    }
    apply_switch(h, &site.plan(cell, coeff, h.k())?)
}

/// Row subsets of size `2..=max_rows` whose columns fall into at least two
/// proportionality classes that are pairwise orthogonal on those rows.
pub fn find_rank1_sites(h: &BHMatrix, max_rows: usize) -> Result<Vec<Rank1Site>> {
    check_search_caps(h)?;
    let n = h.n();
    let mut sites = Vec::new();
    for r in 2..=max_rows.min(n / 2) {
        let found: Vec<Rank1Site> = combinations(n, r)
            .into_par_iter()
            .filter_map(|rows| {
                let mut groups: BTreeMap<Vec<u32>, Vec<usize>> = BTreeMap::new();
                for c in 0..n {
                    groups.entry(column_type(h, &rows, c)).or_default().push(c);
                }
                if groups.len() < 2 {
                    return None;
                }
                let cells: Vec<Vec<usize>> = groups.into_values().collect();
                check_rank1_conditions(h, &rows, &cells).then_some(Rank1Site { rows, cells })
            })
            .collect();
        sites.extend(found);
    }
    Ok(sites)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Column,
    Row,
}

/// `(R, R_1, R_2)` and `(C, C_1, C_2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rank2Parts {
    pub rows: [Vec<usize>; 3],
    pub cols: [Vec<usize>; 3],
}

impl Rank2Parts {
    fn transposed(&self) -> Rank2Parts {
        Rank2Parts { rows: self.cols.clone(), cols: self.rows.clone() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rank2Form {
    pub parts: Rank2Parts,
    pub s: Cyc,
    pub orientation: Orientation,
}

impl Rank2Form {
    pub fn plan(&self, z: u32, n: usize, k: usize) -> Result<SwitchPlan<RootMul>> {
        let [_, r1, r2] = &self.parts.rows;
        let [_, c1, c2] = &self.parts.cols;
        let id = RootMul::new(0, k);
        SwitchPlan::new(
            Partition::new(n, vec![r1.clone(), r2.clone()])?,
            Partition::new(n, vec![c1.clone(), c2.clone()])?,
            vec![vec![id, RootMul::new(z as i64, k)], vec![RootMul::new(-(z as i64), k), id]],
        )
    }
}

/// Checks the rank-2 conditions.
///
/// Column orientation: (1) `(R, C)` has constant column sums `s`;
/// (2) `(R_1, C_1)` column sums `−s̄`; (3) `(R, C_1)` and `(R_1, C)` are
/// all-ones; (4) `(R, C_2)` and `(R_1, C_2)` have zero column sums. Row
/// orientation is the same list read on the transpose, so (1), (2) use row
/// sums and (4) concerns `(R_2, C)` and `(R_2, C_1)`. Condition 3 is checked
/// first.
pub fn check_rank2_conditions(h: &BHMatrix, parts: &Rank2Parts, orientation: Orientation) -> Result<Rank2Form> {
    let n = h.n();
    for (name, p) in [("row", &parts.rows), ("column", &parts.cols)] {
        if p.iter().any(|x| x.is_empty()) {
            return Err(Error::InvalidPlan(format!("{name} parts must be non-empty")));
        }
        let part = Partition::new(n, p.to_vec())?;
        if !part.rest().is_empty() {
            return Err(Error::InvalidPlan(format!("{name} parts do not cover every index")));
        }
    }
    let s = match orientation {
        Orientation::Column => column_conditions(h, parts)?,
        Orientation::Row => column_conditions(&h.transpose(), &parts.transposed())?,
    };
    Ok(Rank2Form { parts: parts.clone(), s, orientation })
}

fn column_conditions(h: &BHMatrix, parts: &Rank2Parts) -> Result<Cyc> {
    let k = h.k();
    let [r, r1, _] = &parts.rows;
    let [c, c1, c2] = &parts.cols;
    let fail = |i: usize, msg: &str| Err(Error::Condition(format!("condition {i}: {msg}")));
    let all_ones = |rows: &[usize], cols: &[usize]| rows.iter().all(|&i| cols.iter().all(|&j| h.get(i, j) == 0));
    if !all_ones(r, c1) || !all_ones(r1, c) {
        return fail(3, "(R, C1) and (R1, C) must be all-ones");
    }
    let col_sum = |rows: &[usize], j: usize| {
        let mut counts = vec![0i64; k];
        for &i in rows {
            counts[h.get(i, j) as usize] += 1;
        }
        Cyc::from_counts(k, &counts)
    };
    let s = col_sum(r, c[0]);
    if c.iter().any(|&j| col_sum(r, j) != s) {
        return fail(1, "(R, C) column sums are not constant");
    }
    let target = -&s.conj();
    if c1.iter().any(|&j| col_sum(r1, j) != target) {
        return fail(2, "(R1, C1) column sums differ from −conj(s)");
    }
    if c2.iter().any(|&j| !col_sum(r, j).is_zero() || !col_sum(r1, j).is_zero()) {
        return fail(4, "(R, C2) and (R1, C2) column sums must vanish");
    }
    Ok(s)
}

/// Multiplies `(R_1, C_2)` by `ζ^z` and `(R_2, C_1)` by `ζ^{−z}`.
pub fn rank2_switch(h: &BHMatrix, form: &Rank2Form, z: u32) -> Result<BHMatrix> {
    let checked = check_rank2_conditions(h, &form.parts, form.orientation)?;
    if z as usize % h.k() == 0 {
        return Ok(h.clone());
    }
    apply_switch(h, &checked.plan(z, h.n(), h.k())?)
}

/// Float path: the same blocks scaled by an arbitrary unit `z`.
pub fn rank2_switch_float(u: &UMatrix, form: &Rank2Form, z: Complex64, tol: f64) -> Result<UMatrix> {
    if (z.norm() - 1.0).abs() > UMatrix::MODULUS_TOL {
        return Err(Error::Invalid(format!("switching coefficient {z} is not unimodular")));
    }
    let mut out = u.clone();
    let [_, r1, r2] = &form.parts.rows;
    let [_, c1, c2] = &form.parts.cols;
    for &i in r1 {
        for &j in c2 {
            out.set(i, j, u.get(i, j) * z);
        }
    }
    for &i in r2 {
        for &j in c1 {
            out.set(i, j, u.get(i, j) * z.conj());
        }
    }
    if !out.is_complex_hadamard_float(tol) {
        return Err(Error::Condition("float rank-2 switch lost orthogonality".into()));
    }
    Ok(out)
}

/// Rank-2 layout for block position `m` of a literal generalized Hall
/// matrix: top row `i` is scaled by `ζ^{−im}` and leading column `j` by
/// `ζ^{jm}`; then `R` = block-`m` rows, `R_1` = top rows, `R_2` = other
/// block rows, and columns likewise with `s = −conj(λ_m)`.
#[derive(Clone, Debug)]
pub struct Rank2Layout {
    pub left: Monomial,
    pub right: Monomial,
    pub matrix: BHMatrix,
    pub form: Rank2Form,
}

pub fn genhall_rank2_layout(h: &BHMatrix, form: &GenHallForm, m: usize) -> Result<Rank2Layout> {
    let (k, order) = (form.k, h.n());
    if m >= k {
        return Err(Error::IndexOutOfRange { index: m, size: k });
    }
    let sl: Vec<u32> = (0..order).map(|i| if i < k { md(-((i * m) as i64), k) } else { 0 }).collect();
    let sr: Vec<u32> = (0..order).map(|j| if j < k { md(-((j * m) as i64), k) } else { 0 }).collect();
    let left = Monomial::new((0..order).collect(), sl, k)?;
    let right = Monomial::new((0..order).collect(), sr, k)?;
    let matrix = h.apply_monomial(&left, &right)?;
    let block = form.block_rows(m);
    let top: Vec<usize> = (0..k).collect();
    let others: Vec<usize> = (k..order).filter(|x| !block.contains(x)).collect();
    let parts = Rank2Parts { rows: [block.clone(), top.clone(), others.clone()], cols: [block, top, others] };
    let form = check_rank2_conditions(&matrix, &parts, Orientation::Column)?;
    Ok(Rank2Layout { left, right, matrix, form })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{fourier, kronecker};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn combinations_and_permutations() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(combinations(5, 3)[0], vec![0, 1, 2]);
        let mut p = vec![0, 1, 2];
        let mut count = 1;
        while next_permutation(&mut p) {
            count += 1;
        }
        assert_eq!(count, 6);
    }

    #[test]
    fn fourier_two_is_its_own_site() {
        let sites = find_fourier_sites(&fourier(2)).unwrap();
        assert_eq!(sites.len(), 1);
        assert_eq!(sites[0].m(), 1);
        sites[0].validate(&fourier(2)).unwrap();
    }

    #[test]
    fn sites_on_permuted_product() {
        let f3 = fourier(3);
        let h = kronecker(&f3, &f3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let l = Monomial::random(9, 3, &mut rng);
        let r = Monomial::random(9, 3, &mut rng);
        let p = h.apply_monomial(&l, &r).unwrap();
        let sites = find_fourier_sites(&p).unwrap();
        assert!(!sites.is_empty());
        for site in &sites {
            assert_eq!(site.m(), 3);
            site.validate(&p).unwrap();
            for c in 0..3 {
                assert!(fourier_set_switch(&p, site, 1, c).unwrap().is_butson_hadamard());
            }
        }
        assert_eq!(fourier_set_switch(&p, &sites[0], 2, 0).unwrap(), p);
    }

    #[test]
    fn search_cap() {
        assert!(matches!(find_fourier_sites(&fourier(7)), Err(Error::CapExceeded(_))));
        let big = kronecker(&fourier(5), &fourier(5));
        assert!(matches!(find_fourier_sites(&big), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn rank1_kron_partition() {
        let f2 = fourier(2);
        let h = kronecker(&f2, &f2);
        let (r1, cells) = kron_rank1_partition(&f2, &f2);
        assert_eq!(r1, vec![0, 1]);
        assert_eq!(cells, vec![vec![0, 2], vec![1, 3]]);
        assert!(check_rank1_conditions(&h, &r1, &cells));
        let one = BHMatrix::new(1, 2, vec![0]).unwrap();
        let (r1, cells) = kron_rank1_partition(&f2, &one);
        assert!(matches!(Rank1Site::new(&kronecker(&f2, &one), r1, cells), Err(Error::Degenerate(_))));
    }

    #[test]
    fn rank1_sites_switch() {
        let f3 = fourier(3);
        let h = kronecker(&f3, &f3);
        let sites = find_rank1_sites(&h, 3).unwrap();
        assert!(!sites.is_empty());
        for site in sites.iter().take(20) {
            for cell in 0..site.cells.len() {
                assert!(rank1_switch(&h, site, cell, 1).unwrap().is_butson_hadamard());
            }
        }
    }

    #[test]
    fn rank2_errors_on_fourier() {
        let h = fourier(4);
        let parts = Rank2Parts { rows: [vec![1], vec![2], vec![0, 3]], cols: [vec![1], vec![2], vec![0, 3]] };
        let err = check_rank2_conditions(&h, &parts, Orientation::Column).unwrap_err();
        assert!(err.to_string().contains("condition 3"), "{err}");
    }

    fn bh12_3() -> BHMatrix {
        include_str!("../data/bh12_3.txt").parse().unwrap()
    }

    fn bh12_4() -> BHMatrix {
        include_str!("../data/bh12_4.txt").parse().unwrap()
    }

    fn cyc(k: usize, c: &[i64]) -> Cyc {
        Cyc::from_counts(k, c)
    }

    #[test]
    fn genhall_values_order_12_3() {
        let h = bh12_3();
        let form = check_genhall_form(&h, 3).unwrap();
        assert_eq!(form.s, vec![0, 1, 0]);
        let l0 = cyc(3, &[2, 1, 0]);
        assert_eq!(form.lambdas[0], l0);
        let zeta = Cyc::root(3, 1);
        let expected = [cyc(3, &[0, 2, 1]), -&(&zeta * &l0.conj()), -&l0.conj()];
        for (m, want) in expected.iter().enumerate() {
            let (rs, cs) = form.block_sums(m, m);
            assert!(rs.iter().chain(&cs).all(|x| x == want), "block {m}");
        }
        for m in 0..3 {
            for c in 1..3 {
                let g = genhall_switch(&h, &form, m, c).unwrap();
                assert!(g.is_butson_hadamard());
                assert_eq!(form.plan(m, c).unwrap().rank(), 2);
            }
        }
    }

    #[test]
    fn genhall_values_order_12_4() {
        let h = bh12_4();
        let form = check_genhall_form(&h, 4).unwrap();
        assert_eq!(form.s, vec![0, 1, 2, 1]);
        assert_eq!(form.lambdas[0], cyc(4, &[0, 2, 0, 0]));
        assert!(form.blocks[0][0].exps().iter().all(|&e| e == 1));
        for m in 0..4 {
            for c in 1..4 {
                assert!(genhall_switch(&h, &form, m, c).unwrap().is_butson_hadamard());
            }
        }
    }

    #[test]
    fn genhall_rejects_fourier() {
        let h = kronecker(&fourier(3), &fourier(3)).lift(1);
        let h = BHMatrix::from_fn(12, 3, |i, j| if i < 9 && j < 9 { h.get(i, j) as i64 } else { 0 });
        assert!(check_genhall_form(&h, 3).is_err());
        assert!(matches!(check_genhall_form(&fourier(4), 2), Err(Error::OrderMismatch(2, 4))));
    }

    #[test]
    fn rank2_layout_both_orientations() {
        for h in [bh12_3(), bh12_4()] {
            let form = check_genhall_form(&h, h.k()).unwrap();
            for m in 0..h.k() {
                let lay = genhall_rank2_layout(&h, &form, m).unwrap();
                assert_eq!(lay.form.s, -&form.lambdas[m].conj());
                let row = check_rank2_conditions(&lay.matrix, &lay.form.parts, Orientation::Row).unwrap();
                let t = check_rank2_conditions(&lay.matrix.transpose(), &lay.form.parts.transposed(), Orientation::Row);
                assert!(t.is_ok());
                for z in 0..h.k() as u32 {
                    let g = rank2_switch(&lay.matrix, &lay.form, z).unwrap();
                    assert!(g.is_butson_hadamard());
                    assert!(rank2_switch(&lay.matrix, &row, z).unwrap().is_butson_hadamard());
                }
                assert_eq!(rank2_switch(&lay.matrix, &lay.form, 0).unwrap(), lay.matrix);
                let z = Complex64::from_polar(1.0, std::f64::consts::PI / 7.0);
                let u = rank2_switch_float(&lay.matrix.to_umatrix(), &lay.form, z, 1e-9).unwrap();
                assert!(u.is_complex_hadamard_float(1e-9));
            }
        }
    }

    #[test]
    fn layouts_recovered_after_scrambling() {
        let h = bh12_3();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let l = Monomial::random(12, 3, &mut rng);
        let r = Monomial::random(12, 3, &mut rng);
        let p = h.apply_monomial(&l, &r).unwrap();
        let found = find_genhall_layouts(&p, 1).unwrap();
        assert_eq!(found.len(), 1);
        let lay = &found[0];
        assert_eq!(p.apply_monomial(&lay.left, &lay.right).unwrap(), lay.matrix);
        assert_eq!(find_genhall_layouts(&h, 3).unwrap().len(), 1);
    }

    #[test]
    fn fourier_sites_zero_sum_below() {
        let f3 = fourier(3);
        let h = kronecker(&f3, &f3);
        for site in find_fourier_sites(&h).unwrap() {
            let (l, r) = &site.normalizer;
            let kk = h.apply_monomial(l, r).unwrap();
            for i in 3..9 {
                for b in 0..3 {
                    let mut counts = vec![0i64; 3];
                    for j in b * 3..b * 3 + 3 {
                        counts[kk.get(i, j) as usize] += 1;
                    }
                    assert!(crate::cyclo::counts_vanish(3, &counts));
                }
            }
            let cells = site.col_blocks.clone();
            assert!(check_rank1_conditions(&h, &site.row_set, &cells));
        }
        let f4 = fourier(4);
        assert!(!check_rank1_conditions(&f4, &[0, 1], &[vec![0, 1], vec![2, 3]]));
    }
}
