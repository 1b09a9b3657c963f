//! Trades: sets of entries that can be replaced while the matrix stays
//! Hadamard. Exhaustive minimum-size search over the Butson alphabet and
//! the sparse column combination a trade induces.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bmatrix::{BHMatrix, Monomial, UMatrix};
use crate::cyclo::{counts_vanish, Cyc};
use crate::error::{Error, Result};
use crate::sites::combinations;

/// Replacement entries keyed by `(row, col)`: exponents (`u32`) or unit
/// complex numbers (`Complex64`).
#[derive(Clone, Debug, PartialEq)]
pub struct Trade<V = u32> {
    cells: BTreeMap<(usize, usize), V>,
}

impl<V: Copy> Trade<V> {
    pub fn new(cells: impl IntoIterator<Item = ((usize, usize), V)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (pos, v) in cells {
            if map.insert(pos, v).is_some() {
                return Err(Error::Invalid(format!("cell {pos:?} listed twice")));
            }
        }
        if map.is_empty() {
            return Err(Error::Invalid("a trade needs at least one cell".into()));
        }
        Ok(Trade { cells: map })
    }

    pub fn size(&self) -> usize {
        self.cells.len()
    }

    pub fn cells(&self) -> impl Iterator<Item = ((usize, usize), V)> + '_ {
        self.cells.iter().map(|(&p, &v)| (p, v))
    }

    /// Number of cells in each affected row.
    pub fn row_counts(&self) -> BTreeMap<usize, usize> {
        let mut counts = BTreeMap::new();
        for &(r, _) in self.cells.keys() {
            *counts.entry(r).or_insert(0) += 1;
        }
        counts
    }

    /// Minimum number of cells over the affected rows.
    pub fn b(&self) -> usize {
        self.row_counts().into_values().min().expect("trades are non-empty")
    }

    fn check_range(&self, n: usize) -> Result<()> {
        match self.cells.keys().find(|&&(r, c)| r >= n || c >= n) {
            Some(&(r, c)) => Err(Error::IndexOutOfRange { index: r.max(c), size: n }),
            None => Ok(()),
        }
    }
}

impl Trade<u32> {
    /// Cells where `a` and `b` differ, with the entries of `b`.
    pub fn from_diff(a: &BHMatrix, b: &BHMatrix) -> Result<Self> {
        if a.n() != b.n() {
            return Err(Error::Dimension(format!("orders {} and {}", a.n(), b.n())));
        }
        if a.k() != b.k() {
            return Err(Error::OrderMismatch(a.k(), b.k()));
        }
        let n = a.n();
        Trade::new(
            (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .filter(|&(i, j)| a.get(i, j) != b.get(i, j))
                .map(|(i, j)| ((i, j), b.get(i, j))),
        )
    }

    /// The same trade read on `apply_monomial(H, left, right)`.
    pub fn transport(&self, left: &Monomial, right: &Monomial) -> Result<Self> {
        let k = left.k();
        let inverse = |p: &[usize]| {
            let mut inv = vec![0; p.len()];
            for (i, &x) in p.iter().enumerate() {
                inv[x] = i;
            }
            inv
        };
        let (il, ir) = (inverse(left.perm()), inverse(right.perm()));
        Trade::new(self.cells().map(|((r, c), v)| {
            let (i, j) = (il[r], ir[c]);
            let e = (v as usize + left.scales()[i] as usize + k - right.scales()[j] as usize) % k;
            ((i, j), e as u32)
        }))
    }
}

/// Replaces the trade's cells; errors unless the result is Hadamard.
pub fn apply_trade(h: &BHMatrix, t: &Trade) -> Result<BHMatrix> {
    t.check_range(h.n())?;
    if t.cells().all(|((r, c), v)| h.get(r, c) == v % h.k() as u32) {
        return Err(Error::Invalid("trade changes no entry".into()));
    }
    let mut out = h.clone();
    for ((r, c), v) in t.cells() {
        out.set(r, c, v % h.k() as u32);
    }
    out.ensure_hadamard()?;
    Ok(out)
}

pub fn apply_float_trade(u: &UMatrix, t: &Trade<Complex64>, tol: f64) -> Result<UMatrix> {
    t.check_range(u.n())?;
    let mut out = u.clone();
    for ((r, c), z) in t.cells() {
        if (z.norm() - 1.0).abs() > UMatrix::MODULUS_TOL {
            return Err(Error::Invalid(format!("replacement {z} is not unimodular")));
        }
        out.set(r, c, z);
    }
    if !out.is_complex_hadamard_float(tol) {
        return Err(Error::Condition("replaced matrix is not Hadamard".into()));
    }
    Ok(out)
}

pub const MAX_TRADE_ORDER: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub enum TradeSearch {
    /// A trade of minimum size.
    Found(Trade),
    /// No trade of size at most the bound exists.
    NoneUpTo(usize),
}

/// Smallest Butson-alphabet trade of size at most `bound`.
///
/// Iterative deepening on the size. Each level is a row-by-row search in
/// index order: a row is either kept or replaced on a chosen support, and
/// every decided row must stay orthogonal to the rows decided before it.
/// A replaced row with `c` changed cells forces at least `⌈n/c⌉` affected
/// rows, which prunes the remaining size. `budget` caps the number of row
/// candidates tried over the whole search.
pub fn min_trade_size(h: &BHMatrix, bound: usize, budget: u64) -> Result<TradeSearch> {
    if h.n() > MAX_TRADE_ORDER {
        return Err(Error::CapExceeded(format!("trade search supports orders up to {MAX_TRADE_ORDER}")));
    }
    h.ensure_hadamard()?;
    let nodes = AtomicU64::new(0);
    for size in 1..=bound.min(h.n() * h.n()) {
        let search = Search { h, max_size: size, budget, nodes: &nodes, exhausted: AtomicBool::new(false) };
        let found = search.run();
        if search.exhausted.load(Ordering::Relaxed) {
            return Err(Error::BudgetExhausted(budget));
        }
        if let Some(rows) = found {
            let cells = rows.into_iter().enumerate().flat_map(|(i, row)| {
                let orig = h.row(i).to_vec();
                row.into_iter().flatten().enumerate().filter(move |&(j, e)| orig[j] != e).map(move |(j, e)| ((i, j), e))
            });
            return Ok(TradeSearch::Found(Trade::new(cells)?));
        }
    }
    Ok(TradeSearch::NoneUpTo(bound))
}

struct Search<'a> {
    h: &'a BHMatrix,
    max_size: usize,
    budget: u64,
    nodes: &'a AtomicU64,
    exhausted: AtomicBool,
}

/// `None` marks an unchanged row.
type Rows = Vec<Option<Vec<u32>>>;

struct State {
    rows: Rows,
    size: usize,
    affected: usize,
    /// Largest `⌈n/c⌉` over replaced rows.
    need: usize,
}

impl Search<'_> {
    fn run(&self) -> Option<Rows> {
        let choices: Vec<_> = std::iter::once(None).chain(self.candidates(0, self.max_size).map(Some)).collect();
        choices.into_par_iter().find_map_first(|choice| {
            let mut st = State { rows: Vec::new(), size: 0, affected: 0, need: 0 };
            self.push(&mut st, choice);
            self.dfs(&mut st)
        })
    }

    /// Replacement rows for row `i` changing between 1 and `max_cells` cells.
    fn candidates(&self, i: usize, max_cells: usize) -> impl Iterator<Item = (Vec<u32>, usize)> + '_ {
        let (n, k) = (self.h.n(), self.h.k());
        let base = self.h.row(i);
        (1..=max_cells.min(n)).flat_map(move |c| {
            combinations(n, c).into_iter().flat_map(move |support| {
                (0..(k - 1).pow(c as u32)).map(move |code| {
                    let mut row = base.to_vec();
                    let mut x = code;
                    for &j in &support {
                        row[j] = ((base[j] as usize + 1 + x % (k - 1)) % k) as u32;
                        x /= k - 1;
                    }
                    (row, c)
                })
            })
        })
    }

    fn tick(&self) -> bool {
        if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.budget {
            self.exhausted.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }

    fn row_of<'s>(&'s self, st: &'s State, i: usize) -> &'s [u32] {
        st.rows[i].as_deref().unwrap_or_else(|| self.h.row(i))
    }

    /// Appends a decision for the next row if it stays orthogonal to the
    /// rows already decided.
    fn push(&self, st: &mut State, choice: Option<(Vec<u32>, usize)>) -> bool {
        let (n, k) = (self.h.n(), self.h.k());
        let i = st.rows.len();
        let Some((row, c)) = choice else {
            st.rows.push(None);
            return true;
        };
        let orthogonal = (0..i).all(|j| {
            let other = self.row_of(st, j);
            let mut counts = vec![0i64; k];
            for (a, b) in row.iter().zip(other) {
                counts[(*a as usize + k - *b as usize) % k] += 1;
            }
            counts_vanish(k, &counts)
        });
        if !orthogonal {
            return false;
        }
        st.rows.push(Some(row));
        st.size += c;
        st.affected += 1;
        st.need = st.need.max(n.div_ceil(c));
        true
    }

    fn pop(&self, st: &mut State, c: usize) {
        if st.rows.pop().flatten().is_some() {
            st.size -= c;
            st.affected -= 1;
        }
    }

    fn dfs(&self, st: &mut State) -> Option<Rows> {
        if self.exhausted.load(Ordering::Relaxed) {
            return None;
        }
        let n = self.h.n();
        let i = st.rows.len();
        let missing = st.need.saturating_sub(st.affected);
        if st.size + missing > self.max_size || missing > n - i {
            return None;
        }
        if i == n {
            return (st.affected > 0).then(|| st.rows.clone());
        }
        if self.kept_row_ok(st, i) {
            st.rows.push(None);
            if let Some(found) = self.dfs(st) {
                return Some(found);
            }
            st.rows.pop();
        }
        for (row, c) in self.candidates(i, self.max_size - st.size) {
            if !self.tick() {
                return None;
            }
            let saved = st.need;
            if self.push(st, Some((row, c))) {
                if let Some(found) = self.dfs(st) {
                    return Some(found);
                }
                self.pop(st, c);
                st.need = saved;
            }
        }
        None
    }

    /// A kept row only needs checking against replaced rows.
    fn kept_row_ok(&self, st: &State, i: usize) -> bool {
        let k = self.h.k();
        let row = self.h.row(i);
        (0..i).filter(|&j| st.rows[j].is_some()).all(|j| {
            let other = self.row_of(st, j);
            let mut counts = vec![0i64; k];
            for (a, b) in row.iter().zip(other) {
                counts[(*a as usize + k - *b as usize) % k] += 1;
            }
            counts_vanish(k, &counts)
        })
    }
}

/// Rows where `Σ coeffs[t]·H[·][cols[t]]` is nonzero, computed exactly.
pub fn lincomb_nonzero_count(h: &BHMatrix, cols: &[usize], coeffs: &[Cyc]) -> Result<usize> {
    if cols.len() != coeffs.len() {
        return Err(Error::Dimension(format!("{} columns, {} coefficients", cols.len(), coeffs.len())));
    }
    if let Some(&c) = cols.iter().find(|&&c| c >= h.n()) {
        return Err(Error::IndexOutOfRange { index: c, size: h.n() });
    }
    if coeffs.iter().all(Cyc::is_zero) {
        return Err(Error::Invalid("all coefficients are zero".into()));
    }
    let k = h.k();
    let lifted: Vec<Cyc> = coeffs
        .iter()
        .map(|a| lift_to(a, k))
        .collect::<Result<_>>()?;
    Ok((0..h.n())
        .filter(|&r| {
            let mut acc = Cyc::zero(k);
            for (a, &c) in lifted.iter().zip(cols) {
                acc = &acc + &a.mul_root(h.get(r, c) as i64);
            }
            !acc.is_zero()
        })
        .count())
}

fn lift_to(a: &Cyc, k: usize) -> Result<Cyc> {
    if a.k() == k {
        return Ok(a.clone());
    }
    if k % a.k() != 0 {
        return Err(Error::OrderMismatch(a.k(), k));
    }
    let f = k / a.k();
    let mut coeffs = vec![num_bigint::BigInt::from(0); k];
    for (e, x) in a.coeffs().iter().enumerate() {
        coeffs[e * f] = x.clone();
    }
    Cyc::new(k, coeffs)
}

/// The column combination a trade forces to vanish on unaffected rows.
#[derive(Clone, Debug)]
pub struct SparseCombination {
    pub row: usize,
    pub cols: Vec<usize>,
    pub coeffs: Vec<Cyc>,
    pub zero_count: usize,
    /// Guaranteed zeros: the rows the trade leaves alone.
    pub unaffected: usize,
    /// `n − ⌊(n−1)/b⌋`.
    pub stated_bound: usize,
}

impl SparseCombination {
    pub fn meets_stated_bound(&self) -> bool {
        self.zero_count >= self.stated_bound
    }
}

/// Picks the first row meeting the trade in `b` cells and combines those
/// columns with coefficients `conj(r_i) − conj(r'_i)`.
pub fn sparse_combination_from_trade(h: &BHMatrix, t: &Trade) -> Result<SparseCombination> {
    apply_trade(h, t)?;
    let (n, k) = (h.n(), h.k());
    let b = t.b();
    if b == 1 {
        return Err(Error::Degenerate("a trade with a single cell in some row gives a degenerate switch".into()));
    }
    let counts = t.row_counts();
    let row = *counts.iter().find(|(_, &c)| c == b).expect("b is attained").0;
    let (cols, coeffs): (Vec<usize>, Vec<Cyc>) = t
        .cells()
        .filter(|&((r, _), _)| r == row)
        .map(|((_, c), v)| {
            let old = Cyc::root(k, -(h.get(row, c) as i64));
            let new = Cyc::root(k, -(v as i64));
            (c, &old - &new)
        })
        .unzip();
    let nonzero = lincomb_nonzero_count(h, &cols, &coeffs)?;
    let unaffected = n - counts.len();
    let zero_count = n - nonzero;
    if zero_count < unaffected {
        return Err(Error::Condition(format!(
            "combination has {zero_count} zeros but the trade leaves {unaffected} rows alone"
        )));
    }
    Ok(SparseCombination { row, cols, coeffs, zero_count, unaffected, stated_bound: n - (n - 1) / b })
}

/// Trade between `F_p` and its image under `ζ ↦ ζ^a`.
pub fn galois_trade(p: usize, a: usize) -> Result<Trade> {
    if a % p == 0 {
        return Err(Error::Invalid(format!("{a} is not a unit mod {p}")));
    }
    let f = crate::construct::fourier(p);
    let g = BHMatrix::from_fn(p, p, |i, j| (a * i * j) as i64);
    g.ensure_hadamard()?;
    Trade::from_diff(&f, &g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{bush_type, fourier, kronecker};
    use crate::sites::{check_genhall_form, genhall_switch};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn minimum_sizes_at_small_orders() {
        let f2 = fourier(2);
        for (h, n) in [(f2.clone(), 2), (fourier(3), 3), (kronecker(&f2, &f2), 4)] {
            match min_trade_size(&h, n, 10_000_000).unwrap() {
                TradeSearch::Found(t) => {
                    assert_eq!(t.size(), n);
                    apply_trade(&h, &t).unwrap();
                }
                other => panic!("{other:?}"),
            }
            assert_eq!(min_trade_size(&h, n - 1, 10_000_000).unwrap(), TradeSearch::NoneUpTo(n - 1));
        }
    }

    #[test]
    fn budget_is_reported() {
        let f2 = fourier(2);
        let h = kronecker(&f2, &f2);
        assert!(matches!(min_trade_size(&h, 4, 3), Err(Error::BudgetExhausted(3))));
    }

    #[test]
    fn single_cell_fails() {
        let t = Trade::new([((0, 0), 1)]).unwrap();
        assert!(matches!(apply_trade(&fourier(3), &t), Err(Error::NotHadamard(..))));
        let t = Trade::new([((0, 0), 0)]).unwrap();
        assert!(apply_trade(&fourier(3), &t).is_err());
    }

    #[test]
    fn bush_switch_trade() {
        let h = bush_type(&fourier(3)).unwrap();
        let mut g = h.clone();
        for i in 0..3 {
            for j in 0..3 {
                g.shift(i, j, 1);
            }
        }
        let t = Trade::from_diff(&h, &g).unwrap();
        assert_eq!(t.b(), 3);
        assert_eq!(apply_trade(&h, &t).unwrap(), g);
        let s = sparse_combination_from_trade(&h, &t).unwrap();
        // Three nonzeros are forced, so six zeros is the most possible.
        assert_eq!(s.zero_count, 6);
        assert_eq!(s.stated_bound, 7);
        assert!(!s.meets_stated_bound());
        assert_eq!(lincomb_nonzero_count(&h, &s.cols, &s.coeffs).unwrap(), 9 - s.zero_count);
    }

    #[test]
    fn genhall_trade_of_sixteen() {
        let h: BHMatrix = include_str!("../data/bh12_4.txt").parse().unwrap();
        let form = check_genhall_form(&h, 4).unwrap();
        let g = genhall_switch(&h, &form, 0, 1).unwrap();
        let t = Trade::from_diff(&h, &g).unwrap();
        assert_eq!(t.size(), 16);
        assert_eq!(t.b(), 2);
        let s = sparse_combination_from_trade(&h, &t).unwrap();
        assert_eq!(s.stated_bound, 7);
        assert!(s.zero_count >= s.unaffected);
    }

    #[test]
    fn transported_trade_stays_valid() {
        let h = bush_type(&fourier(3)).unwrap();
        let mut g = h.clone();
        for i in 0..3 {
            for j in 3..6 {
                g.shift(i, j, 2);
            }
        }
        let t = Trade::from_diff(&h, &g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let l = Monomial::random(9, 3, &mut rng);
        let r = Monomial::random(9, 3, &mut rng);
        let hs = h.apply_monomial(&l, &r).unwrap();
        let ts = t.transport(&l, &r).unwrap();
        assert_eq!(apply_trade(&hs, &ts).unwrap(), g.apply_monomial(&l, &r).unwrap());
    }

    #[test]
    fn lincomb_examples() {
        let f4 = fourier(4);
        assert_eq!(lincomb_nonzero_count(&f4, &[2], &[Cyc::one(4)]).unwrap(), 4);
        let c = [Cyc::one(4), -&Cyc::one(4)];
        assert!(lincomb_nonzero_count(&f4, &[0, 1], &c).unwrap() >= 2);
        assert!(lincomb_nonzero_count(&f4, &[0], &[Cyc::zero(4)]).is_err());
        let half = [Cyc::one(2), Cyc::one(2)];
        assert_eq!(lincomb_nonzero_count(&f4, &[0, 2], &half).unwrap(), 2);
    }

    #[test]
    fn galois_trade_rows() {
        for (p, a) in [(3, 2), (5, 2), (5, 4), (7, 3)] {
            let t = galois_trade(p, a).unwrap();
            assert_eq!(t.size(), (p - 1) * (p - 1));
            assert_eq!(t.b(), p - 1);
        }
    }

    #[test]
    fn float_trade() {
        let u = fourier(2).to_umatrix();
        let t = Trade::new([((1, 0), Complex64::new(-1.0, 0.0)), ((1, 1), Complex64::new(1.0, 0.0))]).unwrap();
        assert!(apply_float_trade(&u, &t, 1e-9).is_ok());
        let bad = Trade::new([((1, 0), Complex64::new(-1.0, 0.0))]).unwrap();
        assert!(apply_float_trade(&u, &bad, 1e-9).is_err());
    }
}
