//! Butson matrices in exponent form, general unimodular matrices, and the
//! monomial action `H ↦ M H N*`.
//!
//! Text format for Butson matrices:
//!
//! ```text
//! # optional comment lines
//! BH <n> <k>
//! e00 e01 ... e0(n-1)
//! ...
//! ```
//!
//! Entry `(i, j)` stands for `ζ_k^{e_ij}`. Unimodular matrices use a `UM <n>`
//! header followed by `n` lines of `2n` reals (real and imaginary parts).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;

use crate::cyclo::{counts_vanish, Cyc};
use crate::error::{Error, Result};

/// Which family of vectors an inner product is taken over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    Rows,
    Cols,
}

/// An `n × n` matrix with entries in `⟨ζ_k⟩`, stored as exponents mod `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BHMatrix {
    n: usize,
    k: usize,
    exps: Vec<u32>,
}

impl BHMatrix {
    /// Row-major exponents; every entry must lie in `[0, k)`.
    pub fn new(n: usize, k: usize, exps: Vec<u32>) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::Invalid(format!("order and root order must be positive (n={n}, k={k})")));
        }
        if exps.len() != n * n {
            return Err(Error::Dimension(format!("expected {} entries, got {}", n * n, exps.len())));
        }
        if let Some(bad) = exps.iter().find(|&&e| e as usize >= k) {
            return Err(Error::Invalid(format!("exponent {bad} not in [0, {k})")));
        }
        Ok(BHMatrix { n, k, exps })
    }

    pub fn from_rows(k: usize, rows: &[Vec<u32>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(n, k, rows.concat())
    }

    /// Builds a matrix from any exponent function, reducing mod `k`.
    pub fn from_fn(n: usize, k: usize, f: impl Fn(usize, usize) -> i64) -> Self {
        assert!(n > 0 && k > 0);
        let kk = k as i64;
        let exps = (0..n * n).map(|p| f(p / n, p % n).rem_euclid(kk) as u32).collect();
        BHMatrix { n, k, exps }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.exps[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, e: u32) {
        debug_assert!((e as usize) < self.k);
        self.exps[i * self.n + j] = e;
    }

    /// Multiplies entry `(i, j)` by `ζ^e`.
    #[inline]
    pub fn shift(&mut self, i: usize, j: usize, e: i64) {
        let k = self.k as i64;
        let cur = self.exps[i * self.n + j] as i64;
        self.exps[i * self.n + j] = (cur + e).rem_euclid(k) as u32;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.exps[i * self.n..(i + 1) * self.n]
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.exps.chunks(self.n)
    }

    pub fn transpose(&self) -> BHMatrix {
        BHMatrix::from_fn(self.n, self.k, |i, j| self.get(j, i) as i64)
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> BHMatrix {
        BHMatrix::from_fn(self.n, self.k, |i, j| -(self.get(i, j) as i64))
    }

    /// Counting vector of exponent differences between two rows (or columns):
    /// `counts[d] = #{t : e_it − e_jt ≡ d (mod k)}`.
    pub fn inner_product_counts(&self, axis: Axis, i: usize, j: usize) -> Vec<i64> {
        let (n, k) = (self.n, self.k);
        let mut counts = vec![0i64; k];
        for t in 0..n {
            let (a, b) = match axis {
                Axis::Rows => (self.get(i, t), self.get(j, t)),
                Axis::Cols => (self.get(t, i), self.get(t, j)),
            };
            counts[(a as usize + k - b as usize) % k] += 1;
        }
        counts
    }

    /// `Σ_t ζ^{e_it − e_jt}` for rows, or the column analogue.
    pub fn inner_product(&self, axis: Axis, i: usize, j: usize) -> Result<Cyc> {
        for idx in [i, j] {
            if idx >= self.n {
                return Err(Error::IndexOutOfRange { index: idx, size: self.n });
            }
        }
        Ok(Cyc::from_counts(self.k, &self.inner_product_counts(axis, i, j)))
    }

    /// First pair of non-orthogonal rows (or columns), if any.
    pub fn first_violation(&self, axis: Axis) -> Option<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| (i + 1..self.n).map(move |j| (i, j)))
            .find(|&(i, j)| !counts_vanish(self.k, &self.inner_product_counts(axis, i, j)))
    }

    /// Exact test of `H H* = n I`.
    pub fn is_butson_hadamard(&self) -> bool {
        self.first_violation(Axis::Rows).is_none()
    }

    pub fn is_butson_hadamard_cols(&self) -> bool {
        self.first_violation(Axis::Cols).is_none()
    }

    pub fn ensure_hadamard(&self) -> Result<()> {
        match self.first_violation(Axis::Rows) {
            None => Ok(()),
            Some((i, j)) => Err(Error::NotHadamard(i, j)),
        }
    }

    /// `M H N*` with `M`, `N` monomial over `⟨ζ_k⟩`.
    ///
    /// With `M[i][p(i)] = ζ^{a_i}` and `N[j][q(j)] = ζ^{b_j}` the result is
    /// `K[i][j] = H[p(i)][q(j)] · ζ^{a_i − b_j}`.
    pub fn apply_monomial(&self, left: &Monomial, right: &Monomial) -> Result<BHMatrix> {
        for m in [left, right] {
            if m.len() != self.n {
                return Err(Error::Dimension(format!("monomial of size {} on order {}", m.len(), self.n)));
            }
        }
        Ok(BHMatrix::from_fn(self.n, self.k, |i, j| {
            self.get(left.perm[i], right.perm[j]) as i64 + left.scales[i] as i64 - right.scales[j] as i64
        }))
    }

    pub fn to_umatrix(&self) -> UMatrix {
        let k = self.k as f64;
        let entries = self
            .exps
            .iter()
            .map(|&e| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * e as f64 / k))
            .collect();
        UMatrix { n: self.n, entries }
    }

    /// Same matrix read over `⟨ζ_{k·factor}⟩`.
    pub fn lift(&self, factor: usize) -> BHMatrix {
        assert!(factor > 0);
        BHMatrix {
            n: self.n,
            k: self.k * factor,
            exps: self.exps.iter().map(|&e| e * factor as u32).collect(),
        }
    }

    pub fn emit(&self) -> String {
        self.to_string()
    }

    pub fn parse(text: &str) -> Result<Self> {
        text.parse()
    }
}

impl fmt::Display for BHMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BH {} {}", self.n, self.k)?;
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(|e| e.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Non-comment, non-blank lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.parse().map_err(|_| Error::Parse { line, msg: format!("expected integer, found `{tok}`") })
}

impl FromStr for BHMatrix {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (hl, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
        let toks: Vec<&str> = header.split_whitespace().collect();
        if toks.len() != 3 || toks[0] != "BH" {
            return Err(Error::Parse { line: hl, msg: format!("bad header `{header}`, expected `BH <n> <k>`") });
        }
        let n = parse_usize(toks[1], hl)?;
        let k = parse_usize(toks[2], hl)?;
        if n == 0 || k == 0 {
            return Err(Error::Parse { line: hl, msg: "order and root order must be positive".into() });
        }
        let mut exps = Vec::with_capacity(n * n);
        let mut rows = 0;
        for (ln, line) in lines {
            if rows == n {
                return Err(Error::Parse { line: ln, msg: format!("more than {n} rows") });
            }
            let row: Vec<&str> = line.split_whitespace().collect();
            if row.len() != n {
                return Err(Error::Parse { line: ln, msg: format!("row has {} entries, expected {n}", row.len()) });
            }
            for tok in row {
                let e = parse_usize(tok, ln)?;
                if e >= k {
                    return Err(Error::Parse { line: ln, msg: format!("exponent {e} not in [0, {k})") });
                }
                exps.push(e as u32);
            }
            rows += 1;
        }
        if rows != n {
            return Err(Error::Parse { line: hl, msg: format!("expected {n} rows, found {rows}") });
        }
        BHMatrix::new(n, k, exps)
    }
}

/// A monomial matrix over `⟨ζ_k⟩`: row `i` has its single nonzero entry
/// `ζ^{scales[i]}` in column `perm[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial {
    perm: Vec<usize>,
    scales: Vec<u32>,
    k: usize,
}

impl Monomial {
    pub fn new(perm: Vec<usize>, scales: Vec<u32>, k: usize) -> Result<Self> {
        let n = perm.len();
        if scales.len() != n {
            return Err(Error::Dimension("permutation and scale lengths differ".into()));
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::Invalid("monomial permutation is not a bijection".into()));
            }
        }
        if k == 0 || scales.iter().any(|&s| s as usize >= k) {
            return Err(Error::Invalid(format!("scales must lie in [0, {k})")));
        }
        Ok(Monomial { perm, scales, k })
    }

    pub fn identity(n: usize, k: usize) -> Self {
        Monomial { perm: (0..n).collect(), scales: vec![0; n], k }
    }

    pub fn permutation(perm: Vec<usize>, k: usize) -> Result<Self> {
        let n = perm.len();
        Self::new(perm, vec![0; n], k)
    }

    pub fn random<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Self {
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let scales = (0..n).map(|_| rng.gen_range(0..k as u32)).collect();
        Monomial { perm, scales, k }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn scales(&self) -> &[u32] {
        &self.scales
    }

    /// The single monomial acting as `self` followed by `then` (on the
    /// same side).
    pub fn compose(&self, then: &Monomial) -> Result<Monomial> {
        if self.len() != then.len() {
            return Err(Error::Dimension(format!("monomials of sizes {} and {}", self.len(), then.len())));
        }
        if self.k != then.k {
            return Err(Error::OrderMismatch(self.k, then.k));
        }
        let perm = then.perm.iter().map(|&p| self.perm[p]).collect();
        let scales = then
            .perm
            .iter()
            .zip(&then.scales)
            .map(|(&p, &s)| ((self.scales[p] + s) as usize % self.k) as u32)
            .collect();
        Ok(Monomial { perm, scales, k: self.k })
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: Vec<String>| v.join(",");
        write!(
            f,
            "{}:{}",
            join(self.perm.iter().map(|p| p.to_string()).collect()),
            join(self.scales.iter().map(|s| s.to_string()).collect())
        )
    }
}

/// An `n × n` matrix with unit-modulus complex entries.
#[derive(Clone, Debug, PartialEq)]
pub struct UMatrix {
    n: usize,
    entries: Vec<Complex64>,
}

impl UMatrix {
    pub const MODULUS_TOL: f64 = 1e-12;

    pub fn new(n: usize, entries: Vec<Complex64>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::Dimension(format!("expected {} entries for order {n}", n * n)));
        }
        if let Some(z) = entries.iter().find(|z| (z.norm() - 1.0).abs() > Self::MODULUS_TOL) {
            return Err(Error::Invalid(format!("entry {z} is not unimodular")));
        }
        Ok(UMatrix { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.entries[i * self.n + j] = z;
    }

    /// Every off-diagonal row inner product has modulus below `tol · n`.
    pub fn is_complex_hadamard_float(&self, tol: f64) -> bool {
        assert!(tol > 0.0, "tolerance must be positive");
        let n = self.n;
        let bound = tol * n as f64;
        (0..n).all(|i| {
            (i + 1..n).all(|j| {
                let ip: Complex64 = (0..n).map(|t| self.get(i, t) * self.get(j, t).conj()).sum();
                ip.norm() < bound
            })
        })
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let entries = (0..n * n)
            .map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)))
            .collect();
        UMatrix { n, entries }
    }
}

impl fmt::Display for UMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "UM {}", self.n)?;
        for i in 0..self.n {
            let line: Vec<String> = (0..self.n)
                .map(|j| {
                    let z = self.get(i, j);
                    format!("{:.17e} {:.17e}", z.re, z.im)
                })
                .collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for UMatrix {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (hl, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
        let toks: Vec<&str> = header.split_whitespace().collect();
        if toks.len() != 2 || toks[0] != "UM" {
            return Err(Error::Parse { line: hl, msg: format!("bad header `{header}`, expected `UM <n>`") });
        }
        let n = parse_usize(toks[1], hl)?;
        let mut entries = Vec::with_capacity(n * n);
        let mut rows = 0;
        for (ln, line) in lines {
            let vals = line
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| Error::Parse { line: ln, msg: format!("bad real `{t}`") }))
                .collect::<Result<Vec<f64>>>()?;
            if vals.len() != 2 * n {
                return Err(Error::Parse { line: ln, msg: format!("expected {} reals, found {}", 2 * n, vals.len()) });
            }
            entries.extend(vals.chunks(2).map(|p| Complex64::new(p[0], p[1])));
            rows += 1;
        }
        if rows != n {
            return Err(Error::Parse { line: hl, msg: format!("expected {n} rows, found {rows}") });
        }
        UMatrix::new(n, entries)
    }
}
