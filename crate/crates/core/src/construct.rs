//! Seed and form constructions. Every builder validates its output with the
//! exact checker before returning it.

use num_integer::Integer;

use crate::bmatrix::BHMatrix;
use crate::cyclo::Cyc;
use crate::error::{Error, Result};

/// `F_n` with exponents `i·j mod n`.
pub fn fourier(n: usize) -> BHMatrix {
    assert!(n > 0, "Fourier order must be positive");
    BHMatrix::from_fn(n, n, |i, j| (i * j) as i64)
}

/// `A ⊗ B`, both read over `⟨ζ_l⟩` with `l = lcm(A.k, B.k)`.
pub fn kronecker(a: &BHMatrix, b: &BHMatrix) -> BHMatrix {
    let l = a.k().lcm(&b.k());
    let (a, b) = (a.lift(l / a.k()), b.lift(l / b.k()));
    let bn = b.n();
    BHMatrix::from_fn(a.n() * bn, l, |i, j| a.get(i / bn, j / bn) as i64 + b.get(i % bn, j % bn) as i64)
}

/// Circulant Butson matrix of order `k` equivalent to `F_k`.
///
/// Odd `k` uses first-row exponents `j(j−1)/2`, `j = 1..k`; `k = 4` uses
/// `circ(1, i, −1, i)`.
pub fn circulant_bh(k: usize) -> Result<BHMatrix> {
    let first: Vec<i64> = if k % 2 == 1 {
        (0..k as i64).map(|t| t * (t + 1) / 2).collect()
    } else if k == 4 {
        vec![0, 1, 2, 1]
    } else {
        return Err(Error::Unsupported(format!("circulant BH({k},{k}) needs odd k or k = 4")));
    };
    let h = BHMatrix::from_fn(k, k, |i, j| first[(j + k - i) % k]);
    h.ensure_hadamard()?;
    Ok(h)
}

/// Bush-type matrix of order `n²` from a Hadamard `K` of order `n`.
///
/// `K` is first row-normalized by column scaling. With `r_j` its rows, block
/// `(a, b)` is `r_d^* r_d` for `d = (b − a) mod n`: all-ones on the
/// diagonal and zero-sum off it.
pub fn bush_type(k_mat: &BHMatrix) -> Result<BHMatrix> {
    k_mat.ensure_hadamard()?;
    let (n, k) = (k_mat.n(), k_mat.k());
    let r = BHMatrix::from_fn(n, k, |i, j| k_mat.get(i, j) as i64 - k_mat.get(0, j) as i64);
    let h = BHMatrix::from_fn(n * n, k, |i, j| {
        let (a, x) = (i / n, i % n);
        let (b, y) = (j / n, j % n);
        let d = (b + n - a) % n;
        r.get(d, y) as i64 - r.get(d, x) as i64
    });
    let report = weak_bush_blocks(&h, n)?;
    if let Some(blk) = report.blocks.iter().find(|b| !b.holds) {
        return Err(Error::BlockViolation(blk.row, blk.col));
    }
    h.ensure_hadamard()?;
    Ok(h)
}

/// Row and column sums of one `m × m` block.
#[derive(Clone, Debug)]
pub struct BlockSums {
    pub row: usize,
    pub col: usize,
    pub row_sums: Vec<Cyc>,
    pub col_sums: Vec<Cyc>,
    /// `J H_ij = H_ij J = δ_ij m J` for this block.
    pub holds: bool,
}

#[derive(Clone, Debug)]
pub struct WeakBushReport {
    pub m: usize,
    pub blocks: Vec<BlockSums>,
    pub weak_bush: bool,
}

/// Block sums of `H` cut into `m × m` blocks.
pub fn weak_bush_blocks(h: &BHMatrix, m: usize) -> Result<WeakBushReport> {
    if m == 0 || h.n() % m != 0 {
        return Err(Error::Invalid(format!("block size {m} does not divide order {}", h.n())));
    }
    let (nb, k) = (h.n() / m, h.k());
    let mut blocks = Vec::with_capacity(nb * nb);
    for p in 0..nb {
        for q in 0..nb {
            let sum = |cells: &mut dyn Iterator<Item = (usize, usize)>| {
                let mut counts = vec![0i64; k];
                for (i, j) in cells {
                    counts[h.get(i, j) as usize] += 1;
                }
                Cyc::from_counts(k, &counts)
            };
            let row_sums: Vec<Cyc> = (0..m)
                .map(|x| sum(&mut (0..m).map(|y| (p * m + x, q * m + y))))
                .collect();
            let col_sums: Vec<Cyc> = (0..m)
                .map(|y| sum(&mut (0..m).map(|x| (p * m + x, q * m + y))))
                .collect();
            let target = if p == q {
                let mut c = vec![0i64; k];
                c[0] = m as i64;
                Cyc::from_counts(k, &c)
            } else {
                Cyc::zero(k)
            };
            let holds = row_sums.iter().chain(&col_sums).all(|s| *s == target);
            blocks.push(BlockSums { row: p, col: q, row_sums, col_sums, holds });
        }
    }
    let weak_bush = blocks.iter().all(|b| b.holds);
    Ok(WeakBushReport { m, blocks, weak_bush })
}

/// Paley type I real Hadamard matrix of order `q + 1`, `q ≡ 3 (mod 4)`.
pub fn paley_seed(q: usize) -> Result<BHMatrix> {
    if q % 4 != 3 {
        return Err(Error::Invalid(format!("Paley I needs q ≡ 3 mod 4, got {q}")));
    }
    let field = Gf::new(q)?;
    let mut is_square = vec![false; q];
    for x in 1..q {
        is_square[field.mul(x, x)] = true;
    }
    // χ(a − b) ∈ {0, ±1} encoded as Some(exponent) for ±1.
    let chi = |a: usize, b: usize| -> Option<i64> {
        let d = field.sub(a, b);
        (d != 0).then(|| if is_square[d] { 0 } else { 1 })
    };
    let h = BHMatrix::from_fn(q + 1, 2, |i, j| match (i, j) {
        (0, _) => 0,
        (_, 0) => 1,
        _ if i == j => 0,
        _ => chi(i - 1, j - 1).expect("off-diagonal residue difference is nonzero"),
    });
    h.ensure_hadamard()?;
    Ok(h)
}

/// `GF(p^e)` with elements encoded as base-`p` digit strings of the
/// polynomial coefficients.
struct Gf {
    p: usize,
    e: usize,
    q: usize,
    modulus: Vec<usize>,
}

impl Gf {
    const MAX_ORDER: usize = 1024;

    fn new(q: usize) -> Result<Self> {
        if !(2..=Self::MAX_ORDER).contains(&q) {
            return Err(Error::Invalid(format!("field order {q} out of range 2..={}", Self::MAX_ORDER)));
        }
        let p = (2..=q).find(|d| q % d == 0).expect("q ≥ 2 has a prime factor");
        let (mut rest, mut e) = (q, 0);
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        if rest != 1 {
            return Err(Error::Invalid(format!("{q} is not a prime power")));
        }
        let mut field = Gf { p, e, q, modulus: vec![0; e + 1] };
        if e == 1 {
            field.modulus = vec![0, 1];
            return Ok(field);
        }
        for low in 0..q {
            let mut m = field.digits(low);
            m.push(1);
            field.modulus = m;
            let no_zero_divisors = (1..q).all(|x| (1..q).all(|y| field.mul(x, y) != 0));
            if no_zero_divisors {
                return Ok(field);
            }
        }
        unreachable!("an irreducible polynomial of every degree exists")
    }

    fn digits(&self, mut x: usize) -> Vec<usize> {
        let mut d = vec![0; self.e];
        for slot in d.iter_mut() {
            *slot = x % self.p;
            x /= self.p;
        }
        d
    }

    fn encode(&self, d: &[usize]) -> usize {
        d.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn sub(&self, a: usize, b: usize) -> usize {
        let (da, db) = (self.digits(a), self.digits(b));
        let d: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + self.p - y) % self.p).collect();
        self.encode(&d)
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        if self.e == 1 {
            return a * b % self.q;
        }
        let (da, db) = (self.digits(a), self.digits(b));
        let mut prod = vec![0usize; 2 * self.e - 1];
        for (i, x) in da.iter().enumerate() {
            for (j, y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        // Reduce by the monic modulus from the top degree down.
        for deg in (self.e..prod.len()).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            for (t, &mcoef) in self.modulus.iter().enumerate() {
                let idx = deg - self.e + t;
                prod[idx] = (prod[idx] + self.p * self.p - c * mcoef % self.p) % self.p;
            }
        }
        self.encode(&prod[..self.e])
    }
}
