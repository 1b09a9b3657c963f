//! Switch plans: row and column partitions with an entrywise action on each
//! submatrix, plus the rank / reducible / degenerate / minimal taxonomy.
//!
//! Row parts are `(R, R_1..R_s)` and column parts `(C, C_1..C_t)`. The
//! coefficient `a_ij` acts on the submatrix `M_ij = (R_i, C_j)`; cells in
//! `R` or `C` are never touched.

pub mod graph;

use std::fmt::Debug;

use rayon::prelude::*;

use crate::bmatrix::BHMatrix;
use crate::equiv::equivalent_monomial;
use crate::error::{Error, Result};

pub use graph::{char_poly, gm_switch, seidel_switch, SimpleGraph};

/// An entrywise action on one alphabet.
pub trait Coefficient: Clone + Debug + PartialEq + Send + Sync {
    type Entry: Copy;

    fn identity(&self) -> Self;
    fn is_identity(&self) -> bool;
    fn act(&self, e: Self::Entry) -> Self::Entry;
}

/// Multiplication by `ζ_k^exp` on exponents mod `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RootMul {
    pub exp: u32,
    pub k: usize,
}

impl RootMul {
    pub fn new(exp: i64, k: usize) -> Self {
        RootMul { exp: exp.rem_euclid(k as i64) as u32, k }
    }
}

impl Coefficient for RootMul {
    type Entry = u32;

    fn identity(&self) -> Self {
        RootMul { exp: 0, k: self.k }
    }

    fn is_identity(&self) -> bool {
        self.exp == 0
    }

    fn act(&self, e: u32) -> u32 {
        ((e as usize + self.exp as usize) % self.k) as u32
    }
}

/// A permutation of the alphabet `{0, 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BitFlip {
    Keep,
    Flip,
}

impl Coefficient for BitFlip {
    type Entry = u8;

    fn identity(&self) -> Self {
        BitFlip::Keep
    }

    fn is_identity(&self) -> bool {
        *self == BitFlip::Keep
    }

    fn act(&self, e: u8) -> u8 {
        match self {
            BitFlip::Keep => e,
            BitFlip::Flip => 1 - e,
        }
    }
}

/// An ordered partition `(rest, cell_1..cell_s)` of `0..size`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    size: usize,
    rest: Vec<usize>,
    cells: Vec<Vec<usize>>,
}

impl Partition {
    /// `rest` is derived as everything not in a cell.
    pub fn new(size: usize, cells: Vec<Vec<usize>>) -> Result<Self> {
        let mut owner = vec![false; size];
        for cell in &cells {
            if cell.is_empty() {
                return Err(Error::InvalidPlan("empty switching cell".into()));
            }
            for &x in cell {
                if x >= size {
                    return Err(Error::IndexOutOfRange { index: x, size });
                }
                if std::mem::replace(&mut owner[x], true) {
                    return Err(Error::InvalidPlan(format!("index {x} lies in two cells")));
                }
            }
        }
        let rest = (0..size).filter(|&x| !owner[x]).collect();
        Ok(Partition { size, rest, cells })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn rest(&self) -> &[usize] {
        &self.rest
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }
}

/// Partitions plus an `s × t` coefficient array.
#[derive(Clone, Debug, PartialEq)]
pub struct SwitchPlan<C: Coefficient> {
    rows: Partition,
    cols: Partition,
    coeffs: Vec<Vec<C>>,
}

impl<C: Coefficient> SwitchPlan<C> {
    /// Rejects plans where some coefficient row or column is all identity:
    /// such a cell could be merged into `R` or `C`.
    pub fn new(rows: Partition, cols: Partition, coeffs: Vec<Vec<C>>) -> Result<Self> {
        let plan = Self::new_relaxed(rows, cols, coeffs)?;
        if let Some(i) = plan.coeffs.iter().position(|r| r.iter().all(C::is_identity)) {
            return Err(Error::InvalidPlan(format!("row cell {} has only identity coefficients", i + 1)));
        }
        let t = plan.cols.cells.len();
        if let Some(j) = (0..t).find(|&j| plan.coeffs.iter().all(|r| r[j].is_identity())) {
            return Err(Error::InvalidPlan(format!("column cell {} has only identity coefficients", j + 1)));
        }
        Ok(plan)
    }

    /// Shape checks only; identity coefficients anywhere are allowed.
    pub fn new_relaxed(rows: Partition, cols: Partition, coeffs: Vec<Vec<C>>) -> Result<Self> {
        let (s, t) = (rows.cells.len(), cols.cells.len());
        if s == 0 || t == 0 {
            return Err(Error::InvalidPlan("a plan needs at least one row cell and one column cell".into()));
        }
        if coeffs.len() != s || coeffs.iter().any(|r| r.len() != t) {
            return Err(Error::InvalidPlan(format!("coefficient array must be {s} × {t}")));
        }
        Ok(SwitchPlan { rows, cols, coeffs })
    }

    pub fn rows(&self) -> &Partition {
        &self.rows
    }

    pub fn cols(&self) -> &Partition {
        &self.cols
    }

    pub fn coeffs(&self) -> &[Vec<C>] {
        &self.coeffs
    }

    pub fn rank(&self) -> usize {
        self.coeffs.iter().flatten().filter(|c| !c.is_identity()).count()
    }

    pub fn is_noop(&self) -> bool {
        self.rank() == 0
    }

    /// Calls `f(i, j, a)` for every cell inside a switched submatrix.
    pub fn for_each_cell(&self, mut f: impl FnMut(usize, usize, &C)) {
        for (ri, rcell) in self.rows.cells.iter().enumerate() {
            for (cj, ccell) in self.cols.cells.iter().enumerate() {
                let a = &self.coeffs[ri][cj];
                if a.is_identity() {
                    continue;
                }
                for &i in rcell {
                    for &j in ccell {
                        f(i, j, a);
                    }
                }
            }
        }
    }

    /// Copy of the plan keeping only the coefficients selected by `keep`
    /// (indexed over non-identity positions in row-major order).
    fn restricted(&self, keep: u32) -> Self {
        let mut bit = 0;
        let coeffs = self
            .coeffs
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| {
                        if c.is_identity() {
                            return c.clone();
                        }
                        let kept = keep >> bit & 1 == 1;
                        bit += 1;
                        if kept {
                            c.clone()
                        } else {
                            c.identity()
                        }
                    })
                    .collect()
            })
            .collect();
        SwitchPlan { rows: self.rows.clone(), cols: self.cols.clone(), coeffs }
    }
}

impl SwitchPlan<RootMul> {
    fn check_shape(&self, h: &BHMatrix) -> Result<()> {
        if self.rows.size != h.n() || self.cols.size != h.n() {
            return Err(Error::Dimension(format!(
                "plan is {} × {} but matrix has order {}",
                self.rows.size,
                self.cols.size,
                h.n()
            )));
        }
        if let Some(c) = self.coeffs.iter().flatten().find(|c| c.k != h.k()) {
            return Err(Error::OrderMismatch(c.k, h.k()));
        }
        Ok(())
    }

    /// The switched matrix without checking orthogonality.
    pub fn apply_unchecked(&self, h: &BHMatrix) -> Result<BHMatrix> {
        self.check_shape(h)?;
        let mut out = h.clone();
        self.for_each_cell(|i, j, a| out.set(i, j, a.act(h.get(i, j))));
        Ok(out)
    }
}

/// Applies `plan` to `H`; errors if the result is not Hadamard.
pub fn apply_switch(h: &BHMatrix, plan: &SwitchPlan<RootMul>) -> Result<BHMatrix> {
    let out = plan.apply_unchecked(h)?;
    out.ensure_hadamard()?;
    Ok(out)
}

/// Largest rank `classify_plan` sweeps exhaustively.
pub const MAX_CLASSIFY_RANK: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlanClass {
    pub rank: usize,
    pub reducible: bool,
    pub degenerate: bool,
    pub minimal: bool,
}

/// Rank, reducibility, degeneracy and minimality of a valid switch.
pub fn classify_plan(h: &BHMatrix, plan: &SwitchPlan<RootMul>) -> Result<PlanClass> {
    let rank = plan.rank();
    if rank > MAX_CLASSIFY_RANK {
        return Err(Error::CapExceeded(format!("rank {rank} exceeds {MAX_CLASSIFY_RANK}")));
    }
    if rank == 0 {
        return Err(Error::InvalidPlan("plan has no non-identity coefficient".into()));
    }
    let switched = apply_switch(h, plan)?;
    let full = (1u32 << rank) - 1;
    let reducible = (1..full).into_par_iter().any(|mask| {
        plan.restricted(mask)
            .apply_unchecked(h)
            .map(|k| k.is_butson_hadamard())
            .unwrap_or(false)
    });
    let degenerate = equivalent_monomial(h, &switched).is_some();
    let coeffs = plan.coeffs();
    let t = plan.cols().cells().len();
    let dup_rows = (0..coeffs.len()).any(|a| (a + 1..coeffs.len()).any(|b| coeffs[a] == coeffs[b]));
    let col = |j: usize| coeffs.iter().map(|r| r[j]).collect::<Vec<_>>();
    let dup_cols = (0..t).any(|a| (a + 1..t).any(|b| col(a) == col(b)));
    Ok(PlanClass { rank, reducible, degenerate, minimal: !reducible && !dup_rows && !dup_cols })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{bush_type, fourier, kronecker};

    fn rm(e: i64, k: usize) -> RootMul {
        RootMul::new(e, k)
    }

    /// Order 8 with a closed quadruple in rows 0, 2, 4, 6.
    fn sylvester8() -> BHMatrix {
        let f2 = fourier(2);
        kronecker(&kronecker(&f2, &f2), &f2)
    }

    fn quad_plan(blocks: &[usize]) -> SwitchPlan<RootMul> {
        let rows = Partition::new(8, vec![vec![0, 2, 4, 6]]).unwrap();
        let cols = Partition::new(8, blocks.iter().map(|&b| vec![2 * b, 2 * b + 1]).collect()).unwrap();
        SwitchPlan::new(rows, cols, vec![vec![rm(1, 2); blocks.len()]]).unwrap()
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(3, vec![vec![0, 1], vec![1]]).is_err());
        assert!(Partition::new(3, vec![vec![3]]).is_err());
        assert!(Partition::new(3, vec![vec![]]).is_err());
        let p = Partition::new(4, vec![vec![2], vec![0]]).unwrap();
        assert_eq!(p.rest(), &[1, 3]);
    }

    #[test]
    fn non_triviality() {
        let rows = Partition::new(3, vec![vec![0]]).unwrap();
        let cols = Partition::new(3, vec![vec![0], vec![1]]).unwrap();
        let c = vec![vec![rm(1, 3), rm(0, 3)]];
        assert!(SwitchPlan::new(rows.clone(), cols.clone(), c.clone()).is_err());
        let plan = SwitchPlan::new_relaxed(rows, cols, c).unwrap();
        assert_eq!(plan.rank(), 1);
    }

    #[test]
    fn identity_plan_is_noop() {
        let h = fourier(3);
        let rows = Partition::new(3, vec![vec![0]]).unwrap();
        let cols = Partition::new(3, vec![vec![1]]).unwrap();
        let plan = SwitchPlan::new_relaxed(rows, cols, vec![vec![rm(0, 3)]]).unwrap();
        assert!(plan.is_noop());
        assert_eq!(apply_switch(&h, &plan).unwrap(), h);
    }

    #[test]
    fn bush_diagonal_block_switch() {
        let h = bush_type(&fourier(3)).unwrap();
        let rows = Partition::new(9, vec![vec![3, 4, 5]]).unwrap();
        let cols = Partition::new(9, vec![vec![3, 4, 5]]).unwrap();
        let plan = SwitchPlan::new(rows, cols, vec![vec![rm(1, 3)]]).unwrap();
        assert!(apply_switch(&h, &plan).unwrap().is_butson_hadamard());
    }

    #[test]
    fn single_cell_switch_fails() {
        let rows = Partition::new(3, vec![vec![1]]).unwrap();
        let cols = Partition::new(3, vec![vec![2]]).unwrap();
        let plan = SwitchPlan::new(rows, cols, vec![vec![rm(1, 3)]]).unwrap();
        assert!(matches!(apply_switch(&fourier(3), &plan), Err(Error::NotHadamard(_, _))));
    }

    #[test]
    fn closed_quadruple_taxonomy() {
        let h = sylvester8();
        let one = classify_plan(&h, &quad_plan(&[1])).unwrap();
        assert_eq!(one.rank, 1);
        assert!(!one.reducible);
        let two = classify_plan(&h, &quad_plan(&[0, 1])).unwrap();
        assert_eq!(two.rank, 2);
        assert!(two.reducible && !two.minimal);
        let four = classify_plan(&h, &quad_plan(&[0, 1, 2, 3])).unwrap();
        assert!(four.degenerate);
    }

    #[test]
    fn rank_cap() {
        let h = fourier(9);
        let rows = Partition::new(9, vec![vec![0]]).unwrap();
        let cols = Partition::new(9, (0..9).map(|j| vec![j]).collect()).unwrap();
        let plan = SwitchPlan::new(rows, cols, vec![vec![rm(1, 9); 9]]).unwrap();
        assert!(matches!(classify_plan(&h, &plan), Err(Error::CapExceeded(_))));
    }
}
