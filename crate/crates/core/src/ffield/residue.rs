//! Residue rings `F_q[X]/(P)` with optional square-membership tables.

use super::enumerate::monic_count;
use super::{FfieldError, FieldCtx, FqPoly};

/// Default cap on square-table size, in entries. Beyond it, square tests
/// fall back to a powmod with exponent `(q^n - 1) / 2`.
pub const DEFAULT_SQUARES_BUDGET: u64 = 1 << 24;

/// `F_q[X]/(modulus)` for a monic modulus of degree n >= 1. When the
/// modulus is irreducible this is the field with `q^n` elements.
///
/// Residues are indexed by `sum c_j q^j` over their coefficients, the
/// same digit order as monic enumeration.
#[derive(Debug, Clone)]
pub struct ResidueRing {
    ctx: FieldCtx,
    modulus: FqPoly,
    degree: usize,
    /// Per-residue quadratic character: 0 for the zero class, +1 for
    /// nonzero squares, -1 otherwise. Present only when built under
    /// budget.
    squares: Option<Vec<i8>>,
}

impl ResidueRing {
    pub fn new(
        ctx: &FieldCtx,
        modulus: FqPoly,
        build_table: bool,
        table_budget: u64,
    ) -> Result<Self, FfieldError> {
        let degree = match modulus.degree() {
            Some(d) if d >= 1 && modulus.is_monic() => d,
            _ => return Err(FfieldError::BadModulus),
        };
        let mut ring = Self {
            ctx: *ctx,
            modulus,
            degree,
            squares: None,
        };
        if build_table {
            let size = monic_count(ctx, degree);
            if size > table_budget as u128 {
                return Err(FfieldError::TableBudget {
                    needed: size,
                    budget: table_budget,
                });
            }
            ring.build_squares_table(size as u64);
        }
        Ok(ring)
    }

    pub fn modulus(&self) -> &FqPoly {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `q^n`, the number of residue classes.
    pub fn size(&self) -> u128 {
        monic_count(&self.ctx, self.degree)
    }

    pub fn has_table(&self) -> bool {
        self.squares.is_some()
    }

    fn build_squares_table(&mut self, size: u64) {
        let mut table = vec![-1i8; size as usize];
        table[0] = 0;
        // Mark r^2 for every nonzero residue; exactly (q^n - 1)/2 classes
        // get marked when the modulus is irreducible.
        for idx in 1..size {
            let r = self.residue_from_index(idx);
            let sq = self.mulmod(&r, &r);
            table[self.residue_index(&sq) as usize] = 1;
        }
        self.squares = Some(table);
    }

    pub fn reduce(&self, f: &FqPoly) -> FqPoly {
        f.rem(&self.modulus, &self.ctx).expect("modulus nonzero")
    }

    pub fn mulmod(&self, a: &FqPoly, b: &FqPoly) -> FqPoly {
        self.reduce(&a.mul(b, &self.ctx))
    }

    pub fn powmod(&self, a: &FqPoly, e: u128) -> FqPoly {
        a.powmod(e, &self.modulus, &self.ctx)
    }

    /// Digit index of a residue (degree < n).
    pub fn residue_index(&self, r: &FqPoly) -> u64 {
        debug_assert!(r.degree().map_or(true, |d| d < self.degree));
        let q = self.ctx.q();
        let mut idx = 0u64;
        for j in (0..self.degree).rev() {
            idx = idx * q + r.coeff(j);
        }
        idx
    }

    pub fn residue_from_index(&self, mut idx: u64) -> FqPoly {
        let q = self.ctx.q();
        let mut coeffs = Vec::with_capacity(self.degree);
        for _ in 0..self.degree {
            coeffs.push(idx % q);
            idx /= q;
        }
        FqPoly::from_raw(coeffs)
    }

    /// Quadratic character of a residue class: 0 on zero, +1 on nonzero
    /// squares, -1 otherwise. Meaningful when the modulus is irreducible.
    /// Table lookup when available, Euler criterion powmod otherwise.
    pub fn quadratic_char(&self, r: &FqPoly) -> i8 {
        if let Some(table) = &self.squares {
            return table[self.residue_index(r) as usize];
        }
        self.quadratic_char_powmod(r)
    }

    /// Euler criterion: `r^{(q^n - 1)/2}` is the constant 1 for nonzero
    /// squares and the constant -1 otherwise.
    pub fn quadratic_char_powmod(&self, r: &FqPoly) -> i8 {
        let red = self.reduce(r);
        if red.is_zero() {
            return 0;
        }
        let e = (self.size() - 1) / 2;
        let pow = self.powmod(&red, e);
        debug_assert!(pow.degree() == Some(0));
        if pow.coeff(0) == 1 {
            1
        } else {
            debug_assert_eq!(pow.coeff(0), self.ctx.q() - 1);
            -1
        }
    }

    /// Character of `f mod modulus` by index, for table-driven hot paths.
    pub fn quadratic_char_index(&self, idx: u64) -> Option<i8> {
        self.squares.as_ref().map(|t| t[idx as usize])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> FieldCtx {
        FieldCtx::new(3).unwrap()
    }

    #[test]
    fn squares_table_marks_half() {
        let ctx = f3();
        let m = FqPoly::from_coeffs(&ctx, vec![1, 0, 1]).unwrap(); // X^2+1, irreducible
        let ring = ResidueRing::new(&ctx, m, true, DEFAULT_SQUARES_BUDGET).unwrap();
        let table_plus: usize = (0..9)
            .filter(|&i| ring.quadratic_char_index(i) == Some(1))
            .count();
        assert_eq!(table_plus, 4); // (9-1)/2 of the 8 nonzero residues
        assert_eq!(ring.quadratic_char_index(0), Some(0));
    }

    #[test]
    fn constants_ring() {
        let ctx = f3();
        let ring = ResidueRing::new(&ctx, FqPoly::x(), false, DEFAULT_SQUARES_BUDGET).unwrap();
        assert_eq!(ring.size(), 3);
        let f = FqPoly::from_coeffs(&ctx, vec![1, 2, 0, 1]).unwrap();
        assert_eq!(ring.reduce(&f), FqPoly::one()); // F(0) = 1
    }

    #[test]
    fn powmod_x4_mod_x2_plus_1() {
        let ctx = f3();
        let m = FqPoly::from_coeffs(&ctx, vec![1, 0, 1]).unwrap();
        let ring = ResidueRing::new(&ctx, m, false, DEFAULT_SQUARES_BUDGET).unwrap();
        assert_eq!(ring.powmod(&FqPoly::x(), 4), FqPoly::one());
    }

    #[test]
    fn table_and_powmod_agree() {
        let ctx = f3();
        let m = FqPoly::from_coeffs(&ctx, vec![1, 0, 1]).unwrap();
        let ring = ResidueRing::new(&ctx, m, true, DEFAULT_SQUARES_BUDGET).unwrap();
        for idx in 0..9 {
            let r = ring.residue_from_index(idx);
            assert_eq!(
                ring.quadratic_char(&r),
                ring.quadratic_char_powmod(&r),
                "idx={idx}"
            );
        }
    }

    #[test]
    fn budget_enforced() {
        let ctx = f3();
        let m = FqPoly::from_coeffs(&ctx, vec![1, 0, 1]).unwrap();
        let err = ResidueRing::new(&ctx, m, true, 4).unwrap_err();
        assert!(matches!(
            err,
            FfieldError::TableBudget {
                needed: 9,
                budget: 4
            }
        ));
    }

    #[test]
    fn rejects_non_monic_modulus() {
        let ctx = f3();
        let m = FqPoly::from_coeffs(&ctx, vec![1, 1]).unwrap();
        assert!(ResidueRing::new(&ctx, m, false, 0).is_ok());
        let nm = FqPoly::from_coeffs(&ctx, vec![1, 0, 2]).unwrap();
        assert!(matches!(
            ResidueRing::new(&ctx, nm, false, 0),
            Err(FfieldError::BadModulus)
        ));
        assert!(matches!(
            ResidueRing::new(&ctx, FqPoly::one(), false, 0),
            Err(FfieldError::BadModulus)
        ));
    }

    #[test]
    fn residue_index_round_trip() {
        let ctx = FieldCtx::new(5).unwrap();
        let m = FqPoly::from_coeffs(&ctx, vec![2, 0, 0, 1]).unwrap(); // X^3+2
        let ring = ResidueRing::new(&ctx, m, false, DEFAULT_SQUARES_BUDGET).unwrap();
        for idx in 0..125 {
            assert_eq!(ring.residue_index(&ring.residue_from_index(idx)), idx);
        }
    }
}
