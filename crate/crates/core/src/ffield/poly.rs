//! Dense polynomials over `F_q`, ascending coefficient order.

use std::fmt;

use super::{FfieldError, FieldCtx};

/// A polynomial over `F_q` as a dense coefficient vector in ascending
/// degree order. Invariants: no trailing zero (the zero polynomial is the
/// empty vector) and every residue lies in `[0, q)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FqPoly {
    coeffs: Vec<u64>,
}

impl FqPoly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self { coeffs: vec![1] }
    }

    pub fn x() -> Self {
        Self { coeffs: vec![0, 1] }
    }

    pub fn constant(ctx: &FieldCtx, c: u64) -> Result<Self, FfieldError> {
        if c >= ctx.q() {
            return Err(FfieldError::CoefficientRange {
                coeff: c,
                q: ctx.q(),
            });
        }
        Ok(Self::from_raw(vec![c]))
    }

    /// Validates residues and strips trailing zeros.
    pub fn from_coeffs(ctx: &FieldCtx, coeffs: Vec<u64>) -> Result<Self, FfieldError> {
        for &c in &coeffs {
            if c >= ctx.q() {
                return Err(FfieldError::CoefficientRange {
                    coeff: c,
                    q: ctx.q(),
                });
            }
        }
        Ok(Self::from_raw(coeffs))
    }

    /// Internal constructor: assumes residues already reduced.
    pub(crate) fn from_raw(mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// `None` is the degree of the zero polynomial.
    #[inline]
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    #[inline]
    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    #[inline]
    pub fn leading_coeff(&self) -> Option<u64> {
        self.coeffs.last().copied()
    }

    /// Coefficient of `X^i` (zero beyond the degree).
    #[inline]
    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    #[inline]
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn add(&self, other: &Self, ctx: &FieldCtx) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(ctx.add(self.coeff(i), other.coeff(i)));
        }
        Self::from_raw(out)
    }

    pub fn sub(&self, other: &Self, ctx: &FieldCtx) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(ctx.sub(self.coeff(i), other.coeff(i)));
        }
        Self::from_raw(out)
    }

    pub fn neg(&self, ctx: &FieldCtx) -> Self {
        Self::from_raw(self.coeffs.iter().map(|&c| ctx.neg(c)).collect())
    }

    pub fn scale(&self, c: u64, ctx: &FieldCtx) -> Self {
        if c == 0 {
            return Self::zero();
        }
        Self::from_raw(self.coeffs.iter().map(|&a| ctx.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &Self, ctx: &FieldCtx) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = ctx.add(out[i + j], ctx.mul(a, b));
            }
        }
        Self::from_raw(out)
    }

    /// Euclidean division: returns `(quotient, remainder)` with
    /// `self = q * divisor + r` and `deg r < deg divisor`.
    pub fn divmod(&self, divisor: &Self, ctx: &FieldCtx) -> Result<(Self, Self), FfieldError> {
        let dd = divisor.degree().ok_or(FfieldError::DivisionByZero)?;
        let nd = match self.degree() {
            Some(n) if n >= dd => n,
            _ => return Ok((Self::zero(), self.clone())),
        };
        let lead_inv = ctx.inv(divisor.leading_coeff().unwrap());
        let mut rem = self.coeffs.clone();
        let mut quo = vec![0u64; nd - dd + 1];
        for k in (dd..=nd).rev() {
            let c = rem[k];
            if c == 0 {
                continue;
            }
            let factor = ctx.mul(c, lead_inv);
            quo[k - dd] = factor;
            for (j, &b) in divisor.coeffs.iter().enumerate() {
                rem[k - dd + j] = ctx.sub(rem[k - dd + j], ctx.mul(factor, b));
            }
        }
        Ok((Self::from_raw(quo), Self::from_raw(rem)))
    }

    pub fn rem(&self, divisor: &Self, ctx: &FieldCtx) -> Result<Self, FfieldError> {
        Ok(self.divmod(divisor, ctx)?.1)
    }

    /// Monic greatest common divisor. `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self, ctx: &FieldCtx) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b, ctx).expect("b nonzero");
            a = b;
            b = r;
        }
        a.make_monic(ctx)
    }

    pub fn make_monic(&self, ctx: &FieldCtx) -> Self {
        match self.leading_coeff() {
            None | Some(1) => self.clone(),
            Some(lc) => self.scale(ctx.inv(lc), ctx),
        }
    }

    /// Formal derivative. Exponents divisible by the characteristic drop
    /// out, so the result can vanish for nonconstant input.
    pub fn derivative(&self, ctx: &FieldCtx) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let out: Vec<u64> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| ctx.mul(c, (i as u64) % ctx.q()))
            .collect();
        Self::from_raw(out)
    }

    /// Horner evaluation at a base-field point.
    pub fn eval(&self, x: u64, ctx: &FieldCtx) -> u64 {
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = ctx.add(ctx.mul(acc, x), c);
        }
        acc
    }

    /// `self^e mod modulus` by square-and-multiply.
    pub fn powmod(&self, mut e: u128, modulus: &Self, ctx: &FieldCtx) -> Self {
        let mut base = self.rem(modulus, ctx).expect("nonzero modulus");
        let mut acc = Self::one().rem(modulus, ctx).expect("nonzero modulus");
        while e > 0 {
            if e & 1 == 1 {
                acc = acc
                    .mul(&base, ctx)
                    .rem(modulus, ctx)
                    .expect("nonzero modulus");
            }
            base = base
                .mul(&base, ctx)
                .rem(modulus, ctx)
                .expect("nonzero modulus");
            e >>= 1;
        }
        acc
    }

    /// Parses the CSV text form: comma-separated ascending coefficients,
    /// e.g. `X^3+2X+1` over `F_3` is `1,2,0,1`. Rejects residues >= q and
    /// a trailing zero leading coefficient (`0` alone is the zero
    /// polynomial).
    pub fn parse(ctx: &FieldCtx, text: &str) -> Result<Self, FfieldError> {
        let parts: Vec<&str> = text.split(',').collect();
        if parts.is_empty() || text.trim().is_empty() {
            return Err(FfieldError::Parse(text.to_string(), "empty".into()));
        }
        let mut coeffs = Vec::with_capacity(parts.len());
        for p in &parts {
            let c: u64 = p
                .trim()
                .parse()
                .map_err(|e| FfieldError::Parse(text.to_string(), format!("{e}")))?;
            if c >= ctx.q() {
                return Err(FfieldError::CoefficientRange {
                    coeff: c,
                    q: ctx.q(),
                });
            }
            coeffs.push(c);
        }
        if coeffs.len() > 1 && coeffs.last() == Some(&0) {
            return Err(FfieldError::Parse(
                text.to_string(),
                "trailing zero leading coefficient".into(),
            ));
        }
        Ok(Self::from_raw(coeffs))
    }
}

/// Displays the CSV text form (round-trips through [`FqPoly::parse`]).
impl fmt::Display for FqPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> FieldCtx {
        FieldCtx::new(3).unwrap()
    }

    #[test]
    fn mul_char3_cancellation() {
        let ctx = f3();
        // (X+1)(X+2) = X^2 + 3X + 2 = X^2 + 2 over F_3.
        let a = FqPoly::from_coeffs(&ctx, vec![1, 1]).unwrap();
        let b = FqPoly::from_coeffs(&ctx, vec![2, 1]).unwrap();
        let prod = a.mul(&b, &ctx);
        assert_eq!(prod, FqPoly::from_coeffs(&ctx, vec![2, 0, 1]).unwrap());
    }

    #[test]
    fn gcd_x3_minus_x_and_x2_minus_1() {
        let ctx = f3();
        // gcd(X^3 - X, X^2 - 1) = X^2 + 2 (monic form of X^2 - 1).
        // Hand Euclid: X^3 - X = X * (X^2 - 1) + 0, so the gcd is X^2 - 1.
        let a = FqPoly::from_coeffs(&ctx, vec![0, 2, 0, 1]).unwrap();
        let b = FqPoly::from_coeffs(&ctx, vec![2, 0, 1]).unwrap();
        assert_eq!(
            a.gcd(&b, &ctx),
            FqPoly::from_coeffs(&ctx, vec![2, 0, 1]).unwrap()
        );
    }

    #[test]
    fn derivative_drops_char_multiples() {
        let ctx = f3();
        // d/dX (X^3 + 2X + 1) = 3X^2 + 2 = 2 over F_3.
        let f = FqPoly::from_coeffs(&ctx, vec![1, 2, 0, 1]).unwrap();
        assert_eq!(f.derivative(&ctx), FqPoly::constant(&ctx, 2).unwrap());
    }

    #[test]
    fn divmod_reconstructs() {
        let ctx = FieldCtx::new(5).unwrap();
        let a = FqPoly::from_coeffs(&ctx, vec![3, 1, 4, 0, 2]).unwrap();
        let b = FqPoly::from_coeffs(&ctx, vec![1, 2, 1]).unwrap();
        let (q, r) = a.divmod(&b, &ctx).unwrap();
        assert!(r.degree() < b.degree());
        assert_eq!(q.mul(&b, &ctx).add(&r, &ctx), a);
    }

    #[test]
    fn divmod_by_zero_errors() {
        let ctx = f3();
        let a = FqPoly::x();
        assert_eq!(
            a.divmod(&FqPoly::zero(), &ctx),
            Err(FfieldError::DivisionByZero)
        );
    }

    #[test]
    fn powmod_small() {
        let ctx = f3();
        // X^4 mod (X^2 + 1): X^2 = -1, so X^4 = 1.
        let m = FqPoly::from_coeffs(&ctx, vec![1, 0, 1]).unwrap();
        assert_eq!(FqPoly::x().powmod(4, &m, &ctx), FqPoly::one());
    }

    #[test]
    fn eval_horner() {
        let ctx = f3();
        let f = FqPoly::from_coeffs(&ctx, vec![1, 2, 0, 1]).unwrap();
        // F(0)=1, F(1)=4=1, F(2)=8+4+1=13=1 over F_3.
        assert_eq!(f.eval(0, &ctx), 1);
        assert_eq!(f.eval(1, &ctx), 1);
        assert_eq!(f.eval(2, &ctx), 1);
    }

    #[test]
    fn parse_accepts_and_rejects() {
        let ctx = f3();
        let f = FqPoly::parse(&ctx, "1,2,0,1").unwrap();
        assert_eq!(f, FqPoly::from_coeffs(&ctx, vec![1, 2, 0, 1]).unwrap());
        assert_eq!(f.to_string(), "1,2,0,1");
        // Residue out of range.
        assert!(FqPoly::parse(&ctx, "1,3").is_err());
        // Trailing zero leading coefficient.
        assert!(FqPoly::parse(&ctx, "1,2,0").is_err());
        // Lone zero is the zero polynomial.
        assert_eq!(FqPoly::parse(&ctx, "0").unwrap(), FqPoly::zero());
        assert!(FqPoly::parse(&ctx, "").is_err());
        assert!(FqPoly::parse(&ctx, "1,,2").is_err());
    }

    #[test]
    fn display_zero() {
        assert_eq!(FqPoly::zero().to_string(), "0");
    }
}
