//! L-polynomials of hyperelliptic curves `y^2 = F(x)` by three
//! independent methods, class numbers and the fluctuation statistic.
//!
//! * `newton` — power sums from Λ-weighted character sums via the
//!   explicit formula, then Newton's identities. Default; by far the
//!   cheapest.
//! * `charsum` — coefficients of the affine L-series by summing the
//!   symbol over every monic f of each degree (multiplicative sieve
//!   tabulation); for even d the series factors exactly as
//!   `(1-u) * P_C(u)` and the division is asserted to be exact.
//! * `pointcount` — affine point counts over extension fields, power
//!   sums from `q^n + 1 - N_n`, then Newton.
//!
//! All three must agree coefficient-for-coefficient; `charsum` and
//! `pointcount` are retained purely as oracles for the default path.

mod lpolynomial;
mod roots;

pub use lpolynomial::{LPolynomial, Parity};
pub use roots::rh_max_deviation;

use num_bigint::BigUint;
use thiserror::Error;

use crate::ffield::{
    enumerate_monic, is_squarefree, monic_count, FfieldError, FieldCtx, FqPoly, MonicFilter,
    MonicSieve, ResidueRing, DEFAULT_SQUARES_BUDGET,
};
use crate::numeric::fmt_f64;
use crate::quadchar::{
    lambda_char_sum_with_scratch, QuadcharError, SymbolTableCache, DEFAULT_SYMBOL_TABLE_BUDGET,
};

#[derive(Debug, Error)]
pub enum LfuncError {
    #[error("curve polynomial must be monic squarefree of degree >= 3")]
    BadCurve,
    #[error("curve degree {got} does not match engine degree {expected}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("inexact Newton division at n = {n}: numerator {numerator}")]
    InexactNewton { n: usize, numerator: i128 },
    #[error("affine L-series is not divisible by (1 - u): remainder {remainder}")]
    InfinitePlaceDivision { remainder: i64 },
    #[error("L-polynomial structure violated: {0}")]
    Structure(String),
    #[error("method {0:?} not enabled on this engine")]
    MethodDisabled(LMethod),
    #[error("parameters out of range: {0}")]
    OutOfRange(String),
    #[error(transparent)]
    Ffield(#[from] FfieldError),
    #[error(transparent)]
    Quadchar(#[from] QuadcharError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LMethod {
    Newton,
    CharSum,
    PointCount,
}

/// One curve's worth of output: the polynomial F, its class number, the
/// statistic `N_F` and the cached power sums.
#[derive(Debug, Clone)]
pub struct CurveRecord {
    pub f: FqPoly,
    pub q: u64,
    pub d: usize,
    pub genus: usize,
    pub class_number: BigUint,
    pub n_f: f64,
    pub power_sums: Vec<i64>,
}

impl CurveRecord {
    /// Fixed CSV row: `q,d,g,"c0,c1,...",class_number,n_f,s_1..s_g`.
    pub fn csv_row(&self) -> String {
        let sums: Vec<String> = self.power_sums.iter().map(|s| s.to_string()).collect();
        let mut row = format!(
            "{},{},{},\"{}\",{},{}",
            self.q,
            self.d,
            self.genus,
            self.f,
            self.class_number,
            fmt_f64(self.n_f)
        );
        if !sums.is_empty() {
            row.push(',');
            row.push_str(&sums.join(","));
        }
        row
    }

    pub fn csv_header(genus: usize) -> String {
        let mut h = String::from("q,d,g,f,class_number,n_f");
        for i in 1..=genus {
            h.push_str(&format!(",s_{i}"));
        }
        h
    }
}

/// Options controlling which methods an engine supports and its table
/// budgets.
#[derive(Debug, Clone)]
pub struct EngineOptions {
    pub with_charsum: bool,
    pub with_pointcount: bool,
    pub symbol_table_budget: u64,
    pub squares_table_budget: u64,
    /// Λ-sum depth beyond the genus (the functional-equation redundancy
    /// check needs s_{g+1}).
    pub extra_lambda_depth: usize,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self {
            with_charsum: false,
            with_pointcount: false,
            symbol_table_budget: DEFAULT_SYMBOL_TABLE_BUDGET,
            squares_table_budget: DEFAULT_SQUARES_BUDGET,
            extra_lambda_depth: 1,
        }
    }
}

impl EngineOptions {
    pub fn all_methods() -> Self {
        Self {
            with_charsum: true,
            with_pointcount: true,
            ..Self::default()
        }
    }
}

/// Shared per-(q, d) computation context: symbol tables, the monic
/// sieve for the charsum path, extension-field rings for point counting.
/// Immutable after construction; share by reference across workers.
pub struct CurveEngine {
    ctx: FieldCtx,
    d: usize,
    genus: usize,
    parity: Parity,
    symbols: SymbolTableCache,
    sieve: Option<MonicSieve>,
    counters: Vec<ExtensionCounter>,
}

/// Sampling sweeps point-count thousands of curves over the same
/// extension, so the powers `x^j` for every x and 1 <= j <= d are
/// precomputed once; evaluating F(x) then costs one scalar dot product
/// per coordinate with a single reduction at the end.
const POWERS_TABLE_BUDGET_WORDS: u128 = 1 << 23;

struct ExtensionCounter {
    ring: ResidueRing,
    /// Flat powers table: for each x index, d blocks of n words holding
    /// x^1..x^d. Absent when over budget (falls back to Horner).
    powers: Option<Vec<u64>>,
}

impl ExtensionCounter {
    fn new(ctx: &FieldCtx, ring: ResidueRing, d: usize) -> Self {
        let n = ring.degree();
        let size = ring.size();
        let words = size * (d as u128) * (n as u128);
        let powers = (words <= POWERS_TABLE_BUDGET_WORDS).then(|| {
            let qn = size as u64;
            let mut flat = vec![0u64; words as usize];
            let q = ctx.q();
            let modulus = ring.modulus().coeffs().to_vec();
            let mut x = vec![0u64; n];
            let mut tmp = vec![0u64; 2 * n];
            for xi in 0..qn {
                let mut t = xi;
                for digit in x.iter_mut() {
                    *digit = t % q;
                    t /= q;
                }
                let base = xi as usize * d * n;
                flat[base..base + n].copy_from_slice(&x);
                for j in 1..d {
                    let (done, rest) = flat.split_at_mut(base + j * n);
                    let prev = &done[base + (j - 1) * n..];
                    mul_reduce(ctx, prev, &x, &modulus, &mut tmp);
                    rest[..n].copy_from_slice(&tmp[..n]);
                }
            }
            flat
        });
        Self { ring, powers }
    }

    /// `sum_x chi(F(x))` over the extension.
    fn chi_sum(&self, ctx: &FieldCtx, f: &FqPoly) -> i64 {
        match &self.powers {
            Some(flat) => self.chi_sum_table(ctx, f, flat),
            None => self.chi_sum_horner(ctx, f),
        }
    }

    fn chi_sum_table(&self, ctx: &FieldCtx, f: &FqPoly, flat: &[u64]) -> i64 {
        let n = self.ring.degree();
        let d = f.degree().expect("curve polynomial");
        let q = ctx.q();
        let qn = self.ring.size() as u64;
        let fc = f.coeffs();
        let stride = d * n;
        let mut total = 0i64;
        let mut acc = vec![0u64; n];
        for xi in 0..qn {
            let base = xi as usize * stride;
            // Accumulate c_0 + sum_j c_j x^j wordwise; the engine caps
            // q below 2^24, so d+1 products of two residues stay far
            // below u64 and one reduction at the end suffices.
            acc[..n].fill(0);
            acc[0] = fc[0];
            for (j, &c) in fc.iter().enumerate().skip(1) {
                if c == 0 {
                    continue;
                }
                let row = &flat[base + (j - 1) * n..base + j * n];
                for (a, &x) in acc.iter_mut().zip(row) {
                    *a += c * x;
                }
            }
            let mut idx = 0u64;
            for w in (0..n).rev() {
                idx = idx * q + acc[w] % q;
            }
            total += match self.ring.quadratic_char_index(idx) {
                Some(s) => s as i64,
                None => self
                    .ring
                    .quadratic_char_powmod(&self.ring.residue_from_index(idx))
                    as i64,
            };
        }
        total
    }

    fn chi_sum_horner(&self, ctx: &FieldCtx, f: &FqPoly) -> i64 {
        let n = self.ring.degree();
        let q = ctx.q();
        let qn = self.ring.size() as u64;
        let modulus = self.ring.modulus().coeffs().to_vec();
        let fc = f.coeffs();
        let mut x = vec![0u64; n];
        let mut acc = vec![0u64; n];
        let mut tmp = vec![0u64; 2 * n];
        let mut total = 0i64;
        for xi in 0..qn {
            let mut t = xi;
            for digit in x.iter_mut() {
                *digit = t % q;
                t /= q;
            }
            acc.fill(0);
            for &c in fc.iter().rev() {
                mul_reduce(ctx, &acc, &x, &modulus, &mut tmp);
                tmp[0] = ctx.add(tmp[0], c);
                acc.copy_from_slice(&tmp[..n]);
            }
            let mut idx = 0u64;
            for w in (0..n).rev() {
                idx = idx * q + acc[w];
            }
            total += match self.ring.quadratic_char_index(idx) {
                Some(s) => s as i64,
                None => self
                    .ring
                    .quadratic_char_powmod(&self.ring.residue_from_index(idx))
                    as i64,
            };
        }
        total
    }
}

/// `tmp[..n] = a * b mod modulus` (schoolbook product, in-place monic
/// reduction). `a`, `b` have n words; `tmp` has 2n.
fn mul_reduce(ctx: &FieldCtx, a: &[u64], b: &[u64], modulus: &[u64], tmp: &mut [u64]) {
    let n = b.len();
    tmp.fill(0);
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            if bj != 0 {
                tmp[i + j] = ctx.add(tmp[i + j], ctx.mul(ai, bj));
            }
        }
    }
    for k in (n..2 * n).rev() {
        let factor = tmp[k];
        if factor == 0 {
            continue;
        }
        tmp[k] = 0;
        for j in 0..n {
            if modulus[j] != 0 {
                tmp[k - n + j] = ctx.sub(tmp[k - n + j], ctx.mul(factor, modulus[j]));
            }
        }
    }
}

impl CurveEngine {
    pub fn new(ctx: &FieldCtx, d: usize, opts: EngineOptions) -> Result<Self, LfuncError> {
        if d < 3 {
            return Err(LfuncError::OutOfRange(format!("degree {d} < 3")));
        }
        let genus = (d - 1) / 2;
        // Coefficients and power sums live in i64: cap the scale.
        if (genus as u32 + 1) * 64u32.saturating_sub((ctx.q() as u64).leading_zeros()) > 48 {
            return Err(LfuncError::OutOfRange(format!(
                "q^g too large for exact machine arithmetic (q={}, g={genus})",
                ctx.q()
            )));
        }
        let parity = Parity::of_degree(d);
        let lambda_depth = genus + opts.extra_lambda_depth;
        let symbol_depth = if opts.with_charsum {
            lambda_depth.max(d - 1)
        } else {
            lambda_depth
        };
        let symbols = SymbolTableCache::build(ctx, symbol_depth, opts.symbol_table_budget);
        let sieve = if opts.with_charsum {
            let total: u128 = (1..=d - 1).map(|n| monic_count(ctx, n)).sum();
            if total > 10_000_000 {
                return Err(LfuncError::OutOfRange(format!(
                    "charsum enumeration of {total} monic polynomials exceeds budget"
                )));
            }
            Some(MonicSieve::build(ctx, d - 1, 16_000_000)?)
        } else {
            None
        };
        let mut counters = Vec::new();
        if opts.with_pointcount {
            for n in 1..=genus {
                let modulus = enumerate_monic(ctx, n, MonicFilter::Irreducible)
                    .next()
                    .expect("irreducibles exist in every degree");
                let with_table = monic_count(ctx, n) <= opts.squares_table_budget as u128;
                let ring = ResidueRing::new(ctx, modulus, with_table, opts.squares_table_budget)?;
                counters.push(ExtensionCounter::new(ctx, ring, d));
            }
        }
        Ok(Self {
            ctx: *ctx,
            d,
            genus,
            parity,
            symbols,
            sieve,
            counters,
        })
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn symbols(&self) -> &SymbolTableCache {
        &self.symbols
    }

    fn validate(&self, f: &FqPoly) -> Result<(), LfuncError> {
        match f.degree() {
            Some(d) if d == self.d => {}
            Some(d) => {
                return Err(LfuncError::DegreeMismatch {
                    expected: self.d,
                    got: d,
                })
            }
            None => return Err(LfuncError::BadCurve),
        }
        if !f.is_monic() || !is_squarefree(&self.ctx, f) {
            return Err(LfuncError::BadCurve);
        }
        Ok(())
    }

    pub fn l_polynomial(&self, f: &FqPoly, method: LMethod) -> Result<LPolynomial, LfuncError> {
        self.validate(f)?;
        match method {
            LMethod::Newton => self.newton(f),
            LMethod::CharSum => self.charsum(f),
            LMethod::PointCount => self.pointcount(f),
        }
    }

    /// Power sum `s_n` straight from the explicit formula:
    /// `s_n = -(Λ-sum + δ_{d even})`.
    pub fn power_sum_from_charsum(&self, f: &FqPoly, n: usize) -> Result<i64, LfuncError> {
        let mut scratch = Vec::new();
        let lam = lambda_char_sum_with_scratch(&self.symbols, f, n, &mut scratch)?;
        Ok(-(lam + self.parity.delta()))
    }

    fn newton(&self, f: &FqPoly) -> Result<LPolynomial, LfuncError> {
        let mut scratch = Vec::new();
        let delta = self.parity.delta();
        let mut sums = Vec::with_capacity(self.genus);
        for n in 1..=self.genus {
            let lam = lambda_char_sum_with_scratch(&self.symbols, f, n, &mut scratch)?;
            sums.push(-(lam + delta));
        }
        LPolynomial::from_power_sums(self.ctx.q(), self.genus, self.parity, &sums)
    }

    /// Affine L-series coefficients `c_n = sum_{deg f = n} (F/f)` by
    /// tabulating the completely multiplicative symbol over every monic
    /// polynomial of degree < d via the least-prime-factor sieve.
    fn charsum(&self, f: &FqPoly) -> Result<LPolynomial, LfuncError> {
        let sieve = self
            .sieve
            .as_ref()
            .ok_or(LfuncError::MethodDisabled(LMethod::CharSum))?;
        let mut scratch = Vec::new();
        // Symbols of F at every prime of degree <= d-1.
        let mut prime_syms: Vec<Vec<i8>> = Vec::with_capacity(self.d - 1);
        for n in 1..=self.d - 1 {
            let count = sieve.prime_indices(n).len();
            debug_assert_eq!(count, self.symbols.prime_count(n));
            let mut row = Vec::with_capacity(count);
            for pos in 0..count {
                row.push(self.symbols.symbol_with_scratch(f, n, pos, &mut scratch));
            }
            prime_syms.push(row);
        }
        // chi[n][idx] over all monic of degree n, degree by degree.
        let mut c = vec![0i64; self.d];
        c[0] = 1;
        let mut chi: Vec<Vec<i8>> = vec![vec![1]];
        for n in 1..=self.d - 1 {
            let count = monic_count(&self.ctx, n) as usize;
            let mut row = Vec::with_capacity(count);
            let mut total = 0i64;
            for idx in 0..count as u64 {
                let v = match sieve.factor_step(n, idx) {
                    None => {
                        let pos = sieve.prime_position(n, idx).expect("prime");
                        prime_syms[n - 1][pos]
                    }
                    Some(step) => {
                        let ps = prime_syms[step.prime_deg - 1][step.prime_pos];
                        ps * chi[step.cofactor_deg][step.cofactor_idx as usize]
                    }
                };
                row.push(v);
                total += v as i64;
            }
            c[n] = total;
            chi.push(row);
        }
        let coeffs = match self.parity {
            Parity::Odd => c.iter().map(|&v| v as i128).collect::<Vec<_>>(),
            Parity::Even => {
                // c(u) = (1 - u) P(u): synthetic division, remainder must
                // vanish — a nonzero remainder falsifies the split-place
                // convention and is never rounded away.
                let mut a = vec![0i128; self.d - 1];
                a[0] = c[0] as i128;
                for n in 1..self.d - 1 {
                    a[n] = a[n - 1] + c[n] as i128;
                }
                let rem = a[self.d - 2] + c[self.d - 1] as i128;
                if rem != 0 {
                    return Err(LfuncError::InfinitePlaceDivision {
                        remainder: rem as i64,
                    });
                }
                a
            }
        };
        let coeffs: Vec<i64> = coeffs
            .iter()
            .map(|&v| {
                i64::try_from(v)
                    .map_err(|_| LfuncError::Structure(format!("coefficient {v} overflows i64")))
            })
            .collect::<Result<_, _>>()?;
        LPolynomial::from_coeffs(self.ctx.q(), self.genus, self.parity, coeffs)
    }

    /// Point counts over `F_{q^n}` for n = 1..g. The projective model
    /// adds one point at infinity for odd d and two for monic even d.
    fn pointcount(&self, f: &FqPoly) -> Result<LPolynomial, LfuncError> {
        if self.counters.is_empty() && self.genus > 0 {
            return Err(LfuncError::MethodDisabled(LMethod::PointCount));
        }
        let infinity = match self.parity {
            Parity::Odd => 1i64,
            Parity::Even => 2,
        };
        let mut sums = Vec::with_capacity(self.genus);
        for n in 1..=self.genus {
            let counter = &self.counters[n - 1];
            let qn = counter.ring.size() as i64;
            // N_n = q^n + chi_sum + points at infinity.
            let total = qn + counter.chi_sum(&self.ctx, f) + infinity;
            sums.push(qn + 1 - total);
        }
        LPolynomial::from_power_sums(self.ctx.q(), self.genus, self.parity, &sums)
    }

    /// Builds a full record via the default (newton) path.
    pub fn curve_record(&self, f: &FqPoly) -> Result<CurveRecord, LfuncError> {
        self.curve_record_via(f, LMethod::Newton)
    }

    pub fn curve_record_via(&self, f: &FqPoly, method: LMethod) -> Result<CurveRecord, LfuncError> {
        let l = self.l_polynomial(f, method)?;
        Ok(CurveRecord {
            f: f.clone(),
            q: self.ctx.q(),
            d: self.d,
            genus: self.genus,
            class_number: l.class_number(),
            n_f: l.nf_statistic(),
            power_sums: l.power_sums().to_vec(),
        })
    }

    /// Exact integer identity from the explicit formula:
    /// `-s_n = Λ-sum(F, n) + δ_{d even}`, with `s_n` recovered from the
    /// polynomial's coefficients by the inverse Newton recursion.
    /// Returns false on mismatch.
    pub fn explicit_formula_check(
        &self,
        f: &FqPoly,
        l: &LPolynomial,
        n: usize,
    ) -> Result<bool, LfuncError> {
        let p_n = l.power_sum(n)?;
        let mut scratch = Vec::new();
        let lam = lambda_char_sum_with_scratch(&self.symbols, f, n, &mut scratch)?;
        Ok(-p_n == lam + self.parity.delta())
    }
}

/// One-off convenience: builds a throwaway engine for the polynomial's
/// degree and runs the requested method. Sweeps should build a
/// `CurveEngine` once instead.
pub fn l_polynomial(
    ctx: &FieldCtx,
    f: &FqPoly,
    method: LMethod,
) -> Result<LPolynomial, LfuncError> {
    let d = f.degree().ok_or(LfuncError::BadCurve)?;
    if d < 3 {
        return Err(LfuncError::BadCurve);
    }
    let opts = match method {
        LMethod::Newton => EngineOptions::default(),
        LMethod::CharSum => EngineOptions {
            with_charsum: true,
            ..EngineOptions::default()
        },
        LMethod::PointCount => EngineOptions {
            with_pointcount: true,
            ..EngineOptions::default()
        },
    };
    CurveEngine::new(ctx, d, opts)?.l_polynomial(f, method)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> FieldCtx {
        FieldCtx::new(3).unwrap()
    }

    fn poly(ctx: &FieldCtx, c: &[u64]) -> FqPoly {
        FqPoly::from_coeffs(ctx, c.to_vec()).unwrap()
    }

    #[test]
    fn example_curves_newton() {
        let ctx = f3();
        let engine = CurveEngine::new(&ctx, 3, EngineOptions::default()).unwrap();
        let l = engine
            .l_polynomial(&poly(&ctx, &[0, 2, 0, 1]), LMethod::Newton)
            .unwrap();
        assert_eq!(l.coeffs(), &[1, 0, 3]);
        assert_eq!(l.class_number(), BigUint::from(4u32));
        let l = engine
            .l_polynomial(&poly(&ctx, &[1, 2, 0, 1]), LMethod::Newton)
            .unwrap();
        assert_eq!(l.coeffs(), &[1, 3, 3]);
        assert_eq!(l.class_number(), BigUint::from(7u32));
    }

    #[test]
    fn rejects_bad_curves() {
        let ctx = f3();
        let engine = CurveEngine::new(&ctx, 3, EngineOptions::default()).unwrap();
        // Non-squarefree: X^3 (zero derivative branch).
        assert!(matches!(
            engine.l_polynomial(&poly(&ctx, &[0, 0, 0, 1]), LMethod::Newton),
            Err(LfuncError::BadCurve)
        ));
        // Wrong degree.
        assert!(matches!(
            engine.l_polynomial(&poly(&ctx, &[1, 0, 1, 0, 1]), LMethod::Newton),
            Err(LfuncError::DegreeMismatch { .. })
        ));
        // d < 3 rejected at engine construction.
        assert!(CurveEngine::new(&ctx, 2, EngineOptions::default()).is_err());
    }

    #[test]
    fn three_methods_agree_exhaustively_small() {
        for q in [3u64, 5] {
            let ctx = FieldCtx::new(q).unwrap();
            for d in [3usize, 4] {
                let engine = CurveEngine::new(&ctx, d, EngineOptions::all_methods()).unwrap();
                for f in enumerate_monic(&ctx, d, MonicFilter::Squarefree) {
                    let a = engine.l_polynomial(&f, LMethod::Newton).unwrap();
                    let b = engine.l_polynomial(&f, LMethod::CharSum).unwrap();
                    let c = engine.l_polynomial(&f, LMethod::PointCount).unwrap();
                    assert_eq!(a.coeffs(), b.coeffs(), "q={q} d={d} F={f}");
                    assert_eq!(a.coeffs(), c.coeffs(), "q={q} d={d} F={f}");
                }
            }
        }
    }

    #[test]
    fn even_degree_example_by_hand() {
        // F = X^4 + X^2 + X = X(X+2)(X^2+X+2) over F_3: affine counts
        // give N_1 = 4 + 2 = 6, so s_1 = 3 + 1 - 6 = -2 and P = 1+2u+3u^2.
        let ctx = f3();
        let engine = CurveEngine::new(&ctx, 4, EngineOptions::all_methods()).unwrap();
        let f = poly(&ctx, &[0, 1, 1, 0, 1]);
        for m in [LMethod::Newton, LMethod::CharSum, LMethod::PointCount] {
            let l = engine.l_polynomial(&f, m).unwrap();
            assert_eq!(l.coeffs(), &[1, 2, 3], "{m:?}");
            assert_eq!(l.class_number(), BigUint::from(6u32));
        }
    }

    #[test]
    fn explicit_formula_examples() {
        let ctx = f3();
        let engine = CurveEngine::new(&ctx, 3, EngineOptions::default()).unwrap();
        for coeffs in [[1u64, 2, 0, 1], [0, 2, 0, 1]] {
            let f = poly(&ctx, &coeffs);
            let l = engine.l_polynomial(&f, LMethod::Newton).unwrap();
            assert!(engine.explicit_formula_check(&f, &l, 1).unwrap());
        }
    }

    #[test]
    fn explicit_formula_delta_regression() {
        // Even degree: dropping the delta term leaves a mismatch of
        // exactly 1.
        let ctx = f3();
        let engine = CurveEngine::new(&ctx, 4, EngineOptions::default()).unwrap();
        let f = poly(&ctx, &[0, 1, 1, 0, 1]);
        let l = engine.l_polynomial(&f, LMethod::Newton).unwrap();
        assert!(engine.explicit_formula_check(&f, &l, 1).unwrap());
        let lam = crate::quadchar::lambda_char_sum(engine.symbols(), &f, 1).unwrap();
        let p1 = l.power_sum(1).unwrap();
        assert_eq!(-p1 - lam, 1);
    }

    #[test]
    fn explicit_formula_beyond_genus() {
        // Functional-equation redundancy: the identity extends to
        // n = g+1 using coefficients filled in by the functional
        // equation.
        let ctx = f3();
        let engine = CurveEngine::new(&ctx, 5, EngineOptions::default()).unwrap();
        for f in enumerate_monic(&ctx, 5, MonicFilter::Squarefree).take(40) {
            let l = engine.l_polynomial(&f, LMethod::Newton).unwrap();
            for n in 1..=engine.genus() + 1 {
                assert!(
                    engine.explicit_formula_check(&f, &l, n).unwrap(),
                    "F={f} n={n}"
                );
            }
        }
    }

    #[test]
    fn supersingular_double_root_curve() {
        // y^2 = x^5 - x over F_5: P(u) = (1 - 5u^2)^2.
        let ctx = FieldCtx::new(5).unwrap();
        let engine = CurveEngine::new(&ctx, 5, EngineOptions::all_methods()).unwrap();
        let f = poly(&ctx, &[0, 4, 0, 0, 0, 1]);
        for m in [LMethod::Newton, LMethod::PointCount] {
            let l = engine.l_polynomial(&f, m).unwrap();
            assert_eq!(l.coeffs(), &[1, 0, -10, 0, 25], "{m:?}");
        }
        let l = engine.l_polynomial(&f, LMethod::Newton).unwrap();
        assert!(rh_max_deviation(&l) < 1e-9);
    }

    #[test]
    fn rh_small_exhaustive() {
        let ctx = f3();
        for d in [3usize, 4] {
            let engine = CurveEngine::new(&ctx, d, EngineOptions::default()).unwrap();
            for f in enumerate_monic(&ctx, d, MonicFilter::Squarefree) {
                let l = engine.l_polynomial(&f, LMethod::Newton).unwrap();
                assert!(rh_max_deviation(&l) < 1e-6, "F={f}");
            }
        }
    }

    #[test]
    fn lambda_sum_matches_pointcount_power_sum() {
        // Cross-path oracle: -s_2 from point counting equals the n=2
        // Λ-sum (odd degree, no delta).
        let ctx = f3();
        let engine = CurveEngine::new(&ctx, 5, EngineOptions::all_methods()).unwrap();
        for f in enumerate_monic(&ctx, 5, MonicFilter::Squarefree).take(30) {
            let l = engine.l_polynomial(&f, LMethod::PointCount).unwrap();
            let lam = crate::quadchar::lambda_char_sum(engine.symbols(), &f, 2).unwrap();
            assert_eq!(-l.power_sum(2).unwrap(), lam, "F={f}");
        }
    }

    #[test]
    fn powers_table_matches_horner() {
        // The precomputed-powers fast path is an optimization only; it
        // must agree with direct Horner evaluation on every ring.
        let ctx = FieldCtx::new(5).unwrap();
        let opts = EngineOptions {
            with_pointcount: true,
            ..EngineOptions::default()
        };
        let engine = CurveEngine::new(&ctx, 7, opts).unwrap();
        for f in enumerate_monic(&ctx, 7, MonicFilter::Squarefree).take(25) {
            for counter in &engine.counters {
                let flat = counter.powers.as_ref().expect("small ring fits budget");
                assert_eq!(
                    counter.chi_sum_table(&ctx, &f, flat),
                    counter.chi_sum_horner(&ctx, &f),
                    "F={f} n={}",
                    counter.ring.degree()
                );
            }
        }
    }

    #[test]
    fn csv_row_shape() {
        let ctx = f3();
        let engine = CurveEngine::new(&ctx, 3, EngineOptions::default()).unwrap();
        let rec = engine.curve_record(&poly(&ctx, &[1, 2, 0, 1])).unwrap();
        let row = rec.csv_row();
        assert!(row.starts_with("3,3,1,\"1,2,0,1\",7,"));
        assert_eq!(CurveRecord::csv_header(1), "q,d,g,f,class_number,n_f,s_1");
        let cols: Vec<&str> = row.split(',').collect();
        // q,d,g + 4 quoted coeffs + h + n_f + s_1
        assert_eq!(cols.len(), 10);
    }

    #[test]
    fn one_off_helper_matches_engine() {
        let ctx = f3();
        let f = poly(&ctx, &[1, 2, 0, 1]);
        let l = l_polynomial(&ctx, &f, LMethod::PointCount).unwrap();
        assert_eq!(l.coeffs(), &[1, 3, 3]);
    }
}
