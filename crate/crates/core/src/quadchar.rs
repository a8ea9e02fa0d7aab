//! Quadratic residue symbols `(F/P)` in `F_q[X]`, the infinite-place
//! convention for monic F, and Λ-weighted character sums.
//!
//! Sweeps evaluate millions of symbols against a fixed set of small
//! primes, so the cache front-loads a square-membership table per prime
//! (reduction + lookup per symbol); primes whose tables would blow the
//! entry budget fall back to an Euler-criterion powmod.

use thiserror::Error;

use crate::ffield::{enumerate_monic, is_irreducible, FieldCtx, FqPoly, MonicFilter, ResidueRing};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuadcharError {
    #[error("symbol cache covers prime degrees <= {max}, requested {requested}")]
    DegreeOutOfRange { max: usize, requested: usize },
}

/// Default cap on the total number of cached table entries across all
/// primes (sum of q^deg per tabled prime).
pub const DEFAULT_SYMBOL_TABLE_BUDGET: u64 = 1 << 26;

/// Quadratic residue symbol `(f/p)` for `p` monic irreducible:
/// 0 if p | f, +1 if `f mod p` is a nonzero square in the residue field,
/// -1 otherwise.
pub fn legendre_symbol(ctx: &FieldCtx, f: &FqPoly, p: &FqPoly) -> i8 {
    debug_assert!(
        is_irreducible(ctx, p),
        "legendre_symbol modulus must be irreducible"
    );
    let r = f.rem(p, ctx).expect("p nonzero");
    euler_symbol(ctx, &r, p)
}

/// Euler criterion on an already-reduced residue:
/// `r^{(|p| - 1)/2}` is the constant 1 on nonzero squares, -1 otherwise.
fn euler_symbol(ctx: &FieldCtx, r: &FqPoly, p: &FqPoly) -> i8 {
    if r.is_zero() {
        return 0;
    }
    let n = p.degree().expect("nonzero modulus") as u32;
    let e = ((ctx.q() as u128).pow(n) - 1) / 2;
    let pow = r.powmod(e, p, ctx);
    debug_assert_eq!(
        pow.degree(),
        Some(0),
        "Euler criterion must give a constant"
    );
    if pow.coeff(0) == 1 {
        1
    } else {
        -1
    }
}

/// `(f/p)^k`, the symbol at the prime power `p^k`.
pub fn char_prime_power(symbol: i8, k: u32) -> i8 {
    match symbol {
        0 => 0,
        1 => 1,
        _ => {
            if k % 2 == 0 {
                1
            } else {
                -1
            }
        }
    }
}

/// Value of `(F/∞)` for monic F: 1 when `deg F` is even (the infinite
/// place splits), 0 when odd (it ramifies).
pub fn infinite_place_value(f: &FqPoly) -> u8 {
    debug_assert!(f.is_monic());
    match f.degree() {
        Some(d) if d % 2 == 0 => 1,
        _ => 0,
    }
}

struct CachedPrime {
    ring: ResidueRing,
}

/// Immutable per-(q, degree-bound) cache of primes and their symbol
/// tables. Build once, share across sweep workers.
pub struct SymbolTableCache {
    ctx: FieldCtx,
    max_prime_deg: usize,
    by_degree: Vec<Vec<CachedPrime>>,
}

impl SymbolTableCache {
    pub fn build(ctx: &FieldCtx, max_prime_deg: usize, table_entry_budget: u64) -> Self {
        let mut by_degree = Vec::with_capacity(max_prime_deg);
        let mut budget_left = table_entry_budget;
        for n in 1..=max_prime_deg {
            let size = (ctx.q() as u128).pow(n as u32);
            let mut row = Vec::new();
            for p in enumerate_monic(ctx, n, MonicFilter::Irreducible) {
                let with_table = size <= budget_left as u128;
                if with_table {
                    budget_left -= size as u64;
                }
                let ring = ResidueRing::new(ctx, p, with_table, u64::MAX)
                    .expect("monic irreducible modulus");
                row.push(CachedPrime { ring });
            }
            by_degree.push(row);
        }
        Self {
            ctx: *ctx,
            max_prime_deg,
            by_degree,
        }
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn max_prime_degree(&self) -> usize {
        self.max_prime_deg
    }

    pub fn prime_count(&self, deg: usize) -> usize {
        self.by_degree[deg - 1].len()
    }

    pub fn prime(&self, deg: usize, pos: usize) -> &FqPoly {
        self.by_degree[deg - 1][pos].ring.modulus()
    }

    /// Symbol `(f / P)` for the cached prime identified by
    /// (degree, position). `scratch` is a caller-owned buffer reused
    /// across calls to keep the hot path allocation-free.
    pub fn symbol_with_scratch(
        &self,
        f: &FqPoly,
        deg: usize,
        pos: usize,
        scratch: &mut Vec<u64>,
    ) -> i8 {
        let cached = &self.by_degree[deg - 1][pos];
        let idx = rem_index(&self.ctx, f, cached.ring.modulus(), scratch);
        match cached.ring.quadratic_char_index(idx) {
            Some(s) => s,
            None => euler_symbol(
                &self.ctx,
                &cached.ring.residue_from_index(idx),
                cached.ring.modulus(),
            ),
        }
    }

    pub fn symbol(&self, f: &FqPoly, deg: usize, pos: usize) -> i8 {
        let mut scratch = Vec::new();
        self.symbol_with_scratch(f, deg, pos, &mut scratch)
    }

    /// Symbols of `f` against every prime of a given degree, in prime
    /// enumeration order.
    pub fn symbols_of_degree(&self, f: &FqPoly, deg: usize, out: &mut Vec<i8>) {
        let mut scratch = Vec::new();
        out.clear();
        for pos in 0..self.prime_count(deg) {
            out.push(self.symbol_with_scratch(f, deg, pos, &mut scratch));
        }
    }

    #[cfg(test)]
    fn ring(&self, deg: usize, pos: usize) -> &ResidueRing {
        &self.by_degree[deg - 1][pos].ring
    }
}

/// Remainder of `f` by a monic divisor, returned as the digit index of
/// the residue. In-place on the scratch buffer; no allocation once the
/// buffer has grown to deg f + 1.
fn rem_index(ctx: &FieldCtx, f: &FqPoly, p: &FqPoly, scratch: &mut Vec<u64>) -> u64 {
    let pd = p.degree().expect("nonzero modulus");
    let fc = f.coeffs();
    let q = ctx.q();
    if fc.len() <= pd {
        let mut idx = 0u64;
        for j in (0..pd).rev() {
            idx = idx * q + f.coeff(j);
        }
        return idx;
    }
    scratch.clear();
    scratch.extend_from_slice(fc);
    let pc = p.coeffs();
    for k in (pd..fc.len()).rev() {
        let factor = scratch[k];
        if factor == 0 {
            continue;
        }
        scratch[k] = 0;
        for (j, &b) in pc[..pd].iter().enumerate() {
            if b != 0 {
                scratch[k - pd + j] = ctx.sub(scratch[k - pd + j], ctx.mul(factor, b));
            }
        }
    }
    let mut idx = 0u64;
    for j in (0..pd).rev() {
        idx = idx * q + scratch[j];
    }
    idx
}

/// The Λ-weighted character sum `sum_{deg f = n} Λ(f) (F/f)` over monic
/// prime powers `f = P^k` with `k deg P = n` (Λ vanishes on everything
/// else, so no composite f is ever visited). The infinite-place
/// contribution is *not* included; callers add it per parity.
pub fn lambda_char_sum(
    cache: &SymbolTableCache,
    f: &FqPoly,
    n: usize,
) -> Result<i64, QuadcharError> {
    lambda_char_sum_with_scratch(cache, f, n, &mut Vec::new())
}

pub fn lambda_char_sum_with_scratch(
    cache: &SymbolTableCache,
    f: &FqPoly,
    n: usize,
    scratch: &mut Vec<u64>,
) -> Result<i64, QuadcharError> {
    if n == 0 || n > cache.max_prime_deg {
        return Err(QuadcharError::DegreeOutOfRange {
            max: cache.max_prime_deg,
            requested: n,
        });
    }
    let mut total = 0i64;
    for m in 1..=n {
        if n % m != 0 {
            continue;
        }
        let k = (n / m) as u32;
        let mut degree_sum = 0i64;
        for pos in 0..cache.prime_count(m) {
            let s = cache.symbol_with_scratch(f, m, pos, scratch);
            degree_sum += char_prime_power(s, k) as i64;
        }
        total += m as i64 * degree_sum;
    }
    Ok(total)
}
