//! Exact arithmetic in `F_q` (q an odd prime) and `F_q[X]`, enumeration
//! of monic / squarefree / irreducible polynomials, and residue rings of
//! extension fields.
//!
//! Coefficients are machine integers reduced mod q. Everything here is
//! immutable after construction and safe to share across sweep workers.

mod enumerate;
mod poly;
mod residue;
mod sieve;

pub use enumerate::{
    enumerate_monic, enumerate_monic_range, index_of_monic, monic_count, monic_from_index,
    prime_count_exact, squarefree_count, MonicFilter, MonicIter,
};
pub use poly::FqPoly;
pub use residue::{ResidueRing, DEFAULT_SQUARES_BUDGET};
pub use sieve::MonicSieve;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FfieldError {
    #[error("modulus {0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("coefficient {coeff} out of range for F_{q}")]
    CoefficientRange { coeff: u64, q: u64 },
    #[error("division by zero polynomial")]
    DivisionByZero,
    #[error("polynomial text `{0}` is malformed: {1}")]
    Parse(String, String),
    #[error("table of {needed} entries exceeds budget of {budget}")]
    TableBudget { needed: u128, budget: u64 },
    #[error("modulus must be monic of degree >= 1")]
    BadModulus,
    #[error("enumeration space q^{n} too large for indexed iteration")]
    EnumerationTooLarge { n: usize },
}

/// The base field `F_q`. Validated once; all scalar arithmetic lives here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldCtx {
    q: u64,
}

impl FieldCtx {
    /// q must be an odd prime. Prime powers are reached through
    /// [`ResidueRing`], never as a base field.
    pub fn new(q: u64) -> Result<Self, FfieldError> {
        if q < 3 || q % 2 == 0 || !is_prime_u64(q) {
            return Err(FfieldError::NotOddPrime(q));
        }
        Ok(Self { q })
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.q
    }

    #[inline]
    pub(crate) fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub(crate) fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    pub(crate) fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub(crate) fn mul(&self, a: u64, b: u64) -> u64 {
        // q fits in 32 bits for every supported configuration, so the
        // product cannot overflow u64. Guarded in new() implicitly by use;
        // keep a debug check for safety.
        debug_assert!(self.q < (1 << 32));
        (a * b) % self.q
    }

    pub(crate) fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat.
    pub(crate) fn inv(&self, a: u64) -> u64 {
        debug_assert!(a != 0, "inverse of zero");
        self.pow(a, self.q - 2)
    }
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = 37u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// True iff `f` has no repeated irreducible factor.
///
/// If the formal derivative vanishes, `f` lies in `F_q[X^q]` and is a
/// q-th power, hence never squarefree; otherwise squarefree is
/// equivalent to `gcd(f, f') = 1`.
pub fn is_squarefree(ctx: &FieldCtx, f: &FqPoly) -> bool {
    debug_assert!(f.degree().is_some_and(|d| d >= 1));
    let fp = f.derivative(ctx);
    if fp.is_zero() {
        return false;
    }
    f.gcd(&fp, ctx).degree() == Some(0)
}

/// Rabin irreducibility test on a monic polynomial of degree >= 1.
///
/// `p` of degree n is irreducible iff `X^{q^n} == X (mod p)` and
/// `gcd(X^{q^{n/l}} - X, p) = 1` for every prime divisor l of n. The
/// Frobenius powers are computed by iterating `h -> h^q mod p`, which
/// keeps every exponent at q.
pub fn is_irreducible(ctx: &FieldCtx, p: &FqPoly) -> bool {
    let n = match p.degree() {
        Some(n) if n >= 1 => n,
        _ => return false,
    };
    debug_assert!(p.is_monic());
    if n == 1 {
        return true;
    }
    let x = FqPoly::x();
    // frob[k] = X^{q^k} mod p, built incrementally.
    let mut frob = x.clone();
    let mut powers = vec![x.clone()];
    for _ in 0..n {
        frob = frob.powmod(ctx.q() as u128, p, ctx);
        powers.push(frob.clone());
    }
    if powers[n] != x {
        return false;
    }
    for l in prime_divisors(n as u64) {
        let k = n / l as usize;
        let diff = powers[k].sub(&x, ctx);
        if p.gcd(&diff, ctx).degree() != Some(0) {
            return false;
        }
    }
    true
}

pub(crate) fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Moebius function for the small arguments used by the necklace formula.
pub(crate) fn moebius(n: u64) -> i64 {
    if n == 1 {
        return 1;
    }
    let mut m = n;
    let mut k = 0u32;
    let mut d = 2u64;
    while d * d <= m {
        if m % d == 0 {
            m /= d;
            if m % d == 0 {
                return 0;
            }
            k += 1;
        }
        d += 1;
    }
    if m > 1 {
        k += 1;
    }
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> FieldCtx {
        FieldCtx::new(3).unwrap()
    }

    #[test]
    fn ctx_rejects_non_odd_primes() {
        assert!(FieldCtx::new(2).is_err());
        assert!(FieldCtx::new(9).is_err());
        assert!(FieldCtx::new(15).is_err());
        assert!(FieldCtx::new(1).is_err());
        assert!(FieldCtx::new(3).is_ok());
        assert!(FieldCtx::new(101).is_ok());
        assert!(FieldCtx::new(1009).is_ok());
    }

    #[test]
    fn scalar_arithmetic() {
        let f = FieldCtx::new(7).unwrap();
        assert_eq!(f.add(5, 4), 2);
        assert_eq!(f.sub(2, 5), 4);
        assert_eq!(f.mul(3, 5), 1);
        assert_eq!(f.inv(3), 5);
        assert_eq!(f.pow(3, 6), 1);
        assert_eq!(f.neg(0), 0);
        assert_eq!(f.neg(2), 5);
    }

    #[test]
    fn squarefree_visible_square() {
        let ctx = f3();
        let x2 = FqPoly::from_coeffs(&ctx, vec![0, 0, 1]).unwrap();
        assert!(!is_squarefree(&ctx, &x2));
    }

    #[test]
    fn squarefree_x3_minus_x() {
        let ctx = f3();
        // X^3 - X = X(X-1)(X+1); derivative is -1 so gcd is 1.
        let f = FqPoly::from_coeffs(&ctx, vec![0, 2, 0, 1]).unwrap();
        assert!(is_squarefree(&ctx, &f));
    }

    #[test]
    fn squarefree_qth_power_branch() {
        let ctx = f3();
        // X^3 has zero derivative in characteristic 3.
        let f = FqPoly::from_coeffs(&ctx, vec![0, 0, 0, 1]).unwrap();
        assert_eq!(f.derivative(&ctx), FqPoly::zero());
        assert!(!is_squarefree(&ctx, &f));
    }

    #[test]
    fn irreducible_examples() {
        let ctx = f3();
        let x2_plus_1 = FqPoly::from_coeffs(&ctx, vec![1, 0, 1]).unwrap();
        assert!(is_irreducible(&ctx, &x2_plus_1));
        // X^2 + 2 = (X-1)(X+1)
        let x2_plus_2 = FqPoly::from_coeffs(&ctx, vec![2, 0, 1]).unwrap();
        assert!(!is_irreducible(&ctx, &x2_plus_2));
        assert!(is_irreducible(&ctx, &FqPoly::x()));
    }

    /// Brute-force irreducibility: a monic f of degree n is reducible iff
    /// some monic polynomial of degree in [1, n/2] divides it.
    fn irreducible_bruteforce(ctx: &FieldCtx, f: &FqPoly) -> bool {
        let n = f.degree().unwrap();
        if n == 1 {
            return true;
        }
        for d in 1..=n / 2 {
            for g in enumerate_monic(ctx, d, MonicFilter::All) {
                let (_, r) = f.divmod(&g, ctx).unwrap();
                if r.is_zero() {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn irreducible_matches_bruteforce_small_degrees() {
        for q in [3u64, 5] {
            let ctx = FieldCtx::new(q).unwrap();
            let max = if q == 3 { 4 } else { 3 };
            for n in 1..=max {
                for f in enumerate_monic(&ctx, n, MonicFilter::All) {
                    assert_eq!(
                        is_irreducible(&ctx, &f),
                        irreducible_bruteforce(&ctx, &f),
                        "q={q} f={f}"
                    );
                }
            }
        }
    }

    /// Squarefree via full factorization: trial-divide by enumerated
    /// irreducibles and look for a repeated factor.
    fn squarefree_by_factorization(ctx: &FieldCtx, f: &FqPoly) -> bool {
        let mut rest = f.clone();
        let n = f.degree().unwrap();
        for d in 1..=n {
            for p in enumerate_monic(ctx, d, MonicFilter::Irreducible) {
                let mut mult = 0;
                loop {
                    let (quo, rem) = rest.divmod(&p, ctx).unwrap();
                    if rem.is_zero() {
                        mult += 1;
                        rest = quo;
                    } else {
                        break;
                    }
                }
                if mult >= 2 {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn squarefree_matches_factorization_q3_deg_up_to_5() {
        let ctx = f3();
        for n in 1..=5 {
            for f in enumerate_monic(&ctx, n, MonicFilter::All) {
                assert_eq!(
                    is_squarefree(&ctx, &f),
                    squarefree_by_factorization(&ctx, &f),
                    "f={f}"
                );
            }
        }
    }

    #[test]
    fn moebius_small_values() {
        let expected = [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0];
        for (i, e) in expected.iter().enumerate() {
            assert_eq!(moebius(i as u64 + 1), *e, "n={}", i + 1);
        }
    }
}
