//! Indexed enumeration of monic polynomials and exact prime counting.
//!
//! The index order is part of the public contract: index `i` in
//! `[0, q^n)` maps to `X^n + sum c_j X^j` where `c_j` is the j-th base-q
//! digit of `i` (so `c_0` varies fastest). Parallel sharding and
//! reproducible output both rely on this fixed total order.

use super::{is_irreducible, is_squarefree, moebius, FfieldError, FieldCtx, FqPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonicFilter {
    All,
    Squarefree,
    Irreducible,
}

/// Number of monic polynomials of degree n, i.e. `q^n`.
pub fn monic_count(ctx: &FieldCtx, n: usize) -> u128 {
    (ctx.q() as u128).pow(n as u32)
}

/// `#{monic squarefree of degree d}`: `q^d - q^{d-1}` for d >= 2, q for
/// d = 1 (every monic linear polynomial is squarefree).
pub fn squarefree_count(ctx: &FieldCtx, d: usize) -> u128 {
    let q = ctx.q() as u128;
    match d {
        0 => 1,
        1 => q,
        _ => q.pow(d as u32) - q.pow(d as u32 - 1),
    }
}

/// Exact count of monic irreducibles of degree n via the Moebius /
/// necklace formula `(1/n) * sum_{m|n} mu(m) q^{n/m}`.
pub fn prime_count_exact(ctx: &FieldCtx, n: usize) -> u128 {
    assert!(n >= 1);
    let q = ctx.q() as i128;
    let mut total: i128 = 0;
    for m in 1..=n as u64 {
        if n as u64 % m != 0 {
            continue;
        }
        let mu = moebius(m) as i128;
        if mu == 0 {
            continue;
        }
        total += mu * q.pow((n as u64 / m) as u32);
    }
    debug_assert!(total > 0 && total % n as i128 == 0);
    (total / n as i128) as u128
}

/// Monic polynomial of degree n at enumeration index `idx`.
pub fn monic_from_index(ctx: &FieldCtx, n: usize, mut idx: u64) -> FqPoly {
    let q = ctx.q();
    let mut coeffs = Vec::with_capacity(n + 1);
    for _ in 0..n {
        coeffs.push(idx % q);
        idx /= q;
    }
    debug_assert_eq!(idx, 0, "index out of range for degree {n}");
    coeffs.push(1);
    FqPoly::from_raw(coeffs)
}

/// Inverse of [`monic_from_index`]; requires a monic polynomial of
/// degree n with `q^n` representable in u64.
pub fn index_of_monic(ctx: &FieldCtx, f: &FqPoly) -> u64 {
    debug_assert!(f.is_monic());
    let n = f.degree().expect("nonzero");
    let q = ctx.q();
    let mut idx = 0u64;
    for j in (0..n).rev() {
        idx = idx * q + f.coeff(j);
    }
    idx
}

/// Iterator over the filtered monic polynomials of degree n within an
/// index sub-range, in index order.
pub struct MonicIter {
    ctx: FieldCtx,
    n: usize,
    filter: MonicFilter,
    next: u64,
    end: u64,
}

impl Iterator for MonicIter {
    type Item = FqPoly;

    fn next(&mut self) -> Option<FqPoly> {
        while self.next < self.end {
            let f = monic_from_index(&self.ctx, self.n, self.next);
            self.next += 1;
            let keep = match self.filter {
                MonicFilter::All => true,
                MonicFilter::Squarefree => is_squarefree(&self.ctx, &f),
                MonicFilter::Irreducible => is_irreducible(&self.ctx, &f),
            };
            if keep {
                return Some(f);
            }
        }
        None
    }
}

/// Full enumeration of degree-n monic polynomials under `filter`.
pub fn enumerate_monic(ctx: &FieldCtx, n: usize, filter: MonicFilter) -> MonicIter {
    enumerate_monic_range(ctx, n, filter, 0..monic_count_u64(ctx, n))
        .expect("full range always valid")
}

/// Sub-range enumeration for parallel sharding. The range is over raw
/// indices in `[0, q^n)`; filtered items are yielded in index order.
pub fn enumerate_monic_range(
    ctx: &FieldCtx,
    n: usize,
    filter: MonicFilter,
    range: std::ops::Range<u64>,
) -> Result<MonicIter, FfieldError> {
    if monic_count(ctx, n) > u64::MAX as u128 {
        return Err(FfieldError::EnumerationTooLarge { n });
    }
    Ok(MonicIter {
        ctx: *ctx,
        n,
        filter,
        next: range.start,
        end: range.end.min(monic_count_u64(ctx, n)),
    })
}

pub(crate) fn monic_count_u64(ctx: &FieldCtx, n: usize) -> u64 {
    let c = monic_count(ctx, n);
    debug_assert!(c <= u64::MAX as u128);
    c as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> FieldCtx {
        FieldCtx::new(3).unwrap()
    }

    #[test]
    fn degree_one_all() {
        let ctx = f3();
        let all: Vec<FqPoly> = enumerate_monic(&ctx, 1, MonicFilter::All).collect();
        assert_eq!(all.len(), 3);
        assert_eq!(all[0], FqPoly::x());
        assert_eq!(all[1], FqPoly::from_coeffs(&ctx, vec![1, 1]).unwrap());
        assert_eq!(all[2], FqPoly::from_coeffs(&ctx, vec![2, 1]).unwrap());
    }

    #[test]
    fn squarefree_cubics_count() {
        let ctx = f3();
        let n = enumerate_monic(&ctx, 3, MonicFilter::Squarefree).count();
        assert_eq!(n, 18);
        assert_eq!(squarefree_count(&ctx, 3), 18);
    }

    #[test]
    fn irreducible_quadratics_count() {
        let ctx = f3();
        let irr: Vec<FqPoly> = enumerate_monic(&ctx, 2, MonicFilter::Irreducible).collect();
        assert_eq!(irr.len(), 3);
    }

    #[test]
    fn squarefree_count_matches_enumeration() {
        for q in [3u64, 5] {
            let ctx = FieldCtx::new(q).unwrap();
            let dmax = if q == 3 { 7 } else { 5 };
            for d in 2..=dmax {
                let counted = enumerate_monic(&ctx, d, MonicFilter::Squarefree).count() as u128;
                assert_eq!(counted, squarefree_count(&ctx, d), "q={q} d={d}");
            }
        }
    }

    #[test]
    fn prime_count_examples() {
        let ctx = f3();
        assert_eq!(prime_count_exact(&ctx, 1), 3);
        assert_eq!(prime_count_exact(&ctx, 3), 8);
        assert_eq!(prime_count_exact(&ctx, 4), 18);
    }

    #[test]
    fn prime_count_matches_enumeration() {
        for q in [3u64, 5] {
            let ctx = FieldCtx::new(q).unwrap();
            let nmax = if q == 3 { 6 } else { 4 };
            for n in 1..=nmax {
                let counted = enumerate_monic(&ctx, n, MonicFilter::Irreducible).count() as u128;
                assert_eq!(counted, prime_count_exact(&ctx, n), "q={q} n={n}");
            }
        }
    }

    #[test]
    fn degree_weighted_prime_count_identity() {
        // sum_{m|n} m * pi_q(m) = q^n.
        for q in [3u64, 5] {
            let ctx = FieldCtx::new(q).unwrap();
            for n in 1..=8usize {
                let mut total: u128 = 0;
                for m in 1..=n {
                    if n % m == 0 {
                        total += m as u128 * prime_count_exact(&ctx, m);
                    }
                }
                assert_eq!(total, monic_count(&ctx, n), "q={q} n={n}");
            }
        }
    }

    #[test]
    fn index_round_trip() {
        let ctx = FieldCtx::new(5).unwrap();
        for n in 1..=4 {
            for idx in 0..monic_count_u64(&ctx, n) {
                let f = monic_from_index(&ctx, n, idx);
                assert!(f.is_monic());
                assert_eq!(f.degree(), Some(n));
                assert_eq!(index_of_monic(&ctx, &f), idx);
            }
        }
    }

    #[test]
    fn range_iteration_skips_correctly() {
        let ctx = f3();
        let full: Vec<FqPoly> = enumerate_monic(&ctx, 3, MonicFilter::Squarefree).collect();
        let lo: Vec<FqPoly> = enumerate_monic_range(&ctx, 3, MonicFilter::Squarefree, 0..13)
            .unwrap()
            .collect();
        let hi: Vec<FqPoly> = enumerate_monic_range(&ctx, 3, MonicFilter::Squarefree, 13..27)
            .unwrap()
            .collect();
        let glued: Vec<FqPoly> = lo.into_iter().chain(hi).collect();
        assert_eq!(glued, full);
    }
}
