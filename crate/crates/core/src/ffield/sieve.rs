//! Smallest-prime-factor sieve over monic polynomials, degree by degree.
//!
//! Gives every composite monic polynomial a factorization step
//! `f = P * (f/P)` with P its least prime factor in enumeration order,
//! which lets multiplicative functions be tabulated over all monic f of
//! bounded degree in one linear pass. Prime lists per degree fall out of
//! the same construction.

use super::enumerate::{index_of_monic, monic_count, monic_count_u64, monic_from_index};
use super::{FfieldError, FieldCtx, FqPoly};

const UNMARKED: u8 = u8::MAX;

#[derive(Debug, Clone, Copy)]
struct SpfEntry {
    /// Degree of the least prime factor; 0 marks the polynomial itself
    /// prime.
    prime_deg: u8,
    /// Position of that prime within its degree's prime list.
    prime_pos: u32,
    /// Enumeration index of the cofactor `f / P`.
    cof_idx: u32,
}

/// Factorization step for a composite monic polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorStep {
    pub prime_deg: usize,
    pub prime_pos: usize,
    pub cofactor_deg: usize,
    pub cofactor_idx: u64,
}

pub struct MonicSieve {
    ctx: FieldCtx,
    max_deg: usize,
    spf: Vec<Vec<SpfEntry>>,
    primes: Vec<Vec<u64>>,
}

impl MonicSieve {
    /// Sieves all monic polynomials of degree 1..=max_deg. The total
    /// table size `sum q^n` must stay within `entry_budget`.
    pub fn build(ctx: &FieldCtx, max_deg: usize, entry_budget: u64) -> Result<Self, FfieldError> {
        let total: u128 = (1..=max_deg).map(|n| monic_count(ctx, n)).sum();
        if total > entry_budget as u128 {
            return Err(FfieldError::TableBudget {
                needed: total,
                budget: entry_budget,
            });
        }
        let mut spf: Vec<Vec<SpfEntry>> = Vec::with_capacity(max_deg);
        let mut primes: Vec<Vec<u64>> = Vec::with_capacity(max_deg);
        for n in 1..=max_deg {
            let count = monic_count_u64(ctx, n);
            let mut marks = vec![
                SpfEntry {
                    prime_deg: UNMARKED,
                    prime_pos: 0,
                    cof_idx: 0
                };
                count as usize
            ];
            // Mark composites with their least prime factor. Iterating
            // prime degrees ascending and positions ascending means the
            // first prime to reach f is its smallest factor. Every
            // composite of degree n has a prime factor of degree <= n/2.
            for a in 1..n {
                for (pos, &p_idx) in primes[a - 1].iter().enumerate() {
                    let p = monic_from_index(ctx, a, p_idx);
                    let cof_count = monic_count_u64(ctx, n - a);
                    for m_idx in 0..cof_count {
                        let m = monic_from_index(ctx, n - a, m_idx);
                        let f = p.mul(&m, ctx);
                        let fi = index_of_monic(ctx, &f) as usize;
                        if marks[fi].prime_deg == UNMARKED {
                            marks[fi] = SpfEntry {
                                prime_deg: a as u8,
                                prime_pos: pos as u32,
                                cof_idx: m_idx as u32,
                            };
                        }
                    }
                }
            }
            let mut degree_primes = Vec::new();
            for (idx, mark) in marks.iter_mut().enumerate() {
                if mark.prime_deg == UNMARKED {
                    mark.prime_deg = 0;
                    mark.prime_pos = degree_primes.len() as u32;
                    degree_primes.push(idx as u64);
                }
            }
            spf.push(marks);
            primes.push(degree_primes);
        }
        Ok(Self {
            ctx: *ctx,
            max_deg,
            spf,
            primes,
        })
    }

    pub fn max_degree(&self) -> usize {
        self.max_deg
    }

    /// Enumeration indices of the monic irreducibles of degree n.
    pub fn prime_indices(&self, n: usize) -> &[u64] {
        &self.primes[n - 1]
    }

    pub fn prime_poly(&self, n: usize, pos: usize) -> FqPoly {
        monic_from_index(&self.ctx, n, self.primes[n - 1][pos])
    }

    pub fn is_prime(&self, n: usize, idx: u64) -> bool {
        self.spf[n - 1][idx as usize].prime_deg == 0
    }

    /// Position within the degree's prime list, for prime inputs.
    pub fn prime_position(&self, n: usize, idx: u64) -> Option<usize> {
        let e = self.spf[n - 1][idx as usize];
        (e.prime_deg == 0).then_some(e.prime_pos as usize)
    }

    /// Least-prime-factor step for composite inputs, `None` for primes.
    pub fn factor_step(&self, n: usize, idx: u64) -> Option<FactorStep> {
        let e = self.spf[n - 1][idx as usize];
        if e.prime_deg == 0 {
            return None;
        }
        Some(FactorStep {
            prime_deg: e.prime_deg as usize,
            prime_pos: e.prime_pos as usize,
            cofactor_deg: n - e.prime_deg as usize,
            cofactor_idx: e.cof_idx as u64,
        })
    }
}
