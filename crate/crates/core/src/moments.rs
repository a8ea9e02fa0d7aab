//! Analytic side: per-prime log weights `u_P, v_P`, the η/τ recursions,
//! the prime sums `h(λ)` with certified truncation tails, the limiting
//! moments `H(s)`, the large-q asymptotic, and the truncated
//! characteristic function φ(t).
//!
//! Every sum over primes is grouped by degree — `count(n) * term(q^n)` —
//! so the cost is O(D) per block regardless of q. Sums over distinct
//! prime tuples are evaluated by set-partition inclusion–exclusion:
//! direct distinct-tuple loops are infeasible beyond r = 2, while
//! Bell(10) = 115975 partitions caps s at 10.

use std::collections::HashMap;

use num_complex::Complex64;
use thiserror::Error;

use crate::ffield::{prime_count_exact, FieldCtx};
use crate::numeric::{u128_to_f64, Kahan};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MomentsError {
    #[error("moment order s = {0} out of range 1..=10")]
    SOutOfRange(usize),
    #[error("λ must be >= 1")]
    LambdaOutOfRange,
    #[error(
        "inequality {label} inconclusive at this truncation degree (margin {margin:e}); raise D"
    )]
    Inconclusive { label: String, margin: f64 },
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
}

/// Truncation context: primes of degree <= max_degree enter the sums
/// exactly (via exact per-degree counts); everything beyond contributes
/// only to the certified tail bounds.
#[derive(Debug, Clone)]
pub struct TruncationCtx {
    q: u64,
    max_degree: usize,
    prime_counts_exact: Vec<u128>,
    prime_counts: Vec<f64>,
}

impl TruncationCtx {
    pub fn new(ctx: &FieldCtx, max_degree: usize) -> Self {
        assert!(max_degree >= 1);
        let prime_counts_exact: Vec<u128> = (1..=max_degree)
            .map(|n| prime_count_exact(ctx, n))
            .collect();
        let prime_counts = prime_counts_exact.iter().map(|&c| u128_to_f64(c)).collect();
        Self {
            q: ctx.q(),
            max_degree,
            prime_counts_exact,
            prime_counts,
        }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn prime_count(&self, n: usize) -> f64 {
        self.prime_counts[n - 1]
    }

    pub fn prime_count_exact(&self, n: usize) -> u128 {
        self.prime_counts_exact[n - 1]
    }
}

/// `u_P = -log(1 - |P|^{-1})`, `v_P = log(1 + |P|^{-1})` for a prime of
/// the given degree; always `u > v > 0`.
pub fn u_v(p_degree: usize, q: u64) -> (f64, f64) {
    assert!(p_degree >= 1);
    let x = (q as f64).powi(-(p_degree as i32));
    (-(-x).ln_1p(), x.ln_1p())
}

/// η(λ), τ(λ): the even/odd-parity splits of the λ-fold product sum
/// over exponents. Computed by the recursion
/// `η(λ) = η(1)η(λ-1) + τ(1)τ(λ-1)`, `τ(λ) = η(1)τ(λ-1) + τ(1)η(λ-1)`
/// from η(0) = 1, τ(0) = 0; satisfies the closed form
/// `η(λ) = (u^λ + (-1)^λ v^λ)/2` and `η + τ = u^λ`.
pub fn eta_tau(lambda: usize, p_degree: usize, q: u64) -> (f64, f64) {
    let (u, v) = u_v(p_degree, q);
    // η(1) = (u - v)/2 = -log(1 - |P|^{-2})/2, τ(1) = (u + v)/2, both
    // formed stably.
    let x = (q as f64).powi(-(p_degree as i32));
    let eta1 = -(-x * x).ln_1p() / 2.0;
    let tau1 = (u + v) / 2.0;
    let (mut eta, mut tau) = (1.0f64, 0.0f64);
    for _ in 0..lambda {
        let next_eta = eta1 * eta + tau1 * tau;
        let next_tau = eta1 * tau + tau1 * eta;
        eta = next_eta;
        tau = next_tau;
    }
    (eta, tau)
}

/// A truncated value together with an upper bound on everything cut off.
/// All terms are positive, so `value` is a certified lower bound and
/// `value + tail_bound` a certified upper bound.
#[derive(Debug, Clone, Copy)]
pub struct HLambda {
    pub value: f64,
    pub tail_bound: f64,
}

/// `h(λ) = sum_P (u_P^λ + (-1)^λ v_P^λ)` over all monic irreducible P,
/// truncated at the context's degree.
///
/// The tail uses `pi_q(n) <= q^n/n` with `u <= 2x`, `v <= x` for even λ
/// and the pairing `u^λ - v^λ <= λ 2^λ x^{λ+1}` (from `u - v <= 2x^2`)
/// for odd λ; the latter is what makes λ = 1 converge.
pub fn h_lambda(lambda: usize, ctx: &TruncationCtx) -> Result<HLambda, MomentsError> {
    if lambda == 0 {
        return Err(MomentsError::LambdaOutOfRange);
    }
    let mut acc = Kahan::new();
    for n in 1..=ctx.max_degree {
        acc.add(ctx.prime_count(n) * pair_power(lambda, n, ctx.q));
    }
    Ok(HLambda {
        value: acc.value(),
        tail_bound: pair_tail(lambda, ctx),
    })
}

/// `u^λ + (-1)^λ v^λ` at a given prime degree, with the odd case formed
/// from the stable difference `u - v = -log(1 - x^2)`.
fn pair_power(lambda: usize, p_degree: usize, q: u64) -> f64 {
    let (u, v) = u_v(p_degree, q);
    if lambda % 2 == 0 {
        u.powi(lambda as i32) + v.powi(lambda as i32)
    } else {
        let x = (q as f64).powi(-(p_degree as i32));
        let diff = -(-x * x).ln_1p();
        // u^λ - v^λ = (u - v) * sum_{i} u^i v^{λ-1-i}
        let mut horner = 0.0;
        for i in 0..lambda {
            horner += u.powi(i as i32) * v.powi((lambda - 1 - i) as i32);
        }
        diff * horner
    }
}

/// Tail coefficient/exponent: the per-degree term is bounded by
/// `K x^E` with x = q^{-n}.
fn tail_k_e(lambda: usize) -> (f64, u32) {
    if lambda % 2 == 0 {
        (2.0 * 2f64.powi(lambda as i32), lambda as u32)
    } else {
        (lambda as f64 * 2f64.powi(lambda as i32), lambda as u32 + 1)
    }
}

fn pair_tail(lambda: usize, ctx: &TruncationCtx) -> f64 {
    let (k, e) = tail_k_e(lambda);
    k * geometric_tail(ctx.q, ctx.max_degree, e.saturating_sub(1).max(1))
}

/// `sum_{n > D} q^{-n e} / n <= q^{-(D+1)e} / ((D+1)(1 - q^{-e}))`.
fn geometric_tail(q: u64, max_degree: usize, e: u32) -> f64 {
    let qe = (q as f64).powi(-(e as i32));
    qe.powi(max_degree as i32 + 1) / ((max_degree as f64 + 1.0) * (1.0 - qe))
}

/// One moment of the limiting distribution, with its truncation tail and
/// the large-q comparator.
#[derive(Debug, Clone)]
pub struct MomentReport {
    pub s: usize,
    pub max_degree: usize,
    pub value: f64,
    pub tail_bound: f64,
    pub asymptotic_main: f64,
}

/// Large-q main term of H(s): zero for odd s, else the Gaussian moment
/// `s!/(2^{s/2} (s/2)!) * q^{-s/2}`.
pub fn h_asymptotic(s: usize, q: u64) -> f64 {
    assert!(s >= 1);
    if s % 2 == 1 {
        return 0.0;
    }
    let half = s / 2;
    factorial(s) / (2f64.powi(half as i32) * factorial(half)) * (q as f64).powi(-(half as i32))
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product::<f64>().max(1.0)
}

/// The s-th limiting moment
/// `H(s) = sum_{r=1}^{s} s!/(2^r r!) sum_{λ_1+..+λ_r = s, λ_i >= 1}
///  sum_{P_1 != .. != P_r} prod w_{λ_i}(P_i)`
/// with per-prime weight
/// `w_λ(P) = (u_P^λ + (-1)^λ v_P^λ) / (λ! (1 + |P|^{-1}))`.
///
/// The distinct-tuple sums are evaluated by set-partition
/// inclusion–exclusion over blocks of coinciding primes, each block sum
/// grouped by prime degree.
pub fn h_moment(s: usize, ctx: &TruncationCtx) -> Result<MomentReport, MomentsError> {
    if s == 0 || s > 10 {
        return Err(MomentsError::SOutOfRange(s));
    }
    let mut total = Kahan::new();
    let mut tail = 0.0f64;
    let mut memo: HashMap<Vec<u8>, (f64, f64)> = HashMap::new();
    let mut composition = Vec::new();
    for r in 1..=s {
        let prefactor = factorial(s) / (2f64.powi(r as i32) * factorial(r));
        let mut comp_value = Kahan::new();
        let mut comp_tail = 0.0f64;
        for_each_composition(s, r, &mut composition, &mut |lams: &[u8]| {
            let (v, t) = distinct_sum_real(lams, ctx, &mut memo);
            comp_value.add(v);
            comp_tail += t;
        });
        total.add(prefactor * comp_value.value());
        tail += prefactor * comp_tail;
    }
    Ok(MomentReport {
        s,
        max_degree: ctx.max_degree,
        value: total.value(),
        tail_bound: tail,
        asymptotic_main: h_asymptotic(s, ctx.q),
    })
}

/// Weight `w_λ(P)` at a prime degree.
fn weight(lambda: usize, p_degree: usize, q: u64) -> f64 {
    let x = (q as f64).powi(-(p_degree as i32));
    pair_power(lambda, p_degree, q) / (factorial(lambda) * (1.0 + x))
}

/// Distinct-tuple sum for slot parts `lams`, returning (value, tail).
/// `sum over partitions π of the slots: prod over blocks B of
/// (-1)^{|B|-1} (|B|-1)! * S_B` where `S_B = sum_P prod_{i in B} w_{λ_i}(P)`.
fn distinct_sum_real(
    lams: &[u8],
    ctx: &TruncationCtx,
    memo: &mut HashMap<Vec<u8>, (f64, f64)>,
) -> (f64, f64) {
    let r = lams.len();
    let mut value = Kahan::new();
    let mut tail = 0.0f64;
    for_each_partition(r, &mut |blocks: &[u8]| {
        let nblocks = (*blocks.iter().max().unwrap() + 1) as usize;
        let mut coef = 1.0f64;
        let mut prod_v = 1.0f64;
        let mut prod_hi = 1.0f64;
        for b in 0..nblocks {
            let mut key: Vec<u8> = (0..r)
                .filter(|&i| blocks[i] == b as u8)
                .map(|i| lams[i])
                .collect();
            key.sort_unstable();
            let size = key.len();
            let (bv, bt) = *memo
                .entry(key)
                .or_insert_with_key(|key| block_sum(key, ctx));
            coef *= sign_factorial(size);
            prod_v *= bv;
            prod_hi *= bv.abs() + bt;
        }
        value.add(coef * prod_v);
        tail += (prod_hi - prod_v.abs()).max(0.0);
    });
    (value.value(), tail)
}

/// `(-1)^{|B|-1} (|B|-1)!`.
fn sign_factorial(size: usize) -> f64 {
    let f = factorial(size - 1);
    if size % 2 == 0 {
        -f
    } else {
        f
    }
}

/// `S_B = sum_{deg P <= D} prod_{λ in B} w_λ(P)`, grouped by degree,
/// with its truncation tail.
fn block_sum(lams: &[u8], ctx: &TruncationCtx) -> (f64, f64) {
    let mut acc = Kahan::new();
    for n in 1..=ctx.max_degree {
        let mut prod = 1.0f64;
        for &lam in lams {
            prod *= weight(lam as usize, n, ctx.q);
        }
        acc.add(ctx.prime_count(n) * prod);
    }
    // Per-factor bound K x^E / λ! (the 1/(1+x) <= 1 is dropped); the
    // block tail is the geometric sum with the exponents added.
    let mut k_prod = 1.0f64;
    let mut e_sum = 0u32;
    for &lam in lams {
        let (k, e) = tail_k_e(lam as usize);
        k_prod *= k / factorial(lam as usize);
        e_sum += e;
    }
    let tail = k_prod * geometric_tail(ctx.q, ctx.max_degree, e_sum - 1);
    (acc.value(), tail)
}

/// Ordered compositions of s into r positive parts, visitor style.
fn for_each_composition(s: usize, r: usize, buf: &mut Vec<u8>, visit: &mut impl FnMut(&[u8])) {
    buf.clear();
    fn rec(remaining: usize, slots: usize, buf: &mut Vec<u8>, visit: &mut impl FnMut(&[u8])) {
        if slots == 1 {
            buf.push(remaining as u8);
            visit(buf);
            buf.pop();
            return;
        }
        for take in 1..=remaining - (slots - 1) {
            buf.push(take as u8);
            rec(remaining - take, slots - 1, buf, visit);
            buf.pop();
        }
    }
    if r <= s {
        rec(s, r, buf, visit);
    }
}

/// All set partitions of {0..r-1} as restricted-growth strings:
/// `blocks[i]` is the block label of slot i, labels first-seen in order.
fn for_each_partition(r: usize, visit: &mut impl FnMut(&[u8])) {
    let mut blocks = vec![0u8; r];
    fn rec(i: usize, max_used: u8, blocks: &mut Vec<u8>, visit: &mut impl FnMut(&[u8])) {
        if i == blocks.len() {
            visit(blocks);
            return;
        }
        for b in 0..=max_used + 1 {
            blocks[i] = b;
            rec(i + 1, max_used.max(b), blocks, visit);
        }
    }
    if r == 0 {
        return;
    }
    blocks[0] = 0;
    rec(1, 0, &mut blocks, visit);
}

/// Truncated characteristic function of the limiting distribution:
/// `φ(t) ~ 1 + sum_{r=1}^{r_cap} (1/r!) sum_{P_1 != .. != P_r}
///  prod_j g_{P_j}(t)` with per-prime factor
/// `g_P(t) = ((1-|P|^{-1})^{-it} + (1+|P|^{-1})^{-it} - 2) / (2(1+|P|^{-1}))`.
#[derive(Debug, Clone, Copy)]
pub struct CharfunValue {
    pub value: Complex64,
    /// Magnitude of the last included r-term; small means converged.
    pub last_term_magnitude: f64,
}

pub fn charfun_truncated(
    t: f64,
    ctx: &TruncationCtx,
    r_cap: usize,
) -> Result<CharfunValue, MomentsError> {
    if r_cap == 0 || r_cap > 12 {
        return Err(MomentsError::OutOfRange(format!("r_cap = {r_cap}")));
    }
    // Power sums S_k = sum_P g_P(t)^k, grouped by degree.
    let mut power_sums = vec![Complex64::new(0.0, 0.0); r_cap];
    for n in 1..=ctx.max_degree {
        let g = g_factor(t, n, ctx.q);
        let count = ctx.prime_count(n);
        let mut gk = Complex64::new(1.0, 0.0);
        for sk in power_sums.iter_mut() {
            gk *= g;
            *sk += count * gk;
        }
    }
    // Distinct-tuple sum for r identical slots via set partitions: a
    // block of size k contributes S_k.
    let mut value = Complex64::new(1.0, 0.0);
    let mut last = 0.0;
    for r in 1..=r_cap {
        let mut term = Complex64::new(0.0, 0.0);
        for_each_partition(r, &mut |blocks: &[u8]| {
            let nblocks = (*blocks.iter().max().unwrap() + 1) as usize;
            let mut prod = Complex64::new(1.0, 0.0);
            for b in 0..nblocks {
                let size = blocks.iter().filter(|&&x| x == b as u8).count();
                prod *= sign_factorial(size) * power_sums[size - 1];
            }
            term += prod;
        });
        let contribution = term / factorial(r);
        value += contribution;
        last = contribution.norm();
    }
    Ok(CharfunValue {
        value,
        last_term_magnitude: last,
    })
}

/// `g_P(t)` formed stably: `(1-x)^{-it} = e^{itu}`, `(1+x)^{-it} =
/// e^{-itv}`, and `e^{iθ} - 1 = -2 sin²(θ/2) + i sin θ`.
fn g_factor(t: f64, p_degree: usize, q: u64) -> Complex64 {
    let x = (q as f64).powi(-(p_degree as i32));
    let (u, v) = u_v(p_degree, q);
    let a = t * u;
    let b = -t * v;
    let re = -2.0 * (a / 2.0).sin().powi(2) - 2.0 * (b / 2.0).sin().powi(2);
    let im = a.sin() + b.sin();
    Complex64::new(re, im) / (2.0 * (1.0 + x))
}

/// One certified strict inequality `lhs < rhs`, with the outward-rounded
/// sides and the positive margin that separates them.
#[derive(Debug, Clone)]
pub struct InequalityMargin {
    pub label: String,
    pub lhs_upper: f64,
    pub rhs_lower: f64,
    pub margin: f64,
}

#[derive(Debug, Clone)]
pub struct LemmaReport {
    pub max_degree: usize,
    pub entries: Vec<InequalityMargin>,
}

/// Certified checks of the prime-sum inequalities:
/// `h(2+λ) < h(2) h(λ)` for 2 <= λ <= lambda_max, `h(3) < h(2)^{3/2}`,
/// `h(1) < h(2)^{1/2}`, and `h(1) h(3) < h(2)^2`.
///
/// Upper sides use value + tail, lower sides the truncated value, both
/// with outward rounding slack; errors if any margin fails to separate.
pub fn lemma_inequalities(
    ctx: &TruncationCtx,
    lambda_max: usize,
) -> Result<LemmaReport, MomentsError> {
    assert!(lambda_max >= 2);
    let h: Vec<HLambda> = (1..=lambda_max + 2)
        .map(|lam| h_lambda(lam, ctx))
        .collect::<Result<_, _>>()?;
    let lo = |i: usize| h[i - 1].value * (1.0 - 1e-12);
    let hi = |i: usize| (h[i - 1].value + h[i - 1].tail_bound) * (1.0 + 1e-12);
    let mut entries = Vec::new();
    let mut push = |label: String, lhs_upper: f64, rhs_lower: f64| {
        entries.push(InequalityMargin {
            label,
            lhs_upper,
            rhs_lower,
            margin: rhs_lower - lhs_upper,
        });
    };
    for lam in 2..=lambda_max {
        push(
            format!("h({}) < h(2)h({lam})", lam + 2),
            hi(lam + 2),
            lo(2) * lo(lam),
        );
    }
    push("h(3) < h(2)^{3/2}".into(), hi(3), lo(2).powf(1.5));
    push("h(1) < h(2)^{1/2}".into(), hi(1), lo(2).sqrt());
    push("h(1)h(3) < h(2)^2".into(), hi(1) * hi(3), lo(2) * lo(2));
    for e in &entries {
        if e.margin <= 0.0 {
            return Err(MomentsError::Inconclusive {
                label: e.label.clone(),
                margin: e.margin,
            });
        }
    }
    Ok(LemmaReport {
        max_degree: ctx.max_degree,
        entries,
    })
}

/// Reporter for the moment growth bound
/// `H(s) <= C (4 s log log s / (sqrt(q) log s))^s`, s >= 4: the absolute
/// constant is unspecified, so the ratio is printed, not asserted here.
#[derive(Debug, Clone)]
pub struct Prop2Report {
    pub s: usize,
    pub q: u64,
    pub h_value: f64,
    pub h_tail: f64,
    pub bracket: f64,
    pub ratio: f64,
}

pub fn prop2_bound_report(s: usize, ctx: &TruncationCtx) -> Result<Prop2Report, MomentsError> {
    if s < 4 {
        return Err(MomentsError::OutOfRange(format!(
            "prop2 needs s >= 4, got {s}"
        )));
    }
    let report = h_moment(s, ctx)?;
    let sf = s as f64;
    let bracket = (4.0 * sf * sf.ln().ln() / ((ctx.q as f64).sqrt() * sf.ln())).powi(s as i32);
    Ok(Prop2Report {
        s,
        q: ctx.q,
        h_value: report.value,
        h_tail: report.tail_bound,
        bracket,
        ratio: report.value / bracket,
    })
}
