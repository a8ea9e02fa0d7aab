//! Exhaustive sweeps and seeded Monte-Carlo sampling over the family of
//! monic squarefree degree-d polynomials, with streaming statistics:
//! moments of `N_F`, tail counters, an empirical CDF sketch of
//! `sqrt(q) N_F`, empirical characteristic function samples, and the
//! Lemma 2.1 / 2.2 averaging checks.
//!
//! Determinism contract: identical `SweepSummary` for identical config
//! and seed, independent of worker count. Work is cut into shards of a
//! fixed size (never derived from the thread count); each shard is
//! aggregated sequentially with compensated sums and the partials are
//! merged in shard order.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use crate::bounds::CurveVerifier;
use crate::ffield::{
    enumerate_monic, is_irreducible, is_squarefree, monic_count, monic_from_index,
    squarefree_count, FfieldError, FieldCtx, FqPoly, MonicFilter,
};
use crate::lfunc::{
    rh_max_deviation, CurveEngine, CurveRecord, EngineOptions, LMethod, LfuncError,
};
use crate::numeric::{fmt_f64, Kahan};
use crate::quadchar::legendre_symbol;

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("family degree must be >= 3, got {0}")]
    DegreeTooSmall(usize),
    #[error("exhaustive sweep over q^{d} = {needed} indices exceeds budget {budget}")]
    BudgetExceeded {
        d: usize,
        needed: u128,
        budget: u128,
    },
    #[error("invariant violated during sweep: {0}")]
    InvariantViolation(String),
    #[error("statistic not tracked by this summary: {0}")]
    StatNotTracked(String),
    #[error("summary is empty")]
    EmptySummary,
    #[error("{0} is not monic squarefree")]
    BadModulus(FqPoly),
    #[error(transparent)]
    Lfunc(#[from] LfuncError),
    #[error(transparent)]
    Ffield(#[from] FfieldError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    Exhaustive,
    Sample { count: u64 },
}

/// Root-modulus tolerance for the per-curve zero-location check.
pub const RH_TOLERANCE: f64 = 1e-6;

/// Histogram support for `sqrt(q) N_F`. Values outside are clamped into
/// the edge bins; the interior CDF evaluation stays exact.
pub const HIST_RANGE: (f64, f64) = (-8.0, 8.0);

/// Fixed shard sizes (index count per unit of parallel work). These are
/// part of the reproducibility contract: results must not depend on the
/// worker count, so shard boundaries never do either.
const EXHAUSTIVE_SHARD: u64 = 1 << 14;
const SAMPLE_SHARD: u64 = 1 << 10;

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub q: u64,
    pub d: usize,
    pub mode: SweepMode,
    pub rng_seed: u64,
    pub worker_count: usize,
    /// Highest tracked moment of N_F.
    pub r_max: usize,
    pub psi_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    pub cdf_bins: usize,
    pub method: LMethod,
    pub rh_check: bool,
    pub collect_records: bool,
    pub max_exhaustive: u128,
}

impl SweepConfig {
    pub fn new(q: u64, d: usize) -> Self {
        Self {
            q,
            d,
            mode: SweepMode::Exhaustive,
            rng_seed: 0,
            worker_count: 8,
            r_max: 4,
            psi_grid: vec![1.0, 2.0, 3.0, 4.0],
            t_grid: vec![0.5, 1.0, 2.0],
            cdf_bins: 512,
            method: LMethod::Newton,
            rh_check: true,
            collect_records: false,
            max_exhaustive: 1 << 27,
        }
    }
}

/// Streaming aggregates over a family sweep. Mergeable monoid; merge
/// order is fixed by the caller.
#[derive(Debug, Clone)]
pub struct SweepSummary {
    pub q: u64,
    pub d: usize,
    pub genus: usize,
    pub mode: SweepMode,
    pub rng_seed: u64,
    pub count: u64,
    r_max: usize,
    moment_sums: Vec<Kahan>,
    psi_grid: Vec<f64>,
    tail_counts: Vec<u64>,
    t_grid: Vec<f64>,
    charfun_re: Vec<Kahan>,
    charfun_im: Vec<Kahan>,
    cdf_bins: usize,
    histogram: Vec<u64>,
    pub min_nf: f64,
    pub max_nf: f64,
}

impl SweepSummary {
    fn new(cfg: &SweepConfig, genus: usize) -> Self {
        Self {
            q: cfg.q,
            d: cfg.d,
            genus,
            mode: cfg.mode,
            rng_seed: cfg.rng_seed,
            count: 0,
            r_max: cfg.r_max,
            moment_sums: vec![Kahan::new(); cfg.r_max],
            psi_grid: cfg.psi_grid.clone(),
            tail_counts: vec![0; cfg.psi_grid.len()],
            t_grid: cfg.t_grid.clone(),
            charfun_re: vec![Kahan::new(); cfg.t_grid.len()],
            charfun_im: vec![Kahan::new(); cfg.t_grid.len()],
            cdf_bins: cfg.cdf_bins,
            histogram: vec![0; cfg.cdf_bins],
            min_nf: f64::INFINITY,
            max_nf: f64::NEG_INFINITY,
        }
    }

    fn observe(&mut self, n_f: f64) {
        self.count += 1;
        let mut power = 1.0f64;
        for acc in self.moment_sums.iter_mut() {
            power *= n_f;
            acc.add(power);
        }
        for (i, &psi) in self.psi_grid.iter().enumerate() {
            if n_f.abs() >= psi {
                self.tail_counts[i] += 1;
            }
        }
        for (i, &t) in self.t_grid.iter().enumerate() {
            let (s, c) = (t * n_f).sin_cos();
            self.charfun_re[i].add(c);
            self.charfun_im[i].add(s);
        }
        let scaled = (self.q as f64).sqrt() * n_f;
        let (lo, hi) = HIST_RANGE;
        let w = (hi - lo) / self.cdf_bins as f64;
        let bin = (((scaled - lo) / w).floor() as i64).clamp(0, self.cdf_bins as i64 - 1);
        self.histogram[bin as usize] += 1;
        self.min_nf = self.min_nf.min(n_f);
        self.max_nf = self.max_nf.max(n_f);
    }

    /// Folds another partial in; call in fixed shard order.
    fn merge(&mut self, other: &SweepSummary) {
        self.count += other.count;
        for (a, b) in self.moment_sums.iter_mut().zip(&other.moment_sums) {
            a.merge(b);
        }
        for (a, b) in self.tail_counts.iter_mut().zip(&other.tail_counts) {
            *a += b;
        }
        for (a, b) in self.charfun_re.iter_mut().zip(&other.charfun_re) {
            a.merge(b);
        }
        for (a, b) in self.charfun_im.iter_mut().zip(&other.charfun_im) {
            a.merge(b);
        }
        for (a, b) in self.histogram.iter_mut().zip(&other.histogram) {
            *a += b;
        }
        self.min_nf = self.min_nf.min(other.min_nf);
        self.max_nf = self.max_nf.max(other.max_nf);
    }

    /// `<N_F^r>` for r <= r_max (r = 0 is 1 by convention).
    pub fn empirical_moment(&self, r: usize) -> Result<f64, FamilyError> {
        if r == 0 {
            return Ok(1.0);
        }
        if r > self.r_max {
            return Err(FamilyError::StatNotTracked(format!(
                "moment r={r} > r_max={}",
                self.r_max
            )));
        }
        if self.count == 0 {
            return Err(FamilyError::EmptySummary);
        }
        Ok(self.moment_sums[r - 1].value() / self.count as f64)
    }

    /// `#{F : |N_F| >= psi}` for a grid value.
    pub fn tail_count(&self, psi: f64) -> Result<u64, FamilyError> {
        if psi == 0.0 {
            return Ok(self.count);
        }
        self.psi_grid
            .iter()
            .position(|&p| p == psi)
            .map(|i| self.tail_counts[i])
            .ok_or_else(|| FamilyError::StatNotTracked(format!("psi={psi}")))
    }

    /// Tail comparison value `exp(-(psi/2) log(q log psi))`, defined for
    /// psi > 1 (the tail bound itself is stated for psi >= 2).
    pub fn tail_reference(&self, psi: f64) -> f64 {
        if psi <= 1.0 {
            return f64::NAN;
        }
        (-(psi / 2.0) * (self.q as f64 * psi.ln()).ln()).exp()
    }

    /// `<e^{i t N_F}>` for a grid value.
    pub fn empirical_charfun(&self, t: f64) -> Result<Complex64, FamilyError> {
        if self.count == 0 {
            return Err(FamilyError::EmptySummary);
        }
        let i = self
            .t_grid
            .iter()
            .position(|&x| x == t)
            .ok_or_else(|| FamilyError::StatNotTracked(format!("t={t}")))?;
        Ok(Complex64::new(
            self.charfun_re[i].value() / self.count as f64,
            self.charfun_im[i].value() / self.count as f64,
        ))
    }

    /// Sup-distance between the empirical CDF of `sqrt(q) N_F`
    /// (evaluated at the histogram bin edges) and the standard normal
    /// CDF. Resolution error is at most the bin width times the peak
    /// normal density, ~6.4/cdf_bins for the default range.
    pub fn ks_statistic(&self) -> Result<f64, FamilyError> {
        if self.count == 0 {
            return Err(FamilyError::EmptySummary);
        }
        let normal = Normal::new(0.0, 1.0).expect("valid");
        let (lo, hi) = HIST_RANGE;
        let w = (hi - lo) / self.cdf_bins as f64;
        let n = self.count as f64;
        let mut cum = 0u64;
        let mut ks = 0.0f64;
        for i in 0..=self.cdf_bins {
            let edge = lo + w * i as f64;
            let emp = cum as f64 / n;
            ks = ks.max((emp - normal.cdf(edge)).abs());
            if i < self.cdf_bins {
                cum += self.histogram[i];
            }
        }
        Ok(ks)
    }

    pub fn r_max(&self) -> usize {
        self.r_max
    }

    pub fn psi_grid(&self) -> &[f64] {
        &self.psi_grid
    }

    pub fn t_grid(&self) -> &[f64] {
        &self.t_grid
    }

    pub fn histogram(&self) -> &[u64] {
        &self.histogram
    }

    /// Key/value view of every statistic, in fixed order; the CSV and
    /// JSON emitters are thin wrappers over this.
    pub fn key_values(&self) -> Vec<(String, String)> {
        let mut kv: Vec<(String, String)> = vec![
            ("q".into(), self.q.to_string()),
            ("d".into(), self.d.to_string()),
            ("genus".into(), self.genus.to_string()),
            (
                "mode".into(),
                match self.mode {
                    SweepMode::Exhaustive => "exhaustive".into(),
                    SweepMode::Sample { .. } => "sample".into(),
                },
            ),
            ("seed".into(), self.rng_seed.to_string()),
            ("count".into(), self.count.to_string()),
            ("min_nf".into(), fmt_f64(self.min_nf)),
            ("max_nf".into(), fmt_f64(self.max_nf)),
        ];
        for r in 1..=self.r_max {
            kv.push((
                format!("moment_{r}"),
                fmt_f64(self.empirical_moment(r).unwrap_or(f64::NAN)),
            ));
        }
        for (i, &psi) in self.psi_grid.iter().enumerate() {
            kv.push((format!("tail_count_{psi}"), self.tail_counts[i].to_string()));
            kv.push((
                format!("tail_ratio_{psi}"),
                fmt_f64(self.tail_counts[i] as f64 / self.count.max(1) as f64),
            ));
            kv.push((
                format!("tail_reference_{psi}"),
                fmt_f64(self.tail_reference(psi)),
            ));
        }
        for &t in &self.t_grid {
            let v = self
                .empirical_charfun(t)
                .unwrap_or(Complex64::new(f64::NAN, f64::NAN));
            kv.push((format!("charfun_re_{t}"), fmt_f64(v.re)));
            kv.push((format!("charfun_im_{t}"), fmt_f64(v.im)));
        }
        kv.push((
            "ks".into(),
            fmt_f64(self.ks_statistic().map_or(f64::NAN, |k| k)),
        ));
        kv.push(("hist_lo".into(), fmt_f64(HIST_RANGE.0)));
        kv.push(("hist_hi".into(), fmt_f64(HIST_RANGE.1)));
        kv.push(("hist_bins".into(), self.cdf_bins.to_string()));
        for (i, &c) in self.histogram.iter().enumerate() {
            kv.push((format!("hist_{i}"), c.to_string()));
        }
        kv
    }

    /// One `key,value` row per statistic.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("key,value\n");
        for (k, v) in self.key_values() {
            out.push_str(&k);
            out.push(',');
            out.push_str(&v);
            out.push('\n');
        }
        out
    }
}

pub struct SweepOutput {
    pub summary: SweepSummary,
    /// Present when `collect_records` is set; enumeration order within
    /// each shard, shards concatenated in index order.
    pub records: Option<Vec<CurveRecord>>,
}

/// Visits every monic squarefree F of the configured degree exactly once
/// (exhaustive) or draws seeded rejection samples (sample mode), folding
/// each curve into the summary. Weil and the N = 2 bound are hard
/// assertions per curve, as are the power-sum bound `s_n^2 <= 4g^2 q^n`
/// and (when enabled) the root-modulus check.
pub fn sweep(cfg: &SweepConfig) -> Result<SweepOutput, FamilyError> {
    if cfg.d < 3 {
        return Err(FamilyError::DegreeTooSmall(cfg.d));
    }
    let ctx = FieldCtx::new(cfg.q)?;
    let opts = match cfg.method {
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
    let engine = CurveEngine::new(&ctx, cfg.d, opts)?;
    let verifier = CurveVerifier::new(engine.genus() as u64, cfg.q);

    let (total, shard_size) = match cfg.mode {
        SweepMode::Exhaustive => {
            let needed = monic_count(&ctx, cfg.d);
            if needed > cfg.max_exhaustive {
                return Err(FamilyError::BudgetExceeded {
                    d: cfg.d,
                    needed,
                    budget: cfg.max_exhaustive,
                });
            }
            (needed as u64, EXHAUSTIVE_SHARD)
        }
        SweepMode::Sample { count } => (count, SAMPLE_SHARD),
    };
    let shards: Vec<(u64, u64)> = (0..total)
        .step_by(shard_size as usize)
        .map(|start| (start, (start + shard_size).min(total)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.worker_count.max(1))
        .build()
        .expect("thread pool");
    let results: Vec<Result<(SweepSummary, Vec<CurveRecord>), FamilyError>> = pool.install(|| {
        shards
            .par_iter()
            .map(|&(start, end)| process_shard(cfg, &ctx, &engine, &verifier, start..end))
            .collect()
    });

    let mut summary = SweepSummary::new(cfg, engine.genus());
    let mut records = cfg.collect_records.then(Vec::new);
    for res in results {
        let (partial, recs) = res?;
        summary.merge(&partial);
        if let Some(out) = records.as_mut() {
            out.extend(recs);
        }
    }
    if let SweepMode::Exhaustive = cfg.mode {
        let expected = squarefree_count(&ctx, cfg.d);
        if summary.count as u128 != expected {
            return Err(FamilyError::InvariantViolation(format!(
                "exhaustive count {} != q^d - q^(d-1) = {expected}",
                summary.count
            )));
        }
    }
    Ok(SweepOutput { summary, records })
}

fn process_shard(
    cfg: &SweepConfig,
    ctx: &FieldCtx,
    engine: &CurveEngine,
    verifier: &CurveVerifier,
    range: std::ops::Range<u64>,
) -> Result<(SweepSummary, Vec<CurveRecord>), FamilyError> {
    let mut partial = SweepSummary::new(cfg, engine.genus());
    let mut records = Vec::new();
    match cfg.mode {
        SweepMode::Exhaustive => {
            for idx in range {
                let f = monic_from_index(ctx, cfg.d, idx);
                if !is_squarefree(ctx, &f) {
                    continue;
                }
                process_curve(cfg, engine, verifier, &f, &mut partial, &mut records)?;
            }
        }
        SweepMode::Sample { .. } => {
            for sample_idx in range {
                let f = draw_squarefree(ctx, cfg, sample_idx);
                process_curve(cfg, engine, verifier, &f, &mut partial, &mut records)?;
            }
        }
    }
    Ok((partial, records))
}

/// Uniform monic squarefree draw: the sample's substream is indexed by
/// its number (same polynomial regardless of sharding), rejection on the
/// squarefree test with acceptance probability 1 - 1/q.
fn draw_squarefree(ctx: &FieldCtx, cfg: &SweepConfig, sample_idx: u64) -> FqPoly {
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.rng_seed);
    rng.set_stream(sample_idx.wrapping_add(1));
    loop {
        let mut coeffs: Vec<u64> = (0..cfg.d).map(|_| rng.random_range(0..cfg.q)).collect();
        coeffs.push(1);
        let f = FqPoly::from_coeffs(ctx, coeffs).expect("residues in range");
        if is_squarefree(ctx, &f) {
            return f;
        }
    }
}

fn process_curve(
    cfg: &SweepConfig,
    engine: &CurveEngine,
    verifier: &CurveVerifier,
    f: &FqPoly,
    partial: &mut SweepSummary,
    records: &mut Vec<CurveRecord>,
) -> Result<(), FamilyError> {
    let l = engine.l_polynomial(f, cfg.method)?;
    let g = engine.genus() as i128;
    for (n, &s) in l.power_sums().iter().enumerate() {
        let bound = 4 * g * g * (cfg.q as i128).pow(n as u32 + 1);
        if (s as i128) * (s as i128) > bound {
            return Err(FamilyError::InvariantViolation(format!(
                "power sum bound: s_{}^2 = {} > 4g^2 q^n for F={f}",
                n + 1,
                (s as i128) * (s as i128)
            )));
        }
    }
    let rec = CurveRecord {
        f: f.clone(),
        q: cfg.q,
        d: cfg.d,
        genus: engine.genus(),
        class_number: l.class_number(),
        n_f: l.nf_statistic(),
        power_sums: l.power_sums().to_vec(),
    };
    let verdict = verifier.verify(&rec);
    if !verdict.is_pass() {
        return Err(FamilyError::InvariantViolation(format!(
            "F={f}: {verdict:?}"
        )));
    }
    if cfg.rh_check {
        let dev = rh_max_deviation(&l);
        if dev > RH_TOLERANCE {
            return Err(FamilyError::InvariantViolation(format!(
                "root modulus deviation {dev:e} > {RH_TOLERANCE:e} for F={f}"
            )));
        }
    }
    partial.observe(rec.n_f);
    if cfg.collect_records {
        records.push(rec);
    }
    Ok(())
}

/// Lemma 2.1 check for a quadratic character modulo an irreducible f:
/// `|<(·/f)>| <= 2^{deg f - 1} / ((1 - q^{-1}) q^{d/2})`, equivalently
/// `sum^2 <= 4^{deg f - 1} q^d` over the squarefree family — an exact
/// integer comparison, no slack.
#[derive(Debug, Clone)]
pub struct Lemma21Report {
    pub f: FqPoly,
    pub q: u64,
    pub d: usize,
    pub sum: i64,
    pub count: u64,
    pub average: f64,
    pub bound: f64,
    pub holds: bool,
}

pub fn lemma21_check(ctx: &FieldCtx, d: usize, f: &FqPoly) -> Result<Lemma21Report, FamilyError> {
    if d < 3 {
        return Err(FamilyError::DegreeTooSmall(d));
    }
    if !f.is_monic() || !is_irreducible(ctx, f) {
        return Err(FamilyError::BadModulus(f.clone()));
    }
    let deg_f = f.degree().expect("nonzero");
    let mut sum = 0i64;
    let mut count = 0u64;
    for big_f in enumerate_monic(ctx, d, MonicFilter::Squarefree) {
        sum += legendre_symbol(ctx, &big_f, f) as i64;
        count += 1;
    }
    let q = ctx.q();
    let bound =
        2f64.powi(deg_f as i32 - 1) / ((1.0 - 1.0 / q as f64) * (q as f64).powf(d as f64 / 2.0));
    let holds =
        (sum as i128) * (sum as i128) <= 4i128.pow(deg_f as u32 - 1) * (q as i128).pow(d as u32);
    Ok(Lemma21Report {
        f: f.clone(),
        q,
        d,
        sum,
        count,
        average: sum as f64 / count as f64,
        bound,
        holds,
    })
}

/// Lemma 2.2 reporter: coprimality density vs the main term
/// `prod_{P | h} (1 + |P|^{-1})^{-1}`, with the deviation normalized by
/// `q^{-d/2} sigma(h)`. The implied constant is unspecified, so callers
/// assert only the sanity bound (<= 10 across the test grid).
#[derive(Debug, Clone)]
pub struct Lemma22Report {
    pub h: FqPoly,
    pub q: u64,
    pub d: usize,
    pub coprime_count: u64,
    pub count: u64,
    pub density: f64,
    pub main_term: f64,
    pub sigma: u64,
    pub normalized_deviation: f64,
}

pub fn lemma22_check(ctx: &FieldCtx, d: usize, h: &FqPoly) -> Result<Lemma22Report, FamilyError> {
    if d < 3 {
        return Err(FamilyError::DegreeTooSmall(d));
    }
    let deg_h = h
        .degree()
        .ok_or_else(|| FamilyError::BadModulus(h.clone()))?;
    if !h.is_monic() || (deg_h >= 1 && !is_squarefree(ctx, h)) {
        return Err(FamilyError::BadModulus(h.clone()));
    }
    // Factor h over the enumerated primes (h is small and squarefree).
    let mut prime_degrees = Vec::new();
    let mut rest = h.clone();
    for n in 1..=deg_h {
        if rest.degree() == Some(0) {
            break;
        }
        for p in enumerate_monic(ctx, n, MonicFilter::Irreducible) {
            let (quo, rem) = rest.divmod(&p, ctx)?;
            if rem.is_zero() {
                prime_degrees.push(n);
                rest = quo;
            }
        }
    }
    debug_assert_eq!(rest.degree(), Some(0));
    let mut coprime_count = 0u64;
    let mut count = 0u64;
    for f in enumerate_monic(ctx, d, MonicFilter::Squarefree) {
        count += 1;
        if deg_h == 0 || f.gcd(h, ctx).degree() == Some(0) {
            coprime_count += 1;
        }
    }
    let q = ctx.q() as f64;
    let main_term: f64 = prime_degrees
        .iter()
        .map(|&n| 1.0 / (1.0 + q.powi(-(n as i32))))
        .product();
    let sigma = 1u64 << prime_degrees.len();
    let density = coprime_count as f64 / count as f64;
    let normalized_deviation = (density - main_term).abs() * q.powf(d as f64 / 2.0) / sigma as f64;
    Ok(Lemma22Report {
        h: h.clone(),
        q: ctx.q(),
        d,
        coprime_count,
        count,
        density,
        main_term,
        sigma,
        normalized_deviation,
    })
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
    fn exhaustive_counts() {
        let out = sweep(&SweepConfig::new(3, 3)).unwrap();
        assert_eq!(out.summary.count, 18);
        let out = sweep(&SweepConfig::new(3, 5)).unwrap();
        assert_eq!(out.summary.count, 162);
    }

    #[test]
    fn budget_enforced() {
        let mut cfg = SweepConfig::new(3, 5);
        cfg.max_exhaustive = 10;
        assert!(matches!(
            sweep(&cfg),
            Err(FamilyError::BudgetExceeded { .. })
        ));
        assert!(matches!(
            sweep(&SweepConfig::new(3, 2)),
            Err(FamilyError::DegreeTooSmall(2))
        ));
    }

    #[test]
    fn sample_mode_deterministic() {
        let mut cfg = SweepConfig::new(3, 5);
        cfg.mode = SweepMode::Sample { count: 100 };
        cfg.rng_seed = 42;
        let a = sweep(&cfg).unwrap().summary;
        let b = sweep(&cfg).unwrap().summary;
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.count, 100);
        // A different seed gives a different aggregate.
        cfg.rng_seed = 43;
        let c = sweep(&cfg).unwrap().summary;
        assert_ne!(a.to_csv(), c.to_csv());
    }

    #[test]
    fn worker_count_does_not_change_output() {
        for mode in [SweepMode::Exhaustive, SweepMode::Sample { count: 200 }] {
            let mut cfg = SweepConfig::new(3, 5);
            cfg.mode = mode;
            cfg.rng_seed = 7;
            let csvs: Vec<String> = [1usize, 3, 8]
                .iter()
                .map(|&w| {
                    let mut c = cfg.clone();
                    c.worker_count = w;
                    sweep(&c).unwrap().summary.to_csv()
                })
                .collect();
            assert_eq!(csvs[0], csvs[1]);
            assert_eq!(csvs[0], csvs[2]);
        }
    }

    #[test]
    fn moment_accessors() {
        let out = sweep(&SweepConfig::new(3, 5)).unwrap().summary;
        assert_eq!(out.empirical_moment(0).unwrap(), 1.0);
        let m1 = out.empirical_moment(1).unwrap();
        let m2 = out.empirical_moment(2).unwrap();
        assert!(m2 >= m1 * m1); // variance >= 0
        assert!(out.empirical_moment(5).is_err());
    }

    #[test]
    fn tail_counts_monotone() {
        let mut cfg = SweepConfig::new(3, 5);
        cfg.psi_grid = vec![0.5, 1.0, 2.0, 1000.0];
        let s = sweep(&cfg).unwrap().summary;
        assert_eq!(s.tail_count(0.0).unwrap(), s.count);
        let counts: Vec<u64> = cfg
            .psi_grid
            .iter()
            .map(|&p| s.tail_count(p).unwrap())
            .collect();
        for w in counts.windows(2) {
            assert!(w[0] >= w[1]);
        }
        assert_eq!(*counts.last().unwrap(), 0); // Thm 1 caps |N_F| far below 1000
        assert!(s.tail_count(9.9).is_err());
    }

    #[test]
    fn charfun_accessors() {
        let mut cfg = SweepConfig::new(3, 5);
        cfg.t_grid = vec![0.0, 0.5, -0.5];
        let s = sweep(&cfg).unwrap().summary;
        let at0 = s.empirical_charfun(0.0).unwrap();
        assert!((at0 - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        // Conjugate symmetry: value at -t is the conjugate of value at t.
        let plus = s.empirical_charfun(0.5).unwrap();
        let minus = s.empirical_charfun(-0.5).unwrap();
        assert!((plus.conj() - minus).norm() < 1e-12);
        assert!(plus.norm() <= 1.0 + 1e-12);
        assert!(s.empirical_charfun(2.5).is_err());
    }

    #[test]
    fn charfun_matches_moment_expansion_internally() {
        // |<e^{itN}> - sum_{r<=4} (it)^r <N^r>/r!| <= |t|^5 max|N|^5/120.
        let mut cfg = SweepConfig::new(3, 5);
        cfg.t_grid = vec![0.1];
        let s = sweep(&cfg).unwrap().summary;
        let t = 0.1f64;
        let phi = s.empirical_charfun(t).unwrap();
        let mut expansion = Complex64::new(1.0, 0.0);
        let mut it_pow = Complex64::new(1.0, 0.0);
        for r in 1..=4usize {
            it_pow *= Complex64::new(0.0, t);
            let fact: f64 = (1..=r).map(|i| i as f64).product();
            expansion += it_pow * s.empirical_moment(r).unwrap() / fact;
        }
        let maxn = s.min_nf.abs().max(s.max_nf.abs());
        let budget = t.powi(5) * maxn.powi(5) / 120.0;
        assert!((phi - expansion).norm() <= budget);
    }

    #[test]
    fn ks_all_mass_at_zero_is_half() {
        let mut s = SweepSummary::new(&SweepConfig::new(3, 5), 2);
        for _ in 0..100 {
            s.observe(0.0);
        }
        assert!((s.ks_statistic().unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ks_within_unit_interval() {
        let s = sweep(&SweepConfig::new(3, 5)).unwrap().summary;
        let ks = s.ks_statistic().unwrap();
        assert!((0.0..=1.0).contains(&ks));
    }

    #[test]
    fn empty_summary_errors() {
        let s = SweepSummary::new(&SweepConfig::new(3, 5), 2);
        assert!(matches!(s.ks_statistic(), Err(FamilyError::EmptySummary)));
        assert!(matches!(
            s.empirical_moment(1),
            Err(FamilyError::EmptySummary)
        ));
    }

    #[test]
    fn records_follow_enumeration_order() {
        let mut cfg = SweepConfig::new(3, 3);
        cfg.collect_records = true;
        let out = sweep(&cfg).unwrap();
        let records = out.records.unwrap();
        assert_eq!(records.len(), 18);
        let expected: Vec<FqPoly> = enumerate_monic(&f3(), 3, MonicFilter::Squarefree).collect();
        let got: Vec<FqPoly> = records.iter().map(|r| r.f.clone()).collect();
        assert_eq!(got, expected);
        // Known class numbers appear for the two worked curves.
        let rec = records
            .iter()
            .find(|r| r.f == poly(&f3(), &[1, 2, 0, 1]))
            .unwrap();
        assert_eq!(rec.class_number, 7u32.into());
    }

    #[test]
    fn sample_and_exhaustive_agree_on_pointcount_method() {
        // Tiny cross-method sanity: the sweep works with the pointcount
        // engine too and produces the same exhaustive aggregate.
        let mut newton = SweepConfig::new(3, 4);
        newton.rh_check = false;
        let mut pc = newton.clone();
        pc.method = LMethod::PointCount;
        let a = sweep(&newton).unwrap().summary;
        let b = sweep(&pc).unwrap().summary;
        assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn lemma21_linear_modulus_q3_d3() {
        // Bound = 1/((2/3) 3^{3/2}) = 0.2887; the signed sum over the 18
        // squarefree cubics is exactly 0.
        let ctx = f3();
        let rep = lemma21_check(&ctx, 3, &FqPoly::x()).unwrap();
        assert_eq!(rep.count, 18);
        assert_eq!(rep.sum, 0);
        assert!(rep.holds);
        assert!((rep.bound - 0.2886751345948129).abs() < 1e-12);
    }

    #[test]
    fn lemma21_quadratic_modulus_q3_d5() {
        let ctx = f3();
        let rep = lemma21_check(&ctx, 5, &poly(&ctx, &[1, 0, 1])).unwrap();
        assert!((rep.bound - 2.0 / ((2.0 / 3.0) * 3f64.powf(2.5))).abs() < 1e-12);
        assert!(rep.holds, "sum={}", rep.sum);
    }

    #[test]
    fn lemma21_grid_holds() {
        let ctx = f3();
        for d in [3usize, 4, 5] {
            for deg in 1..=2usize {
                for f in enumerate_monic(&ctx, deg, MonicFilter::Irreducible) {
                    let rep = lemma21_check(&ctx, d, &f).unwrap();
                    assert!(rep.holds, "d={d} f={f} sum={}", rep.sum);
                }
            }
        }
    }

    #[test]
    fn lemma21_rejects_reducible_modulus() {
        let ctx = f3();
        assert!(matches!(
            lemma21_check(&ctx, 3, &poly(&ctx, &[2, 0, 1])),
            Err(FamilyError::BadModulus(_))
        ));
    }

    #[test]
    fn character_orthogonality_over_all_monic() {
        // Regression for the squarefree restriction: over ALL monic F of
        // degree d the average of (F/X) is 0 exactly (full character
        // sum), so a broken family filter would still sum to zero here
        // while Lemma 2.1 is about the squarefree subfamily.
        let ctx = f3();
        let x = FqPoly::x();
        for d in [3usize, 4, 5] {
            let mut sum = 0i64;
            for f in enumerate_monic(&ctx, d, MonicFilter::All) {
                sum += legendre_symbol(&ctx, &f, &x) as i64;
            }
            assert_eq!(sum, 0, "d={d}");
        }
    }

    #[test]
    fn lemma22_examples() {
        let ctx = f3();
        // h = X at d = 5: main term (1 + 1/3)^{-1} = 0.75.
        let rep = lemma22_check(&ctx, 5, &FqPoly::x()).unwrap();
        assert!((rep.main_term - 0.75).abs() < 1e-15);
        assert_eq!(rep.sigma, 2);
        assert!(rep.normalized_deviation <= 10.0);
        // h = X(X+1): main term (4/3)^{-2} = 0.5625.
        let h = FqPoly::x().mul(&poly(&ctx, &[1, 1]), &ctx);
        let rep = lemma22_check(&ctx, 5, &h).unwrap();
        assert!((rep.main_term - 0.5625).abs() < 1e-15);
        assert_eq!(rep.sigma, 4);
        assert!(rep.normalized_deviation <= 10.0);
        // h = 1: empty product, density exactly 1, deviation 0.
        let rep = lemma22_check(&ctx, 5, &FqPoly::one()).unwrap();
        assert_eq!(rep.density, 1.0);
        assert_eq!(rep.main_term, 1.0);
        assert_eq!(rep.normalized_deviation, 0.0);
        // Non-squarefree h rejected.
        assert!(lemma22_check(&ctx, 5, &poly(&ctx, &[0, 0, 1])).is_err());
    }

    #[test]
    fn csv_shape() {
        let s = sweep(&SweepConfig::new(3, 3)).unwrap().summary;
        let csv = s.to_csv();
        assert!(csv.starts_with("key,value\n"));
        assert!(csv.contains("count,18\n"));
        assert!(csv.contains("moment_1,"));
        assert!(csv.contains("ks,"));
        // header + 8 scalars + 4 moments + 3*4 psi + 2*3 t + 1 ks + 3 hist meta + 512 bins
        assert_eq!(csv.lines().count(), 1 + 8 + 4 + 12 + 6 + 1 + 3 + 512);
    }
}
