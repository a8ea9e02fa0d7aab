//! Small numeric utilities shared across modules: compensated summation,
//! logarithms of big integers, and the fixed float text format used by
//! every CSV writer.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

/// Kahan–Babuška compensated accumulator.
///
/// Sweeps add up millions of signed, near-cancelling terms; a plain f64
/// accumulator loses digits long before the tolerances in play here.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another accumulator in. Merge order must be fixed by the
    /// caller for reproducible results.
    pub fn merge(&mut self, other: &Kahan) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Natural logarithm of a positive big integer.
///
/// Splits `n = m * 2^shift` with `m` carrying the top 64 bits, so the
/// result has full f64 relative accuracy even when `n` itself would
/// overflow a double. Never converts `n` to a finite float directly.
pub fn ln_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    assert!(bits > 0, "ln of zero");
    if bits <= 63 {
        return (n.to_u64().expect("fits u64") as f64).ln();
    }
    let shift = bits - 64;
    let mantissa = (n >> shift).to_u64().expect("top 64 bits fit u64");
    (mantissa as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Lossy conversion used where exact counts feed analytic formulas.
pub fn u128_to_f64(n: u128) -> f64 {
    n as f64
}

/// Canonical float formatting: 17 significant digits, scientific.
/// Deterministic across runs, round-trips to the same f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{:.16e}", x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use num_traits::One;

    #[test]
    fn kahan_cancelling_sum() {
        let mut k = Kahan::new();
        for _ in 0..1_000_000 {
            k.add(0.1);
            k.add(-0.1);
        }
        k.add(1.0);
        assert_eq!(k.value(), 1.0);
    }

    #[test]
    fn kahan_merge_matches_sequential() {
        let vals: Vec<f64> = (0..1000)
            .map(|i| ((i * 37) % 101) as f64 * 1e-7 - 2.5e-6)
            .collect();
        let mut all = Kahan::new();
        for v in &vals {
            all.add(*v);
        }
        let mut a = Kahan::new();
        let mut b = Kahan::new();
        for v in &vals[..500] {
            a.add(*v);
        }
        for v in &vals[500..] {
            b.add(*v);
        }
        let mut merged = a;
        merged.merge(&b);
        assert!((merged.value() - all.value()).abs() < 1e-18);
    }

    #[test]
    fn ln_biguint_small_matches_f64() {
        let n = BigUint::from(7u32);
        assert!((ln_biguint(&n) - 7f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn ln_biguint_huge_power_of_two() {
        // ln(2^200) = 200 ln 2; 2^200 exceeds every u64 but not f64 range,
        // and the decomposition must stay exact regardless.
        let n = BigUint::one() << 200;
        let expected = 200.0 * std::f64::consts::LN_2;
        assert!((ln_biguint(&n) - expected).abs() / expected < 1e-15);
    }

    #[test]
    fn ln_biguint_relative_accuracy() {
        // 3^120: compare against 120 ln 3.
        let n = BigUint::from(3u32).pow(120);
        let expected = 120.0 * 3f64.ln();
        assert!((ln_biguint(&n) - expected).abs() / expected < 1e-14);
    }

    #[test]
    fn fmt_f64_17_digits_round_trip() {
        for &x in &[0.1, 1.0 / 3.0, 7f64.ln(), 1.2345678901234567e-9] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x, "{s}");
        }
    }
}
