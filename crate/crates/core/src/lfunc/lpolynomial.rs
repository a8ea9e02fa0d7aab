//! The L-polynomial type and the Newton-identity conversions between
//! power sums and coefficients.

use num_bigint::BigUint;

use super::LfuncError;
use crate::numeric::ln_biguint;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn of_degree(d: usize) -> Self {
        if d % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// The delta term contributed by `f = ∞^n` in the explicit formula:
    /// 1 for even degree (split infinite place), 0 for odd (ramified).
    pub fn delta(self) -> i64 {
        match self {
            Parity::Even => 1,
            Parity::Odd => 0,
        }
    }
}

/// The numerator `P_C(u) = prod (1 - alpha_i u)` of the zeta function of
/// a curve: exact integer coefficients `a_0..a_{2g}` with `a_0 = 1`,
/// satisfying the functional equation `a_{2g-n} = q^{g-n} a_n`. Power
/// sums `s_n = sum alpha_i^n` for n <= g are cached at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LPolynomial {
    q: u64,
    genus: usize,
    parity: Parity,
    coeffs: Vec<i64>,
    power_sums: Vec<i64>,
}

impl LPolynomial {
    /// Validates the structural invariants and caches power sums.
    pub fn from_coeffs(
        q: u64,
        genus: usize,
        parity: Parity,
        coeffs: Vec<i64>,
    ) -> Result<Self, LfuncError> {
        if coeffs.len() != 2 * genus + 1 {
            return Err(LfuncError::Structure(format!(
                "expected {} coefficients, got {}",
                2 * genus + 1,
                coeffs.len()
            )));
        }
        if coeffs[0] != 1 {
            return Err(LfuncError::Structure(format!("a_0 = {} != 1", coeffs[0])));
        }
        for n in 0..=genus {
            let lhs = coeffs[2 * genus - n] as i128;
            let rhs = (q as i128).pow((genus - n) as u32) * coeffs[n] as i128;
            if lhs != rhs {
                return Err(LfuncError::Structure(format!(
                    "functional equation fails at n={n}: a_{} = {} != q^{} * a_{n} = {}",
                    2 * genus - n,
                    lhs,
                    genus - n,
                    rhs
                )));
            }
        }
        let at_one: i128 = coeffs.iter().map(|&a| a as i128).sum();
        if at_one < 1 {
            return Err(LfuncError::Structure(format!("P(1) = {at_one} < 1")));
        }
        let power_sums = power_sums_from_coeffs(&coeffs, genus)?;
        Ok(Self {
            q,
            genus,
            parity,
            coeffs,
            power_sums,
        })
    }

    /// Builds the polynomial from the power sums `s_1..s_g` of its
    /// inverse roots via the Newton recursion
    /// `n a_n = -sum_{k=1}^{n} s_k a_{n-k}`, filling `a_{g+1}..a_{2g}`
    /// from the functional equation. Every division must be exact — an
    /// inexact one signals a bug upstream and aborts, never rounds.
    pub fn from_power_sums(
        q: u64,
        genus: usize,
        parity: Parity,
        sums: &[i64],
    ) -> Result<Self, LfuncError> {
        assert_eq!(sums.len(), genus);
        let mut a = vec![0i128; 2 * genus + 1];
        a[0] = 1;
        for n in 1..=genus {
            let mut acc: i128 = 0;
            for k in 1..=n {
                acc += sums[k - 1] as i128 * a[n - k];
            }
            if acc % n as i128 != 0 {
                return Err(LfuncError::InexactNewton { n, numerator: -acc });
            }
            a[n] = -acc / n as i128;
        }
        for m in genus + 1..=2 * genus {
            a[m] = (q as i128).pow((m - genus) as u32) * a[2 * genus - m];
        }
        let coeffs: Vec<i64> = a
            .iter()
            .map(|&c| {
                i64::try_from(c)
                    .map_err(|_| LfuncError::Structure(format!("coefficient {c} overflows i64")))
            })
            .collect::<Result<_, _>>()?;
        Self::from_coeffs(q, genus, parity, coeffs)
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// Cached power sums `s_1..s_g`.
    pub fn power_sums(&self) -> &[i64] {
        &self.power_sums
    }

    /// Power sum `s_n` for any n <= 2g, recovered from the coefficients
    /// by the inverse Newton recursion (exact integer arithmetic).
    pub fn power_sum(&self, n: usize) -> Result<i64, LfuncError> {
        if n == 0 || n > 2 * self.genus {
            return Err(LfuncError::Structure(format!(
                "power sum index {n} out of range 1..={}",
                2 * self.genus
            )));
        }
        if n <= self.genus {
            return Ok(self.power_sums[n - 1]);
        }
        let sums = power_sums_from_coeffs_to(&self.coeffs, n)?;
        Ok(sums[n - 1])
    }

    /// `#J_C = P_C(1)`, the class number, as an exact big integer.
    pub fn class_number(&self) -> BigUint {
        let sum: i128 = self.coeffs.iter().map(|&a| a as i128).sum();
        debug_assert!(sum >= 1);
        BigUint::from(sum as u128)
    }

    /// The fluctuation statistic
    /// `N_F = log h - g log q + [d even] log(1 - 1/q)`.
    pub fn nf_statistic(&self) -> f64 {
        let h = self.class_number();
        let correction = match self.parity {
            Parity::Even => (-1.0 / self.q as f64).ln_1p(),
            Parity::Odd => 0.0,
        };
        ln_biguint(&h) - self.genus as f64 * (self.q as f64).ln() + correction
    }
}

fn power_sums_from_coeffs(coeffs: &[i64], genus: usize) -> Result<Vec<i64>, LfuncError> {
    power_sums_from_coeffs_to(coeffs, genus)
}

/// Inverse Newton: `s_n = -n a_n - sum_{k=1}^{n-1} s_k a_{n-k}`.
fn power_sums_from_coeffs_to(coeffs: &[i64], upto: usize) -> Result<Vec<i64>, LfuncError> {
    let mut sums = Vec::with_capacity(upto);
    for n in 1..=upto {
        let mut acc: i128 = n as i128 * coeffs[n] as i128;
        for k in 1..n {
            acc += sums[k - 1] as i128 * coeffs[n - k] as i128;
        }
        let s = -acc;
        sums.push(
            i64::try_from(s)
                .map_err(|_| LfuncError::Structure(format!("power sum {s} overflows i64")))?,
        );
    }
    Ok(sums)
}
