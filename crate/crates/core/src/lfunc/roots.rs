//! Numeric root-modulus check (the Riemann Hypothesis for curves).
//!
//! Multiple roots wreck the accuracy of any simultaneous root finder, so
//! the polynomial is first reduced to its squarefree part with exact
//! integer arithmetic; Durand–Kerner on simple roots then converges to
//! near machine precision.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, Zero};

use super::LPolynomial;

/// Maximum deviation `| |u| - q^{-1/2} |` over the distinct complex
/// roots u of the L-polynomial.
pub fn rh_max_deviation(l: &LPolynomial) -> f64 {
    let coeffs: Vec<BigInt> = l.coeffs().iter().map(|&c| BigInt::from(c)).collect();
    let sf = squarefree_part(&coeffs);
    let roots = durand_kerner(&sf);
    let target = 1.0 / (l.q() as f64).sqrt();
    roots
        .iter()
        .map(|z| (z.norm() - target).abs())
        .fold(0.0f64, f64::max)
}

/// `p / gcd(p, p')` over the integers (primitive-PRS gcd, exact
/// division). Input ascending; output ascending, content-normalized.
fn squarefree_part(p: &[BigInt]) -> Vec<BigInt> {
    let dp = derivative(p);
    let g = int_poly_gcd(p, &dp);
    if poly_degree(&g) == 0 {
        return p.to_vec();
    }
    exact_div(p, &g)
}

fn poly_degree(p: &[BigInt]) -> usize {
    let mut d = p.len().saturating_sub(1);
    while d > 0 && p[d].is_zero() {
        d -= 1;
    }
    d
}

fn trim(mut p: Vec<BigInt>) -> Vec<BigInt> {
    while p.len() > 1 && p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
    p
}

fn derivative(p: &[BigInt]) -> Vec<BigInt> {
    if p.len() <= 1 {
        return vec![BigInt::zero()];
    }
    trim((1..p.len()).map(|i| &p[i] * BigInt::from(i)).collect())
}

fn content(p: &[BigInt]) -> BigInt {
    let mut c = BigInt::zero();
    for a in p {
        c = gcd_bigint(&c, a);
        if c == BigInt::from(1) {
            break;
        }
    }
    if c.is_zero() {
        BigInt::from(1)
    } else {
        c
    }
}

fn gcd_bigint(a: &BigInt, b: &BigInt) -> BigInt {
    let mut a = a.abs();
    let mut b = b.abs();
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

fn primitive_part(p: &[BigInt]) -> Vec<BigInt> {
    let c = content(p);
    p.iter().map(|a| a / &c).collect()
}

/// Pseudo-remainder of a by b (b nonzero, deg a >= deg b).
fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = poly_degree(b);
    let lb = b[db].clone();
    let mut r = a.to_vec();
    loop {
        let dr = poly_degree(&r);
        if (dr == 0 && r[0].is_zero()) || dr < db {
            return trim(r);
        }
        let lead = r[dr].clone();
        for c in r.iter_mut() {
            *c = &*c * &lb;
        }
        for j in 0..=db {
            r[dr - db + j] -= &lead * &b[j];
        }
        r = trim(r);
        if poly_degree(&r) == 0 && r[0].is_zero() {
            return r;
        }
    }
}

fn int_poly_gcd(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut a = primitive_part(&trim(a.to_vec()));
    let mut b = primitive_part(&trim(b.to_vec()));
    if poly_degree(&a) < poly_degree(&b) {
        std::mem::swap(&mut a, &mut b);
    }
    while !(poly_degree(&b) == 0 && b[0].is_zero()) {
        let r = pseudo_rem(&a, &b);
        a = b;
        b = primitive_part(&r);
    }
    a
}

/// Exact division of integer polynomials (panics on inexactness, which
/// would indicate a bug in the gcd above).
fn exact_div(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let da = poly_degree(a);
    let db = poly_degree(b);
    assert!(da >= db);
    let mut rem: Vec<BigInt> = a.to_vec();
    let mut quo = vec![BigInt::zero(); da - db + 1];
    for k in (db..=da).rev() {
        let c = rem[k].clone();
        if c.is_zero() {
            continue;
        }
        let (q, r) = (&c / &b[db], &c % &b[db]);
        assert!(r.is_zero(), "inexact integer polynomial division");
        quo[k - db] = q.clone();
        for j in 0..=db {
            let t = &q * &b[j];
            rem[k - db + j] -= t;
        }
    }
    assert!(
        rem.iter().all(|c| c.is_zero()),
        "nonzero remainder in exact division"
    );
    trim(quo)
}

/// Durand–Kerner simultaneous iteration. Roots are simple by
/// construction, so convergence is quadratic; 500 iterations is a
/// generous cap.
fn durand_kerner(p: &[BigInt]) -> Vec<Complex64> {
    let deg = poly_degree(p);
    if deg == 0 {
        return Vec::new();
    }
    let lead = bigint_to_f64(&p[deg]);
    let monic: Vec<Complex64> = (0..=deg)
        .map(|i| Complex64::new(bigint_to_f64(&p[i]) / lead, 0.0))
        .collect();
    if deg == 1 {
        return vec![-monic[0]];
    }
    // Initial guesses on a circle at the geometric mean of the root
    // moduli, with an angular offset to break symmetry.
    let radius = bigint_to_f64(&p[0]).abs().max(f64::MIN_POSITIVE) / lead.abs();
    let radius = radius.powf(1.0 / deg as f64).max(1e-3);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.3) / deg as f64 + 0.41;
            Complex64::from_polar(radius, theta)
        })
        .collect();
    for _ in 0..500 {
        let mut max_step = 0.0f64;
        for k in 0..deg {
            let pz = eval_complex(&monic, z[k]);
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if j != k {
                    denom *= z[k] - z[j];
                }
            }
            if denom.norm() == 0.0 {
                // Coincident iterates: nudge apart and continue.
                z[k] += Complex64::new(1e-8, 1e-8);
                max_step = f64::MAX;
                continue;
            }
            let step = pz / denom;
            z[k] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-14 {
            break;
        }
    }
    z
}

fn eval_complex(monic: &[Complex64], z: Complex64) -> Complex64 {
    let deg = monic.len() - 1;
    let mut acc = Complex64::new(1.0, 0.0); // leading coefficient
    for i in (0..deg).rev() {
        acc = acc * z + monic[i];
    }
    acc
}

fn bigint_to_f64(x: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().expect("coefficient in f64 range")
}
