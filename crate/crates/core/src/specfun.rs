//! Gauss hypergeometric series, complete elliptic integrals and the
//! generalized Grötzsch modulus function `μ_a` with its inverse.
//!
//! Everything here is a pure function of its arguments.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Hard cap on the number of series terms before giving up.
pub const MAX_SERIES_TERMS: usize = 20_000;

/// Relative size of the last retained term at which a series is truncated.
pub const SERIES_REL_TOL: f64 = 1e-16;

/// Parameters `(a, b; c; x)` of `₂F₁`, validated on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypergeometricParams<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub x: T,
}

impl<T: Scalar> HypergeometricParams<T> {
    pub fn new(a: T, b: T, c: T, x: T) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::Domain("hypergeometric parameters must be finite".into()));
        }
        if is_nonpositive_integer(c) {
            return Err(Error::Domain(format!("c = {c} is zero or a negative integer")));
        }
        if !(x >= T::zero() && x < T::one()) {
            return Err(Error::Domain(format!("x = {x} outside [0, 1)")));
        }
        Ok(Self { a, b, c, x })
    }
}

fn is_nonpositive_integer<T: Scalar>(v: T) -> bool {
    v <= T::zero() && v == v.round()
}

/// `₂F₁(a, b; c; x)` for `x ∈ [0, 1)`.
///
/// The power series is summed directly for `x ≤ 1/2`. When `c = a + b` and
/// `x > 1/2` the series is re-expanded around `1 - x` with its logarithmic
/// term, which keeps full accuracy all the way to `x → 1`.
pub fn gauss_2f1<T: Scalar>(p: &HypergeometricParams<T>) -> Result<T> {
    hyp2f1_split(p.a, p.b, p.c, p.x, T::one() - p.x)
}

/// Same as [`gauss_2f1`] but with `1 - x` supplied by the caller, so that
/// arguments near 1 do not lose their low-order digits to cancellation.
pub(crate) fn hyp2f1_split<T: Scalar>(a: T, b: T, c: T, x: T, one_minus_x: T) -> Result<T> {
    if x == T::zero() {
        return Ok(T::one());
    }
    let terminating = is_nonpositive_integer(a) || is_nonpositive_integer(b);
    let zero_balance = (c - a - b).abs() <= T::lit(8.0) * T::epsilon() * T::one().max(c.abs());
    if x > T::lit(0.5) && zero_balance && !terminating {
        log_connection_series(a, b, one_minus_x)
    } else {
        power_series(a, b, c, x)
    }
}

fn power_series<T: Scalar>(a: T, b: T, c: T, x: T) -> Result<T> {
    let tol = T::lit(SERIES_REL_TOL);
    let mut sum = T::one();
    let mut term = T::one();
    for n in 0..MAX_SERIES_TERMS {
        let k = T::from_usize_lossy(n);
        term = term * (a + k) * (b + k) / ((c + k) * (k + T::one())) * x;
        sum = sum + term;
        if term == T::zero() || term.abs() < tol * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::Evaluation { terms: MAX_SERIES_TERMS, partial_sum: sum.as_f64() })
}

/// `F(a, b; a+b; x)` expanded in `y = 1 - x`:
///
/// ```text
/// Γ(a+b)/(Γ(a)Γ(b)) Σ (a)ₙ(b)ₙ/(n!)² [2ψ(n+1) - ψ(a+n) - ψ(b+n) - ln y] yⁿ
/// ```
fn log_connection_series<T: Scalar>(a: T, b: T, y: T) -> Result<T> {
    if y <= T::zero() {
        return Err(Error::Domain("argument too close to 1 for the log expansion".into()));
    }
    let tol = T::lit(SERIES_REL_TOL);
    let ln_y = y.ln();
    let mut psi_n1 = digamma(T::one());
    let mut psi_a = digamma(a);
    let mut psi_b = digamma(b);
    let mut coef = T::one();
    let mut sum = T::zero();
    let mut small_in_a_row = 0;
    for n in 0..MAX_SERIES_TERMS {
        let term = coef * (psi_n1 + psi_n1 - psi_a - psi_b - ln_y);
        sum = sum + term;
        if term.abs() < tol * sum.abs() {
            small_in_a_row += 1;
            if small_in_a_row == 2 {
                return Ok(inverse_beta(a, b) * sum);
            }
        } else {
            small_in_a_row = 0;
        }
        let k = T::from_usize_lossy(n);
        let k1 = k + T::one();
        coef = coef * (a + k) * (b + k) / (k1 * k1) * y;
        psi_n1 = psi_n1 + T::one() / k1;
        psi_a = psi_a + T::one() / (a + k);
        psi_b = psi_b + T::one() / (b + k);
    }
    Err(Error::Evaluation {
        terms: MAX_SERIES_TERMS,
        partial_sum: (inverse_beta(a, b) * sum).as_f64(),
    })
}

/// `Γ(a+b) / (Γ(a) Γ(b))`.
fn inverse_beta<T: Scalar>(a: T, b: T) -> T {
    let s = a + b;
    if (s - T::one()).abs() <= T::epsilon() {
        // Γ(a)Γ(1-a) = π / sin(πa)
        return (T::PI() * a).sin() / T::PI();
    }
    gamma(s) / (gamma(a) * gamma(b))
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

pub(crate) fn gamma<T: Scalar>(x: T) -> T {
    let half = T::lit(0.5);
    if x < half {
        return T::PI() / ((T::PI() * x).sin() * gamma(T::one() - x));
    }
    let x = x - T::one();
    let mut acc = T::lit(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + T::lit(c) / (x + T::from_usize_lossy(i));
    }
    let t = x + T::lit(LANCZOS_G) + half;
    (T::lit(2.0) * T::PI()).sqrt() * t.powf(x + half) * (-t).exp() * acc
}

pub(crate) fn digamma<T: Scalar>(x: T) -> T {
    if is_nonpositive_integer(x) {
        return T::nan();
    }
    if x < T::zero() {
        return digamma(T::one() - x) - T::PI() / (T::PI() * x).tan();
    }
    let mut x = x;
    let mut acc = T::zero();
    while x < T::lit(16.0) {
        acc = acc - x.recip();
        x = x + T::one();
    }
    let inv = x.recip();
    let inv2 = inv * inv;
    let tail = inv2
        * (T::lit(1.0 / 12.0)
            - inv2
                * (T::lit(1.0 / 120.0)
                    - inv2 * (T::lit(1.0 / 252.0) - inv2 * (T::lit(1.0 / 240.0) - inv2 * T::lit(1.0 / 132.0)))));
    acc + x.ln() - T::lit(0.5) * inv - tail
}

/// Arithmetic–geometric mean of two non-negative numbers.
pub fn agm<T: Scalar>(a: T, b: T) -> T {
    let (mut a, mut b) = (a, b);
    for _ in 0..64 {
        if (a - b).abs() <= T::lit(2.0) * T::epsilon() * a {
            break;
        }
        let next = (a + b) * T::lit(0.5);
        b = (a * b).sqrt();
        a = next;
    }
    (a + b) * T::lit(0.5)
}

/// An elliptic modulus `r` carried together with its complement
/// `r' = √(1 - r²)`.
///
/// Both members are stored so that whichever of the two is close to 1 can be
/// recovered from the other without cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticModulusPair<T> {
    pub r: T,
    pub r_prime: T,
}

impl<T: Scalar> EllipticModulusPair<T> {
    pub fn from_r(r: T) -> Self {
        Self { r, r_prime: ((T::one() - r) * (T::one() + r)).sqrt() }
    }

    pub fn from_complement(r_prime: T) -> Self {
        Self { r: ((T::one() - r_prime) * (T::one() + r_prime)).sqrt(), r_prime }
    }

    pub fn swapped(self) -> Self {
        Self { r: self.r_prime, r_prime: self.r }
    }

    /// `K(r) = π / (2 AGM(1, r'))`.
    pub fn k(&self) -> T {
        T::FRAC_PI_2() / agm(T::one(), self.r_prime)
    }

    /// `K'(r) = K(r')`.
    pub fn k_prime(&self) -> T {
        T::FRAC_PI_2() / agm(T::one(), self.r)
    }

    /// `K'(r)/K(r)` without forming either integral separately.
    pub fn k_ratio(&self) -> T {
        agm(T::one(), self.r_prime) / agm(T::one(), self.r)
    }
}

/// Complete elliptic integral of the first kind `K(r)`, `0 ≤ r < 1`.
pub fn agm_k<T: Scalar>(r: T) -> Result<T> {
    if !(r >= T::zero() && r < T::one()) {
        return Err(Error::Domain(format!("K(r) needs 0 <= r < 1, got {r}")));
    }
    Ok(EllipticModulusPair::from_r(r).k())
}

fn check_order<T: Scalar>(a: T) -> Result<()> {
    if a > T::zero() && a <= T::lit(0.5) {
        Ok(())
    } else {
        Err(Error::Domain(format!("a = {a} outside (0, 1/2]")))
    }
}

/// `π / (2 sin πa)`, the value of `μ_a` at `r = 1/√2`.
fn mu_midpoint<T: Scalar>(a: T) -> T {
    T::FRAC_PI_2() / (T::PI() * a).sin()
}

/// `μ_a(r)` from a modulus pair; `r` and `r'` each feed one series.
pub fn mu_pair<T: Scalar>(a: T, pair: &EllipticModulusPair<T>) -> Result<T> {
    check_order(a)?;
    let (r, rp) = (pair.r, pair.r_prime);
    if !(r > T::zero() && rp > T::zero()) {
        return Err(Error::Domain(format!("mu needs r in (0, 1), got r = {r}, r' = {rp}")));
    }
    let (x, x_prime) = (r * r, rp * rp);
    let b = T::one() - a;
    let num = hyp2f1_split(a, b, T::one(), x_prime, x)?;
    let den = hyp2f1_split(a, b, T::one(), x, x_prime)?;
    Ok(mu_midpoint(a) * num / den)
}

/// The generalized modulus function
/// `μ_a(r) = π/(2 sin πa) · F(a,1-a;1;1-r²) / F(a,1-a;1;r²)`.
pub fn mu<T: Scalar>(a: T, r: T) -> Result<T> {
    if !(r > T::zero() && r < T::one()) {
        return Err(Error::Domain(format!("mu needs r in (0, 1), got {r}")));
    }
    mu_pair(a, &EllipticModulusPair::from_r(r))
}

/// Inverse of [`mu`]: the `r ∈ (0,1)` with `μ_a(r) = y`.
pub fn inv_mu<T: Scalar>(a: T, y: T) -> Result<T> {
    inv_mu_pair(a, y).map(|p| p.r)
}

/// Inverse of `μ_a` returning both `r` and `r'` at full relative accuracy.
///
/// Targets below `μ_a(1/√2)` are mapped through the product identity
/// `μ_a(r) μ_a(r') = (π / (2 sin πa))²` so the root find always works on the
/// half `r ≤ 1/√2`, where `r` itself is well resolved.
pub fn inv_mu_pair<T: Scalar>(a: T, y: T) -> Result<EllipticModulusPair<T>> {
    check_order(a)?;
    if !(y > T::zero() && y.is_finite()) {
        return Err(Error::Domain(format!("inv_mu needs y > 0, got {y}")));
    }
    let mid = mu_midpoint(a);
    let pair = if y >= mid {
        EllipticModulusPair::from_r(solve_lower_half(a, y)?)
    } else {
        EllipticModulusPair::from_complement(solve_lower_half(a, mid * mid / y)?)
    };
    let tol = T::lit(1e-12).max(T::lit(128.0) * T::epsilon());
    let achieved = mu_pair(a, &pair)?;
    if (achieved - y).abs() > tol * T::one().max(y) {
        return Err(Error::RootFind(format!(
            "mu_{a}(r) = {achieved} misses target {y} beyond tolerance"
        )));
    }
    Ok(pair)
}

/// Root of `μ_a(r) = target` on `(0, 1/√2]`, for `target ≥ μ_a(1/√2)`.
///
/// Bisection (geometric while the bracket spans decades) down to a bracket of
/// relative width 1e-6, then Newton with a centred-difference derivative,
/// falling back to bisection whenever a step leaves the bracket.
fn solve_lower_half<T: Scalar>(a: T, target: T) -> Result<T> {
    let eval = |r: T| mu_pair(a, &EllipticModulusPair::from_r(r));
    let mut lo = T::min_positive_value().sqrt() * T::lit(4.0);
    let mut hi = T::FRAC_1_SQRT_2();
    if eval(lo)? < target {
        return Err(Error::RootFind(format!(
            "target {target} exceeds mu_{a} at the smallest representable modulus"
        )));
    }

    let bracket_width = T::lit(1e-6);
    while hi - lo > bracket_width * hi {
        let mid = if hi > T::lit(4.0) * lo { (lo * hi).sqrt() } else { (lo + hi) * T::lit(0.5) };
        if eval(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mut r = (lo + hi) * T::lit(0.5);
    for _ in 0..100 {
        let f = eval(r)? - target;
        if f == T::zero() {
            return Ok(r);
        }
        if f > T::zero() {
            lo = r;
        } else {
            hi = r;
        }
        let step = T::lit(1e-7) * r;
        let slope = (eval(r + step)? - eval(r - step)?) / (step + step);
        let mut next = r - f / slope;
        if !(slope < T::zero()) || !(next > lo && next < hi) {
            next = (lo + hi) * T::lit(0.5);
        }
        let done = (next - r).abs() <= T::lit(4.0) * T::epsilon() * r;
        r = next;
        if done {
            break;
        }
    }
    Ok(r)
}

/// `r_a = μ_a⁻¹(πh / (2 sin πa))`.
pub fn r_sub_a<T: Scalar>(a: T, h: T) -> Result<T> {
    r_sub_a_pair(a, h).map(|p| p.r)
}

pub fn r_sub_a_pair<T: Scalar>(a: T, h: T) -> Result<EllipticModulusPair<T>> {
    check_order(a)?;
    if !(h > T::zero() && h.is_finite()) {
        return Err(Error::Domain(format!("h = {h} must be positive")));
    }
    inv_mu_pair(a, h * mu_midpoint(a))
}
