//! Closed-form moduli: the parallelogram family `g(t, h)`, Bowman's
//! trapezoid and the circular quadrilateral bounded by two geodesics and two
//! hypercycles of the unit disk.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::specfun::{inv_mu_pair, r_sub_a_pair, EllipticModulusPair};

/// Modulus of the parallelogram `QM(1 + h e^{it}, h e^{it}, 0, 1)`,
/// `K'(r_a)/K(r_a)` with `a = t/π`.
pub fn parallelogram_modulus<T: Scalar>(t: T, h: T) -> Result<T> {
    if !(t > T::zero() && t <= T::FRAC_PI_2()) {
        return Err(Error::Domain(format!("t = {t} outside (0, π/2]")));
    }
    if !(h > T::zero() && h.is_finite()) {
        return Err(Error::Domain(format!("h = {h} must be positive")));
    }
    let a = (t / T::PI()).min(T::lit(0.5));
    Ok(r_sub_a_pair(a, h)?.k_ratio())
}

/// Bowman's trapezoid modulus together with its intermediate quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapezoidModulus<T> {
    /// Length of the longer vertical side.
    pub h: T,
    pub value: T,
    /// `c = 2h - 1`.
    pub c1: T,
    pub t1: T,
    pub t2: T,
    /// `((t1 - t2)/(t1 + t2))²`.
    pub r: T,
}

/// Modulus of the trapezoid with vertices `1 + ih, i(h-1), 0, 1`.
pub fn bowman_modulus<T: Scalar>(h: T) -> Result<TrapezoidModulus<T>> {
    if !(h > T::one() && h.is_finite()) {
        return Err(Error::Domain(format!("Bowman's formula needs h > 1, got {h}")));
    }
    let half = T::lit(0.5);
    let c = h + h - T::one();
    let t1 = inv_mu_pair(half, T::FRAC_PI_2() / c)?.r;
    let t2 = inv_mu_pair(half, T::FRAC_PI_2() * c)?.r;
    let sum = t1 + t2;
    let ratio = (t1 - t2) / sum;
    let r = ratio * ratio;
    // 1 - r = 4 t1 t2 / (t1 + t2)², exact in form
    let one_minus_r = T::lit(4.0) * t1 * t2 / (sum * sum);
    let pair = EllipticModulusPair { r, r_prime: (one_minus_r * (T::one() + r)).sqrt() };
    Ok(TrapezoidModulus { h, value: pair.k() / pair.k_prime(), c1: c, t1, t2, r })
}

/// `h - 1/2 - ln 2 / π`, the large-`h` expansion of [`bowman_modulus`].
pub fn bowman_asymptotic<T: Scalar>(h: T) -> T {
    h - T::lit(0.5) - T::LN_2() / T::PI()
}

/// Shape of the circular quadrilateral `Q` and its derived constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircularQuadParams<T> {
    /// Angle at which the upper arc meets the unit circle.
    pub theta: T,
    /// Where the side arcs cross the real axis.
    pub r: T,
    /// `tan(θ/2)`.
    pub u: T,
    /// `arccot(2r / (1 - r²))`.
    pub beta: T,
    /// `2 ln((1 + u)/(1 - u))`.
    pub rho: T,
}

impl<T: Scalar> CircularQuadParams<T> {
    pub fn new(theta: T, r: T) -> Result<Self> {
        if !(theta > T::zero() && theta < T::FRAC_PI_2()) {
            return Err(Error::Domain(format!("theta = {theta} outside (0, π/2)")));
        }
        if !(r > T::zero() && r < T::one()) {
            return Err(Error::Domain(format!("r = {r} outside (0, 1)")));
        }
        let two = T::lit(2.0);
        let u = (theta / two).tan();
        let beta = ((T::one() - r * r) / (two * r)).atan();
        let rho = two * ((T::one() + u) / (T::one() - u)).ln();
        if !(rho > T::zero() && rho.is_finite()) {
            return Err(Error::Domain(format!("degenerate circular quadrilateral at theta = {theta}")));
        }
        Ok(Self { theta, r, u, beta, rho })
    }
}

/// `(π - 2β)/ρ`.
pub fn circular_quad_modulus<T: Scalar>(p: &CircularQuadParams<T>) -> T {
    (T::PI() - p.beta - p.beta) / p.rho
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn g(t: f64, h: f64) -> f64 {
        parallelogram_modulus(t, h).unwrap()
    }

    fn asym(h: f64) -> f64 {
        bowman_asymptotic(h)
    }

    #[test]
    fn parallelogram_rhombus_and_rectangle() {
        for &t in &[0.1, 0.5, 1.0, 1.3, FRAC_PI_2] {
            assert!((g(t, 1.0) - 1.0).abs() < 1e-12, "t = {t}");
        }
        for &h in &[0.5, 1.0, 1.5, 2.0] {
            assert!((g(FRAC_PI_2, h) - h).abs() < 1e-10);
        }
        // 40-digit evaluation of the same formula
        assert!((g(1.0, 1.5) - 1.582_400_222_955_523_5).abs() < 1e-11);
    }

    #[test]
    fn parallelogram_domain() {
        assert!(parallelogram_modulus(0.0, 1.0).is_err());
        assert!(parallelogram_modulus(2.0, 1.0).is_err());
        assert!(parallelogram_modulus(1.0, 0.0).is_err());
    }

    #[test]
    fn bowman_table_rows() {
        for &(h, v) in &[(1.1, 0.340_313_5), (1.5, 0.776_943_4), (2.0, 1.279_261_6)] {
            let m = bowman_modulus::<f64>(h).unwrap();
            assert!((m.value - v).abs() <= 5e-8, "h = {h}: {}", m.value);
            assert!(m.value >= h - 1.0 && m.value <= h);
            assert_eq!(m.c1, 2.0 * h - 1.0);
            let ratio = (m.t1 - m.t2) / (m.t1 + m.t2);
            assert!((m.r - ratio * ratio).abs() < 1e-15);
        }
        assert!(bowman_modulus(1.0).is_err());
        assert!(bowman_modulus(0.5).is_err());
    }

    #[test]
    fn bowman_asymptotics() {
        let c = -0.5 - 2f64.ln() / PI;
        assert!((c + 0.720_636).abs() < 1e-6);
        assert!((asym(2.0) - 1.279_364_399_85).abs() < 1e-10);
        assert!((asym(2.0) - bowman_modulus(2.0).unwrap().value).abs() < 1.1e-4);
        assert!((asym(1.0) - 0.279_364).abs() < 1e-6);
        assert!((asym(4.0) - bowman_modulus(4.0).unwrap().value).abs() <= 1e-5);
    }

    #[test]
    fn circular_table_rows() {
        for &(theta, v) in &[(0.10, 7.597_433), (0.30, 2.498_368), (1.20, 0.454_689)] {
            let p = CircularQuadParams::<f64>::new(theta, 0.4).unwrap();
            assert!((circular_quad_modulus(&p) - v).abs() <= 1e-6, "theta = {theta}");
            assert!(p.u > 0.0 && p.u < 1.0 && p.rho > 0.0);
            assert!(p.beta > 0.0 && p.beta < FRAC_PI_2);
        }
    }

    #[test]
    fn circular_domain() {
        assert!(CircularQuadParams::new(0.0, 0.4).is_err());
        assert!(CircularQuadParams::new(FRAC_PI_2, 0.4).is_err());
        assert!(CircularQuadParams::new(0.5, 0.0).is_err());
        assert!(CircularQuadParams::new(0.5, 1.0).is_err());
    }
}
