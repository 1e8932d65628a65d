//! Coherent-state parameter space and the closed-form wavefunction,
//! normalization constant, and analytic overlaps.
//!
//! A state is labeled by a complex pair `(alpha, beta)` with `|alpha| < 1` and
//! a chirality sign selecting the sense of rotation. The closed-form
//! amplitude here uses the complex-safe prefactor `N / (sqrt(pi) (1-alpha))`,
//! which reduces to the familiar `sqrt((1+alpha)/(1-alpha))` form when alpha
//! is real.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::FockLabel;
use crate::special::log_factorial_ratio;

/// Sense of rotation of the packet: `Right` carries angular factors
/// `e^{+i l phi}`, `Left` carries `e^{-i l phi}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chirality {
    Right,
    Left,
}

impl Chirality {
    /// The sign in `e^{± i l phi}`: +1 for `Right`, -1 for `Left`.
    pub fn sign(self) -> f64 {
        match self {
            Chirality::Right => 1.0,
            Chirality::Left => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Chirality::Right => Chirality::Left,
            Chirality::Left => Chirality::Right,
        }
    }
}

impl fmt::Display for Chirality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Chirality::Right => write!(f, "right"),
            Chirality::Left => write!(f, "left"),
        }
    }
}

/// A point `(r, phi)` of the plane in polar coordinates, `r >= 0` and `phi`
/// interpreted modulo 2 pi. All lengths are in oscillator units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint {
    pub r: f64,
    pub phi: f64,
}

impl PolarPoint {
    pub fn new(r: f64, phi: f64) -> Self {
        debug_assert!(r >= 0.0, "polar radius must be non-negative");
        PolarPoint { r, phi }
    }
}

/// The state label `(alpha, beta, ±)`, validated so `|alpha| < 1` strictly
/// and both parameters are finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentParams {
    alpha: C64,
    beta: C64,
    chirality: Chirality,
}

impl CoherentParams {
    pub fn new(alpha: C64, beta: C64, chirality: Chirality) -> Result<Self> {
        if !alpha.re.is_finite() || !alpha.im.is_finite() {
            return Err(Error::InvalidParameter("alpha must be finite".into()));
        }
        if !beta.re.is_finite() || !beta.im.is_finite() {
            return Err(Error::InvalidParameter("beta must be finite".into()));
        }
        if alpha.norm() >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "|alpha| must be < 1, got |alpha| = {}",
                alpha.norm()
            )));
        }
        Ok(CoherentParams { alpha, beta, chirality })
    }

    /// Convenience constructor for real parameters.
    pub fn real(alpha: f64, beta: f64, chirality: Chirality) -> Result<Self> {
        Self::new(C64::new(alpha, 0.0), C64::new(beta, 0.0), chirality)
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    pub fn beta(&self) -> C64 {
        self.beta
    }

    pub fn chirality(&self) -> Chirality {
        self.chirality
    }

    /// True when both parameters are real with `alpha >= 0`, the gauge in
    /// which the closed-form packet observables apply.
    pub fn is_real_gauge(&self) -> bool {
        self.alpha.im == 0.0 && self.beta.im == 0.0 && self.alpha.re >= 0.0
    }
}

/// Normalization constant `|N(alpha, beta)| = sqrt(1-|alpha|^2)
/// exp(-|beta|^2 / (2 (1-|alpha|^2)))`.
///
/// The phase of `N` is fixed real positive, which makes the closed-form
/// overlaps hold as written and pins a reproducible global phase.
pub fn normalization(params: &CoherentParams) -> f64 {
    let a2 = params.alpha.norm_sqr();
    let b2 = params.beta.norm_sqr();
    (1.0 - a2).sqrt() * (-b2 / (2.0 * (1.0 - a2))).exp()
}

/// Closed-form amplitude `Psi(r, phi) = N / (sqrt(pi) (1-alpha)) *
/// exp(-(1+alpha) r^2 / (2 (1-alpha)) + beta e^{± i phi} r / (1-alpha))`.
pub fn amplitude(params: &CoherentParams, point: PolarPoint) -> C64 {
    debug_assert!(point.r >= 0.0);
    let one = C64::new(1.0, 0.0);
    let alpha = params.alpha;
    let n = normalization(params);
    let phase = C64::from_polar(1.0, params.chirality.sign() * point.phi);
    let exponent = -(one + alpha) * point.r * point.r / (2.0 * (one - alpha))
        + params.beta * phase * point.r / (one - alpha);
    n / (PI.sqrt() * (one - alpha)) * exponent.exp()
}

/// Expansion coefficient of the state over `|n, ± l>`:
/// `c_{n,l} = N ((n+l)!/n!)^{1/2} (1/l!) alpha^n beta^l`, computed in log
/// space so large quantum numbers never overflow.
///
/// Errors when the label's angular sign differs from the state chirality; the
/// expansion only populates one sign.
pub fn coefficient(params: &CoherentParams, label: FockLabel) -> Result<C64> {
    if label.sign != params.chirality {
        return Err(Error::ChiralityMismatch(format!(
            "state populates only {} labels, got {}",
            params.chirality, label.sign
        )));
    }
    let n = u64::from(label.n);
    let l = u64::from(label.l);
    let alpha_pow = complex_pow_log(params.alpha, n);
    let beta_pow = complex_pow_log(params.beta, l);
    let (value, log_mag) = match (alpha_pow, beta_pow) {
        (Some((la, pa)), Some((lb, pb))) => {
            // log magnitude of ((n+l)!/n!)^{1/2} / l!
            let lf = -0.5 * log_factorial_ratio(n, l)? + log_factorial_ratio(0, l)?;
            (pa * pb, la + lb + lf)
        }
        _ => return Ok(C64::new(0.0, 0.0)),
    };
    Ok(C64::from(normalization(params)) * value * log_mag.exp())
}

/// `z^k` as `(ln |z^k|, phase)`; `None` when the power is identically zero.
fn complex_pow_log(z: C64, k: u64) -> Option<(f64, C64)> {
    if k == 0 {
        return Some((0.0, C64::new(1.0, 0.0)));
    }
    if z == C64::new(0.0, 0.0) {
        return None;
    }
    let (mag, arg) = z.to_polar();
    Some((k as f64 * mag.ln(), C64::from_polar(1.0, k as f64 * arg)))
}

/// Closed-form overlap `<b | a>` of two states of equal chirality, with the
/// ket `a` unprimed and the bra `b` primed:
///
/// `sqrt(1-|alpha|^2) sqrt(1-|alpha'|^2) / (1 - alpha conj(alpha')) *
/// exp(-|beta|^2/(2(1-|alpha|^2)) - |beta'|^2/(2(1-|alpha'|^2))
///     + beta conj(beta') / (1 - alpha conj(alpha')))`
pub fn overlap_same_chirality(a: &CoherentParams, b: &CoherentParams) -> Result<C64> {
    if a.chirality != b.chirality {
        return Err(Error::ChiralityMismatch(
            "overlap_same_chirality requires equal chirality".into(),
        ));
    }
    Ok(overlap_prefactor(a, b) * (beta_cross_term(a, b)).exp())
}

/// Closed-form overlap across chiralities: identical prefactor and Gaussian
/// exponents but no `beta conj(beta')` cross term (only the `l = 0` ladder is
/// shared between the two angular branches).
pub fn overlap_cross_chirality(a: &CoherentParams, b: &CoherentParams) -> Result<C64> {
    if a.chirality == b.chirality {
        return Err(Error::ChiralityMismatch(
            "overlap_cross_chirality requires opposite chirality".into(),
        ));
    }
    Ok(overlap_prefactor(a, b))
}

fn overlap_prefactor(a: &CoherentParams, b: &CoherentParams) -> C64 {
    let a2 = a.alpha.norm_sqr();
    let b2 = b.alpha.norm_sqr();
    let denom = C64::new(1.0, 0.0) - a.alpha * b.alpha.conj();
    let gauss =
        -a.beta.norm_sqr() / (2.0 * (1.0 - a2)) - b.beta.norm_sqr() / (2.0 * (1.0 - b2));
    ((1.0 - a2).sqrt() * (1.0 - b2).sqrt() / denom) * gauss.exp()
}

fn beta_cross_term(a: &CoherentParams, b: &CoherentParams) -> C64 {
    a.beta * b.beta.conj() / (C64::new(1.0, 0.0) - a.alpha * b.alpha.conj())
}

/// Result of reducing complex parameters to the real gauge.
#[derive(Debug, Clone, Copy)]
pub struct RealGauge {
    /// Equivalent state with `alpha >= 0` and `beta >= 0` real.
    pub params: CoherentParams,
    /// Time shift `t0` such that evolving the original state by `t0` makes
    /// alpha real positive.
    pub time_shift: f64,
    /// Frame rotation `phi0`: the reduced state evaluated at `phi + phi0`
    /// matches the shifted original at `phi` up to a global phase.
    pub frame_rotation: f64,
}

/// Reduce arbitrary complex `(alpha, beta)` to the real gauge in which the
/// closed-form packet formulas hold: a time shift `t0 = arg(alpha)/2` rotates
/// alpha onto the positive axis, and a frame rotation absorbs the remaining
/// phase of beta. The pointwise relation is
/// `|Psi_original(r, phi)| = |Psi_reduced(r, phi + s * chi)|` after evolving
/// the original by `time_shift`, with `s` the chirality sign and
/// `chi = arg(beta) - arg(alpha)/2`.
pub fn real_gauge(params: &CoherentParams) -> RealGauge {
    let (amod, aarg) = params.alpha.to_polar();
    let (bmod, barg) = params.beta.to_polar();
    let t0 = aarg / 2.0;
    let chi = barg - t0;
    let reduced = CoherentParams::new(
        C64::new(amod, 0.0),
        C64::new(bmod, 0.0),
        params.chirality,
    )
    .expect("moduli preserved, still |alpha| < 1");
    RealGauge {
        params: reduced,
        time_shift: t0,
        frame_rotation: chi,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn rejects_alpha_on_unit_circle() {
        assert!(CoherentParams::new(c(1.0, 0.0), c(0.0, 0.0), Chirality::Right).is_err());
        assert!(CoherentParams::new(c(0.8, 0.7), c(0.0, 0.0), Chirality::Right).is_err());
        assert!(CoherentParams::new(c(0.999, 0.0), c(1.0, 0.0), Chirality::Left).is_ok());
    }

    #[test]
    fn normalization_examples() {
        let ground = CoherentParams::real(0.0, 0.0, Chirality::Right).unwrap();
        assert_eq!(normalization(&ground), 1.0);

        let fig1 = CoherentParams::real(0.4, 5.0, Chirality::Left).unwrap();
        assert_relative_eq!(
            normalization(&fig1),
            0.84f64.sqrt() * (-25.0f64 / 1.68).exp(),
            max_relative = 1e-15
        );

        let cplx =
            CoherentParams::new(c(0.0, 0.6), c(1.0, 1.0), Chirality::Right).unwrap();
        assert_relative_eq!(
            normalization(&cplx),
            0.64f64.sqrt() * (-2.0f64 / 1.28).exp(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn ground_state_amplitude() {
        let ground = CoherentParams::real(0.0, 0.0, Chirality::Right).unwrap();
        for &(r, phi) in &[(0.0, 0.0), (1.3, 2.0), (3.0, -0.5)] {
            let got = amplitude(&ground, PolarPoint::new(r, phi));
            let expect = (1.0 / PI.sqrt()) * (-r * r / 2.0f64).exp();
            assert_relative_eq!(got.re, expect, max_relative = 1e-14);
            assert_abs_diff_eq!(got.im, 0.0, epsilon = 1e-16);
        }
    }

    #[test]
    fn chirality_mirror() {
        let plus = CoherentParams::new(c(0.3, 0.1), c(2.0, -0.4), Chirality::Right).unwrap();
        let minus = CoherentParams::new(c(0.3, 0.1), c(2.0, -0.4), Chirality::Left).unwrap();
        for &(r, phi) in &[(1.0, 0.7), (2.5, -1.2), (0.4, 3.0)] {
            let a = amplitude(&minus, PolarPoint::new(r, phi));
            let b = amplitude(&plus, PolarPoint::new(r, -phi));
            assert!((a - b).norm() <= 1e-15 * a.norm().max(1.0));
        }
    }

    #[test]
    fn coefficients_of_ground_state() {
        let ground = CoherentParams::real(0.0, 0.0, Chirality::Right).unwrap();
        let c00 = coefficient(&ground, FockLabel::new(0, 0, Chirality::Right)).unwrap();
        assert_eq!(c00, C64::new(1.0, 0.0));
        let c10 = coefficient(&ground, FockLabel::new(1, 0, Chirality::Right)).unwrap();
        assert_eq!(c10, C64::new(0.0, 0.0));
    }

    #[test]
    fn coefficient_rejects_opposite_sign() {
        let s = CoherentParams::real(0.2, 1.0, Chirality::Right).unwrap();
        assert!(coefficient(&s, FockLabel::new(0, 1, Chirality::Left)).is_err());
    }

    #[test]
    fn coefficient_magnitude_matches_normalization_summand() {
        // |c_{n,l}|^2 must equal N^2 ((n+l)!/(n! l!^2)) |alpha|^{2n} |beta|^{2l}
        let s = CoherentParams::real(0.4, 5.0, Chirality::Right).unwrap();
        let (n, l) = (2u32, 3u32);
        let c = coefficient(&s, FockLabel::new(n, l, Chirality::Right)).unwrap();
        let n2 = normalization(&s).powi(2);
        let lf = (-log_factorial_ratio(n.into(), l.into()).unwrap()
            + 2.0 * log_factorial_ratio(0, l.into()).unwrap())
        .exp();
        let expect = n2 * lf * 0.4f64.powi(2 * n as i32) * 5.0f64.powi(2 * l as i32);
        assert_relative_eq!(c.norm_sqr(), expect, max_relative = 1e-12);
    }

    #[test]
    fn self_overlap_is_unity() {
        for &(are, aim, bre, bim) in
            &[(0.3, 0.0, 2.0, 0.0), (0.0, 0.5, -1.0, 2.0), (0.69, -0.1, 4.0, -3.0)]
        {
            let s = CoherentParams::new(c(are, aim), c(bre, bim), Chirality::Right).unwrap();
            let ov = overlap_same_chirality(&s, &s).unwrap();
            assert_abs_diff_eq!(ov.re, 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(ov.im, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn cross_overlap_drops_beta_coupling() {
        let a = CoherentParams::real(0.3, 2.0, Chirality::Right).unwrap();
        let b = CoherentParams::real(0.3, 2.0, Chirality::Left).unwrap();
        let cross = overlap_cross_chirality(&a, &b).unwrap();
        assert!(cross.im.abs() < 1e-16);
        assert!(cross.re > 0.0 && cross.re < 1.0);
        // strictly smaller than the same-chirality overlap once beta != 0
        let same = overlap_same_chirality(&a, &a).unwrap();
        assert!(cross.re < same.re);
    }

    #[test]
    fn overlap_chirality_preconditions() {
        let a = CoherentParams::real(0.1, 1.0, Chirality::Right).unwrap();
        let b = CoherentParams::real(0.1, 1.0, Chirality::Left).unwrap();
        assert!(overlap_same_chirality(&a, &b).is_err());
        assert!(overlap_cross_chirality(&a, &a).is_err());
    }

    #[test]
    fn real_gauge_preserves_moduli() {
        let s = CoherentParams::new(c(0.2, 0.3), c(-1.0, 2.0), Chirality::Left).unwrap();
        let g = real_gauge(&s);
        assert_relative_eq!(g.params.alpha().re, s.alpha().norm(), max_relative = 1e-15);
        assert_relative_eq!(g.params.beta().re, s.beta().norm(), max_relative = 1e-15);
        assert!(g.params.is_real_gauge());
    }
}
