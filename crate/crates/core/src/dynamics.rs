//! Time evolution of the state parameters and the closed-form packet
//! observables: center trajectory, width/phase matrices, densities and
//! currents, dispersions, and the Robertson–Schrödinger determinant.
//!
//! Everything here flows from one fact: the state is a Gaussian with complex
//! quadratic coefficient `a = (1+alpha)/(1-alpha)` and linear coefficient
//! `b = beta/(1-alpha)`. The classic real-parameter formulas are thin
//! wrappers over that engine; they insist on the real gauge (`alpha >= 0`,
//! `beta` real), which is the domain where they were derived. For complex
//! parameters use [`crate::state::real_gauge`] or the `gaussian_*` variants,
//! which are exact for any admissible parameters and are cross-checked
//! against grid quadrature in the test suite.
//!
//! The momentum of the packet center is taken from the Gaussian algebra
//! (equivalently Ehrenfest's theorem, `p = dq/dt`); the quadrature oracle is
//! authoritative here and the tests pin `p` against it.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::state::CoherentParams;

/// Wave-packet summary at one instant: center `q`, momentum `p`, width
/// matrix `U`, phase/current matrix `V`. For this family `U` and `V` are
/// scalar multiples of the identity.
#[derive(Debug, Clone, Copy)]
pub struct PacketMoments {
    pub q: [f64; 2],
    pub p: [f64; 2],
    pub u: [[f64; 2]; 2],
    pub v: [[f64; 2]; 2],
    pub t: f64,
}

/// Second moments at one instant; the Robertson–Schrödinger combination of
/// each `(x, p_x)` pair equals 1/4 identically for this family.
#[derive(Debug, Clone, Copy)]
pub struct DispersionSet {
    pub dx2: f64,
    pub dy2: f64,
    pub dpx2: f64,
    pub dpy2: f64,
    /// Symmetrized covariance `<dx dp_x>`.
    pub dxpx: f64,
    pub dypy: f64,
    pub t: f64,
}

/// Classical trajectory of the packet center.
#[derive(Debug, Clone, Copy)]
pub struct EllipseGeometry {
    pub semi_major: f64,
    pub semi_minor: f64,
    pub eccentricity: f64,
    /// True when `beta = 0` and the trajectory collapses to a point.
    pub degenerate: bool,
}

/// Evolved parameters `(alpha e^{-2it}, beta e^{-it})`; `|alpha|` is
/// preserved so the result is always valid. The state additionally acquires
/// the global zero-point phase `e^{-it}`, which cancels in every observable.
pub fn evolve_params(params: &CoherentParams, t: f64) -> CoherentParams {
    CoherentParams::new(
        params.alpha() * C64::from_polar(1.0, -2.0 * t),
        params.beta() * C64::from_polar(1.0, -t),
        params.chirality(),
    )
    .expect("|alpha| preserved under evolution")
}

/// Complex Gaussian shape of the state at its own time origin:
/// `Psi ~ exp(-a (x^2+y^2)/2 + b (x ± i y))`.
#[derive(Debug, Clone, Copy)]
struct GaussianShape {
    a: C64,
    b: C64,
    sign: f64,
}

fn shape(params: &CoherentParams) -> GaussianShape {
    let one = C64::new(1.0, 0.0);
    GaussianShape {
        a: (one + params.alpha()) / (one - params.alpha()),
        b: params.beta() / (one - params.alpha()),
        sign: params.chirality().sign(),
    }
}

/// Packet center and momentum for arbitrary complex parameters, exact from
/// the Gaussian algebra.
pub fn gaussian_center(params: &CoherentParams) -> ([f64; 2], [f64; 2]) {
    let s = shape(params);
    let qx = s.b.re / s.a.re;
    let qy = -s.sign * s.b.im / s.a.re;
    let px = -s.a.im * qx + s.b.im;
    let py = -s.a.im * qy + s.sign * s.b.re;
    ([qx, qy], [px, py])
}

/// Scalar width and current coefficients for arbitrary complex parameters:
/// `U = 1/Re(a)` and `V = -Im(a)` (the sign convention that makes the
/// current density `j = rho (p + V (x - q))`).
pub fn gaussian_width(params: &CoherentParams) -> (f64, f64) {
    let s = shape(params);
    (1.0 / s.a.re, -s.a.im)
}

/// All second moments for arbitrary complex parameters.
pub fn gaussian_dispersions(params: &CoherentParams, t: f64) -> DispersionSet {
    let s = shape(params);
    let u = s.a.re;
    let v = s.a.im;
    let dx2 = 1.0 / (2.0 * u);
    let dp2 = (u * u + v * v) / (2.0 * u);
    let cov = -v / (2.0 * u);
    DispersionSet { dx2, dy2: dx2, dpx2: dp2, dpy2: dp2, dxpx: cov, dypy: cov, t }
}

/// Assembled packet summary at time `t` for arbitrary complex parameters.
pub fn gaussian_moments(params: &CoherentParams, t: f64) -> PacketMoments {
    let evolved = evolve_params(params, t);
    let (q, p) = gaussian_center(&evolved);
    let (u, v) = gaussian_width(&evolved);
    PacketMoments {
        q,
        p,
        u: [[u, 0.0], [0.0, u]],
        v: [[v, 0.0], [0.0, v]],
        t,
    }
}

fn require_real_gauge(params: &CoherentParams) -> Result<(f64, f64)> {
    if !params.is_real_gauge() {
        return Err(Error::NonRealGauge);
    }
    Ok((params.alpha().re, params.beta().re))
}

/// Center `q` and momentum `p` at time `t` for real `(alpha, beta)`:
/// `q = (beta cos t / (1+alpha), ± beta sin t / (1-alpha))` with the sign set
/// by chirality (the left-handed branch moves toward -y first), and
/// `p = dq/dt`.
pub fn packet_center(params: &CoherentParams, t: f64) -> Result<([f64; 2], [f64; 2])> {
    let (alpha, beta) = require_real_gauge(params)?;
    let s = params.chirality().sign();
    let q = [
        beta * t.cos() / (1.0 + alpha),
        s * beta * t.sin() / (1.0 - alpha),
    ];
    let p = [
        -beta * t.sin() / (1.0 + alpha),
        s * beta * t.cos() / (1.0 - alpha),
    ];
    Ok((q, p))
}

/// Width and phase matrices at time `t` for real `alpha`:
/// `U = (|1 - alpha e^{-2it}|^2 / (1 - alpha^2)) I` and
/// `V = (2 alpha sin 2t / |1 - alpha e^{-2it}|^2) I`.
///
/// For real `alpha`, `|1 - alpha e^{2it}| = |1 - alpha e^{-2it}|`; the
/// negative-exponent form is used uniformly.
pub fn width_matrices(params: &CoherentParams, t: f64) -> Result<([[f64; 2]; 2], [[f64; 2]; 2])> {
    if params.alpha().im != 0.0 || params.alpha().re < 0.0 {
        return Err(Error::NonRealGauge);
    }
    let alpha = params.alpha().re;
    let d2 = (C64::new(1.0, 0.0) - alpha * C64::from_polar(1.0, -2.0 * t)).norm_sqr();
    let u = d2 / (1.0 - alpha * alpha);
    let v = 2.0 * alpha * (2.0 * t).sin() / d2;
    Ok(([[u, 0.0], [0.0, u]], [[v, 0.0], [0.0, v]]))
}

fn det2(m: &[[f64; 2]; 2]) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn inv2(m: &[[f64; 2]; 2]) -> Result<[[f64; 2]; 2]> {
    let det = det2(m);
    if det <= 0.0 {
        return Err(Error::SingularWidth(det));
    }
    Ok([
        [m[1][1] / det, -m[0][1] / det],
        [-m[1][0] / det, m[0][0] / det],
    ])
}

/// Density and current field at a point, in the literal unnormalized form
/// `rho(x) = exp(-(x-q) U^{-1} (x-q))` (peak value 1) and
/// `j(x) = rho(x) (p + V (x - q))`.
pub fn density_and_current(moments: &PacketMoments, x: [f64; 2]) -> Result<(f64, [f64; 2])> {
    let uinv = inv2(&moments.u)?;
    let d = [x[0] - moments.q[0], x[1] - moments.q[1]];
    let quad = d[0] * (uinv[0][0] * d[0] + uinv[0][1] * d[1])
        + d[1] * (uinv[1][0] * d[0] + uinv[1][1] * d[1]);
    let rho = (-quad).exp();
    let j = [
        rho * (moments.p[0] + moments.v[0][0] * d[0] + moments.v[0][1] * d[1]),
        rho * (moments.p[1] + moments.v[1][0] * d[0] + moments.v[1][1] * d[1]),
    ];
    Ok((rho, j))
}

/// Density normalized to unit integral: the literal form divided by
/// `pi sqrt(det U)`; equals `|Psi|^2`.
pub fn density_normalized(moments: &PacketMoments, x: [f64; 2]) -> Result<f64> {
    let det = det2(&moments.u);
    if det <= 0.0 {
        return Err(Error::SingularWidth(det));
    }
    let (rho, _) = density_and_current(moments, x)?;
    Ok(rho / (std::f64::consts::PI * det.sqrt()))
}

/// Dispersions at time `t` for real `alpha`:
/// `<dx^2> = <dy^2> = (1/2) |1-alpha e^{-2it}|^2 / (1-alpha^2)`,
/// `<dp^2>` with its squeezing and breathing terms, and the symmetrized
/// covariance `alpha sin 2t / (1-alpha^2)`.
pub fn dispersions(params: &CoherentParams, t: f64) -> Result<DispersionSet> {
    if params.alpha().im != 0.0 || params.alpha().re < 0.0 {
        return Err(Error::NonRealGauge);
    }
    let alpha = params.alpha().re;
    let a2 = alpha * alpha;
    let d2 = (C64::new(1.0, 0.0) - alpha * C64::from_polar(1.0, -2.0 * t)).norm_sqr();
    let sin2t = (2.0 * t).sin();
    let dx2 = 0.5 * d2 / (1.0 - a2);
    let dp2 = 2.0 * a2 * sin2t * sin2t / ((1.0 - a2) * d2) + 0.5 * (1.0 - a2) / d2;
    let cov = alpha * sin2t / (1.0 - a2);
    Ok(DispersionSet { dx2, dy2: dx2, dpx2: dp2, dpy2: dp2, dxpx: cov, dypy: cov, t })
}

/// Robertson–Schrödinger combinations `<dx^2><dp_x^2> - <dx dp_x>^2` along
/// `x` and `y`; both equal 1/4 for this family.
pub fn rs_determinant(d: &DispersionSet) -> (f64, f64) {
    (
        d.dx2 * d.dpx2 - d.dxpx * d.dxpx,
        d.dy2 * d.dpy2 - d.dypy * d.dypy,
    )
}

/// Ellipse traced by the packet center for real parameters: semi-axes
/// `beta/(1-alpha)` (major) and `beta/(1+alpha)` (minor), eccentricity
/// `2 sqrt(alpha) / (1+alpha)`.
pub fn classical_ellipse(params: &CoherentParams) -> Result<EllipseGeometry> {
    let (alpha, beta) = require_real_gauge(params)?;
    if beta < 0.0 {
        return Err(Error::InvalidParameter(
            "classical_ellipse requires beta >= 0".into(),
        ));
    }
    Ok(EllipseGeometry {
        semi_major: beta / (1.0 - alpha),
        semi_minor: beta / (1.0 + alpha),
        eccentricity: 2.0 * alpha.sqrt() / (1.0 + alpha),
        degenerate: beta == 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::Chirality;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::PI;

    fn left(alpha: f64, beta: f64) -> CoherentParams {
        CoherentParams::real(alpha, beta, Chirality::Left).unwrap()
    }

    #[test]
    fn evolution_trivialities() {
        let p = left(0.4, 5.0);
        let same = evolve_params(&p, 0.0);
        assert_eq!(same.alpha(), p.alpha());
        assert_eq!(same.beta(), p.beta());

        let half = evolve_params(&p, PI);
        assert_relative_eq!(half.alpha().re, 0.4, max_relative = 1e-12);
        assert_abs_diff_eq!(half.alpha().im, 0.0, epsilon = 1e-14);
        assert_relative_eq!(half.beta().re, -5.0, max_relative = 1e-12);

        let full = evolve_params(&p, 2.0 * PI);
        assert!((full.alpha() - p.alpha()).norm() < 1e-14);
        assert!((full.beta() - p.beta()).norm() < 1e-14);
    }

    #[test]
    fn center_at_rest_and_at_reference_point() {
        let ground = left(0.0, 0.0);
        let (q, p) = packet_center(&ground, 1.3).unwrap();
        assert_eq!(q, [0.0, 0.0]);
        assert_eq!(p, [0.0, 0.0]);

        let fig1 = left(0.4, 5.0);
        let (q, _) = packet_center(&fig1, 0.0).unwrap();
        assert_relative_eq!(q[0], 25.0 / 7.0, max_relative = 1e-14);
        assert_abs_diff_eq!(q[1], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn momentum_is_time_derivative_of_center() {
        for ch in [Chirality::Left, Chirality::Right] {
            let params = CoherentParams::real(0.3, 2.0, ch).unwrap();
            let dt = 1e-6;
            for &t in &[0.0, 0.8, 2.1] {
                let (_, p) = packet_center(&params, t).unwrap();
                let (qp, _) = packet_center(&params, t + dt).unwrap();
                let (qm, _) = packet_center(&params, t - dt).unwrap();
                assert_abs_diff_eq!(p[0], (qp[0] - qm[0]) / (2.0 * dt), epsilon = 1e-6);
                assert_abs_diff_eq!(p[1], (qp[1] - qm[1]) / (2.0 * dt), epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn gaussian_engine_agrees_with_real_gauge_formulas() {
        for ch in [Chirality::Left, Chirality::Right] {
            let params = CoherentParams::real(0.4, 5.0, ch).unwrap();
            for &t in &[0.0, 0.37, 1.9, 4.4] {
                let (q, p) = packet_center(&params, t).unwrap();
                let m = gaussian_moments(&params, t);
                assert_abs_diff_eq!(q[0], m.q[0], epsilon = 1e-12);
                assert_abs_diff_eq!(q[1], m.q[1], epsilon = 1e-12);
                assert_abs_diff_eq!(p[0], m.p[0], epsilon = 1e-12);
                assert_abs_diff_eq!(p[1], m.p[1], epsilon = 1e-12);
                let (u, v) = width_matrices(&params, t).unwrap();
                assert_abs_diff_eq!(u[0][0], m.u[0][0], epsilon = 1e-12);
                assert_abs_diff_eq!(v[0][0], m.v[0][0], epsilon = 1e-12);
                let d = dispersions(&params, t).unwrap();
                let dg = gaussian_dispersions(&evolve_params(&params, t), t);
                assert_abs_diff_eq!(d.dx2, dg.dx2, epsilon = 1e-12);
                assert_abs_diff_eq!(d.dpx2, dg.dpx2, epsilon = 1e-12);
                assert_abs_diff_eq!(d.dxpx, dg.dxpx, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn width_matrix_reference_values() {
        let p = left(0.4, 5.0);
        let (u0, v0) = width_matrices(&p, 0.0).unwrap();
        assert_relative_eq!(u0[0][0], 0.36 / 0.84, max_relative = 1e-13);
        assert_abs_diff_eq!(v0[0][0], 0.0, epsilon = 1e-15);
        let (u1, v1) = width_matrices(&p, PI / 4.0).unwrap();
        assert_relative_eq!(u1[0][0], 1.16 / 0.84, max_relative = 1e-13);
        assert_relative_eq!(v1[0][0], 0.8 / 1.16, max_relative = 1e-13);
        assert_eq!(u1[0][1], 0.0);
    }

    #[test]
    fn dispersion_reference_values() {
        let free = left(0.0, 0.0);
        for &t in &[0.0, 0.5, 2.2] {
            let d = dispersions(&free, t).unwrap();
            assert_abs_diff_eq!(d.dx2, 0.5, epsilon = 1e-15);
            assert_abs_diff_eq!(d.dpx2, 0.5, epsilon = 1e-15);
            assert_abs_diff_eq!(d.dxpx, 0.0, epsilon = 1e-15);
        }
        let d0 = dispersions(&left(0.4, 5.0), 0.0).unwrap();
        assert_relative_eq!(d0.dx2, 0.5 * 0.6 / 1.4, max_relative = 1e-13);
        assert_abs_diff_eq!(d0.dxpx, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn rs_determinant_is_one_quarter() {
        for &alpha in &[0.0, 0.4, 0.7] {
            let p = left(alpha, 2.0);
            for k in 0..16 {
                let t = 2.0 * PI * k as f64 / 16.0 + 0.05;
                let (rx, ry) = rs_determinant(&dispersions(&p, t).unwrap());
                assert_abs_diff_eq!(rx, 0.25, epsilon = 1e-12);
                assert_abs_diff_eq!(ry, 0.25, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn width_oscillation_bounds() {
        let alpha = 0.4;
        let p = left(alpha, 5.0);
        let lo = 0.5 * (1.0 - alpha) / (1.0 + alpha);
        let hi = 0.5 * (1.0 + alpha) / (1.0 - alpha);
        let mut seen_lo = f64::MAX;
        let mut seen_hi = f64::MIN;
        for k in 0..=512 {
            let t = PI * k as f64 / 512.0;
            let d = dispersions(&p, t).unwrap().dx2;
            seen_lo = seen_lo.min(d);
            seen_hi = seen_hi.max(d);
            assert!(d >= lo - 1e-12 && d <= hi + 1e-12);
        }
        assert_abs_diff_eq!(seen_lo, lo, epsilon = 1e-12);
        assert_abs_diff_eq!(seen_hi, hi, epsilon = 1e-12);
        // extremes at t = 0 and t = pi/2
        assert_abs_diff_eq!(dispersions(&p, 0.0).unwrap().dx2, lo, epsilon = 1e-14);
        assert_abs_diff_eq!(dispersions(&p, PI / 2.0).unwrap().dx2, hi, epsilon = 1e-12);
    }

    #[test]
    fn center_stays_on_classical_ellipse() {
        for ch in [Chirality::Left, Chirality::Right] {
            let alpha = 0.4;
            let beta = 5.0;
            let p = CoherentParams::real(alpha, beta, ch).unwrap();
            for k in 0..64 {
                let t = 2.0 * PI * k as f64 / 64.0;
                let (q, _) = packet_center(&p, t).unwrap();
                let lhs = (q[0] * (1.0 + alpha) / beta).powi(2)
                    + (q[1] * (1.0 - alpha) / beta).powi(2);
                assert_abs_diff_eq!(lhs, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn density_and_current_reference_values() {
        let p = left(0.0, 0.0);
        let m = gaussian_moments(&p, 0.0);
        let (rho, j) = density_and_current(&m, [0.7, -0.3]).unwrap();
        assert_relative_eq!(rho, (-0.58f64).exp(), max_relative = 1e-13);
        assert_eq!(j, [0.0, 0.0]);

        // peak value and current at the center
        let p2 = left(0.3, 2.0);
        let m2 = gaussian_moments(&p2, 0.5);
        let (rho_peak, j_peak) = density_and_current(&m2, m2.q).unwrap();
        assert_abs_diff_eq!(rho_peak, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(j_peak[0], m2.p[0], epsilon = 1e-15);
        assert_abs_diff_eq!(j_peak[1], m2.p[1], epsilon = 1e-15);
    }

    #[test]
    fn singular_width_is_rejected() {
        let mut m = gaussian_moments(&left(0.2, 1.0), 0.0);
        m.u = [[0.0, 0.0], [0.0, 0.0]];
        assert!(matches!(
            density_and_current(&m, [0.0, 0.0]),
            Err(Error::SingularWidth(_))
        ));
    }

    #[test]
    fn ellipse_geometry_values() {
        let e = classical_ellipse(&left(0.4, 5.0)).unwrap();
        assert_relative_eq!(e.semi_major, 5.0 / 0.6, max_relative = 1e-14);
        assert_relative_eq!(e.semi_minor, 5.0 / 1.4, max_relative = 1e-14);
        assert_relative_eq!(e.eccentricity, 2.0 * 0.4f64.sqrt() / 1.4, max_relative = 1e-14);
        assert!(!e.degenerate);

        let circle = classical_ellipse(&left(0.0, 3.0)).unwrap();
        assert_eq!(circle.semi_major, 3.0);
        assert_eq!(circle.semi_minor, 3.0);
        assert_eq!(circle.eccentricity, 0.0);

        let point = classical_ellipse(&left(0.3, 0.0)).unwrap();
        assert!(point.degenerate);
    }

    #[test]
    fn ellipse_identity_holds() {
        for &alpha in &[0.05, 0.3, 0.6, 0.9] {
            let e = classical_ellipse(&left(alpha, 2.0)).unwrap();
            let ratio = e.semi_minor / e.semi_major;
            assert_abs_diff_eq!(e.eccentricity * e.eccentricity + ratio * ratio, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn complex_parameters_are_rejected_by_real_gauge_ops() {
        let p = CoherentParams::new(C64::new(0.2, 0.1), C64::new(1.0, 0.0), Chirality::Left)
            .unwrap();
        assert!(matches!(packet_center(&p, 0.0), Err(Error::NonRealGauge)));
        assert!(matches!(dispersions(&p, 0.0), Err(Error::NonRealGauge)));
        assert!(matches!(classical_ellipse(&p), Err(Error::NonRealGauge)));
    }
}
