//! Polar quadrature grids, inner products, and moment extraction — the
//! shared numerical substrate for all oracles.
//!
//! Radial nodes are Gauss–Legendre points mapped to `[0, r_max]` (the packet
//! is displaced far from the origin, so a finite-interval rule with explicit
//! `r_max` tracks the support better than an origin-weighted rule); the
//! angular direction uses uniform nodes on `[0, 2 pi)` where the trapezoid
//! rule is spectrally exact. All reductions run in a fixed serial order with
//! compensated summation, so results are bit-reproducible.

use std::sync::{Arc, OnceLock};

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::state::{amplitude, CoherentParams, PolarPoint};

/// Hard cap on radial nodes before a build reports a resource limit.
pub const MAX_RADIAL_NODES: usize = 3000;
/// Hard cap on angular nodes.
pub const MAX_ANGULAR_NODES: usize = 2048;

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on the
/// three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_n(x) and P'_n(x)
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Weights for the `m`-th derivative at `z` over arbitrary nodes `x`
/// (Fornberg's recursion).
pub fn fornberg_weights(z: f64, x: &[f64], m: usize) -> Vec<f64> {
    let n = x.len();
    assert!(m < n);
    let mut c = vec![0.0; n * (m + 1)];
    let idx = |i: usize, k: usize| i * (m + 1) + k;
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[idx(0, 0)] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[idx(i, k)] = c1 * (k as f64 * c[idx(i - 1, k - 1)] - c5 * c[idx(i - 1, k)]) / c2;
                }
                c[idx(i, 0)] = -c1 * c5 * c[idx(i - 1, 0)] / c2;
            }
            for k in (1..=mn).rev() {
                c[idx(j, k)] = (c4 * c[idx(j, k)] - k as f64 * c[idx(j, k - 1)]) / c3;
            }
            c[idx(j, 0)] = c4 * c[idx(j, 0)] / c3;
        }
        c1 = c2;
    }
    (0..n).map(|i| c[idx(i, m)]).collect()
}

/// Compensated (Kahan) accumulator.
#[derive(Debug, Clone, Copy, Default)]
struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    fn add(&mut self, term: f64) {
        let y = term - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

/// Complex compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
struct KahanC {
    re: Kahan,
    im: Kahan,
}

impl KahanC {
    fn add(&mut self, term: C64) {
        self.re.add(term.re);
        self.im.add(term.im);
    }

    fn value(&self) -> C64 {
        C64::new(self.re.sum, self.im.sum)
    }
}

/// Tensor-product polar quadrature grid. Radial nodes exclude the origin
/// (Gauss nodes are interior), so `1/r` factors are always finite.
pub struct PolarGrid {
    r_nodes: Vec<f64>,
    r_weights: Vec<f64>,
    phi_nodes: Vec<f64>,
    r_max: f64,
    bary: OnceLock<Vec<f64>>,
    fft: OnceLock<(Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>)>,
}

impl std::fmt::Debug for PolarGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PolarGrid")
            .field("n_r", &self.n_r())
            .field("n_phi", &self.n_phi())
            .field("r_max", &self.r_max)
            .finish()
    }
}

impl PolarGrid {
    /// Grid with the given node counts. `n_phi` must be even so the spectral
    /// derivative can treat the Nyquist mode consistently.
    pub fn with_nodes(r_max: f64, n_r: usize, n_phi: usize) -> Result<Arc<Self>> {
        if !(r_max > 0.0) || n_r < 4 || n_phi < 4 || n_phi % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "bad grid spec: r_max={r_max}, n_r={n_r}, n_phi={n_phi}"
            )));
        }
        if n_r > MAX_RADIAL_NODES || n_phi > MAX_ANGULAR_NODES {
            return Err(Error::ResourceLimit(format!(
                "requested grid {n_r} x {n_phi} exceeds caps {MAX_RADIAL_NODES} x {MAX_ANGULAR_NODES}"
            )));
        }
        let (x, w) = gauss_legendre(n_r);
        let r_nodes: Vec<f64> = x.iter().map(|&xi| (xi + 1.0) * r_max / 2.0).collect();
        let r_weights: Vec<f64> = w.iter().map(|&wi| wi * r_max / 2.0).collect();
        let phi_nodes: Vec<f64> = (0..n_phi)
            .map(|j| 2.0 * std::f64::consts::PI * j as f64 / n_phi as f64)
            .collect();
        Ok(Arc::new(PolarGrid {
            r_nodes,
            r_weights,
            phi_nodes,
            r_max,
            bary: OnceLock::new(),
            fft: OnceLock::new(),
        }))
    }

    /// Grid sized for one state: `r_max` covers the classical reach plus
    /// eight packet widths, and node counts are refined until the
    /// normalization integral of the state is 1 within `accuracy`.
    pub fn build(params: &CoherentParams, accuracy: f64) -> Result<Arc<Self>> {
        Self::build_for(&[*params], accuracy)
    }

    /// Shared grid for several states (overlaps need both on one grid).
    pub fn build_for(states: &[CoherentParams], accuracy: f64) -> Result<Arc<Self>> {
        if states.is_empty() || accuracy <= 0.0 {
            return Err(Error::InvalidParameter("need at least one state and accuracy > 0".into()));
        }
        let r_max = states.iter().map(|p| radial_extent(p)).fold(0.0, f64::max);
        let mut n_r = states
            .iter()
            .map(|p| quadrature_radial_count(p, r_max))
            .max()
            .unwrap();
        let mut n_phi = states
            .iter()
            .map(|p| angular_count_for(p, r_max))
            .max()
            .unwrap();
        loop {
            let grid = Self::with_nodes(r_max, n_r, n_phi)?;
            let ok = states.iter().all(|p| {
                let f = WaveField::sample(p, &grid);
                let norm = inner_product(&f, &f).expect("same grid").re;
                (norm - 1.0).abs() <= accuracy
            });
            if ok {
                return Ok(grid);
            }
            // radial resolution is the usual limiter; alternate with phi
            if n_r < MAX_RADIAL_NODES {
                n_r = (n_r * 2).min(MAX_RADIAL_NODES);
            } else if n_phi < MAX_ANGULAR_NODES {
                n_phi = (n_phi * 2).min(MAX_ANGULAR_NODES);
            } else {
                return Err(Error::ResourceLimit(format!(
                    "normalization not within {accuracy:.1e} at grid caps {MAX_RADIAL_NODES} x {MAX_ANGULAR_NODES}"
                )));
            }
        }
    }

    pub fn n_r(&self) -> usize {
        self.r_nodes.len()
    }

    pub fn n_phi(&self) -> usize {
        self.phi_nodes.len()
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn r_nodes(&self) -> &[f64] {
        &self.r_nodes
    }

    pub fn r_weights(&self) -> &[f64] {
        &self.r_weights
    }

    pub fn phi_nodes(&self) -> &[f64] {
        &self.phi_nodes
    }

    pub fn d_phi(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.n_phi() as f64
    }

    /// Full quadrature weight `w_i r_i d_phi` of node `(i, j)`.
    pub fn node_weight(&self, i: usize) -> f64 {
        self.r_weights[i] * self.r_nodes[i] * self.d_phi()
    }

    fn bary_weights(&self) -> &[f64] {
        self.bary.get_or_init(|| {
            let r = &self.r_nodes;
            let scale = 4.0 / self.r_max;
            r.iter()
                .enumerate()
                .map(|(i, &ri)| {
                    let mut prod = 1.0;
                    for (j, &rj) in r.iter().enumerate() {
                        if j != i {
                            prod *= scale * (ri - rj);
                        }
                    }
                    1.0 / prod
                })
                .collect()
        })
    }

    fn fft_pair(&self) -> &(Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
        self.fft.get_or_init(|| {
            let mut planner = FftPlanner::new();
            (
                planner.plan_fft_forward(self.n_phi()),
                planner.plan_fft_inverse(self.n_phi()),
            )
        })
    }
}

/// Complex amplitudes sampled on a polar grid, row-major `[r][phi]`.
#[derive(Debug, Clone)]
pub struct WaveField {
    values: Vec<C64>,
    grid: Arc<PolarGrid>,
}

impl WaveField {
    pub fn sample(params: &CoherentParams, grid: &Arc<PolarGrid>) -> Self {
        Self::from_fn(grid, |r, phi| amplitude(params, PolarPoint::new(r, phi)))
    }

    pub fn from_fn(grid: &Arc<PolarGrid>, mut f: impl FnMut(f64, f64) -> C64) -> Self {
        let n_r = grid.n_r();
        let n_phi = grid.n_phi();
        let mut values = Vec::with_capacity(n_r * n_phi);
        for i in 0..n_r {
            for j in 0..n_phi {
                values.push(f(grid.r_nodes[i], grid.phi_nodes[j]));
            }
        }
        WaveField { values, grid: Arc::clone(grid) }
    }

    pub fn grid(&self) -> &Arc<PolarGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> C64 {
        self.values[i * self.grid.n_phi() + j]
    }

    pub fn same_grid(&self, other: &WaveField) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid)
    }

    pub fn scaled(&self, c: C64) -> WaveField {
        WaveField {
            values: self.values.iter().map(|v| v * c).collect(),
            grid: Arc::clone(&self.grid),
        }
    }

    pub fn zip_with(&self, other: &WaveField, f: impl Fn(C64, C64) -> C64) -> Result<WaveField> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch);
        }
        Ok(WaveField {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            grid: Arc::clone(&self.grid),
        })
    }

    pub fn add(&self, other: &WaveField) -> Result<WaveField> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &WaveField) -> Result<WaveField> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Grid norm `sqrt(<f|f>)`.
    pub fn norm(&self) -> f64 {
        inner_product(self, self).expect("same grid").re.sqrt()
    }

    /// Pointwise multiply by a function of the node coordinates.
    pub fn mul_fn(&self, mut f: impl FnMut(f64, f64) -> C64) -> WaveField {
        let grid = &self.grid;
        let n_phi = grid.n_phi();
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, &v)| v * f(grid.r_nodes[k / n_phi], grid.phi_nodes[k % n_phi]))
            .collect();
        WaveField { values, grid: Arc::clone(grid) }
    }

    /// Spectrally accurate radial derivative (global barycentric
    /// differentiation on the Gauss–Legendre nodes). Used for moment
    /// extraction where machine-level accuracy matters.
    pub fn radial_derivative_spectral(&self) -> WaveField {
        let grid = &self.grid;
        let n_r = grid.n_r();
        let n_phi = grid.n_phi();
        let bw = grid.bary_weights();
        let r = grid.r_nodes();
        let mut out = vec![C64::new(0.0, 0.0); n_r * n_phi];
        let mut row = vec![0.0f64; n_r];
        for i in 0..n_r {
            let mut diag = 0.0;
            for j in 0..n_r {
                if j != i {
                    let d = (bw[j] / bw[i]) / (r[i] - r[j]);
                    row[j] = d;
                    diag -= d;
                }
            }
            row[i] = diag;
            let out_row = &mut out[i * n_phi..(i + 1) * n_phi];
            for (j, &dij) in row.iter().enumerate() {
                let src = &self.values[j * n_phi..(j + 1) * n_phi];
                for (o, &s) in out_row.iter_mut().zip(src) {
                    *o += dij * s;
                }
            }
        }
        WaveField { values: out, grid: Arc::clone(grid) }
    }

    /// Radial derivative by sliding-window barycentric stencils on the
    /// non-uniform nodes (window 5 gives 4th-order first derivatives; second
    /// derivatives use a wider window). One-sided windows near the ends are
    /// the accuracy-degraded boundary band that interior norms quarantine.
    pub fn radial_derivative_fd(&self, order: usize, window: usize) -> WaveField {
        let grid = &self.grid;
        let n_r = grid.n_r();
        let n_phi = grid.n_phi();
        let r = grid.r_nodes();
        assert!(window <= n_r && order < window);
        let mut out = vec![C64::new(0.0, 0.0); n_r * n_phi];
        for i in 0..n_r {
            let start = i.saturating_sub(window / 2).min(n_r - window);
            let w = fornberg_weights(r[i], &r[start..start + window], order);
            let out_row = &mut out[i * n_phi..(i + 1) * n_phi];
            for (k, &wk) in w.iter().enumerate() {
                let src = &self.values[(start + k) * n_phi..(start + k + 1) * n_phi];
                for (o, &s) in out_row.iter_mut().zip(src) {
                    *o += wk * s;
                }
            }
        }
        WaveField { values: out, grid: Arc::clone(grid) }
    }

    /// Spectral angular derivative of the given order (first-derivative
    /// Nyquist mode is zeroed; the second derivative keeps it as `-(m/2)^2`).
    pub fn phi_derivative(&self, order: usize) -> WaveField {
        assert!(order == 1 || order == 2);
        let grid = &self.grid;
        let m = grid.n_phi();
        let (fwd, inv) = grid.fft_pair();
        let mut out = self.values.clone();
        let mult: Vec<C64> = (0..m)
            .map(|k| {
                let kk = if k <= m / 2 { k as f64 } else { k as f64 - m as f64 };
                if order == 1 {
                    if k == m / 2 {
                        C64::new(0.0, 0.0)
                    } else {
                        C64::new(0.0, kk)
                    }
                } else {
                    C64::new(-kk * kk, 0.0)
                }
            })
            .collect();
        let scale = 1.0 / m as f64;
        for row in out.chunks_mut(m) {
            fwd.process(row);
            for (v, &mu) in row.iter_mut().zip(&mult) {
                *v *= mu * scale;
            }
            inv.process(row);
        }
        WaveField { values: out, grid: Arc::clone(&self.grid) }
    }
}

/// Discrete `<f|g> = sum w_i r_i dphi conj(f) g`, compensated and in fixed
/// order for reproducibility.
pub fn inner_product(f: &WaveField, g: &WaveField) -> Result<C64> {
    if !f.same_grid(g) {
        return Err(Error::GridMismatch);
    }
    let grid = f.grid();
    let n_phi = grid.n_phi();
    let mut acc = KahanC::default();
    for i in 0..grid.n_r() {
        let w = grid.node_weight(i);
        let fr = &f.values[i * n_phi..(i + 1) * n_phi];
        let gr = &g.values[i * n_phi..(i + 1) * n_phi];
        for (a, b) in fr.iter().zip(gr) {
            acc.add(w * a.conj() * b);
        }
    }
    Ok(acc.value())
}

/// First and second cartesian moments of a sampled wavefunction. Raw
/// expectation values are normalized by `<f|f>`; momenta use the spectral
/// derivatives.
#[derive(Debug, Clone, Copy)]
pub struct MomentTable {
    pub norm: f64,
    pub x: f64,
    pub y: f64,
    pub x2: f64,
    pub y2: f64,
    pub px: f64,
    pub py: f64,
    pub px2: f64,
    pub py2: f64,
    /// Symmetrized `<x p_x>` (uncentered).
    pub xpx: f64,
    /// Symmetrized `<y p_y>` (uncentered).
    pub ypy: f64,
    /// Set when the input field is visibly unnormalized, hinting at an
    /// under-resolved grid.
    pub warning: Option<MomentWarning>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MomentWarning {
    UnnormalizedInput { norm: f64 },
}

impl MomentTable {
    pub fn dx2(&self) -> f64 {
        self.x2 - self.x * self.x
    }

    pub fn dy2(&self) -> f64 {
        self.y2 - self.y * self.y
    }

    pub fn dpx2(&self) -> f64 {
        self.px2 - self.px * self.px
    }

    pub fn dpy2(&self) -> f64 {
        self.py2 - self.py * self.py
    }

    pub fn dxpx(&self) -> f64 {
        self.xpx - self.x * self.px
    }

    pub fn dypy(&self) -> f64 {
        self.ypy - self.y * self.py
    }

    /// `<H> = (<p^2> + <r^2>) / 2`.
    pub fn energy(&self) -> f64 {
        0.5 * (self.px2 + self.py2 + self.x2 + self.y2)
    }
}

/// Moments `<x>, <y>, <x^2>, <y^2>, <p>, <p^2>` and symmetrized covariances
/// from a sampled field, via `x = r cos phi`, `y = r sin phi` and
/// `d_x = cos phi d_r - (sin phi / r) d_phi` (and the `y` analogue).
pub fn cartesian_moments(f: &WaveField) -> MomentTable {
    let grid = f.grid();
    let n_phi = grid.n_phi();
    let fr = f.radial_derivative_spectral();
    let fp = f.phi_derivative(1);

    let mut norm = Kahan::default();
    let mut sx = Kahan::default();
    let mut sy = Kahan::default();
    let mut sx2 = Kahan::default();
    let mut sy2 = Kahan::default();
    let mut spx = KahanC::default();
    let mut spy = KahanC::default();
    let mut spx2 = Kahan::default();
    let mut spy2 = Kahan::default();
    let mut sxpx = KahanC::default();
    let mut sypy = KahanC::default();

    for i in 0..grid.n_r() {
        let w = grid.node_weight(i);
        let r = grid.r_nodes()[i];
        for j in 0..n_phi {
            let phi = grid.phi_nodes()[j];
            let (sin, cos) = phi.sin_cos();
            let x = r * cos;
            let y = r * sin;
            let v = f.value(i, j);
            let dr = fr.value(i, j);
            let dp = fp.value(i, j);
            let fx = cos * dr - sin / r * dp;
            let fy = sin * dr + cos / r * dp;
            let dens = w * v.norm_sqr();
            norm.add(dens);
            sx.add(dens * x);
            sy.add(dens * y);
            sx2.add(dens * x * x);
            sy2.add(dens * y * y);
            let minus_i = C64::new(0.0, -1.0);
            spx.add(w * v.conj() * minus_i * fx);
            spy.add(w * v.conj() * minus_i * fy);
            spx2.add(w * fx.norm_sqr());
            spy2.add(w * fy.norm_sqr());
            sxpx.add(w * v.conj() * x * minus_i * fx);
            sypy.add(w * v.conj() * y * minus_i * fy);
        }
    }

    let n = norm.sum;
    let warning = if (n - 1.0).abs() > 1e-6 {
        Some(MomentWarning::UnnormalizedInput { norm: n })
    } else {
        None
    };
    MomentTable {
        norm: n,
        x: sx.sum / n,
        y: sy.sum / n,
        x2: sx2.sum / n,
        y2: sy2.sum / n,
        px: spx.value().re / n,
        py: spy.value().re / n,
        px2: spx2.sum / n,
        py2: spy2.sum / n,
        xpx: sxpx.value().re / n,
        ypy: sypy.value().re / n,
        warning,
    }
}

fn packet_width_max(params: &CoherentParams) -> f64 {
    let a = params.alpha().norm();
    (0.5 * (1.0 + a) / (1.0 - a)).sqrt()
}

fn packet_width_min(params: &CoherentParams) -> f64 {
    let a = params.alpha().norm();
    (0.5 * (1.0 - a) / (1.0 + a)).sqrt()
}

/// `r_max = |beta|/(1-|alpha|) + 8 * max packet width`.
pub fn radial_extent(params: &CoherentParams) -> f64 {
    params.beta().norm() / (1.0 - params.alpha().norm()) + 8.0 * packet_width_max(params)
}

fn quadrature_radial_count(params: &CoherentParams, r_max: f64) -> usize {
    let n = (2.5 * r_max / packet_width_min(params)).ceil() as usize;
    n.clamp(64, MAX_RADIAL_NODES)
}

/// Angular node count: smallest power of two above both the
/// `8 sqrt(|beta| r_max / (1-|alpha|)) + 32` floor and the bandwidth of the
/// `exp(beta r e^{i phi} / (1-alpha))` factor over the packet support.
pub(crate) fn angular_count_for(params: &CoherentParams, r_max: f64) -> usize {
    let a = params.alpha().norm();
    let b = params.beta().norm();
    let floor1 = 8.0 * (b * r_max / (1.0 - a)).sqrt() + 32.0;
    let r_sig = (b / (1.0 - a) + 5.0 * packet_width_max(params)).min(r_max);
    let z_sig = b * r_sig / (1.0 - a);
    let floor2 = z_sig + 12.0 * z_sig.sqrt() + 16.0;
    let target = floor1.max(floor2);
    let mut m = 32;
    while (m as f64) < target && m < MAX_ANGULAR_NODES {
        m *= 2;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::Chirality;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::PI;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(6);
        // degree up to 2*6-1 = 11 on [-1,1]
        for k in 0..=11usize {
            let quad: f64 = x.iter().zip(&w).map(|(&xi, &wi)| wi * xi.powi(k as i32)).sum();
            let exact = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
            assert_abs_diff_eq!(quad, exact, epsilon = 1e-14);
        }
    }

    #[test]
    fn unit_function_integrates_to_disc_area() {
        let grid = PolarGrid::with_nodes(17.0, 80, 64).unwrap();
        let one = WaveField::from_fn(&grid, |_, _| C64::new(1.0, 0.0));
        let q = inner_product(&one, &one).unwrap();
        assert_relative_eq!(q.re, PI * 17.0 * 17.0, max_relative = 1e-13);
        assert_abs_diff_eq!(q.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn angular_harmonics_are_orthogonal() {
        let grid = PolarGrid::with_nodes(5.0, 16, 32).unwrap();
        let f = WaveField::from_fn(&grid, |r, phi| C64::from_polar(r, 2.0 * phi));
        let g = WaveField::from_fn(&grid, |r, phi| C64::from_polar(r * r, 2.0 * phi));
        // <f|g> integrates r^4 over [0, 5]: 2 pi * 5^6/6... with measure r dr:
        // int r * r * r^2 * r dr = int r^5 dr? no: conj(f) g r dr dphi with
        // |f| = r, |g| = r^2, equal phases -> int_0^5 r^4 dr * 2 pi
        let expect = 2.0 * PI * 5.0f64.powi(5) / 5.0;
        assert_relative_eq!(inner_product(&f, &g).unwrap().re, expect, max_relative = 1e-13);
        // different harmonics integrate to zero
        let h = WaveField::from_fn(&grid, |r, phi| C64::from_polar(r, 3.0 * phi));
        assert_abs_diff_eq!(inner_product(&f, &h).unwrap().norm(), 0.0, epsilon = 1e-11);
    }

    #[test]
    fn fornberg_reproduces_uniform_stencils() {
        let x = [-2.0, -1.0, 0.0, 1.0, 2.0];
        let w = fornberg_weights(0.0, &x, 1);
        let expect = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
        for (a, b) in w.iter().zip(expect) {
            assert_abs_diff_eq!(a, &b, epsilon = 1e-14);
        }
        let w2 = fornberg_weights(0.0, &x, 2);
        let expect2 = [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];
        for (a, b) in w2.iter().zip(expect2) {
            assert_abs_diff_eq!(a, &b, epsilon = 1e-13);
        }
    }

    #[test]
    fn spectral_derivatives_hit_machine_precision() {
        let grid = PolarGrid::with_nodes(10.0, 96, 64).unwrap();
        let f = WaveField::from_fn(&grid, |r, phi| {
            C64::from_polar((-((r - 4.0) / 1.3f64).powi(2)).exp(), 3.0 * phi)
        });
        let fr = f.radial_derivative_spectral();
        let fp = f.phi_derivative(1);
        let mut worst_r = 0.0f64;
        let mut worst_p = 0.0f64;
        for (i, &r) in grid.r_nodes().iter().enumerate() {
            for (j, _) in grid.phi_nodes().iter().enumerate() {
                let v = f.value(i, j);
                let dr_exact = v * (-2.0 * (r - 4.0) / (1.3 * 1.3));
                let dp_exact = v * C64::new(0.0, 3.0);
                worst_r = worst_r.max((fr.value(i, j) - dr_exact).norm());
                worst_p = worst_p.max((fp.value(i, j) - dp_exact).norm());
            }
        }
        assert!(worst_r < 1e-9, "radial spectral error {worst_r:.3e}");
        assert!(worst_p < 1e-12, "angular spectral error {worst_p:.3e}");
    }

    #[test]
    fn build_sizes_scale_with_parameters() {
        let easy = CoherentParams::real(0.0, 0.0, Chirality::Right).unwrap();
        let g0 = PolarGrid::build(&easy, 1e-10).unwrap();
        assert!(g0.n_r() <= 128 && g0.n_phi() <= 64, "{g0:?}");
        let f = WaveField::sample(&easy, &g0);
        assert_abs_diff_eq!(inner_product(&f, &f).unwrap().re, 1.0, epsilon = 1e-10);

        let fig1 = CoherentParams::real(0.4, 5.0, Chirality::Left).unwrap();
        let g1 = PolarGrid::build(&fig1, 1e-8).unwrap();
        assert!(g1.r_max() > 8.33, "r_max covers the classical reach");
        let f1 = WaveField::sample(&fig1, &g1);
        assert_abs_diff_eq!(inner_product(&f1, &f1).unwrap().re, 1.0, epsilon = 1e-8);

        let hard = CoherentParams::real(0.7, 6.0, Chirality::Right).unwrap();
        let g2 = PolarGrid::build(&hard, 1e-8).unwrap();
        let f2 = WaveField::sample(&hard, &g2);
        assert_abs_diff_eq!(inner_product(&f2, &f2).unwrap().re, 1.0, epsilon = 1e-8);
        assert!(g2.n_r() >= g1.n_r());
    }

    #[test]
    fn mismatched_grids_error() {
        let g1 = PolarGrid::with_nodes(5.0, 16, 16).unwrap();
        let g2 = PolarGrid::with_nodes(5.0, 16, 16).unwrap();
        let f = WaveField::from_fn(&g1, |_, _| C64::new(1.0, 0.0));
        let g = WaveField::from_fn(&g2, |_, _| C64::new(1.0, 0.0));
        assert!(matches!(inner_product(&f, &g), Err(Error::GridMismatch)));
    }

    #[test]
    fn ground_state_moments() {
        let ground = CoherentParams::real(0.0, 0.0, Chirality::Right).unwrap();
        let grid = PolarGrid::build(&ground, 1e-10).unwrap();
        let f = WaveField::sample(&ground, &grid);
        let mo = cartesian_moments(&f);
        assert!(mo.warning.is_none());
        assert_abs_diff_eq!(mo.x, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mo.y, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mo.x2, 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(mo.y2, 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(mo.px2, 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(mo.xpx, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(mo.energy(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn doubling_leaves_moments_stable() {
        let params = CoherentParams::real(0.4, 5.0, Chirality::Left).unwrap();
        let base = PolarGrid::build(&params, 1e-8).unwrap();
        let fine = PolarGrid::with_nodes(base.r_max(), base.n_r() * 2, base.n_phi() * 2).unwrap();
        let m1 = cartesian_moments(&WaveField::sample(&params, &base));
        let m2 = cartesian_moments(&WaveField::sample(&params, &fine));
        assert_abs_diff_eq!(m1.x, m2.x, epsilon = 1e-8);
        assert_abs_diff_eq!(m1.px2, m2.px2, epsilon = 1e-8);
        assert_abs_diff_eq!(m1.xpx, m2.xpx, epsilon = 1e-8);
    }
}
