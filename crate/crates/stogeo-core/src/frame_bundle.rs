//! Stochastic development on the orthonormal frame bundle.
//!
//! Simulates the coupled Stratonovich system
//!
//! ```text
//! dm^i = e^i_α ∘ (dx^α + u^α dt)
//! de^i_α = −Γ^i_jk e^k_α ∘ dm^j
//! ```
//!
//! with a midpoint predictor–corrector (weak order 1), per-step Gram–Schmidt
//! re-orthonormalization of the frame with respect to g(m), and chart
//! transitions on overlap. Also provides Itô parallel transport along sample
//! paths, `t(t←s) = e(t) e(s)⁻¹`, and the variation process (ζ, ρ) describing
//! the pathwise derivative of the Itô map under a bounded-variation
//! perturbation of the driving noise.

use crate::error::{Error, Result};
use crate::geometry::{ChartPoint, ChartedManifold};
use crate::{DMat, DVec};
use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Hard bound on pre-correction frame orthonormality drift per step; larger
/// drift means the step size is too large for the geometry.
pub const ORTHONORMALITY_HARD_BOUND: f64 = 1e-3;

/// Finite-difference step for the frame-direction drift Jacobian 𝒟.
const DRIFT_JACOBIAN_STEP: f64 = 1e-5;

/// A discretized sample of the driving Brownian motion: i.i.d. N(0, dt)
/// increments, reproducible bit-exactly from `(seed, path_index)`.
#[derive(Debug, Clone)]
pub struct NoisePath {
    pub dt: f64,
    /// One d-dimensional increment per step.
    pub increments: Vec<DVec>,
    pub seed: u64,
    pub path_index: u64,
}

impl NoisePath {
    /// Sample a noise path on a uniform grid covering `[0, t_end]`. The step
    /// is snapped so the grid lands exactly on `t_end`.
    ///
    /// Each `(seed, path_index)` pair addresses an independent stream of the
    /// counter-based generator, so ensembles are reproducible and
    /// order-independent.
    pub fn generate(dim: usize, t_end: f64, dt: f64, seed: u64, path_index: u64) -> Result<Self> {
        let (n, dt) = grid(t_end, dt)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(path_index);
        let s = dt.sqrt();
        let increments = (0..n)
            .map(|_| DVec::from_fn(dim, |_, _| s * rng.sample::<f64, _>(StandardNormal)))
            .collect();
        Ok(Self { dt, increments, seed, path_index })
    }

    /// All-zero increments (deterministic degeneration).
    pub fn zeros(dim: usize, t_end: f64, dt: f64) -> Result<Self> {
        let (n, dt) = grid(t_end, dt)?;
        Ok(Self { dt, increments: (0..n).map(|_| DVec::zeros(dim)).collect(), seed: 0, path_index: 0 })
    }

    pub fn steps(&self) -> usize {
        self.increments.len()
    }

    pub fn duration(&self) -> f64 {
        self.dt * self.increments.len() as f64
    }
}

pub(crate) fn grid(t_end: f64, dt: f64) -> Result<(usize, f64)> {
    if dt <= 0.0 || t_end <= 0.0 {
        return Err(Error::InvalidArgument(format!("bad time grid: T={t_end}, dt={dt}")));
    }
    let n = ((t_end / dt).round() as usize).max(1);
    Ok((n, t_end / n as f64))
}

/// A time-dependent drift vector field u(t, m) on the manifold.
pub struct DriftField {
    kind: DriftKind,
}

enum DriftKind {
    Zero,
    ClosedForm {
        chart: usize,
        f: Box<dyn Fn(f64, &DVec) -> DVec + Send + Sync>,
    },
    Grid1(GridDrift1),
}

impl DriftField {
    pub fn zero() -> Self {
        Self { kind: DriftKind::Zero }
    }

    /// Closed-form components in the given reference chart; evaluations in
    /// other charts are pushed through the atlas transition maps.
    pub fn closed_form(chart: usize, f: impl Fn(f64, &DVec) -> DVec + Send + Sync + 'static) -> Self {
        Self { kind: DriftKind::ClosedForm { chart, f: Box::new(f) } }
    }

    pub fn from_grid1(grid: GridDrift1) -> Self {
        Self { kind: DriftKind::Grid1(grid) }
    }

    pub fn as_grid1(&self) -> Option<&GridDrift1> {
        match &self.kind {
            DriftKind::Grid1(g) => Some(g),
            _ => None,
        }
    }

    /// Evaluate chart components of u at (t, m) in the requested chart.
    pub fn eval(
        &self,
        manifold: &ChartedManifold,
        chart: usize,
        t: f64,
        m: &DVec,
    ) -> Result<DVec> {
        match &self.kind {
            DriftKind::Zero => Ok(DVec::zeros(manifold.dim())),
            DriftKind::ClosedForm { chart: c0, f } => {
                if chart == *c0 {
                    Ok(f(t, m))
                } else {
                    let (m0, _) = manifold
                        .convert(chart, *c0, m)
                        .ok_or(Error::ChartExitNoTransition { chart })?;
                    let u0 = f(t, &m0);
                    let (_, jac) = manifold
                        .convert(*c0, chart, &m0)
                        .ok_or(Error::ChartExitNoTransition { chart: *c0 })?;
                    Ok(jac * u0)
                }
            }
            DriftKind::Grid1(g) => {
                let mut u = DVec::zeros(1);
                u[0] = g.eval(t, m[0]);
                Ok(u)
            }
        }
    }
}

/// Drift samples on a uniform periodic spatial grid (dimension 1) with
/// piecewise-constant-in-time slices and linear interpolation in space.
#[derive(Debug, Clone)]
pub struct GridDrift1 {
    pub x0: f64,
    pub period: f64,
    pub nx: usize,
    /// Slice times, strictly increasing.
    pub times: Vec<f64>,
    /// `values[slice][node]`.
    pub values: Vec<Vec<f64>>,
}

impl GridDrift1 {
    pub fn new(x0: f64, period: f64, nx: usize, times: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if nx < 4 || values.is_empty() || values.len() != times.len() {
            return Err(Error::InvalidArgument("grid drift needs nx ≥ 4 and one value row per time".into()));
        }
        if values.iter().any(|row| row.len() != nx) {
            return Err(Error::InvalidArgument("grid drift rows must have nx entries".into()));
        }
        Ok(Self { x0, period, nx, times, values })
    }

    pub fn dx(&self) -> f64 {
        self.period / self.nx as f64
    }

    fn slice_at(&self, t: f64) -> usize {
        // last slice with time ≤ t (clamped)
        match self.times.iter().position(|&s| s > t) {
            Some(0) => 0,
            Some(j) => j - 1,
            None => self.times.len() - 1,
        }
    }

    /// Linear interpolation in space on the slice active at time t.
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        self.interp(&self.values[self.slice_at(t)], x)
    }

    /// Spatial derivative: fourth-order central differences on the grid,
    /// linearly interpolated.
    pub fn eval_dx(&self, t: f64, x: f64) -> f64 {
        let row = &self.values[self.slice_at(t)];
        let n = self.nx;
        let dx = self.dx();
        let deriv: Vec<f64> = (0..n)
            .map(|i| {
                let u = |k: isize| row[(i as isize + k).rem_euclid(n as isize) as usize];
                (-u(2) + 8.0 * u(1) - 8.0 * u(-1) + u(-2)) / (12.0 * dx)
            })
            .collect();
        self.interp(&deriv, x)
    }

    fn interp(&self, row: &[f64], x: f64) -> f64 {
        let n = self.nx;
        let dx = self.dx();
        let s = (x - self.x0).rem_euclid(self.period) / dx;
        let j = (s.floor() as usize).min(n - 1);
        let frac = s - j as f64;
        let a = row[j];
        let b = row[(j + 1) % n];
        a + frac * (b - a)
    }
}

/// One node of a frame-bundle path: base point and the frame matrix whose
/// columns are the frame vectors e_α.
#[derive(Debug, Clone)]
pub struct FrameNode {
    pub point: ChartPoint,
    pub frame: DMat,
}

/// A sample path of (m(t), e(t)) on the orthonormal frame bundle, with its
/// driving noise.
#[derive(Debug, Clone)]
pub struct FramePath {
    pub noise: NoisePath,
    pub nodes: Vec<FrameNode>,
    /// Frame-coordinate Stratonovich increments σΔx^α + u^α dt actually
    /// applied at each step (midpoint coefficients), used by the
    /// anti-development.
    pub frame_increments: Vec<DVec>,
    /// Diffusion amplitude multiplying the Brownian increments.
    pub sigma: f64,
}

impl FramePath {
    pub fn dt(&self) -> f64 {
        self.noise.dt
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.noise.dt
    }

    fn index_of(&self, t: f64) -> Result<usize> {
        let r = t / self.noise.dt;
        let i = r.round();
        if (r - i).abs() > 1e-9 || i < 0.0 || i as usize >= self.nodes.len() {
            return Err(Error::InvalidArgument(format!("time {t} is off the path grid")));
        }
        Ok(i as usize)
    }
}

/// The variation process (ζ, ρ) of a perturbed driving noise, together with
/// the perturbation samples that generated it.
#[derive(Debug, Clone)]
pub struct VariationPath {
    /// ζ(tᵢ) ∈ ℝ^d: frame-coordinate variation of the path.
    pub zeta: Vec<DVec>,
    /// ρ(tᵢ) ∈ so(d): variation of the frame.
    pub rho: Vec<DMat>,
    /// h(tᵢ) samples.
    pub h: Vec<DVec>,
}

/// A bounded-variation perturbation of the driving noise, given by its value
/// and time derivative.
pub struct Perturbation {
    value: Box<dyn Fn(f64) -> DVec + Send + Sync>,
    rate: Box<dyn Fn(f64) -> DVec + Send + Sync>,
}

impl Perturbation {
    pub fn new(
        value: impl Fn(f64) -> DVec + Send + Sync + 'static,
        rate: impl Fn(f64) -> DVec + Send + Sync + 'static,
    ) -> Self {
        Self { value: Box::new(value), rate: Box::new(rate) }
    }

    pub fn value(&self, t: f64) -> DVec {
        (self.value)(t)
    }

    pub fn rate(&self, t: f64) -> DVec {
        (self.rate)(t)
    }
}

/// g-orthonormalize the columns of `frame` at base point `m` (Gram–Schmidt).
pub fn gram_schmidt(manifold: &ChartedManifold, chart: usize, m: &DVec, frame: &DMat) -> Result<DMat> {
    let g = manifold.metric(chart, m)?;
    let d = manifold.dim();
    let mut out = frame.clone();
    for a in 0..d {
        let mut v = out.column(a).clone_owned();
        for b in 0..a {
            let eb = out.column(b).clone_owned();
            let proj = (v.transpose() * &g * &eb)[(0, 0)];
            v -= &eb * proj;
        }
        let norm = ((v.transpose() * &g * &v)[(0, 0)]).max(0.0).sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("degenerate frame".into()));
        }
        out.set_column(a, &(v / norm));
    }
    Ok(out)
}

/// The canonical g-orthonormal frame at `m`: Gram–Schmidt applied to the
/// coordinate basis.
pub fn default_frame(manifold: &ChartedManifold, chart: usize, m: &DVec) -> Result<DMat> {
    let d = manifold.dim();
    gram_schmidt(manifold, chart, m, &DMat::identity(d, d))
}

/// Max-abs deviation of eᵀ g e from the identity.
pub fn orthonormality_defect(g: &DMat, frame: &DMat) -> f64 {
    let m = frame.transpose() * g * frame;
    let d = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((m[(i, j)] - target).abs());
        }
    }
    worst
}

/// Configuration of a frame-bundle simulation.
#[derive(Debug, Clone)]
pub struct FrameSimConfig {
    pub t_end: f64,
    pub dt: f64,
    /// Diffusion amplitude multiplying the Brownian increments (1 = the
    /// standard horizontal Brownian motion).
    pub sigma: f64,
}

impl FrameSimConfig {
    pub fn new(t_end: f64, dt: f64) -> Self {
        Self { t_end, dt, sigma: 1.0 }
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }
}

/// Simulate a frame-bundle path driven by the noise stream of
/// `(seed, path_index)`.
pub fn simulate_frame_path(
    manifold: &ChartedManifold,
    u: &DriftField,
    m0: &ChartPoint,
    e0: &DMat,
    cfg: &FrameSimConfig,
    seed: u64,
    path_index: u64,
) -> Result<FramePath> {
    let noise = NoisePath::generate(manifold.dim(), cfg.t_end, cfg.dt, seed, path_index)?;
    develop(manifold, u, m0, e0, noise, cfg.sigma)
}

/// Simulate with externally supplied noise (zero-noise degenerations, common
/// random numbers, perturbed drivers).
pub fn develop(
    manifold: &ChartedManifold,
    u: &DriftField,
    m0: &ChartPoint,
    e0: &DMat,
    noise: NoisePath,
    sigma: f64,
) -> Result<FramePath> {
    let d = manifold.dim();
    let dt = noise.dt;
    let g0 = manifold.metric(m0.chart, &m0.coords)?;
    if orthonormality_defect(&g0, e0) > 1e-8 {
        return Err(Error::InvalidArgument("initial frame is not g-orthonormal".into()));
    }

    let mut chart = m0.chart;
    let mut m = m0.coords.clone();
    let mut e = e0.clone();
    let mut nodes = Vec::with_capacity(noise.steps() + 1);
    let mut frame_increments = Vec::with_capacity(noise.steps());
    nodes.push(FrameNode { point: ChartPoint::new(chart, m.clone()), frame: e.clone() });

    for (i, dx) in noise.increments.iter().enumerate() {
        let t = i as f64 * dt;

        // stage 1: coefficients at the left endpoint
        let w1 = frame_coords(&e, &u.eval(manifold, chart, t, &m)?)? * dt + dx * sigma;
        let k1m = &e * &w1;
        let gamma = manifold.christoffel(chart, &m)?;
        let k1e = frame_drag(&gamma, &k1m, &e);

        // stage 2: coefficients at the predicted midpoint
        let mh = &m + &k1m * 0.5;
        let eh = &e + &k1e * 0.5;
        let th = t + 0.5 * dt;
        let w2 = frame_coords(&eh, &u.eval(manifold, chart, th, &mh)?)? * dt + dx * sigma;
        let step_m = &eh * &w2;

        // Transport the frame along the straight chart segment m → m + Δm.
        // Midpoint substeps keep the pre-correction orthonormality defect well
        // under the hard bound even for large-deviation increments in
        // high-curvature chart regions.
        let strength = gamma.max_abs() * step_m.norm() * manifold.dim() as f64;
        let substeps = ((strength / 0.02).ceil() as usize).clamp(1, 64);
        let tau = 1.0 / substeps as f64;
        for s in 0..substeps {
            let frac = (s as f64 + 0.5) * tau;
            let gm = manifold.christoffel(chart, &(&m + &step_m * frac)).map_err(|err| match err {
                Error::OutsideChartDomain { chart } => Error::ChartExitNoTransition { chart },
                other => other,
            })?;
            let e_mid = &e + frame_drag(&gm, &step_m, &e) * (0.5 * tau);
            e += frame_drag(&gm, &step_m, &e_mid) * tau;
        }
        m += &step_m;

        let g = manifold.metric(chart, &m).map_err(|err| match err {
            Error::OutsideChartDomain { chart } => Error::ChartExitNoTransition { chart },
            other => other,
        })?;
        let defect = orthonormality_defect(&g, &e);
        if defect > ORTHONORMALITY_HARD_BOUND {
            return Err(Error::OrthonormalityLost { drift: defect, bound: ORTHONORMALITY_HARD_BOUND });
        }
        e = gram_schmidt(manifold, chart, &m, &e)?;

        // chart transition: transform point and frame columns
        while let Some(target) = manifold.needs_transition(chart, &m) {
            let (nm, jac) = manifold
                .convert(chart, target, &m)
                .ok_or(Error::ChartExitNoTransition { chart })?;
            m = nm;
            e = &jac * &e;
            chart = target;
            e = gram_schmidt(manifold, chart, &m, &e)?;
        }
        let _ = d;

        frame_increments.push(w2);
        nodes.push(FrameNode { point: ChartPoint::new(chart, m.clone()), frame: e.clone() });
    }

    Ok(FramePath { noise, nodes, frame_increments, sigma })
}

/// Frame coordinates of a chart tangent vector: solve e · ū = u.
fn frame_coords(e: &DMat, u: &DVec) -> Result<DVec> {
    e.clone()
        .lu()
        .solve(u)
        .ok_or_else(|| Error::InvalidArgument("singular frame matrix".into()))
}

/// de^i_α = −Γ^i_jk Δm^j e^k_α.
fn frame_drag(gamma: &crate::Rank3, dm: &DVec, e: &DMat) -> DMat {
    let d = dm.len();
    DMat::from_fn(d, d, |i, a| {
        let mut s = 0.0;
        for j in 0..d {
            for k in 0..d {
                s -= gamma.get(i, j, k) * dm[j] * e[(k, a)];
            }
        }
        s
    })
}

/// Itô parallel transport along a sample path: z ↦ e(t) e(s)⁻¹ z for grid
/// times s, t.
pub fn ito_parallel_transport(path: &FramePath, s: f64, t: f64, z: &DVec) -> Result<DVec> {
    let i = path.index_of(s)?;
    let j = path.index_of(t)?;
    transport_between(path, i, j, z)
}

/// Itô parallel transport between node indices.
pub fn transport_between(path: &FramePath, from: usize, to: usize, z: &DVec) -> Result<DVec> {
    let a = path.nodes.get(from).ok_or_else(|| Error::InvalidArgument("index off path".into()))?;
    let b = path.nodes.get(to).ok_or_else(|| Error::InvalidArgument("index off path".into()))?;
    let coeffs = a
        .frame
        .clone()
        .lu()
        .solve(z)
        .ok_or_else(|| Error::InvalidArgument("singular frame matrix".into()))?;
    Ok(&b.frame * coeffs)
}

/// Scalarized curvature data at a path node: Ricci and the curvature form in
/// frame coordinates.
struct FrameCurvature {
    /// R̂ic^α_β = (eᵀ Ricci e)^α_β.
    ricci: DMat,
    /// R̂^α_βγδ.
    riemann: crate::Rank4,
}

fn frame_curvature(manifold: &ChartedManifold, node: &FrameNode) -> Result<FrameCurvature> {
    let d = manifold.dim();
    let data = manifold.curvature_and_ricci(node.point.chart, &node.point.coords)?;
    let e = &node.frame;
    let g = manifold.metric(node.point.chart, &node.point.coords)?;
    // e⁻¹ = eᵀ g for a g-orthonormal frame
    let e_inv = e.transpose() * &g;
    let ricci_hat = e.transpose() * &data.ricci * e;
    let mut riemann_hat = crate::Rank4::zeros(d);
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for dd in 0..d {
                    let mut s = 0.0;
                    for i in 0..d {
                        for j in 0..d {
                            for k in 0..d {
                                for l in 0..d {
                                    s += e_inv[(a, i)]
                                        * data.riemann.get(i, j, k, l)
                                        * e[(j, b)]
                                        * e[(k, c)]
                                        * e[(l, dd)];
                                }
                            }
                        }
                    }
                    riemann_hat.set(a, b, c, dd, s);
                }
            }
        }
    }
    Ok(FrameCurvature { ricci: ricci_hat, riemann: riemann_hat })
}

/// Frame-coordinate Jacobian of the drift, 𝒟^β_α = L_{A_α} u^β, by central
/// differences of the frame components of u along parallel-dragged frame
/// directions.
fn drift_frame_jacobian(
    manifold: &ChartedManifold,
    u: &DriftField,
    t: f64,
    node: &FrameNode,
) -> Result<DMat> {
    let d = manifold.dim();
    let chart = node.point.chart;
    let m = &node.point.coords;
    let e = &node.frame;
    let gamma = manifold.christoffel(chart, m)?;
    let mut jac = DMat::zeros(d, d);
    for alpha in 0..d {
        let dir = e.column(alpha).clone_owned();
        let step = DRIFT_JACOBIAN_STEP;
        let mp = m + &dir * step;
        let mm = m - &dir * step;
        // first-order parallel drag of the frame to the shifted points
        let drag = frame_drag(&gamma, &dir, e) * step;
        let ep = e + &drag;
        let em = e - &drag;
        let up = frame_coords(&ep, &u.eval(manifold, chart, t, &mp)?)?;
        let um = frame_coords(&em, &u.eval(manifold, chart, t, &mm)?)?;
        for beta in 0..d {
            jac[(beta, alpha)] = (up[beta] - um[beta]) / (2.0 * step);
        }
    }
    Ok(jac)
}

/// Co-integrate the variation process along a simulated path, reusing the
/// path's own noise increments:
///
/// ```text
/// dζ = ḣ dt − [½ R̂ic + 𝒟](h) dt − ρ dx      (Itô)
/// dρ = Ω̂(∘dx + u dt, h)                      (Stratonovich)
/// ```
pub fn variation_process(
    manifold: &ChartedManifold,
    path: &FramePath,
    u: &DriftField,
    h: &Perturbation,
) -> Result<VariationPath> {
    let d = manifold.dim();
    let n = path.noise.steps();
    let dt = path.dt();
    let h0 = h.value(0.0);
    if h0.norm() > 0.0 {
        return Err(Error::InvalidArgument("perturbation must vanish at t = 0".into()));
    }
    if h0.len() != d {
        return Err(Error::GridMismatch("perturbation dimension != manifold dimension".into()));
    }

    // curvature and the drift-bracket coefficient B = ½R̂ic + 𝒟 at every node
    let mut curv = Vec::with_capacity(n + 1);
    let mut bracket = Vec::with_capacity(n + 1);
    for (i, node) in path.nodes.iter().enumerate() {
        let fc = frame_curvature(manifold, node)?;
        let jac = drift_frame_jacobian(manifold, u, path.time(i), node)?;
        bracket.push(&fc.ricci * 0.5 + jac);
        curv.push(fc);
    }

    let mut zeta = DVec::zeros(d);
    let mut rho = DMat::zeros(d, d);
    let mut out = VariationPath {
        zeta: Vec::with_capacity(n + 1),
        rho: Vec::with_capacity(n + 1),
        h: Vec::with_capacity(n + 1),
    };
    out.zeta.push(zeta.clone());
    out.rho.push(rho.clone());
    out.h.push(h0);

    for i in 0..n {
        let t = path.time(i);
        let hi = h.value(t);
        let hnext = h.value(path.time(i + 1));
        let dx = &path.noise.increments[i] * path.sigma;

        // ζ update: the martingale part −ρ dx stays Itô (left endpoint); the
        // absolutely-continuous terms use midpoint/trapezoid quadrature
        let drift_term = (&bracket[i] * &hi + &bracket[i + 1] * &hnext) * (0.5 * dt);
        zeta += h.rate(t + 0.5 * dt) * dt - drift_term - &rho * &dx;

        // Stratonovich update of ρ with midpoint-rule coefficients; the
        // integrand Ω̂(·, h) does not depend on ρ itself
        let w = &path.frame_increments[i];
        let m_left = curvature_form(&curv[i].riemann, w, &hi);
        let m_right = curvature_form(&curv[i + 1].riemann, w, &hnext);
        rho += (m_left + m_right) * 0.5;

        out.zeta.push(zeta.clone());
        out.rho.push(rho.clone());
        out.h.push(hnext);
    }
    Ok(out)
}

/// Matrix (Ω̂(a, h))^α_β = R̂^α_βγδ a^γ h^δ.
fn curvature_form(riemann: &crate::Rank4, a: &DVec, h: &DVec) -> DMat {
    let d = a.len();
    DMat::from_fn(d, d, |al, be| {
        let mut s = 0.0;
        for c in 0..d {
            for dd in 0..d {
                s += riemann.get(al, be, c, dd) * a[c] * h[dd];
            }
        }
        s
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{coords, SPHERE_CHART_POLAR};
    use alloc::vec;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::PI;

    #[test]
    fn noise_is_reproducible_and_stream_separated() {
        let a = NoisePath::generate(2, 1.0, 1e-2, 7, 3).unwrap();
        let b = NoisePath::generate(2, 1.0, 1e-2, 7, 3).unwrap();
        let c = NoisePath::generate(2, 1.0, 1e-2, 7, 4).unwrap();
        assert_eq!(a.increments, b.increments);
        assert_ne!(a.increments, c.increments);
    }

    #[test]
    fn noise_moments_match_gaussian_at_five_sigma() {
        let dt = 1e-3;
        let mut all = Vec::new();
        for p in 0..200u64 {
            let np = NoisePath::generate(1, 0.5, dt, 42, p).unwrap();
            all.extend(np.increments.iter().map(|v| v[0]));
        }
        let n = all.len() as f64;
        let (mean, _) = crate::stats::mean_stderr(&all);
        // mean of N(0, dt) samples: sd of the mean is sqrt(dt/n)
        assert!(mean.abs() < 5.0 * (dt / n).sqrt(), "mean {mean}");
        let var = all.iter().map(|x| x * x).sum::<f64>() / n;
        // relative sd of the variance estimate is sqrt(2/n)
        assert!((var / dt - 1.0).abs() < 5.0 * (2.0 / n).sqrt(), "var ratio {}", var / dt);
    }

    #[test]
    fn flat_development_is_affine_in_the_noise() {
        let m = ChartedManifold::euclidean(2);
        let cfg = FrameSimConfig::new(1.0, 1e-2);
        let e0 = DMat::identity(2, 2);
        let start = ChartPoint::new(0, coords(&[0.0, 0.0]));
        let path =
            simulate_frame_path(&m, &DriftField::zero(), &start, &e0, &cfg, 11, 0).unwrap();
        let mut acc = DVec::zeros(2);
        for (i, dx) in path.noise.increments.iter().enumerate() {
            acc += dx;
            let node = &path.nodes[i + 1];
            assert_abs_diff_eq!(node.point.coords[0], acc[0], epsilon = 1e-13);
            assert_abs_diff_eq!(node.point.coords[1], acc[1], epsilon = 1e-13);
            assert_abs_diff_eq!(node.frame[(0, 0)], 1.0, epsilon = 1e-13);
            assert_abs_diff_eq!(node.frame[(1, 0)], 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn zero_noise_development_follows_the_drift_flow() {
        // with Δx = 0 the development must reproduce the deterministic flow of
        // u within O(dt²)
        let m = ChartedManifold::sphere(1.0);
        let u = DriftField::closed_form(SPHERE_CHART_POLAR, |_, mm: &DVec| {
            coords(&[0.3 * (mm[1] + 1.0).sin(), 0.2 + 0.1 * mm[0].cos()])
        });
        let start = ChartPoint::new(SPHERE_CHART_POLAR, coords(&[1.0, 0.0]));
        let e0 = default_frame(&m, SPHERE_CHART_POLAR, &coords(&[1.0, 0.0])).unwrap();
        let run = |dt: f64| -> DVec {
            let noise = NoisePath::zeros(2, 0.5, dt).unwrap();
            let path = develop(&m, &u, &start, &e0, noise, 1.0).unwrap();
            path.nodes.last().unwrap().point.coords.clone()
        };
        // reference: fine-step run
        let reference = run(1e-5);
        let coarse = run(1e-2);
        let fine = run(5e-3);
        let ec = (&coarse - &reference).norm();
        let ef = (&fine - &reference).norm();
        assert!(ec < 1e-3, "coarse error {ec}");
        assert!(ec / ef > 3.0, "expected ~4x reduction, got {}", ec / ef);
    }

    #[test]
    fn frame_stays_orthonormal_on_the_sphere() {
        let m = ChartedManifold::sphere(1.0);
        let start = ChartPoint::new(SPHERE_CHART_POLAR, coords(&[PI / 3.0, 0.0]));
        let e0 = default_frame(&m, SPHERE_CHART_POLAR, &start.coords).unwrap();
        let cfg = FrameSimConfig::new(1.0, 1e-3);
        let path = simulate_frame_path(&m, &DriftField::zero(), &start, &e0, &cfg, 5, 2).unwrap();
        for node in &path.nodes {
            let g = m.metric(node.point.chart, &node.point.coords).unwrap();
            assert!(orthonormality_defect(&g, &node.frame) <= 1e-6);
        }
    }

    #[test]
    fn transport_composes_exactly_and_preserves_norm() {
        let m = ChartedManifold::sphere(1.0);
        let start = ChartPoint::new(SPHERE_CHART_POLAR, coords(&[PI / 2.0, 0.0]));
        let e0 = default_frame(&m, SPHERE_CHART_POLAR, &start.coords).unwrap();
        let cfg = FrameSimConfig::new(0.5, 1e-3);
        let path = simulate_frame_path(&m, &DriftField::zero(), &start, &e0, &cfg, 9, 0).unwrap();
        let z = coords(&[0.6, -0.1]);

        // s = t is the identity
        let same = ito_parallel_transport(&path, 0.2, 0.2, &z).unwrap();
        assert_abs_diff_eq!((same - &z).norm(), 0.0, epsilon = 1e-12);

        // composition s→r→t equals s→t
        let i = 100;
        let r = 250;
        let j = 480;
        let via = transport_between(&path, r, j, &transport_between(&path, i, r, &z).unwrap()).unwrap();
        let direct = transport_between(&path, i, j, &z).unwrap();
        assert!((via - &direct).norm() < 1e-10);

        // g-norm preserved
        let n0 = m
            .norm(path.nodes[i].point.chart, &path.nodes[i].point.coords, &z)
            .unwrap();
        let nt = m
            .norm(path.nodes[j].point.chart, &path.nodes[j].point.coords, &direct)
            .unwrap();
        assert!((n0 - nt).abs() < 1e-9);
    }

    #[test]
    fn euclidean_transport_is_trivial() {
        let m = ChartedManifold::euclidean(2);
        let start = ChartPoint::new(0, coords(&[0.0, 0.0]));
        let cfg = FrameSimConfig::new(0.3, 1e-2);
        let path = simulate_frame_path(&m, &DriftField::zero(), &start, &DMat::identity(2, 2), &cfg, 1, 0)
            .unwrap();
        let z = coords(&[1.0, 2.0]);
        let out = ito_parallel_transport(&path, 0.0, 0.3, &z).unwrap();
        assert!((out - &z).norm() < 1e-12);
    }

    #[test]
    fn variation_vanishes_for_zero_perturbation() {
        let m = ChartedManifold::sphere(1.0);
        let start = ChartPoint::new(SPHERE_CHART_POLAR, coords(&[PI / 3.0, 0.0]));
        let e0 = default_frame(&m, SPHERE_CHART_POLAR, &start.coords).unwrap();
        let cfg = FrameSimConfig::new(0.2, 1e-3);
        let path = simulate_frame_path(&m, &DriftField::zero(), &start, &e0, &cfg, 21, 0).unwrap();
        let h = Perturbation::new(|_| DVec::zeros(2), |_| DVec::zeros(2));
        let var = variation_process(&m, &path, &DriftField::zero(), &h).unwrap();
        assert!(var.zeta.iter().all(|z| z.norm() == 0.0));
        assert!(var.rho.iter().all(|r| r.norm() == 0.0));
    }

    #[test]
    fn flat_variation_reduces_to_the_perturbation() {
        // Ricci = Ω = 𝒟 = 0 on flat space with u = 0, so ζ(t) = h(t), ρ = 0
        let m = ChartedManifold::euclidean(2);
        let start = ChartPoint::new(0, coords(&[0.0, 0.0]));
        let cfg = FrameSimConfig::new(0.5, 1e-2);
        let path = simulate_frame_path(&m, &DriftField::zero(), &start, &DMat::identity(2, 2), &cfg, 3, 0)
            .unwrap();
        let h = Perturbation::new(
            |t| coords(&[t * 0.7, -t * t]),
            |t| coords(&[0.7, -2.0 * t]),
        );
        let var = variation_process(&m, &path, &DriftField::zero(), &h).unwrap();
        for (i, z) in var.zeta.iter().enumerate() {
            let t = path.time(i);
            // midpoint quadrature integrates linear ḣ exactly
            assert_abs_diff_eq!(z[0], 0.7 * t, epsilon = 1e-10);
            assert_abs_diff_eq!(z[1], -t * t, epsilon = 1e-10);
            assert!(var.rho[i].norm() == 0.0);
        }
    }

    #[test]
    fn variation_is_linear_in_the_perturbation() {
        let m = ChartedManifold::sphere(1.0);
        let start = ChartPoint::new(SPHERE_CHART_POLAR, coords(&[PI / 3.0, 0.2]));
        let e0 = default_frame(&m, SPHERE_CHART_POLAR, &start.coords).unwrap();
        let cfg = FrameSimConfig::new(0.3, 2e-3);
        let u = DriftField::closed_form(SPHERE_CHART_POLAR, |_, _| coords(&[0.1, 0.2]));
        let path = simulate_frame_path(&m, &u, &start, &e0, &cfg, 33, 1).unwrap();

        let h1 = Perturbation::new(|t| coords(&[t, 0.0]), |_| coords(&[1.0, 0.0]));
        let h2 = Perturbation::new(|t| coords(&[0.0, t * t]), |t| coords(&[0.0, 2.0 * t]));
        let hsum = Perturbation::new(
            |t| coords(&[2.0 * t, -3.0 * t * t]),
            |t| coords(&[2.0, -6.0 * t]),
        );
        let v1 = variation_process(&m, &path, &u, &h1).unwrap();
        let v2 = variation_process(&m, &path, &u, &h2).unwrap();
        let vs = variation_process(&m, &path, &u, &hsum).unwrap();
        let last = vs.zeta.len() - 1;
        let combo = &v1.zeta[last] * 2.0 - &v2.zeta[last] * 3.0;
        assert!((&vs.zeta[last] - combo).norm() < 1e-12);
    }

    #[test]
    fn rho_stays_antisymmetric_on_the_sphere() {
        let m = ChartedManifold::sphere(1.0);
        let start = ChartPoint::new(SPHERE_CHART_POLAR, coords(&[PI / 3.0, 0.0]));
        let e0 = default_frame(&m, SPHERE_CHART_POLAR, &start.coords).unwrap();
        let cfg = FrameSimConfig::new(0.3, 1e-3);
        let path = simulate_frame_path(&m, &DriftField::zero(), &start, &e0, &cfg, 55, 0).unwrap();
        let h = Perturbation::new(|t| coords(&[t, 0.5 * t]), |_| coords(&[1.0, 0.5]));
        let var = variation_process(&m, &path, &DriftField::zero(), &h).unwrap();
        for r in &var.rho {
            let asym = (r + r.transpose()).norm();
            assert!(asym < 1e-6, "antisymmetry defect {asym}");
        }
    }

    #[test]
    fn grid_drift_reproduces_node_values_exactly() {
        let nx = 8;
        let xs: Vec<f64> = (0..nx).map(|j| 2.0 * PI * j as f64 / nx as f64).collect();
        let vals: Vec<f64> = xs.iter().map(|x| x.sin()).collect();
        let g = GridDrift1::new(0.0, 2.0 * PI, nx, vec![0.0], vec![vals.clone()]).unwrap();
        for (x, v) in xs.iter().zip(&vals) {
            assert_eq!(g.eval(0.0, *x), *v);
        }
        // periodic wrap
        assert_abs_diff_eq!(g.eval(0.0, xs[1] + 2.0 * PI), vals[1], epsilon = 1e-12);
    }

    #[test]
    fn oversized_step_is_reported_as_orthonormality_loss() {
        let m = ChartedManifold::sphere(1.0);
        let start = ChartPoint::new(SPHERE_CHART_POLAR, coords(&[PI / 2.0, 0.0]));
        let e0 = default_frame(&m, SPHERE_CHART_POLAR, &start.coords).unwrap();
        let cfg = FrameSimConfig::new(40.0, 0.5);
        let mut failed = false;
        for pi in 0..40 {
            match simulate_frame_path(&m, &DriftField::zero(), &start, &e0, &cfg, 1000 + pi, 0) {
                Err(Error::OrthonormalityLost { .. }) => {
                    failed = true;
                    break;
                }
                Err(_) => {} // chart exit is also a legitimate large-step failure
                Ok(_) => {}
            }
        }
        assert!(failed, "expected at least one orthonormality failure at dt = 0.5");
    }
}
