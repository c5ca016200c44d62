//! Riemannian geometry in local charts.
//!
//! A [`ChartedManifold`] carries one or more charts, each providing the metric
//! tensor (and optionally its closed-form first derivatives) on a coordinate
//! domain, plus transition maps between overlapping charts. Everything else —
//! Christoffel symbols, curvature, Ricci, the Laplace–Beltrami operator,
//! geodesics, parallel transport, and the kinetic energy of a path — is
//! derived from the metric.
//!
//! Index conventions used throughout:
//!
//! - metric partials: `dg.get(k, i, j)` = ∂ₖ g_ij
//! - Christoffel symbols: `gamma.get(j, k, l)` = Γ^j_kl
//! - curvature: `riemann.get(i, j, k, l)` = R^i_jkl, the i-component of
//!   Ω(∂ₖ, ∂ₗ)∂ⱼ where Ω(X,Y)Z = (∇_X∇_Y − ∇_Y∇_X − ∇_[X,Y])Z
//! - Ricci: `ricci[(k, l)]` = Σ_i R^i_kil; the sign convention is fixed so
//!   the round sphere has Ricci = +(d−1)/R² · g.

mod builtins;

pub use builtins::{coords, SPHERE_CHART_NORTH, SPHERE_CHART_POLAR, SPHERE_CHART_SOUTH};

use crate::error::{Error, Result};
use crate::tensor::{Rank3, Rank4};
use crate::{DMat, DVec};
use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;
use nalgebra::linalg::Cholesky;

/// Metric evaluation closure: chart coordinates ↦ symmetric d×d matrix.
pub type MetricFn = Box<dyn Fn(&DVec) -> DMat + Send + Sync>;
/// Closed-form metric derivatives: chart coordinates ↦ ∂ₖ g_ij as a rank-3 array.
pub type MetricPartialsFn = Box<dyn Fn(&DVec) -> Rank3 + Send + Sync>;
/// Chart-domain predicate.
pub type DomainFn = Box<dyn Fn(&DVec) -> bool + Send + Sync>;

/// One local chart: metric data on a coordinate domain.
pub struct Chart {
    pub(crate) metric: MetricFn,
    pub(crate) metric_partials: Option<MetricPartialsFn>,
    pub(crate) contains: DomainFn,
}

impl Chart {
    pub fn new(metric: MetricFn, metric_partials: Option<MetricPartialsFn>, contains: DomainFn) -> Self {
        Self { metric, metric_partials, contains }
    }
}

/// Which built-in atlas drives chart transitions.
pub(crate) enum Atlas {
    /// Single chart, no transitions (flat spaces, user metrics).
    Single,
    /// Round sphere of the given radius: polar band chart plus two
    /// stereographic caps.
    Sphere { radius: f64 },
}

/// A point expressed in a specific chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint {
    pub chart: usize,
    pub coords: DVec,
}

impl ChartPoint {
    pub fn new(chart: usize, coords: DVec) -> Self {
        Self { chart, coords }
    }
}

/// A tangent vector attached to a base point.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub base: ChartPoint,
    pub components: DVec,
}

impl TangentVector {
    pub fn new(base: ChartPoint, components: DVec) -> Self {
        Self { base, components }
    }
}

/// Full curvature tensor and Ricci tensor at a point.
#[derive(Debug, Clone)]
pub struct CurvatureData {
    pub point: ChartPoint,
    /// R^i_jkl with the convention documented at module level.
    pub riemann: Rank4,
    /// Ricci_kl = Σ_i R^i_kil (symmetric for Levi-Civita).
    pub ricci: DMat,
}

/// A discretized path on the manifold: uniform time grid, per-node chart, and
/// optional velocity samples.
#[derive(Debug, Clone)]
pub struct DiscretePath {
    pub dt: f64,
    pub nodes: Vec<ChartPoint>,
    pub velocities: Option<Vec<DVec>>,
}

impl DiscretePath {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.dt * (self.nodes.len().saturating_sub(1)) as f64
    }

    /// Sample a closed-form curve (single chart) onto a uniform grid.
    pub fn from_curve(
        chart: usize,
        position: impl Fn(f64) -> DVec,
        velocity: impl Fn(f64) -> DVec,
        t_end: f64,
        dt: f64,
    ) -> Self {
        let n = (t_end / dt).round() as usize;
        let nodes = (0..=n).map(|i| ChartPoint::new(chart, position(i as f64 * dt))).collect();
        let velocities = Some((0..=n).map(|i| velocity(i as f64 * dt)).collect());
        Self { dt, nodes, velocities }
    }
}

/// A manifold given by charts with metric data and transition maps.
pub struct ChartedManifold {
    dim: usize,
    charts: Vec<Chart>,
    atlas: Atlas,
    /// Relative step for finite-difference metric derivatives.
    fd_step_metric: f64,
    /// Relative step for differentiating Christoffel symbols.
    fd_step_gamma: f64,
    /// Relative step for scalar-field stencils (Laplace–Beltrami).
    fd_step_scalar: f64,
}

impl ChartedManifold {
    pub(crate) fn from_parts(dim: usize, charts: Vec<Chart>, atlas: Atlas) -> Self {
        Self {
            dim,
            charts,
            atlas,
            fd_step_metric: 1e-6,
            fd_step_gamma: 1e-5,
            fd_step_scalar: 1e-4,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn chart_count(&self) -> usize {
        self.charts.len()
    }

    /// Override the finite-difference step for metric derivatives.
    pub fn with_fd_step(mut self, step: f64) -> Self {
        self.fd_step_metric = step;
        self
    }

    fn chart(&self, chart: usize) -> Result<&Chart> {
        self.charts.get(chart).ok_or(Error::OutsideChartDomain { chart })
    }

    pub fn chart_contains(&self, chart: usize, m: &DVec) -> bool {
        self.charts.get(chart).map(|c| (c.contains)(m)).unwrap_or(false)
    }

    /// Metric tensor at `m`, validated for symmetry domain and positive
    /// definiteness.
    pub fn metric(&self, chart: usize, m: &DVec) -> Result<DMat> {
        let c = self.chart(chart)?;
        if !(c.contains)(m) {
            return Err(Error::OutsideChartDomain { chart });
        }
        let g = (c.metric)(m);
        if Cholesky::new(g.clone()).is_none() {
            return Err(Error::MetricNotPositiveDefinite { chart });
        }
        Ok(g)
    }

    /// Metric evaluated without the domain/PD checks; used inside
    /// finite-difference stencils that may poke marginally past the domain.
    fn metric_raw(&self, chart: usize, m: &DVec) -> Result<DMat> {
        Ok((self.chart(chart)?.metric)(m))
    }

    pub fn metric_inverse(&self, chart: usize, m: &DVec) -> Result<DMat> {
        self.metric(chart, m)?
            .try_inverse()
            .ok_or(Error::MetricNotPositiveDefinite { chart })
    }

    /// ∂ₖ g_ij at `m`: closed form when the chart supplies it, otherwise
    /// central finite differences with the per-manifold relative step.
    pub fn metric_partials(&self, chart: usize, m: &DVec) -> Result<Rank3> {
        let c = self.chart(chart)?;
        if !(c.contains)(m) {
            return Err(Error::OutsideChartDomain { chart });
        }
        if let Some(p) = &c.metric_partials {
            return Ok(p(m));
        }
        let d = self.dim;
        let mut dg = Rank3::zeros(d);
        for k in 0..d {
            let h = self.fd_step_metric * (1.0 + m[k].abs());
            let mut mp = m.clone();
            let mut mm = m.clone();
            mp[k] += h;
            mm[k] -= h;
            if !(c.contains)(&mp) || !(c.contains)(&mm) {
                return Err(Error::StencilExitsDomain { chart });
            }
            let gp = self.metric_raw(chart, &mp)?;
            let gm = self.metric_raw(chart, &mm)?;
            for i in 0..d {
                for j in 0..d {
                    dg.set(k, i, j, (gp[(i, j)] - gm[(i, j)]) / (2.0 * h));
                }
            }
        }
        Ok(dg)
    }

    /// Christoffel symbols Γ^j_kl of the Levi-Civita connection,
    /// Γ^j_kl = ½ (∂ₖ g_il + ∂ₗ g_ki − ∂ᵢ g_kl) g^ji.
    pub fn christoffel(&self, chart: usize, m: &DVec) -> Result<Rank3> {
        let d = self.dim;
        let g_inv = self.metric_inverse(chart, m)?;
        let dg = self.metric_partials(chart, m)?;
        let mut gamma = Rank3::zeros(d);
        for j in 0..d {
            for k in 0..d {
                for l in k..d {
                    let mut s = 0.0;
                    for i in 0..d {
                        s += 0.5
                            * (dg.get(k, i, l) + dg.get(l, k, i) - dg.get(i, k, l))
                            * g_inv[(j, i)];
                    }
                    gamma.set(j, k, l, s);
                    gamma.set(j, l, k, s);
                }
            }
        }
        Ok(gamma)
    }

    /// ∂ₚ Γ^j_kl by central differences of `christoffel`.
    pub fn christoffel_partials(&self, chart: usize, m: &DVec) -> Result<Rank4> {
        let d = self.dim;
        let mut dgamma = Rank4::zeros(d);
        for p in 0..d {
            let h = self.fd_step_gamma * (1.0 + m[p].abs());
            let mut mp = m.clone();
            let mut mm = m.clone();
            mp[p] += h;
            mm[p] -= h;
            let gp = self.christoffel(chart, &mp).map_err(|e| match e {
                Error::OutsideChartDomain { chart } => Error::StencilExitsDomain { chart },
                other => other,
            })?;
            let gm = self.christoffel(chart, &mm).map_err(|e| match e {
                Error::OutsideChartDomain { chart } => Error::StencilExitsDomain { chart },
                other => other,
            })?;
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        dgamma.set(p, j, k, l, (gp.get(j, k, l) - gm.get(j, k, l)) / (2.0 * h));
                    }
                }
            }
        }
        Ok(dgamma)
    }

    /// Full curvature tensor and Ricci tensor at `m`.
    ///
    /// R^i_jkl = ∂ₖΓ^i_lj − ∂ₗΓ^i_kj + Γ^i_km Γ^m_lj − Γ^i_lm Γ^m_kj,
    /// Ricci_kl = Σ_i R^i_kil.
    pub fn curvature_and_ricci(&self, chart: usize, m: &DVec) -> Result<CurvatureData> {
        let d = self.dim;
        let gamma = self.christoffel(chart, m)?;
        let dgamma = self.christoffel_partials(chart, m)?;
        let mut riemann = Rank4::zeros(d);
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let mut r = dgamma.get(k, i, l, j) - dgamma.get(l, i, k, j);
                        for p in 0..d {
                            r += gamma.get(i, k, p) * gamma.get(p, l, j)
                                - gamma.get(i, l, p) * gamma.get(p, k, j);
                        }
                        riemann.set(i, j, k, l, r);
                    }
                }
            }
        }
        let mut ricci = DMat::zeros(d, d);
        for k in 0..d {
            for l in 0..d {
                let mut s = 0.0;
                for i in 0..d {
                    s += riemann.get(i, k, i, l);
                }
                ricci[(k, l)] = s;
            }
        }
        Ok(CurvatureData { point: ChartPoint::new(chart, m.clone()), riemann, ricci })
    }

    /// Ricci with one index raised: (Ric♯)^k_l = g^km Ricci_ml.
    pub fn ricci_operator(&self, chart: usize, m: &DVec) -> Result<DMat> {
        let g_inv = self.metric_inverse(chart, m)?;
        let ricci = self.curvature_and_ricci(chart, m)?.ricci;
        Ok(g_inv * ricci)
    }

    /// Laplace–Beltrami operator applied to a scalar field at `m`:
    /// Δf = g^ij [∂²f/∂mⁱ∂mʲ − Γ^k_ij ∂f/∂mᵏ].
    pub fn laplace_beltrami(
        &self,
        chart: usize,
        f: &(dyn Fn(&DVec) -> f64 + Sync),
        m: &DVec,
    ) -> Result<f64> {
        let d = self.dim;
        let c = self.chart(chart)?;
        let g_inv = self.metric_inverse(chart, m)?;
        let gamma = self.christoffel(chart, m)?;
        let h: Vec<f64> = (0..d).map(|i| self.fd_step_scalar * (1.0 + m[i].abs())).collect();

        // stencil must stay in the chart
        for i in 0..d {
            let mut mp = m.clone();
            let mut mm = m.clone();
            mp[i] += h[i];
            mm[i] -= h[i];
            if !(c.contains)(&mp) || !(c.contains)(&mm) {
                return Err(Error::StencilExitsDomain { chart });
            }
        }

        let f0 = f(m);
        let mut grad = DVec::zeros(d);
        let mut hess = DMat::zeros(d, d);
        for i in 0..d {
            let mut mp = m.clone();
            let mut mm = m.clone();
            mp[i] += h[i];
            mm[i] -= h[i];
            let fp = f(&mp);
            let fm = f(&mm);
            grad[i] = (fp - fm) / (2.0 * h[i]);
            hess[(i, i)] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        }
        for i in 0..d {
            for j in (i + 1)..d {
                let mut mpp = m.clone();
                let mut mpm = m.clone();
                let mut mmp = m.clone();
                let mut mmm = m.clone();
                mpp[i] += h[i];
                mpp[j] += h[j];
                mpm[i] += h[i];
                mpm[j] -= h[j];
                mmp[i] -= h[i];
                mmp[j] += h[j];
                mmm[i] -= h[i];
                mmm[j] -= h[j];
                let v = (f(&mpp) - f(&mpm) - f(&mmp) + f(&mmm)) / (4.0 * h[i] * h[j]);
                hess[(i, j)] = v;
                hess[(j, i)] = v;
            }
        }

        let mut lap = 0.0;
        for i in 0..d {
            for j in 0..d {
                let mut t = hess[(i, j)];
                for k in 0..d {
                    t -= gamma.get(k, i, j) * grad[k];
                }
                lap += g_inv[(i, j)] * t;
            }
        }
        Ok(lap)
    }

    /// g-inner product of two tangent vectors at the same base point.
    pub fn inner(&self, chart: usize, m: &DVec, v: &DVec, w: &DVec) -> Result<f64> {
        let g = self.metric(chart, m)?;
        Ok((v.transpose() * &g * w)[(0, 0)])
    }

    /// g-norm of a tangent vector.
    pub fn norm(&self, chart: usize, m: &DVec, v: &DVec) -> Result<f64> {
        Ok(self.inner(chart, m, v, v)?.max(0.0).sqrt())
    }

    /// When `m` has drifted into a chart's escape band, the preferred chart to
    /// continue in. `None` when the point is comfortably inside.
    pub fn needs_transition(&self, chart: usize, m: &DVec) -> Option<usize> {
        builtins::needs_transition(&self.atlas, chart, m)
    }

    /// Convert coordinates between charts on their overlap, returning the new
    /// coordinates and the Jacobian ∂(new)/∂(old) for transporting tangent
    /// vectors and frames. `None` when no map exists.
    pub fn convert(&self, from: usize, to: usize, m: &DVec) -> Option<(DVec, DMat)> {
        builtins::convert(&self.atlas, from, to, m)
    }

    /// Apply any pending chart transition to a point/velocity pair.
    fn apply_transitions(&self, chart: &mut usize, m: &mut DVec, vs: &mut [&mut DVec]) -> Result<()> {
        while let Some(target) = self.needs_transition(*chart, m) {
            let (nm, jac) = self
                .convert(*chart, target, m)
                .ok_or(Error::ChartExitNoTransition { chart: *chart })?;
            *m = nm;
            for v in vs.iter_mut() {
                **v = &jac * &**v;
            }
            *chart = target;
        }
        if !self.chart_contains(*chart, m) {
            return Err(Error::ChartExitNoTransition { chart: *chart });
        }
        Ok(())
    }

    /// Integrate the geodesic equation d²γ^α/ds² + Γ^α_jk γ̇^j γ̇^k = 0 with
    /// the classical fourth-order one-step method, applying chart transitions
    /// on overlap.
    pub fn geodesic_integrate(
        &self,
        m0: &ChartPoint,
        v0: &DVec,
        t_end: f64,
        dt: f64,
    ) -> Result<DiscretePath> {
        if dt <= 0.0 || t_end < 0.0 {
            return Err(Error::InvalidArgument(format!("bad time grid: T={t_end}, dt={dt}")));
        }
        self.metric(m0.chart, &m0.coords)?;
        // snap the step so the grid lands exactly on t_end
        let n = ((t_end / dt).round() as usize).max(1);
        let dt = t_end / n as f64;
        let mut chart = m0.chart;
        let mut m = m0.coords.clone();
        let mut v = v0.clone();
        let mut nodes = Vec::with_capacity(n + 1);
        let mut velocities = Vec::with_capacity(n + 1);
        nodes.push(ChartPoint::new(chart, m.clone()));
        velocities.push(v.clone());
        for _ in 0..n {
            let (nm, nv) = self.rk4_geodesic_step(chart, &m, &v, dt)?;
            m = nm;
            v = nv;
            self.apply_transitions(&mut chart, &mut m, &mut [&mut v])?;
            nodes.push(ChartPoint::new(chart, m.clone()));
            velocities.push(v.clone());
        }
        Ok(DiscretePath { dt, nodes, velocities: Some(velocities) })
    }

    fn geodesic_rhs(&self, chart: usize, m: &DVec, v: &DVec) -> Result<DVec> {
        let d = self.dim;
        let gamma = self.christoffel(chart, m)?;
        let mut a = DVec::zeros(d);
        for alpha in 0..d {
            let mut s = 0.0;
            for j in 0..d {
                for k in 0..d {
                    s -= gamma.get(alpha, j, k) * v[j] * v[k];
                }
            }
            a[alpha] = s;
        }
        Ok(a)
    }

    fn rk4_geodesic_step(&self, chart: usize, m: &DVec, v: &DVec, dt: f64) -> Result<(DVec, DVec)> {
        let k1m = v.clone();
        let k1v = self.geodesic_rhs(chart, m, v)?;
        let k2m = v + &k1v * (dt / 2.0);
        let k2v = self.geodesic_rhs(chart, &(m + &k1m * (dt / 2.0)), &k2m)?;
        let k3m = v + &k2v * (dt / 2.0);
        let k3v = self.geodesic_rhs(chart, &(m + &k2m * (dt / 2.0)), &k3m)?;
        let k4m = v + &k3v * dt;
        let k4v = self.geodesic_rhs(chart, &(m + &k3m * dt), &k4m)?;
        let nm = m + (k1m + &k2m * 2.0 + &k3m * 2.0 + k4m) * (dt / 6.0);
        let nv = v + (k1v + &k2v * 2.0 + &k3v * 2.0 + k4v) * (dt / 6.0);
        Ok((nm, nv))
    }

    /// Parallel-transport `z0` along a discretized path: ż^j = −Γ^j_kl γ̇^k z^l,
    /// integrated with the same fourth-order scheme using quartic interpolation
    /// of the path at half-steps.
    pub fn parallel_transport_ode(&self, path: &DiscretePath, z0: &DVec) -> Result<Vec<DVec>> {
        if path.nodes.len() < 2 {
            return Err(Error::MalformedPath("need at least 2 nodes".into()));
        }
        let dt = path.dt;
        let vel = self.path_velocities(path)?;
        let mut z = z0.clone();
        let mut out = Vec::with_capacity(path.nodes.len());
        out.push(z.clone());
        for i in 0..path.nodes.len() - 1 {
            let chart = path.nodes[i].chart;
            let (m0, v0) = (self.node_in_chart(path, i, chart)?, &vel[i]);
            let (m1, v1raw) = (self.node_in_chart(path, i + 1, chart)?, &vel[i + 1]);
            let v1 = self.vector_in_chart(path, i + 1, chart, v1raw)?;
            let mh = self.midpoint_in_chart(path, i, chart)?;
            let vh = (&v0.clone() + &v1) * 0.5;

            let rhs = |m: &DVec, v: &DVec, z: &DVec| -> Result<DVec> {
                let gamma = self.christoffel(chart, m)?;
                let d = self.dim;
                let mut dz = DVec::zeros(d);
                for j in 0..d {
                    let mut s = 0.0;
                    for k in 0..d {
                        for l in 0..d {
                            s -= gamma.get(j, k, l) * v[k] * z[l];
                        }
                    }
                    dz[j] = s;
                }
                Ok(dz)
            };

            let k1 = rhs(&m0, v0, &z)?;
            let k2 = rhs(&mh, &vh, &(&z + &k1 * (dt / 2.0)))?;
            let k3 = rhs(&mh, &vh, &(&z + &k2 * (dt / 2.0)))?;
            let k4 = rhs(&m1, &v1, &(&z + &k3 * dt))?;
            z += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
            // re-express z in the next node's chart if it differs
            if path.nodes[i + 1].chart != chart {
                let (_, jac) = self
                    .convert(chart, path.nodes[i + 1].chart, &m1)
                    .ok_or(Error::ChartExitNoTransition { chart })?;
                z = &jac * z;
            }
            out.push(z.clone());
        }
        Ok(out)
    }

    /// Kinetic energy ∫ g_ij γ̇^i γ̇^j dt of a discretized path, by trapezoid
    /// quadrature with finite-difference velocities.
    pub fn classical_energy(&self, path: &DiscretePath) -> Result<f64> {
        if path.nodes.len() < 2 {
            return Err(Error::MalformedPath("need at least 2 nodes".into()));
        }
        let vel = self.path_velocities(path)?;
        let mut integrand = Vec::with_capacity(path.nodes.len());
        for (node, v) in path.nodes.iter().zip(&vel) {
            let g = self.metric(node.chart, &node.coords)?;
            integrand.push((v.transpose() * &g * v)[(0, 0)]);
        }
        let mut e = 0.0;
        for i in 0..integrand.len() - 1 {
            e += 0.5 * (integrand[i] + integrand[i + 1]) * path.dt;
        }
        Ok(e)
    }

    /// Node velocities: stored samples when present, otherwise central finite
    /// differences of the node coordinates (one-sided at the ends).
    fn path_velocities(&self, path: &DiscretePath) -> Result<Vec<DVec>> {
        if let Some(v) = &path.velocities {
            if v.len() != path.nodes.len() {
                return Err(Error::MalformedPath("velocity/node count mismatch".into()));
            }
            return Ok(v.clone());
        }
        let n = path.nodes.len();
        let dt = path.dt;
        let mut vel = Vec::with_capacity(n);
        for i in 0..n {
            let v = if i == 0 {
                let a = self.node_in_chart(path, 0, path.nodes[0].chart)?;
                let b = self.node_in_chart(path, 1, path.nodes[0].chart)?;
                (b - a) / dt
            } else if i == n - 1 {
                let a = self.node_in_chart(path, n - 2, path.nodes[i].chart)?;
                let b = self.node_in_chart(path, n - 1, path.nodes[i].chart)?;
                (b - a) / dt
            } else {
                let a = self.node_in_chart(path, i - 1, path.nodes[i].chart)?;
                let b = self.node_in_chart(path, i + 1, path.nodes[i].chart)?;
                (b - a) / (2.0 * dt)
            };
            vel.push(v);
        }
        Ok(vel)
    }

    fn node_in_chart(&self, path: &DiscretePath, i: usize, chart: usize) -> Result<DVec> {
        let node = &path.nodes[i];
        if node.chart == chart {
            return Ok(node.coords.clone());
        }
        self.convert(node.chart, chart, &node.coords)
            .map(|(m, _)| m)
            .ok_or(Error::ChartExitNoTransition { chart: node.chart })
    }

    fn vector_in_chart(&self, path: &DiscretePath, i: usize, chart: usize, v: &DVec) -> Result<DVec> {
        let node = &path.nodes[i];
        if node.chart == chart {
            return Ok(v.clone());
        }
        let (_, jac) = self
            .convert(node.chart, chart, &node.coords)
            .ok_or(Error::ChartExitNoTransition { chart: node.chart })?;
        Ok(&jac * v)
    }

    /// O(dt⁴) midpoint value between nodes i and i+1 via 4-point interpolation
    /// (3-point at the path ends).
    fn midpoint_in_chart(&self, path: &DiscretePath, i: usize, chart: usize) -> Result<DVec> {
        let n = path.nodes.len();
        let p = |j: usize| self.node_in_chart(path, j, chart);
        if i == 0 || i + 2 >= n {
            let a = p(i)?;
            let b = p(i + 1)?;
            Ok((a + b) * 0.5)
        } else {
            let a = p(i - 1)?;
            let b = p(i)?;
            let c = p(i + 1)?;
            let d = p(i + 2)?;
            Ok((b * 9.0 + c * 9.0 - a - d) / 16.0)
        }
    }
}
