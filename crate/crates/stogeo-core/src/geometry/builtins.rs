//! Built-in manifolds and their chart atlases.
//!
//! - flat spaces (Euclidean line/plane, flat torus): one global chart, g = I;
//! - round sphere of radius R: a polar band chart (θ, φ) away from the poles
//!   plus two conformal stereographic caps, with closed-form metric
//!   derivatives and transition maps;
//! - user-defined metrics via callables: one chart, finite-difference
//!   derivatives unless closed-form partials are supplied.

use super::{Atlas, Chart, ChartedManifold};
use crate::tensor::Rank3;
use crate::{DMat, DVec};
use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

/// Polar chart of the sphere atlas.
pub const SPHERE_CHART_POLAR: usize = 0;
/// North stereographic cap (covers θ = 0).
pub const SPHERE_CHART_NORTH: usize = 1;
/// South stereographic cap (covers θ = π).
pub const SPHERE_CHART_SOUTH: usize = 2;

// Polar chart is valid on θ ∈ [δ, π−δ]; Eq-degenerate poles stay excluded.
const POLAR_DELTA: f64 = 1e-3;
// Leave the polar chart for a cap once θ drifts past this band...
const POLAR_ESCAPE: f64 = 0.2;
// ...and come back from a cap once θ exceeds this (hysteresis band).
const CAP_ESCAPE_THETA: f64 = 1.0;
// Hard cap-domain limit in θ.
const CAP_MAX_THETA: f64 = 1.2;

impl ChartedManifold {
    /// Euclidean space of dimension `dim` (identity metric, single chart).
    pub fn euclidean(dim: usize) -> Self {
        let metric = Box::new(move |_: &DVec| DMat::identity(dim, dim));
        let partials = Box::new(move |_: &DVec| Rank3::zeros(dim));
        let chart = Chart::new(metric, Some(partials), Box::new(|_: &DVec| true));
        Self::from_parts(dim, vec![chart], Atlas::Single)
    }

    /// Flat torus of dimension `dim`: identity metric on the universal cover.
    /// Periodicity matters only to fields defined on it, not to the metric.
    pub fn flat_torus(dim: usize) -> Self {
        Self::euclidean(dim)
    }

    /// Round sphere of radius `radius`: polar band plus two stereographic
    /// caps.
    pub fn sphere(radius: f64) -> Self {
        assert!(radius > 0.0, "sphere radius must be positive");
        let r = radius;

        let polar_metric = Box::new(move |m: &DVec| {
            let mut g = DMat::zeros(2, 2);
            g[(0, 0)] = r * r;
            g[(1, 1)] = r * r * m[0].sin().powi(2);
            g
        });
        let polar_partials = Box::new(move |m: &DVec| {
            // ∂_θ g_φφ = 2 R² sinθ cosθ; all other derivatives vanish.
            let mut dg = Rank3::zeros(2);
            dg.set(0, 1, 1, 2.0 * r * r * m[0].sin() * m[0].cos());
            dg
        });
        let polar_domain =
            Box::new(|m: &DVec| m[0] > POLAR_DELTA && m[0] < core::f64::consts::PI - POLAR_DELTA);
        let polar = Chart::new(polar_metric, Some(polar_partials), polar_domain);

        let cap = |_north: bool| -> Chart {
            let metric = Box::new(move |m: &DVec| {
                let lam = cap_conformal(r, m);
                DMat::identity(2, 2) * (lam * lam)
            });
            let partials = Box::new(move |m: &DVec| {
                // g_ij = λ² δ_ij with λ = 1/(1 + ρ²/(4R²)):
                // ∂_k λ = −λ² x_k/(2R²), so ∂_k g_ij = −λ³ x_k/R² δ_ij.
                let lam = cap_conformal(r, m);
                let mut dg = Rank3::zeros(2);
                for k in 0..2 {
                    let v = -lam.powi(3) * m[k] / (r * r);
                    dg.set(k, 0, 0, v);
                    dg.set(k, 1, 1, v);
                }
                dg
            });
            let rho_max = 2.0 * r * (CAP_MAX_THETA / 2.0).tan();
            let domain = Box::new(move |m: &DVec| m.norm() < rho_max);
            Chart::new(metric, Some(partials), domain)
        };

        Self::from_parts(2, vec![polar, cap(true), cap(false)], Atlas::Sphere { radius })
    }

    /// Manifold defined by a user metric callable on a single global chart.
    pub fn from_metric(
        dim: usize,
        metric: super::MetricFn,
        metric_partials: Option<super::MetricPartialsFn>,
    ) -> Self {
        let chart = Chart::new(metric, metric_partials, Box::new(|_: &DVec| true));
        Self::from_parts(dim, vec![chart], Atlas::Single)
    }
}

#[inline]
fn cap_conformal(radius: f64, m: &DVec) -> f64 {
    1.0 / (1.0 + (m[0] * m[0] + m[1] * m[1]) / (4.0 * radius * radius))
}

pub(super) fn needs_transition(atlas: &Atlas, chart: usize, m: &DVec) -> Option<usize> {
    match atlas {
        Atlas::Single => None,
        Atlas::Sphere { radius } => match chart {
            SPHERE_CHART_POLAR => {
                if m[0] < POLAR_ESCAPE {
                    Some(SPHERE_CHART_NORTH)
                } else if m[0] > core::f64::consts::PI - POLAR_ESCAPE {
                    Some(SPHERE_CHART_SOUTH)
                } else {
                    None
                }
            }
            SPHERE_CHART_NORTH | SPHERE_CHART_SOUTH => {
                let rho = (m[0] * m[0] + m[1] * m[1]).sqrt();
                let theta_cap = 2.0 * (rho / (2.0 * radius)).atan();
                if theta_cap > CAP_ESCAPE_THETA {
                    Some(SPHERE_CHART_POLAR)
                } else {
                    None
                }
            }
            _ => None,
        },
    }
}

pub(super) fn convert(atlas: &Atlas, from: usize, to: usize, m: &DVec) -> Option<(DVec, DMat)> {
    match atlas {
        Atlas::Single => (from == to).then(|| (m.clone(), DMat::identity(m.len(), m.len()))),
        Atlas::Sphere { radius } => sphere_convert(*radius, from, to, m),
    }
}

fn sphere_convert(r: f64, from: usize, to: usize, m: &DVec) -> Option<(DVec, DMat)> {
    if from == to {
        return Some((m.clone(), DMat::identity(2, 2)));
    }
    match (from, to) {
        (SPHERE_CHART_POLAR, SPHERE_CHART_NORTH) => Some(polar_to_cap(r, m, true)),
        (SPHERE_CHART_POLAR, SPHERE_CHART_SOUTH) => Some(polar_to_cap(r, m, false)),
        (SPHERE_CHART_NORTH, SPHERE_CHART_POLAR) => Some(cap_to_polar(r, m, true)),
        (SPHERE_CHART_SOUTH, SPHERE_CHART_POLAR) => Some(cap_to_polar(r, m, false)),
        (SPHERE_CHART_NORTH, SPHERE_CHART_SOUTH) | (SPHERE_CHART_SOUTH, SPHERE_CHART_NORTH) => {
            let (mid, j1) = cap_to_polar(r, m, from == SPHERE_CHART_NORTH);
            let (out, j2) = polar_to_cap(r, &mid, to == SPHERE_CHART_NORTH);
            Some((out, j2 * j1))
        }
        _ => None,
    }
}

/// (θ, φ) ↦ (x, y) = 2R tan(θ̄/2)(cos φ, sin φ), θ̄ = θ for the north cap and
/// π − θ for the south cap.
fn polar_to_cap(r: f64, m: &DVec, north: bool) -> (DVec, DMat) {
    let (theta, phi) = (m[0], m[1]);
    let tb = if north { theta } else { core::f64::consts::PI - theta };
    let sign = if north { 1.0 } else { -1.0 };
    let rho = 2.0 * r * (tb / 2.0).tan();
    let drho_dtheta = sign * r / (tb / 2.0).cos().powi(2);
    let (c, s) = (phi.cos(), phi.sin());
    let out = DVec::from_vec(vec![rho * c, rho * s]);
    let mut jac = DMat::zeros(2, 2);
    jac[(0, 0)] = drho_dtheta * c;
    jac[(0, 1)] = -rho * s;
    jac[(1, 0)] = drho_dtheta * s;
    jac[(1, 1)] = rho * c;
    (out, jac)
}

fn cap_to_polar(r: f64, m: &DVec, north: bool) -> (DVec, DMat) {
    let (x, y) = (m[0], m[1]);
    let rho2 = x * x + y * y;
    let rho = rho2.sqrt();
    let half = (rho / (2.0 * r)).atan();
    let sign = if north { 1.0 } else { -1.0 };
    let theta = if north { 2.0 * half } else { core::f64::consts::PI - 2.0 * half };
    let phi = y.atan2(x);
    // dθ/dρ = ±(1/R) / (1 + ρ²/(4R²))
    let dtheta_drho = sign * (1.0 / r) / (1.0 + rho2 / (4.0 * r * r));
    let out = DVec::from_vec(vec![theta, phi]);
    let mut jac = DMat::zeros(2, 2);
    jac[(0, 0)] = dtheta_drho * x / rho;
    jac[(0, 1)] = dtheta_drho * y / rho;
    jac[(1, 0)] = -y / rho2;
    jac[(1, 1)] = x / rho2;
    (out, jac)
}

/// Collect coordinates into a `DVec`.
pub fn coords(values: &[f64]) -> DVec {
    DVec::from_vec(Vec::from(values))
}
