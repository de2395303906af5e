//! Steering vectors with analytic derivatives in `theta` and `r`.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::SceneGeometry;
use crate::layout::ArrayLayout;

/// Wavefront model of a TX manifold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Wavefront {
    /// Exact spherical phase at every element.
    Spherical,
    /// Planar within each subarray, spherical across subarray centers.
    Hybrid,
    /// Planar over the whole aperture.
    Planar,
}

impl Wavefront {
    pub fn as_str(&self) -> &'static str {
        match self {
            Wavefront::Spherical => "sw",
            Wavefront::Hybrid => "hspw",
            Wavefront::Planar => "pw",
        }
    }
}

/// A unit-norm manifold together with its partial derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringBundle {
    pub value: Vec<Complex64>,
    pub d_theta: Vec<Complex64>,
    pub d_r: Vec<Complex64>,
    pub model: Wavefront,
}

impl SteeringBundle {
    pub fn len(&self) -> usize {
        self.value.len()
    }

    pub fn is_empty(&self) -> bool {
        self.value.is_empty()
    }

    /// Entrywise conjugate of all three vectors.
    pub fn conj(&self) -> Self {
        let c = |v: &[Complex64]| v.iter().map(|z| z.conj()).collect();
        Self { value: c(&self.value), d_theta: c(&self.d_theta), d_r: c(&self.d_r), model: self.model }
    }
}

/// Spherical-wavefront bundle over arbitrary element coordinates.
pub(crate) fn spherical_bundle(positions: &[f64], wavelength: f64, r: f64, theta: f64) -> Result<SteeringBundle> {
    let k = 2.0 * PI / wavelength;
    let scale = 1.0 / (positions.len() as f64).sqrt();
    let (sin_t, cos_t) = theta.sin_cos();
    let mut value = Vec::with_capacity(positions.len());
    let mut d_theta = Vec::with_capacity(positions.len());
    let mut d_r = Vec::with_capacity(positions.len());
    for &n in positions {
        let dist_sq = r * r - 2.0 * n * r * sin_t + n * n;
        if dist_sq <= 0.0 {
            return Err(Error::ElementCoincidence { position: n });
        }
        let dist = dist_sq.sqrt();
        let v = Complex64::from_polar(scale, -k * dist);
        let jk = Complex64::new(0.0, k);
        value.push(v);
        d_theta.push(jk * (n * r * cos_t / dist) * v);
        d_r.push(jk * ((n * sin_t - r) / dist) * v);
    }
    Ok(SteeringBundle { value, d_theta, d_r, model: Wavefront::Spherical })
}

/// Exact spherical-wavefront TX manifold over the layout's element positions.
pub fn sw_tx_bundle(layout: &ArrayLayout, r: f64, theta: f64) -> Result<SteeringBundle> {
    spherical_bundle(&layout.positions(), layout.wavelength(), r, theta)
}

/// Far-field manifold `exp(j (2π/λ) n sin θ)` over the given coordinates.
fn planar_bundle(positions: &[f64], wavelength: f64, theta: f64) -> SteeringBundle {
    let k = 2.0 * PI / wavelength;
    let scale = 1.0 / (positions.len() as f64).sqrt();
    let (sin_t, cos_t) = theta.sin_cos();
    let value: Vec<Complex64> = positions.iter().map(|&n| Complex64::from_polar(scale, k * n * sin_t)).collect();
    let d_theta = positions
        .iter()
        .zip(&value)
        .map(|(&n, v)| Complex64::new(0.0, k * n * cos_t) * v)
        .collect();
    let d_r = vec![Complex64::new(0.0, 0.0); positions.len()];
    SteeringBundle { value, d_theta, d_r, model: Wavefront::Planar }
}

/// Planar-wavefront TX manifold over the full aperture; range independent.
pub fn pw_tx_bundle(layout: &ArrayLayout, theta: f64) -> SteeringBundle {
    planar_bundle(&layout.positions(), layout.wavelength(), theta)
}

/// Hybrid TX manifold `w(r, θ) ⊗ a_t(θ)`.
pub fn hspw_tx_bundle(layout: &ArrayLayout, r: f64, theta: f64) -> Result<SteeringBundle> {
    layout.require_wsms()?;
    let w = spherical_bundle(&layout.subarray_centers(), layout.wavelength(), r, theta)?;
    let a = planar_bundle(&layout.subarray_offsets(), layout.wavelength(), theta);
    let value = kron(&w.value, &a.value);
    let mut d_theta = kron(&w.value, &a.d_theta);
    for (acc, t) in d_theta.iter_mut().zip(kron(&w.d_theta, &a.value)) {
        *acc += t;
    }
    let d_r = kron(&w.d_r, &a.value);
    Ok(SteeringBundle { value, d_theta, d_r, model: Wavefront::Hybrid })
}

/// TX manifold for the requested wavefront model.
pub fn tx_bundle(model: Wavefront, layout: &ArrayLayout, r: f64, theta: f64) -> Result<SteeringBundle> {
    match model {
        Wavefront::Spherical => sw_tx_bundle(layout, r, theta),
        Wavefront::Hybrid => hspw_tx_bundle(layout, r, theta),
        Wavefront::Planar => Ok(pw_tx_bundle(layout, theta)),
    }
}

/// RX uniform array of `elements` antennas at `spacing`, steered towards the
/// arrival angle implied by `geom`. Derivatives follow through `sin(phi)`.
pub fn rx_bundle(elements: usize, spacing: f64, wavelength: f64, geom: &SceneGeometry) -> Result<SteeringBundle> {
    if elements == 0 {
        return Err(Error::InvalidLayout("RX needs at least one element".into()));
    }
    let sin_phi = geom.aoa()?.sin();
    let phi_theta = geom.dsinphi_dtheta()?;
    let phi_r = geom.dsinphi_dr()?;
    let scale = 1.0 / (elements as f64).sqrt();
    let mut value = Vec::with_capacity(elements);
    let mut d_theta = Vec::with_capacity(elements);
    let mut d_r = Vec::with_capacity(elements);
    for i in 0..elements {
        let coeff = PI / wavelength * (2.0 * i as f64 - elements as f64 + 1.0) * spacing;
        let v = Complex64::from_polar(scale, coeff * sin_phi);
        value.push(v);
        d_theta.push(Complex64::new(0.0, coeff * phi_theta) * v);
        d_r.push(Complex64::new(0.0, coeff * phi_r) * v);
    }
    Ok(SteeringBundle { value, d_theta, d_r, model: Wavefront::Planar })
}

/// Kronecker product of two vectors, outer index from `a`.
pub fn kron(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}
