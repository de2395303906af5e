//! Bi-static TX / target / RX geometry.
//!
//! The TX sits at the origin with its array along the axis, the target at
//! range `r` and departure angle `theta`, and the RX at distance `R` from the
//! TX. Every quantity seen by the RX (arrival angle, RX range, and the
//! derivatives of `sin(phi)`) is expressed through the TX-side parameters.

use crate::closed_form::RiemannBounds;
use crate::error::{Error, Result};
use crate::layout::ArrayLayout;

/// TX-RX-target configuration. Distances in meters, angles in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneGeometry {
    /// TX-RX baseline `R`.
    pub baseline: f64,
    /// TX-target range `r`.
    pub range: f64,
    /// Angle of departure `theta`.
    pub theta: f64,
    /// Relative angle between the TX and RX array axes.
    pub vartheta: f64,
}

impl SceneGeometry {
    pub fn new(baseline: f64, range: f64, theta: f64) -> Result<Self> {
        Self::with_relative_angle(baseline, range, theta, 0.0)
    }

    pub fn with_relative_angle(baseline: f64, range: f64, theta: f64, vartheta: f64) -> Result<Self> {
        if !(baseline > 0.0 && baseline.is_finite()) {
            return Err(Error::DegenerateGeometry(format!("baseline R must be positive, got {baseline}")));
        }
        if !(range > 0.0 && range.is_finite()) {
            return Err(Error::DegenerateGeometry(format!("range r must be positive, got {range}")));
        }
        if !(theta.abs() < std::f64::consts::FRAC_PI_2) {
            return Err(Error::DegenerateGeometry(format!("|theta| must be below pi/2, got {theta}")));
        }
        if !vartheta.is_finite() {
            return Err(Error::DegenerateGeometry("relative angle must be finite".into()));
        }
        Ok(Self { baseline, range, theta, vartheta })
    }

    /// Same scene, different target range.
    pub fn at_range(&self, range: f64) -> Self {
        Self { range, ..*self }
    }

    /// Same scene, different departure angle.
    pub fn at_theta(&self, theta: f64) -> Self {
        Self { theta, ..*self }
    }

    /// Squared target-RX distance.
    fn rx_range_sq(&self) -> f64 {
        let (big_r, r) = (self.baseline, self.range);
        big_r * big_r + r * r - 2.0 * big_r * r * (self.theta + self.vartheta).cos()
    }

    /// Target-RX distance `r̄` from the law of cosines.
    pub fn rx_range(&self) -> f64 {
        self.rx_range_sq().max(0.0).sqrt()
    }

    /// Angle of arrival `phi` at the RX, from the sine rule.
    pub fn aoa(&self) -> Result<f64> {
        let rbar = self.rx_range();
        if rbar == 0.0 {
            return Err(Error::DegenerateGeometry("target coincides with the RX".into()));
        }
        let s = (self.range * (self.theta + self.vartheta).sin() / rbar).clamp(-1.0, 1.0);
        Ok(s.asin() + self.vartheta)
    }

    fn require_aligned(&self) -> Result<()> {
        if self.vartheta != 0.0 {
            return Err(Error::Precondition(format!(
                "derivative terms are defined for vartheta = 0, got {}",
                self.vartheta
            )));
        }
        Ok(())
    }

    fn derivative_denominator(&self) -> Result<f64> {
        self.require_aligned()?;
        let q = self.rx_range_sq();
        if q <= 0.0 {
            return Err(Error::DegenerateGeometry("target coincides with the RX".into()));
        }
        Ok(q * q.sqrt())
    }

    /// `∂ sin(phi) / ∂ theta`.
    pub fn dsinphi_dtheta(&self) -> Result<f64> {
        let den = self.derivative_denominator()?;
        let (big_r, r, th) = (self.baseline, self.range, self.theta);
        let q = self.rx_range_sq();
        Ok((r * th.cos() * q - big_r * r * r * th.sin().powi(2)) / den)
    }

    /// `∂ sin(phi) / ∂ r`, in 1/m.
    pub fn dsinphi_dr(&self) -> Result<f64> {
        let den = self.derivative_denominator()?;
        let (big_r, r, th) = (self.baseline, self.range, self.theta);
        Ok(big_r * th.sin() * (big_r - r * th.cos()) / den)
    }
}

/// Angle subtended at the target between broadside and the normalized
/// aperture coordinate `x = n / r`: `tan psi = x cos(theta) / (1 - x sin(theta))`.
pub fn psi_from_x(x: f64, theta: f64) -> Result<f64> {
    let den = 1.0 - x * theta.sin();
    if den == 0.0 {
        return Err(Error::SpanSingularity { x, theta });
    }
    Ok((x * theta.cos()).atan2(den))
}

/// Full-aperture and subarray spans at `theta = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricSpans {
    pub psi0: f64,
    pub delta_psi: f64,
}

/// Span angles of a WSMS seen from the target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularSpans {
    /// `psi(x1) .. psi(x4)` at the Riemann bounds.
    pub psi: [f64; 4],
    pub theta: f64,
    symmetric: Option<SymmetricSpans>,
}

impl AngularSpans {
    /// `(psi0, delta_psi)`; only defined at `theta = 0`.
    pub fn symmetric(&self) -> Option<SymmetricSpans> {
        self.symmetric
    }

    pub fn psi_at(&self, x: f64) -> Result<f64> {
        psi_from_x(x, self.theta)
    }
}

/// Angular spans of a WSMS. A single subarray (`K = 1`) has no
/// inter-subarray pitch, so its full span is its own span.
pub fn angular_spans(layout: &ArrayLayout, geom: &SceneGeometry) -> Result<AngularSpans> {
    layout.require_wsms()?;
    let theta = geom.theta;
    let bounds = RiemannBounds::new(layout, geom.range);
    let mut psi = [0.0; 4];
    for (slot, x) in psi.iter_mut().zip(bounds.as_array()) {
        *slot = psi_from_x(x, theta)?;
    }
    let symmetric = (theta == 0.0).then(|| {
        if layout.subarrays() == 1 {
            let half = psi_from_x(0.5 * layout.per_subarray() as f64 * bounds.delta_d, 0.0).unwrap_or(0.0);
            SymmetricSpans { psi0: 2.0 * half, delta_psi: 2.0 * half }
        } else {
            SymmetricSpans { psi0: psi[3] + psi[2], delta_psi: psi[3] - psi[2] }
        }
    });
    Ok(AngularSpans { psi, theta, symmetric })
}

/// Span `psi0 = 2 atan(K Δ_D / 2)` of the subarray centers, the coordinate of
/// the hybrid-wavefront closed forms.
pub fn subarray_center_span(layout: &ArrayLayout, range: f64) -> f64 {
    let half = 0.5 * layout.subarrays() as f64 * layout.subarray_pitch() / range;
    2.0 * half.atan()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    /// Oracle: TX at the origin, RX at (R, 0), target at angle theta off the
    /// TX-RX line. Measures the RX distance and the interior angle at the RX.
    fn coordinates(big_r: f64, r: f64, theta: f64) -> (f64, f64) {
        let target = (r * theta.cos(), r * theta.sin());
        let rx = (big_r, 0.0);
        let (dx, dy) = (target.0 - rx.0, target.1 - rx.1);
        let dist = dx.hypot(dy);
        // interior angle at the RX between RX->TX and RX->target
        let to_tx = (-rx.0, -rx.1);
        let cos_a = (to_tx.0 * dx + to_tx.1 * dy) / (big_r * dist);
        (dist, cos_a.clamp(-1.0, 1.0).acos())
    }

    #[test]
    fn collinear_and_right_angle() {
        let g = SceneGeometry::new(31.0, 10.0, 0.0).unwrap();
        assert_eq!(g.rx_range(), 21.0);
        assert_eq!(g.aoa().unwrap(), 0.0);
        let g = SceneGeometry { baseline: 31.0, range: 10.0, theta: FRAC_PI_2, vartheta: 0.0 };
        assert!((g.rx_range() - 1061f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn matches_coordinate_construction() {
        let g = SceneGeometry::new(31.0, 10.0, FRAC_PI_4).unwrap();
        let (dist, angle) = coordinates(31.0, 10.0, FRAC_PI_4);
        assert!((g.rx_range() - dist).abs() < 1e-12);
        assert!((g.aoa().unwrap() - angle).abs() < 1e-12);
        let expected = (10.0 * FRAC_PI_4.sin() / (961.0 + 100.0 - 620.0 * FRAC_PI_4.cos()).sqrt()).asin();
        assert!((g.aoa().unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn aoa_vanishes_for_tiny_range() {
        let g = SceneGeometry::new(31.0, 1e-9, FRAC_PI_4).unwrap();
        assert!(g.aoa().unwrap().abs() < 1e-9);
    }

    #[test]
    fn coincident_target_is_rejected() {
        let g = SceneGeometry::new(10.0, 10.0, 0.0).unwrap();
        assert!(matches!(g.aoa(), Err(Error::DegenerateGeometry(_))));
        assert!(matches!(g.dsinphi_dtheta(), Err(Error::DegenerateGeometry(_))));
        assert!(matches!(g.dsinphi_dr(), Err(Error::DegenerateGeometry(_))));
    }

    #[test]
    fn derivative_special_values() {
        let g = SceneGeometry::new(31.0, 10.0, 0.0).unwrap();
        assert!((g.dsinphi_dtheta().unwrap() - 10.0 / 21.0).abs() < 1e-15);
        assert_eq!(g.dsinphi_dr().unwrap(), 0.0);
        // second factor of the range derivative vanishes at r cos(theta) = R
        let th: f64 = 0.7;
        let g = SceneGeometry::new(31.0, 31.0 / th.cos(), th).unwrap();
        assert!(g.dsinphi_dr().unwrap().abs() < 1e-15);
        let g = SceneGeometry::new(31.0, 1e-12, 0.4).unwrap();
        assert!(g.dsinphi_dtheta().unwrap().abs() < 1e-12);
    }

    #[test]
    fn derivatives_need_aligned_axes() {
        let g = SceneGeometry::with_relative_angle(31.0, 10.0, 0.2, 0.1).unwrap();
        assert!(g.aoa().is_ok());
        assert!(matches!(g.dsinphi_dtheta(), Err(Error::Precondition(_))));
    }

    #[test]
    fn derivatives_match_finite_differences_on_grid() {
        let h = 1e-6;
        for i in 0..20 {
            for j in 0..20 {
                let theta = -1.2 + 2.4 * i as f64 / 19.0;
                let r = 2.0 + 25.0 * j as f64 / 19.0;
                let g = SceneGeometry::new(31.0, r, theta).unwrap();
                let sin_aoa = |g: SceneGeometry| g.aoa().unwrap().sin();
                let fd_t = (sin_aoa(g.at_theta(theta + h)) - sin_aoa(g.at_theta(theta - h))) / (2.0 * h);
                let fd_r = (sin_aoa(g.at_range(r + h)) - sin_aoa(g.at_range(r - h))) / (2.0 * h);
                let an_t = g.dsinphi_dtheta().unwrap();
                let an_r = g.dsinphi_dr().unwrap();
                assert!((fd_t - an_t).abs() <= 1e-6 * an_t.abs().max(1e-3), "theta {theta} r {r}");
                assert!((fd_r - an_r).abs() <= 1e-6 * an_r.abs().max(1e-3), "theta {theta} r {r}");
            }
        }
    }

    #[test]
    fn psi_special_values() {
        assert_eq!(psi_from_x(0.0, 0.3).unwrap(), 0.0);
        assert!((psi_from_x(0.5, 0.0).unwrap() - 0.5f64.atan()).abs() < 1e-16);
        let theta: f64 = 0.6;
        let x = 0.4;
        let psi = psi_from_x(x, theta).unwrap();
        let lhs = 1.0 - 2.0 * x * theta.sin() + x * x;
        let rhs = theta.cos().powi(2) / (theta - psi).cos().powi(2);
        assert!((lhs - rhs).abs() < 1e-12 * lhs);
        assert!(matches!(psi_from_x(2.0, std::f64::consts::FRAC_PI_6), Err(Error::SpanSingularity { .. })));
    }
}
