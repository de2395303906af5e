//! The five sum formulas behind the AMFs, by direct summation and by the
//! midpoint-Riemann closed forms, for the spherical (SW) and hybrid (HSPW)
//! models.
//!
//! With `x = n/r`, `s = sin θ`, `c = cos θ`, `ν₁ = 1 - 2xs + x²` and
//! `ν₂ = (x - s)/c`, the normalized summands are
//!
//! | sum    | summand            |
//! |--------|--------------------|
//! | `S_θ²` | `x²/ν₁`            |
//! | `S_θ`  | `x/√ν₁`            |
//! | `S_r²` | `(xs - 1)²/ν₁`     |
//! | `S_r`  | `(xs - 1)/√ν₁`     |
//! | `S_θr` | `x(xs - 1)/ν₁`     |
//!
//! All antiderivatives fix the constant of integration at zero.

pub mod primitives;

use crate::error::{Error, Result};
use crate::layout::ArrayLayout;

pub use primitives::Primitive;

/// Largest `|θ|` accepted by the SW Riemann closed forms.
pub const THETA_CAP: f64 = 1.45;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SumMethod {
    Direct,
    Riemann,
}

impl SumMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            SumMethod::Direct => "direct",
            SumMethod::Riemann => "riemann",
        }
    }
}

/// Which manifold the sums belong to: every element (SW) or the subarray
/// centers only (HSPW).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SumModel {
    Spherical,
    Hybrid,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumFormulas {
    pub s_theta2: f64,
    pub s_theta: f64,
    pub s_r2: f64,
    pub s_r: f64,
    pub s_thetar: f64,
    pub method: SumMethod,
    pub model: SumModel,
}

impl SumFormulas {
    pub fn as_array(&self) -> [f64; 5] {
        [self.s_theta2, self.s_theta, self.s_r2, self.s_r, self.s_thetar]
    }
}

/// Integration bounds of the midpoint-Riemann closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannBounds {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub x4: f64,
    /// `d / r`.
    pub delta_d: f64,
    /// `D / r`.
    pub delta_big_d: f64,
}

impl RiemannBounds {
    pub fn new(layout: &ArrayLayout, range: f64) -> Self {
        let delta_d = layout.spacing() / range;
        let delta_big_d = layout.subarray_pitch() / range;
        let a = 0.5 * layout.subarrays() as f64 * delta_big_d;
        let b = 0.5 * layout.per_subarray() as f64 * delta_d;
        Self { x1: -a - b, x2: -a + b, x3: a - b, x4: a + b, delta_d, delta_big_d }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.x1, self.x2, self.x3, self.x4]
    }

}

fn check_range_theta(range: f64, theta: f64) -> Result<()> {
    if !(range > 0.0 && range.is_finite()) {
        return Err(Error::DegenerateGeometry(format!("range must be positive, got {range}")));
    }
    if !(theta.abs() < std::f64::consts::FRAC_PI_2) {
        return Err(Error::DegenerateGeometry(format!("|theta| must be below pi/2, got {theta}")));
    }
    Ok(())
}

fn direct_sums(points: &[f64], range: f64, theta: f64, model: SumModel) -> Result<SumFormulas> {
    check_range_theta(range, theta)?;
    let (s, c) = theta.sin_cos();
    let mut out = SumFormulas {
        s_theta2: 0.0,
        s_theta: 0.0,
        s_r2: 0.0,
        s_r: 0.0,
        s_thetar: 0.0,
        method: SumMethod::Direct,
        model,
    };
    let term = |n: f64| -> Result<[f64; 4]> {
        let x = n / range;
        let nu1 = 1.0 - 2.0 * x * s + x * x;
        if !(nu1 > 0.0) {
            return Err(Error::ElementCoincidence { position: n });
        }
        let root = nu1.sqrt();
        Ok([x * x / nu1, x / root, (x * s - 1.0) / root, x * (x * s - 1.0) / nu1])
    };
    // mirrored pairs first, so odd sums cancel exactly at broadside
    let len = points.len();
    let mut acc = [0.0; 4];
    for i in 0..len.div_ceil(2) {
        let j = len - 1 - i;
        let a = term(points[i])?;
        let pair = if j == i { a } else {
            let b = term(points[j])?;
            [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
        };
        acc.iter_mut().zip(pair).for_each(|(t, v)| *t += v);
    }
    out.s_theta2 = acc[0];
    out.s_theta = acc[1];
    out.s_r = acc[2];
    out.s_thetar = acc[3];
    // (xs - 1)² + c²x² = ν₁
    out.s_r2 = len as f64 - c * c * out.s_theta2;
    Ok(out)
}

/// Direct SW sums over the element positions of any layout.
pub fn sw_sums_direct(layout: &ArrayLayout, range: f64, theta: f64) -> Result<SumFormulas> {
    direct_sums(&layout.positions(), range, theta, SumModel::Spherical)
}

/// Direct HSPW sums over the subarray centers.
pub fn hspw_sums_direct(layout: &ArrayLayout, range: f64, theta: f64) -> Result<SumFormulas> {
    layout.require_wsms()?;
    direct_sums(&layout.subarray_centers(), range, theta, SumModel::Hybrid)
}

fn check_strip(x: f64, theta: f64) -> Result<()> {
    if !x.is_finite() || !(theta.abs() < std::f64::consts::FRAC_PI_2) {
        return Err(Error::DomainError(format!("x = {x}, theta = {theta}")));
    }
    Ok(())
}

struct Terms {
    s: f64,
    c: f64,
    nu1: f64,
    nu2: f64,
    /// `asinh((x - s)/c)`, equal to `artanh((x - s)/√ν₁)` and to
    /// `ln(√ν₁ + x - s) - ln c`.
    ash: f64,
}

impl Terms {
    fn new(x: f64, theta: f64) -> Result<Self> {
        check_strip(x, theta)?;
        let (s, c) = theta.sin_cos();
        let nu2 = (x - s) / c;
        Ok(Self { s, c, nu1: 1.0 - 2.0 * x * s + x * x, nu2, ash: nu2.asinh() })
    }
}

/// Second antiderivative of `x²/ν₁`.
pub fn g_theta2(x: f64, theta: f64) -> Result<f64> {
    let t = Terms::new(x, theta)?;
    let (s, c) = (t.s, t.c);
    let cos2 = c * c - s * s;
    let ln1 = t.nu1.ln();
    let at = t.nu2.atan();
    Ok(0.5 * x * x + s * x * ln1 - 2.0 * s * x - s * s * ln1 + 2.0 * c * s * at - cos2 * t.nu2 * at
        + 0.5 * cos2 * t.nu2.mul_add(t.nu2, 1.0).ln())
}

/// Second antiderivative of `x/√ν₁`.
pub fn g_theta(x: f64, theta: f64) -> Result<f64> {
    let t = Terms::new(x, theta)?;
    let (s, c) = (t.s, t.c);
    let root = t.nu1.sqrt();
    Ok(0.5 * (x - s) * root + 0.5 * c * c * (t.ash + c.ln()) + s * (x - s) * t.ash - s * root)
}

/// Second antiderivative of `1/√ν₁`, up to a linear term.
pub fn g_r(x: f64, theta: f64) -> Result<f64> {
    let t = Terms::new(x, theta)?;
    Ok((x - t.s) * t.ash - t.nu1.sqrt())
}

/// Second antiderivative of `x/ν₁`.
pub fn g_thetar(x: f64, theta: f64) -> Result<f64> {
    let t = Terms::new(x, theta)?;
    let (s, c) = (t.s, t.c);
    let ln1 = t.nu1.ln();
    let at = t.nu2.atan();
    Ok(s * (t.nu2 * at - 0.5 * t.nu2.mul_add(t.nu2, 1.0).ln()) + 0.5 * x * ln1 - x - 0.5 * s * ln1 + c * at)
}

fn check_cap(theta: f64) -> Result<()> {
    if theta.abs() > THETA_CAP {
        return Err(Error::SingularityNearPi2 { theta, limit: THETA_CAP });
    }
    Ok(())
}

/// The G functions minus affine terms, which cancel in the four-point
/// combination. Every term is built from quantities that vanish at `x = 0`
/// (`√ν₁ - 1`, `ln ν₁`, `ψ = arctan ν₂ + θ`, `asinh ν₂ - asinh(-tan θ)`), so
/// the combination keeps its digits when `x` is small.
struct Reduced {
    s: f64,
    c: f64,
    nu2: f64,
    sqrt_m1: f64,
    ln1: f64,
    psi: f64,
    ash: f64,
}

impl Reduced {
    fn new(x: f64, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let e = x * (x - 2.0 * s);
        let sqrt_m1 = e / ((1.0 + e).sqrt() + 1.0);
        Self {
            s,
            c,
            nu2: (x - s) / c,
            sqrt_m1,
            ln1: e.ln_1p(),
            psi: (x * c).atan2(1.0 - x * s),
            ash: ((x + s * sqrt_m1) / (c * c)).asinh(),
        }
    }

    fn g_theta2(&self, x: f64) -> f64 {
        let (s, c) = (self.s, self.c);
        let cos2 = c * c - s * s;
        0.5 * x * x + s * x * self.ln1 - s * s * self.ln1 + 2.0 * c * s * self.psi - cos2 * self.nu2 * self.psi
            + 0.5 * cos2 * self.ln1
    }

    fn g_theta(&self, x: f64) -> f64 {
        let (s, c) = (self.s, self.c);
        0.5 * (x - s) * self.sqrt_m1 + 0.5 * c * c * self.ash + s * (x - s) * self.ash - s * self.sqrt_m1
    }

    fn g_r(&self, x: f64) -> f64 {
        (x - self.s) * self.ash - self.sqrt_m1
    }

    fn g_thetar(&self, x: f64) -> f64 {
        let s = self.s;
        s * (self.nu2 * self.psi - 0.5 * self.ln1) + 0.5 * x * self.ln1 - 0.5 * s * self.ln1 + self.c * self.psi
    }
}

fn riemann_from_bounds(b: &RiemannBounds, theta: f64, count: f64) -> Result<SumFormulas> {
    check_cap(theta)?;
    for x in b.as_array() {
        check_strip(x, theta)?;
    }
    let s = theta.sin();
    let c = theta.cos();
    let terms = b.as_array().map(|x| (x, Reduced::new(x, theta)));
    let eval = |g: fn(&Reduced, f64) -> f64| {
        let v = terms.each_ref().map(|(x, t)| g(t, *x));
        ((v[3] + v[0]) - (v[2] + v[1])) / (b.delta_d * b.delta_big_d)
    };
    let s_theta2 = eval(Reduced::g_theta2);
    let s_theta = eval(Reduced::g_theta);
    Ok(SumFormulas {
        s_theta2,
        s_theta,
        s_r2: count - c * c * s_theta2,
        s_r: s * s_theta - eval(Reduced::g_r),
        s_thetar: s * s_theta2 - eval(Reduced::g_thetar),
        method: SumMethod::Riemann,
        model: SumModel::Spherical,
    })
}

/// SW sums from the midpoint-Riemann closed forms.
pub fn sw_sums_riemann(layout: &ArrayLayout, range: f64, theta: f64) -> Result<SumFormulas> {
    layout.require_wsms()?;
    check_range_theta(range, theta)?;
    riemann_from_bounds(&RiemannBounds::new(layout, range), theta, layout.element_count() as f64)
}

/// Inverse of [`crate::geometry::psi_from_x`]: `x = sin ψ / cos(ψ - θ)`.
pub fn x_from_psi(psi: f64, theta: f64) -> Result<f64> {
    let den = (psi - theta).cos();
    if den == 0.0 {
        return Err(Error::DomainError(format!("psi - theta = pi/2 at psi = {psi}")));
    }
    Ok(psi.sin() / den)
}

/// SW Riemann sums expressed through the four angular spans `ψ(x1..x4)`.
pub fn sw_sums_riemann_from_psi(
    psi: [f64; 4],
    theta: f64,
    delta_d: f64,
    delta_big_d: f64,
    count: usize,
) -> Result<SumFormulas> {
    let x = |i: usize| x_from_psi(psi[i], theta);
    let b = RiemannBounds { x1: x(0)?, x2: x(1)?, x3: x(2)?, x4: x(3)?, delta_d, delta_big_d };
    riemann_from_bounds(&b, theta, count as f64)
}

/// HSPW sums from the single-integral closed forms over the subarray
/// centers. A single center sits at the origin, where the sums are exact.
pub fn hspw_sums_closed(layout: &ArrayLayout, range: f64, theta: f64) -> Result<SumFormulas> {
    layout.require_wsms()?;
    check_range_theta(range, theta)?;
    if layout.subarrays() == 1 {
        return Ok(SumFormulas {
            s_theta2: 0.0,
            s_theta: 0.0,
            s_r2: 1.0,
            s_r: -1.0,
            s_thetar: 0.0,
            method: SumMethod::Riemann,
            model: SumModel::Hybrid,
        });
    }
    let k = layout.subarrays() as f64;
    let dd = layout.subarray_pitch() / range;
    let a = 0.5 * k * dd;
    let (s, c) = theta.sin_cos();
    let cos2 = c * c - s * s;
    let kappa1 = 1.0 - 2.0 * a * s + a * a;
    let kappa2 = 1.0 + 2.0 * a * s + a * a;
    let ln_ratio = (kappa1 / kappa2).ln();
    let nu2 = |x: f64| (x - s) / c;
    let d_atan = nu2(a).atan() - nu2(-a).atan();
    let d_ash = nu2(a).asinh() - nu2(-a).asinh();

    let s_theta2 = k + s / dd * ln_ratio - cos2 / (dd * c) * d_atan;
    let s_theta = (kappa1.sqrt() - kappa2.sqrt() + s * d_ash) / dd;
    Ok(SumFormulas {
        s_theta2,
        s_theta,
        s_r2: k - c * c * s_theta2,
        s_r: s * s_theta - d_ash / dd,
        s_thetar: s * s_theta2 - (0.5 * ln_ratio + theta.tan() * d_atan) / dd,
        method: SumMethod::Riemann,
        model: SumModel::Hybrid,
    })
}

/// Broadside sums from the angular spans.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BroadsideSpans {
    /// Full and per-subarray spans of a SW layout, with that layout's
    /// `Δ_d Δ_D` normalization and element count.
    Spherical { psi0: f64, delta_psi: f64, delta_d: f64, delta_big_d: f64, elements: usize },
    /// Span of the subarray centers, `tan(ψ₀/2) = K Δ_D / 2`.
    Hybrid { psi0: f64, subarrays: usize },
}

/// Broadside (`θ = 0`) sums. The SW form uses the even G functions,
/// `S = 2/(Δ_d Δ_D) (G(x4) - G(x3))` with `x = tan((ψ₀ ± Δψ)/2)`.
pub fn theta0_sums(spans: BroadsideSpans) -> Result<SumFormulas> {
    match spans {
        BroadsideSpans::Spherical { psi0, delta_psi, delta_d, delta_big_d, elements } => {
            if !(psi0 > 0.0 && psi0 < std::f64::consts::PI) || !(delta_psi > 0.0 && delta_psi <= psi0) {
                return Err(Error::DomainError(format!("spans psi0 = {psi0}, delta_psi = {delta_psi}")));
            }
            let x4 = (0.5 * (psi0 + delta_psi)).tan();
            let x3 = (0.5 * (psi0 - delta_psi)).tan();
            let pre = 2.0 / (delta_d * delta_big_d);
            let g2 = |x: f64| 0.5 * x * x - x * x.atan() + 0.5 * (x * x).ln_1p();
            let gr = |x: f64| x * x.asinh() - x * x / ((1.0 + x * x).sqrt() + 1.0);
            let s_theta2 = pre * (g2(x4) - g2(x3));
            Ok(SumFormulas {
                s_theta2,
                s_theta: 0.0,
                s_r2: elements as f64 - s_theta2,
                s_r: -pre * (gr(x4) - gr(x3)),
                s_thetar: 0.0,
                method: SumMethod::Riemann,
                model: SumModel::Spherical,
            })
        }
        BroadsideSpans::Hybrid { psi0, subarrays } => {
            if !(psi0 > 0.0 && psi0 < std::f64::consts::PI) {
                return Err(Error::DomainError(format!("psi0 = {psi0} outside (0, pi)")));
            }
            let k = subarrays as f64;
            let half = 0.5 * psi0;
            let t = half.tan();
            let sn = half.sin();
            let s_r2 = k * psi0 / (2.0 * t);
            Ok(SumFormulas {
                s_theta2: k - s_r2,
                s_theta: 0.0,
                s_r2,
                // ln((1 + sin)/(1 - sin)) = 2 artanh(sin)
                s_r: -k / t * sn.atanh(),
                s_thetar: 0.0,
                method: SumMethod::Riemann,
                model: SumModel::Hybrid,
            })
        }
    }
}

/// Broadside `G_θ²` in the span coordinate, `x = tan ψ`:
/// `tan²ψ/2 - ψ tan ψ - ln cos ψ`.
pub fn g_theta2_broadside(psi: f64) -> f64 {
    let t = psi.tan();
    0.5 * t * t - psi * t - psi.cos().ln()
}

/// `d/dψ` of [`g_theta2_broadside`]: `sec²ψ (tan ψ - ψ)`, positive on
/// `(0, π/2)`.
pub fn g_theta2_broadside_slope(psi: f64) -> f64 {
    let c = psi.cos();
    (psi.tan() - psi) / (c * c)
}
