//! Composite channel, array manifold functions (AMFs), the normalized 2x2
//! Fisher matrix obtained by eliminating the complex gain, and the CRBs.
//!
//! The training matrix is assumed orthogonal (`F* Fᵀ = I`), so the composite
//! channel reduces to `conj(g_t) ⊗ g_r` for every inner product used here and
//! the frame count never enters numerically. [`full_fisher_oracle`] builds the
//! 4x4 Fisher matrix from scratch, optionally with an explicit training
//! matrix, as an independent check of that reduction.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4};
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::SceneGeometry;
use crate::layout::ArrayLayout;
use crate::steering::{kron, rx_bundle, tx_bundle, SteeringBundle, Wavefront};

/// Default singularity threshold on `det(Q̄) / (q11 q22)`.
pub const DEFAULT_DET_EPSILON: f64 = 1e-18;

/// Path gain and noise power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub alpha: Complex64,
    pub noise_power: f64,
}

impl Default for Link {
    fn default() -> Self {
        Self { alpha: Complex64::new(1.0, 0.0), noise_power: 1.0 }
    }
}

impl Link {
    /// Unit gain with noise power `10^(-snr_db/10)`.
    pub fn from_snr_db(snr_db: f64) -> Self {
        Self { noise_power: 10f64.powf(-snr_db / 10.0), ..Self::default() }
    }

    /// `|β|² = |α|² N_r N_t`.
    pub fn beta_sq(&self, rx_elements: usize, tx_elements: usize) -> f64 {
        self.alpha.norm_sqr() * rx_elements as f64 * tx_elements as f64
    }
}

/// Norms and inner products of the composite channel and its derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmfSet {
    pub htheta_sq: f64,
    pub hr_sq: f64,
    pub htheta_h: Complex64,
    pub hr_h: Complex64,
    pub htheta_hr: Complex64,
    pub h_sq: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedFisher {
    pub q11: f64,
    pub q12: f64,
    pub q22: f64,
}

impl NormalizedFisher {
    pub fn det(&self) -> f64 {
        self.q11 * self.q22 - self.q12 * self.q12
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { q11: c * self.q11, q12: c * self.q12, q22: c * self.q22 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrbResult {
    /// rad².
    pub crb_theta: f64,
    /// m².
    pub crb_r: f64,
    pub qbar: NormalizedFisher,
    pub beta_sq: f64,
    pub sigma_n_sq: f64,
}

impl CrbResult {
    pub fn root_theta(&self) -> f64 {
        self.crb_theta.sqrt()
    }

    pub fn root_r(&self) -> f64 {
        self.crb_r.sqrt()
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm_sq(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

/// `conj(tx) ⊗ rx` with both derivatives by the product rule.
pub fn composite_bundle(tx: &SteeringBundle, rx: &SteeringBundle) -> SteeringBundle {
    let t = tx.conj();
    let add = |mut a: Vec<Complex64>, b: Vec<Complex64>| {
        a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        a
    };
    SteeringBundle {
        value: kron(&t.value, &rx.value),
        d_theta: add(kron(&t.d_theta, &rx.value), kron(&t.value, &rx.d_theta)),
        d_r: add(kron(&t.d_r, &rx.value), kron(&t.value, &rx.d_r)),
        model: tx.model,
    }
}

pub fn amfs(h: &SteeringBundle) -> AmfSet {
    AmfSet {
        htheta_sq: norm_sq(&h.d_theta),
        hr_sq: norm_sq(&h.d_r),
        htheta_h: dot(&h.d_theta, &h.value),
        hr_h: dot(&h.d_r, &h.value),
        htheta_hr: dot(&h.d_theta, &h.d_r),
        h_sq: norm_sq(&h.value),
    }
}

/// Schur complement of the gain block, with `|β|²` factored out.
pub fn normalized_fisher(a: &AmfSet) -> NormalizedFisher {
    let q11 = a.htheta_sq - a.htheta_h.norm_sqr() / a.h_sq;
    let q22 = a.hr_sq - a.hr_h.norm_sqr() / a.h_sq;
    // Re{ h^H h_θ h_r^H h } = Re{ conj(h_θ^H h) (h_r^H h) }
    let q12 = a.htheta_hr.re - (a.htheta_h.conj() * a.hr_h).re / a.h_sq;
    NormalizedFisher { q11, q12, q22 }
}

/// Squared-norm ratio below which a projected derivative counts as zero.
pub const PROJECTION_FLOOR: f64 = 1e-24;

/// Same `Q̄` as [`normalized_fisher`], computed from the derivatives projected
/// onto the orthogonal complement of `h`. Avoids the cancellation of the
/// AMF form when the residual is many orders below `‖h_r‖²`.
pub fn normalized_fisher_projected(h: &SteeringBundle) -> NormalizedFisher {
    let h_sq = norm_sq(&h.value);
    let project = |d: &[Complex64]| -> Vec<Complex64> {
        let coef = dot(&h.value, d) / h_sq;
        d.iter().zip(&h.value).map(|(x, v)| x - v * coef).collect()
    };
    // a residual this far below the raw derivative is projection round-off,
    // so the parameter carries no information
    let residual = |d: &[Complex64]| {
        let p = project(d);
        if norm_sq(&p) <= PROJECTION_FLOOR * norm_sq(d) {
            vec![Complex64::new(0.0, 0.0); p.len()]
        } else {
            p
        }
    };
    let pt = residual(&h.d_theta);
    let pr = residual(&h.d_r);
    NormalizedFisher { q11: norm_sq(&pt), q12: dot(&pt, &pr).re, q22: norm_sq(&pr) }
}

/// CRBs from `Q̄` with the default singularity threshold.
pub fn crb(q: &NormalizedFisher, beta_sq: f64, sigma_n_sq: f64) -> Result<CrbResult> {
    crb_with_threshold(q, beta_sq, sigma_n_sq, DEFAULT_DET_EPSILON)
}

/// CRBs from `Q̄`. Fails when `det(Q̄) <= eps * q11 * q22` or a diagonal entry
/// is not positive, which signals that the pair (θ, r) is not identifiable.
pub fn crb_with_threshold(q: &NormalizedFisher, beta_sq: f64, sigma_n_sq: f64, eps: f64) -> Result<CrbResult> {
    let det = q.det();
    let threshold = eps * q.q11 * q.q22;
    if !(q.q11 > 0.0 && q.q22 > 0.0) || !(det > threshold) {
        return Err(Error::SingularFisher { det, threshold });
    }
    let scale = sigma_n_sq / (2.0 * beta_sq);
    Ok(CrbResult {
        crb_theta: scale * q.q22 / det,
        crb_r: scale * q.q11 / det,
        qbar: *q,
        beta_sq,
        sigma_n_sq,
    })
}

/// Angle-only bound `σ² / (2 |β|² q11)`, for when range is known or
/// unidentifiable.
pub fn theta_only_crb(q: &NormalizedFisher, beta_sq: f64, sigma_n_sq: f64) -> Result<f64> {
    if !(q.q11 > 0.0) {
        return Err(Error::SingularFisher { det: q.q11, threshold: 0.0 });
    }
    Ok(sigma_n_sq / (2.0 * beta_sq * q.q11))
}

/// Normalized Fisher matrix of the composite channel for one scene.
pub fn direct_fisher(
    model: Wavefront,
    layout: &ArrayLayout,
    geom: &SceneGeometry,
    rx_elements: usize,
) -> Result<NormalizedFisher> {
    let tx = tx_bundle(model, layout, geom.range, geom.theta)?;
    let rx = rx_bundle(rx_elements, layout.spacing(), layout.wavelength(), geom)?;
    Ok(normalized_fisher_projected(&composite_bundle(&tx, &rx)))
}

/// CRBs through the Schur-complement route with exact manifold derivatives.
pub fn schur_crb(
    model: Wavefront,
    layout: &ArrayLayout,
    geom: &SceneGeometry,
    rx_elements: usize,
    link: &Link,
) -> Result<CrbResult> {
    let q = direct_fisher(model, layout, geom, rx_elements)?;
    crb(&q, link.beta_sq(rx_elements, layout.element_count()), link.noise_power)
}

/// Training matrix used by the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Training {
    /// `F* Fᵀ = I` applied implicitly.
    Ideal,
    /// Explicit identity matrix.
    Identity,
    /// Explicit unitary DFT matrix.
    Dft,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleScenario<'a> {
    pub model: Wavefront,
    pub layout: &'a ArrayLayout,
    pub geom: SceneGeometry,
    pub rx_elements: usize,
    pub link: Link,
    /// Relative finite-difference step in θ and r.
    pub fd_step: f64,
    pub training: Training,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub crb: CrbResult,
    /// Unscaled entries `h_{l1 l2} = Re{∂h^H ∂h}` over `[θ, r, β_R, β_I]`.
    pub gram: Matrix4<f64>,
    /// Full Fisher matrix `(2/σ²) gram`.
    pub fisher: Matrix4<f64>,
}

pub const ORACLE_MAX_ELEMENTS: usize = 1024;

/// Channel value only, built independently of the derivative code paths.
fn oracle_channel(s: &OracleScenario, r: f64, theta: f64) -> Result<DVector<Complex64>> {
    let layout = s.layout;
    let lambda = layout.wavelength();
    let k = 2.0 * PI / lambda;
    let (sin_t, _) = theta.sin_cos();
    let phase_of = |n: f64| -> f64 {
        match s.model {
            Wavefront::Spherical => -k * (r * r - 2.0 * n * r * sin_t + n * n).sqrt(),
            Wavefront::Planar => k * n * sin_t,
            Wavefront::Hybrid => unreachable!(),
        }
    };
    let tx: Vec<Complex64> = match s.model {
        Wavefront::Hybrid => {
            let centers = layout.subarray_centers();
            let offsets = layout.subarray_offsets();
            let mut v = Vec::with_capacity(centers.len() * offsets.len());
            for &c in &centers {
                let outer = -k * (r * r - 2.0 * c * r * sin_t + c * c).sqrt();
                for &o in &offsets {
                    v.push(outer + k * o * sin_t);
                }
            }
            v.into_iter().map(|p| Complex64::from_polar(1.0, p)).collect()
        }
        _ => layout.positions().into_iter().map(|n| Complex64::from_polar(1.0, phase_of(n))).collect(),
    };
    let nt = tx.len();
    let tx_scale = 1.0 / (nt as f64).sqrt();
    let tx_conj = DVector::from_iterator(nt, tx.iter().map(|z| z.conj() * tx_scale));

    let trained = match s.training {
        Training::Ideal => tx_conj,
        Training::Identity => DMatrix::<Complex64>::identity(nt, nt).transpose() * tx_conj,
        Training::Dft => dft_matrix(nt).transpose() * tx_conj,
    };

    let geom = SceneGeometry { range: r, theta, ..s.geom };
    let sin_phi = geom.aoa()?.sin();
    let nr = s.rx_elements;
    let rx_scale = 1.0 / (nr as f64).sqrt();
    let rx: Vec<Complex64> = (0..nr)
        .map(|i| {
            let p = PI / lambda * (2.0 * i as f64 - nr as f64 + 1.0) * layout.spacing() * sin_phi;
            Complex64::from_polar(rx_scale, p)
        })
        .collect();
    let out: Vec<Complex64> = trained.iter().flat_map(|&t| rx.iter().map(move |&q| t * q)).collect();
    Ok(DVector::from_vec(out))
}

/// Unitary DFT matrix, `F* Fᵀ = I`.
fn dft_matrix(n: usize) -> DMatrix<Complex64> {
    let s = 1.0 / (n as f64).sqrt();
    DMatrix::from_fn(n, n, |i, j| Complex64::from_polar(s, -2.0 * PI * (i * j % n) as f64 / n as f64))
}

/// Fourth-order central difference.
fn central_diff<F>(f: F, x: f64, h: f64) -> Result<DVector<Complex64>>
where
    F: Fn(f64) -> Result<DVector<Complex64>>,
{
    let p1 = f(x + h)?;
    let m1 = f(x - h)?;
    let p2 = f(x + 2.0 * h)?;
    let m2 = f(x - 2.0 * h)?;
    Ok((m2 - p2 + (p1 - m1) * Complex64::new(8.0, 0.0)) / Complex64::new(12.0 * h, 0.0))
}

/// Independent CRB: 4x4 Fisher over `[θ, r, β_R, β_I]` from finite
/// differences of the explicitly built channel, inverted directly.
///
/// The gain is parameterized by the real and imaginary parts of
/// `β = α √(N_r N_t)`; rescaling a nuisance parameter leaves the (θ, r)
/// block of the inverse unchanged.
pub fn full_fisher_oracle(s: &OracleScenario) -> Result<OracleReport> {
    let nt = s.layout.element_count();
    if nt > ORACLE_MAX_ELEMENTS {
        return Err(Error::Precondition(format!(
            "oracle is desk scale only: N_t = {nt} > {ORACLE_MAX_ELEMENTS}"
        )));
    }
    if !(1e-8..=1e-4).contains(&s.fd_step) {
        return Err(Error::Precondition(format!("fd_step {} outside [1e-8, 1e-4]", s.fd_step)));
    }
    if s.rx_elements == 0 {
        return Err(Error::InvalidLayout("RX needs at least one element".into()));
    }
    let (r, theta) = (s.geom.range, s.geom.theta);
    let beta = s.link.alpha * (s.rx_elements as f64 * nt as f64).sqrt();

    let h0 = oracle_channel(s, r, theta)?;
    let ht = s.fd_step * theta.abs().max(1.0);
    let hr = s.fd_step * r;
    let d_theta = central_diff(|t| oracle_channel(s, r, t), theta, ht)? * beta;
    let d_r = central_diff(|x| oracle_channel(s, x, theta), r, hr)? * beta;
    let d_beta_re = h0.clone();
    let d_beta_im = &h0 * Complex64::new(0.0, 1.0);

    let cols = [&d_theta, &d_r, &d_beta_re, &d_beta_im];
    let gram = Matrix4::from_fn(|i, j| cols[i].dotc(cols[j]).re);
    let fisher = gram * (2.0 / s.link.noise_power);

    // equilibrate before inverting; entries span many orders of magnitude
    let scale = fisher.diagonal().map(|v| 1.0 / v.sqrt());
    if scale.iter().any(|v| !v.is_finite()) {
        return Err(Error::IllConditioned { residual: f64::INFINITY });
    }
    let scaled = Matrix4::from_fn(|i, j| fisher[(i, j)] * scale[i] * scale[j]);
    let inv_scaled = scaled
        .try_inverse()
        .ok_or(Error::IllConditioned { residual: f64::INFINITY })?;
    let residual = (scaled * inv_scaled - Matrix4::identity()).abs().max();
    if !(residual <= 1e-6) {
        return Err(Error::IllConditioned { residual });
    }
    let inverse = Matrix4::from_fn(|i, j| inv_scaled[(i, j)] * scale[i] * scale[j]);

    let beta_sq = beta.norm_sqr();
    // (σ²/2) Q⁻¹ is the (θ, r) block of the inverse; Q = |β|² Q̄
    let block = Matrix2::new(inverse[(0, 0)], inverse[(0, 1)], inverse[(1, 0)], inverse[(1, 1)]);
    let q = block
        .try_inverse()
        .map(|m| m * (s.link.noise_power / (2.0 * beta_sq)))
        .ok_or(Error::IllConditioned { residual: f64::INFINITY })?;
    let qbar = NormalizedFisher { q11: q[(0, 0)], q12: 0.5 * (q[(0, 1)] + q[(1, 0)]), q22: q[(1, 1)] };
    Ok(OracleReport {
        crb: CrbResult {
            crb_theta: inverse[(0, 0)],
            crb_r: inverse[(1, 1)],
            qbar,
            beta_sq,
            sigma_n_sq: s.link.noise_power,
        },
        gram,
        fisher,
    })
}
