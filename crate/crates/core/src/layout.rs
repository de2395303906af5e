//! TX element layouts: widely-spaced multi-subarray (WSMS), the uniform
//! array with the same aperture and element count (UA), and the dense
//! uniform array at the intra-subarray spacing (DUA).

use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LayoutKind {
    Wsms,
    Ua,
    Dua,
}

impl LayoutKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            LayoutKind::Wsms => "wsms",
            LayoutKind::Ua => "ua",
            LayoutKind::Dua => "dua",
        }
    }
}

/// A linear TX array described by its WSMS parameters.
///
/// UA and DUA layouts keep the parameters of the WSMS they mirror; only the
/// element positions differ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayLayout {
    kind: LayoutKind,
    subarrays: usize,
    per_subarray: usize,
    spacing: f64,
    gap: f64,
    wavelength: f64,
}

impl ArrayLayout {
    /// `K` subarrays of `M` elements at spacing `d`, separated by the extra
    /// gap `D0` (so the subarray pitch is `(M-1)d + D0`).
    pub fn wsms(subarrays: usize, per_subarray: usize, spacing: f64, gap: f64, wavelength: f64) -> Result<Self> {
        if subarrays == 0 || per_subarray == 0 {
            return Err(Error::InvalidLayout(format!(
                "subarray and element counts must be positive (K = {subarrays}, M = {per_subarray})"
            )));
        }
        for (name, v) in [("spacing d", spacing), ("gap D0", gap), ("wavelength", wavelength)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidLayout(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { kind: LayoutKind::Wsms, subarrays, per_subarray, spacing, gap, wavelength })
    }

    /// Half-wavelength elements with gap `D0 = 2^I λ/2`.
    pub fn with_exponent(subarrays: usize, per_subarray: usize, exponent: u32, frequency_hz: f64) -> Result<Self> {
        if !(frequency_hz > 0.0 && frequency_hz.is_finite()) {
            return Err(Error::InvalidLayout(format!("frequency must be positive, got {frequency_hz}")));
        }
        let wavelength = SPEED_OF_LIGHT / frequency_hz;
        let half = 0.5 * wavelength;
        Self::wsms(subarrays, per_subarray, half, 2f64.powi(exponent as i32) * half, wavelength)
    }

    pub fn with_kind(mut self, kind: LayoutKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn kind(&self) -> LayoutKind {
        self.kind
    }

    /// `K`.
    pub fn subarrays(&self) -> usize {
        self.subarrays
    }

    /// `M`.
    pub fn per_subarray(&self) -> usize {
        self.per_subarray
    }

    /// Intra-subarray spacing `d`.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Extra inter-subarray gap `D0`.
    pub fn gap(&self) -> f64 {
        self.gap
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// Subarray pitch `D = (M-1)d + D0`.
    pub fn subarray_pitch(&self) -> f64 {
        (self.per_subarray as f64 - 1.0) * self.spacing + self.gap
    }

    /// `N_t = K M` for every kind.
    pub fn element_count(&self) -> usize {
        self.subarrays * self.per_subarray
    }

    /// End-to-end WSMS aperture `(K-1)D + (M-1)d`.
    pub fn wsms_aperture(&self) -> f64 {
        (self.subarrays as f64 - 1.0) * self.subarray_pitch() + (self.per_subarray as f64 - 1.0) * self.spacing
    }

    /// Uniform spacing of the UA (`d'`) or DUA (`d`); `None` for a WSMS.
    pub fn uniform_spacing(&self) -> Option<f64> {
        match self.kind {
            LayoutKind::Wsms => None,
            LayoutKind::Dua => Some(self.spacing),
            LayoutKind::Ua => {
                let n = self.element_count();
                if n == 1 {
                    Some(self.spacing)
                } else {
                    Some(self.wsms_aperture() / (n as f64 - 1.0))
                }
            }
        }
    }

    /// End-to-end aperture of this layout.
    pub fn aperture(&self) -> f64 {
        match self.uniform_spacing() {
            None => self.wsms_aperture(),
            Some(s) => (self.element_count() as f64 - 1.0) * s,
        }
    }

    pub fn require_wsms(&self) -> Result<()> {
        if self.kind != LayoutKind::Wsms {
            return Err(Error::InvalidLayout(format!(
                "operation requires a WSMS layout, got {}",
                self.kind.as_str()
            )));
        }
        Ok(())
    }

    /// Signed axial element coordinates, k-major then m-minor for a WSMS.
    pub fn positions(&self) -> Vec<f64> {
        match self.uniform_spacing() {
            Some(s) => centered(self.element_count(), s),
            None => {
                let centers = self.subarray_centers();
                let offsets = centered(self.per_subarray, self.spacing);
                centers
                    .iter()
                    .flat_map(|&c| offsets.iter().map(move |&o| c + o))
                    .collect()
            }
        }
    }

    /// Subarray centers `n_k = ((2k - K + 1)/2) D`.
    pub fn subarray_centers(&self) -> Vec<f64> {
        centered(self.subarrays, self.subarray_pitch())
    }

    /// Intra-subarray offsets `((2m - M + 1)/2) d`.
    pub fn subarray_offsets(&self) -> Vec<f64> {
        centered(self.per_subarray, self.spacing)
    }
}

/// `((2i - n + 1)/2) * step` for `i in 0..n`; exactly antisymmetric.
fn centered(n: usize, step: f64) -> Vec<f64> {
    (0..n)
        .map(|i| (2.0 * i as f64 - n as f64 + 1.0) * 0.5 * step)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_layouts() {
        let l = ArrayLayout::wsms(1, 2, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(l.positions(), vec![-0.5, 0.5]);
        // K = 2, M = 1: D = D0 = 4
        let l = ArrayLayout::wsms(2, 1, 1.0, 4.0, 1.0).unwrap();
        assert_eq!(l.subarray_pitch(), 4.0);
        assert_eq!(l.positions(), vec![-2.0, 2.0]);
    }

    #[test]
    fn aperture_formula_matches_positions() {
        let l = ArrayLayout::with_exponent(3, 128, 3, 1e11).unwrap();
        let p = l.positions();
        assert_eq!(p.len(), 384);
        let span = p.last().unwrap() - p.first().unwrap();
        let d = l.spacing();
        let big_d = 127.0 * d + 8.0 * d;
        assert!((span - (2.0 * big_d + 127.0 * d)).abs() < 1e-12);
        assert!((span - l.wsms_aperture()).abs() < 1e-12);
    }

    #[test]
    fn strictly_increasing_and_symmetric() {
        for kind in [LayoutKind::Wsms, LayoutKind::Ua, LayoutKind::Dua] {
            let l = ArrayLayout::with_exponent(4, 7, 2, 1e11).unwrap().with_kind(kind);
            let p = l.positions();
            assert_eq!(p.len(), 28);
            assert!(p.windows(2).all(|w| w[0] < w[1]), "{kind:?}");
            let mirrored: Vec<f64> = p.iter().rev().map(|v| -v).collect();
            assert_eq!(p, mirrored, "{kind:?}");
        }
    }

    #[test]
    fn ua_matches_wsms_aperture() {
        let l = ArrayLayout::with_exponent(3, 16, 5, 1e11).unwrap();
        let ua = l.with_kind(LayoutKind::Ua);
        assert!((ua.aperture() - l.wsms_aperture()).abs() < 1e-12);
        let expected = (l.subarray_pitch() * 2.0 + l.spacing() * 15.0) / 47.0;
        assert!((ua.uniform_spacing().unwrap() - expected).abs() < 1e-15);
        assert_eq!(l.with_kind(LayoutKind::Dua).uniform_spacing(), Some(l.spacing()));
    }

    #[test]
    fn zero_exponent_degenerates_to_dua() {
        let l = ArrayLayout::with_exponent(3, 8, 0, 1e11).unwrap();
        let dua = l.with_kind(LayoutKind::Dua).positions();
        let ua = l.with_kind(LayoutKind::Ua).positions();
        for ((a, b), c) in l.positions().iter().zip(&dua).zip(&ua) {
            assert!((a - b).abs() < 1e-15 && (a - c).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_invalid() {
        assert!(matches!(ArrayLayout::wsms(0, 4, 1.0, 1.0, 1.0), Err(Error::InvalidLayout(_))));
        assert!(matches!(ArrayLayout::wsms(2, 4, -1.0, 1.0, 1.0), Err(Error::InvalidLayout(_))));
        assert!(matches!(ArrayLayout::wsms(2, 4, 1.0, 0.0, 1.0), Err(Error::InvalidLayout(_))));
        assert!(ArrayLayout::wsms(2, 4, 1.0, 1.0, 1.0).unwrap().with_kind(LayoutKind::Ua).require_wsms().is_err());
    }
}
