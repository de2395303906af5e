//! First antiderivatives used to build the closed forms, each paired with
//! its integrand. Logarithms take absolute values and `artanh` is evaluated
//! as `½ ln((1 + z)/(1 - z))`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Primitive {
    /// `∫ x²/ν₁`.
    FTheta2,
    /// `∫ ln|ν₁|`.
    LnNu1,
    /// `∫ arctan ν₂`.
    ArctanNu2,
    /// `∫ x/√ν₁`.
    XOverSqrtNu1,
    /// `∫ √ν₁`.
    SqrtNu1,
    /// `∫ artanh((x - s)/√ν₁)`.
    Artanh,
    /// `∫ ln|√ν₁ + x - s|`.
    LnSqrtTerm,
}

impl Primitive {
    pub const ALL: [Primitive; 7] = [
        Primitive::FTheta2,
        Primitive::LnNu1,
        Primitive::ArctanNu2,
        Primitive::XOverSqrtNu1,
        Primitive::SqrtNu1,
        Primitive::Artanh,
        Primitive::LnSqrtTerm,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Primitive::FTheta2 => "f_theta2",
            Primitive::LnNu1 => "ln_nu1_int",
            Primitive::ArctanNu2 => "arctan_nu2_int",
            Primitive::XOverSqrtNu1 => "x_over_sqrt_nu1",
            Primitive::SqrtNu1 => "sqrt_nu1_int",
            Primitive::Artanh => "artanh_int",
            Primitive::LnSqrtTerm => "ln_sqrt_term_int",
        }
    }

    pub fn antiderivative(&self, x: f64, theta: f64) -> Result<f64> {
        let v = Vars::new(x, theta)?;
        let (s, c) = (v.s, v.c);
        let out = match self {
            Primitive::FTheta2 => x + s * ln_abs(v.nu1)? - (c * c - s * s) / c * v.nu2.atan(),
            Primitive::LnNu1 => {
                let l = ln_abs(v.nu1)?;
                x * l - 2.0 * x - s * l + 2.0 * c * v.nu2.atan()
            }
            Primitive::ArctanNu2 => c * (v.nu2 * v.nu2.atan() - 0.5 * ln_abs(v.nu2 * v.nu2 + 1.0)?),
            Primitive::XOverSqrtNu1 => v.root + s * artanh((x - s) / v.root)?,
            Primitive::SqrtNu1 => 0.5 * (x - s) * v.root + 0.5 * c * c * ln_abs(v.root - s + x)?,
            Primitive::Artanh => (x - s) * artanh((x - s) / v.root)? - v.root,
            Primitive::LnSqrtTerm => (x - s) * ln_abs(v.root + x - s)? - v.root,
        };
        Ok(out)
    }

    pub fn integrand(&self, x: f64, theta: f64) -> Result<f64> {
        let v = Vars::new(x, theta)?;
        let s = v.s;
        let out = match self {
            Primitive::FTheta2 => x * x / v.nu1,
            Primitive::LnNu1 => ln_abs(v.nu1)?,
            Primitive::ArctanNu2 => v.nu2.atan(),
            Primitive::XOverSqrtNu1 => x / v.root,
            Primitive::SqrtNu1 => v.root,
            Primitive::Artanh => artanh((x - s) / v.root)?,
            Primitive::LnSqrtTerm => ln_abs(v.root + x - s)?,
        };
        Ok(out)
    }
}

struct Vars {
    s: f64,
    c: f64,
    nu1: f64,
    nu2: f64,
    root: f64,
}

impl Vars {
    fn new(x: f64, theta: f64) -> Result<Self> {
        if !x.is_finite() || !(theta.abs() < std::f64::consts::FRAC_PI_2) {
            return Err(Error::DomainError(format!("x = {x}, theta = {theta}")));
        }
        let (s, c) = theta.sin_cos();
        let nu1 = 1.0 - 2.0 * x * s + x * x;
        Ok(Self { s, c, nu1, nu2: (x - s) / c, root: nu1.sqrt() })
    }
}

fn ln_abs(v: f64) -> Result<f64> {
    if v == 0.0 || !v.is_finite() {
        return Err(Error::DomainError(format!("logarithm of {v}")));
    }
    Ok(v.abs().ln())
}

/// `½ ln((1 + z)/(1 - z))`, written as `½ ln1p(2z/(1 - z))`.
pub fn artanh(z: f64) -> Result<f64> {
    if !(z.abs() < 1.0) {
        return Err(Error::DomainError(format!("artanh of {z}")));
    }
    Ok(0.5 * (2.0 * z / (1.0 - z)).ln_1p())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn derivatives_match_integrands() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for p in Primitive::ALL {
            for _ in 0..100 {
                let x: f64 = rng.gen_range(-2.0..2.0);
                let theta: f64 = rng.gen_range(-1.2..1.2);
                let h = 1e-5;
                let f = |x| p.antiderivative(x, theta).unwrap();
                let fd = (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
                let exact = p.integrand(x, theta).unwrap();
                assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1.0), "{} at ({x}, {theta}): {fd} vs {exact}", p.name());
            }
        }
    }

    #[test]
    fn broadside_reductions() {
        for x in [-1.5, 0.2, 3.0] {
            let f = Primitive::FTheta2.antiderivative(x, 0.0).unwrap();
            assert!((f - (x - f64::atan(x))).abs() < 1e-14);
            let g = Primitive::LnSqrtTerm.antiderivative(x, 0.0).unwrap();
            let root = (1.0 + x * x).sqrt();
            assert!((g - (x * (root + x).ln() - root)).abs() < 1e-14);
        }
    }

    #[test]
    fn artanh_domain() {
        assert!(matches!(artanh(1.0), Err(Error::DomainError(_))));
        assert!(matches!(artanh(-1.2), Err(Error::DomainError(_))));
        assert!((artanh(0.5).unwrap() - 0.5f64.atanh()).abs() < 1e-15);
        assert!((artanh(-1e-12).unwrap() + 1e-12).abs() < 1e-26);
    }
}
