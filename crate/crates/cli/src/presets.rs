//! Scenario grids behind the `figure` subcommand.

use std::f64::consts::FRAC_PI_4;
use std::str::FromStr;

use num_complex::Complex64;
use wsms_crb::analytic::hspw_crb_asymptotes;
use wsms_crb::{LayoutKind, Wavefront};

use crate::config::{ConfigError, Method, ScenarioConfig};
use crate::run::{geometry, layout, link, run_point, Record};
use crate::sweep::{run_sweep, Axis, SweepSpec};

/// TX-RX baseline for setups with a single RX element, where it is not
/// stated; one RX element carries no angle or range information anyway.
pub const SINGLE_RX_BASELINE: f64 = 100.0;

/// `{I, K}` cases shared by the model-mismatch figures.
pub const MISMATCH_CASES: [(u32, usize); 4] = [(3, 3), (12, 3), (3, 12), (12, 12)];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
}

impl Figure {
    pub const ALL: [Figure; 7] =
        [Figure::Fig3, Figure::Fig4, Figure::Fig5, Figure::Fig6, Figure::Fig7, Figure::Fig8, Figure::Fig9];
}

impl FromStr for Figure {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        let pos = ["fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9"].iter().position(|f| *f == s);
        pos.map(|i| Figure::ALL[i])
            .ok_or_else(|| ConfigError::Value { key: "figure".into(), reason: format!("{s:?}: expected fig3 to fig9") })
    }
}

/// Common setting: 100 GHz, 0 dB transmit SNR, unit gain, M = 128.
pub fn base() -> ScenarioConfig {
    ScenarioConfig {
        frequency_hz: 1e11,
        snr_db: 0.0,
        alpha: Complex64::new(1.0, 0.0),
        k: 3,
        m: 128,
        i: 3,
        n_r: 1,
        big_r: SINGLE_RX_BASELINE,
        vartheta: 0.0,
        model: Wavefront::Spherical,
        layout: LayoutKind::Wsms,
        method: Method::Direct,
        r: 10.0,
        theta: 0.0,
    }
}

fn sweep(axis: Axis, start: f64, stop: f64, steps: usize) -> SweepSpec {
    SweepSpec::new(axis, start, stop, steps).expect("preset grids are valid")
}

pub fn figure_records(fig: Figure) -> Vec<Record> {
    let mut out = Vec::new();
    match fig {
        Figure::Fig3 => {
            let ranges = sweep(Axis::Range, 2.0, 50.0, 25);
            for k in [3, 6, 9, 12] {
                for method in [Method::Direct, Method::Riemann] {
                    let c = ScenarioConfig { k, method, theta: FRAC_PI_4, ..base() };
                    out.extend(run_sweep(&c, &ranges));
                }
            }
        }
        Figure::Fig4 | Figure::Fig5 => {
            let (spec, c0) = if fig == Figure::Fig4 {
                (sweep(Axis::Range, 2.0, 50.0, 25), ScenarioConfig { theta: FRAC_PI_4, ..base() })
            } else {
                (sweep(Axis::Theta, -1.5, 1.5, 61), ScenarioConfig { r: 10.0, ..base() })
            };
            for (i, k) in MISMATCH_CASES {
                for model in [Wavefront::Spherical, Wavefront::Hybrid, Wavefront::Planar] {
                    out.extend(run_sweep(&ScenarioConfig { i, k, model, ..c0 }, &spec));
                }
            }
        }
        Figure::Fig6 => {
            let ranges = sweep(Axis::Range, 1.0, 30.0, 59);
            for n_r in [1, 18, 35] {
                let c = ScenarioConfig { n_r, k: 12, i: 10, big_r: 31.0, ..base() };
                out.extend(run_sweep(&c, &ranges));
            }
        }
        Figure::Fig7 => {
            let c = ScenarioConfig { model: Wavefront::Hybrid, n_r: 12, k: 2, big_r: 50.0, i: 0, ..base() };
            out.extend(run_sweep(&c, &sweep(Axis::Exponent, 0.0, 20.0, 21)));
            out.extend(bound_rows(&c));
        }
        Figure::Fig8 | Figure::Fig9 => {
            for i in 1..=13 {
                for layout in [LayoutKind::Wsms, LayoutKind::Ua, LayoutKind::Dua] {
                    out.push(run_point(&ScenarioConfig { i, layout, ..base() }));
                }
            }
        }
    }
    out
}

/// The wide- and narrow-span limits of the broadside hybrid angle bound.
/// They do not depend on `I`, so that column stays empty.
fn bound_rows(c: &ScenarioConfig) -> Vec<Record> {
    let result = layout(c)
        .and_then(|l| geometry(c).and_then(|g| hspw_crb_asymptotes(&l, &g, c.n_r, &link(c))));
    let mut wide = Record { method: "bound_wide", i: None, ..Record::blank(c) };
    let mut narrow = Record { method: "bound_narrow", i: None, ..Record::blank(c) };
    match result {
        Ok(a) => {
            for (rec, res) in [(&mut wide, a.wide), (&mut narrow, a.narrow)] {
                rec.crb_theta = Some(res.crb_theta);
                rec.crb_r = Some(res.crb_r);
            }
        }
        Err(e) => {
            wide.error_code = Some(e.code());
            narrow.error_code = Some(e.code());
        }
    }
    vec![wide, narrow]
}
