//! Contraction certificates for transfer-matrix products and the
//! exponential decay profile of `F_λ` they imply.

use super::scan::{lipschitz_k, ProductScanner};
use super::FourierConfig;
use crate::error::{Error, Result};
use crate::Real;

/// Default level cap for certificate searches.
pub const DEFAULT_L_MAX: u32 = 12;

/// Default contraction margin for certificate searches.
pub const DEFAULT_DELTA_MIN: f64 = 1e-4;

/// Initial grid refinements per level: ×4 each, at most 3.
const REFINEMENTS: u32 = 3;

/// A certified bound `sup_t ‖A(t)·A(bt)···A(b^L t)‖ ≤ 1 - δ`.
///
/// The certificate records the grid it was obtained on so the scan can be
/// replayed: the sup over the grid plus `K·h` (with `h = 1/grid_m` and
/// `K = π·b^{L+1}`) equals `1 - δ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContractionCertificate {
    pub l: u32,
    pub delta: f64,
    pub grid_m: u64,
    pub grid_spacing: f64,
    pub lipschitz_k: f64,
}

impl ContractionCertificate {
    /// The decay rate the certificate guarantees: `η = -ln(1-δ)/(L+1)`.
    pub fn eta_lower_bound(&self) -> f64 {
        -(1.0 - self.delta).ln() / (self.l as f64 + 1.0)
    }
}

/// One scanned (level, grid) pair, kept for trend reporting.
#[derive(Clone, Copy, Debug)]
pub struct LevelScan {
    pub l: u32,
    pub grid_m: u64,
    pub grid_sup: f64,
    pub certified_sup: f64,
    /// True when the scan stopped early at a witness above the threshold.
    pub aborted: bool,
}

/// Result of a certificate search: the certificate if one was found, plus
/// every scan performed (the grid-sup trend when the search is exhausted).
#[derive(Clone, Debug)]
pub struct ContractionSearch {
    pub certificate: Option<ContractionCertificate>,
    pub scans: Vec<LevelScan>,
}

impl ContractionSearch {
    /// Best (lowest) grid-sup seen, for exhaustion reports.
    pub fn best_grid_sup(&self) -> Option<f64> {
        self.scans
            .iter()
            .map(|s| s.grid_sup)
            .min_by(|a, b| a.partial_cmp(b).expect("norms are finite"))
    }
}

fn initial_grid(base: u32, l: u32) -> u64 {
    let fast = (base as u64).saturating_pow(l + 1);
    fast.saturating_mul(4).max(1024)
}

/// Search for the smallest `L ≤ l_max` with a certified product-norm bound
/// `≤ 1 - delta_min`, refining the grid at most three times (×4 each)
/// before advancing to the next level.
///
/// Fails when `g` is periodic (no contraction exists); an exhausted search
/// returns `certificate: None` together with the scan trend, which is not
/// a disproof.
pub fn find_contraction(
    config: &FourierConfig,
    l_max: u32,
    delta_min: f64,
) -> Result<ContractionSearch> {
    if config.g().is_periodic() {
        return Err(Error::invalid(
            "g is periodic: transfer products do not contract, no certificate exists",
        ));
    }
    if !(0.0..1.0).contains(&delta_min) || delta_min <= 0.0 {
        return Err(Error::invalid("delta_min must lie in (0, 1)"));
    }
    if l_max < 1 {
        return Err(Error::invalid("l_max must be at least 1"));
    }
    let scanner = ProductScanner::<Real>::new(config)?;
    let threshold = 1.0 - delta_min;
    let mut scans = Vec::new();
    for l in 1..=l_max {
        let k = lipschitz_k(config.base(), l);
        let mut grid = initial_grid(config.base(), l);
        for _ in 0..=REFINEMENTS {
            let (grid_sup, aborted) = scanner.grid_norm_scan(l, grid, Some(threshold));
            let certified_sup = grid_sup + k / grid as f64;
            scans.push(LevelScan {
                l,
                grid_m: grid,
                grid_sup,
                certified_sup,
                aborted,
            });
            if aborted {
                // A grid point already exceeds 1 - delta_min; refining can
                // only raise the grid-sup. Move on to the next level.
                break;
            }
            if certified_sup <= threshold {
                return Ok(ContractionSearch {
                    certificate: Some(ContractionCertificate {
                        l,
                        delta: 1.0 - certified_sup,
                        grid_m: grid,
                        grid_spacing: 1.0 / grid as f64,
                        lipschitz_k: k,
                    }),
                    scans,
                });
            }
            grid = grid.saturating_mul(4);
        }
    }
    Ok(ContractionSearch {
        certificate: None,
        scans,
    })
}

/// Per-λ record of the decay profile.
#[derive(Clone, Copy, Debug)]
pub struct DecayRow {
    pub lambda: u32,
    pub grid_m: u64,
    /// Grid maximum of `|F_λ^{0,0}(t)|`.
    pub sup_grid: f64,
    /// Certified upper bound for `sup_t |F_λ^{0,0}(t)|`, composed from
    /// product certificates; always in (0, 1].
    pub sup_certified: f64,
}

/// Certified exponential decay of the Fourier terms: per-λ grid sups and
/// certified bounds, plus the least-squares fit `C·e^{-ηλ}` of the
/// certified bounds beyond the contraction window.
#[derive(Clone, Debug)]
pub struct DecayProfile {
    pub rows: Vec<DecayRow>,
    pub fit_c: f64,
    pub fit_eta: f64,
    pub certificate: ContractionCertificate,
}

impl DecayProfile {
    /// Certified bounds after a running-minimum transform (non-increasing).
    pub fn certified_running_min(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.rows.len());
        let mut cur = f64::INFINITY;
        for row in &self.rows {
            cur = cur.min(row.sup_certified);
            out.push(cur);
        }
        out
    }
}

/// Certified decay profile of `|F_λ^{0,0}|` for `λ ≤ lambda_max`.
///
/// A contraction certificate is searched with the default budget; the
/// certified bound at level `λ` composes the window certificate with
/// shorter certified products:
/// `B(λ) = min(1, S_m · B(λ-m))` with `m = min(λ, L+1)`, where `S_m` is a
/// certified sup for the m-fold product and `S_{L+1} = 1 - δ`. `grid_m`
/// controls only the resolution of the reported grid sups.
pub fn decay_profile(
    config: &FourierConfig,
    lambda_max: u32,
    grid_m: u64,
) -> Result<DecayProfile> {
    if grid_m == 0 {
        return Err(Error::invalid("grid_m must be positive"));
    }
    let search = find_contraction(config, DEFAULT_L_MAX, DEFAULT_DELTA_MIN)?;
    let certificate = search.certificate.ok_or_else(|| {
        Error::invalid(format!(
            "no contraction certificate up to L={DEFAULT_L_MAX}; best grid-sup {:.6} — \
             cannot certify decay",
            search.best_grid_sup().unwrap_or(f64::NAN)
        ))
    })?;
    let chunk = certificate.l + 1;
    if lambda_max < chunk + 1 {
        return Err(Error::invalid(format!(
            "lambda_max must exceed the contraction window L+1 = {chunk} \
             for the decay fit"
        )));
    }

    let scanner = ProductScanner::<Real>::new(config)?;
    // Certified sups S_m for m-fold products, m = 1..=chunk.
    let mut s = vec![1.0f64; chunk as usize + 1];
    for m in 1..chunk {
        let grid = initial_grid(config.base(), m - 1);
        let (sup, _) = scanner.grid_norm_scan(m - 1, grid, None);
        let certified = sup + lipschitz_k(config.base(), m - 1) / grid as f64;
        s[m as usize] = certified.min(1.0);
    }
    s[chunk as usize] = 1.0 - certificate.delta;

    let mut bound = vec![1.0f64; lambda_max as usize + 1];
    for lambda in 1..=lambda_max {
        let m = lambda.min(chunk);
        let b = s[m as usize] * bound[(lambda - m) as usize];
        bound[lambda as usize] = b.min(1.0);
    }

    let start = config
        .component()
        .index_of(0, 0)
        .ok_or_else(|| Error::internal("component lost (0,0)".to_string()))?;
    let sups = scanner.grid_entry_sweep(start, lambda_max, grid_m);

    let rows: Vec<DecayRow> = (0..=lambda_max)
        .map(|lambda| DecayRow {
            lambda,
            grid_m,
            sup_grid: sups[lambda as usize],
            sup_certified: bound[lambda as usize],
        })
        .collect();

    // Least squares on ln B(λ) for λ past the contraction window.
    let pts: Vec<(f64, f64)> = (chunk..=lambda_max)
        .map(|lambda| (lambda as f64, bound[lambda as usize].ln()))
        .collect();
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;

    Ok(DecayProfile {
        rows,
        fit_c: intercept.exp(),
        fit_eta: -slope,
        certificate,
    })
}
