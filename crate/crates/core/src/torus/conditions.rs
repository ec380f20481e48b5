//! Algebraic side conditions of the family: the consistency relations
//! between wave vectors, the amplitude product conditions, the reality of
//! `k₁h₁`, and the closed-form polynomial for `p²`.

use serde::Serialize;

use super::{build_wave_vectors, RealityBranch, TorusParameters, TorusSolution, WaveVectorSet};
use crate::error::{Error, Result};
use crate::C64;

/// `(k̄₁ − h₂ − (h₁+h₂), h₁ − k̄₂ − (k̄₁+k̄₂))`.
pub fn consistency_residual(wvs: &WaveVectorSet) -> (C64, C64) {
    let WaveVectorSet { k1, h1, k2, h2 } = *wvs;
    (k1.conj() - h2 - (h1 + h2), h1 - k2.conj() - (k1.conj() + k2.conj()))
}

/// Residuals of the four amplitude conditions, in order
///
/// ```text
/// A₁A₂ − 2(k₁+k₂)
/// B₁B₂ + 2(h₁+h₂)
/// −½B̄₁A₂ − (h̄₁ − k₂)
/// −½B̄₂A₁ + (k₁ − h̄₂)
/// ```
///
/// The first two hold by construction; the last two pick up `C̄/C`.
pub fn amplitude_conditions_residual(sol: &TorusSolution) -> [C64; 4] {
    let WaveVectorSet { k1, h1, k2, h2 } = sol.wvs;
    let (a1, b1, a2, b2) = (sol.a1(), sol.b1(), sol.a2(), sol.b2());
    [
        a1 * a2 - 2.0 * (k1 + k2),
        b1 * b2 + 2.0 * (h1 + h2),
        -0.5 * b1.conj() * a2 - (h1.conj() - k2),
        -0.5 * b2.conj() * a1 + (k1 - h2.conj()),
    ]
}

/// `Im(k₁h₁)` at `(a, b)` with the lattice and winding of `params`.
pub fn imag_p_squared(params: &TorusParameters, a: f64, b: f64) -> f64 {
    let w = build_wave_vectors(&params.with_a(a).with_b(b));
    (w.k1 * w.h1).im
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RealityRow {
    pub a: f64,
    pub b: f64,
    pub im_p_squared: f64,
}

/// A point of the numerically located zero set of `Im(k₁h₁)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroCrossing {
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealityAudit {
    pub rows: Vec<RealityRow>,
    /// One entry per sign change of `b ↦ Im(k₁h₁)` in each `a` column,
    /// refined by bisection.
    pub zero_locus: Vec<ZeroCrossing>,
    /// Columns where `Im(k₁h₁)` vanishes for every sampled `b`.
    pub vanishing_columns: Vec<f64>,
    /// `max |Im(k₁h₁)|` along `b = +(Λ₂/Λ₁)a`.
    pub plus_branch_max: f64,
    /// `max |Im(k₁h₁)|` along `b = −(Λ₂/Λ₁)a`.
    pub minus_branch_max: f64,
}

/// Bisection stops once the bracket is this narrow.
const ROOT_WIDTH: f64 = 1e-14;

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..200 {
        if hi - lo <= ROOT_WIDTH * hi.abs().max(lo.abs()).max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Tabulates `Im(k₁h₁)` over `a_grid × b_grid` (a-major), locates its zero
/// set column by column, and measures both candidate reality branches.
///
/// `b_grid` must be sorted ascending for the zero search.
pub fn reality_audit(params: &TorusParameters, a_grid: &[f64], b_grid: &[f64]) -> Result<RealityAudit> {
    if a_grid.is_empty() || b_grid.is_empty() {
        return Err(Error::InvalidParameter("reality audit needs nonempty a and b grids".into()));
    }
    let mut rows = Vec::with_capacity(a_grid.len() * b_grid.len());
    let mut zero_locus = Vec::new();
    let mut vanishing_columns = Vec::new();
    for &a in a_grid {
        let column: Vec<f64> = b_grid.iter().map(|&b| imag_p_squared(params, a, b)).collect();
        rows.extend(b_grid.iter().zip(&column).map(|(&b, &im)| RealityRow { a, b, im_p_squared: im }));
        if column.iter().all(|&v| v == 0.0) {
            vanishing_columns.push(a);
            continue;
        }
        for j in 0..b_grid.len() {
            if column[j] == 0.0 {
                zero_locus.push(ZeroCrossing { a, b: b_grid[j] });
            } else if j + 1 < b_grid.len() && column[j + 1] != 0.0 && (column[j] > 0.0) != (column[j + 1] > 0.0) {
                let b = bisect(|b| imag_p_squared(params, a, b), b_grid[j], b_grid[j + 1]);
                zero_locus.push(ZeroCrossing { a, b });
            }
        }
    }
    let branch_max = |branch: RealityBranch| {
        a_grid
            .iter()
            .map(|&a| {
                let p = branch.apply(params.with_a(a));
                imag_p_squared(params, a, p.b).abs()
            })
            .fold(0.0, f64::max)
    };
    Ok(RealityAudit {
        rows,
        zero_locus,
        vanishing_columns,
        plus_branch_max: branch_max(RealityBranch::Plus),
        minus_branch_max: branch_max(RealityBranch::Minus),
    })
}

/// The closed-form polynomial for `p²` on the reality branch, with leading
/// coefficient `Λ₂/Λ₁`.
pub fn printed_polynomial(params: &TorusParameters, a: f64) -> f64 {
    let r = params.ratio();
    r * (1.0 - r * r) * a + (3.0 * r * r - 1.0) * a * a
}

/// The twisted-lattice polynomial, leading coefficient `nπ/(pΛ₁)`:
///
/// ```text
/// p′² = (nπ/(pΛ₁))(1 − (qΛ₂/(pΛ₁))²) a + (3(qΛ₂/(pΛ₁))² − 1) a²
/// ```
pub fn twisted_polynomial(n: i64, lambda1: f64, lambda2: f64, p: u64, q: u64, a: f64) -> f64 {
    let pl1 = p as f64 * lambda1;
    let r = q as f64 * lambda2 / pl1;
    n as f64 * std::f64::consts::PI / pl1 * (1.0 - r * r) * a + (3.0 * r * r - 1.0) * a * a
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricPolynomial {
    pub a: f64,
    pub b: f64,
    /// `k₁h₁` from the wave vectors.
    pub direct: C64,
    /// Polynomial with leading coefficient `Λ₂/Λ₁`.
    pub printed: f64,
    /// Same polynomial with leading coefficient `nπ/Λ₁`.
    pub printed_kappa: f64,
    /// `|direct − printed|`.
    pub discrepancy: f64,
    /// `|direct − printed_kappa|`.
    pub discrepancy_kappa: f64,
}

/// Compares `k₁h₁` against both closed forms at `a`, with `b` chosen by
/// `branch`. Neither closed form is assumed correct.
pub fn metric_polynomial(params: &TorusParameters, a: f64, branch: RealityBranch) -> MetricPolynomial {
    let p = branch.apply(params.with_a(a));
    let w = build_wave_vectors(&p);
    let direct = w.k1 * w.h1;
    let printed = printed_polynomial(&p, a);
    let printed_kappa = twisted_polynomial(p.n, p.lattice.lambda1(), p.lattice.lambda2(), 1, 1, a);
    MetricPolynomial {
        a,
        b: p.b,
        direct,
        printed,
        printed_kappa,
        discrepancy: (direct - printed).norm(),
        discrepancy_kappa: (direct - printed_kappa).norm(),
    }
}
