//! R⁴ coordinates of the immersion: the four coordinate one-forms, their
//! closed-form antiderivatives through the phases η and ρ, contour
//! quadrature along arbitrary paths, and the flat-torus radius audit.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expform::{ExpForm, ExpSum, ExpTerm};
use crate::spinor::{guarded_exp_i, OVERFLOW_GUARD};
use crate::torus::{TorusSolution, WaveVectorSet};
use crate::wirtinger::{integrate_one_form, IntegrationPath};
use crate::C64;

/// `η = (k₁+k₂)z + (h₁+h₂)z̄`, `ρ = (k₁−h̄₂)z + (h₁−k̄₂)z̄` and their
/// exponentials `u = e^{iη}`, `w = e^{iρ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseState {
    pub eta: C64,
    pub rho: C64,
    pub u: C64,
    pub w: C64,
}

pub fn phase_state(wvs: &WaveVectorSet, z: C64) -> Result<PhaseState> {
    let eta = wvs.k_sum() * z + wvs.h_sum() * z.conj();
    let rho = (wvs.k1 - wvs.h2.conj()) * z + (wvs.h1 - wvs.k2.conj()) * z.conj();
    Ok(PhaseState { eta, rho, u: guarded_exp_i(eta)?, w: guarded_exp_i(rho)? })
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ImmersionPoint {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub x4: f64,
}

impl ImmersionPoint {
    pub fn as_array(&self) -> [f64; 4] {
        [self.x1, self.x2, self.x3, self.x4]
    }

    pub fn from_array(x: [f64; 4]) -> Self {
        ImmersionPoint { x1: x[0], x2: x[1], x3: x[2], x4: x[3] }
    }

    /// `x₁² + x₂²`.
    pub fn r12(&self) -> f64 {
        self.x1 * self.x1 + self.x2 * self.x2
    }

    /// `x₃² + x₄²`.
    pub fn r34(&self) -> f64 {
        self.x3 * self.x3 + self.x4 * self.x4
    }

    pub fn max_abs_diff(&self, other: &ImmersionPoint) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Whether closed-form coordinates subtract their value at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordinateOffset {
    /// Definite integral from `z = 0`: vanishes at the origin.
    #[default]
    FromOrigin,
    /// `x₁ = 2Re u` etc. without the base-point constant.
    None,
}

/// How a real parameter `t` is placed on the real axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Section {
    /// `z = t/2`, so that `t = z + z̄`.
    #[default]
    Half,
    /// `z = t`.
    Full,
}

impl Section {
    pub fn point(self, t: f64) -> C64 {
        match self {
            Section::Half => C64::new(0.5 * t, 0.0),
            Section::Full => C64::new(t, 0.0),
        }
    }
}

/// The four coordinate one-forms, assembled term by term from the spinor
/// components exactly as the representation prescribes.
pub fn coordinate_forms(sol: &TorusSolution) -> [ExpForm; 4] {
    let psi1 = ExpTerm::from(sol.doublet1.psi);
    let phi1 = ExpTerm::from(sol.doublet1.phi);
    let psi2 = ExpTerm::from(sol.doublet2.psi);
    let phi2 = ExpTerm::from(sol.doublet2.phi);
    let i = C64::i();
    let half = C64::new(0.5, 0.0);

    let x1 = ExpForm {
        f: ExpSum(vec![psi1.conj() * psi2.conj(), phi1 * phi2]).scale(i * half),
        g: ExpSum(vec![psi1 * psi2, phi1.conj() * phi2.conj()]).scale(-i * half),
    };
    let x2 = ExpForm {
        f: ExpSum(vec![psi1.conj() * psi2.conj(), -(phi1 * phi2)]).scale(half),
        g: ExpSum(vec![psi1 * psi2, -(phi1.conj() * phi2.conj())]).scale(half),
    };
    let x3 = ExpForm {
        f: ExpSum(vec![psi1.conj() * psi2, psi2.conj() * phi1]).scale(-half),
        g: ExpSum(vec![psi1 * phi2.conj(), phi2 * phi1.conj()]).scale(-half),
    };
    let x4 = ExpForm {
        f: ExpSum(vec![psi1.conj() * psi2, -(psi2.conj() * phi1)]).scale(-i * half),
        g: ExpSum(vec![psi1 * phi2.conj(), -(phi2 * phi1.conj())]).scale(i * half),
    };
    [x1, x2, x3, x4]
}

/// `(2Re u, −2Im u, −2Im w, 2Re w)`, optionally minus its value at `z = 0`.
pub fn closed_form_coordinates(sol: &TorusSolution, z: C64, offset: CoordinateOffset) -> Result<ImmersionPoint> {
    let s = phase_state(&sol.wvs, z)?;
    let mut x = [2.0 * s.u.re, -2.0 * s.u.im, -2.0 * s.w.im, 2.0 * s.w.re];
    if offset == CoordinateOffset::FromOrigin {
        // u(0) = w(0) = 1.
        x[0] -= 2.0;
        x[3] -= 2.0;
    }
    Ok(ImmersionPoint::from_array(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratedCoordinates {
    /// Real parts of the four integrals.
    pub point: ImmersionPoint,
    /// `|Im|` of each integral; zero for a genuinely real immersion.
    pub imaginary: [f64; 4],
    /// All imaginary parts below `10·tol`.
    pub real_valued: bool,
}

/// Integrates the four coordinate forms along `path`, which must start at
/// the origin.
pub fn integrated_coordinates(sol: &TorusSolution, path: &IntegrationPath, tol: f64) -> Result<IntegratedCoordinates> {
    if path.start() != C64::new(0.0, 0.0) {
        return Err(Error::InvalidPath(format!("coordinate paths start at the origin, got {}", path.start())));
    }
    let forms = coordinate_forms(sol);
    // Exponents are affine in z, so the vertices bound them on each segment.
    for &v in path.vertices() {
        let worst = forms
            .iter()
            .map(|w| w.f.max_exponent_im(v).max(w.g.max_exponent_im(v)))
            .fold(0.0, f64::max);
        if worst > OVERFLOW_GUARD {
            return Err(Error::Overflow { exponent_im: worst, limit: OVERFLOW_GUARD });
        }
    }
    let mut x = [0.0; 4];
    let mut imaginary = [0.0; 4];
    for (j, form) in forms.iter().enumerate() {
        let v = integrate_one_form(form, path, tol)?;
        x[j] = v.re;
        imaginary[j] = v.im.abs();
    }
    Ok(IntegratedCoordinates {
        point: ImmersionPoint::from_array(x),
        imaginary,
        real_valued: imaginary.iter().all(|&m| m < 10.0 * tol),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiusSample {
    pub t: f64,
    pub r12: f64,
    pub r34: f64,
}

/// Verdict thresholds for the unit-phase biconditional.
pub const RADIUS_SPREAD_TOL: f64 = 1e-10;
pub const PHASE_IMAG_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiiAudit {
    pub samples: Vec<RadiusSample>,
    pub spread12: f64,
    pub spread34: f64,
    pub mean12: f64,
    pub mean34: f64,
    pub max_abs_im_eta: f64,
    pub max_abs_im_rho: f64,
    /// `max |ρ − η|` over the samples.
    pub max_rho_eta_gap: f64,
    /// ρ and η coincide on the samples, so both circles are traced by the
    /// same phase.
    pub rho_equals_eta: bool,
    /// `spread < 1e−10 ⇔ max|Im phase| < 1e−12`, for both planes.
    pub unit_phase_consistent: bool,
}

/// Samples `x₁²+x₂²` and `x₃²+x₄²` of the offset-free closed form along the
/// real section.
pub fn radii_audit(sol: &TorusSolution, t_samples: &[f64], section: Section) -> Result<RadiiAudit> {
    if t_samples.is_empty() {
        return Err(Error::InvalidParameter("radii audit needs at least one sample".into()));
    }
    let mut samples = Vec::with_capacity(t_samples.len());
    let (mut im_eta, mut im_rho, mut gap) = (0.0f64, 0.0f64, 0.0f64);
    for &t in t_samples {
        let z = section.point(t);
        let s = phase_state(&sol.wvs, z)?;
        let x = closed_form_coordinates(sol, z, CoordinateOffset::None)?;
        samples.push(RadiusSample { t, r12: x.r12(), r34: x.r34() });
        im_eta = im_eta.max(s.eta.im.abs());
        im_rho = im_rho.max(s.rho.im.abs());
        gap = gap.max((s.rho - s.eta).norm());
    }
    let stats = |get: fn(&RadiusSample) -> f64| {
        let (lo, hi, sum) = samples.iter().map(get).fold((f64::INFINITY, f64::NEG_INFINITY, 0.0), |(lo, hi, s), v| {
            (lo.min(v), hi.max(v), s + v)
        });
        (hi - lo, sum / samples.len() as f64)
    };
    let (spread12, mean12) = stats(|s| s.r12);
    let (spread34, mean34) = stats(|s| s.r34);
    let unit_phase_consistent = ((spread12 < RADIUS_SPREAD_TOL) == (im_eta < PHASE_IMAG_TOL))
        && ((spread34 < RADIUS_SPREAD_TOL) == (im_rho < PHASE_IMAG_TOL));
    Ok(RadiiAudit {
        samples,
        spread12,
        spread34,
        mean12,
        mean34,
        max_abs_im_eta: im_eta,
        max_abs_im_rho: im_rho,
        max_rho_eta_gap: gap,
        rho_equals_eta: gap < PHASE_IMAG_TOL,
        unit_phase_consistent,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RewriteRow {
    pub t: f64,
    /// Real parts of `2cos(Kt), −2sin(Kt), −2sin(Ht), 2cos(Ht)` with
    /// `K = k₁+k₂`, `H = h₁+h₂`.
    pub trig: [f64; 4],
    /// Imaginary parts of the same four expressions.
    pub trig_imag: [f64; 4],
    /// Offset-free closed form at the section point.
    pub closed: [f64; 4],
    pub difference: [f64; 4],
}

/// Compares the trigonometric form of the coordinates in the real
/// parameter `t` against the closed form through η and ρ.
pub fn trig_rewrite_comparison(sol: &TorusSolution, t_samples: &[f64], section: Section) -> Result<Vec<RewriteRow>> {
    if t_samples.is_empty() {
        return Err(Error::InvalidParameter("rewrite comparison needs at least one sample".into()));
    }
    let (k, h) = (sol.wvs.k_sum(), sol.wvs.h_sum());
    t_samples
        .iter()
        .map(|&t| {
            let trig = [2.0 * (k * t).cos(), -2.0 * (k * t).sin(), -2.0 * (h * t).sin(), 2.0 * (h * t).cos()];
            let closed = closed_form_coordinates(sol, section.point(t), CoordinateOffset::None)?.as_array();
            Ok(RewriteRow {
                t,
                trig: trig.map(|v| v.re),
                trig_imag: trig.map(|v| v.im.abs()),
                closed,
                difference: std::array::from_fn(|j| (trig[j].re - closed[j]).abs()),
            })
        })
        .collect()
}
