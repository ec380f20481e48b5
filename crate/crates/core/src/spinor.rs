//! Bloch-wave spinor components `A·exp(i(k z + h z̄))`, the Dirac-like
//! system residual, the induced-metric density and the (anti)periodicity
//! check under a lattice translation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::torus::{Lattice, WaveVectorSet};
use crate::wirtinger::{wirtinger_dz, wirtinger_dzbar};
use crate::C64;

/// Largest admissible `|Im(k z + h z̄)|` before evaluation is refused.
pub const OVERFLOW_GUARD: f64 = 700.0;

/// One component `amplitude · exp(i(kvec·z + hvec·z̄))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinorComponent {
    pub amplitude: C64,
    pub kvec: C64,
    pub hvec: C64,
}

impl SpinorComponent {
    pub fn new(amplitude: C64, kvec: C64, hvec: C64) -> Self {
        SpinorComponent { amplitude, kvec, hvec }
    }

    pub fn exponent(&self, z: C64) -> C64 {
        self.kvec * z + self.hvec * z.conj()
    }

    /// `exp(i(kvec·z + hvec·z̄))` with the overflow guard applied.
    pub fn phase_factor(&self, z: C64) -> Result<C64> {
        guarded_exp_i(self.exponent(z))
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        Ok(self.amplitude * self.phase_factor(z)?)
    }

    /// Exact `∂_z` of the component: `i·kvec` times its value.
    pub fn dz(&self, z: C64) -> Result<C64> {
        Ok(C64::i() * self.kvec * self.eval(z)?)
    }

    /// Exact `∂_z̄` of the component: `i·hvec` times its value.
    pub fn dzbar(&self, z: C64) -> Result<C64> {
        Ok(C64::i() * self.hvec * self.eval(z)?)
    }

    /// Unguarded evaluation for finite-difference stencils; may return inf.
    pub(crate) fn eval_raw(&self, z: C64) -> C64 {
        self.amplitude * (C64::i() * self.exponent(z)).exp()
    }

    pub fn scaled(&self, factor: C64) -> Self {
        SpinorComponent { amplitude: self.amplitude * factor, ..*self }
    }
}

/// `exp(i·e)`, refusing exponents whose imaginary part is out of range.
pub fn guarded_exp_i(e: C64) -> Result<C64> {
    if !e.is_finite() || e.im.abs() > OVERFLOW_GUARD {
        return Err(Error::Overflow { exponent_im: e.im, limit: OVERFLOW_GUARD });
    }
    Ok((C64::i() * e).exp())
}

/// The pair `(ψ_α, φ_α)` entering the Dirac-like system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Doublet {
    pub psi: SpinorComponent,
    pub phi: SpinorComponent,
    pub index: u8,
}

impl Doublet {
    pub fn new(index: u8, psi: SpinorComponent, phi: SpinorComponent) -> Self {
        Doublet { psi, phi, index }
    }

    /// Whether ψ and φ carry the same exponent, as the Bloch ansatz requires.
    pub fn shares_exponent(&self) -> bool {
        self.psi.kvec == self.phi.kvec && self.psi.hvec == self.phi.hvec
    }

    /// Multiplies both components by the same constant.
    pub fn gauge(&self, factor: C64) -> Self {
        Doublet { psi: self.psi.scaled(factor), phi: self.phi.scaled(factor), index: self.index }
    }
}

/// Which reading of the Dirac-like system to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum DiracConvention {
    /// `∂_z φ = pφ`, `∂_z̄ φ = −pψ` (φ on both left-hand sides).
    A,
    /// `∂_z ψ = pφ`, `∂_z̄ φ = −pψ`.
    #[default]
    B,
}

impl DiracConvention {
    pub const ALL: [DiracConvention; 2] = [DiracConvention::A, DiracConvention::B];

    pub fn label(self) -> &'static str {
        match self {
            DiracConvention::A => "A",
            DiracConvention::B => "B",
        }
    }
}

impl std::str::FromStr for DiracConvention {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "A" | "a" => Ok(DiracConvention::A),
            "B" | "b" => Ok(DiracConvention::B),
            other => Err(format!("unknown convention {other:?}, expected A or B")),
        }
    }
}

fn assemble(
    convention: DiracConvention,
    dz_psi: C64,
    dz_phi: C64,
    dzbar_phi: C64,
    psi: C64,
    phi: C64,
    p: C64,
) -> (C64, C64) {
    let first = match convention {
        DiracConvention::A => dz_phi - p * phi,
        DiracConvention::B => dz_psi - p * phi,
    };
    (first, dzbar_phi + p * psi)
}

/// Residuals of the two Dirac-like equations at `z`, with exact derivatives.
pub fn dirac_residual<P>(d: &Doublet, p: P, z: C64, convention: DiracConvention) -> Result<(C64, C64)>
where
    P: Fn(C64) -> C64,
{
    Ok(assemble(
        convention,
        d.psi.dz(z)?,
        d.phi.dz(z)?,
        d.phi.dzbar(z)?,
        d.psi.eval(z)?,
        d.phi.eval(z)?,
        p(z),
    ))
}

/// Same residuals with central-difference derivatives of step `h`.
pub fn dirac_residual_fd<P>(
    d: &Doublet,
    p: P,
    z: C64,
    convention: DiracConvention,
    h: f64,
) -> Result<(C64, C64)>
where
    P: Fn(C64) -> C64,
{
    let psi = d.psi;
    let phi = d.phi;
    Ok(assemble(
        convention,
        wirtinger_dz(|w| psi.eval_raw(w), z, h)?,
        wirtinger_dz(|w| phi.eval_raw(w), z, h)?,
        wirtinger_dzbar(|w| phi.eval_raw(w), z, h)?,
        psi.eval(z)?,
        phi.eval(z)?,
        p(z),
    ))
}

/// Residual for a constant potential fixed only through `p²`: both square
/// roots are tried and the one with the smaller residual is kept.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BestRootResidual {
    pub p: C64,
    pub residual: (C64, C64),
    pub norm: f64,
}

pub fn dirac_residual_best_root(
    d: &Doublet,
    p_squared: C64,
    z: C64,
    convention: DiracConvention,
) -> Result<BestRootResidual> {
    let root = p_squared.sqrt();
    let mut best: Option<BestRootResidual> = None;
    for p in [root, -root] {
        let residual = dirac_residual(d, |_| p, z, convention)?;
        let norm = residual.0.norm().max(residual.1.norm());
        if best.is_none_or(|b| norm < b.norm) {
            best = Some(BestRootResidual { p, residual, norm });
        }
    }
    Ok(best.expect("two candidates tried"))
}

/// `k₁h₁` and its mismatch with `k₂h₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialSample {
    pub p_squared: C64,
    pub mismatch: C64,
}

pub fn potential_condition(wvs: &WaveVectorSet) -> PotentialSample {
    let p_squared = wvs.k1 * wvs.h1;
    PotentialSample { p_squared, mismatch: p_squared - wvs.k2 * wvs.h2 }
}

/// `u_α = |ψ_α|² + |φ_α|²` and the conformal density `u₁u₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricSample {
    pub u1: f64,
    pub u2: f64,
    pub density: f64,
}

pub fn metric_density(d1: &Doublet, d2: &Doublet, z: C64) -> Result<MetricSample> {
    let u = |d: &Doublet| -> Result<f64> { Ok(d.psi.eval(z)?.norm_sqr() + d.phi.eval(z)?.norm_sqr()) };
    let u1 = u(d1)?;
    let u2 = u(d2)?;
    Ok(MetricSample { u1, u2, density: u1 * u2 })
}

/// Behaviour of a component under `z → z + γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeriodicityReport {
    /// `c(z+γ)/c(z)` at the first sample.
    pub ratio: C64,
    /// `(−1)ⁿ`.
    pub expected_sign: i8,
    /// `max |ratio − expected_sign|` over the samples.
    pub deviation: f64,
    /// Largest relative difference between the ratios at different samples.
    pub ratio_spread: f64,
}

/// Compares `c(z+γ)` against `(−1)ⁿ c(z)` at each sample. The amplitude
/// cancels in the ratio, so zero-amplitude components are still checked.
pub fn periodicity_check(c: &SpinorComponent, lattice: &Lattice, n: i64, samples: &[C64]) -> Result<PeriodicityReport> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("periodicity check needs at least one sample".into()));
    }
    let gamma = lattice.gamma();
    let expected_sign: i8 = if n.rem_euclid(2) == 0 { 1 } else { -1 };
    let mut ratios = Vec::with_capacity(samples.len());
    for &z in samples {
        ratios.push(c.phase_factor(z + gamma)? / c.phase_factor(z)?);
    }
    let first = ratios[0];
    let deviation = ratios
        .iter()
        .map(|r| (r - f64::from(expected_sign)).norm())
        .fold(0.0, f64::max);
    let ratio_spread = ratios
        .iter()
        .map(|r| (r - first).norm() / first.norm())
        .fold(0.0, f64::max);
    Ok(PeriodicityReport { ratio: first, expected_sign, deviation, ratio_spread })
}
