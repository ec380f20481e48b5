//! The Bloch-wave torus family: lattice and parameters, the four evanescent
//! wave vectors, and the spinor solution built from them.
//!
//! The construction follows the closed-form family literally, with two
//! readings of typographically ambiguous terms (see [`ExponentMode`] and
//! [`build_wave_vectors`]). Algebraic side conditions live in
//! [`conditions`]; lattice surgery in [`dehn`].

pub mod conditions;
pub mod dehn;

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spinor::{Doublet, SpinorComponent};
use crate::C64;

pub use dehn::DehnTwist;

/// Period lattice with generator `γ = Λ₁ + iΛ₂`.
///
/// The lattice remembers the integer Dehn multipliers applied to its base
/// periods, so repeated surgery composes exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lattice {
    base1: f64,
    base2: f64,
    mult1: u64,
    mult2: u64,
}

impl Lattice {
    pub fn new(lambda1: f64, lambda2: f64) -> Result<Self> {
        if !lambda1.is_finite() || lambda1 == 0.0 {
            return Err(Error::InvalidParameter(format!("lambda1 must be finite and nonzero, got {lambda1}")));
        }
        if !lambda2.is_finite() {
            return Err(Error::InvalidParameter(format!("lambda2 must be finite, got {lambda2}")));
        }
        Ok(Lattice { base1: lambda1, base2: lambda2, mult1: 1, mult2: 1 })
    }

    pub fn lambda1(&self) -> f64 {
        self.base1 * self.mult1 as f64
    }

    pub fn lambda2(&self) -> f64 {
        self.base2 * self.mult2 as f64
    }

    pub fn gamma(&self) -> C64 {
        C64::new(self.lambda1(), self.lambda2())
    }

    /// `Λ₂/Λ₁`.
    pub fn ratio(&self) -> f64 {
        self.lambda2() / self.lambda1()
    }

    /// Accumulated Dehn multipliers `(p, q)`.
    pub fn multipliers(&self) -> (u64, u64) {
        (self.mult1, self.mult2)
    }

    pub(crate) fn scaled(&self, p: u64, q: u64) -> Result<Self> {
        let overflow = || Error::InvalidParameter(format!("Dehn multiplier overflow applying ({p},{q})"));
        Ok(Lattice {
            mult1: self.mult1.checked_mul(p).ok_or_else(overflow)?,
            mult2: self.mult2.checked_mul(q).ok_or_else(overflow)?,
            ..*self
        })
    }
}

/// User parameters of the family: lattice, real wave parameters `a`, `b`,
/// integer winding `n` and the amplitude constant `C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TorusParameters {
    pub lattice: Lattice,
    pub a: f64,
    pub b: f64,
    pub n: i64,
    pub c: C64,
}

impl Default for TorusParameters {
    /// `Λ₁ = π`, `Λ₂ = 0`, `n = 1`, `a = b = 0`, `C = 1`.
    fn default() -> Self {
        TorusParameters {
            lattice: Lattice { base1: PI, base2: 0.0, mult1: 1, mult2: 1 },
            a: 0.0,
            b: 0.0,
            n: 1,
            c: C64::new(1.0, 0.0),
        }
    }
}

impl TorusParameters {
    pub fn new(lattice: Lattice, a: f64, b: f64, n: i64, c: C64) -> Result<Self> {
        let p = TorusParameters { lattice, a, b, n, c };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.a.is_finite() || !self.b.is_finite() {
            return Err(Error::InvalidParameter(format!("a and b must be finite, got a={} b={}", self.a, self.b)));
        }
        if !self.c.is_finite() || self.c == C64::new(0.0, 0.0) {
            return Err(Error::InvalidParameter(format!("C must be finite and nonzero, got {}", self.c)));
        }
        Ok(())
    }

    /// `κ = nπ/Λ₁`.
    pub fn kappa(&self) -> f64 {
        self.n as f64 * PI / self.lattice.lambda1()
    }

    /// `r = Λ₂/Λ₁`.
    pub fn ratio(&self) -> f64 {
        self.lattice.ratio()
    }

    pub fn with_a(self, a: f64) -> Self {
        TorusParameters { a, ..self }
    }

    pub fn with_b(self, b: f64) -> Self {
        TorusParameters { b, ..self }
    }

    /// Conditions the construction accepts but marks.
    pub fn flags(&self) -> Vec<ParameterFlag> {
        let mut flags = Vec::new();
        if self.n == 0 {
            flags.push(ParameterFlag::DegenerateWinding);
        }
        let half_kappa = 0.5 * self.kappa();
        if (self.a - half_kappa).abs() <= 1e-12 * half_kappa.abs().max(1.0) {
            flags.push(ParameterFlag::RealityExclusion);
        }
        if self.c.im != 0.0 {
            flags.push(ParameterFlag::ComplexAmplitude);
        }
        if self.lattice.lambda2() == 0.0 {
            flags.push(ParameterFlag::RealLattice);
        }
        flags
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParameterFlag {
    /// `n = 0`: every wave vector vanishes and the surface is a point.
    DegenerateWinding,
    /// `a = nπ/(2Λ₁)`, the value excluded alongside the reality branch.
    RealityExclusion,
    /// `C` has a phase; the second amplitude conditions pick up `C̄/C`.
    ComplexAmplitude,
    /// `Λ₂ = 0`; the period is real.
    RealLattice,
    /// `k₁ + k₂ = 0`: φ₂ vanishes identically.
    ZeroPhi2Amplitude,
    /// `h₁ + h₂ = 0`: ψ₂ vanishes identically.
    ZeroPsi2Amplitude,
}

/// How `b` is chosen relative to `a` when sweeping the family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RealityBranch {
    /// `b` taken as given.
    #[default]
    Free,
    /// `b = (Λ₂/Λ₁)·a`.
    Plus,
    /// `b = −(Λ₂/Λ₁)·a`.
    Minus,
}

impl RealityBranch {
    pub fn apply(self, params: TorusParameters) -> TorusParameters {
        let r = params.ratio();
        match self {
            RealityBranch::Free => params,
            RealityBranch::Plus => params.with_b(r * params.a),
            RealityBranch::Minus => params.with_b(-r * params.a),
        }
    }
}

impl std::str::FromStr for RealityBranch {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "free" => Ok(RealityBranch::Free),
            "plus" => Ok(RealityBranch::Plus),
            "minus" => Ok(RealityBranch::Minus),
            other => Err(format!("unknown reality branch {other:?}, expected plus, minus or free")),
        }
    }
}

/// The four complex wave vectors.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct WaveVectorSet {
    pub k1: C64,
    pub h1: C64,
    pub k2: C64,
    pub h2: C64,
}

impl WaveVectorSet {
    pub fn k_sum(&self) -> C64 {
        self.k1 + self.k2
    }

    pub fn h_sum(&self) -> C64 {
        self.h1 + self.h2
    }

    pub fn is_finite(&self) -> bool {
        [self.k1, self.h1, self.k2, self.h2].iter().all(|v| v.is_finite())
    }
}

/// Builds `k₁, h₁, k₂, h₂` from `(a, b, n, Λ₁, Λ₂)`:
///
/// ```text
/// k₁ = a + ib
/// h₁ = (κ − a) + i[(κ − 2a)r − b]
/// k₂ = κ/2 + i(κ/2 − a)r
/// h₂ = (a − κ/2) + i(a + κ/2)r
/// ```
///
/// with `κ = nπ/Λ₁` and `r = Λ₂/Λ₁`. The imaginary factor of `k₂` uses
/// `Λ₂/Λ₁` like the other three vectors.
pub fn build_wave_vectors(params: &TorusParameters) -> WaveVectorSet {
    let (a, b) = (params.a, params.b);
    let kappa = params.kappa();
    let r = params.ratio();
    let half = 0.5 * kappa;
    WaveVectorSet {
        k1: C64::new(a, b),
        h1: C64::new(kappa - a, (kappa - 2.0 * a) * r - b),
        k2: C64::new(half, (half - a) * r),
        h2: C64::new(a - half, (a + half) * r),
    }
}

/// Which `z`-coefficient φ₂ carries in its exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentMode {
    /// φ₂ shares ψ₂'s exponent `k₂z + h₂z̄`.
    #[default]
    Shared,
    /// φ₂ uses `k₁z + h₂z̄`, the literal printed form.
    StrictPrint,
}

/// A member of the family: parameters, wave vectors and both doublets.
///
/// Amplitudes: `A₁ = C`, `B₁ = −C`, `A₂ = 2(k₁+k₂)/C`, `B₂ = 2(h₁+h₂)/C`,
/// with φ carrying `A` and ψ carrying `B`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TorusSolution {
    pub params: TorusParameters,
    pub wvs: WaveVectorSet,
    pub doublet1: Doublet,
    pub doublet2: Doublet,
    pub mode: ExponentMode,
    pub flags: Vec<ParameterFlag>,
}

impl TorusSolution {
    pub fn a1(&self) -> C64 {
        self.doublet1.phi.amplitude
    }
    pub fn b1(&self) -> C64 {
        self.doublet1.psi.amplitude
    }
    pub fn a2(&self) -> C64 {
        self.doublet2.phi.amplitude
    }
    pub fn b2(&self) -> C64 {
        self.doublet2.psi.amplitude
    }

    pub fn is_degenerate(&self) -> bool {
        self.flags.contains(&ParameterFlag::DegenerateWinding)
    }
}

pub fn build_solution(params: &TorusParameters) -> Result<TorusSolution> {
    build_solution_with_mode(params, ExponentMode::Shared)
}

pub fn build_solution_with_mode(params: &TorusParameters, mode: ExponentMode) -> Result<TorusSolution> {
    params.validate()?;
    let wvs = build_wave_vectors(params);
    let c = params.c;
    let k_sum = wvs.k_sum();
    let h_sum = wvs.h_sum();

    let e1 = |amp| SpinorComponent::new(amp, wvs.k1, wvs.h1);
    let doublet1 = Doublet::new(1, e1(-c), e1(c));

    let phi2_k = match mode {
        ExponentMode::Shared => wvs.k2,
        ExponentMode::StrictPrint => wvs.k1,
    };
    let psi2 = SpinorComponent::new(2.0 * h_sum / c, wvs.k2, wvs.h2);
    let phi2 = SpinorComponent::new(2.0 * k_sum / c, phi2_k, wvs.h2);
    let doublet2 = Doublet::new(2, psi2, phi2);

    let mut flags = params.flags();
    if k_sum == C64::new(0.0, 0.0) {
        flags.push(ParameterFlag::ZeroPhi2Amplitude);
    }
    if h_sum == C64::new(0.0, 0.0) {
        flags.push(ParameterFlag::ZeroPsi2Amplitude);
    }
    Ok(TorusSolution { params: *params, wvs, doublet1, doublet2, mode, flags })
}
