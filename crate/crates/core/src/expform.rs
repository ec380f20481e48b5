//! Finite sums of exponentials `c·exp(i(k z + h z̄))` and one-forms built
//! from them. Products and conjugates of spinor components stay in this
//! class, so their Wirtinger derivatives are available in closed form.

use std::ops::{Mul, Neg};

use crate::spinor::SpinorComponent;
use crate::wirtinger::OneForm;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpTerm {
    pub coeff: C64,
    pub k: C64,
    pub h: C64,
}

impl ExpTerm {
    pub fn eval(&self, z: C64) -> C64 {
        self.coeff * (C64::i() * (self.k * z + self.h * z.conj())).exp()
    }

    /// Complex conjugate as a function of `z`: `c̄·exp(i(−h̄ z − k̄ z̄))`.
    pub fn conj(&self) -> Self {
        ExpTerm { coeff: self.coeff.conj(), k: -self.h.conj(), h: -self.k.conj() }
    }

    pub fn scale(&self, s: C64) -> Self {
        ExpTerm { coeff: self.coeff * s, ..*self }
    }
}

impl From<SpinorComponent> for ExpTerm {
    fn from(c: SpinorComponent) -> Self {
        ExpTerm { coeff: c.amplitude, k: c.kvec, h: c.hvec }
    }
}

impl Mul for ExpTerm {
    type Output = ExpTerm;
    fn mul(self, rhs: ExpTerm) -> ExpTerm {
        ExpTerm { coeff: self.coeff * rhs.coeff, k: self.k + rhs.k, h: self.h + rhs.h }
    }
}

impl Neg for ExpTerm {
    type Output = ExpTerm;
    fn neg(self) -> ExpTerm {
        self.scale(C64::new(-1.0, 0.0))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExpSum(pub Vec<ExpTerm>);

impl ExpSum {
    pub fn eval(&self, z: C64) -> C64 {
        self.0.iter().map(|t| t.eval(z)).sum()
    }

    pub fn dz(&self, z: C64) -> C64 {
        self.0.iter().map(|t| C64::i() * t.k * t.eval(z)).sum()
    }

    pub fn dzbar(&self, z: C64) -> C64 {
        self.0.iter().map(|t| C64::i() * t.h * t.eval(z)).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        ExpSum(self.0.iter().map(|t| t.scale(s)).collect())
    }

    /// Largest `|Im(k z + h z̄)|` over the terms, for overflow screening.
    pub fn max_exponent_im(&self, z: C64) -> f64 {
        self.0
            .iter()
            .map(|t| (t.k * z + t.h * z.conj()).im.abs())
            .fold(0.0, f64::max)
    }
}

/// `f dz + g dz̄` with exponential-sum coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExpForm {
    pub f: ExpSum,
    pub g: ExpSum,
}

impl ExpForm {
    /// `∂_z̄ f − ∂_z g`, exact up to rounding.
    pub fn exactness_defect(&self, z: C64) -> C64 {
        self.f.dzbar(z) - self.g.dz(z)
    }

    /// `max |∂_z̄ f − ∂_z g|` over `points`.
    pub fn exactness_residual(&self, points: &[C64]) -> f64 {
        points
            .iter()
            .map(|&z| self.exactness_defect(z).norm())
            .fold(0.0, f64::max)
    }
}

impl OneForm for ExpForm {
    fn f(&self, z: C64) -> C64 {
        self.f.eval(z)
    }
    fn g(&self, z: C64) -> C64 {
        self.g.eval(z)
    }
}
