//! Complex-plane calculus: Wirtinger derivatives by central differences,
//! polygonal integration paths and quadrature of one-forms `f dz + g dz̄`.

use crate::error::{Error, Result};
use crate::quadrature::{self, DEFAULT_MAX_SUBINTERVALS};
use crate::C64;

/// Default finite-difference step, in lattice units.
pub const DEFAULT_STEP: f64 = 1e-5;

/// Partial derivatives `(∂_x f, ∂_y f)` from the four-point central stencil.
fn central_partials<F>(f: F, z: C64, h: f64) -> Result<(C64, C64)>
where
    F: Fn(C64) -> C64,
{
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::InvalidParameter(format!("finite-difference step must be positive, got {h}")));
    }
    let dx = C64::new(h, 0.0);
    let dy = C64::new(0.0, h);
    let stencil = [f(z + dx), f(z - dx), f(z + dy), f(z - dy)];
    if stencil.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain { what: "finite-difference stencil", re: z.re, im: z.im });
    }
    let inv = 0.5 / h;
    Ok(((stencil[0] - stencil[1]) * inv, (stencil[2] - stencil[3]) * inv))
}

/// `∂_z f = ½(∂_x − i∂_y) f`, second-order accurate in `h`.
pub fn wirtinger_dz<F>(f: F, z: C64, h: f64) -> Result<C64>
where
    F: Fn(C64) -> C64,
{
    let (fx, fy) = central_partials(f, z, h)?;
    Ok((fx - C64::i() * fy) * 0.5)
}

/// `∂_z̄ f = ½(∂_x + i∂_y) f`, second-order accurate in `h`.
pub fn wirtinger_dzbar<F>(f: F, z: C64, h: f64) -> Result<C64>
where
    F: Fn(C64) -> C64,
{
    let (fx, fy) = central_partials(f, z, h)?;
    Ok((fx + C64::i() * fy) * 0.5)
}

/// A piecewise-linear curve in the complex plane.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationPath {
    vertices: Vec<C64>,
}

impl IntegrationPath {
    pub fn new(vertices: Vec<C64>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidPath(format!("need at least 2 vertices, got {}", vertices.len())));
        }
        if let Some(v) = vertices.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidPath(format!("non-finite vertex {v}")));
        }
        if let Some(i) = vertices.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::InvalidPath(format!("vertices {i} and {} coincide", i + 1)));
        }
        Ok(IntegrationPath { vertices })
    }

    pub fn straight(from: C64, to: C64) -> Result<Self> {
        Self::new(vec![from, to])
    }

    /// Horizontal leg first, then vertical. Collapses to a straight segment
    /// when the endpoints share a real or imaginary part.
    pub fn l_shaped(from: C64, to: C64) -> Result<Self> {
        let corner = C64::new(to.re, from.im);
        if corner == from || corner == to {
            Self::straight(from, to)
        } else {
            Self::new(vec![from, corner, to])
        }
    }

    pub fn vertices(&self) -> &[C64] {
        &self.vertices
    }

    pub fn start(&self) -> C64 {
        self.vertices[0]
    }

    pub fn end(&self) -> C64 {
        *self.vertices.last().expect("at least two vertices")
    }

    pub fn reversed(&self) -> Self {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        IntegrationPath { vertices }
    }

    pub fn segments(&self) -> impl Iterator<Item = (C64, C64)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| (b - a).norm()).sum()
    }
}

/// A complex one-form `f dz + g dz̄`.
pub trait OneForm {
    /// Coefficient of `dz`.
    fn f(&self, z: C64) -> C64;
    /// Coefficient of `dz̄`.
    fn g(&self, z: C64) -> C64;
}

/// One-form assembled from two closures.
#[derive(Clone, Copy)]
pub struct FnForm<F, G> {
    pub f: F,
    pub g: G,
}

impl<F, G> FnForm<F, G>
where
    F: Fn(C64) -> C64,
    G: Fn(C64) -> C64,
{
    pub fn new(f: F, g: G) -> Self {
        FnForm { f, g }
    }
}

impl<F, G> OneForm for FnForm<F, G>
where
    F: Fn(C64) -> C64,
    G: Fn(C64) -> C64,
{
    fn f(&self, z: C64) -> C64 {
        (self.f)(z)
    }
    fn g(&self, z: C64) -> C64 {
        (self.g)(z)
    }
}

impl<T: OneForm + ?Sized> OneForm for &T {
    fn f(&self, z: C64) -> C64 {
        (**self).f(z)
    }
    fn g(&self, z: C64) -> C64 {
        (**self).g(z)
    }
}

/// `∫_Γ f dz + g dz̄` by adaptive Gauss–Kronrod on each segment.
///
/// The tolerance is split evenly across segments, so the summed error
/// estimate stays below `tol`.
pub fn integrate_one_form<W: OneForm + ?Sized>(form: &W, path: &IntegrationPath, tol: f64) -> Result<C64> {
    integrate_one_form_with_budget(form, path, tol, DEFAULT_MAX_SUBINTERVALS)
}

pub fn integrate_one_form_with_budget<W: OneForm + ?Sized>(
    form: &W,
    path: &IntegrationPath,
    tol: f64,
    max_subintervals: usize,
) -> Result<C64> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let n_seg = path.vertices.len() - 1;
    let seg_tol = tol / n_seg as f64;
    let mut total = C64::new(0.0, 0.0);
    for (a, b) in path.segments() {
        let delta = b - a;
        let integrand = |t: f64| {
            let z = a + delta * t;
            let v = form.f(z) * delta + form.g(z) * delta.conj();
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Domain { what: "one-form integrand", re: z.re, im: z.im })
            }
        };
        total += quadrature::integrate(integrand, 0.0, 1.0, seg_tol, max_subintervals)?.value;
    }
    Ok(total)
}

/// `max |∂_z̄ f − ∂_z g|` over `points`, by central differences with step `h`.
/// Zero exactly when the form is closed, i.e. path-independent.
pub fn exactness_residual<W: OneForm + ?Sized>(form: &W, points: &[C64], h: f64) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::InvalidParameter("exactness residual needs at least one point".into()));
    }
    let mut worst = 0.0f64;
    for &z in points {
        let df = wirtinger_dzbar(|w| form.f(w), z, h)?;
        let dg = wirtinger_dz(|w| form.g(w), z, h)?;
        worst = worst.max((df - dg).norm());
    }
    Ok(worst)
}
