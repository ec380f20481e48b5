//! Adaptive Gauss–Kronrod (7/15) quadrature of complex-valued functions on a
//! real interval. Used by the one-form integrator, one call per path segment.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::C64;

/// Subinterval budget per call before giving up.
pub const DEFAULT_MAX_SUBINTERVALS: usize = 1 << 16;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// 7-point Gauss weights on the odd Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: C64,
    pub error: f64,
    pub subintervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: C64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F>(f: &mut F, lo: f64, hi: f64) -> Result<Panel>
where
    F: FnMut(f64) -> Result<C64>,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut kronrod = C64::new(0.0, 0.0);
    let mut gauss = C64::new(0.0, 0.0);
    for (j, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let nodes: &[f64] = if x == 0.0 { &[0.0] } else { &[-x, x] };
        for &s in nodes {
            let v = f(center + half * s)?;
            kronrod += v * wk;
            if j % 2 == 1 {
                gauss += v * WG[j / 2];
            }
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).norm();
    Ok(Panel { lo, hi, value, error })
}

/// Integrates `f` over `[lo, hi]` until the summed error estimate drops
/// below `tol`, bisecting the worst panel each round.
///
/// `f` may fail (e.g. on overflow); the first failure aborts the integral.
pub fn integrate<F>(mut f: F, lo: f64, hi: f64, tol: f64, max_subintervals: usize) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<C64>,
{
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!("quadrature tolerance must be positive, got {tol}")));
    }
    let mut heap = BinaryHeap::new();
    heap.push(gk15(&mut f, lo, hi)?);
    loop {
        let (value, error) = heap
            .iter()
            .fold((C64::new(0.0, 0.0), 0.0), |(v, e), p| (v + p.value, e + p.error));
        // Below this floor further bisection only reshuffles rounding noise.
        let floor = 64.0 * f64::EPSILON * heap.iter().map(|p| p.value.norm()).sum::<f64>();
        if error <= tol || error <= floor {
            return Ok(QuadResult { value, error, subintervals: heap.len() });
        }
        if heap.len() >= max_subintervals {
            return Err(Error::Quadrature {
                estimate_re: value.re,
                estimate_im: value.im,
                error_bound: error,
            });
        }
        let worst = heap.pop().expect("heap never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        heap.push(gk15(&mut f, worst.lo, mid)?);
        heap.push(gk15(&mut f, mid, worst.hi)?);
    }
}
