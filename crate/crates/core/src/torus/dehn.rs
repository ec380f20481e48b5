//! `(p, q)` Dehn twists acting on the period lattice, and the behaviour of
//! `p²` under them.

use serde::Serialize;

use super::conditions::twisted_polynomial;
use super::{build_wave_vectors, RealityBranch, TorusParameters};
use crate::error::{Error, Result};
use crate::C64;

/// Lattice rescaling `(Λ₁, Λ₂) → (pΛ₁, qΛ₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DehnTwist {
    pub p: u64,
    pub q: u64,
}

impl DehnTwist {
    pub const IDENTITY: DehnTwist = DehnTwist { p: 1, q: 1 };

    pub fn new(p: u64, q: u64) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::InvalidParameter(format!("twist factors must be >= 1, got ({p},{q})")));
        }
        Ok(DehnTwist { p, q })
    }

    /// Set when `gcd(p, q) ≠ 1`.
    pub fn non_coprime(&self) -> bool {
        gcd(self.p, self.q) != 1
    }

    /// Twist by `self`, then by `next`.
    pub fn then(self, next: DehnTwist) -> Result<DehnTwist> {
        let overflow = || Error::InvalidParameter("twist composition overflows".into());
        Ok(DehnTwist {
            p: self.p.checked_mul(next.p).ok_or_else(overflow)?,
            q: self.q.checked_mul(next.q).ok_or_else(overflow)?,
        })
    }
}

impl std::str::FromStr for DehnTwist {
    type Err = String;
    /// Parses `PxQ`, e.g. `2x1`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (p, q) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("expected PxQ, got {s:?}"))?;
        let p = p.trim().parse::<u64>().map_err(|e| format!("bad p in {s:?}: {e}"))?;
        let q = q.trim().parse::<u64>().map_err(|e| format!("bad q in {s:?}: {e}"))?;
        DehnTwist::new(p, q).map_err(|e| e.to_string())
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Rescales the lattice; every other parameter is left alone.
pub fn dehn_twist(params: &TorusParameters, t: DehnTwist) -> Result<TorusParameters> {
    Ok(TorusParameters { lattice: params.lattice.scaled(t.p, t.q)?, ..*params })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DehnRow {
    pub a: f64,
    pub direct_before: C64,
    pub direct_after: C64,
    pub printed_before: f64,
    pub printed_after: f64,
    /// Direct channel with the winding rescaled to `n·p` after the twist.
    pub direct_after_rescaled: C64,
    /// Printed channel with `n·p` after the twist.
    pub printed_after_rescaled: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DehnReport {
    pub twist: DehnTwist,
    pub non_coprime: bool,
    pub branch: RealityBranch,
    pub rows: Vec<DehnRow>,
    /// `max |p′² − p²|` from recomputed `k₁h₁`, winding unchanged.
    pub max_direct: f64,
    /// `max |p′² − p²|` from the closed-form polynomial, winding unchanged.
    pub max_printed: f64,
    /// Same two maxima with winding `n·p` after the twist.
    pub max_direct_rescaled: f64,
    pub max_printed_rescaled: f64,
    /// `p = q = 1`.
    pub trivial_twist: bool,
    /// `p = q`; the case claimed invariant when the winding equals `p`.
    pub equal_factors: bool,
}

/// Evaluates `p²` before and after the twist for each `a`, through both the
/// recomputed wave vectors and the closed-form polynomial. `b` follows
/// `branch`, recomputed on the twisted lattice.
pub fn dehn_invariance_check(
    params: &TorusParameters,
    t: DehnTwist,
    a_grid: &[f64],
    branch: RealityBranch,
) -> Result<DehnReport> {
    if a_grid.is_empty() {
        return Err(Error::InvalidParameter("Dehn invariance check needs a nonempty a grid".into()));
    }
    let twisted = dehn_twist(params, t)?;
    let n_rescaled = params
        .n
        .checked_mul(t.p as i64)
        .ok_or_else(|| Error::InvalidParameter("winding overflow".into()))?;
    let rescaled = TorusParameters { n: n_rescaled, ..twisted };
    let direct = |p: &TorusParameters, a: f64| {
        let w = build_wave_vectors(&branch.apply(p.with_a(a)));
        w.k1 * w.h1
    };
    let (l1, l2) = (params.lattice.lambda1(), params.lattice.lambda2());
    let rows: Vec<DehnRow> = a_grid
        .iter()
        .map(|&a| DehnRow {
            a,
            direct_before: direct(params, a),
            direct_after: direct(&twisted, a),
            printed_before: twisted_polynomial(params.n, l1, l2, 1, 1, a),
            printed_after: twisted_polynomial(params.n, l1, l2, t.p, t.q, a),
            direct_after_rescaled: direct(&rescaled, a),
            printed_after_rescaled: twisted_polynomial(n_rescaled, l1, l2, t.p, t.q, a),
        })
        .collect();
    let max_of = |f: &dyn Fn(&DehnRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    Ok(DehnReport {
        twist: t,
        non_coprime: t.non_coprime(),
        branch,
        max_direct: max_of(&|r| (r.direct_after - r.direct_before).norm()),
        max_printed: max_of(&|r| (r.printed_after - r.printed_before).abs()),
        max_direct_rescaled: max_of(&|r| (r.direct_after_rescaled - r.direct_before).norm()),
        max_printed_rescaled: max_of(&|r| (r.printed_after_rescaled - r.printed_before).abs()),
        trivial_twist: t == DehnTwist::IDENTITY,
        equal_factors: t.p == t.q,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::Lattice;
    use std::f64::consts::PI;

    fn params(l1: f64, l2: f64, n: i64) -> TorusParameters {
        TorusParameters::new(Lattice::new(l1, l2).unwrap(), 0.2, 0.1, n, C64::new(1.0, 0.0)).unwrap()
    }

    #[test]
    fn identity_twist() {
        let p = params(PI, 1.0, 1);
        assert_eq!(dehn_twist(&p, DehnTwist::IDENTITY).unwrap(), p);
    }

    #[test]
    fn twist_scales_lattice() {
        let t = dehn_twist(&params(PI, 1.0, 1), DehnTwist::new(2, 1).unwrap()).unwrap();
        assert_eq!((t.lattice.lambda1(), t.lattice.lambda2()), (2.0 * PI, 1.0));
        let t = dehn_twist(&params(1.0, 2.0, 1), DehnTwist::new(3, 5).unwrap()).unwrap();
        assert_eq!((t.lattice.lambda1(), t.lattice.lambda2()), (3.0, 10.0));
    }

    #[test]
    fn composition_is_exact() {
        let p = params(0.1, 0.7, 2);
        let (t1, t2) = (DehnTwist::new(3, 2).unwrap(), DehnTwist::new(3, 7).unwrap());
        let seq = dehn_twist(&dehn_twist(&p, t1).unwrap(), t2).unwrap();
        assert_eq!(seq, dehn_twist(&p, t1.then(t2).unwrap()).unwrap());
    }

    #[test]
    fn parsing_and_validation() {
        assert_eq!("2x1".parse::<DehnTwist>().unwrap(), DehnTwist { p: 2, q: 1 });
        assert!("0x1".parse::<DehnTwist>().is_err());
        assert!("2-1".parse::<DehnTwist>().is_err());
        assert!(DehnTwist::new(2, 4).unwrap().non_coprime());
        assert!(!DehnTwist::new(2, 3).unwrap().non_coprime());
    }

    #[test]
    fn identity_twist_report_is_zero() {
        let r = dehn_invariance_check(&params(PI, 1.0, 1), DehnTwist::IDENTITY, &[0.1, 0.2, 0.3], RealityBranch::Plus)
            .unwrap();
        assert_eq!((r.max_direct, r.max_printed), (0.0, 0.0));
        assert!(r.trivial_twist);
    }

    #[test]
    fn unequal_twist_changes_metric() {
        let grid = [0.1, 0.2, 0.3, 0.4, 0.5];
        let r = dehn_invariance_check(&params(PI, 1.0, 1), DehnTwist::new(2, 1).unwrap(), &grid, RealityBranch::Plus)
            .unwrap();
        assert!(r.max_printed > 0.01);
        assert!(r.max_direct > 0.01);
    }

    #[test]
    fn equal_twist_with_rescaled_winding_is_invariant() {
        let grid = [0.1, 0.2, 0.3, 0.4, 0.5];
        let r = dehn_invariance_check(&params(PI, 1.0, 1), DehnTwist::new(2, 2).unwrap(), &grid, RealityBranch::Plus)
            .unwrap();
        assert!(r.max_printed > 0.01);
        assert!(r.max_printed_rescaled < 1e-15);
        assert!(r.max_direct_rescaled < 1e-15);
    }
}
