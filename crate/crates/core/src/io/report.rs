//! The aggregated audit: every condition of the construction evaluated at
//! one parameter set, each reduced to a residual, a tolerance and a verdict.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use super::grid::SamplingGrid;
use crate::error::{Error, Result};
use crate::immersion::{
    closed_form_coordinates, coordinate_forms, integrated_coordinates, trig_rewrite_comparison, radii_audit,
    CoordinateOffset, Section,
};
use crate::spinor::{
    dirac_residual_best_root, dirac_residual_fd, periodicity_check, potential_condition, DiracConvention, Doublet,
};
use crate::torus::conditions::{amplitude_conditions_residual, consistency_residual, metric_polynomial, reality_audit};
use crate::torus::dehn::dehn_invariance_check;
use crate::torus::{build_solution_with_mode, DehnTwist, ExponentMode, RealityBranch, TorusParameters, TorusSolution};
use crate::wirtinger::{exactness_residual, IntegrationPath, DEFAULT_STEP};
use crate::C64;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// Residual within tolerance.
    Pass,
    /// Residual above tolerance.
    Flag,
    /// The check could not produce a finite residual.
    Fail,
    /// A documented comparison; the residual is recorded, nothing is asserted.
    Report,
}

impl Verdict {
    pub fn judge(residual: Option<f64>, tolerance: f64) -> Verdict {
        match residual {
            Some(r) if r.is_finite() && r <= tolerance => Verdict::Pass,
            Some(r) if r.is_finite() => Verdict::Flag,
            _ => Verdict::Fail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditEntry {
    pub check_id: String,
    /// `None` when the check hit a hard numeric error.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub verdict: Verdict,
    /// The claim under test.
    pub paper_anchor: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub detail: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParameterRecord {
    pub lambda1: f64,
    pub lambda2: f64,
    pub base_lambda1: f64,
    pub base_lambda2: f64,
    pub multipliers: (u64, u64),
    pub a: f64,
    pub b: f64,
    pub n: i64,
    pub c: C64,
    pub kappa: f64,
    pub ratio: f64,
}

impl ParameterRecord {
    pub fn new(p: &TorusParameters) -> Self {
        let base = p.lattice.multipliers();
        ParameterRecord {
            lambda1: p.lattice.lambda1(),
            lambda2: p.lattice.lambda2(),
            base_lambda1: p.lattice.lambda1() / base.0 as f64,
            base_lambda2: p.lattice.lambda2() / base.1 as f64,
            multipliers: base,
            a: p.a,
            b: p.b,
            n: p.n,
            c: p.c,
            kappa: p.kappa(),
            ratio: p.ratio(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportHeader {
    pub tool: String,
    pub version: String,
    pub schema_version: String,
    pub parameters: ParameterRecord,
    pub wave_vectors: crate::torus::WaveVectorSet,
    pub amplitudes: BTreeMap<String, C64>,
    pub flags: Vec<crate::torus::ParameterFlag>,
    pub exponent_mode: ExponentMode,
    pub reality_branch: RealityBranch,
    pub convention: DiracConvention,
    /// Readings adopted for ambiguous terms of the construction.
    pub resolutions: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_unix_time: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub header: ReportHeader,
    pub entries: Vec<AuditEntry>,
}

impl AuditReport {
    pub fn entry(&self, check_id: &str) -> Option<&AuditEntry> {
        self.entries.iter().find(|e| e.check_id == check_id)
    }

    pub fn to_json(&self) -> Result<String> {
        super::format::to_json(self).map_err(|e| Error::Io(e.into()))
    }
}

/// Per-check tolerance defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    /// Algebraic identities of the construction.
    pub identity: f64,
    pub periodicity: f64,
    pub exactness: f64,
    /// Closed form versus contour quadrature.
    pub agreement: f64,
    pub radii: f64,
    /// Absolute tolerance handed to the integrator.
    pub quadrature: f64,
    /// Overrides keyed by check id.
    pub overrides: BTreeMap<String, f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            identity: 1e-12,
            periodicity: 1e-10,
            exactness: 1e-10,
            agreement: 1e-6,
            radii: 1e-10,
            quadrature: 1e-10,
            overrides: BTreeMap::new(),
        }
    }
}

impl Tolerances {
    fn for_check(&self, id: &str, default: f64) -> f64 {
        self.overrides.get(id).copied().unwrap_or(default)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditOptions {
    pub convention: DiracConvention,
    pub mode: ExponentMode,
    pub reality_branch: RealityBranch,
    pub twist: Option<DehnTwist>,
    pub tolerances: Tolerances,
    /// Grid whose points serve as evaluation samples.
    pub sample_grid: SamplingGrid,
    /// `t` samples for the radius audit, uniformly in `[0, t_max]`.
    pub radius_samples: usize,
    pub t_max: f64,
    pub section: Section,
    /// Square grid over `[−2, 2]²` for the reality scan.
    pub reality_grid: usize,
    pub polynomial_a: Vec<f64>,
    pub dehn_a: Vec<f64>,
    /// Omit the generation timestamp.
    pub deterministic: bool,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions {
            convention: DiracConvention::B,
            mode: ExponentMode::Shared,
            reality_branch: RealityBranch::Free,
            twist: None,
            tolerances: Tolerances::default(),
            sample_grid: SamplingGrid { n_u: 4, n_v: 4 },
            radius_samples: 200,
            t_max: 4.0 * std::f64::consts::PI,
            section: Section::Half,
            reality_grid: 201,
            polynomial_a: (0..10).map(|i| -0.4 + 0.1 * i as f64).collect(),
            dehn_a: vec![0.1, 0.2, 0.3, 0.4, 0.5],
            deterministic: true,
        }
    }
}

/// Endpoints for the quadrature checks, as fractions of the lattice cell.
const ENDPOINT_FRACTIONS: [(f64, f64); 4] = [(0.3, 0.2), (0.55, 0.7), (0.8, 0.4), (0.15, 0.9)];

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

fn cjson(z: C64) -> Value {
    json!([z.re, z.im])
}

struct Builder<'a> {
    tol: &'a Tolerances,
    entries: Vec<AuditEntry>,
}

impl Builder<'_> {
    fn push(&mut self, id: &str, anchor: &str, default_tol: f64, outcome: Result<(f64, Value)>) {
        self.push_judged(id, anchor, default_tol, outcome, Verdict::judge);
    }

    fn push_judged(
        &mut self,
        id: &str,
        anchor: &str,
        default_tol: f64,
        outcome: Result<(f64, Value)>,
        judge: fn(Option<f64>, f64) -> Verdict,
    ) {
        let tolerance = self.tol.for_check(id, default_tol);
        let (residual, detail, error) = match outcome {
            Ok((r, d)) => (Some(r), d, None),
            Err(e) => (None, Value::Null, Some(e.to_string())),
        };
        self.entries.push(AuditEntry {
            check_id: id.to_owned(),
            residual: residual.filter(|r| r.is_finite()),
            tolerance,
            verdict: judge(residual, tolerance),
            paper_anchor: anchor.to_owned(),
            error,
            detail,
        });
    }
}

fn doublet_periodicity(d: &Doublet, sol: &TorusSolution, pts: &[C64]) -> Result<(f64, Value)> {
    let lat = sol.params.lattice;
    let psi = periodicity_check(&d.psi, &lat, sol.params.n, pts)?;
    let phi = periodicity_check(&d.phi, &lat, sol.params.n, pts)?;
    Ok((
        psi.deviation.max(phi.deviation),
        json!({
            "expected_sign": phi.expected_sign,
            "psi_ratio": cjson(psi.ratio),
            "phi_ratio": cjson(phi.ratio),
            "psi_deviation": psi.deviation,
            "phi_deviation": phi.deviation,
            "ratio_spread": psi.ratio_spread.max(phi.ratio_spread),
        }),
    ))
}

fn dirac_check(d: &Doublet, p_squared: C64, conv: DiracConvention, pts: &[C64]) -> Result<(f64, Value)> {
    let mut worst = 0.0f64;
    let mut fd_gap = 0.0f64;
    let mut root = C64::new(0.0, 0.0);
    for &z in pts {
        let best = dirac_residual_best_root(d, p_squared, z, conv)?;
        let fd = dirac_residual_fd(d, |_| best.p, z, conv, DEFAULT_STEP)?;
        fd_gap = fd_gap.max((fd.0 - best.residual.0).norm().max((fd.1 - best.residual.1).norm()));
        if best.norm >= worst {
            worst = best.norm;
            root = best.p;
        }
    }
    Ok((worst, json!({ "p_squared": cjson(p_squared), "p": cjson(root), "finite_difference_gap": fd_gap })))
}

const COORDS: [&str; 4] = ["x1", "x2", "x3", "x4"];

/// Runs every audit for `params`. Individual failures are recorded in their
/// entry and never abort the report; only invalid parameters error out.
pub fn run_audit(params: &TorusParameters, options: &AuditOptions) -> Result<AuditReport> {
    let params = options.reality_branch.apply(*params);
    let sol = build_solution_with_mode(&params, options.mode)?;
    let tol = &options.tolerances;
    let mut b = Builder { tol, entries: Vec::new() };
    let lattice = params.lattice;
    let pts = options.sample_grid.points(&lattice);
    let (v_span, _) = SamplingGrid::v_span(&lattice);

    // Periodicity.
    b.push(
        "periodicity.doublet1",
        "doublet-1 (anti)periodicity under z -> z + gamma, sign (-1)^n",
        tol.periodicity,
        doublet_periodicity(&sol.doublet1, &sol, &pts),
    );
    b.push(
        "periodicity.doublet2",
        "doublet-2 (anti)periodicity under z -> z + gamma (not stated for the second doublet)",
        tol.periodicity,
        doublet_periodicity(&sol.doublet2, &sol, &pts),
    );

    // Wave-vector consistency.
    let (c1, c2) = consistency_residual(&sol.wvs);
    b.push(
        "consistency",
        "consistency conditions conj(k1) - h2 = h1 + h2, h1 - conj(k2) = conj(k1) + conj(k2)",
        tol.identity,
        Ok((c1.norm().max(c2.norm()), json!({ "first": cjson(c1), "second": cjson(c2) }))),
    );

    // Amplitude conditions.
    let amp = amplitude_conditions_residual(&sol);
    b.push(
        "amplitude.ab1",
        "A1 A2 = 2(k1 + k2), B1 B2 = -2(h1 + h2)",
        tol.identity,
        Ok((amp[0].norm().max(amp[1].norm()), json!({ "a1a2": cjson(amp[0]), "b1b2": cjson(amp[1]) }))),
    );
    b.push(
        "amplitude.ab2",
        "-1/2 conj(B1) A2 = conj(h1) - k2, -1/2 conj(B2) A1 = -(k1 - conj(h2))",
        tol.identity,
        Ok((
            amp[2].norm().max(amp[3].norm()),
            json!({ "first": cjson(amp[2]), "second": cjson(amp[3]) }),
        )),
    );

    // Potential.
    let pot = potential_condition(&sol.wvs);
    b.push(
        "potential.k1h1_vs_k2h2",
        "potential condition p^2 = k1 h1 = k2 h2",
        tol.identity,
        Ok((pot.mismatch.norm(), json!({ "p_squared": cjson(pot.p_squared), "mismatch": cjson(pot.mismatch) }))),
    );

    // Dirac residuals, both conventions, the selected one first.
    let mut conventions = vec![options.convention];
    conventions.extend(DiracConvention::ALL.iter().copied().filter(|c| *c != options.convention));
    for conv in conventions {
        for d in [&sol.doublet1, &sol.doublet2] {
            let id = format!("dirac.{}.doublet{}", conv.label().to_lowercase(), d.index);
            let anchor = match conv {
                DiracConvention::A => "Dirac-like system d_z phi = p phi, d_zbar phi = -p psi",
                DiracConvention::B => "Dirac-like system d_z psi = p phi, d_zbar phi = -p psi",
            };
            b.push(&id, anchor, tol.identity, dirac_check(d, pot.p_squared, conv, &pts));
        }
    }

    // Exactness of the coordinate one-forms.
    let forms = coordinate_forms(&sol);
    let exact: Vec<Option<f64>> = forms
        .iter()
        .map(|w| {
            let r = w.exactness_residual(&pts);
            r.is_finite().then_some(r)
        })
        .collect();
    for (j, w) in forms.iter().enumerate() {
        let fd = exactness_residual(w, &pts, DEFAULT_STEP).ok();
        let outcome = match exact[j] {
            Some(r) => Ok((r, json!({ "finite_difference_residual": fd }))),
            None => Err(Error::Domain { what: "coordinate one-form", re: f64::NAN, im: f64::NAN }),
        };
        b.push(
            &format!("exactness.{}", COORDS[j]),
            "coordinates depend only on the endpoints of the path (closed one-form)",
            tol.exactness,
            outcome,
        );
    }

    // Closed form versus quadrature, two paths per endpoint.
    let endpoints: Vec<C64> = ENDPOINT_FRACTIONS
        .iter()
        .map(|&(s, r)| C64::new(s * lattice.lambda1(), r * v_span))
        .collect();
    let quad: Result<Vec<_>> = endpoints
        .iter()
        .map(|&z| {
            let origin = C64::new(0.0, 0.0);
            let straight = integrated_coordinates(&sol, &IntegrationPath::straight(origin, z)?, tol.quadrature)?;
            let bent = integrated_coordinates(&sol, &IntegrationPath::l_shaped(origin, z)?, tol.quadrature)?;
            let closed = closed_form_coordinates(&sol, z, CoordinateOffset::FromOrigin)?;
            Ok((straight, bent, closed))
        })
        .collect();
    for j in 0..4 {
        let id = format!("quadrature_agreement.{}", COORDS[j]);
        let outcome = quad.as_ref().map_err(clone_err).map(|rows| {
            let mut agree = 0.0f64;
            let mut two_path = 0.0f64;
            let mut imag = 0.0f64;
            for (s, l, c) in rows {
                let (s, l, c) = (s.point.as_array()[j], l.point.as_array()[j], c.as_array()[j]);
                agree = agree.max((s - c).abs());
                two_path = two_path.max((s - l).abs());
            }
            for (s, l, _) in rows {
                imag = imag.max(s.imaginary[j]).max(l.imaginary[j]);
            }
            (
                agree,
                json!({
                    "two_path_disagreement": two_path,
                    "max_imaginary_part": imag,
                    "exactness_residual": exact[j],
                    "endpoints": endpoints.iter().map(|z| cjson(*z)).collect::<Vec<_>>(),
                }),
            )
        });
        b.push(
            &id,
            "u-substitution: x1 = 2Re(u), x2 = -2Im(u), x3 = -2Im(w), x4 = 2Re(w)",
            tol.agreement,
            outcome,
        );
    }

    // Flat-torus radii.
    let ts = linspace(0.0, options.t_max, options.radius_samples);
    let radii = radii_audit(&sol, &ts, options.section);
    for (id, pick) in [("radii.r12", 0usize), ("radii.r34", 1)] {
        let outcome = radii.as_ref().map_err(clone_err).map(|r| {
            let dev = r
                .samples
                .iter()
                .map(|s| (if pick == 0 { s.r12 } else { s.r34 } - 4.0).abs())
                .fold(0.0, f64::max);
            (
                dev,
                json!({
                    "mean": if pick == 0 { r.mean12 } else { r.mean34 },
                    "spread": if pick == 0 { r.spread12 } else { r.spread34 },
                    "max_abs_im_phase": if pick == 0 { r.max_abs_im_eta } else { r.max_abs_im_rho },
                    "rho_equals_eta": r.rho_equals_eta,
                    "max_rho_eta_gap": r.max_rho_eta_gap,
                    "unit_phase_consistent": r.unit_phase_consistent,
                    "samples": r.samples.len(),
                }),
            )
        });
        b.push(id, "flat torus x1^2 + x2^2 = 4, x3^2 + x4^2 = 4", tol.radii, outcome);
    }

    // Trigonometric rewrite in t = z + zbar.
    let rewrite = trig_rewrite_comparison(&sol, &ts, options.section).map(|rows| {
        let diff = rows.iter().flat_map(|r| r.difference).fold(0.0, f64::max);
        let imag = rows.iter().flat_map(|r| r.trig_imag).fold(0.0, f64::max);
        (diff, json!({ "max_trig_imaginary_part": imag }))
    });
    b.push(
        "rewrite.trig_vs_closed",
        "coordinates rewritten as 2cos((k1+k2)t), -2sin((k1+k2)t), -2sin((h1+h2)t), 2cos((h1+h2)t)",
        tol.radii,
        rewrite,
    );

    // Reality of p².
    let grid = linspace(-2.0, 2.0, options.reality_grid);
    let reality = reality_audit(&params, &grid, &grid).map(|r| {
        let off_minus = r
            .zero_locus
            .iter()
            .map(|z| (z.b + params.ratio() * z.a).abs())
            .fold(0.0, f64::max);
        (r, off_minus)
    });
    for (id, anchor, plus) in [
        ("reality.plus_branch", "reality of p^2 enforced by b = (Lambda2/Lambda1) a", true),
        ("reality.minus_branch", "mirrored branch b = -(Lambda2/Lambda1) a", false),
    ] {
        let outcome = reality.as_ref().map_err(clone_err).map(|(r, off_minus)| {
            (
                if plus { r.plus_branch_max } else { r.minus_branch_max },
                json!({
                    "grid_points": r.rows.len(),
                    "zero_crossings": r.zero_locus.len(),
                    "vanishing_columns": r.vanishing_columns,
                    "max_zero_locus_distance_from_minus_branch": off_minus,
                }),
            )
        });
        b.push(id, anchor, tol.identity, outcome);
    }

    // Closed-form polynomial for p² against k1 h1, on both branches.
    for (id, branch) in [("metric_polynomial.plus_branch", RealityBranch::Plus), ("metric_polynomial.minus_branch", RealityBranch::Minus)] {
        let rows: Vec<_> = options.polynomial_a.iter().map(|&a| metric_polynomial(&params, a, branch)).collect();
        let worst = rows.iter().map(|m| m.discrepancy).fold(0.0, f64::max);
        let table: Vec<Value> = rows
            .iter()
            .map(|m| {
                json!({
                    "a": m.a, "b": m.b,
                    "direct": cjson(m.direct),
                    "printed": m.printed,
                    "printed_kappa_leading": m.printed_kappa,
                    "discrepancy": m.discrepancy,
                    "discrepancy_kappa_leading": m.discrepancy_kappa,
                })
            })
            .collect();
        b.push_judged(
            id,
            "p^2 as a polynomial in a: (L2/L1)(1 - (L2/L1)^2) a + (3 (L2/L1)^2 - 1) a^2",
            tol.identity,
            Ok((worst, json!({ "rows": table }))),
            |r, _| if r.is_some_and(f64::is_finite) { Verdict::Report } else { Verdict::Fail },
        );
    }

    // Dehn twist.
    if let Some(t) = options.twist {
        let report = dehn_invariance_check(&params, t, &options.dehn_a, options.reality_branch);
        for (id, printed) in [("dehn.direct", false), ("dehn.printed", true)] {
            let outcome = report.as_ref().map_err(clone_err).map(|r| {
                let rows: Vec<Value> = r
                    .rows
                    .iter()
                    .map(|row| {
                        if printed {
                            json!({ "a": row.a, "before": row.printed_before, "after": row.printed_after,
                                    "after_rescaled_n": row.printed_after_rescaled })
                        } else {
                            json!({ "a": row.a, "before": cjson(row.direct_before), "after": cjson(row.direct_after),
                                    "after_rescaled_n": cjson(row.direct_after_rescaled) })
                        }
                    })
                    .collect();
                (
                    if printed { r.max_printed } else { r.max_direct },
                    json!({
                        "twist": [t.p, t.q],
                        "non_coprime": r.non_coprime,
                        "trivial_twist": r.trivial_twist,
                        "equal_factors": r.equal_factors,
                        "max_discrepancy_rescaled_n": if printed { r.max_printed_rescaled } else { r.max_direct_rescaled },
                        "rows": rows,
                    }),
                )
            });
            b.push(id, "p^2 under (Lambda1, Lambda2) -> (p Lambda1, q Lambda2)", tol.identity, outcome);
        }
    }

    let header = ReportHeader {
        tool: env!("CARGO_PKG_NAME").to_owned(),
        version: env!("CARGO_PKG_VERSION").to_owned(),
        schema_version: SCHEMA_VERSION.to_owned(),
        parameters: ParameterRecord::new(&params),
        wave_vectors: sol.wvs,
        amplitudes: BTreeMap::from([
            ("A1".to_owned(), sol.a1()),
            ("B1".to_owned(), sol.b1()),
            ("A2".to_owned(), sol.a2()),
            ("B2".to_owned(), sol.b2()),
        ]),
        flags: sol.flags.clone(),
        exponent_mode: options.mode,
        reality_branch: options.reality_branch,
        convention: options.convention,
        resolutions: resolutions(options),
        generated_unix_time: if options.deterministic {
            None
        } else {
            std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).ok().map(|d| d.as_secs())
        },
    };
    Ok(AuditReport { header, entries: b.entries })
}

fn resolutions(options: &AuditOptions) -> Vec<String> {
    vec![
        "k2 imaginary part scaled by Lambda2/Lambda1".to_owned(),
        match options.mode {
            ExponentMode::Shared => "phi2 exponent k2 z + h2 zbar (shared with psi2)".to_owned(),
            ExponentMode::StrictPrint => "phi2 exponent k1 z + h2 zbar (strict print)".to_owned(),
        },
        "amplitudes: phi carries A, psi carries B; A1 = C, B1 = -C, A2 = 2(k1+k2)/C, B2 = 2(h1+h2)/C".to_owned(),
        "Dirac residuals for both conventions; p = +/-sqrt(k1 h1), smaller residual kept".to_owned(),
        "closed-form coordinates measured from z = 0; radii use the offset-free form".to_owned(),
        match options.section {
            Section::Half => "real section z = t/2 (t = z + zbar)".to_owned(),
            Section::Full => "real section z = t".to_owned(),
        },
        "p^2 polynomial evaluated with both leading coefficients Lambda2/Lambda1 and n pi/Lambda1".to_owned(),
    ]
}

fn clone_err(e: &Error) -> Error {
    match e {
        Error::Domain { what, re, im } => Error::Domain { what, re: *re, im: *im },
        Error::Overflow { exponent_im, limit } => Error::Overflow { exponent_im: *exponent_im, limit: *limit },
        Error::Quadrature { estimate_re, estimate_im, error_bound } => Error::Quadrature {
            estimate_re: *estimate_re,
            estimate_im: *estimate_im,
            error_bound: *error_bound,
        },
        Error::InvalidParameter(s) => Error::InvalidParameter(s.clone()),
        Error::InvalidPath(s) => Error::InvalidPath(s.clone()),
        Error::Io(io) => Error::Io(std::io::Error::new(io.kind(), io.to_string())),
    }
}
