//! Sampling of the lattice cell and the per-point surface table.

use std::io::Write;

use serde::Serialize;

use super::format::fmt_sig;
use crate::error::{Error, Result};
use crate::immersion::{closed_form_coordinates, CoordinateOffset, ImmersionPoint};
use crate::spinor::{metric_density, MetricSample};
use crate::torus::{Lattice, TorusSolution};
use crate::C64;

/// `n_u × n_v` samples of the cell `{sΛ₁ + r·iΛ₂ : s, r ∈ [0, 1)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SamplingGrid {
    pub n_u: usize,
    pub n_v: usize,
}

impl SamplingGrid {
    pub fn new(n_u: usize, n_v: usize) -> Result<Self> {
        if n_u < 2 || n_v < 2 {
            return Err(Error::InvalidParameter(format!("grid must be at least 2x2, got {n_u}x{n_v}")));
        }
        Ok(SamplingGrid { n_u, n_v })
    }

    pub fn len(&self) -> usize {
        self.n_u * self.n_v
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Imaginary extent of the cell. A real lattice (`Λ₂ = 0`) has no
    /// second direction, so a unit span is used instead.
    pub fn v_span(lattice: &Lattice) -> (f64, bool) {
        let l2 = lattice.lambda2();
        if l2 == 0.0 {
            (1.0, true)
        } else {
            (l2, false)
        }
    }

    pub fn point(&self, lattice: &Lattice, iu: usize, iv: usize) -> C64 {
        let (span, _) = Self::v_span(lattice);
        C64::new(
            iu as f64 / self.n_u as f64 * lattice.lambda1(),
            iv as f64 / self.n_v as f64 * span,
        )
    }

    /// Grid points in u-major order.
    pub fn points(&self, lattice: &Lattice) -> Vec<C64> {
        (0..self.n_u)
            .flat_map(|iu| (0..self.n_v).map(move |iv| (iu, iv)))
            .map(|(iu, iv)| self.point(lattice, iu, iv))
            .collect()
    }
}

impl std::str::FromStr for SamplingGrid {
    type Err = String;
    /// Parses `NxM`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (u, v) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected NxM, got {s:?}"))?;
        let n_u = u.trim().parse().map_err(|e| format!("bad grid size {u:?}: {e}"))?;
        let n_v = v.trim().parse().map_err(|e| format!("bad grid size {v:?}: {e}"))?;
        SamplingGrid::new(n_u, n_v).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleRow {
    pub iu: usize,
    pub iv: usize,
    pub z: C64,
    pub coords: Option<ImmersionPoint>,
    pub metric: Option<MetricSample>,
    /// Set when the point could not be evaluated (overflow).
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceTable {
    pub grid: SamplingGrid,
    pub unit_v_span: bool,
    pub offset: CoordinateOffset,
    pub rows: Vec<SampleRow>,
}

/// Closed-form coordinates and metric density at every grid point.
/// Points that overflow keep their row, with the error recorded.
pub fn sample_surface(sol: &TorusSolution, grid: SamplingGrid, offset: CoordinateOffset) -> SurfaceTable {
    let lattice = sol.params.lattice;
    let rows = (0..grid.n_u)
        .flat_map(|iu| (0..grid.n_v).map(move |iv| (iu, iv)))
        .map(|(iu, iv)| {
            let z = grid.point(&lattice, iu, iv);
            let evaluated = closed_form_coordinates(sol, z, offset)
                .and_then(|x| Ok((x, metric_density(&sol.doublet1, &sol.doublet2, z)?)));
            match evaluated {
                Ok((x, m)) => SampleRow { iu, iv, z, coords: Some(x), metric: Some(m), error: None },
                Err(e) => SampleRow { iu, iv, z, coords: None, metric: None, error: Some(e.to_string()) },
            }
        })
        .collect();
    SurfaceTable { grid, unit_v_span: SamplingGrid::v_span(&lattice).1, offset, rows }
}

pub const SAMPLE_CSV_HEADER: [&str; 14] = [
    "iu", "iv", "z_re", "z_im", "x1", "x2", "x3", "x4", "r12", "r34", "u1", "u2", "density", "flag",
];

/// Writes the table as CSV: header row, comma separated, LF line endings.
pub fn write_sample_csv<W: Write>(table: &SurfaceTable, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(SAMPLE_CSV_HEADER).map_err(csv_err)?;
    let s = |x: f64| fmt_sig(x, 9);
    for row in &table.rows {
        let mut rec = vec![row.iu.to_string(), row.iv.to_string(), s(row.z.re), s(row.z.im)];
        match (&row.coords, &row.metric) {
            (Some(x), Some(m)) => {
                rec.extend(x.as_array().map(s));
                rec.extend([s(x.r12()), s(x.r34()), s(m.u1), s(m.u2), s(m.density)]);
                rec.push(if table.unit_v_span { "unit_v_span".into() } else { String::new() });
            }
            _ => {
                rec.extend(std::iter::repeat_n(String::new(), 9));
                rec.push("overflow".into());
            }
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::{build_solution, TorusParameters};

    #[test]
    fn grid_parsing_and_bounds() {
        assert_eq!("16x8".parse::<SamplingGrid>().unwrap(), SamplingGrid { n_u: 16, n_v: 8 });
        assert!("1x8".parse::<SamplingGrid>().is_err());
        assert!("16".parse::<SamplingGrid>().is_err());
    }

    #[test]
    fn two_by_two_corners() {
        let lat = Lattice::new(2.0, 3.0).unwrap();
        let pts = SamplingGrid::new(2, 2).unwrap().points(&lat);
        assert_eq!(pts, vec![C64::new(0.0, 0.0), C64::new(0.0, 1.5), C64::new(1.0, 0.0), C64::new(1.0, 1.5)]);
    }

    #[test]
    fn degenerate_solution_table() {
        let sol = build_solution(&TorusParameters { n: 0, ..TorusParameters::default() }).unwrap();
        let t = sample_surface(&sol, SamplingGrid::new(3, 3).unwrap(), CoordinateOffset::FromOrigin);
        assert_eq!(t.rows.len(), 9);
        for r in &t.rows {
            assert_eq!(r.coords.unwrap(), ImmersionPoint::default());
        }
    }

    #[test]
    fn default_table_radii() {
        let sol = build_solution(&TorusParameters::default()).unwrap();
        let t = sample_surface(&sol, SamplingGrid::new(8, 8).unwrap(), CoordinateOffset::None);
        assert_eq!(t.rows.len(), 64);
        assert!(t.unit_v_span);
        for r in &t.rows {
            assert!((r.coords.unwrap().r12() - 4.0).abs() < 1e-10);
        }
        let mut buf = Vec::new();
        write_sample_csv(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 65);
        assert!(!text.contains('\r'));
        assert!(text.starts_with("iu,iv,z_re,z_im,x1,x2,x3,x4,r12,r34,u1,u2,density,flag\n"));
    }

    #[test]
    fn overflow_rows_are_kept() {
        let p = TorusParameters::new(Lattice::new(1.0, 400.0).unwrap(), 2.0, 0.0, 1, C64::new(1.0, 0.0)).unwrap();
        let sol = build_solution(&p).unwrap();
        let t = sample_surface(&sol, SamplingGrid::new(4, 4).unwrap(), CoordinateOffset::None);
        assert_eq!(t.rows.len(), 16);
        assert!(t.rows.iter().any(|r| r.error.is_some()));
        let mut buf = Vec::new();
        write_sample_csv(&t, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().contains("overflow"));
    }
}
