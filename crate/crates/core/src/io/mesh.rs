//! Quad meshes of the sampled torus, with OBJ and SVG writers.

use std::collections::HashSet;
use std::io::Write;

use super::format::fmt_sig;
use super::grid::SamplingGrid;
use crate::error::{Error, Result};
use crate::immersion::{closed_form_coordinates, CoordinateOffset, ImmersionPoint};
use crate::torus::TorusSolution;

/// Three distinct coordinate axes (0-based) to keep when dropping to R³.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Projection(pub [usize; 3]);

impl Default for Projection {
    fn default() -> Self {
        Projection([0, 1, 2])
    }
}

impl Projection {
    pub fn apply(&self, p: &ImmersionPoint) -> [f64; 3] {
        let x = p.as_array();
        self.0.map(|i| x[i])
    }

    pub fn label(&self) -> String {
        self.0.iter().map(|i| (i + 1).to_string()).collect()
    }
}

impl std::str::FromStr for Projection {
    type Err = String;
    /// Parses three distinct digits from 1 to 4, e.g. `123` or `134`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let digits: Vec<usize> = s
            .chars()
            .map(|ch| match ch.to_digit(10) {
                Some(d @ 1..=4) => Ok(d as usize - 1),
                _ => Err(format!("projection digits must be 1-4, got {s:?}")),
            })
            .collect::<std::result::Result<_, _>>()?;
        if digits.len() != 3 || digits[0] == digits[1] || digits[0] == digits[2] || digits[1] == digits[2] {
            return Err(format!("projection needs three distinct axes, got {s:?}"));
        }
        Ok(Projection([digits[0], digits[1], digits[2]]))
    }
}

/// Vertices on the sampling grid with doubly wrapped quad faces.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshData {
    pub grid: SamplingGrid,
    pub vertices: Vec<ImmersionPoint>,
    pub faces: Vec<[usize; 4]>,
    pub projection: Projection,
}

impl MeshData {
    pub fn build(sol: &TorusSolution, grid: SamplingGrid, projection: Projection, offset: CoordinateOffset) -> Result<Self> {
        let lattice = sol.params.lattice;
        let vertices = grid
            .points(&lattice)
            .into_iter()
            .map(|z| closed_form_coordinates(sol, z, offset))
            .collect::<Result<Vec<_>>>()?;
        let (nu, nv) = (grid.n_u, grid.n_v);
        let idx = |iu: usize, iv: usize| (iu % nu) * nv + (iv % nv);
        let faces = (0..nu)
            .flat_map(|iu| (0..nv).map(move |iv| (iu, iv)))
            .map(|(iu, iv)| [idx(iu, iv), idx(iu + 1, iv), idx(iu + 1, iv + 1), idx(iu, iv + 1)])
            .collect();
        Ok(MeshData { grid, vertices, faces, projection })
    }

    /// Distinct edges, each identified by the grid node it leaves and its
    /// direction; counts wrapped parallel edges separately on 2-wide grids.
    pub fn edge_count(&self) -> usize {
        let nv = self.grid.n_v;
        let mut edges = HashSet::new();
        for f in &self.faces {
            let (iu, iv) = (f[0] / nv, f[0] % nv);
            let right = ((iu + 1) % self.grid.n_u, iv);
            let up = (iu, (iv + 1) % nv);
            edges.insert(((iu, iv), 'u'));
            edges.insert(((iu, iv), 'v'));
            edges.insert((right, 'v'));
            edges.insert((up, 'u'));
        }
        edges.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edge_count() as i64 + self.faces.len() as i64
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        if self.faces.iter().flatten().any(|&i| i >= n) {
            return Err(Error::InvalidParameter("face references a missing vertex".into()));
        }
        if self.vertices.iter().any(|v| v.as_array().iter().any(|x| !x.is_finite())) {
            return Err(Error::InvalidParameter("mesh has non-finite vertices".into()));
        }
        Ok(())
    }
}

/// Writes `v x y z` lines (9 significant digits) then 1-based `f i j k l`
/// lines. Identical meshes give identical bytes.
pub fn export_obj<W: Write>(mesh: &MeshData, mut out: W) -> Result<()> {
    mesh.validate()?;
    writeln!(
        out,
        "# torus mesh {}x{}, projection {}",
        mesh.grid.n_u,
        mesh.grid.n_v,
        mesh.projection.label()
    )?;
    for v in &mesh.vertices {
        let [x, y, z] = mesh.projection.apply(v);
        writeln!(out, "v {} {} {}", fmt_sig(x, 9), fmt_sig(y, 9), fmt_sig(z, 9))?;
    }
    for f in &mesh.faces {
        writeln!(out, "f {} {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1, f[3] + 1)?;
    }
    out.flush()?;
    Ok(())
}

/// Orthographic SVG of polylines in the plane of two coordinates.
pub fn write_svg<W: Write>(lines: &[Vec<(f64, f64)>], size: f64, mut out: W) -> Result<()> {
    let pts = lines.iter().flatten();
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts.filter(|(x, y)| x.is_finite() && y.is_finite()) {
        (xmin, xmax, ymin, ymax) = (xmin.min(x), xmax.max(x), ymin.min(y), ymax.max(y));
    }
    if !xmin.is_finite() {
        (xmin, xmax, ymin, ymax) = (-1.0, 1.0, -1.0, 1.0);
    }
    let margin = 0.05 * size;
    let span = (xmax - xmin).max(ymax - ymin).max(1e-12);
    let scale = (size - 2.0 * margin) / span;
    let map = |x: f64, y: f64| (margin + (x - xmin) * scale, size - margin - (y - ymin) * scale);
    let s = |v: f64| fmt_sig(v, 9);
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#,
        s(size)
    )?;
    for line in lines {
        let coords: Vec<String> = line
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| {
                let (px, py) = map(x, y);
                format!("{},{}", s(px), s(py))
            })
            .collect();
        if coords.len() >= 2 {
            writeln!(
                out,
                r#"<polyline fill="none" stroke="black" stroke-width="0.5" points="{}"/>"#,
                coords.join(" ")
            )?;
        }
    }
    writeln!(out, "</svg>")?;
    out.flush()?;
    Ok(())
}

/// Grid lines of the mesh (closed loops in both directions) projected onto
/// the coordinate pair `(axes.0, axes.1)`.
pub fn mesh_lines(mesh: &MeshData, axes: (usize, usize)) -> Vec<Vec<(f64, f64)>> {
    let (nu, nv) = (mesh.grid.n_u, mesh.grid.n_v);
    let at = |iu: usize, iv: usize| {
        let x = mesh.vertices[(iu % nu) * nv + iv % nv].as_array();
        (x[axes.0], x[axes.1])
    };
    let mut lines: Vec<Vec<(f64, f64)>> = (0..nu).map(|iu| (0..=nv).map(|iv| at(iu, iv)).collect()).collect();
    lines.extend((0..nv).map(|iv| (0..=nu).map(|iu| at(iu, iv)).collect()));
    lines
}
