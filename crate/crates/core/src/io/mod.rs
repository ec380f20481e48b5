//! Sampling, exporters, audit reports and the command-line front end.

pub mod cli;
pub mod config;
pub mod format;
pub mod grid;
pub mod mesh;
pub mod report;

pub use grid::{sample_surface, SamplingGrid, SurfaceTable};
pub use mesh::{export_obj, MeshData, Projection};
pub use report::{run_audit, AuditEntry, AuditOptions, AuditReport, Verdict};
