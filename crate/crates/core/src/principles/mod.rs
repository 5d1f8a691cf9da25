//! Empirical maximum and anti-maximum principle diagnostics.

mod checks;
mod refine;
mod scan;
mod spectral;

pub use checks::*;
pub use refine::{
    assemble_study, mesh_record, normalize_n_list, refinement_study, MeshRecord, RefinementStudy,
    RefinementVerdict, TrackedMargin,
};
pub use scan::{
    classify, mu_grid, scan, scan_with, Classification, PointEvaluation, ScanContext, ScanRecord, ScanReport,
    Thresholds,
};
pub use spectral::{build_spectral_data, spectral_data_for, SpectralData};
