//! Default tolerances.

/// Relative hermiticity tolerance for stored blocks.
pub const HERMITIAN: f64 = 1e-12;
/// A_n is invertible if σ_min(A_n) > INV_REL · σ_max(A_n).
pub const INV_REL: f64 = 1e-10;
/// Relative tolerance for Wronskian constancy.
pub const CONSTANCY: f64 = 1e-10;
/// Series coefficients past the proved degree must be below this.
pub const SERIES_SLACK: f64 = 1e-12;
/// Width of the arcs around z = ±1 excluded from circle grids.
pub const EDGE_BAND: f64 = 0.05;
/// Relative rank threshold for W(z0) in the Schur extension.
pub const RANK_REL: f64 = 1e-8;
/// Distance from 0 and ±1 of the real scan intervals.
pub const SCAN_DELTA: f64 = 1e-3;
/// Default grid points per real interval.
pub const SCAN_GRID: usize = 2000;
/// refine_tol = REFINE_REL · median s_min.
pub const REFINE_REL: f64 = 1e-8;
/// Eigenvalues closer than this in z are merged.
pub const DEDUPE: f64 = 1e-7;
/// Default margin above |λ| = 2 for the truncation oracle.
pub const TRUNCATION_MARGIN: f64 = 1e-6;
