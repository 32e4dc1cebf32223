use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("inconsistent dimensions: {0}")]
    Dimension(String),
    #[error("coefficient index outside the declared support: {0}")]
    Support(String),
    #[error("non-hermitian {which}_{n} (‖X − X*‖ = {defect:.3e})")]
    NonHermitian { which: char, n: i64, defect: f64 },
    #[error("singular A_n at n = {n} (smallest singular value {smin:.3e} ≤ {tol:.3e})")]
    SingularA { n: i64, smin: f64, tol: f64 },
    #[error("spectral parameter z = 0 is not allowed")]
    ZeroSpectralParameter,
    #[error("spectral parameter z = {0} is excluded here (z ∈ {{0, ±1}})")]
    ExcludedPoint(Complex64),
    #[error("index {n} outside solution window [{lo}, {hi}]")]
    OutOfWindow { n: i64, lo: i64, hi: i64 },
    #[error("window [{lo}, {hi}] does not cover the required range [{need_lo}, {need_hi}]")]
    WindowTooSmall { lo: i64, hi: i64, need_lo: i64, need_hi: i64 },
    #[error("truncation half width {m} too small (need ≥ {need})")]
    TruncationTooSmall { m: usize, need: usize },
    #[error("Wronskian not constant in n (deviation {deviation:.3e} > {tol:.3e})")]
    ConstancyViolation { deviation: f64, tol: f64 },
    #[error("Wronskian not invertible (smallest singular value {smin:.3e})")]
    SingularWronskian { smin: f64 },
    #[error("α not invertible (smallest singular value {smin:.3e})")]
    SingularAlpha { smin: f64 },
    #[error("rank decision ambiguous: singular value {sigma:.3e} within [0.1, 10]·{thr:.3e}")]
    AmbiguousRank { sigma: f64, thr: f64 },
    #[error("Schur block A(z0) is singular (smallest singular value {smin:.3e})")]
    SingularSchurBlock { smin: f64 },
    #[error("series coefficient beyond the proved degree is not zero: ‖{name}_{{{n},{m}}}‖ = {norm:.3e}")]
    SeriesDegree { name: char, n: i64, m: usize, norm: f64 },
    #[error("invalid radius {0} (need 0 < R < 1)")]
    InvalidRadius(f64),
    #[error("eigenvalue with |z| = {0} is not inside the bound radius")]
    EigenvalueOutsideRadius(f64),
    #[error("zero vector")]
    ZeroVector,
}

impl Error {
    /// Bad input: the instance itself is malformed or violates a hypothesis on the coefficients.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Io { .. }
                | Error::Parse(_)
                | Error::Dimension(_)
                | Error::Support(_)
                | Error::NonHermitian { .. }
                | Error::SingularA { .. }
        )
    }

    /// A numerical hypothesis (invertibility, rank decision) failed at run time.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ConstancyViolation { .. }
                | Error::SingularWronskian { .. }
                | Error::SingularAlpha { .. }
                | Error::AmbiguousRank { .. }
                | Error::SingularSchurBlock { .. }
                | Error::SeriesDegree { .. }
        )
    }
}
