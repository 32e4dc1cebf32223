//! Benchmark fixtures.

use jacobi_scatter::coefficients::{random_instance, RandomSpec};
use jacobi_scatter::{CoefficientData, Complex64};

/// Seeded instance with the given block dimension and support width exactly `width`.
pub fn instance(dim: usize, width: usize) -> CoefficientData {
    let spec = RandomSpec { dim, max_width: width, ..Default::default() };
    (0..)
        .map(|seed| random_instance(&spec, seed))
        .find(|c| (c.n_max() - c.n_min() + 1) as usize == width)
        .expect("generator reaches every width")
}

pub fn circle_point() -> Complex64 {
    Complex64::from_polar(1.0, 0.9)
}
