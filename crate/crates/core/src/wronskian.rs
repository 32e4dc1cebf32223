//! Wronskian pairing, the fundamental-system solve and the connection coefficients α±, β±.
//!
//! The pairing never conjugates: a left argument of the form {U_n(z̄)*} is built explicitly by
//! [`adjoint_conjugate_solution`].
//!
//! Connection coefficients follow the convention
//!
//! ```text
//! U∓(z) = U±(z⁻¹) α±(z) + U±(z) β±(z)
//! α±(z) =  W(U±(z̄)*,   U∓(z)) / (±(z⁻¹ − z))
//! β±(z) = −W(U±(z̄⁻¹)*, U∓(z)) / (±(z⁻¹ − z))
//! ```
//!
//! so that the free operator has α± = I, β± = 0 and α±*α± − β±*β± = I on the unit circle.

use num_complex::Complex64;

use crate::block::{self, BlockMatrix2, BlockSequence, OperatorBlock};
use crate::coefficients::CoefficientData;
use crate::error::{Error, Result};
use crate::jost::{jost_recursion, Species, Window};
use crate::tol;

/// W_n(U, V) = U_{n−1} A_{n−1} V_n − U_n A_{n−1} V_{n−1}.
pub fn wronskian_at(c: &CoefficientData, left: &BlockSequence, right: &BlockSequence, n: i64) -> Result<OperatorBlock> {
    let a = c.a(n - 1);
    Ok(left.at(n - 1)? * a * right.at(n)? - left.at(n)? * a * right.at(n - 1)?)
}

/// {U_n(z̄)*} for the Jost solution of the given species.
pub fn adjoint_conjugate_solution(
    c: &CoefficientData,
    species: Species,
    z: Complex64,
    window: Window,
) -> Result<BlockSequence> {
    Ok(jost_recursion(c, species, z.conj(), window)?.blocks().adjoint())
}

/// A Wronskian checked for n-independence.
#[derive(Clone, Debug)]
pub struct WronskianValue {
    pub value: OperatorBlock,
    pub n_checked: Vec<i64>,
    /// Largest pairwise ‖W_n − W_m‖ over `n_checked`.
    pub deviation: f64,
    /// Tolerance the deviation was held to.
    pub tolerance: f64,
}

/// Evaluates W_n on every index of the common window and returns the mean, failing if
/// the values differ by more than `1e−10·max(1, ‖W‖, max_n ‖U_{n−1}‖‖A_{n−1}‖‖V_n‖)`.
pub fn wronskian_constant(c: &CoefficientData, left: &BlockSequence, right: &BlockSequence) -> Result<WronskianValue> {
    wronskian_constant_with_tol(c, left, right, tol::CONSTANCY)
}

pub fn wronskian_constant_with_tol(
    c: &CoefficientData,
    left: &BlockSequence,
    right: &BlockSequence,
    rel: f64,
) -> Result<WronskianValue> {
    let lo = left.lo().max(right.lo()) + 1;
    let hi = left.hi().min(right.hi());
    if hi < lo {
        return Err(Error::WindowTooSmall { lo, hi, need_lo: lo, need_hi: lo + 4 });
    }
    let n_checked: Vec<i64> = (lo..=hi).collect();
    let values = n_checked.iter().map(|&n| wronskian_at(c, left, right, n)).collect::<Result<Vec<_>>>()?;
    let mut mean = block::zeros(c.dim());
    for v in &values {
        mean += v;
    }
    mean /= Complex64::from(values.len() as f64);
    let mut deviation: f64 = 0.0;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            deviation = deviation.max(block::norm(&(&values[i] - &values[j])));
        }
    }
    let term_scale = n_checked
        .iter()
        .map(|&n| block::norm(left.get(n - 1).unwrap()) * block::norm(c.a(n - 1)) * block::norm(right.get(n).unwrap()))
        .fold(0.0, f64::max);
    let tolerance = rel * block::norm(&mean).max(1.0).max(term_scale);
    if deviation > tolerance {
        return Err(Error::ConstancyViolation { deviation, tol: tolerance });
    }
    Ok(WronskianValue { value: mean, n_checked, deviation, tolerance })
}

/// Sequence (τU)_n = A_{n−1}U_{n−1} + B_nU_n + A_nU_{n+1} on the interior of the window.
pub fn apply_tau(c: &CoefficientData, u: &BlockSequence) -> BlockSequence {
    BlockSequence::from_fn(u.lo() + 1, u.hi() - 1, |n| {
        c.a(n - 1) * u.get(n - 1).unwrap() + c.b(n) * u.get(n).unwrap() + c.a(n) * u.get(n + 1).unwrap()
    })
}

/// ‖W_{m+1} − W_n − Σ_{j=n}^{m} [U_j(τV)_j − (τU*)_j* V_j]‖ for arbitrary block sequences.
pub fn green_identity_residual(
    c: &CoefficientData,
    u: &BlockSequence,
    v: &BlockSequence,
    n: i64,
    m: i64,
) -> Result<f64> {
    let tv = apply_tau(c, v);
    let tu = apply_tau(c, &u.adjoint());
    let mut sum = block::zeros(c.dim());
    for j in n..=m {
        sum += u.at(j)? * tv.at(j)? - tu.at(j)?.adjoint() * v.at(j)?;
    }
    let lhs = wronskian_at(c, u, v, m + 1)? - wronskian_at(c, u, v, n)?;
    Ok(block::norm(&(lhs - sum)))
}

fn check_regular(z: Complex64) -> Result<()> {
    if z.norm() == 0.0 {
        return Err(Error::ZeroSpectralParameter);
    }
    if (z - 1.0).norm() < 1e-14 || (z + 1.0).norm() < 1e-14 {
        return Err(Error::ExcludedPoint(z));
    }
    Ok(())
}

/// Smallest window on which all Wronskians of Jost solutions may be evaluated.
pub fn pairing_window(c: &CoefficientData) -> Window {
    Window::new(c.n_min() - 2, c.n_max() + 2)
}

/// α±(z), β±(z).
#[derive(Clone, Debug)]
pub struct ConnectionCoefficients {
    pub z: Complex64,
    pub alpha_plus: OperatorBlock,
    pub beta_plus: OperatorBlock,
    pub alpha_minus: OperatorBlock,
    pub beta_minus: OperatorBlock,
}

impl ConnectionCoefficients {
    pub fn alpha(&self, s: Species) -> &OperatorBlock {
        match s {
            Species::Plus => &self.alpha_plus,
            Species::Minus => &self.alpha_minus,
        }
    }

    pub fn beta(&self, s: Species) -> &OperatorBlock {
        match s {
            Species::Plus => &self.beta_plus,
            Species::Minus => &self.beta_minus,
        }
    }
}

/// Connection coefficients at z ∉ {0, ±1}.
pub fn alpha_beta(c: &CoefficientData, z: Complex64) -> Result<ConnectionCoefficients> {
    check_regular(z)?;
    let w = pairing_window(c);
    let n = c.n_max() + 1;
    let denom = z.inv() - z;
    let mut out = [block::zeros(c.dim()), block::zeros(c.dim()), block::zeros(c.dim()), block::zeros(c.dim())];
    for (k, s) in [Species::Plus, Species::Minus].into_iter().enumerate() {
        let other = jost_recursion(c, s.other(), z, w)?.into_blocks();
        let at_z = adjoint_conjugate_solution(c, s, z, w)?;
        let at_inv = adjoint_conjugate_solution(c, s, z.inv(), w)?;
        let f = (denom * s.sign()).inv();
        out[2 * k] = wronskian_at(c, &at_z, &other, n)? * f;
        out[2 * k + 1] = wronskian_at(c, &at_inv, &other, n)? * (-f);
    }
    let [alpha_plus, beta_plus, alpha_minus, beta_minus] = out;
    Ok(ConnectionCoefficients { z, alpha_plus, beta_plus, alpha_minus, beta_minus })
}

/// Coefficients (P, Q) with V = U±(z) P + U±(z⁻¹) Q.
pub fn fundamental_solve(
    c: &CoefficientData,
    z: Complex64,
    v: &BlockSequence,
    basis: Species,
) -> Result<(OperatorBlock, OperatorBlock)> {
    check_regular(z)?;
    let w = Window::new(v.lo(), v.hi());
    if w.len() < 2 {
        return Err(Error::WindowTooSmall { lo: w.lo, hi: w.hi, need_lo: w.lo, need_hi: w.lo + 1 });
    }
    let n = w.lo + (w.len() as i64) / 2;
    let f = ((z.inv() - z) * basis.sign()).inv();
    let at_inv = adjoint_conjugate_solution(c, basis, z.inv(), w)?;
    let at_z = adjoint_conjugate_solution(c, basis, z, w)?;
    let p = wronskian_at(c, &at_inv, v, n)? * (-f);
    let q = wronskian_at(c, &at_z, v, n)? * f;
    Ok((p, q))
}

/// max_n ‖V_n − U±_n(z)P − U±_n(z⁻¹)Q‖ over the window of V.
pub fn reconstruction_residual(
    c: &CoefficientData,
    z: Complex64,
    v: &BlockSequence,
    basis: Species,
    p: &OperatorBlock,
    q: &OperatorBlock,
) -> Result<f64> {
    let w = Window::new(v.lo(), v.hi());
    let u = jost_recursion(c, basis, z, w)?;
    let ui = jost_recursion(c, basis, z.inv(), w)?;
    let rebuilt = u.map(|n, b| b * p + ui.get(n).unwrap() * q);
    Ok(rebuilt.max_diff(v))
}

/// Pair of solutions {R(z), R̂(z)} used as a fundamental system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisPair {
    /// {U⁺(z), U⁺(z⁻¹)}
    Plus,
    /// {U⁻(z), U⁻(z⁻¹)}
    Minus,
    /// {U⁺(z), U⁻(z)}
    Jost,
}

impl BasisPair {
    /// (species, use z⁻¹) for R and R̂.
    fn members(self) -> [(Species, bool); 2] {
        match self {
            BasisPair::Plus => [(Species::Plus, false), (Species::Plus, true)],
            BasisPair::Minus => [(Species::Minus, false), (Species::Minus, true)],
            BasisPair::Jost => [(Species::Plus, false), (Species::Minus, false)],
        }
    }
}

/// Z_j(z), the matching Y_j(z) = [R_j R̂_j; R_{j+1} R̂_{j+1}] and ‖Z_jY_j − I‖.
#[derive(Clone, Debug)]
pub struct ZOperator {
    pub z_j: BlockMatrix2,
    pub y_j: BlockMatrix2,
    pub left_inverse_residual: f64,
}

pub fn z_operator(c: &CoefficientData, z: Complex64, j: i64, basis: BasisPair) -> Result<ZOperator> {
    check_regular(z)?;
    let w = Window::new(j.min(c.n_min() - 2), (j + 1).max(c.n_max() + 2));
    let arg = |inv: bool, x: Complex64| if inv { x.inv() } else { x };
    let [(sr, ir), (sh, ih)] = basis.members();
    // R(w) is U^{sr}(arg(w)); R(z̄)* is the adjoint of U^{sr}(arg(z̄))
    let r = jost_recursion(c, sr, arg(ir, z), w)?.into_blocks();
    let rh = jost_recursion(c, sh, arg(ih, z), w)?.into_blocks();
    let r_bar = jost_recursion(c, sr, arg(ir, z.conj()), w)?.blocks().adjoint();
    let rh_bar = jost_recursion(c, sh, arg(ih, z.conj()), w)?.blocks().adjoint();
    let n = j + 1;
    let w1 = wronskian_at(c, &rh_bar, &r, n)?;
    let w2 = wronskian_at(c, &r_bar, &rh, n)?;
    let inv = |x: &OperatorBlock| -> Result<OperatorBlock> {
        let smin = block::smallest_singular_value(x);
        block::checked_inverse(x, tol::INV_REL * block::norm(x).max(1.0)).ok_or(Error::SingularWronskian { smin })
    };
    let w1i = inv(&w1)?;
    let w2i = inv(&w2)?;
    let a = c.a(j);
    let z_j = BlockMatrix2::new(
        -(&w1i * rh_bar.at(j + 1)? * a),
        &w1i * rh_bar.at(j)? * a,
        -(&w2i * r_bar.at(j + 1)? * a),
        &w2i * r_bar.at(j)? * a,
    );
    let y_j = BlockMatrix2::new(r.at(j)?.clone(), rh.at(j)?.clone(), r.at(j + 1)?.clone(), rh.at(j + 1)?.clone());
    let left_inverse_residual = z_j.mul(&y_j).distance(&BlockMatrix2::identity(c.dim()));
    Ok(ZOperator { z_j, y_j, left_inverse_residual })
}
