//! Transfer matrix 𝙼(z), scattering matrix 𝚂(z) and the continuous extension of 𝚂 to z = ±1.
//!
//! ```text
//! [U⁻(z), U⁻(z⁻¹)] = [U⁺(z⁻¹), U⁺(z)] 𝙼(z),    𝙼(z) = [α⁺(z) β⁺(z⁻¹); β⁺(z) α⁺(z⁻¹)]
//! [U⁻(z⁻¹), U⁺(z⁻¹)] = [U⁺(z), U⁻(z)] 𝚂(z),    𝚂(z) = [(α⁻)⁻¹ −β⁺(α⁺)⁻¹; −β⁻(α⁻)⁻¹ (α⁺)⁻¹]
//! ```
//!
//! with every coefficient of 𝚂 evaluated at z. The inverse of 𝙼(z) is 𝙼⁻(z⁻¹), where 𝙼⁻ is
//! built from α⁻, β⁻ by the same pattern.

use num_complex::Complex64;

use crate::block::{self, BlockMatrix2, BlockSequence, OperatorBlock};
use crate::coefficients::CoefficientData;
use crate::error::{Error, Result};
use crate::jost::{build_series_data, jost_recursion, series_derivative, Species, Window};
use crate::tol;
use crate::wronskian::{alpha_beta, wronskian_at, ConnectionCoefficients};

/// Connection coefficients with the transfer and scattering matrices at one point of the circle.
#[derive(Clone, Debug)]
pub struct ScatteringData {
    pub z: Complex64,
    pub coefficients: ConnectionCoefficients,
    pub m: BlockMatrix2,
    pub m_reverse: BlockMatrix2,
    pub s: BlockMatrix2,
}

fn transfer_from(at_z: &ConnectionCoefficients, at_inv: &ConnectionCoefficients, s: Species) -> BlockMatrix2 {
    BlockMatrix2::new(at_z.alpha(s).clone(), at_inv.beta(s).clone(), at_z.beta(s).clone(), at_inv.alpha(s).clone())
}

/// 𝙼(z) = [α⁺(z) β⁺(z⁻¹); β⁺(z) α⁺(z⁻¹)].
pub fn transfer_matrix(c: &CoefficientData, z: Complex64) -> Result<BlockMatrix2> {
    Ok(transfer_from(&alpha_beta(c, z)?, &alpha_beta(c, z.inv())?, Species::Plus))
}

/// 𝙼⁻(z) = [α⁻(z) β⁻(z⁻¹); β⁻(z) α⁻(z⁻¹)].
pub fn reverse_transfer_matrix(c: &CoefficientData, z: Complex64) -> Result<BlockMatrix2> {
    Ok(transfer_from(&alpha_beta(c, z)?, &alpha_beta(c, z.inv())?, Species::Minus))
}

fn invert_alpha(a: &OperatorBlock) -> Result<OperatorBlock> {
    let smin = block::smallest_singular_value(a);
    block::checked_inverse(a, tol::INV_REL * block::norm(a).max(1.0)).ok_or(Error::SingularAlpha { smin })
}

fn scattering_from(ab: &ConnectionCoefficients) -> Result<BlockMatrix2> {
    let ap = invert_alpha(&ab.alpha_plus)?;
    let am = invert_alpha(&ab.alpha_minus)?;
    Ok(BlockMatrix2::new(am.clone(), -(&ab.beta_plus * &ap), -(&ab.beta_minus * &am), ap))
}

/// 𝚂(z); fails if α±(z) is numerically singular.
pub fn scattering_matrix(c: &CoefficientData, z: Complex64) -> Result<BlockMatrix2> {
    scattering_from(&alpha_beta(c, z)?)
}

pub fn scattering_data(c: &CoefficientData, z: Complex64) -> Result<ScatteringData> {
    let at_z = alpha_beta(c, z)?;
    let at_inv = alpha_beta(c, z.inv())?;
    let m = transfer_from(&at_z, &at_inv, Species::Plus);
    // 𝙼⁻(z⁻¹) = [α⁻(z⁻¹) β⁻(z); β⁻(z⁻¹) α⁻(z)]
    let m_reverse = transfer_from(&at_inv, &at_z, Species::Minus);
    let s = scattering_from(&at_z)?;
    Ok(ScatteringData { z, coefficients: at_z, m, m_reverse, s })
}

impl ScatteringData {
    /// ‖𝙼(z)𝙼⁻(z⁻¹) − I‖ and ‖𝙼⁻(z⁻¹)𝙼(z) − I‖, the larger of the two.
    pub fn inverse_residual(&self) -> f64 {
        let id = BlockMatrix2::identity(self.m.dim());
        self.m.mul(&self.m_reverse).distance(&id).max(self.m_reverse.mul(&self.m).distance(&id))
    }

    /// max over ± of ‖α*α − β*β − I‖.
    pub fn unitarity_residual(&self) -> f64 {
        let d = self.m.dim();
        [Species::Plus, Species::Minus]
            .iter()
            .map(|&s| {
                let (a, b) = (self.coefficients.alpha(s), self.coefficients.beta(s));
                block::norm(&(a.adjoint() * a - b.adjoint() * b - block::identity(d)))
            })
            .fold(0.0, f64::max)
    }

    /// ‖𝚂*𝚂 − I‖.
    pub fn s_unitarity_residual(&self) -> f64 {
        let s = self.s.to_dense();
        block::norm(&(s.adjoint() * &s - nalgebra::DMatrix::identity(s.nrows(), s.ncols())))
    }
}

/// max_n of the blockwise residual of [X_n, Y_n] − [P_n, Q_n]·K over the window.
fn pair_relation(x: &BlockSequence, y: &BlockSequence, p: &BlockSequence, q: &BlockSequence, k: &BlockMatrix2) -> f64 {
    let mut worst: f64 = 0.0;
    for (n, xn) in x.iter() {
        let (yn, pn, qn) = (y.get(n).unwrap(), p.get(n).unwrap(), q.get(n).unwrap());
        let first = xn - (pn * k.get(0, 0) + qn * k.get(1, 0));
        let second = yn - (pn * k.get(0, 1) + qn * k.get(1, 1));
        worst = worst.max(block::norm(&first)).max(block::norm(&second));
    }
    worst
}

/// Residual of [U⁻(z), U⁻(z⁻¹)] = [U⁺(z⁻¹), U⁺(z)]𝙼, relative to the largest block involved.
pub fn transfer_relation_residual(c: &CoefficientData, z: Complex64, m: &BlockMatrix2, window: Window) -> Result<f64> {
    let um = jost_recursion(c, Species::Minus, z, window)?;
    let umi = jost_recursion(c, Species::Minus, z.inv(), window)?;
    let up = jost_recursion(c, Species::Plus, z, window)?;
    let upi = jost_recursion(c, Species::Plus, z.inv(), window)?;
    let scale = [&um, &umi, &up, &upi].iter().map(|u| u.max_norm()).fold(1.0, f64::max);
    Ok(pair_relation(&um, &umi, &upi, &up, m) / scale)
}

/// Residual of [U⁻(z⁻¹), U⁺(z⁻¹)] = [U⁺(z), U⁻(z)]𝚂, relative to the largest block involved.
pub fn scattering_relation_residual(c: &CoefficientData, z: Complex64, s: &BlockMatrix2, window: Window) -> Result<f64> {
    let um = jost_recursion(c, Species::Minus, z, window)?;
    let umi = jost_recursion(c, Species::Minus, z.inv(), window)?;
    let up = jost_recursion(c, Species::Plus, z, window)?;
    let upi = jost_recursion(c, Species::Plus, z.inv(), window)?;
    let scale = [&um, &umi, &up, &upi].iter().map(|u| u.max_norm()).fold(1.0, f64::max);
    Ok(pair_relation(&umi, &upi, &up, &um, s) / scale)
}

/// max over n past the support of ‖U∓_n(z) − z^{∓n}α±(z) − z^{±n}β±(z)‖.
pub fn asymptotic_residual(c: &CoefficientData, z: Complex64, ab: &ConnectionCoefficients, reach: i64) -> Result<f64> {
    let w = Window::new(c.n_min() - 1 - reach, c.n_max() + 1 + reach);
    let mut worst: f64 = 0.0;
    for s in [Species::Plus, Species::Minus] {
        let u = jost_recursion(c, s.other(), z, w)?;
        let range: Vec<i64> = match s {
            Species::Plus => (c.n_max() + 1..=w.hi).collect(),
            Species::Minus => (w.lo..=c.n_min() - 1).collect(),
        };
        let sg = s.sign() as i32;
        for n in range {
            let expect = ab.alpha(s) * z.powi(-sg * n as i32) + ab.beta(s) * z.powi(sg * n as i32);
            worst = worst.max(block::norm(&(u.get(n).unwrap() - expect)));
        }
    }
    Ok(worst)
}

/// One species of the Schur-complement extension of (α^s)⁻¹ at z0.
#[derive(Clone, Debug)]
pub struct InverseExtension {
    /// W(z0) = W(U^s(z0)*, U^{−s}(z0)).
    pub w0: OperatorBlock,
    /// δW(z0).
    pub dw0: OperatorBlock,
    /// Spread of δW_n(z0) over the window indices.
    pub dw_deviation: f64,
    /// dim ker W(z0).
    pub kernel_rank: usize,
    /// Rank threshold used for the kernel decision.
    pub threshold: f64,
    /// Limit of (α^s(z))⁻¹ as z → z0 along the circle.
    pub alpha_inv: OperatorBlock,
    /// Limit of β^s(z)(α^s(z))⁻¹.
    pub beta_alpha_inv: OperatorBlock,
}

/// The extended 𝚂(z0) at z0 = ±1.
#[derive(Clone, Debug)]
pub struct ScatteringExtension {
    pub z0: f64,
    pub plus: InverseExtension,
    pub minus: InverseExtension,
    pub s: BlockMatrix2,
}

fn extend_species(c: &CoefficientData, species: Species, z0: f64) -> Result<InverseExtension> {
    let d = c.dim();
    let zc = Complex64::new(z0, 0.0);
    let w = Window::new(c.n_min() - 3, c.n_max() + 3);
    let series = build_series_data(c, w)?;
    let u_left = jost_recursion(c, species, zc, w)?.into_blocks();
    let u_right = jost_recursion(c, species.other(), zc, w)?.into_blocks();
    let du_left = series_derivative(&series, species, zc, w)?;
    let du_right = series_derivative(&series, species.other(), zc, w)?;
    let (ul_adj, dul_adj) = (u_left.adjoint(), du_left.adjoint());

    let n0 = c.n_max() + 1;
    let w0 = wronskian_at(c, &ul_adj, &u_right, n0)?;
    let dw_at = |n: i64| -> Result<OperatorBlock> {
        Ok(wronskian_at(c, &ul_adj, &du_right, n)? + wronskian_at(c, &dul_adj, &u_right, n)?)
    };
    let dw0 = dw_at(n0)?;
    let mut dw_deviation: f64 = 0.0;
    for n in w.lo + 1..=w.hi {
        dw_deviation = dw_deviation.max(block::norm(&(dw_at(n)? - &dw0)));
    }

    // rank decision on W(z0)
    let svd = w0.clone().svd(true, true);
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let wnorm = sv.iter().copied().fold(0.0, f64::max);
    let term_scale = u_left.max_norm() * u_right.max_norm();
    let threshold = tol::RANK_REL * wnorm;
    let exact_zero = wnorm <= 1e-14 * term_scale.max(1.0);
    let mut kernel_cols = Vec::new();
    for (i, &s) in sv.iter().enumerate() {
        if exact_zero || s < 0.1 * threshold {
            kernel_cols.push(i);
        } else if s <= 10.0 * threshold {
            return Err(Error::AmbiguousRank { sigma: s, thr: threshold });
        }
    }
    let k = kernel_cols.len();
    let alpha_inv = if k == 0 {
        block::zeros(d)
    } else {
        let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
        let uk = nalgebra::DMatrix::from_fn(d, k, |i, j| u[(i, kernel_cols[j])]);
        let vk = nalgebra::DMatrix::from_fn(d, k, |i, j| vt[(kernel_cols[j], i)].conj());
        // (z − z0)/(±(z⁻¹ − z)) → ∓1/2
        let a = (uk.adjoint() * &dw0 * &vk) * Complex64::from(-species.sign() / 2.0);
        let smin = block::smallest_singular_value(&a);
        let ainv = block::checked_inverse(&a, tol::INV_REL * block::norm(&a).max(1.0))
            .ok_or(Error::SingularSchurBlock { smin })?;
        vk * ainv * uk.adjoint()
    };

    // β^s(α^s)⁻¹ = z0^{±n} U^{−s}_n(z0)(α^s)⁻¹ − I on the free side of U^s
    let n = match species {
        Species::Plus => c.n_max() + 1,
        Species::Minus => c.n_min() - 1,
    };
    let phase = zc.powi((-species.sign() as i32) * n as i32);
    let beta_alpha_inv = u_right.at(n)? * &alpha_inv * phase - block::identity(d);

    Ok(InverseExtension { w0, dw0, dw_deviation, kernel_rank: k, threshold, alpha_inv, beta_alpha_inv })
}

/// Continuous extension of 𝚂 to z0 ∈ {+1, −1} by the Schur-complement procedure.
pub fn scattering_extension(c: &CoefficientData, z0: f64) -> Result<ScatteringExtension> {
    if z0 != 1.0 && z0 != -1.0 {
        return Err(Error::ExcludedPoint(Complex64::new(z0, 0.0)));
    }
    let plus = extend_species(c, Species::Plus, z0)?;
    let minus = extend_species(c, Species::Minus, z0)?;
    let s = BlockMatrix2::new(
        minus.alpha_inv.clone(),
        -plus.beta_alpha_inv.clone(),
        -minus.beta_alpha_inv.clone(),
        plus.alpha_inv.clone(),
    );
    Ok(ScatteringExtension { z0, plus, minus, s })
}

/// Richardson-extrapolated limit of 𝚂(z0 e^{iθ}) from θ = h, h/10, h/100.
pub fn circle_limit(c: &CoefficientData, z0: f64, h: f64) -> Result<BlockMatrix2> {
    let at = |theta: f64| scattering_matrix(c, Complex64::from_polar(1.0, theta) * z0).map(|s| s.to_dense());
    let (s1, s2, s3) = (at(h)?, at(h / 10.0)?, at(h / 100.0)?);
    let r12 = (&s2 * Complex64::from(10.0) - &s1) / Complex64::from(9.0);
    let r23 = (&s3 * Complex64::from(10.0) - &s2) / Complex64::from(9.0);
    let r = (&r23 * Complex64::from(100.0) - &r12) / Complex64::from(99.0);
    Ok(BlockMatrix2::from_dense(&r))
}
