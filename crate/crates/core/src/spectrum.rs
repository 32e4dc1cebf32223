//! Discrete spectrum by three independent methods, eigenvalue bounds and vector promotion.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::block::{self, BlockSequence, OperatorBlock};
use crate::coefficients::{zhukovsky_inverse, CoefficientData};
use crate::error::{Error, Result};
use crate::jost::{jost_minus_recursion, Window};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    WronskianScan,
    Truncation,
    Determinant,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::WronskianScan => "wronskian_scan",
            Method::Truncation => "truncation",
            Method::Determinant => "determinant",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenvalueItem {
    pub z: f64,
    pub lambda: f64,
    pub multiplicity: usize,
    pub residual: f64,
}

impl EigenvalueItem {
    fn at(z: f64, multiplicity: usize, residual: f64) -> Self {
        EigenvalueItem { z, lambda: z + 1.0 / z, multiplicity, residual }
    }
}

#[derive(Clone, Debug)]
pub struct EigenvalueReport {
    pub method: Method,
    /// Sorted by λ.
    pub items: Vec<EigenvalueItem>,
    /// Truncation only: largest change of a reported eigenvalue when M doubles.
    pub convergence: Option<f64>,
}

impl EigenvalueReport {
    fn new(method: Method, mut items: Vec<EigenvalueItem>) -> Self {
        items.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
        let mut merged: Vec<EigenvalueItem> = Vec::with_capacity(items.len());
        for it in items {
            match merged.last_mut() {
                Some(last) if (last.z - it.z).abs() < tol::DEDUPE => {
                    if it.residual < last.residual {
                        *last = EigenvalueItem { multiplicity: last.multiplicity.max(it.multiplicity), ..it };
                    } else {
                        last.multiplicity = last.multiplicity.max(it.multiplicity);
                    }
                }
                _ => merged.push(it),
            }
        }
        EigenvalueReport { method, items: merged, convergence: None }
    }

    /// Total count with multiplicity.
    pub fn count(&self) -> usize {
        self.items.iter().map(|i| i.multiplicity).sum()
    }

    /// Items with |z| < radius.
    pub fn within(&self, radius: f64) -> EigenvalueReport {
        EigenvalueReport {
            method: self.method,
            items: self.items.iter().copied().filter(|i| i.z.abs() < radius).collect(),
            convergence: self.convergence,
        }
    }
}

/// Count and position agreement of two reports.
#[derive(Clone, Copy, Debug)]
pub struct Agreement {
    pub same_count: bool,
    pub same_multiplicities: bool,
    /// max |Δz| over matched items (items matched in λ order); infinite on count mismatch.
    pub max_z_diff: f64,
}

pub fn compare_reports(a: &EigenvalueReport, b: &EigenvalueReport) -> Agreement {
    if a.items.len() != b.items.len() {
        return Agreement { same_count: false, same_multiplicities: false, max_z_diff: f64::INFINITY };
    }
    let max_z_diff = a.items.iter().zip(&b.items).map(|(x, y)| (x.z - y.z).abs()).fold(0.0, f64::max);
    let same_multiplicities = a.items.iter().zip(&b.items).all(|(x, y)| x.multiplicity == y.multiplicity);
    Agreement { same_count: true, same_multiplicities, max_z_diff }
}

fn scan_grid(grid_size: usize) -> Vec<Vec<f64>> {
    let n = grid_size.max(3);
    let d = tol::SCAN_DELTA;
    [(-1.0 + d, -d), (d, 1.0 - d)]
        .iter()
        .map(|&(a, b)| (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect())
        .collect()
}

fn golden_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, width: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > width {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        x1
    } else {
        x2
    }
}

fn local_minima(values: &[f64]) -> Vec<usize> {
    let n = values.len();
    (0..n)
        .filter(|&k| {
            let left = k == 0 || values[k] <= values[k - 1];
            let right = k + 1 == n || values[k] <= values[k + 1];
            left && right
        })
        .collect()
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    if n == 0 {
        0.0
    } else if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// W(U⁺(z)*, U⁻(z)) for real z, evaluated at n = n_max + 2 where U⁺ is free.
pub fn jost_wronskian_real(c: &CoefficientData, z: f64) -> Result<OperatorBlock> {
    let n = c.n_max() + 2;
    let zc = Complex64::new(z, 0.0);
    let um = jost_minus_recursion(c, zc, Window::new(c.n_min() - 2, n))?;
    Ok((um.at(n)? - um.at(n - 1)? * zc) * zc.powi((n - 1) as i32))
}

/// Singular values (ascending) of W(U⁺(z)*, U⁻(z)) divided by |z|^{n−1} max(‖U⁻_{n−1}‖, ‖U⁻_n‖).
pub fn normalized_wronskian_singular_values(c: &CoefficientData, z: f64) -> Vec<f64> {
    let n = c.n_max() + 2;
    let zc = Complex64::new(z, 0.0);
    let um = jost_minus_recursion(c, zc, Window::new(n - 1, n)).expect("z ≠ 0 on the scan grid");
    let (a, b) = (um.get(n - 1).unwrap(), um.get(n).unwrap());
    let scale = block::norm(a).max(block::norm(b)).max(f64::MIN_POSITIVE);
    let mut s = block::singular_values(&((b - a * zc) / Complex64::from(scale)));
    s.reverse();
    s
}

/// Eigenvalues from zeros of the smallest singular value of W(U⁺(z)*, U⁻(z)) on real z.
///
/// `refine_rel` sets refine_tol = refine_rel · median(s_min over the grid).
pub fn wronskian_scan(c: &CoefficientData, grid_size: usize, refine_rel: f64) -> EigenvalueReport {
    let smin = |z: f64| normalized_wronskian_singular_values(c, z)[0];
    let grids = scan_grid(grid_size);
    let values: Vec<Vec<f64>> = grids.iter().map(|g| g.iter().map(|&z| smin(z)).collect()).collect();
    let mut all: Vec<f64> = values.iter().flatten().copied().collect();
    let refine_tol = refine_rel * median(&mut all);
    let mut items = Vec::new();
    for (g, v) in grids.iter().zip(&values) {
        for k in local_minima(v) {
            let a = g[k.saturating_sub(1)];
            let b = g[(k + 1).min(g.len() - 1)];
            let z = golden_min(&smin, a, b, 1e-13);
            let s = normalized_wronskian_singular_values(c, z);
            if s[0] <= refine_tol {
                let mult = s.iter().filter(|&&x| x < 1e3 * refine_tol).count();
                items.push(EigenvalueItem::at(z, mult, s[0]));
            }
        }
    }
    EigenvalueReport::new(Method::WronskianScan, items)
}

fn min_truncation(c: &CoefficientData) -> usize {
    c.min_half_width() - 1 + 20
}

/// Number of eigenvalues of the M-truncation strictly below x (block LDL* inertia).
pub fn count_eigenvalues_below(c: &CoefficientData, half_width: usize, x: f64) -> usize {
    let mut shift = x;
    for k in 1.. {
        if let Some(n) = inertia_below(c, half_width, shift) {
            return n;
        }
        shift = x - k as f64 * 4.0 * f64::EPSILON * x.abs().max(1.0);
    }
    unreachable!()
}

fn inertia_below(c: &CoefficientData, half_width: usize, x: f64) -> Option<usize> {
    let d = c.dim();
    let m = half_width as i64;
    let shift = block::scaled_identity(d, Complex64::new(x, 0.0));
    let mut count = 0;
    let mut prev: Option<(OperatorBlock, i64)> = None;
    for n in -m..=m {
        let mut dn = c.b(n) - &shift;
        if let Some((dinv, p)) = &prev {
            let a = c.a(*p);
            dn -= a.adjoint() * dinv * a;
        }
        let dn = (&dn + dn.adjoint()) * Complex64::from(0.5);
        let ev = dn.symmetric_eigenvalues();
        if ev.iter().any(|&e| e == 0.0) {
            return None;
        }
        count += ev.iter().filter(|&&e| e < 0.0).count();
        prev = Some((dn.try_inverse()?, n));
    }
    Some(count)
}

/// k-th smallest eigenvalue (0-based) of the M-truncation by bisection on the inertia count.
pub fn kth_eigenvalue(c: &CoefficientData, half_width: usize, k: usize) -> f64 {
    let bound = c.perturbation_range().map(|n| 2.0 * block::norm(c.a(n)) + block::norm(c.b(n))).fold(2.0, f64::max) + 1.0;
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_eigenvalues_below(c, half_width, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Eigenvalues of the Dirichlet truncation with |λ| > 2 + margin; convergence from the 2M truncation.
pub fn truncation_eigen(c: &CoefficientData, half_width: usize, margin: f64) -> Result<EigenvalueReport> {
    let need = min_truncation(c);
    if half_width < need {
        return Err(Error::TruncationTooSmall { m: half_width, need });
    }
    let j = c.truncated_matrix(half_width)?;
    let size = j.nrows();
    let mut ev: Vec<f64> = j.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    let outer: Vec<usize> = (0..size).filter(|&i| ev[i].abs() > 2.0 + margin).collect();

    let size2 = (4 * half_width + 1) * c.dim();
    let mut convergence: f64 = 0.0;
    for &i in &outer {
        // match the i-th eigenvalue from the nearer end of the spectrum
        let k2 = if ev[i] > 0.0 { size2 - (size - i) } else { i };
        convergence = convergence.max((kth_eigenvalue(c, 2 * half_width, k2) - ev[i]).abs());
    }

    let mut items = Vec::new();
    let mut k = 0;
    while k < outer.len() {
        let mut group = vec![ev[outer[k]]];
        while k + 1 < outer.len() && (ev[outer[k + 1]] - ev[outer[k]]).abs() < 1e-7 * ev[outer[k]].abs() {
            k += 1;
            group.push(ev[outer[k]]);
        }
        let lambda = group.iter().sum::<f64>() / group.len() as f64;
        let spread = group.iter().map(|g| (g - lambda).abs()).fold(0.0, f64::max);
        let z = zhukovsky_inverse(Complex64::new(lambda, 0.0)).z.re;
        items.push(EigenvalueItem { z, lambda: z + 1.0 / z, multiplicity: group.len(), residual: spread });
        k += 1;
    }
    let mut report = EigenvalueReport::new(Method::Truncation, items);
    report.convergence = Some(convergence);
    Ok(report)
}

/// Interior eigenvalues λ ∈ (−2 + band, 2 − band) of the M-truncation whose eigenvectors keep
/// at least half their mass within 10 sites of the support and that still appear (within 1e−6)
/// in the 2M-truncation.
pub fn persistent_interior_eigenvalues(c: &CoefficientData, half_width: usize, band: f64) -> Result<Vec<f64>> {
    let j = c.truncated_matrix(half_width)?;
    let eig = j.symmetric_eigen();
    let d = c.dim();
    let m = half_width as i64;
    let (lo, hi) = (c.n_min() - 10, c.n_max() + 10);
    let mut out = Vec::new();
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda.abs() >= 2.0 - band {
            continue;
        }
        let v = eig.eigenvectors.column(i);
        let mut core = 0.0;
        for n in lo.max(-m)..=hi.min(m) {
            let r = ((n + m) as usize) * d;
            core += v.rows(r, d).norm_squared();
        }
        if core < 0.5 * v.norm_squared() {
            continue;
        }
        let below = count_eigenvalues_below(c, 2 * half_width, lambda - 1e-6);
        let upto = count_eigenvalues_below(c, 2 * half_width, lambda + 1e-6);
        if upto > below {
            out.push(lambda);
        }
    }
    Ok(out)
}

/// Free resolvent kernel (𝒥₀ − λ)⁻¹(n, m) = z/(z² − 1) z^{|n−m|}, λ = z + z⁻¹.
pub fn free_resolvent_kernel(z: Complex64, n: i64, m: i64) -> Complex64 {
    z / (z * z - 1.0) * z.powi((n - m).unsigned_abs() as i32)
}

/// max |((𝒥₀ − λ)G − I)(n, m)| over rows |n| < M of a scalar truncation to [−M, M].
pub fn resolvent_kernel_residual(z: Complex64, half_width: usize) -> f64 {
    let m = half_width as i64;
    let lambda = z + z.inv();
    let mut worst: f64 = 0.0;
    for n in -m + 1..m {
        for k in -m..=m {
            let g = |r: i64| free_resolvent_kernel(z, r, k);
            let v = g(n - 1) + g(n + 1) - lambda * g(n) - if n == k { 1.0 } else { 0.0 };
            worst = worst.max(v.norm());
        }
    }
    worst
}

/// I + GV on the index block [n_min − 1, n_max + 1].
pub fn bs_matrix(c: &CoefficientData, z: Complex64) -> Result<DMatrix<Complex64>> {
    if z.norm() == 0.0 {
        return Err(Error::ZeroSpectralParameter);
    }
    if (z - 1.0).norm() < 1e-14 || (z + 1.0).norm() < 1e-14 {
        return Err(Error::ExcludedPoint(z));
    }
    let d = c.dim();
    let (lo, hi) = (c.n_min() - 1, c.n_max() + 1);
    let len = (hi - lo + 1) as usize;
    let eye = block::identity(d);
    let mut v = DMatrix::zeros(len * d, len * d);
    for n in lo..=hi {
        let r = ((n - lo) as usize) * d;
        v.view_mut((r, r), (d, d)).copy_from(c.b(n));
        if n < hi {
            let off = c.a(n) - &eye;
            v.view_mut((r, r + d), (d, d)).copy_from(&off);
            v.view_mut((r + d, r), (d, d)).copy_from(&off.adjoint());
        }
    }
    let g = DMatrix::from_fn(len * d, len * d, |i, j| {
        if i % d == j % d {
            free_resolvent_kernel(z, (i / d) as i64, (j / d) as i64)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(DMatrix::identity(len * d, len * d) + g * v)
}

/// f(z) = det(I + (𝒥₀ − λ)⁻¹ V).
pub fn bs_determinant(c: &CoefficientData, z: Complex64) -> Result<Complex64> {
    Ok(bs_matrix(c, z)?.determinant())
}

/// Real zeros of f on (−1, 0) ∪ (0, 1): sign changes (multiplicity 1) and touching zeros (multiplicity 2).
pub fn bs_zero_scan(c: &CoefficientData, grid_size: usize) -> EigenvalueReport {
    let f = |z: f64| bs_determinant(c, Complex64::new(z, 0.0)).expect("z on the scan grid").re;
    let grids = scan_grid(grid_size);
    let values: Vec<Vec<f64>> = grids.iter().map(|g| g.iter().map(|&z| f(z)).collect()).collect();
    let mut abs_all: Vec<f64> = values.iter().flatten().map(|v| v.abs()).collect();
    let touch_tol = 1e-8 * median(&mut abs_all);
    let mut items = Vec::new();
    for (g, v) in grids.iter().zip(&values) {
        for k in 0..g.len() - 1 {
            if v[k] == 0.0 {
                items.push(EigenvalueItem::at(g[k], 1, 0.0));
                continue;
            }
            if v[k] * v[k + 1] < 0.0 {
                let (mut a, mut b, mut fa) = (g[k], g[k + 1], v[k]);
                while b - a > 1e-15 * b.abs().max(1e-3) {
                    let mid = 0.5 * (a + b);
                    if mid <= a || mid >= b {
                        break;
                    }
                    let fm = f(mid);
                    if fm == 0.0 {
                        a = mid;
                        b = mid;
                        break;
                    }
                    if fa * fm < 0.0 {
                        b = mid;
                    } else {
                        a = mid;
                        fa = fm;
                    }
                }
                let z = 0.5 * (a + b);
                items.push(EigenvalueItem::at(z, 1, f(z).abs()));
            }
        }
        let absv: Vec<f64> = v.iter().map(|x| x.abs()).collect();
        for k in local_minima(&absv) {
            let lo = k.saturating_sub(1);
            let hi = (k + 1).min(g.len() - 1);
            if v[lo] * v[hi] < 0.0 || v[lo] * v[k] < 0.0 || v[k] * v[hi] < 0.0 {
                continue;
            }
            let z = golden_min(&|x| f(x).abs(), g[lo], g[hi], 1e-13);
            let fz = f(z).abs();
            if fz <= touch_tol {
                items.push(EigenvalueItem::at(z, 2, fz));
            }
        }
    }
    EigenvalueReport::new(Method::Determinant, items)
}

/// max over eigenvalues of ‖(𝒥_M − λ)u‖/‖u‖ with u_n = U⁻_n(z)w, w a null vector of W(U⁺(z)*, U⁻(z)),
/// continued as u_n = z^{n−n_max−1} u_{n_max+1} to the right of the support.
pub fn eigenvector_residual(c: &CoefficientData, z: f64, half_width: usize) -> Result<f64> {
    let d = c.dim();
    let zc = Complex64::new(z, 0.0);
    let lambda = zc + zc.inv();
    let wr = jost_wronskian_real(c, z)?;
    let svd = wr.svd(false, true);
    let k = svd.singular_values.imin();
    let vt = svd.v_t.unwrap();
    let w = DVector::from_fn(d, |i, _| vt[(k, i)].conj());
    let m = half_width as i64;
    let join = c.n_max() + 1;
    let um = jost_minus_recursion(c, zc, Window::new(-m, join))?;
    let u: Vec<DVector<Complex64>> = (-m..=m)
        .map(|n| {
            if n <= join {
                um.get(n).unwrap() * &w
            } else {
                um.get(join).unwrap() * &w * zc.powi((n - join) as i32)
            }
        })
        .collect();
    let zero = DVector::zeros(d);
    let at = |n: i64| if n < -m || n > m { &zero } else { &u[(n + m) as usize] };
    let mut num = 0.0;
    let mut den = 0.0;
    for n in -m..=m {
        let mut r = c.b(n) * at(n) - at(n) * lambda;
        if n > -m {
            r += c.a(n - 1) * at(n - 1);
        }
        if n < m {
            r += c.a(n) * at(n + 1);
        }
        num += r.norm_squared();
        den += at(n).norm_squared();
    }
    Ok((num / den).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenvalueBounds {
    pub radius: f64,
    pub inner_radius: f64,
    /// Π_{|z_j|<R} R/|z_j| with multiplicity.
    pub product_lhs: f64,
    /// exp(|R/(1 − R²)| · trace_norm_budget).
    pub product_rhs: f64,
    pub holds: bool,
    /// Number of eigenvalues (with multiplicity) with |z_j| < r.
    pub count_lhs: f64,
    /// ln(product_rhs)/ln(R/r).
    pub count_rhs: f64,
}

/// Product bound and its two-radius count consequence; every item must satisfy |z_j| < R.
pub fn eigenvalue_bounds(c: &CoefficientData, radius: f64, inner_radius: f64, report: &EigenvalueReport) -> Result<EigenvalueBounds> {
    if !(radius > 0.0 && radius < 1.0) {
        return Err(Error::InvalidRadius(radius));
    }
    if !(inner_radius > 0.0 && inner_radius < radius) {
        return Err(Error::InvalidRadius(inner_radius));
    }
    let mut product_lhs = 1.0;
    let mut count_lhs = 0.0;
    for it in &report.items {
        if it.z.abs() >= radius {
            return Err(Error::EigenvalueOutsideRadius(it.z.abs()));
        }
        product_lhs *= (radius / it.z.abs()).powi(it.multiplicity as i32);
        if it.z.abs() < inner_radius {
            count_lhs += it.multiplicity as f64;
        }
    }
    let log_rhs = (radius / (1.0 - radius * radius)).abs() * c.trace_norm_budget();
    let product_rhs = log_rhs.exp();
    Ok(EigenvalueBounds {
        radius,
        inner_radius,
        product_lhs,
        product_rhs,
        holds: product_lhs <= product_rhs * (1.0 + 1e-12),
        count_lhs,
        count_rhs: log_rhs / (radius / inner_radius).ln(),
    })
}

/// U_n = u_n v*/⟨v, v⟩, so that U_n v = u_n and U_n w = 0 for w ⊥ v.
pub fn promote_vector_solution(lo: i64, u: &[DVector<Complex64>], v: &DVector<Complex64>) -> Result<BlockSequence> {
    let vv = v.norm_squared();
    if vv == 0.0 {
        return Err(Error::ZeroVector);
    }
    let vadj = v.adjoint() / Complex64::from(vv);
    Ok(BlockSequence::new(lo, u.iter().map(|un| un * &vadj).collect()))
}
