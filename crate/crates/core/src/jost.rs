//! Jost solutions U±(z), built by the exact three-term recursion and by the
//! series U⁺_n(z) = T_n zⁿ (I + Σ K_{n,m} z^m), U⁻_n(z) = R_n z⁻ⁿ (I + Σ M_{n,m} z^m).
//!
//! Past the support the solutions are exactly free: U⁺_n = zⁿ I for n ≥ n_max + 1
//! and U⁻_n = z⁻ⁿ I for n ≤ n_min − 1.

use std::ops::Deref;

use num_complex::Complex64;

use crate::block::{self, BlockSequence, OperatorBlock};
use crate::coefficients::CoefficientData;
use crate::error::{Error, Result};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Species {
    Plus,
    Minus,
}

impl Species {
    pub fn other(self) -> Species {
        match self {
            Species::Plus => Species::Minus,
            Species::Minus => Species::Plus,
        }
    }

    /// +1 for `Plus`, −1 for `Minus`.
    pub fn sign(self) -> f64 {
        match self {
            Species::Plus => 1.0,
            Species::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Species::Plus => "+",
            Species::Minus => "-",
        }
    }
}

/// Inclusive index window [lo, hi].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Self {
        assert!(lo <= hi, "empty window [{lo}, {hi}]");
        Window { lo, hi }
    }

    /// [n_min − 5, n_max + 5].
    pub fn default_for(c: &CoefficientData) -> Self {
        Window::new(c.n_min() - 5, c.n_max() + 5)
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, n: i64) -> bool {
        n >= self.lo && n <= self.hi
    }

    pub fn covers(&self, other: Window) -> bool {
        self.lo <= other.lo && self.hi >= other.hi
    }
}

/// A window of a Jost solution evaluated at `z`.
#[derive(Clone, Debug)]
pub struct OperatorSolution {
    pub z: Complex64,
    pub species: Species,
    seq: BlockSequence,
}

impl OperatorSolution {
    pub fn blocks(&self) -> &BlockSequence {
        &self.seq
    }

    pub fn into_blocks(self) -> BlockSequence {
        self.seq
    }

    pub fn lambda(&self) -> Complex64 {
        self.z + self.z.inv()
    }
}

impl Deref for OperatorSolution {
    type Target = BlockSequence;

    fn deref(&self) -> &BlockSequence {
        &self.seq
    }
}

fn check_z(z: Complex64) -> Result<()> {
    if z.norm() == 0.0 {
        Err(Error::ZeroSpectralParameter)
    } else {
        Ok(())
    }
}

fn zpow(d: usize, z: Complex64, n: i64) -> OperatorBlock {
    block::scaled_identity(d, z.powi(n as i32))
}

/// U⁺(z) on `window`: zⁿ I for n ≥ n_max + 1, then U_{n−1} = A_{n−1}⁻¹[(λ − B_n)U_n − A_n U_{n+1}].
pub fn jost_plus_recursion(c: &CoefficientData, z: Complex64, window: Window) -> Result<OperatorSolution> {
    check_z(z)?;
    let d = c.dim();
    let lambda = z + z.inv();
    let free_from = c.n_max() + 1;
    let mut blocks = Vec::with_capacity(window.len());
    let top = window.hi.max(free_from + 1);
    // walk downward from the top of the computation range; blocks come out reversed
    let mut next = zpow(d, z, top);
    let mut cur = zpow(d, z, top - 1);
    let mut n = top - 1;
    if window.contains(top) {
        blocks.push(next.clone());
    }
    loop {
        if window.contains(n) {
            blocks.push(cur.clone());
        }
        if n <= window.lo {
            break;
        }
        let prev = if n > free_from {
            zpow(d, z, n - 1)
        } else {
            let rhs = (block::scaled_identity(d, lambda) - c.b(n)) * &cur - c.a(n) * &next;
            c.a_inv(n - 1) * rhs
        };
        next = cur;
        cur = prev;
        n -= 1;
    }
    blocks.reverse();
    Ok(OperatorSolution { z, species: Species::Plus, seq: BlockSequence::new(window.lo, blocks) })
}

/// U⁻(z) on `window`: z⁻ⁿ I for n ≤ n_min − 1, then U_{n+1} = A_n⁻¹[(λ − B_n)U_n − A_{n−1} U_{n−1}].
pub fn jost_minus_recursion(c: &CoefficientData, z: Complex64, window: Window) -> Result<OperatorSolution> {
    check_z(z)?;
    let d = c.dim();
    let lambda = z + z.inv();
    let free_to = c.n_min() - 1;
    let mut blocks = Vec::with_capacity(window.len());
    let bottom = window.lo.min(free_to - 1);
    let mut prev = zpow(d, z, -bottom);
    let mut cur = zpow(d, z, -(bottom + 1));
    let mut n = bottom + 1;
    if window.contains(bottom) {
        blocks.push(prev.clone());
    }
    loop {
        if window.contains(n) {
            blocks.push(cur.clone());
        }
        if n >= window.hi {
            break;
        }
        let next = if n < free_to {
            zpow(d, z, -(n + 1))
        } else {
            let rhs = (block::scaled_identity(d, lambda) - c.b(n)) * &cur - c.a(n - 1) * &prev;
            c.a_inv(n) * rhs
        };
        prev = cur;
        cur = next;
        n += 1;
    }
    Ok(OperatorSolution { z, species: Species::Minus, seq: BlockSequence::new(window.lo, blocks) })
}

pub fn jost_recursion(c: &CoefficientData, species: Species, z: Complex64, window: Window) -> Result<OperatorSolution> {
    match species {
        Species::Plus => jost_plus_recursion(c, z, window),
        Species::Minus => jost_minus_recursion(c, z, window),
    }
}

/// max over interior n of ‖A_{n−1}U_{n−1} + (B_n − λ)U_n + A_nU_{n+1}‖, relative to max‖U_n‖.
pub fn recursion_residual(c: &CoefficientData, u: &BlockSequence, lambda: Complex64) -> f64 {
    let scale = u.max_norm().max(f64::MIN_POSITIVE);
    let d = c.dim();
    let mut worst: f64 = 0.0;
    for n in u.lo() + 1..u.hi() {
        let (um, u0, up) = (u.get(n - 1).unwrap(), u.get(n).unwrap(), u.get(n + 1).unwrap());
        let r = c.a(n - 1) * um + (c.b(n) - block::scaled_identity(d, lambda)) * u0 + c.a(n) * up;
        worst = worst.max(block::norm(&r));
    }
    worst / scale
}

/// Products T_n, R_n and series coefficients K_{n,m}, M_{n,m} on a window.
///
/// `k(n, 0)` and `m(n, 0)` are the identity.
#[derive(Clone, Debug)]
pub struct JostSeriesData {
    window: Window,
    n_min: i64,
    n_max: i64,
    m_max: usize,
    /// T_n for n in [window.lo, top]
    t: Vec<OperatorBlock>,
    /// R_n for n in [bottom, window.hi]
    r: Vec<OperatorBlock>,
    /// K[n − window.lo][m]
    k: Vec<Vec<OperatorBlock>>,
    /// M[n − bottom][m]
    m: Vec<Vec<OperatorBlock>>,
    top: i64,
    bottom: i64,
    identity: OperatorBlock,
    zero: OperatorBlock,
}

impl JostSeriesData {
    pub fn window(&self) -> Window {
        self.window
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn t(&self, n: i64) -> &OperatorBlock {
        if n > self.top {
            &self.identity
        } else {
            &self.t[(n - self.window.lo) as usize]
        }
    }

    pub fn r(&self, n: i64) -> &OperatorBlock {
        if n < self.bottom {
            &self.identity
        } else {
            &self.r[(n - self.bottom) as usize]
        }
    }

    /// K_{n,m}; zero for n > n_max or m > m_max.
    pub fn k(&self, n: i64, m: usize) -> &OperatorBlock {
        if m == 0 {
            return &self.identity;
        }
        if n > self.top || m > self.m_max {
            return &self.zero;
        }
        &self.k[(n - self.window.lo) as usize][m]
    }

    /// M_{n,m}; zero for n < n_min or m > m_max.
    pub fn m(&self, n: i64, m: usize) -> &OperatorBlock {
        if m == 0 {
            return &self.identity;
        }
        if n < self.bottom || m > self.m_max {
            return &self.zero;
        }
        &self.m[(n - self.bottom) as usize][m]
    }

    /// Proved degree: K_{n,m} = 0 for m > 2(n_max − n).
    pub fn k_degree(&self, n: i64) -> usize {
        (2 * (self.n_max - n)).max(0) as usize
    }

    /// Proved degree: M_{n,m} = 0 for m > 2(n − n_min).
    pub fn m_degree(&self, n: i64) -> usize {
        (2 * (n - self.n_min)).max(0) as usize
    }
}

/// Builds T, R, K, M for evaluation on `window` with m_max = proved degree + 2,
/// and checks that every coefficient past the proved degree is below 1e−12.
pub fn build_series_data(c: &CoefficientData, window: Window) -> Result<JostSeriesData> {
    let d = c.dim();
    let (n_min, n_max) = c.span();
    let eye = block::identity(d);
    let zero = block::zeros(d);
    let m_max = (2 * (n_max - window.lo)).max(2 * (window.hi - n_min)).max(0) as usize + 2;

    // T_n = A_n⁻¹ T_{n+1}, T_n = I for n ≥ n_max + 1
    let top = window.hi.max(n_max + 1);
    let mut t = vec![eye.clone(); (top - window.lo + 1) as usize];
    for n in (window.lo..=n_max.min(top)).rev() {
        let next = if n + 1 > top { eye.clone() } else { t[(n + 1 - window.lo) as usize].clone() };
        t[(n - window.lo) as usize] = c.a_inv(n) * next;
    }
    let t_at = |n: i64| -> OperatorBlock {
        if n > top { eye.clone() } else { t[(n - window.lo) as usize].clone() }
    };

    // R_{n+1} = A_n⁻¹ R_n, R_n = I for n ≤ n_min − 1
    let bottom = window.lo.min(n_min - 1);
    let rtop = window.hi.max(n_max + 1);
    let mut r = vec![eye.clone(); (rtop - bottom + 1) as usize];
    for n in n_min.max(bottom + 1)..=rtop {
        r[(n - bottom) as usize] = c.a_inv(n - 1) * &r[(n - 1 - bottom) as usize];
    }
    let r_at = |n: i64| -> OperatorBlock {
        if n < bottom { eye.clone() } else { r[(n - bottom) as usize].clone() }
    };

    let pert: Vec<i64> = c.perturbation_range().collect();

    // K: G_p = T_p⁻¹B_pT_p, H_p = T_p⁻¹(I − A_p²)T_p, nonzero only for p ∈ [n_min − 1, n_max]
    let mut g = std::collections::BTreeMap::new();
    let mut h = std::collections::BTreeMap::new();
    for &p in &pert {
        let tp = t_at(p);
        let tp_inv = tp.clone().try_inverse().ok_or(Error::SingularA { n: p, smin: 0.0, tol: 0.0 })?;
        g.insert(p, &tp_inv * c.b(p) * &tp);
        h.insert(p, &tp_inv * (&eye - c.a(p) * c.a(p)) * &tp);
    }
    let krows = (top - window.lo + 1) as usize;
    let mut k = vec![vec![zero.clone(); m_max + 1]; krows];
    for row in k.iter_mut() {
        row[0] = eye.clone();
    }
    let kget = |k: &Vec<Vec<OperatorBlock>>, n: i64, m: usize| -> OperatorBlock {
        if m == 0 {
            eye.clone()
        } else if n > top || m > m_max {
            zero.clone()
        } else {
            k[(n - window.lo) as usize][m].clone()
        }
    };
    for n in (window.lo..top).rev() {
        let ps: Vec<i64> = pert.iter().copied().filter(|&p| p > n).collect();
        let mut row = vec![zero.clone(); m_max + 1];
        row[0] = eye.clone();
        if m_max >= 1 {
            let mut acc = zero.clone();
            for p in &ps {
                acc -= &g[p];
            }
            row[1] = acc;
        }
        if m_max >= 2 {
            let mut acc = zero.clone();
            for p in &ps {
                acc += &h[p] - &g[p] * kget(&k, *p, 1);
            }
            row[2] = acc;
        }
        for mm in 1..m_max.saturating_sub(1) {
            let mut acc = kget(&k, n + 1, mm);
            for p in &ps {
                acc += &h[p] * kget(&k, p + 1, mm) - &g[p] * kget(&k, *p, mm + 1);
            }
            row[mm + 2] = acc;
        }
        k[(n - window.lo) as usize] = row;
    }

    // M: G'_p = R_p⁻¹B_pR_p, H'_p = R_p⁻¹(I − A_{p−1}²)R_p, nonzero only for p ∈ [n_min, n_max + 1]
    let mut g2 = std::collections::BTreeMap::new();
    let mut h2 = std::collections::BTreeMap::new();
    for p in pert.iter().map(|p| p + 1) {
        let rp = r_at(p);
        let rp_inv = rp.clone().try_inverse().ok_or(Error::SingularA { n: p - 1, smin: 0.0, tol: 0.0 })?;
        g2.insert(p, &rp_inv * c.b(p) * &rp);
        h2.insert(p, &rp_inv * (&eye - c.a(p - 1) * c.a(p - 1)) * &rp);
    }
    let mrows = (window.hi - bottom + 1) as usize;
    let mut mm_tab = vec![vec![zero.clone(); m_max + 1]; mrows];
    for row in mm_tab.iter_mut() {
        row[0] = eye.clone();
    }
    let mget = |mt: &Vec<Vec<OperatorBlock>>, n: i64, m: usize| -> OperatorBlock {
        if m == 0 {
            eye.clone()
        } else if n < bottom || m > m_max {
            zero.clone()
        } else {
            mt[(n - bottom) as usize][m].clone()
        }
    };
    for n in bottom + 1..=window.hi {
        let ps: Vec<i64> = g2.keys().copied().filter(|&p| p < n).collect();
        let mut row = vec![zero.clone(); m_max + 1];
        row[0] = eye.clone();
        if m_max >= 1 {
            let mut acc = zero.clone();
            for p in &ps {
                acc -= &g2[p];
            }
            row[1] = acc;
        }
        if m_max >= 2 {
            let mut acc = zero.clone();
            for p in &ps {
                acc += &h2[p] - &g2[p] * mget(&mm_tab, *p, 1);
            }
            row[2] = acc;
        }
        for mm in 1..m_max.saturating_sub(1) {
            let mut acc = mget(&mm_tab, n - 1, mm);
            for p in &ps {
                acc += &h2[p] * mget(&mm_tab, p - 1, mm) - &g2[p] * mget(&mm_tab, *p, mm + 1);
            }
            row[mm + 2] = acc;
        }
        mm_tab[(n - bottom) as usize] = row;
    }

    let s = JostSeriesData {
        window,
        n_min,
        n_max,
        m_max,
        t,
        r,
        k,
        m: mm_tab,
        top,
        bottom,
        identity: eye,
        zero,
    };
    check_degrees(&s)?;
    Ok(s)
}

fn check_degrees(s: &JostSeriesData) -> Result<()> {
    let scale = |f: &dyn Fn(usize) -> f64| (1..=s.m_max).map(f).fold(1.0_f64, f64::max);
    for n in s.window.lo..=s.window.hi {
        let kscale = scale(&|m| block::norm(s.k(n, m)));
        for m in s.k_degree(n) + 1..=s.m_max {
            let v = block::norm(s.k(n, m));
            if v > tol::SERIES_SLACK * kscale {
                return Err(Error::SeriesDegree { name: 'K', n, m, norm: v });
            }
        }
        let mscale = scale(&|m| block::norm(s.m(n, m)));
        for m in s.m_degree(n) + 1..=s.m_max {
            let v = block::norm(s.m(n, m));
            if v > tol::SERIES_SLACK * mscale {
                return Err(Error::SeriesDegree { name: 'M', n, m, norm: v });
            }
        }
    }
    Ok(())
}

fn series_poly(coef: impl Fn(usize) -> OperatorBlock, m_max: usize, z: Complex64) -> OperatorBlock {
    // Horner: Σ_{m=0}^{m_max} C_m z^m
    let mut acc = coef(m_max);
    for m in (0..m_max).rev() {
        acc = acc * z + coef(m);
    }
    acc
}

fn check_series_window(s: &JostSeriesData, window: Window) -> Result<()> {
    if !s.window.covers(window) {
        return Err(Error::WindowTooSmall {
            lo: s.window.lo,
            hi: s.window.hi,
            need_lo: window.lo,
            need_hi: window.hi,
        });
    }
    Ok(())
}

/// U⁺_n(z) = T_n zⁿ (I + Σ K_{n,m} z^m).
pub fn jost_plus_series(s: &JostSeriesData, z: Complex64, window: Window) -> Result<OperatorSolution> {
    check_z(z)?;
    check_series_window(s, window)?;
    let seq = BlockSequence::from_fn(window.lo, window.hi, |n| {
        s.t(n) * series_poly(|m| s.k(n, m).clone(), s.m_max, z) * z.powi(n as i32)
    });
    Ok(OperatorSolution { z, species: Species::Plus, seq })
}

/// U⁻_n(z) = R_n z⁻ⁿ (I + Σ M_{n,m} z^m).
pub fn jost_minus_series(s: &JostSeriesData, z: Complex64, window: Window) -> Result<OperatorSolution> {
    check_z(z)?;
    check_series_window(s, window)?;
    let seq = BlockSequence::from_fn(window.lo, window.hi, |n| {
        s.r(n) * series_poly(|m| s.m(n, m).clone(), s.m_max, z) * z.powi(-n as i32)
    });
    Ok(OperatorSolution { z, species: Species::Minus, seq })
}

pub fn jost_series(s: &JostSeriesData, species: Species, z: Complex64, window: Window) -> Result<OperatorSolution> {
    match species {
        Species::Plus => jost_plus_series(s, z, window),
        Species::Minus => jost_minus_series(s, z, window),
    }
}

/// Term-by-term z-derivative of the series:
/// d/dz U⁺_n = T_n Σ_{m≥0} (m + n) K_{n,m} z^{m+n−1}, d/dz U⁻_n = R_n Σ_{m≥0} (m − n) M_{n,m} z^{m−n−1}.
pub fn series_derivative(s: &JostSeriesData, species: Species, z: Complex64, window: Window) -> Result<BlockSequence> {
    check_z(z)?;
    check_series_window(s, window)?;
    Ok(BlockSequence::from_fn(window.lo, window.hi, |n| match species {
        Species::Plus => {
            let p = series_poly(|m| s.k(n, m) * Complex64::from((m as i64 + n) as f64), s.m_max, z);
            s.t(n) * p * z.powi((n - 1) as i32)
        }
        Species::Minus => {
            let p = series_poly(|m| s.m(n, m) * Complex64::from((m as i64 - n) as f64), s.m_max, z);
            s.r(n) * p * z.powi((-n - 1) as i32)
        }
    }))
}

/// δU(z) with U(z) = U(z0) + (z − z0) δU(z): the difference quotient for z ≠ z0,
/// the series derivative at z = z0.
pub fn delta_jost(
    c: &CoefficientData,
    s: &JostSeriesData,
    species: Species,
    z0: Complex64,
    z: Complex64,
    window: Window,
) -> Result<BlockSequence> {
    if z == z0 {
        return series_derivative(s, species, z0, window);
    }
    let u = jost_recursion(c, species, z, window)?;
    let u0 = jost_recursion(c, species, z0, window)?;
    let h = (z - z0).inv();
    Ok(u.map(|n, b| (b - u0.get(n).unwrap()) * h))
}

/// The constant 𝒞 ≥ sup_j (‖T_j‖ + ‖T_j⁻¹‖ + ‖I + A_j‖) + Σ (|n| + 1)(‖I − A_n‖ + ‖B_n‖).
pub fn tail_constant(c: &CoefficientData) -> f64 {
    let d = c.dim();
    let eye = block::identity(d);
    let mut sup: f64 = 4.0;
    let mut t = eye.clone();
    for j in c.perturbation_range().rev() {
        t = c.a_inv(j) * t;
        let t_inv = t.clone().try_inverse().unwrap_or_else(|| eye.clone());
        sup = sup.max(block::norm(&t) + block::norm(&t_inv) + block::norm(&(&eye + c.a(j))));
    }
    let moment: f64 = c.perturbation_range().map(|n| (n.unsigned_abs() as f64 + 1.0) * c.deviation(n)).sum();
    (sup + moment).max(1.0 + f64::EPSILON)
}

/// C_n = 𝒞⁵ exp(𝒞³ Σ_{p>n} (p − n) w_p), w_p = ‖I − A_p‖ + ‖B_p‖.
pub fn tail_c_n(c: &CoefficientData, n: i64) -> f64 {
    let cc = tail_constant(c);
    let s: f64 = c.perturbation_range().filter(|&p| p > n).map(|p| (p - n) as f64 * c.deviation(p)).sum();
    cc.powi(5) * (cc.powi(3) * s).exp()
}

/// Certified bound on Σ_{m > cut} ‖K_{n,m}‖ (|z| = 1): C_n Σ_{m>cut} Σ_{p ≥ n + ⌊m/2⌋} w_p.
pub fn tail_bound(c: &CoefficientData, n: i64, window_cut: usize) -> f64 {
    let pert: Vec<(i64, f64)> = c.perturbation_range().map(|p| (p, c.deviation(p))).collect();
    let mut total = 0.0;
    let mut m = window_cut + 1;
    loop {
        let start = n + (m / 2) as i64;
        let inner: f64 = pert.iter().filter(|(p, _)| *p >= start).map(|(_, w)| w).sum();
        if pert.iter().all(|(p, _)| *p < start) {
            break;
        }
        total += inner;
        m += 1;
    }
    if total == 0.0 {
        return 0.0;
    }
    tail_c_n(c, n) * total
}
