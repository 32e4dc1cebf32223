use std::f64::consts::PI;

use jacobi_scatter::block::{self, BlockMatrix2};
use jacobi_scatter::coefficients::{random_instance, RandomSpec};
use jacobi_scatter::jost::{build_series_data, jost_recursion, jost_series, Species, Window};
use jacobi_scatter::scattering::{
    circle_limit, scattering_data, scattering_extension, scattering_relation_residual, transfer_relation_residual,
};
use jacobi_scatter::spectrum::{bs_zero_scan, compare_reports, eigenvalue_bounds, truncation_eigen, wronskian_scan};
use jacobi_scatter::tol;
use jacobi_scatter::wronskian::{adjoint_conjugate_solution, alpha_beta, wronskian_constant};
use jacobi_scatter::{CoefficientData, Complex64, EigenvalueReport, Error, OperatorBlock};

use crate::args::{Args, Radius};
use crate::table::{Cell, Table};

/// Radius below which the truncation oracle is compared with the exact methods.
pub const TRUNCATION_RADIUS: f64 = 0.9;

#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Numerical(_) => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Validation(m) | Failure::Numerical(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

pub type Outcome<T> = std::result::Result<T, Failure>;

fn off_edges(theta: f64) -> bool {
    let t = theta.rem_euclid(2.0 * PI);
    let t = t.min(2.0 * PI - t);
    t > tol::EDGE_BAND && PI - t > tol::EDGE_BAND
}

/// z_k = R e^{2πik/N}; on the unit circle the ±1 bands are dropped.
pub fn z_grid(args: &Args) -> Outcome<Vec<Complex64>> {
    let n = args.grid.max(1);
    let r = match args.radius {
        Radius::Circle => 1.0,
        Radius::Value(r) => r,
    };
    let limit = args.eps.map_or(1.0, |eps| (eps / 2.0).exp());
    let ok = if args.eps.is_some() { r < limit } else { r <= limit };
    if !ok {
        return Err(Failure::Validation(format!("grid radius {r} outside the admissible range (limit {limit})")));
    }
    let on_circle = (r - 1.0).abs() < 1e-15;
    Ok((0..n)
        .map(|k| 2.0 * PI * k as f64 / n as f64)
        .filter(|&t| !on_circle || off_edges(t))
        .map(|t| Complex64::from_polar(r, t))
        .collect())
}

fn entries(t: &mut Table, z: Complex64, quantity: &str, m: &OperatorBlock) {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            t.push(vec![z.into(), quantity.into(), i.into(), j.into(), m[(i, j)].into(), Cell::from(None)]);
        }
    }
}

fn scalar(t: &mut Table, z: Complex64, quantity: &str, value: f64) {
    t.push(vec![z.into(), quantity.into(), Cell::from(None), Cell::from(None), Cell::from(None), value.into()]);
}

fn species_name(s: Species) -> &'static str {
    match s {
        Species::Plus => "plus",
        Species::Minus => "minus",
    }
}

fn validation_rows(c: &CoefficientData, eps: f64) -> Vec<(String, f64)> {
    let min_sigma = c.perturbation_range().map(|n| block::smallest_singular_value(c.a(n))).fold(f64::INFINITY, f64::min);
    let mut rows = vec![
        ("dim".to_owned(), c.dim() as f64),
        ("n_min".to_owned(), c.n_min() as f64),
        ("n_max".to_owned(), c.n_max() as f64),
    ];
    for k in 0..=3 {
        rows.push((format!("moment_{k}"), c.moment_sum(k)));
    }
    rows.push(("eps".to_owned(), eps));
    rows.push(("exponential_budget".to_owned(), c.exponential_sum(eps)));
    rows.push(("trace_norm_budget".to_owned(), c.trace_norm_budget()));
    rows.push(("min_sigma_a".to_owned(), if min_sigma.is_finite() { min_sigma } else { 1.0 }));
    rows
}

pub fn validate(c: &CoefficientData, args: &Args) -> Table {
    let mut t = Table::new("validate", &[("quantity", false), ("value", false)]);
    for (q, v) in validation_rows(c, args.eps.unwrap_or(1.0)) {
        t.push(vec![q.into(), v.into()]);
    }
    t
}

pub fn jost(c: &CoefficientData, args: &Args) -> Outcome<Table> {
    let mut t = Table::new(
        "jost",
        &[("z", true), ("species", false), ("n", false), ("row", false), ("col", false), ("value", true), ("series_diff", false)],
    );
    let w = Window::default_for(c);
    let series = build_series_data(c, w)?;
    for z in z_grid(args)? {
        for s in [Species::Plus, Species::Minus] {
            let rec = jost_recursion(c, s, z, w)?;
            let ser = jost_series(&series, s, z, w)?;
            for n in w.lo..=w.hi {
                let (u, v) = (rec.get(n).unwrap(), ser.get(n).unwrap());
                let diff = block::norm(&(u - v));
                for i in 0..c.dim() {
                    for j in 0..c.dim() {
                        t.push(vec![z.into(), species_name(s).into(), n.into(), i.into(), j.into(), u[(i, j)].into(), diff.into()]);
                    }
                }
            }
        }
    }
    Ok(t)
}

struct PairDiagnostics {
    name: &'static str,
    value_norm: f64,
    deviation: f64,
    tolerance: f64,
    identity_residual: Option<f64>,
}

fn wronskian_pairs(c: &CoefficientData, z: Complex64) -> Outcome<Vec<PairDiagnostics>> {
    let w = Window::default_for(c);
    let d = c.dim();
    let gap = block::scaled_identity(d, z.inv() - z);
    let pairs: [(&str, Species, Species, bool, Option<OperatorBlock>); 6] = [
        ("plus*,minus", Species::Plus, Species::Minus, false, None),
        ("minus*,plus", Species::Minus, Species::Plus, false, None),
        ("plus*,plus(1/z)", Species::Plus, Species::Plus, true, Some(gap.clone())),
        ("minus*,minus(1/z)", Species::Minus, Species::Minus, true, Some(-gap)),
        ("plus*,plus", Species::Plus, Species::Plus, false, Some(block::zeros(d))),
        ("minus*,minus", Species::Minus, Species::Minus, false, Some(block::zeros(d))),
    ];
    let mut out = Vec::new();
    for (name, s, t, inv, expect) in pairs {
        let left = adjoint_conjugate_solution(c, s, z, w)?;
        let right = jost_recursion(c, t, if inv { z.inv() } else { z }, w)?;
        let v = wronskian_constant(c, &left, &right)?;
        out.push(PairDiagnostics {
            name,
            value_norm: block::norm(&v.value),
            deviation: v.deviation,
            tolerance: v.tolerance,
            identity_residual: expect.map(|e| block::norm(&(&v.value - e))),
        });
    }
    Ok(out)
}

pub fn wronskian(c: &CoefficientData, args: &Args) -> Outcome<Table> {
    let mut t = Table::new(
        "wronskian",
        &[("z", true), ("pair", false), ("value_norm", false), ("deviation", false), ("tolerance", false), ("identity_residual", false)],
    );
    for z in z_grid(args)? {
        for p in wronskian_pairs(c, z)? {
            t.push(vec![z.into(), p.name.into(), p.value_norm.into(), p.deviation.into(), p.tolerance.into(), p.identity_residual.into()]);
        }
    }
    Ok(t)
}

#[derive(Default)]
struct ScatterResiduals {
    inverse: f64,
    transfer: f64,
    scattering: f64,
    alpha_unitarity: f64,
    s_unitarity: f64,
    extension: f64,
}

fn scatter_into(c: &CoefficientData, grid: &[Complex64], mut t: Option<&mut Table>) -> Outcome<ScatterResiduals> {
    let w = Window::default_for(c);
    let mut r = ScatterResiduals::default();
    for &z in grid {
        let sd = scattering_data(c, z)?;
        let inverse = sd.inverse_residual() / (sd.m.norm() * sd.m_reverse.norm()).max(1.0);
        let transfer = transfer_relation_residual(c, z, &sd.m, w)?;
        let scattering = scattering_relation_residual(c, z, &sd.s, w)?;
        r.inverse = r.inverse.max(inverse);
        r.transfer = r.transfer.max(transfer);
        r.scattering = r.scattering.max(scattering);
        let on_circle = (z.norm() - 1.0).abs() < 1e-14;
        let (mut au, mut su) = (0.0, 0.0);
        if on_circle {
            let scale = block::norm(&sd.coefficients.alpha_plus).max(1.0).powi(2);
            au = sd.unitarity_residual() / scale;
            su = sd.s_unitarity_residual();
            r.alpha_unitarity = r.alpha_unitarity.max(au);
            r.s_unitarity = r.s_unitarity.max(su);
        }
        if let Some(t) = t.as_deref_mut() {
            let ab = &sd.coefficients;
            entries(t, z, "alpha_plus", &ab.alpha_plus);
            entries(t, z, "beta_plus", &ab.beta_plus);
            entries(t, z, "alpha_minus", &ab.alpha_minus);
            entries(t, z, "beta_minus", &ab.beta_minus);
            matrix_entries(t, z, "M", &sd.m);
            matrix_entries(t, z, "S", &sd.s);
            scalar(t, z, "residual_inverse", inverse);
            scalar(t, z, "residual_transfer_relation", transfer);
            scalar(t, z, "residual_scattering_relation", scattering);
            if on_circle {
                scalar(t, z, "residual_alpha_unitarity", au);
                scalar(t, z, "residual_s_unitarity", su);
            }
        }
    }
    for z0 in [1.0, -1.0] {
        let ext = scattering_extension(c, z0)?;
        let limit = circle_limit(c, z0, 1e-4)?;
        let diff = ext.s.distance(&limit);
        r.extension = r.extension.max(diff);
        if let Some(t) = t.as_deref_mut() {
            let z = Complex64::new(z0, 0.0);
            matrix_entries(t, z, "S_ext", &ext.s);
            scalar(t, z, "ext_kernel_rank_plus", ext.plus.kernel_rank as f64);
            scalar(t, z, "ext_kernel_rank_minus", ext.minus.kernel_rank as f64);
            scalar(t, z, "ext_dw_deviation", ext.plus.dw_deviation.max(ext.minus.dw_deviation));
            scalar(t, z, "ext_circle_limit_diff", diff);
        }
    }
    Ok(r)
}

fn matrix_entries(t: &mut Table, z: Complex64, name: &str, m: &BlockMatrix2) {
    for i in 0..2 {
        for j in 0..2 {
            entries(t, z, &format!("{name}{i}{j}"), m.get(i, j));
        }
    }
}

pub fn scatter(c: &CoefficientData, args: &Args) -> Outcome<Table> {
    let mut t = Table::new(
        "scatter",
        &[("z", true), ("quantity", false), ("row", false), ("col", false), ("value", true), ("scalar", false)],
    );
    scatter_into(c, &z_grid(args)?, Some(&mut t))?;
    Ok(t)
}

pub struct Spectra {
    pub scan: EigenvalueReport,
    pub truncation: EigenvalueReport,
    pub determinant: EigenvalueReport,
}

impl Spectra {
    pub fn compute(c: &CoefficientData, args: &Args) -> Outcome<Self> {
        Ok(Spectra {
            scan: wronskian_scan(c, args.scan_grid, args.refine_tol),
            truncation: truncation_eigen(c, args.truncation, tol::TRUNCATION_MARGIN)?,
            determinant: bs_zero_scan(c, args.scan_grid),
        })
    }

    /// max |Δz| between the scan and the determinant, and between the scan and the truncation
    /// on |z| ≤ TRUNCATION_RADIUS; infinite on a count mismatch.
    pub fn agreement(&self) -> f64 {
        let a = compare_reports(&self.scan, &self.determinant);
        let b = compare_reports(&self.scan.within(TRUNCATION_RADIUS), &self.truncation.within(TRUNCATION_RADIUS));
        let count_ok = a.same_count && a.same_multiplicities && b.same_count && b.same_multiplicities;
        if count_ok {
            a.max_z_diff.max(b.max_z_diff)
        } else {
            f64::INFINITY
        }
    }
}

pub fn spectrum(c: &CoefficientData, args: &Args) -> Outcome<Table> {
    let mut t = Table::new(
        "spectrum",
        &[
            ("method", false),
            ("index", false),
            ("z", false),
            ("lambda", false),
            ("multiplicity", false),
            ("residual", false),
            ("agreement_diff", false),
            ("convergence", false),
        ],
    );
    let sp = Spectra::compute(c, args)?;
    for report in [&sp.scan, &sp.truncation, &sp.determinant] {
        for (k, item) in report.items.iter().enumerate() {
            let nearest = sp.scan.items.iter().map(|s| (s.z - item.z).abs()).fold(f64::INFINITY, f64::min);
            t.push(vec![
                report.method.name().into(),
                k.into(),
                item.z.into(),
                item.lambda.into(),
                item.multiplicity.into(),
                item.residual.into(),
                Cell::from(nearest.is_finite().then_some(nearest)),
                Cell::from(report.convergence),
            ]);
        }
    }
    Ok(t)
}

fn bound_radius(args: &Args) -> f64 {
    match args.radius {
        Radius::Circle => 0.9,
        Radius::Value(r) => r,
    }
}

pub fn bound(c: &CoefficientData, args: &Args) -> Outcome<Table> {
    let mut t = Table::new(
        "bound",
        &[
            ("radius", false),
            ("inner_radius", false),
            ("eigenvalues", false),
            ("product_lhs", false),
            ("product_rhs", false),
            ("holds", false),
            ("count_lhs", false),
            ("count_rhs", false),
            ("trace_norm_budget", false),
        ],
    );
    let radius = bound_radius(args);
    let inner = args.inner_radius.unwrap_or(radius / 2.0);
    let report = wronskian_scan(c, args.scan_grid, args.refine_tol).within(radius);
    let b = eigenvalue_bounds(c, radius, inner, &report)?;
    t.push(vec![
        radius.into(),
        inner.into(),
        report.count().into(),
        b.product_lhs.into(),
        b.product_rhs.into(),
        b.holds.into(),
        b.count_lhs.into(),
        b.count_rhs.into(),
        c.trace_norm_budget().into(),
    ]);
    Ok(t)
}

pub fn report(c: &CoefficientData, args: &Args) -> Outcome<Table> {
    let mut t = Table::new("report", &[("section", false), ("quantity", false), ("value", false)]);
    let mut row = |s: &str, q: &str, v: Cell| t.push(vec![s.into(), q.into(), v]);
    for (q, v) in validation_rows(c, args.eps.unwrap_or(1.0)) {
        row("validate", &q, v.into());
    }
    let grid = z_grid(args)?;

    let w = Window::default_for(c);
    let series = build_series_data(c, w)?;
    let mut dual: f64 = 0.0;
    for &z in &grid {
        for s in [Species::Plus, Species::Minus] {
            let rec = jost_recursion(c, s, z, w)?;
            dual = dual.max(rec.max_diff(jost_series(&series, s, z, w)?.blocks()) / rec.max_norm().max(1.0));
        }
    }
    row("jost", "residual_dual_method", dual.into());

    let (mut constancy, mut identity): (f64, f64) = (0.0, 0.0);
    let mut adjoint: f64 = 0.0;
    for &z in &grid {
        for p in wronskian_pairs(c, z)? {
            constancy = constancy.max(p.deviation / p.tolerance * tol::CONSTANCY);
            if let Some(r) = p.identity_residual {
                identity = identity.max(r / p.value_norm.max(1.0));
            }
        }
        let ab = alpha_beta(c, z)?;
        let conj = alpha_beta(c, z.conj())?;
        let conj_inv = alpha_beta(c, z.conj().inv())?;
        for s in [Species::Plus, Species::Minus] {
            let scale = block::norm(ab.alpha(s)).max(1.0);
            adjoint = adjoint.max(block::norm(&(ab.alpha(s).adjoint() - conj.alpha(s.other()))) / scale);
            adjoint = adjoint.max(block::norm(&(ab.beta(s).adjoint() + conj_inv.beta(s.other()))) / scale);
        }
    }
    row("wronskian", "residual_constancy", constancy.into());
    row("wronskian", "residual_identity", identity.into());
    row("wronskian", "residual_adjoint", adjoint.into());

    let sr = scatter_into(c, &grid, None)?;
    row("scatter", "residual_inverse", sr.inverse.into());
    row("scatter", "residual_transfer_relation", sr.transfer.into());
    row("scatter", "residual_scattering_relation", sr.scattering.into());
    row("scatter", "residual_alpha_unitarity", sr.alpha_unitarity.into());
    row("scatter", "residual_s_unitarity", sr.s_unitarity.into());
    row("scatter", "residual_extension", sr.extension.into());

    let sp = Spectra::compute(c, args)?;
    for r in [&sp.scan, &sp.truncation, &sp.determinant] {
        row("spectrum", &format!("count_{}", r.method.name()), r.count().into());
    }
    let agreement = sp.agreement();
    row("spectrum", "agreement_diff", if agreement.is_finite() { agreement.into() } else { "count_mismatch".into() });
    row("spectrum", "truncation_convergence", sp.truncation.convergence.into());

    let radius = bound_radius(args);
    let inner = args.inner_radius.unwrap_or(radius / 2.0);
    let b = eigenvalue_bounds(c, radius, inner, &sp.scan.within(radius))?;
    row("bound", "radius", radius.into());
    row("bound", "product_lhs", b.product_lhs.into());
    row("bound", "product_rhs", b.product_rhs.into());
    row("bound", "holds", b.holds.into());
    row("bound", "count_lhs", b.count_lhs.into());
    row("bound", "count_rhs", b.count_rhs.into());
    Ok(t)
}

pub fn generate(args: &Args) -> CoefficientData {
    let spec = RandomSpec { dim: args.dim, max_width: args.support_width, norm_bound: args.norm_bound, ..Default::default() };
    random_instance(&spec, args.seed)
}
