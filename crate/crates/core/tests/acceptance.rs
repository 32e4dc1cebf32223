//! Acceptance suite: one PASS/FAIL line per criterion.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use jacobi_scatter::block::{self, BlockMatrix2};
use jacobi_scatter::coefficients::{random_instance, scalar_delta, RandomSpec};
use jacobi_scatter::jost::{build_series_data, jost_recursion, jost_series, Species, Window};
use jacobi_scatter::scattering::{
    circle_limit, scattering_data, scattering_extension, scattering_relation_residual, transfer_relation_residual,
};
use jacobi_scatter::spectrum::{
    compare_reports, eigenvalue_bounds, persistent_interior_eigenvalues, truncation_eigen, bs_zero_scan, wronskian_scan,
};
use jacobi_scatter::tol;
use jacobi_scatter::wronskian::{adjoint_conjugate_solution, alpha_beta, wronskian_constant, z_operator, BasisPair};
use jacobi_scatter::{CoefficientData, Complex64, EigenvalueReport};

/// Criteria whose failure is recorded as a known deviation; an unexpected pass is also reported.
const KNOWN_FAILURES: &[u32] = &[5];

/// The M = 80 truncation resolves eigenvalues with |z| up to this radius.
const TRUNCATION_RADIUS: f64 = 0.9;

type Criterion = (u32, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(checks: &[(&str, f64, f64)], limit: Option<(Duration, Duration)>) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for &(name, value, tol) in checks {
        let ok = value <= tol;
        pass &= ok;
        parts.push(format!("{name}={value:.2e}{}{tol:.0e}", if ok { "<=" } else { ">" }));
    }
    if let Some((took, max)) = limit {
        pass &= took <= max;
        parts.push(format!("time={:.2}s/{}s", took.as_secs_f64(), max.as_secs()));
    }
    Outcome { pass, detail: parts.join(" ") }
}

fn suite(seeds: u64) -> Vec<CoefficientData> {
    (0..seeds)
        .map(|seed| random_instance(&RandomSpec { dim: 1 + (seed % 3) as usize, ..Default::default() }, seed))
        .collect()
}

fn circle(count: usize) -> Vec<Complex64> {
    (0..count).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / count as f64)).collect()
}

fn off_edges(z: &Complex64) -> bool {
    let th = z.arg().abs();
    th > tol::EDGE_BAND && PI - th > tol::EDGE_BAND
}

fn free_exactness() -> Outcome {
    let start = Instant::now();
    let mut jost: f64 = 0.0;
    let mut wr: f64 = 0.0;
    for d in 1..=3 {
        let c = CoefficientData::free(d);
        let w = Window::new(-12, 12);
        let series = build_series_data(&c, w).unwrap();
        for z in circle(64).into_iter().chain([Complex64::new(0.3, 0.4), Complex64::new(-0.8, 0.0)]) {
            for s in [Species::Plus, Species::Minus] {
                let rec = jost_recursion(&c, s, z, w).unwrap();
                let ser = jost_series(&series, s, z, w).unwrap();
                for n in w.lo..=w.hi {
                    let exact = block::scaled_identity(d, z.powi(s.sign() as i32 * n as i32));
                    jost = jost.max(block::norm(&(rec.get(n).unwrap() - &exact)) / exact[(0, 0)].norm());
                    jost = jost.max(block::norm(&(ser.get(n).unwrap() - &exact)) / exact[(0, 0)].norm());
                }
            }
        }
        for z in circle(64).into_iter().filter(off_edges) {
            let left = adjoint_conjugate_solution(&c, Species::Plus, z, w).unwrap();
            let right = jost_recursion(&c, Species::Plus, z.inv(), w).unwrap();
            let v = wronskian_constant(&c, &left, &right).unwrap().value;
            wr = wr.max(block::norm(&(v - block::scaled_identity(d, z.inv() - z))));
        }
    }
    outcome(&[("jost", jost, 1e-13), ("wronskian", wr, 1e-12)], Some((start.elapsed(), Duration::from_secs(1))))
}

fn dual_method() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let reals: Vec<Complex64> =
        (0..16).map(|k| Complex64::new(if k % 2 == 0 { 1.0 } else { -1.0 } * (0.05 + 0.06 * (k / 2) as f64 * 2.0), 0.0)).collect();
    for c in suite(50) {
        let w = Window::default_for(&c);
        let series = build_series_data(&c, w).unwrap();
        for z in circle(64).into_iter().chain(reals.iter().copied()) {
            for s in [Species::Plus, Species::Minus] {
                let rec = jost_recursion(&c, s, z, w).unwrap();
                let ser = jost_series(&series, s, z, w).unwrap();
                worst = worst.max(rec.max_diff(&ser) / rec.max_norm().max(1.0));
            }
        }
    }
    outcome(&[("relative", worst, 1e-9)], Some((start.elapsed(), Duration::from_secs(30))))
}

fn wronskian_algebra() -> Outcome {
    let (mut constancy, mut unitarity, mut adjoint, mut zy): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for c in suite(50) {
        let w = Window::default_for(&c);
        let circle_pts: Vec<Complex64> = circle(16).into_iter().filter(off_edges).collect();
        let disk_pts: Vec<Complex64> = circle_pts.iter().map(|z| z * 0.7).collect();
        for &z in circle_pts.iter().chain(&disk_pts) {
            for (s, t) in [(Species::Plus, Species::Minus), (Species::Minus, Species::Plus), (Species::Plus, Species::Plus)] {
                let left = adjoint_conjugate_solution(&c, s, z, w).unwrap();
                let right = jost_recursion(&c, t, z, w).unwrap();
                constancy = match wronskian_constant(&c, &left, &right) {
                    Ok(v) => constancy.max(v.deviation / v.tolerance * tol::CONSTANCY),
                    Err(_) => f64::INFINITY,
                };
            }
            let ab = alpha_beta(&c, z).unwrap();
            let conj = alpha_beta(&c, z.conj()).unwrap();
            let conj_inv = alpha_beta(&c, z.conj().inv()).unwrap();
            for s in [Species::Plus, Species::Minus] {
                let scale = block::norm(ab.alpha(s)).max(1.0);
                adjoint = adjoint.max(block::norm(&(ab.alpha(s).adjoint() - conj.alpha(s.other()))) / scale);
                adjoint = adjoint.max(block::norm(&(ab.beta(s).adjoint() + conj_inv.beta(s.other()))) / scale);
                if z.norm() == 1.0 || (z.norm() - 1.0).abs() < 1e-15 {
                    let (a, b) = (ab.alpha(s), ab.beta(s));
                    let r = a.adjoint() * a - b.adjoint() * b - block::identity(c.dim());
                    unitarity = unitarity.max(block::norm(&r) / scale.powi(2));
                }
            }
            for basis in [BasisPair::Plus, BasisPair::Minus, BasisPair::Jost] {
                if let Ok(zo) = z_operator(&c, z, c.n_min(), basis) {
                    let scale = (zo.z_j.norm() * zo.y_j.norm()).max(1.0);
                    zy = zy.max(zo.left_inverse_residual / scale);
                }
            }
        }
    }
    outcome(&[("constancy", constancy, 1e-10), ("unitarity", unitarity, 1e-9), ("adjoint", adjoint, 1e-9), ("ZY", zy, 1e-9)], None)
}

fn transfer_scattering() -> Outcome {
    let (mut inverse, mut relations, mut alpha_inv): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for c in suite(50) {
        let w = Window::default_for(&c);
        for z in circle(64).into_iter().filter(off_edges) {
            let sd = scattering_data(&c, z).unwrap();
            let scale = (sd.m.norm() * sd.m_reverse.norm()).max(1.0);
            inverse = inverse.max(sd.inverse_residual() / scale);
            relations = relations.max(transfer_relation_residual(&c, z, &sd.m, w).unwrap());
            relations = relations.max(scattering_relation_residual(&c, z, &sd.s, w).unwrap());
            let ab = &sd.coefficients;
            for s in [Species::Plus, Species::Minus] {
                let inv = ab.alpha(s).clone().try_inverse().unwrap();
                alpha_inv = alpha_inv.max(block::norm(&inv) - 1.0);
            }
        }
    }
    outcome(&[("MM⁻", inverse, 1e-8), ("relations", relations, 1e-8), ("‖α⁻¹‖-1", alpha_inv, 1e-9)], None)
}

fn continuity_extension() -> Outcome {
    let start = Instant::now();
    let (mut near, mut richardson): (f64, f64) = (0.0, 0.0);
    for c in suite(20) {
        for z0 in [1.0, -1.0] {
            let ext = scattering_extension(&c, z0).unwrap();
            let at = scattering_data(&c, Complex64::from_polar(1.0, 1e-4) * z0).unwrap().s;
            near = near.max(ext.s.distance(&at));
            richardson = richardson.max(ext.s.distance(&circle_limit(&c, z0, 1e-4).unwrap()));
        }
    }
    outcome(&[("near", near, 1e-3), ("richardson", richardson, 1e-6)], Some((start.elapsed(), Duration::from_secs(10))))
}

fn three_way(c: &CoefficientData) -> [EigenvalueReport; 3] {
    [
        wronskian_scan(c, tol::SCAN_GRID, tol::REFINE_REL),
        truncation_eigen(c, 80, tol::TRUNCATION_MARGIN).unwrap(),
        bs_zero_scan(c, tol::SCAN_GRID),
    ]
}

fn spectrum_agreement() -> Outcome {
    let start = Instant::now();
    let mut count_mismatch = 0.0;
    let mut z_diff: f64 = 0.0;
    for c in suite(50) {
        let [ws, tr, bs] = three_way(&c);
        let pairs = [
            compare_reports(&ws, &bs),
            compare_reports(&ws.within(TRUNCATION_RADIUS), &tr.within(TRUNCATION_RADIUS)),
        ];
        for a in pairs {
            if !a.same_count || !a.same_multiplicities {
                count_mismatch += 1.0;
            }
            z_diff = z_diff.max(a.max_z_diff);
        }
    }
    let mut closed: f64 = 0.0;
    for r in three_way(&scalar_delta(1.5)) {
        if r.items.len() != 1 {
            closed = f64::INFINITY;
            continue;
        }
        closed = closed.max((r.items[0].z - 0.5).abs()).max((r.items[0].lambda - 2.5).abs());
    }
    outcome(
        &[("count_mismatch", count_mismatch, 0.0), ("z", z_diff, 1e-6), ("closed_form", closed, 1e-8)],
        Some((start.elapsed(), Duration::from_secs(60))),
    )
}

fn bound_verification() -> Outcome {
    let start = Instant::now();
    let mut violations = 0.0;
    for c in suite(200) {
        let report = wronskian_scan(&c, tol::SCAN_GRID, tol::REFINE_REL);
        for radius in [0.5, 0.8, 0.95] {
            let b = eigenvalue_bounds(&c, radius, radius / 2.0, &report.within(radius)).unwrap();
            if !b.holds || b.count_lhs > b.count_rhs {
                violations += 1.0;
            }
        }
    }
    let c = scalar_delta(1.5);
    let report = wronskian_scan(&c, tol::SCAN_GRID, tol::REFINE_REL);
    let b = eigenvalue_bounds(&c, 0.9, 0.45, &report).unwrap();
    let closed = (b.product_lhs - 1.8).abs().max((b.product_rhs.ln() - 0.9 / 0.19 * 1.5).abs());
    outcome(&[("violations", violations, 0.0), ("closed_form", closed, 1e-9)], Some((start.elapsed(), Duration::from_secs(60))))
}

fn spectrum_sanity() -> Outcome {
    let mut embedded = 0.0;
    let mut edge = 0.0;
    let mut decomposition: f64 = 0.0;
    let instances = suite(20);
    for c in &instances {
        embedded += persistent_interior_eigenvalues(c, 40, tol::EDGE_BAND).unwrap().len() as f64;
        for r in three_way(c) {
            edge += r.items.iter().filter(|i| (i.lambda.abs() - 2.0).abs() <= tol::TRUNCATION_MARGIN).count() as f64;
        }
    }
    let free_norm = block::norm(&CoefficientData::free(1).truncated_matrix(200).unwrap());
    for pair in instances.chunks(2) {
        let sum = CoefficientData::direct_sum(pair).unwrap();
        let mut parts: Vec<(f64, f64)> = pair
            .iter()
            .flat_map(|c| wronskian_scan(c, tol::SCAN_GRID, tol::REFINE_REL).items)
            .map(|i| (i.lambda, i.z))
            .collect();
        parts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let parts: Vec<f64> = parts.into_iter().map(|p| p.1).collect();
        let whole = truncation_eigen(&sum, 80, tol::TRUNCATION_MARGIN).unwrap();
        let mut expect: Vec<f64> = pair
            .iter()
            .flat_map(|c| truncation_eigen(c, 80, tol::TRUNCATION_MARGIN).unwrap().items)
            .flat_map(|i| std::iter::repeat_n(i.lambda, i.multiplicity))
            .collect();
        expect.sort_by(|a, b| a.total_cmp(b));
        let got: Vec<f64> = whole.items.iter().flat_map(|i| std::iter::repeat_n(i.lambda, i.multiplicity)).collect();
        if got.len() != expect.len() {
            decomposition = f64::INFINITY;
            continue;
        }
        for (g, e) in got.iter().zip(&expect) {
            decomposition = decomposition.max((g - e).abs());
        }
        let z = Complex64::from_polar(1.0, 0.9);
        let s_sum = scattering_data(&sum, z).unwrap().s;
        let s_parts: Vec<BlockMatrix2> = pair.iter().map(|c| scattering_data(c, z).unwrap().s).collect();
        let (d0, d1) = (pair[0].dim(), pair[1].dim());
        for i in 0..2 {
            for j in 0..2 {
                let blk = s_sum.get(i, j);
                decomposition = decomposition.max(block::norm(&(blk.view((0, 0), (d0, d0)) - s_parts[0].get(i, j))));
                decomposition = decomposition.max(block::norm(&(blk.view((d0, d0), (d1, d1)) - s_parts[1].get(i, j))));
                decomposition = decomposition.max(blk.view((0, d0), (d0, d1)).norm()).max(blk.view((d0, 0), (d1, d0)).norm());
            }
        }
        let scanned: Vec<f64> = wronskian_scan(&sum, tol::SCAN_GRID, tol::REFINE_REL)
            .items
            .iter()
            .flat_map(|i| std::iter::repeat_n(i.z, i.multiplicity))
            .collect();
        if scanned.len() != parts.len() {
            decomposition = f64::INFINITY;
        } else {
            for (g, e) in scanned.iter().zip(&parts) {
                decomposition = decomposition.max((g - e).abs());
            }
        }
    }
    outcome(
        &[("embedded", embedded, 0.0), ("edge", edge, 0.0), ("free_norm", (2.0 - free_norm).abs(), 1e-3), ("decomposition", decomposition, 1e-10)],
        None,
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (1, "free-operator exactness", free_exactness),
        (2, "dual-method Jost agreement", dual_method),
        (3, "Wronskian algebra", wronskian_algebra),
        (4, "transfer/scattering algebra", transfer_scattering),
        (5, "continuity extension", continuity_extension),
        (6, "three-way spectrum agreement", spectrum_agreement),
        (7, "bound verification", bound_verification),
        (8, "spectrum sanity", spectrum_sanity),
    ];
    let mut unexpected = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let o = run();
        let known = KNOWN_FAILURES.contains(&id);
        let tag = match (o.pass, known) {
            (true, false) => "PASS",
            (false, false) => "FAIL",
            (false, true) => "FAIL (known deviation)",
            (true, true) => "PASS (listed as known failure)",
        };
        if o.pass == known {
            unexpected += 1;
        }
        println!("[{id}] {tag} {name}: {} ({:.2}s)", o.detail, start.elapsed().as_secs_f64());
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
