//! Coefficient model {A_n}, {B_n}, moment sums, the truncated matrix and instance files.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::block::{self, OperatorBlock};
use crate::error::{Error, Result};
use crate::tol;

/// Hermitian coefficient sequences of a block Jacobi operator with finite perturbation support.
///
/// `A_n` may differ from I for n ∈ [n_min − 1, n_max] and `B_n` from 0 for n ∈ [n_min, n_max].
/// Outside that range the accessors return exactly I and 0.
#[derive(Clone, Debug)]
pub struct CoefficientData {
    dim: usize,
    support: Option<(i64, i64)>,
    a: BTreeMap<i64, OperatorBlock>,
    a_inv: BTreeMap<i64, OperatorBlock>,
    b: BTreeMap<i64, OperatorBlock>,
    identity: OperatorBlock,
    zero: OperatorBlock,
}

impl CoefficientData {
    /// The free operator 𝒥₀ on ℓ²(ℤ, ℂ^d).
    pub fn free(dim: usize) -> Self {
        CoefficientData {
            dim,
            support: None,
            a: BTreeMap::new(),
            a_inv: BTreeMap::new(),
            b: BTreeMap::new(),
            identity: block::identity(dim),
            zero: block::zeros(dim),
        }
    }

    /// Validated constructor with the default invertibility tolerance.
    pub fn new(
        dim: usize,
        support: Option<(i64, i64)>,
        a: Vec<(i64, OperatorBlock)>,
        b: Vec<(i64, OperatorBlock)>,
    ) -> Result<Self> {
        Self::with_inv_tol(dim, support, a, b, tol::INV_REL)
    }

    /// As [`CoefficientData::new`], with A_n invertible iff σ_min > `inv_rel`·σ_max.
    pub fn with_inv_tol(
        dim: usize,
        support: Option<(i64, i64)>,
        a: Vec<(i64, OperatorBlock)>,
        b: Vec<(i64, OperatorBlock)>,
        inv_rel: f64,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension("dim must be positive".into()));
        }
        let mut c = CoefficientData::free(dim);
        let (lo, hi) = match support {
            Some((lo, hi)) if lo > hi => {
                return Err(Error::Support(format!("empty support interval [{lo}, {hi}]")))
            }
            Some(s) => s,
            None if a.is_empty() && b.is_empty() => return Ok(c),
            None => return Err(Error::Support("blocks given but support is empty".into())),
        };
        c.support = Some((lo, hi));
        for (which, entries, range) in [('A', a, (lo - 1, hi)), ('B', b, (lo, hi))] {
            for (n, x) in entries {
                if x.nrows() != dim || x.ncols() != dim {
                    return Err(Error::Dimension(format!(
                        "{which}_{n} is {}×{}, expected {dim}×{dim}",
                        x.nrows(),
                        x.ncols()
                    )));
                }
                if n < range.0 || n > range.1 {
                    return Err(Error::Support(format!(
                        "{which}_{n} outside [{}, {}]",
                        range.0, range.1
                    )));
                }
                let defect = block::hermitian_defect(&x);
                if defect > tol::HERMITIAN * block::norm(&x).max(1.0) {
                    return Err(Error::NonHermitian { which, n, defect });
                }
                let map = if which == 'A' { &mut c.a } else { &mut c.b };
                if map.insert(n, x).is_some() {
                    return Err(Error::Parse(format!("duplicate {which}_{n}")));
                }
            }
        }
        for (&n, x) in &c.a {
            let s = block::singular_values(x);
            let inv_tol = inv_rel * s[0];
            let smin = *s.last().unwrap();
            if smin <= inv_tol || s[0] == 0.0 {
                return Err(Error::SingularA { n, smin, tol: inv_tol });
            }
            c.a_inv.insert(n, x.clone().try_inverse().ok_or(Error::SingularA { n, smin, tol: inv_tol })?);
        }
        Ok(c)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Declared support [n_min, n_max], `None` for the free operator.
    pub fn support(&self) -> Option<(i64, i64)> {
        self.support
    }

    /// Support with the free operator mapped to [0, 0].
    pub fn span(&self) -> (i64, i64) {
        self.support.unwrap_or((0, 0))
    }

    pub fn n_min(&self) -> i64 {
        self.span().0
    }

    pub fn n_max(&self) -> i64 {
        self.span().1
    }

    pub fn a(&self, n: i64) -> &OperatorBlock {
        self.a.get(&n).unwrap_or(&self.identity)
    }

    pub fn a_inv(&self, n: i64) -> &OperatorBlock {
        self.a_inv.get(&n).unwrap_or(&self.identity)
    }

    pub fn b(&self, n: i64) -> &OperatorBlock {
        self.b.get(&n).unwrap_or(&self.zero)
    }

    pub fn identity(&self) -> &OperatorBlock {
        &self.identity
    }

    pub fn zero(&self) -> &OperatorBlock {
        &self.zero
    }

    /// Indices where A_n or B_n may be nontrivial: [n_min − 1, n_max].
    #[allow(clippy::reversed_empty_ranges)]
    pub fn perturbation_range(&self) -> std::ops::RangeInclusive<i64> {
        match self.support {
            Some((lo, hi)) => lo - 1..=hi,
            None => 1..=0,
        }
    }

    /// w_n = ‖I − A_n‖ + ‖B_n‖.
    pub fn deviation(&self, n: i64) -> f64 {
        block::norm(&(&self.identity - self.a(n))) + block::norm(self.b(n))
    }

    /// Σ |n|^k (‖I − A_n‖ + ‖B_n‖).
    pub fn moment_sum(&self, k: u32) -> f64 {
        self.perturbation_range()
            .map(|n| (n.unsigned_abs() as f64).powi(k as i32) * self.deviation(n))
            .sum()
    }

    /// Σ e^{ε|n|} (‖I − A_n‖ + ‖B_n‖).
    pub fn exponential_sum(&self, eps: f64) -> f64 {
        self.perturbation_range().map(|n| (eps * n.unsigned_abs() as f64).exp() * self.deviation(n)).sum()
    }

    /// 2 Σ ‖A_n − I‖₁ + Σ ‖B_n‖₁.
    pub fn trace_norm_budget(&self) -> f64 {
        self.perturbation_range()
            .map(|n| 2.0 * block::trace_norm(&(self.a(n) - &self.identity)) + block::trace_norm(self.b(n)))
            .sum()
    }

    /// Smallest admissible truncation half width.
    pub fn min_half_width(&self) -> usize {
        let (lo, hi) = self.span();
        lo.unsigned_abs().max(hi.unsigned_abs()) as usize + 1
    }

    /// Dirichlet truncation of the block matrix to indices [−M, M].
    pub fn truncated_matrix(&self, half_width: usize) -> Result<DMatrix<Complex64>> {
        let need = self.min_half_width();
        if half_width < need {
            return Err(Error::TruncationTooSmall { m: half_width, need });
        }
        let d = self.dim;
        let m = half_width as i64;
        let size = (2 * half_width + 1) * d;
        let mut j = DMatrix::zeros(size, size);
        for n in -m..=m {
            let r = ((n + m) as usize) * d;
            j.view_mut((r, r), (d, d)).copy_from(self.b(n));
            if n < m {
                let a = self.a(n);
                j.view_mut((r, r + d), (d, d)).copy_from(a);
                j.view_mut((r + d, r), (d, d)).copy_from(&a.adjoint());
            }
        }
        Ok(j)
    }

    /// Orthogonal sum of instances: blocks are assembled block-diagonally.
    pub fn direct_sum(parts: &[CoefficientData]) -> Result<Self> {
        let dim: usize = parts.iter().map(|p| p.dim).sum();
        let supports: Vec<(i64, i64)> = parts.iter().filter_map(|p| p.support).collect();
        if supports.is_empty() {
            return Ok(CoefficientData::free(dim));
        }
        let lo = supports.iter().map(|s| s.0).min().unwrap();
        let hi = supports.iter().map(|s| s.1).max().unwrap();
        let assemble = |f: &dyn Fn(&CoefficientData) -> OperatorBlock| {
            let mut x = block::zeros(dim);
            let mut off = 0;
            for p in parts {
                x.view_mut((off, off), (p.dim, p.dim)).copy_from(&f(p));
                off += p.dim;
            }
            x
        };
        let a = (lo - 1..=hi).map(|n| (n, assemble(&|p| p.a(n).clone()))).collect();
        let b = (lo..=hi).map(|n| (n, assemble(&|p| p.b(n).clone()))).collect();
        CoefficientData::new(dim, Some((lo, hi)), a, b)
    }

    pub fn to_file_format(&self) -> InstanceFile {
        let encode = |x: &OperatorBlock| {
            let d = self.dim;
            let mut out = Vec::with_capacity(d * d);
            for i in 0..d {
                for j in 0..d {
                    out.push([x[(i, j)].re, x[(i, j)].im]);
                }
            }
            out
        };
        let (a, b) = match self.support {
            Some((lo, hi)) => (
                (lo - 1..=hi).map(|n| BlockEntry { n, block: encode(self.a(n)) }).collect(),
                (lo..=hi).map(|n| BlockEntry { n, block: encode(self.b(n)) }).collect(),
            ),
            None => (Vec::new(), Vec::new()),
        };
        InstanceFile {
            dim: self.dim,
            support: self.support.map(|(lo, hi)| vec![lo, hi]).unwrap_or_default(),
            a,
            b,
        }
    }

    pub fn from_file_format(f: InstanceFile, inv_rel: f64) -> Result<Self> {
        let d = f.dim;
        let support = match f.support.as_slice() {
            [] => None,
            [lo, hi] => Some((*lo, *hi)),
            other => return Err(Error::Parse(format!("support must be [] or [n_min, n_max], got {other:?}"))),
        };
        let decode = |which: char, e: BlockEntry| -> Result<(i64, OperatorBlock)> {
            if e.block.len() != d * d {
                return Err(Error::Dimension(format!(
                    "{which}_{} has {} entries, expected {}",
                    e.n,
                    e.block.len(),
                    d * d
                )));
            }
            let vals: Vec<Complex64> = e.block.iter().map(|p| Complex64::new(p[0], p[1])).collect();
            Ok((e.n, DMatrix::from_row_slice(d, d, &vals)))
        };
        let a = f.a.into_iter().map(|e| decode('A', e)).collect::<Result<Vec<_>>>()?;
        let b = f.b.into_iter().map(|e| decode('B', e)).collect::<Result<Vec<_>>>()?;
        CoefficientData::with_inv_tol(d, support, a, b, inv_rel)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_json_with_tol(text, tol::INV_REL)
    }

    pub fn from_json_with_tol(text: &str, inv_rel: f64) -> Result<Self> {
        let f: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file_format(f, inv_rel)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file_format()).expect("instance serialization")
    }
}

/// Reads and validates an instance file.
pub fn load_coefficients(path: impl AsRef<Path>) -> Result<CoefficientData> {
    load_coefficients_with_tol(path, tol::INV_REL)
}

pub fn load_coefficients_with_tol(path: impl AsRef<Path>, inv_rel: f64) -> Result<CoefficientData> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    CoefficientData::from_json_with_tol(&text, inv_rel)
}

pub fn save_coefficients(c: &CoefficientData, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, c.to_json() + "\n")
        .map_err(|source| Error::Io { path: path.display().to_string(), source })
}

/// On-disk instance layout. Blocks are row-major lists of `[re, im]` pairs.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct InstanceFile {
    pub dim: usize,
    #[serde(default)]
    pub support: Vec<i64>,
    #[serde(rename = "A", default)]
    pub a: Vec<BlockEntry>,
    #[serde(rename = "B", default)]
    pub b: Vec<BlockEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BlockEntry {
    pub n: i64,
    pub block: Vec<[f64; 2]>,
}

/// A point z of the punctured disk paired with λ = z + 1/z.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralPoint {
    pub z: Complex64,
    pub lambda: Complex64,
}

pub fn zhukovsky(z: Complex64) -> Result<SpectralPoint> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroSpectralParameter);
    }
    Ok(SpectralPoint { z, lambda: z + z.inv() })
}

/// The root of z² − λz + 1 = 0 with |z| ≤ 1 (Im z ≥ 0 when both lie on the circle).
pub fn zhukovsky_inverse(lambda: Complex64) -> SpectralPoint {
    if lambda.im == 0.0 && lambda.re.abs() <= 2.0 {
        let x = lambda.re / 2.0;
        let z = Complex64::new(x, (1.0 - x * x).max(0.0).sqrt());
        return SpectralPoint { z, lambda };
    }
    let s = (lambda * lambda - 4.0).sqrt();
    let w1 = (lambda + s) / 2.0;
    let w2 = (lambda - s) / 2.0;
    // the larger root is computed without cancellation; its reciprocal is the inner one
    let w = if w1.norm() >= w2.norm() { w1 } else { w2 };
    let mut z = w.inv();
    if (z.norm() - 1.0).abs() < 1e-15 && z.im < 0.0 {
        z = z.conj();
    }
    SpectralPoint { z, lambda }
}

/// Parameters of the seeded random instance generator.
#[derive(Clone, Copy, Debug)]
pub struct RandomSpec {
    pub dim: usize,
    /// Support width is drawn uniformly from 1..=max_width.
    pub max_width: usize,
    /// Spectral-norm bound for B_n and A_n − I.
    pub norm_bound: f64,
    /// n_min is drawn uniformly from this inclusive range.
    pub start: (i64, i64),
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec { dim: 1, max_width: 5, norm_bound: 1.0, start: (-3, 2) }
    }
}

fn random_hermitian(rng: &mut ChaCha8Rng, d: usize, bound: f64) -> OperatorBlock {
    let x = DMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let h = (&x + x.adjoint()).scale(0.5);
    let nrm = block::norm(&h);
    if nrm == 0.0 {
        return h;
    }
    let target = bound * rng.random_range(0.2..1.0);
    h.scale(target / nrm)
}

/// Seeded random instance: hermitian B_n with ‖B_n‖ ≤ bound, A_n = I + E_n with E_n hermitian,
/// ‖E_n‖ ≤ bound, shifted by I when σ_min(A_n) < 0.1.
pub fn random_instance(spec: &RandomSpec, seed: u64) -> CoefficientData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = spec.dim.max(1);
    let width = rng.random_range(1..=spec.max_width.max(1)) as i64;
    let lo = rng.random_range(spec.start.0..=spec.start.1);
    let hi = lo + width - 1;
    let eye = block::identity(d);
    let a = (lo - 1..=hi)
        .map(|n| {
            let mut an = &eye + random_hermitian(&mut rng, d, spec.norm_bound);
            if block::smallest_singular_value(&an) < 0.1 {
                an += &eye;
            }
            (n, an)
        })
        .collect();
    let b = (lo..=hi).map(|n| (n, random_hermitian(&mut rng, d, spec.norm_bound))).collect();
    CoefficientData::new(d, Some((lo, hi)), a, b).expect("generator produces valid instances")
}

/// The scalar delta-potential instance: d = 1, B_0 = b, A ≡ 1.
pub fn scalar_delta(b: f64) -> CoefficientData {
    CoefficientData::new(1, Some((0, 0)), vec![], vec![(0, block::scaled_identity(1, Complex64::new(b, 0.0)))])
        .expect("valid scalar instance")
}
