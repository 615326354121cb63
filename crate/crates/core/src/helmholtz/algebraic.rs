//! Linear conditions `g psi = psi^T g` on a symmetric multiplier and the
//! numerical certificate that every solution is singular.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::helmholtz::multiplier::normalized_det;
use crate::helmholtz::tensors::PolyTensors;
use crate::model::system::Jet;
use crate::sode::{eval_matrix, SodeSystem};

/// Position of `g_ij` (`i <= j`) among the `n(n+1)/2` unknowns.
pub fn sym_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * (2 * n - i + 1) / 2 + (j - i)
}

pub fn unknown_count(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Symmetric matrix from its upper-triangular entries.
pub fn assemble_multiplier(n: usize, x: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| x[sym_index(n, i, j)])
}

/// Coefficient matrix of the conditions
/// `sum_k g_ik psi^k_j - g_jk psi^k_i = 0`, `i < j`, for
/// `psi = phi, nabla phi, .., nabla^(depth-1) phi` at `jet`.
pub fn algebraic_system(sode: &SodeSystem, jet: &Jet, depth: usize) -> Result<DMatrix<f64>> {
    let n = sode.dim();
    if jet.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: jet.dim() });
    }
    if depth == 0 {
        return Err(Error::InvalidConfig("depth must be at least 1".into()));
    }
    let t = PolyTensors::new(sode, jet.r1(), depth - 1)?;
    let psis: Vec<DMatrix<f64>> = t.iterates(depth).iter().map(|m| eval_matrix(m, &jet.qdot)).collect();
    let pairs = n * (n - 1) / 2;
    let mut m = DMatrix::zeros(depth * pairs, unknown_count(n));
    let mut row = 0;
    for psi in &psis {
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    m[(row, sym_index(n, i, k))] += psi[(k, j)];
                    m[(row, sym_index(n, j, k))] -= psi[(k, i)];
                }
                row += 1;
            }
        }
    }
    Ok(m)
}

#[derive(Debug, Clone)]
pub struct Nullspace {
    /// Orthonormal basis, one vector per column.
    pub basis: DMatrix<f64>,
    pub singular_values: Vec<f64>,
    pub rank: usize,
}

/// Right nullspace by SVD; singular values at or below
/// `rel_tol * sigma_max` count as zero.
pub fn nullspace(m: &DMatrix<f64>, rel_tol: f64) -> Nullspace {
    let cols = m.ncols();
    let rows = m.nrows().max(cols);
    let mut padded = DMatrix::zeros(rows, cols);
    padded.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let null: Vec<usize> = (0..sv.len()).filter(|&k| smax == 0.0 || sv[k] <= rel_tol * smax).collect();
    let mut basis = DMatrix::zeros(cols, null.len());
    for (c, &k) in null.iter().enumerate() {
        basis.set_column(c, &vt.row(k).transpose());
    }
    Nullspace { rank: cols - null.len(), basis, singular_values: sv }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateConfig {
    pub depth: usize,
    /// Random combinations of basis vectors tested per jet.
    pub combinations: usize,
    pub det_tol: f64,
    pub rank_tol: f64,
    pub seed: u64,
}

impl Default for CertificateConfig {
    fn default() -> Self {
        CertificateConfig { depth: 3, combinations: 16, det_tol: 1e-10, rank_tol: 1e-10, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JetCertificate {
    pub q: Vec<f64>,
    pub qdot: Vec<f64>,
    pub nullity: usize,
    /// Largest normalized `|det g|` over basis vectors and combinations.
    pub max_normalized_det: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub jet: usize,
    pub multiplier: Vec<Vec<f64>>,
    pub normalized_det: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub passed: bool,
    pub seed: u64,
    pub depth: usize,
    pub det_tol: f64,
    pub jets: Vec<JetCertificate>,
    pub counterexample: Option<Counterexample>,
}

const GENERIC_TOL: f64 = 1e-8;

fn genericity_warnings(sode: &SodeSystem, jet: &Jet) -> Vec<String> {
    let mut w = Vec::new();
    if jet.qdot[0].abs() < GENERIC_TOL {
        w.push("non-generic jet: r1_dot vanishes".to_string());
    }
    if jet.qdot.len() > 1 && jet.qdot[1].abs() < GENERIC_TOL {
        w.push("non-generic jet: r2_dot vanishes".to_string());
    }
    if let Some(sys) = sode.owner() {
        if let Ok(a) = sys.coefficient_values(jet.r1()) {
            for (k, v) in a.iter().enumerate() {
                if v.abs() < GENERIC_TOL {
                    w.push(format!("non-generic jet: coefficient {} vanishes", k + 1));
                }
            }
        }
    }
    w
}

/// Passes when at every jet each nullspace element of the algebraic system
/// (basis vectors and random combinations) is a singular multiplier.
pub fn singularity_certificate(sode: &SodeSystem, jets: &[Jet], cfg: &CertificateConfig) -> Result<CertificateReport> {
    let n = sode.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut report = CertificateReport {
        passed: true,
        seed: cfg.seed,
        depth: cfg.depth,
        det_tol: cfg.det_tol,
        jets: Vec::with_capacity(jets.len()),
        counterexample: None,
    };
    for (idx, jet) in jets.iter().enumerate() {
        let m = algebraic_system(sode, jet, cfg.depth)?;
        let ns = nullspace(&m, cfg.rank_tol);
        let k = ns.basis.ncols();
        let mut candidates: Vec<Vec<f64>> = (0..k).map(|c| ns.basis.column(c).iter().copied().collect()).collect();
        if k > 1 {
            for _ in 0..cfg.combinations {
                let w: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
                candidates.push((&ns.basis * DMatrix::from_vec(k, 1, w)).iter().copied().collect());
            }
        }
        let mut worst = 0.0f64;
        for x in candidates {
            let g = assemble_multiplier(n, &x);
            let d = normalized_det(&g);
            if d > worst {
                worst = d;
            }
            if d >= cfg.det_tol && report.counterexample.is_none() {
                report.passed = false;
                report.counterexample = Some(Counterexample {
                    jet: idx,
                    multiplier: (0..n).map(|i| g.row(i).iter().copied().collect()).collect(),
                    normalized_det: d,
                });
            }
        }
        report.jets.push(JetCertificate {
            q: jet.q.clone(),
            qdot: jet.qdot.clone(),
            nullity: k,
            max_normalized_det: worst,
            warnings: genericity_warnings(sode, jet),
        });
    }
    Ok(report)
}
