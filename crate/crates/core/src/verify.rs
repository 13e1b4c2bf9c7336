//! Numerical certificates for the identities behind integrability.
//!
//! Every certificate draws its samples from `sample_seed(seed, i)`, so a run
//! is reproducible from the recorded seed alone. Samples are evaluated in
//! parallel and reduced in index order.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{lax_residual, vector_field};
use crate::error::{Error, Result};
use crate::invariants::{admissible_indices, gradient_table, invariant_count, recursion_indices, recursion_residual};
use crate::lie::n_bracket;
use crate::matrix::{same_square, stable_rank, sym_coords, Matrix, SkewMatrix, SymMatrix};
use crate::poisson::{
    bracket_frozen, bracket_lp, canonical_form, casimir_lp_gradients, casimirs_frozen, expected_frozen_leaf_dim,
    expected_lp_leaf_dim, leaf_dimensions, tensor_b, tensor_c, Multiplicity, NCanonical,
};
use crate::sampling::{random_unit_sym, rng_from_seed, sample_seed, Rng};
use crate::tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Computed and reported, but no value to check against.
    NotAssessed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankCheck {
    pub label: String,
    pub achieved: Option<usize>,
    pub expected: Option<usize>,
    /// Rank differs between `tol` and `10·tol`.
    pub unstable: bool,
}

impl RankCheck {
    fn ok(&self) -> bool {
        !self.unstable && (self.expected.is_none() || self.achieved == self.expected)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleRecord {
    pub index: usize,
    pub seed: u64,
    pub residual: f64,
    /// What achieved `residual`, e.g. the index pair.
    pub worst: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub ranks: Vec<RankCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub name: String,
    pub n: usize,
    pub p: usize,
    pub d: usize,
    pub seed: u64,
    pub sample_count: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub details: Vec<SampleRecord>,
}

impl Certificate {
    /// `Pass` iff the residual is within tolerance and every rank check with
    /// an expectation matches; `NotAssessed` if `assess` is false.
    fn assemble(name: &str, shape: (usize, usize, usize), seed: u64, tolerance: f64, details: Vec<SampleRecord>, assess: bool) -> Self {
        let max_residual = details.iter().map(|s| s.residual).fold(0.0, f64::max);
        let ranks_ok = details.iter().flat_map(|s| &s.ranks).all(RankCheck::ok);
        let verdict = if !assess {
            Verdict::NotAssessed
        } else if max_residual <= tolerance && ranks_ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Certificate {
            name: name.to_string(),
            n: shape.0,
            p: shape.1,
            d: shape.2,
            seed,
            sample_count: details.len(),
            max_residual,
            tolerance,
            verdict,
            notes: Vec::new(),
            details,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

/// Tolerances of the certificate suites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub involution: f64,
    pub casimir: f64,
    pub recursion: f64,
    pub lax: f64,
    pub rank: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            involution: tolerances::IDENTITY_TOL,
            casimir: tolerances::CASIMIR_TOL,
            recursion: tolerances::RECURSION_TOL,
            lax: tolerances::LAX_TOL,
            rank: tolerances::RANK_TOL,
        }
    }
}

impl Tolerances {
    /// Same residual tolerance for every identity-type suite.
    pub fn with_residual(self, tol: f64) -> Self {
        Self {
            involution: tol,
            casimir: tol,
            recursion: tol,
            lax: tol,
            ..self
        }
    }
}

fn check_samples(samples: usize) -> Result<()> {
    if samples == 0 {
        return Err(Error::InvalidArgument("at least one sample is required".into()));
    }
    Ok(())
}

fn run_samples<F>(samples: usize, seed: u64, f: F) -> Result<Vec<SampleRecord>>
where
    F: Fn(&mut Rng) -> Result<(f64, String, Vec<RankCheck>)> + Sync,
{
    check_samples(samples)?;
    (0..samples)
        .into_par_iter()
        .map(|index| {
            let s = sample_seed(seed, index);
            let (residual, worst, ranks) = f(&mut rng_from_seed(s))?;
            Ok(SampleRecord {
                index,
                seed: s,
                residual,
                worst,
                ranks,
            })
        })
        .collect()
}

fn shape_of(n: &SkewMatrix) -> (usize, usize, usize) {
    match canonical_form(n, tolerances::RANK_TOL) {
        Ok(nc) => (nc.n, nc.p, nc.d),
        Err(_) => (n.n(), 0, 0),
    }
}

fn nc_shape(nc: &NCanonical) -> (usize, usize, usize) {
    (nc.n, nc.p, nc.d)
}

fn unit_coords(m: &Matrix) -> Vec<f64> {
    let mut c = sym_coords(m);
    let nrm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
    if nrm > 0.0 {
        c.iter_mut().for_each(|v| *v /= nrm);
    }
    c
}

fn rank_check(label: &str, vectors: &[Vec<f64>], tol: f64, expected: Option<usize>) -> Result<RankCheck> {
    let (achieved, unstable) = match stable_rank(vectors, tol) {
        Ok(r) => (Some(r), false),
        Err(Error::RankUnstable { rank_at_tol, .. }) => (Some(rank_at_tol), true),
        Err(e) => return Err(e),
    };
    Ok(RankCheck {
        label: label.to_string(),
        achieved,
        expected,
        unstable,
    })
}

/// Largest `|{h_a, h_b}|` over all pairs of invariants, in both brackets, at
/// random unit `X`.
pub fn involution_certificate(n: &SkewMatrix, samples: usize, seed: u64, tol: f64) -> Result<Certificate> {
    let size = n.n();
    let indices = admissible_indices(size);
    let details = run_samples(samples, seed, |rng| {
        let x = random_unit_sym(size, rng);
        let table = gradient_table(&x, n)?;
        let grads = table.gradients.as_ref().expect("gradient_table fills gradients");
        let mut worst = (0.0, String::from("none"));
        for (i, a) in indices.iter().enumerate() {
            for b in &indices[i + 1..] {
                let (ga, gb) = (&grads[a], &grads[b]);
                let lp = bracket_lp(ga, gb, &x, n)?.abs();
                let fr = bracket_frozen(ga, gb, n)?.abs();
                if lp > worst.0 {
                    worst = (lp, format!("lie_poisson {a} {b}"));
                }
                if fr > worst.0 {
                    worst = (fr, format!("frozen {a} {b}"));
                }
            }
        }
        Ok((worst.0, worst.1, Vec::new()))
    })?;
    let cert = Certificate::assemble("involution", shape_of(n), seed, tol, details, true);
    Ok(if indices.len() < 2 {
        cert.with_note("fewer than two invariants; no pairs to check")
    } else {
        cert
    })
}

/// Expected gradient rank `p(p+d)` when it is asserted: `d ≤ 1` and distinct
/// `v`.
pub fn expected_independence_rank(nc: &NCanonical) -> Option<usize> {
    (nc.d <= 1 && nc.multiplicity == Multiplicity::Distinct).then_some(nc.p * (nc.p + nc.d))
}

/// Rank of `{∇h_{k,2r}(X)}` in `Sym(n)`, gradients normalized to unit norm.
/// The rank of the Hamiltonian vector fields `B_X ∇h` is recorded alongside
/// without an expectation.
pub fn independence_certificate(nc: &NCanonical, samples: usize, rank_tol: f64, seed: u64) -> Result<Certificate> {
    let n = &nc.n_original;
    let expected = expected_independence_rank(nc);
    let details = run_samples(samples, seed, |rng| {
        let x = random_unit_sym(nc.n, rng);
        let table = gradient_table(&x, n)?;
        let grads: Vec<&SymMatrix> = table.gradients.as_ref().expect("filled").values().collect();
        let coords: Vec<Vec<f64>> = grads.iter().map(|g| unit_coords(g)).collect();
        let mut flows = Vec::with_capacity(grads.len());
        for g in &grads {
            let v = tensor_b(&x, g, n)?;
            if v.norm_fro() > 0.0 {
                flows.push(unit_coords(&v));
            }
        }
        let grad_check = rank_check("gradients", &coords, rank_tol, expected)?;
        let flow_check = if flows.is_empty() {
            RankCheck {
                label: "hamiltonian_fields".into(),
                achieved: Some(0),
                expected: None,
                unstable: false,
            }
        } else {
            rank_check("hamiltonian_fields", &flows, rank_tol, None)?
        };
        let shortfall = match (grad_check.achieved, expected) {
            (Some(a), Some(e)) => a.abs_diff(e) as f64,
            _ => 0.0,
        };
        Ok((shortfall, format!("rank {:?}", grad_check.achieved), vec![grad_check, flow_check]))
    })?;
    let cert = Certificate::assemble("independence", nc_shape(nc), seed, 0.0, details, expected.is_some());
    let counted = invariant_count(nc.n).unwrap_or(0);
    Ok(if expected.is_none() {
        cert.with_note(format!(
            "no asserted rank for d = {} with {:?} spectrum; {counted} candidate invariants",
            nc.d, nc.multiplicity
        ))
    } else {
        cert
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegrabilitySummary {
    pub n: usize,
    pub p: usize,
    pub d: usize,
    /// `⌊n/2⌋⌊(n+1)/2⌋`.
    pub counted: usize,
    /// Half the generic Lie–Poisson leaf dimension, `p(p+d)`.
    pub required: usize,
    pub verdict: Verdict,
    pub note: String,
}

pub fn integrability_summary(nc: &NCanonical) -> Result<IntegrabilitySummary> {
    let counted = invariant_count(nc.n)?;
    let required = expected_lp_leaf_dim(nc.p, nc.d) / 2;
    let (verdict, note) = if nc.d <= 1 && nc.multiplicity == Multiplicity::Distinct {
        let v = if counted == required { Verdict::Pass } else { Verdict::Fail };
        (v, format!("counted {counted}, required {required}"))
    } else {
        (
            Verdict::NotAssessed,
            format!("counted {counted} vs required {required}: surplus/redundancy, no verdict"),
        )
    };
    Ok(IntegrabilitySummary {
        n: nc.n,
        p: nc.p,
        d: nc.d,
        counted,
        required,
        verdict,
        note,
    })
}

/// Annihilation of both Casimir families by their tensors and the rank of
/// each gradient family, at random `X` in the canonical basis. The frozen
/// family is built for the spectrum's own mode; a mixed spectrum skips it.
pub fn casimir_certificate(nc: &NCanonical, samples: usize, seed: u64, tol: f64) -> Result<Certificate> {
    let n = &nc.n_canonical;
    let mode = nc.natural_mode();
    let frozen = match mode {
        Some(m) => casimirs_frozen(nc, m)?,
        None => Vec::new(),
    };
    let frozen_residual = frozen.iter().map(|e| tensor_c(e, n).map(|t| t.norm_max())).try_fold(0.0, |acc: f64, r| r.map(|r| acc.max(r)))?;
    let frozen_coords: Vec<Vec<f64>> = frozen.iter().map(|e| unit_coords(e)).collect();
    let frozen_check = match mode {
        Some(m) if !frozen.is_empty() => Some(rank_check("frozen", &frozen_coords, tolerances::RANK_TOL, Some(nc.frozen_casimir_count(m)))?),
        _ => None,
    };
    let lp_expected = nc.lp_casimir_count();
    let details = run_samples(samples, seed, |rng| {
        let x = random_unit_sym(nc.n, rng);
        let grads = casimir_lp_gradients(nc, &x)?;
        let mut worst = (frozen_residual, String::from("frozen"));
        for (i, g) in grads.iter().enumerate() {
            let r = tensor_b(&x, g, n)?.norm_max();
            if r > worst.0 {
                worst = (r, format!("lie_poisson C{}", i + 1));
            }
        }
        let coords: Vec<Vec<f64>> = grads.iter().map(|g| unit_coords(g)).collect();
        let mut ranks = Vec::new();
        if !coords.is_empty() {
            ranks.push(rank_check("lie_poisson", &coords, tolerances::RANK_TOL, Some(lp_expected))?);
        }
        ranks.extend(frozen_check.clone());
        Ok((worst.0, worst.1, ranks))
    })?;
    let cert = Certificate::assemble("casimir", nc_shape(nc), seed, tol, details, true);
    Ok(if mode.is_none() {
        cert.with_note("mixed multiplicity: frozen Casimir basis not constructed")
    } else {
        cert
    })
}

/// Leaf dimensions (tensor ranks) at random `X` against `2p(p+d)` and the
/// frozen formula for the spectrum's mode.
pub fn leaf_dims_certificate(nc: &NCanonical, samples: usize, rank_tol: f64, seed: u64) -> Result<Certificate> {
    let lp = expected_lp_leaf_dim(nc.p, nc.d);
    let fr = nc.natural_mode().map(|m| expected_frozen_leaf_dim(nc.p, nc.d, m));
    let details = run_samples(samples, seed, |rng| {
        let x = random_unit_sym(nc.n, rng);
        let (dims, unstable) = match leaf_dimensions(nc, &x, rank_tol) {
            Ok(d) => ((Some(d.lie_poisson), Some(d.frozen)), false),
            Err(Error::RankUnstable { .. }) => ((None, None), true),
            Err(e) => return Err(e),
        };
        let ranks = vec![
            RankCheck {
                label: "lie_poisson".into(),
                achieved: dims.0,
                expected: Some(lp),
                unstable,
            },
            RankCheck {
                label: "frozen".into(),
                achieved: dims.1,
                expected: fr,
                unstable,
            },
        ];
        Ok((0.0, format!("dims {:?}", dims), ranks))
    })?;
    let cert = Certificate::assemble("leaf_dims", nc_shape(nc), seed, 0.0, details, true);
    Ok(if fr.is_none() {
        cert.with_note("mixed multiplicity: frozen leaf dimension reported without expectation")
    } else {
        cert
    })
}

/// `recursion_residual` over every admissible `(k, r)`.
pub fn recursion_certificate(n: &SkewMatrix, samples: usize, seed: u64, tol: f64) -> Result<Certificate> {
    let size = n.n();
    let pairs = recursion_indices(size);
    let details = run_samples(samples, seed, |rng| {
        let x = random_unit_sym(size, rng);
        let mut worst = (0.0, String::from("none"));
        for &(k, r) in &pairs {
            let res = recursion_residual(&x, n, k, r)?;
            if res > worst.0 {
                worst = (res, format!("(k, r) = ({k}, {r})"));
            }
        }
        Ok((worst.0, worst.1, Vec::new()))
    })?;
    Ok(Certificate::assemble("recursion", shape_of(n), seed, tol, details, true))
}

pub const LAX_LAMBDAS: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];

/// `lax_residual` at `λ ∈ LAX_LAMBDAS`.
pub fn lax_certificate(n: &SkewMatrix, samples: usize, seed: u64, tol: f64) -> Result<Certificate> {
    let size = n.n();
    let details = run_samples(samples, seed, |rng| {
        let x = random_unit_sym(size, rng);
        let mut worst = (0.0, String::from("none"));
        for lambda in LAX_LAMBDAS {
            let r = lax_residual(&x, n, lambda)?;
            if r > worst.0 {
                worst = (r, format!("lambda = {lambda}"));
            }
        }
        Ok((worst.0, worst.1, Vec::new()))
    })?;
    Ok(Certificate::assemble("lax", shape_of(n), seed, tol, details, true))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectionalComparison {
    pub flow_ms: SymMatrix,
    pub flow_ours: SymMatrix,
    /// `‖flow_ms − flow_ours‖_max`.
    pub difference: f64,
    pub differ: bool,
}

/// Sectional-operator flow `[X, ad_A⁻¹(ad_B X)]_N` with `A = α[[0,1],[1,0]]`
/// and `B = β[[0,1],[1,0]]`, computed from the `N`-bracket, against
/// `[X², N]`, for `N = [[0,1],[−1,0]]`.
///
/// `ad_A` maps every `X` into the diagonal matrices and acts there as
/// `diag(u, w) ↦ 2α·diag(−u, w)`, so its inverse on that subspace is
/// `diag(u, w) ↦ diag(−u, w)/(2α)`.
pub fn sectional_nonequivalence_2x2(alpha: f64, beta: f64, x: &SymMatrix) -> Result<SectionalComparison> {
    if alpha == 0.0 || !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!("alpha must be nonzero, got {alpha}")));
    }
    let n = SkewMatrix::j2();
    same_square("sectional_nonequivalence_2x2", x, &n)?;
    let off = |s: f64| SymMatrix::from_rows(&[[0.0, s], [s, 0.0]]).expect("symmetric");
    let ad_b_x = n_bracket(&off(beta), x, &n)?;
    let inv = SymMatrix::diag(&[-ad_b_x[(0, 0)] / (2.0 * alpha), ad_b_x[(1, 1)] / (2.0 * alpha)]);
    let flow_ms = n_bracket(x, &inv, &n)?;
    let flow_ours = vector_field(x, &n)?;
    let difference = (&*flow_ms - &*flow_ours).norm_max();
    Ok(SectionalComparison {
        flow_ms,
        flow_ours,
        difference,
        differ: difference > 1e-12,
    })
}

/// Random `(a, b, d, α, β)` in `[−1, 1]` with `|a − d| > 0.1`; each sample's
/// residual is the shortfall `max(0, separation − difference)`.
pub fn sectional_certificate(samples: usize, seed: u64, separation: f64) -> Result<Certificate> {
    let details = run_samples(samples, seed, |rng| {
        let (a, d) = loop {
            let a: f64 = rng.random_range(-1.0..=1.0);
            let d: f64 = rng.random_range(-1.0..=1.0);
            if (a - d).abs() > 0.1 {
                break (a, d);
            }
        };
        let b: f64 = rng.random_range(-1.0..=1.0);
        let alpha = loop {
            let v: f64 = rng.random_range(-1.0..=1.0);
            if v != 0.0 {
                break v;
            }
        };
        let beta: f64 = rng.random_range(-1.0..=1.0);
        let x = SymMatrix::from_rows(&[[a, b], [b, d]])?;
        let cmp = sectional_nonequivalence_2x2(alpha, beta, &x)?;
        let shortfall = (separation - cmp.difference).max(0.0);
        Ok((
            shortfall,
            format!("a={a:.6} b={b:.6} d={d:.6} alpha={alpha:.6} beta={beta:.6} diff={:.3e}", cmp.difference),
            Vec::new(),
        ))
    })?;
    Ok(Certificate::assemble("sectional2x2", (2, 1, 0), seed, 0.0, details, true))
}
