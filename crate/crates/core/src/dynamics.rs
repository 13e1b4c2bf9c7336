//! Time integration of `Ẋ = [X², N] = X²N − NX²`, in full form and in the
//! `(S, A, B)` block form adapted to a degenerate `N`, with monitoring of
//! the conserved quantities.

use log::{debug, warn};
use serde::{Deserialize, Serialize};

use crate::error::{dim_err, Error, Result};
use crate::invariants::{invariant_table, InvariantTable};
use crate::lie::BlockDecomp;
use crate::matrix::{commutator, eig_sym, same_square, Matrix, SkewMatrix, SymMatrix};
use crate::poisson::{canonical_form, casimirs_lp, NCanonical};
use crate::tolerances;

/// `X²N − NX²`.
pub fn vector_field(x: &SymMatrix, n: &SkewMatrix) -> Result<SymMatrix> {
    same_square("vector_field", x, n)?;
    Ok(vector_field_unchecked(x, n))
}

fn vector_field_unchecked(x: &Matrix, n: &Matrix) -> SymMatrix {
    let x2 = x * x;
    SymMatrix::symmetrize(&(&(&x2 * n) - &(n * &x2)))
}

/// `‖[X², N] − [X + λN, NX + XN + λN²]‖_max`.
pub fn lax_residual(x: &SymMatrix, n: &SkewMatrix, lambda: f64) -> Result<f64> {
    same_square("lax_residual", x, n)?;
    let (xm, nm): (&Matrix, &Matrix) = (x, n);
    let mut l = xm.clone();
    l.axpy(lambda, nm);
    let mut m = &(nm * xm) + &(xm * nm);
    m.axpy(lambda, &(nm * nm));
    let lax = commutator(&l, &m)?;
    Ok((&*vector_field_unchecked(xm, nm) - &lax).norm_max())
}

/// `(Ṡ, Ȧ, Ḃ) = ([S² + AAᵀ, N̄], −N̄(SA + AB), 0)`.
pub fn block_vector_field(b: &BlockDecomp, nbar: &SkewMatrix) -> Result<BlockDecomp> {
    if nbar.n() != b.two_p() {
        return Err(dim_err(
            "block_vector_field",
            format!("N̄ is {0}x{0}, S is {1}x{1}", nbar.n(), b.two_p()),
        ));
    }
    let s: &Matrix = &b.s;
    let nb: &Matrix = nbar;
    let mut q = s * s;
    q += &(&b.a * &b.a.transpose());
    let s_dot = SymMatrix::symmetrize(&(&(&q * nb) - &(nb * &q)));
    let sa_ab = &(s * &b.a) + &(&b.a * &*b.b);
    let a_dot = -&(nb * &sa_ab);
    Ok(BlockDecomp {
        s: s_dot,
        a: a_dot,
        b: SymMatrix::zeros(b.d()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    Rk4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub step: f64,
    pub t_end: f64,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default = "default_stride")]
    pub monitor_stride: usize,
}

fn default_stride() -> usize {
    1
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            step: 1e-3,
            t_end: 1.0,
            scheme: Scheme::Rk4,
            monitor_stride: 1,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidArgument(format!("step must be positive, got {}", self.step)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidArgument(format!("t_end must be non-negative, got {}", self.t_end)));
        }
        if self.t_end > 0.0 && self.step > self.t_end {
            return Err(Error::InvalidArgument(format!(
                "step {} exceeds t_end {}",
                self.step, self.t_end
            )));
        }
        if self.monitor_stride == 0 {
            return Err(Error::InvalidArgument("monitor_stride must be at least 1".into()));
        }
        Ok(())
    }

    /// Step count; the last step is shortened to land on `t_end`. Zero for
    /// `t_end = 0`, which records only the initial state.
    pub fn steps(&self) -> usize {
        let raw = self.t_end / self.step;
        let rounded = raw.round();
        if (raw - rounded).abs() <= 1e-9 * raw.max(1.0) {
            rounded as usize
        } else {
            raw.ceil() as usize
        }
    }

    fn time(&self, i: usize, steps: usize) -> f64 {
        if i == steps {
            self.t_end
        } else {
            i as f64 * self.step
        }
    }
}

/// Quantities recorded at one monitored time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Monitor {
    pub invariants: InvariantTable,
    /// Lie–Poisson Casimirs; empty when they are not defined at `X(0)`.
    pub casimirs: Vec<f64>,
    /// Eigenvalues of `X`, ascending.
    pub spectrum: Vec<f64>,
}

/// Largest drift of each monitored family against `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Drift {
    pub invariants: f64,
    pub casimirs: f64,
    pub spectrum: f64,
}

impl Drift {
    pub fn max(&self) -> f64 {
        self.invariants.max(self.casimirs).max(self.spectrum)
    }

    fn merge(self, o: Drift) -> Drift {
        Drift {
            invariants: self.invariants.max(o.invariants),
            casimirs: self.casimirs.max(o.casimirs),
            spectrum: self.spectrum.max(o.spectrum),
        }
    }
}

/// Relative drift, absolute when `|v0|` is below `DRIFT_ABS_FLOOR`.
pub fn drift(v0: f64, v: f64) -> f64 {
    let diff = (v - v0).abs();
    if v0.abs() < tolerances::DRIFT_ABS_FLOOR {
        diff
    } else {
        diff / v0.abs()
    }
}

fn max_drift<'a>(a: impl IntoIterator<Item = &'a f64>, b: impl IntoIterator<Item = &'a f64>) -> f64 {
    a.into_iter().zip(b).map(|(x0, x)| drift(*x0, *x)).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<SymMatrix>,
    pub monitors: Vec<Monitor>,
    /// Largest re-symmetrization correction applied over the run.
    pub max_resym: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &SymMatrix {
        self.states.last().expect("trajectory has at least the initial state")
    }

    /// Drift of row `i` against row 0.
    pub fn drift_at(&self, i: usize) -> Drift {
        let m0 = &self.monitors[0];
        let m = &self.monitors[i];
        Drift {
            invariants: max_drift(m0.invariants.values.values(), m.invariants.values.values()),
            casimirs: max_drift(&m0.casimirs, &m.casimirs),
            spectrum: max_drift(&m0.spectrum, &m.spectrum),
        }
    }

    pub fn max_drift(&self) -> Drift {
        (0..self.len()).map(|i| self.drift_at(i)).fold(Drift::default(), Drift::merge)
    }
}

fn monitor(x: &SymMatrix, n: &SkewMatrix, nc: Option<&NCanonical>) -> Result<Monitor> {
    let casimirs = match nc {
        Some(nc) => casimirs_lp(nc, &nc.to_canonical(x)?)?,
        None => Vec::new(),
    };
    Ok(Monitor {
        invariants: invariant_table(x, n)?,
        casimirs,
        spectrum: eig_sym(x, tolerances::EIG_TOL)?.values,
    })
}

fn rk4_step<S: Clone>(
    x: &S,
    h: f64,
    f: impl Fn(&S) -> S,
    axpy: impl Fn(&S, f64, &S) -> S,
) -> S {
    let k1 = f(x);
    let k2 = f(&axpy(x, 0.5 * h, &k1));
    let k3 = f(&axpy(x, 0.5 * h, &k2));
    let k4 = f(&axpy(x, h, &k3));
    let mut out = axpy(x, h / 6.0, &k1);
    out = axpy(&out, h / 3.0, &k2);
    out = axpy(&out, h / 3.0, &k3);
    axpy(&out, h / 6.0, &k4)
}

/// Classical RK4 with re-symmetrization after every step. States and
/// monitors are recorded at `t = 0`, every `monitor_stride` steps, and at
/// `t_end`.
pub fn integrate(x0: &SymMatrix, n: &SkewMatrix, cfg: &IntegratorConfig) -> Result<Trajectory> {
    same_square("integrate", x0, n)?;
    cfg.validate()?;
    if !x0.is_finite() || !n.is_finite() {
        return Err(Error::NonFinite);
    }
    let nm: &Matrix = n;
    let nc = canonical_form(n, tolerances::RANK_TOL).ok();
    let nc = match nc {
        Some(nc) if casimirs_lp(&nc, &nc.to_canonical(x0)?).is_ok() => Some(nc),
        Some(_) => {
            warn!("Lie–Poisson Casimirs undefined at X(0); not monitored");
            None
        }
        None => {
            warn!("canonical form of N unavailable; Casimirs not monitored");
            None
        }
    };

    let steps = cfg.steps();
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![x0.clone()],
        monitors: vec![monitor(x0, n, nc.as_ref())?],
        max_resym: 0.0,
    };
    let f = |x: &Matrix| vector_field_unchecked(x, nm).into_matrix();
    let axpy = |x: &Matrix, s: f64, y: &Matrix| {
        let mut out = x.clone();
        out.axpy(s, y);
        out
    };
    let mut x = x0.as_matrix().clone();
    for i in 1..=steps {
        let t_prev = cfg.time(i - 1, steps);
        let t = cfg.time(i, steps);
        let raw = rk4_step(&x, t - t_prev, f, axpy);
        if !raw.is_finite() {
            return Err(Error::NumericalAbort { t });
        }
        let correction = raw.symmetry_defect();
        traj.max_resym = traj.max_resym.max(correction);
        if correction > tolerances::RESYM_LOG {
            debug!("t = {t:e}: re-symmetrization correction {correction:e}");
        }
        let sym = SymMatrix::symmetrize(&raw);
        if i % cfg.monitor_stride == 0 || i == steps {
            traj.times.push(t);
            traj.monitors.push(monitor(&sym, n, nc.as_ref())?);
            traj.states.push(sym.clone());
        }
        x = sym.into_matrix();
    }
    Ok(traj)
}

#[derive(Debug, Clone)]
pub struct BlockTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<BlockDecomp>,
}

/// RK4 on the block system. `B` is constant, so only `S` and `A` evolve.
pub fn integrate_block(b0: &BlockDecomp, nbar: &SkewMatrix, cfg: &IntegratorConfig) -> Result<BlockTrajectory> {
    cfg.validate()?;
    block_vector_field(b0, nbar)?;
    let steps = cfg.steps();
    let mut out = BlockTrajectory {
        times: vec![0.0],
        states: vec![b0.clone()],
    };
    let f = |b: &BlockDecomp| block_vector_field(b, nbar).expect("sizes checked");
    let axpy = |x: &BlockDecomp, s: f64, y: &BlockDecomp| {
        let mut out = x.clone();
        out.axpy(s, y);
        out
    };
    let mut b = b0.clone();
    for i in 1..=steps {
        let t_prev = cfg.time(i - 1, steps);
        let t = cfg.time(i, steps);
        b = rk4_step(&b, t - t_prev, f, axpy);
        if !b.is_finite() {
            return Err(Error::NumericalAbort { t });
        }
        if i % cfg.monitor_stride == 0 || i == steps {
            out.times.push(t);
            out.states.push(b.clone());
        }
    }
    Ok(out)
}
