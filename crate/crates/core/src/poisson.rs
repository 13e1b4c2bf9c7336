//! The two compatible Poisson structures on `Sym(n)`, the orthogonal
//! canonical form of `N`, both Casimir families and symplectic-leaf
//! dimensions.
//!
//! With the Frobenius pairing as identification, the Lie–Poisson tensor is
//! `B_X(Y) = XYN − NYX` and the frozen tensor is `C_X(Y) = YN − NY`
//! (independent of `X`). Brackets are `{f, g}(X) = ⟨⟨∇f, P_X ∇g⟩⟩`.

use serde::Serialize;

use crate::error::{dim_err, Error, Result};
use crate::matrix::{
    argmax, dot, eig_sym, pair, same_square, stable_rank, sym_basis, sym_coords, Matrix, SkewMatrix,
    SymMatrix,
};
use crate::tolerances;

/// `B_X(Y) = XYN − NYX`.
pub fn tensor_b(x: &SymMatrix, y: &SymMatrix, n: &SkewMatrix) -> Result<SymMatrix> {
    same_square("tensor_b", x, y)?;
    same_square("tensor_b", x, n)?;
    Ok(tensor_b_unchecked(x, y, n))
}

pub(crate) fn tensor_b_unchecked(x: &Matrix, y: &Matrix, n: &Matrix) -> SymMatrix {
    let xyn = &(x * y) * n;
    let nyx = &(n * y) * x;
    SymMatrix::symmetrize(&(&xyn - &nyx))
}

/// `C_X(Y) = YN − NY`.
pub fn tensor_c(y: &SymMatrix, n: &SkewMatrix) -> Result<SymMatrix> {
    same_square("tensor_c", y, n)?;
    Ok(tensor_c_unchecked(y, n))
}

pub(crate) fn tensor_c_unchecked(y: &Matrix, n: &Matrix) -> SymMatrix {
    SymMatrix::symmetrize(&(&(y * n) - &(n * y)))
}

/// Lie–Poisson bracket `⟨⟨∇f, B_X(∇g)⟩⟩ = −trace[X(∇f N ∇g − ∇g N ∇f)]`.
pub fn bracket_lp(
    grad_f: &SymMatrix,
    grad_g: &SymMatrix,
    x: &SymMatrix,
    n: &SkewMatrix,
) -> Result<f64> {
    same_square("bracket_lp", grad_f, grad_g)?;
    Ok(pair(grad_f, &*tensor_b(x, grad_g, n)?))
}

/// Frozen bracket `⟨⟨∇f, C_X(∇g)⟩⟩ = −trace(∇f N ∇g − ∇g N ∇f)`.
pub fn bracket_frozen(grad_f: &SymMatrix, grad_g: &SymMatrix, n: &SkewMatrix) -> Result<f64> {
    same_square("bracket_frozen", grad_f, grad_g)?;
    Ok(pair(grad_f, &*tensor_c(grad_g, n)?))
}

/// Multiplicity pattern of the nonzero eigenvalue pairs `±i v_k` of `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Multiplicity {
    /// All `v_k` distinct (includes `p ≤ 1`).
    Distinct,
    /// All `v_k` equal, `p ≥ 2`.
    Equal,
    /// Anything else.
    Mixed,
}

impl Multiplicity {
    fn label(self) -> &'static str {
        match self {
            Multiplicity::Distinct => "distinct",
            Multiplicity::Equal => "equal",
            Multiplicity::Mixed => "mixed",
        }
    }
}

/// Which frozen Casimir basis to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CasimirMode {
    Distinct,
    Equal,
}

/// `N` together with its orthogonal canonical form. `q` maps the original
/// basis to the canonical one: `Q N Qᵀ = [[0, V, 0], [−V, 0, 0], [0, 0, 0]]`.
/// `nbar`, `nhat` and `n_canonical` are stored in the canonical basis.
#[derive(Debug, Clone, Serialize)]
pub struct NCanonical {
    pub n: usize,
    pub p: usize,
    pub d: usize,
    #[serde(skip)]
    pub n_original: SkewMatrix,
    pub q: Matrix,
    pub v: Vec<f64>,
    #[serde(skip)]
    pub nbar: SkewMatrix,
    #[serde(skip)]
    pub nhat: Matrix,
    #[serde(skip)]
    pub n_canonical: SkewMatrix,
    pub multiplicity: Multiplicity,
    pub rank_tol: f64,
}

impl NCanonical {
    pub fn two_p(&self) -> usize {
        2 * self.p
    }

    /// `Q X Qᵀ`.
    pub fn to_canonical(&self, x: &SymMatrix) -> Result<SymMatrix> {
        x.conjugate(&self.q)
    }

    /// `Qᵀ X Q`.
    pub fn from_canonical(&self, x: &SymMatrix) -> Result<SymMatrix> {
        x.conjugate(&self.q.transpose())
    }

    /// Number of Lie–Poisson Casimirs, `p + d(d+1)/2`.
    pub fn lp_casimir_count(&self) -> usize {
        self.p + self.d * (self.d + 1) / 2
    }

    /// Number of frozen Casimirs for the given mode.
    pub fn frozen_casimir_count(&self, mode: CasimirMode) -> usize {
        let dd = self.d * (self.d + 1) / 2;
        match mode {
            CasimirMode::Distinct => self.p + dd,
            CasimirMode::Equal => self.p * self.p + dd,
        }
    }

    /// Frozen Casimir mode implied by the spectrum, if it is one of the two
    /// extreme patterns.
    pub fn natural_mode(&self) -> Option<CasimirMode> {
        match self.multiplicity {
            Multiplicity::Distinct => Some(CasimirMode::Distinct),
            Multiplicity::Equal => Some(CasimirMode::Equal),
            Multiplicity::Mixed => None,
        }
    }
}

/// `N̄ = [[0, V], [−V, 0]]`.
pub fn canonical_nbar(v: &[f64]) -> SkewMatrix {
    canonical_n(v, 0)
}

/// `[[0, V, 0], [−V, 0, 0], [0, 0, 0_d]]`.
pub fn canonical_n(v: &[f64], d: usize) -> SkewMatrix {
    let p = v.len();
    let mut m = Matrix::zeros(2 * p + d, 2 * p + d);
    for (k, &vk) in v.iter().enumerate() {
        m[(k, p + k)] = vk;
        m[(p + k, k)] = -vk;
    }
    SkewMatrix::antisymmetrize(&m)
}

fn orthogonalize(vec: &mut [f64], against: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in against {
            let c = dot(q, vec);
            vec.iter_mut().zip(q).for_each(|(x, qi)| *x -= c * qi);
        }
    }
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let nrm = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= nrm);
    v
}

/// Orthogonal canonical form of `N` from the eigendecomposition of the
/// positive-semidefinite `−N²`.
///
/// Each eigenvalue `v²` of `−N²` spans an `N`-invariant subspace. Within it a
/// unit vector `u` is chosen and paired with `w = −Nu/‖Nu‖`, which gives the
/// block `[[0, v], [−v, 0]]` on `span{u, w}` with `v = ‖Nu‖`. Near-equal
/// values (relative gap below `TIE_TOL`) are grouped and their planes are
/// chosen jointly inside the combined eigenspace.
pub fn canonical_form(n: &SkewMatrix, rank_tol: f64) -> Result<NCanonical> {
    if !(rank_tol > 0.0) {
        return Err(Error::InvalidArgument(format!("rank tolerance must be positive, got {rank_tol}")));
    }
    let size = n.n();
    let nm: &Matrix = n;
    let minus_n2 = SymMatrix::symmetrize(&(&nm.transpose() * nm));
    let eig = eig_sym(&minus_n2, tolerances::EIG_TOL)?;

    // ‖N e‖ from the eigenvector itself; sqrt of a tiny eigenvalue of −N²
    // would lose half the digits near the kernel
    let columns: Vec<Vec<f64>> = (0..size).map(|c| (0..size).map(|r| eig.vectors[(r, c)]).collect()).collect();
    let mut sing_all = Vec::with_capacity(size);
    for c in &columns {
        let ne = nm.mat_vec(c)?;
        sing_all.push(dot(&ne, &ne).sqrt());
    }
    // descending, ties keep eigensolver order
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by(|&a, &b| sing_all[b].total_cmp(&sing_all[a]));
    let sing: Vec<f64> = order.iter().map(|&i| sing_all[i]).collect();
    let s_max = sing.first().copied().unwrap_or(0.0);
    let rank = if s_max == 0.0 {
        0
    } else {
        sing.iter().filter(|&&s| s > rank_tol * s_max).count()
    };
    if rank % 2 != 0 {
        return Err(Error::CanonicalForm(format!("odd numerical rank {rank} of a skew matrix")));
    }
    let p = rank / 2;
    let d = size - rank;
    let column = |i: usize| -> Vec<f64> { columns[order[i]].clone() };

    // group nonzero eigenvalues into ties
    let mut groups: Vec<std::ops::Range<usize>> = Vec::new();
    let mut start = 0;
    for i in 1..=rank {
        if i == rank || (sing[i - 1] - sing[i]).abs() > tolerances::TIE_TOL * s_max {
            groups.push(start..i);
            start = i;
        }
    }
    if groups.iter().any(|g| g.len() % 2 != 0) {
        return Err(Error::CanonicalForm(
            "eigenvalues of -N^2 are not paired within the tie tolerance".into(),
        ));
    }

    let mut us: Vec<Vec<f64>> = Vec::with_capacity(p);
    let mut ws: Vec<Vec<f64>> = Vec::with_capacity(p);
    let mut vs: Vec<f64> = Vec::with_capacity(p);
    let mut chosen: Vec<Vec<f64>> = Vec::with_capacity(rank);
    for g in &groups {
        let span: Vec<Vec<f64>> = g.clone().map(column).collect();
        for _ in 0..g.len() / 2 {
            let residuals: Vec<Vec<f64>> = span
                .iter()
                .map(|c| {
                    let mut c = c.clone();
                    orthogonalize(&mut c, &chosen);
                    c
                })
                .collect();
            let best = argmax(residuals.iter().map(|r| dot(r, r)));
            let u = normalized(residuals[best].clone());
            let nu = nm.mat_vec(&u)?;
            let v = dot(&nu, &nu).sqrt();
            let mut w: Vec<f64> = nu.iter().map(|x| -x / v).collect();
            chosen.push(u.clone());
            orthogonalize(&mut w, &chosen);
            let w = normalized(w);
            chosen.push(w.clone());
            us.push(u);
            ws.push(w);
            vs.push(v);
        }
    }
    let mut kernel: Vec<Vec<f64>> = Vec::with_capacity(d);
    for i in rank..size {
        let mut k = column(i);
        orthogonalize(&mut k, &chosen);
        let k = normalized(k);
        chosen.push(k.clone());
        kernel.push(k);
    }

    let rows: Vec<&Vec<f64>> = us.iter().chain(ws.iter()).chain(kernel.iter()).collect();
    let q = Matrix::from_fn(size, size, |i, j| rows[i][j]);

    // v sorted descending; groups were produced in descending order but a
    // re-sort also fixes intra-group order
    let mut perm: Vec<usize> = (0..p).collect();
    perm.sort_by(|&a, &b| vs[b].total_cmp(&vs[a]));
    let q = if perm.iter().enumerate().all(|(i, &j)| i == j) {
        q
    } else {
        let mut src: Vec<usize> = perm.clone();
        src.extend(perm.iter().map(|&j| p + j));
        src.extend(2 * p..size);
        Matrix::from_fn(size, size, |i, j| q[(src[i], j)])
    };
    let v: Vec<f64> = perm.iter().map(|&j| vs[j]).collect();

    let n_canonical = canonical_n(&v, d);
    let nbar = canonical_nbar(&v);
    let mut nhat = Matrix::zeros(size, size);
    for (k, &vk) in v.iter().enumerate() {
        nhat[(k, p + k)] = -1.0 / vk;
        nhat[(p + k, k)] = 1.0 / vk;
    }

    let scale = nm.norm_max().max(1.0);
    let orth = (&(&q.transpose() * &q) - &Matrix::identity(size)).norm_max();
    if orth > tolerances::CANONICAL_TOL {
        return Err(Error::CanonicalForm(format!("QᵀQ − I = {orth:e}")));
    }
    let conj = (&(&(&q * nm) * &q.transpose()) - &*n_canonical).norm_max();
    if conj > tolerances::CANONICAL_TOL * scale {
        return Err(Error::CanonicalForm(format!("Q N Qᵀ differs from block form by {conj:e}")));
    }
    let mut proj = Matrix::zeros(size, size);
    for i in 0..2 * p {
        proj[(i, i)] = 1.0;
    }
    let left = (&(&nhat * &*n_canonical) - &proj).norm_max();
    let right = (&(&*n_canonical * &nhat) - &proj).norm_max();
    if left.max(right) > tolerances::CANONICAL_TOL {
        return Err(Error::CanonicalForm(format!("N̂N − P = {left:e}, NN̂ − P = {right:e}")));
    }

    let multiplicity = classify(&v);
    Ok(NCanonical {
        n: size,
        p,
        d,
        n_original: n.clone(),
        q,
        v,
        nbar,
        nhat,
        n_canonical,
        multiplicity,
        rank_tol,
    })
}

fn classify(v: &[f64]) -> Multiplicity {
    if v.len() <= 1 {
        return Multiplicity::Distinct;
    }
    let vmax = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let tie = |a: f64, b: f64| (a - b).abs() <= tolerances::TIE_TOL * vmax;
    let adjacent_ties = v.windows(2).filter(|w| tie(w[0], w[1])).count();
    if adjacent_ties == 0 {
        Multiplicity::Distinct
    } else if adjacent_ties == v.len() - 1 && tie(v[0], v[v.len() - 1]) {
        Multiplicity::Equal
    } else {
        Multiplicity::Mixed
    }
}

/// Lower-right `S_ab` blocks, `a ≤ b`, embedded at offset `2p`.
fn kernel_block_basis(n: usize, two_p: usize) -> Vec<SymMatrix> {
    let d = n - two_p;
    let mut out = Vec::with_capacity(d * (d + 1) / 2);
    for a in 0..d {
        for b in a..d {
            let mut m = Matrix::zeros(n, n);
            m[(two_p + a, two_p + b)] = 1.0;
            m[(two_p + b, two_p + a)] = 1.0;
            out.push(SymMatrix::symmetrize(&m));
        }
    }
    out
}

/// Gradients `E_i` of the linear frozen Casimirs `X ↦ trace(E_i X)`, in the
/// canonical basis.
pub fn casimirs_frozen(nc: &NCanonical, mode: CasimirMode) -> Result<Vec<SymMatrix>> {
    let ok = nc.p <= 1
        || matches!(
            (mode, nc.multiplicity),
            (CasimirMode::Distinct, Multiplicity::Distinct) | (CasimirMode::Equal, Multiplicity::Equal)
        );
    if !ok {
        return Err(Error::ModeMismatch {
            requested: match mode {
                CasimirMode::Distinct => "distinct",
                CasimirMode::Equal => "equal",
            },
            found: nc.multiplicity.label(),
        });
    }
    let (n, p) = (nc.n, nc.p);
    let mut out = Vec::with_capacity(nc.frozen_casimir_count(mode));
    match mode {
        CasimirMode::Distinct => {
            for k in 0..p {
                let mut m = Matrix::zeros(n, n);
                m[(k, k)] = 1.0;
                m[(p + k, p + k)] = 1.0;
                out.push(SymMatrix::symmetrize(&m));
            }
        }
        CasimirMode::Equal => {
            for k in 0..p {
                for l in k..p {
                    let mut m = Matrix::zeros(n, n);
                    m[(k, l)] = 1.0;
                    m[(l, k)] = 1.0;
                    m[(p + k, p + l)] = 1.0;
                    m[(p + l, p + k)] = 1.0;
                    out.push(SymMatrix::symmetrize(&m));
                }
            }
            for k in 0..p {
                for l in (k + 1)..p {
                    let mut m = Matrix::zeros(n, n);
                    m[(k, p + l)] = 1.0;
                    m[(l, p + k)] = -1.0;
                    m[(p + k, l)] = -1.0;
                    m[(p + l, k)] = 1.0;
                    out.push(SymMatrix::symmetrize(&m));
                }
            }
        }
    }
    out.extend(kernel_block_basis(n, 2 * p));
    Ok(out)
}

fn check_canonical_x(nc: &NCanonical, x: &SymMatrix, op: &'static str) -> Result<()> {
    if x.n() != nc.n {
        return Err(dim_err(op, format!("X is {0}x{0}, N is {1}x{1}", x.n(), nc.n)));
    }
    Ok(())
}

/// Blocks of `x` used by the Lie–Poisson Casimirs: the Schur complement
/// `S̃ = S − A B⁻¹ Aᵀ` and `K = [I; −B⁻¹Aᵀ]` (`n × 2p`), so that
/// `S̃ = Kᵀ X K`. For `d = 0` these are `S = X` and `K = I`.
fn schur_blocks(nc: &NCanonical, x: &SymMatrix) -> Result<(Matrix, Matrix)> {
    let two_p = nc.two_p();
    let d = nc.d;
    let s = x.block(0, 0, two_p, two_p);
    let mut k = Matrix::zeros(nc.n, two_p);
    k.set_block(0, 0, &Matrix::identity(two_p));
    if d == 0 || two_p == 0 {
        return Ok((s, k));
    }
    let a = x.block(0, two_p, two_p, d);
    let b = SymMatrix::symmetrize(&x.block(two_p, two_p, d, d));
    let eig = eig_sym(&b, tolerances::EIG_TOL)?;
    let b_scale = b.norm_fro().max(f64::MIN_POSITIVE);
    let smallest = eig.values.iter().fold(f64::INFINITY, |m, l| m.min(l.abs()));
    if smallest <= tolerances::RANK_TOL * b_scale {
        return Err(Error::InvalidArgument(format!(
            "kernel block of X is singular (|λ|min = {smallest:e}); Lie–Poisson Casimirs need it invertible"
        )));
    }
    let inv_diag = Matrix::diag(&eig.values.iter().map(|l| 1.0 / l).collect::<Vec<_>>());
    let b_inv = &(&eig.vectors * &inv_diag) * &eig.vectors.transpose();
    let binv_at = &b_inv * &a.transpose();
    k.set_block(two_p, 0, &binv_at.scale(-1.0));
    let s_tilde = &s - &(&a * &binv_at);
    Ok((SymMatrix::symmetrize(&s_tilde).into_matrix(), k))
}

/// Lie–Poisson Casimir values at `x` (canonical basis): the `p` values
/// `(1/2k) trace[(S̃ N̄⁻¹)^{2k}]` with `S̃ = S − A B⁻¹ Aᵀ`, then the kernel
/// block entries `trace(X E_ab)`.
///
/// For full-rank `N` this is `(1/2k) trace[(X N̂)^{2k}]`. When `d > 0` the
/// plain `trace[(XN̂)^{2k}]` is not annihilated by `B_X` unless `A = 0`; the
/// Schur complement is. It requires the `d × d` block `B` to be invertible,
/// which holds for generic `X`.
pub fn casimirs_lp(nc: &NCanonical, x: &SymMatrix) -> Result<Vec<f64>> {
    check_canonical_x(nc, x, "casimirs_lp")?;
    let mut out = Vec::with_capacity(nc.lp_casimir_count());
    if nc.p > 0 {
        let (s_tilde, _) = schur_blocks(nc, x)?;
        let nbar_inv = nc.nhat.block(0, 0, nc.two_p(), nc.two_p());
        let sn = &s_tilde * &nbar_inv;
        let sn2 = &sn * &sn;
        let mut power = sn2.clone();
        for k in 1..=nc.p {
            out.push(power.trace() / (2 * k) as f64);
            power = &power * &sn2;
        }
    }
    for e in kernel_block_basis(nc.n, 2 * nc.p) {
        out.push(pair(x, &e));
    }
    Ok(out)
}

/// Gradients of [`casimirs_lp`]. With `M_k = N̄⁻¹S̃N̄⁻¹⋯S̃N̄⁻¹` (`2k − 1`
/// factors of `S̃`) the gradient is `K M_k Kᵀ`; for `d = 0` it is
/// `N̂XN̂⋯XN̂`. The kernel-block gradients are the constant `E_ab`.
pub fn casimir_lp_gradients(nc: &NCanonical, x: &SymMatrix) -> Result<Vec<SymMatrix>> {
    check_canonical_x(nc, x, "casimir_lp_gradients")?;
    let mut out = Vec::with_capacity(nc.lp_casimir_count());
    if nc.p > 0 {
        let (s_tilde, k) = schur_blocks(nc, x)?;
        let nbar_inv = nc.nhat.block(0, 0, nc.two_p(), nc.two_p());
        let sn = &s_tilde * &nbar_inv;
        let sn2 = &sn * &sn;
        let kt = k.transpose();
        let mut m = &(&nbar_inv * &s_tilde) * &nbar_inv;
        for _ in 1..=nc.p {
            out.push(SymMatrix::symmetrize(&(&(&k * &m) * &kt)));
            m = &m * &sn2;
        }
    }
    out.extend(kernel_block_basis(nc.n, 2 * nc.p));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TensorKind {
    /// Lie–Poisson tensor `B_X`.
    B,
    /// Frozen tensor `C_X`.
    C,
}

/// Matrix of a Poisson tensor in the orthonormal basis of
/// [`sym_basis`](crate::matrix::sym_basis); `m = n(n+1)/2`.
#[derive(Debug, Clone)]
pub struct PoissonTensorMatrix(pub Matrix);

impl PoissonTensorMatrix {
    pub fn antisymmetry_defect(&self) -> f64 {
        self.0.skew_defect()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        let m = &self.0;
        (0..m.cols()).map(|j| (0..m.rows()).map(|i| m[(i, j)]).collect()).collect()
    }
}

pub fn tensor_as_matrix(x: &SymMatrix, n: &SkewMatrix, which: TensorKind) -> Result<PoissonTensorMatrix> {
    same_square("tensor_as_matrix", x, n)?;
    let basis = sym_basis(x.n());
    let cols: Vec<Vec<f64>> = basis
        .iter()
        .map(|e| {
            let t = match which {
                TensorKind::B => tensor_b_unchecked(x, e, n),
                TensorKind::C => tensor_c_unchecked(e, n),
            };
            sym_coords(&t)
        })
        .collect();
    let m = basis.len();
    Ok(PoissonTensorMatrix(Matrix::from_fn(m, m, |i, j| cols[j][i])))
}

/// Ranks of the two Poisson tensors at `X`, i.e. the dimensions of the
/// symplectic leaves through `X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LeafDims {
    pub lie_poisson: usize,
    pub frozen: usize,
}

/// `x` is in the original basis of `nc.n_original`. Rank is computed at
/// `rank_tol` and `10 · rank_tol`; disagreement is an error.
pub fn leaf_dimensions(nc: &NCanonical, x: &SymMatrix, rank_tol: f64) -> Result<LeafDims> {
    check_canonical_x(nc, x, "leaf_dimensions")?;
    let b = tensor_as_matrix(x, &nc.n_original, TensorKind::B)?;
    let c = tensor_as_matrix(x, &nc.n_original, TensorKind::C)?;
    Ok(LeafDims {
        lie_poisson: stable_rank(&b.columns(), rank_tol)?,
        frozen: stable_rank(&c.columns(), rank_tol)?,
    })
}

/// Generic leaf dimension of the Lie–Poisson structure, `2p(p+d)`.
pub fn expected_lp_leaf_dim(p: usize, d: usize) -> usize {
    2 * p * (p + d)
}

/// Frozen leaf dimension for the two extreme spectra:
/// `2p(p+d)` (distinct) and `p(p+1+2d)` (all equal).
pub fn expected_frozen_leaf_dim(p: usize, d: usize, mode: CasimirMode) -> usize {
    match mode {
        CasimirMode::Distinct => 2 * p * (p + d),
        CasimirMode::Equal => p * (p + 1 + 2 * d),
    }
}

/// Quadratic test function `f(X) = ⟨⟨F, X⟩⟩ + ½ trace(XSXS)` with gradient
/// `F + SXS` and Hessian `Y ↦ SYS`.
#[derive(Debug, Clone)]
pub struct QuadTestFn {
    pub linear: SymMatrix,
    pub quad: SymMatrix,
}

impl QuadTestFn {
    pub fn value(&self, x: &SymMatrix) -> f64 {
        let xs = &**x * &*self.quad;
        pair(&self.linear, x) + 0.5 * (&xs * &xs).trace()
    }

    pub fn gradient(&self, x: &SymMatrix) -> SymMatrix {
        self.linear.add(&self.hessian(x))
    }

    pub fn hessian(&self, y: &SymMatrix) -> SymMatrix {
        SymMatrix::symmetrize(&(&(&*self.quad * &**y) * &*self.quad))
    }
}

/// Tensor of the pencil `α B_X + β C_X` applied to `y`.
pub fn pencil_apply(alpha: f64, beta: f64, x: &SymMatrix, n: &SkewMatrix, y: &SymMatrix) -> SymMatrix {
    let b = tensor_b_unchecked(x, y, n);
    let c = tensor_c_unchecked(y, n);
    SymMatrix::symmetrize(&(&b.scale(alpha).into_matrix() + &c.scale(beta)))
}

/// Bracket of the pencil `α{·,·}_N + β{·,·}_{FN}`.
pub fn pencil_bracket(
    alpha: f64,
    beta: f64,
    x: &SymMatrix,
    n: &SkewMatrix,
    f: &QuadTestFn,
    g: &QuadTestFn,
) -> f64 {
    pair(&f.gradient(x), &pencil_apply(alpha, beta, x, n, &g.gradient(x)))
}

/// Directional derivative of `X ↦ {f, g}(X)` along `y`, differentiating the
/// two gradients and the `X`-dependence of `B_X`.
fn pencil_bracket_derivative(
    alpha: f64,
    beta: f64,
    x: &SymMatrix,
    n: &SkewMatrix,
    f: &QuadTestFn,
    g: &QuadTestFn,
    y: &SymMatrix,
) -> f64 {
    let gf = f.gradient(x);
    let gg = g.gradient(x);
    let t1 = pair(&f.hessian(y), &pencil_apply(alpha, beta, x, n, &gg));
    let t2 = pair(&gf, &pencil_apply(alpha, beta, x, n, &g.hessian(y)));
    let t3 = alpha * pair(&gf, &tensor_b_unchecked(y, &gg, n));
    t1 + t2 + t3
}

/// Jacobi identity defect `|Σ_cyc {{f, g}, h}(X)|` of the pencil
/// `α{·,·}_N + β{·,·}_{FN}` on quadratic test functions.
pub fn pencil_jacobi_defect(
    alpha: f64,
    beta: f64,
    x: &SymMatrix,
    n: &SkewMatrix,
    fns: [&QuadTestFn; 3],
) -> Result<f64> {
    same_square("pencil_jacobi_defect", x, n)?;
    for f in fns {
        same_square("pencil_jacobi_defect", x, &f.linear)?;
        same_square("pencil_jacobi_defect", x, &f.quad)?;
    }
    let [f, g, h] = fns;
    let term = |a: &QuadTestFn, b: &QuadTestFn, c: &QuadTestFn| {
        let flow = pencil_apply(alpha, beta, x, n, &c.gradient(x));
        pencil_bracket_derivative(alpha, beta, x, n, a, b, &flow)
    };
    Ok((term(f, g, h) + term(g, h, f) + term(h, f, g)).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::numerical_rank;
    use crate::sampling::{random_skew_with_spectrum, random_unit_skew, random_unit_sym, rng_from_seed};

    fn sym2(a: f64, b: f64, d: f64) -> SymMatrix {
        SymMatrix::from_rows(&[[a, b], [b, d]]).unwrap()
    }

    #[test]
    fn tensor_examples() {
        let n = SkewMatrix::j2();
        let x = sym2(0.4, -1.1, 0.9);
        assert_eq!(*tensor_b(&x, &SymMatrix::zeros(2), &n).unwrap(), Matrix::zeros(2, 2));
        assert_eq!(*tensor_c(&SymMatrix::zeros(2), &n).unwrap(), Matrix::zeros(2, 2));

        // direct evaluation: YN = [[0,1],[1,0]], NY = [[0,-1],[-1,0]]
        let c = tensor_c(&sym2(1.0, 0.0, -1.0), &n).unwrap();
        assert_eq!(*c, *sym2(0.0, 2.0, 0.0));

        let mut rng = rng_from_seed(41);
        let n4 = random_unit_skew(4, &mut rng);
        let y = random_unit_sym(4, &mut rng);
        let b = tensor_b(&SymMatrix::identity(4), &y, &n4).unwrap();
        assert!((&*b - &*tensor_c(&y, &n4).unwrap()).norm_max() < 1e-16);
    }

    #[test]
    fn frozen_annihilates_even_powers_of_n() {
        let mut rng = rng_from_seed(43);
        let n = random_unit_skew(5, &mut rng);
        for k in [1usize, 3, 5] {
            let g = SymMatrix::symmetrize(&n.powi(k - 1));
            assert!(tensor_c(&g, &n).unwrap().norm_max() < 1e-15);
            let other = random_unit_sym(5, &mut rng);
            assert!(bracket_frozen(&g, &other, &n).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn lie_poisson_bracket_matches_trace_formula() {
        let mut rng = rng_from_seed(47);
        let n = random_unit_skew(4, &mut rng);
        let x = random_unit_sym(4, &mut rng);
        let f = random_unit_sym(4, &mut rng);
        let g = random_unit_sym(4, &mut rng);
        let via_tensor = bracket_lp(&f, &g, &x, &n).unwrap();
        let inner = &(&(&*f * &*n) * &*g) - &(&(&*g * &*n) * &*f);
        let direct = -(&*x * &inner).trace();
        assert!((via_tensor - direct).abs() <= 1e-12);
        assert!(bracket_lp(&f, &f, &x, &n).unwrap().abs() < 1e-15);
        let fg = bracket_frozen(&f, &g, &n).unwrap();
        let gf = bracket_frozen(&g, &f, &n).unwrap();
        assert!((fg + gf).abs() < 1e-16);
    }

    #[test]
    fn canonical_form_of_j2_is_trivial() {
        let nc = canonical_form(&SkewMatrix::j2(), 1e-9).unwrap();
        assert_eq!((nc.p, nc.d), (1, 0));
        assert!((nc.v[0] - 1.0).abs() < 1e-15);
        assert!((&nc.q - &Matrix::identity(2)).norm_max() < 1e-15);
    }

    #[test]
    fn canonical_form_of_zero() {
        let nc = canonical_form(&SkewMatrix::zeros(3), 1e-9).unwrap();
        assert_eq!((nc.p, nc.d), (0, 3));
        assert_eq!(nc.nhat, Matrix::zeros(3, 3));
    }

    #[test]
    fn canonical_form_random_odd() {
        let mut rng = rng_from_seed(53);
        let n = random_unit_skew(5, &mut rng);
        let nc = canonical_form(&n, 1e-9).unwrap();
        assert_eq!((nc.p, nc.d), (2, 1));
        assert!(nc.v[0] >= nc.v[1] && nc.v[1] > 0.0);
        let conj = &(&(&nc.q * &*n) * &nc.q.transpose()) - &*nc.n_canonical;
        assert!(conj.norm_max() < 1e-10);
        assert_eq!(nc.multiplicity, Multiplicity::Distinct);
    }

    #[test]
    fn canonical_form_with_repeated_pairs() {
        let mut rng = rng_from_seed(59);
        let n = random_skew_with_spectrum(&[0.7, 0.7, 0.7], 1, &mut rng);
        let nc = canonical_form(&n, 1e-9).unwrap();
        assert_eq!((nc.p, nc.d), (3, 1));
        assert_eq!(nc.multiplicity, Multiplicity::Equal);
        assert!(nc.v.iter().all(|v| (v - 0.7).abs() < 1e-12));

        let n = random_skew_with_spectrum(&[1.5, 0.7, 0.7], 0, &mut rng);
        let nc = canonical_form(&n, 1e-9).unwrap();
        assert_eq!(nc.multiplicity, Multiplicity::Mixed);
        assert!((nc.v[0] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn frozen_casimir_counts_and_annihilation() {
        let mut rng = rng_from_seed(61);
        let nc = canonical_form(&random_skew_with_spectrum(&[1.2, 0.5], 1, &mut rng), 1e-9).unwrap();
        let es = casimirs_frozen(&nc, CasimirMode::Distinct).unwrap();
        assert_eq!(es.len(), 3);
        for e in &es {
            assert_eq!(tensor_c(e, &nc.n_canonical).unwrap().norm_max(), 0.0);
        }
        assert!(matches!(
            casimirs_frozen(&nc, CasimirMode::Equal),
            Err(Error::ModeMismatch { .. })
        ));

        let nc = canonical_form(&canonical_n(&[0.8, 0.8], 0), 1e-9).unwrap();
        let es = casimirs_frozen(&nc, CasimirMode::Equal).unwrap();
        assert_eq!(es.len(), 4);
        for e in &es {
            assert_eq!(tensor_c(e, &nc.n_canonical).unwrap().norm_max(), 0.0);
        }
        let coords: Vec<Vec<f64>> = es.iter().map(|e| sym_coords(e)).collect();
        assert_eq!(numerical_rank(&coords, 1e-9).unwrap().rank, 4);
    }

    /// n = 2: X N⁻¹ = [[b, −a], [d, −b]] squares to (b² − ad) I.
    #[test]
    fn lp_casimir_two_by_two() {
        let nc = canonical_form(&SkewMatrix::j2(), 1e-9).unwrap();
        let (a, b, d) = (0.3, 0.8, -1.7);
        let c = casimirs_lp(&nc, &sym2(a, b, d)).unwrap();
        assert_eq!(c.len(), 1);
        assert!((c[0] - (b * b - a * d)).abs() < 1e-15);
        let c0 = casimirs_lp(&nc, &SymMatrix::zeros(2)).unwrap();
        assert_eq!(c0, vec![0.0]);
    }

    #[test]
    fn lp_casimirs_are_annihilated() {
        let mut rng = rng_from_seed(67);
        for (v, d) in [(vec![1.3, 0.9, 0.4], 0usize), (vec![1.1, 0.6], 2)] {
            let nc = canonical_form(&random_skew_with_spectrum(&v, d, &mut rng), 1e-9).unwrap();
            let x = random_unit_sym(6, &mut rng);
            for g in casimir_lp_gradients(&nc, &x).unwrap() {
                let r = tensor_b(&x, &g, &nc.n_canonical).unwrap().norm_max();
                assert!(r <= 1e-11, "residual {r:e}");
            }
        }
    }

    /// Central finite differences of the Casimir values reproduce the
    /// stated gradients.
    #[test]
    fn lp_casimir_gradients_match_finite_differences() {
        let mut rng = rng_from_seed(71);
        let nc = canonical_form(&canonical_n(&[1.4, 0.8], 1), 1e-9).unwrap();
        let x = random_unit_sym(5, &mut rng);
        let y = random_unit_sym(5, &mut rng);
        let h = 1e-5;
        let plus = casimirs_lp(&nc, &x.add(&y.scale(h))).unwrap();
        let minus = casimirs_lp(&nc, &x.sub(&y.scale(h))).unwrap();
        for (i, g) in casimir_lp_gradients(&nc, &x).unwrap().iter().enumerate() {
            let fd = (plus[i] - minus[i]) / (2.0 * h);
            assert!((fd - pair(g, &y)).abs() < 1e-6);
        }
    }

    #[test]
    fn uncorrected_trace_is_not_a_casimir_with_kernel() {
        let mut rng = rng_from_seed(79);
        let nc = canonical_form(&canonical_n(&[1.1, 0.6], 2), 1e-9).unwrap();
        let x = random_unit_sym(6, &mut rng);
        let naive = &(&nc.nhat * &*x) * &nc.nhat;
        let r = tensor_b(&x, &SymMatrix::symmetrize(&naive), &nc.n_canonical).unwrap().norm_max();
        assert!(r > 1e-3, "residual {r:e}");
        let g = &casimir_lp_gradients(&nc, &x).unwrap()[0];
        assert!(tensor_b(&x, g, &nc.n_canonical).unwrap().norm_max() < 1e-11);
    }

    #[test]
    fn tensor_matrix_properties() {
        let mut rng = rng_from_seed(73);
        let x = random_unit_sym(4, &mut rng);
        let zero = tensor_as_matrix(&x, &SkewMatrix::zeros(4), TensorKind::B).unwrap();
        assert_eq!(zero.0.norm_max(), 0.0);
        let n = random_skew_with_spectrum(&[1.0, 0.6], 0, &mut rng);
        for kind in [TensorKind::B, TensorKind::C] {
            let t = tensor_as_matrix(&x, &n, kind).unwrap();
            assert!(t.antisymmetry_defect() <= 1e-12);
        }
        let b = tensor_as_matrix(&x, &n, TensorKind::B).unwrap();
        assert_eq!(stable_rank(&b.columns(), 1e-9).unwrap(), 8);
    }

    #[test]
    fn leaf_dimension_examples() {
        let mut rng = rng_from_seed(79);
        let cases: [(Vec<f64>, usize, (usize, usize)); 3] = [
            (vec![1.0, 0.55], 0, (8, 8)),
            (vec![0.9, 0.9], 0, (8, 6)),
            (vec![1.2, 0.5], 1, (12, 12)),
        ];
        for (v, d, expected) in cases {
            let nc = canonical_form(&random_skew_with_spectrum(&v, d, &mut rng), 1e-9).unwrap();
            let x = random_unit_sym(nc.n, &mut rng);
            let dims = leaf_dimensions(&nc, &x, 1e-9).unwrap();
            assert_eq!((dims.lie_poisson, dims.frozen), expected, "v = {v:?}, d = {d}");
            assert_eq!(expected.0, expected_lp_leaf_dim(nc.p, d));
        }
    }

    #[test]
    fn lp_leaf_codimension_equals_casimir_count() {
        let mut rng = rng_from_seed(83);
        let nc = canonical_form(&random_skew_with_spectrum(&[1.3, 0.7], 2, &mut rng), 1e-9).unwrap();
        let x = random_unit_sym(6, &mut rng);
        let dims = leaf_dimensions(&nc, &x, 1e-9).unwrap();
        assert_eq!(21 - dims.lie_poisson, nc.lp_casimir_count());
    }

    fn random_test_fn(n: usize, rng: &mut crate::sampling::Rng) -> QuadTestFn {
        QuadTestFn {
            linear: random_unit_sym(n, rng),
            quad: random_unit_sym(n, rng),
        }
    }

    #[test]
    fn pencil_is_poisson() {
        let mut rng = rng_from_seed(89);
        let n = random_unit_skew(5, &mut rng);
        let x = random_unit_sym(5, &mut rng);
        let f = random_test_fn(5, &mut rng);
        let g = random_test_fn(5, &mut rng);
        let h = random_test_fn(5, &mut rng);
        for (alpha, beta) in [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (0.3, -2.0)] {
            let r = pencil_jacobi_defect(alpha, beta, &x, &n, [&f, &g, &h]).unwrap();
            assert!(r <= 1e-10, "alpha={alpha} beta={beta} r={r:e}");
        }
    }

    /// The analytic derivative of the bracket agrees with central finite
    /// differences, so the Jacobi check is not vacuous.
    #[test]
    fn bracket_derivative_matches_finite_differences() {
        let mut rng = rng_from_seed(97);
        let n = random_unit_skew(4, &mut rng);
        let x = random_unit_sym(4, &mut rng);
        let y = random_unit_sym(4, &mut rng);
        let f = random_test_fn(4, &mut rng);
        let g = random_test_fn(4, &mut rng);
        let h = 1e-5;
        let fd = (pencil_bracket(1.0, 1.0, &x.add(&y.scale(h)), &n, &f, &g)
            - pencil_bracket(1.0, 1.0, &x.sub(&y.scale(h)), &n, &f, &g))
            / (2.0 * h);
        let an = pencil_bracket_derivative(1.0, 1.0, &x, &n, &f, &g, &y);
        assert!((fd - an).abs() < 1e-8);

        let fv = (f.value(&x.add(&y.scale(h))) - f.value(&x.sub(&y.scale(h)))) / (2.0 * h);
        assert!((fv - pair(&f.gradient(&x), &y)).abs() < 1e-8);
    }
}
