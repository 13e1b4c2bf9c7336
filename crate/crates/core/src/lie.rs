//! The Lie algebra `(Sym(n), [·,·]_N)` induced by a skew matrix `N`.
//!
//! Besides the bracket itself this module carries the homomorphism
//! `X ↦ NX` into linear Hamiltonian vector fields, the ad-invariant form
//! `κ_N`, quadratic Hamiltonians on `ℝⁿ`, and the block description of
//! `Sym(n)` for degenerate `N` as a cocycle extension of
//! `Sym(2p) ⋉ M_{2p×d}`.
//!
//! Identities are exposed as defect-returning functions so that callers pick
//! the tolerance.

use crate::error::{dim_err, Result};
use crate::matrix::{commutator, same_square, Matrix, SkewMatrix, SymMatrix};
use crate::poisson::NCanonical;

/// `[X, Y]_N = XNY − YNX`.
pub fn n_bracket(x: &SymMatrix, y: &SymMatrix, n: &SkewMatrix) -> Result<SymMatrix> {
    same_square("n_bracket", x, y)?;
    same_square("n_bracket", x, n)?;
    let xny = &(&**x * &**n) * &**y;
    let ynx = &(&**y * &**n) * &**x;
    Ok(SymMatrix::symmetrize(&(&xny - &ynx)))
}

/// `‖N [X, Y]_N − [NX, NY]‖_max`.
pub fn hom_defect(x: &SymMatrix, y: &SymMatrix, n: &SkewMatrix) -> Result<f64> {
    let lhs = &**n * &*n_bracket(x, y, n)?;
    let rhs = commutator(&(&**n * &**x), &(&**n * &**y))?;
    Ok((&lhs - &rhs).norm_max())
}

/// `κ_N(X, Y) = trace(NXNY)`.
pub fn kappa_n(x: &SymMatrix, y: &SymMatrix, n: &SkewMatrix) -> Result<f64> {
    same_square("kappa_n", x, y)?;
    same_square("kappa_n", x, n)?;
    let nx = &**n * &**x;
    let ny = &**n * &**y;
    Ok((&nx * &ny).trace())
}

/// `|κ_N([Z,X]_N, Y) + κ_N(X, [Z,Y]_N)|`.
pub fn kappa_invariance_defect(
    z: &SymMatrix,
    x: &SymMatrix,
    y: &SymMatrix,
    n: &SkewMatrix,
) -> Result<f64> {
    let a = kappa_n(&n_bracket(z, x, n)?, y, n)?;
    let b = kappa_n(x, &n_bracket(z, y, n)?, n)?;
    Ok((a + b).abs())
}

/// Jacobi identity defect of `[·,·]_N`, `‖Σ_cyc [[X,Y]_N, Z]_N‖_max`.
pub fn n_bracket_jacobi_defect(
    x: &SymMatrix,
    y: &SymMatrix,
    z: &SymMatrix,
    n: &SkewMatrix,
) -> Result<f64> {
    let a = n_bracket(&n_bracket(x, y, n)?, z, n)?;
    let b = n_bracket(&n_bracket(y, z, n)?, x, n)?;
    let c = n_bracket(&n_bracket(z, x, n)?, y, n)?;
    Ok((&(&*a + &*b) + &*c).norm_max())
}

/// Hamiltonian vector field `NXz` of `Q_X(z) = ½ zᵀXz` for the bracket
/// `{f, g}_N = ∇fᵀ N ∇g` on `ℝⁿ`.
pub fn quad_ham_vf(x: &SymMatrix, n: &SkewMatrix, z: &[f64]) -> Result<Vec<f64>> {
    same_square("quad_ham_vf", x, n)?;
    (&**n * &**x).mat_vec(z)
}

/// `{Q_X, Q_Y}_N(z) − Q_{[X,Y]_N}(z)`, with the left side evaluated as
/// `(Xz)ᵀ N (Yz)`.
pub fn quad_ham_bracket_defect(
    x: &SymMatrix,
    y: &SymMatrix,
    n: &SkewMatrix,
    z: &[f64],
) -> Result<f64> {
    let gx = x.mat_vec(z)?;
    let gy = y.mat_vec(z)?;
    let ngy = n.mat_vec(&gy)?;
    let lhs: f64 = gx.iter().zip(&ngy).map(|(a, b)| a * b).sum();
    let bz = n_bracket(x, y, n)?.mat_vec(z)?;
    let rhs = 0.5 * z.iter().zip(&bz).map(|(a, b)| a * b).sum::<f64>();
    Ok((lhs - rhs).abs())
}

/// Element `(S, A, B)` of `(Sym(2p) ⋉ M_{2p×d}) ⊕ Sym(d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDecomp {
    pub s: SymMatrix,
    pub a: Matrix,
    pub b: SymMatrix,
}

impl BlockDecomp {
    pub fn new(s: SymMatrix, a: Matrix, b: SymMatrix) -> Result<Self> {
        if a.rows() != s.n() || a.cols() != b.n() {
            return Err(dim_err(
                "BlockDecomp::new",
                format!("S is {0}x{0}, A is {1:?}, B is {2}x{2}", s.n(), a.shape(), b.n()),
            ));
        }
        Ok(Self { s, a, b })
    }

    pub fn zeros(two_p: usize, d: usize) -> Self {
        Self {
            s: SymMatrix::zeros(two_p),
            a: Matrix::zeros(two_p, d),
            b: SymMatrix::zeros(d),
        }
    }

    pub fn two_p(&self) -> usize {
        self.s.n()
    }

    pub fn d(&self) -> usize {
        self.b.n()
    }

    /// Splits a symmetric matrix into its `(2p, d)` blocks.
    pub fn split(x: &SymMatrix, two_p: usize) -> Result<Self> {
        let n = x.n();
        if two_p > n {
            return Err(dim_err("BlockDecomp::split", format!("2p = {two_p} exceeds n = {n}")));
        }
        let d = n - two_p;
        Ok(Self {
            s: SymMatrix::symmetrize(&x.block(0, 0, two_p, two_p)),
            a: x.block(0, two_p, two_p, d),
            b: SymMatrix::symmetrize(&x.block(two_p, two_p, d, d)),
        })
    }

    pub(crate) fn axpy(&mut self, s: f64, other: &BlockDecomp) {
        let mut sm = self.s.as_matrix().clone();
        sm.axpy(s, &other.s);
        self.s = SymMatrix::symmetrize(&sm);
        self.a.axpy(s, &other.a);
        let mut bm = self.b.as_matrix().clone();
        bm.axpy(s, &other.b);
        self.b = SymMatrix::symmetrize(&bm);
    }

    pub(crate) fn is_finite(&self) -> bool {
        self.s.is_finite() && self.a.is_finite() && self.b.is_finite()
    }

    fn check_compatible(&self, other: &BlockDecomp, nbar: &SkewMatrix) -> Result<()> {
        if self.two_p() != other.two_p() || self.d() != other.d() || nbar.n() != self.two_p() {
            return Err(dim_err("extended_bracket", "block sizes disagree"));
        }
        Ok(())
    }
}

/// `Ψ(S, A, B) = [[S, A], [Aᵀ, B]]`.
pub fn psi(b: &BlockDecomp) -> SymMatrix {
    let (tp, d) = (b.two_p(), b.d());
    let mut m = Matrix::zeros(tp + d, tp + d);
    m.set_block(0, 0, &b.s);
    m.set_block(0, tp, &b.a);
    m.set_block(tp, 0, &b.a.transpose());
    m.set_block(tp, tp, &b.b);
    SymMatrix::symmetrize(&m)
}

/// Inverse of [`psi`]; `x` must already be expressed in the canonical basis
/// of `nc`.
pub fn psi_inverse(x: &SymMatrix, nc: &NCanonical) -> Result<BlockDecomp> {
    if x.n() != nc.n {
        return Err(dim_err("psi_inverse", format!("X is {0}x{0}, N is {1}x{1}", x.n(), nc.n)));
    }
    BlockDecomp::split(x, 2 * nc.p)
}

/// `C((S, A), (S', A')) = AᵀN̄A' − A'ᵀN̄A`.
pub fn cocycle(a: &Matrix, a2: &Matrix, nbar: &SkewMatrix) -> Result<SymMatrix> {
    if a.shape() != a2.shape() || a.rows() != nbar.n() {
        return Err(dim_err("cocycle", format!("{:?}, {:?}, N̄ {}", a.shape(), a2.shape(), nbar.n())));
    }
    let at = a.transpose();
    let a2t = a2.transpose();
    let lhs = &(&at * &**nbar) * a2;
    let rhs = &(&a2t * &**nbar) * a;
    Ok(SymMatrix::symmetrize(&(&lhs - &rhs)))
}

/// Bracket of the cocycle extension:
/// `(SN̄S' − S'N̄S, SN̄A' − S'N̄A, AᵀN̄A' − A'ᵀN̄A)`.
pub fn extended_bracket(b: &BlockDecomp, b2: &BlockDecomp, nbar: &SkewMatrix) -> Result<BlockDecomp> {
    b.check_compatible(b2, nbar)?;
    let s = n_bracket(&b.s, &b2.s, nbar)?;
    let a = &(&(&*b.s * &**nbar) * &b2.a) - &(&(&*b2.s * &**nbar) * &b.a);
    let c = cocycle(&b.a, &b2.a, nbar)?;
    Ok(BlockDecomp { s, a, b: c })
}

/// `blockdiag(N̄, 0_d)`.
pub fn embed_nbar(nbar: &SkewMatrix, d: usize) -> SkewMatrix {
    let tp = nbar.n();
    let mut m = Matrix::zeros(tp + d, tp + d);
    m.set_block(0, 0, nbar);
    SkewMatrix::antisymmetrize(&m)
}

/// `‖Ψ([b, b']^C) − [Ψ b, Ψ b']_N‖_max` with `N = blockdiag(N̄, 0)`.
pub fn psi_homomorphism_defect(b: &BlockDecomp, b2: &BlockDecomp, nbar: &SkewMatrix) -> Result<f64> {
    let lhs = psi(&extended_bracket(b, b2, nbar)?);
    let n = embed_nbar(nbar, b.d());
    let rhs = n_bracket(&psi(b), &psi(b2), &n)?;
    Ok((&*lhs - &*rhs).norm_max())
}

/// Cyclic sum of the cocycle identity
/// `C([u,v], w) + C([v,w], u) + C([w,u], v)`, in `‖·‖_max`.
pub fn cocycle_cyclic_defect(
    u: &BlockDecomp,
    v: &BlockDecomp,
    w: &BlockDecomp,
    nbar: &SkewMatrix,
) -> Result<f64> {
    let term = |x: &BlockDecomp, y: &BlockDecomp, z: &BlockDecomp| -> Result<SymMatrix> {
        let xy = extended_bracket(x, y, nbar)?;
        cocycle(&xy.a, &z.a, nbar)
    };
    let total = &(&*term(u, v, w)? + &*term(v, w, u)?) + &*term(w, u, v)?;
    Ok(total.norm_max())
}

/// Jacobi defect of the extended bracket, `‖Σ_cyc [[u,v],w]^C‖_max` over
/// all three components.
pub fn extended_jacobi_defect(
    u: &BlockDecomp,
    v: &BlockDecomp,
    w: &BlockDecomp,
    nbar: &SkewMatrix,
) -> Result<f64> {
    let t1 = extended_bracket(&extended_bracket(u, v, nbar)?, w, nbar)?;
    let t2 = extended_bracket(&extended_bracket(v, w, nbar)?, u, nbar)?;
    let t3 = extended_bracket(&extended_bracket(w, u, nbar)?, v, nbar)?;
    let s = (&(&*t1.s + &*t2.s) + &*t3.s).norm_max();
    let a = (&(&t1.a + &t2.a) + &t3.a).norm_max();
    let b = (&(&*t1.b + &*t2.b) + &*t3.b).norm_max();
    Ok(s.max(a).max(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_matrix, random_unit_skew, random_unit_sym, rng_from_seed};

    fn sym2(a: f64, b: f64, d: f64) -> SymMatrix {
        SymMatrix::from_rows(&[[a, b], [b, d]]).unwrap()
    }

    #[test]
    fn n_bracket_with_cartan_element() {
        let n = SkewMatrix::j2();
        let (alpha, a, b, d) = (0.7, 1.3, -0.4, 2.1);
        let cartan = sym2(0.0, alpha, 0.0);
        let br = n_bracket(&cartan, &sym2(a, b, d), &n).unwrap();
        let expected = sym2(-2.0 * alpha * a, 0.0, 2.0 * alpha * d);
        assert!((&*br - &*expected).norm_max() < 1e-15);
    }

    #[test]
    fn n_bracket_trivial_cases() {
        let mut rng = rng_from_seed(11);
        let n = random_unit_skew(4, &mut rng);
        let x = random_unit_sym(4, &mut rng);
        let y = random_unit_sym(4, &mut rng);
        assert!(n_bracket(&x, &x, &n).unwrap().norm_max() < 1e-16);

        // X = I reduces to NY − YN
        let br = n_bracket(&SymMatrix::identity(4), &y, &n).unwrap();
        let direct = &(&*n * &*y) - &(&*y * &*n);
        assert!((&*br - &direct).norm_max() < 1e-15);
    }

    #[test]
    fn n_bracket_rejects_mismatch() {
        let x = SymMatrix::identity(3);
        assert!(n_bracket(&x, &x, &SkewMatrix::j2()).is_err());
    }

    #[test]
    fn homomorphism_defect_vanishes() {
        let mut rng = rng_from_seed(3);
        let n = random_unit_skew(6, &mut rng);
        let x = random_unit_sym(6, &mut rng);
        let y = random_unit_sym(6, &mut rng);
        assert!(hom_defect(&x, &y, &n).unwrap() <= 1e-12);
        assert_eq!(hom_defect(&SymMatrix::zeros(6), &y, &n).unwrap(), 0.0);
        assert_eq!(hom_defect(&x, &y, &SkewMatrix::zeros(6)).unwrap(), 0.0);
    }

    /// n = 2 symbolic oracle: with N = J, [X, Y]_J and [JX, JY] expanded by
    /// hand for X = diag(1, 0), Y = [[0,1],[1,0]].
    #[test]
    fn homomorphism_hand_expansion() {
        let n = SkewMatrix::j2();
        let x = sym2(1.0, 0.0, 0.0);
        let y = sym2(0.0, 1.0, 0.0);
        // XJY = [[1,0],[0,0]] ; YJX = [[-1,0],[0,0]]  => [X,Y]_J = [[2,0],[0,0]]
        let br = n_bracket(&x, &y, &n).unwrap();
        assert_eq!(*br, *sym2(2.0, 0.0, 0.0));
        // J [X,Y]_J = [[0,0],[-2,0]] ; JX = [[0,0],[-1,0]], JY = [[1,0],[0,-1]]
        let jx = &*n * &*x;
        let jy = &*n * &*y;
        let c = commutator(&jx, &jy).unwrap();
        assert_eq!(c, Matrix::from_rows(&[[0.0, 0.0], [-2.0, 0.0]]).unwrap());
        assert_eq!(hom_defect(&x, &y, &n).unwrap(), 0.0);
    }

    #[test]
    fn kappa_examples() {
        let n = SkewMatrix::j2();
        let i2 = SymMatrix::identity(2);
        assert_eq!(kappa_n(&i2, &i2, &n).unwrap(), -2.0);
        assert_eq!(kappa_n(&i2, &i2, &SkewMatrix::zeros(2)).unwrap(), 0.0);

        let mut rng = rng_from_seed(5);
        let n = random_unit_skew(4, &mut rng);
        let (x, y, z) = (
            random_unit_sym(4, &mut rng),
            random_unit_sym(4, &mut rng),
            random_unit_sym(4, &mut rng),
        );
        assert!(kappa_invariance_defect(&z, &x, &y, &n).unwrap() <= 1e-12);
    }

    #[test]
    fn quadratic_hamiltonians() {
        let n = SkewMatrix::j2();
        let v = quad_ham_vf(&SymMatrix::identity(2), &n, &[1.0, 0.0]).unwrap();
        assert_eq!(v, vec![0.0, -1.0]);
        let v = quad_ham_vf(&sym2(1.0, 2.0, 3.0), &n, &[0.0, 0.0]).unwrap();
        assert_eq!(v, vec![0.0, 0.0]);

        let mut rng = rng_from_seed(17);
        let n = random_unit_skew(5, &mut rng);
        let x = random_unit_sym(5, &mut rng);
        let y = random_unit_sym(5, &mut rng);
        let z = random_matrix(5, 1, &mut rng).as_slice().to_vec();
        assert!(quad_ham_bracket_defect(&x, &y, &n, &z).unwrap() < 1e-14);
    }

    fn random_block(two_p: usize, d: usize, rng: &mut rand_chacha::ChaCha8Rng) -> BlockDecomp {
        BlockDecomp::new(
            random_unit_sym(two_p, rng),
            random_matrix(two_p, d, rng),
            random_unit_sym(d, rng),
        )
        .unwrap()
    }

    #[test]
    fn psi_round_trip_and_zero() {
        assert_eq!(*psi(&BlockDecomp::zeros(2, 1)), Matrix::zeros(3, 3));
        let mut rng = rng_from_seed(23);
        let b = random_block(4, 2, &mut rng);
        let back = BlockDecomp::split(&psi(&b), 4).unwrap();
        assert_eq!(back, b);
    }

    #[test]
    fn psi_is_bracket_homomorphism() {
        let mut rng = rng_from_seed(29);
        let nbar = crate::poisson::canonical_nbar(&[1.3, 0.6]);
        let b = random_block(4, 1, &mut rng);
        let b2 = random_block(4, 1, &mut rng);
        assert!(psi_homomorphism_defect(&b, &b2, &nbar).unwrap() <= 1e-12);
    }

    #[test]
    fn extended_bracket_properties() {
        let mut rng = rng_from_seed(31);
        let nbar = crate::poisson::canonical_nbar(&[1.1, 0.5]);
        let b = random_block(4, 2, &mut rng);
        let self_br = extended_bracket(&b, &b, &nbar).unwrap();
        assert!(self_br.s.norm_max() < 1e-15 && self_br.a.norm_max() < 1e-15 && self_br.b.norm_max() < 1e-15);

        let mut no_a = random_block(4, 2, &mut rng);
        no_a.a = Matrix::zeros(4, 2);
        let mut no_a2 = random_block(4, 2, &mut rng);
        no_a2.a = Matrix::zeros(4, 2);
        assert_eq!(*extended_bracket(&no_a, &no_a2, &nbar).unwrap().b, Matrix::zeros(2, 2));

        let (u, v, w) = (
            random_block(4, 2, &mut rng),
            random_block(4, 2, &mut rng),
            random_block(4, 2, &mut rng),
        );
        assert!(extended_jacobi_defect(&u, &v, &w, &nbar).unwrap() <= 1e-12);
    }

    #[test]
    fn cocycle_properties() {
        let mut rng = rng_from_seed(37);
        let nbar = crate::poisson::canonical_nbar(&[0.9, 0.4]);
        let a = random_matrix(4, 2, &mut rng);
        assert!(cocycle(&a, &a, &nbar).unwrap().norm_max() < 1e-16);
        assert_eq!(*cocycle(&Matrix::zeros(4, 2), &a, &nbar).unwrap(), Matrix::zeros(2, 2));
        let (u, v, w) = (
            random_block(4, 2, &mut rng),
            random_block(4, 2, &mut rng),
            random_block(4, 2, &mut rng),
        );
        assert!(cocycle_cyclic_defect(&u, &v, &w, &nbar).unwrap() <= 1e-12);
        assert!(cocycle(&a, &random_matrix(4, 3, &mut rng), &nbar).is_err());
    }
}
