//! Invariants `h_{k,2r}` of the flow, read off from the λ-expansion
//! `(1/k) trace (X + λN)^k = Σ_j λ^j h_{k,j}(X)`, their gradients and the
//! bi-Hamiltonian recursion `B_X(∇h_{k,j}) = C_X(∇h_{k+1,j})`.
//!
//! Values are stored with the `1/k` normalization. The grouped multi-index
//! sum over words in `X` and `N` omits it and is `k` times larger.

use std::collections::BTreeMap;
use std::fmt;

use serde::ser::{Serialize, SerializeMap, Serializer};

use crate::error::{dim_err, Error, Result};
use crate::matrix::{same_square, Matrix, SkewMatrix, SymMatrix};
use crate::poisson::{tensor_b_unchecked, tensor_c_unchecked};
use crate::tolerances;

/// Polynomial in λ with matrix coefficients; `coeffs[j]` multiplies `λ^j`.
/// The nominal degree is kept even when leading coefficients vanish.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPoly {
    coeffs: Vec<Matrix>,
}

impl MatrixPoly {
    pub fn new(coeffs: Vec<Matrix>) -> Result<Self> {
        let first = coeffs.first().ok_or(Error::EmptyInput("MatrixPoly::new"))?;
        let shape = first.shape();
        if let Some(bad) = coeffs.iter().find(|c| c.shape() != shape) {
            return Err(dim_err(
                "MatrixPoly::new",
                format!("coefficient {:?} vs {:?}", bad.shape(), shape),
            ));
        }
        Ok(Self { coeffs })
    }

    /// `X + λN`.
    pub fn linear(x: &Matrix, n: &Matrix) -> Result<Self> {
        Self::new(vec![x.clone(), n.clone()])
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, j: usize) -> Option<&Matrix> {
        self.coeffs.get(j)
    }

    pub fn coeffs(&self) -> &[Matrix] {
        &self.coeffs
    }

    pub fn mul(&self, other: &MatrixPoly) -> Result<MatrixPoly> {
        let (r, _) = self.coeffs[0].shape();
        let (_, c) = other.coeffs[0].shape();
        if self.coeffs[0].cols() != other.coeffs[0].rows() {
            return Err(dim_err(
                "MatrixPoly::mul",
                format!("{:?} times {:?}", self.coeffs[0].shape(), other.coeffs[0].shape()),
            ));
        }
        let mut out = vec![Matrix::zeros(r, c); self.degree() + other.degree() + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        Ok(MatrixPoly { coeffs: out })
    }

    /// Coefficients of `trace(P(λ))`.
    pub fn trace(&self) -> Vec<f64> {
        self.coeffs.iter().map(Matrix::trace).collect()
    }
}

/// Coefficients of `(X + λN)^k`.
pub fn poly_power(x: &SymMatrix, n: &SkewMatrix, k: usize) -> Result<MatrixPoly> {
    same_square("poly_power", x, n)?;
    if k < 1 {
        return Err(Error::InvalidArgument("poly_power needs k >= 1".into()));
    }
    Ok(powers(x, n, k).pop().expect("k >= 1"))
}

/// `[(X+λN)^0, (X+λN)^1, …, (X+λN)^max_k]`, each step multiplying on the
/// left by `X + λN`.
fn powers(x: &Matrix, n: &Matrix, max_k: usize) -> Vec<MatrixPoly> {
    let size = x.rows();
    let mut out = Vec::with_capacity(max_k + 1);
    out.push(MatrixPoly {
        coeffs: vec![Matrix::identity(size)],
    });
    for _ in 0..max_k {
        let prev = &out.last().expect("non-empty").coeffs;
        let mut next = vec![Matrix::zeros(size, size); prev.len() + 1];
        for (j, c) in prev.iter().enumerate() {
            next[j] += &(x * c);
            next[j + 1] += &(n * c);
        }
        out.push(MatrixPoly { coeffs: next });
    }
    out
}

/// Index `(k, 2r)` of `h_{k,2r}`, the coefficient of `λ^{2r}` in
/// `(1/k) trace (X+λN)^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InvariantIndex {
    pub k: usize,
    pub two_r: usize,
}

impl InvariantIndex {
    pub fn new(k: usize, two_r: usize) -> Self {
        Self { k, two_r }
    }

    /// `h_k_2r`, used as column and key name.
    pub fn label(&self) -> String {
        format!("h_{}_{}", self.k, self.two_r)
    }
}

impl fmt::Display for InvariantIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "h_{{{},{}}}", self.k, self.two_r)
    }
}

/// `(k, 2r)` for `k = 1…n−1`, `0 ≤ 2r < k`, ordered by `k` then `2r`.
pub fn admissible_indices(n: usize) -> Vec<InvariantIndex> {
    (1..n)
        .flat_map(|k| (0..k).step_by(2).map(move |j| InvariantIndex::new(k, j)))
        .collect()
}

/// `⌊n/2⌋·⌊(n+1)/2⌋`.
pub fn invariant_count(n: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("invariant_count needs n >= 2, got {n}")));
    }
    Ok((n / 2) * n.div_ceil(2))
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantTable {
    pub n: usize,
    pub values: BTreeMap<InvariantIndex, f64>,
    pub gradients: Option<BTreeMap<InvariantIndex, SymMatrix>>,
}

impl InvariantTable {
    pub fn get(&self, k: usize, two_r: usize) -> Option<f64> {
        self.values.get(&InvariantIndex::new(k, two_r)).copied()
    }

    pub fn gradient(&self, k: usize, two_r: usize) -> Option<&SymMatrix> {
        self.gradients.as_ref()?.get(&InvariantIndex::new(k, two_r))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl Serialize for InvariantTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.values.len()))?;
        for (idx, v) in &self.values {
            m.serialize_entry(&idx.label(), v)?;
        }
        m.end()
    }
}

fn check_odd(k: usize, traces: &[f64], scale: f64) -> Result<()> {
    let bound = tolerances::ODD_COEFF_TOL * scale.powi(k as i32).max(1.0);
    for (power, &value) in traces.iter().enumerate().skip(1).step_by(2) {
        if power < k && value.abs() > bound {
            return Err(Error::OddCoefficient { k, power, value });
        }
    }
    Ok(())
}

/// All `h_{k,2r}` at `x`. The odd-power coefficients are checked against
/// zero (relative to `(‖X‖_F + ‖N‖_F)^k`) and discarded.
pub fn invariant_table(x: &SymMatrix, n: &SkewMatrix) -> Result<InvariantTable> {
    same_square("invariant_table", x, n)?;
    let size = x.n();
    let scale = x.norm_fro() + n.norm_fro();
    let polys = powers(x, n, size.saturating_sub(1));
    let mut values = BTreeMap::new();
    for (k, poly) in polys.iter().enumerate().skip(1) {
        let traces = poly.trace();
        check_odd(k, &traces, scale)?;
        for j in (0..k).step_by(2) {
            values.insert(InvariantIndex::new(k, j), traces[j] / k as f64);
        }
    }
    Ok(InvariantTable {
        n: size,
        values,
        gradients: None,
    })
}

/// [`invariant_table`] with gradients `∇h_{k,2r}`, the `λ^{2r}` coefficient
/// of `(X+λN)^{k−1}` (even coefficients are already symmetric).
pub fn gradient_table(x: &SymMatrix, n: &SkewMatrix) -> Result<InvariantTable> {
    let mut table = invariant_table(x, n)?;
    let polys = powers(x, n, x.n().saturating_sub(2));
    let grads = table
        .values
        .keys()
        .map(|idx| (*idx, SymMatrix::symmetrize(&polys[idx.k - 1].coeffs[idx.two_r])))
        .collect();
    table.gradients = Some(grads);
    Ok(table)
}

/// `h_{k,j}(x)` for any `k ≥ 1`, `0 ≤ j ≤ k`. Odd `j` gives the
/// (identically zero) odd coefficient as computed.
pub fn invariant_value(x: &SymMatrix, n: &SkewMatrix, k: usize, j: usize) -> Result<f64> {
    if j > k {
        return Err(Error::InvalidArgument(format!("h_{{{k},{j}}} needs j <= k")));
    }
    let p = poly_power(x, n, k)?;
    Ok(p.coeffs[j].trace() / k as f64)
}

/// `∇h_{k,j}(x)`: the symmetric part of the `λ^j` coefficient of
/// `(X+λN)^{k−1}`. Zero for odd `j` and for the constant `j = k`;
/// `N^{k−1}` for `j = k − 1`.
pub fn invariant_gradient(x: &SymMatrix, n: &SkewMatrix, k: usize, j: usize) -> Result<SymMatrix> {
    same_square("invariant_gradient", x, n)?;
    if k < 1 || j > k {
        return Err(Error::InvalidArgument(format!("∇h_{{{k},{j}}} needs k >= 1 and j <= k")));
    }
    if j == k || j % 2 == 1 {
        return Ok(SymMatrix::zeros(x.n()));
    }
    let polys = powers(x, n, k - 1);
    Ok(SymMatrix::symmetrize(&polys[k - 1].coeffs[j]))
}

/// `‖B_X(∇h_{k,k−r}) − C_X(∇h_{k+1,k−r})‖_max` for `1 ≤ k ≤ n−1`,
/// `0 ≤ r ≤ k`, `k − r` even.
pub fn recursion_residual(x: &SymMatrix, n: &SkewMatrix, k: usize, r: usize) -> Result<f64> {
    same_square("recursion_residual", x, n)?;
    let size = x.n();
    if k < 1 || k >= size || r > k || !(k - r).is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "recursion index (k, r) = ({k}, {r}) needs 1 <= k <= n-1, r <= k, k-r even (n = {size})"
        )));
    }
    let j = k - r;
    let lhs = tensor_b_unchecked(x, &*invariant_gradient(x, n, k, j)?, n);
    let rhs = tensor_c_unchecked(&*invariant_gradient(x, n, k + 1, j)?, n);
    Ok((&*lhs - &*rhs).norm_max())
}

/// All admissible `(k, r)` pairs for [`recursion_residual`] at size `n`.
pub fn recursion_indices(n: usize) -> Vec<(usize, usize)> {
    (1..n)
        .flat_map(|k| (0..=k).filter(move |r| (k - r) % 2 == 0).map(move |r| (k, r)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::frobenius;
    use crate::sampling::{random_unit_skew, random_unit_sym, rng_from_seed};

    /// `Σ trace(w)` over all words of length `k` in `{X, N}` with exactly
    /// `j` letters `N`, divided by `k`.
    fn word_sum(x: &Matrix, n: &Matrix, k: usize, j: usize) -> f64 {
        let size = x.rows();
        let mut total = 0.0;
        for mask in 0u32..(1 << k) {
            if mask.count_ones() as usize != j {
                continue;
            }
            let mut w = Matrix::identity(size);
            for bit in 0..k {
                w = if mask & (1 << bit) != 0 { &w * n } else { &w * x };
            }
            total += w.trace();
        }
        total / k as f64
    }

    #[test]
    fn poly_power_small_cases() {
        let mut rng = rng_from_seed(101);
        let x = random_unit_sym(3, &mut rng);
        let n = random_unit_skew(3, &mut rng);
        let p1 = poly_power(&x, &n, 1).unwrap();
        assert_eq!(p1.coeffs(), &[x.as_matrix().clone(), n.as_matrix().clone()]);
        let p2 = poly_power(&x, &n, 2).unwrap();
        assert_eq!(p2.degree(), 2);
        assert!((&p2.coeffs[0] - &(&*x * &*x)).norm_max() < 1e-15);
        let mixed = &(&*x * &*n) + &(&*n * &*x);
        assert!((&p2.coeffs[1] - &mixed).norm_max() < 1e-15);
        assert!((&p2.coeffs[2] - &(&*n * &*n)).norm_max() < 1e-15);
        assert!(p2.trace()[1].abs() < 1e-15);
        assert!(poly_power(&x, &n, 0).is_err());
    }

    #[test]
    fn poly_mul_matches_power() {
        let mut rng = rng_from_seed(103);
        let x = random_unit_sym(4, &mut rng);
        let n = random_unit_skew(4, &mut rng);
        let lin = MatrixPoly::linear(&x, &n).unwrap();
        let cube = lin.mul(&lin).unwrap().mul(&lin).unwrap();
        let direct = poly_power(&x, &n, 3).unwrap();
        for (a, b) in cube.coeffs().iter().zip(direct.coeffs()) {
            assert!((a - b).norm_max() < 1e-14);
        }
    }

    #[test]
    fn counts_and_index_sets() {
        assert_eq!(invariant_count(4).unwrap(), 4);
        assert_eq!(invariant_count(9).unwrap(), 20);
        assert!(invariant_count(1).is_err());
        for p in 1..5 {
            assert_eq!(invariant_count(2 * p).unwrap(), p * p);
        }
        for p in 0..4 {
            for d in 1..5 {
                let n = 2 * p + d;
                if n < 2 {
                    continue;
                }
                assert_eq!(invariant_count(n).unwrap(), p * p + p * d + (d / 2) * d.div_ceil(2));
            }
        }
        let keys: Vec<(usize, usize)> = admissible_indices(4).iter().map(|i| (i.k, i.two_r)).collect();
        assert_eq!(keys, vec![(1, 0), (2, 0), (3, 0), (3, 2)]);
        for n in 2..10 {
            assert_eq!(admissible_indices(n).len(), invariant_count(n).unwrap());
        }
    }

    #[test]
    fn table_matches_word_enumeration() {
        let mut rng = rng_from_seed(107);
        for size in 2..=4 {
            let x = random_unit_sym(size, &mut rng);
            let n = random_unit_skew(size, &mut rng);
            let table = invariant_table(&x, &n).unwrap();
            assert_eq!(table.len(), invariant_count(size).unwrap());
            for (idx, &v) in &table.values {
                let oracle = word_sum(&x, &n, idx.k, idx.two_r);
                assert!((v - oracle).abs() <= 1e-12, "{idx}: {v} vs {oracle}");
            }
            for k in 1..=3 {
                for j in (1..=k).step_by(2) {
                    assert!(word_sum(&x, &n, k, j).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn closed_forms() {
        let mut rng = rng_from_seed(109);
        let x = random_unit_sym(5, &mut rng);
        let n = random_unit_skew(5, &mut rng);
        let (xm, nm): (&Matrix, &Matrix) = (&x, &n);
        let n2 = nm * nm;
        let t = invariant_table(&x, &n).unwrap();
        assert!((t.get(3, 2).unwrap() - (&n2 * xm).trace()).abs() < 1e-14);
        let nxnx = &(&(nm * xm) * nm) * xm;
        let h42 = (&n2 * &(xm * xm)).trace() + 0.5 * nxnx.trace();
        assert!((t.get(4, 2).unwrap() - h42).abs() < 1e-14);
        assert!((t.get(1, 0).unwrap() - xm.trace()).abs() < 1e-15);
        assert!((t.get(2, 0).unwrap() - 0.5 * (xm * xm).trace()).abs() < 1e-15);
    }

    #[test]
    fn gradient_special_cases() {
        let mut rng = rng_from_seed(113);
        let x = random_unit_sym(5, &mut rng);
        let n = random_unit_skew(5, &mut rng);
        assert_eq!(invariant_gradient(&x, &n, 2, 0).unwrap(), x);
        for k in [1usize, 3, 5] {
            let g = invariant_gradient(&x, &n, k, k - 1).unwrap();
            assert!((&*g - &n.powi(k - 1)).norm_max() < 1e-15);
        }
        assert_eq!(invariant_gradient(&x, &n, 3, 3).unwrap(), SymMatrix::zeros(5));
        assert_eq!(invariant_gradient(&x, &n, 4, 1).unwrap(), SymMatrix::zeros(5));
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = rng_from_seed(127);
        let x = random_unit_sym(6, &mut rng);
        let n = random_unit_skew(6, &mut rng);
        let y = random_unit_sym(6, &mut rng);
        let h = 1e-5;
        let table = gradient_table(&x, &n).unwrap();
        let plus = invariant_table(&x.add(&y.scale(h)), &n).unwrap();
        let minus = invariant_table(&x.sub(&y.scale(h)), &n).unwrap();
        for idx in table.values.keys() {
            let fd = (plus.values[idx] - minus.values[idx]) / (2.0 * h);
            let g = table.gradient(idx.k, idx.two_r).unwrap();
            let an = frobenius(g, &y).unwrap();
            assert!((fd - an).abs() <= 1e-6, "{idx}: {fd} vs {an}");
        }
    }

    #[test]
    fn recursion_holds() {
        let mut rng = rng_from_seed(131);
        for size in [3usize, 4, 6, 7] {
            let x = random_unit_sym(size, &mut rng);
            let n = random_unit_skew(size, &mut rng);
            for (k, r) in recursion_indices(size) {
                let res = recursion_residual(&x, &n, k, r).unwrap();
                assert!(res <= 1e-11, "n={size} (k,r)=({k},{r}): {res:e}");
            }
        }
        let x = random_unit_sym(4, &mut rng);
        let n = random_unit_skew(4, &mut rng);
        assert!(recursion_residual(&x, &n, 3, 0).is_err());
        assert!(recursion_residual(&x, &n, 4, 0).is_err());
        assert!(recursion_residual(&x, &n, 2, 3).is_err());
    }

    #[test]
    fn recursion_example_three_two() {
        let mut rng = rng_from_seed(137);
        let x = random_unit_sym(5, &mut rng);
        let n = random_unit_skew(5, &mut rng);
        let g32 = invariant_gradient(&x, &n, 3, 2).unwrap();
        let g42 = invariant_gradient(&x, &n, 4, 2).unwrap();
        let lhs = tensor_b_unchecked(&x, &g32, &n);
        let rhs = tensor_c_unchecked(&g42, &n);
        assert!((&*lhs - &*rhs).norm_max() < 1e-14);
        assert!(lhs.norm_max() > 1e-3);
    }

    #[test]
    fn values_and_table_agree() {
        let mut rng = rng_from_seed(139);
        let x = random_unit_sym(5, &mut rng);
        let n = random_unit_skew(5, &mut rng);
        let t = invariant_table(&x, &n).unwrap();
        for (idx, v) in &t.values {
            assert_eq!(invariant_value(&x, &n, idx.k, idx.two_r).unwrap(), *v);
        }
        let json = serde_json::to_value(&t).unwrap();
        assert!(json.get("h_3_2").is_some());
    }
}
