//! The symmetric matrix `X(J, r) = Σ_n (Z_r(w_n) ⊗ I)ᵀ J (Z_r(w_n) ⊗ I) / r'(w_n)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::polyrat::{poly_roots, separation, Poly, RationalFn, ROOT_TOL};
use crate::statespace::StateBasis;
use crate::{Error, Result, C64};

/// Tolerance on `r(z) = conj r(conj z)` and on the imaginary part of `X`.
pub const REAL_TOL: f64 = 1e-9;
/// `X` counts as singular when `σ_min ≤ SINGULAR_TOL · ‖X‖`.
pub const SINGULAR_TOL: f64 = 1e-8;

/// A real `J` with `J = Jᵀ = J⁻¹`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct SignatureMatrix {
    j: DMatrix<f64>,
}

impl SignatureMatrix {
    pub fn new(j: DMatrix<f64>) -> Result<Self> {
        if j.nrows() != j.ncols() || j.nrows() == 0 {
            return Err(Error::NotSignature(format!("{}x{} is not a nonempty square", j.nrows(), j.ncols())));
        }
        let sym = linalg::norm_inf_real(&(&j - j.transpose()));
        let inv = linalg::norm_inf_real(&(&j * &j - DMatrix::identity(j.nrows(), j.ncols())));
        if sym > 1e-12 || inv > 1e-12 {
            return Err(Error::NotSignature(format!("|J - J^T| = {sym:.2e}, |J^2 - I| = {inv:.2e}")));
        }
        Ok(SignatureMatrix { j })
    }

    pub fn identity(s: usize) -> Self {
        SignatureMatrix { j: DMatrix::identity(s, s) }
    }

    /// `diag(signs)`; every entry must be `±1`.
    pub fn diag(signs: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(signs)))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.j
    }

    pub fn size(&self) -> usize {
        self.j.nrows()
    }

    pub fn to_complex(&self) -> DMatrix<C64> {
        linalg::to_complex(&self.j)
    }

    /// Number of `−1` eigenvalues.
    pub fn negative_count(&self) -> usize {
        linalg::symmetric_eigen_real(&self.j).0.iter().filter(|&&v| v < 0.0).count()
    }
}

impl TryFrom<Vec<Vec<f64>>> for SignatureMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotSignature("J must be square".into()));
        }
        Self::new(DMatrix::from_fn(n, n, |i, k| rows[i][k]))
    }
}

impl From<SignatureMatrix> for Vec<Vec<f64>> {
    fn from(s: SignatureMatrix) -> Self {
        (0..s.j.nrows()).map(|i| s.j.row(i).iter().copied().collect()).collect()
    }
}

/// `X(J, r)` together with the data it was computed from.
#[derive(Clone, Debug, Serialize)]
pub struct AssocSymMatrix {
    #[serde(with = "crate::json::real_matrix")]
    pub x: DMatrix<f64>,
    #[serde(rename = "J")]
    pub j: SignatureMatrix,
    pub r: RationalFn,
    #[serde(with = "crate::json::complex")]
    pub alpha: C64,
    /// Largest imaginary part discarded.
    pub imaginary_residue: f64,
}

/// `X = Yᵀ J₀ Y`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignatureFactorization {
    #[serde(rename = "Y", with = "crate::json::real_matrix")]
    pub y: DMatrix<f64>,
    #[serde(rename = "J0")]
    pub j0: SignatureMatrix,
}

/// The residue sum with complex entries, for any `r` and basis.
pub fn assoc_sym_matrix_complex(basis: &StateBasis, j: &DMatrix<C64>, alpha: C64) -> Result<DMatrix<C64>> {
    let fib = basis.rational().fiber(alpha)?;
    let p = j.nrows();
    let np = basis.dim() * p;
    let mut x = DMatrix::zeros(np, np);
    for (&w, &d) in fib.points.iter().zip(&fib.r_prime) {
        let zk = basis.eval_z_kron(w, p)?;
        x += zk.transpose() * j * zk / d;
    }
    Ok(x)
}

/// `X(J, r)` for real `r`; the imaginary part is checked and dropped.
pub fn assoc_sym_matrix(basis: &StateBasis, j: &SignatureMatrix, alpha: C64) -> Result<AssocSymMatrix> {
    let r = basis.rational();
    let defect = r.real_defect();
    if defect > REAL_TOL {
        return Err(Error::NotRealRational { defect });
    }
    let xc = assoc_sym_matrix_complex(basis, &j.to_complex(), alpha)?;
    let x = xc.map(|z| z.re);
    let imaginary_residue = xc.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let scale = 1.0 + linalg::norm_inf_real(&x);
    if imaginary_residue > REAL_TOL * scale {
        return Err(Error::NotRealRational { defect: imaginary_residue });
    }
    let asym = linalg::norm_inf_real(&(&x - x.transpose()));
    if asym > REAL_TOL * scale {
        return Err(Error::InvalidArgument(format!("X is not symmetric: {asym:.2e}")));
    }
    let smin = linalg::sigma_min(&linalg::to_complex(&x));
    if smin <= SINGULAR_TOL * linalg::norm_inf_real(&x) {
        return Err(Error::SingularX { sigma_min: smin });
    }
    Ok(AssocSymMatrix { x, j: j.clone(), r: r.clone(), alpha, imaginary_residue })
}

/// Largest `‖X(α_i) − X(α_j)‖∞` over pairs.
pub fn alpha_independence_report(basis: &StateBasis, j: &SignatureMatrix, alphas: &[C64]) -> Result<f64> {
    let xs = alphas
        .iter()
        .map(|&a| assoc_sym_matrix_complex(basis, &j.to_complex(), a))
        .collect::<Result<Vec<_>>>()?;
    let mut worst: f64 = 0.0;
    for (i, a) in xs.iter().enumerate() {
        for b in &xs[i + 1..] {
            worst = worst.max(linalg::norm_inf(&(a - b)));
        }
    }
    Ok(worst)
}

/// `h_n = Σ_k w_k^n / p'(w_k)` for `n = 0..=2N−2`.
pub fn hankel_moments(p: &Poly) -> Result<Vec<C64>> {
    let n = p.degree();
    if n == 0 {
        return Err(Error::ConstantNumerator);
    }
    let roots = poly_roots(p, ROOT_TOL)?;
    let scale = 1.0 + roots.iter().map(|w| w.norm()).fold(0.0, f64::max);
    let sep = separation(&roots);
    if sep <= 1e-6 * scale {
        return Err(Error::MultipleRoots { separation: sep });
    }
    let dp = p.derivative();
    let weights: Vec<C64> = roots.iter().map(|&w| 1.0 / dp.eval(w)).collect();
    Ok((0..=2 * n - 2)
        .map(|k| roots.iter().zip(&weights).map(|(w, c)| w.powu(k as u32) * c).sum())
        .collect())
}

/// `r'(a_n)` of the Blaschke product in closed form.
pub fn blaschke_derivative_at_zero(zeros: &[C64], n: usize) -> C64 {
    let a = zeros[n];
    let one = C64::new(1.0, 0.0);
    let prod: C64 = zeros
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != n)
        .map(|(_, &ak)| (a - ak) / (one - a * ak.conj()))
        .product();
    prod / (1.0 - a.norm_sqr())
}

/// `X(1, r)_{uv} = Σ_n 1 / (r'(a_n)(1 − a_n ā_u)(1 − a_n ā_v))` for a Blaschke product.
pub fn blaschke_x(zeros: &[C64]) -> Result<DMatrix<C64>> {
    if let Some(&zero) = zeros.iter().find(|a| a.norm() >= 1.0) {
        return Err(Error::ZeroOutsideDisk { zero });
    }
    if zeros.is_empty() || separation(zeros) <= 1e-12 {
        return Err(Error::ZerosNotDistinct);
    }
    let n = zeros.len();
    let one = C64::new(1.0, 0.0);
    let dr: Vec<C64> = (0..n).map(|k| blaschke_derivative_at_zero(zeros, k)).collect();
    Ok(DMatrix::from_fn(n, n, |u, v| {
        zeros
            .iter()
            .zip(&dr)
            .map(|(&a, &d)| one / (d * (one - a * zeros[u].conj()) * (one - a * zeros[v].conj())))
            .sum()
    }))
}

/// `X = Yᵀ J₀ Y` from the eigendecomposition, `+1` block first.
pub fn factor_signature(x: &DMatrix<f64>) -> Result<SignatureFactorization> {
    let n = x.nrows();
    let (vals, vecs) = linalg::symmetric_eigen_real(x);
    let top = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let bottom = vals.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
    if n == 0 || bottom <= SINGULAR_TOL * top {
        return Err(Error::SingularX { sigma_min: if bottom.is_finite() { bottom } else { 0.0 } });
    }
    let mut y = DMatrix::zeros(n, n);
    let mut signs = Vec::with_capacity(n);
    for (row, k) in (0..n).rev().enumerate() {
        let mut q = vecs.column(k).into_owned();
        if let Some(first) = q.iter().find(|v| v.abs() > 1e-12) {
            if *first < 0.0 {
                q = -q;
            }
        }
        let s = vals[k].abs().sqrt();
        for i in 0..n {
            y[(row, i)] = s * q[i];
        }
        signs.push(vals[k].signum());
    }
    Ok(SignatureFactorization { y, j0: SignatureMatrix::diag(&signs)? })
}

/// First point of `{k/4 + i l/4 : |k|, |l| ≤ 16}`, ordered by modulus, inside `Ω(r)`.
pub fn default_alpha(r: &RationalFn) -> Result<C64> {
    let mut grid: Vec<C64> = (-16..=16)
        .flat_map(|k| (-16..=16).map(move |l| C64::new(k as f64 / 4.0, l as f64 / 4.0)))
        .collect();
    grid.sort_by(|a, b| {
        a.norm()
            .total_cmp(&b.norm())
            .then(a.im.abs().total_cmp(&b.im.abs()))
            .then(b.re.total_cmp(&a.re))
            .then(b.im.total_cmp(&a.im))
    });
    grid.into_iter()
        .find(|&a| r.in_omega(a, 1e-3))
        .ok_or(Error::DegenerateAlpha { alpha: C64::new(0.0, 0.0), reason: "no grid point in Omega(r)".into() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn real_rows(rows: &[&[f64]]) -> DMatrix<f64> {
        DMatrix::from_fn(rows.len(), rows[0].len(), |i, k| rows[i][k])
    }

    fn x_of(p: &[f64], q: &[f64], alpha: C64) -> DMatrix<f64> {
        let r = RationalFn::from_real(p, q).unwrap();
        let b = StateBasis::canonical(&r).unwrap();
        assoc_sym_matrix(&b, &SignatureMatrix::identity(1), alpha).unwrap().x
    }

    fn close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
        a.shape() == b.shape() && linalg::norm_inf_real(&(a - b)) <= tol
    }

    /// Residues of `e_i e_j / (r − α)` by trapezoid sums on small circles.
    fn quadrature_x(basis: &StateBasis, alpha: C64) -> DMatrix<C64> {
        let r = basis.rational();
        let pts = r.preimages(alpha, ROOT_TOL).unwrap();
        let mut avoid: Vec<C64> = r.poles().unwrap();
        avoid.extend(pts.iter().copied());
        let n = basis.dim();
        let m = 128;
        let mut x = DMatrix::zeros(n, n);
        for &w in &pts {
            let rad = avoid.iter().filter(|&&v| v != w).map(|v| (v - w).norm()).fold(1.0, f64::min) / 3.0;
            for k in 0..m {
                let e = C64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64);
                let s = w + rad * e;
                let zs = basis.eval_z(s).unwrap();
                let weight = rad * e / (m as f64) / (r.eval(s) - alpha);
                x += zs.transpose() * &zs * weight;
            }
        }
        x
    }

    #[test]
    fn worked_examples() {
        let want = real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
        for alpha in [c(2.5, 0.0), c(10.0 / 3.0, 0.0), c(3.0, 1.0), c(0.0, 0.5)] {
            assert!(close(&x_of(&[1.0, 0.0, 1.0], &[0.0, 1.0], alpha), &want, 1e-9));
        }
        let want = real_rows(&[&[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 0.0, -1.0]]);
        assert!(close(&x_of(&[1.0, 0.0, 0.0, 1.0], &[0.0, 1.0], c(1.0, 0.0)), &want, 1e-9));
        let want = real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(close(&x_of(&[0.0, 0.0, 1.0], &[1.0], c(1.0, 0.0)), &want, 1e-9));
    }

    #[test]
    fn z_power_plus_inverse_is_antidiagonal() {
        for big_n in 2..6 {
            let mut p = vec![0.0; big_n + 2];
            p[0] = 1.0;
            p[big_n + 1] = 1.0;
            let x = x_of(&p, &[0.0, 1.0], c(0.7, 0.2));
            let dim = big_n + 1;
            let want = DMatrix::from_fn(dim, dim, |i, k| {
                if i == big_n && k == big_n {
                    -1.0
                } else if i < big_n && k < big_n && i + k == big_n - 1 {
                    1.0
                } else {
                    0.0
                }
            });
            assert!(close(&x, &want, 1e-9), "N = {big_n}: {x}");
        }
    }

    #[test]
    fn identity_gives_one() {
        let b = StateBasis::canonical(&RationalFn::identity()).unwrap();
        for alpha in [c(0.0, 0.0), c(5.0, -2.0)] {
            let x = assoc_sym_matrix(&b, &SignatureMatrix::identity(1), alpha).unwrap();
            assert!((x.x[(0, 0)] - 1.0).abs() < 1e-14);
        }
        assert_eq!(alpha_independence_report(&b, &SignatureMatrix::identity(1), &[c(0.0, 0.0), c(3.0, 1.0)]).unwrap(), 0.0);
    }

    #[test]
    fn alpha_independence_examples() {
        let r = RationalFn::from_real(&[1.0, 0.0, 1.0], &[0.0, 1.0]).unwrap();
        let b = StateBasis::canonical(&r).unwrap();
        let dev = alpha_independence_report(&b, &SignatureMatrix::identity(1), &[c(2.5, 0.0), c(10.0 / 3.0, 0.0), c(3.0, 1.0)]).unwrap();
        assert!(dev <= 1e-9);

        let r = RationalFn::from_real(&[1.0, 0.0, 0.0, 1.0], &[0.0, 1.0]).unwrap();
        let b = StateBasis::canonical(&r).unwrap();
        let alphas: Vec<C64> = [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)].into_iter().filter(|&a| r.in_omega(a, 1e-6)).collect();
        assert!(alphas.len() >= 2);
        let dev = alpha_independence_report(&b, &SignatureMatrix::identity(1), &alphas).unwrap();
        assert!(dev <= 1e-9);
    }

    #[test]
    fn quadrature_oracle_agrees() {
        let r = RationalFn::from_real(&[1.0, 0.0, 0.0, 1.0], &[0.0, 1.0]).unwrap();
        let b = StateBasis::canonical(&r).unwrap();
        let alpha = c(1.0, 0.5);
        let a = assoc_sym_matrix_complex(&b, &DMatrix::identity(1, 1), alpha).unwrap();
        let q = quadrature_x(&b, alpha);
        assert!(linalg::norm_inf(&(a - q)) < 1e-9);
    }

    #[test]
    fn errors() {
        let r = RationalFn::new(Poly::new(vec![c(0.0, 0.0), c(0.0, 1.0), c(1.0, 0.0)]), Poly::one()).unwrap();
        let b = StateBasis::canonical(&r).unwrap();
        assert!(matches!(assoc_sym_matrix(&b, &SignatureMatrix::identity(1), c(1.0, 0.0)), Err(Error::NotRealRational { .. })));
        let sq = StateBasis::canonical(&RationalFn::from_real(&[0.0, 0.0, 1.0], &[1.0]).unwrap()).unwrap();
        assert!(matches!(assoc_sym_matrix(&sq, &SignatureMatrix::identity(1), c(0.0, 0.0)), Err(Error::DegenerateAlpha { .. })));
        assert!(matches!(SignatureMatrix::diag(&[1.0, 2.0]), Err(Error::NotSignature(_))));
        assert!(matches!(SignatureMatrix::new(real_rows(&[&[0.0, 1.0], &[0.0, 0.0]])), Err(Error::NotSignature(_))));
        assert!(SignatureMatrix::new(real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])).is_ok());
    }

    #[test]
    fn kronecker_identity() {
        let r = RationalFn::from_real(&[1.0, 0.0, 0.0, 1.0], &[0.0, 1.0]).unwrap();
        let b = StateBasis::canonical(&r).unwrap();
        let j = SignatureMatrix::diag(&[1.0, -1.0]).unwrap();
        let xj = assoc_sym_matrix(&b, &j, c(1.0, 0.0)).unwrap().x;
        let x1 = assoc_sym_matrix(&b, &SignatureMatrix::identity(1), c(1.0, 0.0)).unwrap().x;
        assert!(close(&xj, &x1.kronecker(j.matrix()), 1e-10));
    }

    #[test]
    fn hankel_examples() {
        assert!(matches!(hankel_moments(&Poly::monomial(2)), Err(Error::MultipleRoots { .. })));
        let h = hankel_moments(&Poly::from_real(&[-1.0, 0.0, 1.0])).unwrap();
        for (v, want) in h.iter().zip([0.0, 1.0, 0.0]) {
            assert!((v - want).norm() < 1e-12);
        }
        let h = hankel_moments(&Poly::from_real(&[1.0, 0.0, 0.0, 1.0])).unwrap();
        for (v, want) in h.iter().take(3).zip([0.0, 0.0, 1.0]) {
            assert!((v - want).norm() < 1e-12);
        }
    }

    #[test]
    fn hankel_matrix_is_x_for_polynomials() {
        let p = [0.3, -1.0, 0.5, 0.0, 1.0];
        let h = hankel_moments(&Poly::from_real(&p)).unwrap();
        let x = x_of(&p, &[1.0], c(0.4, 0.0));
        let n = 4;
        let hm = DMatrix::from_fn(n, n, |i, k| h[i + k].re);
        assert!(close(&x, &hm, 1e-9));
    }

    #[test]
    fn blaschke_examples() {
        assert!((blaschke_x(&[c(0.0, 0.0)]).unwrap()[(0, 0)] - 1.0).norm() < 1e-14);
        for zeros in [vec![c(0.0, 0.0), c(0.5, 0.0)], vec![c(1.0 / 3.0, 0.0), c(-1.0 / 3.0, 0.0)], vec![c(0.2, 0.3), c(-0.5, 0.1), c(0.0, -0.6)]] {
            let closed = blaschke_x(&zeros).unwrap();
            let b = StateBasis::blaschke(&zeros).unwrap();
            let general = assoc_sym_matrix_complex(&b, &DMatrix::identity(1, 1), c(0.0, 0.0)).unwrap();
            assert!(linalg::norm_inf(&(closed - general)) < 1e-9);
        }
        assert!(matches!(blaschke_x(&[c(1.0, 0.0)]), Err(Error::ZeroOutsideDisk { .. })));
        assert!(matches!(blaschke_x(&[c(0.5, 0.0), c(0.5, 0.0)]), Err(Error::ZerosNotDistinct)));
    }

    #[test]
    fn factorization_examples() {
        let f = factor_signature(&real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])).unwrap();
        assert!(close(&f.y, &DMatrix::identity(2, 2), 1e-12));
        assert_eq!(f.j0.matrix(), &real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]));

        let f = factor_signature(&real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap();
        let s = 0.5f64.sqrt();
        assert!(close(&f.y, &real_rows(&[&[s, s], &[s, -s]]), 1e-12));
        assert_eq!(f.j0.matrix(), &real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]));

        let f = factor_signature(&real_rows(&[&[4.0]])).unwrap();
        assert!((f.y[(0, 0)] - 2.0).abs() < 1e-12);
        assert!(matches!(factor_signature(&real_rows(&[&[1.0, 1.0], &[1.0, 1.0]])), Err(Error::SingularX { .. })));
    }

    #[test]
    fn default_alpha_is_deterministic() {
        let r = RationalFn::from_real(&[1.0, 0.0, 1.0], &[0.0, 1.0]).unwrap();
        assert_eq!(default_alpha(&r).unwrap(), c(0.0, 0.0));
        let sq = RationalFn::from_real(&[0.0, 0.0, 1.0], &[1.0]).unwrap();
        assert_eq!(default_alpha(&sq).unwrap(), c(0.25, 0.0));
    }

    fn fixtures() -> Vec<RationalFn> {
        vec![
            RationalFn::from_real(&[1.0, 0.0, 1.0], &[0.0, 1.0]).unwrap(),
            RationalFn::from_real(&[1.0, 0.0, 0.0, 1.0], &[0.0, 1.0]).unwrap(),
            RationalFn::from_real(&[1.0, 0.0, 0.0, 0.0, 1.0], &[0.0, 1.0]).unwrap(),
            RationalFn::from_real(&[0.5, -1.0, 0.0, 1.0], &[1.0]).unwrap(),
            RationalFn::from_real(&[2.0, 0.0, 1.0, 1.0], &[-0.5, 0.0, 1.0]).unwrap(),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn x_is_real_symmetric_invertible_and_alpha_free(idx in 0usize..5, a in prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 5)) {
            let r = fixtures()[idx].clone();
            let b = StateBasis::canonical(&r).unwrap();
            let alphas: Vec<C64> = a.iter().map(|&(x, y)| c(x, y)).filter(|&al| r.in_omega(al, 1e-2)).collect();
            prop_assume!(!alphas.is_empty());
            let j = SignatureMatrix::identity(1);
            let mut norm = 0.0;
            for &al in &alphas {
                let x = assoc_sym_matrix(&b, &j, al).unwrap();
                norm = linalg::norm_inf_real(&x.x);
                prop_assert!(x.imaginary_residue <= 1e-9 * (1.0 + norm));
            }
            let dev = alpha_independence_report(&b, &j, &alphas).unwrap();
            prop_assert!(dev <= 1e-8 * (1.0 + norm), "deviation {dev}");
        }

        #[test]
        fn congruence_under_basis_change(idx in 0usize..5, s in prop::collection::vec(-1.0..1.0f64, 16)) {
            let r = fixtures()[idx].clone();
            let b = StateBasis::canonical(&r).unwrap();
            let n = b.dim();
            let sm = DMatrix::from_fn(n, n, |i, k| s[(i * n + k) % 16] + if i == k { 2.0 } else { 0.0 });
            prop_assume!(linalg::sigma_min(&linalg::to_complex(&sm)) > 0.1);
            let b2 = b.change_basis(&linalg::to_complex(&sm)).unwrap();
            let alpha = default_alpha(&r).unwrap();
            let j = SignatureMatrix::identity(1);
            let x = assoc_sym_matrix(&b, &j, alpha).unwrap().x;
            let x2 = assoc_sym_matrix(&b2, &j, alpha).unwrap().x;
            let want = sm.transpose() * &x * &sm;
            prop_assert!(linalg::norm_inf_real(&(x2 - &want)) <= 1e-9 * (1.0 + linalg::norm_inf_real(&want)));
        }

        #[test]
        fn factorization_reconstructs(idx in 0usize..5) {
            let r = fixtures()[idx].clone();
            let b = StateBasis::canonical(&r).unwrap();
            let x = assoc_sym_matrix(&b, &SignatureMatrix::identity(1), default_alpha(&r).unwrap()).unwrap().x;
            let f = factor_signature(&x).unwrap();
            let back = f.y.transpose() * f.j0.matrix() * &f.y;
            prop_assert!(linalg::norm_inf_real(&(back - &x)) <= 1e-8);
            let neg = linalg::symmetric_eigen_real(&x).0.iter().filter(|&&v| v < 0.0).count();
            prop_assert_eq!(f.j0.negative_count(), neg);
        }

        #[test]
        fn hankel_anti_triangular(roots in prop::collection::vec((-1.5..1.5f64, -1.5..1.5f64), 1..7)) {
            let pts: Vec<C64> = roots.iter().map(|&(x, y)| c(x, y)).collect();
            prop_assume!(separation(&pts) > 0.05);
            let p = Poly::from_roots(&pts, c(1.0, 0.0));
            let h = hankel_moments(&p).unwrap();
            let n = pts.len();
            for v in h.iter().take(n.saturating_sub(1)) {
                prop_assert!(v.norm() <= 1e-9);
            }
            prop_assert!((h[n - 1] - 1.0).norm() <= 1e-9);
        }
    }
}
