//! The state space `𝔏(r)` and its realization.
//!
//! A basis of `𝔏(r)` is written `e_k = m_k / D` with `D` a fixed multiple of
//! `q` and `deg m_k ≤ N − 1`. Around a center `a` with `q(a) ≠ 0`, the
//! backward shift `f ↦ (f(z) − f(a))/(z − a)` maps the space into itself;
//! its matrix `T` in the basis, together with `G = Z_r(a)`, gives
//!
//! ```text
//! Z_r(z) = G (I − (z−a)T)^{-1},    r(z) = d + (z−a) Z_r(z) b.
//! ```

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::polyrat::{Poly, RationalFn, ZERO_TOL};
use crate::{Error, Result, C64};

/// `r(z) = d + (z − center) G (I − (z − center) T)^{-1} b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    #[serde(with = "crate::json::complex")]
    pub d: C64,
    #[serde(rename = "G", with = "crate::json::complex_matrix")]
    pub g: DMatrix<C64>,
    #[serde(rename = "T", with = "crate::json::complex_matrix")]
    pub t: DMatrix<C64>,
    #[serde(with = "crate::json::complex_matrix")]
    pub b: DMatrix<C64>,
    #[serde(with = "crate::json::complex", default)]
    pub center: C64,
}

impl Realization {
    pub fn dim(&self) -> usize {
        self.t.nrows()
    }

    /// `(I − (z − center) T)^{-1}`.
    pub fn resolvent(&self, z: C64) -> Result<DMatrix<C64>> {
        let n = self.dim();
        let m = linalg::identity(n) - &self.t * (z - self.center);
        let lu = m.lu();
        let u = lu.u();
        let diag: Vec<f64> = (0..n).map(|i| u[(i, i)].norm()).collect();
        let top = diag.iter().copied().fold(0.0, f64::max);
        let bottom = diag.iter().copied().fold(f64::INFINITY, f64::min);
        if n > 0 && (top == 0.0 || bottom <= 1e-14 * top) {
            return Err(Error::PoleOfR { z });
        }
        lu.try_inverse().ok_or(Error::PoleOfR { z })
    }

    /// The row `G (I − (z − center) T)^{-1}`.
    pub fn eval_z(&self, z: C64) -> Result<DMatrix<C64>> {
        Ok(&self.g * self.resolvent(z)?)
    }

    /// `d/dz Z_r(z) = G R T R` with `R` the resolvent.
    pub fn eval_z_derivative(&self, z: C64) -> Result<DMatrix<C64>> {
        let r = self.resolvent(z)?;
        Ok(&self.g * &r * &self.t * &r)
    }

    /// `r(z)` recomputed from the realization.
    pub fn eval_r(&self, z: C64) -> Result<C64> {
        let v = self.eval_z(z)? * &self.b;
        Ok(self.d + (z - self.center) * v[(0, 0)])
    }

    /// `(I − (w − center) T)^{-1} b`.
    pub fn resolvent_b(&self, w: C64) -> Result<DMatrix<C64>> {
        Ok(self.resolvent(w)? * &self.b)
    }

    /// `Z_r(z) (I − (w − center) T)^{-1} b`, equal to `(r(z) − r(w))/(z − w)`.
    pub fn divided_difference(&self, z: C64, w: C64) -> Result<C64> {
        let v = self.eval_z(z)? * self.resolvent_b(w)?;
        Ok(v[(0, 0)])
    }

    /// `[G; GT; …; GT^{N−1}]`.
    pub fn observability_matrix(&self) -> DMatrix<C64> {
        let n = self.dim();
        let mut out = DMatrix::zeros(n, n);
        let mut row = self.g.clone();
        for i in 0..n {
            out.set_row(i, &row.row(0));
            row = &row * &self.t;
        }
        out
    }

    pub fn observability_rank(&self) -> usize {
        linalg::rank(&self.observability_matrix(), 1e-10)
    }

    /// Realization for the basis `Z_r S`.
    pub fn change_basis(&self, s: &DMatrix<C64>) -> Result<Realization> {
        let si = linalg::inverse(s, 1e-13)?;
        Ok(Realization {
            d: self.d,
            g: &self.g * s,
            t: &si * &self.t * s,
            b: &si * &self.b,
            center: self.center,
        })
    }

    /// Largest imaginary part among `d, G, T, b, center`.
    pub fn imaginary_residue(&self) -> f64 {
        let m = |x: &DMatrix<C64>| x.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        m(&self.g).max(m(&self.t)).max(m(&self.b)).max(self.d.im.abs()).max(self.center.im.abs())
    }
}

/// A basis `e_k = m_k / D` of `𝔏(r)` with its realization.
#[derive(Clone, Debug)]
pub struct StateBasis {
    r: RationalFn,
    numerators: Vec<Poly>,
    denominator: Poly,
    realization: Realization,
}

/// Candidate centers: `0, 1/4, −1/4, 1/2, −1/2, …` up to `±8`.
fn center_grid() -> impl Iterator<Item = C64> {
    std::iter::once(C64::new(0.0, 0.0)).chain((1..=32).flat_map(|k| {
        let x = k as f64 / 4.0;
        [C64::new(x, 0.0), C64::new(-x, 0.0)]
    }))
}

/// Smallest grid point at distance `≥ 1/4` from every pole of `r`.
pub fn canonical_center(r: &RationalFn) -> Result<C64> {
    let poles = r.poles()?;
    center_grid()
        .find(|a| poles.iter().all(|w| (a - w).norm() >= 0.25))
        .ok_or(Error::PoleAtOrigin { center: C64::new(0.0, 0.0) })
}

/// Order of vanishing of `q` at the origin, at the trimming tolerance.
fn origin_order(q: &Poly) -> usize {
    let top = q.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    q.coeffs().iter().position(|c| c.norm() > ZERO_TOL * top).unwrap_or(0)
}

/// `(z^s, …, z^{N−1}, 1, …, z^{s−1})` over `q / q_s`, where `z^s` exactly divides `q`.
fn canonical_numerators(r: &RationalFn) -> (Vec<Poly>, Poly) {
    let n = r.degree();
    let s = origin_order(r.q()).min(n);
    let lowest = r.q().coeff(s);
    let numerators = (s..n).chain(0..s).map(Poly::monomial).collect();
    (numerators, r.q().scale(1.0 / lowest))
}

/// Coefficients `0..n` of `(m(u) q0 − m(0) D(u)) / (u q0)`.
fn shifted_quotient(m: &Poly, dq: &Poly, q0: C64, n: usize) -> Vec<C64> {
    let m0 = m.coeff(0);
    (0..n).map(|j| (m.coeff(j + 1) * q0 - m0 * dq.coeff(j + 1)) / q0).collect()
}

impl StateBasis {
    /// Canonical basis realized at [`canonical_center`].
    pub fn canonical(r: &RationalFn) -> Result<Self> {
        let a = canonical_center(r)?;
        Self::canonical_at(r, a)
    }

    /// Canonical basis realized at `center`.
    pub fn canonical_at(r: &RationalFn, center: C64) -> Result<Self> {
        let (num, den) = canonical_numerators(r);
        Self::from_numerators(r, num, den, center)
    }

    /// Blaschke product with `e_k(z) = 1/(1 − z ā_k)`, realized at 0.
    pub fn blaschke(zeros: &[C64]) -> Result<Self> {
        let r = RationalFn::blaschke(zeros)?;
        let one = C64::new(1.0, 0.0);
        let numerators = (0..zeros.len())
            .map(|k| {
                zeros
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .fold(Poly::one(), |acc, (_, &a)| &acc * &Poly::new(vec![one, -a.conj()]))
            })
            .collect();
        let den = r.q().clone();
        Self::from_numerators(&r, numerators, den, C64::new(0.0, 0.0))
    }

    /// Basis `numerators[k] / denominator`; `denominator` must be a multiple of `q`.
    pub fn from_numerators(r: &RationalFn, numerators: Vec<Poly>, denominator: Poly, center: C64) -> Result<Self> {
        let n = r.degree();
        if numerators.len() != n {
            return Err(Error::DimensionMismatch(format!("{} numerators for N = {n}", numerators.len())));
        }
        if let Some(m) = numerators.iter().find(|m| m.degree() >= n && !m.is_zero()) {
            return Err(Error::InvalidArgument(format!("numerator of degree {} exceeds N - 1", m.degree())));
        }
        let lambda = proportionality(r.q(), &denominator)?;
        let p_hat = r.p().scale(1.0 / lambda);

        let pu = p_hat.shift(center);
        let du = denominator.shift(center);
        let mu: Vec<Poly> = numerators.iter().map(|m| m.shift(center)).collect();
        let q0 = du.coeff(0);
        if q0.norm() <= 1e-12 * du.abs_eval(C64::new(1.0, 0.0)) {
            return Err(Error::PoleAtOrigin { center });
        }

        let basis = DMatrix::from_fn(n, n, |j, k| mu[k].coeff(j));
        let basis_inv = linalg::inverse(&basis, 1e-12)
            .map_err(|_| Error::InvalidArgument("basis numerators are linearly dependent".into()))?;

        let mut shifted = DMatrix::zeros(n, n);
        for (k, m) in mu.iter().enumerate() {
            for (j, v) in shifted_quotient(m, &du, q0, n).into_iter().enumerate() {
                shifted[(j, k)] = v;
            }
        }
        let t = &basis_inv * shifted;
        let b = &basis_inv * DMatrix::from_vec(n, 1, shifted_quotient(&pu, &du, q0, n));
        let g = DMatrix::from_fn(1, n, |_, k| mu[k].coeff(0) / q0);
        let d = pu.coeff(0) / q0;

        let realization = Realization { d, g, t, b, center };
        Ok(StateBasis { r: r.clone(), numerators, denominator, realization })
    }

    pub fn rational(&self) -> &RationalFn {
        &self.r
    }

    pub fn realization(&self) -> &Realization {
        &self.realization
    }

    pub fn numerators(&self) -> &[Poly] {
        &self.numerators
    }

    pub fn denominator(&self) -> &Poly {
        &self.denominator
    }

    /// `N`.
    pub fn dim(&self) -> usize {
        self.numerators.len()
    }

    pub fn center(&self) -> C64 {
        self.realization.center
    }

    /// `Z_r(z)` as a `1 × N` row.
    pub fn eval_z(&self, z: C64) -> Result<DMatrix<C64>> {
        self.realization.eval_z(z)
    }

    /// `Z_r(z) ⊗ I_p` as a `p × Np` matrix.
    pub fn eval_z_kron(&self, z: C64, p: usize) -> Result<DMatrix<C64>> {
        Ok(linalg::kron(&self.eval_z(z)?, &linalg::identity(p)))
    }

    /// `Z_r'(z)`.
    pub fn eval_z_derivative(&self, z: C64) -> Result<DMatrix<C64>> {
        self.realization.eval_z_derivative(z)
    }

    /// `(m_k(z)/D(z))_k` evaluated directly, without the realization.
    pub fn eval_direct(&self, z: C64) -> Result<Vec<C64>> {
        let dz = self.denominator.eval(z);
        if dz.norm() <= 1e-14 * self.denominator.abs_eval(z) {
            return Err(Error::PoleOfR { z });
        }
        Ok(self.numerators.iter().map(|m| m.eval(z) / dz).collect())
    }

    /// `G(I − zT)^{-1}(I − wT)^{-1} b` (shifted by the center).
    pub fn divided_difference(&self, z: C64, w: C64) -> Result<C64> {
        self.realization.divided_difference(z, w)
    }

    /// `Σ_n Z_r(w_n) f / (r'(w_n)(z − w_n))` over the fiber of `α`.
    pub fn sum_formula(&self, f_coeffs: &[C64], alpha: C64, z: C64) -> Result<C64> {
        if f_coeffs.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!("{} coefficients for N = {}", f_coeffs.len(), self.dim())));
        }
        let fib = self.r.fiber(alpha)?;
        let mut acc = C64::new(0.0, 0.0);
        for (&w, &dr) in fib.points.iter().zip(&fib.r_prime) {
            let zw = self.eval_z(w)?;
            let fw: C64 = (0..self.dim()).map(|k| zw[(0, k)] * f_coeffs[k]).sum();
            acc += fw / (dr * (z - w));
        }
        Ok(acc)
    }

    /// Same functions, new basis `Z_r S`.
    pub fn change_basis(&self, s: &DMatrix<C64>) -> Result<StateBasis> {
        let n = self.dim();
        if s.nrows() != n || s.ncols() != n {
            return Err(Error::DimensionMismatch(format!("basis change must be {n}x{n}")));
        }
        let realization = self.realization.change_basis(s)?;
        let numerators = (0..n)
            .map(|k| {
                (0..n).fold(Poly::zero(), |acc, j| &acc + &self.numerators[j].scale(s[(j, k)]))
            })
            .collect();
        Ok(StateBasis { r: self.r.clone(), numerators, denominator: self.denominator.clone(), realization })
    }
}

/// Canonical realization centered at the origin.
pub fn realize(r: &RationalFn) -> Result<Realization> {
    realize_at(r, C64::new(0.0, 0.0))
}

/// Canonical realization centered at `a`.
pub fn realize_at(r: &RationalFn, a: C64) -> Result<Realization> {
    if r.q().eval(a).norm() <= 1e-12 * r.q().abs_eval(a).max(1.0) {
        return Err(Error::PoleAtOrigin { center: a });
    }
    Ok(StateBasis::canonical_at(r, a)?.realization)
}

/// `λ` with `q = λ D`, or an error if the two are not proportional.
fn proportionality(q: &Poly, den: &Poly) -> Result<C64> {
    if den.is_zero() || den.degree() != q.degree() {
        return Err(Error::InvalidArgument("denominator must be a scalar multiple of q".into()));
    }
    let lambda = q.lead() / den.lead();
    let scale = q.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mismatch = (0..=q.degree()).map(|k| (q.coeff(k) - lambda * den.coeff(k)).norm()).fold(0.0, f64::max);
    if mismatch > 1e-10 * scale {
        return Err(Error::InvalidArgument("denominator must be a scalar multiple of q".into()));
    }
    Ok(lambda)
}
