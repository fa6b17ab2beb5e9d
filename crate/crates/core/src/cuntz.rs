//! The operators `T_n f = F_n` and `T_n* g = e_n · g∘r`, where
//! `f = Σ_n e_n F_n∘r`, and the Cuntz relations between them.
//!
//! For polynomial `r` with `e_n = z^{n−1}` the operators are exact matrices
//! on polynomials of degree at most `D`. Other `r` go through
//! [`crate::representation::decompose`].

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::kernels::Kernel;
use crate::polyrat::{Poly, RationalFn};
use crate::representation::{build_cover, decompose, CoverPolicy, DecomposeOptions, DiskCover};
use crate::resolvent::{AnalyticFn, Composite, SharedFn, VectorPoly};
use crate::statespace::StateBasis;
use crate::{Error, Result, C64};

pub const DEFAULT_DEGREE: usize = 32;

/// Polynomials of degree `≤ D` with norm `Σ |f_k|² / c_k`, the space of the
/// diagonal kernel `Σ c_k (z w̄)^k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncatedSpace {
    pub weights: Vec<f64>,
}

impl TruncatedSpace {
    /// Coefficient `ℓ²`, the Hardy space.
    pub fn hardy(degree: usize) -> Self {
        TruncatedSpace { weights: vec![1.0; degree + 1] }
    }

    pub fn from_kernel_coefficients(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|&c| !(c > 0.0 && c.is_finite())) {
            return Err(Error::InvalidArgument("kernel coefficients must be positive".into()));
        }
        Ok(TruncatedSpace { weights })
    }

    pub fn degree(&self) -> usize {
        self.weights.len() - 1
    }

    /// Gram matrix of the monomials.
    pub fn gram(&self) -> DMatrix<C64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.weights.len(),
            self.weights.iter().map(|&c| C64::new(1.0 / c, 0.0)),
        ))
    }

    pub fn norm_sq(&self, coeffs: &[C64]) -> Result<f64> {
        if coeffs.len() > self.weights.len() {
            return Err(Error::DegreeOverflow { degree: coeffs.len() - 1, cap: self.degree() });
        }
        Ok(coeffs.iter().zip(&self.weights).map(|(f, c)| f.norm_sqr() / c).sum())
    }
}

/// Residuals of `Σ T_n* T_n = I` and `T_n T_m* = δ_{nm} I`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CuntzReport {
    pub degree: usize,
    pub caps: Vec<usize>,
    pub completeness: f64,
    pub orthogonality: f64,
}

/// `T_n` and `T_n*` for polynomial `r`, as matrices on coefficient vectors.
#[derive(Clone, Debug)]
pub struct CuntzFamily {
    r: RationalFn,
    r_poly: Poly,
    degree: usize,
    analysis: Vec<DMatrix<C64>>,
    synthesis: Vec<DMatrix<C64>>,
}

fn pad(p: &Poly, len: usize) -> Vec<C64> {
    (0..len).map(|k| p.coeff(k)).collect()
}

impl CuntzFamily {
    /// Family for polynomial `r` of degree `N` on polynomials of degree `≤ degree`.
    pub fn polynomial(r: &RationalFn, degree: usize) -> Result<Self> {
        if r.q().degree() > 0 {
            return Err(Error::InvalidArgument("the matrix path needs a polynomial r".into()));
        }
        let r_poly = r.p().scale(1.0 / r.q().coeff(0));
        let n = r_poly.degree();
        let caps: Vec<usize> = (1..=n).map(|k| (degree + 1).saturating_sub(k) / n).collect();

        let mut analysis: Vec<DMatrix<C64>> = caps.iter().map(|&c| DMatrix::zeros(c + 1, degree + 1)).collect();
        for j in 0..=degree {
            let mut rest = Poly::monomial(j);
            let mut k = 0;
            while !rest.is_zero() {
                let (quo, rem) = rest.div_rem(&r_poly)?;
                for (i, a) in analysis.iter_mut().enumerate() {
                    if k < a.nrows() {
                        a[(k, j)] = rem.coeff(i);
                    }
                }
                rest = quo;
                k += 1;
            }
        }

        let mut synthesis = Vec::with_capacity(n);
        for (i, &cap) in caps.iter().enumerate() {
            let mut s = DMatrix::zeros(degree + 1, cap + 1);
            let mut col = Poly::monomial(i);
            for k in 0..=cap {
                for (row, v) in pad(&col, degree + 1).into_iter().enumerate() {
                    s[(row, k)] = v;
                }
                col = &col * &r_poly;
            }
            synthesis.push(s);
        }
        Ok(CuntzFamily { r: r.clone(), r_poly, degree, analysis, synthesis })
    }

    pub fn rational(&self) -> &RationalFn {
        &self.r
    }

    /// `N`.
    pub fn len(&self) -> usize {
        self.analysis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.analysis.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Largest degree of `F_n`, `⌊(D − n + 1)/N⌋`.
    pub fn caps(&self) -> Vec<usize> {
        self.analysis.iter().map(|a| a.nrows() - 1).collect()
    }

    /// Matrix of `T_n`, `n` starting at 1.
    pub fn analysis_matrix(&self, n: usize) -> &DMatrix<C64> {
        &self.analysis[n - 1]
    }

    /// Matrix of `T_n*`, `n` starting at 1.
    pub fn synthesis_matrix(&self, n: usize) -> &DMatrix<C64> {
        &self.synthesis[n - 1]
    }

    fn check_index(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.len() {
            return Err(Error::InvalidArgument(format!("component {n} outside 1..={}", self.len())));
        }
        Ok(())
    }

    /// `(F_1, …, F_N)` with `f = Σ z^{n−1} F_n(r(z))`.
    pub fn analysis(&self, f: &[C64]) -> Result<Vec<Vec<C64>>> {
        let f = trim(f);
        if f.len() > self.degree + 1 {
            return Err(Error::DegreeOverflow { degree: f.len() - 1, cap: self.degree });
        }
        let v = DMatrix::from_fn(self.degree + 1, 1, |k, _| f.get(k).copied().unwrap_or_default());
        Ok(self.analysis.iter().map(|a| (a * &v).iter().copied().collect()).collect())
    }

    /// Coefficients of `z^{n−1} g(r(z))`.
    pub fn synthesis(&self, n: usize, g: &[C64]) -> Result<Vec<C64>> {
        self.check_index(n)?;
        let g = trim(g);
        let s = &self.synthesis[n - 1];
        if g.len() > s.ncols() {
            let degree = n - 1 + (g.len() - 1) * self.r_poly.degree();
            return Err(Error::DegreeOverflow { degree, cap: self.degree });
        }
        let v = DMatrix::from_fn(s.ncols(), 1, |k, _| g.get(k).copied().unwrap_or_default());
        Ok((s * v).iter().copied().collect())
    }

    pub fn verify(&self) -> CuntzReport {
        let dim = self.degree + 1;
        let mut sum = DMatrix::zeros(dim, dim);
        for (a, s) in self.analysis.iter().zip(&self.synthesis) {
            sum += s * a;
        }
        let completeness = max_abs(&(sum - DMatrix::identity(dim, dim)));
        let mut orthogonality: f64 = 0.0;
        for (n, a) in self.analysis.iter().enumerate() {
            for (m, s) in self.synthesis.iter().enumerate() {
                let mut prod = a * s;
                if n == m {
                    prod -= DMatrix::identity(prod.nrows(), prod.ncols());
                }
                orthogonality = orthogonality.max(max_abs(&prod));
            }
        }
        CuntzReport { degree: self.degree, caps: self.caps(), completeness, orthogonality }
    }

    /// Space of `F_n` induced by `space` when `r = c z^N`: kernel coefficients `c_{n−1+Nj}`.
    pub fn induced_space(&self, space: &TruncatedSpace, n: usize) -> Result<TruncatedSpace> {
        self.check_index(n)?;
        let big_n = self.len();
        let lead = self.r_poly.lead();
        let monomial = self.r_poly.coeffs()[..big_n].iter().all(|c| c.norm() == 0.0);
        if !monomial || (lead - 1.0).norm() > 0.0 {
            return Err(Error::InvalidArgument("induced diagonal spaces need r = z^N".into()));
        }
        let weights = (0..=self.caps()[n - 1])
            .map(|j| space.weights.get(n - 1 + big_n * j).copied())
            .collect::<Option<Vec<f64>>>()
            .ok_or(Error::DegreeOverflow { degree: self.degree, cap: space.degree() })?;
        TruncatedSpace::from_kernel_coefficients(weights)
    }

    /// `(‖f‖², Σ_n ‖F_n‖²)` in `space` and the induced spaces.
    pub fn norm_bookkeeping(&self, space: &TruncatedSpace, f: &[C64]) -> Result<(f64, f64)> {
        let parts = self.analysis(f)?;
        let mut total = 0.0;
        for (n, part) in parts.iter().enumerate() {
            total += self.induced_space(space, n + 1)?.norm_sq(part)?;
        }
        Ok((space.norm_sq(trim(f))?, total))
    }
}

fn trim(f: &[C64]) -> &[C64] {
    let len = f.iter().rposition(|c| c.norm() != 0.0).map_or(0, |k| k + 1);
    &f[..len]
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// `T_n` through the contour representation, for any `r`.
pub struct QuadratureCuntz {
    basis: StateBasis,
    cover: DiskCover,
    opts: DecomposeOptions,
}

impl QuadratureCuntz {
    pub fn new(r: &RationalFn, opts: DecomposeOptions) -> Result<Self> {
        Ok(QuadratureCuntz {
            basis: StateBasis::canonical(r)?,
            cover: build_cover(r, &CoverPolicy::default())?,
            opts,
        })
    }

    pub fn basis(&self) -> &StateBasis {
        &self.basis
    }

    pub fn cover(&self) -> &DiskCover {
        &self.cover
    }

    /// Taylor coefficients of `F_1, …, F_N` for scalar `f`.
    pub fn analysis(&self, f: SharedFn) -> Result<Vec<Vec<C64>>> {
        if f.dim() != 1 {
            return Err(Error::DimensionMismatch("scalar f expected".into()));
        }
        Ok(decompose(&self.basis, f, &self.cover, &self.opts)?.taylor_coefficients().to_vec())
    }

    /// `z ↦ e_n(z) g(r(z))`.
    pub fn synthesis(&self, n: usize, g: &Poly) -> Result<Arc<Composite>> {
        let big_n = self.basis.dim();
        if n == 0 || n > big_n {
            return Err(Error::InvalidArgument(format!("component {n} outside 1..={big_n}")));
        }
        let comps = (0..big_n).map(|k| if k + 1 == n { g.clone() } else { Poly::zero() }).collect();
        Ok(Arc::new(Composite::new(self.basis.clone(), Arc::new(VectorPoly(comps)))?))
    }

    /// Completeness on `z^j`, `j ≤ degree`, measured pointwise; orthogonality on
    /// `w^k`, `k ≤ degree / N`, measured on the first `degree / N + 1` Taylor coefficients.
    pub fn verify(&self, degree: usize) -> Result<CuntzReport> {
        let big_n = self.basis.dim();
        let r = self.basis.rational();
        let pts = crate::representation::validation_points(r, &self.cover);
        let mut completeness: f64 = 0.0;
        for j in 0..=degree {
            let f = Poly::monomial(j);
            let parts = self.analysis(Arc::new(f.clone()))?;
            let mut rebuilt: Vec<Arc<Composite>> = Vec::new();
            for (n, part) in parts.iter().enumerate() {
                rebuilt.push(self.synthesis(n + 1, &Poly::new(part.clone()))?);
            }
            let scale = pts.iter().map(|&z| f.eval(z).norm()).fold(0.0, f64::max);
            for &z in &pts {
                let mut acc = C64::new(0.0, 0.0);
                for g in &rebuilt {
                    acc += g.eval(z)?[0];
                }
                completeness = completeness.max((acc - f.eval(z)).norm() / (1.0 + scale));
            }
        }
        let cap = degree / big_n;
        let mut orthogonality: f64 = 0.0;
        for k in 0..=cap {
            for m in 1..=big_n {
                let parts = self.analysis(self.synthesis(m, &Poly::monomial(k))?)?;
                for (n, part) in parts.iter().enumerate() {
                    for (j, v) in part.iter().take(cap + 1).enumerate() {
                        let want = if n + 1 == m && j == k { 1.0 } else { 0.0 };
                        orthogonality = orthogonality.max((v - want).norm());
                    }
                }
            }
        }
        Ok(CuntzReport { degree, caps: vec![cap; big_n], completeness, orthogonality })
    }
}

/// `max |k(z, w) − (Σ_n e_n(z) conj e_n(w)) k(r(z), r(w))|` over grid pairs.
pub fn kernel_fixed_point_check(k: &dyn Kernel, basis: &StateBasis, grid: &[C64]) -> Result<f64> {
    if k.dim() != 1 {
        return Err(Error::DimensionMismatch("scalar kernel expected".into()));
    }
    let r = basis.rational();
    let mut worst: f64 = 0.0;
    for &z in grid {
        let zz = basis.eval_z(z)?;
        for &w in grid {
            let zw = basis.eval_z(w)?;
            let weight = (&zz * zw.adjoint())[(0, 0)];
            let lhs = k.eval(z, w)?[(0, 0)];
            let rhs = weight * k.eval(r.try_eval(z)?, r.try_eval(w)?)?[(0, 0)];
            worst = worst.max((lhs - rhs).norm());
        }
    }
    Ok(worst)
}
