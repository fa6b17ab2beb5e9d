//! Matrix-valued kernels: constructors, Gram matrices and the identities
//! relating them.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::linalg;
use crate::resolvent::{apply_resolvent, AnalyticFn};
use crate::statespace::StateBasis;
use crate::{Error, Result, C64};

/// A `d × d` matrix-valued kernel `K(z, w)`.
pub trait Kernel: Send + Sync {
    fn dim(&self) -> usize;

    fn eval(&self, z: C64, w: C64) -> Result<DMatrix<C64>>;
}

pub type SharedKernel = Arc<dyn Kernel>;

type KernelFnBox = Box<dyn Fn(C64, C64) -> Result<DMatrix<C64>> + Send + Sync>;

/// Kernel from a closure.
pub struct FnKernel {
    dim: usize,
    f: KernelFnBox,
}

impl FnKernel {
    pub fn new(dim: usize, f: impl Fn(C64, C64) -> Result<DMatrix<C64>> + Send + Sync + 'static) -> Self {
        FnKernel { dim, f: Box::new(f) }
    }

    /// `k(z, w) I_dim` for a scalar `k`.
    pub fn scalar(dim: usize, k: impl Fn(C64, C64) -> Result<C64> + Send + Sync + 'static) -> Self {
        Self::new(dim, move |z, w| Ok(linalg::identity(dim) * k(z, w)?))
    }
}

impl Kernel for FnKernel {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, z: C64, w: C64) -> Result<DMatrix<C64>> {
        let m = (self.f)(z, w)?;
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return Err(Error::DimensionMismatch(format!("kernel returned {}x{}, expected {}", m.nrows(), m.ncols(), self.dim)));
        }
        Ok(m)
    }
}

/// `I_dim / (1 − z w̄)`.
pub fn szego(dim: usize) -> FnKernel {
    FnKernel::scalar(dim, |z, w| {
        let den = 1.0 - z * w.conj();
        if den.norm() < 1e-12 {
            return Err(Error::DiagonalSingularity { denominator: den.norm() });
        }
        Ok(1.0 / den)
    })
}

/// `I_dim exp(z w̄)`.
pub fn exponential(dim: usize) -> FnKernel {
    FnKernel::scalar(dim, |z, w| Ok((z * w.conj()).exp()))
}

/// Block Gram matrix `[K(z_i, z_j)]`.
pub fn gram_matrix(k: &dyn Kernel, pts: &[C64]) -> Result<DMatrix<C64>> {
    let d = k.dim();
    let n = pts.len();
    let mut g = DMatrix::zeros(n * d, n * d);
    for (i, &z) in pts.iter().enumerate() {
        for (j, &w) in pts.iter().enumerate() {
            g.view_mut((i * d, j * d), (d, d)).copy_from(&k.eval(z, w)?);
        }
    }
    Ok(g)
}

/// Smallest eigenvalue of the Hermitian part and the Hermitian defect `‖G − G*‖∞`.
pub fn gram_spectrum(g: &DMatrix<C64>) -> (f64, f64) {
    let defect = linalg::norm_inf(&(g - g.adjoint()));
    let (vals, _) = linalg::hermitian_eigen(g);
    (vals.first().copied().unwrap_or(0.0), defect)
}

/// Count of eigenvalues below `−tol · ‖G‖∞`: a lower bound for the number of
/// negative squares of the kernel behind `g`.
pub fn negative_squares(g: &DMatrix<C64>, tol: f64) -> usize {
    let scale = linalg::norm_inf(g);
    linalg::hermitian_eigen(g).0.iter().filter(|&&v| v < -tol * scale).count()
}

/// `max ‖K(z, w) − K(w, z)*‖∞` over grid pairs.
pub fn hermitian_swap_defect(k: &dyn Kernel, grid: &[C64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &z in grid {
        for &w in grid {
            worst = worst.max(linalg::norm_inf(&(k.eval(z, w)? - k.eval(w, z)?.adjoint())));
        }
    }
    Ok(worst)
}

/// Matrix-valued function of one variable.
pub type MatrixFn = Arc<dyn Fn(C64) -> Result<DMatrix<C64>> + Send + Sync>;

pub fn matrix_fn(f: impl Fn(C64) -> Result<DMatrix<C64>> + Send + Sync + 'static) -> MatrixFn {
    Arc::new(f)
}

/// `I_N ⊗ m` when `m` is `p × p` and `np = N p`; `m` unchanged when already `np × np`.
pub fn lift(m: DMatrix<C64>, np: usize) -> Result<DMatrix<C64>> {
    if m.nrows() == np {
        return Ok(m);
    }
    if m.nrows() == 0 || m.nrows() != m.ncols() || np % m.nrows() != 0 {
        return Err(Error::DimensionMismatch(format!("{}x{} block does not lift to {np}", m.nrows(), m.ncols())));
    }
    Ok(linalg::kron(&linalg::identity(np / m.nrows()), &m))
}

/// Which half of the classical setting a denominator comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    /// `−i(λ − μ̄)`
    Line,
    /// `1 − λ μ̄`
    Circle,
}

impl Domain {
    pub fn denominator(self, lambda: C64, mu: C64) -> Result<C64> {
        let d = match self {
            Domain::Line => C64::new(0.0, -1.0) * (lambda - mu.conj()),
            Domain::Circle => 1.0 - lambda * mu.conj(),
        };
        if d.norm() < 1e-12 {
            return Err(Error::DiagonalSingularity { denominator: d.norm() });
        }
        Ok(d)
    }
}

/// `(C, A, B, P)` of a finite-dimensional `R_α`-invariant space with kernel
/// `𝖬(z) P^{-1} 𝖬(w)*`, `𝖬(z) = (Z_r(z) ⊗ I_m) C (A − r(z)B)^{-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantSubspaceData {
    pub c: DMatrix<C64>,
    pub a: DMatrix<C64>,
    pub b: DMatrix<C64>,
    pub p: DMatrix<C64>,
}

impl InvariantSubspaceData {
    pub fn new(c: DMatrix<C64>, a: DMatrix<C64>, b: DMatrix<C64>, p: DMatrix<C64>) -> Result<Self> {
        let m = a.nrows();
        for (name, x) in [("A", &a), ("B", &b), ("P", &p)] {
            if x.nrows() != m || x.ncols() != m {
                return Err(Error::DimensionMismatch(format!("{name} must be {m}x{m}")));
            }
        }
        if c.ncols() != m {
            return Err(Error::DimensionMismatch(format!("C must have {m} columns")));
        }
        if linalg::norm_inf(&(&p - p.adjoint())) > 1e-12 * (1.0 + linalg::norm_inf(&p)) {
            return Err(Error::InvalidArgument("P is not Hermitian".into()));
        }
        linalg::inverse(&p, 1e-12)?;
        let regular = [0.3, -1.7, 2.9].iter().any(|&t| {
            let z = C64::new(t, 0.37 * t);
            linalg::sigma_min(&(&a - &b * z)) > 1e-10 * (1.0 + linalg::norm_inf(&a) + linalg::norm_inf(&b))
        });
        if !regular {
            return Err(Error::SingularPencil { w: C64::new(0.3, 0.111) });
        }
        Ok(InvariantSubspaceData { c, a, b, p })
    }

    /// State dimension `M`.
    pub fn size(&self) -> usize {
        self.a.nrows()
    }

    /// `C (A − λB)^{-1}`.
    pub fn transfer(&self, lambda: C64) -> Result<DMatrix<C64>> {
        let pencil = &self.a - &self.b * lambda;
        let inv = linalg::inverse(&pencil, 1e-13).map_err(|_| Error::SingularPencil { w: lambda })?;
        Ok(&self.c * inv)
    }

    /// Same kernel with `A − αB = I`: `C S, A S, B S` for `S = (A − αB)^{-1}`.
    pub fn normalized(&self, alpha: C64) -> Result<Self> {
        let s = linalg::inverse(&(&self.a - &self.b * alpha), 1e-13).map_err(|_| Error::SingularPencil { w: alpha })?;
        Ok(InvariantSubspaceData { c: &self.c * &s, a: &self.a * &s, b: &self.b * &s, p: self.p.clone() })
    }

    /// `‖A*PA − B*PB − C*JC‖∞`.
    pub fn stein_residual(&self, j: &DMatrix<C64>) -> f64 {
        stein_residual(&self.a, &self.b, &self.c, j, &self.p)
    }
}

/// `𝖬(z)` for an invariant subspace: `(Z_r(z) ⊗ I_m) C (A − r(z)B)^{-1}`.
pub fn pencil_matrix(data: &InvariantSubspaceData, basis: &StateBasis, z: C64) -> Result<DMatrix<C64>> {
    let m = block_size(data.c.nrows(), basis.dim())?;
    let lambda = basis.rational().try_eval(z)?;
    Ok(basis.eval_z_kron(z, m)? * data.transfer(lambda)?)
}

fn block_size(rows: usize, n: usize) -> Result<usize> {
    if rows == 0 || rows % n != 0 {
        return Err(Error::DimensionMismatch(format!("{rows} rows is not a multiple of N = {n}")));
    }
    Ok(rows / n)
}

/// `𝖬(z)` flattened column-major, as an analytic function.
struct PencilFn {
    data: InvariantSubspaceData,
    basis: StateBasis,
    m: usize,
}

impl AnalyticFn for PencilFn {
    fn dim(&self) -> usize {
        self.m * self.data.size()
    }

    fn eval(&self, z: C64) -> Result<Vec<C64>> {
        Ok(pencil_matrix(&self.data, &self.basis, z)?.iter().copied().collect())
    }
}

/// `max |R_α 𝖬(z) − 𝖬(z) B (A − αB)^{-1}|` over the samples, relative to `1 + |𝖬|`.
pub fn invariant_covariance_residual(data: &InvariantSubspaceData, basis: &StateBasis, alpha: C64, samples: &[C64]) -> Result<f64> {
    let m = block_size(data.c.nrows(), basis.dim())?;
    let f = Arc::new(PencilFn { data: data.clone(), basis: basis.clone(), m });
    let g = apply_resolvent(basis.rational(), f, alpha)?;
    let tail = &data.b * linalg::inverse(&(&data.a - &data.b * alpha), 1e-13).map_err(|_| Error::SingularPencil { w: alpha })?;
    let mut worst: f64 = 0.0;
    for &z in samples {
        let mz = pencil_matrix(data, basis, z)?;
        let want = &mz * &tail;
        let got = g.eval(z)?;
        let diff = want.iter().zip(&got).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        worst = worst.max(diff / (1.0 + linalg::max_abs(&mz)));
    }
    Ok(worst)
}

/// Solves `A*PA − B*PB = C*JC` through the `M² × M²` vectorized system.
pub fn solve_stein(a: &DMatrix<C64>, b: &DMatrix<C64>, c: &DMatrix<C64>, j: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let m = a.nrows();
    if a.ncols() != m || b.shape() != (m, m) || c.ncols() != m || j.shape() != (c.nrows(), c.nrows()) {
        return Err(Error::DimensionMismatch("Stein data shapes".into()));
    }
    let op = linalg::kron(&a.transpose(), &a.adjoint()) - linalg::kron(&b.transpose(), &b.adjoint());
    let sv = linalg::singular_values(&op);
    let (top, bottom) = (sv[0], sv[sv.len() - 1]);
    if bottom < 1e-12 * top.max(1.0) {
        return Err(Error::SingularSteinOperator { sigma_min: bottom });
    }
    let rhs = c.adjoint() * j * c;
    let x = op
        .lu()
        .solve(&DMatrix::from_column_slice(m * m, 1, rhs.as_slice()))
        .ok_or(Error::SingularSteinOperator { sigma_min: bottom })?;
    let p = DMatrix::from_column_slice(m, m, x.as_slice());
    Ok((&p + p.adjoint()).scale(0.5))
}

pub fn stein_residual(a: &DMatrix<C64>, b: &DMatrix<C64>, c: &DMatrix<C64>, j: &DMatrix<C64>, p: &DMatrix<C64>) -> f64 {
    linalg::norm_inf(&(a.adjoint() * p * a - b.adjoint() * p * b - c.adjoint() * j * c))
}

/// `max ‖K_inv(z, w) − (Z_r(z) ⊗ I)(J − Θ(r(z)) J Θ(r(w))*)/(1 − r(z) conj r(w))(Z_r(w) ⊗ I)*‖`
/// over grid pairs, for a caller-supplied `Θ`.
pub fn theta_kernel_check(data: &InvariantSubspaceData, j: &DMatrix<C64>, theta: &MatrixFn, basis: &StateBasis, grid: &[C64]) -> Result<f64> {
    let m = block_size(data.c.nrows(), basis.dim())?;
    let inv = FamilyKernel::new(basis, m, KernelSpec::Invariant(data.clone()))?;
    let r = basis.rational();
    let np = data.c.nrows();
    let mut worst: f64 = 0.0;
    for &z in grid {
        for &w in grid {
            let (lz, lw) = (r.try_eval(z)?, r.try_eval(w)?);
            let den = Domain::Circle.denominator(lz, lw)?;
            let tz = lift(theta(lz)?, np)?;
            let tw = lift(theta(lw)?, np)?;
            let middle = (j - &tz * j * tw.adjoint()) / den;
            let form = basis.eval_z_kron(z, m)? * middle * basis.eval_z_kron(w, m)?.adjoint();
            worst = worst.max(linalg::norm_inf(&(inv.eval(z, w)? - form)));
        }
    }
    Ok(worst)
}

/// The kernel families, each of the form `(Z_r(z) ⊗ I_p) middle(r(z), r(w)) (Z_r(w) ⊗ I_p)*`.
/// Middle blocks are `Np × Np`; `p × p` evaluators are lifted to `I_N ⊗ ·`.
#[derive(Clone)]
pub enum KernelSpec {
    /// `C(A − λB)^{-1} P^{-1} (A − μB)^{-*} C*`
    Invariant(InvariantSubspaceData),
    /// `(X^{-1} − Θ(λ) X Θ(μ)*) / (−i(λ − μ̄))`
    ThetaLine { x: DMatrix<C64>, theta: MatrixFn },
    /// `(X^{-1} − Θ(λ) X Θ(μ)*) / (1 − λ μ̄)`
    ThetaCircle { x: DMatrix<C64>, theta: MatrixFn },
    /// `(X^{-1} − S(λ) S(μ)*) / (1 − λ μ̄)`
    S { x: DMatrix<C64>, s: MatrixFn },
    /// `(E₊(λ) J₊ E₊(μ)* − E₋(λ) J₋ E₋(μ)*) / den`
    EPlusMinus { e_plus: MatrixFn, e_minus: MatrixFn, j_plus: DMatrix<C64>, j_minus: DMatrix<C64>, domain: Domain },
    /// `(N(λ) − N(μ)*) / (λ − μ̄)`
    Nevanlinna { n: MatrixFn },
    /// `I / (−i(λ − μ̄))`
    HardyLine,
    /// `X^{-1} / (1 − λ μ̄)`
    HardyCircle { x: DMatrix<C64> },
}

impl KernelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            KernelSpec::Invariant(_) => "invariant",
            KernelSpec::ThetaLine { .. } => "theta-line",
            KernelSpec::ThetaCircle { .. } => "theta-circle",
            KernelSpec::S { .. } => "s",
            KernelSpec::EPlusMinus { .. } => "epm",
            KernelSpec::Nevanlinna { .. } => "nev",
            KernelSpec::HardyLine => "hardy-line",
            KernelSpec::HardyCircle { .. } => "hardy",
        }
    }
}

/// A [`KernelSpec`] sandwiched by `Z_r ⊗ I_p`.
#[derive(Clone)]
pub struct FamilyKernel {
    basis: StateBasis,
    p: usize,
    spec: KernelSpec,
    x_inv: Option<DMatrix<C64>>,
    p_inv: Option<DMatrix<C64>>,
}

impl FamilyKernel {
    pub fn new(basis: &StateBasis, p: usize, spec: KernelSpec) -> Result<Self> {
        let np = basis.dim() * p;
        let mut x_inv = None;
        let mut p_inv = None;
        match &spec {
            KernelSpec::ThetaLine { x, .. } | KernelSpec::ThetaCircle { x, .. } | KernelSpec::S { x, .. } | KernelSpec::HardyCircle { x } => {
                let x = lift(x.clone(), np)?;
                x_inv = Some(linalg::inverse(&x, 1e-12)?);
            }
            KernelSpec::Invariant(data) => {
                if data.c.nrows() != np {
                    return Err(Error::DimensionMismatch(format!("C has {} rows, expected Np = {np}", data.c.nrows())));
                }
                p_inv = Some(linalg::inverse(&data.p, 1e-12)?);
            }
            _ => {}
        }
        Ok(FamilyKernel { basis: basis.clone(), p, spec, x_inv, p_inv })
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    /// The `Np × Np` middle factor at `(λ, μ) = (r(z), r(w))`.
    pub fn middle(&self, lambda: C64, mu: C64) -> Result<DMatrix<C64>> {
        let np = self.basis.dim() * self.p;
        let x_of = |x: &DMatrix<C64>| lift(x.clone(), np);
        match &self.spec {
            KernelSpec::Invariant(data) => {
                let (fl, fm) = (data.transfer(lambda)?, data.transfer(mu)?);
                Ok(fl * self.p_inv.as_ref().expect("set in new") * fm.adjoint())
            }
            KernelSpec::ThetaLine { x, theta } | KernelSpec::ThetaCircle { x, theta } => {
                let domain = if matches!(self.spec, KernelSpec::ThetaLine { .. }) { Domain::Line } else { Domain::Circle };
                let den = domain.denominator(lambda, mu)?;
                let (tl, tm) = (lift(theta(lambda)?, np)?, lift(theta(mu)?, np)?);
                Ok((self.x_inv.as_ref().expect("set in new") - tl * x_of(x)? * tm.adjoint()) / den)
            }
            KernelSpec::S { s, .. } => {
                let den = Domain::Circle.denominator(lambda, mu)?;
                let (sl, sm) = (lift_rows(s(lambda)?, np)?, lift_rows(s(mu)?, np)?);
                Ok((self.x_inv.as_ref().expect("set in new") - sl * sm.adjoint()) / den)
            }
            KernelSpec::EPlusMinus { e_plus, e_minus, j_plus, j_minus, domain } => {
                let den = domain.denominator(lambda, mu)?;
                let (pl, pm) = (lift(e_plus(lambda)?, np)?, lift(e_plus(mu)?, np)?);
                let (ml, mm) = (lift(e_minus(lambda)?, np)?, lift(e_minus(mu)?, np)?);
                let (jp, jm) = (lift(j_plus.clone(), np)?, lift(j_minus.clone(), np)?);
                Ok((pl * jp * pm.adjoint() - ml * jm * mm.adjoint()) / den)
            }
            KernelSpec::Nevanlinna { n } => {
                let den = lambda - mu.conj();
                if den.norm() < 1e-12 {
                    return Err(Error::DiagonalSingularity { denominator: den.norm() });
                }
                Ok((lift(n(lambda)?, np)? - lift(n(mu)?, np)?.adjoint()) / den)
            }
            KernelSpec::HardyLine => Ok(linalg::identity(np) / Domain::Line.denominator(lambda, mu)?),
            KernelSpec::HardyCircle { .. } => {
                Ok(self.x_inv.as_ref().expect("set in new") / Domain::Circle.denominator(lambda, mu)?)
            }
        }
    }
}

/// Rectangular evaluators lift only when they are `p × p` blocks.
fn lift_rows(m: DMatrix<C64>, np: usize) -> Result<DMatrix<C64>> {
    if m.nrows() == np {
        Ok(m)
    } else {
        lift(m, np)
    }
}

impl Kernel for FamilyKernel {
    fn dim(&self) -> usize {
        self.p
    }

    fn eval(&self, z: C64, w: C64) -> Result<DMatrix<C64>> {
        let r = self.basis.rational();
        let middle = self.middle(r.try_eval(z)?, r.try_eval(w)?)?;
        Ok(self.basis.eval_z_kron(z, self.p)? * middle * self.basis.eval_z_kron(w, self.p)?.adjoint())
    }
}

/// `max ‖K_Θ − K_Θ₁ − Θ₁(r(z)) K'(z, w) Θ₁(r(w))*‖` over grid pairs, where `K'` has numerator
/// `X − Θ₁(r(z))^{-1} Θ(r(z)) X Θ(r(w))* Θ₁(r(w))^{-*}` over `−i(r(z) − conj r(w))`.
pub fn theta_split_residual(basis: &StateBasis, p: usize, x: &DMatrix<C64>, theta: &MatrixFn, theta1: &MatrixFn, grid: &[C64]) -> Result<f64> {
    let np = basis.dim() * p;
    let x = lift(x.clone(), np)?;
    let full = FamilyKernel::new(basis, p, KernelSpec::ThetaLine { x: x.clone(), theta: theta.clone() })?;
    let part = FamilyKernel::new(basis, p, KernelSpec::ThetaLine { x: x.clone(), theta: theta1.clone() })?;
    let r = basis.rational();
    let mut worst: f64 = 0.0;
    for &z in grid {
        for &w in grid {
            let (lz, lw) = (r.try_eval(z)?, r.try_eval(w)?);
            let den = Domain::Line.denominator(lz, lw)?;
            let (t1z, t1w) = (lift(theta1(lz)?, np)?, lift(theta1(lw)?, np)?);
            let (tz, tw) = (lift(theta(lz)?, np)?, lift(theta(lw)?, np)?);
            let t1z_inv = linalg::inverse(&t1z, 1e-13)?;
            let t1w_inv = linalg::inverse(&t1w, 1e-13)?;
            let inner = (&x - &t1z_inv * &tz * &x * tw.adjoint() * t1w_inv.adjoint()) / den;
            let sandwich = basis.eval_z_kron(z, p)? * &t1z * inner * t1w.adjoint() * basis.eval_z_kron(w, p)?.adjoint();
            let diff = full.eval(z, w)? - part.eval(z, w)? - sandwich;
            worst = worst.max(linalg::norm_inf(&diff));
        }
    }
    Ok(worst)
}

/// `K = (E₊ J₊ E₊* − E₋ J₋ E₋*) / den` recovered from `K` at `α` and its reflection.
#[derive(Clone)]
pub struct DeBrangesSplit {
    kernel: SharedKernel,
    pub alpha: C64,
    /// `ᾱ` on the line, `1/ᾱ` on the circle.
    pub beta: C64,
    pub domain: Domain,
    m_plus: DMatrix<C64>,
    m_minus: DMatrix<C64>,
    pub j_plus: DMatrix<C64>,
    pub j_minus: DMatrix<C64>,
    scale: f64,
}

/// On the line `α` is replaced by `ᾱ` when `Im α < 0`; on the circle `0 < |α| < 1`.
pub fn de_branges_split(k: SharedKernel, alpha: C64, domain: Domain) -> Result<DeBrangesSplit> {
    let (alpha, beta, scale) = match domain {
        Domain::Line => {
            if alpha.im == 0.0 {
                return Err(Error::DegenerateAlpha { alpha, reason: "alpha must be off the real line".into() });
            }
            let a = if alpha.im < 0.0 { alpha.conj() } else { alpha };
            (a, a.conj(), 2.0 * a.im)
        }
        Domain::Circle => {
            let m = alpha.norm();
            if m == 0.0 || m >= 1.0 {
                return Err(Error::DegenerateAlpha { alpha, reason: "need 0 < |alpha| < 1".into() });
            }
            (alpha, 1.0 / alpha.conj(), 1.0 - m * m)
        }
    };
    let factor = |pt: C64| -> Result<(DMatrix<C64>, DMatrix<C64>)> {
        let kpp = k.eval(pt, pt)?;
        let inv = linalg::inverse(&kpp, 1e-10).map_err(|_| Error::RankDeficientAtAlpha { alpha: pt })?;
        linalg::hermitian_signature_factor(&inv, 1e-12).map_err(|_| Error::RankDeficientAtAlpha { alpha: pt })
    };
    let (m_plus, j_plus) = factor(alpha)?;
    let (m_minus, j_minus) = factor(beta)?;
    Ok(DeBrangesSplit { kernel: k, alpha, beta, domain, m_plus, m_minus, j_plus, j_minus, scale })
}

impl DeBrangesSplit {
    pub fn e_plus(&self, z: C64) -> Result<DMatrix<C64>> {
        let w = match self.domain {
            Domain::Line => z - self.alpha.conj(),
            Domain::Circle => 1.0 - z * self.alpha.conj(),
        };
        Ok(self.kernel.eval(z, self.alpha)? * &self.m_plus * (w / self.scale.sqrt()))
    }

    pub fn e_minus(&self, z: C64) -> Result<DMatrix<C64>> {
        Ok(self.kernel.eval(z, self.beta)? * &self.m_minus * ((z - self.alpha) / self.scale.sqrt()))
    }

    /// `max ‖K − (E₊J₊E₊* − E₋J₋E₋*)/den‖` over grid pairs.
    pub fn reconstruction_residual(&self, grid: &[C64]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &z in grid {
            for &w in grid {
                worst = worst.max(linalg::norm_inf(&(self.kernel.eval(z, w)? - self.eval(z, w)?)));
            }
        }
        Ok(worst)
    }

    /// The split as [`KernelSpec::EPlusMinus`] data.
    pub fn to_spec(&self) -> KernelSpec {
        let (a, b) = (self.clone(), self.clone());
        KernelSpec::EPlusMinus {
            e_plus: matrix_fn(move |z| a.e_plus(z)),
            e_minus: matrix_fn(move |z| b.e_minus(z)),
            j_plus: self.j_plus.clone(),
            j_minus: self.j_minus.clone(),
            domain: self.domain,
        }
    }
}

impl Kernel for DeBrangesSplit {
    fn dim(&self) -> usize {
        self.kernel.dim()
    }

    fn eval(&self, z: C64, w: C64) -> Result<DMatrix<C64>> {
        let den = self.domain.denominator(z, w)?;
        let (pz, pw) = (self.e_plus(z)?, self.e_plus(w)?);
        let (mz, mw) = (self.e_minus(z)?, self.e_minus(w)?);
        Ok((pz * &self.j_plus * pw.adjoint() - mz * &self.j_minus * mw.adjoint()) / den)
    }
}
