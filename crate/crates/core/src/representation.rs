//! Decomposition `f(z) = (Z_r(z) ⊗ I_p) F(r(z))` near the zeros of `r`.
//!
//! `F` is computed from
//!
//! ```text
//! F(w) = (1/2πi) Σ_ℓ ∮_{∂D_ℓ} (I − (s − a)T)^{-1} b f(s) / (r(s) − w) ds
//! ```
//!
//! over a cover of the zeros of `r` by disks `D_ℓ` free of poles.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::json::JsonComplex;
use crate::kernels::Kernel;
use crate::linalg;
use crate::polyrat::RationalFn;
use crate::resolvent::{AnalyticFn, Composite, SharedFn};
use crate::statespace::StateBasis;
use crate::{Error, Result, C64};

/// Zeros closer than this are treated as one center.
pub const ZERO_CLUSTER_TOL: f64 = 1e-6;

/// How disks are chosen and certified.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverPolicy {
    pub shrink_factor: f64,
    pub max_shrinks: usize,
    /// Points per side of the certification grid.
    pub grid_size: usize,
    /// Boundary samples per circle for `ρ`.
    pub boundary_samples: usize,
    /// Points the disks must stay away from, besides the poles.
    pub avoid: Vec<C64>,
}

impl Default for CoverPolicy {
    fn default() -> Self {
        CoverPolicy { shrink_factor: 0.7, max_shrinks: 30, grid_size: 201, boundary_samples: 4096, avoid: Vec::new() }
    }
}

/// Disks around the distinct zeros of `r` and `ρ = min |r|` on their boundaries.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiskCover {
    pub centers: Vec<JsonComplex>,
    pub multiplicities: Vec<usize>,
    pub radii: Vec<f64>,
    pub rho: f64,
    /// Square `[lo.re, hi.re] × [lo.im, hi.im]` on which the inclusion was sampled.
    pub grid_lo: JsonComplex,
    pub grid_hi: JsonComplex,
    pub grid_size: usize,
}

impl DiskCover {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn contains(&self, z: C64) -> bool {
        self.centers.iter().zip(&self.radii).any(|(c, &rad)| (z - c.0).norm() < rad)
    }
}

fn cluster_zeros(zeros: &[C64]) -> (Vec<C64>, Vec<usize>) {
    let mut centers: Vec<C64> = Vec::new();
    let mut mult: Vec<usize> = Vec::new();
    let mut sums: Vec<C64> = Vec::new();
    for &z in zeros {
        match centers.iter().position(|c| (c - z).norm() <= ZERO_CLUSTER_TOL * (1.0 + z.norm())) {
            Some(k) => {
                mult[k] += 1;
                sums[k] += z;
                centers[k] = sums[k] / mult[k] as f64;
            }
            None => {
                centers.push(z);
                mult.push(1);
                sums.push(z);
            }
        }
    }
    (centers, mult)
}

/// `min |r|` on the circle `|z − c| = rad`: sampling, then golden-section refinement.
fn boundary_min(r: &RationalFn, c: C64, rad: f64, samples: usize) -> f64 {
    let at = |t: f64| r.eval(c + C64::from_polar(rad, t)).norm();
    let step = 2.0 * PI / samples as f64;
    let (k, best) = (0..samples)
        .map(|k| (k, at(step * k as f64)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("samples > 0");
    let (mut lo, mut hi) = (step * (k as f64 - 1.0), step * (k as f64 + 1.0));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (at(x1), at(x2));
    for _ in 0..60 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = at(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = at(x2);
        }
    }
    best.min(f1).min(f2)
}

/// First grid point or far probe with `|r| < ρ` outside every disk.
fn inclusion_violation(r: &RationalFn, cover: &DiskCover) -> Option<(C64, f64)> {
    let n = cover.grid_size.max(2);
    let (lo, hi) = (cover.grid_lo.0, cover.grid_hi.0);
    for i in 0..n {
        for j in 0..n {
            let z = C64::new(
                lo.re + (hi.re - lo.re) * i as f64 / (n - 1) as f64,
                lo.im + (hi.im - lo.im) * j as f64 / (n - 1) as f64,
            );
            if let Ok(v) = r.try_eval(z) {
                if v.norm() < cover.rho && !cover.contains(z) {
                    return Some((z, v.norm()));
                }
            }
        }
    }
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi.re - lo.re);
    for k in 0..64 {
        let dir = C64::from_polar(1.0, 2.0 * PI * k as f64 / 64.0);
        for e in 0..24 {
            let z = mid + dir * half * 2f64.powi(e);
            if let Ok(v) = r.try_eval(z) {
                if v.norm() < cover.rho {
                    return Some((z, v.norm()));
                }
            }
        }
    }
    if let Some(v) = r.at_infinity() {
        if v.norm() < cover.rho {
            return Some((mid + half * 2f64.powi(24), v.norm()));
        }
    }
    None
}

/// Disks around the zeros of `r`, shrunk until the sampled inclusion
/// `{|r| < ρ} ⊂ ∪ D_ℓ` holds.
pub fn build_cover(r: &RationalFn, policy: &CoverPolicy) -> Result<DiskCover> {
    let (centers, multiplicities) = cluster_zeros(&r.zeros()?);
    let poles = r.poles()?;
    let mut radii: Vec<f64> = centers
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let d = centers
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &o)| (o - c).norm())
                .chain(poles.iter().chain(&policy.avoid).map(|&o| (o - c).norm()))
                .fold(f64::INFINITY, f64::min);
            if d.is_finite() { 0.5 * d } else { 1.0 }
        })
        .collect();

    let mut extent: Vec<C64> = centers.clone();
    extent.extend(poles.iter().copied());
    let (mut lo, mut hi) = (extent[0], extent[0]);
    for z in &extent {
        lo = C64::new(lo.re.min(z.re), lo.im.min(z.im));
        hi = C64::new(hi.re.max(z.re), hi.im.max(z.im));
    }
    let mid = 0.5 * (lo + hi);
    let max_r = radii.iter().copied().fold(0.0, f64::max);
    let half = 0.5 * (hi.re - lo.re).max(hi.im - lo.im) + 2.0 * max_r + 1.0;
    let grid_lo = mid - C64::new(half, half);
    let grid_hi = mid + C64::new(half, half);

    let mut last = (mid, 0.0, 0.0);
    for _ in 0..=policy.max_shrinks {
        let rho = centers
            .iter()
            .zip(&radii)
            .map(|(&c, &rad)| boundary_min(r, c, rad, policy.boundary_samples))
            .fold(f64::INFINITY, f64::min);
        let cover = DiskCover {
            centers: centers.iter().map(|&c| JsonComplex(c)).collect(),
            multiplicities: multiplicities.clone(),
            radii: radii.clone(),
            rho,
            grid_lo: JsonComplex(grid_lo),
            grid_hi: JsonComplex(grid_hi),
            grid_size: policy.grid_size,
        };
        if rho.is_finite() && rho > 0.0 {
            match inclusion_violation(r, &cover) {
                None => {
                    log::debug!("cover with radii {radii:?}, rho = {rho:.6e}");
                    return Ok(cover);
                }
                Some((z, v)) => last = (z, v, rho),
            }
        }
        for rad in &mut radii {
            *rad *= policy.shrink_factor;
        }
    }
    Err(Error::CoverConstructionFailed { point: last.0, value: last.1, rho: last.2 })
}

/// Quadrature and Taylor settings for [`decompose`].
#[derive(Clone, Debug, PartialEq)]
pub struct DecomposeOptions {
    /// Trapezoid nodes per circle; even, at least 256 recommended.
    pub quad_nodes: usize,
    pub taylor_order: usize,
    /// Taylor coefficients come from the circle `|w| = taylor_fraction · ρ`.
    pub taylor_fraction: f64,
    pub taylor_nodes: usize,
    /// Relative tolerance for the node-halving test.
    pub tolerance: f64,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions { quad_nodes: 2048, taylor_order: 32, taylor_fraction: 0.5, taylor_nodes: 128, tolerance: 1e-7 }
    }
}

struct Node {
    weight: C64,
    r: C64,
    hf: Vec<C64>,
}

/// `F` for a given `f`, with both evaluators and the round-trip diagnostics.
pub struct DecompositionResult {
    basis: StateBasis,
    cover: DiskCover,
    p: usize,
    nodes: Vec<Node>,
    taylor: Vec<Vec<C64>>,
    taylor_radius: f64,
    pub roundtrip_error: f64,
    /// `max |f|` over the validation points.
    pub f_scale: f64,
    pub validation_points: Vec<C64>,
    pub halving_discrepancy: f64,
}

/// Up to 100 points `c + t R e^{iθ}` with `|r| < ρ/2`.
pub fn validation_points(r: &RationalFn, cover: &DiskCover) -> Vec<C64> {
    let mut out = Vec::new();
    for (c, &rad) in cover.centers.iter().zip(&cover.radii) {
        for t in 1..10 {
            for k in 0..16 {
                let z = c.0 + C64::from_polar(rad * t as f64 / 10.0, 2.0 * PI * (k as f64 + 0.25) / 16.0);
                if matches!(r.try_eval(z), Ok(v) if v.norm() < 0.5 * cover.rho) {
                    out.push(z);
                }
            }
        }
    }
    if out.len() > 100 {
        let stride = out.len() as f64 / 100.0;
        out = (0..100).map(|k| out[(k as f64 * stride) as usize]).collect();
    }
    out
}

pub fn decompose(basis: &StateBasis, f: SharedFn, cover: &DiskCover, opts: &DecomposeOptions) -> Result<DecompositionResult> {
    let m = opts.quad_nodes;
    if m < 8 || m % 2 != 0 {
        return Err(Error::InvalidArgument(format!("quad_nodes must be even and at least 8, got {m}")));
    }
    let r = basis.rational();
    let p = f.dim();
    let n = basis.dim();
    let mut nodes = Vec::with_capacity(m * cover.len());
    for (c, &rad) in cover.centers.iter().zip(&cover.radii) {
        for k in 0..m {
            let e = C64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64);
            let s = c.0 + rad * e;
            let h = basis.realization().resolvent_b(s)?;
            let fs = f.eval(s)?;
            let mut hf = vec![C64::new(0.0, 0.0); n * p];
            for i in 0..n {
                for j in 0..p {
                    hf[i * p + j] = h[(i, 0)] * fs[j];
                }
            }
            nodes.push(Node { weight: rad * e / m as f64, r: r.try_eval(s)?, hf });
        }
    }
    let mut out = DecompositionResult {
        basis: basis.clone(),
        cover: cover.clone(),
        p,
        nodes,
        taylor: Vec::new(),
        taylor_radius: opts.taylor_fraction * cover.rho,
        roundtrip_error: 0.0,
        f_scale: 0.0,
        validation_points: Vec::new(),
        halving_discrepancy: 0.0,
    };

    let probes = std::iter::once(C64::new(0.0, 0.0))
        .chain((0..4).map(|k| C64::from_polar(out.taylor_radius, PI * (0.5 * k as f64 + 0.125))));
    let (mut disc, mut scale) = (0.0f64, 0.0f64);
    for w in probes {
        let full = out.sum_nodes(w, None, false);
        let half = out.sum_nodes(w, None, true);
        disc = disc.max(full.iter().zip(&half).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max));
        scale = scale.max(full.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    out.halving_discrepancy = disc;
    if disc > opts.tolerance * (1.0 + scale) {
        return Err(Error::QuadratureDivergence { nodes: m, discrepancy: disc });
    }

    let mt = opts.taylor_nodes.max(2 * (opts.taylor_order + 1));
    let samples: Vec<Vec<C64>> = (0..mt)
        .map(|k| out.sum_nodes(C64::from_polar(out.taylor_radius, 2.0 * PI * k as f64 / mt as f64), None, false))
        .collect();
    out.taylor = (0..n * p)
        .map(|comp| {
            (0..=opts.taylor_order)
                .map(|j| {
                    let acc: C64 = samples
                        .iter()
                        .enumerate()
                        .map(|(k, v)| v[comp] * C64::from_polar(1.0, -2.0 * PI * (j * k) as f64 / mt as f64))
                        .sum();
                    acc / (mt as f64 * out.taylor_radius.powi(j as i32))
                })
                .collect()
        })
        .collect();

    out.validation_points = validation_points(r, cover);
    for &z in &out.validation_points {
        let fz = f.eval(z)?;
        let back = out.reconstruct(z)?;
        out.f_scale = out.f_scale.max(fz.iter().map(|v| v.norm()).fold(0.0, f64::max));
        out.roundtrip_error = out.roundtrip_error.max(fz.iter().zip(&back).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max));
    }
    Ok(out)
}

impl DecompositionResult {
    /// `Σ_k weight_k h f(s_k) / ((r(s_k) − w)(r(s_k) − α))`, the `α` factor optional.
    fn sum_nodes(&self, w: C64, alpha: Option<C64>, half: bool) -> Vec<C64> {
        let mut acc = vec![C64::new(0.0, 0.0); self.basis.dim() * self.p];
        let step = if half { 2 } else { 1 };
        for node in self.nodes.iter().step_by(step) {
            let mut c = node.weight * step as f64 / (node.r - w);
            if let Some(a) = alpha {
                c /= node.r - a;
            }
            for (o, v) in acc.iter_mut().zip(&node.hf) {
                *o += c * v;
            }
        }
        acc
    }

    fn check_rho(&self, w: C64) -> Result<()> {
        if w.norm() >= self.cover.rho {
            return Err(Error::EvalOutsideRho { modulus: w.norm(), rho: self.cover.rho });
        }
        Ok(())
    }

    pub fn cover(&self) -> &DiskCover {
        &self.cover
    }

    pub fn basis(&self) -> &StateBasis {
        &self.basis
    }

    /// Output dimension `p` of `f`.
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn rho(&self) -> f64 {
        self.cover.rho
    }

    /// `F(w)` by quadrature, `|w| < ρ`.
    pub fn eval_quadrature(&self, w: C64) -> Result<Vec<C64>> {
        self.check_rho(w)?;
        Ok(self.sum_nodes(w, None, false))
    }

    /// `F(w)` from the truncated Taylor series, `|w| < ρ`.
    pub fn eval_taylor(&self, w: C64) -> Result<Vec<C64>> {
        self.check_rho(w)?;
        Ok(self
            .taylor
            .iter()
            .map(|cs| cs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * w + c))
            .collect())
    }

    /// Taylor coefficients of `F` at 0, one vector per component.
    pub fn taylor_coefficients(&self) -> &[Vec<C64>] {
        &self.taylor
    }

    /// `(Z_r(z) ⊗ I_p) F(r(z))`.
    pub fn reconstruct(&self, z: C64) -> Result<Vec<C64>> {
        let w = self.basis.rational().try_eval(z)?;
        let fw = self.eval_quadrature(w)?;
        Ok(crate::resolvent::apply_kron_row(&self.basis.eval_z(z)?, self.p, &fw))
    }

    /// `(R_α F)(w)` by the contour formula with the kernel `1/((r − α)(r − w))`.
    pub fn resolvent_contour(&self, alpha: C64, w: C64) -> Result<Vec<C64>> {
        self.check_rho(alpha)?;
        self.check_rho(w)?;
        Ok(self.sum_nodes(w, Some(alpha), false))
    }

    /// Whether the round trip met `tol · (1 + max |f|)`.
    pub fn roundtrip_ok(&self, tol: f64) -> bool {
        self.roundtrip_error <= tol * (1.0 + self.f_scale)
    }
}

impl AnalyticFn for DecompositionResult {
    fn dim(&self) -> usize {
        self.basis.dim() * self.p
    }

    fn eval(&self, w: C64) -> Result<Vec<C64>> {
        self.eval_quadrature(w)
    }
}

/// Whether `Z_r · F∘r ≡ 0` on the samples forces `F ≡ 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniquenessReport {
    pub unique: bool,
    /// `max |Z_r(z) F(r(z))|` over the samples.
    pub composite_max: f64,
    /// `max |F(r(z))|` over the samples.
    pub f_max: f64,
    /// Relative smallest singular value of `[Z_r(z_k) r(z_k)^j]`.
    pub conditioning: f64,
    pub order: usize,
}

/// Checks Taylor coefficients of `F` up to `order` through the system
/// `[Z_r(z_k) ⊗ r(z_k)^j]`.
pub fn uniqueness_check(basis: &StateBasis, big_f: &dyn AnalyticFn, samples: &[C64], order: usize) -> Result<UniquenessReport> {
    let n = basis.dim();
    if big_f.dim() % n != 0 {
        return Err(Error::DimensionMismatch(format!("F has dimension {}, N = {n}", big_f.dim())));
    }
    let p = big_f.dim() / n;
    let r = basis.rational();
    let mut sys = DMatrix::zeros(samples.len(), n * (order + 1));
    let (mut composite_max, mut f_max) = (0.0f64, 0.0f64);
    for (k, &z) in samples.iter().enumerate() {
        let w = r.try_eval(z)?;
        let zr = basis.eval_z(z)?;
        for i in 0..n {
            for j in 0..=order {
                sys[(k, i * (order + 1) + j)] = zr[(0, i)] * w.powu(j as u32);
            }
        }
        let fw = big_f.eval(w)?;
        let comp = crate::resolvent::apply_kron_row(&zr, p, &fw);
        composite_max = composite_max.max(comp.iter().map(|v| v.norm()).fold(0.0, f64::max));
        f_max = f_max.max(fw.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    let sv = linalg::singular_values(&sys);
    let top = sv.first().copied().unwrap_or(0.0);
    let full_rank = samples.len() >= n * (order + 1);
    let conditioning = if full_rank && top > 0.0 { sv.last().copied().unwrap_or(0.0) / top } else { 0.0 };
    let vanishes = composite_max <= 1e-9 * (1.0 + f_max);
    let unique = !vanishes || (conditioning > 1e-12 && f_max <= 1e-9) || f_max <= 1e-9;
    Ok(UniquenessReport { unique, composite_max, f_max, conditioning, order })
}

/// `𝕂(z, w) = (Z_r(z) ⊗ I_p) K₀(r(z), r(w)) (Z_r(w) ⊗ I_p)*`.
pub struct TransformedKernel {
    basis: StateBasis,
    k0: Arc<dyn Kernel>,
    p: usize,
}

pub fn kernel_transform(k0: Arc<dyn Kernel>, basis: &StateBasis) -> Result<TransformedKernel> {
    let n = basis.dim();
    if k0.dim() % n != 0 || k0.dim() == 0 {
        return Err(Error::DimensionMismatch(format!("K0 has dimension {}, N = {n}", k0.dim())));
    }
    Ok(TransformedKernel { basis: basis.clone(), p: k0.dim() / n, k0 })
}

impl Kernel for TransformedKernel {
    fn dim(&self) -> usize {
        self.p
    }

    fn eval(&self, z: C64, w: C64) -> Result<DMatrix<C64>> {
        let r = self.basis.rational();
        let zz = self.basis.eval_z_kron(z, self.p)?;
        let zw = self.basis.eval_z_kron(w, self.p)?;
        Ok(&zz * self.k0.eval(r.try_eval(z)?, r.try_eval(w)?)? * zw.adjoint())
    }
}

/// `z ↦ K₀(z, α) u`.
pub struct KernelColumn {
    k0: Arc<dyn Kernel>,
    alpha: C64,
    u: DMatrix<C64>,
}

impl AnalyticFn for KernelColumn {
    fn dim(&self) -> usize {
        self.k0.dim()
    }

    fn eval(&self, z: C64) -> Result<Vec<C64>> {
        Ok((self.k0.eval(z, self.alpha)? * &self.u).iter().copied().collect())
    }
}

/// Minimal-norm solution of `Σ c_n f(w_n) = γ` and its diagnostics.
pub struct Interpolant {
    pub alpha: C64,
    /// `F` with `f = (Z_r ⊗ I) F∘r`.
    pub big_f: Arc<KernelColumn>,
    pub f: Arc<Composite>,
    /// `F(α) = c*(cc*)^{-1} γ`.
    pub value_at_alpha: Vec<C64>,
    /// `I − c*(cc*)^{-1} c`, the free part of `F(α)`.
    pub projector: DMatrix<C64>,
    pub constraint_residual: f64,
    /// `‖(I − c*(cc*)^{-1}c) K₀(α, α)^{-1} F(α)‖`.
    pub orthogonality_residual: f64,
}

pub fn multipoint_interpolate(
    basis: &StateBasis,
    k0: Arc<dyn Kernel>,
    c_weights: &[C64],
    w_points: &[C64],
    gamma: &[C64],
) -> Result<Interpolant> {
    let r = basis.rational();
    let n = basis.dim();
    if c_weights.len() != w_points.len() || w_points.is_empty() {
        return Err(Error::DimensionMismatch("one weight per interpolation point".into()));
    }
    if k0.dim() % n != 0 || k0.dim() == 0 {
        return Err(Error::DimensionMismatch(format!("K0 has dimension {}, N = {n}", k0.dim())));
    }
    let p = k0.dim() / n;
    if gamma.len() != p {
        return Err(Error::DimensionMismatch(format!("gamma has length {}, p = {p}", gamma.len())));
    }
    let alpha = r.try_eval(w_points[0])?;
    for &w in w_points {
        let v = r.try_eval(w)?;
        if (v - alpha).norm() > 1e-9 * (1.0 + alpha.norm()) {
            return Err(Error::DegenerateAlpha { alpha, reason: format!("r({w}) = {v} differs") });
        }
    }
    r.fiber(alpha)?;

    let mut c = DMatrix::zeros(p, n * p);
    for (&cn, &w) in c_weights.iter().zip(w_points) {
        c += basis.eval_z_kron(w, p)? * cn;
    }
    if linalg::max_abs(&c) <= 1e-14 {
        return Err(Error::ZeroFunctional);
    }
    let ccs_inv = linalg::inverse(&(&c * c.adjoint()), 1e-12).map_err(|_| Error::ZeroFunctional)?;
    let pinv = c.adjoint() * ccs_inv;
    let g = DMatrix::from_column_slice(p, 1, gamma);
    let v0 = &pinv * &g;
    let projector = linalg::identity(n * p) - &pinv * &c;
    let kaa_inv = linalg::inverse(&k0.eval(alpha, alpha)?, 1e-12)?;
    let u = &kaa_inv * &v0;
    let orthogonality_residual = (&projector * &u).norm();

    let big_f = Arc::new(KernelColumn { k0, alpha, u });
    let f = Arc::new(Composite::new(basis.clone(), big_f.clone())?);
    let mut got = vec![C64::new(0.0, 0.0); p];
    for (&cn, &w) in c_weights.iter().zip(w_points) {
        for (o, v) in got.iter_mut().zip(f.eval(w)?) {
            *o += cn * v;
        }
    }
    let constraint_residual = got.iter().zip(gamma).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    Ok(Interpolant {
        alpha,
        big_f,
        f,
        value_at_alpha: v0.iter().copied().collect(),
        projector,
        constraint_residual,
        orthogonality_residual,
    })
}
