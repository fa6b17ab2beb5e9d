//! Complex polynomials and rational functions `r = p/q` with `deg p ≥ deg q`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::json::JsonComplex;
use crate::{Error, Result, C64};

/// Coefficients below this fraction of the largest one are dropped.
pub const ZERO_TOL: f64 = 1e-12;
/// Minimum distance between roots of `p` and roots of `q`.
pub const COPRIME_TOL: f64 = 1e-8;
/// Minimum pairwise distance of the fiber `r^{-1}{α}` for `α ∈ Ω(r)`.
pub const OMEGA_SEP: f64 = 1e-6;
/// Default acceptance threshold for the backward error of a computed root.
pub const ROOT_TOL: f64 = 1e-9;

const MAX_ABERTH_ITERATIONS: usize = 500;

/// Polynomial with ascending complex coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    coeffs: Vec<C64>,
}

impl Poly {
    /// Trailing coefficients with modulus `≤ ZERO_TOL · max|c|` are removed.
    pub fn new(coeffs: Vec<C64>) -> Self {
        Self::with_tolerance(coeffs, ZERO_TOL)
    }

    pub fn with_tolerance(mut coeffs: Vec<C64>, tol: f64) -> Self {
        let top = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        while let Some(last) = coeffs.last() {
            if last.norm() <= tol * top || last.norm() == 0.0 {
                coeffs.pop();
            } else {
                break;
            }
        }
        Poly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(C64::new(1.0, 0.0))
    }

    /// `z^k`.
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![C64::new(0.0, 0.0); k + 1];
        c[k] = C64::new(1.0, 0.0);
        Poly { coeffs: c }
    }

    /// `lead · Π (z − root)`.
    pub fn from_roots(roots: &[C64], lead: C64) -> Self {
        let mut p = Self::constant(lead);
        for &a in roots {
            p = &p * &Poly { coeffs: vec![-a, C64::new(1.0, 0.0)] };
        }
        p
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Index of the last retained coefficient; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lead(&self) -> C64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    /// Coefficient of `z^k`, zero past the degree.
    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `Σ |c_k| |z|^k`, the natural scale for the backward error at `z`.
    pub fn abs_eval(&self, z: C64) -> f64 {
        let m = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * m + c.norm())
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(k, &c)| c * (k + 1) as f64)
                .collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// `p(z + a)`.
    pub fn shift(&self, a: C64) -> Poly {
        let n = self.coeffs.len();
        let mut c = self.coeffs.clone();
        // repeated synthetic division
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = c[j + 1] * a;
                c[j] += t;
            }
        }
        Poly::new(c)
    }

    /// Quotient and remainder of Euclidean division.
    pub fn div_rem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        if d.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if self.coeffs.len() < d.coeffs.len() {
            return Ok((Poly::zero(), self.clone()));
        }
        let dn = d.degree();
        let lead = d.lead();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![C64::new(0.0, 0.0); self.coeffs.len() - dn];
        for k in (0..quot.len()).rev() {
            let t = rem[k + dn] / lead;
            quot[k] = t;
            for (j, &dc) in d.coeffs.iter().enumerate() {
                rem[k + j] -= t * dc;
            }
        }
        rem.truncate(dn);
        Ok((Poly::new(quot), Poly::new(rem)))
    }

    /// True when every coefficient is real up to `tol` relative to the largest.
    pub fn is_real(&self, tol: f64) -> bool {
        let top = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        self.coeffs.iter().all(|c| c.im.abs() <= tol * top.max(1e-300))
    }

    pub fn roots(&self) -> Result<Vec<C64>> {
        poly_roots(self, ROOT_TOL)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() != 0.0)
            .map(|(k, c)| match k {
                0 => format!("({c})"),
                1 => format!("({c})z"),
                _ => format!("({c})z^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![C64::new(0.0, 0.0); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|&c| -c).collect() }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, o: Poly) -> Poly {
                (&self).$m(&o)
            }
        }
    };
}
forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<JsonComplex> = self.coeffs.iter().map(|&c| JsonComplex(c)).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<JsonComplex> = Vec::deserialize(d)?;
        Ok(Poly::new(v.into_iter().map(|c| c.0).collect()))
    }
}

fn root_order(a: &C64, b: &C64) -> Ordering {
    let ka = (a.re * 1e9).round();
    let kb = (b.re * 1e9).round();
    ka.total_cmp(&kb).then(a.im.total_cmp(&b.im))
}

/// Sorts by real part (quantized to 1e-9) and then by imaginary part.
pub fn sort_roots(roots: &mut [C64]) {
    roots.sort_by(root_order);
}

/// All `deg p` roots of `p`, with multiplicity, by Aberth–Ehrlich iteration
/// followed by Newton polishing.
///
/// Each returned root satisfies `|p(z)| ≤ tol · Σ|c_k||z|^k`.
pub fn poly_roots(p: &Poly, tol: f64) -> Result<Vec<C64>> {
    if p.degree() == 0 {
        return Err(Error::ConstantNumerator);
    }
    // exact zeros at the origin
    let lowest = p.coeffs.iter().position(|c| c.norm() != 0.0).unwrap_or(0);
    let reduced = Poly { coeffs: p.coeffs[lowest..].to_vec() };
    let mut roots = vec![C64::new(0.0, 0.0); lowest];
    roots.extend(aberth(&reduced)?);
    for z in roots.iter_mut() {
        *z = polish(p, *z);
    }
    for &z in &roots {
        let scale = p.abs_eval(z).max(f64::MIN_POSITIVE);
        if p.eval(z).norm() > tol * scale {
            log::debug!("root {z} has backward error {:.3e}", p.eval(z).norm() / scale);
            return Err(Error::NonConvergence { iterations: MAX_ABERTH_ITERATIONS });
        }
    }
    sort_roots(&mut roots);
    Ok(roots)
}

fn aberth(p: &Poly) -> Result<Vec<C64>> {
    let n = p.degree();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![-p.coeffs[0] / p.coeffs[1]]);
    }
    let dp = p.derivative();
    let radius = (p.coeffs[0].norm() / p.lead().norm()).powf(1.0 / n as f64);
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            C64::from_polar(radius, theta)
        })
        .collect();
    let eps = 4.0 * f64::EPSILON * n as f64;
    let mut done = vec![false; n];
    for iter in 0..MAX_ABERTH_ITERATIONS {
        for i in 0..n {
            if done[i] {
                continue;
            }
            let pz = p.eval(z[i]);
            if pz.norm() <= eps * p.abs_eval(z[i]) {
                done[i] = true;
                continue;
            }
            let ratio = pz / dp.eval(z[i]);
            let repulsion: C64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let step = ratio / (1.0 - ratio * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                // perturb off a critical point
                let bump = C64::new(1e-8, 1e-8) * (1.0 + z[i].norm());
                z[i] += bump;
                continue;
            }
            z[i] -= step;
            if step.norm() <= f64::EPSILON * z[i].norm() {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            log::trace!("aberth converged after {iter} sweeps");
            return Ok(z);
        }
    }
    Err(Error::NonConvergence { iterations: MAX_ABERTH_ITERATIONS })
}

fn polish(p: &Poly, mut z: C64) -> C64 {
    let dp = p.derivative();
    for _ in 0..3 {
        let pz = p.eval(z);
        let d = dp.eval(z);
        if d.norm() == 0.0 {
            break;
        }
        let cand = z - pz / d;
        if p.eval(cand).norm() < pz.norm() {
            z = cand;
        } else {
            break;
        }
    }
    z
}

fn min_pairwise_distance(a: &[C64], b: &[C64]) -> f64 {
    let mut m = f64::INFINITY;
    for x in a {
        for y in b {
            m = m.min((x - y).norm());
        }
    }
    m
}

/// Smallest distance between distinct entries of `pts`.
pub fn separation(pts: &[C64]) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            m = m.min((pts[i] - pts[j]).norm());
        }
    }
    m
}

/// Rational function `p/q` with coprime `p, q` and `deg p ≥ deg q`, `deg p ≥ 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFn {
    p: Poly,
    q: Poly,
}

/// `r^{-1}{α}` together with `r'` at each point.
#[derive(Clone, Debug, PartialEq)]
pub struct Fiber {
    pub alpha: C64,
    pub points: Vec<C64>,
    pub r_prime: Vec<C64>,
}

/// `1/(r(z) − α) = constant_term + Σ residue / (z − w)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartialFractionExpansion {
    #[serde(with = "crate::json::complex")]
    pub constant_term: C64,
    pub poles: Vec<(JsonComplex, JsonComplex)>,
}

impl PartialFractionExpansion {
    pub fn eval(&self, z: C64) -> C64 {
        self.constant_term + self.poles.iter().map(|(w, res)| res.0 / (z - w.0)).sum::<C64>()
    }
}

impl RationalFn {
    pub fn new(p: Poly, q: Poly) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if p.degree() == 0 {
            return Err(Error::ConstantNumerator);
        }
        if p.degree() < q.degree() {
            return Err(Error::DegreeMismatch { deg_p: p.degree(), deg_q: q.degree() });
        }
        if q.degree() > 0 {
            let pr = p.roots()?;
            let qr = q.roots()?;
            let d = min_pairwise_distance(&pr, &qr);
            if d <= COPRIME_TOL {
                return Err(Error::NotCoprime { distance: d });
            }
        }
        Ok(RationalFn { p, q })
    }

    pub fn polynomial(p: Poly) -> Result<Self> {
        Self::new(p, Poly::one())
    }

    pub fn from_real(p: &[f64], q: &[f64]) -> Result<Self> {
        Self::new(Poly::from_real(p), Poly::from_real(q))
    }

    /// The identity `r(z) = z`.
    pub fn identity() -> Self {
        RationalFn { p: Poly::monomial(1), q: Poly::one() }
    }

    /// `Π (z − a_k)/(1 − z ā_k)`.
    pub fn blaschke(zeros: &[C64]) -> Result<Self> {
        for (i, &a) in zeros.iter().enumerate() {
            if a.norm() >= 1.0 {
                return Err(Error::ZeroOutsideDisk { zero: a });
            }
            if zeros[..i].iter().any(|&b| (a - b).norm() <= COPRIME_TOL) {
                return Err(Error::ZerosNotDistinct);
            }
        }
        if zeros.is_empty() {
            return Err(Error::ConstantNumerator);
        }
        let one = C64::new(1.0, 0.0);
        let mut p = Poly::one();
        let mut q = Poly::one();
        for &a in zeros {
            p = &p * &Poly::new(vec![-a, one]);
            q = &q * &Poly::new(vec![one, -a.conj()]);
        }
        Self::new(p, q)
    }

    pub fn p(&self) -> &Poly {
        &self.p
    }

    pub fn q(&self) -> &Poly {
        &self.q
    }

    /// `N = deg p`.
    pub fn degree(&self) -> usize {
        self.p.degree()
    }

    /// `p(z)/q(z)`; infinite at poles.
    pub fn eval(&self, z: C64) -> C64 {
        self.p.eval(z) / self.q.eval(z)
    }

    /// `r(z)`, or `PoleOfR` when `|q(z)|` vanishes relative to its scale.
    pub fn try_eval(&self, z: C64) -> Result<C64> {
        let qz = self.q.eval(z);
        if qz.norm() <= 1e-14 * self.q.abs_eval(z) {
            return Err(Error::PoleOfR { z });
        }
        Ok(self.p.eval(z) / qz)
    }

    /// `r'(z) = (p'q − pq')/q²`.
    pub fn derivative(&self, z: C64) -> C64 {
        let qz = self.q.eval(z);
        (self.p.derivative().eval(z) * qz - self.p.eval(z) * self.q.derivative().eval(z)) / (qz * qz)
    }

    /// `lim_{z→∞} r(z)` when finite, i.e. when `deg p = deg q`.
    pub fn at_infinity(&self) -> Option<C64> {
        (self.p.degree() == self.q.degree()).then(|| self.p.lead() / self.q.lead())
    }

    pub fn poles(&self) -> Result<Vec<C64>> {
        if self.q.degree() == 0 {
            Ok(Vec::new())
        } else {
            self.q.roots()
        }
    }

    pub fn zeros(&self) -> Result<Vec<C64>> {
        self.p.roots()
    }

    /// `max |r(z) − conj r(conj z)| / (1 + |r(z)|)` over fixed sample points.
    pub fn real_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..16 {
            let z = C64::from_polar(0.37 + 0.29 * k as f64, 0.3 + 0.71 * k as f64);
            if self.try_eval(z).is_err() || self.try_eval(z.conj()).is_err() {
                continue;
            }
            let a = self.eval(z);
            let b = self.eval(z.conj()).conj();
            worst = worst.max((a - b).norm() / (1.0 + a.norm()));
        }
        worst
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.real_defect() <= tol
    }

    /// Roots of `p − αq`.
    pub fn preimages(&self, alpha: C64, tol: f64) -> Result<Vec<C64>> {
        let n = self.degree();
        let h = &self.p - &self.q.scale(alpha);
        if h.degree() < n || h.is_zero() {
            return Err(Error::DegenerateAlpha {
                alpha,
                reason: format!("deg(p - alpha q) = {} < N = {n}", h.degree()),
            });
        }
        let pts = poly_roots(&h, tol)?;
        if self.q.degree() > 0 {
            let poles = self.poles()?;
            let d = min_pairwise_distance(&pts, &poles);
            if d <= tol {
                return Err(Error::DegenerateAlpha {
                    alpha,
                    reason: format!("preimage within {d:.3e} of a pole"),
                });
            }
        }
        Ok(pts)
    }

    /// `α ∈ Ω(r)`: `N` preimages with pairwise distance above `sep`.
    pub fn in_omega(&self, alpha: C64, sep: f64) -> bool {
        match self.preimages(alpha, ROOT_TOL) {
            Ok(pts) => pts.len() == self.degree() && separation(&pts) > sep,
            Err(_) => false,
        }
    }

    /// The fiber over `α`; fails unless `α ∈ Ω(r)` with separation `OMEGA_SEP`.
    pub fn fiber(&self, alpha: C64) -> Result<Fiber> {
        let points = self.preimages(alpha, ROOT_TOL)?;
        let sep = separation(&points);
        if sep <= OMEGA_SEP {
            return Err(Error::DegenerateAlpha {
                alpha,
                reason: format!("preimages separated by only {sep:.3e}"),
            });
        }
        let r_prime: Vec<C64> = points.iter().map(|&w| self.derivative(w)).collect();
        Ok(Fiber { alpha, points, r_prime })
    }

    /// `1/(r(∞) − α)`, zero when `deg p > deg q`.
    pub fn infinity_term(&self, alpha: C64) -> Result<C64> {
        match self.at_infinity() {
            None => Ok(C64::new(0.0, 0.0)),
            Some(rinf) => {
                let d = rinf - alpha;
                if d.norm() <= ZERO_TOL * (1.0 + alpha.norm()) {
                    Err(Error::DegenerateAlpha { alpha, reason: "alpha equals r(infinity)".into() })
                } else {
                    Ok(1.0 / d)
                }
            }
        }
    }

    pub fn partial_fraction(&self, alpha: C64) -> Result<PartialFractionExpansion> {
        let fib = self.fiber(alpha)?;
        Ok(PartialFractionExpansion {
            constant_term: self.infinity_term(alpha)?,
            poles: fib
                .points
                .iter()
                .zip(&fib.r_prime)
                .map(|(&w, &d)| (JsonComplex(w), JsonComplex(1.0 / d)))
                .collect(),
        })
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] / [{}]", self.p, self.q)
    }
}

#[derive(Serialize, Deserialize)]
struct RationalRepr {
    p: Poly,
    #[serde(default = "Poly::one")]
    q: Poly,
}

impl Serialize for RationalFn {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RationalRepr { p: self.p.clone(), q: self.q.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalFn {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = RationalRepr::deserialize(d)?;
        RationalFn::new(r.p, r.q).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn z_plus_inv() -> RationalFn {
        RationalFn::from_real(&[1.0, 0.0, 1.0], &[0.0, 1.0]).unwrap()
    }

    #[test]
    fn trimming_and_degree() {
        let p = Poly::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(1e-20, 0.0)]);
        assert_eq!(p.degree(), 1);
        assert!(Poly::new(vec![c(0.0, 0.0); 3]).is_zero());
        assert_eq!(Poly::zero().degree(), 0);
    }

    #[test]
    fn arithmetic() {
        let a = Poly::from_real(&[1.0, 1.0]);
        let b = Poly::from_real(&[-1.0, 1.0]);
        assert_eq!(&a * &b, Poly::from_real(&[-1.0, 0.0, 1.0]));
        let (q, r) = Poly::from_real(&[-1.0, 0.0, 1.0]).div_rem(&a).unwrap();
        assert_eq!(q, b);
        assert!(r.is_zero());
        assert_eq!(Poly::from_real(&[0.0, 0.0, 1.0]).shift(c(1.0, 0.0)), Poly::from_real(&[1.0, 2.0, 1.0]));
    }

    #[test]
    fn roots_of_z2_minus_1() {
        let r = Poly::from_real(&[-1.0, 0.0, 1.0]).roots().unwrap();
        assert!(close(r[0], c(-1.0, 0.0), 1e-14) && close(r[1], c(1.0, 0.0), 1e-14));
    }

    #[test]
    fn roots_of_z2_plus_1() {
        let r = Poly::from_real(&[1.0, 0.0, 1.0]).roots().unwrap();
        assert!(close(r[0], c(0.0, -1.0), 1e-14) && close(r[1], c(0.0, 1.0), 1e-14));
    }

    #[test]
    fn roots_of_z3_plus_1() {
        let r = Poly::from_real(&[1.0, 0.0, 0.0, 1.0]).roots().unwrap();
        let s = 3f64.sqrt() / 2.0;
        assert!(close(r[0], c(-1.0, 0.0), 1e-13));
        assert!(close(r[1], c(0.5, -s), 1e-13));
        assert!(close(r[2], c(0.5, s), 1e-13));
    }

    #[test]
    fn repeated_root_is_found() {
        let r = Poly::from_real(&[1.0, -2.0, 1.0]).roots().unwrap();
        assert!(r.iter().all(|&z| close(z, c(1.0, 0.0), 1e-7)));
        assert_eq!(Poly::from_real(&[0.0, 0.0, 1.0]).roots().unwrap(), vec![c(0.0, 0.0); 2]);
    }

    #[test]
    fn constructor_checks() {
        assert_eq!(RationalFn::from_real(&[1.0], &[1.0]), Err(Error::ConstantNumerator));
        assert_eq!(RationalFn::from_real(&[1.0, 1.0], &[]), Err(Error::ZeroDenominator));
        assert!(matches!(
            RationalFn::from_real(&[0.0, 1.0], &[1.0, 0.0, 1.0]),
            Err(Error::DegreeMismatch { deg_p: 1, deg_q: 2 })
        ));
        assert!(matches!(
            RationalFn::from_real(&[-1.0, 0.0, 1.0], &[-1.0, 1.0]),
            Err(Error::NotCoprime { .. })
        ));
    }

    #[test]
    fn preimages_examples() {
        let w = z_plus_inv().preimages(c(2.5, 0.0), ROOT_TOL).unwrap();
        assert!(close(w[0], c(0.5, 0.0), 1e-14) && close(w[1], c(2.0, 0.0), 1e-14));

        let sq = RationalFn::polynomial(Poly::monomial(2)).unwrap();
        let w = sq.preimages(c(4.0, 0.0), ROOT_TOL).unwrap();
        assert!(close(w[0], c(-2.0, 0.0), 1e-14) && close(w[1], c(2.0, 0.0), 1e-14));

        let r = RationalFn::from_real(&[1.0, 0.0, 0.0, 1.0], &[0.0, 1.0]).unwrap();
        let w = r.preimages(c(0.0, 0.0), ROOT_TOL).unwrap();
        let s = 3f64.sqrt() / 2.0;
        assert!(close(w[0], c(-1.0, 0.0), 1e-13));
        assert!(close(w[1], c(0.5, -s), 1e-13) && close(w[2], c(0.5, s), 1e-13));
    }

    #[test]
    fn degenerate_alpha_at_infinity() {
        let r = RationalFn::from_real(&[1.0, 1.0], &[0.0, 1.0]).unwrap();
        assert!(matches!(r.preimages(c(1.0, 0.0), ROOT_TOL), Err(Error::DegenerateAlpha { .. })));
    }

    #[test]
    fn omega_membership() {
        let sq = RationalFn::polynomial(Poly::monomial(2)).unwrap();
        assert!(sq.in_omega(c(1.0, 0.0), OMEGA_SEP));
        assert!(!sq.in_omega(c(0.0, 0.0), OMEGA_SEP));
        assert!(!z_plus_inv().in_omega(c(2.0, 0.0), OMEGA_SEP));
    }

    #[test]
    fn partial_fractions_of_z_plus_inv() {
        let pf = z_plus_inv().partial_fraction(c(2.5, 0.0)).unwrap();
        assert_eq!(pf.constant_term, c(0.0, 0.0));
        assert!(close(pf.poles[0].0 .0, c(0.5, 0.0), 1e-14));
        assert!(close(pf.poles[0].1 .0, c(-1.0 / 3.0, 0.0), 1e-13));
        assert!(close(pf.poles[1].0 .0, c(2.0, 0.0), 1e-14));
        assert!(close(pf.poles[1].1 .0, c(4.0 / 3.0, 0.0), 1e-13));
        assert!(close(pf.eval(c(1.0, 0.0)), c(-2.0, 0.0), 1e-13));
    }

    #[test]
    fn partial_fractions_identity_and_constant() {
        let pf = RationalFn::identity().partial_fraction(c(0.0, 0.0)).unwrap();
        assert_eq!(pf.poles.len(), 1);
        assert!(close(pf.poles[0].1 .0, c(1.0, 0.0), 1e-15));

        let r = RationalFn::from_real(&[1.0, 1.0], &[0.0, 1.0]).unwrap();
        let pf = r.partial_fraction(c(3.0, 0.0)).unwrap();
        assert!(close(pf.constant_term, c(-0.5, 0.0), 1e-15));
        assert!(close(pf.poles[0].0 .0, c(0.5, 0.0), 1e-15));
        assert!(close(pf.poles[0].1 .0, c(-0.25, 0.0), 1e-14));
        assert!(close(pf.eval(c(1.0, 0.0)), c(-1.0, 0.0), 1e-14));
    }

    #[test]
    fn json_shapes() {
        let r = z_plus_inv();
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"p":[[1.0,0.0],[0.0,0.0],[1.0,0.0]],"q":[[0.0,0.0],[1.0,0.0]]}"#);
        let back: RationalFn = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        let plain: RationalFn = serde_json::from_str(r#"{"p":[0,1,0,1],"q":[1]}"#).unwrap();
        assert_eq!(plain.degree(), 3);
        assert!(serde_json::from_str::<RationalFn>(r#"{"p":[1],"q":[1]}"#).is_err());
    }

    #[test]
    fn blaschke_constructor() {
        let b = RationalFn::blaschke(&[c(0.0, 0.0), c(0.5, 0.0)]).unwrap();
        assert!(close(b.eval(c(0.5, 0.0)), c(0.0, 0.0), 1e-15));
        let z = C64::from_polar(1.0, 0.7);
        assert!((b.eval(z).norm() - 1.0).abs() < 1e-14);
        assert!(matches!(RationalFn::blaschke(&[c(1.5, 0.0)]), Err(Error::ZeroOutsideDisk { .. })));
        assert_eq!(RationalFn::blaschke(&[c(0.2, 0.0), c(0.2, 0.0)]), Err(Error::ZerosNotDistinct));
    }

    fn arb_c() -> impl Strategy<Value = C64> {
        (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| C64::new(a, b))
    }

    proptest! {
        #[test]
        fn roots_reconstruct_polynomial(roots in prop::collection::vec(arb_c(), 1..7), lead in arb_c()) {
            prop_assume!(lead.norm() > 0.1);
            prop_assume!(separation(&roots) > 1e-2);
            let p = Poly::from_roots(&roots, lead);
            let found = poly_roots(&p, ROOT_TOL).unwrap();
            prop_assert_eq!(found.len(), roots.len());
            let q = Poly::from_roots(&found, lead);
            for k in 0..5 {
                let z = C64::from_polar(0.5 + 0.4 * k as f64, 1.3 * k as f64);
                prop_assert!((p.eval(z) - q.eval(z)).norm() <= 1e-9 * (1.0 + p.abs_eval(z)));
            }
        }

        #[test]
        fn preimage_round_trip(alpha in arb_c()) {
            let r = RationalFn::from_real(&[1.0, 0.0, 0.0, 1.0], &[0.0, 1.0]).unwrap();
            if let Ok(w) = r.preimages(alpha, ROOT_TOL) {
                for z in w {
                    prop_assert!((r.eval(z) - alpha).norm() <= 1e-9 * (1.0 + alpha.norm()));
                }
            }
        }

        #[test]
        fn partial_fraction_reproduces_inverse(alpha in arb_c(), z in arb_c()) {
            let r = z_plus_inv();
            prop_assume!(r.in_omega(alpha, OMEGA_SEP));
            let pf = r.partial_fraction(alpha).unwrap();
            let fib = r.fiber(alpha).unwrap();
            prop_assume!(z.norm() > 1e-3 && fib.points.iter().all(|w| (z - w).norm() > 1e-3));
            let exact = 1.0 / (r.eval(z) - alpha);
            prop_assert!((exact - pf.eval(z)).norm() <= 1e-9 * (1.0 + exact.norm()));
        }
    }
}
