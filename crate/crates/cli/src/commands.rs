//! One function per subcommand. Each returns the JSON payload and whether
//! the computed residuals are within tolerance.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};
use shiftspace::cuntz::{CuntzFamily, QuadratureCuntz};
use shiftspace::json::{matrix_to_rows, JsonComplex};
use shiftspace::kernels::{self, Domain, FamilyKernel, InvariantSubspaceData, Kernel, KernelSpec};
use shiftspace::linalg;
use shiftspace::polyrat::{Poly, RationalFn};
use shiftspace::representation::{build_cover, decompose, kernel_transform, multipoint_interpolate, CoverPolicy, DecomposeOptions};
use shiftspace::resolvent::{apply_resolvent, check_resolvent_identity, AnalyticFn};
use shiftspace::statespace::StateBasis;
use shiftspace::symmat::{assoc_sym_matrix, default_alpha, factor_signature, SignatureMatrix};
use shiftspace::C64;

use crate::input::{self, CliError, CliResult, Entry, FnSpec};

pub struct Outcome {
    pub value: Value,
    pub passed: bool,
}

fn ok(value: Value) -> CliResult<Outcome> {
    Ok(Outcome { value, passed: true })
}

fn cx(z: C64) -> JsonComplex {
    JsonComplex(z)
}

fn cxs(v: &[C64]) -> Vec<JsonComplex> {
    v.iter().map(|&z| cx(z)).collect()
}

fn random_point(rng: &mut ChaCha8Rng, half_width: f64) -> C64 {
    C64::new(rng.random_range(-half_width..half_width), rng.random_range(-half_width..half_width))
}

pub fn roots(r: &str) -> CliResult<Outcome> {
    let r = input::rational(r)?;
    ok(json!({
        "r": r,
        "degree": r.degree(),
        "zeros": cxs(&r.zeros()?),
        "poles": cxs(&r.poles()?),
        "at_infinity": r.at_infinity().map(cx),
    }))
}

pub fn preimages(r: &str, alpha: &str) -> CliResult<Outcome> {
    let r = input::rational(r)?;
    let alpha = input::complex("alpha", alpha)?;
    let fiber = r.fiber(alpha)?;
    ok(json!({
        "alpha": cx(alpha),
        "points": cxs(&fiber.points),
        "r_prime": cxs(&fiber.r_prime),
        "in_omega": r.in_omega(alpha, 1e-6),
    }))
}

pub struct ResolventArgs<'a> {
    pub r: &'a str,
    pub f: &'a str,
    pub alpha: &'a str,
    pub beta: Option<&'a str>,
    pub points: Option<&'a str>,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
}

pub fn resolvent(a: ResolventArgs) -> CliResult<Outcome> {
    let r = input::rational(a.r)?;
    let spec: FnSpec = input::parse("f", a.f)?;
    let f = spec.build();
    let alpha = input::complex("alpha", a.alpha)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let points = match a.points {
        Some(p) => input::complex_list("points", p)?,
        None => (0..a.samples).map(|_| random_point(&mut rng, 2.0)).collect(),
    };
    let beta = match a.beta {
        Some(b) => input::complex("beta", b)?,
        None => loop {
            let b = alpha + random_point(&mut rng, 1.0);
            if r.in_omega(b, 1e-3) {
                break b;
            }
        },
    };
    let g = apply_resolvent(&r, f.clone(), alpha)?;
    let mut values = Vec::with_capacity(points.len());
    for &z in &points {
        values.push(cxs(&g.eval(z)?));
    }
    let residual = check_resolvent_identity(&r, f, alpha, beta, &points)?;
    Ok(Outcome {
        passed: residual.rel <= a.tolerance,
        value: json!({
            "alpha": cx(alpha),
            "beta": cx(beta),
            "preimages": cxs(g.preimages()),
            "points": cxs(&points),
            "values": values,
            "identity_residual": residual,
            "tolerance": a.tolerance,
        }),
    })
}

pub fn xmatrix(r: &str, j: &str, alpha: Option<&str>) -> CliResult<Outcome> {
    let r = input::rational(r)?;
    let j = input::signature(j)?;
    let alpha = match alpha {
        Some(a) => input::complex("alpha", a)?,
        None => default_alpha(&r)?,
    };
    let basis = StateBasis::canonical(&r)?;
    let x = assoc_sym_matrix(&basis, &j, alpha)?;
    let fact = factor_signature(&x.x)?;
    let mut v = serde_json::to_value(&x).map_err(|e| CliError::Io(e.to_string()))?;
    let extra = serde_json::to_value(&fact).map_err(|e| CliError::Io(e.to_string()))?;
    if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
        if let Some(x) = m.remove("x") {
            m.insert("X".into(), x);
        }
        m.extend(e);
    }
    ok(v)
}

pub fn decompose_cmd(r: &str, f: &str, nodes: usize, taylor_order: usize, tolerance: f64) -> CliResult<Outcome> {
    let r = input::rational(r)?;
    let spec: FnSpec = input::parse("f", f)?;
    if nodes < 8 || nodes % 2 != 0 {
        return Err(CliError::Usage(format!("--nodes must be even and at least 8, got {nodes}")));
    }
    let basis = StateBasis::canonical(&r)?;
    let cover = build_cover(&r, &CoverPolicy::default())?;
    let opts = DecomposeOptions { quad_nodes: nodes, taylor_order, ..DecomposeOptions::default() };
    let res = decompose(&basis, spec.build(), &cover, &opts)?;
    let taylor: Vec<Vec<JsonComplex>> = res.taylor_coefficients().iter().map(|c| cxs(c)).collect();
    Ok(Outcome {
        passed: res.roundtrip_ok(tolerance),
        value: json!({
            "r": r,
            "center": cx(basis.center()),
            "rho": res.rho(),
            "taylor": taylor,
            "roundtrip_error": res.roundtrip_error,
            "f_scale": res.f_scale,
            "halving_discrepancy": res.halving_discrepancy,
            "cover": res.cover(),
            "tolerance": tolerance,
        }),
    })
}

pub fn cuntz_check(r: &str, degree: usize, nodes: usize, tolerance: Option<f64>) -> CliResult<Outcome> {
    let r = input::rational(r)?;
    let (path, report, tol) = if r.q().degree() == 0 {
        ("polynomial", CuntzFamily::polynomial(&r, degree)?.verify(), tolerance.unwrap_or(1e-12))
    } else {
        let opts = DecomposeOptions { quad_nodes: nodes, taylor_order: degree.max(8), ..DecomposeOptions::default() };
        ("quadrature", QuadratureCuntz::new(&r, opts)?.verify(degree)?, tolerance.unwrap_or(1e-7))
    };
    Ok(Outcome {
        passed: report.completeness <= tol && report.orthogonality <= tol,
        value: json!({ "r": r, "path": path, "report": report, "tolerance": tol }),
    })
}

type Rows = Vec<Vec<JsonComplex>>;

/// Parameters of the `kernel` subcommand's families.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyParams {
    /// Block size `p`; ignored for `invariant`.
    block: Option<usize>,
    #[serde(rename = "X")]
    x: Option<Rows>,
    theta: Option<Vec<Vec<Entry>>>,
    s: Option<Vec<Vec<Entry>>>,
    e_plus: Option<Vec<Vec<Entry>>>,
    e_minus: Option<Vec<Vec<Entry>>>,
    j_plus: Option<Rows>,
    j_minus: Option<Rows>,
    domain: Option<Domain>,
    n: Option<Vec<Vec<Entry>>>,
    #[serde(rename = "C")]
    c: Option<Rows>,
    #[serde(rename = "A")]
    a: Option<Rows>,
    #[serde(rename = "B")]
    b: Option<Rows>,
    #[serde(rename = "P")]
    p: Option<Rows>,
    #[serde(rename = "J")]
    j: Option<Rows>,
}

fn need<T>(family: &str, name: &str, v: Option<T>) -> CliResult<T> {
    v.ok_or_else(|| CliError::Usage(format!("--input: family {family} needs \"{name}\"")))
}

fn build_spec(family: &str, params: FamilyParams, np: usize) -> CliResult<(KernelSpec, Domain)> {
    let x = match params.x {
        Some(x) => input::value_matrix("X", x)?,
        None => linalg::identity(np),
    };
    let rm = |name: &str, v| input::rational_matrix(name, v);
    Ok(match family {
        "invariant" => {
            let c = input::value_matrix("C", need(family, "C", params.c)?)?;
            let a = input::value_matrix("A", need(family, "A", params.a)?)?;
            let b = input::value_matrix("B", need(family, "B", params.b)?)?;
            let p = match params.p {
                Some(p) => input::value_matrix("P", p)?,
                None => {
                    let j = match params.j {
                        Some(j) => input::value_matrix("J", j)?,
                        None => linalg::identity(c.nrows()),
                    };
                    kernels::solve_stein(&a, &b, &c, &j)?
                }
            };
            (KernelSpec::Invariant(InvariantSubspaceData::new(c, a, b, p)?), Domain::Circle)
        }
        "theta-line" => (KernelSpec::ThetaLine { x, theta: rm("theta", need(family, "theta", params.theta)?)? }, Domain::Line),
        "theta-circle" => (KernelSpec::ThetaCircle { x, theta: rm("theta", need(family, "theta", params.theta)?)? }, Domain::Circle),
        "s" => (KernelSpec::S { x, s: rm("s", need(family, "s", params.s)?)? }, Domain::Circle),
        "epm" => {
            let domain = params.domain.unwrap_or(Domain::Line);
            let one = || vec![vec![JsonComplex(C64::new(1.0, 0.0))]];
            let spec = KernelSpec::EPlusMinus {
                e_plus: rm("e_plus", need(family, "e_plus", params.e_plus)?)?,
                e_minus: rm("e_minus", need(family, "e_minus", params.e_minus)?)?,
                j_plus: input::value_matrix("j_plus", params.j_plus.unwrap_or_else(one))?,
                j_minus: input::value_matrix("j_minus", params.j_minus.unwrap_or_else(one))?,
                domain,
            };
            (spec, domain)
        }
        "nev" => (KernelSpec::Nevanlinna { n: rm("n", need(family, "n", params.n)?)? }, Domain::Line),
        "hardy" => (KernelSpec::HardyCircle { x }, Domain::Circle),
        "hardy-line" => (KernelSpec::HardyLine, Domain::Line),
        other => {
            return Err(CliError::Usage(format!(
                "--family: unknown family {other} (expected invariant, theta-line, theta-circle, s, epm, nev, hardy, hardy-line)"
            )))
        }
    })
}

/// Ten points with `Im r > 0` (line families) or `|r| < 0.9` (circle families).
pub fn default_grid(r: &RationalFn, domain: Domain) -> Vec<C64> {
    let mut out = Vec::new();
    for k in 0..2000 {
        if out.len() == 10 {
            break;
        }
        let z = C64::from_polar(0.3 + 0.13 * (k % 11) as f64, 0.05 + 0.61 * k as f64);
        let Ok(v) = r.try_eval(z) else { continue };
        let good = match domain {
            Domain::Line => v.im > 0.05,
            Domain::Circle => v.norm() < 0.9,
        };
        if good {
            out.push(z);
        }
    }
    out
}

pub fn kernel(r: &str, family: &str, grid: Option<&str>, params: Option<&str>, tolerance: f64) -> CliResult<Outcome> {
    let r = input::rational(r)?;
    let basis = StateBasis::canonical(&r)?;
    let params: FamilyParams = match params {
        Some(p) => input::parse("input", p)?,
        None => FamilyParams::default(),
    };
    let block = match (&params.c, family) {
        (Some(c), "invariant") => {
            if c.len() % basis.dim() != 0 {
                return Err(CliError::Usage(format!("--input: C needs a multiple of N = {} rows", basis.dim())));
            }
            c.len() / basis.dim()
        }
        _ => params.block.unwrap_or(1),
    };
    if block == 0 {
        return Err(CliError::Usage("--input: block must be positive".into()));
    }
    let (spec, domain) = build_spec(family, params, basis.dim() * block)?;
    let k = FamilyKernel::new(&basis, block, spec)?;
    let grid = match grid {
        Some(g) => input::complex_list("grid", g)?,
        None => default_grid(&r, domain),
    };
    let g = kernels::gram_matrix(&k, &grid)?;
    let (eigs, _) = linalg::hermitian_eigen(&g);
    let defect = kernels::hermitian_swap_defect(&k, &grid)?;
    let scale = linalg::norm_inf(&g);
    Ok(Outcome {
        passed: defect <= tolerance * (1.0 + scale),
        value: json!({
            "family": family,
            "r": r,
            "block": k.dim(),
            "grid": cxs(&grid),
            "gram": matrix_to_rows(&g),
            "eigenvalues": eigs,
            "min_eigenvalue": eigs.first(),
            "negative_squares": kernels::negative_squares(&g, 1e-10),
            "hermitian_defect": defect,
            "tolerance": tolerance,
        }),
    })
}

#[derive(Debug, Deserialize)]
pub struct SteinInput {
    #[serde(rename = "A")]
    a: Rows,
    #[serde(rename = "B")]
    b: Rows,
    #[serde(rename = "C")]
    c: Rows,
    #[serde(rename = "J")]
    j: Option<Rows>,
}

pub fn stein(raw: &str, tolerance: f64) -> CliResult<Outcome> {
    let inp: SteinInput = input::parse("input", raw)?;
    let a = input::value_matrix("A", inp.a)?;
    let b = input::value_matrix("B", inp.b)?;
    let c = input::value_matrix("C", inp.c)?;
    let j = match inp.j {
        Some(j) => input::value_matrix("J", j)?,
        None => linalg::identity(c.nrows()),
    };
    let p = kernels::solve_stein(&a, &b, &c, &j)?;
    let residual = kernels::stein_residual(&a, &b, &c, &j, &p);
    let (eigs, _) = linalg::hermitian_eigen(&p);
    Ok(Outcome {
        passed: residual <= tolerance * (1.0 + linalg::norm_inf(&p)),
        value: json!({
            "A": matrix_to_rows(&a),
            "B": matrix_to_rows(&b),
            "C": matrix_to_rows(&c),
            "J": matrix_to_rows(&j),
            "P": matrix_to_rows(&p),
            "P_eigenvalues": eigs,
            "residual": residual,
            "tolerance": tolerance,
        }),
    })
}

pub struct InterpArgs<'a> {
    pub r: &'a str,
    pub alpha: Option<&'a str>,
    pub w: Option<&'a str>,
    pub c: Option<&'a str>,
    pub gamma: &'a str,
    pub kernel: &'a str,
    pub tolerance: f64,
}

pub fn interp(a: InterpArgs) -> CliResult<Outcome> {
    let r = input::rational(a.r)?;
    let basis = StateBasis::canonical(&r)?;
    let w = match (a.w, a.alpha) {
        (Some(w), _) => input::complex_list("w", w)?,
        (None, Some(al)) => r.fiber(input::complex("alpha", al)?)?.points,
        (None, None) => return Err(CliError::Usage("one of --w or --alpha is required".into())),
    };
    let c = match a.c {
        Some(c) => input::complex_list("c", c)?,
        None => vec![C64::new(1.0, 0.0); w.len()],
    };
    let gamma = input::complex_list("gamma", a.gamma)?;
    let p = gamma.len();
    let n = basis.dim();
    let k0: Arc<dyn Kernel> = match a.kernel {
        "exponential" => Arc::new(kernels::exponential(n * p)),
        "szego" => Arc::new(kernels::szego(n * p)),
        other => return Err(CliError::Usage(format!("--kernel: unknown kernel {other} (expected exponential or szego)"))),
    };
    let sol = multipoint_interpolate(&basis, k0.clone(), &c, &w, &gamma)?;
    let transformed = kernel_transform(k0, &basis)?;
    let gscale = gamma.iter().map(|g| g.norm()).fold(0.0, f64::max);
    let values: Vec<Vec<JsonComplex>> = w.iter().map(|&z| sol.f.eval(z).map(|v| cxs(&v))).collect::<Result<_, _>>()?;
    Ok(Outcome {
        passed: sol.constraint_residual <= a.tolerance * (1.0 + gscale),
        value: json!({
            "alpha": cx(sol.alpha),
            "w": cxs(&w),
            "c": cxs(&c),
            "gamma": cxs(&gamma),
            "f_at_w": values,
            "value_at_alpha": cxs(&sol.value_at_alpha),
            "projector": matrix_to_rows(&sol.projector),
            "transformed_kernel_dim": transformed.dim(),
            "constraint_residual": sol.constraint_residual,
            "orthogonality_residual": sol.orthogonality_residual,
            "tolerance": a.tolerance,
        }),
    })
}

fn golden(r: RationalFn, want: DMatrix<f64>, tol: f64) -> CliResult<(bool, f64)> {
    let basis = StateBasis::canonical(&r)?;
    let alpha = default_alpha(&r)?;
    let x = assoc_sym_matrix(&basis, &SignatureMatrix::identity(1), alpha)?.x;
    let err = if x.shape() == want.shape() { linalg::norm_inf_real(&(x - want)) } else { f64::INFINITY };
    Ok((err <= tol, err))
}

/// `z^N + 1/z` has the antidiagonal `X` with `−1` in the last corner.
pub fn zn_plus_inverse(n: usize) -> (RationalFn, DMatrix<f64>) {
    let mut p = vec![0.0; n + 2];
    p[0] = 1.0;
    p[n + 1] = 1.0;
    let r = RationalFn::new(Poly::from_real(&p), Poly::from_real(&[0.0, 1.0])).expect("coprime");
    let mut x = DMatrix::zeros(n + 1, n + 1);
    for k in 0..n {
        x[(k, n - 1 - k)] = 1.0;
    }
    x[(n, n)] = -1.0;
    (r, x)
}

pub fn golden_examples(tolerance: f64) -> CliResult<(Vec<String>, bool)> {
    let mut cases = vec![
        ("z+1/z".to_string(), RationalFn::from_real(&[1.0, 0.0, 1.0], &[0.0, 1.0])?, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0])),
        (
            "z^2+1/z".to_string(),
            RationalFn::from_real(&[1.0, 0.0, 0.0, 1.0], &[0.0, 1.0])?,
            DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, -1.0]),
        ),
    ];
    for n in 2..=5 {
        let (r, x) = zn_plus_inverse(n);
        cases.push((format!("z^{n}+1/z"), r, x));
    }
    let mut lines = Vec::new();
    let mut all = true;
    for (name, r, want) in cases {
        let (pass, err) = golden(r, want, tolerance)?;
        all &= pass;
        lines.push(format!("{} xmatrix {name} (error {err:.2e})", if pass { "PASS" } else { "FAIL" }));
    }
    Ok((lines, all))
}
