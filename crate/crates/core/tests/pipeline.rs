use std::sync::Arc;

use nalgebra::DMatrix;
use shiftspace::kernels::{gram_matrix, gram_spectrum, FamilyKernel, KernelSpec};
use shiftspace::linalg;
use shiftspace::polyrat::{Poly, RationalFn};
use shiftspace::representation::{build_cover, decompose, CoverPolicy, DecomposeOptions};
use shiftspace::resolvent::{apply_resolvent, AnalyticFn, ClosureFn};
use shiftspace::statespace::StateBasis;
use shiftspace::symmat::{assoc_sym_matrix, default_alpha, factor_signature, SignatureMatrix};
use shiftspace::{c64, C64};

#[test]
fn x_factorization_reassembles() {
    let r = RationalFn::from_real(&[1.0, 0.0, 0.0, 1.0], &[0.0, 1.0]).unwrap();
    let basis = StateBasis::canonical(&r).unwrap();
    let x = assoc_sym_matrix(&basis, &SignatureMatrix::identity(1), default_alpha(&r).unwrap()).unwrap().x;
    let f = factor_signature(&x).unwrap();
    let back = f.y.transpose() * f.j0.matrix() * &f.y;
    assert!(linalg::norm_inf_real(&(back - x)) < 1e-12);
    assert_eq!(f.j0.negative_count(), 2);
}

#[test]
fn decomposition_feeds_resolvent() {
    let r = RationalFn::from_real(&[1.0, 0.0, 1.0], &[0.0, 1.0]).unwrap();
    let basis = StateBasis::canonical(&r).unwrap();
    let cover = build_cover(&r, &CoverPolicy::default()).unwrap();
    let f = Arc::new(Poly::from_real(&[1.0, -1.0, 0.0, 2.0]));
    let res = Arc::new(decompose(&basis, f.clone(), &cover, &DecomposeOptions::default()).unwrap());
    let rebuilt = {
        let res = res.clone();
        Arc::new(ClosureFn::new(1, move |z| res.reconstruct(z).unwrap()))
    };
    let alpha = c64(0.2, 0.1);
    let direct = apply_resolvent(&r, f, alpha).unwrap();
    let via = apply_resolvent(&r, rebuilt, alpha).unwrap();
    for z in res.validation_points.iter().take(20) {
        let (a, b) = (direct.eval(*z).unwrap(), via.eval(*z).unwrap());
        assert!((a[0] - b[0]).norm() < 1e-6 * (1.0 + a[0].norm()), "at {z}");
    }
}

#[test]
fn hardy_circle_with_x_inverse_is_positive_for_blaschke() {
    let zeros = [c64(0.3, 0.1), c64(-0.4, 0.2)];
    let basis = StateBasis::blaschke(&zeros).unwrap();
    let x = DMatrix::from_fn(2, 2, |i, j| 1.0 / (1.0 - zeros[i].conj() * zeros[j]));
    let k = FamilyKernel::new(&basis, 1, KernelSpec::HardyCircle { x }).unwrap();
    let grid: Vec<C64> = (0..8).map(|k| C64::from_polar(0.2 + 0.05 * k as f64, 0.9 * k as f64)).collect();
    let (low, defect) = gram_spectrum(&gram_matrix(&k, &grid).unwrap());
    assert!(low > -1e-10 && defect < 1e-12);
}
