use iterint::checks::{run_check, CheckOptions, Suite};
use iterint::quadrature::QuadratureOptions;
use iterint::shuffle::Word;
use iterint::surface::{FormBasis, Pairing, SurfaceConfig};
use iterint::variation::{fd_variation, genus0_variation_rhs, genus0_variation_simplified, VariationRequest};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn central_difference_error_is_second_order() {
    let s = SurfaceConfig::sphere(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.3, 1.1), c(-0.7, 0.6)]).unwrap();
    let basis = FormBasis::standard(s, Pairing::Star).unwrap();
    let req = VariationRequest::new(basis, Word::from_indices(&[1, 3, 2]), 2, c(0.5, -0.4), c(0.1, 0.45)).unwrap();
    let opts = QuadratureOptions::default();
    let exact = genus0_variation_rhs(&req, &opts).unwrap();
    assert!((exact - genus0_variation_simplified(&req, &opts).unwrap()).norm() < 1e-12 * exact.norm());
    let err = |h: f64| (fd_variation(&req, h, &opts).unwrap() - exact).norm();
    let ratio = err(0.02) / err(0.01);
    assert!((ratio - 4.0).abs() < 0.2, "{ratio}");
}

#[test]
fn seeded_configurations_both_genera() {
    for genus in [0, 1] {
        let opts = CheckOptions {
            genus,
            seed: 99,
            ..CheckOptions::default()
        };
        let r = run_check(Suite::Variation, &opts).unwrap();
        assert_eq!(r.cases.len(), 10);
        assert!(r.pass, "{r:?}");
    }
}
