use bandlattice::field::SampledField;
use bandlattice::io::{read_field, write_field};
use bandlattice::random::{random_test_function, seeded};
use bandlattice::sampling::{integrate_product, reconstruct, resample, sample, TestFunction};
use bandlattice::{Boundary, Complex64, Lattice};
use proptest::prelude::*;
use rand::Rng;

fn max_reconstruction_error(f: &TestFunction, lattice: &Lattice, points: usize, seed: u64) -> f64 {
    let samples = sample(f, lattice).unwrap();
    let mut rng = seeded(seed);
    (0..points)
        .map(|_| {
            let x = lattice.offset() + rng.gen_range(0.0..lattice.circumference());
            (reconstruct(&samples, x) - f.eval(lattice, x)).norm()
        })
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn periodic_reconstruction_is_exact(seed in any::<u64>(), terms in 1usize..6, offset in 0.0..0.5f64) {
        let lat = Lattice::new(0.5, offset, 257, Boundary::Periodic).unwrap();
        let f = random_test_function(&lat, 0.9, terms, &mut seeded(seed));
        prop_assert!(max_reconstruction_error(&f, &lat, 200, seed ^ 1) < 1e-9);
    }

    #[test]
    fn kronecker_property_holds_bitwise(seed in any::<u64>(), offset in 0.0..1.0f64, n in 3usize..40) {
        let lat = Lattice::new(1.0, offset, n, Boundary::Periodic).unwrap();
        let mut rng = seeded(seed);
        let f = SampledField::from_fn(lat, |_| rng.gen_range(-1.0..1.0));
        for j in 0..n {
            prop_assert_eq!(reconstruct(&f, lat.point(j as isize)), f.values()[j]);
        }
    }

    #[test]
    fn reconstruction_is_linear(seed in any::<u64>(), alpha in -3.0..3.0f64, beta in -3.0..3.0f64, x in 0.0..31.0f64) {
        let lat = Lattice::periodic(1.0, 31).unwrap();
        let mut rng = seeded(seed);
        let f = SampledField::from_fn(lat, |_| rng.gen_range(-1.0..1.0));
        let g = SampledField::from_fn(lat, |_| rng.gen_range(-1.0..1.0));
        let combo = f.scale(alpha).try_add(&g.scale(beta)).unwrap();
        let lhs = reconstruct(&combo, x);
        let rhs = alpha * reconstruct(&f, x) + beta * reconstruct(&g, x);
        prop_assert!((lhs - rhs).abs() < 1e-13);
    }

    #[test]
    fn offset_round_trip(seed in any::<u64>(), b in 0.0..1.0f64, b2 in 0.0..1.0f64) {
        let lat = Lattice::new(1.0, b, 65, Boundary::Periodic).unwrap();
        let f = sample(&random_test_function(&lat, 0.95, 5, &mut seeded(seed)), &lat).unwrap();
        let back = resample(&resample(&f, b2).unwrap(), b).unwrap();
        prop_assert!(back.max_abs_diff(&f) < 1e-10);
    }

    #[test]
    fn oversampled_reconstruction_agrees(seed in any::<u64>()) {
        let lat = Lattice::periodic(1.0, 129).unwrap();
        let f = random_test_function(&lat, 0.9, 4, &mut seeded(seed));
        let coarse = sample(&f, &lat).unwrap();
        let fine_lat = lat.refined(2).unwrap();
        let fine = sample(&f, &fine_lat).unwrap();
        let mut rng = seeded(seed.wrapping_add(9));
        for _ in 0..100 {
            let x = rng.gen_range(0.0..lat.circumference());
            prop_assert!((reconstruct(&coarse, x) - reconstruct(&fine, x)).norm() < 1e-9);
        }
    }
}

#[test]
fn truncated_interior_reconstruction() {
    // Truncation error falls off like 1/N for a pulse centred in the lattice.
    let pulse_error = |n: usize| {
        let lat = Lattice::truncated(1.0, n).unwrap();
        let c = n as f64 / 2.0 + 0.3;
        let f = TestFunction::SincPulse { center: c };
        let samples = sample(&f, &lat).unwrap();
        [c - 50.0, c - 0.4, c + 40.0]
            .iter()
            .map(|&x| (reconstruct(&samples, x) - f.eval(&lat, x)).norm())
            .fold(0.0, f64::max)
    };
    let coarse = pulse_error(400);
    let fine = pulse_error(1600);
    assert!(coarse < 2e-3, "{coarse}");
    assert!(coarse / fine > 3.0, "{coarse} vs {fine}");
}

#[test]
fn half_step_resample_of_delta() {
    let lat = Lattice::periodic(1.0, 15).unwrap();
    let delta = SampledField::kronecker(lat, 0, 1.0);
    let half = resample(&delta, 0.5).unwrap();
    // Direct evaluation of the wrapped kernel at k + 1/2.
    for (k, v) in half.values().iter().enumerate() {
        let u = k as f64 + 0.5;
        let expected =
            (std::f64::consts::PI * u).sin() / (15.0 * (std::f64::consts::PI * u / 15.0).sin());
        assert!((v - expected).abs() < 1e-14);
    }
}

#[test]
fn integral_of_plane_wave_norm() {
    let lat = Lattice::new(0.25, 0.1, 41, Boundary::Periodic).unwrap();
    let f = sample(&TestFunction::plane_wave(lat.momentum(7)), &lat).unwrap();
    let v = integrate_product(&f, &f).unwrap();
    assert!((v - Complex64::new(41.0 * 0.25, 0.0)).norm() < 1e-12);
}

#[test]
fn field_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let lat = Lattice::new(0.5, 0.2, 9, Boundary::Periodic).unwrap();
    let f = sample(&TestFunction::plane_wave(lat.momentum(2)), &lat).unwrap();
    let path = dir.path().join("field.csv");
    write_field(&path, &f).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("j,x,value_re,value_im\n"));
    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("field.json")).unwrap())
            .unwrap();
    assert_eq!(sidecar["n"], 9);
    assert_eq!(sidecar["boundary"], "periodic");
    assert_eq!(read_field(&path).unwrap(), f);
}
