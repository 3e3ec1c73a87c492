use proptest::prelude::*;
use qspectra_core::bell::{
    bell_recurrence, faa_di_bruno, p_coefficient, product_expansion, product_expansion_exact, q_coefficient, ZeroVector,
};
use qspectra_core::multipartite::{beta_series, gf_specialized, Convention, Kind};
use qspectra_core::scalar::{c, real};
use qspectra_core::series::{series_compose_power, series_exp, series_inv, series_log, series_mul};
use qspectra_core::{Error, Scalar, TruncatedSeries};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q_series(order: u32, coeffs: &[f64]) -> TruncatedSeries {
    TruncatedSeries::from_terms(&["q"], order, coeffs.iter().enumerate().map(|(i, &v)| (vec![i as u32], real(v)))).unwrap()
}

#[test]
fn multiplication_examples() {
    let a = q_series(2, &[1.0, 1.0]);
    let b = q_series(2, &[1.0, -1.0]);
    assert!(series_mul(&a, &b).unwrap().max_abs_diff(&q_series(2, &[1.0, 0.0, -1.0])).unwrap() == 0.0);

    let geo = q_series(5, &[1.0; 6]);
    let tele = series_mul(&geo, &q_series(5, &[1.0, -1.0])).unwrap();
    assert_eq!(tele.max_abs_diff(&q_series(5, &[1.0])).unwrap(), 0.0);

    let x1 = TruncatedSeries::from_terms(&["x1", "x2"], 2, [(vec![0, 0], real(1.0)), (vec![1, 0], real(1.0))]).unwrap();
    let x2 = TruncatedSeries::from_terms(&["x1", "x2"], 2, [(vec![0, 0], real(1.0)), (vec![0, 1], real(1.0))]).unwrap();
    let p = series_mul(&x1, &x2).unwrap();
    for (e, v) in [([0, 0], 1.0), ([1, 0], 1.0), ([0, 1], 1.0), ([1, 1], 1.0), ([2, 0], 0.0)] {
        assert_eq!(p.coeff(&e), real(v));
    }
}

#[test]
fn transcendental_examples() {
    let q = q_series(3, &[0.0, 1.0]);
    let e = series_exp(&q).unwrap();
    assert!(e.max_abs_diff(&q_series(3, &[1.0, 1.0, 0.5, 1.0 / 6.0])).unwrap() < 1e-15);
    let (l, c0) = series_log(&q_series(3, &[1.0, -1.0])).unwrap();
    assert_eq!(c0, real(0.0));
    assert!(l.max_abs_diff(&q_series(3, &[0.0, -1.0, -0.5, -1.0 / 3.0])).unwrap() < 1e-15);
    let inv = series_inv(&q_series(4, &[1.0, -1.0])).unwrap();
    assert!(inv.max_abs_diff(&q_series(4, &[1.0; 5])).unwrap() < 1e-15);
}

#[test]
fn transcendental_errors() {
    assert!(matches!(series_exp(&q_series(3, &[1.0, 1.0])), Err(Error::NonZeroConstant(_))));
    assert!(matches!(series_log(&q_series(3, &[0.0, 1.0])), Err(Error::ZeroConstant(_))));
    assert!(matches!(series_inv(&q_series(3, &[0.0, 1.0])), Err(Error::ZeroConstant(_))));
    let other = TruncatedSeries::one(&["p"], 3).unwrap();
    assert!(matches!(series_mul(&q_series(3, &[1.0]), &other), Err(Error::VariableMismatch { .. })));
    assert!(matches!(series_mul(&q_series(3, &[1.0]), &q_series(4, &[1.0])), Err(Error::OrderMismatch { .. })));
}

#[test]
fn adams_substitution() {
    assert_eq!(series_compose_power(&q_series(4, &[1.0, 1.0]), 2).unwrap().max_abs_diff(&q_series(4, &[1.0, 0.0, 1.0])).unwrap(), 0.0);
    let a = q_series(6, &[0.0, 1.0, 1.0]);
    let expect = q_series(6, &[0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0]);
    assert_eq!(series_compose_power(&a, 3).unwrap().max_abs_diff(&expect).unwrap(), 0.0);
    let p1 = TruncatedSeries::from_terms(&["x1", "x2"], 4, [(vec![1, 0], real(1.0)), (vec![0, 1], real(1.0))]).unwrap();
    let p2 = series_compose_power(&p1, 2).unwrap();
    assert_eq!(p2.coeff(&[2, 0]), real(1.0));
    assert_eq!(p2.coeff(&[0, 2]), real(1.0));
    assert_eq!(p2.coeff(&[1, 0]), real(0.0));
}

fn arb_series(vars: usize, order: u32, constant: Option<f64>) -> impl Strategy<Value = TruncatedSeries> {
    let names: Vec<String> = (0..vars).map(|i| format!("x{i}")).collect();
    let len = TruncatedSeries::zero_in(names.clone(), order).unwrap().coefficients().len();
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len).prop_map(move |v| {
        let mut s = TruncatedSeries::zero_in(names.clone(), order).unwrap();
        let exps: Vec<Vec<u32>> = s.terms().map(|(e, _)| e.to_vec()).collect();
        for (e, (re, im)) in exps.iter().zip(v) {
            s.set_coeff(e, c(re, im)).unwrap();
        }
        if let Some(c0) = constant {
            s.set_coeff(&vec![0; names.len()], real(c0)).unwrap();
        }
        s
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exp_log_round_trips(a in arb_series(2, 8, Some(0.0))) {
        let back = series_log(&series_exp(&a).unwrap()).unwrap().0;
        prop_assert!(back.max_rel_diff(&a).unwrap() < 1e-12);
        let b = a.clone() + a.one_like();
        let again = series_exp(&series_log(&b).unwrap().0).unwrap();
        let scale = b.coefficients().iter().map(|v| v.norm()).fold(1.0, f64::max);
        prop_assert!(again.max_abs_diff(&b).unwrap() < 1e-12 * scale.powi(8));
    }

    #[test]
    fn inverse_is_inverse(a in arb_series(3, 5, Some(1.5))) {
        let prod = series_mul(&a, &series_inv(&a).unwrap()).unwrap();
        prop_assert!(prod.max_abs_diff(&a.one_like()).unwrap() < 1e-10);
    }

    #[test]
    fn ring_laws(a in arb_series(2, 6, None), b in arb_series(2, 6, None), cc in arb_series(2, 6, None)) {
        let left = (&(&a + &b) + &cc).max_abs_diff(&(&a + &(&b + &cc))).unwrap();
        prop_assert!(left < 1e-13);
        let dist = (&a * &(&b + &cc)).max_abs_diff(&(&(&a * &b) + &(&a * &cc))).unwrap();
        prop_assert!(dist < 1e-13);
        let comm = (&a * &b).max_abs_diff(&(&b * &a)).unwrap();
        prop_assert!(comm < 1e-13);
    }

    #[test]
    fn truncation_commutes(a in arb_series(2, 7, Some(1.0)), b in arb_series(2, 7, Some(0.5)), m in 1u32..7) {
        let high = series_mul(&a, &b).unwrap().restrict(m).unwrap();
        let low = series_mul(&a.restrict(m).unwrap(), &b.restrict(m).unwrap()).unwrap();
        prop_assert!(high.max_abs_diff(&low).unwrap() < 1e-13);
        let inv_high = series_inv(&a).unwrap().restrict(m).unwrap();
        let inv_low = series_inv(&a.restrict(m).unwrap()).unwrap();
        prop_assert!(inv_high.max_abs_diff(&inv_low).unwrap() < 1e-12);
    }
}

fn random_complex(rng: &mut ChaCha8Rng, n: usize) -> Vec<Scalar> {
    (0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

#[test]
fn recurrence_matches_explicit_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let g = random_complex(&mut rng, 12);
        let y = bell_recurrence(&g, 12).unwrap();
        for n in 1..=12 {
            let f = faa_di_bruno(&g, n).unwrap();
            assert!((y[n] - f).norm() <= 1e-9 * f.norm().max(1.0), "n = {n}");
        }
    }
}

#[test]
fn bell_generating_function() {
    // sum Y_n z^n / n! = exp(sum g_n z^n / n!)
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let g = random_complex(&mut rng, 12);
    let y = bell_recurrence(&g, 12).unwrap();
    let mut arg = TruncatedSeries::zero(&["z"], 12).unwrap();
    let mut fact = 1.0;
    for (n, gn) in g.iter().enumerate() {
        fact *= (n + 1) as f64;
        arg.add_term(&[n as u32 + 1], gn / fact).unwrap();
    }
    let e = series_exp(&arg).unwrap();
    let mut fact = 1.0;
    for (n, yn) in y.iter().enumerate() {
        if n > 0 {
            fact *= n as f64;
        }
        assert!((e.coeff(&[n as u32]) - yn / fact).norm() < 1e-12);
    }
}

#[test]
fn bell_over_series_ring() {
    let b1 = beta_series(1, 2, 8, Convention::Diagonal).unwrap();
    let b2 = beta_series(2, 2, 8, Convention::Diagonal).unwrap();
    let y = bell_recurrence(&[b1.clone(), b2.clone()], 2).unwrap();
    let f = faa_di_bruno(&[b1.clone(), b2.clone()], 2).unwrap();
    assert!(y[2].max_abs_diff(&f).unwrap() < 1e-12);
}

#[test]
fn example_second_coefficient() {
    for m in 1..=3 {
        for conv in [Convention::Diagonal, Convention::DistinctPowers] {
            let p2 = p_coefficient(2, m, 10, conv, ZeroVector::Included).unwrap();
            let b1 = beta_series(1, m, 10, conv).unwrap();
            let b2 = beta_series(2, m, 10, conv).unwrap();
            let rhs = &(&b1 * &b1) + &b2;
            assert!(p2.scale_real(2.0).max_abs_diff(&rhs).unwrap() < 1e-10, "m = {m}");
        }
    }
}

/// Coefficient of `z^j` in the direct product, as a series in `q` at order
/// `order - j`, compared to the restricted extraction.
#[test]
fn coefficients_match_direct_expansion() {
    let order = 12;
    for m in 1..=3 {
        for conv in [Convention::Diagonal, Convention::DistinctPowers] {
            let f = gf_specialized(None, m, order, Kind::Unrestricted, conv, 1e-9).unwrap().direct;
            let g = gf_specialized(None, m, order, Kind::Distinct, conv, 1e-9).unwrap().direct;
            for j in 1..=6u32 {
                let top = order - j;
                let fj = f.coefficient_of(0, j).unwrap();
                let gj = g.coefficient_of(0, j).unwrap();
                let pj = p_coefficient(j as usize, m, order, conv, ZeroVector::Excluded).unwrap().restrict(top).unwrap();
                let qj = q_coefficient(j as usize, m, order, conv, ZeroVector::Excluded).unwrap().restrict(top).unwrap();
                assert!(pj.max_rel_diff(&fj).unwrap() < 1e-8, "P m={m} j={j}");
                assert!(qj.max_rel_diff(&gj).unwrap() < 1e-8, "Q m={m} j={j}");
            }
        }
    }
}

/// With the zero vector included the coefficients are those of
/// `(1 - z)^{-1} F` and `(1 + z) G`.
#[test]
fn included_zero_vector_reading() {
    let order = 10;
    let m = 2;
    let conv = Convention::Diagonal;
    let f = gf_specialized(None, m, order, Kind::Unrestricted, conv, 1e-9).unwrap().direct;
    let g = gf_specialized(None, m, order, Kind::Distinct, conv, 1e-9).unwrap().direct;
    let mut geo = f.one_like();
    geo.mul_geometric(&[1, 0], real(1.0)).unwrap();
    let mut lin = g.one_like();
    lin.mul_binomial(&[1, 0], real(1.0)).unwrap();
    let fz = &geo * &f;
    let gz = &lin * &g;
    for j in 1..=5u32 {
        let pj = p_coefficient(j as usize, m, order, conv, ZeroVector::Included).unwrap().restrict(order - j).unwrap();
        let qj = q_coefficient(j as usize, m, order, conv, ZeroVector::Included).unwrap().restrict(order - j).unwrap();
        assert!(pj.max_rel_diff(&fz.coefficient_of(0, j).unwrap()).unwrap() < 1e-9);
        assert!(qj.max_rel_diff(&gz.coefficient_of(0, j).unwrap()).unwrap() < 1e-9);
    }
}

fn direct_product(a: &dyn Fn(usize) -> i64, order: u32) -> TruncatedSeries {
    let mut s = TruncatedSeries::one(&["q"], order).unwrap();
    for k in 1..=order {
        let base = s.one_like().try_sub(&s.monomial_like(&[k], real(1.0)).unwrap()).unwrap();
        s = s.try_mul(&base.powi(-a(k as usize)).unwrap()).unwrap();
    }
    s
}

#[test]
fn product_recurrence_against_direct_products() {
    let cases: [(&dyn Fn(usize) -> i64, &str); 3] =
        [(&|_| 1, "ones"), (&|k| if k == 1 { 1 } else { 0 }, "delta"), (&|k| k as i64, "linear")];
    for (a, name) in cases {
        let exps: Vec<Scalar> = (1..=20).map(|k| real(a(k) as f64)).collect();
        let rec = product_expansion(&exps, 20);
        let direct = direct_product(a, 20);
        for (k, v) in rec.iter().enumerate() {
            let d = direct.coeff(&[k as u32]);
            assert!((v - d).norm() <= 1e-9 * d.norm().max(1.0), "{name} k = {k}");
        }
    }
    let p = product_expansion_exact(&[1; 20], 20).unwrap();
    assert_eq!(p[5], 7);
    assert_eq!(p[20], 627);
}

#[test]
fn complex_exponents_extension() {
    let a = [c(0.5, 0.25), c(-1.0, 0.0)];
    let b = product_expansion(&a, 6);
    let mut log = TruncatedSeries::zero(&["q"], 6).unwrap();
    for (k, ak) in a.iter().enumerate() {
        let k = k as u32 + 1;
        let mut j = 1;
        while j * k <= 6 {
            log.add_term(&[j * k], ak / j as f64).unwrap();
            j += 1;
        }
    }
    let e = series_exp(&log).unwrap();
    for (k, v) in b.iter().enumerate() {
        assert!((e.coeff(&[k as u32]) - v).norm() < 1e-12);
    }
}
