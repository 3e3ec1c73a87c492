use std::collections::BTreeMap;

use proptest::prelude::*;
use qspectra_core::csgen::{
    bilateral_collapse, free_energy, free_energy_coefficients, lmov_log_form, lmov_product, p_from_w_exact,
    partition_function, power_sum_series, symmetry_checks, tuple_weight, tuples_up_to, tuples_with_weights,
    w_from_p_exact, Alphabet, FunctionBasis, IndexChoice, InvariantTable, LinkData, PartitionTuple,
};
use qspectra_core::hierarchy::{
    b44, bernoulli_kernel, elliptic_gamma1, elliptic_gamma2, factorized_hierarchy, g21_check, g22_check,
    gamma1_qq_check, gamma1_reflection_check, gamma2_modularity_check, gamma2_qqq_check, jackson_g1, jackson_g2,
    G2Form, NomeTriple,
};
use qspectra_core::scalar::{c, real};
use qspectra_core::spectral::SpectralParams;
use qspectra_core::symmfunc::{
    character, character_table, orthogonality_check, partitions, schur_exact, schur_from_power_sums, schur_tableaux,
    schur_with_adams, adams, sign, z_mu, Partition,
};
use qspectra_core::{Error, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn part(p: &[u32]) -> Partition {
    Partition::new(p.to_vec()).unwrap()
}

#[test]
fn jackson_products() {
    let r = qspectra_core::hierarchy::g1_spectral_check(real(0.3), real(0.2), 1e-8).unwrap();
    assert!(r.pass);
    let grid = [real(0.1), real(0.25), c(0.15, 0.15)];
    for &q in &grid {
        for &p in &grid {
            for r in g21_check(real(0.3), q, p, 1e-8).unwrap() {
                assert!(r.pass, "{r:?}");
            }
            for omega in [real(0.12), c(0.2, 0.1), real(-0.25)] {
                for r in g22_check(omega, q, p, 1e-8).unwrap() {
                    assert!(r.pass || r.is_domain_failure(), "{r:?}");
                }
            }
        }
    }
    // the reciprocal point leaves the disk: reported, not guessed
    let r = g22_check(real(0.05), real(0.25), real(0.25), 1e-8).unwrap();
    assert!(r.iter().all(|x| x.is_domain_failure()));
}

#[test]
fn printed_diagonal_form_is_a_specialization() {
    let two = jackson_g2(real(0.3), real(0.2), real(0.2), G2Form::TwoNome, 1e-13).unwrap().value;
    let diag = jackson_g2(real(0.3), real(0.2), real(0.7), G2Form::Diagonal, 1e-13).unwrap().value;
    assert!((two - diag).norm() < 1e-12);
}

#[test]
fn doubling_the_truncation_stays_within_the_bound() {
    let coarse = jackson_g1(c(0.4, 0.2), real(0.3), 1e-6).unwrap();
    let fine = jackson_g1(c(0.4, 0.2), real(0.3), 1e-14).unwrap();
    assert!((coarse.value - fine.value).norm() <= coarse.tail_bound * coarse.value.norm());
    let coarse = elliptic_gamma1(real(0.4), real(0.2), real(0.25), 1e-5).unwrap();
    let fine = elliptic_gamma1(real(0.4), real(0.2), real(0.25), 1e-13).unwrap();
    assert!((coarse.value - fine.value).norm() <= 2.0 * coarse.tail_bound * coarse.value.norm());
}

#[test]
fn gamma_functions() {
    assert!(gamma1_reflection_check(c(0.5, -0.2), real(0.2), c(0.1, 0.25), 1e-8).unwrap().pass);
    assert!(gamma1_qq_check(real(0.4), real(0.2), 1e-7).unwrap().pass);
    assert!(gamma2_qqq_check(real(0.4), real(0.2), 1e-7).unwrap().pass);
    assert!(gamma2_qqq_check(c(0.3, 0.2), c(0.1, 0.15), 1e-7).unwrap().pass);
    assert!(matches!(elliptic_gamma1(real(1.0), real(0.2), real(0.3), 1e-10), Err(Error::Pole(_))));
    let g = elliptic_gamma2(real(0.5), real(0.2), real(0.25), real(0.3), 1e-12).unwrap();
    assert!(g.value.norm().is_finite());
}

#[test]
fn bernoulli_kernel_values() {
    assert!((b44(real(0.0), real(1.0), real(1.0), real(1.0)).unwrap() - real(-9.0)).norm() < 1e-12);
    let (a, b, cc) = (c(0.0, 0.9), c(0.0, 1.0), c(0.0, 1.1));
    // degree 4 in z: five nodes predict a sixth
    let nodes: Vec<Scalar> = (0..5).map(|k| c(0.1 * k as f64, 0.05)).collect();
    let values: Vec<Scalar> = nodes.iter().map(|&z| b44(z, a, b, cc).unwrap()).collect();
    let z6 = c(0.73, -0.2);
    let mut predicted = real(0.0);
    for i in 0..5 {
        let mut w = values[i];
        for j in 0..5 {
            if i != j {
                w *= (z6 - nodes[j]) / (nodes[i] - nodes[j]);
            }
        }
        predicted += w;
    }
    let actual = b44(z6, a, b, cc).unwrap();
    assert!((predicted - actual).norm() < 1e-10 * actual.norm().max(1.0));
    let z = c(0.2, 0.5);
    assert!((bernoulli_kernel(z, &[a, b, cc], 4, 4, 12).unwrap() - b44(z, a, b, cc).unwrap()).norm() < 1e-12);
}

#[test]
fn modularity() {
    // real period ratios put derived nomes on the unit circle
    let spec_point = NomeTriple::from_periods(c(0.0, 0.9), c(0.0, 1.0), c(0.0, 1.1)).unwrap();
    assert!(gamma2_modularity_check(c(0.2, 0.5), &spec_point, 1e-4, true).is_domain_failure());
    let unit = NomeTriple::from_periods(c(0.0, 1.0), c(0.0, 1.0), c(0.0, 1.0)).unwrap();
    assert!(gamma2_modularity_check(c(0.2, 0.5), &unit, 1e-4, false).is_domain_failure());

    let z = c(0.2, 0.15);
    let (a, b, cc) = (c(0.3, 1.0), c(-0.2, 0.9), c(0.1, 1.2));
    let generic = NomeTriple::from_periods(a, b, cc).unwrap();
    let r = gamma2_modularity_check(z, &generic, 1e-4, true);
    assert!(r.pass && r.tail_bound < 1e-6, "{r:?}");
    let permuted = NomeTriple::from_periods(cc, a, b).unwrap();
    let s = gamma2_modularity_check(z, &permuted, 1e-4, true);
    assert!((s.rhs - r.rhs).norm() < 1e-10 * r.rhs.norm());

    let from_nomes = NomeTriple::from_nomes(generic.q, generic.p, generic.t).unwrap();
    assert!((from_nomes.a - a).norm() < 1e-12);
}

#[test]
fn hierarchy_factorization() {
    assert!(factorized_hierarchy(real(0.3), 1, real(0.2), 1e-8).unwrap().pass);
    assert!(factorized_hierarchy(real(0.3), 2, real(0.2), 1e-8).unwrap().pass);
    let zero = factorized_hierarchy(real(0.0), 2, real(0.2), 1e-8).unwrap();
    assert_eq!((zero.lhs, zero.rhs), (real(1.0), real(1.0)));
}

#[test]
fn class_sizes_and_characters() {
    assert_eq!(z_mu(&part(&[1, 1, 1])), 6);
    assert_eq!(z_mu(&part(&[2, 1])), 2);
    let total: u128 = partitions(5).iter().map(|mu| 120 / z_mu(mu)).sum();
    assert_eq!(total, 120);
    assert_eq!(character(&part(&[1, 1]), &part(&[2])).unwrap(), -1);
    assert!(matches!(character(&part(&[2]), &part(&[1])), Err(Error::WeightMismatch(2, 1))));
    for n in 1..=8 {
        let ones = Partition::new(vec![1; n as usize]).unwrap();
        for mu in partitions(n) {
            assert_eq!(character(&part(&[n]), &mu).unwrap(), 1);
            assert_eq!(character(&ones, &mu).unwrap(), sign(&mu));
        }
        assert!(orthogonality_check(n));
    }
    let t = character_table(4);
    assert_eq!(t.partitions.len(), 5);
}

#[test]
fn schur_functions_against_tableaux() {
    let names = ["x1", "x2", "x3"];
    for n in 1..=5 {
        for shape in partitions(n) {
            for k in 1..=3 {
                let exact = schur_exact(&shape, k).unwrap();
                assert_eq!(exact, schur_tableaux(&shape, k), "{shape} in {k} variables");
                let float = schur_from_power_sums(&shape, &names[..k], 5).unwrap();
                for (e, v) in float.terms() {
                    let expect = exact.get(e).copied().unwrap_or(0) as f64;
                    assert!((v - real(expect)).norm() < 1e-9);
                }
            }
        }
    }
    let s11 = schur_tableaux(&part(&[1, 1]), 2);
    assert_eq!(s11, BTreeMap::from([(vec![1, 1], 1)]));
    let s2 = schur_tableaux(&part(&[2]), 2);
    assert_eq!(s2.len(), 3);
    let via_sub = adams(&part(&[2]), 2, &names[..2], 6).unwrap();
    let via_ps = schur_with_adams(&part(&[2]), 2, &names[..2], 6).unwrap();
    assert!(via_sub.max_abs_diff(&via_ps).unwrap() < 1e-12);
}

fn arb_partition(max: u32) -> impl Strategy<Value = Partition> {
    (1..=max).prop_flat_map(|n| {
        let all = partitions(n);
        (0..all.len()).prop_map(move |i| all[i].clone())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transpose_properties(a in arb_partition(8)) {
        let t = a.transpose();
        prop_assert_eq!(t.transpose(), a.clone());
        prop_assert_eq!(t.weight(), a.weight());
        prop_assert_eq!(t.len() as u32, a.parts()[0]);
    }

    #[test]
    fn character_transpose_twist(a in arb_partition(7), k in 0usize..15) {
        let classes = partitions(a.weight());
        let mu = &classes[k % classes.len()];
        let lhs = character(&a.transpose(), mu).unwrap();
        prop_assert_eq!(lhs, sign(mu) * character(&a, mu).unwrap());
    }
}

fn random_link(rng: &mut ChaCha8Rng, components: usize, bound: u32) -> LinkData {
    let mut link = LinkData::new(components, bound).unwrap();
    for t in tuples_up_to(components, bound) {
        link.insert(t, real(rng.gen_range(-5..=5) as f64)).unwrap();
    }
    link
}

#[test]
fn partition_function_bases_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..20 {
        let components = 1 + i % 2;
        let link = random_link(&mut rng, components, 4);
        let alphabet = Alphabet::new(&vec![2; components], 6).unwrap();
        let schur = partition_function(&link, &alphabet, FunctionBasis::Schur).unwrap();
        let ps = partition_function(&link, &alphabet, FunctionBasis::PowerSum).unwrap();
        assert!(schur.max_rel_diff(&ps).unwrap() < 1e-9);
    }
    let empty = LinkData::new(1, 3).unwrap();
    let alphabet = Alphabet::new(&[2], 4).unwrap();
    let z = partition_function(&empty, &alphabet, FunctionBasis::Schur).unwrap();
    assert_eq!(z.max_abs_diff(&z.one_like()).unwrap(), 0.0);
}

#[test]
fn w_and_p_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for n in 1..=5 {
        for components in 1..=2usize {
            let weights: Vec<Vec<u32>> = if components == 1 { vec![vec![n]] } else { (0..=n).map(|k| vec![k, n - k]).collect() };
            let mut p: BTreeMap<PartitionTuple, i128> = BTreeMap::new();
            for w in weights {
                for t in tuples_with_weights(&w) {
                    p.insert(t, rng.gen_range(-20..=20));
                }
            }
            let w = w_from_p_exact(&p).unwrap();
            assert_eq!(p_from_w_exact(&w).unwrap(), p);
        }
    }
}

#[test]
fn free_energy_is_the_logarithm() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for components in 1..=2 {
        let link = random_link(&mut rng, components, 4);
        let alphabet = Alphabet::new(&vec![2; components], 12).unwrap();
        let z = partition_function(&link, &alphabet, FunctionBasis::PowerSum).unwrap();
        let f = free_energy(&link, &alphabet).unwrap();
        // Z truncated at the data bound is exact, so compare through exp
        assert!(f.exp().unwrap().max_rel_diff(&z).unwrap() < 1e-9);
        // the power-sum projection agrees below the data bound
        let coeffs = free_energy_coefficients(&link).unwrap();
        let low = Alphabet::new(&vec![2; components], 4).unwrap();
        let projected = power_sum_series(&coeffs, &low).unwrap();
        let direct = free_energy(&link, &low).unwrap();
        assert!(projected.max_abs_diff(&direct).unwrap() < 1e-9);
    }
}

#[test]
fn free_energy_is_additive_on_split_links() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let a = random_link(&mut rng, 1, 4);
    let b = random_link(&mut rng, 1, 4);
    let joint = a.disjoint_union(&b);
    let fa = free_energy_coefficients(&a).unwrap();
    let fb = free_energy_coefficients(&b).unwrap();
    let fj = free_energy_coefficients(&joint).unwrap();
    for (key, v) in &fj {
        let expect = if key[1].is_empty() {
            fa.get(&key[..1]).copied().unwrap_or(real(0.0))
        } else if key[0].is_empty() {
            fb.get(&key[1..]).copied().unwrap_or(real(0.0))
        } else {
            real(0.0)
        };
        assert!((v - expect).norm() < 1e-9 * expect.norm().max(1.0), "{key:?}");
    }
    for (key, v) in &fa {
        assert!(tuple_weight(key) <= 4);
        let mut k = key.clone();
        k.push(Partition::empty());
        assert!((fj[&k] - v).norm() < 1e-9 * v.norm().max(1.0));
    }
}

#[test]
fn json_inputs() {
    let link = LinkData::from_json(r#"{"L": 1, "entries": [{"A": [[1]], "value": 2}, {"A": [[2]], "value": [1, 0.5]}, {"A": [[1, 1]], "value": {"re": 0, "im": 1}}]}"#).unwrap();
    assert_eq!(link.degree_bound(), 2);
    let table = InvariantTable::from_json(r#"{"L": 1, "entries": [{"mu": [[1]], "g": 0, "Q": 0.5, "n": 1}, {"mu": [[1]], "g": 0, "Q": -0.5, "n": -1}]}"#).unwrap();
    assert_eq!(table.entries[0].twice_charge, 1);
    assert!(InvariantTable::from_json(r#"{"L": 1, "entries": [{"mu": [[1]], "Q": 0.25, "n": 1}]}"#).is_err());
}

#[test]
fn product_form_and_collapse() {
    let mut table = InvariantTable::new(1);
    table.push(vec![part(&[1])], 0, 1, 1).unwrap();
    table.push(vec![part(&[1])], 0, -1, -1).unwrap();
    table.push(vec![part(&[1, 1])], 1, 0, 2).unwrap();
    let alphabet = Alphabet::new(&[2], 6).unwrap();
    for choice in [IndexChoice::Ordered, IndexChoice::Unordered] {
        let prod = lmov_product(&table, &alphabet, real(0.2), real(0.5), choice, 1e-13, 500).unwrap();
        let oracle = lmov_log_form(&table, &alphabet, real(0.2), real(0.5), choice).unwrap();
        assert!(prod.series.max_rel_diff(&oracle).unwrap() < 1e-9);
    }
    let reports = symmetry_checks(&table, &alphabet, real(0.2), real(0.5), IndexChoice::Ordered, 1e-8).unwrap();
    assert!(reports.iter().all(|r| r.pass), "{reports:?}");

    let p = SpectralParams::from_nome(real(0.2)).unwrap();
    for (m, q2, n, x) in [(1, 0, 1, 0.3), (2, 1, -1, 0.6), (1, -1, 2, 0.2)] {
        let r = bilateral_collapse(m, q2, n, real(x), real(0.5), &p, 1e-7).unwrap();
        assert!(r.pass, "{r:?}");
    }
    let zero = bilateral_collapse(1, 0, 0, real(0.3), real(0.5), &p, 1e-7).unwrap();
    assert_eq!(zero.lhs, real(1.0));
}

#[test]
fn reflection_flags_bad_tables() {
    let mut bad = InvariantTable::new(1);
    bad.push(vec![part(&[1])], 0, 1, 1).unwrap();
    bad.push(vec![part(&[1])], 0, -1, 1).unwrap();
    let alphabet = Alphabet::new(&[1], 4).unwrap();
    let reports = symmetry_checks(&bad, &alphabet, real(0.2), real(0.5), IndexChoice::Ordered, 1e-8).unwrap();
    assert!(!reports[0].pass);
    let mut even = InvariantTable::new(1);
    even.push(vec![part(&[1, 1])], 0, 0, 3).unwrap();
    let reports = symmetry_checks(&even, &alphabet, real(0.2), real(0.5), IndexChoice::Ordered, 1e-8).unwrap();
    assert!(reports.iter().all(|r| r.pass), "{reports:?}");
}
