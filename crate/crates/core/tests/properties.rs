use std::collections::HashSet;

use dcover::bounds::{h_delta_log2, h_terms_log2, k_delta_log2, lemma_bound_table, Delta, Order};
use dcover::census::{exhaustive_census, monte_carlo_census, InverseClosedSets};
use dcover::graph::{cayley_graph, double_cover};
use dcover::group::{holomorph, AbelianGroup, Subgroup};
use dcover::stability::{Classifier, SigmaContext, Tri};
use dcover::{Caps, HpReal, Real};
use num_bigint::BigUint;
use num_rational::Ratio;
use proptest::prelude::*;

fn factors(max_len: usize, max_factor: i64) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(1..=max_factor, 1..=max_len)
}

fn small_group(max_order: usize) -> impl Strategy<Value = AbelianGroup> {
    factors(3, 8)
        .prop_map(|f| AbelianGroup::new(&f).unwrap())
        .prop_filter("order cap", move |g| g.order() <= max_order)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_axioms(g in small_group(200), a in any::<usize>(), b in any::<usize>(), c in any::<usize>()) {
        let r = g.order();
        let (a, b, c) = (a % r, b % r, c % r);
        prop_assert_eq!(g.add(g.add(a, b), c), g.add(a, g.add(b, c)));
        prop_assert_eq!(g.add(a, b), g.add(b, a));
        prop_assert_eq!(g.add(a, g.identity()), a);
        prop_assert_eq!(g.add(a, g.neg(a)), g.identity());
        prop_assert_eq!(g.scale(g.element_order(a) as i64, a), g.identity());
        prop_assert_eq!(g.exponent() % g.element_order(a), 0);
    }

    #[test]
    fn factors_ascend_and_divide(f in factors(4, 12)) {
        let g = AbelianGroup::new(&f).unwrap();
        let fs = g.factors();
        prop_assert!(fs.windows(2).all(|w| w[1] % w[0] == 0));
        prop_assert!(fs.iter().all(|&d| d > 1));
        prop_assert_eq!(g.order() as i64, f.iter().product::<i64>());
    }

    #[test]
    fn input_coordinates_are_an_isomorphism(f in factors(3, 6), x in prop::collection::vec(-20i64..20, 3), y in prop::collection::vec(-20i64..20, 3)) {
        let g = AbelianGroup::new(&f).unwrap();
        let k = f.len();
        let (x, y) = (&x[..k], &y[..k]);
        let sum: Vec<i64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
        prop_assert_eq!(g.from_input_coords(&sum).unwrap(), g.add(g.from_input_coords(x).unwrap(), g.from_input_coords(y).unwrap()));
        let mut seen = HashSet::new();
        let mut t = vec![0i64; k];
        loop {
            seen.insert(g.from_input_coords(&t).unwrap());
            match (0..k).find(|&i| t[i] + 1 < f[i]) {
                Some(i) => {
                    t[i] += 1;
                    t[..i].fill(0);
                }
                None => break,
            }
        }
        prop_assert_eq!(seen.len(), g.order());
        for (&n, &img) in f.iter().zip(g.input_generators()) {
            prop_assert_eq!(g.element_order(img), n as u64);
        }
    }

    #[test]
    fn inverse_closed_indexing(g in small_group(16), k in any::<u64>()) {
        let sets = InverseClosedSets::new(&g);
        prop_assert_eq!(BigUint::from(sets.len_u64()), g.count_inverse_closed());
        let k = k % sets.len_u64();
        let s = sets.bits(k);
        prop_assert!(g.is_inverse_closed(&s));
        prop_assert_eq!(sets.index_of(&s), Some(k));
    }

    #[test]
    fn holomorph_composition(g in small_group(12), i in any::<usize>(), j in any::<usize>(), x in any::<usize>()) {
        let hol = holomorph(&g, &Caps::default()).unwrap();
        let (a, b) = (&hol[i % hol.len()], &hol[j % hol.len()]);
        let x = x % g.order();
        prop_assert_eq!(a.then(&g, b).apply(&g, x), b.apply(&g, a.apply(&g, x)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hierarchy_invariants(g in small_group(10), k in any::<u64>()) {
        let caps = Caps::default();
        let sets = InverseClosedSets::new(&g);
        let s = sets.set(k % sets.len_u64());
        let rec = Classifier::new(&g, &caps).unwrap().classify(&s).unwrap();
        let gamma = cayley_graph(&g, &s);
        prop_assert_eq!(rec.connected, gamma.is_connected());
        prop_assert_eq!(rec.in_s1, gamma.is_connected() && !gamma.is_bipartite() && gamma.is_twin_free());
        prop_assert!(!rec.in_s2 || rec.in_s1);
        prop_assert!(!rec.in_s2 || rec.stable);
        prop_assert!(rec.in_s3 != Tri::Yes || rec.in_s3prime);
        prop_assert!(!rec.in_s1 || rec.trivial_instability_reasons.is_empty());
        prop_assert_eq!(rec.stable, rec.cover_aut_order == &rec.aut_order * 2u32);
        prop_assert!(!rec.good || rec.stable);
        if rec.connected && !rec.bipartite {
            prop_assert!(double_cover(&gamma).is_connected());
            prop_assert_eq!(&rec.cover_aut_order, &(&rec.b_order * 2u32));
        }
        if rec.in_s1 && !rec.in_s2 && rec.in_s3 == Tri::No && rec.in_s4 != Tri::Indeterminate && rec.in_s5 != Tri::Indeterminate {
            prop_assert!(rec.in_s4 == Tri::Yes || rec.in_s5 == Tri::Yes);
        }
    }

    #[test]
    fn sampled_census_ignores_worker_count(seed in any::<u64>(), workers in 2usize..=8, samples in 0u64..700) {
        let g = AbelianGroup::new(&[5]).unwrap();
        let caps = Caps::default();
        let one = monte_carlo_census(&g, samples, seed, &caps, 1).unwrap().without_timing();
        let many = monte_carlo_census(&g, samples, seed, &caps, workers).unwrap().without_timing();
        prop_assert_eq!(one.counts.examined, samples);
        prop_assert_eq!(one, many);
    }

    #[test]
    fn sigma_factors_through_cosets(n in 4usize..=12, b_pick in any::<usize>(), k in any::<u64>(), u in any::<usize>(), j in any::<usize>()) {
        let g = AbelianGroup::new(&[n as i64]).unwrap();
        let divisors: Vec<usize> = (2..=n).filter(|b| n % b == 0).collect();
        let b = divisors[b_pick % divisors.len()];
        let ctx = SigmaContext::new(&g, &Subgroup::generated_by(&g, &[b])).unwrap();
        let sets = InverseClosedSets::new(&g);
        let s = sets.bits(k % sets.len_u64());
        let u = u % n;
        let j = j % ctx.b();
        let i = ctx.label_of(u);
        let mut left = s.clone();
        left.intersect_with(&ctx.coset(j));
        let mut shifted_src = s.clone();
        shifted_src.intersect_with(&ctx.coset((j + ctx.b() - i) % ctx.b()));
        let mut rhs = g.translate_set(&shifted_src, u);
        rhs.intersect_with(&left);
        prop_assert_eq!(ctx.sigma(&s, u, j).unwrap(), rhs);
    }

    #[test]
    fn delta_parsing(n in 1u64..1000, d in 3u64..1000, m in 1u64..500) {
        prop_assume!(2 * n < d);
        let frac: Delta = format!("{n}/{d}").parse().unwrap();
        prop_assert_eq!(frac.ratio(), Ratio::new(n, d));
        let dec: Delta = format!("0.{m:03}").parse().unwrap();
        prop_assert_eq!(dec.ratio(), Ratio::new(m, 1000));
        let flipped = format!("{d}/{n}").parse::<Delta>();
        prop_assert!(flipped.is_err());
    }

    #[test]
    fn machine_and_wide_floats_agree(t in 10u64..40, di in 0usize..4) {
        let delta: Delta = ["0.01", "0.05", "0.1", "0.2"][di].parse().unwrap();
        let r = Order::Int(1 << t);
        let (a, b) = h_terms_log2::<HpReal>(r, &delta, &256).unwrap();
        let (fa, fb) = h_terms_log2::<f64>(r, &delta, &()).unwrap();
        prop_assert!((a.to_f64() - fa).abs() <= 1e-9 * fa.abs().max(1.0));
        prop_assert!((b.to_f64() - fb).abs() <= 1e-9 * fb.abs().max(1.0));
    }

    #[test]
    fn k_exceeds_scaled_h(t in 124u64..2000, di in 0usize..3) {
        let p = 256usize;
        let delta: Delta = ["0.1", "0.2", "0.3"][di].parse().unwrap();
        let r = Order::PowerOfTwo(t);
        let h = h_delta_log2::<HpReal>(r, &delta, &p).unwrap();
        let k = k_delta_log2::<HpReal>(r, &delta, &p).unwrap();
        let half = -HpReal::from_u64(1, &p);
        if h < half {
            let l = HpReal::from_u64(t, &p);
            let scaled = h.clone() + l.clone() * l.clone() + l;
            let k = k.expect("h < 1");
            // 1 - h rounds to 1 once h drops below the working precision
            let resolvable = -HpReal::from_u64(p as u64 - 8, &p);
            if h > resolvable {
                prop_assert!(k > scaled);
            } else {
                prop_assert!(k >= scaled);
            }
        }
    }
}

#[test]
fn sampling_is_unbiased_over_seeds() {
    let g = AbelianGroup::new(&[7]).unwrap();
    let caps = Caps::default();
    let exact = exhaustive_census(&g, &caps, 1).unwrap();
    let truth = exact.counts.s1 as f64 / exact.counts.examined as f64;
    let n = 32;
    let est: Vec<f64> = (0..100u64)
        .map(|seed| monte_carlo_census(&g, n, seed, &caps, 1).unwrap().counts.s1 as f64 / n as f64)
        .collect();
    let mean = est.iter().sum::<f64>() / est.len() as f64;
    let var = est.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (est.len() - 1) as f64;
    let se = (var / est.len() as f64).sqrt();
    assert!(se > 0.0);
    assert!((mean - truth).abs() <= 3.0 * se, "mean {mean} vs {truth}, se {se}");
}

#[test]
fn h_decreases_past_its_turning_point() {
    let p = 256usize;
    let delta: Delta = "0.2".parse().unwrap();
    let hs: Vec<HpReal> = (45..=160).map(|t| h_delta_log2::<HpReal>(Order::PowerOfTwo(t), &delta, &p).unwrap()).collect();
    assert!(hs.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn k_undefined_on_moderate_powers_of_two() {
    let delta: Delta = "0.1".parse().unwrap();
    for t in 10..=40 {
        assert!(k_delta_log2::<HpReal>(Order::PowerOfTwo(t), &delta, &256).unwrap().is_none(), "t = {t}");
    }
}

#[test]
fn h_crosses_one_in_a_million_at_two_to_the_123() {
    let p = 256usize;
    let delta: Delta = "0.1".parse().unwrap();
    let target = HpReal::from_ratio(1, 1_000_000, &p).log2(&p);
    let h = |t| h_delta_log2::<HpReal>(Order::PowerOfTwo(t), &delta, &p).unwrap();
    assert!(h(122) >= target);
    assert!(h(123) < target);
}

#[test]
fn h_exceeds_one_at_ten_million() {
    let delta: Delta = "0.1".parse().unwrap();
    let prof = lemma_bound_table::<HpReal>(Order::Int(10_000_000), &delta, &256).unwrap();
    assert!(prof.h_vacuous());
    assert!(!prof.k_defined());
    assert!(prof.h_log2.to_f64() > 60.0);
}
