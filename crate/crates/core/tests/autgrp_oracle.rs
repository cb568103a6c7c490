use dcover::autgrp::{automorphism_group, canonical_form, setwise_stabilizer_of_block};
use dcover::graph::LabeledGraph;
use dcover::perm::Permutation;
use dcover::Caps;
use num_bigint::BigUint;
use proptest::prelude::*;

fn all_perms(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        let n = used.len();
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn brute_aut_count(g: &LabeledGraph, perms: &[Vec<usize>]) -> usize {
    perms
        .iter()
        .filter(|p| {
            (0..g.n()).all(|u| (0..g.n()).all(|v| g.has_edge(u, v) == g.has_edge(p[u], p[v])))
        })
        .count()
}

fn brute_isomorphic(a: &LabeledGraph, b: &LabeledGraph, perms: &[Vec<usize>]) -> bool {
    a.n() == b.n()
        && perms
            .iter()
            .any(|p| (0..a.n()).all(|u| (0..a.n()).all(|v| a.has_edge(u, v) == b.has_edge(p[u], p[v]))))
}

fn graph_strategy(max_n: usize) -> impl Strategy<Value = LabeledGraph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n + 1) / 2).prop_map(move |bits| {
            let mut g = LabeledGraph::empty(n);
            let mut k = 0;
            for u in 0..n {
                for v in u..n {
                    if bits[k] {
                        g.add_edge(u, v);
                    }
                    k += 1;
                }
            }
            g
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn order_matches_permutation_filter(g in graph_strategy(7)) {
        let perms = all_perms(g.n());
        let grp = automorphism_group(&g, None, &Caps::default()).unwrap();
        prop_assert_eq!(grp.order(), BigUint::from(brute_aut_count(&g, &perms)));
        for s in grp.generators() {
            prop_assert!(g.is_automorphism(s));
        }
    }

    #[test]
    fn canonical_form_is_relabel_invariant(g in graph_strategy(9), seed in any::<u64>()) {
        let n = g.n();
        let mut im: Vec<usize> = (0..n).collect();
        let mut x = seed | 1;
        for i in (1..n).rev() {
            x ^= x << 13; x ^= x >> 7; x ^= x << 17;
            im.swap(i, (x % (i as u64 + 1)) as usize);
        }
        let pi = Permutation::from_images(im).unwrap();
        let caps = Caps::default();
        let a = canonical_form(&g, &caps).unwrap();
        let b = canonical_form(&g.relabel(&pi), &caps).unwrap();
        prop_assert_eq!(&a.bytes, &b.bytes);
        prop_assert_eq!(g.relabel(&a.relabeling), g.relabel(&pi).relabel(&b.relabeling));
    }
}

#[test]
fn order_matches_filter_on_eight_vertices() {
    let perms = all_perms(8);
    let mut x = 0x9e3779b97f4a7c15u64;
    for _ in 0..25 {
        let mut g = LabeledGraph::empty(8);
        for u in 0..8 {
            for v in u + 1..8 {
                x ^= x << 13;
                x ^= x >> 7;
                x ^= x << 17;
                if x.is_multiple_of(3) {
                    g.add_edge(u, v);
                }
            }
        }
        let grp = automorphism_group(&g, None, &Caps::default()).unwrap();
        assert_eq!(grp.order(), BigUint::from(brute_aut_count(&g, &perms)));
    }
}

#[test]
fn canonical_classes_match_brute_isomorphism() {
    let caps = Caps::default();
    let mut pool = Vec::new();
    let mut x = 0x2545f4914f6cdd1du64;
    for i in 0..60 {
        let n = 4 + i % 4;
        let mut g = LabeledGraph::empty(n);
        for u in 0..n {
            for v in u..n {
                x ^= x << 13;
                x ^= x >> 7;
                x ^= x << 17;
                if x % 5 < 2 {
                    g.add_edge(u, v);
                }
            }
        }
        pool.push(g);
    }
    let perms: Vec<Vec<Vec<usize>>> = (0..=7).map(all_perms).collect();
    let forms: Vec<Vec<u8>> = pool.iter().map(|g| canonical_form(g, &caps).unwrap().bytes).collect();
    for i in 0..pool.len() {
        for j in i + 1..pool.len() {
            let iso = brute_isomorphic(&pool[i], &pool[j], &perms[pool[i].n()]);
            assert_eq!(iso, forms[i] == forms[j], "graphs {i} and {j}");
        }
    }
}

#[test]
fn block_stabilizer_matches_filter() {
    let caps = Caps::default();
    let perms = all_perms(6);
    for seed in 0..20u64 {
        let mut g = LabeledGraph::empty(6);
        let mut x = seed.wrapping_mul(0x9e3779b97f4a7c15) | 1;
        for u in 0..6 {
            for v in u + 1..6 {
                x ^= x << 13;
                x ^= x >> 7;
                x ^= x << 17;
                if x % 2 == 0 {
                    g.add_edge(u, v);
                }
            }
        }
        let a = automorphism_group(&g, None, &caps).unwrap();
        let b = setwise_stabilizer_of_block(&a, &[0, 1, 2], &caps).unwrap();
        let brute = perms
            .iter()
            .filter(|p| (0..6).all(|u| (0..6).all(|v| g.has_edge(u, v) == g.has_edge(p[u], p[v]))))
            .filter(|p| p[0] < 3 && p[1] < 3 && p[2] < 3)
            .count();
        assert_eq!(b.order(), BigUint::from(brute));
        let colored = automorphism_group(&g, Some(&[vec![0, 1, 2], vec![3, 4, 5]]), &caps).unwrap();
        assert_eq!(colored.order(), BigUint::from(brute));
    }
}
