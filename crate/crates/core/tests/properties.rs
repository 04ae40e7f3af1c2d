mod common;

use chainscope::chain::ChainDigraph;
use chainscope::chaos::{dyadic_ladder, tuple_stats};
use chainscope::cyclic::{chain_proximal_at, cyclic_classes, meet};
use chainscope::furstenberg::{inclusion_audit_exact, parse_time_set, EventuallyPeriodicSet, Family, TimeSet, TimeSetWindow, WindowParams};
use chainscope::graph::Digraph;
use chainscope::numeric::{format_rational, parse_rational, rat};
use chainscope::system::spec::{SystemModel, SystemSpec};
use chainscope::{Dyadic, SftGraph, SftPoint};
use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn system(seed: u64, max_points: usize) -> chainscope::FiniteSystem {
    random_system(&mut ChaCha8Rng::seed_from_u64(seed), max_points)
}

fn word(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..2, len)
}

fn full_shift_point() -> impl Strategy<Value = SftPoint> {
    (word(0..6), word(1..5)).prop_map(|(h, c)| SftPoint::new(h, c))
}

fn bits(max: usize) -> impl Strategy<Value = Vec<bool>> {
    prop::collection::vec(any::<bool>(), 0..max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn components_match_closure(seed in any::<u64>()) {
        let sys = system(seed, 9);
        for delta in all_resolutions(&sys) {
            let dg = ChainDigraph::build(&sys, delta);
            let mut got = dg.chain_components();
            got.sort();
            prop_assert_eq!(got, brute_components(&chain_adjacency(&sys, delta)));
        }
    }

    #[test]
    fn self_reach_iff_recurrent(seed in any::<u64>()) {
        let sys = system(seed, 9);
        for delta in all_resolutions(&sys) {
            let dg = ChainDigraph::build(&sys, delta);
            for u in 0..sys.len() {
                prop_assert_eq!(dg.reaches(u, u), dg.chain_recurrent_set().contains(&u));
            }
        }
    }

    #[test]
    fn components_coarsen_as_delta_grows(seed in any::<u64>()) {
        let sys = system(seed, 9);
        let deltas = all_resolutions(&sys);
        for w in deltas.windows(2) {
            let fine = ChainDigraph::build(&sys, w[0]);
            let coarse = ChainDigraph::build(&sys, w[1]);
            for c in fine.chain_components() {
                let k = coarse.component_index(c[0]);
                prop_assert!(k.is_some());
                prop_assert!(c.iter().all(|&u| coarse.component_index(u) == k));
            }
        }
    }

    #[test]
    fn lyapunov_decreases_off_the_recurrent_set(seed in any::<u64>()) {
        let sys = system(seed, 10);
        for delta in all_resolutions(&sys) {
            let dg = ChainDigraph::build(&sys, delta);
            let lam = dg.complete_lyapunov();
            let r = closure(&chain_adjacency(&sys, delta));
            for x in 0..sys.len() {
                if !r[x][x] {
                    prop_assert!(lam[sys.map(x)] < lam[x]);
                }
                for y in 0..sys.len() {
                    if r[x][y] && !r[y][x] {
                        prop_assert!(lam[x] > lam[y]);
                    }
                }
            }
        }
    }

    #[test]
    fn period_divides_every_closed_walk(adj in prop::collection::vec(prop::collection::vec(prop::bool::weighted(0.3), 7), 7)) {
        let dg = ChainDigraph::from_digraph(Digraph::from_adjacency(&adj), rat(0, 1));
        for comp in dg.chain_components() {
            let d = cyclic_classes(&dg, &comp).unwrap();
            let mut g = 0;
            for &u in &comp {
                let masks = walk_masks(&adj, &comp, u, 2 * comp.len());
                for (len, m) in masks.iter().enumerate().skip(1) {
                    if m >> u & 1 == 1 {
                        prop_assert_eq!(len % d.period, 0);
                        g = num::integer::gcd(g, len);
                    }
                }
            }
            prop_assert_eq!(g, d.period);
        }
    }

    #[test]
    fn proximal_is_an_equivalence(seed in any::<u64>()) {
        let sys = system(seed, 8);
        for delta in all_resolutions(&sys) {
            let dg = ChainDigraph::build(&sys, delta);
            for comp in dg.chain_components() {
                for &x in &comp {
                    prop_assert!(chain_proximal_at(&dg, &comp, x, x).unwrap());
                    for &y in &comp {
                        prop_assert_eq!(chain_proximal_at(&dg, &comp, x, y).unwrap(), chain_proximal_at(&dg, &comp, y, x).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn meet_refines_both(a in prop::collection::vec(0usize..3, 1..12), b in prop::collection::vec(0usize..3, 1..12)) {
        let n = a.len().min(b.len());
        let part = |labels: &[usize]| -> Vec<Vec<usize>> {
            (0..3).map(|k| (0..n).filter(|&i| labels[i] == k).collect::<Vec<_>>()).filter(|c| !c.is_empty()).collect()
        };
        let (pa, pb) = (part(&a), part(&b));
        let m = meet(&pa, &pb);
        prop_assert_eq!(m.iter().map(Vec::len).sum::<usize>(), n);
        for c in &m {
            prop_assert!(pa.iter().any(|x| c.iter().all(|u| x.contains(u))));
            prop_assert!(pb.iter().any(|x| c.iter().all(|u| x.contains(u))));
        }
    }

    #[test]
    fn shift_metric_is_an_ultrametric(x in full_shift_point(), y in full_shift_point(), z in full_shift_point()) {
        prop_assert_eq!(x.distance(&y), y.distance(&x));
        prop_assert_eq!(x.distance(&x), Dyadic::Zero);
        prop_assert!(x.distance(&z) <= x.distance(&y).max(y.distance(&z)));
        prop_assert_eq!(x.distance(&y) == Dyadic::Zero, x == y);
        let expected = symbol_distance_exponent(&x, &y, 64).map_or(Dyadic::Zero, |k| Dyadic::Pow(k as u32));
        prop_assert_eq!(x.distance(&y), expected);
    }

    #[test]
    fn shift_at_most_doubles_distance(x in full_shift_point(), y in full_shift_point()) {
        match (x.distance(&y), x.shift().distance(&y.shift())) {
            (Dyadic::Pow(k), Dyadic::Pow(j)) => prop_assert!(j + 1 >= k),
            (Dyadic::Zero, d) => prop_assert_eq!(d, Dyadic::Zero),
            _ => {}
        }
    }

    #[test]
    fn canonical_form_is_stable(h in word(0..6), c in word(1..5)) {
        let raw = SftPoint::new(h.clone(), c.clone());
        let g = SftGraph::full_shift(2);
        for i in 0..20 {
            let expected = if i < h.len() { h[i] } else { c[(i - h.len()) % c.len()] };
            prop_assert_eq!(raw.symbol(i), expected);
        }
        let again = raw.clone().canonical();
        prop_assert_eq!(&again, &raw);
        prop_assert_eq!(g.parse_point(&raw.to_string()).unwrap(), raw.clone());
        prop_assert_eq!(raw.shift_by(3), raw.shift().shift().shift());
    }

    #[test]
    fn inclusion_chain_holds(pre in bits(12), pat in bits(12).prop_filter("nonempty", |p| !p.is_empty())) {
        let a = EventuallyPeriodicSet::new(pre, pat).unwrap();
        let audit = inclusion_audit_exact(&a).unwrap();
        prop_assert!(audit.monotone);
        prop_assert_eq!(audit.verdicts.iter().map(|v| v.family).collect::<Vec<_>>(), Family::ALL.to_vec());
    }

    #[test]
    fn exact_density_matches_long_prefix(pre in bits(8), pat in bits(8).prop_filter("nonempty", |p| !p.is_empty())) {
        let a = EventuallyPeriodicSet::new(pre.clone(), pat.clone()).unwrap();
        let h = pre.len() + 1000 * pat.len();
        let w = a.window(h);
        let tail = pat.iter().filter(|&&b| b).count() as f64 / pat.len() as f64;
        prop_assert!((w.density() - tail).abs() < 0.01);
        let exact = a.upper_density();
        prop_assert!((*exact.numer() as f64 / *exact.denom() as f64 - tail).abs() < 1e-12);
    }

    #[test]
    fn time_set_text_round_trips(pre in bits(10), pat in bits(10).prop_filter("nonempty", |p| !p.is_empty()), win in bits(60)) {
        let a = EventuallyPeriodicSet::new(pre, pat).unwrap();
        prop_assert_eq!(parse_time_set(&a.to_rle()).unwrap(), TimeSet::EventuallyPeriodic(a));
        let w = TimeSetWindow::new(win);
        prop_assert_eq!(parse_time_set(&w.to_rle()).unwrap(), TimeSet::Window(w));
    }

    #[test]
    fn window_verdicts_are_upward_closed(win in bits(400), extra in bits(400)) {
        let h = win.len().min(extra.len());
        prop_assume!(h >= 64);
        let a = TimeSetWindow::new(win[..h].to_vec());
        let b = TimeSetWindow::new((0..h).map(|i| win[i] || extra[i]).collect());
        let params = WindowParams { run_req: 8, m_max: 4, ..WindowParams::defaults(h) };
        for f in Family::ALL {
            if a.window_family_member(f, &params).unwrap().member {
                prop_assert!(b.window_family_member(f, &params).unwrap().member);
            }
        }
    }

    #[test]
    fn separation_and_clustering_sets_nest(x in full_shift_point(), y in full_shift_point(), z in full_shift_point()) {
        let g = SftGraph::full_shift(2);
        let ladder = dyadic_ladder(5);
        let stats = tuple_stats(&g, &[x, y, z], &ladder, &ladder, 64).unwrap();
        for w in stats.s_sets.windows(2) {
            // r shrinks along the ladder, so S(r) grows
            prop_assert!(w[0].1.is_subset(&w[1].1));
        }
        for w in stats.t_sets.windows(2) {
            prop_assert!(w[1].1.is_subset(&w[0].1));
        }
        for i in 0..64 {
            prop_assert!(stats.min_trace[i] <= stats.max_trace[i]);
        }
    }

    #[test]
    fn rationals_round_trip(n in -10_000i64..10_000, d in 1i64..10_000) {
        let r = rat(n, d);
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }

    #[test]
    fn finite_specs_round_trip(seed in any::<u64>()) {
        let spec = SystemSpec { name: "random".into(), model: SystemModel::Finite(system(seed, 8)) };
        let again = SystemSpec::from_json(&spec.to_json()).unwrap();
        prop_assert_eq!(again, spec);
    }
}
