use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gradual::gen::{random_graph, random_matching, random_spanning_forest, update_stream, StreamSpec, Weights};
use gradual::mcm::plan_mcm;
use gradual::msf::{plan_msf_with, IndexKind};
use gradual::mwm::plan_mwm_any;
use gradual::oracle::{best_worst_quality, max_matching_exact, msf_exact, Quality, SearchGranularity};
use gradual::script::{replay, verify_script};
use gradual::wrapper::sim::{simulate, OptCheck};
use gradual::wrapper::{wrap, BatchRecompute, DynamicMatcher, GreedyMaximal, Mode, WrapperConfig};
use gradual::{Edge, Granularity, Graph, Matching, Script, Tolerance};

const TOL: Tolerance = Tolerance(1e-9);

fn edges(m: &Matching) -> Vec<Edge> {
    m.iter().copied().collect()
}

fn instance(seed: u64, n: usize, weights: Weights) -> (Graph, Matching, Matching) {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let m = r.gen_range(0..=3 * n);
    let g = random_graph(&mut r, n, m, weights);
    let s = random_matching(&mut r, &g, 0.7);
    let t = random_matching(&mut r, &g, 0.9);
    (g, s, t)
}

/// Every planner's script survives a JSON round trip and replays to the same report.
fn stable(g: &Graph, source: &[Edge], script: &Script) {
    let back = Script::from_json(&script.to_json()).unwrap();
    assert_eq!(&back, script);
    let a = replay(g, source, script, Granularity::PerOp, TOL).unwrap();
    let b = replay(g, source, &back, Granularity::PerOp, TOL).unwrap();
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mcm_scripts_meet_guarantee(seed in any::<u64>(), n in 2usize..60) {
        let (g, s, t) = instance(seed, n, Weights::UNIT);
        let script = plan_mcm(&g, &s, &t).unwrap();
        let (_, verdict) = verify_script(&g, &edges(&s), &edges(&t), &script, TOL).unwrap();
        prop_assert!(verdict.passed(), "{verdict:?}");
        stable(&g, &edges(&s), &script);
    }

    #[test]
    fn mwm_scripts_meet_guarantee(seed in any::<u64>(), n in 2usize..60, eps in 0.01f64..=0.5) {
        let (g, s, t) = instance(seed, n, Weights::real(1.0, 50.0));
        let script = plan_mwm_any(&g, &s, &t, eps).unwrap();
        let (_, verdict) = verify_script(&g, &edges(&s), &edges(&t), &script, TOL).unwrap();
        prop_assert!(verdict.passed(), "{verdict:?}");
        stable(&g, &edges(&s), &script);
    }

    #[test]
    fn msf_scripts_agree_across_indexes(seed in any::<u64>(), n in 2usize..80) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut r, n, 2 * n, Weights::integer(1, 20));
        let f = msf_exact(&g);
        let h = random_spanning_forest(&mut r, &g);
        let a = plan_msf_with(&g, &h, &f, IndexKind::LinkCut).unwrap();
        let b = plan_msf_with(&g, &h, &f, IndexKind::Naive).unwrap();
        prop_assert_eq!(&a, &b);
        let src: Vec<Edge> = h.iter().copied().collect();
        let dst: Vec<Edge> = f.iter().copied().collect();
        let (_, verdict) = verify_script(&g, &src, &dst, &a, TOL).unwrap();
        prop_assert!(verdict.passed(), "{verdict:?}");
        stable(&g, &src, &a);
    }

    /// On micro-instances the search's best worst size is at least the
    /// planner's worst phase-end size, and both clear the guaranteed floor.
    #[test]
    fn mcm_planner_against_search(seed in any::<u64>(), n in 2usize..9) {
        let (g, s, t) = instance(seed, n, Weights::UNIT);
        prop_assume!(g.edge_count() <= 20 && s.len() + t.len() <= 8);
        let script = plan_mcm(&g, &s, &t).unwrap();
        let rep = replay(&g, &edges(&s), &script, Granularity::PerPhase, TOL).unwrap();
        let planner_worst = rep.snapshots[rep.worst].size as f64;
        let best = best_worst_quality(&g, &s, &t, 3, SearchGranularity::PhaseEnd, Quality::Size).unwrap().unwrap();
        let floor = (s.len() as f64).min(t.len() as f64 - 1.0).max(0.0);
        prop_assert!(planner_worst >= floor);
        prop_assert!(best >= planner_worst, "search {best} < planner {planner_worst}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Worst-case recourse stays within the budget and the output stays
    /// within the declared factor of the exact optimum.
    #[test]
    fn wrapper_bounds_on_small_streams(
        seed in any::<u64>(),
        n in 4usize..=14,
        eps in 0.05f64..=0.4,
        instant in any::<bool>(),
        batch in any::<bool>(),
    ) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let ups = update_stream(
            &mut r,
            StreamSpec { n, steps: 250, target_edges: 2 * n, weights: Weights::UNIT, vertex_rate: 0.03 },
        );
        let mut cfg = WrapperConfig::new(eps, Mode::Unweighted);
        if !instant {
            cfg.small_factor = 0;
        }
        let inner: Box<dyn gradual::wrapper::InnerAlgorithm> =
            if batch { Box::new(BatchRecompute::new(0.5, seed)) } else { Box::new(GreedyMaximal::new()) };
        let mut w = wrap(inner, cfg).unwrap();
        let factor = w.declared_approx();
        let rep = simulate(&mut Graph::new(), &mut w, &ups, OptCheck::Size).unwrap();
        prop_assert!(rep.max_recourse() <= cfg.recourse_budget());
        prop_assert!(w.over_budget().is_empty());
        for row in &rep.rows {
            let opt = row.opt_size.unwrap();
            prop_assert!(opt <= factor * row.output_size as f64 + 1e-9, "step {}: {opt} vs {}", row.step, row.output_size);
        }
    }

    #[test]
    fn weighted_wrapper_bounds(seed in any::<u64>(), n in 4usize..=12, psi in 1.0f64..8.0) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let ups = update_stream(
            &mut r,
            StreamSpec { n, steps: 200, target_edges: 2 * n, weights: Weights::bounded_ratio(psi), vertex_rate: 0.03 },
        );
        let mut cfg = WrapperConfig::new(0.2, Mode::Weighted { psi });
        cfg.small_factor = 0;
        let mut w = wrap(Box::new(BatchRecompute::weighted(0.5, seed)), cfg).unwrap();
        let factor = w.declared_approx();
        let rep = simulate(&mut Graph::new(), &mut w, &ups, OptCheck::Weight).unwrap();
        prop_assert!(rep.max_recourse() <= cfg.recourse_budget());
        for row in &rep.rows {
            let opt = row.opt_size.unwrap();
            prop_assert!(opt <= factor * row.output_weight * (1.0 + 1e-12) + 1e-9);
        }
    }

    /// A frozen maximum matching, after at most floor(eps |M|) updates with
    /// deleted edges dropped, is still a (1 + 2 eps)-approximation.
    #[test]
    fn stale_maximum_matching(seed in any::<u64>(), n in 4u32..=16, quarter in 1u64..=2) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let mut g = random_graph(&mut r, n as usize, 2 * n as usize, Weights::UNIT);
        let mut m = max_matching_exact(&g).unwrap();
        let allowed = (m.len() as u64 * quarter / 4) as usize;
        for _ in 0..allowed {
            let all: Vec<Edge> = g.edges().copied().collect();
            let ev = if r.gen_bool(0.5) && !all.is_empty() {
                let e = all[r.gen_range(0..all.len())];
                gradual::UpdateEvent::DeleteEdge { u: e.u, v: e.v }
            } else {
                let (u, v) = (r.gen_range(0..n), r.gen_range(0..n));
                if u == v || g.edge_between(u, v).is_some() {
                    continue;
                }
                gradual::UpdateEvent::InsertEdge { u, v, w: 1.0 }
            };
            for e in g.apply_update(&ev).unwrap().removed {
                m.remove(e.id);
            }
        }
        let opt = max_matching_exact(&g).unwrap().len() as u64;
        // opt <= (1 + 2 q/4) |m|
        prop_assert!(opt * 4 <= (4 + 2 * quarter) * m.len() as u64);
    }
}
