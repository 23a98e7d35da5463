use num_rational::Rational64 as Q;
use proptest::prelude::*;
use rand::seq::{IndexedRandom, SliceRandom};

use igsim::dynamics::{
    run_election, voter_streams, ElectionConfig, Phase, StepContext, StickTarget, StrategyMatrix,
};
use igsim::experiments::{least_squares, pearson};
use igsim::graph::poll_fractions;
use igsim::metrics::*;
use igsim::{build_caveman, generate_hrc, Graph, HrcParams, PartyAssignment, PartyId, Seed};

const DOM: AssortmentConvention = AssortmentConvention::DominantNegative;
const COMP: AssortmentConvention = AssortmentConvention::ComplementNegative;

fn assignment(votes: &[usize], parties: usize) -> PartyAssignment {
    let names = (0..parties).map(|p| format!("p{p}")).collect();
    PartyAssignment::new(names, votes.iter().map(|&p| PartyId(p)).collect()).unwrap()
}

/// Votes over `parties` parties in which every party has at least one voter.
fn votes_strategy(n: usize, parties: usize) -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::vec(0..parties, n - parties).prop_shuffle().prop_map(move |mut v| {
        v.extend(0..parties);
        v
    })
    .prop_shuffle()
}

fn random_graph(n: usize) -> impl Strategy<Value = Graph> {
    proptest::collection::vec((0..n, 0..n), 0..3 * n).prop_map(move |pairs| {
        let edges: Vec<(usize, usize)> = pairs.into_iter().filter(|(u, v)| u != v).collect();
        let mut g = Graph::new(n);
        for (u, v) in edges {
            if !g.has_edge(u, v) {
                g.add_edge(u, v).unwrap();
            }
        }
        g
    })
}

fn graph_and_votes(parties: usize) -> impl Strategy<Value = (Graph, Vec<usize>)> {
    (parties.max(2)..14usize).prop_flat_map(move |n| (random_graph(n), votes_strategy(n, parties)))
}

fn hrc_case() -> impl Strategy<Value = (HrcParams, PartyAssignment, u64)> {
    (1..6usize, 2..7usize, 0.0..=1.0f64, 0.0..=1.0f64, any::<u64>()).prop_flat_map(|(l, k, p0, h, seed)| {
        let n = l * k;
        (1..n).prop_map(move |n_red| {
            let counts = [("red".to_string(), n_red), ("blue".to_string(), n - n_red)];
            let a = PartyAssignment::strong(&counts, n, Seed(seed).child(0, 0)).unwrap();
            (HrcParams::new(l, k, p0, h), a, seed)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn polls_sum_to_one_on_generated_graphs((params, a, seed) in hrc_case()) {
        let g = generate_hrc(&params, &a, Seed(seed)).unwrap();
        prop_assert_eq!(g.node_count(), params.node_count());
        for n in 0..g.node_count() {
            let total: f64 = poll_fractions(&g, &a, n).iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn generation_is_deterministic((params, a, seed) in hrc_case()) {
        let x = generate_hrc(&params, &a, Seed(seed)).unwrap();
        let y = generate_hrc(&params, &a, Seed(seed)).unwrap();
        prop_assert_eq!(x.edges().collect::<Vec<_>>(), y.edges().collect::<Vec<_>>());
    }

    #[test]
    fn conventions_coincide_for_two_parties((g, votes) in graph_and_votes(2)) {
        let a = assignment(&votes, 2);
        for n in 0..g.node_count() {
            prop_assert_eq!(node_assortment::<Q>(&g, &a, n, DOM), node_assortment::<Q>(&g, &a, n, COMP));
        }
    }

    #[test]
    fn conventions_coincide_on_rings(n in 3..16usize, seed in any::<u64>(), parties in 2..5usize) {
        prop_assume!(parties <= n);
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        let g = Graph::from_edges(n, &edges).unwrap();
        let mut votes: Vec<usize> = (0..n).map(|i| i % parties).collect();
        votes.shuffle(&mut Seed(seed).rng());
        let a = assignment(&votes, parties);
        for n in 0..g.node_count() {
            prop_assert_eq!(node_assortment::<Q>(&g, &a, n, DOM), node_assortment::<Q>(&g, &a, n, COMP));
        }
    }

    #[test]
    fn two_party_gaps_are_antisymmetric((g, votes) in graph_and_votes(2)) {
        let a = assignment(&votes, 2);
        for conv in [DOM, COMP] {
            let gaps = influence_gaps::<Q>(&g, &a, conv).unwrap();
            prop_assert_eq!(gaps[0], -gaps[1]);
        }
    }

    #[test]
    fn assortments_and_gaps_are_bounded((g, votes) in graph_and_votes(3)) {
        let a = assignment(&votes, 3);
        for conv in [DOM, COMP] {
            for n in 0..g.node_count() {
                let x = node_assortment::<Q>(&g, &a, n, conv);
                prop_assert!(x >= Q::from(-1) && x <= Q::from(1));
            }
            for p in 0..3 {
                for gconv in [GapConvention::VsMostInfluential, GapConvention::VsPluralityRunnerUp] {
                    for gap in influence_gap::<Q>(&g, &a, PartyId(p), conv, gconv).unwrap() {
                        prop_assert!(gap >= Q::from(-2) && gap <= Q::from(2));
                    }
                }
            }
        }
    }

    #[test]
    fn closed_form_matches_definition(l in 1..=6usize, k in 2..=8usize, seed in any::<u64>()) {
        let n = l * k;
        let mut rng = Seed(seed).rng();
        let n_red = rand::Rng::random_range(&mut rng, 1..n);
        let mut votes: Vec<usize> = (0..n).map(|i| usize::from(i >= n_red)).collect();
        votes.shuffle(&mut rng);
        let g = build_caveman(l, k).unwrap();
        let a = assignment(&votes, 2);
        let mut reds = vec![0; l];
        for (v, &p) in votes.iter().enumerate() {
            if p == 0 {
                reds[g.clique_of(v).unwrap()] += 1;
            }
        }
        let counts = CliqueCounts::new(&reds, k).unwrap();
        let direct = influence_gaps::<f64>(&g, &a, DOM).unwrap()[0];
        let closed: f64 = caveman_gap_closed(&counts, n_red, n - n_red).unwrap();
        prop_assert!((direct - closed).abs() <= 1e-12);
        prop_assert!(counts.strict_majorities() <= counts.weak_majorities());
        prop_assert_eq!(counts.marginal(), counts.weak_majorities() - counts.strict_majorities());
        for d in 1..=l {
            prop_assert!(counts.prefix_sum(d - 1) <= counts.prefix_sum(d));
        }
        if 2 * n_red == n {
            let eq: Q = equal_rep_gap(counts.strict_majorities(), counts.weak_majorities(), l).unwrap();
            let exact: Q = caveman_gap_closed(&counts, n_red, n - n_red).unwrap();
            prop_assert_eq!(eq, exact);
        }
    }

    #[test]
    fn removing_a_loser_edge_helps_the_winner(n in 4..=12usize, seed in any::<u64>()) {
        let mut rng = Seed(seed).rng();
        let winner = n / 2 + 1;
        let parties = rand::Rng::random_range(&mut rng, 2..=3.min(n - winner + 1));
        let mut votes: Vec<usize> = vec![0; winner];
        for i in 0..n - winner {
            votes.push(1 + i % (parties - 1));
        }
        votes.shuffle(&mut rng);
        let a = assignment(&votes, parties);
        let g = build_caveman(1, n).unwrap();
        let losers: Vec<(usize, usize)> = g.edges().filter(|&(u, v)| votes[u] != 0 && votes[v] != 0).collect();
        prop_assume!(!losers.is_empty());
        let &(u, v) = losers.choose(&mut rng).unwrap();
        let before = influence_gaps::<Q>(&g, &a, DOM).unwrap();
        let mut cut = g.clone();
        cut.remove_edge(u, v);
        let after = influence_gaps::<Q>(&cut, &a, DOM).unwrap();
        prop_assert!(after[0] >= before[0]);
        prop_assert!(after[votes[u]] <= before[votes[u]]);
        prop_assert!(after[votes[v]] <= before[votes[v]]);
    }

    #[test]
    fn single_rewire_moves_the_gap_a_little(l in 2..=6usize, k in 2..=6usize, seed in any::<u64>()) {
        let n = l * k;
        let mut rng = Seed(seed).rng();
        let n_red = rand::Rng::random_range(&mut rng, 1..n);
        let mut votes: Vec<usize> = (0..n).map(|i| usize::from(i >= n_red)).collect();
        votes.shuffle(&mut rng);
        let a = assignment(&votes, 2);
        let g = build_caveman(l, k).unwrap();
        let edges: Vec<(usize, usize)> = g.edges().collect();
        let &(u, v) = edges.choose(&mut rng).unwrap();
        let targets: Vec<usize> = (0..n).filter(|&t| g.clique_of(t) != g.clique_of(u)).collect();
        let &t = targets.choose(&mut rng).unwrap();
        let mut moved = g.clone();
        moved.remove_edge(u, v);
        moved.add_edge(u, t).unwrap();
        let before = influence_gaps::<f64>(&g, &a, DOM).unwrap()[0];
        let after = influence_gaps::<f64>(&moved, &a, DOM).unwrap()[0];
        let size = |x: usize| if votes[x] == 0 { n_red } else { n - n_red } as f64;
        let bound: f64 = [u, v, t].iter().map(|&x| 2.0 / size(x)).sum();
        prop_assert!((after - before).abs() <= bound + 1e-12);
    }

    #[test]
    fn pearson_symmetric_and_affine_invariant(
        pairs in proptest::collection::vec((-100.0..100.0f64, -100.0..100.0f64), 3..40),
        scale in 0.01..50.0f64,
        shift in -100.0..100.0f64,
    ) {
        let (xs, ys): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let (Ok(r), Ok(back)) = (pearson(&xs, &ys), pearson(&ys, &xs)) else {
            return Ok(());
        };
        prop_assert!((r - back).abs() < 1e-12);
        let moved: Vec<f64> = xs.iter().map(|x| scale * x + shift).collect();
        prop_assert!((pearson(&moved, &ys).unwrap() - r).abs() < 1e-9);
        prop_assert!(r.abs() <= 1.0);
    }

    #[test]
    fn least_squares_residuals_are_orthogonal(
        rows in proptest::collection::vec(proptest::collection::vec(-10.0..10.0f64, 2), 8..60),
        noise in proptest::collection::vec(-1.0..1.0f64, 60),
    ) {
        let target: Vec<f64> = rows.iter().zip(&noise).map(|(r, e)| 0.3 * r[0] - 1.2 * r[1] + 4.0 + e).collect();
        let Ok(fit) = least_squares(&rows, &target) else {
            return Ok(());
        };
        let resid: Vec<f64> = rows.iter().zip(&target).map(|(r, y)| y - fit.predict(r)).collect();
        prop_assert!(resid.iter().sum::<f64>().abs() < 1e-8);
        for j in 0..2 {
            let dot: f64 = rows.iter().zip(&resid).map(|(r, e)| r[j] * e).sum();
            prop_assert!(dot.abs() < 1e-8);
        }
    }

    #[test]
    fn step_is_synchronous((g, votes) in graph_and_votes(3), p in 0.0..=1.0f64, seed in any::<u64>()) {
        let a = assignment(&votes, 3);
        let n = g.node_count();
        let strategies = StrategyMatrix::constant(n, p).unwrap();
        let current: Vec<PartyId> = (0..n).map(|v| PartyId((votes[v] + v) % 3)).collect();
        for stick in [StickTarget::Current, StickTarget::Assigned] {
            let ctx = StepContext {
                graph: &g,
                assigned: a.votes(),
                party_count: 3,
                strategies: &strategies,
                phase: Phase::Late,
                threshold: 0.6,
                stick,
            };
            let mut rngs = voter_streams(Seed(seed), n);
            let forward = igsim::dynamics::step(&ctx, &current, &mut rngs);
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut Seed(seed ^ 1).rng());
            let mut rngs = voter_streams(Seed(seed), n);
            let mut counts = vec![0; 3];
            let mut permuted = vec![PartyId(0); n];
            for &v in &order {
                permuted[v] = ctx.update_voter(v, &current, &mut counts, &mut rngs[v]);
            }
            prop_assert_eq!(&forward, &permuted);
        }
    }

    #[test]
    fn elections_conserve_voters((params, a, seed) in hrc_case(), p in 0.0..=1.0f64) {
        let g = generate_hrc(&params, &a, Seed(seed)).unwrap();
        let strategies = StrategyMatrix::constant(g.node_count(), p).unwrap();
        for stick in [StickTarget::Current, StickTarget::Assigned] {
            let cfg = ElectionConfig { stick, ..ElectionConfig::default() };
            let out = run_election(&g, &a, &cfg, &strategies, Seed(seed)).unwrap();
            let again = run_election(&g, &a, &cfg, &strategies, Seed(seed)).unwrap();
            prop_assert_eq!(&out, &again);
            prop_assert_eq!(out.final_votes.len(), g.node_count());
            for tick in &out.trajectory {
                prop_assert!((tick.shares.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
            if stick == StickTarget::Current {
                for party in 0..2 {
                    let gone = out.trajectory.iter().position(|t| t.shares[party] == 0.0);
                    if let Some(at) = gone {
                        prop_assert!(out.trajectory[at..].iter().all(|t| t.shares[party] == 0.0));
                    }
                }
            }
        }
    }
}

#[test]
fn default_schedule_has_25_early_and_47_late_ticks() {
    let cfg = ElectionConfig::default();
    let phases: Vec<Phase> = (1..=cfg.tick_count()).map(|t| cfg.phase(t)).collect();
    let early = phases.iter().filter(|&&p| p == Phase::Early).count();
    assert_eq!((early, phases.len() - early), (25, 47));
}
