use boxnet_core::evolution::{initial_population, Snapshot};
use boxnet_core::tournament::{evaluate_snapshots, evaluate_winrate, role_wins};
use boxnet_core::{EvolutionConfig, Genome, Level0, Level1, Level2, Network, Serial, Variant};

fn snapshot(generation: usize, cumulative_games: u64, genomes: Vec<Genome>) -> Snapshot {
    Snapshot {
        generation,
        cumulative_games,
        variant: Variant::Direct { opponent: 0 },
        seed: 0,
        raw_fitness: vec![0.0; genomes.len()],
        genomes,
    }
}

#[test]
fn level0_self_play_is_balanced() {
    let r = evaluate_winrate(&Level0, &Level0, 20_000, 12, &Serial).unwrap();
    assert!((r.win_rate - 0.5).abs() <= 0.011, "{}", r.win_rate);
}

#[test]
fn ladder_is_ordered() {
    let l1 = evaluate_winrate(&Level1, &Level0, 2000, 1, &Serial).unwrap();
    let l2 = evaluate_winrate(&Level2, &Level1, 2000, 1, &Serial).unwrap();
    assert!(l1.win_rate > 0.98);
    assert!(l2.win_rate > 0.75);
    assert_eq!(l1.games, 2000);
}

#[test]
fn roles_alternate() {
    let [first, second] = role_wins(&Level1, &Level0, 400, 3, &Serial).unwrap();
    assert!(first <= 200 && second <= 200);
    assert!(first + second > 390);
}

#[test]
fn curve_tracks_the_best_member() {
    let level1 = Genome::encode(&Network::level1()).unwrap();
    let cfg = EvolutionConfig {
        population_size: 10,
        ..Default::default()
    };
    let random = initial_population(&cfg);
    let mut with_expert = random.clone();
    with_expert[3] = level1;
    let snaps = [snapshot(5, 500, with_expert), snapshot(0, 0, random)];
    let curve = evaluate_snapshots(&snaps, &Level0, 200, 9, &Serial).unwrap();
    assert_eq!(curve[0].cumulative_games, 0);
    assert_eq!(curve[1].cumulative_games, 500);
    assert!(curve[0].best_win_rate > 0.55, "{}", curve[0].best_win_rate);
    assert!(curve[1].best_win_rate >= 0.99, "{}", curve[1].best_win_rate);
    assert_eq!(curve[0].variant, "direct:0");
}

#[test]
fn no_snapshots_no_curve() {
    assert!(evaluate_snapshots(&[], &Level0, 300, 0, &Serial)
        .unwrap()
        .is_empty());
}

#[test]
fn same_seed_same_record_and_roles_sum() {
    let a = evaluate_winrate(&Level2, &Level1, 600, 77, &Serial).unwrap();
    let b = evaluate_winrate(&Level2, &Level1, 600, 77, &Serial).unwrap();
    assert_eq!(a, b);
    let [first, second] = role_wins(&Level2, &Level1, 600, 77, &Serial).unwrap();
    assert_eq!(first + second, a.wins);
    let half = 1.96 * (a.win_rate * (1.0 - a.win_rate) / 600.0).sqrt();
    assert!((a.confidence_halfwidth - half).abs() < 1e-15);
}
