use std::sync::Arc;

use positional::adversary::{MaxDegreeBreaker, RandomPlayer};
use positional::graph::Graph;
use positional::oracle::checks::{hamilton_connected_oracle, is_hamilton_path, perfect_matching_oracle};
use positional::parallel::SoloMaker;
use positional::subgames::{BipartiteBoard, HamPathMaker, HamPathParams, HamconMaker, HamconParams, MatchingMaker, Mode};
use positional::subgames::hampath::Stage2;
use positional::{run_game, Bias, Board, GameSetup, Outcome, Side, Strategy, WinRule};

fn matching_run(r: usize, seed: u64, breaker: &mut dyn Strategy) -> (Outcome, bool) {
    let board = Arc::new(Board::bipartite(r).unwrap());
    let bb = BipartiteBoard::complete(&board, 0).unwrap();
    let m = MatchingMaker::new(bb, 1, Mode::Exact, 1_000_000, board.size()).unwrap();
    let mut maker = SoloMaker::new(m);
    let setup = GameSetup::new("matching", Bias::new(1, 1).unwrap(), Side::Maker, seed);
    let (t, state) = run_game(board, &setup, &mut maker, breaker, &WinRule::MakerDeclared);
    let adj = maker.inner.board().maker_adjacency(&state);
    (t.outcome, perfect_matching_oracle(r, &adj).is_some())
}

#[test]
fn k44_exact_matching_vs_random() {
    for seed in 0..100 {
        let (outcome, has) = matching_run(4, seed, &mut RandomPlayer::breaker(seed));
        assert!(matches!(outcome, Outcome::MakerWin { .. }), "seed {seed}: {outcome:?}");
        assert!(has);
    }
}

#[test]
fn matching_completion_is_verified_by_the_oracle() {
    for r in 4..=7 {
        for seed in 0..5 {
            let (outcome, has) = matching_run(r, seed, &mut MaxDegreeBreaker);
            assert_eq!(matches!(outcome, Outcome::MakerWin { .. }), has, "r={r} seed={seed}");
        }
    }
}

#[test]
fn matching_heuristic_on_a_region_of_kn() {
    let board = Arc::new(Board::complete(20).unwrap());
    let state = positional::GameState::new(board.clone());
    let bb = BipartiteBoard::from_state(&state, (0..8).collect(), (10..18).collect(), 0).unwrap();
    let m = MatchingMaker::new(bb, 1, Mode::Heuristic, 1_000_000, board.size()).unwrap();
    let mut maker = SoloMaker::new(m);
    let setup = GameSetup::new("matching", Bias::new(1, 1).unwrap(), Side::Maker, 3);
    let (t, _) = run_game(board, &setup, &mut maker, &mut RandomPlayer::breaker(3), &WinRule::MakerDeclared);
    assert!(matches!(t.outcome, Outcome::MakerWin { .. }), "{:?}", t.outcome);
}

#[test]
fn hamcon_k8_exact_vs_random() {
    let mut wins = 0;
    for seed in 0..50 {
        let board = Arc::new(Board::complete(8).unwrap());
        let state = positional::GameState::new(board.clone());
        let h = HamconMaker::new(&state, (0..8).collect(), None, 1, HamconParams { mode: Mode::Exact, ..Default::default() }, seed).unwrap();
        let mut maker = SoloMaker::new(h);
        let setup = GameSetup::new("hamcon", Bias::new(1, 1).unwrap(), Side::Maker, seed);
        let (t, state) = run_game(board, &setup, &mut maker, &mut RandomPlayer::breaker(seed), &WinRule::MakerDeclared);
        let g = Graph::from_edges(8, &state.maker_edges());
        let won = matches!(t.outcome, Outcome::MakerWin { .. });
        assert_eq!(won, hamilton_connected_oracle(&g, 12) == Some(true), "seed {seed}");
        wins += won as usize;
    }
    // 14 Maker moves on 28 edges leave little room; a few seeds are lost
    assert!(wins >= 45, "wins {wins}");
}

fn hampath_run(k: usize, seed: u64, params: HamPathParams) -> (Outcome, Option<Vec<usize>>, Graph) {
    let board = Arc::new(Board::complete(k).unwrap());
    let state = positional::GameState::new(board.clone());
    let h = HamPathMaker::new(&state, (0..k).collect(), 0, k - 1, 1, params, seed).unwrap();
    let mut maker = SoloMaker::new(h);
    let setup = GameSetup::new("hampath", Bias::new(1, 1).unwrap(), Side::Maker, seed);
    let (t, state) = run_game(board, &setup, &mut maker, &mut RandomPlayer::breaker(seed), &WinRule::MakerDeclared);
    let path = maker.inner.path(&state);
    (t.outcome, path, Graph::from_edges(k, &state.maker_edges()))
}

#[test]
fn hampath_k30_vs_random() {
    let mut wins = 0;
    for seed in 0..100 {
        let (outcome, path, g) = hampath_run(30, seed, HamPathParams::default());
        if matches!(outcome, Outcome::MakerWin { .. }) {
            wins += 1;
            assert!(is_hamilton_path(&g, &path.unwrap(), 0, 29));
        }
    }
    assert!(wins >= 90, "wins {wins}");
}

#[test]
fn hampath_stage1_runs_with_lowered_exponents() {
    let params = HamPathParams { gamma: 0.02, beta: 0.3, ..Default::default() };
    let mut wins = 0;
    for seed in 0..20 {
        let (outcome, path, g) = hampath_run(40, seed, params.clone());
        if matches!(outcome, Outcome::MakerWin { .. }) {
            wins += 1;
            assert!(is_hamilton_path(&g, &path.unwrap(), 0, 39));
        }
    }
    assert!(wins >= 15, "wins {wins}");
}

#[test]
fn hampath_with_hamcon_stage2() {
    let params = HamPathParams { stage2: Stage2::Hamcon, ..Default::default() };
    for seed in 0..10 {
        let (outcome, path, g) = hampath_run(10, seed, params.clone());
        if matches!(outcome, Outcome::MakerWin { .. }) {
            assert!(is_hamilton_path(&g, &path.unwrap(), 0, 9));
        }
    }
}

