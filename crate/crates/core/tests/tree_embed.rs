use std::sync::Arc;

use positional::adversary::{breaker_by_name, BREAKER_NAMES};
use positional::graph::Graph;
use positional::oracle::checks::verify_tree_copy;
use positional::rng::stream_rng;
use positional::tree::{ThresholdConfig, TreeCase, TreeEmbedMaker, TreeSpec};
use positional::{run_game, Bias, Board, GameSetup, Outcome, Side, Strategy, WinRule};

fn play(tree: &TreeSpec, breaker: &str, seed: u64) -> (positional::Transcript, positional::GameState, TreeEmbedMaker) {
    let n = tree.n();
    let board = Arc::new(Board::complete(n).unwrap());
    let mut maker = TreeEmbedMaker::new(tree.clone(), n, 1, ThresholdConfig::default(), seed).unwrap();
    let mut br = breaker_by_name(breaker, seed).unwrap();
    let setup = GameSetup::new("tree-embed", Bias::new(1, 1).unwrap(), Side::Maker, seed);
    let (t, s) = run_game(board, &setup, &mut maker, br.as_mut(), &WinRule::MakerDeclared);
    (t, s, maker)
}

fn check(tree: &TreeSpec, t: &positional::Transcript, s: &positional::GameState, m: &TreeEmbedMaker) -> bool {
    if let Outcome::MakerWin { .. } = t.outcome {
        let host = Graph::from_edges(tree.n(), &s.maker_edges());
        assert!(verify_tree_copy(tree, &host, m.embedding().map()).unwrap());
        assert!(m.completed(s));
        true
    } else {
        false
    }
}

#[test]
fn case_two_path_vs_null_takes_n_minus_one_moves() {
    for n in [30, 40, 80] {
        let tree = TreeSpec::path(n).unwrap();
        let (t, s, m) = play(&tree, "null", 1);
        assert_eq!(m.case(), TreeCase::CaseII);
        assert!(check(&tree, &t, &s, &m), "{:?}", t.outcome);
        assert_eq!(t.maker_moves(), n - 1);
    }
}

#[test]
fn case_one_spider_vs_null() {
    let tree = TreeSpec::spider(20, 3).unwrap();
    let (t, s, m) = play(&tree, "null", 3);
    assert_eq!(m.case(), TreeCase::CaseI);
    assert!(check(&tree, &t, &s, &m), "{:?}", t.outcome);
    assert_eq!(t.maker_moves(), tree.n() - 1);
}

#[test]
fn shapes_vs_zoo() {
    let mut rng = stream_rng(9, 4);
    let trees = vec![
        TreeSpec::spider(20, 3).unwrap(),
        TreeSpec::path(50).unwrap(),
        TreeSpec::h_tree(12).unwrap(),
        TreeSpec::random_bounded(60, 4, &mut rng).unwrap(),
    ];
    for tree in &trees {
        for &b in BREAKER_NAMES {
            let mut wins = 0;
            let mut forfeits = Vec::new();
            for seed in 0..10 {
                let (t, s, m) = play(tree, b, seed);
                if check(tree, &t, &s, &m) {
                    wins += 1;
                } else {
                    forfeits.push(format!("{:?}", t.outcome));
                }
            }
            println!("n={} case={:?} breaker={b}: {wins}/10 {:?}", tree.n(), play(tree, "null", 0).2.case(), forfeits.first());
        }
    }
}
