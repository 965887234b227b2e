//! Three engine operations for the static page in `www/`: a box-game
//! weight trace, a tree-embedding playout and the triangle delayer as an
//! interactive opponent. Every export takes plain numbers or strings and
//! returns a JSON string; errors come back as `{"error": "..."}`.

use std::sync::Arc;

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use positional::adversary::TriangleDelayer;
use positional::boxgame::{adversary_by_name, continuous_bound, play_rbox, BoxMode};
use positional::experiment::{play_one, ExperimentConfig};
use positional::graph::Graph;
use positional::oracle::checks::{triangle_factor, triangle_invariant_check};
use positional::{Board, GameState, Side, Strategy};

fn wrap(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

pub fn box_trace_json(m: usize, q: usize, rounds: usize, adversary: &str, seed: u64) -> Result<Value, String> {
    if m == 0 || q == 0 || rounds == 0 || m > 200 || rounds > 20_000 {
        return Err("need 1 <= m <= 200, q >= 1, 1 <= rounds <= 20000".into());
    }
    let mut adv = adversary_by_name(adversary, seed).map_err(|e| e.to_string())?;
    let t = play_rbox(m, BoxMode::Integral { q }, rounds, adv.as_mut(), true).map_err(|e| e.to_string())?;
    let scale = q as f64;
    let rows: Vec<Value> = t
        .rounds
        .iter()
        .map(|r| {
            json!({
                "round": r.round,
                "weights": r.weights.iter().map(|w| w * scale).collect::<Vec<_>>(),
                "reset": r.reset,
                "phi": r.phi_after_reset,
                "bound": r.bound * scale,
            })
        })
        .collect();
    Ok(json!({
        "m": m,
        "q": q,
        "adversary": t.adversary,
        "rounds": rows,
        "max_weight": t.max_weight * scale,
        "final_bound": continuous_bound(m, rounds) * scale,
        "violations": t.violations.len(),
    }))
}

/// `q(1 + ln(m + k))`-bounded weights of BoxMaker `adversary` over `rounds`
/// rounds of the reset game, in claim units.
#[wasm_bindgen]
pub fn box_trace(m: usize, q: usize, rounds: usize, adversary: &str, seed: u32) -> String {
    wrap(box_trace_json(m, q, rounds, adversary, seed as u64))
}

fn shape_toml(shape: &str, n: usize) -> Result<String, String> {
    if !(4..=120).contains(&n) {
        return Err("tree size must be between 4 and 120".into());
    }
    Ok(match shape {
        "path" => format!("shape = \"path\"\nn = {n}"),
        "spider" => format!("shape = \"spider\"\nlegs = {}\nleg_len = 2", (n - 1) / 2),
        "h_tree" => format!("shape = \"h_tree\"\nleg_len = {}", ((n - 2) / 4).max(1)),
        "random" => format!("shape = \"random_bounded\"\nn = {n}\nmax_degree = 4"),
        "caterpillar" => format!("shape = \"caterpillar\"\nspine = {}", n / 2),
        other => return Err(format!("unknown shape `{other}`")),
    })
}

pub fn tree_playout_json(shape: &str, n: usize, breaker: &str, q: usize, seed: u64) -> Result<Value, String> {
    let text = format!("kind = \"tree-embed\"\nseeds = 1\nbias = \"1:{q}\"\nbreakers = [{breaker:?}]\n[tree]\n{}\n", shape_toml(shape, n)?);
    let cfg = ExperimentConfig::from_toml(&text).map_err(|e| e.to_string())?;
    let (t, _) = play_one(&cfg, "tree_embed", breaker, seed).map_err(|e| e.to_string())?;
    let board = Board::from_spec(&t.board).map_err(|e| e.to_string())?;
    let moves: Vec<Value> = t
        .moves
        .iter()
        .map(|m| {
            let edges: Vec<(usize, usize)> = m.elements.iter().map(|&e| board.endpoints(e)).collect();
            let embed: Vec<(usize, usize)> = m
                .note
                .split_whitespace()
                .filter_map(|tok| tok.strip_prefix("embed="))
                .filter_map(|p| p.split_once(':'))
                .filter_map(|(x, v)| Some((x.parse().ok()?, v.parse().ok()?)))
                .collect();
            json!({ "player": m.player, "edges": edges, "note": m.note, "embed": embed })
        })
        .collect();
    let reason = match &t.outcome {
        positional::Outcome::Forfeit { reason, .. } => Some(reason.clone()),
        _ => None,
    };
    Ok(json!({
        "n": t.params["maker"]["n"],
        "tree": t.params["maker"]["tree"],
        "case": t.params["maker"]["case"],
        "outcome": t.outcome.label(),
        "forfeit": reason,
        "verified": t.report["final"]["verified"],
        "maker_moves": t.maker_moves(),
        "moves": moves,
    }))
}

/// A full tree-embedding game on `K_n`; moves carry the embedding steps.
#[wasm_bindgen]
pub fn tree_playout(shape: &str, n: usize, breaker: &str, q: usize, seed: u32) -> String {
    wrap(tree_playout_json(shape, n, breaker, q, seed as u64))
}

fn parse_edges(text: &str) -> Result<Vec<(usize, usize)>, String> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    serde_json::from_str(text).map_err(|e| format!("bad edge list: {e}"))
}

pub fn triangle_reply_json(n: usize, maker: &str, breaker: &str, u: usize, v: usize) -> Result<Value, String> {
    if !(3..=30).contains(&n) {
        return Err("n must be between 3 and 30".into());
    }
    let board = Arc::new(Board::complete(n).map_err(|e| e.to_string())?);
    let mut state = GameState::new(board.clone());
    let edge = |a: usize, b: usize| board.edge(a, b).ok_or_else(|| format!("({a}, {b}) is not an edge of K_{n}"));
    let (mk, bk) = (parse_edges(maker)?, parse_edges(breaker)?);
    for (i, &(a, b)) in mk.iter().enumerate() {
        state.apply_move(Side::Maker, &[edge(a, b)?]).map_err(|e| e.to_string())?;
        if let Some(&(c, d)) = bk.get(i) {
            state.apply_move(Side::Breaker, &[edge(c, d)?]).map_err(|e| e.to_string())?;
        }
    }
    let e = edge(u, v)?;
    if !state.is_free(e) {
        return Err(format!("edge {u}-{v} is already taken"));
    }
    state.apply_move(Side::Maker, &[e]).map_err(|e| e.to_string())?;
    let reply = if state.free_count() > 0 {
        let d = TriangleDelayer.choose(&state, &[e], 1);
        state.apply_move(Side::Breaker, &d.claims).map_err(|e| e.to_string())?;
        d.claims.first().map(|&c| board.endpoints(c))
    } else {
        None
    };
    let g = Graph::from_edges(n, &state.maker_edges());
    Ok(json!({
        "reply": reply,
        "invariant": triangle_invariant_check(&g),
        "factor": triangle_factor(&g),
        "free": state.free_count(),
    }))
}

/// Applies Maker's claim `u-v` after the history (`maker` and `breaker` are
/// JSON edge lists in play order) and returns the delayer's answer.
#[wasm_bindgen]
pub fn triangle_reply(n: usize, maker: &str, breaker: &str, u: usize, v: usize) -> String {
    wrap(triangle_reply_json(n, maker, breaker, u, v))
}
