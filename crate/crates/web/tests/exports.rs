use positional_web::{box_trace_json, tree_playout_json, triangle_reply_json};

#[test]
fn box_trace_stays_under_bound() {
    let v = box_trace_json(10, 3, 300, "potential_greedy", 1).unwrap();
    assert_eq!(v["rounds"].as_array().unwrap().len(), 300);
    assert_eq!(v["violations"], 0);
    assert!(v["max_weight"].as_f64().unwrap() <= v["final_bound"].as_f64().unwrap());
    assert!(box_trace_json(0, 1, 1, "uniform", 0).is_err());
    assert!(box_trace_json(3, 1, 5, "nobody", 0).is_err());
}

#[test]
fn tree_playout_replays_embedding() {
    let v = tree_playout_json("spider", 31, "random", 1, 4).unwrap();
    assert_eq!(v["n"], 31);
    let placed: usize = v["moves"].as_array().unwrap().iter().map(|m| m["embed"].as_array().unwrap().len()).sum();
    if v["outcome"] == "maker_win" {
        assert_eq!(placed, 31);
        assert_eq!(v["verified"], true);
    }
    assert!(tree_playout_json("blob", 10, "random", 1, 0).is_err());
}

#[test]
fn triangle_delayer_blocks_the_third_edge() {
    let a = triangle_reply_json(6, "", "", 1, 2).unwrap();
    let r1: (usize, usize) = serde_json::from_value(a["reply"].clone()).unwrap();
    let maker = "[[1,2]]".to_string();
    let breaker = format!("[[{},{}]]", r1.0, r1.1);
    let b = triangle_reply_json(6, &maker, &breaker, 2, 3).unwrap();
    assert_eq!(b["reply"], serde_json::json!([1, 3]));
    assert_eq!(b["invariant"], true);
    assert!(triangle_reply_json(6, &maker, &breaker, 1, 2).is_err());
}
