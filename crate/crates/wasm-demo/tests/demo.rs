use inaccessible_wasm_demo::{explore_bloch, lattice_levels, monotonicity_curve};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn bloch_explorer_flags_states_outside_the_ball() {
    let pure = parse(explore_bloch(0.0, 0.0, 1.0).unwrap());
    assert_eq!(pure["admissible"], true);
    assert_eq!(pure["pure"], true);
    assert!((pure["chi"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(pure["marginals"][2], serde_json::json!([1.0, 0.0]));

    let outside = parse(explore_bloch(1.0, 1.0, 0.0).unwrap());
    assert_eq!(outside["admissible"], false);
    assert_eq!(outside["positive"], false);
    assert!(outside["chi"].as_f64().unwrap() < 2.0);
}

#[test]
fn lattice_levels_cover_every_statement() {
    let v = parse(lattice_levels(4, 2).unwrap());
    let levels = v["levels"].as_array().unwrap();
    let sizes: Vec<usize> = levels.iter().map(|l| l.as_array().unwrap().len()).collect();
    assert_eq!(sizes, vec![1, 4, 6, 4, 1]);
    let accessible_pairs = levels[2]
        .as_array()
        .unwrap()
        .iter()
        .filter(|s| s["accessible"] == true)
        .count();
    assert_eq!(accessible_pairs, 2);
    assert!(lattice_levels(7, 2).is_err());
}

#[test]
fn curve_is_monotone_left_of_one_half() {
    let v = parse(monotonicity_curve(50).unwrap());
    let all = v["rows"].as_array().unwrap();
    assert!(all.len() >= 49);
    let rows: Vec<&Value> = all
        .iter()
        .filter(|r| r[0].as_f64().unwrap() <= 0.5)
        .collect();
    assert!(rows.len() > 10);
    let col = |k: usize| -> Vec<f64> { rows.iter().map(|r| r[k].as_f64().unwrap()).collect() };
    assert!(col(1).windows(2).all(|w| w[1] < w[0]));
    assert!(col(2).windows(2).all(|w| w[1] > w[0]));
    assert!(col(3).windows(2).all(|w| w[1] > w[0]));
    assert!(monotonicity_curve(1).is_err());
}
