mod support;

use std::time::Duration;

use support::CASES;

#[test]
fn apply_d_obeys_leibniz_rule() {
    support::leibniz(CASES).unwrap();
}

#[test]
fn cofactors_add_under_products() {
    support::cofactor_closure(CASES).unwrap();
}

#[test]
fn exact_divide_undoes_multiplication() {
    support::exact_division(CASES).unwrap();
}

#[test]
fn render_then_parse_is_identity() {
    support::round_trip(CASES).unwrap();
}

#[test]
fn generated_equations_are_solved() {
    support::generate_round_trip(CASES).unwrap();
}

#[test]
fn heuristic_pairs_lie_in_the_ansatz_grid() {
    support::oracle_containment(CASES, Duration::from_secs(60)).unwrap();
}
