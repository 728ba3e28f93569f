use std::f64::consts::FRAC_PI_2;

use proptest::prelude::*;
use qkd_collective::attack::{evolve, AttackParams, Basis};
use qkd_collective::linalg::inner;
use qkd_collective::oracle::simulate;
use qkd_collective::usd::chi_total;

proptest! {
    #[test]
    fn oracle_matches_closed_form(alpha in 0.0..FRAC_PI_2, c in 0.0..=1.0f64, theta in 0.0..FRAC_PI_2) {
        let params = AttackParams::new(alpha, c, theta).unwrap();
        let closed = evolve(&params);
        let oracle = simulate(&params);
        for basis in Basis::BOTH {
            for i in 0..2 {
                for j in 0..2 {
                    let (a, b) = (closed.probs.get(basis, i, j), oracle.probs.get(basis, i, j));
                    prop_assert!((a - b).abs() < 1e-10);
                    if let (Some(u), Some(v)) = (closed.eve_states.get(basis, i, j), oracle.eve_states.get(basis, i, j)) {
                        prop_assert!((1.0 - inner(u, v).unwrap().norm()).abs() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn leakage_bounded_by_twice_ber(alpha in 0.0..=FRAC_PI_2, p_e in 0.001..0.249f64) {
        let r = chi_total(&AttackParams::from_ber(alpha, p_e).unwrap());
        prop_assert!(r.chi_total >= -1e-12);
        prop_assert!(r.chi_total <= 2.0 * p_e + 1e-9);
    }
}
