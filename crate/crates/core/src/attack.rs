//! Weak-measurement attack on a single-photon channel.
//!
//! The signal lives in a frame `{|p⟩, |q⟩}` that Eve's coupling leaves
//! invariant: `T|p⟩|E⟩ = |p⟩|E_p⟩` and `T|q⟩|E⟩ = |q⟩|E_q⟩`. Alice's two bases are
//! rotated against that frame by an angle `α`, with `a = cos α`, `b = sin α`:
//!
//! ```text
//! |0⟩ = a|p⟩ + b|q⟩           |+⟩ = ((a+b)|p⟩ − (a−b)|q⟩)/√2
//! |1⟩ = b|p⟩ − a|q⟩           |−⟩ = ((a−b)|p⟩ + (a+b)|q⟩)/√2
//! ```
//!
//! Every quantity below depends on Eve's states only through
//! `Re⟨E_p|E_q⟩ = c·cos θ`.

use crate::error::{check_range, Error, Result};
use crate::linalg::{DensityOperator, StateVector, C64};

/// Conditional states whose outcome probability is at or below this weight are
/// treated as absent.
pub const ABSENT_WEIGHT: f64 = 1e-24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    Z,
    X,
}

impl Basis {
    pub const BOTH: [Basis; 2] = [Basis::Z, Basis::X];

    /// Symbol labels for outcome index 0 and 1.
    pub fn symbols(self) -> [&'static str; 2] {
        match self {
            Basis::Z => ["0", "1"],
            Basis::X => ["+", "-"],
        }
    }
}

impl std::fmt::Display for Basis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Basis::Z => f.write_str("Z"),
            Basis::X => f.write_str("X"),
        }
    }
}

/// Eve's attack knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackParams {
    alpha: f64,
    overlap_c: f64,
    theta: f64,
}

impl AttackParams {
    pub fn new(alpha: f64, overlap_c: f64, theta: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::NonFinite("alpha"));
        }
        if !theta.is_finite() {
            return Err(Error::NonFinite("theta"));
        }
        check_range("overlap_c", overlap_c, 0.0, 1.0, "[0, 1]")?;
        Ok(AttackParams {
            alpha,
            overlap_c,
            theta,
        })
    }

    /// Attack tuned to a target total BER at the optimal phase `θ = 0`,
    /// i.e. `c = 1 − 4 p_e`.
    pub fn from_ber(alpha: f64, p_e: f64) -> Result<Self> {
        check_range("p_e", p_e, 0.0, 0.25, "[0, 0.25]")?;
        Self::new(alpha, 1.0 - 4.0 * p_e, 0.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn overlap_c(&self) -> f64 {
        self.overlap_c
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn a(&self) -> f64 {
        self.alpha.cos()
    }

    pub fn b(&self) -> f64 {
        self.alpha.sin()
    }

    /// `Re⟨E_p|E_q⟩ = c cos θ`.
    pub fn real_overlap(&self) -> f64 {
        self.overlap_c * self.theta.cos()
    }
}

/// Alice's four states written in the `{|p⟩, |q⟩}` frame.
#[derive(Debug, Clone, PartialEq)]
pub struct MubStates {
    pub zero: StateVector,
    pub one: StateVector,
    pub plus: StateVector,
    pub minus: StateVector,
}

impl MubStates {
    pub fn basis(&self, basis: Basis) -> [&StateVector; 2] {
        match basis {
            Basis::Z => [&self.zero, &self.one],
            Basis::X => [&self.plus, &self.minus],
        }
    }
}

pub fn mub_states(alpha: f64) -> MubStates {
    let (a, b) = (alpha.cos(), alpha.sin());
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let ket = |p: f64, q: f64| StateVector::from_real(&[p, q]).expect("finite 2-vector");
    MubStates {
        zero: ket(a, b),
        one: ket(b, -a),
        plus: ket(h * (a + b), -h * (a - b)),
        minus: ket(h * (a - b), h * (a + b)),
    }
}

/// `|E_p⟩ = (1, 0)` and `|E_q⟩ = (c e^{iθ}, √(1 − c²))` in an orthonormal Eve frame.
pub fn eve_frame(overlap_c: f64, theta: f64) -> Result<(StateVector, StateVector)> {
    check_range("overlap_c", overlap_c, 0.0, 1.0, "[0, 1]")?;
    if !theta.is_finite() {
        return Err(Error::NonFinite("theta"));
    }
    let e_p = StateVector::basis(2, 0)?;
    let e_q = StateVector::new(vec![
        C64::from_polar(overlap_c, theta),
        C64::new((1.0 - overlap_c * overlap_c).max(0.0).sqrt(), 0.0),
    ])?;
    Ok((e_p, e_q))
}

/// Eve's normalized post-measurement states indexed by `[sent][received]`.
///
/// `None` marks an outcome with zero weight, whose conditional state is undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct EveConditionalStates {
    pub z: [[Option<StateVector>; 2]; 2],
    pub x: [[Option<StateVector>; 2]; 2],
}

impl EveConditionalStates {
    pub fn get(&self, basis: Basis, sent: usize, received: usize) -> Option<&StateVector> {
        match basis {
            Basis::Z => self.z[sent][received].as_ref(),
            Basis::X => self.x[sent][received].as_ref(),
        }
    }
}

/// `p_{i,j}`: probability Bob finds `j` when Alice sent `i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionProbabilities {
    pub p00: f64,
    pub p01: f64,
    pub p10: f64,
    pub p11: f64,
    pub ppp: f64,
    pub ppm: f64,
    pub pmp: f64,
    pub pmm: f64,
}

impl TransitionProbabilities {
    pub fn get(&self, basis: Basis, sent: usize, received: usize) -> f64 {
        match (basis, sent, received) {
            (Basis::Z, 0, 0) => self.p00,
            (Basis::Z, 0, _) => self.p01,
            (Basis::Z, _, 0) => self.p10,
            (Basis::Z, _, _) => self.p11,
            (Basis::X, 0, 0) => self.ppp,
            (Basis::X, 0, _) => self.ppm,
            (Basis::X, _, 0) => self.pmp,
            (Basis::X, _, _) => self.pmm,
        }
    }

    /// Symbol-averaged flip probability in one basis.
    pub fn flip(&self, basis: Basis) -> f64 {
        0.5 * (self.get(basis, 0, 1) + self.get(basis, 1, 0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackOutcome {
    pub params: AttackParams,
    pub eve_states: EveConditionalStates,
    pub probs: TransitionProbabilities,
    pub ber_z: f64,
    pub ber_x: f64,
    pub ber_total: f64,
}

impl AttackOutcome {
    /// Builds the BER fields from `probs`; used by both the closed form and the oracle.
    pub fn assemble(
        params: AttackParams,
        eve_states: EveConditionalStates,
        probs: TransitionProbabilities,
    ) -> Self {
        let ber_z = probs.flip(Basis::Z);
        let ber_x = probs.flip(Basis::X);
        let ber_total = 0.25 * (probs.p01 + probs.p10 + probs.pmp + probs.ppm);
        AttackOutcome {
            params,
            eve_states,
            probs,
            ber_z,
            ber_x,
            ber_total,
        }
    }
}

/// Unnormalized amplitudes `(coef_p, coef_q)` of Eve's conditional state
/// `coef_p|E_p⟩ + coef_q|E_q⟩` and the factor `k` such that the state's norm is
/// `k·√p_{sent,received}`.
///
/// The flipped outcomes share one direction, `|E_p⟩ − |E_q⟩`.
pub fn eve_amplitudes(alpha: f64, basis: Basis, sent: usize, received: usize) -> (f64, f64, f64) {
    let (a, b) = (alpha.cos(), alpha.sin());
    match basis {
        Basis::Z => match (sent, received) {
            (0, 0) => (a * a, b * b, 1.0),
            (1, 1) => (b * b, a * a, 1.0),
            _ => (a * b, -a * b, 1.0),
        },
        Basis::X => {
            let (s, d) = ((a + b) * (a + b), (a - b) * (a - b));
            let diff = a * a - b * b;
            match (sent, received) {
                (0, 0) => (s, d, 2.0),
                (1, 1) => (d, s, 2.0),
                _ => (diff, -diff, 2.0),
            }
        }
    }
}

fn conditional_states(
    alpha: f64,
    basis: Basis,
    probs: &TransitionProbabilities,
    e_p: &StateVector,
    e_q: &StateVector,
) -> [[Option<StateVector>; 2]; 2] {
    let state = |sent: usize, received: usize| {
        let weight = probs.get(basis, sent, received);
        if weight <= ABSENT_WEIGHT {
            return None;
        }
        let (coef_p, coef_q, k) = eve_amplitudes(alpha, basis, sent, received);
        let norm = k * weight.sqrt();
        let v = e_p
            .scale(C64::new(coef_p / norm, 0.0))
            .add(&e_q.scale(C64::new(coef_q / norm, 0.0)))
            .expect("both in the 2-dim Eve frame");
        Some(v)
    };
    [[state(0, 0), state(0, 1)], [state(1, 0), state(1, 1)]]
}

/// Transition probabilities for a given `α` and real overlap `Re⟨E_p|E_q⟩`.
pub fn transition_probabilities(alpha: f64, real_overlap: f64) -> TransitionProbabilities {
    let (a, b) = (alpha.cos(), alpha.sin());
    let deficit = 1.0 - real_overlap;
    let a2b2 = a * a * b * b;
    let p01 = 2.0 * a2b2 * deficit;
    let p00 = 1.0 - p01;
    let ppm = 0.5 * (1.0 - 4.0 * a2b2) * deficit;
    let ppp = 1.0 - ppm;
    TransitionProbabilities {
        p00,
        p01,
        p10: p01,
        p11: p00,
        ppp,
        ppm,
        pmp: ppm,
        pmm: ppp,
    }
}

/// Closed-form channel: transition probabilities and Eve's conditional states.
pub fn evolve(params: &AttackParams) -> AttackOutcome {
    let (e_p, e_q) = eve_frame(params.overlap_c, params.theta).expect("validated params");
    let probs = transition_probabilities(params.alpha, params.real_overlap());
    let eve_states = EveConditionalStates {
        z: conditional_states(params.alpha, Basis::Z, &probs, &e_p, &e_q),
        x: conditional_states(params.alpha, Basis::X, &probs, &e_p, &e_q),
    };
    AttackOutcome::assemble(*params, eve_states, probs)
}

/// Lower bound `(1 − c cos θ)/4` on the total BER, attained for every `α`.
pub fn ber_lower_bound(overlap_c: f64, theta: f64) -> Result<f64> {
    check_range("overlap_c", overlap_c, 0.0, 1.0, "[0, 1]")?;
    Ok(0.25 * (1.0 - overlap_c * theta.cos()))
}

/// Bob's received state averaged over Alice's four inputs.
pub fn bob_state(params: &AttackParams) -> Result<DensityOperator> {
    let outcome = evolve(params);
    let p = &outcome.probs;
    let mub = mub_states(params.alpha);
    DensityOperator::mixture(&[
        (0.25 * (p.p00 + p.p10), &mub.zero),
        (0.25 * (p.p01 + p.p11), &mub.one),
        (0.25 * (p.ppp + p.pmp), &mub.plus),
        (0.25 * (p.ppm + p.pmm), &mub.minus),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalancedBer {
    pub ber_z: f64,
    pub ber_x: f64,
}

/// Per-basis BERs when Eve applies `T` and `T·H` with equal probability.
///
/// The Hadamard swaps which of Alice's bases sees the `Z`-type and `X`-type
/// disturbance, so each basis ends up with the average of the two.
pub fn balanced_attack(params: &AttackParams) -> BalancedBer {
    let outcome = evolve(params);
    let mean = 0.5 * (outcome.ber_z + outcome.ber_x);
    BalancedBer {
        ber_z: mean,
        ber_x: mean,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MdiLeak {
    /// `2 (p(e_A) + p(e_B))`.
    pub leak_bound: f64,
    /// Small-BER approximation `p(e_A) + p(e_B)` of the system BER.
    pub total_ber: f64,
}

/// Leakage bound for independent collective attacks on both MDI channels.
pub fn mdi_leak_bound(ber_a: f64, ber_b: f64) -> Result<MdiLeak> {
    check_range("ber_a", ber_a, 0.0, 0.5, "[0, 0.5]")?;
    check_range("ber_b", ber_b, 0.0, 0.5, "[0, 0.5]")?;
    Ok(MdiLeak {
        leak_bound: 2.0 * (ber_a + ber_b),
        total_ber: ber_a + ber_b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{inner, Operator};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn grid() -> impl Iterator<Item = AttackParams> {
        (0..=8).flat_map(|i| {
            (0..=5).flat_map(move |j| {
                [0.0, FRAC_PI_4, FRAC_PI_2].into_iter().map(move |theta| {
                    AttackParams::new(i as f64 * FRAC_PI_2 / 8.0, j as f64 * 0.2, theta).unwrap()
                })
            })
        })
    }

    #[test]
    fn mub_at_zero_and_quarter_pi() {
        let m = mub_states(0.0);
        assert_eq!(m.zero.amps()[0].re, 1.0);
        assert_abs_diff_eq!(inner(&m.one, &StateVector::basis(2, 1).unwrap()).unwrap().norm(), 1.0);

        let m = mub_states(FRAC_PI_4);
        assert_abs_diff_eq!(m.zero.amps()[0].re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(m.zero.amps()[1].re, FRAC_1_SQRT_2, epsilon = 1e-15);
        // |+⟩ = |p⟩ up to a global factor.
        assert_abs_diff_eq!(m.plus.amps()[0].norm(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.plus.amps()[1].norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn mub_pairs_are_orthonormal_and_unbiased() {
        for i in 0..=32 {
            let m = mub_states(i as f64 * 0.1);
            for v in [&m.zero, &m.one, &m.plus, &m.minus] {
                assert!(v.is_normalized());
            }
            assert_abs_diff_eq!(inner(&m.zero, &m.one).unwrap().norm(), 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(inner(&m.plus, &m.minus).unwrap().norm(), 0.0, epsilon = 1e-15);
            for z in m.basis(Basis::Z) {
                for x in m.basis(Basis::X) {
                    assert_abs_diff_eq!(inner(z, x).unwrap().norm_sqr(), 0.5, epsilon = 1e-15);
                }
            }
        }
    }

    #[test]
    fn eve_frame_overlaps() {
        let (p, q) = eve_frame(1.0, 0.0).unwrap();
        assert_eq!(p, q);
        let (p, q) = eve_frame(0.0, 0.0).unwrap();
        assert_eq!(inner(&p, &q).unwrap().norm(), 0.0);
        let (p, q) = eve_frame(0.8, 0.0).unwrap();
        assert_abs_diff_eq!(inner(&p, &q).unwrap().re, 0.8, epsilon = 1e-15);
        let (p, q) = eve_frame(0.5, 1.0).unwrap();
        let z = inner(&p, &q).unwrap();
        assert_abs_diff_eq!(z.re, 0.5 * 1f64.cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(z.im, 0.5 * 1f64.sin(), epsilon = 1e-15);
        assert!(q.is_normalized());
        assert!(eve_frame(1.1, 0.0).is_err());
        assert!(eve_frame(-0.1, 0.0).is_err());
    }

    #[test]
    fn evolve_reference_points() {
        let out = evolve(&AttackParams::new(FRAC_PI_4, 0.8, 0.0).unwrap());
        assert_abs_diff_eq!(out.probs.p01, 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(out.probs.ppm, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out.ber_total, 0.05, epsilon = 1e-15);

        let out = evolve(&AttackParams::new(0.0, 0.6, 0.0).unwrap());
        assert_eq!(out.probs.p01, 0.0);
        assert_abs_diff_eq!(out.probs.ppm, 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(out.ber_total, 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(out.ber_total, (1.0 - 0.6) / 4.0, epsilon = 1e-15);

        for alpha in [0.0, 0.3, FRAC_PI_4, 1.2] {
            let out = evolve(&AttackParams::new(alpha, 1.0, 0.0).unwrap());
            assert_eq!(out.probs.p01, 0.0);
            assert_eq!(out.probs.ppm, 0.0);
            assert_eq!(out.ber_total, 0.0);
        }
    }

    #[test]
    fn zero_weight_states_are_absent() {
        let out = evolve(&AttackParams::new(0.0, 0.6, 0.0).unwrap());
        assert!(out.eve_states.get(Basis::Z, 0, 1).is_none());
        assert!(out.eve_states.get(Basis::Z, 1, 0).is_none());
        assert!(out.eve_states.get(Basis::X, 0, 1).is_some());

        let out = evolve(&AttackParams::new(0.3, 1.0, 0.0).unwrap());
        assert!(out.eve_states.get(Basis::Z, 0, 1).is_none());
        assert!(out.eve_states.get(Basis::X, 1, 0).is_none());
    }

    #[test]
    fn channel_invariants_on_grid() {
        for params in grid() {
            let out = evolve(&params);
            let p = out.probs;
            assert_abs_diff_eq!(p.p00 + p.p01, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(p.p10 + p.p11, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(p.ppp + p.ppm, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(p.pmp + p.pmm, 1.0, epsilon = 1e-12);
            assert_eq!(p.p01, p.p10);
            assert_eq!(p.ppm, p.pmp);
            for v in [p.p00, p.p01, p.ppp, p.ppm] {
                assert!((0.0..=1.0).contains(&v));
            }

            let bound = ber_lower_bound(params.overlap_c(), params.theta()).unwrap();
            assert_abs_diff_eq!(out.ber_total, 0.25 * (p.p01 + p.p10 + p.ppm + p.pmp), epsilon = 1e-12);
            assert!(out.ber_total >= bound - 1e-12);
            assert_abs_diff_eq!(out.ber_total, bound, epsilon = 1e-12);

            for basis in Basis::BOTH {
                for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                    if let Some(v) = out.eve_states.get(basis, i, j) {
                        assert!((v.norm_sqr() - 1.0).abs() < 1e-12, "{params:?} {basis} {i}{j}");
                    }
                }
            }
            assert_eq!(out.eve_states.z[0][1], out.eve_states.z[1][0]);
            assert_eq!(out.eve_states.x[0][1], out.eve_states.x[1][0]);

            let bal = balanced_attack(&params);
            assert_eq!(bal.ber_z, bal.ber_x);
        }
    }

    #[test]
    fn total_ber_independent_of_alpha() {
        for j in 0..=5 {
            for theta in [0.0, FRAC_PI_4, FRAC_PI_2] {
                let c = j as f64 * 0.2;
                let reference = evolve(&AttackParams::new(0.0, c, theta).unwrap()).ber_total;
                for i in 1..=8 {
                    let alpha = i as f64 * FRAC_PI_2 / 8.0;
                    let ber = evolve(&AttackParams::new(alpha, c, theta).unwrap()).ber_total;
                    assert!((ber - reference).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn ber_lower_bound_values() {
        assert_eq!(ber_lower_bound(1.0, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(ber_lower_bound(0.8, 0.0).unwrap(), 0.05, epsilon = 1e-15);
        assert_abs_diff_eq!(ber_lower_bound(0.8, FRAC_PI_2).unwrap(), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn from_ber_maps_to_overlap() {
        let p = AttackParams::from_ber(0.0, 0.05).unwrap();
        assert_abs_diff_eq!(p.overlap_c(), 0.8, epsilon = 1e-15);
        assert_eq!(p.theta(), 0.0);
        assert!(AttackParams::from_ber(0.0, 0.3).is_err());
        assert!(AttackParams::new(f64::NAN, 0.5, 0.0).is_err());
    }

    #[test]
    fn bob_state_is_maximally_mixed() {
        let rho = bob_state(&AttackParams::new(0.3, 1.0, 0.0).unwrap()).unwrap();
        let half = Operator::identity(2).unwrap().scale(0.5);
        assert!(rho.operator().max_abs_diff(&half).unwrap() < 1e-12);

        let rho = bob_state(&AttackParams::new(FRAC_PI_4, 0.8, 0.0).unwrap()).unwrap();
        assert_abs_diff_eq!(rho.operator().trace().re, 1.0, epsilon = 1e-12);
        assert!(rho.eigenvalues().iter().all(|&l| (-1e-12..=1.0 + 1e-12).contains(&l)));

        // ¼(ppp + pmp) + ¼ with ppp = 0.8, pmp = 0.2.
        let params = AttackParams::new(0.0, 0.6, 0.0).unwrap();
        let rho = bob_state(&params).unwrap();
        let plus = mub_states(0.0).plus;
        assert_abs_diff_eq!(rho.population(&plus).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn balanced_attack_values() {
        let b = balanced_attack(&AttackParams::new(0.0, 0.6, 0.0).unwrap());
        assert_abs_diff_eq!(b.ber_z, 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(b.ber_x, 0.1, epsilon = 1e-15);
        let b = balanced_attack(&AttackParams::new(0.7, 1.0, 0.0).unwrap());
        assert_eq!((b.ber_z, b.ber_x), (0.0, 0.0));
        let b = balanced_attack(&AttackParams::new(FRAC_PI_4, 0.8, 0.0).unwrap());
        assert_abs_diff_eq!(b.ber_z, 0.05, epsilon = 1e-15);
    }

    #[test]
    fn mdi_bound_values() {
        assert_eq!(mdi_leak_bound(0.0, 0.0).unwrap().leak_bound, 0.0);
        assert_eq!(mdi_leak_bound(0.02, 0.02).unwrap().leak_bound, 0.08);
        let leak = mdi_leak_bound(0.05, 0.03).unwrap();
        assert_abs_diff_eq!(leak.leak_bound, 0.16, epsilon = 1e-15);
        assert_abs_diff_eq!(leak.total_ber, 0.08, epsilon = 1e-15);
        assert!(mdi_leak_bound(0.6, 0.0).is_err());
    }
}
