//! Brute-force check of the closed-form channel in [`crate::attack`].
//!
//! The attack is realized as an explicit 4×4 unitary on `signal ⊗ Eve`
//! (signal-major, index `2·signal + eve`), applied to each of Alice's states
//! and projected onto each of Bob's outcomes. No transition-probability or
//! conditional-state formula is used on this path.

use std::f64::consts::FRAC_PI_2;

use crate::attack::{eve_frame, evolve, mub_states, AttackOutcome, AttackParams, Basis, EveConditionalStates, TransitionProbabilities, ABSENT_WEIGHT};
use crate::error::{check_range, Error, Result};
use crate::linalg::{inner, Operator, StateVector, C64, HERMITIAN_TOL};

/// The controlled Eve rotation `|x⟩|E⟩ ↦ |x⟩|E_x⟩`, completed to a unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct JointUnitary {
    pub matrix: Operator,
}

/// Unit vector orthogonal to `v` in dimension 2, by Gram–Schmidt against the
/// computational basis.
fn complete(v: &StateVector) -> Result<StateVector> {
    for k in [1, 0] {
        let e = StateVector::basis(2, k)?;
        let proj = inner(v, &e)?;
        let residual = e.add(&v.scale(-proj))?;
        if residual.norm() > 1e-8 {
            return residual.normalized().ok_or(Error::Completion);
        }
    }
    Err(Error::Completion)
}

pub fn build_unitary(overlap_c: f64, theta: f64) -> Result<JointUnitary> {
    check_range("overlap_c", overlap_c, 0.0, 1.0, "[0, 1]")?;
    let (e_p, e_q) = eve_frame(overlap_c, theta)?;
    let mut entries = vec![C64::new(0.0, 0.0); 16];
    for (signal, target) in [(0usize, &e_p), (1usize, &e_q)] {
        let other = complete(target)?;
        for row in 0..2 {
            entries[(2 * signal + row) * 4 + 2 * signal] = target.amps()[row];
            entries[(2 * signal + row) * 4 + 2 * signal + 1] = other.amps()[row];
        }
    }
    let matrix = Operator::new(4, entries)?;
    if matrix.unitarity_defect() >= HERMITIAN_TOL {
        return Err(Error::Completion);
    }
    Ok(JointUnitary { matrix })
}

/// Re-derives the attack outcome by explicit matrix arithmetic.
pub fn simulate(params: &AttackParams) -> AttackOutcome {
    let unitary = build_unitary(params.overlap_c(), params.theta()).expect("validated params");
    let mub = mub_states(params.alpha());
    let eve0 = StateVector::basis(2, 0).expect("dim 2");

    let run = |basis: Basis| {
        let kets = mub.basis(basis);
        let mut probs = [[0.0; 2]; 2];
        let mut states: [[Option<StateVector>; 2]; 2] = Default::default();
        for sent in 0..2 {
            let input = kets[sent].kron(&eve0).expect("qubits");
            let output = unitary.matrix.apply(&input).expect("dim 4");
            for received in 0..2 {
                let bra = kets[received].amps();
                let eve: Vec<C64> = (0..2)
                    .map(|k| (0..2).map(|s| bra[s].conj() * output.amps()[2 * s + k]).sum())
                    .collect();
                let eve = StateVector::new(eve).expect("dim 2");
                let w = eve.norm_sqr();
                probs[sent][received] = w;
                if w > ABSENT_WEIGHT {
                    states[sent][received] = eve.normalized();
                }
            }
        }
        (probs, states)
    };
    let (pz, z) = run(Basis::Z);
    let (px, x) = run(Basis::X);
    let probs = TransitionProbabilities {
        p00: pz[0][0],
        p01: pz[0][1],
        p10: pz[1][0],
        p11: pz[1][1],
        ppp: px[0][0],
        ppm: px[0][1],
        pmp: px[1][0],
        pmm: px[1][1],
    };
    AttackOutcome::assemble(*params, EveConditionalStates { z, x }, probs)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleReport {
    pub max_prob_error: f64,
    /// Largest `1 − |⟨closed form|oracle⟩|` over outcomes present on both paths.
    pub max_state_error: f64,
    /// Largest `|Σ_j p_ij − 1|` on the oracle path.
    pub max_completeness_error: f64,
    /// Largest `|BER_oracle − (1 − c cos θ)/4|`.
    pub max_bound_error: f64,
    pub grid_size: usize,
    /// Grid point with the largest combined discrepancy.
    pub worst: Option<AttackParams>,
}

impl OracleReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_prob_error < tol && self.max_state_error < tol
    }
}

/// Default grid: 9 values of `α` over `[0, π/2]`, 6 of `c` over `[0, 1]`,
/// 3 of `θ` over `[0, π/2]`.
pub const DEFAULT_GRID: (usize, usize, usize) = (9, 6, 3);

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
}

pub fn verify_grid(alpha_steps: usize, c_steps: usize, theta_steps: usize) -> Result<OracleReport> {
    verify_grid_perturbed(alpha_steps, c_steps, theta_steps, 0.0)
}

/// [`verify_grid`] with `perturbation` added to every oracle probability, to
/// exercise the failure path.
pub fn verify_grid_perturbed(
    alpha_steps: usize,
    c_steps: usize,
    theta_steps: usize,
    perturbation: f64,
) -> Result<OracleReport> {
    for (name, n) in [("alpha_steps", alpha_steps), ("c_steps", c_steps), ("theta_steps", theta_steps)] {
        if n < 2 {
            return Err(Error::out_of_range(name, n as f64, "[2, ∞)"));
        }
    }
    let mut report = OracleReport {
        max_prob_error: 0.0,
        max_state_error: 0.0,
        max_completeness_error: 0.0,
        max_bound_error: 0.0,
        grid_size: 0,
        worst: None,
    };
    let mut worst_score = -1.0;
    for alpha in linspace(0.0, FRAC_PI_2, alpha_steps) {
        for c in linspace(0.0, 1.0, c_steps) {
            for theta in linspace(0.0, FRAC_PI_2, theta_steps) {
                let params = AttackParams::new(alpha, c, theta)?;
                let closed = evolve(&params);
                let oracle = simulate(&params);
                let (prob_err, state_err, complete_err) = compare(&closed, &oracle, perturbation);
                let bound = 0.25 * (1.0 - c * theta.cos());
                let bound_err = (oracle.ber_total - bound).abs();

                report.grid_size += 1;
                report.max_prob_error = report.max_prob_error.max(prob_err);
                report.max_state_error = report.max_state_error.max(state_err);
                report.max_completeness_error = report.max_completeness_error.max(complete_err);
                report.max_bound_error = report.max_bound_error.max(bound_err);
                if prob_err + state_err > worst_score {
                    worst_score = prob_err + state_err;
                    report.worst = Some(params);
                }
            }
        }
    }
    Ok(report)
}

fn compare(closed: &AttackOutcome, oracle: &AttackOutcome, perturbation: f64) -> (f64, f64, f64) {
    let mut prob_err: f64 = 0.0;
    let mut state_err: f64 = 0.0;
    let mut complete_err: f64 = 0.0;
    for basis in Basis::BOTH {
        for sent in 0..2 {
            let row: f64 = (0..2).map(|r| oracle.probs.get(basis, sent, r)).sum();
            complete_err = complete_err.max((row - 1.0).abs());
            for received in 0..2 {
                let p_oracle = oracle.probs.get(basis, sent, received) + perturbation;
                prob_err = prob_err.max((closed.probs.get(basis, sent, received) - p_oracle).abs());
                if let (Some(a), Some(b)) = (
                    closed.eve_states.get(basis, sent, received),
                    oracle.eve_states.get(basis, sent, received),
                ) {
                    let fidelity = inner(a, b).expect("dim 2").norm();
                    state_err = state_err.max((1.0 - fidelity).abs());
                }
            }
        }
    }
    (prob_err, state_err, complete_err)
}
