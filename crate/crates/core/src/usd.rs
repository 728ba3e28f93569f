//! Unambiguous discrimination of Eve's stored states and the leakage it yields.
//!
//! After basis announcement Eve tries to tell `|E_{0,0}⟩` from `|E_{1,1}⟩`
//! (or `|E_{+,+}⟩` from `|E_{−,−}⟩`). A conclusive USD result names Alice's bit
//! correctly; the flipped branch `|E_{0,1}⟩ = |E_{1,0}⟩` carries no bit
//! information and is guessed right or wrong with equal odds.

use std::f64::consts::FRAC_PI_2;

use crate::attack::{evolve, AttackOutcome, AttackParams, Basis};
use crate::error::{check_range, Error, Result};
use crate::linalg::{entropy_pair, inner, von_neumann_entropy, DensityOperator, StateVector};

/// Normalization constants at or below this are treated as "Eve learns nothing".
pub const ZERO_NORM: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UsdScheme {
    /// Success `1 − s` using an entangled auxiliary qubit.
    Quantum,
    /// Success `(1 − s²)/2`.
    Conventional,
}

/// Probability of a conclusive result when discriminating two states with overlap `s`.
pub fn usd_success(overlap_s: f64, scheme: UsdScheme) -> Result<f64> {
    check_range("overlap_s", overlap_s, 0.0, 1.0, "[0, 1]")?;
    Ok(match scheme {
        UsdScheme::Quantum => 1.0 - overlap_s,
        UsdScheme::Conventional => 0.5 * (1.0 - overlap_s * overlap_s),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuessMatrix {
    pub basis: Basis,
    /// Probability Eve guesses Alice's symbol correctly (`p_0^r`, equal to `p_1^r`).
    pub p_right: f64,
    /// Probability Eve guesses wrongly (`p_0^e`).
    pub p_wrong: f64,
    /// `A = p_right + p_wrong`.
    pub norm_a: f64,
    /// `|p_0^r − p_1^r| + |p_0^e − p_1^e|`, measured rather than assumed zero.
    pub asymmetry: f64,
}

impl GuessMatrix {
    pub fn zero(basis: Basis) -> Self {
        GuessMatrix {
            basis,
            p_right: 0.0,
            p_wrong: 0.0,
            norm_a: 0.0,
            asymmetry: 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.norm_a <= ZERO_NORM
    }
}

fn overlap_magnitude(x: Option<&StateVector>, y: Option<&StateVector>) -> f64 {
    match (x, y) {
        (Some(x), Some(y)) => inner(x, y).expect("Eve frame").norm().min(1.0),
        _ => 1.0,
    }
}

/// Eve's guessing probabilities in one basis.
pub fn guess_matrix(outcome: &AttackOutcome, basis: Basis) -> GuessMatrix {
    let probs = &outcome.probs;
    let states = &outcome.eve_states;
    let overlap = overlap_magnitude(states.get(basis, 0, 0), states.get(basis, 1, 1));
    let success = usd_success(overlap, UsdScheme::Quantum).expect("clamped overlap");

    let guess = |sent: usize| {
        let same = probs.get(basis, sent, sent);
        let flipped = probs.get(basis, sent, 1 - sent);
        (same * success + 0.5 * flipped, 0.5 * flipped)
    };
    let (right0, wrong0) = guess(0);
    let (right1, wrong1) = guess(1);
    let norm_a = right0 + wrong0;
    if norm_a <= ZERO_NORM {
        return GuessMatrix::zero(basis);
    }
    GuessMatrix {
        basis,
        p_right: right0,
        p_wrong: wrong0,
        norm_a,
        asymmetry: (right0 - right1).abs() + (wrong0 - wrong1).abs(),
    }
}

/// `A [1 − H(p_right/A, p_wrong/A)]`.
pub fn chi_basis(gm: &GuessMatrix) -> f64 {
    if gm.is_zero() {
        return 0.0;
    }
    let x = (gm.p_right / gm.norm_a).clamp(0.0, 1.0);
    let y = (gm.p_wrong / gm.norm_a).clamp(0.0, 1.0);
    let h = entropy_pair(x, y).expect("ratios sum to one");
    (gm.norm_a * (1.0 - h)).max(0.0)
}

/// Von Neumann Holevo quantity between Alice's symbol and Eve's ancilla in one basis.
pub fn holevo_standard(outcome: &AttackOutcome, basis: Basis) -> Result<f64> {
    let conditional = |sent: usize| -> Result<DensityOperator> {
        let terms: Vec<(f64, &StateVector)> = (0..2)
            .filter_map(|recv| {
                let w = outcome.probs.get(basis, sent, recv);
                outcome.eve_states.get(basis, sent, recv).map(|v| (w, v))
            })
            .collect();
        DensityOperator::mixture(&terms)
    };
    let rho0 = conditional(0)?;
    let rho1 = conditional(1)?;
    let avg = DensityOperator::new(rho0.operator().add(rho1.operator())?.scale(0.5))?;
    let chi = von_neumann_entropy(&avg) - 0.5 * (von_neumann_entropy(&rho0) + von_neumann_entropy(&rho1));
    Ok(chi.max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeakageReport {
    pub guess_z: GuessMatrix,
    pub guess_x: GuessMatrix,
    pub chi_z: f64,
    pub chi_x: f64,
    pub chi_total: f64,
    pub holevo_standard_z: f64,
    pub holevo_standard_x: f64,
}

pub fn chi_total(params: &AttackParams) -> LeakageReport {
    let outcome = evolve(params);
    let guess_z = guess_matrix(&outcome, Basis::Z);
    let guess_x = guess_matrix(&outcome, Basis::X);
    let chi_z = chi_basis(&guess_z);
    let chi_x = chi_basis(&guess_x);
    let holevo = |basis| holevo_standard(&outcome, basis).expect("conditional states are valid");
    LeakageReport {
        guess_z,
        guess_x,
        chi_z,
        chi_x,
        chi_total: 0.5 * (chi_z + chi_x),
        holevo_standard_z: holevo(Basis::Z),
        holevo_standard_x: holevo(Basis::X),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    pub chi_z: f64,
    pub chi_x: f64,
    pub chi_total: f64,
}

/// Leakage at `n_samples` evenly spaced `α` over `[0, π/2]`, both ends included.
pub fn sweep_alpha(p_e: f64, n_samples: usize) -> Result<Vec<SweepRow>> {
    if !(p_e > 0.0 && p_e < 0.25) {
        return Err(Error::out_of_range("p_e", p_e, "(0, 0.25)"));
    }
    if n_samples < 2 {
        return Err(Error::out_of_range("samples", n_samples as f64, "[2, ∞)"));
    }
    let step = FRAC_PI_2 / (n_samples - 1) as f64;
    (0..n_samples)
        .map(|i| {
            let alpha = if i == n_samples - 1 { FRAC_PI_2 } else { i as f64 * step };
            let report = chi_total(&AttackParams::from_ber(alpha, p_e)?);
            Ok(SweepRow {
                alpha,
                chi_z: report.chi_z,
                chi_x: report.chi_x,
                chi_total: report.chi_total,
            })
        })
        .collect()
}
