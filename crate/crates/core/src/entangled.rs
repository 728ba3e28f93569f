//! The collective attack applied to both halves of a shared Bell pair.
//!
//! Two-qubit vectors are ordered `A ⊗ B` (qubit A major). Bell states in the
//! `Z` basis use the computational kets, in the `X` basis the kets
//! `|±⟩ = (|0⟩ ± |1⟩)/√2`.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use crate::attack::{
    eve_amplitudes, eve_frame, mub_states, transition_probabilities, AttackParams, Basis, ABSENT_WEIGHT,
};
use crate::error::{check_range, Result};
use crate::linalg::{DensityOperator, Operator, StateVector, C64};

/// BER at which the CHSH value of the balanced attack drops to 2: `(2 − √2)/4`.
pub const CHSH_THRESHOLD: f64 = (2.0 - SQRT_2) / 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellLabel {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [
        BellLabel::PhiPlus,
        BellLabel::PhiMinus,
        BellLabel::PsiPlus,
        BellLabel::PsiMinus,
    ];
}

/// `sign · |label⟩_basis`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellState {
    pub label: BellLabel,
    pub basis: Basis,
    pub sign: f64,
}

impl BellState {
    pub fn new(label: BellLabel, basis: Basis) -> Self {
        BellState {
            label,
            basis,
            sign: 1.0,
        }
    }

    pub fn vector(&self) -> StateVector {
        let h = FRAC_1_SQRT_2;
        let (k0, k1) = match self.basis {
            Basis::Z => ([1.0, 0.0], [0.0, 1.0]),
            Basis::X => ([h, h], [h, -h]),
        };
        let ket = |v: [f64; 2]| StateVector::from_real(&v).expect("finite");
        let pair = |x: [f64; 2], y: [f64; 2]| ket(x).kron(&ket(y)).expect("qubits");
        let (first, second, rel) = match self.label {
            BellLabel::PhiPlus => (pair(k0, k0), pair(k1, k1), 1.0),
            BellLabel::PhiMinus => (pair(k0, k0), pair(k1, k1), -1.0),
            BellLabel::PsiPlus => (pair(k0, k1), pair(k1, k0), 1.0),
            BellLabel::PsiMinus => (pair(k0, k1), pair(k1, k0), -1.0),
        };
        first
            .add(&second.scale(C64::new(rel, 0.0)))
            .expect("same dim")
            .scale(C64::new(self.sign * h, 0.0))
    }
}

/// Rewrites a Bell state in the other basis.
///
/// `Φ⁺ ↔ Φ⁺`, `Φ⁻ ↔ Ψ⁺`, `Ψ⁻ ↔ −Ψ⁻`; the map is the same in both directions.
pub fn bell_transform(state: BellState, target_basis: Basis) -> BellState {
    if state.basis == target_basis {
        return state;
    }
    let (label, sign) = match state.label {
        BellLabel::PhiPlus => (BellLabel::PhiPlus, 1.0),
        BellLabel::PhiMinus => (BellLabel::PsiPlus, 1.0),
        BellLabel::PsiPlus => (BellLabel::PhiMinus, 1.0),
        BellLabel::PsiMinus => (BellLabel::PsiMinus, -1.0),
    };
    BellState {
        label,
        basis: target_basis,
        sign: state.sign * sign,
    }
}

/// Eve's joint two-ancilla states after attacking both halves of `|Φ⁺⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointAttackOutcome {
    pub params: AttackParams,
    /// Normalized states in Eve's `E_A ⊗ E_B` space, indexed `[alice][bob]`.
    pub z_states: [[Option<StateVector>; 2]; 2],
    pub x_states: [[Option<StateVector>; 2]; 2],
    pub z_weights: [[f64; 2]; 2],
    pub x_weights: [[f64; 2]; 2],
    pub ber_z: f64,
    pub ber_x: f64,
    pub ber_total: f64,
}

impl JointAttackOutcome {
    pub fn state(&self, basis: Basis, alice: usize, bob: usize) -> Option<&StateVector> {
        match basis {
            Basis::Z => self.z_states[alice][bob].as_ref(),
            Basis::X => self.x_states[alice][bob].as_ref(),
        }
    }

    pub fn weight(&self, basis: Basis, alice: usize, bob: usize) -> f64 {
        match basis {
            Basis::Z => self.z_weights[alice][bob],
            Basis::X => self.x_weights[alice][bob],
        }
    }
}

/// Applies `T_A ⊗ T_B` (same `α`, `c`, `θ` on both channels) to `|Φ⁺⟩_Z |E⟩|E⟩`
/// and projects Alice and Bob onto each pair of outcomes.
pub fn attack_on_bell(params: &AttackParams) -> JointAttackOutcome {
    let mub = mub_states(params.alpha());
    let (e_p, e_q) = eve_frame(params.overlap_c(), params.theta()).expect("validated params");
    let eve = [&e_p, &e_q];

    // |Φ⁺⟩_Z expressed in the {p, q} ⊗ {p, q} frame.
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let bell = mub
        .zero
        .kron(&mub.zero)
        .and_then(|v| v.add(&mub.one.kron(&mub.one)?))
        .expect("qubits")
        .scale(h);

    let project = |basis: Basis| {
        let kets = mub.basis(basis);
        let mut states: [[Option<StateVector>; 2]; 2] = Default::default();
        let mut weights = [[0.0; 2]; 2];
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let mut acc = StateVector::new(vec![C64::new(0.0, 0.0); 4]).expect("dim 4");
            for (x, y) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let amp = kets[i].amps()[x].conj() * kets[j].amps()[y].conj() * bell.amps()[2 * x + y];
                let branch = eve[x].kron(eve[y]).expect("qubits");
                acc = acc.add(&branch.scale(amp)).expect("dim 4");
            }
            let w = acc.norm_sqr();
            weights[i][j] = w;
            if w > ABSENT_WEIGHT {
                states[i][j] = acc.normalized();
            }
        }
        (states, weights)
    };
    let (z_states, z_weights) = project(Basis::Z);
    let (x_states, x_weights) = project(Basis::X);
    let ber_z = z_weights[0][1] + z_weights[1][0];
    let ber_x = x_weights[0][1] + x_weights[1][0];
    JointAttackOutcome {
        params: *params,
        z_states,
        x_states,
        z_weights,
        x_weights,
        ber_z,
        ber_x,
        ber_total: 0.5 * (ber_z + ber_x),
    }
}

/// Decomposition of `(|00⟩|E_0⟩ + |11⟩|E_1⟩)/√2` onto `|E_⊥⟩|Φ⁺⟩ + |E_∥⟩|Φ⁻⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeBodyState {
    pub coeff_perp: f64,
    pub coeff_parallel: f64,
    /// `⟨E_0|E_1⟩`.
    pub s: f64,
}

pub fn three_body_decomposition(s: f64) -> Result<ThreeBodyState> {
    check_range("s", s, 0.0, 1.0, "[0, 1]")?;
    Ok(ThreeBodyState {
        coeff_perp: (0.5 * (1.0 + s)).sqrt(),
        coeff_parallel: (0.5 * (1.0 - s)).sqrt(),
        s,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct XBasisState {
    pub rho: DensityOperator,
    pub ber_x: f64,
    /// Half the rounds in `Z` (error-free) and half in `X`.
    pub ber_total: f64,
}

/// What Alice and Bob hold when measuring in `X` after the `α = 0` attack.
pub fn x_basis_mixed_state(s: f64) -> Result<XBasisState> {
    check_range("s", s, 0.0, 1.0, "[0, 1]")?;
    let phi = BellState::new(BellLabel::PhiPlus, Basis::X).vector();
    let psi = BellState::new(BellLabel::PsiPlus, Basis::X).vector();
    let rho = DensityOperator::mixture(&[(0.5 * (1.0 + s), &phi), (0.5 * (1.0 - s), &psi)])?;
    Ok(XBasisState {
        rho,
        ber_x: 0.5 * (1.0 - s),
        ber_total: 0.25 * (1.0 - s),
    })
}

/// Alice–Bob state of the balanced attack: `½ρ + ½(H⊗H)ρ(H⊗H)` with
/// `ρ = ((1+s)/2)|Φ⁺⟩⟨Φ⁺| + ((1−s)/2)|Φ⁻⟩⟨Φ⁻|`.
pub fn balanced_bell_state(s: f64) -> Result<DensityOperator> {
    let tb = three_body_decomposition(s)?;
    let phi_p = BellState::new(BellLabel::PhiPlus, Basis::Z).vector();
    let phi_m = BellState::new(BellLabel::PhiMinus, Basis::Z).vector();
    let rho = DensityOperator::mixture(&[(tb.coeff_perp.powi(2), &phi_p), (tb.coeff_parallel.powi(2), &phi_m)])?;
    let hh = Operator::hadamard().kron(&Operator::hadamard())?;
    let rotated = hh.mul(rho.operator())?.mul(&hh.adjoint())?;
    DensityOperator::new(rho.operator().add(&rotated)?.scale(0.5))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalancedEntangled {
    pub ber_z: f64,
    pub ber_x: f64,
    pub chi: f64,
}

/// BERs and leakage of the balanced attack on the Bell pair.
pub fn balanced_entangled_attack(s: f64) -> Result<BalancedEntangled> {
    check_range("s", s, 0.0, 1.0, "[0, 1]")?;
    let p_e = 0.25 * (1.0 - s);
    // Z rounds leak 1 − s, X rounds leak nothing.
    let chi = 0.5 * ((1.0 - s) + 0.0);
    Ok(BalancedEntangled {
        ber_z: p_e,
        ber_x: p_e,
        chi,
    })
}

/// `S = 2√2 (1 − 2 p_e)`.
pub fn chsh_value(p_e: f64) -> Result<f64> {
    check_range("p_e", p_e, 0.0, 0.5, "[0, 0.5]")?;
    Ok(2.0 * SQRT_2 * (1.0 - 2.0 * p_e))
}

/// `⟨A₀B₀⟩ + ⟨A₀B₁⟩ + ⟨A₁B₀⟩ − ⟨A₁B₁⟩` with `A = {σ_Z, σ_X}` and
/// `B = {(σ_Z + σ_X)/√2, (σ_Z − σ_X)/√2}`.
pub fn chsh_expectation(rho: &DensityOperator) -> Result<f64> {
    let z = Operator::pauli_z();
    let x = Operator::pauli_x();
    let b0 = z.add(&x)?.scale(FRAC_1_SQRT_2);
    let b1 = z.add(&x.scale(-1.0))?.scale(FRAC_1_SQRT_2);
    let e = |a: &Operator, b: &Operator| rho.expectation(&a.kron(b)?);
    Ok(e(&z, &b0)? + e(&z, &b1)? + e(&x, &b0)? - e(&x, &b1)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    /// Largest componentwise deviation over compared states.
    pub max_deviation: f64,
    pub compared: usize,
}

/// Tolerance for [`equivalence_check`].
pub const EQUIVALENCE_TOL: f64 = 1e-10;

/// Checks each joint Eve state against the single-channel closed form with
/// `|E_p⟩ → |E_p⟩|E_p⟩`, `|E_q⟩ → |E_q⟩|E_q⟩` (overlap `c²e^{2iθ}`).
pub fn equivalence_check(params: &AttackParams) -> EquivalenceReport {
    let joint = attack_on_bell(params);
    let (e_p, e_q) = eve_frame(params.overlap_c(), params.theta()).expect("validated params");
    let pp = e_p.kron(&e_p).expect("qubits");
    let qq = e_q.kron(&e_q).expect("qubits");
    let c = params.overlap_c();
    let single = transition_probabilities(params.alpha(), c * c * (2.0 * params.theta()).cos());

    let mut max_deviation: f64 = 0.0;
    let mut compared = 0;
    let mut equivalent = true;
    for basis in Basis::BOTH {
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let weight = single.get(basis, i, j);
            let expected = (weight > ABSENT_WEIGHT).then(|| {
                let (cp, cq, k) = eve_amplitudes(params.alpha(), basis, i, j);
                let norm = k * weight.sqrt();
                pp.scale(C64::new(cp / norm, 0.0))
                    .add(&qq.scale(C64::new(cq / norm, 0.0)))
                    .expect("dim 4")
            });
            match (expected, joint.state(basis, i, j)) {
                (Some(e), Some(j)) => {
                    compared += 1;
                    let dev = e.max_abs_diff(j).expect("dim 4");
                    max_deviation = max_deviation.max(dev);
                    equivalent &= dev <= EQUIVALENCE_TOL;
                }
                (None, None) => {}
                _ => equivalent = false,
            }
        }
    }
    EquivalenceReport {
        equivalent,
        max_deviation,
        compared,
    }
}
