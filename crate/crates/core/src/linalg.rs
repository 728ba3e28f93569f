//! Dense complex linear algebra for one and two qubits.
//!
//! Everything here works in dimension 2 or 4 only. Operators are stored
//! row-major. Density operators are validated on construction, so every
//! `DensityOperator` in circulation is Hermitian with unit trace and no
//! eigenvalue below `-EIGEN_TOL`.

use num_complex::Complex64;

use crate::error::{check_range, Error, Result};

pub type C64 = Complex64;

/// Tolerance for Hermiticity, unit trace and unitarity checks.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues down to `-EIGEN_TOL` are accepted and clamped to zero.
pub const EIGEN_TOL: f64 = 1e-10;

/// Relative off-diagonal Frobenius norm at which Jacobi sweeps stop.
const JACOBI_TOL: f64 = 1e-15;
const JACOBI_MAX_SWEEPS: usize = 64;

fn check_dim(dim: usize) -> Result<usize> {
    match dim {
        2 | 4 => Ok(dim),
        d => Err(Error::UnsupportedDimension(d)),
    }
}

fn same_dim(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left, right })
    }
}

/// A ket in dimension 2 or 4.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
}

impl StateVector {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        check_dim(amps.len())?;
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("state vector"));
        }
        Ok(StateVector { amps })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Computational basis vector `e_index`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        check_dim(dim)?;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                left: index,
                right: dim,
            });
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(StateVector { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= HERMITIAN_TOL
    }

    /// Unit vector along `self`, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return None;
        }
        Some(self.scale(C64::new(1.0 / n, 0.0)))
    }

    pub fn scale(&self, factor: C64) -> Self {
        StateVector {
            amps: self.amps.iter().map(|z| z * factor).collect(),
        }
    }

    /// `self + other`.
    pub fn add(&self, other: &StateVector) -> Result<Self> {
        same_dim(self.dim(), other.dim())?;
        Ok(StateVector {
            amps: self.amps.iter().zip(&other.amps).map(|(x, y)| x + y).collect(),
        })
    }

    /// `self ⊗ other`; only qubit ⊗ qubit is representable.
    pub fn kron(&self, other: &StateVector) -> Result<Self> {
        same_dim(self.dim(), 2)?;
        same_dim(other.dim(), 2)?;
        let amps = self
            .amps
            .iter()
            .flat_map(|x| other.amps.iter().map(move |y| x * y))
            .collect();
        Ok(StateVector { amps })
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        same_dim(self.dim(), other.dim())?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max))
    }
}

/// `⟨a|b⟩`, antilinear in the first argument.
pub fn inner(a: &StateVector, b: &StateVector) -> Result<C64> {
    same_dim(a.dim(), b.dim())?;
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

/// A square matrix in dimension 2 or 4.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<C64>,
}

impl Operator {
    /// Builds an operator from row-major entries.
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        check_dim(dim)?;
        same_dim(entries.len(), dim * dim)?;
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("operator"));
        }
        Ok(Operator { dim, entries })
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(dim, entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Operator {
            dim,
            entries: vec![C64::new(0.0, 0.0); dim * dim],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut op = Self::zeros(dim)?;
        for i in 0..dim {
            op.entries[i * dim + i] = C64::new(1.0, 0.0);
        }
        Ok(op)
    }

    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_real(2, &[h, h, h, -h]).expect("static 2x2")
    }

    pub fn pauli_x() -> Self {
        Self::from_real(2, &[0.0, 1.0, 1.0, 0.0]).expect("static 2x2")
    }

    pub fn pauli_z() -> Self {
        Self::from_real(2, &[1.0, 0.0, 0.0, -1.0]).expect("static 2x2")
    }

    /// `|a⟩⟨b|`.
    pub fn outer(a: &StateVector, b: &StateVector) -> Result<Self> {
        same_dim(a.dim(), b.dim())?;
        let entries = a
            .amps()
            .iter()
            .flat_map(|x| b.amps().iter().map(move |y| x * y.conj()))
            .collect();
        Ok(Operator {
            dim: a.dim(),
            entries,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn kron(&self, other: &Operator) -> Result<Self> {
        same_dim(self.dim, 2)?;
        same_dim(other.dim, 2)?;
        let mut entries = vec![C64::new(0.0, 0.0); 16];
        for (i, j, k, l) in (0..2)
            .flat_map(|i| (0..2).flat_map(move |j| (0..2).flat_map(move |k| (0..2).map(move |l| (i, j, k, l)))))
        {
            entries[(2 * i + k) * 4 + (2 * j + l)] = self.get(i, j) * other.get(k, l);
        }
        Ok(Operator { dim: 4, entries })
    }

    pub fn mul(&self, other: &Operator) -> Result<Self> {
        same_dim(self.dim, other.dim)?;
        let n = self.dim;
        let mut entries = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = (0..n).map(|k| self.get(i, k) * other.get(k, j)).sum();
            }
        }
        Ok(Operator { dim: n, entries })
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        same_dim(self.dim, v.dim())?;
        let n = self.dim;
        let amps = (0..n)
            .map(|i| (0..n).map(|k| self.get(i, k) * v.amps()[k]).sum())
            .collect();
        Ok(StateVector { amps })
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut entries = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.get(i, j).conj();
            }
        }
        Operator { dim: n, entries }
    }

    pub fn add(&self, other: &Operator) -> Result<Self> {
        same_dim(self.dim, other.dim)?;
        Ok(Operator {
            dim: self.dim,
            entries: self.entries.iter().zip(&other.entries).map(|(x, y)| x + y).collect(),
        })
    }

    pub fn scale(&self, factor: f64) -> Self {
        Operator {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs_diff(&self, other: &Operator) -> Result<f64> {
        same_dim(self.dim, other.dim)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max))
    }

    /// `max |(O†O − I)_ij|`.
    pub fn unitarity_defect(&self) -> f64 {
        let gram = self.adjoint().mul(self).expect("same dimension");
        let id = Operator::identity(self.dim).expect("valid dimension");
        gram.max_abs_diff(&id).expect("same dimension")
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_defect() < HERMITIAN_TOL
    }

    /// `max |O − O†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint()).expect("same dimension")
    }
}

/// Eigenvalues of a Hermitian operator, sorted in descending order.
///
/// Closed form in dimension 2; in dimension 4 the matrix `A + iB` is embedded as
/// the real symmetric `[[A, -B], [B, A]]` and diagonalized by cyclic Jacobi
/// rotations. The embedding doubles every eigenvalue, so pairs are merged.
pub fn hermitian_eigenvalues(op: &Operator) -> Result<Vec<f64>> {
    let defect = op.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    match op.dim() {
        2 => {
            let a = op.get(0, 0).re;
            let d = op.get(1, 1).re;
            let b = op.get(0, 1);
            let mean = 0.5 * (a + d);
            let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
            Ok(vec![mean + radius, mean - radius])
        }
        n => {
            let m = 2 * n;
            let mut s = vec![0.0; m * m];
            for i in 0..n {
                for j in 0..n {
                    let z = op.get(i, j);
                    s[i * m + j] = z.re;
                    s[(i + n) * m + (j + n)] = z.re;
                    s[i * m + (j + n)] = -z.im;
                    s[(i + n) * m + j] = z.im;
                }
            }
            let mut doubled = jacobi_eigenvalues(&mut s, m);
            doubled.sort_by(|x, y| y.total_cmp(x));
            Ok(doubled.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect())
        }
    }
}

fn jacobi_eigenvalues(s: &mut [f64], m: usize) -> Vec<f64> {
    let scale = s.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| s[i * m + j] * s[i * m + j])
            .sum::<f64>()
            .sqrt();
        if off <= JACOBI_TOL * scale {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = s[p * m + q];
                if apq == 0.0 {
                    continue;
                }
                let app = s[p * m + p];
                let aqq = s[q * m + q];
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;
                for k in 0..m {
                    let skp = s[k * m + p];
                    let skq = s[k * m + q];
                    s[k * m + p] = c * skp - sn * skq;
                    s[k * m + q] = sn * skp + c * skq;
                }
                for k in 0..m {
                    let spk = s[p * m + k];
                    let sqk = s[q * m + k];
                    s[p * m + k] = c * spk - sn * sqk;
                    s[q * m + k] = sn * spk + c * sqk;
                }
            }
        }
    }
    (0..m).map(|i| s[i * m + i]).collect()
}

/// A validated mixed state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    op: Operator,
    eigenvalues: Vec<f64>,
}

impl DensityOperator {
    pub fn new(op: Operator) -> Result<Self> {
        let eigenvalues = hermitian_eigenvalues(&op)?;
        let tr = op.trace();
        if (tr.re - 1.0).abs() > HERMITIAN_TOL || tr.im.abs() > HERMITIAN_TOL {
            return Err(Error::TraceNotOne(tr.re));
        }
        if let Some(&min) = eigenvalues.last() {
            if min < -EIGEN_TOL {
                return Err(Error::NotPositive(min));
            }
        }
        Ok(DensityOperator { op, eigenvalues })
    }

    pub fn pure(state: &StateVector) -> Result<Self> {
        Self::new(Operator::outer(state, state)?)
    }

    /// `Σ w_i |ψ_i⟩⟨ψ_i|`.
    pub fn mixture(terms: &[(f64, &StateVector)]) -> Result<Self> {
        let (first, rest) = terms.split_first().ok_or(Error::TraceNotOne(0.0))?;
        let mut acc = Operator::outer(first.1, first.1)?.scale(first.0);
        for (w, v) in rest {
            acc = acc.add(&Operator::outer(v, v)?.scale(*w))?;
        }
        Self::new(acc)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::new(Operator::identity(dim)?.scale(1.0 / dim as f64))
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `Re tr(ρ O)`.
    pub fn expectation(&self, observable: &Operator) -> Result<f64> {
        Ok(self.op.mul(observable)?.trace().re)
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn population(&self, state: &StateVector) -> Result<f64> {
        Ok(inner(state, &self.op.apply(state)?)?.re)
    }
}

fn neg_xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// `H(p) = -p log₂ p - (1-p) log₂ (1-p)`, with `0 log₂ 0 = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    check_range("p", p, 0.0, 1.0, "[0, 1]")?;
    Ok(neg_xlog2x(p) + neg_xlog2x(1.0 - p))
}

/// Two-term entropy `H(x, y) = -x log₂ x - y log₂ y` for a (possibly
/// sub-normalized) pair with `x, y ≥ 0` and `x + y ≤ 1`.
pub fn entropy_pair(x: f64, y: f64) -> Result<f64> {
    check_range("x", x, 0.0, 1.0 + HERMITIAN_TOL, "[0, 1]")?;
    check_range("y", y, 0.0, 1.0 + HERMITIAN_TOL, "[0, 1]")?;
    check_range("x + y", x + y, 0.0, 1.0 + HERMITIAN_TOL, "[0, 1]")?;
    Ok(neg_xlog2x(x) + neg_xlog2x(y))
}

/// `S(ρ) = -Σ λ log₂ λ` over eigenvalues clamped to `[0, 1]`.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    rho.eigenvalues()
        .iter()
        .map(|&l| neg_xlog2x(l.clamp(0.0, 1.0)))
        .sum()
}
