//! Key-rate lower bounds `r ≥ I(A;B) − χ(E;AB)` and tolerable-BER thresholds.

use std::fmt;
use std::str::FromStr;

use crate::entangled::{chsh_value, CHSH_THRESHOLD};
use crate::error::{check_range, Error, Result};
use crate::linalg::binary_entropy;

/// Absolute tolerance of the threshold bisection.
pub const THRESHOLD_TOL: f64 = 1e-6;
/// Default bisection bracket, clear of the entropy endpoints.
pub const DEFAULT_BRACKET: (f64, f64) = (1e-9, 0.5 - 1e-9);

/// How Eve's leakage is bounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProofVariant {
    /// Entanglement-purification bound, `χ = H(p_e)`.
    Purification,
    /// Collective-attack bound, `χ = 2 p_e`.
    Collective,
    /// Collective-attack bound gated by a CHSH violation `S > 2`.
    Chsh,
}

impl ProofVariant {
    pub const ALL: [ProofVariant; 3] = [ProofVariant::Purification, ProofVariant::Collective, ProofVariant::Chsh];

    pub fn name(self) -> &'static str {
        match self {
            ProofVariant::Purification => "purification",
            ProofVariant::Collective => "collective",
            ProofVariant::Chsh => "chsh",
        }
    }

    /// `χ(E;AB)` at BER `p_e`.
    pub fn leakage(self, p_e: f64) -> Result<f64> {
        match self {
            ProofVariant::Purification => binary_entropy(p_e),
            ProofVariant::Collective | ProofVariant::Chsh => Ok(2.0 * p_e),
        }
    }
}

impl fmt::Display for ProofVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProofVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        ProofVariant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| format!("unknown proof variant '{s}' (expected purification, collective or chsh)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyRateReport {
    pub p_e: f64,
    pub mutual_info: f64,
    pub leakage: f64,
    pub rate: f64,
    pub variant: ProofVariant,
    pub secure: bool,
    /// CHSH value, reported for the `chsh` variant only.
    pub chsh: Option<f64>,
}

pub fn key_rate(p_e: f64, variant: ProofVariant) -> Result<KeyRateReport> {
    check_range("p_e", p_e, 0.0, 0.5, "[0, 0.5]")?;
    let mutual_info = 1.0 - binary_entropy(p_e)?;
    let leakage = variant.leakage(p_e)?;
    let rate = mutual_info - leakage;
    let (secure, chsh) = match variant {
        // S > 2 exactly when p_e < (2 − √2)/4; compare p_e to avoid rounding in S.
        ProofVariant::Chsh => (rate > 0.0 && p_e < CHSH_THRESHOLD, Some(chsh_value(p_e)?)),
        _ => (rate > 0.0, None),
    };
    Ok(KeyRateReport {
        p_e,
        mutual_info,
        leakage,
        rate,
        variant,
        secure,
        chsh,
    })
}

/// Root of `f` on `[lo, hi]` by bisection, assuming a sign change across the bracket.
pub fn bisect(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    let (f_lo, f_hi) = (f(lo), f(hi));
    if !(f_lo.is_finite() && f_hi.is_finite()) || f_lo.signum() == f_hi.signum() {
        return Err(Error::out_of_range("bracket", lo, "a sign-changing interval"));
    }
    let rising = f_lo < 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) == rising {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn rate_fn(variant: ProofVariant) -> impl Fn(f64) -> f64 {
    move |p| {
        let h = binary_entropy(p).unwrap_or(f64::NAN);
        1.0 - h - variant.leakage(p).unwrap_or(f64::NAN)
    }
}

/// Root of the zero-rate condition inside `[lo, hi]`. For `chsh` the root of
/// `S(p) − 2` is returned instead, since the CHSH gate binds first.
pub fn threshold_in(variant: ProofVariant, lo: f64, hi: f64) -> Result<f64> {
    match variant {
        ProofVariant::Chsh => bisect(|p| chsh_value(p).unwrap_or(f64::NAN) - 2.0, lo, hi, THRESHOLD_TOL),
        v => bisect(rate_fn(v), lo, hi, THRESHOLD_TOL),
    }
}

/// Largest tolerable BER for a proof variant.
pub fn threshold(variant: ProofVariant) -> f64 {
    match variant {
        ProofVariant::Chsh => CHSH_THRESHOLD,
        v => threshold_in(v, DEFAULT_BRACKET.0, DEFAULT_BRACKET.1).expect("rate changes sign on the default bracket"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariantComparison {
    pub p_e: f64,
    pub purification: KeyRateReport,
    pub collective: KeyRateReport,
    pub chsh: KeyRateReport,
}

impl VariantComparison {
    pub fn collective_dominates(&self) -> bool {
        self.collective.rate >= self.purification.rate
    }
}

pub fn compare_variants(p_e_grid: &[f64]) -> Result<Vec<VariantComparison>> {
    p_e_grid
        .iter()
        .map(|&p_e| {
            Ok(VariantComparison {
                p_e,
                purification: key_rate(p_e, ProofVariant::Purification)?,
                collective: key_rate(p_e, ProofVariant::Collective)?,
                chsh: key_rate(p_e, ProofVariant::Chsh)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn key_rate_reference_values() {
        for v in ProofVariant::ALL {
            let r = key_rate(0.0, v).unwrap();
            assert_eq!(r.rate, 1.0);
            assert!(r.secure);
        }
        let r = key_rate(0.05, ProofVariant::Collective).unwrap();
        assert_abs_diff_eq!(r.rate, 0.61360, epsilon = 1e-4);
        let r = key_rate(0.05, ProofVariant::Purification).unwrap();
        assert_abs_diff_eq!(r.rate, 0.42720, epsilon = 1e-4);
        assert!(key_rate(0.6, ProofVariant::Collective).is_err());
        assert!(key_rate(-0.1, ProofVariant::Chsh).is_err());
    }

    #[test]
    fn report_invariants() {
        for k in 0..=500 {
            let p = k as f64 * 1e-3;
            for v in ProofVariant::ALL {
                let r = key_rate(p, v).unwrap();
                assert_abs_diff_eq!(r.rate, r.mutual_info - r.leakage, epsilon = 1e-12);
                assert_eq!(r.secure, r.rate > 0.0 && r.chsh.is_none_or(|s| s > 2.0));
            }
        }
    }

    #[test]
    fn thresholds() {
        assert_abs_diff_eq!(threshold(ProofVariant::Purification), 0.1100, epsilon = 1e-3);
        assert_abs_diff_eq!(threshold(ProofVariant::Collective), 0.1707, epsilon = 2e-3);
        assert_abs_diff_eq!(threshold(ProofVariant::Chsh), 0.14645, epsilon = 5e-4);
        assert_abs_diff_eq!(
            threshold_in(ProofVariant::Chsh, 0.0, 0.5).unwrap(),
            CHSH_THRESHOLD,
            epsilon = THRESHOLD_TOL
        );
        let (p, c, s) = (
            threshold(ProofVariant::Purification),
            threshold(ProofVariant::Collective),
            threshold(ProofVariant::Chsh),
        );
        assert!(p < s && s < c);
    }

    #[test]
    fn bisection_is_bracket_independent() {
        for v in [ProofVariant::Purification, ProofVariant::Collective] {
            let reference = threshold(v);
            for (lo, hi) in [(0.01, 0.4), (0.05, 0.3), (1e-6, 0.49), (0.1, 0.2)] {
                let t = threshold_in(v, lo, hi).unwrap();
                assert!((t - reference).abs() < 2.0 * THRESHOLD_TOL);
            }
        }
        assert!(threshold_in(ProofVariant::Collective, 0.2, 0.4).is_err());
    }

    #[test]
    fn entropy_exceeds_twice_ber() {
        for k in 1..500 {
            let p = k as f64 * 1e-3;
            assert!(binary_entropy(p).unwrap() > 2.0 * p);
        }
    }

    #[test]
    fn rates_decrease_up_to_threshold() {
        for v in ProofVariant::ALL {
            let t = threshold(v);
            let mut prev = f64::INFINITY;
            let mut k = 0;
            while k as f64 * 1e-3 <= t {
                let r = key_rate(k as f64 * 1e-3, v).unwrap().rate;
                assert!(r < prev);
                prev = r;
                k += 1;
            }
        }
    }

    #[test]
    fn comparison_table() {
        let t = compare_variants(&[0.05]).unwrap();
        assert!(t[0].collective.rate > t[0].purification.rate);
        let t = compare_variants(&[0.0]).unwrap();
        assert_eq!((t[0].purification.rate, t[0].collective.rate, t[0].chsh.rate), (1.0, 1.0, 1.0));
        let t = compare_variants(&[0.11]).unwrap();
        assert_abs_diff_eq!(t[0].purification.rate, 0.0, epsilon = 2e-3);
        assert_abs_diff_eq!(t[0].collective.rate, 0.2802, epsilon = 1e-3);
        let grid: Vec<f64> = (1..500).map(|k| k as f64 * 1e-3).collect();
        assert!(compare_variants(&grid).unwrap().iter().all(VariantComparison::collective_dominates));
    }

    #[test]
    fn parse_variants() {
        assert_eq!("chsh".parse::<ProofVariant>().unwrap(), ProofVariant::Chsh);
        assert!("bogus".parse::<ProofVariant>().is_err());
    }
}
