//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};
use std::process::{Command, ExitCode};

use qkd_collective::attack::{evolve, mdi_leak_bound, AttackParams};
use qkd_collective::entangled::{chsh_value, equivalence_check, CHSH_THRESHOLD};
use qkd_collective::keyrate::{key_rate, threshold, ProofVariant};
use qkd_collective::oracle::{verify_grid, DEFAULT_GRID};
use qkd_collective::usd::{chi_total, sweep_alpha};

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect()
}

fn grid() -> Vec<AttackParams> {
    let (na, nc, nt) = DEFAULT_GRID;
    let mut out = Vec::new();
    for a in linspace(0.0, FRAC_PI_2, na) {
        for c in linspace(0.0, 1.0, nc) {
            for t in linspace(0.0, FRAC_PI_2, nt) {
                out.push(AttackParams::new(a, c, t).unwrap());
            }
        }
    }
    out
}

fn sweep_envelope() -> Check {
    for p in [0.01, 0.05, 0.10] {
        let rows = sweep_alpha(p, 257).map_err(|e| e.to_string())?;
        let max = rows.iter().map(|r| r.chi_total).fold(f64::MIN, f64::max);
        ensure((max - 2.0 * p).abs() < 1e-9, || format!("p_e={p}: max chi_total {max}"))?;
        for r in &rows {
            ensure(r.chi_total <= 2.0 * p + 1e-9, || format!("p_e={p}: chi_total {} at alpha {}", r.chi_total, r.alpha))?;
        }
        for alpha in [0.0, FRAC_PI_4, FRAC_PI_2] {
            let chi = chi_total(&AttackParams::from_ber(alpha, p).unwrap()).chi_total;
            ensure((chi - 2.0 * p).abs() < 1e-9, || format!("p_e={p}: chi_total {chi} at alpha {alpha}"))?;
        }
        ensure((rows[128].chi_total - 2.0 * p).abs() < 1e-9, || "sample 128 is not a maximum".into())?;
    }
    Ok(())
}

fn thresholds() -> Check {
    let pur = threshold(ProofVariant::Purification);
    let col = threshold(ProofVariant::Collective);
    let chsh = threshold(ProofVariant::Chsh);
    ensure((pur - 0.110).abs() <= 0.001, || format!("purification {pur}"))?;
    ensure((col - 0.171).abs() <= 0.002, || format!("collective {col}"))?;
    ensure((chsh - 0.1464).abs() <= 0.0005, || format!("chsh {chsh}"))?;
    ensure((chsh - (2.0 - SQRT_2) / 4.0).abs() < 1e-9, || format!("chsh closed form {chsh}"))
}

fn ber_bound_and_alpha_independence() -> Check {
    for p in grid() {
        let out = evolve(&p);
        let expected = 0.25 * (1.0 - p.overlap_c() * p.theta().cos());
        ensure((out.ber_total - expected).abs() < 1e-10, || format!("{p:?}: ber_total {}", out.ber_total))?;
        let at_zero = evolve(&AttackParams::new(0.0, p.overlap_c(), p.theta()).unwrap()).ber_total;
        ensure((out.ber_total - at_zero).abs() < 1e-12, || format!("{p:?}: alpha dependence"))?;
    }
    Ok(())
}

fn oracle() -> Check {
    let (a, c, t) = DEFAULT_GRID;
    let r = verify_grid(a, c, t).map_err(|e| e.to_string())?;
    ensure(r.max_prob_error < 1e-9 && r.max_state_error < 1e-9, || format!("{r:?}"))
}

fn normalization() -> Check {
    for k in 1..=24 {
        let p_e = k as f64 * 0.01;
        for alpha in linspace(0.0, FRAC_PI_2, 9) {
            let r = chi_total(&AttackParams::from_ber(alpha, p_e).unwrap());
            let s2 = (2.0 * alpha).sin().powi(2);
            let a_z = 4.0 * p_e - 2.0 * p_e * s2;
            let a_x = 2.0 * p_e * (1.0 + s2);
            let sum_z = r.guess_z.p_right + r.guess_z.p_wrong;
            let sum_x = r.guess_x.p_right + r.guess_x.p_wrong;
            ensure((sum_z - a_z).abs() < 1e-10, || format!("Z at p_e={p_e}, alpha={alpha}: {sum_z} vs {a_z}"))?;
            ensure((sum_x - a_x).abs() < 1e-10, || format!("X at p_e={p_e}, alpha={alpha}: {sum_x} vs {a_x}"))?;
        }
    }
    Ok(())
}

fn entangled_equivalence() -> Check {
    let (na, nc, _) = DEFAULT_GRID;
    for a in linspace(0.0, FRAC_PI_2, na) {
        for c in linspace(0.0, 1.0, nc) {
            let r = equivalence_check(&AttackParams::new(a, c, 0.0).unwrap());
            ensure(r.equivalent && r.max_deviation < 1e-10, || format!("alpha={a}, c={c}: {r:?}"))?;
        }
    }
    Ok(())
}

fn chsh() -> Check {
    let s0 = chsh_value(0.0).map_err(|e| e.to_string())?;
    ensure((s0 - 2.0 * SQRT_2).abs() < 1e-12, || format!("S(0) = {s0}"))?;
    let st = chsh_value(CHSH_THRESHOLD).map_err(|e| e.to_string())?;
    ensure((st - 2.0).abs() < 1e-12, || format!("S(threshold) = {st}"))?;
    let below = key_rate(CHSH_THRESHOLD - 1e-12, ProofVariant::Chsh).unwrap().secure;
    let at = key_rate(CHSH_THRESHOLD, ProofVariant::Chsh).unwrap().secure;
    ensure(below && !at, || format!("secure below={below}, at={at}"))
}

fn key_rate_ordering() -> Check {
    for k in 1..500 {
        let p = k as f64 * 1e-3;
        let col = key_rate(p, ProofVariant::Collective).unwrap().rate;
        let pur = key_rate(p, ProofVariant::Purification).unwrap().rate;
        ensure(col > pur, || format!("p_e={p}: collective {col} <= purification {pur}"))?;
    }
    let col = key_rate(0.05, ProofVariant::Collective).unwrap().rate;
    let pur = key_rate(0.05, ProofVariant::Purification).unwrap().rate;
    ensure((col - 0.6136).abs() <= 1e-3, || format!("collective {col}"))?;
    ensure((pur - 0.4272).abs() <= 1e-3, || format!("purification {pur}"))
}

fn mdi() -> Check {
    let r = mdi_leak_bound(0.02, 0.02).map_err(|e| e.to_string())?;
    ensure(r.leak_bound == 0.08, || format!("leak bound {}", r.leak_bound))
}

fn cli_determinism() -> Check {
    let bin = env!("CARGO_BIN_EXE_qkd-collective");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let path = dir.path().join(name);
        let status = Command::new(bin)
            .args(["sweep-alpha", "--pe", "0.05", "--samples", "257", "--format", "csv", "--out"])
            .arg(&path)
            .status()
            .map_err(|e| e.to_string())?;
        ensure(status.success(), || format!("sweep-alpha exited with {status}"))?;
        files.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    ensure(files[0] == files[1], || "outputs differ".into())?;
    ensure(!files[0].is_empty(), || "empty output".into())?;
    let status = Command::new(bin).arg("oracle-check").output().map_err(|e| e.to_string())?.status;
    ensure(status.code() == Some(0), || format!("oracle-check exited with {status}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("chi_total envelope over alpha", sweep_envelope),
        ("tolerable BER thresholds", thresholds),
        ("BER equality and alpha independence", ber_bound_and_alpha_independence),
        ("oracle equivalence", oracle),
        ("guessing normalization identities", normalization),
        ("entangled equivalence", entangled_equivalence),
        ("CHSH values and security flip", chsh),
        ("key-rate ordering", key_rate_ordering),
        ("MDI leak bound", mdi),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(()) => println!("criterion {:>2}: PASS  {name}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
