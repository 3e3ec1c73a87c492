//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use qspectra_cli::suite::{run_suite, SuiteConfig};
use qspectra_core::{IdentityReport, Status};

type Verdict = Result<String, String>;

fn reports(selection: &[&str]) -> Vec<IdentityReport> {
    let cfg = SuiteConfig {
        identities: selection.iter().map(|s| s.to_string()).collect(),
        ..SuiteConfig::default()
    };
    run_suite(&cfg)
}

fn with_label<'a>(all: &'a [IdentityReport], prefix: &str) -> Vec<&'a IdentityReport> {
    all.iter().filter(|r| r.identity.starts_with(prefix)).collect()
}

fn describe(r: &IdentityReport) -> String {
    let params: Vec<String> = r
        .params
        .iter()
        .filter(|(k, _)| k.as_str() != "seed")
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    format!(
        "{} [{}] status={:?} residual={:.3e} tail={:.3e}{}",
        r.identity,
        params.join(" "),
        r.status,
        r.residual,
        r.tail_bound,
        r.note.as_deref().map(|n| format!(" ({n})")).unwrap_or_default()
    )
}

/// Every report passes with residual below `bound`; at least `min_count` of them.
fn all_below(all: &[IdentityReport], prefix: &str, bound: f64, min_count: usize) -> Result<usize, String> {
    let rs = with_label(all, prefix);
    if rs.len() < min_count {
        return Err(format!("{prefix}: expected at least {min_count} reports, got {}", rs.len()));
    }
    for r in &rs {
        if r.status != Status::Pass || !(r.residual < bound) {
            return Err(format!("{prefix}: {}", describe(r)));
        }
    }
    Ok(rs.len())
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    if elapsed.as_secs_f64() < limit_s {
        Ok(())
    } else {
        Err(format!("took {:.1} s, limit {limit_s} s", elapsed.as_secs_f64()))
    }
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let all = reports(&["multipartite"]);
    let oracle = all_below(&all, "multipartite[oracle]", 1e-9, 12)?;
    let examples = all_below(&all, "multipartite[example]", 0.5, 4)?;
    let euler = all_below(&all, "euler-symmetry", 1e-10, 6)?;
    within(start.elapsed(), 10.0)?;
    Ok(format!("{oracle} oracle blocks, {examples} worked examples, {euler} Euler symmetry checks"))
}

fn criterion_2() -> Verdict {
    let start = Instant::now();
    let all = reports(&["bell"]);
    let bell = all_below(&all, "bell[recurrence=faa-di-bruno]", 1e-9, 12)?;
    let p = all_below(&all, "P1", 1e-8, 6)?;
    let q = all_below(&all, "Q1", 1e-8, 6)?;
    let ex = all_below(&all, "example[2P2", 1e-10, 6)?;
    within(start.elapsed(), 10.0)?;
    Ok(format!("{bell} Bell orders, {p}+{q} coefficient blocks, {ex} example series"))
}

fn criterion_3() -> Verdict {
    let all = reports(&["prod1"]);
    let n = all_below(&all, "prod1", 1e-9, 3)?;
    Ok(format!("{n} exponent families to order 20"))
}

fn criterion_4() -> Verdict {
    let start = Instant::now();
    let all = reports(&["zeta"]);
    let cross = all_below(&all, "zeta[product=exp(log)]", 1e-8, 18)?;
    let zeros = all_below(&all, "zeta-zero", 1e-6, 50)?;
    within(start.elapsed(), 30.0)?;
    Ok(format!("{cross} grid points, {zeros} lattice zeros"))
}

fn criterion_5() -> Verdict {
    let all = reports(&["ruelle", "beta", "generating", "DE3"]);
    for r in &all {
        if let Some(q) = r.params.get("q") {
            let q = qspectra_core::scalar::parse_complex(q).map_err(|e| e.to_string())?;
            if q.norm() > 0.3 + 1e-12 {
                return Err(format!("nome outside |q| <= 0.3: {}", describe(r)));
            }
        }
    }
    let mut counts = Vec::new();
    for label in ["R1", "R2", "RU1", "RU2", "beta", "F1", "G1", "DE3[first]", "DE3[second]"] {
        counts.push(format!("{label}:{}", all_below(&all, label, 1e-7, 1)?));
    }
    let mut conventions = Vec::new();
    for r in with_label(&all, "beta") {
        conventions.push(format!("m={} passes {}", r.params["m"], r.params["passing_conventions"]));
    }
    for b in ["0", "1"] {
        if !all.iter().any(|r| r.identity.starts_with("DE3") && r.params.get("b").map(String::as_str) == Some(b)) {
            return Err(format!("DE3 missing at b = {b}"));
        }
    }
    if let Some(r) = all.iter().find(|r| r.status != Status::Pass) {
        return Err(describe(r));
    }
    Ok(format!("{}; {}", counts.join(" "), conventions.join(", ")))
}

fn criterion_6() -> Verdict {
    let start = Instant::now();
    let all = reports(&["hierarchy"]);
    let g21 = all_below(&all, "G21", 1e-8, 18)?;
    let g22 = all_below(&all, "G22", 1e-8, 18)?;
    let g1 = all_below(&all, "gamma1[q=p]", 1e-7, 1)?;
    let g2 = all_below(&all, "gamma2[q=p=t]", 1e-7, 1)?;
    let b44 = with_label(&all, "B44[taylor]");
    let b44 = b44.first().ok_or("B44 report missing")?;
    if !((b44.lhs - qspectra_core::scalar::real(-9.0)).norm() < 1e-12) {
        return Err(describe(b44));
    }
    let modularity = with_label(&all, "gamma2-modularity");
    let generic = modularity
        .iter()
        .find(|r| r.params.get("point").map(String::as_str) == Some("generic"))
        .ok_or("generic modularity report missing")?;
    let imaginary = modularity
        .iter()
        .find(|r| r.params.get("point").map(String::as_str) == Some("imaginary"))
        .ok_or("imaginary-period modularity report missing")?;
    within(start.elapsed(), 60.0)?;
    let summary = format!("G21 {g21}, G22 {g22}, gamma1 {g1}, gamma2 {g2}, B44 = {}", b44.lhs);
    let ok = |r: &IdentityReport| r.status == Status::Pass && r.residual < 1e-4 && r.tail_bound < 1e-6;
    if !ok(imaginary) {
        return Err(format!(
            "{summary}; modularity at the purely imaginary point: {}; generic point: {}",
            describe(imaginary),
            describe(generic)
        ));
    }
    Ok(format!("{summary}; modularity {}", describe(imaginary)))
}

fn criterion_7() -> Verdict {
    let all = reports(&["symmfunc"]);
    let chars = all_below(&all, "chars[orthogonality]", 0.5, 8)?;
    let schur = all_below(&all, "schur[characters=tableaux]", 0.5, 15)?;
    Ok(format!("orthogonality for n <= 8 ({chars}), {schur} Schur blocks exact"))
}

fn criterion_8() -> Verdict {
    let start = Instant::now();
    let all = reports(&["cs"]);
    let basis = all_below(&all, "cs[schur=powersum]", 1e-9, 20)?;
    let round = all_below(&all, "cs[W<->P]", 0.5, 10)?;
    let free = all_below(&all, "cs[exp(F)=Z]", 1e-9, 2)?;
    let collapse = all_below(&all, "bilateral-collapse", 1e-7, 3)?;
    let validator = all_below(&all, "rank-level[validator]", 0.5, 1)?;
    all_below(&all, "rank-level[reflection]", 0.5, 1)?;
    all_below(&all, "lmov", 1e-9, 2)?;
    within(start.elapsed(), 30.0)?;
    Ok(format!(
        "{basis} seeded tables, {round} round trips, {free} free energies, {collapse} collapses, validator {validator}"
    ))
}

fn criterion_9() -> Verdict {
    let exe = env!("CARGO_BIN_EXE_qspectra");
    let mut outputs = Vec::new();
    let mut slowest = 0.0f64;
    for _ in 0..2 {
        let start = Instant::now();
        let out = Command::new(exe)
            .args(["suite", "--all", "--q", "0.2"])
            .output()
            .map_err(|e| e.to_string())?;
        slowest = slowest.max(start.elapsed().as_secs_f64());
        if out.status.code() != Some(0) {
            return Err(format!(
                "exit status {:?}: {}",
                out.status.code(),
                String::from_utf8_lossy(&out.stderr)
            ));
        }
        outputs.push(out.stdout);
    }
    if slowest >= 180.0 {
        return Err(format!("slowest run {slowest:.1} s"));
    }
    if outputs[0] != outputs[1] {
        return Err("two serial runs differ".into());
    }
    let parsed: serde_json::Value = serde_json::from_slice(&outputs[0]).map_err(|e| e.to_string())?;
    let n = parsed.as_array().map_or(0, Vec::len);
    Ok(format!("{n} reports, identical bytes across runs, slowest {slowest:.2} s"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("multipartite oracle equivalence", criterion_1),
        ("Bell consistency", criterion_2),
        ("product recurrence", criterion_3),
        ("spectral cross-representation", criterion_4),
        ("Ruelle identities", criterion_5),
        ("hierarchy", criterion_6),
        ("symmetric functions", criterion_7),
        ("Chern-Simons layer", criterion_8),
        ("full suite", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = run();
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("criterion {} {name}: PASS ({secs:.2} s) {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({secs:.2} s) {detail}", i + 1);
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
