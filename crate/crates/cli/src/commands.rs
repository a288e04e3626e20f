use std::fmt::Write as _;
use std::path::Path;

use inls_core::functionals::{thresholds_from_profile, Evaluator};
use inls_core::grid::snapshot;
use inls_core::groundstate;
use inls_core::{
    build_cutoff, certify, check_hypotheses, classify, evolve_observed, BlowUp, BlowUpReason, Classification,
    EvolutionTrace, Field, Grid, SystemSpec, ThresholdSet, VirialObserver,
};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::OutDir;

/// `true` maps to exit status 0, `false` to 1.
pub type Outcome = Result<bool, CliError>;

pub fn check(cfg: &RunConfig, out: &OutDir) -> Outcome {
    let spec = cfg.system()?;
    let report = check_hypotheses(&spec, cfg.check.samples, cfg.seed());
    out.write("hypotheses.txt", &report.to_string())?;
    for failure in report.failures() {
        eprintln!("{} failed (worst residual {:.3e})", failure.hypothesis, failure.worst_residual);
    }
    Ok(report.all_pass())
}

pub fn ground_state(cfg: &RunConfig, out: &OutDir) -> Outcome {
    let spec = cfg.system()?;
    let grid = cfg.grid()?;
    let gs = match groundstate::solve(&spec, cfg.ground_state.omega, &grid, &cfg.ground_state_options()) {
        Ok(gs) => gs,
        Err(inls_core::Error::NotConverged { iterations, residual, history }) => {
            let mut csv = String::from("iteration,residual\n");
            for (i, r) in history.iter().enumerate() {
                writeln!(csv, "{},{r:.6e}", i + 1).unwrap();
            }
            out.write("residual_history.csv", &csv)?;
            return Err(CliError::Failed(format!(
                "no convergence after {iterations} iterations (residual {residual:.3e}); history in residual_history.csv"
            )));
        }
        Err(e) => return Err(e.into()),
    };
    snapshot::write(&out.path("ground_state.bin"), &gs.psi)?;
    out.write("ground_state.txt", &gs.record())?;
    let cert = certify(&spec, &gs)?;
    out.write("certification.txt", &cert.to_string())?;
    if let Ok(th) = thresholds_from_profile(&spec, &gs.psi, gs.omega) {
        out.write("thresholds.txt", &th.to_string())?;
    }
    out.write("profile.csv", &profile_csv(&gs.psi))?;
    Ok(cert.all_pass())
}

fn profile_csv(psi: &Field) -> String {
    let mut csv = String::from("r");
    for k in 0..psi.l() {
        write!(csv, ",psi_{}", k + 1).unwrap();
    }
    csv.push('\n');
    for (j, r) in psi.grid().radii().iter().enumerate() {
        write!(csv, "{r:.10e}").unwrap();
        for k in 0..psi.l() {
            write!(csv, ",{:.16e}", psi.component(k)[j].re).unwrap();
        }
        csv.push('\n');
    }
    csv
}

/// Loads the configured snapshot or solves for a certified ground state.
fn thresholds(cfg: &RunConfig, spec: &SystemSpec) -> Result<(Field, ThresholdSet), CliError> {
    let omega = cfg.ground_state.omega;
    if let Some(path) = &cfg.ground_state.snapshot {
        let psi = snapshot::read(path)?;
        let matches = matches!(psi.grid(), Grid::Radial(g) if g.n() == spec.n()) && psi.l() == spec.l();
        if !matches {
            return Err(CliError::Usage(format!(
                "{} does not hold a radial {}-component profile in dimension {}",
                path.display(),
                spec.l(),
                spec.n()
            )));
        }
        let th = thresholds_from_profile(spec, &psi, omega)?;
        return Ok((psi, th));
    }
    let gs = groundstate::solve(spec, omega, &cfg.grid()?, &cfg.ground_state_options())?;
    let cert = certify(spec, &gs)?;
    if !cert.all_pass() {
        return Err(CliError::Failed(format!("ground state not certified:\n{cert}")));
    }
    let th = thresholds_from_profile(spec, &gs.psi, omega)?;
    Ok((gs.psi, th))
}

fn initial_data(psi: &Field, c: f64) -> Field {
    psi.scaled(Complex64::new(c, 0.0))
}

pub fn classify_cmd(cfg: &RunConfig, out: &OutDir) -> Outcome {
    let spec = cfg.system()?;
    let (psi, th) = thresholds(cfg, &spec)?;
    let cls = classify(&spec, &initial_data(&psi, cfg.evolve.c), &th, cfg.dichotomy.radial)?;
    out.write("thresholds.txt", &th.to_string())?;
    out.write("classification.txt", &format!("c = {}\n{cls}", cfg.evolve.c))?;
    println!("{}", cls.verdict);
    Ok(true)
}

struct Run {
    classification: Classification,
    trace: EvolutionTrace,
}

fn run_one(
    cfg: &RunConfig,
    spec: &SystemSpec,
    psi: &Field,
    th: &ThresholdSet,
    c: f64,
) -> Result<Run, CliError> {
    let u0 = initial_data(psi, c);
    let classification = classify(spec, &u0, th, cfg.dichotomy.radial)?;
    let opts = cfg.evolve_options();
    let trace = match cfg.dichotomy.cutoff_radius {
        Some(radius) => {
            let grid = psi.grid().as_radial().expect("checked radial");
            let cutoff = build_cutoff(grid, radius)?;
            evolve_observed(spec, &u0, &opts, &mut VirialObserver::new(spec, &cutoff))?
        }
        None => evolve_observed(spec, &u0, &opts, &mut ())?,
    };
    Ok(Run { classification, trace })
}

fn flag_text(flag: Option<BlowUp>) -> String {
    flag.map_or_else(|| "none".into(), |b| format!("{} at t = {}", b.reason, b.time))
}

pub fn evolve_cmd(cfg: &RunConfig, out: &OutDir) -> Outcome {
    let spec = cfg.system()?;
    let (psi, th) = thresholds(cfg, &spec)?;
    let c = cfg.evolve.c;
    let u0 = initial_data(&psi, c);
    let classification = classify(&spec, &u0, &th, cfg.dichotomy.radial)?;
    out.write("classification.txt", &format!("c = {c}\n{classification}"))?;
    let Run { trace, .. } = run_one(cfg, &spec, &psi, &th, c)?;
    out.write("trace.csv", &trace.to_csv())?;

    let k0 = trace.rows[0].k;
    let window: Vec<_> = trace.rows.iter().take_while(|r| r.k <= cfg.evolve.drift_window * k0).collect();
    let drift = |f: fn(&inls_core::TraceRow) -> f64| {
        let v0 = f(window[0]);
        window.iter().map(|r| (f(r) - v0).abs()).fold(0.0, f64::max) / v0.abs().max(f64::MIN_POSITIVE)
    };
    let q_drift = drift(|r| r.q);
    let e_drift = drift(|r| r.e);
    let window_end = window.last().map_or(0.0, |r| r.t);
    let mut problems = Vec::new();
    if trace.blowup.is_some() && classification.verdict.is_global() {
        problems.push(format!("blow-up flagged under a {} verdict", classification.verdict));
    }
    if matches!(trace.blowup, Some(b) if b.reason == BlowUpReason::Overflow) {
        problems
            .push("state overflowed before the kinetic criterion fired; dt does not resolve the flow".into());
    }
    if q_drift > cfg.evolve.charge_tolerance {
        problems.push(format!("charge drift {q_drift:.3e} exceeds {:.1e}", cfg.evolve.charge_tolerance));
    }
    if e_drift > cfg.evolve.energy_tolerance {
        problems.push(format!("energy drift {e_drift:.3e} exceeds {:.1e}", cfg.evolve.energy_tolerance));
    }
    let mut summary = format!(
        "verdict = {}\nflag = {}\nsteps = {}\ndrift_window_end = {window_end}\ncharge_drift = {q_drift:.6e}\nenergy_drift = {e_drift:.6e}\n",
        classification.verdict,
        flag_text(trace.blowup),
        trace.steps,
    );
    for p in &problems {
        writeln!(summary, "contradiction = {p}").unwrap();
        eprintln!("{p}");
    }
    out.write("summary.txt", &summary)?;
    println!("{} | flag: {}", classification.verdict, flag_text(trace.blowup));
    Ok(problems.is_empty())
}

pub fn sweep(cfg: &RunConfig, out: &OutDir) -> Outcome {
    let spec = cfg.system()?;
    let (psi, th) = thresholds(cfg, &spec)?;
    let rows_dir = out.subdir("sweep")?;
    let rows: Vec<String> =
        cfg.dichotomy
            .c_values
            .par_iter()
            .enumerate()
            .map(|(i, &c)| match run_one(cfg, &spec, &psi, &th, c) {
                Ok(run) => {
                    let name = format!("trace_{i:03}.csv");
                    let written = rows_dir.write(&name, &run.trace.to_csv());
                    let cls = &run.classification;
                    let (time, reason) = run.trace.blowup.map_or(("none".into(), "none".into()), |b| {
                        (b.time.to_string(), b.reason.to_string())
                    });
                    let error = written.err().map_or(String::new(), |e| e.to_string());
                    format!(
                        "{c},{},{:.10e},{:.10e},{time},{reason},{}",
                        cls.verdict,
                        cls.energy_margin,
                        cls.kinetic_margin,
                        csv_field(&error)
                    )
                }
                Err(e) => format!("{c},error,,,,,{}", csv_field(&e.to_string())),
            })
            .collect();
    let mut csv = String::from("c,verdict,energy_margin,kinetic_margin,flag_time,flag_reason,error\n");
    for row in rows {
        csv += &row;
        csv.push('\n');
    }
    out.write("sweep.csv", &csv)?;
    Ok(true)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn report(cfg: &RunConfig, out: &OutDir, input: Option<&Path>) -> Outcome {
    let spec = cfg.system()?;
    let omega = cfg.ground_state.omega;
    let field = match input {
        Some(path) => snapshot::read(path)?,
        None => thresholds(cfg, &spec)?.0,
    };
    if field.l() != spec.l() || field.grid().n() != spec.n() {
        return Err(CliError::Usage("snapshot does not match the configured system".into()));
    }
    let ev = Evaluator::new(&spec, field.grid())?;
    let mut text = ev.report_at(&field, omega)?.to_string();
    if let Ok(th) = thresholds_from_profile(&spec, &field, omega) {
        text += "\n";
        text += &th.to_string();
    }
    out.write("report.txt", &text)?;
    print!("{text}");
    Ok(true)
}
