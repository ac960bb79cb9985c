//! The four subcommands. Each writes its files under the output directory and
//! returns whether its check passed.

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rch_core::hj::{self, Band, Classification, Configuration, Mode};
use rch_core::integrate::{self, Invariant};
use rch_core::poisson::Casimir;
use rch_core::{axioms, rch, sampling, Error, ReducedPoint};

use crate::config::{ControlKind, ScenarioConfig};
use crate::error::CliError;
use crate::output::{csv_row, write_atomic, Report};
use crate::scenario::{self, shape};

/// Settings shared by all commands.
#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    /// Output directory.
    pub out: PathBuf,
    /// Seed; overrides `run.seed`.
    pub seed: Option<u64>,
    /// Flip the sign of the translational se(3) bracket in `bracket-verify`.
    pub inject_sign_error: bool,
}

impl Options {
    /// Options writing to `out` with the config's seed.
    pub fn new(out: impl Into<PathBuf>) -> Self {
        Self { out: out.into(), seed: None, inject_sign_error: false }
    }
}

/// Result of a command.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// Whether the command's check passed; decides the exit code.
    pub passed: bool,
    /// Human-readable summary.
    pub summary: String,
    /// Files written.
    pub files: Vec<PathBuf>,
}

fn seed(cfg: &ScenarioConfig, opts: &Options) -> u64 {
    opts.seed.unwrap_or(cfg.run.seed)
}

fn step_error(e: Error) -> CliError {
    match e {
        Error::InvalidStep(m) => CliError::field("run.dt", m),
        e => e.into(),
    }
}

fn status(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Integrate the configured system and write `trajectory.csv` and `drift.txt`.
///
/// CSV columns: `t`, then `pi1..3` (and `gamma1..3` on se(3)*), the rotor
/// angles (`alpha*` or `theta*`), `l*`, then `energy` and the Casimirs.
pub fn simulate(cfg: &ScenarioConfig, opts: &Options) -> Result<Outcome, CliError> {
    let (_, sys) = scenario::controlled_system(cfg)?;
    let p0 = scenario::initial_state(cfg)?;
    let casimirs = Casimir::all(shape(cfg.system.kind).0);
    let mut inv = vec![Invariant { name: "energy", f: sys.hamiltonian.as_ref() }];
    inv.extend(casimirs.iter().map(|c| Invariant { name: c.name(), f: c }));
    let field = |p: &ReducedPoint| rch::dynamical_field(&sys, p);
    let mut drift = Report::new();
    drift
        .put("system", cfg.system.kind)
        .put("dt", cfg.run.dt)
        .put("t_end", cfg.run.t_end)
        .put("tolerance", cfg.tolerances.drift);
    let traj = match integrate::run(&field, &p0, cfg.run.dt, cfg.run.t_end, &inv) {
        Ok(t) => t,
        Err(Error::BlowUp { time }) => {
            drift.put("status", "BLOWUP").put("failure_time", time);
            let f = write_atomic(&opts.out, "drift.txt", &drift.render())?;
            return Ok(Outcome { passed: false, summary: format!("blow-up at t = {time}"), files: vec![f] });
        }
        Err(e) => return Err(step_error(e)),
    };

    let mut csv = String::from("t,");
    let mut header = scenario::state_columns(cfg.system.kind);
    header.extend(traj.drift.iter().map(|d| d.name.clone()));
    csv.push_str(&header.join(","));
    csv.push('\n');
    for (i, (t, s)) in traj.times.iter().zip(&traj.states).enumerate() {
        let mut row = vec![*t];
        row.extend(s.to_vec());
        row.extend(traj.drift.iter().map(|d| d.values[i]));
        csv.push_str(&csv_row(&row));
        csv.push('\n');
    }

    let mut ok = true;
    let mut summary = String::new();
    drift.put("steps", traj.times.len() - 1);
    for d in &traj.drift {
        let max = d.max();
        ok &= max <= cfg.tolerances.drift;
        drift
            .put(format!("{}.initial", d.name), d.values[0])
            .put(format!("{}.max_drift", d.name), max)
            .put(format!("{}.drift_kind", d.name), if d.relative() { "relative" } else { "absolute" });
        summary.push_str(&format!("{} drift {:e}\n", d.name, max));
    }
    drift.put("status", status(ok));
    summary.push_str(status(ok));
    let files =
        vec![write_atomic(&opts.out, "trajectory.csv", &csv)?, write_atomic(&opts.out, "drift.txt", &drift.render())?];
    Ok(Outcome { passed: ok, summary, files })
}

/// Sample configurations, gate on closedness, then tabulate the paired
/// residuals into `residual_report.txt`. Passes iff no sample is INCONSISTENT
/// and the gate and membership checks hold.
pub fn hj_check(cfg: &ScenarioConfig, opts: &Options) -> Result<Outcome, CliError> {
    let (_, sys) = scenario::controlled_system(cfg)?;
    let (gamma, label) = scenario::section(cfg)?;
    let mode = scenario::mode(cfg)?;
    let seed = seed(cfg, opts);
    let n = cfg.run.samples.unwrap_or(100);
    let (alg, k) = shape(cfg.system.kind);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<Configuration> = (0..n).map(|_| sampling::configuration(&mut rng, alg, k)).collect();
    let band = Band { pass: cfg.tolerances.pass, fail: cfg.tolerances.fail };

    let mut r = Report::new();
    r.put("system", cfg.system.kind)
        .put("section", &label)
        .put("family", gamma.family().name())
        .put("symplectic_pullback", gamma.family().symplectic_pullback())
        .put("mode", if mode == Mode::Full { "full" } else { "reduced" })
        .put("seed", seed)
        .put("sample_count", n);

    let closedness = hj::closedness_defect_at(gamma.as_ref(), &samples)?;
    let gate = closedness <= cfg.tolerances.closedness;
    r.put("closedness_defect", closedness)
        .put("closedness_tolerance", cfg.tolerances.closedness)
        .put("closedness_gate", if gate { "PASS" } else { "REJECTED" });
    let pb = hj::pullback_identity_defect(gamma.as_ref(), n, &mut rng)?;
    r.put("pullback_defect", pb.defect).put("pullback_lhs_max", pb.lhs_max).put("pullback_rhs_max", pb.rhs_max);

    let finish = |r: &mut Report, st: &str, summary: String, passed: bool| -> Result<Outcome, CliError> {
        r.put("status", st);
        let f = write_atomic(&opts.out, "residual_report.txt", &r.render())?;
        Ok(Outcome { passed, summary, files: vec![f] })
    };
    if !gate {
        let msg = format!(
            "closedness defect {closedness:e} exceeds {:e}; residuals not evaluated",
            cfg.tolerances.closedness
        );
        return finish(&mut r, "REJECTED", msg, false);
    }
    let report = match hj::residual_report(&sys, gamma.as_ref(), &samples, mode, band) {
        Ok(rep) => rep,
        Err(Error::Membership { defect }) => {
            r.put("membership_defect", defect);
            return finish(
                &mut r,
                "MEMBERSHIP_VIOLATION",
                format!("image of gamma leaves the momentum level: defect {defect:e}"),
                false,
            );
        }
        Err(e) => return Err(e.into()),
    };
    let count = |c: Classification| report.rows.iter().filter(|row| row.class == c).count();
    let (pass, fail, inconsistent) =
        (count(Classification::Pass), count(Classification::Fail), count(Classification::Inconsistent));
    r.put("relatedness_residual", report.relatedness_residual)
        .put("hj_residual", report.hj_residual)
        .put("band_pass", band.pass)
        .put("band_fail", band.fail)
        .put("pass_count", pass)
        .put("fail_count", fail)
        .put("inconsistent_count", inconsistent);
    for (i, w) in report.worst.iter().enumerate() {
        r.put(format!("worst.{i}.index"), w.index)
            .put(format!("worst.{i}.relatedness"), w.relatedness)
            .put(format!("worst.{i}.hj"), w.hj);
    }
    for (i, row) in report.rows.iter().enumerate() {
        r.put(format!("sample.{i}.relatedness"), row.relatedness)
            .put(format!("sample.{i}.hj"), row.hj)
            .put(format!("sample.{i}.branch"), row.branch)
            .put(format!("sample.{i}.x_gamma_norm"), row.x_gamma_norm)
            .put(format!("sample.{i}.class"), row.class.name());
    }
    let ok = inconsistent == 0;
    let summary = format!(
        "closedness {closedness:e}\nrelatedness {:e}\nhj {:e}\nPASS {pass} FAIL {fail} INCONSISTENT {inconsistent}",
        report.relatedness_residual, report.hj_residual
    );
    finish(&mut r, if ok { "OK" } else { "INCONSISTENT" }, summary, ok)
}

/// Integrate the configured system under its matching control next to the
/// target system, and write the largest deviation, measured in target
/// coordinates, to `equivalence_report.txt`.
pub fn equivalence_demo(cfg: &ScenarioConfig, opts: &Options) -> Result<Outcome, CliError> {
    if cfg.control.kind != ControlKind::Matching {
        return Err(CliError::field("control.kind", "equivalence-demo needs matching control"));
    }
    let (params, sys_a) = scenario::controlled_system(cfg)?;
    let m = scenario::matching(cfg, &params)?;
    let a0 = scenario::initial_state(cfg)?;
    let b0 = m.transport.pullback_inverse(&a0)?;
    let fa = |p: &ReducedPoint| rch::dynamical_field(&sys_a, p);
    let fb = |p: &ReducedPoint| rch::dynamical_field(&m.target, p);
    let ta = integrate::run(&fa, &a0, cfg.run.dt, cfg.run.t_end, &[]).map_err(step_error)?;
    let tb = integrate::run(&fb, &b0, cfg.run.dt, cfg.run.t_end, &[]).map_err(step_error)?;
    let mut max = 0.0f64;
    let mut at = 0.0;
    for ((t, a), b) in ta.times.iter().zip(&ta.states).zip(&tb.states) {
        let d = m.transport.pullback_inverse(a)?.difference(b)?.norm();
        if d > max {
            max = d;
            at = *t;
        }
    }
    let final_dev = m.transport.pullback_inverse(ta.last())?.difference(tb.last())?.norm();
    let ok = max <= cfg.tolerances.deviation;
    let mut r = Report::new();
    r.put("source", cfg.system.kind)
        .put("target", m.target_kind)
        .put("control", if cfg.control.enabled { "enabled" } else { "disabled" })
        .put("dt", cfg.run.dt)
        .put("t_end", cfg.run.t_end)
        .put("max_deviation", max)
        .put("max_deviation_time", at)
        .put("final_deviation", final_dev)
        .put("tolerance", cfg.tolerances.deviation)
        .put("status", status(ok));
    let f = write_atomic(&opts.out, "equivalence_report.txt", &r.render())?;
    Ok(Outcome { passed: ok, summary: format!("max deviation {max:e} at t = {at}\n{}", status(ok)), files: vec![f] })
}

/// Run the bracket property suite and write `bracket_report.txt`.
pub fn bracket_verify(cfg: &ScenarioConfig, opts: &Options) -> Result<Outcome, CliError> {
    let seed = seed(cfg, opts);
    let n = cfg.run.samples.unwrap_or(1000);
    let results = axioms::run_suite(seed, n, opts.inject_sign_error)?;
    let mut r = Report::new();
    r.put("seed", seed).put("instances", n).put("sign_error_injected", opts.inject_sign_error);
    let mut summary = String::new();
    for x in &results {
        let key = format!("{}.{}", x.bracket, x.property);
        r.put(format!("{key}.worst"), x.worst)
            .put(format!("{key}.tolerance"), x.tolerance)
            .put(format!("{key}.worst_index"), x.worst_index)
            .put(format!("{key}.status"), status(x.passed()));
        summary.push_str(&format!("{key}: {} (worst {:e} at {})\n", status(x.passed()), x.worst, x.worst_index));
    }
    let ok = results.iter().all(|x| x.passed());
    r.put("status", status(ok));
    summary.push_str(status(ok));
    let f = write_atomic(&opts.out, "bracket_report.txt", &r.render())?;
    Ok(Outcome { passed: ok, summary, files: vec![f] })
}
