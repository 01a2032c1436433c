//! Subcommand implementations. Each returns its console text and the files
//! to write; nothing touches the disk until every computation has finished.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use anpc_core::device::fit_power_law;
use anpc_core::modulation::{carrier_values, gate_vector, reference_value, OutputLevel};
use anpc_core::oracle::{compare_reports, simulated_losses, trace_rms, Comparison};
use anpc_core::{leg_report, simulate_leg, Direction, LossReport, SimTrace, Strategy, Switch};
use rayon::prelude::*;

use crate::config::Scenario;
use crate::error::CliError;
use crate::output::{
    compare_table, read_energy_samples, report_rows, report_table, sig, table, to_csv, CompareRow,
    PatternRow, ReportRow, SweepRow, WaveformRow,
};

/// Result of a subcommand.
#[derive(Debug, Default)]
pub struct Outcome {
    pub console: String,
    /// Written in order once the command has finished.
    pub files: Vec<(PathBuf, Vec<u8>)>,
    /// Set when outputs were produced but the run should still exit nonzero.
    pub failure: Option<CliError>,
}

fn file_stem(strategy: Strategy) -> String {
    strategy.name().to_ascii_lowercase()
}

fn analytic(sc: &Scenario, strategy: Strategy, op: &anpc_core::OperatingPoint) -> Result<LossReport, CliError> {
    leg_report(strategy, op, sc.reference, &sc.model).map_err(|source| CliError::Analysis { strategy, source })
}

fn simulate(sc: &Scenario, strategy: Strategy, op: anpc_core::OperatingPoint) -> Result<SimTrace, CliError> {
    simulate_leg(&sc.sim_config(strategy, op)).map_err(|source| CliError::Simulation { strategy, source })
}

fn report_csv(reports: &[LossReport]) -> Vec<u8> {
    let rows: Vec<ReportRow> = reports.iter().flat_map(report_rows).collect();
    to_csv(&rows)
}

pub fn analyze(sc: &Scenario) -> Result<Outcome, CliError> {
    let reports = sc
        .strategies
        .par_iter()
        .map(|&s| analytic(sc, s, &sc.operating_point))
        .collect::<Result<Vec<_>, _>>()?;
    let console = reports.iter().map(report_table).collect::<Vec<_>>().join("\n");
    Ok(Outcome {
        console,
        files: vec![(sc.out_dir.join("analyze.csv"), report_csv(&reports))],
        failure: None,
    })
}

pub fn compare(sc: &Scenario) -> Result<Outcome, CliError> {
    let op = sc.operating_point;
    let runs = sc
        .strategies
        .par_iter()
        .map(|&s| {
            let a = analytic(sc, s, &op)?;
            let trace = simulate(sc, s, op)?;
            let sim = simulated_losses(&trace, &sc.model);
            let c = compare_reports(&a, &sim, sc.threshold)
                .map_err(|source| CliError::Simulation { strategy: s, source })?;
            Ok((a, sim, c))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let analytic_reports: Vec<LossReport> = runs.iter().map(|r| r.0.clone()).collect();
    let simulated_reports: Vec<LossReport> = runs.iter().map(|r| r.1.clone()).collect();
    let comparisons: Vec<Comparison> = runs.iter().map(|r| r.2).collect();
    let rows: Vec<CompareRow> = comparisons.iter().map(CompareRow::from).collect();

    let failed: Vec<String> = comparisons
        .iter()
        .filter(|c| !c.pass())
        .map(|c| c.strategy.to_string())
        .collect();
    let failure = (!failed.is_empty()).then(|| {
        CliError::Tolerance(format!(
            "analytic and simulated totals differ by more than {}% for {}",
            sig(100.0 * sc.threshold, 4),
            failed.join(", ")
        ))
    });
    Ok(Outcome {
        console: compare_table(&comparisons),
        files: vec![
            (sc.out_dir.join("compare.csv"), to_csv(&rows)),
            (sc.out_dir.join("analytic.csv"), report_csv(&analytic_reports)),
            (sc.out_dir.join("simulated.csv"), report_csv(&simulated_reports)),
        ],
        failure,
    })
}

pub fn sweep(sc: &Scenario) -> Result<Outcome, CliError> {
    let jobs: Vec<_> = sc
        .grid
        .iter()
        .flat_map(|&p| sc.strategies.iter().map(move |&s| (p, s)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(p, s)| {
            let op = sc.operating_point_at(p);
            let report = analytic(sc, s, &op)?;
            let sim = if sc.sweep_simulate {
                let trace = simulate(sc, s, op)?;
                Some(Switch::ALL.map(|sw| {
                    (
                        trace_rms(&trace, sw, Direction::Forward),
                        trace_rms(&trace, sw, Direction::Reverse),
                    )
                }))
            } else {
                None
            };
            Ok((p, report, sim))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut rows = Vec::new();
    for (p, report, sim) in &results {
        for d in &report.devices {
            let s = sim.map(|s| s[d.device.index()]);
            rows.push(SweepRow {
                m: p.m,
                cos_phi: p.cos_phi,
                i_peak: p.i_peak,
                strategy: report.strategy.to_string(),
                device: d.device.to_string(),
                rms_fwd_a: d.rms_forward,
                rms_rev_a: d.rms_reverse,
                p_cond_w: d.conduction,
                p_sw_w: d.switching,
                p_total_w: d.total(),
                sim_rms_fwd_a: s.map(|x| x.0),
                sim_rms_rev_a: s.map(|x| x.1),
            });
        }
    }

    let mut header = vec!["m", "cos_phi", "i_peak"];
    let names: Vec<String> = sc.strategies.iter().map(|s| format!("{s} (W)")).collect();
    header.extend(names.iter().map(String::as_str));
    let per_point = sc.strategies.len();
    let summary: Vec<Vec<String>> = results
        .chunks(per_point)
        .map(|chunk| {
            let p = chunk[0].0;
            let mut r = vec![sig(p.m, 4), sig(p.cos_phi, 4), sig(p.i_peak, 4)];
            r.extend(chunk.iter().map(|(_, rep, _)| sig(rep.leg_total(), 4)));
            r
        })
        .collect();
    Ok(Outcome {
        console: table(&header, &summary),
        files: vec![(sc.out_dir.join("sweep.csv"), to_csv(&rows))],
        failure: None,
    })
}

fn output_level(trace: &SimTrace, n: usize) -> OutputLevel {
    // The conducting rail decides the level, which also covers freewheeling
    // through off devices during dead time.
    let i = &trace.device_currents[n];
    if i[Switch::S1.index()] != 0.0 {
        OutputLevel::Positive
    } else if i[Switch::S4.index()] != 0.0 {
        OutputLevel::Negative
    } else if trace.load_current[n] == 0.0 {
        trace.gates[n].level()
    } else {
        OutputLevel::Zero
    }
}

fn waveform_rows(trace: &SimTrace) -> Vec<WaveformRow> {
    (0..trace.steps())
        .map(|n| {
            let i = trace.device_currents[n];
            WaveformRow {
                theta_rad: trace.theta[n],
                i_load_a: trace.load_current[n],
                i_s1_a: i[0],
                i_s2_a: i[1],
                i_s3_a: i[2],
                i_s4_a: i[3],
                i_s5_a: i[4],
                i_s6_a: i[5],
                level: output_level(trace, n).symbol().to_string(),
            }
        })
        .collect()
}

pub fn simulate_cmd(sc: &Scenario) -> Result<Outcome, CliError> {
    let op = sc.operating_point;
    let runs = sc
        .strategies
        .par_iter()
        .map(|&s| {
            let trace = simulate(sc, s, op)?;
            let report = simulated_losses(&trace, &sc.model);
            let waveform = sc.sim.waveform.then(|| to_csv(&waveform_rows(&trace)));
            Ok((report, waveform))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let reports: Vec<LossReport> = runs.iter().map(|r| r.0.clone()).collect();
    let mut files = vec![(sc.out_dir.join("simulated.csv"), report_csv(&reports))];
    for (report, waveform) in runs {
        if let Some(bytes) = waveform {
            let name = format!("waveform_{}.csv", file_stem(report.strategy));
            files.push((sc.out_dir.join(name), bytes));
        }
    }
    Ok(Outcome {
        console: reports.iter().map(report_table).collect::<Vec<_>>().join("\n"),
        files,
        failure: None,
    })
}

/// Which energy curve a fit is for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveEdge {
    On,
    Off,
}

impl CurveEdge {
    fn key(self) -> &'static str {
        match self {
            CurveEdge::On => "e_on",
            CurveEdge::Off => "e_off",
        }
    }
}

pub fn fit_energy(sc: &Scenario, samples_path: &Path, edge: CurveEdge) -> Result<Outcome, CliError> {
    let samples = read_energy_samples(samples_path)?;
    let fit = fit_power_law(&samples).map_err(|e| CliError::Fit(format!("{}: {e}", samples_path.display())))?;
    let (a, b) = (fit.curve.coeff_a(), fit.curve.exponent_b());
    let float = |x: f64| toml::Value::Float(x).to_string();
    let source = samples_path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let key = edge.key();
    let fragment = format!(
        "# Power-law fit E = a * I^b of {source} ({} samples)\nswitching.{key}.a = {}\nswitching.{key}.b = {}\n",
        fit.used,
        float(a),
        float(b)
    );

    let rows: Vec<Vec<String>> = fit
        .residuals
        .iter()
        .map(|&(i, r)| vec![sig(i, 4), format!("{}%", sig(100.0 * r, 4))])
        .collect();
    let console = format!(
        "{key}: a = {a:e} J/A^b, b = {b}\nsamples used: {}\nrms log residual: {}\nmax relative residual: {}%\n\n{}",
        fit.used,
        sig(fit.rms_log_residual, 4),
        sig(100.0 * fit.max_relative_residual, 4),
        table(&["current (A)", "residual"], &rows)
    );
    Ok(Outcome {
        console,
        files: vec![(sc.out_dir.join(format!("energy-{}.conf", key.replace('_', "-"))), fragment.into_bytes())],
        failure: None,
    })
}

fn pattern_rows(sc: &Scenario, strategy: Strategy) -> Result<Vec<PatternRow>, CliError> {
    let op = sc.operating_point;
    let n = sc.pattern_steps;
    let bad = |e: anpc_core::modulation::ModulationError| CliError::Usage(format!("{strategy}: {e}"));
    (0..n)
        .map(|k| {
            let theta = TAU * k as f64 / n as f64;
            let v_ref = reference_value(theta, op.m, sc.reference).map_err(bad)?;
            let c = carrier_values(theta, op.frequency_ratio()).map_err(bad)?;
            let g = gate_vector(strategy, v_ref, c.v_tri1, c.v_tri2).states().map(u8::from);
            Ok(PatternRow {
                theta_rad: theta,
                v_ref,
                v_tri1: c.v_tri1,
                v_tri2: c.v_tri2,
                s1: g[0],
                s2: g[1],
                s3: g[2],
                s4: g[3],
                s5: g[4],
                s6: g[5],
            })
        })
        .collect()
}

pub fn patterns(sc: &Scenario, strategy: Option<&str>) -> Result<Outcome, CliError> {
    let strategies = match strategy {
        Some(name) => vec![name.parse::<Strategy>().map_err(CliError::Usage)?],
        None => sc.strategies.clone(),
    };
    let mut files = Vec::new();
    let mut lines = Vec::new();
    for s in strategies {
        let rows = pattern_rows(sc, s)?;
        let name = format!("patterns_{}.csv", file_stem(s));
        lines.push(format!("{s}: {} rows -> {name}", rows.len()));
        files.push((sc.out_dir.join(name), to_csv(&rows)));
    }
    Ok(Outcome {
        console: lines.join("\n") + "\n",
        files,
        failure: None,
    })
}
