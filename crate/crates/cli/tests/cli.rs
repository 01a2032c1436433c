use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use anpc_cli::output::{
    read_csv, read_report, CompareRow, PatternRow, SweepRow, WaveformRow, REPORT_HEADER,
};

const COMPARE_HEADER: &str = "strategy,analytic_total_w,simulated_total_w,rel_error,threshold,pass";
const SWEEP_HEADER: &str = "m,cos_phi,i_peak,strategy,device,rms_fwd_a,rms_rev_a,p_cond_w,p_sw_w,p_total_w,sim_rms_fwd_a,sim_rms_rev_a";
const WAVEFORM_HEADER: &str = "theta_rad,i_load_a,i_s1_a,i_s2_a,i_s3_a,i_s4_a,i_s5_a,i_s6_a,level";
const PATTERN_HEADER: &str = "theta_rad,v_ref,v_tri1,v_tri2,s1,s2,s3,s4,s5,s6";

fn anpc(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anpc"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn shipped_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("config/study-case.conf")
}

#[test]
fn analyze_default_ranks_fpcm_lowest() {
    let dir = tempfile::tempdir().unwrap();
    let o = anpc(dir.path(), &["analyze"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = read_report(&dir.path().join("analyze.csv")).unwrap();
    assert_eq!(rows.len(), 24);
    let total = |s: &str| -> f64 { rows.iter().filter(|r| r.strategy == s).map(|r| r.p_total_w).sum() };
    for s in ["DNPC", "SSCM", "OSCM"] {
        assert!(total("FPCM") < total(s), "{s}");
    }
    let console = String::from_utf8_lossy(&o.stdout);
    assert!(console.contains("P_total (W)"));
}

#[test]
fn analyze_single_dnpc_has_idle_clamps() {
    let dir = tempfile::tempdir().unwrap();
    let o = anpc(dir.path(), &["analyze", "--set", "modulation.strategies=[\"DNPC\"]"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = read_report(&dir.path().join("analyze.csv")).unwrap();
    assert_eq!(rows.len(), 6);
    for r in rows.iter().filter(|r| r.device == "S5" || r.device == "S6") {
        assert_eq!(r.p_sw_w, 0.0);
    }
}

#[test]
fn validation_errors_exit_1_and_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let o = anpc(dir.path(), &["analyze", "--set", "modulation.strategies=[]"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("modulation.strategies"), "{}", stderr(&o));

    let o = anpc(dir.path(), &["analyze", "--set", "operating.modulation=0.5"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("operating.modulation"), "{}", stderr(&o));

    let o = anpc(dir.path(), &["sweep", "--set", "sweep.m=[0.5, 1.2]"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("sweep.m"), "{}", stderr(&o));

    let o = anpc(dir.path(), &["patterns", "--strategy", "XYZ"]);
    assert_eq!(code(&o), 1);

    let o = anpc(dir.path(), &["no-such-command"]);
    assert_eq!(code(&o), 1);
    assert!(!dir.path().join("analyze.csv").exists());
}

#[test]
fn compare_passes_on_the_shipped_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = shipped_config();
    let o = anpc(dir.path(), &["compare", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows: Vec<CompareRow> = read_csv(&dir.path().join("compare.csv"), COMPARE_HEADER).unwrap();
    assert_eq!(rows.len(), 4);
    for r in &rows {
        assert!(r.pass && r.rel_error <= 0.03, "{r:?}");
        assert_eq!(r.rel_error, (r.analytic_total_w - r.simulated_total_w).abs() / r.simulated_total_w);
    }
    assert_eq!(read_report(&dir.path().join("analytic.csv")).unwrap().len(), 24);
    assert_eq!(read_report(&dir.path().join("simulated.csv")).unwrap().len(), 24);
}

#[test]
fn impossible_threshold_exits_2_after_writing() {
    let dir = tempfile::tempdir().unwrap();
    let o = anpc(
        dir.path(),
        &["compare", "--threshold", "0.000001", "--set", "modulation.strategies=[\"FPCM\"]"],
    );
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    let rows: Vec<CompareRow> = read_csv(&dir.path().join("compare.csv"), COMPARE_HEADER).unwrap();
    assert_eq!(rows.len(), 1);
    assert!(!rows[0].pass);
}

#[test]
fn compare_is_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = shipped_config();
    let args = ["compare", "--config", cfg.to_str().unwrap(), "--set", "modulation.strategies=[\"SSCM\", \"FPCM\"]"];
    assert_eq!(code(&anpc(a.path(), &args)), 0);
    assert_eq!(code(&anpc(b.path(), &args)), 0);
    for f in ["compare.csv", "analytic.csv", "simulated.csv"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn sweep_rows_match_the_grid_and_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let o = anpc(dir.path(), &["sweep"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows: Vec<SweepRow> = read_csv(&dir.path().join("sweep.csv"), SWEEP_HEADER).unwrap();
    assert_eq!(rows.len(), 7 * 4 * 6);
    assert!(rows.iter().all(|r| r.sim_rms_fwd_a.is_none()));

    // A one-point grid at the operating point reproduces `analyze`.
    let o = anpc(dir.path(), &["sweep", "--set", "sweep.m=[0.7]"]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&anpc(dir.path(), &["analyze"])), 0);
    let sweep: Vec<SweepRow> = read_csv(&dir.path().join("sweep.csv"), SWEEP_HEADER).unwrap();
    let analyze = read_report(&dir.path().join("analyze.csv")).unwrap();
    assert_eq!(sweep.len(), analyze.len());
    for (s, a) in sweep.iter().zip(&analyze) {
        assert_eq!((&s.strategy, &s.device), (&a.strategy, &a.device));
        assert_eq!(s.p_total_w, a.p_total_w);
        assert_eq!(s.rms_fwd_a, a.rms_fwd_a);
    }
}

#[test]
fn sweep_can_add_simulated_columns() {
    let dir = tempfile::tempdir().unwrap();
    let o = anpc(
        dir.path(),
        &[
            "sweep",
            "--set",
            "sweep.m=[1.0]",
            "--set",
            "sweep.simulate=true",
            "--set",
            "modulation.strategies=[\"DNPC\"]",
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows: Vec<SweepRow> = read_csv(&dir.path().join("sweep.csv"), SWEEP_HEADER).unwrap();
    assert_eq!(rows.len(), 6);
    for r in &rows {
        let sim = r.sim_rms_fwd_a.unwrap();
        assert!((sim - r.rms_fwd_a).abs() <= 0.02 * r.rms_fwd_a.max(1e-9), "{r:?}");
    }
}

#[test]
fn simulate_writes_report_and_waveform() {
    let dir = tempfile::tempdir().unwrap();
    let o = anpc(
        dir.path(),
        &[
            "simulate",
            "--set",
            "simulator.waveform=true",
            "--set",
            "operating.f_sw=5000",
            "--set",
            "simulator.steps_per_carrier=64",
            "--set",
            "modulation.strategies=[\"OSCM\"]",
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(read_report(&dir.path().join("simulated.csv")).unwrap().len(), 6);
    let wave: Vec<WaveformRow> = read_csv(&dir.path().join("waveform_oscm.csv"), WAVEFORM_HEADER).unwrap();
    assert_eq!(wave.len(), 100 * 64);
    for w in &wave {
        assert!(["P", "0", "N"].contains(&w.level.as_str()));
        assert!((w.i_s2_a - w.i_s3_a - w.i_load_a).abs() < 1e-12);
    }
    for level in ["P", "0", "N"] {
        assert!(wave.iter().any(|w| w.level == level), "{level}");
    }
}

#[test]
fn patterns_follow_the_strategy() {
    let dir = tempfile::tempdir().unwrap();
    let o = anpc(dir.path(), &["patterns", "--set", "patterns.steps=4000"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let dnpc: Vec<PatternRow> = read_csv(&dir.path().join("patterns_dnpc.csv"), PATTERN_HEADER).unwrap();
    assert_eq!(dnpc.len(), 4000);
    assert!(dnpc.iter().all(|r| r.s5 == 0 && r.s6 == 0));

    let oscm: Vec<PatternRow> = read_csv(&dir.path().join("patterns_oscm.csv"), PATTERN_HEADER).unwrap();
    let on = oscm.iter().filter(|r| r.s1 == 1).count() as f64 / oscm.len() as f64;
    assert!((on - 0.5).abs() < 0.01, "{on}");
    let edges = oscm.windows(2).filter(|w| w[0].s1 != w[1].s1).count();
    assert!(edges <= 2, "{edges}");
}

#[test]
fn fitted_curve_layers_onto_a_config() {
    let dir = tempfile::tempdir().unwrap();
    let samples = dir.path().join("on.csv");
    let mut text = String::from("current_a,energy_j\n");
    for i in 1..=12 {
        let i = i as f64;
        text += &format!("{i},{}\n", 1.0527e-6 * i.powf(1.6291));
    }
    fs::write(&samples, text).unwrap();
    let o = anpc(dir.path(), &["fit-energy", samples.to_str().unwrap(), "--edge", "on"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let fragment = dir.path().join("energy-e-on.conf");
    let cfg = anpc_cli::config::load(std::slice::from_ref(&fragment), &[]).unwrap();
    assert!((cfg.switching.e_on.a / 1.0527e-6 - 1.0).abs() < 1e-6);
    assert!((cfg.switching.e_on.b / 1.6291 - 1.0).abs() < 1e-6);

    // The same samples can also be named directly in a config.
    let conf = dir.path().join("from-samples.conf");
    fs::write(&conf, "switching.e_on.samples = \"on.csv\"\n").unwrap();
    let s = anpc_cli::config::load(&[conf], &[]).unwrap().resolve().unwrap();
    assert!((s.model.e_on.exponent_b() / 1.6291 - 1.0).abs() < 1e-6);
}

#[test]
fn malformed_samples_report_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let samples = dir.path().join("bad.csv");
    fs::write(&samples, "current_a,energy_j\n1,1e-6\n2,abc\n").unwrap();
    let o = anpc(dir.path(), &["fit-energy", samples.to_str().unwrap(), "--edge", "off"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn report_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&anpc(dir.path(), &["analyze"])), 0);
    let path = dir.path().join("analyze.csv");
    let rows = read_report(&path).unwrap();
    let again = anpc_cli::output::to_csv(&rows);
    assert_eq!(again, fs::read(&path).unwrap());
    assert!(String::from_utf8(again).unwrap().starts_with(REPORT_HEADER));
}

#[test]
fn keys_lists_every_section() {
    let dir = tempfile::tempdir().unwrap();
    let o = anpc(dir.path(), &["keys"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    for key in ["device.rds_on", "operating.cos_phi", "simulator.dead_time", "sweep.m", "output.dir"] {
        assert!(text.lines().any(|l| l.starts_with(&format!("{key} = "))), "{key}");
    }
}
