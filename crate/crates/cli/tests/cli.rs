//! End-to-end CLI behavior: exit codes, artifact layout, golden CSV headers.

use std::path::PathBuf;
use std::process::Command;

use ramsey_zne_cli::commands::{cmd_preset, GlobalOpts};
use ramsey_zne_cli::csv_io::CsvTable;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_ramsey-zne")
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rzne-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

const MINIMAL_CONFIG: &str = r#"{
    "schema": "zne-experiment-v1",
    "n_trials": 1,
    "exact_p": true,
    "noise": {"kind": "phase_damping", "rate": 0.0},
    "protocol": {"detection": "variance", "sensing_time": 1.0},
    "experiment": {"kind": "infinite_shot", "b_grid": [0.5, 1.0]}
}"#;

#[test]
fn run_minimal_config_exits_zero_and_writes_csv() {
    let dir = tmp_dir("minimal");
    let config = dir.join("cfg.json");
    std::fs::write(&config, MINIMAL_CONFIG).unwrap();
    let out = dir.join("out");
    let output = Command::new(bin())
        .args(["run", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("artifact:"), "stdout: {stdout}");
    let table = CsvTable::read(&out.join("infinite_shot.csv")).unwrap();
    for row in &table.rows {
        assert!(row[1].unwrap() < 1e-9, "noiseless exact run must have zero error");
    }
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn invalid_rate_exits_two_and_names_the_field() {
    let dir = tmp_dir("badrate");
    let config = dir.join("cfg.json");
    std::fs::write(&config, MINIMAL_CONFIG.replace("\"rate\": 0.0", "\"rate\": 1.5")).unwrap();
    let output = Command::new(bin()).args(["run", config.to_str().unwrap()]).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("noise.rate"), "stderr: {stderr}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn malformed_json_exits_two_with_line_info() {
    let dir = tmp_dir("badjson");
    let config = dir.join("cfg.json");
    std::fs::write(&config, "{\n  \"schema\": oops\n}").unwrap();
    let output = Command::new(bin()).args(["run", config.to_str().unwrap()]).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("line 2"), "stderr: {stderr}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn unknown_preset_exits_two_and_lists_names() {
    let output = Command::new(bin()).args(["preset", "fig99"]).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("fig4a-relerr"), "stderr: {stderr}");
}

#[test]
fn plot_renders_svg_and_respects_logy() {
    let dir = tmp_dir("plot");
    let csv = dir.join("series.csv");
    std::fs::write(&csv, "# schema: demo-v1\nx,a,b\n0,1,10\n1,2,100\n2,4,1000\n").unwrap();
    let output = Command::new(bin()).args(["plot", csv.to_str().unwrap()]).output().unwrap();
    assert!(output.status.success());
    let svg = std::fs::read_to_string(dir.join("series.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<polyline").count(), 2);

    let logy_out = dir.join("log.svg");
    let output = Command::new(bin())
        .args([
            "plot",
            csv.to_str().unwrap(),
            "--logy",
            "--out-file",
            logy_out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    assert!(logy_out.exists());

    // empty CSV: usage error, nothing written
    let empty = dir.join("empty.csv");
    std::fs::write(&empty, "x,y\n").unwrap();
    let output = Command::new(bin()).args(["plot", empty.to_str().unwrap()]).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(!empty.with_extension("svg").exists());
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn workers_flag_does_not_change_results() {
    let dir = tmp_dir("workers");
    let mut csvs = Vec::new();
    for (tag, workers) in [("w1", "1"), ("w4", "4")] {
        let out = dir.join(tag);
        let output = Command::new(bin())
            .args([
                "preset",
                "fig5-closedform",
                "--seed",
                "3",
                "--workers",
                workers,
                "--out",
                out.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(output.status.success());
        csvs.push(std::fs::read(out.join("closed_form.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
    let _ = std::fs::remove_dir_all(&dir);
}

// Golden headers: the CSV schema is versioned and pinned here; changing a
// header must be a deliberate schema bump.
#[test]
fn preset_csv_headers_are_stable() {
    let goldens: [(&str, &[&str], &str, &str); 8] = [
        (
            "fig2-success-dip",
            &["experiment.t_grid=[1.0]", "experiment.rates=[0.05]", "n_trials=2", "n_shots=50"],
            "success_vs_time.csv",
            "t,nu_0.05",
        ),
        (
            "fig3-traces",
            &["experiment.t_values=[1.0]", "n_trials=2", "n_shots=50"],
            "extrapolation_trace.csv",
            "eta,mean_b_t0",
        ),
        (
            "fig4a-relerr",
            &["experiment.b_grid=[0.5,1.0]", "n_trials=2", "n_shots=50"],
            "relative_error.csv",
            "b,zne_linear,zne_richardson,zne_exponential,ramsey,ramsey_equal_shots,\
             ramsey_equal_time,ramsey_equal_both",
        ),
        (
            "fig4b-crossover",
            &["experiment.b_grid=[0.5,1.0]", "experiment.shot_counts=[50]", "n_trials=2"],
            "crossover.csv",
            "n_shots,crossover_b",
        ),
        (
            "fig5-closedform",
            &["experiment.rate_grid=[0.0,0.1]"],
            "closed_form.csv",
            "rate,p1_m0,p1_m1,p1_m2",
        ),
        (
            "fig6-informed-pd",
            &["experiment.b_grid=[0.5,1.0]", "n_trials=2", "n_shots=50"],
            "informed.csv",
            "b,zne_informed,ramsey_fringe",
        ),
        (
            "ad-relerr",
            &["experiment.b_grid=[0.5,1.0]", "n_trials=2", "n_shots=50"],
            "relative_error.csv",
            "b,zne_linear,zne_richardson,zne_exponential,ramsey,ramsey_equal_shots,\
             ramsey_equal_time,ramsey_equal_both",
        ),
        (
            "alt-check",
            &["experiment.k_max=1"],
            "alt_check.csv",
            "k,sim_pd,alt_pd,sim_ad,alt_ad,alt_ad_first_order",
        ),
    ];
    let dir = tmp_dir("golden");
    for (i, (preset, overrides, file_name, golden_header)) in goldens.iter().enumerate() {
        let sets: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
        let opts = GlobalOpts {
            out_dir: Some(dir.join(format!("g{i}"))),
            seed: Some(1),
            ..Default::default()
        };
        let manifest = cmd_preset(preset, &sets, &opts)
            .unwrap_or_else(|e| panic!("{preset}: {e}"));
        let csv_path = manifest.out_dir.join(file_name);
        let text = std::fs::read_to_string(&csv_path)
            .unwrap_or_else(|e| panic!("{preset}: {e}"));
        let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
        let expected = golden_header.replace(char::is_whitespace, "");
        assert_eq!(header, expected, "{preset} header drifted");
        let schema_line = text.lines().next().unwrap();
        let kind = file_name.trim_end_matches(".csv");
        assert_eq!(schema_line, format!("# schema: {kind}-v1"), "{preset} schema tag drifted");
    }
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn infinite_shot_preset_style_config_runs_through_binary() {
    // exercise the ghz preset at tiny scale through the binary
    let dir = tmp_dir("ghz");
    let output = Command::new(bin())
        .args([
            "preset",
            "ghz-pd",
            "--seed",
            "5",
            "--set",
            "n_trials=2",
            "--set",
            "n_shots=50",
            "--set",
            "experiment.b_grid=[0.1,0.2]",
            "--out",
            dir.join("out").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));
    let table = CsvTable::read(&dir.join("out").join("relative_error.csv")).unwrap();
    assert_eq!(table.rows.len(), 2);
    // metadata captures the multi-qubit protocol
    assert!(table.metadata.contains(&("n_qubits".into(), "4".into())));
    let _ = std::fs::remove_dir_all(&dir);
}
