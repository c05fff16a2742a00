use std::process::{Command, Output};

const SMALL: &[&str] = &["--N", "3", "--M0", "2", "--cells", "8", "--dg-degree", "2", "--final-time", "0.02"];

fn sweep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regmn-sweep"))
        .args(args)
        .output()
        .expect("failed to launch regmn-sweep")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn csv_table_on_stdout() {
    let mut args = SMALL.to_vec();
    args.extend(["--gamma-list", "1e-3,1e-4,1e-5"]);
    let out = sweep(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "gamma,H_gamma,nu_H,L2,nu_L2,Linf,nu_Linf");
    assert_eq!(lines.len(), 4);
    let first: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(first[0], "1e-03");
    assert!(first[2].is_empty() && first[4].is_empty() && first[6].is_empty());
    assert_eq!(lines[2].split(',').count(), 7);
    assert!(lines[2].split(',').all(|f| !f.is_empty()));
}

#[test]
fn output_directory_and_markdown() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let mut args = SMALL.to_vec();
    let out_arg = out_dir.display().to_string();
    args.extend(["--gamma-list", "1e-2,1e-2.5", "--format", "markdown", "--workers", "2", "--out", &out_arg]);
    let out = sweep(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).starts_with("| γ |"));
    assert!(out_dir.join("table.md").exists());
    assert!(out_dir.join("checkpoints/reference.csv").exists());
    let json: String = std::fs::read_to_string(out_dir.join("results.json")).unwrap();
    assert!(json.contains("\"records\""));
    assert!(json.contains("0.0031622776601683"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.cfg");
    std::fs::write(
        &cfg,
        "# desk run\nN = 3\nM0 = 2\ncells = 8\ndg-degree = 2\nfinal_time = 0.02\ngamma-list = 1e-3,1e-4\nformat = markdown\n",
    )
    .unwrap();
    let cfg_arg = cfg.display().to_string();
    let out = sweep(&["--config", &cfg_arg, "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out).lines().count(), 3);
    assert!(stdout(&out).starts_with("gamma,"));
}

#[test]
fn invalid_input_exits_with_one() {
    let mut args = SMALL.to_vec();
    args.extend(["--gamma-list", "1e-4,1e-3"]);
    assert_eq!(sweep(&args).status.code(), Some(1));
    let mut args = SMALL.to_vec();
    args.extend(["--cfl", "1.5"]);
    assert_eq!(sweep(&args).status.code(), Some(1));
    let mut args = SMALL.to_vec();
    args.extend(["--entropy", "fermi"]);
    assert_eq!(sweep(&args).status.code(), Some(1));
    assert_eq!(sweep(&["--config", "/nonexistent/file.cfg"]).status.code(), Some(1));
}

#[test]
fn failed_reference_exits_with_one() {
    // No dual solve can meet these tolerances.
    let mut args = SMALL.to_vec();
    args.extend(["--gamma-list", "1e-3", "--tau", "1e-30", "--tau-desired", "1e-31"]);
    let out = sweep(&args);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("reference run"));
}
