//! End-to-end checks of the binary: the design → analyze → perms → simulate
//! pipeline over real files, plus the failure modes a user is most likely
//! to hit.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_polar-ae"))
}

fn tmp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("polar-ae-cli-{}-{name}", std::process::id()))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn assert_success(out: &Output) {
    assert!(
        out.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn design_analyze_perms_simulate_pipeline() {
    let profile = tmp("profile.txt");
    let reps = tmp("reps.txt");
    let csv_a = tmp("a.csv");
    let csv_b = tmp("b.csv");
    let profile_s = profile.to_str().unwrap();
    let reps_s = reps.to_str().unwrap();

    let out = run(&[
        "design",
        "--length",
        "32",
        "--dim",
        "23",
        "--structure",
        "3,2",
        "--snr-min",
        "2.0",
        "-o",
        profile_s,
    ]);
    assert_success(&out);
    let text = fs::read_to_string(&profile).unwrap();
    assert!(text.starts_with("# polar-ae profile v1"));
    assert!(text.contains("K = 23"));
    assert!(text.contains("structure = 3,2"));

    let out = run(&["analyze", profile_s]);
    assert_success(&out);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("(3,2)"), "structure missing:\n{stdout}");
    assert!(stdout.contains("2064384"), "|BLTA| missing:\n{stdout}");
    assert!(stdout.contains("|EC|        21"), "|EC| missing:\n{stdout}");
    assert!(stdout.contains("|A_U|       16"), "|A_U| missing:\n{stdout}");
    assert!(stdout.contains("|A_P|       12"), "|A_P| missing:\n{stdout}");

    let out = run(&[
        "perms", profile_s, "-m", "4", "--d-u", "1", "--d-p", "1", "--seed", "9", "-o", reps_s,
    ]);
    assert_success(&out);
    let text = fs::read_to_string(&reps).unwrap();
    assert!(text.starts_with("# polar-ae representatives v1"));
    assert_eq!(text.lines().filter(|l| l.contains('|')).count(), 4);
    // Branch 0 is always the identity.
    assert!(text.lines().nth(2).unwrap().starts_with("0 1 2 3 4 |"));

    let simulate = |path: &str| {
        run(&[
            "simulate",
            profile_s,
            "--decoder",
            "ae",
            "--reps",
            reps_s,
            "--ebn0",
            "2.0,3.0",
            "--min-errors",
            "10",
            "--max-frames",
            "2048",
            "--seed",
            "3",
            "-o",
            path,
        ])
    };
    assert_success(&simulate(csv_a.to_str().unwrap()));
    assert_success(&simulate(csv_b.to_str().unwrap()));
    let bytes_a = fs::read(&csv_a).unwrap();
    assert_eq!(bytes_a, fs::read(&csv_b).unwrap(), "same seed, same CSV");
    let text = String::from_utf8(bytes_a).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "ebn0_db,frames,errors,bler,ml_bound_bler,seed"
    );
    assert_eq!(text.lines().count(), 3, "header plus one row per point");

    for path in [profile, reps, csv_a, csv_b] {
        let _ = fs::remove_file(path);
    }
}

#[test]
fn design_reports_infeasible_requests() {
    let out = run(&[
        "design",
        "--length",
        "16",
        "--dim",
        "8",
        "--structure",
        "4",
        "--snr-min",
        "0.0",
    ]);
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(
        stderr.contains("no admissible code"),
        "unhelpful failure:\n{stderr}"
    );
}

#[test]
fn simulate_validates_decoder_configuration() {
    let profile = tmp("validate-profile.txt");
    let profile_s = profile.to_str().unwrap();
    assert_success(&run(&[
        "design",
        "--length",
        "16",
        "--dim",
        "11",
        "--structure",
        "4",
        "--snr-min",
        "0.0",
        "-o",
        profile_s,
    ]));

    let out = run(&["simulate", profile_s, "--decoder", "ae", "--ebn0", "2.0"]);
    assert!(!out.status.success(), "ae without --reps must fail");

    let out = run(&["simulate", profile_s, "--decoder", "turbo", "--ebn0", "2.0"]);
    assert!(!out.status.success(), "unknown decoder must fail");

    // Representatives drawn from a group larger than the code's.
    let wide_profile = tmp("wide-profile.txt");
    let wide_reps = tmp("wide-reps.txt");
    let wide_profile_s = wide_profile.to_str().unwrap();
    let wide_reps_s = wide_reps.to_str().unwrap();
    // (32,23) admits (3,2) but not (5): draw representatives of (5) from a
    // Reed-Muller profile and aim them at the smaller code.
    assert_success(&run(&[
        "design",
        "--length",
        "32",
        "--dim",
        "16",
        "--structure",
        "5",
        "--snr-min",
        "0.0",
        "-o",
        wide_profile_s,
    ]));
    assert_success(&run(&[
        "perms",
        wide_profile_s,
        "-m",
        "2",
        "--seed",
        "1",
        "-o",
        wide_reps_s,
    ]));
    assert_success(&run(&[
        "design",
        "--length",
        "32",
        "--dim",
        "23",
        "--structure",
        "3,2",
        "--snr-min",
        "2.0",
        "-o",
        profile_s,
    ]));
    let out = run(&[
        "simulate",
        profile_s,
        "--decoder",
        "ae",
        "--reps",
        wide_reps_s,
        "--ebn0",
        "2.0",
    ]);
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(
        stderr.contains("not contained"),
        "unhelpful mismatch report:\n{stderr}"
    );

    for path in [profile, wide_profile, wide_reps] {
        let _ = fs::remove_file(path);
    }
}
