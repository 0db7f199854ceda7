use std::process::{Command, Output};

fn qkd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qkd-mops"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = qkd(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn alpha_three() {
    let out = stdout(&["alpha", "--l", "3"]);
    assert_eq!(out, "l,alpha_closed,alpha_matrix\n3,17,17\n");
}

#[test]
fn p_range_large_n() {
    let r = rows(&stdout(&[
        "p-range", "--n", "100", "--l", "2", "--r", "0.1",
    ]));
    assert_eq!(r[0][..6], ["n", "l", "r", "p_min", "p_max", "nonempty"]);
    let p_min: f64 = r[1][3].parse().unwrap();
    assert!((p_min - 3.33333e-4).abs() < 1e-9);
    assert_eq!(r[1][4], "0.0005");
    assert_eq!(r[1][5], "true");
}

#[test]
fn verify_beta_passes() {
    let r = rows(&stdout(&["verify-beta", "--n", "5", "--l", "3"]));
    assert_eq!(r[1][2], "PASS");
    assert!(r[1][3].parse::<f64>().unwrap() > 0.0);
}

#[test]
fn generated_network_round_trips_through_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("net.txt");
    let path = path.to_str().unwrap();
    stdout(&[
        "gen-lscheme",
        "--n",
        "4",
        "--l",
        "2",
        "--p",
        "0.05",
        "--out",
        path,
    ]);
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.contains("endpoints A B"));

    let r = rows(&stdout(&["min-cut", "--net", path]));
    assert_eq!(r[1][0], "2");
    let r = rows(&stdout(&["count-cuts", "--net", path, "--k", "2"]));
    assert_eq!(r[1], ["2", "10"]);
    let r = rows(&stdout(&["count-min-cuts", "--n", "4", "--l", "2"]));
    assert_eq!(r[1][2], "10");
    let from_file = rows(&stdout(&["exact-prob", "--net", path]));
    let built = rows(&stdout(&[
        "exact-prob",
        "--n",
        "4",
        "--l",
        "2",
        "--p",
        "0.05",
    ]));
    assert_eq!(from_file, built);
}

#[test]
fn monte_carlo_is_seeded() {
    let args = [
        "mc-attack",
        "--n",
        "3",
        "--l",
        "2",
        "--p",
        "0.1",
        "--trials",
        "20000",
        "--seed",
        "4",
    ];
    let a = stdout(&args);
    assert_eq!(a, stdout(&args));
    let r = rows(&a);
    assert_eq!(
        r[0],
        [
            "scheme",
            "n",
            "l",
            "p",
            "trials",
            "estimate",
            "std_error",
            "exact"
        ]
    );
    let est: f64 = r[1][5].parse().unwrap();
    let se: f64 = r[1][6].parse().unwrap();
    let exact: f64 = r[1][7].parse().unwrap();
    assert!((est - exact).abs() <= 4.0 * se);
}

#[test]
fn protocol_commands() {
    let out = qkd(&[
        "simulate",
        "--lengths",
        "2,2",
        "--scheme",
        "hop-by-hop",
        "--seed",
        "3",
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("agree"));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 7);

    let sweep = stdout(&[
        "leakage",
        "--n",
        "2",
        "--l",
        "2",
        "--scheme",
        "mops-broadcast",
    ]);
    assert_eq!(sweep.lines().count(), 17);
    let leaks = sweep.lines().filter(|l| l.ends_with(",true")).count();
    assert_eq!(leaks, 4 + 4 + 1);

    let one = stdout(&[
        "leakage",
        "--lengths",
        "2,2",
        "--scheme",
        "hop-by-hop",
        "--compromised",
        "p1_1,p1_2",
    ]);
    assert_eq!(one, "subset,leaks\np1_1;p1_2,false\n");
}

#[test]
fn analysis_commands() {
    let r = rows(&stdout(&["crossover", "--n", "10", "--p", "0.001"]));
    assert_eq!(r[1][4], "2");
    let r = rows(&stdout(&[
        "eta", "--n", "30", "--l", "2", "--p", "0.01", "--r", "0.6",
    ]));
    assert_eq!(r[1][5], "0.833333");
    let r = rows(&stdout(&["gamma", "--mu", "10", "--l", "10"]));
    let corr: f64 = r[1][3].parse().unwrap();
    assert!((corr - 1.72).abs() < 0.01);
    let r = rows(&stdout(&["single-link", "--n", "10"]));
    assert_eq!(r[1][..3], ["10", "60", "100"]);
    let r = rows(&stdout(&[
        "correlated",
        "--lengths",
        "2,2",
        "--alpha-slope",
        "1",
        "--resources",
        "0.4",
    ]));
    assert_eq!(r[1][2], "0.04");
    let fig = stdout(&["figure-data"]);
    assert_eq!(fig.lines().count(), 1 + 96 * 9);
    let r = rows(&stdout(&[
        "optimize-paths",
        "--lengths",
        "3,3",
        "--p",
        "0.01",
    ]));
    assert_eq!(r.len(), 3);
}

#[test]
fn exit_codes() {
    assert_eq!(
        qkd(&["bound", "--n", "10", "--l", "2", "--p", "0.01", "--r", "0.1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(qkd(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(
        qkd(&["alpha", "--l", "3", "--bogus"]).status.code(),
        Some(2)
    );
    assert_eq!(
        qkd(&["count-cuts", "--n", "16", "--l", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(
        qkd(&["min-cut", "--net", "/nonexistent/net.txt"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        qkd(&["count-min-cuts", "--n", "1000", "--l", "40"])
            .status
            .code(),
        Some(1)
    );
}
