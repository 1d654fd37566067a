//! Binary-level checks: flags, exit codes, emitted files, and the round-trip
//! of every CSV through this crate's own readers.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

use techrank_cli::report::{read_ranking_csv, read_surface_csv, read_trajectory_csv};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_techrank"))
}

fn sample_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/sample/config.toml")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).to_string()
}

const SMALL_GRID: &str = "-0.4,0.4,-0.4,0.4,0.2";

#[test]
fn ingest_reports_counts() {
    let out = run(&["ingest", "--config", sample_config().to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("22 companies"), "{text}");
    assert!(text.contains("15 technologies"), "{text}");
}

#[test]
fn rank_emits_consistent_readable_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "rank",
        "--config",
        sample_config().to_str().unwrap(),
        "--grid",
        SMALL_GRID,
        "--trajectory",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let companies = read_ranking_csv(&dir.path().join("companies.csv")).unwrap();
    assert_eq!(companies.len(), 22);
    // Ranks: 1 is present, ties share the min rank, and weight order is
    // consistent with rank order.
    assert_eq!(companies[0].rank, 1);
    for pair in companies.windows(2) {
        assert!(pair[0].weight >= pair[1].weight);
        assert!(pair[0].rank <= pair[1].rank);
        if pair[0].weight > pair[1].weight {
            assert!(pair[0].rank < pair[1].rank);
        } else {
            assert_eq!(pair[0].rank, pair[1].rank);
        }
    }
    let mut sorted_ranks: Vec<usize> = companies.iter().map(|r| r.rank).collect();
    sorted_ranks.sort_unstable();
    assert_eq!(sorted_ranks[0], 1);
    assert!(sorted_ranks.iter().all(|&r| r <= companies.len()));

    let technologies = read_ranking_csv(&dir.path().join("technologies.csv")).unwrap();
    assert_eq!(technologies.len(), 15);

    // 5x5 grid, two surfaces.
    let surface = read_surface_csv(&dir.path().join("surface.csv")).unwrap();
    assert_eq!(surface.len(), 2 * 25);
    assert!(surface
        .iter()
        .all(|(target, ..)| target == "companies" || target == "technologies"));

    let trajectory = read_trajectory_csv(&dir.path().join("trajectory.csv")).unwrap();
    assert!(!trajectory.is_empty());
    // Iteration zero covers every entity of both layers.
    let zero_rows = trajectory.iter().filter(|(_, it, _, _)| *it == 0).count();
    assert_eq!(zero_rows, 22 + 15);

    assert!(dir.path().join("run.json").exists());
}

#[test]
fn rank_without_trajectory_flag_emits_no_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "rank",
        "--config",
        sample_config().to_str().unwrap(),
        "--grid",
        SMALL_GRID,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(!dir.path().join("trajectory.csv").exists());
}

#[test]
fn compare_self_is_exactly_one_and_reversal_minus_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "rank",
        "--config",
        sample_config().to_str().unwrap(),
        "--grid",
        SMALL_GRID,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let companies = read_ranking_csv(&dir.path().join("companies.csv")).unwrap();
    let n = companies.len();
    let self_csv = dir.path().join("external_self.csv");
    let reversed_csv = dir.path().join("external_reversed.csv");
    let mut self_text = String::from("id,rank\n");
    let mut reversed_text = String::from("id,rank\n");
    for row in &companies {
        self_text.push_str(&format!("{},{}\n", row.name, row.rank));
        reversed_text.push_str(&format!("{},{}\n", row.name, n + 1 - row.rank));
    }
    std::fs::write(&self_csv, self_text).unwrap();
    std::fs::write(&reversed_csv, reversed_text).unwrap();

    let ours = dir.path().join("companies.csv");
    let same = run(&[
        "compare",
        "--ours",
        ours.to_str().unwrap(),
        "--external",
        self_csv.to_str().unwrap(),
    ]);
    assert!(same.status.success());
    assert_eq!(stdout(&same).trim(), "1");

    let reversed = run(&[
        "compare",
        "--ours",
        ours.to_str().unwrap(),
        "--external",
        reversed_csv.to_str().unwrap(),
    ]);
    assert!(reversed.status.success());
    assert_eq!(stdout(&reversed).trim(), "-1");
}

#[test]
fn compare_rejects_insufficient_overlap() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "rank",
        "--config",
        sample_config().to_str().unwrap(),
        "--grid",
        SMALL_GRID,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let external = dir.path().join("external_disjoint.csv");
    std::fs::write(&external, "id,rank\nnobody,1\nno one,2\n").unwrap();
    let cmp = run(&[
        "compare",
        "--ours",
        dir.path().join("companies.csv").to_str().unwrap(),
        "--external",
        external.to_str().unwrap(),
    ]);
    assert_eq!(cmp.status.code(), Some(2));
}

#[test]
fn bench_rows_scale_and_finish_quickly() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "bench",
        "--config",
        sample_config().to_str().unwrap(),
        "--sizes",
        "5,10,15",
        "--grid",
        SMALL_GRID,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(
        start.elapsed().as_secs() < 60,
        "bench smoke budget exceeded"
    );

    let text = std::fs::read_to_string(dir.path().join("bench.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n_companies,n_technologies,calib_seconds,walk_seconds,iterations_c,iterations_t"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    let n_c: Vec<usize> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    let n_t: Vec<usize> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(n_c, vec![5, 10, 15]);
    // Nested subsets under one seed: induced technology counts never shrink.
    assert!(n_t.windows(2).all(|w| w[0] <= w[1]), "{n_t:?}");
}

#[test]
fn exit_code_one_for_config_errors() {
    let missing = run(&["rank", "--config", "/nonexistent/config.toml"]);
    assert_eq!(missing.status.code(), Some(1));

    // Config referencing a missing data file.
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    std::fs::write(
        &config,
        r#"
[data]
organizations = "missing.csv"
funding_rounds = "missing.csv"
[filter]
keywords = "missing.txt"
[profile.companies]
features = [{ name = "previous_investments", weight = 1.0 }]
[profile.technologies]
features = [{ name = "previous_investments", weight = 1.0 }]
"#,
    )
    .unwrap();
    let bad_paths = run(&["rank", "--config", config.to_str().unwrap()]);
    assert_eq!(bad_paths.status.code(), Some(1));

    let bad_sizes = run(&[
        "bench",
        "--config",
        sample_config().to_str().unwrap(),
        "--sizes",
        "ten",
    ]);
    assert_eq!(bad_sizes.status.code(), Some(1));

    // Profile weights violating the unit budget.
    let config2 = dir.path().join("bad_profile.toml");
    let sample_dir = sample_config();
    let sample_dir = sample_dir.parent().unwrap();
    std::fs::write(
        &config2,
        format!(
            r#"
[data]
organizations = "{0}/organizations.csv"
funding_rounds = "{0}/funding_rounds.csv"
[filter]
keywords = "{1}/config/cybersecurity_keywords.txt"
[profile.companies]
features = [{{ name = "previous_investments", weight = 0.9 }}]
[profile.technologies]
features = [{{ name = "previous_investments", weight = 1.0 }}]
"#,
            sample_dir.display(),
            sample_dir.parent().unwrap().parent().unwrap().display(),
        ),
    )
    .unwrap();
    let bad_profile = run(&["rank", "--config", config2.to_str().unwrap()]);
    assert_eq!(bad_profile.status.code(), Some(1));
}

#[test]
fn exit_code_two_for_data_errors() {
    let dir = tempfile::tempdir().unwrap();
    // Organizations file with a malformed header.
    let orgs = dir.path().join("orgs.csv");
    std::fs::write(&orgs, "identifier,label\n1,x\n").unwrap();
    let rounds = dir.path().join("rounds.csv");
    std::fs::write(&rounds, "round_id,investor_id,company_id,amount\n").unwrap();
    let keywords = dir.path().join("words.txt");
    std::fs::write(&keywords, "secure\nprivacy\n").unwrap();
    let config = dir.path().join("config.toml");
    std::fs::write(
        &config,
        r#"
[data]
organizations = "orgs.csv"
funding_rounds = "rounds.csv"
[filter]
keywords = "words.txt"
[profile.companies]
features = [{ name = "previous_investments", weight = 1.0 }]
[profile.technologies]
features = [{ name = "previous_investments", weight = 1.0 }]
"#,
    )
    .unwrap();
    let out = run(&["ingest", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // Oversized subset request is a data error too.
    let too_big = run(&[
        "rank",
        "--config",
        sample_config().to_str().unwrap(),
        "--subset",
        "5000",
        "--grid",
        SMALL_GRID,
    ]);
    assert_eq!(too_big.status.code(), Some(2));
}

#[test]
fn exit_code_three_for_strict_non_convergence() {
    // A zero-free grid with a two-iteration cap at an unreachable tolerance:
    // no grid point converges. Zero exponent lines are avoided because the
    // degree initialization is an exact fixed point there.
    let dir = tempfile::tempdir().unwrap();
    let config_path = sample_config();
    let starved = |strict: bool| {
        let mut args = vec![
            "rank",
            "--config",
            config_path.to_str().unwrap(),
            "--grid",
            "0.1,0.3,0.1,0.3,0.1",
            "--max-iter",
            "2",
            "--tolerance",
            "1e-14",
            "--out",
            dir.path().to_str().unwrap(),
        ];
        if strict {
            args.push("--strict");
        }
        run(&args)
    };
    let strict = starved(true);
    assert_eq!(
        strict.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&strict.stderr)
    );
    // Without --strict the same failure is an ordinary data error.
    let lenient = starved(false);
    assert_eq!(lenient.status.code(), Some(2));
}

#[test]
fn seeded_subsets_are_deterministic_across_processes() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let out = run(&[
            "rank",
            "--config",
            sample_config().to_str().unwrap(),
            "--grid",
            SMALL_GRID,
            "--subset",
            "8",
            "--seed",
            "123",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    for file in ["companies.csv", "technologies.csv", "surface.csv"] {
        let a = std::fs::read(dir_a.path().join(file)).unwrap();
        let b = std::fs::read(dir_b.path().join(file)).unwrap();
        assert_eq!(a, b, "{file} differs across processes");
    }
}
