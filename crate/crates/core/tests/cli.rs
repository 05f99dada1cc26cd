use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const CONFIG: &str = r#"
schema_version = 1

[suite]
dim = 10
seed = 7
functions = ["F3"]

[experiment]
repetitions = 2
base_seed = 99
budget_multiplier = 15

[[configuration]]
label = "DE"
approach = "none"

[[configuration]]
label = "DT/C"
approach = "pairwise"
learner = "DT"
warmup = 4
"#;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_surrogate-de"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn setup() -> (tempfile::TempDir, String, String) {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("experiment.toml");
    fs::write(&config, CONFIG).unwrap();
    let out = dir.path().join("store");
    let (c, o) = (config.display().to_string(), out.display().to_string());
    (dir, c, o)
}

fn initial_fitness(path: &Path, pop: usize) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .filter(|l| l.starts_with("eval,0,"))
        .take(pop)
        .map(|l| l.split(',').nth(3).unwrap().to_string())
        .collect()
}

#[test]
fn run_skip_and_report() {
    let (_dir, config, out) = setup();
    let first = cli(&["run", "--config", &config, "--output", &out, "--quiet"]);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));

    let store = Path::new(&out);
    let runs: Vec<_> = ["DE/run_000", "DE/run_001", "DT_C/run_000", "DT_C/run_001"]
        .iter()
        .map(|r| store.join(format!("runs/F3/{r}.csv")))
        .collect();
    for r in &runs {
        assert!(r.is_file(), "{}", r.display());
    }
    let manifest = fs::read_to_string(store.join("manifest.csv")).unwrap();
    assert_eq!(manifest.lines().count(), 5);
    assert_eq!(manifest.matches(",done,").count(), 4);

    let de = initial_fitness(&runs[0], 15);
    assert_eq!(de.len(), 15);
    assert_eq!(de, initial_fitness(&runs[2], 15));
    assert_ne!(de, initial_fitness(&runs[1], 15));

    let before: Vec<_> = runs
        .iter()
        .map(|r| fs::metadata(r).unwrap().modified().unwrap())
        .collect();
    let again = cli(&[
        "run",
        "--config",
        &config,
        "--output",
        &out,
        "--skip-existing",
        "--quiet",
    ]);
    assert!(again.status.success());
    assert!(String::from_utf8_lossy(&again.stderr).contains("0 completed, 4 skipped, 0 failed"));
    let after: Vec<_> = runs
        .iter()
        .map(|r| fs::metadata(r).unwrap().modified().unwrap())
        .collect();
    assert_eq!(before, after);
    assert_eq!(fs::read_to_string(store.join("manifest.csv")).unwrap(), manifest);

    let report = cli(&["report", "--output", &out, "--kind", "ranking"]);
    assert!(report.status.success());
    let ranking = fs::read_to_string(store.join("reports/ranking.csv")).unwrap();
    assert_eq!(ranking.lines().count(), 3);

    let confusion = cli(&["report", "--output", &out, "--kind", "confusion"]);
    assert!(!confusion.status.success());
    assert!(String::from_utf8_lossy(&confusion.stderr).contains("shadow"));

    let shadow = cli(&["shadow", "--config", &config, "--output", &out, "--quiet"]);
    assert!(shadow.status.success());
    assert!(store.join("runs/F3/DT_C/shadow_001.csv").is_file());
    let confusion = cli(&["report", "--output", &out, "--kind", "confusion"]);
    assert!(confusion.status.success());
    assert!(store.join("reports/confusion.csv").is_file());
}

#[test]
fn bad_configs_fail_fast() {
    let (dir, _config, out) = setup();
    let bad = dir.path().join("bad.toml");
    fs::write(
        &bad,
        CONFIG.replace("repetitions = 2", "repetitions = 2\ncolour = \"red\""),
    )
    .unwrap();
    let r = cli(&["run", "--config", &bad.display().to_string(), "--output", &out]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("colour"));
    assert!(!Path::new(&out).exists());

    let r = cli(&[
        "kriging-offline",
        "--config",
        &bad.display().to_string().replace("bad", "missing"),
    ]);
    assert_eq!(r.status.code(), Some(2));
}
