use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ltl_ground::automata::deserialize;
use ltl_ground_cli::main_with;

fn ltlg(args: &[&str]) -> ExitCode {
    main_with(std::iter::once("ltlg").chain(args.iter().copied()))
}

/// The single run directory under `out` whose name ends with `-command`.
fn run_dir(out: &Path, command: &str) -> PathBuf {
    let mut dirs: Vec<PathBuf> = fs::read_dir(out)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_str().unwrap().contains(&format!("-{command}")))
        .collect();
    dirs.sort();
    dirs.pop().unwrap()
}

#[test]
fn compile_writes_machine_and_dot() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let fig1 = "!lava U (egg & (!lava U (pick & (!lava U door))))";
    assert_eq!(ltlg(&["compile", fig1, "--out", out]), ExitCode::SUCCESS);
    let m = deserialize(&fs::read(tmp.path().join("machine.nrmm")).unwrap()).unwrap();
    assert_eq!(m.num_states(), 5);
    assert!(fs::read_to_string(tmp.path().join("machine.dot")).unwrap().starts_with("digraph"));

    assert_eq!(ltlg(&["compile", "F a", "--alphabet", "a,b", "--out", out]), ExitCode::SUCCESS);
    let m = deserialize(&fs::read(tmp.path().join("machine.nrmm")).unwrap()).unwrap();
    assert_eq!(m.num_states(), 2);
}

#[test]
fn usage_errors_exit_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    assert_eq!(ltlg(&["compile", "G a", "--alphabet", "a,b", "--out", out]), ExitCode::from(1));
    assert_eq!(ltlg(&["frobnicate"]), ExitCode::from(1));
    assert_eq!(ltlg(&["sample", "colour=red"]), ExitCode::from(1));
    assert_eq!(ltlg(&["train", "env=bootcamp", "mode=grounder", &format!("out_dir={out}")]), ExitCode::from(1));
}

#[test]
fn missing_files_exit_with_three() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nothing");
    assert_eq!(ltlg(&["eval", "--run", missing.to_str().unwrap()]), ExitCode::from(3));
    assert_eq!(ltlg(&["train", "--config", missing.to_str().unwrap()]), ExitCode::from(3));
}

#[test]
fn verify_passes_and_catches_a_tampered_dataset() {
    let tmp = tempfile::tempdir().unwrap();
    let out = format!("out_dir={}", tmp.path().display());
    assert_eq!(ltlg(&["verify", "tasks=100", &out]), ExitCode::SUCCESS);

    assert_eq!(ltlg(&["dataset", "tasks=6", "sequences_max=2", &out]), ExitCode::SUCCESS);
    let dataset = run_dir(tmp.path(), "dataset").join("dataset");
    let dataset_arg = format!("dataset={}", dataset.display());
    assert_eq!(ltlg(&["verify", &dataset_arg, &out]), ExitCode::SUCCESS);

    // give every formula the first entry's machine
    let manifest = dataset.join("manifest.tsv");
    let text = fs::read_to_string(&manifest).unwrap();
    let first = text.lines().next().unwrap().split('\t').nth(1).unwrap().to_string();
    let swapped: String = text
        .lines()
        .map(|l| format!("{}\t{first}\n", l.split('\t').next().unwrap()))
        .collect();
    fs::write(&manifest, swapped).unwrap();
    assert_eq!(ltlg(&["verify", &dataset_arg, &out]), ExitCode::from(2));
}

#[test]
fn train_then_eval_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("run.txt");
    fs::write(
        &config,
        "env = small\nlayout = p...l/..d../.l.../....p/d....\nsequences_max = 2\nlength_max = 2\n\
         episodes = 1500\ntasks = 50\neval_episodes = 60\neval_tasks = 30\nseed = 7\n",
    )
    .unwrap();
    let config = config.to_str().unwrap();
    let mut metrics = Vec::new();
    for i in 0..2 {
        let out_dir = tmp.path().join(format!("out{i}"));
        let out = format!("out_dir={}", out_dir.display());
        assert_eq!(ltlg(&["train", "--config", config, &out]), ExitCode::SUCCESS);
        let train = run_dir(&out_dir, "train");
        for f in ["config.txt", "qtable.json", "grounder.nrmg", "training_log.csv", "episodes.csv"] {
            assert!(train.join(f).exists(), "{f}");
        }
        assert_eq!(ltlg(&["eval", "--run", train.to_str().unwrap()]), ExitCode::SUCCESS);
        assert_eq!(ltlg(&["eval", "--run", train.to_str().unwrap(), "seed=8"]), ExitCode::from(1));
        let eval = run_dir(&out_dir, "eval");
        let csv = fs::read_to_string(eval.join("metrics.csv")).unwrap();
        let names: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
        assert_eq!(names, ["base", "+dep", "+conj"]);
        metrics.push((
            csv,
            fs::read(train.join("qtable.json")).unwrap(),
            fs::read(train.join("training_log.csv")).unwrap(),
        ));
    }
    assert!(metrics[0] == metrics[1], "same seed, different outputs");
}
