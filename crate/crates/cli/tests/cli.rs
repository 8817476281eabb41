use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(rel: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel).to_string_lossy().into_owned()
}

fn wexfab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wexfab")).args(args).env_remove("WEXFAB_FIXTURES").output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn copy_into(dir: &Path, rel: &str) -> String {
    let dest: PathBuf = dir.join(Path::new(rel).file_name().unwrap());
    fs::copy(data(rel), &dest).unwrap();
    dest.to_string_lossy().into_owned()
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("w.json").to_string_lossy().into_owned();
    let google = data("tasks/google-task.wdl");
    let cases: Vec<(Vec<String>, i32)> = vec![
        (vec!["validate".into(), google.clone()], 0),
        (vec!["validate".into(), data("tasks/cyclic.wdl")], 1),
        (vec!["validate".into(), data("tasks/missing.wdl")], 1),
        (vec!["run".into(), google.clone(), "--offline".into(), data("fixtures/google")], 0),
        (vec!["run".into(), google.clone(), "--offline".into(), data("no-such-dir")], 2),
        (vec!["run".into(), data("tasks/cyclic.wdl"), "--offline".into(), data("fixtures/google")], 1),
        (
            vec![
                "learn".into(),
                "--corpus".into(),
                data("corpus/conferences"),
                "--examples".into(),
                data("learn/conference-examples.jsonl"),
                "--out".into(),
                out.clone(),
            ],
            0,
        ),
        (
            vec![
                "learn".into(),
                "--corpus".into(),
                data("corpus/conferences"),
                "--examples".into(),
                data("learn/conference-truth.jsonl").replace("truth", "nothing"),
                "--out".into(),
                out.clone(),
            ],
            1,
        ),
        (vec!["extract".into(), "--wrapper".into(), google.clone(), "--docs".into(), data("corpus/conferences")], 1),
        (
            vec![
                "policy".into(),
                "eval".into(),
                "--policy".into(),
                data("policies/bandwidth-policy.xml"),
                "--props".into(),
                data("props/bandwidth-30000.txt"),
            ],
            0,
        ),
        (
            vec![
                "policy".into(),
                "eval".into(),
                "--policy".into(),
                data("policies/bandwidth-policy.xml"),
                "--props".into(),
                data("golden/dblp-inserts.sql"),
            ],
            1,
        ),
        (vec!["policy".into(), "eval".into(), "--policy".into(), data("policies/bandwidth-policy.xml")], 2),
        (vec!["frobnicate".into()], 2),
        (vec!["run".into(), google.clone(), "--no-such-flag".into()], 2),
        (vec![], 2),
        (vec!["--help".into()], 0),
    ];
    for (args, want) in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let o = wexfab(&args);
        assert_eq!(code(&o), want, "wexfab {args:?}\nstderr: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn cyclic_task_reports_cycle() {
    let o = wexfab(&["validate", &data("tasks/cyclic.wdl")]);
    assert!(stdout(&o).contains("CYCLE"), "{}", stdout(&o));
}

#[test]
fn offline_run_is_byte_identical() {
    let args = ["run", &data("tasks/google-task.wdl"), "--offline", &data("fixtures/google")];
    let first = wexfab(&args);
    let second = wexfab(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
    let report: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(report["operators"].as_object().unwrap().len(), 5);
    assert_eq!(report["outputs"].as_array().unwrap().len(), 6);
}

#[test]
fn fixture_dir_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_wexfab"))
        .args(["run", &data("tasks/google-task.wdl")])
        .env("WEXFAB_FIXTURES", data("fixtures/google"))
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(
        o.stdout,
        wexfab(&["run", &data("tasks/google-task.wdl"), "--offline", &data("fixtures/google")]).stdout
    );
}

#[test]
fn report_file() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("report.json");
    let args = ["run", &data("tasks/google-task.wdl"), "--offline", &data("fixtures/google")];
    let printed = wexfab(&args).stdout;
    let o = wexfab(&[&args[..], &["--report", path.to_str().unwrap()]].concat());
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    assert_eq!(fs::read(&path).unwrap(), printed);
}

#[test]
fn bandwidth_plan_is_printed() {
    let eval = |b: u32| {
        wexfab(&[
            "policy",
            "eval",
            "--policy",
            &data("policies/bandwidth-policy.xml"),
            "--props",
            &data(&format!("props/bandwidth-{b}.txt")),
        ])
    };
    assert_eq!(stdout(&eval(30000)), "Detach(VideoService)\nUpdate(AudioService, SoundEncoder=classLpc)\n");
    assert_eq!(stdout(&eval(40000)), "");
    assert_eq!(stdout(&eval(50000)), "");
}

#[test]
fn system_policy_apply_then_reapply() {
    let tmp = tempfile::tempdir().unwrap();
    let task = copy_into(tmp.path(), "tasks/media-task.wdl");
    let registry = copy_into(tmp.path(), "registry/media.json");
    let apply = |extra: &[&str]| {
        let base = [
            "policy",
            "apply",
            "--policy",
            &data("policies/bandwidth-policy.xml"),
            "--task",
            &task,
            "--registry",
            &registry,
            "--props",
            &data("props/bandwidth-30000.txt"),
        ];
        wexfab(&[&base[..], extra].concat())
    };
    let original = fs::read_to_string(&registry).unwrap();

    let dry = apply(&["--dry-run"]);
    assert_eq!(code(&dry), 0);
    assert_eq!(stdout(&dry), "Detach(VideoService)\nUpdate(AudioService, SoundEncoder=classLpc)\n");
    assert_eq!(fs::read_to_string(&registry).unwrap(), original);

    let real = apply(&[]);
    assert_eq!(code(&real), 0);
    assert_eq!(real.stdout, dry.stdout);
    let snapshot = fs::read_to_string(&registry).unwrap();
    assert!(!snapshot.contains("VideoService"));
    assert!(snapshot.contains("classLpc"));
    let installed = fs::read_to_string(&task).unwrap();
    assert!(!installed.contains("VideoService"));

    let again = apply(&[]);
    assert_eq!(code(&again), 1);
    assert!(stdout(&again).contains("UNKNOWN_SERVICE"));
    assert_eq!(fs::read_to_string(&registry).unwrap(), snapshot);
    assert_eq!(fs::read_to_string(&task).unwrap(), installed);
}

#[test]
fn extraction_directive_installs_task() {
    let tmp = tempfile::tempdir().unwrap();
    let registry = copy_into(tmp.path(), "registry/dblp-session.json");
    let task = tmp.path().join("dblp.wdl");
    let apply = || {
        wexfab(&[
            "policy",
            "apply",
            "--policy",
            &data("policies/dblp-directive.xml"),
            "--task",
            task.to_str().unwrap(),
            "--registry",
            &registry,
            "--offline",
            &data("fixtures/dblp"),
        ])
    };
    let first = apply();
    assert_eq!(code(&first), 0, "{}", String::from_utf8_lossy(&first.stderr));
    let verbs: Vec<String> =
        stdout(&first).lines().map(|l| l.split([',', ')']).next().unwrap().to_string() + ")").collect();
    assert_eq!(verbs, ["Detach(tchat)", "Detach(mail)", "Attach(fetch)", "Attach(extract)", "Attach(db)"]);
    assert!(task.exists());

    let second = apply();
    assert_eq!(code(&second), 0);
    assert_eq!(stdout(&second), "");

    let run = wexfab(&["run", task.to_str().unwrap(), "--offline", &data("fixtures/dblp")]);
    assert_eq!(code(&run), 0);
    let report: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    let mut sql: String = report["sinks"]["db"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l.as_str().unwrap().to_string())
        .collect::<Vec<_>>()
        .join("\n");
    sql.push('\n');
    assert_eq!(sql, fs::read_to_string(data("golden/dblp-inserts.sql")).unwrap());
}

#[test]
fn learn_extract_eval() {
    let tmp = tempfile::tempdir().unwrap();
    let wrapper = tmp.path().join("w.json");
    let records = tmp.path().join("records.jsonl");
    let w = wrapper.to_str().unwrap();
    let learn = |out: &str| {
        wexfab(&[
            "learn",
            "--corpus",
            &data("corpus/conferences"),
            "--examples",
            &data("learn/conference-examples.jsonl"),
            "--out",
            out,
        ])
    };
    assert_eq!(code(&learn(w)), 0);
    let again = tmp.path().join("w2.json");
    learn(again.to_str().unwrap());
    assert_eq!(fs::read(&wrapper).unwrap(), fs::read(&again).unwrap());

    let o =
        wexfab(&["extract", "--wrapper", w, "--docs", &data("corpus/conferences"), "--out", records.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let lines = fs::read_to_string(&records).unwrap();
    assert_eq!(lines.lines().count(), 10);
    assert!(lines.starts_with("{\"acronym\":\"VLDB\",\"year\":\"2001\",\"place\":\"Roma , Italy\"}\n"));

    let o = wexfab(&[
        "eval",
        "--wrapper",
        w,
        "--docs",
        &data("corpus/conferences"),
        "--truth",
        &data("learn/conference-truth.jsonl"),
        "--example-count",
        "2",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "Source       Ex.  Inst.  Retr.  Rec.  Acc.\n\
         conferences    2     10     10  0.90  0.90\n"
    );
}
