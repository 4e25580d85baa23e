//! Command-line contract tests: exit codes, error wording, config-file
//! layering, output atomicity, and the exact shapes of eval/render/metrics
//! output. Everything runs the real binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const EPS: f64 = 1e-9;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_charnet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn extract_json(dir: &Path) -> PathBuf {
    let out = run(&[
        "extract",
        "--tokens",
        fixture("fixture.tokens").to_str().unwrap(),
        "--entities",
        fixture("fixture.entities").to_str().unwrap(),
        "--formats",
        "json",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr_of(&out));
    dir.join("fixture.full.json")
}

// ------------------------------------------------------------- exit codes

#[test]
fn missing_input_file_exits_one_and_names_it() {
    let out = run(&[
        "extract",
        "--tokens",
        "/nonexistent/book.tokens",
        "--entities",
        "/nonexistent/book.entities",
    ]);
    assert_eq!(code(&out), 1);
    let err = stderr_of(&out);
    assert!(err.starts_with("error: "), "unexpected stderr: {err}");
    assert!(err.contains("/nonexistent/book.tokens"), "missing path in: {err}");
}

#[test]
fn invalid_flag_values_exit_two() {
    let tokens = fixture("fixture.tokens");
    let entities = fixture("fixture.entities");
    let base = [
        "extract",
        "--tokens",
        tokens.to_str().unwrap(),
        "--entities",
        entities.to_str().unwrap(),
    ];
    for (flag, value) in [
        ("--window", "chapter"),
        ("--window", "token:0"),
        ("--count", "triple"),
        ("--measure", "eigenvector"),
        ("--formats", "gexf,pdf"),
        ("--slices", "0,banana,1"),
        ("--slices", "0,0.5"),
        ("--slices", "0.1,0.5,1"),
    ] {
        let mut args = base.to_vec();
        args.extend([flag, value]);
        let out = run(&args);
        assert_eq!(code(&out), 2, "{flag} {value}: {}", stderr_of(&out));
    }
    // clap's own usage errors use the same code
    let out = run(&["extract", "--bogus-flag"]);
    assert_eq!(code(&out), 2);
    // render iteration floor
    let out = run(&[
        "render",
        "--network",
        "x.json",
        "--out-file",
        "x.svg",
        "--iterations",
        "0",
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr_of(&out).contains("at least 1"));
}

#[test]
fn input_mode_conflicts_exit_two() {
    let tokens = fixture("fixture.tokens");
    let out = run(&["extract", "--tokens", tokens.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr_of(&out).contains("--tokens requires --entities"));

    let out = run(&["extract", "--entities", tokens.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr_of(&out).contains("--entities requires --tokens"));

    let out = run(&[
        "extract",
        "--tokens",
        tokens.to_str().unwrap(),
        "--entities",
        tokens.to_str().unwrap(),
        "--raw",
        tokens.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr_of(&out).contains("exactly one input mode"));

    let out = run(&["extract"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn malformed_network_json_exits_one_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("broken.json");
    std::fs::write(&bad, "{ this is not json").unwrap();
    for cmd in ["metrics", "render"] {
        let mut args = vec![cmd, "--network", bad.to_str().unwrap()];
        if cmd == "render" {
            args.extend(["--out-file", "out.svg"]);
        }
        let out = run(&args);
        assert_eq!(code(&out), 1, "{cmd}: {}", stderr_of(&out));
        let err = stderr_of(&out);
        assert!(err.contains("broken.json"), "missing path in: {err}");
        assert!(err.contains("line 1"), "missing position in: {err}");
    }
}

// --------------------------------------------------------------- raw mode

#[test]
fn raw_mode_runs_the_fallback_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let minitext = fixture("minitext.txt");
    let out = run(&[
        "extract",
        "--raw",
        minitext.to_str().unwrap(),
        "--formats",
        "json",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr_of(&out));
    assert!(stdout_of(&out).contains("Julien Morel 1.00"), "{}", stdout_of(&out));
    assert!(stderr_of(&out).contains("pronoun-only"), "{}", stderr_of(&out));
    assert!(dir.path().join("minitext.full.json").exists());

    // An alias table folds one character into another before networking.
    let aliases = dir.path().join("aliases.txt");
    std::fs::write(&aliases, "Le cocher = Julien Morel\n").unwrap();
    let merged = dir.path().join("merged");
    let out = run(&[
        "extract",
        "--raw",
        minitext.to_str().unwrap(),
        "--aliases",
        aliases.to_str().unwrap(),
        "--formats",
        "json",
        "--out",
        merged.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr_of(&out));
    let text = stdout_of(&out);
    let row = text.lines().nth(1).expect("summary row");
    assert!(row.contains(" 4"), "expected 4 nodes after the merge: {row}");

    // Alias tables naming an unknown canonical character are config errors.
    std::fs::write(&aliases, "Le cocher = Personne Inconnue\n").unwrap();
    let out = run(&[
        "extract",
        "--raw",
        minitext.to_str().unwrap(),
        "--aliases",
        aliases.to_str().unwrap(),
        "--out",
        merged.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2, "{}", stderr_of(&out));

    // A missing replacement lexicon is an input error.
    let out = run(&[
        "extract",
        "--raw",
        minitext.to_str().unwrap(),
        "--lexicon",
        "/nonexistent/words.lex",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stderr_of(&out).contains("/nonexistent/words.lex"));
}

// ------------------------------------------------------------ config file

#[test]
fn config_file_applies_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let (dir_a, dir_b) = (dir.path().join("a"), dir.path().join("b"));
    let cfg = dir.path().join("charnet.conf");
    std::fs::write(
        &cfg,
        format!(
            "# layering test\nformats = gexf\nslices = 0,0.25,0.75,1\nout = {}\n",
            dir_a.display()
        ),
    )
    .unwrap();
    let tokens = fixture("fixture.tokens");
    let entities = fixture("fixture.entities");
    let base = [
        "extract",
        "--tokens",
        tokens.to_str().unwrap(),
        "--entities",
        entities.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
    ];

    // Config alone: three slices, gexf only, into dir_a.
    let out = run(&base);
    assert_eq!(code(&out), 0, "{}", stderr_of(&out));
    let mut names: Vec<String> = std::fs::read_dir(&dir_a)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(
        names,
        ["fixture.slice1.gexf", "fixture.slice2.gexf", "fixture.slice3.gexf"]
    );

    // Flags override formats and out; slices still come from the file.
    let mut args = base.to_vec();
    args.extend(["--formats", "json", "--out", dir_b.to_str().unwrap()]);
    let out = run(&args);
    assert_eq!(code(&out), 0, "{}", stderr_of(&out));
    let mut names: Vec<String> = std::fs::read_dir(&dir_b)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(
        names,
        ["fixture.slice1.json", "fixture.slice2.json", "fixture.slice3.json"]
    );
}

#[test]
fn config_file_errors_exit_two_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let base = |cfg: &Path| {
        vec![
            "extract".to_string(),
            "--tokens".to_string(),
            fixture("fixture.tokens").to_str().unwrap().to_string(),
            "--entities".to_string(),
            fixture("fixture.entities").to_str().unwrap().to_string(),
            "--config".to_string(),
            cfg.to_str().unwrap().to_string(),
        ]
    };
    for (name, body, expect) in [
        ("unknown.conf", "colour = red\n", "colour"),
        ("dup.conf", "count = pairs\ncount = binary\n", "line 2"),
        ("value.conf", "count = triple\n", "count"),
        ("grammar.conf", "window sentence\n", "line 1"),
    ] {
        let cfg = dir.path().join(name);
        std::fs::write(&cfg, body).unwrap();
        let args = base(&cfg);
        let out = run(&args.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(code(&out), 2, "{name}: {}", stderr_of(&out));
        assert!(
            stderr_of(&out).contains(expect),
            "{name}: expected `{expect}` in {}",
            stderr_of(&out)
        );
    }
}

// -------------------------------------------------------------- atomicity

#[test]
fn failed_runs_leave_no_outputs() {
    let dir = tempfile::tempdir().unwrap();

    // Config error: the output directory must not even be created.
    let ghost = dir.path().join("never");
    let out = run(&[
        "extract",
        "--tokens",
        fixture("fixture.tokens").to_str().unwrap(),
        "--entities",
        fixture("fixture.entities").to_str().unwrap(),
        "--slices",
        "0,0.5",
        "--out",
        ghost.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(!ghost.exists(), "failed run created {ghost:?}");

    // Write failure: the target path is an existing regular file, so no
    // output can land and the file must survive untouched.
    let blocked = dir.path().join("blocked");
    std::fs::write(&blocked, "keep me").unwrap();
    let out = run(&[
        "extract",
        "--tokens",
        fixture("fixture.tokens").to_str().unwrap(),
        "--entities",
        fixture("fixture.entities").to_str().unwrap(),
        "--out",
        blocked.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1, "{}", stderr_of(&out));
    assert_eq!(std::fs::read_to_string(&blocked).unwrap(), "keep me");
}

// ------------------------------------------------------------------- eval

fn write_eval_files(dir: &Path) -> (PathBuf, PathBuf, PathBuf) {
    let tokens = dir.join("mini.tokens");
    std::fs::write(
        &tokens,
        "paragraph_ID\tsentence_ID\ttoken_ID_within_document\tword\tlemma\tPOS_tag\n\
         0\t0\t0\tAnne\tAnne\tPROPN\n\
         0\t0\t1\tBea\tBea\tPROPN\n\
         0\t0\t2\tCarl\tCarl\tPROPN\n\
         0\t0\t3\tDora\tDora\tPROPN\n",
    )
    .unwrap();
    let gold = dir.join("mini.gold.entities");
    std::fs::write(
        &gold,
        "COREF\tstart_token\tend_token\tprop\tcat\ttext\n\
         0\t0\t0\tPROP\tPER\tAnne\n\
         0\t1\t1\tPROP\tPER\tBea\n\
         0\t2\t2\tPROP\tPER\tCarl\n\
         1\t3\t3\tPROP\tPER\tDora\n",
    )
    .unwrap();
    let pred = dir.join("mini.pred.entities");
    std::fs::write(
        &pred,
        "COREF\tstart_token\tend_token\tprop\tcat\ttext\n\
         0\t0\t0\tPROP\tPER\tAnne\n\
         0\t1\t1\tPROP\tPER\tBea\n\
         1\t2\t2\tPROP\tPER\tCarl\n\
         1\t3\t3\tPROP\tPER\tDora\n",
    )
    .unwrap();
    (tokens, gold, pred)
}

fn metric(report: &serde_json::Value, name: &str, field: &str) -> f64 {
    report[name][field].as_f64().unwrap_or_else(|| panic!("{name}.{field} missing"))
}

#[test]
fn eval_reproduces_hand_scores() {
    let dir = tempfile::tempdir().unwrap();
    let (tokens, gold, pred) = write_eval_files(dir.path());
    let out = run(&[
        "eval",
        "--tokens",
        tokens.to_str().unwrap(),
        "--gold",
        gold.to_str().unwrap(),
        "--pred",
        pred.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr_of(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();

    // Same mention spans on both sides: recognition is perfect.
    assert!((metric(&report, "ner", "f1") - 1.0).abs() < EPS);
    // Splitting {A,B,C} and fusing {C,D} costs one link each way.
    assert!((metric(&report, "muc", "precision") - 0.5).abs() < EPS);
    assert!((metric(&report, "muc", "recall") - 0.5).abs() < EPS);
    assert!((metric(&report, "b_cubed", "precision") - 0.75).abs() < EPS);
    assert!((metric(&report, "b_cubed", "recall") - 2.0 / 3.0).abs() < EPS);
    assert!((metric(&report, "b_cubed", "f1") - 12.0 / 17.0).abs() < EPS);
    assert!((metric(&report, "ceaf_e", "f1") - 11.0 / 15.0).abs() < EPS);
    let mean = (0.5 + 12.0 / 17.0 + 11.0 / 15.0) / 3.0;
    assert!((report["mean_f"].as_f64().unwrap() - mean).abs() < EPS);

    // Gold against itself is all ones.
    let out = run(&[
        "eval",
        "--tokens",
        tokens.to_str().unwrap(),
        "--gold",
        gold.to_str().unwrap(),
        "--pred",
        gold.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    for name in ["ner", "muc", "b_cubed", "ceaf_e"] {
        assert!((metric(&report, name, "f1") - 1.0).abs() < EPS, "{name} != 1");
    }
    assert!((report["mean_f"].as_f64().unwrap() - 1.0).abs() < EPS);

    // TSV mirrors the same numbers, one metric per row.
    let out = run(&[
        "eval",
        "--tokens",
        tokens.to_str().unwrap(),
        "--gold",
        gold.to_str().unwrap(),
        "--pred",
        pred.to_str().unwrap(),
        "--format",
        "tsv",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout_of(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("metric\tprecision\trecall\tf1"));
    let muc_row: Vec<&str> =
        lines.find(|l| l.starts_with("muc\t")).expect("muc row").split('\t').collect();
    assert!((muc_row[3].parse::<f64>().unwrap() - 0.5).abs() < EPS);
    assert!(text.lines().any(|l| l.starts_with("mean_f\t")));

    // Unknown format is a configuration error.
    let out = run(&[
        "eval",
        "--tokens",
        tokens.to_str().unwrap(),
        "--gold",
        gold.to_str().unwrap(),
        "--pred",
        pred.to_str().unwrap(),
        "--format",
        "xml",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn eval_rejects_malformed_entities_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let (tokens, gold, _) = write_eval_files(dir.path());
    let bad = dir.path().join("bad.entities");
    std::fs::write(
        &bad,
        "COREF\tstart_token\tend_token\tprop\tcat\ttext\n\
         0\t0\t0\tPROP\tPER\tAnne\n\
         0\t1\t1\tWHAT\tPER\tBea\n",
    )
    .unwrap();
    let out = run(&[
        "eval",
        "--tokens",
        tokens.to_str().unwrap(),
        "--gold",
        gold.to_str().unwrap(),
        "--pred",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    let err = stderr_of(&out);
    assert!(err.contains("bad.entities"), "missing path in: {err}");
    assert!(err.contains("line 3"), "missing line number in: {err}");
}

// ----------------------------------------------------------------- render

#[test]
fn render_is_seed_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let net = extract_json(dir.path());
    let (svg_a, svg_b, svg_c) = (
        dir.path().join("a.svg"),
        dir.path().join("b.svg"),
        dir.path().join("c.svg"),
    );
    for (path, seed) in [(&svg_a, "42"), (&svg_b, "42"), (&svg_c, "43")] {
        let out = run(&[
            "render",
            "--network",
            net.to_str().unwrap(),
            "--out-file",
            path.to_str().unwrap(),
            "--seed",
            seed,
        ]);
        assert_eq!(code(&out), 0, "{}", stderr_of(&out));
    }
    let (a, b, c) = (
        std::fs::read(&svg_a).unwrap(),
        std::fs::read(&svg_b).unwrap(),
        std::fs::read(&svg_c).unwrap(),
    );
    assert_eq!(a, b, "same seed must reproduce the same SVG");
    assert_ne!(a, c, "different seeds should move the layout");
}

fn attr<'a>(line: &'a str, name: &str) -> &'a str {
    let pat = format!("{name}=\"");
    let start = line.find(&pat).map(|i| i + pat.len()).expect("attribute present");
    &line[start..start + line[start..].find('"').expect("attribute closed")]
}

#[test]
fn render_measure_changes_node_visuals_only() {
    let dir = tempfile::tempdir().unwrap();
    let net = extract_json(dir.path());
    let mut svgs = Vec::new();
    for measure in ["weighted-degree", "pagerank"] {
        let path = dir.path().join(format!("{measure}.svg"));
        let out = run(&[
            "render",
            "--network",
            net.to_str().unwrap(),
            "--out-file",
            path.to_str().unwrap(),
            "--measure",
            measure,
        ]);
        assert_eq!(code(&out), 0, "{}", stderr_of(&out));
        svgs.push(std::fs::read_to_string(&path).unwrap());
    }
    let pick = |svg: &str, tag: &str| -> Vec<String> {
        svg.lines().filter(|l| l.trim_start().starts_with(tag)).map(String::from).collect()
    };
    let (a, b) = (&svgs[0], &svgs[1]);
    assert_ne!(a, b, "the measure should change the picture");
    // Edges depend only on the layout, which the measure does not touch.
    assert_eq!(pick(a, "<line"), pick(b, "<line"));
    // Nodes stay put; only size and color react to the measure.
    let (ca, cb) = (pick(a, "<circle"), pick(b, "<circle"));
    assert_eq!(ca.len(), cb.len());
    for (la, lb) in ca.iter().zip(&cb) {
        assert_eq!(attr(la, "cx"), attr(lb, "cx"));
        assert_eq!(attr(la, "cy"), attr(lb, "cy"));
    }
    // Labels keep their text and column; only the offset under the circle moves.
    let (ta, tb) = (pick(a, "<text"), pick(b, "<text"));
    assert_eq!(ta.len(), tb.len());
    for (la, lb) in ta.iter().zip(&tb) {
        assert_eq!(attr(la, "x"), attr(lb, "x"));
        assert_eq!(la.rsplit('>').next(), lb.rsplit('>').next());
    }
}

// ---------------------------------------------------------------- metrics

#[test]
fn metrics_dumps_raw_scores_for_every_measure() {
    let dir = tempfile::tempdir().unwrap();
    let net = extract_json(dir.path());
    let out = run(&["metrics", "--network", net.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr_of(&out));
    let dump: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(dump["source_id"], "fixture.full");
    assert_eq!(dump["normalized"], false);
    let measures = dump["measures"].as_array().unwrap();
    let labels: Vec<&str> =
        measures.iter().map(|m| m["measure"].as_str().unwrap()).collect();
    assert_eq!(labels, ["degree", "weighted-degree", "betweenness", "pagerank"]);
    for m in measures {
        let scores = m["scores"].as_array().unwrap();
        assert_eq!(scores.len(), 7, "one row per character");
        match m["measure"].as_str().unwrap() {
            // Raw values: the protagonist touches all six others.
            "degree" => assert_eq!(scores[0]["score"], 6.0),
            "weighted-degree" => assert_eq!(scores[0]["score"], 9.0),
            "pagerank" => {
                let sum: f64 =
                    scores.iter().map(|s| s["score"].as_f64().unwrap()).sum();
                assert!((sum - 1.0).abs() < EPS, "pagerank mass {sum}");
            }
            _ => {}
        }
    }

    let out = run(&["metrics", "--network", net.to_str().unwrap(), "--measure", "degree"]);
    assert_eq!(code(&out), 0);
    let dump: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(dump["measures"].as_array().unwrap().len(), 1);
}

// ---------------------------------------------------------------- summary

#[test]
fn summary_table_lists_slices_and_top_characters() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "extract",
        "--tokens",
        fixture("fixture.tokens").to_str().unwrap(),
        "--entities",
        fixture("fixture.entities").to_str().unwrap(),
        "--slices",
        "0,0.25,0.75,1",
        "--drop-middle",
        "--formats",
        "gexf,svg",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr_of(&out));
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "slice  nodes  edges  components  top importance (weighted-degree)");
    assert!(lines[1].starts_with("begin"), "row: {}", lines[1]);
    assert!(lines[1].contains("Boule de Suif 1.00"), "row: {}", lines[1]);
    assert!(lines[2].starts_with("end"), "row: {}", lines[2]);
    assert_eq!(lines.len(), 3, "exactly header + two slices: {text}");

    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(
        names,
        ["fixture.begin.gexf", "fixture.begin.svg", "fixture.end.gexf", "fixture.end.svg"]
    );

    // Cumulative slicing: the last slice covers the whole narrative, so
    // its export matches a plain full-document run byte for byte.
    let cum = tempfile::tempdir().unwrap();
    let out = run(&[
        "extract",
        "--tokens",
        fixture("fixture.tokens").to_str().unwrap(),
        "--entities",
        fixture("fixture.entities").to_str().unwrap(),
        "--slices",
        "0,0.5,1",
        "--cumulative",
        "--formats",
        "json",
        "--out",
        cum.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr_of(&out));
    let full = tempfile::tempdir().unwrap();
    let full_json = extract_json(full.path());
    assert_eq!(
        std::fs::read(cum.path().join("fixture.slice2.json")).unwrap(),
        std::fs::read(full_json).unwrap()
    );
}
