mod support;

use std::collections::BTreeMap;
use std::fs;

use crossroom::dataset::synthetic_transcript;
use crossroom::geometry::json::GeometryJson;
use crossroom::geometry::{geometry_error, GeometryErrorReport, PointLabel};
use crossroom::recognition::{write_decisions, KeywordLexicon};
use support::common::tables::{decisions_from, round2, KEYWORD_ROWS, OURS_CONFUSION};
use support::common::{tripod_camera, Scene};
use support::{classroom_annotation, crossroom, path_str, stderr, stdout, write_json};

#[test]
fn estimate_with_truth_prints_the_error_table() {
    let dir = tempfile::tempdir().unwrap();
    let (ann, scene) = classroom_annotation();
    let a = write_json(dir.path(), "frame.json", &ann);
    let t = write_json(dir.path(), "truth.json", &scene.true_distances());
    let out = dir.path().join("geometry.json");
    let report = dir.path().join("report.json");
    let o = crossroom(&["estimate", path_str(&a), "--truth", path_str(&t), "--out", path_str(&out), "--report", path_str(&report)]);
    assert!(o.status.success(), "{}", stderr(&o));

    let g = GeometryJson::from_text(&fs::read_to_string(&out).unwrap()).unwrap().into_geometry().unwrap();
    let expected = geometry_error(&g, &scene.true_distances()).unwrap();
    let printed: GeometryErrorReport = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(printed, expected);

    let table = stdout(&o);
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines.len(), 2 + scene.speakers.len());
    assert!(lines[0].starts_with("speaker"));
    for (line, (id, err)) in lines[1..].iter().zip(&expected.per_speaker) {
        let cols: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(cols[0], id);
        assert_eq!(cols[3], format!("{err:.2}"));
    }
    let mean: Vec<&str> = lines.last().unwrap().split_whitespace().collect();
    assert_eq!(mean, ["mean", &format!("{:.2}", expected.mean)]);
}

#[test]
fn baseline_on_square_table_gives_equal_distances() {
    let dir = tempfile::tempdir().unwrap();
    let mut scene = Scene::classroom().with_four_speakers();
    scene.table_width = 40.0;
    // the estimator extends the visible depth by 5%
    scene.table_depth = 40.0 / 1.05;
    let ann = scene.render(&tripod_camera(), "square");
    let a = write_json(dir.path(), "frame.json", &ann);
    let o = crossroom(&["estimate", path_str(&a), "--baseline"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let g = GeometryJson::from_text(&stdout(&o)).unwrap();
    let d: Vec<f64> = g.distances_in.values().copied().collect();
    assert_eq!(d.len(), 4);
    for v in &d {
        assert!((v - d[0]).abs() < 1e-6 * d[0], "{d:?}");
    }
}

#[test]
fn missing_annotation_file_exits_2_with_path() {
    let o = crossroom(&["estimate", "/nonexistent/frame_17.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/nonexistent/frame_17.json"));
}

#[test]
fn malformed_annotation_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("bad.json");
    fs::write(&a, "{\"frame_id\": 3").unwrap();
    assert_eq!(crossroom(&["estimate", path_str(&a)]).status.code(), Some(2));
}

#[test]
fn geometry_error_exits_3_naming_labels() {
    let dir = tempfile::tempdir().unwrap();
    let (mut ann, _) = classroom_annotation();
    ann.points.retain(|p| p.label != PointLabel::TableCorner(3));
    let a = write_json(dir.path(), "frame.json", &ann);
    let o = crossroom(&["estimate", path_str(&a)]);
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    assert!(err.contains("MissingPoints") && err.contains("table_corner_3"), "{err}");
}

fn geometry_file(dir: &std::path::Path) -> std::path::PathBuf {
    let (ann, _) = classroom_annotation();
    let a = write_json(dir, "frame.json", &ann);
    let g = dir.join("geometry.json");
    let o = crossroom(&["estimate", path_str(&a), "--out", path_str(&g)]);
    assert!(o.status.success(), "{}", stderr(&o));
    g
}

#[test]
fn simulate_is_deterministic_and_decodes() {
    let dir = tempfile::tempdir().unwrap();
    let g = geometry_file(dir.path());
    let t = dir.path().join("session.txt");
    fs::write(&t, synthetic_transcript(11, 20.0, 4)).unwrap();
    let mut manifests = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let o = crossroom(&["simulate", "--geometry", path_str(&g), "--transcripts", path_str(&t), "--seed", "5", "--out", path_str(&out)]);
        assert!(o.status.success(), "{}", stderr(&o));
        let summary = stdout(&o);
        assert!(summary.contains("sessions: 1") && summary.contains("overlap realized"), "{summary}");
        manifests.push(fs::read(out.join("manifest.jsonl")).unwrap());
        assert_eq!(
            fs::read(dir.path().join("a").join(wav_name(&manifests[0]))).unwrap(),
            fs::read(out.join(wav_name(&manifests[0]))).unwrap()
        );
    }
    assert_eq!(manifests[0], manifests[1]);

    let manifest = dir.path().join("a/manifest.jsonl");
    let decisions = dir.path().join("decisions.csv");
    let o = crossroom(&["decode", "--manifest", path_str(&manifest), "--out", path_str(&decisions)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let again = crossroom(&["decode", "--manifest", path_str(&manifest)]);
    assert_eq!(stdout(&again), fs::read_to_string(&decisions).unwrap());

    let metrics = dir.path().join("metrics.csv");
    let o = crossroom(&["evaluate", "--decisions", path_str(&decisions), "--out-csv", path_str(&metrics)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(&metrics).unwrap();
    assert!(csv.starts_with("keyword,sensitivity,specificity\n") && csv.contains("\nAverage,"));
}

fn wav_name(manifest: &[u8]) -> String {
    let first = std::str::from_utf8(manifest).unwrap().lines().next().unwrap();
    serde_json::from_str::<serde_json::Value>(first).unwrap()["wav"].as_str().unwrap().to_string()
}

#[test]
fn simulate_names_a_speaker_missing_from_the_geometry() {
    let dir = tempfile::tempdir().unwrap();
    let g = geometry_file(dir.path());
    let t = dir.path().join("session.txt");
    fs::write(&t, "S0: hola\nS9: uno dos\n").unwrap();
    let out = dir.path().join("out");
    let o = crossroom(&["simulate", "--geometry", path_str(&g), "--transcripts", path_str(&t), "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("S9"), "{}", stderr(&o));
}

#[test]
fn evaluate_reproduces_the_published_rows() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("decisions.csv");
    fs::write(&d, write_decisions(&decisions_from(&OURS_CONFUSION)).unwrap()).unwrap();
    let lex = dir.path().join("keywords.tsv");
    fs::write(&lex, KeywordLexicon::spanish_default().to_tsv()).unwrap();
    let json = dir.path().join("metrics.json");
    let o = crossroom(&["evaluate", "--decisions", path_str(&d), "--lexicon", path_str(&lex), "--out-json", path_str(&json)]);
    assert!(o.status.success(), "{}", stderr(&o));

    let rows: BTreeMap<String, (f64, f64)> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            (c[0].to_string(), (c[1].parse().unwrap(), c[2].parse().unwrap()))
        })
        .collect();
    assert_eq!(rows.len(), KEYWORD_ROWS.len() + 1);
    for (k, sens, spec, _, _) in KEYWORD_ROWS {
        let (s, p) = rows[k];
        assert_eq!((round2(s), round2(p)), (sens, spec), "{k}");
    }
    let (avg_s, avg_p) = rows["Average"];
    assert!((avg_s - 0.38).abs() <= 0.005 && (avg_p - 0.92).abs() <= 0.005);
    assert!(fs::read_to_string(&json).unwrap().contains("\"macro_sensitivity\""));
}

#[test]
fn evaluate_rejects_empty_and_malformed_input() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("decisions.csv");
    fs::write(&d, "predicted,true\n").unwrap();
    let o = crossroom(&["evaluate", "--decisions", path_str(&d)]);
    assert_eq!(o.status.code(), Some(2));

    fs::write(&d, "predicted,true\nuno,uno\ndos\n").unwrap();
    let o = crossroom(&["evaluate", "--decisions", path_str(&d)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("row 3"), "{}", stderr(&o));
}

#[test]
fn all_correct_decisions_score_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("decisions.csv");
    fs::write(&d, "uno,uno\nuno,uno\ndos,dos\nOthers,Others\n").unwrap();
    let o = crossroom(&["evaluate", "--decisions", path_str(&d)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("\nuno,1.0000,1.0000\n"), "{out}");
    assert!(out.contains("\ndos,1.0000,1.0000\n"), "{out}");
    // keywords never seen are undefined, not zero
    assert!(out.contains("\ntres,,1.0000\n"), "{out}");
    assert!(out.ends_with("Average,1.0000,1.0000\n"), "{out}");
}
