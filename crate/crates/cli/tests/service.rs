mod support;

use std::fs;
use std::path::Path;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use base64::Engine as _;
use crossroom::geometry::json::GeometryJson;
use crossroom::geometry::{Annotation, PointLabel};
use crossroom_cli::server::{router, ServiceConfig};
use http_body_util::BodyExt;
use serde_json::Value;
use support::{classroom_annotation, crossroom, path_str, stderr, write_json};
use tower::ServiceExt;

fn app(root: &Path) -> Router {
    let frames = root.join("frames");
    fs::create_dir_all(&frames).unwrap();
    router(ServiceConfig {
        annotations_dir: root.join("annotations"),
        frames_dir: frames,
        static_dir: Some(root.join("static")),
    })
}

async fn call(app: &Router, method: &str, uri: &str, body: Vec<u8>) -> (StatusCode, Vec<u8>) {
    let req = Request::builder().method(method).uri(uri).body(Body::from(body)).unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    (status, res.into_body().collect().await.unwrap().to_bytes().to_vec())
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).unwrap()
}

#[tokio::test]
async fn healthz() {
    let dir = tempfile::tempdir().unwrap();
    let (status, body) = call(&app(dir.path()), "GET", "/healthz", Vec::new()).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, b"ok");
}

#[tokio::test]
async fn estimate_matches_the_cli_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let (ann, _) = classroom_annotation();
    let a = write_json(dir.path(), "frame.json", &ann);
    let app = app(dir.path());
    for baseline in [false, true] {
        let out = dir.path().join(format!("cli_{baseline}.json"));
        let mut args = vec!["estimate", path_str(&a), "--out", path_str(&out)];
        if baseline {
            args.push("--baseline");
        }
        let o = crossroom(&args);
        assert!(o.status.success(), "{}", stderr(&o));

        let uri = if baseline { "/api/estimate?baseline=true" } else { "/api/estimate" };
        let (status, body) = call(&app, "POST", uri, fs::read(&a).unwrap()).await;
        assert_eq!(status, StatusCode::OK, "{}", String::from_utf8_lossy(&body));
        let v = json(&body);
        let served: GeometryJson = serde_json::from_value(v["geometry"].clone()).unwrap();
        assert_eq!(served.to_text(), fs::read_to_string(&out).unwrap());

        let diag = &v["diagnostics"];
        assert_eq!(diag["method"], if baseline { "baseline" } else { "cross_ratio" });
        assert!(!diag["table"]["lines"].as_array().unwrap().is_empty());
        assert!(!diag["table"]["cross_ratios"].as_array().unwrap().is_empty());
    }
}

#[tokio::test]
async fn missing_table_corner_is_a_400_with_labels() {
    let dir = tempfile::tempdir().unwrap();
    let (mut ann, _) = classroom_annotation();
    ann.points.retain(|p| p.label != PointLabel::TableCorner(1));
    let (status, body) = call(&app(dir.path()), "POST", "/api/estimate", serde_json::to_vec(&ann).unwrap()).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let v = json(&body);
    assert_eq!(v["error"]["code"], "MissingPoints");
    assert_eq!(v["error"]["labels"], serde_json::json!(["table_corner_1"]));
}

#[tokio::test]
async fn malformed_body_is_a_400() {
    let dir = tempfile::tempdir().unwrap();
    let (status, body) = call(&app(dir.path()), "POST", "/api/estimate", b"{\"frame_id\":".to_vec()).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(json(&body)["error"]["code"], "InvalidAnnotation");
}

#[tokio::test]
async fn frames_are_listed_with_their_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let frames = dir.path().join("frames");
    fs::write(frames.join("b_0002.jpg"), [0xff, 0xd8, 0xff, 1, 2]).unwrap();
    fs::write(frames.join("a_0001.png"), [0x89, b'P', b'N', b'G']).unwrap();
    fs::write(frames.join("notes.txt"), "not a frame").unwrap();

    let (status, body) = call(&app, "GET", "/api/frames", Vec::new()).await;
    assert_eq!(status, StatusCode::OK);
    let v = json(&body);
    let list = v["frames"].as_array().unwrap();
    let ids: Vec<&str> = list.iter().map(|f| f["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["a_0001", "b_0002"]);
    let png = base64::engine::general_purpose::STANDARD
        .decode(list[0]["image_base64"].as_str().unwrap())
        .unwrap();
    assert_eq!(png, [0x89, b'P', b'N', b'G']);
    assert_eq!(list[1]["content_type"], "image/jpeg");

    let (status, body) = call(&app, "GET", "/api/frames/b_0002", Vec::new()).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, [0xff, 0xd8, 0xff, 1, 2]);

    let (status, body) = call(&app, "GET", "/api/frames/zzz", Vec::new()).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(json(&body)["error"]["code"], "UnknownFrame");
    let (status, _) = call(&app, "GET", "/api/frames/..%2Fsecret", Vec::new()).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn annotations_persist_and_last_write_wins() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let (mut ann, _) = classroom_annotation();
    let (status, _) = call(&app, "POST", "/api/annotations", serde_json::to_vec(&ann).unwrap()).await;
    assert_eq!(status, StatusCode::OK);

    ann.keyboard_width = 18.0;
    let mut writes = Vec::new();
    for _ in 0..8 {
        let app = app.clone();
        let body = serde_json::to_vec(&ann).unwrap();
        writes.push(tokio::spawn(async move { call(&app, "POST", "/api/annotations", body).await.0 }));
    }
    for w in writes {
        assert_eq!(w.await.unwrap(), StatusCode::OK);
    }
    let path = dir.path().join("annotations").join("frame_0001.json");
    let stored = Annotation::from_json(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(stored, ann);
    let leftovers: Vec<_> = fs::read_dir(dir.path().join("annotations")).unwrap().collect();
    assert_eq!(leftovers.len(), 1);

    let (status, body) = call(&app, "GET", "/api/annotations/frame_0001", Vec::new()).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(Annotation::from_json(std::str::from_utf8(&body).unwrap()).unwrap(), ann);

    ann.frame_id = "../escape".into();
    let (status, body) = call(&app, "POST", "/api/annotations", serde_json::to_vec(&ann).unwrap()).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(json(&body)["error"]["code"], "InvalidFrameId");
}

#[tokio::test]
async fn static_assets_are_served() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    fs::create_dir_all(dir.path().join("static")).unwrap();
    fs::write(dir.path().join("static/index.html"), "<!doctype html><title>annotate</title>").unwrap();
    let (status, body) = call(&app, "GET", "/", Vec::new()).await;
    assert_eq!(status, StatusCode::OK);
    assert!(String::from_utf8(body).unwrap().contains("annotate"));
    let (status, _) = call(&app, "GET", "/missing.js", Vec::new()).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}
