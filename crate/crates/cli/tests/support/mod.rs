//! Fixtures shared by the CLI and service tests.

#![allow(dead_code)]

#[path = "../../../core/tests/common/mod.rs"]
pub mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::{tripod_camera, Scene};
use crossroom::geometry::Annotation;

pub fn crossroom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crossroom"))
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn classroom_annotation() -> (Annotation, Scene) {
    let scene = Scene::classroom().with_four_speakers();
    (scene.render(&tripod_camera(), "frame_0001"), scene)
}

pub fn write_json<T: serde::Serialize>(dir: &Path, name: &str, v: &T) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}
