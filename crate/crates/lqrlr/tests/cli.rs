// Copyright 2026 The lqrlr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lqrlr::modelfile::ModelFile;
use lqrlr_core::admm::{admm_solve, AdmmConfig};
use serde_json::Value;
use tempfile::TempDir;

const SCALAR: &str = r#"{
  "n": 1, "m": 1, "l": 1,
  "A": [[1.0]], "B1": [[1.0]], "B2": [[1.0]], "Q": [[1.0]], "R": [[1.0]],
  "structure": { "input_groups": [0], "state_groups": [0] }
}"#;

fn lqrlr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lqrlr")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_scalar(dir: &TempDir) -> PathBuf {
    let p = dir.path().join("scalar.json");
    fs::write(&p, SCALAR).unwrap();
    p
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn version_prints_package_version() {
    let o = lqrlr(&["version"]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8(o.stdout).unwrap().trim(), format!("lqrlr {}", env!("CARGO_PKG_VERSION")));
}

#[test]
fn standard_design_of_scalar_model() {
    let dir = TempDir::new().unwrap();
    let model = write_scalar(&dir);
    let out = dir.path().join("out.json");
    let o = lqrlr(&["design", "--model", s(&model), "--variant", "standard", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc = read_json(&out);
    let target = 1.0 + 2f64.sqrt();
    assert!((doc["result"]["J"].as_f64().unwrap() - target).abs() < 1e-8);
    assert!((doc["result"]["K"][0][0].as_f64().unwrap() - target).abs() < 1e-8);
    assert_eq!(doc["result"]["termination"], "converged");
}

#[test]
fn rank_above_dimensions_is_a_validation_error() {
    let dir = TempDir::new().unwrap();
    let model = write_scalar(&dir);
    let out = dir.path().join("out.json");
    let o = lqrlr(&["design", "--model", s(&model), "--variant", "lowrank-hard", "--rank", "2", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error["), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn malformed_matrix_names_the_field() {
    let dir = TempDir::new().unwrap();
    let model = dir.path().join("bad.json");
    fs::write(&model, SCALAR.replace(r#""A": [[1.0]]"#, r#""A": [[1.0, 2.0]]"#)).unwrap();
    let o = lqrlr(&["design", "--model", s(&model), "--variant", "standard", "--out", s(&dir.path().join("o.json"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("A[0]"), "{}", stderr(&o));

    fs::write(&model, SCALAR.replace(r#""n": 1"#, r#""n": 1, "extra": 3"#)).unwrap();
    let o = lqrlr(&["design", "--model", s(&model), "--variant", "standard", "--out", s(&dir.path().join("o.json"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("extra"), "{}", stderr(&o));
}

#[test]
fn missing_model_file_is_an_io_error() {
    let o = lqrlr(&["design", "--model", "/nonexistent/m.json", "--variant", "standard", "--out", "/tmp/x.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn genmodel_shapes_and_reproducibility() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let o = lqrlr(&["genmodel", "--agents", "4", "--seed", "3", "--out", s(p)]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let doc = read_json(&a);
    assert_eq!((doc["n"].as_u64(), doc["m"].as_u64(), doc["l"].as_u64()), (Some(8), Some(4), Some(4)));
    let a_rows = doc["A"].as_array().unwrap();
    for agent in 0..4 {
        let block = |i: usize, j: usize| a_rows[2 * agent + i][2 * agent + j].as_f64().unwrap();
        assert_eq!([block(0, 0), block(0, 1), block(1, 0), block(1, 1)], [1.0, 1.0, 1.0, 3.0]);
    }
    assert_eq!(doc["layout"]["seed"], 3);
}

#[test]
fn genmodel_round_trip_reproduces_design() {
    let dir = TempDir::new().unwrap();
    let model = dir.path().join("m.json");
    assert!(lqrlr(&["genmodel", "--agents", "4", "--seed", "5", "--out", s(&model)]).status.success());
    let out = dir.path().join("d.json");
    let o = lqrlr(&["design", "--model", s(&model), "--variant", "lowrank-hard", "--rank", "1", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let file = ModelFile::load(&model).unwrap();
    let direct = admm_solve(&file.model, &file.structure, &AdmmConfig::lowrank_hard(1)).unwrap();
    let doc = read_json(&out);
    let history = doc["result"]["residual_history"].as_array().unwrap();
    assert_eq!(history.len(), direct.residual_history.len());
    for (row, r) in history.iter().zip(&direct.residual_history) {
        assert_eq!(row[0].as_f64().unwrap().to_bits(), r.primal.to_bits());
        assert_eq!(row[1].as_f64().unwrap().to_bits(), r.dual.to_bits());
    }
    assert_eq!(doc["result"]["J"].as_f64().unwrap().to_bits(), direct.cost.to_bits());
}

fn csv_rows(path: &Path) -> Vec<csv::StringRecord> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|x| x.unwrap()).collect()
}

#[test]
fn noiseless_scenario_two_is_always_stable() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("s2");
    let o = lqrlr(&[
        "scenario", "--id", "2", "--agents", "4", "--trials", "2", "--inner-trials", "5", "--sigma2", "0", "--out", s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&dir.path().join("s2.csv"));
    assert_eq!(rows.len(), 2 * 3);
    for row in &rows {
        assert_eq!(&row[7], "converged");
        assert_eq!(&row[19], "5", "{row:?}");
    }
    let doc = read_json(&dir.path().join("s2.json"));
    for agg in doc["aggregates"].as_array().unwrap() {
        assert_eq!(agg["success_probability"].as_f64(), Some(1.0));
    }
}

#[test]
fn scenario_output_is_reproducible_and_replayable() {
    let dir = TempDir::new().unwrap();
    let args = |out: &Path| {
        lqrlr(&["scenario", "--id", "1", "--agents", "4..5", "--trials", "2", "--seed", "9", "--out", s(out)])
    };
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b"));
    assert!(args(&a).status.success());
    assert!(args(&b).status.success());
    let first = fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(first, fs::read(dir.path().join("b.csv")).unwrap());

    let rows = csv_rows(&dir.path().join("a.csv"));
    for family in ["standard", "lowrank", "sparse"] {
        for n in ["4", "5"] {
            assert_eq!(rows.iter().filter(|r| &r[6] == family && &r[1] == n).count(), 2, "{family} N={n}");
        }
    }

    let replay = dir.path().join("r");
    let o = lqrlr(&["scenario", "--replay", s(&dir.path().join("a.json")), "--out", s(&replay)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(first, fs::read(dir.path().join("r.csv")).unwrap());
}

#[test]
fn invalid_scenario_arguments_exit_two() {
    let o = lqrlr(&["scenario", "--id", "7", "--out", "/tmp/never"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let o = lqrlr(&["scenario", "--id", "2", "--sigma2", "-1", "--agents", "4", "--out", "/tmp/never"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}
