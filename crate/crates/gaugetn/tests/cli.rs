use std::path::Path;
use std::process::Command;

use gaugetn::record::{PointStatus, ResultRecord, CSV_COLUMNS};
use gaugetn::SCHEMA_VERSION;

fn gaugetn() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_gaugetn"));
    c.env_remove("GAUGETN_OUTPUT_DIR");
    c
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const SCAN: &str = r#"
model = "compact_qed"
lattice = [6]
m = 0.5
g = 2.0
ansatz = "exact"
seed = 4
[scan]
separations = [1, 2, 3, 5]
[output]
stem = "scan"
formats = ["json", "csv"]
"#;

#[test]
fn scan_emits_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "scan.toml", SCAN);
    let out = gaugetn()
        .arg("scan")
        .arg(&cfg)
        .arg("--output-dir")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let text = std::fs::read_to_string(dir.path().join("scan.json")).unwrap();
    let rec = ResultRecord::from_json(&text).unwrap();
    assert_eq!(rec.schema, SCHEMA_VERSION);
    assert_eq!(rec.to_json().unwrap(), text);
    let scan = rec.scan.as_ref().unwrap();
    let rs: Vec<usize> = scan.points.iter().map(|p| p.r).collect();
    assert_eq!(rs, [1, 2, 3, 5]);
    assert_eq!(scan.points[1].status, PointStatus::InvalidPlacement);

    let mut csv = csv::Reader::from_path(dir.path().join("scan.csv")).unwrap();
    assert_eq!(csv.headers().unwrap().iter().collect::<Vec<_>>(), CSV_COLUMNS);
    assert_eq!(csv.records().count(), scan.ok_points().count());
}

#[test]
fn empty_scan_is_vacuum_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "e.toml", &SCAN.replace("[1, 2, 3, 5]", "[]"));
    let out = gaugetn().arg("scan").arg(&cfg).env("GAUGETN_OUTPUT_DIR", dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let rec = ResultRecord::from_json(&std::fs::read_to_string(dir.path().join("scan.json")).unwrap()).unwrap();
    assert!(rec.ground.is_some());
    let scan = rec.scan.unwrap();
    assert!(scan.points.is_empty());
    assert!(scan.fits.linear.is_none());
    let csv = csv::Reader::from_path(dir.path().join("scan.csv")).unwrap().into_records().count();
    assert_eq!(csv, 0);
}

#[test]
fn invalid_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in [
        ("noseed.toml", SCAN.replace("seed = 4", "")),
        ("chi.toml", SCAN.replace("seed = 4", "seed = 4\nchi = 0")),
        ("typo.toml", SCAN.replace("ansatz", "ansats")),
    ] {
        let cfg = write(dir.path(), name, &text);
        let out = gaugetn().arg("ground").arg(&cfg).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{name}");
    }
    let cfg = write(dir.path(), "ok.toml", SCAN);
    let out = gaugetn().args(["validate-config"]).arg(&cfg).args(["--g", "-1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = gaugetn().args(["validate-config"]).arg(&cfg).args(["--seed", "17"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"seed\": 17"));
}

#[test]
fn oversized_exact_sector_exits_3_with_record() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("oracle_cap = 2\n{SCAN}");
    let cfg = write(dir.path(), "cap.toml", &text);
    let out = gaugetn().arg("ground").arg(&cfg).arg("--output-dir").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let rec = ResultRecord::from_json(&std::fs::read_to_string(dir.path().join("scan.json")).unwrap()).unwrap();
    assert!(rec.ground.is_none() && !rec.errors.is_empty());
}

#[test]
fn json_config_echo_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "g.toml", &SCAN.replace("exact", "mps"));
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let run = |c: &Path, out: &Path| {
        let s = gaugetn().arg("ground").arg(c).arg("--output-dir").arg(out).status().unwrap();
        assert_eq!(s.code(), Some(0));
        std::fs::read_to_string(out.join("scan.json")).unwrap()
    };
    let first = run(&cfg, &a);
    let rec = ResultRecord::from_json(&first).unwrap();
    let mut echo = rec.config.clone();
    echo.output.dir = None;
    let echo_path = write(dir.path(), "echo.json", &serde_json::to_string(&echo).unwrap());
    let second = run(&echo_path, &b);
    let strip = |s: &str| {
        let mut r = ResultRecord::from_json(s).unwrap();
        r.config.output.dir = None;
        r.to_json().unwrap()
    };
    assert_eq!(strip(&first), strip(&second));
}

#[test]
fn table_and_sector_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "t.toml", SCAN);
    let t = dir.path().join("tables.json");
    let s = dir.path().join("sector.json");
    assert!(gaugetn().arg("dump-tables").arg(&cfg).arg("-o").arg(&t).status().unwrap().success());
    assert!(gaugetn().arg("dump-sector").arg(&cfg).arg("-o").arg(&s).status().unwrap().success());
    let tables: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(t).unwrap()).unwrap();
    assert_eq!(tables["schema"], "gaugetn.tables/1");
    assert_eq!(tables["sites"].as_array().unwrap().len(), 6);
    let sector: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(s).unwrap()).unwrap();
    assert_eq!(sector["schema"], "gaugetn.sector/1");
    assert_eq!(sector["configs"].as_array().unwrap().len(), sector["dim"].as_u64().unwrap() as usize);
}

/// Checks object keys and scalar types of `v` against the documented schema.
fn conforms(v: &serde_json::Value, s: &serde_json::Value, root: &serde_json::Value, at: &str) {
    use serde_json::Value;
    if let Some(r) = s.get("$ref").and_then(Value::as_str) {
        let name = r.trim_start_matches("#/$defs/");
        return conforms(v, &root["$defs"][name], root, at);
    }
    if let Some(alts) = s.get("oneOf").and_then(Value::as_array) {
        let pick = if v.is_null() { &alts[0] } else { &alts[1] };
        return conforms(v, pick, root, at);
    }
    if let Some(c) = s.get("const") {
        assert_eq!(v, c, "{at}");
    }
    if let Some(e) = s.get("enum").and_then(Value::as_array) {
        assert!(e.contains(v), "{at}: {v} not in {e:?}");
    }
    let types: Vec<&str> = match s.get("type") {
        Some(Value::String(t)) => vec![t.as_str()],
        Some(Value::Array(ts)) => ts.iter().filter_map(Value::as_str).collect(),
        _ => Vec::new(),
    };
    if !types.is_empty() {
        let ok = types.iter().any(|t| match *t {
            "null" => v.is_null(),
            "object" => v.is_object(),
            "array" => v.is_array(),
            "string" => v.is_string(),
            "boolean" => v.is_boolean(),
            "integer" => v.is_u64() || v.is_i64(),
            "number" => v.is_number(),
            _ => false,
        });
        assert!(ok, "{at}: {v} is not {types:?}");
    }
    if let (Some(obj), Some(props)) = (v.as_object(), s.get("properties").and_then(Value::as_object)) {
        for req in s["required"].as_array().into_iter().flatten() {
            assert!(obj.contains_key(req.as_str().unwrap()), "{at}: missing {req}");
        }
        for (k, x) in obj {
            let sub = props.get(k).unwrap_or_else(|| panic!("{at}: undocumented key {k}"));
            conforms(x, sub, root, &format!("{at}.{k}"));
        }
    }
    if let (Some(items), Some(arr)) = (s.get("items"), v.as_array()) {
        for (i, x) in arr.iter().enumerate() {
            conforms(x, items, root, &format!("{at}[{i}]"));
        }
    }
}

#[test]
fn records_follow_documented_schema() {
    let schema: serde_json::Value =
        serde_json::from_str(include_str!("../../../docs/result-schema.json")).unwrap();
    assert_eq!(schema["$id"], SCHEMA_VERSION);
    let dir = tempfile::tempdir().unwrap();
    let text = SCAN.replace("[scan]", "link_penalty = 40.0\n[scan]\npin_strength = 500.0");
    let cfg = write(dir.path(), "s.toml", &text);
    let out = gaugetn().arg("scan").arg(&cfg).arg("--output-dir").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let rec: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("scan.json")).unwrap()).unwrap();
    conforms(&rec, &schema, &schema, "$");

    let plaq = write(dir.path(), "p.toml", &SCAN.replace("lattice = [6]", "lattice = [2, 2]").replace("[1, 2, 3, 5]", "[1]"));
    let out = gaugetn().arg("scan").arg(&plaq).arg("--output-dir").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rec: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("scan.json")).unwrap()).unwrap();
    assert!(!rec["ground"]["observables"]["plaquettes"].as_array().unwrap().is_empty());
    conforms(&rec, &schema, &schema, "$");
}

#[test]
fn shipped_configs_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let out = gaugetn().arg("validate-config").arg(&path).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", path.display());
        n += 1;
    }
    assert!(n >= 2);
}
