use std::process::Command as Process;

use infolab::cli::{ingest, run_command, write_outputs, Command, RunConfig};
use infolab::dynamics::transfer_entropy;
use infolab::synth::{generate, Gate, GeneratorSpec, Mode};

fn xor_spec() -> GeneratorSpec {
    GeneratorSpec::Gate { gate: Gate::Xor, mode: Mode::Dynamic }
}

#[test]
fn generated_csv_measures_like_memory() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("xor.csv");
    let mut cfg = RunConfig::new(Command::Generate);
    cfg.generator = Some(xor_spec());
    cfg.length = 2000;
    cfg.seed = Some(17);
    cfg.output = Some(csv.clone());
    write_outputs(&run_command(&cfg).unwrap()).unwrap();

    let memory = generate(&xor_spec(), 2000, 17).unwrap().series;
    let loaded = ingest(&csv, true).unwrap();
    assert_eq!(loaded.discrete().unwrap().columns(), memory.discrete().unwrap().columns());

    let mut te = RunConfig::new(Command::Te);
    te.input = Some(csv);
    te.discrete = true;
    te.columns = vec![vec!["x".into(), "y".into()], vec!["z".into()]];
    let out = run_command(&te).unwrap().output;
    let direct = transfer_entropy(memory.discrete().unwrap(), 0, 2, 1, 1).unwrap();
    let joint = infolab::dynamics::conditional_transfer_entropy(memory.discrete().unwrap(), &[0, 1], 2, &[], 1, 1, 1).unwrap();
    assert_eq!(out.value("transfer_entropy").unwrap().to_bits(), joint.expected.to_bits());
    assert!(direct.expected < 0.01 && joint.expected > 0.99);
}

fn infolab(args: &[&str]) -> std::process::Output {
    Process::new(env!("CARGO_BIN_EXE_infolab")).args(args).output().unwrap()
}

#[test]
fn binary_reports_errors_and_embeds_config() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("d.csv");
    let json = dir.path().join("r.json");
    let spec = r#"{"kind":"gate","gate":"and","mode":"static"}"#;
    let gen = infolab(&["generate", "--spec", spec, "--length", "500", "--seed", "3", "--output", csv.to_str().unwrap()]);
    assert!(gen.status.success(), "{}", String::from_utf8_lossy(&gen.stderr));

    let bad = infolab(&["mi", "--input", csv.to_str().unwrap(), "--discrete", "--columns", "x1;nope"]);
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).starts_with("error:"));

    let args = ["mi", "--input", csv.to_str().unwrap(), "--discrete", "--columns", "x1,x2;y", "--surrogates", "19", "--seed", "8", "--output", json.to_str().unwrap()];
    assert!(infolab(&args).status.success());
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(doc["seed"], 8);
    assert_eq!(doc["config"]["seed"], 8);
    assert_eq!(doc["config"]["surrogates"], 19);
    let first = doc["values"].clone();

    assert!(infolab(&args).status.success());
    let again: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(again["values"], first);
    assert_eq!(again["significance"], doc["significance"]);
}
