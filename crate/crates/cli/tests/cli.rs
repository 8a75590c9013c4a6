use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn fgf(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fgf"))
        .args(args)
        .current_dir(dir)
        .env_remove("FGF_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn word_arithmetic() {
    let d = TempDir::new().unwrap();
    let o = fgf(d.path(), &["reduce", "x1 x2 x2- x1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "x1 x1\n");
    assert_eq!(stdout(&fgf(d.path(), &["multiply", "x1 x2", "x2- x3", "e"])), "x1 x3\n");
    assert_eq!(stdout(&fgf(d.path(), &["invert-word", "x1 x2-"])), "x2 x1-\n");
    assert_eq!(stdout(&fgf(d.path(), &["root", "x2 x1 x2 x1 x2 x1"])), "root: x2 x1\nexponent: 3\n");
}

#[test]
fn bad_input_is_a_usage_error() {
    let d = TempDir::new().unwrap();
    assert_eq!(fgf(d.path(), &["reduce", "x0"]).status.code(), Some(2));
    assert_eq!(fgf(d.path(), &["reduce", "x3", "--rank", "2"]).status.code(), Some(2));
    assert_eq!(fgf(d.path(), &["no-such-command"]).status.code(), Some(2));
    assert_eq!(fgf(d.path(), &["verify", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(fgf(d.path(), &["apply", "--auto", "missing.map", "x1"]).status.code(), Some(2));
}

#[test]
fn automorphism_files() {
    let d = TempDir::new().unwrap();
    let tau = write(&d, "tau_a.map", "x1 -> x2 x1 x2-\nx2 -> x2\n");
    let o = fgf(d.path(), &["is-inner", "--auto", &tau]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "x2\n");

    let swap = write(&d, "swap.map", "x1 -> x2\nx2 -> x1\n");
    let o = fgf(d.path(), &["is-inner", "--auto", &swap]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&fgf(d.path(), &["order", &swap])), "2\n");
    assert_eq!(fgf(d.path(), &["order", &tau]).status.code(), Some(1));

    assert_eq!(stdout(&fgf(d.path(), &["apply", "--auto", &tau, "x1 x2"])), "x2 x1\n");
    assert_eq!(stdout(&fgf(d.path(), &["compose", &swap, &swap])), "x1 -> x1\nx2 -> x2\n");

    let t = write(&d, "t.map", "x1 -> x1 x2\nx2 -> x2\n");
    assert_eq!(stdout(&fgf(d.path(), &["invert-auto", &t])), "x1 -> x1 x2-\nx2 -> x2\n");
    let sq = write(&d, "sq.map", "x1 -> x1 x1\nx2 -> x2\n");
    assert_eq!(fgf(d.path(), &["invert-auto", &sq]).status.code(), Some(1));
}

#[test]
fn primitivity() {
    let d = TempDir::new().unwrap();
    assert_eq!(fgf(d.path(), &["is-primitive", "x1 x2 x1 x1"]).status.code(), Some(0));
    assert_eq!(fgf(d.path(), &["is-primitive", "x1 x2 x1- x2-"]).status.code(), Some(1));

    let o = fgf(d.path(), &["minimize", "x1 x2 x1 x1"]);
    let out = stdout(&o);
    let (min, map) = out.split_once('\n').unwrap();
    assert_eq!(min.split_whitespace().count(), 1);
    let witness = write(&d, "w.map", map);
    assert_eq!(stdout(&fgf(d.path(), &["apply", "--auto", &witness, "x1 x2 x1 x1"])), format!("{min}\n"));

    let o = fgf(d.path(), &["two-primitives", "x1 x2 x1-", "--rank", "3"]);
    let ps: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(ps.len(), 2);
    for p in &ps {
        assert_eq!(fgf(d.path(), &["is-primitive", p, "--rank", "3"]).status.code(), Some(0), "{p}");
    }
    let prod = fgf(d.path(), &["multiply", &ps[0], &ps[1], "--rank", "3"]);
    assert_eq!(stdout(&prod), "x1 x2 x1-\n");
    assert_eq!(fgf(d.path(), &["two-primitives", "x1 x2"]).status.code(), Some(1));
}

#[test]
fn canonical_forms() {
    let d = TempDir::new().unwrap();
    let a = write(&d, "a.cd", "U: x2\nZ:\nblocks: [x1 | x3]\n");
    let b = write(&d, "b.cd", "U: x3\nZ:\nblocks: [x2 | x1]\n");
    let c = write(&d, "c.cd", "U:\nZ: (x1 x2)\nblocks: [x3 |]\n");
    assert_eq!(stdout(&fgf(d.path(), &["classify", &a])), "fixed_rank=1 z_count=0 block_sizes=[2]\nsoft\n");
    assert_eq!(stdout(&fgf(d.path(), &["realize", &a])), "x1 -> x1-\nx2 -> x2\nx3 -> x1 x3 x1-\n");

    let o = fgf(d.path(), &["conjugator", &a, &b]);
    assert_eq!(o.status.code(), Some(0));
    let s = write(&d, "s.map", &stdout(&o));
    let s_inv = write(&d, "s_inv.map", &stdout(&fgf(d.path(), &["invert-auto", &s])));
    let phi = write(&d, "phi.map", &stdout(&fgf(d.path(), &["realize", &a])));
    let psi = stdout(&fgf(d.path(), &["realize", &b]));
    let phi_s = write(&d, "phi_s.map", &stdout(&fgf(d.path(), &["compose", &phi, &s])));
    assert_eq!(stdout(&fgf(d.path(), &["compose", &s_inv, &phi_s])), psi);
    assert_eq!(fgf(d.path(), &["conjugator", &a, &c]).status.code(), Some(1));

    let o = fgf(d.path(), &["decompose-inverted", &a, "x2 x1 x2-"]);
    assert_eq!(stdout(&o), "block x1\nw: x2\n");
    assert_eq!(fgf(d.path(), &["decompose-inverted", &a, "x2"]).status.code(), Some(1));
}

#[test]
fn squares_and_snakes() {
    let d = TempDir::new().unwrap();
    let bead = write(&d, "bead.cd", "U:\nZ:\nblocks: [x1 | x2] [x3 | x4]\n");
    let snake = write(&d, "snake.cd", "U:\nZ:\nblocks: [x1 | x2]\n");
    let r = write(&d, "r.map", &stdout(&fgf(d.path(), &["sqrt-bead", &bead])));
    let r2 = stdout(&fgf(d.path(), &["compose", &r, &r]));
    assert_eq!(r2, stdout(&fgf(d.path(), &["realize", &bead])));
    let o = fgf(d.path(), &["snake-cert", &snake]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("m^2 = -1"));
    assert_eq!(fgf(d.path(), &["sqrt-bead", &snake]).status.code(), Some(1));
}

#[test]
fn subgroups() {
    let d = TempDir::new().unwrap();
    let o = fgf(d.path(), &["member", "x1 x2 x2 x1", "x1 x2", "x2 x1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fgf(d.path(), &["member", "x1", "x1 x2", "x2 x1"]).status.code(), Some(1));
    assert_eq!(stdout(&fgf(d.path(), &["rank", "x1 x1", "x1 x1 x1"])), "1\n");
    assert!(stdout(&fgf(d.path(), &["graph", "x1", "x2"])).starts_with("vertices: 1\nedges: 2\nrank: 2\n"));
    assert_eq!(stdout(&fgf(d.path(), &["dump-graph", "x1 x1"])), "0* --x1--> 1\n1 --x1--> 0*\n");
    let o = fgf(d.path(), &["intersect", "x3, x1", "x3, x2", "--rank", "3"]);
    assert_eq!(stdout(&o), "rank: 1\nbasis:\nx3\n");
}

#[test]
fn free_factors_and_extraction() {
    let d = TempDir::new().unwrap();
    let a = write(&d, "A.cd", "U: x1 x2 x3\nZ:\nblocks: [x4 |]\n");
    let b = write(&d, "B.cd", "U: x1\nZ: (x2 x3)\nblocks: [x4 |]\n");
    let c = write(&d, "C.cd", "U: x2 x3\nZ:\nblocks: [x1 | x4]\n");
    let c2 = write(&d, "C2.cd", "U: x3\nZ:\nblocks: [x1 | x2] [x4 |]\n");
    assert_eq!(fgf(d.path(), &["factor-rel", &a, &b, &c]).status.code(), Some(0));
    assert_eq!(fgf(d.path(), &["factor-rel", &a, &b, &c2]).status.code(), Some(1));

    let o = fgf(d.path(), &["extract-basis", "--rank", "8"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 4);
    for p in ["a", "b", "c", "d", "e", "f", "g"] {
        let o = fgf(d.path(), &["extract-basis", "--rank", "8", "--violate", p]);
        assert_eq!(o.status.code(), Some(1), "{p}");
        assert!(stdout(&o).contains(&format!("property ({p})")), "{p}: {}", stdout(&o));
    }
}

#[test]
fn encode_and_decode() {
    let d = TempDir::new().unwrap();
    let o = fgf(d.path(), &["encode-fn", "--m", "3", "--table", "2,3,1"]);
    assert_eq!(o.status.code(), Some(0));
    let sigma = write(&d, "sigma.map", &stdout(&o));
    assert_eq!(stdout(&fgf(d.path(), &["decode-fn", "--m", "3", "--auto", &sigma])), "2,3,1\n");
    let id = write(&d, "id.map", "x1 -> x1\nx2 -> x2\nx3 -> x3\nx4 -> x4 x1\nx5 -> x5\nx6 -> x6 x3\n");
    assert_eq!(fgf(d.path(), &["decode-fn", "--m", "3", "--auto", &id]).status.code(), Some(1));
    assert_eq!(fgf(d.path(), &["encode-fn", "--m", "3", "--table", "2,4,1"]).status.code(), Some(2));
}

#[test]
fn verify_writes_a_deterministic_report() {
    let d = TempDir::new().unwrap();
    let args = ["verify", "anti-commutativity", "--rank", "2", "--samples", "500", "--seed", "7", "--report", "r.json"];
    let first = fgf(d.path(), &args);
    assert_eq!(first.status.code(), Some(0), "{}", stdout(&first));
    assert!(stdout(&first).starts_with("PASS anti-commutativity"));
    let report = std::fs::read_to_string(d.path().join("r.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["suites"][0]["config"]["seed"], 7);
    assert_eq!(v["suites"][0]["config"]["min_instances"], 1000);

    let second = fgf(d.path(), &args);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(report, std::fs::read_to_string(d.path().join("r.json")).unwrap());
}

#[test]
fn seed_precedence() {
    let d = TempDir::new().unwrap();
    std::fs::write(d.path().join("fgf.toml"), "seed = 11\nreport = \"from-file.json\"\n").unwrap();
    let seed_of = |path: &str| {
        let v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(d.path().join(path)).unwrap()).unwrap();
        v["suites"][0]["config"]["seed"].as_u64().unwrap()
    };

    let o = fgf(d.path(), &["verify", "encode-decode", "--config", "fgf.toml"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(seed_of("from-file.json"), 11);

    let o = Command::new(env!("CARGO_BIN_EXE_fgf"))
        .args(["verify", "encode-decode", "--config", "fgf.toml"])
        .current_dir(d.path())
        .env("FGF_SEED", "12")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(seed_of("from-file.json"), 12);

    let o =
        fgf(d.path(), &["verify", "encode-decode", "--config", "fgf.toml", "--seed", "13", "--report", "flag.json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(seed_of("flag.json"), 13);

    std::fs::write(d.path().join("bad.toml"), "samples = 0\n").unwrap();
    assert_eq!(fgf(d.path(), &["verify", "encode-decode", "--config", "bad.toml"]).status.code(), Some(2));
}

#[test]
fn verify_all_aggregates() {
    let d = TempDir::new().unwrap();
    let o = fgf(d.path(), &["verify", "all", "--samples", "3", "--len", "3", "--report", "all.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("13/13 suites passed"));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.path().join("all.json")).unwrap()).unwrap();
    assert_eq!(v["suites"].as_array().unwrap().len(), 13);
}

#[test]
fn help_texts_exist() {
    let d = TempDir::new().unwrap();
    for cmd in ["reduce", "minimize", "snake-cert", "extract-basis", "verify"] {
        let o = fgf(d.path(), &[cmd, "--help"]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).contains("Usage: fgf"), "{cmd}");
    }
}
