use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn gembed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gembed")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let o = gembed(&all);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)));
    (code(&o), v)
}

#[test]
fn contracting_check_emits_certificate() {
    let (c, v) = json(&["check", "--theory", &fixture("blind.trs"), "--property", "contracting"]);
    assert_eq!(c, 0);
    assert_eq!(v["verdict"], "yes");
    assert_eq!(v["certificate"]["contracting"], true);
    assert_eq!(v["certificate"]["rules"].as_array().unwrap().len(), 3);
    assert_eq!(v["config"]["normalize_budget"], 10_000);
}

#[test]
fn malleable_encryption_is_graph_embedded_but_not_contracting() {
    let mal = fixture("mal.trs");
    assert_eq!(code(&gembed(&["check", "--theory", &mal, "--property", "graph-embedded"])), 0);
    assert_eq!(code(&gembed(&["check", "--theory", &mal, "--property", "contracting"])), 1);
    assert_eq!(code(&gembed(&["check", "--theory", &mal, "--property", "hom-embedded"])), 1);
}

#[test]
fn every_property_runs_on_blind_signatures() {
    for p in ["graph-embedded", "hom-embedded", "convergent", "contracting", "strictly-contracting", "fvp-sufficient", "layered"] {
        let o = gembed(&["check", "--theory", "blind", "--property", p]);
        assert_eq!(code(&o), 0, "{p}: {}", String::from_utf8_lossy(&o.stdout));
    }
    assert_eq!(code(&gembed(&["check", "--theory", "blind", "--property", "subterm"])), 1);
}

#[test]
fn static_equivalence_witness() {
    let (c, v) = json(&[
        "static-equiv",
        "--theory",
        &fixture("encdec.trs"),
        "--frame1",
        &fixture("phi_prime.frame"),
        "--frame2",
        &fixture("psi_prime.frame"),
    ]);
    assert_eq!(c, 1);
    assert_eq!(v["witness"], "dec(v,w) = a");
    assert_eq!(v["saturation"].as_array().unwrap().len(), 2);
    let same = gembed(&["static-equiv", "--theory", "encdec", "--frame1", &fixture("phi.frame"), "--frame2", &fixture("psi.frame")]);
    assert_eq!(code(&same), 0);
}

#[test]
fn deduction_and_recipes() {
    let (c, v) = json(&["deduce", "--theory", "encdec", "--frame", &fixture("phi_prime.frame"), "--term", "n"]);
    assert_eq!(c, 0);
    assert_eq!(v["recipe"], "w");
    assert!(v["saturation"]["entries"].as_array().is_some());
    let (c, _) = json(&["deduce", "--theory", "encdec", "--frame", &fixture("phi.frame"), "--term", "n"]);
    assert_eq!(c, 1);
}

#[test]
fn force_is_needed_outside_the_class() {
    let args = ["deduce", "--theory", "mal", "--frame", "phi", "--term", "a"];
    let (c, v) = json(&args);
    assert_eq!(c, 2);
    assert!(v["precondition"].as_str().unwrap().contains("not contracting"));
    let mut forced = args.to_vec();
    forced.push("--force");
    let (c, v) = json(&forced);
    assert_eq!(c, 2);
    assert_eq!(v["verdict"], "deducible");
    assert!(v["heuristic"].is_string());
}

#[test]
fn cap_problem() {
    let (c, v) = json(&["cap", "--theory", "encdec", "--secret", "m", "--terms", &fixture("cap_terms.txt")]);
    assert_eq!(c, 0);
    assert_eq!(v["cap"], "dec(x1,k)");
}

#[test]
fn permutative_deduction_and_combination() {
    let dir = tempfile::tempdir().unwrap();
    let frame = dir.path().join("w.frame");
    std::fs::write(&frame, "frame w\nrestricted n\nw = plus(n,a)\n").unwrap();
    let comm = fixture("comm.eqs");
    let f = frame.to_str().unwrap();
    let (c, v) = json(&["deduce-permutative", "--axioms", &comm, "--frame", f, "--term", "plus(a,n)"]);
    assert_eq!((c, v["recipe"].as_str()), (0, Some("w")));
    assert_eq!(code(&gembed(&["deduce-permutative", "--axioms", &comm, "--frame", f, "--term", "n"])), 1);
    let (c, v) = json(&["combine-check", "--theory1", "blind", "--axioms", &fixture("keyexch.eqs")]);
    assert_eq!(c, 0);
    assert_eq!(v["report"]["kind"], "axioms");
}

#[test]
fn forward_closure_verdicts() {
    assert_eq!(code(&gembed(&["forward-closure", "--theory", "blind"])), 0);
    let (c, v) = json(&["forward-closure", "--theory", "add", "--bound", "5"]);
    assert_eq!(c, 2);
    assert_eq!(v["config"]["extra"]["bound"], 5);
}

#[test]
fn mpcp_generation_replays() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (c, v) = json(&["gen-mpcp", "--pairs", "ba:baa,ab:ba,aaa:aa", "--alpha0", "aa", "--beta0", "a", "-o", out, "--solve", "4"]);
    assert_eq!(c, 0);
    assert_eq!(v["target"], "f(c,d,c,unlocked(e))");
    assert_eq!(v["recipe"], "f(b(a(a(x))),g1(g3(d)),b(a(a(a(y)))),z)");
    let trs = dir.path().join("mpcp.trs");
    let start = "f(b(a(a(a(a(c))))),g1(g3(d)),b(a(a(a(a(c))))),locked(unlocked(e)))";
    let (c, v) = json(&["normalize", "--theory", trs.to_str().unwrap(), "--term", start]);
    assert_eq!(c, 0);
    assert_eq!(v["normal_form"], "f(c,d,c,unlocked(e))");
    assert_eq!(v["trace"]["steps"][0]["rule"], 3);
    assert_eq!(code(&gembed(&["check", "--theory", trs.to_str().unwrap(), "--property", "graph-embedded"])), 0);
    assert_eq!(code(&gembed(&["check", "--theory", trs.to_str().unwrap(), "--property", "contracting"])), 1);
}

#[test]
fn gemb_witness() {
    let (c, v) = json(&["gemb-witness", "--from", "f(g(a),b)", "--to", "f(a,b)"]);
    assert_eq!(c, 0);
    assert!(!v["derivation"]["steps"].as_array().unwrap().is_empty());
    assert_eq!(code(&gembed(&["gemb-witness", "--from", "f(a,b)", "--to", "g(a)"])), 1);
}

#[test]
fn input_errors_exit_three_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.trs");
    std::fs::write(&bad, "theory bad\nrules\nf(X -> X\n").unwrap();
    let o = gembed(&["check", "--theory", bad.to_str().unwrap(), "--property", "subterm"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    assert_eq!(code(&gembed(&["normalize", "--theory", "blind", "--term", "f(a"])), 3);
    assert_eq!(code(&gembed(&["deduce", "--theory", "encdec", "--frame", "phi", "--term", "f(X)"])), 3);
    assert_eq!(code(&gembed(&["check", "--theory", "/no/such/file.trs", "--property", "subterm"])), 3);
}

#[test]
fn budget_overflow_exits_two() {
    let o = gembed(&["--normalize-budget", "1", "normalize", "--theory", "add", "--term", "plus(s(s(0)),s(s(0)))"]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn reports_are_deterministic() {
    let args = ["--json", "check", "--theory", "trapdoor_ext", "--property", "contracting"];
    let a = gembed(&args).stdout;
    let b = gembed(&args).stdout;
    assert_eq!(a, b);
    let args = ["--json", "static-equiv", "--theory", "encdec", "--frame1", "phi", "--frame2", "psi"];
    assert_eq!(gembed(&args).stdout, gembed(&args).stdout);
}

#[test]
fn fixture_files_round_trip() {
    use gembed::formats::{parse_axioms, parse_frame, parse_theory, print_axioms, print_frame, print_theory};
    let dir: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "fixtures"].iter().collect();
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let src = std::fs::read_to_string(&path).unwrap();
        match path.extension().and_then(|e| e.to_str()) {
            Some("trs") => {
                let th = parse_theory(&src).unwrap();
                assert_eq!(parse_theory(&print_theory(&th.name, &th.trs)).unwrap(), th, "{}", path.display());
            }
            Some("frame") => {
                let f = parse_frame(&src).unwrap();
                assert_eq!(parse_frame(&print_frame(&f.name, &f.frame)).unwrap(), f, "{}", path.display());
            }
            Some("eqs") => {
                let e = parse_axioms(&src).unwrap();
                assert_eq!(parse_axioms(&print_axioms(&e)).unwrap(), e, "{}", path.display());
            }
            _ => continue,
        }
        seen += 1;
    }
    assert!(seen >= 16);
}
