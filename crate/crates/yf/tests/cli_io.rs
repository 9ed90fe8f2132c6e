use std::collections::BTreeMap;
use std::process::Command;

use yf::cli_io::records::*;
use yf::cli_io::{run_pipeline, run_pipeline_with_threads, Cache, RunConfig, Session};
use yf::congruence::{scan, EigenTable, Weight};
use yf::exact_core::rational::{ri, rq};
use yf::exact_core::{NfElem, NumberField, SymbolicConstant};

fn cfg11() -> RunConfig {
    RunConfig::new(11, 1, 2, 0, 12)
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_yf"))
}

#[test]
fn config_validation() {
    assert!(cfg11().validate().is_ok());
    let mut c = cfg11();
    c.n1 = 6;
    assert!(c.validate().is_err(), "two prime factors");
    let mut c = RunConfig::new(11, 11, 2, 0, 12);
    assert!(matches!(c.validate(), Err(yf::Error::Domain(m)) if m.contains("gcd")));
    c.n2 = 4;
    assert!(c.validate().is_err());
    let c = RunConfig::new(11, 1, 0, 2, 12);
    assert!(c.validate().is_err());
    let mut c = cfg11();
    c.probe_primes = vec![4];
    assert!(c.validate().is_err());
    c.probe_primes = vec![11];
    assert!(c.validate().is_err());
}

#[test]
fn pipeline_runs_and_checks_pass() {
    let o = run_pipeline(cfg11()).unwrap();
    assert!(o.passed(), "{:#?}", o.checks);
    for f in [
        "classset.json",
        "lift.json",
        "lift_can.json",
        "hecke.json",
        "wald.json",
        "avg.json",
        "factorization.json",
        "scan.json",
        "manifest.json",
    ] {
        assert!(o.artifacts.contains_key(f), "{}", f);
    }
    let facts: Vec<FactorizationRec> = from_json(&o.artifacts["factorization.json"]).unwrap();
    assert_eq!(facts.len(), 1);
    assert!(facts[0].equal && facts[0].d == "4");
    let hecke: Vec<HeckeRec> = from_json(&o.artifacts["hecke.json"]).unwrap();
    assert_eq!(hecke.iter().map(|h| h.p.as_str()).collect::<Vec<_>>(), vec!["2", "3", "5"]);
    // β − 8 at p = 2
    assert_eq!(hecke[0].eigenvalue, vec!["-8", "1", "0"]);
}

#[test]
fn artifacts_round_trip() {
    let o = run_pipeline(cfg11()).unwrap();
    let a = &o.artifacts;
    fn same<T: serde::Serialize + for<'de> serde::Deserialize<'de>>(text: &str) {
        let v: T = from_json(text).unwrap();
        assert_eq!(to_json(&v), text);
    }
    same::<ClassSetRec>(&a["classset.json"]);
    same::<BrandtRec>(&a["brandt_nu2.json"]);
    same::<EigenRec>(&a["eigen_nu2.json"]);
    same::<SiegelRec>(&a["lift.json"]);
    same::<SiegelRec>(&a["lift_can.json"]);
    same::<Vec<HeckeRec>>(&a["hecke.json"]);
    same::<yf::cli_io::pipeline::WaldStageRec>(&a["wald.json"]);
    same::<Vec<AvgRec>>(&a["avg.json"]);
    same::<Vec<FactorizationRec>>(&a["factorization.json"]);
    same::<yf::cli_io::pipeline::ScanStageRec>(&a["scan.json"]);
    same::<yf::cli_io::pipeline::ManifestRec>(&a["manifest.json"]);
    // domain objects survive decoding
    let lift = siegel_of(&from_json(&a["lift.json"]).unwrap()).unwrap();
    assert_eq!(to_json(&siegel_rec(&lift)), a["lift.json"]);
    let eig: EigenRec = from_json(&a["eigen_nu2.json"]).unwrap();
    for s in &eig.systems {
        assert_eq!(&eigen_system_rec(&eigen_system_of(s).unwrap(), 11), s);
    }
    let brandt: BrandtRec = from_json(&a["brandt_nu2.json"]).unwrap();
    assert_eq!(brandt_rec(11, 2, &brandt_of(&brandt).unwrap()), brandt);
    let sc: yf::cli_io::pipeline::ScanStageRec = from_json(&a["scan.json"]).unwrap();
    assert_eq!(scan_rec(&scan_of(&sc.lift_vs_hecke).unwrap()), sc.lift_vs_hecke);
    let w: yf::cli_io::pipeline::WaldStageRec = from_json(&a["wald.json"]).unwrap();
    let wf = wald_of(&w.f).unwrap();
    assert_eq!(wald_rec(&w.f.label, &wf, &field_of(&w.f.field).unwrap()), w.f);
}

#[test]
fn integers_are_strings() {
    let o = run_pipeline(cfg11()).unwrap();
    fn walk(v: &serde_json::Value) {
        match v {
            serde_json::Value::Number(n) => panic!("bare number {}", n),
            serde_json::Value::Array(a) => a.iter().for_each(walk),
            serde_json::Value::Object(m) => m.values().for_each(walk),
            _ => {}
        }
    }
    for text in o.artifacts.values() {
        walk(&serde_json::from_str(text).unwrap());
    }
}

#[test]
fn symbolic_and_table_records_round_trip() {
    let k = NumberField::from_ints(&[-5, 0, 1]).unwrap();
    let x = SymbolicConstant::new(NfElem::from_coords(&k, vec![rq(3, 7), ri(-2)]), -3, 1, 12.into()).unwrap();
    let kk = Some(k.clone());
    assert_eq!(sym_of(&sym_rec(&x, &kk), &kk).unwrap(), x);
    let r = SymbolicConstant::pi_power(rq(-1, 9), 2);
    assert_eq!(sym_of(&sym_rec(&r, &None), &None).unwrap(), r);
    let mut entries = BTreeMap::new();
    entries.insert(2u64, NfElem::from_coords(&k, vec![ri(1), ri(1)]));
    entries.insert(3u64, NfElem::rational(rq(-4, 3)));
    let t = EigenTable::new("t", Weight::Siegel { j: 2, kappa: 5 }, 7, Some(k), entries).unwrap();
    let rec = eigen_table_rec(&t);
    let back = eigen_table_of(&rec).unwrap();
    assert_eq!(back.entries, t.entries);
    assert_eq!(back.weight, t.weight);
    assert_eq!(eigen_table_rec(&back), rec);
    let text = to_json(&rec);
    assert!(text.contains("\"minpoly\""));
    assert!(
        eigen_table_of(&from_json::<EigenTableRec>("{\"label\":\"x\",\"level\":\"7\",\"weight\":{\"j\":\"1\"},\"field\":null,\"entries\":[]}").unwrap())
            .is_err()
    );
    assert!(from_json::<EigenTableRec>("{ not json").is_err());
}

#[test]
fn warm_cache_reuses_every_stage() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = cfg11();
    c.cache_dir = Some(dir.path().join("cache"));
    c.out_dir = Some(dir.path().join("out1"));
    let cold = run_pipeline(c.clone()).unwrap();
    assert!(cold.stages.iter().all(|s| !s.cached));
    c.out_dir = Some(dir.path().join("out2"));
    let warm = run_pipeline(c).unwrap();
    assert!(warm.stages.iter().all(|s| s.cached), "{:?}", warm.stages);
    assert_eq!(cold.artifacts, warm.artifacts);
    for f in cold.artifacts.keys() {
        let a = std::fs::read(dir.path().join("out1").join(f)).unwrap();
        let b = std::fs::read(dir.path().join("out2").join(f)).unwrap();
        assert_eq!(a, b, "{}", f);
    }
    // no temporaries are left behind
    for e in std::fs::read_dir(dir.path().join("cache")).unwrap() {
        assert!(!e.unwrap().file_name().to_string_lossy().contains(".tmp-"));
    }
}

#[test]
fn cache_keys_separate_configs() {
    let a = Cache::key("lift", &serde_json::json!({"n1": "11", "bound": "12"}));
    let b = Cache::key("lift", &serde_json::json!({"bound": "12", "n1": "11"}));
    let c = Cache::key("lift", &serde_json::json!({"n1": "11", "bound": "10"}));
    let d = Cache::key("wald", &serde_json::json!({"n1": "11", "bound": "12"}));
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert_ne!(a, d);
}

#[test]
fn thread_count_does_not_change_bytes() {
    let one = run_pipeline_with_threads(cfg11(), 1).unwrap();
    let eight = run_pipeline_with_threads(cfg11(), 8).unwrap();
    assert_eq!(one.artifacts, eight.artifacts);
}

#[test]
fn stage_errors_name_the_stage() {
    let mut c = cfg11();
    c.discriminants = vec![7];
    let e = run_pipeline(c).unwrap_err();
    assert!(matches!(&e, yf::Error::Domain(m) if m.starts_with("[factorization]")), "{}", e);
    let mut c = cfg11();
    c.f_label = Some("nope".into());
    assert!(Session::new(c).unwrap().inputs().is_err());
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let st = bin().args(["pipeline", "--n1", "11", "--nu1", "2", "--out"]).arg(&out).status().unwrap();
    assert_eq!(st.code(), Some(0));
    assert!(out.join("manifest.json").exists());
    // usage errors
    assert_eq!(bin().args(["pipeline", "--n1", "11"]).output().unwrap().status.code(), Some(1));
    assert_eq!(bin().args(["classset", "--n1", "11", "--n2", "11"]).output().unwrap().status.code(), Some(1));
    assert_eq!(bin().args(["bogus"]).output().unwrap().status.code(), Some(1));
    assert_eq!(bin().arg("--help").output().unwrap().status.code(), Some(0));
    // a failed check: the identity at d = 3 is off by d/4
    let st = bin()
        .args(["pipeline", "--n1", "11", "--nu1", "2", "--d", "3", "--out"])
        .arg(dir.path().join("d3"))
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(2), "{}", String::from_utf8_lossy(&st.stderr));
    assert!(String::from_utf8_lossy(&st.stderr).contains("FAIL factorization d = 3"));
}

#[test]
fn subcommands_write_records() {
    let dir = tempfile::tempdir().unwrap();
    let run = |args: &[&str]| {
        let o = bin().args(args).output().unwrap();
        assert_eq!(o.status.code(), Some(0), "{:?}: {}", args, String::from_utf8_lossy(&o.stderr));
        String::from_utf8(o.stdout).unwrap()
    };
    let cs: ClassSetRec = from_json(&run(&["classset", "--n1", "11"])).unwrap();
    assert_eq!((cs.h.as_str(), cs.mass.as_str()), ("2", "5/12"));
    let e: EigenRec = from_json(&run(&["eigen", "--n1", "11", "--nu", "0", "--primes", "2,3"])).unwrap();
    assert_eq!(e.systems[0].eigenvalues[0].coords, vec!["-2"]);
    let c: ConstantRec = from_json(&run(&["constants", "--symbol", "c7", "--params", "2,0"])).unwrap();
    assert_eq!(c.value.display, "54");
    let k: KernelRec = from_json(&run(&["kernel", "--k", "2", "--mu", "0", "--nu", "2"])).unwrap();
    assert!(!k.terms.is_empty());
    let lift = dir.path().join("lift.json");
    run(&["lift", "--n1", "11", "--nu1", "2", "--out", lift.to_str().unwrap()]);
    let avg: Vec<AvgRec> = from_json(&run(&["avg", "--lift", lift.to_str().unwrap(), "--d", "3,4"])).unwrap();
    assert_eq!(avg.len(), 2);
    assert_eq!(
        avg[1].classes,
        vec![ClassRec {
            t: vec!["1".into(), "0".into(), "1".into()],
            epsilon: "8".into()
        }]
    );
    run(&["wald", "--n1", "11", "--nu1", "2", "--q-bound", "20"]);
}

#[test]
fn scan_subcommand_finds_a_planted_prime() {
    let dir = tempfile::tempdir().unwrap();
    let k = NumberField::from_ints(&[-3, 1, 1]).unwrap();
    let mk = |shift: i64| {
        let entries = [2u64, 3, 5, 7]
            .iter()
            .map(|&p| (p, NfElem::from_coords(&k, vec![ri(p as i64), ri(1)]).radd_int(13 * shift * p as i64)))
            .collect();
        EigenTable::new(if shift == 0 { "A" } else { "B" }, Weight::Elliptic(4), 1, Some(k.clone()), entries).unwrap()
    };
    let (a, b) = (mk(0), mk(1));
    let (pa, pb) = (dir.path().join("a.json"), dir.path().join("b.json"));
    std::fs::write(&pa, to_json(&eigen_table_rec(&a))).unwrap();
    std::fs::write(&pb, to_json(&eigen_table_rec(&b))).unwrap();
    let o = bin()
        .args(["scan", "--a"])
        .arg(&pa)
        .arg("--b")
        .arg(&pb)
        .args(["--primes", "2,3,5,7"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let rec: ScanRec = from_json(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert!(rec.candidates.iter().any(|c| c.ell == "13"));
    assert_eq!(scan_rec(&scan(&a, &b, &[2, 3, 5, 7]).unwrap()), rec);
}

trait AddInt {
    fn radd_int(&self, n: i64) -> NfElem;
}

impl AddInt for NfElem {
    fn radd_int(&self, n: i64) -> NfElem {
        yf::exact_core::Ring::radd(self, &NfElem::rational(ri(n)))
    }
}

/// Level-1 tables for (k′, k) = (28, 22) and a genus-2 table, supplied externally.
#[test]
#[ignore = "data-dependent: set YF_EXTERNAL_TABLES to a directory with f28.json, g22.json and g2.json"]
fn external_level_one_tables() {
    let dir = std::path::PathBuf::from(std::env::var("YF_EXTERNAL_TABLES").expect("YF_EXTERNAL_TABLES"));
    let load = |n: &str| eigen_table_of(&from_json(&std::fs::read_to_string(dir.join(n)).unwrap()).unwrap()).unwrap();
    let (f, g, g2) = (load("f28.json"), load("g22.json"), load("g2.json"));
    let lifted = yf::congruence::lift_eigen_table(&f, &g, 28, 22).unwrap();
    let r = scan(&lifted, &g2, &g2.primes()).unwrap();
    assert!(r.moduli().contains(&227.into()), "{:?}", r.moduli());
}
