#![allow(clippy::excessive_precision)]

use std::process::{Command, Output};

use cl_entropy::measures::{cl_measure, fu_depth, normalizing_constant};
use cl_entropy::{AbelianPGroup, CLParams, Partition};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cl-entropy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_lines(o: &Output) -> Vec<Value> {
    stdout(o)
        .lines()
        .map(|l| serde_json::from_str(l).expect("one JSON object per line"))
        .collect()
}

fn f(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("{key} missing in {v}"))
}

#[test]
fn entropy_width_within_eps() {
    let o = run(&["entropy", "--p", "2", "--u", "0", "--eps", "1e-6", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let recs = json_lines(&o);
    assert_eq!(recs.len(), 1);
    let r = &recs[0];
    assert_eq!(r["status"], "ok");
    assert!(f(r, "value_hi") - f(r, "value_lo") <= 1e-6);
    assert!(f(r, "value_lo") <= 2.003_036_349_148 && 2.003_036_349_148 <= f(r, "value_hi"));
    assert!(r["truncation_level"].as_u64().unwrap() > 0);
}

#[test]
fn entropy_rejects_non_prime() {
    let o = run(&["entropy", "--p", "4", "--u", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("4 is not prime"));
    assert!(o.stdout.is_empty());
}

#[test]
fn entropy_at_large_unit_rank() {
    let o = run(&["entropy", "--p", "2", "--u", "30", "--eps", "1e-6"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(f(&json_lines(&o)[0], "value_hi") < 1e-6);
}

#[test]
fn entropy_emits_one_record_per_pair() {
    let o = run(&["entropy", "--p", "2,3", "--u", "0,1,2", "--eps", "1e-4"]);
    let recs = json_lines(&o);
    let pairs: Vec<(u64, f64)> = recs.iter().map(|r| (r["p"].as_u64().unwrap(), f(r, "u"))).collect();
    assert_eq!(
        pairs,
        vec![(2, 0.0), (2, 1.0), (2, 2.0), (3, 0.0), (3, 1.0), (3, 2.0)]
    );
}

#[test]
fn usage_errors() {
    for args in [
        &["entropy", "--p", "2", "--u", "-1"][..],
        &["entropy", "--p", "2", "--u", "0", "--eps", "1e-13"],
        &["entropy", "--p", "101", "--u", "0"],
        &["table", "--p", "2", "--u", "0", "--max-order-exponent", "21"],
        &["kl", "--p", "9", "--u1", "0", "--u2", "1"],
        &["zeta", "--p", "2", "--k", "0", "--s", "0"],
        &["zeta", "--p", "2", "--k", "two", "--s", "0"],
        &["zeta", "--p", "2", "--k", "2", "--s", "-1.5"],
        &["verify", "--suite", "everything"],
        &["frobnicate"],
        &["entropy", "--p", "2", "--u", "0", "--threads", "0"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn refusal_emits_only_the_refused_record() {
    let o = run(&["entropy", "--p", "2", "--u", "0,-0.8", "--eps", "1e-6"]);
    assert_eq!(o.status.code(), Some(3));
    let recs = json_lines(&o);
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0]["status"], "refused");
    assert!(recs[0]["diagnostic"].as_str().unwrap().contains("tail"));
    assert!(recs[0]["value_lo"].is_null());
}

#[test]
fn kl_modes() {
    let o = run(&["kl", "--p", "2", "--u1", "0", "--u2", "0", "--mode", "both"]);
    assert_eq!(o.status.code(), Some(0));
    let recs = json_lines(&o);
    assert_eq!(recs.len(), 2);
    assert_eq!((recs[0]["mode"].as_str(), recs[1]["mode"].as_str()), (Some("closed"), Some("direct")));
    for r in &recs {
        assert!(f(r, "value_lo") <= 0.0 && 0.0 <= f(r, "value_hi"));
        assert_eq!(r["overlap"], true);
    }

    let recs = json_lines(&run(&["kl", "--p", "3", "--u1", "1", "--u2", "4", "--mode", "both"]));
    assert!(recs.iter().all(|r| r["overlap"] == true));

    let recs = json_lines(&run(&["kl", "--p", "2", "--u1", "0", "--u2", "1", "--mode", "closed"]));
    assert_eq!(recs.len(), 1);
    assert!(f(&recs[0], "value_lo") > 0.0);
    assert!(recs[0].get("overlap").is_none());
}

#[test]
fn table_rows_and_ordering() {
    let recs = json_lines(&run(&["table", "--p", "2", "--u", "0", "--max-order-exponent", "3"]));
    let parts: Vec<&str> = recs.iter().map(|r| r["partition"].as_str().unwrap()).collect();
    assert_eq!(parts, vec!["()", "(1)", "(2)", "(1,1)", "(3)", "(2,1)", "(1,1,1)"]);
    let orders: Vec<u64> = recs.iter().map(|r| r["order"].as_u64().unwrap()).collect();
    assert_eq!(orders, vec![1, 2, 4, 4, 8, 8, 8]);
    let auts: Vec<u64> = recs.iter().map(|r| r["aut_order"].as_u64().unwrap()).collect();
    assert_eq!(auts, vec![1, 1, 2, 6, 4, 8, 168]);
}

#[test]
fn table_trivial_row_is_the_normalizing_constant() {
    let recs = json_lines(&run(&["table", "--p", "2", "--u", "0", "--max-order-exponent", "0"]));
    assert_eq!(recs.len(), 1);
    let params = CLParams::integral(2, 0).unwrap();
    let f0 = normalizing_constant(&params, fu_depth(&params, 1e-15).unwrap()).unwrap();
    assert_eq!(f(&recs[0], "measure_lo").to_bits(), f0.lo().to_bits());
    assert_eq!(f(&recs[0], "measure_hi").to_bits(), f0.hi().to_bits());
    assert!(f0.contains(0.288_788_095_086_602_42));
}

#[test]
fn table_masses_bracket_one() {
    let recs = json_lines(&run(&["table", "--p", "3", "--u", "1", "--max-order-exponent", "12"]));
    let lo: f64 = recs.iter().map(|r| f(r, "measure_lo")).sum();
    let hi: f64 = recs.iter().map(|r| f(r, "measure_hi")).sum();
    // omitted mass beyond 3^12 is far below 1e-9 at u = 1
    assert!(lo < 1.0 && 1.0 < hi + 1e-9, "[{lo}, {hi}]");
}

#[test]
fn csv_round_trips() {
    let o = run(&["table", "--p", "2", "--u", "1.5", "--max-order-exponent", "6", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let params = CLParams::from_f64(2, 1.5).unwrap();
    let depth = fu_depth(&params, 1e-15).unwrap();
    let mut reader = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(
        reader.headers().unwrap(),
        vec!["partition", "order", "aut_order", "measure_lo", "measure_hi"]
    );
    let mut rows = 0;
    for row in reader.records() {
        let row = row.unwrap();
        let inner = row[0].trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<u32> = if inner.is_empty() {
            vec![]
        } else {
            inner.split(',').map(|s| s.parse().unwrap()).collect()
        };
        let g = AbelianPGroup::new(2, Partition::new(parts).unwrap()).unwrap();
        let nu = cl_measure(&params, &g, depth).unwrap();
        assert_eq!(row[0], g.lambda_prime().to_string());
        assert_eq!(row[1], g.order().to_string());
        assert_eq!(row[2], g.aut_order().to_string());
        assert_eq!(row[3].parse::<f64>().unwrap().to_bits(), nu.lo().to_bits());
        assert_eq!(row[4].parse::<f64>().unwrap().to_bits(), nu.hi().to_bits());
        rows += 1;
    }
    assert_eq!(rows, 1 + 1 + 2 + 3 + 5 + 7 + 11);
}

#[test]
fn csv_and_json_carry_the_same_values() {
    let args = ["entropy", "--p", "3", "--u", "0,2", "--eps", "1e-5"];
    let json = json_lines(&run(&args));
    let csv_out = run(&[&args[..], &["--format", "csv"]].concat());
    let mut reader = csv::Reader::from_reader(csv_out.stdout.as_slice());
    let headers = reader.headers().unwrap().clone();
    for (row, rec) in reader.records().zip(&json) {
        let row = row.unwrap();
        for (h, cell) in headers.iter().zip(row.iter()) {
            match &rec[h] {
                Value::Null => assert_eq!(cell, ""),
                Value::String(s) => assert_eq!(cell, s),
                Value::Number(n) => assert_eq!(cell.parse::<f64>().unwrap(), n.as_f64().unwrap()),
                other => panic!("unexpected {other}"),
            }
        }
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["entropy", "--p", "2", "--u", "0,1", "--eps", "1e-6"];
    let a = run(&args);
    let b = run(&[&args[..], &["--threads", "1"]].concat());
    let c = run(&[&args[..], &["--threads", "3", "--seed", "17"]].concat());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let t1 = run(&["table", "--p", "5", "--u", "0", "--max-order-exponent", "8", "--format", "csv"]);
    let t2 = run(&["table", "--p", "5", "--u", "0", "--max-order-exponent", "8", "--format", "csv", "--threads", "2"]);
    assert_eq!(t1.stdout, t2.stdout);
}

#[test]
fn floats_have_seventeen_significant_digits() {
    let o = run(&["kl", "--p", "2", "--u1", "0", "--u2", "1"]);
    let line = stdout(&o);
    let lo = line.split("\"value_lo\":").nth(1).unwrap().split(',').next().unwrap();
    let mantissa = lo.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17, "{lo}");
}

#[test]
fn zeta_records() {
    let recs = json_lines(&run(&["zeta", "--p", "2", "--k", "1", "--s", "0"]));
    let quantities: Vec<&str> = recs.iter().map(|r| r["quantity"].as_str().unwrap()).collect();
    assert_eq!(quantities, vec!["product", "sum", "derivative"]);
    assert!(f(&recs[0], "value_lo") <= 2.0 && 2.0 <= f(&recs[0], "value_hi"));
    assert!(f(&recs[1], "value_lo") <= 2.0 && 2.0 <= f(&recs[1], "value_hi"));
    let d = -2.0 * std::f64::consts::LN_2;
    assert!(f(&recs[2], "value_lo") <= d && d <= f(&recs[2], "value_hi"));

    let recs = json_lines(&run(&["zeta", "--p", "2", "--k", "inf", "--s", "0"]));
    assert_eq!(recs.len(), 2);
    let inv_f0 = 3.462_746_619_455_063_6;
    assert!(f(&recs[0], "value_lo") <= inv_f0 && inv_f0 <= f(&recs[0], "value_hi"));
}

#[test]
fn verify_suites() {
    let o = run(&["verify", "--suite", "exceptions"]);
    assert_eq!(o.status.code(), Some(0));
    let r = &json_lines(&o)[0];
    assert_eq!(r["status"], "pass");
    assert_eq!(
        r["detail"],
        "exceptions found: p=2 u=0 (1); p=2 u=0 (2); p=2 u=1 (1); p=3 u=0 (1)"
    );

    let o = run(&["verify", "--suite", "margins"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_lines(&o)[0]["status"], "pass");

    let o = run(&["verify", "--suite", "all"]);
    assert_eq!(o.status.code(), Some(0));
    let suites: Vec<String> = json_lines(&o)
        .iter()
        .map(|r| {
            assert_eq!(r["status"], "pass", "{r}");
            assert_eq!(r["failures"], 0);
            r["suite"].as_str().unwrap().to_string()
        })
        .collect();
    assert_eq!(suites, vec!["lemma1", "exceptions", "monotone", "hall", "zeta", "margins"]);
}

#[test]
fn verify_with_narrower_bounds() {
    let o = run(&["verify", "--suite", "exceptions", "--p-max", "2", "--u-max", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        json_lines(&o)[0]["detail"],
        "exceptions found: p=2 u=0 (1); p=2 u=0 (2)"
    );
}
