//! Report serialization is deterministic and follows the documented schema.

use beauville::beauville::{Constraints, Context, KernelPolicy};
use beauville::catalog::group;
use beauville::report::class_report;
use beauville::Limits;
use serde_json::Value;

fn report(spec: &str, constraints: &Constraints) -> String {
    let g = group(spec).unwrap();
    let ctx = Context::new(&g, Limits::default());
    let result = ctx.classify(3, constraints).unwrap();
    serde_json::to_string_pretty(&class_report(&ctx, spec, &result, false)).unwrap()
}

#[test]
fn identical_runs_give_identical_bytes() {
    let c = Constraints { chi: Some(-1), ..Default::default() };
    assert_eq!(report("C5^2", &c), report("C5^2", &c));
}

#[test]
fn schema() {
    let v: Value = serde_json::from_str(&report("C5^2", &Constraints { chi: Some(-1), ..Default::default() })).unwrap();
    for key in ["group_spec", "n", "kernel_tuple", "classes", "cells", "total_count", "oracle_checked", "diagnostics"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["kernel_tuple"], serde_json::json!([[], [], ["(1,0)"]]));
    let classes = v["classes"].as_array().unwrap();
    assert_eq!(classes.len(), 8);
    let mut keys: Vec<&str> = classes.iter().map(|c| c["canonical_key"].as_str().unwrap()).collect();
    keys.dedup();
    assert_eq!(keys.len(), 8);
    for c in classes {
        assert_eq!(c["genera"], serde_json::json!([6, 6, 2]));
        assert_eq!(c["self_intersection"], 48);
        assert_eq!(c["euler"], -8);
        assert_eq!(c["triples"].as_array().unwrap().len(), 3);
    }
    assert_eq!(v["cells"][0]["count"], 8);
}

#[test]
fn trivial_kernel_reports_have_empty_kernel_generators() {
    let v: Value = serde_json::from_str(&report("C5^2", &Constraints { kernels: KernelPolicy::Trivial, ..Default::default() })).unwrap();
    assert_eq!(v["total_count"], 77);
    assert_eq!(v["kernel_tuple"], serde_json::json!([[], [], []]));
}
