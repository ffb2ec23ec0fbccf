//! JSON report. Objects go through `serde_json::Value`, whose map is ordered,
//! so keys come out sorted and two runs can be diffed line by line.
//!
//! One mode:
//! `{"basin_count", "bench_ms"?, "mode", "stage_ms", "threshold", "total_ms", "watershed_pixels"}`
//!
//! Both modes: `{"agreement", "mode": "both", "runs": [<one mode>, <one mode>]}`

use floodseg::pipeline::PipelineResult;
use serde_json::{json, Value};

use crate::bench::BenchStats;

fn run_entry(r: &PipelineResult, bench: Option<&BenchStats>) -> Value {
    let mut v = serde_json::to_value(r.summary()).expect("summary serializes");
    if let (Some(b), Value::Object(map)) = (bench, &mut v) {
        map.insert("bench_ms".into(), json!(b.samples));
    }
    v
}

pub fn build(
    both: bool,
    results: &[&PipelineResult],
    benches: &[Option<BenchStats>],
    agreement: Option<f64>,
) -> Value {
    let runs: Vec<Value> = results
        .iter()
        .zip(benches)
        .map(|(r, b)| run_entry(r, b.as_ref()))
        .collect();
    if both {
        json!({
            "agreement": agreement,
            "mode": "both",
            "runs": runs,
        })
    } else {
        runs.into_iter().next().unwrap_or(Value::Null)
    }
}

pub fn to_json(doc: &Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("json value serializes");
    s.push('\n');
    s
}
