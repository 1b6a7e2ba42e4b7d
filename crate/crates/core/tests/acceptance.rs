//! Acceptance criteria at full scale. One line per criterion; the process
//! exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use ctree::suite::{CriterionReport, Scale, SuiteConfig, CRITERIA};

const SEED: u64 = 20_240_601;

/// Wall-clock limits for the criteria that carry one.
fn time_limit(id: u8) -> Option<Duration> {
    match id {
        1 | 9 => Some(Duration::from_secs(60)),
        4 => Some(Duration::from_secs(300)),
        _ => None,
    }
}

fn line(ok: bool, id: u8, name: &str, detail: &str) -> bool {
    println!("[{}] criterion {id:>2} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}

fn summary(r: &CriterionReport, took: Duration) -> String {
    let mut s = format!("{} cases, {} checks, {:.2}s", r.cases, r.checks, took.as_secs_f64());
    for (k, v) in &r.stats {
        s.push_str(&format!(", {k}={v}"));
    }
    for f in &r.failures {
        s.push_str(&format!("\n        {f}"));
    }
    s
}

fn main() {
    let cfg = SuiteConfig::new(SEED, Scale::Full);
    let mut all_ok = true;
    let mut first = Vec::new();
    for (id, run) in CRITERIA {
        let start = Instant::now();
        let r = run(&cfg);
        let took = start.elapsed();
        let in_time = time_limit(id).is_none_or(|lim| took < lim);
        let mut detail = summary(&r, took);
        if !in_time {
            detail.push_str(&format!(" (limit {:?} exceeded)", time_limit(id).unwrap()));
        }
        all_ok &= line(r.passed && in_time, id, &r.name, &detail);
        first.push(r);
    }

    let start = Instant::now();
    let a = serde_json::to_string(&first).expect("reports serialize");
    let b = serde_json::to_string(&ctree::suite::run_all(&cfg)).expect("reports serialize");
    let detail = format!("{} bytes per run, rerun in {:.2}s", a.len(), start.elapsed().as_secs_f64());
    all_ok &= line(a == b, 10, "determinism", &detail);

    if !all_ok {
        std::process::exit(1);
    }
}
