use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::instances::{generate, Family, InstanceSpec, Params};
use super::ratios::{measure_ratios, RatioReport, RatioValue};
use crate::error::{Error, Result};
use crate::solvers::SolverOptions;
use crate::stability::StabilityKind;

/// Bounds an entry is expected to satisfy. Every field is optional; ratio
/// bounds hold vacuously when no stable outcome exists, equalities do not.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expect {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poa_max: Option<RatioValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poa_min: Option<RatioValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos_max: Option<RatioValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos_min: Option<RatioValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poa_eq: Option<RatioValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos_eq: Option<RatioValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exists: Option<bool>,
}

/// One config entry. `instances > 1` is only meaningful for `random_er`:
/// instance `t` uses seed `params.seed + t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteEntry {
    pub family: Family,
    #[serde(default)]
    pub params: Params,
    pub kinds: Vec<StabilityKind>,
    #[serde(default)]
    pub expect: Expect,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instances: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntryResult {
    pub entry: usize,
    pub instance: usize,
    pub family: Family,
    pub params: Params,
    pub report: RatioReport,
    pub pass: bool,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub results: Vec<EntryResult>,
    pub summary: Summary,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn parse_suite(text: &str) -> Result<Vec<SuiteEntry>> {
    serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
}

/// Failed expectations of one measurement, in field order.
pub fn check_expectations(report: &RatioReport, expect: &Expect) -> Vec<String> {
    let mut failures = Vec::new();
    if let Some(exists) = expect.exists {
        if exists != report.exists {
            failures.push(format!("exists is {}, expected {exists}", report.exists));
        }
    }
    let bounds = [
        ("poa", &report.poa, &expect.poa_max, true),
        ("poa", &report.poa, &expect.poa_min, false),
        ("pos", &report.pos, &expect.pos_max, true),
        ("pos", &report.pos, &expect.pos_min, false),
    ];
    for (name, value, bound, upper) in bounds {
        if let (Some(v), Some(b)) = (value, bound) {
            if (upper && v > b) || (!upper && v < b) {
                let rel = if upper { "<=" } else { ">=" };
                failures.push(format!("{name} = {v}, expected {rel} {b}"));
            }
        }
    }
    for (name, value, target) in [
        ("poa", &report.poa, &expect.poa_eq),
        ("pos", &report.pos, &expect.pos_eq),
    ] {
        if let Some(t) = target {
            match value {
                Some(v) if v == t => {}
                Some(v) => failures.push(format!("{name} = {v}, expected {t}")),
                None => failures.push(format!("{name} undefined, expected {t}")),
            }
        }
    }
    failures
}

/// Measures every `(instance, kind)` pair of the config on up to `jobs`
/// worker threads. Results keep config order.
pub fn run_suite(
    entries: &[SuiteEntry],
    options: &SolverOptions,
    jobs: usize,
) -> Result<SuiteReport> {
    let mut work = Vec::new();
    for (e, entry) in entries.iter().enumerate() {
        let count = entry.instances.unwrap_or(1);
        if count > 1 && entry.family != Family::RandomEr {
            return Err(Error::Config(format!(
                "entry {e}: `instances` needs the random_er family"
            )));
        }
        for t in 0..count {
            let mut params = entry.params.clone();
            if let Some(seed) = params.seed.as_mut() {
                *seed += t as u64;
            }
            for &kind in &entry.kinds {
                work.push((e, t, params.clone(), kind));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let results: Vec<Result<EntryResult>> = pool.install(|| {
        work.into_par_iter()
            .map(|(e, t, params, kind)| {
                let entry = &entries[e];
                let g = generate(&InstanceSpec {
                    family: entry.family,
                    params: params.clone(),
                })?;
                let report = measure_ratios(&g, kind, options)?;
                let failures = check_expectations(&report, &entry.expect);
                Ok(EntryResult {
                    entry: e,
                    instance: t,
                    family: entry.family,
                    params,
                    report,
                    pass: failures.is_empty(),
                    failures,
                })
            })
            .collect()
    });
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;
    let passed = results.iter().filter(|r| r.pass).count();
    Ok(SuiteReport {
        summary: Summary {
            total: results.len(),
            passed,
            failed: results.len() - passed,
        },
        results,
    })
}
