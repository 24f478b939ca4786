//! Experiment runner: instance grid, method runs, result rows and summaries.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use rpd_core::alns::run_pool;
use rpd_core::baselines::best_heuristic;
use rpd_core::instance::{build_instance, parse_tsplib, Instance, RawTsplib, VariantKind, VariantSpec};
use rpd_core::pipeline::refine;
use rpd_core::schedule::{coordination_metrics, evaluate, Solution};
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Method};
use crate::stats::{cohens_d_paired, wilcoxon_signed_rank};

/// One solver run on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub instance: String,
    pub variant: String,
    pub replicate: u32,
    pub method: Method,
    pub makespan: f64,
    /// Wall-clock seconds; the pipeline row includes its ALNS stage.
    pub runtime: f64,
    pub cross_agent_pct: f64,
    pub interleaved_pct: f64,
    pub seed: u64,
    /// Empty on success, otherwise the failure message.
    pub error: String,
}

impl ResultRow {
    pub fn ok(&self) -> bool {
        self.error.is_empty()
    }

    fn key(&self) -> (String, String, u32, u64, Method) {
        (self.instance.clone(), self.variant.clone(), self.replicate, self.seed, self.method)
    }
}

/// Reads a TSPLIB file (`.tsp`) or an instance JSON file.
pub fn load_source(path: &Path) -> Result<Source> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("tsp")) {
        Ok(Source::Tsplib(parse_tsplib(&text)?))
    } else {
        Ok(Source::Fixed(Instance::from_json(&text)?))
    }
}

/// Where an experiment's instances come from.
#[derive(Debug, Clone)]
pub enum Source {
    /// Processing times are generated per variant.
    Tsplib(RawTsplib),
    /// A ready-made instance, used for every variant as is.
    Fixed(Instance),
}

impl Source {
    pub fn name(&self) -> String {
        match self {
            Source::Tsplib(raw) => raw.name.clone(),
            Source::Fixed(inst) => inst.label.clone(),
        }
    }

    pub fn instance(&self, spec: VariantSpec) -> Result<Instance> {
        match self {
            Source::Tsplib(raw) => Ok(build_instance(raw, spec)?),
            Source::Fixed(inst) => Ok(inst.clone()),
        }
    }
}

/// Loads an instance for the single-instance commands: TSPLIB files get the
/// base variant drawn with `seed`.
pub fn load_instance(path: &Path, seed: u64) -> Result<Instance> {
    load_source(path)?.instance(VariantSpec::new(VariantKind::Base, seed))
}

fn row_for(
    inst: &Instance,
    variant: &str,
    replicate: u32,
    method: Method,
    seed: u64,
    sol: &Solution,
    runtime: f64,
) -> ResultRow {
    let mut row = ResultRow {
        instance: inst.label.clone(),
        variant: variant.to_string(),
        replicate,
        method,
        makespan: f64::NAN,
        runtime,
        cross_agent_pct: f64::NAN,
        interleaved_pct: f64::NAN,
        seed,
        error: String::new(),
    };
    match evaluate(inst, sol) {
        Ok(s) => {
            let metrics = coordination_metrics(inst, sol, &s);
            row.makespan = s.makespan;
            row.cross_agent_pct = metrics.cross_agent_pct;
            row.interleaved_pct = metrics.interleaved_pct;
        }
        Err(e) => row.error = e.to_string(),
    }
    row
}

fn failed_row(inst: &Instance, variant: &str, replicate: u32, method: Method, seed: u64, err: &anyhow::Error) -> ResultRow {
    ResultRow {
        instance: inst.label.clone(),
        variant: variant.to_string(),
        replicate,
        method,
        makespan: f64::NAN,
        runtime: 0.0,
        cross_agent_pct: f64::NAN,
        interleaved_pct: f64::NAN,
        seed,
        error: format!("{err:#}"),
    }
}

/// Runs the requested methods on one instance. When both ALNS and the
/// pipeline are requested, the pipeline reuses the ALNS run as its first
/// stage.
pub fn run_cell(
    cfg: &ExperimentConfig,
    inst: &Instance,
    variant: &str,
    replicate: u32,
    seed: u64,
) -> Vec<ResultRow> {
    let wants = |m: Method| cfg.methods.contains(&m);
    let mut rows = Vec::new();
    if wants(Method::Heuristics) {
        let t = Instant::now();
        let sol = best_heuristic(inst, seed);
        rows.push(row_for(inst, variant, replicate, Method::Heuristics, seed, &sol, t.elapsed().as_secs_f64()));
    }
    if !(wants(Method::Alns) || wants(Method::Pipeline)) {
        return rows;
    }
    let t = Instant::now();
    let alns = match run_pool(inst, &cfg.alns, cfg.alns.workers_per_pool, seed) {
        Ok(r) => r,
        Err(e) => {
            let e = anyhow::Error::from(e);
            for m in [Method::Alns, Method::Pipeline].into_iter().filter(|&m| wants(m)) {
                rows.push(failed_row(inst, variant, replicate, m, seed, &e));
            }
            return rows;
        }
    };
    let alns_time = t.elapsed().as_secs_f64();
    if wants(Method::Alns) {
        rows.push(row_for(inst, variant, replicate, Method::Alns, seed, &alns.0, alns_time));
    }
    if wants(Method::Pipeline) {
        match refine(inst, &cfg.brkga, &alns.0, alns.1.best_makespan, seed) {
            Ok((sol, _, _)) => {
                rows.push(row_for(inst, variant, replicate, Method::Pipeline, seed, &sol, t.elapsed().as_secs_f64()))
            }
            Err(e) => rows.push(failed_row(inst, variant, replicate, Method::Pipeline, seed, &e.into())),
        }
    }
    rows
}

/// Output of [`run_experiment`].
#[derive(Debug, Clone)]
pub struct Experiment {
    pub rows: Vec<ResultRow>,
}

/// Runs every (instance, variant, replicate, seed) cell. Failures become
/// rows with an error message and the run continues. `progress` receives
/// each finished cell's rows.
pub fn run_experiment(cfg: &ExperimentConfig, mut progress: impl FnMut(&[ResultRow])) -> Result<Experiment> {
    cfg.validate()?;
    let kinds = cfg.variant_kinds()?;
    let mut rows = Vec::new();
    for path in &cfg.instances {
        let source = match load_source(path) {
            Ok(s) => s,
            Err(e) => {
                let row = ResultRow {
                    instance: path.display().to_string(),
                    variant: String::new(),
                    replicate: 0,
                    method: Method::Heuristics,
                    makespan: f64::NAN,
                    runtime: 0.0,
                    cross_agent_pct: f64::NAN,
                    interleaved_pct: f64::NAN,
                    seed: 0,
                    error: format!("{e:#}"),
                };
                progress(std::slice::from_ref(&row));
                rows.push(row);
                continue;
            }
        };
        for &kind in &kinds {
            for replicate in 0..cfg.replicates_for(kind) {
                let spec = VariantSpec::new(kind, cfg.instance_seed).with_replicate(replicate);
                let mut inst = match source.instance(spec) {
                    Ok(i) => i,
                    Err(e) => {
                        let row = ResultRow {
                            instance: source.name(),
                            variant: kind.to_string(),
                            replicate,
                            method: Method::Heuristics,
                            makespan: f64::NAN,
                            runtime: 0.0,
                            cross_agent_pct: f64::NAN,
                            interleaved_pct: f64::NAN,
                            seed: 0,
                            error: format!("{e:#}"),
                        };
                        progress(std::slice::from_ref(&row));
                        rows.push(row);
                        continue;
                    }
                };
                inst.label = source.name();
                for &seed in &cfg.seeds {
                    let cell = run_cell(cfg, &inst, &kind.to_string(), replicate, seed);
                    progress(&cell);
                    rows.extend(cell);
                }
            }
        }
    }
    rows.sort_by_key(|r| r.key());
    Ok(Experiment { rows })
}

pub fn write_rows(rows: &[ResultRow], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows(input: impl Read) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|x| x.map_err(anyhow::Error::from)).collect()
}

/// Improvement of `new` over `old` in percent of `old`.
pub fn improvement_pct(old: f64, new: f64) -> f64 {
    100.0 * (old - new) / old
}

/// Mean makespans of one (instance, variant) over replicates and seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub instance: String,
    pub variant: String,
    pub heuristics: Option<f64>,
    pub alns: Option<f64>,
    pub pipeline: Option<f64>,
    /// `100 (z_heur - z_alns) / z_heur`.
    pub alns_impr_pct: Option<f64>,
    /// `100 (z_alns - z_pipeline) / z_alns`.
    pub pipeline_impr_pct: Option<f64>,
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Groups successful rows by (instance, variant) and averages each method.
pub fn summarize(rows: &[ResultRow]) -> Vec<CellSummary> {
    let mut groups: BTreeMap<(String, usize, String), BTreeMap<Method, Vec<f64>>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.ok()) {
        let order = variant_order(&r.variant);
        groups
            .entry((r.instance.clone(), order, r.variant.clone()))
            .or_default()
            .entry(r.method)
            .or_default()
            .push(r.makespan);
    }
    groups
        .into_iter()
        .map(|((instance, _, variant), by)| {
            let get = |m: Method| by.get(&m).and_then(|v| mean(v));
            let (h, a, p) = (get(Method::Heuristics), get(Method::Alns), get(Method::Pipeline));
            CellSummary {
                instance,
                variant,
                heuristics: h,
                alns: a,
                pipeline: p,
                alns_impr_pct: h.zip(a).map(|(h, a)| improvement_pct(h, a)),
                pipeline_impr_pct: a.zip(p).map(|(a, p)| improvement_pct(a, p)),
            }
        })
        .collect()
}

fn variant_order(v: &str) -> usize {
    v.parse::<VariantKind>()
        .ok()
        .and_then(|k| VariantKind::ALL.iter().position(|&x| x == k))
        .unwrap_or(usize::MAX)
}

/// One line of the hypothesis table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisRow {
    pub variant: String,
    pub metric: String,
    pub pairs: usize,
    pub base_mean: f64,
    pub variant_mean: f64,
    /// Mean paired difference, percentage points.
    pub delta: f64,
    pub w: Option<f64>,
    pub p: Option<f64>,
    pub cohens_d: Option<f64>,
    /// Why the test statistics are missing, if they are.
    pub note: String,
}

/// Per-instance means of a coordination metric for the most refined method
/// present in the rows (pipeline, then ALNS, then heuristics).
fn metric_means(rows: &[ResultRow], variant: &str, cross: bool) -> BTreeMap<String, f64> {
    let method = [Method::Pipeline, Method::Alns, Method::Heuristics]
        .into_iter()
        .find(|&m| rows.iter().any(|r| r.ok() && r.method == m))
        .unwrap_or(Method::Pipeline);
    let mut acc: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.ok() && r.method == method && r.variant == variant) {
        let x = if cross { r.cross_agent_pct } else { r.interleaved_pct };
        acc.entry(r.instance.clone()).or_default().push(x);
    }
    acc.into_iter().filter_map(|(k, v)| mean(&v).map(|m| (k, m))).collect()
}

/// Paired one-sided tests of each non-base variant against base, over
/// instances, for the cross-agent and interleaved percentages.
pub fn hypothesis_table(rows: &[ResultRow]) -> Vec<HypothesisRow> {
    let mut variants: Vec<String> = rows.iter().filter(|r| r.ok()).map(|r| r.variant.clone()).collect();
    variants.sort_by_key(|v| (variant_order(v), v.clone()));
    variants.dedup();
    let mut out = Vec::new();
    for variant in variants.iter().filter(|v| v.as_str() != "base") {
        for (metric, cross) in [("cross_agent_pct", true), ("interleaved_pct", false)] {
            let base = metric_means(rows, "base", cross);
            let var = metric_means(rows, variant, cross);
            let pairs: Vec<(f64, f64)> = base
                .iter()
                .filter_map(|(inst, &b)| var.get(inst).map(|&v| (b, v)))
                .collect();
            let bm = mean(&pairs.iter().map(|p| p.0).collect::<Vec<_>>()).unwrap_or(f64::NAN);
            let vm = mean(&pairs.iter().map(|p| p.1).collect::<Vec<_>>()).unwrap_or(f64::NAN);
            let mut note = Vec::new();
            let wil = wilcoxon_signed_rank(&pairs).map_err(|e| note.push(e.to_string())).ok();
            let d = cohens_d_paired(&pairs).map_err(|e| note.push(e.to_string())).ok();
            out.push(HypothesisRow {
                variant: variant.clone(),
                metric: metric.to_string(),
                pairs: pairs.len(),
                base_mean: bm,
                variant_mean: vm,
                delta: vm - bm,
                w: wil.map(|r| r.w),
                p: wil.map(|r| r.p),
                cohens_d: d,
                note: note.join("; "),
            });
        }
    }
    out
}
