//! Declarative probe suites and the classification table.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::density::{to_f64, Density};
use crate::entropy::{independence_search, IndependenceOutcome, SearchParams};
use crate::error::{invalid, Error, Result};
use crate::factor::{extract_periodic_structure, regularity_check, PeriodicStructure};
use crate::probes::{diam_mean_probe, mean_equicontinuity_scan, ProbeVerdict, Sampling, Verdict, Witness, DEFAULT_M_SCAN};
use crate::seed;
use crate::systems::{
    full_shift, parse_word, periodic_model, powers_subshift, regular_toeplitz_example, single_one_subshift,
    sturmian_model, CircleFraction, Cylinder, SideInfo, SubshiftModel,
};

/// A built-in model and its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    SingleOne,
    Powers,
    Toeplitz,
    Sturmian {
        alpha: CircleFraction,
        #[serde(default = "zero_phase")]
        beta: CircleFraction,
    },
    FullShift {
        alphabet_size: u8,
    },
    /// Orbit of `word^∞`, written one digit per symbol.
    Periodic {
        word: String,
    },
}

fn zero_phase() -> CircleFraction {
    CircleFraction::ZERO
}

impl ModelSpec {
    pub fn build(&self, horizon: u64) -> Result<SubshiftModel> {
        match self {
            ModelSpec::SingleOne => Ok(single_one_subshift()),
            ModelSpec::Powers => Ok(powers_subshift()),
            ModelSpec::Toeplitz => regular_toeplitz_example(horizon),
            ModelSpec::Sturmian { alpha, beta } => sturmian_model(*alpha, *beta),
            ModelSpec::FullShift { alphabet_size } => full_shift(*alphabet_size),
            ModelSpec::Periodic { word } => periodic_model(&parse_word(word)?),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemDecl {
    pub name: String,
    #[serde(flatten)]
    pub model: ModelSpec,
}

/// Where a probe's cylinder comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CylinderSpec {
    /// An explicit word at offset 0.
    Word(String),
    /// The first `n` symbols of the model's base point.
    Prefix(usize),
}

impl CylinderSpec {
    fn resolve(&self, model: &SubshiftModel) -> Result<Cylinder> {
        match self {
            CylinderSpec::Word(w) => Cylinder::at_origin(parse_word(w)?),
            CylinderSpec::Prefix(n) => Cylinder::at_origin(model.base_point().prefix(*n)[..*n].to_vec()),
        }
    }
}

fn default_m_scan() -> Vec<usize> {
    DEFAULT_M_SCAN.to_vec()
}

fn default_max_position() -> usize {
    64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "probe", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProbeKind {
    MeanEq {
        #[serde(with = "crate::density::ratio_serde")]
        epsilon: Density,
        #[serde(default = "default_m_scan")]
        m: Vec<usize>,
    },
    DiamMean {
        cylinder: CylinderSpec,
        r: usize,
        #[serde(default)]
        lower: bool,
    },
    /// Fails on an independence set of size `k` for `([u], [v])`.
    Null {
        u: String,
        v: String,
        k: usize,
        #[serde(default = "default_max_position")]
        max_position: usize,
    },
    Regularity {
        #[serde(with = "crate::density::ratio_serde")]
        tolerance: Density,
        /// Extract from the base point up to this period instead of using
        /// the model's exact skeleton.
        #[serde(default)]
        max_period: Option<u64>,
    },
}

impl ProbeKind {
    fn name(&self) -> &'static str {
        match self {
            ProbeKind::MeanEq { .. } => "mean_eq",
            ProbeKind::DiamMean { lower: false, .. } => "diam_mean",
            ProbeKind::DiamMean { lower: true, .. } => "diam_mean_lower",
            ProbeKind::Null { .. } => "null",
            ProbeKind::Regularity { .. } => "regularity",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeDecl {
    #[serde(flatten)]
    pub kind: ProbeKind,
    /// Key in the row; defaults to the probe name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Systems to run on; all when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub systems: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<u64>,
}

impl ProbeDecl {
    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.kind.name().to_string())
    }

    fn applies_to(&self, system: &str) -> bool {
        self.systems.as_ref().is_none_or(|s| s.iter().any(|n| n == system))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    /// Neighbors sampled per source by the sampling probes.
    pub neighbors: usize,
    /// Words or tuples a predicate enumeration may produce.
    pub enumeration: usize,
    /// Candidate sets evaluated by the independence search.
    pub nodes: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            neighbors: 16,
            enumeration: 1 << 20,
            nodes: 1 << 20,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(invalid(format!("unknown format {s:?}; expected json or csv"))),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
        })
    }
}

fn default_horizon() -> u64 {
    1 << 16
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    #[serde(default = "default_horizon")]
    pub horizon: u64,
    #[serde(default)]
    pub budgets: Budgets,
    #[serde(default)]
    pub format: ReportFormat,
    pub systems: Vec<SystemDecl>,
    pub probes: Vec<ProbeDecl>,
}

impl SuiteConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: SuiteConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Names unique and resolvable, labels unique per system, models
    /// constructible.
    pub fn validate(&self) -> Result<()> {
        if self.systems.is_empty() {
            return Err(invalid("suite declares no systems"));
        }
        let mut names = BTreeSet::new();
        for s in &self.systems {
            if !names.insert(s.name.as_str()) {
                return Err(invalid(format!("duplicate system name {:?}", s.name)));
            }
            s.model.build(self.horizon)?;
        }
        for p in &self.probes {
            for n in p.systems.iter().flatten() {
                if !names.contains(n.as_str()) {
                    return Err(Error::UnknownSystem(n.clone()));
                }
            }
        }
        for s in &self.systems {
            let mut labels = BTreeSet::new();
            for p in self.probes.iter().filter(|p| p.applies_to(&s.name)) {
                if !labels.insert(p.label()) {
                    return Err(invalid(format!("probe label {:?} used twice on {:?}", p.label(), s.name)));
                }
            }
        }
        Ok(())
    }
}

/// A probe's verdict or the error it stopped with.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ProbeRecord {
    Verdict(ProbeVerdict),
    Error { probe: String, error: String },
}

impl ProbeRecord {
    fn verdict_of(&self, probe: &str) -> Option<Verdict> {
        match self {
            ProbeRecord::Verdict(v) if v.probe == probe => Some(v.verdict),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationRow {
    pub system: String,
    pub verdicts: BTreeMap<String, ProbeRecord>,
    pub chain_consistent: bool,
}

/// False exactly when the row shows null pass with diam_mean fail, or
/// diam_mean pass with mean_eq fail.
pub fn chain_consistent(verdicts: &BTreeMap<String, ProbeRecord>) -> bool {
    let has = |probe: &str, v: Verdict| verdicts.values().any(|r| r.verdict_of(probe) == Some(v));
    let broken = (has("null", Verdict::Pass) && has("diam_mean", Verdict::Fail))
        || (has("diam_mean", Verdict::Pass) && has("mean_eq", Verdict::Fail));
    !broken
}

struct ProbeContext<'a> {
    model: &'a SubshiftModel,
    horizon: u64,
    budgets: Budgets,
    master_seed: u64,
    seed: u64,
}

impl ProbeContext<'_> {
    fn provenance(&self, v: &mut ProbeVerdict) {
        v.parameters.insert("master_seed".into(), json!(self.master_seed));
        v.parameters.entry("seed".into()).or_insert(json!(self.seed));
        v.parameters.entry("horizon".into()).or_insert(json!(self.horizon));
        v.parameters.entry("budget".into()).or_insert(json!(self.budgets.neighbors));
    }
}

fn run_probe(kind: &ProbeKind, cx: &ProbeContext<'_>) -> Result<ProbeVerdict> {
    let mut v = match kind {
        ProbeKind::MeanEq { epsilon, m } => {
            let sampling = Sampling {
                horizon: cx.horizon,
                budget: cx.budgets.neighbors,
                seed: cx.seed,
            };
            mean_equicontinuity_scan(cx.model, cx.model.base_point(), *epsilon, m, &sampling)?
        }
        ProbeKind::DiamMean { cylinder, r, lower } => {
            let u = cylinder.resolve(cx.model)?;
            let mut v = diam_mean_probe(cx.model, &u, *r, cx.horizon, cx.budgets.enumeration, *lower)?;
            v.parameters.insert("enumeration_budget".into(), json!(cx.budgets.enumeration));
            v
        }
        ProbeKind::Null { u, v, k, max_position } => null_probe(cx, u, v, *k, *max_position)?,
        ProbeKind::Regularity { tolerance, max_period } => regularity_probe(cx, *tolerance, *max_period)?,
    };
    cx.provenance(&mut v);
    Ok(v)
}

fn null_probe(cx: &ProbeContext<'_>, u: &str, v: &str, k: usize, max_position: usize) -> Result<ProbeVerdict> {
    let params = SearchParams {
        max_k: k,
        horizon: cx.horizon as usize,
        node_budget: cx.budgets.nodes,
        max_position,
        enum_budget: cx.budgets.enumeration,
    };
    let report = independence_search(cx.model, u, v, &params)?;
    let best = report.outcome.certificate().map_or(0, |c| c.size());
    let verdict = if best >= k {
        Verdict::Fail
    } else if report.outcome.exhaustive() {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    let witness = match &report.outcome {
        IndependenceOutcome::Found { certificate } if best >= k => Some(Witness::Independence {
            certificate: certificate.clone(),
        }),
        _ => None,
    };
    let outcome = match report.outcome {
        IndependenceOutcome::Found { .. } => "found",
        IndependenceOutcome::None => "none",
        IndependenceOutcome::BudgetExhausted { .. } => "budget_exhausted",
    };
    Ok(ProbeVerdict {
        probe: "null".into(),
        parameters: BTreeMap::from([
            ("u".into(), json!(u)),
            ("v".into(), json!(v)),
            ("k".into(), json!(k)),
            ("max_position".into(), json!(max_position)),
            ("budget".into(), json!(cx.budgets.nodes)),
            ("enumeration_budget".into(), json!(cx.budgets.enumeration)),
        ]),
        verdict,
        witness,
        statistic: Ratio::from_integer(best as u64),
        diagnostics: BTreeMap::from([
            ("best_size".into(), json!(best)),
            ("nodes".into(), json!(report.nodes)),
            ("outcome".into(), json!(outcome)),
        ]),
    })
}

fn big_to_density(r: &BigRational) -> Option<Density> {
    Some(Ratio::new(r.numer().to_u64()?, r.denom().to_u64()?))
}

fn regularity_probe(cx: &ProbeContext<'_>, tolerance: Density, max_period: Option<u64>) -> Result<ProbeVerdict> {
    let structure: PeriodicStructure = match (max_period, &cx.model.side_info) {
        (Some(p), _) => extract_periodic_structure(cx.model.base_point(), p, cx.horizon)?,
        (None, SideInfo::Toeplitz { skeleton }) => skeleton.clone(),
        (None, _) => return Err(invalid("regularity needs max_period for a model without a Toeplitz skeleton")),
    };
    let verdict = regularity_check(&structure, tolerance);
    let deficit = structure.deficit();
    let statistic = big_to_density(&deficit).unwrap_or_else(|| {
        // Deficits with huge denominators are reported to 2^-32.
        let scaled = (deficit.clone() * BigRational::from_integer(BigInt::from(1u64 << 32))).ceil();
        Ratio::new(scaled.numer().to_u64().unwrap_or(1 << 32), 1 << 32)
    });
    let mut parameters = BTreeMap::from([("tolerance".into(), json!(format!("{tolerance}")))]);
    if let Some(p) = max_period {
        parameters.insert("max_period".into(), json!(p));
    }
    let coverage = if deficit.is_zero() { Value::from("1/1") } else { json!(format!("{}", structure.coverage_sum)) };
    Ok(ProbeVerdict {
        probe: "regularity".into(),
        parameters,
        verdict,
        witness: None,
        statistic,
        diagnostics: BTreeMap::from([
            ("coverage_sum".into(), coverage),
            ("coverage_value".into(), json!(structure.coverage_f64())),
            ("progressions".into(), json!(structure.progressions.len())),
            ("climbing".into(), json!(structure.climbing)),
            ("source".into(), serde_json::to_value(structure.source)?),
        ]),
    })
}

fn run_row(config: &SuiteConfig, index: usize) -> Result<ClassificationRow> {
    let decl = &config.systems[index];
    let system_seed = seed::derive(config.seed, index as u64);
    let mut verdicts = BTreeMap::new();
    let mut models: BTreeMap<u64, SubshiftModel> = BTreeMap::new();
    for (j, probe) in config.probes.iter().enumerate() {
        if !probe.applies_to(&decl.name) {
            continue;
        }
        let horizon = probe.horizon.unwrap_or(config.horizon);
        if let std::collections::btree_map::Entry::Vacant(e) = models.entry(horizon) {
            e.insert(decl.model.build(horizon)?);
        }
        let cx = ProbeContext {
            model: &models[&horizon],
            horizon,
            budgets: config.budgets,
            master_seed: config.seed,
            seed: seed::derive(system_seed, j as u64),
        };
        let record = match run_probe(&probe.kind, &cx) {
            Ok(v) => ProbeRecord::Verdict(v),
            Err(e) => ProbeRecord::Error {
                probe: probe.kind.name().into(),
                error: e.to_string(),
            },
        };
        verdicts.insert(probe.label(), record);
    }
    Ok(ClassificationRow {
        system: decl.name.clone(),
        chain_consistent: chain_consistent(&verdicts),
        verdicts,
    })
}

/// Runs every applicable probe on every system, systems in parallel; rows
/// come back in config order.
pub fn run_suite(config: &SuiteConfig) -> Result<Vec<ClassificationRow>> {
    config.validate()?;
    (0..config.systems.len())
        .into_par_iter()
        .map(|i| run_row(config, i))
        .collect()
}

/// JSON: an array with one object per row. CSV: one line per row with
/// verdict, statistic and provenance columns for every probe label.
pub fn emit_report(rows: &[ClassificationRow], format: ReportFormat) -> Result<String> {
    if rows.is_empty() {
        return Err(invalid("no rows to report"));
    }
    match format {
        ReportFormat::Json => Ok(serde_json::to_string_pretty(rows)? + "\n"),
        ReportFormat::Csv => {
            let labels: BTreeSet<&String> = rows.iter().flat_map(|r| r.verdicts.keys()).collect();
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["system".to_string(), "chain_consistent".to_string()];
            for l in &labels {
                for suffix in ["", "_statistic", "_horizon", "_seed", "_budget"] {
                    header.push(format!("{l}{suffix}"));
                }
            }
            w.write_record(&header)?;
            for row in rows {
                let mut record = vec![row.system.clone(), row.chain_consistent.to_string()];
                for l in &labels {
                    match row.verdicts.get(*l) {
                        Some(ProbeRecord::Verdict(v)) => {
                            let param = |k: &str| v.parameters.get(k).map_or(String::new(), |x| x.to_string());
                            record.push(serde_json::to_value(v.verdict)?.as_str().unwrap_or_default().to_string());
                            record.push(format!("{}", to_f64(v.statistic)));
                            record.push(param("horizon"));
                            record.push(param("seed"));
                            record.push(param("budget"));
                        }
                        Some(ProbeRecord::Error { .. }) => {
                            record.push("error".into());
                            record.extend(std::iter::repeat_n(String::new(), 4));
                        }
                        None => record.extend(std::iter::repeat_n(String::new(), 5)),
                    }
                }
                w.write_record(&record)?;
            }
            let bytes = w.into_inner().map_err(|e| invalid(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| invalid(e.to_string()))
        }
    }
}

/// The three example systems with the probes that place them on the chain.
pub fn builtin_suite(seed: u64, horizon: u64) -> SuiteConfig {
    let only = |names: &[&str]| Some(names.iter().map(|s| s.to_string()).collect());
    let decl = |kind, systems| ProbeDecl {
        kind,
        label: None,
        systems,
        horizon: None,
    };
    SuiteConfig {
        seed,
        horizon,
        budgets: Budgets::default(),
        format: ReportFormat::Json,
        systems: vec![
            SystemDecl {
                name: "single_one".into(),
                model: ModelSpec::SingleOne,
            },
            SystemDecl {
                name: "powers".into(),
                model: ModelSpec::Powers,
            },
            SystemDecl {
                name: "regular_toeplitz".into(),
                model: ModelSpec::Toeplitz,
            },
        ],
        probes: vec![
            decl(
                ProbeKind::MeanEq {
                    epsilon: Ratio::new(1, 10),
                    m: default_m_scan(),
                },
                only(&["single_one", "powers"]),
            ),
            decl(
                ProbeKind::DiamMean {
                    cylinder: CylinderSpec::Word("0000".into()),
                    r: 1,
                    lower: false,
                },
                only(&["single_one"]),
            ),
            decl(
                ProbeKind::DiamMean {
                    cylinder: CylinderSpec::Prefix(8),
                    r: 1,
                    lower: false,
                },
                only(&["regular_toeplitz"]),
            ),
            decl(
                ProbeKind::Null {
                    u: "0".into(),
                    v: "1".into(),
                    k: 4,
                    max_position: 64,
                },
                only(&["powers"]),
            ),
            decl(
                ProbeKind::Null {
                    u: "0".into(),
                    v: "1".into(),
                    k: 3,
                    max_position: 64,
                },
                only(&["regular_toeplitz"]),
            ),
            decl(
                ProbeKind::Regularity {
                    tolerance: Ratio::new(1, 512),
                    max_period: None,
                },
                only(&["regular_toeplitz"]),
            ),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn verdict(row: &ClassificationRow, label: &str) -> Verdict {
        match &row.verdicts[label] {
            ProbeRecord::Verdict(v) => v.verdict,
            ProbeRecord::Error { error, .. } => panic!("{label}: {error}"),
        }
    }

    #[test]
    fn builtin_rows() {
        let rows = run_suite(&builtin_suite(7, 1 << 14)).unwrap();
        let names: Vec<&str> = rows.iter().map(|r| r.system.as_str()).collect();
        assert_eq!(names, ["single_one", "powers", "regular_toeplitz"]);
        assert_eq!(verdict(&rows[0], "mean_eq"), Verdict::Pass);
        assert_eq!(verdict(&rows[0], "diam_mean"), Verdict::Fail);
        assert_eq!(verdict(&rows[1], "mean_eq"), Verdict::Pass);
        assert_eq!(verdict(&rows[1], "null"), Verdict::Fail);
        assert_eq!(verdict(&rows[2], "regularity"), Verdict::Pass);
        assert_eq!(verdict(&rows[2], "diam_mean"), Verdict::Pass);
        assert_eq!(verdict(&rows[2], "null"), Verdict::Fail);
        assert!(rows.iter().all(|r| r.chain_consistent));
    }

    #[test]
    fn config_round_trip() {
        let config = builtin_suite(3, 1024);
        let text = serde_json::to_string(&config).unwrap();
        assert_eq!(SuiteConfig::from_json(&text).unwrap(), config);
    }

    #[test]
    fn seed_is_mandatory() {
        let text = r#"{"systems":[{"name":"a","kind":"single_one"}],"probes":[]}"#;
        assert!(SuiteConfig::from_json(text).is_err());
    }

    #[test]
    fn unknown_system_rejected() {
        let text = r#"{"seed":1,"systems":[{"name":"a","kind":"single_one"}],
            "probes":[{"probe":"mean_eq","epsilon":"1/10","systems":["b"]}]}"#;
        assert!(matches!(SuiteConfig::from_json(text), Err(Error::UnknownSystem(_))));
    }

    #[test]
    fn probe_errors_stay_in_the_row() {
        let text = r#"{"seed":1,"horizon":4096,"systems":[{"name":"p","kind":"periodic","word":"01"}],
            "probes":[{"probe":"regularity","tolerance":"1/100"},
                      {"probe":"mean_eq","epsilon":"1/10"}]}"#;
        let rows = run_suite(&SuiteConfig::from_json(text).unwrap()).unwrap();
        assert!(matches!(rows[0].verdicts["regularity"], ProbeRecord::Error { .. }));
        assert!(matches!(rows[0].verdicts["mean_eq"], ProbeRecord::Verdict(_)));
    }

    fn record(probe: &str, verdict: Verdict) -> ProbeRecord {
        ProbeRecord::Verdict(ProbeVerdict {
            probe: probe.into(),
            parameters: BTreeMap::new(),
            verdict,
            witness: None,
            statistic: Ratio::new(0, 1),
            diagnostics: BTreeMap::new(),
        })
    }

    #[test]
    fn chain_flags() {
        let row = |items: &[(&str, Verdict)]| -> BTreeMap<String, ProbeRecord> {
            items.iter().map(|(p, v)| (p.to_string(), record(p, *v))).collect()
        };
        assert!(!chain_consistent(&row(&[("null", Verdict::Pass), ("diam_mean", Verdict::Fail)])));
        assert!(!chain_consistent(&row(&[("diam_mean", Verdict::Pass), ("mean_eq", Verdict::Fail)])));
        assert!(chain_consistent(&row(&[("null", Verdict::Pass), ("mean_eq", Verdict::Fail)])));
        assert!(chain_consistent(&row(&[("null", Verdict::Fail), ("diam_mean", Verdict::Pass)])));
        assert!(chain_consistent(&row(&[("mean_eq", Verdict::Pass), ("diam_mean", Verdict::Fail)])));
        assert!(chain_consistent(&row(&[("diam_mean", Verdict::Inconclusive), ("mean_eq", Verdict::Fail)])));
    }

    #[test]
    fn csv_has_header_and_one_line_per_row() {
        let rows = run_suite(&builtin_suite(7, 1 << 12)).unwrap();
        let text = emit_report(&rows, ReportFormat::Csv).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("system,chain_consistent,"));
        let one = emit_report(&rows[..1], ReportFormat::Json).unwrap();
        let v: Value = serde_json::from_str(&one).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 1);
        assert!(emit_report(&[], ReportFormat::Json).is_err());
    }
}
