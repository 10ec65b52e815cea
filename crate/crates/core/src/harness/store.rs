//! On-disk run state: a manifest, an append-only per-replication CSV that
//! doubles as the resume log, and the aggregate and figure-data CSVs.

use std::collections::{BTreeSet, HashMap};
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::{AggregateResult, ApplicationSpec, Arm, ArmRecord, PipelineConfig, RecordStatus, ReplicationResult};
use crate::error::{Error, Result};
use crate::simgen::{Calibration, ScenarioConfig};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const REPLICATIONS_FILE: &str = "replications.csv";
pub const AGGREGATES_FILE: &str = "aggregates.csv";
pub const FIGURE_FILE: &str = "figure_data.csv";

const REPLICATION_HEADER: [&str; 7] = ["scenario_id", "rep", "method", "gini", "model_size", "status", "fit_ms"];
const NA: &str = "NA";

/// Everything that determines a run's results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RunSpec {
    Simulation {
        scenarios: Vec<ScenarioConfig>,
        calibration: Calibration,
        pipeline: PipelineConfig,
    },
    Application {
        application: ApplicationSpec,
        data_fingerprint: u64,
        pipeline: PipelineConfig,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub software: String,
    pub version: String,
    /// Informational; results do not depend on it.
    pub parallelism: usize,
    pub run: RunSpec,
}

impl Manifest {
    pub fn new(run: RunSpec, parallelism: usize) -> Self {
        Self {
            software: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            parallelism,
            run,
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

/// Replications already on disk, keyed by (unit id, replication index).
pub type Completed = HashMap<(String, usize), ReplicationResult>;

/// Serialized, flushed appends of finished replications.
pub struct RunStore {
    dir: PathBuf,
    writer: Mutex<csv::Writer<File>>,
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| NA.to_string(), |x| x.to_string())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

impl RunStore {
    /// Opens `dir` for `run`, returning the replications already completed
    /// there. A manifest describing a different run is an error; partially
    /// written replications are discarded.
    pub fn open(
        dir: &Path,
        run: RunSpec,
        parallelism: usize,
        arms: &[Arm],
    ) -> Result<(Self, Completed)> {
        fs::create_dir_all(dir)?;
        let manifest_path = dir.join(MANIFEST_FILE);
        if manifest_path.exists() {
            let old = Manifest::read(&manifest_path)?;
            if old.run != run {
                return Err(Error::ResumeMismatch(format!(
                    "{} describes a different run; use a fresh output directory",
                    manifest_path.display()
                )));
            }
        }
        let manifest = Manifest::new(run, parallelism);
        write_atomic(&manifest_path, serde_json::to_string_pretty(&manifest)?.as_bytes())?;

        let reps_path = dir.join(REPLICATIONS_FILE);
        let done = if reps_path.exists() {
            load_replications(&reps_path, arms)?
        } else {
            Vec::new()
        };
        // rewrite without any partial tail
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(REPLICATION_HEADER)?;
        for rep in &done {
            write_replication(&mut w, rep)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        write_atomic(&reps_path, &bytes)?;

        let file = OpenOptions::new().append(true).open(&reps_path)?;
        let writer = csv::WriterBuilder::new().has_headers(false).from_writer(file);
        let map = done
            .into_iter()
            .map(|r| ((r.scenario_id.clone(), r.rep_index), r))
            .collect();
        Ok((
            Self {
                dir: dir.to_path_buf(),
                writer: Mutex::new(writer),
            },
            map,
        ))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn append(&self, rep: &ReplicationResult) -> Result<()> {
        let mut w = self.writer.lock().expect("replication writer poisoned");
        write_replication(&mut w, rep)?;
        w.flush()?;
        Ok(())
    }

    pub fn write_aggregates(&self, aggregates: &[AggregateResult]) -> Result<()> {
        let mut buf = Vec::new();
        write_aggregates_csv(&mut buf, aggregates)?;
        write_atomic(&self.dir.join(AGGREGATES_FILE), &buf)?;
        let mut buf = Vec::new();
        write_figure_csv(&mut buf, aggregates)?;
        write_atomic(&self.dir.join(FIGURE_FILE), &buf)
    }
}

fn write_replication<W: Write>(w: &mut csv::Writer<W>, rep: &ReplicationResult) -> Result<()> {
    for r in &rep.records {
        w.write_record([
            rep.scenario_id.clone(),
            rep.rep_index.to_string(),
            r.arm.to_string(),
            opt(r.gini),
            r.model_size.to_string(),
            r.status.as_str().to_string(),
            format!("{:.3}", r.fit_ms),
        ])?;
    }
    Ok(())
}

/// Complete replications from a per-replication CSV, in file order. A
/// replication is complete when it has a row for every arm in `arms`.
pub fn load_replications(path: &Path, arms: &[Arm]) -> Result<Vec<ReplicationResult>> {
    let mut reader = csv::Reader::from_path(path)?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != REPLICATION_HEADER {
        return Err(Error::ResumeMismatch(format!("unexpected header in {}", path.display())));
    }
    let mut order: Vec<(String, usize)> = Vec::new();
    let mut groups: HashMap<(String, usize), Vec<ArmRecord>> = HashMap::new();
    for rec in reader.records() {
        let rec = match rec {
            Ok(r) if r.len() == REPLICATION_HEADER.len() => r,
            // a torn final line from an interrupted write
            _ => continue,
        };
        let parsed = (|| -> Result<((String, usize), ArmRecord)> {
            let bad = |what: &str| Error::ResumeMismatch(format!("bad {what} in {}", path.display()));
            let key = (rec[0].to_string(), rec[1].parse().map_err(|_| bad("rep"))?);
            let gini = match &rec[3] {
                NA => None,
                g => Some(g.parse().map_err(|_| bad("gini"))?),
            };
            Ok((
                key,
                ArmRecord {
                    arm: rec[2].parse()?,
                    gini,
                    model_size: rec[4].parse().map_err(|_| bad("model_size"))?,
                    status: rec[5].parse::<RecordStatus>()?,
                    fit_ms: rec[6].parse().map_err(|_| bad("fit_ms"))?,
                },
            ))
        })();
        let Ok((key, record)) = parsed else { continue };
        if !groups.contains_key(&key) {
            order.push(key.clone());
        }
        groups.entry(key).or_default().push(record);
    }
    let wanted: BTreeSet<Arm> = arms.iter().copied().collect();
    let mut out = Vec::new();
    for key in order {
        let mut records = groups.remove(&key).expect("grouped");
        let present: BTreeSet<Arm> = records.iter().map(|r| r.arm).collect();
        if records.len() != arms.len() || present != wanted {
            continue;
        }
        records.sort_by_key(|r| arms.iter().position(|&a| a == r.arm));
        out.push(ReplicationResult {
            scenario_id: key.0,
            rep_index: key.1,
            records,
        });
    }
    Ok(out)
}

fn unit_columns(a: &AggregateResult) -> [String; 6] {
    let u = &a.unit;
    [
        u.id.clone(),
        u.p.to_string(),
        u.n.to_string(),
        (u.p as f64 / u.n as f64).to_string(),
        u.ore.to_string(),
        u.rho.map_or_else(|| NA.to_string(), |r| r.to_string()),
    ]
}

/// One row per (unit, arm) with mean and SD of the Gini.
pub fn write_aggregates_csv<W: Write>(out: W, aggregates: &[AggregateResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "scenario_id",
        "p",
        "n",
        "p_over_n",
        "ore",
        "rho",
        "method",
        "n_reps",
        "n_valid",
        "mean_gini",
        "sd_gini",
        "mean_model_size",
    ])?;
    for a in aggregates {
        for s in &a.arms {
            let mut rec: Vec<String> = unit_columns(a).into();
            rec.extend([
                s.arm.to_string(),
                a.n_reps.to_string(),
                s.n_valid.to_string(),
                opt(s.mean_gini),
                opt(s.sd_gini),
                opt(s.mean_model_size),
            ]);
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Mean Gini per (unit, fitted method): the series behind the p/n figures.
pub fn write_figure_csv<W: Write>(out: W, aggregates: &[AggregateResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["scenario_id", "p", "n", "p_over_n", "ore", "rho", "method", "mean_gini"])?;
    for a in aggregates {
        for s in a.arms.iter().filter(|s| s.arm != Arm::Oracle) {
            let mut rec: Vec<String> = unit_columns(a).into();
            rec.extend([s.arm.to_string(), opt(s.mean_gini)]);
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}
