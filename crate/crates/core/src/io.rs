//! File formats: spike-event CSVs, fitness and ASDR tables, genome JSON,
//! connectivity edge lists, TOML configs, and run directories.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{record_counts, replay, BoundsOverride, EvolutionConfig, EvolutionResult};
use crate::genome::{GeneBounds, Genome};
use crate::metrics::{asdr, Spike};
use crate::neuron::ModelParams;
use crate::sim::SpikeRecord;
use crate::svg;
use crate::topology::{Connectivity, ModelKind, OBSERVED_CHANNELS};

pub const SPIKES_HEADER: [&str; 2] = ["time_s", "channel"];
pub const FITNESS_HEADER: [&str; 5] = ["trial", "generation", "individual", "objective_f", "score"];
pub const ASDR_HEADER: [&str; 2] = ["second", "spike_count"];
pub const EDGES_HEADER: [&str; 2] = ["pre", "post"];
pub const SIGNS_HEADER: [&str; 2] = ["node", "sign"];

/// Marker written after every other artifact of a run directory.
pub const COMPLETE_MARKER: &str = "COMPLETE";

fn reader(path: &Path) -> Result<csv::Reader<fs::File>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new().has_headers(true).from_reader(file))
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file))
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        kind => Error::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("{kind:?}"),
        },
    }
}

fn check_header(path: &Path, rdr: &mut csv::Reader<fs::File>, expected: &[&str]) -> Result<()> {
    let headers = rdr.headers().map_err(|e| csv_err(path, e))?;
    // an empty file has no header row at all
    if headers.is_empty() {
        return Ok(());
    }
    if headers.iter().ne(expected.iter().copied()) {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: format!(
                "expected header '{}', found '{}'",
                expected.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    Ok(())
}

fn parse_field<T: std::str::FromStr>(path: &Path, line: u64, field: Option<&str>, name: &str) -> Result<T> {
    let raw = field.ok_or_else(|| Error::Parse {
        path: path.to_path_buf(),
        line,
        message: format!("missing field '{name}'"),
    })?;
    raw.trim().parse().map_err(|_| Error::Parse {
        path: path.to_path_buf(),
        line,
        message: format!("invalid {name} '{raw}'"),
    })
}

fn for_each_record<F>(path: &Path, header: &[&str], mut f: F) -> Result<()>
where
    F: FnMut(u64, &csv::StringRecord) -> Result<()>,
{
    let mut rdr = reader(path)?;
    check_header(path, &mut rdr, header)?;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != header.len() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("expected {} fields, found {}", header.len(), rec.len()),
            });
        }
        f(line, &rec)?;
    }
    Ok(())
}

/// Loads a spike-event CSV sorted by time, then channel.
///
/// With a window, only spikes in `[offset, offset + window)` are kept and
/// their times are shifted to start at 0.
pub fn load_spike_events_at(
    path: impl AsRef<Path>,
    offset_seconds: f64,
    window_seconds: Option<f64>,
) -> Result<Vec<Spike>> {
    let path = path.as_ref();
    let mut spikes = Vec::new();
    for_each_record(path, &SPIKES_HEADER, |line, rec| {
        let time_s: f64 = parse_field(path, line, rec.get(0), "time_s")?;
        let channel: usize = parse_field(path, line, rec.get(1), "channel")?;
        if !time_s.is_finite() || time_s < 0.0 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("time {time_s} must be finite and >= 0"),
            });
        }
        if channel >= OBSERVED_CHANNELS {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("channel {channel} outside 0..{OBSERVED_CHANNELS}"),
            });
        }
        spikes.push(Spike { time_s, channel });
        Ok(())
    })?;
    spikes.sort_by(|a, b| a.time_s.total_cmp(&b.time_s).then(a.channel.cmp(&b.channel)));
    if offset_seconds != 0.0 || window_seconds.is_some() {
        let end = window_seconds.map_or(f64::INFINITY, |w| offset_seconds + w);
        spikes.retain(|s| s.time_s >= offset_seconds && s.time_s < end);
        if offset_seconds != 0.0 {
            for s in &mut spikes {
                s.time_s -= offset_seconds;
            }
        }
    }
    Ok(spikes)
}

pub fn load_spike_events(path: impl AsRef<Path>, window_seconds: Option<f64>) -> Result<Vec<Spike>> {
    load_spike_events_at(path, 0.0, window_seconds)
}

pub fn write_spike_events(path: impl AsRef<Path>, spikes: &[Spike]) -> Result<()> {
    let path = path.as_ref();
    let mut w = writer(path)?;
    w.write_record(SPIKES_HEADER).map_err(|e| csv_err(path, e))?;
    for s in spikes {
        w.write_record([s.time_s.to_string(), s.channel.to_string()])
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitnessRow {
    pub trial: u32,
    pub generation: u32,
    pub individual: usize,
    pub objective: f64,
    pub score: f64,
}

pub fn fitness_rows(result: &EvolutionResult) -> Vec<FitnessRow> {
    result
        .generations
        .iter()
        .flat_map(|g| {
            g.fitness.iter().enumerate().map(move |(i, f)| FitnessRow {
                trial: result.trial,
                generation: g.generation,
                individual: i,
                objective: f.objective,
                score: f.score,
            })
        })
        .collect()
}

pub fn write_fitness(path: impl AsRef<Path>, rows: &[FitnessRow]) -> Result<()> {
    let path = path.as_ref();
    let mut w = writer(path)?;
    w.write_record(FITNESS_HEADER).map_err(|e| csv_err(path, e))?;
    for r in rows {
        w.write_record([
            r.trial.to_string(),
            r.generation.to_string(),
            r.individual.to_string(),
            r.objective.to_string(),
            r.score.to_string(),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_fitness(path: impl AsRef<Path>) -> Result<Vec<FitnessRow>> {
    let path = path.as_ref();
    let mut rows = Vec::new();
    for_each_record(path, &FITNESS_HEADER, |line, rec| {
        rows.push(FitnessRow {
            trial: parse_field(path, line, rec.get(0), "trial")?,
            generation: parse_field(path, line, rec.get(1), "generation")?,
            individual: parse_field(path, line, rec.get(2), "individual")?,
            objective: parse_field(path, line, rec.get(3), "objective_f")?,
            score: parse_field(path, line, rec.get(4), "score")?,
        });
        Ok(())
    })?;
    Ok(rows)
}

pub fn write_asdr(path: impl AsRef<Path>, counts: &[u64]) -> Result<()> {
    let path = path.as_ref();
    let mut w = writer(path)?;
    w.write_record(ASDR_HEADER).map_err(|e| csv_err(path, e))?;
    for (second, c) in counts.iter().enumerate() {
        w.write_record([second.to_string(), c.to_string()])
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_asdr(path: impl AsRef<Path>) -> Result<Vec<u64>> {
    let path = path.as_ref();
    let mut counts = Vec::new();
    for_each_record(path, &ASDR_HEADER, |line, rec| {
        let second: usize = parse_field(path, line, rec.get(0), "second")?;
        if second != counts.len() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("expected second {}, found {second}", counts.len()),
            });
        }
        counts.push(parse_field(path, line, rec.get(1), "spike_count")?);
        Ok(())
    })?;
    Ok(counts)
}

/// A genome together with everything needed to rebuild its model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenomeRecord {
    pub genes: Genome,
    pub bounds: GeneBounds,
    pub params: ModelParams,
    /// Simulation stream seed of the evaluation that scored this genome.
    pub seed: u64,
    pub model_kind: ModelKind,
}

impl GenomeRecord {
    pub fn new(genes: Genome, bounds: GeneBounds, seed: u64) -> Result<Self> {
        let params = bounds.decode(&genes)?;
        Ok(GenomeRecord {
            genes,
            bounds,
            params,
            seed,
            model_kind: bounds.kind,
        })
    }

    /// Checks that the stored parameters are what the genes decode to.
    pub fn validate(&self) -> Result<()> {
        if self.model_kind != self.bounds.kind {
            return Err(Error::validation("model_kind disagrees with bounds.kind"));
        }
        let decoded = self.bounds.decode(&self.genes)?;
        if decoded != self.params {
            return Err(Error::validation(
                "params do not match the decoded genes under the stored bounds",
            ));
        }
        Ok(())
    }
}

pub fn write_genome(path: impl AsRef<Path>, record: &GenomeRecord) -> Result<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(record)
        .map_err(|e| Error::validation(format!("serializing genome: {e}")))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_genome(path: impl AsRef<Path>) -> Result<GenomeRecord> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let record: GenomeRecord = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line() as u64,
        message: e.to_string(),
    })?;
    record.validate()?;
    Ok(record)
}

pub fn write_connectivity(
    edges_path: impl AsRef<Path>,
    signs_path: impl AsRef<Path>,
    conn: &Connectivity,
) -> Result<()> {
    let path = edges_path.as_ref();
    let mut w = writer(path)?;
    w.write_record(EDGES_HEADER).map_err(|e| csv_err(path, e))?;
    for &(pre, post) in conn.edges() {
        w.write_record([pre.to_string(), post.to_string()])
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;

    let path = signs_path.as_ref();
    let mut w = writer(path)?;
    w.write_record(SIGNS_HEADER).map_err(|e| csv_err(path, e))?;
    for node in 0..conn.nodes() {
        w.write_record([node.to_string(), conn.sign(node).to_string()])
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_connectivity(
    edges_path: impl AsRef<Path>,
    signs_path: impl AsRef<Path>,
    kind: ModelKind,
) -> Result<Connectivity> {
    let signs_path = signs_path.as_ref();
    let mut inhibitory = Vec::new();
    for_each_record(signs_path, &SIGNS_HEADER, |line, rec| {
        let node: usize = parse_field(signs_path, line, rec.get(0), "node")?;
        let sign: i8 = parse_field(signs_path, line, rec.get(1), "sign")?;
        if node != inhibitory.len() || !(sign == 1 || sign == -1) {
            return Err(Error::Parse {
                path: signs_path.to_path_buf(),
                line,
                message: format!("expected node {} with sign +1 or -1", inhibitory.len()),
            });
        }
        inhibitory.push(sign == -1);
        Ok(())
    })?;
    let edges_path = edges_path.as_ref();
    let mut edges = Vec::new();
    for_each_record(edges_path, &EDGES_HEADER, |line, rec| {
        edges.push((
            parse_field(edges_path, line, rec.get(0), "pre")?,
            parse_field(edges_path, line, rec.get(1), "post")?,
        ));
        Ok(())
    })?;
    Connectivity::from_parts(kind, inhibitory.len(), edges, inhibitory)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<EvolutionConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let config: EvolutionConfig =
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    config.validate()?;
    Ok(config)
}

/// Config with every bound spelled out, so the file stands on its own.
pub fn config_snapshot(config: &EvolutionConfig) -> Result<String> {
    let mut full = config.clone();
    full.bounds = BoundsOverride::full(&config.gene_bounds());
    toml::to_string(&full).map_err(|e| Error::Config(e.to_string()))
}

pub fn write_config(path: impl AsRef<Path>, config: &EvolutionConfig) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, config_snapshot(config)?).map_err(|e| Error::io(path, e))
}

/// Everything persisted for one trial.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub config: EvolutionConfig,
    pub result: EvolutionResult,
    pub best_genome: GenomeRecord,
    pub best_connectivity: Connectivity,
    /// Observed-channel replay of the best individual's scoring evaluation.
    pub raster: SpikeRecord,
    pub asdr: Vec<u64>,
}

impl RunArtifacts {
    pub fn from_result(config: &EvolutionConfig, result: EvolutionResult) -> Result<Self> {
        let best = &result.best;
        let bounds = config.gene_bounds();
        let connectivity = best
            .connectivity
            .as_deref()
            .cloned()
            .ok_or_else(|| Error::validation("best individual has no connectivity"))?;
        let seed = best
            .sim_seed
            .ok_or_else(|| Error::validation("best individual was never simulated"))?;
        let genome = GenomeRecord::new(best.genome, bounds, seed)?;
        let record = replay(&genome.params, &connectivity, config, seed)?;
        let observed = record.observed_record();
        debug_assert_eq!(
            record_counts(&record, config.bin_seconds).map(|c| c.total()).ok(),
            Some(observed.total_spikes() as u64)
        );
        let asdr = asdr(&observed.spikes(), observed.window_seconds())?;
        Ok(RunArtifacts {
            config: config.clone(),
            result,
            best_genome: genome,
            best_connectivity: connectivity,
            raster: observed,
            asdr,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunPaths {
    pub config: PathBuf,
    pub fitness: PathBuf,
    pub genome: PathBuf,
    pub edges: PathBuf,
    pub signs: PathBuf,
    pub raster: PathBuf,
    pub asdr: PathBuf,
    pub raster_svg: PathBuf,
    pub fitness_svg: PathBuf,
    pub complete: PathBuf,
}

impl RunPaths {
    pub fn in_dir(dir: &Path) -> Self {
        RunPaths {
            config: dir.join("config.toml"),
            fitness: dir.join("fitness.csv"),
            genome: dir.join("best_genome.json"),
            edges: dir.join("connectivity_edges.csv"),
            signs: dir.join("connectivity_signs.csv"),
            raster: dir.join("raster.csv"),
            asdr: dir.join("asdr.csv"),
            raster_svg: dir.join("raster.svg"),
            fitness_svg: dir.join("fitness.svg"),
            complete: dir.join(COMPLETE_MARKER),
        }
    }

    pub fn all(&self) -> Vec<&Path> {
        vec![
            &self.config,
            &self.fitness,
            &self.genome,
            &self.edges,
            &self.signs,
            &self.raster,
            &self.asdr,
            &self.raster_svg,
            &self.fitness_svg,
            &self.complete,
        ]
    }
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes a trial directory. Any previous completeness marker is removed
/// first and rewritten only after every other file is on disk.
pub fn write_run(artifacts: &RunArtifacts, out_dir: impl AsRef<Path>) -> Result<RunPaths> {
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let paths = RunPaths::in_dir(dir);
    if paths.complete.exists() {
        fs::remove_file(&paths.complete).map_err(|e| Error::io(&paths.complete, e))?;
    }

    write_config(&paths.config, &artifacts.config)?;
    write_fitness(&paths.fitness, &fitness_rows(&artifacts.result))?;
    write_genome(&paths.genome, &artifacts.best_genome)?;
    write_connectivity(&paths.edges, &paths.signs, &artifacts.best_connectivity)?;
    let spikes = artifacts.raster.spikes();
    write_spike_events(&paths.raster, &spikes)?;
    write_asdr(&paths.asdr, &artifacts.asdr)?;
    write_text(
        &paths.raster_svg,
        &svg::raster_figure(
            &spikes,
            artifacts.raster.nodes,
            artifacts.raster.window_seconds(),
            &artifacts.asdr,
        ),
    )?;
    let best: Vec<f64> = artifacts
        .result
        .best_so_far()
        .into_iter()
        .map(|f| 1.0 - f)
        .collect();
    let top10: Vec<f64> = artifacts
        .result
        .generations
        .iter()
        .map(|g| {
            let s = g.top_scores(10);
            s.iter().sum::<f64>() / s.len() as f64
        })
        .collect();
    write_text(
        &paths.fitness_svg,
        &svg::fitness_figure(&[("best score", &best), ("top-10 mean score", &top10)], None),
    )?;

    let mut marker = fs::File::create(&paths.complete).map_err(|e| Error::io(&paths.complete, e))?;
    marker
        .write_all(b"ok\n")
        .map_err(|e| Error::io(&paths.complete, e))?;
    Ok(paths)
}
