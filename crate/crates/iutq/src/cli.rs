//! The `iutq` command line: score, evaluate, timeseries, sweep.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{ArgGroup, Args, Parser, Subcommand};
use iutq_core::evaluation::{confusion, statistics, ConfusionCounts, TableReport};
use iutq_core::iutq::score_scene;
use iutq_core::surrogate::SurrogateScorer;
use iutq_core::{AgentId, IutqConfig, MetricId, Penalty, ScenarioTrackset, SurrogateConfig};
use log::{error, info, warn};

use crate::format::opt_sig6;
use crate::ingest::{load_trackfile, LoadOptions};
use crate::labels::{load_labels, LabelKey, LabelTable};
use crate::manifest::RunManifest;
use crate::pipeline::{discover_inputs, load_recordings, score_recordings, Recording, ScoreOptions};
use crate::report::{render_table, write_report_csv, write_report_json, write_sweep_csv, SweepRow};
use crate::scores::{flags_by_metric, load_score_file, write_score_file};

#[derive(Debug, Parser)]
#[command(name = "iutq", version, about = "Scene criticality metrics for recorded urban traffic")]
pub struct Cli {
    /// More log output; repeat for debug messages.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score every agent of every frame with the selected metrics.
    Score(ScoreArgs),
    /// Compare criticality flags of a score file with ground-truth labels.
    Evaluate(EvaluateArgs),
    /// Per-frame metric curves for chosen egos or one ego/adversary pair.
    Timeseries(TimeseriesArgs),
    /// Confusion statistics across thresholds or penalty variants.
    Sweep(SweepArgs),
    /// Write a synthetic recording in the track file format.
    #[command(subcommand)]
    Synth(SynthCommand),
}

#[derive(Debug, Subcommand)]
pub enum SynthCommand {
    /// Two agents on perpendicular paths with a chosen arrival offset.
    Crossing {
        /// Seconds between the two agents passing the crossing point.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        offset: f64,
        #[arg(long, default_value_t = 10.0)]
        speed_a: f64,
        #[arg(long, default_value_t = 10.0)]
        speed_b: f64,
        /// Give both agents a 4.5 m x 1.8 m outline instead of points.
        #[arg(long)]
        outline: bool,
        /// Add a standing third agent near the approach.
        #[arg(long)]
        bystander: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Randomly placed agents moving with constant acceleration.
    Random {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 30)]
        agents: usize,
        #[arg(long, default_value_t = 1000)]
        frames: usize,
        #[arg(long, default_value_t = 120.0)]
        bounds: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    /// Distance penalty of the IUTQ score: none, rho1, rho2 or rho3.
    #[arg(long, value_parser = parse_penalty, default_value = "rho2")]
    pub penalty: Penalty,
    /// Criticality threshold for the selected penalty variant.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Braking deceleration for the braking distance, m/s².
    #[arg(long)]
    pub decel: Option<f64>,
    /// Reaction time added to the braking distance, s.
    #[arg(long)]
    pub reaction_time: Option<f64>,
    /// Microscopic history window, s.
    #[arg(long)]
    pub window: Option<f64>,
    /// Reference speed, m/s.
    #[arg(long)]
    pub v_ref: Option<f64>,
    /// Reference acceleration, m/s².
    #[arg(long)]
    pub a_ref: Option<f64>,
    /// Conflict grid cell size, m.
    #[arg(long)]
    pub cell: Option<f64>,
    /// Fixed adversary deceleration for PTTC instead of the observed one, m/s².
    #[arg(long)]
    pub pttc_decel: Option<f64>,
    /// Frame interval of the track files, ms.
    #[arg(long, default_value_t = 100)]
    pub frame_interval: i64,
    /// Keep pedestrians, bicycles and unknown agent types.
    #[arg(long)]
    pub include_other: bool,
}

impl ConfigArgs {
    pub fn iutq(&self) -> IutqConfig {
        let mut c = IutqConfig { penalty: self.penalty, ..IutqConfig::default() };
        if let Some(t) = self.threshold {
            match self.penalty {
                Penalty::None => c.threshold_combined = t,
                _ => c.threshold_penalized = t,
            }
        }
        set(&mut c.braking.decel, self.decel);
        set(&mut c.braking.reaction_time, self.reaction_time);
        set(&mut c.window_s, self.window);
        set(&mut c.v_ref, self.v_ref);
        set(&mut c.a_ref, self.a_ref);
        c
    }

    pub fn surrogate(&self) -> SurrogateConfig {
        let mut c = SurrogateConfig::default();
        set(&mut c.conflict_cell, self.cell);
        c.pttc_decel = self.pttc_decel;
        c
    }

    pub fn load(&self) -> LoadOptions {
        LoadOptions { frame_interval_ms: self.frame_interval, include_other: self.include_other }
    }
}

fn set(slot: &mut f64, v: Option<f64>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn parse_penalty(s: &str) -> Result<Penalty, String> {
    Penalty::parse(s).ok_or_else(|| format!("unknown penalty {s:?}, expected none, rho1, rho2 or rho3"))
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Track files or directories of track files.
    pub inputs: Vec<PathBuf>,
    /// `all`, or a comma-separated list of metric ids; `iutq` means the
    /// selected penalty variant.
    #[arg(long, default_value = "all")]
    pub metrics: String,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Abort on the first unreadable recording.
    #[arg(long)]
    pub strict: bool,
    /// Output directory for scores.csv and manifest.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Repeat the run described by a manifest; flags other than --out are ignored.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["scores", "counts"])))]
pub struct EvaluateArgs {
    /// Score file written by `iutq score`.
    #[arg(long, requires = "labels")]
    pub scores: Option<PathBuf>,
    /// Label file `recording_id,ego_id,timestamp_ms,critical`.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Counts-only input `metric,tp,tn,fp,fn` instead of scores and labels.
    #[arg(long, conflicts_with_all = ["scores", "labels"])]
    pub counts: Option<PathBuf>,
    /// Restrict the report to these metric ids, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub metrics: Vec<String>,
    /// Output directory for report.csv and report.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("agents").required(true).args(["ego", "pair"])))]
pub struct TimeseriesArgs {
    pub recording: PathBuf,
    /// Ego ids, comma-separated or repeated.
    #[arg(long, value_delimiter = ',')]
    pub ego: Vec<u64>,
    /// `EGO,ADVERSARY`: surrogate values of that pair only.
    #[arg(long, value_delimiter = ',', num_args = 1, conflicts_with = "ego")]
    pub pair: Vec<u64>,
    #[arg(long, default_value = "dist,wttc,iutq")]
    pub metrics: String,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("settings").required(true).args(["grid", "penalties"])))]
pub struct SweepArgs {
    /// Track files or directories of track files.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub labels: PathBuf,
    /// Metric to sweep; `iutq` means the selected penalty variant.
    #[arg(long, default_value = "iutq")]
    pub metric: String,
    /// Thresholds, comma-separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub grid: Vec<f64>,
    /// Penalty variants, comma-separated, each at its default threshold.
    #[arg(long, value_delimiter = ',', num_args = 1.., value_parser = parse_penalty)]
    pub penalties: Vec<Penalty>,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses arguments, runs, and maps the outcome to an exit status: 0 on
/// success, 1 on failure, 2 on usage errors.
pub fn main_from_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).format_timestamp(None).try_init();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

pub fn run(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Score(a) => cmd_score(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Timeseries(a) => cmd_timeseries(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Synth(c) => cmd_synth(c),
    }
}

/// Metric list syntax shared by all commands.
pub fn parse_metrics(spec: &str, penalty: Penalty) -> anyhow::Result<Vec<MetricId>> {
    let mut out: Vec<MetricId> = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let ids = match item.to_ascii_lowercase().as_str() {
            "all" => MetricId::ALL.to_vec(),
            "iutq" => vec![MetricId::Iutq(penalty)],
            other => vec![other.parse::<MetricId>().map_err(|e| anyhow!("{e}"))?],
        };
        for id in ids {
            if !out.contains(&id) {
                out.push(id);
            }
        }
    }
    if out.is_empty() {
        bail!("no metrics selected");
    }
    Ok(out)
}

fn thread_pool(workers: Option<usize>) -> anyhow::Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        if n == 0 {
            bail!("--workers must be at least 1");
        }
        b = b.num_threads(n);
    }
    Ok(b.build()?)
}

fn load_all(inputs: &[PathBuf], options: &LoadOptions, strict: bool) -> anyhow::Result<(Vec<Recording>, usize)> {
    let paths = discover_inputs(inputs)?;
    if paths.is_empty() {
        bail!("no recordings found in {}", display_paths(inputs));
    }
    let (recordings, failures) = load_recordings(&paths, options);
    for f in &failures {
        error!("{f}");
    }
    if strict {
        if let Some(f) = failures.into_iter().next() {
            return Err(f.into());
        }
        return Ok((recordings, 0));
    }
    if recordings.is_empty() {
        bail!("no recordings could be loaded");
    }
    for r in &recordings {
        info!(
            "{}: {} rows, {} dropped, {} filtered, {} agents, {} frames",
            r.path.display(),
            r.report.rows_read,
            r.report.rows_dropped,
            r.report.rows_filtered,
            r.report.agents,
            r.report.frames
        );
        if r.report.rows_dropped > 0 {
            warn!("{}: dropped {} invalid rows", r.path.display(), r.report.rows_dropped);
        }
    }
    Ok((recordings, failures.len()))
}

fn display_paths(paths: &[PathBuf]) -> String {
    if paths.is_empty() {
        return "(no inputs)".into();
    }
    paths.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(", ")
}

fn cmd_score(a: ScoreArgs) -> anyhow::Result<ExitCode> {
    let manifest = match &a.manifest {
        Some(path) => {
            let mut m = RunManifest::load(path)?;
            if let Some(out) = &a.out {
                m.output = out.clone();
            }
            m
        }
        None => {
            let output = a.out.clone().context("--out is required")?;
            let iutq = a.config.iutq();
            RunManifest {
                tool_version: env!("CARGO_PKG_VERSION").into(),
                inputs: a.inputs.clone(),
                output,
                workers: a.workers.unwrap_or_else(rayon::current_num_threads),
                metrics: parse_metrics(&a.metrics, iutq.penalty)?.iter().map(|m| m.as_str().to_string()).collect(),
                frame_interval_ms: a.config.frame_interval,
                include_other: a.config.include_other,
                strict: a.strict,
                iutq,
                surrogate: a.config.surrogate(),
            }
        }
    };
    let metrics = parse_metrics(&manifest.metrics.join(","), manifest.iutq.penalty)?;
    let options = ScoreOptions { iutq: manifest.iutq, surrogate: manifest.surrogate, metrics };
    options.iutq.validate()?;
    options.surrogate.validate()?;
    let load = LoadOptions { frame_interval_ms: manifest.frame_interval_ms, include_other: manifest.include_other };

    let pool = thread_pool(Some(manifest.workers))?;
    let (recordings, failed) = pool.install(|| load_all(&manifest.inputs, &load, manifest.strict))?;
    let rows = pool.install(|| score_recordings(&recordings, &options))?;

    fs::create_dir_all(&manifest.output).with_context(|| format!("creating {}", manifest.output.display()))?;
    write_score_file(manifest.output.join("scores.csv"), &rows)?;
    manifest.save(manifest.output.join("manifest.json"))?;
    info!("{} rows from {} recordings", rows.len(), recordings.len());
    if failed > 0 {
        eprintln!("error: {failed} recordings could not be loaded");
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn load_counts(path: &Path) -> anyhow::Result<Vec<(String, ConfusionCounts)>> {
    let mut csv = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for record in csv.deserialize::<(String, u64, u64, u64, u64)>() {
        let (metric, tp, tn, fp, fn_) = record.with_context(|| format!("reading {}", path.display()))?;
        out.push((metric, ConfusionCounts::new(tp, tn, fp, fn_)));
    }
    if out.is_empty() {
        bail!("{}: no count rows", path.display());
    }
    Ok(out)
}

fn cmd_evaluate(a: EvaluateArgs) -> anyhow::Result<ExitCode> {
    let wanted: Vec<&str> = a.metrics.iter().map(|s| s.trim()).filter(|s| !s.is_empty()).collect();
    let keep = |m: &str| wanted.is_empty() || wanted.iter().any(|w| w.eq_ignore_ascii_case(m));
    let columns = match (&a.counts, &a.scores, &a.labels) {
        (Some(counts), _, _) => load_counts(counts)?.into_iter().filter(|(m, _)| keep(m)).collect::<Vec<_>>(),
        (None, Some(scores), Some(labels)) => {
            let labels = load_labels(labels)?;
            let rows = load_score_file(scores)?;
            let mut flags: Vec<_> = flags_by_metric(&rows).into_iter().filter(|(m, _)| keep(m.as_str())).collect();
            flags.sort_by_key(|(m, _)| m.table_index());
            let mut columns = Vec::new();
            for (metric, f) in flags {
                columns.push((metric.as_str().to_string(), counts_for(metric.as_str(), &f, &labels)?));
            }
            columns
        }
        _ => bail!("either --counts or both --scores and --labels are required"),
    };
    if columns.is_empty() {
        bail!("no metrics to report");
    }
    let report = TableReport::from_counts(columns)?;
    print!("{}", render_table(&report));
    if let Some(out) = &a.out {
        fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
        let csv_path = out.join("report.csv");
        let json_path = out.join("report.json");
        write_report_csv(create(&csv_path)?, &report, &csv_path)?;
        write_report_json(create(&json_path)?, &report, &json_path)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn counts_for(metric: &str, flags: &BTreeMap<LabelKey, bool>, labels: &LabelTable) -> anyhow::Result<ConfusionCounts> {
    let c = confusion(flags, &labels.labels).map_err(|m| {
        let listed: Vec<String> = m.keys.iter().take(20).map(|k| format!("  {k}")).collect();
        let more = if m.keys.len() > 20 { format!("\n  ... {} more", m.keys.len() - 20) } else { String::new() };
        anyhow!("{metric}: {} labeled keys have no prediction:\n{}{more}", m.keys.len(), listed.join("\n"))
    })?;
    if c.total() == 0 {
        bail!("{metric}: the labels cover no scored key");
    }
    Ok(c)
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn output(out: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(create(p)?),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn require_agent(ts: &ScenarioTrackset, id: u64) -> anyhow::Result<AgentId> {
    let agent = AgentId(id);
    if ts.presence(agent).is_none() {
        return Err(iutq_core::Error::MissingAgent { agent, timestamp_ms: None }.into());
    }
    Ok(agent)
}

fn cmd_timeseries(a: TimeseriesArgs) -> anyhow::Result<ExitCode> {
    let iutq = a.config.iutq();
    let surrogate = a.config.surrogate();
    iutq.validate()?;
    surrogate.validate()?;
    let metrics = parse_metrics(&a.metrics, iutq.penalty)?;
    let (ts, _) = load_trackfile(&a.recording, &a.config.load())?;
    let rows = match a.pair.as_slice() {
        [] => {
            let egos = a.ego.iter().map(|&e| require_agent(&ts, e)).collect::<anyhow::Result<Vec<_>>>()?;
            timeseries_rows(&ts, &egos, None, &metrics, iutq, surrogate)?
        }
        [e, o] => {
            let (ego, other) = (require_agent(&ts, *e)?, require_agent(&ts, *o)?);
            timeseries_rows(&ts, &[ego], Some(other), &metrics, iutq, surrogate)?
        }
        _ => bail!("--pair takes exactly two agent ids"),
    };

    let mut out = csv::Writer::from_writer(output(a.out.as_deref())?);
    let mut header = vec!["timestamp_ms".to_string(), "ego_id".to_string()];
    if a.pair.len() == 2 {
        header.push("adversary_id".into());
    }
    header.extend(metrics.iter().map(|m| m.as_str().to_string()));
    out.write_record(&header)?;
    for (t, ego, values) in rows {
        let mut record = vec![t.to_string(), ego.to_string()];
        if let [_, o] = a.pair.as_slice() {
            record.push(o.to_string());
        }
        record.extend(values.into_iter().map(opt_sig6));
        out.write_record(&record)?;
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

type SeriesRow = (i64, AgentId, Vec<Option<f64>>);

/// One row per frame in which the ego is present, ego by ego. With an
/// adversary, surrogate values are those of the pair and undefined while
/// the adversary is absent; IUTQ values are always scene-level.
pub fn timeseries_rows(
    ts: &ScenarioTrackset,
    egos: &[AgentId],
    adversary: Option<AgentId>,
    metrics: &[MetricId],
    iutq: IutqConfig,
    surrogate: SurrogateConfig,
) -> anyhow::Result<Vec<SeriesRow>> {
    let scorer = SurrogateScorer::new(ts, surrogate)?;
    let mut rows = Vec::new();
    for &ego in egos {
        for &fi in ts.presence(ego).unwrap_or(&[]) {
            let scene = &ts.frames()[fi];
            let t = scene.timestamp_ms();
            let needs_iutq = metrics.iter().any(|m| !m.is_surrogate());
            let breakdown = if needs_iutq { Some(score_scene(ts, scene, ego, &iutq)?) } else { None };
            let scene_values = if adversary.is_none() && metrics.iter().any(MetricId::is_surrogate) {
                scorer.score_frame(fi).into_iter().filter(|v| v.ego == ego).collect()
            } else {
                Vec::new()
            };
            let mut values = Vec::with_capacity(metrics.len());
            for m in metrics {
                values.push(match (m, adversary) {
                    (MetricId::Iutq(p), _) => breakdown.map(|b| b.final_with(*p)),
                    (MetricId::Surrogate(s), Some(adv)) => match scene.get(adv) {
                        Some(_) => scorer.pair_value(*s, ego, adv, t)?,
                        None => None,
                    },
                    (MetricId::Surrogate(s), None) => {
                        scene_values.iter().find(|v| v.metric == *s).and_then(|v| v.value)
                    }
                });
            }
            rows.push((t, ego, values));
        }
    }
    Ok(rows)
}

fn cmd_sweep(a: SweepArgs) -> anyhow::Result<ExitCode> {
    let iutq = a.config.iutq();
    let surrogate = a.config.surrogate();
    let metric = *parse_metrics(&a.metric, iutq.penalty)?.first().context("no metric selected")?;
    let settings: Vec<(String, MetricId, f64)> = if !a.grid.is_empty() {
        if let Some(bad) = a.grid.iter().find(|t| !t.is_finite()) {
            bail!("invalid threshold {bad}");
        }
        a.grid.iter().map(|&t| (crate::format::sig6(t), metric, t)).collect()
    } else {
        if metric.is_surrogate() {
            bail!("--penalties applies to IUTQ metrics only, not {metric}");
        }
        a.penalties
            .iter()
            .map(|&p| {
                let t = a.config.threshold.unwrap_or_else(|| IutqConfig::default().threshold_for(p));
                (p.as_str().to_string(), MetricId::Iutq(p), t)
            })
            .collect()
    };
    if settings.is_empty() {
        bail!("empty sweep");
    }
    let mut metrics: Vec<MetricId> = Vec::new();
    for (_, m, _) in &settings {
        if !metrics.contains(m) {
            metrics.push(*m);
        }
    }
    let labels = load_labels(&a.labels)?;
    let options = ScoreOptions { iutq, surrogate, metrics };
    let pool = thread_pool(a.workers)?;
    let (recordings, failed) = pool.install(|| load_all(&a.inputs, &a.config.load(), false))?;
    let rows = pool.install(|| score_recordings(&recordings, &options))?;

    let mut values: BTreeMap<MetricId, BTreeMap<LabelKey, Option<f64>>> = BTreeMap::new();
    for r in &rows {
        values.entry(r.metric).or_default().insert(r.key(), r.value);
    }
    let mut out_rows = Vec::with_capacity(settings.len());
    for (setting, m, threshold) in settings {
        let flags: BTreeMap<LabelKey, bool> = values
            .get(&m)
            .map(|v| v.iter().map(|(k, v)| (k.clone(), m.is_critical_at(*v, threshold))).collect())
            .unwrap_or_default();
        let counts = counts_for(m.as_str(), &flags, &labels)?;
        out_rows.push(SweepRow { metric: m.as_str().into(), setting, counts, stats: statistics(&counts)? });
    }
    let origin = a.out.clone().unwrap_or_else(|| PathBuf::from("<stdout>"));
    write_sweep_csv(output(a.out.as_deref())?, &out_rows, &origin)?;
    Ok(if failed > 0 { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn cmd_synth(c: SynthCommand) -> anyhow::Result<ExitCode> {
    use iutq_core::geometry::Footprint;
    use iutq_core::synth::{build_crossing_scenario, build_recording, CrossingSpec, SceneSpec, SpatialLaw, SpeedLaw};

    let (ts, out) = match c {
        SynthCommand::Crossing { offset, speed_a, speed_b, outline, bystander, out } => {
            let spec = CrossingSpec {
                speed_a,
                speed_b,
                offset_s: offset,
                footprint: if outline { Footprint::new(4.5, 1.8) } else { None },
                bystander,
                ..CrossingSpec::default()
            };
            (build_crossing_scenario(&spec)?, out)
        }
        SynthCommand::Random { seed, agents, frames, bounds, out } => {
            let spec = SceneSpec {
                seed,
                n_agents: agents,
                speed_law: SpeedLaw::Bimodal,
                spatial_law: SpatialLaw::Grid,
                bounds,
            };
            (build_recording(&spec, frames, 100)?, out)
        }
    };
    crate::ingest::write_trackfile(&out, &ts)?;
    Ok(ExitCode::SUCCESS)
}
