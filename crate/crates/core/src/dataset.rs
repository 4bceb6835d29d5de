//! Split assembly, on-disk format, verification and statistics.
//!
//! Layout of a build rooted at `out`:
//!
//! ```text
//! out/<task>/<split>/manifest.jsonl
//! out/<task>/<split>/graphs/<id>.json
//! out/<task>/<split>/images/<id>_<layout>.png
//! ```
//!
//! Every sample draws its randomness from a sub-seed hashed from
//! `(seed, task, split, index, attempt)`, so any sample can be rebuilt on
//! its own and worker count never changes the output.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::automorphism::{find_nontrivial_automorphism, verify_automorphism};
use crate::bridges::find_bridges;
use crate::corpus::{sample_base_graphs, BaseGraphCorpus, CorpusSource};
use crate::error::{Error, Result};
use crate::graph::{EdgeList, Graph};
use crate::layout::{compute_layout, LayoutAlgorithm};
use crate::render::{render_image, RenderSpec};
use crate::sample::{Label, LabeledSample, NodeRange};
use crate::spectral::spectral_gap;
use crate::spectral_gen::spectral_sample;
use crate::symmetry::symmetry_sample;
use crate::topology::{gen_bottleneck, TopologyFamily};

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const MANIFEST_NAME: &str = "manifest.jsonl";
/// Regenerations allowed when a sample duplicates a graph of an earlier
/// split.
pub const COLLISION_RETRIES: usize = 100;
/// Allowed drift between a stored spectral-gap label and its recomputation.
pub const LAMBDA2_TOLERANCE: f64 = 1e-6;
pub const LAMBDA2_BINS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Task {
    Topology,
    Symmetry,
    Spectral,
    Bridge,
}

impl Task {
    pub const ALL: [Task; 4] = [Task::Topology, Task::Symmetry, Task::Spectral, Task::Bridge];

    pub fn as_str(self) -> &'static str {
        match self {
            Task::Topology => "topology",
            Task::Symmetry => "symmetry",
            Task::Spectral => "spectral",
            Task::Bridge => "bridge",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown task '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Split {
    Train,
    Val,
    TestId,
    TestNearOod,
    TestFarOod,
}

impl Split {
    /// Build order; collision checks look only at earlier splits.
    pub const ALL: [Split; 5] = [
        Split::Train,
        Split::Val,
        Split::TestId,
        Split::TestNearOod,
        Split::TestFarOod,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::TestId => "test_id",
            Split::TestNearOod => "test_near_ood",
            Split::TestFarOod => "test_far_ood",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown split '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitSpec {
    pub task: Task,
    pub split: Split,
    pub count: usize,
    pub node_range: NodeRange,
    pub seed: u64,
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        let NodeRange { lo, hi } = self.node_range;
        if lo < 5 || hi > 300 || lo > hi {
            return Err(Error::InvalidParameter(format!(
                "{}/{}: node range {lo}-{hi} outside 5-300",
                self.task, self.split
            )));
        }
        Ok(())
    }

    pub fn sample_id(&self, index: usize) -> String {
        format!("{}_{}_{index:05}", self.task, self.split)
    }
}

const STANDARD_RANGES: [NodeRange; 5] = [
    NodeRange::new(20, 50),
    NodeRange::new(20, 50),
    NodeRange::new(20, 50),
    NodeRange::new(40, 100),
    NodeRange::new(60, 150),
];
const SYMMETRY_RANGES: [NodeRange; 5] = [
    NodeRange::new(30, 60),
    NodeRange::new(30, 60),
    NodeRange::new(30, 60),
    NodeRange::new(50, 100),
    NodeRange::new(70, 150),
];

/// Counts and node ranges of every task and split.
pub fn default_split_table(seed: u64) -> Vec<SplitSpec> {
    let table: [(Task, [usize; 5], [NodeRange; 5]); 4] = [
        (Task::Topology, [3000, 300, 300, 300, 300], STANDARD_RANGES),
        (Task::Symmetry, [2000, 200, 600, 600, 600], SYMMETRY_RANGES),
        (Task::Spectral, [3000, 300, 300, 300, 300], STANDARD_RANGES),
        (Task::Bridge, [2500, 250, 250, 250, 250], STANDARD_RANGES),
    ];
    table
        .into_iter()
        .flat_map(|(task, counts, ranges)| {
            Split::ALL.into_iter().zip(counts).zip(ranges).map(
                move |((split, count), node_range)| SplitSpec {
                    task,
                    split,
                    count,
                    node_range,
                    seed,
                },
            )
        })
        .collect()
}

fn hash_u64(parts: &[&[u8]]) -> u64 {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().unwrap())
}

/// Sub-seed of one generation attempt.
pub fn sub_seed(seed: u64, task: Task, split: Split, index: usize, attempt: usize) -> u64 {
    hash_u64(&[
        b"sample",
        &seed.to_le_bytes(),
        task.as_str().as_bytes(),
        split.as_str().as_bytes(),
        &(index as u64).to_le_bytes(),
        &(attempt as u64).to_le_bytes(),
    ])
}

fn corpus_seed(seed: u64) -> u64 {
    hash_u64(&[b"corpus", &seed.to_le_bytes()])
}

/// Base-graph corpus for a build seed.
pub fn load_corpus(source: &CorpusSource, seed: u64) -> Result<BaseGraphCorpus> {
    let mut rng = ChaCha8Rng::seed_from_u64(corpus_seed(seed));
    sample_base_graphs(source, &mut rng)
}

/// Generates sample `index` of `spec` at the given attempt, independently
/// of every other sample.
pub fn regenerate_sample(
    spec: &SplitSpec,
    index: usize,
    attempt: usize,
    corpus: &BaseGraphCorpus,
) -> Result<LabeledSample> {
    let wrap = |e: Error| Error::Sample {
        task: spec.task.to_string(),
        split: spec.split.to_string(),
        index,
        source: Box::new(e),
    };
    let mut rng =
        ChaCha8Rng::seed_from_u64(sub_seed(spec.seed, spec.task, spec.split, index, attempt));
    let range = spec.node_range;
    let mut sample = match spec.task {
        Task::Topology => {
            let family = TopologyFamily::ALL[index % TopologyFamily::ALL.len()];
            let n = rng.gen_range(range.lo..=range.hi);
            let generated = family.generate(n, &mut rng).map_err(wrap)?;
            family_sample(family, generated, Label::Class(family.class_id()))
        }
        Task::Bridge => {
            let family = TopologyFamily::BRIDGE[index % TopologyFamily::BRIDGE.len()];
            let n = rng.gen_range(range.lo..=range.hi);
            let generated = match family {
                TopologyFamily::Bottleneck => gen_bottleneck(n, Some(1), &mut rng),
                _ => family.generate(n, &mut rng).map_err(wrap)?,
            };
            let bridges = find_bridges(&generated.graph).count();
            family_sample(family, generated, Label::BridgeCount(bridges))
        }
        Task::Spectral => {
            let n = rng.gen_range(range.lo..=range.hi);
            spectral_sample(n, &mut rng).map_err(wrap)?
        }
        Task::Symmetry => symmetry_sample(index.is_multiple_of(2), range, corpus, &mut rng).map_err(wrap)?,
    };
    sample.metadata.insert("attempt".into(), json!(attempt));
    Ok(sample)
}

fn family_sample(
    family: TopologyFamily,
    generated: crate::topology::Generated,
    label: Label,
) -> LabeledSample {
    let mut metadata = Map::new();
    metadata.insert("family".into(), json!(family.as_str()));
    metadata.insert("params".into(), Value::Object(generated.params));
    metadata.insert("repairs".into(), json!(generated.repairs));
    LabeledSample {
        graph: generated.graph,
        label,
        metadata,
    }
}

/// On-disk graph file. Field order is alphabetical so the output has
/// sorted keys.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphFile {
    pub edges: Vec<[usize; 2]>,
    #[serde(default)]
    pub label: Value,
    #[serde(default)]
    pub metadata: Map<String, Value>,
    pub num_nodes: usize,
}

impl GraphFile {
    pub fn from_sample(sample: &LabeledSample) -> Self {
        let list = EdgeList::from(&sample.graph);
        GraphFile {
            edges: list.edges,
            label: sample.label.to_json(),
            metadata: sample.metadata.clone(),
            num_nodes: list.num_nodes,
        }
    }

    pub fn graph(&self) -> Result<Graph> {
        Graph::try_from(EdgeList {
            num_nodes: self.num_nodes,
            edges: self.edges.clone(),
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut bytes = serde_json::to_vec(self).expect("graph file serializes");
        bytes.push(b'\n');
        bytes
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_slice(&bytes).map_err(|e| Error::json(path, e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestHeader {
    pub count: usize,
    pub layouts: Vec<String>,
    pub node_range: NodeRange,
    pub resolution: u32,
    pub seed: u64,
    pub split: String,
    pub task: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub graph: String,
    pub id: String,
    pub images: BTreeMap<String, String>,
    pub index: usize,
    pub label: Value,
    pub metadata: Map<String, Value>,
}

#[derive(Debug, Clone)]
pub struct Manifest {
    pub header: ManifestHeader,
    pub records: Vec<ManifestRecord>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut lines = BufReader::new(file).lines().enumerate();
        let parse_err = |line: usize, message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let header_line = match lines.next() {
            Some((_, line)) => line.map_err(|e| Error::io(path, e))?,
            None => return Err(parse_err(1, "empty manifest".into())),
        };
        let header: ManifestHeader =
            serde_json::from_str(&header_line).map_err(|e| parse_err(1, e.to_string()))?;
        let mut records = Vec::new();
        for (i, line) in lines {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            records.push(serde_json::from_str(&line).map_err(|e| parse_err(i + 1, e.to_string()))?);
        }
        Ok(Manifest { header, records })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec(&self.header).expect("header serializes");
        out.push(b'\n');
        for r in &self.records {
            out.extend(serde_json::to_vec(r).expect("record serializes"));
            out.push(b'\n');
        }
        out
    }
}

/// Label as written to the manifest; spectral gaps keep 10 significant
/// digits.
fn manifest_label(label: Label) -> Value {
    match label {
        Label::SpectralGap(x) => {
            let rounded: f64 = format!("{x:.9e}").parse().expect("formatted float parses");
            Label::SpectralGap(rounded).to_json()
        }
        other => other.to_json(),
    }
}

/// Writes `bytes` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    f.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
    drop(f);
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// What to produce besides graph files.
#[derive(Debug, Clone)]
pub struct BuildOptions {
    pub layouts: Vec<LayoutAlgorithm>,
    pub render: RenderSpec,
    pub workers: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            layouts: LayoutAlgorithm::DEFAULT.to_vec(),
            render: RenderSpec::default(),
            workers: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SplitSummary {
    pub spec: SplitSpec,
    pub manifest: PathBuf,
    pub min_nodes: usize,
    pub max_nodes: usize,
    /// Samples regenerated because they duplicated an earlier split.
    pub collisions: usize,
    pub degenerate_layouts: usize,
    pub elapsed: Duration,
}

pub fn split_dir(out: &Path, task: Task, split: Split) -> PathBuf {
    out.join(task.as_str()).join(split.as_str())
}

/// Samples of one split with duplicates of `seen` regenerated.
fn generate_split(
    spec: &SplitSpec,
    corpus: &BaseGraphCorpus,
    seen: &HashSet<Graph>,
) -> Result<Vec<(LabeledSample, usize)>> {
    (0..spec.count)
        .into_par_iter()
        .map(|index| {
            for attempt in 0..COLLISION_RETRIES {
                let sample = regenerate_sample(spec, index, attempt, corpus)?;
                if !seen.contains(&sample.graph) {
                    return Ok((sample, attempt));
                }
            }
            Err(Error::Sample {
                task: spec.task.to_string(),
                split: spec.split.to_string(),
                index,
                source: Box::new(Error::Exhausted {
                    what: "cross-split collision retries",
                    attempts: COLLISION_RETRIES,
                }),
            })
        })
        .collect()
}

/// Seed for the layouts of sample `index`; independent of the attempt.
pub fn layout_seed(spec: &SplitSpec, index: usize) -> u64 {
    hash_u64(&[
        b"layout",
        &spec.seed.to_le_bytes(),
        spec.task.as_str().as_bytes(),
        spec.split.as_str().as_bytes(),
        &(index as u64).to_le_bytes(),
    ])
}

/// Writes the graph file and images of one sample and returns its
/// manifest record and whether any layout was degenerate.
fn write_sample(
    dir: &Path,
    spec: &SplitSpec,
    index: usize,
    sample: &LabeledSample,
    options: &BuildOptions,
) -> Result<(ManifestRecord, bool)> {
    let id = spec.sample_id(index);
    let graph_rel = format!("graphs/{id}.json");
    write_atomic(
        &dir.join(&graph_rel),
        &GraphFile::from_sample(sample).to_bytes(),
    )?;
    let mut images = BTreeMap::new();
    let mut degenerate = false;
    for &algorithm in &options.layouts {
        let layout = compute_layout(&sample.graph, algorithm, layout_seed(spec, index))?;
        let rendered = render_image(&sample.graph, &layout, &options.render)?;
        degenerate |= rendered.degenerate;
        let rel = format!("images/{id}_{algorithm}.png");
        write_atomic(&dir.join(&rel), &rendered.image.encode_png()?)?;
        images.insert(algorithm.as_str().to_string(), rel);
    }
    let record = ManifestRecord {
        graph: graph_rel,
        id,
        images,
        index,
        label: manifest_label(sample.label),
        metadata: sample.metadata.clone(),
    };
    Ok((record, degenerate))
}

/// Builds the requested splits of one task. Splits are generated in
/// [`Split::ALL`] order; earlier splits that were not requested are still
/// generated in memory so the cross-split collision check, and therefore
/// every output, is the same whatever the filter.
pub fn build_task(
    out: &Path,
    specs: &[SplitSpec],
    wanted: &[Split],
    corpus: &BaseGraphCorpus,
    options: &BuildOptions,
) -> Result<Vec<SplitSummary>> {
    for s in specs {
        s.validate()?;
    }
    options.render.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?;
    pool.install(|| {
        let mut ordered: Vec<&SplitSpec> = specs.iter().collect();
        ordered.sort_by_key(|s| s.split);
        let last = ordered.iter().rposition(|s| wanted.contains(&s.split));
        let mut seen: HashSet<Graph> = HashSet::new();
        let mut summaries = Vec::new();
        for spec in ordered.into_iter().take(last.map_or(0, |i| i + 1)) {
            let started = Instant::now();
            let samples = generate_split(spec, corpus, &seen)?;
            if wanted.contains(&spec.split) {
                summaries.push(emit_split(out, spec, &samples, options, started)?);
            }
            seen.extend(samples.into_iter().map(|(s, _)| s.graph));
        }
        Ok(summaries)
    })
}

fn emit_split(
    out: &Path,
    spec: &SplitSpec,
    samples: &[(LabeledSample, usize)],
    options: &BuildOptions,
    started: Instant,
) -> Result<SplitSummary> {
    let dir = split_dir(out, spec.task, spec.split);
    let written: Vec<(ManifestRecord, bool)> = samples
        .par_iter()
        .enumerate()
        .map(|(index, (sample, _))| write_sample(&dir, spec, index, sample, options))
        .collect::<Result<_>>()?;
    let mut records: Vec<ManifestRecord> = Vec::with_capacity(written.len());
    let mut degenerate_layouts = 0;
    for (record, degenerate) in written {
        degenerate_layouts += usize::from(degenerate);
        records.push(record);
    }
    records.sort_by(|a, b| a.id.cmp(&b.id));
    let manifest = Manifest {
        header: ManifestHeader {
            count: spec.count,
            layouts: options.layouts.iter().map(|l| l.to_string()).collect(),
            node_range: spec.node_range,
            resolution: options.render.resolution,
            seed: spec.seed,
            split: spec.split.to_string(),
            task: spec.task.to_string(),
            version: TOOLKIT_VERSION.to_string(),
        },
        records,
    };
    let path = dir.join(MANIFEST_NAME);
    write_atomic(&path, &manifest.to_bytes())?;
    let sizes = samples.iter().map(|(s, _)| s.graph.num_nodes());
    Ok(SplitSummary {
        spec: *spec,
        manifest: path,
        min_nodes: sizes.clone().min().unwrap_or(0),
        max_nodes: sizes.max().unwrap_or(0),
        collisions: samples.iter().filter(|(_, a)| *a > 0).count(),
        degenerate_layouts,
        elapsed: started.elapsed(),
    })
}

/// Builds a single split, generating earlier splits of the same task in
/// memory for the collision check.
pub fn build_split(
    out: &Path,
    spec: &SplitSpec,
    corpus: &BaseGraphCorpus,
    options: &BuildOptions,
) -> Result<SplitSummary> {
    let specs: Vec<SplitSpec> = default_split_table(spec.seed)
        .into_iter()
        .filter(|s| s.task == spec.task && s.split < spec.split)
        .chain(std::iter::once(*spec))
        .collect();
    let mut summaries = build_task(out, &specs, &[spec.split], corpus, options)?;
    Ok(summaries.pop().expect("requested split is built"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleFailure {
    pub id: String,
    pub reasons: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub manifest: PathBuf,
    pub checked: usize,
    pub failures: Vec<SampleFailure>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn label_f64(v: &Value) -> Option<f64> {
    v.as_f64()
}

/// Reasons a stored sample disagrees with its recomputed label.
fn check_label(task: Task, graph: &Graph, file: &GraphFile) -> Vec<String> {
    let mut reasons = Vec::new();
    let Some(stored) = label_f64(&file.label) else {
        return vec!["label is not a number".into()];
    };
    let family = file.metadata.get("family").and_then(Value::as_str);
    match task {
        Task::Topology => {
            let expected = family
                .and_then(|f| f.parse::<TopologyFamily>().ok())
                .map(TopologyFamily::class_id);
            match expected {
                Some(c) if c as f64 == stored => {}
                Some(c) => reasons.push(format!("label {stored} but family implies class {c}")),
                None => reasons.push("missing or unknown topology family".into()),
            }
        }
        Task::Symmetry => match find_nontrivial_automorphism(graph) {
            Ok(v) => {
                if f64::from(u8::from(v.symmetric)) != stored {
                    reasons.push(format!("label {stored} but symmetric = {}", v.symmetric));
                }
                if let Some(w) = file.metadata.get("witness").filter(|w| !w.is_null()) {
                    let ok = serde_json::from_value::<Vec<usize>>(w.clone())
                        .ok()
                        .and_then(|m| verify_automorphism(graph, &m).ok())
                        .unwrap_or(false);
                    if !ok {
                        reasons.push("stored witness is not an automorphism".into());
                    }
                }
            }
            Err(e) => reasons.push(format!("automorphism search failed: {e}")),
        },
        Task::Spectral => match spectral_gap(graph) {
            Ok(s) if (s.lambda2 - stored).abs() <= LAMBDA2_TOLERANCE => {}
            Ok(s) => reasons.push(format!("label {stored} but lambda2 = {}", s.lambda2)),
            Err(e) => reasons.push(format!("spectral gap failed: {e}")),
        },
        Task::Bridge => {
            let count = find_bridges(graph).count();
            if count as f64 != stored {
                reasons.push(format!("label {stored} but {count} bridges"));
            }
        }
    }
    reasons
}

/// Recomputes every label of a manifest from the stored graphs and checks
/// node ranges, connectivity, referenced files and id density.
pub fn verify_dataset(manifest_path: &Path) -> Result<VerificationReport> {
    let manifest = Manifest::load(manifest_path)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let task: Task = manifest.header.task.parse()?;
    let split: Split = manifest.header.split.parse()?;
    let spec = SplitSpec {
        task,
        split,
        count: manifest.header.count,
        node_range: manifest.header.node_range,
        seed: manifest.header.seed,
    };
    let mut failures = Vec::new();
    if manifest.records.len() != spec.count {
        failures.push(SampleFailure {
            id: "<manifest>".into(),
            reasons: vec![format!(
                "{} records, header says {}",
                manifest.records.len(),
                spec.count
            )],
        });
    }
    let per_sample: Vec<Option<SampleFailure>> = manifest
        .records
        .par_iter()
        .enumerate()
        .map(|(i, record)| verify_record(dir, &spec, i, record))
        .collect::<Result<_>>()?;
    failures.extend(per_sample.into_iter().flatten());
    Ok(VerificationReport {
        manifest: manifest_path.to_path_buf(),
        checked: manifest.records.len(),
        failures,
    })
}

fn verify_record(
    dir: &Path,
    spec: &SplitSpec,
    position: usize,
    record: &ManifestRecord,
) -> Result<Option<SampleFailure>> {
    let mut reasons = Vec::new();
    if record.id != spec.sample_id(position) || record.index != position {
        reasons.push(format!("expected id {}", spec.sample_id(position)));
    }
    let file = GraphFile::load(&dir.join(&record.graph))?;
    match file.graph() {
        Ok(graph) => {
            let n = graph.num_nodes();
            if !spec.node_range.contains(n) {
                reasons.push(format!(
                    "{n} nodes outside {}-{}",
                    spec.node_range.lo, spec.node_range.hi
                ));
            }
            if !graph.is_connected() {
                reasons.push("graph is disconnected".into());
            }
            reasons.extend(check_label(spec.task, &graph, &file));
        }
        Err(e) => reasons.push(format!("malformed graph: {e}")),
    }
    match (label_f64(&record.label), label_f64(&file.label)) {
        (Some(a), Some(b)) if (a - b).abs() <= LAMBDA2_TOLERANCE => {}
        _ => reasons.push("manifest label differs from graph file".into()),
    }
    for rel in record.images.values() {
        if !dir.join(rel).is_file() {
            reasons.push(format!("missing image {rel}"));
        }
    }
    Ok((!reasons.is_empty()).then(|| SampleFailure {
        id: record.id.clone(),
        reasons,
    }))
}

/// Per-family distribution of bridge counts and spectral gaps.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FamilyStats {
    pub count: usize,
    pub bridges: BTreeMap<usize, usize>,
    /// Counts over `LAMBDA2_BINS` equal bins covering `(0, 2]`.
    pub lambda2: Vec<usize>,
    pub bridge_mean: f64,
    pub lambda2_mean: f64,
}

#[derive(Debug, Clone)]
pub struct SplitStats {
    pub task: String,
    pub split: String,
    pub node_range: NodeRange,
    pub families: BTreeMap<String, FamilyStats>,
}

pub fn lambda2_bin(x: f64) -> usize {
    let width = 2.0 / LAMBDA2_BINS as f64;
    ((x / width).ceil() as usize).clamp(1, LAMBDA2_BINS) - 1
}

/// Computes bridge-count and spectral-gap distributions per family.
pub fn compute_stats(manifest_path: &Path) -> Result<SplitStats> {
    let manifest = Manifest::load(manifest_path)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let task: Task = manifest.header.task.parse()?;
    let rows: Vec<(String, usize, f64)> = manifest
        .records
        .par_iter()
        .map(|r| -> Result<(String, usize, f64)> {
            let file = GraphFile::load(&dir.join(&r.graph))?;
            let graph = file.graph()?;
            let family = file
                .metadata
                .get("family")
                .and_then(Value::as_str)
                .unwrap_or("unknown")
                .to_string();
            let bridges = match task {
                Task::Bridge => file
                    .label
                    .as_u64()
                    .map_or_else(|| find_bridges(&graph).count(), |c| c as usize),
                _ => find_bridges(&graph).count(),
            };
            let lambda2 = match (task, file.label.as_f64()) {
                (Task::Spectral, Some(x)) => x,
                _ => spectral_gap(&graph)?.lambda2,
            };
            Ok((family, bridges, lambda2))
        })
        .collect::<Result<_>>()?;
    let mut families: BTreeMap<String, FamilyStats> = BTreeMap::new();
    for (family, bridges, lambda2) in rows {
        let f = families.entry(family).or_insert_with(|| FamilyStats {
            lambda2: vec![0; LAMBDA2_BINS],
            ..FamilyStats::default()
        });
        f.count += 1;
        *f.bridges.entry(bridges).or_default() += 1;
        f.lambda2[lambda2_bin(lambda2)] += 1;
        f.bridge_mean += bridges as f64;
        f.lambda2_mean += lambda2;
    }
    for f in families.values_mut() {
        f.bridge_mean /= f.count as f64;
        f.lambda2_mean /= f.count as f64;
    }
    Ok(SplitStats {
        task: manifest.header.task,
        split: manifest.header.split,
        node_range: manifest.header.node_range,
        families,
    })
}

impl SplitStats {
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{}/{} nodes {}-{}\n{:<24} {:>6} {:>12} {:>12} {:>8} {:>8}\n",
            self.task,
            self.split,
            self.node_range.lo,
            self.node_range.hi,
            "family",
            "count",
            "bridges_mean",
            "lambda2_mean",
            "br_min",
            "br_max"
        );
        for (name, f) in &self.families {
            let lo = f.bridges.keys().next().copied().unwrap_or(0);
            let hi = f.bridges.keys().next_back().copied().unwrap_or(0);
            s += &format!(
                "{name:<24} {:>6} {:>12.4} {:>12.6} {lo:>8} {hi:>8}\n",
                f.count, f.bridge_mean, f.lambda2_mean
            );
        }
        s
    }
}

/// One bar chart per family, stacked vertically.
fn histogram_svg(title: &str, panels: &[(String, Vec<(String, usize)>)]) -> String {
    const W: f64 = 480.0;
    const PANEL: f64 = 140.0;
    const PLOT: f64 = 100.0;
    let height = 30.0 + PANEL * panels.len() as f64;
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{height}\" font-family=\"sans-serif\" font-size=\"10\">\n\
         <text x=\"10\" y=\"18\" font-size=\"13\">{title}</text>\n"
    );
    for (p, (name, bars)) in panels.iter().enumerate() {
        let top = 30.0 + PANEL * p as f64;
        let base = top + 15.0 + PLOT;
        let max = bars.iter().map(|b| b.1).max().unwrap_or(1).max(1) as f64;
        let bw = (W - 40.0) / bars.len().max(1) as f64;
        s += &format!("<text x=\"10\" y=\"{:.1}\">{name}</text>\n", top + 10.0);
        for (i, (label, count)) in bars.iter().enumerate() {
            let h = PLOT * *count as f64 / max;
            let x = 20.0 + bw * i as f64;
            s += &format!(
                "<rect x=\"{x:.1}\" y=\"{:.1}\" width=\"{:.1}\" height=\"{h:.1}\" fill=\"steelblue\"><title>{label}: {count}</title></rect>\n",
                base - h,
                (bw - 1.0).max(0.5)
            );
        }
        if let (Some(first), Some(last)) = (bars.first(), bars.last()) {
            s += &format!(
                "<text x=\"20\" y=\"{:.1}\">{}</text><text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>\n",
                base + 12.0,
                first.0,
                W - 20.0,
                base + 12.0,
                last.0
            );
        }
    }
    s + "</svg>\n"
}

/// Computes statistics and writes `stats.txt`, `bridges.svg` and
/// `lambda2.svg` beside the manifest.
pub fn emit_stats(manifest_path: &Path) -> Result<SplitStats> {
    let stats = compute_stats(manifest_path)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    write_atomic(&dir.join("stats.txt"), stats.to_text().as_bytes())?;
    let bridge_panels: Vec<(String, Vec<(String, usize)>)> = stats
        .families
        .iter()
        .map(|(name, f)| {
            let hi = f.bridges.keys().next_back().copied().unwrap_or(0);
            let bars = (0..=hi)
                .map(|b| (b.to_string(), f.bridges.get(&b).copied().unwrap_or(0)))
                .collect();
            (name.clone(), bars)
        })
        .collect();
    let title = format!("{}/{}", stats.task, stats.split);
    write_atomic(
        &dir.join("bridges.svg"),
        histogram_svg(&format!("bridge counts, {title}"), &bridge_panels).as_bytes(),
    )?;
    let width = 2.0 / LAMBDA2_BINS as f64;
    let lambda_panels: Vec<(String, Vec<(String, usize)>)> = stats
        .families
        .iter()
        .map(|(name, f)| {
            let bars = f
                .lambda2
                .iter()
                .enumerate()
                .map(|(i, &c)| (format!("{:.1}", width * (i + 1) as f64), c))
                .collect();
            (name.clone(), bars)
        })
        .collect();
    write_atomic(
        &dir.join("lambda2.svg"),
        histogram_svg(&format!("spectral gaps, {title}"), &lambda_panels).as_bytes(),
    )?;
    Ok(stats)
}

/// Every manifest below `root`, sorted.
pub fn find_manifests(root: &Path) -> Result<Vec<PathBuf>> {
    let mut found = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        let entries = match fs::read_dir(&dir) {
            Ok(e) => e,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => continue,
            Err(e) => return Err(Error::io(&dir, e)),
        };
        for entry in entries {
            let path = entry.map_err(|e| Error::io(&dir, e))?.path();
            if path.is_dir() {
                stack.push(path);
            } else if path.file_name().is_some_and(|n| n == MANIFEST_NAME) {
                found.push(path);
            }
        }
    }
    found.sort();
    Ok(found)
}
