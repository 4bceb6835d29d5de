//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits nonzero if any failed. Built with `harness = false`
//! so the lines always reach the console.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use graphabstract::automorphism::{find_nontrivial_automorphism, verify_automorphism};
use graphabstract::bridges::find_bridges;
use graphabstract::corpus::{synthetic_base, BaseGraphCorpus, CorpusSource};
use graphabstract::dataset::{
    build_task, compute_stats, default_split_table, layout_seed, load_corpus, split_dir,
    verify_dataset, BuildOptions, GraphFile, Manifest, Split, SplitSpec, SplitStats, Task,
    MANIFEST_NAME,
};
use graphabstract::graph::{connected_components, ensure_connected, Graph};
use graphabstract::layout::{circular_layout, compute_layout, LayoutAlgorithm};
use graphabstract::render::{render_image, RenderSpec};
use graphabstract::spectral::{jacobi_eigen, normalized_laplacian, spectral_gap};
use graphabstract::spectral_gen::sample_mu;
use graphabstract::symmetry::{
    bipartite_double_cover, k_fold_cyclic_cover, layer_rotation, layer_swap,
};
use graphabstract::topology::block_model;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Count, smallest and largest node count.
type SplitRow = (usize, usize, usize);

/// Expected rows per task, splits in build order.
const SPLIT_TABLE: [(&str, [SplitRow; 5]); 4] = [
    (
        "topology",
        [
            (3000, 20, 50),
            (300, 20, 50),
            (300, 20, 50),
            (300, 40, 100),
            (300, 60, 150),
        ],
    ),
    (
        "symmetry",
        [
            (2000, 30, 60),
            (200, 30, 60),
            (600, 30, 60),
            (600, 50, 100),
            (600, 70, 150),
        ],
    ),
    (
        "spectral",
        [
            (3000, 20, 50),
            (300, 20, 50),
            (300, 20, 50),
            (300, 40, 100),
            (300, 60, 150),
        ],
    ),
    (
        "bridge",
        [
            (2500, 20, 50),
            (250, 20, 50),
            (250, 20, 50),
            (250, 40, 100),
            (250, 60, 150),
        ],
    ),
];

fn manifest_path(out: &Path, task: Task, split: Split) -> PathBuf {
    split_dir(out, task, split).join(MANIFEST_NAME)
}

/// Builds every task and split at `seed` the way `generate` does.
fn full_build(out: &Path, seed: u64, layouts: &[LayoutAlgorithm], workers: usize, tasks: &[Task]) {
    let options = BuildOptions {
        layouts: layouts.to_vec(),
        render: RenderSpec::default(),
        workers,
    };
    let corpus = if tasks.contains(&Task::Symmetry) {
        load_corpus(&CorpusSource::Synthetic, seed).unwrap()
    } else {
        BaseGraphCorpus::default()
    };
    for &task in tasks {
        let specs: Vec<SplitSpec> = default_split_table(seed)
            .into_iter()
            .filter(|s| s.task == task)
            .collect();
        build_task(out, &specs, &Split::ALL, &corpus, &options).unwrap();
    }
}

fn criterion_1(out: &Path, elapsed: f64) -> Outcome {
    let mut problems = Vec::new();
    let mut total = 0;
    for (task_name, rows) in SPLIT_TABLE {
        let task: Task = task_name.parse().unwrap();
        for (split, (count, lo, hi)) in Split::ALL.into_iter().zip(rows) {
            let path = manifest_path(out, task, split);
            let m = Manifest::load(&path).map_err(|e| e.to_string())?;
            let dir = path.parent().unwrap();
            if m.records.len() != count || m.header.count != count {
                problems.push(format!(
                    "{task}/{split}: {} graphs, want {count}",
                    m.records.len()
                ));
            }
            if (m.header.node_range.lo, m.header.node_range.hi) != (lo, hi) {
                problems.push(format!("{task}/{split}: header range differs"));
            }
            for r in &m.records {
                let text = fs::read_to_string(dir.join(&r.graph)).map_err(|e| e.to_string())?;
                let v: serde_json::Value =
                    serde_json::from_str(&text).map_err(|e| e.to_string())?;
                let n = v["num_nodes"].as_u64().unwrap() as usize;
                if !(lo..=hi).contains(&n) {
                    problems.push(format!("{}: {n} nodes outside {lo}-{hi}", r.id));
                }
            }
            total += m.records.len();
        }
    }
    check(
        problems.is_empty() && elapsed < 1800.0,
        format!(
            "{total} graphs over 20 splits, build {elapsed:.0}s single-threaded{}",
            if problems.is_empty() {
                String::new()
            } else {
                format!("; {}", problems[..problems.len().min(5)].join("; "))
            }
        ),
    )
}

/// Exhaustive search for a non-identity automorphism.
fn brute_force_symmetric(g: &Graph) -> bool {
    let n = g.num_nodes();
    let mut perm: Vec<usize> = (0..n).collect();
    let edges = g.edges();
    let is_auto = |p: &[usize]| edges.iter().all(|&(u, v)| g.has_edge(p[u], p[v]));
    // Heap's algorithm; the first permutation is the identity.
    let mut c = vec![0; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            if is_auto(&perm) {
                return true;
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    false
}

fn criterion_2(out: &Path) -> Outcome {
    let mut checked = 0;
    let mut failures = 0;
    let mut small_subset = 0;
    for split in Split::ALL {
        let path = manifest_path(out, Task::Symmetry, split);
        let report = verify_dataset(&path).map_err(|e| e.to_string())?;
        checked += report.checked;
        failures += report.failures.len();
        let m = Manifest::load(&path).map_err(|e| e.to_string())?;
        for r in &m.records {
            let file = GraphFile::load(&path.parent().unwrap().join(&r.graph))
                .map_err(|e| e.to_string())?;
            if file.num_nodes <= 8 {
                small_subset += 1;
                let g = file.graph().map_err(|e| e.to_string())?;
                if brute_force_symmetric(&g) != (r.label.as_u64() == Some(1)) {
                    failures += 1;
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut disagreements = 0;
    let mut symmetric = 0;
    for _ in 0..500 {
        let n = rng.gen_range(1..=8);
        let p = rng.gen_range(0.1..0.9);
        let g = block_model(&[n], p, 0.0, &mut rng);
        let ours = find_nontrivial_automorphism(&g).map_err(|e| e.to_string())?;
        let truth = brute_force_symmetric(&g);
        symmetric += usize::from(truth);
        if ours.symmetric != truth {
            disagreements += 1;
        }
        if let Some(w) = &ours.witness {
            if !verify_automorphism(&g, &w.mapping).unwrap() || w.is_identity() {
                disagreements += 1;
            }
        }
    }
    check(
        checked == 4000 && failures == 0 && disagreements == 0,
        format!(
            "{checked} dataset labels re-verified, {failures} failures; {small_subset} dataset graphs with n <= 8; \
             500 random graphs ({symmetric} symmetric) vs brute force, {disagreements} disagreements"
        ),
    )
}

fn random_base(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> Graph {
    let n = rng.gen_range(lo..=hi);
    if rng.gen_bool(0.5) {
        synthetic_base(n, rng)
    } else {
        let p = rng.gen_range(0.1..0.5);
        ensure_connected(&block_model(&[n], p, 0.0, rng), rng).0
    }
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut bad_double = 0;
    let mut bad_cyclic = 0;
    for _ in 0..1000 {
        let base = random_base(&mut rng, 5, 50);
        let cover = bipartite_double_cover(&base);
        let sigma = layer_swap(base.num_nodes());
        let ok = verify_automorphism(&cover, &sigma.mapping).unwrap()
            && !sigma.is_identity()
            && sigma.power(2).is_identity();
        bad_double += usize::from(!ok);
    }
    for _ in 0..1000 {
        let k = rng.gen_range(2..=5);
        let base = random_base(&mut rng, 5, 50.min(400 / k));
        let cover = k_fold_cyclic_cover(&base, k).unwrap();
        let tau = layer_rotation(base.num_nodes(), k);
        let ok = verify_automorphism(&cover, &tau.mapping).unwrap()
            && tau.power(k).is_identity()
            && (1..k).all(|j| !tau.power(j).is_identity());
        bad_cyclic += usize::from(!ok);
    }
    check(
        bad_double == 0 && bad_cyclic == 0,
        format!("1000 double covers ({bad_double} bad), 1000 cyclic covers ({bad_cyclic} bad)"),
    )
}

/// Bridges by deleting each edge and counting components.
fn brute_force_bridges(g: &Graph) -> usize {
    let before = connected_components(g).count;
    g.edges()
        .into_iter()
        .filter(|&(u, v)| {
            let mut h = g.clone();
            h.remove_edge(u, v);
            connected_components(&h).count > before
        })
        .count()
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut mismatches = 0;
    for _ in 0..200 {
        let n = rng.gen_range(1..=40);
        let p = rng.gen_range(0.0..0.3);
        let g = block_model(&[n], p, 0.0, &mut rng);
        if find_bridges(&g).count() != brute_force_bridges(&g) {
            mismatches += 1;
        }
    }
    let mut closed = 0;
    for n in 2..=40 {
        // Random recursive tree.
        let mut t = Graph::new(n);
        for v in 1..n {
            t.add_edge(v, rng.gen_range(0..v));
        }
        closed += usize::from(find_bridges(&t).count() != n - 1);
        closed += usize::from(find_bridges(&Graph::path(n)).count() != n - 1);
        if n >= 3 {
            closed += usize::from(find_bridges(&Graph::cycle(n)).count() != 0);
        }
    }
    check(
        mismatches == 0 && closed == 0,
        format!("200 random graphs, {mismatches} mismatches; trees/paths/cycles {closed} wrong"),
    )
}

fn criterion_5() -> Outcome {
    let mut worst_closed: f64 = 0.0;
    for n in 3..=12 {
        let c = spectral_gap(&Graph::cycle(n)).unwrap().lambda2;
        worst_closed = worst_closed.max((c - (1.0 - (2.0 * PI / n as f64).cos())).abs());
        let k = spectral_gap(&Graph::complete(n)).unwrap().lambda2;
        worst_closed = worst_closed.max((k - n as f64 / (n as f64 - 1.0)).abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_residual: f64 = 0.0;
    for _ in 0..50 {
        let g = random_base(&mut rng, 2, 60);
        let l = normalized_laplacian(&g).unwrap();
        let rebuilt = jacobi_eigen(&l).unwrap().reconstruct();
        let n = l.dim();
        let mut sum = 0.0;
        for i in 0..n {
            for j in 0..n {
                sum += (l.get(i, j) - rebuilt.get(i, j)).powi(2);
            }
        }
        worst_residual = worst_residual.max(sum.sqrt());
    }
    check(
        worst_closed < 1e-6 && worst_residual < 1e-8,
        format!("closed-form error {worst_closed:.2e}, worst reconstruction residual {worst_residual:.2e}"),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut counts = [0usize; 3];
    for _ in 0..10_000 {
        let mu = sample_mu(&mut rng).get();
        let stratum = if mu < 0.2 {
            0
        } else if mu <= 0.5 {
            1
        } else {
            2
        };
        counts[stratum] += 1;
    }
    let freq = counts.map(|c| c as f64 / 10_000.0);
    let ok = freq
        .iter()
        .zip([0.4, 0.3, 0.3])
        .all(|(f, p)| (f - p).abs() <= 0.02);
    check(ok, format!("stratum frequencies {freq:?}"))
}

/// One-sided sign-test p-value for `k` positive outcomes out of `n`.
fn sign_test(k: usize, n: usize) -> f64 {
    let choose =
        |n: usize, r: usize| (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
    (k..=n).map(|j| choose(n, j)).sum::<f64>() / 2f64.powi(n as i32)
}

/// Families whose bridges come from pendant trees hung on dense cores.
const TREE_LIKE: [&str; 1] = ["multicore"];
const SEEDS: [u64; 5] = [0, 1, 2, 3, 4];

fn test_stats(out: &Path) -> Result<[SplitStats; 3], String> {
    let get =
        |split| compute_stats(&manifest_path(out, Task::Bridge, split)).map_err(|e| e.to_string());
    Ok([
        get(Split::TestId)?,
        get(Split::TestNearOod)?,
        get(Split::TestFarOod)?,
    ])
}

fn strictly(means: &[f64], cmp: fn(f64, f64) -> bool) -> bool {
    means.windows(2).all(|w| cmp(w[0], w[1]))
}

fn criterion_7(seed0: &Path) -> Outcome {
    let mut bridge_hits: BTreeMap<&str, usize> = BTreeMap::new();
    let mut gap_hits: BTreeMap<&str, usize> = BTreeMap::new();
    for seed in SEEDS {
        let tmp;
        let root = if seed == 0 {
            seed0
        } else {
            tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
            full_build(tmp.path(), seed, &[], 1, &[Task::Bridge]);
            tmp.path()
        };
        let stats = test_stats(root)?;
        for family in TREE_LIKE {
            let bridges: Vec<f64> = stats
                .iter()
                .map(|s| s.families[family].bridge_mean)
                .collect();
            let gaps: Vec<f64> = stats
                .iter()
                .map(|s| s.families[family].lambda2_mean)
                .collect();
            *bridge_hits.entry(family).or_default() +=
                usize::from(strictly(&bridges, |a, b| a < b));
            *gap_hits.entry(family).or_default() += usize::from(strictly(&gaps, |a, b| a > b));
            println!(
                "    seed {seed} {family}: bridge means {bridges:.2?}, lambda2 means {gaps:.4?}"
            );
        }
    }
    let p = |hits: &BTreeMap<&str, usize>| -> Vec<f64> {
        hits.values().map(|&k| sign_test(k, SEEDS.len())).collect()
    };
    let (p_bridge, p_gap) = (p(&bridge_hits), p(&gap_hits));
    check(
        p_bridge.iter().chain(&p_gap).all(|&x| x < 0.05),
        format!(
            "ID < near < far bridge means in {bridge_hits:?} seeds (p = {p_bridge:?}); \
             ID > near > far lambda2 means in {gap_hits:?} seeds (p = {p_gap:?})"
        ),
    )
}

fn tree_bytes(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                files.insert(
                    path.strip_prefix(root).unwrap().to_path_buf(),
                    fs::read(&path).unwrap(),
                );
            }
        }
    }
    files
}

fn criterion_8(a: &Path, b: &Path) -> Outcome {
    let (ta, tb) = (tree_bytes(a), tree_bytes(b));
    let differing = ta.iter().filter(|(k, v)| tb.get(*k) != Some(*v)).count()
        + tb.keys().filter(|k| !ta.contains_key(*k)).count();
    let kinds = |t: &BTreeMap<PathBuf, Vec<u8>>, ext: &str| {
        t.keys()
            .filter(|p| p.extension().is_some_and(|e| e == ext))
            .count()
    };
    check(
        differing == 0 && !ta.is_empty(),
        format!(
            "{} files ({} manifests, {} graphs, {} images); workers 1 vs 4: {differing} differ",
            ta.len(),
            kinds(&ta, "jsonl"),
            kinds(&ta, "json"),
            kinds(&ta, "png")
        ),
    )
}

fn decode(bytes: &[u8]) -> (png::OutputInfo, Vec<u8>) {
    let mut reader = png::Decoder::new(std::io::Cursor::new(bytes))
        .read_info()
        .unwrap();
    let mut buf = vec![0; reader.output_buffer_size().unwrap()];
    let info = reader.next_frame(&mut buf).unwrap();
    buf.truncate(info.buffer_size());
    (info, buf)
}

fn criterion_9(a: &Path) -> Outcome {
    let mut problems = Vec::new();
    // Default images from the build, re-rendered and compared pixel for pixel.
    let path = manifest_path(a, Task::Topology, Split::TestId);
    let m = Manifest::load(&path).map_err(|e| e.to_string())?;
    let dir = path.parent().unwrap();
    let spec = default_split_table(0)
        .into_iter()
        .find(|s| s.task == Task::Topology && s.split == Split::TestId)
        .unwrap();
    let mut checked_images = 0;
    for r in m.records.iter().take(30) {
        for (layout, rel) in &r.images {
            let (info, pixels) = decode(&fs::read(dir.join(rel)).unwrap());
            checked_images += 1;
            if (info.width, info.height) != (224, 224)
                || info.color_type != png::ColorType::Rgb
                || info.bit_depth != png::BitDepth::Eight
            {
                problems.push(format!(
                    "{rel}: {}x{} {:?}",
                    info.width, info.height, info.color_type
                ));
            }
            let file = GraphFile::load(&dir.join(&r.graph)).unwrap();
            let g = file.graph().unwrap();
            let l =
                compute_layout(&g, layout.parse().unwrap(), layout_seed(&spec, r.index)).unwrap();
            let again = render_image(&g, &l, &RenderSpec::default()).unwrap().image;
            if again.pixels != pixels {
                problems.push(format!("{rel}: decoded pixels differ from a fresh render"));
            }
        }
    }
    let hash = |bytes: &[u8]| format!("{:x}", Sha256::digest(bytes));
    let goldens = |resolution: u32| -> Vec<String> {
        let spec = RenderSpec::with_resolution(resolution).unwrap();
        [Graph::cycle(6), Graph::complete(5), Graph::star(7)]
            .iter()
            .map(|g| {
                hash(
                    &render_image(g, &circular_layout(g), &spec)
                        .unwrap()
                        .image
                        .encode_png()
                        .unwrap(),
                )
            })
            .collect()
    };
    for resolution in [64, 128, 224, 448] {
        let spec = RenderSpec::with_resolution(resolution).unwrap();
        let g = Graph::cycle(6);
        let (info, _) = decode(
            &render_image(&g, &circular_layout(&g), &spec)
                .unwrap()
                .image
                .encode_png()
                .unwrap(),
        );
        if (info.width, info.height) != (resolution, resolution) {
            problems.push(format!(
                "resolution {resolution} produced {}x{}",
                info.width, info.height
            ));
        }
        if goldens(resolution) != goldens(resolution) {
            problems.push(format!("golden hashes unstable at {resolution}"));
        }
    }
    check(
        problems.is_empty(),
        format!(
            "{checked_images} build images decoded as 224x224 8-bit RGB and equal to fresh renders; 64/128/224/448 rendered; golden hashes {}{}",
            goldens(224)[0].get(..12).unwrap_or(""),
            if problems.is_empty() { String::new() } else { format!("; {}", problems[..problems.len().min(5)].join("; ")) }
        ),
    )
}

fn run(results: &mut Vec<(u8, bool)>, id: u8, name: &str, f: impl FnOnce() -> Outcome) {
    let started = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let (passed, detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    println!(
        "{} criterion {id} ({name}): {detail} [{:.1}s]",
        if passed { "PASS" } else { "FAIL" },
        started.elapsed().as_secs_f64()
    );
    results.push((id, passed));
}

fn main() {
    // `cargo test -- --list` and filters should not trigger full builds.
    let args: Vec<String> = std::env::args().collect();
    if args.iter().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let mut results = Vec::new();
    run(&mut results, 3, "cover witnesses", criterion_3);
    run(&mut results, 4, "bridge oracle", criterion_4);
    run(&mut results, 5, "spectral accuracy", criterion_5);
    run(&mut results, 6, "stratified mixing", criterion_6);

    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let started = Instant::now();
    full_build(a.path(), 0, &LayoutAlgorithm::DEFAULT, 1, &Task::ALL);
    let elapsed = started.elapsed().as_secs_f64();
    run(&mut results, 1, "split table", || {
        criterion_1(a.path(), elapsed)
    });
    run(&mut results, 2, "symmetry soundness", || {
        criterion_2(a.path())
    });
    run(&mut results, 9, "render contract", || criterion_9(a.path()));
    run(&mut results, 7, "distribution shift", || {
        criterion_7(a.path())
    });
    full_build(b.path(), 0, &LayoutAlgorithm::DEFAULT, 4, &Task::ALL);
    run(&mut results, 8, "determinism", || {
        criterion_8(a.path(), b.path())
    });

    results.sort();
    let failed: Vec<u8> = results.iter().filter(|r| !r.1).map(|r| r.0).collect();
    println!(
        "acceptance: {} passed, {} failed{}",
        results.len() - failed.len(),
        failed.len(),
        if failed.is_empty() {
            String::new()
        } else {
            format!(" {failed:?}")
        }
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
