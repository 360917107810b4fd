//! Acceptance suite. Runs every criterion in order and prints one
//! `PASS`/`FAIL` line per criterion; exits non-zero if any gating criterion
//! fails. Criterion 10 needs an external recording and is skipped unless
//! `EVOSPIKE_DATASET` points at a `time_s,channel` CSV.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use evospike::cli::{cmd_evolve, EvolveArgs};
use evospike::evolution::{record_counts, replay, run_evolution};
use evospike::metrics::asdr;
use evospike::topology::{build_ca, build_network};
use evospike::{
    fitness_eq4, io, rng, BinnedCounts, Connectivity, Density, EvolutionConfig, Genome, GridLayout,
    ModelKind, ModelParams, NeuronState,
};

type Outcome = Result<String, String>;

/// Reference genome used for every synthetic target:
/// leak, gain, refractory, threshold, spontaneous, inhibitory, density.
const REFERENCE: [f64; 7] = [0.3, 0.5, 0.3, 0.5, 0.05, 0.3, 0.5];
/// Frozen after calibration: 30 generations from this seed reach f = 0.1226
/// (network) and f = 0.0417 (CA).
const RECOVERY_SEED: u64 = 7;
const RECOVERY_THRESHOLD: f64 = 0.2;

fn counts(v: Vec<u64>) -> BinnedCounts {
    BinnedCounts {
        bin_seconds: 1.0,
        counts: v,
    }
}

/// Brute force through the empirical distribution functions: the summed
/// gap between "how many bins exceed k" for every level k. Never sorts.
fn cdf_reference(exp: &[u64], sim: &[u64]) -> f64 {
    let top = exp.iter().chain(sim).copied().max().unwrap_or(0);
    let mut gap = 0u64;
    for k in 0..top {
        let a = exp.iter().filter(|&&c| c > k).count() as i64;
        let b = sim.iter().filter(|&&c| c > k).count() as i64;
        gap += (a - b).unsigned_abs();
    }
    gap as f64 / exp.iter().sum::<u64>() as f64
}

fn criterion_1() -> Outcome {
    let started = Instant::now();
    let worked = fitness_eq4(&counts(vec![2, 0, 3]), &counts(vec![1, 1, 1])).map_err(|e| e.to_string())?;
    if (worked.objective - 0.8).abs() > 1e-12 || (worked.score - 0.2).abs() > 1e-12 {
        return Err(format!("worked example gave f = {}", worked.objective));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let mut checked = 0;
    while checked < 1000 {
        let n = rng.random_range(1..=100);
        let exp: Vec<u64> = (0..n).map(|_| rng.random_range(0..=50)).collect();
        let sim: Vec<u64> = (0..n).map(|_| rng.random_range(0..=50)).collect();
        if exp.iter().sum::<u64>() == 0 {
            continue;
        }
        let got = fitness_eq4(&counts(exp.clone()), &counts(sim.clone())).map_err(|e| e.to_string())?;
        worst = worst.max((got.objective - cdf_reference(&exp, &sim)).abs());
        checked += 1;
    }
    let elapsed = started.elapsed();
    if worst > 1e-12 {
        return Err(format!("max |diff| = {worst:e}"));
    }
    if elapsed > Duration::from_secs(1) {
        return Err(format!("took {elapsed:.2?} (limit 1 s)"));
    }
    Ok(format!("1000 pairs + worked example, max |diff| = {worst:e}, {elapsed:.2?}"))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut tested = 0;
    while tested < 100 {
        let n = rng.random_range(1..=100);
        let x: Vec<u64> = (0..n).map(|_| rng.random_range(0..=50)).collect();
        if x.iter().sum::<u64>() == 0 {
            continue;
        }
        let mut y = x.clone();
        y.shuffle(&mut rng);
        for (a, b) in [(&x, &x), (&x, &y)] {
            let f = fitness_eq4(&counts(a.clone()), &counts(b.clone())).map_err(|e| e.to_string())?;
            if f.objective != 0.0 {
                return Err(format!("f = {} for a permutation of length {n}", f.objective));
            }
        }
        tested += 1;
    }
    Ok("100 vectors: f(x, x) = f(x, shuffled x) = 0".into())
}

fn criterion_3() -> Outcome {
    let started = Instant::now();
    let layout = GridLayout::default();
    let builds = 10_000u32;
    // (row, col) -> (row, col), covering distances 1 through ~9.5
    let pairs: [((usize, usize), (usize, usize)); 20] = [
        ((5, 5), (5, 6)),
        ((5, 5), (4, 5)),
        ((5, 5), (6, 6)),
        ((0, 0), (1, 1)),
        ((2, 3), (2, 5)),
        ((7, 7), (5, 6)),
        ((0, 9), (2, 7)),
        ((4, 4), (4, 7)),
        ((3, 3), (5, 5)),
        ((1, 8), (4, 6)),
        ((9, 9), (6, 6)),
        ((0, 0), (0, 4)),
        ((2, 2), (6, 5)),
        ((8, 1), (3, 1)),
        ((0, 0), (4, 4)),
        ((9, 0), (3, 3)),
        ((0, 0), (7, 0)),
        ((1, 1), (7, 7)),
        ((0, 9), (9, 5)),
        ((0, 0), (9, 9)),
    ];
    let mut report = Vec::new();
    for (density, seed) in [(0.5, 30u64), (2.1, 31), (4.1, 32)] {
        let mut hits = [0u32; 20];
        let mut rng = rng::stream(seed);
        for _ in 0..builds {
            let conn = build_network(&layout, density, &mut rng).map_err(|e| e.to_string())?;
            for (k, (a, b)) in pairs.iter().enumerate() {
                if conn.has_edge(layout.index(a.0, a.1), layout.index(b.0, b.1)) {
                    hits[k] += 1;
                }
            }
        }
        let mut worst_z = 0.0f64;
        for (k, (a, b)) in pairs.iter().enumerate() {
            let dr = a.0 as f64 - b.0 as f64;
            let dc = a.1 as f64 - b.1 as f64;
            let p = (-(dr * dr + dc * dc) / (density * density)).exp();
            let n = builds as f64;
            let sd = (n * p * (1.0 - p)).sqrt();
            let dev = (hits[k] as f64 - n * p).abs();
            if dev > 4.0 * sd {
                return Err(format!(
                    "c_D = {density}, pair {a:?}->{b:?}: {} hits, expected {:.1} +/- {sd:.2}",
                    hits[k],
                    n * p
                ));
            }
            if sd > 0.0 {
                worst_z = worst_z.max(dev / sd);
            }
        }
        report.push(format!("c_D={density}: max |z| = {worst_z:.2}"));
    }
    let elapsed = started.elapsed();
    if elapsed > Duration::from_secs(30) {
        return Err(format!("took {elapsed:.2?} (limit 30 s)"));
    }
    Ok(format!("{} over 20 pairs x 10^4 builds, {elapsed:.2?}", report.join(", ")))
}

fn criterion_4() -> Outcome {
    let layout = GridLayout::default();
    // interior, edges, corners
    let cells = [(5, 5), (4, 4), (0, 5), (9, 4), (5, 0), (3, 9), (0, 0), (0, 9), (9, 0), (9, 9)];
    for radius in 1..=6u32 {
        let conn = build_ca(&layout, radius).map_err(|e| e.to_string())?;
        for &(r, c) in &cells {
            let node = layout.index(r, c);
            let mut expected = Vec::new();
            for rr in 0..10usize {
                for cc in 0..10usize {
                    let near = rr.abs_diff(r) as u32 <= radius && cc.abs_diff(c) as u32 <= radius;
                    if near && (rr, cc) != (r, c) {
                        expected.push(layout.index(rr, cc));
                    }
                }
            }
            let out: Vec<usize> = (0..100).filter(|&j| conn.has_edge(node, j)).collect();
            let inc: Vec<usize> = (0..100).filter(|&j| conn.has_edge(j, node)).collect();
            if out != expected || inc != expected {
                return Err(format!(
                    "radius {radius}, cell ({r},{c}): {} out / {} in, oracle {}",
                    out.len(),
                    inc.len(),
                    expected.len()
                ));
            }
        }
    }
    Ok("radius 1-6 at 10 interior/edge/corner cells match enumeration".into())
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut steps = 0u64;
    let mut spikes = 0u64;
    let mut param_sets = 0;
    while steps < 100_000 {
        let params = ModelParams {
            leak: rng.random_range(0.0..=1.0),
            integration: rng.random_range(0.0..=1.0),
            refractory_steps: rng.random_range(0..=10),
            threshold: rng.random_range(0.1..=2.0),
            spont_prob: rng.random_range(0.0..=0.5),
            inhib_ratio: 0.0,
            density: Density::Radius(1),
        };
        param_sets += 1;
        let mut state = NeuronState::at_rest(false);
        let mut last: Option<u64> = None;
        for t in 0..1000u64 {
            // heavy drive so that the threshold path is exercised too
            let input = rng.random_range(-2.0..8.0);
            state = state.step(&params, input, rng.random());
            if state.fired {
                if let Some(prev) = last {
                    if t - prev <= params.refractory_steps as u64 {
                        return Err(format!(
                            "interval {} <= refractory {} ({params:?})",
                            t - prev,
                            params.refractory_steps
                        ));
                    }
                }
                last = Some(t);
                spikes += 1;
            }
        }
        steps += 1000;
    }
    Ok(format!("{steps} steps over {param_sets} parameter sets, {spikes} spikes, no short interval"))
}

/// Connectivity and target counts for the reference genome.
fn synthetic_target(config: &EvolutionConfig, seed: u64) -> Result<(ModelParams, Connectivity, BinnedCounts), String> {
    let genome = Genome::new(REFERENCE).map_err(|e| e.to_string())?;
    let params = config.gene_bounds().decode(&genome).map_err(|e| e.to_string())?;
    let conn = Connectivity::instantiate(&GridLayout::default(), &params, &mut rng::stream(seed ^ 1))
        .map_err(|e| e.to_string())?;
    let record = replay(&params, &conn, config, seed ^ 2).map_err(|e| e.to_string())?;
    let target = record_counts(&record, config.bin_seconds).map_err(|e| e.to_string())?;
    Ok((params, conn, target))
}

fn collect_tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).expect("readable run dir") {
            let path = entry.expect("dir entry").path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_path_buf();
                out.insert(rel, fs::read(&path).expect("readable artifact"));
            }
        }
    }
    out
}

fn criterion_6(scratch: &Path) -> Outcome {
    let started = Instant::now();
    let config = EvolutionConfig {
        seed: 606,
        ..Default::default()
    };
    let (params, conn, _) = synthetic_target(&config, config.seed)?;
    let record = replay(&params, &conn, &config, config.seed ^ 2).map_err(|e| e.to_string())?;
    let target = scratch.join("det_target.csv");
    io::write_spike_events(&target, &record.observed_record().spikes()).map_err(|e| e.to_string())?;

    let run = |threads: usize| -> Result<BTreeMap<PathBuf, Vec<u8>>, String> {
        let out = scratch.join(format!("det_threads_{threads}"));
        let args = EvolveArgs {
            config: None,
            target: target.clone(),
            out: out.clone(),
            seed: Some(606),
            model: Some(ModelKind::Network),
            steps: None,
            window_offset_s: None,
            generations: Some(10),
            trials: Some(1),
            population: Some(60),
            threads: Some(threads),
        };
        cmd_evolve(&args).map_err(|e| e.to_string())?;
        Ok(collect_tree(&out))
    };
    let one = run(1)?;
    let four = run(4)?;
    if one.keys().ne(four.keys()) {
        return Err("artifact trees list different files".into());
    }
    for (path, bytes) in &one {
        if four[path] != *bytes {
            return Err(format!("{} differs between --threads 1 and 4", path.display()));
        }
    }
    let elapsed = started.elapsed();
    if elapsed > Duration::from_secs(120) {
        return Err(format!("took {elapsed:.2?} (limit 2 min)"));
    }
    Ok(format!("{} files byte-identical for --threads 1 and 4, {elapsed:.2?}", one.len()))
}

/// Criteria 7 and 8 share the same runs: one trial per model kind.
fn recovery_runs() -> Result<(Vec<(ModelKind, evospike::EvolutionResult)>, Duration), String> {
    let started = Instant::now();
    let mut runs = Vec::new();
    for kind in [ModelKind::Network, ModelKind::Ca] {
        let config = EvolutionConfig {
            model_kind: kind,
            generations: 30,
            population_size: 60,
            trials: 1,
            seed: RECOVERY_SEED,
            ..Default::default()
        };
        let (_, _, target) = synthetic_target(&config, RECOVERY_SEED)?;
        let result = run_evolution(&target, &config, 0).map_err(|e| e.to_string())?;
        runs.push((kind, result));
    }
    Ok((runs, started.elapsed()))
}

fn criterion_7(runs: &[(ModelKind, evospike::EvolutionResult)], elapsed: Duration) -> Outcome {
    let mut report = Vec::new();
    for (kind, result) in runs {
        let f = result.best.objective();
        if f > RECOVERY_THRESHOLD {
            return Err(format!("{kind}: best f = {f:.4} > {RECOVERY_THRESHOLD}"));
        }
        report.push(format!("{kind} f = {f:.4}"));
    }
    if elapsed > Duration::from_secs(300) {
        return Err(format!("took {elapsed:.2?} (limit 5 min)"));
    }
    Ok(format!(
        "seed {RECOVERY_SEED}, N=60, 30 generations: {} (threshold {RECOVERY_THRESHOLD}), {elapsed:.2?}",
        report.join(", ")
    ))
}

fn criterion_8(runs: &[(ModelKind, evospike::EvolutionResult)]) -> Outcome {
    for (kind, result) in runs {
        let mut prev = f64::INFINITY;
        for record in &result.generations {
            // the population minimum itself, not a running minimum
            let min = record
                .fitness
                .iter()
                .map(|f| f.objective)
                .fold(f64::INFINITY, f64::min);
            if min > prev {
                return Err(format!("{kind}: generation {} min f {min} > {prev}", record.generation));
            }
            prev = min;
        }
        let bsf = result.best_so_far();
        if bsf.windows(2).any(|w| w[1] > w[0]) {
            return Err(format!("{kind}: best-so-far increased"));
        }
    }
    Ok(format!("{} trials, population minimum never increases", runs.len()))
}

fn criterion_9(scratch: &Path) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let layout = GridLayout::default();
    let mut records = 0;
    for kind in [ModelKind::Network, ModelKind::Ca] {
        let config = EvolutionConfig {
            model_kind: kind,
            eval_steps: 400,
            ..Default::default()
        };
        for _ in 0..25 {
            let genome = Genome::random(&mut rng);
            let params = config.gene_bounds().decode(&genome).map_err(|e| e.to_string())?;
            let conn = Connectivity::instantiate(&layout, &params, &mut rng).map_err(|e| e.to_string())?;
            let record = replay(&params, &conn, &config, rng.random()).map_err(|e| e.to_string())?;
            let observed = record.observed_record();
            let per_second = asdr(&observed.spikes(), observed.window_seconds()).map_err(|e| e.to_string())?;
            if per_second.iter().sum::<u64>() != observed.total_spikes() as u64 {
                return Err(format!("ASDR sum differs from {} observed spikes", observed.total_spikes()));
            }
            records += 1;
        }
    }
    // every trial directory written by criterion 6
    for threads in [1, 4] {
        let dir = scratch.join(format!("det_threads_{threads}/trial_00"));
        let rows = io::load_spike_events(dir.join("raster.csv"), None).map_err(|e| e.to_string())?;
        let per_second = io::read_asdr(dir.join("asdr.csv")).map_err(|e| e.to_string())?;
        if per_second.iter().sum::<u64>() != rows.len() as u64 {
            return Err(format!("{}: asdr.csv does not sum to raster rows", dir.display()));
        }
        records += 1;
    }
    Ok(format!("{records} simulated records conserve spikes"))
}

fn criterion_10() -> Option<Outcome> {
    let path = std::env::var_os("EVOSPIKE_DATASET")?;
    let target = PathBuf::from(path);
    let config = EvolutionConfig {
        trials: 1,
        seed: 10,
        ..Default::default()
    };
    let result = (|| {
        let spikes = io::load_spike_events(&target, Some(config.window_seconds())).map_err(|e| e.to_string())?;
        let exp = evospike::metrics::bin_counts(&spikes, config.window_seconds(), config.bin_seconds)
            .map_err(|e| e.to_string())?;
        let result = run_evolution(&exp, &config, 0).map_err(|e| e.to_string())?;
        let score = 1.0 - result.best.objective();
        if score >= 0.8 {
            Ok(format!("score {score:.3} after {} generations", config.generations))
        } else {
            Err(format!("score {score:.3} < 0.8"))
        }
    })();
    Some(result)
}

fn report(id: &str, outcome: &Outcome, failures: &mut Vec<String>) {
    match outcome {
        Ok(msg) => println!("criterion {id}: PASS  {msg}"),
        Err(msg) => {
            println!("criterion {id}: FAIL  {msg}");
            failures.push(id.to_string());
        }
    }
}

fn main() {
    // libtest-style flags such as `--nocapture` are accepted and ignored
    let scratch = tempfile::tempdir().expect("scratch dir");
    let mut failures = Vec::new();

    report("1", &criterion_1(), &mut failures);
    report("2", &criterion_2(), &mut failures);
    report("3", &criterion_3(), &mut failures);
    report("4", &criterion_4(), &mut failures);
    report("5", &criterion_5(), &mut failures);
    report("6", &criterion_6(scratch.path()), &mut failures);
    match recovery_runs() {
        Ok((runs, elapsed)) => {
            report("7", &criterion_7(&runs, elapsed), &mut failures);
            report("8", &criterion_8(&runs), &mut failures);
        }
        Err(e) => {
            report("7", &Err(e.clone()), &mut failures);
            report("8", &Err(e), &mut failures);
        }
    }
    report("9", &criterion_9(scratch.path()), &mut failures);
    match criterion_10() {
        Some(outcome) => match outcome {
            Ok(msg) => println!("criterion 10: PASS  {msg} (optional)"),
            Err(msg) => println!("criterion 10: FAIL  {msg} (optional, not gating)"),
        },
        None => println!("criterion 10: SKIP  set EVOSPIKE_DATASET to a time_s,channel CSV to run"),
    }

    if failures.is_empty() {
        println!("acceptance: all gating criteria passed");
    } else {
        println!("acceptance: failed criteria {}", failures.join(", "));
        std::process::exit(1);
    }
}
