use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::Serialize;

use crate::config::{BenchArgs, RunConfig, Solver};
use crate::error::{create_dir, CliError};
use crate::solve::{load_instance, run_solver};

/// One `(instance, solver)` run. Field order is the CSV column order.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub instance: String,
    pub nodes: Option<usize>,
    pub arcs: Option<usize>,
    pub commodities: Option<usize>,
    pub solver: String,
    pub bound: Option<f64>,
    pub incumbent: Option<f64>,
    pub gap_rel: Option<f64>,
    pub time_s: f64,
    pub bnb_nodes: Option<usize>,
    pub columns: Option<usize>,
    /// Solver status, or `error` when the run failed.
    pub status: String,
}

#[derive(Debug, Clone, Serialize)]
struct ProfilePoint {
    solver: String,
    time_s: f64,
    fraction_solved: f64,
}

fn run_one(path: &PathBuf, solver: Solver, cfg: &RunConfig) -> BenchRow {
    let instance = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    let mut row = BenchRow {
        instance,
        nodes: None,
        arcs: None,
        commodities: None,
        solver: solver.name().to_string(),
        bound: None,
        incumbent: None,
        gap_rel: None,
        time_s: 0.0,
        bnb_nodes: None,
        columns: None,
        status: "error".to_string(),
    };
    let inst = match load_instance(path) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return row;
        }
    };
    row.nodes = Some(inst.network.num_nodes());
    row.arcs = Some(inst.network.num_arcs());
    row.commodities = Some(inst.num_commodities());
    let start = Instant::now();
    let result = run_solver(&inst, solver, cfg);
    row.time_s = start.elapsed().as_secs_f64();
    match result {
        Ok(out) => {
            row.bound = out.doc.bound;
            row.incumbent = out.incumbent;
            row.gap_rel = out.gap();
            row.bnb_nodes = out.nodes;
            row.columns = out.columns;
            row.status = out.doc.status;
        }
        Err(e) => eprintln!("{} / {}: {e}", row.instance, row.solver),
    }
    row
}

fn solved(row: &BenchRow) -> bool {
    matches!(row.status.as_str(), "optimal" | "solved" | "feasible" | "converged")
}

/// Per solver, the fraction of instances solved within each observed time.
fn profile(rows: &[BenchRow], n_instances: usize) -> Vec<ProfilePoint> {
    let mut by_solver: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for r in rows {
        let times = by_solver.entry(&r.solver).or_default();
        if solved(r) {
            times.push(r.time_s);
        }
    }
    let mut out = Vec::new();
    for (solver, mut times) in by_solver {
        times.sort_by(f64::total_cmp);
        out.push(ProfilePoint { solver: solver.to_string(), time_s: 0.0, fraction_solved: 0.0 });
        for (i, t) in times.iter().enumerate() {
            out.push(ProfilePoint {
                solver: solver.to_string(),
                time_s: *t,
                fraction_solved: (i + 1) as f64 / n_instances.max(1) as f64,
            });
        }
    }
    out
}

fn write_csv<T: Serialize>(path: &PathBuf, rows: &[T], header: &[&str]) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Output { path: path.display().to_string(), source: e.into() };
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(io)?;
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.serialize(r).map_err(io)?;
    }
    w.flush().map_err(|source| CliError::Output { path: path.display().to_string(), source })
}

pub const BENCH_HEADER: [&str; 12] = [
    "instance",
    "nodes",
    "arcs",
    "commodities",
    "solver",
    "bound",
    "incumbent",
    "gap_rel",
    "time_s",
    "bnb_nodes",
    "columns",
    "status",
];

pub fn bench(args: &BenchArgs) -> Result<ExitCode, CliError> {
    let pattern = glob::glob(&args.instances).map_err(|e| CliError::Input(format!("bad glob: {e}")))?;
    let mut paths: Vec<PathBuf> = pattern.filter_map(Result::ok).collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::Input(format!("no instance matches {}", args.instances)));
    }
    let jobs: Vec<(usize, Solver)> =
        (0..paths.len()).flat_map(|i| args.solvers.iter().map(move |s| (i, *s))).collect();
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<BenchRow>>> = Mutex::new(vec![None; jobs.len()]);
    std::thread::scope(|scope| {
        for _ in 0..args.jobs.clamp(1, jobs.len()) {
            scope.spawn(|| loop {
                let j = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(i, solver)) = jobs.get(j) else { break };
                let row = run_one(&paths[i], solver, &args.run);
                eprintln!("{} / {}: {} in {:.3}s", row.instance, row.solver, row.status, row.time_s);
                results.lock().expect("no worker panicked")[j] = Some(row);
            });
        }
    });
    let rows: Vec<BenchRow> = results.into_inner().expect("no worker panicked").into_iter().flatten().collect();

    create_dir(&args.out)?;
    write_csv(&args.out.join("bench.csv"), &rows, &BENCH_HEADER)?;
    write_csv(&args.out.join("profile.csv"), &profile(&rows, paths.len()), &["solver", "time_s", "fraction_solved"])?;
    println!("{} runs on {} instances written to {}", rows.len(), paths.len(), args.out.display());
    Ok(ExitCode::SUCCESS)
}
