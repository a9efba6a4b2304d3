use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use cmcf_core::bnp::{self, BnpOptions, BnpStatus, RelaxationKind};
use cmcf_core::colgen::{solve_inner, solve_pattern, solve_tight, ColgenOptions, NodeStatus};
use cmcf_core::json::{self, SolutionDoc};
use cmcf_core::model::{objective, FlowSolution};
use cmcf_core::sndlib::{parse_sndlib, prepare as prepare_instance};
use cmcf_core::{flowdev, heuristic, ColgenError, Instance};
use serde_json::json;

use crate::config::{PrepareArgs, RunConfig, SolveArgs, Solver};
use crate::error::{create_dir, read_file, write_file, CliError, EXIT_LIMIT};

/// Result of one solver run, before serialization.
pub struct Outcome {
    pub doc: SolutionDoc,
    /// A time, node or iteration limit stopped the run early.
    pub limited: bool,
    /// Incumbent value, for solvers that produce unsplittable solutions.
    pub incumbent: Option<f64>,
    pub nodes: Option<usize>,
    pub columns: Option<usize>,
}

impl Outcome {
    /// `(incumbent − bound) / incumbent` when both sides exist.
    pub fn gap(&self) -> Option<f64> {
        Some(bnp::gap(self.incumbent?, self.doc.bound?))
    }
}

fn file_stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "instance".to_string(), |s| s.to_string_lossy().into_owned())
}

pub fn prepare(args: &PrepareArgs) -> Result<ExitCode, CliError> {
    let text = read_file(&args.input)?;
    let raw = parse_sndlib(&text).map_err(|e| CliError::Input(format!("{}: {e}", args.input.display())))?;
    let (inst, report, summary) =
        prepare_instance(&raw, args.cost.into()).map_err(|e| CliError::Solver(format!("preparation failed: {e}")))?;
    let name = file_stem(&args.input);
    create_dir(&args.out)?;
    let instance_text = json::write_instance(&inst).map_err(|e| CliError::Solver(e.to_string()))?;
    let report_doc = json!({
        "source": args.input.file_name().map(|s| s.to_string_lossy()),
        "summary": {
            "nodes": summary.nodes,
            "raw_links": summary.raw_links,
            "arcs": summary.arcs,
            "raw_demands": summary.raw_demands,
            "commodities": summary.commodities,
        },
        "scaling": report,
    });
    let report_text = json::to_string(&report_doc).map_err(|e| CliError::Solver(e.to_string()))?;
    write_file(&args.out.join(format!("{name}.json")), &instance_text)?;
    write_file(&args.out.join(format!("{name}.report.json")), &report_text)?;
    println!(
        "{name}: {} nodes, {} arcs, {} commodities, capacity multiplier {}",
        summary.nodes, summary.arcs, summary.commodities, report.multiplier
    );
    Ok(ExitCode::SUCCESS)
}

pub fn load_instance(path: &Path) -> Result<Instance, CliError> {
    let text = read_file(path)?;
    json::read_instance(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn solve(args: &SolveArgs) -> Result<ExitCode, CliError> {
    let inst = load_instance(&args.instance)?;
    let start = Instant::now();
    let outcome = run_solver(&inst, args.solver, &args.run)?;
    let elapsed = start.elapsed().as_secs_f64();
    create_dir(&args.out)?;
    let path: PathBuf = args.out.join(format!("{}.{}.json", file_stem(&args.instance), args.solver.name()));
    let text = json::to_string(&outcome.doc).map_err(|e| CliError::Solver(e.to_string()))?;
    write_file(&path, &text)?;
    let bound = outcome.doc.bound.map_or_else(|| "-".to_string(), |b| b.to_string());
    println!(
        "{}: status {}, objective {}, bound {bound}, {elapsed:.3}s",
        args.solver.name(),
        outcome.doc.status,
        outcome.doc.objective
    );
    Ok(if outcome.limited { ExitCode::from(EXIT_LIMIT) } else { ExitCode::SUCCESS })
}

fn doc(
    inst: &Instance,
    solver: Solver,
    status: &str,
    flow: &FlowSolution,
    objective: f64,
    bound: Option<f64>,
    stats: serde_json::Value,
) -> Result<SolutionDoc, CliError> {
    SolutionDoc::new(inst, solver.name(), status, flow, objective, bound, stats).map_err(|e| CliError::Solver(e.to_string()))
}

fn solver_error(e: impl std::fmt::Display) -> CliError {
    CliError::Solver(e.to_string())
}

/// Runs `solver`; limit hits come back as an [`Outcome`] with `limited`
/// set, every other failure as an error.
pub fn run_solver(inst: &Instance, solver: Solver, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let deadline = cfg.time_limit().map(|t| Instant::now() + t);
    let colgen = ColgenOptions { deadline, ..cfg.colgen() };
    match solver {
        Solver::Inner | Solver::TightInner | Solver::Pattern => {
            let result = match solver {
                Solver::Inner => solve_inner(inst, &colgen),
                Solver::TightInner => solve_tight(inst, &colgen),
                _ => solve_pattern(inst, &colgen),
            };
            match result {
                Ok(r) => {
                    let status = match r.status {
                        NodeStatus::Optimal => "optimal",
                        NodeStatus::Infeasible => "infeasible",
                    };
                    let value = objective(inst, &r.flow).map_err(solver_error)?;
                    let columns = r.stats.path_columns + r.stats.arc_columns;
                    let stats = json!({ "colgen": r.stats, "integral": r.is_integral() });
                    Ok(Outcome {
                        doc: doc(inst, solver, status, &r.flow, value, Some(r.bound), stats)?,
                        limited: false,
                        incumbent: None,
                        nodes: None,
                        columns: Some(columns),
                    })
                }
                Err(e @ (ColgenError::TimeLimit | ColgenError::Convergence { .. })) => {
                    // No usable relaxation: report the all-rejected routing.
                    let status = if matches!(e, ColgenError::TimeLimit) { "time_limit" } else { "iteration_limit" };
                    eprintln!("{}: {e}", solver.name());
                    let flow = FlowSolution::empty(inst);
                    let value = objective(inst, &flow).map_err(solver_error)?;
                    Ok(Outcome {
                        doc: doc(inst, solver, status, &flow, value, None, json!({ "error": e.to_string() }))?,
                        limited: true,
                        incumbent: None,
                        nodes: None,
                        columns: None,
                    })
                }
                Err(e) => Err(solver_error(e)),
            }
        }
        Solver::BnpTight | Solver::BnpPattern => {
            let kind = if solver == Solver::BnpTight { RelaxationKind::Tight } else { RelaxationKind::Pattern };
            let opts = BnpOptions {
                gap_target: cfg.gap,
                time_limit: cfg.time_limit(),
                node_limit: cfg.node_limit,
                seed: cfg.seed,
                greedy_starts: cfg.starts,
                colgen: cfg.colgen(),
            };
            let r = bnp::run(inst, kind, &opts).map_err(solver_error)?;
            let status = match r.status {
                BnpStatus::Solved => "solved",
                BnpStatus::TimeLimit => "time_limit",
                BnpStatus::NodeLimit => "node_limit",
                BnpStatus::IterationLimit => "iteration_limit",
            };
            let bound = r.bound.is_finite().then_some(r.bound);
            let stats = json!({
                "nodes": r.nodes,
                "columns": r.columns,
                "gap": r.gap(),
                "greedy_value": r.greedy_value,
                "root_bound": r.root_bound.is_finite().then_some(r.root_bound),
                "root_integral": r.root_integral,
                "integral_nodes": r.integral_nodes,
                "trace": r.trace,
            });
            Ok(Outcome {
                doc: doc(inst, solver, status, &r.flow(), r.incumbent_value, bound, stats)?,
                limited: r.status != BnpStatus::Solved || r.gap() > cfg.gap,
                incumbent: Some(r.incumbent_value),
                nodes: Some(r.nodes),
                columns: Some(r.columns),
            })
        }
        Solver::Greedy => {
            let r = heuristic::multi_start(inst, cfg.starts, cfg.seed);
            let rejected = r.paths.iter().filter(|p| p.is_none()).count();
            let stats = json!({
                "seed": cfg.seed,
                "starts": cfg.starts,
                "order": r.order,
                "rejected": rejected,
            });
            Ok(Outcome {
                doc: doc(inst, solver, "feasible", &r.flow(), r.objective, None, stats)?,
                limited: false,
                incumbent: Some(r.objective),
                nodes: None,
                columns: None,
            })
        }
        Solver::Flowdev => {
            let st = flowdev::run(inst, cfg.fw_tol, cfg.fw_iterations).map_err(solver_error)?;
            let status = if st.converged { "converged" } else { "iteration_limit" };
            let stats = json!({
                "iterations": st.iterations,
                "gap": st.gap,
                "relative_gap": st.relative_gap(),
                "trajectory": st.trajectory,
            });
            Ok(Outcome {
                doc: doc(inst, solver, status, &st.flow(), st.objective, None, stats)?,
                limited: !st.converged,
                incumbent: None,
                nodes: None,
                columns: None,
            })
        }
    }
}
