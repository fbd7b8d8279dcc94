use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use anyhow::{anyhow, Context};

use tbn_core::gridgate::{gridgate, ColumnVariant};
use tbn_core::hilbert::{
    basis_document, basis_from_document, check_basis, polymer_basis, BasisDocument, HilbertBudget,
    HilbertError, PolymerBasis,
};
use tbn_core::ipmodel::{build, default_bound, BuildOptions, ModelError, StableConfigsModel};
use tbn_core::lp_format::{read_lp, read_solution, write_lp};
use tbn_core::pathways::{find_pathway, replay, FullConfiguration, PathwayBudget, PathwayError};
use tbn_core::solver::{stable_configs, Budget, EnumerateOptions, SolveError, StableOptions};
use tbn_core::{parse_configuration, parse_tbn, ConfigError, Count, PartialConfiguration, Tbn};

use crate::args::{
    BasisArgs, BenchArgs, CheckSolutionArgs, Cli, Command, ExportLpArgs, GlobalArgs, ModelArgs,
    PathwayArgs, StableArgs, VariantChoice, VerifyArgs,
};
use crate::report::*;

/// Why a command could not produce a report.
#[derive(Debug)]
pub enum Failure {
    /// Unreadable or malformed input: exit code 2.
    Input(anyhow::Error),
    /// A result failed its own consistency checks: exit code 4.
    Internal(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Internal(_) => 4,
        }
    }

    pub fn message(&self) -> String {
        match self {
            Failure::Input(e) | Failure::Internal(e) => format!("{e:#}"),
        }
    }
}

fn input(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Input(e.into())
}

fn internal(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Internal(e.into())
}

/// A finished command: its report and the text rendering of it.
pub struct Output {
    pub report: Report,
    pub text: String,
}

impl Output {
    pub fn exit_code(&self) -> u8 {
        match self.report.status {
            RunStatus::Ok => 0,
            RunStatus::BudgetExceeded => 3,
            RunStatus::Rejected => 2,
        }
    }
}

pub fn run(cli: &Cli) -> Result<Output, Failure> {
    let g = &cli.global;
    if !(g.timeout.is_finite() && g.timeout >= 0.0) {
        return Err(input(anyhow!(
            "timeout must be a nonnegative number of seconds"
        )));
    }
    let start = Instant::now();
    let (name, inputs, status, result, text) = match &cli.command {
        Command::Stable(a) => with_name("stable", vec![a.file.clone()], stable(a, g)?),
        Command::Basis(a) => with_name("basis", vec![a.file.clone()], basis(a, g)?),
        Command::Verify(a) => with_name(
            "verify",
            vec![a.file.clone(), a.config.clone()],
            verify(a, g)?,
        ),
        Command::Pathway(a) => with_name(
            "pathway",
            vec![a.file.clone(), a.from.clone(), a.to.clone()],
            pathway(a, g)?,
        ),
        Command::Bench(a) => with_name("bench", vec![], bench(a, g)?),
        Command::ExportLp(a) => with_name("export-lp", vec![a.file.clone()], export_lp(a)?),
        Command::CheckSolution(a) => with_name(
            "check-solution",
            vec![a.file.clone(), a.solution.clone()],
            check_solution(a)?,
        ),
    };
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: name.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: None,
        budget: BudgetInfo {
            max_nodes: g.max_nodes,
            timeout_ms: (g.timeout * 1000.0) as u64,
        },
        inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
        status,
        result,
        timings: Timings {
            total_ms: start.elapsed().as_millis() as u64,
        },
    };
    Ok(Output { report, text })
}

type Done = (RunStatus, CommandResult, String);

fn with_name<P>(
    name: &'static str,
    inputs: Vec<P>,
    done: Done,
) -> (&'static str, Vec<P>, RunStatus, CommandResult, String) {
    (name, inputs, done.0, done.1, done.2)
}

fn budget(g: &GlobalArgs) -> Budget {
    Budget {
        max_nodes: g.max_nodes,
        max_time: Duration::from_secs_f64(g.timeout),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Failure::Input)
}

fn read_tbn(path: &Path) -> Result<Tbn, Failure> {
    parse_tbn(&read(path)?)
        .with_context(|| format!("{} is not a valid TBN", path.display()))
        .map_err(Failure::Input)
}

fn read_config(path: &Path, t: &Tbn) -> Result<Result<PartialConfiguration, ConfigError>, Failure> {
    match parse_configuration(&read(path)?, t) {
        Err(e @ ConfigError::Syntax { .. }) => Err(input(
            anyhow::Error::new(e).context(format!("cannot parse {}", path.display())),
        )),
        other => Ok(other),
    }
}

fn model_error(e: ModelError) -> Failure {
    match e {
        ModelError::Violated(_) | ModelError::NotSaturated | ModelError::Config(_) => internal(e),
        other => input(other),
    }
}

fn solve_error(e: SolveError) -> Failure {
    match e {
        SolveError::Model(m) => model_error(m),
        other => internal(other),
    }
}

fn render_configuration_text(out: &mut String, index: usize, c: &PartialConfiguration, t: &Tbn) {
    let r = ConfigurationReport::new(c, t);
    writeln!(
        out,
        "configuration {index}: {} polymers, merge count {}",
        r.polymer_count, r.merge_count
    )
    .unwrap();
    for p in c.polymers() {
        writeln!(out, "  {}", p.render(t)).unwrap();
    }
    for s in &r.singletons {
        if s.count == "1" {
            writeln!(out, "  {}", s.monomer).unwrap();
        } else {
            writeln!(out, "  {} (x{})", s.monomer, s.count).unwrap();
        }
    }
}

fn stable(a: &StableArgs, g: &GlobalArgs) -> Result<Done, Failure> {
    let t = read_tbn(&a.file)?;
    let options = StableOptions {
        all: a.all,
        bound: a.bound,
        budget: budget(g),
        enumerate: EnumerateOptions {
            use_lp: a.lp_pruning,
            threads: g.threads.max(1),
        },
        symmetry_when_optimizing: false,
    };
    match stable_configs(&t, &options) {
        Ok(r) => {
            let status = if r.complete {
                RunStatus::Ok
            } else {
                RunStatus::BudgetExceeded
            };
            let mut text = String::new();
            writeln!(text, "optimum merge count: {}", r.optimum).unwrap();
            let qualifier = match (a.all, r.complete) {
                (false, _) => "one witness",
                (true, true) => "complete",
                (true, false) => "incomplete: budget exhausted",
            };
            writeln!(
                text,
                "stable configurations: {} ({qualifier})",
                r.solutions.len()
            )
            .unwrap();
            for (i, c) in r.solutions.iter().enumerate() {
                render_configuration_text(&mut text, i + 1, c, &t);
            }
            let result = StableResult {
                optimum: Some(r.optimum),
                best_found: Some(r.optimum),
                complete: r.complete,
                bound: r.bound,
                configurations: r
                    .solutions
                    .iter()
                    .map(|c| ConfigurationReport::new(c, &t))
                    .collect(),
                optimize_stats: r.optimize_stats,
                enumerate_stats: r.enumerate_stats,
            };
            Ok((status, CommandResult::Stable(result), text))
        }
        Err(SolveError::BudgetExceeded { best, stats }) => {
            let best_text = best.map_or("none".to_string(), |b| b.to_string());
            let text = format!("budget exhausted before the optimum was proven; best merge count found: {best_text}\n");
            let result = StableResult {
                optimum: None,
                best_found: best,
                complete: false,
                bound: a.bound.unwrap_or_else(|| default_bound(&t)),
                configurations: vec![],
                optimize_stats: stats,
                enumerate_stats: None,
            };
            Ok((
                RunStatus::BudgetExceeded,
                CommandResult::Stable(result),
                text,
            ))
        }
        Err(e) => Err(solve_error(e)),
    }
}

fn compute_basis(t: &Tbn, cap: usize, g: &GlobalArgs) -> Result<(PolymerBasis, bool), Failure> {
    let budget = HilbertBudget {
        max_elements: cap,
        max_time: Duration::from_secs_f64(g.timeout),
        ..Default::default()
    };
    match polymer_basis(t, &budget) {
        Ok(b) => Ok((b, false)),
        Err(HilbertError::BudgetExceeded { partial, .. }) => Ok((
            PolymerBasis {
                elements: partial,
                matrix: tbn_core::hilbert::tbn_matrix(t),
            },
            true,
        )),
        Err(e) => Err(internal(e)),
    }
}

fn basis(a: &BasisArgs, g: &GlobalArgs) -> Result<Done, Failure> {
    let t = read_tbn(&a.file)?;
    let (b, partial) = compute_basis(&t, a.cap, g)?;
    let doc = basis_document(&b, &t);
    if let Some(path) = &a.out {
        let json = serde_json::to_string_pretty(&doc).map_err(internal)?;
        fs::write(path, json + "\n")
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(Failure::Input)?;
    }
    let check = match &a.check {
        Some(path) => {
            let doc: BasisDocument = serde_json::from_str(&read(path)?)
                .with_context(|| format!("{} is not a basis document", path.display()))
                .map_err(Failure::Input)?;
            let other = basis_from_document(&doc, &t).map_err(input)?;
            let mine: BTreeSet<_> = b.elements.iter().collect();
            let theirs: BTreeSet<_> = other.elements.iter().collect();
            Some(BasisCheck {
                problems: check_basis(&other, &t),
                missing: mine.difference(&theirs).count(),
                extra: theirs.difference(&mine).count(),
            })
        }
        None => None,
    };
    let mut text = String::new();
    writeln!(
        text,
        "{} elements{}",
        b.len(),
        if partial {
            " (partial: budget exhausted)"
        } else {
            ""
        }
    )
    .unwrap();
    text.push_str(&tbn_core::hilbert::render_basis_table(&b, &t));
    if let Some(c) = &check {
        writeln!(
            text,
            "checked basis: {} problems, {} missing, {} extra",
            c.problems.len(),
            c.missing,
            c.extra
        )
        .unwrap();
        for p in &c.problems {
            writeln!(text, "  {p}").unwrap();
        }
    }
    let rejected = check
        .as_ref()
        .is_some_and(|c| !c.problems.is_empty() || c.missing > 0 || c.extra > 0);
    let status = match (partial, rejected) {
        (true, _) => RunStatus::BudgetExceeded,
        (false, true) => RunStatus::Rejected,
        (false, false) => RunStatus::Ok,
    };
    let result = BasisResult {
        count: b.len(),
        partial,
        elements: b
            .elements
            .iter()
            .map(|p| PolymerReport::new(p, &t))
            .collect(),
        document: Some(doc),
        check,
    };
    Ok((status, CommandResult::Basis(result), text))
}

fn verify(a: &VerifyArgs, g: &GlobalArgs) -> Result<Done, Failure> {
    let t = read_tbn(&a.file)?;
    let pc = match read_config(&a.config, &t)?.and_then(|pc| pc.validate(&t).map(|_| pc)) {
        Ok(pc) => pc,
        Err(e) => {
            let result = VerifyResult {
                valid: false,
                reason: Some(e.to_string()),
                merge_count: None,
                saturated: None,
                locally_stable: None,
                stable: None,
                optimum: None,
            };
            let text = format!("valid: false ({e})\n");
            return Ok((RunStatus::Ok, CommandResult::Verify(result), text));
        }
    };
    let saturated = pc.is_saturated(&t);
    let mut status = RunStatus::Ok;
    let locally_stable = if saturated {
        let (b, partial) = compute_basis(&t, HilbertBudget::default().max_elements, g)?;
        if partial {
            status = RunStatus::BudgetExceeded;
            None
        } else {
            Some(pc.polymers().iter().all(|p| b.contains(p)))
        }
    } else {
        None
    };
    let options = StableOptions {
        all: false,
        budget: budget(g),
        ..Default::default()
    };
    let optimum = match stable_configs(&t, &options) {
        Ok(r) => Some(r.optimum),
        Err(SolveError::BudgetExceeded { .. }) => {
            status = RunStatus::BudgetExceeded;
            None
        }
        Err(e) => return Err(solve_error(e)),
    };
    let stable = optimum.map(|o| saturated && pc.merge_count() == o);
    let show = |v: Option<bool>| v.map_or("unknown".to_string(), |b| b.to_string());
    let mut text = String::new();
    writeln!(text, "valid: true").unwrap();
    writeln!(text, "saturated: {saturated}").unwrap();
    writeln!(
        text,
        "locally stable: {}",
        if saturated {
            show(locally_stable)
        } else {
            "n/a".into()
        }
    )
    .unwrap();
    writeln!(text, "stable: {}", show(stable)).unwrap();
    writeln!(
        text,
        "merge count: {} (optimum {})",
        pc.merge_count(),
        optimum.map_or("unknown".to_string(), |o| o.to_string())
    )
    .unwrap();
    let result = VerifyResult {
        valid: true,
        reason: None,
        merge_count: Some(pc.merge_count()),
        saturated: Some(saturated),
        locally_stable,
        stable,
        optimum,
    };
    Ok((status, CommandResult::Verify(result), text))
}

fn pathway(a: &PathwayArgs, g: &GlobalArgs) -> Result<Done, Failure> {
    let t = read_tbn(&a.file)?;
    let full = |path: &Path| -> Result<FullConfiguration, Failure> {
        let pc = read_config(path, &t)?
            .with_context(|| format!("{} does not fit the TBN", path.display()))
            .map_err(Failure::Input)?;
        FullConfiguration::from_partial(&pc, &t)
            .with_context(|| format!("{} cannot start or end a pathway", path.display()))
            .map_err(Failure::Input)
    };
    let (from, to) = (full(&a.from)?, full(&a.to)?);
    let budget = PathwayBudget {
        max_states: a.max_states,
        max_time: Duration::from_secs_f64(g.timeout),
    };
    let mut result = PathwayResult {
        found: false,
        max_barrier: a.max_barrier,
        barrier: None,
        energies: vec![],
        steps: vec![],
        moves: vec![],
    };
    match find_pathway(&t, &from, &to, a.max_barrier, &budget) {
        Ok(Some(path)) => {
            let states = replay(&t, &path.steps, &from).map_err(internal)?;
            if states.last() != Some(&to) {
                return Err(internal(anyhow!("pathway does not end at the target")));
            }
            result.found = true;
            result.barrier = Some(path.barrier);
            result.energies = states.iter().map(FullConfiguration::energy).collect();
            result.steps = path.steps.iter().map(|m| m.render(&t)).collect();
            result.moves = path.steps;
            let mut text = format!(
                "pathway found: {} steps, barrier {}\n",
                result.steps.len(),
                path.barrier
            );
            for (step, energy) in result.steps.iter().zip(&result.energies[1..]) {
                writeln!(text, "  {step}  [merge count {energy}]").unwrap();
            }
            Ok((RunStatus::Ok, CommandResult::Pathway(result), text))
        }
        Ok(None) => {
            let text = format!("no pathway with barrier at most {}\n", a.max_barrier);
            Ok((RunStatus::Ok, CommandResult::Pathway(result), text))
        }
        Err(PathwayError::BudgetExceeded { states }) => {
            let text = format!("budget exhausted after {states} configurations\n");
            Ok((
                RunStatus::BudgetExceeded,
                CommandResult::Pathway(result),
                text,
            ))
        }
        Err(e) => Err(input(e)),
    }
}

/// `3`, `1..4` (inclusive) or `1,2,5`.
pub fn parse_sizes(text: &str) -> anyhow::Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        match part.split_once("..") {
            Some((lo, hi)) => {
                let (lo, hi): (usize, usize) = (lo.trim().parse()?, hi.trim().parse()?);
                if lo > hi {
                    return Err(anyhow!("empty range {part}"));
                }
                out.extend(lo..=hi);
            }
            None => out.push(part.parse().with_context(|| format!("bad size `{part}`"))?),
        }
    }
    Ok(out)
}

/// Like [`parse_sizes`], with `inf` for an infinite count.
pub fn parse_fuels(text: &str) -> anyhow::Result<Vec<Count>> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if matches!(part, "inf" | "∞") {
            out.push(Count::Infinite);
        } else {
            out.extend(
                parse_sizes(part)?
                    .into_iter()
                    .map(|n| Count::Finite(n as u64)),
            );
        }
    }
    if out.contains(&Count::Finite(0)) {
        return Err(anyhow!("fuel counts must be positive"));
    }
    Ok(out)
}

fn bench(a: &BenchArgs, g: &GlobalArgs) -> Result<Done, Failure> {
    let sizes = parse_sizes(&a.n_range)
        .context("bad --n-range")
        .map_err(Failure::Input)?;
    let fuels = parse_fuels(&a.fuel_range)
        .context("bad --fuel-range")
        .map_err(Failure::Input)?;
    let variants: &[(ColumnVariant, &str)] = match a.variant {
        VariantChoice::Literal => &[(ColumnVariant::Literal, "gridgate")],
        VariantChoice::Plain => &[(ColumnVariant::Plain, "gridgate_plain")],
        VariantChoice::Both => &[
            (ColumnVariant::Literal, "gridgate"),
            (ColumnVariant::Plain, "gridgate_plain"),
        ],
    };
    let mut rows = Vec::new();
    for &(variant, family) in variants {
        for &n in &sizes {
            for &fuel in &fuels {
                let t = gridgate(n, fuel, variant).map_err(input)?;
                let options = StableOptions {
                    budget: budget(g),
                    enumerate: EnumerateOptions {
                        use_lp: false,
                        threads: g.threads.max(1),
                    },
                    ..Default::default()
                };
                let clock = Instant::now();
                let outcome = stable_configs(&t, &options);
                let millis = clock.elapsed().as_millis() as u64;
                let (status, optimum, nodes) = match outcome {
                    Ok(r) => {
                        let nodes =
                            r.optimize_stats.nodes + r.enumerate_stats.map_or(0, |s| s.nodes);
                        let status = if r.complete { "optimal" } else { "timeout" };
                        (status, Some(r.optimum), nodes)
                    }
                    Err(SolveError::BudgetExceeded { stats, .. }) => ("timeout", None, stats.nodes),
                    Err(_) => ("error", None, 0),
                };
                rows.push(BenchRow {
                    family: family.to_string(),
                    n,
                    fuel: match fuel {
                        Count::Finite(f) => f.to_string(),
                        Count::Infinite => "inf".to_string(),
                    },
                    status: status.to_string(),
                    optimum,
                    nodes,
                    millis,
                });
            }
        }
    }
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for r in &rows {
        csv.push_str(&r.csv());
        csv.push('\n');
    }
    if let Some(path) = &a.csv {
        fs::write(path, &csv)
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(Failure::Input)?;
    }
    Ok((
        RunStatus::Ok,
        CommandResult::Bench(BenchResult { rows }),
        csv,
    ))
}

fn model_for(t: &Tbn, m: &ModelArgs) -> Result<StableConfigsModel, Failure> {
    let options = BuildOptions {
        symmetry_breaking: m.symmetry,
        fixed_objective: m.fixed_objective,
        ..Default::default()
    };
    build(t, m.bound.unwrap_or_else(|| default_bound(t)), &options).map_err(model_error)
}

fn export_lp(a: &ExportLpArgs) -> Result<Done, Failure> {
    let t = read_tbn(&a.file)?;
    let model = model_for(&t, &a.model)?;
    let lp = write_lp(model.program());
    let text = match &a.output {
        Some(path) => {
            fs::write(path, &lp)
                .with_context(|| format!("cannot write {}", path.display()))
                .map_err(Failure::Input)?;
            format!(
                "wrote {} ({} variables, {} constraints)\n",
                path.display(),
                model.program().num_vars(),
                model.program().constraints.len()
            )
        }
        None => lp.clone(),
    };
    let result = ExportResult {
        output: a.output.as_ref().map(|p| p.display().to_string()),
        lp: a.output.is_none().then_some(lp),
        bound: model.bound() as u64,
        variables: model.program().num_vars(),
        constraints: model.program().constraints.len(),
    };
    Ok((RunStatus::Ok, CommandResult::ExportLp(result), text))
}

fn check_solution(a: &CheckSolutionArgs) -> Result<Done, Failure> {
    let t = read_tbn(&a.file)?;
    let model = model_for(&t, &a.model)?;
    if let Some(path) = &a.lp {
        let program = read_lp(&read(path)?)
            .with_context(|| format!("cannot parse {}", path.display()))
            .map_err(Failure::Input)?;
        if &program != model.program() {
            return Err(input(anyhow!(
                "{} does not describe the model built from {} with these flags",
                path.display(),
                a.file.display()
            )));
        }
    }
    let x = read_solution(&read(&a.solution)?, model.program())
        .with_context(|| format!("cannot parse {}", a.solution.display()))
        .map_err(Failure::Input)?;
    let objective = model.program().objective.value(&x);
    let merge_count = model.merge_objective(&x);
    let (status, violation, configuration, text) = match model.decode(&x) {
        Ok(pc) => {
            let mut text = format!("feasible: true\nobjective: {objective}\n");
            render_configuration_text(&mut text, 1, &pc, &t);
            (
                RunStatus::Ok,
                None,
                Some(ConfigurationReport::new(&pc, &t)),
                text,
            )
        }
        Err(ModelError::Violated(v)) => {
            let text = format!("feasible: false ({v})\nobjective: {objective}\n");
            (RunStatus::Rejected, Some(v.to_string()), None, text)
        }
        Err(e) => return Err(internal(e)),
    };
    let result = CheckResult {
        feasible: violation.is_none(),
        violation,
        objective,
        merge_count,
        configuration,
    };
    Ok((status, CommandResult::CheckSolution(result), text))
}
