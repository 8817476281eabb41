use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use serde_json::Value;
use wexfab::adapt::{
    analyze_extraction_directive, evaluate, parse_policy, plan_actions, AdaptError, PolicyDocument, PropertyStore,
    ReconfigurationPlan,
};
use wexfab::dataflow::{
    apply_reconfiguration, compile, reconfig_diagnostics, CompileOptions, Engine, ExecutablePlan, Record,
    ServiceRegistry,
};
use wexfab::evalkit::{extract_all, format_report, format_report_jsonl, score, EvaluationRow};
use wexfab::ierel::{learn_wrapper, normalize_value, ExampleInstance, LearnConfig, Wrapper};
use wexfab::operators::{FetchMode, FixtureStore, LiveConfig};
use wexfab::wetdl::{parse_task, serialize_task, validate_network, Diagnostic, TaskNetwork};

use crate::{Cli, Command, FetchArgs, PolicyCommand, UsageError};

pub fn dispatch(cli: Cli) -> Result<ExitCode> {
    let verbose = cli.verbose;
    match cli.command {
        Command::Validate { task } => validate(&task),
        Command::Run { task, fetch, report } => run(&task, &fetch, report.as_deref(), verbose),
        Command::Learn { corpus, examples, out } => learn(&corpus, &examples, &out, verbose),
        Command::Extract { wrapper, docs, out } => extract(&wrapper, &docs, out.as_deref()),
        Command::Eval { wrapper, docs, truth, source, example_count, jsonl } => {
            eval(&wrapper, &docs, &truth, source, example_count, jsonl)
        }
        Command::Policy(PolicyCommand::Eval { policy, props, json }) => policy_eval(&policy, &props, json),
        Command::Policy(PolicyCommand::Apply { policy, task, registry, props, fetch, dry_run }) => {
            policy_apply(&policy, &task, &registry, props.as_deref(), &fetch, dry_run)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn print_diagnostics(diags: &[Diagnostic]) {
    for d in diags {
        println!("{d}");
    }
}

fn fetch_mode(args: &FetchArgs) -> Result<FetchMode> {
    match &args.offline {
        Some(dir) if !dir.is_dir() => {
            Err(UsageError(format!("fixture directory {} does not exist", dir.display())).into())
        }
        Some(dir) => Ok(FetchMode::offline(FixtureStore::open(dir)?)),
        None => Ok(FetchMode::Live(LiveConfig::default())),
    }
}

/// Parse and validate a task; `Err` carries the diagnostics to print.
fn load_task(path: &Path) -> Result<std::result::Result<TaskNetwork, Vec<Diagnostic>>> {
    let text = read(path)?;
    let net = match parse_task(&text) {
        Ok(net) => net,
        Err(e) => return Ok(Err(e.diagnostics())),
    };
    let diags = validate_network(&net);
    if diags.iter().any(Diagnostic::is_error) {
        return Ok(Err(diags));
    }
    for d in &diags {
        eprintln!("{d}");
    }
    Ok(Ok(net))
}

fn compile_options(task: &Path) -> CompileOptions {
    CompileOptions { base_dir: task.parent().map(Path::to_path_buf) }
}

fn validate(task: &Path) -> Result<ExitCode> {
    match load_task(task)? {
        Ok(net) => {
            println!("ok: {} operators, {} edges", net.operators.len(), net.edge_count());
            Ok(ExitCode::SUCCESS)
        }
        Err(diags) => {
            print_diagnostics(&diags);
            Ok(ExitCode::FAILURE)
        }
    }
}

fn run(task: &Path, fetch: &FetchArgs, report_path: Option<&Path>, verbose: bool) -> Result<ExitCode> {
    let mode = fetch_mode(fetch)?;
    let net = match load_task(task)? {
        Ok(net) => net,
        Err(diags) => {
            print_diagnostics(&diags);
            return Ok(ExitCode::FAILURE);
        }
    };
    let registry = ServiceRegistry::builtin();
    let plan = match compile(&net, &registry, &compile_options(task)) {
        Ok(plan) => plan,
        Err(e) => {
            print_diagnostics(&e.0);
            return Ok(ExitCode::FAILURE);
        }
    };
    let mut engine = Engine::new(plan, registry, mode);
    if verbose {
        engine.enable_trace();
    }
    let report = engine.run(Vec::new());
    for line in engine.trace() {
        eprintln!("{line}");
    }
    for path in engine.write_sink_files().context("cannot write sink output")? {
        eprintln!("wrote {}", path.display());
    }
    let json = report.to_json(false);
    match report_path {
        Some(p) => write(p, &json)?,
        None => print!("{json}"),
    }
    Ok(ExitCode::SUCCESS)
}

/// Regular files of `dir`, sorted by name.
fn documents(dir: &Path) -> Result<Vec<(PathBuf, String)>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("cannot list {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    paths.retain(|p| p.is_file());
    paths.sort();
    paths.into_iter().map(|p| read(&p).map(|text| (p, text))).collect()
}

/// One JSON object of string values per non-blank line, keys in file order.
fn json_lines(path: &Path) -> Result<Vec<Record>> {
    let mut out = Vec::new();
    for (i, line) in read(path)?.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let v: Value = serde_json::from_str(line).with_context(|| format!("{}:{}", path.display(), i + 1))?;
        let Value::Object(obj) = v else { bail!("{}:{}: expected a JSON object", path.display(), i + 1) };
        let mut r = Record::new();
        for (k, v) in obj {
            let Value::String(s) = v else { bail!("{}:{}: value of '{k}' is not a string", path.display(), i + 1) };
            r.insert(k, s);
        }
        out.push(r);
    }
    Ok(out)
}

fn learn(corpus: &Path, examples: &Path, out: &Path, verbose: bool) -> Result<ExitCode> {
    let docs: Vec<String> = documents(corpus)?.into_iter().map(|(_, t)| t).collect();
    let examples: Vec<ExampleInstance> =
        json_lines(examples)?.into_iter().map(|r| ExampleInstance { fields: r.into_iter().collect() }).collect();
    let (wrapper, report) = learn_wrapper(&docs, &examples, &LearnConfig::default())?;
    if verbose {
        for e in &report.examples {
            eprintln!("example {}: {} occurrences", e.index + 1, e.occurrences);
        }
    }
    for i in &report.skipped {
        eprintln!("warning: example {} not found in the corpus", i + 1);
    }
    eprintln!(
        "{} patterns from {} of {} examples",
        report.final_patterns,
        examples.len() - report.skipped.len(),
        examples.len()
    );
    write(out, &wrapper.to_json())?;
    Ok(ExitCode::SUCCESS)
}

fn load_wrapper(path: &Path) -> Result<Wrapper> {
    Ok(Wrapper::from_json(&read(path)?)?)
}

fn extract(wrapper: &Path, docs: &Path, out: Option<&Path>) -> Result<ExitCode> {
    let w = load_wrapper(wrapper)?;
    let texts: Vec<String> = documents(docs)?.into_iter().map(|(_, t)| t).collect();
    let mut lines = String::new();
    for r in extract_all(&w, &texts)? {
        lines.push_str(&serde_json::to_string(&r)?);
        lines.push('\n');
    }
    match out {
        Some(p) => write(p, &lines)?,
        None => print!("{lines}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn eval(
    wrapper: &Path,
    docs: &Path,
    truth: &Path,
    source: Option<String>,
    example_count: usize,
    jsonl: bool,
) -> Result<ExitCode> {
    let w = load_wrapper(wrapper)?;
    let texts: Vec<String> = documents(docs)?.into_iter().map(|(_, t)| t).collect();
    // Extracted values come out word-normalized; compare like with like.
    let mut truth = json_lines(truth)?;
    for r in &mut truth {
        r.values_mut().for_each(|v| *v = normalize_value(v));
    }
    if truth.is_empty() {
        bail!("the truth file holds no records");
    }
    let extracted = extract_all(&w, &texts)?;
    let source = source.unwrap_or_else(|| {
        docs.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "source".into())
    });
    let row = EvaluationRow::new(&source, example_count, &score(&extracted, &truth, truth.len()));
    let rows = [row];
    print!("{}", if jsonl { format_report_jsonl(&rows) } else { format_report(&rows) });
    Ok(ExitCode::SUCCESS)
}

fn load_props(path: &Path) -> Result<PropertyStore> {
    read(path)?.parse::<PropertyStore>().with_context(|| path.display().to_string())
}

fn print_plan(plan: &ReconfigurationPlan, json: bool) -> Result<()> {
    if json {
        println!("{}", serde_json::to_string_pretty(plan)?);
    } else {
        for a in &plan.actions {
            println!("{a}");
        }
    }
    Ok(())
}

fn adapt_failure(e: &AdaptError) -> ExitCode {
    match e {
        AdaptError::InvalidWetdl(diags) => print_diagnostics(diags),
        AdaptError::Rejected(failures) => {
            for (a, err) in failures {
                println!("error[{}] {a}: {err}", err.code());
            }
        }
        other => println!("error[{}] {other}", other.code()),
    }
    ExitCode::FAILURE
}

fn policy_eval(policy: &Path, props: &Path, json: bool) -> Result<ExitCode> {
    let doc = match parse_policy(&read(policy)?) {
        Ok(doc) => doc,
        Err(e) => return Ok(adapt_failure(&e)),
    };
    let PolicyDocument::System(policy) = doc else {
        bail!("{} is an extraction directive; use `policy apply`", policy.display());
    };
    let eval = evaluate(&policy, &load_props(props)?);
    print_plan(&eval.actions(), json)?;
    for u in &eval.unevaluable {
        eprintln!("error: rule {}: {}", u.rule + 1, u.reason);
    }
    Ok(if eval.unevaluable.is_empty() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn policy_apply(
    policy_path: &Path,
    task_path: &Path,
    registry_path: &Path,
    props: Option<&Path>,
    fetch: &FetchArgs,
    dry_run: bool,
) -> Result<ExitCode> {
    let doc = match parse_policy(&read(policy_path)?) {
        Ok(doc) => doc,
        Err(e) => return Ok(adapt_failure(&e)),
    };
    let registry = ServiceRegistry::from_json(&read(registry_path)?)
        .with_context(|| format!("invalid registry snapshot {}", registry_path.display()))?;

    let (plan, next_registry, next_task) = match doc {
        PolicyDocument::System(policy) => {
            let props = props.ok_or_else(|| UsageError("a system policy needs --props".into()))?;
            let props = load_props(props)?;
            let net = match load_task(task_path)? {
                Ok(net) => net,
                Err(diags) => {
                    print_diagnostics(&diags);
                    return Ok(ExitCode::FAILURE);
                }
            };
            let current = match compile(&net, &registry, &compile_options(task_path)) {
                Ok(p) => p,
                Err(e) => {
                    print_diagnostics(&e.0);
                    return Ok(ExitCode::FAILURE);
                }
            };
            let eval = evaluate(&policy, &props);
            for u in &eval.unevaluable {
                eprintln!("warning: rule {}: {}", u.rule + 1, u.reason);
            }
            let rplan = match plan_actions(&eval, &registry) {
                Ok(p) => p,
                Err(e) => return Ok(adapt_failure(&e)),
            };
            let (next_plan, next_registry) = match apply_reconfiguration(&current, &registry, &rplan) {
                Ok(r) => r,
                Err(e) => {
                    print_diagnostics(&reconfig_diagnostics(&e));
                    return Ok(ExitCode::FAILURE);
                }
            };
            report_removed(&current, &next_plan);
            (rplan, next_registry, next_plan.network)
        }
        PolicyDocument::Extraction(directive) => {
            let mode = fetch_mode(fetch)?;
            let analysis = match analyze_extraction_directive(&directive, &mode, &registry) {
                Ok(a) => a,
                Err(e) => return Ok(adapt_failure(&e)),
            };
            let next_registry = match registry.apply_all(&analysis.plan.actions) {
                Ok(r) => r,
                Err(failures) => return Ok(adapt_failure(&AdaptError::Rejected(failures))),
            };
            if let Err(e) = compile(&analysis.task, &next_registry, &compile_options(task_path)) {
                print_diagnostics(&e.0);
                return Ok(ExitCode::FAILURE);
            }
            (analysis.plan, next_registry, analysis.task)
        }
    };

    print_plan(&plan, false)?;
    if plan.is_empty() {
        eprintln!("no changes");
    }
    if !dry_run {
        let task_text = serialize_task(&next_task)?;
        write(registry_path, &next_registry.to_json())?;
        write(task_path, &task_text)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn report_removed(before: &ExecutablePlan, after: &ExecutablePlan) {
    for n in &before.nodes {
        if after.node(n.name()).is_none() {
            eprintln!("operator {} removed", n.name());
        }
    }
}
