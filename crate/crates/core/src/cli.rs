//! The `exactkit` command line: argument parsing, the four commands and their
//! JSON/TSV reports.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::module_cat::{canonical_sum, CategoryConfig};
use crate::rng::PRNG_NAME;
use crate::subfunctor::{
    build_skeleton, enumerate_subfunctors, has_enough_injectives, has_enough_projectives, hom_exact_injectives,
    hom_exact_projectives, is_closed, main_theorem_report, relative_injectives, relative_projectives,
    subfunctor_from_subcategory, ClosureBudget, Side, SubfunctorData, TheoremBudget, Tri, Variant, BOUNDED_NOTE,
};
use crate::suite::{run_core_suite, Fault, SuiteConfig};

pub const SCHEMA: &str = "exactkit-report/1";

/// Largest cover or envelope tried by the enough-projectives/injectives checks.
const ENOUGH_DIM_CAP: usize = 64;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "exactkit", version, about = "Ext-subfunctor experiments over k[x]/(x^N)-modules")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Eq)]
pub enum Command {
    /// dim Ext(M_i, M_j) for all indecomposables.
    ExtTable(CommonArgs),
    /// Randomized suite for pushout/pullback laws, Baer sums and long exact sequences.
    VerifyCore(CommonArgs),
    /// Every additive subfunctor over the indecomposables, with its verdicts.
    Enumerate(CommonArgs),
    /// The subfunctor cut out by a set of indecomposables.
    Subcategory(SubcategoryArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Tsv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariantArg {
    Cov,
    Contra,
}

#[derive(clap::Args, Debug, Clone, PartialEq, Eq)]
pub struct CommonArgs {
    #[arg(long, default_value_t = 2)]
    pub p: u32,
    #[arg(long, default_value_t = 2)]
    pub nilpotency: usize,
    /// Dimension bound for test objects; defaults to max(3, N).
    #[arg(long)]
    pub max_dim: Option<usize>,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; reports do not depend on it.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Runs verify-core against a deliberately broken pushout.
    #[cfg(feature = "fault-injection")]
    #[arg(long)]
    pub inject_fault: bool,
}

#[derive(clap::Args, Debug, Clone, PartialEq, Eq)]
pub struct SubcategoryArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Indices of the generating indecomposables, e.g. `1,3`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub generators: Vec<usize>,
    #[arg(long, value_enum, default_value_t = VariantArg::Cov)]
    pub variant: VariantArg,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub p: u32,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "D")]
    pub d: usize,
    pub trials: usize,
    pub seed: u64,
    pub format: Format,
    pub out: Option<String>,
}

/// What a command produced: the exit code and the text for stdout/stderr.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(msg: impl Into<String>) -> Outcome {
        Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: msg.into(),
        }
    }
}

struct Report {
    command: &'static str,
    status_ok: bool,
    result: Value,
    tsv: String,
    code: i32,
}

fn run_config(args: &CommonArgs) -> Result<(RunConfig, CategoryConfig), String> {
    let cfg = CategoryConfig::new(args.p, args.nilpotency).map_err(|e| e.to_string())?;
    let d = args.max_dim.unwrap_or(args.nilpotency.max(3));
    if d < args.nilpotency {
        return Err(format!("--max-dim {d} is below --nilpotency {}", args.nilpotency));
    }
    Ok((
        RunConfig {
            p: args.p,
            n: args.nilpotency,
            d,
            trials: args.trials,
            seed: args.seed,
            format: args.format,
            out: args.out.as_ref().map(|p| p.display().to_string()),
        },
        cfg,
    ))
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            return if code == EXIT_PASS {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome::usage(text)
            };
        }
    };
    let common = match &cli.command {
        Command::ExtTable(a) | Command::VerifyCore(a) | Command::Enumerate(a) => a.clone(),
        Command::Subcategory(s) => s.common.clone(),
    };
    let (config, cfg) = match run_config(&common) {
        Ok(c) => c,
        Err(msg) => return Outcome::usage(format!("error: {msg}\n")),
    };
    let work = || execute(&cli.command, &config, cfg);
    let outcome = match common.jobs {
        Some(0) => return Outcome::usage("error: --jobs must be positive\n"),
        Some(jobs) => match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            Ok(pool) => pool.install(work),
            Err(e) => return Outcome::usage(format!("error: thread pool: {e}\n")),
        },
        None => work(),
    };
    let report = match outcome {
        Ok(r) => r,
        Err(Error::Guard { count, limit }) => {
            return Outcome {
                code: EXIT_BUDGET,
                stdout: String::new(),
                stderr: format!("refused: {count} candidate subfunctors exceed the guard of {limit}\n"),
            }
        }
        Err(e @ Error::Input(_)) | Err(e @ Error::Config(_)) => return Outcome::usage(format!("error: {e}\n")),
        Err(e) => {
            return Outcome {
                code: EXIT_VIOLATION,
                stdout: String::new(),
                stderr: format!("internal error: {e}\n"),
            }
        }
    };
    let text = match config.format {
        Format::Json => {
            let doc = json!({
                "schema": SCHEMA,
                "command": report.command,
                "config": config,
                "prng": PRNG_NAME,
                "status": if report.status_ok { "pass" } else { "fail" },
                "result": report.result,
            });
            let mut s = serde_json::to_string(&doc).expect("JSON values serialize");
            s.push('\n');
            s
        }
        Format::Tsv => report.tsv,
    };
    let stderr = if report.status_ok {
        String::new()
    } else {
        format!("{} reported a violation\n", report.command)
    };
    match &common.out {
        Some(path) => match std::fs::write(path, &text) {
            Ok(()) => Outcome {
                code: report.code,
                stdout: String::new(),
                stderr,
            },
            Err(e) => Outcome::usage(format!("error: cannot write {}: {e}\n", path.display())),
        },
        None => Outcome {
            code: report.code,
            stdout: text,
            stderr,
        },
    }
}

fn execute(command: &Command, config: &RunConfig, cfg: CategoryConfig) -> crate::Result<Report> {
    match command {
        Command::ExtTable(_) => ext_table(cfg),
        Command::VerifyCore(args) => {
            #[cfg(feature = "fault-injection")]
            let fault = args.inject_fault.then_some(Fault::SplitPushouts);
            #[cfg(not(feature = "fault-injection"))]
            let fault: Option<Fault> = {
                let _ = args;
                None
            };
            verify_core(config, cfg, fault)
        }
        Command::Enumerate(_) => enumerate(config, cfg),
        Command::Subcategory(args) => subcategory(config, cfg, &args.generators, args.variant),
    }
}

fn tsv_bool(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

fn tri(t: Tri) -> &'static str {
    match t {
        Tri::Yes => "yes",
        Tri::No => "no",
        Tri::Indeterminate => "indeterminate",
    }
}

fn list(xs: &[usize]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn ext_table(cfg: CategoryConfig) -> crate::Result<Report> {
    let n = cfg.nilpotency();
    let sk = build_skeleton(cfg, n)?;
    let dims: Vec<Vec<usize>> = (1..=n).map(|i| (1..=n).map(|j| sk.ext_dim(i, j)).collect()).collect();
    let mut tsv = String::from("i\tj\tdim_ext\n");
    for i in 1..=n {
        for j in 1..=n {
            writeln!(tsv, "{i}\t{j}\t{}", dims[i - 1][j - 1]).unwrap();
        }
    }
    Ok(Report {
        command: "ext-table",
        status_ok: true,
        result: json!({ "dims": dims }),
        tsv,
        code: EXIT_PASS,
    })
}

fn verify_core(config: &RunConfig, cfg: CategoryConfig, fault: Option<Fault>) -> crate::Result<Report> {
    let suite = SuiteConfig {
        cfg,
        max_dim: config.d,
        trials: config.trials,
        seed: config.seed,
    };
    let report = run_core_suite(&suite, fault)?;
    let ok = report.pass();
    let mut tsv = String::from("law\tpass\tchecked\n");
    for (name, law) in &report.laws {
        writeln!(tsv, "{name}\t{}\t{}", tsv_bool(law.pass), law.checked).unwrap();
    }
    let mut result = json!(report);
    if let Some(f) = fault {
        result["fault"] = json!(f);
    }
    Ok(Report {
        command: "verify-core",
        status_ok: ok,
        result,
        tsv,
        code: if ok { EXIT_PASS } else { EXIT_VIOLATION },
    })
}

fn theorem_budget(config: &RunConfig) -> TheoremBudget {
    let mut budget = TheoremBudget::scaled(config.n, config.seed);
    budget.closure.end_dim = budget.closure.end_dim.max(config.d);
    budget.grids.random_dim = config.d;
    budget
}

#[derive(Serialize)]
struct EnumerationRow {
    index: usize,
    label: String,
    subspaces: Value,
    valid: bool,
    closed_left: bool,
    closed_right: bool,
    hf_axioms: bool,
    #[serde(rename = "3x3_budgeted")]
    three_by_three: bool,
    agree: bool,
    grids_examined: usize,
    grids_premises_held: usize,
    enough_proj: Tri,
    enough_inj: Tri,
    proj_list: Vec<usize>,
    inj_list: Vec<usize>,
    proj_hom_exact: Vec<usize>,
    inj_hom_exact: Vec<usize>,
    defect: Option<Value>,
}

fn enumeration_row(index: usize, f: &SubfunctorData, budget: &TheoremBudget, seed: u64) -> crate::Result<EnumerationRow> {
    let r = main_theorem_report(f, budget)?;
    let proj = has_enough_projectives(f, ENOUGH_DIM_CAP, seed)?;
    let inj = has_enough_injectives(f, ENOUGH_DIM_CAP, seed)?;
    let proj_list = relative_projectives(f);
    let inj_list = relative_injectives(f);
    let proj_hom_exact = hom_exact_projectives(f, 16, seed)?;
    let inj_hom_exact = hom_exact_injectives(f, 16, seed)?;
    let enough = proj.verdict == Tri::Yes || inj.verdict == Tri::Yes;
    let consistent = r.agree
        && r.closed_left == r.closed_right
        && (!enough || r.closed)
        && proj_list == proj_hom_exact
        && inj_list == inj_hom_exact;
    let defect = (!consistent).then(|| {
        json!({
            "closure_witness": r.closure_witness,
            "fclass_witness": r.fclass_witness,
            "grid_witness": r.grids.witness,
            "enough_without_closed": enough && !r.closed,
            "proj_hom_exact_mismatch": proj_list != proj_hom_exact,
            "inj_hom_exact_mismatch": inj_list != inj_hom_exact,
        })
    });
    Ok(EnumerationRow {
        index,
        label: f.label(),
        subspaces: f.to_json(),
        valid: f.is_valid(),
        closed_left: r.closed_left,
        closed_right: r.closed_right,
        hf_axioms: r.hf,
        three_by_three: r.three_by_three,
        agree: r.agree,
        grids_examined: r.grids.examined,
        grids_premises_held: r.grids.premises_held,
        enough_proj: proj.verdict,
        enough_inj: inj.verdict,
        proj_list,
        inj_list,
        proj_hom_exact,
        inj_hom_exact,
        defect,
    })
}

fn enumerate(config: &RunConfig, cfg: CategoryConfig) -> crate::Result<Report> {
    let sk = build_skeleton(cfg, config.d)?;
    let enumeration = enumerate_subfunctors(&sk)?;
    let budget = theorem_budget(config);
    let rows: Vec<EnumerationRow> = enumeration
        .valid
        .par_iter()
        .enumerate()
        .map(|(k, f)| enumeration_row(k, f, &budget, config.seed))
        .collect::<crate::Result<Vec<_>>>()?;
    let ok = rows.iter().all(|r| r.defect.is_none());
    let mut tsv = String::from(
        "index\tlabel\tvalid\tclosed_left\tclosed_right\thf_axioms\t3x3_budgeted\tagree\tenough_proj\tenough_inj\tproj_list\tinj_list\n",
    );
    for r in &rows {
        writeln!(
            tsv,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.index,
            r.label,
            tsv_bool(r.valid),
            tsv_bool(r.closed_left),
            tsv_bool(r.closed_right),
            tsv_bool(r.hf_axioms),
            tsv_bool(r.three_by_three),
            tsv_bool(r.agree),
            tri(r.enough_proj),
            tri(r.enough_inj),
            list(&r.proj_list),
            list(&r.inj_list)
        )
        .unwrap();
    }
    Ok(Report {
        command: "enumerate",
        status_ok: ok,
        result: json!({
            "candidates": enumeration.candidates.to_string(),
            "valid_count": rows.len(),
            "budget": budget,
            "note": BOUNDED_NOTE,
            "rows": rows,
        }),
        tsv,
        code: if ok { EXIT_PASS } else { EXIT_VIOLATION },
    })
}

fn subcategory(config: &RunConfig, cfg: CategoryConfig, generators: &[usize], variant: VariantArg) -> crate::Result<Report> {
    let n = cfg.nilpotency();
    if let Some(bad) = generators.iter().find(|&&g| g == 0 || g > n) {
        return Err(Error::Input(format!("generator {bad} is outside 1..={n}")));
    }
    let sk = build_skeleton(cfg, config.d)?;
    let x = generators
        .iter()
        .map(|&g| Ok(canonical_sum(cfg, &[g])?.object))
        .collect::<crate::Result<Vec<_>>>()?;
    let variant = match variant {
        VariantArg::Cov => Variant::Covariant,
        VariantArg::Contra => Variant::Contravariant,
    };
    let f = subfunctor_from_subcategory(&sk, &x, variant)?;
    let budget = theorem_budget(config);
    let closure = is_closed(
        &f,
        Side::Both,
        &ClosureBudget {
            seed: config.seed,
            ..budget.closure
        },
    )?;
    let proj = has_enough_projectives(&f, ENOUGH_DIM_CAP, config.seed)?;
    let inj = has_enough_injectives(&f, ENOUGH_DIM_CAP, config.seed)?;
    let ok = f.is_valid() && closure.closed();
    let mut tsv = String::from("field\tvalue\n");
    for (i, j) in sk.pairs() {
        writeln!(tsv, "U_{i},{j}\t{}/{}", f.get(i, j).dim(), sk.ext_dim(i, j)).unwrap();
    }
    let summary = [
        ("valid", tsv_bool(f.is_valid()).to_string()),
        ("closed", tsv_bool(closure.closed()).to_string()),
        ("proj_list", list(&relative_projectives(&f))),
        ("inj_list", list(&relative_injectives(&f))),
        ("enough_proj", tri(proj.verdict).to_string()),
        ("enough_inj", tri(inj.verdict).to_string()),
    ];
    for (k, v) in summary {
        writeln!(tsv, "{k}\t{v}").unwrap();
    }
    Ok(Report {
        command: "subcategory",
        status_ok: ok,
        result: json!({
            "generators": generators,
            "variant": variant,
            "label": f.label(),
            "subspaces": f.to_json(),
            "valid": f.is_valid(),
            "closure": closure,
            "closed": closure.closed(),
            "proj_list": relative_projectives(&f),
            "inj_list": relative_injectives(&f),
            "enough_proj": proj.verdict,
            "enough_inj": inj.verdict,
            "enough_proj_characterization": proj.characterization,
        }),
        tsv,
        code: if ok { EXIT_PASS } else { EXIT_VIOLATION },
    })
}
