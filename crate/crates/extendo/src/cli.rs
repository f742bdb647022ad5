//! Command-line front end: `price`, `boundaries`, `validate`, `errata`.
//!
//! All commands read a contract spec and a market file, print one canonical
//! JSON document to stdout (or aligned text with --table), and exit with
//! 0 on success, 2 on input errors, 3 on numeric failures, and 4 when the
//! validate command's agreement criterion fails.

use crate::boundary::{solve_call_boundaries, solve_put_boundaries, DecisionBoundaries};
use crate::error::PricingError;
use crate::extendible::{
    price, price_put_haug1998, price_put_longstaff1990, ContractSpec, PriceForm,
};
use crate::oracle::{mc_price, mc_price_two_stage, McConfig};
use crate::report::{
    se_units, to_canonical_json, within_three_se, AsPublished, BoundariesDocument, ErrataDocument,
    PriceDocument, RunManifest, ValidateDocument,
};
use crate::termstructure::{period_params, MarketData};
use crate::vanilla::OptionKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "extendo", version, about = "Holder-extendible European option pricer")]
struct Cli {
    /// Render aligned text for humans instead of JSON.
    #[arg(long, global = true)]
    table: bool,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Price a contract and print the full report document.
    Price {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        market: PathBuf,
        /// Algebraic form to evaluate; both must agree to 1e-12.
        #[arg(long, value_enum, default_value_t = FormArg::Rect)]
        form: FormArg,
    },
    /// Solve and print the extension decision boundaries.
    Boundaries {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        market: PathBuf,
    },
    /// Check the closed form against both Monte Carlo estimators.
    Validate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        market: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        paths: u64,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
    /// Compare the corrected put formula against the Monte Carlo oracle,
    /// optionally alongside the two erroneous published formulas.
    Errata {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        market: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        paths: u64,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        /// Include the two as-published erroneous values in the report.
        #[arg(long)]
        reproduce_errata: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormArg {
    Rect,
    Diff,
}

struct CliError {
    message: String,
    code: i32,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError {
            message: message.into(),
            code: 2,
        }
    }
}

impl From<PricingError> for CliError {
    fn from(e: PricingError) -> Self {
        CliError {
            code: if e.is_numeric_failure() { 3 } else { 2 },
            message: e.to_string(),
        }
    }
}

pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // clap prints help/version to stdout with code 0 and usage errors
        // to stderr with code 2.
        Err(e) => e.exit(),
    };
    if let Err(message) = configure_threads() {
        eprintln!("error: {message}");
        return 2;
    }
    match run(cli) {
        Ok(code) => code,
        Err(CliError { message, code }) => {
            eprintln!("error: {message}");
            code
        }
    }
}

/// EXTENDO_THREADS caps the Monte Carlo worker count; 0 or unset means one
/// worker per CPU. The estimate itself is independent of this setting.
fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("EXTENDO_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("EXTENDO_THREADS must be a nonnegative integer, got {raw:?}"))?;
    if n == 0 {
        return Ok(());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| format!("failed to configure thread pool: {e}"))
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Cmd::Price { spec, market, form } => run_price(&spec, &market, form, cli.table),
        Cmd::Boundaries { spec, market } => run_boundaries(&spec, &market, cli.table),
        Cmd::Validate {
            spec,
            market,
            paths,
            seed,
        } => run_validate(&spec, &market, paths, seed, cli.table),
        Cmd::Errata {
            spec,
            market,
            paths,
            seed,
            reproduce_errata,
        } => run_errata(&spec, &market, paths, seed, reproduce_errata, cli.table),
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("failed to read {}: {e}", path.display())))
}

fn load_inputs(
    spec_path: &Path,
    market_path: &Path,
) -> Result<(ContractSpec, MarketData, Vec<String>), CliError> {
    let spec = ContractSpec::load_json(&read_file(spec_path)?)
        .map_err(|e| CliError::input(format!("{}: {e}", spec_path.display())))?;
    let base = market_path.parent().unwrap_or(Path::new("."));
    let market = MarketData::load_json(&read_file(market_path)?, base)
        .map_err(|e| CliError::input(format!("{}: {e}", market_path.display())))?;
    let inputs = vec![
        spec_path.display().to_string(),
        market_path.display().to_string(),
    ];
    Ok((spec, market, inputs))
}

fn emit<T: Serialize>(doc: &T, table: Option<String>) -> Result<(), CliError> {
    match table {
        Some(text) => println!("{text}"),
        None => println!("{}", to_canonical_json(doc)?),
    }
    Ok(())
}

fn run_price(
    spec_path: &Path,
    market_path: &Path,
    form: FormArg,
    table: bool,
) -> Result<i32, CliError> {
    let (spec, market, inputs) = load_inputs(spec_path, market_path)?;
    let (price_form, form_name) = match form {
        FormArg::Rect => (PriceForm::Rectangle, "rectangle"),
        FormArg::Diff => (PriceForm::Difference, "difference"),
    };
    let report = price(&spec, &market, price_form)?;
    let doc = PriceDocument {
        manifest: RunManifest::new("price", &inputs, &spec, &market),
        form: form_name.to_string(),
        report,
    };
    let text = table.then(|| price_table(&doc));
    emit(&doc, text)?;
    Ok(0)
}

fn run_boundaries(spec_path: &Path, market_path: &Path, table: bool) -> Result<i32, CliError> {
    let (spec, market, inputs) = load_inputs(spec_path, market_path)?;
    let params = period_params(&market, spec.t1, spec.t2)?;
    let boundaries = match spec.kind {
        OptionKind::Call => solve_call_boundaries(&spec, &params)?,
        OptionKind::Put => solve_put_boundaries(&spec, &params)?,
    };
    let doc = BoundariesDocument {
        manifest: RunManifest::new("boundaries", &inputs, &spec, &market),
        boundaries,
        params,
    };
    let text = table.then(|| boundaries_table(&doc.boundaries));
    emit(&doc, text)?;
    Ok(0)
}

fn run_validate(
    spec_path: &Path,
    market_path: &Path,
    paths: u64,
    seed: u64,
    table: bool,
) -> Result<i32, CliError> {
    let (spec, market, inputs) = load_inputs(spec_path, market_path)?;
    let config = McConfig::new(paths, seed, true)?;
    let closed_form = price(&spec, &market, PriceForm::Rectangle)?.price;
    let marginal = mc_price(&spec, &market, config)?;
    let two_stage = mc_price_two_stage(&spec, &market, config)?;
    let pass = within_three_se(closed_form, &marginal) && within_three_se(closed_form, &two_stage);
    let doc = ValidateDocument {
        manifest: RunManifest::new("validate", &inputs, &spec, &market),
        config,
        closed_form,
        marginal,
        two_stage,
        marginal_se_units: se_units(closed_form, &marginal),
        two_stage_se_units: se_units(closed_form, &two_stage),
        pass,
    };
    let text = table.then(|| validate_table(&doc));
    emit(&doc, text)?;
    Ok(if pass { 0 } else { 4 })
}

fn run_errata(
    spec_path: &Path,
    market_path: &Path,
    paths: u64,
    seed: u64,
    reproduce_errata: bool,
    table: bool,
) -> Result<i32, CliError> {
    let (spec, market, inputs) = load_inputs(spec_path, market_path)?;
    if spec.kind != OptionKind::Put {
        return Err(CliError::input(
            "the errata command compares put formulas; got kind=call",
        ));
    }
    if !market.is_constant() {
        return Err(CliError::input(
            "the errata command requires constant curves",
        ));
    }
    let config = McConfig::new(paths, seed, true)?;
    let corrected = price(&spec, &market, PriceForm::Rectangle)?.price;
    let monte_carlo = mc_price(&spec, &market, config)?;
    let as_published = if reproduce_errata {
        let longstaff1990 = price_put_longstaff1990(&spec, &market)?;
        let haug1998 = price_put_haug1998(&spec, &market)?;
        Some(AsPublished {
            longstaff1990,
            longstaff1990_se_units: se_units(longstaff1990, &monte_carlo),
            haug1998,
            haug1998_se_units: se_units(haug1998, &monte_carlo),
        })
    } else {
        None
    };
    let doc = ErrataDocument {
        manifest: RunManifest::new("errata", &inputs, &spec, &market),
        config,
        corrected,
        monte_carlo,
        corrected_se_units: se_units(corrected, &monte_carlo),
        as_published,
    };
    let text = table.then(|| errata_table(&doc));
    emit(&doc, text)?;
    Ok(0)
}

fn price_table(doc: &PriceDocument) -> String {
    let r = &doc.report;
    let mut out = String::new();
    row(&mut out, "form", &doc.form);
    rowf(&mut out, "price", r.price);
    rowf(&mut out, "vanilla_component", r.vanilla_component);
    for (i, term) in r.decomposition.iter().enumerate() {
        rowf(&mut out, &format!("term_{}", i + 1), *term);
    }
    out.push_str(&boundaries_table(&r.boundaries));
    rowf(&mut out, "extension_probability", r.extension_probability);
    out.pop();
    out
}

fn boundaries_table(b: &DecisionBoundaries) -> String {
    let mut out = String::new();
    row(&mut out, "I1", &serde_json::to_string(&b.i1).unwrap());
    row(&mut out, "I2", &serde_json::to_string(&b.i2).unwrap());
    row(&mut out, "never_extended", &b.never_extended.to_string());
    rowf(&mut out, "I1_residual", b.i1_residual);
    rowf(&mut out, "I2_residual", b.i2_residual);
    out
}

fn validate_table(doc: &ValidateDocument) -> String {
    let mut out = String::new();
    rowf(&mut out, "closed_form", doc.closed_form);
    row(
        &mut out,
        "marginal",
        &format!(
            "{:.10} +- {:.10}  ({:.2} SE)",
            doc.marginal.mean, doc.marginal.std_error, doc.marginal_se_units
        ),
    );
    row(
        &mut out,
        "two_stage",
        &format!(
            "{:.10} +- {:.10}  ({:.2} SE)",
            doc.two_stage.mean, doc.two_stage.std_error, doc.two_stage_se_units
        ),
    );
    row(&mut out, "paths", &doc.config.paths.to_string());
    row(
        &mut out,
        "verdict",
        if doc.pass { "PASS" } else { "FAIL" },
    );
    out.pop();
    out
}

fn errata_table(doc: &ErrataDocument) -> String {
    let mut out = String::new();
    row(
        &mut out,
        "monte_carlo",
        &format!(
            "{:.10} +- {:.10}",
            doc.monte_carlo.mean, doc.monte_carlo.std_error
        ),
    );
    row(
        &mut out,
        "corrected",
        &format!("{:.10}  ({:.2} SE)", doc.corrected, doc.corrected_se_units),
    );
    if let Some(p) = &doc.as_published {
        row(
            &mut out,
            "longstaff1990",
            &format!("{:.10}  ({:.2} SE)", p.longstaff1990, p.longstaff1990_se_units),
        );
        row(
            &mut out,
            "haug1998",
            &format!("{:.10}  ({:.2} SE)", p.haug1998, p.haug1998_se_units),
        );
    }
    row(&mut out, "paths", &doc.config.paths.to_string());
    out.pop();
    out
}

fn row(out: &mut String, key: &str, value: &str) {
    out.push_str(&format!("{key:<24}{value}\n"));
}

fn rowf(out: &mut String, key: &str, value: f64) {
    row(out, key, &format!("{value:.10}"));
}
