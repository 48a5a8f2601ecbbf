// Copyright 2026 The lqrlr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lqrlr::experiments::{run_scenario, NoiseMode, RunManifest, ScenarioConfig, ScenarioError};
use lqrlr::format::{matrix_rows, to_json};
use lqrlr::modelfile::{FieldError, LayoutInfo, ModelFile};
use lqrlr::svg::plot_report;
use lqrlr_core::admm::{admm_solve, optimality_report, AdmmConfig, DesignResult, OptimalityReport, Termination, Variant};
use lqrlr_core::lqr::solve_standard_lqr;
use lqrlr_core::network::{build_coupled_model, generate_layout, CouplingSign, DEFAULT_EXTENT};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "lqrlr", version, about = "Structured (sparse and low-rank) LQR design")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Standard,
    Sparse,
    LowrankSoft,
    LowrankHard,
}

#[derive(Subcommand)]
enum Command {
    /// Design one feedback gain for a model file.
    Design {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum)]
        variant: VariantArg,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long)]
        eps_pri: Option<f64>,
        #[arg(long)]
        eps_dual: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a Monte-Carlo scenario; writes `<out>.csv` and `<out>.json`.
    Scenario {
        #[arg(long, required_unless_present = "replay")]
        id: Option<u8>,
        /// `A..B` (inclusive), a comma list, or a single count.
        #[arg(long)]
        agents: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        inner_trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        sigma2: Option<String>,
        #[arg(long)]
        attacks: Option<String>,
        #[arg(long)]
        ranks: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        coupling_sign: Option<String>,
        #[arg(long)]
        rho: Option<f64>,
        /// Perturb only entries above the link tolerance.
        #[arg(long)]
        nonzero_noise: bool,
        /// Add an unregularized run per trial (scenario 1).
        #[arg(long)]
        control: bool,
        /// Re-run the configuration stored in a report's JSON document.
        #[arg(long, conflicts_with_all = ["id", "agents", "trials", "inner_trials", "seed", "sigma2", "attacks", "ranks", "coupling_sign", "rho", "nonzero_noise", "control"])]
        replay: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Write the coupled multi-agent model for a random layout.
    Genmodel {
        #[arg(long)]
        agents: usize,
        #[arg(long, default_value_t = DEFAULT_EXTENT)]
        extent: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long, allow_hyphen_values = true, default_value = "-1")]
        coupling_sign: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the version.
    Version,
}

/// A failure with its exit code and a short machine-readable tag.
struct Failure {
    code: u8,
    tag: &'static str,
    message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Self {
        Self {
            code: 2,
            tag: "parse",
            message: message.to_string(),
        }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Self {
            code: 2,
            tag: "io",
            message: format!("{}: {e}", path.display()),
        }
    }

    fn solver(message: impl ToString) -> Self {
        Self {
            code: 3,
            tag: "solver",
            message: message.to_string(),
        }
    }
}

impl From<FieldError> for Failure {
    fn from(e: FieldError) -> Self {
        Failure::input(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Design {
            model,
            variant,
            rho,
            gamma,
            rank,
            eps_pri,
            eps_dual,
            max_iter,
            out,
        } => {
            let mut config = AdmmConfig {
                gamma,
                rank,
                ..AdmmConfig::default()
            };
            config.rho = rho.unwrap_or(config.rho);
            config.eps_pri = eps_pri.unwrap_or(config.eps_pri);
            config.eps_dual = eps_dual.unwrap_or(config.eps_dual);
            config.max_outer = max_iter.unwrap_or(config.max_outer);
            config.variant = match variant {
                VariantArg::Standard => None,
                VariantArg::Sparse => Some(Variant::Sparse),
                VariantArg::LowrankSoft => Some(Variant::LowRankSoft),
                VariantArg::LowrankHard => Some(Variant::LowRankHard),
            }
            .unwrap_or(config.variant);
            let standard_only = matches!(variant, VariantArg::Standard);
            cmd_design(&model, standard_only, config, &out)
        }
        Command::Scenario {
            id,
            agents,
            trials,
            inner_trials,
            seed,
            sigma2,
            attacks,
            ranks,
            coupling_sign,
            rho,
            nonzero_noise,
            control,
            replay,
            out,
            plot,
        } => {
            let config = match replay {
                Some(path) => replay_config(&path),
                None => (|| {
                    let mut c = ScenarioConfig::defaults(id.expect("required without --replay"));
                    if let Some(a) = agents {
                        c.agent_counts = parse_list(&a, "agents")?;
                    }
                    c.trials_outer = trials.unwrap_or(c.trials_outer);
                    c.trials_inner = inner_trials.unwrap_or(c.trials_inner);
                    c.seed = seed.unwrap_or(c.seed);
                    if let Some(s) = sigma2 {
                        c.noise_variances = parse_list(&s, "sigma2")?;
                    }
                    if let Some(s) = attacks {
                        c.attack_counts = parse_list(&s, "attacks")?;
                    }
                    if let Some(s) = ranks {
                        c.rank_sweep = parse_list(&s, "ranks")?;
                    }
                    if let Some(s) = coupling_sign {
                        c.coupling_sign = parse_sign(&s)?;
                    }
                    c.admm.rho = rho.unwrap_or(c.admm.rho);
                    if nonzero_noise {
                        c.noise_mode = NoiseMode::NonzeroOnly;
                    }
                    c.control_row = control;
                    Ok(c)
                })(),
            };
            config.and_then(|c| cmd_scenario(&c, &out, plot.as_deref()))
        }
        Command::Genmodel {
            agents,
            extent,
            seed,
            coupling_sign,
            out,
        } => cmd_genmodel(agents, extent, seed, &coupling_sign, &out),
        Command::Version => {
            println!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"));
            Ok(0)
        }
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error[{}]: {}", f.tag, f.message);
            ExitCode::from(f.code)
        }
    }
}

fn parse_sign(s: &str) -> Result<i32, Failure> {
    match s.trim() {
        "+1" | "1" => Ok(1),
        "-1" => Ok(-1),
        _ => Err(Failure::input(format!("coupling-sign: expected +1 or -1, found {s:?}"))),
    }
}

/// `A..B` (inclusive, integers only), `a,b,c`, or a single value.
fn parse_list<T: std::str::FromStr + TryFrom<u32>>(s: &str, flag: &str) -> Result<Vec<T>, Failure> {
    let bad = || Failure::input(format!("{flag}: cannot parse {s:?}"));
    if let Some((a, b)) = s.split_once("..") {
        let a: u32 = a.trim().parse().map_err(|_| bad())?;
        let b: u32 = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(Failure::input(format!("{flag}: empty range {s:?}")));
        }
        return (a..=b).map(|v| T::try_from(v).map_err(|_| bad())).collect();
    }
    s.split(',').map(|v| v.trim().parse::<T>().map_err(|_| bad())).collect()
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Failure::io(path, e))
}

#[derive(Serialize)]
struct DesignManifest {
    tool: &'static str,
    version: &'static str,
    model: String,
    variant: &'static str,
    rho: f64,
    gamma: f64,
    rank: Option<usize>,
    eps_pri: f64,
    eps_dual: f64,
    max_outer: usize,
    max_inner: usize,
    inner_tol: f64,
}

#[derive(Serialize)]
struct OptimalityDoc {
    primal_residual: f64,
    dual_residual: f64,
    stationarity: f64,
    primal_ok: bool,
    dual_ok: bool,
    stationarity_ok: bool,
}

impl From<OptimalityReport> for OptimalityDoc {
    fn from(r: OptimalityReport) -> Self {
        Self {
            primal_residual: r.primal_residual,
            dual_residual: r.dual_residual,
            stationarity: r.stationarity,
            primal_ok: r.primal_ok,
            dual_ok: r.dual_ok,
            stationarity_ok: r.stationarity_ok,
        }
    }
}

#[derive(Serialize)]
struct DesignDoc {
    termination: &'static str,
    #[serde(rename = "J")]
    j: f64,
    #[serde(rename = "J_stand")]
    j_stand: f64,
    cost_ratio: f64,
    iterations: usize,
    #[serde(rename = "K")]
    k: Vec<Vec<f64>>,
    #[serde(rename = "K_diag")]
    k_diag: Vec<Vec<f64>>,
    #[serde(rename = "K_low")]
    k_low: Vec<Vec<f64>>,
    dual: Vec<Vec<f64>>,
    /// `[primal, dual]` per outer iteration.
    residual_history: Vec<[f64; 2]>,
    optimality: Option<OptimalityDoc>,
}

#[derive(Serialize)]
struct DesignOutput {
    manifest: DesignManifest,
    result: DesignDoc,
}

fn cmd_design(model_path: &Path, standard_only: bool, config: AdmmConfig, out: &Path) -> Result<u8, Failure> {
    let file = ModelFile::load(model_path)?;
    let (model, structure) = (&file.model, &file.structure);
    if !standard_only {
        config.validate(model.m(), model.n()).map_err(Failure::input)?;
    }
    let (result, optimality) = if standard_only {
        let sol = solve_standard_lqr(model).map_err(Failure::solver)?;
        (DesignResult::standard(&sol, structure), None)
    } else {
        let r = admm_solve(model, structure, &config).map_err(Failure::solver)?;
        let report = optimality_report(model, &r, &config).ok().map(OptimalityDoc::from);
        (r, report)
    };
    let doc = DesignOutput {
        manifest: DesignManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            model: model_path.display().to_string(),
            variant: if standard_only { "standard" } else { config.variant.name() },
            rho: config.rho,
            gamma: config.gamma,
            rank: config.rank,
            eps_pri: config.eps_pri,
            eps_dual: config.eps_dual,
            max_outer: config.max_outer,
            max_inner: config.max_inner,
            inner_tol: config.inner_tol,
        },
        result: DesignDoc {
            termination: result.termination.name(),
            j: result.cost,
            j_stand: result.standard_cost,
            cost_ratio: result.cost_ratio(),
            iterations: result.iterations,
            k: matrix_rows(&result.k),
            k_diag: matrix_rows(&result.k_diag),
            k_low: matrix_rows(&result.k_low),
            dual: matrix_rows(&result.dual),
            residual_history: result.residual_history.iter().map(|r| [r.primal, r.dual]).collect(),
            optimality,
        },
    };
    write(out, &to_json(&doc))?;
    match result.termination {
        Termination::Converged => Ok(0),
        Termination::MaxIter => {
            eprintln!("error[not-converged]: stopped after {} iterations", result.iterations);
            Ok(3)
        }
        Termination::Infeasible => {
            eprintln!("error[infeasible]: K_diag + K_low is not stabilizing");
            Ok(4)
        }
    }
}

fn replay_config(path: &Path) -> Result<ScenarioConfig, Failure> {
    #[derive(serde::Deserialize)]
    struct Doc {
        manifest: RunManifest,
    }
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    let doc: Doc = serde_json::from_str(&text).map_err(|e| Failure::input(format!("manifest: {e}")))?;
    Ok(doc.manifest.config)
}

fn output_paths(out: &Path) -> (PathBuf, PathBuf) {
    let base = if out.extension().is_some_and(|e| e == "csv" || e == "json") {
        out.with_extension("")
    } else {
        out.to_path_buf()
    };
    let with = |ext: &str| {
        let mut s = base.clone().into_os_string();
        s.push(ext);
        PathBuf::from(s)
    };
    (with(".csv"), with(".json"))
}

fn cmd_scenario(config: &ScenarioConfig, out: &Path, plot: Option<&Path>) -> Result<u8, Failure> {
    config.validate()?;
    let pool = lqrlr::thread_pool().map_err(Failure::input)?;
    let id = config.scenario;
    let report = pool
        .install(|| run_scenario(config, |t| eprintln!("scenario {id}: {} done in {:.1} s", t.point, t.seconds)))
        .map_err(|e| match e {
            ScenarioError::Config(f) => Failure::input(f),
            other => Failure::solver(other),
        })?;
    let (csv_path, json_path) = output_paths(out);
    write(&csv_path, &report.csv())?;
    write(&json_path, &report.json())?;
    if let Some(p) = plot {
        write(p, &plot_report(&report))?;
    }
    Ok(0)
}

fn cmd_genmodel(agents: usize, extent: f64, seed: u64, sign: &str, out: &Path) -> Result<u8, Failure> {
    let exponent = parse_sign(sign)?;
    let coupling = CouplingSign::from_exponent(exponent).map_err(Failure::input)?;
    let layout = generate_layout(agents, extent, seed).map_err(Failure::input)?;
    let (model, structure) = build_coupled_model(&layout, coupling).map_err(Failure::input)?;
    let file = ModelFile {
        model,
        structure,
        layout: Some(LayoutInfo::new(&layout, Some(seed), exponent)),
    };
    write(out, &file.to_json())?;
    Ok(0)
}
