//! One binary, one pipeline stage per subcommand. Structured data moves
//! as JSON, distributions as CSV, samples as newline-separated
//! bitstrings, so each stage's output file feeds the next stage
//! unchanged. All randomness flows from `--seed`: commands with two
//! random stages derive them as `Rng::new(seed).split(0)` (estimation)
//! and `.split(1)` (sampling), and parallel loops split once per work
//! item, so outputs depend on the seed and never on thread count.
//!
//! Exit codes: 0 success, 2 usage, 3 malformed input file, 4 size guard
//! refusal, 5 validation failure, 6 file system trouble, 1 anything else.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use iqp::codes::{
    encode_xprogram, per_bit_failure_bound, per_bit_failure_exact, protected_pipeline,
    repetition_code,
};
use iqp::layout::route::network_depth_bound;
use iqp::layout::{layer_circuit, plan_grid, route, verify_lattice, ColoringStrategy, LatticeCircuit};
use iqp::mask::bitstring;
use iqp::noise::{apply_noise, NoiseParams};
use iqp::program::random_sparse_circuit;
use iqp::sampler::{
    build_spectrum, choose_parameters, empirical, l1_distance, AlgSampler, SpectrumSource,
};
use iqp::simulate::{fourth_moment_closed_form, moment_mc, output_distribution, Distribution};
use iqp::{Error, Rng, SparseParams, XProgram};

use report::Emitter;

/// Dense reference distributions in run reports stop here; the library
/// guard sits higher, but reports should stay cheap.
const REPORT_DENSE: usize = 20;

#[derive(Parser)]
#[command(name = "iqp", version, about = "Sparse IQP circuits: generate, simulate, add noise, sample, protect, route")]
struct Cli {
    /// Cap on worker threads (default: all logical cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a random sparse circuit and write its JSON
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dense output distribution of a circuit, as CSV
    Simulate {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Push a distribution CSV through the output bit-flip channel
    Noise {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a noisy circuit via its truncated Fourier spectrum
    Sample {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        epsilon: f64,
        /// Target l1 accuracy fed to the parameter choice
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        /// Truncation weight: a number, or `auto` to derive it from delta
        #[arg(long, default_value = "auto", value_parser = parse_ell)]
        ell: EllArg,
        /// Coefficient source: `exact` autocorrelations or `estimate`
        #[arg(long, default_value = "exact", value_parser = parse_source)]
        source: SpectrumSource,
        #[arg(long)]
        shots: u64,
        #[arg(long)]
        seed: u64,
        /// Anticoncentration constant; defaults to the measured value
        /// when the circuit is small enough to simulate, else 2
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode a circuit with a classical code
    Encode {
        #[arg(long)]
        circuit: PathBuf,
        /// Code spec, currently `repetition:<r>` with odd r
        #[arg(long, value_parser = parse_code)]
        code: CodeArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the encoded circuit under noise and decode each shot
    ProtectRun {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long, value_parser = parse_code)]
        code: CodeArg,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        shots: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Color a circuit's interaction graph and schedule it on a grid
    Route {
        #[arg(long)]
        circuit: PathBuf,
        /// Edge coloring: `greedy` or `misra-gries`
        #[arg(long, default_value = "misra-gries", value_parser = parse_strategy)]
        strategy: ColoringStrategy,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo moment estimates over the sparse circuit family
    BenchMoments {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        gamma: f64,
        /// Moment order, 2 or 4
        #[arg(long, default_value_t = 2)]
        order: u32,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        /// Also report the fraction of circuits with squared zero
        /// amplitude at least this multiple of 2^-n
        #[arg(long)]
        pz_alpha: Option<f64>,
    },
    /// Check a lattice schedule implements a circuit
    Verify {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        lattice: PathBuf,
    },
}

#[derive(Clone, Copy, Debug)]
enum EllArg {
    Auto,
    Fixed(usize),
}

fn parse_ell(text: &str) -> Result<EllArg, String> {
    if text == "auto" {
        return Ok(EllArg::Auto);
    }
    text.parse()
        .map(EllArg::Fixed)
        .map_err(|_| format!("expected `auto` or a weight, got `{text}`"))
}

fn parse_source(text: &str) -> Result<SpectrumSource, String> {
    match text {
        "exact" => Ok(SpectrumSource::Exact),
        "estimate" => Ok(SpectrumSource::Estimate),
        other => Err(format!("expected `exact` or `estimate`, got `{other}`")),
    }
}

fn parse_strategy(text: &str) -> Result<ColoringStrategy, String> {
    text.parse().map_err(|e: Error| e.to_string())
}

#[derive(Clone, Copy, Debug)]
struct CodeArg {
    repetitions: usize,
}

fn parse_code(text: &str) -> Result<CodeArg, String> {
    let r = text
        .strip_prefix("repetition:")
        .ok_or_else(|| format!("expected `repetition:<r>`, got `{text}`"))?;
    r.parse()
        .map(|repetitions| CodeArg { repetitions })
        .map_err(|_| format!("repetition count `{r}` is not a number"))
}

/// Everything that can stop a run, mapped onto the exit-code table.
pub enum Failure {
    Lib(Error),
    Io(String, std::io::Error),
    Violation(String),
}

impl Failure {
    fn kind(&self) -> &'static str {
        match self {
            Failure::Lib(Error::Parse(_)) => "parse",
            Failure::Lib(Error::SizeGuard { .. }) => "size-guard",
            Failure::Lib(_) => "validation",
            Failure::Io(..) => "io",
            Failure::Violation(_) => "validation",
        }
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Lib(Error::Parse(_)) => 3,
            Failure::Lib(Error::SizeGuard { .. }) => 4,
            Failure::Lib(_) => 5,
            Failure::Violation(_) => 5,
            Failure::Io(..) => 6,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Lib(e) => e.to_string(),
            Failure::Io(path, e) => format!("{path}: {e}"),
            Failure::Violation(v) => v.clone(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(path.display().to_string(), e))
}

fn read_circuit(path: &Path) -> Result<XProgram, Failure> {
    Ok(XProgram::from_json(&read_text(path)?)?)
}

fn collision_alpha(dist: &Distribution) -> f64 {
    (1u64 << dist.n()) as f64 * dist.probs().iter().map(|p| p * p).sum::<f64>()
}

fn bitstring_lines(samples: &[u64], n: usize) -> String {
    let mut text = String::with_capacity(samples.len() * (n + 1));
    for &s in samples {
        text.push_str(&bitstring(s, n));
        text.push('\n');
    }
    text
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .expect("the global pool is built before any parallel work");
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!(
                "{}",
                json!({ "error": failure.kind(), "message": failure.message() })
            );
            ExitCode::from(failure.code())
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Generate { n, gamma, seed, out } => generate(n, gamma, seed, out.as_deref()),
        Command::Simulate { circuit, out } => simulate(&circuit, out.as_deref()),
        Command::Noise { dist, epsilon, out } => noise(&dist, epsilon, out.as_deref()),
        Command::Sample {
            circuit,
            epsilon,
            delta,
            ell,
            source,
            shots,
            seed,
            alpha,
            out,
        } => sample(&circuit, epsilon, delta, ell, source, shots, seed, alpha, out.as_deref()),
        Command::Encode { circuit, code, out } => encode(&circuit, code, out.as_deref()),
        Command::ProtectRun {
            circuit,
            code,
            epsilon,
            shots,
            seed,
            out,
        } => protect_run(&circuit, code, epsilon, shots, seed, out.as_deref()),
        Command::Route {
            circuit,
            strategy,
            out,
        } => route_cmd(&circuit, strategy, out.as_deref()),
        Command::BenchMoments {
            n,
            gamma,
            order,
            trials,
            seed,
            pz_alpha,
        } => bench_moments(n, gamma, order, trials, seed, pz_alpha),
        Command::Verify { circuit, lattice } => verify(&circuit, &lattice),
    }
}

fn generate(n: usize, gamma: f64, seed: u64, out: Option<&Path>) -> Result<(), Failure> {
    let mut em = Emitter::new();
    let params = SparseParams::new(n, gamma)?;
    let prog = random_sparse_circuit(&params, &mut Rng::new(seed));
    em.payload(out, &prog.to_json())?;
    em.finish(
        "generate",
        json!({ "n": n, "gamma": gamma, "p_edge": params.p_edge() }),
        Some(seed),
        json!({ "rows": prog.rows().len(), "den": prog.den() }),
    );
    Ok(())
}

fn simulate(circuit: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let mut em = Emitter::new();
    let prog = read_circuit(circuit)?;
    let dist = output_distribution(&prog)?;
    em.payload(out, &dist.to_csv())?;
    em.finish(
        "simulate",
        json!({ "circuit": circuit.display().to_string() }),
        None,
        json!({ "n": dist.n(), "collision_alpha": collision_alpha(&dist) }),
    );
    Ok(())
}

fn noise(dist_path: &Path, epsilon: f64, out: Option<&Path>) -> Result<(), Failure> {
    let mut em = Emitter::new();
    let dist = Distribution::from_csv(&read_text(dist_path)?)?;
    let noisy = apply_noise(&dist, epsilon)?;
    em.payload(out, &noisy.to_csv())?;
    em.finish(
        "noise",
        json!({ "dist": dist_path.display().to_string(), "epsilon": epsilon }),
        None,
        json!({ "n": noisy.n(), "l1_shift": l1_distance(dist.probs(), noisy.probs()) }),
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn sample(
    circuit: &Path,
    epsilon: f64,
    delta: f64,
    ell: EllArg,
    source: SpectrumSource,
    shots: u64,
    seed: u64,
    alpha_flag: Option<f64>,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let mut em = Emitter::new();
    let prog = read_circuit(circuit)?;
    let n = prog.n();
    if shots == 0 {
        return Err(Error::InvalidParam("no shots requested".into()).into());
    }
    // dense reference: measures alpha and scores the samples afterwards
    let dense = if n <= REPORT_DENSE {
        Some(output_distribution(&prog)?)
    } else {
        None
    };
    let measured_alpha = dense.as_ref().map(collision_alpha);
    let alpha = alpha_flag
        .or(measured_alpha)
        .unwrap_or(2.0)
        .max(1.0);
    let mut cfg = choose_parameters(n, alpha, delta, epsilon)?;
    if let EllArg::Fixed(k) = ell {
        cfg = cfg.with_ell(k);
    }
    let table = build_spectrum(&prog, &cfg, source, &Rng::new(seed).split(0))?;
    let sampler = AlgSampler::new(&table)?;
    let samples = sampler.sample_many(shots, &Rng::new(seed).split(1))?;
    em.payload(out, &bitstring_lines(&samples, n))?;

    let oracle_evals = match source {
        // exact autocorrelations scan all 2^n points, two f evaluations each
        SpectrumSource::Exact => cfg.coeff_count * 2f64.powi(n as i32 + 1),
        SpectrumSource::Estimate => cfg.total_oracle_evals(),
    };
    let l1_to_noisy = match &dense {
        Some(d) => {
            let target = apply_noise(d, epsilon)?;
            let emp = empirical(n, &samples)?;
            Value::from(l1_distance(emp.probs(), target.probs()))
        }
        None => Value::Null,
    };
    em.finish(
        "sample",
        json!({
            "circuit": circuit.display().to_string(),
            "epsilon": epsilon,
            "delta": delta,
            "ell": match ell { EllArg::Auto => Value::from("auto"), EllArg::Fixed(k) => Value::from(k) },
            "source": source,
            "shots": shots,
        }),
        Some(seed),
        json!({
            "alpha_used": alpha,
            "measured_alpha": measured_alpha,
            "ell": cfg.ell,
            "gamma_acc": cfg.gamma_acc,
            "median_reps": cfg.median_reps,
            "coeff_count": cfg.coeff_count,
            "oracle_evals": oracle_evals,
            "l1_to_noisy": l1_to_noisy,
        }),
    );
    Ok(())
}

fn encode(circuit: &Path, code: CodeArg, out: Option<&Path>) -> Result<(), Failure> {
    let mut em = Emitter::new();
    let prog = read_circuit(circuit)?;
    let spec = repetition_code(prog.n(), code.repetitions)?;
    let encoded = encode_xprogram(&prog, &spec)?;
    em.payload(out, &encoded.to_json())?;
    em.finish(
        "encode",
        json!({
            "circuit": circuit.display().to_string(),
            "code": format!("repetition:{}", code.repetitions),
        }),
        None,
        json!({
            "n": prog.n(),
            "m": spec.m(),
            "rows_in": prog.rows().len(),
            "rows_out": encoded.rows().len(),
        }),
    );
    Ok(())
}

fn protect_run(
    circuit: &Path,
    code: CodeArg,
    epsilon: f64,
    shots: u64,
    seed: u64,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let mut em = Emitter::new();
    let prog = read_circuit(circuit)?;
    let spec = repetition_code(prog.n(), code.repetitions)?;
    let noise = NoiseParams::new(epsilon)?;
    let run = protected_pipeline(&prog, &spec, &noise, shots, &Rng::new(seed))?;
    em.payload(out, &bitstring_lines(&run.samples, prog.n()))?;
    em.finish(
        "protect-run",
        json!({
            "circuit": circuit.display().to_string(),
            "code": format!("repetition:{}", code.repetitions),
            "epsilon": epsilon,
            "shots": shots,
        }),
        Some(seed),
        json!({
            "word_failures": run.word_failures,
            "bit_failures": run.bit_failures,
            "word_failure_rate": run.word_failure_rate(),
            "bit_failure_rate": run.bit_failure_rate(),
            "per_bit_exact": per_bit_failure_exact(epsilon, code.repetitions)?,
            "per_bit_bound": per_bit_failure_bound(epsilon, code.repetitions)?,
        }),
    );
    Ok(())
}

fn route_cmd(circuit: &Path, strategy: ColoringStrategy, out: Option<&Path>) -> Result<(), Failure> {
    let mut em = Emitter::new();
    let prog = read_circuit(circuit)?;
    let layers = layer_circuit(&prog, strategy)?;
    let grid = plan_grid(prog.n())?;
    let lattice = route(&layers, &grid)?;
    em.payload(out, &lattice.to_json())?;
    let strategy_name = match strategy {
        ColoringStrategy::Greedy => "greedy",
        ColoringStrategy::MisraGries => "misra-gries",
    };
    em.finish(
        "route",
        json!({
            "circuit": circuit.display().to_string(),
            "strategy": strategy_name,
        }),
        None,
        json!({
            "rows": grid.rows(),
            "cols": grid.cols(),
            "layers": layers.layers.len(),
            "depth": lattice.depth(),
            "swaps": lattice.swap_count(),
            "gates": lattice.gate_count(),
            "pass_depth_bound": network_depth_bound(&grid),
        }),
    );
    Ok(())
}

fn bench_moments(
    n: usize,
    gamma: f64,
    order: u32,
    trials: u64,
    seed: u64,
    pz_alpha: Option<f64>,
) -> Result<(), Failure> {
    let em = Emitter::new();
    let params = SparseParams::new(n, gamma)?;
    let report = moment_mc(&params, order, trials, &Rng::new(seed))?;
    let reference = match order {
        2 => json!({ "second_moment": 2f64.powi(-(n as i32)) }),
        _ => json!({
            "five_over_4n": 5.0 * 4f64.powi(-(n as i32)),
            "grouped_sum": fourth_moment_closed_form(n, params.p_edge())?,
        }),
    };
    // the fraction gets its own stream, far from the per-trial splits
    let fraction = match pz_alpha {
        Some(a) => Value::from(iqp::simulate::paley_zygmund_fraction(
            &params,
            a,
            trials,
            &Rng::new(seed).split(u64::MAX),
        )?),
        None => Value::Null,
    };
    em.finish(
        "bench-moments",
        json!({ "n": n, "gamma": gamma, "order": order, "trials": trials, "pz_alpha": pz_alpha }),
        Some(seed),
        json!({
            "mean": report.mean,
            "std_error": report.std_error,
            "reference": reference,
            "pz_fraction": fraction,
        }),
    );
    Ok(())
}

fn verify(circuit: &Path, lattice: &Path) -> Result<(), Failure> {
    let em = Emitter::new();
    let prog = read_circuit(circuit)?;
    let lat = LatticeCircuit::from_json(&read_text(lattice)?)?;
    let grid = plan_grid(prog.n())?;
    verify_lattice(&lat, &prog, &grid).map_err(|v| Failure::Violation(v.to_string()))?;
    em.finish(
        "verify",
        json!({
            "circuit": circuit.display().to_string(),
            "lattice": lattice.display().to_string(),
        }),
        None,
        json!({ "ok": true, "depth": lat.depth(), "swaps": lat.swap_count() }),
    );
    Ok(())
}
