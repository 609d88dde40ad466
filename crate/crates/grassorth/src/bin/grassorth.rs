use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use grassorth::grassmannian::{sample_orthogonal_partner_rng, sample_shilov_rng};
use grassorth::jsonio;
use grassorth::maps::{
    check_null_preservation, check_orthogonality_preservation, constant_shilov_map,
    pit_orthogonality, standard_embedding, whitney_map, PolyMatrixMap,
};
use grassorth::rigidity::{
    classify_map, dimension_bound_check, regime, sample_orthogonal_frame, ClassifyConfig,
};
use grassorth::util::trial_rng;
use grassorth::{GaussianRational, Scalar};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Float,
    Exact,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Parser)]
#[command(name = "grassorth", version, about = "Indefinite Grassmannian orthogonality toolkit")]
struct Cli {
    /// Scalar backend: float sampling or exact rational identity testing
    #[arg(long, global = true, value_enum, default_value = "float")]
    mode: Mode,
    #[arg(long, global = true, default_value_t = grassorth::DEFAULT_TOL)]
    tol: f64,
    /// Sample count for the sampling engines
    #[arg(long, global = true, default_value_t = 1000)]
    samples: usize,
    /// Trial count for exact identity testing
    #[arg(long, global = true, default_value_t = 100)]
    trials: usize,
    #[arg(long, global = true, env = "GRASSORTH_SEED", default_value_t = 0)]
    seed: u64,
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct MapSource {
    /// Map file (JSON schema: src, tgt, entries)
    #[arg(long, conflicts_with = "builtin")]
    map: Option<PathBuf>,
    /// Built-in map: standard | whitney | constant
    #[arg(long)]
    builtin: Option<String>,
    /// Source parameter s (built-ins)
    #[arg(long)]
    s: Option<usize>,
    /// Target parameter r' (built-ins)
    #[arg(long)]
    rp: Option<usize>,
    /// Target parameter s' (built-ins; standard and constant)
    #[arg(long)]
    sp: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Rigidity regime for source rank 1 against target (r', s')
    Regime {
        #[arg(long)]
        s: usize,
        #[arg(long)]
        rp: usize,
        #[arg(long)]
        sp: usize,
    },
    /// Verify null and orthogonality preservation (plus exact identity
    /// testing in exact mode); exit 1 on failure
    Check {
        #[command(flatten)]
        source: MapSource,
    },
    /// Full classification pipeline; completed analysis always exits 0
    Analyze {
        #[command(flatten)]
        source: MapSource,
    },
    /// Emit deterministic samples as JSON lines
    Sample {
        #[arg(value_parser = ["shilov", "pair", "frame"])]
        kind: String,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long)]
        s: usize,
        #[arg(long, default_value_t = 5)]
        n: usize,
    },
    /// End-to-end walkthrough on the built-in maps
    Demo,
}

struct Failure {
    code: u8,
    message: String,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: msg.into(),
    }
}

fn internal(msg: impl std::fmt::Display) -> Failure {
    Failure {
        code: 2,
        message: msg.to_string(),
    }
}

fn load_map<S: Scalar>(src: &MapSource) -> Result<PolyMatrixMap<S>, Failure> {
    if let Some(path) = &src.map {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        return jsonio::polymap_from_str(&text).map_err(|e| usage(format!("bad map file: {e}")));
    }
    let name = src
        .builtin
        .as_deref()
        .ok_or_else(|| usage("either --map or --builtin is required"))?;
    let s = src.s.ok_or_else(|| usage("--s is required for built-ins"))?;
    let rp = src.rp.ok_or_else(|| usage("--rp is required for built-ins"))?;
    let built = match name {
        "standard" => {
            let sp = src.sp.ok_or_else(|| usage("--sp is required for standard"))?;
            standard_embedding(s, rp, sp)
        }
        "whitney" => whitney_map(s, rp),
        "constant" => {
            let sp = src.sp.ok_or_else(|| usage("--sp is required for constant"))?;
            constant_shilov_map(s, rp, sp)
        }
        other => return Err(usage(format!("unknown builtin '{other}'"))),
    };
    built.map_err(|e| usage(format!("invalid parameters: {e}")))
}

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| internal(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    if cli.samples == 0 || cli.trials == 0 {
        return Err(usage("--samples and --trials must be at least 1"));
    }
    match &cli.cmd {
        Cmd::Regime { s, rp, sp } => {
            let reg = regime(*s, *rp, *sp);
            let text = match cli.format {
                Format::Json => serde_json::to_string_pretty(&reg).map_err(internal)?,
                Format::Csv => {
                    let mut out = String::from("s,rp,sp,d,lower,upper,tag,hypothesis_ok\n");
                    writeln!(
                        out,
                        "{s},{rp},{sp},{},{},{},{:?},{}",
                        reg.d, reg.bounds.0, reg.bounds.1, reg.tag, reg.hypothesis_ok
                    )
                    .unwrap();
                    out.trim_end().to_string()
                }
            };
            emit(cli, &text)?;
            Ok(0)
        }
        Cmd::Check { source } => {
            if cli.format == Format::Csv {
                return Err(usage("reports are emitted as JSON; csv applies to regime/sample"));
            }
            let f: PolyMatrixMap<Complex64> = load_map(source)?;
            let null_rep = check_null_preservation(&f, cli.samples, cli.tol, cli.seed)
                .map_err(|e| usage(format!("{e}")))?;
            let orth_rep = check_orthogonality_preservation(&f, cli.samples, cli.tol, cli.seed)
                .map_err(|e| usage(format!("{e}")))?;
            let mut passed = null_rep.passed() && orth_rep.passed();
            let mut doc = serde_json::json!({
                "null_preservation": null_rep,
                "orthogonality_preservation": orth_rep,
            });
            if cli.mode == Mode::Exact {
                let fe: PolyMatrixMap<GaussianRational> = load_map(source)?;
                let pit = pit_orthogonality(&fe, cli.trials, cli.seed)
                    .map_err(|e| usage(format!("{e}")))?;
                passed = passed && pit.passed();
                doc["pit_orthogonality"] = serde_json::to_value(&pit).map_err(internal)?;
            }
            doc["passed"] = serde_json::Value::Bool(passed);
            emit(cli, &serde_json::to_string_pretty(&doc).map_err(internal)?)?;
            Ok(if passed { 0 } else { 1 })
        }
        Cmd::Analyze { source } => {
            if cli.format == Format::Csv {
                return Err(usage("reports are emitted as JSON; csv applies to regime/sample"));
            }
            if cli.mode == Mode::Exact {
                return Err(usage(
                    "analyze runs on the float backend; use 'check --mode exact' for exact certification",
                ));
            }
            let f: PolyMatrixMap<Complex64> = load_map(source)?;
            let cfg = ClassifyConfig {
                samples: cli.samples.min(200).max(10),
                tol: cli.tol,
                seed: cli.seed,
                ..ClassifyConfig::default()
            };
            let report = classify_map(&f, &cfg).map_err(|e| usage(format!("{e}")))?;
            let mut doc = serde_json::to_value(&report).map_err(internal)?;
            if let Ok(bounds) = dimension_bound_check(&f, cli.tol, cli.seed) {
                doc["dimension_bounds"] = serde_json::to_value(&bounds).map_err(internal)?;
            }
            emit(cli, &serde_json::to_string_pretty(&doc).map_err(internal)?)?;
            Ok(0)
        }
        Cmd::Sample { kind, r, s, n } => {
            let mut lines = Vec::with_capacity(*n);
            match kind.as_str() {
                "shilov" => {
                    for i in 0..*n {
                        let rng = &mut trial_rng(cli.seed, i as u64);
                        let z = sample_shilov_rng(*r, *s, rng)
                            .map_err(|e| usage(format!("{e}")))?;
                        lines.push(jsonio::chart_to_json(&z).to_string());
                    }
                }
                "pair" => {
                    if *r != 1 {
                        return Err(usage("pair sampling requires --r 1"));
                    }
                    for i in 0..*n {
                        let rng = &mut trial_rng(cli.seed, i as u64);
                        let z = sample_shilov_rng(1, *s, rng)
                            .map_err(|e| usage(format!("{e}")))?;
                        let w = sample_orthogonal_partner_rng(&z, rng)
                            .map_err(|e| usage(format!("{e}")))?;
                        lines.push(
                            serde_json::json!({
                                "z": jsonio::chart_to_json(&z),
                                "w": jsonio::chart_to_json(&w),
                            })
                            .to_string(),
                        );
                    }
                }
                "frame" => {
                    if *r != 1 {
                        return Err(usage("frame sampling requires --r 1"));
                    }
                    for i in 0..*n {
                        let frame =
                            sample_orthogonal_frame(*s, cli.tol, cli.seed.wrapping_add(i as u64))
                                .map_err(|e| usage(format!("{e}")))?;
                        let pts: Vec<_> = frame.iter().map(jsonio::chart_to_json).collect();
                        lines.push(serde_json::json!({ "frame": pts }).to_string());
                    }
                }
                _ => unreachable!("clap validates kind"),
            }
            if cli.format == Format::Csv {
                return Err(usage("sample streams are emitted as JSON lines"));
            }
            emit(cli, &lines.join("\n"))?;
            Ok(0)
        }
        Cmd::Demo => {
            let f = standard_embedding::<Complex64>(2, 2, 3).map_err(internal)?;
            let w = whitney_map::<Complex64>(2, 2).map_err(internal)?;
            let cfg = ClassifyConfig {
                seed: cli.seed,
                ..ClassifyConfig::default()
            };
            let doc = serde_json::json!({
                "regimes": {
                    "s2_rp2_sp3": regime(2, 2, 3),
                    "s3_rp2_sp3": regime(3, 2, 3),
                    "s2_rp2_sp4": regime(2, 2, 4),
                },
                "standard_embedding_check":
                    check_null_preservation(&f, 200, cli.tol, cli.seed).map_err(internal)?,
                "standard_embedding_analysis": classify_map(&f, &cfg).map_err(internal)?,
                "whitney_analysis": classify_map(&w, &cfg).map_err(internal)?,
            });
            emit(cli, &serde_json::to_string_pretty(&doc).map_err(internal)?)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
