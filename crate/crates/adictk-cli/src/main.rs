//! adictk: one binary over the library's maps, towers, rank statistics,
//! walks, and spectral estimates.
//!
//! Conventions shared by every subcommand: reports default to JSON, sample
//! streams to CSV (override with --format); rationals are printed exactly
//! as num/den; floats appear only in spectral traces and takagi columns and
//! always travel with an error-bound column; undetermined outcomes are data
//! rows, not errors. Identical invocations produce identical bytes.

use std::num::NonZeroU32;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde_json::{json, Value};

use adictk::graph::{pascal_graph, verify_induced_over_odometer};
use adictk::induced::TransformationSpec;
use adictk::pascal::jump_exponents;
use adictk::ratio::{format_ratio, parse_ratio};
use adictk::spectral::spectral_radius_estimate;
use adictk::stats::{
    monte_carlo_cdf, takagi, truncated_jump_expectation, MonteCarloConfig, Normalization,
    NormalizationLadder,
};
use adictk::tower::{hk_orbit, sigma_finite_report, TowerPoint};
use adictk::walk::{simulate_trajectory, Group, WalkSpec};
use adictk::word::MeasureSpec;
use adictk::{DigitWord, Windowed};

#[derive(Parser)]
#[command(
    name = "adictk",
    version,
    about = "Adic maps, towers, and walk statistics"
)]
struct RunConfig {
    /// RNG seed for the sampling subcommands.
    #[arg(long, global = true, env = "ADICTK_SEED", default_value_t = 0)]
    seed: u64,
    /// Output format; reports default to json, sample streams to csv.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum MapKind {
    Pascal,
    PascalInverse,
    Odometer,
    OdometerWrap,
}

#[derive(Subcommand)]
enum Command {
    /// Stream the orbit of a word under a window map.
    Orbit {
        #[arg(long, value_enum)]
        map: MapKind,
        /// Starting word, low digit first, e.g. 00110.
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 1)]
        steps: u64,
    },
    /// Report the first-descent decomposition and jump of one word.
    Jump {
        #[arg(long)]
        word: String,
    },
    /// Sample rank statistics over a ladder of word lengths.
    RankStats {
        /// Comma-separated word lengths, e.g. 4,8,16.
        #[arg(long, value_delimiter = ',', required = true)]
        n_ladder: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// "haar" or a digit-1 probability such as 1/3.
        #[arg(long, default_value = "haar")]
        measure: String,
        /// Affine renormalizations "n:a:b[;n:a:b...]" applying t -> (t-a)/b.
        #[arg(long)]
        norm: Option<String>,
        /// Append takagi value and error bound columns, using this many terms.
        #[arg(long)]
        takagi_terms: Option<NonZeroU32>,
    },
    /// Tower orbits (--base-word) or level-measure reports (--report-levels).
    #[command(group(ArgGroup::new("hk-mode").required(true).args(["base_word", "report_levels"])))]
    Hk {
        #[arg(long)]
        base_word: Option<String>,
        #[arg(long, default_value_t = 1)]
        steps: u64,
        /// Word length used for level measures.
        #[arg(long)]
        window: Option<usize>,
        /// Report levels 0..=N; requires --window.
        #[arg(long, requires = "window")]
        report_levels: Option<u64>,
    },
    /// Walk trajectories (--length) or spectral traces (--ball-radius).
    #[command(group(ArgGroup::new("walk-mode").required(true).args(["length", "ball_radius"])))]
    Walk {
        /// Backend: z:<dims>, free:<rank>, or cyclic:<modulus>.
        #[arg(long)]
        group: String,
        /// Step weights "generator=p/q"; default is the uniform symmetric set.
        #[arg(long)]
        nu: Vec<String>,
        /// Number of trajectory points to simulate.
        #[arg(long)]
        length: Option<usize>,
        /// Truncation radius for the norm estimate.
        #[arg(long)]
        ball_radius: Option<usize>,
        #[arg(long, default_value_t = 100_000)]
        iters: usize,
        /// Refuse balls larger than this.
        #[arg(long, default_value_t = 1 << 20)]
        cap: usize,
    },
    /// Check the graph successor acts by digit addition on path codes.
    GraphCheck {
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long, default_value_t = 2)]
        radix: u32,
        /// Prefix height to check; defaults to the full depth.
        #[arg(long)]
        window: Option<usize>,
    },
    /// Exact truncated jump expectations per window length.
    Expectation {
        #[arg(long, default_value_t = 12)]
        max_window: usize,
    },
}

fn main() -> ExitCode {
    let config = match RunConfig::try_parse() {
        Ok(config) => config,
        Err(e) => e.exit(), // usage errors exit 2, --help/--version exit 0
    };
    let rendered = match execute(&config) {
        Ok(rendered) => rendered,
        Err(message) => {
            eprintln!("adictk: {message}");
            return ExitCode::from(1);
        }
    };
    match &config.output {
        None => {
            print!("{rendered}");
            ExitCode::SUCCESS
        }
        Some(path) => match std::fs::write(path, rendered) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("adictk: cannot write {}: {e}", path.display());
                ExitCode::from(1)
            }
        },
    }
}

fn execute(config: &RunConfig) -> Result<String, String> {
    match &config.command {
        Command::Orbit { map, word, steps } => orbit(config, *map, word, *steps),
        Command::Jump { word } => jump_report(config, word),
        Command::RankStats {
            n_ladder,
            samples,
            measure,
            norm,
            takagi_terms,
        } => rank_stats(
            config,
            n_ladder,
            *samples,
            measure,
            norm.as_deref(),
            *takagi_terms,
        ),
        Command::Hk {
            base_word,
            steps,
            window,
            report_levels,
        } => match report_levels {
            Some(levels) => hk_report(config, *levels, (*window).expect("clap enforces --window")),
            None => hk_orbit_stream(
                config,
                base_word.as_deref().expect("clap enforces the mode"),
                *steps,
            ),
        },
        Command::Walk {
            group,
            nu,
            length,
            ball_radius,
            iters,
            cap,
        } => {
            let spec = build_walk(group, nu)?;
            match (length, ball_radius) {
                (Some(length), _) => walk_trajectory(config, group, &spec, *length),
                (None, Some(radius)) => walk_spectral(config, group, &spec, *radius, *iters, *cap),
                (None, None) => unreachable!("clap enforces the mode"),
            }
        }
        Command::GraphCheck {
            depth,
            radix,
            window,
        } => graph_check(config, *depth, *radix, window.unwrap_or(*depth)),
        Command::Expectation { max_window } => expectation(config, *max_window),
    }
}

fn pick(config: &RunConfig, default: Format) -> Format {
    config.format.unwrap_or(default)
}

fn csv(header: &str, rows: &[String]) -> String {
    let mut out =
        String::with_capacity(header.len() + 1 + rows.iter().map(|r| r.len() + 1).sum::<usize>());
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(row);
        out.push('\n');
    }
    out
}

fn csv_field(raw: &str) -> String {
    if raw.contains(',') || raw.contains('"') {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw.to_string()
    }
}

fn pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

fn parse_word(s: &str) -> Result<DigitWord, String> {
    DigitWord::dyadic_from_str(s).map_err(|e| e.to_string())
}

fn orbit(config: &RunConfig, map: MapKind, word: &str, steps: u64) -> Result<String, String> {
    let spec = match map {
        MapKind::Pascal => TransformationSpec::pascal(),
        MapKind::PascalInverse => TransformationSpec::pascal_inverse(),
        MapKind::Odometer => TransformationSpec::odometer(),
        MapKind::OdometerWrap => TransformationSpec::odometer_wrapping(),
    };
    let mut rows: Vec<(u64, Option<DigitWord>)> = vec![(0, Some(parse_word(word)?))];
    for step in 1..=steps {
        let Some((_, Some(current))) = rows.last().map(|r| (r.0, r.1.clone())) else {
            break;
        };
        match spec.apply(&current).map_err(|e| e.to_string())? {
            Windowed::Determined(next) => rows.push((step, Some(next))),
            Windowed::Undetermined => rows.push((step, None)),
        }
    }
    Ok(match pick(config, Format::Csv) {
        Format::Csv => {
            let body: Vec<String> = rows
                .iter()
                .map(|(step, w)| match w {
                    Some(w) => format!("{step},{w},determined"),
                    None => format!("{step},,undetermined"),
                })
                .collect();
            csv("step,word,status", &body)
        }
        Format::Json => pretty(&Value::Array(
            rows.iter()
                .map(|(step, w)| match w {
                    Some(w) => json!({"step": step, "word": w.to_string(), "status": "determined"}),
                    None => json!({"step": step, "word": Value::Null, "status": "undetermined"}),
                })
                .collect(),
        )),
    })
}

fn jump_report(config: &RunConfig, word: &str) -> Result<String, String> {
    let w = parse_word(word)?;
    let exponents = jump_exponents(&w).map_err(|e| e.to_string())?;
    Ok(match pick(config, Format::Json) {
        Format::Json => pretty(&match &exponents {
            Windowed::Determined(e) => json!({
                "word": w.to_string(),
                "status": "determined",
                "m": e.zeros,
                "k": e.ones,
                "jump": e.jump().to_string(),
                "window": e.window(),
            }),
            Windowed::Undetermined => json!({
                "word": w.to_string(),
                "status": "undetermined",
                "m": Value::Null,
                "k": Value::Null,
                "jump": Value::Null,
                "window": Value::Null,
            }),
        }),
        Format::Csv => {
            let row = match &exponents {
                Windowed::Determined(e) => format!(
                    "{w},determined,{},{},{},{}",
                    e.zeros,
                    e.ones,
                    e.jump(),
                    e.window()
                ),
                Windowed::Undetermined => format!("{w},undetermined,,,,"),
            };
            csv("word,status,m,k,jump,window", &[row])
        }
    })
}

fn parse_ladder(s: &str) -> Result<NormalizationLadder, String> {
    let mut rows = Vec::new();
    for entry in s.split(';') {
        let parts: Vec<&str> = entry.split(':').collect();
        let [n, a, b] = parts.as_slice() else {
            return Err(format!("norm entry {entry:?} is not n:a:b"));
        };
        rows.push((
            n.trim()
                .parse::<usize>()
                .map_err(|e| format!("bad ladder length {n:?}: {e}"))?,
            parse_ratio(a).map_err(|e| e.to_string())?,
            parse_ratio(b).map_err(|e| e.to_string())?,
        ));
    }
    NormalizationLadder::new(rows).map_err(|e| e.to_string())
}

fn rank_stats(
    config: &RunConfig,
    n_ladder: &[usize],
    samples: usize,
    measure: &str,
    norm: Option<&str>,
    takagi_terms: Option<NonZeroU32>,
) -> Result<String, String> {
    let measure = if measure == "haar" {
        MeasureSpec::haar()
    } else {
        let p = parse_ratio(measure).map_err(|e| e.to_string())?;
        MeasureSpec::bernoulli(p).map_err(|e| e.to_string())?
    };
    let normalization = match norm {
        None => Normalization::RankFraction,
        Some(s) => Normalization::Ladder(parse_ladder(s)?),
    };
    let mc = MonteCarloConfig {
        samples,
        normalization,
        seed: config.seed,
    };
    let estimates = monte_carlo_cdf(&measure, n_ladder, &mc).map_err(|e| e.to_string())?;
    let takagi_at = |u: &num_rational::BigRational| -> Result<(f64, f64), String> {
        let terms = takagi_terms.expect("caller checked");
        let (value, bound) = takagi(u, terms).map_err(|e| e.to_string())?;
        // exact rationals, reported as floats per the trace conventions
        Ok((rational_to_f64(&value), rational_to_f64(&bound)))
    };
    Ok(match pick(config, Format::Csv) {
        Format::Csv => {
            let header = if takagi_terms.is_some() {
                "n,sample_index,m,t,u,normalized,takagi,takagi_bound"
            } else {
                "n,sample_index,m,t,u,normalized"
            };
            let mut body = Vec::new();
            for estimate in &estimates {
                for (index, sample) in estimate.samples.iter().enumerate() {
                    let record = &sample.record;
                    let mut row = format!(
                        "{},{index},{},{},{},{}",
                        record.n,
                        record.m,
                        record.t,
                        format_ratio(&record.u),
                        format_ratio(&sample.normalized)
                    );
                    if takagi_terms.is_some() {
                        let (value, bound) = takagi_at(&record.u)?;
                        row.push_str(&format!(",{value},{bound}"));
                    }
                    body.push(row);
                }
            }
            csv(header, &body)
        }
        Format::Json => {
            let quartile_points = ["1/4", "1/2", "3/4"];
            let mut reports = Vec::new();
            for estimate in &estimates {
                let mut quartiles = serde_json::Map::new();
                let mut takagi_rows = Vec::new();
                for p in quartile_points {
                    let at = parse_ratio(p).map_err(|e| e.to_string())?;
                    let q = estimate.overall.quantile(&at).map_err(|e| e.to_string())?;
                    quartiles.insert(p.to_string(), Value::String(format_ratio(q)));
                    if takagi_terms.is_some() {
                        let (value, bound) = takagi_at(q)?;
                        takagi_rows.push(json!({
                            "at": format_ratio(q),
                            "value": value,
                            "bound": bound,
                        }));
                    }
                }
                let mut report = json!({
                    "n": estimate.n,
                    "samples": estimate.samples.len(),
                    "quartiles": Value::Object(quartiles),
                });
                if takagi_terms.is_some() {
                    report["takagi"] = Value::Array(takagi_rows);
                }
                reports.push(report);
            }
            pretty(&Value::Array(reports))
        }
    })
}

fn rational_to_f64(r: &num_rational::BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().expect("value fits in f64")
}

fn hk_report(config: &RunConfig, levels: u64, window: usize) -> Result<String, String> {
    let report = sigma_finite_report(levels, window);
    Ok(match pick(config, Format::Json) {
        Format::Json => pretty(&json!({
            "window": report.window,
            "levels": report
                .levels
                .iter()
                .zip(&report.cumulative)
                .enumerate()
                .map(|(level, (measure, cumulative))| json!({
                    "level": level,
                    "measure": format_ratio(measure),
                    "cumulative": format_ratio(cumulative),
                }))
                .collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let body: Vec<String> = report
                .levels
                .iter()
                .zip(&report.cumulative)
                .enumerate()
                .map(|(level, (measure, cumulative))| {
                    format!(
                        "{level},{},{}",
                        format_ratio(measure),
                        format_ratio(cumulative)
                    )
                })
                .collect();
            csv("level,measure,cumulative", &body)
        }
    })
}

fn hk_orbit_stream(config: &RunConfig, base_word: &str, steps: u64) -> Result<String, String> {
    let base = parse_word(base_word)?;
    let start = TowerPoint::new(base, 0).map_err(|e| e.to_string())?;
    let segment = hk_orbit(&start, steps).map_err(|e| e.to_string())?;
    Ok(match pick(config, Format::Csv) {
        Format::Csv => {
            let mut body: Vec<String> = segment
                .points
                .iter()
                .enumerate()
                .map(|(step, pt)| format!("{step},{},{},determined", pt.base(), pt.level()))
                .collect();
            if !segment.complete {
                body.push(format!("{},,,undetermined", segment.points.len()));
            }
            csv("step,base,level,status", &body)
        }
        Format::Json => {
            let mut rows: Vec<Value> = segment
                .points
                .iter()
                .enumerate()
                .map(|(step, pt)| {
                    json!({
                        "step": step,
                        "base": pt.base().to_string(),
                        "level": pt.level(),
                        "status": "determined",
                    })
                })
                .collect();
            if !segment.complete {
                rows.push(json!({
                    "step": segment.points.len(),
                    "base": Value::Null,
                    "level": Value::Null,
                    "status": "undetermined",
                }));
            }
            pretty(&Value::Array(rows))
        }
    })
}

fn build_walk(group: &str, nu: &[String]) -> Result<WalkSpec, String> {
    let group = parse_group(group)?;
    if nu.is_empty() {
        return WalkSpec::symmetric_simple(group).map_err(|e| e.to_string());
    }
    let mut steps = Vec::with_capacity(nu.len());
    for entry in nu {
        let (token, weight) = entry
            .split_once('=')
            .ok_or_else(|| format!("nu entry {entry:?} is not generator=p/q"))?;
        steps.push((
            group
                .parse_element(token.trim())
                .map_err(|e| e.to_string())?,
            parse_ratio(weight).map_err(|e| e.to_string())?,
        ));
    }
    WalkSpec::new(group, steps).map_err(|e| e.to_string())
}

fn parse_group(s: &str) -> Result<Group, String> {
    let (kind, size) = s
        .split_once(':')
        .ok_or_else(|| format!("group {s:?} is not z:<dims>, free:<rank>, or cyclic:<modulus>"))?;
    let size: u64 = size
        .parse()
        .map_err(|e| format!("bad group parameter {size:?}: {e}"))?;
    if size == 0 {
        return Err(format!("group parameter in {s:?} must be positive"));
    }
    match kind {
        "z" => Ok(Group::Integers {
            dims: size as usize,
        }),
        "free" => {
            if size > 26 {
                return Err("free rank is limited to 26 letters".into());
            }
            Ok(Group::Free {
                rank: size as usize,
            })
        }
        "cyclic" => Ok(Group::Cyclic { modulus: size }),
        other => Err(format!("unknown group kind {other:?}")),
    }
}

fn walk_trajectory(
    config: &RunConfig,
    group_label: &str,
    spec: &WalkSpec,
    length: usize,
) -> Result<String, String> {
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    let trajectory = simulate_trajectory(spec, spec.group().identity(), length, &mut rng)
        .map_err(|e| e.to_string())?;
    Ok(match pick(config, Format::Csv) {
        Format::Csv => {
            let body: Vec<String> = trajectory
                .points()
                .iter()
                .enumerate()
                .map(|(offset, point)| {
                    format!(
                        "{},{}",
                        trajectory.start_index() + offset as i64,
                        csv_field(&spec.group().format_element(point))
                    )
                })
                .collect();
            csv("index,point", &body)
        }
        Format::Json => pretty(&json!({
            "group": group_label,
            "start_index": trajectory.start_index(),
            "points": trajectory
                .points()
                .iter()
                .map(|p| Value::String(spec.group().format_element(p)))
                .collect::<Vec<_>>(),
        })),
    })
}

fn walk_spectral(
    config: &RunConfig,
    group_label: &str,
    spec: &WalkSpec,
    radius: usize,
    iters: usize,
    cap: usize,
) -> Result<String, String> {
    let trace = spectral_radius_estimate(spec, radius, iters, cap).map_err(|e| e.to_string())?;
    let residuals: Vec<Option<f64>> = std::iter::once(None)
        .chain(
            trace
                .estimates
                .windows(2)
                .map(|p| Some((p[1] - p[0]).abs())),
        )
        .collect();
    Ok(match pick(config, Format::Json) {
        Format::Json => pretty(&json!({
            "group": group_label,
            "radius": trace.radius,
            "ball_size": trace.ball_size,
            "iterations": trace.iterations,
            "converged": trace.converged,
            "estimate": trace.estimate(),
            "residual": trace.residual(),
            "trace": trace
                .estimates
                .iter()
                .zip(&residuals)
                .enumerate()
                .map(|(iteration, (estimate, residual))| json!({
                    "iteration": iteration,
                    "estimate": estimate,
                    "residual": residual,
                }))
                .collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let body: Vec<String> = trace
                .estimates
                .iter()
                .zip(&residuals)
                .enumerate()
                .map(|(iteration, (estimate, residual))| match residual {
                    Some(residual) => format!("{iteration},{estimate},{residual}"),
                    None => format!("{iteration},{estimate},"),
                })
                .collect();
            csv("iteration,estimate,residual", &body)
        }
    })
}

fn graph_check(
    config: &RunConfig,
    depth: usize,
    radix: u32,
    window: usize,
) -> Result<String, String> {
    let graph = pascal_graph(depth).map_err(|e| e.to_string())?;
    let check = verify_induced_over_odometer(&graph, radix, window).map_err(|e| e.to_string())?;
    let histogram: Vec<Value> = check
        .j_histogram
        .iter()
        .map(|(j, count)| json!({"j": j.to_string(), "count": count}))
        .collect();
    let counterexamples: Vec<Value> = check
        .counterexamples
        .iter()
        .map(|c| json!({"path": c.path, "successor": c.successor, "reason": c.reason}))
        .collect();
    Ok(match pick(config, Format::Json) {
        Format::Json => pretty(&json!({
            "pass": check.pass,
            "radix": check.radix,
            "window": check.window,
            "paths": check.paths,
            "maximal_paths": check.maximal_paths,
            "j_histogram": histogram,
            "counterexamples": counterexamples,
        })),
        Format::Csv => {
            let body: Vec<String> = check
                .j_histogram
                .iter()
                .map(|(j, count)| format!("{j},{count}"))
                .collect();
            csv("j,count", &body)
        }
    })
}

fn expectation(config: &RunConfig, max_window: usize) -> Result<String, String> {
    if max_window < 2 {
        return Err("--max-window must be at least 2".into());
    }
    let mut rows = Vec::with_capacity(max_window - 1);
    for window in 2..=max_window {
        rows.push((
            window,
            truncated_jump_expectation(window).map_err(|e| e.to_string())?,
        ));
    }
    Ok(match pick(config, Format::Csv) {
        Format::Csv => {
            let body: Vec<String> = rows
                .iter()
                .map(|(window, e)| format!("{window},{}", format_ratio(e)))
                .collect();
            csv("window,expectation", &body)
        }
        Format::Json => pretty(&Value::Array(
            rows.iter()
                .map(|(window, e)| json!({"window": window, "expectation": format_ratio(e)}))
                .collect(),
        )),
    })
}
