use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use recur_core::estimators::{
    convergence_sweep, default_w_max, estimate_jn_growing, estimate_match_dual, QSchedule, SweepConfig,
};
use recur_core::ldp::{
    aep_rates_iid, aep_tail_exact, cramer_rate_iid, fit_rate, kac_check, kim_check, mc_tail_aep, mc_tail_lower_with,
    mc_tail_match, mc_tail_upper_with, FitPoint, ReturnConfig, TailEstimate, TailSide,
};
use recur_core::recurrence::{match_length, recurrence_indexed, Boundary};
use recur_core::rng::derive_seed;
use recur_core::sources::{GrowingRealization, SourceModel};
use recur_core::{MatchLength, Realization, Recurrence};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::args::*;
use crate::config::{config_error, merge_params, write_manifest, GuardError, Manifest, ResolvedModel};
use crate::plot;

/// Largest realization any subcommand materializes.
pub const MEMORY_GUARD: usize = 1 << 28;

pub struct Ctx {
    pub model: ResolvedModel,
    pub seed: u64,
    pub out: PathBuf,
    pub params: Map<String, Value>,
}

impl Ctx {
    fn model(&self) -> &SourceModel {
        &self.model.model
    }

    fn id(&self) -> &str {
        &self.model.id
    }

    fn h(&self) -> f64 {
        self.model().entropy_rate().bits()
    }

    fn finish<P: Serialize>(&self, command: &str, params: &P) -> Result<()> {
        write_manifest(
            &self.out,
            &Manifest {
                schema_version: crate::config::SCHEMA_VERSION,
                version: env!("CARGO_PKG_VERSION"),
                command,
                model_id: &self.model.id,
                model: &self.model.spec,
                seed: self.seed,
                params,
            },
        )?;
        eprintln!(
            "resolved config: {}",
            serde_json::json!({ "command": command, "model_id": self.id(), "seed": self.seed, "params": params })
        );
        Ok(())
    }

    fn guard_len(&self, len: usize) -> Result<()> {
        if len > MEMORY_GUARD {
            let h = self.h();
            let hint = if h > 0.0 {
                format!(
                    "; recurrence times grow like 2^(nH) with H = {h:.5} bits, so n up to about {:.0} fits",
                    28.0 / h
                )
            } else {
                String::new()
            };
            return Err(GuardError(format!("a realization of {len} symbols exceeds the 2^28-symbol guard{hint}")).into());
        }
        Ok(())
    }
}

fn csv_writer(out: &Path, name: &str) -> Result<csv::Writer<BufWriter<File>>> {
    let path = out.join(name);
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

fn write_rows<R: Serialize>(out: &Path, name: &str, rows: &[R]) -> Result<()> {
    let mut w = csv_writer(out, name)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn nonempty<T>(name: &str, v: &[T]) -> Result<()> {
    if v.is_empty() {
        return Err(config_error(format!("{name} must list at least one value")));
    }
    Ok(())
}

fn positive(name: &str, v: &[usize]) -> Result<()> {
    nonempty(name, v)?;
    if v.contains(&0) {
        return Err(config_error(format!("{name} values must be positive")));
    }
    Ok(())
}

fn schedule(c: f64, k: f64) -> Result<QSchedule> {
    QSchedule::new(c, k).map_err(|e| config_error(format!("c/k: {e}")))
}

// ---------------------------------------------------------------- model-info

#[derive(Serialize)]
struct ModelInfo {
    model_id: String,
    kind: &'static str,
    alphabet_size: usize,
    entropy_bits: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    stationary: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    irreducible: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    period: Option<usize>,
    warnings: Vec<String>,
}

pub fn model_info(ctx: &Ctx, args: NoArgs) -> Result<()> {
    let args: NoArgs = merge_params(&ctx.params, &args)?;
    let model = ctx.model();
    let mut info = ModelInfo {
        model_id: ctx.id().to_string(),
        kind: model.kind(),
        alphabet_size: model.alphabet().size(),
        entropy_bits: ctx.h(),
        stationary: None,
        irreducible: None,
        period: None,
        warnings: Vec::new(),
    };
    if let SourceModel::Markov(m) = model {
        let class = m.classification();
        info.stationary = Some(m.stationary().to_vec());
        info.irreducible = Some(class.irreducible);
        info.period = Some(class.period);
        let mut missing = Vec::new();
        if !class.irreducible {
            missing.push("not irreducible");
        }
        if !class.aperiodic {
            missing.push("not aperiodic");
        }
        if !missing.is_empty() {
            info.warnings.push(format!("exponential phi-mixing hypotheses not met: {}", missing.join(", ")));
        }
    }
    if matches!(model, SourceModel::Periodic { .. }) {
        info.warnings.push("exponential phi-mixing hypotheses not met: not aperiodic".into());
    }

    println!("model {} ({})", info.model_id, info.kind);
    println!("H = {:.5} bits", info.entropy_bits.max(0.0) + 0.0);
    if let Some(pi) = &info.stationary {
        println!("stationary = {pi:?}");
        println!("irreducible = {}, period = {}", info.irreducible.unwrap(), info.period.unwrap());
    }
    for w in &info.warnings {
        eprintln!("warning: {w}");
    }
    let path = ctx.out.join("model_info.json");
    fs::write(&path, serde_json::to_string_pretty(&info)? + "\n")
        .with_context(|| format!("writing {}", path.display()))?;
    ctx.finish("model-info", &args)
}

// ------------------------------------------------------------------ simulate

pub fn simulate(ctx: &Ctx, args: SimulateArgs) -> Result<()> {
    let mut args: SimulateArgs = merge_params(&ctx.params, &args)?;
    let past = *args.past.get_or_insert(1024);
    let future = *args.future.get_or_insert(1024);
    if past == 0 {
        return Err(config_error("past must be at least 1"));
    }
    ctx.guard_len(past.saturating_add(future))?;
    let real = ctx.model().generate_two_sided(past, future, ctx.seed);
    let path = ctx.out.join("realization.bin");
    real.dump(BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?))?;
    println!("wrote {} symbols (origin {}) to {}", real.data().len(), real.origin(), path.display());
    ctx.finish("simulate", &args)
}

// --------------------------------------------------------------------- recur

#[derive(Serialize)]
struct RecurrenceRow<'a> {
    model_id: &'a str,
    n: usize,
    r_n: Option<usize>,
    status: &'static str,
    seed: u64,
}

#[derive(Serialize)]
struct MatchRow<'a> {
    model_id: &'a str,
    m: usize,
    l_m: usize,
    status: &'static str,
    seed: u64,
}

pub fn recur(ctx: &Ctx, args: RecurArgs) -> Result<()> {
    let mut args: RecurArgs = merge_params(&ctx.params, &args)?;
    let ns = args.n.get_or_insert_with(|| (1..=12).collect()).clone();
    let ms = args.m.get_or_insert_with(|| vec![16, 64, 256, 1024]).clone();
    positive("n", &ns)?;
    positive("m", &ms)?;
    let real = match &args.input {
        Some(path) => {
            let file = File::open(path).map_err(|e| config_error(format!("cannot open {}: {e}", path.display())))?;
            Realization::load(BufReader::new(file)).map_err(|e| config_error(format!("{}: {e}", path.display())))?
        }
        None => {
            let past = *args.past.get_or_insert(4096);
            let future = *args.future.get_or_insert(64);
            if past == 0 {
                return Err(config_error("past must be at least 1"));
            }
            ctx.guard_len(past.saturating_add(future))?;
            ctx.model().generate_two_sided(past, future, ctx.seed)
        }
    };
    let mut r_rows = Vec::new();
    for &n in &ns {
        if n > real.future_len() {
            return Err(config_error(format!("n = {n} exceeds the future of {} symbols", real.future_len())));
        }
        let j_max = real.past_len() - 1;
        let row = match recurrence_indexed(&real, n, j_max)?.value {
            Recurrence::Found(r) => RecurrenceRow { model_id: ctx.id(), n, r_n: Some(r), status: "found", seed: ctx.seed },
            Recurrence::Censored { .. } => {
                RecurrenceRow { model_id: ctx.id(), n, r_n: None, status: "censored", seed: ctx.seed }
            }
        };
        r_rows.push(row);
    }
    let mut l_rows = Vec::new();
    for &m in &ms {
        if m > real.past_len() {
            return Err(config_error(format!("m = {m} exceeds the past of {} symbols", real.past_len())));
        }
        let (l_m, status) = match match_length(&real, m)?.value {
            MatchLength::Exact(l) => (l, "exact"),
            MatchLength::FutureLimited(l) => (l, "future_limited"),
        };
        l_rows.push(MatchRow { model_id: ctx.id(), m, l_m, status, seed: ctx.seed });
    }
    write_rows(&ctx.out, "recurrence.csv", &r_rows)?;
    write_rows(&ctx.out, "match.csv", &l_rows)?;
    ctx.finish("recur", &args)
}

// ------------------------------------------------------------------ estimate

#[derive(Serialize)]
struct EstimateRow<'a> {
    model_id: &'a str,
    n: usize,
    #[serde(rename = "Q")]
    q: usize,
    estimate_bits: f64,
    censored: usize,
    flag: &'static str,
    seed: u64,
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    model_id: &'a str,
    n: usize,
    #[serde(rename = "Q")]
    q: usize,
    runs: usize,
    mean: f64,
    std_dev: f64,
    mean_abs_error: f64,
    censored_total: usize,
}

pub fn estimate(ctx: &Ctx, args: EstimateArgs) -> Result<()> {
    let mut args: EstimateArgs = merge_params(&ctx.params, &args)?;
    let ns = args.n.get_or_insert_with(|| vec![8, 12, 16]).clone();
    let c = *args.c.get_or_insert(1.0);
    let k = *args.k.get_or_insert(2.0);
    let runs = *args.runs.get_or_insert(20);
    positive("n", &ns)?;
    if runs == 0 {
        return Err(config_error("runs must be at least 1"));
    }
    let schedule = schedule(c, k)?;
    let h = ctx.h();
    for &n in &ns {
        let w = args.w_max.unwrap_or_else(|| default_w_max(n, h));
        ctx.guard_len(w.saturating_add(schedule.q(n)).saturating_add(n))?;
    }
    let config = SweepConfig {
        n_list: ns,
        schedule,
        seeds: (0..runs).map(|r| derive_seed(ctx.seed, r)).collect(),
        w_max: args.w_max,
    };
    let table = convergence_sweep(ctx.model(), &config)?;
    let rows: Vec<EstimateRow> = table
        .rows
        .iter()
        .map(|r| EstimateRow {
            model_id: ctx.id(),
            n: r.report.n,
            q: r.report.q,
            estimate_bits: r.report.estimate,
            censored: r.report.censored_count,
            flag: r.report.flag.as_str(),
            seed: r.seed,
        })
        .collect();
    let summary: Vec<SummaryRow> = table
        .summary
        .iter()
        .map(|s| SummaryRow {
            model_id: ctx.id(),
            n: s.n,
            q: s.q,
            runs: s.runs,
            mean: s.mean,
            std_dev: s.std_dev,
            mean_abs_error: s.mean_abs_error,
            censored_total: s.censored_total,
        })
        .collect();
    for s in &summary {
        println!("n = {:3}  Q = {:5}  mean J_n = {:.5}  |J_n - H| = {:.5}", s.n, s.q, s.mean, s.mean_abs_error);
    }
    write_rows(&ctx.out, "estimates.csv", &rows)?;
    write_rows(&ctx.out, "estimates_summary.csv", &summary)?;
    ctx.finish("estimate", &args)
}

// --------------------------------------------------------------------- tails

#[derive(Debug, Serialize, Deserialize)]
pub struct TailRow {
    pub model_id: String,
    pub n: usize,
    pub epsilon: f64,
    pub side: String,
    pub trials: u64,
    pub hits: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub threshold: f64,
    pub seed: u64,
}

fn parse_sides(sides: &[String]) -> Result<Vec<TailSide>> {
    nonempty("side", sides)?;
    sides
        .iter()
        .map(|s| {
            TailSide::parse(s).ok_or_else(|| {
                config_error(format!("side \"{s}\" (expected upper, lower, aep, match_upper or match_lower)"))
            })
        })
        .collect()
}

fn parse_boundary(b: &str) -> Result<Boundary> {
    match b {
        "strict" => Ok(Boundary::Strict),
        "weak" => Ok(Boundary::Weak),
        other => Err(config_error(format!("boundary \"{other}\" (expected strict or weak)"))),
    }
}

fn fill_tails(args: &mut TailsArgs, sides: &[&str], ns: &[usize], eps: f64, trials: u64) {
    args.side.get_or_insert_with(|| sides.iter().map(|s| s.to_string()).collect());
    args.n.get_or_insert_with(|| ns.to_vec());
    args.eps.get_or_insert_with(|| vec![eps]);
    args.trials.get_or_insert(trials);
    args.boundary.get_or_insert_with(|| "strict".into());
}

fn run_tails(ctx: &Ctx, args: &TailsArgs) -> Result<Vec<TailRow>> {
    let sides = parse_sides(args.side.as_deref().unwrap_or_default())?;
    let ns = args.n.clone().unwrap_or_default();
    let eps = args.eps.clone().unwrap_or_default();
    positive("n", &ns)?;
    nonempty("eps", &eps)?;
    let trials = args.trials.unwrap_or_default();
    if trials == 0 {
        return Err(config_error("trials must be at least 1"));
    }
    let boundary = parse_boundary(args.boundary.as_deref().unwrap_or("strict"))?;
    let model = ctx.model();
    let mut rows = Vec::new();
    let mut point = 0u64;
    for &side in &sides {
        for &e in &eps {
            for &n in &ns {
                let seed = derive_seed(ctx.seed, point);
                point += 1;
                let est: TailEstimate = match side {
                    TailSide::Upper => mc_tail_upper_with(model, n, e, trials, seed, boundary)?,
                    TailSide::Lower => mc_tail_lower_with(model, n, e, trials, seed, boundary)?,
                    TailSide::Aep => mc_tail_aep(model, n, e, trials, seed)?,
                    TailSide::MatchUpper | TailSide::MatchLower => {
                        ctx.guard_len(n)?;
                        mc_tail_match(model, n, e, side, trials, seed)?
                    }
                };
                eprintln!("{side} n={n} eps={e}: p_hat = {:.6} ({} hits)", est.p_hat, est.hit_count);
                rows.push(TailRow {
                    model_id: ctx.id().to_string(),
                    n: est.n,
                    epsilon: est.epsilon,
                    side: side.as_str().to_string(),
                    trials: est.trials,
                    hits: est.hit_count,
                    p_hat: est.p_hat,
                    ci_low: est.ci_low,
                    ci_high: est.ci_high,
                    threshold: est.threshold_t,
                    seed,
                });
            }
        }
    }
    Ok(rows)
}

pub fn tails(ctx: &Ctx, args: TailsArgs) -> Result<()> {
    let mut args: TailsArgs = merge_params(&ctx.params, &args)?;
    fill_tails(&mut args, &["upper"], &[8, 10, 12], 0.25, 1000);
    let rows = run_tails(ctx, &args)?;
    write_rows(&ctx.out, "tails.csv", &rows)?;
    ctx.finish("tails", &args)
}

// ------------------------------------------------------------------ rate-fit

#[derive(Serialize)]
struct FitRow<'a> {
    model_id: &'a str,
    epsilon: f64,
    side: &'static str,
    slope_nats: f64,
    intercept: f64,
    r2: f64,
    points_used: usize,
}

#[derive(Serialize)]
struct AnchorRow<'a> {
    model_id: &'a str,
    epsilon: f64,
    k_half_eps_nats: f64,
}

pub fn rate_fit(ctx: &Ctx, args: RateFitArgs) -> Result<()> {
    let mut args: RateFitArgs = merge_params(&ctx.params, &args)?;
    let rows: Vec<TailRow> = match &args.input {
        Some(path) => {
            let mut reader = csv::Reader::from_path(path)
                .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
            reader
                .deserialize()
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| config_error(format!("{}: {e}", path.display())))?
        }
        None => {
            let mut sweep = args.sweep();
            fill_tails(&mut sweep, &["upper", "lower"], &[8, 10, 12, 14, 16], 0.15, 10_000);
            args = RateFitArgs {
                input: None,
                side: sweep.side.clone(),
                n: sweep.n.clone(),
                eps: sweep.eps.clone(),
                trials: sweep.trials,
                boundary: sweep.boundary.clone(),
            };
            let rows = run_tails(ctx, &sweep)?;
            write_rows(&ctx.out, "tails.csv", &rows)?;
            rows
        }
    };

    // group by (side, epsilon) in order of first appearance
    let mut groups: Vec<((TailSide, f64), Vec<FitPoint>)> = Vec::new();
    for row in &rows {
        let side = TailSide::parse(&row.side).ok_or_else(|| config_error(format!("side \"{}\"", row.side)))?;
        let point = FitPoint { n: row.n, p_hat: row.p_hat, hit_count: row.hits };
        match groups.iter_mut().find(|(key, _)| *key == (side, row.epsilon)) {
            Some((_, pts)) => pts.push(point),
            None => groups.push(((side, row.epsilon), vec![point])),
        }
    }
    let mut fits = Vec::new();
    for ((side, eps), pts) in &groups {
        match fit_rate(pts, *eps, *side) {
            Ok(fit) => {
                println!(
                    "{side:>11} eps={eps}: slope = {:.5} nats, r2 = {:.4}, points = {}",
                    fit.slope_nats, fit.r2, fit.points_used
                );
                fits.push(FitRow {
                    model_id: ctx.id(),
                    epsilon: *eps,
                    side: side.as_str(),
                    slope_nats: fit.slope_nats,
                    intercept: fit.intercept,
                    r2: fit.r2,
                    points_used: fit.points_used,
                });
            }
            Err(e) => eprintln!("warning: {side} eps={eps}: {e}"),
        }
    }
    write_rows(&ctx.out, "fits.csv", &fits)?;

    if let SourceModel::Iid(src) = ctx.model() {
        let mut seen: Vec<f64> = Vec::new();
        let mut anchors = Vec::new();
        for ((_, eps), _) in &groups {
            if seen.contains(eps) {
                continue;
            }
            seen.push(*eps);
            match aep_rates_iid(src.pmf(), eps / 2.0) {
                Ok(rates) => {
                    println!("Cramér anchor k(eps/2) at eps={eps}: {:.5} nats", rates.min_rate());
                    anchors.push(AnchorRow { model_id: ctx.id(), epsilon: *eps, k_half_eps_nats: rates.min_rate() });
                }
                Err(e) => eprintln!("warning: no Cramér anchor: {e}"),
            }
        }
        write_rows(&ctx.out, "anchors.csv", &anchors)?;
    }
    ctx.finish("rate-fit", &args)
}

// ----------------------------------------------------------------------- aep

#[derive(Serialize)]
struct AepRow<'a> {
    model_id: &'a str,
    n: usize,
    delta: f64,
    exact: f64,
    neg_log_over_n: f64,
    mc_p_hat: Option<f64>,
    mc_ci_low: Option<f64>,
    mc_ci_high: Option<f64>,
    trials: u64,
    seed: Option<u64>,
}

pub fn aep(ctx: &Ctx, args: AepArgs) -> Result<()> {
    let mut args: AepArgs = merge_params(&ctx.params, &args)?;
    let ns = args.n.get_or_insert_with(|| vec![10, 20, 50, 100, 200, 400]).clone();
    let deltas = args.delta.get_or_insert_with(|| vec![0.2]).clone();
    let trials = *args.trials.get_or_insert(0);
    positive("n", &ns)?;
    nonempty("delta", &deltas)?;
    let mut rows = Vec::new();
    let mut point = 0u64;
    for &delta in &deltas {
        for &n in &ns {
            let exact = aep_tail_exact(ctx.model(), n, delta)?;
            let (mc, seed) = if trials > 0 {
                let seed = derive_seed(ctx.seed, point);
                (Some(mc_tail_aep(ctx.model(), n, delta, trials, seed)?), Some(seed))
            } else {
                (None, None)
            };
            point += 1;
            rows.push(AepRow {
                model_id: ctx.id(),
                n,
                delta,
                exact,
                neg_log_over_n: -exact.ln() / n as f64,
                mc_p_hat: mc.as_ref().map(|e| e.p_hat),
                mc_ci_low: mc.as_ref().map(|e| e.ci_low),
                mc_ci_high: mc.as_ref().map(|e| e.ci_high),
                trials,
                seed,
            });
            println!("n = {n:4}  delta = {delta}: P = {exact:.6e}  -ln P / n = {:.5}", -exact.ln() / n as f64);
        }
    }
    write_rows(&ctx.out, "aep.csv", &rows)?;
    ctx.finish("aep", &args)
}

// -------------------------------------------------------------------- cramer

#[derive(Serialize)]
struct CramerRow<'a> {
    model_id: &'a str,
    delta_bits: Option<f64>,
    level_nats: f64,
    rate_nats: f64,
    argmax_lambda: f64,
}

pub fn cramer(ctx: &Ctx, args: CramerArgs) -> Result<()> {
    let mut args: CramerArgs = merge_params(&ctx.params, &args)?;
    if args.level.is_none() && args.delta.is_none() {
        args.delta = Some(vec![0.1, 0.2, 0.3]);
    }
    let SourceModel::Iid(src) = ctx.model() else {
        return Err(config_error(format!("cramer needs an iid model, got {}", ctx.model().kind())));
    };
    let pmf = src.pmf();
    let mut rows = Vec::new();
    let h_nats = ctx.model().entropy_rate().nats();
    let mut push = |delta: Option<f64>, level: f64| -> Result<()> {
        let r = cramer_rate_iid(pmf, level)?;
        println!("a = {level:.6} nats: I(a) = {:.6}  lambda* = {:.6}", r.rate, r.argmax_lambda);
        rows.push(CramerRow {
            model_id: ctx.id(),
            delta_bits: delta,
            level_nats: level,
            rate_nats: r.rate,
            argmax_lambda: r.argmax_lambda,
        });
        Ok(())
    };
    for &delta in args.delta.iter().flatten() {
        let shift = delta * std::f64::consts::LN_2;
        push(Some(delta), h_nats + shift)?;
        push(Some(delta), h_nats - shift)?;
    }
    for &level in args.level.iter().flatten() {
        push(None, level)?;
    }
    write_rows(&ctx.out, "cramer.csv", &rows)?;
    ctx.finish("cramer", &args)
}

// ----------------------------------------------------------- kim / kac checks

fn parse_block(text: &str, alphabet_size: usize) -> Result<Vec<u8>> {
    if text.is_empty() {
        return Err(config_error("block must be nonempty"));
    }
    text.chars()
        .map(|c| match c.to_digit(36) {
            Some(d) if (d as usize) < alphabet_size => Ok(d as u8),
            _ => Err(config_error(format!("block \"{text}\": symbol '{c}' outside alphabet of size {alphabet_size}"))),
        })
        .collect()
}

fn block_config(args: &mut BlockArgs, default_block: &str, seed: u64) -> Result<(Vec<String>, ReturnConfig)> {
    let blocks = args.block.get_or_insert_with(|| vec![default_block.to_string()]).clone();
    let samples = *args.samples.get_or_insert(10_000);
    let u_max = *args.u_max.get_or_insert(recur_core::ldp::returns::DEFAULT_U_MAX);
    nonempty("block", &blocks)?;
    if samples == 0 {
        return Err(config_error("samples must be at least 1"));
    }
    Ok((blocks, ReturnConfig { samples, master_seed: seed, u_max }))
}

#[derive(Serialize)]
struct KimRow<'a> {
    model_id: &'a str,
    block: &'a str,
    samples: u64,
    ks: f64,
    #[serde(rename = "mean_U")]
    mean_u: f64,
    censored: u64,
}

pub fn kim(ctx: &Ctx, args: BlockArgs) -> Result<()> {
    let mut args: BlockArgs = merge_params(&ctx.params, &args)?;
    let (blocks, config) = block_config(&mut args, "0000001", ctx.seed)?;
    let mut rows = Vec::new();
    for (i, text) in blocks.iter().enumerate() {
        let block = parse_block(text, ctx.model().alphabet().size())?;
        let cfg = ReturnConfig { master_seed: derive_seed(ctx.seed, i as u64), ..config };
        let r = kim_check(ctx.model(), &block, &cfg)?;
        println!("block {text}: KS = {:.5}  mean U = {:.5}  censored = {}", r.ks_distance, r.mean_u, r.censored);
        if !r.censoring_ok() {
            eprintln!("warning: block {text}: {} censored samples exceed 0.1%", r.censored);
        }
        rows.push(KimRow {
            model_id: ctx.id(),
            block: text,
            samples: r.samples,
            ks: r.ks_distance,
            mean_u: r.mean_u,
            censored: r.censored,
        });
    }
    write_rows(&ctx.out, "kim.csv", &rows)?;
    ctx.finish("kim-check", &args)
}

#[derive(Serialize)]
struct KacRow<'a> {
    model_id: &'a str,
    block: &'a str,
    samples: u64,
    #[serde(rename = "mean_Rn")]
    mean_rn: f64,
    target: f64,
    rel_err: f64,
    censored: u64,
}

pub fn kac(ctx: &Ctx, args: BlockArgs) -> Result<()> {
    let mut args: BlockArgs = merge_params(&ctx.params, &args)?;
    let (blocks, config) = block_config(&mut args, "000", ctx.seed)?;
    let mut rows = Vec::new();
    for (i, text) in blocks.iter().enumerate() {
        let block = parse_block(text, ctx.model().alphabet().size())?;
        let cfg = ReturnConfig { master_seed: derive_seed(ctx.seed, i as u64), ..config };
        let r = kac_check(ctx.model(), &block, &cfg)?;
        println!("block {text}: mean R_n = {:.4}  target = {:.4}  rel_err = {:.5}", r.mean_rn, r.target, r.rel_err);
        rows.push(KacRow {
            model_id: ctx.id(),
            block: text,
            samples: r.samples,
            mean_rn: r.mean_rn,
            target: r.target,
            rel_err: r.rel_err,
            censored: r.censored,
        });
    }
    write_rows(&ctx.out, "kac.csv", &rows)?;
    ctx.finish("kac-check", &args)
}

// -------------------------------------------------------- compare-estimators

#[derive(Serialize)]
struct CompareRow<'a> {
    model_id: &'a str,
    n: usize,
    m: usize,
    #[serde(rename = "Q")]
    q: usize,
    jn_bits: f64,
    jn_flag: &'static str,
    dual_bits: f64,
    dual_flag: &'static str,
    seed: u64,
}

/// Window size paired with block length `n`: `m ≈ 2^{nH}`.
fn paired_window(n: usize, h: f64) -> usize {
    ((n as f64 * h).exp2().round() as usize).max(2)
}

pub fn compare(ctx: &Ctx, args: CompareArgs) -> Result<()> {
    let mut args: CompareArgs = merge_params(&ctx.params, &args)?;
    let ns = args.n.get_or_insert_with(|| vec![8, 10, 12]).clone();
    let c = *args.c.get_or_insert(1.0);
    let k = *args.k.get_or_insert(2.0);
    let runs = *args.runs.get_or_insert(10);
    positive("n", &ns)?;
    if runs == 0 {
        return Err(config_error("runs must be at least 1"));
    }
    if args.horizon == Some(0) {
        return Err(config_error("horizon must be positive"));
    }
    let schedule = schedule(c, k)?;
    let h = ctx.h();
    for &n in &ns {
        let q = schedule.q(n);
        let horizon = args.horizon.unwrap_or(4 * n);
        ctx.guard_len(default_w_max(n, h).saturating_add(q + n))?;
        ctx.guard_len(paired_window(n, h).saturating_add(q + horizon))?;
    }
    let mut rows = Vec::new();
    for r in 0..runs {
        let seed = derive_seed(ctx.seed, r);
        let future = ns.iter().map(|&n| schedule.q(n) + n).max().unwrap();
        let mut grow = GrowingRealization::new(ctx.model(), future, derive_seed(seed, 0), 1);
        for &n in &ns {
            let q = schedule.q(n);
            let jn = estimate_jn_growing(&mut grow, n, schedule, default_w_max(n, h))?;
            let m = paired_window(n, h);
            let horizon = args.horizon.unwrap_or(4 * n);
            let real = ctx.model().generate_two_sided(m, q + horizon, derive_seed(seed, 1 + n as u64));
            let dual = estimate_match_dual(&real, m, q, horizon)?;
            rows.push(CompareRow {
                model_id: ctx.id(),
                n,
                m,
                q,
                jn_bits: jn.estimate,
                jn_flag: jn.flag.as_str(),
                dual_bits: dual.estimate,
                dual_flag: dual.flag.as_str(),
                seed,
            });
        }
    }
    let mut by_n: BTreeMap<usize, (f64, f64, usize)> = BTreeMap::new();
    for row in &rows {
        let e = by_n.entry(row.n).or_default();
        e.0 += row.jn_bits;
        e.1 += row.dual_bits;
        e.2 += 1;
    }
    for (n, (j, d, k)) in by_n {
        println!("n = {n:3}: mean J_n = {:.5}  mean dual = {:.5}  (H = {h:.5})", j / k as f64, d / k as f64);
    }
    write_rows(&ctx.out, "compare.csv", &rows)?;
    ctx.finish("compare-estimators", &args)
}

// ---------------------------------------------------------------------- plot

pub fn plot(ctx: &Ctx, args: PlotArgs) -> Result<()> {
    let mut args: PlotArgs = merge_params(&ctx.params, &args)?;
    let input = args.input.clone().ok_or_else(|| config_error("plot needs --input"))?;
    let x = args.x.get_or_insert_with(|| "n".into()).clone();
    let y = args.y.get_or_insert_with(|| "p_hat".into()).clone();
    let group = args.group.get_or_insert_with(Vec::new).clone();
    let log_y = *args.log_y.get_or_insert(false);
    let svg = args.svg.get_or_insert_with(|| "plot.svg".into()).clone();
    let series = plot::read_series(&input, &x, &group, &y)?;
    let doc = plot::render(&series, &x, &y, log_y)?;
    let path = ctx.out.join(&svg);
    fs::write(&path, doc).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    ctx.finish("plot", &args)
}
