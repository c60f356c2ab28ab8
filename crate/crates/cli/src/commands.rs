//! One function per subcommand. Each returns the primary artifact as text
//! plus a one-line summary for stderr.

use ldpc_de::asymptotics::{avg_limit, avg_term, diff_term, empirical_q_gap, fit_rate};
use ldpc_de::mc::estimate_ber;
use ldpc_de::{run_de, threshold_search, DeConfig, TerminalStatus, ThresholdConfig};
use serde::Serialize;

use crate::config::{RateTerm, RunConfig};

pub struct Artifact {
    pub body: String,
    /// Extra files as (suffix, contents), written next to `--out`.
    pub companions: Vec<(String, String)>,
    pub summary: String,
    pub converged: bool,
}

pub type CmdResult = Result<Artifact, String>;

/// Plain decimal for moderate magnitudes, scientific otherwise.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e6).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn ok(body: String, summary: String) -> Artifact {
    Artifact {
        body,
        companions: Vec::new(),
        summary,
        converged: true,
    }
}

pub fn de(cfg: &RunConfig) -> CmdResult {
    let de_cfg = DeConfig {
        grid: cfg.grid,
        max_iter: cfg.de.max_iter,
        p_e_target: cfg.de.p_e_target,
        stability_stop: cfg.de.stability_stop,
    };
    let trace = run_de(&cfg.channel, &cfg.degrees, cfg.mode, &de_cfg).map_err(|e| e.to_string())?;
    let mut body = String::from("l,p_e,bhattacharyya,q_gap\n");
    for r in &trace.records {
        let gap = r.q_gap.map(num).unwrap_or_default();
        body.push_str(&format!(
            "{},{},{},{}\n",
            r.l,
            num(r.p_e),
            num(r.bhattacharyya),
            gap
        ));
    }
    let status = match trace.status {
        TerminalStatus::Converged => "converged",
        TerminalStatus::StabilityReached => "stability_reached",
        TerminalStatus::IterationCap => "iteration_cap",
    };
    let last = trace.last();
    Ok(Artifact {
        summary: format!(
            "{} DE on {} {}: {status} after {} iterations, p_e = {}",
            cfg.mode,
            cfg.channel,
            cfg.degrees,
            last.l,
            num(last.p_e)
        ),
        converged: trace.status != TerminalStatus::IterationCap,
        ..ok(body, String::new())
    })
}

pub fn threshold(cfg: &RunConfig) -> CmdResult {
    let fam = cfg.family().map_err(|e| e.to_string())?;
    let t = &cfg.threshold;
    let th_cfg = ThresholdConfig {
        grid: cfg.grid,
        iter_cap: t.iter_cap,
        tol: t.tol,
        max_bisections: t.max_bisections,
        p_e_target: t.p_e_target,
    };
    let res = threshold_search(&fam, &cfg.degrees, cfg.mode, &th_cfg).map_err(|e| e.to_string())?;
    #[derive(Serialize)]
    struct Report<'a> {
        #[serde(flatten)]
        result: &'a ldpc_de::ThresholdResult,
        degrees: &'a ldpc_de::DegreeDistribution,
        family: &'a ldpc_de::ChannelFamily,
    }
    let body = json(&Report {
        result: &res,
        degrees: &cfg.degrees,
        family: &fam,
    });
    let summary = format!(
        "{} threshold for {}: {} in [{}, {}] after {} evaluations",
        res.mode,
        cfg.degrees,
        num(res.p_star),
        num(res.lo),
        num(res.hi),
        res.evaluations
    );
    Ok(ok(body, summary))
}

pub fn rates(cfg: &RunConfig) -> CmdResult {
    let p = cfg.basc().map_err(|e| e.to_string())?;
    let r = &cfg.rates;
    let limit = match (r.term, r.k) {
        (RateTerm::Avg, 0) => avg_limit(r.r, p).map_err(|e| e.to_string())?,
        _ => Default::default(),
    };
    let mut body = String::from("delta,k,r,re,im,abs,gap\n");
    let mut points = Vec::new();
    for &d in &r.deltas {
        let v = match r.term {
            RateTerm::Diff => diff_term(d, r.k, r.r, p),
            RateTerm::Avg => avg_term(d, r.k, r.r, p),
        }
        .map_err(|e| e.to_string())?;
        let gap = (v - limit).norm();
        points.push((d, gap));
        body.push_str(&format!(
            "{d},{},{},{},{},{},{}\n",
            r.k,
            num(r.r),
            num(v.re),
            num(v.im),
            num(v.norm()),
            num(gap)
        ));
    }
    #[derive(Serialize)]
    struct FitReport {
        model: Option<ldpc_de::asymptotics::RateModel>,
        parameter: Option<f64>,
        residual: Option<f64>,
        exponential: Option<ldpc_de::asymptotics::ModelFit>,
        power_law: Option<ldpc_de::asymptotics::ModelFit>,
        #[serde(skip_serializing_if = "Option::is_none")]
        note: Option<String>,
    }
    let (report, summary) = match fit_rate(&points) {
        Ok(fit) => {
            let best = *fit.best();
            let summary = format!(
                "{:?} fit of the gap: parameter {}, residual {}",
                best.model,
                num(best.parameter),
                num(best.residual)
            );
            (
                FitReport {
                    model: Some(best.model),
                    parameter: Some(best.parameter),
                    residual: Some(best.residual),
                    exponential: Some(fit.exponential),
                    power_law: Some(fit.power_law),
                    note: None,
                },
                summary,
            )
        }
        Err(e) => (
            FitReport {
                model: None,
                parameter: None,
                residual: None,
                exponential: None,
                power_law: None,
                note: Some(e.to_string()),
            },
            format!("no fit: {e}"),
        ),
    };
    Ok(Artifact {
        companions: vec![("fit.json".into(), json(&report))],
        ..ok(body, summary)
    })
}

pub fn qgap(cfg: &RunConfig) -> CmdResult {
    let pair = cfg
        .channel
        .initial_pair(cfg.grid)
        .map_err(|e| e.to_string())?;
    let rows = empirical_q_gap(&pair, cfg.degrees.rho_base(), &cfg.qgap.deltas)
        .map_err(|e| e.to_string())?;
    let mut body = String::from("delta,d01,d_avg\n");
    for row in &rows {
        body.push_str(&format!(
            "{},{},{}\n",
            row.delta,
            num(row.d01),
            num(row.d_avg)
        ));
    }
    let last = rows.last().expect("validated non-empty");
    let summary = format!(
        "q-gap on {}: d01 = {} at delta {}",
        cfg.channel,
        num(last.d01),
        last.delta
    );
    Ok(ok(body, summary))
}

pub fn mc(cfg: &RunConfig) -> CmdResult {
    let mc_cfg = cfg.mc_config();
    let est = estimate_ber(&mc_cfg, cfg.mc.workers).map_err(|e| e.to_string())?;
    #[derive(Serialize)]
    struct Report<'a> {
        ber: f64,
        stderr: f64,
        blocks: usize,
        bit_errors: usize,
        bits: usize,
        n: usize,
        d_v: usize,
        d_c: usize,
        mode: ldpc_de::mc::McMode,
        bp_iterations: usize,
        channel: &'a ldpc_de::Channel,
        seed: u64,
    }
    let body = json(&Report {
        ber: est.ber,
        stderr: est.stderr,
        blocks: est.blocks,
        bit_errors: est.bit_errors,
        bits: est.bits,
        n: mc_cfg.n,
        d_v: mc_cfg.d_v,
        d_c: mc_cfg.d_c,
        mode: mc_cfg.mode,
        bp_iterations: mc_cfg.bp_iterations,
        channel: &mc_cfg.channel,
        seed: mc_cfg.seed,
    });
    let mut csv = String::from("block,bit_errors,bits\n");
    for (i, b) in est.per_block.iter().enumerate() {
        csv.push_str(&format!("{i},{},{}\n", b.bit_errors, b.bits));
    }
    let summary = format!(
        "{} BER on {}: {} ± {} over {} blocks",
        mc_cfg.mode,
        mc_cfg.channel,
        num(est.ber),
        num(est.stderr),
        est.blocks
    );
    Ok(Artifact {
        companions: vec![("blocks.csv".into(), csv)],
        ..ok(body, summary)
    })
}
