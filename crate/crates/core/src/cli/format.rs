//! Number formatting and the CSV schema.

use crate::analytic::BoundPair;
use crate::montecarlo::OutageEstimate;
use crate::scenario::ScenarioConfig;

/// Columns of CSV schema v1.
pub const CSV_HEADER: &str = "protocol,n,m,gamma_r,gamma_e,tau,alpha,a,b,r0,eps_t,eps_s,trials,seed,\
tx_bound_raw,tx_bound,sec_bound_raw,sec_bound,tx_phat,tx_ci_lo,tx_ci_hi,sec_phat,sec_ci_lo,sec_ci_hi";

/// Extra columns appended by `validate`.
pub const VALIDATE_COLUMNS: &str = "tx_pass,tx_slack,sec_pass,sec_slack";

/// `printf("%.9g")`: nine significant digits, trailing zeros trimmed.
pub fn g9(x: f64) -> String {
    const DIGITS: i32 = 9;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    // exponent after rounding to DIGITS significant digits
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= DIGITS {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A real that may be infinite, for human-readable output.
pub fn g9_or(x: f64, infinite: &str) -> String {
    if x.is_infinite() {
        infinite.to_string()
    } else {
        g9(x)
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(g9).unwrap_or_default()
}

/// Empirical part of a CSV row.
#[derive(Debug, Clone, Copy)]
pub struct Empirical {
    pub trials: u64,
    pub seed: u64,
    pub tx: OutageEstimate,
    pub sec: OutageEstimate,
}

/// One schema-v1 row, without a trailing newline.
pub fn csv_row(cfg: &ScenarioConfig, tx: BoundPair, sec: BoundPair, emp: Option<&Empirical>) -> String {
    let s = &cfg.equal;
    let geo = if cfg.protocol.is_geometric() { cfg.geo } else { None };
    let mut cells = vec![
        cfg.protocol.id().to_string(),
        s.n.to_string(),
        s.m.to_string(),
        g9(s.gamma_r),
        g9(s.gamma_e),
        g9(s.tau),
        opt(geo.map(|g| g.alpha)),
        opt(geo.map(|g| g.a)),
        opt(geo.map(|g| g.b)),
        opt(geo.map(|g| g.r0)),
        opt(cfg.eps_t),
        opt(cfg.eps_s),
    ];
    match emp {
        Some(e) => cells.extend([e.trials.to_string(), e.seed.to_string()]),
        None => cells.extend([String::new(), String::new()]),
    }
    cells.extend([g9(tx.raw), g9(tx.clamped), g9(sec.raw), g9(sec.clamped)]);
    match emp {
        Some(e) => {
            for est in [e.tx, e.sec] {
                cells.extend([g9(est.p_hat), g9(est.ci_low), g9(est.ci_high)]);
            }
        }
        None => cells.extend(std::iter::repeat(String::new()).take(6)),
    }
    cells.join(",")
}
