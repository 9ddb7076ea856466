//! Closed-form outage bounds, τ windows and eavesdropper-tolerance limits,
//! plus the regularized geometric constants of the distance-dependent model.
//!
//! Conventions shared by every function here:
//!
//! * `c(ε) = 1 − √(1−ε)` is the per-hop budget that keeps `2c − c²` at ε.
//! * A τ upper endpoint of `+∞` means unconstrained (ε_t = 1). A τ lower
//!   endpoint of `+∞` means no finite τ reaches the secrecy target.
//! * Tolerance limits are reals; flooring to a count is the caller's job.

pub mod quadrature;

use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

use crate::scenario::{Protocol, ScenarioGeo};
pub use quadrature::QuadratureError;

/// Default radius of the disc cut out around each singular point.
pub const DEFAULT_EXCLUSION_RADIUS: f64 = 1e-3;
/// Requested relative accuracy of the geometric integrals.
pub const QUADRATURE_REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error("{name} must be in [0, 1], got {value}")]
    NotAProbability { name: &'static str, value: f64 },
    #[error("exclusion radius must be in (0, 0.5), got {0}")]
    BadExclusionRadius(f64),
    #[error("protocol {0} has no equal path-loss window")]
    WrongProtocol(Protocol),
    #[error("geometric constants were computed for {computed}, scenario has {scenario}")]
    ConstantsMismatch { computed: String, scenario: String },
    #[error("reliability infeasible: empty-region probability {theta} exceeds eps_t = {eps_t}")]
    ReliabilityInfeasible { theta: f64, eps_t: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

fn probability(name: &'static str, value: f64) -> Result<f64, AnalyticError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(AnalyticError::NotAProbability { name, value })
    }
}

/// A bound as the formula gives it, and clipped to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundPair {
    pub raw: f64,
    pub clamped: f64,
}

impl BoundPair {
    pub fn new(raw: f64) -> BoundPair {
        BoundPair {
            raw,
            clamped: raw.clamp(0.0, 1.0),
        }
    }
}

/// Why a τ window is empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Infeasibility {
    /// The empty-region probability alone exceeds ε_t.
    Reliability,
    /// Eavesdroppers inside r₀ alone exceed the secrecy budget.
    NearEavesdropper,
    /// No finite τ brings the secrecy bound under ε_s.
    SecrecyUnreachable,
    /// Both endpoints are finite but `tau_min > tau_max`.
    Empty,
}

impl fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Infeasibility::Reliability => "empty selection region exceeds eps_t",
            Infeasibility::NearEavesdropper => "near-eavesdropper budget",
            Infeasibility::SecrecyUnreachable => "secrecy target unreachable",
            Infeasibility::Empty => "tau_max < tau_min",
        })
    }
}

/// Admissible range of the noise threshold τ. An infinite `tau_min` is
/// never feasible, even against an unbounded `tau_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauWindow {
    pub tau_min: f64,
    pub tau_max: f64,
    pub feasible: bool,
    pub cause: Option<Infeasibility>,
}

impl TauWindow {
    fn from_endpoints(tau_min: f64, tau_max: f64, forced: Option<Infeasibility>) -> TauWindow {
        let cause = forced.or_else(|| {
            if tau_min == f64::INFINITY {
                Some(Infeasibility::SecrecyUnreachable)
            } else if tau_min > tau_max {
                Some(Infeasibility::Empty)
            } else {
                None
            }
        });
        TauWindow {
            tau_min,
            tau_max,
            feasible: cause.is_none(),
            cause,
        }
    }

    /// Which endpoint is tighter relative to the no-constraint case.
    pub fn binding(&self) -> &'static str {
        match (self.tau_min > 0.0, self.tau_max.is_finite()) {
            (true, true) => "both",
            (true, false) => "secrecy",
            (false, true) => "reliability",
            (false, false) => "none",
        }
    }
}

/// How τ_max is obtained from the reliability constraint `τ(1 − e^{−τ}) ≤ C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TauMethod {
    /// The closed form, which replaces `1 − e^{−τ}` by τ.
    #[default]
    Taylor,
    /// Bisection on the exact constraint.
    Exact,
}

impl TauMethod {
    fn solve(self, c: f64) -> f64 {
        if c <= 0.0 {
            return 0.0;
        }
        match self {
            TauMethod::Taylor => c.sqrt(),
            TauMethod::Exact => solve_tau_exact(c),
        }
    }
}

/// `1 − √(1−ε)` without cancellation for small ε.
pub fn per_hop_budget(eps: f64) -> f64 {
    eps / (1.0 + (1.0 - eps).sqrt())
}

/// Expected fraction of other relays that join a noise set.
pub(crate) fn join_probability(tau: f64) -> f64 {
    -(-tau).exp_m1()
}

/// `2u − u²`, the two-hop union of two equal per-hop terms.
pub(crate) fn two_hop(u: f64) -> f64 {
    u * (2.0 - u)
}

/// Largest τ with `τ(1 − e^{−τ}) ≤ c`.
pub fn solve_tau_exact(c: f64) -> f64 {
    if c <= 0.0 {
        return 0.0;
    }
    if c == f64::INFINITY {
        return f64::INFINITY;
    }
    let h = |t: f64| t * join_probability(t);
    // h(t) ≤ t² gives the lower end; h(t) ≥ t − 1/e gives the upper end
    let (mut lo, mut hi) = (c.sqrt(), c + 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) <= c {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// `p₁ + p₂ − p₁p₂`.
pub fn union_outage(p1: f64, p2: f64) -> Result<f64, AnalyticError> {
    let p1 = probability("p1", p1)?;
    let p2 = probability("p2", p2)?;
    Ok(p1 + p2 - p1 * p2)
}

/// Per-hop transmission term of the optimal-selection protocol.
pub fn lemma1_per_hop(n: u32, gamma_r: f64, tau: f64) -> f64 {
    let x = 2.0 * gamma_r * f64::from(n - 1) * join_probability(tau) * tau;
    (-(-x).exp_m1()).powi(n as i32)
}

pub fn lemma1_transmission_bound(n: u32, gamma_r: f64, tau: f64) -> BoundPair {
    BoundPair::new(two_hop(lemma1_per_hop(n, gamma_r, tau)))
}

/// Per-hop secrecy term shared by the equal path-loss protocols.
pub fn lemma1_secrecy_per_hop(n: u32, m: u32, gamma_e: f64, tau: f64) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let exponent = f64::from(n - 1) * join_probability(tau);
    f64::from(m) * (-exponent * gamma_e.ln_1p()).exp()
}

pub fn lemma1_secrecy_bound(n: u32, m: u32, gamma_e: f64, tau: f64) -> BoundPair {
    BoundPair::new(two_hop(lemma1_secrecy_per_hop(n, m, gamma_e, tau)))
}

/// Per-hop transmission term of the random-selection protocol.
pub fn lemma3_per_hop(n: u32, gamma_r: f64, tau: f64) -> f64 {
    let x = gamma_r * f64::from(n - 1) * join_probability(tau) * tau;
    -(-x).exp_m1()
}

pub fn lemma3_transmission_bound(n: u32, gamma_r: f64, tau: f64) -> BoundPair {
    BoundPair::new(two_hop(lemma3_per_hop(n, gamma_r, tau)))
}

/// Random selection has the same secrecy bound as optimal selection.
pub fn lemma3_secrecy_bound(n: u32, m: u32, gamma_e: f64, tau: f64) -> BoundPair {
    lemma1_secrecy_bound(n, m, gamma_e, tau)
}

/// Right-hand side `C` of `τ(1 − e^{−τ}) ≤ C` for optimal selection.
fn lemma2_constraint(n: u32, gamma_r: f64, eps_t: f64) -> f64 {
    let c = per_hop_budget(eps_t);
    // 1 − c^{1/n}
    let gap = -(c.ln() / f64::from(n)).exp_m1();
    -gap.ln() / (2.0 * gamma_r * f64::from(n - 1))
}

pub fn lemma2_tau_max(n: u32, gamma_r: f64, eps_t: f64) -> Result<f64, AnalyticError> {
    lemma2_tau_max_with(n, gamma_r, eps_t, TauMethod::Taylor)
}

pub fn lemma2_tau_max_exact(n: u32, gamma_r: f64, eps_t: f64) -> Result<f64, AnalyticError> {
    lemma2_tau_max_with(n, gamma_r, eps_t, TauMethod::Exact)
}

pub fn lemma2_tau_max_with(n: u32, gamma_r: f64, eps_t: f64, method: TauMethod) -> Result<f64, AnalyticError> {
    let eps_t = probability("eps_t", eps_t)?;
    Ok(method.solve(lemma2_constraint(n, gamma_r, eps_t)))
}

/// Smallest τ meeting the secrecy target with equal path loss; `+∞` when
/// none does.
pub fn lemma2_tau_min(n: u32, gamma_e: f64, eps_s: f64, m: u32) -> Result<f64, AnalyticError> {
    let eps_s = probability("eps_s", eps_s)?;
    if m == 0 {
        return Ok(0.0);
    }
    let bracket = 1.0 + (per_hop_budget(eps_s) / f64::from(m)).ln() / (f64::from(n - 1) * gamma_e.ln_1p());
    if bracket <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((-bracket.ln()).max(0.0))
}

/// Right-hand side `C` of `τ(1 − e^{−τ}) ≤ C` for random selection.
fn lemma4_constraint(n: u32, gamma_r: f64, eps_t: f64) -> f64 {
    -(-eps_t).ln_1p() / (2.0 * gamma_r * f64::from(n - 1))
}

pub fn lemma4_tau_max(n: u32, gamma_r: f64, eps_t: f64) -> Result<f64, AnalyticError> {
    lemma4_tau_max_with(n, gamma_r, eps_t, TauMethod::Taylor)
}

pub fn lemma4_tau_max_exact(n: u32, gamma_r: f64, eps_t: f64) -> Result<f64, AnalyticError> {
    lemma4_tau_max_with(n, gamma_r, eps_t, TauMethod::Exact)
}

pub fn lemma4_tau_max_with(n: u32, gamma_r: f64, eps_t: f64, method: TauMethod) -> Result<f64, AnalyticError> {
    let eps_t = probability("eps_t", eps_t)?;
    Ok(method.solve(lemma4_constraint(n, gamma_r, eps_t)))
}

pub fn lemma4_tau_min(n: u32, gamma_e: f64, eps_s: f64, m: u32) -> Result<f64, AnalyticError> {
    lemma2_tau_min(n, gamma_e, eps_s, m)
}

/// `c(ε_s)·(1+γ_E)^{(n−1)·g(τ_max)}` where `g(τ) = τ` for the closed form
/// and `1 − e^{−τ}` when τ_max is solved exactly.
fn equal_m_max(n: u32, gamma_e: f64, eps_s: f64, tau_max: f64, method: TauMethod) -> f64 {
    let c = per_hop_budget(eps_s);
    if c == 0.0 {
        return 0.0;
    }
    let reach = match method {
        TauMethod::Taylor => tau_max,
        TauMethod::Exact => join_probability(tau_max),
    };
    c * (f64::from(n - 1) * reach * gamma_e.ln_1p()).exp()
}

pub fn theorem1_m_max(n: u32, gamma_r: f64, gamma_e: f64, eps_t: f64, eps_s: f64) -> Result<f64, AnalyticError> {
    theorem1_m_max_with(n, gamma_r, gamma_e, eps_t, eps_s, TauMethod::Taylor)
}

pub fn theorem1_m_max_with(
    n: u32,
    gamma_r: f64,
    gamma_e: f64,
    eps_t: f64,
    eps_s: f64,
    method: TauMethod,
) -> Result<f64, AnalyticError> {
    let eps_s = probability("eps_s", eps_s)?;
    let tau_max = lemma2_tau_max_with(n, gamma_r, eps_t, method)?;
    Ok(equal_m_max(n, gamma_e, eps_s, tau_max, method))
}

pub fn theorem2_m_max(n: u32, gamma_r: f64, gamma_e: f64, eps_t: f64, eps_s: f64) -> Result<f64, AnalyticError> {
    theorem2_m_max_with(n, gamma_r, gamma_e, eps_t, eps_s, TauMethod::Taylor)
}

pub fn theorem2_m_max_with(
    n: u32,
    gamma_r: f64,
    gamma_e: f64,
    eps_t: f64,
    eps_s: f64,
    method: TauMethod,
) -> Result<f64, AnalyticError> {
    let eps_s = probability("eps_s", eps_s)?;
    let tau_max = lemma4_tau_max_with(n, gamma_r, eps_t, method)?;
    Ok(equal_m_max(n, gamma_e, eps_s, tau_max, method))
}

/// τ window for the equal path-loss protocols.
#[allow(clippy::too_many_arguments)]
pub fn tau_window_protocol(
    protocol: Protocol,
    n: u32,
    gamma_r: f64,
    gamma_e: f64,
    eps_t: f64,
    eps_s: f64,
    m: u32,
    method: TauMethod,
) -> Result<TauWindow, AnalyticError> {
    let tau_max = match protocol {
        Protocol::Optimal => lemma2_tau_max_with(n, gamma_r, eps_t, method)?,
        Protocol::Random => lemma4_tau_max_with(n, gamma_r, eps_t, method)?,
        Protocol::Region => return Err(AnalyticError::WrongProtocol(protocol)),
    };
    let tau_min = lemma2_tau_min(n, gamma_e, eps_s, m)?;
    Ok(TauWindow::from_endpoints(tau_min, tau_max, None))
}

/// Constants of the distance-dependent bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoConstants {
    /// Probability that no relay falls inside the selection region.
    pub theta: f64,
    /// Interference integral around the square's centre.
    pub varphi1: f64,
    /// Interference integral around the destination.
    pub varphi2: f64,
    /// Worst-case source-to-relay distance.
    pub phi: f64,
    /// Interference integral around a corner.
    pub psi: f64,
    pub exclusion_radius: f64,
    pub n: u32,
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
}

impl GeoConstants {
    fn check(&self, geo: &ScenarioGeo) -> Result<(), AnalyticError> {
        let mine = (self.n, self.a, self.b, self.alpha);
        let theirs = (geo.base.n, geo.a, geo.b, geo.alpha);
        if mine == theirs {
            Ok(())
        } else {
            Err(AnalyticError::ConstantsMismatch {
                computed: format!("n={} a={} b={} alpha={}", mine.0, mine.1, mine.2, mine.3),
                scenario: format!("n={} a={} b={} alpha={}", theirs.0, theirs.1, theirs.2, theirs.3),
            })
        }
    }

    /// `(φ₁ + φ₂)·φ^α`, the interference scale of the reliability bound.
    fn interference_scale(&self) -> f64 {
        (self.varphi1 + self.varphi2) * self.phi.powf(self.alpha)
    }
}

/// `[1 − (1−2a)(1−2b)]ⁿ`.
pub fn empty_region_probability(n: u32, a: f64, b: f64) -> f64 {
    let outside = 2.0 * a + 2.0 * b - 4.0 * a * b;
    outside.powi(n as i32)
}

pub fn geo_constants(n: u32, a: f64, b: f64, alpha: f64, exclusion_radius: f64) -> Result<GeoConstants, AnalyticError> {
    if !(exclusion_radius > 0.0 && exclusion_radius < 0.5) {
        return Err(AnalyticError::BadExclusionRadius(exclusion_radius));
    }
    let integral = |centre| {
        quadrature::punctured_square_integral(centre, alpha, exclusion_radius, QUADRATURE_REL_TOL).map(|i| i.value)
    };
    Ok(GeoConstants {
        theta: empty_region_probability(n, a, b),
        varphi1: integral((0.5, 0.5))?,
        varphi2: integral((1.0, 0.5))?,
        phi: (1.0 - a).hypot(0.5 - b),
        psi: integral((0.0, 0.0))?,
        exclusion_radius,
        n,
        a,
        b,
        alpha,
    })
}

/// Per-eavesdropper, per-hop secrecy term of the distance-dependent model.
pub fn lemma5_secrecy_per_hop(geo: &ScenarioGeo, consts: &GeoConstants) -> f64 {
    let s = &geo.base;
    let near = PI * geo.r0 * geo.r0;
    let exponent = f64::from(s.n - 1) * join_probability(s.tau);
    let far = (-exponent * (s.gamma_e * consts.psi * geo.r0.powf(geo.alpha)).ln_1p()).exp();
    near + far * (1.0 - near)
}

pub fn lemma5_transmission_bound(geo: &ScenarioGeo, consts: &GeoConstants) -> Result<BoundPair, AnalyticError> {
    consts.check(geo)?;
    let s = &geo.base;
    let y = s.gamma_r * s.tau * f64::from(s.n - 1) * join_probability(s.tau) * consts.interference_scale();
    let theta = consts.theta;
    Ok(BoundPair::new(-(-y).exp_m1() * (1.0 - theta) + theta))
}

pub fn lemma5_secrecy_bound(geo: &ScenarioGeo, consts: &GeoConstants) -> Result<BoundPair, AnalyticError> {
    consts.check(geo)?;
    if geo.base.m == 0 {
        return Ok(BoundPair::new(0.0));
    }
    let u = f64::from(geo.base.m) * lemma5_secrecy_per_hop(geo, consts);
    Ok(BoundPair::new(two_hop(u)))
}

/// `C` in `τ(1 − e^{−τ}) ≤ C`; `None` when ϑ > ε_t.
fn lemma6_constraint(geo: &ScenarioGeo, eps_t: f64, consts: &GeoConstants) -> Option<f64> {
    if eps_t == 1.0 {
        return Some(f64::INFINITY);
    }
    if consts.theta > eps_t {
        return None;
    }
    // −ln((1−ε_t)/(1−ϑ))
    let log_ratio = (-consts.theta).ln_1p() - (-eps_t).ln_1p();
    let s = &geo.base;
    Some(log_ratio / (s.gamma_r * f64::from(s.n - 1) * consts.interference_scale()))
}

fn lemma6_tau_min(geo: &ScenarioGeo, eps_s: f64, consts: &GeoConstants) -> (f64, Option<Infeasibility>) {
    let s = &geo.base;
    if s.m == 0 {
        return (0.0, None);
    }
    let near = PI * geo.r0 * geo.r0;
    let share = per_hop_budget(eps_s) / f64::from(s.m) - near;
    if share <= 0.0 {
        return (f64::INFINITY, Some(Infeasibility::NearEavesdropper));
    }
    let ratio = share / (1.0 - near);
    if ratio >= 1.0 {
        return (0.0, None);
    }
    let jam = f64::from(s.n - 1) * (s.gamma_e * consts.psi * geo.r0.powf(geo.alpha)).ln_1p();
    let bracket = 1.0 + ratio.ln() / jam;
    if bracket <= 0.0 {
        return (f64::INFINITY, Some(Infeasibility::SecrecyUnreachable));
    }
    ((-bracket.ln()).max(0.0), None)
}

pub fn lemma6_window(
    geo: &ScenarioGeo,
    eps_t: f64,
    eps_s: f64,
    consts: &GeoConstants,
    method: TauMethod,
) -> Result<TauWindow, AnalyticError> {
    consts.check(geo)?;
    let eps_t = probability("eps_t", eps_t)?;
    let eps_s = probability("eps_s", eps_s)?;
    let (tau_min, secrecy_cause) = lemma6_tau_min(geo, eps_s, consts);
    match lemma6_constraint(geo, eps_t, consts) {
        None => Ok(TauWindow::from_endpoints(
            tau_min,
            f64::NEG_INFINITY,
            Some(Infeasibility::Reliability),
        )),
        Some(c) => Ok(TauWindow::from_endpoints(tau_min, method.solve(c), secrecy_cause)),
    }
}

pub fn theorem3_m_max(
    geo: &ScenarioGeo,
    eps_t: f64,
    eps_s: f64,
    consts: &GeoConstants,
    method: TauMethod,
) -> Result<f64, AnalyticError> {
    consts.check(geo)?;
    let eps_t = probability("eps_t", eps_t)?;
    let eps_s = probability("eps_s", eps_s)?;
    let c = lemma6_constraint(geo, eps_t, consts).ok_or(AnalyticError::ReliabilityInfeasible {
        theta: consts.theta,
        eps_t,
    })?;
    let tau_max = method.solve(c);
    let reach = match method {
        TauMethod::Taylor => tau_max,
        TauMethod::Exact => join_probability(tau_max),
    };
    let jam = (geo.base.gamma_e * consts.psi * geo.r0.powf(geo.alpha)).ln_1p();
    let omega = if jam == 0.0 {
        1.0
    } else {
        (-f64::from(geo.base.n - 1) * reach * jam).exp()
    };
    let near = PI * geo.r0 * geo.r0;
    Ok(per_hop_budget(eps_s) / (near + (1.0 - near) * omega))
}
