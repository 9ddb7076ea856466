//! The outage bounds, τ windows and eavesdropper limits written out
//! directly in double-double arithmetic.

use super::dd::Dd;

fn d(x: f64) -> Dd {
    Dd::from(x)
}

fn du(x: u32) -> Dd {
    Dd::from(f64::from(x))
}

/// `1 − √(1−ε)`.
pub fn budget(eps: f64) -> Dd {
    Dd::ONE - (Dd::ONE - d(eps)).sqrt()
}

/// `1 − e^{−τ}`.
pub fn join(tau: Dd) -> Dd {
    Dd::ONE - (-tau).exp()
}

/// `1 − (1 − u)²`.
pub fn union2(u: Dd) -> Dd {
    Dd::ONE - (Dd::ONE - u).sqr()
}

pub fn l1_tx(n: u32, gamma_r: f64, tau: f64) -> f64 {
    let x = d(2.0) * d(gamma_r) * du(n - 1) * join(d(tau)) * d(tau);
    union2((Dd::ONE - (-x).exp()).powi(n)).to_f64()
}

fn sec_per_hop(n: u32, m: u32, gamma_e: f64, tau: f64) -> Dd {
    let x = Dd::ONE / (Dd::ONE + d(gamma_e));
    du(m) * x.powf(du(n - 1) * join(d(tau)))
}

pub fn l1_sec(n: u32, m: u32, gamma_e: f64, tau: f64) -> f64 {
    union2(sec_per_hop(n, m, gamma_e, tau)).to_f64()
}

pub fn l3_tx(n: u32, gamma_r: f64, tau: f64) -> f64 {
    let x = d(gamma_r) * du(n - 1) * join(d(tau)) * d(tau);
    union2(Dd::ONE - (-x).exp()).to_f64()
}

/// Largest τ with `τ(1 − e^{−τ}) ≤ c`, by Newton's method.
pub fn solve_exact(c: Dd) -> Dd {
    if c.hi <= 0.0 {
        return Dd::ZERO;
    }
    let mut t = if c.hi < 1.0 { c.sqrt() } else { c + Dd::ONE };
    for _ in 0..100 {
        let e = (-t).exp();
        let h = t * (Dd::ONE - e) - c;
        let dh = Dd::ONE - e + t * e;
        let step = h / dh;
        t = t - step;
        if step.hi.abs() <= 1e-33 * t.hi.abs() {
            break;
        }
    }
    t
}

fn solve(c: Dd, exact: bool) -> Dd {
    if c.hi <= 0.0 {
        Dd::ZERO
    } else if exact {
        solve_exact(c)
    } else {
        c.sqrt()
    }
}

fn l2_constraint(n: u32, gamma_r: f64, eps_t: f64) -> Dd {
    let root = budget(eps_t).powf(du(1) / du(n));
    -(Dd::ONE - root).ln() / (d(2.0) * d(gamma_r) * du(n - 1))
}

fn l4_constraint(n: u32, gamma_r: f64, eps_t: f64) -> Dd {
    -(Dd::ONE - d(eps_t)).ln() / (d(2.0) * d(gamma_r) * du(n - 1))
}

pub fn l2_tau_max(n: u32, gamma_r: f64, eps_t: f64, exact: bool) -> f64 {
    solve(l2_constraint(n, gamma_r, eps_t), exact).to_f64()
}

pub fn l4_tau_max(n: u32, gamma_r: f64, eps_t: f64, exact: bool) -> f64 {
    solve(l4_constraint(n, gamma_r, eps_t), exact).to_f64()
}

/// `τ` solving `1 − e^{−τ} = q`, with 0 below and ∞ at or above 1.
fn from_join(q: Dd) -> f64 {
    if q.hi <= 0.0 {
        0.0
    } else if q.hi >= 1.0 {
        f64::INFINITY
    } else {
        (-(Dd::ONE - q).ln()).to_f64()
    }
}

pub fn l2_tau_min(n: u32, gamma_e: f64, eps_s: f64, m: u32) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let q = (du(m) / budget(eps_s)).ln() / (du(n - 1) * (Dd::ONE + d(gamma_e)).ln());
    from_join(q)
}

fn m_max(n: u32, gamma_e: f64, eps_s: f64, tau_max: Dd, exact: bool) -> f64 {
    let reach = if exact { join(tau_max) } else { tau_max };
    (budget(eps_s) * (Dd::ONE + d(gamma_e)).powf(du(n - 1) * reach)).to_f64()
}

pub fn theorem1(n: u32, gamma_r: f64, gamma_e: f64, eps_t: f64, eps_s: f64, exact: bool) -> f64 {
    m_max(n, gamma_e, eps_s, solve(l2_constraint(n, gamma_r, eps_t), exact), exact)
}

pub fn theorem2(n: u32, gamma_r: f64, gamma_e: f64, eps_t: f64, eps_s: f64, exact: bool) -> f64 {
    m_max(n, gamma_e, eps_s, solve(l4_constraint(n, gamma_r, eps_t), exact), exact)
}

/// Distance-dependent scenario with its integrals supplied from outside.
#[derive(Debug, Clone, Copy)]
pub struct Geo {
    pub n: u32,
    pub m: u32,
    pub gamma_r: f64,
    pub gamma_e: f64,
    pub tau: f64,
    pub alpha: f64,
    pub a: f64,
    pub b: f64,
    pub r0: f64,
    pub varphi1: f64,
    pub varphi2: f64,
    pub psi: f64,
}

impl Geo {
    pub fn theta(&self) -> Dd {
        let inside = (Dd::ONE - d(2.0) * d(self.a)) * (Dd::ONE - d(2.0) * d(self.b));
        (Dd::ONE - inside).powi(self.n)
    }

    pub fn phi(&self) -> Dd {
        let dx = Dd::ONE - d(self.a);
        let dy = d(0.5) - d(self.b);
        (dx.sqr() + dy.sqr()).sqrt()
    }

    fn near(&self) -> Dd {
        Dd::pi() * d(self.r0).sqr()
    }

    fn jam_base(&self) -> Dd {
        Dd::ONE + d(self.gamma_e) * d(self.psi) * d(self.r0).powf(d(self.alpha))
    }

    fn interference(&self) -> Dd {
        (d(self.varphi1) + d(self.varphi2)) * self.phi().powf(d(self.alpha))
    }

    pub fn l5_tx(&self) -> f64 {
        let theta = self.theta();
        let y = d(self.gamma_r) * d(self.tau) * du(self.n - 1) * join(d(self.tau)) * self.interference();
        ((Dd::ONE - (-y).exp()) * (Dd::ONE - theta) + theta).to_f64()
    }

    pub fn l5_sec(&self) -> f64 {
        if self.m == 0 {
            return 0.0;
        }
        let near = self.near();
        let far = self.jam_base().recip().powf(du(self.n - 1) * join(d(self.tau)));
        union2(du(self.m) * (near + far * (Dd::ONE - near))).to_f64()
    }

    /// `None` when ϑ > ε_t.
    fn constraint(&self, eps_t: f64) -> Option<Dd> {
        let theta = self.theta();
        if theta.hi > eps_t {
            return None;
        }
        let ratio = (Dd::ONE - theta) / (Dd::ONE - d(eps_t));
        Some(ratio.ln() / (d(self.gamma_r) * du(self.n - 1) * self.interference()))
    }

    /// `(tau_min, tau_max)`; `tau_max` is `None` when reliability-infeasible.
    pub fn l6(&self, eps_t: f64, eps_s: f64, exact: bool) -> (f64, Option<f64>) {
        let tau_max = self.constraint(eps_t).map(|c| solve(c, exact).to_f64());
        let tau_min = if self.m == 0 {
            0.0
        } else {
            let near = self.near();
            let share = budget(eps_s) / du(self.m) - near;
            if share.hi <= 0.0 {
                f64::INFINITY
            } else {
                let ratio = share / (Dd::ONE - near);
                if ratio.hi >= 1.0 {
                    0.0
                } else {
                    let q = -ratio.ln() / (du(self.n - 1) * self.jam_base().ln());
                    from_join(q)
                }
            }
        };
        (tau_min, tau_max)
    }

    pub fn theorem3(&self, eps_t: f64, eps_s: f64, exact: bool) -> Option<f64> {
        let c = self.constraint(eps_t)?;
        let tau_max = solve(c, exact);
        let reach = if exact { join(tau_max) } else { tau_max };
        let omega = self.jam_base().recip().powf(du(self.n - 1) * reach);
        let near = self.near();
        Some((budget(eps_s) / (near + (Dd::ONE - near) * omega)).to_f64())
    }
}
