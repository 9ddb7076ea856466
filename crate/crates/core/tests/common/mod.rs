#![allow(dead_code)]

pub mod closed_forms;
pub mod dd;
pub mod riemann;

/// `|got − want| / |want|`, with exact agreement required at 0 and ±∞.
pub fn rel_err(got: f64, want: f64) -> f64 {
    if got == want {
        0.0
    } else if want == 0.0 || want.is_infinite() || got.is_nan() {
        f64::INFINITY
    } else {
        ((got - want) / want).abs()
    }
}

/// Prints the criterion verdict line and returns whether it passed.
pub fn verdict(id: u32, name: &str, pass: bool, detail: &str) -> bool {
    println!("criterion {id} {name}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
    pass
}
