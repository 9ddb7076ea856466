//! Adaptive Gauss–Kronrod (G7/K15) integration and the regularized
//! singular integrals over the unit square.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum QuadratureError {
    #[error("quadrature did not converge: achieved relative error {achieved:.3e} (requested {requested:.3e})")]
    NotConverged { achieved: f64, requested: f64 },
    #[error("integrand is not finite")]
    NonFinite,
}

// Kronrod abscissae; odd positions (1, 3, 5, 7) are the Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One K15 panel: (Kronrod estimate, |Kronrod − Gauss|).
fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

/// Globally adaptive bisection over the given breakpoints. Stops when the
/// summed error estimate drops below `rel_tol·|value|`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    rel_tol: f64,
    max_panels: usize,
) -> Result<Integral, QuadratureError> {
    let mut heap = BinaryHeap::new();
    let (mut value, mut error) = (0.0, 0.0);
    for w in breakpoints.windows(2) {
        let (v, e) = kronrod15(&f, w[0], w[1]);
        value += v;
        error += e;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
        });
    }
    if !value.is_finite() || !error.is_finite() {
        return Err(QuadratureError::NonFinite);
    }
    while error > rel_tol * value.abs() {
        if heap.len() >= max_panels {
            return Err(QuadratureError::NotConverged {
                achieved: error / value.abs(),
                requested: rel_tol,
            });
        }
        let worst = heap.pop().expect("at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // panel cannot be split further in floating point
            return Err(QuadratureError::NotConverged {
                achieved: error / value.abs(),
                requested: rel_tol,
            });
        }
        let (lv, le) = kronrod15(&f, worst.a, mid);
        let (rv, re) = kronrod15(&f, mid, worst.b);
        value += lv + rv - worst.value;
        error += le + re - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: lv,
            error: le,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: rv,
            error: re,
        });
    }
    // re-sum to shed the drift of the running update
    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.error).sum();
    Ok(Integral { value, error })
}

/// `∫_δ^R r^{1−α} dr`, stable across α = 2.
fn radial(r: f64, delta: f64, alpha: f64) -> f64 {
    if r <= delta {
        return 0.0;
    }
    let t = 2.0 - alpha;
    let l = (r / delta).ln();
    let x = t * l;
    if x == 0.0 {
        l
    } else {
        delta.powf(t) * x.exp_m1() / t
    }
}

/// Distance from `(cx, cy)` to the boundary of the unit square along
/// direction `theta`; zero for directions that leave the square at once.
fn ray_length(cx: f64, cy: f64, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let along = |p: f64, d: f64| {
        if d > 0.0 {
            (1.0 - p) / d
        } else if d < 0.0 {
            -p / d
        } else {
            f64::INFINITY
        }
    };
    along(cx, c).min(along(cy, s))
}

/// `∫∫_{[0,1]² \ B(c, δ)} ‖(x,y) − c‖^{−α} dx dy` for a centre `c` inside or
/// on the boundary of the unit square.
///
/// In polar coordinates around `c` the radial integral is closed-form, which
/// leaves a piecewise-smooth integral over the angle. Breakpoints sit at the
/// axis directions and at the directions of the four corners, where the
/// ray-length function changes branch.
pub fn punctured_square_integral(
    centre: (f64, f64),
    alpha: f64,
    delta: f64,
    rel_tol: f64,
) -> Result<Integral, QuadratureError> {
    let (cx, cy) = centre;
    let mut breaks: Vec<f64> = vec![0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2];
    for (x, y) in [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)] {
        let (dx, dy) = (x - cx, y - cy);
        if dx != 0.0 || dy != 0.0 {
            breaks.push(dy.atan2(dx).rem_euclid(TAU));
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    breaks.push(breaks[0] + TAU);
    integrate(
        |theta| radial(ray_length(cx, cy, theta), delta, alpha),
        &breaks,
        rel_tol,
        10_000,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x.powi(5) - 3.0 * x * x, &[0.0, 2.0], 1e-12, 100).unwrap();
        assert!((r.value - (64.0 / 6.0 - 8.0)).abs() < 1e-13);
    }

    #[test]
    fn smooth_transcendental() {
        let r = integrate(|x: f64| x.sin().exp(), &[0.0, 10.0], 1e-12, 1000).unwrap();
        // mpmath: quad(exp(sin(x)), [0, 10])
        assert!((r.value - 14.603_990_977_474_845).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn reports_non_convergence() {
        let err = integrate(|x: f64| (1.0 / x).sin(), &[1e-9, 1.0], 1e-14, 20).unwrap_err();
        assert!(matches!(err, QuadratureError::NotConverged { .. }));
    }

    #[test]
    fn constant_integrand_measures_area() {
        let d = 1e-2;
        let cases = [
            ((0.5, 0.5), 1.0 - PI * d * d),
            ((1.0, 0.5), 1.0 - PI * d * d / 2.0),
            ((0.0, 0.0), 1.0 - PI * d * d / 4.0),
        ];
        for (c, want) in cases {
            let got = punctured_square_integral(c, 0.0, d, 1e-12).unwrap().value;
            assert!((got - want).abs() < 1e-12, "{c:?}: {got} vs {want}");
        }
    }

    #[test]
    fn radial_matches_closed_forms() {
        assert!((radial(0.5, 1e-3, 2.0) - (500.0f64).ln()).abs() < 1e-14);
        let want = (1e3 - 2.0) * 1.0; // ∫ r^{-2} from 1e-3 to 0.5
        assert!((radial(0.5, 1e-3, 3.0) - want).abs() < 1e-10);
        assert_eq!(radial(1e-4, 1e-3, 2.0), 0.0);
        let near = radial(0.5, 1e-3, 2.0 + 1e-12);
        assert!((near - (500.0f64).ln()).abs() < 1e-9);
    }
}
