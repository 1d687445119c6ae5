//! Adaptive Gauss–Kronrod (7, 15) quadrature.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_PANELS: usize = 100_000;

/// Kronrod estimate and |Kronrod − Gauss| on `[a, b]`.
fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for k in 0..7 {
        let dx = h * XGK[k];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[k] * pair;
        if k % 2 == 1 {
            gauss += WG[k / 2] * pair;
        }
    }
    (kronrod * h, (kronrod - gauss).abs() * h)
}

/// Integrates `f` over `[a, b]` starting from panels no wider than
/// `max_panel`. A panel is accepted once its error estimate is within
/// `tol` absolute or `tol` relative to its own contribution; otherwise it is
/// bisected. Returns `None` if the estimate is not finite or refinement does
/// not settle.
pub(crate) fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, max_panel: f64, tol: f64) -> Option<f64> {
    let width = b - a;
    let n0 = (width / max_panel).ceil().max(1.0) as usize;
    let mut stack: Vec<(f64, f64)> = (0..n0)
        .rev()
        .map(|i| {
            let lo = a + width * i as f64 / n0 as f64;
            let hi = a + width * (i + 1) as f64 / n0 as f64;
            (lo, hi)
        })
        .collect();
    let mut total = 0.0;
    let mut panels = 0usize;
    while let Some((lo, hi)) = stack.pop() {
        panels += 1;
        if panels > MAX_PANELS {
            return None;
        }
        let (est, err) = gk15(&f, lo, hi);
        if !est.is_finite() || !err.is_finite() {
            return None;
        }
        let mid = 0.5 * (lo + hi);
        if err <= tol * est.abs().max(1.0) || mid <= lo || mid >= hi {
            total += est;
        } else {
            stack.push((mid, hi));
            stack.push((lo, mid));
        }
    }
    Some(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let v = integrate(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, 10.0, 1e-14).unwrap();
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0);
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn gaussian_mass() {
        let s = 0.7;
        let pdf = |x: f64| (-x * x / (2.0 * s * s)).exp() / (s * (2.0 * std::f64::consts::PI).sqrt());
        let v = integrate(pdf, -20.0, 20.0, s, 1e-12).unwrap();
        assert!((v - 1.0).abs() < 1e-11);
    }

    #[test]
    fn non_finite_integrand_fails() {
        assert!(integrate(|x| if x > 0.5 { f64::NAN } else { x }, -1.0, 1.0, 0.3, 1e-12).is_none());
    }
}
