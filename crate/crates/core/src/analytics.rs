//! Special functions and the exact hidden-burglar constant.
//!
//! `u(h) = Ai(2^{1/3} h) / Ai(0)` solves `u″ = 2hu` with `u(0) = 1` and
//! decays at infinity. With `v(h) = u(h)u′(0) − u′(h)` the probability that
//! the admissible interval is the whole support of the local time is
//! `2∫₀^∞ u v = u′(0)³ + 1 = 1 − 9√3 Γ(2/3)⁶ / (4π³)`.

#![allow(clippy::excessive_precision)]

use serde::Serialize;
use std::f64::consts::PI;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalyticsError {
    #[error("gamma is only implemented for x > 0, got {0}")]
    Domain(f64),
    #[error("tail bound {bound:.3e} beyond H = {h} exceeds tolerance {tolerance:.1e}")]
    Tail { h: f64, bound: f64, tolerance: f64 },
}

/// A computed value with an a-priori absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpecialValue {
    pub value: f64,
    pub abs_err_bound: f64,
}

const LANCZOS_G: f64 = 5.242_187_5;
const LANCZOS: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];

fn lanczos_series(x: f64) -> f64 {
    let mut ser = 0.999_999_999_999_997_092;
    let mut y = x;
    for c in LANCZOS {
        y += 1.0;
        ser += c / y;
    }
    ser
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64, AnalyticsError> {
    if !(x > 0.0) {
        return Err(AnalyticsError::Domain(x));
    }
    let t = x + LANCZOS_G;
    Ok((x + 0.5) * t.ln() - t + (2.506_628_274_631_000_5 * lanczos_series(x) / x).ln())
}

/// `Γ(x)` for `x > 0`, relative error around `1e-15` on moderate arguments.
pub fn gamma(x: f64) -> Result<f64, AnalyticsError> {
    if !(x > 0.0) {
        return Err(AnalyticsError::Domain(x));
    }
    if x < 0.5 {
        // shift up to keep the series in its most accurate range
        return Ok(gamma(x + 1.0)? / x);
    }
    if x > 140.0 {
        return Ok(ln_gamma(x)?.exp());
    }
    let t = x + LANCZOS_G;
    // split the power so t^{x+1/2} does not overflow before e^{-t} applies
    let half = t.powf(0.5 * (x + 0.5));
    Ok(2.506_628_274_631_000_5 * lanczos_series(x) / x * half * (-t).exp() * half)
}

/// `Ai(0) = 1 / (3^{2/3} Γ(2/3))`.
pub const AI0: f64 = 0.355_028_053_887_817_239_260;
/// `Ai′(0) = −1 / (3^{1/3} Γ(1/3))`.
pub const AIP0: f64 = -0.258_819_403_792_806_798_405;

/// Switchover from the Maclaurin series to the asymptotic expansion.
const AIRY_SERIES_MAX: f64 = 6.0;

/// `(Ai(z), Ai′(z))` for `z ≥ 0`.
pub fn airy_ai(z: f64) -> (SpecialValue, SpecialValue) {
    assert!(z >= 0.0, "airy_ai is implemented for z ≥ 0, got {z}");
    if z <= AIRY_SERIES_MAX {
        airy_series(z)
    } else {
        airy_asymptotic(z)
    }
}

fn airy_series(z: f64) -> (SpecialValue, SpecialValue) {
    let z3 = z * z * z;
    // f = Σ a_k z^{3k}, g = Σ b_k z^{3k+1} and their derivatives
    let (mut f, mut g, mut df, mut dg) = (1.0, z, 0.0, 1.0);
    let (mut tf, mut tg) = (1.0, z);
    let (mut tdf, mut tdg) = (z * z / 2.0, 1.0);
    let (mut abs_sum, mut dabs_sum) = (1.0 + z, 1.0);
    df += tdf;
    dabs_sum += tdf;
    let mut k = 0.0;
    loop {
        tf *= z3 / ((3.0 * k + 2.0) * (3.0 * k + 3.0));
        tg *= z3 / ((3.0 * k + 3.0) * (3.0 * k + 4.0));
        tdg *= z3 / ((3.0 * k + 1.0) * (3.0 * k + 3.0));
        if k > 0.0 {
            tdf *= z3 / (3.0 * k * (3.0 * k + 2.0));
            df += tdf;
            dabs_sum += tdf;
        }
        f += tf;
        g += tg;
        dg += tdg;
        abs_sum += tf + tg;
        dabs_sum += tdg;
        k += 1.0;
        if tf + tg + tdf + tdg <= 1e-18 * (f + g + df + dg) {
            break;
        }
    }
    let c2 = -AIP0;
    let ai = AI0 * f - c2 * g;
    let aip = AI0 * df - c2 * dg;
    let eps = f64::EPSILON;
    (
        SpecialValue {
            value: ai,
            abs_err_bound: 4.0 * eps * abs_sum,
        },
        SpecialValue {
            value: aip,
            abs_err_bound: 4.0 * eps * dabs_sum,
        },
    )
}

fn airy_asymptotic(z: f64) -> (SpecialValue, SpecialValue) {
    let zeta = 2.0 / 3.0 * z * z.sqrt();
    let pre = (-zeta).exp() / (2.0 * PI.sqrt());
    let q = z.sqrt().sqrt();
    let (mut su, mut sv) = (1.0, 1.0);
    let mut uk = 1.0;
    let mut last = f64::INFINITY;
    let mut tail = 0.0;
    for k in 1..40 {
        let kf = k as f64;
        uk *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
            / ((2.0 * kf - 1.0) * 216.0 * kf);
        let vk = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * uk;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let term = uk / zeta.powi(k);
        if term >= last {
            break;
        }
        su += sign * term;
        sv += sign * vk / zeta.powi(k);
        last = term;
        tail = term;
        if term < 1e-17 {
            break;
        }
    }
    let ai = pre / q * su;
    let aip = -pre * q * sv;
    let eps = f64::EPSILON;
    (
        SpecialValue {
            value: ai,
            abs_err_bound: (pre / q) * (tail + 4.0 * eps),
        },
        SpecialValue {
            value: aip,
            abs_err_bound: pre * q * (2.0 * tail + 4.0 * eps),
        },
    )
}

/// `(u(h), u′(h))` with `u(h) = Ai(2^{1/3}h)/Ai(0)`.
pub fn airy_u(h: f64) -> (SpecialValue, SpecialValue) {
    assert!(h >= 0.0, "u is only used on h ≥ 0, got {h}");
    let c = 2f64.cbrt();
    if h == 0.0 {
        return (
            SpecialValue {
                value: 1.0,
                abs_err_bound: 0.0,
            },
            SpecialValue {
                value: c * AIP0 / AI0,
                abs_err_bound: 4.0 * f64::EPSILON,
            },
        );
    }
    let (ai, aip) = airy_ai(c * h);
    (
        SpecialValue {
            value: ai.value / AI0,
            abs_err_bound: ai.abs_err_bound / AI0,
        },
        SpecialValue {
            value: c * aip.value / AI0,
            abs_err_bound: c * aip.abs_err_bound / AI0,
        },
    )
}

/// `u′(0) = −6^{1/3} Γ(2/3) / Γ(1/3)` from the gamma function.
pub fn u_prime_zero_closed_form() -> f64 {
    -6f64.cbrt() * gamma(2.0 / 3.0).unwrap() / gamma(1.0 / 3.0).unwrap()
}

/// `v(h) = u(h) u′(0) − u′(h)`.
pub fn v(h: f64) -> f64 {
    let up0 = airy_u(0.0).1.value;
    let (u, up) = airy_u(h);
    u.value * up0 - up.value
}

/// `u″(h)` by a sixth-order central difference of `u′`.
pub fn u_second_derivative_fd(h: f64, delta: f64) -> f64 {
    let d = |s: f64| airy_u((h + s * delta).max(0.0)).1.value;
    if h < 3.0 * delta {
        // one-sided sixth-order stencil near the origin
        let c = [
            -49.0 / 20.0,
            6.0,
            -15.0 / 2.0,
            20.0 / 3.0,
            -15.0 / 4.0,
            6.0 / 5.0,
            -1.0 / 6.0,
        ];
        return c
            .iter()
            .enumerate()
            .map(|(i, w)| w * d(i as f64))
            .sum::<f64>()
            / delta;
    }
    (-d(-3.0) + 9.0 * d(-2.0) - 45.0 * d(-1.0) + 45.0 * d(1.0) - 9.0 * d(2.0) + d(3.0))
        / (60.0 * delta)
}

/// Both closed forms of the hidden-burglar probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HiddenConstant {
    /// `1 − 9√3 Γ(2/3)⁶ / (4π³)`.
    pub closed_form: f64,
    /// `u′(0)³ + 1 = 1 − 6 Γ(2/3)³ / Γ(1/3)³`.
    pub airy_form: f64,
}

impl HiddenConstant {
    pub fn value(&self) -> f64 {
        self.closed_form
    }

    pub fn discrepancy(&self) -> f64 {
        (self.closed_form - self.airy_form).abs()
    }
}

/// `ℙ(I = support of the local time)` in the scaling limit, `≈ 0.2251`.
pub fn hidden_probability_exact() -> HiddenConstant {
    let g23 = gamma(2.0 / 3.0).unwrap();
    let g13 = gamma(1.0 / 3.0).unwrap();
    let closed_form = 1.0 - 9.0 * 3f64.sqrt() * g23.powi(6) / (4.0 * PI.powi(3));
    let airy_form = 1.0 - 6.0 * (g23 / g13).powi(3);
    let c = HiddenConstant {
        closed_form,
        airy_form,
    };
    assert!(
        c.discrepancy() <= 1e-12,
        "closed forms disagree: {} vs {}",
        closed_form,
        airy_form
    );
    c
}

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

/// One 15-point Kronrod panel; returns `(kronrod, |kronrod − gauss|)`.
pub fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let s = f(c - r * XGK[j]) + f(c + r * XGK[j]);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * r, ((k - g) * r).abs())
}

/// Adaptive bisection with 15-point panels until the summed error estimate
/// is below `tol`. Returns `(integral, error estimate)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let mut panels = vec![(a, b, gauss_kronrod_15(&f, a, b))];
    for _ in 0..2000 {
        let err: f64 = panels.iter().map(|p| p.2 .1).sum();
        if err <= tol {
            break;
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.total_cmp(&y.1 .2 .1))
            .map(|(i, _)| i)
            .unwrap();
        let (lo, hi, _) = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        panels.push((lo, mid, gauss_kronrod_15(&f, lo, mid)));
        panels.push((mid, hi, gauss_kronrod_15(&f, mid, hi)));
    }
    panels.sort_by(|x, y| x.0.total_cmp(&y.0));
    let value = panels.iter().map(|p| p.2 .0).sum();
    let err = panels.iter().map(|p| p.2 .1).sum();
    (value, err)
}

/// Bounds on `∫_H^∞ u²` and `∫_H^∞ |u u′|`.
///
/// `u` is positive and decreasing with `−u′/u ≥ √(2h)`, so
/// `u(y) ≤ u(H) e^{−√(2H)(y−H)}` beyond `H`, and `∫_H^∞ |u u′| = u(H)²/2`.
pub fn tail_bounds(h: f64) -> (f64, f64) {
    let u = airy_u(h).0.value;
    (u * u / (2.0 * (2.0 * h).sqrt()), u * u / 2.0)
}

/// Tail bound for `2∫_H^∞ u v`.
pub fn uv_tail_bound(h: f64) -> f64 {
    let (t2, t1) = tail_bounds(h);
    let up0 = airy_u(0.0).1.value.abs();
    2.0 * (up0 * t2 + t1)
}

/// Smallest integer `H` whose tail bounds are all below `tol`.
pub fn choose_horizon(tol: f64) -> f64 {
    let mut h = 1.0;
    while uv_tail_bound(h).max(tail_bounds(h).0) > tol && h < 30.0 {
        h += 1.0;
    }
    h
}

/// Result of integrating the three integrals on `[0, H]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureReport {
    pub horizon: f64,
    pub tail_bound: f64,
    pub int_u2: f64,
    pub int_u_du: f64,
    pub twice_int_uv: f64,
    pub quad_err: f64,
    pub u_prime_zero: f64,
}

impl QuadratureReport {
    /// `|∫u² − u′(0)²/2|`.
    pub fn u2_residual(&self) -> f64 {
        (self.int_u2 - self.u_prime_zero.powi(2) / 2.0).abs()
    }

    /// `|∫u u′ + 1/2|`.
    pub fn u_du_residual(&self) -> f64 {
        (self.int_u_du + 0.5).abs()
    }

    /// `|2∫uv − (u′(0)³ + 1)|`.
    pub fn uv_residual(&self) -> f64 {
        (self.twice_int_uv - (self.u_prime_zero.powi(3) + 1.0)).abs()
    }
}

/// Tolerance for the neglected tail beyond the integration horizon.
pub const TAIL_TOLERANCE: f64 = 1e-12;

/// Integrate `∫u²`, `∫u u′` and `2∫u v` on `[0, H]` with `H` from
/// [`choose_horizon`].
pub fn quadrature_check() -> Result<QuadratureReport, AnalyticsError> {
    quadrature_check_to(choose_horizon(TAIL_TOLERANCE))
}

/// As [`quadrature_check`] with an explicit horizon.
pub fn quadrature_check_to(horizon: f64) -> Result<QuadratureReport, AnalyticsError> {
    let tail_bound = uv_tail_bound(horizon).max(tail_bounds(horizon).0);
    if tail_bound > TAIL_TOLERANCE {
        return Err(AnalyticsError::Tail {
            h: horizon,
            bound: tail_bound,
            tolerance: TAIL_TOLERANCE,
        });
    }
    let up0 = airy_u(0.0).1.value;
    let tol = 1e-13;
    let (int_u2, e1) = integrate(|h| airy_u(h).0.value.powi(2), 0.0, horizon, tol);
    let (int_u_du, e2) = integrate(
        |h| {
            let (u, du) = airy_u(h);
            u.value * du.value
        },
        0.0,
        horizon,
        tol,
    );
    let (int_uv, e3) = integrate(|h| airy_u(h).0.value * v(h), 0.0, horizon, tol);
    Ok(QuadratureReport {
        horizon,
        tail_bound,
        int_u2,
        int_u_du,
        twice_int_uv: 2.0 * int_uv,
        quad_err: e1 + e2 + 2.0 * e3,
        u_prime_zero: up0,
    })
}

/// One line of the identity table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityRow {
    pub name: String,
    pub computed: f64,
    pub reference: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl IdentityRow {
    fn new(name: &str, computed: f64, reference: f64, tolerance: f64) -> Self {
        let residual = (computed - reference).abs();
        IdentityRow {
            name: name.to_string(),
            computed,
            reference,
            residual,
            tolerance,
            passed: residual <= tolerance,
        }
    }
}

/// Every identity of the Airy/Gamma route to the constant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AiryCheck {
    pub constant: HiddenConstant,
    pub quadrature: QuadratureReport,
    pub rows: Vec<IdentityRow>,
}

impl AiryCheck {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> Vec<&IdentityRow> {
        self.rows.iter().filter(|r| !r.passed).collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "hidden-burglar constant = {:.15}", self.constant.value());
        let _ = writeln!(
            s,
            "{:<34} {:>22} {:>22} {:>10} {:>8}  status",
            "identity", "computed", "reference", "residual", "tol"
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:<34} {:>22.15e} {:>22.15e} {:>10.2e} {:>8.0e}  {}",
                r.name,
                r.computed,
                r.reference,
                r.residual,
                r.tolerance,
                if r.passed { "ok" } else { "FAIL" }
            );
        }
        s
    }
}

/// Largest `|u″(h) − 2h u(h)|` over a grid of `[0, h_max]`.
pub fn ode_residual(h_max: f64, points: usize) -> f64 {
    (0..=points)
        .map(|i| {
            let h = h_max * i as f64 / points as f64;
            (u_second_derivative_fd(h, 0.01) - 2.0 * h * airy_u(h).0.value).abs()
        })
        .fold(0.0, f64::max)
}

/// Run the whole identity suite.
pub fn airy_check() -> Result<AiryCheck, AnalyticsError> {
    let constant = hidden_probability_exact();
    let quadrature = quadrature_check()?;
    let up0 = airy_u(0.0).1.value;
    let g13 = gamma(1.0 / 3.0)?;
    let g23 = gamma(2.0 / 3.0)?;

    let grid: Vec<f64> = (0..=200).map(|i| i as f64 * 0.05).collect();
    let us: Vec<f64> = grid.iter().map(|&h| airy_u(h).0.value).collect();
    let not_decreasing = us.windows(2).filter(|w| !(w[1] < w[0])).count();
    let not_positive = us.iter().filter(|&&u| !(u > 0.0)).count();
    let min_v = grid.iter().map(|&h| v(h)).fold(f64::INFINITY, f64::min);

    let rows = vec![
        IdentityRow::new("gamma(1)", gamma(1.0)?, 1.0, 1e-14),
        IdentityRow::new("gamma(1/2)", gamma(0.5)?, PI.sqrt(), 1e-13),
        IdentityRow::new(
            "gamma(1/3) gamma(2/3)",
            g13 * g23,
            2.0 * PI / 3f64.sqrt(),
            1e-12,
        ),
        IdentityRow::new("u(0)", airy_u(0.0).0.value, 1.0, 0.0),
        IdentityRow::new(
            "u'(0) vs -6^(1/3) G(2/3)/G(1/3)",
            up0,
            u_prime_zero_closed_form(),
            1e-12,
        ),
        IdentityRow::new(
            "max |u'' - 2hu| on [0,10]",
            ode_residual(10.0, 400),
            0.0,
            1e-9,
        ),
        IdentityRow::new(
            "u > 0 and decreasing (violations)",
            (not_decreasing + not_positive) as f64,
            0.0,
            0.0,
        ),
        IdentityRow::new("v(0)", v(0.0), 0.0, 1e-15),
        IdentityRow::new("min(0, min v) on [0,10]", min_v.min(0.0), 0.0, 1e-15),
        IdentityRow::new("v(10)", v(10.0), 0.0, 1e-12),
        IdentityRow::new(
            "int u^2 vs u'(0)^2/2",
            quadrature.int_u2,
            up0 * up0 / 2.0,
            1e-8,
        ),
        IdentityRow::new("int u u'", quadrature.int_u_du, -0.5, 1e-10),
        IdentityRow::new(
            "2 int u v vs u'(0)^3 + 1",
            quadrature.twice_int_uv,
            up0.powi(3) + 1.0,
            1e-8,
        ),
        IdentityRow::new(
            "2 int u v vs closed form",
            quadrature.twice_int_uv,
            constant.closed_form,
            1e-8,
        ),
        IdentityRow::new(
            "closed form vs u'(0)^3 + 1",
            constant.closed_form,
            constant.airy_form,
            1e-12,
        ),
        IdentityRow::new("constant vs 0.2251", constant.value(), 0.2251, 1e-4),
    ];
    Ok(AiryCheck {
        constant,
        quadrature,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn gamma_golden_values() {
        let golden = [
            (1.0 / 3.0, 2.678_938_534_707_747_633_655_692_940_97),
            (2.0 / 3.0, 1.354_117_939_426_400_416_945_288_028_15),
            (0.5, 1.772_453_850_905_516_027_298_167_483_34),
            (1.0, 1.0),
            (5.0, 24.0),
            (10.5, 1_133_278.388_948_785_567_334_574_165_8),
            (0.1, 9.513_507_698_668_731_836_292_487_177_27),
        ];
        for (x, g) in golden {
            let r = rel(gamma(x).unwrap(), g);
            assert!(r <= 1e-13, "gamma({x}) rel err {r:e}");
        }
    }

    #[test]
    fn gamma_rejects_non_positive() {
        assert_eq!(gamma(0.0), Err(AnalyticsError::Domain(0.0)));
        assert!(gamma(-1.5).is_err());
        assert!(gamma(f64::NAN).is_err());
    }

    #[test]
    fn airy_constants_match_gamma() {
        let ai0 = 1.0 / (3f64.powf(2.0 / 3.0) * gamma(2.0 / 3.0).unwrap());
        let aip0 = -1.0 / (3f64.cbrt() * gamma(1.0 / 3.0).unwrap());
        assert!((ai0 - AI0).abs() < 1e-15);
        assert!((aip0 - AIP0).abs() < 1e-15);
    }

    #[test]
    fn u_golden_values() {
        let golden = [
            (
                0.5,
                0.573_142_080_344_841_644_85,
                -0.741_649_898_214_363_227_6,
            ),
            (
                1.0,
                0.277_149_323_513_830_729_32,
                -0.444_499_766_934_263_063_07,
            ),
            (
                2.0,
                0.042_849_361_429_973_526_024,
                -0.090_425_218_593_423_235_573,
            ),
            (
                4.0,
                0.000_278_685_121_359_513_228_48,
                -0.000_804_803_107_407_771_863_25,
            ),
            (
                4.76,
                2.821_373_689_784_076_230_7e-5,
                -8.847_642_106_498_245_078_8e-5,
            ),
            (
                5.0,
                1.317_350_263_336_609_605_2e-5,
                -4.229_307_879_938_628_082_7e-5,
            ),
            (
                8.0,
                2.415_144_108_074_354_217_7e-10,
                -9.734_640_152_300_073_438_8e-10,
            ),
            (
                10.0,
                4.741_236_453_480_901_709_8e-14,
                -2.132_038_128_852_062_136_8e-13,
            ),
        ];
        for (h, u, du) in golden {
            let (cu, cdu) = airy_u(h);
            assert!(
                (cu.value - u).abs() <= cu.abs_err_bound.max(1e-16),
                "u({h}) = {} vs {u}",
                cu.value
            );
            assert!(
                (cdu.value - du).abs() <= cdu.abs_err_bound.max(1e-16),
                "u'({h}) = {} vs {du}",
                cdu.value
            );
            assert!(cu.abs_err_bound < 1e-10 && cdu.abs_err_bound < 1e-10);
        }
    }

    #[test]
    fn switchover_is_continuous() {
        let z = AIRY_SERIES_MAX;
        let (a, da) = airy_series(z);
        let (b, db) = airy_asymptotic(z);
        assert!(
            (a.value - b.value).abs() <= a.abs_err_bound + b.abs_err_bound,
            "{a:?} {b:?}"
        );
        assert!(
            (da.value - db.value).abs() <= da.abs_err_bound + db.abs_err_bound,
            "{da:?} {db:?}"
        );
    }

    #[test]
    fn u_prime_zero_value() {
        let up0 = airy_u(0.0).1.value;
        assert!((up0 - -0.918_496_472_007_921_179_76).abs() < 1e-15);
        assert!((up0 - u_prime_zero_closed_form()).abs() < 1e-12);
    }

    #[test]
    fn ode_residual_small() {
        let r = ode_residual(10.0, 200);
        assert!(r <= 1e-9, "residual {r:e}");
    }

    #[test]
    fn log_derivative_bound_used_by_tails() {
        for i in 1..=100 {
            let h = i as f64 * 0.1;
            let (u, du) = airy_u(h);
            assert!(-du.value / u.value >= (2.0 * h).sqrt());
        }
    }

    #[test]
    fn kronrod_is_exact_on_polynomials() {
        for deg in 0..=22 {
            let (val, _) = gauss_kronrod_15(&|x: f64| x.powi(deg), 0.0, 1.0);
            assert!(
                (val - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14,
                "degree {deg}"
            );
        }
    }

    #[test]
    fn adaptive_integration() {
        let (v, e) = integrate(|x| x.sqrt(), 0.0, 1.0, 1e-12);
        assert!((v - 2.0 / 3.0).abs() < 1e-11 && e <= 1e-12);
    }

    #[test]
    fn hidden_constant() {
        let c = hidden_probability_exact();
        assert!((c.value() - 0.225_123_522_430_229_158_86).abs() < 1e-14);
        assert!(c.discrepancy() <= 1e-12);
        let complement = 1.0 - c.closed_form;
        assert!(complement > 0.0 && complement < 1.0);
    }

    #[test]
    fn quadrature_identities() {
        let q = quadrature_check().unwrap();
        assert!(q.u2_residual() <= 1e-8, "{q:?}");
        assert!(q.u_du_residual() <= 1e-10, "{q:?}");
        assert!(q.uv_residual() <= 1e-8, "{q:?}");
        assert!((q.int_u2 - 0.421_817_884_545_498_967_66).abs() < 1e-12);
    }

    #[test]
    fn short_horizon_is_a_tail_error() {
        match quadrature_check_to(2.0) {
            Err(AnalyticsError::Tail { h, .. }) => assert_eq!(h, 2.0),
            other => panic!("expected tail error, got {other:?}"),
        }
    }

    #[test]
    fn v_is_nonnegative() {
        assert_eq!(v(0.0), 0.0);
        for i in 0..=200 {
            assert!(v(i as f64 * 0.05) >= 0.0);
        }
        assert!(v(10.0) < 1e-12);
    }

    #[test]
    fn full_check_passes() {
        let c = airy_check().unwrap();
        assert!(c.passed(), "{}", c.to_text());
        assert!(c.to_text().contains("0.2251235224"));
    }
}
