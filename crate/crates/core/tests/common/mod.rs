//! Reference implementations used only by tests. Nothing here calls into the
//! library's special-function code: densities come from a separate Lanczos
//! log-gamma, probabilities from Gauss-Legendre quadrature of those densities
//! and quantiles from bisection on the quadrature CDF.

#![allow(dead_code)]

use std::f64::consts::PI;

/// Lanczos (g = 7, n = 9) log-gamma for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + G + 0.5;
    for (i, c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Reference density; `None` dof means standard normal.
#[derive(Clone, Copy, Debug)]
pub struct Density {
    pub dof: Option<f64>,
    ln_norm: f64,
}

impl Density {
    pub fn t(dof: f64) -> Self {
        let ln_norm = ln_gamma(0.5 * (dof + 1.0)) - ln_gamma(0.5 * dof) - 0.5 * (dof * PI).ln();
        Self {
            dof: Some(dof),
            ln_norm,
        }
    }

    pub fn normal() -> Self {
        Self {
            dof: None,
            ln_norm: -0.5 * (2.0 * PI).ln(),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match self.dof {
            Some(nu) => (self.ln_norm - 0.5 * (nu + 1.0) * (1.0 + x * x / nu).ln()).exp(),
            None => (self.ln_norm - 0.5 * x * x).exp(),
        }
    }

    /// ∫_a^b pdf by composite 5-point Gauss-Legendre on panels of width <= h.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        integrate(|x| self.pdf(x), a, b, 0.02)
    }

    /// 1/2 + ∫_0^x pdf.
    pub fn cdf(&self, x: f64) -> f64 {
        if x >= 0.0 {
            0.5 + self.mass(0.0, x)
        } else {
            0.5 - self.mass(x, 0.0)
        }
    }

    /// Bisection on the quadrature CDF.
    pub fn quantile(&self, p: f64) -> f64 {
        let (mut lo, mut hi) = (-60.0, 60.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, h: f64) -> f64 {
    const X: [f64; 5] = [
        -0.906_179_845_938_664,
        -0.538_469_310_105_683_1,
        0.0,
        0.538_469_310_105_683_1,
        0.906_179_845_938_664,
    ];
    const W: [f64; 5] = [
        0.236_926_885_056_189_1,
        0.478_628_670_499_366_5,
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
    ];
    if b <= a {
        return 0.0;
    }
    let panels = ((b - a) / h).ceil().max(1.0) as usize;
    let w = (b - a) / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let c = a + (k as f64 + 0.5) * w;
        let s: f64 = X.iter().zip(W).map(|(x, wt)| wt * f(c + 0.5 * w * x)).sum();
        total += 0.5 * w * s;
    }
    total
}

/// `P(B <= b | condition)` by direct integration of the density of
/// `T = (δ̂ - δ)/S` over the event, with `|δ̂|/S = |z + T|`.
pub fn b_cdf_by_quadrature(
    dens: &Density,
    z: f64,
    k1: f64,
    k2: f64,
    condition: &str,
    u: f64,
) -> f64 {
    // mass of {T : a < |z + T| <= c}
    let ring = |a: f64, c: f64| -> f64 {
        if c <= a {
            0.0
        } else {
            dens.mass(a - z, c - z) + dens.mass(-c - z, -a - z)
        }
    };
    let r = u - k1;
    if r < 0.0 {
        return 0.0;
    }
    match condition {
        "marginal" => ring(0.0, r),
        "accept" => ring(0.0, r.min(k2)) / ring(0.0, k2),
        "reject" => {
            let tail = dens.mass(k2 - z, 80.0) + dens.mass(-80.0, -k2 - z);
            ring(k2, r.max(k2)) / tail
        }
        _ => unreachable!(),
    }
}
