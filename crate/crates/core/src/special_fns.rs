//! Student-t and standard normal distribution functions.
//!
//! The Student-t CDF goes through the regularized incomplete beta function,
//! evaluated with a modified-Lentz continued fraction. Quantiles are found by
//! a bracketed Newton iteration that falls back to bisection whenever a
//! Newton step leaves the bracket. Both distributions are symmetric about
//! zero, so every computation is carried out in the lower tail and reflected.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reference distribution for a standardized mean difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RefDist {
    /// Student's t with (possibly non-integer) degrees of freedom.
    StudentT { dof: f64 },
    /// Standard normal; the z-test reference.
    Normal,
}

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;
const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

const QUANTILE_MAX_ITER: usize = 400;
/// Relative tolerance on the probability scale for the quantile search.
const QUANTILE_P_TOL: f64 = 1e-14;

impl RefDist {
    pub fn student_t(dof: f64) -> Result<Self> {
        if dof.is_finite() && dof > 0.0 {
            Ok(RefDist::StudentT { dof })
        } else {
            Err(Error::domain(format!(
                "degrees of freedom must be positive and finite, got {dof}"
            )))
        }
    }

    /// Degrees of freedom, or `None` for the normal reference.
    pub fn dof(&self) -> Option<f64> {
        match *self {
            RefDist::StudentT { dof } => Some(dof),
            RefDist::Normal => None,
        }
    }

    /// P(T <= x).
    pub fn cdf(&self, x: f64) -> Result<f64> {
        check_finite(x)?;
        Ok(self.cdf_at(x))
    }

    /// P(T > x), computed without cancellation in the upper tail.
    pub fn sf(&self, x: f64) -> Result<f64> {
        check_finite(x)?;
        Ok(self.sf_at(x))
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        check_finite(x)?;
        Ok(self.pdf_at(x))
    }

    /// Inverse CDF on the open interval (0, 1).
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain(format!(
                "quantile probability must lie in (0, 1), got {p}"
            )));
        }
        Ok(self.quantile_at(p))
    }

    pub(crate) fn cdf_at(&self, x: f64) -> f64 {
        if x <= 0.0 {
            self.lower_tail(x)
        } else {
            1.0 - self.lower_tail(-x)
        }
    }

    pub(crate) fn sf_at(&self, x: f64) -> f64 {
        self.cdf_at(-x)
    }

    /// P(lo < T <= hi) for lo <= hi, choosing the tail that avoids cancellation.
    pub(crate) fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            0.0
        } else if lo >= 0.0 {
            self.sf_at(lo) - self.sf_at(hi)
        } else if hi <= 0.0 {
            self.cdf_at(hi) - self.cdf_at(lo)
        } else {
            1.0 - self.cdf_at(lo) - self.sf_at(hi)
        }
    }

    pub(crate) fn pdf_at(&self, x: f64) -> f64 {
        match *self {
            RefDist::Normal => FRAC_1_SQRT_2PI * (-0.5 * x * x).exp(),
            RefDist::StudentT { dof } => {
                let ln_norm = -ln_beta(0.5 * dof, 0.5) - 0.5 * dof.ln();
                (ln_norm - 0.5 * (dof + 1.0) * (x * x / dof).ln_1p()).exp()
            }
        }
    }

    /// `quantile(1 - q)` evaluated as `-quantile(q)`.
    pub(crate) fn upper_quantile_at(&self, q: f64) -> f64 {
        -self.quantile_at(q)
    }

    pub(crate) fn quantile_at(&self, p: f64) -> f64 {
        if p == 0.5 {
            0.0
        } else if p > 0.5 {
            -self.lower_quantile(1.0 - p)
        } else {
            self.lower_quantile(p)
        }
    }

    /// P(T <= x) for x <= 0.
    fn lower_tail(&self, x: f64) -> f64 {
        match *self {
            RefDist::Normal => 0.5 * libm::erfc(-x * std::f64::consts::FRAC_1_SQRT_2),
            RefDist::StudentT { dof } => {
                if x == 0.0 {
                    return 0.5;
                }
                // I_z(dof/2, 1/2) with z = dof / (dof + x^2), y = 1 - z.
                let (z, y) = if x.abs() > 1.0 {
                    let w = (dof.sqrt() / x).powi(2);
                    (w / (1.0 + w), 1.0 / (1.0 + w))
                } else {
                    let d = dof + x * x;
                    (dof / d, x * x / d)
                };
                0.5 * beta_inc(0.5 * dof, 0.5, z, y).0
            }
        }
    }

    /// Solve cdf(x) = p for p < 0.5 (so x < 0).
    fn lower_quantile(&self, p: f64) -> f64 {
        let guess = match *self {
            RefDist::Normal => normal_quantile_guess(p),
            RefDist::StudentT { dof } => {
                if dof == 1.0 {
                    return -1.0 / (std::f64::consts::PI * p).tan();
                }
                t_quantile_guess(p, dof)
            }
        };

        let f = |x: f64| self.cdf_at(x) - p;

        let mut x = if guess.is_finite() && guess < 0.0 {
            guess
        } else {
            -1.0
        };
        let (mut lo, mut hi);
        if f(x) > 0.0 {
            hi = x;
            lo = 2.0 * x.min(-0.5);
            while f(lo) > 0.0 {
                hi = lo;
                lo *= 2.0;
                if !lo.is_finite() {
                    return f64::NEG_INFINITY;
                }
            }
        } else {
            lo = x;
            hi = 0.0;
        }

        for _ in 0..QUANTILE_MAX_ITER {
            let fx = f(x);
            if fx == 0.0 {
                return x;
            }
            if fx > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            if fx.abs() <= QUANTILE_P_TOL * p {
                return x;
            }
            let slope = self.pdf_at(x);
            let mut next = x - fx / slope;
            if !(next > lo && next < hi) {
                next = if hi < 0.0 && lo / hi > 4.0 {
                    // heavy tails: bisect in log-space
                    -(lo * hi).sqrt()
                } else {
                    0.5 * (lo + hi)
                };
            }
            if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs() {
                return next;
            }
            x = next;
        }
        x
    }
}

fn check_finite(x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("argument must be finite, got {x}")))
    }
}

/// Acklam's rational approximation to the normal quantile, relative error ~1e-9.
fn normal_quantile_guess(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// Cornish-Fisher expansion of the t quantile around the normal quantile.
fn t_quantile_guess(p: f64, dof: f64) -> f64 {
    if dof == 2.0 {
        return (2.0 * p - 1.0) / (2.0 * p * (1.0 - p)).sqrt();
    }
    let z = normal_quantile_guess(p);
    let z2 = z * z;
    let g1 = (z2 + 1.0) * z / 4.0;
    let g2 = ((5.0 * z2 + 16.0) * z2 + 3.0) * z / 96.0;
    let g3 = (((3.0 * z2 + 19.0) * z2 + 17.0) * z2 - 15.0) * z / 384.0;
    z + g1 / dof + g2 / (dof * dof) + g3 / (dof * dof * dof)
}

/// lnΓ(x) - [(x - 1/2) ln x - x + ln √(2π)] for x >= 10.
fn stirling_err(x: f64) -> f64 {
    let r = 1.0 / x;
    let r2 = r * r;
    r * (1.0 / 12.0
        - r2 * (1.0 / 360.0 - r2 * (1.0 / 1260.0 - r2 * (1.0 / 1680.0 - r2 / 1188.0))))
}

const STIRLING_MIN: f64 = 15.0;

/// lnΓ(a) - lnΓ(a + b) for a >= STIRLING_MIN, without the cancellation of
/// subtracting two large log-gammas.
fn ln_gamma_ratio(a: f64, b: f64) -> f64 {
    -(a - 0.5) * (b / a).ln_1p() - b * (a + b).ln() + b + stirling_err(a) - stirling_err(a + b)
}

/// ln B(a, b).
pub(crate) fn ln_beta(a: f64, b: f64) -> f64 {
    let (small, large) = if a < b { (a, b) } else { (b, a) };
    if large < STIRLING_MIN {
        libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b)
    } else if small < STIRLING_MIN {
        libm::lgamma(small) + ln_gamma_ratio(large, small)
    } else {
        let c = a + b;
        HALF_LN_2PI - (a - 0.5) * (b / a).ln_1p() - (b - 0.5) * (a / b).ln_1p() - 0.5 * c.ln()
            + stirling_err(a)
            + stirling_err(b)
            - stirling_err(c)
    }
}

/// Regularized incomplete beta `(I_x(a, b), 1 - I_x(a, b))`, with `y = 1 - x`
/// supplied by the caller so that neither side suffers cancellation.
pub(crate) fn beta_inc(a: f64, b: f64, x: f64, y: f64) -> (f64, f64) {
    if x <= 0.0 {
        return (0.0, 1.0);
    }
    if y <= 0.0 {
        return (1.0, 0.0);
    }
    let ln_front = a * x.ln() + b * y.ln() - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        let v = (ln_front.exp() * beta_cf(a, b, x) / a).clamp(0.0, 1.0);
        (v, 1.0 - v)
    } else {
        let v = (ln_front.exp() * beta_cf(b, a, y) / b).clamp(0.0, 1.0);
        (1.0 - v, v)
    }
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let max_iter = 10_000 + (20.0 * a.max(b).sqrt()) as usize;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=max_iter {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}
