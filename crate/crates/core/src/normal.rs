//! Standard normal special functions and the chi-square(1) upper tail.
//!
//! Upper-tail quantities switch to a continued-fraction evaluation of the
//! Mills ratio above [`TAIL_SWITCH`], so `log_sf` and [`hazard`] stay finite
//! far beyond the point where `1 - cdf` underflows.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

/// `ln(sqrt(2 pi))`
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Above this abscissa the upper tail is evaluated through the Mills ratio.
pub const TAIL_SWITCH: f64 = 5.0;

pub fn pdf(z: f64) -> f64 {
    (-0.5 * z * z - LN_SQRT_2PI).exp()
}

pub fn cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

/// Upper tail `1 - cdf(z)` without cancellation.
pub fn sf(z: f64) -> f64 {
    0.5 * libm::erfc(z * FRAC_1_SQRT_2)
}

/// Mills ratio `sf(z) / pdf(z)` for `z >= TAIL_SWITCH`, by modified Lentz.
fn mills_ratio_tail(z: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = z;
    let mut c = z;
    let mut d = 0.0;
    for k in 1..500 {
        let a = k as f64;
        d = z + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = z + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / f
}

/// `ln(1 - cdf(z))`, finite for every finite `z`.
pub fn log_sf(z: f64) -> f64 {
    if z > TAIL_SWITCH {
        -0.5 * z * z - LN_SQRT_2PI + mills_ratio_tail(z).ln()
    } else {
        sf(z).ln()
    }
}

/// `ln cdf(z)`, the mirror of [`log_sf`].
pub fn log_cdf(z: f64) -> f64 {
    log_sf(-z)
}

/// Normal hazard `pdf(z) / (1 - cdf(z))`, the `H(z)` of the censored score.
pub fn hazard(z: f64) -> f64 {
    if z > TAIL_SWITCH {
        1.0 / mills_ratio_tail(z)
    } else {
        (-0.5 * z * z - LN_SQRT_2PI - sf(z).ln()).exp()
    }
}

// Acklam's rational approximation, lower region and central region.
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

fn acklam_lower(p: f64) -> f64 {
    const P_LOW: f64 = 0.024_25;
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

/// Inverse of [`cdf`] on `(0, 1)`.
///
/// The rational starting value is refined by one Halley step against the
/// erfc-based cdf. Upper-half arguments are reflected so that the refined
/// residual is always computed on the lower tail, where `cdf` has full
/// relative accuracy.
pub fn quantile(u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::OutOfDomain {
            what: "normal quantile probability",
            value: u,
        });
    }
    if u > 0.5 {
        // 1 - u is exact here
        return Ok(-lower_quantile(1.0 - u));
    }
    Ok(lower_quantile(u))
}

fn lower_quantile(p: f64) -> f64 {
    let x = acklam_lower(p);
    let e = cdf(x) - p;
    let u = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
    x - u / (1.0 + 0.5 * x * u)
}

/// Upper tail of the chi-square distribution with one degree of freedom.
pub fn chi2_1_sf(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::OutOfDomain {
            what: "chi-square statistic",
            value: x,
        });
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    Ok(libm::erfc((0.5 * x).sqrt()))
}

/// Upper `level` critical value of chi-square(1): `quantile(1 - level/2)^2`.
pub fn chi2_1_critical(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::OutOfDomain {
            what: "nominal level",
            value: level,
        });
    }
    let z = -quantile(0.5 * level)?;
    Ok(z * z)
}
