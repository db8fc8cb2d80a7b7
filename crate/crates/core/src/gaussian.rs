//! Standard normal CDF, density and quantile, plus the truncated quantile
//! `Φ_n⁻¹` that clamps at `±√(½ log n)`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Standard normal density.
#[inline]
pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

/// Standard normal CDF, `½ erfc(−x/√2)`.
#[inline]
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal quantile.
///
/// Wichura's AS241 rational approximation followed by one Newton step
/// against [`std_normal_cdf`]. The lower half is computed directly and the
/// upper half by reflection, so `Φ⁻¹(1 − p) = −Φ⁻¹(p)` holds exactly whenever
/// `1 − p` is representable.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("quantile level {p} is outside (0, 1)")));
    }
    Ok(quantile_unchecked(p))
}

#[inline]
pub(crate) fn quantile_unchecked(p: f64) -> f64 {
    if p > 0.5 {
        // 1 - p is exact for p in [0.5, 1)
        -lower_quantile(1.0 - p)
    } else {
        lower_quantile(p)
    }
}

/// Quantile for `p ∈ (0, ½]`.
fn lower_quantile(p: f64) -> f64 {
    if p == 0.5 {
        return 0.0;
    }
    let x = as241(p);
    // Newton step; Φ(x) - p is accurate in the tail because erfc is
    let err = std_normal_cdf(x) - p;
    let d = std_normal_pdf(x);
    if d > 0.0 {
        x - err / d
    } else {
        x
    }
}

#[allow(clippy::excessive_precision)]
fn as241(p: f64) -> f64 {
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q
            * (((((((2.509_080_928_730_122_672_7e3 * r + 3.343_057_558_358_812_810_5e4) * r
                + 6.726_577_092_700_870_085_3e4)
                * r
                + 4.592_195_393_154_987_145_7e4)
                * r
                + 1.373_169_376_550_946_112_5e4)
                * r
                + 1.971_590_950_306_551_442_7e3)
                * r
                + 1.331_416_678_917_843_774_5e2)
                * r
                + 3.387_132_872_796_366_608_0)
            / (((((((5.226_495_278_852_854_561_0e3 * r + 2.872_908_573_572_194_267_4e4) * r
                + 3.930_789_580_009_271_061_0e4)
                * r
                + 2.121_379_430_158_659_586_7e4)
                * r
                + 5.394_196_021_424_751_107_7e3)
                * r
                + 6.871_870_074_920_579_083_0e2)
                * r
                + 4.231_333_070_160_091_125_2e1)
                * r
                + 1.0);
    }

    let tail = if q < 0.0 { p } else { 1.0 - p };
    let mut r = (-tail.ln()).sqrt();
    let x = if r <= 5.0 {
        r -= 1.6;
        (((((((7.745_450_142_783_414_076_4e-4 * r + 2.272_384_498_926_918_458_33e-2) * r
            + 2.417_807_251_774_506_117_7e-1)
            * r
            + 1.270_458_252_452_368_382_58)
            * r
            + 3.647_848_324_763_204_605_04)
            * r
            + 5.769_497_221_460_691_405_5)
            * r
            + 4.630_337_846_156_545_295_9)
            * r
            + 1.423_437_110_749_683_577_34)
            / (((((((1.050_750_071_644_416_843_24e-9 * r + 5.475_938_084_995_344_946e-4)
                * r
                + 1.519_866_656_361_645_719_66e-2)
                * r
                + 1.481_039_764_274_800_745_9e-1)
                * r
                + 6.897_673_349_851_000_045_5e-1)
                * r
                + 1.676_384_830_183_803_849_4)
                * r
                + 2.053_191_626_637_758_821_87)
                * r
                + 1.0)
    } else {
        r -= 5.0;
        (((((((2.010_334_399_292_288_132_65e-7 * r + 2.711_555_568_743_487_578_15e-5) * r
            + 1.242_660_947_388_078_438_6e-3)
            * r
            + 2.653_218_952_657_612_309_3e-2)
            * r
            + 2.965_605_718_285_048_912_3e-1)
            * r
            + 1.784_826_539_917_291_335_8)
            * r
            + 5.463_784_911_164_114_369_9)
            * r
            + 6.657_904_643_501_103_777_2)
            / (((((((2.044_263_103_389_939_785_64e-15 * r + 1.421_511_758_316_445_888_7e-7)
                * r
                + 1.846_318_317_510_054_681_8e-5)
                * r
                + 7.868_691_311_456_132_591e-4)
                * r
                + 1.487_536_129_085_061_485_25e-2)
                * r
                + 1.369_298_809_227_358_053_1e-1)
                * r
                + 5.998_322_065_558_879_376_9e-1)
                * r
                + 1.0)
    };
    if q < 0.0 {
        -x
    } else {
        x
    }
}

/// Truncation of the Gaussian quantile at sample size `n`.
///
/// `cut = √(½ log n)` and `alpha_n = Φ(cut)`. The clamp values are computed
/// once here so every caller at the same `n` sees bit-identical bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationSpec {
    pub n: usize,
    pub cut: f64,
    pub alpha_n: f64,
    /// `Φ⁻¹(alpha_n)`; equals `cut` up to rounding.
    upper: f64,
}

impl TruncationSpec {
    pub fn lower_level(&self) -> f64 {
        1.0 - self.alpha_n
    }

    /// Clamp value used above `alpha_n`; the lower clamp is its negative.
    pub fn clamp_value(&self) -> f64 {
        self.upper
    }

    /// `Φ_n⁻¹(p)`.
    #[inline]
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("quantile level {p} is outside (0, 1)")));
        }
        Ok(self.quantile_unchecked(p))
    }

    #[inline]
    pub(crate) fn quantile_unchecked(&self, p: f64) -> f64 {
        if p >= self.alpha_n {
            self.upper
        } else if p <= 1.0 - self.alpha_n {
            -self.upper
        } else {
            quantile_unchecked(p)
        }
    }
}

pub fn truncation_level(n: usize) -> Result<TruncationSpec> {
    if n < 1 {
        return Err(Error::Domain("truncation level needs n >= 1".into()));
    }
    let cut = (0.5 * (n as f64).ln()).sqrt();
    let alpha_n = std_normal_cdf(cut);
    let upper = if n == 1 { 0.0 } else { quantile_unchecked(alpha_n) };
    Ok(TruncationSpec {
        n,
        cut,
        alpha_n,
        upper,
    })
}

/// `Φ_n⁻¹(p)`: the quantile clamped to `[Φ⁻¹(1 − α_n), Φ⁻¹(α_n)]`.
pub fn truncated_quantile(p: f64, n: usize) -> Result<f64> {
    truncation_level(n)?.quantile(p)
}

/// Maximum slope of `Φ_n⁻¹`, attained at the truncation points:
/// `1/φ(cut) = √(2π) n^{1/4}`.
pub fn quantile_slope_bound(n: usize) -> f64 {
    (2.0 * PI).sqrt() * (n as f64).powf(0.25)
}
