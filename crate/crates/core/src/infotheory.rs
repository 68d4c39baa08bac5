//! Reliability-constrained delay, capacity and power bounds.
//!
//! Rates and exponents are in nats; packet sizes are converted with
//! `B_nats = B·ln 2`. The Gallager function for a Gaussian input over a
//! complex interference-plus-noise channel is `E0(ρ) = ρ·ln(1 + λ/(1+ρ))`.

use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::seeding;
use crate::specfun::{golden_section_min, meijer_g_ln1p};

/// Points on the uniform `ρ ∈ [0, 1]` grid.
pub const RHO_GRID_POINTS: usize = 201;

fn rho_grid<T: Real>() -> impl Iterator<Item = T> {
    (0..RHO_GRID_POINTS).map(|i| T::lit(i as f64 / (RHO_GRID_POINTS - 1) as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoMode {
    #[default]
    Fixed,
    Optimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct ReliabilitySpec<T> {
    /// Target decoding error probability.
    pub phi_e: T,
    /// Packet payload in bits.
    pub info_bits: u32,
    pub rho: T,
    pub rho_mode: RhoMode,
}

impl<T: Real> Default for ReliabilitySpec<T> {
    fn default() -> Self {
        Self { phi_e: T::lit(1e-4), info_bits: 256, rho: T::one(), rho_mode: RhoMode::Fixed }
    }
}

impl<T: Real> ReliabilitySpec<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.phi_e > T::zero() && self.phi_e <= T::one()) {
            return Err(Error::invalid(format!("phi_e must lie in (0, 1], got {}", self.phi_e)));
        }
        if self.info_bits == 0 {
            return Err(Error::invalid("info_bits must be at least 1"));
        }
        if !(self.rho >= T::zero() && self.rho <= T::one()) {
            return Err(Error::invalid(format!("rho must lie in [0, 1], got {}", self.rho)));
        }
        Ok(())
    }

    pub fn info_nats(&self) -> T {
        T::lit(self.info_bits as f64) * T::LN_2()
    }

    /// `ρ·B_nats − ln ϕ_e`.
    pub fn numerator(&self, rho: T) -> T {
        rho * self.info_nats() - self.phi_e.ln()
    }
}

pub fn gallager_e0<T: Real>(rho: T, sinr: T) -> T {
    if rho == T::zero() || sinr == T::zero() {
        return T::zero();
    }
    rho * (sinr / (T::one() + rho)).ln_1p()
}

/// `max_ρ E0(ρ) − ρ·rate`, clamped at zero.
pub fn sphere_packing_exponent<T: Real>(rate: T, sinr: T) -> T {
    let objective = |rho: T| gallager_e0(rho, sinr) - rho * rate;
    let (best_idx, best) =
        rho_grid::<T>()
            .map(objective)
            .enumerate()
            .fold((0, T::neg_infinity()), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let step = T::one() / T::lit((RHO_GRID_POINTS - 1) as f64);
    let lo = T::lit(best_idx.saturating_sub(1) as f64) * step;
    let hi = (T::lit((best_idx + 1) as f64) * step).min(T::one());
    let (_, neg) = golden_section_min(|r| -objective(r), lo, hi, T::lit(1e-12));
    best.max(-neg).max(T::zero())
}

/// Minimum codeword length meeting the reliability target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DelayBound<T> {
    /// Symbols; `+∞` when the channel has zero capacity.
    pub d_c_min: T,
    pub rho_used: T,
    pub sinr_used: T,
    /// Time slots occupied by one codeword (2 for a relayed link).
    pub slots_factor: u32,
}

impl<T: Real> DelayBound<T> {
    pub fn is_outage(&self) -> bool {
        self.d_c_min.is_infinite()
    }

    pub fn with_slots(self, slots_factor: u32) -> Self {
        Self { slots_factor, ..self }
    }

    /// Wall-clock duration at symbol rate `bandwidth_hz`.
    pub fn seconds(&self, bandwidth_hz: T) -> T {
        self.d_c_min * T::lit(self.slots_factor as f64) / bandwidth_hz
    }
}

fn delay_at<T: Real>(spec: &ReliabilitySpec<T>, rho: T, sinr: T) -> T {
    let num = spec.numerator(rho);
    if num <= T::zero() {
        return T::zero();
    }
    let den = meijer_g_ln1p(sinr);
    if den <= T::zero() {
        return T::infinity();
    }
    num / den
}

pub fn min_delay<T: Real>(spec: &ReliabilitySpec<T>, sinr: T) -> DelayBound<T> {
    let rho = match spec.rho_mode {
        RhoMode::Fixed => spec.rho,
        RhoMode::Optimize => best_rho(|rho| delay_at(spec, rho, sinr)),
    };
    DelayBound { d_c_min: delay_at(spec, rho, sinr), rho_used: rho, sinr_used: sinr, slots_factor: 1 }
}

// First grid point attaining the minimum.
fn best_rho<T: Real, F: Fn(T) -> T>(cost: F) -> T {
    rho_grid::<T>()
        .map(|r| (r, cost(r)))
        .fold((T::zero(), T::infinity()), |acc, (r, c)| if c < acc.1 { (r, c) } else { acc })
        .0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InterferenceSymbolModel {
    /// `‖s_I‖² = 1` exactly.
    #[default]
    ConstantUnit,
    /// Unit-mean exponential symbol powers, `draws` per block, block `j`
    /// seeded from `(seed, j)`.
    GaussianCodebook { draws: u32, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct CapacityBoundSpec<T> {
    /// Symbols per coherence block.
    pub t_c: u64,
    /// Packet length in symbols; a multiple of `t_c`.
    pub n_p: u64,
    pub zeta: T,
    pub interference_symbol_model: InterferenceSymbolModel,
}

impl<T: Real> Default for CapacityBoundSpec<T> {
    fn default() -> Self {
        Self { t_c: 16, n_p: 256, zeta: T::zero(), interference_symbol_model: InterferenceSymbolModel::ConstantUnit }
    }
}

impl<T: Real> CapacityBoundSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if self.t_c == 0 || self.n_p == 0 || !self.n_p.is_multiple_of(self.t_c) {
            return Err(Error::invalid(format!(
                "n_p ({}) must be a positive multiple of t_c ({})",
                self.n_p, self.t_c
            )));
        }
        if !(self.zeta >= T::zero() && self.zeta.is_finite()) {
            return Err(Error::invalid("zeta must be finite and non-negative"));
        }
        if let InterferenceSymbolModel::GaussianCodebook { draws: 0, .. } = self.interference_symbol_model {
            return Err(Error::invalid("gaussian_codebook needs at least one draw"));
        }
        Ok(())
    }
}

/// Fano-type upper bound on the achievable rate in nats per symbol.
///
/// `signal_w` is the received intended power `P_u d^-α ‖h‖²` and
/// `interferers_w` the per-interferer received powers before symbol scaling.
pub fn capacity_upper_bound<T: Real>(
    signal_w: T,
    interferers_w: &[T],
    noise_w: T,
    spec: &CapacityBoundSpec<T>,
) -> Result<T> {
    spec.validate()?;
    if signal_w == T::zero() {
        return Ok(spec.zeta);
    }
    let t_c = T::lit(spec.t_c as f64);
    let n_p = T::lit(spec.n_p as f64);
    let blocks = spec.n_p / spec.t_c;
    let clean = (t_c - T::one()) / t_c * (signal_w / noise_w).ln_1p();
    let jammed = match spec.interference_symbol_model {
        InterferenceSymbolModel::ConstantUnit => {
            let i_total = interferers_w.iter().fold(T::zero(), |a, &p| a + p);
            T::lit(blocks as f64) * (signal_w / (i_total + noise_w)).ln_1p()
        }
        InterferenceSymbolModel::GaussianCodebook { draws, seed } => (0..blocks).fold(T::zero(), |acc, j| {
            let mut rng = seeding::stream(seed, j);
            let mut sum = T::zero();
            for _ in 0..draws {
                let i_total = interferers_w.iter().fold(T::zero(), |a, &p| {
                    let s: f64 = Exp1.sample(&mut rng);
                    a + p * T::lit(s)
                });
                sum = sum + (signal_w / (i_total + noise_w)).ln_1p();
            }
            acc + sum / T::lit(draws as f64)
        }),
    };
    Ok(clean + jammed / n_p + spec.zeta)
}

/// Transmit power that meets the reliability target within `d_max`
/// symbols.
///
/// `path_gain` is `d^-α`. The `−1` inside the braces is taken relative to
/// the impairment power, so the result inverts [`min_delay`] exactly at
/// `ρ = 0`.
pub fn min_power<T: Real>(
    spec: &ReliabilitySpec<T>,
    d_max: T,
    path_gain: T,
    interference_w: T,
    noise_w: T,
    fading_gain_sq: T,
) -> Result<T> {
    if !(d_max > T::zero()) {
        return Err(Error::InfeasibleDelay(d_max.as_f64()));
    }
    let factor = |rho: T| (T::one() + rho) * (spec.numerator(rho) / d_max).exp() - T::one();
    let rho = match spec.rho_mode {
        RhoMode::Fixed => spec.rho,
        RhoMode::Optimize => best_rho(factor),
    };
    let gain = path_gain * fading_gain_sq;
    let required = factor(rho).max(T::zero()) * (interference_w + noise_w);
    if required == T::zero() {
        return Ok(T::zero());
    }
    if gain <= T::zero() {
        return Ok(T::infinity());
    }
    Ok(required / gain)
}

/// `exp(−d_c·E(R))`, clamped to `[0, 1]`.
pub fn error_probability_estimate<T: Real>(d_c: T, rate: T, sinr: T) -> Result<T> {
    if !(d_c > T::zero()) {
        return Err(Error::invalid(format!("codeword length must be positive, got {d_c}")));
    }
    let e = sphere_packing_exponent(rate, sinr);
    Ok((-d_c * e).exp().min(T::one()).max(T::zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{integrate, Tolerance};
    use proptest::prelude::*;

    const D_REF: f64 = 27.0173170936924;

    fn fig6() -> ReliabilitySpec<f64> {
        ReliabilitySpec::default()
    }

    #[test]
    fn e0_examples() {
        assert_eq!(gallager_e0(0.0, 1000.0), 0.0);
        assert!((gallager_e0(1.0, 1000.0_f64) - 501f64.ln()).abs() < 1e-12);
        for rho in [0.0, 0.3, 1.0] {
            assert_eq!(gallager_e0(rho, 0.0), 0.0);
        }
    }

    #[test]
    fn e0_slope_at_origin_is_capacity() {
        for sinr in [0.1, 1.0, 10.0, 1000.0_f64] {
            let slope = gallager_e0(1e-6, sinr) / 1e-6;
            assert!((slope - sinr.ln_1p()).abs() < 1e-6, "sinr {sinr}");
        }
    }

    // Real-valued E0 from its defining double integral with Gaussian input
    // N(0, λ) and unit Gaussian noise; a complex channel is two such
    // dimensions at the same per-dimension ratio.
    fn e0_real_numeric(rho: f64, sinr: f64) -> f64 {
        let s = 1.0 / (1.0 + rho);
        let tol = Tolerance::new(1e-15, 1e-12);
        let outer = |y: f64| {
            let centre = y * sinr / (sinr + 1.0 + rho);
            let width = (sinr * (1.0 + rho) / (sinr + 1.0 + rho)).sqrt();
            let inner = |x: f64| {
                let q = (-x * x / (2.0 * sinr)).exp() / (2.0 * std::f64::consts::PI * sinr).sqrt();
                let p = (-(y - x).powi(2) / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
                q * p.powf(s)
            };
            let v = integrate(inner, centre - 40.0 * width, centre + 40.0 * width, tol).unwrap().value;
            v.powf(1.0 + rho)
        };
        let half = 40.0 * (sinr + 2.0).sqrt();
        -integrate(outer, -half, half, tol).unwrap().value.ln()
    }

    #[test]
    fn e0_matches_defining_integral() {
        for sinr in [1.0, 10.0, 100.0] {
            let mut prev = 0.0;
            let mut prev_gain = f64::INFINITY;
            for k in 1..=4 {
                let rho = k as f64 * 0.25;
                let numeric = 2.0 * e0_real_numeric(rho, sinr);
                assert!((numeric - gallager_e0(rho, sinr)).abs() < 1e-6, "rho {rho} sinr {sinr}: {numeric}");
                assert!(numeric > prev);
                let gain = numeric - prev;
                assert!(gain < prev_gain, "concavity at rho {rho}, sinr {sinr}");
                prev = numeric;
                prev_gain = gain;
            }
        }
    }

    #[test]
    fn sphere_packing_examples() {
        let c = 1000f64.ln_1p();
        assert_eq!(sphere_packing_exponent(c, 1000.0), 0.0);
        assert_eq!(sphere_packing_exponent(c + 1.0, 1000.0), 0.0);
        assert!((sphere_packing_exponent(0.0, 1000.0_f64) - 501f64.ln()).abs() < 1e-12);
        let dense = (0..=1_000_000)
            .map(|i| {
                let rho = i as f64 / 1e6;
                gallager_e0(rho, 1000.0) - rho * 3.0
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((sphere_packing_exponent(3.0, 1000.0) - dense).abs() < 1e-6);
        // interior optimum exercises the golden-section step
        let interior = sphere_packing_exponent(6.6, 1000.0_f64);
        let dense = (0..=1_000_000)
            .map(|i| {
                let rho = i as f64 / 1e6;
                gallager_e0(rho, 1000.0) - rho * 6.6
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(interior > 0.0 && (interior - dense).abs() < 1e-9);
    }

    #[test]
    fn delay_examples() {
        let d = min_delay(&fig6(), 1000.0);
        assert!((d.d_c_min - D_REF).abs() < 1e-10);
        assert_eq!(d.rho_used, 1.0);
        let free = ReliabilitySpec { phi_e: 1.0, rho: 0.0, ..fig6() };
        assert_eq!(min_delay(&free, 10.0).d_c_min, 0.0);
        let dead = min_delay(&fig6(), 0.0);
        assert!(dead.is_outage() && dead.d_c_min > 0.0);
    }

    #[test]
    fn delay_seconds_counts_slots() {
        let d = min_delay(&fig6(), 1000.0).with_slots(2);
        assert!((d.seconds(1e6) - 2.0 * D_REF / 1e6).abs() < 1e-15);
    }

    #[test]
    fn optimized_rho_drops_rate_term() {
        let spec = ReliabilitySpec { rho_mode: RhoMode::Optimize, ..fig6() };
        let d = min_delay(&spec, 1000.0);
        assert_eq!(d.rho_used, 0.0);
        assert!((d.d_c_min - 1e4f64.ln() / 1000f64.ln_1p()).abs() < 1e-12);
    }

    #[test]
    fn delay_flattens_with_snr() {
        let grid: Vec<f64> = (0..21).map(|i| 2.5 * i as f64).collect();
        let d: Vec<f64> = grid.iter().map(|db| min_delay(&fig6(), 10f64.powf(db / 10.0)).d_c_min).collect();
        for w in d.windows(2) {
            assert!(w[1] < w[0]);
        }
        for w in d.windows(3) {
            assert!(w[2] - 2.0 * w[1] + w[0] > 0.0);
        }
    }

    #[test]
    fn capacity_examples() {
        let single = CapacityBoundSpec { t_c: 1, n_p: 4, ..CapacityBoundSpec::default() };
        let v = capacity_upper_bound(1e-9, &[1e-9], 1e-10, &single).unwrap();
        assert!((v - (1e-9_f64 / 1.1e-9).ln_1p()).abs() < 1e-14);
        let spec = CapacityBoundSpec { zeta: 0.125, ..CapacityBoundSpec::default() };
        assert_eq!(capacity_upper_bound(0.0, &[1e-9], 1e-10, &spec).unwrap(), 0.125);
        let long = CapacityBoundSpec { t_c: 1_000_000, n_p: 1_000_000, ..CapacityBoundSpec::default() };
        let lambda = 1000.0;
        let v = capacity_upper_bound(lambda * 1e-10, &[], 1e-10, &long).unwrap();
        assert!((v - 1000f64.ln_1p()).abs() < 1e-9);
        let d = min_delay(&fig6(), lambda);
        assert!((fig6().numerator(1.0) / d.d_c_min - v).abs() < 1e-9);
    }

    #[test]
    fn capacity_rejects_bad_blocks() {
        let spec = CapacityBoundSpec::<f64> { t_c: 3, n_p: 10, ..CapacityBoundSpec::default() };
        assert!(capacity_upper_bound(1.0, &[], 1.0, &spec).is_err());
    }

    #[test]
    fn gaussian_codebook_is_seeded_and_above_constant() {
        let model = InterferenceSymbolModel::GaussianCodebook { draws: 20_000, seed: 7 };
        let g = CapacityBoundSpec { t_c: 4, n_p: 8, zeta: 0.0, interference_symbol_model: model };
        let c = CapacityBoundSpec { interference_symbol_model: InterferenceSymbolModel::ConstantUnit, ..g };
        let a: f64 = capacity_upper_bound(1e-9, &[5e-10, 5e-10], 1e-10, &g).unwrap();
        let b: f64 = capacity_upper_bound(1e-9, &[5e-10, 5e-10], 1e-10, &g).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        // ln(1 + S/(I·x + N)) is convex in x
        assert!(a > capacity_upper_bound(1e-9, &[5e-10, 5e-10], 1e-10, &c).unwrap());
    }

    #[test]
    fn min_power_examples() {
        let free = ReliabilitySpec { phi_e: 1.0, rho: 0.0, ..fig6() };
        assert_eq!(min_power(&free, 50.0, 1e-4, 1e-9, 1e-12, 1.0).unwrap(), 0.0);
        assert!(matches!(min_power(&fig6(), 0.0, 1e-4, 1e-9, 1e-12, 1.0), Err(Error::InfeasibleDelay(_))));
        let far = min_power(&fig6(), 1e12, 1e-4, 1e-9, 1e-12, 1.0).unwrap();
        assert!((far / ((1e-9 + 1e-12) / 1e-4) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn min_power_slope_in_noise_dominated_regime() {
        let i = 1e-9;
        let p = |nip_db: f64| {
            let n = i * 10f64.powf(nip_db / 10.0);
            10.0 * min_power(&fig6(), 40.0, 1e-5, i, n, 0.8).unwrap().log10()
        };
        let slope = (p(80.0) - p(70.0)) / 10.0;
        assert!((slope - 1.0).abs() < 1e-6, "slope {slope}");
    }

    #[test]
    fn error_estimate_closes_the_loop() {
        let spec = fig6();
        let sinr = 1000.0_f64;
        assert_eq!(error_probability_estimate(10.0, 1000f64.ln_1p(), sinr).unwrap(), 1.0);
        let d = spec.numerator(1.0) / gallager_e0(1.0, sinr);
        let pe = error_probability_estimate(d, spec.info_nats() / d, sinr).unwrap();
        assert!(pe <= spec.phi_e * (1.0 + 1e-9), "{pe}");
        assert_eq!(error_probability_estimate(1e9, 1.0, sinr).unwrap(), 0.0);
        assert!(error_probability_estimate(0.0, 1.0, sinr).is_err());
    }

    proptest! {
        #[test]
        fn e0_concave_nondecreasing(sinr in 0.0..1e5f64, r in 0.0..0.98f64) {
            let h = 0.01;
            let (a, b, c) = (gallager_e0(r, sinr), gallager_e0(r + h, sinr), gallager_e0(r + 2.0 * h, sinr));
            prop_assert!(b >= a);
            prop_assert!(c - 2.0 * b + a <= 1e-12 * (1.0 + c.abs()));
        }

        #[test]
        fn delay_monotone(sinr in 1e-3..1e6f64, bits in 1u32..4096, phi_exp in 1.0..12.0f64) {
            let spec = ReliabilitySpec { info_bits: bits, phi_e: 10f64.powf(-phi_exp), ..fig6() };
            let d = min_delay(&spec, sinr).d_c_min;
            prop_assert!(d > 0.0);
            prop_assert!(min_delay(&spec, sinr * 1.01).d_c_min < d);
            let more_bits = ReliabilitySpec { info_bits: bits + 1, ..spec };
            let stricter = ReliabilitySpec { phi_e: spec.phi_e / 2.0, ..spec };
            prop_assert!(min_delay(&more_bits, sinr).d_c_min > d);
            prop_assert!(min_delay(&stricter, sinr).d_c_min > d);
        }

        #[test]
        fn power_inverts_delay_at_rho_zero(d_max in 1.0..500.0f64, g in 1e-9..1e-3f64, i in 0.0..1e-6f64, n in 1e-14..1e-9f64, h2 in 0.05..4.0f64) {
            let spec = ReliabilitySpec { rho: 0.0, ..fig6() };
            let p = min_power(&spec, d_max, g, i, n, h2).unwrap();
            let sinr = p * g * h2 / (i + n);
            prop_assert!((min_delay(&spec, sinr).d_c_min / d_max - 1.0).abs() < 1e-9);
        }

        #[test]
        fn power_monotone(d_max in 1.0..500.0f64, i in 0.0..1e-6f64) {
            let p = |d: f64, i: f64| min_power(&fig6(), d, 1e-6, i, 1e-12, 1.0).unwrap();
            prop_assert!(p(2.0 * d_max, i) < p(d_max, i));
            prop_assert!(p(d_max, i * 2.0 + 1e-12) >= p(d_max, i));
        }

        #[test]
        fn capacity_converges_without_interference(lambda in 1e-3..1e4f64) {
            let spec = CapacityBoundSpec { t_c: 1_000_000, n_p: 1_000_000, ..CapacityBoundSpec::default() };
            let v = capacity_upper_bound(lambda, &[1e-30], 1.0, &spec).unwrap();
            prop_assert!((v - lambda.ln_1p()).abs() < 1e-6);
        }
    }
}
