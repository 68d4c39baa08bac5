//! Per-link propagation: elevation-dependent LOS probability and path-loss
//! exponent, Rician small-scale fading, and the SNR / SIR figures built on
//! them.

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance, elevation_angle, Position3D};
use crate::scalar::{db_to_lin, Real};
use crate::specfun::{
    bessel_i0_scaled, integrate_semi_infinite_with_breaks, meijer_g_mellin_barnes, ContourConfig, MeijerGSpec,
    Tolerance,
};

/// Rice factors above this are treated as pure LOS.
pub const MAX_RICE_FACTOR_DB: f64 = 100.0;

/// How interfering amplitudes combine at a receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterferenceSum {
    /// Sum of received powers (independent phases, averaged).
    #[default]
    Power,
    /// `|Σ amplitude·e^{iφ}|²` with explicit phases.
    Coherent,
}

/// Whether a link touches the ground; selects the Rice-factor range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkKind {
    GroundToAir,
    AirToAir,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default, bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct ChannelParams<T> {
    pub f1: T,
    /// Per degree.
    pub f2: T,
    #[serde(rename = "k_ground_min_db")]
    pub k_db_ground_min: T,
    #[serde(rename = "k_ground_max_db")]
    pub k_db_ground_max: T,
    #[serde(rename = "k_air_min_db")]
    pub k_db_air_min: T,
    #[serde(rename = "k_air_max_db")]
    pub k_db_air_max: T,
    pub alpha_los: T,
    pub alpha_nlos: T,
    /// N0 in dBm/Hz.
    #[serde(rename = "noise_density_dbm_per_hz")]
    pub noise_density: T,
    pub bandwidth_hz: T,
    pub carrier_hz: T,
    #[serde(rename = "shadowing")]
    pub shadowing_enabled: bool,
    pub shadow_sigma_los_db: T,
    pub shadow_sigma_nlos_db: T,
    pub interference_sum: InterferenceSum,
}

impl<T: Real> Default for ChannelParams<T> {
    fn default() -> Self {
        Self {
            f1: T::lit(12.08),
            f2: T::lit(0.11),
            k_db_ground_min: T::lit(5.0),
            k_db_ground_max: T::lit(12.0),
            k_db_air_min: T::lit(10.0),
            k_db_air_max: T::lit(12.0),
            alpha_los: T::lit(2.0),
            alpha_nlos: T::lit(3.5),
            noise_density: T::lit(-174.0),
            bandwidth_hz: T::lit(1e6),
            carrier_hz: T::lit(2e9),
            shadowing_enabled: false,
            shadow_sigma_los_db: T::lit(4.0),
            shadow_sigma_nlos_db: T::lit(6.0),
            interference_sum: InterferenceSum::Power,
        }
    }
}

impl<T: Real> ChannelParams<T> {
    pub fn validate(&self) -> Result<()> {
        let two = T::lit(2.0);
        let six = T::lit(6.0);
        if !(self.f1 > T::zero() && self.f2 > T::zero()) {
            return Err(Error::invalid("f1 and f2 must be positive"));
        }
        if !(two <= self.alpha_los && self.alpha_los <= self.alpha_nlos && self.alpha_nlos <= six) {
            return Err(Error::invalid(format!(
                "path-loss exponents must satisfy 2 ≤ alpha_los ({}) ≤ alpha_nlos ({}) ≤ 6",
                self.alpha_los, self.alpha_nlos
            )));
        }
        if !(self.bandwidth_hz > T::zero() && self.bandwidth_hz.is_finite()) {
            return Err(Error::invalid("bandwidth_hz must be positive"));
        }
        if !self.noise_density.is_finite() {
            return Err(Error::invalid("noise density must be finite"));
        }
        if self.k_db_ground_min > self.k_db_ground_max || self.k_db_air_min > self.k_db_air_max {
            return Err(Error::invalid("Rice factor ranges must be ordered min ≤ max"));
        }
        if self.shadow_sigma_los_db < T::zero() || self.shadow_sigma_nlos_db < T::zero() {
            return Err(Error::invalid("shadowing deviations must be non-negative"));
        }
        Ok(())
    }

    /// N0 in W/Hz: `10^{(N0_dBm - 30)/10}`.
    pub fn noise_density_w_per_hz(&self) -> T {
        db_to_lin(self.noise_density - T::lit(30.0))
    }

    /// Thermal noise power `B·N0` in watts.
    pub fn noise_power_w(&self) -> T {
        self.bandwidth_hz * self.noise_density_w_per_hz()
    }

    /// Rice factor for a link at `theta` degrees: linear in dB between the
    /// range end points at 0° and 90°.
    pub fn rice_factor_db(&self, theta: T, kind: LinkKind) -> T {
        let (lo, hi) = match kind {
            LinkKind::GroundToAir => (self.k_db_ground_min, self.k_db_ground_max),
            LinkKind::AirToAir => (self.k_db_air_min, self.k_db_air_max),
        };
        let frac = (theta / T::lit(90.0)).max(T::zero()).min(T::one());
        lo + (hi - lo) * frac
    }

    /// Geometry-derived description of the link `from → to`.
    pub fn link(&self, from: &Position3D<T>, to: &Position3D<T>) -> Result<LinkGeometry<T>> {
        let d = distance(from, to);
        if d == T::zero() {
            return Err(Error::DegenerateLink);
        }
        let theta = elevation_angle(from, to)?;
        let kind = if from.is_ground() || to.is_ground() { LinkKind::GroundToAir } else { LinkKind::AirToAir };
        Ok(LinkGeometry {
            distance_m: d,
            elevation_deg: theta,
            alpha_eff: path_loss_exponent(theta, self),
            p_los: los_probability(theta, self),
            rician: rician_from_k(self.rice_factor_db(theta, kind)),
            kind,
        })
    }
}

/// `1 / (1 + f1·exp(-f2·(θ - f1)))` with θ in degrees.
pub fn los_probability<T: Real>(theta: T, params: &ChannelParams<T>) -> T {
    T::one() / (T::one() + params.f1 * (-params.f2 * (theta - params.f1)).exp())
}

/// LOS-probability weighted blend of the LOS and NLOS exponents.
pub fn path_loss_exponent<T: Real>(theta: T, params: &ChannelParams<T>) -> T {
    params.alpha_nlos + (params.alpha_los - params.alpha_nlos) * los_probability(theta, params)
}

/// Rician fading normalised to unit mean power: `ρ² + 2σ² = 1`,
/// `K = ρ² / (2σ²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RicianParams<T> {
    pub rho_h: T,
    pub sigma_h: T,
    pub k_db: T,
}

impl<T: Real> RicianParams<T> {
    /// From explicit components, which must already satisfy the unit-power
    /// normalisation.
    pub fn from_components(rho_h: T, sigma_h: T) -> Result<Self> {
        if !(rho_h >= T::zero() && sigma_h > T::zero()) {
            return Err(Error::invalid("Rician parameters need rho_h ≥ 0 and sigma_h > 0"));
        }
        let power = rho_h * rho_h + T::lit(2.0) * sigma_h * sigma_h;
        if (power - T::one()).abs() > T::lit(1e-12).max(T::epsilon() * T::lit(8.0)) {
            return Err(Error::invalid(format!("Rician mean power {power} is not 1")));
        }
        let k_db = T::lit(10.0) * (rho_h * rho_h / (T::lit(2.0) * sigma_h * sigma_h)).log10();
        Ok(Self { rho_h, sigma_h, k_db })
    }

    /// `E[h²]`.
    pub fn mean_power(&self) -> T {
        self.rho_h * self.rho_h + T::lit(2.0) * self.sigma_h * self.sigma_h
    }
}

/// Solve `K = ρ²/(2σ²)` together with `ρ² + 2σ² = 1`; `K` is clamped at
/// [`MAX_RICE_FACTOR_DB`].
pub fn rician_from_k<T: Real>(k_db: T) -> RicianParams<T> {
    let k_db = if k_db.is_nan() { T::zero() } else { k_db.min(T::lit(MAX_RICE_FACTOR_DB)) };
    let k = db_to_lin(k_db);
    let two_sigma_sq = T::one() / (T::one() + k);
    let rho_sq = k / (T::one() + k);
    RicianParams { rho_h: rho_sq.sqrt(), sigma_h: (two_sigma_sq / T::lit(2.0)).sqrt(), k_db }
}

/// Rician density `(h/σ²) exp(-(h²+ρ²)/(2σ²)) I0(hρ/σ²)`, evaluated with the
/// scaled Bessel function so that large `hρ/σ²` does not overflow.
pub fn rician_pdf<T: Real>(h: T, p: &RicianParams<T>) -> T {
    if h <= T::zero() {
        return T::zero();
    }
    let s2 = p.sigma_h * p.sigma_h;
    let diff = h - p.rho_h;
    (h / s2) * (-(diff * diff) / (T::lit(2.0) * s2)).exp() * bessel_i0_scaled(h * p.rho_h / s2)
}

/// One fading amplitude `|(ρ + σ g₁) + iσ g₂|`.
pub fn sample_rician<T: Real, R: Rng + ?Sized>(p: &RicianParams<T>, rng: &mut R) -> T {
    let g1: f64 = StandardNormal.sample(rng);
    let g2: f64 = StandardNormal.sample(rng);
    let re = p.rho_h + p.sigma_h * T::lit(g1);
    let im = p.sigma_h * T::lit(g2);
    re.hypot(im)
}

/// Lognormal shadowing multiplier on received power; 1 when disabled. The
/// LOS/NLOS state is drawn with the link's LOS probability.
pub fn sample_shadowing<T: Real, R: Rng + ?Sized>(link: &LinkGeometry<T>, params: &ChannelParams<T>, rng: &mut R) -> T {
    if !params.shadowing_enabled {
        return T::one();
    }
    let los = rng.random::<f64>() < link.p_los.as_f64();
    let sigma = if los { params.shadow_sigma_los_db } else { params.shadow_sigma_nlos_db };
    let g: f64 = StandardNormal.sample(rng);
    db_to_lin(sigma * T::lit(g))
}

/// Geometry-derived link description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry<T> {
    pub distance_m: T,
    pub elevation_deg: T,
    pub alpha_eff: T,
    pub p_los: T,
    pub rician: RicianParams<T>,
    pub kind: LinkKind,
}

impl<T: Real> LinkGeometry<T> {
    /// Large-scale power gain `d^{-α(θ)}`.
    pub fn path_gain(&self) -> T {
        self.distance_m.powf(-self.alpha_eff)
    }

    /// Received power `P·d^{-α}·h²`.
    pub fn received_power(&self, p_tx: T, h: T) -> T {
        p_tx * self.path_gain() * h * h
    }

    pub fn emission(&self, p_tx: T, h: T) -> Emission<T> {
        Emission { power_w: p_tx, path_gain: self.path_gain(), fading: h, phase: T::zero() }
    }
}

/// Instantaneous SNR `P·d^{-α}·h² / (B·N0)`.
pub fn instantaneous_snr<T: Real>(p_tx: T, link: &LinkGeometry<T>, h: T, params: &ChannelParams<T>) -> Result<T> {
    if link.distance_m <= T::zero() {
        return Err(Error::DegenerateLink);
    }
    if p_tx < T::zero() {
        return Err(Error::invalid("transmit power must be non-negative"));
    }
    Ok(link.received_power(p_tx, h) / params.noise_power_w())
}

/// A transmitter as seen from one receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Emission<T> {
    pub power_w: T,
    pub path_gain: T,
    pub fading: T,
    /// Carrier phase in radians; only used for coherent summation.
    pub phase: T,
}

impl<T: Real> Emission<T> {
    pub fn received_power(&self) -> T {
        self.power_w * self.path_gain * self.fading * self.fading
    }

    fn amplitude(&self) -> Complex<T> {
        Complex::from_polar((self.power_w * self.path_gain).sqrt() * self.fading, self.phase)
    }
}

/// Total interference power at a receiver.
pub fn interference_power<T: Real>(interferers: &[Emission<T>], mode: InterferenceSum) -> T {
    match mode {
        InterferenceSum::Power => interferers.iter().fold(T::zero(), |acc, e| acc + e.received_power()),
        InterferenceSum::Coherent => {
            interferers.iter().fold(Complex::new(T::zero(), T::zero()), |acc, e| acc + e.amplitude()).norm_sqr()
        }
    }
}

/// Signal-to-interference ratio; `+∞` when there is no interference.
pub fn sir<T: Real>(intended: &Emission<T>, interferers: &[Emission<T>], mode: InterferenceSum) -> T {
    let i = interference_power(interferers, mode);
    if i == T::zero() {
        return T::infinity();
    }
    intended.received_power() / i
}

/// Computed per-link quantities for one fading draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget<T> {
    pub distance_m: T,
    pub elevation_deg: T,
    pub alpha_eff: T,
    pub p_los: T,
    pub rician: RicianParams<T>,
    pub signal_w: T,
    pub noise_w: T,
    pub interference_w: T,
    /// λ
    pub snr_inst: T,
    /// λ̄ (fading-averaged; `E[h²] = 1`)
    pub snr_avg: T,
    /// γ
    pub sir: T,
    pub sinr: T,
}

impl<T: Real> LinkBudget<T> {
    pub fn evaluate(link: &LinkGeometry<T>, p_tx: T, h: T, noise_w: T, interference_w: T) -> Self {
        let signal = link.received_power(p_tx, h);
        let ratio = |den: T| if den > T::zero() { signal / den } else { T::infinity() };
        Self {
            distance_m: link.distance_m,
            elevation_deg: link.elevation_deg,
            alpha_eff: link.alpha_eff,
            p_los: link.p_los,
            rician: link.rician,
            signal_w: signal,
            noise_w,
            interference_w,
            snr_inst: ratio(noise_w),
            snr_avg: {
                let mean = p_tx * link.path_gain() * link.rician.mean_power();
                if noise_w > T::zero() {
                    mean / noise_w
                } else {
                    T::infinity()
                }
            },
            sir: ratio(interference_w),
            sinr: ratio(noise_w + interference_w),
        }
    }
}

/// Evaluator used by [`average_snr`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AverageSnrMode {
    /// `E_h[λ(h)]` by quadrature against the Rician density.
    Quadrature,
    /// Quadrature plus the Meijer-G closed form, compared against it.
    ClosedForm,
}

/// Relative deviation above which the closed form is flagged.
pub const CLOSED_FORM_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedFormReport<T> {
    /// Closed-form average SNR; `None` when the Meijer-G evaluation failed.
    pub value: Option<T>,
    /// The `G^{2,1}_{3,4}` factor on its own.
    pub meijer_g: Option<T>,
    pub rel_deviation: Option<T>,
    /// Set when the closed form disagrees with quadrature by more than
    /// [`CLOSED_FORM_TOLERANCE`] or could not be evaluated.
    pub discrepancy: bool,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AverageSnr<T> {
    /// Quadrature value (authoritative).
    pub value: T,
    /// `∫ h² f(h) dh`.
    pub mean_power: T,
    pub abs_error: T,
    pub closed_form: Option<ClosedFormReport<T>>,
}

/// `∫_0^∞ g(h) f(h) dh` for the Rician density, split around the LOS peak.
pub fn rician_expectation<T: Real, F: Fn(T) -> T>(p: &RicianParams<T>, g: F, tol: Tolerance<T>) -> Result<(T, T)> {
    let spread = T::lit(12.0) * p.sigma_h;
    let breaks = [p.rho_h - spread, p.rho_h, p.rho_h + spread];
    let q = integrate_semi_infinite_with_breaks(|h| g(h) * rician_pdf(h, p), &breaks, p.sigma_h, tol)?;
    Ok((q.value, q.abs_error))
}

/// Fading-averaged SNR of a link.
pub fn average_snr<T: Real>(
    p_tx: T,
    link: &LinkGeometry<T>,
    params: &ChannelParams<T>,
    mode: AverageSnrMode,
) -> Result<AverageSnr<T>> {
    if link.distance_m <= T::zero() {
        return Err(Error::DegenerateLink);
    }
    let tol = Tolerance::new(T::lit(1e-13), T::lit(1e-11));
    let (mean_power, err) = rician_expectation(&link.rician, |h| h * h, tol)?;
    let scale = p_tx * link.path_gain() / params.noise_power_w();
    let value = scale * mean_power;
    let closed_form = match mode {
        AverageSnrMode::Quadrature => None,
        AverageSnrMode::ClosedForm => Some(closed_form_report(p_tx, link, params, value)),
    };
    Ok(AverageSnr { value, mean_power, abs_error: scale * err, closed_form })
}

/// `√(P d^{-α}) (-2πσ²)/(B N0) · exp(-ρ²/(2σ²)) · G^{2,1}_{3,4}[2ρ²/σ² | -2,-1,½ ; 0,-2,0,½]`.
fn closed_form_report<T: Real>(
    p_tx: T,
    link: &LinkGeometry<T>,
    params: &ChannelParams<T>,
    reference: T,
) -> ClosedFormReport<T> {
    let r = &link.rician;
    let s2 = r.sigma_h * r.sigma_h;
    let rho2 = r.rho_h * r.rho_h;
    let x = T::lit(2.0) * rho2 / s2;
    let g = match meijer_g_mellin_barnes(&MeijerGSpec::rician_average_snr(), x, &ContourConfig::default()) {
        Ok(g) => g.value,
        Err(e) => {
            return ClosedFormReport {
                value: None,
                meijer_g: None,
                rel_deviation: None,
                discrepancy: true,
                failure: Some(e.to_string()),
            }
        }
    };
    let prefactor = (p_tx * link.path_gain()).sqrt() * (-T::lit(2.0) * T::PI() * s2) / params.noise_power_w();
    let value = prefactor * (-rho2 / (T::lit(2.0) * s2)).exp() * g;
    let rel = ((value - reference) / reference).abs();
    ClosedFormReport {
        value: Some(value),
        meijer_g: Some(g),
        rel_deviation: Some(rel),
        discrepancy: !(rel <= T::lit(CLOSED_FORM_TOLERANCE)),
        failure: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::dbm_to_watts;
    use crate::specfun::integrate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params() -> ChannelParams<f64> {
        ChannelParams::default()
    }

    #[test]
    fn los_probability_examples() {
        let p = params();
        assert!((los_probability(12.08, &p) - 1.0 / 13.08).abs() < 1e-15);
        // high-precision direct evaluation
        assert!((los_probability(45.0, &p) - 0.755_774_081_938_645_7).abs() < 1e-12);
        assert!((los_probability(90.0, &p) - 0.997_716_247_081_093_9).abs() < 1e-12);
        assert!((los_probability(0.0, &p) - 0.021_449_917_011_775_52).abs() < 1e-12);
    }

    #[test]
    fn los_probability_strictly_increasing_in_unit_interval() {
        let p = params();
        let mut prev = 0.0;
        for i in 0..=900 {
            let v = los_probability(i as f64 * 0.1, &p);
            assert!(v > prev && v < 1.0);
            prev = v;
        }
    }

    #[test]
    fn path_loss_exponent_examples() {
        let p = params();
        assert!((path_loss_exponent(90.0, &p) - 2.003_425_629_378_359).abs() < 1e-12);
        assert!((path_loss_exponent(0.0, &p) - 3.467_825_124_482_337).abs() < 1e-12);
        let flat = ChannelParams { alpha_los: 3.0, alpha_nlos: 3.0, ..params() };
        for theta in [0.0, 33.0, 90.0] {
            assert_eq!(path_loss_exponent(theta, &flat), 3.0);
        }
        let mut prev = f64::INFINITY;
        for i in 0..=90 {
            let a = path_loss_exponent(i as f64, &p);
            assert!(a <= prev);
            prev = a;
        }
    }

    #[test]
    fn rician_from_k_examples() {
        let r = rician_from_k(6.0_f64);
        assert!((r.rho_h - 0.894_002_232_148_722_5).abs() < 1e-12);
        assert!((r.sigma_h - 0.316_828_036_096_161_9).abs() < 1e-12);
        let r = rician_from_k(f64::INFINITY);
        assert_eq!(r.k_db, 100.0);
        assert!((r.rho_h - 1.0).abs() < 1e-9 && r.sigma_h > 0.0 && r.sigma_h < 1e-5);
        let r = rician_from_k(0.0_f64);
        assert!((r.rho_h.powi(2) - 0.5).abs() < 1e-15);
        assert!((2.0 * r.sigma_h.powi(2) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rician_invariants_hold_across_k() {
        for i in -40..=100 {
            let k = i as f64;
            let r = rician_from_k(k);
            assert!((r.mean_power() - 1.0).abs() < 1e-12);
            let k_back = 10.0 * (r.rho_h.powi(2) / (2.0 * r.sigma_h.powi(2))).log10();
            assert!((k_back - k).abs() < 1e-9, "k={k}: {k_back}");
            let again = RicianParams::from_components(r.rho_h, r.sigma_h).unwrap();
            assert!((again.k_db - k).abs() < 1e-9);
        }
        assert!(RicianParams::from_components(0.5, 0.5).is_err());
        assert!(RicianParams::from_components(1.0, 0.0).is_err());
    }

    #[test]
    fn rician_pdf_normalised_with_unit_second_moment() {
        let tol = Tolerance::new(1e-14, 1e-12);
        for k in [0.0_f64, 5.0, 6.0, 10.0, 12.0] {
            let r = rician_from_k(k);
            assert_eq!(rician_pdf(0.0, &r), 0.0);
            let (mass, _) = rician_expectation(&r, |_| 1.0, tol).unwrap();
            let (second, _) = rician_expectation(&r, |h| h * h, tol).unwrap();
            assert!((mass - 1.0).abs() < 1e-6, "K={k}: {mass}");
            assert!((second - 1.0).abs() < 1e-6, "K={k}: {second}");
        }
    }

    #[test]
    fn sampler_is_deterministic_per_seed() {
        let r = rician_from_k(6.0_f64);
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..16).map(|_| sample_rician(&r, &mut rng)).collect::<Vec<f64>>()
        };
        assert_eq!(draw(7), draw(7));
        assert_ne!(draw(7), draw(8));
    }

    #[test]
    fn sampler_degenerates_to_los_amplitude() {
        let r = RicianParams { rho_h: 1.0_f64, sigma_h: 0.0, k_db: f64::INFINITY };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            assert_eq!(sample_rician(&r, &mut rng), 1.0);
        }
    }

    #[test]
    fn sampler_second_moment() {
        let r = rician_from_k(6.0_f64);
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let n = 1_000_000;
        let mean = (0..n).map(|_| sample_rician(&r, &mut rng).powi(2)).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.005, "{mean}");
    }

    #[test]
    fn sampler_matches_density_ks() {
        let r = rician_from_k(6.0_f64);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let n = 100_000;
        let mut xs: Vec<f64> = (0..n).map(|_| sample_rician(&r, &mut rng)).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let tol = Tolerance::new(1e-13, 1e-12);
        let mut cdf = 0.0;
        let mut prev = 0.0;
        let mut ks: f64 = 0.0;
        for (i, &x) in xs.iter().enumerate() {
            cdf += integrate(|h| rician_pdf(h, &r), prev, x, tol).unwrap().value;
            prev = x;
            let lo = i as f64 / n as f64;
            let hi = (i + 1) as f64 / n as f64;
            ks = ks.max((cdf - lo).abs()).max((hi - cdf).abs());
        }
        assert!(ks < 0.01, "KS statistic {ks}");
    }

    #[test]
    fn instantaneous_snr_examples() {
        let p = params();
        let link = p.link(&Position3D::new(0.0, 0.0, 0.0), &Position3D::new(0.0, 250.0, 250.0)).unwrap();
        assert_eq!(instantaneous_snr(0.0, &link, 1.0, &p).unwrap(), 0.0);
        assert_eq!(instantaneous_snr(1.0, &link, 0.0, &p).unwrap(), 0.0);

        let unit = LinkGeometry { distance_m: 1.0, alpha_eff: 2.7, ..link };
        let v = instantaneous_snr(0.25, &unit, 1.0, &p).unwrap();
        assert!((v / (0.25 / p.noise_power_w()) - 1.0).abs() < 1e-14);

        // linear route vs dB route at 30 dBm, 353.55 m, α = 2.2, B = 1 MHz
        let fixed = LinkGeometry { distance_m: 353.553_390_593_273_8, alpha_eff: 2.2, ..link };
        let lin = instantaneous_snr(dbm_to_watts(30.0), &fixed, 1.0, &p).unwrap();
        let db = 30.0 - 22.0 * fixed.distance_m.log10() - (-174.0 + 60.0);
        assert!((lin / 10f64.powf(db / 10.0) - 1.0).abs() < 1e-9);

        let zero = LinkGeometry { distance_m: 0.0, ..link };
        assert!(matches!(instantaneous_snr(1.0, &zero, 1.0, &p), Err(Error::DegenerateLink)));
    }

    #[test]
    fn instantaneous_snr_scaling() {
        let p = params();
        let link = p.link(&Position3D::new(0.0, 0.0, 0.0), &Position3D::new(0.0, 100.0, 80.0)).unwrap();
        let a = instantaneous_snr(0.1, &link, 0.9, &p).unwrap();
        let b = instantaneous_snr(0.3, &link, 0.9, &p).unwrap();
        assert!((b / a - 3.0).abs() < 1e-13);
        let far = LinkGeometry { distance_m: link.distance_m * 2.0, ..link };
        let c = instantaneous_snr(0.1, &far, 0.9, &p).unwrap();
        assert!((a / c - 2f64.powf(link.alpha_eff)).abs() < 1e-10);
    }

    #[test]
    fn sir_examples() {
        let e = Emission { power_w: 1.0_f64, path_gain: 1e-5, fading: 0.9, phase: 0.0 };
        assert_eq!(sir(&e, &[e], InterferenceSum::Power), 1.0);
        let silent = Emission { power_w: 0.0, ..e };
        assert!(sir(&e, &[silent], InterferenceSum::Power).is_infinite());
        assert!(sir(&e, &[], InterferenceSum::Power).is_infinite());
        // two equal interferers in antiphase cancel coherently
        let opposite = Emission { phase: std::f64::consts::PI, ..e };
        assert!(interference_power(&[e, opposite], InterferenceSum::Coherent) < 1e-25);
        assert!((interference_power(&[e, opposite], InterferenceSum::Power) - 2.0 * e.received_power()).abs() < 1e-20);
    }

    #[test]
    fn sir_invariant_under_common_power_scaling() {
        let s = Emission { power_w: 0.7_f64, path_gain: 3e-6, fading: 1.1, phase: 0.3 };
        let i = [
            Emission { power_w: 1.3, path_gain: 2e-7, fading: 0.8, phase: 1.0 },
            Emission { power_w: 0.2, path_gain: 9e-7, fading: 1.4, phase: -2.0 },
        ];
        for mode in [InterferenceSum::Power, InterferenceSum::Coherent] {
            let base = sir(&s, &i, mode);
            let scale = 16.0; // power of two keeps the check exact
            let s2 = Emission { power_w: s.power_w * scale, ..s };
            let i2 = i.map(|e| Emission { power_w: e.power_w * scale, ..e });
            assert_eq!(sir(&s2, &i2, mode), base);
        }
    }

    #[test]
    fn case_two_sir_flat_in_height() {
        let p = params();
        let bs = Position3D::new(0.0, 0.0, 0.0);
        let jam = Position3D::new(0.0, 500.0, 0.0);
        let sirs: Vec<f64> = (0..=18)
            .map(|k| {
                let rx = Position3D::new(0.0, 250.0, 50.0 + 25.0 * k as f64);
                let s = p.link(&bs, &rx).unwrap().emission(1.0, 1.0);
                let i = p.link(&jam, &rx).unwrap().emission(1.0, 1.0);
                10.0 * sir(&s, &[i], InterferenceSum::Power).log10()
            })
            .collect();
        let spread = sirs.iter().cloned().fold(f64::MIN, f64::max) - sirs.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 3.0, "{spread}");
    }

    #[test]
    fn average_snr_equals_normalisation_identity() {
        let p = params();
        let link = p.link(&Position3D::new(0.0, 0.0, 0.0), &Position3D::new(0.0, 120.0, 90.0)).unwrap();
        let k6 = LinkGeometry { rician: rician_from_k(6.0_f64), ..link };
        let avg = average_snr(1.0, &k6, &p, AverageSnrMode::Quadrature).unwrap();
        let identity = k6.path_gain() / p.noise_power_w();
        assert!((avg.value / identity - 1.0).abs() < 1e-6);
        assert!(avg.closed_form.is_none());

        // pure-LOS limit: average equals the instantaneous SNR at h = ρ ≈ 1
        let los = LinkGeometry { rician: rician_from_k(f64::INFINITY), ..link };
        let avg = average_snr(1.0, &los, &p, AverageSnrMode::Quadrature).unwrap();
        let inst = instantaneous_snr(1.0, &los, los.rician.rho_h, &p).unwrap();
        assert!((avg.value / inst - 1.0).abs() < 1e-6);
    }

    #[test]
    fn closed_form_comparison_is_reported_not_raised() {
        let p = params();
        let link = p.link(&Position3D::new(0.0, 0.0, 0.0), &Position3D::new(0.0, 0.0, 100.0)).unwrap();
        let avg = average_snr(1.0, &link, &p, AverageSnrMode::ClosedForm).unwrap();
        let report = avg.closed_form.unwrap();
        assert!(report.value.is_some(), "{report:?}");
        // the Meijer-G factor is negative, offsetting the -2πσ² prefactor
        assert!(report.meijer_g.unwrap() < 0.0);
        assert!(report.value.unwrap() > 0.0);
        assert!(report.discrepancy);
    }

    #[test]
    fn link_kind_and_rice_factor_follow_elevation() {
        let p = params();
        let g = p.link(&Position3D::new(0.0, 0.0, 0.0), &Position3D::new(0.0, 0.0, 50.0)).unwrap();
        assert_eq!(g.kind, LinkKind::GroundToAir);
        assert!((g.rician.k_db - 12.0).abs() < 1e-12);
        let a = p.link(&Position3D::new(0.0, 0.0, 50.0), &Position3D::new(0.0, 100.0, 50.0)).unwrap();
        assert_eq!(a.kind, LinkKind::AirToAir);
        assert!((a.rician.k_db - 10.0).abs() < 1e-12);
    }

    #[test]
    fn validation() {
        assert!(params().validate().is_ok());
        assert!(ChannelParams { alpha_los: 4.0, ..params() }.validate().is_err());
        assert!(ChannelParams { bandwidth_hz: 0.0, ..params() }.validate().is_err());
        assert!(ChannelParams { f1: -1.0, ..params() }.validate().is_err());
    }

    #[test]
    fn noise_conversion() {
        let p = params();
        assert!((p.noise_density_w_per_hz() / 10f64.powf(-20.4) - 1.0).abs() < 1e-12);
        assert!((p.noise_power_w() / 10f64.powf(-14.4) - 1.0).abs() < 1e-12);
    }
}
