//! Static physics of the pumped atom-array/cavity system.
//!
//! Everything here is a pure function of its inputs. Sign conventions are
//! fixed once: the pump is red-detuned from the atoms (`delta_pa < 0` for
//! all reference parameter sets), the projection axis is chosen so that an
//! array placed at the positive antinodes produces a positive projected
//! field, and `c_proj^2` is the mean intracavity photon number when the
//! field lies on the projection axis.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::constants;
use crate::error::{Error, Result};
use crate::units::TWO_PI;

/// Spatial dimensionality of the simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Dims {
    One,
    /// 3D mode with transverse harmonic confinement. The two angular trap
    /// frequencies are along the pump axis (x) and the remaining axis (y).
    Three { transverse_nus: [f64; 2] },
}

/// Parity pattern of the lattice sites with respect to the standing wave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StaggerKind {
    /// Integer-wavelength spacing: every site has the same sign.
    Uniform,
    /// Half-integer spacing: the sign alternates site to site.
    Alternating,
}

impl StaggerKind {
    #[inline]
    pub fn sign(self, site: usize) -> f64 {
        match self {
            StaggerKind::Uniform => 1.0,
            StaggerKind::Alternating => {
                if site % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }
}

/// All physical and protocol parameters of one experimental configuration.
///
/// Angular frequencies are rad/s, lengths meters, times seconds,
/// temperatures kelvin. Use [`crate::units`] to convert suffixed inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n_atoms: usize,
    /// Peak pump Rabi frequency.
    pub rabi_peak: f64,
    /// Pump-atom detuning.
    pub delta_pa: f64,
    /// Bare pump-cavity detuning.
    pub delta_pc: f64,
    /// Vacuum Rabi coupling.
    pub g0: f64,
    /// Cavity half-linewidth.
    pub kappa: f64,
    /// Atomic half-linewidth (enters only the recoil-heating rate).
    pub gamma: f64,
    /// Tweezer trap frequency along the cavity axis.
    pub nu: f64,
    pub wavelength: f64,
    /// Tweezer spacing; must be a positive multiple of half the wavelength.
    pub spacing: f64,
    /// Initial motional temperature.
    pub temperature: f64,
    pub ramp_time: f64,
    /// Total recorded duration including the ramp.
    pub record_time: f64,
    /// Staggered tweezer displacement: site n is shifted by stagger(n) * bias.
    pub tweezer_bias: f64,
    pub dims: Dims,
}

impl ExperimentConfig {
    /// Cavity and tweezer parameters shared by all bundled presets; only the
    /// atom number varies between runs.
    pub fn baseline(n_atoms: usize) -> Self {
        let mhz = TWO_PI * 1e6;
        ExperimentConfig {
            n_atoms,
            rabi_peak: 30.0 * mhz,
            delta_pa: -80.0 * mhz,
            delta_pc: -1.9 * mhz,
            g0: 3.1 / std::f64::consts::SQRT_2 * mhz,
            kappa: 0.53 * mhz,
            gamma: 3.0 * mhz,
            nu: TWO_PI * 93e3,
            wavelength: 780e-9,
            spacing: 4.5 * 780e-9,
            temperature: 35e-6,
            ramp_time: 50e-6,
            record_time: 250e-6,
            tweezer_bias: 0.0,
            dims: Dims::One,
        }
    }

    pub fn validate(&self) -> Result<()> {
        fn bad(field: &'static str, message: impl Into<String>) -> Error {
            Error::InvalidConfig {
                field,
                message: message.into(),
            }
        }
        if self.n_atoms < 1 {
            return Err(bad("n_atoms", "must be at least 1"));
        }
        if !(self.kappa > 0.0) {
            return Err(bad("kappa", "must be positive"));
        }
        if !(self.nu > 0.0) {
            return Err(bad("nu", "must be positive"));
        }
        if !(self.wavelength > 0.0) {
            return Err(bad("wavelength", "must be positive"));
        }
        if !(self.temperature >= 0.0) {
            return Err(bad("temperature", "must be non-negative"));
        }
        if self.delta_pa == 0.0 {
            return Err(bad("delta_pa", "must be nonzero"));
        }
        if !(self.spacing > 0.0) {
            return Err(bad("spacing", "must be positive"));
        }
        let half = self.spacing / (self.wavelength / 2.0);
        let m = half.round();
        if m < 1.0 || (half - m).abs() > 1e-9 * half.max(1.0) {
            return Err(bad(
                "spacing",
                format!(
                    "must be a positive multiple of wavelength/2, got {} wavelengths",
                    self.spacing / self.wavelength
                ),
            ));
        }
        if !(self.ramp_time >= 0.0) {
            return Err(bad("ramp_time", "must be non-negative"));
        }
        if !(self.record_time > self.ramp_time) {
            return Err(bad("record_time", "must exceed ramp_time"));
        }
        if let Dims::Three { transverse_nus } = self.dims {
            if transverse_nus.iter().any(|&n| !(n > 0.0)) {
                return Err(bad("transverse_nus", "must be positive in 3D mode"));
            }
        }
        Ok(())
    }

    /// Pump/cavity wavenumber 2*pi/lambda.
    #[inline]
    pub fn wavenumber(&self) -> f64 {
        TWO_PI / self.wavelength
    }

    #[inline]
    pub fn mass(&self) -> f64 {
        constants().rb87_mass
    }

    /// Site parity pattern implied by the spacing.
    pub fn stagger(&self) -> StaggerKind {
        let half_multiples = (self.spacing / (self.wavelength / 2.0)).round() as i64;
        if half_multiples % 2 == 0 {
            StaggerKind::Uniform
        } else {
            StaggerKind::Alternating
        }
    }

    /// Thermal rms position spread in one harmonic tweezer axis at the
    /// configured temperature.
    pub fn sigma_thermal(&self) -> f64 {
        sigma_thermal(self.temperature, self.nu, self.mass())
    }

    /// Thermal average of sin^2(k z) for a Gaussian position distribution
    /// centered on a node: (1 - exp(-2 k^2 sigma^2)) / 2.
    pub fn thermal_sin_sq(&self) -> f64 {
        let ks = self.wavenumber() * self.sigma_thermal();
        (1.0 - (-2.0 * ks * ks).exp()) / 2.0
    }

    /// Thermal-ensemble-average effective cavity detuning for atoms trapped
    /// at the nodes.
    pub fn thermal_detuning(&self) -> f64 {
        self.delta_pc
            - self.n_atoms as f64 * self.g0 * self.g0 * self.thermal_sin_sq() / self.delta_pa
    }

    /// Projection angle derived from the thermal-average effective detuning.
    pub fn projection_angle(&self) -> f64 {
        projection_angle(self.thermal_detuning(), self.kappa)
    }

    /// Hold duration after the ramp.
    pub fn hold_time(&self) -> f64 {
        self.record_time - self.ramp_time
    }
}

/// Thermal rms position spread sqrt(kB T / (M nu^2)).
pub fn sigma_thermal(temperature: f64, nu: f64, mass: f64) -> f64 {
    (constants().k_boltzmann * temperature / (mass * nu * nu)).sqrt()
}

/// Per-atom motional state. Axial coordinates are stored as displacements
/// from the unbiased lattice site `n * spacing`; this keeps the standing-wave
/// phase of every site exact (site parity is applied analytically) and makes
/// the mirror transformation exact in floating point.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomArrayState {
    /// z_n - n * spacing, meters.
    pub displacements: Vec<f64>,
    /// Axial momenta, kg m/s.
    pub momenta: Vec<f64>,
    /// Tweezer-center offset from the lattice site: stagger(n) * bias.
    pub tweezer_offsets: Vec<f64>,
    pub spacing: f64,
    pub stagger: StaggerKind,
    /// Transverse coordinates, present in 3D mode.
    pub transverse: Option<TransverseState>,
}

/// Transverse (pump-axis x and out-of-plane y) coordinates for 3D mode.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TransverseState {
    pub x: Vec<f64>,
    pub px: Vec<f64>,
    pub y: Vec<f64>,
    pub py: Vec<f64>,
}

impl AtomArrayState {
    /// All atoms exactly at their tweezer centers with zero momentum.
    pub fn at_tweezer_centers(config: &ExperimentConfig) -> Self {
        let n = config.n_atoms;
        let stagger = config.stagger();
        let offsets: Vec<f64> = (0..n)
            .map(|i| stagger.sign(i) * config.tweezer_bias)
            .collect();
        AtomArrayState {
            displacements: offsets.clone(),
            momenta: vec![0.0; n],
            tweezer_offsets: offsets,
            spacing: config.spacing,
            stagger,
            transverse: match config.dims {
                Dims::One => None,
                Dims::Three { .. } => Some(TransverseState {
                    x: vec![0.0; n],
                    px: vec![0.0; n],
                    y: vec![0.0; n],
                    py: vec![0.0; n],
                }),
            },
        }
    }

    pub fn n_atoms(&self) -> usize {
        self.displacements.len()
    }

    /// Absolute axial positions z_n = n * spacing + displacement.
    pub fn positions(&self) -> Vec<f64> {
        self.displacements
            .iter()
            .enumerate()
            .map(|(i, u)| i as f64 * self.spacing + u)
            .collect()
    }

    /// Absolute tweezer centers z0_n = n * spacing + stagger(n) * bias.
    pub fn tweezer_centers(&self) -> Vec<f64> {
        self.tweezer_offsets
            .iter()
            .enumerate()
            .map(|(i, o)| i as f64 * self.spacing + o)
            .collect()
    }

    /// sin(k z_n) evaluated through the site parity, avoiding large-argument
    /// reduction: sin(k (n s + u)) = stagger(n) sin(k u) when s is a
    /// half-integer or integer multiple of the wavelength.
    #[inline]
    pub fn sin_kz(&self, k: f64, i: usize) -> f64 {
        self.stagger.sign(i) * (k * self.displacements[i]).sin()
    }

    /// Mirror image through the lattice sites: displacements, offsets and
    /// momenta all change sign.
    pub fn mirrored(&self) -> Self {
        let mut out = self.clone();
        for u in &mut out.displacements {
            *u = -*u;
        }
        for p in &mut out.momenta {
            *p = -*p;
        }
        for o in &mut out.tweezer_offsets {
            *o = -*o;
        }
        out
    }
}

/// Order parameter: mean of sin(k z_n) over the array. Zero for atoms at
/// the nodes, +-1 for atoms at same-sign antinodes.
pub fn order_parameter(state: &AtomArrayState, wavelength: f64) -> f64 {
    let k = TWO_PI / wavelength;
    let n = state.n_atoms();
    let mut sum = 0.0;
    for i in 0..n {
        sum += state.sin_kz(k, i);
    }
    sum / n as f64
}

/// Effective cavity detuning including the dispersive shift of the atoms:
/// delta_pc - sum_n g0^2 sin^2(k z_n) / delta_pa.
pub fn effective_detuning(state: &AtomArrayState, config: &ExperimentConfig) -> f64 {
    let k = config.wavenumber();
    let mut sum_sin2 = 0.0;
    for u in &state.displacements {
        let s = (k * u).sin();
        sum_sin2 += s * s;
    }
    config.delta_pc - config.g0 * config.g0 * sum_sin2 / config.delta_pa
}

/// Angle of the quadrature carrying the atomic signal, measured from the
/// pump phase. Convention: cos(theta) = -detuning / r, sin(theta) = kappa / r
/// with r = sqrt(detuning^2 + kappa^2), i.e. theta = atan2(kappa, -detuning).
/// For a red effective detuning this lands in (0, pi/2) and equals
/// arctan(-kappa/detuning); together with [`adiabatic_field`] it makes the
/// projected field of an array at the positive antinodes positive.
pub fn projection_angle(eff_detuning: f64, kappa: f64) -> f64 {
    f64::atan2(kappa, -eff_detuning)
}

/// Adiabatic steady-state cavity field amplitude in sqrt(photon) units:
/// <c> = A Theta / (detuning + i kappa) with A = N Omega g0 / (2 delta_pa).
pub fn adiabatic_field(state: &AtomArrayState, config: &ExperimentConfig, rabi: f64) -> Complex64 {
    let theta = order_parameter(state, config.wavelength);
    let detuning = effective_detuning(state, config);
    adiabatic_field_from(theta, detuning, config, rabi)
}

/// Same as [`adiabatic_field`] but with the order parameter and detuning
/// already in hand (the dynamics loop computes them once per snapshot).
pub fn adiabatic_field_from(
    theta: f64,
    eff_detuning: f64,
    config: &ExperimentConfig,
    rabi: f64,
) -> Complex64 {
    let amp = config.n_atoms as f64 * rabi * config.g0 / (2.0 * config.delta_pa);
    amp * theta / Complex64::new(eff_detuning, config.kappa)
}

/// Projection of a complex field onto the axis at `angle`:
/// Re(c) cos(angle) + Im(c) sin(angle).
#[inline]
pub fn project_field(field: Complex64, angle: f64) -> f64 {
    field.re * angle.cos() + field.im * angle.sin()
}

/// Magnitude form of the projected field for a state-independent detuning:
/// (N Omega g0 / (2 |delta_pa|)) * Theta / sqrt(detuning^2 + kappa^2).
/// Independent route used to cross-check the complex-field path.
pub fn projected_field_direct(
    theta: f64,
    eff_detuning: f64,
    config: &ExperimentConfig,
    rabi: f64,
) -> f64 {
    let amp = config.n_atoms as f64 * rabi * config.g0 / (2.0 * config.delta_pa.abs());
    amp * theta / (eff_detuning * eff_detuning + config.kappa * config.kappa).sqrt()
}

/// Strength of the cavity-induced mechanical potential,
/// D = (g0 Omega / (2 delta_pa))^2 * detuning / (detuning^2 + kappa^2).
/// Negative for red effective detuning, which is the self-organizing case.
pub fn cavity_potential_strength(config: &ExperimentConfig, eff_detuning: f64) -> f64 {
    potential_strength(config.g0, config.rabi_peak, config.delta_pa, eff_detuning, config.kappa)
}

#[inline]
pub fn potential_strength(g0: f64, rabi: f64, delta_pa: f64, eff_detuning: f64, kappa: f64) -> f64 {
    let s = g0 * rabi / (2.0 * delta_pa);
    s * s * eff_detuning / (eff_detuning * eff_detuning + kappa * kappa)
}

/// Models for the thermal reduction factor epsilon(T) entering the critical
/// pump strength. All models return exactly 1 at T = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EpsilonModel {
    /// epsilon = 1 at all temperatures.
    Unity,
    /// Axial Debye-Waller form exp(-scale * k^2 sigma_th^2), optionally with
    /// the same factor for thermal motion along the pump standing wave.
    DebyeWaller { scale: f64, transverse: bool },
}

/// Exponent scale that pins the calibrated threshold prediction for the
/// 20-atom baseline configuration at 35 uK to 2*pi x 26.5 MHz. Obtained by
/// inverting the threshold formula at that operating point; a calibration
/// fixture test keeps it honest.
pub const EPSILON_CALIBRATION_SCALE: f64 = 1.6028147105251118;

impl EpsilonModel {
    /// Bare Debye-Waller factor, no calibration.
    pub fn debye_waller() -> Self {
        EpsilonModel::DebyeWaller {
            scale: 1.0,
            transverse: false,
        }
    }

    /// The shipped calibration used for quantitative threshold predictions.
    pub fn calibrated() -> Self {
        EpsilonModel::DebyeWaller {
            scale: EPSILON_CALIBRATION_SCALE,
            transverse: false,
        }
    }

    /// Evaluate epsilon at the given temperature.
    pub fn value(&self, temperature: f64, config: &ExperimentConfig) -> f64 {
        match *self {
            EpsilonModel::Unity => 1.0,
            EpsilonModel::DebyeWaller { scale, transverse } => {
                let k = config.wavenumber();
                let sig_z = sigma_thermal(temperature, config.nu, config.mass());
                let mut exponent = scale * k * k * sig_z * sig_z;
                if transverse {
                    if let Dims::Three { transverse_nus } = config.dims {
                        let sig_x = sigma_thermal(temperature, transverse_nus[0], config.mass());
                        exponent += scale * k * k * sig_x * sig_x;
                    }
                }
                (-exponent).exp()
            }
        }
    }
}

/// Critical pump strength at the configured temperature:
/// sqrt(2 M nu^2 delta_pa^2 (dpc_T^2 + kappa^2)
///      / (N g0^2 k^2 |dpc_T| hbar epsilon(T)))
/// with dpc_T the thermal-average effective detuning. Errors when the
/// thermal detuning is not red of the cavity.
pub fn critical_pump(config: &ExperimentConfig, epsilon_model: &EpsilonModel) -> Result<f64> {
    let dpc_t = config.thermal_detuning();
    if dpc_t >= 0.0 {
        return Err(Error::UnstableConfiguration {
            detuning_rad_s: dpc_t,
        });
    }
    let eps = epsilon_model.value(config.temperature, config);
    let k = config.wavenumber();
    let m = config.mass();
    let hbar = constants().hbar;
    let n = config.n_atoms as f64;
    let num = 2.0 * m * config.nu * config.nu * config.delta_pa * config.delta_pa
        * (dpc_t * dpc_t + config.kappa * config.kappa);
    let den = n * config.g0 * config.g0 * k * k * dpc_t.abs() * hbar * eps;
    Ok((num / den).sqrt())
}

/// Collective staggered-displacement coordinate that couples linearly to the
/// cavity: (1/N) sum_n stagger(n) (z_n - n * spacing). When every atom
/// displaces coherently by stagger(n) * d, this returns d and the order
/// parameter equals sin(k z_dom).
pub fn dominant_mode_coordinate(state: &AtomArrayState) -> f64 {
    let n = state.n_atoms();
    let mut sum = 0.0;
    for (i, u) in state.displacements.iter().enumerate() {
        sum += state.stagger.sign(i) * u;
    }
    sum / n as f64
}

/// Snapshot of the cavity observables derived from one atomic state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavitySnapshot {
    /// Order parameter.
    pub theta: f64,
    /// Instantaneous effective detuning.
    pub eff_detuning: f64,
    /// Complex field amplitude, sqrt(photon) units.
    pub field: Complex64,
    /// Projection of the field onto the configured signal axis.
    pub c_proj: f64,
    /// The projection angle used.
    pub proj_angle: f64,
}

impl CavitySnapshot {
    /// Build a snapshot from a state using the adiabatic field and a fixed
    /// projection angle (normally the config-level thermal-average angle).
    pub fn from_state(
        state: &AtomArrayState,
        config: &ExperimentConfig,
        rabi: f64,
        proj_angle: f64,
    ) -> Self {
        let theta = order_parameter(state, config.wavelength);
        let eff_detuning = effective_detuning(state, config);
        let field = adiabatic_field_from(theta, eff_detuning, config, rabi);
        CavitySnapshot {
            theta,
            eff_detuning,
            field,
            c_proj: project_field(field, proj_angle),
            proj_angle,
        }
    }
}

/// Static parameters of the effective mechanical potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialParams {
    /// Cavity potential coefficient D (rad/s).
    pub d_strength: f64,
    /// Thermal reduction factor, in (0, 1].
    pub epsilon_t: f64,
    /// Thermal rms position spread (m).
    pub sigma_th: f64,
}

impl PotentialParams {
    pub fn from_config(
        config: &ExperimentConfig,
        eff_detuning: f64,
        epsilon_model: &EpsilonModel,
    ) -> Self {
        PotentialParams {
            d_strength: cavity_potential_strength(config, eff_detuning),
            epsilon_t: epsilon_model.value(config.temperature, config),
            sigma_th: config.sigma_thermal(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mhz(v: f64) -> f64 {
        TWO_PI * v * 1e6
    }

    /// Place each atom at its positive antinode: displacement stagger(n) * lambda/4.
    fn state_at_positive_antinodes(config: &ExperimentConfig) -> AtomArrayState {
        let mut s = AtomArrayState::at_tweezer_centers(config);
        for i in 0..s.n_atoms() {
            s.displacements[i] = s.stagger.sign(i) * config.wavelength / 4.0;
        }
        s
    }

    #[test]
    fn baseline_config_is_valid() {
        ExperimentConfig::baseline(20).validate().unwrap();
    }

    #[test]
    fn validation_catches_bad_fields() {
        let mut c = ExperimentConfig::baseline(20);
        c.n_atoms = 0;
        assert!(c.validate().is_err());

        let mut c = ExperimentConfig::baseline(20);
        c.delta_pa = 0.0;
        assert!(c.validate().is_err());

        let mut c = ExperimentConfig::baseline(20);
        c.spacing = 4.3 * c.wavelength;
        assert!(c.validate().is_err());

        let mut c = ExperimentConfig::baseline(20);
        c.record_time = c.ramp_time;
        assert!(c.validate().is_err());
    }

    #[test]
    fn stagger_kind_follows_spacing() {
        let mut c = ExperimentConfig::baseline(4);
        assert_eq!(c.stagger(), StaggerKind::Alternating); // 4.5 lambda
        c.spacing = 5.0 * c.wavelength;
        assert_eq!(c.stagger(), StaggerKind::Uniform);
    }

    #[test]
    fn order_parameter_at_antinodes_is_one() {
        let config = ExperimentConfig::baseline(20);
        let s = state_at_positive_antinodes(&config);
        assert_abs_diff_eq!(order_parameter(&s, config.wavelength), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn order_parameter_at_nodes_is_zero() {
        let config = ExperimentConfig::baseline(20);
        let s = AtomArrayState::at_tweezer_centers(&config);
        assert_abs_diff_eq!(order_parameter(&s, config.wavelength), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn order_parameter_two_atom_example() {
        // One atom displaced lambda/8 from its node, the other at a node.
        let config = ExperimentConfig::baseline(2);
        let mut s = AtomArrayState::at_tweezer_centers(&config);
        s.displacements[0] = config.wavelength / 8.0;
        let got = order_parameter(&s, config.wavelength);
        assert_relative_eq!(got, (std::f64::consts::FRAC_PI_4).sin() / 2.0, epsilon = 1e-12);
        assert_relative_eq!(got, 0.35355, max_relative = 1e-4);
    }

    #[test]
    fn effective_detuning_at_nodes_is_bare() {
        let config = ExperimentConfig::baseline(20);
        let s = AtomArrayState::at_tweezer_centers(&config);
        assert_relative_eq!(effective_detuning(&s, &config), config.delta_pc);
    }

    #[test]
    fn effective_detuning_at_antinodes_matches_arithmetic() {
        let config = ExperimentConfig::baseline(20);
        let s = state_at_positive_antinodes(&config);
        let expected = config.delta_pc
            - 20.0 * config.g0 * config.g0 / config.delta_pa;
        let got = effective_detuning(&s, &config);
        assert_relative_eq!(got, expected, max_relative = 1e-12);
        // around -2pi x 0.70 MHz for the baseline numbers
        assert_relative_eq!(got / mhz(1.0), -0.69875, max_relative = 1e-3);
    }

    /// Monte Carlo oracle for the closed-form thermal average of the
    /// dispersive shift.
    #[test]
    fn thermal_detuning_matches_monte_carlo() {
        let config = ExperimentConfig::baseline(20);
        let sigma = config.sigma_thermal();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let normal = rand_distr::Normal::new(0.0, sigma).unwrap();
        let draws = 200_000;
        let mut acc = 0.0;
        for _ in 0..draws {
            let mut s = AtomArrayState::at_tweezer_centers(&config);
            for u in &mut s.displacements {
                *u += rand::Rng::sample(&mut rng, normal);
            }
            acc += effective_detuning(&s, &config);
        }
        let mc = acc / draws as f64;
        let closed = config.thermal_detuning();
        assert_relative_eq!(mc, closed, max_relative = 2e-3);
        // near -2pi x 1.5 MHz at the baseline operating point
        assert_relative_eq!(closed / mhz(1.0), -1.4676, max_relative = 1e-3);
    }

    #[test]
    fn projection_angle_conventions() {
        // kappa -> 0 with red detuning lands on the pump axis
        assert_abs_diff_eq!(projection_angle(-1.0, 0.0), 0.0);
        // detuning = -kappa gives pi/4
        assert_relative_eq!(projection_angle(-1.0, 1.0), std::f64::consts::FRAC_PI_4);
        // the worked example: arctan(0.53 / 1.6)
        let th = projection_angle(-mhz(1.6), mhz(0.53));
        assert_relative_eq!(th, (0.53f64 / 1.6).atan(), max_relative = 1e-12);
    }

    #[test]
    fn adiabatic_field_zero_for_zero_theta() {
        let config = ExperimentConfig::baseline(20);
        let s = AtomArrayState::at_tweezer_centers(&config);
        let f = adiabatic_field(&s, &config, config.rabi_peak);
        assert_abs_diff_eq!(f.norm(), 0.0, epsilon = 1e-30);
    }

    #[test]
    fn projected_magnitude_matches_direct_formula() {
        let config = ExperimentConfig::baseline(20);
        let s = state_at_positive_antinodes(&config);
        let detuning = effective_detuning(&s, &config);
        let theta = order_parameter(&s, config.wavelength);
        let angle = projection_angle(detuning, config.kappa);
        let field = adiabatic_field(&s, &config, config.rabi_peak);
        let via_projection = project_field(field, angle);
        let direct = projected_field_direct(theta, detuning, &config, config.rabi_peak);
        assert_relative_eq!(via_projection, direct, max_relative = 1e-12);
        assert!(via_projection > 0.0, "positive antinodes give positive c_proj");
        // photon-number convention: on-axis projection squared = |field|^2
        assert_relative_eq!(via_projection * via_projection, field.norm_sqr(), max_relative = 1e-12);
    }

    /// The two field routes agree for arbitrary states, not just special ones.
    #[test]
    fn field_routes_agree_for_random_states() {
        let config = ExperimentConfig::baseline(12);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let mut s = AtomArrayState::at_tweezer_centers(&config);
            for u in &mut s.displacements {
                *u += (rng.gen::<f64>() - 0.5) * config.wavelength;
            }
            let detuning = effective_detuning(&s, &config);
            let theta = order_parameter(&s, config.wavelength);
            let angle = projection_angle(detuning, config.kappa);
            let projected = project_field(adiabatic_field(&s, &config, config.rabi_peak), angle);
            let direct = projected_field_direct(theta, detuning, &config, config.rabi_peak);
            assert_relative_eq!(projected, direct, max_relative = 1e-10, epsilon = 1e-20);
        }
    }

    #[test]
    fn potential_strength_signs() {
        let config = ExperimentConfig::baseline(20);
        assert!(cavity_potential_strength(&config, -mhz(0.7)) < 0.0);
        assert!(cavity_potential_strength(&config, mhz(0.7)) > 0.0);
        let mut quiet = config.clone();
        quiet.rabi_peak = 0.0;
        assert_eq!(cavity_potential_strength(&quiet, -mhz(0.7)), 0.0);
        // even in Omega -> -Omega
        let mut flipped = config.clone();
        flipped.rabi_peak = -config.rabi_peak;
        assert_eq!(
            cavity_potential_strength(&config, -mhz(0.7)),
            cavity_potential_strength(&flipped, -mhz(0.7))
        );
    }

    #[test]
    fn potential_strength_extremum_at_minus_kappa() {
        let config = ExperimentConfig::baseline(20);
        let k = config.kappa;
        let at_kappa = cavity_potential_strength(&config, -k);
        let s = config.g0 * config.rabi_peak / (2.0 * config.delta_pa);
        assert_relative_eq!(at_kappa, -s * s / (2.0 * k), max_relative = 1e-12);
        for delta in [-3.0 * k, -2.0 * k, -0.5 * k, -0.1 * k] {
            assert!(cavity_potential_strength(&config, delta) >= at_kappa);
        }
    }

    #[test]
    fn epsilon_models_are_one_at_zero_temperature() {
        let config = ExperimentConfig::baseline(20);
        for model in [
            EpsilonModel::Unity,
            EpsilonModel::debye_waller(),
            EpsilonModel::calibrated(),
        ] {
            assert_eq!(model.value(0.0, &config), 1.0);
        }
    }

    #[test]
    fn epsilon_debye_waller_matches_arithmetic() {
        let config = ExperimentConfig::baseline(20);
        let k = config.wavenumber();
        let sig = config.sigma_thermal();
        let exponent = k * k * sig * sig;
        // k^2 sigma^2 ~ 0.64 at 35 uK and 2pi x 93 kHz
        assert_relative_eq!(exponent, 0.6363, max_relative = 1e-3);
        let got = EpsilonModel::debye_waller().value(config.temperature, &config);
        assert_relative_eq!(got, (-exponent).exp(), max_relative = 1e-12);
    }

    #[test]
    fn critical_pump_zero_temperature_value() {
        let mut config = ExperimentConfig::baseline(20);
        config.temperature = 0.0;
        let oc = critical_pump(&config, &EpsilonModel::Unity).unwrap();
        assert_relative_eq!(oc / mhz(1.0), 17.6807, max_relative = 2e-4);
    }

    #[test]
    fn critical_pump_scales_as_inverse_sqrt_n() {
        let mut a = ExperimentConfig::baseline(20);
        let mut b = ExperimentConfig::baseline(10);
        a.temperature = 0.0;
        b.temperature = 0.0;
        let oa = critical_pump(&a, &EpsilonModel::Unity).unwrap();
        let ob = critical_pump(&b, &EpsilonModel::Unity).unwrap();
        assert_relative_eq!(ob / oa, std::f64::consts::SQRT_2, max_relative = 1e-12);
    }

    #[test]
    fn critical_pump_rejects_blue_thermal_detuning() {
        let mut config = ExperimentConfig::baseline(20);
        config.delta_pc = mhz(0.5); // pump blue of the cavity
        config.temperature = 0.0;
        assert!(matches!(
            critical_pump(&config, &EpsilonModel::Unity),
            Err(Error::UnstableConfiguration { .. })
        ));
    }

    /// Calibration fixture: the shipped epsilon calibration pins the
    /// 20-atom, 35 uK baseline prediction to 2pi x 26.5 MHz.
    #[test]
    fn calibrated_threshold_fixture() {
        let config = ExperimentConfig::baseline(20);
        let oc = critical_pump(&config, &EpsilonModel::calibrated()).unwrap();
        assert_relative_eq!(oc / mhz(1.0), 26.5, max_relative = 0.01);
        // the implied reduction factor sits in a physically sensible band;
        // with the closed-form thermal detuning it comes out near 0.36
        // (rounded detuning inputs would put it near 0.39)
        let eps = EpsilonModel::calibrated().value(config.temperature, &config);
        assert!((0.30..=0.45).contains(&eps), "eps = {eps}");
    }

    #[test]
    fn dominant_mode_zero_at_centers() {
        let config = ExperimentConfig::baseline(20);
        let s = AtomArrayState::at_tweezer_centers(&config);
        assert_abs_diff_eq!(dominant_mode_coordinate(&s), 0.0);
    }

    #[test]
    fn dominant_mode_tracks_coherent_displacement() {
        let config = ExperimentConfig::baseline(20);
        let mut s = AtomArrayState::at_tweezer_centers(&config);
        let d = 37e-9;
        for i in 0..s.n_atoms() {
            s.displacements[i] = s.stagger.sign(i) * d;
        }
        let zdom = dominant_mode_coordinate(&s);
        assert_relative_eq!(zdom, d, max_relative = 1e-12);
        let theta = order_parameter(&s, config.wavelength);
        assert_relative_eq!(theta, (config.wavenumber() * d).sin(), max_relative = 1e-12);
    }

    /// Central-limit oracle: independent random displacements average out as
    /// 1/sqrt(N) in the dominant-mode coordinate.
    #[test]
    fn dominant_mode_shrinks_with_n() {
        let sigma = 50e-9;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let normal = rand_distr::Normal::new(0.0, sigma).unwrap();
        let mut rms = |n_atoms: usize| {
            let config = ExperimentConfig::baseline(n_atoms);
            let draws = 4000;
            let mut acc = 0.0;
            for _ in 0..draws {
                let mut s = AtomArrayState::at_tweezer_centers(&config);
                for u in &mut s.displacements {
                    *u += rand::Rng::sample(&mut rng, normal);
                }
                let z = dominant_mode_coordinate(&s);
                acc += z * z;
            }
            (acc / draws as f64).sqrt()
        };
        let r10 = rms(10);
        let r40 = rms(40);
        // expectation: sigma/sqrt(N); ratio 2 within sampling error
        assert_relative_eq!(r10 / r40, 2.0, max_relative = 0.1);
        assert_relative_eq!(r10, sigma / (10f64).sqrt(), max_relative = 0.1);
    }

    #[test]
    fn potential_params_invariants() {
        let config = ExperimentConfig::baseline(20);
        let p = PotentialParams::from_config(
            &config,
            config.thermal_detuning(),
            &EpsilonModel::debye_waller(),
        );
        assert!(p.epsilon_t > 0.0 && p.epsilon_t <= 1.0);
        let kb = constants().k_boltzmann;
        assert_relative_eq!(
            p.sigma_th * p.sigma_th,
            kb * config.temperature / (config.mass() * config.nu * config.nu),
            max_relative = 1e-12
        );
        assert!(p.d_strength < 0.0);
    }
}
