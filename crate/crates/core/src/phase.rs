//! Phase congruency from a log-Gabor filter bank evaluated in the frequency
//! domain, with the median-based noise compensation of Kovesi's construction.

use std::f64::consts::PI;

use crate::error::{IqaError, Result};
use crate::fft::{fft2, frequency_axis, ifft2, ComplexField};
use crate::image::Plane;
use crate::stats::median;

/// Filter-bank parameters. The defaults are the values the FSIM and VSI
/// reference code use.
#[derive(Clone, Debug, PartialEq)]
pub struct LogGaborParams {
    pub scales: usize,
    pub orientations: usize,
    /// Wavelength of the smallest-scale filter, in pixels.
    pub min_wavelength: f64,
    /// Ratio between successive filter wavelengths.
    pub mult: f64,
    /// Ratio of the Gaussian's standard deviation to the filter center
    /// frequency in the log domain; `ln(0.55) ≈ -0.5978`.
    pub sigma_on_f: f64,
    /// Angular spacing over angular σ; σ = π / orientations / this = 0.6545 rad for 4 orientations.
    pub d_theta_on_sigma: f64,
    /// Number of noise standard deviations above the mean noise energy.
    pub noise_k: f64,
    pub epsilon: f64,
}

impl Default for LogGaborParams {
    fn default() -> Self {
        Self {
            scales: 4,
            orientations: 4,
            min_wavelength: 6.0,
            mult: 2.0,
            sigma_on_f: 0.55,
            d_theta_on_sigma: 1.2,
            noise_k: 2.0,
            epsilon: 1e-4,
        }
    }
}

impl LogGaborParams {
    pub fn theta_sigma(&self) -> f64 {
        PI / self.orientations as f64 / self.d_theta_on_sigma
    }
}

/// Frequency-domain log-Gabor filters for one image size.
#[derive(Clone, Debug)]
pub struct LogGaborBank {
    params: LogGaborParams,
    radial: Vec<Plane>,
    angular: Vec<Plane>,
}

/// Smallest side accepted by [`phase_congruency`].
pub const MIN_PC_SIDE: usize = 16;

impl LogGaborBank {
    pub fn new(height: usize, width: usize, params: LogGaborParams) -> Result<Self> {
        if height < MIN_PC_SIDE || width < MIN_PC_SIDE {
            return Err(IqaError::TooSmall {
                what: "phase congruency",
                min_height: MIN_PC_SIDE,
                min_width: MIN_PC_SIDE,
                height,
                width,
            });
        }
        if params.scales == 0 || params.orientations == 0 {
            return Err(IqaError::InvalidArgument(
                "filter bank needs at least one scale and orientation".into(),
            ));
        }
        let fx = frequency_axis(width);
        let fy = frequency_axis(height);
        let mut radius = Plane::from_fn(height, width, |r, c| fx[c].hypot(fy[r]));
        let theta = Plane::from_fn(height, width, |r, c| (-fy[r]).atan2(fx[c]));
        radius.set(0, 0, 1.0);

        // Butterworth low-pass, cutoff 0.45, order 15, keeps the corners of
        // the spectrum from wrapping filters around
        let lowpass = radius.map(|r| 1.0 / (1.0 + (r / 0.45).powi(30)));

        let log_sigma = params.sigma_on_f.ln();
        let radial = (0..params.scales)
            .map(|s| {
                let fo = 1.0 / (params.min_wavelength * params.mult.powi(s as i32));
                let mut g = radius.zip_map(&lowpass, |r, lp| {
                    let l = (r / fo).ln();
                    (-(l * l) / (2.0 * log_sigma * log_sigma)).exp() * lp
                });
                g.set(0, 0, 0.0);
                g
            })
            .collect();

        let theta_sigma = params.theta_sigma();
        let angular = (0..params.orientations)
            .map(|o| {
                let angle = o as f64 * PI / params.orientations as f64;
                let (sa, ca) = angle.sin_cos();
                theta.map(|t| {
                    let (st, ct) = t.sin_cos();
                    let ds = st * ca - ct * sa;
                    let dc = ct * ca + st * sa;
                    let dtheta = ds.atan2(dc).abs();
                    (-(dtheta * dtheta) / (2.0 * theta_sigma * theta_sigma)).exp()
                })
            })
            .collect();

        Ok(Self {
            params,
            radial,
            angular,
        })
    }

    pub fn params(&self) -> &LogGaborParams {
        &self.params
    }

    pub fn dims(&self) -> (usize, usize) {
        self.radial[0].dims()
    }

    /// Frequency response of the filter at `scale`, `orientation`.
    pub fn filter(&self, scale: usize, orientation: usize) -> Plane {
        self.radial[scale].zip_map(&self.angular[orientation], |a, b| a * b)
    }

    /// Complex (even + i·odd) responses, indexed `[orientation][scale]`.
    pub fn responses(&self, plane: &Plane) -> Result<Vec<Vec<ComplexField>>> {
        if plane.dims() != self.dims() {
            return Err(IqaError::DimensionMismatch(
                (plane.height(), plane.width(), 1),
                (self.dims().0, self.dims().1, 1),
            ));
        }
        let spectrum = fft2(&ComplexField::from_real(plane));
        Ok((0..self.params.orientations)
            .map(|o| {
                (0..self.params.scales)
                    .map(|s| ifft2(&spectrum.scaled_by(&self.filter(s, o))))
                    .collect()
            })
            .collect())
    }
}

/// Phase congruency map plus the noise-compensated local energy of each
/// orientation.
#[derive(Clone, Debug)]
pub struct PhaseCongruency {
    pub pc: Plane,
    pub orientation_energy: Vec<Plane>,
}

/// Phase congruency with the default bank at the given scale/orientation counts.
pub fn phase_congruency(
    plane: &Plane,
    scales: usize,
    orientations: usize,
) -> Result<PhaseCongruency> {
    let params = LogGaborParams {
        scales,
        orientations,
        ..LogGaborParams::default()
    };
    let bank = LogGaborBank::new(plane.height(), plane.width(), params)?;
    let responses = bank.responses(plane)?;
    phase_congruency_from_responses(&bank, &responses)
}

/// Combines precomputed filter responses into phase congruency.
///
/// Split out from [`phase_congruency`] so responses obtained by other means
/// (e.g. direct spatial evaluation) can be checked against the FFT path.
pub fn phase_congruency_from_responses(
    bank: &LogGaborBank,
    responses: &[Vec<ComplexField>],
) -> Result<PhaseCongruency> {
    let p = bank.params();
    let (h, w) = bank.dims();
    let n = h * w;
    let mut energy_all = vec![0.0; n];
    let mut amplitude_all = vec![0.0; n];
    let mut orientation_energy = Vec::with_capacity(p.orientations);

    for (o, eo) in responses.iter().enumerate() {
        let mut sum_e = vec![0.0; n];
        let mut sum_o = vec![0.0; n];
        for field in eo {
            if !field.is_finite() {
                return Err(IqaError::NonFinite("log-Gabor response"));
            }
            for (k, z) in field.data().iter().enumerate() {
                amplitude_all[k] += z.norm();
                sum_e[k] += z.re;
                sum_o[k] += z.im;
            }
        }

        let mut energy = vec![0.0; n];
        for k in 0..n {
            let x = sum_e[k].hypot(sum_o[k]) + p.epsilon;
            let (mean_e, mean_o) = (sum_e[k] / x, sum_o[k] / x);
            for field in eo {
                let z = field.data()[k];
                energy[k] += z.re * mean_e + z.im * mean_o - (z.re * mean_o - z.im * mean_e).abs();
            }
        }

        // Noise: the smallest-scale response is assumed to be mostly noise,
        // its squared amplitude Rayleigh distributed with median-based mean.
        let first = bank.filter(0, o);
        let em_n: f64 = first.data().iter().map(|v| v * v).sum();
        let mut sq: Vec<f64> = eo[0].data().iter().map(|z| z.norm_sqr()).collect();
        let mean_e2n = -median(&mut sq) / 0.5f64.ln();
        let noise_power = if em_n > 0.0 { mean_e2n / em_n } else { 0.0 };

        let spatial: Vec<Plane> = (0..p.scales)
            .map(|s| {
                let f = ifft2(&ComplexField::from_real(&bank.filter(s, o)));
                f.real().map(|v| v * (n as f64).sqrt())
            })
            .collect();
        let sum_an2: f64 = spatial
            .iter()
            .map(|f| f.data().iter().map(|v| v * v).sum::<f64>())
            .sum();
        let mut sum_ai_aj = 0.0;
        for i in 0..p.scales {
            for j in i + 1..p.scales {
                sum_ai_aj += spatial[i]
                    .data()
                    .iter()
                    .zip(spatial[j].data())
                    .map(|(a, b)| a * b)
                    .sum::<f64>();
            }
        }
        let noise_energy2 = 2.0 * noise_power * sum_an2 + 4.0 * noise_power * sum_ai_aj;
        let tau = (noise_energy2.max(0.0) / 2.0).sqrt();
        let noise_mean = tau * (PI / 2.0).sqrt();
        let noise_sigma = ((2.0 - PI / 2.0) * tau * tau).sqrt();
        let threshold = (noise_mean + p.noise_k * noise_sigma) / 1.7;

        for (k, e) in energy.iter_mut().enumerate() {
            *e = (*e - threshold).max(0.0);
            energy_all[k] += *e;
        }
        orientation_energy.push(Plane::new(h, w, energy)?);
    }

    let pc = energy_all
        .iter()
        .zip(&amplitude_all)
        .map(|(e, a)| (e / (a + p.epsilon)).clamp(0.0, 1.0))
        .collect();
    Ok(PhaseCongruency {
        pc: Plane::new(h, w, pc)?,
        orientation_energy,
    })
}
