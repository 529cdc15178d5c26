use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Photodetector watching the cavity output.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorModel {
    /// Quantum efficiency η ∈ [0, 1].
    pub efficiency: f64,
    /// Dark counts per unit time.
    pub dark_count_rate: f64,
    /// Observation window `T_obs`.
    pub observation_window: f64,
}

impl Default for DetectorModel {
    fn default() -> Self {
        Self {
            efficiency: 1.0,
            dark_count_rate: 0.0,
            observation_window: 5.0,
        }
    }
}

impl DetectorModel {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.efficiency) {
            return Err(Error::InvalidArgument(format!(
                "efficiency must lie in [0, 1], got {}",
                self.efficiency
            )));
        }
        if !(self.dark_count_rate >= 0.0 && self.dark_count_rate.is_finite()) {
            return Err(Error::InvalidArgument("dark count rate must be ≥ 0".into()));
        }
        if !(self.observation_window >= 0.0 && self.observation_window.is_finite()) {
            return Err(Error::InvalidArgument(
                "observation window must be ≥ 0".into(),
            ));
        }
        Ok(())
    }

    /// Mean click count: `η κ |β|² T_obs + dark · T_obs`.
    pub fn mean_clicks(&self, branch: Branch, kappa: f64) -> f64 {
        let photons = match branch {
            Branch::Vacuum => 0.0,
            Branch::Coherent(beta) => beta.norm_sqr(),
        };
        self.mean_clicks_for_photons(photons, kappa)
    }

    /// Mean click count for a cavity holding `photons` on average.
    pub fn mean_clicks_for_photons(&self, photons: f64, kappa: f64) -> f64 {
        (self.efficiency * kappa * photons + self.dark_count_rate) * self.observation_window
    }

    /// Probability that a coherent branch yields zero clicks.
    pub fn miss_probability(&self, beta: Complex64, kappa: f64) -> f64 {
        (-self.mean_clicks(Branch::Coherent(beta), kappa)).exp()
    }

    /// Probability that the vacuum branch yields at least one click.
    pub fn false_alarm_probability(&self) -> f64 {
        -(-self.dark_count_rate * self.observation_window).exp_m1()
    }
}

/// Field branch reaching the detector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Branch {
    Vacuum,
    Coherent(Complex64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    NoPhoton,
    Photon,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Detection {
    pub clicks: u64,
    pub verdict: Verdict,
}

/// Draws a Poisson click count for `branch`; the verdict is no-photon iff
/// there are zero clicks.
pub fn classify_detection(
    branch: Branch,
    d: &DetectorModel,
    kappa: f64,
    rng: &mut impl Rng,
) -> Detection {
    let mean = d.mean_clicks(branch, kappa);
    sample_clicks(mean, rng)
}

pub(crate) fn sample_clicks(mean: f64, rng: &mut impl Rng) -> Detection {
    let clicks = if mean > 0.0 {
        Poisson::new(mean)
            .map(|p| p.sample(rng) as u64)
            .unwrap_or(u64::MAX)
    } else {
        0
    };
    let verdict = if clicks == 0 {
        Verdict::NoPhoton
    } else {
        Verdict::Photon
    };
    Detection { clicks, verdict }
}

/// Independent random stream for sweep cell `cell` under `seed`, so results do
/// not depend on the order cells are evaluated in.
pub fn cell_rng(seed: u64, cell: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(cell);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ideal_detector_never_clicks_on_vacuum() {
        let d = DetectorModel {
            efficiency: 1.0,
            dark_count_rate: 0.0,
            observation_window: 3.0,
        };
        let mut rng = cell_rng(7, 0);
        for _ in 0..1000 {
            assert_eq!(
                classify_detection(Branch::Vacuum, &d, 1.0, &mut rng).verdict,
                Verdict::NoPhoton
            );
        }
    }

    #[test]
    fn miss_probability_examples() {
        let d = DetectorModel {
            efficiency: 0.1,
            dark_count_rate: 0.0,
            observation_window: 5.0,
        };
        let beta = Complex64::new(0.0, 2.0);
        assert_abs_diff_eq!(
            d.miss_probability(beta, 1.0),
            (-2.0f64).exp(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(d.miss_probability(beta, 1.0), 0.1353, epsilon = 5e-5);
        let longer = DetectorModel {
            observation_window: 10.0,
            ..d
        };
        assert_abs_diff_eq!(
            longer.miss_probability(beta, 1.0),
            d.miss_probability(beta, 1.0).powi(2),
            epsilon = 1e-15
        );
    }

    #[test]
    fn false_alarms_follow_dark_counts() {
        let d = DetectorModel {
            efficiency: 0.5,
            dark_count_rate: 0.02,
            observation_window: 5.0,
        };
        assert_abs_diff_eq!(
            d.false_alarm_probability(),
            1.0 - (-0.1f64).exp(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u32> = (0..4)
            .map({
                let mut r = cell_rng(3, 1);
                move |_| r.gen()
            })
            .collect();
        let b: Vec<u32> = (0..4)
            .map({
                let mut r = cell_rng(3, 1);
                move |_| r.gen()
            })
            .collect();
        let c: Vec<u32> = (0..4)
            .map({
                let mut r = cell_rng(3, 2);
                move |_| r.gen()
            })
            .collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_bad_efficiency() {
        let d = DetectorModel {
            efficiency: 1.5,
            ..DetectorModel::default()
        };
        assert!(d.validate().is_err());
    }
}
