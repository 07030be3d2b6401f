//! Polarization loss between unit polarization vectors and the CCDF-threshold
//! extraction of effective receiver gain and PLF from tabulated angular
//! samples of a body-worn antenna.

use std::collections::HashSet;
use std::io::Read;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AntennaError {
    #[error("polarization vector norm {0} deviates from 1 by more than 1e-6")]
    NotUnit(f64),
    #[error("empty sample list")]
    Empty,
    #[error("CCDF level {0} outside (0, 1)")]
    Level(f64),
    #[error("sample value is NaN")]
    NaN,
    #[error("phi = {0} deg outside the [0, 180] deg half-space")]
    PhiOutOfRange(f64),
    #[error("duplicate angular sample at theta = {theta} deg, phi = {phi} deg")]
    Duplicate { theta: f64, phi: f64 },
    #[error("angular CSV line {line}: {reason}")]
    Csv { line: u64, reason: String },
}

const UNIT_TOLERANCE: f64 = 1e-6;

/// A complex unit 3-vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationVector([Complex64; 3]);

impl PolarizationVector {
    /// Accepts vectors within 1e-6 of unit norm and rescales them to unit norm.
    pub fn new(components: [Complex64; 3]) -> Result<Self, AntennaError> {
        let norm = components.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOLERANCE {
            return Err(AntennaError::NotUnit(norm));
        }
        Ok(Self(components.map(|c| c / norm)))
    }

    pub fn real(x: f64, y: f64, z: f64) -> Result<Self, AntennaError> {
        Self::new([x, y, z].map(|v| Complex64::new(v, 0.0)))
    }

    /// Scales any non-zero vector to unit norm.
    pub fn normalized(components: [Complex64; 3]) -> Result<Self, AntennaError> {
        let norm = components.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(AntennaError::NotUnit(norm));
        }
        Self::new(components.map(|c| c / norm))
    }

    pub fn components(&self) -> &[Complex64; 3] {
        &self.0
    }

    /// The UAV dipole of the forest campaign, tilted 30 degrees off the
    /// ground plane: `-cos(30) x + sin(30) y`.
    pub fn uav_dipole() -> Self {
        let a = 30f64.to_radians();
        Self::real(-a.cos(), a.sin(), 0.0).expect("unit by construction")
    }
}

/// `|tx . conj(rx)|^2`, in `[0, 1]`.
pub fn polarization_loss(tx: &PolarizationVector, rx: &PolarizationVector) -> f64 {
    let dot: Complex64 = tx.0.iter().zip(rx.0.iter()).map(|(a, b)| a * b.conj()).sum();
    dot.norm_sqr().clamp(0.0, 1.0)
}

/// The largest sample value `G` such that at least a fraction `level` of the
/// samples are `>= G`: the value guaranteed in `level` of the arrangements.
///
/// Candidates are the sample values themselves. `-inf` is a legal sample and
/// sorts below every finite value.
pub fn ccdf_guaranteed_value(samples: &[f64], level: f64) -> Result<f64, AntennaError> {
    if samples.is_empty() {
        return Err(AntennaError::Empty);
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(AntennaError::Level(level));
    }
    if samples.iter().any(|v| v.is_nan()) {
        return Err(AntennaError::NaN);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let n = sorted.len() as f64;
    let mut i = 0;
    while i < sorted.len() {
        // Skip to the last element of the tie group: all of them are >= value.
        let value = sorted[i];
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == value {
            j += 1;
        }
        if (j + 1) as f64 / n >= level {
            return Ok(value);
        }
        i = j + 1;
    }
    // level < 1 makes the full count always qualify.
    unreachable!("the minimum sample always satisfies level < 1")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularSample {
    pub theta_deg: f64,
    pub phi_deg: f64,
    pub gain_dbi: f64,
    pub polarization: PolarizationVector,
}

/// Gain and polarization of the receiving antenna over the ground-free
/// half-space.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularSampleSet {
    samples: Vec<AngularSample>,
    pub resolution_deg: Option<f64>,
}

impl AngularSampleSet {
    pub fn new(
        samples: Vec<AngularSample>,
        resolution_deg: Option<f64>,
    ) -> Result<Self, AntennaError> {
        let mut seen = HashSet::with_capacity(samples.len());
        for s in &samples {
            if !(0.0..=180.0).contains(&s.phi_deg) {
                return Err(AntennaError::PhiOutOfRange(s.phi_deg));
            }
            if !seen.insert((s.theta_deg.to_bits(), s.phi_deg.to_bits())) {
                return Err(AntennaError::Duplicate {
                    theta: s.theta_deg,
                    phi: s.phi_deg,
                });
            }
        }
        Ok(Self {
            samples,
            resolution_deg,
        })
    }

    pub fn samples(&self) -> &[AngularSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Reads `theta_deg,phi_deg,gain_dbi,re_x,im_x,re_y,im_y,re_z,im_z`.
    /// Polarization columns must already be unit-norm.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self, AntennaError> {
        const COLUMNS: [&str; 9] = [
            "theta_deg", "phi_deg", "gain_dbi", "re_x", "im_x", "re_y", "im_y", "re_z", "im_z",
        ];
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| AntennaError::Csv { line: 1, reason: e.to_string() })?
            .clone();
        let index: Vec<usize> = COLUMNS
            .iter()
            .map(|c| {
                headers.iter().position(|h| h == *c).ok_or_else(|| AntennaError::Csv {
                    line: 1,
                    reason: format!("missing column `{c}`"),
                })
            })
            .collect::<Result<_, _>>()?;
        let mut samples = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| AntennaError::Csv {
                line: e.position().map_or(0, |p| p.line()),
                reason: e.to_string(),
            })?;
            let line = rec.position().map_or(0, |p| p.line());
            let mut v = [0.0; 9];
            for (slot, &col) in v.iter_mut().zip(&index) {
                let field = rec.get(col).unwrap_or("");
                *slot = field.parse().map_err(|_| AntennaError::Csv {
                    line,
                    reason: format!("cannot parse `{field}` as a number"),
                })?;
            }
            let polarization = PolarizationVector::new([
                Complex64::new(v[3], v[4]),
                Complex64::new(v[5], v[6]),
                Complex64::new(v[7], v[8]),
            ])
            .map_err(|e| AntennaError::Csv { line, reason: e.to_string() })?;
            samples.push(AngularSample {
                theta_deg: v[0],
                phi_deg: v[1],
                gain_dbi: v[2],
                polarization,
            });
        }
        Self::new(samples, None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveTerms {
    pub g_rx_dbi: f64,
    pub chi_db: f64,
}

/// Effective receiver gain and polarization loss factor guaranteed in `level`
/// of the tabulated arrangements, each grid point weighted equally.
pub fn effective_link_terms(
    set: &AngularSampleSet,
    tx_pol: &PolarizationVector,
    level: f64,
) -> Result<EffectiveTerms, AntennaError> {
    let gains: Vec<f64> = set.samples.iter().map(|s| s.gain_dbi).collect();
    let plf_db: Vec<f64> = set
        .samples
        .iter()
        .map(|s| 10.0 * polarization_loss(tx_pol, &s.polarization).log10())
        .collect();
    Ok(EffectiveTerms {
        g_rx_dbi: ccdf_guaranteed_value(&gains, level)?,
        chi_db: ccdf_guaranteed_value(&plf_db, level)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Count-based oracle: try every sample as a candidate.
    fn brute_force_guaranteed(samples: &[f64], level: f64) -> f64 {
        let n = samples.len() as f64;
        samples
            .iter()
            .copied()
            .filter(|&g| samples.iter().filter(|&&x| x >= g).count() as f64 / n >= level)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn plf_examples() {
        let x = PolarizationVector::real(1.0, 0.0, 0.0).unwrap();
        let y = PolarizationVector::real(0.0, 1.0, 0.0).unwrap();
        assert_eq!(polarization_loss(&x, &x), 1.0);
        assert_eq!(polarization_loss(&x, &y), 0.0);
        let plf = polarization_loss(&PolarizationVector::uav_dipole(), &x);
        assert!((plf - 0.75).abs() < 1e-12);
        assert!((10.0 * plf.log10() + 1.249).abs() < 1e-3);
    }

    #[test]
    fn plf_with_phase() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let rhcp = PolarizationVector::new([c(s, 0.0), c(0.0, s), c(0.0, 0.0)]).unwrap();
        let lin = PolarizationVector::real(1.0, 0.0, 0.0).unwrap();
        assert!((polarization_loss(&rhcp, &lin) - 0.5).abs() < 1e-12);
        assert!((polarization_loss(&rhcp, &rhcp) - 1.0).abs() < 1e-12);
        // A global phase does not change the loss.
        let phase = Complex64::from_polar(1.0, 0.7);
        let rot = PolarizationVector::new(rhcp.components().map(|v| v * phase)).unwrap();
        assert!((polarization_loss(&rhcp, &rot) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_unit_vectors_rejected() {
        assert!(matches!(
            PolarizationVector::real(1.0, 1.0, 0.0),
            Err(AntennaError::NotUnit(_))
        ));
        let v = PolarizationVector::normalized([c(3.0, 0.0), c(0.0, 4.0), c(0.0, 0.0)]).unwrap();
        let n: f64 = v.components().iter().map(|c| c.norm_sqr()).sum();
        assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ccdf_examples() {
        assert_eq!(ccdf_guaranteed_value(&[2.5; 7], 0.75).unwrap(), 2.5);
        assert_eq!(ccdf_guaranteed_value(&[0.0, 1.0, 2.0, 3.0], 0.75).unwrap(), 1.0);
        let ramp: Vec<f64> = (0..=100).map(f64::from).collect();
        assert_eq!(ccdf_guaranteed_value(&ramp, 0.75).unwrap(), 25.0);
        assert_eq!(brute_force_guaranteed(&ramp, 0.75), 25.0);
    }

    #[test]
    fn ccdf_errors_and_infinities() {
        assert_eq!(ccdf_guaranteed_value(&[], 0.5), Err(AntennaError::Empty));
        assert_eq!(ccdf_guaranteed_value(&[1.0], 1.0), Err(AntennaError::Level(1.0)));
        assert_eq!(ccdf_guaranteed_value(&[1.0], 0.0), Err(AntennaError::Level(0.0)));
        assert_eq!(ccdf_guaranteed_value(&[f64::NAN], 0.5), Err(AntennaError::NaN));
        let v = [f64::NEG_INFINITY, -3.0, -1.0, 0.0];
        assert_eq!(ccdf_guaranteed_value(&v, 0.75).unwrap(), -3.0);
        assert_eq!(ccdf_guaranteed_value(&v, 0.99).unwrap(), f64::NEG_INFINITY);
    }

    fn set_with_gains(gains: &[f64], pol: PolarizationVector) -> AngularSampleSet {
        let samples = gains
            .iter()
            .enumerate()
            .map(|(i, &g)| AngularSample {
                theta_deg: i as f64,
                phi_deg: 90.0,
                gain_dbi: g,
                polarization: pol,
            })
            .collect();
        AngularSampleSet::new(samples, Some(1.0)).unwrap()
    }

    #[test]
    fn effective_terms_examples() {
        let tx = PolarizationVector::uav_dipole();
        let t = effective_link_terms(&set_with_gains(&[-11.0; 10], tx), &tx, 0.75).unwrap();
        assert_eq!(t.g_rx_dbi, -11.0);
        assert!(t.chi_db.abs() < 1e-12);
        let t = effective_link_terms(&set_with_gains(&[-20.0, -15.0, -10.0, -5.0], tx), &tx, 0.75)
            .unwrap();
        assert_eq!(t.g_rx_dbi, -15.0);
    }

    #[test]
    fn cross_polarized_samples_sort_last() {
        let x = PolarizationVector::real(1.0, 0.0, 0.0).unwrap();
        let y = PolarizationVector::real(0.0, 1.0, 0.0).unwrap();
        let mut samples: Vec<AngularSample> = (0..4)
            .map(|i| AngularSample { theta_deg: i as f64, phi_deg: 10.0, gain_dbi: 0.0, polarization: x })
            .collect();
        samples[0].polarization = y;
        let set = AngularSampleSet::new(samples, None).unwrap();
        assert_eq!(effective_link_terms(&set, &x, 0.75).unwrap().chi_db, 0.0);
        assert_eq!(effective_link_terms(&set, &x, 0.9).unwrap().chi_db, f64::NEG_INFINITY);
    }

    #[test]
    fn sample_set_validation() {
        let x = PolarizationVector::real(1.0, 0.0, 0.0).unwrap();
        let s = AngularSample { theta_deg: 0.0, phi_deg: 190.0, gain_dbi: 0.0, polarization: x };
        assert_eq!(
            AngularSampleSet::new(vec![s], None),
            Err(AntennaError::PhiOutOfRange(190.0))
        );
        let s = AngularSample { phi_deg: 10.0, ..s };
        assert!(matches!(
            AngularSampleSet::new(vec![s, s], None),
            Err(AntennaError::Duplicate { .. })
        ));
    }

    #[test]
    fn csv_parsing() {
        let text = "theta_deg,phi_deg,gain_dbi,re_x,im_x,re_y,im_y,re_z,im_z\n\
                    0,0,-20,1,0,0,0,0,0\n\
                    0,1,-15,1,0,0,0,0,0\n\
                    0,2,-10,0,0,1,0,0,0\n\
                    0,3,-5,0,0,0,0,0,1\n";
        let set = AngularSampleSet::from_csv(text.as_bytes()).unwrap();
        assert_eq!(set.len(), 4);
        let bad = "theta_deg,phi_deg,gain_dbi,re_x,im_x,re_y,im_y,re_z,im_z\n0,0,-20,2,0,0,0,0,0\n";
        assert!(matches!(
            AngularSampleSet::from_csv(bad.as_bytes()),
            Err(AntennaError::Csv { line: 2, .. })
        ));
        let missing = "theta_deg,phi_deg\n0,0\n";
        assert!(AngularSampleSet::from_csv(missing.as_bytes()).is_err());
    }

    fn unit_vector() -> impl Strategy<Value = PolarizationVector> {
        prop::array::uniform6(-1.0f64..1.0)
            .prop_filter("non-degenerate", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
            .prop_map(|v| {
                PolarizationVector::normalized([c(v[0], v[1]), c(v[2], v[3]), c(v[4], v[5])])
                    .unwrap()
            })
    }

    proptest! {
        #[test]
        fn plf_bounded_and_symmetric(a in unit_vector(), b in unit_vector()) {
            let ab = polarization_loss(&a, &b);
            prop_assert!((0.0..=1.0).contains(&ab));
            prop_assert!((ab - polarization_loss(&b, &a)).abs() < 1e-12);
            prop_assert!((polarization_loss(&a, &a) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn ccdf_matches_brute_force(
            v in prop::collection::vec(prop::sample::select(vec![-3.0, -1.5, 0.0, 0.5, 2.0, 7.0]), 1..200),
            level in 0.001f64..0.999,
        ) {
            prop_assert_eq!(ccdf_guaranteed_value(&v, level).unwrap(), brute_force_guaranteed(&v, level));
        }

        #[test]
        fn ccdf_matches_brute_force_continuous(
            v in prop::collection::vec(-50.0f64..50.0, 1..200),
            level in 0.001f64..0.999,
        ) {
            prop_assert_eq!(ccdf_guaranteed_value(&v, level).unwrap(), brute_force_guaranteed(&v, level));
        }

        #[test]
        fn ccdf_monotone_in_level(v in prop::collection::vec(-50.0f64..50.0, 1..100), a in 0.001f64..0.999, b in 0.001f64..0.999) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(ccdf_guaranteed_value(&v, lo).unwrap() >= ccdf_guaranteed_value(&v, hi).unwrap());
            let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = v.iter().copied().fold(f64::INFINITY, f64::min);
            prop_assert_eq!(ccdf_guaranteed_value(&v, 1e-9).unwrap(), max);
            prop_assert_eq!(ccdf_guaranteed_value(&v, 1.0 - 1e-9).unwrap(), min);
        }

        #[test]
        fn effective_terms_permutation_invariant(
            gains in prop::collection::vec(-30.0f64..5.0, 2..40),
            pols in prop::collection::vec(unit_vector(), 40),
            seed in any::<u64>(),
        ) {
            let samples: Vec<AngularSample> = gains.iter().zip(&pols).enumerate().map(|(i, (&g, &p))| AngularSample {
                theta_deg: i as f64, phi_deg: 45.0, gain_dbi: g, polarization: p,
            }).collect();
            let mut shuffled = samples.clone();
            // Deterministic Fisher-Yates driven by the proptest seed.
            let mut s = seed;
            for i in (1..shuffled.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                shuffled.swap(i, (s >> 33) as usize % (i + 1));
            }
            let tx = PolarizationVector::uav_dipole();
            let a = effective_link_terms(&AngularSampleSet::new(samples, None).unwrap(), &tx, 0.75).unwrap();
            let b = effective_link_terms(&AngularSampleSet::new(shuffled, None).unwrap(), &tx, 0.75).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
