//! Closed-form DoF predictions and dominant-eigenvalue counting.
//!
//! Predictions are continuous values equal to the total measure of the
//! main-lobe intervals; the `O(1)` sidelobe term is not added.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::geometry::{projected_extreme_distances, ApertureRegion, Direction, ExtremeDistances};
use crate::spectral::{main_lobe, EigenSpectrum};
use crate::{merge_intervals, Error, Interval, Result};

/// Default dominance threshold relative to `λ₁`.
pub const DEFAULT_EPSILON: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formula {
    Broadside,
    Projected,
    Modular,
    HoleFraction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DofPrediction {
    pub formula: Formula,
    pub value: f64,
    /// Merged main-lobe intervals in `ξ`.
    pub intervals: Vec<Interval>,
    pub params: BTreeMap<String, f64>,
}

impl DofPrediction {
    fn from_intervals(formula: Formula, intervals: &[Interval], params: &[(&str, f64)]) -> Self {
        let intervals = merge_intervals(intervals);
        Self {
            formula,
            value: intervals.iter().map(Interval::width).sum(),
            intervals,
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("prediction serializes")
    }
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be positive and finite, got {v}")))
    }
}

fn check_range(r_min: f64, r_max: f64) -> Result<()> {
    check_positive("r_min", r_min)?;
    check_positive("r_max", r_max)?;
    if r_max < r_min {
        return Err(Error::param("r_max", "must not be below r_min"));
    }
    Ok(())
}

/// `(p_max² − p_min²)/(2λ) · (1/r_min − 1/r_max)`.
pub fn dof_broadside(p_min: f64, p_max: f64, r_min: f64, r_max: f64, wavelength: f64) -> Result<DofPrediction> {
    let ext = ExtremeDistances::new(p_min, p_max)?;
    check_range(r_min, r_max)?;
    check_positive("wavelength", wavelength)?;
    let lobe = main_lobe(ext.p_min, ext.p_max, 1.0 / r_min - 1.0 / r_max, wavelength);
    Ok(DofPrediction::from_intervals(
        Formula::Broadside,
        &[lobe],
        &[
            ("p_min", p_min),
            ("p_max", p_max),
            ("r_min", r_min),
            ("r_max", r_max),
            ("wavelength", wavelength),
        ],
    ))
}

/// Broadside formula on the extremes of the region projected orthogonally
/// to `direction`.
pub fn dof_projected(
    region: &ApertureRegion,
    direction: &Direction,
    r_min: f64,
    r_max: f64,
    wavelength: f64,
) -> Result<DofPrediction> {
    let ext = projected_extreme_distances(region, direction)?;
    let mut p = dof_broadside(ext.p_min, ext.p_max, r_min, r_max, wavelength)?;
    p.formula = Formula::Projected;
    p.params.insert("phi".into(), direction.phi);
    p.params.insert("theta".into(), direction.theta);
    Ok(p)
}

/// Measure of the union of per-module main lobes.
pub fn dof_modular(modules: &[ExtremeDistances], r_min: f64, r_max: f64, wavelength: f64) -> Result<DofPrediction> {
    if modules.is_empty() {
        return Err(Error::EmptyRegion);
    }
    check_range(r_min, r_max)?;
    check_positive("wavelength", wavelength)?;
    let span = 1.0 / r_min - 1.0 / r_max;
    let lobes: Vec<Interval> = modules
        .iter()
        .map(|m| {
            ExtremeDistances::new(m.p_min, m.p_max)?;
            Ok(main_lobe(m.p_min, m.p_max, span, wavelength))
        })
        .collect::<Result<_>>()?;
    Ok(DofPrediction::from_intervals(
        Formula::Modular,
        &lobes,
        &[
            ("modules", modules.len() as f64),
            ("r_min", r_min),
            ("r_max", r_max),
            ("wavelength", wavelength),
        ],
    ))
}

/// `L²(1 − α²)/(2λ) · (1/r_min − 1/r_max)` for `[−L, L]` with the centered
/// fraction `α` removed.
pub fn dof_hole_fraction(half_length: f64, alpha: f64, r_min: f64, r_max: f64, wavelength: f64) -> Result<DofPrediction> {
    check_positive("half_length", half_length)?;
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::param("alpha", format!("must lie in [0, 1), got {alpha}")));
    }
    let mut p = dof_broadside(alpha * half_length, half_length, r_min, r_max, wavelength)?;
    p.formula = Formula::HoleFraction;
    p.value = half_length * half_length * (1.0 - alpha * alpha) / (2.0 * wavelength) * (1.0 / r_min - 1.0 / r_max);
    p.params.insert("half_length".into(), half_length);
    p.params.insert("alpha".into(), alpha);
    Ok(p)
}

/// `(p_max² − p_min²)/(2λ) · L/(r_min(r_min + L))` for an array of length `L`
/// starting at `r_min`.
pub fn dof_vs_rmin(p_min: f64, p_max: f64, array_length: f64, r_min: f64, wavelength: f64) -> Result<f64> {
    ExtremeDistances::new(p_min, p_max)?;
    check_positive("array_length", array_length)?;
    check_positive("r_min", r_min)?;
    check_positive("wavelength", wavelength)?;
    Ok((p_max * p_max - p_min * p_min) / (2.0 * wavelength) * array_length / (r_min * (r_min + array_length)))
}

/// `(p_max² − p_min²)/(2λ r_min)`, the infinite-array limit.
pub fn dof_upper_limit(p_min: f64, p_max: f64, r_min: f64, wavelength: f64) -> Result<f64> {
    ExtremeDistances::new(p_min, p_max)?;
    check_positive("r_min", r_min)?;
    check_positive("wavelength", wavelength)?;
    Ok((p_max * p_max - p_min * p_min) / (2.0 * wavelength * r_min))
}

/// `(2D²/λ) / (16 r_min)`.
pub fn rayleigh_bound(aperture_size: f64, r_min: f64, wavelength: f64) -> Result<f64> {
    check_positive("aperture_size", aperture_size)?;
    check_positive("r_min", r_min)?;
    check_positive("wavelength", wavelength)?;
    Ok(2.0 * aperture_size * aperture_size / wavelength / (16.0 * r_min))
}

/// Number of eigenvalues at or above `ε·λ₁`, with the counts at `ε/10` and
/// `10ε` for checking the knee.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominantCount {
    pub count: usize,
    pub epsilon: f64,
    /// Count at `ε/10`.
    pub count_loose: usize,
    /// Count at `10ε`.
    pub count_strict: usize,
}

fn count_above(values: &[f64], threshold: f64) -> usize {
    values.iter().filter(|v| **v >= threshold).count()
}

pub fn count_dominant(spectrum: &EigenSpectrum, epsilon: f64) -> Result<DominantCount> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::param("epsilon", format!("must lie in (0, 1), got {epsilon}")));
    }
    if spectrum.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    let l1 = spectrum.leading();
    if l1.is_nan() || l1 <= 0.0 {
        return Err(Error::ZeroSpectrum);
    }
    let v = &spectrum.values;
    Ok(DominantCount {
        count: count_above(v, epsilon * l1),
        epsilon,
        count_loose: count_above(v, epsilon / 10.0 * l1),
        count_strict: count_above(v, (epsilon * 10.0).min(1.0) * l1),
    })
}
