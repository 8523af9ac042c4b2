use std::f64::consts::PI;
use std::fmt::Write as _;

use rustfft::FftPlanner;

use crate::geometry::{ReceiveArray, SampledAperture};
use crate::{Complex, Error, Interval, Result};

/// Default histogram bin width in `ξ`.
pub const DEFAULT_XI_STEP: f64 = 0.05;
/// Default grid padding on each side of the main lobe.
pub const DEFAULT_XI_MARGIN: f64 = 20.0;
/// Minimum padding required beyond the `g̃₀` support before convolving.
pub const MIN_XI_MARGIN: f64 = 10.0;
/// Grids at least this long are convolved by FFT under [`ConvolutionMethod::Auto`].
pub const FFT_THRESHOLD: usize = 4096;

/// Uniform grid `ξ_i = start + i·step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiGrid {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl XiGrid {
    pub fn new(start: f64, step: f64, len: usize) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::param("xi_step", "must be positive and finite"));
        }
        if len == 0 || !start.is_finite() {
            return Err(Error::param("xi_grid", "needs a finite start and at least one bin"));
        }
        Ok(Self { start, step, len })
    }

    /// Grid aligned to integer multiples of `step` that covers
    /// `[lo − margin, hi + margin]`. Alignment keeps bins identical across
    /// grids built for different intervals.
    pub fn covering(lo: f64, hi: f64, margin: f64, step: f64) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::param("xi_step", "must be positive and finite"));
        }
        let i0 = ((lo - margin) / step).floor();
        let i1 = ((hi + margin) / step).ceil();
        Self::new(i0 * step, step, (i1 - i0) as usize + 1)
    }

    pub fn at(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn end(&self) -> f64 {
        self.at(self.len - 1)
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.at(i)).collect()
    }

    /// Index of the bin whose center is nearest `xi`, if on the grid.
    pub fn bin(&self, xi: f64) -> Option<usize> {
        let i = ((xi - self.start) / self.step).round();
        (i >= 0.0 && i < self.len as f64).then_some(i as usize)
    }
}

/// `g̃₀` density on a `ξ` grid and, once convolved, `g̃ = g̃₀ ∗ sinc(2ξ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumProfile {
    pub grid: XiGrid,
    pub g0: Vec<f64>,
    pub g: Option<Vec<Complex>>,
    /// Main lobe `[−p_max²T/(2λ), −p_min²T/(2λ)]`.
    pub omega: Interval,
}

impl SpectrumProfile {
    /// Total `g̃₀` mass, `Σ g̃₀ Δξ`.
    pub fn mass(&self) -> f64 {
        self.g0.iter().sum::<f64>() * self.grid.step
    }

    /// Interval spanned by nonzero `g̃₀` bins.
    pub fn support(&self) -> Option<Interval> {
        let first = self.g0.iter().position(|v| *v != 0.0)?;
        let last = self.g0.iter().rposition(|v| *v != 0.0)?;
        Some(Interval::new(self.grid.at(first), self.grid.at(last)))
    }

    /// Bin-wise sum of two profiles on the same grid; `omega` becomes the hull.
    pub fn add(&self, other: &SpectrumProfile) -> Result<SpectrumProfile> {
        if self.grid != other.grid {
            return Err(Error::DimensionMismatch("spectra on different ξ grids".into()));
        }
        let g0 = self.g0.iter().zip(&other.g0).map(|(a, b)| a + b).collect();
        let g = match (&self.g, &other.g) {
            (Some(a), Some(b)) => Some(a.iter().zip(b).map(|(x, y)| x + y).collect()),
            _ => None,
        };
        Ok(SpectrumProfile {
            grid: self.grid,
            g0,
            g,
            omega: Interval::new(self.omega.lo.min(other.omega.lo), self.omega.hi.max(other.omega.hi)),
        })
    }

    /// CSV with header `xi,g0,g_real,g_imag`; `g` columns are empty before
    /// convolution.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("xi,g0,g_real,g_imag\n");
        for i in 0..self.grid.len {
            let _ = write!(s, "{:.16e},{:.16e}", self.grid.at(i), self.g0[i]);
            match &self.g {
                Some(g) => {
                    let _ = writeln!(s, ",{:.16e},{:.16e}", g[i].re, g[i].im);
                }
                None => s.push_str(",,\n"),
            }
        }
        s
    }
}

/// Main lobe for inverse span `T`.
pub fn main_lobe(p_min: f64, p_max: f64, inverse_span: f64, wavelength: f64) -> Interval {
    let c = inverse_span / (2.0 * wavelength);
    Interval::new(-p_max * p_max * c, -p_min * p_min * c)
}

/// Weighted histogram of `ξ_p = −‖p̄‖²T/(2λ)`, normalized to a density.
/// `p̄` is the component orthogonal to the array direction.
pub fn g0_spectrum(
    aperture: &SampledAperture,
    array: &ReceiveArray,
    wavelength: f64,
    grid: XiGrid,
) -> Result<SpectrumProfile> {
    if aperture.is_empty() {
        return Err(Error::DimensionMismatch("empty aperture".into()));
    }
    let c = array.inverse_span() / (2.0 * wavelength);
    let u = array.direction.u;
    let mut g0 = vec![0.0; grid.len];
    let (mut rho_min, mut rho_max) = (f64::INFINITY, 0.0f64);
    for (p, w) in aperture.points.iter().zip(&aperture.weights) {
        let up = u.dot(p);
        let rho2 = (p.norm_squared() - up * up).max(0.0);
        rho_min = rho_min.min(rho2);
        rho_max = rho_max.max(rho2);
        if let Some(i) = grid.bin(-rho2 * c) {
            g0[i] += w;
        }
    }
    for v in &mut g0 {
        *v /= grid.step;
    }
    Ok(SpectrumProfile {
        grid,
        g0,
        g: None,
        omega: Interval::new(-rho_max * c, -rho_min * c),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConvolutionMethod {
    /// Direct below [`FFT_THRESHOLD`] bins, FFT at or above.
    #[default]
    Auto,
    Direct,
    Fft,
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

pub fn convolve_sinc(profile: &SpectrumProfile) -> Result<SpectrumProfile> {
    convolve_sinc_with(profile, ConvolutionMethod::Auto)
}

/// `g̃(ξ_i) = Σ_j c_j g̃₀(ξ_j) sinc(2(ξ_i − ξ_j)) Δξ` with trapezoid
/// end weights `c_j`.
pub fn convolve_sinc_with(profile: &SpectrumProfile, method: ConvolutionMethod) -> Result<SpectrumProfile> {
    let grid = profile.grid;
    let n = grid.len;
    if profile.g0.len() != n {
        return Err(Error::DimensionMismatch("g0 length differs from grid".into()));
    }
    if profile.g0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("g0 profile"));
    }
    if let Some(support) = profile.support() {
        let available = (support.lo - grid.start).min(grid.end() - support.hi);
        if available < MIN_XI_MARGIN - 1e-9 * grid.step {
            return Err(Error::InsufficientMargin {
                needed: MIN_XI_MARGIN,
                available,
            });
        }
    }
    let mut a: Vec<f64> = profile.g0.iter().map(|v| v * grid.step).collect();
    if n > 1 {
        a[0] *= 0.5;
        a[n - 1] *= 0.5;
    }
    let use_fft = match method {
        ConvolutionMethod::Auto => n >= FFT_THRESHOLD,
        ConvolutionMethod::Direct => false,
        ConvolutionMethod::Fft => true,
    };
    let g = if use_fft {
        convolve_fft(&a, grid.step)
    } else {
        convolve_direct(&a, grid.step)
    };
    Ok(SpectrumProfile {
        g: Some(g.into_iter().map(|v| Complex::new(v, 0.0)).collect()),
        ..profile.clone()
    })
}

fn convolve_direct(a: &[f64], step: f64) -> Vec<f64> {
    let n = a.len();
    let kernel: Vec<f64> = (0..n).map(|l| sinc(2.0 * l as f64 * step)).collect();
    let nonzero: Vec<(usize, f64)> = a.iter().copied().enumerate().filter(|(_, v)| *v != 0.0).collect();
    (0..n)
        .map(|i| {
            nonzero
                .iter()
                .map(|&(j, v)| v * kernel[i.abs_diff(j)])
                .sum()
        })
        .collect()
}

fn convolve_fft(a: &[f64], step: f64) -> Vec<f64> {
    let n = a.len();
    // Kernel over lags −(n−1)..=(n−1), offset by n−1; the linear
    // convolution has length 3n−2.
    let size = (3 * n - 2).next_power_of_two();
    let mut x = vec![Complex::new(0.0, 0.0); size];
    let mut k = vec![Complex::new(0.0, 0.0); size];
    for (i, v) in a.iter().enumerate() {
        x[i].re = *v;
    }
    for (l, kl) in k.iter_mut().take(2 * n - 1).enumerate() {
        let lag = l as f64 - (n - 1) as f64;
        kl.re = sinc(2.0 * lag * step);
    }
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    fwd.process(&mut x);
    fwd.process(&mut k);
    for (xi, ki) in x.iter_mut().zip(&k) {
        *xi *= ki;
    }
    inv.process(&mut x);
    let scale = 1.0 / size as f64;
    x[n - 1..2 * n - 1].iter().map(|z| z.re * scale).collect()
}

/// Measure of `{ξ : |g̃(ξ)| ≥ level · max|g̃|}` as a count of bins times `Δξ`.
pub fn measured_bandwidth(profile: &SpectrumProfile, level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::param("level", "must lie in (0, 1)"));
    }
    let g = profile.g.as_ref().ok_or(Error::MissingConvolution)?;
    let peak = g.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Err(Error::ZeroProfile);
    }
    let count = g.iter().filter(|z| z.norm() >= level * peak).count();
    Ok(count as f64 * profile.grid.step)
}
