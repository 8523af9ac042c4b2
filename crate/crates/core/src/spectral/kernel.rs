use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::geometry::{Direction, ReceiveArray, ReceiveSamples, SampledAperture};
use crate::{Complex, Error, Result};

/// Receive samples expressed in inverse distance `t = 1/r`.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseDistanceGrid {
    /// `1 / r_max`.
    pub t_min: f64,
    /// `1 / r_min`.
    pub t_max: f64,
    pub t: Vec<f64>,
    /// Quadrature weights in `t`.
    pub weights: Vec<f64>,
}

impl InverseDistanceGrid {
    /// Uniform trapezoid grid on `[1/r_max, 1/r_min]` with `array.count` nodes.
    pub fn uniform(array: &ReceiveArray) -> Result<Self> {
        array.validate()?;
        let (t_min, t_max) = (1.0 / array.r_max, 1.0 / array.r_min);
        let n = array.count;
        let step = (t_max - t_min) / (n - 1) as f64;
        let t = (0..n)
            .map(|k| if k == n - 1 { t_max } else { t_min + k as f64 * step })
            .collect();
        let mut weights = vec![step; n];
        weights[0] *= 0.5;
        weights[n - 1] *= 0.5;
        Ok(Self { t_min, t_max, t, weights })
    }

    /// Same nodes and `t`-domain weights as `rx`.
    pub fn from_samples(rx: &ReceiveSamples) -> Self {
        let t = rx.inverse_radii();
        let t_min = t.iter().copied().fold(f64::INFINITY, f64::min);
        let t_max = t.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self {
            t_min,
            t_max,
            t,
            weights: rx.t_weights.clone(),
        }
    }

    /// `T = t_max − t_min`.
    pub fn span(&self) -> f64 {
        self.t_max - self.t_min
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Common node spacing if the nodes are equispaced.
    pub fn uniform_step(&self) -> Option<f64> {
        if self.t.len() < 2 {
            return None;
        }
        let step = self.t[1] - self.t[0];
        let uniform = self
            .t
            .windows(2)
            .all(|w| ((w[1] - w[0]) - step).abs() <= 1e-9 * step.abs());
        (step != 0.0 && uniform).then_some(step)
    }
}

/// Rescales an `r`-domain kernel `v̌(r_k, r_k')` to `g(t_k, t_k') = r_k r_k' v̌`
/// on the matching inverse-distance grid. With the grid's `t` weights the
/// resulting operator has the same eigenvalues as `v̌` with `dr = dt/t²`.
pub fn transform_to_inverse_distance(
    kernel: &DMatrix<Complex>,
    rx: &ReceiveSamples,
) -> Result<(DMatrix<Complex>, InverseDistanceGrid)> {
    let n = rx.len();
    if kernel.nrows() != n || kernel.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "kernel is {}x{}, {} receive samples",
            kernel.nrows(),
            kernel.ncols(),
            n
        )));
    }
    let r = &rx.radii;
    let g = DMatrix::from_fn(n, n, |i, j| kernel[(i, j)] * (r[i] * r[j]));
    Ok((g, InverseDistanceGrid::from_samples(rx)))
}

/// `g(Δt) = Σ w exp(−jπ‖p̄‖²Δt/λ)` with `p̄` the projection of each
/// aperture sample orthogonal to the receive direction.
#[derive(Debug, Clone)]
pub struct ConvolutionKernel {
    sq_norms: Vec<f64>,
    weights: Vec<f64>,
    wavelength: f64,
}

impl ConvolutionKernel {
    pub fn new(aperture: &SampledAperture, direction: &Direction, wavelength: f64) -> Self {
        let u = direction.u;
        let sq_norms = aperture
            .points
            .iter()
            .map(|p| {
                let up = u.dot(p);
                (p.norm_squared() - up * up).max(0.0)
            })
            .collect();
        Self {
            sq_norms,
            weights: aperture.weights.clone(),
            wavelength,
        }
    }

    /// Kernel over `‖p‖²` directly.
    pub fn broadside(aperture: &SampledAperture, wavelength: f64) -> Self {
        Self::new(aperture, &Direction::broadside(), wavelength)
    }

    pub fn eval(&self, dt: f64) -> Complex {
        let c = -PI * dt / self.wavelength;
        let (mut re, mut im) = (0.0, 0.0);
        for (q, w) in self.sq_norms.iter().zip(&self.weights) {
            let (s, co) = (c * q).sin_cos();
            re += w * co;
            im += w * s;
        }
        Complex::new(re, im)
    }

    /// Zero outside `|Δt| ≤ span`.
    pub fn eval_windowed(&self, dt: f64, span: f64) -> Complex {
        if dt.abs() > span * (1.0 + 1e-12) {
            Complex::new(0.0, 0.0)
        } else {
            self.eval(dt)
        }
    }

    /// Kernel matrix `g(t_k − t_k')` on `grid`, Toeplitz-filled when the
    /// grid is uniform.
    pub fn matrix(&self, grid: &InverseDistanceGrid) -> DMatrix<Complex> {
        let n = grid.len();
        let t = &grid.t;
        match grid.uniform_step() {
            Some(step) => {
                let lags: Vec<Complex> = (0..n).into_par_iter().map(|l| self.eval(l as f64 * step)).collect();
                DMatrix::from_fn(n, n, |i, j| {
                    if i >= j {
                        lags[i - j]
                    } else {
                        lags[j - i].conj()
                    }
                })
            }
            None => {
                let upper: Vec<Vec<Complex>> = (0..n)
                    .into_par_iter()
                    .map(|i| (i..n).map(|j| self.eval(t[i] - t[j])).collect())
                    .collect();
                DMatrix::from_fn(n, n, |i, j| {
                    if i <= j {
                        upper[i][j - i]
                    } else {
                        upper[j][i - j].conj()
                    }
                })
            }
        }
    }
}

/// `g(Δt)` over `‖p‖²`, without windowing.
pub fn convolution_kernel(aperture: &SampledAperture, dt: f64, wavelength: f64) -> Complex {
    ConvolutionKernel::broadside(aperture, wavelength).eval(dt)
}

/// `g(Δt)` for `|Δt| ≤ span`, zero outside.
pub fn windowed_convolution_kernel(
    aperture: &SampledAperture,
    dt: f64,
    span: f64,
    wavelength: f64,
) -> Complex {
    ConvolutionKernel::broadside(aperture, wavelength).eval_windowed(dt, span)
}
