use serde::{Deserialize, Serialize};

use crate::{Error, Result, Vec3};

/// Unit direction `u = [cos φ cos θ, sin φ cos θ, sin θ]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub phi: f64,
    pub theta: f64,
    pub u: Vec3,
}

impl Direction {
    pub fn new(phi: f64, theta: f64) -> Self {
        // Snap rounding residue such as cos(π/2) ≈ 6e-17 so axis cases are exact.
        let snap = |v: f64| if v.abs() < 4.0 * f64::EPSILON { 0.0 } else { v };
        let u = Vec3::new(
            snap(phi.cos() * theta.cos()),
            snap(phi.sin() * theta.cos()),
            snap(theta.sin()),
        );
        Self {
            phi,
            theta,
            u: u.normalize(),
        }
    }

    /// `φ = π/2, θ = 0`: orthogonal to the aperture plane.
    pub fn broadside() -> Self {
        Self::new(std::f64::consts::FRAC_PI_2, 0.0)
    }

    pub fn from_degrees(phi_deg: f64, theta_deg: f64) -> Self {
        Self::new(phi_deg.to_radians(), theta_deg.to_radians())
    }
}

pub fn direction_vector(phi: f64, theta: f64) -> Direction {
    Direction::new(phi, theta)
}

/// How receive samples are spread over `[r_min, r_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RxSampling {
    /// `t = 1/r` uniform on `[1/r_max, 1/r_min]`.
    #[default]
    UniformInverseR,
    UniformR,
}

/// Collinear receive array `q = r·u`, `r ∈ [r_min, r_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceiveArray {
    pub direction: Direction,
    pub r_min: f64,
    pub r_max: f64,
    pub count: usize,
    pub sampling: RxSampling,
}

impl ReceiveArray {
    pub fn new(direction: Direction, r_min: f64, r_max: f64, count: usize) -> Result<Self> {
        let a = Self {
            direction,
            r_min,
            r_max,
            count,
            sampling: RxSampling::default(),
        };
        a.validate()?;
        Ok(a)
    }

    pub fn with_sampling(mut self, sampling: RxSampling) -> Self {
        self.sampling = sampling;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_min.is_finite() && self.r_max.is_finite()) {
            return Err(Error::param("r_min/r_max", "must be finite"));
        }
        if self.r_min <= 0.0 {
            return Err(Error::param("r_min", "must be positive"));
        }
        if self.r_min >= self.r_max {
            return Err(Error::param("r_max", "must exceed r_min"));
        }
        if self.count < 2 {
            return Err(Error::param("count", "need at least two receive samples"));
        }
        Ok(())
    }

    /// Length `T = 1/r_min − 1/r_max` of the inverse-distance interval.
    pub fn inverse_span(&self) -> f64 {
        1.0 / self.r_min - 1.0 / self.r_max
    }
}

/// Discretized receive array with quadrature weights in both the `r` and
/// the `t = 1/r` domain (`dr = dt / t²`).
#[derive(Debug, Clone, PartialEq)]
pub struct ReceiveSamples {
    pub direction: Direction,
    pub radii: Vec<f64>,
    pub points: Vec<Vec3>,
    pub r_weights: Vec<f64>,
    pub t_weights: Vec<f64>,
}

impl ReceiveSamples {
    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (f64, Vec3)> + '_ {
        self.radii.iter().copied().zip(self.points.iter().copied())
    }

    /// Inverse distances `t_k = 1/r_k`.
    pub fn inverse_radii(&self) -> Vec<f64> {
        self.radii.iter().map(|r| 1.0 / r).collect()
    }
}

fn trapezoid(n: usize, step: f64) -> Vec<f64> {
    let mut w = vec![step; n];
    w[0] *= 0.5;
    w[n - 1] *= 0.5;
    w
}

pub fn sample_receive_array(array: &ReceiveArray) -> ReceiveSamples {
    let n = array.count;
    let (radii, r_weights, t_weights) = match array.sampling {
        RxSampling::UniformInverseR => {
            let (t0, t1) = (1.0 / array.r_max, 1.0 / array.r_min);
            let step = (t1 - t0) / (n - 1) as f64;
            let t: Vec<f64> = (0..n)
                .map(|k| if k == n - 1 { t1 } else { t0 + k as f64 * step })
                .collect();
            let tw = trapezoid(n, step);
            let r: Vec<f64> = t.iter().map(|t| 1.0 / t).collect();
            let rw = tw.iter().zip(&r).map(|(w, r)| w * r * r).collect();
            (r, rw, tw)
        }
        RxSampling::UniformR => {
            let step = (array.r_max - array.r_min) / (n - 1) as f64;
            let r: Vec<f64> = (0..n)
                .map(|k| {
                    if k == n - 1 {
                        array.r_max
                    } else {
                        array.r_min + k as f64 * step
                    }
                })
                .collect();
            let rw = trapezoid(n, step);
            let tw = rw.iter().zip(&r).map(|(w, r)| w / (r * r)).collect();
            (r, rw, tw)
        }
    };
    let points = radii.iter().map(|r| array.direction.u * *r).collect();
    ReceiveSamples {
        direction: array.direction,
        radii,
        points,
        r_weights,
        t_weights,
    }
}
