//! Invariant checks shared by the property tests and the acceptance run.
#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::DMatrix;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use nfdof::channel::{build_channel_matrix, ChannelModel};
use nfdof::dof::{
    count_dominant, dof_broadside, dof_hole_fraction, dof_modular, dof_projected, dof_vs_rmin,
    rayleigh_bound,
};
use nfdof::experiment::ExperimentConfig;
use nfdof::geometry::{
    extreme_distances, project_point, sample_aperture, sample_receive_array, ApertureRegion,
    Direction, ExtremeDistances, ReceiveArray, SampledAperture, Shape,
};
use nfdof::spectral::{
    convolve_sinc, g0_spectrum, gram_matrix, operator_eigenvalues, ConvolutionKernel,
    EigenSpectrum, InverseDistanceGrid, XiGrid,
};
use nfdof::{merge_intervals, union_measure, Complex, Interval, Vec3};

pub fn config(value: serde_json::Value) -> ExperimentConfig {
    ExperimentConfig::from_json(&value.to_string()).expect("test config is valid")
}

/// Square of half-diagonal 100 with a centered hole of radius 60, in wavelengths.
pub fn square_with_hole() -> ApertureRegion {
    let side = 100.0 * 2f64.sqrt();
    ApertureRegion::with_holes(
        Shape::rectangle([0.0, 0.0], side, side),
        vec![Shape::disk([0.0, 0.0], 60.0)],
    )
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

pub fn max_abs(m: &DMatrix<Complex>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

// Strategies.

fn direction() -> impl Strategy<Value = Direction> {
    (0.0..PI, -PI / 2.0..PI / 2.0).prop_map(|(phi, theta)| Direction::new(phi, theta))
}

fn point3() -> impl Strategy<Value = Vec3> {
    (-200.0..200.0f64, -200.0..200.0f64, -200.0..200.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

/// Small random cloud in the xz-plane with positive weights.
fn small_aperture() -> impl Strategy<Value = SampledAperture> {
    prop::collection::vec((-30.0..30.0f64, -30.0..30.0f64, 0.1..2.0f64), 1..24).prop_map(|v| {
        SampledAperture {
            points: v.iter().map(|(x, z, _)| Vec3::new(*x, 0.0, *z)).collect(),
            weights: v.iter().map(|(_, _, w)| *w).collect(),
            module: vec![0; v.len()],
            spacing: 1.0,
        }
    })
}

/// `(r_min, r_max)` with `r_min < r_max`.
fn range() -> impl Strategy<Value = (f64, f64)> {
    (20.0..2000.0f64, 1.05..20.0f64).prop_map(|(r, f)| (r, r * f))
}

/// `(p_min, p_max)` with `p_min < p_max`.
fn extremes() -> impl Strategy<Value = (f64, f64)> {
    (0.0..150.0f64, 1.0..150.0f64).prop_map(|(a, d)| (a, a + d))
}

fn interval() -> impl Strategy<Value = Interval> {
    (-50.0..50.0f64, 0.0..20.0f64).prop_map(|(lo, w)| Interval::new(lo, lo + w))
}

/// Centered or offset planar shape of moderate size.
fn planar_shape() -> impl Strategy<Value = Shape> {
    prop_oneof![
        (-40.0..40.0f64, -40.0..40.0f64, 2.0..60.0f64, 2.0..60.0f64)
            .prop_map(|(x, z, w, h)| Shape::rectangle([x, z], w, h)),
        (-40.0..40.0f64, -40.0..40.0f64, 2.0..30.0f64).prop_map(|(x, z, r)| Shape::disk([x, z], r)),
        (-40.0..40.0f64, -40.0..40.0f64, 2.0..20.0f64, 1.0..15.0f64)
            .prop_map(|(x, z, a, d)| Shape::annulus([x, z], a, a + d)),
    ]
}

/// Planar shape whose closure contains the origin.
fn shape_around_origin() -> impl Strategy<Value = Shape> {
    prop_oneof![
        (2.0..60.0f64, 2.0..60.0f64, -0.5..0.5f64, -0.5..0.5f64)
            .prop_map(|(w, h, fx, fz)| Shape::rectangle([fx * w, fz * h], w, h)),
        (2.0..30.0f64, 0.0..1.0f64, 0.0..std::f64::consts::TAU)
            .prop_map(|(r, f, a)| Shape::disk([f * r * a.cos(), f * r * a.sin()], r)),
    ]
}

// Checks.

pub fn projection_idempotent(runner: &mut TestRunner) -> Result<(), String> {
    run(runner, (direction(), point3()), |(d, p)| {
        let once = project_point(&p, &d);
        let twice = project_point(&once, &d);
        let scale = p.norm().max(1.0);
        prop_assert!((once - twice).norm() <= 1e-12 * scale);
        prop_assert!(d.u.dot(&once).abs() <= 1e-12 * scale);
        Ok(())
    })
}

pub fn projection_norm_identity(runner: &mut TestRunner) -> Result<(), String> {
    run(runner, (direction(), point3()), |(d, p)| {
        let q = project_point(&p, &d);
        let up = d.u.dot(&p);
        let expected = p.norm_squared() - up * up;
        prop_assert!((q.norm_squared() - expected).abs() <= 1e-10 * p.norm_squared().max(1.0));
        Ok(())
    })
}

pub fn kernel_toeplitz_hermitian(runner: &mut TestRunner) -> Result<(), String> {
    let strat = (small_aperture(), range(), 2usize..24, 0.5..2.0f64);
    run(runner, strat, |(ap, (r0, r1), k, lambda)| {
        let arr = ReceiveArray::new(Direction::broadside(), r0, r1, k).unwrap();
        let grid = InverseDistanceGrid::uniform(&arr).unwrap();
        let g = ConvolutionKernel::broadside(&ap, lambda).matrix(&grid);
        let tol = 1e-10 * max_abs(&g);
        for i in 0..k {
            for j in 0..k {
                prop_assert!((g[(i, j)] - g[(j, i)].conj()).norm() <= tol);
                if i > 0 && j > 0 {
                    prop_assert!((g[(i, j)] - g[(i - 1, j - 1)]).norm() <= tol);
                }
            }
        }
        Ok(())
    })
}

pub fn kernel_conjugate_symmetry(runner: &mut TestRunner) -> Result<(), String> {
    run(runner, (small_aperture(), -0.05..0.05f64, -0.05..0.05f64), |(ap, dt, c)| {
        let k = ConvolutionKernel::broadside(&ap, 1.0);
        let total = ap.total_weight();
        prop_assert!((k.eval(-dt) - k.eval(dt).conj()).norm() <= 1e-12 * total);
        // g(t, t') depends on t − t' only.
        let (t, tp) = (0.01, 0.01 - dt);
        prop_assert!((k.eval(t - tp) - k.eval((t + c) - (tp + c))).norm() <= 1e-9 * total);
        Ok(())
    })
}

pub fn gram_hermitian_and_trace(runner: &mut TestRunner) -> Result<(), String> {
    let strat = (small_aperture(), direction(), range(), 2usize..20, any::<bool>());
    run(runner, strat, |(ap, d, (r0, r1), k, exact)| {
        let arr = ReceiveArray::new(d, r0, r1, k).unwrap();
        let rx = sample_receive_array(&arr);
        let model = if exact {
            ChannelModel::exact(1.0).unwrap()
        } else {
            ChannelModel::fresnel(1.0).unwrap()
        };
        let h = build_channel_matrix(&ap, &rx, &model).unwrap();
        let g = gram_matrix(&h);
        let tol = 1e-10 * max_abs(&g);
        prop_assert!((&g - g.adjoint()).iter().all(|z| z.norm() <= tol));
        let spec = operator_eigenvalues(&g, &rx.r_weights).unwrap();
        let trace: f64 = (0..k).map(|i| rx.r_weights[i] * g[(i, i)].re).sum();
        prop_assert!(rel(spec.total(), trace) <= 1e-8);
        prop_assert!(spec.values.iter().all(|v| *v >= 0.0));
        prop_assert!(spec.values.windows(2).all(|w| w[0] >= w[1]));
        if !exact {
            // Fresnel diagonal is |𝒫| / r².
            let area = ap.total_weight();
            for i in 0..k {
                prop_assert!(rel(g[(i, i)].re, area / (rx.radii[i] * rx.radii[i])) <= 1e-12);
            }
        }
        Ok(())
    })
}

pub fn dof_monotone(runner: &mut TestRunner) -> Result<(), String> {
    let strat = (extremes(), range(), 0.5..2.0f64, 1e-3..1e-1f64);
    run(runner, strat, |((p0, p1), (r0, r1), lambda, step)| {
        let f = |a: f64, b: f64, c: f64, d: f64| dof_broadside(a, b, c, d, lambda).unwrap().value;
        let base = f(p0, p1, r0, r1);
        prop_assert!(f(p0, p1 * (1.0 + step), r0, r1) > base);
        prop_assert!(f(p0, p1, r0, r1 * (1.0 + step)) > base);
        prop_assert!(f(p0, p1, r0 * (1.0 + step).min(r1 / r0), r1) < base);
        let lower = (p0 * (1.0 + step)).min(p1);
        if lower > p0 {
            prop_assert!(f(lower, p1, r0, r1) < base);
        }
        Ok(())
    })
}

pub fn interval_union_algebra(runner: &mut TestRunner) -> Result<(), String> {
    let strat = prop::collection::vec(interval(), 1..8).prop_shuffle();
    run(runner, strat, |v| {
        let m = union_measure(&v);
        let sum: f64 = v.iter().map(Interval::width).sum();
        let widest = v.iter().map(Interval::width).fold(0.0, f64::max);
        prop_assert!(m <= sum + 1e-9);
        prop_assert!(m >= widest - 1e-12);
        let merged = merge_intervals(&v);
        let disjoint = merged.len() == v.len();
        prop_assert_eq!(disjoint, (m - sum).abs() <= 1e-9 * sum.max(1.0) && merged.len() == v.len());
        prop_assert!(merged.windows(2).all(|w| w[0].hi < w[1].lo));
        let mut rev = v.clone();
        rev.reverse();
        prop_assert_eq!(merge_intervals(&rev), merged);
        let mut doubled = v.clone();
        doubled.extend(v.iter().copied());
        prop_assert!((union_measure(&doubled) - m).abs() <= 1e-12 * m.max(1.0));
        Ok(())
    })
}

pub fn modular_algebra(runner: &mut TestRunner) -> Result<(), String> {
    let strat = (prop::collection::vec(extremes(), 1..5), range(), 0.5..2.0f64);
    run(runner, strat, |(mods, (r0, r1), lambda)| {
        let ext: Vec<ExtremeDistances> = mods
            .iter()
            .map(|(a, b)| ExtremeDistances::new(*a, *b).unwrap())
            .collect();
        let single = dof_modular(&ext[..1], r0, r1, lambda).unwrap().value;
        let direct = dof_broadside(ext[0].p_min, ext[0].p_max, r0, r1, lambda).unwrap().value;
        prop_assert_eq!(single, direct);
        let union = dof_modular(&ext, r0, r1, lambda).unwrap();
        let parts: f64 = ext
            .iter()
            .map(|e| dof_broadside(e.p_min, e.p_max, r0, r1, lambda).unwrap().value)
            .sum();
        prop_assert!(union.value <= parts * (1.0 + 1e-12));
        let measure: f64 = union.intervals.iter().map(Interval::width).sum();
        prop_assert_eq!(union.value, measure);
        Ok(())
    })
}

pub fn closed_form_identities(runner: &mut TestRunner) -> Result<(), String> {
    let strat = (extremes(), range(), 0.0..0.99f64, 0.5..2.0f64);
    run(runner, strat, |((p0, p1), (r0, r1), alpha, lambda)| {
        let l = r1 - r0;
        let sweep = dof_vs_rmin(p0, p1, l, r0, lambda).unwrap();
        let bs = dof_broadside(p0, p1, r0, r0 + l, lambda).unwrap().value;
        prop_assert!(rel(sweep, bs) <= 1e-12);
        let hole = dof_hole_fraction(p1, alpha, r0, r1, lambda).unwrap().value;
        let two = [
            ExtremeDistances::new(alpha * p1, p1).unwrap(),
            ExtremeDistances::new(alpha * p1, p1).unwrap(),
        ];
        let modular = dof_modular(&two, r0, r1, lambda).unwrap().value;
        prop_assert!(rel(hole, modular) <= 1e-12);
        let d = 2.0 * p1;
        let ray = rayleigh_bound(d, r0, lambda).unwrap();
        prop_assert!(rel(ray, (d / 2.0).powi(2) / (2.0 * lambda * r0)) <= 1e-12);
        Ok(())
    })
}

/// Holds when the aperture closure contains the origin, so `p_min = p̄_min = 0`.
/// Offset apertures can gain DoF under projection; see the dof tests.
pub fn projection_dominance(runner: &mut TestRunner) -> Result<(), String> {
    run(runner, (shape_around_origin(), direction(), range()), |(shape, d, (r0, r1))| {
        let region = ApertureRegion::from_shape(shape);
        let full = extreme_distances(&region).unwrap();
        prop_assert_eq!(full.p_min, 0.0);
        let bs = dof_broadside(full.p_min, full.p_max, r0, r1, 1.0).unwrap().value;
        let proj = dof_projected(&region, &d, r0, r1, 1.0).unwrap().value;
        prop_assert!(proj <= bs * (1.0 + 1e-9) + 1e-12);
        let same = dof_projected(&region, &Direction::broadside(), r0, r1, 1.0).unwrap().value;
        prop_assert!(rel(same, bs) <= 1e-12 || bs == 0.0);
        Ok(())
    })
}

pub fn sampled_extremes_bracketed(runner: &mut TestRunner) -> Result<(), String> {
    run(runner, (planar_shape(), 0.5..2.0f64), |(shape, h)| {
        let region = ApertureRegion::from_shape(shape);
        let exact = extreme_distances(&region).unwrap();
        let ap = sample_aperture(&region, h).unwrap();
        let s = ExtremeDistances::of_points(&ap.points).unwrap();
        let slack = h * 1e-9;
        prop_assert!(s.p_min >= exact.p_min - slack);
        prop_assert!(s.p_max <= exact.p_max + slack);
        prop_assert!(s.p_min <= exact.p_min + h);
        prop_assert!(s.p_max >= exact.p_max - h);
        let err = (ap.total_weight() - shape.measure()).abs();
        prop_assert!(err <= 0.05 * shape.measure() + 4.0 * h * h);
        Ok(())
    })
}

pub fn dominant_count_ordering(runner: &mut TestRunner) -> Result<(), String> {
    let strat = (prop::collection::vec(0.0..1.0f64, 1..60), 1e-4..0.09f64);
    run(runner, strat, |(mut v, eps)| {
        v.push(1.0);
        let c = count_dominant(&EigenSpectrum::from_unsorted(v), eps).unwrap();
        prop_assert!(c.count_strict <= c.count && c.count <= c.count_loose);
        prop_assert!(c.count >= 1);
        Ok(())
    })
}

pub fn spectrum_superposition(runner: &mut TestRunner) -> Result<(), String> {
    let strat = (5.0..40.0f64, 5.0..40.0f64, 1.0..30.0f64, 100.0..400.0f64);
    run(runner, strat, |(a, b, gap, r0)| {
        let region = ApertureRegion::new(vec![
            nfdof::geometry::ApertureModule::from_shape(Shape::x_segment(gap, gap + a)),
            nfdof::geometry::ApertureModule::from_shape(Shape::x_segment(-gap - b, -gap)),
        ]);
        let ap = sample_aperture(&region, 0.5).unwrap();
        let arr = ReceiveArray::new(Direction::broadside(), r0, 10.0 * r0, 8).unwrap();
        let pmax = (gap + a.max(b)).powi(2) * arr.inverse_span() / 2.0;
        let grid = XiGrid::covering(-pmax, 0.0, 20.0, 0.05).unwrap();
        let whole = convolve_sinc(&g0_spectrum(&ap, &arr, 1.0, grid).unwrap()).unwrap();
        let m0 = convolve_sinc(&g0_spectrum(&ap.module_subset(0), &arr, 1.0, grid).unwrap()).unwrap();
        let m1 = convolve_sinc(&g0_spectrum(&ap.module_subset(1), &arr, 1.0, grid).unwrap()).unwrap();
        let sum = m0.add(&m1).unwrap();
        let diff = nfdof::experiment::max_relative_difference(&sum, &whole);
        prop_assert!(diff <= 1e-10, "relative difference {}", diff);
        Ok(())
    })
}

pub type Property = fn(&mut TestRunner) -> Result<(), String>;

/// Named invariant checks, each driven by the runner it is given.
pub const PROPERTIES: &[(&str, Property)] = &[
    ("projection idempotence", projection_idempotent),
    ("projection norm identity", projection_norm_identity),
    ("kernel Toeplitz and Hermitian", kernel_toeplitz_hermitian),
    ("kernel conjugate symmetry and shift invariance", kernel_conjugate_symmetry),
    ("Gram Hermitian, trace identity", gram_hermitian_and_trace),
    ("DoF monotonicity signs", dof_monotone),
    ("interval-union algebra", interval_union_algebra),
    ("modular consistency and union bound", modular_algebra),
    ("closed-form identities", closed_form_identities),
    ("projection dominance", projection_dominance),
    ("sampled extremes and area", sampled_extremes_bracketed),
    ("dominant count ordering", dominant_count_ordering),
    ("spectrum superposition", spectrum_superposition),
];

pub fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

pub fn deterministic_runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha),
    )
}

fn run<S: Strategy>(
    runner: &mut TestRunner,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner.run(&strategy, test).map_err(|e| e.to_string())
}
