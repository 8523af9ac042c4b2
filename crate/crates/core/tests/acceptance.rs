//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

mod support;

use std::time::Instant;

use serde_json::json;

use nfdof::channel::{max_phase_error, ChannelModel};
use nfdof::dof::{count_dominant, dof_broadside, dof_hole_fraction, DEFAULT_EPSILON};
use nfdof::experiment::{eig_pipeline, spectrum_pipeline, ExperimentConfig};
use nfdof::geometry::{
    extreme_distances, project_aperture, sample_aperture, sample_receive_array, ApertureRegion,
    Direction, ReceiveArray, Shape,
};
use nfdof::spectral::{
    channel_gram, channel_spectrum, operator_eigenvalues, ConvolutionKernel, InverseDistanceGrid,
};

use support::{config, deterministic_runner, rel, square_with_hole, PROPERTIES};

type Outcome = Result<(bool, String), String>;
type Criterion = fn() -> Outcome;

fn base(aperture: ApertureRegion, extra: serde_json::Value) -> ExperimentConfig {
    let mut v = json!({
        "wavelength": 1.0,
        "aperture": aperture,
        "array": { "r_min": 200.0, "r_max": 2000.0 },
        "spacing": 0.5,
        "rx_count": 256,
    });
    for (k, x) in extra.as_object().expect("object").iter() {
        v[k] = x.clone();
    }
    config(v)
}

fn annulus() -> ApertureRegion {
    ApertureRegion::from_shape(Shape::annulus([0.0, 0.0], 60.0, 100.0))
}

/// Strip `x ∈ [60, √(100² − 10²)]`, `z ∈ [−10, 10]`: extremes 60 and 100.
fn strip() -> ApertureRegion {
    let x1 = (100.0f64 * 100.0 - 10.0 * 10.0).sqrt();
    ApertureRegion::from_shape(Shape::rectangle([(60.0 + x1) / 2.0, 0.0], x1 - 60.0, 20.0))
}

fn segment(a: f64, b: f64) -> ApertureRegion {
    ApertureRegion::from_shape(Shape::x_segment(a, b))
}

fn fig2_reproduction() -> Outcome {
    let cfg = base(square_with_hole(), json!({}));
    let start = Instant::now();
    let out = eig_pipeline(&cfg).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let pred = out.prediction.value;
    let c = out.count;
    let pass = (pred - 14.4).abs() <= 1e-9 && (12..=16).contains(&c.count) && secs <= 300.0;
    Ok((
        pass,
        format!(
            "prediction {pred:.6} (14.4), count {} in [12, 16] (eps/10: {}, 10 eps: {}), {secs:.1} s of 300",
            c.count, c.count_loose, c.count_strict
        ),
    ))
}

fn shape_invariance() -> Outcome {
    let mut counts = Vec::new();
    let mut detail = Vec::new();
    for (name, region) in [
        ("square with hole", square_with_hole()),
        ("annulus", annulus()),
        ("strip", strip()),
    ] {
        let ext = extreme_distances(&region).map_err(|e| e.to_string())?;
        if (ext.p_min - 60.0).abs() > 1e-9 || (ext.p_max - 100.0).abs() > 1e-9 {
            return Ok((false, format!("{name} extremes ({}, {})", ext.p_min, ext.p_max)));
        }
        let out = eig_pipeline(&base(region, json!({}))).map_err(|e| e.to_string())?;
        counts.push(out.count.count);
        detail.push(format!("{name} {}", out.count.count));
    }
    let spread = counts.iter().max().unwrap() - counts.iter().min().unwrap();
    Ok((spread <= 1, format!("{}; spread {spread} (≤ 1)", detail.join(", "))))
}

fn spectrum_check() -> Outcome {
    let cfg = base(square_with_hole(), json!({}));
    let out = spectrum_pipeline(&cfg).map_err(|e| e.to_string())?;
    let step = out.profile.grid.step;
    let support = out.profile.support().ok_or("empty g0")?;
    let omega = out.omega;
    let inside = support.lo >= omega.lo - step && support.hi <= omega.hi + step;
    let width_ok = (out.bandwidth_half - 14.4).abs() <= 1.5;
    Ok((
        inside && width_ok && (omega.lo + 22.5).abs() < 1e-9 && (omega.hi + 8.1).abs() < 1e-9,
        format!(
            "support [{:.3}, {:.3}] in [{:.3}, {:.3}] ± {step}: {inside}; half-level width {:.3} vs 14.4 ± 1.5 \
             (width at 5% level {:.3})",
            support.lo, support.hi, omega.lo, omega.hi, out.bandwidth_half, out.bandwidth_5pct
        ),
    ))
}

fn inverse_distance_equivalence() -> Outcome {
    let region = square_with_hole();
    let ap = sample_aperture(&region, 0.5).map_err(|e| e.to_string())?;
    let arr = ReceiveArray::new(Direction::broadside(), 200.0, 2000.0, 128).map_err(|e| e.to_string())?;
    let rx = sample_receive_array(&arr);
    let model = ChannelModel::fresnel(1.0).map_err(|e| e.to_string())?;
    let r_side = operator_eigenvalues(&channel_gram(&ap, &rx, &model).map_err(|e| e.to_string())?, &rx.r_weights)
        .map_err(|e| e.to_string())?;
    let grid = InverseDistanceGrid::uniform(&arr).map_err(|e| e.to_string())?;
    let g = ConvolutionKernel::broadside(&ap, 1.0).matrix(&grid);
    let t_side = operator_eigenvalues(&g, &grid.weights).map_err(|e| e.to_string())?;
    let worst = (0..14)
        .map(|k| rel(r_side.values[k], t_side.values[k]))
        .fold(0.0, f64::max);
    Ok((worst <= 0.01, format!("top-14 max relative difference {worst:.2e} (≤ 1e-2), K = 128")))
}

fn projection_equivalence() -> Outcome {
    let region = ApertureRegion::from_shape(Shape::rectangle([0.0, 0.0], 150.0, 50.0));
    let ap = sample_aperture(&region, 0.5).map_err(|e| e.to_string())?;
    let dir = Direction::from_degrees(60.0, 0.0);
    let arr = ReceiveArray::new(dir, 400.0, 4000.0, 256).map_err(|e| e.to_string())?;
    let rx = sample_receive_array(&arr);
    let model = ChannelModel::fresnel(1.0).map_err(|e| e.to_string())?;
    let full = channel_spectrum(&ap, &rx, &model).map_err(|e| e.to_string())?;
    let proj = channel_spectrum(&project_aperture(&ap, &dir), &rx, &model).map_err(|e| e.to_string())?;
    let cf = count_dominant(&full, DEFAULT_EPSILON).map_err(|e| e.to_string())?;
    let cp = count_dominant(&proj, DEFAULT_EPSILON).map_err(|e| e.to_string())?;
    let worst = (0..cf.count)
        .map(|k| rel(proj.values[k], full.values[k]))
        .fold(0.0, f64::max);
    Ok((
        worst <= 0.02 && cf.count == cp.count,
        format!(
            "counts {} vs {}, dominant max relative difference {worst:.2e} (≤ 2e-2)",
            cf.count, cp.count
        ),
    ))
}

fn fresnel_error() -> Outcome {
    let ap = sample_aperture(&segment(-100.0, 100.0), 0.125).map_err(|e| e.to_string())?;
    let dir = Direction::from_degrees(75.0, 0.0);
    let phase = |r_min: f64| -> Result<f64, String> {
        let arr = ReceiveArray::new(dir, r_min, 10.0 * r_min, 2).map_err(|e| e.to_string())?;
        Ok(max_phase_error(&ap, &arr, 1.0))
    };
    let (e1400, e700) = (phase(1400.0)?, phase(700.0)?);
    let pi = std::f64::consts::PI;
    let phase_ok = rel(e1400, pi / 8.0) <= 0.05 && rel(e700, pi / 2.0) <= 0.05;
    let mut detail = format!(
        "phase error {e1400:.4} (π/8 {:+.1}%), {e700:.4} (π/2 {:+.1}%)",
        100.0 * (e1400 / (pi / 8.0) - 1.0),
        100.0 * (e700 / (pi / 2.0) - 1.0)
    );
    let mut counts_ok = true;
    for r_min in [200.0, 300.0] {
        let arr = ReceiveArray::new(dir, r_min, 2000.0, 256).map_err(|e| e.to_string())?;
        let rx = sample_receive_array(&arr);
        let count = |model: ChannelModel| -> Result<usize, String> {
            let s = channel_spectrum(&ap, &rx, &model).map_err(|e| e.to_string())?;
            Ok(count_dominant(&s, DEFAULT_EPSILON).map_err(|e| e.to_string())?.count)
        };
        let exact = count(ChannelModel::exact(1.0).map_err(|e| e.to_string())?)?;
        let fresnel = count(ChannelModel::fresnel(1.0).map_err(|e| e.to_string())?)?;
        let diff = exact.abs_diff(fresnel) as f64 / fresnel as f64;
        counts_ok &= diff <= 0.10;
        detail += &format!("; r_min {r_min}: exact {exact}, Fresnel {fresnel} ({:.1}%)", 100.0 * diff);
    }
    Ok((phase_ok && counts_ok, detail))
}

fn modular_superposition() -> Outcome {
    let spacing = json!({ "spacing": 0.125 });
    let modular = base(ApertureRegion::symmetric_segments(40.0, 100.0), spacing.clone());
    let centered = base(segment(-60.0, 60.0), spacing);
    let spec = spectrum_pipeline(&modular).map_err(|e| e.to_string())?;
    let residual = spec.superposition_residual.ok_or("expected two modules")?;
    let m = eig_pipeline(&modular).map_err(|e| e.to_string())?;
    let c = eig_pipeline(&centered).map_err(|e| e.to_string())?;
    let pass = residual <= 1e-10
        && (m.prediction.value - 18.9).abs() <= 1e-9
        && m.count.count.abs_diff(19) <= 2
        && (c.prediction.value - 8.1).abs() <= 1e-9
        && c.count.count.abs_diff(8) <= 2
        && m.count.count > c.count.count
        && m.prediction.value > c.prediction.value;
    Ok((
        pass,
        format!(
            "superposition residual {residual:.1e}; modular prediction {:.4}, count {} (19 ± 2); \
             centered prediction {:.4}, count {} (8 ± 2)",
            m.prediction.value, m.count.count, c.prediction.value, c.count.count
        ),
    ))
}

fn hole_fraction_law() -> Outcome {
    let full_pred = dof_hole_fraction(100.0, 0.0, 200.0, 2000.0, 1.0).map_err(|e| e.to_string())?.value;
    let hole_pred = dof_hole_fraction(100.0, 0.3, 200.0, 2000.0, 1.0).map_err(|e| e.to_string())?.value;
    let check = dof_broadside(0.0, 100.0, 200.0, 2000.0, 1.0).map_err(|e| e.to_string())?.value;
    let ratio = hole_pred / full_pred;
    let spacing = json!({ "spacing": 0.125 });
    let full = eig_pipeline(&base(segment(-100.0, 100.0), spacing.clone())).map_err(|e| e.to_string())?;
    let holed = eig_pipeline(&base(ApertureRegion::symmetric_segments(30.0, 100.0), spacing))
        .map_err(|e| e.to_string())?;
    let count_ratio = holed.count.count as f64 / full.count.count as f64;
    Ok((
        (ratio - 0.91).abs() <= 1e-12 && (full_pred - check).abs() <= 1e-12 && (count_ratio - 0.91).abs() <= 0.05,
        format!(
            "prediction ratio {ratio:.15}; counts {} / {} = {count_ratio:.4} (0.91 ± 0.05)",
            holed.count.count, full.count.count
        ),
    ))
}

fn property_suite() -> Outcome {
    let start = Instant::now();
    let mut failed = Vec::new();
    for (name, check) in PROPERTIES {
        if let Err(e) = check(&mut deterministic_runner(100)) {
            failed.push(format!("{name}: {}", e.lines().next().unwrap_or("")));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((
        failed.is_empty() && secs <= 600.0,
        format!(
            "{} properties × 100 cases, {} failed, {secs:.1} s of 600{}",
            PROPERTIES.len(),
            failed.len(),
            if failed.is_empty() { String::new() } else { format!(": {}", failed.join("; ")) }
        ),
    ))
}

fn main() {
    let criteria: [(&str, Criterion); 9] = [
        ("square with hole: closed form and dominant count", fig2_reproduction),
        ("shape invariance at equal extremes", shape_invariance),
        ("g0 support and half-level bandwidth", spectrum_check),
        ("r-domain and t-domain operator eigenvalues", inverse_distance_equivalence),
        ("projected aperture spectrum", projection_equivalence),
        ("Fresnel phase error and exact-model counts", fresnel_error),
        ("modular superposition and ordering", modular_superposition),
        ("hole-fraction law", hole_fraction_law),
        ("property suite", property_suite),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match run() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "{} {} {name}: {detail} [{:.1} s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
