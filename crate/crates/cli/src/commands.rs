use std::sync::Arc;

use jetsphere_core::checks::{
    equator_flatness, expression_suite, gradient_oracle, group_checks, homogeneity_checks,
    relative_deviation,
};
use jetsphere_core::embeddings::{make_body, make_body_with, make_fk, BodyFunction, BodyOptions};
use jetsphere_core::forms::{
    comass_check, obstruction_even_variant, obstruction_integral, obstruction_interior,
    obstruction_side_faces, obstruction_spec, radial_ball_integral, scaling_study, stokes_suite,
    BarVariant,
};
use jetsphere_core::jetgroup::REL_TOL;
use jetsphere_core::metrics::{
    distortion_scan, fk_kth_derivative, linear_slope, replay, SamplerSpec, ScanMap,
};
use jetsphere_core::GroupParams;
use serde_json::json;

use crate::args::{
    Comass, Distortion, GroupCheck, JetCheck, MapKind, Obstruction, Scaling, Stokes, Suite,
};
use crate::error::CliError;
use crate::output::{Check, Outcome, Table};

type Run = Result<Outcome, CliError>;

const HOMOGENEITY_TOL: f64 = 1e-12;
const ORACLE_TOL: f64 = 1e-6;
const FD_STEP: f64 = 1e-5;
const FLATNESS_TOL: f64 = 1e-12;
const DRIFT_TOL: f64 = 0.1;
const REPLAY_TOL: f64 = 1e-12;

pub fn group_check(a: &GroupCheck) -> Run {
    let params = GroupParams::new(a.n, a.k)?;
    let g = group_checks(params, a.trials, a.common.seed)?;
    let h = homogeneity_checks(
        params,
        a.trials,
        &[0.1, 0.5, 2.0, 10.0],
        a.common.seed.wrapping_add(1),
    )?;
    let checks = vec![
        Check::at_most("associativity", g.associativity, REL_TOL),
        Check::at_most("identity", g.identity, REL_TOL),
        Check::at_most("inverse", g.inverse, REL_TOL),
        Check::at_most("dilation-homomorphism", g.dilation_homomorphism, REL_TOL),
        Check::at_most("dilation-composition", g.dilation_composition, REL_TOL),
        Check::at_most("left-invariance", g.left_invariance, REL_TOL),
        Check::at_most("norm-homogeneity", h.norm, HOMOGENEITY_TOL),
        Check::at_most("box-distance-homogeneity", h.box_distance, HOMOGENEITY_TOL),
    ];
    Ok(Outcome {
        checks,
        result: json!({ "group": g, "homogeneity": h }),
        table: None,
    })
}

pub fn jet_check(a: &JetCheck) -> Run {
    let mut checks = Vec::new();
    let mut oracles = Vec::new();
    for (i, (name, g)) in expression_suite(a.n)?.into_iter().enumerate() {
        let r = gradient_oracle(
            &name,
            &g,
            a.n,
            a.trials,
            FD_STEP,
            a.common.seed.wrapping_add(i as u64),
        )?;
        checks.push(Check::at_most(
            format!("fd-gradient/{name}"),
            r.max_error,
            ORACLE_TOL,
        ));
        oracles.push(r);
    }

    let fk = make_fk(a.k)?;
    let theta = 1e-4;
    let slope = fk_kth_derivative(&fk, a.k, theta)? / theta;
    let asymptotic = 2.0 * linear_slope(a.k);
    checks.push(Check::at_most(
        "fk-kth-derivative-slope",
        (slope - asymptotic).abs() / asymptotic,
        1e-3,
    ));

    let flatness = if a.n >= 2 {
        let body = BodyFunction::assemble(a.n, a.k, false)?;
        let w = equator_flatness(&body, a.trials, a.common.seed)?;
        checks.push(Check::at_most("equator-flatness", w, FLATNESS_TOL));
        Some(w)
    } else {
        None
    };
    Ok(Outcome {
        checks,
        result: json!({
            "fd_step": FD_STEP,
            "oracles": oracles,
            "fk_slope": { "theta": theta, "observed": slope, "expected": asymptotic },
            "equator_flatness": flatness,
        }),
        table: None,
    })
}

pub fn distortion(a: &Distortion) -> Run {
    let map = match a.map {
        MapKind::Circle => ScanMap::circle(a.k)?,
        MapKind::Sphere => ScanMap::sphere(Arc::new(make_body(a.n, a.k)?))?,
        MapKind::Lambda => ScanMap::lambda(a.n)?,
        MapKind::PolarLift => ScanMap::polar_lift(a.n)?,
        MapKind::Identity => ScanMap::identity(a.n)?,
    };
    let report = distortion_scan(&map, &SamplerSpec::new(a.pairs, a.common.seed))?;

    let mut checks = vec![Check::above("min-ratio-positive", report.min_ratio, 0.0)];
    for (label, w) in [("argmin", &report.argmin), ("argmax", &report.argmax)] {
        let again = replay(&map, w)?;
        checks.push(Check::at_most(
            format!("replay-{label}"),
            relative_deviation(again, w.ratio),
            REPLAY_TOL,
        ));
    }
    match a.map {
        MapKind::Lambda => {
            checks.push(Check::at_least(
                "lambda-lower-bound",
                report.min_ratio,
                1.0 / 9.0 - 1e-9,
            ));
            checks.push(Check::at_most(
                "lambda-upper-bound",
                report.max_ratio,
                3.0 + 1e-9,
            ));
        }
        MapKind::Identity => {
            checks.push(Check::at_most(
                "identity-min",
                (report.min_ratio - 1.0).abs(),
                1e-12,
            ));
            checks.push(Check::at_most(
                "identity-max",
                (report.max_ratio - 1.0).abs(),
                1e-12,
            ));
        }
        MapKind::Circle | MapKind::Sphere => {
            if let Some(d) = report.min_drift() {
                checks.push(Check::at_most("min-ratio-drift", d, DRIFT_TOL));
            }
        }
        MapKind::PolarLift => {}
    }
    let table = Table {
        columns: vec!["pairs", "min_ratio", "max_ratio"],
        rows: report
            .history
            .iter()
            .map(|h| vec![h.pairs as f64, h.min_ratio, h.max_ratio])
            .collect(),
    };
    Ok(Outcome {
        checks,
        result: json!({ "report": report, "max_drift": report.max_drift() }),
        table: Some(table),
    })
}

pub fn obstruction(a: &Obstruction) -> Run {
    let options = BodyOptions {
        resolution: a.res,
        force_beta: a.force_beta,
        skip_obstruction: false,
    };
    // An uncertified value is reported as a failed check, not an error.
    let body = match make_body_with(a.n, a.k, options) {
        Ok(body) => body,
        Err(jetsphere_core::Error::Construction(_)) => BodyFunction::assemble(a.n, a.k, true)?,
        Err(e) => return Err(e.into()),
    };
    let value = match body.obstruction() {
        Some(v) => v,
        None => obstruction_integral(&body, a.res)?,
    };
    let refined = obstruction_integral(&body, 2 * a.res)?;
    let even = obstruction_even_variant(&body, a.res)?;
    let sides = obstruction_side_faces(&body, a.res)?;
    let side_max = sides.iter().fold(0.0f64, |m, s| m.max(s.2.value.abs()));
    let oracle = if body.beta().is_none() {
        Some(radial_ball_integral(&body, a.res)?)
    } else {
        None
    };

    let mut checks = vec![
        Check::above("certified-nonzero", value.value.abs(), 10.0 * value.error),
        Check::above(
            "refined-same-sign",
            value.value.signum() * refined.value.signum(),
            0.0,
        ),
        Check::at_most(
            "refinement-change",
            (refined.value - value.value).abs(),
            value.error,
        ),
        Check::at_most("even-variant", even.value.abs(), even.error.max(1e-12)),
        Check::at_most("side-faces", side_max, 1e-12),
    ];
    if let Some(o) = oracle {
        checks.push(Check::at_most(
            "radial-oracle",
            (refined.value - o).abs() / o.abs(),
            1e-3,
        ));
    }
    Ok(Outcome {
        checks,
        result: json!({
            "spec_fingerprint": obstruction_spec(&body, a.res, BarVariant::Odd).fingerprint(),
            "body": body.expr().to_string(),
            "beta_used": body.beta().is_some(),
            "value": value.value,
            "error": value.error,
            "resolution": value.resolution,
            "certified": value.is_certified_nonzero(),
            "refined": refined,
            "even_variant": even,
            "side_faces": sides
                .iter()
                .map(|(l, m, v)| json!({ "axis": l, "side": m, "value": v.value, "error": v.error }))
                .collect::<Vec<_>>(),
            "radial_oracle": oracle,
        }),
        table: None,
    })
}

pub fn scaling(a: &Scaling) -> Run {
    let body = make_body(a.n, a.k)?;
    let study = scaling_study(&body, &a.m, a.res, &a.lambda_hat)?;
    let worst = study
        .rows
        .iter()
        .fold(0.0f64, |m, r| m.max(r.relative_error));
    let checks = vec![
        Check::at_most(
            "fitted-exponent",
            (study.fitted_exponent - study.expected_exponent).abs(),
            0.01,
        ),
        Check::at_most("row-relative-error", worst, 1e-9),
    ];
    let table = Table {
        columns: vec![
            "M",
            "integral",
            "predicted",
            "relative_error",
            "lower_bound",
        ],
        rows: study
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.m,
                    r.integral,
                    r.predicted,
                    r.relative_error,
                    r.lower_bound,
                ]
            })
            .collect(),
    };
    Ok(Outcome {
        checks,
        result: serde_json::to_value(&study)?,
        table: Some(table),
    })
}

pub fn stokes(a: &Stokes) -> Run {
    match a.suite {
        Suite::Smooth => {
            let cases = stokes_suite(a.trials, a.common.seed, a.res, a.n + 1)?;
            let failed = cases.iter().filter(|c| !c.pass).count();
            let worst = cases.iter().fold(0.0f64, |m, c| {
                m.max(
                    (c.interior.value - c.boundary.value).abs()
                        / (c.interior.error + c.boundary.error).max(f64::MIN_POSITIVE),
                )
            });
            Ok(Outcome {
                checks: vec![
                    Check::at_most("failed-identities", failed as f64, 0.0),
                    Check::at_most("worst-gap-over-error", worst, 1.0),
                ],
                result: json!({ "cases": cases }),
                table: None,
            })
        }
        Suite::Obstruction => {
            let body = make_body(a.n, a.k)?;
            let boundary = body.obstruction().expect("certified by make_body");
            let interior = obstruction_interior(&body, a.res)?;
            let gap = (interior.value - boundary.value).abs();
            Ok(Outcome {
                checks: vec![Check::at_most(
                    "interior-vs-boundary",
                    gap,
                    interior.error + boundary.error,
                )],
                result: json!({ "interior": interior, "boundary": boundary }),
                table: None,
            })
        }
    }
}

pub fn comass(a: &Comass) -> Run {
    let r = comass_check(a.n, a.k, a.trials, a.common.seed)?;
    Ok(Outcome {
        checks: vec![
            Check::at_most("max-abs", r.max_abs, 1.0 + 1e-9),
            Check::at_most("extremal", (r.extremal - 1.0).abs(), 1e-12),
        ],
        result: serde_json::to_value(&r)?,
        table: None,
    })
}
