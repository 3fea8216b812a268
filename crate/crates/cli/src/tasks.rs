use num_complex::Complex64;
use num_traits::Zero;
use polycurv_core::algebra::rational::{format_rational, pochhammer, to_f64};
use polycurv_core::algebra::{MultiIndex, Rational};
use polycurv_core::curvature::{
    curvature_matrix, det_bundle_curvature, fd_oracle, zero_set_metric_f64, MonomialFrameF64,
    CONVENTION,
};
use polycurv_core::frames::{
    decompose_monomial_ideal, frame_on_zero_set, grammian, FrameSeries, MetricSeries,
};
use polycurv_core::ideals::{
    localization_dim, minimality_certificate, zero_set, IdealSpec, Minimality,
};
use polycurv_core::invariants::{
    cubic_positive_roots, lambda_mu_invariants, polydisc_rigidity, principal_frame_curvatures,
    principal_rigidity,
};
use polycurv_core::rkhs::{submodule_kernel, WeightedPolydiscModule};

use crate::config::{format_point, FrameChoice, JobConfig, TaskKind};
use crate::report::{ConventionRecord, InputEcho, Report, Value};
use crate::CliError;

const FD_STEP: f64 = 1e-3;
const FD_UNITS: &str = "float, finite differences with step 1e-3";

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn echo(config: &JobConfig) -> InputEcho {
    InputEcho {
        weights: config.weights.as_deref().map(strings),
        ideal: config.ideal.as_ref().map(ToString::to_string),
        family: config.ideal.as_ref().map(|i| i.family().to_string()),
        point: config.point.as_deref().map(strings),
        z: config.z.as_deref().map(strings),
        w: config.w.as_deref().map(strings),
        trunc_degree: config.trunc_degree,
        ideal_degree: config.ideal_degree,
        compare_weights: config.compare_weights.as_deref().map(strings),
        alpha: config.alpha.as_ref().map(format_rational),
        frames: config.frames.map(|f| match f {
            FrameChoice::Decomposition => "decomposition".into(),
            FrameChoice::ZeroSet => "zero-set".into(),
        }),
    }
}

fn module(config: &JobConfig) -> Result<WeightedPolydiscModule, CliError> {
    let ws = config
        .weights
        .clone()
        .ok_or_else(|| CliError::Config("module.weights: required for this task".into()))?;
    Ok(WeightedPolydiscModule::new(ws)?)
}

fn ideal(config: &JobConfig) -> Result<&IdealSpec, CliError> {
    config
        .ideal
        .as_ref()
        .ok_or_else(|| CliError::Config("ideal.generators: required for this task".into()))
}

fn monomial_name(alpha: &MultiIndex) -> String {
    let parts: Vec<String> = alpha
        .exponents()
        .iter()
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(i, &k)| {
            if k == 1 {
                format!("z{}", i + 1)
            } else {
                format!("z{}^{k}", i + 1)
            }
        })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

pub fn run(config: &JobConfig) -> Result<Report, CliError> {
    let mut report = Report {
        input: echo(config),
        task: config.task.name().into(),
        results: Vec::new(),
        diagnostics: Vec::new(),
        convention: ConventionRecord {
            curvature: CONVENTION.curvature.into(),
            gauge: CONVENTION.gauge.into(),
            split_rule: None,
        },
    };
    match config.task {
        TaskKind::Kernel => kernel(config, &mut report)?,
        TaskKind::Decompose => decompose(config, &mut report)?,
        TaskKind::Metric => metric(config, &mut report)?,
        TaskKind::Curvature => curvature(config, &mut report)?,
        TaskKind::Dimension => dimension(config, &mut report)?,
        TaskKind::Compare => compare(config, &mut report)?,
        TaskKind::Cubic => cubic(config, &mut report)?,
    }
    Ok(report)
}

fn kernel(config: &JobConfig, report: &mut Report) -> Result<(), CliError> {
    let md = module(config)?;
    let ideal = ideal(config)?;
    let z = config
        .z
        .clone()
        .or_else(|| config.point.clone())
        .ok_or_else(|| {
            CliError::Config("task.z or task.point: an evaluation point is required".into())
        })?;
    let w = config.w.clone().unwrap_or_else(|| z.clone());
    let n = config.ideal_degree;
    let k = submodule_kernel(md.shared(), ideal, n)?;
    report.note(format!("kernel form: {}", k.variant_name()));
    report.exact(format!("K_{n}(z, w)"), &k.evaluate_truncated(&z, &w, n));
    match k.evaluate_exact(&z, &w) {
        Some(v) => report.exact("K(z, w)", &v),
        None => report.note("no closed form for the untruncated kernel; only K_N is exact"),
    }
    if let Some(b) = k.truncation_remainder_bound(&z, &w, n) {
        report.exact("truncation remainder bound", &b);
    }
    let c = |p: &[Rational]| {
        p.iter()
            .map(|x| Complex64::new(to_f64(x), 0.0))
            .collect::<Vec<_>>()
    };
    match k.evaluate_f64(&c(&z), &c(&w)) {
        Ok(v) => report.push("K(z, w)", Value::Float(v.re), "float, closed-form sum"),
        Err(e) => report.note(format!("floating evaluation skipped: {e}")),
    }
    Ok(())
}

/// Frames selected by the config: split frames at the origin, or zero-set
/// frames of a coordinate-power ideal at a point of its zero set.
fn frames(config: &JobConfig, report: &mut Report) -> Result<(FrameSeries, FrameChoice), CliError> {
    let md = module(config)?;
    let ideal = ideal(config)?;
    let m = ideal.nvars();
    let point = config
        .point
        .clone()
        .unwrap_or_else(|| vec![Rational::zero(); m]);
    let at_origin = point.iter().all(Zero::is_zero);
    let choice = config.frames.unwrap_or(if at_origin {
        FrameChoice::Decomposition
    } else {
        FrameChoice::ZeroSet
    });
    let frame = match choice {
        FrameChoice::Decomposition => {
            if !at_origin {
                return Err(CliError::Math(
                    "decomposition frames are built at the origin".into(),
                ));
            }
            let gens = ideal.monomial_exponents().ok_or_else(|| {
                CliError::Unsupported(format!("frames need monomial generators, got {ideal}"))
            })?;
            let f = decompose_monomial_ideal(&md, &gens, config.trunc_degree)?;
            report.convention.split_rule = f.split_rule().map(str::to_string);
            f
        }
        FrameChoice::ZeroSet => frame_on_zero_set(&md, ideal, &point, config.trunc_degree)?,
    };
    report.note(format!(
        "frames at {} ({}), truncation degree {}",
        format_point(&point),
        match choice {
            FrameChoice::Decomposition => "decomposition",
            FrameChoice::ZeroSet => "zero set",
        },
        config.trunc_degree
    ));
    Ok((frame, choice))
}

fn decompose(config: &JobConfig, report: &mut Report) -> Result<(), CliError> {
    let (frame, _) = frames(config, report)?;
    let zdeg = frame
        .generators()
        .iter()
        .map(MultiIndex::degree)
        .max()
        .unwrap_or(0)
        + 2;
    for k in 0..frame.rank() {
        for (alpha, c) in frame.vector_at_base(k, zdeg) {
            report.exact(format!("F{}(w0)[{}]", k + 1, monomial_name(&alpha)), &c);
        }
    }
    let residual = frame.reconstruction_residual(config.trunc_degree);
    report.push(
        "reconstruction residual terms",
        Value::integer(residual.len() as i64),
        "count",
    );
    report.note(format!("frame coefficients listed up to z-degree {zdeg}"));
    Ok(())
}

fn metric_of(
    config: &JobConfig,
    report: &mut Report,
) -> Result<(MetricSeries, FrameSeries, FrameChoice), CliError> {
    let (frame, choice) = frames(config, report)?;
    let metric = grammian(&frame)?;
    Ok((metric, frame, choice))
}

fn metric(config: &JobConfig, report: &mut Report) -> Result<(), CliError> {
    let (metric, _, _) = metric_of(config, report)?;
    let h0 = metric.at_base();
    let t = metric.dim();
    for a in 0..t {
        for b in 0..t {
            report.exact(format!("H(w0)[{},{}]", a + 1, b + 1), h0.get(a, b));
        }
    }
    if !metric.scale.is_empty() {
        match metric.scale_value() {
            Some(s) => report.exact("dropped constant factor", &s),
            None => report.note("dropped constant factor is irrational"),
        }
        for (b, e) in &metric.scale {
            report.note(format!(
                "dropped factor ({})^({})",
                format_rational(b),
                format_rational(e)
            ));
        }
    }
    report.push(
        "hermitian",
        Value::boolean(metric.is_hermitian()),
        "boolean",
    );
    report.push(
        "positive definite at w0",
        Value::boolean(metric.is_positive_definite_at_base()),
        "boolean",
    );
    for a in 0..t {
        for b in 0..t {
            report.note(format!(
                "H[{},{}] = {}",
                a + 1,
                b + 1,
                metric.matrix.get(a, b)
            ));
        }
    }
    Ok(())
}

fn curvature(config: &JobConfig, report: &mut Report) -> Result<(), CliError> {
    let (metric, frame, choice) = metric_of(config, report)?;
    let coords = frame.free_coordinates();
    let det = det_bundle_curvature(&metric)?;
    for &i in &coords {
        for &j in &coords {
            report.exact(
                format!("det curvature [{},{}]", i + 1, j + 1),
                det.get(i, j),
            );
        }
    }
    let k = curvature_matrix(&metric)?;
    let t = k.rank();
    for &i in &coords {
        for &j in &coords {
            for a in 0..t {
                for b in 0..t {
                    report.exact(
                        format!("K[{},{}][{},{}]", i + 1, j + 1, a + 1, b + 1),
                        k.block(i, j).get(a, b),
                    );
                }
            }
        }
    }
    report.push(
        "trace identity holds",
        Value::boolean(k.trace() == det),
        "boolean",
    );
    report.push(
        "hermitian relation holds",
        Value::boolean(k.is_hermitian_relative_to(&metric.at_base())),
        "boolean",
    );

    if t == 1 {
        let h = metric.matrix.get(0, 0);
        for &i in &coords {
            report.exact(
                format!("non-log curvature d{0} dbar{0} ||F1||^2", i + 1),
                &h.mixed_hessian(i, i)?,
            );
        }
        report.note(
            "both readings reported: the non-log value d dbar ||F1||^2 keeps the constant ||F1(w0)||^2 that the log reading d dbar log ||F1||^2 removes",
        );
        if let Some(s) = metric.scale_value() {
            if !s.is_zero() && metric.scale.iter().any(|(b, _)| !b.is_zero()) {
                report.note(format!(
                    "non-log values omit the dropped constant factor {}",
                    format_rational(&s)
                ));
            }
        }
    }

    let point: Vec<Complex64> = frame
        .base()
        .iter()
        .map(|x| Complex64::new(to_f64(x), 0.0))
        .collect();
    let md = frame.module().clone();
    let fd = |i: usize| -> Result<f64, polycurv_core::Error> {
        match choice {
            FrameChoice::Decomposition => {
                let gens = frame
                    .generators()
                    .iter()
                    .map(|g| g.exponents().to_vec())
                    .collect();
                let src = MonomialFrameF64::new(&md, gens, 8);
                Ok(fd_oracle(&src, &point, i, i, FD_STEP)?.value.re)
            }
            FrameChoice::ZeroSet => {
                let src = zero_set_metric_f64(&md, ideal(config).expect("checked"))?;
                Ok(fd_oracle(&src, &point, i, i, FD_STEP)?.value.re)
            }
        }
    };
    for &i in &coords {
        match fd(i) {
            Ok(v) => report.push(
                format!("det curvature [{0},{0}]", i + 1),
                Value::Float(v),
                FD_UNITS,
            ),
            Err(e) => report.note(format!("floating cross-check skipped: {e}")),
        }
    }
    Ok(())
}

fn dimension(config: &JobConfig, report: &mut Report) -> Result<(), CliError> {
    let ideal = ideal(config)?;
    let point = config
        .point
        .clone()
        .unwrap_or_else(|| vec![Rational::zero(); ideal.nvars()]);
    let d = localization_dim(ideal, &point, config.ideal_degree)?;
    report.push(
        "localization dimension",
        Value::integer(d.dim as i64),
        "dimension",
    );
    match d.stabilized_at {
        Some(n) => report.push("stabilized at N", Value::integer(n.into()), "degree"),
        None => report.note(format!(
            "d_N did not stabilize by N = {}; the dimension is the last level computed",
            config.ideal_degree
        )),
    }
    let seq: Vec<String> = d.sequence.iter().map(|(n, v)| format!("{n}:{v}")).collect();
    report.note(format!("d_N by level: {}", seq.join(" ")));
    if !d.monotonicity_violations.is_empty() {
        report.note(format!(
            "d_N increased at N = {:?}",
            d.monotonicity_violations
        ));
    }
    match zero_set(ideal) {
        Ok(v) => {
            report.note(format!("zero set: {v}"));
            if let Some(c) = v.codim(ideal.nvars()) {
                report.push(
                    "zero set codimension",
                    Value::integer(c as i64),
                    "dimension",
                );
            }
            if let Some(on) = v.contains(&point) {
                report.push("point on zero set", Value::boolean(on), "boolean");
            }
            match minimality_certificate(ideal)? {
                Minimality::MinimalByCodim { conditional } => report.note(format!(
                    "generators are minimal: codim V equals the number of generators{}",
                    if conditional {
                        " (codimension supplied by the user)"
                    } else {
                        ""
                    }
                )),
                Minimality::HypothesisFails { generators, codim } => report.note(format!(
                    "codimension test does not apply ({generators} generators, codim {})",
                    codim.map_or("undefined".into(), |c| c.to_string())
                )),
            }
        }
        Err(e) => report.note(format!("zero set not available: {e}")),
    }
    Ok(())
}

fn compare(config: &JobConfig, report: &mut Report) -> Result<(), CliError> {
    let ideal = ideal(config)?;
    let left = config
        .weights
        .clone()
        .ok_or_else(|| CliError::Config("module.weights: required".into()))?;
    let right = config
        .compare_weights
        .clone()
        .ok_or_else(|| CliError::Config("task.compare_weights: required for compare".into()))?;
    let exps = ideal.coordinate_power_exponents().ok_or_else(|| {
        CliError::Unsupported(format!(
            "rigidity is decided for <z_k^(i_k)> ideals, got {ideal}"
        ))
    })?;
    let m = left.len();
    if m == 2 && exps.len() == 2 && exps.values().all(|&e| e == 1) {
        let a = lambda_mu_invariants(&left[0], &left[1])?;
        let b = lambda_mu_invariants(&right[0], &right[1])?;
        report.exact("kappa1 (left)", &a.kappa1);
        report.exact("kappa2 (left)", &a.kappa2);
        report.exact("kappa1 (right)", &b.kappa1);
        report.exact("kappa2 (right)", &b.kappa2);
        report.exact("alpha (left)", &a.alpha());
        report.push("equivalent", Value::boolean(a == b), "boolean");
        report.note("decided by the determinant-bundle curvature pair at the origin");
    } else if m == 2 && exps.len() == 1 {
        let (&k, &p) = exps.iter().next().expect("one generator");
        let other = 1 - k;
        let (l, mu, l2, mu2) = (&left[k], &left[other], &right[k], &right[other]);
        for (side, lw, mw) in [("left", l, mu), ("right", l2, mu2)] {
            report.exact(
                format!("mu (lambda)_{p} ({side})"),
                &(mw * pochhammer(lw, p)),
            );
            report.exact(
                format!("mu (lambda)_{} ({side})", p + 1),
                &(mw * pochhammer(lw, p + 1)),
            );
            let c = principal_frame_curvatures(lw, mw, p)?;
            report.exact(format!("non-log frame curvature ({side})"), &c.plain);
            report.exact(format!("log frame curvature ({side})"), &c.log);
        }
        report.push(
            "equivalent",
            Value::boolean(principal_rigidity(l, mu, p, l2, mu2)?),
            "boolean",
        );
        report.note("decided by the pair mu (lambda)_p, mu (lambda)_{p+1}");
    } else {
        let r = polydisc_rigidity(&left, ideal, &right)?;
        for inv in &r.invariants {
            report.exact(format!("{} (left)", inv.name), &inv.left);
            report.exact(format!("{} (right)", inv.name), &inv.right);
        }
        report.push("equivalent", Value::boolean(r.equivalent), "boolean");
        report.note(format!(
            "decided by {} invariants listed above",
            r.invariants.len()
        ));
    }
    Ok(())
}

fn cubic(config: &JobConfig, report: &mut Report) -> Result<(), CliError> {
    let alpha = match (&config.alpha, &config.weights) {
        (Some(a), _) => a.clone(),
        (None, Some(ws)) if ws.len() == 2 => {
            let a = lambda_mu_invariants(&ws[0], &ws[1])?.alpha();
            report.note("alpha derived from the module weights as (kappa1 - 1/2)/(kappa2 - 1/2)");
            a
        }
        _ => return Err(CliError::Config("task.alpha: required for cubic".into())),
    };
    let r = cubic_positive_roots(&alpha)?;
    report.exact("alpha", &r.alpha);
    report.push(
        "positive roots",
        Value::integer(r.positive_roots as i64),
        "count",
    );
    for (k, (lo, hi)) in r.intervals.iter().enumerate() {
        report.exact(format!("root {} lower (exclusive)", k + 1), lo);
        report.exact(format!("root {} upper (inclusive)", k + 1), hi);
    }
    report.note(format!("polynomial: {}", r.polynomial()));
    report.note("roots counted with Sturm sequences over the rationals");
    Ok(())
}
