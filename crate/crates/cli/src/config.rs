//! Job configuration: a TOML file with `[module]`, `[ideal]` and `[task]`
//! sections, plus command-line overrides.

use std::fmt;

use polycurv_core::algebra::rational::{
    format_rational, inside_unit_disc, is_positive, parse_rational,
};
use polycurv_core::algebra::Rational;
use polycurv_core::ideals::{Family, IdealSpec};
use serde::Deserialize;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TaskKind {
    Kernel,
    Decompose,
    Metric,
    Curvature,
    Dimension,
    Compare,
    Cubic,
}

impl TaskKind {
    pub const ALL: [TaskKind; 7] = [
        TaskKind::Kernel,
        TaskKind::Decompose,
        TaskKind::Metric,
        TaskKind::Curvature,
        TaskKind::Dimension,
        TaskKind::Compare,
        TaskKind::Cubic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TaskKind::Kernel => "kernel",
            TaskKind::Decompose => "decompose",
            TaskKind::Metric => "metric",
            TaskKind::Curvature => "curvature",
            TaskKind::Dimension => "dimension",
            TaskKind::Compare => "compare",
            TaskKind::Cubic => "cubic",
        }
    }

    pub fn from_name(s: &str) -> Option<TaskKind> {
        TaskKind::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

/// Which frames the metric and curvature tasks use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameChoice {
    /// Split decomposition frames around the origin.
    Decomposition,
    /// Closed-form frames along the zero set of `<z_k^{i_k}>`.
    ZeroSet,
}

/// A rational written either as a TOML integer or as a string such as `"3/2"`.
#[derive(Deserialize, Clone, Debug)]
#[serde(untagged)]
enum Number {
    Int(i64),
    Text(String),
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    module: Option<RawModule>,
    ideal: Option<RawIdeal>,
    task: Option<RawTask>,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct RawModule {
    dimension: Option<usize>,
    weights: Vec<Number>,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct RawIdeal {
    generators: Vec<String>,
    family: Option<String>,
    zero_set_samples: Option<Vec<Vec<Number>>>,
    zero_set_codim: Option<usize>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct RawTask {
    kind: Option<String>,
    point: Option<Vec<Number>>,
    z: Option<Vec<Number>>,
    w: Option<Vec<Number>>,
    trunc_degree: Option<u32>,
    ideal_degree: Option<u32>,
    compare_weights: Option<Vec<Number>>,
    alpha: Option<Number>,
    frames: Option<String>,
    output: Option<String>,
}

#[derive(Clone, Debug)]
pub struct JobConfig {
    pub task: TaskKind,
    pub weights: Option<Vec<Rational>>,
    pub ideal: Option<IdealSpec>,
    pub generator_text: Vec<String>,
    pub point: Option<Vec<Rational>>,
    pub z: Option<Vec<Rational>>,
    pub w: Option<Vec<Rational>>,
    pub trunc_degree: u32,
    pub ideal_degree: u32,
    pub compare_weights: Option<Vec<Rational>>,
    pub alpha: Option<Rational>,
    pub frames: Option<FrameChoice>,
    pub output: OutputFormat,
}

pub const DEFAULT_TRUNC_DEGREE: u32 = 6;
pub const DEFAULT_IDEAL_DEGREE: u32 = 8;

/// Values given on the command line; they take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub task: Option<TaskKind>,
    pub output: Option<OutputFormat>,
    pub trunc_degree: Option<u32>,
    pub ideal_degree: Option<u32>,
    pub point: Option<String>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn number(field: &str, n: &Number) -> Result<Rational, CliError> {
    match n {
        Number::Int(i) => Ok(Rational::from_integer((*i).into())),
        Number::Text(s) => parse_rational(s).map_err(|e| config_err(format!("{field}: {e}"))),
    }
}

fn numbers(field: &str, ns: &[Number]) -> Result<Vec<Rational>, CliError> {
    ns.iter().map(|n| number(field, n)).collect()
}

fn positive_weights(field: &str, ws: Vec<Rational>) -> Result<Vec<Rational>, CliError> {
    if ws.is_empty() {
        return Err(config_err(format!(
            "{field}: at least one weight is required"
        )));
    }
    if let Some(w) = ws.iter().find(|w| !is_positive(w)) {
        return Err(config_err(format!(
            "{field}: weights must be positive, got {}",
            format_rational(w)
        )));
    }
    Ok(ws)
}

pub fn format_point(p: &[Rational]) -> String {
    format!(
        "({})",
        p.iter().map(format_rational).collect::<Vec<_>>().join(", ")
    )
}

fn interior_point(
    field: &str,
    p: Vec<Rational>,
    nvars: Option<usize>,
) -> Result<Vec<Rational>, CliError> {
    if let Some(m) = nvars {
        if p.len() != m {
            return Err(config_err(format!(
                "{field}: expected {m} coordinates, got {}",
                p.len()
            )));
        }
    }
    if !p.iter().all(inside_unit_disc) {
        return Err(config_err(format!(
            "{field}: point {} is not inside the open polydisc",
            format_point(&p)
        )));
    }
    Ok(p)
}

/// Parses `(a, b, ...)`, `a, b` or `a b`.
pub fn parse_point(text: &str) -> Result<Vec<Rational>, CliError> {
    let inner = text.trim().trim_start_matches('(').trim_end_matches(')');
    inner
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| parse_rational(s).map_err(|e| config_err(format!("--point: {e}"))))
        .collect()
}

fn family_matches(tag: &str, ideal: &IdealSpec) -> bool {
    match tag {
        "monomial" => *ideal.family() == Family::Monomial,
        "coordinate-vanishing" => ideal.max_degree() <= 1,
        "catalogued" => matches!(ideal.family(), Family::Catalogued(_)),
        _ => tag == "general",
    }
}

/// Parses the file contents and applies overrides.
pub fn parse_config(text: &str, overrides: &Overrides) -> Result<JobConfig, CliError> {
    let raw: RawConfig =
        toml::from_str(text).map_err(|e| config_err(format!("config parse error: {e}")))?;
    let task_raw = raw.task.unwrap_or_default();

    let file_kind = match &task_raw.kind {
        Some(k) => Some(
            TaskKind::from_name(k)
                .ok_or_else(|| config_err(format!("task.kind: unknown task `{k}`")))?,
        ),
        None => None,
    };
    let task = match (overrides.task, file_kind) {
        (Some(a), Some(b)) if a != b => {
            return Err(config_err(format!(
                "task.kind is `{b}` but the `{a}` subcommand was requested"
            )))
        }
        (Some(a), _) => a,
        (None, Some(b)) => b,
        (None, None) => return Err(config_err("task.kind: no task given")),
    };

    let weights = match raw.module {
        Some(m) => {
            let ws = positive_weights("module.weights", numbers("module.weights", &m.weights)?)?;
            if let Some(d) = m.dimension {
                if d != ws.len() {
                    return Err(config_err(format!(
                        "module.dimension is {d} but {} weights are given",
                        ws.len()
                    )));
                }
            }
            Some(ws)
        }
        None => None,
    };
    let nvars = weights.as_ref().map(Vec::len);

    let (ideal, generator_text) = match raw.ideal {
        Some(spec) => {
            let m = nvars.ok_or_else(|| config_err("ideal: a [module] section is required"))?;
            let gens: Vec<&str> = spec.generators.iter().map(String::as_str).collect();
            let mut ideal = IdealSpec::parse(m, &gens)
                .map_err(|e| config_err(format!("ideal.generators: {e}")))?;
            if let Some(tag) = &spec.family {
                if !["monomial", "coordinate-vanishing", "catalogued", "general"]
                    .contains(&tag.as_str())
                {
                    return Err(config_err(format!("ideal.family: unknown family `{tag}`")));
                }
                if !family_matches(tag, &ideal) {
                    return Err(config_err(format!(
                        "ideal.family: generators are {} but `{tag}` was declared",
                        ideal.family()
                    )));
                }
            }
            if let Some(samples) = &spec.zero_set_samples {
                let codim = spec.zero_set_codim.ok_or_else(|| {
                    config_err("ideal.zero_set_codim is required with zero_set_samples")
                })?;
                let pts = samples
                    .iter()
                    .map(|s| numbers("ideal.zero_set_samples", s))
                    .collect::<Result<Vec<_>, _>>()?;
                ideal = ideal
                    .with_user_zero_set(pts, codim)
                    .map_err(|e| config_err(format!("ideal.zero_set_samples: {e}")))?;
            }
            (Some(ideal), spec.generators.clone())
        }
        None => (None, Vec::new()),
    };

    let point = match &overrides.point {
        Some(text) => Some(interior_point("--point", parse_point(text)?, nvars)?),
        None => match &task_raw.point {
            Some(p) => Some(interior_point(
                "task.point",
                numbers("task.point", p)?,
                nvars,
            )?),
            None => None,
        },
    };
    let z = task_raw
        .z
        .as_ref()
        .map(|p| numbers("task.z", p))
        .transpose()?;
    let z = z.map(|p| interior_point("task.z", p, nvars)).transpose()?;
    let w = task_raw
        .w
        .as_ref()
        .map(|p| numbers("task.w", p))
        .transpose()?;
    let w = w.map(|p| interior_point("task.w", p, nvars)).transpose()?;

    let compare_weights = match &task_raw.compare_weights {
        Some(ws) => {
            let ws =
                positive_weights("task.compare_weights", numbers("task.compare_weights", ws)?)?;
            if nvars.is_some_and(|m| m != ws.len()) {
                return Err(config_err(
                    "task.compare_weights: length differs from module.weights",
                ));
            }
            Some(ws)
        }
        None => None,
    };
    let alpha = task_raw
        .alpha
        .as_ref()
        .map(|a| number("task.alpha", a))
        .transpose()?;
    if let Some(a) = &alpha {
        if !is_positive(a) {
            return Err(config_err("task.alpha: alpha must be positive"));
        }
    }
    let frames = match task_raw.frames.as_deref() {
        None => None,
        Some("decomposition") => Some(FrameChoice::Decomposition),
        Some("zero-set") => Some(FrameChoice::ZeroSet),
        Some(other) => {
            return Err(config_err(format!(
                "task.frames: unknown frame choice `{other}`"
            )))
        }
    };
    let file_output = match task_raw.output.as_deref() {
        None => None,
        Some("text") => Some(OutputFormat::Text),
        Some("json") => Some(OutputFormat::Json),
        Some(other) => return Err(config_err(format!("task.output: unknown format `{other}`"))),
    };
    let trunc_degree = overrides
        .trunc_degree
        .or(task_raw.trunc_degree)
        .unwrap_or(DEFAULT_TRUNC_DEGREE);
    if trunc_degree < 2 {
        return Err(config_err("trunc_degree: must be at least 2"));
    }
    let ideal_degree = overrides
        .ideal_degree
        .or(task_raw.ideal_degree)
        .unwrap_or(DEFAULT_IDEAL_DEGREE);
    if ideal_degree == 0 {
        return Err(config_err("ideal_degree: must be at least 1"));
    }

    Ok(JobConfig {
        task,
        weights,
        ideal,
        generator_text,
        point,
        z,
        w,
        trunc_degree,
        ideal_degree,
        compare_weights,
        alpha,
        frames,
        output: overrides.output.or(file_output).unwrap_or_default(),
    })
}
