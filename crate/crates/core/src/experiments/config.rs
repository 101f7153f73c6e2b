//! Flat `key = value` experiment configs.
//!
//! ```text
//! # comments start with '#'
//! algorithm = psg
//! Q = [[-2,2,2];[2,2,-2];[2,-2,2]]
//! set = ball(0,1)
//! x0 = [-5,5,-5]
//! gamma0 = 1
//! a0 = 200
//! schedule = psg_constant
//! N = 101
//! ```

use std::collections::HashMap;
use std::path::PathBuf;

use thiserror::Error;

use crate::algorithms::{Algorithm, ScheduleKind};
use crate::sets::SetDescriptor;
use crate::{Matrix, Vector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}", match .line { Some(l) => format!("line {l}: {}", .message), None => .message.clone() })]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self { line: Some(line), message: message.into() }
    }

    fn global(message: impl Into<String>) -> Self {
        Self { line: None, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    Quadratic(Matrix),
    AbsPlusSquare,
    /// `x^4/12 + x^2/2 - y^4/12 - y^2/2` with curvature rule `y^2 + 1`.
    HessianExample,
    NormSquare(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceSpec {
    Point(Vector),
    /// Unit eigenvector of the smallest eigenvalue scaled to the ball radius,
    /// sign matched to the final iterate.
    AutoEigen,
    /// A point whose sign is matched to the final iterate.
    SignMatched(Vector),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub function: FunctionSpec,
    pub set: Option<SetDescriptor>,
    pub x0: Vector,
    pub gamma0: f64,
    pub a0: f64,
    pub a_f: Option<f64>,
    pub schedule: ScheduleKind,
    pub n_iter: usize,
    pub epsilon: Option<f64>,
    pub reference: Option<ReferenceSpec>,
    pub seed: u64,
    pub output: Option<PathBuf>,
}

const KEYS: &[&str] = &[
    "algorithm", "Q", "function", "set", "x0", "gamma0", "a0", "a_f", "schedule", "delta", "a_const",
    "epsilon", "N", "reference", "seed", "output",
];

pub fn parse_number(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// `[1, 2, 3]`.
pub fn parse_vector(s: &str) -> Option<Vector> {
    let inner = s.trim().strip_prefix('[')?.strip_suffix(']')?;
    if inner.trim().is_empty() {
        return None;
    }
    let vals: Option<Vec<f64>> = inner.split(',').map(parse_number).collect();
    vals.map(Vector::from_vec)
}

/// `[[a,b];[c,d]]`, rows separated by `;` (a `,` between rows also works).
pub fn parse_matrix(s: &str) -> Option<Matrix> {
    let inner = s.trim().strip_prefix('[')?.strip_suffix(']')?.trim();
    let mut rows = Vec::new();
    let mut rest = inner;
    while !rest.is_empty() {
        let open = rest.find('[')?;
        if !rest[..open].trim().trim_matches(|c| c == ';' || c == ',').trim().is_empty() {
            return None;
        }
        let close = rest.find(']')?;
        rows.push(parse_vector(&rest[open..=close])?);
        rest = rest[close + 1..].trim();
    }
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != rows[0].len()) {
        return None;
    }
    let m = rows[0].len();
    Some(Matrix::from_fn(n, m, |i, j| rows[i][j]))
}

/// Splits `name(args)` into the name and the top-level comma-separated args.
fn call(s: &str) -> Option<(&str, Vec<&str>)> {
    let s = s.trim();
    let open = s.find('(')?;
    let inner = s[open + 1..].strip_suffix(')')?;
    let mut args = Vec::new();
    let (mut depth, mut start) = (0i32, 0usize);
    for (i, ch) in inner.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                args.push(inner[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    args.push(inner[start..].trim());
    Some((s[..open].trim(), args))
}

#[derive(Debug, Clone, PartialEq)]
enum SetSpec {
    Ball { center: Option<Vector>, scalar_center: f64, radius: f64 },
    Box { lo: Vector, hi: Vector },
    Halfspace { normal: Vector, offset: f64 },
}

fn parse_set(s: &str) -> Result<SetSpec, String> {
    let (name, args) = call(s).ok_or_else(|| format!("cannot parse set `{s}`"))?;
    let num = |a: &str| parse_number(a).ok_or_else(|| format!("bad number `{a}`"));
    let vec = |a: &str| parse_vector(a).ok_or_else(|| format!("bad vector `{a}`"));
    match (name, args.as_slice()) {
        ("ball", [c, r]) => {
            let radius = num(r)?;
            if !(radius > 0.0) {
                return Err("ball radius must be positive".into());
            }
            if c.starts_with('[') {
                Ok(SetSpec::Ball { center: Some(vec(c)?), scalar_center: 0.0, radius })
            } else {
                Ok(SetSpec::Ball { center: None, scalar_center: num(c)?, radius })
            }
        }
        ("box", [lo, hi]) => Ok(SetSpec::Box { lo: vec(lo)?, hi: vec(hi)? }),
        ("halfspace", [n, b]) => Ok(SetSpec::Halfspace { normal: vec(n)?, offset: num(b)? }),
        _ => Err(format!("unknown set `{s}` (expected ball(c,r), box([..],[..]) or halfspace([..],b))")),
    }
}

fn build_set(spec: SetSpec, n: usize) -> Result<SetDescriptor, String> {
    let set = match spec {
        SetSpec::Ball { center, scalar_center, radius } => {
            let center = center.unwrap_or_else(|| Vector::from_element(n, scalar_center));
            SetDescriptor::ball(center, radius)
        }
        SetSpec::Box { lo, hi } => SetDescriptor::boxed(lo, hi),
        SetSpec::Halfspace { normal, offset } => SetDescriptor::halfspace(normal, offset),
    }
    .map_err(|e| e.to_string())?;
    if set.dim() != n {
        return Err(format!("set has dimension {}, x0 has {n}", set.dim()));
    }
    Ok(set)
}

fn parse_function(s: &str) -> Result<FunctionSpec, String> {
    match s.trim() {
        "abs_plus_square" => Ok(FunctionSpec::AbsPlusSquare),
        "hessian_example" => Ok(FunctionSpec::HessianExample),
        other => match call(other) {
            Some(("norm_square", args)) if args.len() == 1 => {
                let g = parse_number(args[0]).filter(|g| *g > 0.0);
                g.map(FunctionSpec::NormSquare).ok_or_else(|| "norm_square needs a positive gamma".into())
            }
            _ => Err(format!(
                "unknown function `{other}` (expected abs_plus_square, hessian_example or norm_square(g))"
            )),
        },
    }
}

impl ExperimentConfig {
    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    /// Parses `text`, collecting every problem instead of stopping at the first.
    pub fn parse(text: &str) -> Result<Self, Vec<ConfigError>> {
        let mut errors = Vec::new();
        let mut entries: HashMap<&str, (usize, &str)> = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                errors.push(ConfigError::at(line, format!("expected `key = value`, got `{content}`")));
                continue;
            };
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                errors.push(ConfigError::at(line, format!("unknown key `{key}`")));
            } else if let Some((first, _)) = entries.get(key) {
                errors.push(ConfigError::at(line, format!("duplicate key `{key}` (first on line {first})")));
            } else {
                entries.insert(key, (line, value));
            }
        }

        let mut required = |key: &str| -> Option<(usize, &str)> {
            let e = entries.get(key).copied();
            if e.is_none() {
                errors.push(ConfigError::global(format!("missing required key `{key}`")));
            }
            e
        };
        let alg = required("algorithm");
        let x0 = required("x0");
        let gamma0 = required("gamma0");
        let a0 = required("a0");
        let schedule = required("schedule");
        let n_iter = required("N");

        let num = |entry: Option<(usize, &str)>, errors: &mut Vec<ConfigError>| -> Option<f64> {
            let (line, v) = entry?;
            let parsed = parse_number(v);
            if parsed.is_none() {
                errors.push(ConfigError::at(line, format!("malformed number `{v}`")));
            }
            parsed
        };

        let algorithm = alg.and_then(|(line, v)| match v {
            "ppa" => Some(Algorithm::Ppa),
            "fb" => Some(Algorithm::Fb),
            "psg" => Some(Algorithm::Psg),
            _ => {
                errors.push(ConfigError::at(line, format!("unknown algorithm `{v}` (ppa, fb or psg)")));
                None
            }
        });
        let x0 = x0.and_then(|(line, v)| {
            let p = parse_vector(v);
            if p.is_none() {
                errors.push(ConfigError::at(line, format!("malformed vector `{v}`")));
            }
            p
        });
        let gamma0 = num(gamma0, &mut errors);
        if let (Some(g), Some((line, _))) = (gamma0, entries.get("gamma0")) {
            if g <= 0.0 {
                errors.push(ConfigError::at(*line, format!("gamma must be positive, got {g}")));
            }
        }
        let a0 = num(a0, &mut errors);
        let a_f = num(entries.get("a_f").copied(), &mut errors);
        let delta = num(entries.get("delta").copied(), &mut errors);
        let a_const = num(entries.get("a_const").copied(), &mut errors);
        let epsilon = num(entries.get("epsilon").copied(), &mut errors);
        if let (Some(e), Some((line, _))) = (epsilon, entries.get("epsilon")) {
            if e <= 0.0 {
                errors.push(ConfigError::at(*line, format!("epsilon must be positive, got {e}")));
            }
        }
        let n_iter = n_iter.and_then(|(line, v)| {
            let p = v.parse::<usize>().ok();
            if p.is_none() {
                errors.push(ConfigError::at(line, format!("N must be a non-negative integer, got `{v}`")));
            }
            p
        });
        let seed = match entries.get("seed") {
            Some((line, v)) => v.parse::<u64>().unwrap_or_else(|_| {
                errors.push(ConfigError::at(*line, format!("seed must be an unsigned integer, got `{v}`")));
                0
            }),
            None => 0,
        };

        let schedule = schedule.and_then(|(line, v)| {
            let need = |name: &str, val: Option<f64>, errors: &mut Vec<ConfigError>| {
                if val.is_none() && !entries.contains_key(name) {
                    errors.push(ConfigError::at(line, format!("schedule `{v}` needs key `{name}`")));
                }
                val
            };
            match v {
                "psg_constant" => Some(ScheduleKind::PsgConstantGamma),
                "ppa_additive" => need("delta", delta, &mut errors).map(|delta| ScheduleKind::PpaAdditive { delta }),
                "psg_adaptive_v1" => {
                    need("a_const", a_const, &mut errors).map(|a_const| ScheduleKind::PsgAdaptiveV1 { a_const })
                }
                "fb_constant" => {
                    need("a_const", a_const, &mut errors).map(|a_const| ScheduleKind::FbConstant { a_const })
                }
                "psg_adaptive_v2" => {
                    need("epsilon", epsilon, &mut errors).map(|epsilon| ScheduleKind::PsgAdaptiveV2 { epsilon })
                }
                _ => {
                    errors.push(ConfigError::at(line, format!("unknown schedule `{v}`")));
                    None
                }
            }
        });

        let function = match (entries.get("Q"), entries.get("function")) {
            (Some(_), Some((line, _))) => {
                errors.push(ConfigError::at(*line, "give either `Q` or `function`, not both"));
                None
            }
            (None, None) => {
                errors.push(ConfigError::global("missing required key `Q` or `function`"));
                None
            }
            (Some((line, v)), None) => match parse_matrix(v) {
                Some(q) if q.nrows() == q.ncols() => Some(FunctionSpec::Quadratic(q)),
                Some(_) => {
                    errors.push(ConfigError::at(*line, "Q must be square"));
                    None
                }
                None => {
                    errors.push(ConfigError::at(*line, format!("malformed matrix `{v}`")));
                    None
                }
            },
            (None, Some((line, v))) => parse_function(v)
                .map_err(|e| errors.push(ConfigError::at(*line, e)))
                .ok(),
        };
        if matches!(function, Some(FunctionSpec::HessianExample)) && epsilon.is_none() && !entries.contains_key("epsilon") {
            errors.push(ConfigError::global("hessian_example needs key `epsilon`"));
        }

        let set_spec = entries.get("set").and_then(|(line, v)| {
            parse_set(v).map_err(|e| errors.push(ConfigError::at(*line, e))).ok().map(|s| (*line, s))
        });
        let reference = entries.get("reference").and_then(|(line, v)| {
            if *v == "auto_eigen" {
                return Some((*line, ReferenceSpec::AutoEigen));
            }
            if let Some(("sign_matched", args)) = call(v) {
                if let [p] = args.as_slice() {
                    if let Some(p) = parse_vector(p) {
                        return Some((*line, ReferenceSpec::SignMatched(p)));
                    }
                }
            }
            match parse_vector(v) {
                Some(p) => Some((*line, ReferenceSpec::Point(p))),
                None => {
                    errors.push(ConfigError::at(*line, format!("malformed reference `{v}`")));
                    None
                }
            }
        });

        // cross-key checks need the dimension from x0
        let mut set = None;
        if let Some(x0) = &x0 {
            let n = x0.len();
            let dim_line = entries.get("x0").map(|e| e.0).unwrap_or(0);
            match &function {
                Some(FunctionSpec::Quadratic(q)) if q.nrows() != n => errors.push(ConfigError::at(
                    entries["Q"].0,
                    format!("Q is {0}x{0} but x0 has dimension {n}", q.nrows()),
                )),
                Some(FunctionSpec::AbsPlusSquare) if n != 1 => {
                    errors.push(ConfigError::at(dim_line, "abs_plus_square is one-dimensional"))
                }
                Some(FunctionSpec::HessianExample) if n != 2 => {
                    errors.push(ConfigError::at(dim_line, "hessian_example is two-dimensional"))
                }
                _ => {}
            }
            if let Some((line, spec)) = set_spec {
                match build_set(spec, n) {
                    Ok(s) => set = Some(s),
                    Err(e) => errors.push(ConfigError::at(line, e)),
                }
            }
            if let Some((line, ReferenceSpec::Point(p) | ReferenceSpec::SignMatched(p))) = &reference {
                if p.len() != n {
                    errors.push(ConfigError::at(*line, format!("reference has dimension {}, x0 has {n}", p.len())));
                }
            }
        }
        if let Some((line, ReferenceSpec::AutoEigen)) = &reference {
            if !matches!(function, Some(FunctionSpec::Quadratic(_))) {
                errors.push(ConfigError::at(*line, "auto_eigen needs a matrix `Q`"));
            }
        }
        match (algorithm, entries.get("set")) {
            (Some(Algorithm::Psg), None) => errors.push(ConfigError::global("psg needs key `set`")),
            (Some(Algorithm::Ppa), Some((line, _))) => {
                errors.push(ConfigError::at(*line, "ppa does not take a `set`"))
            }
            _ => {}
        }

        if !errors.is_empty() {
            errors.sort_by_key(|e| e.line.unwrap_or(0));
            return Err(errors);
        }
        Ok(ExperimentConfig {
            algorithm: algorithm.expect("checked"),
            function: function.expect("checked"),
            set,
            x0: x0.expect("checked"),
            gamma0: gamma0.expect("checked"),
            a0: a0.expect("checked"),
            a_f,
            schedule: schedule.expect("checked"),
            n_iter: n_iter.expect("checked"),
            epsilon,
            reference: reference.map(|r| r.1),
            seed,
            output: entries.get("output").map(|(_, v)| PathBuf::from(v)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CASE_ONE: &str = "algorithm = psg\nQ = [[-2,2,2];[2,2,-2];[2,-2,2]]\nset = ball(0,1)\nx0 = [-5,5,-5]\ngamma0 = 1\na0 = 200\nschedule = psg_constant\nN = 101";

    #[test]
    fn parses_case_one() {
        let c = ExperimentConfig::parse(CASE_ONE).unwrap();
        assert_eq!(c.algorithm, Algorithm::Psg);
        assert_eq!(c.n_iter, 101);
        assert_eq!(c.set, Some(SetDescriptor::unit_ball(3)));
        assert_eq!(c.schedule, ScheduleKind::PsgConstantGamma);
        match c.function {
            FunctionSpec::Quadratic(q) => assert_eq!(q[(1, 2)], -2.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_text_lists_missing_keys() {
        let errs = ExperimentConfig::parse("").unwrap_err();
        assert!(errs.len() >= 7, "{errs:?}");
        assert!(errs.iter().all(|e| e.message.contains("missing")));
    }

    #[test]
    fn negative_gamma_and_unknown_key() {
        let text = CASE_ONE.replace("gamma0 = 1", "gamma0 = -1") + "\ncolour = blue";
        let errs = ExperimentConfig::parse(&text).unwrap_err();
        assert!(errs.iter().any(|e| e.line == Some(5) && e.message.contains("gamma must be positive")));
        assert!(errs.iter().any(|e| e.line == Some(9) && e.message.contains("unknown key")));
    }

    #[test]
    fn dimension_mismatch_reported() {
        let text = CASE_ONE
            .replace("x0 = [-5,5,-5]", "x0 = [1,2]")
            .replace("ball(0,1)", "box([-1,-1,-1],[1,1,1])");
        let errs = ExperimentConfig::parse(&text).unwrap_err();
        assert!(errs.iter().any(|e| e.line == Some(2)), "{errs:?}");
        assert!(errs.iter().any(|e| e.line == Some(3)), "{errs:?}");
    }

    #[test]
    fn comments_sets_and_functions() {
        let text = "# ppa on |x| + x^2\nalgorithm = ppa  # trailing\nfunction = abs_plus_square\nx0=[-10]\ngamma0=1\na0=1\nschedule=ppa_additive\ndelta=0.9\nN=3\nreference=[0]";
        let c = ExperimentConfig::parse(text).unwrap();
        assert_eq!(c.function, FunctionSpec::AbsPlusSquare);
        assert_eq!(c.reference, Some(ReferenceSpec::Point(Vector::zeros(1))));
        assert_eq!(parse_function("norm_square(2)"), Ok(FunctionSpec::NormSquare(2.0)));
        assert!(matches!(parse_set("box([-1,-1],[1,1])"), Ok(SetSpec::Box { .. })));
        assert!(matches!(parse_set("halfspace([1,0],2)"), Ok(SetSpec::Halfspace { .. })));
        assert!(parse_set("ellipse(1)").is_err());
        let m = parse_matrix("[[1,2],[3,4]]").unwrap();
        assert_eq!(m[(1, 0)], 3.0);
    }

    #[test]
    fn schedule_parameters_required() {
        let text = CASE_ONE.replace("psg_constant", "psg_adaptive_v2");
        let errs = ExperimentConfig::parse(&text).unwrap_err();
        assert!(errs.iter().any(|e| e.message.contains("epsilon")));
    }
}
