//! Model JSON ingestion with path-addressed schema errors.

use serde::Serialize;
use serde_json::{Map, Value};
use spd_core::levy_model::{stable_unit_scale, validate_model, JumpFamily, LevyModel};
use spd_core::SpdError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemaIssue {
    pub path: String,
    pub reason: String,
}

impl SchemaIssue {
    fn new(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Drift {
    Value(f64),
    Centered,
}

struct Issues(Vec<SchemaIssue>);

impl Issues {
    fn push(&mut self, path: &str, reason: impl Into<String>) {
        self.0.push(SchemaIssue::new(path, reason));
    }

    fn number(&mut self, obj: &Map<String, Value>, path: &str, key: &str, required: bool) -> Option<f64> {
        let full = join(path, key);
        match obj.get(key) {
            None if required => {
                self.push(&full, "missing required field");
                None
            }
            None => None,
            Some(v) => match v.as_f64() {
                Some(x) if x.is_finite() => Some(x),
                _ => {
                    self.push(&full, format!("expected a finite number, got {v}"));
                    None
                }
            },
        }
    }

    fn unknown_keys(&mut self, obj: &Map<String, Value>, path: &str, allowed: &[&str]) {
        for k in obj.keys() {
            if !allowed.contains(&k.as_str()) {
                self.push(&join(path, k), "unknown field");
            }
        }
    }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

/// Parses and validates a model description.
pub fn parse_config(text: &str) -> Result<LevyModel, Vec<SchemaIssue>> {
    let root: Value =
        serde_json::from_str(text).map_err(|e| vec![SchemaIssue::new("", format!("invalid JSON: {e}"))])?;
    let Some(obj) = root.as_object() else {
        return Err(vec![SchemaIssue::new("", "expected a JSON object")]);
    };
    let mut issues = Issues(Vec::new());
    issues.unknown_keys(obj, "", &["sigma", "b", "jumps", "x0"]);
    let sigma = issues.number(obj, "", "sigma", true);
    if let Some(s) = sigma {
        if s < 0.0 {
            issues.push("sigma", format!("must be nonnegative, got {s}"));
        }
    }
    let drift = match obj.get("b") {
        None => {
            issues.push("b", "missing required field");
            None
        }
        Some(Value::String(s)) if s == "centered" => Some(Drift::Centered),
        Some(v) => match v.as_f64() {
            Some(x) if x.is_finite() => Some(Drift::Value(x)),
            _ => {
                issues.push("b", format!("expected a finite number or \"centered\", got {v}"));
                None
            }
        },
    };
    let x0 = issues.number(obj, "", "x0", false);
    if let Some(x) = x0 {
        if x < 0.0 {
            issues.push("x0", format!("must be nonnegative, got {x}"));
        }
    }
    let jumps = match obj.get("jumps") {
        None | Some(Value::Null) => None,
        Some(v) => parse_jumps(v, "jumps", &mut issues).map(Some).unwrap_or(None),
    };
    if sigma == Some(0.0) && matches!(obj.get("jumps"), None | Some(Value::Null)) {
        issues.push("jumps", "sigma = 0 and no jumps: there is no process");
    }
    if !issues.0.is_empty() {
        return Err(issues.0);
    }
    let (sigma, drift) = (sigma.unwrap_or(0.0), drift.unwrap_or(Drift::Value(0.0)));
    let built = build_model(sigma, drift, jumps, obj.get("jumps"));
    let mut model = built.map_err(|e| vec![core_issue(e, "")])?;
    if let Some(x) = x0 {
        model = model.with_x0(x);
    }
    let verdict = validate_model(&model);
    if !verdict.is_ok() {
        return Err(verdict.violations.into_iter().map(|e| core_issue(e, "jumps")).collect());
    }
    Ok(model)
}

fn build_model(
    sigma: f64,
    drift: Drift,
    jumps: Option<JumpFamily>,
    raw: Option<&Value>,
) -> Result<LevyModel, SpdError> {
    let Some(j) = jumps else {
        let b = match drift {
            Drift::Value(b) => b,
            Drift::Centered => 0.0,
        };
        return LevyModel::brownian(sigma, b);
    };
    match drift {
        Drift::Value(b) => LevyModel::new(sigma, b, Some(j)),
        Drift::Centered => {
            let unit_stable =
                matches!(j, JumpFamily::Stable { .. }) && sigma == 0.0 && raw.and_then(|v| v.get("scale")).is_none();
            if let (true, JumpFamily::Stable { alpha, .. }) = (unit_stable, &j) {
                return LevyModel::unit_stable(*alpha);
            }
            LevyModel::centered(sigma, j).map_err(|e| match e {
                SpdError::DivergentMoment(m) => SpdError::InvalidParameter {
                    path: "b".into(),
                    reason: format!("\"centered\" needs a finite mean: {m}"),
                },
                e => e,
            })
        }
    }
}

fn core_issue(e: SpdError, default_path: &str) -> SchemaIssue {
    match e {
        SpdError::InvalidParameter { path, reason } => SchemaIssue::new(path, reason),
        e => SchemaIssue::new(default_path, e.to_string()),
    }
}

fn parse_jumps(v: &Value, path: &str, issues: &mut Issues) -> Option<JumpFamily> {
    let Some(obj) = v.as_object() else {
        issues.push(path, "expected an object");
        return None;
    };
    let Some(family) = obj.get("family").and_then(Value::as_str) else {
        issues.push(&join(path, "family"), "missing or non-string family");
        return None;
    };
    let before = issues.0.len();
    let built = match family {
        "stable" => {
            issues.unknown_keys(obj, path, &["family", "alpha", "scale"]);
            let alpha = issues.number(obj, path, "alpha", true);
            let scale = issues.number(obj, path, "scale", false);
            alpha.map(|a| {
                let scale = scale.unwrap_or_else(|| if a > 1.0 && a < 2.0 { stable_unit_scale(a) } else { 1.0 });
                JumpFamily::stable(a, scale)
            })
        }
        "stable_boundary" => {
            issues.unknown_keys(obj, path, &["family", "scale"]);
            let scale = issues.number(obj, path, "scale", false).unwrap_or(1.0);
            Some(JumpFamily::stable_boundary(scale))
        }
        "tempered_stable" => {
            issues.unknown_keys(obj, path, &["family", "alpha", "theta", "scale"]);
            let alpha = issues.number(obj, path, "alpha", true);
            let theta = issues.number(obj, path, "theta", true);
            let scale = issues.number(obj, path, "scale", false).unwrap_or(1.0);
            match (alpha, theta) {
                (Some(a), Some(th)) => Some(JumpFamily::tempered_stable(a, th, scale)),
                _ => None,
            }
        }
        "truncated_stable" => {
            issues.unknown_keys(obj, path, &["family", "alpha", "cutoff", "scale"]);
            let alpha = issues.number(obj, path, "alpha", true);
            let cutoff = issues.number(obj, path, "cutoff", true);
            let scale = issues.number(obj, path, "scale", false).unwrap_or(1.0);
            match (alpha, cutoff) {
                (Some(a), Some(c)) => Some(JumpFamily::truncated_stable(a, c, scale)),
                _ => None,
            }
        }
        "mixture" => {
            issues.unknown_keys(obj, path, &["family", "components"]);
            let cpath = join(path, "components");
            match obj.get("components").and_then(Value::as_array) {
                None => {
                    issues.push(&cpath, "expected an array of jump families");
                    None
                }
                Some(items) => {
                    let parts: Vec<Option<JumpFamily>> = items
                        .iter()
                        .enumerate()
                        .map(|(i, c)| parse_jumps(c, &format!("{cpath}[{i}]"), issues))
                        .collect();
                    parts.into_iter().collect::<Option<Vec<_>>>().map(JumpFamily::mixture)
                }
            }
        }
        other => {
            issues.push(
                &join(path, "family"),
                format!("unknown family \"{other}\" (expected stable, stable_boundary, tempered_stable, truncated_stable or mixture)"),
            );
            None
        }
    };
    if issues.0.len() > before {
        return None;
    }
    match built? {
        Ok(j) => Some(j),
        Err(SpdError::InvalidParameter { path: p, reason }) => {
            let key = p.strip_prefix("jumps.").unwrap_or(&p);
            issues.push(&join(path, key), reason);
            None
        }
        Err(e) => {
            issues.push(path, e.to_string());
            None
        }
    }
}
