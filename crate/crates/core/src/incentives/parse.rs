use super::{affine_transform, Mechanism};
use crate::error::{Error, Result};

fn parse_error(text: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        location: format!("mechanism `{text}`"),
        message: message.into(),
    }
}

/// Splits `key=value` pairs and maps the accepted key spellings to canonical
/// names.
fn parse_params(text: &str, body: &str) -> Result<Vec<(&'static str, f64)>> {
    let mut out = Vec::new();
    for part in body.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| parse_error(text, format!("expected key=value, got `{part}`")))?;
        let key = match key.trim() {
            "β" | "beta" => "beta",
            "λ" | "lambda" => "lambda",
            "sL" | "s_L" | "s_low" => "sL",
            "sU" | "s_U" | "s_high" => "sU",
            other => return Err(parse_error(text, format!("unknown parameter `{other}`"))),
        };
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| parse_error(text, format!("`{value}` is not a number")))?;
        out.push((key, value));
    }
    Ok(out)
}

fn expect_keys(text: &str, params: &[(&'static str, f64)], keys: &[&str]) -> Result<Vec<f64>> {
    if params.len() != keys.len() {
        return Err(parse_error(text, format!("expected parameters {}", keys.join(", "))));
    }
    keys.iter()
        .map(|k| {
            params
                .iter()
                .find(|(name, _)| name == k)
                .map(|(_, v)| *v)
                .ok_or_else(|| parse_error(text, format!("missing parameter `{k}`")))
        })
        .collect()
}

/// Index of the last comma at bracket depth zero.
fn last_top_level_comma(s: &str) -> Option<usize> {
    let mut depth = 0i32;
    let mut found = None;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => found = Some(i),
            _ => {}
        }
    }
    found
}

pub(super) fn parse_mechanism(text: &str) -> Result<Mechanism> {
    let t = text.trim();
    if let Some(inner) = t.strip_prefix("xform(") {
        let inner = inner
            .strip_suffix(')')
            .ok_or_else(|| parse_error(text, "missing closing `)`"))?;
        let comma = last_top_level_comma(inner)
            .ok_or_else(|| parse_error(text, "expected xform(<mechanism>,λ=<value>)"))?;
        let base = parse_mechanism(&inner[..comma])?;
        let params = parse_params(text, &inner[comma + 1..])?;
        let lambda = expect_keys(text, &params, &["lambda"])?[0];
        return affine_transform(&base, lambda);
    }
    let (kind, body) = match t.split_once(':') {
        Some((k, b)) => (k, Some(b)),
        None => (t, None),
    };
    match (kind, body) {
        ("none", None) => Ok(Mechanism::None),
        ("mc", None) => Ok(Mechanism::MarginalCost),
        ("toll", Some(b)) => {
            let v = expect_keys(text, &parse_params(text, b)?, &["beta"])?;
            Mechanism::opt_bounded_toll(v[0])
        }
        ("subsidy", Some(b)) => {
            let v = expect_keys(text, &parse_params(text, b)?, &["beta"])?;
            Mechanism::opt_bounded_subsidy(v[0])
        }
        ("smc", Some(b)) => {
            let v = expect_keys(text, &parse_params(text, b)?, &["sL", "sU"])?;
            Mechanism::scaled_marginal_cost(v[0], v[1])
        }
        ("nes", Some(b)) => {
            let v = expect_keys(text, &parse_params(text, b)?, &["sL", "sU"])?;
            Mechanism::nominally_equivalent_subsidy(v[0], v[1])
        }
        _ => Err(parse_error(
            text,
            "expected one of none, mc, toll:β=, subsidy:β=, smc:sL=,sU=, nes:sL=,sU=, xform(...)",
        )),
    }
}
