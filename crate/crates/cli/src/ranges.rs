/// Parses `start:stop:step` into the inclusive list `start, start+step, …`.
///
/// Values are rounded to 12 decimals so that `0:1:0.1` prints as written.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let nums = match parts.as_slice() {
        [single] => return parse_num(single).map(|v| vec![v]),
        [a, b, s] => (parse_num(a)?, parse_num(b)?, parse_num(s)?),
        _ => return Err(format!("grid `{text}`: expected start:stop:step")),
    };
    let (start, stop, step) = nums;
    if !(step > 0.0) {
        return Err(format!("grid `{text}`: step must be positive"));
    }
    if stop < start {
        return Err(format!("grid `{text}`: empty range"));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    if n > 1_000_000 {
        return Err(format!("grid `{text}`: too many points"));
    }
    Ok((0..=n)
        .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

fn parse_num(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !v.is_finite() {
        return Err(format!("`{s}` is not finite"));
    }
    Ok(v)
}
