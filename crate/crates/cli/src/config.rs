//! Line-oriented `key = value` problem files.

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use ahyper_core::padic::{is_prime, parse_rational64};
use ahyper_core::PointConfiguration;
use num_rational::Rational64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Text,
    Structured,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(Self::Text),
            "structured" => Ok(Self::Structured),
            other => Err(format!(
                "unknown report format {other:?} (expected text or structured)"
            )),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Text => "text",
            Self::Structured => "structured",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemConfig {
    pub p: u32,
    pub n: usize,
    /// `a_0, a_1, ..., a_N`.
    pub points: Vec<Vec<i64>>,
    /// `D_λ`
    pub degree: u32,
    /// `D_x`
    pub weight: i64,
    /// `K`
    pub precision: Rational64,
    pub allow_p2: bool,
    pub cache_dir: Option<PathBuf>,
    pub report_format: ReportFormat,
}

/// Every problem found in a config file.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("invalid configuration:\n  {}", .0.join("\n  "))]
pub struct ConfigErrors(pub Vec<String>);

fn parse_bool(v: &str) -> Option<bool> {
    match v {
        "true" | "yes" | "1" => Some(true),
        "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

impl ProblemConfig {
    #[cfg(test)]
    pub fn parse(text: &str) -> Result<Self, ConfigErrors> {
        Self::parse_with(text, false)
    }

    /// Parses with `allow-p2` forced on when `allow_p2` is set.
    pub fn parse_with(text: &str, allow_p2: bool) -> Result<Self, ConfigErrors> {
        let force_p2 = allow_p2;
        let mut errors = Vec::new();
        let mut seen = BTreeSet::new();
        let mut p = None;
        let mut n = None;
        let mut points: Vec<(usize, Vec<i64>)> = Vec::new();
        let mut degree = None;
        let mut weight = None;
        let mut precision = None;
        let mut allow_p2 = force_p2;
        let mut cache_dir = None;
        let mut report_format = ReportFormat::default();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                errors.push(format!(
                    "line {line_no}: expected `key = value`, got {line:?}"
                ));
                continue;
            };
            let (key, value) = (key.trim(), value.trim());
            if key != "point" && !seen.insert(key.to_string()) {
                errors.push(format!("line {line_no}: `{key}` given more than once"));
                continue;
            }
            let bad = |what: &str| format!("line {line_no}: {key} must be {what}, got {value:?}");
            match key {
                "p" => match value.parse::<u32>() {
                    Ok(v) => p = Some(v),
                    Err(_) => errors.push(bad("a positive integer")),
                },
                "n" => match value.parse::<usize>() {
                    Ok(v) if v > 0 => n = Some(v),
                    _ => errors.push(bad("a positive integer")),
                },
                "point" => {
                    let row: Result<Vec<i64>, _> =
                        value.split_whitespace().map(str::parse).collect();
                    match row {
                        Ok(r) if !r.is_empty() => points.push((line_no, r)),
                        _ => errors.push(bad("a row of integers")),
                    }
                }
                "degree" => match value.parse::<i64>() {
                    Ok(v) if v > 0 && v <= u32::MAX as i64 => degree = Some(v as u32),
                    Ok(_) => errors.push(format!(
                        "line {line_no}: degree bound must be positive, got {value}"
                    )),
                    Err(_) => errors.push(bad("an integer")),
                },
                "weight" => match value.parse::<i64>() {
                    Ok(v) if v > 0 => weight = Some(v),
                    Ok(_) => errors.push(format!(
                        "line {line_no}: weight bound must be positive, got {value}"
                    )),
                    Err(_) => errors.push(bad("an integer")),
                },
                "precision" => match parse_rational64(value) {
                    Ok(v) if v > Rational64::from_integer(0) => precision = Some(v),
                    Ok(_) => errors.push(format!(
                        "line {line_no}: precision must be positive, got {value}"
                    )),
                    Err(_) => errors.push(bad("a rational num/den")),
                },
                "allow-p2" => match parse_bool(value) {
                    Some(b) => allow_p2 = b || force_p2,
                    None => errors.push(bad("true or false")),
                },
                "cache-dir" => cache_dir = Some(PathBuf::from(value)),
                "report-format" => match value.parse() {
                    Ok(f) => report_format = f,
                    Err(e) => errors.push(format!("line {line_no}: {e}")),
                },
                other => errors.push(format!("line {line_no}: unknown key `{other}`")),
            }
        }

        for (key, missing) in [
            ("p", p.is_none()),
            ("n", n.is_none()),
            ("degree", degree.is_none()),
            ("weight", weight.is_none()),
            ("precision", precision.is_none()),
        ] {
            if missing && !seen.contains(key) {
                errors.push(format!("missing `{key}`"));
            }
        }
        if let Some(p) = p {
            if p == 2 {
                if !allow_p2 {
                    errors.push(
                        "p = 2 is excluded: the contraction estimate needs (p-1)/p > 1/(p-1); \
                         set allow-p2 = true for the experimental mod-p congruence only"
                            .to_string(),
                    );
                }
            } else if p % 2 == 0 {
                errors.push(format!("p = {p} is even"));
            } else if !is_prime(p) {
                errors.push(format!("p = {p} is not prime"));
            }
        }
        if points.len() < 2 && !points.is_empty() {
            errors.push("need a_0 and at least one further point".to_string());
        } else if points.is_empty() {
            errors.push("missing `point` rows".to_string());
        }
        if let Some(n) = n {
            let offending: Vec<String> = points
                .iter()
                .enumerate()
                .filter(|(_, (_, r))| r.len() != n)
                .map(|(i, (line, r))| format!("a_{i} (line {line}) has {} coordinates", r.len()))
                .collect();
            if !offending.is_empty() {
                errors.push(format!(
                    "rows do not match n = {n}: {}",
                    offending.join(", ")
                ));
            }
        }
        for i in 1..points.len() {
            for j in 1..i {
                if points[i].1 == points[j].1 {
                    errors.push(format!(
                        "a_{i} (line {}) repeats a_{j} (line {})",
                        points[i].0, points[j].0
                    ));
                }
            }
        }

        if !errors.is_empty() {
            return Err(ConfigErrors(errors));
        }
        Ok(Self {
            p: p.unwrap(),
            n: n.unwrap(),
            points: points.into_iter().map(|(_, r)| r).collect(),
            degree: degree.unwrap(),
            weight: weight.unwrap(),
            precision: precision.unwrap(),
            allow_p2,
            cache_dir,
            report_format,
        })
    }

    pub fn point_configuration(&self) -> ahyper_core::Result<PointConfiguration> {
        PointConfiguration::new(self.points.clone())
    }

    /// Canonical text: fixed key order, one `point` line per row.
    pub fn to_text(&self) -> String {
        let mut out = format!("p = {}\nn = {}\n", self.p, self.n);
        for row in &self.points {
            let r: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            out.push_str(&format!("point = {}\n", r.join(" ")));
        }
        out.push_str(&format!(
            "degree = {}\nweight = {}\nprecision = {}\nallow-p2 = {}\nreport-format = {}\n",
            self.degree, self.weight, self.precision, self.allow_p2, self.report_format
        ));
        if let Some(dir) = &self.cache_dir {
            out.push_str(&format!("cache-dir = {}\n", dir.display()));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DWORK2: &str = include_str!("../../../fixtures/dwork2.cfg");

    #[test]
    fn fixture_parses() {
        let c = ProblemConfig::parse(DWORK2).unwrap();
        assert_eq!(c.p, 3);
        assert_eq!(c.points, vec![vec![1, 1], vec![2, 0], vec![0, 2]]);
    }

    #[test]
    fn canonical_round_trip() {
        let c = ProblemConfig::parse(DWORK2).unwrap();
        let text = c.to_text();
        let again = ProblemConfig::parse(&text).unwrap();
        assert_eq!(again, c);
        assert_eq!(again.to_text(), text);
    }

    #[test]
    fn p2_needs_flag() {
        let base =
            "n = 1\npoint = 0\npoint = -1\npoint = 1\ndegree = 4\nweight = 2\nprecision = 2\n";
        let err = ProblemConfig::parse(&format!("p = 2\n{base}")).unwrap_err();
        assert!(err.0.iter().any(|e| e.contains("p = 2 is excluded")));
        let ok = ProblemConfig::parse(&format!("p = 2\nallow-p2 = true\n{base}")).unwrap();
        assert!(ok.allow_p2);
    }

    #[test]
    fn violations_are_aggregated() {
        let text =
            "p = 4\nn = 2\npoint = 1 1\npoint = 2 0 0\npoint = 0\npoint = 2 0\npoint = 2 0\n\
                    degree = 0\nweight = -1\nprecision = 3/1\nbogus = 1\n";
        let err = ProblemConfig::parse(text).unwrap_err();
        let all = err.0.join("\n");
        assert!(all.contains("p = 4 is even"), "{all}");
        assert!(all.contains("a_1 (line 4) has 3 coordinates"), "{all}");
        assert!(all.contains("a_2 (line 5) has 1 coordinates"), "{all}");
        assert!(all.contains("a_4 (line 7) repeats a_3"), "{all}");
        assert!(all.contains("degree bound must be positive"), "{all}");
        assert!(all.contains("weight bound must be positive"), "{all}");
        assert!(all.contains("unknown key `bogus`"), "{all}");
    }

    #[test]
    fn missing_keys_reported() {
        let err = ProblemConfig::parse("n = 1\n").unwrap_err();
        for key in ["`p`", "`degree`", "`weight`", "`precision`", "`point`"] {
            assert!(err.0.iter().any(|e| e.contains(key)), "{key}");
        }
    }
}
