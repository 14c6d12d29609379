//! Value parsers for angles, parameter grids and scan modes.

use std::fmt;
use std::str::FromStr;

use ncpmap_core::ScanMode;
use serde::{Serialize, Serializer};

/// An angle in radians, written as a decimal or a sum of `pi` multiples such
/// as `pi/4`, `3pi/4`, `-pi/6` or `pi/4-1e-7`. Serializes as the text given.
#[derive(Clone, Debug, PartialEq)]
pub struct Angle {
    text: String,
    pub value: f64,
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.text)
    }
}

impl FromStr for Angle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let value = parse_angle(&text)?;
        Ok(Angle { text, value })
    }
}

fn parse_angle(text: &str) -> Result<f64, String> {
    if text.is_empty() {
        return Err("empty angle".into());
    }
    let mut total = 0.0;
    for (sign, term) in split_terms(text) {
        total += sign * parse_term(term).map_err(|e| format!("bad angle '{text}': {e}"))?;
    }
    if !total.is_finite() {
        return Err(format!("angle '{text}' is not finite"));
    }
    Ok(total)
}

/// Split at `+`/`-` signs that are not part of an exponent.
fn split_terms(text: &str) -> Vec<(f64, &str)> {
    let bytes = text.as_bytes();
    let mut terms = Vec::new();
    let mut sign = 1.0;
    let mut start = 0;
    for i in 0..bytes.len() {
        let b = bytes[i];
        if b != b'+' && b != b'-' {
            continue;
        }
        let in_exponent = i > 0 && matches!(bytes[i - 1], b'e' | b'E') && i > start + 1;
        if in_exponent {
            continue;
        }
        if i > start {
            terms.push((sign, &text[start..i]));
        } else if i > 0 {
            terms.push((sign, ""));
        }
        sign = if b == b'-' { -1.0 } else { 1.0 };
        start = i + 1;
    }
    terms.push((sign, &text[start..]));
    terms
}

fn parse_term(term: &str) -> Result<f64, String> {
    let lower = term.to_ascii_lowercase();
    let Some(at) = lower.find("pi") else {
        return lower
            .parse::<f64>()
            .map_err(|_| format!("cannot read '{term}' as a number"));
    };
    let coef = lower[..at].trim_end_matches('*');
    let coef = if coef.is_empty() {
        1.0
    } else {
        coef.parse::<f64>()
            .map_err(|_| format!("cannot read coefficient '{coef}'"))?
    };
    let rest = &lower[at + 2..];
    let divisor = match rest.strip_prefix('/') {
        None if rest.is_empty() => 1.0,
        None => return Err(format!("unexpected '{rest}' after pi")),
        Some(d) => d
            .parse::<f64>()
            .map_err(|_| format!("cannot read divisor '{d}'"))?,
    };
    if divisor == 0.0 {
        return Err("division by zero".into());
    }
    Ok(coef * std::f64::consts::PI / divisor)
}

/// Angles for a parameter sweep: `linspace:START:STOP:COUNT` or a comma list.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    text: String,
    pub values: Vec<f64>,
}

impl Serialize for GridSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.text)
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let values = if let Some(rest) = text.strip_prefix("linspace:") {
            let parts: Vec<&str> = rest.split(':').collect();
            let [start, stop, count] = parts[..] else {
                return Err("expected linspace:START:STOP:COUNT".into());
            };
            let start = parse_angle(start)?;
            let stop = parse_angle(stop)?;
            let count: usize = count
                .parse()
                .map_err(|_| format!("bad point count '{count}'"))?;
            match count {
                0 => return Err("linspace needs at least one point".into()),
                1 => vec![start],
                _ => (0..count)
                    .map(|k| start + (stop - start) * k as f64 / (count - 1) as f64)
                    .collect(),
            }
        } else {
            text.split(',')
                .map(parse_angle)
                .collect::<Result<Vec<_>, _>>()?
        };
        Ok(GridSpec { text, values })
    }
}

/// Domain scan mode: `grid:RESOLUTION` or `mc:SAMPLES`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeSpec {
    Grid(usize),
    MonteCarlo(usize),
}

impl ModeSpec {
    pub fn scan_mode(self, seed: u64) -> ScanMode {
        match self {
            ModeSpec::Grid(resolution) => ScanMode::Grid { resolution },
            ModeSpec::MonteCarlo(n) => ScanMode::MonteCarlo { n, seed },
        }
    }
}

impl fmt::Display for ModeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeSpec::Grid(r) => write!(f, "grid:{r}"),
            ModeSpec::MonteCarlo(n) => write!(f, "mc:{n}"),
        }
    }
}

impl Serialize for ModeSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for ModeSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, count) = s
            .split_once(':')
            .ok_or_else(|| format!("expected grid:N or mc:N, got '{s}'"))?;
        let count: usize = count
            .parse()
            .map_err(|_| format!("bad count '{count}' in mode '{s}'"))?;
        match kind {
            "grid" => Ok(ModeSpec::Grid(count)),
            "mc" => Ok(ModeSpec::MonteCarlo(count)),
            _ => Err(format!("unknown mode '{kind}', expected grid or mc")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn angle(s: &str) -> f64 {
        s.parse::<Angle>().unwrap().value
    }

    #[test]
    fn angles() {
        assert_eq!(angle("0.5"), 0.5);
        assert_eq!(angle("pi/4"), PI / 4.0);
        assert_eq!(angle("3pi/4"), 3.0 * PI / 4.0);
        assert_eq!(angle("3*pi/4"), 3.0 * PI / 4.0);
        assert_eq!(angle("-pi/6"), -PI / 6.0);
        assert_eq!(angle("pi"), PI);
        assert_eq!(angle("pi/4-1e-7"), PI / 4.0 - 1e-7);
        assert_eq!(angle("pi/4+1e-7"), PI / 4.0 + 1e-7);
        assert_eq!(angle("1e-3"), 1e-3);
        assert_eq!(angle("-2.5e-1"), -0.25);
        assert_eq!(angle("PI/2"), PI / 2.0);
    }

    #[test]
    fn bad_angles() {
        for s in ["", "pi/0", "pie", "x", "pi/4-", "1/2", "inf"] {
            assert!(s.parse::<Angle>().is_err(), "{s}");
        }
    }

    #[test]
    fn angle_echoes_its_text() {
        let a: Angle = "pi/4".parse().unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), "\"pi/4\"");
    }

    #[test]
    fn grids() {
        let g: GridSpec = "linspace:0:pi/2:3".parse().unwrap();
        assert_eq!(g.values, vec![0.0, PI / 4.0, PI / 2.0]);
        let g: GridSpec = "0.1, pi/4-1e-7".parse().unwrap();
        assert_eq!(g.values, vec![0.1, PI / 4.0 - 1e-7]);
        let g: GridSpec = "linspace:1:2:1".parse().unwrap();
        assert_eq!(g.values, vec![1.0]);
        assert!("linspace:0:1".parse::<GridSpec>().is_err());
        assert!("linspace:0:1:0".parse::<GridSpec>().is_err());
        assert!("0.1,,0.2".parse::<GridSpec>().is_err());
    }

    #[test]
    fn modes() {
        assert_eq!("grid:64".parse::<ModeSpec>(), Ok(ModeSpec::Grid(64)));
        assert_eq!(
            "mc:1000".parse::<ModeSpec>(),
            Ok(ModeSpec::MonteCarlo(1000))
        );
        assert!("grid".parse::<ModeSpec>().is_err());
        assert!("cube:3".parse::<ModeSpec>().is_err());
        assert_eq!(ModeSpec::Grid(64).to_string(), "grid:64");
    }
}
