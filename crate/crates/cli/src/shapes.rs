//! Built-in quadrilaterals addressed by name, e.g. `trapezoid:h=1.5`.
//!
//! | shape                        | quadrilateral                          |
//! |------------------------------|----------------------------------------|
//! | `square`                     | `(1+i, i, 0, 1)`                       |
//! | `rectangle:h=H`              | `(1+iH, iH, 0, 1)`                     |
//! | `trapezoid:h=H`              | `(1+iH, i(H-1), 0, 1)`, `H > 1`        |
//! | `parallelogram:t=T,h=H`      | `(1+He^{iT}, He^{iT}, 0, 1)`           |
//! | `quad:x=X,y=Y`               | `(X+iY, i, 0, 1)`                      |
//! | `circular:theta=T,r=R`       | circular quadrilateral, `--arc-segments` points per arc |

use std::collections::BTreeMap;
use std::path::Path;

use quadmod::geometry::{discretize_circular_quad, parallelogram, quad_from_corners, trapezoid, Point};
use quadmod::PolygonQuad64;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum ShapeSpec {
    Square,
    Rectangle { h: f64 },
    Trapezoid { h: f64 },
    Parallelogram { t: f64, h: f64 },
    GridQuad { x: f64, y: f64 },
    Circular { theta: f64, r: f64 },
}

impl ShapeSpec {
    /// Parses a built-in spec; `None` if `s` does not name a built-in shape.
    pub fn parse(s: &str) -> Option<Result<Self, CliError>> {
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let known = ["square", "rectangle", "trapezoid", "parallelogram", "quad", "circular"];
        if !known.contains(&name) {
            return None;
        }
        Some(parse_args(args).and_then(|kv| {
            let get = |k: &str| {
                kv.get(k).copied().ok_or_else(|| CliError::Input(format!("shape `{name}` needs `{k}=<value>`")))
            };
            let spec = match name {
                "square" => ShapeSpec::Square,
                "rectangle" => ShapeSpec::Rectangle { h: get("h")? },
                "trapezoid" => ShapeSpec::Trapezoid { h: get("h")? },
                "parallelogram" => ShapeSpec::Parallelogram { t: get("t")?, h: get("h")? },
                "quad" => ShapeSpec::GridQuad { x: get("x")?, y: get("y")? },
                _ => ShapeSpec::Circular { theta: get("theta")?, r: get("r")? },
            };
            let allowed: &[&str] = match spec {
                ShapeSpec::Square => &[],
                ShapeSpec::Rectangle { .. } | ShapeSpec::Trapezoid { .. } => &["h"],
                ShapeSpec::Parallelogram { .. } => &["t", "h"],
                ShapeSpec::GridQuad { .. } => &["x", "y"],
                ShapeSpec::Circular { .. } => &["theta", "r"],
            };
            if let Some(k) = kv.keys().find(|k| !allowed.contains(&k.as_str())) {
                return Err(CliError::Input(format!("shape `{name}` has no parameter `{k}`")));
            }
            Ok(spec)
        }))
    }

    pub fn build(&self, arc_segments: usize) -> Result<PolygonQuad64, CliError> {
        let p = Point::new;
        Ok(match *self {
            ShapeSpec::Square => grid_quad(1.0, 1.0)?,
            ShapeSpec::Rectangle { h } => quad_from_corners(p(1.0, h), p(0.0, h), p(0.0, 0.0), p(1.0, 0.0))?,
            ShapeSpec::Trapezoid { h } => trapezoid(h)?,
            ShapeSpec::Parallelogram { t, h } => parallelogram(t, h)?,
            ShapeSpec::GridQuad { x, y } => grid_quad(x, y)?,
            ShapeSpec::Circular { theta, r } => discretize_circular_quad(theta, r, arc_segments)?,
        })
    }
}

/// `(x + iy, i, 0, 1)`.
pub fn grid_quad(x: f64, y: f64) -> Result<PolygonQuad64, CliError> {
    let p = Point::new;
    Ok(quad_from_corners(p(x, y), p(0.0, 1.0), p(0.0, 0.0), p(1.0, 0.0))?)
}

/// Resolves a `modulus` argument: a built-in spec or a polygon file path.
pub fn load_input(input: &str, arc_segments: usize) -> Result<PolygonQuad64, CliError> {
    if let Some(spec) = ShapeSpec::parse(input) {
        return spec?.build(arc_segments);
    }
    let path = Path::new(input);
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read polygon file {}: {e}", path.display())))?;
    Ok(PolygonQuad64::parse_text(&text)?)
}

fn parse_args(args: &str) -> Result<BTreeMap<String, f64>, CliError> {
    let mut kv = BTreeMap::new();
    for part in args.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| CliError::Input(format!("expected key=value, got `{part}`")))?;
        let v: f64 = v.trim().parse().map_err(|_| CliError::Input(format!("`{v}` is not a number")))?;
        if kv.insert(k.trim().to_string(), v).is_some() {
            return Err(CliError::Input(format!("parameter `{k}` given twice")));
        }
    }
    Ok(kv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_builtins() {
        assert_eq!(ShapeSpec::parse("square").unwrap().unwrap(), ShapeSpec::Square);
        assert_eq!(ShapeSpec::parse("trapezoid:h=1.5").unwrap().unwrap(), ShapeSpec::Trapezoid { h: 1.5 });
        assert_eq!(
            ShapeSpec::parse("parallelogram:t=1, h=1.5").unwrap().unwrap(),
            ShapeSpec::Parallelogram { t: 1.0, h: 1.5 }
        );
        assert_eq!(
            ShapeSpec::parse("circular:theta=0.3,r=0.4").unwrap().unwrap(),
            ShapeSpec::Circular { theta: 0.3, r: 0.4 }
        );
        assert!(ShapeSpec::parse("shapes/q.txt").is_none());
    }

    #[test]
    fn rejects_bad_builtins() {
        for bad in ["trapezoid", "trapezoid:h=x", "trapezoid:h=1.5,t=2", "square:h=1", "quad:x=1,x=2,y=1"] {
            assert!(ShapeSpec::parse(bad).unwrap().is_err(), "{bad}");
        }
        assert!(ShapeSpec::parse("trapezoid:h=0.5").unwrap().unwrap().build(64).is_err());
    }

    #[test]
    fn builds_expected_areas() {
        assert_eq!(ShapeSpec::Square.build(4).unwrap().area(), 1.0);
        assert_eq!(ShapeSpec::Rectangle { h: 2.0 }.build(4).unwrap().area(), 2.0);
        assert_eq!(ShapeSpec::Circular { theta: 0.3, r: 0.4 }.build(16).unwrap().vertices().len(), 64);
    }
}
