//! Cell-center discretization of one-dimensional maps.
//!
//! Each cell is represented by its center; the image cell is the cell containing the
//! image of the center. This is a heuristic front end: nothing here encloses the true
//! dynamics of the continuous map.

use num::{Integer, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::FiniteSystem;
use crate::error::{Error, Result};
use crate::numeric::{format_rational, parse_rational, rat, Rational};

/// A real parameter: exact when rational, otherwise a named irrational.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RealParam {
    Exact(Rational),
    /// `(sqrt(5) - 1) / 2`
    GoldenConjugate,
    Float(f64),
}

impl RealParam {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "golden" | "(sqrt5-1)/2" => Ok(RealParam::GoldenConjugate),
            other => parse_rational(other).map(RealParam::Exact),
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            RealParam::Exact(r) => *r.numer() as f64 / *r.denom() as f64,
            RealParam::GoldenConjugate => (5f64.sqrt() - 1.0) / 2.0,
            RealParam::Float(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<Rational> {
        match self {
            RealParam::Exact(r) => Some(*r),
            _ => None,
        }
    }
}

impl std::fmt::Display for RealParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RealParam::Exact(r) => f.write_str(&format_rational(r)),
            RealParam::GoldenConjugate => f.write_str("golden"),
            RealParam::Float(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MapFamily {
    /// `x -> slope * min(x, 1 - x)`, slope in (0, 2].
    Tent { slope: RealParam },
    /// `x -> x + alpha (mod 1)`.
    Rotation { alpha: RealParam },
    /// Linear interpolation between breakpoints `(x, y)`, x from 0 to 1 increasing, y in [0, 1].
    PiecewiseLinear { breakpoints: Vec<(Rational, Rational)> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Interval,
    Circle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridMapSpec {
    pub family: MapFamily,
    pub cell_count: usize,
    pub geometry: Geometry,
}

impl GridMapSpec {
    pub fn validate(&self) -> Result<()> {
        if self.cell_count < 2 {
            return Err(Error::InvalidGrid(format!("cell_count must be >= 2, got {}", self.cell_count)));
        }
        match &self.family {
            MapFamily::Tent { slope } => {
                let s = slope.value();
                if !(s > 0.0 && s <= 2.0) {
                    return Err(Error::InvalidGrid(format!("tent slope {slope} outside (0, 2]")));
                }
            }
            MapFamily::Rotation { alpha } => {
                if !alpha.value().is_finite() {
                    return Err(Error::InvalidGrid("rotation alpha must be finite".into()));
                }
            }
            MapFamily::PiecewiseLinear { breakpoints } => {
                let ok = breakpoints.len() >= 2
                    && breakpoints[0].0.is_zero()
                    && breakpoints.last().unwrap().0 == rat(1, 1)
                    && breakpoints.windows(2).all(|w| w[0].0 < w[1].0)
                    && breakpoints.iter().all(|(_, y)| *y >= rat(0, 1) && *y <= rat(1, 1));
                if !ok {
                    return Err(Error::InvalidGrid(
                        "breakpoints must run from x=0 to x=1 with increasing x and y in [0,1]".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Image of a rational point, exact when every parameter is rational.
    fn image(&self, x: Rational) -> Image {
        match &self.family {
            MapFamily::Tent { slope } => {
                let m = x.min(rat(1, 1) - x);
                match slope.exact() {
                    Some(s) => Image::Exact(s * m),
                    None => Image::Float(slope.value() * to_f64(m)),
                }
            }
            MapFamily::Rotation { alpha } => match alpha.exact() {
                Some(a) => Image::Exact(x + a),
                None => Image::Float(to_f64(x) + alpha.value()),
            },
            MapFamily::PiecewiseLinear { breakpoints } => {
                let i = breakpoints.windows(2).position(|w| x <= w[1].0).unwrap_or(breakpoints.len() - 2);
                let (x0, y0) = breakpoints[i];
                let (x1, y1) = breakpoints[i + 1];
                Image::Exact(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
            }
        }
    }
}

enum Image {
    Exact(Rational),
    Float(f64),
}

fn to_f64(r: Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Discretizes a 1-D map on `cell_count` cells.
pub fn discretize(spec: &GridMapSpec) -> Result<FiniteSystem> {
    spec.validate()?;
    let n = spec.cell_count;
    let ni = n as i64;
    let wraps = matches!(spec.family, MapFamily::Rotation { .. }) || spec.geometry == Geometry::Circle;
    let cell_of = |img: Image| -> usize {
        let scaled = match img {
            Image::Exact(y) => {
                let y = if wraps { y - y.floor() } else { y };
                (y * rat(ni, 1)).floor().to_integer()
            }
            Image::Float(y) => {
                let y = if wraps { y.rem_euclid(1.0) } else { y };
                (y * n as f64).floor() as i64
            }
        };
        let c = if wraps { scaled.mod_floor(&ni) } else { scaled.clamp(0, ni - 1) };
        c as usize
    };
    let map: Vec<usize> = (0..ni).map(|k| cell_of(spec.image(rat(2 * k + 1, 2 * ni)))).collect();
    let metric: Vec<Vec<Rational>> = (0..ni)
        .map(|j| {
            (0..ni)
                .map(|k| {
                    let gap = (j - k).abs();
                    let gap = match spec.geometry {
                        Geometry::Interval => gap,
                        Geometry::Circle => gap.min(ni - gap),
                    };
                    rat(gap, ni)
                })
                .collect()
        })
        .collect();
    let labels = (0..n).map(|k| format!("c{k}")).collect();
    FiniteSystem::from_trusted_metric(labels, metric, map)
}
