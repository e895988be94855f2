//! Planar point configurations over exact rationals and the lattice of
//! traces of convex sets on them.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{FiniteLattice, LatticeError};

pub const MAX_POINTS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("too many points: {0} (at most {MAX_POINTS})")]
    TooManyPoints(usize),
    #[error("points {0:?} and {1:?} coincide")]
    DuplicatePoint(String, String),
    #[error("duplicate point label {0:?}")]
    DuplicateLabel(String),
    #[error("bad rational {0:?}")]
    BadRational(String),
    #[error("invalid point configuration JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalPoint {
    pub x: BigRational,
    pub y: BigRational,
}

pub fn parse_rational(s: &str) -> Result<BigRational, GeometryError> {
    let s = s.trim();
    let bad = || GeometryError::BadRational(s.to_string());
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(
            BigInt::from_str(s).map_err(|_| bad())?,
        )),
    }
}

fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl RationalPoint {
    pub fn new(x: BigRational, y: BigRational) -> Self {
        RationalPoint { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        RationalPoint {
            x: BigRational::from_integer(x.into()),
            y: BigRational::from_integer(y.into()),
        }
    }

    pub fn parse(x: &str, y: &str) -> Result<Self, GeometryError> {
        Ok(RationalPoint {
            x: parse_rational(x)?,
            y: parse_rational(y)?,
        })
    }
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", format_rational(&self.x), format_rational(&self.y))
    }
}

/// Sign of the signed area of `(a, b, c)`: `Greater` for a left turn.
pub fn orientation(a: &RationalPoint, b: &RationalPoint, c: &RationalPoint) -> Ordering {
    let cross = (&b.x - &a.x) * (&c.y - &a.y) - (&b.y - &a.y) * (&c.x - &a.x);
    if cross.is_zero() {
        Ordering::Equal
    } else if cross.is_positive() {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

fn lex_cmp(a: &RationalPoint, b: &RationalPoint) -> Ordering {
    a.x.cmp(&b.x).then_with(|| a.y.cmp(&b.y))
}

/// Convex hull vertices in counter-clockwise order, collinear points dropped
/// (monotone chain). One or two vertices for degenerate inputs.
pub fn convex_hull<'a>(points: &[&'a RationalPoint]) -> Vec<&'a RationalPoint> {
    let mut pts: Vec<&RationalPoint> = points.to_vec();
    pts.sort_by(|a, b| lex_cmp(a, b));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<&RationalPoint> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &&RationalPoint>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2
                && orientation(hull[hull.len() - 2], hull[hull.len() - 1], p) != Ordering::Greater
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    if hull.len() == 2 && hull[0] == hull[1] {
        hull.pop();
    }
    hull
}

fn on_segment(a: &RationalPoint, b: &RationalPoint, z: &RationalPoint) -> bool {
    orientation(a, b, z) == Ordering::Equal
        && a.x.clone().min(b.x.clone()) <= z.x
        && z.x <= a.x.clone().max(b.x.clone())
        && a.y.clone().min(b.y.clone()) <= z.y
        && z.y <= a.y.clone().max(b.y.clone())
}

/// Whether `z` lies in the convex hull given by [`convex_hull`].
pub fn hull_contains(hull: &[&RationalPoint], z: &RationalPoint) -> bool {
    match hull {
        [] => false,
        [a] => *a == z,
        [a, b] => on_segment(a, b, z),
        _ => (0..hull.len())
            .all(|i| orientation(hull[i], hull[(i + 1) % hull.len()], z) != Ordering::Less),
    }
}

/// Labelled, pairwise distinct points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointConfiguration {
    labels: Vec<String>,
    points: Vec<RationalPoint>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum JsonRational {
    Int(i64),
    Text(String),
}

impl JsonRational {
    fn value(&self) -> Result<BigRational, GeometryError> {
        match self {
            JsonRational::Int(i) => Ok(BigRational::from_integer((*i).into())),
            JsonRational::Text(s) => parse_rational(s),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct JsonPoint {
    label: String,
    x: JsonRational,
    y: JsonRational,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct JsonConfiguration {
    points: Vec<JsonPoint>,
}

impl PointConfiguration {
    pub fn new(points: Vec<(String, RationalPoint)>) -> Result<Self, GeometryError> {
        for i in 0..points.len() {
            for j in 0..i {
                if points[i].0 == points[j].0 {
                    return Err(GeometryError::DuplicateLabel(points[i].0.clone()));
                }
                if points[i].1 == points[j].1 {
                    return Err(GeometryError::DuplicatePoint(
                        points[j].0.clone(),
                        points[i].0.clone(),
                    ));
                }
            }
        }
        let (labels, points) = points.into_iter().unzip();
        Ok(PointConfiguration { labels, points })
    }

    /// `a = (0,3)`, `b = (-2,0)`, `c = (2,0)`, `u = (-1,1)`, `v = (1,1)`:
    /// the five-point configuration whose convex-trace lattice fails the
    /// quasi-identity [`crate::qid::theta`].
    pub fn paper5() -> Self {
        let pts = [("a", 0, 3), ("b", -2, 0), ("c", 2, 0), ("u", -1, 1), ("v", 1, 1)];
        Self::new(
            pts.iter()
                .map(|&(l, x, y)| (l.to_string(), RationalPoint::from_ints(x, y)))
                .collect(),
        )
        .expect("fixed configuration is valid")
    }

    pub fn from_json_str(text: &str) -> Result<Self, GeometryError> {
        let json: JsonConfiguration =
            serde_json::from_str(text).map_err(|e| GeometryError::Json(e.to_string()))?;
        let points = json
            .points
            .into_iter()
            .map(|p| Ok((p.label, RationalPoint::new(p.x.value()?, p.y.value()?))))
            .collect::<Result<Vec<_>, GeometryError>>()?;
        Self::new(points)
    }

    pub fn to_json_string(&self) -> String {
        let json = JsonConfiguration {
            points: self
                .labels
                .iter()
                .zip(&self.points)
                .map(|(l, p)| JsonPoint {
                    label: l.clone(),
                    x: JsonRational::Text(format_rational(&p.x)),
                    y: JsonRational::Text(format_rational(&p.y)),
                })
                .collect(),
        };
        serde_json::to_string(&json).expect("configuration serializes")
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn points(&self) -> &[RationalPoint] {
        &self.points
    }

    /// Configuration points inside the convex hull of the points in `subset`
    /// (bit `i` = point `i`).
    pub fn hull_trace(&self, subset: u32) -> u32 {
        let chosen: Vec<&RationalPoint> = (0..self.len())
            .filter(|i| subset & (1 << i) != 0)
            .map(|i| &self.points[i])
            .collect();
        let hull = convex_hull(&chosen);
        (0..self.len())
            .filter(|&i| subset & (1 << i) != 0 || hull_contains(&hull, &self.points[i]))
            .fold(0, |acc, i| acc | (1 << i))
    }

    pub fn subset_label(&self, subset: u32) -> String {
        subset_label(&self.labels, subset)
    }
}

pub(crate) fn subset_label(names: &[String], subset: u32) -> String {
    let parts: Vec<&str> = (0..names.len())
        .filter(|i| subset & (1 << i) != 0)
        .map(|i| names[i].as_str())
        .collect();
    format!("{{{}}}", parts.join(","))
}

/// Closed sets of hull-trace, ordered by inclusion. Elements are sorted by
/// bit mask, so the empty set comes first and the full set last; labels are
/// `"{a,b}"` style.
pub fn co_points(config: &PointConfiguration) -> Result<FiniteLattice, GeometryError> {
    if config.len() > MAX_POINTS {
        return Err(GeometryError::TooManyPoints(config.len()));
    }
    let closed: Vec<u32> = (0..1u32 << config.len())
        .filter(|&s| config.hull_trace(s) == s)
        .collect();
    let labels = closed.iter().map(|&s| config.subset_label(s)).collect();
    Ok(FiniteLattice::from_order(labels, |i, j| {
        closed[i] & !closed[j] == 0
    })?)
}
