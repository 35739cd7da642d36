//! Points of `R^k`, configurations, and the half squared Euclidean ground cost.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of `R^k` with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyPoint);
        }
        if let Some((index, &value)) = coords.iter().enumerate().find(|(_, c)| !c.is_finite()) {
            return Err(Error::NonFiniteCoordinate { index, value });
        }
        Ok(Point(coords))
    }

    /// A point of the real line.
    pub fn scalar(x: f64) -> Result<Self> {
        Self::new(vec![x])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// First coordinate; the value itself for one-dimensional points.
    pub fn x(&self) -> f64 {
        self.0[0]
    }

    fn check_dim(&self, other: &Point) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Point::new(v)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

/// `‖x − y‖² / 2`.
pub fn half_sq_dist(x: &Point, y: &Point) -> Result<f64> {
    x.check_dim(y)?;
    Ok(half_sq_dist_unchecked(x, y))
}

#[inline]
pub(crate) fn half_sq_dist_unchecked(x: &Point, y: &Point) -> f64 {
    0.5 * x.0.iter().zip(&y.0).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
}

/// A finite configuration `η = Σ ε_x`, stored as its list of atoms.
///
/// `simple` records whether all atoms are pairwise distinct. Points are
/// compared exactly (numeric `==` on every coordinate).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConfiguration", into = "RawConfiguration")]
pub struct Configuration {
    points: Vec<Point>,
    simple: bool,
}

#[derive(Serialize, Deserialize)]
struct RawConfiguration {
    points: Vec<Point>,
}

impl TryFrom<RawConfiguration> for Configuration {
    type Error = Error;
    fn try_from(raw: RawConfiguration) -> Result<Self> {
        Configuration::new(raw.points)
    }
}

impl From<Configuration> for RawConfiguration {
    fn from(c: Configuration) -> Self {
        RawConfiguration { points: c.points }
    }
}

impl Configuration {
    /// Builds a configuration, checking that all atoms share one dimension.
    /// Duplicates are allowed and reflected in [`Configuration::is_simple`].
    pub fn new(points: Vec<Point>) -> Result<Self> {
        validate_configuration(points, false)
    }

    /// Builds a configuration and rejects duplicate atoms.
    pub fn new_simple(points: Vec<Point>) -> Result<Self> {
        validate_configuration(points, true)
    }

    pub fn empty() -> Self {
        Configuration { points: Vec::new(), simple: true }
    }

    /// One-dimensional configuration from raw values.
    pub fn from_scalars(xs: &[f64]) -> Result<Self> {
        Self::new(xs.iter().map(|&x| Point::scalar(x)).collect::<Result<_>>()?)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_simple(&self) -> bool {
        self.simple
    }

    /// Dimension of the atoms, `None` for the empty configuration.
    pub fn dim(&self) -> Option<usize> {
        self.points.first().map(Point::dim)
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }
}

/// Checks dimensions and, when `require_simple` is set, that no atom repeats.
/// The returned configuration carries the correct `simple` flag.
pub fn validate_configuration(points: Vec<Point>, require_simple: bool) -> Result<Configuration> {
    if let Some(first) = points.first() {
        let k = first.dim();
        for p in &points[1..] {
            if p.dim() != k {
                return Err(Error::DimensionMismatch { expected: k, found: p.dim() });
            }
        }
    }
    let duplicate = find_duplicate(&points);
    if let (true, Some((first, second))) = (require_simple, duplicate) {
        return Err(Error::DuplicateAtom { first, second });
    }
    Ok(Configuration { simple: duplicate.is_none(), points })
}

fn find_duplicate(points: &[Point]) -> Option<(usize, usize)> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    let lex = |a: &Point, b: &Point| {
        a.0.iter()
            .zip(&b.0)
            .map(|(x, y)| x.partial_cmp(y).expect("finite coordinates"))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    };
    order.sort_by(|&i, &j| lex(&points[i], &points[j]).then(i.cmp(&j)));
    order.windows(2).find(|w| points[w[0]] == points[w[1]]).map(|w| (w[0].min(w[1]), w[0].max(w[1])))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    #[test]
    fn half_sq_dist_examples() {
        assert_eq!(half_sq_dist(&p(&[0.0]), &p(&[0.0])).unwrap(), 0.0);
        assert_eq!(half_sq_dist(&p(&[0.0]), &p(&[2.0])).unwrap(), 2.0);
        // 3² + 4² = 25
        assert_eq!(half_sq_dist(&p(&[0.0, 0.0]), &p(&[3.0, 4.0])).unwrap(), 12.5);
    }

    #[test]
    fn half_sq_dist_rejects_dimension_mismatch() {
        let err = half_sq_dist(&p(&[0.0]), &p(&[0.0, 1.0])).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 1, found: 2 });
    }

    #[test]
    fn point_rejects_nan_and_empty() {
        assert!(matches!(Point::new(vec![0.0, f64::NAN]), Err(Error::NonFiniteCoordinate { index: 1, .. })));
        assert!(matches!(Point::new(vec![f64::INFINITY]), Err(Error::NonFiniteCoordinate { .. })));
        assert_eq!(Point::new(vec![]), Err(Error::EmptyPoint));
    }

    #[test]
    fn validate_configuration_examples() {
        let c = Configuration::new_simple(vec![p(&[0.0]), p(&[1.0])]).unwrap();
        assert!(c.is_simple());
        assert_eq!(c.len(), 2);

        let err = Configuration::new_simple(vec![p(&[0.0]), p(&[0.0])]).unwrap_err();
        assert_eq!(err, Error::DuplicateAtom { first: 0, second: 1 });

        let e = Configuration::new_simple(vec![]).unwrap();
        assert!(e.is_empty());
        assert!(e.is_simple());
    }

    #[test]
    fn duplicates_allowed_when_not_required_simple() {
        let c = Configuration::new(vec![p(&[2.0, 1.0]), p(&[0.0, 0.0]), p(&[2.0, 1.0])]).unwrap();
        assert!(!c.is_simple());
    }

    #[test]
    fn mixed_dimensions_rejected() {
        let err = Configuration::new(vec![p(&[0.0]), p(&[0.0, 1.0])]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn json_shape() {
        let c = Configuration::from_scalars(&[0.0, 1.5]).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, r#"{"points":[[0.0],[1.5]]}"#);
        let back: Configuration = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<Configuration>(r#"{"points":[[0.0],[1.0,2.0]]}"#).is_err());
    }
}
