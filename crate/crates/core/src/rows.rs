//! Conversions between `M×2` matrices and row lists, used wherever matrices
//! cross a serialization boundary (row-major `[[x, y], ...]` arrays).

use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::geom::Point;

pub fn to_points(m: &DMatrix<f64>) -> Vec<Point> {
    m.row_iter().map(|r| [r[0], r[1]]).collect()
}

pub fn from_points(points: &[Point]) -> DMatrix<f64> {
    DMatrix::from_fn(points.len(), 2, |i, j| points[i][j])
}

/// `#[serde(with = "crate::rows")]` for `DMatrix<f64>` fields with two columns.
pub fn serialize<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
    to_points(m).serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<f64>, D::Error> {
    let points = Vec::<Point>::deserialize(d)?;
    Ok(from_points(&points))
}
