//! Points in one or two dimensions.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A point of ℝ¹ or ℝ². One-dimensional points keep `y = 0`, so Euclidean
/// distances are correct in both settings without carrying the dimension.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn on_line(x: f64) -> Self {
        Point { x, y: 0.0 }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn coord(&self, axis: usize) -> f64 {
        if axis == 0 {
            self.x
        } else {
            self.y
        }
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = String;

    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        match v.as_slice() {
            [x] => Ok(Point::on_line(*x)),
            [x, y] => Ok(Point::new(*x, *y)),
            _ => Err(format!("a point needs 1 or 2 coordinates, got {}", v.len())),
        }
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        vec![p.x, p.y]
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}
