//! Exact orientation predicates.
//!
//! Coordinates are widened to `f64`, which is exact for both supported
//! scalars, and the determinant signs come from adaptive exact arithmetic.

use std::cmp::Ordering;

use robust::{Coord, Coord3D};

use crate::scalar::Real;

fn sign(x: f64) -> Ordering {
    x.partial_cmp(&0.0).unwrap_or(Ordering::Equal)
}

fn c2<T: Real>(p: &[T]) -> Coord<f64> {
    Coord {
        x: p[0].as_f64(),
        y: p[1].as_f64(),
    }
}

fn c3<T: Real>(p: &[T]) -> Coord3D<f64> {
    Coord3D {
        x: p[0].as_f64(),
        y: p[1].as_f64(),
        z: p[2].as_f64(),
    }
}

/// Sign of the cross product `(b − a) × (c − a)`; `Greater` for a
/// counterclockwise turn.
pub fn orient2<T: Real>(a: &[T], b: &[T], c: &[T]) -> Ordering {
    sign(robust::orient2d(c2(a), c2(b), c2(c)))
}

/// Sign of `det[b − a, c − a, d − a]`; `Greater` when `d` lies on the side
/// of plane `abc` that `(b − a) × (c − a)` points to.
pub fn orient3<T: Real>(a: &[T], b: &[T], c: &[T], d: &[T]) -> Ordering {
    // robust's convention is positive below the plane
    sign(-robust::orient3d(c3(a), c3(b), c3(c), c3(d)))
}

pub fn cross3<T: Real>(a: &[T], b: &[T]) -> [T; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
