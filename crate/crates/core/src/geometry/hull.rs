//! Convex hulls of small point sets in the plane and in space.
//!
//! Both routines first build the hull under exact-sign predicates, so every
//! facet found is a true supporting face of the input, and then merge
//! neighbouring faces lying within `plane_tol` of a common hyperplane. The
//! volume is taken from the unmerged hull.

use std::cmp::Ordering;
use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, scale, sub};
use crate::scalar::Real;

use super::predicates::{cross3, orient2, orient3};

/// A facet as a vertex cycle, counterclockwise seen from outside.
#[derive(Clone, Debug)]
pub struct HullFacet<T> {
    pub vertices: Vec<usize>,
    pub normal: Vec<T>,
    pub offset: T,
}

#[derive(Clone, Debug)]
pub struct Hull<T> {
    /// Indices of input points that are vertices, ascending.
    pub vertices: Vec<usize>,
    pub facets: Vec<HullFacet<T>>,
    pub volume: T,
    /// Counterclockwise boundary cycle in the planar case.
    pub cycle: Option<Vec<usize>>,
}

/// Convex hull of distinct points in `R^2` or `R^3`.
pub fn convex_hull<T: Real>(points: &[Vec<T>], plane_tol: T) -> Result<Hull<T>> {
    match points.first().map(Vec::len) {
        Some(2) => hull2(points, plane_tol),
        Some(3) => hull3(points, plane_tol),
        Some(k) => Err(Error::Dimension {
            k,
            operation: "convex hull",
        }),
        None => Err(Error::Conditioning("empty point set".into())),
    }
}

/// Strictly convex counterclockwise cycle of `pts` (monotone chain).
pub fn planar_cycle<T: Real>(pts: &[[T; 2]]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| {
        pts[a][0]
            .partial_cmp(&pts[b][0])
            .unwrap_or(Ordering::Equal)
            .then(pts[a][1].partial_cmp(&pts[b][1]).unwrap_or(Ordering::Equal))
    });
    order.dedup_by(|a, b| pts[*a] == pts[*b]);
    if order.len() < 3 {
        return order;
    }
    let turn = |o: usize, a: usize, b: usize| orient2(&pts[o], &pts[a], &pts[b]);
    let mut lower: Vec<usize> = Vec::new();
    for &p in &order {
        while lower.len() >= 2
            && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) != Ordering::Greater
        {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &p in order.iter().rev() {
        while upper.len() >= 2
            && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) != Ordering::Greater
        {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn polygon_area<T: Real>(pts: &[[T; 2]], cycle: &[usize]) -> T {
    let m = cycle.len();
    let mut twice = T::zero();
    for i in 0..m {
        let a = pts[cycle[i]];
        let b = pts[cycle[(i + 1) % m]];
        twice = twice + (a[0] * b[1] - a[1] * b[0]);
    }
    twice * T::lit(0.5)
}

/// Drops cycle vertices lying within `tol` of the segment joining their
/// neighbours.
fn drop_flat_vertices<T: Real>(pts: &[[T; 2]], cycle: &mut Vec<usize>, tol: T) {
    loop {
        let m = cycle.len();
        if m <= 3 {
            return;
        }
        let flat = (0..m).find(|&i| {
            let a = pts[cycle[(i + m - 1) % m]];
            let b = pts[cycle[i]];
            let c = pts[cycle[(i + 1) % m]];
            let ac = [c[0] - a[0], c[1] - a[1]];
            let ab = [b[0] - a[0], b[1] - a[1]];
            let len = (ac[0] * ac[0] + ac[1] * ac[1]).sqrt();
            let dist = (ac[0] * ab[1] - ac[1] * ab[0]).abs() / len;
            dist <= tol
        });
        match flat {
            Some(i) => {
                cycle.remove(i);
            }
            None => return,
        }
    }
}

fn hull2<T: Real>(points: &[Vec<T>], plane_tol: T) -> Result<Hull<T>> {
    let pts: Vec<[T; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
    let exact = planar_cycle(&pts);
    if exact.len() < 3 {
        return Err(Error::Conditioning("points do not span the plane".into()));
    }
    let volume = polygon_area(&pts, &exact);
    let mut cycle = exact;
    drop_flat_vertices(&pts, &mut cycle, plane_tol);

    let m = cycle.len();
    let facets = (0..m)
        .map(|i| {
            let a = &points[cycle[i]];
            let b = &points[cycle[(i + 1) % m]];
            let d = sub(b, a);
            let len = norm(&d);
            let normal = vec![d[1] / len, -d[0] / len];
            let offset = dot(&normal, a);
            HullFacet {
                vertices: vec![cycle[i], cycle[(i + 1) % m]],
                normal,
                offset,
            }
        })
        .collect();
    let mut vertices = cycle.clone();
    vertices.sort_unstable();
    Ok(Hull {
        vertices,
        facets,
        volume,
        cycle: Some(cycle),
    })
}

fn collinear3<T: Real>(a: &[T], b: &[T], c: &[T]) -> bool {
    let proj = |i: usize, j: usize| orient2(&[a[i], a[j]], &[b[i], b[j]], &[c[i], c[j]]);
    proj(0, 1) == Ordering::Equal && proj(1, 2) == Ordering::Equal && proj(0, 2) == Ordering::Equal
}

/// In-plane coordinates with respect to an orthonormal pair `(u, w)` such
/// that `u × w` is the unit normal.
fn plane_frame<T: Real>(normal: &[T]) -> ([T; 3], [T; 3]) {
    // pick the axis least aligned with the normal
    let axis = (0..3)
        .min_by(|&i, &j| normal[i].abs().partial_cmp(&normal[j].abs()).unwrap_or(Ordering::Equal))
        .unwrap_or(0);
    let mut e = [T::zero(); 3];
    e[axis] = T::one();
    let u = cross3(normal, &e);
    let ul = norm(&u);
    let u = [u[0] / ul, u[1] / ul, u[2] / ul];
    let w = cross3(normal, &u);
    (u, w)
}

fn facet_cycle<T: Real>(points: &[Vec<T>], members: &[usize], normal: &[T], tol: T) -> Vec<usize> {
    let (u, w) = plane_frame(normal);
    let local: Vec<[T; 2]> = members
        .iter()
        .map(|&i| [dot(&points[i], &u), dot(&points[i], &w)])
        .collect();
    let mut cycle = planar_cycle(&local);
    drop_flat_vertices(&local, &mut cycle, tol);
    cycle.into_iter().map(|c| members[c]).collect()
}

/// Signed volume of the cone from the origin over a planar cycle.
fn cone_volume3<T: Real>(points: &[Vec<T>], cycle: &[usize]) -> T {
    let p0 = &points[cycle[0]];
    let mut v = T::zero();
    for i in 1..cycle.len() - 1 {
        let c = cross3(&points[cycle[i]], &points[cycle[i + 1]]);
        v = v + dot(p0, &c);
    }
    v / T::lit(6.0)
}

fn unit<T: Real>(v: &[T]) -> Vec<T> {
    scale(v, T::one() / norm(v))
}

fn hull3<T: Real>(points: &[Vec<T>], plane_tol: T) -> Result<Hull<T>> {
    let m = points.len();
    let mut exact: Vec<(Vec<usize>, Vec<T>)> = Vec::new();
    let mut seen: Vec<HashSet<usize>> = Vec::new();

    for i in 0..m {
        for j in i + 1..m {
            for l in j + 1..m {
                if seen.iter().any(|s| s.contains(&i) && s.contains(&j) && s.contains(&l)) {
                    continue;
                }
                let (a, b, c) = (&points[i], &points[j], &points[l]);
                if collinear3(a, b, c) {
                    continue;
                }
                let mut side = Ordering::Equal;
                let mut on_plane = vec![i, j, l];
                let mut supporting = true;
                for (q, pq) in points.iter().enumerate() {
                    if q == i || q == j || q == l {
                        continue;
                    }
                    match orient3(a, b, c, pq) {
                        Ordering::Equal => on_plane.push(q),
                        s if side == Ordering::Equal => side = s,
                        s if s != side => {
                            supporting = false;
                            break;
                        }
                        _ => {}
                    }
                }
                if !supporting || side == Ordering::Equal {
                    continue;
                }
                let raw = cross3(&sub(b, a), &sub(c, a));
                let mut normal = unit(&raw);
                if side == Ordering::Greater {
                    normal = normal.iter().map(|&x| -x).collect();
                }
                let cycle = facet_cycle(points, &on_plane, &normal, T::zero());
                seen.push(on_plane.iter().copied().collect());
                exact.push((cycle, normal));
            }
        }
    }
    if exact.len() < 4 {
        return Err(Error::Conditioning("points do not span space".into()));
    }
    let volume = exact
        .iter()
        .map(|(cycle, _)| cone_volume3(points, cycle))
        .sum::<T>();

    // merge neighbouring faces that are coplanar within tolerance
    let f = exact.len();
    let mut parent: Vec<usize> = (0..f).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    let within = |plane: usize, face: usize| {
        let (ref pc, ref pn) = exact[plane];
        let off = dot(pn, &points[pc[0]]);
        exact[face]
            .0
            .iter()
            .all(|&v| (dot(pn, &points[v]) - off).abs() <= plane_tol)
    };
    for a in 0..f {
        for b in a + 1..f {
            let shared = exact[a].0.iter().filter(|v| exact[b].0.contains(v)).count();
            if shared >= 2 && within(a, b) && within(b, a) {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[rb] = ra;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_slot: Vec<Option<usize>> = vec![None; f];
    for a in 0..f {
        let r = find(&mut parent, a);
        match root_slot[r] {
            Some(g) => groups[g].push(a),
            None => {
                root_slot[r] = Some(groups.len());
                groups.push(vec![a]);
            }
        }
    }

    let mut facets = Vec::with_capacity(groups.len());
    for group in groups {
        let mut members: Vec<usize> = group.iter().flat_map(|&g| exact[g].0.clone()).collect();
        members.sort_unstable();
        members.dedup();
        let normal = if group.len() == 1 {
            exact[group[0]].1.clone()
        } else {
            let mut acc = vec![T::zero(); 3];
            for &g in &group {
                let w = cone_volume3(points, &exact[g].0).abs();
                for (s, &x) in acc.iter_mut().zip(&exact[g].1) {
                    *s = *s + w * x;
                }
            }
            unit(&acc)
        };
        let cycle = facet_cycle(points, &members, &normal, plane_tol);
        let offset = cycle.iter().map(|&v| dot(&normal, &points[v])).sum::<T>() / T::count(cycle.len());
        facets.push(HullFacet {
            vertices: cycle,
            normal,
            offset,
        });
    }
    let mut vertices: Vec<usize> = facets.iter().flat_map(|f| f.vertices.clone()).collect();
    vertices.sort_unstable();
    vertices.dedup();
    Ok(Hull {
        vertices,
        facets,
        volume,
        cycle: None,
    })
}

/// Merges points closer than `tol`; returns representatives and, for each
/// input point, the index of its representative.
pub fn dedup_points<T: Real>(points: &[Vec<T>], tol: T) -> (Vec<Vec<T>>, Vec<usize>) {
    let mut reps: Vec<Vec<T>> = Vec::new();
    let mut map = Vec::with_capacity(points.len());
    for p in points {
        match reps.iter().position(|r| norm(&sub(r, p)) <= tol) {
            Some(i) => map.push(i),
            None => {
                map.push(reps.len());
                reps.push(p.clone());
            }
        }
    }
    (reps, map)
}

/// Volume of the convex hull of `points` (any dimension 2 or 3), `0` when the
/// points do not span.
pub fn hull_volume<T: Real>(points: &[Vec<T>], merge_tol: T) -> Result<T> {
    let (reps, _) = dedup_points(points, merge_tol);
    match convex_hull(&reps, T::zero()) {
        Ok(h) => Ok(h.volume),
        Err(Error::Conditioning(_)) => Ok(T::zero()),
        Err(e) => Err(e),
    }
}
