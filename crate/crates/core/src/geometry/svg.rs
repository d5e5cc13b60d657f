//! SVG drawing of a planar polytope `co{±v_i}`.

use std::fmt::Write as _;

use super::{hull, star_belt_rest};
use crate::error::{Error, Result};
use crate::frames::Frame;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, Default)]
pub struct SvgOptions {
    /// Shade the star (and the belt) of `v_i`.
    pub shade_star: Option<usize>,
}

fn pt<T: Real>(v: &[T]) -> String {
    format!("{:.6},{:.6}", v[0].as_f64(), -v[1].as_f64())
}

/// Renders the polygon, its generators and optionally the star of one vertex
/// in the viewBox `[−1.2, 1.2]²`. Output bytes depend only on the input.
pub fn svg<T: Real>(s: &Frame<T>, opts: &SvgOptions) -> Result<String> {
    if s.k() != 2 {
        return Err(Error::Dimension {
            k: s.k(),
            operation: "svg plot",
        });
    }
    let p = hull(s)?;
    let cycle = p.cycle.clone().unwrap_or_default();
    let mut out = String::new();
    out.push_str(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-1.2 -1.2 2.4 2.4\" width=\"480\" height=\"480\">\n",
    );
    out.push_str("<line x1=\"-1.2\" y1=\"0\" x2=\"1.2\" y2=\"0\" stroke=\"#ccc\" stroke-width=\"0.005\"/>\n");
    out.push_str("<line x1=\"0\" y1=\"-1.2\" x2=\"0\" y2=\"1.2\" stroke=\"#ccc\" stroke-width=\"0.005\"/>\n");
    let poly: Vec<String> = cycle.iter().map(|&i| pt(&p.vertices[i])).collect();
    let fill = if opts.shade_star.is_some() { "#f4d35e" } else { "#dbe9f6" };
    let _ = writeln!(
        out,
        "<polygon class=\"hull\" points=\"{}\" fill=\"{fill}\" stroke=\"#1f4e79\" stroke-width=\"0.01\"/>",
        poly.join(" ")
    );

    if let Some(i) = opts.shade_star {
        if i >= s.n() {
            return Err(Error::Range(format!("index {i} out of {}", s.n())));
        }
        let iv = p.vertex_of(i).ok_or(Error::NotAVertex)?;
        // validates the vertex and keeps the decomposition in one place
        star_belt_rest(&p, &p.vertices[iv], s)?;
        let anti = p.antipode(iv);
        for f in &p.facets {
            if f.vertices.contains(&iv) || anti.is_some_and(|a| f.vertices.contains(&a)) {
                let _ = writeln!(
                    out,
                    "<polygon class=\"star\" points=\"0.000000,0.000000 {} {}\" fill=\"#ee964b\" stroke=\"none\"/>",
                    pt(&p.vertices[f.vertices[0]]),
                    pt(&p.vertices[f.vertices[1]])
                );
            }
        }
    }

    for (i, v) in s.vectors().iter().enumerate() {
        for (sign, tag) in [(1.0, "+"), (-1.0, "-")] {
            let w = [v[0] * T::lit(sign), v[1] * T::lit(sign)];
            let _ = writeln!(
                out,
                "<circle class=\"generator\" data-index=\"{i}{tag}\" cx=\"{:.6}\" cy=\"{:.6}\" r=\"0.02\" fill=\"#1f4e79\"/>",
                w[0].as_f64(),
                -w[1].as_f64()
            );
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_svg_is_deterministic() {
        let s = Frame::new(2, vec![vec![1.0f64, 0.0], vec![0.0, 1.0]]).unwrap();
        let a = svg(&s, &SvgOptions { shade_star: Some(0) }).unwrap();
        let b = svg(&s, &SvgOptions { shade_star: Some(0) }).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("viewBox=\"-1.2 -1.2 2.4 2.4\""));
        assert_eq!(a.matches("class=\"star\"").count(), 4);
        assert_eq!(a.matches("<circle").count(), 4);
    }

    #[test]
    fn rejects_space() {
        let s = Frame::new(3, (0..3).map(|i| crate::linalg::unit_vector(3, i)).collect::<Vec<Vec<f64>>>()).unwrap();
        assert!(matches!(svg(&s, &SvgOptions::default()), Err(Error::Dimension { k: 3, .. })));
    }
}
