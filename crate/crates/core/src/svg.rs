//! Deterministic SVG rendering of the Gross base: the half-plane picture
//! for surfaces (n = 2) and the wall-slice picture for threefolds (n = 3).

use num_traits::ToPrimitive;

use crate::fibration::{FibrationError, GrossBase, PieceKind};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;

fn fnum(x: f64) -> String {
    format!("{x:.4}")
}

/// Render the base. Supported for n in {2, 3}; higher dimensions get an
/// `UnsupportedDimension` error (callers fall back to the JSON report).
pub fn emit_svg(base: &GrossBase) -> Result<Vec<u8>, FibrationError> {
    match base.n {
        2 => Ok(render_halfplane(base)),
        3 => Ok(render_wall_slice(base)),
        n => Err(FibrationError::UnsupportedDimension(n)),
    }
}

struct Frame1D {
    min: f64,
    max: f64,
}

impl Frame1D {
    fn grow(&mut self, x: f64) {
        self.min = self.min.min(x);
        self.max = self.max.max(x);
    }
    fn pad(&mut self, f: f64) {
        let span = (self.max - self.min).max(1.0);
        self.min -= f * span;
        self.max += f * span;
    }
}

/// n = 2: base is a half-plane with horizontal wall coordinate and vertical
/// height; discriminant points sit on the dashed wall line.
fn render_halfplane(base: &GrossBase) -> Vec<u8> {
    let mut fx = Frame1D { min: -1.0, max: 1.0 };
    let mut points: Vec<f64> = Vec::new();
    for p in &base.pieces {
        for v in &p.vertices {
            let x = v[0].to_f64().unwrap();
            points.push(x);
            fx.grow(x);
        }
    }
    fx.pad(0.35);
    let eps = base.eps_abs;
    let mut fh = Frame1D { min: 0.0, max: 2.5 * eps };
    fh.pad(0.1);

    let sx = |x: f64| (x - fx.min) / (fx.max - fx.min) * (WIDTH - 80.0) + 60.0;
    let sy = |h: f64| HEIGHT - 40.0 - (h - fh.min) / (fh.max - fh.min) * (HEIGHT - 80.0);

    let mut s = svg_header();
    // boundary h = 0 and wall h = eps
    s.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\" stroke-width=\"1.5\"/>\n",
        fnum(sx(fx.min)),
        fnum(sy(0.0)),
        fnum(sx(fx.max)),
        fnum(sy(0.0))
    ));
    s.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"gray\" stroke-width=\"1\" stroke-dasharray=\"6,4\"/>\n",
        fnum(sx(fx.min)),
        fnum(sy(eps)),
        fnum(sx(fx.max)),
        fnum(sy(eps))
    ));
    s.push_str(&text(sx(fx.min) + 4.0, sy(eps) - 6.0, "wall h = |eps|"));
    s.push_str(&text(sx(fx.min) + 4.0, sy(eps / 2.0), "B-"));
    s.push_str(&text(sx(fx.min) + 4.0, sy(1.8 * eps), "B+"));
    s.push_str(&text(sx(fx.max) - 80.0, sy(0.0) - 6.0, "boundary h = 0"));
    for x in points {
        s.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"red\"/>\n",
            fnum(sx(x)),
            fnum(sy(eps))
        ));
    }
    s.push_str("</svg>\n");
    s.into_bytes()
}

/// n = 3: the 2-dimensional wall slice with the discriminant graph.
fn render_wall_slice(base: &GrossBase) -> Vec<u8> {
    let mut fx = Frame1D { min: -1.0, max: 1.0 };
    let mut fy = Frame1D { min: -1.0, max: 1.0 };
    for p in &base.pieces {
        for v in &p.vertices {
            fx.grow(v[0].to_f64().unwrap());
            fy.grow(v[1].to_f64().unwrap());
        }
    }
    fx.pad(0.45);
    fy.pad(0.45);
    let sx = |x: f64| (x - fx.min) / (fx.max - fx.min) * (WIDTH - 80.0) + 40.0;
    let sy = |y: f64| HEIGHT - 40.0 - (y - fy.min) / (fy.max - fy.min) * (HEIGHT - 80.0);
    let ray_len = 0.6 * ((fx.max - fx.min) + (fy.max - fy.min));

    let mut s = svg_header();
    s.push_str(&text(
        44.0,
        24.0,
        "discriminant graph in the wall slice (h = |eps|)",
    ));
    for p in &base.pieces {
        let verts: Vec<(f64, f64)> = p
            .vertices
            .iter()
            .map(|v| (v[0].to_f64().unwrap(), v[1].to_f64().unwrap()))
            .collect();
        match p.kind() {
            PieceKind::Segment => {
                s.push_str(&red_line(
                    sx(verts[0].0),
                    sy(verts[0].1),
                    sx(verts[1].0),
                    sy(verts[1].1),
                ));
            }
            PieceKind::Ray | PieceKind::Line => {
                let (bx, by) = verts[0];
                for d in &p.rays {
                    let dx = d[0].to_f64().unwrap();
                    let dy = d[1].to_f64().unwrap();
                    let norm = (dx * dx + dy * dy).sqrt().max(1e-12);
                    let ex = bx + dx / norm * ray_len;
                    let ey = by + dy / norm * ray_len;
                    s.push_str(&red_line(sx(bx), sy(by), sx(ex), sy(ey)));
                }
            }
            _ => {}
        }
        for (vx, vy) in &verts {
            s.push_str(&format!(
                "<circle cx=\"{}\" cy=\"{}\" r=\"3.5\" fill=\"red\"/>\n",
                fnum(sx(*vx)),
                fnum(sy(*vy))
            ));
        }
    }
    s.push_str("</svg>\n");
    s.into_bytes()
}

fn svg_header() -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    )
}

fn red_line(x1: f64, y1: f64, x2: f64, y2: f64) -> String {
    format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"red\" stroke-width=\"2\"/>\n",
        fnum(x1),
        fnum(y1),
        fnum(x2),
        fnum(y2)
    )
}

fn text(x: f64, y: f64, label: &str) -> String {
    format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"13\">{}</text>\n",
        fnum(x),
        fnum(y),
        label
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::{adapted_basis, calabi_yau_vector};
    use crate::fibration::discriminant_graph;
    use crate::samples;

    #[test]
    fn svg_output_is_deterministic_and_well_formed() {
        let poly = samples::kp2_polytope();
        let u = calabi_yau_vector(&poly.fan).unwrap();
        let frame = adapted_basis(&poly.fan, &u).unwrap();
        let base = discriminant_graph(&poly, &frame, 1.0);
        let a = emit_svg(&base).unwrap();
        let b = emit_svg(&base).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("<svg"));
        assert!(text.ends_with("</svg>\n"));
        // 3 bounded edges drawn as segments
        assert_eq!(text.matches("stroke=\"red\"").count(), 3 + 3);
    }

    #[test]
    fn halfplane_picture_for_surfaces() {
        let poly = samples::kp1_polytope();
        let u = calabi_yau_vector(&poly.fan).unwrap();
        let frame = adapted_basis(&poly.fan, &u).unwrap();
        let base = discriminant_graph(&poly, &frame, 1.0);
        let svg = String::from_utf8(emit_svg(&base).unwrap()).unwrap();
        assert_eq!(svg.matches("<circle").count(), 2);
        assert!(svg.contains("B+") && svg.contains("B-"));
    }

    #[test]
    fn dimension_guard() {
        let fan = samples::cm_fan(4);
        let kahler = samples::cm_kahler(4);
        let poly = crate::fan::MomentPolytope::new(fan.clone(), kahler);
        let u = calabi_yau_vector(&fan).unwrap();
        let frame = adapted_basis(&fan, &u).unwrap();
        let base = discriminant_graph(&poly, &frame, 1.0);
        assert!(matches!(
            emit_svg(&base),
            Err(FibrationError::UnsupportedDimension(4))
        ));
    }
}
