use std::fmt::Write;

use super::{EmbeddedBand, Vec3};

/// Wavefront OBJ with one vertex per bend end and one face per facet.
pub fn to_obj(e: &EmbeddedBand<f64>) -> String {
    let mut out = String::from("# polygonal band\n");
    for im in e.bend_images() {
        for p in im {
            let _ = writeln!(out, "v {:.12} {:.12} {:.12}", p.x, p.y, p.z);
        }
    }
    let flat = e.flat();
    for i in 0..e.n_triangles() {
        // vertices 2k+1 (left end) and 2k+2 (right end) of bend k
        let (a, b) = (2 * i + 1, 2 * i + 3);
        let face = match flat.side(i) {
            super::Side::Left => [a, b, a + 1],
            super::Side::Right => [a, a + 1, b + 1],
        };
        let _ = writeln!(out, "f {} {} {}", face[0], face[1], face[2]);
    }
    out
}

/// `x,y,z` rows, one per point.
pub fn to_csv(points: &[Vec3<f64>]) -> String {
    let mut out = String::from("x,y,z\n");
    for p in points {
        let _ = writeln!(out, "{:.12},{:.12},{:.12}", p.x, p.y, p.z);
    }
    out
}

/// The curves projected to the `XY`-plane, scaled to fit a square canvas.
pub fn to_svg(curves: &[(&str, &[Vec3<f64>])], size: f64) -> String {
    let pts = curves.iter().flat_map(|(_, c)| c.iter());
    let r = pts.map(|p| p.x.abs().max(p.y.abs())).fold(1e-9, f64::max) * 1.1;
    let scale = size / (2.0 * r);
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n"
    );
    for (color, curve) in curves {
        let path: Vec<String> = curve
            .iter()
            .map(|p| format!("{:.3},{:.3}", (p.x + r) * scale, (r - p.y) * scale))
            .collect();
        let _ = writeln!(out, "<polyline fill=\"none\" stroke=\"{color}\" points=\"{}\"/>", path.join(" "));
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::band::{fold, FlatBand};
    use std::f64::consts::PI;

    #[test]
    fn obj_faces_match_facets() {
        let e = fold(&FlatBand::equilateral(0.1).unwrap(), &[PI, PI, PI]).unwrap();
        let obj = to_obj(&e);
        let verts: Vec<Vec3<f64>> = obj
            .lines()
            .filter_map(|l| l.strip_prefix("v "))
            .map(|l| {
                let c: Vec<f64> = l.split(' ').map(|x| x.parse().unwrap()).collect();
                Vec3::new(c[0], c[1], c[2])
            })
            .collect();
        let faces: Vec<Vec<usize>> =
            obj.lines().filter_map(|l| l.strip_prefix("f ")).map(|l| l.split(' ').map(|x| x.parse().unwrap()).collect()).collect();
        assert_eq!(faces.len(), e.n_triangles());
        for (i, f) in faces.iter().enumerate() {
            for q in e.facet(i) {
                assert!(f.iter().any(|&k| (verts[k - 1] - q).norm() < 1e-9));
            }
        }
    }

    #[test]
    fn csv_and_svg_shapes() {
        let pts = [Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, -1.0, 2.0)];
        assert_eq!(to_csv(&pts).lines().count(), 3);
        let svg = to_svg(&[("black", &pts)], 100.0);
        assert!(svg.starts_with("<svg") && svg.contains("<polyline"));
    }
}
