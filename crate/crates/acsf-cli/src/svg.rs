//! Deterministic SVG rendering of curves and flow traces.
//!
//! One polyline per curve, viewBox fitted with a 5% margin, mathematical
//! y pointing up. All coordinates are written with fixed precision so
//! identical inputs produce byte-identical documents.

use acsf::error::{Error, Result};

pub struct Style {
    pub stroke_width: f64,
    pub size: u32,
}

impl Default for Style {
    fn default() -> Self {
        Style {
            stroke_width: 0.35,
            size: 640,
        }
    }
}

/// Interpolate the color ramp (oldest blue, newest red).
fn ramp(frac: f64) -> String {
    let a = (0x1f as f64, 0x77 as f64, 0xb4 as f64);
    let b = (0xd6 as f64, 0x27 as f64, 0x28 as f64);
    let f = frac.clamp(0.0, 1.0);
    format!(
        "#{:02x}{:02x}{:02x}",
        (a.0 + f * (b.0 - a.0)).round() as u8,
        (a.1 + f * (b.1 - a.1)).round() as u8,
        (a.2 + f * (b.2 - a.2)).round() as u8
    )
}

/// Render polylines (in math coordinates) to a standalone SVG document.
pub fn render(curves: &[Vec<(f64, f64)>], style: &Style) -> Result<String> {
    if curves.iter().all(|c| c.is_empty()) {
        return Err(Error::EmptyGeometry("no curves to render".into()));
    }
    let mut min_x = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    for c in curves {
        for &(x, y) in c {
            min_x = min_x.min(x);
            max_x = max_x.max(x);
            min_y = min_y.min(y);
            max_y = max_y.max(y);
        }
    }
    let span_x = (max_x - min_x).max(1e-12);
    let span_y = (max_y - min_y).max(1e-12);
    let margin_x = 0.05 * span_x;
    let margin_y = 0.05 * span_y;

    // flip y so +y is up: map (x, y) -> (x, -y)
    let vb = (
        min_x - margin_x,
        -(max_y + margin_y),
        span_x + 2.0 * margin_x,
        span_y + 2.0 * margin_y,
    );

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"{:.6} {:.6} {:.6} {:.6}\">\n",
        style.size,
        (style.size as f64 * vb.3 / vb.2).round() as u32,
        vb.0, vb.1, vb.2, vb.3
    ));
    let denom = (curves.len().max(2) - 1) as f64;
    for (k, c) in curves.iter().enumerate() {
        if c.is_empty() {
            continue;
        }
        let color = if curves.len() == 1 {
            "#1f77b4".to_string()
        } else {
            ramp(k as f64 / denom)
        };
        out.push_str(&format!(
            "  <polyline fill=\"none\" stroke=\"{}\" stroke-width=\"{:.6}\" points=\"",
            color,
            style.stroke_width * 0.01 * span_x.max(span_y)
        ));
        for (i, &(x, y)) in c.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(&format!("{x:.6},{:.6}", -y));
        }
        out.push_str("\"/>\n");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Closed polyline of a support curve (first point repeated).
pub fn support_curve_points(c: &acsf::SupportCurve) -> Vec<(f64, f64)> {
    let n = c.n();
    let mut pts: Vec<(f64, f64)> = (0..n).map(|i| c.point(i)).collect();
    if let Some(&first) = pts.first() {
        pts.push(first);
    }
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_is_an_error() {
        let err = render(&[vec![]], &Style::default()).unwrap_err();
        assert_eq!(err.name(), "EmptyGeometry");
    }

    #[test]
    fn circle_has_closed_polyline() {
        let c = acsf::SupportCurve {
            eta: vec![1.0; 512],
        };
        let pts = support_curve_points(&c);
        assert_eq!(pts.len(), 513);
        assert_eq!(pts[0], pts[512]);
        let svg = render(&[pts], &Style::default()).unwrap();
        assert!(svg.contains("viewBox=\"-1.1"));
    }

    #[test]
    fn deterministic_bytes() {
        let c = acsf::SupportCurve {
            eta: (0..128).map(|i| 1.0 + 0.1 * (i as f64).sin()).collect(),
        };
        let a = render(&[support_curve_points(&c)], &Style::default()).unwrap();
        let b = render(&[support_curve_points(&c)], &Style::default()).unwrap();
        assert_eq!(a, b);
    }
}
