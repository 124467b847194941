//! Minimal native SVG emission: learning curves, design grids, and field
//! heatmaps. These plots are diagnostic output, so the goal is legible and
//! deterministic markup with zero plotting dependencies.

use std::fmt::Write as _;

use ndarray::Array2;

use crate::design::Design;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// One named curve of (x, y) points.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

fn fmt2(v: f64) -> String {
    format!("{v:.2}")
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 1000.0 {
        format!("{v:.0}")
    } else if v.abs() >= 1.0 {
        format!("{v:.2}")
    } else {
        format!("{v:.3}")
    }
}

/// Renders line series into a standalone SVG plot with axes, tick labels,
/// and a legend. Returns the SVG document as a string.
pub fn line_plot(series: &[Series], title: &str, x_label: &str, y_label: &str) -> String {
    let (width, height) = (640.0, 420.0);
    let (left, right, top, bottom) = (62.0, 16.0, 34.0, 46.0);
    let (pw, ph) = (width - left - right, height - top - bottom);

    let points = series.iter().flat_map(|s| s.points.iter());
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for &(x, y) in points {
        x_min = x_min.min(x);
        x_max = x_max.max(x);
        y_min = y_min.min(y);
        y_max = y_max.max(y);
    }
    if !x_min.is_finite() {
        (x_min, x_max, y_min, y_max) = (0.0, 1.0, 0.0, 1.0);
    }
    if x_max == x_min {
        x_max = x_min + 1.0;
    }
    if y_max == y_min {
        y_max = y_min + 1.0;
        y_min -= 1.0;
    }
    let sx = |x: f64| left + (x - x_min) / (x_max - x_min) * pw;
    let sy = |y: f64| top + (1.0 - (y - y_min) / (y_max - y_min)) * ph;

    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\" font-family=\"monospace\" font-size=\"12\">\n"
    );
    let _ = writeln!(svg, "<rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>",
        left + pw / 2.0,
        escape(title)
    );

    // Axes with four ticks per side.
    let _ = writeln!(
        svg,
        "<path d=\"M {l} {t} L {l} {b} L {r} {b}\" fill=\"none\" stroke=\"black\"/>",
        l = fmt2(left),
        t = fmt2(top),
        b = fmt2(top + ph),
        r = fmt2(left + pw)
    );
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let xv = x_min + f * (x_max - x_min);
        let yv = y_min + f * (y_max - y_min);
        let _ = writeln!(
            svg,
            "<line x1=\"{x}\" y1=\"{b}\" x2=\"{x}\" y2=\"{b2}\" stroke=\"black\"/>\
             <text x=\"{x}\" y=\"{ty}\" text-anchor=\"middle\">{lab}</text>",
            x = fmt2(sx(xv)),
            b = fmt2(top + ph),
            b2 = fmt2(top + ph + 5.0),
            ty = fmt2(top + ph + 19.0),
            lab = fmt_tick(xv)
        );
        let _ = writeln!(
            svg,
            "<line x1=\"{l}\" y1=\"{y}\" x2=\"{l2}\" y2=\"{y}\" stroke=\"black\"/>\
             <text x=\"{tx}\" y=\"{y2}\" text-anchor=\"end\">{lab}</text>",
            l = fmt2(left),
            l2 = fmt2(left - 5.0),
            y = fmt2(sy(yv)),
            tx = fmt2(left - 8.0),
            y2 = fmt2(sy(yv) + 4.0),
            lab = fmt_tick(yv)
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
        left + pw / 2.0,
        height - 8.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        "<text x=\"14\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {})\">{}</text>",
        top + ph / 2.0,
        top + ph / 2.0,
        escape(y_label)
    );

    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        if !s.points.is_empty() {
            let path: Vec<String> = s
                .points
                .iter()
                .map(|&(x, y)| format!("{},{}", fmt2(sx(x)), fmt2(sy(y))))
                .collect();
            let _ = writeln!(
                svg,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
                path.join(" ")
            );
        }
        // Legend entry, top-right corner of the plot area.
        let ly = top + 14.0 + 16.0 * k as f64;
        let _ = writeln!(
            svg,
            "<line x1=\"{x1}\" y1=\"{ly}\" x2=\"{x2}\" y2=\"{ly}\" stroke=\"{color}\" \
             stroke-width=\"1.5\"/><text x=\"{tx}\" y=\"{ty}\" text-anchor=\"end\">{lab}</text>",
            x1 = fmt2(left + pw - 16.0),
            x2 = fmt2(left + pw - 4.0),
            ly = fmt2(ly),
            tx = fmt2(left + pw - 20.0),
            ty = fmt2(ly + 4.0),
            lab = escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Renders a 2D design as a grid of filled squares (dark = material).
pub fn design_svg(d: &Design) -> String {
    let shape = d.shape();
    let cell = 14.0;
    let (w, h) = (shape.nx as f64 * cell, shape.ny as f64 * cell);
    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\">\n"
    );
    let _ = writeln!(svg, "<rect width=\"{w}\" height=\"{h}\" fill=\"#f4f4f4\"/>");
    for y in 0..shape.ny {
        for x in 0..shape.nx {
            if d.at(x, y, 0) == 1 {
                // Flip y so the design's y axis points up in the image.
                let _ = writeln!(
                    svg,
                    "<rect x=\"{}\" y=\"{}\" width=\"{cell}\" height=\"{cell}\" fill=\"#222\"/>",
                    fmt2(x as f64 * cell),
                    fmt2((shape.ny - 1 - y) as f64 * cell)
                );
            }
        }
    }
    svg.push_str("</svg>\n");
    svg
}

/// Renders a field snapshot as a diverging heatmap (blue = negative,
/// white = zero, red = positive), scaled to the largest magnitude.
pub fn field_svg(field: &Array2<f64>) -> String {
    let (nx, ny) = field.dim();
    let cell = (800.0 / nx as f64).clamp(1.0, 8.0);
    let (w, h) = (nx as f64 * cell, ny as f64 * cell);
    let peak = field.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" \
         viewBox=\"0 0 {w:.0} {h:.0}\">\n"
    );
    for y in 0..ny {
        for x in 0..nx {
            let v = (field[(x, y)] / peak).clamp(-1.0, 1.0);
            let (r, g, b) = if v >= 0.0 {
                (255, (255.0 * (1.0 - v)) as u8, (255.0 * (1.0 - v)) as u8)
            } else {
                ((255.0 * (1.0 + v)) as u8, (255.0 * (1.0 + v)) as u8, 255)
            };
            let _ = writeln!(
                svg,
                "<rect x=\"{}\" y=\"{}\" width=\"{c}\" height=\"{c}\" fill=\"rgb({r},{g},{b})\"/>",
                fmt2(x as f64 * cell),
                fmt2((ny - 1 - y) as f64 * cell),
                c = fmt2(cell)
            );
        }
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::GridShape;

    #[test]
    fn line_plot_contains_each_series_and_axes() {
        let series = vec![
            Series {
                label: "bppo".into(),
                points: vec![(1.0, 0.1), (2.0, 0.4), (3.0, 0.5)],
            },
            Series {
                label: "random".into(),
                points: vec![(1.0, 0.05), (3.0, 0.12)],
            },
        ];
        let svg = line_plot(&series, "learning curves", "step", "best payoff");
        assert!(svg.starts_with("<svg "));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("bppo") && svg.contains("random"));
        assert!(svg.contains("learning curves"));
        assert!(svg.contains("best payoff"));
    }

    #[test]
    fn degenerate_plots_still_render() {
        let svg = line_plot(&[], "empty", "x", "y");
        assert!(svg.contains("</svg>"));
        let flat = vec![Series {
            label: "flat".into(),
            points: vec![(1.0, 0.5), (2.0, 0.5)],
        }];
        let svg = line_plot(&flat, "flat", "x", "y");
        assert_eq!(svg.matches("<polyline").count(), 1);
    }

    #[test]
    fn design_svg_draws_one_square_per_material_voxel() {
        let shape = GridShape::new_2d(3, 2).unwrap();
        let d = Design::new(vec![1, 0, 1, 0, 1, 0], shape).unwrap();
        let svg = design_svg(&d);
        // Background rect + one rect per set bit.
        assert_eq!(svg.matches("<rect").count(), 1 + 3);
    }

    #[test]
    fn field_svg_covers_every_node_and_is_deterministic() {
        let field = Array2::from_shape_fn((4, 3), |(x, y)| x as f64 - y as f64);
        let a = field_svg(&field);
        let b = field_svg(&field);
        assert_eq!(a, b);
        assert_eq!(a.matches("<rect").count(), 12);
    }
}
