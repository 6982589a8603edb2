//! Deterministic CSV and SVG rendering.

/// Shortest round-trip float formatting with a canonical zero.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        "0e0".to_string()
    } else {
        format!("{x:e}")
    }
}

pub fn render_csv(header: &[String], rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| fmt_float(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub struct Series<'a> {
    pub name: &'a str,
    pub points: Vec<(f64, f64)>,
}

/// Minimal static line plot; absolute values on a log y axis, linear or log
/// x axis. Output is byte-deterministic for identical inputs.
pub fn render_svg(
    title: &str,
    x_label: &str,
    y_label: &str,
    log_x: bool,
    series: &[Series],
) -> String {
    const WIDTH: f64 = 860.0;
    const HEIGHT: f64 = 540.0;
    const LEFT: f64 = 90.0;
    const RIGHT: f64 = 30.0;
    const TOP: f64 = 50.0;
    const BOTTOM: f64 = 70.0;
    const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

    let xs: Vec<f64> = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| if log_x { p.0.log10() } else { p.0 }))
        .filter(|v| v.is_finite())
        .collect();
    let ys: Vec<f64> = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1.abs().log10()))
        .filter(|v| v.is_finite())
        .collect();
    let (x_min, x_max) = bounds(&xs);
    let (y_min, y_max) = bounds(&ys);

    let to_px = |x: f64, y: f64| -> (f64, f64) {
        let fx = if x_max > x_min {
            (x - x_min) / (x_max - x_min)
        } else {
            0.5
        };
        let fy = if y_max > y_min {
            (y - y_min) / (y_max - y_min)
        } else {
            0.5
        };
        (
            LEFT + fx * (WIDTH - LEFT - RIGHT),
            HEIGHT - BOTTOM - fy * (HEIGHT - TOP - BOTTOM),
        )
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"28\" font-family=\"sans-serif\" font-size=\"18\" \
         text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        title
    ));
    // frame
    svg.push_str(&format!(
        "<rect x=\"{LEFT:.1}\" y=\"{TOP:.1}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" \
         stroke=\"black\"/>\n",
        WIDTH - LEFT - RIGHT,
        HEIGHT - TOP - BOTTOM
    ));
    // axis labels
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"14\" \
         text-anchor=\"middle\">{}{}</text>\n",
        WIDTH / 2.0,
        HEIGHT - 20.0,
        x_label,
        if log_x { " (log10)" } else { "" }
    ));
    svg.push_str(&format!(
        "<text x=\"24\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"14\" \
         text-anchor=\"middle\" transform=\"rotate(-90 24 {:.1})\">log10 |{}|</text>\n",
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        y_label
    ));
    // tick labels at the corners
    svg.push_str(&format!(
        "<text x=\"{LEFT:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\">{:.3}</text>\n",
        HEIGHT - BOTTOM + 16.0,
        x_min
    ));
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" \
         text-anchor=\"end\">{:.3}</text>\n",
        WIDTH - RIGHT,
        HEIGHT - BOTTOM + 16.0,
        x_max
    ));
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" \
         text-anchor=\"end\">{:.3}</text>\n",
        LEFT - 6.0,
        HEIGHT - BOTTOM,
        y_min
    ));
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" \
         text-anchor=\"end\">{:.3}</text>\n",
        LEFT - 6.0,
        TOP + 10.0,
        y_max
    ));

    for (idx, s) in series.iter().enumerate() {
        let color = COLORS[idx % COLORS.len()];
        let mut path = String::new();
        let mut pen_down = false;
        for &(x, y) in &s.points {
            let lx = if log_x { x.log10() } else { x };
            let ly = y.abs().log10();
            if !lx.is_finite() || !ly.is_finite() {
                pen_down = false;
                continue;
            }
            let (px, py) = to_px(lx, ly);
            if pen_down {
                path.push_str(&format!(" L {px:.2} {py:.2}"));
            } else {
                path.push_str(&format!("M {px:.2} {py:.2}"));
                pen_down = true;
            }
        }
        svg.push_str(&format!(
            "<path d=\"{path}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n"
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" \
             fill=\"{color}\">{}</text>\n",
            LEFT + 12.0,
            TOP + 18.0 + 16.0 * idx as f64,
            s.name
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

fn bounds(values: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        (0.0, 1.0)
    } else {
        (lo, hi)
    }
}
