//! Minimal deterministic SVG line plots: axes, ticks, legend, optional log
//! scale. No external plotting dependency; coordinates are formatted with a
//! fixed precision so identical data yields identical bytes.

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

pub struct PlotOptions {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Plot log10(|y|) instead of y.
    pub y_log10: bool,
    /// Clamp y values into this range before autoscaling (keeps diverging
    /// curves readable).
    pub y_clamp: Option<(f64, f64)>,
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 45.0;
const MARGIN_B: f64 = 55.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn fnum(v: f64) -> String {
    format!("{v:.2}")
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-3..1e4).contains(&a) {
        let s = format!("{v:.3}");
        let s = s.trim_end_matches('0').trim_end_matches('.').to_string();
        if s.is_empty() || s == "-" {
            "0".into()
        } else {
            s
        }
    } else {
        format!("{v:.2e}")
    }
}

/// Render the series into a self-contained SVG document.
pub fn line_plot(series: &[Series], opts: &PlotOptions) -> String {
    let transform = |y: f64| -> f64 {
        let y = match opts.y_clamp {
            Some((lo, hi)) => y.clamp(lo, hi),
            None => y,
        };
        if opts.y_log10 {
            y.abs().max(1e-300).log10()
        } else {
            y
        }
    };
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in &s.points {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            let ty = transform(y);
            ymin = ymin.min(ty);
            ymax = ymax.max(ty);
        }
    }
    if !xmin.is_finite() || xmin == xmax {
        xmin = 0.0;
        xmax = 1.0;
    }
    if !ymin.is_finite() || ymin == ymax {
        ymin -= 1.0;
        ymax += 1.0;
        if !ymin.is_finite() {
            ymin = 0.0;
            ymax = 1.0;
        }
    }
    let pad = 0.04 * (ymax - ymin);
    let (ymin, ymax) = (ymin - pad, ymax + pad);
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let px = |x: f64| MARGIN_L + (x - xmin) / (xmax - xmin) * plot_w;
    let py = |y: f64| MARGIN_T + (1.0 - (y - ymin) / (ymax - ymin)) * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"Helvetica,Arial,sans-serif\" font-size=\"12\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
        MARGIN_L + plot_w / 2.0,
        xml_escape(&opts.title)
    ));
    // gridlines and ticks
    let n_ticks = 6;
    for i in 0..=n_ticks {
        let fx = xmin + (xmax - xmin) * (i as f64) / (n_ticks as f64);
        let x = px(fx);
        svg.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#dddddd\"/>\n",
            fnum(x),
            fnum(MARGIN_T),
            fnum(MARGIN_T + plot_h)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            fnum(x),
            fnum(MARGIN_T + plot_h + 18.0),
            tick_label(fx)
        ));
        let fy = ymin + (ymax - ymin) * (i as f64) / (n_ticks as f64);
        let y = py(fy);
        svg.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{2}\" x2=\"{1}\" y2=\"{2}\" stroke=\"#dddddd\"/>\n",
            fnum(MARGIN_L),
            fnum(MARGIN_L + plot_w),
            fnum(y)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
            fnum(MARGIN_L - 6.0),
            fnum(y + 4.0),
            tick_label(fy)
        ));
    }
    // axes
    svg.push_str(&format!(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        fnum(MARGIN_L),
        fnum(MARGIN_T),
        fnum(plot_w),
        fnum(plot_h)
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
        fnum(MARGIN_L + plot_w / 2.0),
        fnum(HEIGHT - 12.0),
        xml_escape(&opts.x_label)
    ));
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{}</text>\n",
        fnum(MARGIN_T + plot_h / 2.0),
        fnum(MARGIN_T + plot_h / 2.0),
        xml_escape(&if opts.y_log10 { format!("log10 |{}|", opts.y_label) } else { opts.y_label.clone() })
    ));
    // series
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut attr = String::new();
        for &(x, y) in &s.points {
            attr.push_str(&format!("{},{} ", fnum(px(x)), fnum(py(transform(y)))));
        }
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
            attr.trim_end(),
            color
        ));
        // legend
        let ly = MARGIN_T + 16.0 * (i as f64) + 8.0;
        svg.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" stroke-width=\"2\"/>\n",
            fnum(WIDTH - MARGIN_R + 10.0),
            fnum(ly),
            fnum(WIDTH - MARGIN_R + 34.0),
            color
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\">{}</text>\n",
            fnum(WIDTH - MARGIN_R + 40.0),
            fnum(ly + 4.0),
            xml_escape(&s.label)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
