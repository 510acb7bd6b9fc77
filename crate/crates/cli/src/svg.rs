//! Hand-emitted SVG plots: polyline charts and grouped bar charts with
//! embedded axis labels. Output is byte-stable unless a stamp is supplied.

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn fmt(v: f64) -> String {
    format!("{v:.3}")
}

fn axis_ticks(min: f64, max: f64) -> Vec<f64> {
    let span = (max - min).max(1e-12);
    (0..=4).map(|i| min + span * i as f64 / 4.0).collect()
}

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        let span = (self.x_max - self.x_min).max(1e-12);
        MARGIN_L + (v - self.x_min) / span * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn y(&self, v: f64) -> f64 {
        let span = (self.y_max - self.y_min).max(1e-12);
        HEIGHT - MARGIN_B - (v - self.y_min) / span * (HEIGHT - MARGIN_T - MARGIN_B)
    }
}

fn header(title: &str, stamp: Option<&str>) -> String {
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"monospace\" font-size=\"12\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
        WIDTH / 2.0,
        escape(title)
    );
    if let Some(stamp) = stamp {
        s.push_str(&format!("<!-- generated {} -->\n", escape(stamp)));
    }
    s
}

fn axes(frame: &Frame, x_label: &str, y_label: &str) -> String {
    let mut s = String::new();
    let x0 = MARGIN_L;
    let x1 = WIDTH - MARGIN_R;
    let y0 = HEIGHT - MARGIN_B;
    let y1 = MARGIN_T;
    s.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n\
         <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>\n"
    ));
    for tick in axis_ticks(frame.x_min, frame.x_max) {
        let px = frame.x(tick);
        s.push_str(&format!(
            "<line x1=\"{px}\" y1=\"{y0}\" x2=\"{px}\" y2=\"{}\" stroke=\"black\"/>\n\
             <text x=\"{px}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            y0 + 4.0,
            y0 + 18.0,
            fmt(tick)
        ));
    }
    for tick in axis_ticks(frame.y_min, frame.y_max) {
        let py = frame.y(tick);
        s.push_str(&format!(
            "<line x1=\"{}\" y1=\"{py}\" x2=\"{x0}\" y2=\"{py}\" stroke=\"black\"/>\n\
             <text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
            x0 - 4.0,
            x0 - 8.0,
            py + 4.0,
            fmt(tick)
        ));
    }
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
        (x0 + x1) / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    ));
    s.push_str(&format!(
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>\n",
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    ));
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Multi-series polyline chart.
pub fn line_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[(String, Vec<(f64, f64)>)],
    stamp: Option<&str>,
) -> String {
    let points: Vec<(f64, f64)> =
        series.iter().flat_map(|(_, pts)| pts.iter().copied()).collect();
    let x_min = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min).min(0.0);
    let x_max = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max).max(1.0);
    let y_min = points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min).min(0.0);
    let y_max = points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max).max(1e-9);
    let frame = Frame { x_min, x_max, y_min, y_max };

    let mut s = header(title, stamp);
    s.push_str(&axes(&frame, x_label, y_label));
    for (idx, (label, pts)) in series.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let path: Vec<String> =
            pts.iter().map(|(x, y)| format!("{},{}", fmt(frame.x(*x)), fmt(frame.y(*y)))).collect();
        s.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            path.join(" ")
        ));
        let ly = MARGIN_T + 14.0 * idx as f64;
        s.push_str(&format!(
            "<line x1=\"{}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"2\"/>\n\
             <text x=\"{}\" y=\"{}\">{}</text>\n",
            WIDTH - 180.0,
            WIDTH - 160.0,
            WIDTH - 154.0,
            ly + 4.0,
            escape(label)
        ));
    }
    s.push_str("</svg>\n");
    s
}

/// Grouped bar chart with optional error whiskers: `(label, value, err)`.
pub fn bar_chart(
    title: &str,
    y_label: &str,
    bars: &[(String, f64, f64)],
    stamp: Option<&str>,
) -> String {
    let y_max = bars
        .iter()
        .map(|(_, v, e)| v + e)
        .fold(f64::NEG_INFINITY, f64::max)
        .max(1e-9);
    let frame = Frame { x_min: 0.0, x_max: bars.len() as f64, y_min: 0.0, y_max };

    let mut s = header(title, stamp);
    s.push_str(&axes(&frame, "", y_label));
    let slot = (WIDTH - MARGIN_L - MARGIN_R) / bars.len().max(1) as f64;
    for (idx, (label, value, err)) in bars.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let cx = MARGIN_L + slot * (idx as f64 + 0.5);
        let bar_w = slot * 0.6;
        let top = frame.y(*value);
        let base = frame.y(0.0);
        s.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{color}\"/>\n",
            fmt(cx - bar_w / 2.0),
            fmt(top),
            fmt(bar_w),
            fmt((base - top).max(0.0))
        ));
        if *err > 0.0 {
            let upper = frame.y(value + err);
            let lower = frame.y((value - err).max(0.0));
            s.push_str(&format!(
                "<line x1=\"{cx}\" y1=\"{}\" x2=\"{cx}\" y2=\"{}\" stroke=\"black\"/>\n",
                fmt(upper),
                fmt(lower)
            ));
        }
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            fmt(cx),
            HEIGHT - MARGIN_B + 18.0,
            escape(label)
        ));
    }
    s.push_str("</svg>\n");
    s
}
