//! Minimal SVG chart rendering for run output — one polyline chart per
//! (metric, flow) series, no external plotting dependencies.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 360.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 16.0;
const MARGIN_T: f64 = 28.0;
const MARGIN_B: f64 = 40.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f",
];

/// One named series of (x seconds, y value) points.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Render a single chart with one or more series to an SVG string.
pub fn render_chart(title: &str, y_label: &str, series: &[Series]) -> String {
    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">\n"
    );
    let _ = write!(svg, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n");
    let _ = write!(
        svg,
        "<text x=\"{}\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
        WIDTH / 2.0,
        escape(title)
    );

    let (x0, x1, y0, y1) = bounds(series);
    let px = |x: f64| MARGIN_L + (x - x0) / (x1 - x0).max(1e-12) * (WIDTH - MARGIN_L - MARGIN_R);
    let py = |y: f64| HEIGHT - MARGIN_B - (y - y0) / (y1 - y0).max(1e-12) * (HEIGHT - MARGIN_T - MARGIN_B);

    // axes
    let _ = write!(
        svg,
        "<line x1=\"{MARGIN_L}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        HEIGHT - MARGIN_B,
        WIDTH - MARGIN_R,
        HEIGHT - MARGIN_B
    );
    let _ = write!(
        svg,
        "<line x1=\"{MARGIN_L}\" y1=\"{MARGIN_T}\" x2=\"{MARGIN_L}\" y2=\"{}\" stroke=\"black\"/>\n",
        HEIGHT - MARGIN_B
    );
    // ticks: 5 on each axis
    for i in 0..=4 {
        let fx = x0 + (x1 - x0) * i as f64 / 4.0;
        let fy = y0 + (y1 - y0) * i as f64 / 4.0;
        let _ = write!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>\n",
            px(fx),
            HEIGHT - MARGIN_B + 16.0,
            tick(fx)
        );
        let _ = write!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>\n",
            MARGIN_L - 6.0,
            py(fy) + 4.0,
            tick(fy)
        );
    }
    let _ = write!(
        svg,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">time (s)</text>\n",
        (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        HEIGHT - 6.0
    );
    let _ = write!(
        svg,
        "<text x=\"14\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {})\">{}</text>\n",
        (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
        (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
        escape(y_label)
    );

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if !s.points.is_empty() {
            let mut pts = String::new();
            for (x, y) in &s.points {
                let _ = write!(pts, "{:.2},{:.2} ", px(*x), py(*y));
            }
            let _ = write!(
                svg,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
                pts.trim_end()
            );
        }
        // legend entry
        let ly = MARGIN_T + 8.0 + i as f64 * 16.0;
        let _ = write!(
            svg,
            "<line x1=\"{}\" y1=\"{ly:.1}\" x2=\"{}\" y2=\"{ly:.1}\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            WIDTH - MARGIN_R - 150.0,
            WIDTH - MARGIN_R - 126.0
        );
        let _ = write!(
            svg,
            "<text x=\"{}\" y=\"{:.1}\">{}</text>\n",
            WIDTH - MARGIN_R - 120.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    if series.iter().all(|s| s.points.is_empty()) {
        let _ = write!(
            svg,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" fill=\"#888\">no data</text>\n",
            (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
            (MARGIN_T + HEIGHT - MARGIN_B) / 2.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn bounds(series: &[Series]) -> (f64, f64, f64, f64) {
    let mut x0 = f64::INFINITY;
    let mut x1 = f64::NEG_INFINITY;
    let mut y0 = f64::INFINITY;
    let mut y1 = f64::NEG_INFINITY;
    for s in series {
        for (x, y) in &s.points {
            x0 = x0.min(*x);
            x1 = x1.max(*x);
            y0 = y0.min(*y);
            y1 = y1.max(*y);
        }
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    // anchor at zero when everything is positive; reads better for rates
    if y0 > 0.0 {
        y0 = 0.0;
    }
    (x0, x1, y0, y1)
}

fn tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1000.0 {
        format!("{:.0}", v)
    } else if v.abs() >= 1.0 {
        format!("{:.1}", v)
    } else {
        format!("{:.3}", v)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Parse timeseries CSV text (`time_s,flow,metric,value`) into
/// per-(metric, flow) series keyed for charting.
pub fn parse_timeseries(csv: &str) -> Result<BTreeMap<String, Vec<Series>>, String> {
    let mut grouped: BTreeMap<String, BTreeMap<String, Vec<(f64, f64)>>> = BTreeMap::new();
    for (ln, line) in csv.lines().enumerate() {
        if ln == 0 {
            if line.trim() != "time_s,flow,metric,value" {
                return Err(format!("unexpected header: {line}"));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 4 {
            return Err(format!("line {}: expected 4 columns, got {}", ln + 1, cols.len()));
        }
        let t: f64 = cols[0].parse().map_err(|e| format!("line {}: bad time: {e}", ln + 1))?;
        let v: f64 = cols[3].parse().map_err(|e| format!("line {}: bad value: {e}", ln + 1))?;
        grouped
            .entry(cols[2].to_string())
            .or_default()
            .entry(cols[1].to_string())
            .or_default()
            .push((t, v));
    }
    Ok(grouped
        .into_iter()
        .map(|(metric, flows)| {
            (
                metric,
                flows
                    .into_iter()
                    .map(|(label, points)| Series { label, points })
                    .collect(),
            )
        })
        .collect())
}

/// Render one SVG per metric from a timeseries CSV file into `out_dir`.
/// Returns the written file names.
pub fn render_timeseries_charts(csv_path: &Path, out_dir: &Path) -> io::Result<Vec<String>> {
    let text = fs::read_to_string(csv_path)
        .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", csv_path.display())))?;
    let grouped = parse_timeseries(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    for (metric, series) in grouped {
        let (title, y_label) = metric_labels(&metric);
        let svg = render_chart(&title, y_label, &series);
        let name = format!("{metric}.svg");
        fs::write(out_dir.join(&name), svg)?;
        written.push(name);
    }
    Ok(written)
}

fn metric_labels(metric: &str) -> (String, &'static str) {
    match metric {
        "delay_ms" => ("MAC delay".into(), "ms"),
        "jitter_ms" => ("MAC delay jitter".into(), "ms"),
        "throughput_kbps" => ("Throughput".into(), "kbit/s"),
        "goodput_kbps" => ("Goodput".into(), "kbit/s"),
        "rtt_ms" => ("TCP round-trip time".into(), "ms"),
        "drop_deadline" => ("Deadline drops".into(), "count"),
        "drop_retry" => ("Retry-limit drops".into(), "count"),
        "drop_queue" => ("Queue drops".into(), "count"),
        other => (other.to_string(), "value"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_contains_polyline_per_series() {
        let series = vec![
            Series { label: "a".into(), points: vec![(0.0, 1.0), (1.0, 2.0)] },
            Series { label: "b".into(), points: vec![(0.0, 2.0), (1.0, 1.0)] },
        ];
        let svg = render_chart("t", "y", &series);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("</svg>"));
    }

    #[test]
    fn parse_timeseries_groups_by_metric_then_flow() {
        let csv = "time_s,flow,metric,value\n1.000000,cbr1,delay,0.010000\n1.000000,cbr2,delay,0.020000\n1.000000,cbr1,throughput,64000.000000\n";
        let g = parse_timeseries(csv).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g["delay"].len(), 2);
        assert_eq!(g["throughput"][0].label, "cbr1");
    }

    #[test]
    fn parse_rejects_bad_header_and_ragged_rows() {
        assert!(parse_timeseries("nope\n").is_err());
        assert!(parse_timeseries("time_s,flow,metric,value\n1,2,3\n").is_err());
    }

    #[test]
    fn empty_series_still_renders_with_no_data_marker() {
        let svg = render_chart("empty", "y", &[]);
        assert!(svg.contains("</svg>"));
        assert!(svg.contains("no data"));
    }

    #[test]
    fn escapes_markup_in_labels() {
        let svg = render_chart("a<b", "y", &[Series { label: "x&y".into(), points: vec![] }]);
        assert!(svg.contains("a&lt;b"));
        assert!(svg.contains("x&amp;y"));
    }
}
