//! Minimal SVG rendering of log-log convergence charts.
//!
//! No drawing dependencies: charts are assembled as strings with decade grid
//! lines, point markers, and optional dashed fitted lines. Output is fully
//! determined by the input values, so identical runs produce byte-identical
//! artifacts.

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 56.0;

const PALETTE: [&str; 5] = ["#1f6fb2", "#c0392b", "#1e8449", "#8e44ad", "#b7950b"];

/// One curve: positive data points plus an optional log-log fit
/// (`slope`, `intercept`) drawn as a dashed straight line.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub fit: Option<(f64, f64)>,
}

/// A log-log chart with decade gridlines.
#[derive(Debug, Clone)]
pub struct LogLogChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

impl LogLogChart {
    pub fn render_svg(&self) -> String {
        let mut xs: Vec<f64> = Vec::new();
        let mut ys: Vec<f64> = Vec::new();
        for s in &self.series {
            for &(x, y) in &s.points {
                if x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite() {
                    xs.push(x.log10());
                    ys.push(y.log10());
                }
            }
        }
        if xs.is_empty() {
            return String::from("<svg xmlns=\"http://www.w3.org/2000/svg\"/>");
        }
        let pad = 0.08;
        let (x_lo, x_hi) = padded_range(&xs, pad);
        let (y_lo, y_hi) = padded_range(&ys, pad);

        let to_px = |lx: f64, ly: f64| -> (f64, f64) {
            let px = MARGIN_LEFT + (lx - x_lo) / (x_hi - x_lo) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT);
            let py = HEIGHT - MARGIN_BOTTOM
                - (ly - y_lo) / (y_hi - y_lo) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM);
            (px, py)
        };

        let mut out = String::with_capacity(16 * 1024);
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
             font-family=\"Menlo, Consolas, monospace\" font-size=\"12\">\n"
        ));
        out.push_str(&format!(
            "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
        ));
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
            WIDTH / 2.0,
            escape(&self.title)
        ));

        // Decade gridlines and tick labels.
        for d in x_lo.ceil() as i64..=x_hi.floor() as i64 {
            let (px, _) = to_px(d as f64, y_lo);
            out.push_str(&format!(
                "<line x1=\"{px:.1}\" y1=\"{:.1}\" x2=\"{px:.1}\" y2=\"{:.1}\" stroke=\"#dddddd\"/>\n",
                MARGIN_TOP,
                HEIGHT - MARGIN_BOTTOM
            ));
            out.push_str(&format!(
                "<text x=\"{px:.1}\" y=\"{:.1}\" text-anchor=\"middle\">1e{d}</text>\n",
                HEIGHT - MARGIN_BOTTOM + 18.0
            ));
        }
        for d in y_lo.ceil() as i64..=y_hi.floor() as i64 {
            let (_, py) = to_px(x_lo, d as f64);
            out.push_str(&format!(
                "<line x1=\"{:.1}\" y1=\"{py:.1}\" x2=\"{:.1}\" y2=\"{py:.1}\" stroke=\"#dddddd\"/>\n",
                MARGIN_LEFT,
                WIDTH - MARGIN_RIGHT
            ));
            out.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">1e{d}</text>\n",
                MARGIN_LEFT - 6.0,
                py + 4.0
            ));
        }

        // Frame and axis labels.
        out.push_str(&format!(
            "<rect x=\"{MARGIN_LEFT}\" y=\"{MARGIN_TOP}\" width=\"{:.1}\" height=\"{:.1}\" \
             fill=\"none\" stroke=\"#333333\"/>\n",
            WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
            HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
        ));
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>\n",
            (MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0,
            HEIGHT - 12.0,
            escape(&self.x_label)
        ));
        out.push_str(&format!(
            "<text x=\"16\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1})\">{}</text>\n",
            (MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2.0,
            (MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2.0,
            escape(&self.y_label)
        ));

        for (idx, s) in self.series.iter().enumerate() {
            let color = PALETTE[idx % PALETTE.len()];
            if let Some((slope, intercept)) = s.fit {
                // log10 y = (slope ln x + intercept)/ln 10.
                let ly_at = |lx: f64| (slope * lx * std::f64::consts::LN_10 + intercept)
                    / std::f64::consts::LN_10;
                let (x1, y1) = to_px(x_lo, ly_at(x_lo));
                let (x2, y2) = to_px(x_hi, ly_at(x_hi));
                out.push_str(&format!(
                    "<line x1=\"{x1:.1}\" y1=\"{y1:.1}\" x2=\"{x2:.1}\" y2=\"{y2:.1}\" \
                     stroke=\"{color}\" stroke-dasharray=\"6 4\" opacity=\"0.7\"/>\n"
                ));
            }
            let mut path = String::new();
            for (i, &(x, y)) in s.points.iter().filter(|p| p.0 > 0.0 && p.1 > 0.0).enumerate() {
                let (px, py) = to_px(x.log10(), y.log10());
                path.push_str(if i == 0 { "M" } else { "L" });
                path.push_str(&format!("{px:.1} {py:.1} "));
            }
            out.push_str(&format!(
                "<path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
                path.trim_end()
            ));
            for &(x, y) in s.points.iter().filter(|p| p.0 > 0.0 && p.1 > 0.0) {
                let (px, py) = to_px(x.log10(), y.log10());
                out.push_str(&format!(
                    "<circle cx=\"{px:.1}\" cy=\"{py:.1}\" r=\"3\" fill=\"{color}\"/>\n"
                ));
            }
            out.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" fill=\"{color}\">{}</text>\n",
                MARGIN_LEFT + 10.0,
                MARGIN_TOP + 18.0 + 16.0 * idx as f64,
                escape(&s.label)
            ));
        }
        out.push_str("</svg>\n");
        out
    }
}

fn padded_range(values: &[f64], pad: f64) -> (f64, f64) {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = (hi - lo).max(1e-9);
    (lo - pad * span, hi + pad * span)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart() -> LogLogChart {
        LogLogChart {
            title: "weak error vs N".into(),
            x_label: "N".into(),
            y_label: "error".into(),
            series: vec![Series {
                label: "phi3 alpha=0.375".into(),
                points: vec![(16.0, 1e-2), (32.0, 5e-3), (64.0, 2.6e-3)],
                fit: Some((-1.0, 0.1)),
            }],
        }
    }

    #[test]
    fn renders_well_formed_svg() {
        let svg = chart().render_svg();
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("circle"));
        assert!(svg.contains("stroke-dasharray"));
        assert!(svg.contains("weak error vs N"));
    }

    #[test]
    fn rendering_is_byte_deterministic() {
        assert_eq!(chart().render_svg(), chart().render_svg());
    }

    #[test]
    fn empty_data_degrades_gracefully() {
        let chart = LogLogChart {
            title: String::new(),
            x_label: String::new(),
            y_label: String::new(),
            series: vec![],
        };
        assert!(chart.render_svg().contains("<svg"));
    }
}
