//! Minimal static line plots.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub series: Vec<Series>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

impl Plot {
    pub fn render(&self, comment: &str) -> String {
        let tx = |x: f64| if self.log_x { x.ln() } else { x };
        let finite: Vec<(f64, f64)> = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().map(|&(x, y)| (tx(x), y)))
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .collect();
        let bounds = |f: fn(&(f64, f64)) -> f64| {
            let lo = finite.iter().map(f).fold(f64::INFINITY, f64::min);
            let hi = finite.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
            if !lo.is_finite() {
                (0.0, 1.0)
            } else if hi - lo < 1e-300 {
                (lo - 0.5, hi + 0.5)
            } else {
                (lo, hi)
            }
        };
        let (x0, x1) = bounds(|p| p.0);
        let (y0, y1) = bounds(|p| p.1);
        let px = |x: f64| MARGIN + (tx(x) - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
        let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

        let mut out = String::new();
        writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>").unwrap();
        writeln!(out, "<!-- {} -->", comment.replace("--", "- -")).unwrap();
        writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
        )
        .unwrap();
        writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>").unwrap();
        writeln!(
            out,
            "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
            WIDTH - 2.0 * MARGIN,
            HEIGHT - 2.0 * MARGIN
        )
        .unwrap();
        writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"15\">{}</text>",
            WIDTH / 2.0,
            MARGIN / 2.0,
            escape(&self.title)
        )
        .unwrap();
        let x_caption = if self.log_x {
            format!("{} (log)", self.x_label)
        } else {
            self.x_label.clone()
        };
        writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\">{}</text>",
            WIDTH / 2.0,
            HEIGHT - 14.0,
            escape(&x_caption)
        )
        .unwrap();
        writeln!(
            out,
            "<text x=\"14\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 {})\">{}</text>",
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(&self.y_label)
        )
        .unwrap();
        let x_ends = if self.log_x {
            (x0.exp(), x1.exp())
        } else {
            (x0, x1)
        };
        for (x, anchor, v) in [
            (MARGIN, "start", x_ends.0),
            (WIDTH - MARGIN, "end", x_ends.1),
        ] {
            writeln!(
                out,
                "<text x=\"{x}\" y=\"{}\" text-anchor=\"{anchor}\" font-size=\"11\">{v:.4}</text>",
                HEIGHT - MARGIN + 14.0
            )
            .unwrap();
        }
        for (y, v) in [(HEIGHT - MARGIN, y0), (MARGIN + 10.0, y1)] {
            writeln!(
                out,
                "<text x=\"{}\" y=\"{y}\" text-anchor=\"end\" font-size=\"11\">{v:.4}</text>",
                MARGIN - 4.0
            )
            .unwrap();
        }
        for (i, s) in self.series.iter().enumerate() {
            let colour = PALETTE[i % PALETTE.len()];
            let pts: Vec<String> = s
                .points
                .iter()
                .filter(|(x, y)| tx(*x).is_finite() && y.is_finite())
                .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            writeln!(
                out,
                "<polyline fill=\"none\" stroke=\"{colour}\" stroke-width=\"1.5\" points=\"{}\"/>",
                pts.join(" ")
            )
            .unwrap();
            writeln!(
                out,
                "<text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"{colour}\">{}</text>",
                WIDTH - MARGIN + 4.0,
                MARGIN + 14.0 * (i as f64 + 1.0),
                escape(&s.label)
            )
            .unwrap();
        }
        out.push_str("</svg>\n");
        out
    }
}
