//! Minimal standalone SVG charts. CSV files are the canonical outputs.

use std::fmt::Write as _;

const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD: f64 = 60.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace("--", "- -")
}

fn header(title: &str, provenance: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">");
    let _ = writeln!(s, "<!-- {} -->", escape(provenance));
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(s, "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">{}</text>", W / 2.0, escape(title));
    s
}

fn range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

pub struct Series<'a> {
    pub name: &'a str,
    pub points: Vec<(f64, f64)>,
    pub color: &'a str,
    /// Draw markers only.
    pub markers: bool,
}

/// Line chart; with `log_y` the y axis shows `log10(y)` and non-positive
/// values are dropped.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, series: &[Series], log_y: bool, provenance: &str) -> String {
    let ty = |y: f64| if log_y { y.log10() } else { y };
    let (x0, x1) = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (y0, y1) = range(series.iter().flat_map(|s| s.points.iter().filter(|p| !log_y || p.1 > 0.0).map(|p| ty(p.1))));
    let px = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let py = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let mut s = header(title, provenance);
    let _ = writeln!(s, "<rect x=\"{PAD}\" y=\"{PAD}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>", W - 2.0 * PAD, H - 2.0 * PAD);
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">{}</text>", W / 2.0, H - 15.0, escape(x_label));
    let ylab = if log_y { format!("log10 {y_label}") } else { y_label.to_string() };
    let _ = writeln!(s, "<text x=\"15\" y=\"{}\" transform=\"rotate(-90 15 {})\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">{}</text>", H / 2.0, H / 2.0, escape(&ylab));
    for (v, anchor, x, y) in [(x0, "start", PAD, H - PAD + 16.0), (x1, "end", W - PAD, H - PAD + 16.0)] {
        let _ = writeln!(s, "<text x=\"{x}\" y=\"{y}\" text-anchor=\"{anchor}\" font-family=\"sans-serif\" font-size=\"10\">{v:.4}</text>");
    }
    for (v, y) in [(y0, H - PAD), (y1, PAD + 10.0)] {
        let _ = writeln!(s, "<text x=\"{}\" y=\"{y}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">{v:.3}</text>", PAD - 4.0);
    }
    for (n, ser) in series.iter().enumerate() {
        let pts: Vec<(f64, f64)> = ser.points.iter().filter(|p| !log_y || p.1 > 0.0).map(|p| (px(p.0), py(ty(p.1)))).collect();
        if ser.markers {
            for (x, y) in &pts {
                let _ = writeln!(s, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3\" fill=\"{}\"/>", ser.color);
            }
        } else if !pts.is_empty() {
            let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(s, "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>", path.join(" "), ser.color);
        }
        let ly = PAD + 14.0 + 14.0 * n as f64;
        let _ = writeln!(s, "<text x=\"{}\" y=\"{ly}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{}\">{}</text>", PAD + 8.0, ser.color, escape(ser.name));
    }
    s.push_str("</svg>\n");
    s
}

/// Heatmap of `values[i * ys.len() + j]` at `(xs[i], ys[j])`, dark for low.
pub fn heatmap(title: &str, x_label: &str, y_label: &str, xs: &[f64], ys: &[f64], values: &[f64], provenance: &str) -> String {
    let (v0, v1) = range(values.iter().copied());
    let mut s = header(title, provenance);
    let cw = (W - 2.0 * PAD) / xs.len().max(1) as f64;
    let ch = (H - 2.0 * PAD) / ys.len().max(1) as f64;
    for i in 0..xs.len() {
        for j in 0..ys.len() {
            let t = ((values[i * ys.len() + j] - v0) / (v1 - v0)).clamp(0.0, 1.0);
            let (r, g, b) = ((255.0 * t) as u8, (200.0 * t) as u8, (90.0 + 120.0 * (1.0 - t)) as u8);
            let x = PAD + i as f64 * cw;
            let y = H - PAD - (j + 1) as f64 * ch;
            let _ = writeln!(s, "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{cw:.2}\" height=\"{ch:.2}\" fill=\"rgb({r},{g},{b})\"/>");
        }
    }
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">{}</text>", W / 2.0, H - 15.0, escape(x_label));
    let _ = writeln!(s, "<text x=\"15\" y=\"{}\" transform=\"rotate(-90 15 {})\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">{}</text>", H / 2.0, H / 2.0, escape(y_label));
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">range {v0:.2} .. {v1:.2}</text>", W - PAD, PAD - 6.0);
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn well_formed() {
        let svg = line_plot(
            "t",
            "k",
            "p",
            &[Series { name: "a<b", points: vec![(1.0, 0.5), (2.0, 0.0), (3.0, 0.1)], color: "black", markers: false }],
            true,
            "seed 1 -- test",
        );
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("a&lt;b") && !svg.contains("seed 1 --"));
        let hm = heatmap("h", "x", "y", &[0.0, 1.0], &[0.0], &[-200.0, -100.0], "p");
        assert_eq!(hm.matches("<rect").count(), 3);
    }
}
