//! Static log–log SVG line charts for sweep results.

use std::fmt::Write;

use uncertainty::explorer::SweepResult;

const W: f64 = 640.0;
const H: f64 = 420.0;
const MARGIN: f64 = 60.0;

fn range(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

/// Log–log chart of one or more sweeps sharing a parameter axis. Points
/// with non-positive coordinates are skipped.
pub fn loglog_svg(title: &str, series: &[&SweepResult]) -> String {
    let pts: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| {
            s.grid
                .iter()
                .zip(&s.values)
                .filter(|(x, y)| **x > 0.0 && **y > 0.0)
                .map(|(x, y)| (x.log10(), y.log10()))
                .collect()
        })
        .collect();
    let (x0, x1) = range(pts.iter().flatten().map(|p| p.0));
    let (y0, y1) = range(pts.iter().flatten().map(|p| p.1));
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
    let _ = writeln!(
        out,
        r#"<path d="M{m} {m} V{b} H{r}" fill="none" stroke="black"/>"#,
        m = MARGIN,
        b = H - MARGIN,
        r = W - MARGIN
    );
    for (v, anchor, x, y) in [
        (x0, "start", MARGIN, H - MARGIN + 18.0),
        (x1, "end", W - MARGIN, H - MARGIN + 18.0),
    ] {
        let _ = writeln!(out, r#"<text x="{x}" y="{y}" text-anchor="{anchor}">{:.3e}</text>"#, 10f64.powf(v));
    }
    for (v, y) in [(y0, H - MARGIN), (y1, MARGIN + 4.0)] {
        let _ = writeln!(out, r#"<text x="{}" y="{y}" text-anchor="end">{:.3e}</text>"#, MARGIN - 6.0, 10f64.powf(v));
    }
    let param = series.first().map(|s| s.parameter.as_str()).unwrap_or("");
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{} (log)</text>"#, W / 2.0, H - 16.0, escape(param));

    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
    for (i, (s, p)) in series.iter().zip(&pts).enumerate() {
        let color = colors[i % colors.len()];
        let d: Vec<String> = p.iter().map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y))).collect();
        let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, d.join(" "));
        for (x, y) in p {
            let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#, sx(*x), sy(*y));
        }
        let mut legend = s.label.clone();
        if let Some(f) = &s.fit {
            let _ = write!(legend, ", slope {:.3}", f.slope);
        }
        if let Some(p) = s.predicted_slope {
            let _ = write!(legend, " (predicted {p:.3})");
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" fill="{color}">{}</text>"#,
            MARGIN + 8.0,
            MARGIN + 14.0 * (i as f64 + 1.0),
            escape(&legend)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_points_and_slope() {
        let s = SweepResult::new("x^2", "x", vec![1.0, 2.0, 3.0, 4.0, 5.0], vec![1.0, 4.0, 9.0, 16.0, 25.0]).unwrap();
        let svg = loglog_svg("t<1>", &[&s]);
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<circle").count(), 5);
        assert!(svg.contains("slope 2.000"));
        assert!(svg.contains("t&lt;1&gt;"));
    }
}
