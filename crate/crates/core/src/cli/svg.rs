//! Static line plots of response traces.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 84.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;
const TICKS: usize = 5;
/// Upper bound on vertices per polyline.
const MAX_POINTS: usize = 1500;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub struct Series<'a> {
    pub label: &'a str,
    pub values: &'a [f64],
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Plots `series` against `times` up to `until` seconds.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, times: &[f64], series: &[Series<'_>], until: f64) -> String {
    let visible = times.iter().take_while(|&&t| t <= until).count().max(1);
    let stride = visible.div_ceil(MAX_POINTS).max(1);
    let t_max = times.get(visible - 1).copied().unwrap_or(1.0).max(f64::MIN_POSITIVE);

    let (mut lo, mut hi) = series
        .iter()
        .flat_map(|s| s.values.iter().take(visible))
        .filter(|v| v.is_finite())
        .fold((0.0_f64, 0.0_f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if hi - lo < 1e-12 {
        lo -= 1e-3;
        hi += 1e-3;
    }
    let pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |t: f64| LEFT + t / t_max * plot_w;
    let py = |v: f64| TOP + (hi - v) / (hi - lo) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );

    // grid, ticks and tick labels
    for k in 0..=TICKS {
        let frac = k as f64 / TICKS as f64;
        let t = frac * t_max;
        let x = px(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#e0e0e0"/>"##,
            TOP + plot_h
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + plot_h + 18.0,
            format_tick(t)
        );
        let v = lo + frac * (hi - lo);
        let y = py(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e0e0e0"/>"##,
            LEFT + plot_w
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            format_tick(v)
        );
    }
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 14.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{0:.2}" text-anchor="middle" transform="rotate(-90 18 {0:.2})">{1}</text>"#,
        TOP + plot_h / 2.0,
        escape(y_label)
    );

    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut points = String::new();
        let n = visible.min(s.values.len());
        for k in (0..n).step_by(stride).chain((n > 0 && (n - 1) % stride != 0).then_some(n - 1)) {
            let v = s.values[k];
            if v.is_finite() {
                let _ = write!(points, "{:.2},{:.2} ", px(times[k]), py(v));
            }
        }
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"><title>{}</title></polyline>"#,
            points.trim_end(),
            escape(s.label)
        );
    }

    // legend, top right inside the frame
    let legend_x = LEFT + plot_w - 110.0;
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let y = TOP + 16.0 + 18.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{legend_x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}" stroke-width="2"/>"#,
            legend_x + 24.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            legend_x + 30.0,
            y + 4.0,
            escape(s.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn format_tick(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-3..1e4).contains(&a) {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" { "0".into() } else { s.into() }
    } else {
        format!("{v:.2e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_polyline_per_series_and_valid_xml() {
        let times: Vec<f64> = (0..5000).map(|k| k as f64 * 0.01).collect();
        let a: Vec<f64> = times.iter().map(|t| (-t).exp() * t.sin()).collect();
        let b: Vec<f64> = a.iter().map(|v| -v).collect();
        let svg = line_plot("Δf <test>", "Time (s)", "Δf (Hz)", &times, &[
            Series { label: "A&B", values: &a },
            Series { label: "C", values: &b },
        ], 30.0);
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let lines: Vec<_> = doc.descendants().filter(|n| n.has_tag_name("polyline")).collect();
        assert_eq!(lines.len(), 2);
        let pts = lines[0].attribute("points").unwrap().split(' ').count();
        assert!(pts <= MAX_POINTS + 1, "{pts}");
        // the last vertex lands on the right edge of the frame
        let last = lines[0].attribute("points").unwrap().split(' ').next_back().unwrap();
        let x: f64 = last.split(',').next().unwrap().parse().unwrap();
        assert!((x - (WIDTH - RIGHT)).abs() < 0.01, "{x}");
    }

    #[test]
    fn flat_series_still_plots() {
        let times = [0.0, 1.0, 2.0];
        let zero = [0.0; 3];
        let svg = line_plot("t", "x", "y", &times, &[Series { label: "z", values: &zero }], 10.0);
        assert!(roxmltree::Document::parse(&svg).is_ok());
        assert!(!svg.contains("NaN"));
    }

    #[test]
    fn tick_formatting() {
        assert_eq!(format_tick(0.0), "0");
        assert_eq!(format_tick(12.5), "12.5");
        assert_eq!(format_tick(-0.0025), "-0.0025");
        assert_eq!(format_tick(2.5e-5), "2.50e-5");
    }
}
