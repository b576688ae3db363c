//! SVG charts of entropy profiles.

use std::fmt::Write;

use scalent_core::scaling::EntropyProfile;

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 130.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 55.0;
const COLORS: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"];

fn range(vals: impl Iterator<Item = f64>, pad: f64) -> (f64, f64) {
    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
    if hi - lo < 1e-12 {
        (lo - pad, hi + pad)
    } else {
        (lo, hi)
    }
}

/// One series per `eps`. Log-log axes drop non-positive values; linear
/// axes show `(n, H)` as is.
pub fn profile_svg(p: &EntropyProfile, log_axes: bool) -> Result<String, String> {
    let series: Vec<(f64, Vec<(f64, f64)>)> = p
        .eps_values()
        .into_iter()
        .map(|e| {
            let pts = p
                .series(e)
                .into_iter()
                .filter(|&(n, h)| !log_axes || (n > 0 && h > 0.0))
                .map(|(n, h)| if log_axes { ((n as f64).log10(), h.log10()) } else { (n as f64, h) })
                .collect();
            (e, pts)
        })
        .filter(|(_, pts): &(f64, Vec<(f64, f64)>)| !pts.is_empty())
        .collect();
    if series.is_empty() {
        return Err(if log_axes && !p.records.is_empty() {
            "profile has no positive values for log axes; use linear axes".into()
        } else {
            "empty profile".into()
        });
    }
    let all = || series.iter().flat_map(|s| s.1.iter().copied());
    let (x0, x1) = range(all().map(|q| q.0), if log_axes { 0.5 } else { 1.0 });
    let (y0, y1) = range(all().map(|q| q.1), if log_axes { 0.5 } else { 1.0 });
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * (W - LEFT - RIGHT);
    let py = |y: f64| H - BOTTOM - (y - y0) / (y1 - y0) * (H - TOP - BOTTOM);
    let tick = |v: f64| if log_axes { format!("{:.3}", 10f64.powf(v)) } else { format!("{v:.3}") };

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<title>{}</title>"#, escape(&p.system));
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let (bx0, by0, bx1, by1) = (LEFT, TOP, W - RIGHT, H - BOTTOM);
    let _ = writeln!(s, r#"<rect x="{bx0}" y="{by0}" width="{}" height="{}" fill="none" stroke="black"/>"#, bx1 - bx0, by1 - by0);
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
            px(xv),
            by1 + 16.0,
            tick(xv)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{}</text>"#,
            bx0 - 6.0,
            py(yv) + 4.0,
            tick(yv)
        );
    }
    let scale = if log_axes { ", log scale" } else { "" };
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">n{scale}</text>"#, (bx0 + bx1) / 2.0, H - 12.0);
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {:.2})">H ({}{scale})</text>"#,
        (by0 + by1) / 2.0,
        (by0 + by1) / 2.0,
        escape(&p.unit)
    );
    for (i, (eps, pts)) in series.iter().enumerate() {
        let c = COLORS[i % COLORS.len()];
        if pts.len() > 1 {
            let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
            let _ = writeln!(s, r#"<polyline fill="none" stroke="{c}" stroke-width="1.5" points="{}"/>"#, path.join(" "));
        }
        for &(x, y) in pts {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{c}"/>"#, px(x), py(y));
        }
        let ly = by0 + 14.0 + 16.0 * i as f64;
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{c}" stroke-width="2"/>"#, bx1 + 10.0, bx1 + 28.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="11">eps={eps}</text>"#, bx1 + 32.0, ly + 4.0);
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
