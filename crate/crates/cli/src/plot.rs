use std::fmt::Write as _;

use bec_core::edge::EdgeSpectrum;

/// `band_id,k,lambda`, one line per band sample, bands in tracking order.
pub fn spectrum_csv(spec: &EdgeSpectrum) -> String {
    let mut out = String::from("band_id,k,lambda\n");
    for (id, band) in spec.bands.iter().enumerate() {
        for &(k, l) in &band.samples {
            let _ = writeln!(out, "{id},{k},{l}");
        }
    }
    out
}

/// Reads back the CSV written by [`spectrum_csv`] as `(band_id, k, λ)` triples.
pub fn parse_spectrum_csv(text: &str) -> Option<Vec<(usize, f64, f64)>> {
    let mut lines = text.lines();
    if lines.next()? != "band_id,k,lambda" {
        return None;
    }
    lines
        .map(|l| {
            let mut it = l.split(',');
            let row = (it.next()?.parse().ok()?, it.next()?.parse().ok()?, it.next()?.parse().ok()?);
            it.next().is_none().then_some(row)
        })
        .collect()
}

/// Signed crossings of `energy` per band, upward counted `+1`, read from CSV rows.
pub fn csv_crossings(rows: &[(usize, f64, f64)], energy: f64) -> Vec<(usize, i64)> {
    let mut out: Vec<(usize, i64)> = Vec::new();
    for w in rows.windows(2) {
        let ((b0, _, l0), (b1, _, l1)) = (w[0], w[1]);
        if b0 != b1 || (l0 < energy) == (l1 < energy) {
            continue;
        }
        let d = if l1 > l0 { 1 } else { -1 };
        match out.last_mut() {
            Some((b, n)) if *b == b0 => *n += d,
            _ => out.push((b0, d)),
        }
    }
    out
}

const W: f64 = 800.0;
const H: f64 = 500.0;
const MARGIN: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn nice(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

/// Edge bands over shaded bulk spectrum with the reference energy as a dashed line.
pub fn spectrum_svg(spec: &EdgeSpectrum, energy: f64, title: &str) -> String {
    let ks: Vec<f64> = spec.samples.iter().map(|s| s.k).collect();
    let (k0, k1) = (ks.first().copied().unwrap_or(-1.0), ks.last().copied().unwrap_or(1.0));
    let mut ys: Vec<f64> = vec![energy];
    for s in &spec.samples {
        if !s.cutoff.0 {
            ys.push(s.gap.0);
        }
        if !s.cutoff.1 {
            ys.push(s.gap.1);
        }
    }
    ys.extend(spec.bands.iter().flat_map(|b| b.samples.iter().map(|s| s.1)));
    let (mut y0, mut y1) = ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &y| (a.min(y), b.max(y)));
    if y1 - y0 < 1e-9 {
        y0 -= 1.0;
        y1 += 1.0;
    }
    let pad = 0.08 * (y1 - y0);
    let (y0, y1) = (y0 - pad, y1 + pad);
    let px = |k: f64| MARGIN + (k - k0) / (k1 - k0) * (W - 2.0 * MARGIN);
    let py = |l: f64| H - MARGIN - (l.clamp(y0, y1) - y0) / (y1 - y0) * (H - 2.0 * MARGIN);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}">
<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>
<text x="{:.1}" y="24" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    // bulk regions below and above the fiber gap
    for upper in [false, true] {
        let mut pts = String::new();
        let edge = |s: &bec_core::edge::KSample| -> f64 {
            if upper {
                if s.cutoff.1 { y1 } else { s.gap.1 }
            } else if s.cutoff.0 {
                y0
            } else {
                s.gap.0
            }
        };
        let base = if upper { y1 } else { y0 };
        let _ = write!(pts, "{:.2},{:.2}", px(k0), py(base));
        for s in &spec.samples {
            let _ = write!(pts, " {:.2},{:.2}", px(s.k), py(edge(s)));
        }
        let _ = write!(pts, " {:.2},{:.2}", px(k1), py(base));
        let _ = writeln!(out, r##"<polygon points="{pts}" fill="#cccccc" stroke="none"/>"##);
    }
    let _ = writeln!(
        out,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#444444" stroke-dasharray="6,4"/>"##,
        px(k0),
        py(energy),
        px(k1),
        py(energy)
    );
    for (i, b) in spec.bands.iter().enumerate() {
        let pts: Vec<String> = b.samples.iter().map(|&(k, l)| format!("{:.2},{:.2}", px(k), py(l))).collect();
        let dash = if b.flat { r#" stroke-dasharray="3,3""# } else { "" };
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="2"{dash}/>"#,
            pts.join(" "),
            PALETTE[i % PALETTE.len()]
        );
    }
    // frame and ticks
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        W - 2.0 * MARGIN,
        H - 2.0 * MARGIN
    );
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let k = k0 + t * (k1 - k0);
        let l = y0 + t * (y1 - y0);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            px(k),
            H - MARGIN + 16.0,
            nice(k)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
            MARGIN - 6.0,
            py(l) + 4.0,
            nice(l)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle">k</text>"#,
        W / 2.0,
        H - 18.0
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle">lambda</text>"#,
        H / 2.0
    );
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
