use std::fmt::Write;

use cmc_torus::StabilityReport;

const W: f64 = 800.0;
const H: f64 = 420.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;

/// Morse index against `r` with the stability band and the threshold radii
/// `1/l` and `√(k² − 1)/k` that fall inside the plotted range.
pub fn stability_diagram(reports: &[StabilityReport]) -> String {
    let (r0, r1) = match (reports.first(), reports.last()) {
        (Some(a), Some(b)) if b.r > a.r => (a.r, b.r),
        (Some(a), _) => (a.r - 0.01, a.r + 0.01),
        _ => (0.0, 1.0),
    };
    let max_index = reports.iter().map(|s| s.morse_index).max().unwrap_or(0).max(1) as f64;
    let x = |r: f64| LEFT + (r - r0) / (r1 - r0) * (W - LEFT - RIGHT);
    let y = |i: f64| H - BOTTOM - i / max_index * (H - TOP - BOTTOM);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);

    let (a, b) = (0.5f64.max(r0), (3f64.sqrt() / 2.0).min(r1));
    if a < b {
        let _ = writeln!(
            s,
            r##"<rect x="{:.2}" y="{TOP}" width="{:.2}" height="{:.2}" fill="#d8f0d8"/>"##,
            x(a),
            x(b) - x(a),
            H - TOP - BOTTOM
        );
    }

    for n in 2..=200u32 {
        let nf = n as f64;
        for (r, colour) in [(1.0 / nf, "#c04040"), ((nf * nf - 1.0).sqrt() / nf, "#4040c0")] {
            if r > r0 && r < r1 {
                let _ = writeln!(
                    s,
                    r#"<line x1="{0:.2}" y1="{TOP}" x2="{0:.2}" y2="{1:.2}" stroke="{colour}" stroke-width="0.7" stroke-dasharray="4 3"/>"#,
                    x(r),
                    H - BOTTOM
                );
            }
        }
    }

    let mut path = String::new();
    let mut prev: Option<f64> = None;
    for rep in reports {
        let (px, py) = (x(rep.r), y(rep.morse_index as f64));
        match prev {
            None => {
                let _ = write!(path, "M{px:.2},{py:.2}");
            }
            Some(last) => {
                let _ = write!(path, " L{px:.2},{last:.2} L{px:.2},{py:.2}");
            }
        }
        prev = Some(py);
    }
    let _ = writeln!(s, r#"<path d="{path}" fill="none" stroke="black" stroke-width="1.5"/>"#);

    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{0}" x2="{1}" y2="{0}" stroke="black"/><line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{0}" stroke="black"/>"#,
        H - BOTTOM,
        W - RIGHT
    );
    for i in 0..=5 {
        let r = r0 + (r1 - r0) * i as f64 / 5.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{r:.3}</text>"#,
            x(r),
            H - BOTTOM + 18.0
        );
    }
    let step = (max_index / 8.0).ceil().max(1.0) as usize;
    for i in (0..=max_index as usize).step_by(step) {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end">{i}</text>"#,
            LEFT - 6.0,
            y(i as f64) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">r</text>"#,
        0.5 * (LEFT + W - RIGHT),
        H - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {0:.2})">Morse index</text>"#,
        0.5 * (TOP + H - BOTTOM)
    );
    s.push_str("</svg>\n");
    s
}
