// Copyright 2026 The rabi-hubbard Authors
// SPDX-License-Identifier: Apache-2.0

//! |ψ| heatmap over (g, zJ) with the three boundary estimates overlaid:
//! numeric solid, analytic dashed, LME dotted.

use std::fmt::Write;

use rabi_hubbard::sweep::{PhaseDiagram, Scale};

const W: f64 = 640.0;
const H: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 110.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 50.0;

// Viridis samples at 0, 0.25, 0.5, 0.75, 1.
const STOPS: [(f64, f64, f64); 5] = [
    (68.0, 1.0, 84.0),
    (59.0, 82.0, 139.0),
    (33.0, 145.0, 140.0),
    (94.0, 201.0, 98.0),
    (253.0, 231.0, 37.0),
];

fn colour(t: f64) -> String {
    if !t.is_finite() {
        return "#808080".into();
    }
    let t = t.clamp(0.0, 1.0) * (STOPS.len() - 1) as f64;
    let i = (t.floor() as usize).min(STOPS.len() - 2);
    let f = t - i as f64;
    let (a, b) = (STOPS[i], STOPS[i + 1]);
    let mix = |x: f64, y: f64| (x + f * (y - x)).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        mix(a.0, b.0),
        mix(a.1, b.1),
        mix(a.2, b.2)
    )
}

/// Maps a data value on an axis to [0, 1].
fn unit(v: f64, lo: f64, hi: f64, scale: Scale) -> f64 {
    match scale {
        Scale::Linear => (v - lo) / (hi - lo),
        Scale::Log => (v.ln() - lo.ln()) / (hi.ln() - lo.ln()),
    }
}

/// Cell edges halfway between grid points (in axis space), clamped to the range.
fn edges(values: &[f64], scale: Scale) -> Vec<f64> {
    let n = values.len();
    let lo = values[0];
    let hi = values[n - 1];
    let u: Vec<f64> = if n == 1 {
        vec![0.5]
    } else {
        values.iter().map(|&v| unit(v, lo, hi, scale)).collect()
    };
    let mut e = Vec::with_capacity(n + 1);
    e.push(0.0);
    for k in 1..n {
        e.push(0.5 * (u[k - 1] + u[k]));
    }
    e.push(1.0);
    e
}

pub fn heatmap(d: &PhaseDiagram) -> String {
    let spec = &d.metadata.spec;
    let (gs, zs) = (&d.g_values, &d.zj_values);
    let (gx, zy) = (spec.g_axis.scale, spec.zj_axis.scale);
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let px = |u: f64| LEFT + u * pw;
    let py = |u: f64| TOP + (1.0 - u) * ph;

    let vmax = d
        .cells
        .iter()
        .map(|c| c.abs_psi)
        .filter(|x| x.is_finite())
        .fold(0.0_f64, f64::max);
    let norm = if vmax > 0.0 { vmax } else { 1.0 };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);

    let ge = edges(gs, gx);
    let ze = edges(zs, zy);
    let _ = writeln!(s, r#"<g shape-rendering="crispEdges">"#);
    for i in 0..gs.len() {
        for (j, c) in d.row(i).iter().enumerate() {
            let (x0, x1) = (px(ge[i]), px(ge[i + 1]));
            let (y0, y1) = (py(ze[j + 1]), py(ze[j]));
            let _ = writeln!(
                s,
                r#"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                x1 - x0,
                y1 - y0,
                colour(c.abs_psi / norm)
            );
        }
    }
    let _ = writeln!(s, "</g>");

    let range_g = (gs[0], gs[gs.len() - 1]);
    let range_z = (zs[0], zs[zs.len() - 1]);
    let inside =
        |z: f64| z.is_finite() && z >= range_z.0.min(range_z.1) && z <= range_z.0.max(range_z.1);
    let mut polyline = |line: &[Option<f64>], style: &str| {
        let mut pts = Vec::new();
        let flush = |pts: &mut Vec<String>, s: &mut String| {
            if pts.len() > 1 {
                let _ = writeln!(
                    s,
                    r#"<polyline fill="none" stroke="white" stroke-width="2" {style} points="{}"/>"#,
                    pts.join(" ")
                );
            }
            pts.clear();
        };
        for (i, z) in line.iter().enumerate() {
            match z {
                Some(z) if inside(*z) => {
                    let ux = if gs.len() == 1 {
                        0.5
                    } else {
                        unit(gs[i], range_g.0, range_g.1, gx)
                    };
                    let uy = unit(*z, range_z.0, range_z.1, zy);
                    pts.push(format!("{:.2},{:.2}", px(ux), py(uy)));
                }
                _ => flush(&mut pts, &mut s),
            }
        }
        flush(&mut pts, &mut s);
    };
    polyline(&d.boundary_numeric, "");
    polyline(&d.boundary_analytic, r#"stroke-dasharray="8 4""#);
    polyline(&d.boundary_lme, r#"stroke-dasharray="2 3""#);

    // Frame, ticks at the ends of each axis, labels.
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for (u, v) in [(0.0, range_g.0), (1.0, range_g.1)] {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            px(u),
            TOP + ph + 16.0,
            tick(v)
        );
    }
    for (u, v) in [(0.0, range_z.0), (1.0, range_z.1)] {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            py(u) + 4.0,
            tick(v)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">g / ω0</text>"#,
        LEFT + pw / 2.0,
        H - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(18,{:.2}) rotate(-90)" text-anchor="middle">zJ / ω0{}</text>"#,
        TOP + ph / 2.0,
        if zy == Scale::Log { " (log)" } else { "" }
    );

    // Colour bar.
    let cx = W - RIGHT + 20.0;
    let bands = 32;
    for k in 0..bands {
        let t0 = k as f64 / bands as f64;
        let y = TOP + (1.0 - t0 - 1.0 / bands as f64) * ph;
        let _ = writeln!(
            s,
            r#"<rect x="{cx}" y="{y:.2}" width="14" height="{:.2}" fill="{}"/>"#,
            ph / bands as f64 + 0.5,
            colour(t0 + 0.5 / bands as f64)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{:.2}">{}</text>"#,
        cx + 18.0,
        TOP + 10.0,
        tick(norm)
    );
    let _ = writeln!(s, r#"<text x="{}" y="{:.2}">0</text>"#, cx + 18.0, TOP + ph);
    let _ = writeln!(s, r#"<text x="{cx}" y="{:.2}">|ψ|</text>"#, TOP + ph + 16.0);
    let _ = writeln!(s, "</svg>");
    s
}

fn tick(v: f64) -> String {
    if v != 0.0 && !(1e-2..1e3).contains(&v.abs()) {
        format!("{v:.0e}")
    } else {
        format!("{v:.3}")
    }
}
