//! Newton polygon plots as SVG or an ASCII grid.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::scalar::rat_int;

pub type Polyline = Vec<(i64, BigRational)>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Svg,
    Ascii,
}

/// `r` rounded half away from zero to `digits` decimals.
pub fn fixed(r: &BigRational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let x = r * BigRational::from_integer(scale.clone());
    let (q, rem) = x.numer().abs().div_rem(x.denom());
    let q = if rem * 2 >= *x.denom() { q + 1 } else { q };
    let (ip, fp) = q.div_rem(&scale);
    let sign = if r.is_negative() && !(ip.is_zero() && fp.is_zero()) { "-" } else { "" };
    format!("{sign}{ip}.{fp:0>width$}", width = digits as usize)
}

fn extent(hull: &Polyline, overlays: &[(&str, Polyline)]) -> (i64, BigRational) {
    let all = hull.iter().chain(overlays.iter().flat_map(|o| o.1.iter()));
    let mut mx = 1;
    let mut my = BigRational::zero();
    for (x, y) in all {
        mx = mx.max(*x);
        if *y > my {
            my = y.clone();
        }
    }
    if my.is_zero() {
        my = rat_int(1);
    }
    (mx, my)
}

pub fn render_polygon(hull: &Polyline, overlays: &[(&str, Polyline)], format: Format) -> String {
    match format {
        Format::Svg => render_svg(hull, overlays),
        Format::Ascii => render_ascii(hull, overlays),
    }
}

const WIDTH: i64 = 640;
const HEIGHT: i64 = 480;
const MARGIN: i64 = 40;

fn render_svg(hull: &Polyline, overlays: &[(&str, Polyline)]) -> String {
    let (mx, my) = extent(hull, overlays);
    let sx = rat_int(WIDTH - 2 * MARGIN) / rat_int(mx);
    let sy = rat_int(HEIGHT - 2 * MARGIN) / &my;
    let pt = |(x, y): &(i64, BigRational)| {
        let px = rat_int(MARGIN) + rat_int(*x) * &sx;
        let py = rat_int(HEIGHT - MARGIN) - y * &sy;
        format!("{},{}", fixed(&px, 6), fixed(&py, 6))
    };
    let line = |pts: &Polyline, class: &str, color: &str, dash: &str| {
        let body: Vec<String> = pts.iter().map(pt).collect();
        format!(
            "  <polyline class=\"{class}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"{dash} points=\"{}\"/>\n",
            body.join(" ")
        )
    };
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" width=\"{WIDTH}\" height=\"{HEIGHT}\">\n"
    );
    out.push_str(&format!(
        "  <line x1=\"{MARGIN}\" y1=\"{y}\" x2=\"{x}\" y2=\"{y}\" stroke=\"#888\"/>\n  <line x1=\"{MARGIN}\" y1=\"{MARGIN}\" x2=\"{MARGIN}\" y2=\"{y}\" stroke=\"#888\"/>\n",
        x = WIDTH - MARGIN,
        y = HEIGHT - MARGIN
    ));
    out.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" font-size=\"12\">{mx}</text>\n  <text x=\"4\" y=\"{}\" font-size=\"12\">{}</text>\n",
        WIDTH - MARGIN,
        HEIGHT - MARGIN + 16,
        MARGIN,
        fixed(&my, 6)
    ));
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
    for (n, (name, pts)) in overlays.iter().enumerate() {
        if pts.len() >= 2 {
            out.push_str(&line(pts, name, colors[(n + 1) % colors.len()], " stroke-dasharray=\"6 4\""));
        }
    }
    out.push_str(&line(hull, "hull", colors[0], ""));
    for v in hull {
        let p = pt(v);
        let (cx, cy) = p.split_once(',').unwrap();
        out.push_str(&format!("  <circle cx=\"{cx}\" cy=\"{cy}\" r=\"3\" fill=\"{}\"/>\n", colors[0]));
    }
    out.push_str("</svg>\n");
    out
}

fn height_at(pts: &Polyline, x: &BigRational) -> Option<BigRational> {
    pts.windows(2).find_map(|w| {
        let (x0, x1) = (rat_int(w[0].0), rat_int(w[1].0));
        (x0 <= *x && *x <= x1).then(|| {
            if x1 == x0 {
                w[0].1.clone()
            } else {
                &w[0].1 + (x - &x0) / (&x1 - &x0) * (&w[1].1 - &w[0].1)
            }
        })
    })
}

const COLS: i64 = 73;
const ROWS: i64 = 25;

fn render_ascii(hull: &Polyline, overlays: &[(&str, Polyline)]) -> String {
    let (mx, my) = extent(hull, overlays);
    let mut grid = vec![vec![' '; COLS as usize]; ROWS as usize];
    let marks = ['-', '+', 'o'];
    let layers = overlays
        .iter()
        .enumerate()
        .map(|(n, (_, p))| (marks[n % marks.len()], p))
        .chain(std::iter::once(('*', hull)));
    for (mark, pts) in layers {
        for c in 0..COLS {
            let x = rat_int(c) * rat_int(mx) / rat_int(COLS - 1);
            if let Some(y) = height_at(pts, &x) {
                let r = (y / &my * rat_int(ROWS - 1)).round().to_integer();
                let r: i64 = r.try_into().unwrap_or(0);
                if (0..ROWS).contains(&r) {
                    grid[(ROWS - 1 - r) as usize][c as usize] = mark;
                }
            }
        }
    }
    let mut out = String::new();
    out.push_str(&format!("{} |\n", fixed(&my, 6)));
    for row in grid {
        out.push_str("         |");
        out.extend(row);
        out.push('\n');
    }
    out.push_str(&format!("         +{}\n", "-".repeat(COLS as usize)));
    out.push_str(&format!("          0{:>width$}\n", mx, width = COLS as usize - 1));
    let mut legend: Vec<String> = vec!["* polygon".into()];
    for (n, (name, _)) in overlays.iter().enumerate() {
        legend.push(format!("{} {name}", marks[n % marks.len()]));
    }
    out.push_str(&format!("          {}\n", legend.join("  ")));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn fixed_decimals() {
        assert_eq!(fixed(&rat(1, 3), 6), "0.333333");
        assert_eq!(fixed(&rat(2, 3), 6), "0.666667");
        assert_eq!(fixed(&rat(-5, 2), 6), "-2.500000");
        assert_eq!(fixed(&rat(7, 1), 2), "7.00");
    }

    #[test]
    fn hull_only_plot() {
        let hull = vec![(0, rat(0, 1)), (2, rat(1, 1))];
        let svg = render_polygon(&hull, &[], Format::Svg);
        assert!(svg.contains("points=\"40.000000,440.000000 600.000000,40.000000\""));
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert_eq!(svg, render_polygon(&hull, &[], Format::Svg));
        let txt = render_polygon(&hull, &[], Format::Ascii);
        assert!(txt.contains('*'));
    }
}
