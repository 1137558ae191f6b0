//! Minimal self-contained SVG figures. Heatmaps are embedded as base64 PNG so
//! a figure is a single file; output depends only on the input data.

use std::fmt::Write as _;

use base64::Engine as _;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 110.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

/// Row-major samples, row 0 at the bottom (`y_min`).
#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub points: Vec<(f64, f64)>,
    pub color: String,
    pub width: f64,
    pub dashed: bool,
    pub label: Option<String>,
}

impl Series {
    pub fn new(points: Vec<(f64, f64)>, color: &str) -> Self {
        Self { points, color: color.into(), width: 1.5, dashed: false, label: None }
    }

    pub fn dashed(mut self) -> Self {
        self.dashed = true;
        self
    }

    pub fn labelled(mut self, label: &str) -> Self {
        self.label = Some(label.into());
        self
    }
}

/// Shaded region between two curves sharing abscissae.
#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    pub x: Vec<f64>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub color: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Figure {
    pub title: String,
    pub xlabel: String,
    pub ylabel: String,
    pub x_range: Option<(f64, f64)>,
    pub y_range: Option<(f64, f64)>,
    pub heatmap: Option<Heatmap>,
    pub bands: Vec<Band>,
    pub series: Vec<Series>,
}

impl Figure {
    pub fn new(title: &str, xlabel: &str, ylabel: &str) -> Self {
        Self { title: title.into(), xlabel: xlabel.into(), ylabel: ylabel.into(), ..Self::default() }
    }

    fn ranges(&self) -> ((f64, f64), (f64, f64)) {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        if let Some(h) = &self.heatmap {
            xs.extend([h.x_range.0, h.x_range.1]);
            ys.extend([h.y_range.0, h.y_range.1]);
        }
        for b in &self.bands {
            xs.extend(&b.x);
            ys.extend(b.lo.iter().chain(&b.hi));
        }
        for s in &self.series {
            for &(x, y) in &s.points {
                xs.push(x);
                ys.push(y);
            }
        }
        let span = |v: &[f64]| {
            let finite = v.iter().copied().filter(|x| x.is_finite());
            let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
            if !lo.is_finite() {
                (0.0, 1.0)
            } else if hi - lo <= 1e-300 {
                (lo - 0.5, hi + 0.5)
            } else {
                (lo, hi)
            }
        };
        (self.x_range.unwrap_or_else(|| span(&xs)), self.y_range.unwrap_or_else(|| span(&ys)))
    }

    pub fn render(&self) -> String {
        let ((x0, x1), (y0, y1)) = self.ranges();
        let pw = WIDTH - LEFT - RIGHT;
        let ph = HEIGHT - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(s, r#"<clipPath id="plot"><rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}"/></clipPath>"#);

        if let Some(h) = &self.heatmap {
            let (lo, hi) = value_range(&h.values);
            let png = encode_png(h.nx, h.ny, |ix, iy| colormap(normalise(h.values[iy * h.nx + ix], lo, hi)));
            let (hx0, hx1) = (sx(h.x_range.0), sx(h.x_range.1));
            let (hy0, hy1) = (sy(h.y_range.1), sy(h.y_range.0));
            let _ = writeln!(
                s,
                r#"<image clip-path="url(#plot)" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" preserveAspectRatio="none" image-rendering="pixelated" href="data:image/png;base64,{png}"/>"#,
                hx0,
                hy0,
                hx1 - hx0,
                hy1 - hy0
            );
            let bar = encode_png(1, 64, |_, iy| colormap(iy as f64 / 63.0));
            let bx = LEFT + pw + 20.0;
            let _ = writeln!(
                s,
                r#"<image x="{bx}" y="{TOP}" width="16" height="{ph}" preserveAspectRatio="none" href="data:image/png;base64,{bar}"/>"#
            );
            let _ = writeln!(s, r#"<rect x="{bx}" y="{TOP}" width="16" height="{ph}" fill="none" stroke="black"/>"#);
            let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, bx + 20.0, TOP + 10.0, tick_label(hi));
            let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, bx + 20.0, TOP + ph, tick_label(lo));
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" transform="rotate(90 {} {})">{}</text>"#,
                bx + 60.0,
                TOP + 0.5 * ph,
                bx + 60.0,
                TOP + 0.5 * ph,
                escape(&h.label)
            );
        }

        for b in &self.bands {
            let mut d = String::new();
            for (i, (x, y)) in b.x.iter().zip(&b.hi).enumerate() {
                let _ = write!(d, "{}{:.2},{:.2} ", if i == 0 { "M" } else { "L" }, sx(*x), sy(*y));
            }
            for (x, y) in b.x.iter().zip(&b.lo).rev() {
                let _ = write!(d, "L{:.2},{:.2} ", sx(*x), sy(*y));
            }
            if !b.x.is_empty() {
                let _ = writeln!(s, r#"<path clip-path="url(#plot)" d="{}Z" fill="{}" fill-opacity="0.3" stroke="none"/>"#, d, b.color);
            }
        }

        for series in &self.series {
            let pts: Vec<String> = series
                .points
                .iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            if pts.is_empty() {
                continue;
            }
            let dash = if series.dashed { r#" stroke-dasharray="6 4""# } else { "" };
            let _ = writeln!(
                s,
                r#"<polyline clip-path="url(#plot)" points="{}" fill="none" stroke="{}" stroke-width="{}"{dash}/>"#,
                pts.join(" "),
                series.color,
                series.width
            );
        }

        // axes and ticks
        let _ = writeln!(s, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
        for i in 0..=4 {
            let f = i as f64 / 4.0;
            let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
            let (px, py) = (sx(xv), sy(yv));
            let _ = writeln!(s, r#"<line x1="{px:.2}" y1="{}" x2="{px:.2}" y2="{}" stroke="black"/>"#, TOP + ph, TOP + ph + 5.0);
            let _ = writeln!(s, r#"<text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#, TOP + ph + 18.0, tick_label(xv));
            let _ = writeln!(s, r#"<line x1="{}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="black"/>"#, LEFT - 5.0);
            let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 8.0, py + 4.0, tick_label(yv));
        }
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, LEFT + 0.5 * pw, HEIGHT - 15.0, escape(&self.xlabel));
        let _ = writeln!(
            s,
            r#"<text x="20" y="{0}" text-anchor="middle" transform="rotate(-90 20 {0})">{1}</text>"#,
            TOP + 0.5 * ph,
            escape(&self.ylabel)
        );
        let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, LEFT + 0.5 * pw, escape(&self.title));

        let labelled: Vec<&Series> = self.series.iter().filter(|v| v.label.is_some()).collect();
        for (i, series) in labelled.iter().enumerate() {
            let y = TOP + 16.0 + 16.0 * i as f64;
            let _ = writeln!(
                s,
                r#"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="{}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
                LEFT + 10.0,
                LEFT + 30.0,
                series.color,
                LEFT + 35.0,
                y + 4.0,
                escape(series.label.as_deref().unwrap_or_default())
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn value_range(values: &[f64]) -> (f64, f64) {
    let (lo, hi) = values
        .iter()
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if lo.is_finite() {
        (lo, hi)
    } else {
        (0.0, 1.0)
    }
}

fn normalise(v: f64, lo: f64, hi: f64) -> f64 {
    if !v.is_finite() || hi <= lo {
        0.0
    } else {
        ((v - lo) / (hi - lo)).clamp(0.0, 1.0)
    }
}

/// Perceptually ordered dark-blue to yellow ramp.
pub fn colormap(t: f64) -> [u8; 3] {
    const STOPS: [[f64; 3]; 5] = [
        [68.0, 1.0, 84.0],
        [59.0, 82.0, 139.0],
        [33.0, 145.0, 140.0],
        [94.0, 201.0, 98.0],
        [253.0, 231.0, 37.0],
    ];
    let x = t.clamp(0.0, 1.0) * 4.0;
    let i = (x.floor() as usize).min(3);
    let f = x - i as f64;
    let mut out = [0u8; 3];
    for c in 0..3 {
        out[c] = (STOPS[i][c] + f * (STOPS[i + 1][c] - STOPS[i][c])).round() as u8;
    }
    out
}

/// RGB PNG with row 0 of the image at the top; `pixel(ix, iy)` uses iy = 0 at the bottom.
fn encode_png(nx: usize, ny: usize, pixel: impl Fn(usize, usize) -> [u8; 3]) -> String {
    let mut data = Vec::with_capacity(nx * ny * 3);
    for row in 0..ny {
        let iy = ny - 1 - row;
        for ix in 0..nx {
            data.extend_from_slice(&pixel(ix, iy));
        }
    }
    let mut buf = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut buf, nx as u32, ny as u32);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        let mut w = enc.write_header().expect("in-memory PNG header");
        w.write_image_data(&data).expect("in-memory PNG data");
    }
    base64::engine::general_purpose::STANDARD.encode(buf)
}

fn tick_label(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 {
        "0".into()
    } else if !(1e-2..1e4).contains(&a) {
        format!("{v:.2e}")
    } else {
        let s = format!("{v:.3}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
