//! Self-contained SVG figures: equilibrium heatmaps with contour overlays,
//! iso-equilibrium contours, phase portraits and event-study plots.
//!
//! Output depends only on the inputs: coordinates are printed with fixed
//! precision and elements are emitted in data order.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dynamics::PhasePortrait;
use crate::empirics::EventStudyResult;
use crate::error::{Error, Result};
use crate::sweep::{IsoContour, SweepGrid, Variable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FigureKind {
    SurfaceHeatmap,
    Contour,
    Phase,
    EventStudy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenderSpec {
    pub kind: FigureKind,
    pub width: u32,
    pub height: u32,
    /// Data ranges; derived from the artifact when absent.
    pub x_range: Option<(f64, f64)>,
    pub y_range: Option<(f64, f64)>,
    /// `viridis` or `gray`.
    pub colormap: String,
}

impl RenderSpec {
    pub fn new(kind: FigureKind) -> Self {
        Self {
            kind,
            width: 640,
            height: 480,
            x_range: None,
            y_range: None,
            colormap: "viridis".into(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.width < MARGIN_LEFT as u32 + MARGIN_RIGHT as u32 + 10
            || self.height < MARGIN_TOP as u32 + MARGIN_BOTTOM as u32 + 10
        {
            return Err(Error::Usage(format!(
                "figure of {}x{} px is too small",
                self.width, self.height
            )));
        }
        for r in [self.x_range, self.y_range].into_iter().flatten() {
            if !(r.1 > r.0) || !r.0.is_finite() || !r.1.is_finite() {
                return Err(Error::Usage(format!("empty axis range {r:?}")));
            }
        }
        colormap(&self.colormap).map(|_| ())
    }
}

/// What to draw.
#[derive(Debug, Clone, Copy)]
pub enum Artifact<'a> {
    Surface {
        grid: &'a SweepGrid,
        variable: Variable,
        overlays: &'a [IsoContour],
    },
    Contour {
        contours: &'a [IsoContour],
        /// Extent of the (θ, η) plane to show.
        extent: ((f64, f64), (f64, f64)),
    },
    /// One or two portraits on a shared window (before/after a shock).
    Phase(&'a [&'a PhasePortrait]),
    EventStudy(&'a EventStudyResult),
}

impl Artifact<'_> {
    pub fn kind(&self) -> FigureKind {
        match self {
            Artifact::Surface { .. } => FigureKind::SurfaceHeatmap,
            Artifact::Contour { .. } => FigureKind::Contour,
            Artifact::Phase(_) => FigureKind::Phase,
            Artifact::EventStudy(_) => FigureKind::EventStudy,
        }
    }

    fn natural_ranges(&self) -> Result<((f64, f64), (f64, f64))> {
        Ok(match self {
            Artifact::Surface { grid, .. } => (
                cell_extent(&grid.theta_axis),
                cell_extent(&grid.eta_axis),
            ),
            Artifact::Contour { extent, .. } => *extent,
            Artifact::Phase(ps) => {
                let p = ps
                    .first()
                    .ok_or_else(|| Error::Usage("no phase portrait to render".into()))?;
                (p.window.k_range, p.c_range)
            }
            Artifact::EventStudy(es) => {
                let lo = *es.periods.first().unwrap_or(&-1) as f64 - 0.5;
                let hi = *es.periods.last().unwrap_or(&1) as f64 + 0.5;
                let (mut y0, mut y1) = (0.0f64, 0.0f64);
                for (b, s) in es.coefficients.iter().zip(&es.se) {
                    y0 = y0.min(b - 1.96 * s);
                    y1 = y1.max(b + 1.96 * s);
                }
                let pad = 0.1 * (y1 - y0).max(1e-3);
                ((lo, hi), (y0 - pad, y1 + pad))
            }
        })
    }

    fn labels(&self) -> (&'static str, &'static str) {
        match self {
            Artifact::Surface { .. } | Artifact::Contour { .. } => ("θ", "η"),
            Artifact::Phase(_) => ("k", "c"),
            Artifact::EventStudy(_) => ("period relative to adoption", "coefficient"),
        }
    }
}

const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 90.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 50.0;

/// Affine map from data coordinates to pixels inside the plot area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub left: f64,
    pub top: f64,
    pub width: f64,
    pub height: f64,
}

impl Frame {
    pub fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let (x0, x1) = self.x_range;
        let (y0, y1) = self.y_range;
        (
            self.left + (x - x0) / (x1 - x0) * self.width,
            self.top + self.height - (y - y0) / (y1 - y0) * self.height,
        )
    }
}

/// The frame [`render_svg`] uses for `artifact` under `spec`.
pub fn frame_for(artifact: &Artifact<'_>, spec: &RenderSpec) -> Result<Frame> {
    let (xr, yr) = artifact.natural_ranges()?;
    Ok(Frame {
        x_range: spec.x_range.unwrap_or(xr),
        y_range: spec.y_range.unwrap_or(yr),
        left: MARGIN_LEFT,
        top: MARGIN_TOP,
        width: spec.width as f64 - MARGIN_LEFT - MARGIN_RIGHT,
        height: spec.height as f64 - MARGIN_TOP - MARGIN_BOTTOM,
    })
}

fn cell_extent(axis: &[f64]) -> (f64, f64) {
    let n = axis.len();
    if n == 1 {
        return (axis[0] - 0.5, axis[0] + 0.5);
    }
    (
        axis[0] - 0.5 * (axis[1] - axis[0]),
        axis[n - 1] + 0.5 * (axis[n - 1] - axis[n - 2]),
    )
}

type Rgb = [u8; 3];

fn colormap(name: &str) -> Result<&'static [Rgb]> {
    const VIRIDIS: [Rgb; 5] = [
        [0x44, 0x01, 0x54],
        [0x3b, 0x52, 0x8b],
        [0x21, 0x91, 0x8c],
        [0x5e, 0xc9, 0x62],
        [0xfd, 0xe7, 0x25],
    ];
    const GRAY: [Rgb; 2] = [[0x10, 0x10, 0x10], [0xf0, 0xf0, 0xf0]];
    match name {
        "viridis" => Ok(&VIRIDIS),
        "gray" => Ok(&GRAY),
        other => Err(Error::Usage(format!(
            "unknown colormap {other:?} (expected viridis or gray)"
        ))),
    }
}

fn color_at(map: &[Rgb], t: f64) -> String {
    let t = t.clamp(0.0, 1.0) * (map.len() - 1) as f64;
    let i = (t.floor() as usize).min(map.len() - 2);
    let f = t - i as f64;
    let c: Vec<u8> = (0..3)
        .map(|ch| (map[i][ch] as f64 + f * (map[i + 1][ch] as f64 - map[i][ch] as f64)).round() as u8)
        .collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn tick_label(v: f64) -> String {
    let s = if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-3) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    };
    let s = if s.contains('.') && !s.contains('e') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

struct Doc {
    out: String,
}

impl Doc {
    fn new(spec: &RenderSpec, title: &str) -> Self {
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#,
            w = spec.width,
            h = spec.height
        );
        let _ = writeln!(out, "<title>{}</title>", escape(title));
        let _ = writeln!(
            out,
            r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#,
            spec.width, spec.height
        );
        Self { out }
    }

    fn line(&mut self, a: (f64, f64), b: (f64, f64), style: &str) {
        let _ = writeln!(
            self.out,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" {style}/>"#,
            a.0, a.1, b.0, b.1
        );
    }

    fn text(&mut self, at: (f64, f64), anchor: &str, s: &str, extra: &str) {
        let _ = writeln!(
            self.out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="{anchor}"{extra}>{}</text>"#,
            at.0,
            at.1,
            escape(s)
        );
    }

    fn polyline(&mut self, pts: impl IntoIterator<Item = (f64, f64)>, style: &str) {
        let mut d = String::new();
        for (i, (x, y)) in pts.into_iter().enumerate() {
            let _ = write!(d, "{}{x:.2} {y:.2}", if i == 0 { "M" } else { " L" });
        }
        if !d.is_empty() {
            let _ = writeln!(self.out, r#"<path d="{d}" fill="none" {style}/>"#);
        }
    }

    fn axes(&mut self, f: &Frame, labels: (&str, &str)) {
        let (l, t, r, b) = (f.left, f.top, f.left + f.width, f.top + f.height);
        let style = r#"stroke="black" stroke-width="1""#;
        self.line((l, b), (r, b), style);
        self.line((l, t), (l, b), style);
        for i in 0..=4 {
            let u = i as f64 / 4.0;
            let xv = f.x_range.0 + u * (f.x_range.1 - f.x_range.0);
            let yv = f.y_range.0 + u * (f.y_range.1 - f.y_range.0);
            let x = l + u * f.width;
            let y = b - u * f.height;
            self.line((x, b), (x, b + 5.0), style);
            self.text((x, b + 18.0), "middle", &tick_label(xv), "");
            self.line((l - 5.0, y), (l, y), style);
            self.text((l - 8.0, y + 4.0), "end", &tick_label(yv), "");
        }
        self.text(((l + r) / 2.0, b + 40.0), "middle", labels.0, "");
        self.text(
            (18.0, (t + b) / 2.0),
            "middle",
            labels.1,
            &format!(r#" transform="rotate(-90 18 {:.2})""#, (t + b) / 2.0),
        );
    }

    fn clip(&mut self, f: &Frame) {
        let _ = writeln!(
            self.out,
            r#"<defs><clipPath id="plot-area"><rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}"/></clipPath></defs>"#,
            f.left, f.top, f.width, f.height
        );
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

const LINE_COLORS: [&str; 4] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd"];

pub fn render_svg(artifact: &Artifact<'_>, spec: &RenderSpec) -> Result<String> {
    if artifact.kind() != spec.kind {
        return Err(Error::Usage(format!(
            "render spec is for {:?} but the artifact is {:?}",
            spec.kind,
            artifact.kind()
        )));
    }
    spec.validate()?;
    let frame = frame_for(artifact, spec)?;
    if !(frame.x_range.1 > frame.x_range.0) || !(frame.y_range.1 > frame.y_range.0) {
        return Err(Error::Usage("artifact has an empty extent".into()));
    }
    let doc = match *artifact {
        Artifact::Surface {
            grid,
            variable,
            overlays,
        } => surface(grid, variable, overlays, spec, &frame)?,
        Artifact::Contour { contours, .. } => {
            let mut doc = Doc::new(spec, "iso-equilibrium contours");
            doc.clip(&frame);
            doc.axes(&frame, artifact.labels());
            contour_paths(&mut doc, contours, &frame);
            doc
        }
        Artifact::Phase(ps) => phase(ps, spec, &frame)?,
        Artifact::EventStudy(es) => event(es, spec, &frame),
    };
    Ok(doc.finish())
}

fn contour_paths(doc: &mut Doc, contours: &[IsoContour], f: &Frame) {
    for (n, c) in contours.iter().enumerate() {
        let color = LINE_COLORS[n % LINE_COLORS.len()];
        for line in &c.lines {
            doc.polyline(
                line.iter().map(|p| f.map(p[0], p[1])),
                &format!(r#"stroke="{color}" stroke-width="1.5" clip-path="url(#plot-area)""#),
            );
        }
    }
}

fn surface(
    grid: &SweepGrid,
    variable: Variable,
    overlays: &[IsoContour],
    spec: &RenderSpec,
    f: &Frame,
) -> Result<Doc> {
    let map = colormap(&spec.colormap)?;
    let name = match variable {
        Variable::KStar => "k*",
        Variable::CStar => "c*",
    };
    let mut doc = Doc::new(spec, &format!("{name} over (θ, η), log colour scale"));
    doc.clip(f);
    let (nt, ne) = grid.shape();
    let logs: Vec<Option<f64>> = (0..nt)
        .flat_map(|i| (0..ne).map(move |j| (i, j)))
        .map(|(i, j)| grid.value(i, j, variable).filter(|v| *v > 0.0).map(f64::log10))
        .collect();
    let (lo, hi) = logs
        .iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let edges = |axis: &[f64], k: usize| -> (f64, f64) {
        let (e0, e1) = cell_extent(axis);
        let a = if k == 0 { e0 } else { 0.5 * (axis[k - 1] + axis[k]) };
        let b = if k + 1 == axis.len() { e1 } else { 0.5 * (axis[k] + axis[k + 1]) };
        (a, b)
    };
    for i in 0..nt {
        let (x0, x1) = edges(&grid.theta_axis, i);
        for j in 0..ne {
            let (y0, y1) = edges(&grid.eta_axis, j);
            let (px0, py1) = f.map(x0, y1);
            let (px1, py0) = f.map(x1, y0);
            let fill = match logs[i * ne + j] {
                Some(v) => color_at(map, (v - lo) / span),
                None => "#bdbdbd".into(),
            };
            let _ = writeln!(
                doc.out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}" clip-path="url(#plot-area)"/>"#,
                px0,
                py1,
                px1 - px0,
                py0 - py1
            );
        }
    }
    contour_paths(&mut doc, overlays, f);
    doc.axes(f, ("θ", "η"));

    // colour bar
    let bx = f.left + f.width + 20.0;
    let steps = 32;
    let h = f.height / steps as f64;
    for s in 0..steps {
        let t = (s as f64 + 0.5) / steps as f64;
        let _ = writeln!(
            doc.out,
            r#"<rect x="{bx:.2}" y="{:.2}" width="14" height="{:.2}" fill="{}"/>"#,
            f.top + f.height - (s as f64 + 1.0) * h,
            h + 0.01,
            color_at(map, t)
        );
    }
    if lo.is_finite() {
        doc.text((bx + 18.0, f.top + 10.0), "start", &tick_label(10f64.powf(hi)), "");
        doc.text((bx + 18.0, f.top + f.height), "start", &tick_label(10f64.powf(lo)), "");
    }
    doc.text((bx, f.top - 10.0), "start", name, "");
    Ok(doc)
}

fn phase(ps: &[&PhasePortrait], spec: &RenderSpec, f: &Frame) -> Result<Doc> {
    if ps.is_empty() || ps.len() > 2 {
        return Err(Error::Usage(format!(
            "phase figure takes one or two portraits, got {}",
            ps.len()
        )));
    }
    let title = ps
        .iter()
        .map(|p| format!("η={} θ={}: {}", p.params.eta, p.params.theta, p.classification))
        .collect::<Vec<_>>()
        .join(" → ");
    let mut doc = Doc::new(spec, &title);
    doc.clip(f);
    doc.axes(f, ("k", "c"));
    let clip = r#"clip-path="url(#plot-area)""#;
    for (n, p) in ps.iter().enumerate() {
        let color = LINE_COLORS[n];
        let dash = if n == 0 { "" } else { r#" stroke-dasharray="6 3""# };

        // quiver, arrows scaled to a fixed fraction of a field cell
        let len = 0.6 * f.width / p.window.field_nx.max(1) as f64;
        for s in &p.vector_field {
            let (x, y) = f.map(s.k, s.c);
            let dx = s.k_dot / (f.x_range.1 - f.x_range.0) * f.width;
            let dy = -s.c_dot / (f.y_range.1 - f.y_range.0) * f.height;
            let norm = dx.hypot(dy);
            if norm == 0.0 || !norm.is_finite() {
                continue;
            }
            let (ux, uy) = (dx / norm, dy / norm);
            let tip = (x + ux * len, y + uy * len);
            let style = format!(r#"stroke="{color}" stroke-opacity="0.35" stroke-width="1" {clip}"#);
            doc.line((x, y), tip, &style);
            let back = (tip.0 - ux * 4.0, tip.1 - uy * 4.0);
            doc.line(tip, (back.0 - uy * 2.5, back.1 + ux * 2.5), &style);
            doc.line(tip, (back.0 + uy * 2.5, back.1 - ux * 2.5), &style);
        }

        let nc_style = format!(r#"stroke="{color}" stroke-width="1.5"{dash} {clip}"#);
        doc.polyline(
            p.nullclines.k_nullcline.iter().map(|q| f.map(q[0], q[1])),
            &nc_style,
        );
        doc.polyline(
            p.nullclines.c_nullcline.iter().map(|q| f.map(q[0], q[1])),
            &nc_style,
        );
        let path_style = format!(r#"stroke="black" stroke-width="2"{dash} {clip}"#);
        for b in &p.stable_paths {
            doc.polyline(
                b.path.samples.iter().map(|s| f.map(s.state.k, s.state.c)),
                &path_style,
            );
        }
        let (ex, ey) = f.map(p.equilibrium.k, p.equilibrium.c);
        let _ = writeln!(
            doc.out,
            r#"<circle id="equilibrium-{n}" cx="{ex:.2}" cy="{ey:.2}" r="4" fill="{color}" stroke="black"/>"#
        );
    }
    Ok(doc)
}

fn event(es: &EventStudyResult, spec: &RenderSpec, f: &Frame) -> Doc {
    let mut doc = Doc::new(spec, "event-study coefficients with 95% intervals");
    doc.clip(f);
    doc.axes(f, ("period relative to adoption", "coefficient"));
    let z0 = f.map(f.x_range.0, 0.0);
    let z1 = f.map(f.x_range.1, 0.0);
    doc.line(
        z0,
        z1,
        r#"stroke="gray" stroke-dasharray="4 3" clip-path="url(#plot-area)""#,
    );
    for ((&e, &b), &s) in es.periods.iter().zip(&es.coefficients).zip(&es.se) {
        let x = e as f64;
        let lo = f.map(x, b - 1.96 * s);
        let hi = f.map(x, b + 1.96 * s);
        let style = r##"stroke="#1f77b4" stroke-width="1.5" clip-path="url(#plot-area)""##;
        doc.line(lo, hi, style);
        doc.line((lo.0 - 4.0, lo.1), (lo.0 + 4.0, lo.1), style);
        doc.line((hi.0 - 4.0, hi.1), (hi.0 + 4.0, hi.1), style);
        let (px, py) = f.map(x, b);
        let fill = if e == EventStudyResult::REFERENCE { "white" } else { "#1f77b4" };
        let _ = writeln!(
            doc.out,
            r##"<circle cx="{px:.2}" cy="{py:.2}" r="3.5" fill="{fill}" stroke="#1f77b4"/>"##
        );
    }
    doc
}
