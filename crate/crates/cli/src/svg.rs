//! SVG figures of real and tropical arrangements for `d ≤ 2`.

use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use hypmirror_core::arrangement::{real_chambers, HypertoricData};
use hypmirror_core::linalg::IntMatrix;
use hypmirror_core::tropical::TropicalArrangement;

use crate::config::RenderOptions;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SvgError {
    #[error("figures need d <= 2, got d = {0}")]
    Dimension(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureKind {
    Real,
    Tropical,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Element {
    /// A point on the line, `d = 1`.
    Point(f64),
    /// `normal · x = offset`.
    Line { normal: (f64, f64), offset: f64 },
    /// Rays from a common vertex.
    Star {
        vertex: (f64, f64),
        rays: Vec<(f64, f64)>,
    },
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Figure {
    pub d: usize,
    pub hyperplanes: Vec<Element>,
    pub chambers: Vec<(String, Vec<f64>)>,
    pub vertices: Vec<Vec<f64>>,
}

fn f(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(0.0)
}

fn fv(v: &[BigRational]) -> Vec<f64> {
    v.iter().map(f).collect()
}

pub fn real_figure(h: &HypertoricData) -> Result<Figure, SvgError> {
    if h.d > 2 {
        return Err(SvgError::Dimension(h.d));
    }
    let planes = h.hyperplanes();
    let mut fig = Figure {
        d: h.d,
        ..Figure::default()
    };
    for p in &planes {
        let n: Vec<f64> = p.normal.iter().map(|x| x.to_f64().unwrap_or(0.0)).collect();
        let c = f(&p.offset);
        fig.hyperplanes.push(if h.d == 1 {
            Element::Point(c / n[0])
        } else {
            Element::Line {
                normal: (n[0], n[1]),
                offset: c,
            }
        });
    }
    let mut vertices: Vec<Vec<BigRational>> = Vec::new();
    if h.d == 1 {
        for p in &planes {
            vertices.push(vec![
                &p.offset / BigRational::from_integer(p.normal[0].clone()),
            ]);
        }
    } else {
        for i in 0..planes.len() {
            for j in i + 1..planes.len() {
                let m = IntMatrix::from_rows(&[planes[i].normal.clone(), planes[j].normal.clone()])
                    .expect("2 x 2");
                let det = m.determinant().expect("square");
                if det.is_zero() {
                    continue;
                }
                let det = BigRational::from_integer(det);
                let (a, b) = (&planes[i], &planes[j]);
                let r = |x: &num_bigint::BigInt| BigRational::from_integer(x.clone());
                let x = (&a.offset * r(&b.normal[1]) - &b.offset * r(&a.normal[1])) / &det;
                let y = (r(&a.normal[0]) * &b.offset - r(&b.normal[0]) * &a.offset) / &det;
                vertices.push(vec![x, y]);
            }
        }
    }
    vertices.sort();
    vertices.dedup();
    fig.vertices = vertices.iter().map(|v| fv(v)).collect();
    for c in real_chambers(h) {
        let label: String = c.signs.iter().map(|s| s.to_string()).collect();
        fig.chambers.push((label, fv(&c.witness)));
    }
    Ok(fig)
}

pub fn tropical_figure(arr: &TropicalArrangement) -> Result<Figure, SvgError> {
    if arr.d > 2 {
        return Err(SvgError::Dimension(arr.d));
    }
    let mut fig = Figure {
        d: arr.d,
        ..Figure::default()
    };
    for hp in &arr.hyperplanes {
        let c = f(&hp.constant);
        let element = match (arr.d, hp.support.as_slice()) {
            (1, _) => Element::Point(c),
            (_, [i]) => Element::Line {
                normal: if *i == 1 { (1.0, 0.0) } else { (0.0, 1.0) },
                offset: c,
            },
            _ => Element::Star {
                vertex: (c, c),
                rays: vec![(1.0, 1.0), (0.0, -1.0), (-1.0, 0.0)],
            },
        };
        fig.hyperplanes.push(element);
    }
    for s in arr.strata.iter().filter(|s| s.dimension == 0) {
        fig.vertices.push(fv(&s.witnesses[0]));
    }
    for c in &arr.chambers {
        fig.chambers.push((c.to_string(), fv(&c.witness)));
    }
    Ok(fig)
}

pub fn emit_svg(
    h: &HypertoricData,
    arr: &TropicalArrangement,
    kind: FigureKind,
    opts: &RenderOptions,
) -> Result<String, SvgError> {
    let fig = match kind {
        FigureKind::Real => real_figure(h)?,
        FigureKind::Tropical => tropical_figure(arr)?,
    };
    Ok(render(&fig, opts))
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
    opts: RenderOptions,
}

impl Frame {
    fn new(fig: &Figure, opts: &RenderOptions) -> Self {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut add = |p: &[f64]| {
            xs.push(p[0]);
            if p.len() > 1 {
                ys.push(p[1]);
            }
        };
        for v in &fig.vertices {
            add(v);
        }
        for (_, w) in &fig.chambers {
            add(w);
        }
        for e in &fig.hyperplanes {
            match e {
                Element::Point(x) => add(&[*x]),
                Element::Star { vertex, .. } => add(&[vertex.0, vertex.1]),
                Element::Line { .. } => {}
            }
        }
        let range = |v: &[f64]| {
            let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if !lo.is_finite() {
                return (-1.0, 1.0);
            }
            let pad = (0.35 * (hi - lo)).max(1.0);
            (lo - pad, hi + pad)
        };
        let y = if fig.d == 1 { (-1.0, 1.0) } else { range(&ys) };
        Frame {
            x: range(&xs),
            y,
            opts: *opts,
        }
    }

    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        let m = f64::from(self.opts.margin);
        let w = f64::from(self.opts.width) - 2.0 * m;
        let h = f64::from(self.opts.height) - 2.0 * m;
        let sx = m + (x - self.x.0) / (self.x.1 - self.x.0) * w;
        let sy = f64::from(self.opts.height) - m - (y - self.y.0) / (self.y.1 - self.y.0) * h;
        (sx, sy)
    }

    fn clip_line(&self, n: (f64, f64), c: f64) -> Option<((f64, f64), (f64, f64))> {
        let mut pts: Vec<(f64, f64)> = Vec::new();
        let eps = 1e-9;
        if n.1.abs() > eps {
            for x in [self.x.0, self.x.1] {
                let y = (c - n.0 * x) / n.1;
                if y >= self.y.0 - eps && y <= self.y.1 + eps {
                    pts.push((x, y));
                }
            }
        }
        if n.0.abs() > eps {
            for y in [self.y.0, self.y.1] {
                let x = (c - n.1 * y) / n.0;
                if x >= self.x.0 - eps && x <= self.x.1 + eps {
                    pts.push((x, y));
                }
            }
        }
        pts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        pts.dedup_by(|a, b| (a.0 - b.0).abs() < eps && (a.1 - b.1).abs() < eps);
        match pts.as_slice() {
            [first, .., last] => Some((*first, *last)),
            _ => None,
        }
    }

    fn ray_end(&self, v: (f64, f64), r: (f64, f64)) -> (f64, f64) {
        let mut t = f64::INFINITY;
        for (p, d, (lo, hi)) in [(v.0, r.0, self.x), (v.1, r.1, self.y)] {
            if d > 0.0 {
                t = t.min((hi - p) / d);
            } else if d < 0.0 {
                t = t.min((lo - p) / d);
            }
        }
        (v.0 + t * r.0, v.1 + t * r.1)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

pub fn render(fig: &Figure, opts: &RenderOptions) -> String {
    let frame = Frame::new(fig, opts);
    let (w, h) = (opts.width, opts.height);
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(
        out,
        r#"<rect class="background" x="0" y="0" width="{w}" height="{h}" fill="white"/>"#
    );
    out.push_str("<g class=\"axes\" stroke=\"#bbbbbb\" stroke-width=\"1\">\n");
    let ox = 0.0_f64.clamp(frame.x.0, frame.x.1);
    let oy = 0.0_f64.clamp(frame.y.0, frame.y.1);
    let (a, b) = (frame.px(frame.x.0, oy), frame.px(frame.x.1, oy));
    let _ = writeln!(
        out,
        r#"<path class="axis" d="M {:.2},{:.2} L {:.2},{:.2}"/>"#,
        a.0, a.1, b.0, b.1
    );
    if fig.d != 1 {
        let (a, b) = (frame.px(ox, frame.y.0), frame.px(ox, frame.y.1));
        let _ = writeln!(
            out,
            r#"<path class="axis" d="M {:.2},{:.2} L {:.2},{:.2}"/>"#,
            a.0, a.1, b.0, b.1
        );
    }
    out.push_str(
        "</g>\n<g class=\"hyperplanes\" stroke=\"black\" stroke-width=\"1.5\" fill=\"none\">\n",
    );
    for (i, e) in fig.hyperplanes.iter().enumerate() {
        let d = match e {
            Element::Point(x) => {
                let p = frame.px(*x, 0.0);
                format!(
                    "M {:.2},{:.2} L {:.2},{:.2}",
                    p.0,
                    p.1 - 12.0,
                    p.0,
                    p.1 + 12.0
                )
            }
            Element::Line { normal, offset } => match frame.clip_line(*normal, *offset) {
                Some((s, t)) => {
                    let (s, t) = (frame.px(s.0, s.1), frame.px(t.0, t.1));
                    format!("M {:.2},{:.2} L {:.2},{:.2}", s.0, s.1, t.0, t.1)
                }
                None => String::new(),
            },
            Element::Star { vertex, rays } => {
                let v = frame.px(vertex.0, vertex.1);
                rays.iter()
                    .map(|r| {
                        let e = frame.ray_end(*vertex, *r);
                        let e = frame.px(e.0, e.1);
                        format!("M {:.2},{:.2} L {:.2},{:.2}", v.0, v.1, e.0, e.1)
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            }
        };
        let _ = writeln!(
            out,
            r#"<path class="hyperplane" data-index="{}" d="{d}"/>"#,
            i + 1
        );
    }
    out.push_str("</g>\n<g class=\"strata\" fill=\"black\">\n");
    for v in &fig.vertices {
        let p = frame.px(v[0], v.get(1).copied().unwrap_or(0.0));
        let _ = writeln!(
            out,
            r#"<circle class="stratum" cx="{:.2}" cy="{:.2}" r="3"/>"#,
            p.0, p.1
        );
    }
    out.push_str("</g>\n<g class=\"chambers\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"middle\">\n");
    for (label, w) in &fig.chambers {
        let p = frame.px(w[0], w.get(1).copied().unwrap_or(0.0));
        let y = if fig.d == 1 { p.1 - 18.0 } else { p.1 };
        let _ = writeln!(
            out,
            r#"<text class="chamber" x="{:.2}" y="{:.2}">{}</text>"#,
            p.0,
            y,
            escape(label)
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}

pub fn count_class(svg: &str, element: &str, class: &str) -> usize {
    svg.matches(&format!("<{element} class=\"{class}\""))
        .count()
}
