//! SVG figures of planar embeddings with Manhattan circles (squares rotated
//! by 45 degrees). All geometry is exact; numbers are rounded to six decimals
//! only when written.

use std::fmt::Write as _;

use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::geometry::{l1, Embedding, Point};
use crate::rational::Rational;

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

pub fn voter_color(voter: usize) -> &'static str {
    PALETTE[(voter.max(1) - 1) % PALETTE.len()]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FigureSpec {
    embedding: Embedding,
    circles: Vec<usize>,
    /// Pixels per coordinate unit.
    pub scale: Rational,
    /// Empty border around the content, in coordinate units.
    pub padding: Rational,
    pub labels: bool,
}

impl FigureSpec {
    pub fn new(embedding: Embedding) -> Result<Self> {
        if embedding.dim() != 2 {
            return Err(Error::WrongDimension { expected: 2, got: embedding.dim() });
        }
        Ok(FigureSpec { embedding, circles: vec![], scale: Rational::from_int(10), padding: Rational::from_int(2), labels: true })
    }

    /// Voters (1-based) whose circle family is drawn, in drawing order.
    pub fn with_circles(mut self, voters: &[usize]) -> Result<Self> {
        let n = self.embedding.voters().len();
        if let Some(&v) = voters.iter().find(|&&v| v == 0 || v > n) {
            return Err(Error::IndexOutOfRange { what: "voter", index: v, max: n });
        }
        self.circles = voters.to_vec();
        Ok(self)
    }

    pub fn embedding(&self) -> &Embedding {
        &self.embedding
    }

    pub fn circles(&self) -> &[usize] {
        &self.circles
    }
}

/// One Manhattan circle: voter `voter` around its position, passing through
/// alternative `alt`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circle {
    pub voter: usize,
    pub alt: usize,
    pub center: Point,
    pub radius: Rational,
}

impl Circle {
    /// Vertices east, north, west, south.
    pub fn vertices(&self) -> [(Rational, Rational); 4] {
        let (x, y, r) = (self.center.x(), self.center.y(), &self.radius);
        [(x + r, y.clone()), (x.clone(), y + r), (x - r, y.clone()), (x.clone(), y - r)]
    }
}

pub fn circles(f: &FigureSpec) -> Vec<Circle> {
    let e = &f.embedding;
    f.circles
        .iter()
        .flat_map(|&v| {
            (1..=e.alts().len()).map(move |a| Circle {
                voter: v,
                alt: a,
                center: e.voter(v).clone(),
                radius: l1(e.voter(v), e.alt(a)),
            })
        })
        .collect()
}

struct Frame {
    min_x: Rational,
    max_y: Rational,
    scale: Rational,
    width: Rational,
    height: Rational,
}

impl Frame {
    fn x(&self, x: &Rational) -> String {
        ((x - &self.min_x) * &self.scale).to_decimal(6)
    }

    fn y(&self, y: &Rational) -> String {
        ((&self.max_y - y) * &self.scale).to_decimal(6)
    }
}

fn frame(f: &FigureSpec, cs: &[Circle]) -> Frame {
    let e = &f.embedding;
    let mut xs: Vec<Rational> = vec![];
    let mut ys: Vec<Rational> = vec![];
    for p in e.voters().iter().chain(e.alts()) {
        xs.push(p.x().clone());
        ys.push(p.y().clone());
    }
    for c in cs {
        for (x, y) in c.vertices() {
            xs.push(x);
            ys.push(y);
        }
    }
    let min = |v: &[Rational]| v.iter().min().cloned().unwrap_or_default();
    let max = |v: &[Rational]| v.iter().max().cloned().unwrap_or_default();
    let min_x = min(&xs) - &f.padding;
    let max_x = max(&xs) + &f.padding;
    let min_y = min(&ys) - &f.padding;
    let max_y = max(&ys) + &f.padding;
    Frame {
        width: (&max_x - &min_x) * &f.scale,
        height: (&max_y - &min_y) * &f.scale,
        min_x,
        max_y,
        scale: f.scale.clone(),
    }
}

/// Grid step giving at most about 40 lines across the larger side.
fn grid_step(span: &Rational) -> i64 {
    let mut base = 1i64;
    loop {
        for k in [1, 2, 5] {
            if *span <= Rational::from_int(40 * base * k) {
                return base * k;
            }
        }
        base *= 10;
    }
}

pub fn render_embedding(f: &FigureSpec) -> String {
    let cs = circles(f);
    let fr = frame(f, &cs);
    let e = &f.embedding;
    let mut s = String::new();
    let (w, h) = (fr.width.to_decimal(6), fr.height.to_decimal(6));
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#);

    // grid at integer multiples of the step
    let span = if fr.width > fr.height { &fr.width / &fr.scale } else { &fr.height / &fr.scale };
    let step = grid_step(&span);
    let max_x = &fr.min_x + &(&fr.width / &fr.scale);
    let min_y = &fr.max_y - &(&fr.height / &fr.scale);
    let _ = writeln!(s, r##"<g class="grid" stroke="#e6e6e6" stroke-width="1">"##);
    let first = |lo: &Rational| {
        let q = lo / &Rational::from_int(step);
        q.numer().div_ceil(&q.denom()).to_i64().expect("grid index fits i64") * step
    };
    let mut gx = first(&fr.min_x);
    while Rational::from_int(gx) <= max_x {
        let x = fr.x(&Rational::from_int(gx));
        let _ = writeln!(s, r#"<line x1="{x}" y1="0.000000" x2="{x}" y2="{h}"/>"#);
        gx += step;
    }
    let mut gy = first(&min_y);
    while Rational::from_int(gy) <= fr.max_y {
        let y = fr.y(&Rational::from_int(gy));
        let _ = writeln!(s, r#"<line x1="0.000000" y1="{y}" x2="{w}" y2="{y}"/>"#);
        gy += step;
    }
    let _ = writeln!(s, "</g>");
    let zero = Rational::zero();
    let _ = writeln!(s, r##"<g class="axes" stroke="#808080" stroke-width="1.5">"##);
    if fr.min_x <= zero && zero <= max_x {
        let x = fr.x(&zero);
        let _ = writeln!(s, r#"<line x1="{x}" y1="0.000000" x2="{x}" y2="{h}"/>"#);
    }
    if min_y <= zero && zero <= fr.max_y {
        let y = fr.y(&zero);
        let _ = writeln!(s, r#"<line x1="0.000000" y1="{y}" x2="{w}" y2="{y}"/>"#);
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r#"<g class="circles" fill="none" stroke-width="1">"#);
    for c in &cs {
        let color = voter_color(c.voter);
        let r = c.radius.to_decimal(6);
        if c.radius.is_zero() {
            let _ = writeln!(
                s,
                r#"<circle class="degenerate" data-voter="{}" data-alt="{}" data-radius="{r}" cx="{}" cy="{}" r="2" fill="{color}"/>"#,
                c.voter,
                c.alt,
                fr.x(c.center.x()),
                fr.y(c.center.y())
            );
            continue;
        }
        let pts: Vec<String> = c.vertices().iter().map(|(x, y)| format!("{},{}", fr.x(x), fr.y(y))).collect();
        let _ = writeln!(
            s,
            r#"<polygon class="circle" data-voter="{}" data-alt="{}" data-radius="{r}" stroke="{color}" points="{}"/>"#,
            c.voter,
            c.alt,
            pts.join(" ")
        );
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r#"<g class="alternatives">"#);
    for (j, a) in e.alts().iter().enumerate() {
        let (x, y) = (fr.x(a.x()), fr.y(a.y()));
        let _ = writeln!(s, r##"<rect class="alternative" data-alt="{}" x="{x}" y="{y}" width="6" height="6" transform="translate(-3,-3)" fill="#333333"/>"##, j + 1);
        if f.labels {
            let _ = writeln!(s, r#"<text x="{x}" y="{y}" dx="5" dy="-5" font-size="11" font-family="sans-serif">a{}</text>"#, j + 1);
        }
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g class="voters">"#);
    for (i, v) in e.voters().iter().enumerate() {
        let (x, y) = (fr.x(v.x()), fr.y(v.y()));
        let color = voter_color(i + 1);
        let _ = writeln!(s, r#"<circle class="voter" data-voter="{}" cx="{x}" cy="{y}" r="4" fill="{color}"/>"#, i + 1);
        if f.labels {
            let _ = writeln!(s, r#"<text x="{x}" y="{y}" dx="5" dy="12" font-size="11" font-family="sans-serif" fill="{color}">v{}</text>"#, i + 1);
        }
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn circle_vertices_are_exact() {
        let c = Circle { voter: 1, alt: 1, center: Point::from_ints(&[-5, 0]), radius: Rational::from_int(15) };
        let v = c.vertices();
        assert_eq!(v[0], (Rational::from_int(10), Rational::zero()));
        assert_eq!(v[1], (Rational::from_int(-5), Rational::from_int(15)));
        assert_eq!(v[2], (Rational::from_int(-20), Rational::zero()));
        assert_eq!(v[3], (Rational::from_int(-5), Rational::from_int(-15)));
    }

    #[test]
    fn p1_radii() {
        let f = FigureSpec::new(fixtures::two_voters_embedding()).unwrap().with_circles(&[1, 2]).unwrap();
        let cs = circles(&f);
        assert_eq!(cs.len(), 10);
        for v in [1, 2] {
            let mut r: Vec<i64> = cs.iter().filter(|c| c.voter == v).map(|c| c.radius.to_i64().unwrap()).collect();
            r.sort();
            assert_eq!(r, vec![15, 17, 19, 21, 23]);
        }
    }

    #[test]
    fn degenerate_circle_is_a_point() {
        let e = Embedding::new(vec![Point::from_ints(&[1, 1])], vec![Point::from_ints(&[1, 1])]).unwrap();
        let svg = render_embedding(&FigureSpec::new(e).unwrap().with_circles(&[1]).unwrap());
        assert!(svg.contains("class=\"degenerate\""));
        assert!(!svg.contains("<polygon"));
    }

    #[test]
    fn rejects_other_dimensions_and_bad_voters() {
        let e = Embedding::new(vec![Point::from_ints(&[1])], vec![Point::from_ints(&[2])]).unwrap();
        assert!(FigureSpec::new(e).is_err());
        assert!(FigureSpec::new(fixtures::two_voters_embedding()).unwrap().with_circles(&[3]).is_err());
    }

    #[test]
    fn grid_steps() {
        assert_eq!(grid_step(&Rational::from_int(30)), 1);
        assert_eq!(grid_step(&Rational::from_int(60)), 2);
        assert_eq!(grid_step(&Rational::from_int(150)), 5);
        assert_eq!(grid_step(&Rational::from_int(300)), 10);
        assert_eq!(grid_step(&Rational::from_int(700)), 20);
    }
}
