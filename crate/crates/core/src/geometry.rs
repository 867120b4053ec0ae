//! Exact points, L1/L2 distances, bounding boxes, quadrants and embedding
//! verification.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::PreferenceProfile;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Point(pub Vec<Rational>);

impl Point {
    pub fn new(coords: Vec<Rational>) -> Self {
        Point(coords)
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Point(coords.iter().map(|&c| Rational::from_int(c)).collect())
    }

    pub fn origin(dim: usize) -> Self {
        Point(vec![Rational::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn x(&self) -> &Rational {
        &self.0[0]
    }

    pub fn y(&self) -> &Rational {
        &self.0[1]
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

fn same_dim(p: &Point, q: &Point) -> Result<()> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch(p.dim(), q.dim()));
    }
    Ok(())
}

/// L1 distance.
pub fn manhattan(p: &Point, q: &Point) -> Result<Rational> {
    same_dim(p, q)?;
    Ok(l1(p, q))
}

pub(crate) fn l1(p: &Point, q: &Point) -> Rational {
    p.0.iter().zip(&q.0).map(|(a, b)| (a - b).abs()).sum()
}

/// Squared L2 distance; comparing squares keeps L2 comparisons exact.
pub fn euclidean_sq(p: &Point, q: &Point) -> Result<Rational> {
    same_dim(p, q)?;
    Ok(l2_sq(p, q))
}

fn l2_sq(p: &Point, q: &Point) -> Rational {
    p.0.iter()
        .zip(&q.0)
        .map(|(a, b)| {
            let d = a - b;
            &d * &d
        })
        .sum()
}

/// Is `x` in the closed axis-parallel box spanned by `c1` and `c2`?
pub fn bounding_box_contains(c1: &Point, c2: &Point, x: &Point) -> Result<bool> {
    same_dim(c1, c2)?;
    same_dim(c1, x)?;
    Ok(in_box(c1, c2, x))
}

pub(crate) fn in_box(c1: &Point, c2: &Point, x: &Point) -> bool {
    c1.0.iter().zip(&c2.0).zip(&x.0).all(|((a, b), v)| {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        lo <= v && v <= hi
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quadrant {
    NE,
    SE,
    NW,
    SW,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [Quadrant::NE, Quadrant::SE, Quadrant::NW, Quadrant::SW];

    /// Signs `(sx, sy)` of the quadrant's directions.
    pub fn signs(self) -> (i64, i64) {
        match self {
            Quadrant::NE => (1, 1),
            Quadrant::SE => (1, -1),
            Quadrant::NW => (-1, 1),
            Quadrant::SW => (-1, -1),
        }
    }

    /// `sx * p[1] + sy * p[2]`: grows as `p` moves deeper into the quadrant.
    pub fn linear_form(self, p: &Point) -> Rational {
        let (sx, sy) = self.signs();
        let x = if sx > 0 { p.x().clone() } else { -p.x() };
        let y = if sy > 0 { p.y().clone() } else { -p.y() };
        x + y
    }
}

impl fmt::Display for Quadrant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Closed-quadrant membership of `x` relative to `anchor` (2D only).
pub fn quadrant_contains(anchor: &Point, q: Quadrant, x: &Point) -> Result<bool> {
    for p in [anchor, x] {
        if p.dim() != 2 {
            return Err(Error::WrongDimension { expected: 2, got: p.dim() });
        }
    }
    Ok(in_quadrant(anchor, q, x))
}

pub(crate) fn in_quadrant(anchor: &Point, q: Quadrant, x: &Point) -> bool {
    let (sx, sy) = q.signs();
    let ok = |s: i64, v: &Rational, a: &Rational| if s > 0 { v >= a } else { v <= a };
    ok(sx, x.x(), anchor.x()) && ok(sy, x.y(), anchor.y())
}

/// Positions of voters and alternatives in a common `d`-dimensional space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    dim: usize,
    voters: Vec<Point>,
    alts: Vec<Point>,
}

impl Embedding {
    pub fn new(voters: Vec<Point>, alts: Vec<Point>) -> Result<Self> {
        let dim = voters
            .first()
            .or_else(|| alts.first())
            .map(Point::dim)
            .ok_or_else(|| Error::InvalidParameter("empty embedding".into()))?;
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        for p in voters.iter().chain(&alts) {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch(dim, p.dim()));
            }
        }
        Ok(Embedding { dim, voters, alts })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn voters(&self) -> &[Point] {
        &self.voters
    }

    pub fn alts(&self) -> &[Point] {
        &self.alts
    }

    /// Position of voter `v` (1-based).
    pub fn voter(&self, v: usize) -> &Point {
        &self.voters[v - 1]
    }

    /// Position of alternative `a` (1-based).
    pub fn alt(&self, a: usize) -> &Point {
        &self.alts[a - 1]
    }

    /// Multiplies every coordinate by the lcm of all denominators, giving an
    /// integral embedding with the same preference structure.
    pub fn scaled_to_integers(&self) -> Embedding {
        use num_bigint::BigInt;
        use num_integer::Integer;
        let lcm = self
            .voters
            .iter()
            .chain(&self.alts)
            .flat_map(|p| p.0.iter())
            .fold(BigInt::from(1), |acc, c| acc.lcm(&c.denom()));
        let factor = Rational::from(lcm);
        let scale = |p: &Point| Point(p.0.iter().map(|c| c * &factor).collect());
        Embedding {
            dim: self.dim,
            voters: self.voters.iter().map(scale).collect(),
            alts: self.alts.iter().map(scale).collect(),
        }
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Embedding {
    /// Embedding text format: header `d n m`, then `n` voter lines and `m`
    /// alternative lines of `d` rationals each.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} {}", self.dim, self.voters.len(), self.alts.len())?;
        for p in self.voters.iter().chain(&self.alts) {
            let row: Vec<String> = p.0.iter().map(|c| c.to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

pub fn parse_embedding(text: &str) -> Result<Embedding> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (lineno, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
    let bad_header = || Error::Parse { line: lineno, msg: format!("expected header \"d n m\", got {header:?}") };
    let nums: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| bad_header()))
        .collect::<Result<_>>()?;
    let [d, n, m] = nums[..] else { return Err(bad_header()) };
    if d == 0 || n + m == 0 {
        return Err(bad_header());
    }
    let mut pts = Vec::with_capacity(n + m);
    for k in 0..n + m {
        let (lineno, line) = lines.next().ok_or(Error::Parse {
            line: 0,
            msg: format!("expected {} points, found {k}", n + m),
        })?;
        let coords = line
            .split_whitespace()
            .map(|t| {
                t.parse::<Rational>()
                    .map_err(|e| Error::Parse { line: lineno, msg: e.to_string() })
            })
            .collect::<Result<Vec<_>>>()?;
        if coords.len() != d {
            return Err(Error::Parse { line: lineno, msg: format!("expected {d} coordinates, got {}", coords.len()) });
        }
        pts.push(Point(coords));
    }
    if let Some((lineno, _)) = lines.next() {
        return Err(Error::Parse { line: lineno, msg: "trailing data".into() });
    }
    let alts = pts.split_off(n);
    Embedding::new(pts, alts)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    L1,
    L2,
}

impl Metric {
    /// A monotone proxy of the distance (L2 is squared).
    pub fn eval(self, p: &Point, q: &Point) -> Rational {
        match self {
            Metric::L1 => l1(p, q),
            Metric::L2 => l2_sq(p, q),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Consistent,
    /// `voter` prefers `preferred` to `other` but is not strictly closer to it.
    Violation { voter: usize, preferred: usize, other: usize },
}

impl Verdict {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Verdict::Consistent)
    }
}

fn check_shape(p: &PreferenceProfile, e: &Embedding) -> Result<()> {
    if e.voters.len() != p.n() || e.alts.len() != p.m() {
        return Err(Error::ShapeMismatch { n: p.n(), m: p.m(), got: (e.voters.len(), e.alts.len()) });
    }
    Ok(())
}

/// Checks that every voter is strictly closer to each alternative than to
/// the next one in their ranking. Ties are violations. The first failing
/// rank-adjacent pair, scanning voters in order, is reported.
pub fn verify_embedding(p: &PreferenceProfile, e: &Embedding, metric: Metric) -> Result<Verdict> {
    check_shape(p, e)?;
    for (v, order) in p.orders().iter().enumerate() {
        let vp = &e.voters[v];
        let mut prev: Option<(usize, Rational)> = None;
        for &a in order {
            let d = metric.eval(vp, &e.alts[a - 1]);
            if let Some((b, db)) = &prev {
                if *db >= d {
                    return Ok(Verdict::Violation { voter: v + 1, preferred: *b, other: a });
                }
            }
            prev = Some((a, d));
        }
    }
    Ok(Verdict::Consistent)
}

/// All voter-to-alternative distances, `[voter][alt]` (0-based), under `metric`.
pub fn distance_table(e: &Embedding, metric: Metric) -> Vec<Vec<Rational>> {
    e.voters
        .iter()
        .map(|v| e.alts.iter().map(|a| metric.eval(v, a)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    fn pt(c: &[i64]) -> Point {
        Point::from_ints(c)
    }

    #[test]
    fn distances() {
        assert_eq!(manhattan(&pt(&[-5, 0]), &pt(&[-3, 13])).unwrap(), Rational::from_int(15));
        assert_eq!(manhattan(&pt(&[0, 0]), &pt(&[3, -4])).unwrap(), Rational::from_int(7));
        assert_eq!(manhattan(&pt(&[2, 9]), &pt(&[2, 9])).unwrap(), Rational::zero());
        assert_eq!(euclidean_sq(&pt(&[0, 0]), &pt(&[3, 4])).unwrap(), Rational::from_int(25));
        assert_eq!(euclidean_sq(&pt(&[1, 1]), &pt(&[2, 3])).unwrap(), Rational::from_int(5));
        assert_eq!(euclidean_sq(&pt(&[7, 1]), &pt(&[7, 1])).unwrap(), Rational::zero());
        assert!(matches!(manhattan(&pt(&[0]), &pt(&[0, 0])), Err(Error::DimensionMismatch(1, 2))));
        assert!(euclidean_sq(&pt(&[0]), &pt(&[0, 0])).is_err());
    }

    #[test]
    fn boxes() {
        let (a, b) = (pt(&[0, 0]), pt(&[2, 2]));
        assert!(bounding_box_contains(&a, &b, &pt(&[1, 1])).unwrap());
        assert!(bounding_box_contains(&a, &b, &pt(&[0, 2])).unwrap());
        assert!(!bounding_box_contains(&a, &b, &pt(&[3, 1])).unwrap());
        assert!(bounding_box_contains(&b, &a, &pt(&[1, 1])).unwrap());
        assert!(bounding_box_contains(&a, &b, &pt(&[1])).is_err());
    }

    #[test]
    fn quadrants() {
        let o = pt(&[0, 0]);
        assert!(quadrant_contains(&o, Quadrant::NE, &pt(&[1, 2])).unwrap());
        for q in Quadrant::ALL {
            assert!(quadrant_contains(&o, q, &o).unwrap());
        }
        assert!(!quadrant_contains(&o, Quadrant::SW, &pt(&[1, -1])).unwrap());
        assert!(quadrant_contains(&o, Quadrant::SE, &pt(&[1, -1])).unwrap());
        assert!(matches!(
            quadrant_contains(&pt(&[0, 0, 0]), Quadrant::NE, &pt(&[1, 1, 1])),
            Err(Error::WrongDimension { expected: 2, got: 3 })
        ));
    }

    #[test]
    fn verifies_known_embeddings() {
        let v = verify_embedding(&fixtures::two_voters(), &fixtures::two_voters_embedding(), Metric::L1).unwrap();
        assert_eq!(v, Verdict::Consistent);
        let v = verify_embedding(&fixtures::all_rankings_of_three(), &fixtures::all_rankings_of_three_embedding(), Metric::L1).unwrap();
        assert_eq!(v, Verdict::Consistent);
    }

    #[test]
    fn ties_are_violations() {
        let p = crate::profile::parse_profile("2 2\n1 2\n2 1").unwrap();
        let z = pt(&[0, 0]);
        let e = Embedding::new(vec![z.clone(), z.clone()], vec![z.clone(), z]).unwrap();
        let v = verify_embedding(&p, &e, Metric::L1).unwrap();
        assert_eq!(v, Verdict::Violation { voter: 1, preferred: 1, other: 2 });
    }

    #[test]
    fn l2_can_disagree_with_l1() {
        // voter at origin; a=(3,0): L1 3, L2 9; b=(2,2): L1 4, L2 8
        let p = crate::profile::parse_profile("1 2\n1 2").unwrap();
        let e = Embedding::new(vec![pt(&[0, 0])], vec![pt(&[3, 0]), pt(&[2, 2])]).unwrap();
        assert!(verify_embedding(&p, &e, Metric::L1).unwrap().is_consistent());
        assert_eq!(
            verify_embedding(&p, &e, Metric::L2).unwrap(),
            Verdict::Violation { voter: 1, preferred: 1, other: 2 }
        );
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let e = fixtures::all_rankings_of_three_embedding();
        assert!(matches!(verify_embedding(&fixtures::two_voters(), &e, Metric::L1), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn embedding_text_round_trip() {
        let e = Embedding::new(
            vec![Point(vec![Rational::new(1, 2), Rational::from_int(-3)])],
            vec![Point(vec![Rational::new(-7, 3), Rational::zero()])],
        )
        .unwrap();
        let text = e.to_text();
        assert_eq!(text, "2 1 1\n1/2 -3\n-7/3 0\n");
        assert_eq!(parse_embedding(&text).unwrap(), e);
        assert!(parse_embedding("2 1 1\n1 2\n3").is_err());
        assert!(parse_embedding("2 1\n1 2").is_err());
    }

    #[test]
    fn integer_scaling() {
        let e = Embedding::new(
            vec![Point(vec![Rational::new(1, 2), Rational::new(1, 3)])],
            vec![Point(vec![Rational::from_int(1), Rational::new(-5, 6)])],
        )
        .unwrap();
        let s = e.scaled_to_integers();
        assert_eq!(s.voter(1), &pt(&[3, 2]));
        assert_eq!(s.alt(1), &pt(&[6, -5]));
    }

    fn small() -> impl Strategy<Value = Rational> {
        (-40i64..40, 1i64..5).prop_map(|(n, d)| Rational::new(n, d))
    }

    fn pt2() -> impl Strategy<Value = Point> {
        (small(), small()).prop_map(|(a, b)| Point(vec![a, b]))
    }

    proptest! {
        #[test]
        fn metric_axioms(p in pt2(), q in pt2(), r in pt2()) {
            let d = |a: &Point, b: &Point| manhattan(a, b).unwrap();
            prop_assert_eq!(d(&p, &q), d(&q, &p));
            prop_assert!(!d(&p, &q).is_negative());
            prop_assert_eq!(d(&p, &q).is_zero(), p == q);
            prop_assert!(d(&p, &r) <= d(&p, &q) + d(&q, &r));
            let e = |a: &Point, b: &Point| euclidean_sq(a, b).unwrap();
            prop_assert_eq!(e(&p, &q), e(&q, &p));
            prop_assert_eq!(e(&p, &q).is_zero(), p == q);
        }

        #[test]
        fn box_iff_distances_add_up(p in pt2(), q in pt2(), x in pt2()) {
            let d = |a: &Point, b: &Point| manhattan(a, b).unwrap();
            let inside = bounding_box_contains(&p, &q, &x).unwrap();
            prop_assert_eq!(inside, d(&p, &x) + d(&x, &q) == d(&p, &q));
        }

        #[test]
        fn quadrant_cover(a in pt2(), x in pt2()) {
            let count = Quadrant::ALL.iter().filter(|&&q| quadrant_contains(&a, q, &x).unwrap()).count();
            prop_assert!(count >= 1);
            let shares = a.x() == x.x() || a.y() == x.y();
            prop_assert_eq!(count >= 2, shares);
        }

        #[test]
        fn verify_matches_sorted_distances(voters in proptest::collection::vec(pt2(), 1..4),
                                           alts in proptest::collection::vec(pt2(), 1..5),
                                           seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let m = alts.len();
            let orders: Vec<Vec<usize>> = voters.iter().map(|_| {
                let mut o: Vec<usize> = (1..=m).collect();
                o.shuffle(&mut rng);
                o
            }).collect();
            let p = PreferenceProfile::new(m, orders).unwrap();
            let e = Embedding::new(voters, alts).unwrap();
            let consistent = verify_embedding(&p, &e, Metric::L1).unwrap().is_consistent();
            let table = distance_table(&e, Metric::L1);
            let oracle = (0..p.n()).all(|v| {
                let mut idx: Vec<usize> = (0..m).collect();
                idx.sort_by(|&a, &b| table[v][a].cmp(&table[v][b]));
                let distinct = idx.windows(2).all(|w| table[v][w[0]] != table[v][w[1]]);
                distinct && idx.iter().map(|a| a + 1).collect::<Vec<_>>() == p.orders()[v]
            });
            prop_assert_eq!(consistent, oracle);
        }
    }
}
