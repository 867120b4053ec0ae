//! Forbidden three-voter patterns and the quadrant conditions every planar
//! Manhattan embedding obeys.
//!
//! For three voters `u, v, w` placed in the plane, some voter lies in the
//! bounding box of the other two (the BE property) or the three form an
//! exterior staircase (the EX property). A BE configuration in the
//! preferences rules out the first placement for its middle voter and an EX
//! configuration rules out the second, so a profile with both patterns for
//! every choice of middle voter has no 2D Manhattan embedding.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{in_box, in_quadrant, Embedding, Quadrant};
use crate::profile::PreferenceProfile;

/// `u: b > x > a`, `v: a > x > b`, `w: b > x > a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BECertificate {
    pub voters: (usize, usize, usize),
    pub a: usize,
    pub b: usize,
    pub x: usize,
}

/// `u: a > x > b, c > x, d > x`; `v: a, b > x > d, e`;
/// `w: b > x > a, c > x, e > x`. `c, d, e` need not be distinct.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EXCertificate {
    pub voters: (usize, usize, usize),
    pub x: usize,
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
    pub e: usize,
}

fn distinct3(p: &PreferenceProfile, v: usize, u: usize, w: usize) -> Result<()> {
    for i in [v, u, w] {
        if i == 0 || i > p.n() {
            return Err(Error::IndexOutOfRange { what: "voter", index: i, max: p.n() });
        }
    }
    if v == u || v == w || u == w {
        return Err(Error::NotDistinct(vec![v, u, w]));
    }
    Ok(())
}

impl BECertificate {
    /// Re-checks the six defining preference relations.
    pub fn holds_in(&self, p: &PreferenceProfile) -> bool {
        let (v, u, w) = self.voters;
        let (a, b, x) = (self.a, self.b, self.x);
        p.prefers(u, b, x) && p.prefers(u, x, a)
            && p.prefers(v, a, x) && p.prefers(v, x, b)
            && p.prefers(w, b, x) && p.prefers(w, x, a)
    }
}

impl EXCertificate {
    pub fn holds_in(&self, p: &PreferenceProfile) -> bool {
        let (v, u, w) = self.voters;
        let EXCertificate { x, a, b, c, d, e, .. } = *self;
        let pr = |i, s, t| p.prefers(i, s, t);
        pr(u, a, x) && pr(u, x, b) && pr(u, c, x) && pr(u, d, x)
            && pr(v, a, x) && pr(v, b, x) && pr(v, x, d) && pr(v, x, e)
            && pr(w, b, x) && pr(w, x, a) && pr(w, c, x) && pr(w, e, x)
    }
}

/// First `(a, b, x)` in lexicographic order forming a `(v, u, w)`-BE
/// configuration. Voters are 1-based.
pub fn find_be(p: &PreferenceProfile, v: usize, u: usize, w: usize) -> Result<Option<BECertificate>> {
    distinct3(p, v, u, w)?;
    let m = p.m();
    for a in 1..=m {
        for b in 1..=m {
            if b == a || !p.prefers(v, a, b) || !p.prefers(u, b, a) || !p.prefers(w, b, a) {
                continue;
            }
            for x in 1..=m {
                if x == a || x == b {
                    continue;
                }
                let cert = BECertificate { voters: (v, u, w), a, b, x };
                if cert.holds_in(p) {
                    return Ok(Some(cert));
                }
            }
        }
    }
    Ok(None)
}

/// First `(x, a, b, c, d, e)` in lexicographic order forming a `(v, u, w)`-EX
/// configuration.
pub fn find_ex(p: &PreferenceProfile, v: usize, u: usize, w: usize) -> Result<Option<EXCertificate>> {
    distinct3(p, v, u, w)?;
    let m = p.m();
    let alts = || 1..=m;
    for x in alts() {
        // each role only constrains its own alternative relative to x
        let a = alts().find(|&a| p.prefers(u, a, x) && p.prefers(v, a, x) && p.prefers(w, x, a));
        let b = alts().find(|&b| p.prefers(u, x, b) && p.prefers(v, b, x) && p.prefers(w, b, x));
        let c = alts().find(|&c| p.prefers(u, c, x) && p.prefers(w, c, x));
        let d = alts().find(|&d| p.prefers(u, d, x) && p.prefers(v, x, d));
        let e = alts().find(|&e| p.prefers(v, x, e) && p.prefers(w, e, x));
        if let (Some(a), Some(b), Some(c), Some(d), Some(e)) = (a, b, c, d, e) {
            return Ok(Some(EXCertificate { voters: (v, u, w), x, a, b, c, d, e }));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ThreeVoterVerdict {
    /// For each voter of the triple, in triple order, a BE and an EX
    /// certificate with that voter in the middle role.
    Obstruction { be: Vec<BECertificate>, ex: Vec<EXCertificate> },
    /// Not a feasibility claim.
    Inconclusive,
}

impl ThreeVoterVerdict {
    pub fn is_obstruction(&self) -> bool {
        matches!(self, ThreeVoterVerdict::Obstruction { .. })
    }
}

/// Reports an obstruction when every voter of `triple` is the middle voter of
/// both a BE and an EX configuration (the other two in either order).
pub fn three_voter_obstruction(p: &PreferenceProfile, triple: [usize; 3]) -> Result<ThreeVoterVerdict> {
    let [i, j, k] = triple;
    distinct3(p, i, j, k)?;
    let mut be = Vec::with_capacity(3);
    let mut ex = Vec::with_capacity(3);
    for (v, u, w) in [(i, j, k), (j, i, k), (k, i, j)] {
        let Some(b) = find_be(p, v, u, w)?.or(find_be(p, v, w, u)?) else {
            return Ok(ThreeVoterVerdict::Inconclusive);
        };
        let Some(e) = find_ex(p, v, u, w)?.or(find_ex(p, v, w, u)?) else {
            return Ok(ThreeVoterVerdict::Inconclusive);
        };
        be.push(b);
        ex.push(e);
    }
    Ok(ThreeVoterVerdict::Obstruction { be, ex })
}

/// Every certificate found over all ordered voter triples.
pub fn all_certificates(p: &PreferenceProfile) -> Vec<Certificate> {
    let mut out = Vec::new();
    let n = p.n();
    for v in 1..=n {
        for u in 1..=n {
            for w in 1..=n {
                if v == u || v == w || u == w {
                    continue;
                }
                if let Ok(Some(c)) = find_be(p, v, u, w) {
                    out.push(Certificate::from(c));
                }
                if let Ok(Some(c)) = find_ex(p, v, u, w) {
                    out.push(Certificate::from(c));
                }
            }
        }
    }
    out
}

/// Flat JSON form `{kind, voters, alts}` of a certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: String,
    pub voters: Vec<usize>,
    pub alts: Vec<usize>,
}

impl From<BECertificate> for Certificate {
    fn from(c: BECertificate) -> Self {
        Certificate { kind: "BE".into(), voters: vec![c.voters.0, c.voters.1, c.voters.2], alts: vec![c.a, c.b, c.x] }
    }
}

impl From<EXCertificate> for Certificate {
    fn from(c: EXCertificate) -> Self {
        Certificate {
            kind: "EX".into(),
            voters: vec![c.voters.0, c.voters.1, c.voters.2],
            alts: vec![c.x, c.a, c.b, c.c, c.d, c.e],
        }
    }
}

/// A necessary condition of planar Manhattan embeddings that `e` breaks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NecessaryViolation {
    /// `r, s: y > x` yet `x` lies in the box of `r` and `s`.
    AlternativeInsideBox { r: usize, s: usize, x: usize, y: usize },
    /// `r: x > y`, `s: y > x` yet `s` lies in the box of `r` and `x`.
    VoterInsideBox { r: usize, s: usize, x: usize, y: usize },
    /// `s: x > y` and `y` in quadrant `q` of `s`, yet `y` is not strictly
    /// deeper in that quadrant's direction than `x`.
    QuadrantOrder { s: usize, x: usize, y: usize, quadrant: Quadrant },
}

/// Scans the two-voter box conditions and the per-voter quadrant conditions;
/// returns the first violated one. Any embedding that passes L1 verification
/// passes this scan.
pub fn quadrant_necessary_violation(p: &PreferenceProfile, e: &Embedding) -> Result<Option<NecessaryViolation>> {
    if e.dim() != 2 {
        return Err(Error::WrongDimension { expected: 2, got: e.dim() });
    }
    if e.voters().len() != p.n() || e.alts().len() != p.m() {
        return Err(Error::ShapeMismatch { n: p.n(), m: p.m(), got: (e.voters().len(), e.alts().len()) });
    }
    let (n, m) = (p.n(), p.m());
    for r in 1..=n {
        for s in r + 1..=n {
            for x in 1..=m {
                for y in 1..=m {
                    if x != y && p.prefers(r, y, x) && p.prefers(s, y, x) && in_box(e.voter(r), e.voter(s), e.alt(x)) {
                        return Ok(Some(NecessaryViolation::AlternativeInsideBox { r, s, x, y }));
                    }
                }
            }
        }
    }
    for r in 1..=n {
        for s in 1..=n {
            if r == s {
                continue;
            }
            for x in 1..=m {
                for y in 1..=m {
                    if x != y && p.prefers(r, x, y) && p.prefers(s, y, x) && in_box(e.voter(r), e.alt(x), e.voter(s)) {
                        return Ok(Some(NecessaryViolation::VoterInsideBox { r, s, x, y }));
                    }
                }
            }
        }
    }
    for s in 1..=n {
        for x in 1..=m {
            for y in 1..=m {
                if x == y || !p.prefers(s, x, y) {
                    continue;
                }
                for q in Quadrant::ALL {
                    if in_quadrant(e.voter(s), q, e.alt(y)) && q.linear_form(e.alt(y)) <= q.linear_form(e.alt(x)) {
                        return Ok(Some(NecessaryViolation::QuadrantOrder { s, x, y, quadrant: q }));
                    }
                }
            }
        }
    }
    Ok(None)
}
