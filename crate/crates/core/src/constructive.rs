//! Explicit Manhattan embeddings in high dimension: one axis per voter, or one
//! axis per alternative but one.

use crate::error::{Error, Result};
use crate::geometry::{Embedding, Point};
use crate::profile::PreferenceProfile;
use crate::rational::Rational;

/// Offset constant of the voter-axis construction; must be at least `n * m`
/// so that every alternative's coordinate on its max-rank voter's axis is
/// nonnegative.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NDimParameters {
    offset: usize,
}

impl NDimParameters {
    pub fn default_for(p: &PreferenceProfile) -> Self {
        NDimParameters { offset: p.n() * p.m() }
    }

    pub fn with_offset(p: &PreferenceProfile, offset: usize) -> Result<Self> {
        let min = p.n() * p.m();
        if offset < min {
            return Err(Error::InvalidParameter(format!("offset {offset} below n*m = {min}")));
        }
        Ok(NDimParameters { offset })
    }

    pub fn offset(&self) -> usize {
        self.offset
    }
}

/// Embeds `p` in `n` dimensions. Voter `i` sits at `-m` on axis `i`. Every
/// voter-alternative distance equals `m + M + 2 * rk_i(j)`.
pub fn embed_n_dim(p: &PreferenceProfile) -> Embedding {
    embed_n_dim_with(p, NDimParameters::default_for(p))
}

pub fn embed_n_dim_with(p: &PreferenceProfile, params: NDimParameters) -> Embedding {
    let (n, m) = (p.n(), p.m());
    let m_i = m as i64;
    let offset = params.offset as i64;
    let voters = (0..n)
        .map(|i| {
            let mut c = vec![0i64; n];
            c[i] = -m_i;
            Point::from_ints(&c)
        })
        .collect();
    let alts = (1..=m)
        .map(|j| {
            let (mk, top) = p.max_rank_info(j).expect("alternative in range");
            let mk = mk as i64;
            let rk = |z: usize| p.rank0(z, j - 1) as i64;
            let deficit: i64 = (0..n).map(|k| rk(k) - mk).sum();
            let c: Vec<i64> = (0..n)
                .map(|z| if z + 1 == top { offset + 2 * rk(z) + deficit } else { rk(z) - mk })
                .collect();
            Point::from_ints(&c)
        })
        .collect();
    Embedding::new(voters, alts).expect("construction has uniform dimension")
}

/// Embeds `p` (with `m >= 2`) in `m - 1` dimensions, the highest-numbered
/// alternative at the origin.
pub fn embed_m_dim(p: &PreferenceProfile) -> Result<Embedding> {
    embed_m_dim_with_origin(p, p.m())
}

/// As [`embed_m_dim`] with `origin` (1-based) placed at the origin. The other
/// alternatives take axes `1..=m-1` in increasing id order, each at `2k` on
/// its own axis where `k = m - 1`. A voter's coordinate on alternative `j`'s
/// axis is `2k - rk(j)` when `j` beats the origin alternative, `k - rk(j)`
/// otherwise.
pub fn embed_m_dim_with_origin(p: &PreferenceProfile, origin: usize) -> Result<Embedding> {
    let m = p.m();
    if m < 2 {
        return Err(Error::InvalidParameter("m-1 dimensional construction needs m >= 2".into()));
    }
    if origin == 0 || origin > m {
        return Err(Error::IndexOutOfRange { what: "alternative", index: origin, max: m });
    }
    let k = m - 1;
    let axis_alts: Vec<usize> = (1..=m).filter(|&a| a != origin).collect();
    let two_k = 2 * k as i64;
    let mut alts = vec![Point::origin(k); m];
    for (axis, &a) in axis_alts.iter().enumerate() {
        let mut c = vec![0i64; k];
        c[axis] = two_k;
        alts[a - 1] = Point::from_ints(&c);
    }
    let voters = (0..p.n())
        .map(|v| {
            let rk_origin = p.rank0(v, origin - 1);
            let c: Vec<i64> = axis_alts
                .iter()
                .map(|&a| {
                    let rk = p.rank0(v, a - 1);
                    if rk < rk_origin {
                        two_k - rk as i64
                    } else {
                        k as i64 - rk as i64
                    }
                })
                .collect();
            Point::from_ints(&c)
        })
        .collect();
    Embedding::new(voters, alts)
}

/// `||v||_1 + 2 (k - v[axis])`: the closed form of a voter's distance to the
/// alternative on `axis` in the m-1 dimensional construction.
pub fn m_dim_distance_closed_form(voter: &Point, axis: usize) -> Rational {
    let k = Rational::from(voter.dim());
    let norm: Rational = voter.coords().iter().map(|c| c.abs()).sum();
    let two = Rational::from_int(2);
    norm + two * (k - &voter.coords()[axis])
}
