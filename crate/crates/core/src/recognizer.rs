//! Exact recognition of 2-Manhattan profiles.
//!
//! An embedding is linear once the sign of every voter-alternative coordinate
//! difference is fixed. The search branches on those signs depth-first and
//! prunes with an LP relaxation that is valid for every completion of the
//! current partial assignment:
//!
//! * a voter's distance to an alternative whose two signs are fixed is a
//!   linear form `L`;
//! * between consecutive fixed ranks `s < t` of a voter, `L_t >= L_s + (t - s)`;
//! * an alternative at an unfixed rank `q` below a fixed rank `t` has
//!   distance at least every form `+-dx +-dy`, so `L_t >= form + (t - q)`.
//!
//! Voter 1 is pinned at the origin and its favourite alternative to the
//! sector `x >= y >= 0`; together with the unit margin this loses nothing, as
//! translations, the eight symmetries of the L1 plane and scaling preserve
//! every preference. The favourite alternative of each voter is never
//! branched on; at a leaf its signs are read off the relaxation witness and
//! the full system is solved again from scratch.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{verify_embedding, Embedding, Metric, Point};
use crate::lp::{solve_feasibility, FarkasOutcome, FarkasSolver, FeasibilityResult, LinearConstraint, LinearSystem};
use crate::obstructions::{three_voter_obstruction, ThreeVoterVerdict};
use crate::profile::PreferenceProfile;
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    /// `voter - alternative >= 0` on the axis.
    NonNeg,
    /// `alternative - voter >= 0` on the axis.
    NonPos,
}

impl Sign {
    fn factor(self) -> i64 {
        match self {
            Sign::NonNeg => 1,
            Sign::NonPos => -1,
        }
    }

    fn of(diff: &Rational) -> Sign {
        if diff.is_negative() {
            Sign::NonPos
        } else {
            Sign::NonNeg
        }
    }
}

/// Per (voter, alternative, axis) sign of `E(v)[k] - E(a)[k]`, or undecided.
/// Voters and alternatives are 1-based, axes are 1 and 2.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignAssignment {
    n: usize,
    m: usize,
    signs: Vec<Option<Sign>>,
}

impl SignAssignment {
    pub fn undecided(n: usize, m: usize) -> Self {
        SignAssignment { n, m, signs: vec![None; 2 * n * m] }
    }

    /// The signs realised by a 2D embedding (zero differences count as
    /// nonneg).
    pub fn from_embedding(e: &Embedding) -> Result<Self> {
        if e.dim() != 2 {
            return Err(Error::WrongDimension { expected: 2, got: e.dim() });
        }
        let (n, m) = (e.voters().len(), e.alts().len());
        let mut s = SignAssignment::undecided(n, m);
        for (i, v) in e.voters().iter().enumerate() {
            for (j, a) in e.alts().iter().enumerate() {
                for k in 0..2 {
                    s.signs[idx(m, i, j, k)] = Some(Sign::of(&(&v.0[k] - &a.0[k])));
                }
            }
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    fn check(&self, voter: usize, alt: usize, axis: usize) -> Result<usize> {
        if voter == 0 || voter > self.n {
            return Err(Error::IndexOutOfRange { what: "voter", index: voter, max: self.n });
        }
        if alt == 0 || alt > self.m {
            return Err(Error::IndexOutOfRange { what: "alternative", index: alt, max: self.m });
        }
        if axis == 0 || axis > 2 {
            return Err(Error::IndexOutOfRange { what: "axis", index: axis, max: 2 });
        }
        Ok(idx(self.m, voter - 1, alt - 1, axis - 1))
    }

    pub fn get(&self, voter: usize, alt: usize, axis: usize) -> Result<Option<Sign>> {
        Ok(self.signs[self.check(voter, alt, axis)?])
    }

    pub fn set(&mut self, voter: usize, alt: usize, axis: usize, sign: Option<Sign>) -> Result<()> {
        let i = self.check(voter, alt, axis)?;
        self.signs[i] = sign;
        Ok(())
    }

    pub fn is_complete(&self) -> bool {
        self.signs.iter().all(Option::is_some)
    }
}

fn idx(m: usize, v0: usize, a0: usize, k: usize) -> usize {
    (v0 * m + a0) * 2 + k
}

/// Sorts terms by variable, merges duplicates and drops zeros.
fn normalize(mut terms: Vec<(usize, i64)>) -> Vec<(usize, Rational)> {
    terms.sort_unstable_by_key(|t| t.0);
    let mut out: Vec<(usize, i64)> = Vec::with_capacity(terms.len());
    for (v, c) in terms {
        match out.last_mut() {
            Some(last) if last.0 == v => last.1 += c,
            _ => out.push((v, c)),
        }
    }
    out.into_iter().filter(|t| t.1 != 0).map(|(v, c)| (v, Rational::from_int(c))).collect()
}

// Variable layout of the full system: voter i at 2i, 2i+1; alternative j at
// 2n + 2j, 2n + 2j + 1 (all 0-based).
fn full_voter(i: usize, k: usize) -> usize {
    2 * i + k
}

fn full_alt(n: usize, j: usize, k: usize) -> usize {
    2 * n + 2 * j + k
}

/// The linear system of `p` under the fully decided signs `s`: rank-adjacent
/// unit margins, one row per decided sign, voter 1 at the origin and voter
/// 1's favourite alternative in the sector `x >= y >= 0`.
pub fn build_system(p: &PreferenceProfile, s: &SignAssignment) -> Result<LinearSystem> {
    let (n, m) = (p.n(), p.m());
    if s.n != n || s.m != m {
        return Err(Error::ShapeMismatch { n, m, got: (s.n, s.m) });
    }
    let mut sys = LinearSystem::new(2 * n + 2 * m);
    let sign = |i: usize, j: usize, k: usize| {
        s.signs[idx(m, i, j, k)].ok_or(Error::UndecidedSign { voter: i + 1, alt: j + 1, axis: k + 1 })
    };
    // signed distance form of voter i to alternative j, times `scale`
    let dist = |i: usize, j: usize, scale: i64, terms: &mut Vec<(usize, i64)>| -> Result<()> {
        for k in 0..2 {
            let f = sign(i, j, k)?.factor() * scale;
            terms.push((full_voter(i, k), f));
            terms.push((full_alt(n, j, k), -f));
        }
        Ok(())
    };
    for i in 0..n {
        for r in 0..m.saturating_sub(1) {
            let (a, b) = (p.alt_at0(i, r), p.alt_at0(i, r + 1));
            let mut terms = Vec::with_capacity(8);
            dist(i, b, 1, &mut terms)?;
            dist(i, a, -1, &mut terms)?;
            sys.push(LinearConstraint::ge(normalize(terms), Rational::one()));
        }
    }
    for i in 0..n {
        for j in 0..m {
            for k in 0..2 {
                if let Some(sg) = s.signs[idx(m, i, j, k)] {
                    let f = sg.factor();
                    let terms = vec![(full_voter(i, k), f), (full_alt(n, j, k), -f)];
                    sys.push(LinearConstraint::ge(normalize(terms), Rational::zero()));
                }
            }
        }
    }
    for k in 0..2 {
        sys.push(LinearConstraint::eq(vec![(full_voter(0, k), Rational::one())], Rational::zero()));
    }
    let top = p.alt_at0(0, 0);
    sys.push(LinearConstraint::ge(normalize(vec![(full_alt(n, top, 0), 1), (full_alt(n, top, 1), -1)]), Rational::zero()));
    sys.push(LinearConstraint::ge(vec![(full_alt(n, top, 1), Rational::one())], Rational::zero()));
    Ok(sys)
}

/// Reads an embedding of `p` off a feasible point of [`build_system`],
/// scales it to integer coordinates and re-verifies it.
pub fn extract_witness(p: &PreferenceProfile, x: &[Rational]) -> Result<Embedding> {
    let (n, m) = (p.n(), p.m());
    if x.len() != 2 * n + 2 * m {
        return Err(Error::InvalidParameter(format!("witness has {} values, expected {}", x.len(), 2 * n + 2 * m)));
    }
    let pt = |base: usize| Point::new(vec![x[base].clone(), x[base + 1].clone()]);
    let voters = (0..n).map(|i| pt(full_voter(i, 0))).collect();
    let alts = (0..m).map(|j| pt(full_alt(n, j, 0))).collect();
    let e = Embedding::new(voters, alts)?;
    let verdict = verify_embedding(p, &e, Metric::L1)?;
    if !verdict.is_consistent() {
        return Err(Error::Verification(format!("linearized witness rejected: {verdict:?}")));
    }
    let scaled = e.scaled_to_integers();
    if !verify_embedding(p, &scaled, Metric::L1)?.is_consistent() {
        return Err(Error::Verification("integer scaling broke the witness".into()));
    }
    Ok(scaled)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecognizerConfig {
    /// Maximum number of search nodes; `None` searches to completion.
    pub budget: Option<u64>,
    /// Try the BE/EX obstruction before searching when there are 3 voters.
    pub obstruction_fast_path: bool,
}

impl Default for RecognizerConfig {
    fn default() -> Self {
        RecognizerConfig { budget: None, obstruction_fast_path: true }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub prunes: u64,
    pub pivots: u64,
    pub millis: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RecognitionVerdict {
    Feasible(Embedding),
    /// The sign tree was exhausted, or an obstruction was found.
    Infeasible,
    /// The node budget ran out.
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecognitionOutcome {
    pub verdict: RecognitionVerdict,
    pub stats: SearchStats,
    pub fast_certificate: Option<ThreeVoterVerdict>,
}

impl RecognitionOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self.verdict, RecognitionVerdict::Feasible(_))
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self.verdict, RecognitionVerdict::Infeasible)
    }

    pub fn is_undecided(&self) -> bool {
        matches!(self.verdict, RecognitionVerdict::Undecided)
    }

    pub fn witness(&self) -> Option<&Embedding> {
        match &self.verdict {
            RecognitionVerdict::Feasible(e) => Some(e),
            _ => None,
        }
    }

    /// `"feasible"`, `"infeasible"` or `"undecided"`.
    pub fn label(&self) -> &'static str {
        match self.verdict {
            RecognitionVerdict::Feasible(_) => "feasible",
            RecognitionVerdict::Infeasible => "infeasible",
            RecognitionVerdict::Undecided => "undecided",
        }
    }
}

/// Decides whether `p` is 2-Manhattan, searching at most `budget` nodes.
pub fn recognize_2d(p: &PreferenceProfile, budget: Option<u64>) -> Result<RecognitionOutcome> {
    recognize_2d_with(p, &RecognizerConfig { budget, ..RecognizerConfig::default() })
}

pub fn recognize_2d_with(p: &PreferenceProfile, config: &RecognizerConfig) -> Result<RecognitionOutcome> {
    let start = Instant::now();
    if p.n() == 0 || p.m() == 0 {
        return Err(Error::InvalidParameter("need at least one voter and one alternative".into()));
    }
    if config.obstruction_fast_path && p.n() == 3 {
        let v = three_voter_obstruction(p, [1, 2, 3])?;
        if v.is_obstruction() {
            return Ok(RecognitionOutcome {
                verdict: RecognitionVerdict::Infeasible,
                stats: SearchStats { millis: start.elapsed().as_millis() as u64, ..SearchStats::default() },
                fast_certificate: Some(v),
            });
        }
    }
    let mut search = Search { p, n: p.n(), m: p.m(), budget: config.budget, stats: SearchStats::default(), exhausted: false };
    let root = search.root();
    let leaf = search.dfs(root);
    let verdict = match leaf {
        Some((signs, z)) => RecognitionVerdict::Feasible(search.finish(signs, &z)?),
        None if search.exhausted => RecognitionVerdict::Undecided,
        None => RecognitionVerdict::Infeasible,
    };
    search.stats.millis = start.elapsed().as_millis() as u64;
    Ok(RecognitionOutcome { verdict, stats: search.stats, fast_certificate: None })
}

#[derive(Clone)]
struct Node {
    signs: Vec<Option<Sign>>,
    // per voter, per rank: are both axes decided?
    decided: Vec<Vec<bool>>,
    solver: FarkasSolver,
}

struct Search<'a> {
    p: &'a PreferenceProfile,
    n: usize,
    m: usize,
    budget: Option<u64>,
    stats: SearchStats,
    exhausted: bool,
}

impl Search<'_> {
    // Relaxation variables: voter 1 is eliminated (it sits at the origin).
    fn voter_var(&self, i: usize, k: usize) -> Option<usize> {
        (i > 0).then(|| 2 * (i - 1) + k)
    }

    fn alt_var(&self, j: usize, k: usize) -> usize {
        2 * (self.n - 1) + 2 * j + k
    }

    /// Adds `scale * (V_i[k] - A_j[k])`.
    fn push_delta(&self, i: usize, j: usize, k: usize, scale: i64, terms: &mut Vec<(usize, i64)>) {
        if let Some(v) = self.voter_var(i, k) {
            terms.push((v, scale));
        }
        terms.push((self.alt_var(j, k), -scale));
    }

    fn linear_dist(&self, node: &Node, i: usize, r: usize, scale: i64, terms: &mut Vec<(usize, i64)>) {
        let j = self.p.alt_at0(i, r);
        for k in 0..2 {
            let f = node.signs[idx(self.m, i, j, k)].expect("decided pair").factor();
            self.push_delta(i, j, k, f * scale, terms);
        }
    }

    fn add_row(node: &mut Node, terms: Vec<(usize, i64)>, rhs: i64) {
        node.solver.add_ge(&normalize(terms), &Rational::from_int(rhs));
    }

    fn root(&self) -> Node {
        let num_vars = 2 * (self.n - 1) + 2 * self.m;
        let mut node = Node {
            signs: vec![None; 2 * self.n * self.m],
            decided: vec![vec![false; self.m]; self.n],
            solver: FarkasSolver::new(num_vars),
        };
        let top = self.p.alt_at0(0, 0);
        Self::add_row(&mut node, vec![(self.alt_var(top, 0), 1), (self.alt_var(top, 1), -1)], 0);
        Self::add_row(&mut node, vec![(self.alt_var(top, 1), 1)], 0);
        node
    }

    fn dfs(&mut self, mut node: Node) -> Option<(Vec<Option<Sign>>, Vec<Rational>)> {
        if self.budget.is_some_and(|b| self.stats.nodes >= b) {
            self.exhausted = true;
            return None;
        }
        self.stats.nodes += 1;
        let before = node.solver.pivots();
        let outcome = node.solver.solve();
        self.stats.pivots += node.solver.pivots() - before;
        let z = match outcome {
            FarkasOutcome::Infeasible(y) => {
                assert!(node.solver.certifies(&y), "relaxation certificate fails re-check");
                self.stats.prunes += 1;
                return None;
            }
            FarkasOutcome::Feasible(z) => {
                debug_assert!(node.solver.satisfied_by(&z));
                z
            }
        };
        let Some((i, r, k)) = self.choose(&node) else {
            return Some((node.signs, z));
        };
        let j = self.p.alt_at0(i, r);
        let mut diff = Rational::zero();
        if let Some(v) = self.voter_var(i, k) {
            diff += &z[v];
        }
        diff -= &z[self.alt_var(j, k)];
        let first = Sign::of(&diff);
        let second = if first == Sign::NonNeg { Sign::NonPos } else { Sign::NonNeg };
        let mut child = node.clone();
        self.decide(&mut child, i, r, k, first);
        if let Some(found) = self.dfs(child) {
            return Some(found);
        }
        if self.exhausted {
            return None;
        }
        self.decide(&mut node, i, r, k, second);
        self.dfs(node)
    }

    /// Nearest fully decided ranks of voter `i` below and above `r`
    /// (rank 0 never counts).
    fn neighbours(&self, node: &Node, i: usize, r: usize) -> (Option<usize>, Option<usize>) {
        let d = &node.decided[i];
        let below = (1..r).rev().find(|&q| d[q]);
        let above = (r + 1..self.m).find(|&q| d[q]);
        (below, above)
    }

    /// Rows that deciding pair `(i, r)` would emit.
    fn emission(&self, node: &Node, i: usize, r: usize) -> usize {
        let (below, above) = self.neighbours(node, i, r);
        let lo = below.map_or(0, |s| s + 1);
        let open = (lo..r).filter(|&q| !node.decided[i][q]).count();
        open + below.is_some() as usize + above.is_some() as usize
    }

    fn choose(&self, node: &Node) -> Option<(usize, usize, usize)> {
        let mut best: Option<((usize, bool), (usize, usize, usize))> = None;
        for i in 0..self.n {
            for r in 1..self.m {
                if node.decided[i][r] {
                    continue;
                }
                let j = self.p.alt_at0(i, r);
                let s = [node.signs[idx(self.m, i, j, 0)], node.signs[idx(self.m, i, j, 1)]];
                let half = s[0].is_some() || s[1].is_some();
                let k = if s[0].is_none() { 0 } else { 1 };
                let key = (self.emission(node, i, r), half);
                // lowest (voter, alternative, axis) wins ties
                let better = match &best {
                    None => true,
                    Some((bk, (bi, bj, bk_axis))) => {
                        key > *bk || (key == *bk && (i, j, k) < (*bi, self.p.alt_at0(*bi, *bj), *bk_axis))
                    }
                };
                if better {
                    best = Some((key, (i, r, k)));
                }
            }
        }
        best.map(|(_, c)| c)
    }

    fn decide(&self, node: &mut Node, i: usize, r: usize, k: usize, sign: Sign) {
        let m = self.m;
        let j = self.p.alt_at0(i, r);
        node.signs[idx(m, i, j, k)] = Some(sign);
        let mut row = Vec::with_capacity(2);
        self.push_delta(i, j, k, sign.factor(), &mut row);
        Self::add_row(node, row, 0);
        if node.signs[idx(m, i, j, 1 - k)].is_none() {
            return;
        }
        let (below, above) = self.neighbours(node, i, r);
        if let Some(s) = below {
            let mut row = Vec::with_capacity(8);
            self.linear_dist(node, i, r, 1, &mut row);
            self.linear_dist(node, i, s, -1, &mut row);
            Self::add_row(node, row, (r - s) as i64);
        }
        if let Some(t) = above {
            let mut row = Vec::with_capacity(8);
            self.linear_dist(node, i, t, 1, &mut row);
            self.linear_dist(node, i, r, -1, &mut row);
            Self::add_row(node, row, (t - r) as i64);
        }
        let lo = below.map_or(0, |s| s + 1);
        for q in lo..r {
            if node.decided[i][q] {
                continue;
            }
            let jq = self.p.alt_at0(i, q);
            let fixed = [node.signs[idx(m, i, jq, 0)], node.signs[idx(m, i, jq, 1)]];
            for sx in [1i64, -1] {
                for sy in [1i64, -1] {
                    let consistent = |f: Option<Sign>, s: i64| f.map_or(true, |f| f.factor() == s);
                    if !consistent(fixed[0], sx) || !consistent(fixed[1], sy) {
                        continue;
                    }
                    let mut row = Vec::with_capacity(8);
                    self.linear_dist(node, i, r, 1, &mut row);
                    self.push_delta(i, jq, 0, -sx, &mut row);
                    self.push_delta(i, jq, 1, -sy, &mut row);
                    Self::add_row(node, row, (r - q) as i64);
                }
            }
        }
        node.decided[i][r] = true;
    }

    /// Completes the favourite-alternative signs from the relaxation point and
    /// solves the exact system.
    fn finish(&self, mut signs: Vec<Option<Sign>>, z: &[Rational]) -> Result<Embedding> {
        for i in 0..self.n {
            let j = self.p.alt_at0(i, 0);
            for k in 0..2 {
                let slot = &mut signs[idx(self.m, i, j, k)];
                if slot.is_none() {
                    let mut diff = -&z[self.alt_var(j, k)];
                    if let Some(v) = self.voter_var(i, k) {
                        diff += &z[v];
                    }
                    *slot = Some(Sign::of(&diff));
                }
            }
        }
        let s = SignAssignment { n: self.n, m: self.m, signs };
        let sys = build_system(self.p, &s)?;
        match solve_feasibility(&sys) {
            FeasibilityResult::Feasible { witness } => extract_witness(self.p, &witness),
            FeasibilityResult::Infeasible { .. } => {
                Err(Error::Verification("exact leaf system infeasible after feasible relaxation".into()))
            }
        }
    }
}
