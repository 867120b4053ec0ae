//! Preference profiles: strict rankings of alternatives `1..=m` by voters
//! `1..=n`, the tie-group pattern notation, and canonical enumeration.
//!
//! Voters and alternatives are 1-based in the public API. Ranks are 0-based:
//! the rank of an alternative is the number of alternatives the voter strictly
//! prefers to it.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

pub type Rank = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PreferenceProfile {
    m: usize,
    orders: Vec<Vec<usize>>,
    // ranks[v][a - 1], v 0-based
    ranks: Vec<Vec<Rank>>,
}

impl PreferenceProfile {
    /// Builds a profile from rankings listed most- to least-preferred.
    pub fn new(m: usize, orders: Vec<Vec<usize>>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("profile needs at least one alternative".into()));
        }
        if orders.is_empty() {
            return Err(Error::InvalidParameter("profile needs at least one voter".into()));
        }
        let mut ranks = Vec::with_capacity(orders.len());
        for (row, order) in orders.iter().enumerate() {
            let row = row + 1;
            if order.len() != m {
                return Err(Error::NotPermutation { row, m });
            }
            let mut rk = vec![usize::MAX; m];
            for (pos, &a) in order.iter().enumerate() {
                if a == 0 || a > m {
                    return Err(Error::AlternativeOutOfRange { row, alt: a as i64, m });
                }
                if rk[a - 1] != usize::MAX {
                    return Err(Error::NotPermutation { row, m });
                }
                rk[a - 1] = pos;
            }
            ranks.push(rk);
        }
        Ok(PreferenceProfile { m, orders, ranks })
    }

    pub fn n(&self) -> usize {
        self.orders.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn orders(&self) -> &[Vec<usize>] {
        &self.orders
    }

    /// Ranking of `voter` (1-based).
    pub fn order(&self, voter: usize) -> Result<&[usize]> {
        self.check_voter(voter)?;
        Ok(&self.orders[voter - 1])
    }

    /// `rk_voter(alt)`: the number of alternatives `voter` strictly prefers to `alt`.
    pub fn rank(&self, voter: usize, alt: usize) -> Result<Rank> {
        self.check_voter(voter)?;
        self.check_alt(alt)?;
        Ok(self.ranks[voter - 1][alt - 1])
    }

    /// Maximum rank of `alt` over all voters, with the smallest voter index
    /// attaining it.
    pub fn max_rank_info(&self, alt: usize) -> Result<(Rank, usize)> {
        self.check_alt(alt)?;
        let mut best = (self.ranks[0][alt - 1], 1);
        for (v, rk) in self.ranks.iter().enumerate().skip(1) {
            if rk[alt - 1] > best.0 {
                best = (rk[alt - 1], v + 1);
            }
        }
        Ok(best)
    }

    /// Does `voter` strictly prefer `a` to `b`? (all 1-based)
    pub fn prefers(&self, voter: usize, a: usize, b: usize) -> bool {
        self.ranks[voter - 1][a - 1] < self.ranks[voter - 1][b - 1]
    }

    pub(crate) fn rank0(&self, v: usize, a: usize) -> Rank {
        self.ranks[v][a]
    }

    /// Alternative (0-based) at rank `r` for voter `v` (0-based).
    pub(crate) fn alt_at0(&self, v: usize, r: usize) -> usize {
        self.orders[v][r] - 1
    }

    /// Subprofile on the given voters and alternatives. Alternatives are
    /// relabeled to `1..=k` in increasing order of their original ids; voters
    /// keep the order in which they are given.
    pub fn restrict(&self, voters: &[usize], alts: &[usize]) -> Result<Restriction> {
        if voters.is_empty() {
            return Err(Error::EmptySelection("voter"));
        }
        if alts.is_empty() {
            return Err(Error::EmptySelection("alternative"));
        }
        for &v in voters {
            self.check_voter(v)?;
        }
        let mut alt_map: Vec<usize> = alts.to_vec();
        for &a in &alt_map {
            self.check_alt(a)?;
        }
        alt_map.sort_unstable();
        alt_map.dedup();
        let mut relabel = vec![0usize; self.m + 1];
        for (new, &old) in alt_map.iter().enumerate() {
            relabel[old] = new + 1;
        }
        let orders = voters
            .iter()
            .map(|&v| {
                self.orders[v - 1]
                    .iter()
                    .filter(|&&a| relabel[a] != 0)
                    .map(|&a| relabel[a])
                    .collect()
            })
            .collect();
        Ok(Restriction {
            profile: PreferenceProfile::new(alt_map.len(), orders)?,
            voter_map: voters.to_vec(),
            alt_map,
        })
    }

    /// Same profile with alternative `a` renamed to `perm[a - 1]`.
    pub fn relabel_alternatives(&self, perm: &[usize]) -> Result<Self> {
        let orders = self
            .orders
            .iter()
            .map(|o| o.iter().map(|&a| perm[a - 1]).collect())
            .collect();
        PreferenceProfile::new(self.m, orders)
    }

    /// Same profile with voters reordered: new voter `i` is old voter `perm[i - 1]`.
    pub fn permute_voters(&self, perm: &[usize]) -> Result<Self> {
        let orders = perm.iter().map(|&v| self.orders[v - 1].clone()).collect();
        PreferenceProfile::new(self.m, orders)
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }

    fn check_voter(&self, voter: usize) -> Result<()> {
        if voter == 0 || voter > self.n() {
            return Err(Error::IndexOutOfRange { what: "voter", index: voter, max: self.n() });
        }
        Ok(())
    }

    fn check_alt(&self, alt: usize) -> Result<()> {
        if alt == 0 || alt > self.m {
            return Err(Error::IndexOutOfRange { what: "alternative", index: alt, max: self.m });
        }
        Ok(())
    }
}

impl fmt::Display for PreferenceProfile {
    /// The profile text format: `n m` header, one ranking per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.n(), self.m)?;
        for order in &self.orders {
            let row: Vec<String> = order.iter().map(|a| a.to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// A subprofile together with the maps back to the original ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Restriction {
    pub profile: PreferenceProfile,
    /// `voter_map[i]` is the original id of new voter `i + 1`.
    pub voter_map: Vec<usize>,
    /// `alt_map[a]` is the original id of new alternative `a + 1`.
    pub alt_map: Vec<usize>,
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_header(line: Option<(usize, &str)>) -> Result<(usize, usize, usize)> {
    let (lineno, line) = line.ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
    let parts: Vec<&str> = line.split_whitespace().collect();
    let bad = || Error::Parse { line: lineno, msg: format!("expected header \"n m\", got {line:?}") };
    if parts.len() != 2 {
        return Err(bad());
    }
    let n: usize = parts[0].parse().map_err(|_| bad())?;
    let m: usize = parts[1].parse().map_err(|_| bad())?;
    if n == 0 || m == 0 {
        return Err(Error::Parse { line: lineno, msg: "n and m must be at least 1".into() });
    }
    Ok((lineno, n, m))
}

/// Parses the profile text format: a header line `n m` followed by `n` lines
/// of `m` space-separated alternative ids, most-preferred first. Blank lines
/// and lines starting with `#` are ignored.
pub fn parse_profile(text: &str) -> Result<PreferenceProfile> {
    let mut lines = data_lines(text);
    let (_, n, m) = parse_header(lines.next())?;
    let mut orders = Vec::with_capacity(n);
    for row in 1..=n {
        let (lineno, line) = lines.next().ok_or(Error::Parse {
            line: 0,
            msg: format!("expected {n} rankings, found {}", row - 1),
        })?;
        let mut order = Vec::with_capacity(m);
        for tok in line.split_whitespace() {
            let a: i64 = tok.parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("row {row}: bad alternative {tok:?}"),
            })?;
            if a < 1 || a as usize > m {
                return Err(Error::AlternativeOutOfRange { row, alt: a, m });
            }
            order.push(a as usize);
        }
        if order.len() != m {
            return Err(Error::NotPermutation { row, m });
        }
        orders.push(order);
    }
    if let Some((lineno, _)) = lines.next() {
        return Err(Error::Parse { line: lineno, msg: format!("trailing data after {n} rankings") });
    }
    PreferenceProfile::new(m, orders)
}

/// A profile pattern: each row is a sequence of blocks; a singleton block is
/// a strict position, a larger block is a tie-group whose internal order is
/// left open.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfileSpec {
    m: usize,
    rows: Vec<Vec<Vec<usize>>>,
}

impl ProfileSpec {
    pub fn new(m: usize, rows: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        if m == 0 || rows.is_empty() {
            return Err(Error::InvalidParameter("spec needs n, m >= 1".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            let mut seen = vec![false; m + 1];
            let mut count = 0;
            for block in row {
                if block.is_empty() {
                    return Err(Error::InvalidParameter(format!("row {}: empty block", i + 1)));
                }
                for &a in block {
                    if a == 0 || a > m {
                        return Err(Error::AlternativeOutOfRange { row: i + 1, alt: a as i64, m });
                    }
                    if seen[a] {
                        return Err(Error::NotPermutation { row: i + 1, m });
                    }
                    seen[a] = true;
                    count += 1;
                }
            }
            if count != m {
                return Err(Error::NotPermutation { row: i + 1, m });
            }
        }
        Ok(ProfileSpec { m, rows })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Vec<usize>>] {
        &self.rows
    }

    /// Number of strict profiles the spec expands to.
    pub fn expansion_count(&self) -> usize {
        self.rows
            .iter()
            .flat_map(|row| row.iter())
            .map(|b| (1..=b.len()).product::<usize>())
            .product()
    }

    /// Every strict profile obtained by ordering each tie-group, rows varying
    /// slowest-first, each block's permutations in lexicographic order.
    pub fn expand(&self) -> Vec<PreferenceProfile> {
        let row_options: Vec<Vec<Vec<usize>>> = self.rows.iter().map(|r| linearize_row(r)).collect();
        let mut out = Vec::with_capacity(self.expansion_count());
        let mut idx = vec![0usize; row_options.len()];
        loop {
            let orders = idx.iter().zip(&row_options).map(|(&i, opts)| opts[i].clone()).collect();
            out.push(PreferenceProfile::new(self.m, orders).expect("spec rows are permutations"));
            let mut k = idx.len();
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < row_options[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }
}

fn linearize_row(row: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut acc: Vec<Vec<usize>> = vec![Vec::new()];
    for block in row {
        let mut sorted = block.clone();
        sorted.sort_unstable();
        let perms = permutations(&sorted);
        acc = acc
            .into_iter()
            .flat_map(|prefix| {
                perms.iter().map(move |p| {
                    let mut v = prefix.clone();
                    v.extend_from_slice(p);
                    v
                })
            })
            .collect();
    }
    acc
}

impl fmt::Display for ProfileSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.n(), self.m)?;
        for row in &self.rows {
            let toks: Vec<String> = row
                .iter()
                .map(|b| {
                    if b.len() == 1 {
                        b[0].to_string()
                    } else {
                        let inner: Vec<String> = b.iter().map(|a| a.to_string()).collect();
                        format!("{{{}}}", inner.join(","))
                    }
                })
                .collect();
            writeln!(f, "{}", toks.join(" "))?;
        }
        Ok(())
    }
}

/// Parses the spec format: like the profile format, but a tie-group may be
/// written as one token `{a,b,...}`.
pub fn parse_spec(text: &str) -> Result<ProfileSpec> {
    let mut lines = data_lines(text);
    let (_, n, m) = parse_header(lines.next())?;
    let mut rows = Vec::with_capacity(n);
    for row in 1..=n {
        let (lineno, line) = lines.next().ok_or(Error::Parse {
            line: 0,
            msg: format!("expected {n} rows, found {}", row - 1),
        })?;
        let bad = |tok: &str| Error::Parse { line: lineno, msg: format!("row {row}: bad token {tok:?}") };
        let mut blocks = Vec::new();
        let mut rest = line;
        while !rest.is_empty() {
            let tok;
            if let Some(stripped) = rest.strip_prefix('{') {
                let close = stripped.find('}').ok_or_else(|| bad(rest))?;
                tok = &stripped[..close];
                rest = stripped[close + 1..].trim_start();
                let block = tok
                    .split(',')
                    .map(|s| s.trim().parse::<usize>().map_err(|_| bad(tok)))
                    .collect::<Result<Vec<_>>>()?;
                blocks.push(block);
            } else {
                let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
                tok = &rest[..end];
                rest = rest[end..].trim_start();
                blocks.push(vec![tok.parse::<usize>().map_err(|_| bad(tok))?]);
            }
        }
        rows.push(blocks);
    }
    if let Some((lineno, _)) = lines.next() {
        return Err(Error::Parse { line: lineno, msg: format!("trailing data after {n} rows") });
    }
    ProfileSpec::new(m, rows)
}

/// `n` independent uniformly random rankings of `1..=m`.
pub fn random_profile<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> PreferenceProfile {
    let orders = (0..n)
        .map(|_| {
            let mut o: Vec<usize> = (1..=m).collect();
            o.shuffle(rng);
            o
        })
        .collect();
    PreferenceProfile::new(m, orders).expect("shuffled rankings are valid")
}

/// All permutations of `items` in lexicographic order (of positions).
pub fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    let mut cur = items.to_vec();
    let mut out = vec![cur.clone()];
    while next_permutation(&mut cur) {
        out.push(cur.clone());
    }
    out
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

pub fn binomial(n: u128, k: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Largest `m` accepted by [`enumerate_canonical`]; the permutation table
/// has `m!` rows.
pub const MAX_CANONICAL_ALTS: usize = 8;

/// The canonical profiles with `n` voters and `m` alternatives: first ranking
/// `1 > 2 > ... > m`, the remaining `n - 1` rankings a set of distinct
/// non-identity permutations. Permutations are indexed lexicographically and
/// sets are listed as ascending index combinations in lexicographic order, so
/// every profile has a stable position `0..len()`.
#[derive(Clone, Debug)]
pub struct CanonicalProfiles {
    n: usize,
    m: usize,
    perms: Vec<Vec<usize>>,
    total: u64,
}

pub fn enumerate_canonical(n: usize, m: usize) -> Result<CanonicalProfiles> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter("n and m must be at least 1".into()));
    }
    if m > MAX_CANONICAL_ALTS {
        return Err(Error::InvalidParameter(format!(
            "canonical enumeration supports m <= {MAX_CANONICAL_ALTS}"
        )));
    }
    let ids: Vec<usize> = (1..=m).collect();
    let perms = permutations(&ids);
    let total = binomial(perms.len() as u128 - 1, n as u128 - 1)
        .and_then(|t| u64::try_from(t).ok())
        .ok_or_else(|| Error::InvalidParameter("enumeration too large".into()))?;
    Ok(CanonicalProfiles { n, m, perms, total })
}

impl CanonicalProfiles {
    pub fn len(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Profile at canonical position `index`.
    pub fn get(&self, index: u64) -> Option<PreferenceProfile> {
        if index >= self.total {
            return None;
        }
        let combo = unrank_combination(index, self.perms.len() - 1, self.n - 1);
        Some(self.build(&combo))
    }

    pub fn iter(&self) -> CanonicalIter<'_> {
        self.range(0, self.total)
    }

    /// Profiles at positions `start..end` (clamped to `len()`).
    pub fn range(&self, start: u64, end: u64) -> CanonicalIter<'_> {
        let end = end.min(self.total);
        let combo = if start < end {
            Some(unrank_combination(start, self.perms.len() - 1, self.n - 1))
        } else {
            None
        };
        CanonicalIter { source: self, next_index: start, end, combo }
    }

    fn build(&self, combo: &[usize]) -> PreferenceProfile {
        let mut orders = Vec::with_capacity(self.n);
        orders.push(self.perms[0].clone());
        // combination entries index the non-identity permutations
        orders.extend(combo.iter().map(|&c| self.perms[c + 1].clone()));
        PreferenceProfile::new(self.m, orders).expect("permutations are valid rankings")
    }
}

pub struct CanonicalIter<'a> {
    source: &'a CanonicalProfiles,
    next_index: u64,
    end: u64,
    combo: Option<Vec<usize>>,
}

impl Iterator for CanonicalIter<'_> {
    type Item = (u64, PreferenceProfile);

    fn next(&mut self) -> Option<Self::Item> {
        if self.next_index >= self.end {
            return None;
        }
        let combo = self.combo.as_mut()?;
        let profile = self.source.build(combo);
        let index = self.next_index;
        self.next_index += 1;
        if self.next_index < self.end {
            next_combination(combo, self.source.perms.len() - 1);
        }
        Some((index, profile))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next_index) as usize;
        (left, Some(left))
    }
}

/// The `index`-th `k`-subset of `0..universe` in lexicographic order.
fn unrank_combination(mut index: u64, universe: usize, k: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut c = 0usize;
    for pos in 0..k {
        loop {
            let remaining = binomial((universe - c - 1) as u128, (k - pos - 1) as u128).unwrap() as u64;
            if index < remaining {
                break;
            }
            index -= remaining;
            c += 1;
        }
        out.push(c);
        c += 1;
    }
    out
}

fn next_combination(combo: &mut [usize], universe: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < universe - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;
    use std::collections::HashSet;

    #[test]
    fn parses_p1() {
        let p = parse_profile("2 5\n1 2 3 4 5\n5 4 3 1 2").unwrap();
        assert_eq!(p, fixtures::two_voters());
        assert_eq!(p.n(), 2);
        assert_eq!(p.m(), 5);
    }

    #[test]
    fn parses_smallest_profile() {
        let p = parse_profile("1 1\n1").unwrap();
        assert_eq!((p.n(), p.m()), (1, 1));
        assert_eq!(p.rank(1, 1).unwrap(), 0);
    }

    #[test]
    fn rejects_bad_rows() {
        match parse_profile("2 3\n1 2 3\n1 2 2") {
            Err(Error::NotPermutation { row: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match parse_profile("1 3\n1 2 4") {
            Err(Error::AlternativeOutOfRange { row: 1, alt: 4, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_profile("2\n1 2"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_profile("1 2\n1 x"), Err(Error::Parse { .. })));
        assert!(matches!(parse_profile("1 2\n1"), Err(Error::NotPermutation { row: 1, .. })));
        assert!(matches!(parse_profile("2 2\n1 2"), Err(Error::Parse { .. })));
        assert!(matches!(parse_profile("1 2\n1 2\n2 1"), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn ranks_of_p1() {
        let p = fixtures::two_voters();
        assert_eq!(p.rank(2, 1).unwrap(), 3);
        assert_eq!(p.rank(1, 5).unwrap(), 4);
        assert_eq!(p.rank(1, 1).unwrap(), 0);
        assert_eq!(p.rank(2, 5).unwrap(), 0);
        assert!(p.rank(3, 1).is_err());
        assert!(p.rank(1, 6).is_err());
        assert!(p.rank(0, 1).is_err());
    }

    #[test]
    fn max_rank_table_of_p1() {
        let p = fixtures::two_voters();
        let table: Vec<(usize, usize)> = (1..=5).map(|a| p.max_rank_info(a).unwrap()).collect();
        assert_eq!(table, vec![(3, 2), (4, 2), (2, 1), (3, 1), (4, 1)]);
        let single = parse_profile("1 3\n2 3 1").unwrap();
        for a in 1..=3 {
            assert_eq!(single.max_rank_info(a).unwrap(), (single.rank(1, a).unwrap(), 1));
        }
    }

    #[test]
    fn restrictions() {
        let p = fixtures::three_voter_counterexample();
        let r = p.restrict(&[1, 2, 3], &[1, 2, 3, 6]).unwrap();
        assert_eq!(r.alt_map, vec![1, 2, 3, 6]);
        let expected = PreferenceProfile::new(4, vec![vec![1, 2, 3, 4], vec![1, 4, 3, 2], vec![4, 2, 3, 1]]).unwrap();
        assert_eq!(r.profile, expected);

        let all = p.restrict(&[1, 2, 3], &[1, 2, 3, 4, 5, 6]).unwrap();
        assert_eq!(all.profile, p);

        let two_voters = fixtures::two_voters();
        let r = two_voters.restrict(&[1], &[1, 2]).unwrap();
        assert_eq!(r.profile.orders(), &[vec![1, 2]]);
        assert!(matches!(two_voters.restrict(&[], &[1]), Err(Error::EmptySelection("voter"))));
        assert!(matches!(two_voters.restrict(&[1], &[]), Err(Error::EmptySelection("alternative"))));
    }

    #[test]
    fn spec_expansion_counts() {
        assert_eq!(fixtures::four_voter_counterexample_spec().expand().len(), 4);
        assert_eq!(fixtures::five_voter_counterexample_spec().expand().len(), 2);
        assert_eq!(fixtures::exterior_spec().expand().len(), 8);
        let strict = parse_spec("2 3\n1 2 3\n3 2 1").unwrap();
        let out = strict.expand();
        assert_eq!(out, vec![parse_profile("2 3\n1 2 3\n3 2 1").unwrap()]);
    }

    #[test]
    fn spec_parsing() {
        let s = parse_spec("2 3\n{1,2} 3\n3 {2, 1}").unwrap();
        assert_eq!(s.rows()[0], vec![vec![1, 2], vec![3]]);
        assert_eq!(s.rows()[1], vec![vec![3], vec![2, 1]]);
        assert_eq!(parse_spec(&s.to_string()).unwrap(), s);
        assert!(parse_spec("1 3\n{1,2 3").is_err());
        assert!(parse_spec("1 3\n{1,2} 2").is_err());
    }

    #[test]
    fn canonical_counts_match_binomials() {
        assert_eq!(enumerate_canonical(3, 5).unwrap().len(), 7021);
        assert_eq!(enumerate_canonical(4, 4).unwrap().len(), 1771);
        let two = enumerate_canonical(2, 2).unwrap();
        let all: Vec<_> = two.iter().map(|(_, p)| p).collect();
        assert_eq!(all, vec![parse_profile("2 2\n1 2\n2 1").unwrap()]);
        assert_eq!(enumerate_canonical(4, 2).unwrap().len(), 0);
        assert_eq!(enumerate_canonical(4, 2).unwrap().iter().count(), 0);
        assert_eq!(enumerate_canonical(1, 3).unwrap().iter().count(), 1);
    }

    #[test]
    fn canonical_profiles_are_distinct_and_well_formed() {
        for (n, m) in [(3, 3), (2, 4), (4, 4), (3, 4)] {
            let e = enumerate_canonical(n, m).unwrap();
            let mut seen = HashSet::new();
            let mut count = 0u64;
            for (i, p) in e.iter() {
                assert_eq!(i, count);
                assert_eq!(p.orders()[0], (1..=m).collect::<Vec<_>>());
                let rows: HashSet<_> = p.orders().iter().collect();
                assert_eq!(rows.len(), n);
                assert!(seen.insert(p.clone()));
                count += 1;
            }
            assert_eq!(count, e.len());
        }
    }

    #[test]
    fn ranges_agree_with_random_access() {
        let e = enumerate_canonical(3, 4).unwrap();
        let full: Vec<_> = e.iter().collect();
        let part: Vec<_> = e.range(17, 40).collect();
        assert_eq!(part, full[17..40].to_vec());
        for &i in &[0u64, 5, 100, e.len() - 1] {
            assert_eq!(e.get(i).unwrap(), full[i as usize].1);
        }
        assert!(e.get(e.len()).is_none());
        assert_eq!(e.range(e.len() - 2, e.len() + 10).count(), 2);
    }

    fn arb_profile() -> impl Strategy<Value = PreferenceProfile> {
        (1usize..6, 1usize..7).prop_flat_map(|(n, m)| {
            let row = Just((1..=m).collect::<Vec<_>>()).prop_shuffle();
            proptest::collection::vec(row, n).prop_map(move |orders| PreferenceProfile::new(m, orders).unwrap())
        })
    }

    proptest! {
        #[test]
        fn ranks_form_a_bijection(p in arb_profile()) {
            for v in 1..=p.n() {
                let mut rks: Vec<_> = (1..=p.m()).map(|a| p.rank(v, a).unwrap()).collect();
                rks.sort_unstable();
                prop_assert_eq!(rks, (0..p.m()).collect::<Vec<_>>());
            }
        }

        #[test]
        fn restriction_compresses_ranks(p in arb_profile(), mask in any::<u8>()) {
            let alts: Vec<usize> = (1..=p.m()).filter(|a| mask & (1 << (a - 1)) != 0).collect();
            prop_assume!(!alts.is_empty());
            let voters: Vec<usize> = (1..=p.n()).collect();
            let r = p.restrict(&voters, &alts).unwrap();
            for v in 1..=p.n() {
                for (new, &old) in r.alt_map.iter().enumerate() {
                    let compressed = alts.iter().filter(|&&b| p.rank(v, b).unwrap() < p.rank(v, old).unwrap()).count();
                    prop_assert_eq!(r.profile.rank(v, new + 1).unwrap(), compressed);
                }
            }
        }

        #[test]
        fn text_round_trip(p in arb_profile()) {
            prop_assert_eq!(parse_profile(&p.to_text()).unwrap(), p);
        }

        #[test]
        fn expansion_respects_block_order(sizes in proptest::collection::vec(1usize..4, 1..4), n in 1usize..3) {
            let mut next = 1;
            let row: Vec<Vec<usize>> = sizes.iter().map(|&s| { let b: Vec<usize> = (next..next + s).collect(); next += s; b }).collect();
            let m = next - 1;
            let spec = ProfileSpec::new(m, vec![row.clone(); n]).unwrap();
            let out = spec.expand();
            let analytic: usize = sizes.iter().map(|&s| (1..=s).product::<usize>()).product::<usize>().pow(n as u32);
            prop_assert_eq!(out.len(), analytic);
            for p in &out {
                for v in 1..=n {
                    for (bi, block) in row.iter().enumerate() {
                        for later in &row[bi + 1..] {
                            for &a in block { for &b in later { prop_assert!(p.prefers(v, a, b)); } }
                        }
                    }
                }
            }
        }
    }
}
