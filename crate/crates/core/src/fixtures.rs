//! Named profiles and embeddings used across the test-suite, the frontier
//! report and the CLI.

use crate::geometry::{Embedding, Point};
use crate::profile::{parse_spec, PreferenceProfile, ProfileSpec};

fn profile(m: usize, rows: &[&[usize]]) -> PreferenceProfile {
    PreferenceProfile::new(m, rows.iter().map(|r| r.to_vec()).collect()).expect("fixture is valid")
}

fn points(rows: &[&[i64]]) -> Vec<Point> {
    rows.iter().map(|r| Point::from_ints(r)).collect()
}

/// Two voters, five alternatives; the worked example of the n-dimensional construction.
pub fn two_voters() -> PreferenceProfile {
    profile(5, &[&[1, 2, 3, 4, 5], &[5, 4, 3, 1, 2]])
}

/// The n-dimensional construction applied to [`two_voters`] with offset 10.
pub fn two_voters_embedding() -> Embedding {
    Embedding::new(
        points(&[&[-5, 0], &[0, -5]]),
        points(&[&[-3, 13], &[-3, 15], &[14, 0], &[14, -2], &[14, -4]]),
    )
    .expect("fixture is valid")
}

/// Three voters over three alternatives containing a betweenness pattern.
pub fn betweenness() -> PreferenceProfile {
    profile(3, &[&[1, 2, 3], &[3, 2, 1], &[3, 2, 1]])
}

/// Three voters over four alternatives with tie-groups; every expansion
/// carries the exterior pattern for all three voter rotations.
pub fn exterior_spec() -> ProfileSpec {
    parse_spec("3 4\n{1,2} 3 4\n{1,4} 3 2\n{2,4} 3 1\n").expect("fixture is valid")
}

/// Six voters, one per ranking of three alternatives.
pub fn all_rankings_of_three() -> PreferenceProfile {
    profile(3, &[&[1, 2, 3], &[1, 3, 2], &[2, 1, 3], &[2, 3, 1], &[3, 1, 2], &[3, 2, 1]])
}

/// The two-dimensional embedding listed for [`all_rankings_of_three`].
pub fn all_rankings_of_three_embedding() -> Embedding {
    Embedding::new(
        points(&[&[4, 3], &[4, 0], &[3, 4], &[0, 4], &[1, 0], &[0, 1]]),
        points(&[&[4, 0], &[0, 4], &[0, 0]]),
    )
    .expect("fixture is valid")
}

/// Three voters, six alternatives; not 2-Manhattan.
pub fn three_voter_counterexample() -> PreferenceProfile {
    profile(6, &[&[1, 2, 3, 4, 5, 6], &[1, 4, 6, 3, 5, 2], &[6, 5, 2, 3, 1, 4]])
}

/// Four voters, five alternatives; no expansion is 2-Manhattan.
pub fn four_voter_counterexample_spec() -> ProfileSpec {
    parse_spec("4 5\n{1,2} 3 4 5\n{1,2} 3 5 4\n1 4 5 3 2\n2 4 5 3 1\n").expect("fixture is valid")
}

/// Five voters, four alternatives; no expansion is 2-Manhattan.
pub fn five_voter_counterexample_spec() -> ProfileSpec {
    parse_spec("5 4\n1 2 3 4\n1 4 3 2\n{2,4} 3 1\n3 2 1 4\n3 4 1 2\n").expect("fixture is valid")
}
