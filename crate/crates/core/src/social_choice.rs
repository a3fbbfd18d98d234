//! Pairwise preference profiles, strict-majority aggregation and cycle
//! detection.
//!
//! Candidates are numbered `1..=n`. A representative states preferences only
//! on some pairs; a pair it says nothing about is an abstention.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;
use thiserror::Error;

/// Exact support share: endorsing representatives over all representatives.
pub type Share = Ratio<u64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SocialChoiceError {
    #[error("at least {min} candidates are required, got {got}")]
    TooFewCandidates { min: usize, got: usize },
    #[error("representative {representative} prefers candidate {candidate} to itself")]
    SelfPreference {
        representative: usize,
        candidate: usize,
    },
    #[error("representative {representative} holds both {a} > {b} and {b} > {a}")]
    Contradiction {
        representative: usize,
        a: usize,
        b: usize,
    },
    #[error(
        "representative {representative} names candidate {candidate}, outside 1..={candidates}"
    )]
    UnknownCandidate {
        representative: usize,
        candidate: usize,
        candidates: usize,
    },
}

/// One set of strict pairwise preferences `(i, j)`, meaning `a_i > a_j`,
/// per representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreferenceProfile {
    candidates: usize,
    prefs: Vec<BTreeSet<(usize, usize)>>,
}

impl PreferenceProfile {
    pub fn new(
        candidates: usize,
        prefs: Vec<BTreeSet<(usize, usize)>>,
    ) -> Result<Self, SocialChoiceError> {
        for (k, pairs) in prefs.iter().enumerate() {
            let representative = k + 1;
            for &(i, j) in pairs {
                for c in [i, j] {
                    if c == 0 || c > candidates {
                        return Err(SocialChoiceError::UnknownCandidate {
                            representative,
                            candidate: c,
                            candidates,
                        });
                    }
                }
                if i == j {
                    return Err(SocialChoiceError::SelfPreference {
                        representative,
                        candidate: i,
                    });
                }
                if pairs.contains(&(j, i)) {
                    return Err(SocialChoiceError::Contradiction {
                        representative,
                        a: i.min(j),
                        b: i.max(j),
                    });
                }
            }
        }
        Ok(Self { candidates, prefs })
    }

    pub fn candidates(&self) -> usize {
        self.candidates
    }

    pub fn representatives(&self) -> usize {
        self.prefs.len()
    }

    /// Pairs held by representative `k` (1-based).
    pub fn preferences_of(&self, k: usize) -> &BTreeSet<(usize, usize)> {
        &self.prefs[k - 1]
    }

    /// Representatives that state `a_i > a_j`.
    pub fn count(&self, i: usize, j: usize) -> usize {
        self.prefs.iter().filter(|p| p.contains(&(i, j))).count()
    }

    /// Share of representatives that prefer `candidate` to every other
    /// candidate.
    pub fn top_choice_share(&self, candidate: usize) -> Share {
        let backers = self
            .prefs
            .iter()
            .filter(|p| {
                (1..=self.candidates)
                    .filter(|&c| c != candidate)
                    .all(|c| p.contains(&(candidate, c)))
            })
            .count();
        Ratio::new(backers as u64, self.prefs.len() as u64)
    }

    /// The profile with representatives reordered; `order[k]` is the old
    /// 1-based index of the new k-th representative.
    pub fn permuted(&self, order: &[usize]) -> Self {
        Self {
            candidates: self.candidates,
            prefs: order.iter().map(|&k| self.prefs[k - 1].clone()).collect(),
        }
    }
}

/// Each group's representative ranks its own candidate above all others and
/// says nothing else.
pub fn leader_election_profile(n: usize) -> Result<PreferenceProfile, SocialChoiceError> {
    if n < 2 {
        return Err(SocialChoiceError::TooFewCandidates { min: 2, got: n });
    }
    let prefs = (1..=n)
        .map(|i| (1..=n).filter(|&j| j != i).map(|j| (i, j)).collect())
        .collect();
    PreferenceProfile::new(n, prefs)
}

/// Generalized Condorcet profile on `n` candidates and `n` representatives.
///
/// Representative 1 holds the chain `a_1 > a_2 > ... > a_n`. Representative
/// `k` in `2..n` holds the same chain except the link between `a_{k-1}` and
/// `a_k`, on which it abstains, and adds `a_n > a_1`. Representative `n`
/// drops the last link `a_{n-1} > a_n` and adds `a_n > a_1`.
pub fn condorcet_profile(n: usize) -> Result<PreferenceProfile, SocialChoiceError> {
    if n < 3 {
        return Err(SocialChoiceError::TooFewCandidates { min: 3, got: n });
    }
    let mut prefs = Vec::with_capacity(n);
    prefs.push((1..n).map(|i| (i, i + 1)).collect());
    for k in 2..n {
        let mut pairs: BTreeSet<_> = (1..n).filter(|&i| i != k - 1).map(|i| (i, i + 1)).collect();
        pairs.insert((n, 1));
        prefs.push(pairs);
    }
    let mut last: BTreeSet<_> = (1..n - 1).map(|i| (i, i + 1)).collect();
    last.insert((n, 1));
    prefs.push(last);
    PreferenceProfile::new(n, prefs)
}

/// Directed graph with an edge `i -> j` whenever a strict majority of the
/// expressed opinions on the pair favours `a_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MajorityGraph {
    candidates: usize,
    edges: BTreeMap<(usize, usize), Share>,
}

impl MajorityGraph {
    pub fn from_edges(
        candidates: usize,
        edges: impl IntoIterator<Item = ((usize, usize), Share)>,
    ) -> Self {
        Self {
            candidates,
            edges: edges.into_iter().collect(),
        }
    }

    pub fn candidates(&self) -> usize {
        self.candidates
    }

    pub fn edges(&self) -> &BTreeMap<(usize, usize), Share> {
        &self.edges
    }

    pub fn share(&self, i: usize, j: usize) -> Option<Share> {
        self.edges.get(&(i, j)).copied()
    }

    fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.range((i, 0)..(i + 1, 0)).map(|(&(_, j), _)| j)
    }
}

/// Abstentions count toward neither side; ties produce no edge.
pub fn majority_aggregate(profile: &PreferenceProfile) -> MajorityGraph {
    let n = profile.candidates();
    let reps = profile.representatives() as u64;
    let mut tally = BTreeMap::<(usize, usize), u64>::new();
    for k in 1..=profile.representatives() {
        for &pair in profile.preferences_of(k) {
            *tally.entry(pair).or_default() += 1;
        }
    }
    let edges = tally
        .iter()
        .filter(|(&(i, j), &pro)| pro > tally.get(&(j, i)).copied().unwrap_or(0))
        .map(|(&pair, &pro)| (pair, Ratio::new(pro, reps)))
        .collect();
    MajorityGraph {
        candidates: n,
        edges,
    }
}

/// Some directed cycle, listed from its first-visited candidate, or `None`
/// if the graph is acyclic. Depth-first from candidate 1 upward, exploring
/// successors in increasing order.
pub fn find_cycle(graph: &MajorityGraph) -> Option<Vec<usize>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Unvisited,
        OnPath,
        Done,
    }
    let n = graph.candidates();
    let mut mark = vec![Mark::Unvisited; n + 1];
    for root in 1..=n {
        if mark[root] != Mark::Unvisited {
            continue;
        }
        let mut path = vec![root];
        let mut frontier: Vec<Vec<usize>> = vec![graph.successors(root).collect()];
        mark[root] = Mark::OnPath;
        while let Some(next) = frontier.last_mut() {
            let Some(j) = (!next.is_empty()).then(|| next.remove(0)) else {
                let done = path.pop().expect("path tracks frontier");
                mark[done] = Mark::Done;
                frontier.pop();
                continue;
            };
            match mark.get(j).copied().unwrap_or(Mark::Done) {
                Mark::OnPath => {
                    let start = path.iter().position(|&c| c == j).expect("on path");
                    return Some(path[start..].to_vec());
                }
                Mark::Unvisited => {
                    mark[j] = Mark::OnPath;
                    path.push(j);
                    frontier.push(graph.successors(j).collect());
                }
                Mark::Done => {}
            }
        }
    }
    None
}
