//! Searches for maximal partial ovoids.

use std::str::FromStr;
use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cover::{CoverProblem, CoverSearch, Limits, Outcome};
use crate::error::{Error, Result};
use crate::geometry::{Hyperplane, SectionType};
use crate::gq::{extension_points, Gq, Maximality, PartialOvoid};
use crate::models::Q4Model;

pub use crate::cover::Stats;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    ExactDfs,
    AntipodePaired,
    ExtendRandom,
}

impl FromStr for SearchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" | "exact_dfs" => Ok(SearchMode::ExactDfs),
            "pairs" | "antipode_paired" => Ok(SearchMode::AntipodePaired),
            "random" | "extend_random" => Ok(SearchMode::ExtendRandom),
            other => Err(Error::Config(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub target_size: usize,
    pub mode: SearchMode,
    pub seed: u64,
    /// Seconds; `None` means unbounded.
    pub time_budget: Option<f64>,
    /// Point (or, in paired mode, a point of the pair) fixed in the set.
    pub root_fix: Option<usize>,
    pub deterministic: bool,
    /// Worker threads; 0 picks the rayon default, 1 runs inline.
    pub threads: usize,
    /// Only accept sets with no one-point extension.
    pub require_maximal: bool,
}

impl SearchConfig {
    pub fn new(target_size: usize, mode: SearchMode) -> Self {
        SearchConfig {
            target_size,
            mode,
            seed: 0,
            time_budget: None,
            root_fix: Some(0),
            deterministic: true,
            threads: 1,
            require_maximal: true,
        }
    }

    fn limits(&self, start: Instant) -> Limits {
        Limits {
            deadline: self.time_budget.map(|s| start + Duration::from_secs_f64(s)),
            threads: self.threads,
            deterministic: self.deterministic,
        }
    }
}

#[derive(Clone, Debug)]
pub enum SearchResult {
    Found(PartialOvoid),
    /// The space under the pinned root holds no acceptable set.
    Exhausted,
    Timeout,
}

impl SearchResult {
    pub fn found(&self) -> Option<&PartialOvoid> {
        match self {
            SearchResult::Found(k) => Some(k),
            _ => None,
        }
    }
}

fn finish(gq: &Gq, outcome: Outcome) -> Result<SearchResult> {
    Ok(match outcome {
        Outcome::Found(members) => {
            let mut k = PartialOvoid::new(gq, members)?;
            k.resolve_maximality(gq);
            SearchResult::Found(k)
        }
        Outcome::Exhausted => SearchResult::Exhausted,
        Outcome::Timeout => SearchResult::Timeout,
    })
}

fn is_maximal_set(gq: &Gq, members: &[usize]) -> bool {
    extension_points(gq, members).is_empty()
}

/// The point/line cover problem of a GQ.
pub fn point_problem(gq: &Gq) -> CoverProblem {
    let items: Vec<Vec<usize>> = (0..gq.num_points()).map(|p| gq.lines_through(p).to_vec()).collect();
    CoverProblem::new(gq.num_lines(), &items)
}

/// Exact or randomized search for a partial ovoid of `cfg.target_size`
/// points; maximal unless `cfg.require_maximal` is off.
pub fn search_maximal(gq: &Gq, cfg: &SearchConfig) -> Result<(SearchResult, Stats)> {
    let (_, t) = gq.order();
    if cfg.target_size > gq.ovoid_size() {
        return Err(Error::Config(format!(
            "target {} exceeds the ovoid size {}",
            cfg.target_size,
            gq.ovoid_size()
        )));
    }
    if let Some(r) = cfg.root_fix.filter(|&r| r >= gq.num_points()) {
        return Err(Error::PointOutOfRange(r));
    }
    match cfg.mode {
        SearchMode::ExactDfs => {}
        SearchMode::ExtendRandom => return extend_random(gq, cfg),
        SearchMode::AntipodePaired => {
            return Err(Error::Config("paired mode needs the quadric model".into()))
        }
    }
    let start = Instant::now();
    let problem = point_problem(gq);
    let slack = gq.num_lines() - cfg.target_size * (t + 1);
    let pinned: Vec<usize> = cfg.root_fix.into_iter().filter(|_| cfg.target_size > 0).collect();
    let require = cfg.require_maximal;
    let (outcome, stats) = CoverSearch::new(&problem, cfg.target_size, slack).find(
        &pinned,
        |s| !require || is_maximal_set(gq, s),
        cfg.limits(start),
    );
    Ok((finish(gq, outcome)?, stats))
}

/// Random greedy completions until one of the target size is maximal (or
/// any size-target set when maximality is not required).
fn extend_random(gq: &Gq, cfg: &SearchConfig) -> Result<(SearchResult, Stats)> {
    let start = Instant::now();
    let deadline = cfg
        .time_budget
        .map(|s| start + Duration::from_secs_f64(s))
        .unwrap_or_else(|| start + Duration::from_secs(60));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..gq.num_points()).collect();
    let mut tries = 0u64;
    while Instant::now() < deadline {
        tries += 1;
        order.shuffle(&mut rng);
        let mut members = Vec::new();
        let mut blocked = FixedBitSet::with_capacity(gq.num_points());
        let seeds = cfg.root_fix.into_iter().chain(order.iter().copied());
        for p in seeds {
            if members.len() == cfg.target_size {
                break;
            }
            if !blocked.contains(p) {
                members.push(p);
                blocked.union_with(gq.collinear_set(p));
                blocked.insert(p);
            }
        }
        if members.len() == cfg.target_size && (!cfg.require_maximal || is_maximal_set(gq, &members)) {
            members.sort_unstable();
            let stats = Stats {
                nodes: tries,
                elapsed_secs: start.elapsed().as_secs_f64(),
            };
            return Ok((finish(gq, Outcome::Found(members))?, stats));
        }
    }
    let stats = Stats {
        nodes: tries,
        elapsed_secs: start.elapsed().as_secs_f64(),
    };
    Ok((SearchResult::Timeout, stats))
}

/// Points of Q(4,q) off a hyperbolic section, grouped as `(P, P')` with
/// `P < P'` its antipode, sorted.
pub fn antipode_pairs(model: &Q4Model, qplus: &Hyperplane) -> Result<Vec<(usize, usize)>> {
    let qd = model.quadric();
    let f = qd.field();
    let mut pairs = Vec::new();
    for p in 0..qd.len() {
        if qplus.contains(f, qd.coords(p)) {
            continue;
        }
        let a = qd.antipode(qplus, p)?;
        if p < a {
            pairs.push((p, a));
        }
    }
    Ok(pairs)
}

/// Search over antipode-closed sets: pairs `{P, P'}` off `qplus` whose lines
/// are pairwise disjoint. Only lines outside `qplus` are columns.
pub fn search_antipode_paired(
    model: &Q4Model,
    qplus: &Hyperplane,
    cfg: &SearchConfig,
) -> Result<(SearchResult, Stats)> {
    let gq = model.gq();
    let qd = model.quadric();
    let f = qd.field();
    if !cfg.target_size.is_multiple_of(2) {
        return Err(Error::Config(format!("paired mode needs an even target, got {}", cfg.target_size)));
    }
    if qd.classify_section(qplus)?.0 != SectionType::Hyperbolic {
        return Err(Error::Config("designated section is not hyperbolic".into()));
    }
    let (s, t) = gq.order();
    if cfg.target_size > s * t - 1 {
        return Err(Error::Config(format!(
            "paired target {} exceeds q^2-1 = {}",
            cfg.target_size,
            s * t - 1
        )));
    }
    let start = Instant::now();
    let pairs = antipode_pairs(model, qplus)?;

    let mut col_of_line = vec![usize::MAX; gq.num_lines()];
    let mut ncols = 0;
    for (l, pts) in gq.lines().iter().enumerate() {
        if !pts.iter().all(|&p| qplus.contains(f, qd.coords(p))) {
            col_of_line[l] = ncols;
            ncols += 1;
        }
    }
    let items: Vec<Vec<usize>> = pairs
        .iter()
        .map(|&(a, b)| {
            gq.lines_through(a)
                .iter()
                .chain(gq.lines_through(b))
                .map(|&l| col_of_line[l])
                .collect()
        })
        .collect();
    let problem = CoverProblem::new(ncols, &items);
    let npairs = cfg.target_size / 2;
    let slack = ncols - npairs * 2 * (t + 1);

    let pinned: Vec<usize> = match cfg.root_fix {
        _ if npairs == 0 => Vec::new(),
        None => Vec::new(),
        Some(r) => {
            let idx = pairs
                .iter()
                .position(|&(a, b)| a == r || b == r)
                .ok_or_else(|| Error::Config(format!("root {r} lies on the hyperbolic section")))?;
            vec![idx]
        }
    };
    let expand = |sel: &[usize]| -> Vec<usize> {
        let mut m: Vec<usize> = sel.iter().flat_map(|&i| [pairs[i].0, pairs[i].1]).collect();
        m.sort_unstable();
        m
    };
    let require = cfg.require_maximal;
    let (outcome, stats) = CoverSearch::new(&problem, npairs, slack).find(
        &pinned,
        |sel| !require || is_maximal_set(gq, &expand(sel)),
        cfg.limits(start),
    );
    let outcome = match outcome {
        Outcome::Found(sel) => Outcome::Found(expand(&sel)),
        other => other,
    };
    Ok((finish(gq, outcome)?, stats))
}

/// The canonical hyperbolic section `X0 = 0` of `X0^2 + X1 X2 + X3 X4`.
pub fn canonical_qplus(model: &Q4Model) -> Hyperplane {
    let f = model.field();
    let mut dual = vec![crate::gf::Fe::ZERO; 5];
    dual[0] = crate::gf::Fe::ONE;
    Hyperplane::new(f, &dual).expect("nonzero")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub size: usize,
    /// `st - |K|`; negative for an ovoid.
    pub rho: i64,
    /// `rho < t/s`, i.e. the unique-completion statement applies.
    pub theorem_applies: bool,
    pub extension_points: Vec<usize>,
    /// Every ovoid containing K, as sorted point lists.
    pub completions: Vec<Vec<usize>>,
}

impl AuditReport {
    pub fn unique_completion(&self) -> bool {
        self.completions.len() == 1
    }

    /// False only when the theorem applies and K does not extend to a
    /// unique ovoid.
    pub fn consistent(&self) -> bool {
        !self.theorem_applies || self.unique_completion()
    }
}

/// Extension points of K and all its completions to an ovoid.
pub fn extendability_audit(gq: &Gq, k: &PartialOvoid) -> AuditReport {
    let (s, t) = gq.order();
    let rho = (s * t) as i64 - k.len() as i64;
    let ext = extension_points(gq, k.members());
    let need = gq.ovoid_size().saturating_sub(k.len());
    let mut completions = Vec::new();
    let mut chosen = Vec::new();
    complete(gq, &ext, need, &mut chosen, &mut |extra| {
        let mut all: Vec<usize> = k.members().iter().chain(extra).copied().collect();
        all.sort_unstable();
        completions.push(all);
    });
    AuditReport {
        size: k.len(),
        rho,
        theorem_applies: rho >= 0 && (rho as usize) * s < t,
        extension_points: ext,
        completions,
    }
}

fn complete(gq: &Gq, pool: &[usize], need: usize, chosen: &mut Vec<usize>, emit: &mut dyn FnMut(&[usize])) {
    if need == 0 {
        emit(chosen);
        return;
    }
    for (i, &p) in pool.iter().enumerate() {
        if chosen.iter().any(|&c| gq.collinear(c, p)) {
            continue;
        }
        chosen.push(p);
        complete(gq, &pool[i + 1..], need - 1, chosen, emit);
        chosen.pop();
    }
}

/// Every partial ovoid of the given size that contains `root`, in
/// increasing lexicographic order of sorted member lists.
pub fn enumerate_partial_ovoids(gq: &Gq, size: usize, root: usize, mut visit: impl FnMut(&PartialOvoid)) -> u64 {
    fn rec(
        gq: &Gq,
        size: usize,
        members: &mut Vec<usize>,
        cand: &FixedBitSet,
        nodes: &mut u64,
        visit: &mut dyn FnMut(&PartialOvoid),
    ) {
        *nodes += 1;
        if members.len() == size {
            let mut m = members.clone();
            m.sort_unstable();
            visit(&PartialOvoid::new(gq, m).expect("pairwise non-collinear").with_maximality(Maximality::Unknown));
            return;
        }
        if cand.count_ones(..) < size - members.len() {
            return;
        }
        let mut rest = cand.clone();
        for p in cand.ones() {
            rest.set(p, false);
            let mut next = rest.clone();
            next.difference_with(gq.collinear_set(p));
            members.push(p);
            rec(gq, size, members, &next, nodes, visit);
            members.pop();
        }
    }
    let mut cand = FixedBitSet::with_capacity(gq.num_points());
    cand.insert_range(..);
    cand.difference_with(gq.collinear_set(root));
    cand.set(root, false);
    // only points after root keep the list ordered from the root onward
    let mut members = vec![root];
    let mut nodes = 0;
    if size == 0 {
        return 0;
    }
    rec(gq, size, &mut members, &cand, &mut nodes, &mut visit);
    nodes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gq::tests::grid;

    #[test]
    fn grid_transversals() {
        // maximal partial ovoids of size 3 in the 3x3 grid: the 6 permutations
        let g = Gq::new(9, grid(2)).unwrap();
        let problem = point_problem(&g);
        let mut found = Vec::new();
        CoverSearch::new(&problem, 3, 0).enumerate(&[], |s| {
            found.push(s.to_vec());
            true
        });
        assert_eq!(found.len(), 6);
    }

    #[test]
    fn target_above_ovoid_size_is_rejected() {
        let g = Gq::new(9, grid(2)).unwrap();
        let cfg = SearchConfig::new(4, SearchMode::ExactDfs);
        assert!(matches!(search_maximal(&g, &cfg), Err(Error::Config(_))));
    }
}
