//! Bitset branch-and-bound for "pick exactly k pairwise column-disjoint
//! items, leaving at most `slack` columns uncovered".
//!
//! A partial ovoid of size k in a GQ of order (s,t) is this problem with
//! points as items and lines as columns: members cover disjoint line sets,
//! and exactly `|B| - k(t+1)` lines stay uncovered. At each node the open
//! column with the fewest candidate items is branched on: each candidate
//! covers it, or it is declared uncovered while slack remains. Columns
//! with no candidate left are forced uncovered.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

/// Items and the columns they cover.
#[derive(Clone, Debug)]
pub struct CoverProblem {
    item_cols: Vec<FixedBitSet>,
    col_items: Vec<FixedBitSet>,
    conflicts: Vec<FixedBitSet>,
}

impl CoverProblem {
    pub fn new(num_columns: usize, items: &[Vec<usize>]) -> Self {
        let n = items.len();
        let mut item_cols = Vec::with_capacity(n);
        let mut col_items = vec![FixedBitSet::with_capacity(n); num_columns];
        for (i, cols) in items.iter().enumerate() {
            let mut b = FixedBitSet::with_capacity(num_columns);
            for &c in cols {
                b.insert(c);
                col_items[c].insert(i);
            }
            item_cols.push(b);
        }
        let conflicts = item_cols
            .iter()
            .enumerate()
            .map(|(i, cols)| {
                let mut x = FixedBitSet::with_capacity(n);
                for c in cols.ones() {
                    x.union_with(&col_items[c]);
                }
                x.insert(i);
                x
            })
            .collect();
        CoverProblem {
            item_cols,
            col_items,
            conflicts,
        }
    }

    pub fn num_items(&self) -> usize {
        self.item_cols.len()
    }

    pub fn num_columns(&self) -> usize {
        self.col_items.len()
    }

    pub fn conflict(&self, a: usize, b: usize) -> bool {
        self.conflicts[a].contains(b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Found(Vec<usize>),
    Exhausted,
    Timeout,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Limits {
    pub deadline: Option<Instant>,
    pub threads: usize,
    /// First witness in DFS order regardless of scheduling.
    pub deterministic: bool,
}

#[derive(Clone, Debug)]
struct Frame {
    cand: FixedBitSet,
    open: FixedBitSet,
    dead: usize,
    scratch: FixedBitSet,
    branch: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Flow {
    Continue,
    Found,
    Halt,
}

/// One search root: items already chosen plus the frame they leave.
#[derive(Clone, Debug)]
struct Prefix {
    chosen: Vec<usize>,
    frame: Frame,
}

struct Worker<'a, F> {
    p: &'a CoverProblem,
    target: usize,
    slack: usize,
    accept: &'a F,
    chosen: Vec<usize>,
    frames: Vec<Frame>,
    nodes: u64,
    halt: &'a dyn Fn() -> bool,
    /// Collect frontier prefixes at this depth instead of descending.
    split_at: Option<usize>,
    prefixes: Vec<Prefix>,
    solution: Vec<usize>,
}

impl<'a, F: Fn(&[usize]) -> bool> Worker<'a, F> {
    fn new(
        p: &'a CoverProblem,
        target: usize,
        slack: usize,
        accept: &'a F,
        halt: &'a dyn Fn() -> bool,
        start: Prefix,
    ) -> Self {
        Worker {
            p,
            target,
            slack,
            accept,
            chosen: start.chosen,
            frames: vec![start.frame],
            nodes: 0,
            halt,
            split_at: None,
            prefixes: Vec::new(),
            solution: Vec::new(),
        }
    }

    fn ensure_frame(&mut self, d: usize) {
        while self.frames.len() <= d {
            let f = self.frames[0].clone();
            self.frames.push(f);
        }
    }

    fn dfs(&mut self, d: usize) -> Flow {
        self.nodes += 1;
        if self.nodes & 0x3ff == 0 && (self.halt)() {
            return Flow::Halt;
        }
        if self.split_at == Some(d) {
            self.prefixes.push(Prefix {
                chosen: self.chosen.clone(),
                frame: self.frames[d].clone(),
            });
            return Flow::Continue;
        }
        let remaining = self.target - self.chosen.len();
        if remaining == 0 {
            let f = &self.frames[d];
            if f.dead + f.open.count_ones(..) <= self.slack && (self.accept)(&self.chosen) {
                self.solution = sorted(&self.chosen);
                return Flow::Found;
            }
            return Flow::Continue;
        }

        let best = {
            let p = self.p;
            let f = &mut self.frames[d];
            if f.cand.count_ones(..) < remaining {
                return Flow::Continue;
            }
            f.scratch.clear();
            let mut best = None;
            let mut best_count = usize::MAX;
            for c in f.open.ones() {
                let n = p.col_items[c].intersection_count(&f.cand);
                if n == 0 {
                    f.scratch.insert(c);
                } else if n < best_count {
                    best_count = n;
                    best = Some(c);
                }
            }
            let zeros = f.scratch.count_ones(..);
            if zeros > 0 {
                f.dead += zeros;
                if f.dead > self.slack {
                    return Flow::Continue;
                }
                let scratch = std::mem::take(&mut f.scratch);
                f.open.difference_with(&scratch);
                f.scratch = scratch;
            }
            let Some(best) = best else {
                return Flow::Continue;
            };
            f.branch.clear();
            f.branch.extend(p.col_items[best].intersection(&f.cand));
            best
        };

        self.ensure_frame(d + 1);
        let branch = std::mem::take(&mut self.frames[d].branch);
        let mut flow = Flow::Continue;
        for &item in &branch {
            {
                let (lo, hi) = self.frames.split_at_mut(d + 1);
                let (cur, next) = (&lo[d], &mut hi[0]);
                next.cand.clone_from(&cur.cand);
                next.cand.difference_with(&self.p.conflicts[item]);
                next.open.clone_from(&cur.open);
                next.open.difference_with(&self.p.item_cols[item]);
                next.dead = cur.dead;
            }
            self.chosen.push(item);
            flow = self.dfs(d + 1);
            self.chosen.pop();
            if flow != Flow::Continue {
                break;
            }
        }
        self.frames[d].branch = branch;
        if flow != Flow::Continue {
            return flow;
        }

        if self.frames[d].dead < self.slack {
            {
                let (lo, hi) = self.frames.split_at_mut(d + 1);
                let (cur, next) = (&lo[d], &mut hi[0]);
                next.cand.clone_from(&cur.cand);
                next.cand.difference_with(&self.p.col_items[best]);
                next.open.clone_from(&cur.open);
                next.open.set(best, false);
                next.dead = cur.dead + 1;
            }
            return self.dfs(d + 1);
        }
        Flow::Continue
    }
}

/// Counters from one run.
#[derive(Clone, Debug, Default)]
pub struct Stats {
    pub nodes: u64,
    pub elapsed_secs: f64,
}

pub struct CoverSearch<'a> {
    problem: &'a CoverProblem,
    target: usize,
    slack: usize,
}

impl<'a> CoverSearch<'a> {
    pub fn new(problem: &'a CoverProblem, target: usize, slack: usize) -> Self {
        CoverSearch {
            problem,
            target,
            slack,
        }
    }

    /// Root frame with `pinned` chosen; `None` if the pinned items conflict.
    fn root(&self, pinned: &[usize]) -> Option<Prefix> {
        let p = self.problem;
        let mut cand = FixedBitSet::with_capacity(p.num_items());
        cand.insert_range(..);
        let mut open = FixedBitSet::with_capacity(p.num_columns());
        open.insert_range(..);
        for &i in pinned {
            if !cand.contains(i) {
                return None;
            }
            cand.difference_with(&p.conflicts[i]);
            open.difference_with(&p.item_cols[i]);
        }
        Some(Prefix {
            chosen: pinned.to_vec(),
            frame: Frame {
                cand,
                open,
                dead: 0,
                scratch: FixedBitSet::with_capacity(p.num_columns()),
                branch: Vec::new(),
            },
        })
    }

    /// Visits every solution containing `pinned` in DFS order until `visit`
    /// returns false. Returns the number of nodes expanded and whether the
    /// space was exhausted.
    pub fn enumerate(&self, pinned: &[usize], mut visit: impl FnMut(&[usize]) -> bool) -> (u64, bool) {
        let Some(root) = self.root(pinned) else {
            return (0, true);
        };
        if pinned.len() > self.target {
            return (0, true);
        }
        let stopped = std::cell::Cell::new(false);
        let visit = std::cell::RefCell::new(&mut visit);
        let accept = |s: &[usize]| {
            if !(visit.borrow_mut())(s) {
                stopped.set(true);
                return true;
            }
            false
        };
        let never = || false;
        let mut w = Worker::new(self.problem, self.target, self.slack, &accept, &never, root);
        w.dfs(0);
        (w.nodes, !stopped.get())
    }

    /// First solution accepted by `accept`.
    pub fn find<F>(&self, pinned: &[usize], accept: F, limits: Limits) -> (Outcome, Stats)
    where
        F: Fn(&[usize]) -> bool + Sync,
    {
        let start = Instant::now();
        let Some(root) = self.root(pinned) else {
            return (Outcome::Exhausted, Stats::default());
        };
        if pinned.len() > self.target {
            return (Outcome::Exhausted, Stats::default());
        }
        let timed_out = AtomicBool::new(false);
        let deadline = limits.deadline;
        let past_deadline = || {
            let late = deadline.is_some_and(|d| Instant::now() >= d);
            if late {
                timed_out.store(true, Ordering::Relaxed);
            }
            late
        };

        let threads = if limits.threads == 0 {
            rayon::current_num_threads()
        } else {
            limits.threads
        };

        if threads <= 1 {
            let mut w = Worker::new(self.problem, self.target, self.slack, &accept, &past_deadline, root);
            let flow = w.dfs(0);
            let stats = Stats {
                nodes: w.nodes,
                elapsed_secs: start.elapsed().as_secs_f64(),
            };
            let out = match flow {
                Flow::Found => Outcome::Found(w.solution),
                Flow::Halt => Outcome::Timeout,
                Flow::Continue => Outcome::Exhausted,
            };
            return (out, stats);
        }

        // Expand the tree until there are enough independent subtrees.
        let mut prefixes = vec![root];
        let mut nodes = 0u64;
        for depth in 1..=3 {
            if prefixes.len() >= 4 * threads {
                break;
            }
            let mut next = Vec::new();
            for pre in prefixes {
                let mut w = Worker::new(self.problem, self.target, self.slack, &accept, &past_deadline, pre);
                w.split_at = Some(1);
                if w.dfs(0) == Flow::Found {
                    return (
                        Outcome::Found(w.solution),
                        Stats {
                            nodes: nodes + w.nodes,
                            elapsed_secs: start.elapsed().as_secs_f64(),
                        },
                    );
                }
                nodes += w.nodes;
                next.extend(w.prefixes);
            }
            prefixes = next;
            let _ = depth;
        }

        let best = AtomicUsize::new(usize::MAX);
        let found_any = AtomicBool::new(false);
        let results: Mutex<Vec<(usize, Vec<usize>)>> = Mutex::new(Vec::new());
        let total_nodes = AtomicU64::new(nodes);
        let deterministic = limits.deterministic;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        pool.install(|| {
            prefixes.into_par_iter().enumerate().for_each(|(idx, pre)| {
                let superseded = || {
                    past_deadline()
                        || if deterministic {
                            best.load(Ordering::Relaxed) < idx
                        } else {
                            found_any.load(Ordering::Relaxed)
                        }
                };
                if superseded() {
                    return;
                }
                let mut w = Worker::new(self.problem, self.target, self.slack, &accept, &superseded, pre);
                let flow = w.dfs(0);
                total_nodes.fetch_add(w.nodes, Ordering::Relaxed);
                if flow == Flow::Found {
                    best.fetch_min(idx, Ordering::Relaxed);
                    found_any.store(true, Ordering::Relaxed);
                    results.lock().expect("poisoned").push((idx, w.solution));
                }
            });
        });
        let stats = Stats {
            nodes: total_nodes.load(Ordering::Relaxed),
            elapsed_secs: start.elapsed().as_secs_f64(),
        };
        let mut results = results.into_inner().expect("poisoned");
        results.sort();
        let out = match results.into_iter().next() {
            // a timeout may have cut off an earlier subtree
            Some((_, sol)) if !(deterministic && timed_out.load(Ordering::Relaxed)) => Outcome::Found(sol),
            Some(_) => Outcome::Timeout,
            None if timed_out.load(Ordering::Relaxed) => Outcome::Timeout,
            None => Outcome::Exhausted,
        };
        (out, stats)
    }
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v
}
