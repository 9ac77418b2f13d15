//! Finite generalized quadrangles as point-line incidence structures.

use std::fs;
use std::path::{Path, PathBuf};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Record of a successful axiom check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub num_points: usize,
    pub num_lines: usize,
    pub order: (usize, usize),
    /// sha256 of the sorted line list.
    pub digest: String,
}

/// Hex sha256 over the point count and the sorted lines.
pub fn lines_digest(num_points: usize, lines: &[Vec<usize>]) -> String {
    let mut h = Sha256::new();
    h.update((num_points as u64).to_le_bytes());
    for l in lines {
        h.update((l.len() as u64).to_le_bytes());
        for &p in l {
            h.update((p as u64).to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

/// Directory of verification certificates, one JSON file per key.
#[derive(Clone, Debug)]
pub struct GqCache {
    dir: PathBuf,
}

impl GqCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        GqCache { dir: dir.into() }
    }

    /// The directory named by `OVOID_CACHE_DIR`, if set.
    pub fn from_env() -> Option<Self> {
        std::env::var_os("OVOID_CACHE_DIR").map(Self::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// Unreadable or malformed entries count as missing.
    pub fn load(&self, key: &str) -> Option<Certificate> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn store(&self, key: &str, cert: &Certificate) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        fs::write(self.path(key), serde_json::to_string_pretty(cert)?)?;
        Ok(())
    }
}

/// A verified GQ: points are `0..num_points`, lines are sorted point lists.
#[derive(Clone, Debug)]
pub struct Gq {
    num_points: usize,
    lines: Vec<Vec<usize>>,
    point_lines: Vec<Vec<usize>>,
    line_bits: Vec<FixedBitSet>,
    collinear: Vec<FixedBitSet>,
    order: (usize, usize),
}

impl Gq {
    /// Builds the incidence structure and checks the GQ axioms.
    pub fn new(num_points: usize, mut lines: Vec<Vec<usize>>) -> Result<Self> {
        for l in lines.iter_mut() {
            l.sort_unstable();
        }
        let order = verify_gq(num_points, &lines)?;
        Ok(Self::assemble(num_points, lines, order))
    }

    /// As [`Gq::new`], but skips the axiom check when `cache` holds a
    /// certificate under `key` for exactly this line list; otherwise
    /// verifies and records one.
    pub fn new_cached(
        num_points: usize,
        mut lines: Vec<Vec<usize>>,
        cache: Option<&GqCache>,
        key: &str,
    ) -> Result<Self> {
        let Some(cache) = cache else {
            return Self::new(num_points, lines);
        };
        for l in lines.iter_mut() {
            l.sort_unstable();
        }
        let digest = lines_digest(num_points, &lines);
        if let Some(cert) = cache.load(key) {
            if cert.digest == digest && cert.num_points == num_points && cert.num_lines == lines.len() {
                return Ok(Self::assemble(num_points, lines, cert.order));
            }
        }
        let order = verify_gq(num_points, &lines)?;
        cache.store(
            key,
            &Certificate {
                num_points,
                num_lines: lines.len(),
                order,
                digest,
            },
        )?;
        Ok(Self::assemble(num_points, lines, order))
    }

    fn assemble(num_points: usize, lines: Vec<Vec<usize>>, order: (usize, usize)) -> Self {
        let mut point_lines = vec![Vec::new(); num_points];
        let mut line_bits = Vec::with_capacity(lines.len());
        let mut collinear = vec![FixedBitSet::with_capacity(num_points); num_points];
        for (li, l) in lines.iter().enumerate() {
            let mut bits = FixedBitSet::with_capacity(num_points);
            for &p in l {
                point_lines[p].push(li);
                bits.insert(p);
            }
            for &p in l {
                collinear[p].union_with(&bits);
            }
            line_bits.push(bits);
        }
        for (p, c) in collinear.iter_mut().enumerate() {
            c.set(p, false);
        }
        Gq {
            num_points,
            lines,
            point_lines,
            line_bits,
            collinear,
            order,
        }
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn num_lines(&self) -> usize {
        self.lines.len()
    }

    /// `(s, t)`: s+1 points per line, t+1 lines per point.
    pub fn order(&self) -> (usize, usize) {
        self.order
    }

    pub fn line(&self, l: usize) -> &[usize] {
        &self.lines[l]
    }

    pub fn lines(&self) -> &[Vec<usize>] {
        &self.lines
    }

    pub fn lines_through(&self, p: usize) -> &[usize] {
        &self.point_lines[p]
    }

    pub fn line_bits(&self, l: usize) -> &FixedBitSet {
        &self.line_bits[l]
    }

    /// Points collinear with `p`, excluding `p`.
    pub fn collinear_set(&self, p: usize) -> &FixedBitSet {
        &self.collinear[p]
    }

    pub fn collinear(&self, a: usize, b: usize) -> bool {
        self.collinear[a].contains(b)
    }

    pub fn ovoid_size(&self) -> usize {
        let (s, t) = self.order;
        1 + s * t
    }
}

/// Checks axioms (i)-(iii) exhaustively and the point/line count formulas.
/// Returns the order `(s, t)`; a violation names its witnesses.
pub fn verify_gq(num_points: usize, lines: &[Vec<usize>]) -> Result<(usize, usize)> {
    let axiom = |msg: String| Err(Error::Axiom(msg));
    if num_points == 0 || lines.is_empty() {
        return axiom("empty structure".into());
    }
    let line_size = lines[0].len();
    let mut point_lines = vec![Vec::new(); num_points];
    for (li, l) in lines.iter().enumerate() {
        if l.len() != line_size {
            return axiom(format!("line {li} has {} points, line 0 has {line_size}", l.len()));
        }
        for (k, &p) in l.iter().enumerate() {
            if p >= num_points {
                return Err(Error::PointOutOfRange(p));
            }
            if l[..k].contains(&p) {
                return axiom(format!("line {li} repeats point {p}"));
            }
            point_lines[p].push(li);
        }
    }
    let degree = point_lines[0].len();
    if let Some(p) = (0..num_points).find(|&p| point_lines[p].len() != degree) {
        return axiom(format!(
            "point {p} is on {} lines, point 0 is on {degree}",
            point_lines[p].len()
        ));
    }
    if line_size < 2 || degree < 2 {
        return axiom(format!("degenerate order: line size {line_size}, point degree {degree}"));
    }
    let (s, t) = (line_size - 1, degree - 1);

    // two points share at most one line
    let mut seen = vec![usize::MAX; num_points];
    let mut collinear = vec![FixedBitSet::with_capacity(num_points); num_points];
    for x in 0..num_points {
        for &li in &point_lines[x] {
            for &y in &lines[li] {
                if y == x {
                    continue;
                }
                if seen[y] == x {
                    return axiom(format!("points {x} and {y} lie on two common lines"));
                }
                seen[y] = x;
                collinear[x].insert(y);
            }
        }
    }

    // axiom (iii): x not on L is collinear with exactly one point of L
    for (li, l) in lines.iter().enumerate() {
        let mut on_line = FixedBitSet::with_capacity(num_points);
        l.iter().for_each(|&p| on_line.insert(p));
        for x in 0..num_points {
            if on_line.contains(x) {
                continue;
            }
            let hits = collinear[x].intersection(&on_line).count();
            if hits != 1 {
                return axiom(format!(
                    "point {x} off line {li} is collinear with {hits} of its points"
                ));
            }
        }
    }

    let expected_points = (s + 1) * (s * t + 1);
    let expected_lines = (t + 1) * (s * t + 1);
    if num_points != expected_points || lines.len() != expected_lines {
        return axiom(format!(
            "order ({s},{t}) needs {expected_points} points and {expected_lines} lines, found {} and {}",
            num_points,
            lines.len()
        ));
    }
    Ok((s, t))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Maximality {
    Yes,
    No,
    Unknown,
}

/// A set of pairwise non-collinear points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialOvoid {
    members: Vec<usize>,
    maximal: Maximality,
}

impl PartialOvoid {
    /// Validates that no two members are collinear. Maximality is left
    /// [`Maximality::Unknown`].
    pub fn new(gq: &Gq, mut members: Vec<usize>) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        if let Some(&p) = members.iter().find(|&&p| p >= gq.num_points()) {
            return Err(Error::PointOutOfRange(p));
        }
        if let Some((a, b)) = first_collinear_pair(gq, &members) {
            return Err(Error::NotPartialOvoid(a, b));
        }
        Ok(PartialOvoid {
            members,
            maximal: Maximality::Unknown,
        })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, p: usize) -> bool {
        self.members.binary_search(&p).is_ok()
    }

    pub fn maximality(&self) -> Maximality {
        self.maximal
    }

    /// Runs the maximality check and records the outcome.
    pub fn resolve_maximality(&mut self, gq: &Gq) -> MaximalityReport {
        let report = is_maximal(gq, self);
        self.maximal = if report.maximal {
            Maximality::Yes
        } else {
            Maximality::No
        };
        report
    }

    pub(crate) fn with_maximality(mut self, m: Maximality) -> Self {
        self.maximal = m;
        self
    }
}

fn first_collinear_pair(gq: &Gq, members: &[usize]) -> Option<(usize, usize)> {
    for (i, &a) in members.iter().enumerate() {
        for &b in &members[i + 1..] {
            if gq.collinear(a, b) {
                return Some((a, b));
            }
        }
    }
    None
}

/// True iff no line carries two of the points.
pub fn check_partial_ovoid(gq: &Gq, members: &[usize]) -> bool {
    members.iter().all(|&p| p < gq.num_points()) && {
        let mut m = members.to_vec();
        m.sort_unstable();
        m.dedup();
        m.len() == members.len() && first_collinear_pair(gq, &m).is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MaximalityReport {
    pub maximal: bool,
    /// Non-members collinear with no member.
    pub extensions: Vec<usize>,
}

pub fn is_maximal(gq: &Gq, k: &PartialOvoid) -> MaximalityReport {
    let extensions = extension_points(gq, k.members());
    MaximalityReport {
        maximal: extensions.is_empty(),
        extensions,
    }
}

/// Points that could be added to `members` keeping a partial ovoid.
pub fn extension_points(gq: &Gq, members: &[usize]) -> Vec<usize> {
    let mut blocked = FixedBitSet::with_capacity(gq.num_points());
    for &m in members {
        blocked.union_with(gq.collinear_set(m));
        blocked.insert(m);
    }
    blocked.toggle_range(..);
    blocked.ones().collect()
}

/// The substructure on the lines missing a maximal partial ovoid of size
/// `st - t/s`, with indices into the parent GQ.
#[derive(Clone, Debug)]
pub struct Subquadrangle {
    pub points: Vec<usize>,
    pub lines: Vec<usize>,
    pub gq: Gq,
}

impl Subquadrangle {
    pub fn order(&self) -> (usize, usize) {
        self.gq.order()
    }
}

/// Lines missing `k` and the points on them, verified as a GQ of order
/// `(s, t/s)`.
pub fn uncovered_subquadrangle(gq: &Gq, k: &PartialOvoid) -> Result<Subquadrangle> {
    let (s, t) = gq.order();
    if t % s != 0 || k.len() + t / s != s * t {
        return Err(Error::Model(format!(
            "partial ovoid has {} points, the subquadrangle needs st - t/s = {}",
            k.len(),
            (s * t).saturating_sub(t / s)
        )));
    }
    if !is_maximal(gq, k).maximal {
        return Err(Error::Model("partial ovoid is not maximal".into()));
    }
    let mut member_bits = FixedBitSet::with_capacity(gq.num_points());
    k.members().iter().for_each(|&p| member_bits.insert(p));
    let lines: Vec<usize> = (0..gq.num_lines())
        .filter(|&l| gq.line_bits(l).is_disjoint(&member_bits))
        .collect();
    let mut on_lines = FixedBitSet::with_capacity(gq.num_points());
    for &l in &lines {
        on_lines.union_with(gq.line_bits(l));
    }
    let points: Vec<usize> = on_lines.ones().collect();
    let mut local = vec![usize::MAX; gq.num_points()];
    for (i, &p) in points.iter().enumerate() {
        local[p] = i;
    }
    let sub_lines = lines
        .iter()
        .map(|&l| gq.line(l).iter().map(|&p| local[p]).collect())
        .collect();
    let sub = Gq::new(points.len(), sub_lines)?;
    let expected = (s, t / s);
    if sub.order() != expected {
        return Err(Error::Axiom(format!(
            "uncovered structure has order {:?}, expected {:?}",
            sub.order(),
            expected
        )));
    }
    Ok(Subquadrangle {
        points,
        lines,
        gq: sub,
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// The (n+1)x(n+1) grid: a GQ of order (n, 1).
    pub(crate) fn grid(n: usize) -> Vec<Vec<usize>> {
        let m = n + 1;
        let rows = (0..m).map(|r| (0..m).map(|c| r * m + c).collect());
        let cols = (0..m).map(|c| (0..m).map(|r| r * m + c).collect());
        rows.chain(cols).collect()
    }

    #[test]
    fn grid_has_order_n_1() {
        let g = Gq::new(16, grid(3)).unwrap();
        assert_eq!(g.order(), (3, 1));
        assert_eq!(g.num_lines(), 8);
    }

    #[test]
    fn violations_are_reported() {
        let mut lines = grid(3);
        lines[0] = vec![0, 1, 2];
        assert!(matches!(verify_gq(16, &lines), Err(Error::Axiom(_))));

        // a triangle: every axiom (iii) check fails
        let tri = vec![vec![0, 1], vec![1, 2], vec![0, 2]];
        let err = verify_gq(3, &tri).unwrap_err().to_string();
        assert!(err.contains("collinear with"), "{err}");

        let out_of_range = vec![vec![0, 7], vec![0, 1]];
        assert!(matches!(verify_gq(2, &out_of_range), Err(Error::PointOutOfRange(7))));
    }

    #[test]
    fn partial_ovoids_in_a_grid() {
        let g = Gq::new(9, grid(2)).unwrap();
        assert!(check_partial_ovoid(&g, &[]));
        assert!(check_partial_ovoid(&g, &[0, 4, 8]));
        assert!(!check_partial_ovoid(&g, &[0, 1, 2]));
        assert!(PartialOvoid::new(&g, vec![0, 1]).is_err());

        let diag = PartialOvoid::new(&g, vec![0, 4, 8]).unwrap();
        assert!(is_maximal(&g, &diag).maximal);
        let one = PartialOvoid::new(&g, vec![0]).unwrap();
        assert_eq!(is_maximal(&g, &one).extensions, vec![4, 5, 7, 8]);
    }

    #[test]
    fn certificates_skip_reverification_only_for_the_same_lines() {
        let dir = tempfile::tempdir().unwrap();
        let cache = GqCache::new(dir.path());
        let g = Gq::new_cached(16, grid(3), Some(&cache), "grid").unwrap();
        let cert = cache.load("grid").unwrap();
        assert_eq!(cert.order, (3, 1));
        assert_eq!(cert.digest, lines_digest(16, g.lines()));
        assert_eq!(Gq::new_cached(16, grid(3), Some(&cache), "grid").unwrap().order(), (3, 1));

        // a different line list under the same key is verified afresh
        let mut bad = grid(3);
        bad[0] = vec![0, 1, 2];
        assert!(Gq::new_cached(16, bad, Some(&cache), "grid").is_err());
    }
}
