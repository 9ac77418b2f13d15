//! Intersection numbers of a partial ovoid with every hyperplane section of
//! Q(4,q).

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Hyperplane, SectionType};
use crate::gf::FieldCtx;
use crate::gq::PartialOvoid;
use crate::models::Q4Model;
use crate::redei::residue_set;

/// Published distinct sizes of `|Q- ∩ K|` over all elliptic sections, for
/// the known maximal partial ovoids of size q^2 - 1.
pub fn reference_elliptic_values(q: u32) -> Option<BTreeSet<usize>> {
    let v: &[usize] = match q {
        5 => &[0, 2, 3, 5, 8, 12],
        7 => &[2, 3, 4, 6, 9, 10, 18],
        11 => &[0, 4, 5, 8, 9, 10, 11, 15, 16, 20, 30],
        _ => return None,
    };
    Some(v.iter().copied().collect())
}

/// Published residue sets mod p.
pub fn reference_residues(q: u32) -> Option<BTreeSet<u32>> {
    let v: &[u32] = match q {
        5 => &[0, 2, 3],
        7 => &[2, 3, 4, 6],
        11 => &[0, 4, 5, 8, 9, 10],
        _ => return None,
    };
    Some(v.iter().copied().collect())
}

/// The two sizes realizing `-3 mod q` on elliptic sections through an
/// antipodal pair of K.
pub fn reference_antipode_values(q: u32) -> Option<BTreeSet<usize>> {
    let v: &[usize] = match q {
        5 => &[2, 12],
        7 => &[4, 18],
        11 => &[8, 30],
        _ => return None,
    };
    Some(v.iter().copied().collect())
}

/// One hyperplane's contribution.
#[derive(Clone, Debug, Serialize)]
pub struct SectionRecord {
    pub hyperplane: usize,
    pub section_type: SectionType,
    pub intersection_size: usize,
    /// `None` when no hyperbolic section was supplied.
    pub contains_antipode_pair: Option<bool>,
}

/// A CSV row: the number of hyperplanes sharing all other columns.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct CensusRow {
    pub section_type: SectionType,
    pub intersection_size: usize,
    pub count: usize,
    pub contains_k_point: bool,
    pub contains_antipode_pair: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CensusReport {
    pub q: u32,
    pub k_size: usize,
    pub num_hyperplanes: usize,
    pub histograms: BTreeMap<SectionType, BTreeMap<usize, usize>>,
    pub rows: Vec<CensusRow>,
    /// Distinct elliptic intersection sizes, including 0.
    pub elliptic_values: BTreeSet<usize>,
    /// Elliptic sections with no point of K.
    pub elliptic_missing_k: usize,
    /// Elliptic sections with at least one point of K.
    pub elliptic_meeting_k: usize,
    /// Elliptic sections containing a member together with its antipode.
    pub elliptic_with_antipode_pair: Option<usize>,
    /// Elliptic sections through quadric point 0, by brute force.
    pub elliptic_through_point: usize,
    #[serde(skip)]
    pub records: Vec<SectionRecord>,
}

/// Classifies every hyperplane and counts its points of K. With `qplus`,
/// also records whether a section holds some member and its antipode.
pub fn run_census(model: &Q4Model, k: &PartialOvoid, qplus: Option<&Hyperplane>) -> Result<CensusReport> {
    let quad = model.quadric();
    let f = model.field();
    let mut in_k = vec![false; quad.len()];
    for &m in k.members() {
        in_k[m] = true;
    }
    let antipodes: Option<Vec<(usize, usize)>> = qplus
        .map(|h| {
            k.members()
                .iter()
                .map(|&m| Ok((m, quad.antipode(h, m)?)))
                .collect::<Result<Vec<_>>>()
        })
        .transpose()?;

    let planes: Vec<Hyperplane> = quad.hyperplanes().collect();
    let records = planes
        .par_iter()
        .enumerate()
        .map(|(i, h)| {
            let section = quad.section(h);
            let section_type = quad.classify_count(section.len())?;
            let on = |p: usize| h.contains(f, quad.coords(p));
            let intersection_size = section.iter().filter(|&&p| in_k[p]).count();
            let contains_antipode_pair = antipodes
                .as_ref()
                .map(|pairs| pairs.iter().any(|&(a, b)| on(a) && on(b)));
            Ok(SectionRecord {
                hyperplane: i,
                section_type,
                intersection_size,
                contains_antipode_pair,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut histograms: BTreeMap<SectionType, BTreeMap<usize, usize>> = BTreeMap::new();
    let mut grouped: BTreeMap<(SectionType, usize, bool, Option<bool>), usize> = BTreeMap::new();
    for r in &records {
        *histograms
            .entry(r.section_type)
            .or_default()
            .entry(r.intersection_size)
            .or_default() += 1;
        let key = (r.section_type, r.intersection_size, r.intersection_size > 0, r.contains_antipode_pair);
        *grouped.entry(key).or_default() += 1;
    }
    let rows = grouped
        .into_iter()
        .map(|((section_type, intersection_size, contains_k_point, contains_antipode_pair), count)| CensusRow {
            section_type,
            intersection_size,
            count,
            contains_k_point,
            contains_antipode_pair,
        })
        .collect();

    let elliptic: Vec<&SectionRecord> = records
        .iter()
        .filter(|r| r.section_type == SectionType::Elliptic)
        .collect();
    let elliptic_through_point = records
        .iter()
        .filter(|r| r.section_type == SectionType::Elliptic && planes[r.hyperplane].contains(f, quad.coords(0)))
        .count();

    Ok(CensusReport {
        q: f.q(),
        k_size: k.len(),
        num_hyperplanes: planes.len(),
        histograms,
        rows,
        elliptic_values: elliptic.iter().map(|r| r.intersection_size).collect(),
        elliptic_missing_k: elliptic.iter().filter(|r| r.intersection_size == 0).count(),
        elliptic_meeting_k: elliptic.iter().filter(|r| r.intersection_size > 0).count(),
        elliptic_with_antipode_pair: antipodes
            .is_some()
            .then(|| elliptic.iter().filter(|r| r.contains_antipode_pair == Some(true)).count()),
        elliptic_through_point,
        records,
    })
}

impl CensusReport {
    pub fn total(&self, kind: SectionType) -> usize {
        self.histograms.get(&kind).map_or(0, |h| h.values().sum())
    }

    /// Section-type totals match `q^2(q^2-1)/2`, `q^2(q^2+1)/2`, and
    /// `(q^4-1)/(q-1)` tangent hyperplanes, summing to `(q^5-1)/(q-1)`.
    pub fn mass_conserved(&self) -> bool {
        let q = self.q as usize;
        let q2 = q * q;
        self.total(SectionType::Elliptic) == q2 * (q2 - 1) / 2
            && self.total(SectionType::Hyperbolic) == q2 * (q2 + 1) / 2
            && self.total(SectionType::Cone) == (q2 * q2 - 1) / (q - 1)
            && self.num_hyperplanes == (q2 * q2 * q - 1) / (q - 1)
            && self.records.len() == self.num_hyperplanes
    }

    /// `sum |H ∩ K|` over elliptic `H` equals `|K|` times the number of
    /// elliptic sections through a point.
    pub fn double_count_holds(&self) -> bool {
        let lhs: usize = self
            .records
            .iter()
            .filter(|r| r.section_type == SectionType::Elliptic)
            .map(|r| r.intersection_size)
            .sum();
        lhs == self.k_size * self.elliptic_through_point
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "section_type,intersection_size,count,contains_k_point,contains_antipode_pair")?;
        for r in &self.rows {
            let pair = r.contains_antipode_pair.map_or(String::new(), |b| b.to_string());
            writeln!(
                out,
                "{},{},{},{},{}",
                r.section_type.name(),
                r.intersection_size,
                r.count,
                r.contains_k_point,
                pair
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidueCheck {
    pub passed: bool,
    pub allowed: BTreeSet<u32>,
    /// Residues mod p of sizes of elliptic sections meeting K.
    pub observed: BTreeSet<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_hyperplane: Option<usize>,
}

/// Every elliptic section meeting K has size mod p in `residue_set`.
pub fn check_residues(report: &CensusReport, f: &FieldCtx) -> Result<ResidueCheck> {
    let allowed = residue_set(f)?;
    let p = f.p() as usize;
    let mut observed = BTreeSet::new();
    let mut witness = None;
    for r in &report.records {
        if r.section_type != SectionType::Elliptic || r.intersection_size == 0 {
            continue;
        }
        let res = (r.intersection_size % p) as u32;
        observed.insert(res);
        if !allowed.contains(&res) && witness.is_none() {
            witness = Some(r.hyperplane);
        }
    }
    Ok(ResidueCheck {
        passed: witness.is_none(),
        allowed,
        observed,
        witness_hyperplane: witness,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AntipodeCheck {
    pub passed: bool,
    /// Sizes of elliptic sections through some antipodal pair of K.
    pub realized: BTreeSet<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_hyperplane: Option<usize>,
}

/// Elliptic sections through a member and its antipode meet K in
/// `-3 mod q` points. The census must have been run with a section.
pub fn check_antipode_minus3(report: &CensusReport) -> Result<AntipodeCheck> {
    let q = report.q as usize;
    let mut realized = BTreeSet::new();
    let mut witness = None;
    for r in &report.records {
        let through_pair = r
            .contains_antipode_pair
            .ok_or_else(|| Error::Config("census was run without a hyperbolic section".into()))?;
        if r.section_type != SectionType::Elliptic || !through_pair {
            continue;
        }
        realized.insert(r.intersection_size);
        if (r.intersection_size + 3) % q != 0 && witness.is_none() {
            witness = Some(r.hyperplane);
        }
    }
    Ok(AntipodeCheck {
        passed: witness.is_none(),
        realized,
        witness_hyperplane: witness,
    })
}

/// Whether K is closed under the antipode map of `qplus`. Only defined for
/// |K| = q^2 - 1.
pub fn check_antipode_closure(model: &Q4Model, qplus: &Hyperplane, k: &PartialOvoid) -> Result<bool> {
    let q = model.field().q() as usize;
    if k.len() != q * q - 1 {
        return Err(Error::Config(format!("antipode closure needs {} points, got {}", q * q - 1, k.len())));
    }
    for &m in k.members() {
        if !k.contains(model.quadric().antipode(qplus, m)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn census_of_an_ovoid() {
        let f = Arc::new(FieldCtx::of_order(3).unwrap());
        let model = Q4Model::build(f.clone()).unwrap();
        let quad = model.quadric();
        // an elliptic section is an ovoid
        let h = quad
            .hyperplanes()
            .find(|h| quad.classify_section(h).unwrap().0 == SectionType::Elliptic)
            .unwrap();
        let k = PartialOvoid::new(model.gq(), quad.section(&h)).unwrap();
        let report = run_census(&model, &k, None).unwrap();
        assert!(report.mass_conserved());
        assert!(report.double_count_holds());
        assert_eq!(report.num_hyperplanes, 121);
        // the ovoid's own hyperplane gives 10
        assert!(report.elliptic_values.contains(&10));
        assert!(check_antipode_minus3(&report).is_err());
        assert!(check_antipode_closure(&model, &h, &k).is_err());

        let mut csv = Vec::new();
        report.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("section_type,intersection_size,count,contains_k_point,contains_antipode_pair\n"));
        let total: usize = text
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(2).unwrap().parse::<usize>().unwrap())
            .sum();
        assert_eq!(total, 121);
    }

    #[test]
    fn empty_sections_are_exempt_from_residues() {
        let f = Arc::new(FieldCtx::of_order(5).unwrap());
        let model = Q4Model::build(f.clone()).unwrap();
        let k = PartialOvoid::new(model.gq(), vec![]).unwrap();
        let report = run_census(&model, &k, None).unwrap();
        let check = check_residues(&report, &f).unwrap();
        assert!(check.passed);
        assert!(check.observed.is_empty());
        assert_eq!(report.elliptic_values, BTreeSet::from([0]));
    }
}
