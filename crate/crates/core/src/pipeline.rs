//! Search, verification and census chained for one field order.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use crate::census::{
    self, check_antipode_closure, check_antipode_minus3, check_residues, AntipodeCheck, CensusReport, ResidueCheck,
};
use crate::cover::Stats;
use crate::error::{Error, Result};
use crate::geometry::Hyperplane;
use crate::gf::FieldCtx;
use crate::gq::{is_maximal, uncovered_subquadrangle, GqCache, PartialOvoid};
use crate::models::{Model, ModelKind, PartialOvoidFile, Q4Model, T2Model};
use crate::redei::{run_suite, AffineSet, RedeiReport};
use crate::search::{canonical_qplus, search_antipode_paired, SearchConfig, SearchMode, SearchResult};
use crate::transport::Transport;

#[derive(Clone, Debug, Serialize)]
pub struct PipelineConfig {
    pub q: u32,
    pub threads: usize,
    pub seed: u64,
    pub budget: Option<f64>,
}

impl PipelineConfig {
    pub fn new(q: u32) -> Self {
        PipelineConfig {
            q,
            threads: 1,
            seed: 0,
            budget: None,
        }
    }
}

/// Uncovered lines of a size-(q^2-1) partial ovoid.
#[derive(Clone, Debug, Serialize)]
pub struct SubquadrangleCheck {
    pub order: (usize, usize),
    pub points: usize,
    pub lines: usize,
    pub hyperplane: Vec<u32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SetComparison<T: Ord> {
    pub expected: BTreeSet<T>,
    pub observed: BTreeSet<T>,
    pub equal: bool,
}

impl<T: Ord + Clone> SetComparison<T> {
    fn new(expected: BTreeSet<T>, observed: &BTreeSet<T>) -> Self {
        SetComparison {
            equal: &expected == observed,
            observed: observed.clone(),
            expected,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Comparisons {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elliptic_values: Option<SetComparison<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub antipode_values: Option<SetComparison<usize>>,
}

impl Comparisons {
    pub fn all_equal(&self) -> bool {
        self.elliptic_values.as_ref().is_none_or(|c| c.equal) && self.antipode_values.as_ref().is_none_or(|c| c.equal)
    }
}

/// Verification of a maximal partial ovoid of size q^2 - 1 in Q(4,q).
#[derive(Clone, Debug, Serialize)]
pub struct ExampleReport {
    pub q: u32,
    pub size: usize,
    pub maximal: bool,
    pub subquadrangle: SubquadrangleCheck,
    pub antipode_closed: bool,
    pub census: CensusReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residues: Option<ResidueCheck>,
    pub antipode_minus3: AntipodeCheck,
    pub redei: RedeiReport,
    pub comparisons: Comparisons,
}

impl ExampleReport {
    pub fn passed(&self) -> bool {
        self.maximal
            && self.subquadrangle.order.1 == 1
            && self.antipode_closed
            && self.census.mass_conserved()
            && self.census.double_count_holds()
            && self.residues.as_ref().is_none_or(|r| r.passed)
            && self.antipode_minus3.passed
            && self.redei.passed()
            && self.comparisons.all_equal()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineOutput {
    pub example: PartialOvoidFile,
    pub nodes: u64,
    pub search_secs: f64,
    pub report: ExampleReport,
}

/// Searches Q(4,q) for a maximal partial ovoid of size q^2 - 1 closed under
/// the antipodes of the section `X0 = 0`.
pub fn find_example(model: &Q4Model, cfg: &PipelineConfig) -> Result<(SearchResult, Stats)> {
    let q = model.field().q() as usize;
    let mut sc = SearchConfig::new(q * q - 1, SearchMode::AntipodePaired);
    sc.root_fix = None;
    sc.threads = cfg.threads;
    sc.seed = cfg.seed;
    sc.time_budget = cfg.budget;
    search_antipode_paired(model, &canonical_qplus(model), &sc)
}

/// Moves K to T2(C) with its first member at `(∞)` and runs the identity
/// suite on the resulting affine set.
pub fn redei_report(q4: &Q4Model, t2: &T2Model, k: &PartialOvoid) -> Result<RedeiReport> {
    let pivot = *k
        .members()
        .first()
        .ok_or_else(|| Error::Model("empty partial ovoid".into()))?;
    let tr = Transport::new(q4, t2, pivot)?;
    let kt = tr.to_t2(t2, k)?;
    redei_report_t2(t2, &kt)
}

pub fn redei_report_t2(t2: &T2Model, k: &PartialOvoid) -> Result<RedeiReport> {
    let u = t2.u_from_k(k)?;
    run_suite(t2.conic(), &AffineSet::new(t2.field().clone(), u))
}

/// Every check on a size-(q^2-1) partial ovoid of Q(4,q).
pub fn verify_example(q4: &Q4Model, t2: &T2Model, k: &PartialOvoid) -> Result<ExampleReport> {
    let f = q4.field();
    let q = f.q();
    let maximal = is_maximal(q4.gq(), k).maximal;
    let (sub, qplus) = q4.uncovered_section(k)?;
    let census = census::run_census(q4, k, Some(&qplus))?;
    let residues = if f.h() == 1 {
        Some(check_residues(&census, f)?)
    } else {
        None
    };
    let antipode_minus3 = check_antipode_minus3(&census)?;
    let comparisons = Comparisons {
        elliptic_values: census::reference_elliptic_values(q).map(|e| SetComparison::new(e, &census.elliptic_values)),
        antipode_values: census::reference_antipode_values(q)
            .map(|e| SetComparison::new(e, &antipode_minus3.realized)),
    };
    Ok(ExampleReport {
        q,
        size: k.len(),
        maximal,
        subquadrangle: SubquadrangleCheck {
            order: sub.order(),
            points: sub.points.len(),
            lines: sub.lines.len(),
            hyperplane: qplus_label(&qplus),
        },
        antipode_closed: check_antipode_closure(q4, &qplus, k)?,
        redei: redei_report(q4, t2, k)?,
        census,
        residues,
        antipode_minus3,
        comparisons,
    })
}

fn qplus_label(h: &Hyperplane) -> Vec<u32> {
    h.dual().iter().map(|x| x.value()).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyFailure {
    pub check: &'static str,
    pub message: String,
}

/// Checks on a partial ovoid of either model. The subquadrangle and the
/// identity suite apply to size q^2 - 1; in T2(C) the suite needs `(∞)`.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub model: ModelKind,
    pub size: usize,
    pub maximal: bool,
    pub extensions: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subquadrangle: Option<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub redei: Option<RedeiReport>,
    pub failures: Vec<VerifyFailure>,
    pub passed: bool,
}

pub fn verify_partial_ovoid(model: &Model, k: &PartialOvoid, cache: Option<&GqCache>) -> Result<VerifyReport> {
    let q = model.field().q() as usize;
    let max = is_maximal(model.gq(), k);
    let mut failures = Vec::new();
    let fail = |check, message: String| VerifyFailure { check, message };
    if !max.maximal {
        failures.push(fail("maximal", format!("not maximal: {} extension points", max.extensions.len())));
    }
    let mut subquadrangle = None;
    let mut redei = None;
    if k.len() == q * q - 1 {
        let sub = match model {
            Model::Q4(m) => m.uncovered_section(k).map(|(s, _)| s),
            Model::T2(m) => uncovered_subquadrangle(m.gq(), k),
        };
        match sub {
            Ok(s) if s.order() == (q, 1) => subquadrangle = Some(s.order()),
            Ok(s) => failures.push(fail("subquadrangle", format!("order {:?}", s.order()))),
            Err(e) => failures.push(fail("subquadrangle", e.to_string())),
        }
        let suite = match model {
            Model::T2(m) if k.contains(m.infinity()) => Some(redei_report_t2(m, k)),
            Model::T2(_) => None,
            Model::Q4(m) => Some(T2Model::build_cached(m.field().clone(), cache).and_then(|t2| redei_report(m, &t2, k))),
        };
        match suite {
            Some(Ok(r)) => {
                if let Some(c) = r.checks.iter().find(|c| !c.passed) {
                    failures.push(fail("redei", format!("{} failed: {:?}", c.name, c.witness)));
                }
                redei = Some(r);
            }
            Some(Err(e)) => failures.push(fail("redei", e.to_string())),
            None => {}
        }
    }
    Ok(VerifyReport {
        model: model.kind(),
        size: k.len(),
        maximal: max.maximal,
        extensions: max.extensions,
        subquadrangle,
        redei,
        passed: failures.is_empty(),
        failures,
    })
}

/// Census plus the checks that apply to it.
#[derive(Clone, Debug, Serialize)]
pub struct CensusSummary {
    pub census: CensusReport,
    pub mass_conserved: bool,
    pub double_count: bool,
    /// Prime q only.
    pub residues: Option<ResidueCheck>,
    /// Maximal size-(q^2-1) inputs only.
    pub antipode_minus3: Option<AntipodeCheck>,
}

impl CensusSummary {
    pub fn passed(&self) -> bool {
        self.mass_conserved
            && self.double_count
            && self.residues.as_ref().is_none_or(|r| r.passed)
            && self.antipode_minus3.as_ref().is_none_or(|a| a.passed)
    }
}

/// A partial ovoid of either model in quadric coordinates. T2(C) inputs
/// go through the isomorphism with base point 0.
pub fn in_quadric_model(model: &Model, k: &PartialOvoid, cache: Option<&GqCache>) -> Result<(Q4Model, PartialOvoid)> {
    let f = model.field().clone();
    let q4 = Q4Model::build_cached(f, cache)?;
    let kq = match model {
        Model::Q4(_) => PartialOvoid::new(q4.gq(), k.members().to_vec())?,
        Model::T2(t2) => Transport::new(&q4, t2, 0)?.to_q4(&q4, k)?,
    };
    Ok((q4, kq))
}

/// Census of a partial ovoid of Q(4,q). Antipode data is collected when K
/// has size q^2 - 1 and leaves a hyperbolic section uncovered.
pub fn census_summary(q4: &Q4Model, k: &PartialOvoid) -> Result<CensusSummary> {
    let f = q4.field();
    let q = f.q() as usize;
    let qplus = if k.len() == q * q - 1 {
        q4.uncovered_section(k).ok().map(|(_, h)| h)
    } else {
        None
    };
    let census = census::run_census(q4, k, qplus.as_ref())?;
    let residues = if f.h() == 1 {
        Some(check_residues(&census, f)?)
    } else {
        None
    };
    let antipode_minus3 = qplus.as_ref().map(|_| check_antipode_minus3(&census)).transpose()?;
    Ok(CensusSummary {
        mass_conserved: census.mass_conserved(),
        double_count: census.double_count_holds(),
        census,
        residues,
        antipode_minus3,
    })
}

/// Search, then verify. Refuses orders with no known example.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutput> {
    let f = Arc::new(FieldCtx::of_order(cfg.q)?);
    if f.h() != 1 {
        return Err(Error::UnsupportedOrder(
            cfg.q,
            "no maximal partial ovoid of size q^2-1 exists for non-prime q".into(),
        ));
    }
    let q4 = Q4Model::build(f.clone())?;
    let t2 = T2Model::build(f.clone())?;
    let (result, stats) = find_example(&q4, cfg)?;
    let k = match result {
        SearchResult::Found(k) => k,
        SearchResult::Exhausted => return Err(Error::Model("search space exhausted without an example".into())),
        SearchResult::Timeout => return Err(Error::Model("search budget exceeded".into())),
    };
    let report = verify_example(&q4, &t2, &k)?;
    let example = Model::Q4(q4).to_file(&k);
    Ok(PipelineOutput {
        example,
        nodes: stats.nodes,
        search_secs: stats.elapsed_secs,
        report,
    })
}
