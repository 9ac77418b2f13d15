//! Power sums, elementary symmetric functions and the Rédei polynomial
//! `R(X,y,z,w) = prod (X + a_i y + b_i z + c_i w)` of an affine point set,
//! with numerical checks of the identities they satisfy when the set does
//! not determine the points of the conic at infinity.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{ProjectiveSpace, QuadraticForm};
use crate::gf::{Fe, FieldCtx};
use crate::linalg;
use crate::models::Conic;

/// Affine points `(a_i, b_i, c_i)` of AG(3,q).
#[derive(Clone, Debug)]
pub struct AffineSet {
    field: Arc<FieldCtx>,
    points: Vec<[Fe; 3]>,
    translated: bool,
}

impl AffineSet {
    pub fn new(field: Arc<FieldCtx>, points: Vec<[Fe; 3]>) -> Self {
        let mut set = AffineSet {
            field,
            points,
            translated: false,
        };
        set.translated = set.coordinate_sums().iter().all(|s| s.is_zero());
        set
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    pub fn points(&self) -> &[[Fe; 3]] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// All three coordinate sums vanish (equivalently `sigma_1 = 0`).
    pub fn is_translated(&self) -> bool {
        self.translated
    }

    pub fn coordinate_sums(&self) -> [Fe; 3] {
        let f = &self.field;
        [0, 1, 2].map(|k| f.sum(self.points.iter().map(|p| p[k])))
    }

    /// Shifts every coordinate by minus its mean. Directions determined by
    /// the set are unchanged.
    pub fn translate_to_zero_sum(&self) -> Result<AffineSet> {
        let f = &self.field;
        let n = f.from_int(self.points.len() as i64);
        if n.is_zero() {
            return Err(Error::Untranslatable(self.points.len()));
        }
        let inv_n = f.inv(n)?;
        let shift = self.coordinate_sums().map(|s| f.mul(s, inv_n));
        let points = self
            .points
            .iter()
            .map(|p| [0, 1, 2].map(|k| f.sub(p[k], shift[k])))
            .collect();
        Ok(AffineSet {
            field: f.clone(),
            points,
            translated: true,
        })
    }

    /// `a y + b z + c w` for every point.
    pub fn linear_values(&self, dir: [Fe; 3]) -> Vec<Fe> {
        self.points.iter().map(|p| self.field.dot(p, &dir)).collect()
    }

    pub fn union(&self, extra: &[[Fe; 3]]) -> AffineSet {
        let mut pts = self.points.clone();
        pts.extend_from_slice(extra);
        AffineSet::new(self.field.clone(), pts)
    }
}

fn check_direction(dir: [Fe; 3]) -> Result<()> {
    if dir.iter().all(|x| x.is_zero()) {
        Err(Error::ZeroDirection)
    } else {
        Ok(())
    }
}

/// Power sums and elementary symmetric functions of the values
/// `a_i y + b_i z + c_i w` at one direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectionEval {
    pub direction: [Fe; 3],
    /// `S_j` for `j = 0..=q`.
    pub power_sums: Vec<Fe>,
    /// `sigma_k` for `k = 0..sigma.len()`.
    pub sigma: Vec<Fe>,
}

/// `S_j(y,z,w)` by direct summation, `j = 0..=q`; `S_0 = |U| mod p`.
pub fn power_sums(u: &AffineSet, dir: [Fe; 3]) -> Result<DirectionEval> {
    check_direction(dir)?;
    let f = u.field();
    let q = f.q() as usize;
    let vals = u.linear_values(dir);
    let mut pows = vec![Fe::ONE; vals.len()];
    let mut s = Vec::with_capacity(q + 1);
    s.push(f.from_int(vals.len() as i64));
    for _ in 1..=q {
        for (pw, &v) in pows.iter_mut().zip(&vals) {
            *pw = f.mul(*pw, v);
        }
        s.push(f.sum(pows.iter().copied()));
    }
    Ok(DirectionEval {
        direction: dir,
        power_sums: s,
        sigma: vec![Fe::ONE],
    })
}

/// Extends `ev.sigma` up to `k_max` with the Newton recurrence
/// `k sigma_k = sum_{j=1..k} (-1)^(j-1) S_j sigma_(k-j)`. Indices with
/// `p | k` or beyond the stored power sums are unsupported.
pub fn sigma_from_newton(f: &FieldCtx, ev: &DirectionEval, k_max: usize) -> Result<DirectionEval> {
    let mut out = ev.clone();
    for k in out.sigma.len()..=k_max {
        if k % f.p() as usize == 0 || k >= out.power_sums.len() {
            return Err(Error::UnsupportedIndex(k));
        }
        let mut acc = Fe::ZERO;
        for j in 1..=k {
            let term = f.mul(out.power_sums[j], out.sigma[k - j]);
            acc = if j % 2 == 1 { f.add(acc, term) } else { f.sub(acc, term) };
        }
        out.sigma.push(f.div(acc, f.from_int(k as i64))?);
    }
    Ok(out)
}

/// Coefficients of `prod (X + v_i)`, highest degree first: entry `k` is
/// `sigma_k(v)`.
pub fn expand_redei(f: &FieldCtx, values: &[Fe]) -> Vec<Fe> {
    let mut coeffs = vec![Fe::ONE];
    for &v in values {
        coeffs.push(Fe::ZERO);
        for k in (1..coeffs.len()).rev() {
            coeffs[k] = f.add(coeffs[k], f.mul(v, coeffs[k - 1]));
        }
    }
    coeffs
}

/// All `sigma_k(y,z,w)`, `k = 0..=|U|`, read off the expanded product.
pub fn sigma_by_expansion(u: &AffineSet, ev: &DirectionEval) -> DirectionEval {
    DirectionEval {
        sigma: expand_redei(u.field(), &u.linear_values(ev.direction)),
        ..ev.clone()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sigma2Kind {
    Zero,
    /// Rank 1: a constant times the square of a linear form.
    DoubleLine,
    /// Rank 2, two distinct lines over GF(q).
    LinePair,
    /// Rank 2, lines conjugate over GF(q^2); one rational zero.
    ConjugateLines,
    /// Rank 3: a non-degenerate conic.
    Conic,
}

/// `sigma_2(Y,Z,W)` as a ternary quadratic form.
#[derive(Clone, Debug)]
pub struct Sigma2Form {
    field: Arc<FieldCtx>,
    form: QuadraticForm,
}

impl Sigma2Form {
    pub fn form(&self) -> &QuadraticForm {
        &self.form
    }

    pub fn evaluate(&self, dir: [Fe; 3]) -> Fe {
        self.form.evaluate(&self.field, &dir)
    }

    pub fn rank(&self) -> usize {
        linalg::rank(&self.field, &self.form.polar_matrix(&self.field))
    }

    pub fn kind(&self) -> Sigma2Kind {
        match self.rank() {
            0 => Sigma2Kind::Zero,
            1 => Sigma2Kind::DoubleLine,
            2 => {
                let plane = ProjectiveSpace::new(self.field.clone(), 2).expect("PG(2,q)");
                let zeros = plane
                    .points()
                    .iter()
                    .filter(|v| self.form.evaluate(&self.field, v).is_zero())
                    .count();
                if zeros == 1 {
                    Sigma2Kind::ConjugateLines
                } else {
                    Sigma2Kind::LinePair
                }
            }
            _ => Sigma2Kind::Conic,
        }
    }

    /// Product of two linear forms over GF(q).
    pub fn is_reducible(&self) -> bool {
        matches!(
            self.kind(),
            Sigma2Kind::Zero | Sigma2Kind::DoubleLine | Sigma2Kind::LinePair
        )
    }

    /// `(A,B,C)` with `sigma_2 = (AY + BZ + CW)^2`, if one exists.
    pub fn square_root(&self) -> Option<[Fe; 3]> {
        let f = &self.field;
        if self.rank() != 1 {
            return None;
        }
        let c = self.form.coeffs();
        let i = (0..3).find(|&i| !c[i][i].is_zero())?;
        let ai = f.sqrt(c[i][i])?;
        let two_ai_inv = f.inv(f.add(ai, ai)).ok()?;
        let mut root = [Fe::ZERO; 3];
        for (j, r) in root.iter_mut().enumerate() {
            *r = if j == i {
                ai
            } else {
                let cij = if i < j { c[i][j] } else { c[j][i] };
                f.mul(cij, two_ai_inv)
            };
        }
        let plane = ProjectiveSpace::new(f.clone(), 2).ok()?;
        plane
            .points()
            .iter()
            .all(|v| {
                let l = f.dot(&root, v);
                f.mul(l, l) == self.form.evaluate(f, v)
            })
            .then_some(root)
    }
}

/// `sigma_2 = (S_1^2 - S_2)/2` as a quadratic form in `(Y,Z,W)`.
pub fn sigma2_form(u: &AffineSet) -> Sigma2Form {
    let f = u.field();
    let s = u.coordinate_sums();
    let half = f.inv(f.from_int(2)).expect("p odd");
    let mut form = QuadraticForm::zero(3);
    for i in 0..3 {
        for j in i..3 {
            let mut gram = f.sum(u.points().iter().map(|p| f.mul(p[i], p[j])));
            let mut cross = f.mul(s[i], s[j]);
            if i == j {
                gram = f.mul(gram, half);
                cross = f.mul(cross, half);
            }
            form = form.with(i, j, f.sub(cross, gram));
        }
    }
    Sigma2Form {
        field: f.clone(),
        form,
    }
}

/// `U ∪ {(A,B,C), (-A,-B,-C)}` for `sigma_2 = (AY+BZ+CW)^2`.
pub fn extend_by_square(u: &AffineSet) -> Option<AffineSet> {
    let f = u.field();
    let root = sigma2_form(u).square_root()?;
    Some(u.union(&[root, root.map(|x| f.neg(x))]))
}

/// `chi(x,y,z,w) = sum (x + a_i y + b_i z + c_i w)^(q-1)`.
pub fn chi_eval(u: &AffineSet, x: Fe, dir: [Fe; 3]) -> Result<Fe> {
    check_direction(dir)?;
    let f = u.field();
    let e = f.q() as u64 - 1;
    Ok(f.sum(u.linear_values(dir).into_iter().map(|v| f.pow(f.add(x, v), e))))
}

/// `-2 sum_{k=0..(q-1)/2} x^(q-1-2k) sigma2^k`, the polynomial form of the
/// closed expression (no division, so valid at `x^2 = sigma2`).
pub fn chi_closed(f: &FieldCtx, x: Fe, sigma2: Fe) -> Fe {
    let q = f.q() as u64;
    let x2 = f.mul(x, x);
    // Horner in x^2 over descending powers
    let mut acc = Fe::ZERO;
    for k in 0..=(q - 1) / 2 {
        acc = f.add(f.mul(acc, x2), f.pow(sigma2, k));
    }
    f.mul(f.neg(f.from_int(2)), acc)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlaneCount {
    pub count: usize,
    pub chi: u32,
    pub holds: bool,
}

/// Counts U on the plane `yX0 + zX1 + wX2 + xX3 = 0` and checks
/// `chi(x,y,z,w) = |U| - |U ∩ π| mod p`.
pub fn verify_plane_count(u: &AffineSet, x: Fe, dir: [Fe; 3]) -> Result<PlaneCount> {
    if dir.iter().all(|v| v.is_zero()) {
        return Err(Error::ExcludedPlane);
    }
    let f = u.field();
    let count = u
        .linear_values(dir)
        .into_iter()
        .filter(|&v| f.add(x, v).is_zero())
        .count();
    let chi = chi_eval(u, x, dir)?;
    Ok(PlaneCount {
        count,
        chi: chi.value(),
        holds: chi == f.from_int(u.len() as i64 - count as i64),
    })
}

/// A failed identity, with its witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub direction: [u32; 3],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
    pub detail: String,
}

fn witness(dir: [Fe; 3], x: Option<Fe>, index: Option<usize>, detail: impl Into<String>) -> Witness {
    Witness {
        direction: dir.map(Fe::value),
        x: x.map(Fe::value),
        index,
        detail: detail.into(),
    }
}

// univariate polynomials, highest degree first

fn poly_mul(f: &FieldCtx, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    let mut out = vec![Fe::ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    out
}

/// Remainder of `a` by the monic `m`, highest degree first.
fn poly_rem_monic(f: &FieldCtx, a: &[Fe], m: &[Fe]) -> Vec<Fe> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    let mut i = 0;
    while r.len() - i > dm {
        let lead = r[i];
        if !lead.is_zero() {
            for (k, &c) in m.iter().enumerate() {
                r[i + k] = f.sub(r[i + k], f.mul(lead, c));
            }
        }
        i += 1;
    }
    r[i..].to_vec()
}

/// For a direction whose line meets the conic: expands `R(X,y,z,w)`,
/// checks `R | (X^q - X)^q`, `R (X^2 - sigma2) = (X^q - X)^q`
/// coefficient-wise, and the resulting pattern of the `sigma_k`.
pub fn verify_redei_factorization(u: &AffineSet, dir: [Fe; 3]) -> Result<std::result::Result<(), Witness>> {
    check_direction(dir)?;
    let f = u.field();
    let q = f.q() as usize;
    let n = u.len();
    if n + 2 != q * q {
        return Ok(Err(witness(dir, None, None, format!("|U| = {n}, need q^2 - 2"))));
    }
    let sigma = expand_redei(f, &u.linear_values(dir));
    let s2 = sigma[2];

    // (X^q - X)^q = X^(q^2) - X^q
    let mut target = vec![Fe::ZERO; q * q + 1];
    target[0] = Fe::ONE;
    target[q * q - q] = f.neg(Fe::ONE);

    let rem = poly_rem_monic(f, &target, &sigma);
    if let Some(pos) = rem.iter().position(|c| !c.is_zero()) {
        return Ok(Err(witness(
            dir,
            None,
            Some(rem.len() - 1 - pos),
            "R(X) does not divide (X^q - X)^q",
        )));
    }

    let product = poly_mul(f, &sigma, &[Fe::ONE, Fe::ZERO, f.neg(s2)]);
    if let Some(k) = (0..product.len()).find(|&k| product[k] != target[k]) {
        return Ok(Err(witness(
            dir,
            None,
            Some(q * q - k),
            format!(
                "R(X)(X^2 - sigma2) differs at X^{}: {} vs {}",
                q * q - k,
                product[k],
                target[k]
            ),
        )));
    }

    for l in 0..=(q * q - 3) / 2 {
        if !sigma[2 * l + 1].is_zero() {
            return Ok(Err(witness(dir, None, Some(2 * l + 1), "odd sigma is nonzero")));
        }
    }
    for l in 0..=(q * q - q - 2) / 2 {
        if sigma[2 * l] != f.pow(s2, l as u64) {
            return Ok(Err(witness(dir, None, Some(2 * l), "sigma_2l != sigma2^l")));
        }
    }
    for k in 0..=(q - 3) / 2 {
        let idx = q * q - q + 2 * k;
        let expected = f.sub(f.pow(s2, (idx / 2) as u64), f.pow(s2, k as u64));
        if sigma[idx] != expected {
            return Ok(Err(witness(
                dir,
                None,
                Some(idx),
                "sigma_(q^2-q+2k) != sigma2^((q^2-q+2k)/2) - sigma2^k",
            )));
        }
    }
    Ok(Ok(()))
}

/// Values of `-1 + 2(x^2 + nu)/(x^2 - nu)` mod p over non-squares `nu` and
/// all `x`: the possible sizes mod p of elliptic sections meeting a maximal
/// partial ovoid of size q^2 - 1.
pub fn residue_set(f: &FieldCtx) -> Result<BTreeSet<u32>> {
    if f.h() != 1 {
        return Err(Error::UnsupportedOrder(f.q(), "residues are defined for prime q".into()));
    }
    let two = f.from_int(2);
    let mut out = BTreeSet::new();
    for nu in f.non_squares() {
        for x in f.elements() {
            let x2 = f.mul(x, x);
            let ratio = f.div(f.add(x2, nu), f.sub(x2, nu))?;
            out.insert(f.sub(f.mul(two, ratio), Fe::ONE).value());
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RedeiReport {
    pub q: u32,
    pub size: usize,
    pub sigma2_kind: Sigma2Kind,
    pub checks: Vec<CheckResult>,
}

impl RedeiReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Check {
    name: &'static str,
    checked: usize,
    witness: Option<Witness>,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Check {
            name,
            checked: 0,
            witness: None,
        }
    }

    fn record(&mut self, ok: bool, w: impl FnOnce() -> Witness) {
        self.checked += 1;
        if !ok && self.witness.is_none() {
            self.witness = Some(w());
        }
    }

    fn done(self) -> CheckResult {
        CheckResult {
            name: self.name,
            passed: self.witness.is_none() && self.checked > 0,
            checked: self.checked,
            witness: self.witness,
        }
    }
}

/// Every identity on an affine set of size q^2 - 2 not determining the
/// conic. The set is translated first. Directions run over PG(2,q).
pub fn run_suite(conic: &Conic, raw: &AffineSet) -> Result<RedeiReport> {
    let f = raw.field().clone();
    let q = f.q() as usize;
    let u = raw.translate_to_zero_sum()?;
    let s2form = sigma2_form(&u);
    let plane = ProjectiveSpace::new(f.clone(), 2)?;
    let dirs: Vec<[Fe; 3]> = plane
        .points()
        .iter()
        .map(|v| [v[0], v[1], v[2]])
        .collect();

    let mut translation = Check::new("sigma1_vanishes");
    let mut factorization = Check::new("redei_factorization");
    let mut sj = Check::new("power_sums");
    let mut newton = Check::new("newton_identities");
    let mut closed = Check::new("chi_closed_form");
    let mut cor = Check::new("polynomial_identities");
    let mut planes = Check::new("plane_counts");
    let mut dual = Check::new("dual_conic");
    let mut range = Check::new("sigma2_range");
    let mut irreducible = Check::new("sigma2_irreducible");
    let mut values = BTreeSet::new();

    for &dir in &dirs {
        let ev = power_sums(&u, dir)?;
        let full = sigma_by_expansion(&u, &ev);
        let s2 = full.sigma[2];
        values.insert(s2);
        translation.record(ev.power_sums[1].is_zero() && full.sigma[1].is_zero(), || {
            witness(dir, None, Some(1), "S_1 or sigma_1 nonzero")
        });
        form_agrees(&mut translation, &s2form, dir, s2);

        // Newton recurrence up to the largest index it can reach
        let k_max = (f.p() as usize - 1).min(q);
        match sigma_from_newton(&f, &ev, k_max) {
            Ok(nw) => {
                let bad = (0..=k_max).find(|&k| nw.sigma[k] != full.sigma[k]);
                newton.record(bad.is_none(), || witness(dir, None, bad, "Newton sigma != expansion"));
            }
            Err(e) => newton.record(false, || witness(dir, None, None, e.to_string())),
        }

        // identically zero polynomials: check at every direction
        for l in 0..=(q - 1) / 2 {
            let odd_ok = full.sigma[2 * l + 1].is_zero();
            let even_ok = full.sigma[2 * l] == f.pow(s2, l as u64);
            cor.record(odd_ok && even_ok, || witness(dir, None, Some(2 * l), "sigma pattern"));
        }

        let tangent_dir = conic.is_tangent(&f, &dir);
        dual.record(s2.is_zero() == tangent_dir, || {
            witness(dir, None, None, format!("sigma2 = {s2}, tangent = {tangent_dir}"))
        });

        for x in f.elements() {
            let pc = verify_plane_count(&u, x, dir)?;
            planes.record(pc.holds, || {
                witness(dir, Some(x), None, format!("chi = {}, |U ∩ π| = {}", pc.chi, pc.count))
            });
        }

        if conic.meets(&f, &dir) == 0 {
            continue;
        }
        match verify_redei_factorization(&u, dir)? {
            Ok(()) => factorization.record(true, || unreachable!()),
            Err(w) => factorization.record(false, || w),
        }
        for l in 0..=(q - 1) / 2 {
            let odd_ok = ev.power_sums[2 * l + 1].is_zero();
            let expected = f.mul(f.neg(f.from_int(2)), f.pow(s2, l as u64));
            let even_ok = ev.power_sums[2 * l] == expected;
            sj.record(odd_ok && even_ok, || witness(dir, None, Some(2 * l), "S_2l != -2 sigma2^l"));
        }
        for x in f.elements() {
            let direct = chi_eval(&u, x, dir)?;
            let closed_v = chi_closed(&f, x, s2);
            closed.record(direct == closed_v, || {
                witness(dir, Some(x), None, format!("direct {direct} vs closed {closed_v}"))
            });
        }
    }
    range.record(values.len() == q, || {
        witness([Fe::ZERO; 3], None, None, format!("sigma2 takes {} of {q} values", values.len()))
    });
    let kind = s2form.kind();
    irreducible.record(!s2form.is_reducible(), || {
        witness([Fe::ZERO; 3], None, None, format!("sigma2 is {kind:?}"))
    });

    Ok(RedeiReport {
        q: f.q(),
        size: u.len(),
        sigma2_kind: kind,
        checks: vec![
            translation.done(),
            factorization.done(),
            sj.done(),
            newton.done(),
            closed.done(),
            cor.done(),
            planes.done(),
            dual.done(),
            range.done(),
            irreducible.done(),
        ],
    })
}

fn form_agrees(check: &mut Check, form: &Sigma2Form, dir: [Fe; 3], s2: Fe) {
    let v = form.evaluate(dir);
    check.record(v == s2, || witness(dir, None, Some(2), format!("form gives {v}, expansion {s2}")));
}
