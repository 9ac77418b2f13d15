//! Brute-force checks shared by the acceptance runner and the standalone
//! property suites. Each returns a short summary on success and the first
//! counterexample on failure.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use ovoid_core::geometry::{Hyperplane, Quadric, SectionType};
use ovoid_core::gf::{prime_power, Fe, FieldCtx};
use ovoid_core::linalg;
use ovoid_core::models::Q4Model;
use ovoid_core::search::{canonical_qplus, enumerate_partial_ovoids, extendability_audit};

pub type Check = Result<String, String>;

pub fn field(q: u32) -> Arc<FieldCtx> {
    Arc::new(FieldCtx::of_order(q).unwrap())
}

/// Odd prime powers up to `max`.
pub fn odd_prime_powers(max: u32) -> Vec<u32> {
    (3..=max).filter(|&q| matches!(prime_power(q), Some((p, _)) if p != 2)).collect()
}

/// Every field axiom over all elements (triples for associativity and
/// distributivity), plus: prime fields agree with integers mod p, the
/// Frobenius map is additive, and the multiplicative group is cyclic.
pub fn field_axioms(q: u32) -> Check {
    let f = field(q);
    let els: Vec<Fe> = f.elements().collect();
    if els.len() != q as usize {
        return Err(format!("q={q}: {} elements", els.len()));
    }
    let (p, h) = (f.p(), f.h());
    for &a in &els {
        if f.add(a, Fe::ZERO) != a || f.mul(a, Fe::ONE) != a {
            return Err(format!("q={q}: identity fails at {a:?}"));
        }
        if f.add(a, f.neg(a)) != Fe::ZERO {
            return Err(format!("q={q}: no additive inverse for {a:?}"));
        }
        if !a.is_zero() && f.mul(a, f.inv(a).unwrap()) != Fe::ONE {
            return Err(format!("q={q}: bad inverse for {a:?}"));
        }
        let frob = |x: Fe| f.pow(x, p as u64);
        for &b in &els {
            if f.add(a, b) != f.add(b, a) || f.mul(a, b) != f.mul(b, a) {
                return Err(format!("q={q}: not commutative at {a:?},{b:?}"));
            }
            if frob(f.add(a, b)) != f.add(frob(a), frob(b)) {
                return Err(format!("q={q}: Frobenius not additive at {a:?},{b:?}"));
            }
            if h == 1 {
                let (x, y) = (a.value(), b.value());
                if f.add(a, b).value() != (x + y) % p || f.mul(a, b).value() != x * y % p {
                    return Err(format!("q={q}: disagrees with Z/{p} at {x},{y}"));
                }
            }
            for &c in &els {
                if f.add(f.add(a, b), c) != f.add(a, f.add(b, c))
                    || f.mul(f.mul(a, b), c) != f.mul(a, f.mul(b, c))
                {
                    return Err(format!("q={q}: not associative at {a:?},{b:?},{c:?}"));
                }
                if f.mul(a, f.add(b, c)) != f.add(f.mul(a, b), f.mul(a, c)) {
                    return Err(format!("q={q}: not distributive at {a:?},{b:?},{c:?}"));
                }
            }
        }
    }
    // a generator of the multiplicative group exists
    let order = |a: Fe| {
        let mut x = a;
        let mut n = 1;
        while x != Fe::ONE {
            x = f.mul(x, a);
            n += 1;
        }
        n
    };
    if !els.iter().filter(|a| !a.is_zero()).any(|&a| order(a) == q - 1) {
        return Err(format!("q={q}: no primitive element"));
    }
    Ok(format!("q={q}"))
}

/// For every point v of PG(4,q): the points orthogonal to all of v^perp
/// are exactly v.
pub fn perp_involution(q: u32) -> Check {
    let f = field(q);
    let qd = Quadric::parabolic(f.clone()).unwrap();
    let m = qd.form().polar_matrix(&f);
    let space = qd.space();
    for v in space.points() {
        let h = qd.perp(v).map_err(|e| e.to_string())?;
        let rows: linalg::Matrix = space
            .points()
            .iter()
            .filter(|x| h.contains(&f, x))
            .map(|x| linalg::mat_vec(&f, &m, x))
            .collect();
        let ns = linalg::nullspace(&f, &rows, 5);
        if ns.len() != 1 || !Hyperplane::new(&f, &ns[0]).unwrap().dual().eq(v.as_slice()) {
            return Err(format!("q={q}: (v^perp)^perp != v at {v:?}"));
        }
    }
    Ok(format!("q={q}: {} points", space.len()))
}

/// The antipode map off the canonical Q+ is a fixed-point-free involution
/// and agrees with the brute-force definition: the unique point P' != P of
/// the quadric orthogonal to every point of P^perp ∩ Q+.
pub fn antipode_involution(q: u32) -> Result<usize, String> {
    let f = field(q);
    let model = Q4Model::build(f.clone()).unwrap();
    let qd = model.quadric();
    let qplus = canonical_qplus(&model);
    let on_qplus: Vec<usize> = qd.section(&qplus);
    let mut pairs = 0;
    for p in 0..qd.len() {
        if qplus.contains(&f, qd.coords(p)) {
            continue;
        }
        let a = qd.antipode(&qplus, p).map_err(|e| e.to_string())?;
        if a == p || qplus.contains(&f, qd.coords(a)) {
            return Err(format!("q={q}: antipode of {p} is {a}"));
        }
        if qd.antipode(&qplus, a).map_err(|e| e.to_string())? != p {
            return Err(format!("q={q}: antipode not an involution at {p}"));
        }
        let cp: Vec<usize> = on_qplus.iter().copied().filter(|&r| qd.collinear(p, r)).collect();
        let oracle: Vec<usize> = (0..qd.len())
            .filter(|&x| x != p && cp.iter().all(|&r| qd.polar(qd.coords(x), qd.coords(r)).is_zero()))
            .collect();
        if oracle != [a] {
            return Err(format!("q={q}: brute force gives {oracle:?} for {p}, map gives {a}"));
        }
        if p < a {
            pairs += 1;
        }
    }
    Ok(pairs)
}

/// Every partial ovoid of size q^2 through point 0 of Q(4,3) has exactly
/// one completion, and that completion is an elliptic section. Returns the
/// number of partial ovoids checked.
pub fn unique_completion_q3() -> Result<usize, String> {
    let f = field(3);
    let model = Q4Model::build(f.clone()).unwrap();
    let gq = model.gq();
    let qd = model.quadric();
    let mut checked = 0;
    let mut failure = None;
    let mut completions = BTreeSet::new();
    enumerate_partial_ovoids(gq, 9, 0, |k| {
        checked += 1;
        if failure.is_some() {
            return;
        }
        let audit = extendability_audit(gq, k);
        if !audit.theorem_applies || !audit.unique_completion() {
            failure = Some(format!("{:?}: {} completions", k.members(), audit.completions.len()));
            return;
        }
        let ovoid = &audit.completions[0];
        match qd.span_hyperplane(ovoid) {
            Some(h) if qd.classify_section(&h).unwrap().0 == SectionType::Elliptic && qd.section(&h) == *ovoid => {
                completions.insert(ovoid.clone());
            }
            _ => failure = Some(format!("completion {ovoid:?} is not an elliptic section")),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    // 36 elliptic sections of 10 points each cover the 40 points 9 times
    if completions.len() != 9 || checked != 81 {
        return Err(format!("{checked} partial ovoids, {} distinct completions", completions.len()));
    }
    Ok(checked)
}
