//! Rédei-polynomial identities on real examples, checked against direct
//! brute-force evaluation.

mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use common::field;
use ovoid_core::geometry::{ProjectiveSpace, SectionType};
use ovoid_core::gf::{Fe, FieldCtx};
use ovoid_core::models::{Q4Model, T2Model};
use ovoid_core::pipeline::{find_example, PipelineConfig};
use ovoid_core::redei::{
    chi_closed, expand_redei, extend_by_square, residue_set, run_suite, sigma2_form, verify_redei_factorization,
    AffineSet, Sigma2Kind,
};
use ovoid_core::transport::Transport;

/// The translated affine set of a size-(q^2-1) example, moved into T2(C).
fn example_u(q: u32) -> (T2Model, AffineSet) {
    let f = field(q);
    let q4 = Q4Model::build(f.clone()).unwrap();
    let t2 = T2Model::build(f.clone()).unwrap();
    let (res, _) = find_example(&q4, &PipelineConfig::new(q)).unwrap();
    let k = res.found().unwrap();
    let tr = Transport::new(&q4, &t2, k.members()[0]).unwrap();
    let u = t2.u_from_k(&tr.to_t2(&t2, k).unwrap()).unwrap();
    let u = AffineSet::new(f, u).translate_to_zero_sum().unwrap();
    (t2, u)
}

fn directions(f: &Arc<FieldCtx>) -> Vec<[Fe; 3]> {
    ProjectiveSpace::new(f.clone(), 2)
        .unwrap()
        .points()
        .iter()
        .map(|v| [v[0], v[1], v[2]])
        .collect()
}

/// Directions `(y,z,w)` whose line `yX0 + zX1 + wX2 = 0` meets the conic.
fn meeting_c(t2: &T2Model) -> Vec<[Fe; 3]> {
    let f = t2.field();
    directions(f).into_iter().filter(|d| t2.conic().meets(f, d) > 0).collect()
}

#[test]
fn power_sums_and_sigmas_on_lines_meeting_c() {
    for q in [5u32, 7] {
        let (t2, u) = example_u(q);
        let f = u.field().clone();
        assert_eq!(u.len() as u32, q * q - 2);
        assert_eq!(u.coordinate_sums(), [Fe::ZERO; 3]);
        let form = sigma2_form(&u);
        let dirs = meeting_c(&t2);
        assert_eq!(dirs.len() as u32, q * q + q + 1 - q * (q - 1) / 2);
        for d in dirs {
            let vals = u.linear_values(d);
            let sigma = expand_redei(&f, &vals);
            let s2 = sigma[2];
            assert_eq!(form.evaluate(d), s2);
            let power = |j: u64| f.sum(vals.iter().map(|&v| f.pow(v, j)));
            assert!(power(1).is_zero());
            // S_2l = -2 sigma2^l for 2l <= q-1
            for l in 1..=((q - 1) / 2) as u64 {
                assert_eq!(power(2 * l), f.neg(f.mul(f.from_int(2), f.pow(s2, l))), "q={q} d={d:?} l={l}");
            }
            assert_eq!(sigma[4], f.mul(s2, s2));
            assert!(sigma.iter().skip(1).step_by(2).all(|s| s.is_zero()));
            verify_redei_factorization(&u, d).unwrap().unwrap();
        }
    }
}

#[test]
fn chi_counts_every_plane() {
    let (t2, u) = example_u(5);
    let f = u.field().clone();
    let q = 5usize;
    let meeting: BTreeSet<[Fe; 3]> = meeting_c(&t2).into_iter().collect();
    let mut planes = 0;
    for d in directions(&f) {
        for x in f.elements() {
            planes += 1;
            let vals = u.linear_values(d);
            let count = vals.iter().filter(|&&v| f.add(x, v).is_zero()).count();
            let direct = f.sum(vals.iter().map(|&v| f.pow(f.add(x, v), q as u64 - 1)));
            assert_eq!(direct, f.from_int((q * q - 2) as i64 - count as i64));
            if meeting.contains(&d) {
                let s2 = sigma2_form(&u).evaluate(d);
                assert_eq!(chi_closed(&f, x, s2), direct);
                if s2.is_zero() && x.is_zero() {
                    // a tangent plane through the translated centroid
                    assert_eq!(count, q - 2);
                }
            }
        }
    }
    assert_eq!(planes, q * q * q + q * q + q);
}

#[test]
fn sigma2_is_the_dual_conic() {
    for q in [5u32, 7] {
        let (t2, u) = example_u(q);
        let f = u.field().clone();
        let form = sigma2_form(&u);
        assert_eq!(form.kind(), Sigma2Kind::Conic);
        assert!(!form.is_reducible());
        let zeros: BTreeSet<Vec<Fe>> = directions(&f)
            .into_iter()
            .filter(|d| form.evaluate(*d).is_zero())
            .map(|d| d.to_vec())
            .collect();
        let tangents: BTreeSet<Vec<Fe>> = t2
            .conic()
            .tangents()
            .iter()
            .map(|t| ovoid_core::geometry::normalize(&f, t).unwrap())
            .collect();
        assert_eq!(zeros.len(), q as usize + 1);
        assert_eq!(zeros, tangents);
        let range: BTreeSet<u32> = directions(&f)
            .into_iter()
            .flat_map(|d| {
                let v = form.evaluate(d);
                f.elements().map(move |c| (c, v))
            })
            .map(|(c, v)| f.mul(f.mul(c, c), v).value())
            .collect();
        assert_eq!(range.len(), q as usize);
    }
}

#[test]
fn identity_suite_passes_on_examples() {
    for q in [5u32, 7] {
        let (t2, u) = example_u(q);
        let report = run_suite(t2.conic(), &u).unwrap();
        assert!(report.passed(), "{report:?}");
        for name in ["sigma1_vanishes", "redei_factorization", "power_sums", "plane_counts", "dual_conic", "sigma2_range"] {
            assert!(report.check(name).unwrap().passed, "{name}");
        }
    }
}

/// An ovoid through `(∞)` minus two affine points: sigma_2 of the rest is a
/// square, and adding back `±` its root restores the ovoid.
#[test]
fn square_sigma2_extends_to_the_ovoid() {
    let f = field(5);
    let q4 = Q4Model::build(f.clone()).unwrap();
    let t2 = T2Model::build(f.clone()).unwrap();
    let qd = q4.quadric();
    let h = qd
        .hyperplanes()
        .find(|h| qd.classify_section(h).unwrap().0 == SectionType::Elliptic && h.contains(&f, qd.coords(0)))
        .unwrap();
    let ovoid = ovoid_core::gq::PartialOvoid::new(q4.gq(), qd.section(&h)).unwrap();
    let tr = Transport::new(&q4, &t2, 0).unwrap();
    let full = t2.u_from_k(&tr.to_t2(&t2, &ovoid).unwrap()).unwrap();
    assert_eq!(full.len(), 25);

    let mut tried = 0;
    for i in 0..full.len() {
        for j in i + 1..full.len() {
            let rest: Vec<[Fe; 3]> = full.iter().enumerate().filter(|&(k, _)| k != i && k != j).map(|(_, p)| *p).collect();
            let raw = AffineSet::new(f.clone(), rest);
            // the shift that centres `rest` also centres the removed pair
            let u = raw.translate_to_zero_sum().unwrap();
            let shift: Vec<Fe> = (0..3).map(|c| f.sub(u.points()[0][c], raw.points()[0][c])).collect();
            let form = sigma2_form(&u);
            assert_eq!(form.kind(), Sigma2Kind::DoubleLine);
            let ext = extend_by_square(&u).expect("square root exists");
            let expect: BTreeSet<[Fe; 3]> = full
                .iter()
                .map(|p| [0, 1, 2].map(|c| f.add(p[c], shift[c])))
                .collect();
            let got: BTreeSet<[Fe; 3]> = ext.points().iter().copied().collect();
            assert_eq!(got, expect);
            assert!(t2.determined_directions(ext.points()).iter().all(|d| !t2.conic().contains(&f, d)));
            tried += 1;
        }
        if tried > 40 {
            break;
        }
    }
}

#[test]
fn residue_sets() {
    let expect = [(5u32, vec![0, 2, 3]), (7, vec![2, 3, 4, 6]), (11, vec![0, 4, 5, 8, 9, 10])];
    for (q, values) in expect {
        let f = field(q);
        assert_eq!(residue_set(&f).unwrap(), values.into_iter().collect());
        // -3 is always allowed: the closed form at x = 0 gives -1 - 2 = -3
        assert!(residue_set(&f).unwrap().contains(&((q - 3) % q)));
    }
    assert!(residue_set(&field(9)).is_err());
}
