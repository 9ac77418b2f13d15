mod common;

use std::collections::BTreeMap;

use common::field;
use ovoid_core::geometry::{ProjectiveSpace, SectionType};
use ovoid_core::gf::Fe;
use ovoid_core::gq::{check_partial_ovoid, is_maximal, PartialOvoid};
use ovoid_core::models::{Model, ModelKind, Q4Model, T2Model, T2Point};
use ovoid_core::transport::Transport;

#[test]
fn both_models_are_gqs_of_order_q() {
    for q in [3u32, 5, 7] {
        let n = ((q + 1) * (q * q + 1)) as usize;
        for kind in [ModelKind::Q4, ModelKind::T2] {
            let m = Model::build(kind, field(q)).unwrap();
            assert_eq!(m.gq().order(), (q as usize, q as usize), "{kind} q={q}");
            assert_eq!((m.gq().num_points(), m.gq().num_lines()), (n, n));
        }
    }
}

#[test]
fn t2_point_types_match_a_plane_enumeration() {
    for q in [3u32, 5] {
        let f = field(q);
        let t2 = T2Model::build(f.clone()).unwrap();
        let conic = t2.conic();
        // planes other than X3 = 0 meeting the conic in exactly one point
        let pg3 = ProjectiveSpace::new(f.clone(), 3).unwrap();
        let tangent_planes = pg3
            .points()
            .iter()
            .filter(|h| h[..3].iter().any(|x| !x.is_zero()))
            .filter(|h| conic.points().iter().filter(|c| f.dot(&h[..3], &c[..]).is_zero()).count() == 1)
            .count();
        let q = q as usize;
        assert_eq!(tangent_planes, q * (q + 1));
        assert_eq!(t2.num_planes(), tangent_planes);
        assert_eq!(t2.num_affine(), q * q * q);
        let mut kinds = BTreeMap::new();
        for i in 0..t2.gq().num_points() {
            let k = match t2.point(i) {
                T2Point::Affine(_) => 0,
                T2Point::Plane(_) => 1,
                T2Point::Infinity => 2,
            };
            *kinds.entry(k).or_insert(0usize) += 1;
        }
        assert_eq!(kinds, BTreeMap::from([(0, q * q * q), (1, q * (q + 1)), (2, 1)]));
        assert!(matches!(t2.point(t2.gq().num_points() - 1), T2Point::Infinity));
    }
}

#[test]
fn section_census_at_three() {
    let f = field(3);
    let q4 = Q4Model::build(f.clone()).unwrap();
    let qd = q4.quadric();
    let mut by_size = BTreeMap::new();
    for h in qd.hyperplanes() {
        let brute = qd.space().points().iter().filter(|v| h.contains(&f, v) && qd.form().evaluate(&f, v).is_zero()).count();
        let (kind, n) = qd.classify_section(&h).unwrap();
        assert_eq!(n, brute);
        *by_size.entry((kind, n)).or_insert(0) += 1;
    }
    assert_eq!(
        by_size,
        BTreeMap::from([
            ((SectionType::Elliptic, 10), 36),
            ((SectionType::Hyperbolic, 16), 45),
            ((SectionType::Cone, 13), 40),
        ])
    );
}

#[test]
fn elliptic_sections_are_ovoids() {
    let f = field(3);
    let q4 = Q4Model::build(f.clone()).unwrap();
    let qd = q4.quadric();
    for h in qd.hyperplanes() {
        if qd.classify_section(&h).unwrap().0 != SectionType::Elliptic {
            continue;
        }
        let pts = qd.section(&h);
        assert!(check_partial_ovoid(q4.gq(), &pts));
        let k = PartialOvoid::new(q4.gq(), pts).unwrap();
        assert_eq!(k.len(), q4.gq().ovoid_size());
        assert!(is_maximal(q4.gq(), &k).maximal);
    }
    for line in q4.gq().lines() {
        assert!(!check_partial_ovoid(q4.gq(), line));
    }
}

#[test]
fn transport_is_an_isomorphism() {
    for q in [3u32, 5, 7] {
        let f = field(q);
        let q4 = Q4Model::build(f.clone()).unwrap();
        let t2 = T2Model::build(f.clone()).unwrap();
        for pivot in [0, q4.gq().num_points() / 2] {
            let tr = Transport::new(&q4, &t2, pivot).unwrap();
            tr.verify(&q4, &t2).unwrap();
            assert_eq!(tr.forward(pivot), t2.infinity());
            let image: std::collections::BTreeSet<usize> = (0..q4.gq().num_points()).map(|i| tr.forward(i)).collect();
            assert_eq!(image.len(), q4.gq().num_points());
            assert!((0..t2.gq().num_points()).all(|j| tr.forward(tr.backward(j)) == j));
        }
    }
}

#[test]
fn determined_directions_and_roundtrip() {
    let f = field(5);
    let t2 = T2Model::build(f.clone()).unwrap();
    let e = |v: [u32; 3]| v.map(|x| f.elem(x).unwrap());
    // two points differing in the first coordinate determine (1,0,0) on C
    let u = [e([0, 0, 0]), e([3, 0, 0])];
    let dirs = t2.determined_directions(&u);
    assert_eq!(dirs.into_iter().collect::<Vec<_>>(), vec![[Fe::ONE, Fe::ZERO, Fe::ZERO]]);
    assert!(t2.conic().contains(&f, &[Fe::ONE, Fe::ZERO, Fe::ZERO]));
    assert!(t2.determined_directions(&u[..1]).is_empty());

    let k = t2.k_from_u(&u[..1]).unwrap();
    assert_eq!(t2.u_from_k(&k).unwrap(), u[..1].to_vec());
    let model = Model::T2(t2);
    let back = model.from_file(&model.to_file(&k)).unwrap();
    assert_eq!(back, k);
}
