//! An explicit isomorphism Q(4,q) -> T2(C) sending a chosen quadric point
//! to `(∞)`.
//!
//! A similarity takes the quadric form to `Y1^2 - Y0 Y2 + Y3 Y4` with the
//! chosen point at `e4`. Points with `Y3 != 0` are the affine points
//! `(Y0,Y1,Y2)/Y3`; a point `(c, 0, λ)` with `c` on the conic becomes the
//! plane `t_c · X + λ X3 = 0` through the tangent at `c`; `e4` is `(∞)`.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::geometry::{normalize, Hyperplane};
use crate::gf::{Fe, FieldCtx};
use crate::gq::PartialOvoid;
use crate::linalg::{self, Matrix};
use crate::models::{Q4Model, T2Model};

#[derive(Clone, Debug)]
pub struct Transport {
    pivot: usize,
    forward: Vec<usize>,
    backward: Vec<usize>,
}

impl Transport {
    /// Isomorphism sending Q(4,q) point `pivot` to `(∞)`.
    pub fn new(q4: &Q4Model, t2: &T2Model, pivot: usize) -> Result<Self> {
        let f = q4.field();
        if f.descriptor() != t2.field().descriptor() {
            return Err(Error::FieldMismatch("Q(4,q) and T2(C) use different fields".into()));
        }
        let quad = q4.quadric();
        if pivot >= quad.len() {
            return Err(Error::PointOutOfRange(pivot));
        }
        let inv = linalg::inverse(f, &similarity(q4, pivot)?)?;

        let mut forward = Vec::with_capacity(quad.len());
        for i in 0..quad.len() {
            let y = linalg::mat_vec(f, &inv, quad.coords(i));
            forward.push(image(f, t2, &y)?);
        }
        let mut backward = vec![usize::MAX; forward.len()];
        for (i, &j) in forward.iter().enumerate() {
            if j >= backward.len() || backward[j] != usize::MAX {
                return Err(Error::Model(format!("transport is not injective at {i}")));
            }
            backward[j] = i;
        }
        Ok(Transport {
            pivot,
            forward,
            backward,
        })
    }

    pub fn pivot(&self) -> usize {
        self.pivot
    }

    pub fn forward(&self, q4_point: usize) -> usize {
        self.forward[q4_point]
    }

    pub fn backward(&self, t2_point: usize) -> usize {
        self.backward[t2_point]
    }

    /// Checks that every line of Q(4,q) maps onto a line of T2(C).
    pub fn verify(&self, q4: &Q4Model, t2: &T2Model) -> Result<()> {
        let target: HashSet<&[usize]> = t2.gq().lines().iter().map(Vec::as_slice).collect();
        for (l, line) in q4.gq().lines().iter().enumerate() {
            let mut img: Vec<usize> = line.iter().map(|&p| self.forward[p]).collect();
            img.sort_unstable();
            if !target.contains(img.as_slice()) {
                return Err(Error::Model(format!("line {l} does not map to a line")));
            }
        }
        Ok(())
    }

    pub fn to_t2(&self, t2: &T2Model, k: &PartialOvoid) -> Result<PartialOvoid> {
        PartialOvoid::new(t2.gq(), k.members().iter().map(|&p| self.forward[p]).collect())
    }

    pub fn to_q4(&self, q4: &Q4Model, k: &PartialOvoid) -> Result<PartialOvoid> {
        PartialOvoid::new(q4.gq(), k.members().iter().map(|&p| self.backward[p]).collect())
    }
}

/// Columns are the images of `e0..e4`; the quadric form pulls back to
/// `d (Y1^2 - Y0 Y2 + Y3 Y4)` with `d = Q(image of e1)`.
fn similarity(q4: &Q4Model, pivot: usize) -> Result<Matrix> {
    let f = q4.field();
    let quad = q4.quadric();
    let p = quad.coords(pivot).to_vec();
    let b = |u: &[Fe], v: &[Fe]| quad.polar(u, v);
    let scale = |c: Fe, v: &[Fe]| v.iter().map(|&x| f.mul(c, x)).collect::<Vec<Fe>>();
    let fail = |what: &str| Error::Model(format!("transport basis: no {what}"));

    let r = (0..quad.len())
        .map(|i| quad.coords(i))
        .find(|r| !b(&p, r).is_zero())
        .ok_or_else(|| fail("non-collinear point"))?
        .to_vec();
    // the conic <p, r>^perp ∩ Q
    let mut conic = (0..quad.len())
        .map(|i| quad.coords(i))
        .filter(|x| b(x, &p).is_zero() && b(x, &r).is_zero());
    let u = conic.next().ok_or_else(|| fail("conic point"))?.to_vec();
    let v = conic.next().ok_or_else(|| fail("second conic point"))?.to_vec();
    let rows: Matrix = [&p, &r, &u, &v]
        .iter()
        .map(|x| (0..5).map(|j| {
            let mut e = vec![Fe::ZERO; 5];
            e[j] = Fe::ONE;
            b(x, &e)
        }).collect())
        .collect();
    let w = linalg::nullspace(f, &rows, 5)
        .into_iter()
        .next()
        .ok_or_else(|| fail("orthogonal vector"))?;
    let d = quad.form().evaluate(f, &w);
    if d.is_zero() {
        return Err(fail("anisotropic vector"));
    }

    let e2 = scale(f.neg(f.div(d, b(&u, &v))?), &v);
    let e3 = scale(f.div(d, b(&r, &p))?, &r);
    let cols = [u, w, e2, e3, p];
    Ok((0..5).map(|i| cols.iter().map(|c| c[i]).collect()).collect())
}

fn image(f: &FieldCtx, t2: &T2Model, y: &[Fe]) -> Result<usize> {
    if !y[3].is_zero() {
        let inv = f.inv(y[3])?;
        let a: Vec<Fe> = y[..3].iter().map(|&x| f.mul(x, inv)).collect();
        return Ok(t2.affine_index(&a));
    }
    if y[..3].iter().all(|x| x.is_zero()) {
        return Ok(t2.infinity());
    }
    let n = normalize(f, &[y[0], y[1], y[2], y[4]])?;
    let t = [f.neg(n[2]), f.add(n[1], n[1]), f.neg(n[0])];
    let h = Hyperplane::new(f, &[t[0], t[1], t[2], n[3]])?;
    t2.plane_index(&h)
        .ok_or_else(|| Error::Model(format!("image plane {:?} is not tangent", h.plane_label())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn transport_is_an_isomorphism() {
        for q in [3, 5] {
            let f = Arc::new(FieldCtx::of_order(q).unwrap());
            let q4 = Q4Model::build(f.clone()).unwrap();
            let t2 = T2Model::build(f.clone()).unwrap();
            for pivot in [0, 7, q4.quadric().len() - 1] {
                let tr = Transport::new(&q4, &t2, pivot).unwrap();
                assert_eq!(tr.forward(pivot), t2.infinity());
                tr.verify(&q4, &t2).unwrap();
                for i in 0..q4.quadric().len() {
                    assert_eq!(tr.backward(tr.forward(i)), i);
                }
            }
        }
    }
}
