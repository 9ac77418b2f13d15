//! Small dense linear algebra over a [`FieldCtx`].

use crate::error::{Error, Result};
use crate::gf::{Fe, FieldCtx};

pub type Matrix = Vec<Vec<Fe>>;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(f: &FieldCtx, m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let inv = f.inv(m[r][c]).expect("pivot is nonzero");
        for x in m[r].iter_mut() {
            *x = f.mul(*x, inv);
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c];
                for j in 0..cols {
                    let t = f.mul(factor, m[r][j]);
                    m[i][j] = f.sub(m[i][j], t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(f: &FieldCtx, m: &Matrix) -> usize {
    let mut m = m.clone();
    rref(f, &mut m).len()
}

/// Basis of `{v : m v = 0}`; `cols` is needed when `m` has no rows.
pub fn nullspace(f: &FieldCtx, m: &Matrix, cols: usize) -> Vec<Vec<Fe>> {
    let mut m = m.clone();
    let pivots = rref(f, &mut m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![Fe::ZERO; cols];
            v[fc] = Fe::ONE;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(m[r][fc]);
            }
            v
        })
        .collect()
}

pub fn inverse(f: &FieldCtx, m: &Matrix) -> Result<Matrix> {
    let n = m.len();
    let mut aug: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Fe::ONE } else { Fe::ZERO }));
            r
        })
        .collect();
    let pivots = rref(f, &mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return Err(Error::InvalidDimension("singular matrix".into()));
    }
    Ok(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_vec(f: &FieldCtx, m: &Matrix, v: &[Fe]) -> Vec<Fe> {
    m.iter().map(|row| f.dot(row, v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        let f = FieldCtx::new(7, 1).unwrap();
        let e = |n| f.from_int(n);
        let m = vec![
            vec![e(1), e(2), e(0)],
            vec![e(0), e(1), e(3)],
            vec![e(4), e(0), e(1)],
        ];
        let inv = inverse(&f, &m).unwrap();
        for i in 0..3 {
            let col: Vec<Fe> = (0..3).map(|k| inv[k][i]).collect();
            let img = mat_vec(&f, &m, &col);
            for (j, x) in img.iter().enumerate() {
                assert_eq!(*x, if i == j { Fe::ONE } else { Fe::ZERO });
            }
        }
    }

    #[test]
    fn nullspace_of_rank_one() {
        let f = FieldCtx::new(5, 1).unwrap();
        let m = vec![vec![f.from_int(1), f.from_int(2), f.from_int(3)]];
        let ns = nullspace(&f, &m, 3);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(mat_vec(&f, &m, &v).iter().all(|x| x.is_zero()));
        }
        assert!(inverse(&f, &vec![vec![Fe::ONE, Fe::ONE], vec![Fe::ONE, Fe::ONE]]).is_err());
    }
}
