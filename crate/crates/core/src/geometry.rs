//! Projective spaces PG(n,q), quadratic forms and the quadrics of PG(4,q).

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Fe, FieldCtx, FieldDescriptor};
use crate::linalg;

const NONE: u32 = u32::MAX;
const LOOKUP_LIMIT: u64 = 1 << 26;

/// Scales `v` so that its first nonzero coordinate is 1.
pub fn normalize(f: &FieldCtx, v: &[Fe]) -> Result<Vec<Fe>> {
    let lead = v.iter().copied().find(|x| !x.is_zero()).ok_or(Error::ZeroVector)?;
    let s = f.inv(lead)?;
    Ok(v.iter().map(|&x| f.mul(x, s)).collect())
}

/// The points of PG(n,q), normalized and sorted lexicographically.
pub struct ProjectiveSpace {
    field: Arc<FieldCtx>,
    n: usize,
    points: Vec<Vec<Fe>>,
    lookup: Vec<u32>,
}

impl ProjectiveSpace {
    pub fn new(field: Arc<FieldCtx>, n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidDimension(format!("PG({n},q) needs n >= 1")));
        }
        let q = field.q() as u64;
        let total = q
            .checked_pow(n as u32 + 1)
            .filter(|&t| t <= LOOKUP_LIMIT)
            .ok_or_else(|| Error::InvalidDimension(format!("PG({n},{q}) is too large")))?;
        let mut points = Vec::with_capacity(((total - 1) / (q - 1)) as usize);
        for lead in 0..=n {
            let free = n - lead;
            for code in 0..q.pow(free as u32) {
                let mut v = vec![Fe::ZERO; n + 1];
                v[lead] = Fe::ONE;
                let mut c = code;
                for k in (lead + 1..=n).rev() {
                    v[k] = field.elem((c % q) as u32)?;
                    c /= q;
                }
                points.push(v);
            }
        }
        points.sort();
        let mut space = ProjectiveSpace {
            field,
            n,
            points,
            lookup: vec![NONE; total as usize],
        };
        for i in 0..space.points.len() {
            let key = space.key(&space.points[i]);
            space.lookup[key] = i as u32;
        }
        Ok(space)
    }

    fn key(&self, v: &[Fe]) -> usize {
        let q = self.field.q() as usize;
        v.iter().fold(0usize, |acc, x| acc * q + x.value() as usize)
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[Fe] {
        &self.points[i]
    }

    pub fn points(&self) -> &[Vec<Fe>] {
        &self.points
    }

    /// Index of the projective point spanned by `v` (any scalar multiple).
    pub fn index_of(&self, v: &[Fe]) -> Result<usize> {
        if v.len() != self.n + 1 {
            return Err(Error::InvalidDimension(format!(
                "expected {} coordinates, got {}",
                self.n + 1,
                v.len()
            )));
        }
        let nv = normalize(&self.field, v)?;
        Ok(self.lookup[self.key(&nv)] as usize)
    }

    /// All points on the line through two distinct points.
    pub fn line_through(&self, a: &[Fe], b: &[Fe]) -> Vec<usize> {
        let f = &self.field;
        let mut out = vec![self.index_of(b).expect("nonzero")];
        for lambda in f.elements() {
            let v: Vec<Fe> = a.iter().zip(b).map(|(&x, &y)| f.add(x, f.mul(lambda, y))).collect();
            out.push(self.index_of(&v).expect("distinct points span a line"));
        }
        out.sort_unstable();
        out
    }
}

/// A hyperplane, stored by its normalized dual coordinates `u`: the points
/// `v` with `u . v = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hyperplane {
    dual: Vec<Fe>,
}

impl Hyperplane {
    pub fn new(f: &FieldCtx, dual: &[Fe]) -> Result<Self> {
        Ok(Hyperplane {
            dual: normalize(f, dual)?,
        })
    }

    pub fn dual(&self) -> &[Fe] {
        &self.dual
    }

    pub fn contains(&self, f: &FieldCtx, v: &[Fe]) -> bool {
        f.dot(&self.dual, v).is_zero()
    }

    /// Plane `y X0 + z X1 + w X2 + x X3 = 0` of PG(3,q), given as `(x,y,z,w)`.
    pub fn plane_from_label(f: &FieldCtx, label: [Fe; 4]) -> Result<Self> {
        let [x, y, z, w] = label;
        Self::new(f, &[y, z, w, x])
    }

    /// The `(x,y,z,w)` label of a plane of PG(3,q), scaled so the dual vector
    /// is normalized.
    pub fn plane_label(&self) -> [Fe; 4] {
        [self.dual[3], self.dual[0], self.dual[1], self.dual[2]]
    }
}

/// `Q(v) = sum_{i<=j} c_ij v_i v_j` with an upper-triangular coefficient matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    coeffs: Vec<Vec<Fe>>,
}

impl QuadraticForm {
    pub fn zero(dim: usize) -> Self {
        QuadraticForm {
            coeffs: vec![vec![Fe::ZERO; dim]; dim],
        }
    }

    /// Sets `c_ij`; the pair is sorted so only the upper triangle is used.
    pub fn with(mut self, i: usize, j: usize, c: Fe) -> Self {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.coeffs[i][j] = c;
        self
    }

    /// `X0^2 + X1 X2 + X3 X4`.
    pub fn parabolic() -> Self {
        Self::zero(5)
            .with(0, 0, Fe::ONE)
            .with(1, 2, Fe::ONE)
            .with(3, 4, Fe::ONE)
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Vec<Fe>] {
        &self.coeffs
    }

    pub fn evaluate(&self, f: &FieldCtx, v: &[Fe]) -> Fe {
        let mut acc = Fe::ZERO;
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, &c) in row.iter().enumerate().skip(i) {
                if !c.is_zero() {
                    acc = f.add(acc, f.mul(c, f.mul(v[i], v[j])));
                }
            }
        }
        acc
    }

    /// Gram matrix of `b(u,v) = Q(u+v) - Q(u) - Q(v)`.
    pub fn polar_matrix(&self, f: &FieldCtx) -> linalg::Matrix {
        let d = self.dim();
        let mut m = vec![vec![Fe::ZERO; d]; d];
        for i in 0..d {
            for j in i..d {
                let c = self.coeffs[i][j];
                if i == j {
                    m[i][i] = f.add(c, c);
                } else {
                    m[i][j] = c;
                    m[j][i] = c;
                }
            }
        }
        m
    }

    pub fn polar(&self, f: &FieldCtx, u: &[Fe], v: &[Fe]) -> Fe {
        let m = self.polar_matrix(f);
        f.dot(u, &linalg::mat_vec(f, &m, v))
    }

    /// Non-singular: no point of the quadric lies in the radical of the
    /// polar form. For odd q the radical is the nullspace of the Gram matrix.
    pub fn is_nonsingular(&self, f: &FieldCtx) -> bool {
        let m = self.polar_matrix(f);
        let ns = linalg::nullspace(f, &m, self.dim());
        match ns.len() {
            0 => true,
            // a 1-dimensional radical is harmless only if it is anisotropic
            1 => !self.evaluate(f, &ns[0]).is_zero(),
            _ => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SectionType {
    Elliptic,
    Hyperbolic,
    Cone,
}

impl SectionType {
    pub fn name(self) -> &'static str {
        match self {
            SectionType::Elliptic => "elliptic",
            SectionType::Hyperbolic => "hyperbolic",
            SectionType::Cone => "cone",
        }
    }
}

/// The points of a quadric `Q = 0` in PG(n,q), with cached polar hyperplanes.
pub struct Quadric {
    field: Arc<FieldCtx>,
    form: QuadraticForm,
    gram: linalg::Matrix,
    space: ProjectiveSpace,
    points: Vec<u32>,
    pg_to_quadric: Vec<u32>,
    perps: Vec<Vec<Fe>>,
}

impl Quadric {
    pub fn new(field: Arc<FieldCtx>, form: QuadraticForm) -> Result<Self> {
        if form.dim() < 2 {
            return Err(Error::InvalidDimension("form needs at least 2 variables".into()));
        }
        let space = ProjectiveSpace::new(field.clone(), form.dim() - 1)?;
        let gram = form.polar_matrix(&field);
        let mut points = Vec::new();
        let mut pg_to_quadric = vec![NONE; space.len()];
        for (i, v) in space.points().iter().enumerate() {
            if form.evaluate(&field, v).is_zero() {
                pg_to_quadric[i] = points.len() as u32;
                points.push(i as u32);
            }
        }
        let perps = points
            .iter()
            .map(|&i| linalg::mat_vec(&field, &gram, space.point(i as usize)))
            .collect();
        Ok(Quadric {
            field,
            form,
            gram,
            space,
            points,
            pg_to_quadric,
            perps,
        })
    }

    /// Q(4,q) for the form `X0^2 + X1 X2 + X3 X4`.
    pub fn parabolic(field: Arc<FieldCtx>) -> Result<Self> {
        let form = QuadraticForm::parabolic();
        if !form.is_nonsingular(&field) {
            return Err(Error::InvalidDimension("parabolic form is singular".into()));
        }
        Self::new(field, form)
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    pub fn form(&self) -> &QuadraticForm {
        &self.form
    }

    pub fn space(&self) -> &ProjectiveSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn coords(&self, i: usize) -> &[Fe] {
        self.space.point(self.points[i] as usize)
    }

    /// Quadric index of the projective point spanned by `v`, if it is on Q.
    pub fn index_of(&self, v: &[Fe]) -> Result<Option<usize>> {
        let pg = self.space.index_of(v)?;
        let qi = self.pg_to_quadric[pg];
        Ok((qi != NONE).then_some(qi as usize))
    }

    pub fn polar(&self, u: &[Fe], v: &[Fe]) -> Fe {
        self.field.dot(u, &linalg::mat_vec(&self.field, &self.gram, v))
    }

    /// The polar hyperplane `{v : b(P,v) = 0}` of an arbitrary point.
    pub fn perp(&self, v: &[Fe]) -> Result<Hyperplane> {
        Hyperplane::new(&self.field, &linalg::mat_vec(&self.field, &self.gram, v))
    }

    /// Tangent hyperplane at a quadric point.
    pub fn perp_of(&self, i: usize) -> Hyperplane {
        Hyperplane::new(&self.field, &self.perps[i]).expect("nonsingular form")
    }

    /// Two quadric points are collinear on the quadric iff they are
    /// distinct and orthogonal.
    pub fn collinear(&self, i: usize, j: usize) -> bool {
        i != j && self.field.dot(&self.perps[i], self.coords(j)).is_zero()
    }

    /// Quadric indices on the hyperplane, ascending.
    pub fn section(&self, h: &Hyperplane) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| h.contains(&self.field, self.coords(i)))
            .collect()
    }

    /// All hyperplanes of the ambient space, in point enumeration order.
    pub fn hyperplanes(&self) -> impl Iterator<Item = Hyperplane> + '_ {
        self.space.points().iter().map(|v| Hyperplane { dual: v.clone() })
    }

    pub fn num_hyperplanes(&self) -> usize {
        self.space.len()
    }

    /// Section type of a hyperplane of PG(4,q), by point count.
    pub fn classify_section(&self, h: &Hyperplane) -> Result<(SectionType, usize)> {
        let count = self.section(h).len();
        Ok((self.classify_count(count)?, count))
    }

    pub fn classify_count(&self, count: usize) -> Result<SectionType> {
        let q = self.field.q() as usize;
        if self.form.dim() != 5 {
            return Err(Error::InvalidDimension("sections are classified in PG(4,q)".into()));
        }
        if count == q * q + 1 {
            Ok(SectionType::Elliptic)
        } else if count == (q + 1) * (q + 1) {
            Ok(SectionType::Hyperbolic)
        } else if count == q * q + q + 1 {
            Ok(SectionType::Cone)
        } else {
            Err(Error::UnexpectedSection {
                count,
                q: q as u32,
            })
        }
    }

    /// Lines of the ambient space contained in the quadric, each as a sorted
    /// list of quadric indices. Sorted by their smallest two points.
    pub fn ti_lines(&self) -> Vec<Vec<usize>> {
        let mut lines = Vec::new();
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                if !self.collinear(i, j) {
                    continue;
                }
                let pts = self.space.line_through(self.coords(i), self.coords(j));
                let mut line: Vec<usize> = pts
                    .iter()
                    .map(|&pg| self.pg_to_quadric[pg] as usize)
                    .collect();
                line.sort_unstable();
                // emit each line once, from its two smallest points
                if line[0] == i && line[1] == j {
                    lines.push(line);
                }
            }
        }
        lines
    }

    /// The hyperplane spanned by a point set, if it spans exactly one.
    pub fn span_hyperplane(&self, pts: &[usize]) -> Option<Hyperplane> {
        let m: linalg::Matrix = pts.iter().map(|&i| self.coords(i).to_vec()).collect();
        let ns = linalg::nullspace(&self.field, &m, self.form.dim());
        (ns.len() == 1).then(|| Hyperplane::new(&self.field, &ns[0]).expect("nonzero"))
    }

    /// For `P` off the hyperbolic section `qplus`: the conic
    /// `C_P = P^perp ∩ Q+` spans a plane whose polar line meets the quadric
    /// in `P` and one further point, the antipode.
    pub fn antipode(&self, qplus: &Hyperplane, p: usize) -> Result<usize> {
        let f = &self.field;
        let (kind, _) = self.classify_section(qplus)?;
        if kind != SectionType::Hyperbolic {
            return Err(Error::Antipode(format!("section is {}", kind.name())));
        }
        if qplus.contains(f, self.coords(p)) {
            return Err(Error::Antipode(format!("point {p} lies on Q+")));
        }
        let conic: Vec<usize> = self
            .section(qplus)
            .into_iter()
            .filter(|&r| self.collinear(p, r))
            .collect();
        let rows: linalg::Matrix = conic.iter().map(|&r| self.perps[r].clone()).collect();
        let basis = linalg::nullspace(f, &rows, self.form.dim());
        if basis.len() != 2 {
            return Err(Error::Antipode(format!(
                "C_P^perp has dimension {} (|C_P| = {})",
                basis.len(),
                conic.len()
            )));
        }
        let on_line = self.space.line_through(&basis[0], &basis[1]);
        let others: Vec<usize> = on_line
            .iter()
            .filter_map(|&pg| {
                let qi = self.pg_to_quadric[pg];
                (qi != NONE && qi as usize != p).then_some(qi as usize)
            })
            .collect();
        match others.as_slice() {
            [a] => Ok(*a),
            _ => Err(Error::Antipode(format!(
                "polar line meets the quadric in {} further points",
                others.len()
            ))),
        }
    }
}

/// JSON form of a point set: `{"field":…, "n":…, "points":[[…],…]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSetFile {
    pub field: FieldDescriptor,
    pub n: usize,
    pub points: Vec<Vec<u32>>,
}

impl PointSetFile {
    pub fn from_points(space: &ProjectiveSpace, indices: &[usize]) -> Self {
        PointSetFile {
            field: space.field().descriptor(),
            n: space.dim(),
            points: indices
                .iter()
                .map(|&i| space.point(i).iter().map(|x| x.value()).collect())
                .collect(),
        }
    }

    /// Resolves the listed coordinates to indices of `space`.
    pub fn resolve(&self, space: &ProjectiveSpace) -> Result<Vec<usize>> {
        if self.field != space.field().descriptor() || self.n != space.dim() {
            return Err(Error::FieldMismatch("point set does not match the space".into()));
        }
        self.points
            .iter()
            .map(|p| {
                let v = p
                    .iter()
                    .map(|&x| space.field().elem(x))
                    .collect::<Result<Vec<_>>>()?;
                space.index_of(&v)
            })
            .collect()
    }
}
