//! The two concrete models of the GQ of order q: the parabolic quadric
//! Q(4,q) and Tits' T2(C) over the conic `X1^2 = X0 X2` of the plane
//! `X3 = 0` in PG(3,q).

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{normalize, Hyperplane, Quadric, SectionType};
use crate::gf::{Fe, FieldCtx, FieldDescriptor};
use crate::gq::{Gq, GqCache, PartialOvoid, Subquadrangle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    Q4,
    T2,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Q4 => "q4",
            ModelKind::T2 => "t2",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "q4" => Ok(ModelKind::Q4),
            "t2" => Ok(ModelKind::T2),
            other => Err(Error::Model(format!("unknown model {other:?}"))),
        }
    }
}

/// One serialized member: a coordinate vector, `{"plane":[x,y,z,w]}` for a
/// tangent plane of T2(C), or the string `"inf"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MemberEnc {
    Point(Vec<u32>),
    Plane { plane: [u32; 4] },
    Symbol(String),
}

/// `{"model":"Q4"|"T2", "field":…, "members":[…]}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialOvoidFile {
    pub model: ModelKind,
    pub field: FieldDescriptor,
    pub members: Vec<MemberEnc>,
}

fn to_fe(f: &FieldCtx, raw: &[u32]) -> Result<Vec<Fe>> {
    raw.iter().map(|&x| f.elem(x)).collect()
}

fn cache_key(kind: ModelKind, f: &FieldCtx) -> String {
    let poly: Vec<String> = f.irreducible().iter().map(u32::to_string).collect();
    format!("{kind}-p{}-h{}-{}", f.p(), f.h(), poly.join("_"))
}

fn enc(v: &[Fe]) -> Vec<u32> {
    v.iter().map(|x| x.value()).collect()
}

/// Q(4,q) as a GQ; GQ point `i` is quadric point `i`.
pub struct Q4Model {
    quadric: Quadric,
    gq: Gq,
}

impl Q4Model {
    pub fn build(field: Arc<FieldCtx>) -> Result<Self> {
        Self::build_cached(field, None)
    }

    pub fn build_cached(field: Arc<FieldCtx>, cache: Option<&GqCache>) -> Result<Self> {
        let key = cache_key(ModelKind::Q4, &field);
        let quadric = Quadric::parabolic(field)?;
        let gq = Gq::new_cached(quadric.len(), quadric.ti_lines(), cache, &key)?;
        Ok(Q4Model { quadric, gq })
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        self.quadric.field()
    }

    pub fn quadric(&self) -> &Quadric {
        &self.quadric
    }

    pub fn gq(&self) -> &Gq {
        &self.gq
    }

    pub fn encode(&self, p: usize) -> MemberEnc {
        MemberEnc::Point(enc(self.quadric.coords(p)))
    }

    pub fn decode(&self, m: &MemberEnc) -> Result<usize> {
        let MemberEnc::Point(raw) = m else {
            return Err(Error::Model(format!("{m:?} is not a Q(4,q) point")));
        };
        let v = to_fe(self.field(), raw)?;
        self.quadric
            .index_of(&v)?
            .ok_or_else(|| Error::NotOnQuadric(raw.clone()))
    }

    /// The subquadrangle of lines missing `k`, checked to be exactly the
    /// point set of a hyperbolic hyperplane section. Returns that hyperplane.
    pub fn uncovered_section(&self, k: &PartialOvoid) -> Result<(Subquadrangle, Hyperplane)> {
        let sub = crate::gq::uncovered_subquadrangle(&self.gq, k)?;
        let h = self
            .quadric
            .span_hyperplane(&sub.points)
            .ok_or_else(|| Error::Model("uncovered points do not span a hyperplane".into()))?;
        let (kind, _) = self.quadric.classify_section(&h)?;
        if kind != SectionType::Hyperbolic || self.quadric.section(&h) != sub.points {
            return Err(Error::Model(format!(
                "uncovered points are not a hyperbolic section ({})",
                kind.name()
            )));
        }
        Ok((sub, h))
    }
}

/// The conic `X1^2 = X0 X2` in the plane at infinity, in coordinates
/// `(X0, X1, X2)` of that plane.
#[derive(Clone, Debug)]
pub struct Conic {
    points: Vec<[Fe; 3]>,
    tangents: Vec<[Fe; 3]>,
}

impl Conic {
    /// Points `(t^2, t, 1)` and `(1, 0, 0)`, normalized and sorted.
    pub fn canonical(f: &FieldCtx) -> Conic {
        let mut points: Vec<[Fe; 3]> = f
            .elements()
            .map(|t| [f.mul(t, t), t, Fe::ONE])
            .chain(std::iter::once([Fe::ONE, Fe::ZERO, Fe::ZERO]))
            .map(|v| normalize(f, &v).expect("nonzero").try_into().expect("3 coords"))
            .collect();
        points.sort();
        // gradient of X1^2 - X0 X2
        let tangents = points
            .iter()
            .map(|c| {
                let t = [f.neg(c[2]), f.add(c[1], c[1]), f.neg(c[0])];
                normalize(f, &t).expect("nonzero").try_into().expect("3 coords")
            })
            .collect();
        Conic { points, tangents }
    }

    pub fn points(&self) -> &[[Fe; 3]] {
        &self.points
    }

    /// Dual coordinates `(y,z,w)` of the tangent line at each point.
    pub fn tangents(&self) -> &[[Fe; 3]] {
        &self.tangents
    }

    pub fn contains(&self, f: &FieldCtx, v: &[Fe]) -> bool {
        !v.iter().all(|x| x.is_zero()) && f.mul(v[1], v[1]) == f.mul(v[0], v[2])
    }

    pub fn index_of(&self, f: &FieldCtx, v: &[Fe]) -> Option<usize> {
        let n: [Fe; 3] = normalize(f, v).ok()?.try_into().ok()?;
        self.points.binary_search(&n).ok()
    }

    /// Number of conic points on the line `l(y,z,w)`: 0, 1 or 2.
    pub fn meets(&self, f: &FieldCtx, line: &[Fe]) -> usize {
        self.points.iter().filter(|c| f.dot(*c, line).is_zero()).count()
    }

    pub fn is_tangent(&self, f: &FieldCtx, line: &[Fe]) -> bool {
        self.meets(f, line) == 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum T2Point {
    /// Type (i): the affine point `(a, b, c, 1)`.
    Affine([Fe; 3]),
    /// Type (ii): a plane meeting the conic in one point.
    Plane(Hyperplane),
    /// Type (iii).
    Infinity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum T2Line {
    /// Type (a): the affine line through `base` with direction conic point
    /// `conic`.
    Affine { conic: usize, base: [Fe; 3] },
    /// Type (b): a conic point.
    ConicPoint(usize),
}

/// T2(C): points are type (i) in `(a,b,c)` encoding order, then type (ii)
/// sorted by dual coordinates, then `(∞)`.
pub struct T2Model {
    field: Arc<FieldCtx>,
    conic: Conic,
    points: Vec<T2Point>,
    lines: Vec<T2Line>,
    plane_index: HashMap<Hyperplane, usize>,
    plane_tangency: Vec<usize>,
    gq: Gq,
}

impl T2Model {
    pub fn build(field: Arc<FieldCtx>) -> Result<Self> {
        Self::build_cached(field, None)
    }

    pub fn build_cached(field: Arc<FieldCtx>, cache: Option<&GqCache>) -> Result<Self> {
        let (points, lines, raw_lines, plane_index, plane_tangency, conic) = Self::construct(&field)?;
        let gq = Gq::new_cached(points.len(), raw_lines, cache, &cache_key(ModelKind::T2, &field))?;
        Ok(T2Model {
            field,
            conic,
            points,
            lines,
            plane_index,
            plane_tangency,
            gq,
        })
    }

    #[allow(clippy::type_complexity)]
    fn construct(
        f: &Arc<FieldCtx>,
    ) -> Result<(
        Vec<T2Point>,
        Vec<T2Line>,
        Vec<Vec<usize>>,
        HashMap<Hyperplane, usize>,
        Vec<usize>,
        Conic,
    )> {
        let q = f.q() as usize;
        let conic = Conic::canonical(f);
        let mut points: Vec<T2Point> = Vec::with_capacity(q * q * q + q * (q + 1) + 1);
        for a in f.elements() {
            for b in f.elements() {
                for c in f.elements() {
                    points.push(T2Point::Affine([a, b, c]));
                }
            }
        }

        // tangent planes: the q planes other than X3 = 0 through each tangent
        let mut planes: Vec<(Hyperplane, usize)> = Vec::new();
        for (ci, t) in conic.tangents().iter().enumerate() {
            for lambda in f.elements() {
                planes.push((Hyperplane::new(f, &[t[0], t[1], t[2], lambda])?, ci));
            }
        }
        planes.sort();
        let base = points.len();
        let mut plane_index = HashMap::new();
        let mut plane_tangency = Vec::new();
        for (k, (h, ci)) in planes.into_iter().enumerate() {
            plane_index.insert(h.clone(), base + k);
            plane_tangency.push(ci);
            points.push(T2Point::Plane(h));
        }
        let infinity = points.len();
        points.push(T2Point::Infinity);

        let mut lines = Vec::new();
        let mut raw_lines = Vec::new();
        for (ci, c) in conic.points().iter().enumerate() {
            let t = conic.tangents()[ci];
            for a in 0..q * q * q {
                let base_pt = affine_coords(f, a);
                let on_line: Vec<usize> = f
                    .elements()
                    .map(|lambda| {
                        let v: Vec<Fe> = (0..3).map(|i| f.add(base_pt[i], f.mul(lambda, c[i]))).collect();
                        affine_index(f, &v)
                    })
                    .collect();
                if on_line.iter().any(|&i| i < a) {
                    continue;
                }
                // the plane spanned by the line and the tangent at c
                let rhs = f.neg(f.dot(&t, &base_pt));
                let h = Hyperplane::new(f, &[t[0], t[1], t[2], rhs])?;
                let mut pts = on_line;
                pts.push(plane_index[&h]);
                pts.sort_unstable();
                raw_lines.push(pts);
                lines.push(T2Line::Affine {
                    conic: ci,
                    base: base_pt,
                });
            }
        }
        for ci in 0..conic.points().len() {
            let mut pts: Vec<usize> = plane_tangency
                .iter()
                .enumerate()
                .filter(|&(_, &c)| c == ci)
                .map(|(k, _)| base + k)
                .collect();
            pts.push(infinity);
            raw_lines.push(pts);
            lines.push(T2Line::ConicPoint(ci));
        }
        Ok((points, lines, raw_lines, plane_index, plane_tangency, conic))
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    pub fn conic(&self) -> &Conic {
        &self.conic
    }

    pub fn gq(&self) -> &Gq {
        &self.gq
    }

    pub fn point(&self, i: usize) -> &T2Point {
        &self.points[i]
    }

    pub fn line(&self, l: usize) -> &T2Line {
        &self.lines[l]
    }

    pub fn infinity(&self) -> usize {
        self.points.len() - 1
    }

    pub fn num_affine(&self) -> usize {
        let q = self.field.q() as usize;
        q * q * q
    }

    pub fn num_planes(&self) -> usize {
        self.plane_tangency.len()
    }

    pub fn affine_index(&self, v: &[Fe]) -> usize {
        affine_index(&self.field, v)
    }

    /// GQ index of a tangent plane, if the plane is one.
    pub fn plane_index(&self, h: &Hyperplane) -> Option<usize> {
        self.plane_index.get(h).copied()
    }

    /// Conic point touched by a type-(ii) point.
    pub fn tangency(&self, i: usize) -> Option<usize> {
        i.checked_sub(self.num_affine())
            .and_then(|k| self.plane_tangency.get(k).copied())
    }

    pub fn encode(&self, i: usize) -> MemberEnc {
        match &self.points[i] {
            T2Point::Affine(v) => {
                let mut e = enc(v);
                e.push(1);
                MemberEnc::Point(e)
            }
            T2Point::Plane(h) => MemberEnc::Plane {
                plane: enc(&h.plane_label()).try_into().expect("4 coords"),
            },
            T2Point::Infinity => MemberEnc::Symbol("inf".into()),
        }
    }

    pub fn decode(&self, m: &MemberEnc) -> Result<usize> {
        let f = &self.field;
        match m {
            MemberEnc::Point(raw) if raw.len() == 4 && raw[3] == 1 => {
                Ok(self.affine_index(&to_fe(f, &raw[..3])?))
            }
            MemberEnc::Plane { plane } => {
                let label: [Fe; 4] = to_fe(f, plane)?.try_into().expect("4 coords");
                let h = Hyperplane::plane_from_label(f, label)?;
                self.plane_index(&h)
                    .ok_or_else(|| Error::Model(format!("plane {plane:?} is not tangent to the conic")))
            }
            MemberEnc::Symbol(s) if s == "inf" => Ok(self.infinity()),
            other => Err(Error::Model(format!("{other:?} is not a T2(C) point"))),
        }
    }

    /// The affine set U of a partial ovoid containing `(∞)`.
    pub fn u_from_k(&self, k: &PartialOvoid) -> Result<Vec<[Fe; 3]>> {
        if !k.contains(self.infinity()) {
            return Err(Error::Model("(∞) is not a member".into()));
        }
        let mut u = Vec::with_capacity(k.len() - 1);
        for &m in k.members() {
            match &self.points[m] {
                T2Point::Affine(v) => u.push(*v),
                T2Point::Plane(_) => {
                    return Err(Error::Model(format!(
                        "member {m} is a tangent plane, impossible alongside (∞)"
                    )))
                }
                T2Point::Infinity => {}
            }
        }
        if let Some(d) = self.determined_directions(&u).iter().find(|d| self.conic.contains(&self.field, *d)) {
            return Err(Error::Model(format!("U determines the conic point {:?}", enc(d))));
        }
        Ok(u)
    }

    pub fn k_from_u(&self, u: &[[Fe; 3]]) -> Result<PartialOvoid> {
        let mut members: Vec<usize> = u.iter().map(|v| self.affine_index(v)).collect();
        members.push(self.infinity());
        PartialOvoid::new(&self.gq, members)
    }

    /// Points of the plane at infinity on a line joining two points of `u`.
    pub fn determined_directions(&self, u: &[[Fe; 3]]) -> BTreeSet<[Fe; 3]> {
        determined_directions(&self.field, u)
    }

    /// For every plane other than `X3 = 0` whose trace at infinity meets the
    /// conic, at most q points of `u` lie on it.
    pub fn pigeon_holds(&self, u: &[[Fe; 3]]) -> bool {
        let f = &self.field;
        let q = f.q() as usize;
        let space = crate::geometry::ProjectiveSpace::new(f.clone(), 3).expect("PG(3,q)");
        space.points().iter().all(|h| {
            let trace = &h[..3];
            if trace.iter().all(|x| x.is_zero()) || self.conic.meets(f, trace) == 0 {
                return true;
            }
            let count = u
                .iter()
                .filter(|p| f.add(f.dot(trace, *p), h[3]).is_zero())
                .count();
            count <= q
        })
    }
}

pub fn affine_coords(f: &FieldCtx, i: usize) -> [Fe; 3] {
    let q = f.q() as usize;
    [i / (q * q), i / q % q, i % q].map(|v| f.elem(v as u32).expect("index below q^3"))
}

fn affine_index(f: &FieldCtx, v: &[Fe]) -> usize {
    let q = f.q() as usize;
    v.iter().fold(0, |acc, x| acc * q + x.value() as usize)
}

/// Normalized directions of all lines through two points of `u`.
pub fn determined_directions(f: &FieldCtx, u: &[[Fe; 3]]) -> BTreeSet<[Fe; 3]> {
    let mut out = BTreeSet::new();
    for (i, a) in u.iter().enumerate() {
        for b in &u[i + 1..] {
            let d: Vec<Fe> = (0..3).map(|k| f.sub(b[k], a[k])).collect();
            if let Ok(n) = normalize(f, &d) {
                out.insert(n.try_into().expect("3 coords"));
            }
        }
    }
    out
}

/// Either model behind one interface.
pub enum Model {
    Q4(Q4Model),
    T2(T2Model),
}

impl Model {
    pub fn build(kind: ModelKind, field: Arc<FieldCtx>) -> Result<Self> {
        Self::build_cached(kind, field, None)
    }

    pub fn build_cached(kind: ModelKind, field: Arc<FieldCtx>, cache: Option<&GqCache>) -> Result<Self> {
        Ok(match kind {
            ModelKind::Q4 => Model::Q4(Q4Model::build_cached(field, cache)?),
            ModelKind::T2 => Model::T2(T2Model::build_cached(field, cache)?),
        })
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Q4(_) => ModelKind::Q4,
            Model::T2(_) => ModelKind::T2,
        }
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        match self {
            Model::Q4(m) => m.field(),
            Model::T2(m) => m.field(),
        }
    }

    pub fn gq(&self) -> &Gq {
        match self {
            Model::Q4(m) => m.gq(),
            Model::T2(m) => m.gq(),
        }
    }

    pub fn encode(&self, i: usize) -> MemberEnc {
        match self {
            Model::Q4(m) => m.encode(i),
            Model::T2(m) => m.encode(i),
        }
    }

    pub fn decode(&self, e: &MemberEnc) -> Result<usize> {
        match self {
            Model::Q4(m) => m.decode(e),
            Model::T2(m) => m.decode(e),
        }
    }

    pub fn to_file(&self, k: &PartialOvoid) -> PartialOvoidFile {
        PartialOvoidFile {
            model: self.kind(),
            field: self.field().descriptor(),
            members: k.members().iter().map(|&i| self.encode(i)).collect(),
        }
    }

    /// Decodes a file written for this model. Collinear members are an
    /// error.
    pub fn from_file(&self, file: &PartialOvoidFile) -> Result<PartialOvoid> {
        if file.model != self.kind() || file.field != self.field().descriptor() {
            return Err(Error::FieldMismatch(format!(
                "file is for {} over {:?}",
                file.model, file.field
            )));
        }
        let members = file
            .members
            .iter()
            .map(|m| self.decode(m))
            .collect::<Result<Vec<_>>>()?;
        PartialOvoid::new(self.gq(), members)
    }
}
