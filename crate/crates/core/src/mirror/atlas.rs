//! The resolution atlas: chamber charts glued by wall-crossing maps, stratum charts glued by
//! frame monomials, and the symbolic checks that the gluing is well defined.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arrangement::HypertoricData;
use crate::linalg::IntMatrix;
use crate::symbolic::{dlog, LogForm, Monomial, RationalFn, Var};
use crate::tropical::{
    admissible, build_tropical, stratum_frame, wall_sets, Stratum, StratumFrame,
    TropicalArrangement,
};

use super::wall::WallMonomial;
use super::{
    chart_u, chart_v, generating_functions_factored, j_collection, small, wall_factor, z_var,
    MirrorError,
};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ChartId {
    Chamber(Vec<usize>),
    /// Index into the arrangement's strata.
    Stratum(usize),
}

impl fmt::Display for ChartId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChartId::Chamber(h) => {
                let parts: Vec<String> = h.iter().map(|m| m.to_string()).collect();
                write!(f, "({})", parts.join(","))
            }
            ChartId::Stratum(i) => write!(f, "S{i}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChartKind {
    Chamber,
    Stratum,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumChart {
    pub ties: BTreeMap<usize, Vec<usize>>,
    pub frame: StratumFrame,
    pub adjacent: Vec<Vec<usize>>,
    /// Tied hyperplane → `x` variables, one per facet.
    pub x: BTreeMap<usize, Vec<Var>>,
    pub y: Vec<Var>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    pub id: ChartId,
    pub kind: ChartKind,
    pub name: String,
    pub variables: Vec<Var>,
    /// `lhs = rhs` relations cutting out the chart.
    pub relations: Vec<(RationalFn, RationalFn)>,
    pub stratum: Option<StratumChart>,
}

/// Target variable → image in source variables; the `𝐙` are identified trivially.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub source: ChartId,
    pub target: ChartId,
    pub images: BTreeMap<Var, WallMonomial>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atlas {
    pub data: HypertoricData,
    pub arrangement: TropicalArrangement,
    pub charts: Vec<Chart>,
    /// Both directions of every adjacent chamber pair.
    pub chamber_transitions: Vec<Transition>,
    /// Chamber → admissible stratum embeddings.
    pub embeddings: Vec<Transition>,
    /// Chamber index pairs sharing a facet.
    pub adjacency: Vec<(usize, usize)>,
    pub non_admissible: Vec<usize>,
}

fn chamber_coords(d: usize) -> Vec<Var> {
    (1..=d).map(chart_u).chain((1..=d).map(z_var)).collect()
}

fn x_var(j: usize, k: usize) -> Var {
    Var::new(format!("x{}_{}", j + 1, k + 1))
}

fn y_var(r: usize) -> Var {
    Var::new(format!("y{}", r + 1))
}

fn u_monomial(v: &[BigInt]) -> Monomial {
    Monomial::from_pairs(
        v.iter()
            .enumerate()
            .map(|(i, e)| (chart_u(i + 1), small(e))),
    )
}

/// `ψ_{𝐡,𝐡'}` from the wall sets and `δ` rules.
pub fn chamber_transition(
    h: &HypertoricData,
    from: &[usize],
    to: &[usize],
) -> Result<Transition, MirrorError> {
    let walls = wall_sets(h.d, from, to)?;
    let mut images = BTreeMap::new();
    for w in walls {
        let e = i64::from(w.delta_backward) - i64::from(w.delta_forward);
        let mut u = WallMonomial::var(chart_u(w.j));
        let mut v = WallMonomial::var(chart_v(w.j));
        for &k in &w.walls {
            u.add_factor(k, e);
            v.add_factor(k, -e);
        }
        images.insert(chart_u(w.j), u);
        images.insert(chart_v(w.j), v);
    }
    Ok(Transition {
        source: ChartId::Chamber(from.to_vec()),
        target: ChartId::Chamber(to.to_vec()),
        images,
    })
}

/// `ψ_{𝐡,Θ}`: `y_r = 𝐮^{t_r}` and `x_{j,k} = 𝐮^{a_k}`, times `(1+𝐙_j)` when facet `k` is
/// opposite the chamber's vertex.
pub fn stratum_embedding(chamber: &[usize], index: usize, chart: &StratumChart) -> Transition {
    let mut images = BTreeMap::new();
    for (r, t) in chart.frame.tangent.iter().enumerate() {
        images.insert(chart.y[r].clone(), WallMonomial::monomial(u_monomial(t)));
    }
    for (&j, verts) in &chart.ties {
        for (k, a) in chart.frame.normals[&j].iter().enumerate() {
            let mut img = WallMonomial::monomial(u_monomial(a));
            if verts[k] == chamber[j] {
                img.add_factor(j, 1);
            }
            images.insert(chart.x[&j][k].clone(), img);
        }
    }
    Transition {
        source: ChartId::Chamber(chamber.to_vec()),
        target: ChartId::Stratum(index),
        images,
    }
}

fn stratum_chart(
    h: &HypertoricData,
    arr: &TropicalArrangement,
    index: usize,
    s: &Stratum,
) -> Result<Chart, MirrorError> {
    let frame = stratum_frame(s, arr)?;
    let x: BTreeMap<usize, Vec<Var>> = s
        .ties
        .iter()
        .map(|(&j, verts)| (j, (0..verts.len()).map(|k| x_var(j, k)).collect()))
        .collect();
    let y: Vec<Var> = (0..frame.tangent.len()).map(y_var).collect();
    let mut variables: Vec<Var> = x.values().flatten().cloned().collect();
    variables.extend(y.iter().cloned());
    variables.extend((1..=h.d).map(z_var));
    let relations = x
        .iter()
        .map(|(&j, xs)| {
            let prod = xs.iter().fold(RationalFn::one(), |acc, v| {
                &acc * &RationalFn::var(v.clone())
            });
            (prod, RationalFn::from(wall_factor(h, j)))
        })
        .collect();
    let chart = StratumChart {
        ties: s.ties.clone(),
        frame,
        adjacent: arr.adjacent_chambers(s),
        x,
        y,
    };
    Ok(Chart {
        id: ChartId::Stratum(index),
        kind: ChartKind::Stratum,
        name: s.name(),
        variables,
        relations,
        stratum: Some(chart),
    })
}

pub fn build_atlas(h: &HypertoricData) -> Result<Atlas, MirrorError> {
    let arr = build_tropical(h)?;
    build_atlas_from(h, arr)
}

pub fn build_atlas_from(
    h: &HypertoricData,
    arr: TropicalArrangement,
) -> Result<Atlas, MirrorError> {
    let d = h.d;
    let mut charts = Vec::new();
    for c in &arr.chambers {
        let mut variables = Vec::new();
        let mut relations = Vec::new();
        for j in 1..=d {
            variables.push(chart_u(j));
            variables.push(chart_v(j));
            relations.push((
                &RationalFn::var(chart_u(j)) * &RationalFn::var(chart_v(j)),
                RationalFn::one(),
            ));
        }
        variables.extend((1..=d).map(z_var));
        charts.push(Chart {
            id: ChartId::Chamber(c.h.clone()),
            kind: ChartKind::Chamber,
            name: c.to_string(),
            variables,
            relations,
            stratum: None,
        });
    }
    let index_of = |label: &[usize]| arr.chambers.iter().position(|c| c.h == label);
    let mut adjacency = BTreeSet::new();
    for s in arr.strata.iter().filter(|s| s.dimension + 1 == d) {
        let adj = arr.adjacent_chambers(s);
        if let [a, b] = adj.as_slice() {
            let (i, j) = (index_of(a).expect("listed"), index_of(b).expect("listed"));
            adjacency.insert((i.min(j), i.max(j)));
        }
    }
    let adjacency: Vec<(usize, usize)> = adjacency.into_iter().collect();
    let mut chamber_transitions = Vec::with_capacity(2 * adjacency.len());
    for &(i, j) in &adjacency {
        let (a, b) = (&arr.chambers[i].h, &arr.chambers[j].h);
        chamber_transitions.push(chamber_transition(h, a, b)?);
        chamber_transitions.push(chamber_transition(h, b, a)?);
    }
    let mut embeddings = Vec::new();
    let mut non_admissible = Vec::new();
    for (index, s) in arr.strata.iter().enumerate() {
        if !admissible(s, h) {
            non_admissible.push(index);
            continue;
        }
        let chart = stratum_chart(h, &arr, index, s)?;
        let data = chart.stratum.as_ref().expect("stratum chart");
        frame_inverse(data).ok_or_else(|| MirrorError::FrameNotBasis(chart.name.clone()))?;
        for c in &data.adjacent {
            embeddings.push(stratum_embedding(c, index, data));
        }
        charts.push(chart);
    }
    Ok(Atlas {
        data: h.clone(),
        arrangement: arr,
        charts,
        chamber_transitions,
        embeddings,
        adjacency,
        non_admissible,
    })
}

/// A frame vector and the `(j, k)` facet it comes from, if any.
type FrameRow = (Vec<BigInt>, Option<(usize, usize)>);

/// Rows of the frame matrix: tangent vectors, then all but the last facet vector of each tie.
fn frame_rows(chart: &StratumChart) -> Vec<FrameRow> {
    let mut rows: Vec<FrameRow> = chart
        .frame
        .tangent
        .iter()
        .map(|t| (t.clone(), None))
        .collect();
    for (&j, normals) in &chart.frame.normals {
        for (k, a) in normals.iter().enumerate().take(normals.len() - 1) {
            rows.push((a.clone(), Some((j, k))));
        }
    }
    rows
}

/// `F⁻¹` for the frame matrix `F`, when `F` is unimodular.
fn frame_inverse(chart: &StratumChart) -> Option<Vec<Vec<BigInt>>> {
    let rows: Vec<Vec<BigInt>> = frame_rows(chart).into_iter().map(|(r, _)| r).collect();
    let d = rows.len();
    if d == 0 {
        return Some(Vec::new());
    }
    let f = IntMatrix::from_rows(&rows).ok()?;
    if f.cols() != d || !f.determinant().ok()?.abs().is_one() {
        return None;
    }
    let mut cols = Vec::with_capacity(d);
    for r in 0..d {
        let e: Vec<BigInt> = (0..d)
            .map(|i| {
                if i == r {
                    BigInt::one()
                } else {
                    BigInt::zero()
                }
            })
            .collect();
        cols.push(f.solve_integer(&e)?);
    }
    Some(
        (0..d)
            .map(|i| cols.iter().map(|c| c[i].clone()).collect())
            .collect(),
    )
}

impl Atlas {
    pub fn chamber_index(&self, h: &[usize]) -> Option<usize> {
        self.arrangement.chambers.iter().position(|c| c.h == h)
    }

    pub fn transition(&self, from: &ChartId, to: &ChartId) -> Option<&Transition> {
        self.chamber_transitions
            .iter()
            .chain(&self.embeddings)
            .find(|t| &t.source == from && &t.target == to)
    }

    pub fn stratum_chart(&self, index: usize) -> Option<&Chart> {
        self.charts.iter().find(|c| c.id == ChartId::Stratum(index))
    }

    /// Negates the wall-factor exponents of one chamber transition, simulating a flipped `δ`.
    pub fn flip_delta(&mut self, transition: usize) {
        for img in self.chamber_transitions[transition].images.values_mut() {
            let flipped: BTreeMap<usize, i64> =
                img.factors.iter().map(|(&k, &e)| (k, -e)).collect();
            img.factors = flipped;
        }
    }

    /// Global functions `(𝐮_j, 𝐯_j)_{j}` on a chamber chart, `𝐯_j` written through `V_j`.
    pub fn chamber_globals(&self, h: &[usize]) -> Vec<(WallMonomial, WallMonomial)> {
        (1..=self.data.d)
            .map(|j| {
                let (u, v) = generating_functions_factored(&self.data, h, j);
                let v = WallMonomial {
                    monomial: v
                        .monomial
                        .div(&Monomial::var_pow(chart_u(j), -1))
                        .mul(&Monomial::var(chart_v(j))),
                    factors: v.factors,
                };
                (u, v)
            })
            .collect()
    }

    /// A global function from chamber `h` written on the stratum chart, with every factor
    /// `(1+𝐙_j)` of a tied hyperplane absorbed into the `x` variables as far as possible.
    pub fn descend(&self, chart: &StratumChart, h: &[usize], g: &WallMonomial) -> WallMonomial {
        let inverse = frame_inverse(chart).expect("checked at build time");
        let rows = frame_rows(chart);
        let mut w: Vec<WallMonomial> = Vec::with_capacity(rows.len());
        let mut tangent = 0;
        for (_, tag) in &rows {
            match tag {
                None => {
                    w.push(WallMonomial::var(chart.y[tangent].clone()));
                    tangent += 1;
                }
                Some((j, k)) => {
                    let mut x = WallMonomial::var(chart.x[j][*k].clone());
                    if chart.ties[j][*k] == h[*j] {
                        x.add_factor(*j, -1);
                    }
                    w.push(x);
                }
            }
        }
        let mut images = BTreeMap::new();
        for i in 0..self.data.d {
            let mut img = WallMonomial::one();
            for (r, wr) in w.iter().enumerate() {
                img = img.mul(&wr.pow(small(&inverse[i][r])));
            }
            images.insert(chart_u(i + 1), img.clone());
            images.insert(chart_v(i + 1), img.inv());
        }
        let mut out = g.substitute(&images);
        for (&j, xs) in &chart.x {
            let low = xs
                .iter()
                .map(|x| out.monomial.exponent(x))
                .min()
                .unwrap_or(0);
            if low != 0 {
                let shift = Monomial::from_pairs(xs.iter().map(|x| (x.clone(), -low)));
                out.monomial = out.monomial.mul(&shift);
                out.add_factor(j, low);
            }
        }
        out
    }
}

/// Regular on a stratum chart: no negative wall exponent and no negative `x` exponent.
fn is_regular(chart: &StratumChart, g: &WallMonomial) -> bool {
    g.factors.values().all(|&e| e >= 0)
        && chart
            .x
            .values()
            .flatten()
            .all(|x| g.monomial.exponent(x) >= 0)
}

fn compose(first: &Transition, second: &Transition) -> BTreeMap<Var, WallMonomial> {
    second
        .images
        .iter()
        .map(|(v, img)| (v.clone(), img.substitute(&first.images)))
        .collect()
}

fn as_rational_map(
    h: &HypertoricData,
    m: &BTreeMap<Var, WallMonomial>,
) -> BTreeMap<Var, RationalFn> {
    m.iter()
        .map(|(v, w)| (v.clone(), w.to_rational(h)))
        .collect()
}

/// Symbolic difference of two maps on the same target variables; `None` when identical.
fn map_residual(
    h: &HypertoricData,
    a: &BTreeMap<Var, WallMonomial>,
    b: &BTreeMap<Var, WallMonomial>,
) -> Option<String> {
    let keys: BTreeSet<&Var> = a.keys().chain(b.keys()).collect();
    for v in keys {
        let fa = a
            .get(v)
            .map_or_else(|| RationalFn::var(v.clone()), |w| w.to_rational(h));
        let fb = b
            .get(v)
            .map_or_else(|| RationalFn::var(v.clone()), |w| w.to_rational(h));
        let r = &fa - &fb;
        if !r.is_zero() {
            return Some(format!("{v}: residual {r}"));
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl CheckResult {
    fn new(name: &'static str) -> Self {
        CheckResult {
            name,
            passed: true,
            checked: 0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, failure: Option<String>) {
        self.checked += 1;
        if let Some(f) = failure {
            self.passed = false;
            self.failures.push(f);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtlasReport {
    pub inverse: CheckResult,
    pub cocycle: CheckResult,
    pub compatibility: CheckResult,
    pub descent: CheckResult,
}

impl AtlasReport {
    pub fn passed(&self) -> bool {
        self.checks().iter().all(|c| c.passed)
    }

    pub fn checks(&self) -> [&CheckResult; 4] {
        [
            &self.inverse,
            &self.cocycle,
            &self.compatibility,
            &self.descent,
        ]
    }
}

fn identity_map(t: &Transition) -> BTreeMap<Var, WallMonomial> {
    t.images
        .keys()
        .map(|v| (v.clone(), WallMonomial::var(v.clone())))
        .collect()
}

fn chamber_id(atlas: &Atlas, i: usize) -> ChartId {
    ChartId::Chamber(atlas.arrangement.chambers[i].h.clone())
}

fn loop_residual(atlas: &Atlas, cycle: &[usize]) -> Option<String> {
    let h = &atlas.data;
    let first = atlas
        .transition(&chamber_id(atlas, cycle[0]), &chamber_id(atlas, cycle[1]))
        .expect("adjacent");
    let mut acc = first.images.clone();
    for w in 1..cycle.len() {
        let a = cycle[w];
        let b = cycle[(w + 1) % cycle.len()];
        let t = atlas
            .transition(&chamber_id(atlas, a), &chamber_id(atlas, b))
            .expect("adjacent");
        let so_far = Transition {
            source: first.source.clone(),
            target: t.source.clone(),
            images: acc,
        };
        acc = compose(&so_far, t);
    }
    let names: Vec<String> = cycle
        .iter()
        .map(|&i| chamber_id(atlas, i).to_string())
        .collect();
    map_residual(h, &acc, &identity_map(first)).map(|r| format!("loop {}: {r}", names.join(" -> ")))
}

/// Cyclic order of chambers around a codimension-2 stratum, following adjacency.
fn local_cycle(atlas: &Atlas, members: &[usize]) -> Option<Vec<usize>> {
    let adj = |a: usize, b: usize| atlas.adjacency.contains(&(a.min(b), a.max(b)));
    let mut cycle = vec![members[0]];
    while cycle.len() < members.len() {
        let last = *cycle.last().expect("nonempty");
        let next = members
            .iter()
            .copied()
            .find(|&m| !cycle.contains(&m) && adj(last, m))?;
        cycle.push(next);
    }
    (cycle.len() >= 3 && adj(cycle[0], *cycle.last().expect("nonempty"))).then_some(cycle)
}

pub fn verify_atlas(atlas: &Atlas) -> AtlasReport {
    let h = &atlas.data;
    let mut inverse = CheckResult::new("inverse");
    for t in &atlas.chamber_transitions {
        let back = atlas
            .transition(&t.target, &t.source)
            .expect("both directions built");
        let round = compose(t, back);
        inverse.record(
            map_residual(h, &round, &identity_map(t))
                .map(|r| format!("{} -> {}: {r}", t.source, t.target)),
        );
    }

    let mut cocycle = CheckResult::new("cocycle");
    let n = atlas.arrangement.chambers.len();
    let adj = |a: usize, b: usize| atlas.adjacency.contains(&(a.min(b), a.max(b)));
    for a in 0..n {
        for b in a + 1..n {
            if !adj(a, b) {
                continue;
            }
            for c in b + 1..n {
                if adj(a, c) && adj(b, c) {
                    cocycle.record(loop_residual(atlas, &[a, b, c]));
                }
            }
        }
    }
    for s in atlas
        .arrangement
        .strata
        .iter()
        .filter(|s| s.dimension + 2 == h.d)
    {
        let members: Vec<usize> = atlas
            .arrangement
            .adjacent_chambers(s)
            .iter()
            .filter_map(|c| atlas.chamber_index(c))
            .collect();
        match local_cycle(atlas, &members) {
            Some(cycle) => cocycle.record(loop_residual(atlas, &cycle)),
            None => cocycle.record(Some(format!(
                "chambers around {} do not form a cycle",
                s.name()
            ))),
        }
    }

    let mut compatibility = CheckResult::new("compatibility");
    for t in &atlas.chamber_transitions {
        for e in atlas.embeddings.iter().filter(|e| e.source == t.target) {
            let Some(direct) = atlas.transition(&t.source, &e.target) else {
                continue;
            };
            let via = compose(t, e);
            compatibility.record(
                map_residual(h, &via, &direct.images)
                    .map(|r| format!("{} -> {} -> {}: {r}", t.source, t.target, e.target)),
            );
        }
    }

    let mut descent = CheckResult::new("descent");
    let globals: Vec<Vec<(WallMonomial, WallMonomial)>> = atlas
        .arrangement
        .chambers
        .iter()
        .map(|c| atlas.chamber_globals(&c.h))
        .collect();
    for (i, c) in atlas.arrangement.chambers.iter().enumerate() {
        for (j, (u, v)) in globals[i].iter().enumerate() {
            let mut subst = BTreeMap::new();
            subst.insert(
                chart_v(j + 1),
                RationalFn::var(chart_u(j + 1)).inv().expect("nonzero"),
            );
            let prod = (&u.to_rational(h) * &v.to_rational(h))
                .substitute(&subst)
                .expect("nonzero");
            let rhs = j_collection(h, j + 1)
                .into_iter()
                .fold(RationalFn::one(), |acc, k| {
                    &acc * &RationalFn::from(wall_factor(h, k))
                });
            let r = &prod - &rhs;
            descent.record(
                (!r.is_zero()).then(|| format!("chart {c}: equation {} residual {r}", j + 1)),
            );
        }
    }
    for t in &atlas.chamber_transitions {
        let (ChartId::Chamber(a), ChartId::Chamber(b)) = (&t.source, &t.target) else {
            continue;
        };
        let ia = atlas.chamber_index(a).expect("listed");
        let ib = atlas.chamber_index(b).expect("listed");
        let images = as_rational_map(h, &t.images);
        for (j, ((ua, va), (ub, vb))) in globals[ia].iter().zip(&globals[ib]).enumerate() {
            for (name, ga, gb) in [("u", ua, ub), ("v", va, vb)] {
                let pulled = gb
                    .to_rational(h)
                    .substitute(&images)
                    .expect("wall factors nonzero");
                let r = &pulled - &ga.to_rational(h);
                descent.record((!r.is_zero()).then(|| {
                    format!("{} -> {}: {name}{} residual {r}", t.source, t.target, j + 1)
                }));
            }
        }
    }
    for chart in atlas.charts.iter().filter(|c| c.kind == ChartKind::Stratum) {
        let data = chart.stratum.as_ref().expect("stratum chart");
        for j in 0..h.d {
            for which in 0..2 {
                let mut forms: Vec<(Vec<usize>, WallMonomial)> = Vec::new();
                for c in &data.adjacent {
                    let ic = atlas.chamber_index(c).expect("listed");
                    let g = if which == 0 {
                        &globals[ic][j].0
                    } else {
                        &globals[ic][j].1
                    };
                    forms.push((c.clone(), atlas.descend(data, c, g)));
                }
                let name = if which == 0 { "u" } else { "v" };
                let mut failure = None;
                if let Some((c0, f0)) = forms.first() {
                    if !is_regular(data, f0) {
                        failure = Some(format!(
                            "{}: {name}{} not regular: {}",
                            chart.name,
                            j + 1,
                            f0.display(h)
                        ));
                    }
                    for (c, f) in &forms {
                        if f != f0 {
                            failure = Some(format!(
                                "{}: {name}{} from {:?} is {} but from {:?} is {}",
                                chart.name,
                                j + 1,
                                c0,
                                f0.display(h),
                                c,
                                f.display(h)
                            ));
                        }
                        let emb = atlas
                            .transition(&ChartId::Chamber(c.clone()), &chart.id)
                            .expect("embedding built");
                        let ic = atlas.chamber_index(c).expect("listed");
                        let g = if which == 0 {
                            &globals[ic][j].0
                        } else {
                            &globals[ic][j].1
                        };
                        let pulled = f
                            .to_rational(h)
                            .substitute(&as_rational_map(h, &emb.images))
                            .expect("nonzero");
                        let mut subst = BTreeMap::new();
                        subst.insert(
                            chart_v(j + 1),
                            RationalFn::var(chart_u(j + 1)).inv().expect("nonzero"),
                        );
                        let r = &pulled.substitute(&subst).expect("nonzero")
                            - &g.to_rational(h).substitute(&subst).expect("nonzero");
                        if !r.is_zero() {
                            failure = Some(format!(
                                "{}: {name}{} pullback residual {r}",
                                chart.name,
                                j + 1
                            ));
                        }
                    }
                }
                descent.record(failure);
            }
        }
    }

    AtlasReport {
        inverse,
        cocycle,
        compatibility,
        descent,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VolumeEntry {
    pub source: ChartId,
    pub target: ChartId,
    pub sign: Option<i8>,
    pub residual: LogForm,
    /// Pullback of `Σ_i dlog U_i ∧ dlog Z_i` minus itself; reported, not asserted.
    pub symplectic_residual: LogForm,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VolumeReport {
    pub entries: Vec<VolumeEntry>,
}

impl VolumeReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.sign.is_some())
    }
}

/// `Ω = ∧_i dlog U_i ∧ dlog Z_i` in chamber coordinates.
pub fn volume_form(d: usize) -> LogForm {
    let forms: Vec<LogForm> = (1..=d)
        .flat_map(|i| [LogForm::basis(chart_u(i)), LogForm::basis(z_var(i))])
        .collect();
    LogForm::wedge_all(&forms)
}

pub fn verify_volume_form(atlas: &Atlas) -> VolumeReport {
    let h = &atlas.data;
    let d = h.d;
    let coords = chamber_coords(d);
    let omega = volume_form(d);
    let key: Vec<Var> = (1..=d).flat_map(|i| [chart_u(i), z_var(i)]).collect();
    let base = omega.coefficient(&key);
    let mut entries = Vec::new();
    for t in &atlas.chamber_transitions {
        let mut forms = Vec::with_capacity(2 * d);
        let mut symplectic = LogForm::zero(2);
        for i in 1..=d {
            let img = t
                .images
                .get(&chart_u(i))
                .map_or_else(|| RationalFn::var(chart_u(i)), |w| w.to_rational(h));
            let du = dlog(&img, &coords).expect("image is nonzero");
            let dz = LogForm::basis(z_var(i));
            symplectic = symplectic
                .add(&du.wedge(&dz))
                .sub(&LogForm::basis(chart_u(i)).wedge(&dz));
            forms.push(du);
            forms.push(dz);
        }
        let pulled = LogForm::wedge_all(&forms);
        let ratio = pulled
            .coefficient(&key)
            .checked_div(&base)
            .expect("nonzero volume");
        let (sign, residual) = if ratio.is_one() {
            (Some(1), pulled.sub(&omega))
        } else if (&RationalFn::zero() - &ratio).is_one() {
            (Some(-1), pulled.add(&omega))
        } else {
            (None, pulled.sub(&omega))
        };
        let sign = if residual.is_zero() { sign } else { None };
        entries.push(VolumeEntry {
            source: t.source.clone(),
            target: t.target.clone(),
            sign,
            residual,
            symplectic_residual: symplectic,
        });
    }
    VolumeReport { entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{load_and_normalize, RawData};
    use crate::linalg::{int, rat};

    fn data(d: usize, u: &[&[i64]], lr: &[i64], tc: &[i64]) -> HypertoricData {
        load_and_normalize(&RawData::new(
            d,
            u.iter()
                .map(|v| v.iter().map(|&x| int(x)).collect())
                .collect(),
            lr.iter().map(|&x| rat(x, 1)).collect(),
            tc.iter().map(|&x| rat(x, 1)).collect(),
        ))
        .unwrap()
    }

    fn tp1() -> HypertoricData {
        data(1, &[&[1], &[-1]], &[0, 1], &[0, 1])
    }

    fn tp2() -> HypertoricData {
        data(2, &[&[1, 0], &[0, 1], &[-1, -1]], &[0, 0, 1], &[0, 0, 5])
    }

    #[test]
    fn cotangent_line_counts() {
        let atlas = build_atlas(&tp1()).unwrap();
        let chambers = atlas
            .charts
            .iter()
            .filter(|c| c.kind == ChartKind::Chamber)
            .count();
        let strata = atlas
            .charts
            .iter()
            .filter(|c| c.kind == ChartKind::Stratum)
            .count();
        assert_eq!((chambers, strata), (3, 2));
        assert_eq!(atlas.chamber_transitions.len(), 4);
        assert_eq!(atlas.embeddings.len(), 4);
    }

    #[test]
    fn wall_embedding_from_the_left_chamber() {
        let h = tp1();
        let atlas = build_atlas(&h).unwrap();
        let wall = atlas
            .arrangement
            .strata
            .iter()
            .position(|s| s.ties.contains_key(&0))
            .unwrap();
        let e = atlas
            .transition(&ChartId::Chamber(vec![0, 0]), &ChartId::Stratum(wall))
            .unwrap();
        let shown: Vec<String> = e.images.values().map(|w| w.display(&h)).collect();
        assert_eq!(shown, vec!["U1", "U1^-1*(1+Z1)"]);
    }

    #[test]
    fn identical_chambers_give_identity() {
        let t = chamber_transition(&tp2(), &[0, 0, 1], &[0, 0, 1]).unwrap();
        assert!(t
            .images
            .iter()
            .all(|(v, w)| *w == WallMonomial::var(v.clone())));
    }

    #[test]
    fn atlases_verify() {
        let a3 = data(1, &[&[1], &[1], &[1], &[1]], &[0, 1, 2, 3], &[0, 1, 2, 3]);
        let four = data(
            2,
            &[&[1, 0], &[0, 1], &[-1, -1], &[0, -1]],
            &[0, 0, 3, 1],
            &[0, 0, 5, 2],
        );
        for h in [tp1(), tp2(), a3, four] {
            let atlas = build_atlas(&h).unwrap();
            let report = verify_atlas(&atlas);
            for c in report.checks() {
                assert!(c.passed, "{}: {:?}", c.name, c.failures);
            }
            let vol = verify_volume_form(&atlas);
            assert!(vol.passed());
            assert!(vol.entries.iter().all(|e| e.sign.is_some()));
        }
    }

    #[test]
    fn flipped_delta_is_detected() {
        let mut atlas = build_atlas(&tp2()).unwrap();
        atlas.flip_delta(0);
        let report = verify_atlas(&atlas);
        assert!(!report.descent.passed);
    }

    #[test]
    fn projective_plane_has_cocycle_triangles() {
        let atlas = build_atlas(&tp2()).unwrap();
        let report = verify_atlas(&atlas);
        assert!(report.cocycle.checked > 0);
    }
}
