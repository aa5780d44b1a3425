//! Tropical hyperplane arrangement in `𝕋^d`: covector cells, chambers, strata and frames.
//!
//! Monomial labels follow the chamber convention: `0` is the constant term and `j ≥ 1` is `τ_j`.
//! Hyperplane indices are 0-based.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::arrangement::HypertoricData;
use crate::linalg::{rational_feasible, reduce_modulo, IntMatrix, LinearSystem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TropicalError {
    #[error("hyperplanes {0} and {1} have the same support of size >= 2 and always share a ray")]
    SharedRay(usize, usize),
    #[error("parallel walls {0} and {1} have the same constant")]
    DuplicateConstant(usize, usize),
    #[error("arrangement is not simple: cell {cell} has codimension {codim}, expected {expected}")]
    NonSimple {
        cell: String,
        codim: usize,
        expected: usize,
    },
    #[error("labels have the wrong length or an impossible entry")]
    BadLabel,
    #[error("wall set for direction {j} mixes both crossing directions")]
    MixedWallSet { j: usize },
    #[error("no integral frame vector for hyperplane {hyperplane}, facet {facet}")]
    Frame { hyperplane: usize, facet: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropicalHyperplane {
    pub index: usize,
    /// 1-based `τ` labels with nonzero coefficient.
    pub support: Vec<usize>,
    pub constant: BigRational,
}

impl TropicalHyperplane {
    /// `{0} ∪ A_k` in label order `τ`-labels ascending, `0` last.
    pub fn labels(&self) -> Vec<usize> {
        let mut out = self.support.clone();
        out.push(0);
        out
    }
}

/// Sorts labels with `τ`-labels ascending and `0` last.
pub fn vertex_order(mut labels: Vec<usize>) -> Vec<usize> {
    labels.sort_by_key(|&m| if m == 0 { usize::MAX } else { m });
    labels
}

/// A relatively open covector cell: for every hyperplane, the set of maximizing monomials.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub sets: Vec<Vec<usize>>,
}

impl Cell {
    pub fn codimension(&self) -> usize {
        self.sets.iter().map(|s| s.len() - 1).sum()
    }

    pub fn is_chamber(&self) -> bool {
        self.sets.iter().all(|s| s.len() == 1)
    }

    pub fn ties(&self) -> BTreeMap<usize, Vec<usize>> {
        self.sets
            .iter()
            .enumerate()
            .filter(|(_, s)| s.len() > 1)
            .map(|(k, s)| (k, s.clone()))
            .collect()
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, s) in self.sets.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            if s.len() == 1 {
                write!(f, "{}", s[0])?;
            } else {
                let parts: Vec<String> = s.iter().map(|m| m.to_string()).collect();
                write!(f, "{{{}}}", parts.join(","))?;
            }
        }
        f.write_str(")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChamberLabel {
    pub h: Vec<usize>,
    pub witness: Vec<BigRational>,
}

impl fmt::Display for ChamberLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.h.iter().map(|m| m.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A stratum of `ℋ`. Under simplicity two cells with equal tie data are separated by a
/// lower stratum, so every stratum is a single covector cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    /// Tied hyperplane → tie set `V_j` in vertex order.
    pub ties: BTreeMap<usize, Vec<usize>>,
    pub dimension: usize,
    pub cells: Vec<Cell>,
    pub witnesses: Vec<Vec<BigRational>>,
}

impl Stratum {
    pub fn tied(&self) -> Vec<usize> {
        self.ties.keys().copied().collect()
    }

    pub fn cell(&self) -> &Cell {
        &self.cells[0]
    }

    pub fn name(&self) -> String {
        self.cell().to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumFrame {
    pub tangent: Vec<Vec<BigInt>>,
    /// Tied hyperplane → one vector per facet; facet `i` is opposite vertex `ties[j][i]`.
    pub normals: BTreeMap<usize, Vec<Vec<BigInt>>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropicalArrangement {
    pub d: usize,
    pub hyperplanes: Vec<TropicalHyperplane>,
    pub chambers: Vec<ChamberLabel>,
    pub strata: Vec<Stratum>,
}

fn affine(d: usize, k: &TropicalHyperplane, m: usize) -> (Vec<BigRational>, BigRational) {
    let mut c = vec![BigRational::zero(); d];
    if m == 0 {
        (c, k.constant.clone())
    } else {
        c[m - 1] = BigRational::one();
        (c, BigRational::zero())
    }
}

fn sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Adds the constraints saying `set` is exactly the maximizing set of hyperplane `k`.
fn push_cell_constraints(d: usize, k: &TropicalHyperplane, set: &[usize], sys: &mut LinearSystem) {
    let (cr, kr) = affine(d, k, set[0]);
    for &m in &set[1..] {
        let (cm, km) = affine(d, k, m);
        sys.equals(sub(&cm, &cr), kr.clone() - km);
    }
    for m in k.labels() {
        if set.contains(&m) {
            continue;
        }
        let (cm, km) = affine(d, k, m);
        sys.gt(sub(&cr, &cm), km - kr.clone());
    }
}

/// Integer rows `e_m − e_{m'}` (with `e_0 = 0`) spanning the tie equalities of `set`.
fn tie_rows(d: usize, set: &[usize]) -> Vec<Vec<BigInt>> {
    let e = |m: usize| -> Vec<BigInt> {
        (0..d)
            .map(|i| {
                if m == i + 1 {
                    BigInt::one()
                } else {
                    BigInt::zero()
                }
            })
            .collect()
    };
    set.windows(2)
        .map(|w| e(w[0]).iter().zip(e(w[1])).map(|(a, b)| a - b).collect())
        .collect()
}

fn rows_rank(d: usize, rows: &[Vec<BigInt>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    IntMatrix::from_rows(rows).map(|m| m.rank()).unwrap_or(d)
}

impl TropicalArrangement {
    pub fn n(&self) -> usize {
        self.hyperplanes.len()
    }

    pub fn cell_system(&self, cell: &Cell) -> LinearSystem {
        let mut sys = LinearSystem::new(self.d);
        for (k, set) in cell.sets.iter().enumerate() {
            push_cell_constraints(self.d, &self.hyperplanes[k], set, &mut sys);
        }
        sys
    }

    /// The covector cell containing `point`.
    pub fn classify(&self, point: &[BigRational]) -> Cell {
        let sets = self
            .hyperplanes
            .iter()
            .map(|k| {
                let vals: Vec<(usize, BigRational)> = k
                    .labels()
                    .into_iter()
                    .map(|m| {
                        (
                            m,
                            if m == 0 {
                                k.constant.clone()
                            } else {
                                point[m - 1].clone()
                            },
                        )
                    })
                    .collect();
                let max = vals.iter().map(|(_, v)| v).max().expect("nonempty").clone();
                let set: Vec<usize> = vals
                    .into_iter()
                    .filter(|(_, v)| *v == max)
                    .map(|(m, _)| m)
                    .collect();
                vertex_order(set)
            })
            .collect();
        Cell { sets }
    }

    pub fn chamber_cell(&self, h: &[usize]) -> Cell {
        Cell {
            sets: h.iter().map(|&m| vec![m]).collect(),
        }
    }

    pub fn find_chamber(&self, h: &[usize]) -> Option<&ChamberLabel> {
        self.chambers.iter().find(|c| c.h == h)
    }

    /// Chambers whose closure contains the stratum: one vertex per tie set, other labels kept.
    pub fn adjacent_chambers(&self, s: &Stratum) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = vec![Vec::new()];
        for set in &s.cell().sets {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    set.iter().map(move |&m| {
                        let mut p = prefix.clone();
                        p.push(m);
                        p
                    })
                })
                .collect();
        }
        out.retain(|h| self.find_chamber(h).is_some());
        out.sort();
        out
    }
}

pub fn build_tropical(h: &HypertoricData) -> Result<TropicalArrangement, TropicalError> {
    let hyperplanes: Vec<TropicalHyperplane> = (0..h.n)
        .map(|k| TropicalHyperplane {
            index: k,
            support: h.support(k).into_iter().map(|i| i + 1).collect(),
            constant: h.trop_const[k].clone(),
        })
        .collect();
    for a in 0..h.n {
        for b in a + 1..h.n {
            if hyperplanes[a].support != hyperplanes[b].support {
                continue;
            }
            if hyperplanes[a].support.len() >= 2 {
                return Err(TropicalError::SharedRay(a, b));
            }
            if hyperplanes[a].constant == hyperplanes[b].constant {
                return Err(TropicalError::DuplicateConstant(a, b));
            }
        }
    }
    let d = h.d;
    let mut arr = TropicalArrangement {
        d,
        hyperplanes,
        chambers: Vec::new(),
        strata: Vec::new(),
    };
    let mut cells = Vec::new();
    enumerate_cells(
        &arr,
        &mut Vec::new(),
        &mut Vec::new(),
        &LinearSystem::new(d),
        &mut cells,
    )?;
    for (cell, witness) in cells {
        if cell.is_chamber() {
            arr.chambers.push(ChamberLabel {
                h: cell.sets.iter().map(|s| s[0]).collect(),
                witness,
            });
        } else {
            arr.strata.push(Stratum {
                ties: cell.ties(),
                dimension: d - cell.codimension(),
                cells: vec![cell],
                witnesses: vec![witness],
            });
        }
    }
    arr.chambers.sort();
    arr.strata.sort_by(|a, b| {
        a.dimension
            .cmp(&b.dimension)
            .then_with(|| a.cells.cmp(&b.cells))
    });
    Ok(arr)
}

fn nonempty_subsets(labels: &[usize]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (1u32..(1 << labels.len()))
        .map(|mask| {
            labels
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &m)| m)
                .collect()
        })
        .collect();
    out.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

type CellList = Vec<(Cell, Vec<BigRational>)>;

fn enumerate_cells(
    arr: &TropicalArrangement,
    prefix: &mut Vec<Vec<usize>>,
    rows: &mut Vec<Vec<BigInt>>,
    sys: &LinearSystem,
    out: &mut CellList,
) -> Result<(), TropicalError> {
    let k = prefix.len();
    if k == arr.n() {
        let witness = rational_feasible(sys).expect("checked on the way down");
        out.push((
            Cell {
                sets: prefix.clone(),
            },
            witness,
        ));
        return Ok(());
    }
    let hk = &arr.hyperplanes[k];
    for set in nonempty_subsets(&hk.labels()) {
        let set = vertex_order(set);
        let mut next = sys.clone();
        push_cell_constraints(arr.d, hk, &set, &mut next);
        if rational_feasible(&next).is_none() {
            continue;
        }
        let added = tie_rows(arr.d, &set);
        let before = rows.len();
        rows.extend(added);
        prefix.push(set);
        let expected: usize = prefix.iter().map(|s| s.len() - 1).sum();
        let codim = rows_rank(arr.d, rows);
        if codim != expected {
            let cell = Cell {
                sets: prefix.clone(),
            }
            .to_string();
            return Err(TropicalError::NonSimple {
                cell,
                codim,
                expected,
            });
        }
        enumerate_cells(arr, prefix, rows, &next, out)?;
        prefix.pop();
        rows.truncate(before);
    }
    Ok(())
}

pub fn enumerate_chambers(arr: &TropicalArrangement) -> &[ChamberLabel] {
    &arr.chambers
}

pub fn enumerate_strata(arr: &TropicalArrangement) -> &[Stratum] {
    &arr.strata
}

/// `J_{j,h,h'}` together with `δ^{(h,h')}_j` and `δ^{(h',h)}_j`, for `j = 1..d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallSet {
    pub j: usize,
    pub walls: Vec<usize>,
    pub delta_forward: u8,
    pub delta_backward: u8,
}

pub fn wall_sets(d: usize, h: &[usize], h2: &[usize]) -> Result<Vec<WallSet>, TropicalError> {
    if h.len() != h2.len() || h.iter().chain(h2).any(|&m| m > d) {
        return Err(TropicalError::BadLabel);
    }
    let mut out = Vec::with_capacity(d);
    for j in 1..=d {
        let walls: Vec<usize> = (0..h.len())
            .filter(|&k| h[k] != h2[k] && (h[k] == j || h2[k] == j))
            .collect();
        let to_j = walls.iter().any(|&k| h2[k] == j);
        let from_j = walls.iter().any(|&k| h[k] == j);
        if to_j && from_j {
            return Err(TropicalError::MixedWallSet { j });
        }
        out.push(WallSet {
            j,
            walls,
            delta_forward: to_j as u8,
            delta_backward: from_j as u8,
        });
    }
    Ok(out)
}

pub fn admissible(s: &Stratum, h: &HypertoricData) -> bool {
    h.real_intersects(&s.tied())
}

/// Canonical frame: tangent lattice in Hermite form; facet vectors at lattice distance one
/// from their facet, toward the opposite vertex, reduced modulo the tangent lattice, with
/// the last one replaced by minus the sum of the others.
pub fn stratum_frame(
    s: &Stratum,
    arr: &TropicalArrangement,
) -> Result<StratumFrame, TropicalError> {
    let d = arr.d;
    let mut all_rows = Vec::new();
    for set in s.ties.values() {
        all_rows.extend(tie_rows(d, set));
    }
    let tangent = IntMatrix::from_rows(&all_rows)
        .expect("rows have length d")
        .kernel_lattice()
        .basis;
    let e = |m: usize| -> Vec<BigInt> {
        (0..d)
            .map(|i| {
                if m == i + 1 {
                    BigInt::one()
                } else {
                    BigInt::zero()
                }
            })
            .collect()
    };
    let mut normals = BTreeMap::new();
    for (&j, set) in &s.ties {
        let mut others = Vec::new();
        for (&j2, set2) in &s.ties {
            if j2 != j {
                others.extend(tie_rows(d, set2));
            }
        }
        let mut vecs = Vec::with_capacity(set.len());
        for (facet, &opp) in set.iter().enumerate().take(set.len() - 1) {
            let mut rows = others.clone();
            let mut rhs = vec![BigInt::zero(); rows.len()];
            for &m in set.iter().filter(|&&m| m != opp) {
                rows.push(e(opp).iter().zip(e(m)).map(|(a, b)| a - b).collect());
                rhs.push(BigInt::one());
            }
            let mat = IntMatrix::from_rows(&rows).expect("rows have length d");
            let sol = mat.solve_integer(&rhs).ok_or(TropicalError::Frame {
                hyperplane: j,
                facet,
            })?;
            vecs.push(reduce_modulo(&sol, &tangent));
        }
        let last: Vec<BigInt> = (0..d)
            .map(|i| -vecs.iter().map(|v| &v[i]).sum::<BigInt>())
            .collect();
        vecs.push(last);
        normals.insert(j, vecs);
    }
    Ok(StratumFrame { tangent, normals })
}
