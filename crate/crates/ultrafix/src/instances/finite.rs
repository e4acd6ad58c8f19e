//! Finite ultrametric spaces given by explicit distance tables over a
//! finite radius poset, plus exhaustive tooling: enumeration of all valid
//! tables at a point count and of all strictly contracting self-maps.
//!
//! These spaces are the desk-scale ground truth. Every chain of balls in a
//! finite space is finite and so has a smallest non-empty member, which
//! makes the fixed-point dichotomy checkable by brute force.

use std::collections::HashSet;

use crate::driver::ContractingMap;
use crate::radius::{FinitePoset, PosetRadius, RadiusOrder};
use crate::space::{check_space_axioms, SolidWitness, Ultrametric};

use super::InstanceError;

/// A finite space: points `0..n` with a symmetric, zero-diagonal distance
/// table into a [`FinitePoset`]. Load-time construction re-checks the
/// distance axioms exhaustively.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSpace {
    order: FinitePoset,
    names: Vec<String>,
    dist: Vec<PosetRadius>,
}

impl FiniteSpace {
    /// Build from the upper triangle: one `(i, j, radius)` entry per pair
    /// `i < j`. The table is completed symmetrically with a zero diagonal,
    /// then the distance axioms are checked over every triple and radius.
    pub fn from_table(
        order: FinitePoset,
        names: Vec<String>,
        upper: &[(usize, usize, PosetRadius)],
    ) -> Result<Self, InstanceError> {
        let n = names.len();
        if n == 0 {
            return Err(InstanceError::BadParameter { detail: "no points".into() });
        }
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.clone()) {
                return Err(InstanceError::BadParameter {
                    detail: format!("duplicate point name {name:?}"),
                });
            }
        }
        let mut dist: Vec<Option<PosetRadius>> = vec![None; n * n];
        for i in 0..n {
            dist[i * n + i] = Some(order.zero());
        }
        for (i, j, r) in upper {
            let (i, j) = (*i, *j);
            if i >= j || j >= n {
                return Err(InstanceError::BadParameter {
                    detail: format!("pair ({i}, {j}) is not an upper-triangle pair of {n} points"),
                });
            }
            if order.try_compare(r, &order.zero()).is_err() {
                return Err(InstanceError::BadParameter {
                    detail: format!("radius {r} belongs to a different order"),
                });
            }
            if dist[i * n + j].is_some() {
                return Err(InstanceError::BadParameter {
                    detail: format!("pair ({i}, {j}) given twice"),
                });
            }
            dist[i * n + j] = Some(r.clone());
            dist[j * n + i] = Some(r.clone());
        }
        let dist: Vec<PosetRadius> = dist
            .into_iter()
            .enumerate()
            .map(|(k, d)| {
                d.ok_or_else(|| InstanceError::BadParameter {
                    detail: format!("pair ({}, {}) has no distance", k / n, k % n),
                })
            })
            .collect::<Result<_, _>>()?;
        let space = FiniteSpace { order, names, dist };
        let radii: Vec<PosetRadius> = space.order.sample();
        let report = check_space_axioms(&space, &radii);
        if !report.is_clean() {
            return Err(InstanceError::InvalidSpace { report });
        }
        Ok(space)
    }

    /// The three-point demo space over the chain `0 < 1 < 2`:
    /// `d(a,b) = d(a,c) = 2`, `d(b,c) = 1`. Not solid: no point sits at
    /// distance 1 from `a`.
    pub fn f3() -> FiniteSpace {
        let order = FinitePoset::chain("chain3", 3);
        let one = order.element("1").expect("chain3 has an element 1");
        let two = order.element("2").expect("chain3 has an element 2");
        FiniteSpace::from_table(
            order,
            vec!["a".into(), "b".into(), "c".into()],
            &[(0, 1, two.clone()), (0, 2, two), (1, 2, one)],
        )
        .expect("the three-point demo table satisfies the axioms")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn point_names(&self) -> &[String] {
        &self.names
    }

    pub fn radius_between(&self, i: usize, j: usize) -> &PosetRadius {
        &self.dist[i * self.len() + j]
    }
}

impl Ultrametric for FiniteSpace {
    type Point = usize;
    type Order = FinitePoset;

    fn order(&self) -> &FinitePoset {
        &self.order
    }

    fn distance(&self, x: &usize, y: &usize) -> PosetRadius {
        self.dist[x * self.len() + y].clone()
    }

    fn sample_points(&self) -> Vec<usize> {
        (0..self.len()).collect()
    }

    fn realized_radii(&self) -> Vec<PosetRadius> {
        let mut out: Vec<PosetRadius> = Vec::new();
        for r in &self.dist {
            if !self.order.is_zero(r) && !out.contains(r) {
                out.push(r.clone());
            }
        }
        out
    }

    fn describe(&self) -> String {
        format!("finite n={} order={}", self.len(), self.order.name())
    }

    fn encode_point(&self, x: &usize) -> String {
        self.names[*x].clone()
    }

    fn decode_point(&self, s: &str) -> Result<usize, String> {
        self.names
            .iter()
            .position(|n| n == s)
            .ok_or_else(|| format!("unknown point {s:?}"))
    }
}

impl SolidWitness for FiniteSpace {
    fn solidness_witness(&self, x: &usize, gamma: &PosetRadius) -> Option<usize> {
        (0..self.len()).find(|y| RadiusOrder::eq(&self.order, &self.distance(x, y), gamma))
    }
}

// ── Self-maps as image tables ───────────────────────────────────────────────

/// A self-map of a [`FiniteSpace`] given by its image table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableMap {
    images: Vec<usize>,
    names: Vec<String>,
}

impl TableMap {
    pub fn new(space: &FiniteSpace, images: Vec<usize>) -> Result<Self, InstanceError> {
        if images.len() != space.len() {
            return Err(InstanceError::BadParameter {
                detail: format!(
                    "image table has {} entries for {} points",
                    images.len(),
                    space.len()
                ),
            });
        }
        if let Some(bad) = images.iter().find(|i| **i >= space.len()) {
            return Err(InstanceError::BadParameter {
                detail: format!("image index {bad} out of range"),
            });
        }
        Ok(TableMap { images, names: space.point_names().to_vec() })
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.images.len()).filter(|i| self.images[*i] == *i).collect()
    }
}

impl ContractingMap<FiniteSpace> for TableMap {
    fn apply(&self, _space: &FiniteSpace, x: &usize) -> usize {
        self.images[*x]
    }

    fn describe(&self) -> String {
        let mut s = String::from("selfmap");
        for i in &self.images {
            s.push(' ');
            s.push_str(&self.names[*i]);
        }
        s
    }
}

// ── Exhaustive enumeration ──────────────────────────────────────────────────

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 1 {
        return vec![vec![0]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for slot in 0..n {
            let mut q = p.clone();
            q.insert(slot, n - 1);
            out.push(q);
        }
    }
    out
}

fn pair_slot(i: usize, j: usize) -> usize {
    debug_assert!(i < j);
    j * (j - 1) / 2 + i
}

/// All distance tables on exactly `max_points` points over `order` that
/// satisfy the distance axioms, up to relabeling of the points. Capped at
/// six points.
pub fn finite_space_enumerate(max_points: usize, order: &FinitePoset) -> Vec<FiniteSpace> {
    assert!(
        (1..=6).contains(&max_points),
        "enumeration is desk-scale: 1 to 6 points"
    );
    let n = max_points;
    let names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let nonzero: Vec<PosetRadius> = order.sample();
    let all_radii: Vec<PosetRadius> = (0..order.len()).map(|i| order.element_at(i)).collect();
    let pairs: Vec<(usize, usize)> = (1..n).flat_map(|j| (0..j).map(move |i| (i, j))).collect();

    // The transfer rule on a triple with distances A = d(x,y), B = d(x,z),
    // C = d(y,z): whenever a radius bounds two of them, it bounds the
    // third.
    let triple_ok = |a: &PosetRadius, b: &PosetRadius, c: &PosetRadius| -> bool {
        all_radii.iter().all(|g| {
            (!(order.le(a, g) && order.le(c, g)) || order.le(b, g))
                && (!(order.le(a, g) && order.le(b, g)) || order.le(c, g))
                && (!(order.le(b, g) && order.le(c, g)) || order.le(a, g))
        })
    };

    let perms = permutations(n);
    let mut canon_seen: HashSet<Vec<usize>> = HashSet::new();
    let mut out = Vec::new();
    let mut assign: Vec<usize> = Vec::with_capacity(pairs.len());

    // Depth-first assignment of radius indices to pairs, pruning any
    // completed triple that breaks the transfer rule.
    fn descend(
        depth: usize,
        pairs: &[(usize, usize)],
        nonzero: &[PosetRadius],
        assign: &mut Vec<usize>,
        triple_ok: &dyn Fn(&PosetRadius, &PosetRadius, &PosetRadius) -> bool,
        emit: &mut dyn FnMut(&[usize]),
    ) {
        if depth == pairs.len() {
            emit(assign);
            return;
        }
        let (i, j) = pairs[depth];
        'choice: for (ridx, r) in nonzero.iter().enumerate() {
            for a in 0..i {
                let r_ai = &nonzero[assign[pair_slot(a, i)]];
                let r_aj = &nonzero[assign[pair_slot(a, j)]];
                if !triple_ok(r_ai, r_aj, r) {
                    continue 'choice;
                }
            }
            assign.push(ridx);
            descend(depth + 1, pairs, nonzero, assign, triple_ok, emit);
            assign.pop();
        }
    }

    {
        let mut emit = |assign: &[usize]| {
            let canon: Vec<usize> = perms
                .iter()
                .map(|p| {
                    pairs
                        .iter()
                        .map(|(i, j)| {
                            let (a, b) = (p[*i].min(p[*j]), p[*i].max(p[*j]));
                            assign[pair_slot(a, b)]
                        })
                        .collect::<Vec<usize>>()
                })
                .min()
                .expect("at least the identity permutation");
            if !canon_seen.insert(canon) {
                return;
            }
            let upper: Vec<(usize, usize, PosetRadius)> = pairs
                .iter()
                .map(|(i, j)| (*i, *j, nonzero[assign[pair_slot(*i, *j)]].clone()))
                .collect();
            let space = FiniteSpace::from_table(order.clone(), names.clone(), &upper)
                .expect("enumerated tables pass the axioms they were filtered by");
            out.push(space);
        };
        descend(0, &pairs, &nonzero, &mut assign, &triple_ok, &mut emit);
    }
    out
}

/// All strictly contracting self-maps of a finite space, by exhaustive
/// filter over its `n^n` image tables.
pub fn all_contracting_selfmaps(space: &FiniteSpace) -> Vec<TableMap> {
    let n = space.len();
    let order = space.order();
    let mut out = Vec::new();
    let mut images = vec![0usize; n];
    loop {
        let contracting = (0..n).all(|i| {
            ((i + 1)..n).all(|j| {
                let before = space.distance(&i, &j);
                let after = space.distance(&images[i], &images[j]);
                order.lt(&after, &before)
            })
        });
        if contracting {
            out.push(
                TableMap::new(space, images.clone())
                    .expect("image tables from the counter are in range"),
            );
        }
        // Advance the odometer.
        let mut k = 0;
        loop {
            if k == n {
                return out;
            }
            images[k] += 1;
            if images[k] < n {
                break;
            }
            images[k] = 0;
            k += 1;
        }
    }
}
