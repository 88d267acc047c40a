//! Dynamic planar line arrangement storing every k-level in skip lists
//! of path points.
//!
//! A path point `(i, j)` marks the vertex where a level arrives along
//! line `i` and leaves along line `j`; the fictitious head `(i, i)` opens
//! the chain whose first edge lies on line `i`, and a distinguished null
//! point terminates every chain. All chains share one global associative
//! store and one `lmax = ⌈log2 n²⌉`, so tails can be swapped between
//! chains with `2·(lmax+1)` link writes while levels stay valid. The
//! `Start` list holds the chain heads ordered by slope; the k-th head in
//! slope order opens the k-level.
//!
//! Inserting a line builds the skip list of its own path points, then
//! sweeps its intersections from right to left, point-locating each one
//! and swapping the tails of the two chains that meet there. Removal
//! runs the inverse sweep left to right. The resulting structure is a
//! pure function of `(line set, seed)`, which the fingerprint
//! materializes.

use std::collections::HashMap;

use thiserror::Error;

use crate::geom::{line_intersection, Line2, PointD, Rat};
use crate::hiskip::{
    digest_words, level_of, search_path, swap_tails_links, SkipKey, SkipList, SkipSpace,
};
use crate::qcost::{point_location_units, skiplist_op_units};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArrError {
    #[error("line {0} already present")]
    DuplicateLine(u32),
    #[error("line {0} not present")]
    MissingLine(u32),
    #[error("line {0} is not in the arrangement's universe")]
    UnknownLine(u32),
    #[error("slope {slope} of line {inserting} collides with present line {present}")]
    SlopeCollision { inserting: u32, present: u32, slope: i64 },
    #[error("lines {0}, {1}, {2} pass through one point")]
    TripleConcurrence(u32, u32, u32),
    #[error("arrangement is empty")]
    EmptyArrangement,
    #[error("level {k} out of range (size {size})")]
    LevelOutOfRange { k: usize, size: usize },
    #[error("structure corrupt: {0}")]
    Corrupt(String),
}

/// Identifier of an arrangement vertex on a specific level chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PathPoint {
    /// ν_{i,i}: fictitious −∞ head of the chain starting on line i.
    Head(u32),
    /// ν_{i,j}, i ≠ j: arrive along line i, leave along line j.
    Cross(u32, u32),
    /// ν_Null: +∞ terminator.
    Null,
}

impl PathPoint {
    pub fn outgoing(&self) -> Option<u32> {
        match self {
            PathPoint::Head(i) => Some(*i),
            PathPoint::Cross(_, j) => Some(*j),
            PathPoint::Null => None,
        }
    }
}

impl std::fmt::Display for PathPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PathPoint::Head(i) => write!(f, "H({i})"),
            PathPoint::Cross(i, j) => write!(f, "C({i},{j})"),
            PathPoint::Null => write!(f, "Null"),
        }
    }
}

impl SkipKey for PathPoint {
    fn nil() -> Self {
        PathPoint::Null
    }

    fn encode(&self) -> u64 {
        match self {
            PathPoint::Head(i) => ((*i as u64) << 32) | *i as u64,
            PathPoint::Cross(i, j) => ((*i as u64) << 32) | *j as u64,
            PathPoint::Null => u64::MAX,
        }
    }
}

/// Extended coordinate of a path point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtPoint {
    NegInf,
    Finite(PointD),
    PosInf,
}

/// Where a query point sits relative to the levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Location {
    AboveAll,
    BelowAll,
    /// Strictly below level k, strictly above level k+1.
    Between(usize, usize),
    OnLevel {
        level: usize,
        head: PathPoint,
        pred: PathPoint,
        succ: PathPoint,
        line: u32,
    },
    /// The query point is an arrangement vertex; both lines reported.
    OnVertex { level: usize, lines: (u32, u32) },
}

/// Measured work of one operation: raw link probes/writes plus the
/// modeled units the cost model charges for the same operations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpStats {
    pub raw: u64,
    pub units: u64,
}

impl OpStats {
    fn add(&mut self, other: OpStats) {
        self.raw += other.raw;
        self.units += other.units;
    }
}

struct ChainNode {
    level: usize,
    next: Vec<PathPoint>,
}

/// Global store of chain links; all chains live here.
struct ChainStore {
    lmax: usize,
    nodes: HashMap<PathPoint, ChainNode>,
}

impl SkipSpace<PathPoint> for ChainStore {
    fn lmax(&self) -> usize {
        self.lmax
    }

    fn next(&self, k: &PathPoint, layer: usize) -> PathPoint {
        let node = self.nodes.get(k).expect("path point present");
        debug_assert!(layer <= node.level, "layer above node level");
        node.next[layer]
    }

    fn set_next(&mut self, k: &PathPoint, layer: usize, v: PathPoint) {
        let node = self.nodes.get_mut(k).expect("path point present");
        debug_assert!(layer <= node.level, "layer above node level");
        node.next[layer] = v;
    }
}

pub struct Arrangement {
    seed: u64,
    lmax: usize,
    universe: Vec<Line2>,
    present: Vec<bool>,
    present_slopes: HashMap<i64, u32>,
    size: usize,
    start: SkipList<PathPoint>,
    chains: ChainStore,
}

impl Arrangement {
    /// Empty arrangement over a universe of candidate lines (slopes must
    /// be pairwise distinct). `lmax = ⌈log2 n²⌉` for the path-point
    /// universe of ordered pairs.
    pub fn new(universe: &[Line2], seed: u64) -> Result<Self, ArrError> {
        let mut slopes: HashMap<i64, u32> = HashMap::new();
        for (idx, l) in universe.iter().enumerate() {
            if l.id as usize != idx {
                return Err(ArrError::Corrupt(format!(
                    "universe line id {} at index {}",
                    l.id, idx
                )));
            }
            if let Some(prev) = slopes.insert(l.a, l.id) {
                return Err(ArrError::SlopeCollision {
                    inserting: l.id,
                    present: prev,
                    slope: l.a,
                });
            }
        }
        let n = universe.len().max(1) as u64;
        let lmax = crate::qcost::ceil_log2(n * n) as usize;
        Ok(Arrangement {
            seed,
            lmax,
            universe: universe.to_vec(),
            present: vec![false; universe.len()],
            present_slopes: HashMap::new(),
            size: 0,
            start: SkipList::with_lmax(n, seed, lmax),
            chains: ChainStore {
                lmax,
                nodes: HashMap::new(),
            },
        })
    }

    /// Build the arrangement of a subset by inserting in ascending id
    /// order (any order yields the same structure).
    pub fn build(universe: &[Line2], subset: &[u32], seed: u64) -> Result<(Self, OpStats), ArrError> {
        let mut arr = Arrangement::new(universe, seed)?;
        let mut ids: Vec<u32> = subset.to_vec();
        ids.sort_unstable();
        let mut stats = OpStats::default();
        for id in ids {
            stats.add(arr.insert_line(id)?);
        }
        Ok((arr, stats))
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    pub fn universe(&self) -> &[Line2] {
        &self.universe
    }

    pub fn contains_line(&self, id: u32) -> bool {
        (id as usize) < self.present.len() && self.present[id as usize]
    }

    pub fn present_lines(&self) -> Vec<u32> {
        (0..self.universe.len() as u32)
            .filter(|&id| self.present[id as usize])
            .collect()
    }

    fn line(&self, id: u32) -> Result<&Line2, ArrError> {
        self.universe
            .get(id as usize)
            .ok_or(ArrError::UnknownLine(id))
    }

    /// Exact coordinate of a path point.
    pub fn coord(&self, pp: PathPoint) -> Result<ExtPoint, ArrError> {
        match pp {
            PathPoint::Head(_) => Ok(ExtPoint::NegInf),
            PathPoint::Null => Ok(ExtPoint::PosInf),
            PathPoint::Cross(i, j) => {
                let li = self.line(i)?;
                let lj = self.line(j)?;
                let p = line_intersection(li, lj)
                    .map_err(|_| ArrError::Corrupt(format!("parallel pair ({i},{j})")))?;
                Ok(ExtPoint::Finite(p))
            }
        }
    }

    /// Unreduced x-coordinate fraction of the vertex of lines i and j,
    /// with positive denominator. Numerators stay below 2^21, so all
    /// comparisons fit in i128 cross-multiplication.
    fn cross_x(&self, i: u32, j: u32) -> (i64, i64) {
        let li = &self.universe[i as usize];
        let lj = &self.universe[j as usize];
        let (mut n, mut d) = (lj.b - li.b, li.a - lj.a);
        debug_assert!(d != 0);
        if d < 0 {
            n = -n;
            d = -d;
        }
        (n, d)
    }

    fn pp_x(&self, pp: &PathPoint) -> Option<(i64, i64)> {
        match pp {
            PathPoint::Cross(i, j) => Some(self.cross_x(*i, *j)),
            _ => None,
        }
    }

    /// Total chain order on path points: −∞ head, x-coordinate order,
    /// +∞ null. Within one vertex the pair of the list's own line comes
    /// first (`owner`); such ties only arise in a line's own list.
    fn cmp_pp(&self, p: &PathPoint, q: &PathPoint, owner: Option<u32>) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        use PathPoint::*;
        if p == q {
            return Equal;
        }
        match (p, q) {
            (Head(_), _) => Less,
            (_, Head(_)) => Greater,
            (Null, _) => Greater,
            (_, Null) => Less,
            (Cross(a, b), Cross(c, d)) => {
                let (n1, d1) = self.cross_x(*a, *b);
                let (n2, d2) = self.cross_x(*c, *d);
                let lhs = (n1 as i128) * (d2 as i128);
                let rhs = (n2 as i128) * (d1 as i128);
                match lhs.cmp(&rhs) {
                    Equal => {
                        // Same x: same unordered pair (the partner path
                        // point), ordered by the owning line.
                        debug_assert!(
                            (*a, *b) == (*d, *c),
                            "x-tie between distinct vertices {p} and {q}"
                        );
                        match owner {
                            Some(o) if *a == o => Less,
                            Some(o) if *c == o => Greater,
                            _ => {
                                debug_assert!(false, "untied partner comparison {p} vs {q}");
                                (a, b).cmp(&(c, d))
                            }
                        }
                    }
                    other => other,
                }
            }
        }
    }

    /// Compare a path point's x against a prepared query x.
    fn cmp_pp_x_vs_query(&self, pp: &PathPoint, q: &PreparedQuery) -> std::cmp::Ordering {
        match pp {
            PathPoint::Head(_) => std::cmp::Ordering::Less,
            PathPoint::Null => std::cmp::Ordering::Greater,
            PathPoint::Cross(i, j) => {
                let (n, d) = self.cross_x(*i, *j);
                match q.xi {
                    Some((qn, qd)) => ((n as i128) * qd).cmp(&(qn * (d as i128))),
                    None => {
                        let frac = Rat::new(n, d).expect("nonzero denominator");
                        frac.cmp(&q.x)
                    }
                }
            }
        }
    }

    fn start_cmp(&self, p: &PathPoint, q: &PathPoint) -> std::cmp::Ordering {
        slope_cmp(&self.universe, p, q)
    }

    // -----------------------------------------------------------------
    // Point location
    // -----------------------------------------------------------------

    /// Locate a query point among the levels. Steps are recorded in the
    /// returned stats; the modeled cost of one point location is charged
    /// as `(lmax+1)^6` units.
    pub fn locate_point(&self, p: &PointD) -> Result<(Location, OpStats), ArrError> {
        if self.size == 0 {
            return Err(ArrError::EmptyArrangement);
        }
        let q = PreparedQuery::new(p);
        let mut stats = OpStats {
            raw: 0,
            units: point_location_units(self.lmax),
        };
        let (location, _) = self.locate_inner(&q, &mut stats)?;
        Ok((location, stats))
    }

    /// Core location routine. Also returns the edge of the located
    /// level, which the sweeps consume.
    fn locate_inner(
        &self,
        q: &PreparedQuery,
        stats: &mut OpStats,
    ) -> Result<(Location, Option<Edge>), ArrError> {
        use std::cmp::Ordering::*;
        // Memoized per-head evaluation: where is q relative to the chain
        // of this head (Less = strictly below the level's value ordering
        // means q.y < value; Greater = strictly above).
        let mut memo: HashMap<u32, (std::cmp::Ordering, Edge)> = HashMap::new();
        let mut raw = 0u64;
        let mut eval = |head: u32, raw: &mut u64| -> (std::cmp::Ordering, Edge) {
            if let Some(hit) = memo.get(&head) {
                return hit.clone();
            }
            let (ord, edge) = self.chain_value_cmp(head, q, raw);
            memo.insert(head, (ord, edge.clone()));
            (ord, edge)
        };

        // Outer search over Start: monotone predicate "q strictly above
        // this chain" (chain values decrease with slope rank).
        let path = self.start.search_partition(|pp| {
            let head = match pp {
                PathPoint::Head(i) => *i,
                _ => unreachable!(),
            };
            let (ord, _) = eval(head, &mut raw);
            ord == Greater // q.y > chain value ⇒ strictly above
        });
        raw += path.steps;

        let candidate = path.preds[0];
        if candidate.is_nil() {
            stats.raw += raw;
            return Ok((Location::AboveAll, None));
        }
        let head = match candidate {
            PathPoint::Head(i) => i,
            _ => unreachable!(),
        };
        let (ord, edge) = eval(head, &mut raw);
        stats.raw += raw;

        // Rank of the candidate head in slope order (reporting only; not
        // part of the measured search work).
        let rank = || {
            self.start
                .iter_keys()
                .position(|k| k == candidate)
                .expect("candidate head in Start")
        };

        match ord {
            Greater => Err(ArrError::Corrupt(
                "outer search stopped above a level it reported".into(),
            )),
            Equal => {
                let k = rank();
                // On the level; exactly on a vertex when the successor
                // path point sits at the query x.
                if let Some(succ_x) = self.pp_x(&edge.succ) {
                    let same_x = match q.xi {
                        Some((qn, qd)) => (succ_x.0 as i128) * qd == qn * (succ_x.1 as i128),
                        None => Rat::new(succ_x.0, succ_x.1).expect("den > 0") == q.x,
                    };
                    if same_x {
                        if let PathPoint::Cross(a, b) = edge.succ {
                            return Ok((
                                Location::OnVertex {
                                    level: k,
                                    lines: (a.min(b), a.max(b)),
                                },
                                Some(edge),
                            ));
                        }
                    }
                }
                let location = Location::OnLevel {
                    level: k,
                    head: candidate,
                    pred: edge.pred,
                    succ: edge.succ,
                    line: edge.support,
                };
                Ok((location, Some(edge)))
            }
            Less => {
                // q strictly below the candidate level.
                let k = rank();
                if k + 1 < self.size {
                    Ok((Location::Between(k, k + 1), Some(edge)))
                } else {
                    Ok((Location::BelowAll, Some(edge)))
                }
            }
        }
    }

    /// Find the edge of the chain `head` whose x-projection contains the
    /// query x (strict predecessor search), and compare q.y against the
    /// supporting line's value there. Returns (q.y vs value, edge).
    fn chain_value_cmp(
        &self,
        head: u32,
        q: &PreparedQuery,
        raw: &mut u64,
    ) -> (std::cmp::Ordering, Edge) {
        let start = PathPoint::Head(head);
        let path = search_path(&self.chains, &start, |pp| {
            self.cmp_pp_x_vs_query(pp, q) == std::cmp::Ordering::Less
        });
        *raw += path.steps;
        let pred = path.preds[0];
        let succ = self.chains.next(&pred, 0);
        let support = pred.outgoing().expect("pred is head or cross");
        let line = &self.universe[support as usize];
        let ord = q.y.cmp_affine(line.a, line.b, &q.x);
        (
            ord,
            Edge {
                pred,
                succ,
                support,
                chain_head: start,
            },
        )
    }

    /// Line through the query point, if any.
    pub fn incidence(&self, p: &PointD) -> Result<(Option<u32>, OpStats), ArrError> {
        if self.size == 0 {
            return Ok((None, OpStats::default()));
        }
        let (loc, stats) = self.locate_point(p)?;
        let hit = match loc {
            Location::OnLevel { line, .. } => Some(line),
            Location::OnVertex { lines, .. } => Some(lines.0),
            _ => None,
        };
        Ok((hit, stats))
    }

    // -----------------------------------------------------------------
    // Insertion sweep
    // -----------------------------------------------------------------

    /// Insert a line: build its own path-point skip list, sweep its
    /// intersections right to left swapping chain tails, then add its
    /// head to Start.
    pub fn insert_line(&mut self, id: u32) -> Result<OpStats, ArrError> {
        let new_line = *self.line(id)?;
        if self.present[id as usize] {
            return Err(ArrError::DuplicateLine(id));
        }
        if let Some(&other) = self.present_slopes.get(&new_line.a) {
            return Err(ArrError::SlopeCollision {
                inserting: id,
                present: other,
                slope: new_line.a,
            });
        }

        let mut stats = OpStats::default();
        let op4 = skiplist_op_units(self.lmax);
        let loc6 = point_location_units(self.lmax);

        // Intersections with the present lines, ascending x. A shared x
        // means three lines through one point.
        let mut crossings: Vec<(i64, i64, u32)> = self
            .present_lines()
            .iter()
            .map(|&j| {
                let (n, d) = self.cross_x(id, j);
                (n, d, j)
            })
            .collect();
        crossings.sort_unstable_by(|a, b| ((a.0 as i128) * (b.1 as i128)).cmp(&((b.0 as i128) * (a.1 as i128))));
        for w in crossings.windows(2) {
            if (w[0].0 as i128) * (w[1].1 as i128) == (w[1].0 as i128) * (w[0].1 as i128) {
                return Err(ArrError::TripleConcurrence(w[0].2, w[1].2, id));
            }
        }

        // Build the new line's list: [H(i), (C(i,j), C(j,i)) per
        // intersection in ascending x, Null], linking each layer in one
        // pass.
        let mut sequence: Vec<PathPoint> = Vec::with_capacity(2 * crossings.len() + 1);
        sequence.push(PathPoint::Head(id));
        for &(_, _, j) in &crossings {
            sequence.push(PathPoint::Cross(id, j));
            sequence.push(PathPoint::Cross(j, id));
        }
        let mut last_at: Vec<PathPoint> = vec![PathPoint::Null; self.lmax + 1];
        for (idx, pp) in sequence.iter().enumerate() {
            let level = if idx == 0 {
                self.lmax
            } else {
                level_of(pp.encode(), self.seed, self.lmax)
            };
            self.chains.nodes.insert(
                *pp,
                ChainNode {
                    level,
                    next: vec![PathPoint::Null; level + 1],
                },
            );
            for layer in 0..=level {
                if !last_at[layer].is_nil() {
                    self.chains.set_next(&last_at[layer], layer, *pp);
                }
                last_at[layer] = *pp;
            }
            stats.raw += 1 + level as u64;
        }
        stats.units += (sequence.len() as u64) * op4;

        // Sweep right to left.
        for &(_, _, j) in crossings.iter().rev() {
            match self.sweep_swap(id, j, true, op4, loc6, &mut stats) {
                Ok(()) => {}
                Err(e) => return Err(e),
            }
        }

        // Finally publish the head in Start.
        let universe = &self.universe;
        let ins = self
            .start
            .insert(PathPoint::Head(id), |p, q| slope_cmp(universe, p, q))
            .map_err(|_| ArrError::Corrupt("Start already holds this head".into()))?;
        stats.raw += ins;
        stats.units += op4;

        self.present[id as usize] = true;
        self.present_slopes.insert(new_line.a, id);
        self.size += 1;
        Ok(stats)
    }

    /// Remove a line: the exact inverse sweep, left to right, then drop
    /// the line's own list.
    pub fn remove_line(&mut self, id: u32) -> Result<OpStats, ArrError> {
        let line = *self.line(id)?;
        if !self.present[id as usize] {
            return Err(ArrError::MissingLine(id));
        }
        let mut stats = OpStats::default();
        let op4 = skiplist_op_units(self.lmax);
        let loc6 = point_location_units(self.lmax);

        // Unpublish the head first (inverse of insertion's last step).
        let universe = &self.universe;
        let rem = self
            .start
            .remove(&PathPoint::Head(id), |p, q| slope_cmp(universe, p, q))
            .map_err(|_| ArrError::Corrupt("Start lost this head".into()))?;
        stats.raw += rem;
        stats.units += op4;
        self.present[id as usize] = false;
        self.present_slopes.remove(&line.a);
        self.size -= 1;

        let mut crossings: Vec<(i64, i64, u32)> = self
            .present_lines()
            .iter()
            .map(|&j| {
                let (n, d) = self.cross_x(id, j);
                (n, d, j)
            })
            .collect();
        crossings.sort_unstable_by(|a, b| ((a.0 as i128) * (b.1 as i128)).cmp(&((b.0 as i128) * (a.1 as i128))));

        // Inverse sweep, ascending x.
        for &(_, _, j) in crossings.iter() {
            self.sweep_swap(id, j, false, op4, loc6, &mut stats)?;
        }

        // The line's list has reassembled; discard it.
        let mut expected = 2 * crossings.len() + 1;
        let mut cur = PathPoint::Head(id);
        while !cur.is_nil() {
            let node = self
                .chains
                .nodes
                .remove(&cur)
                .ok_or_else(|| ArrError::Corrupt(format!("missing node {cur} while discarding")))?;
            expected = expected
                .checked_sub(1)
                .ok_or_else(|| ArrError::Corrupt("line list too long after removal".into()))?;
            cur = node.next[0];
            stats.raw += 1;
        }
        if expected != 0 {
            return Err(ArrError::Corrupt("line list too short after removal".into()));
        }
        stats.units += (2 * crossings.len() as u64 + 1) * op4;
        Ok(stats)
    }

    /// One sweep step at the vertex of `id` (the line being inserted or
    /// removed) and `j` (a present line): locate the vertex, then swap
    /// the tails of the line's own list after C(id, j) and the located
    /// chain after the located edge's left endpoint.
    fn sweep_swap(
        &mut self,
        id: u32,
        j: u32,
        inserting: bool,
        op4: u64,
        loc6: u64,
        stats: &mut OpStats,
    ) -> Result<(), ArrError> {
        let (xn, xd) = self.cross_x(id, j);
        let x = Rat::new(xn, xd).expect("den > 0");
        let y = self.universe[j as usize].eval_at(&x);
        let q = PreparedQuery::from_parts(x, y);

        let mut loc_stats = OpStats::default();
        let (_, edge) = self.locate_inner(&q, &mut loc_stats)?;
        stats.raw += loc_stats.raw;
        stats.units += loc6;
        let edge = edge.ok_or_else(|| {
            ArrError::Corrupt(format!("sweep vertex ({id},{j}) located above all levels"))
        })?;

        if inserting {
            // The old edge must pass strictly across the vertex along
            // line j; a path point exactly at the vertex means a third
            // line passes through it.
            if edge.support != j {
                return Err(ArrError::TripleConcurrence(id, j, edge.support));
            }
            if let Some((sn, sd)) = self.pp_x(&edge.succ) {
                if (sn as i128) * (xd as i128) == (xn as i128) * (sd as i128) {
                    return Err(ArrError::Corrupt(format!(
                        "vertex ({id},{j}) coincides with existing vertex {}",
                        edge.succ
                    )));
                }
            }
        } else {
            // Inverse sweep: the located edge must end at ν_{j,id}.
            if edge.succ != PathPoint::Cross(j, id) {
                return Err(ArrError::Corrupt(format!(
                    "inverse sweep at ({id},{j}) found edge ending at {}",
                    edge.succ
                )));
            }
        }

        // Anchors in the line's own list after C(id, j) …
        let cut_a = PathPoint::Cross(id, j);
        let path_a = search_path(&self.chains, &PathPoint::Head(id), |pp| {
            self.cmp_pp(pp, &cut_a, Some(id)) != std::cmp::Ordering::Greater
        });
        // … and in the located chain after the edge's left endpoint.
        let head_b = self.head_of_edge(&edge)?;
        let cut_b = edge.pred;
        let path_b = search_path(&self.chains, &head_b, |pp| {
            self.cmp_pp(pp, &cut_b, None) != std::cmp::Ordering::Greater
        });
        stats.raw += path_a.steps + path_b.steps;
        stats.units += 3 * op4; // two anchor searches and the link swap

        let writes = swap_tails_links(&mut self.chains, &path_a.preds, &path_b.preds);
        debug_assert_eq!(writes, 2 * (self.lmax as u64 + 1));
        stats.raw += writes;
        Ok(())
    }

    fn head_of_edge(&self, edge: &Edge) -> Result<PathPoint, ArrError> {
        // The chain containing the located edge is identified by its
        // head; locate_inner always evaluates edges from a chain head,
        // so pred's chain head is recoverable from the memoized call.
        // The pred itself suffices: a Head is its own chain; for a Cross
        // the edge was produced by chain_value_cmp walking from the head
        // recorded in the edge.
        Ok(edge.chain_head)
    }

    // -----------------------------------------------------------------
    // Chains, verification, fingerprints
    // -----------------------------------------------------------------

    /// Layer-0 walk of the k-th level chain in slope order, head and
    /// null included.
    pub fn level_chain(&self, k: usize) -> Result<Vec<PathPoint>, ArrError> {
        if self.size == 0 {
            return Err(ArrError::EmptyArrangement);
        }
        if k >= self.size {
            return Err(ArrError::LevelOutOfRange { k, size: self.size });
        }
        let head = self
            .start
            .iter_keys()
            .nth(k)
            .ok_or(ArrError::LevelOutOfRange { k, size: self.size })?;
        let mut chain = vec![head];
        let mut cur = head;
        loop {
            let nxt = self.chains.next(&cur, 0);
            chain.push(nxt);
            if nxt.is_nil() {
                return Ok(chain);
            }
            cur = nxt;
        }
    }

    /// Canonical fingerprint: the Start serialization plus each chain's
    /// serialization in slope order, digested with mix64 chaining. A
    /// pure function of (line set, seed).
    pub fn fingerprint(&self) -> u64 {
        let mut words: Vec<u64> = vec![
            self.seed,
            self.universe.len() as u64,
            self.lmax as u64,
            self.size as u64,
        ];
        words.extend(self.start.canonical_words());
        for head in self.start.iter_keys() {
            let mut cur = head;
            loop {
                let node = &self.chains.nodes[&cur];
                words.push(cur.encode());
                words.push(node.level as u64);
                words.extend(node.next.iter().map(|k| k.encode()));
                let nxt = node.next[0];
                if nxt.is_nil() {
                    break;
                }
                cur = nxt;
            }
        }
        digest_words(words)
    }

    /// Check every structural invariant; returns human-readable
    /// violations (empty = healthy).
    pub fn verify(&self) -> Vec<String> {
        let mut report = Vec::new();
        let heads: Vec<PathPoint> = self.start.iter_keys().collect();
        if heads.len() != self.size {
            report.push(format!(
                "Start holds {} heads for {} present lines",
                heads.len(),
                self.size
            ));
        }
        for w in heads.windows(2) {
            if self.start_cmp(&w[0], &w[1]) != std::cmp::Ordering::Less {
                report.push(format!("Start slope order broken at {} .. {}", w[0], w[1]));
            }
        }

        let mut all_cross: Vec<(u32, u32)> = Vec::new();
        let mut visited_nodes = 0usize;
        for (rank, &head) in heads.iter().enumerate() {
            let chain = match self.walk_chain(head) {
                Ok(c) => c,
                Err(e) => {
                    report.push(format!("chain {head}: {e}"));
                    continue;
                }
            };
            visited_nodes += chain.len();
            // Continuity and x-monotonicity.
            let mut prev = head;
            for pp in chain.iter().skip(1) {
                match (prev, pp) {
                    (PathPoint::Head(h), PathPoint::Cross(a, _)) if *a != h => {
                        report.push(format!("chain {head}: first cross {pp} not on line {h}"))
                    }
                    (PathPoint::Cross(_, b), PathPoint::Cross(c, _)) if *c != b => report.push(
                        format!("chain {head}: support breaks between {prev} and {pp}"),
                    ),
                    _ => {}
                }
                if !matches!(pp, PathPoint::Null)
                    && self.cmp_pp(&prev, pp, None) != std::cmp::Ordering::Less
                {
                    report.push(format!("chain {head}: x order breaks at {prev} .. {pp}"));
                }
                if let PathPoint::Cross(a, b) = pp {
                    all_cross.push((*a, *b));
                }
                prev = *pp;
            }
            // Layer links agree with levels.
            if let Err(e) = self.check_chain_layers(head, &chain) {
                report.push(format!("chain {head}: {e}"));
            }
            // Exactly k lines strictly above each edge midpoint.
            if let Err(e) = self.check_edges_above(rank, head, &chain) {
                report.push(e);
            }
        }

        // Every ordered pair of present lines appears exactly once.
        let present = self.present_lines();
        let mut expected: Vec<(u32, u32)> = Vec::new();
        for &i in &present {
            for &j in &present {
                if i != j {
                    expected.push((i, j));
                }
            }
        }
        let mut got = all_cross.clone();
        got.sort_unstable();
        expected.sort_unstable();
        if got != expected {
            report.push(format!(
                "cross path points mismatch: {} stored vs {} expected",
                got.len(),
                expected.len()
            ));
        }
        // Store hygiene: chains account for every stored node.
        if visited_nodes != self.chains.nodes.len() {
            report.push(format!(
                "store holds {} nodes, chains reach {}",
                self.chains.nodes.len(),
                visited_nodes
            ));
        }
        report
    }

    fn walk_chain(&self, head: PathPoint) -> Result<Vec<PathPoint>, String> {
        let mut chain = vec![head];
        let mut cur = head;
        let limit = self.chains.nodes.len() + 2;
        loop {
            let node = self
                .chains
                .nodes
                .get(&cur)
                .ok_or_else(|| format!("dangling link to {cur}"))?;
            let nxt = node.next[0];
            if nxt.is_nil() {
                return Ok(chain);
            }
            chain.push(nxt);
            if chain.len() > limit {
                return Err("cycle in layer 0".into());
            }
            cur = nxt;
        }
    }

    fn check_chain_layers(&self, head: PathPoint, chain: &[PathPoint]) -> Result<(), String> {
        for layer in 0..=self.lmax {
            let expected: Vec<PathPoint> = chain
                .iter()
                .skip(1)
                .filter(|pp| {
                    self.chains
                        .nodes
                        .get(pp)
                        .map(|n| n.level >= layer)
                        .unwrap_or(false)
                })
                .copied()
                .collect();
            let mut walked = Vec::new();
            let mut cur = self.chains.nodes[&head].next[layer];
            while !cur.is_nil() {
                let node = self
                    .chains
                    .nodes
                    .get(&cur)
                    .ok_or_else(|| format!("dangling layer-{layer} link to {cur}"))?;
                if node.level < layer {
                    return Err(format!("{cur} linked above its level on layer {layer}"));
                }
                walked.push(cur);
                if walked.len() > chain.len() {
                    return Err(format!("cycle on layer {layer}"));
                }
                cur = node.next[layer];
            }
            if walked != expected {
                return Err(format!("layer {layer} disagrees with levels"));
            }
        }
        Ok(())
    }

    fn check_edges_above(
        &self,
        rank: usize,
        head: PathPoint,
        chain: &[PathPoint],
    ) -> Result<(), String> {
        let present = self.present_lines();
        // Sample x strictly inside each edge: finite edges take the
        // midpoint, the unbounded first and last edges step one unit
        // beyond their single endpoint. Vertex x-numerators stay below
        // 2^21, so the sample fraction and all line values at it fit
        // comfortably in i128.
        let xs: Vec<Option<(i64, i64)>> = chain.iter().map(|pp| self.pp_x(pp)).collect();
        for e in 0..chain.len() - 1 {
            let support = chain[e].outgoing().expect("edge start");
            let (sn, sd): (i128, i128) = match (&xs[e], &xs[e + 1]) {
                (None, None) => (0, 1),
                (None, Some((n, d))) => ((*n - *d) as i128, *d as i128),
                (Some((n, d)), None) => ((*n + *d) as i128, *d as i128),
                (Some((n1, d1)), Some((n2, d2))) => (
                    (*n1 as i128) * (*d2 as i128) + (*n2 as i128) * (*d1 as i128),
                    2 * (*d1 as i128) * (*d2 as i128),
                ),
            };
            debug_assert!(sd > 0);
            let line = &self.universe[support as usize];
            // value numerator over the positive denominator sd, shared
            // by every line's value at the sample.
            let value_num = (line.a as i128) * sn + (line.b as i128) * sd;
            let above = present
                .iter()
                .filter(|&&l| {
                    l != support && {
                        let other = &self.universe[l as usize];
                        (other.a as i128) * sn + (other.b as i128) * sd > value_num
                    }
                })
                .count();
            if above != rank {
                return Err(format!(
                    "chain {head} rank {rank}: edge {} has {above} lines above",
                    chain[e]
                ));
            }
        }
        Ok(())
    }

    /// Deliberately corrupt a layer-0 link. Diagnostic hook for fault
    /// injection in the verification suites.
    pub fn debug_corrupt_link(&mut self, from: PathPoint, to: PathPoint) -> Result<(), ArrError> {
        let node = self
            .chains
            .nodes
            .get_mut(&from)
            .ok_or_else(|| ArrError::Corrupt(format!("no node {from}")))?;
        node.next[0] = to;
        Ok(())
    }
}

fn slope_cmp(universe: &[Line2], p: &PathPoint, q: &PathPoint) -> std::cmp::Ordering {
    let slope = |pp: &PathPoint| match pp {
        PathPoint::Head(i) => universe[*i as usize].a,
        _ => unreachable!("Start holds only heads"),
    };
    slope(p).cmp(&slope(q))
}

/// Edge of a level chain: the path point opening it, its successor, and
/// the supporting line, tagged with the chain's head.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Edge {
    pred: PathPoint,
    succ: PathPoint,
    support: u32,
    chain_head: PathPoint,
}

/// Query point with extracted i128 fast-path fractions.
struct PreparedQuery {
    x: Rat,
    y: Rat,
    xi: Option<(i128, i128)>,
}

impl PreparedQuery {
    fn new(p: &PointD) -> Self {
        Self::from_parts(p.x().clone(), p.y().clone())
    }

    fn from_parts(x: Rat, y: Rat) -> Self {
        let xi = x.as_i128_pair();
        PreparedQuery { x, y, xi }
    }
}
