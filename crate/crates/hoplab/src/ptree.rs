//! Partition tree over points answering hyperplane emptiness queries.
//!
//! Realized as a kd-median tree: cells are axis-aligned boxes (infinite
//! at the root), the split axis cycles with depth, and the split value
//! is the lower median with ties going left. A hyperplane crosses
//! O(n^{1−1/d}) cells by the standard kd recurrence, which is the only
//! property the charged query cost consumes, along with O(1) fan-out and
//! logarithmic depth.

use serde_json::json;

use crate::geom::{Hyperplane, PointD, Rat};
use crate::qcost::{backtracking_charge, CostLedger};

/// Axis-aligned box with optionally infinite bounds per axis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    /// Lower bounds; `None` is −∞.
    pub lo: Vec<Option<Rat>>,
    /// Upper bounds; `None` is +∞.
    pub hi: Vec<Option<Rat>>,
}

impl Cell {
    fn unbounded(d: usize) -> Self {
        Cell {
            lo: vec![None; d],
            hi: vec![None; d],
        }
    }

    pub fn contains(&self, p: &PointD) -> bool {
        (0..self.lo.len()).all(|k| {
            self.lo[k].as_ref().map_or(true, |b| p.coord(k) >= b)
                && self.hi[k].as_ref().map_or(true, |b| p.coord(k) <= b)
        })
    }

    /// Whether the closure of the box meets the hyperplane: the linear
    /// form Σ a_k·x_k − c changes sign (or touches zero) over the box,
    /// decided by interval evaluation of the form.
    pub fn intersects(&self, h: &Hyperplane) -> bool {
        let mut min = Rat::from_int(-h.offset);
        let mut max = Rat::from_int(-h.offset);
        let mut min_inf = false;
        let mut max_inf = false;
        for (k, &a) in h.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let (lo, hi) = if a > 0 {
                (&self.lo[k], &self.hi[k])
            } else {
                (&self.hi[k], &self.lo[k])
            };
            match lo {
                Some(b) => min = &min + &(&Rat::from_int(a) * b),
                None => min_inf = true,
            }
            match hi {
                Some(b) => max = &max + &(&Rat::from_int(a) * b),
                None => max_inf = true,
            }
        }
        let zero = Rat::zero();
        (min_inf || min <= zero) && (max_inf || max >= zero)
    }
}

#[derive(Debug)]
pub struct PTNode {
    pub cell: Cell,
    pub children: Option<Box<[PTNode; 2]>>,
    /// Point ids (indexes into the build input); leaves only.
    pub points: Vec<u32>,
}

impl PTNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }
}

#[derive(Debug)]
pub struct PTree {
    pub root: PTNode,
    pub n: usize,
    pub d: usize,
    pub leaf_capacity: usize,
    depth: usize,
    build_steps: u64,
    points: Vec<PointD>,
}

pub const DEFAULT_LEAF_CAPACITY: usize = 4;

/// Build a partition tree with the default leaf capacity.
pub fn build(points: &[PointD], d: usize) -> PTree {
    build_with_capacity(points, d, DEFAULT_LEAF_CAPACITY)
}

pub fn build_with_capacity(points: &[PointD], d: usize, leaf_capacity: usize) -> PTree {
    assert!(d >= 2);
    assert!(leaf_capacity >= 1);
    for p in points {
        assert_eq!(p.dim(), d, "point dimension mismatch");
    }

    // Sort ids lexicographically by coordinates first, so the tree is a
    // function of the point set, not the input order.
    let mut ids: Vec<u32> = (0..points.len() as u32).collect();
    ids.sort_by(|&a, &b| lex_cmp(&points[a as usize], &points[b as usize]));
    debug_assert!(
        ids.windows(2)
            .all(|w| lex_cmp(&points[w[0] as usize], &points[w[1] as usize]).is_lt()),
        "points must be pairwise distinct"
    );

    let mut steps = (points.len() as u64) * crate::qcost::ceil_log2(points.len().max(1) as u64);
    let mut max_depth = 0usize;
    let root = build_node(
        points,
        &mut ids[..],
        Cell::unbounded(d),
        0,
        d,
        leaf_capacity,
        &mut steps,
        &mut max_depth,
    );
    PTree {
        root,
        n: points.len(),
        d,
        leaf_capacity,
        depth: max_depth,
        build_steps: steps,
        points: points.to_vec(),
    }
}

fn lex_cmp(a: &PointD, b: &PointD) -> std::cmp::Ordering {
    for k in 0..a.dim() {
        match a.coord(k).cmp(b.coord(k)) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

#[allow(clippy::too_many_arguments)]
fn build_node(
    points: &[PointD],
    ids: &mut [u32],
    cell: Cell,
    depth: usize,
    d: usize,
    leaf_capacity: usize,
    steps: &mut u64,
    max_depth: &mut usize,
) -> PTNode {
    *max_depth = (*max_depth).max(depth);
    *steps += ids.len() as u64;
    if ids.len() <= leaf_capacity {
        return PTNode {
            cell,
            children: None,
            points: ids.to_vec(),
        };
    }

    // Split on the depth-cycled axis; if every point shares that
    // coordinate, advance to the next axis (distinct points guarantee
    // some axis separates).
    for attempt in 0..d {
        let axis = (depth + attempt) % d;
        ids.sort_by(|&x, &y| {
            points[x as usize]
                .coord(axis)
                .cmp(points[y as usize].coord(axis))
                .then_with(|| lex_cmp(&points[x as usize], &points[y as usize]))
        });
        let median = points[ids[(ids.len() - 1) / 2] as usize].coord(axis).clone();
        let split = ids.partition_point(|&x| points[x as usize].coord(axis) <= &median);
        if split == ids.len() {
            continue; // all points at or below the median value — no cut
        }
        let mut left_cell = cell.clone();
        left_cell.hi[axis] = Some(median.clone());
        let mut right_cell = cell.clone();
        right_cell.lo[axis] = Some(median.clone());
        let (lhs, rhs) = ids.split_at_mut(split);
        let left = build_node(points, lhs, left_cell, depth + 1, d, leaf_capacity, steps, max_depth);
        let right =
            build_node(points, rhs, right_cell, depth + 1, d, leaf_capacity, steps, max_depth);
        return PTNode {
            cell,
            children: Some(Box::new([left, right])),
            points: Vec::new(),
        };
    }
    unreachable!("pairwise-distinct points always admit a separating axis");
}

/// Result of one emptiness traversal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Emptiness {
    pub found: bool,
    /// First incident point id (by traversal order), when found.
    pub witness: Option<u32>,
    /// Number of nodes whose cell meets the hyperplane (the pruned
    /// traversal tree), leaves included.
    pub visited: u64,
}

impl PTree {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn height(&self) -> u64 {
        (self.depth + 1) as u64
    }

    pub fn build_steps(&self) -> u64 {
        self.build_steps
    }

    pub fn points(&self) -> &[PointD] {
        &self.points
    }

    /// Exact emptiness query: does any stored point lie on `h`?
    /// `visited` counts the nodes of the pruned traversal tree.
    pub fn emptiness_classical(&self, h: &Hyperplane) -> Emptiness {
        assert_eq!(h.dim(), self.d, "hyperplane dimension mismatch");
        let mut out = Emptiness {
            found: false,
            witness: None,
            visited: 0,
        };
        self.visit(&self.root, h, &mut out);
        out
    }

    fn visit(&self, node: &PTNode, h: &Hyperplane, out: &mut Emptiness) {
        out.visited += 1;
        match &node.children {
            None => {
                for &id in &node.points {
                    if h.contains(&self.points[id as usize]) && !out.found {
                        out.found = true;
                        out.witness = Some(id);
                    }
                }
            }
            Some(kids) => {
                for child in kids.iter() {
                    if child.cell.intersects(h) {
                        self.visit(child, h, out);
                    }
                }
            }
        }
    }

    /// Exact count of tree nodes whose cell closure meets `h`.
    pub fn crossing_count(&self, h: &Hyperplane) -> u64 {
        fn rec(node: &PTNode, h: &Hyperplane) -> u64 {
            if !node.cell.intersects(h) {
                return 0;
            }
            1 + node
                .children
                .as_ref()
                .map_or(0, |kids| kids.iter().map(|c| rec(c, h)).sum())
        }
        rec(&self.root, h)
    }

    /// Emptiness with the backtracking charge `c_b·⌈√(T·hgt)⌉`, where T
    /// is the measured pruned-traversal size and hgt the tree height.
    /// The answer is exact; the charge is recorded in the ledger.
    pub fn emptiness_charged(&self, h: &Hyperplane, ledger: &mut CostLedger) -> (Emptiness, Rat) {
        let result = self.emptiness_classical(h);
        let t = result.visited.max(1);
        let hgt = self.height();
        let charge = backtracking_charge(t, hgt, &ledger.constants);
        ledger.record(
            "backtracking-emptiness",
            json!({"T": t, "hgt": hgt, "hyperplane": h.id}),
            charge.clone(),
        );
        (result, charge)
    }

    /// Deterministic preorder serialization: cells as rational strings,
    /// leaf point coordinates in stored order. Identical for any
    /// permutation of the same input points.
    pub fn serialize(&self) -> String {
        fn bound(b: &Option<Rat>, neg: bool) -> String {
            match b {
                None if neg => "-inf".into(),
                None => "+inf".into(),
                Some(r) => r.to_string(),
            }
        }
        fn rec(tree: &PTree, node: &PTNode, out: &mut String) {
            let cell: Vec<String> = (0..tree.d)
                .map(|k| {
                    format!(
                        "[{},{}]",
                        bound(&node.cell.lo[k], true),
                        bound(&node.cell.hi[k], false)
                    )
                })
                .collect();
            match &node.children {
                None => {
                    let pts: Vec<String> = node
                        .points
                        .iter()
                        .map(|&id| {
                            let p = &tree.points[id as usize];
                            let coords: Vec<String> =
                                p.coords().map(|c| c.to_string()).collect();
                            format!("({})", coords.join(","))
                        })
                        .collect();
                    out.push_str(&format!("L {} pts={}\n", cell.join("x"), pts.join(";")));
                }
                Some(kids) => {
                    out.push_str(&format!("N {}\n", cell.join("x")));
                    rec(tree, &kids[0], out);
                    rec(tree, &kids[1], out);
                }
            }
        }
        let mut out = String::new();
        rec(self, &self.root, &mut out);
        out
    }

    /// Structural invariants: child cells nest in their parents, interior
    /// nodes store no ids, and the leaves partition the point set.
    pub fn check_partition(&self) -> Result<(), String> {
        fn nested(parent: &Cell, child: &Cell) -> bool {
            (0..parent.lo.len()).all(|k| {
                let lo_ok = match (&parent.lo[k], &child.lo[k]) {
                    (Some(p), Some(c)) => c >= p,
                    (Some(_), None) => false,
                    (None, _) => true,
                };
                let hi_ok = match (&parent.hi[k], &child.hi[k]) {
                    (Some(p), Some(c)) => c <= p,
                    (Some(_), None) => false,
                    (None, _) => true,
                };
                lo_ok && hi_ok
            })
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![&self.root];
        while let Some(node) = stack.pop() {
            match &node.children {
                Some(kids) => {
                    if !node.points.is_empty() {
                        return Err("interior node stores point ids".into());
                    }
                    for child in kids.iter() {
                        if !nested(&node.cell, &child.cell) {
                            return Err("child cell escapes parent cell".into());
                        }
                        stack.push(child);
                    }
                }
                None => {
                    for &id in &node.points {
                        let p = &self.points[id as usize];
                        if !node.cell.contains(p) {
                            return Err(format!("point {id} outside its leaf cell"));
                        }
                        if seen[id as usize] {
                            return Err(format!("point {id} stored twice"));
                        }
                        seen[id as usize] = true;
                    }
                }
            }
        }
        if seen.iter().all(|&s| s) {
            Ok(())
        } else {
            Err("some point is missing from the leaves".into())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{gen_instance, Line2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn pts(coords: &[(i64, i64)]) -> Vec<PointD> {
        coords
            .iter()
            .map(|&(x, y)| PointD::from_ints(&[x, y]))
            .collect()
    }

    #[test]
    fn single_point_single_leaf() {
        let t = build(&pts(&[(1, 1)]), 2);
        assert_eq!(t.depth(), 0);
        assert!(t.root.is_leaf());
        assert_eq!(t.root.points, vec![0]);
        t.check_partition().unwrap();
    }

    #[test]
    fn eight_points_split_evenly() {
        // x = 0..7, distinct y. Lower median x = 3 splits 4-4; both
        // halves fit a leaf of capacity 4, so depth 1 with 2 leaves.
        let t = build(&pts(&[(0, 5), (1, 9), (2, 1), (3, 7), (4, 2), (5, 8), (6, 0), (7, 4)]), 2);
        assert!(t.depth() <= 1 + 2);
        assert_eq!(t.depth(), 1);
        let kids = t.root.children.as_ref().unwrap();
        assert_eq!(kids[0].points.len(), 4);
        assert_eq!(kids[1].points.len(), 4);
        // The hand oracle: left leaf holds x ≤ 3, right holds x > 3.
        for &id in &kids[0].points {
            assert!(t.points()[id as usize].x() <= &Rat::from_int(3));
        }
        for &id in &kids[1].points {
            assert!(t.points()[id as usize].x() > &Rat::from_int(3));
        }
        t.check_partition().unwrap();
    }

    #[test]
    fn order_insensitive_serialization() {
        let base = pts(&[(3, 1), (0, 4), (7, 2), (5, 9), (1, 1), (6, 3), (2, 8), (4, 0)]);
        let t1 = build(&base, 2);
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..5 {
            let mut perm = base.clone();
            for i in (1..perm.len()).rev() {
                let j = rng.random_range(0..=i);
                perm.swap(i, j);
            }
            let t2 = build(&perm, 2);
            assert_eq!(t1.serialize(), t2.serialize());
        }
    }

    #[test]
    fn emptiness_trivial_cases() {
        let t = build(&pts(&[(1, 1)]), 2);
        let on = Line2::new(0, 1, 0).unwrap().as_hyperplane(); // y = x
        let off = Line2::new(1, 0, 0).unwrap().as_hyperplane(); // y = 0
        let r = t.emptiness_classical(&on);
        assert!(r.found && r.visited >= 1);
        assert_eq!(r.witness, Some(0));
        assert!(!t.emptiness_classical(&off).found);
    }

    #[test]
    fn emptiness_matches_brute_force() {
        let inst = gen_instance(2, 100, 256, 3, 1 << 9, 404).unwrap();
        let t = build(&inst.points, 2);
        t.check_partition().unwrap();
        for line in inst.lines() {
            let h = line.as_hyperplane();
            let brute = inst.points.iter().any(|p| line.contains(p));
            let r = t.emptiness_classical(&h);
            assert_eq!(r.found, brute, "line {}", line.id);
            if let Some(w) = r.witness {
                assert!(line.contains(&inst.points[w as usize]));
            }
        }
    }

    #[test]
    fn crossing_single_leaf() {
        let t = build(&pts(&[(1, 1)]), 2);
        let h = Line2::new(0, 1, 0).unwrap().as_hyperplane();
        assert_eq!(t.crossing_count(&h), 1);
    }

    /// Corner-sign oracle: replace infinite bounds by a huge finite
    /// value and test for a sign change of the linear form over the
    /// box corners. Valid whenever |coords|, |coeffs| stay far below M.
    fn corner_sign_intersects(cell: &Cell, h: &Hyperplane) -> bool {
        let m = Rat::from_int(1_000_000_000_000);
        let d = h.dim();
        let mut any_nonneg = false;
        let mut any_nonpos = false;
        for mask in 0..(1u32 << d) {
            let mut acc = Rat::from_int(-h.offset);
            for k in 0..d {
                let bound = if mask & (1 << k) != 0 {
                    cell.hi[k].clone().unwrap_or_else(|| m.clone())
                } else {
                    cell.lo[k].clone().unwrap_or_else(|| -(m.clone()))
                };
                acc = &acc + &(&Rat::from_int(h.coeffs[k]) * &bound);
            }
            let zero = Rat::zero();
            if acc >= zero {
                any_nonneg = true;
            }
            if acc <= zero {
                any_nonpos = true;
            }
        }
        any_nonneg && any_nonpos
    }

    #[test]
    fn crossing_count_matches_corner_oracle() {
        let inst = gen_instance(2, 40, 200, 0, 1 << 8, 7171).unwrap();
        let t = build(&inst.points, 2);
        for line in inst.lines() {
            let h = line.as_hyperplane();
            fn oracle_count(node: &PTNode, h: &Hyperplane) -> u64 {
                if !corner_sign_intersects(&node.cell, h) {
                    return 0;
                }
                1 + node
                    .children
                    .as_ref()
                    .map_or(0, |kids| kids.iter().map(|c| oracle_count(c, h)).sum())
            }
            assert_eq!(t.crossing_count(&h), oracle_count(&t.root, &h));
        }
    }

    #[test]
    fn grid_crossing_stays_near_sqrt_n() {
        let side = 64; // n = 2^12 grid
        let n = side * side;
        let mut points = Vec::with_capacity(n);
        for x in 0..side as i64 {
            for y in 0..side as i64 {
                points.push(PointD::from_ints(&[x, y]));
            }
        }
        let t = build(&points, 2);
        let mut rng = ChaCha12Rng::seed_from_u64(99);
        let mut max_count = 0u64;
        for id in 0..100 {
            let a = rng.random_range(-4i64..=4);
            let b = rng.random_range(0i64..side as i64);
            let h = Line2::new(id, a, b).unwrap().as_hyperplane();
            max_count = max_count.max(t.crossing_count(&h));
        }
        let sqrt_n = (n as f64).sqrt();
        assert!(
            (max_count as f64) >= 0.5 * sqrt_n && (max_count as f64) <= 8.0 * sqrt_n,
            "max crossing {max_count} vs sqrt(n) {sqrt_n}"
        );
    }

    #[test]
    fn charged_formula_on_tiny_tree() {
        let mut ledger = CostLedger::new();
        let t = build(&pts(&[(1, 1)]), 2);
        let h = Line2::new(0, 1, 0).unwrap().as_hyperplane();
        let (r, charge) = t.emptiness_charged(&h, &mut ledger);
        assert!(r.found);
        // T = 1, hgt = 1 → charge 1.
        assert_eq!(charge, Rat::from_int(1));
    }

    #[test]
    fn charge_monotone_in_t_and_height() {
        let c = crate::qcost::Constants::default();
        let mut last = Rat::zero();
        for t in 1..50u64 {
            let v = backtracking_charge(t, 5, &c);
            assert!(v >= last);
            last = v;
        }
        let mut last = Rat::zero();
        for h in 1..50u64 {
            let v = backtracking_charge(37, h, &c);
            assert!(v >= last);
            last = v;
        }
    }
}
