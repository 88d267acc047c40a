//! Problem instances, their JSON file format, general-position
//! validation, and point-line duality.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{GeomError, Hyperplane, Line2, PointD, Rat, COEFF_BOUND};

/// The line-like family of an instance: integer lines in the plane, or
/// integer hyperplanes in d ≥ 3 dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Surfaces {
    Lines(Vec<Line2>),
    Hyperplanes(Vec<Hyperplane>),
}

impl Surfaces {
    pub fn len(&self) -> usize {
        match self {
            Surfaces::Lines(v) => v.len(),
            Surfaces::Hyperplanes(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// One Hopcroft instance: a family of lines (d = 2) or hyperplanes
/// (d ≥ 3) plus a set of points, with the planted incidences recorded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub d: usize,
    pub seed: u64,
    pub surfaces: Surfaces,
    pub points: Vec<PointD>,
    /// `(line id, point id)` pairs guaranteed incident by the generator.
    pub planted: Vec<(u32, u32)>,
}

impl Instance {
    pub fn new(
        d: usize,
        seed: u64,
        surfaces: Surfaces,
        points: Vec<PointD>,
        planted: Vec<(u32, u32)>,
    ) -> Result<Self, GeomError> {
        if d < 2 {
            return Err(GeomError::DimensionTooSmall(d));
        }
        match (&surfaces, d) {
            (Surfaces::Lines(lines), 2) => {
                let mut slopes = HashSet::new();
                for (i, l) in lines.iter().enumerate() {
                    if l.id as usize != i {
                        return Err(GeomError::BadInstanceJson(format!(
                            "line id {} at index {}",
                            l.id, i
                        )));
                    }
                    if !slopes.insert(l.a) {
                        return Err(GeomError::DuplicateSlope(l.a));
                    }
                }
            }
            (Surfaces::Hyperplanes(hs), d) if d >= 3 => {
                for (i, h) in hs.iter().enumerate() {
                    if h.id as usize != i {
                        return Err(GeomError::BadInstanceJson(format!(
                            "hyperplane id {} at index {}",
                            h.id, i
                        )));
                    }
                    if h.dim() != d {
                        return Err(GeomError::DimensionMismatch {
                            expected: d,
                            got: h.dim(),
                        });
                    }
                }
            }
            _ => {
                return Err(GeomError::BadInstanceJson(format!(
                    "dimension {} does not match surface kind",
                    d
                )))
            }
        }
        for p in &points {
            if p.dim() != d {
                return Err(GeomError::DimensionMismatch {
                    expected: d,
                    got: p.dim(),
                });
            }
        }
        for &(li, pi) in &planted {
            if li as usize >= surfaces.len() || pi as usize >= points.len() {
                return Err(GeomError::BadInstanceJson(format!(
                    "planted pair ({li},{pi}) out of range"
                )));
            }
        }
        Ok(Instance {
            d,
            seed,
            surfaces,
            points,
            planted,
        })
    }

    pub fn n_lines(&self) -> usize {
        self.surfaces.len()
    }

    pub fn m_points(&self) -> usize {
        self.points.len()
    }

    pub fn lines(&self) -> &[Line2] {
        match &self.surfaces {
            Surfaces::Lines(v) => v,
            Surfaces::Hyperplanes(_) => panic!("instance is not planar"),
        }
    }

    /// Every surface as a hyperplane, lifting lines when d = 2.
    pub fn hyperplanes(&self) -> Vec<Hyperplane> {
        match &self.surfaces {
            Surfaces::Lines(v) => v.iter().map(Line2::as_hyperplane).collect(),
            Surfaces::Hyperplanes(v) => v.clone(),
        }
    }

    pub fn surface_contains(&self, line_id: u32, p: &PointD) -> bool {
        match &self.surfaces {
            Surfaces::Lines(v) => v[line_id as usize].contains(p),
            Surfaces::Hyperplanes(v) => v[line_id as usize].contains(p),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&InstanceJson::from(self)).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, GeomError> {
        let dto: InstanceJson =
            serde_json::from_str(text).map_err(|e| GeomError::BadInstanceJson(e.to_string()))?;
        dto.try_into()
    }
}

/// File format: integers and rational components as decimal strings so
/// arbitrary-precision coordinates survive the round trip.
#[derive(Serialize, Deserialize)]
struct InstanceJson {
    d: usize,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    lines: Option<Vec<[String; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hyperplanes: Option<Vec<(Vec<String>, String)>>,
    points: Vec<Vec<[String; 2]>>,
    planted: Vec<[u32; 2]>,
}

impl From<&Instance> for InstanceJson {
    fn from(inst: &Instance) -> Self {
        let (lines, hyperplanes) = match &inst.surfaces {
            Surfaces::Lines(v) => (
                Some(v.iter().map(|l| [l.a.to_string(), l.b.to_string()]).collect()),
                None,
            ),
            Surfaces::Hyperplanes(v) => (
                None,
                Some(
                    v.iter()
                        .map(|h| {
                            (
                                h.coeffs.iter().map(i64::to_string).collect(),
                                h.offset.to_string(),
                            )
                        })
                        .collect(),
                ),
            ),
        };
        InstanceJson {
            d: inst.d,
            seed: inst.seed,
            lines,
            hyperplanes,
            points: inst
                .points
                .iter()
                .map(|p| {
                    p.coords()
                        .map(|c| [c.numer_string(), c.denom_string()])
                        .collect()
                })
                .collect(),
            planted: inst.planted.iter().map(|&(l, p)| [l, p]).collect(),
        }
    }
}

impl TryFrom<InstanceJson> for Instance {
    type Error = GeomError;

    fn try_from(dto: InstanceJson) -> Result<Self, GeomError> {
        let parse_i64 = |s: &String| -> Result<i64, GeomError> {
            s.parse::<i64>().map_err(|_| GeomError::BadNumber(s.clone()))
        };
        let surfaces = match (dto.lines, dto.hyperplanes) {
            (Some(lines), None) => Surfaces::Lines(
                lines
                    .iter()
                    .enumerate()
                    .map(|(i, [a, b])| Line2::new(i as u32, parse_i64(a)?, parse_i64(b)?))
                    .collect::<Result<_, _>>()?,
            ),
            (None, Some(hs)) => Surfaces::Hyperplanes(
                hs.iter()
                    .enumerate()
                    .map(|(i, (coeffs, offset))| {
                        Hyperplane::new(
                            i as u32,
                            coeffs.iter().map(parse_i64).collect::<Result<_, _>>()?,
                            parse_i64(offset)?,
                        )
                    })
                    .collect::<Result<_, _>>()?,
            ),
            _ => {
                return Err(GeomError::BadInstanceJson(
                    "exactly one of lines/hyperplanes required".into(),
                ))
            }
        };
        let points = dto
            .points
            .iter()
            .map(|coords| {
                Ok(PointD::new(
                    coords
                        .iter()
                        .map(|[n, d]| Rat::parse_pair(n, d))
                        .collect::<Result<_, _>>()?,
                ))
            })
            .collect::<Result<Vec<_>, GeomError>>()?;
        Instance::new(
            dto.d,
            dto.seed,
            surfaces,
            points,
            dto.planted.iter().map(|&[l, p]| (l, p)).collect(),
        )
    }
}

/// A single general-position violation. Violations are data, not errors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateSlope { lines: (u32, u32), slope: i64 },
    TripleConcurrence { lines: (u32, u32, u32), at: PointD },
    CollinearPoints { points: (u32, u32, u32) },
    PointOnVertex { point: u32, lines: (u32, u32) },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateSlope { lines, slope } => {
                write!(f, "lines {} and {} share slope {}", lines.0, lines.1, slope)
            }
            Violation::TripleConcurrence { lines, at } => write!(
                f,
                "lines {}, {}, {} concur at ({}, {})",
                lines.0,
                lines.1,
                lines.2,
                at.x(),
                at.y()
            ),
            Violation::CollinearPoints { points } => {
                write!(f, "points {}, {}, {} are collinear", points.0, points.1, points.2)
            }
            Violation::PointOnVertex { point, lines } => write!(
                f,
                "point {} coincides with the vertex of lines {} and {}",
                point, lines.0, lines.1
            ),
        }
    }
}

/// Report every general-position violation in a planar instance:
/// duplicate slopes, triple line concurrences, collinear point triples,
/// and points sitting on arrangement vertices. Empty report = valid.
///
/// d ≥ 3 instances only get the point-side checks that make sense there.
pub fn validate_general_position(inst: &Instance) -> Vec<Violation> {
    let mut report = Vec::new();

    if let Surfaces::Lines(lines) = &inst.surfaces {
        let mut by_slope: HashMap<i64, u32> = HashMap::new();
        for l in lines {
            if let Some(&other) = by_slope.get(&l.a) {
                report.push(Violation::DuplicateSlope {
                    lines: (other, l.id),
                    slope: l.a,
                });
            } else {
                by_slope.insert(l.a, l.id);
            }
        }

        // Triple concurrence: exact canonical intersection coordinates,
        // grouped so each concurrence point is reported once.
        let mut seen: HashMap<(i64, i64, i64, i64), Vec<u32>> = HashMap::new();
        for i in 0..lines.len() {
            for j in (i + 1)..lines.len() {
                let (li, lj) = (&lines[i], &lines[j]);
                if li.a == lj.a {
                    continue; // already reported as duplicate slope
                }
                let ids = seen.entry(vertex_key(li, lj)).or_default();
                for id in [li.id, lj.id] {
                    if !ids.contains(&id) {
                        ids.push(id);
                    }
                }
            }
        }
        let mut concurrences: Vec<Vec<u32>> =
            seen.into_values().filter(|ids| ids.len() >= 3).collect();
        concurrences.sort();
        for mut ids in concurrences {
            ids.sort_unstable();
            let at = super::line_intersection(
                &lines[ids[0] as usize],
                &lines[ids[1] as usize],
            )
            .expect("distinct slopes");
            report.push(Violation::TripleConcurrence {
                lines: (ids[0], ids[1], ids[2]),
                at,
            });
        }

        // Point on an arrangement vertex = point incident to two lines.
        for (pi, p) in inst.points.iter().enumerate() {
            let incident: Vec<u32> = lines.iter().filter(|l| l.contains(p)).map(|l| l.id).collect();
            if incident.len() >= 2 {
                report.push(Violation::PointOnVertex {
                    point: pi as u32,
                    lines: (incident[0], incident[1]),
                });
            }
        }
    }

    // Three collinear points, by hashing normalized pairwise directions
    // from each anchor (planar instances only).
    if inst.d == 2 {
        let pts = &inst.points;
        for i in 0..pts.len() {
            let mut dirs: HashMap<(String, String), u32> = HashMap::new();
            for j in (i + 1)..pts.len() {
                let dx = pts[j].x() - pts[i].x();
                let dy = pts[j].y() - pts[i].y();
                let key = normalized_direction(&dx, &dy);
                if let Some(&other) = dirs.get(&key) {
                    report.push(Violation::CollinearPoints {
                        points: (i as u32, other, j as u32),
                    });
                } else {
                    dirs.insert(key, j as u32);
                }
            }
        }
    }

    report
}

/// Canonical (xn, xd, yn, yd) of the intersection of two lines, suitable
/// as an exact hash key. Coefficients are capped at 2^20 so every product
/// fits comfortably in i64 after reduction.
fn vertex_key(li: &Line2, lj: &Line2) -> (i64, i64, i64, i64) {
    debug_assert!(li.a != lj.a);
    let (xn, xd) = reduce(lj.b - li.b, li.a - lj.a);
    // y = a·x + b = (a·xn + b·xd) / xd
    let (yn, yd) = reduce(li.a * xn + li.b * xd, xd);
    (xn, xd, yn, yd)
}

/// Reduce n/d to canonical form with positive denominator.
pub(super) fn reduce(n: i64, d: i64) -> (i64, i64) {
    debug_assert!(d != 0);
    let g = gcd_i64(n.unsigned_abs(), d.unsigned_abs()) as i64;
    let (mut n, mut d) = (n / g, d / g);
    if d < 0 {
        n = -n;
        d = -d;
    }
    (n, d)
}

pub(super) fn gcd_i64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

/// Sign-normalized direction (dx, dy) as exact strings; antiparallel
/// directions collapse to one key so collinearity on either side of the
/// anchor is caught.
fn normalized_direction(dx: &Rat, dy: &Rat) -> (String, String) {
    let zero = Rat::zero();
    let flip = dx < &zero || (dx == &zero && dy < &zero);
    let (dx, dy) = if flip {
        (-(dx.clone()), -(dy.clone()))
    } else {
        (dx.clone(), dy.clone())
    };
    if dx.is_zero() {
        return ("0".into(), "1".into());
    }
    let slope = dy / dx;
    ("1".into(), slope.to_string())
}

/// Planar point-line duality: point `(p, q) ↦ y = p·x − q`, line
/// `y = a·x + b ↦ (a, −b)`. Incident pairs are preserved as a bijection
/// (`q = a·p + b ⇔ −b = p·a − q`), and integer data stays integer.
pub fn dualize(inst: &Instance) -> Result<Instance, GeomError> {
    if inst.d != 2 {
        return Err(GeomError::DualDimension);
    }
    let lines = inst.lines();

    let mut seen_x: HashMap<(i64, i64), usize> = HashMap::new();
    let mut dual_lines = Vec::with_capacity(inst.points.len());
    for (pi, p) in inst.points.iter().enumerate() {
        let (pn, pd) = p
            .x()
            .as_i64_pair()
            .ok_or_else(|| GeomError::DualOutOfRange(p.x().to_string()))?;
        if let Some(_prev) = seen_x.insert((pn, pd), pi) {
            return Err(GeomError::DualDegenerate(p.x().to_string()));
        }
        if pd != 1 || pn.abs() > COEFF_BOUND {
            return Err(GeomError::DualOutOfRange(p.x().to_string()));
        }
        let (qn, qd) = p
            .y()
            .as_i64_pair()
            .ok_or_else(|| GeomError::DualOutOfRange(p.y().to_string()))?;
        if qd != 1 || qn.abs() > COEFF_BOUND {
            return Err(GeomError::DualOutOfRange(p.y().to_string()));
        }
        dual_lines.push(Line2::new(pi as u32, pn, -qn)?);
    }

    let dual_points: Vec<PointD> = lines
        .iter()
        .map(|l| PointD::from_ints(&[l.a, -l.b]))
        .collect();

    let mut planted: Vec<(u32, u32)> = inst.planted.iter().map(|&(li, pi)| (pi, li)).collect();
    planted.sort_unstable();

    Instance::new(
        2,
        inst.seed,
        Surfaces::Lines(dual_lines),
        dual_points,
        planted,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::line_intersection;

    fn l3_lines() -> Vec<Line2> {
        vec![
            Line2::new(0, 1, 0).unwrap(),  // y = x
            Line2::new(1, -1, 2).unwrap(), // y = −x + 2
            Line2::new(2, 0, 3).unwrap(),  // y = 3
        ]
    }

    fn inst(lines: Vec<Line2>, points: Vec<PointD>) -> Instance {
        Instance::new(2, 0, Surfaces::Lines(lines), points, vec![]).unwrap()
    }

    #[test]
    fn duplicate_slopes_rejected_at_construction() {
        // {y=x, y=x+1}: the report is unreachable, construction fails.
        let lines = vec![Line2::new(0, 1, 0).unwrap(), Line2::new(1, 1, 1).unwrap()];
        assert_eq!(
            Instance::new(2, 0, Surfaces::Lines(lines), vec![], vec![]),
            Err(GeomError::DuplicateSlope(1))
        );
    }

    #[test]
    fn l3_with_generic_points_is_valid() {
        let i = inst(
            l3_lines(),
            vec![PointD::from_ints(&[0, 3]), PointD::from_ints(&[0, 1])],
        );
        assert!(validate_general_position(&i).is_empty());
    }

    #[test]
    fn concurrent_triple_reported() {
        // {y=0, y=x, y=−x} all pass through the origin.
        let lines = vec![
            Line2::new(0, 0, 0).unwrap(),
            Line2::new(1, 1, 0).unwrap(),
            Line2::new(2, -1, 0).unwrap(),
        ];
        let report = validate_general_position(&inst(lines, vec![]));
        assert_eq!(report.len(), 1);
        match &report[0] {
            Violation::TripleConcurrence { lines, at } => {
                assert_eq!(*lines, (0, 1, 2));
                assert_eq!(at, &PointD::from_ints(&[0, 0]));
            }
            v => panic!("unexpected violation {v}"),
        }
    }

    #[test]
    fn collinear_points_reported() {
        let i = inst(
            vec![],
            vec![
                PointD::from_ints(&[0, 5]),
                PointD::from_ints(&[1, 6]),
                PointD::from_ints(&[3, 8]),
            ],
        );
        let report = validate_general_position(&i);
        assert_eq!(
            report,
            vec![Violation::CollinearPoints { points: (0, 1, 2) }]
        );
    }

    #[test]
    fn point_on_vertex_reported() {
        let lines = l3_lines();
        let v = line_intersection(&lines[0], &lines[1]).unwrap(); // (1,1)
        let report = validate_general_position(&inst(lines, vec![v]));
        assert!(report
            .iter()
            .any(|viol| matches!(viol, Violation::PointOnVertex { point: 0, .. })));
    }

    #[test]
    fn dual_example() {
        // line (a=0,b=3) incident with point (0,3): dual point (0,−3) lies
        // on dual line y = 0·x − 3.
        let i = Instance::new(
            2,
            0,
            Surfaces::Lines(vec![Line2::new(0, 0, 3).unwrap()]),
            vec![PointD::from_ints(&[0, 3])],
            vec![(0, 0)],
        )
        .unwrap();
        let dual = dualize(&i).unwrap();
        assert_eq!(dual.lines()[0], Line2::new(0, 0, -3).unwrap());
        assert_eq!(dual.points[0], PointD::from_ints(&[0, -3]));
        assert!(dual.lines()[0].contains(&dual.points[0]));
    }

    #[test]
    fn dual_degenerate_on_shared_x() {
        let i = inst(
            vec![Line2::new(0, 1, 0).unwrap()],
            vec![PointD::from_ints(&[2, 3]), PointD::from_ints(&[2, 4])],
        );
        assert!(matches!(dualize(&i), Err(GeomError::DualDegenerate(_))));
    }

    #[test]
    fn json_round_trip() {
        let i = Instance::new(
            2,
            42,
            Surfaces::Lines(l3_lines()),
            vec![PointD::xy(Rat::new(1, 2).unwrap(), Rat::from_int(7))],
            vec![],
        )
        .unwrap();
        let text = i.to_json();
        assert!(text.contains("\"lines\""));
        let back = Instance::from_json(&text).unwrap();
        assert_eq!(i, back);
    }
}
