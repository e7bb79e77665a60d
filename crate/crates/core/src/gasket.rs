//! Six copies of the Sierpinski gasket glued at three distinguished corner
//! classes A, B, C, carrying the scale-by-2 map: corners are fixed, the three
//! edge midpoints of every copy go to A (left edge), B (bottom edge) and C
//! (right edge), and each of the three half-size sub-gaskets maps affinely
//! onto the unique copy whose corner labels match the images of its corners.
//!
//! Points live on finite-level vertex skeletons. Coordinates are barycentric
//! weights (u, v) on the (left, right) corners of a component, so level-n
//! vertices are exactly the dyadic pairs with denominator 2^n that survive
//! descent into the subdivision. The metric is the shortest-path metric on
//! the level-n skeleton with edge length 2^(-n), evaluated at the finest
//! common level of its arguments.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::One;

use crate::rational::Rational;
use crate::system::{System, SystemError};

/// The three glued corner classes.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum CornerLabel {
    A,
    B,
    C,
}

impl fmt::Display for CornerLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CornerLabel::A => write!(f, "A"),
            CornerLabel::B => write!(f, "B"),
            CornerLabel::C => write!(f, "C"),
        }
    }
}

impl CornerLabel {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "A" => Some(CornerLabel::A),
            "B" => Some(CornerLabel::B),
            "C" => Some(CornerLabel::C),
            _ => None,
        }
    }
}

/// Corner roles of a triangle: 0 = top, 1 = left, 2 = right.
pub const TOP: usize = 0;
pub const LEFT: usize = 1;
pub const RIGHT: usize = 2;

/// The three sub-gaskets of a component, named by the corner they keep.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum SubCell {
    Top,
    Left,
    Right,
}

impl SubCell {
    pub const ALL: [SubCell; 3] = [SubCell::Top, SubCell::Left, SubCell::Right];

    fn index(self) -> usize {
        match self {
            SubCell::Top => TOP,
            SubCell::Left => LEFT,
            SubCell::Right => RIGHT,
        }
    }
}

impl fmt::Display for SubCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubCell::Top => write!(f, "top"),
            SubCell::Left => write!(f, "left"),
            SubCell::Right => write!(f, "right"),
        }
    }
}

/// Where one sub-gasket is sent: the target component and the role
/// correspondence (`corr[local role] = target role`).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SubTarget {
    pub component: u8,
    pub corr: [usize; 3],
}

/// Corner labels of the six components plus the 18 sub-gasket targets.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GasketLabelTable {
    corners: [[CornerLabel; 3]; 6],
    targets: [[SubTarget; 3]; 6],
}

/// Labels a midpoint must be sent to: left-edge midpoint to A, bottom to B,
/// right to C.
fn midpoint_image(local_pair: (usize, usize)) -> CornerLabel {
    match local_pair {
        (TOP, LEFT) => CornerLabel::A,
        (LEFT, RIGHT) => CornerLabel::B,
        (TOP, RIGHT) => CornerLabel::C,
        _ => unreachable!(),
    }
}

/// The corner roles of sub-cell `s`, expressed as corners/midpoints of the
/// parent: each entry is either a parent corner role or a midpoint pair.
fn sub_corner_sources(s: SubCell) -> [SubCornerSource; 3] {
    use SubCornerSource::*;
    match s {
        SubCell::Top => [Corner(TOP), Midpoint(TOP, LEFT), Midpoint(TOP, RIGHT)],
        SubCell::Left => [Midpoint(TOP, LEFT), Corner(LEFT), Midpoint(LEFT, RIGHT)],
        SubCell::Right => [Midpoint(TOP, RIGHT), Midpoint(LEFT, RIGHT), Corner(RIGHT)],
    }
}

#[derive(Clone, Copy)]
enum SubCornerSource {
    Corner(usize),
    Midpoint(usize, usize),
}

impl GasketLabelTable {
    /// Build a table from corner labels, deriving each sub-gasket target as
    /// the unique component whose corner labels equal the required images
    /// role by role (identity correspondence).
    pub fn from_corners(corners: [[CornerLabel; 3]; 6]) -> Result<Self, SystemError> {
        let mut targets = [[SubTarget { component: 0, corr: [TOP, LEFT, RIGHT] }; 3]; 6];
        for comp in 0..6 {
            for s in SubCell::ALL {
                let required = Self::required_images(&corners, comp, s);
                let matches: Vec<u8> = (0..6)
                    .filter(|&j| corners[j] == required)
                    .map(|j| j as u8 + 1)
                    .collect();
                match matches.as_slice() {
                    [j] => {
                        targets[comp][s.index()] =
                            SubTarget { component: *j, corr: [TOP, LEFT, RIGHT] }
                    }
                    [] => {
                        return Err(SystemError::InvalidConfig(format!(
                            "no component has corner labels {required:?} needed by \
                             component {} sub {s}",
                            comp + 1
                        )))
                    }
                    many => {
                        return Err(SystemError::InvalidConfig(format!(
                            "ambiguous target for component {} sub {s}: components {many:?} \
                             all carry labels {required:?}",
                            comp + 1
                        )))
                    }
                }
            }
        }
        let table = GasketLabelTable { corners, targets };
        table.validate()?;
        Ok(table)
    }

    pub fn with_targets(
        corners: [[CornerLabel; 3]; 6],
        targets: [[SubTarget; 3]; 6],
    ) -> Result<Self, SystemError> {
        let table = GasketLabelTable { corners, targets };
        table.validate()?;
        Ok(table)
    }

    fn required_images(
        corners: &[[CornerLabel; 3]; 6],
        comp: usize,
        s: SubCell,
    ) -> [CornerLabel; 3] {
        let mut out = [CornerLabel::A; 3];
        for (role, src) in sub_corner_sources(s).iter().enumerate() {
            out[role] = match *src {
                SubCornerSource::Corner(p) => corners[comp][p],
                SubCornerSource::Midpoint(a, b) => midpoint_image((a, b)),
            };
        }
        out
    }

    /// Well-definedness at every glued vertex: correspondences are
    /// permutations, each sub-corner lands on the corner label the midpoint
    /// rule and corner-fixing demand, and every component is hit.
    pub fn validate(&self) -> Result<(), SystemError> {
        let mut hit = [false; 6];
        for comp in 0..6 {
            for s in SubCell::ALL {
                let SubTarget { component, corr } = self.targets[comp][s.index()];
                if !(1..=6).contains(&component) {
                    return Err(SystemError::InvalidConfig(format!(
                        "component {} sub {s} targets invalid component {component}",
                        comp + 1
                    )));
                }
                let mut seen = [false; 3];
                for &c in &corr {
                    if c > 2 || seen[c] {
                        return Err(SystemError::InvalidConfig(format!(
                            "component {} sub {s}: correspondence {corr:?} is not a permutation",
                            comp + 1
                        )));
                    }
                    seen[c] = true;
                }
                hit[component as usize - 1] = true;
                let required = Self::required_images(&self.corners, comp, s);
                for role in 0..3 {
                    let got = self.corners[component as usize - 1][corr[role]];
                    if got != required[role] {
                        return Err(SystemError::InvalidConfig(format!(
                            "map ill-defined: component {} sub {s} corner role {role} must land \
                             on {}, but target component {component} corner {} is {got}",
                            comp + 1,
                            required[role],
                            corr[role],
                        )));
                    }
                }
            }
        }
        if let Some(miss) = hit.iter().position(|&b| !b) {
            return Err(SystemError::InvalidConfig(format!(
                "map not surjective: component {} is never a sub-gasket target",
                miss + 1
            )));
        }
        Ok(())
    }

    pub fn corner_labels(&self, component: u8) -> [CornerLabel; 3] {
        self.corners[component as usize - 1]
    }

    pub fn target(&self, component: u8, s: SubCell) -> SubTarget {
        self.targets[component as usize - 1][s.index()]
    }

    /// Occurrences of a label: (component, corner role) pairs.
    pub fn occurrences(&self, label: CornerLabel) -> Vec<(u8, usize)> {
        let mut out = Vec::new();
        for comp in 0..6 {
            for role in 0..3 {
                if self.corners[comp][role] == label {
                    out.push((comp as u8 + 1, role));
                }
            }
        }
        out
    }
}

impl Default for GasketLabelTable {
    /// The shipped table. Corner labels (top, left, right) per component:
    /// Y1 (A,A,B), Y2 (A,A,C), Y3 (A,B,B), Y4 (C,B,B), Y5 (C,A,C),
    /// Y6 (C,B,C); each label occurs exactly six times and the derived
    /// targets send the three sub-gaskets of Y1 onto Y2, Y1, Y4.
    fn default() -> Self {
        use CornerLabel::{A, B, C};
        GasketLabelTable::from_corners([
            [A, A, B],
            [A, A, C],
            [A, B, B],
            [C, B, B],
            [C, A, C],
            [C, B, C],
        ])
        .expect("shipped table is consistent")
    }
}

/// A vertex of some finite-level subdivision, in canonical form: the three
/// glued corner classes are single points, every other vertex belongs to one
/// component and is named by its barycentric weights on that component's
/// (left, right) corners.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum GasketPoint {
    Corner(CornerLabel),
    Inner { component: u8, u: Rational, v: Rational },
}

impl GasketPoint {
    /// Canonicalize raw (component, coords).
    fn from_coords(table: &GasketLabelTable, component: u8, u: Rational, v: Rational) -> Self {
        let zero = Rational::zero();
        let one = Rational::one();
        let labels = table.corner_labels(component);
        if u == zero && v == zero {
            GasketPoint::Corner(labels[TOP])
        } else if u == one && v == zero {
            GasketPoint::Corner(labels[LEFT])
        } else if u == zero && v == one {
            GasketPoint::Corner(labels[RIGHT])
        } else {
            GasketPoint::Inner { component, u, v }
        }
    }

    /// The vertex reached by descending `address` from the full triangle of
    /// `component` and taking the corner with the given role.
    pub fn from_address(
        table: &GasketLabelTable,
        component: u8,
        address: &[SubCell],
        corner_role: usize,
    ) -> Result<Self, SystemError> {
        if !(1..=6).contains(&component) {
            return Err(SystemError::InvalidConfig(format!("component {component} out of range")));
        }
        if corner_role > 2 {
            return Err(SystemError::InvalidConfig(format!("corner role {corner_role} out of range")));
        }
        let mut frame = Frame::unit();
        for &s in address {
            frame = frame.descend(s);
        }
        let (u, v) = frame.corner(corner_role);
        Ok(GasketPoint::from_coords(table, component, u, v))
    }

    /// Subdivision level at which this point first appears as a vertex.
    pub fn level(&self) -> u32 {
        match self {
            GasketPoint::Corner(_) => 0,
            GasketPoint::Inner { u, v, .. } => dyadic_level(u).max(dyadic_level(v)),
        }
    }
}

/// True when x lies in [0,1] with a power-of-two denominator.
fn is_dyadic(x: &Rational) -> bool {
    if x.is_negative() || x > &Rational::one() {
        return false;
    }
    let d = x.denom();
    *d == (BigInt::one() << (d.bits() - 1) as usize)
}

fn dyadic_level(x: &Rational) -> u32 {
    debug_assert!(is_dyadic(x), "non-dyadic coordinate {x}");
    (x.denom().bits() - 1) as u32
}

impl fmt::Display for GasketPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GasketPoint::Corner(l) => write!(f, "{l}"),
            GasketPoint::Inner { component, u, v } => write!(f, "{component}:{u},{v}"),
        }
    }
}

impl Ord for GasketPoint {
    /// Corners A < B < C first, then by component and coordinates.
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (GasketPoint::Corner(a), GasketPoint::Corner(b)) => a.cmp(b),
            (GasketPoint::Corner(_), GasketPoint::Inner { .. }) => Ordering::Less,
            (GasketPoint::Inner { .. }, GasketPoint::Corner(_)) => Ordering::Greater,
            (
                GasketPoint::Inner { component: c1, u: u1, v: v1 },
                GasketPoint::Inner { component: c2, u: u2, v: v2 },
            ) => (c1, u1, v1).cmp(&(c2, u2, v2)),
        }
    }
}

impl PartialOrd for GasketPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// An affine triangle frame given by the coordinates of its (top, left,
/// right) corners.
#[derive(Clone)]
struct Frame {
    corners: [(Rational, Rational); 3],
}

impl Frame {
    fn unit() -> Self {
        Frame {
            corners: [
                (Rational::zero(), Rational::zero()),
                (Rational::one(), Rational::zero()),
                (Rational::zero(), Rational::one()),
            ],
        }
    }

    fn corner(&self, role: usize) -> (Rational, Rational) {
        self.corners[role].clone()
    }

    fn mid(&self, a: usize, b: usize) -> (Rational, Rational) {
        (
            (&self.corners[a].0 + &self.corners[b].0).half(),
            (&self.corners[a].1 + &self.corners[b].1).half(),
        )
    }

    fn descend(&self, s: SubCell) -> Frame {
        let c = match s {
            SubCell::Top => [self.corner(TOP), self.mid(TOP, LEFT), self.mid(TOP, RIGHT)],
            SubCell::Left => [self.mid(TOP, LEFT), self.corner(LEFT), self.mid(LEFT, RIGHT)],
            SubCell::Right => [self.mid(TOP, RIGHT), self.mid(LEFT, RIGHT), self.corner(RIGHT)],
        };
        Frame { corners: c }
    }
}

/// Which sub-cell contains (u, v), with ties resolved top < left < right.
/// Returns the local coordinates inside the sub-cell.
fn locate(u: &Rational, v: &Rational) -> Option<(SubCell, Rational, Rational)> {
    let half = Rational::new(1, 2);
    let two = Rational::integer(2);
    if u + v <= half {
        Some((SubCell::Top, &two * u, &two * v))
    } else if u >= &half {
        Some((SubCell::Left, &two * u - &Rational::one(), &two * v))
    } else if v >= &half {
        Some((SubCell::Right, &two * u, &two * v - &Rational::one()))
    } else {
        None // the removed middle triangle
    }
}

/// Shortest-path tables for one subdivision level, built once and queried
/// read-only afterwards.
struct LevelGraph {
    edge_length: Rational,
    index: HashMap<GasketPoint, u32>,
    adjacency: Vec<Vec<u32>>,
    corner_ids: Vec<u32>,
    rows: Mutex<HashMap<u32, Arc<Vec<u32>>>>,
}

impl LevelGraph {
    fn build(table: &GasketLabelTable, level: u32) -> Self {
        let mut index: HashMap<GasketPoint, u32> = HashMap::new();
        let mut adjacency: Vec<Vec<u32>> = Vec::new();
        let mut node = |p: GasketPoint, adjacency: &mut Vec<Vec<u32>>| -> u32 {
            if let Some(&i) = index.get(&p) {
                return i;
            }
            let i = adjacency.len() as u32;
            index.insert(p, i);
            adjacency.push(Vec::new());
            i
        };
        for component in 1..=6u8 {
            let mut frames = vec![Frame::unit()];
            for _ in 0..level {
                let mut next = Vec::with_capacity(frames.len() * 3);
                for f in &frames {
                    for s in SubCell::ALL {
                        next.push(f.descend(s));
                    }
                }
                frames = next;
            }
            for f in &frames {
                let ids: Vec<u32> = (0..3)
                    .map(|role| {
                        let (u, v) = f.corner(role);
                        node(GasketPoint::from_coords(table, component, u, v), &mut adjacency)
                    })
                    .collect();
                for (a, b) in [(0, 1), (0, 2), (1, 2)] {
                    if ids[a] != ids[b] {
                        adjacency[ids[a] as usize].push(ids[b]);
                        adjacency[ids[b] as usize].push(ids[a]);
                    }
                }
            }
        }
        for row in &mut adjacency {
            row.sort_unstable();
            row.dedup();
        }
        let corner_ids = index
            .iter()
            .filter_map(|(p, &i)| matches!(p, GasketPoint::Corner(_)).then_some(i))
            .collect();
        LevelGraph {
            edge_length: Rational::two_pow_neg(level),
            index,
            adjacency,
            corner_ids,
            rows: Mutex::new(HashMap::new()),
        }
    }

    fn hops_row(&self, src: u32) -> Arc<Vec<u32>> {
        if let Some(row) = self.rows.lock().unwrap().get(&src) {
            return row.clone();
        }
        let n = self.adjacency.len();
        let mut dist = vec![u32::MAX; n];
        let mut queue = std::collections::VecDeque::new();
        dist[src as usize] = 0;
        queue.push_back(src);
        while let Some(x) = queue.pop_front() {
            for &y in &self.adjacency[x as usize] {
                if dist[y as usize] == u32::MAX {
                    dist[y as usize] = dist[x as usize] + 1;
                    queue.push_back(y);
                }
            }
        }
        let row = Arc::new(dist);
        // keep full rows only where they stay cheap: small skeleta, or the
        // three corner sources that deep corner-anchored threads hit again
        // and again
        if n <= 60_000 || self.corner_ids.contains(&src) {
            self.rows.lock().unwrap().insert(src, row.clone());
        }
        row
    }

    fn distance(&self, x: &GasketPoint, y: &GasketPoint) -> Rational {
        let ix = *self.index.get(x).unwrap_or_else(|| panic!("{x} is not a vertex at this level"));
        let iy = *self.index.get(y).unwrap_or_else(|| panic!("{y} is not a vertex at this level"));
        let hops = self.hops_row(ix)[iy as usize];
        assert!(hops != u32::MAX, "skeleton is connected");
        Rational::integer(hops as i64) * self.edge_length.clone()
    }

    fn vertices(&self) -> Vec<GasketPoint> {
        let mut v: Vec<GasketPoint> = self.index.keys().cloned().collect();
        v.sort();
        v
    }
}

/// The glued six-component gasket system at a configured maximum level.
pub struct Gasket {
    table: GasketLabelTable,
    max_level: u32,
    graphs: Mutex<HashMap<u32, Arc<LevelGraph>>>,
}

impl Gasket {
    pub fn new(table: GasketLabelTable, max_level: u32) -> Result<Self, SystemError> {
        if max_level == 0 {
            return Err(SystemError::InvalidConfig("gasket level must be >= 1".into()));
        }
        table.validate()?;
        Ok(Gasket { table, max_level, graphs: Mutex::new(HashMap::new()) })
    }

    pub fn with_default_table(max_level: u32) -> Self {
        Gasket::new(GasketLabelTable::default(), max_level).expect("default table is valid")
    }

    pub fn table(&self) -> &GasketLabelTable {
        &self.table
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    fn graph(&self, level: u32) -> Arc<LevelGraph> {
        assert!(
            level <= self.max_level,
            "level {level} exceeds the configured maximum {}",
            self.max_level
        );
        let mut graphs = self.graphs.lock().unwrap();
        graphs
            .entry(level)
            .or_insert_with(|| Arc::new(LevelGraph::build(&self.table, level)))
            .clone()
    }

    /// All vertices of the level-n skeleton.
    pub fn vertices(&self, level: u32) -> Vec<GasketPoint> {
        self.graph(level).vertices()
    }

    /// The shortest-path distance evaluated on a specific (finer) skeleton
    /// level; used by refinement-stability checks.
    pub fn distance_at_level(&self, x: &GasketPoint, y: &GasketPoint, level: u32) -> Rational {
        assert!(level >= x.level().max(y.level()).max(1));
        if x == y {
            return Rational::zero();
        }
        self.graph(level).distance(x, y)
    }

    pub fn level_for_resolution(resolution: &Rational) -> u32 {
        let mut l = 0u32;
        while Rational::two_pow_neg(l) > *resolution {
            l += 1;
            assert!(l <= 32, "resolution too fine");
        }
        l.max(1)
    }

    /// A pair of distinct points with the same image, witnessing that g is
    /// not locally injective near edge midpoints: the same target vertex
    /// pulled back through two different components' sub-gaskets.
    pub fn non_injectivity_witness(&self) -> (GasketPoint, GasketPoint) {
        let y = GasketPoint::from_address(&self.table, 1, &[SubCell::Left], TOP)
            .expect("valid address");
        let pre = self.preimages(&y).expect("gasket preimages are enumerable");
        assert!(pre.len() >= 2, "interior vertices have at least two preimages");
        (pre[0].clone(), pre[1].clone())
    }
}

impl System for Gasket {
    type Point = GasketPoint;

    fn name(&self) -> &str {
        "gasket"
    }

    fn metric(&self, x: &GasketPoint, y: &GasketPoint) -> Rational {
        if x == y {
            return Rational::zero();
        }
        let level = x.level().max(y.level()).max(1);
        self.graph(level).distance(x, y)
    }

    fn apply(&self, x: &GasketPoint) -> GasketPoint {
        match x {
            GasketPoint::Corner(l) => GasketPoint::Corner(*l),
            GasketPoint::Inner { component, u, v } => {
                let (sub, lu, lv) = locate(u, v)
                    .unwrap_or_else(|| panic!("{x} lies in the removed middle triangle"));
                let SubTarget { component: j, corr } = self.table.target(*component, sub);
                // local weights (top, left, right) land on target roles corr
                let mut w = [Rational::zero(), Rational::zero(), Rational::zero()];
                let wt = Rational::one() - &lu - &lv;
                w[corr[TOP]] = wt;
                w[corr[LEFT]] = lu;
                w[corr[RIGHT]] = lv;
                let [_, wl, wr] = w;
                GasketPoint::from_coords(&self.table, j, wl, wr)
            }
        }
    }

    fn preimages(&self, y: &GasketPoint) -> Result<Vec<GasketPoint>, SystemError> {
        let mut out = Vec::new();
        let mut push_pullback = |comp: u8, sub: SubCell, lu: Rational, lv: Rational| {
            let (u, v) = match sub {
                SubCell::Top => (lu.half(), lv.half()),
                SubCell::Left => ((Rational::one() + lu).half(), lv.half()),
                SubCell::Right => (lu.half(), (Rational::one() + lv).half()),
            };
            out.push(GasketPoint::from_coords(&self.table, comp, u, v));
        };
        match y {
            GasketPoint::Corner(label) => {
                let occurrences = self.table.occurrences(*label);
                for comp in 1..=6u8 {
                    for sub in SubCell::ALL {
                        let SubTarget { component: j, corr } = self.table.target(comp, sub);
                        for &(oc, role) in &occurrences {
                            if oc != j {
                                continue;
                            }
                            // local role whose image is the labeled corner
                            let q = corr.iter().position(|&r| r == role).unwrap();
                            let mut w = [Rational::zero(), Rational::zero(), Rational::zero()];
                            w[q] = Rational::one();
                            let [_, lu, lv] = w;
                            push_pullback(comp, sub, lu, lv);
                        }
                    }
                }
            }
            GasketPoint::Inner { component: j, u, v } => {
                for comp in 1..=6u8 {
                    for sub in SubCell::ALL {
                        let t = self.table.target(comp, sub);
                        if t.component != *j {
                            continue;
                        }
                        let w_target = [Rational::one() - u - v, u.clone(), v.clone()];
                        let lu = w_target[t.corr[LEFT]].clone();
                        let lv = w_target[t.corr[RIGHT]].clone();
                        push_pullback(comp, sub, lu, lv);
                    }
                }
            }
        }
        debug_assert!(out.iter().all(|p| &self.apply(p) == y));
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Upper bound: the skeleton diameter is exactly 2 at every level >= 3
    /// (attained between opposite edge midpoints of Y1 and Y6), and any point
    /// is within 2^(-n) of a level-n vertex.
    fn diameter(&self) -> Rational {
        Rational::new(9, 4)
    }

    fn net(&self, resolution: &Rational) -> Vec<GasketPoint> {
        self.vertices(Self::level_for_resolution(resolution))
    }

    fn modulus(&self, k: u32, delta_out: &Rational) -> Rational {
        // every skeleton edge maps to an edge one level up: 2-Lipschitz
        delta_out * &Rational::two_pow_neg(k)
    }

    fn parse_point(&self, s: &str) -> Result<GasketPoint, SystemError> {
        let s = s.trim();
        let bad = |reason: String| SystemError::InvalidPoint {
            system: "gasket".into(),
            input: s.to_string(),
            reason,
        };
        if let Some(label) = CornerLabel::parse(s) {
            return Ok(GasketPoint::Corner(label));
        }
        let (comp, coords) = s
            .split_once(':')
            .ok_or_else(|| bad("expected A|B|C or component:u,v".into()))?;
        let component: u8 = comp.trim().parse().map_err(|_| bad("bad component".into()))?;
        if !(1..=6).contains(&component) {
            return Err(bad("component must be 1..6".into()));
        }
        let (u, v) = coords.split_once(',').ok_or_else(|| bad("expected u,v".into()))?;
        let u: Rational = u.parse().map_err(|_| bad("bad u coordinate".into()))?;
        let v: Rational = v.parse().map_err(|_| bad("bad v coordinate".into()))?;
        // must be a genuine vertex: dyadic and surviving descent
        if !is_dyadic(&u) || !is_dyadic(&v) {
            return Err(bad("coordinates must be dyadic".into()));
        }
        let level = dyadic_level(&u).max(dyadic_level(&v));
        if level > self.max_level {
            return Err(bad(format!("level {level} exceeds configured maximum {}", self.max_level)));
        }
        let (mut cu, mut cv) = (u.clone(), v.clone());
        for _ in 0..level {
            match locate(&cu, &cv) {
                Some((_, nu, nv)) => {
                    cu = nu;
                    cv = nv;
                }
                None => return Err(bad("point lies in a removed middle triangle".into())),
            }
        }
        Ok(GasketPoint::from_coords(&self.table, component, u, v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{iterate, preimages_k};

    fn sys() -> Gasket {
        Gasket::with_default_table(7)
    }

    fn addr(g: &Gasket, comp: u8, address: &[SubCell], role: usize) -> GasketPoint {
        GasketPoint::from_address(g.table(), comp, address, role).unwrap()
    }

    #[test]
    fn default_table_matches_worked_image() {
        let t = GasketLabelTable::default();
        // the three sub-gaskets of Y1 map onto Y2 (top), Y1 (left), Y4 (right)
        assert_eq!(t.target(1, SubCell::Top).component, 2);
        assert_eq!(t.target(1, SubCell::Left).component, 1);
        assert_eq!(t.target(1, SubCell::Right).component, 4);
        // every label occurs exactly six times
        for l in [CornerLabel::A, CornerLabel::B, CornerLabel::C] {
            assert_eq!(t.occurrences(l).len(), 6);
        }
    }

    #[test]
    fn inconsistent_tables_are_rejected() {
        use CornerLabel::{A, B, C};
        // swap one corner of Y1 so the required images no longer exist
        let r = GasketLabelTable::from_corners([
            [B, A, B],
            [A, A, C],
            [A, B, B],
            [C, B, B],
            [C, A, C],
            [C, B, C],
        ]);
        assert!(r.is_err());
        // explicit targets with a broken correspondence
        let good = GasketLabelTable::default();
        let mut targets = good.targets;
        targets[0][0].corr = [TOP, TOP, RIGHT];
        assert!(GasketLabelTable::with_targets(good.corners, targets).is_err());
    }

    #[test]
    fn corners_are_fixed_and_midpoints_follow_the_rule() {
        let g = sys();
        for l in [CornerLabel::A, CornerLabel::B, CornerLabel::C] {
            assert_eq!(g.apply(&GasketPoint::Corner(l)), GasketPoint::Corner(l));
        }
        for comp in 1..=6u8 {
            let leftmid = addr(&g, comp, &[SubCell::Top], LEFT);
            assert_eq!(g.apply(&leftmid), GasketPoint::Corner(CornerLabel::A));
            let bottommid = addr(&g, comp, &[SubCell::Left], RIGHT);
            assert_eq!(g.apply(&bottommid), GasketPoint::Corner(CornerLabel::B));
            let rightmid = addr(&g, comp, &[SubCell::Top], RIGHT);
            assert_eq!(g.apply(&rightmid), GasketPoint::Corner(CornerLabel::C));
        }
    }

    fn all_addresses(level: u32) -> Vec<Vec<SubCell>> {
        let mut addresses: Vec<Vec<SubCell>> = vec![vec![]];
        for _ in 0..level {
            let mut next = Vec::new();
            for a in &addresses {
                for s in SubCell::ALL {
                    let mut b = a.clone();
                    b.push(s);
                    next.push(b);
                }
            }
            addresses = next;
        }
        addresses
    }

    /// Every (address, corner) names a vertex and fixes a first-level
    /// sub-gasket route; the image must not depend on the route taken.
    pub(crate) fn check_well_defined(g: &Gasket, max_level: u32) {
        for level in 1..=max_level {
            for comp in 1..=6u8 {
                for address in all_addresses(level) {
                    for role in 0..3usize {
                        let p = GasketPoint::from_address(g.table(), comp, &address, role).unwrap();
                        let mut local = Frame::unit();
                        for &step in &address[1..] {
                            local = local.descend(step);
                        }
                        let (lu, lv) = local.corner(role);
                        let SubTarget { component: j, corr } = g.table().target(comp, address[0]);
                        let mut w = [Rational::zero(), Rational::zero(), Rational::zero()];
                        w[corr[TOP]] = Rational::one() - &lu - &lv;
                        w[corr[LEFT]] = lu;
                        w[corr[RIGHT]] = lv;
                        let via_route =
                            GasketPoint::from_coords(g.table(), j, w[1].clone(), w[2].clone());
                        assert_eq!(
                            g.apply(&p),
                            via_route,
                            "image of {p} differs along route {:?} in component {comp}",
                            address
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn map_well_defined_at_identified_vertices() {
        check_well_defined(&sys(), 4);
    }

    #[test]
    fn doubling_on_the_skeleton() {
        let g = sys();
        // adjacent level-1 vertices sit at distance 1/2
        let t = addr(&g, 1, &[], TOP);
        let lm = addr(&g, 1, &[SubCell::Top], LEFT);
        assert_eq!(g.metric(&t, &lm), Rational::new(1, 2));
        // the map doubles a level-2 edge into a level-1 edge
        let p = addr(&g, 1, &[SubCell::Top, SubCell::Top], LEFT);
        let q = addr(&g, 1, &[SubCell::Top, SubCell::Top], TOP);
        let (gp, gq) = (g.apply(&p), g.apply(&q));
        assert_eq!(g.metric(&p, &q), Rational::new(1, 4));
        assert_eq!(g.metric(&gp, &gq), Rational::new(1, 2));
    }

    #[test]
    fn preimage_counts_generic_and_corner() {
        let g = sys();
        // generic interior vertex: one preimage per sub targeting its component
        let bm2 = addr(&g, 2, &[SubCell::Left], RIGHT); // bottom-mid of Y2
        assert_eq!(g.preimages(&bm2).unwrap().len(), 3);
        // corners: themselves plus one edge midpoint from each component
        for label in [CornerLabel::A, CornerLabel::B, CornerLabel::C] {
            let pre = g.preimages(&GasketPoint::Corner(label)).unwrap();
            assert_eq!(pre.len(), 7, "corner {label} preimages: {pre:?}");
            assert!(pre.contains(&GasketPoint::Corner(label)));
        }
    }

    #[test]
    fn preimages_complete_on_vertices() {
        let g = sys();
        for x in g.vertices(2) {
            for k in 1..=3u32 {
                let fwd = iterate(&g, &x, k);
                assert!(preimages_k(&g, &fwd, k).unwrap().contains(&x), "{x} k={k}");
            }
        }
    }

    #[test]
    fn metric_axioms_on_level_two_net() {
        let g = sys();
        let net = g.vertices(2);
        for x in &net {
            for y in &net {
                let d = g.metric(x, y);
                assert_eq!(d, g.metric(y, x));
                assert_eq!(d.is_zero(), x == y);
            }
        }
        // spot-check triangle inequality on a sample to keep runtime sane
        for (i, x) in net.iter().enumerate().step_by(7) {
            for y in net.iter().skip(i % 3).step_by(5) {
                let d = g.metric(x, y);
                for z in net.iter().step_by(11) {
                    assert!(g.metric(x, z) + g.metric(z, y) >= d);
                }
            }
        }
    }

    #[test]
    fn refinement_keeps_vertex_distances() {
        let g = sys();
        let coarse = g.vertices(2);
        for x in &coarse {
            for y in &coarse {
                let d2 = g.graph(2).distance(x, y);
                let d3 = g.graph(3).distance(x, y);
                let d4 = g.graph(4).distance(x, y);
                assert_eq!(d2, d3, "refinement changed d({x},{y})");
                assert_eq!(d3, d4);
            }
        }
    }

    #[test]
    fn map_not_locally_injective() {
        let g = sys();
        let (p, q) = g.non_injectivity_witness();
        assert_ne!(p, q);
        assert_eq!(g.apply(&p), g.apply(&q));
    }

    #[test]
    fn modulus_witness_sound() {
        let g = sys();
        let net = g.vertices(3);
        let delta = Rational::new(1, 4);
        let din = g.modulus(1, &delta);
        for x in net.iter().step_by(3) {
            for y in net.iter().step_by(5) {
                if g.metric(x, y) <= din {
                    assert!(g.metric(&g.apply(x), &g.apply(y)) <= delta);
                }
            }
        }
    }

    #[test]
    fn diameter_bound_holds() {
        let g = sys();
        let net = g.vertices(3);
        let mut max = Rational::zero();
        for x in &net {
            for y in &net {
                let d = g.metric(x, y);
                if d > max {
                    max = d;
                }
            }
        }
        // skeleton diameter is exactly 2; any point of the space is within
        // 2^-3 of this net, so the shipped bound covers the whole space
        assert_eq!(max, Rational::integer(2));
        assert!(&max + &Rational::new(1, 4) <= g.diameter());
    }

    #[test]
    fn parse_display_roundtrip() {
        let g = sys();
        for s in ["A", "B", "C", "3:1/2,0/1", "5:1/4,1/4"] {
            let p = g.parse_point(s).unwrap();
            let again = g.parse_point(&p.to_string()).unwrap();
            assert_eq!(p, again);
        }
        // the midpoint of the removed middle triangle is not a vertex
        assert!(g.parse_point("1:3/8,3/8").is_err());
        // non-dyadic coordinates rejected
        assert!(g.parse_point("1:1/3,0/1").is_err());
    }
}
