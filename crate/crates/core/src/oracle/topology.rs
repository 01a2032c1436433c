//! Fixed connectivity of one leg, the rail-short predicate and path resolution.

use crate::analytic::Conduction;
use crate::modulation::GateVector;
use crate::types::{Direction, Switch};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Node {
    DcPos,
    A,
    Out,
    B,
    DcNeg,
    Neutral,
}

impl Node {
    const COUNT: usize = 6;

    fn index(self) -> usize {
        self as usize
    }

    fn is_rail(self) -> bool {
        matches!(self, Node::DcPos | Node::DcNeg | Node::Neutral)
    }

    /// Rank of the rail potential: DC+ above neutral above DC−.
    fn potential(self) -> i8 {
        match self {
            Node::DcPos => 1,
            Node::Neutral => 0,
            Node::DcNeg => -1,
            _ => 0,
        }
    }
}

/// Drain and source node of each switch (forward current flows drain → source).
pub const EDGES: [(Switch, Node, Node); 6] = [
    (Switch::S1, Node::DcPos, Node::A),
    (Switch::S2, Node::A, Node::Out),
    (Switch::S3, Node::Out, Node::B),
    (Switch::S4, Node::B, Node::DcNeg),
    (Switch::S5, Node::A, Node::Neutral),
    (Switch::S6, Node::Neutral, Node::B),
];

fn find(parent: &mut [usize; Node::COUNT], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    parent[x] = r;
    r
}

/// True if the on-switches connect any two of DC+, DC− and the neutral point.
pub fn rail_short_check(gates: GateVector) -> bool {
    let mut parent = std::array::from_fn(|i| i);
    for (sw, d, s) in EDGES {
        if gates.is_on(sw) {
            let (a, b) = (find(&mut parent, d.index()), find(&mut parent, s.index()));
            parent[a] = b;
        }
    }
    let rails = [Node::DcPos, Node::DcNeg, Node::Neutral].map(|n| find(&mut parent, n.index()));
    rails[0] == rails[1] || rails[0] == rails[2] || rails[1] == rails[2]
}

/// One route from the output to a rail, listed from OUT outward.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub rail: Node,
    /// Each hop with the direction of current when it flows out of OUT.
    pub hops: Vec<(Switch, Direction)>,
}

/// All simple paths from OUT that end at the first rail reached.
pub fn output_paths() -> Vec<Path> {
    fn walk(node: Node, hops: &mut Vec<(Switch, Direction)>, out: &mut Vec<Path>) {
        if node.is_rail() {
            out.push(Path {
                rail: node,
                hops: hops.clone(),
            });
            return;
        }
        for (sw, drain, source) in EDGES {
            if hops.iter().any(|h| h.0 == sw) {
                continue;
            }
            let step = if drain == node {
                Some((source, Direction::Forward))
            } else if source == node {
                Some((drain, Direction::Reverse))
            } else {
                None
            };
            if let Some((next, dir)) = step {
                if next == Node::Out {
                    continue;
                }
                hops.push((sw, dir));
                walk(next, hops, out);
                hops.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(Node::Out, &mut Vec::new(), &mut out);
    out
}

fn flip(d: Direction) -> Direction {
    match d {
        Direction::Forward => Direction::Reverse,
        Direction::Reverse => Direction::Forward,
    }
}

type Route = Vec<(Switch, Direction)>;

/// Routes the load current may take: every fully gated-on path if there is
/// one, otherwise the feasible paths to the best rail through the fewest off
/// devices. `None` if no path is feasible.
fn candidate_routes(gates: GateVector, current_positive: bool) -> Option<Vec<Route>> {
    let candidates: Vec<(Node, Route)> = output_paths()
        .into_iter()
        .map(|p| {
            // Positive load current flows from the rail into OUT, against the
            // listed hop direction.
            let dirs = p
                .hops
                .iter()
                .map(|&(sw, d)| (sw, if current_positive { flip(d) } else { d }))
                .collect();
            (p.rail, dirs)
        })
        .filter(|(_, dirs): &(Node, Route)| dirs.iter().all(|&(sw, d)| gates.is_on(sw) || d == Direction::Reverse))
        .collect();
    if candidates.is_empty() {
        return None;
    }
    let off_count = |dirs: &Route| dirs.iter().filter(|(sw, _)| !gates.is_on(*sw)).count();
    let key = |(rail, d): &(Node, Route)| {
        if off_count(d) == 0 {
            return (i8::MAX, 0);
        }
        let pot = if current_positive { rail.potential() } else { -rail.potential() };
        (pot, -(off_count(d) as i64))
    };
    let best = candidates.iter().map(key).max().expect("non-empty");
    Some(candidates.into_iter().filter(|c| key(c) == best).map(|(_, d)| d).collect())
}

fn split(routes: &[Route]) -> Vec<Conduction> {
    let share = 1.0 / routes.len() as f64;
    let mut out: Vec<Conduction> = Vec::new();
    for dirs in routes {
        for &(device, direction) in dirs {
            match out.iter_mut().find(|c| c.device == device && c.direction == direction) {
                Some(c) => c.share += share,
                None => out.push(Conduction {
                    device,
                    direction,
                    share,
                }),
            }
        }
    }
    out.sort_by_key(|c| (c.device, c.direction));
    out
}

/// Keeps the routes sharing the most devices with `previous`. Fully gated-on
/// routes always share the current.
fn keep_continuous(gates: GateVector, routes: Vec<Route>, previous: &[Conduction]) -> Vec<Route> {
    let all_on = routes.iter().all(|r| r.iter().all(|(sw, _)| gates.is_on(*sw)));
    if routes.len() < 2 || previous.is_empty() || all_on {
        return routes;
    }
    let overlap = |r: &Route| r.iter().filter(|(sw, _)| previous.iter().any(|c| c.device == *sw)).count();
    let best = routes.iter().map(overlap).max().unwrap_or(0);
    routes.into_iter().filter(|r| overlap(r) == best).collect()
}

/// Devices carrying the load current for `gates` and the sign of the load
/// current (positive = out of the leg), with each device's share.
///
/// On devices conduct both ways; off devices conduct only in reverse. If any
/// path is fully gated on, the current splits evenly over those paths.
/// Otherwise it takes the reachable rail with the highest potential (lowest
/// for negative current), preferring paths through fewer off devices and
/// splitting evenly over what remains tied.
/// Returns `None` if the current has no feasible path.
pub fn conduction_paths(gates: GateVector, current_positive: bool) -> Option<Vec<Conduction>> {
    candidate_routes(gates, current_positive).map(|r| split(&r))
}

/// Like [`conduction_paths`], but ties are first narrowed to the routes that
/// share the most devices with the previously conducting set. In a dead-time
/// interval the current then stays in the commutation cell it was already
/// using instead of spreading over an equivalent route in the other cell.
pub fn conduction_paths_after(
    gates: GateVector,
    current_positive: bool,
    previous: &[Conduction],
) -> Option<Vec<Conduction>> {
    candidate_routes(gates, current_positive).map(|r| split(&keep_continuous(gates, r, previous)))
}

struct TableEntry {
    routes: Vec<Route>,
    split: Vec<Conduction>,
}

/// Precomputed path resolution for all 64 gate patterns and both signs.
pub struct PathTable {
    entries: Vec<Option<TableEntry>>,
    shorts: [bool; 64],
}

impl PathTable {
    pub fn new() -> Self {
        let mut entries = Vec::with_capacity(128);
        for bits in 0..64u8 {
            for pos in [false, true] {
                entries.push(candidate_routes(GateVector::from_bits(bits), pos).map(|routes| TableEntry {
                    split: split(&routes),
                    routes,
                }));
            }
        }
        PathTable {
            entries,
            shorts: std::array::from_fn(|b| rail_short_check(GateVector::from_bits(b as u8))),
        }
    }

    /// Same result as [`conduction_paths_after`].
    pub fn paths(&self, gates: GateVector, current_positive: bool, previous: &[Conduction]) -> Option<Vec<Conduction>> {
        let entry = self.entries[2 * gates.bits() as usize + current_positive as usize].as_ref()?;
        if entry.routes.len() < 2 || previous.is_empty() {
            return Some(entry.split.clone());
        }
        Some(split(&keep_continuous(gates, entry.routes.clone(), previous)))
    }

    pub fn is_short(&self, gates: GateVector) -> bool {
        self.shorts[gates.bits() as usize]
    }
}

impl Default for PathTable {
    fn default() -> Self {
        Self::new()
    }
}
