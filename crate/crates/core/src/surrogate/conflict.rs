//! Conflict areas on a square occupancy grid.
//!
//! Every agent's footprint is rasterized frame by frame. A cell visited by
//! two agents is a shared conflict cell; post-encroachment and encroachment
//! times are read off the per-cell entry and exit times. Gap time uses the
//! same grid on constant-velocity extrapolations of the reference points.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{rect_overlaps_square, Vec2};
use crate::math;
use crate::scene::{AgentId, AgentState, ScenarioTrackset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub ix: i64,
    pub iy: i64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    /// Cell edge length, meters.
    pub cell: f64,
}

impl Grid {
    pub fn new(cell: f64) -> Result<Self> {
        if !(cell.is_finite() && cell > 0.0) {
            return Err(Error::InvalidConfig("conflict cell size must be positive"));
        }
        Ok(Grid { cell })
    }

    pub fn cell_of(&self, p: Vec2) -> Cell {
        Cell { ix: math::floor(p.x / self.cell) as i64, iy: math::floor(p.y / self.cell) as i64 }
    }

    /// Cells touched by the agent's footprint, or the single cell holding its
    /// reference point when the footprint is unknown.
    pub fn footprint_cells(&self, state: &AgentState, out: &mut Vec<Cell>) {
        let Some(rect) = state.rect() else {
            out.push(self.cell_of(state.position));
            return;
        };
        let corners = rect.corners();
        let (mut lo, mut hi) = (corners[0], corners[0]);
        for c in &corners[1..] {
            lo = Vec2::new(lo.x.min(c.x), lo.y.min(c.y));
            hi = Vec2::new(hi.x.max(c.x), hi.y.max(c.y));
        }
        let (c0, c1) = (self.cell_of(lo), self.cell_of(hi));
        for ix in c0.ix..=c1.ix {
            for iy in c0.iy..=c1.iy {
                if rect_overlaps_square(&rect, ix as f64 * self.cell, iy as f64 * self.cell, self.cell) {
                    out.push(Cell { ix, iy });
                }
            }
        }
    }
}

/// Time span an agent spends in a cell: first entry up to one frame after
/// the last frame it was seen there (exclusive), both in ms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Occupancy {
    pub entry_ms: i64,
    pub exit_ms: i64,
}

impl Occupancy {
    fn overlaps(&self, other: &Occupancy) -> bool {
        self.entry_ms < other.exit_ms && other.entry_ms < self.exit_ms
    }
}

type CellMap = BTreeMap<Cell, Occupancy>;

fn agent_occupancy(ts: &ScenarioTrackset, grid: &Grid, agent: AgentId) -> CellMap {
    let mut map = CellMap::new();
    let mut cells = Vec::new();
    for state in ts.track(agent) {
        cells.clear();
        grid.footprint_cells(state, &mut cells);
        let t = state.timestamp_ms;
        for &c in &cells {
            map.entry(c)
                .and_modify(|o| o.exit_ms = t + ts.frame_interval_ms())
                .or_insert(Occupancy { entry_ms: t, exit_ms: t + ts.frame_interval_ms() });
        }
    }
    map
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SharedCell {
    pub cell: Cell,
    pub ego: Occupancy,
    pub adversary: Occupancy,
}

/// Cells swept by both agents of a pair, ordered by cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ConflictRegion {
    pub ego: AgentId,
    pub adversary: AgentId,
    pub cells: Vec<SharedCell>,
}

fn intersect(ego: AgentId, a: &CellMap, adversary: AgentId, b: &CellMap) -> ConflictRegion {
    let cells =
        a.iter().filter_map(|(c, oa)| b.get(c).map(|ob| SharedCell { cell: *c, ego: *oa, adversary: *ob })).collect();
    ConflictRegion { ego, adversary, cells }
}

impl ConflictRegion {
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Post-encroachment time in seconds: smallest delay between one agent
    /// leaving a shared cell and the other entering it. 0 if both ever hold
    /// a cell at the same time.
    pub fn pet(&self) -> Option<f64> {
        self.cells
            .iter()
            .map(|s| {
                if s.ego.overlaps(&s.adversary) {
                    0
                } else if s.ego.entry_ms < s.adversary.entry_ms {
                    s.adversary.entry_ms - s.ego.exit_ms
                } else {
                    s.ego.entry_ms - s.adversary.exit_ms
                }
            })
            .min()
            .map(|ms| ms as f64 / 1000.0)
    }

    fn span(&self, pick: impl Fn(&SharedCell) -> Occupancy) -> Option<Occupancy> {
        let entry_ms = self.cells.iter().map(|s| pick(s).entry_ms).min()?;
        let exit_ms = self.cells.iter().map(|s| pick(s).exit_ms).max()?;
        Some(Occupancy { entry_ms, exit_ms })
    }

    /// The agent that enters the shared region first; ties go to the ego.
    pub fn first_arriving(&self) -> Option<AgentId> {
        let e = self.span(|s| s.ego)?;
        let a = self.span(|s| s.adversary)?;
        Some(if a.entry_ms < e.entry_ms { self.adversary } else { self.ego })
    }

    /// Seconds `agent` spends in the shared region (last exit minus first
    /// entry over all shared cells).
    pub fn occupation_time(&self, agent: AgentId) -> Option<f64> {
        let span = if agent == self.ego {
            self.span(|s| s.ego)?
        } else if agent == self.adversary {
            self.span(|s| s.adversary)?
        } else {
            return None;
        };
        Some((span.exit_ms - span.entry_ms) as f64 / 1000.0)
    }

    /// Encroachment time: occupation time of the first-arriving agent.
    pub fn encroachment_time(&self) -> Option<f64> {
        self.occupation_time(self.first_arriving()?)
    }

    /// From the first entry of either agent to the last exit of either.
    pub fn episode(&self) -> Option<Occupancy> {
        let e = self.span(|s| s.ego)?;
        let a = self.span(|s| s.adversary)?;
        Some(Occupancy { entry_ms: e.entry_ms.min(a.entry_ms), exit_ms: e.exit_ms.max(a.exit_ms) })
    }
}

/// Rasterized sweeps of every agent of a recording.
#[derive(Debug, Clone)]
pub struct OccupancyIndex {
    grid: Grid,
    agents: BTreeMap<AgentId, CellMap>,
}

impl OccupancyIndex {
    pub fn build(ts: &ScenarioTrackset, grid: Grid) -> Self {
        let agents = ts.agent_ids().map(|id| (id, agent_occupancy(ts, &grid, id))).collect();
        OccupancyIndex { grid, agents }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn region(&self, ego: AgentId, adversary: AgentId) -> Result<ConflictRegion> {
        let missing = |agent| Error::MissingAgent { agent, timestamp_ms: None };
        let a = self.agents.get(&ego).ok_or_else(|| missing(ego))?;
        let b = self.agents.get(&adversary).ok_or_else(|| missing(adversary))?;
        Ok(intersect(ego, a, adversary, b))
    }
}

/// Shared swept cells of two agents over the whole recording.
pub fn conflict_regions(ts: &ScenarioTrackset, ego: AgentId, adversary: AgentId, cell: f64) -> Result<ConflictRegion> {
    let grid = Grid::new(cell)?;
    for id in [ego, adversary] {
        if ts.presence(id).is_none() {
            return Err(Error::MissingAgent { agent: id, timestamp_ms: None });
        }
    }
    let a = agent_occupancy(ts, &grid, ego);
    let b = agent_occupancy(ts, &grid, adversary);
    Ok(intersect(ego, &a, adversary, &b))
}

/// Cells crossed by a reference point moving at constant velocity, keyed by
/// the time (s) it first enters each of them.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedPath {
    cells: BTreeMap<Cell, f64>,
}

impl ProjectedPath {
    /// `None` for a standing agent.
    pub fn new(grid: &Grid, state: &AgentState, horizon_s: f64) -> Option<Self> {
        if state.speed() == 0.0 {
            return None;
        }
        let mut cells = BTreeMap::new();
        traverse(grid, state.position, state.velocity, horizon_s, |c, t| {
            cells.entry(c).or_insert(t);
        });
        Some(ProjectedPath { cells })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Arrival-time difference at the shared cell both agents could reach
    /// earliest (smallest later arrival). `None` if the paths never share a cell.
    pub fn gap_time(&self, other: &ProjectedPath) -> Option<f64> {
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        small
            .cells
            .iter()
            .filter_map(|(c, &ta)| large.cells.get(c).map(|&tb| (ta.max(tb), (ta - tb).abs())))
            .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)))
            .map(|(_, diff)| diff)
    }
}

/// Gap time between two states under constant-velocity extrapolation.
pub fn gap_time(grid: &Grid, ego: &AgentState, adversary: &AgentState, horizon_s: f64) -> Option<f64> {
    let a = ProjectedPath::new(grid, ego, horizon_s)?;
    let b = ProjectedPath::new(grid, adversary, horizon_s)?;
    a.gap_time(&b)
}

/// Grid traversal of the segment `origin + velocity * t`, `t` in
/// `[0, horizon]`, calling `visit(cell, entry_time)` in order.
fn traverse(grid: &Grid, origin: Vec2, velocity: Vec2, horizon: f64, mut visit: impl FnMut(Cell, f64)) {
    let mut cell = grid.cell_of(origin);
    let axis = |p: f64, v: f64, i: i64| -> (i64, f64, f64) {
        if v > 0.0 {
            (1, ((i + 1) as f64 * grid.cell - p) / v, grid.cell / v)
        } else if v < 0.0 {
            (-1, (i as f64 * grid.cell - p) / v, -grid.cell / v)
        } else {
            (0, f64::INFINITY, f64::INFINITY)
        }
    };
    let (step_x, mut next_x, dx) = axis(origin.x, velocity.x, cell.ix);
    let (step_y, mut next_y, dy) = axis(origin.y, velocity.y, cell.iy);
    visit(cell, 0.0);
    loop {
        let t = next_x.min(next_y);
        if t.is_nan() || t > horizon {
            break;
        }
        if next_x <= next_y {
            cell.ix += step_x;
            next_x += dx;
        } else {
            cell.iy += step_y;
            next_y += dy;
        }
        visit(cell, t);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn point(id: u64, t: i64, x: f64, y: f64, vx: f64, vy: f64) -> AgentState {
        AgentState::new(id, t, Vec2::new(x, y), Vec2::new(vx, vy), 0.0)
    }

    /// Agent 1 moves along +x on y = y1, agent 2 along +y on x = x2, 1 m per frame.
    fn crossing(y1: f64, x2: f64, delay_frames: i64) -> ScenarioTrackset {
        let states = (0..40).flat_map(|k| {
            let t = k * 100;
            [
                point(1, t, -19.5 + k as f64, y1, 10.0, 0.0),
                point(2, t, x2, -19.5 + (k - delay_frames) as f64, 0.0, 10.0),
            ]
        });
        ScenarioTrackset::from_states(100, states).unwrap()
    }

    #[test]
    fn parallel_paths_share_nothing() {
        let states = (0..20).flat_map(|k| {
            let t = k * 100;
            [point(1, t, k as f64, 0.5, 10.0, 0.0), point(2, t, k as f64, 10.5, 10.0, 0.0)]
        });
        let ts = ScenarioTrackset::from_states(100, states).unwrap();
        let r = conflict_regions(&ts, AgentId(1), AgentId(2), 1.0).unwrap();
        assert!(r.is_empty());
        assert_eq!(r.pet(), None);
        assert_eq!(r.encroachment_time(), None);
    }

    #[test]
    fn perpendicular_paths_share_the_crossing_cell() {
        let ts = crossing(0.5, 0.5, 12);
        let r = conflict_regions(&ts, AgentId(1), AgentId(2), 1.0).unwrap();
        assert_eq!(r.cells.len(), 1);
        assert_eq!(r.cells[0].cell, Cell { ix: 0, iy: 0 });
        // agent 1 in the cell during frame 20 only, agent 2 during frame 32
        assert_eq!(r.cells[0].ego, Occupancy { entry_ms: 2000, exit_ms: 2100 });
        assert_eq!(r.pet(), Some(1.1));
        assert_eq!(r.first_arriving(), Some(AgentId(1)));
        assert_eq!(r.encroachment_time(), Some(0.1));
    }

    #[test]
    fn identical_paths_share_every_cell() {
        let states = (0..20).flat_map(|k| {
            let t = k * 100;
            [point(1, t, k as f64 + 0.5, 0.5, 10.0, 0.0), point(2, t, k as f64 - 4.5, 0.5, 10.0, 0.0)]
        });
        let ts = ScenarioTrackset::from_states(100, states).unwrap();
        let r = conflict_regions(&ts, AgentId(1), AgentId(2), 1.0).unwrap();
        let one = conflict_regions(&ts, AgentId(1), AgentId(1), 1.0).unwrap();
        // agent 2 trails by five cells; shared cells are those both reached
        assert_eq!(r.cells.len(), 15);
        assert_eq!(one.cells.len(), 20);
        // leader leaves, follower arrives 0.4 s later
        assert_eq!(r.pet(), Some(0.4));
    }

    #[test]
    fn pet_examples() {
        let shared = |e: (i64, i64), a: (i64, i64)| ConflictRegion {
            ego: AgentId(1),
            adversary: AgentId(2),
            cells: vec![SharedCell {
                cell: Cell { ix: 0, iy: 0 },
                ego: Occupancy { entry_ms: e.0, exit_ms: e.1 },
                adversary: Occupancy { entry_ms: a.0, exit_ms: a.1 },
            }],
        };
        assert_eq!(shared((4000, 5000), (6200, 7000)).pet(), Some(1.2));
        assert_eq!(shared((4000, 5000), (4800, 7000)).pet(), Some(0.0));
        assert_eq!(shared((6200, 7000), (4000, 5000)).pet(), Some(1.2));
        let r = shared((4000, 4800), (6200, 7000));
        assert_eq!(r.encroachment_time(), Some(0.8));
        assert_eq!(r.occupation_time(AgentId(2)), Some(0.8));
        assert_eq!(r.occupation_time(AgentId(3)), None);
        assert_eq!(r.episode(), Some(Occupancy { entry_ms: 4000, exit_ms: 7000 }));
    }

    #[test]
    fn co_occupation_is_zero() {
        let ts = crossing(0.5, 0.5, 0);
        let r = conflict_regions(&ts, AgentId(1), AgentId(2), 1.0).unwrap();
        assert_eq!(r.pet(), Some(0.0));
    }

    #[test]
    fn footprints_cover_several_cells() {
        let g = Grid::new(1.0).unwrap();
        let s = point(1, 0, 0.5, 0.5, 0.0, 0.0).with_footprint(4.0, 2.0);
        let mut cells = Vec::new();
        g.footprint_cells(&s, &mut cells);
        // x in [-1.5, 2.5], y in [-0.5, 1.5]: touching squares count
        assert_eq!(cells.len(), 5 * 3);
    }

    #[test]
    fn missing_agent() {
        let ts = crossing(0.5, 0.5, 0);
        assert!(matches!(
            conflict_regions(&ts, AgentId(1), AgentId(9), 1.0),
            Err(Error::MissingAgent { agent: AgentId(9), .. })
        ));
    }

    #[test]
    fn gap_time_examples() {
        let g = Grid::new(1.0).unwrap();
        let ego = point(1, 0, -9.5, 0.5, 10.0, 0.0);
        let adv = point(2, 0, 0.5, -14.5, 0.0, 10.0);
        let gt = gap_time(&g, &ego, &adv, 10.0).unwrap();
        assert!((gt - 0.5).abs() < 1e-12, "{gt}");
        let standing = point(2, 0, 0.5, -14.5, 0.0, 0.0);
        assert_eq!(gap_time(&g, &ego, &standing, 10.0), None);
        let adv = point(2, 0, 0.5, -9.5, 0.0, 10.0);
        assert_eq!(gap_time(&g, &ego, &adv, 10.0), Some(0.0));
    }

    #[test]
    fn traversal_visits_cells_in_order() {
        let g = Grid::new(1.0).unwrap();
        let mut seen = Vec::new();
        traverse(&g, Vec2::new(0.5, 0.5), Vec2::new(-1.0, 0.0), 2.6, |c, t| seen.push((c.ix, c.iy, t)));
        assert_eq!(seen, vec![(0, 0, 0.0), (-1, 0, 0.5), (-2, 0, 1.5), (-3, 0, 2.5)]);
    }
}
