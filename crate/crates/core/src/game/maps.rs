use std::io::{Read, Write};

use log::warn;
use serde::{Deserialize, Serialize};

use super::grid::{CellIndex, SupportGrid};
use super::state::ActionValue;
use crate::error::{Error, Result};

/// One explored `(action, utility)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub action: f64,
    pub utility: f64,
}

impl Sample {
    /// Zero-initialized entry that precedes the first real sample of a gradient cell.
    pub const PSEUDO: Sample = Sample { action: 0.0, utility: 0.0 };

    pub fn new(action: f64, utility: f64) -> Self {
        Self { action, utility }
    }
}

/// Read access shared by every performance map flavor.
///
/// Visited cells are exposed as parallel slices (cell ids, flattened support
/// coordinates, representative actions) in first-visit order so interpolation
/// can run without per-query allocation.
pub trait PerformanceMap {
    fn grid(&self) -> &SupportGrid;
    fn visited_cells(&self) -> &[CellIndex];
    /// Support-vector coordinates of the visited cells, `grid().dim()` values per cell.
    fn visited_positions(&self) -> &[f64];
    fn visited_actions(&self) -> &[f64];
    /// Export records for all visited cells in first-visit order, so a reloaded
    /// policy sums interpolation weights in the same order.
    fn records(&self) -> Vec<MapRecord>;

    fn visited_count(&self) -> usize {
        self.visited_cells().len()
    }
}

#[derive(Debug, Clone, Default)]
struct VisitIndex {
    cells: Vec<CellIndex>,
    positions: Vec<f64>,
    actions: Vec<f64>,
    slot: Vec<Option<u32>>,
}

impl VisitIndex {
    fn new(cell_count: usize) -> Self {
        Self { slot: vec![None; cell_count], ..Default::default() }
    }

    fn set(&mut self, grid: &SupportGrid, cell: CellIndex, action: f64) {
        match self.slot[cell.0] {
            Some(s) => self.actions[s as usize] = action,
            None => {
                self.slot[cell.0] = Some(self.cells.len() as u32);
                self.cells.push(cell);
                self.positions.extend(grid.support_vector(cell));
                self.actions.push(action);
            }
        }
    }
}

fn check_cell(grid: &SupportGrid, cell: CellIndex) -> Result<()> {
    if cell.0 >= grid.cell_count() {
        return Err(Error::InvalidValue(format!("cell {} out of range for {} cells", cell.0, grid.cell_count())));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestResponseCell {
    pub a_max: f64,
    pub u_max: f64,
    pub visited: bool,
}

impl Default for BestResponseCell {
    fn default() -> Self {
        Self { a_max: 0.0, u_max: f64::NEG_INFINITY, visited: false }
    }
}

/// Map that keeps the best explored action and its utility per support vector.
#[derive(Debug, Clone)]
pub struct BestResponseMap {
    grid: SupportGrid,
    cells: Vec<BestResponseCell>,
    index: VisitIndex,
}

impl BestResponseMap {
    pub fn new(grid: SupportGrid) -> Self {
        Self {
            cells: vec![BestResponseCell::default(); grid.cell_count()],
            index: VisitIndex::new(grid.cell_count()),
            grid,
        }
    }

    pub fn cell(&self, cell: CellIndex) -> &BestResponseCell {
        &self.cells[cell.0]
    }

    /// Replaces the cell's best pair iff `utility` strictly exceeds the stored maximum.
    /// Returns whether the cell changed.
    pub fn update(&mut self, cell: CellIndex, action: ActionValue, utility: f64) -> Result<bool> {
        check_cell(&self.grid, cell)?;
        if !utility.is_finite() {
            warn!("rejecting non-finite utility {utility} for cell {}", cell.0);
            return Err(Error::InvalidValue(format!("non-finite utility {utility}")));
        }
        let entry = &mut self.cells[cell.0];
        if utility > entry.u_max {
            entry.u_max = utility;
            entry.a_max = action.get();
            entry.visited = true;
            self.index.set(&self.grid, cell, action.get());
            Ok(true)
        } else {
            Ok(false)
        }
    }
}

impl PerformanceMap for BestResponseMap {
    fn grid(&self) -> &SupportGrid {
        &self.grid
    }
    fn visited_cells(&self) -> &[CellIndex] {
        &self.index.cells
    }
    fn visited_positions(&self) -> &[f64] {
        &self.index.positions
    }
    fn visited_actions(&self) -> &[f64] {
        &self.index.actions
    }

    fn records(&self) -> Vec<MapRecord> {
        self.index
            .cells
            .iter()
            .copied()
            .map(|c| {
                let e = &self.cells[c.0];
                MapRecord::new(&self.grid, c, e.a_max, e.u_max, 1)
            })
            .collect()
    }
}

/// Map that stacks the sampled `(action, utility)` history of each support vector
/// in a sliding window of at most `depth` entries.
#[derive(Debug, Clone)]
pub struct GradientMap {
    grid: SupportGrid,
    depth: usize,
    stacks: Vec<Vec<Sample>>,
    index: VisitIndex,
}

impl GradientMap {
    pub fn new(grid: SupportGrid, depth: usize) -> Result<Self> {
        if depth < 2 {
            return Err(Error::config(format!("stack depth must be >= 2, got {depth}")));
        }
        Ok(Self { stacks: vec![Vec::new(); grid.cell_count()], index: VisitIndex::new(grid.cell_count()), grid, depth })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Sample stack of `cell`, oldest first. An untouched cell holds only the pseudo-sample.
    pub fn stack(&self, cell: CellIndex) -> &[Sample] {
        let s = &self.stacks[cell.0];
        if s.is_empty() {
            std::slice::from_ref(&Sample::PSEUDO)
        } else {
            s
        }
    }

    /// Index of the latest entry (`stack size - 1`).
    pub fn p(&self, cell: CellIndex) -> usize {
        self.stack(cell).len() - 1
    }

    pub fn latest(&self, cell: CellIndex) -> Sample {
        *self.stack(cell).last().expect("stack is never empty")
    }

    pub fn is_touched(&self, cell: CellIndex) -> bool {
        !self.stacks[cell.0].is_empty()
    }

    /// Appends a sample behind the cell's history (pseudo-sample first for a fresh cell),
    /// evicting the oldest entry once the window is full.
    pub fn push(&mut self, cell: CellIndex, action: ActionValue, utility: f64) -> Result<()> {
        self.insert(cell, action, utility, true)
    }

    /// Kick-off variant of [`push`](Self::push): a fresh cell starts from the random sample
    /// itself instead of the zero pseudo-sample.
    pub fn push_kickoff(&mut self, cell: CellIndex, action: ActionValue, utility: f64) -> Result<()> {
        self.insert(cell, action, utility, false)
    }

    fn insert(&mut self, cell: CellIndex, action: ActionValue, utility: f64, pseudo: bool) -> Result<()> {
        check_cell(&self.grid, cell)?;
        if !utility.is_finite() {
            warn!("rejecting non-finite utility {utility} for cell {}", cell.0);
            return Err(Error::InvalidValue(format!("non-finite utility {utility}")));
        }
        let stack = &mut self.stacks[cell.0];
        if stack.is_empty() && pseudo {
            stack.push(Sample::PSEUDO);
        }
        stack.push(Sample::new(action.get(), utility));
        if stack.len() > self.depth {
            stack.remove(0);
        }
        self.index.set(&self.grid, cell, action.get());
        Ok(())
    }
}

impl PerformanceMap for GradientMap {
    fn grid(&self) -> &SupportGrid {
        &self.grid
    }
    fn visited_cells(&self) -> &[CellIndex] {
        &self.index.cells
    }
    fn visited_positions(&self) -> &[f64] {
        &self.index.positions
    }
    fn visited_actions(&self) -> &[f64] {
        &self.index.actions
    }

    fn records(&self) -> Vec<MapRecord> {
        self.index
            .cells
            .iter()
            .copied()
            .map(|c| {
                let last = self.latest(c);
                MapRecord::new(&self.grid, c, last.action, last.utility, self.stack(c).len())
            })
            .collect()
    }
}

/// Exploitation-only policy restored from an exported map.
#[derive(Debug, Clone)]
pub struct StoredPolicy {
    grid: SupportGrid,
    records: Vec<MapRecord>,
    index: VisitIndex,
}

impl StoredPolicy {
    pub fn from_records(grid: SupportGrid, records: Vec<MapRecord>) -> Result<Self> {
        let mut index = VisitIndex::new(grid.cell_count());
        for r in &records {
            let cell = grid.index_of(&r.coords)?;
            if cell.0 != r.cell {
                return Err(Error::InvalidValue(format!(
                    "record cell {} disagrees with coordinates {:?}",
                    r.cell, r.coords
                )));
            }
            index.set(&grid, cell, ActionValue::new(r.action)?.get());
        }
        Ok(Self { grid, records, index })
    }
}

impl PerformanceMap for StoredPolicy {
    fn grid(&self) -> &SupportGrid {
        &self.grid
    }
    fn visited_cells(&self) -> &[CellIndex] {
        &self.index.cells
    }
    fn visited_positions(&self) -> &[f64] {
        &self.index.positions
    }
    fn visited_actions(&self) -> &[f64] {
        &self.index.actions
    }
    fn records(&self) -> Vec<MapRecord> {
        self.records.clone()
    }
}

/// One exported row: a visited cell with its representative sample.
#[derive(Debug, Clone, PartialEq)]
pub struct MapRecord {
    pub cell: usize,
    pub coords: Vec<usize>,
    pub support: Vec<f64>,
    pub action: f64,
    pub utility: f64,
    pub depth: usize,
}

impl MapRecord {
    fn new(grid: &SupportGrid, cell: CellIndex, action: f64, utility: f64, depth: usize) -> Self {
        Self { cell: cell.0, coords: grid.coords(cell), support: grid.support_vector(cell), action, utility, depth }
    }
}

fn header(dim: usize) -> Vec<String> {
    let mut h = vec!["cell".to_string()];
    h.extend((0..dim).map(|j| format!("i{j}")));
    h.extend((0..dim).map(|j| format!("s{j}")));
    h.extend(["action", "utility", "depth"].map(String::from));
    h
}

/// Writes visited cells as comma-separated text:
/// `cell,i0..,s0..,action,utility,depth`.
pub fn write_map_csv<W: Write>(map: &dyn PerformanceMap, out: W) -> Result<()> {
    let dim = map.grid().dim();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(dim))?;
    for r in map.records() {
        let mut row = vec![r.cell.to_string()];
        row.extend(r.coords.iter().map(|c| c.to_string()));
        row.extend(r.support.iter().map(|s| s.to_string()));
        row.push(r.action.to_string());
        row.push(r.utility.to_string());
        row.push(r.depth.to_string());
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_map_csv<R: Read>(grid: SupportGrid, input: R) -> Result<StoredPolicy> {
    let dim = grid.dim();
    let mut rdr = csv::Reader::from_reader(input);
    let expected = header(dim);
    let got: Vec<String> = rdr.headers()?.iter().map(String::from).collect();
    if got != expected {
        return Err(Error::InvalidValue(format!("unexpected map header {got:?}")));
    }
    let parse = |s: &str| -> Result<f64> {
        s.parse::<f64>().map_err(|e| Error::InvalidValue(format!("bad number {s:?}: {e}")))
    };
    let parse_u = |s: &str| -> Result<usize> {
        s.parse::<usize>().map_err(|e| Error::InvalidValue(format!("bad index {s:?}: {e}")))
    };
    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let cell = parse_u(&row[0])?;
        let coords = (0..dim).map(|j| parse_u(&row[1 + j])).collect::<Result<Vec<_>>>()?;
        let support = (0..dim).map(|j| parse(&row[1 + dim + j])).collect::<Result<Vec<_>>>()?;
        records.push(MapRecord {
            cell,
            coords,
            support,
            action: parse(&row[1 + 2 * dim])?,
            utility: parse(&row[2 + 2 * dim])?,
            depth: parse_u(&row[3 + 2 * dim])?,
        });
    }
    StoredPolicy::from_records(grid, records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(v: f64) -> ActionValue {
        ActionValue::new(v).unwrap()
    }

    fn grid() -> SupportGrid {
        SupportGrid::new(5, 2).unwrap()
    }

    #[test]
    fn best_response_strict_improvement() {
        let mut m = BestResponseMap::new(grid());
        let c = CellIndex(3);
        m.update(c, a(0.3), 1.0).unwrap();
        assert!(m.update(c, a(0.7), 2.0).unwrap());
        assert_eq!((m.cell(c).u_max, m.cell(c).a_max), (2.0, 0.7));

        let mut m = BestResponseMap::new(grid());
        m.update(c, a(0.3), 1.0).unwrap();
        assert!(!m.update(c, a(0.7), 1.0).unwrap());
        assert_eq!((m.cell(c).u_max, m.cell(c).a_max), (1.0, 0.3));
    }

    #[test]
    fn fresh_cell_accepts_negative_utility() {
        let mut m = BestResponseMap::new(grid());
        assert!(m.update(CellIndex(0), a(0.5), -3.0).unwrap());
        assert_eq!(m.cell(CellIndex(0)).u_max, -3.0);
        assert_eq!(m.visited_count(), 1);
    }

    #[test]
    fn non_finite_utility_rejected() {
        let mut m = BestResponseMap::new(grid());
        m.update(CellIndex(0), a(0.5), 1.0).unwrap();
        assert!(m.update(CellIndex(0), a(0.9), f64::NAN).is_err());
        assert_eq!(m.cell(CellIndex(0)).a_max, 0.5);

        let mut g = GradientMap::new(grid(), 8).unwrap();
        assert!(g.push(CellIndex(0), a(0.5), f64::INFINITY).is_err());
        assert!(!g.is_touched(CellIndex(0)));
    }

    #[test]
    fn untouched_gradient_cell_holds_pseudo_sample() {
        let g = GradientMap::new(grid(), 8).unwrap();
        assert_eq!(g.stack(CellIndex(7)), &[Sample::PSEUDO]);
        assert_eq!(g.p(CellIndex(7)), 0);
        assert_eq!(g.visited_count(), 0);
    }

    #[test]
    fn first_push_follows_pseudo_sample() {
        let mut g = GradientMap::new(grid(), 8).unwrap();
        g.push(CellIndex(2), a(0.4), 1.5).unwrap();
        assert_eq!(g.stack(CellIndex(2)), &[Sample::PSEUDO, Sample::new(0.4, 1.5)]);
        assert_eq!(g.p(CellIndex(2)), 1);
    }

    #[test]
    fn kickoff_push_skips_pseudo_sample() {
        let mut g = GradientMap::new(grid(), 8).unwrap();
        g.push_kickoff(CellIndex(2), a(0.4), 1.5).unwrap();
        assert_eq!(g.stack(CellIndex(2)), &[Sample::new(0.4, 1.5)]);
    }

    #[test]
    fn window_keeps_last_entries_of_full_history() {
        let mut g = GradientMap::new(grid(), 8).unwrap();
        let c = CellIndex(4);
        let mut ideal = vec![Sample::PSEUDO];
        for k in 0..10 {
            let s = Sample::new(k as f64 / 10.0, k as f64);
            ideal.push(s);
            g.push(c, a(s.action), s.utility).unwrap();
            assert!(g.stack(c).len() <= 8);
        }
        assert_eq!(g.stack(c), &ideal[ideal.len() - 8..]);
    }

    #[test]
    fn csv_round_trip_keeps_representatives() {
        let mut g = GradientMap::new(grid(), 4).unwrap();
        g.push(CellIndex(6), a(0.25), 2.5).unwrap();
        g.push(CellIndex(6), a(0.125), 2.75).unwrap();
        g.push(CellIndex(1), a(0.8), 1.0 / 3.0).unwrap();
        let mut buf = Vec::new();
        write_map_csv(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("cell,i0,i1,s0,s1,action,utility,depth\n"));
        let p = read_map_csv(grid(), buf.as_slice()).unwrap();
        assert_eq!(p.records(), g.records());
        let mut again = Vec::new();
        write_map_csv(&p, &mut again).unwrap();
        assert_eq!(buf, again);
    }
}
