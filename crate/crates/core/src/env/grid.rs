use rand::seq::index;
use rand::Rng;

use super::{EnvError, Environment};
use crate::ltl::{Alphabet, Symbol};
use crate::tasks::TaskConfig;

/// Actions in index order.
pub const GRID_ACTIONS: [GridAction; 4] = [GridAction::North, GridAction::South, GridAction::East, GridAction::West];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GridAction {
    North,
    South,
    East,
    West,
}

/// Cell contents of a square toroidal grid, row-major. `None` is empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridLayout {
    size: usize,
    cells: Vec<Option<Symbol>>,
}

impl GridLayout {
    pub fn new(size: usize, cells: Vec<Option<Symbol>>) -> Result<Self, EnvError> {
        if size == 0 || cells.len() != size * size {
            return Err(EnvError::Config(format!("layout needs {} cells, got {}", size * size, cells.len())));
        }
        Ok(Self { size, cells })
    }

    /// Parses rows of single characters: `.` for empty, or the first letter of
    /// a proposition name. Rows are separated by newlines or `/`.
    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Self, EnvError> {
        let rows: Vec<&str> = text.split(['\n', '/']).map(str::trim).filter(|r| !r.is_empty()).collect();
        let size = rows.len();
        let mut cells = Vec::with_capacity(size * size);
        for row in &rows {
            if row.chars().count() != size {
                return Err(EnvError::Config(format!("layout row `{row}` is not {size} cells wide")));
            }
            for ch in row.chars() {
                if ch == '.' {
                    cells.push(None);
                    continue;
                }
                let sym = alphabet
                    .propositions()
                    .find(|&s| alphabet.name(s).starts_with(ch))
                    .ok_or_else(|| EnvError::Config(format!("no proposition starts with `{ch}`")))?;
                cells.push(Some(sym));
            }
        }
        Self::new(size, cells)
    }

    /// Places `copies` cells of every proposition uniformly at random among
    /// distinct cells.
    pub fn sample<R: Rng + ?Sized>(size: usize, alphabet: &Alphabet, copies: usize, rng: &mut R) -> Self {
        let props: Vec<Symbol> = alphabet.propositions().collect();
        let mut cells = vec![None; size * size];
        let chosen = index::sample(rng, size * size, props.len() * copies);
        for (k, cell) in chosen.into_iter().enumerate() {
            cells[cell] = Some(props[k / copies]);
        }
        Self { size, cells }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, row: usize, col: usize) -> Option<Symbol> {
        self.cells[row * self.size + col]
    }

    pub fn cells(&self) -> &[Option<Symbol>] {
        &self.cells
    }

    pub fn empty_cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_none())
            .map(|(i, _)| (i / self.size, i % self.size))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub size: usize,
    pub alphabet: Alphabet,
    /// Cells per proposition.
    pub copies: usize,
    /// Fixed map, or `None` to resample the map every episode.
    pub layout: Option<GridLayout>,
}

impl GridConfig {
    /// 7×7 map with the five Minecraft propositions, two cells each.
    pub fn minecraft() -> Self {
        Self {
            size: 7,
            alphabet: TaskConfig::minecraft_alphabet(),
            copies: 2,
            layout: None,
        }
    }

    /// 5×5 map with the first three Minecraft propositions.
    pub fn small() -> Self {
        Self {
            size: 5,
            alphabet: Alphabet::new(["pick", "lava", "door"]).expect("valid names"),
            copies: 2,
            layout: None,
        }
    }

    pub fn with_layout(mut self, layout: GridLayout) -> Self {
        self.layout = Some(layout);
        self
    }

    pub fn validate(&self) -> Result<(), EnvError> {
        if self.size % 2 == 0 {
            return Err(EnvError::Config(format!("grid size must be odd to centre the agent, got {}", self.size)));
        }
        let occupied = (self.alphabet.len() - 1) * self.copies;
        if occupied >= self.size * self.size {
            return Err(EnvError::Config(format!(
                "{occupied} occupied cells leave no free start cell on a {0}x{0} grid",
                self.size
            )));
        }
        if let Some(layout) = &self.layout {
            if layout.size != self.size {
                return Err(EnvError::Config("fixed layout size differs from grid size".into()));
            }
            if layout.empty_cells().next().is_none() {
                return Err(EnvError::Config("fixed layout has no empty start cell".into()));
            }
        }
        Ok(())
    }
}

/// Toroidal gridworld. Each proposition holds on the cells it occupies; the
/// agent observes an egocentric one-hot view of the whole map.
#[derive(Debug, Clone, PartialEq)]
pub struct GridWorld {
    config: GridConfig,
    layout: GridLayout,
    agent: (usize, usize),
}

impl GridWorld {
    pub fn new(config: GridConfig) -> Result<Self, EnvError> {
        config.validate()?;
        let layout = config.layout.clone().unwrap_or_else(|| GridLayout {
            size: config.size,
            cells: vec![None; config.size * config.size],
        });
        Ok(Self {
            config,
            layout,
            agent: (0, 0),
        })
    }

    pub fn config(&self) -> &GridConfig {
        &self.config
    }

    pub fn layout(&self) -> &GridLayout {
        &self.layout
    }

    pub fn agent(&self) -> (usize, usize) {
        self.agent
    }

    pub fn set_agent(&mut self, row: usize, col: usize) {
        assert!(row < self.config.size && col < self.config.size, "position off the grid");
        self.agent = (row, col);
    }

    /// Position after one move, wrapping around the edges.
    pub fn moved(&self, (row, col): (usize, usize), action: GridAction) -> (usize, usize) {
        let n = self.config.size;
        match action {
            GridAction::North => ((row + n - 1) % n, col),
            GridAction::South => ((row + 1) % n, col),
            GridAction::East => (row, (col + 1) % n),
            GridAction::West => (row, (col + n - 1) % n),
        }
    }

    pub fn step_action(&mut self, action: GridAction) {
        self.agent = self.moved(self.agent, action);
    }

    fn planes(&self) -> usize {
        self.config.alphabet.len()
    }

    /// Plane index of a cell: the proposition's id, or the last plane if empty.
    fn plane(&self, cell: Option<Symbol>) -> usize {
        cell.map_or(self.planes() - 1, Symbol::index)
    }

    /// Cell contents in egocentric order, agent at the centre.
    fn egocentric(&self) -> impl Iterator<Item = Option<Symbol>> + '_ {
        let n = self.config.size;
        let c = n / 2;
        let (ar, ac) = self.agent;
        (0..n * n).map(move |k| {
            let (i, j) = (k / n, k % n);
            self.layout.get((ar + n + i - c) % n, (ac + n + j - c) % n)
        })
    }
}

impl Environment for GridWorld {
    fn name(&self) -> &'static str {
        "gridworld"
    }

    fn alphabet(&self) -> &Alphabet {
        &self.config.alphabet
    }

    fn num_actions(&self) -> usize {
        GRID_ACTIONS.len()
    }

    fn observation_dim(&self) -> usize {
        self.config.size * self.config.size * self.planes()
    }

    fn reset<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        self.layout = match &self.config.layout {
            Some(fixed) => fixed.clone(),
            None => GridLayout::sample(self.config.size, &self.config.alphabet, self.config.copies, rng),
        };
        let empty: Vec<(usize, usize)> = self.layout.empty_cells().collect();
        self.agent = empty[rng.gen_range(0..empty.len())];
    }

    fn step(&mut self, action: usize) {
        self.step_action(GRID_ACTIONS[action]);
    }

    fn observation(&self) -> Vec<f64> {
        let planes = self.planes();
        let mut x = vec![0.0; self.observation_dim()];
        for (k, cell) in self.egocentric().enumerate() {
            x[k * planes + self.plane(cell)] = 1.0;
        }
        x
    }

    fn oracle_label(&self) -> Symbol {
        let (r, c) = self.agent;
        self.layout.get(r, c).unwrap_or(self.config.alphabet.empty_symbol())
    }

    fn state_key(&self) -> Vec<u8> {
        self.egocentric().map(|cell| self.plane(cell) as u8).collect()
    }
}
