use rand::Rng;

use super::{EnvError, Environment};
use crate::ltl::{Alphabet, Symbol};
use crate::tasks::TaskConfig;

pub const MAX_SPEED: f64 = 0.1;
pub const RADIUS_RANGE: (f64, f64) = (0.1, 0.2);
const MAX_ATTEMPTS: usize = 1000;
/// Side of the lattice used to discretize positions for tabular agents.
pub const KEY_LATTICE: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zone {
    pub center: [f64; 2],
    pub radius: f64,
    pub symbol: Symbol,
}

impl Zone {
    pub fn contains(&self, p: [f64; 2]) -> bool {
        let (dx, dy) = (p[0] - self.center[0], p[1] - self.center[1]);
        dx * dx + dy * dy < self.radius * self.radius
    }
}

/// Continuous world in the unit square with one disjoint circular zone per
/// proposition.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatWorld {
    alphabet: Alphabet,
    fixed: Option<Vec<Zone>>,
    zones: Vec<Zone>,
    agent: [f64; 2],
}

impl FlatWorld {
    pub fn new(alphabet: Alphabet) -> Self {
        Self {
            alphabet,
            fixed: None,
            zones: Vec::new(),
            agent: [0.5, 0.5],
        }
    }

    /// Red, green, blue and yellow zones.
    pub fn standard() -> Self {
        Self::new(TaskConfig::flatworld_alphabet())
    }

    pub fn with_zones(alphabet: Alphabet, zones: Vec<Zone>) -> Result<Self, EnvError> {
        if !disjoint(&zones) {
            return Err(EnvError::Config("zones overlap".into()));
        }
        let mut w = Self::new(alphabet);
        w.zones = zones.clone();
        w.fixed = Some(zones);
        Ok(w)
    }

    pub fn zones(&self) -> &[Zone] {
        &self.zones
    }

    pub fn agent(&self) -> [f64; 2] {
        self.agent
    }

    pub fn set_agent(&mut self, p: [f64; 2]) {
        self.agent = p;
    }

    /// Moves by `velocity`, rescaled to at most [`MAX_SPEED`], and clips the
    /// position to the unit square.
    pub fn step_velocity(&mut self, velocity: [f64; 2]) {
        let norm = velocity[0].hypot(velocity[1]);
        let scale = if norm > MAX_SPEED { MAX_SPEED / norm } else { 1.0 };
        for (p, v) in self.agent.iter_mut().zip(velocity) {
            *p = (*p + v * scale).clamp(0.0, 1.0);
        }
    }

    fn sample_zones<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Zone> {
        let props: Vec<Symbol> = self.alphabet.propositions().collect();
        loop {
            let mut zones: Vec<Zone> = Vec::with_capacity(props.len());
            for _ in 0..MAX_ATTEMPTS {
                if zones.len() == props.len() {
                    break;
                }
                let radius = rng.gen_range(RADIUS_RANGE.0..=RADIUS_RANGE.1);
                let center = [rng.gen_range(radius..1.0 - radius), rng.gen_range(radius..1.0 - radius)];
                let candidate = Zone {
                    center,
                    radius,
                    symbol: props[zones.len()],
                };
                if zones.iter().all(|z| separated(z, &candidate)) {
                    zones.push(candidate);
                }
            }
            if zones.len() == props.len() {
                return zones;
            }
        }
    }
}

fn separated(a: &Zone, b: &Zone) -> bool {
    let d = (a.center[0] - b.center[0]).hypot(a.center[1] - b.center[1]);
    d > a.radius + b.radius
}

fn disjoint(zones: &[Zone]) -> bool {
    zones
        .iter()
        .enumerate()
        .all(|(i, a)| zones[i + 1..].iter().all(|b| separated(a, b)))
}

/// Unit velocities for the discrete action set: north, south, east, west.
const DIRECTIONS: [[f64; 2]; 4] = [[0.0, 1.0], [0.0, -1.0], [1.0, 0.0], [-1.0, 0.0]];

impl Environment for FlatWorld {
    fn name(&self) -> &'static str {
        "flatworld"
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Tabular agents move at full speed in one of four directions.
    fn num_actions(&self) -> usize {
        DIRECTIONS.len()
    }

    fn observation_dim(&self) -> usize {
        let k = self.alphabet.len() - 1;
        2 + k * (3 + k)
    }

    fn reset<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        self.zones = match &self.fixed {
            Some(z) => z.clone(),
            None => self.sample_zones(rng),
        };
        loop {
            let p = [rng.gen::<f64>(), rng.gen::<f64>()];
            if self.zones.iter().all(|z| !z.contains(p)) {
                self.agent = p;
                break;
            }
        }
    }

    fn step(&mut self, action: usize) {
        let [dx, dy] = DIRECTIONS[action];
        self.step_velocity([dx * MAX_SPEED, dy * MAX_SPEED]);
    }

    /// Position, then per zone: offset to the centre, radius, symbol one-hot.
    fn observation(&self) -> Vec<f64> {
        let k = self.alphabet.len() - 1;
        let mut x = Vec::with_capacity(self.observation_dim());
        x.extend_from_slice(&self.agent);
        for z in &self.zones {
            x.push(z.center[0] - self.agent[0]);
            x.push(z.center[1] - self.agent[1]);
            x.push(z.radius);
            x.extend((0..k).map(|i| if i == z.symbol.index() { 1.0 } else { 0.0 }));
        }
        x
    }

    fn oracle_label(&self) -> Symbol {
        self.zones
            .iter()
            .find(|z| z.contains(self.agent))
            .map_or(self.alphabet.empty_symbol(), |z| z.symbol)
    }

    fn state_key(&self) -> Vec<u8> {
        let cell = |v: f64| ((v * KEY_LATTICE as f64) as usize).min(KEY_LATTICE - 1) as u8;
        vec![cell(self.agent[0]), cell(self.agent[1])]
    }
}
