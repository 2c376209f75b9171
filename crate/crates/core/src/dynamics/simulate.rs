use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::state::{packed_config, ParticleConfig};
use crate::error::{Error, Result};

pub const RNG_NAME: &str = "ChaCha8Rng/rand_chacha-0.9";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MoveOutcome {
    /// Direction actually taken; a reflected left attempt reports `Right`.
    pub direction: Direction,
    /// Number of particles pushed besides the one that moved.
    pub extent: usize,
    pub reflected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub time: f64,
    pub m: usize,
    pub k: usize,
    pub direction: Direction,
    pub extent: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EventLog {
    pub events: Vec<Event>,
}

impl EventLog {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Replays the log from the packed configuration on `levels` rows.
    pub fn replay(&self, levels: usize) -> Result<ParticleConfig> {
        let mut cfg = packed_config(levels);
        let mut last = f64::NEG_INFINITY;
        for (i, e) in self.events.iter().enumerate() {
            if !(e.time > last) {
                return Err(Error::InvalidParameter(format!("event {i}: times not strictly increasing")));
            }
            last = e.time;
            match cfg.try_move(e.m, e.k, e.direction) {
                Some(o) if o.direction == e.direction && o.extent == e.extent => {}
                _ => return Err(Error::InvalidParameter(format!("event {i} does not replay"))),
            }
        }
        Ok(cfg)
    }
}

impl ParticleConfig {
    /// Attempts a jump of y^m_k, including wall reflection, blocking by row
    /// m - 1 and pushing of the rows above. Returns None if blocked.
    pub fn try_move(&mut self, m: usize, k: usize, dir: Direction) -> Option<MoveOutcome> {
        let y = self.get(m, k)?;
        let (dir, reflected) = match dir {
            Direction::Left if y == 0 => (Direction::Right, true),
            d => (d, false),
        };
        let extent = match dir {
            Direction::Right => {
                if m >= 2 && self.get(m - 1, k - 1) == Some(y + 1) {
                    return None;
                }
                let mut r = 0;
                while self.get(m + r + 1, k) == Some(y + r as i64 + 1) {
                    r += 1;
                }
                for i in 0..=r {
                    self.set(m + i, k, y + i as i64 + 2);
                }
                r
            }
            Direction::Left => {
                if m >= 2 && self.get(m - 1, k) == Some(y - 1) {
                    return None;
                }
                let mut l = 0;
                while self.get(m + l + 1, k + l + 1) == Some(y - l as i64 - 1) {
                    l += 1;
                }
                for j in 0..=l {
                    self.set(m + j, k + j, y - j as i64 - 2);
                }
                l
            }
        };
        debug_assert!(
            self.validate_rows(m.saturating_sub(1), m + extent + 1).is_ok(),
            "interlacing broken by move of y^{m}_{k}"
        );
        Some(MoveOutcome { direction: dir, extent, reflected })
    }
}

/// Generator for replica `replica` of a run seeded with `seed`: one ChaCha8
/// key per seed, one stream per replica.
pub fn replica_rng(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}

pub fn simulate(t: f64, levels: usize, seed: u64) -> Result<(ParticleConfig, EventLog)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    simulate_with(t, levels, &mut rng, true)
}

/// Runs rows 1..=levels from the packed state up to time t. Every particle
/// rings at total rate 1 (two rate-1/2 clocks), so the superposed clock has
/// rate equal to the particle count and each ring picks a particle and a
/// direction uniformly. Rows never react to the rows above them, so the
/// truncation at `levels` is exact.
pub fn simulate_with<R: Rng>(t: f64, levels: usize, rng: &mut R, record: bool) -> Result<(ParticleConfig, EventLog)> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("time {t} must be finite and >= 0")));
    }
    if levels == 0 {
        return Err(Error::InvalidParameter("at least one row is required".into()));
    }
    let mut cfg = packed_config(levels);
    let slots: Vec<(usize, usize)> = (1..=levels)
        .flat_map(|m| (1..=m.div_ceil(2)).map(move |k| (m, k)))
        .collect();
    let rate = slots.len() as f64;
    let mut log = EventLog::default();
    let mut time = 0.0;
    loop {
        let u: f64 = rng.random();
        time += -(1.0 - u).ln() / rate;
        if time > t {
            break;
        }
        let (m, k) = slots[rng.random_range(0..slots.len())];
        let dir = if rng.random::<bool>() { Direction::Right } else { Direction::Left };
        if let Some(o) = cfg.try_move(m, k, dir) {
            if record {
                log.events.push(Event { time, m, k, direction: o.direction, extent: o.extent });
            }
        }
    }
    Ok((cfg, log))
}
