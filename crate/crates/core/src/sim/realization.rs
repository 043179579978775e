//! Sampling of one network snapshot and the association/cell-activity pass.

use super::geometry::{dist_sq, wrap, Grid, Vec2};
use super::SimSettings;
use crate::params::{LinkMode, NetworkConfig, Tier};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

/// Independent random stream for one pipeline stage of one iteration.
/// Stages draw from separate streams so adding draws to one stage never
/// shifts another.
pub(crate) fn stage_rng(seed: u64, iteration: u64, phase: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(iteration.wrapping_mul(8).wrapping_add(phase));
    rng
}

pub(crate) const PHASE_SAMPLE: u64 = 0;
pub(crate) const PHASE_ASSOC: u64 = 1;
pub(crate) const PHASE_ACCESS: u64 = 2;
pub(crate) const PHASE_PROBE: u64 = 3;

#[derive(Debug, Clone, Copy)]
pub struct BaseStation {
    pub pos: Vec2,
    pub dl_mode: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct CellUser {
    pub pos: Vec2,
    /// Transmitter (UL) this timeslot, otherwise receiver (DL).
    pub transmitter: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct D2dPair {
    pub tx: Vec2,
    pub rx: Vec2,
    pub timer: f64,
    pub retained: bool,
}

/// One sampled snapshot of the spatial system.
#[derive(Debug, Clone)]
pub struct NetworkRealization {
    pub window: f64,
    pub toroidal: bool,
    pub mbs: Vec<BaseStation>,
    pub sap: Vec<BaseStation>,
    pub users: Vec<CellUser>,
    pub d2d: Vec<D2dPair>,
    /// Salts for the deterministic per-link sensing fades.
    pub salt_small: u64,
    pub salt_pair: u64,
}

fn poisson_count(rng: &mut ChaCha8Rng, mean: f64) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("positive mean").sample(rng) as usize
}

fn uniform_point(rng: &mut ChaCha8Rng, window: f64) -> Vec2 {
    Vec2::new(rng.gen::<f64>() * window, rng.gen::<f64>() * window)
}

/// Samples every point process of one snapshot: Poisson counts, uniform
/// placement, Bernoulli modes and roles, and the D2D link geometry.
/// Fully deterministic given (seed, iteration_index).
pub fn sample_realization(
    cfg: &NetworkConfig,
    settings: &SimSettings,
    iteration_index: u64,
) -> NetworkRealization {
    let mut rng = stage_rng(settings.seed, iteration_index, PHASE_SAMPLE);
    let window = settings.window;
    let area = window * window;

    let sample_stations = |density: f64, dl_prob: f64, rng: &mut ChaCha8Rng| {
        let count = poisson_count(rng, density * area);
        (0..count)
            .map(|_| BaseStation {
                pos: uniform_point(rng, window),
                dl_mode: rng.gen::<f64>() < dl_prob,
            })
            .collect::<Vec<_>>()
    };
    let mbs = sample_stations(cfg.lambda_m, cfg.q_dm, &mut rng);
    let sap = sample_stations(cfg.lambda_s, cfg.q_ds, &mut rng);

    let user_count = poisson_count(&mut rng, cfg.lambda_u * area);
    let mut users = Vec::new();
    let mut d2d = Vec::new();
    for _ in 0..user_count {
        let pos = uniform_point(&mut rng, window);
        if rng.gen::<f64>() < cfg.zeta {
            let angle = rng.gen::<f64>() * 2.0 * std::f64::consts::PI;
            let rx = Vec2::new(
                wrap(pos.x + cfg.r_d * angle.cos(), window),
                wrap(pos.y + cfg.r_d * angle.sin(), window),
            );
            d2d.push(D2dPair {
                tx: pos,
                rx,
                timer: rng.gen::<f64>(),
                retained: false,
            });
        } else {
            users.push(CellUser {
                pos,
                transmitter: rng.gen::<f64>() < cfg.mu,
            });
        }
    }
    let salt_small = rng.gen::<u64>();
    let salt_pair = rng.gen::<u64>();

    NetworkRealization {
        window,
        toroidal: settings.toroidal,
        mbs,
        sap,
        users,
        d2d,
        salt_small,
        salt_pair,
    }
}

/// Association outcome and the resulting cell-activity sets.
#[derive(Debug, Clone)]
pub struct Associations {
    /// Per cellular user: serving tier and station index within that tier's
    /// list, in the user's own role mode. `None` when the mode is empty.
    pub serving: Vec<Option<(Tier, u32)>>,
    /// Users associated per MBS/SAP in the station's own mode.
    pub load_mbs: Vec<u32>,
    pub load_sap: Vec<u32>,
    pub active: ActiveSets,
}

/// Positions of everything that transmits this timeslot.
#[derive(Debug, Clone, Default)]
pub struct ActiveSets {
    pub dl_mbs: Vec<Vec2>,
    pub dl_sap: Vec<Vec2>,
    /// The one served (transmitting) user of each active UL cell.
    pub tx_users_m: Vec<Vec2>,
    pub tx_users_s: Vec<Vec2>,
}

struct ModeIndex {
    grid: Grid,
    positions: Vec<Vec2>,
    station_index: Vec<u32>,
}

fn mode_index(stations: &[BaseStation], dl: bool, window: f64) -> ModeIndex {
    let mut positions = Vec::new();
    let mut station_index = Vec::new();
    for (i, s) in stations.iter().enumerate() {
        if s.dl_mode == dl {
            positions.push(s.pos);
            station_index.push(i as u32);
        }
    }
    ModeIndex {
        grid: Grid::build(&positions, window),
        positions,
        station_index,
    }
}

/// Biased max-power association of every cellular user with the nearest
/// station of each tier in the user's role mode, followed by the per-cell
/// choice of the one served user.
pub fn associate(
    real: &NetworkRealization,
    cfg: &NetworkConfig,
    settings: &SimSettings,
    iteration_index: u64,
) -> Associations {
    let mut rng = stage_rng(settings.seed, iteration_index, PHASE_ASSOC);
    let toroidal = real.toroidal;
    let half_alpha = cfg.alpha / 2.0;

    let idx_m_dl = mode_index(&real.mbs, true, real.window);
    let idx_m_ul = mode_index(&real.mbs, false, real.window);
    let idx_s_dl = mode_index(&real.sap, true, real.window);
    let idx_s_ul = mode_index(&real.sap, false, real.window);

    let mut serving = Vec::with_capacity(real.users.len());
    let mut load_mbs = vec![0u32; real.mbs.len()];
    let mut load_sap = vec![0u32; real.sap.len()];
    // Reservoir choice of the served user per station, uniform over its load.
    let mut chosen_mbs: Vec<Option<u32>> = vec![None; real.mbs.len()];
    let mut chosen_sap: Vec<Option<u32>> = vec![None; real.sap.len()];

    for (ui, user) in real.users.iter().enumerate() {
        let mode = if user.transmitter { LinkMode::Ul } else { LinkMode::Dl };
        let (macro_idx, small_idx) = match mode {
            LinkMode::Dl => (&idx_m_dl, &idx_s_dl),
            LinkMode::Ul => (&idx_m_ul, &idx_s_ul),
        };
        let near_m = macro_idx.grid.nearest(user.pos, &macro_idx.positions, toroidal);
        let near_s = small_idx.grid.nearest(user.pos, &small_idx.positions, toroidal);
        let w_m = cfg.assoc_power(Tier::Macro, mode) * cfg.bias(Tier::Macro, mode);
        let w_s = cfg.assoc_power(Tier::Small, mode) * cfg.bias(Tier::Small, mode);

        let pick = match (near_m, near_s) {
            (None, None) => None,
            (Some((i, _)), None) => Some((Tier::Macro, macro_idx.station_index[i as usize])),
            (None, Some((i, _))) => Some((Tier::Small, small_idx.station_index[i as usize])),
            (Some((im, dm2)), Some((is, ds2))) => {
                // Compare w_m/d_m^a with w_s/d_s^a without dividing.
                if w_m * ds2.powf(half_alpha) >= w_s * dm2.powf(half_alpha) {
                    Some((Tier::Macro, macro_idx.station_index[im as usize]))
                } else {
                    Some((Tier::Small, small_idx.station_index[is as usize]))
                }
            }
        };
        if let Some((tier, bs)) = pick {
            let (load, chosen) = match tier {
                Tier::Macro => (&mut load_mbs, &mut chosen_mbs),
                Tier::Small => (&mut load_sap, &mut chosen_sap),
            };
            load[bs as usize] += 1;
            let count = load[bs as usize];
            if count == 1 || rng.gen::<f64>() < 1.0 / count as f64 {
                chosen[bs as usize] = Some(ui as u32);
            }
        }
        serving.push(pick);
    }

    let mut active = ActiveSets::default();
    for (i, s) in real.mbs.iter().enumerate() {
        if load_mbs[i] == 0 {
            continue;
        }
        if s.dl_mode {
            active.dl_mbs.push(s.pos);
        } else {
            active.tx_users_m.push(real.users[chosen_mbs[i].unwrap() as usize].pos);
        }
    }
    for (i, s) in real.sap.iter().enumerate() {
        if load_sap[i] == 0 {
            continue;
        }
        if s.dl_mode {
            active.dl_sap.push(s.pos);
        } else {
            active.tx_users_s.push(real.users[chosen_sap[i].unwrap() as usize].pos);
        }
    }

    Associations {
        serving,
        load_mbs,
        load_sap,
        active,
    }
}

/// Distance from a user at `pos` to its serving station.
pub fn serving_distance(real: &NetworkRealization, pos: Vec2, tier: Tier, bs: u32) -> f64 {
    let station = match tier {
        Tier::Macro => real.mbs[bs as usize].pos,
        Tier::Small => real.sap[bs as usize].pos,
    };
    dist_sq(pos, station, real.window, real.toroidal).sqrt()
}
