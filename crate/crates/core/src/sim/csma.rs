//! Literal CSMA retention: each potential D2D transmitter senses every
//! active small-cell transmitter against the protection threshold, then
//! contends with every other potential D2D transmitter through the
//! timer/contention-threshold rule, with a fresh exponential fade per
//! sensing link.

use super::geometry::{Grid, Vec2};
use super::realization::{ActiveSets, NetworkRealization};
use crate::params::NetworkConfig;

/// Largest value the deterministic fade generator can produce:
/// -ln(2^-53), since the underlying uniform lives on [0, 1) with 53 bits.
/// Links where even this fade cannot break a threshold are skipped exactly.
pub const MAX_SENSING_FADE: f64 = 36.7368005696771;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic unit-mean exponential fade of the sensing link from point
/// `a` to point `b` under the given salt. Replayable, so retention decisions
/// can be re-derived exactly.
pub fn sensing_fade(salt: u64, a: u32, b: u32) -> f64 {
    let key = salt ^ (((a as u64) << 32) | (b as u64 ^ 0x5151_5151));
    let z = splitmix64(splitmix64(key));
    let u = (z >> 11) as f64 * (1.0 / 9007199254740992.0);
    -(1.0 - u).ln()
}

/// Distance beyond which no fade in the generator's range can push the
/// received power over the threshold.
fn sensing_cutoff(power: f64, threshold: f64, alpha: f64) -> f64 {
    if threshold == 0.0 {
        f64::INFINITY
    } else if threshold.is_infinite() {
        0.0
    } else {
        (MAX_SENSING_FADE * power / threshold).powf(1.0 / alpha)
    }
}

/// Runs the retention rule over every potential D2D transmitter and sets the
/// `retained` flags. Requires the association pass (active small-cell
/// transmitters are the sensed set).
pub fn run_csma(real: &mut NetworkRealization, active: &ActiveSets, cfg: &NetworkConfig) {
    let window = real.window;
    let toroidal = real.toroidal;
    let alpha = cfg.alpha;

    // Active small-band transmitters: DL SAPs plus transmitting small-cell
    // users.
    let mut small_tx: Vec<Vec2> = Vec::with_capacity(active.dl_sap.len() + active.tx_users_s.len());
    small_tx.extend_from_slice(&active.dl_sap);
    small_tx.extend_from_slice(&active.tx_users_s);
    let small_grid = Grid::build(&small_tx, window);

    let d2d_pos: Vec<Vec2> = real.d2d.iter().map(|p| p.tx).collect();
    let d2d_grid = Grid::build(&d2d_pos, window);

    // A cutoff of twice the window covers the largest distance either metric
    // can produce.
    let cut_s = sensing_cutoff(cfg.q_d, cfg.rho_s, alpha).min(window * 2.0);
    let cut_d = sensing_cutoff(cfg.q_d, cfg.rho_d, alpha).min(window * 2.0);

    for i in 0..real.d2d.len() {
        let me = real.d2d[i];
        let mut retained = true;

        // Would-be interference on every active small-cell transmitter.
        small_grid.for_each_within(me.tx, cut_s, &small_tx, toroidal, |j, d2| {
            if !retained {
                return;
            }
            let h = sensing_fade(real.salt_small, i as u32, j);
            if cfg.q_d * h / d2.powf(alpha / 2.0) >= cfg.rho_s {
                retained = false;
            }
        });
        if !retained {
            real.d2d[i].retained = false;
            continue;
        }

        // Timer contention against every other potential transmitter; exact
        // timer ties break by index.
        d2d_grid.for_each_within(me.tx, cut_d, &d2d_pos, toroidal, |k, d2| {
            if !retained || k as usize == i {
                return;
            }
            let other = &real.d2d[k as usize];
            let i_first = me.timer < other.timer
                || (me.timer == other.timer && i < k as usize);
            if i_first {
                return;
            }
            let h = sensing_fade(real.salt_pair, i as u32, k);
            if cfg.q_d * h / d2.powf(alpha / 2.0) >= cfg.rho_d {
                retained = false;
            }
        });
        real.d2d[i].retained = retained;
    }
}

/// ALOHA access: each potential transmitter independently activates with
/// probability `p_access`, no sensing anywhere.
pub fn run_aloha(real: &mut NetworkRealization, p_access: f64, rng: &mut impl rand::Rng) {
    for pair in &mut real.d2d {
        pair.retained = rng.gen::<f64>() < p_access;
    }
}

/// Positions of the retained D2D transmitters.
pub fn retained_positions(real: &NetworkRealization) -> Vec<Vec2> {
    real.d2d.iter().filter(|p| p.retained).map(|p| p.tx).collect()
}
