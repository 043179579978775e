//! Monte Carlo estimators: coverage with confidence intervals, association
//! frequencies, CSMA retention fraction, per-cell load histograms, and
//! serving-distance samples. Iterations run in parallel; every random draw
//! derives from (seed, iteration index), so results do not depend on the
//! worker count.

use super::csma::{retained_positions, run_aloha, run_csma};
use super::geometry::{dist_sq, Vec2};
use super::measure::{measure_sir, ProbeContext, ProbeKind, SirSample, ALL_PROBES};
use super::realization::{
    associate, sample_realization, stage_rng, Associations, NetworkRealization, PHASE_ACCESS,
    PHASE_PROBE,
};
use super::SimSettings;
use crate::analytics::{CoverageReport, DerivedQuantities, Estimate, ReportSource};
use crate::params::{LinkMode, NetworkConfig, Tier};
use rayon::prelude::*;

/// Attempt budget per probe and iteration when serving-link draws land
/// outside the window.
const MAX_PROBE_ATTEMPTS: u32 = 10;

/// Fewer effective samples than this flags the estimate as unreliable.
pub const MIN_EFFECTIVE_SAMPLES: u64 = 100;

const Z_95: f64 = 1.959963984540054;

pub(crate) fn with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match workers {
        None => f(),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .expect("thread pool")
            .install(f),
    }
}

#[derive(Debug, Clone, Copy)]
enum AccessScheme {
    Csma,
    Aloha(f64),
}

struct Snapshot {
    real: NetworkRealization,
    assoc: Associations,
    retained: Vec<Vec2>,
}

fn build_snapshot(
    cfg: &NetworkConfig,
    settings: &SimSettings,
    iteration: u64,
    access: AccessScheme,
) -> Snapshot {
    let mut real = sample_realization(cfg, settings, iteration);
    let assoc = associate(&real, cfg, settings, iteration);
    match access {
        AccessScheme::Csma => run_csma(&mut real, &assoc.active, cfg),
        AccessScheme::Aloha(p) => {
            let mut rng = stage_rng(settings.seed, iteration, PHASE_ACCESS);
            run_aloha(&mut real, p, &mut rng);
        }
    }
    let retained = retained_positions(&real);
    Snapshot { real, assoc, retained }
}

/// Wilson 95% interval; the half-width covers both sides of the point
/// estimate.
pub fn wilson_interval(hits: u64, n: u64) -> Estimate {
    let nf = n as f64;
    let p = if n == 0 { f64::NAN } else { hits as f64 / nf };
    if n == 0 {
        return Estimate { value: p, ci_half: None };
    }
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = Z_95 * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    let lo = (center - half).max(0.0);
    let hi = (center + half).min(1.0);
    Estimate {
        value: p,
        ci_half: Some((hi - p).max(p - lo)),
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct ProbeTally {
    hits: u64,
    n: u64,
    discards: u64,
    not_applicable: bool,
}

impl ProbeTally {
    fn merge(self, other: ProbeTally) -> ProbeTally {
        ProbeTally {
            hits: self.hits + other.hits,
            n: self.n + other.n,
            discards: self.discards + other.discards,
            not_applicable: self.not_applicable || other.not_applicable,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct CoverageTally([ProbeTally; 5]);

impl CoverageTally {
    fn merge(self, other: CoverageTally) -> CoverageTally {
        let mut out = CoverageTally::default();
        for i in 0..5 {
            out.0[i] = self.0[i].merge(other.0[i]);
        }
        out
    }
}

fn probe_threshold(cfg: &NetworkConfig, kind: ProbeKind) -> f64 {
    match kind {
        ProbeKind::MacroDl => cfg.gamma_m_d,
        ProbeKind::MacroUl => cfg.gamma_m_u,
        ProbeKind::SmallDl => cfg.gamma_s_d,
        ProbeKind::SmallUl => cfg.gamma_s_u,
        ProbeKind::D2d => cfg.gamma_d,
    }
}

fn probe_all(
    real: &NetworkRealization,
    assoc: &Associations,
    retained: &[super::geometry::Vec2],
    cfg: &NetworkConfig,
    ctx: &ProbeContext,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> CoverageTally {
    let mut tally = CoverageTally::default();
    for (i, kind) in ALL_PROBES.iter().enumerate() {
        let slot = &mut tally.0[i];
        let mut attempts = 0;
        loop {
            match measure_sir(real, &assoc.active, retained, cfg, ctx, *kind, rng) {
                SirSample::NotApplicable => {
                    slot.not_applicable = true;
                    break;
                }
                SirSample::Discard => {
                    slot.discards += 1;
                    attempts += 1;
                    if attempts >= MAX_PROBE_ATTEMPTS {
                        break;
                    }
                }
                SirSample::Sir(s) => {
                    slot.n += 1;
                    if s > probe_threshold(cfg, *kind) {
                        slot.hits += 1;
                    }
                    break;
                }
            }
        }
    }
    tally
}

fn coverage_report(
    cfg: &NetworkConfig,
    settings: &SimSettings,
    access: AccessScheme,
) -> CoverageReport {
    let ctx = match access {
        AccessScheme::Csma => ProbeContext::new(cfg),
        AccessScheme::Aloha(_) => ProbeContext::without_exclusion_balls(cfg),
    };
    let tally = with_pool(settings.workers, || {
        (0..settings.iterations)
            .into_par_iter()
            .map(|it| {
                let snap = build_snapshot(cfg, settings, it, access);
                let mut rng = stage_rng(settings.seed, it, PHASE_PROBE);
                probe_all(&snap.real, &snap.assoc, &snap.retained, cfg, &ctx, &mut rng)
            })
            .reduce(CoverageTally::default, CoverageTally::merge)
    });
    tally_to_report(cfg, tally)
}

fn tally_to_report(cfg: &NetworkConfig, tally: CoverageTally) -> CoverageReport {
    let mut warnings = Vec::new();
    let entry = |t: &ProbeTally, name: &str, warnings: &mut Vec<String>| -> Option<Estimate> {
        if t.not_applicable || t.n == 0 {
            if !t.not_applicable && t.n == 0 {
                warnings.push(format!("probe {name}: no effective samples"));
            }
            return None;
        }
        if t.n < MIN_EFFECTIVE_SAMPLES {
            warnings.push(format!(
                "probe {name}: insufficient effective samples ({} < {MIN_EFFECTIVE_SAMPLES})",
                t.n
            ));
        }
        Some(wilson_interval(t.hits, t.n))
    };
    let p_m_d = entry(&tally.0[0], "macro-dl", &mut warnings);
    let p_m_u = entry(&tally.0[1], "macro-ul", &mut warnings);
    let p_s_d = entry(&tally.0[2], "small-dl", &mut warnings);
    let p_s_u = entry(&tally.0[3], "small-ul", &mut warnings);
    let p_d2d = entry(&tally.0[4], "d2d", &mut warnings);

    // Overall coverage mixes the per-tier estimates with the analytic
    // association weights; the half-widths combine conservatively.
    let dq = DerivedQuantities::fully_loaded_no_d2d(cfg); // association only
    let combine = |a_m: f64, a_s: f64, m: &Option<Estimate>, s: &Option<Estimate>| -> Option<Estimate> {
        if a_m + a_s == 0.0 {
            return None;
        }
        let mut value = 0.0;
        let mut half = 0.0;
        if a_m > 0.0 {
            let e = m.as_ref()?;
            value += a_m * e.value;
            half += a_m * e.ci_half.unwrap_or(0.0);
        }
        if a_s > 0.0 {
            let e = s.as_ref()?;
            value += a_s * e.value;
            half += a_s * e.ci_half.unwrap_or(0.0);
        }
        Some(Estimate { value, ci_half: Some(half) })
    };
    let overall_d = combine(dq.a_d_m, dq.a_d_s, &p_m_d, &p_s_d);
    let overall_u = combine(dq.a_u_m, dq.a_u_s, &p_m_u, &p_s_u);

    let total_discards: u64 = tally.0.iter().map(|t| t.discards).sum();
    if total_discards > 0 {
        warnings.push(format!("{total_discards} serving-link draws discarded"));
    }

    CoverageReport {
        source: ReportSource::Simulated,
        p_m_d,
        p_m_u,
        p_s_d,
        p_s_u,
        p_d2d,
        overall_d,
        overall_u,
        warnings,
    }
}

/// Empirical coverage of every probe with Wilson 95% intervals under the
/// CSMA access scheme.
pub fn estimate_coverage(cfg: &NetworkConfig, settings: &SimSettings) -> CoverageReport {
    coverage_report(cfg, settings, AccessScheme::Csma)
}

/// CSMA and matched-ALOHA coverage over the same snapshots: sampling and
/// association are shared per iteration, so the comparison sees identical
/// interferer geometry and only the access scheme differs.
pub fn estimate_access_comparison(
    cfg: &NetworkConfig,
    settings: &SimSettings,
    p_access: f64,
) -> (CoverageReport, CoverageReport) {
    let ctx_csma = ProbeContext::new(cfg);
    let ctx_aloha = ProbeContext::without_exclusion_balls(cfg);
    let p = p_access.clamp(0.0, 1.0);
    let (csma, aloha) = with_pool(settings.workers, || {
        (0..settings.iterations)
            .into_par_iter()
            .map(|it| {
                let mut real = sample_realization(cfg, settings, it);
                let assoc = associate(&real, cfg, settings, it);

                run_csma(&mut real, &assoc.active, cfg);
                let retained = retained_positions(&real);
                let mut rng = stage_rng(settings.seed, it, PHASE_PROBE);
                let t_csma =
                    probe_all(&real, &assoc, &retained, cfg, &ctx_csma, &mut rng);

                let mut rng_access = stage_rng(settings.seed, it, PHASE_ACCESS);
                run_aloha(&mut real, p, &mut rng_access);
                let retained = retained_positions(&real);
                let mut rng = stage_rng(settings.seed, it, PHASE_PROBE);
                let t_aloha =
                    probe_all(&real, &assoc, &retained, cfg, &ctx_aloha, &mut rng);
                (t_csma, t_aloha)
            })
            .reduce(
                || (CoverageTally::default(), CoverageTally::default()),
                |a, b| (a.0.merge(b.0), a.1.merge(b.1)),
            )
    });
    (
        tally_to_report(cfg, csma),
        tally_to_report(cfg, aloha),
    )
}

/// Coverage when D2D transmitters use ALOHA with access probability
/// `p_access`: independent thinning, no exclusion regions anywhere.
pub fn estimate_aloha_coverage(
    cfg: &NetworkConfig,
    settings: &SimSettings,
    p_access: f64,
) -> CoverageReport {
    coverage_report(cfg, settings, AccessScheme::Aloha(p_access.clamp(0.0, 1.0)))
}

/// Retention outcome of the literal sensing rule, aggregated over
/// iterations.
#[derive(Debug, Clone, Copy, Default)]
pub struct RetentionStats {
    pub retained: u64,
    pub potential: u64,
}

impl RetentionStats {
    pub fn fraction(&self) -> f64 {
        if self.potential == 0 {
            f64::NAN
        } else {
            self.retained as f64 / self.potential as f64
        }
    }
}

pub fn estimate_retention(cfg: &NetworkConfig, settings: &SimSettings) -> RetentionStats {
    with_pool(settings.workers, || {
        (0..settings.iterations)
            .into_par_iter()
            .map(|it| {
                let snap = build_snapshot(cfg, settings, it, AccessScheme::Csma);
                RetentionStats {
                    retained: snap.retained.len() as u64,
                    potential: snap.real.d2d.len() as u64,
                }
            })
            .reduce(RetentionStats::default, |a, b| RetentionStats {
                retained: a.retained + b.retained,
                potential: a.potential + b.potential,
            })
    })
}

/// Empirical association counts of cellular users, by role.
#[derive(Debug, Clone, Copy, Default)]
pub struct AssociationStats {
    pub dl_macro: u64,
    pub dl_small: u64,
    pub dl_unassociated: u64,
    pub ul_macro: u64,
    pub ul_small: u64,
    pub ul_unassociated: u64,
}

impl AssociationStats {
    /// Fractions (macro, small) among associated DL users.
    pub fn dl_fractions(&self) -> (f64, f64) {
        let n = (self.dl_macro + self.dl_small) as f64;
        (self.dl_macro as f64 / n, self.dl_small as f64 / n)
    }

    pub fn ul_fractions(&self) -> (f64, f64) {
        let n = (self.ul_macro + self.ul_small) as f64;
        (self.ul_macro as f64 / n, self.ul_small as f64 / n)
    }
}

pub fn estimate_association(cfg: &NetworkConfig, settings: &SimSettings) -> AssociationStats {
    with_pool(settings.workers, || {
        (0..settings.iterations)
            .into_par_iter()
            .map(|it| {
                let real = sample_realization(cfg, settings, it);
                let assoc = associate(&real, cfg, settings, it);
                let mut s = AssociationStats::default();
                for (user, pick) in real.users.iter().zip(&assoc.serving) {
                    match (user.transmitter, pick) {
                        (false, Some((Tier::Macro, _))) => s.dl_macro += 1,
                        (false, Some((Tier::Small, _))) => s.dl_small += 1,
                        (false, None) => s.dl_unassociated += 1,
                        (true, Some((Tier::Macro, _))) => s.ul_macro += 1,
                        (true, Some((Tier::Small, _))) => s.ul_small += 1,
                        (true, None) => s.ul_unassociated += 1,
                    }
                }
                s
            })
            .reduce(AssociationStats::default, |a, b| AssociationStats {
                dl_macro: a.dl_macro + b.dl_macro,
                dl_small: a.dl_small + b.dl_small,
                dl_unassociated: a.dl_unassociated + b.dl_unassociated,
                ul_macro: a.ul_macro + b.ul_macro,
                ul_small: a.ul_small + b.ul_small,
                ul_unassociated: a.ul_unassociated + b.ul_unassociated,
            })
    })
}

/// Users-per-cell distribution over every in-window cell of one tier/mode.
#[derive(Debug, Clone, Default)]
pub struct LoadHistogram {
    pub counts: Vec<u64>,
    pub cells: u64,
}

impl LoadHistogram {
    fn add(&mut self, n: usize) {
        if self.counts.len() <= n {
            self.counts.resize(n + 1, 0);
        }
        self.counts[n] += 1;
        self.cells += 1;
    }

    fn merge(mut self, other: LoadHistogram) -> LoadHistogram {
        if self.counts.len() < other.counts.len() {
            self.counts.resize(other.counts.len(), 0);
        }
        for (i, c) in other.counts.iter().enumerate() {
            self.counts[i] += c;
        }
        self.cells += other.cells;
        self
    }

    pub fn fraction(&self, n: usize) -> f64 {
        if self.cells == 0 {
            f64::NAN
        } else {
            self.counts.get(n).copied().unwrap_or(0) as f64 / self.cells as f64
        }
    }

    pub fn void_fraction(&self) -> f64 {
        self.fraction(0)
    }
}

pub fn estimate_load_histogram(
    cfg: &NetworkConfig,
    settings: &SimSettings,
    tier: Tier,
    mode: LinkMode,
) -> LoadHistogram {
    let want_dl = mode == LinkMode::Dl;
    with_pool(settings.workers, || {
        (0..settings.iterations)
            .into_par_iter()
            .map(|it| {
                let real = sample_realization(cfg, settings, it);
                let assoc = associate(&real, cfg, settings, it);
                let (stations, loads) = match tier {
                    Tier::Macro => (&real.mbs, &assoc.load_mbs),
                    Tier::Small => (&real.sap, &assoc.load_sap),
                };
                let mut h = LoadHistogram::default();
                for (s, load) in stations.iter().zip(loads) {
                    if s.dl_mode == want_dl {
                        h.add(*load as usize);
                    }
                }
                h
            })
            .reduce(LoadHistogram::default, LoadHistogram::merge)
    })
}

/// Serving distance of a probe user at the window center, one sample per
/// iteration, conditioned on associating with the given tier. Validates the
/// nearest-distance model with real (not synthetic) distances.
pub fn collect_serving_distances(
    cfg: &NetworkConfig,
    settings: &SimSettings,
    tier: Tier,
    mode: LinkMode,
) -> Vec<f64> {
    let samples: Vec<Option<f64>> = with_pool(settings.workers, || {
        (0..settings.iterations)
            .into_par_iter()
            .map(|it| {
                let real = sample_realization(cfg, settings, it);
                let center = Vec2::new(real.window / 2.0, real.window / 2.0);
                let want_dl = mode == LinkMode::Dl;
                let nearest = |stations: &Vec<super::realization::BaseStation>| {
                    stations
                        .iter()
                        .filter(|s| s.dl_mode == want_dl)
                        .map(|s| dist_sq(center, s.pos, real.window, real.toroidal))
                        .min_by(f64::total_cmp)
                };
                let d_m = nearest(&real.mbs);
                let d_s = nearest(&real.sap);
                let w_m = cfg.assoc_power(Tier::Macro, mode) * cfg.bias(Tier::Macro, mode);
                let w_s = cfg.assoc_power(Tier::Small, mode) * cfg.bias(Tier::Small, mode);
                let half_alpha = cfg.alpha / 2.0;
                let winner = match (d_m, d_s) {
                    (None, None) => None,
                    (Some(d), None) => Some((Tier::Macro, d)),
                    (None, Some(d)) => Some((Tier::Small, d)),
                    (Some(dm), Some(ds)) => {
                        if w_m * ds.powf(half_alpha) >= w_s * dm.powf(half_alpha) {
                            Some((Tier::Macro, dm))
                        } else {
                            Some((Tier::Small, ds))
                        }
                    }
                };
                match winner {
                    Some((t, d2)) if t == tier => Some(d2.sqrt()),
                    _ => None,
                }
            })
            .collect()
    });
    samples.into_iter().flatten().collect()
}
