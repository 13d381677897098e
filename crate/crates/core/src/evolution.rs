//! Genetic algorithm over genomes: two-game matches, the three fitness
//! schemes (direct, round-robin, implicit fitness sharing), linear fitness
//! scaling, and generation turnover with single elitism.
//!
//! Each match gets its own stream keyed by `(master_seed, generation,
//! match ordinal)` and results are summed in ordinal order, so the outcome
//! is the same for any [`Executor`].

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::board::{BoardState, Side};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::genome::{crossover, mutate_in_place, Genome};
use crate::network::Network;
use crate::players::{heuristic, play_game, Player};
use crate::rng::{Domain, RngStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Matches against a fixed heuristic player of the given level.
    Direct {
        opponent: u8,
    },
    RoundRobin,
    ImplicitFitnessSharing,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Direct { opponent } => write!(f, "direct:{opponent}"),
            Variant::RoundRobin => f.write_str("roundrobin"),
            Variant::ImplicitFitnessSharing => f.write_str("ifs"),
        }
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "roundrobin" => Ok(Variant::RoundRobin),
            "ifs" => Ok(Variant::ImplicitFitnessSharing),
            _ => {
                let level = s
                    .strip_prefix("direct:")
                    .and_then(|l| l.parse::<u8>().ok())
                    .filter(|&l| l <= 2)
                    .ok_or_else(|| Error::Config(format!("unknown variant {s:?}")))?;
                Ok(Variant::Direct { opponent: level })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionConfig {
    pub population_size: usize,
    pub crossover_prob: f64,
    pub mutation_prob: f64,
    pub variant: Variant,
    pub direct_matches_per_individual: usize,
    pub ifs_antigen_fraction: f64,
    pub ifs_antibody_fraction: f64,
    pub ifs_pool_points: f64,
    pub ifs_shares_win_win: u32,
    pub ifs_shares_win_loss: u32,
    pub fitness_floor: f64,
    pub scaling_best_share: f64,
    pub generations: usize,
    pub snapshot_interval: usize,
    pub master_seed: u64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            population_size: 100,
            crossover_prob: 0.6,
            mutation_prob: 0.005,
            variant: Variant::Direct { opponent: 0 },
            direct_matches_per_individual: 10,
            ifs_antigen_fraction: 0.25,
            ifs_antibody_fraction: 0.33,
            ifs_pool_points: 33.0,
            ifs_shares_win_win: 4,
            ifs_shares_win_loss: 1,
            fitness_floor: 1e-6,
            scaling_best_share: 0.10,
            generations: 100,
            snapshot_interval: 10,
            master_seed: 0,
        }
    }
}

fn fraction_count(fraction: f64, n: usize) -> usize {
    // small epsilon so 0.29 * 100 counts as 29
    libm::floor(fraction * n as f64 + 1e-9) as usize
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        for (name, p) in [
            ("crossover_prob", self.crossover_prob),
            ("mutation_prob", self.mutation_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        for (name, f) in [
            ("ifs_antigen_fraction", self.ifs_antigen_fraction),
            ("ifs_antibody_fraction", self.ifs_antibody_fraction),
            ("scaling_best_share", self.scaling_best_share),
        ] {
            if !(f > 0.0 && f <= 1.0) {
                return bad(format!("{name} must lie in (0, 1], got {f}"));
            }
        }
        for (name, c) in [
            ("population_size", self.population_size),
            (
                "direct_matches_per_individual",
                self.direct_matches_per_individual,
            ),
            ("generations", self.generations),
            ("snapshot_interval", self.snapshot_interval),
        ] {
            if c == 0 {
                return bad(format!("{name} must be positive"));
            }
        }
        if !(self.fitness_floor >= 0.0 && self.fitness_floor.is_finite()) {
            return bad(format!(
                "fitness_floor must be non-negative, got {}",
                self.fitness_floor
            ));
        }
        if !(self.ifs_pool_points > 0.0 && self.ifs_pool_points.is_finite()) {
            return bad(format!(
                "ifs_pool_points must be positive, got {}",
                self.ifs_pool_points
            ));
        }
        match self.variant {
            Variant::Direct { .. } => {
                if self.scaling_multiple() <= 1.0 {
                    return bad(format!(
                        "scaling_best_share * population_size must exceed 1, got {}",
                        self.scaling_multiple()
                    ));
                }
                if self.fitness_floor <= 0.0 {
                    return bad("fitness_floor must be positive for direct evolution".into());
                }
            }
            Variant::RoundRobin => {
                if self.population_size < 2 {
                    return bad("round-robin needs at least 2 individuals".into());
                }
            }
            Variant::ImplicitFitnessSharing => {
                if self.population_size < 4 {
                    return bad("implicit fitness sharing needs at least 4 individuals".into());
                }
                if self.antigen_count() == 0 || self.antibody_count() == 0 {
                    return bad("antigen and antibody counts must be positive".into());
                }
                if self.antibody_count() > self.population_size - 1 {
                    return bad("too many antibodies per antigen".into());
                }
                if self.fitness_floor <= 0.0 {
                    return bad("fitness_floor must be positive for fitness sharing".into());
                }
            }
        }
        Ok(())
    }

    /// Expected copies of the best individual under proportional selection.
    pub fn scaling_multiple(&self) -> f64 {
        self.scaling_best_share * self.population_size as f64
    }

    pub fn antigen_count(&self) -> usize {
        fraction_count(self.ifs_antigen_fraction, self.population_size)
    }

    pub fn antibody_count(&self) -> usize {
        fraction_count(self.ifs_antibody_fraction, self.population_size)
    }

    /// Games one generation's fitness evaluation consumes.
    pub fn games_per_generation(&self) -> u64 {
        let n = self.population_size as u64;
        let matches = match self.variant {
            Variant::Direct { .. } => n * self.direct_matches_per_individual as u64,
            Variant::RoundRobin => n * (n - 1) / 2,
            Variant::ImplicitFitnessSharing => {
                (self.antigen_count() * self.antibody_count()) as u64
            }
        };
        2 * matches
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchResult {
    pub points: [f64; 2],
    pub games_won: [u8; 2],
}

impl MatchResult {
    /// Points from games won: 2 wins one point, 1 win half a point. A drawn
    /// game (impossible on odd boards) counts for neither side.
    pub fn from_wins(a: u8, b: u8) -> Self {
        let pts = |w: u8, l: u8| match w.cmp(&l) {
            core::cmp::Ordering::Greater => 1.0,
            core::cmp::Ordering::Equal => 0.5,
            core::cmp::Ordering::Less => 0.0,
        };
        Self {
            points: [pts(a, b), pts(b, a)],
            games_won: [a, b],
        }
    }
}

/// Two games on fresh 3x3 boards; `a` moves first in the first game, `b` in
/// the second.
pub fn play_match(a: &dyn Player, b: &dyn Player, rng: &mut RngStream) -> MatchResult {
    let board = BoardState::empty(crate::board::BoardGeometry::standard());
    let mut wins = [0u8; 2];
    let g1 = play_game(a, b, board, rng).result();
    match g1.winner() {
        Some(Side::P1) => wins[0] += 1,
        Some(Side::P2) => wins[1] += 1,
        None => {}
    }
    let g2 = play_game(b, a, board, rng).result();
    match g2.winner() {
        Some(Side::P1) => wins[1] += 1,
        Some(Side::P2) => wins[0] += 1,
        None => {}
    }
    MatchResult::from_wins(wins[0], wins[1])
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitnessVector {
    pub raw: Vec<f64>,
    /// Values used for selection: linearly scaled under direct evolution,
    /// identical to `raw` otherwise.
    pub scaled: Vec<f64>,
    pub games_consumed: u64,
}

fn match_rng(cfg: &EvolutionConfig, generation: usize, ordinal: usize) -> RngStream {
    RngStream::derived(
        cfg.master_seed,
        Domain::Match,
        &[generation as u64, ordinal as u64],
    )
}

/// Direct fitness with a pluggable match: `play(i, m, rng)` is individual
/// `i`'s `m`-th match, from the individual's point of view.
pub fn fitness_direct_with<E, F>(
    n: usize,
    cfg: &EvolutionConfig,
    generation: usize,
    exec: &E,
    play: F,
) -> Result<FitnessVector>
where
    E: Executor,
    F: Fn(usize, usize, &mut RngStream) -> MatchResult + Sync + Send,
{
    let per = cfg.direct_matches_per_individual;
    let results = exec.map(n * per, |ord| {
        let mut rng = match_rng(cfg, generation, ord);
        play(ord / per, ord % per, &mut rng)
    });
    let mut raw = alloc::vec![0.0; n];
    for (ord, r) in results.iter().enumerate() {
        raw[ord / per] += r.points[0];
    }
    for f in raw.iter_mut() {
        *f += cfg.fitness_floor;
    }
    let scaled = linear_scale(&raw, cfg.scaling_multiple())?;
    Ok(FitnessVector {
        raw,
        scaled,
        games_consumed: 2 * results.len() as u64,
    })
}

pub fn fitness_direct<P, E>(
    pop: &[P],
    opponent: &dyn Player,
    cfg: &EvolutionConfig,
    generation: usize,
    exec: &E,
) -> Result<FitnessVector>
where
    P: Player,
    E: Executor,
{
    fitness_direct_with(pop.len(), cfg, generation, exec, |i, _, rng| {
        play_match(&pop[i], opponent, rng)
    })
}

/// All pairs `(i, j)` with `i < j` in lexicographic order.
pub fn round_robin_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect()
}

pub fn fitness_roundrobin_with<E, F>(
    n: usize,
    cfg: &EvolutionConfig,
    generation: usize,
    exec: &E,
    play: F,
) -> FitnessVector
where
    E: Executor,
    F: Fn(usize, usize, &mut RngStream) -> MatchResult + Sync + Send,
{
    let pairs = round_robin_pairs(n);
    let results = exec.map(pairs.len(), |ord| {
        let (i, j) = pairs[ord];
        let mut rng = match_rng(cfg, generation, ord);
        play(i, j, &mut rng)
    });
    let mut raw = alloc::vec![0.0; n];
    for (&(i, j), r) in pairs.iter().zip(&results) {
        raw[i] += r.points[0];
        raw[j] += r.points[1];
    }
    FitnessVector {
        scaled: raw.clone(),
        raw,
        games_consumed: 2 * results.len() as u64,
    }
}

pub fn fitness_roundrobin<P: Player, E: Executor>(
    pop: &[P],
    cfg: &EvolutionConfig,
    generation: usize,
    exec: &E,
) -> FitnessVector {
    fitness_roundrobin_with(pop.len(), cfg, generation, exec, |i, j, rng| {
        play_match(&pop[i], &pop[j], rng)
    })
}

/// Antigens and, for each, its antibodies (never the antigen itself).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharingDraw {
    pub antigens: Vec<usize>,
    pub antibodies: Vec<Vec<usize>>,
}

pub fn draw_sharing(
    n: usize,
    antigens: usize,
    antibodies: usize,
    rng: &mut RngStream,
) -> SharingDraw {
    let chosen = rand::seq::index::sample(rng, n, antigens).into_vec();
    let bodies = chosen
        .iter()
        .map(|&a| {
            rand::seq::index::sample(rng, n - 1, antibodies)
                .into_iter()
                .map(|i| if i >= a { i + 1 } else { i })
                .collect()
        })
        .collect();
    SharingDraw {
        antigens: chosen,
        antibodies: bodies,
    }
}

/// Splits `pool` among antibodies in proportion to shares earned against
/// one antigen. Returns `(antibody, points)` for every antibody, zero when
/// nobody scored.
pub fn share_pool(
    outcomes: &[(usize, MatchResult)],
    pool: f64,
    win_win: u32,
    win_loss: u32,
) -> Vec<(usize, f64)> {
    let shares: Vec<u32> = outcomes
        .iter()
        .map(|(_, r)| match r.games_won[0] {
            2 => win_win,
            1 => win_loss,
            _ => 0,
        })
        .collect();
    let total: u32 = shares.iter().sum();
    outcomes
        .iter()
        .zip(&shares)
        .map(|(&(i, _), &s)| {
            let pts = if total == 0 {
                0.0
            } else {
                pool * s as f64 / total as f64
            };
            (i, pts)
        })
        .collect()
}

/// Implicit fitness sharing with a pluggable match: `play(antibody, antigen,
/// rng)` reports from the antibody's point of view.
pub fn fitness_ifs_with<E, F>(
    n: usize,
    cfg: &EvolutionConfig,
    generation: usize,
    exec: &E,
    play: F,
) -> FitnessVector
where
    E: Executor,
    F: Fn(usize, usize, &mut RngStream) -> MatchResult + Sync + Send,
{
    let mut sampler = RngStream::derived(cfg.master_seed, Domain::Sampling, &[generation as u64]);
    let draw = draw_sharing(n, cfg.antigen_count(), cfg.antibody_count(), &mut sampler);
    let jobs: Vec<(usize, usize)> = draw
        .antigens
        .iter()
        .zip(&draw.antibodies)
        .flat_map(|(&ag, abs)| abs.iter().map(move |&ab| (ab, ag)))
        .collect();
    let results = exec.map(jobs.len(), |ord| {
        let (ab, ag) = jobs[ord];
        let mut rng = match_rng(cfg, generation, ord);
        play(ab, ag, &mut rng)
    });
    let mut raw = alloc::vec![0.0; n];
    let per = cfg.antibody_count();
    for chunk in jobs.chunks(per).zip(results.chunks(per)) {
        let outcomes: Vec<(usize, MatchResult)> = chunk
            .0
            .iter()
            .map(|&(ab, _)| ab)
            .zip(chunk.1.iter().copied())
            .collect();
        for (i, pts) in share_pool(
            &outcomes,
            cfg.ifs_pool_points,
            cfg.ifs_shares_win_win,
            cfg.ifs_shares_win_loss,
        ) {
            raw[i] += pts;
        }
    }
    for f in raw.iter_mut() {
        *f += cfg.fitness_floor;
    }
    FitnessVector {
        scaled: raw.clone(),
        raw,
        games_consumed: 2 * results.len() as u64,
    }
}

pub fn fitness_ifs<P: Player, E: Executor>(
    pop: &[P],
    cfg: &EvolutionConfig,
    generation: usize,
    exec: &E,
) -> FitnessVector {
    fitness_ifs_with(pop.len(), cfg, generation, exec, |ab, ag, rng| {
        play_match(&pop[ab], &pop[ag], rng)
    })
}

/// Linear fitness scaling: an affine map that preserves the mean and gives
/// the best individual `multiple` times the mean. When that would push the
/// worst below zero, the map pinning the worst at zero is used instead.
/// All-equal input is returned unchanged.
pub fn linear_scale(raw: &[f64], multiple: f64) -> Result<Vec<f64>> {
    if raw.is_empty() || raw.iter().any(|&f| !(f >= 0.0) || !f.is_finite()) {
        return Err(Error::Config(
            "fitness values must be finite and non-negative".into(),
        ));
    }
    let sum: f64 = raw.iter().sum();
    if sum == 0.0 {
        return Err(Error::ZeroFitness);
    }
    let mean = sum / raw.len() as f64;
    let max = raw.iter().copied().fold(f64::MIN, f64::max);
    let min = raw.iter().copied().fold(f64::MAX, f64::min);
    if max == min {
        return Ok(raw.to_vec());
    }
    let (a, b) = if min > (multiple * mean - max) / (multiple - 1.0) {
        let delta = max - mean;
        (
            (multiple - 1.0) * mean / delta,
            mean * (max - multiple * mean) / delta,
        )
    } else {
        let delta = mean - min;
        (mean / delta, -min * mean / delta)
    };
    Ok(raw.iter().map(|&f| (a * f + b).max(0.0)).collect())
}

/// Index of the first maximum.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Roulette wheel over cumulative fitness.
#[derive(Debug, Clone)]
pub struct Roulette {
    cumulative: Vec<f64>,
}

impl Roulette {
    pub fn new(fitness: &[f64]) -> Result<Self> {
        let mut acc = 0.0;
        let cumulative: Vec<f64> = fitness
            .iter()
            .map(|&f| {
                acc += f.max(0.0);
                acc
            })
            .collect();
        if !(acc > 0.0) {
            return Err(Error::ZeroFitness);
        }
        Ok(Self { cumulative })
    }

    pub fn spin(&self, rng: &mut RngStream) -> usize {
        let total = *self.cumulative.last().unwrap();
        let x = rng.unit() * total;
        let i = self.cumulative.partition_point(|&c| c <= x);
        i.min(self.cumulative.len() - 1)
    }
}

/// Builds the next population: the best genome copied untouched, the rest
/// drawn by roulette, paired in draw order for single-point crossover, then
/// mutated bitwise.
pub fn next_generation(
    pop: &[Genome],
    fitness: &[f64],
    cfg: &EvolutionConfig,
    rng: &mut RngStream,
) -> Result<Vec<Genome>> {
    if pop.len() != fitness.len() || pop.is_empty() {
        return Err(Error::Config(
            "population and fitness lengths differ".into(),
        ));
    }
    let wheel = Roulette::new(fitness)?;
    let elite = argmax(fitness);
    let mut children: Vec<Genome> = (1..pop.len())
        .map(|_| pop[wheel.spin(rng)].clone())
        .collect();
    for pair in children.chunks_exact_mut(2) {
        if rng.bernoulli(cfg.crossover_prob) {
            let (a, b) = crossover(&pair[0], &pair[1], rng);
            pair[0] = a;
            pair[1] = b;
        }
    }
    for child in children.iter_mut() {
        mutate_in_place(child, cfg.mutation_prob, rng);
    }
    let mut next = Vec::with_capacity(pop.len());
    next.push(pop[elite].clone());
    next.extend(children);
    Ok(next)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub generation: usize,
    /// Games spent by the algorithm to produce this population.
    pub cumulative_games: u64,
    pub variant: Variant,
    pub seed: u64,
    pub genomes: Vec<Genome>,
    pub raw_fitness: Vec<f64>,
}

impl Player for Network {
    fn name(&self) -> String {
        "net".into()
    }
    fn choose(&self, state: &BoardState, rng: &mut RngStream) -> crate::board::EdgeIndex {
        self.choose_move(state, rng)
            .expect("network asked to move on an invalid board")
    }
}

pub fn evaluate_population<E: Executor>(
    nets: &[Network],
    cfg: &EvolutionConfig,
    generation: usize,
    exec: &E,
) -> Result<FitnessVector> {
    match cfg.variant {
        Variant::Direct { opponent } => {
            let opp = heuristic(opponent)
                .ok_or_else(|| Error::Config(format!("no heuristic level {opponent}")))?;
            fitness_direct(nets, opp, cfg, generation, exec)
        }
        Variant::RoundRobin => Ok(fitness_roundrobin(nets, cfg, generation, exec)),
        Variant::ImplicitFitnessSharing => Ok(fitness_ifs(nets, cfg, generation, exec)),
    }
}

pub fn initial_population(cfg: &EvolutionConfig) -> Vec<Genome> {
    let mut rng = RngStream::derived(cfg.master_seed, Domain::Init, &[]);
    (0..cfg.population_size)
        .map(|_| Genome::random(&mut rng))
        .collect()
}

/// Runs the configured evolution, handing each snapshot (generation 0, every
/// `snapshot_interval`-th generation and the last) to `on_snapshot`.
pub fn run_evolution_with<E, F>(cfg: &EvolutionConfig, exec: &E, mut on_snapshot: F) -> Result<()>
where
    E: Executor,
    F: FnMut(Snapshot) -> Result<()>,
{
    cfg.validate()?;
    let mut pop = initial_population(cfg);
    let mut cumulative = 0u64;
    for generation in 0..cfg.generations {
        let nets: Vec<Network> = pop.iter().map(Genome::decode).collect();
        let fitness = evaluate_population(&nets, cfg, generation, exec)?;
        let last = generation + 1 == cfg.generations;
        if generation % cfg.snapshot_interval == 0 || last {
            on_snapshot(Snapshot {
                generation,
                cumulative_games: cumulative,
                variant: cfg.variant,
                seed: cfg.master_seed,
                genomes: pop.clone(),
                raw_fitness: fitness.raw.clone(),
            })?;
        }
        cumulative += fitness.games_consumed;
        if !last {
            let mut rng = RngStream::derived(cfg.master_seed, Domain::Breed, &[generation as u64]);
            pop = next_generation(&pop, &fitness.scaled, cfg, &mut rng)?;
        }
    }
    Ok(())
}

pub fn run_evolution<E: Executor>(cfg: &EvolutionConfig, exec: &E) -> Result<Vec<Snapshot>> {
    let mut out = Vec::new();
    run_evolution_with(cfg, exec, |s| {
        out.push(s);
        Ok(())
    })?;
    Ok(out)
}
