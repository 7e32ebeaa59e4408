//! Resource-allocation schemes: the CSI-based joint search, the position
//! grid, the forest-driven scheduler and the random-CQI baselines.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rand::Rng;

use crate::channel::{compose_rotation, LinkRays, RotationMatrix};
use crate::codebook::{array_steering_angle, nearest_beam, Codebook};
use crate::error::{Error, Result};
use crate::forest::ForestModel;
use crate::link::{cqi_from_sinr, linear_to_db, CQI_LEVELS};
use crate::rng::{derive_rng, stream};
use crate::scenario::{FilterDeploy, OrientationAngles, Position, UserDrop};
use crate::system::System;

/// Scheduling outcome for one user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AllocationDecision {
    pub user: usize,
    pub rrh: usize,
    pub tx_beam: usize,
    pub rx_filter: usize,
    pub cqi: u8,
    /// SINR realized on the true channel with the chosen beams.
    pub sinr_db: f64,
    pub realized_goodput: f64,
}

pub fn sum_goodput(decisions: &[AllocationDecision]) -> f64 {
    decisions.iter().map(|d| d.realized_goodput).sum()
}

/// Whether ray phases add coherently or only ray powers add.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Propagation {
    /// Instantaneous channel.
    Coherent,
    /// Phase-averaged channel: the expected power over uniform ray phases.
    Incoherent,
}

/// `Σ_{i<n} e^{jπ·i·x}`.
fn array_sum(n: usize, x: f64) -> Complex64 {
    let step = Complex64::from_polar(1.0, std::f64::consts::PI * x);
    let mut z = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for _ in 0..n {
        acc += z;
        z *= step;
    }
    acc
}

/// Ray decompositions of every (user, RRH) link of one drop. User `n` is
/// served by RRH `n`.
#[derive(Debug, Clone)]
pub struct DropChannels {
    n: usize,
    links: Vec<LinkRays>,
}

impl DropChannels {
    pub fn new(
        sys: &System,
        positions: &[Position],
        orientations: &[OrientationAngles],
        t: f64,
    ) -> Result<Self> {
        let n = sys.n_users();
        if positions.len() != n || orientations.len() != n {
            return Err(Error::Argument(format!(
                "drop has {} positions and {} orientations for {n} users",
                positions.len(),
                orientations.len()
            )));
        }
        let mut links = Vec::with_capacity(n * n);
        for user in 0..n {
            for rrh in 0..n {
                links.push(LinkRays::new(
                    sys.cfg(),
                    rrh,
                    &positions[user],
                    orientations[user],
                    &sys.field,
                    t,
                )?);
            }
        }
        Ok(DropChannels { n, links })
    }

    /// Channels on the true geometry of a drop.
    pub fn of_drop(sys: &System, drop: &UserDrop) -> Result<Self> {
        DropChannels::new(sys, &drop.true_positions, &drop.orientations, drop.time_s)
    }

    pub fn n_users(&self) -> usize {
        self.n
    }

    pub fn link(&self, user: usize, rrh: usize) -> &LinkRays {
        &self.links[user * self.n + rrh]
    }

    /// Power received by `user` from `rrh` with transmit beam `tx` and the
    /// user's filter `rx`.
    pub fn power(
        &self,
        sys: &System,
        user: usize,
        rrh: usize,
        tx: usize,
        rx: usize,
        prop: Propagation,
    ) -> f64 {
        let link = self.link(user, rrh);
        let cfg = sys.cfg();
        let (n_tx, n_rx) = (cfg.radio.n_tx, cfg.radio.n_rx);
        let st = sys.tx_cosine(tx);
        let sr = sys.rx_cosine(rx);
        let norm = 1.0 / ((n_tx * n_rx) as f64);
        let mut coherent = Complex64::new(0.0, 0.0);
        let mut incoherent = 0.0;
        for ((a, &ct), &cr) in link
            .amplitudes
            .iter()
            .zip(&link.tx_cosines)
            .zip(&link.rx_cosines)
        {
            // a_Txᴴ v and u† a_Rx, both unnormalized.
            let g = array_sum(n_tx, ct - st) * array_sum(n_rx, cr - sr).conj();
            match prop {
                Propagation::Coherent => coherent += a * g,
                Propagation::Incoherent => incoherent += a.norm_sqr() * g.norm_sqr(),
            }
        }
        let gain = match prop {
            Propagation::Coherent => coherent.norm_sqr(),
            Propagation::Incoherent => incoherent,
        };
        cfg.radio.tx_power_w * link.pathloss_amplitude.powi(2) * gain * norm
    }

    /// Linear SINR of every user for the given beams and filters.
    pub fn sinrs(&self, sys: &System, tx: &[usize], rx: &[usize], prop: Propagation) -> Vec<f64> {
        (0..self.n)
            .map(|user| {
                let signal = self.power(sys, user, user, tx[user], rx[user], prop);
                let interference: f64 = (0..self.n)
                    .filter(|&m| m != user)
                    .map(|m| self.power(sys, user, m, tx[m], rx[user], prop))
                    .sum();
                signal / (sys.noise_power_w + interference)
            })
            .collect()
    }

    pub fn sinrs_db(&self, sys: &System, tx: &[usize], rx: &[usize]) -> Vec<f64> {
        self.sinrs(sys, tx, rx, Propagation::Coherent)
            .into_iter()
            .map(linear_to_db)
            .collect()
    }

    /// Evaluates chosen beams and CQIs on these (true) channels.
    pub fn realize(
        &self,
        sys: &System,
        tx: &[usize],
        rx: &[usize],
        cqi: &[u8],
    ) -> Vec<AllocationDecision> {
        self.sinrs_db(sys, tx, rx)
            .into_iter()
            .enumerate()
            .map(|(user, s)| AllocationDecision {
                user,
                rrh: user,
                tx_beam: tx[user],
                rx_filter: rx[user],
                cqi: cqi[user],
                sinr_db: s,
                realized_goodput: sys.goodput(cqi[user], s),
            })
            .collect()
    }

    /// Exact CQI of every user for the given beams.
    pub fn exact_cqis(&self, sys: &System, tx: &[usize], rx: &[usize]) -> Vec<u8> {
        self.sinrs_db(sys, tx, rx)
            .into_iter()
            .map(|s| cqi_from_sinr(s, &sys.mcs))
            .collect()
    }
}

/// Candidate beams and filters per link for the joint search.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    pub tx: Vec<Vec<usize>>,
    pub rx: Vec<Vec<usize>>,
}

impl SearchSpace {
    /// The `k_tx` beams and `k_rx` filters nearest the direct-path
    /// directions.
    pub fn around_geometry(
        sys: &System,
        positions: &[Position],
        orientations: &[OrientationAngles],
        k_tx: usize,
        k_rx: usize,
    ) -> Self {
        let n = sys.n_users();
        let tx = (0..n)
            .map(|m| {
                sys.tx_codebook
                    .nearest_k(sys.tx_steering_angle(m, &positions[m]), k_tx)
            })
            .collect();
        let rx = (0..n)
            .map(|user| {
                let r = compose_rotation(orientations[user]);
                let back = (sys.cfg().rrh_position(user) - positions[user]).normalize();
                sys.rx_codebook
                    .nearest_k(array_steering_angle(&r.to_local(&back)), k_rx)
            })
            .collect();
        SearchSpace { tx, rx }
    }

    /// Candidates around the strongest ray of every serving link. In LOS
    /// this is the direct path; links without rays fall back to the
    /// geometric directions.
    pub fn around_dominant_paths(
        sys: &System,
        ch: &DropChannels,
        positions: &[Position],
        orientations: &[OrientationAngles],
        k_tx: usize,
        k_rx: usize,
    ) -> Self {
        let mut space = SearchSpace::around_geometry(sys, positions, orientations, k_tx, k_rx);
        for user in 0..sys.n_users() {
            let link = ch.link(user, user);
            let strongest = (0..link.len()).max_by(|&a, &b| {
                link.amplitudes[a]
                    .norm_sqr()
                    .total_cmp(&link.amplitudes[b].norm_sqr())
                    .then(b.cmp(&a))
            });
            if let Some(i) = strongest {
                let tx_angle = link.tx_cosines[i].clamp(-1.0, 1.0).asin();
                space.tx[user] = sys.tx_codebook.nearest_k(tx_angle, k_tx);
                space.rx[user] = sys.rx_codebook.nearest_k(link.rx_angles[i], k_rx);
            }
        }
        space
    }

    /// Every beam and every filter.
    pub fn full(sys: &System) -> Self {
        let n = sys.n_users();
        SearchSpace {
            tx: vec![(0..sys.tx_codebook.len()).collect(); n],
            rx: vec![(0..sys.rx_codebook.len()).collect(); n],
        }
    }

    /// Number of transmit-beam combinations.
    pub fn tx_combinations(&self) -> usize {
        self.tx.iter().map(Vec::len).product()
    }
}

/// Value of an allocation: summed goodput, then summed Shannon rate as a
/// tie-break.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Objective {
    pub goodput: f64,
    pub shannon: f64,
}

/// Result of the joint search.
#[derive(Debug, Clone, PartialEq)]
pub struct JointChoice {
    pub tx: Vec<usize>,
    pub rx: Vec<usize>,
    pub objective: Objective,
}

fn user_value(sys: &System, sinr: f64) -> Objective {
    let db = linear_to_db(sinr);
    Objective {
        goodput: sys.goodput(cqi_from_sinr(db, &sys.mcs), db),
        shannon: (1.0 + sinr).log2(),
    }
}

fn better(a: Objective, b: Objective) -> bool {
    a.goodput > b.goodput || (a.goodput == b.goodput && a.shannon > b.shannon)
}

/// Exhaustive search over transmit-beam combinations. Given the beams each
/// user's SINR depends only on its own filter, so filters are chosen per
/// user. The first maximizer in enumeration order wins ties.
pub fn joint_search(
    sys: &System,
    ch: &DropChannels,
    space: &SearchSpace,
    prop: Propagation,
) -> JointChoice {
    let n = ch.n_users();
    // gains[user][rrh][kr][kt]
    let gains: Vec<Vec<Vec<Vec<f64>>>> = (0..n)
        .map(|user| {
            (0..n)
                .map(|rrh| {
                    space.rx[user]
                        .iter()
                        .map(|&r| {
                            space.tx[rrh]
                                .iter()
                                .map(|&t| ch.power(sys, user, rrh, t, r, prop))
                                .collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut idx = vec![0usize; n];
    let mut best: Option<(Objective, Vec<usize>, Vec<usize>)> = None;
    loop {
        let mut total = Objective {
            goodput: 0.0,
            shannon: 0.0,
        };
        let mut filters = Vec::with_capacity(n);
        for user in 0..n {
            let mut best_user: Option<(Objective, usize)> = None;
            for kr in 0..space.rx[user].len() {
                let signal = gains[user][user][kr][idx[user]];
                let interference: f64 = (0..n)
                    .filter(|&m| m != user)
                    .map(|m| gains[user][m][kr][idx[m]])
                    .sum();
                let v = user_value(sys, signal / (sys.noise_power_w + interference));
                if best_user.map_or(true, |(b, _)| better(v, b)) {
                    best_user = Some((v, kr));
                }
            }
            let (v, kr) = best_user.expect("non-empty filter candidates");
            total.goodput += v.goodput;
            total.shannon += v.shannon;
            filters.push(space.rx[user][kr]);
        }
        if best.as_ref().map_or(true, |(b, _, _)| better(total, *b)) {
            let beams = (0..n).map(|m| space.tx[m][idx[m]]).collect();
            best = Some((total, beams, filters));
        }
        // Mixed-radix increment, last RRH fastest.
        let mut pos = n;
        loop {
            if pos == 0 {
                let (objective, tx, rx) = best.expect("at least one combination");
                return JointChoice { tx, rx, objective };
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < space.tx[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// CSI oracle: joint search on the instantaneous channels around the true
/// geometry, CQI set exactly from the realized SINR.
pub fn csi_allocate(
    sys: &System,
    ch: &DropChannels,
    space: &SearchSpace,
) -> Vec<AllocationDecision> {
    let choice = joint_search(sys, ch, space, Propagation::Coherent);
    let cqi = ch.exact_cqis(sys, &choice.tx, &choice.rx);
    ch.realize(sys, &choice.tx, &choice.rx, &cqi)
}

/// CSI oracle for a drop with the configured candidate counts.
pub fn csi_allocate_drop(
    sys: &System,
    drop: &UserDrop,
    ch: &DropChannels,
) -> Vec<AllocationDecision> {
    let s = &sys.cfg().scheduler;
    let space = SearchSpace::around_dominant_paths(
        sys,
        ch,
        &drop.true_positions,
        &drop.orientations,
        s.k_tx,
        s.k_rx,
    );
    csi_allocate(sys, ch, &space)
}

/// Beams and filters stored for one combination of grid points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridEntry {
    pub tx: Vec<usize>,
    pub rx: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridMode {
    /// Entries computed on first lookup and memoized up to the budget.
    Lazy,
    /// Every combination computed up front.
    Eager,
}

/// Lattice of user positions with precomputed beams and filters per
/// combination of lattice points.
#[derive(Debug)]
pub struct BeamGrid {
    pub spacing: f64,
    max_entries: usize,
    entries: Mutex<HashMap<Vec<(i64, i64)>, Arc<GridEntry>>>,
}

const GRID_ENTRY_OVERHEAD_BYTES: u64 = 64;

impl BeamGrid {
    /// Lattice points lying in each user's cell.
    pub fn cell_points(sys: &System, spacing: f64) -> Vec<Vec<(i64, i64)>> {
        let cfg = sys.cfg();
        let steps = (cfg.geometry.domain_size_m / spacing).floor() as i64;
        let mut cells = vec![Vec::new(); sys.n_users()];
        for i in 0..=steps {
            for j in 0..=steps {
                let p = Position::new(
                    i as f64 * spacing,
                    j as f64 * spacing,
                    cfg.geometry.user_height_m,
                );
                cells[cfg.nearest_rrh(&p)].push((i, j));
            }
        }
        cells
    }

    pub fn entry_bytes(n_users: usize) -> u64 {
        (n_users as u64) * (2 * 8 + 16) + GRID_ENTRY_OVERHEAD_BYTES
    }

    /// Memory needed to hold every combination.
    pub fn estimated_bytes(sys: &System, spacing: f64) -> u64 {
        let combos = BeamGrid::cell_points(sys, spacing)
            .iter()
            .fold(1u64, |acc, c| acc.saturating_mul(c.len() as u64));
        combos.saturating_mul(BeamGrid::entry_bytes(sys.n_users()))
    }

    fn snap_index(&self, p: &Position) -> (i64, i64) {
        (
            (p.x / self.spacing).round() as i64,
            (p.y / self.spacing).round() as i64,
        )
    }

    /// Nearest lattice point at user height.
    pub fn snap(&self, sys: &System, p: &Position) -> Position {
        let (i, j) = self.snap_index(p);
        self.point(sys, (i, j))
    }

    fn point(&self, sys: &System, (i, j): (i64, i64)) -> Position {
        Position::new(
            i as f64 * self.spacing,
            j as f64 * self.spacing,
            sys.cfg().geometry.user_height_m,
        )
    }

    fn compute(&self, sys: &System, key: &[(i64, i64)]) -> Result<GridEntry> {
        let positions: Vec<Position> = key.iter().map(|&k| self.point(sys, k)).collect();
        let aligned = vec![OrientationAngles::aligned(); positions.len()];
        let ch = DropChannels::new(sys, &positions, &aligned, 0.0)?;
        let s = &sys.cfg().scheduler;
        let space =
            SearchSpace::around_dominant_paths(sys, &ch, &positions, &aligned, s.k_tx, s.k_rx);
        let choice = joint_search(sys, &ch, &space, Propagation::Incoherent);
        Ok(GridEntry {
            tx: choice.tx,
            rx: choice.rx,
        })
    }

    /// Beams and filters for reported positions, via their lattice points.
    pub fn lookup(&self, sys: &System, reported: &[Position]) -> Result<Arc<GridEntry>> {
        let key: Vec<(i64, i64)> = reported.iter().map(|p| self.snap_index(p)).collect();
        if let Some(e) = self.entries.lock().expect("grid lock").get(&key) {
            return Ok(Arc::clone(e));
        }
        let entry = Arc::new(self.compute(sys, &key)?);
        let mut map = self.entries.lock().expect("grid lock");
        if map.len() < self.max_entries {
            map.insert(key, Arc::clone(&entry));
        }
        Ok(entry)
    }

    pub fn cached_entries(&self) -> usize {
        self.entries.lock().expect("grid lock").len()
    }
}

/// Grid with spacing `g`. Beams are chosen by the joint search on the
/// phase-averaged channel at the lattice points with aligned orientation.
pub fn build_beam_grid(sys: &System, g: f64, mode: GridMode) -> Result<BeamGrid> {
    if !(g > 0.0 && g.is_finite()) {
        return Err(Error::Config(format!(
            "grid spacing must be positive, got {g}"
        )));
    }
    let budget = sys.cfg().scheduler.grid_memory_budget_bytes;
    let per_entry = BeamGrid::entry_bytes(sys.n_users());
    let grid = BeamGrid {
        spacing: g,
        max_entries: (budget / per_entry) as usize,
        entries: Mutex::new(HashMap::new()),
    };
    if mode == GridMode::Eager {
        let estimate = BeamGrid::estimated_bytes(sys, g);
        if estimate > budget {
            return Err(Error::Config(format!(
                "beam grid with spacing {g} m needs about {estimate} bytes, budget is {budget}"
            )));
        }
        let cells = BeamGrid::cell_points(sys, g);
        let mut idx = vec![0usize; cells.len()];
        let mut map = HashMap::new();
        'outer: loop {
            let key: Vec<(i64, i64)> = idx.iter().zip(&cells).map(|(&i, c)| c[i]).collect();
            let entry = grid.compute(sys, &key)?;
            map.insert(key, Arc::new(entry));
            let mut pos = cells.len();
            loop {
                if pos == 0 {
                    break 'outer;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < cells[pos].len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
        *grid.entries.lock().expect("grid lock") = map;
    }
    Ok(grid)
}

/// Which optional inputs enter the feature vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureMode {
    Position,
    /// Position features plus the UE orientation angles.
    WithOrientation,
}

impl FeatureMode {
    pub fn arity(self, n_users: usize) -> usize {
        let base = 4 + n_users.saturating_sub(1);
        match self {
            FeatureMode::Position => base,
            FeatureMode::WithOrientation => base + 2,
        }
    }

    pub fn names(self, n_users: usize) -> Vec<String> {
        let mut names = vec![
            "pos_x".into(),
            "pos_y".into(),
            "tx_beam".into(),
            "rx_filter".into(),
        ];
        for k in 1..n_users {
            names.push(format!("interferer_beam_{k}"));
        }
        if self == FeatureMode::WithOrientation {
            names.push("orientation_phi0".into());
            names.push("orientation_theta0".into());
        }
        names
    }
}

/// Feature vector of `user`: reported position, own beam and filter, the
/// other RRHs' beams in RRH order, optionally the orientation.
pub fn feature_vector(
    user: usize,
    reported: &Position,
    entry: &GridEntry,
    orientation: Option<OrientationAngles>,
) -> Vec<f64> {
    let mut x = vec![
        reported.x,
        reported.y,
        entry.tx[user] as f64,
        entry.rx[user] as f64,
    ];
    for (m, &b) in entry.tx.iter().enumerate() {
        if m != user {
            x.push(b as f64);
        }
    }
    if let Some(o) = orientation {
        x.push(o.phi0);
        x.push(o.theta0);
    }
    x
}

/// Maps a filter through a rotation and re-quantizes it.
pub fn reaim_filter(filter: usize, r: &RotationMatrix, codebook: &Codebook) -> usize {
    let a = codebook.angles[filter];
    let d = nalgebra::Vector3::new(a.cos(), a.sin(), 0.0);
    nearest_beam(codebook, array_steering_angle(&r.apply(&d)))
}

/// Re-aims a filter chosen for an aligned device into the LCS of a device
/// with orientation `o`.
pub fn orientation_solution2(filter: usize, o: OrientationAngles, codebook: &Codebook) -> usize {
    reaim_filter(filter, &compose_rotation(o).transpose(), codebook)
}

/// Deployed filters for a grid entry under `deploy`.
pub fn deployed_filters(
    sys: &System,
    entry: &GridEntry,
    drop: &UserDrop,
    deploy: FilterDeploy,
) -> Vec<usize> {
    match deploy {
        FilterDeploy::Grid => entry.rx.clone(),
        FilterDeploy::Reaimed => entry
            .rx
            .iter()
            .zip(&drop.orientations)
            .map(|(&f, &o)| orientation_solution2(f, o, &sys.rx_codebook))
            .collect(),
    }
}

/// Options of the forest-driven scheduler.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LearningOptions {
    pub features: FeatureMode,
    pub deploy: FilterDeploy,
}

impl Default for LearningOptions {
    fn default() -> Self {
        LearningOptions {
            features: FeatureMode::Position,
            deploy: FilterDeploy::Grid,
        }
    }
}

/// Feature vectors of every user of a drop.
pub fn drop_features(drop: &UserDrop, entry: &GridEntry, features: FeatureMode) -> Vec<Vec<f64>> {
    (0..drop.n_users())
        .map(|user| {
            let o = (features == FeatureMode::WithOrientation).then(|| drop.orientations[user]);
            feature_vector(user, &drop.reported_positions[user], entry, o)
        })
        .collect()
}

/// Grid beams from reported positions, CQI from the forest, goodput on the
/// true channel.
pub fn learning_allocate(
    forest: &ForestModel,
    grid: &BeamGrid,
    drop: &UserDrop,
    sys: &System,
    ch: &DropChannels,
    opts: LearningOptions,
) -> Result<Vec<AllocationDecision>> {
    let expected = opts.features.arity(sys.n_users());
    if forest.arity != expected {
        return Err(Error::Argument(format!(
            "forest expects {} features, scheduler builds {expected}",
            forest.arity
        )));
    }
    let entry = grid.lookup(sys, &drop.reported_positions)?;
    let rx = deployed_filters(sys, &entry, drop, opts.deploy);
    let cqi = drop_features(drop, &entry, opts.features)
        .iter()
        .map(|x| forest.predict(x))
        .collect::<Result<Vec<u8>>>()?;
    Ok(ch.realize(sys, &entry.tx, &rx, &cqi))
}

fn random_cqis(n: usize, drop_index: u64, seed: u64, scheme: u64) -> Vec<u8> {
    (0..n)
        .map(|user| {
            let mut rng = derive_rng(seed, &[stream::RANDOM_CQI, scheme, drop_index, user as u64]);
            rng.gen_range(1..=CQI_LEVELS as u8)
        })
        .collect()
}

/// Grid beams with a CQI drawn uniformly from 1..15.
pub fn random_packet_allocate(
    grid: &BeamGrid,
    drop: &UserDrop,
    sys: &System,
    ch: &DropChannels,
    seed: u64,
) -> Result<Vec<AllocationDecision>> {
    let entry = grid.lookup(sys, &drop.reported_positions)?;
    let cqi = random_cqis(drop.n_users(), drop.index, seed, 0);
    Ok(ch.realize(sys, &entry.tx, &entry.rx, &cqi))
}

/// Beams and filters pointed along the reported bearings.
pub fn geometric_beams(sys: &System, drop: &UserDrop) -> (Vec<usize>, Vec<usize>) {
    let n = drop.n_users();
    let tx = (0..n)
        .map(|m| {
            nearest_beam(
                &sys.tx_codebook,
                sys.tx_bearing(m, &drop.reported_positions[m]),
            )
        })
        .collect();
    let rx = (0..n)
        .map(|user| {
            let r = compose_rotation(drop.orientations[user]);
            let back = r.to_local(&(sys.cfg().rrh_position(user) - drop.reported_positions[user]));
            nearest_beam(&sys.rx_codebook, back.y.atan2(back.x))
        })
        .collect();
    (tx, rx)
}

/// Geometric beams with a CQI drawn uniformly from 1..15.
pub fn geometric_allocate(
    drop: &UserDrop,
    sys: &System,
    ch: &DropChannels,
    seed: u64,
) -> Vec<AllocationDecision> {
    let (tx, rx) = geometric_beams(sys, drop);
    let cqi = random_cqis(drop.n_users(), drop.index, seed, 1);
    ch.realize(sys, &tx, &rx, &cqi)
}

/// Mean goodput over all 15 CQIs for fixed beams, the expectation of a
/// random-CQI scheme.
pub fn expected_random_goodput(sys: &System, ch: &DropChannels, tx: &[usize], rx: &[usize]) -> f64 {
    ch.sinrs_db(sys, tx, rx)
        .into_iter()
        .map(|s| {
            (1..=CQI_LEVELS as u8)
                .map(|c| sys.goodput(c, s))
                .sum::<f64>()
                / CQI_LEVELS as f64
        })
        .sum()
}
