//! Game data model: resources, cost tables, follower structure and leader
//! strategies.
//!
//! Resources, actions, followers and classes are dense 0-based indices. An
//! action is a sorted, duplicate-free list of resource indices.

use std::fmt;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact cost and probability values.
pub type Rational = BigRational;

/// A set of resources, stored sorted.
pub type Action = Vec<usize>;

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Lossy conversion used by the floating-point solvers.
pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// accepted only if it lies within `tol` of `x`.
pub fn approximate_rational(x: f64, max_den: i64, tol: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let mut frac = x;
    for _ in 0..64 {
        let a = frac.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let (p2, q2) = (ai * p1 + p0, ai * q1 + q0);
        if q2 > max_den as i128 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let rem = frac - a;
        if ((p1 as f64) / (q1 as f64) - x).abs() <= tol * 1e-3 || rem.abs() < 1e-15 {
            break;
        }
        frac = 1.0 / rem;
    }
    if q1 == 0 {
        return None;
    }
    let approx = (p1 as f64) / (q1 as f64);
    ((approx - x).abs() <= tol).then(|| Rational::new(BigInt::from(p1), BigInt::from(q1)))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("cost lookup out of range: resource {resource}, congestion {congestion}")]
    CostOutOfRange { resource: usize, congestion: usize },
    #[error("invalid followers' outcome: {0}")]
    InvalidOutcome(String),
    #[error("invalid leader strategy: {0}")]
    InvalidStrategy(String),
    #[error("invalid game: {0}")]
    InvalidGame(String),
}

/// Per-resource cost functions `c_i(x)` for `x = 0..=max_congestion(i)`,
/// with `c_i(0) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostTable {
    // rows[i][x] = c_i(x); rows[i][0] is always zero.
    rows: Vec<Vec<Rational>>,
}

impl CostTable {
    /// Builds a table from rows holding `c_i(1), c_i(2), ...`.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let rows = rows
            .into_iter()
            .map(|row| {
                let mut full = Vec::with_capacity(row.len() + 1);
                full.push(Rational::zero());
                full.extend(row);
                full
            })
            .collect();
        CostTable { rows }
    }

    pub fn from_integer_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect())
    }

    pub fn resources(&self) -> usize {
        self.rows.len()
    }

    /// Largest congestion with a stored cost.
    pub fn max_congestion(&self, resource: usize) -> usize {
        self.rows.get(resource).map_or(0, |r| r.len() - 1)
    }

    /// `c_i(1), c_i(2), ...` without the implicit zero.
    pub fn values(&self, resource: usize) -> &[Rational] {
        &self.rows[resource][1..]
    }

    pub fn cost(&self, resource: usize, congestion: usize) -> Result<&Rational, GameError> {
        self.rows
            .get(resource)
            .and_then(|row| row.get(congestion))
            .ok_or(GameError::CostOutOfRange { resource, congestion })
    }

    pub fn cost_f64(&self, resource: usize, congestion: usize) -> Result<f64, GameError> {
        self.cost(resource, congestion).map(to_f64)
    }

    pub fn is_monotone(&self) -> bool {
        self.rows.iter().all(|row| row.windows(2).all(|w| w[0] <= w[1]))
    }

    /// Same table with `c_i(x)` replaced by `c_i(x + 1)` on `resource`; the
    /// row loses its last entry.
    pub fn shifted(&self, resource: usize) -> CostTable {
        let mut rows = self.rows.clone();
        let row = &mut rows[resource];
        if row.len() > 1 {
            row.remove(1);
        }
        CostTable { rows }
    }
}

/// A follower with her own list of actions (general SCGs).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Follower {
    pub actions: Vec<Action>,
}

/// A class of `size` interchangeable followers choosing one resource from
/// `resources` (T-class singleton games).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FollowerClass {
    pub size: usize,
    pub resources: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FollowerStructure {
    General(Vec<Follower>),
    Classes(Vec<FollowerClass>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GameKind {
    GeneralScg,
    TclassSscg,
}

impl GameKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GameKind::GeneralScg => "general_scg",
            GameKind::TclassSscg => "tclass_sscg",
        }
    }
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A Stackelberg congestion game.
#[derive(Clone, Debug, PartialEq)]
pub struct Game {
    pub resources: usize,
    pub leader_actions: Vec<Action>,
    pub followers: FollowerStructure,
    pub follower_costs: CostTable,
    pub leader_costs: CostTable,
    pub metadata: Option<serde_json::Value>,
}

impl Game {
    pub fn kind(&self) -> GameKind {
        match self.followers {
            FollowerStructure::General(_) => GameKind::GeneralScg,
            FollowerStructure::Classes(_) => GameKind::TclassSscg,
        }
    }

    pub fn follower_count(&self) -> usize {
        match &self.followers {
            FollowerStructure::General(f) => f.len(),
            FollowerStructure::Classes(c) => c.iter().map(|c| c.size).sum(),
        }
    }

    /// `n`, followers plus the leader.
    pub fn player_count(&self) -> usize {
        self.follower_count() + 1
    }

    pub fn class_count(&self) -> usize {
        match &self.followers {
            FollowerStructure::General(_) => 0,
            FollowerStructure::Classes(c) => c.len(),
        }
    }

    pub fn classes(&self) -> Option<&[FollowerClass]> {
        match &self.followers {
            FollowerStructure::Classes(c) => Some(c),
            FollowerStructure::General(_) => None,
        }
    }

    pub fn general_followers(&self) -> Option<&[Follower]> {
        match &self.followers {
            FollowerStructure::General(f) => Some(f),
            FollowerStructure::Classes(_) => None,
        }
    }

    /// Class of each follower, in labeled order (class 0 members first).
    pub fn follower_classes(&self) -> Vec<usize> {
        match &self.followers {
            FollowerStructure::General(f) => (0..f.len()).collect(),
            FollowerStructure::Classes(c) => {
                c.iter().enumerate().flat_map(|(t, class)| std::iter::repeat_n(t, class.size)).collect()
            }
        }
    }

    /// Every follower's action list; class members get singleton actions.
    pub fn expanded_followers(&self) -> Vec<Vec<Action>> {
        match &self.followers {
            FollowerStructure::General(f) => f.iter().map(|f| f.actions.clone()).collect(),
            FollowerStructure::Classes(c) => c
                .iter()
                .flat_map(|class| {
                    let actions: Vec<Action> = class.resources.iter().map(|&i| vec![i]).collect();
                    std::iter::repeat_n(actions, class.size)
                })
                .collect(),
        }
    }

    /// Number of followers that have some action containing `resource`.
    pub fn follower_capacity(&self, resource: usize) -> usize {
        match &self.followers {
            FollowerStructure::General(f) => {
                f.iter().filter(|f| f.actions.iter().any(|a| a.contains(&resource))).count()
            }
            FollowerStructure::Classes(c) => c.iter().filter(|c| c.resources.contains(&resource)).map(|c| c.size).sum(),
        }
    }

    pub fn leader_can_use(&self, resource: usize) -> bool {
        self.leader_actions.iter().any(|a| a.contains(&resource))
    }

    /// Largest congestion `resource` can reach, leader included.
    pub fn congestion_cap(&self, resource: usize) -> usize {
        self.follower_capacity(resource) + usize::from(self.leader_can_use(resource))
    }

    /// Minimum stored row length: the congestion cap plus two slots of slack
    /// for `c(x + 2)` lookups; unused resources need nothing.
    pub fn required_cost_len(&self, resource: usize) -> usize {
        match self.congestion_cap(resource) {
            0 => 0,
            cap => cap + 2,
        }
    }

    pub fn is_singleton(&self) -> bool {
        let followers_ok = match &self.followers {
            FollowerStructure::General(f) => f.iter().all(|f| f.actions.iter().all(|a| a.len() == 1)),
            FollowerStructure::Classes(_) => true,
        };
        followers_ok && self.leader_actions.iter().all(|a| a.len() == 1)
    }

    /// The shared resource list if every follower has the same singleton
    /// actions (symmetric singleton followers).
    pub fn symmetric_singleton_followers(&self) -> Option<Vec<usize>> {
        let mut shared: Option<Vec<usize>> = None;
        let mut check = |resources: Vec<usize>| -> bool {
            match &shared {
                None => {
                    shared = Some(resources);
                    true
                }
                Some(s) => *s == resources,
            }
        };
        match &self.followers {
            FollowerStructure::General(followers) => {
                for f in followers {
                    if f.actions.iter().any(|a| a.len() != 1) {
                        return None;
                    }
                    let mut res: Vec<usize> = f.actions.iter().map(|a| a[0]).collect();
                    res.sort_unstable();
                    res.dedup();
                    if !check(res) {
                        return None;
                    }
                }
            }
            FollowerStructure::Classes(classes) => {
                for c in classes.iter().filter(|c| c.size > 0) {
                    if !check(c.resources.clone()) {
                        return None;
                    }
                }
            }
        }
        shared
    }

    pub fn validate(&self) -> ValidationReport {
        crate::validate::validate(self)
    }
}

/// A distribution over the leader's actions, indexed like
/// `Game::leader_actions`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeaderStrategy {
    pub probs: Vec<Rational>,
}

impl LeaderStrategy {
    pub fn pure(action: usize, action_count: usize) -> Self {
        let mut probs = vec![Rational::zero(); action_count];
        probs[action] = Rational::one();
        LeaderStrategy { probs }
    }

    pub fn uniform(action_count: usize) -> Self {
        let p = rational(1, action_count as i64);
        LeaderStrategy { probs: vec![p; action_count] }
    }

    /// Converts solver output to an exact distribution: negative noise is
    /// clamped, each entry is snapped to a nearby small-denominator fraction
    /// when one exists, and the result is renormalized to sum to one.
    pub fn from_floats(values: &[f64]) -> Self {
        let mut probs: Vec<Rational> = values
            .iter()
            .map(|&v| {
                let v = v.clamp(0.0, 1.0);
                approximate_rational(v, 1_000_000, 1e-9)
                    .or_else(|| Rational::from_float(v))
                    .unwrap_or_else(Rational::zero)
            })
            .collect();
        let total: Rational = probs.iter().sum();
        if total.is_positive() && !total.is_one() {
            for p in &mut probs {
                *p = &*p / &total;
            }
        }
        LeaderStrategy { probs }
    }

    /// Action index if the strategy is pure.
    pub fn pure_action(&self) -> Option<usize> {
        let mut support = self.probs.iter().enumerate().filter(|(_, p)| !p.is_zero());
        match (support.next(), support.next()) {
            (Some((k, p)), None) if p.is_one() => Some(k),
            _ => None,
        }
    }

    pub fn check(&self, game: &Game) -> Result<(), GameError> {
        if self.probs.len() != game.leader_actions.len() {
            return Err(GameError::InvalidStrategy(format!(
                "{} probabilities for {} leader actions",
                self.probs.len(),
                game.leader_actions.len()
            )));
        }
        if self.probs.iter().any(|p| p.is_negative()) {
            return Err(GameError::InvalidStrategy("negative probability".into()));
        }
        let total: Rational = self.probs.iter().sum();
        if !total.is_one() {
            return Err(GameError::InvalidStrategy(format!("probabilities sum to {total}")));
        }
        Ok(())
    }

    /// `σ_ℓ(i)`: probability that the leader's action contains resource `i`.
    pub fn marginals(&self, game: &Game) -> Vec<Rational> {
        let mut m = vec![Rational::zero(); game.resources];
        for (action, p) in game.leader_actions.iter().zip(&self.probs) {
            if p.is_zero() {
                continue;
            }
            for &i in action {
                m[i] += p;
            }
        }
        m
    }
}

/// Pure behavior of the followers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FollowersOutcome {
    /// Action index per labeled follower. For T-class games the index points
    /// into the follower's class resource list.
    Profile(Vec<usize>),
    /// Per-class configuration: `configs[t][i]` followers of class `t` on
    /// resource `i`.
    Configurations(Vec<Vec<usize>>),
}

impl FollowersOutcome {
    pub fn check(&self, game: &Game) -> Result<(), GameError> {
        match (self, &game.followers) {
            (FollowersOutcome::Profile(profile), _) => {
                let expanded = game.expanded_followers();
                if profile.len() != expanded.len() {
                    return Err(GameError::InvalidOutcome(format!(
                        "profile has {} entries for {} followers",
                        profile.len(),
                        expanded.len()
                    )));
                }
                for (p, (&a, actions)) in profile.iter().zip(&expanded).enumerate() {
                    if a >= actions.len() {
                        return Err(GameError::InvalidOutcome(format!(
                            "follower {p} plays action {a} of {}",
                            actions.len()
                        )));
                    }
                }
                Ok(())
            }
            (FollowersOutcome::Configurations(configs), FollowerStructure::Classes(classes)) => {
                if configs.len() != classes.len() {
                    return Err(GameError::InvalidOutcome(format!(
                        "{} configurations for {} classes",
                        configs.len(),
                        classes.len()
                    )));
                }
                for (t, (nu, class)) in configs.iter().zip(classes).enumerate() {
                    if nu.len() != game.resources {
                        return Err(GameError::InvalidOutcome(format!(
                            "class {t} configuration has length {}",
                            nu.len()
                        )));
                    }
                    if nu.iter().sum::<usize>() != class.size {
                        return Err(GameError::InvalidOutcome(format!(
                            "class {t} configuration places {} of {} followers",
                            nu.iter().sum::<usize>(),
                            class.size
                        )));
                    }
                    if let Some(i) = (0..nu.len()).find(|&i| nu[i] > 0 && !class.resources.contains(&i)) {
                        return Err(GameError::InvalidOutcome(format!(
                            "class {t} uses resource {i} outside its action set"
                        )));
                    }
                }
                Ok(())
            }
            (FollowersOutcome::Configurations(_), FollowerStructure::General(_)) => {
                Err(GameError::InvalidOutcome("configurations require a T-class game".into()))
            }
        }
    }

    /// `ν_i`: followers using each resource.
    pub fn congestion(&self, game: &Game) -> Vec<usize> {
        let mut nu = vec![0; game.resources];
        match self {
            FollowersOutcome::Profile(profile) => match &game.followers {
                FollowerStructure::General(followers) => {
                    for (f, &a) in followers.iter().zip(profile) {
                        for &i in &f.actions[a] {
                            nu[i] += 1;
                        }
                    }
                }
                FollowerStructure::Classes(_) => {
                    let classes = game.follower_classes();
                    let defs = game.classes().unwrap_or(&[]);
                    for (&t, &a) in classes.iter().zip(profile) {
                        nu[defs[t].resources[a]] += 1;
                    }
                }
            },
            FollowersOutcome::Configurations(configs) => {
                for cfg in configs {
                    for (i, &k) in cfg.iter().enumerate() {
                        nu[i] += k;
                    }
                }
            }
        }
        nu
    }

    /// Collapses a labeled profile of a T-class game into configurations.
    pub fn to_configurations(&self, game: &Game) -> Option<FollowersOutcome> {
        let classes = game.classes()?;
        match self {
            FollowersOutcome::Configurations(_) => Some(self.clone()),
            FollowersOutcome::Profile(profile) => {
                let mut configs = vec![vec![0; game.resources]; classes.len()];
                for (&t, &a) in game.follower_classes().iter().zip(profile) {
                    configs[t][classes[t].resources[a]] += 1;
                }
                Some(FollowersOutcome::Configurations(configs))
            }
        }
    }

    /// One labeled profile realizing a configuration (members of a class take
    /// resources in increasing order).
    pub fn to_profile(&self, game: &Game) -> Option<FollowersOutcome> {
        match self {
            FollowersOutcome::Profile(_) => Some(self.clone()),
            FollowersOutcome::Configurations(configs) => {
                let classes = game.classes()?;
                let mut profile = Vec::with_capacity(game.follower_count());
                for (cfg, class) in configs.iter().zip(classes) {
                    for (k, &i) in class.resources.iter().enumerate() {
                        profile.extend(std::iter::repeat_n(k, cfg[i]));
                    }
                }
                Some(FollowersOutcome::Profile(profile))
            }
        }
    }
}

/// One violated invariant found by [`Game::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub location: String,
    pub kind: ViolationKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    EmptyAction,
    UnsortedAction,
    ResourceOutOfRange(usize),
    SingletonRequired,
    EmptyClass,
    NoActions,
    CostTableResources { expected: usize, found: usize },
    CostTableTooShort { required: usize, found: usize },
    NoLeaderActions,
    DuplicateAction,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationKind::EmptyAction => write!(f, "empty action"),
            ViolationKind::UnsortedAction => write!(f, "action resources not sorted and unique"),
            ViolationKind::ResourceOutOfRange(i) => write!(f, "resource {i} out of range"),
            ViolationKind::SingletonRequired => write!(f, "singleton required"),
            ViolationKind::EmptyClass => write!(f, "class has no followers"),
            ViolationKind::NoActions => write!(f, "no actions"),
            ViolationKind::CostTableResources { expected, found } => {
                write!(f, "cost table has {found} rows, expected {expected}")
            }
            ViolationKind::CostTableTooShort { required, found } => {
                write!(f, "cost table too short: {found} entries, need {required}")
            }
            ViolationKind::NoLeaderActions => write!(f, "leader has no actions"),
            ViolationKind::DuplicateAction => write!(f, "duplicate action"),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.kind)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, pred: impl Fn(&ViolationKind) -> bool) -> bool {
        self.violations.iter().any(|v| pred(&v.kind))
    }

    pub fn into_result(self) -> Result<(), GameError> {
        if self.is_valid() {
            Ok(())
        } else {
            let msgs: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
            Err(GameError::InvalidGame(msgs.join("; ")))
        }
    }
}
