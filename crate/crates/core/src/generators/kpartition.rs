use num::{BigInt, Zero};
use rand::Rng;
use serde_json::json;

use super::{stream, GeneratorError, RNG_NAME, STREAM_STRUCTURE};
use crate::game::{int, CostTable, FollowerClass, FollowerStructure, FollowersOutcome, Game, LeaderStrategy, Rational};

/// Is there a size-`k` subset of `values` summing to half the total?
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KPartitionInstance {
    pub values: Vec<u64>,
    pub k: usize,
}

impl KPartitionInstance {
    /// `X`, half the total.
    pub fn half(&self) -> u64 {
        self.values.iter().sum::<u64>() / 2
    }

    pub fn check(&self) -> Result<(), GeneratorError> {
        if self.values.is_empty() || self.values.contains(&0) {
            return Err(GeneratorError::InvalidParameters("values must be positive".into()));
        }
        if self.values.iter().sum::<u64>() % 2 == 1 {
            return Err(GeneratorError::InvalidParameters("values sum to an odd total".into()));
        }
        if self.k == 0 || 2 * self.k > self.values.len() {
            return Err(GeneratorError::InvalidParameters(format!("K = {} with {} values", self.k, self.values.len())));
        }
        Ok(())
    }
}

/// Indices of a size-`K` subset summing to `X`, by exhaustive search.
pub fn find_partition(inst: &KPartitionInstance) -> Result<Option<Vec<usize>>, GeneratorError> {
    inst.check()?;
    if inst.values.len() > 24 {
        return Err(GeneratorError::InvalidParameters(format!(
            "{} values is too many to enumerate",
            inst.values.len()
        )));
    }
    let target = inst.half();
    for mask in 0u32..(1 << inst.values.len()) {
        if mask.count_ones() as usize != inst.k {
            continue;
        }
        let chosen: Vec<usize> = (0..inst.values.len()).filter(|&i| mask >> i & 1 == 1).collect();
        if chosen.iter().map(|&i| inst.values[i]).sum::<u64>() == target {
            return Ok(Some(chosen));
        }
    }
    Ok(None)
}

/// Values uniform in `[2, 100]`, `K = size/2`, redrawn until the total is
/// even and no value exceeds half of it.
pub fn gen_random_kpartition(size: usize, seed: u64) -> Result<KPartitionInstance, GeneratorError> {
    if size < 2 || size % 2 == 1 {
        return Err(GeneratorError::InvalidParameters(format!("size {size} must be even and positive")));
    }
    let mut rng = stream(seed, STREAM_STRUCTURE);
    loop {
        let values: Vec<u64> = (0..size).map(|_| rng.random_range(2..=100)).collect();
        let total: u64 = values.iter().sum();
        if total.is_multiple_of(2) && values.iter().all(|&s| 2 * s <= total) {
            return Ok(KPartitionInstance { values, k: size / 2 });
        }
    }
}

// resources: r_i for each value, then r_w, r_x, r_y, r_z
struct Layout {
    items: usize,
}

impl Layout {
    fn w(&self) -> usize {
        self.items
    }
    fn x(&self) -> usize {
        self.items + 1
    }
    fn y(&self) -> usize {
        self.items + 2
    }
    fn z(&self) -> usize {
        self.items + 3
    }
}

/// Four-class singleton game whose OSE costs at most `2X − X/K` when the
/// instance has a solution.
///
/// Classes: `K` followers on `R_S ∪ {r_w}`, `2|S|` on `R_S ∪ {r_z}`, one on
/// `{r_w, r_y}` and one on `{r_x, r_y}`; the leader picks from `R_S ∪ {r_y}`.
pub fn reduce_kpartition(inst: &KPartitionInstance) -> Result<Game, GeneratorError> {
    inst.check()?;
    let x = inst.half();
    if let Some(s) = inst.values.iter().find(|&&s| s > x) {
        return Err(GeneratorError::TrivialNo(format!("value {s} exceeds half the total {x}")));
    }
    let big = |v: u64| Rational::from_integer(BigInt::from(v));
    let (xr, kr) = (big(x), big(inst.k as u64));
    let items = inst.values.len();
    let lay = Layout { items };
    let r = items + 4;
    let n = inst.k + 2 * items + 3;
    let len = n + 2;
    let fill = |first: Rational, second: Rational, rest: Rational| {
        let mut row = vec![first, second];
        row.extend(std::iter::repeat_n(rest, len - 2));
        row
    };

    let two_xk = int(2) * &xr * &kr;
    let c_y = (int(6) * &kr - int(2)) / (int(2) * &kr * &kr - &kr);
    let x4 = xr.pow(4);
    let mut follower = vec![Vec::new(); r];
    let mut leader = vec![Vec::new(); r];
    for (i, &s) in inst.values.iter().enumerate() {
        let ratio = &two_xk / big(s);
        let c_f = (int(1) - &ratio + &two_xk) * &ratio;
        let c_l = int(2) * &xr * (int(2) * &xr - big(s)) / big(s);
        follower[i] = fill(Rational::zero(), ratio, c_f);
        leader[i] = fill(c_l.clone(), c_l, x4.clone());
    }
    follower[lay.w()] = fill(int(1) / &kr, int(1), int(1));
    follower[lay.x()] = fill(int(3) / &kr, int(3) / &kr, int(3) / &kr);
    follower[lay.y()] = fill(int(2) / &kr, c_y.clone(), c_y);
    follower[lay.z()] = fill(two_xk.clone(), two_xk.clone(), two_xk);
    leader[lay.y()] = fill(Rational::zero(), x4.clone(), x4);
    // the leader never reaches r_w, r_x, r_z
    for j in [lay.w(), lay.x(), lay.z()] {
        leader[j] = follower[j].clone();
    }

    let with = |extra: usize| {
        let mut v: Vec<usize> = (0..items).collect();
        v.push(extra);
        v
    };
    let classes = vec![
        FollowerClass { size: inst.k, resources: with(lay.w()) },
        FollowerClass { size: 2 * items, resources: with(lay.z()) },
        FollowerClass { size: 1, resources: vec![lay.w(), lay.y()] },
        FollowerClass { size: 1, resources: vec![lay.x(), lay.y()] },
    ];
    let leader_actions = with(lay.y()).into_iter().map(|i| vec![i]).collect();
    Ok(Game {
        resources: r,
        leader_actions,
        followers: FollowerStructure::Classes(classes),
        follower_costs: CostTable::from_rows(follower),
        leader_costs: CostTable::from_rows(leader),
        metadata: Some(json!({
            "generator": "kpartition",
            "rng": RNG_NAME,
            "parameters": { "size": items, "k": inst.k, "x": x },
            "source": { "values": inst.values, "k": inst.k },
        })),
    })
}

/// Leader strategy and configurations built from a solution `chosen` of the
/// K-PARTITION instance, for the game of [`reduce_kpartition`].
#[derive(Clone, Debug, PartialEq)]
pub struct KPartitionWitness {
    pub strategy: LeaderStrategy,
    pub outcome: FollowersOutcome,
    /// `2X − X/K`.
    pub target: Rational,
}

pub fn kpartition_witness(inst: &KPartitionInstance, chosen: &[usize]) -> Result<KPartitionWitness, GeneratorError> {
    inst.check()?;
    let items = inst.values.len();
    if chosen.len() != inst.k || chosen.iter().any(|&i| i >= items) {
        return Err(GeneratorError::InvalidParameters("chosen set must hold K distinct item indices".into()));
    }
    let x = inst.half();
    let lay = Layout { items };
    let r = items + 4;
    let k = inst.k as i64;
    let two_xk = Rational::from_integer(BigInt::from(2 * x) * BigInt::from(inst.k));

    let mut probs = vec![Rational::zero(); items + 1];
    let mut class1 = vec![0; r];
    let mut class2 = vec![0; r];
    for i in 0..items {
        if chosen.contains(&i) {
            class1[i] = 1;
            probs[i] = Rational::from_integer(BigInt::from(inst.values[i])) / &two_xk;
        } else {
            class2[i] = 2;
        }
    }
    class2[lay.z()] = 2 * inst.k;
    probs[items] = Rational::new(BigInt::from(2 * k - 1), BigInt::from(2 * k));
    let mut class3 = vec![0; r];
    class3[lay.w()] = 1;
    let mut class4 = vec![0; r];
    class4[lay.x()] = 1;
    let xr = Rational::from_integer(BigInt::from(x));
    Ok(KPartitionWitness {
        strategy: LeaderStrategy { probs },
        outcome: FollowersOutcome::Configurations(vec![class1, class2, class3, class4]),
        target: int(2) * &xr - xr / int(k),
    })
}
