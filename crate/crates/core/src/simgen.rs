//! Seeded synthetic forests and noise models.
//!
//! Topologies are sampled top-down: every realized branch above the tree's
//! depth picks a uniformly random nonempty subset of its `order` child
//! slots. Attributes are i.i.d. uniform per branch and per attribute.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal};

use crate::error::{Error, Result};
use crate::seed;
use crate::tree::{SupportTreeSpec, Tree};

/// Attempts allowed when drawing two distinct topologies.
pub const DISTINCT_ATTEMPTS: usize = 1000;
const NOISE_RESAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DepthSpec {
    Fixed(usize),
    /// Depth ~ Binomial(trials, prob), clamped to `[1, support depth]`.
    Binomial { trials: usize, prob: f64 },
}

impl DepthSpec {
    /// Largest depth this spec can produce.
    pub fn max_depth(&self) -> usize {
        match *self {
            DepthSpec::Fixed(d) => d,
            DepthSpec::Binomial { trials, .. } => trials.max(1),
        }
    }

    fn sample(&self, cap: usize, rng: &mut ChaCha8Rng) -> Result<usize> {
        let depth = match *self {
            DepthSpec::Fixed(d) => d,
            DepthSpec::Binomial { trials, prob } => {
                let dist = Binomial::new(trials as u64, prob)
                    .map_err(|e| Error::InvalidConfig(format!("binomial depth: {e}")))?;
                dist.sample(rng) as usize
            }
        };
        Ok(depth.clamp(1, cap))
    }
}

/// How branching patterns are shared inside a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PatternMode {
    /// One topology shared by every tree in both sets.
    Same,
    /// One topology per set; the two differ.
    Different,
    /// Every tree samples its own topology.
    Random,
}

impl PatternMode {
    pub fn name(self) -> &'static str {
        match self {
            PatternMode::Same => "same",
            PatternMode::Different => "different",
            PatternMode::Random => "random",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "same" => Some(PatternMode::Same),
            "different" => Some(PatternMode::Different),
            "random" => Some(PatternMode::Random),
            _ => None,
        }
    }
}

/// Uniform bounds `[lo, hi]` with `0 < lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttrRange {
    pub lo: f64,
    pub hi: f64,
}

impl AttrRange {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo > 0.0 && lo < hi && hi.is_finite() {
            Ok(Self { lo, hi })
        } else {
            Err(Error::InvalidConfig(format!("attribute range [{lo}, {hi}] needs 0 < a < b")))
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        rng.random_range(self.lo..=self.hi)
    }
}

/// Recipe for one set of trees.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeGenSpec {
    pub order: usize,
    pub depth: DepthSpec,
    pub pattern: PatternMode,
    pub attr_ranges: Vec<AttrRange>,
    pub count: usize,
}

impl TreeGenSpec {
    pub fn validate(&self) -> Result<()> {
        if !(2..=3).contains(&self.order) {
            return Err(Error::InvalidConfig(format!("tree order must be 2 or 3, got {}", self.order)));
        }
        match self.depth {
            DepthSpec::Fixed(0) => return Err(Error::InvalidDepth(0)),
            DepthSpec::Binomial { prob, .. } if !(0.0..=1.0).contains(&prob) => {
                return Err(Error::InvalidConfig(format!("binomial probability {prob} outside [0, 1]")))
            }
            _ => {}
        }
        if self.attr_ranges.is_empty() {
            return Err(Error::InvalidConfig("at least one attribute range is required".into()));
        }
        for r in &self.attr_ranges {
            AttrRange::new(r.lo, r.hi)?;
        }
        if self.count == 0 {
            return Err(Error::InvalidConfig("tree count must be at least 1".into()));
        }
        Ok(())
    }

    fn attributes(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        self.attr_ranges.iter().map(|r| r.sample(rng)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    /// Branches receiving attribute noise.
    pub attr_edges: usize,
    /// Noise standard deviation as a fraction of the attribute value.
    pub attr_sd_frac: f64,
    /// Rounds of candidate edge insertion.
    pub topo_candidates: usize,
    /// Per-round insertion probability.
    pub topo_prob: f64,
    pub topo_attr_range: AttrRange,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self {
            attr_edges: 0,
            attr_sd_frac: 0.30,
            topo_candidates: 0,
            topo_prob: 0.5,
            topo_attr_range: AttrRange { lo: 2.0, hi: 5.0 },
        }
    }
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.attr_sd_frac >= 0.0 && self.attr_sd_frac.is_finite()) {
            return Err(Error::InvalidConfig("attr_sd_frac must be nonnegative".into()));
        }
        if !(0.0..=1.0).contains(&self.topo_prob) {
            return Err(Error::InvalidConfig("topo_prob must lie in [0, 1]".into()));
        }
        AttrRange::new(self.topo_attr_range.lo, self.topo_attr_range.hi)?;
        Ok(())
    }
}

/// A labeled simulated forest with its shared support tree.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedDataset {
    pub support: SupportTreeSpec,
    pub trees: Vec<Tree>,
}

pub const SET_LABELS: [&str; 2] = ["A", "B"];

/// Support tree covering both sets: largest order, largest depth, with trunk.
pub fn support_for(set_a: &TreeGenSpec, set_b: &TreeGenSpec) -> Result<SupportTreeSpec> {
    let order = set_a.order.max(set_b.order);
    let depth = set_a.depth.max_depth().max(set_b.depth.max_depth());
    SupportTreeSpec::new(order, depth, true)
}

/// Samples a topology with child slots `1..=order` per branch, down to `depth` levels.
pub fn sample_topology(support: &SupportTreeSpec, order: usize, depth: usize, rng: &mut ChaCha8Rng) -> BTreeSet<usize> {
    let order = order.min(support.order());
    let depth = depth.min(support.depth());
    let mut present = BTreeSet::new();
    let mut frontier: Vec<usize> = if support.trunk() {
        present.insert(1);
        alloc::vec![1]
    } else {
        // the root vertex chooses among the top-level slots
        let picked = pick_children(order, rng, Some);
        present.extend(picked.iter().copied());
        picked
    };
    let first_level = if support.trunk() { 0 } else { 1 };
    for _ in first_level..depth {
        let mut next = Vec::new();
        for &branch in &frontier {
            let children = pick_children(order, rng, |j| support.child(branch, j));
            present.extend(children.iter().copied());
            next.extend(children);
        }
        frontier = next;
    }
    present
}

/// Uniform nonempty subset of child slots `1..=order`.
fn pick_children(order: usize, rng: &mut ChaCha8Rng, slot: impl Fn(usize) -> Option<usize>) -> Vec<usize> {
    let mask: u32 = rng.random_range(1..(1u32 << order));
    (1..=order)
        .filter(|j| mask & (1 << (j - 1)) != 0)
        .filter_map(slot)
        .collect()
}

fn truncate(topology: &BTreeSet<usize>, support: &SupportTreeSpec, depth: usize) -> BTreeSet<usize> {
    topology
        .iter()
        .copied()
        .filter(|&i| support.level(i).is_ok_and(|l| l <= depth))
        .collect()
}

/// Two labeled sets of trees following the pattern semantics of
/// [`PatternMode`]; set A trees come first.
pub fn generate_dataset(set_a: &TreeGenSpec, set_b: &TreeGenSpec, seed: u64) -> Result<SimulatedDataset> {
    set_a.validate()?;
    set_b.validate()?;
    if set_a.attr_ranges.len() != set_b.attr_ranges.len() {
        return Err(Error::InvalidConfig("both sets need the same attribute count".into()));
    }
    if set_a.pattern != set_b.pattern {
        return Err(Error::InvalidConfig("both sets need the same branching-pattern mode".into()));
    }
    let support = support_for(set_a, set_b)?;
    let cap = support.depth();
    let mut rng = seed::rng(seed);

    let templates: Option<[BTreeSet<usize>; 2]> = match set_a.pattern {
        PatternMode::Random => None,
        PatternMode::Same => {
            let order = set_a.order.min(set_b.order);
            let t = sample_topology(&support, order, cap, &mut rng);
            Some([t.clone(), t])
        }
        PatternMode::Different => {
            let ta = sample_topology(&support, set_a.order, set_a.depth.max_depth().min(cap), &mut rng);
            let depth_b = set_b.depth.max_depth().min(cap);
            let mut attempt = 0;
            let tb = loop {
                let tb = sample_topology(&support, set_b.order, depth_b, &mut rng);
                if tb != ta {
                    break tb;
                }
                attempt += 1;
                if attempt >= DISTINCT_ATTEMPTS {
                    return Err(Error::SamplingExhausted(DISTINCT_ATTEMPTS));
                }
            };
            Some([ta, tb])
        }
    };

    let mut trees = Vec::with_capacity(set_a.count + set_b.count);
    for (s, spec) in [set_a, set_b].into_iter().enumerate() {
        let label = SET_LABELS[s];
        for i in 0..spec.count {
            let depth = spec.depth.sample(cap, &mut rng)?;
            let topology = match &templates {
                Some(t) => truncate(&t[s], &support, depth),
                None => sample_topology(&support, spec.order, depth, &mut rng),
            };
            let branches: BTreeMap<usize, Vec<f64>> = topology
                .into_iter()
                .map(|index| (index, spec.attributes(&mut rng)))
                .collect();
            trees.push(Tree::new(format!("{label}{}", i + 1), Some(String::from(label)), branches)?);
        }
    }
    Ok(SimulatedDataset { support, trees })
}

/// Perturbs the attributes of `min(attr_edges, #branches)` randomly chosen
/// branches with zero-mean Gaussian noise of standard deviation
/// `attr_sd_frac · v`, truncated so values stay strictly positive.
pub fn add_attribute_noise(tree: &Tree, spec: &NoiseSpec, seed: u64) -> Result<Tree> {
    spec.validate()?;
    let mut rng = seed::rng(seed);
    let (id, label, mut branches) = tree.clone().into_parts();
    let indices: Vec<usize> = branches.keys().copied().collect();
    let chosen = index::sample(&mut rng, indices.len(), spec.attr_edges.min(indices.len()));
    let mut chosen: Vec<usize> = chosen.into_iter().map(|i| indices[i]).collect();
    chosen.sort_unstable();
    for branch in chosen {
        let row = branches.get_mut(&branch).expect("sampled from keys");
        for v in row.iter_mut() {
            let sd = spec.attr_sd_frac * *v;
            if sd == 0.0 {
                continue;
            }
            let normal = Normal::new(0.0, sd).map_err(|e| Error::InvalidConfig(format!("noise: {e}")))?;
            let mut out = None;
            for _ in 0..NOISE_RESAMPLES {
                let candidate = *v + normal.sample(&mut rng);
                if candidate > 0.0 {
                    out = Some(candidate);
                    break;
                }
            }
            *v = out.unwrap_or(*v * 0.01);
        }
    }
    Tree::new(id, label, branches)
}

/// Up to `topo_candidates` rounds; each round, with probability
/// `topo_prob`, attaches a new branch at a uniformly chosen free child slot
/// of a present branch. Saturated trees pass through unchanged.
pub fn add_topology_noise(tree: &Tree, spec: &NoiseSpec, support: &SupportTreeSpec, seed: u64) -> Result<Tree> {
    spec.validate()?;
    tree.validate(support)?;
    let mut rng = seed::rng(seed);
    let q = tree.q();
    let (id, label, mut branches) = tree.clone().into_parts();
    for _ in 0..spec.topo_candidates {
        if !rng.random_bool(spec.topo_prob) {
            continue;
        }
        let free = free_slots(&branches, support);
        if free.is_empty() {
            continue;
        }
        let slot = free[rng.random_range(0..free.len())];
        let attrs = (0..q).map(|_| spec.topo_attr_range.sample(&mut rng)).collect();
        branches.insert(slot, attrs);
    }
    Tree::new(id, label, branches)
}

/// Absent branches whose parent is present (or absent roots of a no-trunk frame).
pub fn free_slots(branches: &BTreeMap<usize, Vec<f64>>, support: &SupportTreeSpec) -> Vec<usize> {
    let mut free: BTreeSet<usize> = BTreeSet::new();
    if !support.trunk() {
        free.extend(support.roots().filter(|r| !branches.contains_key(r)));
    }
    for &b in branches.keys() {
        free.extend(support.children(b).filter(|c| !branches.contains_key(c)));
    }
    free.into_iter().collect()
}
