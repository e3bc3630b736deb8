//! Key-value experiment configuration.
//!
//! ```text
//! # global settings (all optional)
//! datasets_per_case = 20
//! methods = ncut,kmeans
//! metric = l1
//! clusters = 2
//! sigma = median          # or a positive number
//! kmeans_restarts = 10
//! normalize = false
//! rank = 8
//! max_iters = 500
//! rel_tol = 1e-6
//! lambda = 1e-3
//! epsilon = 1e-12
//! pos_threshold = 1e-9
//! restarts = 5
//!
//! [case g1c1]
//! pattern = same          # same | different | random
//! a.order = 2
//! a.depth = 3             # or binomial(n,p)
//! a.attrs = 2:5,2:5,2:5   # one lo:hi range per attribute
//! a.count = 10
//! b.order = 2
//! b.depth = 3
//! b.attrs = 4:7,4:7,4:7
//! b.count = 10
//! noise.attr_edges = 15   # any noise.* key enables noise
//! noise.attr_sd_frac = 0.3
//! noise.topo_candidates = 5
//! noise.topo_prob = 0.5
//! noise.topo_attrs = 2:5
//! ```
//!
//! Unknown keys, repeated keys and a file without cases are errors. The
//! master seed is not part of the file; it comes from the command line.

use std::collections::BTreeSet;
use std::path::Path;
use std::str::FromStr;

use treeclust_core::cluster::{ClusterMethod, SigmaPolicy};
use treeclust_core::experiment::{DatasetRecipe, ExperimentConfig};
use treeclust_core::simgen::{AttrRange, DepthSpec, NoiseSpec, PatternMode, TreeGenSpec};
use treeclust_core::Metric;

use crate::error::{Error, Result};

pub fn read_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

struct CaseBuilder {
    line: usize,
    id: String,
    pattern: Option<PatternMode>,
    sets: [SetBuilder; 2],
    noise: Option<NoiseSpec>,
}

#[derive(Default)]
struct SetBuilder {
    order: Option<usize>,
    depth: Option<DepthSpec>,
    attrs: Option<Vec<AttrRange>>,
    count: Option<usize>,
}

impl CaseBuilder {
    fn new(line: usize, id: String) -> Self {
        Self {
            line,
            id,
            pattern: None,
            sets: Default::default(),
            noise: None,
        }
    }

    fn set(&mut self, line: usize, key: &str, value: &str) -> Result<()> {
        if let Some((prefix, field)) = key.split_once('.') {
            match prefix {
                "a" | "b" => {
                    let set = &mut self.sets[usize::from(prefix == "b")];
                    match field {
                        "order" => set.order = Some(number(line, key, value)?),
                        "depth" => set.depth = Some(depth(line, value)?),
                        "attrs" => set.attrs = Some(ranges(line, value)?),
                        "count" => set.count = Some(number(line, key, value)?),
                        _ => return Err(unknown(line, key)),
                    }
                }
                "noise" => {
                    let noise = self.noise.get_or_insert_with(NoiseSpec::default);
                    match field {
                        "attr_edges" => noise.attr_edges = number(line, key, value)?,
                        "attr_sd_frac" => noise.attr_sd_frac = number(line, key, value)?,
                        "topo_candidates" => noise.topo_candidates = number(line, key, value)?,
                        "topo_prob" => noise.topo_prob = number(line, key, value)?,
                        "topo_attrs" => noise.topo_attr_range = range(line, value)?,
                        _ => return Err(unknown(line, key)),
                    }
                }
                _ => return Err(unknown(line, key)),
            }
        } else if key == "pattern" {
            self.pattern = Some(
                PatternMode::parse(value)
                    .ok_or_else(|| Error::parse(line, format!("unknown pattern {value:?}")))?,
            );
        } else {
            return Err(unknown(line, key));
        }
        Ok(())
    }

    fn build(self) -> Result<DatasetRecipe> {
        let missing = |what: &str| Error::parse(self.line, format!("case {} is missing {what}", self.id));
        let pattern = self.pattern.ok_or_else(|| missing("pattern"))?;
        let mut specs = Vec::with_capacity(2);
        for (name, set) in ["a", "b"].iter().zip(self.sets) {
            let spec = TreeGenSpec {
                order: set.order.ok_or_else(|| missing(&format!("{name}.order")))?,
                depth: set.depth.ok_or_else(|| missing(&format!("{name}.depth")))?,
                pattern,
                attr_ranges: set.attrs.ok_or_else(|| missing(&format!("{name}.attrs")))?,
                count: set.count.ok_or_else(|| missing(&format!("{name}.count")))?,
            };
            spec.validate()
                .map_err(|e| Error::parse(self.line, format!("case {}: set {name}: {e}", self.id)))?;
            specs.push(spec);
        }
        if let Some(noise) = &self.noise {
            noise
                .validate()
                .map_err(|e| Error::parse(self.line, format!("case {}: noise: {e}", self.id)))?;
        }
        let set_b = specs.pop().unwrap();
        let set_a = specs.pop().unwrap();
        if set_a.attr_ranges.len() != set_b.attr_ranges.len() {
            return Err(Error::parse(
                self.line,
                format!("case {}: sets a and b need the same number of attributes", self.id),
            ));
        }
        Ok(DatasetRecipe {
            id: self.id,
            set_a,
            set_b,
            noise: self.noise,
        })
    }
}

fn unknown(line: usize, key: &str) -> Error {
    Error::parse(line, format!("unknown key {key:?}"))
}

fn number<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::parse(line, format!("{key}: cannot parse {value:?}")))
}

fn depth(line: usize, value: &str) -> Result<DepthSpec> {
    if let Some(args) = value.strip_prefix("binomial(").and_then(|v| v.strip_suffix(')')) {
        let (n, p) = args
            .split_once(',')
            .ok_or_else(|| Error::parse(line, "binomial depth needs (trials,prob)"))?;
        return Ok(DepthSpec::Binomial {
            trials: number(line, "binomial trials", n.trim())?,
            prob: number(line, "binomial prob", p.trim())?,
        });
    }
    Ok(DepthSpec::Fixed(number(line, "depth", value)?))
}

fn range(line: usize, value: &str) -> Result<AttrRange> {
    let (lo, hi) = value
        .split_once(':')
        .ok_or_else(|| Error::parse(line, format!("expected lo:hi, found {value:?}")))?;
    AttrRange::new(number(line, "range", lo.trim())?, number(line, "range", hi.trim())?)
        .map_err(|e| Error::parse(line, e.to_string()))
}

fn ranges(line: usize, value: &str) -> Result<Vec<AttrRange>> {
    value.split(',').map(|r| range(line, r.trim())).collect()
}

fn boolean(line: usize, key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::parse(line, format!("{key}: expected true or false, found {value:?}"))),
    }
}

fn set_global(cfg: &mut ExperimentConfig, line: usize, key: &str, value: &str) -> Result<()> {
    let f = &mut cfg.factorization;
    match key {
        "datasets_per_case" => cfg.datasets_per_case = number(line, key, value)?,
        "methods" => {
            cfg.methods = value
                .split(',')
                .map(|m| {
                    ClusterMethod::parse(m.trim())
                        .ok_or_else(|| Error::parse(line, format!("unknown method {m:?}")))
                })
                .collect::<Result<_>>()?;
        }
        "metric" => {
            cfg.metric =
                Metric::parse(value).ok_or_else(|| Error::parse(line, format!("unknown metric {value:?}")))?;
        }
        "clusters" => cfg.clusters = number(line, key, value)?,
        "sigma" => {
            cfg.sigma = if value == "median" {
                SigmaPolicy::Median
            } else {
                SigmaPolicy::Fixed(number(line, key, value)?)
            };
        }
        "kmeans_restarts" => cfg.kmeans_restarts = number(line, key, value)?,
        "normalize" => cfg.normalize = boolean(line, key, value)?,
        "rank" => f.rank = number(line, key, value)?,
        "max_iters" => f.max_iters = number(line, key, value)?,
        "rel_tol" => f.rel_tol = number(line, key, value)?,
        "lambda" => f.lambda = number(line, key, value)?,
        "epsilon" => f.epsilon = number(line, key, value)?,
        "pos_threshold" => f.pos_threshold = number(line, key, value)?,
        "restarts" => f.restarts = number(line, key, value)?,
        _ => return Err(unknown(line, key)),
    }
    Ok(())
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    let mut current: Option<CaseBuilder> = None;
    let mut seen_keys = BTreeSet::new();
    let mut case_ids = BTreeSet::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(header) = content.strip_prefix('[').and_then(|h| h.strip_suffix(']')) {
            let id = header
                .trim()
                .strip_prefix("case ")
                .map(str::trim)
                .filter(|id| !id.is_empty() && !id.contains(char::is_whitespace))
                .ok_or_else(|| Error::parse(line, format!("expected [case ID], found {content:?}")))?;
            if !case_ids.insert(id.to_owned()) {
                return Err(Error::parse(line, format!("duplicate case {id:?}")));
            }
            if let Some(done) = current.take() {
                cfg.cases.push(done.build()?);
            }
            current = Some(CaseBuilder::new(line, id.to_owned()));
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| Error::parse(line, format!("expected key = value, found {content:?}")))?;
        let scope = current.as_ref().map_or("", |c| c.id.as_str());
        if !seen_keys.insert((scope.to_owned(), key.to_owned())) {
            return Err(Error::parse(line, format!("repeated key {key:?}")));
        }
        match current.as_mut() {
            Some(case) => case.set(line, key, value)?,
            None => set_global(&mut cfg, line, key, value)?,
        }
    }
    if let Some(done) = current {
        cfg.cases.push(done.build()?);
    }
    if cfg.cases.is_empty() {
        return Err(Error::Invalid("config defines no [case ...] sections".into()));
    }
    cfg.validate()?;
    Ok(cfg)
}
