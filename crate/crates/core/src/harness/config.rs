//! Flat `key = value` scenario files.
//!
//! ```text
//! # comment
//! [scenario]
//! node_count = 35
//! protocol = aodv
//! [adversary]
//! malicious_fraction = 0.1
//! [flows]
//! flows = 1->35, 2->10
//! ```
//!
//! Keys before any section header belong to `[scenario]`. Missing keys keep
//! their defaults. Unknown or misplaced keys are errors.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use thiserror::Error;

use crate::adversary::{MaliciousKind, MaliciousProfile};
use crate::inesh::{NodeId, Point, TrustParams};
use crate::kernel::{MobilityParams, RadioModel, Terrain};
use crate::protocols::{IneshParams, ProtocolParams, RewardPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Protocol {
    #[default]
    Aodv,
    Dsr,
}

impl Protocol {
    pub fn as_str(self) -> &'static str {
        match self {
            Protocol::Aodv => "aodv",
            Protocol::Dsr => "dsr",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Protocol {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "aodv" => Ok(Protocol::Aodv),
            "dsr" => Ok(Protocol::Dsr),
            other => Err(format!("expected aodv or dsr, got `{other}`")),
        }
    }
}

/// Where nodes start.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Placement {
    /// Uniform over the terrain, from the placement random stream.
    #[default]
    Uniform,
    /// Explicit positions for nodes `1..=n`, in order.
    Fixed(Vec<Point>),
}

/// Knobs that are not part of the file format.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tuning {
    pub pause_s: f64,
    pub mobility_tick_s: f64,
    pub per_hop_delay_s: f64,
    pub watchdog_timeout_s: f64,
    pub throughput_window_s: f64,
    pub protocol: ProtocolParams,
    pub reward_policy: RewardPolicy,
}

impl Default for Tuning {
    fn default() -> Self {
        Tuning {
            pause_s: 2.0,
            mobility_tick_s: 0.5,
            per_hop_delay_s: 0.002,
            watchdog_timeout_s: 0.05,
            throughput_window_s: 10.0,
            protocol: ProtocolParams::default(),
            reward_policy: RewardPolicy::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub node_count: usize,
    pub terrain_x_m: f64,
    pub terrain_y_m: f64,
    pub range_m: f64,
    pub max_speed_mps: f64,
    pub data_rate_pps: f64,
    pub payload_bytes: u32,
    pub control_bits: u32,
    pub duration_s: f64,
    pub seed: u64,
    pub protocol: Protocol,
    pub inesh_enabled: bool,
    pub trust_threshold: f64,
    pub trust_init: f64,
    pub trust_reward: f64,
    pub trust_penalty: f64,
    pub malicious_fraction: f64,
    /// Overrides `malicious_fraction` when set.
    pub malicious_nodes: Option<Vec<NodeId>>,
    pub malicious_kind: MaliciousKind,
    pub drop_probability: f64,
    /// Chance that an observed forward is misread as a drop.
    pub false_suspicion_prob: f64,
    /// `None` means one flow from node 1 to node `node_count`.
    pub flows: Option<Vec<(NodeId, NodeId)>>,
    pub placement: Placement,
    pub tuning: Tuning,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            node_count: 35,
            terrain_x_m: 500.0,
            terrain_y_m: 550.0,
            range_m: 150.0,
            max_speed_mps: 20.0,
            data_rate_pps: 4.0,
            payload_bytes: 512,
            control_bits: 120,
            duration_s: 300.0,
            seed: 1,
            protocol: Protocol::Aodv,
            inesh_enabled: false,
            trust_threshold: 0.5,
            trust_init: 0.5,
            trust_reward: 0.1,
            trust_penalty: 0.2,
            malicious_fraction: 0.1,
            malicious_nodes: None,
            malicious_kind: MaliciousKind::Blackhole,
            drop_probability: 1.0,
            false_suspicion_prob: 0.0,
            flows: None,
            placement: Placement::Uniform,
            tuning: Tuning::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value` or `[section]`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown section `[{name}]`")]
    UnknownSection { line: usize, name: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` belongs in [{expected}]")]
    WrongSection { line: usize, key: String, expected: String },
    #[error("line {line}: duplicate key `{key}`")]
    Duplicate { line: usize, key: String },
    #[error("line {line}: `{key}`: {reason}")]
    Value { line: usize, key: String, reason: String },
    #[error("`{key}`: {reason}")]
    Invalid { key: String, reason: String },
}

impl ConfigError {
    /// The offending key, if any.
    pub fn key(&self) -> Option<&str> {
        match self {
            ConfigError::UnknownKey { key, .. }
            | ConfigError::WrongSection { key, .. }
            | ConfigError::Duplicate { key, .. }
            | ConfigError::Value { key, .. }
            | ConfigError::Invalid { key, .. } => Some(key),
            _ => None,
        }
    }

    fn at_line(self, line: usize) -> Self {
        match self {
            ConfigError::Invalid { key, reason } => ConfigError::Value { line, key, reason },
            other => other,
        }
    }
}

const SCENARIO_KEYS: &[&str] = &[
    "node_count",
    "terrain_x_m",
    "terrain_y_m",
    "range_m",
    "max_speed_mps",
    "data_rate_pps",
    "payload_bytes",
    "control_bits",
    "duration_s",
    "seed",
    "protocol",
    "inesh_enabled",
    "trust_threshold",
    "trust_init",
    "trust_reward",
    "trust_penalty",
];

const ADVERSARY_KEYS: &[&str] = &[
    "malicious_fraction",
    "malicious_nodes",
    "malicious_kind",
    "drop_probability",
    "false_suspicion_prob",
];

const FLOW_KEYS: &[&str] = &["flows"];

pub(crate) fn section_of(key: &str) -> Option<&'static str> {
    if SCENARIO_KEYS.contains(&key) {
        Some("scenario")
    } else if ADVERSARY_KEYS.contains(&key) {
        Some("adversary")
    } else if FLOW_KEYS.contains(&key) {
        Some("flows")
    } else {
        None
    }
}

fn invalid(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .parse()
        .map_err(|_| invalid(key, format!("cannot parse `{value}`")))
}

fn parse_real(key: &str, value: &str) -> Result<f64, ConfigError> {
    let v: f64 = parse_num(key, value)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(key, "must be finite"))
    }
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(invalid(key, format!("expected true or false, got `{value}`"))),
    }
}

fn parse_id(key: &str, text: &str) -> Result<NodeId, ConfigError> {
    let id: u32 = parse_num(key, text.trim())?;
    if id == 0 {
        return Err(invalid(key, "node ids start at 1"));
    }
    Ok(NodeId(id))
}

fn parse_id_list(key: &str, value: &str) -> Result<Vec<NodeId>, ConfigError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_id(key, s))
        .collect()
}

fn parse_flows(key: &str, value: &str) -> Result<Vec<(NodeId, NodeId)>, ConfigError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|pair| {
            let (a, b) = pair
                .split_once("->")
                .ok_or_else(|| invalid(key, format!("expected `src->dest`, got `{pair}`")))?;
            Ok((parse_id(key, a)?, parse_id(key, b)?))
        })
        .collect()
}

fn parse_kind(key: &str, value: &str) -> Result<MaliciousKind, ConfigError> {
    match value.to_ascii_lowercase().as_str() {
        "blackhole" => Ok(MaliciousKind::Blackhole),
        "dropper" => Ok(MaliciousKind::Dropper),
        _ => Err(invalid(key, format!("expected blackhole or dropper, got `{value}`"))),
    }
}

impl ScenarioConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        match key {
            "node_count" => self.node_count = parse_num(key, value)?,
            "terrain_x_m" => self.terrain_x_m = parse_real(key, value)?,
            "terrain_y_m" => self.terrain_y_m = parse_real(key, value)?,
            "range_m" => self.range_m = parse_real(key, value)?,
            "max_speed_mps" => self.max_speed_mps = parse_real(key, value)?,
            "data_rate_pps" => self.data_rate_pps = parse_real(key, value)?,
            "payload_bytes" => self.payload_bytes = parse_num(key, value)?,
            "control_bits" => self.control_bits = parse_num(key, value)?,
            "duration_s" => self.duration_s = parse_real(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "protocol" => self.protocol = value.parse().map_err(|e: String| invalid(key, e))?,
            "inesh_enabled" => self.inesh_enabled = parse_bool(key, value)?,
            "trust_threshold" => self.trust_threshold = parse_real(key, value)?,
            "trust_init" => self.trust_init = parse_real(key, value)?,
            "trust_reward" => self.trust_reward = parse_real(key, value)?,
            "trust_penalty" => self.trust_penalty = parse_real(key, value)?,
            "malicious_fraction" => self.malicious_fraction = parse_real(key, value)?,
            "malicious_nodes" => self.malicious_nodes = Some(parse_id_list(key, value)?),
            "malicious_kind" => self.malicious_kind = parse_kind(key, value)?,
            "drop_probability" => self.drop_probability = parse_real(key, value)?,
            "false_suspicion_prob" => self.false_suspicion_prob = parse_real(key, value)?,
            "flows" => self.flows = Some(parse_flows(key, value)?),
            _ => {
                return Err(ConfigError::UnknownKey {
                    line: 0,
                    key: key.to_string(),
                })
            }
        }
        Ok(())
    }

    /// Checks ranges and cross-field consistency.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.validate_key_list().map(|_| ())
    }

    fn validate_key_list(&self) -> Result<(), ConfigError> {
        for key in SCENARIO_KEYS.iter().chain(ADVERSARY_KEYS).chain(FLOW_KEYS) {
            self.validate_key(key)?;
        }
        if let Placement::Fixed(points) = &self.placement {
            if points.len() != self.node_count {
                return Err(invalid("node_count", "fixed placement must list every node"));
            }
        }
        Ok(())
    }

    fn validate_key(&self, key: &str) -> Result<(), ConfigError> {
        let unit = |v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(invalid(key, format!("{v} is outside [0, 1]")))
            }
        };
        let positive = |v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(key, format!("{v} must be positive")))
            }
        };
        let n = self.node_count as u32;
        let known = |id: NodeId| {
            if (1..=n).contains(&id.0) {
                Ok(())
            } else {
                Err(invalid(key, format!("node {id} does not exist (node_count = {n})")))
            }
        };
        match key {
            "node_count" if self.node_count == 0 => Err(invalid(key, "must be at least 1")),
            "node_count" if self.node_count > u32::MAX as usize / 2 => Err(invalid(key, "too large")),
            "terrain_x_m" => positive(self.terrain_x_m),
            "terrain_y_m" => positive(self.terrain_y_m),
            "range_m" => positive(self.range_m),
            "max_speed_mps" if !(self.max_speed_mps >= 0.0 && self.max_speed_mps.is_finite()) => {
                Err(invalid(key, "must be zero or positive"))
            }
            "data_rate_pps" => positive(self.data_rate_pps),
            "payload_bytes" if self.payload_bytes == 0 => Err(invalid(key, "must be positive")),
            "control_bits" if self.control_bits == 0 => Err(invalid(key, "must be positive")),
            "duration_s" => positive(self.duration_s),
            "trust_threshold" => unit(self.trust_threshold),
            "trust_init" => unit(self.trust_init),
            "trust_reward" => unit(self.trust_reward),
            "trust_penalty" => unit(self.trust_penalty),
            "malicious_fraction" => unit(self.malicious_fraction),
            "drop_probability" => unit(self.drop_probability),
            "false_suspicion_prob" => unit(self.false_suspicion_prob),
            "malicious_nodes" => {
                for &id in self.malicious_nodes.iter().flatten() {
                    known(id)?;
                    if self.flow_list().iter().any(|&(s, d)| s == id || d == id) {
                        return Err(invalid(key, format!("node {id} is a flow endpoint")));
                    }
                }
                Ok(())
            }
            "flows" => {
                for (s, d) in self.flow_list() {
                    known(s)?;
                    known(d)?;
                    if s == d {
                        return Err(invalid(key, format!("flow {s}->{d} has the same source and destination")));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// The effective flow list.
    pub fn flow_list(&self) -> Vec<(NodeId, NodeId)> {
        match &self.flows {
            Some(flows) => flows.clone(),
            None => vec![(NodeId(1), NodeId(self.node_count as u32))],
        }
    }

    pub fn terrain(&self) -> Terrain {
        Terrain {
            width: self.terrain_x_m,
            height: self.terrain_y_m,
        }
    }

    pub fn mobility(&self) -> MobilityParams {
        MobilityParams {
            terrain: self.terrain(),
            max_speed: self.max_speed_mps,
            pause: self.tuning.pause_s,
        }
    }

    pub fn radio(&self) -> RadioModel {
        RadioModel {
            range: self.range_m,
            per_hop_delay: self.tuning.per_hop_delay_s,
        }
    }

    pub fn trust_params(&self) -> TrustParams {
        TrustParams {
            initial: self.trust_init,
            reward: self.trust_reward,
            penalty: self.trust_penalty,
        }
    }

    pub fn inesh_params(&self) -> Option<IneshParams> {
        self.inesh_enabled.then_some(IneshParams {
            threshold: self.trust_threshold,
            reward_policy: self.tuning.reward_policy,
        })
    }

    pub fn malicious_profile(&self) -> MaliciousProfile {
        match self.malicious_kind {
            MaliciousKind::Blackhole => MaliciousProfile::blackhole(),
            MaliciousKind::Dropper => MaliciousProfile::dropper(self.drop_probability),
        }
    }
}

/// Parses a scenario file. See the module docs for the grammar.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut cfg = ScenarioConfig::default();
    let mut lines_of: Vec<(&'static str, usize)> = Vec::new();
    let mut section = "scenario";
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = match name.trim() {
                "scenario" => "scenario",
                "adversary" => "adversary",
                "flows" => "flows",
                other => {
                    return Err(ConfigError::UnknownSection {
                        line,
                        name: other.to_string(),
                    })
                }
            };
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                text: content.to_string(),
            });
        };
        let key = key.trim();
        let Some(home) = section_of(key) else {
            return Err(ConfigError::UnknownKey {
                line,
                key: key.to_string(),
            });
        };
        if home != section {
            return Err(ConfigError::WrongSection {
                line,
                key: key.to_string(),
                expected: home.to_string(),
            });
        }
        let key: &'static str = SCENARIO_KEYS
            .iter()
            .chain(ADVERSARY_KEYS)
            .chain(FLOW_KEYS)
            .find(|k| **k == key)
            .expect("section_of accepted it");
        if lines_of.iter().any(|(k, _)| *k == key) {
            return Err(ConfigError::Duplicate {
                line,
                key: key.to_string(),
            });
        }
        lines_of.push((key, line));
        cfg.set(key, value).map_err(|e| e.at_line(line))?;
    }
    if let Err(e) = cfg.validate_key_list() {
        let line = e
            .key()
            .and_then(|k| lines_of.iter().find(|(key, _)| *key == k))
            .map(|&(_, line)| line);
        return Err(match line {
            Some(line) => e.at_line(line),
            None => e,
        });
    }
    Ok(cfg)
}

fn join_ids(ids: &[NodeId]) -> String {
    ids.iter().map(|id| id.to_string()).collect::<Vec<_>>().join(", ")
}

/// Writes every file-format key. `parse_config(&render_config(c)) == c` for
/// any valid `c` with default placement and tuning.
pub fn render_config(cfg: &ScenarioConfig) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "[scenario]");
    let _ = writeln!(out, "node_count = {}", cfg.node_count);
    let _ = writeln!(out, "terrain_x_m = {}", cfg.terrain_x_m);
    let _ = writeln!(out, "terrain_y_m = {}", cfg.terrain_y_m);
    let _ = writeln!(out, "range_m = {}", cfg.range_m);
    let _ = writeln!(out, "max_speed_mps = {}", cfg.max_speed_mps);
    let _ = writeln!(out, "data_rate_pps = {}", cfg.data_rate_pps);
    let _ = writeln!(out, "payload_bytes = {}", cfg.payload_bytes);
    let _ = writeln!(out, "control_bits = {}", cfg.control_bits);
    let _ = writeln!(out, "duration_s = {}", cfg.duration_s);
    let _ = writeln!(out, "seed = {}", cfg.seed);
    let _ = writeln!(out, "protocol = {}", cfg.protocol);
    let _ = writeln!(out, "inesh_enabled = {}", cfg.inesh_enabled);
    let _ = writeln!(out, "trust_threshold = {}", cfg.trust_threshold);
    let _ = writeln!(out, "trust_init = {}", cfg.trust_init);
    let _ = writeln!(out, "trust_reward = {}", cfg.trust_reward);
    let _ = writeln!(out, "trust_penalty = {}", cfg.trust_penalty);
    let _ = writeln!(out, "\n[adversary]");
    let _ = writeln!(out, "malicious_fraction = {}", cfg.malicious_fraction);
    if let Some(ids) = &cfg.malicious_nodes {
        let _ = writeln!(out, "malicious_nodes = {}", join_ids(ids));
    }
    let _ = writeln!(out, "malicious_kind = {}", cfg.malicious_kind);
    let _ = writeln!(out, "drop_probability = {}", cfg.drop_probability);
    let _ = writeln!(out, "false_suspicion_prob = {}", cfg.false_suspicion_prob);
    if let Some(flows) = &cfg.flows {
        let pairs: Vec<String> = flows.iter().map(|(s, d)| format!("{s}->{d}")).collect();
        let _ = writeln!(out, "\n[flows]");
        let _ = writeln!(out, "flows = {}", pairs.join(", "));
    }
    out
}
