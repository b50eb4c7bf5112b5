//! Parameter sweeps. A campaign file is a scenario file plus a `[sweep]`
//! section of comma-separated axes:
//!
//! ```text
//! [sweep]
//! node_count = 35, 40, 45, 50
//! protocol = aodv, dsr
//! inesh_enabled = false, true
//! seed = 1, 2, 3, 4, 5
//! malicious_fraction = 0, 0.1
//! ```
//!
//! The run set is the cross product, ordered node_count, protocol,
//! inesh_enabled, malicious_fraction, seed (last varies fastest). An empty or
//! missing axis keeps the base value.

use rayon::prelude::*;
use thiserror::Error;

use super::config::{parse_config, render_config, ConfigError, ScenarioConfig};
use super::output::RunRecord;
use super::scenario::{run_scenario, ScenarioError};

const AXES: &[&str] = &["node_count", "protocol", "inesh_enabled", "malicious_fraction", "seed"];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CampaignSpec {
    pub base: ScenarioConfig,
    /// `(key, values)` in sweep order; only keys from the fixed axis list.
    pub axes: Vec<(String, Vec<String>)>,
}

#[derive(Debug, Error)]
#[error("run {run_id} failed: {source}\n--- config ---\n{config}")]
pub struct CampaignError {
    pub run_id: usize,
    pub config: String,
    #[source]
    pub source: ScenarioError,
}

impl CampaignSpec {
    /// Values for `key`, or an empty slice when the axis is not swept.
    pub fn axis(&self, key: &str) -> &[String] {
        self.axes
            .iter()
            .find(|(k, _)| k == key)
            .map_or(&[], |(_, v)| v.as_slice())
    }

    pub fn set_axis(&mut self, key: &str, values: Vec<String>) {
        self.axes.retain(|(k, _)| k != key);
        self.axes.push((key.to_string(), values));
    }

    /// Every configuration in run order.
    pub fn expand(&self) -> Result<Vec<ScenarioConfig>, ConfigError> {
        let mut runs = vec![self.base.clone()];
        for key in AXES {
            let values = self.axis(key);
            if values.is_empty() {
                continue;
            }
            let mut next = Vec::with_capacity(runs.len() * values.len());
            for cfg in &runs {
                for v in values {
                    let mut c = cfg.clone();
                    c.set(key, v)?;
                    next.push(c);
                }
            }
            runs = next;
        }
        Ok(runs)
    }
}

/// Parses a campaign file. Errors carry the line number in the file.
pub fn parse_campaign(text: &str) -> Result<CampaignSpec, ConfigError> {
    let mut scenario_text = String::new();
    let mut axes: Vec<(String, Vec<String>, usize)> = Vec::new();
    let mut in_sweep = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            in_sweep = name.trim() == "sweep";
        }
        if !in_sweep {
            scenario_text.push_str(raw);
            scenario_text.push('\n');
            continue;
        }
        // Keep line numbers aligned for the scenario parser.
        scenario_text.push('\n');
        if content.is_empty() || content.starts_with('[') {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                text: content.to_string(),
            });
        };
        let key = key.trim();
        if !AXES.contains(&key) {
            return Err(ConfigError::UnknownKey {
                line,
                key: key.to_string(),
            });
        }
        if axes.iter().any(|(k, _, _)| k == key) {
            return Err(ConfigError::Duplicate {
                line,
                key: key.to_string(),
            });
        }
        let values: Vec<String> = value
            .split(',')
            .map(|v| v.trim().to_string())
            .filter(|v| !v.is_empty())
            .collect();
        axes.push((key.to_string(), values, line));
    }

    let base = parse_config(&scenario_text)?;
    for (key, values, line) in &axes {
        for v in values {
            let mut probe = base.clone();
            let located = |e: ConfigError| match e {
                ConfigError::Invalid { key, reason } | ConfigError::Value { key, reason, .. } => {
                    ConfigError::Value {
                        line: *line,
                        key,
                        reason,
                    }
                }
                other => other,
            };
            probe.set(key, v).map_err(located)?;
            probe.validate().map_err(located)?;
        }
    }
    Ok(CampaignSpec {
        base,
        axes: axes.into_iter().map(|(k, v, _)| (k, v)).collect(),
    })
}

/// Runs every configuration, in parallel, and returns records ordered by
/// run id. The first failing run (by id) aborts the campaign.
pub fn run_campaign(spec: &CampaignSpec) -> Result<Vec<RunRecord>, CampaignError> {
    let configs = spec.expand().map_err(|e| CampaignError {
        run_id: 0,
        config: render_config(&spec.base),
        source: ScenarioError::Config(e),
    })?;
    configs
        .into_par_iter()
        .enumerate()
        .map(|(run_id, config)| match run_scenario(&config) {
            Ok(out) => Ok(RunRecord {
                run_id,
                malicious_count: out.malicious.len(),
                config,
                report: out.report,
            }),
            Err(source) => Err(CampaignError {
                run_id,
                config: render_config(&config),
                source,
            }),
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::Protocol;

    #[test]
    fn cross_product_count_and_order() {
        let spec = parse_campaign("[sweep]\nnode_count = 35, 40, 45, 50\nprotocol = aodv, dsr\nseed = 7\n").unwrap();
        let runs = spec.expand().unwrap();
        assert_eq!(runs.len(), 8);
        assert_eq!((runs[0].node_count, runs[0].protocol), (35, Protocol::Aodv));
        assert_eq!((runs[1].node_count, runs[1].protocol), (35, Protocol::Dsr));
        assert_eq!(runs[7].node_count, 50);
        assert!(runs.iter().all(|c| c.seed == 7));
    }

    #[test]
    fn empty_axes_mean_base_only() {
        let spec = parse_campaign("node_count = 12\n[sweep]\nseed =\n").unwrap();
        let runs = spec.expand().unwrap();
        assert_eq!(runs.len(), 1);
        assert_eq!(runs[0].node_count, 12);
    }

    #[test]
    fn bad_axis_value_names_line() {
        let err = parse_campaign("seed = 1\n[sweep]\nnode_count = 3, 0\n").unwrap_err();
        assert!(matches!(err, ConfigError::Value { line: 3, ref key, .. } if key == "node_count"), "{err:?}");
        let err = parse_campaign("[sweep]\nrange_m = 1, 2\n").unwrap_err();
        assert!(matches!(err, ConfigError::UnknownKey { line: 2, .. }));
    }

    #[test]
    fn scenario_errors_keep_their_line() {
        let err = parse_campaign("[sweep]\nseed = 1\n[scenario]\nrange_m = -1\n").unwrap_err();
        assert!(matches!(err, ConfigError::Value { line: 4, .. }), "{err:?}");
    }
}
