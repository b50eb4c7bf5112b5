use std::collections::BTreeMap;

use super::NodeId;

/// Only the most recent observations of a pair are retained.
const HISTORY_LIMIT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservationKind {
    Positive,
    Negative,
}

/// A first-hand record of how a neighbor behaved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub kind: ObservationKind,
    pub sim_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrustOutcome {
    Reward,
    Penalize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrustParams {
    /// Trust assumed for a pair that has never been updated.
    pub initial: f64,
    pub reward: f64,
    pub penalty: f64,
}

impl Default for TrustParams {
    fn default() -> Self {
        TrustParams {
            initial: 0.5,
            reward: 0.1,
            penalty: 0.2,
        }
    }
}

/// Per-(observer, subject) trust scores in `[0, 1]` and the observations
/// behind them.
#[derive(Debug, Clone, PartialEq)]
pub struct TrustTable {
    params: TrustParams,
    trust: BTreeMap<(NodeId, NodeId), f64>,
    observations: BTreeMap<(NodeId, NodeId), Vec<Observation>>,
}

impl Default for TrustTable {
    fn default() -> Self {
        TrustTable::new(TrustParams::default())
    }
}

fn clamp_unit(value: f64) -> f64 {
    if value.is_nan() {
        0.0
    } else {
        value.clamp(0.0, 1.0)
    }
}

impl TrustTable {
    pub fn new(params: TrustParams) -> Self {
        let params = TrustParams {
            initial: clamp_unit(params.initial),
            ..params
        };
        TrustTable {
            params,
            trust: BTreeMap::new(),
            observations: BTreeMap::new(),
        }
    }

    pub fn params(&self) -> &TrustParams {
        &self.params
    }

    pub fn trust(&self, observer: NodeId, subject: NodeId) -> f64 {
        self.trust
            .get(&(observer, subject))
            .copied()
            .unwrap_or(self.params.initial)
    }

    /// Overwrites a score, clamping into `[0, 1]`. Leaves observations alone.
    pub fn set_trust(&mut self, observer: NodeId, subject: NodeId, value: f64) {
        self.trust.insert((observer, subject), clamp_unit(value));
    }

    /// Appends an observation without touching the score.
    pub fn record(&mut self, observer: NodeId, subject: NodeId, observation: Observation) {
        let history = self.observations.entry((observer, subject)).or_default();
        if history.len() == HISTORY_LIMIT {
            history.remove(0);
        }
        history.push(Observation {
            sim_time: observation.sim_time.max(0.0),
            ..observation
        });
    }

    pub fn observations(&self, observer: NodeId, subject: NodeId) -> &[Observation] {
        self.observations
            .get(&(observer, subject))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn last_observation(&self, observer: NodeId, subject: NodeId) -> Option<Observation> {
        self.observations(observer, subject).last().copied()
    }

    /// Applies a reward or penalty, clamps the result and logs the matching
    /// observation. Returns the new score.
    pub fn update(
        &mut self,
        observer: NodeId,
        subject: NodeId,
        outcome: TrustOutcome,
        sim_time: f64,
    ) -> f64 {
        let current = self.trust(observer, subject);
        let (next, kind) = match outcome {
            TrustOutcome::Reward => (current + self.params.reward, ObservationKind::Positive),
            TrustOutcome::Penalize => (current - self.params.penalty, ObservationKind::Negative),
        };
        let next = clamp_unit(next);
        self.trust.insert((observer, subject), next);
        self.record(observer, subject, Observation { kind, sim_time });
        next
    }

    /// Every explicitly stored score.
    pub fn scores(&self) -> impl Iterator<Item = ((NodeId, NodeId), f64)> + '_ {
        self.trust.iter().map(|(&k, &v)| (k, v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterDecision {
    Keep,
    Exclude,
}

/// Decides whether `observer` should drop `candidate` from consideration.
///
/// The candidate is excluded only when all three hold: it is less trusted
/// than `best_alternative`, the observer's latest first-hand observation of
/// it is negative, and its trust is below `threshold`.
pub fn trust_filter(
    candidate: NodeId,
    best_alternative: NodeId,
    table: &TrustTable,
    observer: NodeId,
    threshold: f64,
) -> FilterDecision {
    let candidate_trust = table.trust(observer, candidate);
    let alternative_trust = table.trust(observer, best_alternative);
    let negative = matches!(
        table.last_observation(observer, candidate),
        Some(Observation {
            kind: ObservationKind::Negative,
            ..
        })
    );
    if candidate_trust < alternative_trust && negative && candidate_trust < threshold {
        FilterDecision::Exclude
    } else {
        FilterDecision::Keep
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const OBS: NodeId = NodeId(1);
    const CAND: NodeId = NodeId(2);
    const ALT: NodeId = NodeId(3);

    fn table(cand: f64, alt: f64, last: Option<ObservationKind>) -> TrustTable {
        let mut t = TrustTable::default();
        t.set_trust(OBS, CAND, cand);
        t.set_trust(OBS, ALT, alt);
        if let Some(kind) = last {
            t.record(OBS, CAND, Observation { kind, sim_time: 1.0 });
        }
        t
    }

    #[test]
    fn filter_excludes_less_trusted_negative_candidate() {
        let t = table(0.2, 0.8, Some(ObservationKind::Negative));
        assert_eq!(trust_filter(CAND, ALT, &t, OBS, 0.5), FilterDecision::Exclude);
    }

    #[test]
    fn filter_keeps_more_trusted_candidate() {
        let t = table(0.9, 0.8, Some(ObservationKind::Negative));
        assert_eq!(trust_filter(CAND, ALT, &t, OBS, 0.5), FilterDecision::Keep);
    }

    #[test]
    fn filter_keeps_without_negative_evidence() {
        let t = table(0.2, 0.8, None);
        assert_eq!(trust_filter(CAND, ALT, &t, OBS, 0.5), FilterDecision::Keep);
        let t = table(0.2, 0.8, Some(ObservationKind::Positive));
        assert_eq!(trust_filter(CAND, ALT, &t, OBS, 0.5), FilterDecision::Keep);
    }

    #[test]
    fn filter_respects_threshold() {
        let t = table(0.6, 0.8, Some(ObservationKind::Negative));
        assert_eq!(trust_filter(CAND, ALT, &t, OBS, 0.5), FilterDecision::Keep);
        assert_eq!(trust_filter(CAND, ALT, &t, OBS, 0.7), FilterDecision::Exclude);
    }

    #[test]
    fn missing_entries_use_initial_trust() {
        let mut t = TrustTable::default();
        t.set_trust(OBS, CAND, 0.3);
        t.record(OBS, CAND, Observation { kind: ObservationKind::Negative, sim_time: 0.0 });
        // ALT is unseen and therefore sits at 0.5.
        assert_eq!(trust_filter(CAND, ALT, &t, OBS, 0.5), FilterDecision::Exclude);
        assert_eq!(t.trust(NodeId(9), NodeId(8)), 0.5);
    }

    #[test]
    fn update_clamps() {
        let mut t = TrustTable::default();
        t.set_trust(OBS, CAND, 1.0);
        assert_eq!(t.update(OBS, CAND, TrustOutcome::Reward, 0.0), 1.0);
        t.set_trust(OBS, CAND, 0.0);
        assert_eq!(t.update(OBS, CAND, TrustOutcome::Penalize, 0.0), 0.0);
        t.set_trust(OBS, CAND, 0.5);
        let v = t.update(OBS, CAND, TrustOutcome::Reward, 2.0);
        assert!((v - 0.6).abs() < 1e-12);
        let kinds: Vec<_> = t.observations(OBS, CAND).iter().map(|o| o.kind).collect();
        assert_eq!(
            kinds,
            vec![ObservationKind::Positive, ObservationKind::Negative, ObservationKind::Positive]
        );
    }

    #[test]
    fn history_is_bounded() {
        let mut t = TrustTable::default();
        for i in 0..(HISTORY_LIMIT + 10) {
            t.update(OBS, CAND, TrustOutcome::Reward, i as f64);
        }
        assert_eq!(t.observations(OBS, CAND).len(), HISTORY_LIMIT);
        assert_eq!(t.last_observation(OBS, CAND).unwrap().sim_time, (HISTORY_LIMIT + 9) as f64);
    }

    #[test]
    fn set_trust_clamps_nan_and_range() {
        let mut t = TrustTable::default();
        t.set_trust(OBS, CAND, f64::NAN);
        assert_eq!(t.trust(OBS, CAND), 0.0);
        t.set_trust(OBS, CAND, 7.0);
        assert_eq!(t.trust(OBS, CAND), 1.0);
    }
}
