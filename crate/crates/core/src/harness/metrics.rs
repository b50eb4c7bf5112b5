use crate::protocols::DropReason;

/// One throughput window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputPoint {
    pub window_end: f64,
    pub bits_per_s: f64,
    /// Bits delivered from time zero up to `window_end`.
    pub cumulative_bits: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub sent: u64,
    pub delivered: u64,
    pub dropped: u64,
    pub in_flight: u64,
    /// `delivered / sent`, or 1.0 when nothing was sent.
    pub pdr: f64,
    pub mean_end_to_end_delay: f64,
    /// Control transmissions per delivered data packet.
    pub routing_overhead: f64,
    pub control_transmissions: u64,
    pub data_transmissions: u64,
    pub delivered_bits: u64,
    /// Indexed like [`DropReason::ALL`].
    pub drops_by_reason: [u64; 4],
    pub throughput_series: Vec<ThroughputPoint>,
}

impl MetricsReport {
    pub fn drops(&self, reason: DropReason) -> u64 {
        let i = DropReason::ALL.iter().position(|r| *r == reason).expect("listed");
        self.drops_by_reason[i]
    }

    /// `sent == delivered + dropped + in_flight`.
    pub fn conserved(&self) -> bool {
        self.sent == self.delivered + self.dropped + self.in_flight
    }

    pub fn final_cumulative_bits(&self) -> u64 {
        self.throughput_series.last().map_or(0, |p| p.cumulative_bits)
    }
}

pub fn pdr(delivered: u64, sent: u64) -> f64 {
    if sent == 0 {
        1.0
    } else {
        delivered as f64 / sent as f64
    }
}

/// Buckets `(time, bits)` deliveries into half-open windows `[k*w, (k+1)*w)`
/// covering `[0, horizon)`. A shorter last window is divided by its own
/// length. Deliveries at or past `horizon` are ignored.
pub fn compute_throughput(deliveries: &[(f64, u64)], window: f64, horizon: f64) -> Vec<ThroughputPoint> {
    assert!(window > 0.0, "throughput window must be positive");
    if !(horizon > 0.0) {
        return Vec::new();
    }
    let count = ((horizon / window).ceil() as usize).max(1);
    let mut bits = vec![0u64; count];
    for &(t, b) in deliveries {
        if !(0.0..horizon).contains(&t) {
            continue;
        }
        let k = ((t / window).floor() as usize).min(count - 1);
        bits[k] += b;
    }
    let mut cumulative = 0;
    bits.iter()
        .enumerate()
        .map(|(k, &b)| {
            let start = k as f64 * window;
            let end = ((k + 1) as f64 * window).min(horizon);
            cumulative += b;
            ThroughputPoint {
                window_end: end,
                bits_per_s: b as f64 / (end - start),
                cumulative_bits: cumulative,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_is_all_zero() {
        let s = compute_throughput(&[], 10.0, 30.0);
        assert_eq!(s.len(), 3);
        assert!(s.iter().all(|p| p.bits_per_s == 0.0 && p.cumulative_bits == 0));
        assert_eq!(s[2].window_end, 30.0);
    }

    #[test]
    fn full_window_rate() {
        let d: Vec<(f64, u64)> = (0..100).map(|i| (i as f64 * 0.05, 512 * 8)).collect();
        let s = compute_throughput(&d, 10.0, 10.0);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].bits_per_s, 40_960.0);
    }

    #[test]
    fn boundary_goes_to_later_window() {
        let s = compute_throughput(&[(10.0, 8)], 10.0, 20.0);
        assert_eq!(s[0].bits_per_s, 0.0);
        assert_eq!(s[1].bits_per_s, 0.8);
    }

    #[test]
    fn partial_last_window() {
        let s = compute_throughput(&[(12.0, 10)], 10.0, 15.0);
        assert_eq!(s[1].window_end, 15.0);
        assert_eq!(s[1].bits_per_s, 2.0);
        assert_eq!(s[1].cumulative_bits, 10);
    }

    #[test]
    fn pdr_convention() {
        assert_eq!(pdr(0, 0), 1.0);
        assert_eq!(pdr(3, 4), 0.75);
    }
}
