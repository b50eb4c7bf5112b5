use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{KernelError, SimTime};

#[derive(Debug, Clone, PartialEq)]
pub struct Event<P> {
    pub fire_at: SimTime,
    /// Insertion counter; breaks ties between events at the same instant.
    pub seq: u64,
    pub payload: P,
}

struct Pending<P>(Event<P>);

impl<P> PartialEq for Pending<P> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<P> Eq for Pending<P> {}

impl<P> Ord for Pending<P> {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .fire_at
            .total_cmp(&self.0.fire_at)
            .then_with(|| other.0.seq.cmp(&self.0.seq))
    }
}

impl<P> PartialOrd for Pending<P> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, PartialEq)]
pub enum Step<P> {
    Fired(Event<P>),
    /// Queue drained, or the next event lies at or past the horizon.
    End,
}

/// Time-ordered event queue. Events fire in `(fire_at, seq)` order and the
/// clock only moves forward.
pub struct EventQueue<P> {
    now: SimTime,
    next_seq: u64,
    horizon: SimTime,
    heap: BinaryHeap<Pending<P>>,
}

impl<P> Default for EventQueue<P> {
    fn default() -> Self {
        Self::new()
    }
}

impl<P> EventQueue<P> {
    pub fn new() -> Self {
        Self::with_horizon(f64::INFINITY)
    }

    /// Events at `t >= horizon` never fire.
    pub fn with_horizon(horizon: SimTime) -> Self {
        EventQueue {
            now: 0.0,
            next_seq: 0,
            horizon,
            heap: BinaryHeap::new(),
        }
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn horizon(&self) -> SimTime {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    /// Enqueues `payload` at absolute time `fire_at` and returns its sequence
    /// number. Zero-delay events are fine; events in the past are a bug.
    pub fn schedule(&mut self, fire_at: SimTime, payload: P) -> Result<u64, KernelError> {
        if !fire_at.is_finite() {
            return Err(KernelError::NotFinite(fire_at));
        }
        if fire_at < self.now {
            return Err(KernelError::InPast {
                at: fire_at,
                now: self.now,
            });
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Pending(Event {
            fire_at,
            seq,
            payload,
        }));
        Ok(seq)
    }

    pub fn schedule_in(&mut self, delay: SimTime, payload: P) -> Result<u64, KernelError> {
        self.schedule(self.now + delay, payload)
    }

    pub fn step(&mut self) -> Step<P> {
        match self.heap.peek() {
            Some(Pending(ev)) if ev.fire_at < self.horizon => {}
            _ => return Step::End,
        }
        let Pending(event) = self.heap.pop().expect("peeked");
        self.now = event.fire_at;
        Step::Fired(event)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fired<P>(step: Step<P>) -> Event<P> {
        match step {
            Step::Fired(e) => e,
            Step::End => panic!("queue ended early"),
        }
    }

    #[test]
    fn schedule_respects_clock() {
        let mut q = EventQueue::new();
        q.schedule(3.0, "a").unwrap();
        fired(q.step());
        assert_eq!(q.now(), 3.0);
        assert!(q.schedule(5.0, "later").is_ok());
        assert!(q.schedule(3.0, "now").is_ok());
        assert_eq!(
            q.schedule(2.0, "past"),
            Err(KernelError::InPast { at: 2.0, now: 3.0 })
        );
        assert!(q.schedule(f64::NAN, "nan").is_err());
    }

    #[test]
    fn earlier_fires_first() {
        let mut q = EventQueue::new();
        q.schedule(2.0, 2).unwrap();
        q.schedule(1.0, 1).unwrap();
        assert_eq!(fired(q.step()).payload, 1);
        assert_eq!(fired(q.step()).payload, 2);
        assert_eq!(q.step(), Step::End);
    }

    #[test]
    fn ties_fire_in_insertion_order() {
        let mut q = EventQueue::new();
        for i in 0..10 {
            q.schedule(1.0, i).unwrap();
        }
        let order: Vec<i32> = (0..10).map(|_| fired(q.step()).payload).collect();
        assert_eq!(order, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn empty_queue_ends() {
        let mut q: EventQueue<()> = EventQueue::new();
        assert_eq!(q.step(), Step::End);
    }

    #[test]
    fn horizon_is_exclusive() {
        let mut q = EventQueue::with_horizon(10.0);
        q.schedule(9.75, "in").unwrap();
        q.schedule(10.0, "out").unwrap();
        assert_eq!(fired(q.step()).payload, "in");
        assert_eq!(q.step(), Step::End);
        assert_eq!(q.len(), 1);
    }
}
