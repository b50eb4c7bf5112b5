use rand::Rng;

use super::SimTime;
use crate::inesh::{NodeId, Point};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Terrain {
    pub width: f64,
    pub height: f64,
}

impl Default for Terrain {
    fn default() -> Self {
        Terrain {
            width: 500.0,
            height: 550.0,
        }
    }
}

impl Terrain {
    pub fn contains(&self, p: Point) -> bool {
        (0.0..=self.width).contains(&p.x) && (0.0..=self.height).contains(&p.y)
    }

    pub fn clamp(&self, p: Point) -> Point {
        Point::new(p.x.clamp(0.0, self.width), p.y.clamp(0.0, self.height))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let x = rng.gen::<f64>() * self.width;
        let y = rng.gen::<f64>() * self.height;
        Point::new(x, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobilityParams {
    pub terrain: Terrain,
    /// Upper bound on node speed, m/s. Zero freezes every node in place.
    pub max_speed: f64,
    /// Dwell time at each reached waypoint, seconds.
    pub pause: SimTime,
}

impl Default for MobilityParams {
    fn default() -> Self {
        MobilityParams {
            terrain: Terrain::default(),
            max_speed: 20.0,
            pause: 2.0,
        }
    }
}

impl MobilityParams {
    /// Uniform on `(0, max_speed]`.
    fn draw_speed<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.max_speed * (1.0 - rng.gen::<f64>())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobileNode {
    pub id: NodeId,
    pub position: Point,
    pub waypoint: Point,
    pub speed: f64,
    pub pause_until: SimTime,
}

impl MobileNode {
    /// A node that never moves.
    pub fn fixed(id: NodeId, position: Point) -> Self {
        MobileNode {
            id,
            position,
            waypoint: position,
            speed: 0.0,
            pause_until: f64::INFINITY,
        }
    }

    /// A node placed at `position` that heads off to a freshly drawn waypoint.
    pub fn spawn<R: Rng + ?Sized>(
        id: NodeId,
        position: Point,
        params: &MobilityParams,
        rng: &mut R,
    ) -> Self {
        if params.max_speed <= 0.0 {
            return MobileNode::fixed(id, position);
        }
        let waypoint = params.terrain.sample(rng);
        let speed = params.draw_speed(rng);
        MobileNode {
            id,
            position,
            waypoint,
            speed,
            pause_until: 0.0,
        }
    }
}

/// Random-waypoint step over `[now, now + dt)`.
///
/// A paused node stays put. A moving node covers `min(speed * dt, remaining)`
/// toward its waypoint; on arrival it pauses, then gets a new uniform
/// waypoint and a new speed in `(0, max_speed]`.
pub fn waypoint_advance<R: Rng + ?Sized>(
    node: &MobileNode,
    now: SimTime,
    dt: SimTime,
    params: &MobilityParams,
    rng: &mut R,
) -> MobileNode {
    let mut next = *node;
    if node.speed <= 0.0 || now < node.pause_until || dt <= 0.0 {
        return next;
    }
    let dx = node.waypoint.x - node.position.x;
    let dy = node.waypoint.y - node.position.y;
    let remaining = dx.hypot(dy);
    let step = node.speed * dt;
    if step < remaining {
        let scale = step / remaining;
        next.position = params
            .terrain
            .clamp(Point::new(node.position.x + dx * scale, node.position.y + dy * scale));
    } else {
        next.position = node.waypoint;
        next.pause_until = now + dt + params.pause;
        next.waypoint = params.terrain.sample(rng);
        next.speed = params.draw_speed(rng);
    }
    next
}
