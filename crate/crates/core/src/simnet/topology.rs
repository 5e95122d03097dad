//! Node placement, random-waypoint mobility and neighbor graphs.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::trust::NodeId;

use super::config::{MaliciousKind, Role, ScenarioConfig};
use super::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Energy {
    pub send: f64,
    pub rec: f64,
    pub te: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouteEntry {
    pub next_hop: NodeId,
    pub hops: u32,
    pub seq: u32,
    /// Expiry in microseconds.
    pub expires: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeState {
    pub id: NodeId,
    pub position: (f64, f64),
    pub waypoint: (f64, f64),
    /// Meters per second toward the waypoint.
    pub velocity: (f64, f64),
    pub role: Role,
    /// Indexed by destination.
    pub routes: Vec<Option<RouteEntry>>,
    pub energy: Energy,
    pub neighbors: Vec<NodeId>,
}

impl NodeState {
    pub fn route(&self, dst: NodeId, now: u64) -> Option<RouteEntry> {
        self.routes[dst].filter(|r| r.expires > now)
    }
}

pub fn distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

pub fn in_range(a: (f64, f64), b: (f64, f64), range: f64) -> bool {
    distance(a, b) <= range
}

fn random_point(area: (f64, f64), rng: &mut impl Rng) -> (f64, f64) {
    (rng.random::<f64>() * area.0, rng.random::<f64>() * area.1)
}

/// Assigns ⌊fraction·n⌋ malicious roles to a seeded random subset.
pub fn assign_roles(cfg: &ScenarioConfig, rng: &mut impl Rng) -> Vec<Role> {
    let n = cfg.node_count;
    let m = (cfg.malicious_fraction * n as f64 + 1e-9).floor() as usize;
    let mut ids: Vec<NodeId> = (0..n).collect();
    ids.shuffle(rng);
    let hide = match cfg.malicious_kind {
        MaliciousKind::Hide => m,
        MaliciousKind::Drop => 0,
        MaliciousKind::Mixed => (m as f64 * cfg.mixed_hide_share).round() as usize,
    };
    let mut roles = vec![Role::Legitimate; n];
    for (k, &id) in ids[..m].iter().enumerate() {
        roles[id] = if k < hide { Role::Hide } else { Role::Drop };
    }
    roles
}

/// Places nodes and assigns roles; positions, roles and waypoints all come
/// from `rng` unless the config pins them.
pub fn build_topology(
    cfg: &ScenarioConfig,
    rng: &mut impl Rng,
) -> Result<Vec<NodeState>, SimError> {
    cfg.validate()?;
    let n = cfg.node_count;
    let positions: Vec<(f64, f64)> = match &cfg.positions {
        Some(p) => p.clone(),
        None => (0..n).map(|_| random_point(cfg.area, rng)).collect(),
    };
    let roles = match &cfg.roles {
        Some(r) => r.clone(),
        None => assign_roles(cfg, rng),
    };
    let mut nodes: Vec<NodeState> = (0..n)
        .map(|id| {
            let waypoint = random_point(cfg.area, rng);
            let mut node = NodeState {
                id,
                position: positions[id],
                waypoint,
                velocity: (0.0, 0.0),
                role: roles[id],
                routes: vec![None; n],
                energy: Energy::default(),
                neighbors: Vec::new(),
            };
            set_velocity(&mut node, cfg.speed);
            node
        })
        .collect();
    update_neighbors(&mut nodes, cfg.tx_range);
    Ok(nodes)
}

fn set_velocity(node: &mut NodeState, speed: f64) {
    let d = distance(node.position, node.waypoint);
    node.velocity = if d > 0.0 {
        (
            (node.waypoint.0 - node.position.0) / d * speed,
            (node.waypoint.1 - node.position.1) / d * speed,
        )
    } else {
        (0.0, 0.0)
    };
}

/// Random-waypoint step: travels `speed·dt` meters along the current leg,
/// drawing fresh waypoints (zero pause) as legs complete. Positions never
/// leave the area since waypoints are drawn inside it.
pub fn mobility_tick(
    node: &mut NodeState,
    dt: f64,
    speed: f64,
    area: (f64, f64),
    rng: &mut impl Rng,
) {
    let mut remaining = speed * dt;
    // Bounded so a degenerate area cannot spin forever.
    for _ in 0..64 {
        if remaining <= 0.0 {
            break;
        }
        let d = distance(node.position, node.waypoint);
        if d > remaining {
            let f = remaining / d;
            node.position.0 += (node.waypoint.0 - node.position.0) * f;
            node.position.1 += (node.waypoint.1 - node.position.1) * f;
            remaining = 0.0;
        } else {
            node.position = node.waypoint;
            remaining -= d;
            node.waypoint = random_point(area, rng);
        }
    }
    node.position.0 = node.position.0.clamp(0.0, area.0);
    node.position.1 = node.position.1.clamp(0.0, area.1);
    set_velocity(node, speed);
}

pub fn update_neighbors(nodes: &mut [NodeState], range: f64) {
    let pos: Vec<(f64, f64)> = nodes.iter().map(|n| n.position).collect();
    for (i, node) in nodes.iter_mut().enumerate() {
        node.neighbors.clear();
        for (j, &p) in pos.iter().enumerate() {
            if i != j && in_range(pos[i], p, range) {
                node.neighbors.push(j);
            }
        }
    }
}

/// BFS hop counts from `src` over the neighbor graph; `u32::MAX` when unreachable.
pub fn hop_counts(nodes: &[NodeState], src: NodeId) -> Vec<u32> {
    let mut dist = vec![u32::MAX; nodes.len()];
    let mut queue = VecDeque::from([src]);
    dist[src] = 0;
    while let Some(u) = queue.pop_front() {
        for &v in &nodes[u].neighbors {
            if dist[v] == u32::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Row-major all-pairs hop matrix.
pub fn hop_matrix(nodes: &[NodeState]) -> Vec<u32> {
    nodes.iter().flat_map(|n| hop_counts(nodes, n.id)).collect()
}

pub fn is_connected(nodes: &[NodeState]) -> bool {
    nodes.is_empty() || hop_counts(nodes, 0).iter().all(|&h| h != u32::MAX)
}

/// Route discovery on a frozen snapshot: the request floods breadth-first
/// with uniform per-hop latency, so the first copy to reach `dst` follows a
/// fewest-hop path (ties go to the lowest relay id). Hiding nodes never
/// relay; with `trusted` supplied, neither do nodes marked untrusted.
pub fn route_discovery(
    nodes: &[NodeState],
    src: NodeId,
    dst: NodeId,
    trusted: Option<&[bool]>,
) -> Result<Vec<NodeId>, SimError> {
    if src == dst {
        return Err(SimError::InvalidConfig(
            "route discovery needs src != dst".into(),
        ));
    }
    let n = nodes.len();
    let mut prev = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([src]);
    seen[src] = true;
    while let Some(u) = queue.pop_front() {
        if u != src {
            let relays = nodes[u].role != Role::Hide && trusted.is_none_or(|t| t[u]);
            if !relays {
                continue;
            }
        }
        let mut next: Vec<NodeId> = nodes[u].neighbors.clone();
        next.sort_unstable();
        for v in next {
            if !seen[v] {
                seen[v] = true;
                prev[v] = u;
                if v == dst {
                    let mut path = vec![dst];
                    let mut cur = dst;
                    while cur != src {
                        cur = prev[cur];
                        path.push(cur);
                    }
                    path.reverse();
                    return Ok(path);
                }
                queue.push_back(v);
            }
        }
    }
    Err(SimError::NoRoute { src, dst })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fixture(positions: &[(f64, f64)], roles: &[Role]) -> Vec<NodeState> {
        let cfg = ScenarioConfig {
            node_count: positions.len(),
            positions: Some(positions.to_vec()),
            roles: Some(roles.to_vec()),
            ..ScenarioConfig::default()
        };
        build_topology(&cfg, &mut ChaCha8Rng::seed_from_u64(0)).unwrap()
    }

    #[test]
    fn malicious_count_is_floor() {
        let cfg = ScenarioConfig {
            malicious_fraction: 0.1,
            ..ScenarioConfig::default()
        };
        let nodes = build_topology(&cfg, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(nodes.iter().filter(|n| n.role.is_malicious()).count(), 5);
        let cfg = ScenarioConfig {
            malicious_fraction: 0.0,
            ..ScenarioConfig::default()
        };
        let nodes = build_topology(&cfg, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert!(nodes.iter().all(|n| n.role == Role::Legitimate));
    }

    #[test]
    fn mixed_splits_evenly() {
        let cfg = ScenarioConfig {
            malicious_fraction: 0.2,
            malicious_kind: MaliciousKind::Mixed,
            ..ScenarioConfig::default()
        };
        let roles = assign_roles(&cfg, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(roles.iter().filter(|r| **r == Role::Hide).count(), 5);
        assert_eq!(roles.iter().filter(|r| **r == Role::Drop).count(), 5);
    }

    #[test]
    fn same_seed_same_topology() {
        let cfg = ScenarioConfig {
            malicious_fraction: 0.3,
            ..ScenarioConfig::default()
        };
        let a = build_topology(&cfg, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        let b = build_topology(&cfg, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        assert_eq!(a, b);
        let c = build_topology(&cfg, &mut ChaCha8Rng::seed_from_u64(12)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn mobility_step_length() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut nodes = fixture(&[(500.0, 500.0)], &[Role::Legitimate]);
        let node = &mut nodes[0];
        node.waypoint = (900.0, 500.0);
        mobility_tick(node, 1.0, 3.0, (1000.0, 1000.0), &mut rng);
        assert!((distance(node.position, (500.0, 500.0)) - 3.0).abs() < 1e-12);
        let before = node.position;
        mobility_tick(node, 1.0, 0.0, (1000.0, 1000.0), &mut rng);
        assert_eq!(node.position, before);
    }

    #[test]
    fn range_predicate() {
        let l = Role::Legitimate;
        let nodes = fixture(&[(0.0, 0.0), (251.0, 0.0), (0.0, 249.0)], &[l, l, l]);
        assert_eq!(nodes[0].neighbors, vec![2]);
        assert!(nodes[1].neighbors.is_empty());
    }

    #[test]
    fn chain_hide_and_diamond() {
        let l = Role::Legitimate;
        let chain = [(0.0, 0.0), (200.0, 0.0), (400.0, 0.0)];
        let nodes = fixture(&chain, &[l, l, l]);
        assert_eq!(route_discovery(&nodes, 0, 2, None).unwrap(), vec![0, 1, 2]);
        let nodes = fixture(&chain, &[l, Role::Hide, l]);
        assert_eq!(
            route_discovery(&nodes, 0, 2, None),
            Err(SimError::NoRoute { src: 0, dst: 2 })
        );

        let diamond = [(0.0, 100.0), (200.0, 0.0), (200.0, 200.0), (400.0, 100.0)];
        let nodes = fixture(&diamond, &[l, l, l, l]);
        assert_eq!(route_discovery(&nodes, 0, 3, None).unwrap(), vec![0, 1, 3]);
        let trusted = [true, false, true, true];
        assert_eq!(
            route_discovery(&nodes, 0, 3, Some(&trusted)).unwrap(),
            vec![0, 2, 3]
        );
        let none = [true, false, false, true];
        assert!(route_discovery(&nodes, 0, 3, Some(&none)).is_err());
    }
}
