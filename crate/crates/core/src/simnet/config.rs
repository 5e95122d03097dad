//! Scenario parameters and their flat `key = value` text form.

use std::fmt;
use std::str::FromStr;

use crate::trust::{IntimacyMode, NodeId};

use super::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MaliciousKind {
    Hide,
    Drop,
    Mixed,
}

impl MaliciousKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Hide => "hide",
            Self::Drop => "drop",
            Self::Mixed => "mixed",
        }
    }
}

impl FromStr for MaliciousKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hide" | "H" => Ok(Self::Hide),
            "drop" | "D" => Ok(Self::Drop),
            "mixed" => Ok(Self::Mixed),
            _ => Err(format!("unknown malicious kind {s:?} (hide, drop, mixed)")),
        }
    }
}

impl fmt::Display for MaliciousKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Legitimate,
    /// Stays silent during route discovery.
    Hide,
    /// Takes part in discovery but drops data it should relay.
    Drop,
}

impl Role {
    pub fn is_malicious(&self) -> bool {
        !matches!(self, Self::Legitimate)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Legitimate => "legitimate",
            Self::Hide => "hide",
            Self::Drop => "drop",
        }
    }
}

impl FromStr for Role {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "legitimate" | "L" => Ok(Self::Legitimate),
            "hide" | "H" => Ok(Self::Hide),
            "drop" | "D" => Ok(Self::Drop),
            _ => Err(format!("unknown role {s:?}")),
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Everything a run depends on. Two runs with equal configs produce
/// byte-identical event logs.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub node_count: usize,
    /// Width and height in meters.
    pub area: (f64, f64),
    pub tx_range: f64,
    pub speed: f64,
    pub packet_size: u32,
    pub max_connections: usize,
    /// Seconds the destination waits before answering a route request.
    pub reply_delay: f64,
    /// Packets per second per flow.
    pub cbr_rate: f64,
    pub malicious_fraction: f64,
    pub malicious_kind: MaliciousKind,
    /// Share of malicious nodes that hide under `mixed`.
    pub mixed_hide_share: f64,
    pub drop_probability: f64,
    pub sim_duration: f64,
    pub seed: u64,
    pub trust_enabled: bool,
    pub trust_threshold: f64,
    pub e_send: f64,
    pub e_rec: f64,
    pub e_te: f64,
    pub repetitions: usize,

    pub hop_latency: f64,
    pub link_loss: f64,
    pub bitrate: f64,
    pub mobility_interval: f64,
    /// The trust filter stays off until this time.
    pub warmup: f64,
    pub init_trust_low: f64,
    pub init_trust_high: f64,
    pub watchdog_timeout: f64,
    pub rreq_watch_timeout: f64,
    pub rreq_jitter: f64,
    pub discovery_timeout: f64,
    pub discovery_retries: u32,
    pub route_lifetime: f64,
    pub buffer_capacity: usize,
    pub sensor_noise: f64,
    /// Neighbors of both ends of a data hop also watch the relay.
    pub overhear: bool,
    /// `None`: evaluate on every completed interaction.
    pub trust_update_period: Option<f64>,
    pub intimacy_mode: IntimacyMode,
    pub staleness_horizon: f64,
    pub t_max: f64,
    pub history_horizon: f64,
    pub trust_window: Option<f64>,

    /// Fixture overrides; drawn from the seed when absent.
    pub positions: Option<Vec<(f64, f64)>>,
    pub roles: Option<Vec<Role>>,
    pub flows: Option<Vec<(NodeId, NodeId)>>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            node_count: 50,
            area: (1000.0, 1000.0),
            tx_range: 250.0,
            speed: 3.0,
            packet_size: 512,
            max_connections: 12,
            reply_delay: 0.060,
            cbr_rate: 4.0,
            malicious_fraction: 0.0,
            malicious_kind: MaliciousKind::Drop,
            mixed_hide_share: 0.5,
            drop_probability: 1.0,
            sim_duration: 60.0,
            seed: 1,
            trust_enabled: true,
            trust_threshold: 1.0,
            e_send: 2.0,
            e_rec: 1.0,
            e_te: 0.5,
            repetitions: 20,
            hop_latency: 0.002,
            link_loss: 0.0,
            bitrate: 2.0e6,
            mobility_interval: 1.0,
            warmup: 10.0,
            init_trust_low: 0.4,
            init_trust_high: 0.6,
            watchdog_timeout: 0.25,
            rreq_watch_timeout: 0.02,
            rreq_jitter: 0.001,
            discovery_timeout: 0.5,
            discovery_retries: 2,
            route_lifetime: 10.0,
            buffer_capacity: 64,
            sensor_noise: 1.0,
            overhear: true,
            trust_update_period: None,
            intimacy_mode: IntimacyMode::Normalized,
            staleness_horizon: 5.0,
            t_max: 1.0,
            history_horizon: 10.0,
            trust_window: None,
            positions: None,
            roles: None,
            flows: None,
        }
    }
}

fn bad(key: &str, msg: impl fmt::Display) -> SimError {
    SimError::InvalidConfig(format!("{key}: {msg}"))
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T, SimError>
where
    T::Err: fmt::Display,
{
    v.parse::<T>().map_err(|e| bad(key, format!("{v:?}: {e}")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool, SimError> {
    match v {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(bad(key, format!("expected a boolean, got {v:?}"))),
    }
}

fn parse_opt_f64(key: &str, v: &str) -> Result<Option<f64>, SimError> {
    if v == "none" {
        Ok(None)
    } else {
        parse_num(key, v).map(Some)
    }
}

fn opt_to_str(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |x| x.to_string())
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let positive = [
            ("tx_range", self.tx_range),
            ("cbr_rate", self.cbr_rate),
            ("bitrate", self.bitrate),
            ("mobility_interval", self.mobility_interval),
            ("watchdog_timeout", self.watchdog_timeout),
            ("rreq_watch_timeout", self.rreq_watch_timeout),
            ("discovery_timeout", self.discovery_timeout),
            ("t_max", self.t_max),
            ("history_horizon", self.history_horizon),
        ];
        for (k, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(bad(k, format!("must be > 0, got {v}")));
            }
        }
        let nonneg = [
            ("speed", self.speed),
            ("reply_delay", self.reply_delay),
            ("sim_duration", self.sim_duration),
            ("e_send", self.e_send),
            ("e_rec", self.e_rec),
            ("e_te", self.e_te),
            ("hop_latency", self.hop_latency),
            ("warmup", self.warmup),
            ("rreq_jitter", self.rreq_jitter),
            ("route_lifetime", self.route_lifetime),
            ("sensor_noise", self.sensor_noise),
            ("staleness_horizon", self.staleness_horizon),
            ("trust_threshold", self.trust_threshold),
        ];
        for (k, v) in nonneg {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(bad(k, format!("must be >= 0, got {v}")));
            }
        }
        let unit = [
            ("malicious_fraction", self.malicious_fraction),
            ("mixed_hide_share", self.mixed_hide_share),
            ("drop_probability", self.drop_probability),
            ("link_loss", self.link_loss),
            ("init_trust_low", self.init_trust_low),
            ("init_trust_high", self.init_trust_high),
        ];
        for (k, v) in unit {
            if !(0.0..=1.0).contains(&v) {
                return Err(bad(k, format!("must lie in [0, 1], got {v}")));
            }
        }
        if self.init_trust_low > self.init_trust_high {
            return Err(bad("init_trust_low", "exceeds init_trust_high"));
        }
        if !(self.area.0 > 0.0 && self.area.1 > 0.0) {
            return Err(bad("area", "both sides must be > 0"));
        }
        if self.packet_size == 0 {
            return Err(bad("packet_size", "must be > 0"));
        }
        if self.repetitions == 0 {
            return Err(bad("repetitions", "must be >= 1"));
        }
        if let Some(p) = self.trust_update_period {
            if !(p > 0.0) {
                return Err(bad("trust_update_period", "must be > 0"));
            }
        }
        if let Some(w) = self.trust_window {
            if !(w > 0.0) {
                return Err(bad("trust_window", "must be > 0"));
            }
        }
        let n = self.node_count;
        if let Some(p) = &self.positions {
            if p.len() != n {
                return Err(bad(
                    "positions",
                    format!("{} entries for {n} nodes", p.len()),
                ));
            }
            if p.iter().any(|&(x, y)| {
                !(0.0..=self.area.0).contains(&x) || !(0.0..=self.area.1).contains(&y)
            }) {
                return Err(bad("positions", "outside the area"));
            }
        }
        if let Some(r) = &self.roles {
            if r.len() != n {
                return Err(bad("roles", format!("{} entries for {n} nodes", r.len())));
            }
        }
        if let Some(f) = &self.flows {
            if f.iter().any(|&(s, d)| s >= n || d >= n || s == d) {
                return Err(bad("flows", "endpoints must be distinct node ids"));
            }
        }
        Ok(())
    }

    /// Ordered `(key, value)` pairs; parsing them back yields an equal config.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let mut v = vec![
            ("node_count", self.node_count.to_string()),
            ("area", format!("{}x{}", self.area.0, self.area.1)),
            ("tx_range", self.tx_range.to_string()),
            ("speed", self.speed.to_string()),
            ("packet_size", self.packet_size.to_string()),
            ("max_connections", self.max_connections.to_string()),
            ("reply_delay", self.reply_delay.to_string()),
            ("cbr_rate", self.cbr_rate.to_string()),
            ("malicious_fraction", self.malicious_fraction.to_string()),
            ("malicious_kind", self.malicious_kind.to_string()),
            ("mixed_hide_share", self.mixed_hide_share.to_string()),
            ("drop_probability", self.drop_probability.to_string()),
            ("sim_duration", self.sim_duration.to_string()),
            ("seed", self.seed.to_string()),
            ("trust_enabled", self.trust_enabled.to_string()),
            ("trust_threshold", self.trust_threshold.to_string()),
            ("e_send", self.e_send.to_string()),
            ("e_rec", self.e_rec.to_string()),
            ("e_te", self.e_te.to_string()),
            ("repetitions", self.repetitions.to_string()),
            ("hop_latency", self.hop_latency.to_string()),
            ("link_loss", self.link_loss.to_string()),
            ("bitrate", self.bitrate.to_string()),
            ("mobility_interval", self.mobility_interval.to_string()),
            ("warmup", self.warmup.to_string()),
            ("init_trust_low", self.init_trust_low.to_string()),
            ("init_trust_high", self.init_trust_high.to_string()),
            ("watchdog_timeout", self.watchdog_timeout.to_string()),
            ("rreq_watch_timeout", self.rreq_watch_timeout.to_string()),
            ("rreq_jitter", self.rreq_jitter.to_string()),
            ("discovery_timeout", self.discovery_timeout.to_string()),
            ("discovery_retries", self.discovery_retries.to_string()),
            ("route_lifetime", self.route_lifetime.to_string()),
            ("buffer_capacity", self.buffer_capacity.to_string()),
            ("sensor_noise", self.sensor_noise.to_string()),
            ("overhear", self.overhear.to_string()),
            ("trust_update_period", opt_to_str(self.trust_update_period)),
            (
                "intimacy_mode",
                match self.intimacy_mode {
                    IntimacyMode::Normalized => "normalized".into(),
                    IntimacyMode::AsWritten => "as_written".into(),
                },
            ),
            ("staleness_horizon", self.staleness_horizon.to_string()),
            ("t_max", self.t_max.to_string()),
            ("history_horizon", self.history_horizon.to_string()),
            ("trust_window", opt_to_str(self.trust_window)),
        ];
        if let Some(p) = &self.positions {
            let s: Vec<String> = p.iter().map(|(x, y)| format!("{x}:{y}")).collect();
            v.push(("positions", s.join(",")));
        }
        if let Some(r) = &self.roles {
            let s: Vec<&str> = r.iter().map(|r| r.as_str()).collect();
            v.push(("roles", s.join(",")));
        }
        if let Some(f) = &self.flows {
            let s: Vec<String> = f.iter().map(|(a, b)| format!("{a}-{b}")).collect();
            v.push(("flows", s.join(",")));
        }
        v
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), SimError> {
        let v = value.trim();
        match key {
            "node_count" => self.node_count = parse_num(key, v)?,
            "area" => {
                let (w, h) = v
                    .split_once('x')
                    .ok_or_else(|| bad(key, "expected WIDTHxHEIGHT"))?;
                self.area = (parse_num(key, w.trim())?, parse_num(key, h.trim())?);
            }
            "tx_range" => self.tx_range = parse_num(key, v)?,
            "speed" => self.speed = parse_num(key, v)?,
            "packet_size" => self.packet_size = parse_num(key, v)?,
            "max_connections" => self.max_connections = parse_num(key, v)?,
            "reply_delay" => self.reply_delay = parse_num(key, v)?,
            "cbr_rate" => self.cbr_rate = parse_num(key, v)?,
            "malicious_fraction" => self.malicious_fraction = parse_num(key, v)?,
            "malicious_kind" => self.malicious_kind = v.parse().map_err(|e| bad(key, e))?,
            "mixed_hide_share" => self.mixed_hide_share = parse_num(key, v)?,
            "drop_probability" => self.drop_probability = parse_num(key, v)?,
            "sim_duration" => self.sim_duration = parse_num(key, v)?,
            "seed" => self.seed = parse_num(key, v)?,
            "trust_enabled" => self.trust_enabled = parse_bool(key, v)?,
            "trust_threshold" => self.trust_threshold = parse_num(key, v)?,
            "e_send" => self.e_send = parse_num(key, v)?,
            "e_rec" => self.e_rec = parse_num(key, v)?,
            "e_te" => self.e_te = parse_num(key, v)?,
            "repetitions" => self.repetitions = parse_num(key, v)?,
            "hop_latency" => self.hop_latency = parse_num(key, v)?,
            "link_loss" => self.link_loss = parse_num(key, v)?,
            "bitrate" => self.bitrate = parse_num(key, v)?,
            "mobility_interval" => self.mobility_interval = parse_num(key, v)?,
            "warmup" => self.warmup = parse_num(key, v)?,
            "init_trust_low" => self.init_trust_low = parse_num(key, v)?,
            "init_trust_high" => self.init_trust_high = parse_num(key, v)?,
            "watchdog_timeout" => self.watchdog_timeout = parse_num(key, v)?,
            "rreq_watch_timeout" => self.rreq_watch_timeout = parse_num(key, v)?,
            "rreq_jitter" => self.rreq_jitter = parse_num(key, v)?,
            "discovery_timeout" => self.discovery_timeout = parse_num(key, v)?,
            "discovery_retries" => self.discovery_retries = parse_num(key, v)?,
            "route_lifetime" => self.route_lifetime = parse_num(key, v)?,
            "buffer_capacity" => self.buffer_capacity = parse_num(key, v)?,
            "sensor_noise" => self.sensor_noise = parse_num(key, v)?,
            "overhear" => self.overhear = parse_bool(key, v)?,
            "trust_update_period" => self.trust_update_period = parse_opt_f64(key, v)?,
            "intimacy_mode" => {
                self.intimacy_mode = match v {
                    "normalized" => IntimacyMode::Normalized,
                    "as_written" => IntimacyMode::AsWritten,
                    _ => {
                        return Err(bad(
                            key,
                            format!("expected normalized or as_written, got {v:?}"),
                        ))
                    }
                }
            }
            "staleness_horizon" => self.staleness_horizon = parse_num(key, v)?,
            "t_max" => self.t_max = parse_num(key, v)?,
            "history_horizon" => self.history_horizon = parse_num(key, v)?,
            "trust_window" => self.trust_window = parse_opt_f64(key, v)?,
            "positions" => {
                let mut out = Vec::new();
                for item in v.split(',').filter(|s| !s.trim().is_empty()) {
                    let (x, y) = item
                        .split_once(':')
                        .ok_or_else(|| bad(key, "expected x:y pairs"))?;
                    out.push((parse_num(key, x.trim())?, parse_num(key, y.trim())?));
                }
                self.positions = Some(out);
            }
            "roles" => {
                let r: Result<Vec<Role>, _> =
                    v.split(',').map(|s| s.trim().parse::<Role>()).collect();
                self.roles = Some(r.map_err(|e| bad(key, e))?);
            }
            "flows" => {
                let mut out = Vec::new();
                for item in v.split(',').filter(|s| !s.trim().is_empty()) {
                    let (a, b) = item
                        .split_once('-')
                        .ok_or_else(|| bad(key, "expected src-dst pairs"))?;
                    out.push((parse_num(key, a.trim())?, parse_num(key, b.trim())?));
                }
                self.flows = Some(out);
            }
            _ => return Err(SimError::InvalidConfig(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines on top of `self`. `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), SimError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                SimError::InvalidConfig(format!("line {}: expected key = value", i + 1))
            })?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self, SimError> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_text(&self) -> String {
        self.entries()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_table() {
        let c = ScenarioConfig::default();
        assert_eq!(c.node_count, 50);
        assert_eq!(c.tx_range, 250.0);
        assert_eq!(c.speed, 3.0);
        assert_eq!(c.packet_size, 512);
        assert_eq!(c.max_connections, 12);
        assert_eq!(c.reply_delay, 0.060);
        assert_eq!(c.repetitions, 20);
        c.validate().unwrap();
    }

    #[test]
    fn text_round_trip() {
        let mut c = ScenarioConfig {
            positions: Some(vec![(0.0, 0.0), (200.5, 10.0), (400.0, 0.0)]),
            roles: Some(vec![Role::Legitimate, Role::Hide, Role::Legitimate]),
            flows: Some(vec![(0, 2)]),
            node_count: 3,
            trust_update_period: Some(2.0),
            ..ScenarioConfig::default()
        };
        c.malicious_kind = MaliciousKind::Mixed;
        c.intimacy_mode = IntimacyMode::AsWritten;
        let back = ScenarioConfig::from_text(&c.to_text()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn comments_and_unknown_keys() {
        let c =
            ScenarioConfig::from_text("# table one\nnode_count = 20 # fewer\n\nspeed=0\n").unwrap();
        assert_eq!((c.node_count, c.speed), (20, 0.0));
        let err = ScenarioConfig::from_text("nodes = 3").unwrap_err();
        assert!(err.to_string().contains("nodes"));
        let err = ScenarioConfig::from_text("tx_range = abc").unwrap_err();
        assert!(err.to_string().contains("tx_range"));
    }

    #[test]
    fn invariants_enforced() {
        for bad in [
            "tx_range = 0",
            "malicious_fraction = 1.5",
            "sim_duration = -1",
            "repetitions = 0",
        ] {
            assert!(ScenarioConfig::from_text(bad).is_err(), "{bad}");
        }
        assert!(ScenarioConfig::from_text("sim_duration = 0").is_ok());
    }
}
