//! Line-oriented record of every trust evaluation.
//!
//! One record per line, tab-separated, fields in [`AuditRecord::FIELDS`]
//! order. Missing values are written as `-`.

use std::fmt::Write as _;

use super::state::Classification;
use super::{NodeId, TrustError};

#[derive(Debug, Clone, PartialEq)]
pub struct AuditRecord {
    pub time: f64,
    pub assessor: NodeId,
    pub assessee: NodeId,
    pub rfi: f64,
    pub intimacy: f64,
    pub honesty: f64,
    pub direct_behavioral: f64,
    pub behavioral_recs: usize,
    pub behavioral_raw: f64,
    pub behavioral: f64,
    pub reading: f64,
    pub history_mean: Option<f64>,
    pub direct_data: f64,
    pub data_recs: usize,
    pub data_raw: f64,
    pub data: f64,
    pub total: f64,
    pub classification: Classification,
    /// Whether the evaluation replaced the assessee's shared trust state.
    pub applied: bool,
    pub degenerate_intimacy: bool,
}

impl AuditRecord {
    pub const FIELDS: [&'static str; 20] = [
        "time",
        "assessor",
        "assessee",
        "rfi",
        "intimacy",
        "honesty",
        "direct_behavioral",
        "behavioral_recs",
        "behavioral_raw",
        "behavioral",
        "reading",
        "history_mean",
        "direct_data",
        "data_recs",
        "data_raw",
        "data",
        "total",
        "class",
        "applied",
        "flags",
    ];

    pub fn to_line(&self) -> String {
        let mut s = String::new();
        let hm = self.history_mean.map_or("-".to_string(), |v| v.to_string());
        let flags = if self.degenerate_intimacy {
            "degenerate_intimacy"
        } else {
            "-"
        };
        write!(
            s,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.time,
            self.assessor,
            self.assessee,
            self.rfi,
            self.intimacy,
            self.honesty,
            self.direct_behavioral,
            self.behavioral_recs,
            self.behavioral_raw,
            self.behavioral,
            self.reading,
            hm,
            self.direct_data,
            self.data_recs,
            self.data_raw,
            self.data,
            self.total,
            self.classification,
            u8::from(self.applied),
            flags
        )
        .unwrap();
        s
    }

    pub fn parse_line(line: &str) -> Result<Self, TrustError> {
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != Self::FIELDS.len() {
            return Err(TrustError::Audit(format!(
                "expected {} fields, got {}",
                Self::FIELDS.len(),
                f.len()
            )));
        }
        let num = |i: usize| -> Result<f64, TrustError> {
            f[i].parse::<f64>().map_err(|_| {
                TrustError::Audit(format!("{}: bad number {:?}", Self::FIELDS[i], f[i]))
            })
        };
        let int = |i: usize| -> Result<usize, TrustError> {
            f[i].parse::<usize>().map_err(|_| {
                TrustError::Audit(format!("{}: bad integer {:?}", Self::FIELDS[i], f[i]))
            })
        };
        Ok(Self {
            time: num(0)?,
            assessor: int(1)?,
            assessee: int(2)?,
            rfi: num(3)?,
            intimacy: num(4)?,
            honesty: num(5)?,
            direct_behavioral: num(6)?,
            behavioral_recs: int(7)?,
            behavioral_raw: num(8)?,
            behavioral: num(9)?,
            reading: num(10)?,
            history_mean: if f[11] == "-" { None } else { Some(num(11)?) },
            direct_data: num(12)?,
            data_recs: int(13)?,
            data_raw: num(14)?,
            data: num(15)?,
            total: num(16)?,
            classification: f[17].parse().map_err(TrustError::Audit)?,
            applied: match f[18] {
                "1" => true,
                "0" => false,
                other => return Err(TrustError::Audit(format!("applied: bad flag {other:?}"))),
            },
            degenerate_intimacy: f[19].split(',').any(|x| x == "degenerate_intimacy"),
        })
    }
}

/// Append-only collection of audit records.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AuditLog {
    records: Vec<AuditRecord>,
}

impl AuditLog {
    pub fn push(&mut self, record: AuditRecord) {
        self.records.push(record);
    }

    pub fn records(&self) -> &[AuditRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut out = AuditRecord::FIELDS.join("\t");
        out.push('\n');
        for r in &self.records {
            out.push_str(&r.to_line());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, TrustError> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h == AuditRecord::FIELDS.join("\t") => {}
            _ => return Err(TrustError::Audit("missing audit header".into())),
        }
        let records = lines
            .filter(|l| !l.is_empty())
            .map(AuditRecord::parse_line)
            .collect::<Result<_, _>>()?;
        Ok(Self { records })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> AuditRecord {
        AuditRecord {
            time: 12.5,
            assessor: 3,
            assessee: 7,
            rfi: 0.25,
            intimacy: 0.1,
            honesty: 11.0 / 12.0,
            direct_behavioral: 0.83,
            behavioral_recs: 2,
            behavioral_raw: 1.4,
            behavioral: 0.7,
            reading: 20.1,
            history_mean: None,
            direct_data: 0.5,
            data_recs: 0,
            data_raw: 0.5,
            data: 0.5,
            total: 1.2,
            classification: Classification::Trusted,
            applied: true,
            degenerate_intimacy: true,
        }
    }

    #[test]
    fn line_round_trip() {
        let r = sample();
        assert_eq!(AuditRecord::parse_line(&r.to_line()).unwrap(), r);
        let mut log = AuditLog::default();
        log.push(r.clone());
        log.push(AuditRecord {
            history_mean: Some(19.75),
            degenerate_intimacy: false,
            ..r
        });
        assert_eq!(AuditLog::from_text(&log.to_text()).unwrap(), log);
    }

    #[test]
    fn malformed_lines_rejected() {
        assert!(AuditRecord::parse_line("1\t2\t3").is_err());
        let bad = sample().to_line().replace("trusted", "maybe");
        assert!(AuditRecord::parse_line(&bad).is_err());
        assert!(AuditLog::from_text("nonsense\n").is_err());
    }
}
