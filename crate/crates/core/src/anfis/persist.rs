//! Plain-text model files.
//!
//! One `key = value` pair per line; `#` starts a comment. Keys name the
//! layer, the indices and the parameter:
//!
//! ```text
//! layer1.honesty.2.kind = gaussian
//! layer1.honesty.2.center = 1
//! layer2.rule.4.antecedent = 0,1,1
//! layer4.rule.4.w.rfi = -0.031
//! layer4.rule.4.bias = 0.52
//! layer5.clamp = true
//! ```
//!
//! Floats are written with Rust's shortest round-trip formatting, so
//! save followed by load reproduces the model bit for bit.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::model::{INPUT_COUNT, INPUT_NAMES};
use super::{AnfisError, AnfisModel, FuzzyRule, MembershipFunction};

const HEADER: &str = "# neurotrust anfis model v1";

pub fn to_text(model: &AnfisModel) -> String {
    let mut out = String::new();
    writeln!(out, "{HEADER}").unwrap();
    for (i, terms) in model.membership_functions().iter().enumerate() {
        for (m, mf) in terms.iter().enumerate() {
            writeln!(out, "layer1.{}.{m}.kind = {}", INPUT_NAMES[i], mf.kind()).unwrap();
            for (name, v) in mf.param_names().iter().zip(mf.params()) {
                writeln!(out, "layer1.{}.{m}.{name} = {v:?}", INPUT_NAMES[i]).unwrap();
            }
        }
    }
    for (k, r) in model.rules().iter().enumerate() {
        let a = r.antecedent;
        writeln!(
            out,
            "layer2.rule.{k}.antecedent = {},{},{}",
            a[0], a[1], a[2]
        )
        .unwrap();
    }
    for (k, r) in model.rules().iter().enumerate() {
        for (i, w) in r.weights.iter().enumerate() {
            writeln!(out, "layer4.rule.{k}.w.{} = {w:?}", INPUT_NAMES[i]).unwrap();
        }
        writeln!(out, "layer4.rule.{k}.bias = {:?}", r.bias).unwrap();
    }
    writeln!(out, "layer5.clamp = {}", model.clamp_output()).unwrap();
    out
}

fn parse_err(line: usize, msg: impl Into<String>) -> AnfisError {
    AnfisError::Parse {
        line,
        message: msg.into(),
    }
}

fn parse_f64(line: usize, v: &str) -> Result<f64, AnfisError> {
    v.parse::<f64>()
        .map_err(|_| parse_err(line, format!("not a number: {v:?}")))
}

fn input_index(name: &str) -> Option<usize> {
    INPUT_NAMES.iter().position(|n| *n == name)
}

#[derive(Default)]
struct MfEntry {
    kind: Option<String>,
    params: BTreeMap<String, f64>,
}

#[derive(Default)]
struct RuleEntry {
    antecedent: Option<[usize; INPUT_COUNT]>,
    weights: [Option<f64>; INPUT_COUNT],
    bias: Option<f64>,
}

pub fn from_text(text: &str) -> Result<AnfisModel, AnfisError> {
    let mut mfs: BTreeMap<(usize, usize), MfEntry> = BTreeMap::new();
    let mut rules: BTreeMap<usize, RuleEntry> = BTreeMap::new();
    let mut clamp = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| parse_err(line_no, "expected `key = value`"))?;
        let parts: Vec<&str> = key.split('.').collect();
        match parts.as_slice() {
            ["layer1", input, term, field] => {
                let i = input_index(input)
                    .ok_or_else(|| parse_err(line_no, format!("unknown key {key}")))?;
                let m: usize = term
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("unknown key {key}")))?;
                let entry = mfs.entry((i, m)).or_default();
                if *field == "kind" {
                    entry.kind = Some(value.to_string());
                } else if ["center", "width", "slope", "left", "peak", "right"].contains(field) {
                    entry
                        .params
                        .insert(field.to_string(), parse_f64(line_no, value)?);
                } else {
                    return Err(parse_err(line_no, format!("unknown key {key}")));
                }
            }
            ["layer2", "rule", k, "antecedent"] => {
                let k: usize = k
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("unknown key {key}")))?;
                let idx: Vec<usize> = value
                    .split(',')
                    .map(|p| p.trim().parse::<usize>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| parse_err(line_no, format!("bad antecedent {value:?}")))?;
                let arr: [usize; INPUT_COUNT] = idx.try_into().map_err(|_| {
                    parse_err(line_no, format!("antecedent needs {INPUT_COUNT} indices"))
                })?;
                rules.entry(k).or_default().antecedent = Some(arr);
            }
            ["layer4", "rule", k, "w", input] => {
                let k: usize = k
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("unknown key {key}")))?;
                let i = input_index(input)
                    .ok_or_else(|| parse_err(line_no, format!("unknown key {key}")))?;
                rules.entry(k).or_default().weights[i] = Some(parse_f64(line_no, value)?);
            }
            ["layer4", "rule", k, "bias"] => {
                let k: usize = k
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("unknown key {key}")))?;
                rules.entry(k).or_default().bias = Some(parse_f64(line_no, value)?);
            }
            ["layer5", "clamp"] => {
                clamp = Some(match value {
                    "true" => true,
                    "false" => false,
                    _ => return Err(parse_err(line_no, format!("bad boolean {value:?}"))),
                });
            }
            _ => return Err(parse_err(line_no, format!("unknown key {key}"))),
        }
    }

    let mut per_input: [Vec<MembershipFunction>; INPUT_COUNT] = Default::default();
    for ((i, m), entry) in mfs {
        if m != per_input[i].len() {
            return Err(parse_err(
                0,
                format!(
                    "membership functions of {} are not contiguous",
                    INPUT_NAMES[i]
                ),
            ));
        }
        let kind = entry
            .kind
            .ok_or_else(|| parse_err(0, format!("missing kind for {}.{m}", INPUT_NAMES[i])))?;
        let names: &[&str] = match kind.as_str() {
            "gaussian" => &["center", "width"],
            "bell" => &["width", "slope", "center"],
            "triangular" => &["left", "peak", "right"],
            other => return Err(parse_err(0, format!("unknown membership kind {other:?}"))),
        };
        if entry.params.len() != names.len() {
            return Err(parse_err(
                0,
                format!("{}.{m}: wrong parameter set for {kind}", INPUT_NAMES[i]),
            ));
        }
        let params: Vec<f64> = names
            .iter()
            .map(|n| {
                entry
                    .params
                    .get(*n)
                    .copied()
                    .ok_or_else(|| parse_err(0, format!("missing {n}")))
            })
            .collect::<Result<_, _>>()?;
        per_input[i].push(MembershipFunction::from_kind(&kind, &params)?);
    }
    let mut rule_list = Vec::with_capacity(rules.len());
    for (k, entry) in rules {
        if k != rule_list.len() {
            return Err(parse_err(0, "rule indices are not contiguous"));
        }
        let missing = || parse_err(0, format!("rule {k} is incomplete"));
        let mut rule = FuzzyRule::new(entry.antecedent.ok_or_else(missing)?);
        for i in 0..INPUT_COUNT {
            rule.weights[i] = entry.weights[i].ok_or_else(missing)?;
        }
        rule.bias = entry.bias.ok_or_else(missing)?;
        rule_list.push(rule);
    }
    let clamp = clamp.ok_or_else(|| parse_err(0, "missing layer5.clamp"))?;
    AnfisModel::new(per_input, rule_list, clamp)
}

pub fn save(model: &AnfisModel, path: impl AsRef<Path>) -> std::io::Result<()> {
    std::fs::write(path, to_text(model))
}

pub fn load(path: impl AsRef<Path>) -> Result<AnfisModel, AnfisError> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| parse_err(0, format!("{}: {e}", path.as_ref().display())))?;
    from_text(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(
            centers in prop::collection::vec(-1.0f64..2.0, 9),
            widths in prop::collection::vec(0.01f64..1.0, 9),
            consequents in prop::collection::vec(-5.0f64..5.0, 27 * 4),
            clamp in any::<bool>(),
        ) {
            let mut terms: [Vec<MembershipFunction>; 3] = Default::default();
            for i in 0..3 {
                for m in 0..3 {
                    terms[i].push(MembershipFunction::gaussian(centers[3 * i + m], widths[3 * i + m]).unwrap());
                }
            }
            terms[1][2] = MembershipFunction::bell(widths[0], 2.5, centers[0]).unwrap();
            terms[2][0] = MembershipFunction::triangular(-1.5, centers[1], 2.5).unwrap();
            let rules = crate::anfis::model::full_grid(3)
                .into_iter()
                .enumerate()
                .map(|(k, a)| {
                    let mut r = FuzzyRule::new(a);
                    r.weights = [consequents[4 * k], consequents[4 * k + 1], consequents[4 * k + 2]];
                    r.bias = consequents[4 * k + 3];
                    r
                })
                .collect();
            let model = AnfisModel::new(terms, rules, clamp).unwrap();
            let back = from_text(&to_text(&model)).unwrap();
            prop_assert_eq!(back, model);
        }
    }

    #[test]
    fn unknown_key_rejected() {
        let mut text = to_text(&AnfisModel::grid(3).unwrap());
        text.push_str("layer4.rule.0.gain = 1\n");
        match from_text(&text) {
            Err(AnfisError::Parse { message, .. }) => assert!(message.contains("unknown key")),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn missing_parameter_rejected() {
        let text = to_text(&AnfisModel::grid(3).unwrap());
        let trimmed: String = text
            .lines()
            .filter(|l| !l.starts_with("layer4.rule.3.bias"))
            .map(|l| format!("{l}\n"))
            .collect();
        assert!(from_text(&trimmed).is_err());
    }
}
