//! On-disk formats: box files, game files, and the built-in game aliases.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use bellgames::corrbox::BoxArray;
use bellgames::{Game2x2, JointProbBox, Outcome};
use serde::Deserialize;

const PAIRS: [&str; 4] = ["11", "12", "21", "22"];
const OUTCOMES: [&str; 4] = ["++", "+-", "-+", "--"];

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BoxFile {
    probs: BTreeMap<String, BTreeMap<String, f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GameFile {
    a: [f64; 4],
    b: [f64; 4],
}

fn outcome_pair(key: &str) -> (Outcome, Outcome) {
    let mut c = key.chars().map(|c| Outcome::from_char(c).expect("fixed key"));
    (c.next().unwrap(), c.next().unwrap())
}

pub fn parse_box(text: &str) -> Result<JointProbBox> {
    let file: BoxFile = serde_json::from_str(text).context("malformed box file")?;
    if let Some(k) = file.probs.keys().find(|k| !PAIRS.contains(&k.as_str())) {
        bail!("unknown setting pair {k:?}; expected one of 11, 12, 21, 22");
    }
    let mut p: BoxArray = [[[[0.0; 2]; 2]; 2]; 2];
    for (n, pair) in PAIRS.iter().enumerate() {
        let table = file
            .probs
            .get(*pair)
            .ok_or_else(|| anyhow!("setting pair {pair} is missing"))?;
        if let Some(k) = table.keys().find(|k| !OUTCOMES.contains(&k.as_str())) {
            bail!("pair {pair}: unknown outcome key {k:?}");
        }
        for key in OUTCOMES {
            let v = *table
                .get(key)
                .ok_or_else(|| anyhow!("pair {pair}: outcome {key} is missing"))?;
            let (a, b) = outcome_pair(key);
            p[n / 2][n % 2][a.index()][b.index()] = v;
        }
    }
    Ok(JointProbBox::from_array(p))
}

/// Box file text with every probability written to 17 significant digits.
pub fn render_box(b: &JointProbBox) -> String {
    let mut out = String::from("{\n  \"probs\": {\n");
    for (n, pair) in PAIRS.iter().enumerate() {
        let cells: Vec<String> = OUTCOMES
            .iter()
            .map(|key| {
                let (a, o) = outcome_pair(key);
                format!("\"{key}\": {:.16e}", b.get(n / 2, n % 2, a, o))
            })
            .collect();
        let sep = if n < 3 { "," } else { "" };
        let _ = writeln!(out, "    \"{pair}\": {{{}}}{sep}", cells.join(", "));
    }
    out.push_str("  }\n}\n");
    out
}

pub fn read_box(path: &Path) -> Result<JointProbBox> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_box(&text).with_context(|| format!("in {}", path.display()))
}

/// `pd`, `mp`, or a path to a game file.
pub fn read_game(spec: &str) -> Result<Game2x2> {
    match spec {
        "pd" => Ok(Game2x2::prisoners_dilemma()),
        "mp" => Ok(Game2x2::matching_pennies()),
        path => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            let g: GameFile =
                serde_json::from_str(&text).with_context(|| format!("malformed game file {path}"))?;
            Ok(Game2x2::new(g.a, g.b)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use bellgames::corrbox::{cereceda_box, random_nosignaling, CerecedaSet};

    #[test]
    fn render_parse_is_exact() {
        for b in [
            cereceda_box(CerecedaSet::First),
            random_nosignaling(5).unwrap(),
        ] {
            assert_eq!(parse_box(&render_box(&b)).unwrap(), b);
        }
    }

    #[test]
    fn missing_and_extra_keys_rejected() {
        let text = render_box(&cereceda_box(CerecedaSet::Second));
        assert!(parse_box(&text.replace("\"--\"", "\"-0\"")).is_err());
        assert!(parse_box(&text.replace("\"22\"", "\"23\"")).is_err());
        assert!(parse_box(r#"{"probs": {}}"#).is_err());
        assert!(parse_box(r#"{"probs": {"11": {"++": "x"}}}"#).is_err());
    }
}
