//! Experiment reports:
//!
//! ```text
//! invmap-report v1
//! experiment <id>
//! seed <seed>
//! input <key> <value>
//! verdict <key> <value>
//! timing <key> <microseconds>
//! classes <key> <count> <count> ...
//! end
//! ```
//!
//! Keys are single tokens; values run to the end of the line.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use crate::CliError;

pub const REPORT_HEADER: &str = "invmap-report v1";

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExperimentReport {
    pub experiment: String,
    pub seed: u64,
    pub inputs: Vec<(String, String)>,
    pub verdicts: Vec<(String, String)>,
    pub timings: Vec<(String, u64)>,
    pub class_counts: Vec<(String, Vec<usize>)>,
}

fn clean_key(key: &str) -> String {
    let k: String = key.split_whitespace().collect::<Vec<_>>().join("-");
    if k.is_empty() {
        "-".into()
    } else {
        k
    }
}

fn clean_value(value: &str) -> String {
    value.split_whitespace().collect::<Vec<_>>().join(" ")
}

impl ExperimentReport {
    pub fn new(experiment: &str, seed: u64) -> Self {
        ExperimentReport {
            experiment: clean_key(experiment),
            seed,
            ..Default::default()
        }
    }

    pub fn input(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        self.inputs.push((clean_key(key), clean_value(&value.to_string())));
        self
    }

    pub fn verdict(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        self.verdicts.push((clean_key(key), clean_value(&value.to_string())));
        self
    }

    pub fn timing(&mut self, key: &str, elapsed: Duration) -> &mut Self {
        self.timings.push((clean_key(key), elapsed.as_micros() as u64));
        self
    }

    pub fn classes(&mut self, key: &str, counts: &[usize]) -> &mut Self {
        self.class_counts.push((clean_key(key), counts.to_vec()));
        self
    }

    pub fn verdict_value(&self, key: &str) -> Option<&str> {
        self.verdicts.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn input_value(&self, key: &str) -> Option<&str> {
        self.inputs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

impl fmt::Display for ExperimentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{REPORT_HEADER}")?;
        writeln!(f, "experiment {}", self.experiment)?;
        writeln!(f, "seed {}", self.seed)?;
        for (k, v) in &self.inputs {
            writeln!(f, "input {k} {v}")?;
        }
        for (k, v) in &self.verdicts {
            writeln!(f, "verdict {k} {v}")?;
        }
        for (k, t) in &self.timings {
            writeln!(f, "timing {k} {t}")?;
        }
        for (k, c) in &self.class_counts {
            let c: Vec<String> = c.iter().map(usize::to_string).collect();
            writeln!(f, "classes {k} {}", c.join(" "))?;
        }
        writeln!(f, "end")
    }
}

fn bad(line: usize, msg: impl Into<String>) -> CliError {
    CliError::Report {
        line,
        message: msg.into(),
    }
}

impl FromStr for ExperimentReport {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let mut lines = s.lines().enumerate().map(|(i, l)| (i + 1, l));
        match lines.next() {
            Some((_, l)) if l == REPORT_HEADER => {}
            _ => return Err(bad(1, format!("expected `{REPORT_HEADER}`"))),
        }
        let mut report = ExperimentReport::default();
        let mut seen_experiment = false;
        let mut ended = false;
        for (ln, line) in lines {
            if ended {
                if line.trim().is_empty() {
                    continue;
                }
                return Err(bad(ln, "content after `end`"));
            }
            let (tag, rest) = line.split_once(' ').unwrap_or((line, ""));
            let (key, value) = rest.split_once(' ').unwrap_or((rest, ""));
            match tag {
                "experiment" => {
                    report.experiment = rest.to_string();
                    seen_experiment = true;
                }
                "seed" => report.seed = rest.parse().map_err(|_| bad(ln, "bad seed"))?,
                "input" => report.inputs.push((key.into(), value.into())),
                "verdict" => report.verdicts.push((key.into(), value.into())),
                "timing" => report
                    .timings
                    .push((key.into(), value.parse().map_err(|_| bad(ln, "bad timing"))?)),
                "classes" => {
                    let counts = value
                        .split_whitespace()
                        .map(|t| t.parse().map_err(|_| bad(ln, "bad class count")))
                        .collect::<Result<_, _>>()?;
                    report.class_counts.push((key.into(), counts));
                }
                "end" => ended = true,
                _ => return Err(bad(ln, format!("unknown line tag `{tag}`"))),
            }
        }
        if !seen_experiment || !ended {
            return Err(bad(s.lines().count(), "missing `experiment` or `end` line"));
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut r = ExperimentReport::new("separation", 7);
        r.input("graph", "K4")
            .input("loads", "0 0 0 0 | 1 0 0 0")
            .verdict("similar-over-F3", true)
            .timing("total", Duration::from_micros(1234))
            .classes("wl", &[3, 40, 82])
            .classes("empty", &[]);
        let text = r.to_string();
        let back: ExperimentReport = text.parse().unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_string(), text);
        assert_eq!(back.verdict_value("similar-over-F3"), Some("true"));
    }

    #[test]
    fn rejects_garbage() {
        assert!("nope".parse::<ExperimentReport>().is_err());
        assert!(format!("{REPORT_HEADER}\nexperiment x\nseed 0\n").parse::<ExperimentReport>().is_err());
    }
}
