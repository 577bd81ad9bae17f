//! JSON Lines rollout logs: one `{"meta": …}` header line, then one record
//! per control step.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::command::CommandVector;
use crate::error::{Error, Result};
use crate::step::RobotStep;

/// How a log was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RolloutMeta {
    pub generator: String,
    pub seed: u64,
    pub dt: f64,
    pub steps: usize,
    /// First-order lag time constant (s).
    pub lag: f64,
    pub p_flip: Option<f64>,
    pub resample_every: Option<usize>,
}

/// A step together with the command active on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRecord {
    #[serde(flatten)]
    pub step: RobotStep,
    pub command: CommandVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RolloutLog {
    pub meta: RolloutMeta,
    pub records: Vec<LogRecord>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    meta: RolloutMeta,
}

impl RolloutLog {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn steps(&self) -> Vec<RobotStep> {
        self.records.iter().map(|r| r.step.clone()).collect()
    }

    pub fn commands(&self) -> Vec<CommandVector> {
        self.records.iter().map(|r| r.command).collect()
    }

    /// Step indices must be contiguous and the time step constant.
    pub fn validate(&self) -> Result<()> {
        for (k, w) in self.records.windows(2).enumerate() {
            if w[1].step.index != w[0].step.index + 1 {
                return Err(Error::param(
                    "log",
                    format!("step index gap after record {k}"),
                ));
            }
            if ((w[1].step.t - w[0].step.t) - self.meta.dt).abs() > 1e-9 {
                return Err(Error::param(
                    "log",
                    format!("time step changes after record {k}"),
                ));
            }
        }
        Ok(())
    }

    pub fn write_jsonl(&self, mut w: impl Write) -> Result<()> {
        serde_json::to_writer(
            &mut w,
            &Header {
                meta: self.meta.clone(),
            },
        )?;
        w.write_all(b"\n")?;
        for r in &self.records {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_jsonl(r: impl BufRead) -> Result<Self> {
        let mut lines = r.lines();
        let first = loop {
            match lines.next() {
                Some(line) => {
                    let line = line?;
                    if !line.trim().is_empty() {
                        break line;
                    }
                }
                None => return Err(Error::Empty("rollout log")),
            }
        };
        let header: Header = serde_json::from_str(&first)?;
        let mut records = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            records.push(serde_json::from_str(&line)?);
        }
        let log = Self {
            meta: header.meta,
            records,
        };
        log.validate()?;
        Ok(log)
    }
}
