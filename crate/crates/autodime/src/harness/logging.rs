//! Per-iteration experiment records and their CSV form.
//!
//! Schema v1: a `# autodime-log v1` comment line, a header row, then one row
//! per iteration in a stable column order. `eval_hard_return` is empty on
//! iterations without an evaluation pass; `teacher_entropy` is `NaN` when
//! the teacher is bypassed (uniform spawn mode).

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const CSV_COMMENT: &str = "# autodime-log v1";
pub const CSV_HEADER: &str = "iteration,p_easy,p_hard,p_impossible,teacher_reward,\
teacher_entropy,policy_loss,value_loss,entropy,clone_kl,mean_return,eval_hard_return";

#[derive(Debug, Clone, PartialEq)]
pub struct LogRow {
    pub iteration: usize,
    pub p_easy: f64,
    pub p_hard: f64,
    pub p_impossible: f64,
    pub teacher_reward: f64,
    pub teacher_entropy: f64,
    pub policy_loss: f64,
    pub value_loss: f64,
    pub entropy: f64,
    pub clone_kl: f64,
    pub mean_return: f64,
    pub eval_hard_return: Option<f64>,
}

impl LogRow {
    pub fn to_csv(&self) -> String {
        let mut line = String::new();
        write!(
            line,
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.iteration,
            self.p_easy,
            self.p_hard,
            self.p_impossible,
            self.teacher_reward,
            self.teacher_entropy,
            self.policy_loss,
            self.value_loss,
            self.entropy,
            self.clone_kl,
            self.mean_return
        )
        .unwrap();
        match self.eval_hard_return {
            Some(v) => write!(line, ",{v}").unwrap(),
            None => line.push(','),
        }
        line
    }

    pub fn from_csv(line: &str) -> Result<LogRow> {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 12 {
            return Err(Error::Parse(format!(
                "log row needs 12 fields, found {}",
                fields.len()
            )));
        }
        let num = |i: usize| -> Result<f64> {
            fields[i]
                .parse()
                .map_err(|_| Error::Parse(format!("bad log field '{}'", fields[i])))
        };
        Ok(LogRow {
            iteration: fields[0]
                .parse()
                .map_err(|_| Error::Parse(format!("bad iteration '{}'", fields[0])))?,
            p_easy: num(1)?,
            p_hard: num(2)?,
            p_impossible: num(3)?,
            teacher_reward: num(4)?,
            teacher_entropy: num(5)?,
            policy_loss: num(6)?,
            value_loss: num(7)?,
            entropy: num(8)?,
            clone_kl: num(9)?,
            mean_return: num(10)?,
            eval_hard_return: if fields[11].is_empty() {
                None
            } else {
                Some(num(11)?)
            },
        })
    }
}

/// A full in-memory run record.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentLog {
    pub rows: Vec<LogRow>,
}

impl ExperimentLog {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{CSV_COMMENT}\n{CSV_HEADER}\n");
        for row in &self.rows {
            out.push_str(&row.to_csv());
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<ExperimentLog> {
        let mut rows = Vec::new();
        for line in text.lines() {
            if line.starts_with('#') || line == CSV_HEADER || line.trim().is_empty() {
                continue;
            }
            rows.push(LogRow::from_csv(line)?);
        }
        Ok(ExperimentLog { rows })
    }

    /// Rows with an evaluation result, as (iteration, mean return).
    pub fn eval_points(&self) -> Vec<(usize, f64)> {
        self.rows
            .iter()
            .filter_map(|r| r.eval_hard_return.map(|v| (r.iteration, v)))
            .collect()
    }
}

/// Destination for rows as they are produced.
pub trait RowSink {
    fn row(&mut self, row: &LogRow) -> Result<()>;
}

/// Discards rows (the in-memory log still collects them).
pub struct NullSink;

impl RowSink for NullSink {
    fn row(&mut self, _row: &LogRow) -> Result<()> {
        Ok(())
    }
}

/// Streams rows to a CSV file, flushing after every row so an aborted run
/// leaves a complete prefix on disk.
pub struct CsvSink {
    writer: BufWriter<File>,
}

impl CsvSink {
    pub fn create(path: &Path) -> Result<Self> {
        let mut writer = BufWriter::new(File::create(path)?);
        writeln!(writer, "{CSV_COMMENT}")?;
        writeln!(writer, "{CSV_HEADER}")?;
        writer.flush()?;
        Ok(Self { writer })
    }
}

impl RowSink for CsvSink {
    fn row(&mut self, row: &LogRow) -> Result<()> {
        writeln!(self.writer, "{}", row.to_csv())?;
        self.writer.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_row(eval: Option<f64>) -> LogRow {
        LogRow {
            iteration: 3,
            p_easy: 0.25,
            p_hard: 0.5,
            p_impossible: 0.25,
            teacher_reward: 1.75,
            teacher_entropy: 9.1,
            policy_loss: -0.02,
            value_loss: 0.4,
            entropy: 2.39,
            clone_kl: 0.001,
            mean_return: 12.5,
            eval_hard_return: eval,
        }
    }

    #[test]
    fn row_round_trips_with_and_without_eval() {
        for eval in [None, Some(7.25)] {
            let row = sample_row(eval);
            assert_eq!(LogRow::from_csv(&row.to_csv()).unwrap(), row);
        }
    }

    #[test]
    fn log_round_trips_through_csv() {
        let log = ExperimentLog {
            rows: vec![sample_row(None), sample_row(Some(3.0))],
        };
        let parsed = ExperimentLog::from_csv(&log.to_csv()).unwrap();
        assert_eq!(log, parsed);
        assert_eq!(parsed.eval_points(), vec![(3, 3.0)]);
    }

    #[test]
    fn malformed_rows_rejected() {
        assert!(LogRow::from_csv("1,2,3").is_err());
        assert!(LogRow::from_csv("x,0,0,0,0,0,0,0,0,0,0,").is_err());
    }
}
