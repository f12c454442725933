use serde::{Deserialize, Serialize};

use super::cv::{CvOutcome, EvalTask};

/// One (system, order, task) cell of the results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub system: String,
    pub row: Option<char>,
    pub n: usize,
    pub task: EvalTask,
    pub mean: Option<f64>,
    pub failed_runs: usize,
    pub runs: Vec<Option<f64>>,
}

impl From<&CvOutcome> for ReportEntry {
    fn from(o: &CvOutcome) -> Self {
        ReportEntry {
            system: o.system.clone(),
            row: o.row,
            n: o.n,
            task: o.task,
            mean: o.mean(),
            failed_runs: o.failed_runs(),
            runs: o.runs.iter().map(|r| r.metric).collect(),
        }
    }
}

/// Results for several systems, orders and tasks.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub entries: Vec<ReportEntry>,
    /// Label for the significance procedure used in comparisons.
    pub significance_test: String,
}

impl EvalReport {
    pub fn new() -> Self {
        EvalReport {
            entries: Vec::new(),
            significance_test: "paired two-tailed t-test over (repeat, fold) runs".into(),
        }
    }

    pub fn push(&mut self, outcome: &CvOutcome) {
        self.entries.push(ReportEntry::from(outcome));
    }

    pub fn get(&self, system: &str, n: usize, task: EvalTask) -> Option<&ReportEntry> {
        self.entries
            .iter()
            .find(|e| e.system == system && e.n == n && e.task == task)
    }

    fn orders(&self) -> Vec<usize> {
        let mut o: Vec<usize> = self.entries.iter().map(|e| e.n).collect();
        o.sort_unstable();
        o.dedup();
        o
    }

    fn systems(&self) -> Vec<(String, Option<char>)> {
        let mut out: Vec<(String, Option<char>)> = Vec::new();
        for e in &self.entries {
            if !out.iter().any(|(s, _)| *s == e.system) {
                out.push((e.system.clone(), e.row));
            }
        }
        out
    }

    /// Table with one row per system and columns for accuracy (percent) and
    /// Pearson r per n-gram order; `-` marks combinations not evaluated.
    pub fn to_tsv(&self) -> String {
        let orders = self.orders();
        let mut header = vec!["row".to_string(), "system".to_string()];
        for n in &orders {
            header.push(format!("binary_acc_{n}gr"));
        }
        for n in &orders {
            header.push(format!("regression_r_{n}gr"));
        }
        let mut out = header.join("\t");
        out.push('\n');
        for (system, row) in self.systems() {
            let mut cells = vec![row.map(String::from).unwrap_or_default(), system.clone()];
            for task in [EvalTask::Binary, EvalTask::Regression] {
                for &n in &orders {
                    let cell = match self.get(&system, n, task).and_then(|e| e.mean) {
                        Some(m) if task == EvalTask::Binary => format!("{:.1}", 100.0 * m),
                        Some(m) => format!("{m:.3}"),
                        None => "-".to_string(),
                    };
                    cells.push(cell);
                }
            }
            out.push_str(&cells.join("\t"));
            out.push('\n');
        }
        out
    }

    /// One line per run: `system,n,task,repeat,fold,metric`.
    pub fn runs_csv(&self, folds: usize) -> String {
        let mut out = String::from("system,n,task,repeat,fold,metric\n");
        for e in &self.entries {
            for (i, m) in e.runs.iter().enumerate() {
                let metric = m.map(|v| v.to_string()).unwrap_or_default();
                out.push_str(&format!(
                    "{},{},{},{},{},{metric}\n",
                    e.system,
                    e.n,
                    e.task,
                    i / folds,
                    i % folds
                ));
            }
        }
        out
    }
}
