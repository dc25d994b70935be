//! Report rows, summaries and their JSON/CSV renderings.

use std::fmt::Write as _;

use serde::Serialize;

pub const SCHEMA: u32 = 1;

/// Round to 12 significant digits so the shortest round-trip rendering
/// never prints more.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn sig12_opt(x: Option<f64>) -> Option<f64> {
    x.map(sig12)
}

/// Integer outcomes (`z`, `t̃`) print without a fractional part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Outcome {
    Int(u64),
    Real(f64),
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Outcome::Int(v) => write!(f, "{v}"),
            Outcome::Real(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub trial: u64,
    /// `z`, `t̃`, `ã` or the decision, depending on the algorithm.
    pub outcome: Option<Outcome>,
    pub success: bool,
    /// Whether the run stayed within the theoretical error bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub within_bound: Option<bool>,
    pub queries: u64,
    pub exhausted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl Row {
    pub fn exhausted(trial: u64, queries: u64) -> Self {
        Row {
            trial,
            outcome: None,
            success: false,
            within_bound: None,
            queries,
            exhausted: true,
            wall_time_s: None,
        }
    }

    fn rounded(mut self) -> Self {
        if let Some(Outcome::Real(v)) = self.outcome {
            self.outcome = Some(Outcome::Real(sig12(v)));
        }
        self.wall_time_s = sig12_opt(self.wall_time_s);
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub trials: u64,
    pub exhausted: u64,
    pub mean_queries: f64,
    pub median_queries: f64,
    pub min_queries: u64,
    pub max_queries: u64,
    pub success_frequency: f64,
    /// What `bound` measures.
    pub bound_kind: Option<String>,
    pub bound: Option<f64>,
    pub bound_frequency: Option<f64>,
    /// Θ-expression of the expected query cost, evaluated at the true `t`.
    pub query_scale: Option<f64>,
    pub query_ratio: Option<f64>,
}

/// The theoretical bound attached to a run.
#[derive(Debug, Clone, Default)]
pub struct Bound {
    pub kind: Option<String>,
    pub value: Option<f64>,
    pub query_scale: Option<f64>,
}

impl Summary {
    pub fn from_rows(rows: &[Row], bound: &Bound) -> Self {
        let queries: Vec<f64> = rows.iter().map(|r| r.queries as f64).collect();
        let stats = qamp::harness::summarize(&queries);
        let n = rows.len() as u64;
        let judged: Vec<bool> = rows.iter().filter_map(|r| r.within_bound).collect();
        let mean_queries = stats.as_ref().map_or(0.0, |s| s.mean);
        Summary {
            trials: n,
            exhausted: rows.iter().filter(|r| r.exhausted).count() as u64,
            mean_queries: sig12(mean_queries),
            median_queries: sig12(stats.as_ref().map_or(0.0, |s| s.median)),
            min_queries: rows.iter().map(|r| r.queries).min().unwrap_or(0),
            max_queries: rows.iter().map(|r| r.queries).max().unwrap_or(0),
            success_frequency: sig12(qamp::harness::frequency(rows.iter().map(|r| r.success))),
            bound_kind: bound.kind.clone(),
            bound: sig12_opt(bound.value),
            bound_frequency: (!judged.is_empty()).then(|| sig12(qamp::harness::frequency(judged))),
            query_scale: sig12_opt(bound.query_scale),
            query_ratio: bound
                .query_scale
                .filter(|&s| s > 0.0 && n > 0)
                .map(|s| sig12(mean_queries / s)),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub algorithm: String,
    pub experiment: serde_json::Value,
    pub summary: Summary,
    pub rows: Vec<Row>,
}

impl Report {
    pub fn new(
        algorithm: &str,
        experiment: serde_json::Value,
        rows: Vec<Row>,
        bound: &Bound,
    ) -> Self {
        let rows: Vec<Row> = rows.into_iter().map(Row::rounded).collect();
        let summary = Summary::from_rows(&rows, bound);
        Report {
            schema: SCHEMA,
            algorithm: algorithm.to_string(),
            experiment,
            summary,
            rows,
        }
    }

    pub fn all_exhausted(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| r.exhausted)
    }

    pub fn to_csv(&self, timing: bool) -> String {
        let mut out = String::from("trial,outcome,success,within_bound,queries,exhausted");
        if timing {
            out.push_str(",wall_time_s");
        }
        out.push('\n');
        for r in &self.rows {
            let _ = write!(
                out,
                "{},{},{},{},{},{}",
                r.trial,
                r.outcome.map(|o| o.to_string()).unwrap_or_default(),
                r.success,
                r.within_bound.map(|b| b.to_string()).unwrap_or_default(),
                r.queries,
                r.exhausted
            );
            if timing {
                let _ = write!(out, ",{}", opt_cell(r.wall_time_s));
            }
            out.push('\n');
        }
        out
    }
}

fn opt_cell(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// One line of the complexity table.
#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub problem: String,
    pub n: u64,
    pub t: u64,
    pub eps: Option<f64>,
    pub trials: u64,
    pub mean_queries: f64,
    pub success_frequency: f64,
    pub quantum_scale: f64,
    pub ratio: f64,
    pub classical_scale: Option<f64>,
}

impl TableRow {
    pub fn rounded(mut self) -> Self {
        self.mean_queries = sig12(self.mean_queries);
        self.success_frequency = sig12(self.success_frequency);
        self.quantum_scale = sig12(self.quantum_scale);
        self.ratio = sig12(self.ratio);
        self.classical_scale = sig12_opt(self.classical_scale);
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TableReport {
    pub schema: u32,
    pub algorithm: String,
    pub experiment: serde_json::Value,
    pub rows: Vec<TableRow>,
}

impl TableReport {
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("problem,n,t,eps,trials,mean_queries,success_frequency,quantum_scale,ratio,classical_scale\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.problem,
                r.n,
                r.t,
                opt_cell(r.eps),
                r.trials,
                r.mean_queries,
                r.success_frequency,
                r.quantum_scale,
                r.ratio,
                opt_cell(r.classical_scale)
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig12_keeps_twelve_digits() {
        assert_eq!(sig12(1.0 / 3.0).to_string(), "0.333333333333");
        assert_eq!(sig12(2.0 / 3.0 * 1e6).to_string(), "666666.666667");
        assert_eq!(sig12(0.5), 0.5);
        assert_eq!(sig12(0.0), 0.0);
    }

    #[test]
    fn summary_of_mixed_rows() {
        let rows = vec![
            Row {
                trial: 0,
                outcome: Some(Outcome::Int(1)),
                success: true,
                within_bound: Some(true),
                queries: 4,
                exhausted: false,
                wall_time_s: None,
            },
            Row {
                trial: 1,
                outcome: Some(Outcome::Int(2)),
                success: false,
                within_bound: Some(false),
                queries: 8,
                exhausted: false,
                wall_time_s: None,
            },
            Row::exhausted(2, 12),
        ];
        let s = Summary::from_rows(
            &rows,
            &Bound {
                query_scale: Some(4.0),
                ..Bound::default()
            },
        );
        assert_eq!(s.exhausted, 1);
        assert_eq!(s.mean_queries, 8.0);
        assert_eq!(s.median_queries, 8.0);
        assert_eq!(s.bound_frequency, Some(0.5));
        assert_eq!(s.query_ratio, Some(2.0));
        assert!((s.success_frequency - 1.0 / 3.0).abs() < 1e-11);
    }
}
