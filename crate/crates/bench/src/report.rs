//! Plain-text rendering of summaries and hypothesis tests.

use std::fmt::Write;

use crate::experiment::{CellSummary, HypothesisRow};

fn num(x: Option<f64>, prec: usize) -> String {
    match x {
        Some(v) if v.is_finite() => format!("{v:.prec$}"),
        _ => "-".into(),
    }
}

/// Makespan table with one block per instance and one column per variant:
/// heuristics, ALNS, pipeline, and the two improvement rows.
pub fn makespan_table(summaries: &[CellSummary]) -> String {
    let mut out = String::new();
    let mut instances: Vec<&str> = summaries.iter().map(|s| s.instance.as_str()).collect();
    instances.dedup();
    for inst in instances {
        let cells: Vec<&CellSummary> = summaries.iter().filter(|s| s.instance == inst).collect();
        let _ = write!(out, "{:<12}{:<22}", inst, "");
        for c in &cells {
            let _ = write!(out, "{:>12}", c.variant);
        }
        out.push('\n');
        let lines: [(&str, fn(&CellSummary) -> Option<f64>, usize); 5] = [
            ("(0) Heuristics", |c| c.heuristics, 0),
            ("(1) ALNS", |c| c.alns, 0),
            ("(2) ALNS+BRKGA", |c| c.pipeline, 0),
            ("1 Impr. %", |c| c.alns_impr_pct, 2),
            ("2 vs 1 Impr. %", |c| c.pipeline_impr_pct, 2),
        ];
        for (label, get, prec) in lines {
            let _ = write!(out, "{:<12}{:<22}", "", label);
            for c in &cells {
                let _ = write!(out, "{:>12}", num(get(c), prec));
            }
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

/// Paired-test table: one line per (variant, metric).
pub fn hypothesis_table(rows: &[HypothesisRow]) -> String {
    let mut out = format!(
        "{:<8}{:<18}{:>6}{:>10}{:>10}{:>9}{:>8}{:>10}{:>10}  {}\n",
        "variant", "metric", "pairs", "base", "variant", "delta", "W", "p", "d", "note"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<8}{:<18}{:>6}{:>10.2}{:>10.2}{:>+9.2}{:>8}{:>10}{:>10}  {}",
            r.variant,
            r.metric,
            r.pairs,
            r.base_mean,
            r.variant_mean,
            r.delta,
            num(r.w, 1),
            num(r.p, 4),
            num(r.cohens_d, 2),
            r.note
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_rows_per_instance() {
        let s = CellSummary {
            instance: "gr17".into(),
            variant: "base".into(),
            heuristics: Some(2738.0),
            alns: Some(1449.0),
            pipeline: Some(1405.0),
            alns_impr_pct: Some(47.0801),
            pipeline_impr_pct: Some(3.0365),
        };
        let text = makespan_table(&[s]);
        assert!(text.contains("47.08"));
        assert!(text.contains("3.04"));
        assert!(text.contains("(2) ALNS+BRKGA"));
        assert_eq!(text.lines().count(), 7);
    }
}
