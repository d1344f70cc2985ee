use std::fmt::Write;

use super::cv::CellResult;
use super::methods::Method;
use crate::error::{Error, Result};
use crate::seq2seq::Variant;

/// Published (syntax error %, accuracy %) on Geo880 for each grid cell.
pub fn published(variant: Variant, hidden_dim: usize, method: Method) -> Option<(f64, f64)> {
    let row = match hidden_dim {
        100 => 0,
        200 => 1,
        400 => 2,
        _ => return None,
    };
    let col = Method::ALL.iter().position(|&m| m == method)?;
    let table: [[(f64, f64); 4]; 3] = match variant {
        Variant::Plain => [
            [(14.77, 30.68), (13.64, 31.89), (14.77, 28.40), (11.36, 38.63)],
            [(11.36, 36.36), (10.23, 38.67), (11.36, 32.95), (7.95, 54.55)],
            [(9.09, 51.14), (7.95, 54.55), (10.23, 42.04), (6.81, 64.77)],
        ],
        Variant::Attention => [
            [(12.50, 37.50), (11.36, 40.91), (12.50, 35.23), (0.0, 54.55)],
            [(11.36, 47.73), (10.22, 51.14), (11.36, 45.45), (9.09, 67.04)],
            [(7.95, 62.50), (6.81, 64.77), (9.09, 60.23), (5.68, 78.40)],
        ],
    };
    Some(table[row][col])
}

/// Accuracy of other Geo880 SPARQL systems, quoted from the literature.
pub const LITERATURE: [(&str, f64); 3] =
    [("Alagha et al.", 58.61), ("Querix", 77.67), ("attention LSTM + OUR-APP", 78.40)];

fn table(out: &mut String, title: &str, rows: &[&CellResult]) {
    let _ = writeln!(out, "{title}");
    let _ = writeln!(
        out,
        "{:<10} | {:<10} | {:>11} | {:>8} | {:>15}",
        "Hidden Dim", "Method", "Synt. error", "Accuracy", "Published"
    );
    let _ = writeln!(out, "{}", "-".repeat(66));
    for r in rows {
        let reference = match published(r.variant, r.hidden_dim, r.method) {
            Some((e, a)) => format!("{e:.2} / {a:.2}"),
            None => "-".into(),
        };
        let _ = writeln!(
            out,
            "{:<10} | {:<10} | {:>11.2} | {:>8.2} | {:>15}",
            r.hidden_dim,
            r.method.label(),
            100.0 * r.mean_syntax_error_rate,
            100.0 * r.mean_accuracy,
            reference
        );
    }
    out.push('\n');
}

/// Plain-text tables, one per variant that has results, rows ordered by
/// hidden size then method, followed by literature reference rows.
pub fn render_report(results: &[CellResult]) -> Result<String> {
    if results.is_empty() {
        return Err(Error::Input("no results to report".into()));
    }
    let mut out = String::new();
    for (variant, title) in [(Variant::Plain, "Without attention"), (Variant::Attention, "With attention")] {
        let mut rows: Vec<&CellResult> = results.iter().filter(|r| r.variant == variant).collect();
        if rows.is_empty() {
            continue;
        }
        rows.sort_by_key(|r| (r.hidden_dim, r.method));
        table(&mut out, title, &rows);
    }
    let _ = writeln!(out, "Literature accuracy on Geo880 (not recomputed)");
    for (name, acc) in LITERATURE {
        let _ = writeln!(out, "{name:<26} | {acc:>8.2}");
    }
    Ok(out)
}

pub fn results_to_json(results: &[CellResult]) -> Result<String> {
    serde_json::to_string_pretty(results).map_err(|e| Error::Format(e.to_string()))
}

pub fn results_from_json(text: &str) -> Result<Vec<CellResult>> {
    serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::cv::{FoldMetrics, GridCell, GRID_HIDDEN_DIMS};

    fn result(cell: GridCell, acc: f64) -> CellResult {
        CellResult {
            variant: cell.variant,
            hidden_dim: cell.hidden_dim,
            method: cell.method,
            mean_accuracy: acc,
            mean_syntax_error_rate: 0.0568,
            folds: vec![FoldMetrics { fold: 0, accuracy: acc, syntax_error_rate: 0.0568 }],
        }
    }

    fn data_rows(report: &str) -> usize {
        report.lines().filter(|l| l.split(" | ").next().is_some_and(|h| h.trim().parse::<usize>().is_ok())).count()
    }

    #[test]
    fn one_cell_gives_one_row() {
        let r = vec![result(GridCell::new(Variant::Attention, 400, Method::OurApp), 0.784)];
        let text = render_report(&r).unwrap();
        assert_eq!(data_rows(&text), 1);
        assert!(!text.contains("Without attention"));
        let row = text.lines().find(|l| l.starts_with("400")).unwrap();
        assert!(row.contains("5.68") && row.contains("78.40"));
        assert!(text.contains("58.61") && text.contains("77.67"));
        assert!(render_report(&[]).is_err());
    }

    #[test]
    fn full_grid_gives_twelve_rows_per_table() {
        let r: Vec<CellResult> = GridCell::full_grid(&GRID_HIDDEN_DIMS).into_iter().map(|c| result(c, 0.5)).collect();
        let text = render_report(&r).unwrap();
        let (plain, attention) = text.split_once("With attention").unwrap();
        assert_eq!((data_rows(plain), data_rows(attention)), (12, 12));
        assert!(text.contains("Hidden Dim | Method     | Synt. error | Accuracy"));
    }

    #[test]
    fn json_round_trip() {
        let r: Vec<CellResult> = GridCell::full_grid(&[100])
            .into_iter()
            .enumerate()
            .map(|(i, c)| result(c, 1.0 / (i as f64 + 3.0)))
            .collect();
        let json = results_to_json(&r).unwrap();
        assert_eq!(results_from_json(&json).unwrap(), r);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        let keys: Vec<&str> = v[0].as_object().unwrap().keys().map(|k| k.as_str()).collect();
        for k in ["variant", "hidden_dim", "method", "mean_accuracy", "mean_syntax_error_rate", "folds"] {
            assert!(keys.contains(&k));
        }
        assert_eq!(v[0]["method"], "RANDOM");
    }

    #[test]
    fn published_values_match_the_tables() {
        assert_eq!(published(Variant::Attention, 400, Method::OurApp), Some((5.68, 78.40)));
        assert_eq!(published(Variant::Plain, 100, Method::Random), Some((14.77, 30.68)));
        assert_eq!(published(Variant::Attention, 50, Method::Random), None);
        for h in GRID_HIDDEN_DIMS {
            for m in Method::ALL {
                let (p, a) = (published(Variant::Plain, h, m).unwrap(), published(Variant::Attention, h, m).unwrap());
                assert!(a.1 > p.1);
            }
        }
    }
}
