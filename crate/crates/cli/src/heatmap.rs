//! Attention dumps as CSV and as plain-text graymaps.

use std::fmt::Write;

/// Rows are decoder outputs, columns source tokens.
#[derive(Clone, Debug, PartialEq)]
pub struct AttentionDump {
    pub source: Vec<String>,
    pub target: Vec<String>,
    pub weights: Vec<Vec<f64>>,
}

impl AttentionDump {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header = std::iter::once("").chain(self.source.iter().map(String::as_str));
        w.write_record(header).expect("in-memory write");
        for (tok, row) in self.target.iter().zip(&self.weights) {
            let mut rec = vec![tok.clone()];
            rec.extend(row.iter().map(|v| v.to_string()));
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 records")
    }

    pub fn from_csv(text: &str) -> Result<Self, String> {
        let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(text.as_bytes());
        let mut records = r.records();
        let header = records.next().ok_or("empty attention dump")?.map_err(|e| e.to_string())?;
        let source: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        if source.is_empty() {
            return Err("attention dump has no source columns".into());
        }
        let (mut target, mut weights) = (Vec::new(), Vec::new());
        for (i, rec) in records.enumerate() {
            let rec = rec.map_err(|e| e.to_string())?;
            let line = i + 2;
            if rec.len() != source.len() + 1 {
                return Err(format!("line {line}: expected {} fields, found {}", source.len() + 1, rec.len()));
            }
            let row = rec
                .iter()
                .skip(1)
                .map(|v| match v.trim().parse::<f64>() {
                    Ok(x) if (0.0..=1.0).contains(&x) => Ok(x),
                    _ => Err(format!("line {line}: `{v}` is not a weight in [0, 1]")),
                })
                .collect::<Result<Vec<f64>, String>>()?;
            target.push(rec[0].to_string());
            weights.push(row);
        }
        if target.is_empty() {
            return Err("attention dump has no rows".into());
        }
        Ok(AttentionDump { source, target, weights })
    }

    /// P2 graymap: weight 1 is black, weight 0 white.
    pub fn to_pgm(&self) -> String {
        let mut out = format!("P2\n# rows: {}\n# cols: {}\n", self.target.join(" "), self.source.join(" "));
        let _ = writeln!(out, "{} {}\n255", self.source.len(), self.target.len());
        for row in &self.weights {
            let px: Vec<String> = row.iter().map(|a| gray(*a).to_string()).collect();
            let _ = writeln!(out, "{}", px.join(" "));
        }
        out
    }
}

fn gray(alpha: f64) -> u8 {
    (255.0 * (1.0 - alpha)).round() as u8
}
