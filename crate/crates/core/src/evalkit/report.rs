use super::EvaluationRow;

pub const COLUMNS: [&str; 6] = ["Source", "Ex.", "Inst.", "Retr.", "Rec.", "Acc."];

/// Aligned text table. The source column is left-aligned, the rest right.
pub fn format_report(rows: &[EvaluationRow]) -> String {
    let cells: Vec<[String; 6]> = rows
        .iter()
        .map(|r| {
            [
                r.source.clone(),
                r.examples.to_string(),
                r.instances.to_string(),
                r.retrieved.to_string(),
                r.recall_text(),
                r.accuracy_text(),
            ]
        })
        .collect();
    let mut widths = COLUMNS.map(str::len);
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cols: [&str; 6]| {
        let mut s = format!("{:<w$}", cols[0], w = widths[0]);
        for (c, w) in cols.iter().zip(widths).skip(1) {
            s.push_str(&format!("  {c:>w$}"));
        }
        s.push('\n');
        s
    };
    let mut out = line(COLUMNS);
    for row in &cells {
        out.push_str(&line([&row[0], &row[1], &row[2], &row[3], &row[4], &row[5]]));
    }
    out
}

/// One JSON object per row.
pub fn format_report_jsonl(rows: &[EvaluationRow]) -> String {
    rows.iter().map(|r| serde_json::to_string(r).expect("row serializes") + "\n").collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evalkit::Score;

    #[test]
    fn header_only() {
        assert_eq!(format_report(&[]), "Source  Ex.  Inst.  Retr.  Rec.  Acc.\n");
        assert_eq!(format_report_jsonl(&[]), "");
    }

    #[test]
    fn layout() {
        let rows = vec![
            EvaluationRow::new("Google", 3, &Score { considered: 100, retrieved: 72, correct: 72 }),
            EvaluationRow::new("Empty", 1, &Score { considered: 4, retrieved: 0, correct: 0 }),
        ];
        let text = format_report(&rows);
        assert_eq!(
            text,
            "Source  Ex.  Inst.  Retr.  Rec.  Acc.\n\
             Google    3    100     72  0.72  1.00\n\
             Empty     1      4      0  0.00   n/a\n"
        );
        let json = format_report_jsonl(&rows);
        assert!(json.starts_with("{\"source\":\"Google\",\"examples\":3,\"instances\":100,\"retrieved\":72,"));
        assert!(json.lines().nth(1).unwrap().ends_with("\"accuracy\":null}"));
    }
}
