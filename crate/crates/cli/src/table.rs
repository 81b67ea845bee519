//! Plain-text table rendering for console output.
//!
//! Tables are fixed-width with a header row and a dashed separator. Cells
//! that look numeric are right-aligned so columns of figures line up; all
//! other cells are left-aligned. Colour is used only for the PASS/FAIL
//! words in preflight output and is disabled when `NO_COLOR` is set or
//! stdout is not a terminal.

use std::io::IsTerminal;

/// Returns true when ANSI colour codes should be emitted.
pub fn color_enabled() -> bool {
    std::env::var_os("NO_COLOR").is_none() && std::io::stdout().is_terminal()
}

/// Wraps `word` in green (PASS) or red (FAIL) when colour is enabled.
pub fn pass_fail(passed: bool) -> String {
    let word = if passed { "PASS" } else { "FAIL" };
    if color_enabled() {
        let code = if passed { "32" } else { "31" };
        format!("\x1b[{code}m{word}\x1b[0m")
    } else {
        word.to_string()
    }
}

fn looks_numeric(cell: &str) -> bool {
    let trimmed = cell.trim();
    !trimmed.is_empty()
        && trimmed
            .trim_start_matches('-')
            .chars()
            .all(|c| c.is_ascii_digit() || c == '.' || c == '%')
        && trimmed.chars().any(|c| c.is_ascii_digit())
}

/// Renders a table with one line per row. Column widths are the maximum of
/// the header and every cell in that column.
pub fn render(headers: &[&str], rows: &[Vec<String>]) -> String {
    let cols = headers.len();
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate().take(cols) {
            widths[i] = widths[i].max(cell.chars().count());
        }
    }
    // A column is right-aligned when every non-empty cell in it is numeric.
    let right_align: Vec<bool> = (0..cols)
        .map(|i| {
            let mut any = false;
            for row in rows {
                if let Some(cell) = row.get(i) {
                    if cell.trim().is_empty() {
                        continue;
                    }
                    if !looks_numeric(cell) {
                        return false;
                    }
                    any = true;
                }
            }
            any
        })
        .collect();

    let mut out = String::new();
    let mut line = Vec::with_capacity(cols);
    for (i, h) in headers.iter().enumerate() {
        line.push(format!("{:<width$}", h, width = widths[i]));
    }
    out.push_str(line.join("  ").trim_end());
    out.push('\n');
    line.clear();
    for w in &widths {
        line.push("-".repeat(*w));
    }
    out.push_str(&line.join("  "));
    out.push('\n');
    for row in rows {
        line.clear();
        for i in 0..cols {
            let cell = row.get(i).map(String::as_str).unwrap_or("");
            if right_align[i] {
                line.push(format!("{:>width$}", cell, width = widths[i]));
            } else {
                line.push(format!("{:<width$}", cell, width = widths[i]));
            }
        }
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_headers_separator_and_rows() {
        let text = render(
            &["name", "seconds"],
            &[
                vec!["alpha".into(), "1.50".into()],
                vec!["b".into(), "12.25".into()],
            ],
        );
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "name   seconds");
        assert_eq!(lines[1], "-----  -------");
        assert_eq!(lines[2], "alpha     1.50");
        assert_eq!(lines[3], "b        12.25");
    }

    #[test]
    fn numeric_columns_right_align_and_text_stays_left() {
        let text = render(
            &["kind", "mae"],
            &[
                vec!["linear".into(), "6.79".into()],
                vec!["random_forest".into(), "3.70".into()],
            ],
        );
        assert!(text.contains("linear         6.79"));
        assert!(text.contains("random_forest  3.70"));
    }

    #[test]
    fn mixed_column_is_left_aligned() {
        let text = render(
            &["value"],
            &[vec!["12".into()], vec!["n/a".into()]],
        );
        assert!(text.contains("12   \n") || text.contains("12\n") || text.contains("12 "));
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[2].starts_with("12"));
    }

    #[test]
    fn pass_fail_is_plain_without_terminal() {
        // Tests run with stdout captured (not a terminal), so colour is off.
        assert_eq!(pass_fail(true), "PASS");
        assert_eq!(pass_fail(false), "FAIL");
    }
}
