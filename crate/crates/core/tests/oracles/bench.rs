use exlife_core::exir::parse_program;
use exlife_core::summary::{extract_summaries, ExtractOptions};

use super::fixtures::corpus;

pub const CATEGORIES: [&str; 6] = [
    "basic",
    "multiple-call",
    "multiple-path",
    "multiple-throw",
    "field-value",
    "motivation",
];

pub struct BenchResult {
    pub category: &'static str,
    pub exceptions: usize,
    /// First differing line, numbered from 1, with expected and actual text.
    pub mismatch: Option<(usize, String, String)>,
}

pub fn run_category(category: &'static str) -> BenchResult {
    let program = parse_program(&corpus(&format!("bench/{category}.exir")), category)
        .unwrap_or_else(|e| panic!("{category}: {e}"));
    let report = extract_summaries(&program, &ExtractOptions::default());
    let actual = report.render_text();
    let expected = corpus(&format!("bench/{category}.expected"));
    let mismatch = if actual == expected {
        None
    } else {
        let (e, a): (Vec<&str>, Vec<&str>) = (expected.lines().collect(), actual.lines().collect());
        let line = (0..e.len().max(a.len()))
            .find(|&i| e.get(i) != a.get(i))
            .unwrap_or(e.len());
        Some((
            line + 1,
            e.get(line).unwrap_or(&"<end>").to_string(),
            a.get(line).unwrap_or(&"<end>").to_string(),
        ))
    };
    BenchResult {
        category,
        exceptions: report.apis.iter().map(|a| a.summaries.len()).sum(),
        mismatch,
    }
}
