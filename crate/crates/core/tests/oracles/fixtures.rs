use exlife_core::exir::MethodId;
use exlife_core::summary::{ApiSummaries, ExceptionSummary, Limits, Mode, SummaryReport};

pub fn corpus(path: &str) -> String {
    let root = concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus/");
    std::fs::read_to_string(format!("{root}{path}")).unwrap()
}

pub fn api(i: usize) -> MethodId {
    MethodId::new("A", format!("m{i}"), &[])
}

/// A report whose APIs `m0..` are present where `queues[i]` is `Some`.
pub fn report(version: &str, queues: &[Option<Vec<ExceptionSummary>>]) -> SummaryReport {
    SummaryReport {
        version: version.to_string(),
        mode: Mode::Inter,
        limits: Limits::default(),
        apis: queues
            .iter()
            .enumerate()
            .filter_map(|(i, q)| {
                q.as_ref().map(|s| ApiSummaries {
                    id: api(i),
                    summaries: s.clone(),
                })
            })
            .collect(),
    }
}
