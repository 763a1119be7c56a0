//! Command implementations behind the `exlife` binary.
//!
//! `extract` turns EXIR files into summary reports, `diff` compares two
//! summary reports and `lifecycle` runs both over an ordered version list.
//! Every JSON file is written with sorted keys and a trailing newline.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use exlife_core::exir::{parse_program, ExirProgram};
use exlife_core::graphs::{build_cfg, cdg_to_dot, cfg_to_dot, control_dependence};
use exlife_core::json::{from_str, to_canonical_string};
use exlife_core::lifecycle::{
    build_lifecycle, render_text, summarize_statistics, LifecycleReport, Statistics,
};
use exlife_core::matching::{diff_reports, ChangeReport};
use exlife_core::summary::{extract_summaries, ExtractOptions, Limits, Mode, SummaryReport};

/// Analysis settings shared by every command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub mode: Mode,
    pub path_cap: usize,
    pub loop_unroll: usize,
    pub clause_limit: usize,
    pub pretty: bool,
    pub parallel: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let limits = Limits::default();
        RunConfig {
            mode: Mode::Inter,
            path_cap: limits.path_cap,
            loop_unroll: limits.loop_unroll,
            clause_limit: limits.clause_limit,
            pretty: false,
            parallel: true,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        ensure!(self.path_cap >= 1, "--path-cap must be at least 1");
        ensure!(self.clause_limit >= 1, "--clause-limit must be at least 1");
        ensure!(self.loop_unroll <= 1, "--loop-unroll must be 0 or 1");
        Ok(())
    }

    pub fn options(&self) -> ExtractOptions {
        ExtractOptions {
            mode: self.mode,
            limits: Limits {
                path_cap: self.path_cap,
                loop_unroll: self.loop_unroll,
                clause_limit: self.clause_limit,
            },
            parallel: self.parallel,
        }
    }
}

/// Version label of an input: the file name without its extension, or
/// without `.summary.json` for summary reports.
pub fn version_label(path: &Path) -> Result<String> {
    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .with_context(|| format!("{}: not a file name", path.display()))?;
    let stem = name
        .strip_suffix(".summary.json")
        .or_else(|| name.strip_suffix(".json"))
        .or_else(|| name.strip_suffix(".exir"))
        .unwrap_or(name);
    ensure!(!stem.is_empty(), "{}: empty version label", path.display());
    Ok(stem.to_string())
}

fn labels_for(inputs: &[PathBuf], labels: &[String]) -> Result<Vec<String>> {
    if labels.is_empty() {
        return inputs.iter().map(|p| version_label(p)).collect();
    }
    ensure!(
        labels.len() == inputs.len(),
        "{} --version-label value(s) for {} input(s)",
        labels.len(),
        inputs.len()
    );
    Ok(labels.to_vec())
}

pub fn load_program(path: &Path, label: &str) -> Result<ExirProgram> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_program(&text, label).map_err(|e| anyhow::anyhow!("{}:{e}", path.display()))
}

pub fn load_summaries(path: &Path) -> Result<SummaryReport> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    from_str(&text).with_context(|| format!("{}: not a summary report", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = to_canonical_string(value)?;
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))
}

fn file_safe(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

fn dump_graphs(program: &ExirProgram, dir: &Path) -> Result<()> {
    let dir = dir.join(file_safe(&program.version));
    create_dir(&dir)?;
    for m in &program.methods {
        let cfg = build_cfg(m);
        let cdg = control_dependence(&cfg);
        let base = file_safe(&m.id.to_string());
        write_text(&dir.join(format!("{base}.cfg.dot")), &cfg_to_dot(m, &cfg))?;
        write_text(
            &dir.join(format!("{base}.cdg.dot")),
            &cdg_to_dot(m, &cfg, &cdg),
        )?;
    }
    Ok(())
}

/// Parses every input before extracting anything, so a malformed file
/// leaves no output behind.
fn parse_all(inputs: &[PathBuf], labels: &[String]) -> Result<Vec<ExirProgram>> {
    let labels = labels_for(inputs, labels)?;
    inputs
        .iter()
        .zip(&labels)
        .map(|(p, l)| load_program(p, l))
        .collect()
}

fn extract_all(programs: &[ExirProgram], cfg: &RunConfig) -> Vec<SummaryReport> {
    let opts = cfg.options();
    if cfg.parallel {
        programs
            .par_iter()
            .map(|p| extract_summaries(p, &opts))
            .collect()
    } else {
        programs
            .iter()
            .map(|p| extract_summaries(p, &opts))
            .collect()
    }
}

/// Writes `<out_dir>/<version>.summary.json` per input and returns the
/// written paths.
pub fn cmd_extract(
    inputs: &[PathBuf],
    labels: &[String],
    out_dir: &Path,
    cfg: &RunConfig,
    dot_dir: Option<&Path>,
) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    ensure!(!inputs.is_empty(), "no input files");
    let programs = parse_all(inputs, labels)?;
    let mut seen = std::collections::BTreeSet::new();
    for p in &programs {
        ensure!(seen.insert(&p.version), "version {} given twice", p.version);
    }
    let reports = extract_all(&programs, cfg);
    create_dir(out_dir)?;
    let mut written = Vec::new();
    for r in &reports {
        let path = out_dir.join(format!("{}.summary.json", r.version));
        write_json(&path, r)?;
        if cfg.pretty {
            write_text(
                &out_dir.join(format!("{}.summary.txt", r.version)),
                &r.render_text(),
            )?;
        }
        written.push(path);
    }
    if let Some(dir) = dot_dir {
        for p in &programs {
            dump_graphs(p, dir)?;
        }
    }
    Ok(written)
}

/// Compares two summary reports and writes the change report to `out`.
pub fn cmd_diff(old: &Path, new: &Path, out: &Path, pretty: bool) -> Result<ChangeReport> {
    let (a, b) = (load_summaries(old)?, load_summaries(new)?);
    let report = diff_reports(&a, &b)
        .with_context(|| format!("comparing {} with {}", old.display(), new.display()))?;
    write_json(out, &report)?;
    if pretty {
        write_text(&out.with_extension("txt"), &report.render_text())?;
    }
    Ok(report)
}

/// Summary reports for an ordered list of `.exir` or summary `.json` inputs.
pub fn load_versions(
    inputs: &[PathBuf],
    labels: &[String],
    cfg: &RunConfig,
) -> Result<Vec<SummaryReport>> {
    let labels = labels_for(inputs, labels)?;
    enum Loaded {
        Program(ExirProgram),
        Report(SummaryReport),
    }
    let loaded: Vec<Loaded> = inputs
        .iter()
        .zip(&labels)
        .map(|(p, l)| {
            if p.extension().is_some_and(|e| e == "json") {
                let mut r = load_summaries(p)?;
                if !l.is_empty() && version_label(p)? != *l {
                    r.version = l.clone();
                }
                Ok(Loaded::Report(r))
            } else {
                load_program(p, l).map(Loaded::Program)
            }
        })
        .collect::<Result<_>>()?;
    let opts = cfg.options();
    let extract = |l: Loaded| match l {
        Loaded::Program(p) => extract_summaries(&p, &opts),
        Loaded::Report(r) => r,
    };
    let reports: Vec<SummaryReport> = if cfg.parallel {
        loaded.into_par_iter().map(extract).collect()
    } else {
        loaded.into_iter().map(extract).collect()
    };
    for w in reports.windows(2) {
        if w[0].mode != w[1].mode {
            bail!(
                "version {} was analyzed in {} mode but {} in {} mode",
                w[0].version,
                w[0].mode,
                w[1].version,
                w[1].mode
            );
        }
    }
    Ok(reports)
}

/// Diffs adjacent versions in the given order and builds the lifecycle.
pub fn lifecycle_of(reports: &[SummaryReport]) -> Result<(LifecycleReport, Statistics)> {
    ensure!(!reports.is_empty(), "no versions given");
    let diffs = reports
        .windows(2)
        .map(|w| {
            diff_reports(&w[0], &w[1])
                .with_context(|| format!("comparing {} with {}", w[0].version, w[1].version))
        })
        .collect::<Result<Vec<_>>>()?;
    let life = build_lifecycle(reports, &diffs)?;
    let stats = summarize_statistics(&life);
    Ok((life, stats))
}

/// Writes `lifecycle.json` and `statistics.json` (and `lifecycle.txt` when
/// pretty) into `out_dir`.
pub fn cmd_lifecycle(
    inputs: &[PathBuf],
    labels: &[String],
    out_dir: &Path,
    cfg: &RunConfig,
) -> Result<(LifecycleReport, Statistics)> {
    cfg.validate()?;
    ensure!(!inputs.is_empty(), "no versions given");
    let reports = load_versions(inputs, labels, cfg)?;
    let (life, stats) = lifecycle_of(&reports)?;
    create_dir(out_dir)?;
    write_json(&out_dir.join("lifecycle.json"), &life)?;
    write_json(&out_dir.join("statistics.json"), &stats)?;
    if cfg.pretty {
        write_text(&out_dir.join("lifecycle.txt"), &render_text(&life))?;
    }
    Ok((life, stats))
}
