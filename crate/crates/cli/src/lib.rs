//! Configuration, task orchestration, reports and figures for `hypmirror`.

pub mod config;
pub mod report;
pub mod svg;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use num_rational::BigRational;
use serde_json::Value;
use thiserror::Error;

use hypmirror_core::arrangement::{load_and_normalize, HypertoricData};
use hypmirror_core::symbolic::Var;
use hypmirror_core::tropical::{build_tropical, TropicalArrangement};

use config::{ConfigError, Format, JobConfig, KahlerMode, Task};
use report::TaskReport;
use svg::{emit_svg, FigureKind};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("input: {0}")]
    Input(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Reports keyed by task name, the names of failed verifications, and rendered figures.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Bundle {
    pub reports: BTreeMap<String, Value>,
    pub failed: Vec<String>,
    pub svgs: BTreeMap<String, String>,
}

impl Bundle {
    pub fn exit_code(&self) -> i32 {
        if self.failed.is_empty() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.reports).expect("serializable") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (task, value) in &self.reports {
            flatten(task, value, &mut out);
        }
        if !self.failed.is_empty() {
            out.push_str(&format!("FAILED: {}\n", self.failed.join(", ")));
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Text => self.to_text(),
        }
    }

    pub fn write_to(&self, dir: &Path) -> Result<(), RunError> {
        fs::create_dir_all(dir)?;
        for (task, value) in &self.reports {
            let text = serde_json::to_string_pretty(value).expect("serializable") + "\n";
            fs::write(dir.join(format!("{task}.json")), text)?;
        }
        for (name, svg) in &self.svgs {
            fs::write(dir.join(format!("{name}.svg")), svg)?;
        }
        Ok(())
    }
}

fn flatten(path: &str, value: &Value, out: &mut String) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&format!("{path}.{k}"), v, out);
            }
        }
        Value::Array(items) if items.iter().any(|v| v.is_object() || v.is_array()) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{path}[{i}]"), v, out);
            }
        }
        Value::String(s) => out.push_str(&format!("{path} = {s}\n")),
        other => out.push_str(&format!("{path} = {other}\n")),
    }
}

fn kahler_values(
    cfg: &JobConfig,
    h: &HypertoricData,
) -> Result<Option<BTreeMap<Var, BigRational>>, RunError> {
    match &cfg.input.kahler {
        KahlerMode::Formal => Ok(None),
        KahlerMode::Numeric(values) => {
            let mut out = BTreeMap::new();
            for (name, q) in values {
                let v = Var::new(name);
                if !h.kahler.contains(&v) {
                    return Err(ConfigError::new(
                        format!("/input/kahler/values/{name}"),
                        format!(
                            "not a Kähler variable; expected one of {}",
                            h.kahler
                                .iter()
                                .map(|k| k.to_string())
                                .collect::<Vec<_>>()
                                .join(", ")
                        ),
                    )
                    .into());
                }
                out.insert(v, q.clone());
            }
            Ok(Some(out))
        }
    }
}

/// Runs the given tasks, and renders figures when `svg` is set.
pub fn run(cfg: &JobConfig, tasks: &[Task], svg: bool) -> Result<Bundle, RunError> {
    let h = load_and_normalize(&cfg.input.raw()).map_err(|e| RunError::Input(e.to_string()))?;
    let values = kahler_values(cfg, &h)?;
    let needs_tropical = svg
        || tasks.iter().any(|t| {
            matches!(
                t,
                Task::Chambers | Task::Strata | Task::Mirror | Task::Atlas | Task::Verify
            )
        });
    let arr: Option<TropicalArrangement> = if needs_tropical {
        Some(build_tropical(&h).map_err(|e| RunError::Input(e.to_string()))?)
    } else {
        None
    };
    let mut bundle = Bundle::default();
    let mut atlas = None;
    for &task in tasks {
        let arr_ref = || arr.as_ref().expect("built");
        let report: TaskReport = match task {
            Task::Check => report::check_report(&h),
            Task::Circuits => report::circuits_report(&h).map_err(RunError::Input)?,
            Task::Chambers => report::chambers_report(&h, arr_ref()),
            Task::Strata => report::strata_report(&h, arr_ref()),
            Task::Mirror => {
                report::mirror_report(&h, arr_ref(), values.as_ref()).map_err(RunError::Input)?
            }
            Task::Atlas | Task::Verify => {
                if atlas.is_none() {
                    atlas = Some(
                        report::build_faulty_atlas(&h, arr_ref(), &cfg.faults)
                            .map_err(RunError::Input)?,
                    );
                }
                let a = atlas.as_ref().expect("built");
                if task == Task::Atlas {
                    report::atlas_report(a)
                } else {
                    report::verify_report(a)
                }
            }
            Task::Multiplicative => report::multiplicative_report(&h, &cfg.faults),
            Task::Periods => report::periods_report(&h, values.as_ref()),
        };
        bundle
            .failed
            .extend(report.failures.iter().map(|f| format!("{task}: {f}")));
        bundle.reports.insert(task.name().to_string(), report.value);
    }
    if svg {
        let arr = arr.as_ref().expect("built");
        for (name, kind) in [
            ("real", FigureKind::Real),
            ("tropical", FigureKind::Tropical),
        ] {
            let doc =
                emit_svg(&h, arr, kind, &cfg.render).map_err(|e| RunError::Input(e.to_string()))?;
            bundle.svgs.insert(name.to_string(), doc);
        }
    }
    Ok(bundle)
}
