//! Command logic behind the `lmattr` binary.
//!
//! Each command is a function over parsed arguments returning
//! `Result<(), AttrError>`; the binary maps errors to exit codes
//! (0 success, 2 configuration error, 3 backend/runtime error) via
//! [`exit_code`]. Keeping the logic in a library crate lets integration
//! tests drive commands in-process as well as through the binary.

pub mod config;

use std::fs;
use std::path::{Path, PathBuf};

use lmattr::error::AttrError;
use lmattr::orchestrate::{attribute, evaluation_budget, AttributionResult, Method, RunOptions};
use lmattr::perturb::DEFAULT_SHAPLEY_EXACT_CAP;
use lmattr::render::{render_heatmap, render_html, render_terminal, HeatmapOptions};

use config::{parse_config, Config};

/// Process exit code for a command outcome.
pub fn exit_code(result: &Result<(), AttrError>) -> i32 {
    match result {
        Ok(()) => 0,
        Err(e) if e.is_config_error() => 2,
        Err(_) => 3,
    }
}

/// Flags shared by `run` and `budget` that override config values.
#[derive(Debug, Clone, Default)]
pub struct RunFlags {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub no_cache: bool,
    pub workers: Option<usize>,
    pub timeout_s: Option<u64>,
}

fn load_config(path: &Path) -> Result<Config, AttrError> {
    let text = fs::read_to_string(path)
        .map_err(|e| AttrError::InvalidArg(format!("reading config {}: {e}", path.display())))?;
    parse_config(&text)
}

/// Run one attribution from a config document: write the result JSON and
/// print the terminal table to stdout.
pub fn cmd_run(config_path: &Path, flags: &RunFlags) -> Result<(), AttrError> {
    let config = load_config(config_path)?;
    let model = config.model.build(flags.timeout_s)?;
    let input = config.input.build()?;
    let method = config.method.build()?;
    let target = config.target.build()?;
    let options = RunOptions {
        seed: flags.seed.unwrap_or(config.method.seed),
        workers: flags.workers,
        cache: !flags.no_cache,
    };
    let result = attribute(model, &input, &method, &target, &options)?;
    let out = flags.out.clone().unwrap_or_else(|| PathBuf::from("result.json"));
    fs::write(&out, result.to_json())?;
    eprintln!(
        "{}: {} evaluations in {} ms, result written to {}",
        result.meta.method,
        result.meta.evaluations,
        result.meta.wall_ms,
        out.display()
    );
    print!("{}", render_terminal(&result));
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderFormat {
    Svg,
    Html,
    Term,
}

impl RenderFormat {
    pub fn parse(text: &str) -> Result<Self, AttrError> {
        match text {
            "svg" => Ok(RenderFormat::Svg),
            "html" => Ok(RenderFormat::Html),
            "term" => Ok(RenderFormat::Term),
            other => Err(AttrError::InvalidArg(format!(
                "unknown format '{other}'; valid formats: svg, html, term"
            ))),
        }
    }

    fn extension(self) -> &'static str {
        match self {
            RenderFormat::Svg => "svg",
            RenderFormat::Html => "html",
            RenderFormat::Term => "txt",
        }
    }
}

/// Render a saved result document. Terminal output goes to stdout unless
/// `-o` is given; svg/html default to the result path with the extension
/// swapped.
pub fn cmd_render(
    result_path: &Path,
    format: RenderFormat,
    out: Option<&Path>,
) -> Result<(), AttrError> {
    let text = fs::read_to_string(result_path).map_err(|e| {
        AttrError::InvalidArg(format!("reading result {}: {e}", result_path.display()))
    })?;
    let result = AttributionResult::from_json(&text)?;
    let rendered = match format {
        RenderFormat::Svg => render_heatmap(&result, &HeatmapOptions::default())?,
        RenderFormat::Html => render_html(&result, &HeatmapOptions::default())?,
        RenderFormat::Term => render_terminal(&result),
    };
    match (out, format) {
        (None, RenderFormat::Term) => print!("{rendered}"),
        (out, _) => {
            let path = out
                .map(Path::to_path_buf)
                .unwrap_or_else(|| result_path.with_extension(format.extension()));
            fs::write(&path, rendered)?;
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}

/// Print the evaluation budget for a config without running it. Refuses
/// configurations the run itself would refuse (exact Shapley over the
/// group cap), citing the cap.
pub fn cmd_budget(config_path: &Path) -> Result<(), AttrError> {
    let config = load_config(config_path)?;
    let input = config.input.build()?;
    let method = config.method.build()?;
    let groups = input.group_count();
    if let Method::ShapleyExact { cap } = &method {
        let cap = cap.unwrap_or(DEFAULT_SHAPLEY_EXACT_CAP);
        if groups > cap {
            return Err(AttrError::TooLarge {
                method: "shapley-exact".into(),
                groups,
                needed: 1u128 << groups,
                cap: 1u128 << cap,
            });
        }
    }
    println!("{} evaluations", evaluation_budget(&method, groups));
    Ok(())
}

/// List the available backends and what they support.
pub fn cmd_backends() -> Result<(), AttrError> {
    println!("mock        table-driven oracle: scoring, generation, output distributions");
    println!("toylm       built-in differentiable LM: scoring, generation, output distributions, gradients");
    println!("http        OpenAI-compatible completions endpoint: scoring, generation");
    println!("subprocess  line-delimited JSON child process: scoring, generation");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_split_config_from_runtime() {
        assert_eq!(exit_code(&Ok(())), 0);
        assert_eq!(exit_code(&Err(AttrError::InvalidArg("x".into()))), 2);
        assert_eq!(
            exit_code(&Err(AttrError::Capability { model: "m".into(), needed: "n".into() })),
            2
        );
        assert_eq!(exit_code(&Err(AttrError::Transport("down".into()))), 3);
        assert_eq!(exit_code(&Err(AttrError::Backend("oops".into()))), 3);
    }

    #[test]
    fn render_format_parses_and_rejects() {
        assert_eq!(RenderFormat::parse("svg").unwrap(), RenderFormat::Svg);
        assert_eq!(RenderFormat::parse("html").unwrap(), RenderFormat::Html);
        assert_eq!(RenderFormat::parse("term").unwrap(), RenderFormat::Term);
        assert!(RenderFormat::parse("png").is_err());
    }
}
