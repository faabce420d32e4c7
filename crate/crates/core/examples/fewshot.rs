//! Attribute a few-shot prompt's in-context examples to the predicted
//! label.
//!
//! Each example line is one feature whose baseline is the empty string, so
//! perturbing a group deletes the example from the prompt instead of
//! swapping it for other text. A custom prompt formatter rebuilds the
//! prompt from whichever examples survive, and exact Shapley splits the
//! label log-prob across the three examples.

use std::sync::Arc;

use lmattr::features::{BaselineBuilder, SlotValues, TemplateInput};
use lmattr::model::MockModel;
use lmattr::orchestrate::{attribute, Method, RunOptions, TargetSpec};
use lmattr::render::render_terminal;
use lmattr::AttrError;

const QUERY: &str = "Review: a warm, funny surprise. Sentiment: ";

const EXAMPLES: [&str; 3] = [
    "Review: the pacing was perfect. Sentiment: positive",
    "Review: stale popcorn, stale plot. Sentiment: negative",
    "Review: I cried twice, in a good way. Sentiment: positive",
];

/// Surviving example lines, then the query line.
fn build_prompt(values: &[String]) -> String {
    let mut lines: Vec<&str> =
        values.iter().map(String::as_str).filter(|v| !v.is_empty()).collect();
    lines.push(QUERY);
    lines.join("\n")
}

fn main() -> Result<(), AttrError> {
    // One mock row per subset of surviving examples. Each example nudges
    // p("positive") by its lean, so the exact Shapley value of an example
    // is its average marginal effect on the label log-prob.
    let leans = [0.3, -0.25, 0.2];
    let rows: Vec<(String, f64)> = (0u32..8)
        .map(|mask| {
            let surviving: Vec<String> = (0..3)
                .map(|i| if mask >> i & 1 == 1 { EXAMPLES[i].to_string() } else { String::new() })
                .collect();
            let p = 0.35
                + (0..3).filter(|i| mask >> i & 1 == 1).map(|i| leans[i]).sum::<f64>();
            (build_prompt(&surviving), p)
        })
        .collect();
    let table = rows
        .iter()
        .map(|(prompt, p)| {
            (prompt.as_str(), vec![("positive", *p), ("negative", 1.0 - *p)])
        })
        .collect();
    let model = Arc::new(MockModel::new("fewshot-mock", vec!["positive", "negative"], table, None)?);

    let input = TemplateInput::custom(
        Arc::new(build_prompt),
        SlotValues::positional(EXAMPLES.to_vec()),
        BaselineBuilder::fixed_all(vec!["", "", ""]),
        None,
    )?;

    let result = attribute(
        model,
        &input,
        &Method::ShapleyExact { cap: None },
        &TargetSpec::FixedString { text: "positive".into() },
        &RunOptions::default(),
    )?;

    println!("exact shapley ({} evaluations):", result.meta.evaluations);
    print!("{}", render_terminal(&result));
    let swing: f64 = result.totals.iter().sum();
    println!("\nexamples move ln p(positive) by {swing:.4} relative to the bare query");
    Ok(())
}
