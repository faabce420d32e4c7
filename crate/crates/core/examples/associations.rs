//! Attribute a biography prompt's influence on a predicted interest.
//!
//! Five template slots collapse into three feature groups: the person
//! (name and pronoun masked together), the location (city and state), and
//! the occupation. Joint baselines keep the grouped slots coherent when
//! they are perturbed, so "Dave ... His" never becomes "Dave ... Her".
//! Runs ablation and sampled Shapley over a hand-tabulated mock model,
//! prints both terminal tables, and writes the Shapley heatmap to
//! `associations.svg`.

use std::sync::Arc;

use lmattr::features::{BaselineBuilder, MaskSpec, SlotValues, TemplateInput};
use lmattr::model::MockModel;
use lmattr::orchestrate::{attribute, Method, RunOptions, TargetSpec};
use lmattr::render::{render_heatmap, render_terminal, HeatmapOptions};
use lmattr::AttrError;

fn main() -> Result<(), AttrError> {
    // The table only knows prompts it cares about; everything else falls
    // back to a uniform next-token distribution, which is what makes the
    // perturbed prompts informative rather than fatal.
    let model = Arc::new(MockModel::new(
        "bio-mock",
        vec!["golf", "skiing", "surfing"],
        vec![
            (
                "Dave lives in Palm Coast, FL and is a lawyer. His personal interests include ",
                vec![("golf", 0.7), ("skiing", 0.1), ("surfing", 0.2)],
            ),
            (
                "Sarah lives in Palm Coast, FL and is a lawyer. Her personal interests include ",
                vec![("golf", 0.6), ("skiing", 0.1), ("surfing", 0.3)],
            ),
            (
                "Dave lives in Aspen, CO and is a lawyer. His personal interests include ",
                vec![("golf", 0.2), ("skiing", 0.7), ("surfing", 0.1)],
            ),
            (
                "Dave lives in Palm Coast, FL and is a teacher. His personal interests include ",
                vec![("golf", 0.4), ("skiing", 0.2), ("surfing", 0.4)],
            ),
        ],
        None,
    )?);

    let input = TemplateInput::new(
        "{name} lives in {city}, {state} and is a {occupation}. \
         {pronoun} personal interests include ",
        SlotValues::named(vec![
            ("name", "Dave"),
            ("city", "Palm Coast"),
            ("state", "FL"),
            ("occupation", "lawyer"),
            ("pronoun", "His"),
        ]),
        BaselineBuilder::new()
            .joint(vec!["name".into(), "pronoun".into()], vec![vec!["Sarah", "Her"]])
            .joint(vec!["city".into(), "state".into()], vec![vec!["Aspen", "CO"]])
            .choices("occupation", vec!["teacher"]),
        // Three groups: 0 = person, 1 = location, 2 = occupation.
        Some(MaskSpec::Pairs(vec![
            ("name".into(), 0),
            ("pronoun".into(), 0),
            ("city".into(), 1),
            ("state".into(), 1),
            ("occupation".into(), 2),
        ])),
    )?;

    let target = TargetSpec::FixedString { text: "golf".into() };
    let options = RunOptions::default();

    let ablation = attribute(model.clone(), &input, &Method::Ablation, &target, &options)?;
    println!("ablation ({} evaluations):", ablation.meta.evaluations);
    print!("{}", render_terminal(&ablation));

    let method = Method::ShapleySampling { n_permutations: 50, antithetic: true };
    let shapley = attribute(model, &input, &method, &target, &options)?;
    println!("\nsampled shapley ({} evaluations):", shapley.meta.evaluations);
    print!("{}", render_terminal(&shapley));

    let svg = render_heatmap(&shapley, &HeatmapOptions::default())?;
    std::fs::write("associations.svg", svg)?;
    println!("\nheatmap written to associations.svg");
    Ok(())
}
