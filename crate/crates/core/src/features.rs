//! Interpretable features over prompt text.
//!
//! A prompt is split into literal text plus slots; each slot has an
//! original value and a baseline (what it becomes when "absent"). Slots
//! are partitioned into feature groups that are perturbed, and scored, as
//! single units. An [`IncludeSet`] names the groups currently at their
//! original values; everything else takes baseline values.
//!
//! Baselines come in three shapes: a fixed replacement per slot, a uniform
//! choice list per slot, or a joint choice over several slots at once (the
//! members of a tuple are always co-selected, e.g. a name and the matching
//! pronoun).

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::AttrError;

/// Addresses a template slot either by position or by placeholder name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum SlotKey {
    Index(usize),
    Name(String),
}

impl fmt::Display for SlotKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlotKey::Index(i) => write!(f, "{i}"),
            SlotKey::Name(n) => write!(f, "{n}"),
        }
    }
}

impl From<usize> for SlotKey {
    fn from(i: usize) -> Self {
        SlotKey::Index(i)
    }
}

impl From<&str> for SlotKey {
    fn from(n: &str) -> Self {
        SlotKey::Name(n.to_string())
    }
}

/// A parsed text template: literal segments interleaved with slots.
///
/// Syntax: `{}` positional slot, `{name}` named slot, `{{` / `}}` literal
/// braces. Positional and named slots cannot be mixed in one template.
#[derive(Debug, Clone)]
pub struct Template {
    /// literals.len() == slot count + 1; the prompt is
    /// literals[0] + value[0] + literals[1] + ... + value[n-1] + literals[n].
    literals: Vec<String>,
    /// Slot names in order; None for a purely positional template.
    names: Option<Vec<String>>,
}

impl Template {
    pub fn parse(text: &str) -> Result<Template, AttrError> {
        let mut literals = vec![String::new()];
        let mut names: Vec<String> = Vec::new();
        let mut positional = 0usize;
        let mut chars = text.chars().peekable();
        while let Some(c) = chars.next() {
            match c {
                '{' => {
                    if chars.peek() == Some(&'{') {
                        chars.next();
                        literals.last_mut().unwrap().push('{');
                        continue;
                    }
                    let mut name = String::new();
                    loop {
                        match chars.next() {
                            Some('}') => break,
                            Some(ch) if ch.is_ascii_alphanumeric() || ch == '_' => name.push(ch),
                            Some(ch) => {
                                return Err(AttrError::Template(format!(
                                    "invalid character '{ch}' in placeholder name"
                                )))
                            }
                            None => {
                                return Err(AttrError::Template(
                                    "unterminated '{' placeholder".into(),
                                ))
                            }
                        }
                    }
                    if name.is_empty() {
                        positional += 1;
                    } else {
                        names.push(name);
                    }
                    literals.push(String::new());
                }
                '}' => {
                    if chars.peek() == Some(&'}') {
                        chars.next();
                        literals.last_mut().unwrap().push('}');
                    } else {
                        return Err(AttrError::Template("unmatched '}' outside placeholder".into()));
                    }
                }
                c => literals.last_mut().unwrap().push(c),
            }
        }
        if positional > 0 && !names.is_empty() {
            return Err(AttrError::Template(
                "cannot mix positional '{}' and named '{name}' placeholders".into(),
            ));
        }
        let names = if names.is_empty() { None } else { Some(names) };
        if let Some(ns) = &names {
            let mut seen = BTreeSet::new();
            for n in ns {
                if !seen.insert(n.clone()) {
                    return Err(AttrError::Template(format!(
                        "placeholder '{{{n}}}' appears more than once"
                    )));
                }
            }
        }
        Ok(Template { literals, names })
    }

    pub fn slot_count(&self) -> usize {
        self.literals.len() - 1
    }

    pub fn slot_names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    fn render(&self, assignment: &[String]) -> String {
        let mut out = String::new();
        for (i, lit) in self.literals.iter().enumerate() {
            out.push_str(lit);
            if i < assignment.len() {
                out.push_str(&assignment[i]);
            }
        }
        out
    }
}

/// How a prompt string is produced from slot values: a parsed [`Template`]
/// or an arbitrary caller-supplied formatting function (useful when prompt
/// construction is conditional, e.g. assembling few-shot examples).
#[derive(Clone)]
pub enum PromptSource {
    Template(Template),
    Custom(Arc<dyn Fn(&[String]) -> String + Send + Sync>),
}

impl fmt::Debug for PromptSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PromptSource::Template(t) => f.debug_tuple("Template").field(t).finish(),
            PromptSource::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Baseline replacement rules, canonicalized to slot indices.
///
/// Every slot is covered by exactly one entry; entries are kept sorted by
/// their first slot so draw order is stable.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineSpec {
    entries: Vec<BaselineEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BaselineEntry {
    Fixed { slot: usize, value: String },
    Choices { slot: usize, options: Vec<String> },
    Product { slots: Vec<usize>, tuples: Vec<Vec<String>> },
}

impl BaselineEntry {
    fn slots(&self) -> Vec<usize> {
        match self {
            BaselineEntry::Fixed { slot, .. } | BaselineEntry::Choices { slot, .. } => vec![*slot],
            BaselineEntry::Product { slots, .. } => slots.clone(),
        }
    }

    fn first_slot(&self) -> usize {
        self.slots().into_iter().min().unwrap_or(usize::MAX)
    }
}

impl BaselineSpec {
    pub fn entries(&self) -> &[BaselineEntry] {
        &self.entries
    }
}

/// Baseline rules as supplied by the caller, keyed by slot position or
/// name. Resolved against a template by [`TemplateInput::new`].
#[derive(Debug, Clone, Default)]
pub struct BaselineBuilder {
    fixed: Vec<(SlotKey, String)>,
    choices: Vec<(SlotKey, Vec<String>)>,
    joint: Vec<(Vec<SlotKey>, Vec<Vec<String>>)>,
}

impl BaselineBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Fixed replacements for all slots at once, in slot order.
    pub fn fixed_all<S: Into<String>>(values: Vec<S>) -> Self {
        let mut b = Self::new();
        for (i, v) in values.into_iter().enumerate() {
            b.fixed.push((SlotKey::Index(i), v.into()));
        }
        b
    }

    pub fn fixed(mut self, key: impl Into<SlotKey>, value: impl Into<String>) -> Self {
        self.fixed.push((key.into(), value.into()));
        self
    }

    pub fn choices<S: Into<String>>(mut self, key: impl Into<SlotKey>, options: Vec<S>) -> Self {
        self.choices
            .push((key.into(), options.into_iter().map(Into::into).collect()));
        self
    }

    /// Joint choice list over several slots; each tuple is co-selected.
    pub fn joint<S: Into<String>>(
        mut self,
        keys: Vec<SlotKey>,
        tuples: Vec<Vec<S>>,
    ) -> Self {
        self.joint.push((
            keys,
            tuples
                .into_iter()
                .map(|t| t.into_iter().map(Into::into).collect())
                .collect(),
        ));
        self
    }
}

/// Distinguishes caller-labeled groups from implicit singletons while
/// normalizing a mask, so unlabeled slots can never merge with a labeled
/// group that happens to share a number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum GroupLabel {
    Masked(u64),
    Singleton(usize),
}

/// Mask input: per-slot group labels (aligned with slots) or explicit
/// (slot, label) pairs. Labels are arbitrary; they are normalized to
/// contiguous ids ordered by first slot occurrence.
#[derive(Debug, Clone)]
pub enum MaskSpec {
    PerSlot(Vec<u64>),
    Pairs(Vec<(SlotKey, u64)>),
}

/// Slot values as supplied by the caller.
#[derive(Debug, Clone)]
pub enum SlotValues {
    Positional(Vec<String>),
    Named(Vec<(String, String)>),
}

impl SlotValues {
    pub fn positional<S: Into<String>>(values: Vec<S>) -> Self {
        SlotValues::Positional(values.into_iter().map(Into::into).collect())
    }

    pub fn named<K: Into<String>, V: Into<String>>(pairs: Vec<(K, V)>) -> Self {
        SlotValues::Named(pairs.into_iter().map(|(k, v)| (k.into(), v.into())).collect())
    }
}

/// A prompt template bound to original values, baselines, and a feature
/// grouping. The unit every attribution run starts from.
#[derive(Debug, Clone)]
pub struct TemplateInput {
    source: PromptSource,
    /// Slot names in slot order (None for positional templates/custom sources).
    slot_names: Option<Vec<String>>,
    values: Vec<String>,
    baselines: BaselineSpec,
    /// group id -> slot indices; normalized (contiguous ids, ordered by
    /// first slot occurrence, every slot in exactly one group).
    groups: Vec<Vec<usize>>,
}

impl TemplateInput {
    /// Binds a template string to values, baselines, and an optional mask.
    pub fn new(
        template: &str,
        values: SlotValues,
        baselines: BaselineBuilder,
        mask: Option<MaskSpec>,
    ) -> Result<Self, AttrError> {
        let template = Template::parse(template)?;
        Self::with_source(PromptSource::Template(template), values, baselines, mask)
    }

    /// Same as [`TemplateInput::new`] but with a caller-supplied formatting
    /// function instead of a template string. `values` must be positional
    /// (or named, in which case names only serve as slot keys and labels).
    pub fn custom(
        format: Arc<dyn Fn(&[String]) -> String + Send + Sync>,
        values: SlotValues,
        baselines: BaselineBuilder,
        mask: Option<MaskSpec>,
    ) -> Result<Self, AttrError> {
        Self::with_source(PromptSource::Custom(format), values, baselines, mask)
    }

    fn with_source(
        source: PromptSource,
        values: SlotValues,
        baselines: BaselineBuilder,
        mask: Option<MaskSpec>,
    ) -> Result<Self, AttrError> {
        let (slot_names, values) = match (&source, values) {
            (PromptSource::Template(t), SlotValues::Positional(vals)) => {
                if let Some(names) = t.slot_names() {
                    return Err(AttrError::Arity(format!(
                        "template has named placeholders {names:?}; supply named values"
                    )));
                }
                if vals.len() != t.slot_count() {
                    return Err(AttrError::Arity(format!(
                        "template has {} slots but {} values were supplied",
                        t.slot_count(),
                        vals.len()
                    )));
                }
                (None, vals)
            }
            (PromptSource::Template(t), SlotValues::Named(pairs)) => {
                let names = t.slot_names().ok_or_else(|| {
                    AttrError::Arity(
                        "template has positional placeholders; supply positional values".into(),
                    )
                })?;
                let mut ordered = Vec::with_capacity(names.len());
                let mut supplied: BTreeSet<&str> =
                    pairs.iter().map(|(k, _)| k.as_str()).collect();
                if supplied.len() != pairs.len() {
                    return Err(AttrError::Arity("duplicate value key".into()));
                }
                for name in names {
                    let v = pairs
                        .iter()
                        .find(|(k, _)| k == name)
                        .map(|(_, v)| v.clone())
                        .ok_or_else(|| {
                            AttrError::Arity(format!("missing value for slot '{name}'"))
                        })?;
                    supplied.remove(name.as_str());
                    ordered.push(v);
                }
                if !supplied.is_empty() {
                    return Err(AttrError::Arity(format!(
                        "values supplied for unknown slots: {supplied:?}"
                    )));
                }
                (Some(names.to_vec()), ordered)
            }
            (PromptSource::Custom(_), SlotValues::Positional(vals)) => (None, vals),
            (PromptSource::Custom(_), SlotValues::Named(pairs)) => {
                let names: Vec<String> = pairs.iter().map(|(k, _)| k.clone()).collect();
                let mut seen = BTreeSet::new();
                for n in &names {
                    if !seen.insert(n.clone()) {
                        return Err(AttrError::Arity("duplicate value key".into()));
                    }
                }
                let vals = pairs.into_iter().map(|(_, v)| v).collect();
                (Some(names), vals)
            }
        };
        if values.is_empty() {
            return Err(AttrError::Arity("at least one slot is required".into()));
        }

        let mut input = TemplateInput {
            source,
            slot_names,
            values,
            baselines: BaselineSpec { entries: Vec::new() },
            groups: Vec::new(),
        };
        input.baselines = input.resolve_baselines(baselines)?;
        input.groups = input.normalize_mask(mask)?;
        Ok(input)
    }

    fn slot_index(&self, key: &SlotKey) -> Result<usize, AttrError> {
        match key {
            SlotKey::Index(i) => {
                if *i < self.values.len() {
                    Ok(*i)
                } else {
                    Err(AttrError::Arity(format!(
                        "slot index {i} out of range (slots: {})",
                        self.values.len()
                    )))
                }
            }
            SlotKey::Name(n) => self
                .slot_names
                .as_ref()
                .and_then(|names| names.iter().position(|x| x == n))
                .ok_or_else(|| AttrError::Arity(format!("unknown slot '{n}'"))),
        }
    }

    fn resolve_baselines(&self, b: BaselineBuilder) -> Result<BaselineSpec, AttrError> {
        let mut covered = vec![false; self.values.len()];
        let mut cover = |slot: usize| -> Result<(), AttrError> {
            if covered[slot] {
                return Err(AttrError::Baseline(format!(
                    "slot {} is covered by more than one baseline entry",
                    self.slot_label(slot)
                )));
            }
            covered[slot] = true;
            Ok(())
        };
        let mut entries = Vec::new();
        for (key, value) in b.fixed {
            let slot = self.slot_index(&key)?;
            cover(slot)?;
            entries.push(BaselineEntry::Fixed { slot, value });
        }
        for (key, options) in b.choices {
            let slot = self.slot_index(&key)?;
            cover(slot)?;
            if options.is_empty() {
                return Err(AttrError::Baseline(format!(
                    "empty choice list for slot {}",
                    self.slot_label(slot)
                )));
            }
            entries.push(BaselineEntry::Choices { slot, options });
        }
        for (keys, tuples) in b.joint {
            let slots = keys
                .iter()
                .map(|k| self.slot_index(k))
                .collect::<Result<Vec<_>, _>>()?;
            for &slot in &slots {
                cover(slot)?;
            }
            if tuples.is_empty() {
                return Err(AttrError::Baseline("empty joint choice list".into()));
            }
            for t in &tuples {
                if t.len() != slots.len() {
                    return Err(AttrError::Baseline(format!(
                        "joint tuple arity {} does not match its {} slots",
                        t.len(),
                        slots.len()
                    )));
                }
            }
            entries.push(BaselineEntry::Product { slots, tuples });
        }
        if let Some(missing) = covered.iter().position(|c| !c) {
            return Err(AttrError::Baseline(format!(
                "no baseline for slot {}",
                self.slot_label(missing)
            )));
        }
        entries.sort_by_key(|e| e.first_slot());
        Ok(BaselineSpec { entries })
    }

    /// Normalizes arbitrary group labels to contiguous ids 0..G-1 ordered
    /// by first slot occurrence; slots not mentioned get singleton groups.
    fn normalize_mask(&self, mask: Option<MaskSpec>) -> Result<Vec<Vec<usize>>, AttrError> {
        let n = self.values.len();
        let mut label_of: Vec<Option<u64>> = vec![None; n];
        match mask {
            None => {}
            Some(MaskSpec::PerSlot(labels)) => {
                if labels.len() != n {
                    return Err(AttrError::Mask(format!(
                        "mask lists {} slots but the template has {n}",
                        labels.len()
                    )));
                }
                for (slot, l) in labels.into_iter().enumerate() {
                    label_of[slot] = Some(l);
                }
            }
            Some(MaskSpec::Pairs(pairs)) => {
                for (key, l) in pairs {
                    let slot = self.slot_index(&key)?;
                    if let Some(prev) = label_of[slot] {
                        if prev != l {
                            return Err(AttrError::Mask(format!(
                                "slot {} assigned to both group {prev} and group {l}",
                                self.slot_label(slot)
                            )));
                        }
                    }
                    label_of[slot] = Some(l);
                }
            }
        }
        // Unlabeled slots become their own groups; reuse of u64 labels is
        // avoided by giving them a disjoint label space.
        let mut groups: Vec<(GroupLabel, Vec<usize>)> = Vec::new();
        for slot in 0..n {
            let label = match label_of[slot] {
                Some(l) => GroupLabel::Masked(l),
                None => GroupLabel::Singleton(slot),
            };
            match groups.iter_mut().find(|(l, _)| *l == label) {
                Some((_, slots)) => slots.push(slot),
                None => groups.push((label, vec![slot])),
            }
        }
        // Already ordered by first occurrence because slots are scanned in
        // order and new groups are appended.
        Ok(groups.into_iter().map(|(_, slots)| slots).collect())
    }

    fn slot_label(&self, slot: usize) -> String {
        match &self.slot_names {
            Some(names) => format!("'{}'", names[slot]),
            None => slot.to_string(),
        }
    }

    pub fn slot_count(&self) -> usize {
        self.values.len()
    }

    pub fn slot_names(&self) -> Option<&[String]> {
        self.slot_names.as_deref()
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    pub fn baselines(&self) -> &BaselineSpec {
        &self.baselines
    }

    /// Normalized feature groups: group id -> slot indices.
    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    /// Display label per group: the original values of its slots, joined.
    pub fn group_labels(&self) -> Vec<String> {
        self.groups
            .iter()
            .map(|slots| {
                slots
                    .iter()
                    .map(|&s| self.values[s].as_str())
                    .collect::<Vec<_>>()
                    .join(", ")
            })
            .collect()
    }

    /// Renders the prompt for a full slot assignment.
    pub fn format(&self, assignment: &[String]) -> Result<String, AttrError> {
        if assignment.len() != self.values.len() {
            return Err(AttrError::Arity(format!(
                "assignment covers {} slots but the template has {}",
                assignment.len(),
                self.values.len()
            )));
        }
        Ok(match &self.source {
            PromptSource::Template(t) => t.render(assignment),
            PromptSource::Custom(f) => f(assignment),
        })
    }

    /// Renders the prompt from named (slot, text) pairs; the key set must
    /// match the template's slots exactly.
    pub fn format_named(&self, pairs: &[(&str, &str)]) -> Result<String, AttrError> {
        let names = self.slot_names.as_ref().ok_or_else(|| {
            AttrError::Arity("template has positional placeholders; use format()".into())
        })?;
        let mut assignment = vec![None; names.len()];
        for (k, v) in pairs {
            let slot = names.iter().position(|n| n == k).ok_or_else(|| {
                AttrError::Arity(format!("assignment names unknown slot '{k}'"))
            })?;
            if assignment[slot].is_some() {
                return Err(AttrError::Arity(format!("duplicate assignment for '{k}'")));
            }
            assignment[slot] = Some(v.to_string());
        }
        let assignment: Vec<String> = assignment
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| AttrError::Arity(format!("missing slot '{}'", names[i]))))
            .collect::<Result<_, _>>()?;
        self.format(&assignment)
    }

    /// The original prompt (all slots at their original values).
    pub fn prompt(&self) -> String {
        self.format(&self.values).expect("values validated at construction")
    }

    /// Draws one baseline value per slot. Entries draw in canonical order
    /// (sorted by first slot), so a seeded rng yields a reproducible
    /// assignment. The draw covers every slot regardless of any include
    /// set, keeping rng consumption independent of what is perturbed.
    pub fn sample_baseline<R: Rng>(&self, rng: &mut R) -> Vec<String> {
        let mut out = vec![String::new(); self.values.len()];
        for entry in &self.baselines.entries {
            match entry {
                BaselineEntry::Fixed { slot, value } => out[*slot] = value.clone(),
                BaselineEntry::Choices { slot, options } => {
                    out[*slot] = options[rng.random_range(0..options.len())].clone();
                }
                BaselineEntry::Product { slots, tuples } => {
                    let t = &tuples[rng.random_range(0..tuples.len())];
                    for (k, &slot) in slots.iter().enumerate() {
                        out[slot] = t[k].clone();
                    }
                }
            }
        }
        out
    }

    /// Renders the prompt with groups in `s` at original values and all
    /// other groups at `baseline_draw` values (a full per-slot draw from
    /// [`TemplateInput::sample_baseline`]).
    pub fn perturbed_prompt(
        &self,
        s: &IncludeSet,
        baseline_draw: &[String],
    ) -> Result<String, AttrError> {
        if baseline_draw.len() != self.values.len() {
            return Err(AttrError::Arity(format!(
                "baseline draw covers {} slots but the template has {}",
                baseline_draw.len(),
                self.values.len()
            )));
        }
        let mut assignment = baseline_draw.to_vec();
        for g in s.iter() {
            let slots = self.groups.get(g).ok_or_else(|| {
                AttrError::InvalidArg(format!(
                    "include set names group {g} but there are only {} groups",
                    self.groups.len()
                ))
            })?;
            for &slot in slots {
                assignment[slot] = self.values[slot].clone();
            }
        }
        self.format(&assignment)
    }
}

/// The subset of feature groups currently at their original values.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct IncludeSet(BTreeSet<usize>);

impl IncludeSet {
    pub fn empty() -> Self {
        IncludeSet(BTreeSet::new())
    }

    pub fn full(group_count: usize) -> Self {
        IncludeSet((0..group_count).collect())
    }

    pub fn from_groups<I: IntoIterator<Item = usize>>(groups: I) -> Self {
        IncludeSet(groups.into_iter().collect())
    }

    /// Bit i of `mask` set means group i is present.
    pub fn from_bitmask(mask: u64, group_count: usize) -> Self {
        IncludeSet((0..group_count).filter(|g| mask >> g & 1 == 1).collect())
    }

    /// Inverse of [`IncludeSet::from_bitmask`] for groups < 64.
    pub fn bitmask(&self) -> u64 {
        self.0.iter().fold(0u64, |m, &g| m | 1 << g)
    }

    pub fn insert(&mut self, group: usize) {
        self.0.insert(group);
    }

    pub fn remove(&mut self, group: usize) {
        self.0.remove(&group);
    }

    pub fn contains(&self, group: usize) -> bool {
        self.0.contains(&group)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }
}

impl fmt::Display for IncludeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, g) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, "}}")
    }
}
