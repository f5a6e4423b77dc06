//! Prompt assembly for the ten extraction strategies.
//!
//! Each strategy is a [`PromptStrategy`] behind the [`StrategyRegistry`],
//! selected by name at runtime. All template texts live in versioned data
//! files with `{{LOG_LINE}}` and `{{EXAMPLES}}` substitution markers; the
//! built-in set is embedded at compile time and can be overridden from a
//! directory for auditing or replacement.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::annotate::DatasetRecord;
use crate::dataset;

/// The ten prompting strategies, in report column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Technique {
    Zsp,
    ZspCot,
    Osp,
    OspCot,
    Fsp,
    FspCot,
    Cpp,
    Scp,
    Tot,
    Gmv,
}

impl Technique {
    /// Column order used by every report and ranking.
    pub const ALL: [Technique; 10] = [
        Technique::Zsp,
        Technique::ZspCot,
        Technique::Osp,
        Technique::OspCot,
        Technique::Fsp,
        Technique::FspCot,
        Technique::Cpp,
        Technique::Scp,
        Technique::Tot,
        Technique::Gmv,
    ];

    /// Stable short name used in reports and serialized artifacts.
    pub fn short_name(self) -> &'static str {
        match self {
            Technique::Zsp => "ZSP",
            Technique::ZspCot => "ZSP&CoT",
            Technique::Osp => "OSP",
            Technique::OspCot => "OSP&CoT",
            Technique::Fsp => "FSP",
            Technique::FspCot => "FSP&CoT",
            Technique::Cpp => "CPP",
            Technique::Scp => "SCP",
            Technique::Tot => "ToT",
            Technique::Gmv => "GMV",
        }
    }

    /// Filesystem-safe identifier.
    pub fn slug(self) -> &'static str {
        match self {
            Technique::Zsp => "zsp",
            Technique::ZspCot => "zsp_cot",
            Technique::Osp => "osp",
            Technique::OspCot => "osp_cot",
            Technique::Fsp => "fsp",
            Technique::FspCot => "fsp_cot",
            Technique::Cpp => "cpp",
            Technique::Scp => "scp",
            Technique::Tot => "tot",
            Technique::Gmv => "gmv",
        }
    }

    fn needs_examples(self) -> Option<usize> {
        match self {
            Technique::Osp | Technique::OspCot => Some(1),
            Technique::Fsp | Technique::FspCot => Some(FEW_SHOT_EXAMPLES),
            _ => None,
        }
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Technique {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace(['&', '-', ' '], "_");
        let key = key.trim_matches('_');
        match key {
            "zsp" => Ok(Technique::Zsp),
            "zsp_cot" | "zsp__cot" | "zspcot" => Ok(Technique::ZspCot),
            "osp" => Ok(Technique::Osp),
            "osp_cot" | "osp__cot" | "ospcot" => Ok(Technique::OspCot),
            "fsp" => Ok(Technique::Fsp),
            "fsp_cot" | "fsp__cot" | "fspcot" => Ok(Technique::FspCot),
            "cpp" => Ok(Technique::Cpp),
            "scp" => Ok(Technique::Scp),
            "tot" => Ok(Technique::Tot),
            "gmv" => Ok(Technique::Gmv),
            other => Err(format!("unknown technique {other:?}")),
        }
    }
}

impl Serialize for Technique {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.short_name())
    }
}

impl<'de> Deserialize<'de> for Technique {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

/// Number of examples the few-shot strategies embed, one per log type.
pub const FEW_SHOT_EXAMPLES: usize = 27;

/// One worked example: a log line paired with its reference Turtle block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example {
    pub log_line: String,
    pub ttl: String,
}

/// The pool the example-bearing strategies draw from. The one-shot slot
/// points at an HTTP request example because it mixes resource objects and
/// literals.
#[derive(Debug, Clone, Default)]
pub struct ExampleBank {
    examples: Vec<Example>,
    one_shot_index: usize,
}

impl ExampleBank {
    pub fn empty() -> Self {
        ExampleBank::default()
    }

    pub fn from_records(records: &[DatasetRecord]) -> Self {
        let examples: Vec<Example> = records
            .iter()
            .map(|r| Example { log_line: r.log.clone(), ttl: r.ttl.clone() })
            .collect();
        let one_shot_index = examples
            .iter()
            .position(|e| e.ttl.contains("log:httpMethod"))
            .unwrap_or(0);
        ExampleBank { examples, one_shot_index }
    }

    pub fn load(path: &Path) -> Result<Self, dataset::DatasetError> {
        Ok(Self::from_records(&dataset::read_records(path)?))
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn examples(&self) -> &[Example] {
        &self.examples
    }

    pub fn one_shot(&self) -> Option<&Example> {
        self.examples.get(self.one_shot_index)
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PromptError {
    #[error("{technique} needs {needed} example(s), bank holds {available}")]
    MissingExamples { technique: &'static str, needed: usize, available: usize },
    #[error("cannot load template {path}: {detail}")]
    BadTemplate { path: String, detail: String },
}

/// Canonical section labels, in the bracketed form the templates use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SectionLabel {
    TaskInstruction,
    OutputFormatSpecification,
    ConstraintsAndAssumptions,
    InternalProcessingProtocol,
    OntologyAllowedPredicates,
    SelfCritiqueRequirement,
    ConstraintRules,
    ExampleSection,
    InputLogIsolation,
}

impl SectionLabel {
    pub fn display(self) -> &'static str {
        match self {
            SectionLabel::TaskInstruction => "[Task Instruction]",
            SectionLabel::OutputFormatSpecification => "[Output Format Specification]",
            SectionLabel::ConstraintsAndAssumptions => "[Constraints and Assumptions]",
            SectionLabel::InternalProcessingProtocol => "[Internal Processing Protocol]",
            SectionLabel::OntologyAllowedPredicates => "[Ontology & Allowed Predicates]",
            SectionLabel::SelfCritiqueRequirement => "[Self-Critique Requirement]",
            SectionLabel::ConstraintRules => "[Constraints]",
            SectionLabel::ExampleSection => "[Example Section]",
            SectionLabel::InputLogIsolation => "[Input Log Isolation]",
        }
    }

    fn from_header(line: &str) -> Option<Self> {
        const ALL: [SectionLabel; 9] = [
            SectionLabel::TaskInstruction,
            SectionLabel::OutputFormatSpecification,
            SectionLabel::ConstraintsAndAssumptions,
            SectionLabel::InternalProcessingProtocol,
            SectionLabel::OntologyAllowedPredicates,
            SectionLabel::SelfCritiqueRequirement,
            SectionLabel::ConstraintRules,
            SectionLabel::ExampleSection,
            SectionLabel::InputLogIsolation,
        ];
        ALL.into_iter().find(|label| label.display() == line.trim())
    }
}

/// One labelled template section.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    pub label: SectionLabel,
    pub body: String,
}

/// A prompt-building strategy: one per technique, registered by name.
pub trait PromptStrategy: Send + Sync {
    fn technique(&self) -> Technique;

    /// Assembles the full prompt text around one log line.
    fn build(&self, log_line: &str, bank: &ExampleBank) -> Result<String, PromptError>;

    /// The raw template text (for hashing into run manifests).
    fn template_text(&self) -> &str;

    fn sections(&self) -> &[Section];
}

/// Template-backed strategy implementation shared by all ten techniques.
struct SectionedTemplate {
    technique: Technique,
    raw: String,
    sections: Vec<Section>,
}

impl SectionedTemplate {
    fn parse(technique: Technique, raw: String, origin: &str) -> Result<Self, PromptError> {
        let mut sections: Vec<Section> = Vec::new();
        for line in raw.lines() {
            if let Some(label) = SectionLabel::from_header(line) {
                sections.push(Section { label, body: String::new() });
            } else if let Some(current) = sections.last_mut() {
                if !current.body.is_empty() {
                    current.body.push('\n');
                }
                current.body.push_str(line);
            } else if !line.trim().is_empty() {
                return Err(PromptError::BadTemplate {
                    path: origin.to_string(),
                    detail: format!("content before first section header: {line:?}"),
                });
            }
        }
        for section in &mut sections {
            section.body = section.body.trim().to_string();
        }
        if sections.is_empty() {
            return Err(PromptError::BadTemplate {
                path: origin.to_string(),
                detail: "no sections found".to_string(),
            });
        }
        Ok(SectionedTemplate { technique, raw, sections })
    }
}

fn render_examples(examples: &[&Example]) -> String {
    examples
        .iter()
        .map(|e| format!("Example log line:\n{}\nExample RDF triple:\n{}", e.log_line, e.ttl))
        .collect::<Vec<_>>()
        .join("\n\n")
}

impl PromptStrategy for SectionedTemplate {
    fn technique(&self) -> Technique {
        self.technique
    }

    fn build(&self, log_line: &str, bank: &ExampleBank) -> Result<String, PromptError> {
        let rendered_examples = match self.technique.needs_examples() {
            Some(needed) => {
                if bank.len() < needed {
                    return Err(PromptError::MissingExamples {
                        technique: self.technique.short_name(),
                        needed,
                        available: bank.len(),
                    });
                }
                let selected: Vec<&Example> = if needed == 1 {
                    vec![bank.one_shot().expect("bank is non-empty")]
                } else {
                    bank.examples().iter().collect()
                };
                Some(render_examples(&selected))
            }
            None => None,
        };
        let mut text = self.raw.clone();
        if let Some(examples) = rendered_examples {
            text = text.replace("{{EXAMPLES}}", &examples);
        }
        Ok(text.replace("{{LOG_LINE}}", log_line).trim_end().to_string() + "\n")
    }

    fn template_text(&self) -> &str {
        &self.raw
    }

    fn sections(&self) -> &[Section] {
        &self.sections
    }
}

macro_rules! builtin_template {
    ($technique:expr, $file:literal) => {
        (
            $technique,
            include_str!(concat!("../assets/templates/", $file)),
        )
    };
}

const BUILTIN: [(Technique, &str); 10] = [
    builtin_template!(Technique::Zsp, "zsp.txt"),
    builtin_template!(Technique::ZspCot, "zsp_cot.txt"),
    builtin_template!(Technique::Osp, "osp.txt"),
    builtin_template!(Technique::OspCot, "osp_cot.txt"),
    builtin_template!(Technique::Fsp, "fsp.txt"),
    builtin_template!(Technique::FspCot, "fsp_cot.txt"),
    builtin_template!(Technique::Cpp, "cpp.txt"),
    builtin_template!(Technique::Scp, "scp.txt"),
    builtin_template!(Technique::Tot, "tot.txt"),
    builtin_template!(Technique::Gmv, "gmv.txt"),
];

/// All ten strategies behind trait objects, iterated in report column order
/// and addressable by technique name.
pub struct StrategyRegistry {
    strategies: Vec<Box<dyn PromptStrategy>>,
}

impl StrategyRegistry {
    /// The compiled-in template set.
    pub fn builtin() -> Self {
        let strategies = BUILTIN
            .iter()
            .map(|(technique, text)| {
                let parsed =
                    SectionedTemplate::parse(*technique, (*text).to_string(), technique.slug())
                        .expect("built-in templates are well-formed");
                Box::new(parsed) as Box<dyn PromptStrategy>
            })
            .collect();
        StrategyRegistry { strategies }
    }

    /// Loads `<slug>.txt` per technique from a directory, for template
    /// replacement without rebuilding.
    pub fn from_dir(dir: &Path) -> Result<Self, PromptError> {
        let mut strategies: Vec<Box<dyn PromptStrategy>> = Vec::new();
        for technique in Technique::ALL {
            let path = dir.join(format!("{}.txt", technique.slug()));
            let raw = std::fs::read_to_string(&path).map_err(|e| PromptError::BadTemplate {
                path: path.display().to_string(),
                detail: e.to_string(),
            })?;
            strategies.push(Box::new(SectionedTemplate::parse(
                technique,
                raw,
                &path.display().to_string(),
            )?));
        }
        Ok(StrategyRegistry { strategies })
    }

    pub fn get(&self, technique: Technique) -> &dyn PromptStrategy {
        self.strategies
            .iter()
            .find(|s| s.technique() == technique)
            .expect("registry holds all techniques")
            .as_ref()
    }

    pub fn by_name(&self, name: &str) -> Option<&dyn PromptStrategy> {
        let technique: Technique = name.parse().ok()?;
        Some(self.get(technique))
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn PromptStrategy> {
        self.strategies.iter().map(|s| s.as_ref())
    }
}

/// The ten techniques in report column order.
pub fn technique_matrix() -> Vec<Technique> {
    Technique::ALL.to_vec()
}

/// Convenience wrapper over the built-in registry.
pub fn build_prompt(
    technique: Technique,
    log_line: &str,
    bank: &ExampleBank,
) -> Result<String, PromptError> {
    StrategyRegistry::builtin().get(technique).build(log_line, bank)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bank_of(n: usize) -> ExampleBank {
        let records: Vec<DatasetRecord> = (0..n)
            .map(|i| DatasetRecord {
                id: i as u64 + 1,
                log_record: "r.log".into(),
                log: if i == 0 {
                    "host 2017-05-16 00:00:00.008 25746 INFO nova.osapi_compute.wsgi.server [req-x - - - - -] 10.11.10.1 \"GET /v2/x HTTP/1.1\" status: 200 len: 18 time: 0.2\n".trim().to_string()
                } else {
                    format!("line {i}")
                },
                ttl: if i == 0 {
                    "<http://s/1>\n    log:httpMethod \"GET\" .".to_string()
                } else {
                    format!("<http://s/{i}>\n    log:level \"INFO\" .")
                },
            })
            .collect();
        ExampleBank::from_records(&records)
    }

    #[test]
    fn matrix_order_is_stable() {
        let matrix = technique_matrix();
        assert_eq!(matrix.len(), 10);
        assert_eq!(matrix[0], Technique::Zsp);
        assert_eq!(matrix[9], Technique::Gmv);
        assert_eq!(matrix, technique_matrix());
    }

    #[test]
    fn technique_names_round_trip() {
        for technique in Technique::ALL {
            let name = technique.short_name();
            assert_eq!(name.parse::<Technique>().unwrap(), technique);
            let json = serde_json::to_string(&technique).unwrap();
            assert_eq!(serde_json::from_str::<Technique>(&json).unwrap(), technique);
        }
        assert_eq!("fsp_cot".parse::<Technique>().unwrap(), Technique::FspCot);
    }

    #[test]
    fn zsp_prompt_has_no_examples_and_ends_with_isolation() {
        let registry = StrategyRegistry::builtin();
        let prompt = registry.get(Technique::Zsp).build("THE LINE", &ExampleBank::empty()).unwrap();
        assert!(prompt.contains("convert a single OpenStack log line into RDF triples"));
        assert!(!prompt.contains("[Example Section]"));
        assert!(prompt.contains("THE LINE"));
        let isolation_pos = prompt.find("[Input Log Isolation]").unwrap();
        assert!(prompt[isolation_pos..].contains("THE LINE"));
    }

    #[test]
    fn osp_prompt_embeds_the_http_example_and_no_copy_rule() {
        let registry = StrategyRegistry::builtin();
        let bank = bank_of(3);
        let prompt = registry.get(Technique::Osp).build("THE LINE", &bank).unwrap();
        assert!(prompt.contains("Do not take any values from the example"));
        assert!(prompt.contains("log:httpMethod \"GET\""));
        // Exactly one example is embedded.
        assert_eq!(prompt.matches("Example log line:").count(), 1);
    }

    #[test]
    fn fsp_requires_twenty_seven_examples() {
        let registry = StrategyRegistry::builtin();
        let err = registry.get(Technique::Fsp).build("x", &bank_of(26)).unwrap_err();
        assert_eq!(
            err,
            PromptError::MissingExamples { technique: "FSP", needed: 27, available: 26 }
        );
        let prompt = registry.get(Technique::Fsp).build("x", &bank_of(27)).unwrap();
        assert_eq!(prompt.matches("Example log line:").count(), 27);
    }

    #[test]
    fn every_template_has_the_common_sections_with_isolation_last() {
        let registry = StrategyRegistry::builtin();
        for strategy in registry.iter() {
            let labels: Vec<SectionLabel> =
                strategy.sections().iter().map(|s| s.label).collect();
            for required in [
                SectionLabel::TaskInstruction,
                SectionLabel::OutputFormatSpecification,
                SectionLabel::ConstraintsAndAssumptions,
                SectionLabel::InputLogIsolation,
            ] {
                assert!(
                    labels.contains(&required),
                    "{} misses {required:?}",
                    strategy.technique()
                );
            }
            assert_eq!(
                *labels.last().unwrap(),
                SectionLabel::InputLogIsolation,
                "{} must end with the input log",
                strategy.technique()
            );
        }
    }

    #[test]
    fn example_free_strategies_never_leak_example_ttl() {
        let registry = StrategyRegistry::builtin();
        let bank = bank_of(FEW_SHOT_EXAMPLES);
        for technique in [
            Technique::Zsp,
            Technique::ZspCot,
            Technique::Cpp,
            Technique::Scp,
            Technique::Tot,
            Technique::Gmv,
        ] {
            let prompt = registry.get(technique).build("THE LINE", &bank).unwrap();
            for example in bank.examples() {
                assert!(!prompt.contains(&example.ttl), "{technique} leaks example ttl");
            }
        }
    }

    fn is_subsequence(needle: &str, haystack: &str) -> bool {
        let mut chars = haystack.chars();
        needle.chars().all(|n| chars.any(|h| h == n))
    }

    #[test]
    fn zero_shot_text_is_contained_in_few_shot_text() {
        let registry = StrategyRegistry::builtin();
        let bank = bank_of(FEW_SHOT_EXAMPLES);
        let zsp = registry.get(Technique::Zsp).build("SAME LINE", &ExampleBank::empty()).unwrap();
        let fsp = registry.get(Technique::Fsp).build("SAME LINE", &bank).unwrap();
        let without_examples: String = {
            let start = fsp.find("[Example Section]").unwrap();
            let end = fsp.find("[Input Log Isolation]").unwrap();
            format!("{}{}", &fsp[..start], &fsp[end..])
        };
        assert!(is_subsequence(&zsp, &without_examples));
    }

    #[test]
    fn example_bearing_prompts_isolate_the_single_input_line() {
        let registry = StrategyRegistry::builtin();
        let bank = bank_of(FEW_SHOT_EXAMPLES);
        let prompt = registry.get(Technique::FspCot).build("INPUT-LINE-MARKER", &bank).unwrap();
        assert_eq!(prompt.matches("INPUT-LINE-MARKER").count(), 1);
    }

    #[test]
    fn registry_resolves_strategies_by_name() {
        let registry = StrategyRegistry::builtin();
        assert_eq!(registry.by_name("ZSP&CoT").unwrap().technique(), Technique::ZspCot);
        assert_eq!(registry.by_name("tot").unwrap().technique(), Technique::Tot);
        assert!(registry.by_name("nope").is_none());
    }

    #[test]
    fn template_dir_override_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        for (technique, text) in BUILTIN {
            std::fs::write(dir.path().join(format!("{}.txt", technique.slug())), text).unwrap();
        }
        let registry = StrategyRegistry::from_dir(dir.path()).unwrap();
        let builtin = StrategyRegistry::builtin();
        for technique in Technique::ALL {
            assert_eq!(
                registry.get(technique).template_text(),
                builtin.get(technique).template_text()
            );
        }
    }
}
