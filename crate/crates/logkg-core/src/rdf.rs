//! RDF term and statement model shared by the annotator, the Turtle layer
//! and the evaluator.

use serde::{Deserialize, Serialize};

/// Literal datatypes the schema emits. `PlainString` serializes without a
/// `^^xsd:` suffix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Datatype {
    DateTime,
    Integer,
    Decimal,
    PlainString,
}

impl Datatype {
    /// The `xsd:` qname used in typed-literal suffixes, if any.
    pub fn xsd_qname(self) -> Option<&'static str> {
        match self {
            Datatype::DateTime => Some("xsd:dateTime"),
            Datatype::Integer => Some("xsd:integer"),
            Datatype::Decimal => Some("xsd:decimal"),
            Datatype::PlainString => None,
        }
    }
}

/// A literal object: lexical form plus datatype.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub lexical: String,
    pub datatype: Datatype,
}

impl Literal {
    pub fn plain(lexical: impl Into<String>) -> Self {
        Literal { lexical: lexical.into(), datatype: Datatype::PlainString }
    }

    pub fn typed(lexical: impl Into<String>, datatype: Datatype) -> Self {
        Literal { lexical: lexical.into(), datatype }
    }
}

/// An RDF object position: either a resource IRI or a literal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Term {
    Iri(String),
    Literal(Literal),
}

impl Term {
    pub fn iri(value: impl Into<String>) -> Self {
        Term::Iri(value.into())
    }

    pub fn plain(lexical: impl Into<String>) -> Self {
        Term::Literal(Literal::plain(lexical))
    }

    pub fn typed(lexical: impl Into<String>, datatype: Datatype) -> Self {
        Term::Literal(Literal::typed(lexical, datatype))
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(lit) => Some(lit),
            Term::Iri(_) => None,
        }
    }
}

/// One predicate/object pair under a shared subject.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Statement {
    pub predicate: String,
    pub object: Term,
}

impl Statement {
    pub fn new(predicate: impl Into<String>, object: Term) -> Self {
        Statement { predicate: predicate.into(), object }
    }
}

/// A full (subject, predicate, object) triple view.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triple {
    pub subject: String,
    pub predicate: String,
    pub object: Term,
}

/// Subject marker used when regex recovery finds statements before any
/// subject line; such sets are counted but distinguishable.
pub const SYNTHETIC_SUBJECT: &str = "urn:recovered:no-subject";

/// The per-entry subgraph: one subject with an ordered statement list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleSet {
    pub subject: String,
    pub statements: Vec<Statement>,
}

impl TripleSet {
    pub fn new(subject: impl Into<String>) -> Self {
        TripleSet { subject: subject.into(), statements: Vec::new() }
    }

    /// Appends a statement unless an identical (predicate, object) pair is
    /// already present.
    pub fn push_unique(&mut self, statement: Statement) {
        if !self.statements.contains(&statement) {
            self.statements.push(statement);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }

    pub fn len(&self) -> usize {
        self.statements.len()
    }

    pub fn has_synthetic_subject(&self) -> bool {
        self.subject == SYNTHETIC_SUBJECT
    }

    pub fn triples(&self) -> impl Iterator<Item = Triple> + '_ {
        self.statements.iter().map(|s| Triple {
            subject: self.subject.clone(),
            predicate: s.predicate.clone(),
            object: s.object.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_unique_drops_exact_duplicates() {
        let mut set = TripleSet::new("<http://example/s>");
        set.push_unique(Statement::new("log:level", Term::plain("INFO")));
        set.push_unique(Statement::new("log:level", Term::plain("INFO")));
        set.push_unique(Statement::new("log:level", Term::plain("WARN")));
        assert_eq!(set.len(), 2);
    }

    #[test]
    fn triples_expand_to_shared_subject() {
        let mut set = TripleSet::new("s");
        set.push_unique(Statement::new("p", Term::plain("o")));
        let all: Vec<Triple> = set.triples().collect();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].subject, "s");
    }
}
