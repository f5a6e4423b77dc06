//! Deterministic mapping from parsed log fields to the per-entry RDF
//! subgraph, and the corpus driver that builds the full reference dataset.
//!
//! Statement order follows the vocabulary definition order (metadata,
//! context, HTTP, metrics, message) so serialized goldens are stable.

use std::collections::BTreeMap;

use crate::logline::{parse_entry, LogRecordFields, RawLogEntry};
use crate::ontology::{resource_uri, subject_uri, ObjectKind, ResourceKind, Vocabulary};
use crate::rdf::{Datatype, Statement, Term, TripleSet};
use crate::turtle;

use serde::{Deserialize, Serialize};

/// Reformats a log timestamp (`YYYY-MM-DD HH:MM:SS[.mmm]`) into the
/// `xsd:dateTime` lexical space. Logs carry no zone, so UTC is assumed;
/// missing millisecond parts are padded.
pub fn to_xsd_datetime(raw: &str) -> String {
    let mut out = raw.trim().replacen(' ', "T", 1);
    if !out.contains('.') {
        out.push_str(".000");
    }
    if !out.ends_with('Z') {
        out.push('Z');
    }
    out
}

fn literal_for(datatype: Datatype, lexical: &str) -> Term {
    match datatype {
        Datatype::DateTime => Term::typed(to_xsd_datetime(lexical), Datatype::DateTime),
        other => Term::typed(lexical, other),
    }
}

fn resource_for(kind: ResourceKind, id: &str) -> Term {
    Term::iri(resource_uri(kind, id))
}

/// Maps parsed fields to the per-entry triple set. The subject is derived
/// from the record name and the entry's 1-based sequence number within that
/// record; absent fields yield no statement.
pub fn annotate(fields: &LogRecordFields, seq: u64) -> TripleSet {
    let vocab = Vocabulary::get();
    let mut set = TripleSet::new(subject_uri(&fields.log_record, seq));

    for def in vocab.defs() {
        let object: Option<Term> = match def.name {
            "log:logRecord" => Some(Term::plain(&fields.log_record)),
            "log:timestamp" => Some(literal_for(Datatype::DateTime, &fields.timestamp)),
            "log:processId" => Some(Term::typed(fields.process_id.to_string(), Datatype::Integer)),
            "log:level" => Some(Term::plain(&fields.level)),
            "log:belongsToComponent" => Some(resource_for(ResourceKind::Component, &fields.component)),
            "log:requestId" => fields.request_id.as_deref().map(Term::plain),
            "log:belongsToUser" => {
                fields.user_id.as_deref().map(|v| resource_for(ResourceKind::User, v))
            }
            "log:belongsToTenant" => {
                fields.tenant_id.as_deref().map(|v| resource_for(ResourceKind::Tenant, v))
            }
            "log:belongsToInstance" => {
                fields.instance_uuid.as_deref().map(|v| resource_for(ResourceKind::Instance, v))
            }
            "log:clientIp" => fields.client_ip.as_deref().map(Term::plain),
            "log:serverIp" => fields.server_ip.as_deref().map(Term::plain),
            "log:httpMethod" => fields.http_method.as_deref().map(Term::plain),
            "log:httpPath" => fields.http_path.as_deref().map(Term::plain),
            "log:callsPath" => {
                // An HTTP path is additionally linked as a shared path resource.
                fields.http_path.as_deref().map(|v| resource_for(ResourceKind::Path, v))
            }
            "log:statusCode" => {
                fields.status_code.map(|v| Term::typed(v.to_string(), Datatype::Integer))
            }
            "log:responseLength" => {
                fields.response_length.map(|v| Term::typed(v.to_string(), Datatype::Integer))
            }
            "log:responseTime" => {
                fields.response_time.as_deref().map(|v| Term::typed(v, Datatype::Decimal))
            }
            "log:hasImage" => {
                fields.image_id.as_deref().map(|v| resource_for(ResourceKind::Image, v))
            }
            "log:hasBaseFile" => {
                fields.base_file.as_deref().map(|v| resource_for(ResourceKind::BaseFile, v))
            }
            "log:hasInstanceFile" => {
                fields.instance_file.as_deref().map(|v| resource_for(ResourceKind::InstanceFile, v))
            }
            "log:belongsToHost" => {
                fields.host.as_deref().map(|v| resource_for(ResourceKind::Host, v))
            }
            "log:eventType" => fields.event_type.as_deref().map(Term::plain),
            "log:eventId" => fields.event_id.as_deref().map(Term::plain),
            "log:eventUuid" => fields.event_uuid.as_deref().map(Term::plain),
            "log:message" => fields.message.as_deref().map(Term::plain),
            name => {
                // Remaining defs are metric literals keyed by local name.
                let local = name.strip_prefix("log:").unwrap_or(name);
                match (fields.metrics.get(local), def.object_kind) {
                    (Some(lexical), ObjectKind::Literal(dt)) => Some(literal_for(dt, lexical)),
                    _ => None,
                }
            }
        };
        if let Some(object) = object {
            set.push_unique(Statement::new(def.name, object));
        }
    }
    set
}

/// One reference dataset row: the raw line and its canonical Turtle block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub id: u64,
    pub log_record: String,
    pub log: String,
    pub ttl: String,
}

/// A line the corpus driver could not annotate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedLine {
    pub entry_id: u64,
    pub reason: String,
}

/// The machine-side reference dataset: every parseable line annotated, every
/// other line accounted for in the skip list.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ReferenceDataset {
    pub records: Vec<DatasetRecord>,
    pub skips: Vec<SkippedLine>,
}

impl ReferenceDataset {
    pub fn record_for(&self, entry_id: u64) -> Option<&DatasetRecord> {
        self.records.iter().find(|r| r.id == entry_id)
    }
}

/// Annotates a corpus entry list. The per-record sequence number is the
/// 1-based position of the entry within its source record group, in input
/// order; header failures land in the skip report instead of aborting.
pub fn annotate_corpus(entries: &[RawLogEntry]) -> ReferenceDataset {
    let mut seq_by_record: BTreeMap<&str, u64> = BTreeMap::new();
    let mut dataset = ReferenceDataset::default();
    for entry in entries {
        match parse_entry(entry) {
            Ok(fields) => {
                // Skipped lines do not consume a sequence slot.
                let seq = seq_by_record.entry(entry.log_record.as_str()).or_insert(0);
                *seq += 1;
                let triples = annotate(&fields, *seq);
                dataset.records.push(DatasetRecord {
                    id: entry.entry_id,
                    log_record: entry.log_record.clone(),
                    log: entry.text.clone(),
                    ttl: turtle::serialize(&triples),
                });
            }
            Err(err) => {
                dataset.skips.push(SkippedLine {
                    entry_id: entry.entry_id,
                    reason: err.to_string(),
                });
            }
        }
    }
    dataset
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logline::parse_entry;

    fn entry(id: u64, record: &str, text: &str) -> RawLogEntry {
        RawLogEntry { entry_id: id, log_record: record.to_string(), text: text.to_string() }
    }

    const HTTP_LINE: &str = "nova-api.log.1.2017-05-17_12:02:19 2017-05-16 18:57:49.073 25749 INFO nova.osapi_compute.wsgi.server [req-0550be32-0499-40f3-b0cf-4aab2629052b 113d3a99c3da401fbd62cc2caa5b96d2 54fadb412c4e40cdbaed9335e4c35a9e - - -] 10.11.10.1 \"POST /v2/54fadb412c4e40cdbaed9335e4c35a9e/servers HTTP/1.1\" status: 202 len: 733 time: 0.4947891";

    #[test]
    fn annotate_http_entry_emits_fifteen_statements_in_layout_order() {
        let e = entry(2, "nova-api.log.1.2017-05-17_12:02:19", HTTP_LINE);
        let fields = parse_entry(&e).unwrap();
        let set = annotate(&fields, 2);
        assert_eq!(
            set.subject,
            "http://openstack.org/log/request/nova-api.log.1.2017-05-17_12:02:19/0002"
        );
        let predicates: Vec<&str> = set.statements.iter().map(|s| s.predicate.as_str()).collect();
        assert_eq!(
            predicates,
            vec![
                "log:logRecord",
                "log:timestamp",
                "log:processId",
                "log:level",
                "log:belongsToComponent",
                "log:requestId",
                "log:belongsToUser",
                "log:belongsToTenant",
                "log:clientIp",
                "log:httpMethod",
                "log:httpPath",
                "log:callsPath",
                "log:statusCode",
                "log:responseLength",
                "log:responseTime",
            ]
        );
        assert_eq!(set.len(), 15);
    }

    #[test]
    fn annotate_timestamp_is_utc_datetime() {
        let e = entry(1, "r", "2017-05-16 18:57:49.073 1 INFO a.b [-] hi");
        let set = annotate(&parse_entry(&e).unwrap(), 1);
        let ts = set
            .statements
            .iter()
            .find(|s| s.predicate == "log:timestamp")
            .and_then(|s| s.object.as_literal())
            .unwrap();
        assert_eq!(ts.lexical, "2017-05-16T18:57:49.073Z");
        assert_eq!(ts.datatype, Datatype::DateTime);
    }

    #[test]
    fn annotate_minimal_entry_is_mandatory_five_plus_message() {
        let e = entry(1, "r", "2017-05-16 00:00:00.000 1 INFO a.b [-] hello");
        let set = annotate(&parse_entry(&e).unwrap(), 1);
        assert_eq!(set.len(), 6);
        assert_eq!(set.statements[5].predicate, "log:message");
        assert_eq!(set.statements[5].object, Term::plain("hello"));
    }

    #[test]
    fn audit_datetimes_are_padded_to_millisecond_precision() {
        let e = entry(
            1,
            "r",
            "2017-05-16 00:00:05.060 2931 INFO nova.compute.manager [req-b1 - - - - -] Running instance usage audit for host h1 from 2017-05-01 00:00:00 to 2017-05-16 00:00:00. 0 instances.",
        );
        let set = annotate(&parse_entry(&e).unwrap(), 1);
        let start = set
            .statements
            .iter()
            .find(|s| s.predicate == "log:usageAuditStart")
            .and_then(|s| s.object.as_literal())
            .unwrap();
        assert_eq!(start.lexical, "2017-05-01T00:00:00.000Z");
    }

    #[test]
    fn corpus_sequence_is_per_record_and_one_based() {
        let entries = vec![
            entry(1, "a.log", "2017-05-16 00:00:00.000 1 INFO a.b [-] one"),
            entry(2, "b.log", "2017-05-16 00:00:01.000 1 INFO a.b [-] two"),
            entry(3, "a.log", "2017-05-16 00:00:02.000 1 INFO a.b [-] three"),
        ];
        let dataset = annotate_corpus(&entries);
        assert_eq!(dataset.records.len(), 3);
        assert!(dataset.records[0].ttl.contains("/a.log/0001>"));
        assert!(dataset.records[1].ttl.contains("/b.log/0001>"));
        assert!(dataset.records[2].ttl.contains("/a.log/0002>"));
    }

    #[test]
    fn corpus_skips_are_traceable() {
        let entries = vec![
            entry(1, "a.log", "2017-05-16 00:00:00.000 1 INFO a.b [-] ok"),
            entry(2, "a.log", "    File \"/usr/lib/python2.7/site.py\", line 10"),
            entry(3, "a.log", "2017-05-16 00:00:02.000 1 INFO a.b [-] ok again"),
        ];
        let dataset = annotate_corpus(&entries);
        assert_eq!(dataset.records.len() + dataset.skips.len(), entries.len());
        assert_eq!(dataset.skips[0].entry_id, 2);
        // The traceback line does not consume a sequence slot.
        assert!(dataset.records[1].ttl.contains("/a.log/0002>"));
    }

    #[test]
    fn empty_corpus_yields_empty_dataset() {
        let dataset = annotate_corpus(&[]);
        assert!(dataset.records.is_empty());
        assert!(dataset.skips.is_empty());
    }

    #[test]
    fn annotation_is_deterministic() {
        let entries = vec![entry(1, "a.log", HTTP_LINE)];
        assert_eq!(annotate_corpus(&entries), annotate_corpus(&entries));
    }

    #[test]
    fn every_emitted_predicate_is_in_vocabulary() {
        let e = entry(2, "nova-api.log.1.2017-05-17_12:02:19", HTTP_LINE);
        let set = annotate(&parse_entry(&e).unwrap(), 2);
        for statement in &set.statements {
            assert!(Vocabulary::get().lookup(&statement.predicate).is_ok());
        }
    }
}
