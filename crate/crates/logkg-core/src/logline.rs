//! OpenStack log line tokenization and structured field extraction.
//!
//! Lines follow a fixed header grammar — timestamp, process id, level,
//! dotted component path — optionally preceded by the source record name
//! (concatenated-corpus style) and optionally followed by a bracketed
//! request-context block. The remaining body is scanned by an ordered table
//! of shape rules, one per log type; anything a rule cannot claim with
//! certainty stays in the free-text message or is omitted entirely.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

/// One corpus line plus its provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawLogEntry {
    /// 1-based line number within the corpus.
    pub entry_id: u64,
    /// Source log file name, e.g. `nova-api.log.1.2017-05-17_12:02:19`.
    pub log_record: String,
    /// The full log line.
    pub text: String,
}

/// Structured fields extracted from one line. Optional fields are present
/// only when their value appears literally in the text.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LogRecordFields {
    pub log_record: String,
    /// Verbatim `YYYY-MM-DD HH:MM:SS.mmm` header timestamp.
    pub timestamp: String,
    pub process_id: u64,
    pub level: String,
    pub component: String,
    pub request_id: Option<String>,
    pub user_id: Option<String>,
    pub tenant_id: Option<String>,
    pub client_ip: Option<String>,
    pub server_ip: Option<String>,
    pub http_method: Option<String>,
    pub http_path: Option<String>,
    pub status_code: Option<u64>,
    pub response_length: Option<u64>,
    /// Verbatim decimal lexical, e.g. `0.4947891`.
    pub response_time: Option<String>,
    pub instance_uuid: Option<String>,
    pub image_id: Option<String>,
    pub base_file: Option<String>,
    pub instance_file: Option<String>,
    pub host: Option<String>,
    pub event_type: Option<String>,
    pub event_id: Option<String>,
    pub event_uuid: Option<String>,
    /// Metric predicate local name -> verbatim lexical value.
    pub metrics: BTreeMap<String, String>,
    pub message: Option<String>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum LogParseError {
    /// No `YYYY-MM-DD HH:MM:SS.mmm` header found where one is required.
    #[error("malformed header: {0}")]
    MalformedHeader(String),
}

fn regex(cell: &'static OnceLock<Regex>, pattern: &str) -> &'static Regex {
    cell.get_or_init(|| Regex::new(pattern).expect("static regex compiles"))
}

macro_rules! static_regex {
    ($pattern:expr) => {{
        static RE: OnceLock<Regex> = OnceLock::new();
        regex(&RE, $pattern)
    }};
}

const TIMESTAMP_PATTERN: &str = r"\d{4}-\d{2}-\d{2} \d{2}:\d{2}:\d{2}\.\d{3}";
const UUID_PATTERN: &str =
    r"[0-9a-f]{8}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{12}";

fn timestamp_start(text: &str) -> bool {
    static_regex!(r"^\d{4}-\d{2}-\d{2} \d{2}:\d{2}:\d{2}\.\d{3}").is_match(text)
}

/// Splits an inline source-record prefix off a concatenated-corpus line.
/// Returns the prefix token when exactly one token precedes the timestamp.
pub(crate) fn split_inline_record(line: &str) -> Option<(&str, &str)> {
    let trimmed = line.trim_start();
    if timestamp_start(trimmed) {
        return None;
    }
    let (first, rest) = trimmed.split_once(char::is_whitespace)?;
    let rest = rest.trim_start();
    if timestamp_start(rest) {
        Some((first, rest))
    } else {
        None
    }
}

struct Header<'a> {
    timestamp: &'a str,
    process_id: u64,
    level: &'a str,
    component: &'a str,
    /// Full matched header span.
    span: &'a str,
    rest: &'a str,
}

fn parse_header(text: &str) -> Result<Header<'_>, LogParseError> {
    let trimmed = text.trim();
    let after_prefix = match split_inline_record(trimmed) {
        Some((_, rest)) => rest,
        None => trimmed,
    };
    let re = static_regex!(
        r"^(?P<ts>\d{4}-\d{2}-\d{2} \d{2}:\d{2}:\d{2}\.\d{3})\s+(?P<pid>\d+)\s+(?P<level>[A-Z]+)\s+(?P<comp>[A-Za-z_][\w.-]*)"
    );
    let caps = re.captures(after_prefix).ok_or_else(|| {
        LogParseError::MalformedHeader(truncate_for_error(trimmed))
    })?;
    let whole = caps.get(0).expect("match");
    Ok(Header {
        timestamp: caps.name("ts").expect("ts").as_str(),
        process_id: caps.name("pid").expect("pid").as_str().parse().expect("digits fit u64"),
        level: caps.name("level").expect("level").as_str(),
        component: caps.name("comp").expect("comp").as_str(),
        span: whole.as_str(),
        rest: &after_prefix[whole.end()..],
    })
}

fn truncate_for_error(text: &str) -> String {
    const MAX: usize = 80;
    if text.len() <= MAX {
        text.to_string()
    } else {
        let mut end = MAX;
        while !text.is_char_boundary(end) {
            end -= 1;
        }
        format!("{}...", &text[..end])
    }
}

/// A bracketed segment is the request-context block only when it starts with
/// `req-` or holds nothing but placeholder dashes; `[instance: ...]` markers
/// and similar stay in the body.
fn is_context_block(inner: &str) -> bool {
    let inner = inner.trim();
    inner.starts_with("req-")
        || (!inner.is_empty() && inner.split_whitespace().all(|tok| tok == "-"))
        || inner.is_empty()
}

/// Splits a raw line into the header, the optional bracketed context block
/// (brackets included) and the remaining body.
pub fn tokenize(text: &str) -> Result<(String, Option<String>, String), LogParseError> {
    let header = parse_header(text)?;
    let rest = header.rest.trim_start();
    if let Some(after_open) = rest.strip_prefix('[') {
        if let Some(close) = after_open.find(']') {
            let inner = &after_open[..close];
            if is_context_block(inner) {
                let body = after_open[close + 1..].trim().to_string();
                return Ok((header.span.to_string(), Some(format!("[{inner}]")), body));
            }
        }
    }
    Ok((header.span.to_string(), None, rest.trim_end().to_string()))
}

fn hex32(token: &str) -> bool {
    token.len() == 32 && token.bytes().all(|b| b.is_ascii_hexdigit())
}

fn parse_context(inner: &str, fields: &mut LogRecordFields) {
    let mut ids = Vec::new();
    for token in inner.trim_matches(['[', ']']).split_whitespace() {
        if token.starts_with("req-") {
            fields.request_id = Some(token.to_string());
        } else if token != "-" {
            ids.push(token);
        }
    }
    // Positional: user id then tenant id, both 32-hex; anything else is left
    // unclaimed rather than guessed.
    if let Some(user) = ids.first().filter(|t| hex32(t)) {
        fields.user_id = Some(user.to_string());
    }
    if let Some(tenant) = ids.get(1).filter(|t| hex32(t)) {
        fields.tenant_id = Some(tenant.to_string());
    }
}

/// What a body rule leaves in the free-text message slot.
enum MessagePolicy {
    /// Fully structural line; nothing worth keeping as free text.
    None,
    /// Keep the whole (post-marker) remainder verbatim.
    Whole,
}

fn metric(fields: &mut LogRecordFields, name: &str, value: &str) {
    fields.metrics.insert(name.to_string(), value.to_string());
}

/// Ordered body shape rules. Returns the message policy of the first rule
/// that matched, or `None` when no structural shape claimed the body.
fn apply_body_rules(body: &str, fields: &mut LogRecordFields) -> Option<MessagePolicy> {
    // API/WSGI request-response line.
    let re = static_regex!(
        r#"^(?P<ip>\d{1,3}(?:\.\d{1,3}){3})\s+"(?P<method>[A-Z]+)\s+(?P<path>\S+)\s+HTTP/[0-9.]+"\s+status:\s*(?P<status>\d+)\s+len:\s*(?P<len>\d+)\s+time:\s*(?P<time>\d+(?:\.\d+)?)$"#
    );
    if let Some(caps) = re.captures(body) {
        fields.client_ip = Some(caps["ip"].to_string());
        fields.http_method = Some(caps["method"].to_string());
        fields.http_path = Some(caps["path"].to_string());
        fields.status_code = Some(caps["status"].parse().expect("digits"));
        fields.response_length = Some(caps["len"].parse().expect("digits"));
        fields.response_time = Some(caps["time"].to_string());
        return Some(MessagePolicy::None);
    }

    // Resource claim request.
    let re = static_regex!(
        r"^Attempting claim:\s+memory\s+(?P<mem>\d+)\s+MB,\s+disk\s+(?P<disk>\d+)\s+GB,\s+vcpus\s+(?P<vcpus>\d+)\s+CPU$"
    );
    if let Some(caps) = re.captures(body) {
        metric(fields, "requestedMemoryMB", &caps["mem"]);
        metric(fields, "requestedDiskGB", &caps["disk"]);
        metric(fields, "requestedVcpus", &caps["vcpus"]);
        return Some(MessagePolicy::None);
    }

    // Claim accounting: memory totals and limits.
    let re = static_regex!(r"^Total memory:\s+(?P<total>\d+)\s+MB,\s+used:\s+(?P<used>\d+(?:\.\d+)?)\s+MB$");
    if let Some(caps) = re.captures(body) {
        metric(fields, "totalMemoryMB", &caps["total"]);
        metric(fields, "usedMemoryMB", &caps["used"]);
        return Some(MessagePolicy::None);
    }
    let re = static_regex!(r"^memory limit:\s+(?P<limit>\d+(?:\.\d+)?)\s+MB,\s+free:\s+(?P<free>\d+(?:\.\d+)?)\s+MB$");
    if let Some(caps) = re.captures(body) {
        metric(fields, "hasMemoryLimitMB", &caps["limit"]);
        metric(fields, "freeMemoryMB", &caps["free"]);
        return Some(MessagePolicy::None);
    }
    let re = static_regex!(r"^Total disk:\s+(?P<total>\d+)\s+GB,\s+used:\s+(?P<used>\d+(?:\.\d+)?)\s+GB$");
    if let Some(caps) = re.captures(body) {
        metric(fields, "totalDiskGB", &caps["total"]);
        metric(fields, "usedDiskGB", &caps["used"]);
        return Some(MessagePolicy::None);
    }
    let re = static_regex!(r"^Total vcpu:\s+(?P<total>\d+)\s+VCPU,\s+used:\s+(?P<used>\d+(?:\.\d+)?)\s+VCPU$");
    if let Some(caps) = re.captures(body) {
        metric(fields, "totalVcpus", &caps["total"]);
        metric(fields, "usedVcpus", &caps["used"]);
        return Some(MessagePolicy::None);
    }

    // Claim outcome.
    let re = static_regex!(r"^Claim (?P<status>successful|failed)$");
    if let Some(caps) = re.captures(body) {
        metric(fields, "claimStatus", &caps["status"]);
        return Some(MessagePolicy::None);
    }

    // Resource tracker summary.
    let re = static_regex!(
        r"^Final resource view: name=(?P<host>\S+) phys_ram=(?P<pram>\d+)MB used_ram=(?P<uram>\d+)MB phys_disk=(?P<pdisk>\d+)GB used_disk=(?P<udisk>\d+)GB total_vcpus=(?P<tv>\d+) used_vcpus=(?P<uv>\d+) pci_stats=.*$"
    );
    if let Some(caps) = re.captures(body) {
        fields.host = Some(caps["host"].to_string());
        metric(fields, "physicalRamMB", &caps["pram"]);
        metric(fields, "usedRamMB", &caps["uram"]);
        metric(fields, "physicalDiskGB", &caps["pdisk"]);
        metric(fields, "usedDiskGB", &caps["udisk"]);
        metric(fields, "totalVcpus", &caps["tv"]);
        metric(fields, "usedVcpus", &caps["uv"]);
        return Some(MessagePolicy::None);
    }
    let re = static_regex!(r"^Total usable vcpus:\s+(?P<usable>\d+),\s+total allocated vcpus:\s+(?P<alloc>\d+)$");
    if let Some(caps) = re.captures(body) {
        metric(fields, "totalUsableVcpus", &caps["usable"]);
        metric(fields, "totalAllocatedVcpus", &caps["alloc"]);
        return Some(MessagePolicy::None);
    }

    // Tracker bookkeeping notices; the node identity is the only structured
    // content.
    let re = static_regex!(r"^Compute_service record (?:created|updated) for (?P<host>[\w.@-]+):[\w.@-]+$");
    if let Some(caps) = re.captures(body) {
        fields.host = Some(caps["host"].to_string());
        return Some(MessagePolicy::None);
    }
    let re = static_regex!(r"^Auditing locally available compute resources for node (?P<host>\S+)$");
    if let Some(caps) = re.captures(body) {
        fields.host = Some(caps["host"].to_string());
        return Some(MessagePolicy::Whole);
    }

    // Operation timings. Spawn and build carry dedicated predicates; other
    // measured operations keep the description as free text.
    let re = static_regex!(r"^Took (?P<secs>\d+\.\d+) seconds to spawn the instance on the hypervisor\.$");
    if let Some(caps) = re.captures(body) {
        metric(fields, "spawnTimeSeconds", &caps["secs"]);
        return Some(MessagePolicy::None);
    }
    let re = static_regex!(r"^Took (?P<secs>\d+\.\d+) seconds to build instance\.$");
    if let Some(caps) = re.captures(body) {
        metric(fields, "buildTimeSeconds", &caps["secs"]);
        return Some(MessagePolicy::None);
    }
    let re = static_regex!(r"^Took (?P<secs>\d+\.\d+) seconds to .+$");
    if let Some(caps) = re.captures(body) {
        metric(fields, "durationSeconds", &caps["secs"]);
        return Some(MessagePolicy::Whole);
    }

    // Image cache probes.
    let re = static_regex!(&format!(
        r"^image (?P<img>{UUID_PATTERN}) at \((?P<base>\S+)\): checking$"
    ));
    if let Some(caps) = re.captures(body) {
        fields.image_id = Some(caps["img"].to_string());
        fields.base_file = Some(caps["base"].to_string());
        return Some(MessagePolicy::None);
    }
    let re = static_regex!(&format!(
        r"^image (?P<img>{UUID_PATTERN}) at \((?P<base>\S+)\): in use: on this node (?P<local>\d+) local, (?P<remote>\d+) on other nodes sharing this instance storage$"
    ));
    if let Some(caps) = re.captures(body) {
        fields.image_id = Some(caps["img"].to_string());
        fields.base_file = Some(caps["base"].to_string());
        metric(fields, "localUsageCount", &caps["local"]);
        metric(fields, "remoteUsageCount", &caps["remote"]);
        return Some(MessagePolicy::None);
    }
    let re = static_regex!(
        r"^(?:Active base files|Removable base files|Base or swap file too young to remove|Unknown base file):\s+(?P<path>\S+)$"
    );
    if let Some(caps) = re.captures(body) {
        fields.base_file = Some(caps["path"].to_string());
        return Some(MessagePolicy::None);
    }

    // Instance file operations.
    let re = static_regex!(r"^Deleting instance files (?P<path>\S+)$");
    if let Some(caps) = re.captures(body) {
        fields.instance_file = Some(caps["path"].to_string());
        return Some(MessagePolicy::Whole);
    }
    let re = static_regex!(r"^Deletion of (?P<path>\S+) complete$");
    if let Some(caps) = re.captures(body) {
        fields.instance_file = Some(caps["path"].to_string());
        return Some(MessagePolicy::Whole);
    }

    // External event registration.
    let re = static_regex!(&format!(
        r"^Creating event (?P<etype>[A-Za-z][\w-]*):(?P<euuid>{UUID_PATTERN}) for instance (?P<inst>{UUID_PATTERN})$"
    ));
    if let Some(caps) = re.captures(body) {
        fields.event_type = Some(caps["etype"].to_string());
        fields.event_uuid = Some(caps["euuid"].to_string());
        fields.instance_uuid = Some(caps["inst"].to_string());
        return Some(MessagePolicy::None);
    }

    // Periodic usage audit.
    let re = static_regex!(
        r"^Running instance usage audit for host (?P<host>\S+) from (?P<from>\d{4}-\d{2}-\d{2} \d{2}:\d{2}:\d{2}) to (?P<to>\d{4}-\d{2}-\d{2} \d{2}:\d{2}:\d{2})\. (?P<count>\d+) instances\.$"
    );
    if let Some(caps) = re.captures(body) {
        fields.host = Some(caps["host"].to_string());
        metric(fields, "usageAuditStart", &caps["from"]);
        metric(fields, "usageAuditEnd", &caps["to"]);
        metric(fields, "instanceCount", &caps["count"]);
        return Some(MessagePolicy::None);
    }

    // Host manager sync notice.
    let re = static_regex!(r"^Successfully synced instances from host '(?P<host>[^']+)'\.$");
    if let Some(caps) = re.captures(body) {
        fields.host = Some(caps["host"].to_string());
        return Some(MessagePolicy::Whole);
    }

    None
}

fn parse_body(body: &str, fields: &mut LogRecordFields) {
    let mut remainder = body.trim();
    let marker = static_regex!(&format!(r"^\[instance:\s*(?P<uuid>{UUID_PATTERN})\]\s*"));
    if let Some(caps) = marker.captures(remainder) {
        fields.instance_uuid = Some(caps["uuid"].to_string());
        remainder = remainder[caps.get(0).expect("match").end()..].trim();
    }
    if remainder.is_empty() {
        return;
    }
    match apply_body_rules(remainder, fields) {
        Some(MessagePolicy::None) => {}
        Some(MessagePolicy::Whole) | None => {
            fields.message = Some(remainder.to_string());
        }
    }
}

/// Parses one raw entry into structured fields.
pub fn parse_entry(entry: &RawLogEntry) -> Result<LogRecordFields, LogParseError> {
    let header = parse_header(&entry.text)?;
    let mut fields = LogRecordFields {
        log_record: entry.log_record.clone(),
        timestamp: header.timestamp.to_string(),
        process_id: header.process_id,
        level: header.level.to_string(),
        component: header.component.to_string(),
        ..LogRecordFields::default()
    };
    let (_, context, body) = tokenize(&entry.text)?;
    if let Some(block) = context {
        parse_context(&block, &mut fields);
    }
    parse_body(&body, &mut fields);
    Ok(fields)
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("cannot read corpus {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid sidecar mapping {path}: {detail}")]
    BadSidecar { path: String, detail: String },
}

/// One sidecar mapping row: 1-based inclusive line range -> record name.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SidecarRange {
    pub start: u64,
    pub end: u64,
    pub log_record: String,
}

/// A loaded corpus: one entry per non-blank line, blank line numbers kept
/// for traceability.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub entries: Vec<RawLogEntry>,
    pub blank_lines: Vec<u64>,
}

/// Reads a plain-text corpus, one log entry per line. The record name for
/// each line comes from the sidecar mapping when given, otherwise from an
/// inline leading token (concatenated-corpus convention), otherwise from the
/// corpus file name.
pub fn load_corpus(path: &Path, sidecar: Option<&Path>) -> Result<Corpus, CorpusError> {
    let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let ranges: Vec<SidecarRange> = match sidecar {
        Some(sc_path) => {
            let raw = std::fs::read_to_string(sc_path).map_err(|source| CorpusError::Io {
                path: sc_path.display().to_string(),
                source,
            })?;
            serde_json::from_str(&raw).map_err(|e| CorpusError::BadSidecar {
                path: sc_path.display().to_string(),
                detail: e.to_string(),
            })?
        }
        None => Vec::new(),
    };
    let fallback = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "corpus".to_string());

    let mut entries = Vec::new();
    let mut blank_lines = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let entry_id = idx as u64 + 1;
        if line.trim().is_empty() {
            blank_lines.push(entry_id);
            continue;
        }
        let from_sidecar = ranges
            .iter()
            .find(|r| r.start <= entry_id && entry_id <= r.end)
            .map(|r| r.log_record.clone());
        let log_record = from_sidecar
            .or_else(|| split_inline_record(line).map(|(rec, _)| rec.to_string()))
            .unwrap_or_else(|| fallback.clone());
        entries.push(RawLogEntry {
            entry_id,
            log_record,
            text: line.to_string(),
        });
    }
    Ok(Corpus { entries, blank_lines })
}

#[cfg(test)]
mod tests {
    use super::*;

    const HTTP_LINE: &str = "nova-api.log.1.2017-05-17_12:02:19 2017-05-16 18:57:49.073 25749 INFO nova.osapi_compute.wsgi.server [req-0550be32-0499-40f3-b0cf-4aab2629052b 113d3a99c3da401fbd62cc2caa5b96d2 54fadb412c4e40cdbaed9335e4c35a9e - - -] 10.11.10.1 \"POST /v2/54fadb412c4e40cdbaed9335e4c35a9e/servers HTTP/1.1\" status: 202 len: 733 time: 0.4947891";

    const IMAGECACHE_LINE: &str = "nova-compute.log.2017-05-14_21:56:26 2017-05-14 21:30:50.117 2931 INFO nova.virt.libvirt.imagecache [req-addc1839-2ed5-4778-b57e-5854eb7b8b09 - - - -] Removable base files: /var/lib/nova/instances/_base/a489c868f0c37da93b76227c91bb03908ac0e742";

    fn entry(text: &str, record: &str) -> RawLogEntry {
        RawLogEntry { entry_id: 1, log_record: record.to_string(), text: text.to_string() }
    }

    #[test]
    fn tokenize_splits_header_context_body() {
        let (header, context, body) = tokenize(HTTP_LINE).unwrap();
        assert_eq!(header, "2017-05-16 18:57:49.073 25749 INFO nova.osapi_compute.wsgi.server");
        assert_eq!(
            context.as_deref(),
            Some("[req-0550be32-0499-40f3-b0cf-4aab2629052b 113d3a99c3da401fbd62cc2caa5b96d2 54fadb412c4e40cdbaed9335e4c35a9e - - -]")
        );
        assert_eq!(
            body,
            "10.11.10.1 \"POST /v2/54fadb412c4e40cdbaed9335e4c35a9e/servers HTTP/1.1\" status: 202 len: 733 time: 0.4947891"
        );
    }

    #[test]
    fn tokenize_captures_placeholder_only_context() {
        let (_, context, body) = tokenize(IMAGECACHE_LINE).unwrap();
        assert_eq!(context.as_deref(), Some("[req-addc1839-2ed5-4778-b57e-5854eb7b8b09 - - - -]"));
        assert!(body.starts_with("Removable base files:"));
    }

    #[test]
    fn tokenize_rejects_line_without_timestamp() {
        let err = tokenize("garbage without a date").unwrap_err();
        assert!(matches!(err, LogParseError::MalformedHeader(_)));
    }

    #[test]
    fn tokenize_keeps_instance_marker_in_body() {
        let line = "2017-05-16 00:00:04.500 2931 INFO nova.compute.manager [instance: b9000564-fe1a-409b-b8cc-1e88b294cd1d] VM Started (Lifecycle Event)";
        let (_, context, body) = tokenize(line).unwrap();
        assert_eq!(context, None);
        assert!(body.starts_with("[instance:"));
    }

    #[test]
    fn parse_entry_extracts_http_fields() {
        let fields = parse_entry(&entry(HTTP_LINE, "nova-api.log.1.2017-05-17_12:02:19")).unwrap();
        assert_eq!(fields.process_id, 25749);
        assert_eq!(fields.level, "INFO");
        assert_eq!(fields.component, "nova.osapi_compute.wsgi.server");
        assert_eq!(fields.request_id.as_deref(), Some("req-0550be32-0499-40f3-b0cf-4aab2629052b"));
        assert_eq!(fields.user_id.as_deref(), Some("113d3a99c3da401fbd62cc2caa5b96d2"));
        assert_eq!(fields.tenant_id.as_deref(), Some("54fadb412c4e40cdbaed9335e4c35a9e"));
        assert_eq!(fields.client_ip.as_deref(), Some("10.11.10.1"));
        assert_eq!(fields.http_method.as_deref(), Some("POST"));
        assert_eq!(fields.http_path.as_deref(), Some("/v2/54fadb412c4e40cdbaed9335e4c35a9e/servers"));
        assert_eq!(fields.status_code, Some(202));
        assert_eq!(fields.response_length, Some(733));
        assert_eq!(fields.response_time.as_deref(), Some("0.4947891"));
        assert_eq!(fields.message, None);
        assert!(fields.metrics.is_empty());
    }

    #[test]
    fn parse_entry_extracts_base_file_without_http_fields() {
        let fields =
            parse_entry(&entry(IMAGECACHE_LINE, "nova-compute.log.2017-05-14_21:56:26")).unwrap();
        assert_eq!(fields.component, "nova.virt.libvirt.imagecache");
        assert_eq!(fields.request_id.as_deref(), Some("req-addc1839-2ed5-4778-b57e-5854eb7b8b09"));
        assert_eq!(
            fields.base_file.as_deref(),
            Some("/var/lib/nova/instances/_base/a489c868f0c37da93b76227c91bb03908ac0e742")
        );
        assert_eq!(fields.user_id, None);
        assert_eq!(fields.tenant_id, None);
        assert_eq!(fields.http_method, None);
        assert_eq!(fields.status_code, None);
    }

    #[test]
    fn parse_entry_minimal_line_keeps_only_message() {
        let fields = parse_entry(&entry(
            "2017-05-16 00:00:00.000 1 INFO a.b [-] hello",
            "x.log",
        ))
        .unwrap();
        assert_eq!(fields.process_id, 1);
        assert_eq!(fields.component, "a.b");
        assert_eq!(fields.message.as_deref(), Some("hello"));
        assert_eq!(fields.request_id, None);
        assert_eq!(fields.user_id, None);
        assert!(fields.metrics.is_empty());
    }

    #[test]
    fn parse_entry_claim_line() {
        let line = "2017-05-16 00:00:10.864 2931 INFO nova.compute.claims [req-a1 - - - - -] [instance: b9000564-fe1a-409b-b8cc-1e88b294cd1d] Attempting claim: memory 2048 MB, disk 20 GB, vcpus 1 CPU";
        let fields = parse_entry(&entry(line, "nova-compute.log")).unwrap();
        assert_eq!(fields.instance_uuid.as_deref(), Some("b9000564-fe1a-409b-b8cc-1e88b294cd1d"));
        assert_eq!(fields.metrics.get("requestedMemoryMB").map(String::as_str), Some("2048"));
        assert_eq!(fields.metrics.get("requestedDiskGB").map(String::as_str), Some("20"));
        assert_eq!(fields.metrics.get("requestedVcpus").map(String::as_str), Some("1"));
        assert_eq!(fields.message, None);
    }

    #[test]
    fn parse_entry_usage_audit_line() {
        let line = "2017-05-16 00:00:05.060 2931 INFO nova.compute.manager [req-b1 - - - - -] Running instance usage audit for host cp-1.slowvm1.tcloud-pg0.utah.cloudlab.us from 2017-05-01 00:00:00 to 2017-05-16 00:00:00. 0 instances.";
        let fields = parse_entry(&entry(line, "nova-compute.log")).unwrap();
        assert_eq!(fields.host.as_deref(), Some("cp-1.slowvm1.tcloud-pg0.utah.cloudlab.us"));
        assert_eq!(fields.metrics.get("usageAuditStart").map(String::as_str), Some("2017-05-01 00:00:00"));
        assert_eq!(fields.metrics.get("usageAuditEnd").map(String::as_str), Some("2017-05-16 00:00:00"));
        assert_eq!(fields.metrics.get("instanceCount").map(String::as_str), Some("0"));
    }

    #[test]
    fn parse_entry_lifecycle_line_keeps_free_text() {
        let line = "2017-05-16 00:00:04.500 2931 INFO nova.compute.manager [req-c1 - - - - -] [instance: b9000564-fe1a-409b-b8cc-1e88b294cd1d] VM Started (Lifecycle Event)";
        let fields = parse_entry(&entry(line, "nova-compute.log")).unwrap();
        assert_eq!(fields.instance_uuid.as_deref(), Some("b9000564-fe1a-409b-b8cc-1e88b294cd1d"));
        assert_eq!(fields.message.as_deref(), Some("VM Started (Lifecycle Event)"));
    }

    #[test]
    fn optional_field_values_appear_verbatim_in_text() {
        for line in [HTTP_LINE, IMAGECACHE_LINE] {
            let e = entry(line, "r");
            let fields = parse_entry(&e).unwrap();
            let mut lexicals: Vec<String> = Vec::new();
            for opt in [
                &fields.request_id,
                &fields.user_id,
                &fields.tenant_id,
                &fields.client_ip,
                &fields.http_method,
                &fields.http_path,
                &fields.response_time,
                &fields.base_file,
                &fields.message,
            ] {
                if let Some(v) = opt {
                    lexicals.push(v.clone());
                }
            }
            for (_, v) in &fields.metrics {
                lexicals.push(v.clone());
            }
            for lexical in lexicals {
                assert!(e.text.contains(&lexical), "{lexical:?} not verbatim in {line:?}");
            }
        }
    }

    #[test]
    fn load_corpus_uses_inline_record_prefix() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mini.log");
        std::fs::write(&path, format!("{HTTP_LINE}\n\n{IMAGECACHE_LINE}\n")).unwrap();
        let corpus = load_corpus(&path, None).unwrap();
        assert_eq!(corpus.entries.len(), 2);
        assert_eq!(corpus.blank_lines, vec![2]);
        assert_eq!(corpus.entries[0].entry_id, 1);
        assert_eq!(corpus.entries[0].log_record, "nova-api.log.1.2017-05-17_12:02:19");
        assert_eq!(corpus.entries[1].entry_id, 3);
        assert_eq!(corpus.entries[1].log_record, "nova-compute.log.2017-05-14_21:56:26");
    }

    #[test]
    fn load_corpus_sidecar_overrides_inline_prefix() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mini.log");
        std::fs::write(&path, format!("{HTTP_LINE}\n")).unwrap();
        let sidecar = dir.path().join("map.json");
        std::fs::write(&sidecar, r#"[{"start":1,"end":1,"log_record":"custom.log"}]"#).unwrap();
        let corpus = load_corpus(&path, Some(&sidecar)).unwrap();
        assert_eq!(corpus.entries[0].log_record, "custom.log");
    }

    #[test]
    fn load_corpus_falls_back_to_file_name() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("plain.log");
        std::fs::write(&path, "2017-05-16 00:00:00.000 1 INFO a.b [-] hi\n").unwrap();
        let corpus = load_corpus(&path, None).unwrap();
        assert_eq!(corpus.entries[0].log_record, "plain.log");
    }
}
