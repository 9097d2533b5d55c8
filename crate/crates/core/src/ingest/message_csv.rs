use std::io::{Read, Write};
use std::path::Path;

use chrono::{DateTime, NaiveDateTime, SecondsFormat, Utc};

use super::types::{ActorId, Message, MessageSet, Warnings};
use crate::error::{Error, Result};

pub const MESSAGE_COLUMNS: [&str; 7] = [
    "id",
    "sender",
    "recipients",
    "timestamp",
    "subject",
    "reply_parents",
    "body",
];

pub fn parse_message_csv(path: impl AsRef<Path>) -> Result<MessageSet> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_message_csv(file)
}

pub fn read_message_csv<R: Read>(input: R) -> Result<MessageSet> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(input);
    let headers = rdr.headers()?.clone();
    let mut idx = [0usize; 7];
    for (slot, name) in idx.iter_mut().zip(MESSAGE_COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))?;
    }
    let [i_id, i_sender, i_rcpt, i_ts, i_subject, i_parents, i_body] = idx;

    let mut warnings = Warnings::default();
    let mut messages = Vec::new();
    for (line, record) in rdr.records().enumerate() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                log::warn!("csv row {}: {e}", line + 2);
                warnings.bump("bad_row");
                continue;
            }
        };
        let field = |i: usize| record.get(i).unwrap_or("");
        let id = field(i_id).trim();
        let sender = ActorId::normalize(field(i_sender));
        if id.is_empty() || sender.is_empty() {
            log::warn!("csv row {}: missing id or sender", line + 2);
            warnings.bump("bad_row");
            continue;
        }
        let timestamp = match parse_timestamp(field(i_ts)) {
            Some((ts, zoned)) => {
                if !zoned {
                    warnings.bump("date_missing_timezone");
                }
                ts
            }
            None => {
                log::warn!("csv row {}: unparseable timestamp {:?}", line + 2, field(i_ts));
                warnings.bump("unparseable_date");
                continue;
            }
        };
        let mut recipients: Vec<ActorId> = Vec::new();
        for a in split_list(field(i_rcpt)).map(ActorId::normalize) {
            if !a.is_empty() && !recipients.contains(&a) {
                recipients.push(a);
            }
        }
        if recipients.is_empty() {
            warnings.bump("no_recipients");
        }
        messages.push(Message {
            id: id.to_string(),
            sender,
            recipients,
            timestamp,
            subject: field(i_subject).to_string(),
            body: field(i_body).to_string(),
            reply_parents: split_list(field(i_parents)).map(str::to_string).collect(),
            team: None,
        });
    }
    Ok(MessageSet::new(messages, warnings))
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(';').map(str::trim).filter(|p| !p.is_empty())
}

fn parse_timestamp(s: &str) -> Option<(DateTime<Utc>, bool)> {
    let s = s.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return DateTime::from_timestamp(dt.timestamp(), 0).map(|d| (d, true));
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M"] {
        if let Ok(naive) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some((naive.and_utc(), false));
        }
    }
    None
}

pub fn write_message_csv<W: Write>(ms: &MessageSet, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(MESSAGE_COLUMNS)?;
    for m in ms.messages() {
        let recipients: Vec<&str> = m.recipients.iter().map(ActorId::as_str).collect();
        w.write_record([
            m.id.as_str(),
            m.sender.as_str(),
            &recipients.join(";"),
            &m.timestamp.to_rfc3339_opts(SecondsFormat::Secs, true),
            &m.subject,
            &m.reply_parents.join(";"),
            &m.body,
        ])?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "id,sender,recipients,timestamp,subject,reply_parents,body\n";

    #[test]
    fn two_valid_rows() {
        let data = format!(
            "{HEADER}m1,a@x.edu,b@x.edu;c@x.edu,2024-01-01T10:00:00Z,hi,,hello\n\
             m2,Bob <B@X.EDU>,a@x.edu,2024-01-01T11:00:00+01:00,Re: hi,m1,\"multi\nline\"\n"
        );
        let ms = read_message_csv(data.as_bytes()).unwrap();
        assert_eq!(ms.len(), 2);
        assert_eq!(ms.warnings().total(), 0);
        let m2 = ms.messages().iter().find(|m| m.id == "m2").unwrap();
        assert_eq!(m2.sender.as_str(), "b@x.edu");
        assert_eq!(m2.reply_parents, ["m1"]);
        assert_eq!(m2.body, "multi\nline");
        assert_eq!(m2.timestamp.to_rfc3339(), "2024-01-01T10:00:00+00:00");
    }

    #[test]
    fn missing_column_is_fatal() {
        let data = "id,sender,recipients,subject,reply_parents,body\n";
        let err = read_message_csv(data.as_bytes()).unwrap_err();
        assert_eq!(err.to_string(), "missing column: timestamp");
    }

    #[test]
    fn bad_rows_warn_and_skip() {
        let data = format!(
            "{HEADER}m1,a@x,b@x,yesterday,s,,b\nm2,,b@x,2024-01-01T10:00:00Z,s,,b\nm3,a@x,b@x,2024-01-01 10:00:00,s,,b\n"
        );
        let ms = read_message_csv(data.as_bytes()).unwrap();
        assert_eq!(ms.len(), 1);
        assert_eq!(ms.warnings().get("unparseable_date"), 1);
        assert_eq!(ms.warnings().get("bad_row"), 1);
        assert_eq!(ms.warnings().get("date_missing_timezone"), 1);
    }

    #[test]
    fn export_then_parse_round_trips() {
        let data = format!(
            "{HEADER}m1,a@x.edu,b@x.edu;c@x.edu,2024-01-01T10:00:00Z,\"hi, there\",,\"a \"\"quote\"\"\"\nm2,b@x.edu,a@x.edu,2024-01-02T10:00:00Z,Re: hi,m0;m1,x\n"
        );
        let ms = read_message_csv(data.as_bytes()).unwrap();
        let mut buf = Vec::new();
        write_message_csv(&ms, &mut buf).unwrap();
        let again = read_message_csv(buf.as_slice()).unwrap();
        assert_eq!(again.messages(), ms.messages());
    }
}
