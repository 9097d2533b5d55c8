use std::path::Path;

use chrono::{DateTime, NaiveDateTime, Utc};
use sha2::{Digest, Sha256};

use super::mime::{self, Part};
use super::types::{ActorId, Message, MessageSet, Warnings};
use crate::error::{Error, Result};

/// Parses an RFC 4155 mbox file.
pub fn parse_mbox(path: impl AsRef<Path>) -> Result<MessageSet> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_mbox_bytes(&bytes))
}

pub fn parse_mbox_bytes(bytes: &[u8]) -> MessageSet {
    let mut warnings = Warnings::default();
    let mut messages = Vec::new();
    for (idx, raw) in split_mbox(bytes, &mut warnings).into_iter().enumerate() {
        match parse_message(&raw, &mut warnings) {
            Some(m) => messages.push(m),
            None => log::warn!("skipping malformed message #{idx} in mbox"),
        }
    }
    MessageSet::new(messages, warnings)
}

/// Splits the archive on `From ` separator lines (at file start or after a
/// blank line) and undoes mboxrd `>From ` quoting.
fn split_mbox(bytes: &[u8], warnings: &mut Warnings) -> Vec<Vec<u8>> {
    let mut out: Vec<Vec<u8>> = Vec::new();
    let mut current: Option<Vec<u8>> = None;
    let mut prev_blank = true;
    let mut leading_garbage = false;
    for line in bytes.split_inclusive(|&b| b == b'\n') {
        let content = line
            .strip_suffix(b"\n")
            .map(|l| l.strip_suffix(b"\r").unwrap_or(l))
            .unwrap_or(line);
        if prev_blank && content.starts_with(b"From ") {
            if let Some(mut done) = current.take() {
                trim_trailing_newline(&mut done);
                out.push(done);
            }
            current = Some(Vec::new());
            prev_blank = false;
            continue;
        }
        prev_blank = content.is_empty();
        match current.as_mut() {
            Some(buf) => {
                let gt = content.iter().take_while(|&&b| b == b'>').count();
                if gt > 0 && content[gt..].starts_with(b"From ") {
                    buf.extend_from_slice(&line[1..]);
                } else {
                    buf.extend_from_slice(line);
                }
            }
            None => {
                if !content.iter().all(u8::is_ascii_whitespace) {
                    leading_garbage = true;
                }
            }
        }
    }
    if let Some(mut done) = current {
        trim_trailing_newline(&mut done);
        out.push(done);
    }
    if leading_garbage {
        log::warn!("mbox: content before first From_ line ignored");
        warnings.bump("leading_garbage");
    }
    out
}

fn trim_trailing_newline(buf: &mut Vec<u8>) {
    // the blank line before the next separator is not message content
    if buf.ends_with(b"\r\n") {
        buf.truncate(buf.len() - 2);
    } else if buf.ends_with(b"\n") {
        buf.truncate(buf.len() - 1);
    }
}

fn parse_message(raw: &[u8], warnings: &mut Warnings) -> Option<Message> {
    let part = Part::parse(raw);

    let Some(date) = part.header("Date") else {
        log::warn!("message without Date header");
        warnings.bump("missing_date");
        return None;
    };
    let timestamp = match parse_date(date) {
        Some((ts, had_zone)) => {
            if !had_zone {
                log::warn!("date without timezone, assuming UTC: {date}");
                warnings.bump("date_missing_timezone");
            }
            ts
        }
        None => {
            log::warn!("unparseable date: {date}");
            warnings.bump("unparseable_date");
            return None;
        }
    };

    let sender = part
        .header("From")
        .and_then(|v| mime::address_list(v).into_iter().next())
        .map(|a| ActorId::normalize(&a))
        .filter(|a| !a.is_empty());
    let Some(sender) = sender else {
        log::warn!("message without sender");
        warnings.bump("missing_sender");
        return None;
    };

    let mut recipients: Vec<ActorId> = Vec::new();
    for name in ["To", "Cc"] {
        for value in part.headers_named(name) {
            for addr in mime::address_list(value) {
                let a = ActorId::normalize(&addr);
                if !a.is_empty() && !recipients.contains(&a) {
                    recipients.push(a);
                }
            }
        }
    }
    if recipients.is_empty() {
        log::warn!("message from {sender} has no recipients");
        warnings.bump("no_recipients");
    }

    let id = match part.header("Message-ID").map(mime::message_ids) {
        Some(ids) if !ids.is_empty() => ids[0].clone(),
        _ => {
            warnings.bump("missing_message_id");
            let digest = Sha256::digest(raw);
            let hex: String = digest[..12].iter().map(|b| format!("{b:02x}")).collect();
            format!("{hex}@generated.invalid")
        }
    };

    let mut reply_parents: Vec<String> = Vec::new();
    for name in ["References", "In-Reply-To"] {
        if let Some(v) = part.header(name) {
            for pid in mime::message_ids(v) {
                if !reply_parents.contains(&pid) {
                    reply_parents.push(pid);
                }
            }
        }
    }

    let subject = part.header("Subject").map(mime::decode_words).unwrap_or_default();
    let body = normalize_newlines(&part.text()).trim_end_matches('\n').to_string();

    Some(Message {
        id,
        sender,
        recipients,
        timestamp,
        subject,
        body,
        reply_parents,
        team: None,
    })
}

fn normalize_newlines(s: &str) -> String {
    s.replace("\r\n", "\n")
}

/// Parses an RFC 2822 date. The flag is false when the input carried no zone
/// and UTC was assumed.
pub fn parse_date(value: &str) -> Option<(DateTime<Utc>, bool)> {
    let cleaned = strip_comments(value);
    let cleaned = cleaned.trim();
    if let Ok(dt) = DateTime::parse_from_rfc2822(cleaned) {
        return Some((truncate(dt.with_timezone(&Utc)), true));
    }
    // obsolete zone names that chrono does not know about
    let upper = cleaned.to_ascii_uppercase();
    for (name, offset) in [("UTC", "+0000"), ("Z", "+0000"), ("CEST", "+0200"), ("CET", "+0100")] {
        if let Some(head) = upper.strip_suffix(name) {
            if head.ends_with(' ') {
                let rebuilt = format!("{}{offset}", &cleaned[..head.len()]);
                if let Ok(dt) = DateTime::parse_from_rfc2822(&rebuilt) {
                    return Some((truncate(dt.with_timezone(&Utc)), true));
                }
            }
        }
    }
    let no_weekday = cleaned.split_once(',').map_or(cleaned, |(_, rest)| rest).trim();
    for fmt in ["%d %b %Y %H:%M:%S", "%d %b %Y %H:%M", "%Y-%m-%d %H:%M:%S"] {
        if let Ok(naive) = NaiveDateTime::parse_from_str(no_weekday, fmt) {
            return Some((naive.and_utc(), false));
        }
    }
    None
}

fn strip_comments(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    let mut depth = 0usize;
    for c in value.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            c if depth == 0 => out.push(c),
            _ => {}
        }
    }
    out
}

fn truncate(dt: DateTime<Utc>) -> DateTime<Utc> {
    DateTime::from_timestamp(dt.timestamp(), 0).unwrap_or(dt)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mail(id: &str, date: Option<&str>, body: &str) -> String {
        let mut s = format!("From sender@x.edu Mon Jan  1 00:00:00 2024\nFrom: A <a@x.edu>\nTo: b@x.edu\nCc: c@x.edu, B <B@X.EDU>\nMessage-ID: <{id}>\nSubject: hi\n");
        if let Some(d) = date {
            s.push_str(&format!("Date: {d}\n"));
        }
        s.push('\n');
        s.push_str(body);
        s.push_str("\n\n");
        s
    }

    #[test]
    fn three_well_formed() {
        let mbox: String = (0..3)
            .map(|i| mail(&format!("m{i}@x"), Some("Mon, 1 Jan 2024 10:00:00 +0000"), "text"))
            .collect();
        let ms = parse_mbox_bytes(mbox.as_bytes());
        assert_eq!(ms.len(), 3);
        assert_eq!(ms.warnings().total(), 0);
        let m = &ms.messages()[0];
        assert_eq!(m.sender.as_str(), "a@x.edu");
        let rcpt: Vec<_> = m.recipients.iter().map(ActorId::as_str).collect();
        assert_eq!(rcpt, ["b@x.edu", "c@x.edu"]);
        assert_eq!(m.body, "text");
    }

    #[test]
    fn missing_date_is_skipped_with_warning() {
        let ms = parse_mbox_bytes(mail("m@x", None, "text").as_bytes());
        assert_eq!(ms.len(), 0);
        assert_eq!(ms.warnings().total(), 1);
        assert_eq!(ms.warnings().get("missing_date"), 1);
    }

    #[test]
    fn from_line_in_body_needs_blank_line_and_is_unescaped() {
        let body = "first\n>From the archive\nlast";
        let ms = parse_mbox_bytes(mail("m@x", Some("Mon, 1 Jan 2024 10:00:00 +0000"), body).as_bytes());
        assert_eq!(ms.len(), 1);
        assert_eq!(ms.messages()[0].body, "first\nFrom the archive\nlast");
    }

    #[test]
    fn dates_normalize_to_utc() {
        let (dt, zoned) = parse_date("Tue, 2 Jan 2024 01:30:00 +0200 (EET)").unwrap();
        assert!(zoned);
        assert_eq!(dt.to_rfc3339(), "2024-01-01T23:30:00+00:00");
        let (dt, zoned) = parse_date("2 Jan 2024 01:30:00").unwrap();
        assert!(!zoned);
        assert_eq!(dt.to_rfc3339(), "2024-01-02T01:30:00+00:00");
        assert!(parse_date("not a date").is_none());
    }

    #[test]
    fn reply_headers_collected() {
        let raw = "From x\nFrom: a@x\nTo: b@x\nDate: Mon, 1 Jan 2024 10:00:00 +0000\nMessage-ID: <r@x>\nReferences: <root@x> <mid@x>\nIn-Reply-To: <mid@x>\n\nbody\n";
        let ms = parse_mbox_bytes(raw.as_bytes());
        assert_eq!(ms.messages()[0].reply_parents, ["root@x", "mid@x"]);
    }

    #[test]
    fn parse_is_deterministic() {
        let mbox = mail("a@x", Some("Mon, 1 Jan 2024 10:00:00 +0000"), "x") + &mail("b@x", None, "y");
        assert_eq!(parse_mbox_bytes(mbox.as_bytes()), parse_mbox_bytes(mbox.as_bytes()));
    }
}
