//! Just enough RFC 5322 / MIME to pull headers and a plain-text body out of
//! an archived message. Attachments are skipped; HTML is reduced to text.

use base64::Engine;

#[derive(Debug, Clone)]
pub struct Part<'a> {
    pub headers: Vec<(String, String)>,
    pub body: &'a [u8],
}

impl<'a> Part<'a> {
    pub fn parse(raw: &'a [u8]) -> Part<'a> {
        let (head, body) = split_head(raw);
        Part {
            headers: unfold_headers(head),
            body,
        }
    }

    /// First header with the given (case-insensitive) name.
    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_str())
    }

    /// All values of a repeated header, in order.
    pub fn headers_named<'s>(&'s self, name: &'s str) -> impl Iterator<Item = &'s str> + 's {
        self.headers
            .iter()
            .filter(move |(k, _)| k.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_str())
    }

    pub fn content_type(&self) -> ContentType {
        self.header("Content-Type").map(ContentType::parse).unwrap_or_default()
    }

    fn is_attachment(&self) -> bool {
        self.header("Content-Disposition")
            .map(|v| v.trim_start().to_ascii_lowercase().starts_with("attachment"))
            .unwrap_or(false)
    }

    fn decoded_body(&self) -> Vec<u8> {
        let cte = self
            .header("Content-Transfer-Encoding")
            .map(|v| v.trim().to_ascii_lowercase())
            .unwrap_or_default();
        match cte.as_str() {
            "base64" => decode_base64(self.body),
            "quoted-printable" => decode_quoted_printable(self.body),
            _ => self.body.to_vec(),
        }
    }

    /// Plain-text rendering of the message body.
    pub fn text(&self) -> String {
        self.text_inner(0).unwrap_or_default()
    }

    fn text_inner(&self, depth: usize) -> Option<String> {
        if depth > 16 || self.is_attachment() {
            return None;
        }
        let ct = self.content_type();
        match ct.mime.as_str() {
            m if m.starts_with("multipart/") => {
                let boundary = ct.param("boundary")?;
                let parts: Vec<Part> = split_multipart(self.body, boundary)
                    .into_iter()
                    .map(Part::parse)
                    .collect();
                if m == "multipart/alternative" {
                    let pick = |want: &str| {
                        parts
                            .iter()
                            .filter(|p| p.content_type().mime == want)
                            .find_map(|p| p.text_inner(depth + 1))
                    };
                    pick("text/plain")
                        .or_else(|| pick("text/html"))
                        .or_else(|| parts.iter().find_map(|p| p.text_inner(depth + 1)))
                } else {
                    let texts: Vec<String> = parts.iter().filter_map(|p| p.text_inner(depth + 1)).collect();
                    if texts.is_empty() {
                        None
                    } else {
                        Some(texts.join("\n"))
                    }
                }
            }
            "text/plain" => Some(decode_charset(&self.decoded_body(), ct.param("charset"))),
            "text/html" => Some(html_to_text(&decode_charset(&self.decoded_body(), ct.param("charset")))),
            "message/rfc822" => Some(Part::parse(self.body).text()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContentType {
    pub mime: String,
    params: Vec<(String, String)>,
}

impl Default for ContentType {
    fn default() -> Self {
        ContentType {
            mime: "text/plain".into(),
            params: Vec::new(),
        }
    }
}

impl ContentType {
    pub fn parse(value: &str) -> ContentType {
        let mut pieces = split_unquoted(value, ';').into_iter();
        let mime = pieces
            .next()
            .map(|s| s.trim().to_ascii_lowercase())
            .filter(|s| s.contains('/'))
            .unwrap_or_else(|| "text/plain".into());
        let params = pieces
            .filter_map(|p| {
                let (k, v) = p.split_once('=')?;
                Some((k.trim().to_ascii_lowercase(), v.trim().trim_matches('"').to_string()))
            })
            .collect();
        ContentType { mime, params }
    }

    pub fn param(&self, name: &str) -> Option<&str> {
        self.params.iter().find(|(k, _)| k == name).map(|(_, v)| v.as_str())
    }
}

fn split_head(raw: &[u8]) -> (&[u8], &[u8]) {
    let mut i = 0;
    while i < raw.len() {
        let line_end = raw[i..].iter().position(|&b| b == b'\n').map(|p| i + p);
        let Some(end) = line_end else {
            return (raw, &[]);
        };
        let line = &raw[i..end];
        if line.is_empty() || line == b"\r" {
            return (&raw[..i], &raw[end + 1..]);
        }
        i = end + 1;
    }
    (raw, &[])
}

fn unfold_headers(head: &[u8]) -> Vec<(String, String)> {
    let text = String::from_utf8_lossy(head);
    let mut out: Vec<(String, String)> = Vec::new();
    for line in text.lines() {
        if line.starts_with(' ') || line.starts_with('\t') {
            if let Some((_, v)) = out.last_mut() {
                v.push(' ');
                v.push_str(line.trim());
            }
            continue;
        }
        if let Some((k, v)) = line.split_once(':') {
            let k = k.trim();
            if !k.is_empty() && !k.contains(' ') {
                out.push((k.to_string(), v.trim().to_string()));
            }
        }
    }
    out
}

fn split_multipart<'a>(body: &'a [u8], boundary: &str) -> Vec<&'a [u8]> {
    let delim = format!("--{boundary}");
    let delim = delim.as_bytes();
    let mut parts = Vec::new();
    let mut start: Option<usize> = None;
    let mut i = 0;
    while i <= body.len() {
        let end = body[i..].iter().position(|&b| b == b'\n').map_or(body.len(), |p| i + p);
        let line = trim_cr(&body[i..end]);
        if line.starts_with(delim) {
            let rest = &line[delim.len()..];
            if let Some(s) = start {
                // the line break before the delimiter belongs to the delimiter
                let mut e = i;
                if e > s && body[e - 1] == b'\n' {
                    e -= 1;
                    if e > s && body[e - 1] == b'\r' {
                        e -= 1;
                    }
                }
                parts.push(&body[s..e]);
            }
            if rest.starts_with(b"--") {
                return parts;
            }
            start = Some((end + 1).min(body.len()));
        }
        i = end + 1;
    }
    if let Some(s) = start {
        if s < body.len() {
            parts.push(&body[s..]);
        }
    }
    parts
}

fn trim_cr(line: &[u8]) -> &[u8] {
    line.strip_suffix(b"\r").unwrap_or(line)
}

fn decode_base64(body: &[u8]) -> Vec<u8> {
    let cleaned: Vec<u8> = body.iter().copied().filter(|b| !b.is_ascii_whitespace()).collect();
    base64::engine::general_purpose::STANDARD
        .decode(&cleaned)
        .or_else(|_| base64::engine::general_purpose::STANDARD_NO_PAD.decode(&cleaned))
        .unwrap_or_else(|_| body.to_vec())
}

pub fn decode_quoted_printable(body: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(body.len());
    let mut i = 0;
    while i < body.len() {
        let b = body[i];
        if b == b'=' {
            let rest = &body[i + 1..];
            if rest.starts_with(b"\r\n") {
                i += 3;
                continue;
            }
            if rest.starts_with(b"\n") {
                i += 2;
                continue;
            }
            if rest.len() >= 2 {
                if let (Some(h), Some(l)) = (hex_val(rest[0]), hex_val(rest[1])) {
                    out.push(h << 4 | l);
                    i += 3;
                    continue;
                }
            }
        }
        out.push(b);
        i += 1;
    }
    out
}

fn hex_val(b: u8) -> Option<u8> {
    (b as char).to_digit(16).map(|d| d as u8)
}

fn decode_charset(bytes: &[u8], charset: Option<&str>) -> String {
    let label = charset.unwrap_or("utf-8");
    match encoding_rs::Encoding::for_label(label.as_bytes()) {
        Some(enc) => enc.decode(bytes).0.into_owned(),
        None => String::from_utf8_lossy(bytes).into_owned(),
    }
}

/// Decodes RFC 2047 encoded words (`=?utf-8?B?...?=`) inside a header value.
pub fn decode_words(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    let mut rest = value;
    let mut last_was_word = false;
    while let Some(start) = rest.find("=?") {
        let (before, tail) = rest.split_at(start);
        let decoded = parse_word(tail);
        match decoded {
            Some((text, used)) => {
                // whitespace between adjacent encoded words is dropped
                if !(last_was_word && before.trim().is_empty()) {
                    out.push_str(before);
                }
                out.push_str(&text);
                rest = &tail[used..];
                last_was_word = true;
            }
            None => {
                out.push_str(before);
                out.push_str("=?");
                rest = &tail[2..];
                last_was_word = false;
            }
        }
    }
    out.push_str(rest);
    out
}

fn parse_word(s: &str) -> Option<(String, usize)> {
    let inner = s.strip_prefix("=?")?;
    let q1 = inner.find('?')?;
    let charset = &inner[..q1];
    let after = &inner[q1 + 1..];
    let q2 = after.find('?')?;
    let enc = &after[..q2];
    let payload_start = &after[q2 + 1..];
    let end = payload_start.find("?=")?;
    let payload = &payload_start[..end];
    let bytes = match enc.to_ascii_lowercase().as_str() {
        "b" => base64::engine::general_purpose::STANDARD.decode(payload.trim()).ok()?,
        "q" => decode_quoted_printable(payload.replace('_', " ").as_bytes()),
        _ => return None,
    };
    let used = 2 + q1 + 1 + q2 + 1 + end + 2;
    Some((decode_charset(&bytes, Some(charset)), used))
}

/// Splits on `sep` outside double quotes and angle brackets.
pub fn split_unquoted(value: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut in_quote = false;
    let mut angle = 0usize;
    let mut start = 0;
    let mut escaped = false;
    for (i, c) in value.char_indices() {
        if escaped {
            escaped = false;
            continue;
        }
        match c {
            '\\' if in_quote => escaped = true,
            '"' => in_quote = !in_quote,
            '<' if !in_quote => angle += 1,
            '>' if !in_quote => angle = angle.saturating_sub(1),
            c if c == sep && !in_quote && angle == 0 => {
                out.push(&value[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&value[start..]);
    out
}

/// Address list (To/Cc) → raw address strings, group syntax flattened.
pub fn address_list(value: &str) -> Vec<String> {
    let decoded = decode_words(value);
    let mut out = Vec::new();
    for piece in split_unquoted(&decoded, ',') {
        let mut p = piece.trim();
        // `group: a@x, b@y;`
        if !p.contains('<') {
            if let Some((_, after)) = p.split_once(':') {
                if !p.starts_with("mailto:") {
                    p = after.trim();
                }
            }
        }
        let p = p.trim_end_matches(';').trim();
        if !p.is_empty() {
            out.push(p.to_string());
        }
    }
    out
}

/// All `<...>` message ids in a header value, brackets removed.
pub fn message_ids(value: &str) -> Vec<String> {
    let mut ids = Vec::new();
    let mut rest = value;
    while let Some(open) = rest.find('<') {
        let Some(close) = rest[open..].find('>') else {
            break;
        };
        let id = rest[open + 1..open + close].trim();
        if !id.is_empty() {
            ids.push(id.to_string());
        }
        rest = &rest[open + close + 1..];
    }
    if ids.is_empty() {
        // bare ids without brackets
        ids.extend(value.split_whitespace().map(str::to_string));
    }
    ids
}

pub fn html_to_text(html: &str) -> String {
    let mut out = String::with_capacity(html.len());
    let lower = html.to_ascii_lowercase();
    let mut i = 0;
    while i < html.len() {
        let c = html[i..].chars().next().unwrap_or(' ');
        if c == '<' {
            let Some(close) = html[i..].find('>') else {
                break;
            };
            let tag = lower[i + 1..i + close].trim();
            let name: String = tag
                .trim_start_matches('/')
                .chars()
                .take_while(|c| c.is_ascii_alphanumeric())
                .collect();
            if !tag.starts_with('/') && (name == "script" || name == "style") {
                let end_tag = format!("</{name}");
                match lower[i..].find(&end_tag) {
                    Some(p) => {
                        let after = i + p;
                        i = html[after..].find('>').map_or(html.len(), |q| after + q + 1);
                    }
                    None => i = html.len(),
                }
                continue;
            }
            if matches!(
                name.as_str(),
                "br" | "p" | "div" | "li" | "tr" | "h1" | "h2" | "h3" | "h4" | "blockquote"
            ) {
                out.push('\n');
            } else if !matches!(
                name.as_str(),
                "a" | "b" | "i" | "u" | "em" | "strong" | "span" | "font" | "small" | "big" | "sub" | "sup" | "code"
            ) {
                out.push(' ');
            }
            i += close + 1;
        } else if c == '&' {
            let semi = html[i..].find(';').filter(|&p| p <= 10);
            match semi.and_then(|p| decode_entity(&html[i + 1..i + p]).map(|d| (d, p))) {
                Some((decoded, p)) => {
                    out.push(decoded);
                    i += p + 1;
                }
                None => {
                    out.push('&');
                    i += 1;
                }
            }
        } else {
            out.push(c);
            i += c.len_utf8();
        }
    }
    out
}

fn decode_entity(name: &str) -> Option<char> {
    match name {
        "amp" => Some('&'),
        "lt" => Some('<'),
        "gt" => Some('>'),
        "quot" => Some('"'),
        "apos" => Some('\''),
        "nbsp" => Some(' '),
        _ => {
            let num = name.strip_prefix('#')?;
            let code = match num.strip_prefix(['x', 'X']) {
                Some(hex) => u32::from_str_radix(hex, 16).ok()?,
                None => num.parse().ok()?,
            };
            char::from_u32(code)
        }
    }
}
