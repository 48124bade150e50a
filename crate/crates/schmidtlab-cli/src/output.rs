//! Deterministic serialization: fixed 17-significant-digit float formatting,
//! insertion-ordered JSON, RFC-4180-style CSV with '\n' endings, and the run
//! manifest (command, resolved parameters, version, payload checksum).

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

/// Canonical float rendering: 17 significant digits, scientific notation,
/// locale-independent. Used for every numeric value in CSV and JSON alike.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Insertion-ordered JSON value; keys are emitted exactly as inserted so
/// identical inputs give byte-identical documents.
#[derive(Debug, Clone)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(String, Json)>),
}

impl Json {
    pub fn obj() -> Self {
        Json::Obj(Vec::new())
    }

    pub fn push(&mut self, key: &str, value: Json) -> &mut Self {
        match self {
            Json::Obj(fields) => fields.push((key.to_string(), value)),
            _ => unreachable!("push on non-object"),
        }
        self
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write_to(&mut out);
        out
    }

    fn write_to(&self, out: &mut String) {
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(i) => {
                let _ = write!(out, "{i}");
            }
            // JSON has no literal for non-finite floats; emit null.
            Json::Num(v) if !v.is_finite() => out.push_str("null"),
            Json::Num(v) => out.push_str(&fmt_f64(*v)),
            Json::Str(s) => {
                out.push('"');
                for c in s.chars() {
                    match c {
                        '"' => out.push_str("\\\""),
                        '\\' => out.push_str("\\\\"),
                        '\n' => out.push_str("\\n"),
                        '\t' => out.push_str("\\t"),
                        '\r' => out.push_str("\\r"),
                        c if (c as u32) < 0x20 => {
                            let _ = write!(out, "\\u{:04x}", c as u32);
                        }
                        c => out.push(c),
                    }
                }
                out.push('"');
            }
            Json::Arr(items) => {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    item.write_to(out);
                }
                out.push(']');
            }
            Json::Obj(fields) => {
                out.push('{');
                for (i, (k, v)) in fields.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    Json::Str(k.clone()).write_to(out);
                    out.push(':');
                    v.write_to(out);
                }
                out.push('}');
            }
        }
    }
}

pub fn units(pairs: &[(&str, &str)]) -> Json {
    let mut u = Json::obj();
    for (k, v) in pairs {
        u.push(k, Json::Str((*v).to_string()));
    }
    u
}

/// Manifest binding an output to the command, its fully resolved parameters,
/// the library version, and a SHA-256 checksum of the payload bytes.
pub fn manifest(command: &str, params: Json, payload: &[u8]) -> Json {
    let digest = Sha256::digest(payload);
    let mut hex = String::with_capacity(64);
    for b in digest {
        let _ = write!(hex, "{b:02x}");
    }
    let mut m = Json::obj();
    m.push("command", Json::Str(command.to_string()));
    m.push("params", params);
    m.push("version", Json::Str(env!("CARGO_PKG_VERSION").to_string()));
    m.push("output_checksum", Json::Str(format!("sha256:{hex}")));
    m
}

/// Assemble the standard JSON document: payload fields first, then the units
/// map, then the manifest (whose checksum covers the payload-only render).
pub fn json_document(command: &str, params: Json, payload: Json, unit_map: Json) -> String {
    let payload_bytes = payload.render();
    let man = manifest(command, params, payload_bytes.as_bytes());
    let mut doc = Json::obj();
    if let Json::Obj(fields) = payload {
        for (k, v) in fields {
            doc.push(&k, v);
        }
    }
    doc.push("units", unit_map);
    doc.push("manifest", man);
    let mut text = doc.render();
    text.push('\n');
    text
}

/// One CSV table: header plus rows, '\n' endings, fields quoted only when
/// RFC 4180 requires it.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut csv = Csv { text: String::new() };
        csv.push_raw(header);
        csv
    }

    fn quote(field: &str) -> String {
        if field.contains([',', '"', '\n']) {
            format!("\"{}\"", field.replace('"', "\"\""))
        } else {
            field.to_string()
        }
    }

    fn push_raw(&mut self, fields: &[&str]) {
        let line: Vec<String> = fields.iter().map(|f| Self::quote(f)).collect();
        self.text.push_str(&line.join(","));
        self.text.push('\n');
    }

    pub fn row(&mut self, fields: &[String]) {
        let refs: Vec<&str> = fields.iter().map(String::as_str).collect();
        self.push_raw(&refs);
    }

    pub fn into_text(self) -> String {
        self.text
    }
}

/// Write a finished document to `--out` or stdout. For CSV the manifest
/// cannot be embedded, so it goes to a `<out>.manifest.json` sidecar (or to
/// stderr when writing to stdout).
pub fn write_output(
    out: Option<&Path>,
    body: &str,
    csv_manifest: Option<&Json>,
) -> Result<(), String> {
    match out {
        Some(path) => {
            std::fs::write(path, body).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            if let Some(man) = csv_manifest {
                let side = format!("{}.manifest.json", path.display());
                std::fs::write(&side, man.render() + "\n")
                    .map_err(|e| format!("cannot write {side}: {e}"))?;
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .map_err(|e| format!("stdout write failed: {e}"))?;
            if let Some(man) = csv_manifest {
                let mut stderr = std::io::stderr().lock();
                let _ = writeln!(stderr, "{}", man.render());
            }
        }
    }
    Ok(())
}
