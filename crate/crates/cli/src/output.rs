//! Certificate assembly and JSON output with 17 significant digits.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Pretty printer that writes every double as `d.dddddddddddddddde±x`.
struct FullPrecision<'a>(PrettyFormatter<'a>);

impl Formatter for FullPrecision<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecision(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("in-memory serialization cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

pub fn json<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("certificate parts serialize")
}

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub detail: Value,
}

#[derive(Debug, Serialize)]
pub struct Verification {
    pub all_pass: bool,
    pub checks: Vec<Check>,
}

#[derive(Debug, Serialize)]
pub struct Certificate {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub arguments: Value,
    pub input_digest: String,
    pub results: Value,
    pub verification: Verification,
}

/// Collects results and checks for one command run.
pub struct Report {
    command: String,
    arguments: Value,
    digest: Sha256,
    results: serde_json::Map<String, Value>,
    checks: Vec<Check>,
}

impl Report {
    pub fn new(command: &str, arguments: Value) -> Self {
        let mut digest = Sha256::new();
        digest.update(command.as_bytes());
        digest.update([0]);
        digest.update(arguments.to_string().as_bytes());
        Report { command: command.to_string(), arguments, digest, results: serde_json::Map::new(), checks: Vec::new() }
    }

    pub fn digest_input(&mut self, bytes: &[u8]) {
        self.digest.update([0]);
        self.digest.update(bytes);
    }

    pub fn result(&mut self, key: &str, value: Value) {
        self.results.insert(key.to_string(), value);
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool, detail: Value) {
        self.checks.push(Check { name: name.into(), pass, detail });
    }

    /// Records the outcome of a library verification, keeping the error text
    /// (and with it the violating tuple) on failure.
    pub fn check_result<T>(&mut self, name: impl Into<String>, r: &hext_core::Result<T>) {
        match r {
            Ok(_) => self.check(name, true, Value::Null),
            Err(e) => self.check(name, false, Value::String(e.to_string())),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn finish(self) -> Certificate {
        let all_pass = self.checks.iter().all(|c| c.pass);
        Certificate {
            tool: "hext",
            version: env!("CARGO_PKG_VERSION"),
            command: self.command,
            arguments: self.arguments,
            input_digest: format!("sha256:{}", hex::encode(self.digest.finalize())),
            results: Value::Object(self.results),
            verification: Verification { all_pass, checks: self.checks },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubles_round_trip_through_seventeen_digits() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 14641.625, 1e22] {
            let s = to_json(&v);
            assert_eq!(s.trim().parse::<f64>().unwrap(), v);
            let back: f64 = serde_json::from_str(&s).unwrap();
            assert_eq!(back, v);
        }
        assert_eq!(to_json(&1.0).trim(), "1.0000000000000000e0");
    }

    #[test]
    fn digest_depends_on_input() {
        let mut a = Report::new("check", Value::Null);
        a.digest_input(b"x");
        let mut b = Report::new("check", Value::Null);
        b.digest_input(b"y");
        assert_ne!(a.finish().input_digest, b.finish().input_digest);
    }
}
