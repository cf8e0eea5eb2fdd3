//! Plain-text result files.
//!
//! Every file is a TOML document whose first line names its schema. Floats
//! are written with 17 significant digits so that parsing returns the exact
//! value that was written.

use toml::{Table, Value};

use crate::error::{CliError, CliResult};

pub const POVM_SCHEMA: &str = "xyjoint.povm/1";
pub const COUNTS_SCHEMA: &str = "xyjoint.counts/1";
pub const MANIFEST_SCHEMA: &str = "xyjoint.manifest/1";
pub const REPORT_SCHEMA: &str = "xyjoint.report/1";
pub const KD_SCHEMA: &str = "xyjoint.kd/1";
pub const VERIFY_SCHEMA: &str = "xyjoint.verify/1";

/// Float with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn fmt_str(s: &str) -> String {
    Value::String(s.to_owned()).to_string()
}

fn fmt_list<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    let parts: Vec<String> = items.iter().map(f).collect();
    format!("[{}]", parts.join(", "))
}

/// Line-oriented document builder.
#[derive(Debug)]
pub struct Document {
    out: String,
}

impl Document {
    pub fn new(schema: &str) -> Self {
        let mut doc = Document { out: String::new() };
        doc.str("schema", schema);
        doc
    }

    fn line(&mut self, key: &str, value: String) {
        self.out.push_str(key);
        self.out.push_str(" = ");
        self.out.push_str(&value);
        self.out.push('\n');
    }

    pub fn section(&mut self, name: &str) {
        self.out.push_str(&format!("\n[{name}]\n"));
    }

    pub fn array_section(&mut self, name: &str) {
        self.out.push_str(&format!("\n[[{name}]]\n"));
    }

    pub fn str(&mut self, key: &str, value: &str) {
        self.line(key, fmt_str(value));
    }

    pub fn int(&mut self, key: &str, value: u64) {
        self.line(key, value.to_string());
    }

    pub fn float(&mut self, key: &str, value: f64) {
        self.line(key, fmt_float(value));
    }

    pub fn bool(&mut self, key: &str, value: bool) {
        self.line(key, value.to_string());
    }

    pub fn strs<S: AsRef<str>>(&mut self, key: &str, values: &[S]) {
        self.line(key, fmt_list(values, |s| fmt_str(s.as_ref())));
    }

    pub fn ints(&mut self, key: &str, values: &[u64]) {
        self.line(key, fmt_list(values, |v| v.to_string()));
    }

    pub fn floats(&mut self, key: &str, values: &[f64]) {
        self.line(key, fmt_list(values, |v| fmt_float(*v)));
    }

    pub fn finish(self) -> String {
        self.out
    }
}

/// A parsed document with typed, error-reporting accessors.
#[derive(Debug)]
pub struct Parsed {
    table: Table,
    origin: String,
}

impl Parsed {
    pub fn parse(text: &str, schema: &str, origin: &str) -> CliResult<Self> {
        let table: Table = text
            .parse()
            .map_err(|e: toml::de::Error| CliError::format(origin, e.message().to_owned()))?;
        let parsed = Parsed { table, origin: origin.to_owned() };
        let found = parsed.root().str("schema")?.to_owned();
        if found != schema {
            return Err(CliError::format(origin, format!("expected schema {schema}, found {found}")));
        }
        Ok(parsed)
    }

    pub fn root(&self) -> Section<'_> {
        Section { table: &self.table, name: String::new(), origin: &self.origin }
    }

    pub fn has(&self, name: &str) -> bool {
        self.table.contains_key(name)
    }

    pub fn section(&self, name: &str) -> CliResult<Section<'_>> {
        match self.table.get(name) {
            Some(Value::Table(t)) => Ok(Section { table: t, name: name.to_owned(), origin: &self.origin }),
            _ => Err(CliError::format(&self.origin, format!("missing section [{name}]"))),
        }
    }

    pub fn origin(&self) -> &str {
        &self.origin
    }
}

#[derive(Debug, Clone)]
pub struct Section<'a> {
    table: &'a Table,
    name: String,
    origin: &'a str,
}

impl Section<'_> {
    fn err(&self, key: &str, what: &str) -> CliError {
        let path = if self.name.is_empty() { key.to_owned() } else { format!("{}.{key}", self.name) };
        CliError::format(self.origin, format!("{path}: {what}"))
    }

    fn value(&self, key: &str) -> CliResult<&Value> {
        self.table.get(key).ok_or_else(|| self.err(key, "missing"))
    }

    pub fn has(&self, key: &str) -> bool {
        self.table.contains_key(key)
    }

    pub fn str(&self, key: &str) -> CliResult<&str> {
        self.value(key)?.as_str().ok_or_else(|| self.err(key, "expected a string"))
    }

    pub fn bool(&self, key: &str) -> CliResult<bool> {
        self.value(key)?.as_bool().ok_or_else(|| self.err(key, "expected a boolean"))
    }

    pub fn u64(&self, key: &str) -> CliResult<u64> {
        as_u64(self.value(key)?).ok_or_else(|| self.err(key, "expected a non-negative integer"))
    }

    pub fn f64(&self, key: &str) -> CliResult<f64> {
        as_f64(self.value(key)?).ok_or_else(|| self.err(key, "expected a number"))
    }

    fn array(&self, key: &str) -> CliResult<&Vec<Value>> {
        self.value(key)?.as_array().ok_or_else(|| self.err(key, "expected an array"))
    }

    pub fn strs(&self, key: &str) -> CliResult<Vec<String>> {
        self.array(key)?
            .iter()
            .map(|v| v.as_str().map(str::to_owned).ok_or_else(|| self.err(key, "expected strings")))
            .collect()
    }

    pub fn u64s(&self, key: &str) -> CliResult<Vec<u64>> {
        self.array(key)?
            .iter()
            .map(|v| as_u64(v).ok_or_else(|| self.err(key, "expected non-negative integers")))
            .collect()
    }

    pub fn f64s(&self, key: &str) -> CliResult<Vec<f64>> {
        self.array(key)?
            .iter()
            .map(|v| as_f64(v).ok_or_else(|| self.err(key, "expected numbers")))
            .collect()
    }

    pub fn f64s_n<const N: usize>(&self, key: &str) -> CliResult<[f64; N]> {
        let v = self.f64s(key)?;
        let found = v.len();
        v.try_into().map_err(|_| self.err(key, &format!("expected {N} entries, found {found}")))
    }
}

fn as_u64(v: &Value) -> Option<u64> {
    v.as_integer().and_then(|i| u64::try_from(i).ok())
}

fn as_f64(v: &Value) -> Option<f64> {
    v.as_float().or_else(|| v.as_integer().map(|i| i as f64))
}
