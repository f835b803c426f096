use std::io::Write;

use crate::args::Format;

/// A single value in an output record.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Str(String),
    Int(i64),
    /// A non-negative integer of any size, printed in decimal.
    Digits(String),
    Float(f64),
    Bool(bool),
    Null,
}

impl Field {
    fn csv(&self) -> String {
        match self {
            Field::Str(s) | Field::Digits(s) => s.clone(),
            Field::Int(i) => i.to_string(),
            Field::Float(x) => format_float(*x).unwrap_or_default(),
            Field::Bool(b) => b.to_string(),
            Field::Null => String::new(),
        }
    }

    fn json(&self) -> String {
        match self {
            Field::Str(s) => json_string(s),
            Field::Int(i) => i.to_string(),
            Field::Digits(s) => s.clone(),
            Field::Float(x) => format_float(*x).unwrap_or_else(|| "null".into()),
            Field::Bool(b) => b.to_string(),
            Field::Null => "null".into(),
        }
    }
}

/// 17 significant digits, enough to round-trip any finite `f64`.
pub fn format_float(x: f64) -> Option<String> {
    x.is_finite().then(|| format!("{x:.16e}"))
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Fields in emission order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record {
    fields: Vec<(&'static str, Field)>,
}

impl Record {
    pub fn new() -> Self {
        Record::default()
    }

    pub fn with(mut self, key: &'static str, value: Field) -> Self {
        self.push(key, value);
        self
    }

    pub fn push(&mut self, key: &'static str, value: Field) {
        debug_assert!(self.get(key).is_none(), "duplicate field {key}");
        self.fields.push((key, value));
    }

    pub fn get(&self, key: &str) -> Option<&Field> {
        self.fields.iter().find(|(k, _)| *k == key).map(|(_, v)| v)
    }

    pub fn keys(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.fields.iter().map(|(k, _)| *k)
    }

    pub fn to_json(&self) -> String {
        let body: Vec<String> = self
            .fields
            .iter()
            .map(|(k, v)| format!("{}:{}", json_string(k), v.json()))
            .collect();
        format!("{{{}}}", body.join(","))
    }
}

pub fn write_records<W: Write>(out: W, format: Format, records: &[Record]) -> std::io::Result<()> {
    match format {
        Format::Json => {
            let mut out = out;
            for r in records {
                writeln!(out, "{}", r.to_json())?;
            }
            out.flush()
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            if let Some(first) = records.first() {
                w.write_record(first.keys())?;
            }
            for r in records {
                w.write_record(r.fields.iter().map(|(_, v)| v.csv()))?;
            }
            w.flush()
        }
    }
}
