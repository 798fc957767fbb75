use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

use crate::error::CliError;

/// Pretty JSON with every float written as `d.dddddddddddddddde±x`
/// (17 significant digits, exact round trip).
struct SciFormatter<'a>(PrettyFormatter<'a>);

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*)),* $(,)?) => {
        $(
            fn $name<W: ?Sized + Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
                self.0.$name(w $(, $arg)*)
            }
        )*
    };
}

impl Formatter for SciFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    delegate! {
        begin_array(),
        end_array(),
        begin_array_value(first: bool),
        end_array_value(),
        begin_object(),
        end_object(),
        begin_object_key(first: bool),
        begin_object_value(),
        end_object_value(),
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut buf = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut buf, SciFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

/// One asserted quantity.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// `"<="`, `">="` or `">"`.
    pub relation: &'static str,
    pub limit: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self::build(name, value, "<=", limit, value <= limit)
    }

    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self::build(name, value, ">=", limit, value >= limit)
    }

    pub fn above(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self::build(name, value, ">", limit, value > limit)
    }

    fn build(
        name: impl Into<String>,
        value: f64,
        relation: &'static str,
        limit: f64,
        pass: bool,
    ) -> Self {
        Self {
            name: name.into(),
            value,
            relation,
            limit,
            pass,
        }
    }
}

/// Plot-ready rows for CSV output.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

/// What a subcommand produced, before framing.
#[derive(Debug)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub result: Value,
    pub table: Option<Table>,
}

impl Outcome {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Serialize)]
struct Record<'a> {
    command: &'a str,
    version: &'a str,
    config: &'a Value,
    pass: bool,
    checks: &'a [Check],
    result: &'a Value,
    timestamp: String,
}

pub fn render_json(command: &str, config: &Value, outcome: &Outcome) -> Result<String, CliError> {
    to_json(&Record {
        command,
        version: env!("CARGO_PKG_VERSION"),
        config,
        pass: outcome.pass(),
        checks: &outcome.checks,
        result: &outcome.result,
        timestamp: chrono::Utc::now().to_rfc3339(),
    })
}

fn csv_number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        String::new()
    }
}

pub fn render_csv(outcome: &Outcome) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    match &outcome.table {
        Some(t) => {
            w.write_record(&t.columns)?;
            for row in &t.rows {
                w.write_record(row.iter().map(|&v| csv_number(v)))?;
            }
        }
        None => {
            w.write_record(["check", "value", "relation", "limit", "pass"])?;
            for c in &outcome.checks {
                w.write_record([
                    c.name.clone(),
                    csv_number(c.value),
                    c.relation.to_string(),
                    csv_number(c.limit),
                    c.pass.to_string(),
                ])?;
            }
        }
    }
    let bytes = w
        .into_inner()
        .map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("CSV cells are UTF-8"))
}

pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        let v = vec![0.1, 1.0 / 3.0, -2.5e-300, 6.02e23];
        let text = to_json(&v).unwrap();
        assert!(text.contains("1.0000000000000001e-1"), "{text}");
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn csv_checks_fallback() {
        let o = Outcome {
            checks: vec![Check::at_most("x", 0.5, 1.0)],
            result: Value::Null,
            table: None,
        };
        assert_eq!(
            render_csv(&o).unwrap(),
            "check,value,relation,limit,pass\nx,5.0000000000000000e-1,<=,1.0000000000000000e0,true\n"
        );
    }
}
