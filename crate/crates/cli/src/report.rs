use crate::args::Format;
use serde_json::{Map, Value};
use std::collections::BTreeMap;
use std::io::Write;

#[derive(Debug, Clone)]
pub enum Cell {
    Int(String),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}
macro_rules! int_cell {
    ($($t:ty),*) => {$(impl From<$t> for Cell { fn from(v: $t) -> Self { Cell::Int(v.to_string()) } })*};
}
int_cell!(u32, u64, usize, i64, i128, num_bigint::BigInt);

/// Twelve significant digits, fixed notation where that stays short.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    let s = if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        trim_zeros(&s)
    } else {
        let s = format!("{x:.11e}");
        let (mant, e) = s.split_once('e').unwrap();
        format!("{}e{e}", trim_zeros(mant))
    };
    if s == "-0" { "0".into() } else { s }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Int(s) | Cell::Text(s) => s.clone(),
            Cell::Float(v) => fmt_float(*v),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(s) => s.parse::<i64>().map(Value::from).unwrap_or_else(|_| Value::String(s.clone())),
            Cell::Float(v) => {
                let r: f64 = fmt_float(*v).parse().unwrap_or(*v);
                serde_json::Number::from_f64(r).map(Value::Number).unwrap_or(Value::Null)
            }
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub suite: String,
    pub config: BTreeMap<String, String>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(suite: &str, columns: &[&'static str]) -> Self {
        Self {
            suite: suite.into(),
            config: BTreeMap::new(),
            columns: columns.to_vec(),
            rows: Vec::new(),
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.config.insert(key.into(), value.to_string());
        self
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    /// Records a failure unless `ok`.
    pub fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_csv(&self) -> std::io::Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::text))?;
        }
        w.into_inner().map_err(|e| e.into_error())
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut m = Map::new();
                for (c, v) in self.columns.iter().zip(r) {
                    m.insert(c.to_string(), v.json());
                }
                Value::Object(m)
            })
            .collect();
        serde_json::json!({
            "suite": self.suite,
            "version": env!("CARGO_PKG_VERSION"),
            "config": self.config,
            "columns": self.columns,
            "rows": rows,
            "passed": self.passed(),
            "failures": self.failures,
            "notes": self.notes,
        })
    }

    pub fn render(&self, format: Format) -> std::io::Result<Vec<u8>> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => {
                let mut s = serde_json::to_vec_pretty(&self.to_json())?;
                s.push(b'\n');
                Ok(s)
            }
        }
    }

    /// Failure list for stderr when the report itself is CSV.
    pub fn failure_summary(&self) -> String {
        serde_json::json!({ "suite": self.suite, "failures": self.failures }).to_string()
    }

    pub fn write_to(&self, out: Option<&std::path::Path>, format: Format) -> std::io::Result<()> {
        let bytes = self.render(format)?;
        match out {
            Some(p) => std::fs::write(p, bytes),
            None => std::io::stdout().write_all(&bytes),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(fmt_float(std::f64::consts::PI), "3.14159265359");
        assert_eq!(fmt_float(179.59438003021648), "179.59438003");
        assert_eq!(fmt_float(0.5), "0.5");
        assert_eq!(fmt_float(3.0), "3");
        assert_eq!(fmt_float(-2.5e-9), "-2.5e-9");
        assert_eq!(fmt_float(6.02214076e23), "6.02214076e23");
        assert_eq!(fmt_float(1e-12), "1e-12");
        assert_eq!(fmt_float(0.0001234), "0.000123400000000".trim_end_matches('0'));
    }

    #[test]
    fn csv_and_json() {
        let mut r = Report::new("demo", &["a", "b", "pass"]);
        r.row(vec![1u64.into(), 0.25.into(), true.into()]);
        let csv = String::from_utf8(r.to_csv().unwrap()).unwrap();
        assert_eq!(csv, "a,b,pass\n1,0.25,true\n");
        let j = r.to_json();
        assert_eq!(j["rows"][0]["b"], serde_json::json!(0.25));
        assert_eq!(j["passed"], serde_json::json!(true));
    }
}
