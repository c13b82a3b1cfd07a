//! CSV output: comma separated, `\n` line endings, header always present,
//! `#` summary lines after the body, numbers with 12 significant digits.

use std::io::Write;
use std::path::Path;

/// 12 significant digits, fixed notation where it stays short, trailing zeros trimmed.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.11e}", x);
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if !(-5..12).contains(&exp) {
        let mant = trim(mant);
        return format!("{mant}e{exp}");
    }
    let decimals = (11 - exp).max(0) as usize;
    let fixed = format!("{:.*}", decimals, x);
    let t = trim(&fixed);
    if t == "-0" { "0".into() } else { t.to_string() }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn flag(b: bool) -> String {
    if b { "true" } else { "false" }.into()
}

pub fn opt_flag(b: Option<bool>) -> String {
    b.map(flag).unwrap_or_default()
}

pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    summary: Vec<(String, String)>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
            summary: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn summary(&mut self, key: &str, value: String) {
        self.summary.push((key.to_string(), value));
    }

    pub fn render(&self) -> Result<Vec<u8>, String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header).map_err(|e| e.to_string())?;
        for r in &self.rows {
            w.write_record(r).map_err(|e| e.to_string())?;
        }
        let mut buf = w.into_inner().map_err(|e| e.to_string())?;
        for (k, v) in &self.summary {
            writeln!(buf, "#{k}={v}").map_err(|e| e.to_string())?;
        }
        Ok(buf)
    }

    pub fn emit(&self, out: Option<&Path>) -> Result<(), String> {
        let bytes = self.render()?;
        match out {
            Some(p) => std::fs::write(p, bytes).map_err(|e| format!("cannot write {}: {e}", p.display())),
            None => std::io::stdout().write_all(&bytes).map_err(|e| e.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(num(1.0), "1");
        assert_eq!(num(2.0), "2");
        assert_eq!(num(0.0), "0");
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(1.0 / 3.0), "0.333333333333");
        assert_eq!(num(123456.7890123456), "123456.789012");
        assert_eq!(num(1e-7), "1e-7");
        assert_eq!(num(-2.5e-12), "-2.5e-12");
        assert_eq!(num(1.23e15), "1.23e15");
        assert_eq!(num(0.99999999999999), "1");
        assert_eq!(num(-1.0e-17), "-1e-17");
    }

    #[test]
    fn table_layout() {
        let mut t = Table::new(&["a", "b"]);
        t.row(vec![num(0.5), flag(true)]);
        t.summary("total", num(1.0));
        assert_eq!(String::from_utf8(t.render().unwrap()).unwrap(), "a,b\n0.5,true\n#total=1\n");
        let empty = Table::new(&["x"]);
        assert_eq!(empty.render().unwrap(), b"x\n");
    }
}
