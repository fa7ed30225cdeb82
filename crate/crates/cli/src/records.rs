use std::fmt::Write;

use rootstack_core::algebra::{format_rational, parse_rational, Rational};

use crate::config::Format;
use crate::CliError;

/// One line of output: key components followed by an exact value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Record {
    pub fields: Vec<String>,
    pub value: Rational,
}

impl Record {
    pub fn new<S: Into<String>>(fields: impl IntoIterator<Item = S>, value: Rational) -> Self {
        Record {
            fields: fields.into_iter().map(Into::into).collect(),
            value,
        }
    }
}

/// The output of one command.
#[derive(Clone, Debug)]
pub struct Report {
    pub title: String,
    pub columns: Vec<&'static str>,
    pub records: Vec<Record>,
    pub notes: Vec<String>,
    pub pass: bool,
}

impl Report {
    pub fn new(title: impl Into<String>, columns: Vec<&'static str>) -> Self {
        Report {
            title: title.into(),
            columns,
            records: Vec::new(),
            notes: Vec::new(),
            pass: true,
        }
    }

    pub fn push<S: Into<String>>(&mut self, fields: impl IntoIterator<Item = S>, value: Rational) {
        self.records.push(Record::new(fields, value));
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Table => self.render_table(),
            Format::Records => render_records(&self.records),
        }
    }

    fn render_table(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .records
            .iter()
            .map(|r| {
                let mut row = r.fields.clone();
                row.push(table_rational(&r.value));
                row
            })
            .collect();
        let ncols = rows.iter().map(Vec::len).chain([self.columns.len()]).max().unwrap_or(0);
        let mut widths = vec![0; ncols];
        for row in rows
            .iter()
            .chain(std::iter::once(&self.columns.iter().map(|c| c.to_string()).collect()))
        {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}", w = *w))
                .collect();
            padded.join("  ").trim_end().to_string()
        };
        let mut out = String::new();
        writeln!(out, "# {}", self.title).unwrap();
        let header: Vec<String> = self.columns.iter().map(|c| c.to_string()).collect();
        writeln!(out, "{}", line(&header)).unwrap();
        for row in &rows {
            writeln!(out, "{}", line(row)).unwrap();
        }
        for n in &self.notes {
            writeln!(out, "note: {n}").unwrap();
        }
        writeln!(out, "status: {}", if self.pass { "PASS" } else { "FAIL" }).unwrap();
        out
    }
}

fn table_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format_rational(q)
    }
}

/// Tab-separated records, one per LF-terminated line, value last as `n/d`.
pub fn render_records(records: &[Record]) -> String {
    let mut out = String::new();
    for r in records {
        for f in &r.fields {
            out.push_str(f);
            out.push('\t');
        }
        out.push_str(&format_rational(&r.value));
        out.push('\n');
    }
    out
}

/// Inverse of [`render_records`].
pub fn parse_records(text: &str) -> Result<Vec<Record>, CliError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(n, line)| {
            let mut fields: Vec<String> = line.split('\t').map(str::to_string).collect();
            let last = fields.pop().unwrap_or_default();
            let value = parse_rational(&last)
                .ok_or_else(|| CliError::Config(format!("line {}: invalid rational {last:?}", n + 1)))?;
            Ok(Record { fields, value })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rootstack_core::algebra::{int, ratio};

    #[test]
    fn records_round_trip() {
        let records = vec![
            Record::new(["term", "1", "-2"], ratio(-3, 4)),
            Record::new(["period", "regularized", "6"], int(90)),
            Record::new(Vec::<String>::new(), int(0)),
        ];
        let text = render_records(&records);
        assert_eq!(text, "term\t1\t-2\t-3/4\nperiod\tregularized\t6\t90/1\n0/1\n");
        assert_eq!(parse_records(&text).unwrap(), records);
        assert!(parse_records("a\t0.5\n").is_err());
    }

    #[test]
    fn table_layout() {
        let mut r = Report::new("demo", vec!["m", "value"]);
        r.push(["3"], int(6));
        r.push(["10"], ratio(1, 8));
        r.notes.push("hello".into());
        let t = r.render(Format::Table);
        assert_eq!(t, "# demo\nm   value\n3   6\n10  1/8\nnote: hello\nstatus: PASS\n");
    }
}
