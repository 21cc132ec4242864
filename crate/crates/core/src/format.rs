//! Key-value text format shared by series files and CLI config files.
//!
//! ```text
//! # comment (anything after '#' is ignored)
//! kind = explicit          # header entry
//! n = 3
//! 1  1.0  1.0  0.0         # record: index lambda re im
//! 2  1.5  0.5,-0.25        # complex as "re,im"
//! 3  2.0  -1               # bare real, imaginary part 0
//! [inner]                  # starts a named section
//! kind = log2
//! n = 2
//! coeff = 1 0.5,0.5        # builtin kinds: coefficient list, or records "index re im"
//! ```
//!
//! Builtin kinds are `identity`, `log2`, `natural-log`, `affine` (keys `c`, `d`)
//! and `jittered` (key `seed`).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::series::{
    validate, APSeries, CoeffSeq, DilatedSeries, FrequencyKind, FrequencySeq, Usage,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub fields: Vec<String>,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Section {
    pub name: Option<String>,
    pub line: usize,
    pub entries: Vec<Entry>,
    pub records: Vec<Record>,
}

impl Section {
    fn is_empty(&self) -> bool {
        self.entries.is_empty() && self.records.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }
}

/// A parsed document: an unnamed leading section followed by named ones.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub sections: Vec<Section>,
}

impl Document {
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections = vec![Section::default()];
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .map(str::trim)
                    .filter(|n| !n.is_empty())
                    .ok_or_else(|| Error::parse(line, format!("malformed section header '{content}'")))?;
                if sections.iter().any(|s| s.name.as_deref() == Some(name)) {
                    return Err(Error::parse(line, format!("duplicate section '{name}'")));
                }
                sections.push(Section {
                    name: Some(name.to_string()),
                    line,
                    ..Section::default()
                });
                continue;
            }
            let current = sections.last_mut().expect("at least one section");
            if let Some((key, value)) = content.split_once('=') {
                let key = key.trim();
                if !is_key(key) {
                    return Err(Error::parse(line, format!("invalid key '{key}'")));
                }
                if current.get(key).is_some() {
                    return Err(Error::parse(line, format!("duplicate key '{key}'")));
                }
                current.entries.push(Entry {
                    key: key.to_string(),
                    value: value.trim().to_string(),
                    line,
                });
            } else {
                current.records.push(Record {
                    fields: content.split_whitespace().map(str::to_string).collect(),
                    line,
                });
            }
        }
        Ok(Self { sections })
    }

    /// Named section, or the leading unnamed one (falling back to the first
    /// named section when the leading one is empty).
    pub fn section(&self, name: Option<&str>) -> Result<&Section> {
        match name {
            Some(n) => self
                .sections
                .iter()
                .find(|s| s.name.as_deref() == Some(n))
                .ok_or_else(|| Error::parse(0, format!("no section named '{n}'"))),
            None => {
                let first = &self.sections[0];
                if first.is_empty() {
                    self.sections
                        .get(1)
                        .ok_or_else(|| Error::parse(0, "empty document"))
                } else {
                    Ok(first)
                }
            }
        }
    }
}

fn is_key(key: &str) -> bool {
    let mut chars = key.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

pub fn parse_real(token: &str, line: usize, what: &str) -> Result<f64> {
    token
        .parse::<f64>()
        .map_err(|_| Error::parse(line, format!("{what}: cannot parse '{token}' as a number")))
}

fn parse_uint(token: &str, line: usize, what: &str) -> Result<u64> {
    token
        .parse::<u64>()
        .map_err(|_| Error::parse(line, format!("{what}: cannot parse '{token}' as an integer")))
}

/// `re,im` or a bare real.
pub fn parse_complex(token: &str, line: usize, what: &str) -> Result<Complex64> {
    match token.split_once(',') {
        Some((re, im)) => Ok(Complex64::new(
            parse_real(re.trim(), line, what)?,
            parse_real(im.trim(), line, what)?,
        )),
        None => Ok(Complex64::new(parse_real(token, line, what)?, 0.0)),
    }
}

/// Flat `key = value` config. Records and sections are rejected.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let doc = Document::parse(text)?;
    if let Some(s) = doc.sections.get(1) {
        return Err(Error::parse(s.line, "config files take no sections"));
    }
    let top = &doc.sections[0];
    if let Some(r) = top.records.first() {
        return Err(Error::parse(r.line, "expected 'key = value'"));
    }
    Ok(top
        .entries
        .iter()
        .map(|e| (e.key.clone(), e.value.clone()))
        .collect())
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Load and validate a series (plain usage: frequencies must be >= 0).
pub fn load_series(path: impl AsRef<Path>, section: Option<&str>) -> Result<APSeries> {
    load_series_for(path, section, Usage::Plain)
}

pub fn load_series_for(
    path: impl AsRef<Path>,
    section: Option<&str>,
    usage: Usage,
) -> Result<APSeries> {
    let text = read_file(path.as_ref())?;
    parse_series(&text, section, usage)
}

/// Dilated series from a file with `[outer]` and `[inner]` sections.
pub fn load_dilated(path: impl AsRef<Path>) -> Result<DilatedSeries> {
    let text = read_file(path.as_ref())?;
    parse_dilated(&text)
}

pub fn parse_dilated(text: &str) -> Result<DilatedSeries> {
    let outer = parse_series(text, Some("outer"), Usage::DilationOuter)?;
    let inner = parse_series(text, Some("inner"), Usage::DilationInner)?;
    Ok(DilatedSeries::from_series(outer, inner))
}

pub fn parse_series(text: &str, section: Option<&str>, usage: Usage) -> Result<APSeries> {
    let doc = Document::parse(text)?;
    let sec = doc.section(section)?;
    let series = series_from_section(sec)?;

    // Map validation findings back to file lines.
    if let Some(d) = validate(&series, usage).into_iter().next() {
        let line = d
            .index
            .and_then(|i| sec.records.get(i - 1))
            .map(|r| r.line)
            .unwrap_or(sec.line);
        let field = format!("line {line}: {}", d.field);
        return Err(match (d.message.as_str(), d.index) {
            ("negative frequency" | "frequency < 1", Some(i)) => {
                Error::range(field, series.lambdas()[i - 1], d.message)
            }
            _ => Error::invariant(field, d.message),
        });
    }
    Ok(series)
}

fn series_from_section(sec: &Section) -> Result<APSeries> {
    let kind_entry = sec
        .get("kind")
        .ok_or_else(|| Error::parse(sec.line, "missing 'kind'"))?;
    for e in &sec.entries {
        if !matches!(e.key.as_str(), "kind" | "n" | "seed" | "c" | "d" | "coeff") {
            return Err(Error::parse(e.line, format!("unknown key '{}'", e.key)));
        }
    }
    let n = match sec.get("n") {
        Some(e) => Some(parse_uint(&e.value, e.line, "n")? as usize),
        None => None,
    };
    let real_key = |key: &str, default: f64| -> Result<f64> {
        match sec.get(key) {
            Some(e) => parse_real(&e.value, e.line, key),
            None => Ok(default),
        }
    };
    let kind = match kind_entry.value.as_str() {
        "explicit" => FrequencyKind::Explicit,
        "identity" => FrequencyKind::Identity,
        "log2" => FrequencyKind::Log2,
        "natural-log" | "ln" => FrequencyKind::NaturalLog,
        "affine" => FrequencyKind::Affine {
            c: real_key("c", 1.0)?,
            d: real_key("d", 0.0)?,
        },
        "jittered" => {
            let e = sec
                .get("seed")
                .ok_or_else(|| Error::parse(kind_entry.line, "jittered kind needs 'seed'"))?;
            FrequencyKind::Jittered {
                seed: parse_uint(&e.value, e.line, "seed")?,
            }
        }
        other => {
            return Err(Error::parse(
                kind_entry.line,
                format!("unknown kind '{other}'"),
            ))
        }
    };

    if kind == FrequencyKind::Explicit {
        if let Some(e) = sec.get("coeff") {
            return Err(Error::parse(e.line, "explicit kind takes records, not 'coeff'"));
        }
        let mut lambda = Vec::with_capacity(sec.records.len());
        let mut a = Vec::with_capacity(sec.records.len());
        for (k, rec) in sec.records.iter().enumerate() {
            check_index(rec, k)?;
            let (l, c) = match rec.fields.len() {
                3 => (
                    parse_real(&rec.fields[1], rec.line, "lambda")?,
                    parse_complex(&rec.fields[2], rec.line, "coefficient")?,
                ),
                4 => (
                    parse_real(&rec.fields[1], rec.line, "lambda")?,
                    Complex64::new(
                        parse_real(&rec.fields[2], rec.line, "re")?,
                        parse_real(&rec.fields[3], rec.line, "im")?,
                    ),
                ),
                _ => {
                    return Err(Error::parse(
                        rec.line,
                        "expected 'index lambda re im' record",
                    ))
                }
            };
            lambda.push(l);
            a.push(c);
        }
        if let Some(n) = n {
            if n != lambda.len() {
                return Err(Error::parse(
                    sec.get("n").unwrap().line,
                    format!("n = {n} but {} records", lambda.len()),
                ));
            }
        }
        let freq = FrequencySeq::explicit(lambda).map_err(|e| locate(e, sec))?;
        return APSeries::new(freq, CoeffSeq::new(a));
    }

    let n_entry = sec
        .get("n")
        .ok_or_else(|| Error::parse(kind_entry.line, "builtin kinds need 'n'"))?;
    let n = n.unwrap();
    let freq = FrequencySeq::builtin(kind, n)
        .map_err(|e| Error::parse(n_entry.line, e.to_string()))?;
    let coeff: Vec<Complex64> = match (sec.get("coeff"), sec.records.is_empty()) {
        (Some(_), false) => {
            return Err(Error::parse(
                sec.records[0].line,
                "give either 'coeff' or records, not both",
            ))
        }
        (Some(e), true) => {
            let v = e
                .value
                .split_whitespace()
                .map(|tok| parse_complex(tok, e.line, "coeff"))
                .collect::<Result<Vec<_>>>()?;
            if v.len() != n {
                return Err(Error::parse(
                    e.line,
                    format!("coeff has {} entries, n = {n}", v.len()),
                ));
            }
            v
        }
        (None, false) => {
            if sec.records.len() != n {
                return Err(Error::parse(
                    n_entry.line,
                    format!("n = {n} but {} records", sec.records.len()),
                ));
            }
            sec.records
                .iter()
                .enumerate()
                .map(|(k, rec)| {
                    check_index(rec, k)?;
                    match rec.fields.len() {
                        2 => parse_complex(&rec.fields[1], rec.line, "coefficient"),
                        3 => Ok(Complex64::new(
                            parse_real(&rec.fields[1], rec.line, "re")?,
                            parse_real(&rec.fields[2], rec.line, "im")?,
                        )),
                        _ => Err(Error::parse(rec.line, "expected 'index re im' record")),
                    }
                })
                .collect::<Result<Vec<_>>>()?
        }
        (None, true) => return Err(Error::parse(n_entry.line, "missing coefficients")),
    };
    APSeries::new(freq, CoeffSeq::new(coeff))
}

fn check_index(rec: &Record, k: usize) -> Result<()> {
    let idx = parse_uint(&rec.fields[0], rec.line, "index")?;
    if idx as usize != k + 1 {
        return Err(Error::parse(
            rec.line,
            format!("expected index {}, found {idx}", k + 1),
        ));
    }
    Ok(())
}

// Attach a record line to monotonicity errors reported as `lambda[i]`.
fn locate(err: Error, sec: &Section) -> Error {
    if let Error::Invariant { field, message } = &err {
        if let Some(i) = field
            .strip_prefix("lambda[")
            .and_then(|s| s.strip_suffix(']'))
            .and_then(|s| s.parse::<usize>().ok())
        {
            if let Some(rec) = sec.records.get(i - 1) {
                return Error::parse(rec.line, format!("{field}: {message}"));
            }
        }
    }
    err
}

/// Serialize as an explicit series. Values use Rust's shortest round-trip
/// representation, so reloading reproduces every bit.
pub fn format_series(series: &APSeries, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "kind = explicit");
    let _ = writeln!(out, "n = {}", series.len());
    for (k, (l, a)) in series.lambdas().iter().zip(series.coeffs()).enumerate() {
        let _ = writeln!(out, "{} {} {} {}", k + 1, l, a.re, a.im);
    }
    out
}
