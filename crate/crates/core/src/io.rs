//! Text format for channels, reverse kernels and distance matrices.
//!
//! ```text
//! channel 2
//! labels 0 1
//! 3/4 1/4
//! 1/4 3/4
//! ```
//!
//! The first line is the kind token (`channel`, `reverse`, `metric` or
//! `semimetric`) and the size `N`. An optional `labels` line follows, then
//! `N` rows of `N` rational literals. Blank lines and lines starting with `#`
//! are ignored. Each kind is validated on load.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{Alphabet, Channel, DistanceKind, DistanceMatrix, ReverseKernel, SquareMatrix};
use crate::rational::{parse_rational, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    Channel,
    Reverse,
    Metric,
    Semimetric,
}

impl MatrixKind {
    pub fn token(self) -> &'static str {
        match self {
            MatrixKind::Channel => "channel",
            MatrixKind::Reverse => "reverse",
            MatrixKind::Metric => "metric",
            MatrixKind::Semimetric => "semimetric",
        }
    }

    fn from_token(t: &str) -> Option<Self> {
        Some(match t {
            "channel" => MatrixKind::Channel,
            "reverse" => MatrixKind::Reverse,
            "metric" => MatrixKind::Metric,
            "semimetric" => MatrixKind::Semimetric,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatrixFile {
    Channel(Channel),
    Reverse(ReverseKernel),
    Distance(DistanceMatrix),
}

struct RawMatrix {
    kind: MatrixKind,
    alphabet: Alphabet,
    matrix: SquareMatrix,
}

fn parse_raw(text: &str) -> Result<RawMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .peekable();

    let (hline, header) = lines.next().ok_or_else(|| Error::Parse("empty matrix file".into()))?;
    let mut head = header.split_whitespace();
    let kind_tok = head.next().unwrap_or_default();
    let kind = MatrixKind::from_token(kind_tok).ok_or_else(|| {
        Error::Parse(format!(
            "line {hline}: unknown kind `{kind_tok}` (expected channel, reverse, metric or semimetric)"
        ))
    })?;
    let size_tok = head
        .next()
        .ok_or_else(|| Error::Parse(format!("line {hline}: missing size after `{kind_tok}`")))?;
    let n: usize = size_tok
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Parse(format!("line {hline}: size `{size_tok}` is not a positive integer")))?;
    if let Some(extra) = head.next() {
        return Err(Error::Parse(format!(
            "line {hline}: unexpected token `{extra}` in header"
        )));
    }

    let mut alphabet = Alphabet::new(n)?;
    if let Some((lline, l)) = lines.peek().copied() {
        if let Some(rest) = l.strip_prefix("labels") {
            if rest.is_empty() || rest.starts_with(char::is_whitespace) {
                lines.next();
                let labels: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                if labels.len() != n {
                    return Err(Error::Parse(format!(
                        "line {lline}: expected {n} labels, found {}",
                        labels.len()
                    )));
                }
                alphabet = Alphabet::with_labels(labels).map_err(|e| Error::Parse(format!("line {lline}: {e}")))?;
            }
        }
    }

    let mut rows = Vec::with_capacity(n);
    for r in 0..n {
        let (line, l) = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("expected {n} matrix rows, found {r}")))?;
        let row: Vec<Rational> = l
            .split_whitespace()
            .enumerate()
            .map(|(c, tok)| parse_rational(tok).map_err(|e| Error::Parse(format!("line {line}, entry ({r},{c}): {e}"))))
            .collect::<Result<_>>()?;
        if row.len() != n {
            return Err(Error::Parse(format!(
                "line {line}: row {r} has {} entries, expected {n}",
                row.len()
            )));
        }
        rows.push(row);
    }
    if let Some((line, _)) = lines.next() {
        return Err(Error::Parse(format!("line {line}: trailing content after {n} rows")));
    }
    Ok(RawMatrix {
        kind,
        alphabet,
        matrix: SquareMatrix::from_rows(rows)?,
    })
}

pub fn parse_matrix_file(text: &str) -> Result<MatrixFile> {
    let raw = parse_raw(text)?;
    Ok(match raw.kind {
        MatrixKind::Channel => MatrixFile::Channel(Channel::new(raw.alphabet, raw.matrix)?),
        MatrixKind::Reverse => MatrixFile::Reverse(ReverseKernel::new(raw.alphabet, raw.matrix)?),
        MatrixKind::Metric => {
            MatrixFile::Distance(DistanceMatrix::new(raw.alphabet, raw.matrix, DistanceKind::Metric)?)
        }
        MatrixKind::Semimetric => {
            MatrixFile::Distance(DistanceMatrix::new(raw.alphabet, raw.matrix, DistanceKind::Semimetric)?)
        }
    })
}

pub fn parse_channel(text: &str) -> Result<Channel> {
    match parse_matrix_file(text)? {
        MatrixFile::Channel(c) => Ok(c),
        other => Err(Error::Parse(format!(
            "expected a `channel` file, found `{}`",
            kind_of(&other).token()
        ))),
    }
}

pub fn parse_distance(text: &str) -> Result<DistanceMatrix> {
    match parse_matrix_file(text)? {
        MatrixFile::Distance(d) => Ok(d),
        other => Err(Error::Parse(format!(
            "expected a `metric` or `semimetric` file, found `{}`",
            kind_of(&other).token()
        ))),
    }
}

pub fn parse_reverse(text: &str) -> Result<ReverseKernel> {
    match parse_matrix_file(text)? {
        MatrixFile::Reverse(k) => Ok(k),
        other => Err(Error::Parse(format!(
            "expected a `reverse` file, found `{}`",
            kind_of(&other).token()
        ))),
    }
}

fn kind_of(f: &MatrixFile) -> MatrixKind {
    match f {
        MatrixFile::Channel(_) => MatrixKind::Channel,
        MatrixFile::Reverse(_) => MatrixKind::Reverse,
        MatrixFile::Distance(d) => match d.kind() {
            DistanceKind::Metric => MatrixKind::Metric,
            DistanceKind::Semimetric => MatrixKind::Semimetric,
        },
    }
}

fn render(kind: MatrixKind, alphabet: &Alphabet, matrix: &SquareMatrix) -> String {
    let mut out = format!("{} {}\n", kind.token(), matrix.n());
    if let Some(labels) = alphabet.labels() {
        out.push_str("labels ");
        out.push_str(&labels.join(" "));
        out.push('\n');
    }
    out.push_str(&matrix.to_string());
    out
}

pub fn render_matrix_file(file: &MatrixFile) -> String {
    match file {
        MatrixFile::Channel(c) => render(MatrixKind::Channel, c.alphabet(), c.matrix()),
        MatrixFile::Reverse(k) => render(MatrixKind::Reverse, k.alphabet(), k.matrix()),
        MatrixFile::Distance(d) => render(kind_of(file), d.alphabet(), d.matrix()),
    }
}

pub fn render_channel(c: &Channel) -> String {
    render(MatrixKind::Channel, c.alphabet(), c.matrix())
}

pub fn render_reverse(k: &ReverseKernel) -> String {
    render(MatrixKind::Reverse, k.alphabet(), k.matrix())
}

pub fn render_distance(d: &DistanceMatrix) -> String {
    let kind = match d.kind() {
        DistanceKind::Metric => MatrixKind::Metric,
        DistanceKind::Semimetric => MatrixKind::Semimetric,
    };
    render(kind, d.alphabet(), d.matrix())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Io(_) => e,
        other => Error::Parse(format!("{}: {other}", path.display())),
    })
}

pub fn read_channel(path: &Path) -> Result<Channel> {
    with_path(path, parse_channel(&read(path)?))
}

pub fn read_distance(path: &Path) -> Result<DistanceMatrix> {
    with_path(path, parse_distance(&read(path)?))
}

pub fn read_reverse(path: &Path) -> Result<ReverseKernel> {
    with_path(path, parse_reverse(&read(path)?))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text)?;
    Ok(())
}
