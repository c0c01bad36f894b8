//! Plain-text channel and density-matrix files.
//!
//! Channel file:
//!
//! ```text
//! dims 2 2
//! block 0 0
//! 1+0i 0+0i
//! 0+0i 0+0i
//! block 0 1
//! ...
//! ```
//!
//! Every `(k, l)` block with `0 <= k, l < dim_in` must appear exactly once,
//! in any order. Density-matrix files use a `dim <n>` header followed by `n`
//! rows. Entries are written `a+bi` or `a-bi`. Blank lines are ignored.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use thiserror::Error;

use crate::numkit::{c, CMatrix};
use crate::superop::Superoperator;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl FileError {
    /// 1-based line of a parse error.
    pub fn line(&self) -> Option<usize> {
        match self {
            FileError::Parse { line, .. } => Some(*line),
            FileError::Io { .. } => None,
        }
    }
}

fn err(line: usize, msg: impl Into<String>) -> FileError {
    FileError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Blocks as read from a channel file, not yet checked for physicality.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelFile {
    pub dim_in: usize,
    pub dim_out: usize,
    /// Row-major in `(k, l)`.
    pub blocks: Vec<CMatrix>,
}

impl ChannelFile {
    pub fn from_superoperator(s: &Superoperator) -> Self {
        let s = s.to_computational();
        Self {
            dim_in: s.dim_in(),
            dim_out: s.dim_out(),
            blocks: s.blocks().to_vec(),
        }
    }
}

/// Parses one complex entry `a+bi` / `a-bi`.
pub fn parse_complex(tok: &str) -> Option<Complex64> {
    let body = tok.strip_suffix('i')?;
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&p| matches!(bytes[p], b'+' | b'-') && !matches!(bytes[p - 1], b'e' | b'E'))?;
    let re: f64 = body[..split].parse().ok()?;
    let im: f64 = body[split..].parse().ok()?;
    (re.is_finite() && im.is_finite()).then(|| c(re, im))
}

pub fn format_complex(z: Complex64) -> String {
    let re = if z.re == 0.0 { 0.0 } else { z.re };
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    if im < 0.0 {
        format!("{re}-{}i", -im)
    } else {
        format!("{re}+{im}i")
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    /// Next non-blank line as (1-based number, tokens).
    fn next(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, l) in self.inner.by_ref() {
            self.last = i + 1;
            let toks: Vec<&str> = l.split_whitespace().collect();
            if !toks.is_empty() {
                return Some((i + 1, toks));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, Vec<&'a str>), FileError> {
        self.next().ok_or_else(|| {
            err(
                self.last + 1,
                format!("unexpected end of file, expected {what}"),
            )
        })
    }
}

fn parse_dim(line: usize, tok: &str, what: &str) -> Result<usize, FileError> {
    match tok.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(err(
            line,
            format!("{what} must be a positive integer, got `{tok}`"),
        )),
    }
}

fn parse_rows(lines: &mut Lines, n: usize) -> Result<CMatrix, FileError> {
    let mut data = Vec::with_capacity(n * n);
    for r in 0..n {
        let (ln, toks) = lines.expect(&format!("matrix row {}", r + 1))?;
        if toks.len() != n {
            return Err(err(
                ln,
                format!("expected {n} entries, found {}", toks.len()),
            ));
        }
        for t in toks {
            data.push(parse_complex(t).ok_or_else(|| err(ln, format!("bad complex entry `{t}`")))?);
        }
    }
    Ok(CMatrix::new(n, n, data).expect("n*n entries"))
}

pub fn parse_channel(text: &str) -> Result<ChannelFile, FileError> {
    let mut lines = Lines::new(text);
    let (ln, head) = lines.expect("`dims <dim_in> <dim_out>`")?;
    if head.len() != 3 || head[0] != "dims" {
        return Err(err(ln, "expected `dims <dim_in> <dim_out>`"));
    }
    let dim_in = parse_dim(ln, head[1], "dim_in")?;
    let dim_out = parse_dim(ln, head[2], "dim_out")?;
    let mut slots: Vec<Option<CMatrix>> = vec![None; dim_in * dim_in];
    while let Some((ln, toks)) = lines.next() {
        if toks.len() != 3 || toks[0] != "block" {
            return Err(err(ln, "expected `block <k> <l>`"));
        }
        let idx = |t: &str| match t.parse::<usize>() {
            Ok(v) if v < dim_in => Ok(v),
            _ => Err(err(ln, format!("block index `{t}` outside 0..{dim_in}"))),
        };
        let (k, l) = (idx(toks[1])?, idx(toks[2])?);
        if slots[k * dim_in + l].is_some() {
            return Err(err(ln, format!("block {k} {l} given twice")));
        }
        slots[k * dim_in + l] = Some(parse_rows(&mut lines, dim_out)?);
    }
    let end = lines.last + 1;
    let mut blocks = Vec::with_capacity(slots.len());
    for (i, s) in slots.into_iter().enumerate() {
        match s {
            Some(b) => blocks.push(b),
            None => {
                return Err(err(
                    end,
                    format!("missing block {} {}", i / dim_in, i % dim_in),
                ))
            }
        }
    }
    Ok(ChannelFile {
        dim_in,
        dim_out,
        blocks,
    })
}

pub fn write_channel(ch: &ChannelFile) -> String {
    let mut out = format!("dims {} {}\n", ch.dim_in, ch.dim_out);
    for k in 0..ch.dim_in {
        for l in 0..ch.dim_in {
            writeln!(out, "block {k} {l}").unwrap();
            write_rows(&mut out, &ch.blocks[k * ch.dim_in + l]);
        }
    }
    out
}

fn write_rows(out: &mut String, m: &CMatrix) {
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| format_complex(m[(i, j)])).collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
}

/// Parses a `dim <n>` matrix file. Physical validity is checked by the caller.
pub fn parse_matrix(text: &str) -> Result<CMatrix, FileError> {
    let mut lines = Lines::new(text);
    let (ln, head) = lines.expect("`dim <n>`")?;
    if head.len() != 2 || head[0] != "dim" {
        return Err(err(ln, "expected `dim <n>`"));
    }
    let n = parse_dim(ln, head[1], "dim")?;
    let m = parse_rows(&mut lines, n)?;
    if let Some((ln, _)) = lines.next() {
        return Err(err(ln, "trailing content after matrix"));
    }
    Ok(m)
}

pub fn write_matrix(m: &CMatrix) -> String {
    let mut out = format!("dim {}\n", m.rows());
    write_rows(&mut out, m);
    out
}

pub fn read_text(path: &Path) -> Result<String, FileError> {
    std::fs::read_to_string(path).map_err(|source| FileError::Io {
        path: path.display().to_string(),
        source,
    })
}
