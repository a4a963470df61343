//! Plain-text and JSON formats.
//!
//! Matrix text: a header line `rows cols q`, then one line per row of
//! space-separated element codes.
//!
//! Profile text: a header line `n b q`, then one block per maximal run of
//! equal consecutive spaces: a line `multiplicity dim` followed by the `dim`
//! rows of the space's reduced echelon basis.
//!
//! Blank lines and anything after `#` are ignored in both.

use lcl_core::code::Provenance;
use lcl_core::witness::Violation;
use lcl_core::{Code, Elem, Field, Matrix, Profile, Subspace};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("");
        let toks: Vec<&str> = line.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

fn numbers<T: std::str::FromStr>(line: usize, toks: &[&str], want: usize) -> Result<Vec<T>> {
    if toks.len() != want {
        return Err(Error::Parse(format!("line {line}: expected {want} fields, found {}", toks.len())));
    }
    toks.iter()
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("line {line}: bad number {t:?}"))))
        .collect()
}

fn field_of(q: u64) -> Result<Field> {
    Ok(Field::of_order(q)?)
}

fn write_rows(out: &mut String, m: &Matrix) {
    for r in 0..m.rows() {
        let row: Vec<String> = m.row(r).iter().map(|x| x.to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
}

pub fn write_matrix(m: &Matrix) -> String {
    let mut out = format!("{} {} {}\n", m.rows(), m.cols(), m.field().order());
    write_rows(&mut out, m);
    out
}

pub fn parse_matrix(text: &str) -> Result<Matrix> {
    let mut lines = data_lines(text);
    let (at, header) = lines.next().ok_or_else(|| Error::Parse("empty matrix file".into()))?;
    let h: Vec<u64> = numbers(at, &header, 3)?;
    let (rows, cols) = (h[0] as usize, h[1] as usize);
    let field = field_of(h[2])?;
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let (at, toks) = lines.next().ok_or_else(|| Error::Parse(format!("expected {rows} rows")))?;
        for x in numbers::<u64>(at, &toks, cols)? {
            data.push(field.check(x)?);
        }
    }
    if let Some((at, _)) = lines.next() {
        return Err(Error::Parse(format!("line {at}: trailing data after {rows} rows")));
    }
    Ok(Matrix::from_vec(&field, rows, cols, data)?)
}

pub fn write_profile(p: &Profile) -> String {
    let mut out = format!("{} {} {}\n", p.n(), p.b(), p.field().order());
    for (space, mult) in p.runs() {
        out.push_str(&format!("{} {}\n", mult, space.dim()));
        write_rows(&mut out, space.basis());
    }
    out
}

pub fn parse_profile(text: &str) -> Result<Profile> {
    let mut lines = data_lines(text);
    let (at, header) = lines.next().ok_or_else(|| Error::Parse("empty profile file".into()))?;
    let h: Vec<u64> = numbers(at, &header, 3)?;
    let (n, b) = (h[0] as usize, h[1] as usize);
    let field = field_of(h[2])?;
    let mut runs: Vec<(Subspace, usize)> = Vec::new();
    while let Some((at, toks)) = lines.next() {
        let md: Vec<usize> = numbers(at, &toks, 2)?;
        let mut rows = Vec::with_capacity(md[1]);
        for _ in 0..md[1] {
            let (at, toks) = lines.next().ok_or_else(|| Error::Parse(format!("line {at}: missing basis rows")))?;
            rows.push(numbers::<u64>(at, &toks, b)?.into_iter().map(|x| field.check(x)).collect::<Result<_, _>>()?);
        }
        let space = Subspace::from_generators(&field, b, &rows)?;
        if space.dim() != md[1] {
            return Err(Error::Parse(format!("line {at}: basis rows are dependent")));
        }
        runs.push((space, md[0]));
    }
    let p = Profile::from_runs(&runs)?;
    if p.n() != n {
        return Err(Error::Parse(format!("header says n = {n}, multiplicities sum to {}", p.n())));
    }
    Ok(p)
}

/// Provenance sidecar written next to a code's generator matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSidecar {
    pub model: String,
    pub seed: Option<u64>,
    pub stream: Option<u64>,
    pub n: usize,
    pub k: usize,
    pub q: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Elem>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parity: Option<Vec<Vec<Elem>>>,
}

impl CodeSidecar {
    pub fn describe(code: &Code, k: usize, seed: Option<u64>, stream: Option<u64>) -> Self {
        let (points, parity) = match code.provenance() {
            Provenance::ReedSolomon { points, .. } => (Some(points.clone()), None),
            Provenance::RlcParity { parity, .. } | Provenance::RlcUniform { parity } => (None, Some(parity.row_vecs())),
            Provenance::Explicit => (None, None),
        };
        CodeSidecar {
            model: code.provenance().model().into(),
            seed,
            stream,
            n: code.n(),
            k,
            q: code.field().order(),
            points,
            parity,
        }
    }
}

/// A violation as JSON: the lists per coordinate, the center when every list
/// is a single symbol, and the `n x b` matrix whose columns are the words.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<Elem>>,
    pub lists: Vec<Vec<Elem>>,
    pub matrix: Vec<Vec<Elem>>,
}

impl From<&Violation> for WitnessJson {
    fn from(v: &Violation) -> Self {
        let center = v.lists.iter().map(|l| (l.len() == 1).then(|| l[0])).collect::<Option<Vec<_>>>();
        WitnessJson { center, lists: v.lists.clone(), matrix: v.words.to_matrix().row_vecs() }
    }
}
