use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ndarray::{Array2, ArrayView1, Axis};

use super::vocab::Vocabulary;
use crate::error::{Error, Result};

/// Tolerance used when checking that rows are unit length.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Dense `|V| x d` word vectors indexed by a vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    pub vocab: Vocabulary,
    pub rows: Array2<f64>,
    pub normalized: bool,
}

impl EmbeddingMatrix {
    pub fn new(vocab: Vocabulary, rows: Array2<f64>) -> Result<Self> {
        if vocab.len() != rows.nrows() {
            return Err(Error::Dimension(format!(
                "{} tokens but {} rows",
                vocab.len(),
                rows.nrows()
            )));
        }
        Ok(EmbeddingMatrix {
            vocab,
            rows,
            normalized: false,
        })
    }

    pub fn dim(&self) -> usize {
        self.rows.ncols()
    }

    pub fn len(&self) -> usize {
        self.rows.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.nrows() == 0
    }

    pub fn vector(&self, token: &str) -> Option<ArrayView1<'_, f64>> {
        self.vocab.id(token).map(|i| self.rows.row(i))
    }

    /// Largest deviation of a row norm from 1.
    pub fn max_norm_error(&self) -> f64 {
        self.rows
            .rows()
            .into_iter()
            .map(|r| (r.dot(&r).sqrt() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Checks the unit-norm contract at the given tolerance.
    pub fn check_normalized(&self, tol: f64) -> Result<()> {
        if self.max_norm_error() > tol {
            return Err(Error::NotNormalized);
        }
        Ok(())
    }

    /// Keeps the rows of `tokens` (which must all be present) with their new counts.
    /// The result is re-ordered by descending count.
    pub fn restrict(&self, tokens: impl IntoIterator<Item = (String, u64)>) -> Result<Self> {
        let vocab = Vocabulary::from_counts(tokens);
        let ids: Vec<usize> = vocab
            .tokens()
            .iter()
            .map(|t| {
                self.vocab
                    .id(t)
                    .ok_or_else(|| Error::Dimension(format!("token {t:?} has no row")))
            })
            .collect::<Result<_>>()?;
        Ok(EmbeddingMatrix {
            vocab,
            rows: self.rows.select(Axis(0), &ids),
            normalized: self.normalized,
        })
    }
}

/// Scales every row to unit length.
pub fn normalize_rows(e: &EmbeddingMatrix) -> Result<EmbeddingMatrix> {
    let mut rows = e.rows.clone();
    for (i, mut row) in rows.rows_mut().into_iter().enumerate() {
        let norm = row.dot(&row).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroRow(e.vocab.token(i).to_string()));
        }
        row.mapv_inplace(|v| v / norm);
    }
    Ok(EmbeddingMatrix {
        vocab: e.vocab.clone(),
        rows,
        normalized: true,
    })
}

/// Formats like C's `%g`: 6 significant digits, trailing zeros trimmed.
pub fn format_g6(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-4..6).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (5 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes the text interchange format: a `rows dim` header, then one
/// `token v1 .. vd` line per row.
pub fn save_embeddings(e: &EmbeddingMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, embeddings_to_string(e)).map_err(|err| Error::io(path, err))
}

pub fn embeddings_to_string(e: &EmbeddingMatrix) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", e.len(), e.dim());
    for (tok, row) in e.vocab.tokens().iter().zip(e.rows.rows()) {
        out.push_str(tok);
        for v in row {
            out.push(' ');
            out.push_str(&format_g6(*v));
        }
        out.push('\n');
    }
    out
}

pub fn load_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_embeddings(&text)
}

/// Parses the text interchange format. File order is taken as frequency rank.
pub fn parse_embeddings(text: &str) -> Result<EmbeddingMatrix> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| Error::Format {
        line: 1,
        msg: "missing header".into(),
    })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let bad_header = || Error::Format {
        line: 1,
        msg: format!("header {header:?} is not `<rows> <dim>`"),
    };
    if fields.len() != 2 {
        return Err(bad_header());
    }
    let n: usize = fields[0].parse().map_err(|_| bad_header())?;
    let dim: usize = fields[1].parse().map_err(|_| bad_header())?;
    if dim == 0 {
        return Err(bad_header());
    }

    let mut tokens = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n * dim);
    for (i, line) in lines {
        if tokens.len() == n {
            return Err(Error::Format {
                line: i + 1,
                msg: format!("more than the {n} rows announced in the header"),
            });
        }
        let mut parts = line.split_whitespace();
        let token = parts.next().expect("non-empty line");
        let start = values.len();
        for p in parts {
            let v: f64 = p.parse().map_err(|_| Error::Format {
                line: i + 1,
                msg: format!("value {p:?} is not a number"),
            })?;
            values.push(v);
        }
        if values.len() - start != dim {
            return Err(Error::Format {
                line: i + 1,
                msg: format!("expected {dim} values, found {}", values.len() - start),
            });
        }
        tokens.push(token.to_string());
    }
    if tokens.len() != n {
        return Err(Error::Format {
            line: text.lines().count(),
            msg: format!("header announces {n} rows, found {}", tokens.len()),
        });
    }
    let vocab = Vocabulary::from_ranked(tokens)?;
    let rows = Array2::from_shape_vec((n, dim), values).expect("shape checked");
    EmbeddingMatrix::new(vocab, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn small() -> EmbeddingMatrix {
        let vocab = Vocabulary::from_ranked(vec!["a".into(), "b".into(), "c".into()]).unwrap();
        let rows = array![
            [0.1, -2.5, 3.0e-7, 12345.678],
            [1.0, 0.0, -0.333333333, 1e10],
            [3.0, 4.0, 0.0, 0.5]
        ];
        EmbeddingMatrix::new(vocab, rows).unwrap()
    }

    #[test]
    fn g6_matches_printf() {
        assert_eq!(format_g6(0.1), "0.1");
        assert_eq!(format_g6(12345.678), "12345.7");
        assert_eq!(format_g6(123456.7), "123457");
        assert_eq!(format_g6(1234567.0), "1.23457e+06");
        assert_eq!(format_g6(3.0e-7), "3e-07");
        assert_eq!(format_g6(0.0001), "0.0001");
        assert_eq!(format_g6(-0.333333333), "-0.333333");
        assert_eq!(format_g6(0.0), "0");
        assert_eq!(format_g6(999999.5), "1e+06");
    }

    #[test]
    fn round_trip() {
        let e = small();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.vec");
        save_embeddings(&e, &p).unwrap();
        let back = load_embeddings(&p).unwrap();
        assert_eq!(back.vocab.tokens(), e.vocab.tokens());
        for (a, b) in back.rows.iter().zip(e.rows.iter()) {
            assert!((a - b).abs() <= 1e-5 * b.abs(), "{a} vs {b}");
        }
    }

    #[test]
    fn format_errors() {
        let short = "10 2\n".to_string() + &(0..9).map(|i| format!("w{i} 1 2\n")).collect::<String>();
        assert!(matches!(parse_embeddings(&short), Err(Error::Format { .. })));
        assert!(matches!(parse_embeddings("2 2\na 1 2\na 3 4\n"), Err(Error::Format { .. })));
        assert!(matches!(parse_embeddings("2 2\na 1 2\nb 3\n"), Err(Error::Format { .. })));
        assert!(matches!(parse_embeddings("x y\n"), Err(Error::Format { .. })));
        assert!(matches!(parse_embeddings("1 2\na 1 2\nb 3 4\n"), Err(Error::Format { .. })));
        assert!(matches!(parse_embeddings("1 2\na 1 nope\n"), Err(Error::Format { .. })));
    }

    #[test]
    fn normalize_cases() {
        let vocab = Vocabulary::from_ranked(vec!["a".into()]).unwrap();
        let e = EmbeddingMatrix::new(vocab.clone(), array![[3.0, 4.0]]).unwrap();
        let n = normalize_rows(&e).unwrap();
        assert!(n.normalized);
        assert!((n.rows[[0, 0]] - 0.6).abs() < 1e-15);
        assert!((n.rows[[0, 1]] - 0.8).abs() < 1e-15);
        let again = normalize_rows(&n).unwrap();
        for (a, b) in again.rows.iter().zip(n.rows.iter()) {
            assert!((a - b).abs() <= 1e-12);
        }
        let z = EmbeddingMatrix::new(vocab, array![[0.0, 0.0]]).unwrap();
        match normalize_rows(&z) {
            Err(Error::ZeroRow(t)) => assert_eq!(t, "a"),
            other => panic!("expected zero-row error, got {other:?}"),
        }
    }

    #[test]
    fn norm_contract_on_random_rows() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let n = 200;
        let rows = Array2::from_shape_fn((n, 17), |_| rng.random_range(-10.0..10.0));
        let vocab = Vocabulary::from_ranked((0..n).map(|i| format!("t{i}")).collect()).unwrap();
        let e = normalize_rows(&EmbeddingMatrix::new(vocab, rows).unwrap()).unwrap();
        assert!(e.max_norm_error() <= NORM_TOLERANCE);
    }
}
