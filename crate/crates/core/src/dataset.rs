//! Labeled training data and its CSV representation.
//!
//! The CSV layout is a header `label,f1,...,fd` followed by one row per point;
//! labels are `+1`/`-1` (`1` is accepted for `+1`). Features are written with
//! 17 significant digits so a save/load cycle is lossless.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{check_len, Label, Matrix};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset<T> {
    x: Matrix<T>,
    y: Vec<Label>,
}

impl<T: Scalar> LabeledDataset<T> {
    pub fn new(x: Matrix<T>, y: Vec<Label>) -> Result<Self> {
        check_len("labels vs data rows", x.rows(), y.len())?;
        if x.rows() > 0 && x.cols() == 0 {
            return Err(Error::invalid("points must have dimension > 0"));
        }
        Ok(Self { x, y })
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R], y: Vec<Label>) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?, y)
    }

    /// Stacks class one (`+1`) over class two (`-1`).
    pub fn from_classes(plus: &Matrix<T>, minus: &Matrix<T>) -> Result<Self> {
        check_len("class dimensions", plus.cols(), minus.cols())?;
        let mut rows: Vec<&[T]> = plus.row_iter().collect();
        rows.extend(minus.row_iter());
        let mut y = vec![Label::Plus; plus.rows()];
        y.extend(std::iter::repeat_n(Label::Minus, minus.rows()));
        Self::from_rows(&rows, y)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.y.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.x.cols()
    }

    #[inline]
    pub fn features(&self) -> &Matrix<T> {
        &self.x
    }

    #[inline]
    pub fn labels(&self) -> &[Label] {
        &self.y
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[T] {
        self.x.row(i)
    }

    pub fn count(&self, label: Label) -> usize {
        self.y.iter().filter(|&&l| l == label).count()
    }

    pub fn has_both_classes(&self) -> bool {
        self.count(Label::Plus) > 0 && self.count(Label::Minus) > 0
    }

    /// Same points with every label negated.
    pub fn with_negated_labels(&self) -> Self {
        Self {
            x: self.x.clone(),
            y: self.y.iter().map(|l| l.flipped()).collect(),
        }
    }

    /// Rows selected by `idx`, in that order.
    pub fn subset(&self, idx: &[usize]) -> Self {
        let rows: Vec<&[T]> = idx.iter().map(|&i| self.x.row(i)).collect();
        let y = idx.iter().map(|&i| self.y[i]).collect();
        Self::from_rows(&rows, y).expect("subset of a valid dataset")
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("label");
        for j in 1..=self.dim() {
            out.push_str(&format!(",f{j}"));
        }
        out.push('\n');
        for (row, label) in self.x.row_iter().zip(&self.y) {
            out.push_str(match label {
                Label::Plus => "+1",
                Label::Minus => "-1",
            });
            for v in row {
                out.push_str(&format!(",{:.16e}", v.to_f64_lossy()));
            }
            out.push('\n');
        }
        out
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(self.to_csv_string().as_bytes())
            .map_err(|e| Error::io(path, e))
    }

    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(reader);
        let header = rdr
            .headers()
            .map_err(|e| Error::Parse(format!("CSV header: {e}")))?
            .clone();
        if header.get(0) != Some("label") {
            return Err(Error::Parse(
                "CSV header must start with `label`".to_string(),
            ));
        }
        let d = header.len() - 1;
        if d == 0 {
            return Err(Error::Parse("CSV header names no feature columns".into()));
        }
        let mut data = Vec::new();
        let mut y = Vec::new();
        for (r, rec) in rdr.records().enumerate() {
            // header is line 1
            let line = r + 2;
            let rec = rec.map_err(|e| Error::Parse(format!("row {line}: {e}")))?;
            if rec.len() != d + 1 {
                return Err(Error::Parse(format!(
                    "row {line}: expected {} columns, found {}",
                    d + 1,
                    rec.len()
                )));
            }
            let raw = &rec[0];
            let label = raw
                .trim_start_matches('+')
                .parse::<f64>()
                .ok()
                .filter(|v| v.fract() == 0.0)
                .and_then(|v| Label::from_i64(v as i64))
                .ok_or_else(|| {
                    Error::Parse(format!(
                        "row {line}, column 1: label must be +1 or -1, found `{raw}`"
                    ))
                })?;
            y.push(label);
            for (c, field) in rec.iter().enumerate().skip(1) {
                let v: f64 = field.parse().map_err(|_| {
                    Error::Parse(format!(
                        "row {line}, column {}: not a number: `{field}`",
                        c + 1
                    ))
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse(format!(
                        "row {line}, column {}: non-finite value",
                        c + 1
                    )));
                }
                data.push(T::lit(v));
            }
        }
        let n = y.len();
        Self::new(Matrix::from_row_major(n, d, data)?, y)
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_reader(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point() -> LabeledDataset<f64> {
        LabeledDataset::from_rows(&[[1.0, 0.0], [-1.0, 0.0]], vec![Label::Plus, Label::Minus])
            .unwrap()
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("two.csv");
        let mut ds = two_point();
        ds.x[(0, 1)] = 0.1 + 0.2;
        ds.save_csv(&path).unwrap();
        let back = LabeledDataset::<f64>::load_csv(&path).unwrap();
        assert_eq!(back, ds);
    }

    #[test]
    fn label_zero_names_row() {
        let text = "label,f1,f2\n+1,1,0\n0,2,2\n";
        let err = LabeledDataset::<f64>::from_csv_reader(text.as_bytes()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 3") && msg.contains("label"), "{msg}");
    }

    #[test]
    fn mixed_column_counts_rejected() {
        let text = "label,f1,f2\n+1,1,0\n-1,2\n";
        let err = LabeledDataset::<f64>::from_csv_reader(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("row 3"), "{err}");
    }

    #[test]
    fn bad_number_names_column() {
        let text = "label,f1,f2\n+1,1,abc\n";
        let err = LabeledDataset::<f64>::from_csv_reader(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("column 3"), "{err}");
    }

    #[test]
    fn missing_file_is_not_found() {
        let err = LabeledDataset::<f64>::load_csv(Path::new("/nonexistent/x.csv")).unwrap_err();
        assert_eq!(err.to_string(), "file not found: /nonexistent/x.csv");
    }

    #[test]
    fn class_stacking() {
        let plus = Matrix::from_rows(&[[1.0], [2.0]]).unwrap();
        let minus = Matrix::from_rows(&[[-1.0]]).unwrap();
        let ds = LabeledDataset::from_classes(&plus, &minus).unwrap();
        assert_eq!(ds.labels(), &[Label::Plus, Label::Plus, Label::Minus]);
        assert_eq!(ds.count(Label::Minus), 1);
    }
}
