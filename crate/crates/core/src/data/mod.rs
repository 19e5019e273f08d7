//! Dataset ingestion and result writers.
//!
//! CSV input is RFC-4180-style with a required header row, '.' decimal
//! separator, and no missing cells — a missing value is a hard error
//! (imputation is out of scope). Variable kinds are either declared through
//! a schema file (two columns: name, `kind[:levels]`) or inferred: a column is
//! ordinal iff every value is an integer and the number of distinct values
//! lies in [2, max_levels].

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::corr::{CorrelationFamily, CorrelationMatrix, VariableKind};
use crate::error::{Error, Result};
use crate::select::SelectionResult;

/// Default ordinal-detection ceiling for schema inference.
pub const DEFAULT_MAX_LEVELS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemaSource {
    Declared,
    Inferred,
}

/// Per-column variable kinds plus where they came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    pub kinds: Vec<VariableKind>,
    pub source: SchemaSource,
}

/// A complete numeric dataset: observation matrix, unique column names, and
/// a schema of matching length. Ordinal columns hold their integer codes.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    matrix: DMatrix<f64>,
    names: Vec<String>,
    schema: Schema,
}

impl Dataset {
    pub fn new(matrix: DMatrix<f64>, names: Vec<String>, schema: Schema) -> Result<Self> {
        if names.len() != matrix.ncols() {
            return Err(Error::SchemaLengthMismatch {
                schema: names.len(),
                data: matrix.ncols(),
            });
        }
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(Error::DuplicateName { name: name.clone() });
            }
        }
        validate_schema(&matrix, &schema)?;
        Ok(Self {
            matrix,
            names,
            schema,
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    /// Observation count.
    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    /// Variable count.
    pub fn p(&self) -> usize {
        self.matrix.ncols()
    }

    /// Write as CSV with a header row; numbers use the shortest
    /// representation that round-trips exactly.
    pub fn write_csv<W: Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.names)?;
        for i in 0..self.n() {
            let row: Vec<String> = (0..self.p())
                .map(|j| format_value(self.matrix[(i, j)]))
                .collect();
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Write as a JSON object with "schema", "names", and "rows".
    pub fn write_json<W: Write>(&self, writer: W) -> serde_json::Result<()> {
        let rows: Vec<Vec<f64>> = (0..self.n())
            .map(|i| (0..self.p()).map(|j| self.matrix[(i, j)]).collect())
            .collect();
        let doc = DatasetDoc {
            schema: self.schema.clone(),
            names: self.names.clone(),
            rows,
        };
        serde_json::to_writer_pretty(writer, &doc)
    }

    /// Read back a JSON dataset written by [`Dataset::write_json`].
    pub fn read_json<R: Read>(reader: R) -> Result<Self> {
        let doc: DatasetDoc = serde_json::from_reader(reader).map_err(|cause| Error::Json {
            path: "<json>".to_string(),
            cause,
        })?;
        let n = doc.rows.len();
        let p = doc.names.len();
        let mut matrix = DMatrix::<f64>::zeros(n, p);
        for (i, row) in doc.rows.iter().enumerate() {
            if row.len() != p {
                return Err(Error::SchemaLengthMismatch {
                    schema: p,
                    data: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                matrix[(i, j)] = v;
            }
        }
        Dataset::new(matrix, doc.names, doc.schema)
    }
}

#[derive(Serialize, Deserialize)]
struct DatasetDoc {
    schema: Schema,
    names: Vec<String>,
    rows: Vec<Vec<f64>>,
}

/// Shortest representation that parses back to the same f64.
fn format_value(v: f64) -> String {
    format!("{v}")
}

fn column_distinct(matrix: &DMatrix<f64>, j: usize) -> Vec<f64> {
    let mut col: Vec<f64> = matrix.column(j).iter().copied().collect();
    col.sort_by(f64::total_cmp);
    col.dedup();
    col
}

fn is_integer_column(matrix: &DMatrix<f64>, j: usize) -> bool {
    matrix.column(j).iter().all(|v| v.fract() == 0.0)
}

/// Infer a per-column schema: ordinal iff all values are integers with 2 to
/// `max_levels` distinct values, otherwise continuous. Constant columns are
/// rejected — they are degenerate for every estimator.
pub fn infer_schema(matrix: &DMatrix<f64>, max_levels: usize) -> Result<Schema> {
    let mut kinds = Vec::with_capacity(matrix.ncols());
    for j in 0..matrix.ncols() {
        let distinct = column_distinct(matrix, j);
        if distinct.len() < 2 {
            return Err(Error::ConstantColumn { column: j });
        }
        let kind = if is_integer_column(matrix, j) && distinct.len() <= max_levels {
            VariableKind::Ordinal {
                levels: distinct.len(),
            }
        } else {
            VariableKind::Continuous
        };
        kinds.push(kind);
    }
    Ok(Schema {
        kinds,
        source: SchemaSource::Inferred,
    })
}

fn validate_schema(matrix: &DMatrix<f64>, schema: &Schema) -> Result<()> {
    if schema.kinds.len() != matrix.ncols() {
        return Err(Error::SchemaLengthMismatch {
            schema: schema.kinds.len(),
            data: matrix.ncols(),
        });
    }
    for (j, kind) in schema.kinds.iter().enumerate() {
        if let VariableKind::Ordinal { levels } = kind {
            if *levels < 2 {
                return Err(Error::InvalidLevels { levels: *levels });
            }
            for v in matrix.column(j).iter() {
                if v.fract() != 0.0 {
                    return Err(Error::OrdinalNotInteger {
                        column: j.to_string(),
                        value: *v,
                    });
                }
            }
            let observed = column_distinct(matrix, j).len();
            if observed < 2 {
                return Err(Error::DegenerateOrdinal { column: j });
            }
            if observed > *levels {
                return Err(Error::OrdinalLevelsExceeded {
                    column: j.to_string(),
                    declared: *levels,
                    observed,
                });
            }
        }
    }
    Ok(())
}

/// Kind declaration from a schema file; ordinal level counts are optional
/// and default to the observed distinct count.
#[derive(Debug, Clone, PartialEq)]
pub enum KindDecl {
    Continuous,
    Ordinal(Option<usize>),
}

impl KindDecl {
    fn parse(value: &str) -> Result<Self> {
        let v = value.trim().to_ascii_lowercase();
        if v == "continuous" {
            return Ok(KindDecl::Continuous);
        }
        if v == "ordinal" {
            return Ok(KindDecl::Ordinal(None));
        }
        if let Some(levels) = v.strip_prefix("ordinal:") {
            let levels: usize = levels.trim().parse().map_err(|_| Error::UnknownKind {
                value: value.to_string(),
            })?;
            if levels < 2 {
                return Err(Error::InvalidLevels { levels });
            }
            return Ok(KindDecl::Ordinal(Some(levels)));
        }
        Err(Error::UnknownKind {
            value: value.to_string(),
        })
    }
}

/// Parse a schema file: CSV with header and two columns, name and
/// `kind[:levels]`.
pub fn load_schema_file(path: &Path) -> Result<Vec<(String, KindDecl)>> {
    let path_str = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|cause| Error::Csv {
            path: path_str.clone(),
            cause,
        })?;
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|cause| Error::Csv {
            path: path_str.clone(),
            cause,
        })?;
        if record.len() < 2 {
            return Err(Error::UnknownKind {
                value: record.iter().collect::<Vec<_>>().join(","),
            });
        }
        out.push((record[0].to_string(), KindDecl::parse(&record[1])?));
    }
    Ok(out)
}

/// Load a CSV dataset (header row required, every cell numeric and finite).
///
/// With `declared` schema entries the kinds are matched to data columns by
/// name and validated against the data; otherwise kinds are inferred with
/// [`infer_schema`]. Row numbers in errors are 1-based data rows.
pub fn load_csv(
    path: &Path,
    declared: Option<&[(String, KindDecl)]>,
    max_levels: usize,
) -> Result<Dataset> {
    let path_str = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|cause| Error::Csv {
            path: path_str.clone(),
            cause,
        })?;

    let names: Vec<String> = reader
        .headers()
        .map_err(|cause| Error::Csv {
            path: path_str.clone(),
            cause,
        })?
        .iter()
        .map(|h| h.to_string())
        .collect();
    if names.is_empty() {
        return Err(Error::EmptyInput);
    }
    for (i, name) in names.iter().enumerate() {
        if names[..i].contains(name) {
            return Err(Error::DuplicateName { name: name.clone() });
        }
    }

    let p = names.len();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|cause| Error::Csv {
            path: path_str.clone(),
            cause,
        })?;
        let row_no = row_idx + 1;
        let mut row = Vec::with_capacity(p);
        for (j, name) in names.iter().enumerate() {
            let cell = record.get(j).unwrap_or("");
            if cell.is_empty() {
                return Err(Error::MissingCell {
                    row: row_no,
                    column: name.clone(),
                });
            }
            let value: f64 = cell.parse().map_err(|_| Error::NonNumericCell {
                row: row_no,
                column: name.clone(),
                value: cell.to_string(),
            })?;
            if !value.is_finite() {
                return Err(Error::NonNumericCell {
                    row: row_no,
                    column: name.clone(),
                    value: cell.to_string(),
                });
            }
            row.push(value);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    let matrix = DMatrix::from_fn(rows.len(), p, |i, j| rows[i][j]);

    let schema = match declared {
        Some(entries) => {
            for (name, _) in entries {
                if !names.contains(name) {
                    return Err(Error::SchemaUnknownColumn { name: name.clone() });
                }
            }
            let mut kinds = Vec::with_capacity(p);
            for (j, name) in names.iter().enumerate() {
                let decl = entries
                    .iter()
                    .find(|(n, _)| n == name)
                    .map(|(_, d)| d.clone())
                    .ok_or_else(|| Error::SchemaMissingColumn { name: name.clone() })?;
                let kind = match decl {
                    KindDecl::Continuous => VariableKind::Continuous,
                    KindDecl::Ordinal(levels) => {
                        let levels = match levels {
                            Some(l) => l,
                            None => column_distinct(&matrix, j).len(),
                        };
                        VariableKind::Ordinal { levels }
                    }
                };
                kinds.push(kind);
            }
            Schema {
                kinds,
                source: SchemaSource::Declared,
            }
        }
        None => infer_schema(&matrix, max_levels)?,
    };

    Dataset::new(matrix, names.clone(), schema).map_err(|e| name_column_errors(e, &names))
}

/// Attach column names to index-based errors where possible.
pub fn name_column_errors(e: Error, names: &[String]) -> Error {
    match e {
        Error::OrdinalNotInteger { column, value } => {
            let named = column
                .parse::<usize>()
                .ok()
                .and_then(|j| names.get(j))
                .cloned()
                .unwrap_or(column);
            Error::OrdinalNotInteger {
                column: named,
                value,
            }
        }
        Error::OrdinalLevelsExceeded {
            column,
            declared,
            observed,
        } => {
            let named = column
                .parse::<usize>()
                .ok()
                .and_then(|j| names.get(j))
                .cloned()
                .unwrap_or(column);
            Error::OrdinalLevelsExceeded {
                column: named,
                declared,
                observed,
            }
        }
        other => other,
    }
}

/// Output format of the result writers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// One row of a ranked selection report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionRecord {
    pub rank: usize,
    pub column: String,
    pub residual_trace: f64,
    pub method: String,
}

/// Flatten a selection into ranked rows (rank, column name, residual trace
/// after the pick).
pub fn selection_records(result: &SelectionResult, names: &[String]) -> Vec<SelectionRecord> {
    let method = result
        .method
        .map(|f| f.label().to_string())
        .unwrap_or_default();
    result
        .chosen
        .iter()
        .enumerate()
        .map(|(k, &j)| SelectionRecord {
            rank: k + 1,
            column: names
                .get(j)
                .cloned()
                .unwrap_or_else(|| format!("var{j}")),
            residual_trace: result.residual_trace[k + 1],
            method: method.clone(),
        })
        .collect()
}

/// Write records as CSV with a header row.
pub fn write_records_csv<T: Serialize, W: Write>(records: &[T], writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Write records as a JSON object `{"records": [...]}`.
pub fn write_records_json<T: Serialize, W: Write>(
    records: &[T],
    writer: W,
) -> serde_json::Result<()> {
    #[derive(Serialize)]
    struct Doc<'a, T> {
        records: &'a [T],
    }
    serde_json::to_writer_pretty(writer, &Doc { records })
}

/// Read back `{"records": [...]}`.
pub fn read_records_json<T: for<'de> Deserialize<'de>, R: Read>(reader: R) -> Result<Vec<T>> {
    #[derive(Deserialize)]
    struct Doc<T> {
        records: Vec<T>,
    }
    let doc: Doc<T> = serde_json::from_reader(reader).map_err(|cause| Error::Json {
        path: "<json>".to_string(),
        cause,
    })?;
    Ok(doc.records)
}

/// Serialized correlation-matrix document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub names: Vec<String>,
    pub family: Option<CorrelationFamily>,
    pub repaired: bool,
    pub clamped: Vec<(usize, usize)>,
    pub values: Vec<Vec<f64>>,
}

impl MatrixDoc {
    pub fn from_matrix(m: &CorrelationMatrix, names: &[String]) -> Self {
        let p = m.p();
        Self {
            names: names.to_vec(),
            family: m.family(),
            repaired: m.repaired(),
            clamped: m.clamped().to_vec(),
            values: (0..p)
                .map(|i| (0..p).map(|j| m.values()[(i, j)]).collect())
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<CorrelationMatrix> {
        let p = self.values.len();
        let mut values = DMatrix::<f64>::zeros(p, p);
        for (i, row) in self.values.iter().enumerate() {
            if row.len() != p {
                return Err(Error::SchemaLengthMismatch {
                    schema: p,
                    data: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                values[(i, j)] = v;
            }
        }
        let mut m = CorrelationMatrix::new(values, self.family)?;
        if self.repaired {
            // Preserve flags through the round trip.
            m = CorrelationMatrix::from_validated(
                m.values().clone(),
                self.family,
                true,
                self.clamped.clone(),
            );
        } else if !self.clamped.is_empty() {
            m = CorrelationMatrix::from_validated(
                m.values().clone(),
                self.family,
                false,
                self.clamped.clone(),
            );
        }
        Ok(m)
    }
}

/// Write a correlation matrix as CSV: header = names, then p value rows.
pub fn write_matrix_csv<W: Write>(
    m: &CorrelationMatrix,
    names: &[String],
    writer: W,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(names)?;
    for i in 0..m.p() {
        let row: Vec<String> = (0..m.p()).map(|j| format!("{}", m.values()[(i, j)])).collect();
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Read a correlation matrix written by [`write_matrix_csv`].
pub fn read_matrix_csv(path: &Path) -> Result<(Vec<String>, CorrelationMatrix)> {
    let path_str = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|cause| Error::Csv {
            path: path_str.clone(),
            cause,
        })?;
    let names: Vec<String> = reader
        .headers()
        .map_err(|cause| Error::Csv {
            path: path_str.clone(),
            cause,
        })?
        .iter()
        .map(|h| h.to_string())
        .collect();
    let p = names.len();
    let mut values = DMatrix::<f64>::zeros(p, p);
    let mut count = 0usize;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|cause| Error::Csv {
            path: path_str.clone(),
            cause,
        })?;
        if i >= p {
            return Err(Error::SchemaLengthMismatch { schema: p, data: i + 1 });
        }
        for j in 0..p {
            let cell = record.get(j).unwrap_or("");
            values[(i, j)] = cell.parse().map_err(|_| Error::NonNumericCell {
                row: i + 1,
                column: names[j].clone(),
                value: cell.to_string(),
            })?;
        }
        count += 1;
    }
    if count != p {
        return Err(Error::SchemaLengthMismatch {
            schema: p,
            data: count,
        });
    }
    Ok((names, CorrelationMatrix::new(values, None)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::TidyRecord;
    use std::io::Write;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    #[test]
    fn loads_simple_csv() {
        let f = write_temp("a,b,c\n1,2.5,3\n2,3.5,3\n3,4.5,1\n4,0.5,1\n5,9.5,2\n");
        let ds = load_csv(f.path(), None, DEFAULT_MAX_LEVELS).unwrap();
        assert_eq!(ds.n(), 5);
        assert_eq!(ds.p(), 3);
        assert_eq!(ds.names(), &["a", "b", "c"]);
        // a: integers, 5 distinct → ordinal(5); b: non-integers → continuous;
        // c: integers, 3 distinct → ordinal(3).
        assert_eq!(
            ds.schema().kinds,
            vec![
                VariableKind::Ordinal { levels: 5 },
                VariableKind::Continuous,
                VariableKind::Ordinal { levels: 3 }
            ]
        );
        assert_eq!(ds.schema().source, SchemaSource::Inferred);
    }

    #[test]
    fn missing_cell_names_row_and_column() {
        let f = write_temp("x,BFM_walk\n1,2\n3,\n5,6\n");
        match load_csv(f.path(), None, DEFAULT_MAX_LEVELS) {
            Err(Error::MissingCell { row: 2, column }) => assert_eq!(column, "BFM_walk"),
            other => panic!("expected MissingCell at row 2, got {other:?}"),
        }
    }

    #[test]
    fn non_numeric_cell_is_rejected() {
        let f = write_temp("x,y\n1,2\n3,abc\n");
        match load_csv(f.path(), None, DEFAULT_MAX_LEVELS) {
            Err(Error::NonNumericCell { row: 2, column, value }) => {
                assert_eq!(column, "y");
                assert_eq!(value, "abc");
            }
            other => panic!("expected NonNumericCell, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_header_is_rejected() {
        let f = write_temp("x,x\n1,2\n");
        assert!(matches!(
            load_csv(f.path(), None, DEFAULT_MAX_LEVELS),
            Err(Error::DuplicateName { .. })
        ));
    }

    #[test]
    fn schema_inference_rules() {
        let m = DMatrix::from_row_slice(
            4,
            3,
            &[
                1.0, 1.0, 1.5, //
                2.0, 25.0, 2.5, //
                3.0, 50.0, 3.0, //
                4.0, 75.0, 4.5,
            ],
        );
        let s = infer_schema(&m, 10).unwrap();
        assert_eq!(s.kinds[0], VariableKind::Ordinal { levels: 4 });
        // 4 distinct integers ≤ 10 — still ordinal even with big codes.
        assert_eq!(s.kinds[1], VariableKind::Ordinal { levels: 4 });
        assert_eq!(s.kinds[2], VariableKind::Continuous);

        // More distinct integers than max_levels → continuous.
        let wide = DMatrix::from_fn(25, 1, |i, _| i as f64);
        let s = infer_schema(&wide, 10).unwrap();
        assert_eq!(s.kinds[0], VariableKind::Continuous);

        let constant = DMatrix::from_fn(5, 1, |_, _| 3.0);
        assert!(matches!(
            infer_schema(&constant, 10),
            Err(Error::ConstantColumn { column: 0 })
        ));
    }

    #[test]
    fn schema_inference_invariant_to_row_order() {
        let m = DMatrix::from_row_slice(4, 2, &[1.0, 0.5, 2.0, 1.5, 3.0, 2.25, 1.0, 0.125]);
        let permuted = DMatrix::from_row_slice(4, 2, &[1.0, 0.125, 3.0, 2.25, 1.0, 0.5, 2.0, 1.5]);
        assert_eq!(infer_schema(&m, 10).unwrap(), infer_schema(&permuted, 10).unwrap());
    }

    #[test]
    fn declared_schema_overrides_and_validates() {
        let f = write_temp("a,b\n1,0.5\n2,1.5\n1,2.5\n2,0.25\n");
        let schema = vec![
            ("a".to_string(), KindDecl::Ordinal(Some(4))),
            ("b".to_string(), KindDecl::Continuous),
        ];
        let ds = load_csv(f.path(), Some(&schema), DEFAULT_MAX_LEVELS).unwrap();
        assert_eq!(ds.schema().source, SchemaSource::Declared);
        assert_eq!(ds.schema().kinds[0], VariableKind::Ordinal { levels: 4 });

        // Declaring the continuous column ordinal must fail (non-integers).
        let bad = vec![
            ("a".to_string(), KindDecl::Ordinal(None)),
            ("b".to_string(), KindDecl::Ordinal(None)),
        ];
        match load_csv(f.path(), Some(&bad), DEFAULT_MAX_LEVELS) {
            Err(Error::OrdinalNotInteger { column, .. }) => assert_eq!(column, "b"),
            other => panic!("expected OrdinalNotInteger, got {other:?}"),
        }
    }

    #[test]
    fn schema_file_round_trip() {
        let f = write_temp("name,kind\nage,continuous\nscore,ordinal:5\ngrade,ordinal\n");
        let entries = load_schema_file(f.path()).unwrap();
        assert_eq!(entries.len(), 3);
        assert_eq!(entries[0], ("age".to_string(), KindDecl::Continuous));
        assert_eq!(entries[1], ("score".to_string(), KindDecl::Ordinal(Some(5))));
        assert_eq!(entries[2], ("grade".to_string(), KindDecl::Ordinal(None)));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let f = write_temp("u,v\n0.1234567890123456,7\n-3.25e-7,8\n1e300,9\n");
        let ds = load_csv(f.path(), None, DEFAULT_MAX_LEVELS).unwrap();
        let mut buf = Vec::new();
        ds.write_csv(&mut buf).unwrap();
        let f2 = write_temp(std::str::from_utf8(&buf).unwrap());
        let ds2 = load_csv(f2.path(), None, DEFAULT_MAX_LEVELS).unwrap();
        assert_eq!(ds, ds2);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let f = write_temp("u,v\n0.5,1\n2.5,2\n3.5,1\n");
        let ds = load_csv(f.path(), None, DEFAULT_MAX_LEVELS).unwrap();
        let mut buf = Vec::new();
        ds.write_json(&mut buf).unwrap();
        let ds2 = Dataset::read_json(buf.as_slice()).unwrap();
        assert_eq!(ds, ds2);
    }

    #[test]
    fn selection_records_layout() {
        use crate::select::LatentFamily;
        let result = SelectionResult {
            chosen: vec![2, 0, 1],
            residual_trace: vec![3.0, 2.1, 1.5, 0.9],
            method: Some(CorrelationFamily::Spearman),
            family: LatentFamily::Gaussian,
            repaired: false,
        };
        let names = vec!["x".to_string(), "y".to_string(), "z".to_string()];
        let records = selection_records(&result, &names);
        assert_eq!(records.len(), 3);
        assert_eq!(records[0].rank, 1);
        assert_eq!(records[0].column, "z");
        assert_eq!(records[0].residual_trace, 2.1);
        assert_eq!(records[2].rank, 3);
        assert_eq!(records[2].column, "y");
        assert_eq!(records[0].method, "spearman");
    }

    #[test]
    fn records_json_round_trip() {
        let records = vec![
            SelectionRecord {
                rank: 1,
                column: "a".into(),
                residual_trace: 2.5,
                method: "pearson".into(),
            },
            SelectionRecord {
                rank: 2,
                column: "b".into(),
                residual_trace: 1.5,
                method: "pearson".into(),
            },
        ];
        let mut buf = Vec::new();
        write_records_json(&records, &mut buf).unwrap();
        let back: Vec<SelectionRecord> = read_records_json(buf.as_slice()).unwrap();
        assert_eq!(records, back);
    }

    #[test]
    fn tidy_records_csv_has_header_and_rows() {
        let record = TidyRecord {
            n: 100,
            q: 5,
            p: 10,
            transform: "ordinal".into(),
            targets: "ideal".into(),
            family: "gaussian".into(),
            family_param: None,
            method: "polychoric".into(),
            metric: "ree".into(),
            mean: 0.98,
            stderr: 0.002,
            replicates: 200,
            excluded: 1,
        };
        let mut buf = Vec::new();
        write_records_csv(&[record], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "n,q,p,transform,targets,family,family_param,method,metric,mean,stderr,replicates,excluded"
        );
        assert_eq!(lines.next().unwrap(), "100,5,10,ordinal,ideal,gaussian,,polychoric,ree,0.98,0.002,200,1");
    }

    #[test]
    fn matrix_csv_round_trip() {
        let values = nalgebra::dmatrix![1.0, 0.25; 0.25, 1.0];
        let m = CorrelationMatrix::new(values, Some(CorrelationFamily::Pearson)).unwrap();
        let names = vec!["a".to_string(), "b".to_string()];
        let mut buf = Vec::new();
        write_matrix_csv(&m, &names, &mut buf).unwrap();
        let f = write_temp(std::str::from_utf8(&buf).unwrap());
        let (names2, m2) = read_matrix_csv(f.path()).unwrap();
        assert_eq!(names, names2);
        assert_eq!(m.values(), m2.values());
    }

    #[test]
    fn matrix_doc_round_trip_keeps_flags() {
        let values = nalgebra::dmatrix![1.0, 0.25; 0.25, 1.0];
        let m = CorrelationMatrix::from_validated(
            values,
            Some(CorrelationFamily::Polychoric),
            true,
            vec![(0, 1)],
        );
        let names = vec!["a".to_string(), "b".to_string()];
        let doc = MatrixDoc::from_matrix(&m, &names);
        let json = serde_json::to_string(&doc).unwrap();
        let back: MatrixDoc = serde_json::from_str(&json).unwrap();
        let m2 = back.to_matrix().unwrap();
        assert!(m2.repaired());
        assert_eq!(m2.clamped(), &[(0, 1)]);
        assert_eq!(m2.family(), Some(CorrelationFamily::Polychoric));
    }
}
