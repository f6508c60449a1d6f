//! Data ingestion, validation and structural transforms.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

/// Group labels for each row, with groups numbered in order of first
/// appearance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labels {
    names: Vec<String>,
    ids: Vec<usize>,
}

impl Labels {
    pub fn new<S: AsRef<str>>(raw: &[S]) -> Self {
        let mut index: HashMap<&str, usize> = HashMap::new();
        let mut names = Vec::new();
        let mut ids = Vec::with_capacity(raw.len());
        for s in raw {
            let s = s.as_ref();
            let next = names.len();
            let id = *index.entry(s).or_insert_with(|| {
                names.push(s.to_string());
                next
            });
            ids.push(id);
        }
        Self { names, ids }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn n_groups(&self) -> usize {
        self.names.len()
    }

    pub fn id(&self, row: usize) -> usize {
        self.ids[row]
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn name(&self, group: usize) -> &str {
        &self.names[group]
    }

    pub fn label(&self, row: usize) -> &str {
        &self.names[self.ids[row]]
    }

    /// Row indices of each group, groups in first-appearance order.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.names.len()];
        for (row, &g) in self.ids.iter().enumerate() {
            out[g].push(row);
        }
        out
    }

    fn select(&self, rows: &[usize]) -> Self {
        let raw: Vec<&str> = rows.iter().map(|&r| self.label(r)).collect();
        Self::new(&raw)
    }
}

/// Covariates, response, optional cluster and panel labels.
#[derive(Debug, Clone)]
pub struct Dataset<T> {
    x: Matrix<T>,
    y: Vec<T>,
    col_names: Vec<String>,
    y_name: String,
    cluster: Option<Labels>,
    unit: Option<Labels>,
    time: Option<Labels>,
}

impl<T: Real> Dataset<T> {
    pub fn new(x: Matrix<T>, y: Vec<T>) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::EmptyTable);
        }
        if x.rows() != y.len() {
            return Err(Error::LengthMismatch {
                what: "covariate matrix",
                got: x.rows(),
                expected: y.len(),
            });
        }
        if x.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("covariates"));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("response"));
        }
        let col_names = (1..=x.cols()).map(|j| format!("x{j}")).collect();
        Ok(Self {
            x,
            y,
            col_names,
            y_name: "y".into(),
            cluster: None,
            unit: None,
            time: None,
        })
    }

    /// Single-covariate dataset, the shape used by the series methods.
    pub fn from_scalar(x: Vec<T>, y: Vec<T>) -> Result<Self> {
        let n = x.len();
        Self::new(Matrix::from_row_major(n, 1, x), y)
    }

    pub fn with_col_names(mut self, names: Vec<String>, y_name: impl Into<String>) -> Result<Self> {
        if names.len() != self.x.cols() {
            return Err(Error::LengthMismatch {
                what: "column names",
                got: names.len(),
                expected: self.x.cols(),
            });
        }
        self.col_names = names;
        self.y_name = y_name.into();
        Ok(self)
    }

    pub fn with_clusters(mut self, labels: Labels) -> Result<Self> {
        self.check_labels(&labels, "cluster")?;
        self.cluster = Some(labels);
        Ok(self)
    }

    pub fn with_panel(mut self, unit: Labels, time: Labels) -> Result<Self> {
        self.check_labels(&unit, "unit")?;
        self.check_labels(&time, "time")?;
        self.unit = Some(unit);
        self.time = Some(time);
        Ok(self)
    }

    fn check_labels(&self, labels: &Labels, what: &'static str) -> Result<()> {
        if labels.len() != self.n() {
            return Err(Error::LengthMismatch {
                what,
                got: labels.len(),
                expected: self.n(),
            });
        }
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.y.len()
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.x.cols()
    }

    pub fn x(&self) -> &Matrix<T> {
        &self.x
    }

    pub fn y(&self) -> &[T] {
        &self.y
    }

    pub fn col_names(&self) -> &[String] {
        &self.col_names
    }

    pub fn y_name(&self) -> &str {
        &self.y_name
    }

    pub fn cluster(&self) -> Option<&Labels> {
        self.cluster.as_ref()
    }

    pub fn unit(&self) -> Option<&Labels> {
        self.unit.as_ref()
    }

    pub fn time(&self) -> Option<&Labels> {
        self.time.as_ref()
    }

    /// The single covariate of a series-regression dataset.
    pub fn scalar_covariate(&self) -> Result<Vec<T>> {
        if self.p() != 1 {
            return Err(Error::NotScalarCovariate(self.p()));
        }
        Ok(self.x.column(0))
    }

    /// Same covariates with a replacement response.
    pub fn with_response(&self, y: Vec<T>) -> Result<Self> {
        if y.len() != self.n() {
            return Err(Error::LengthMismatch {
                what: "response",
                got: y.len(),
                expected: self.n(),
            });
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("response"));
        }
        let mut d = self.clone();
        d.y = y;
        Ok(d)
    }

    /// Rows `idx` in the given order; labels are carried along.
    pub fn subset(&self, idx: &[usize]) -> Self {
        Self {
            x: self.x.select_rows(idx),
            y: idx.iter().map(|&i| self.y[i]).collect(),
            col_names: self.col_names.clone(),
            y_name: self.y_name.clone(),
            cluster: self.cluster.as_ref().map(|l| l.select(idx)),
            unit: self.unit.as_ref().map(|l| l.select(idx)),
            time: self.time.as_ref().map(|l| l.select(idx)),
        }
    }

    /// Divides every covariate by its root mean square. All-zero columns
    /// are left untouched.
    pub fn normalize_columns(&self) -> Self {
        let (n, p) = (self.n(), self.p());
        let nt = T::from_usize_lossy(n);
        let scales: Vec<T> = (0..p)
            .map(|j| {
                let ms = (0..n).map(|i| self.x.get(i, j).powi(2)).sum::<T>() / nt;
                if ms > T::zero() {
                    ms.sqrt()
                } else {
                    T::one()
                }
            })
            .collect();
        let x = Matrix::from_fn(n, p, |i, j| self.x.get(i, j) / scales[j]);
        Self { x, ..self.clone() }
    }

    /// Subtracts per-unit time means from the response and every covariate.
    /// The result is clustered by unit.
    pub fn within_transform(&self) -> Result<Self> {
        let unit = self.unit.as_ref().ok_or(Error::MissingLabels("unit"))?;
        let time = self.time.as_ref().ok_or(Error::MissingLabels("time"))?;
        let (n_units, n_times) = (unit.n_groups(), time.n_groups());
        if n_times < 2 {
            return Err(Error::SingleTimePeriod);
        }
        if n_units * n_times != self.n() {
            return Err(Error::IncompletePanel(format!(
                "{} rows for {} units x {} periods",
                self.n(),
                n_units,
                n_times
            )));
        }
        let mut seen = vec![false; n_units * n_times];
        for row in 0..self.n() {
            let cell = unit.id(row) * n_times + time.id(row);
            if std::mem::replace(&mut seen[cell], true) {
                return Err(Error::IncompletePanel(format!(
                    "unit `{}` observed twice in period `{}`",
                    unit.label(row),
                    time.label(row)
                )));
            }
        }

        let p = self.p();
        let tt = T::from_usize_lossy(n_times);
        let mut y_mean = vec![T::zero(); n_units];
        let mut x_mean = vec![T::zero(); n_units * p];
        for row in 0..self.n() {
            let u = unit.id(row);
            y_mean[u] += self.y[row];
            for (m, &v) in x_mean[u * p..(u + 1) * p].iter_mut().zip(self.x.row(row)) {
                *m += v;
            }
        }
        y_mean.iter_mut().for_each(|m| *m /= tt);
        x_mean.iter_mut().for_each(|m| *m /= tt);

        let y = (0..self.n()).map(|r| self.y[r] - y_mean[unit.id(r)]).collect();
        let x = Matrix::from_fn(self.n(), p, |r, j| {
            self.x.get(r, j) - x_mean[unit.id(r) * p + j]
        });
        Ok(Self {
            x,
            y,
            col_names: self.col_names.clone(),
            y_name: self.y_name.clone(),
            cluster: Some(unit.clone()),
            unit: self.unit.clone(),
            time: self.time.clone(),
        })
    }
}

/// Column roles for [`load_table`].
#[derive(Debug, Clone, Default)]
pub struct TableSchema {
    pub y: String,
    /// Covariate columns; empty selects every column without another role.
    pub x: Vec<String>,
    pub cluster: Option<String>,
    pub unit: Option<String>,
    pub time: Option<String>,
    pub normalize_columns: bool,
}

impl TableSchema {
    pub fn response(y: impl Into<String>) -> Self {
        Self {
            y: y.into(),
            ..Self::default()
        }
    }
}

pub fn load_table<T: Real>(path: impl AsRef<Path>, schema: &TableSchema) -> Result<Dataset<T>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_table(file, schema)
}

/// Parses a headed CSV table from any reader.
pub fn read_table<T: Real, R: Read>(reader: R, schema: &TableSchema) -> Result<Dataset<T>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let find = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    };
    let y_col = find(&schema.y)?;
    let cluster_col = schema.cluster.as_deref().map(find).transpose()?;
    let unit_col = schema.unit.as_deref().map(find).transpose()?;
    let time_col = schema.time.as_deref().map(find).transpose()?;
    let x_cols: Vec<usize> = if schema.x.is_empty() {
        let taken = [Some(y_col), cluster_col, unit_col, time_col];
        (0..header.len()).filter(|c| !taken.contains(&Some(*c))).collect()
    } else {
        schema.x.iter().map(|s| find(s)).collect::<Result<_>>()?
    };
    if x_cols.is_empty() {
        return Err(Error::InvalidArgument("schema names no covariate column".into()));
    }

    let parse = |rec: &csv::StringRecord, row: usize, col: usize| -> Result<T> {
        let cell = rec.get(col).unwrap_or("").trim();
        cell.parse::<f64>()
            .ok()
            .and_then(T::from_f64)
            .ok_or(Error::NonNumericCell { row, col: col + 1 })
    };
    let label = |rec: &csv::StringRecord, row: usize, col: usize| -> Result<String> {
        let cell = rec.get(col).unwrap_or("").trim();
        if cell.is_empty() {
            return Err(Error::InvalidArgument(format!("empty label at ({row},{})", col + 1)));
        }
        Ok(cell.to_string())
    };

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let (mut cl, mut un, mut tm) = (Vec::new(), Vec::new(), Vec::new());
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = r + 1;
        ys.push(parse(&rec, row, y_col)?);
        for &c in &x_cols {
            xs.push(parse(&rec, row, c)?);
        }
        if let Some(c) = cluster_col {
            cl.push(label(&rec, row, c)?);
        }
        if let Some(c) = unit_col {
            un.push(label(&rec, row, c)?);
        }
        if let Some(c) = time_col {
            tm.push(label(&rec, row, c)?);
        }
    }
    if ys.is_empty() {
        return Err(Error::EmptyTable);
    }
    let n = ys.len();
    let names = x_cols.iter().map(|&c| header[c].clone()).collect();
    let mut d = Dataset::new(Matrix::from_row_major(n, x_cols.len(), xs), ys)?
        .with_col_names(names, schema.y.clone())?;
    if cluster_col.is_some() {
        d = d.with_clusters(Labels::new(&cl))?;
    }
    match (unit_col, time_col) {
        (Some(_), Some(_)) => d = d.with_panel(Labels::new(&un), Labels::new(&tm))?,
        (None, None) => {}
        _ => {
            return Err(Error::InvalidArgument(
                "panel data needs both unit and time columns".into(),
            ))
        }
    }
    if schema.normalize_columns {
        d = d.normalize_columns();
    }
    Ok(d)
}

/// Writes the dataset as a headed CSV table readable by [`read_table`].
pub fn write_table<T: Real, W: Write>(d: &Dataset<T>, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = vec![d.y_name.clone()];
    header.extend(d.col_names.iter().cloned());
    let label_cols: Vec<(&str, &Labels)> = [
        ("cluster", d.cluster.as_ref()),
        ("unit", d.unit.as_ref()),
        ("time", d.time.as_ref()),
    ]
    .into_iter()
    .filter_map(|(k, l)| l.map(|l| (k, l)))
    .collect();
    header.extend(label_cols.iter().map(|(k, _)| k.to_string()));
    w.write_record(&header)?;
    for i in 0..d.n() {
        let mut rec: Vec<String> = vec![d.y[i].to_string()];
        rec.extend(d.x.row(i).iter().map(|v| v.to_string()));
        rec.extend(label_cols.iter().map(|(_, l)| l.label(i).to_string()));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: "<writer>".into(),
        source,
    })?;
    Ok(())
}

pub fn save_table<T: Real>(d: &Dataset<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_table(d, file)
}
