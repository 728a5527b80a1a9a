//! CSV ingestion.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ghn::{Label, LabeledPoint};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot open {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: expected {expected} fields, found {found}")]
    Ragged {
        line: u64,
        expected: usize,
        found: usize,
    },

    #[error("line {line}, column {column}: '{value}' is not a number")]
    NonNumeric {
        line: u64,
        column: usize,
        value: String,
    },

    #[error("label column '{0}' not found")]
    UnknownLabelColumn(String),

    #[error("no feature columns besides the label")]
    NoFeatures,

    #[error("file has no data rows")]
    Empty,

    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Task {
    #[default]
    Classification,
    Regression,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Classification => "classification",
            Task::Regression => "regression",
        }
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "cls" | "classification" => Ok(Task::Classification),
            "reg" | "regression" => Ok(Task::Regression),
            other => Err(format!("unknown task '{other}' (expected cls or reg)")),
        }
    }
}

/// Label column given by header name or zero-based position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Name(String),
    Index(usize),
}

impl FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.to_string()),
        })
    }
}

impl fmt::Display for LabelColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelColumn::Name(n) => f.write_str(n),
            LabelColumn::Index(i) => write!(f, "{i}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DatasetSpec {
    pub path: PathBuf,
    pub label_column: LabelColumn,
    pub task: Task,
    pub has_header: bool,
    /// Field separator, `,` unless set.
    pub delimiter: u8,
}

impl DatasetSpec {
    pub fn new(path: impl Into<PathBuf>, label_column: LabelColumn, task: Task) -> Self {
        Self {
            path: path.into(),
            label_column,
            task,
            has_header: true,
            delimiter: b',',
        }
    }
}

/// Parsed rows plus the names needed for reporting.
#[derive(Debug, Clone)]
pub struct LoadedData {
    pub points: Vec<LabeledPoint>,
    pub feature_names: Vec<String>,
    /// Class names by dense id, in order of first appearance.
    pub class_names: Vec<String>,
}

impl LoadedData {
    pub fn dim(&self) -> usize {
        self.feature_names.len()
    }
}

fn resolve_label(spec: &DatasetSpec, header: Option<&csv::StringRecord>, width: usize) -> Result<usize, LoadError> {
    if let (LabelColumn::Name(name), Some(h)) = (&spec.label_column, header) {
        if let Some(i) = h.iter().position(|c| c.trim() == name) {
            return Ok(i);
        }
    }
    match &spec.label_column {
        LabelColumn::Index(i) if *i < width => Ok(*i),
        // a header cell may itself be numeric
        LabelColumn::Index(i) => match header.and_then(|h| h.iter().position(|c| c.trim() == i.to_string())) {
            Some(j) => Ok(j),
            None => Err(LoadError::UnknownLabelColumn(i.to_string())),
        },
        LabelColumn::Name(n) => Err(LoadError::UnknownLabelColumn(n.clone())),
    }
}

/// Reads a CSV into labeled points, preserving row order.
pub fn load_csv(spec: &DatasetSpec) -> Result<LoadedData, LoadError> {
    let file = std::fs::File::open(&spec.path).map_err(|source| LoadError::Io {
        path: spec.path.clone(),
        source,
    })?;
    load_reader(file, spec)
}

pub fn load_reader<R: std::io::Read>(mut reader: R, spec: &DatasetSpec) -> Result<LoadedData, LoadError> {
    let mut text = Vec::new();
    reader.read_to_end(&mut text).map_err(|source| LoadError::Io {
        path: spec.path.clone(),
        source,
    })?;
    // csv reports a CRLF record as starting on the previous line's '\n', so
    // skip terminator bytes and count lines from the real start
    let line_at = |byte: u64| {
        let start = text[byte as usize..]
            .iter()
            .position(|&b| b != b'\r' && b != b'\n')
            .map_or(text.len(), |off| byte as usize + off);
        1 + text[..start].iter().filter(|&&b| b == b'\n').count() as u64
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(spec.has_header)
        .delimiter(spec.delimiter)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_slice());

    let header = if spec.has_header {
        Some(rdr.headers()?.clone())
    } else {
        None
    };
    let mut records = rdr.records().peekable();
    let width = match (&header, records.peek()) {
        (Some(h), _) => h.len(),
        (None, Some(Ok(r))) => r.len(),
        (None, Some(Err(_))) => {
            return Err(records.next().unwrap().unwrap_err().into());
        }
        (None, None) => return Err(LoadError::Empty),
    };
    if width < 2 {
        return Err(LoadError::NoFeatures);
    }
    let label_at = resolve_label(spec, header.as_ref(), width)?;
    let feature_names = (0..width)
        .filter(|&c| c != label_at)
        .map(|c| match &header {
            Some(h) => h[c].to_string(),
            None => format!("f{c}"),
        })
        .collect();

    let mut class_names: Vec<String> = Vec::new();
    let mut points = Vec::new();
    for record in records {
        let record = record?;
        let line = record.position().map_or(0, |p| line_at(p.byte()));
        if record.len() != width {
            return Err(LoadError::Ragged {
                line,
                expected: width,
                found: record.len(),
            });
        }
        let number = |column: usize| {
            let text = &record[column];
            text.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| LoadError::NonNumeric {
                    line,
                    column,
                    value: text.to_string(),
                })
        };
        let coords = (0..width)
            .filter(|&c| c != label_at)
            .map(number)
            .collect::<Result<Vec<f64>, _>>()?;
        let label = match spec.task {
            Task::Regression => Label::Target(number(label_at)?),
            Task::Classification => {
                let name = &record[label_at];
                let id = match class_names.iter().position(|c| c == name) {
                    Some(id) => id,
                    None => {
                        class_names.push(name.to_string());
                        class_names.len() - 1
                    }
                };
                Label::Class(id as u32)
            }
        };
        points.push(LabeledPoint::new(coords, label));
    }
    if points.is_empty() {
        return Err(LoadError::Empty);
    }
    Ok(LoadedData {
        points,
        feature_names,
        class_names,
    })
}

/// Writes points as CSV with the label in the last column.
pub fn write_csv(path: &Path, points: &[LabeledPoint]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_path(path)?;
    let d = points.first().map_or(0, |p| p.coords.len());
    let mut header: Vec<String> = (0..d).map(|j| format!("x{j}")).collect();
    header.push("label".into());
    w.write_record(&header)?;
    for p in points {
        let mut row: Vec<String> = p.coords.iter().map(|v| v.to_string()).collect();
        row.push(match p.label {
            Label::Class(c) => c.to_string(),
            Label::Target(t) => t.to_string(),
        });
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(label: &str, task: Task) -> DatasetSpec {
        DatasetSpec::new("mem.csv", label.parse().unwrap(), task)
    }

    #[test]
    fn three_rows_with_header() {
        let text = "a,b,y\n1,2,cat\n3,4,dog\n5,6,cat\n";
        let data = load_reader(text.as_bytes(), &spec("y", Task::Classification)).unwrap();
        assert_eq!(data.points.len(), 3);
        assert_eq!(data.dim(), 2);
        assert_eq!(data.feature_names, vec!["a", "b"]);
        assert_eq!(data.class_names, vec!["cat", "dog"]);
        assert_eq!(data.points[1].coords, vec![3.0, 4.0]);
        assert_eq!(data.points[2].label, Label::Class(0));
    }

    #[test]
    fn label_by_index_and_without_header() {
        let text = "0.5,7,1.5\n1.5,8,2.5\n";
        let mut s = spec("1", Task::Regression);
        s.has_header = false;
        let data = load_reader(text.as_bytes(), &s).unwrap();
        assert_eq!(data.points[0].coords, vec![0.5, 1.5]);
        assert_eq!(data.points[1].label, Label::Target(8.0));
        assert_eq!(data.feature_names, vec!["f0", "f2"]);
    }

    #[test]
    fn ragged_row_names_its_line() {
        let text = "a,b,y\n1,2,x\n3,4\n";
        let err = load_reader(text.as_bytes(), &spec("y", Task::Classification)).unwrap_err();
        assert!(matches!(err, LoadError::Ragged { line: 3, expected: 3, found: 2 }), "{err}");
        assert!(err.to_string().contains("line 3"));
    }

    #[test]
    fn distinct_error_kinds() {
        let bad_number = "a,y\nx1,0\n";
        assert!(matches!(
            load_reader(bad_number.as_bytes(), &spec("y", Task::Classification)),
            Err(LoadError::NonNumeric { line: 2, column: 0, .. })
        ));
        assert!(matches!(
            load_reader("a,y\n1,z\n".as_bytes(), &spec("y", Task::Regression)),
            Err(LoadError::NonNumeric { column: 1, .. })
        ));
        assert!(matches!(
            load_reader("a,y\n1,0\n".as_bytes(), &spec("label", Task::Classification)),
            Err(LoadError::UnknownLabelColumn(_))
        ));
        assert!(matches!(
            load_reader("a,y\n1,0\n".as_bytes(), &spec("5", Task::Classification)),
            Err(LoadError::UnknownLabelColumn(_))
        ));
        assert!(matches!(
            load_reader("a,y\n".as_bytes(), &spec("y", Task::Classification)),
            Err(LoadError::Empty)
        ));
        assert!(matches!(
            load_reader("y\n1\n".as_bytes(), &spec("y", Task::Classification)),
            Err(LoadError::NoFeatures)
        ));
        let missing = DatasetSpec::new("/nonexistent/file.csv", LabelColumn::Index(0), Task::Regression);
        assert!(matches!(load_csv(&missing), Err(LoadError::Io { .. })));
    }

    #[test]
    fn crlf_line_numbers() {
        let text = "a,b,y\r\n1,2,x\r\n3,4,x\r\n5,oops,x\r\n";
        let err = load_reader(text.as_bytes(), &spec("y", Task::Classification)).unwrap_err();
        assert!(matches!(err, LoadError::NonNumeric { line: 4, column: 1, .. }), "{err}");
    }

    #[test]
    fn quoted_fields_follow_rfc4180() {
        let text = "\"a\",\"b, c\",y\n1,\"2.5\",\"big, red\"\n";
        let data = load_reader(text.as_bytes(), &spec("y", Task::Classification)).unwrap();
        assert_eq!(data.feature_names, vec!["a", "b, c"]);
        assert_eq!(data.points[0].coords, vec![1.0, 2.5]);
        assert_eq!(data.class_names, vec!["big, red"]);
    }
}
