//! Columnar dataset with categorical, numeric, label and difficulty columns,
//! plus the NSL-KDD flat-file parser.
//!
//! Rows are stored row-major; categorical cells are interned string ids that
//! resolve through the dataset's intern table. The target is binarized at
//! parse time: a label equal to `"normal"` (trimmed, case-sensitive) is the
//! normal class, anything else is attack.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// What a column holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Categorical,
    Numeric,
    Label,
    Difficulty,
}

/// One column of the schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnSchema {
    pub name: String,
    pub kind: ColumnKind,
    /// 0-based column index in the source file.
    pub position: usize,
}

/// Ordered column list. Exactly one column is the label; positions are
/// contiguous from 0.
#[derive(Debug, Clone)]
pub struct Schema {
    columns: Vec<ColumnSchema>,
    label_index: usize,
    by_name: HashMap<String, usize>,
}

impl Schema {
    pub fn new(columns: Vec<ColumnSchema>) -> Result<Self> {
        let mut label = None;
        let mut by_name = HashMap::new();
        for (i, col) in columns.iter().enumerate() {
            if col.position != i {
                return Err(Error::SchemaMismatch(format!(
                    "column '{}' has position {}, expected {}",
                    col.name, col.position, i
                )));
            }
            if by_name.insert(col.name.clone(), i).is_some() {
                return Err(Error::SchemaMismatch(format!(
                    "duplicate column name '{}'",
                    col.name
                )));
            }
            if col.kind == ColumnKind::Label {
                if label.is_some() {
                    return Err(Error::SchemaMismatch("more than one label column".into()));
                }
                label = Some(i);
            }
        }
        let label_index =
            label.ok_or_else(|| Error::SchemaMismatch("no label column".into()))?;
        Ok(Schema {
            columns,
            label_index,
            by_name,
        })
    }

    /// The 43-column NSL-KDD layout: 41 features (3 categorical), label,
    /// difficulty.
    pub fn nslkdd() -> Self {
        const NAMES: [&str; 41] = [
            "duration",
            "protocol_type",
            "service",
            "flag",
            "src_bytes",
            "dst_bytes",
            "land",
            "wrong_fragment",
            "urgent",
            "hot",
            "num_failed_logins",
            "logged_in",
            "num_compromised",
            "root_shell",
            "su_attempted",
            "num_root",
            "num_file_creations",
            "num_shells",
            "num_access_files",
            "num_outbound_cmds",
            "is_host_login",
            "is_guest_login",
            "count",
            "srv_count",
            "serror_rate",
            "srv_serror_rate",
            "rerror_rate",
            "srv_rerror_rate",
            "same_srv_rate",
            "diff_srv_rate",
            "srv_diff_host_rate",
            "dst_host_count",
            "dst_host_srv_count",
            "dst_host_same_srv_rate",
            "dst_host_diff_srv_rate",
            "dst_host_same_src_port_rate",
            "dst_host_srv_diff_host_rate",
            "dst_host_serror_rate",
            "dst_host_srv_serror_rate",
            "dst_host_rerror_rate",
            "dst_host_srv_rerror_rate",
        ];
        let mut columns = Vec::with_capacity(43);
        for (i, name) in NAMES.iter().enumerate() {
            let kind = match i {
                1..=3 => ColumnKind::Categorical,
                _ => ColumnKind::Numeric,
            };
            columns.push(ColumnSchema {
                name: (*name).into(),
                kind,
                position: i,
            });
        }
        columns.push(ColumnSchema {
            name: "label".into(),
            kind: ColumnKind::Label,
            position: 41,
        });
        columns.push(ColumnSchema {
            name: "difficulty".into(),
            kind: ColumnKind::Difficulty,
            position: 42,
        });
        Schema::new(columns).expect("static schema is valid")
    }

    pub fn columns(&self) -> &[ColumnSchema] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn label_index(&self) -> usize {
        self.label_index
    }

    /// Categorical columns in schema order.
    pub fn categorical(&self) -> impl Iterator<Item = &ColumnSchema> {
        self.columns
            .iter()
            .filter(|c| c.kind == ColumnKind::Categorical)
    }
}

/// Interned categorical string id, local to one dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CategoryId(pub u32);

#[derive(Debug, Clone, Default)]
struct Interner {
    strings: Vec<String>,
    index: HashMap<String, CategoryId>,
}

impl Interner {
    fn intern(&mut self, s: &str) -> CategoryId {
        if let Some(&id) = self.index.get(s) {
            return id;
        }
        let id = CategoryId(self.strings.len() as u32);
        self.strings.push(s.to_owned());
        self.index.insert(s.to_owned(), id);
        id
    }

    fn resolve(&self, id: CategoryId) -> &str {
        &self.strings[id.0 as usize]
    }
}

/// Binary target class. `Normal` is the class of "normal" labels, `Attack`
/// everything else.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassLabel {
    Normal,
    Attack,
}

/// Which split a dataset plays in the benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Train,
    Test,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Cat(CategoryId),
    Num(f64),
}

/// Immutable parsed dataset. Safe to share across threads for reading.
#[derive(Debug, Clone)]
pub struct Dataset {
    schema: Schema,
    interner: Interner,
    cells: Vec<Cell>,
    target: Vec<ClassLabel>,
    role: Role,
}

/// Row counts, class fractions and per-variable cardinalities.
#[derive(Debug, Clone, PartialEq)]
pub struct BalanceReport {
    pub n_rows: usize,
    /// Fraction of normal (C1) rows.
    pub frac_normal: f64,
    /// Fraction of attack (C2) rows.
    pub frac_attack: f64,
    /// Unique-category count per categorical variable, over this dataset only.
    pub cardinalities: BTreeMap<String, usize>,
}

impl Dataset {
    /// Parse an NSL-KDD flat file (43 comma-separated fields, no header).
    pub fn parse_nslkdd(path: impl AsRef<Path>, role: Role) -> Result<Dataset> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        Dataset::parse_reader(
            BufReader::new(file),
            Schema::nslkdd(),
            role,
            &path.display().to_string(),
        )
    }

    /// Parse comma-separated rows matching `schema` from any reader.
    /// Blank lines are skipped; fields are trimmed before interpretation.
    pub fn parse_reader<R: Read>(
        reader: R,
        schema: Schema,
        role: Role,
        source: &str,
    ) -> Result<Dataset> {
        let n_cols = schema.len();
        let mut interner = Interner::default();
        let mut cells = Vec::new();
        let mut target = Vec::new();

        for (line_no, line) in BufReader::new(reader).lines().enumerate() {
            let line = line.map_err(|e| Error::io(source.to_string(), e))?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != n_cols {
                return Err(Error::FieldCount {
                    path: source.to_string(),
                    line: line_no + 1,
                    expected: n_cols,
                    found: fields.len(),
                });
            }
            for (col, raw) in schema.columns().iter().zip(&fields) {
                let value = raw.trim();
                match col.kind {
                    ColumnKind::Categorical => cells.push(Cell::Cat(interner.intern(value))),
                    ColumnKind::Numeric | ColumnKind::Difficulty => {
                        let v: f64 = value.parse().map_err(|_| Error::InvalidNumber {
                            path: source.to_string(),
                            line: line_no + 1,
                            column: col.name.clone(),
                            value: value.to_string(),
                        })?;
                        cells.push(Cell::Num(v));
                    }
                    ColumnKind::Label => {
                        target.push(if value == "normal" {
                            ClassLabel::Normal
                        } else {
                            ClassLabel::Attack
                        });
                        cells.push(Cell::Cat(interner.intern(value)));
                    }
                }
            }
        }
        if target.is_empty() {
            return Err(Error::EmptyInput(source.to_string()));
        }
        Ok(Dataset {
            schema,
            interner,
            cells,
            target,
            role,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.target.len()
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn target(&self) -> &[ClassLabel] {
        &self.target
    }

    pub fn cell(&self, row: usize, col: usize) -> Cell {
        self.cells[row * self.schema.len() + col]
    }

    /// Interned id at (row, col); panics if the column is numeric.
    pub fn category_at(&self, row: usize, col: usize) -> CategoryId {
        match self.cell(row, col) {
            Cell::Cat(id) => id,
            Cell::Num(_) => panic!("column {col} is not categorical"),
        }
    }

    pub fn numeric_at(&self, row: usize, col: usize) -> f64 {
        match self.cell(row, col) {
            Cell::Num(v) => v,
            Cell::Cat(_) => panic!("column {col} is not numeric"),
        }
    }

    pub fn resolve(&self, id: CategoryId) -> &str {
        self.interner.resolve(id)
    }

    pub fn category_id(&self, s: &str) -> Option<CategoryId> {
        self.interner.index.get(s).copied()
    }

    /// Column index of `variable`, checked to be categorical.
    pub fn categorical_column(&self, variable: &str) -> Result<usize> {
        let idx = self
            .schema
            .column_index(variable)
            .ok_or_else(|| Error::UnknownVariable(variable.to_string()))?;
        if self.schema.columns()[idx].kind != ColumnKind::Categorical {
            return Err(Error::NotCategorical(variable.to_string()));
        }
        Ok(idx)
    }

    /// Distinct category ids present in `variable`, in first-appearance order.
    pub fn categories_present(&self, variable: &str) -> Result<Vec<CategoryId>> {
        let col = self.categorical_column(variable)?;
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for row in 0..self.n_rows() {
            let id = self.category_at(row, col);
            if seen.insert(id) {
                out.push(id);
            }
        }
        Ok(out)
    }

    /// Serialize rows back to the source CSV shape (no header). Categorical
    /// cells print their resolved strings; numeric cells print the shortest
    /// representation that round-trips.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let n_cols = self.schema.len();
        for row in 0..self.n_rows() {
            for col in 0..n_cols {
                if col > 0 {
                    out.push(',');
                }
                match self.cell(row, col) {
                    Cell::Cat(id) => out.push_str(self.resolve(id)),
                    Cell::Num(v) => {
                        let _ = write!(out, "{v}");
                    }
                }
            }
            out.push('\n');
        }
        out
    }

    /// Stratified row subsample for desk-scale runs. Keeps at least one row
    /// per class and preserves original row order.
    pub fn subsample_stratified(&self, fraction: f64, seed: u64) -> Result<Dataset> {
        if !(0.0 < fraction && fraction <= 1.0) {
            return Err(Error::InvalidParam(format!(
                "subsample fraction {fraction} outside (0, 1]"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut chosen: Vec<usize> = Vec::new();
        for class in [ClassLabel::Normal, ClassLabel::Attack] {
            let mut idx: Vec<usize> = (0..self.n_rows())
                .filter(|&r| self.target[r] == class)
                .collect();
            if idx.is_empty() {
                continue;
            }
            let take = ((idx.len() as f64 * fraction).round() as usize).clamp(1, idx.len());
            idx.shuffle(&mut rng);
            chosen.extend_from_slice(&idx[..take]);
        }
        chosen.sort_unstable();
        let n_cols = self.schema.len();
        let mut cells = Vec::with_capacity(chosen.len() * n_cols);
        let mut target = Vec::with_capacity(chosen.len());
        for &row in &chosen {
            cells.extend_from_slice(&self.cells[row * n_cols..(row + 1) * n_cols]);
            target.push(self.target[row]);
        }
        Ok(Dataset {
            schema: self.schema.clone(),
            interner: self.interner.clone(),
            cells,
            target,
            role: self.role,
        })
    }
}

/// Exact-count class balance and per-variable cardinalities.
pub fn balance_report(ds: &Dataset) -> Result<BalanceReport> {
    if ds.n_rows() == 0 {
        return Err(Error::EmptyDataset);
    }
    let n = ds.n_rows();
    let n_normal = ds
        .target()
        .iter()
        .filter(|&&c| c == ClassLabel::Normal)
        .count();
    let mut cardinalities = BTreeMap::new();
    let names: Vec<String> = ds.schema().categorical().map(|c| c.name.clone()).collect();
    for name in names {
        let count = ds.categories_present(&name)?.len();
        cardinalities.insert(name, count);
    }
    Ok(BalanceReport {
        n_rows: n,
        frac_normal: n_normal as f64 / n as f64,
        frac_attack: (n - n_normal) as f64 / n as f64,
        cardinalities,
    })
}

/// Categories of `variable` present in `test` but absent from `train`,
/// compared by resolved string.
pub fn unseen_categories(
    train: &Dataset,
    test: &Dataset,
    variable: &str,
) -> Result<BTreeSet<String>> {
    let train_set: HashSet<&str> = train
        .categories_present(variable)?
        .into_iter()
        .map(|id| train.resolve(id))
        .collect();
    let mut out = BTreeSet::new();
    for id in test.categories_present(variable)? {
        let s = test.resolve(id);
        if !train_set.contains(s) {
            out.insert(s.to_string());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toy_schema() -> Schema {
        Schema::new(vec![
            ColumnSchema {
                name: "color".into(),
                kind: ColumnKind::Categorical,
                position: 0,
            },
            ColumnSchema {
                name: "size".into(),
                kind: ColumnKind::Numeric,
                position: 1,
            },
            ColumnSchema {
                name: "label".into(),
                kind: ColumnKind::Label,
                position: 2,
            },
        ])
        .unwrap()
    }

    pub(crate) fn toy_dataset(csv: &str) -> Dataset {
        Dataset::parse_reader(csv.as_bytes(), toy_schema(), Role::Train, "toy").unwrap()
    }

    fn synthetic_kdd_line() -> String {
        let mut fields = vec!["0".to_string(); 43];
        fields[1] = "tcp".into();
        fields[2] = "http".into();
        fields[3] = "SF".into();
        fields[41] = "normal".into();
        fields[42] = "21".into();
        fields.join(",")
    }

    #[test]
    fn parses_single_synthetic_line() {
        let line = synthetic_kdd_line();
        let ds =
            Dataset::parse_reader(line.as_bytes(), Schema::nslkdd(), Role::Train, "mem").unwrap();
        assert_eq!(ds.n_rows(), 1);
        assert_eq!(ds.target(), &[ClassLabel::Normal]);
        assert_eq!(ds.resolve(ds.category_at(0, 2)), "http");
        assert_eq!(ds.numeric_at(0, 42), 21.0);
    }

    #[test]
    fn attack_labels_binarize_to_attack() {
        let line = synthetic_kdd_line().replace("normal", "neptune");
        let ds =
            Dataset::parse_reader(line.as_bytes(), Schema::nslkdd(), Role::Train, "mem").unwrap();
        assert_eq!(ds.target(), &[ClassLabel::Attack]);
    }

    #[test]
    fn wrong_field_count_reports_line() {
        let text = format!("{}\n1,2,3\n", synthetic_kdd_line());
        let err = Dataset::parse_reader(text.as_bytes(), Schema::nslkdd(), Role::Train, "mem")
            .unwrap_err();
        match err {
            Error::FieldCount { line, found, .. } => {
                assert_eq!(line, 2);
                assert_eq!(found, 3);
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn empty_input_is_an_error() {
        let err =
            Dataset::parse_reader("".as_bytes(), Schema::nslkdd(), Role::Train, "mem").unwrap_err();
        assert!(matches!(err, Error::EmptyInput(_)));
    }

    #[test]
    fn bad_number_reports_column() {
        let line = synthetic_kdd_line().replacen('0', "zero", 1);
        let err = Dataset::parse_reader(line.as_bytes(), Schema::nslkdd(), Role::Train, "mem")
            .unwrap_err();
        match err {
            Error::InvalidNumber { column, value, .. } => {
                assert_eq!(column, "duration");
                assert_eq!(value, "zero");
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn balance_and_cardinalities() {
        let ds = toy_dataset("red,1,normal\nred,2,attack\nblue,3,attack\ngreen,4,attack\n");
        let rep = balance_report(&ds).unwrap();
        assert_eq!(rep.n_rows, 4);
        assert!((rep.frac_normal - 0.25).abs() < 1e-15);
        assert!((rep.frac_attack - 0.75).abs() < 1e-15);
        assert!((rep.frac_normal + rep.frac_attack - 1.0).abs() < 1e-12);
        assert_eq!(rep.cardinalities["color"], 3);
    }

    #[test]
    fn unseen_identity_is_empty() {
        let ds = toy_dataset("red,1,normal\nblue,2,attack\n");
        assert!(unseen_categories(&ds, &ds, "color").unwrap().is_empty());
    }

    #[test]
    fn unseen_detects_new_categories() {
        let train = toy_dataset("red,1,normal\nblue,2,attack\n");
        let test = toy_dataset("red,1,normal\nviolet,2,attack\n");
        let unseen = unseen_categories(&train, &test, "color").unwrap();
        assert_eq!(unseen.into_iter().collect::<Vec<_>>(), vec!["violet"]);
    }

    #[test]
    fn unseen_unknown_variable_errors() {
        let ds = toy_dataset("red,1,normal\n");
        assert!(matches!(
            unseen_categories(&ds, &ds, "shape"),
            Err(Error::UnknownVariable(_))
        ));
    }

    #[test]
    fn round_trip_preserves_rows() {
        let src = "red,1.5,normal\nblue,0.25,attack\nred,3,attack\n";
        let ds = toy_dataset(src);
        let csv = ds.to_csv();
        let ds2 = toy_dataset(&csv);
        assert_eq!(ds2.n_rows(), ds.n_rows());
        for row in 0..ds.n_rows() {
            assert_eq!(ds.resolve(ds.category_at(row, 0)), ds2.resolve(ds2.category_at(row, 0)));
            assert_eq!(ds.numeric_at(row, 1), ds2.numeric_at(row, 1));
            assert_eq!(ds.target()[row], ds2.target()[row]);
        }
    }

    #[test]
    fn parsing_preserves_order() {
        let ds = toy_dataset("a,1,normal\nb,2,normal\nc,3,attack\n");
        let names: Vec<&str> = (0..3).map(|r| ds.resolve(ds.category_at(r, 0))).collect();
        assert_eq!(names, vec!["a", "b", "c"]);
    }

    #[test]
    fn subsample_is_stratified_and_ordered() {
        let mut csv = String::new();
        for i in 0..50 {
            csv.push_str(&format!("c{i},1,normal\n"));
        }
        for i in 0..50 {
            csv.push_str(&format!("d{i},1,attack\n"));
        }
        let ds = toy_dataset(&csv);
        let sub = ds.subsample_stratified(0.2, 0).unwrap();
        assert_eq!(sub.n_rows(), 20);
        let n_normal = sub
            .target()
            .iter()
            .filter(|&&c| c == ClassLabel::Normal)
            .count();
        assert_eq!(n_normal, 10);
        // determinism
        let sub2 = ds.subsample_stratified(0.2, 0).unwrap();
        assert_eq!(sub.to_csv(), sub2.to_csv());
    }

    proptest! {
        #[test]
        fn round_trip_random_rows(rows in proptest::collection::vec(
            ("[a-z]{1,6}", 0.0f64..1000.0, prop::bool::ANY), 1..40)) {
            let mut csv = String::new();
            for (cat, num, is_normal) in &rows {
                let label = if *is_normal { "normal" } else { "attack" };
                csv.push_str(&format!("{cat},{num},{label}\n"));
            }
            let ds = toy_dataset(&csv);
            let ds2 = toy_dataset(&ds.to_csv());
            prop_assert_eq!(ds.n_rows(), rows.len());
            for row in 0..ds.n_rows() {
                prop_assert_eq!(
                    ds.resolve(ds.category_at(row, 0)),
                    ds2.resolve(ds2.category_at(row, 0))
                );
                prop_assert_eq!(ds.numeric_at(row, 1), ds2.numeric_at(row, 1));
            }
        }
    }
}
