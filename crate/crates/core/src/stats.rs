//! Per-category conditional class probabilities, counted on a training split.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::dataset::{CategoryId, ClassLabel, Dataset};
use crate::error::{Error, Result};

/// Counts and conditional probabilities for one category of one variable.
/// `p1` is P(normal | category), `p2` is P(attack | category); they always
/// sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryRecord {
    pub category: CategoryId,
    pub name: String,
    pub count_total: u64,
    pub count_c1: u64,
    pub count_c2: u64,
    pub p1: f64,
    pub p2: f64,
}

/// Fitted per-category statistics for one categorical variable.
/// Records are kept in first-appearance order; lookups go through an index.
#[derive(Debug, Clone)]
pub struct CategoryStats {
    variable: String,
    records: Vec<CategoryRecord>,
    by_id: HashMap<CategoryId, usize>,
}

impl CategoryStats {
    /// Build from pre-counted records. Validates the count/probability
    /// invariants; mainly useful for constructing synthetic stats in tests.
    pub fn from_records(variable: impl Into<String>, records: Vec<CategoryRecord>) -> Result<Self> {
        for rec in &records {
            if rec.count_total == 0 {
                return Err(Error::InvalidParam(format!(
                    "category '{}' has zero count",
                    rec.name
                )));
            }
            if rec.count_c1 + rec.count_c2 != rec.count_total {
                return Err(Error::InvalidParam(format!(
                    "category '{}': class counts do not sum to total",
                    rec.name
                )));
            }
        }
        let by_id = records
            .iter()
            .enumerate()
            .map(|(i, r)| (r.category, i))
            .collect();
        Ok(CategoryStats {
            variable: variable.into(),
            records,
            by_id,
        })
    }

    pub fn variable(&self) -> &str {
        &self.variable
    }

    pub fn records(&self) -> &[CategoryRecord] {
        &self.records
    }

    /// Stored (p1, p2) for a category id, or `None` when the category was not
    /// seen at fit time.
    pub fn lookup(&self, category: CategoryId) -> Option<(f64, f64)> {
        self.by_id
            .get(&category)
            .map(|&i| (self.records[i].p1, self.records[i].p2))
    }

    /// Same lookup keyed by resolved category string.
    pub fn lookup_str(&self, name: &str) -> Option<(f64, f64)> {
        self.records
            .iter()
            .find(|r| r.name == name)
            .map(|r| (r.p1, r.p2))
    }

    /// Debug dump, one line per category.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("variable,category,count_c1,count_c2,p1,p2\n");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                self.variable, r.name, r.count_c1, r.count_c2, r.p1, r.p2
            );
        }
        out
    }
}

/// Count per-category class occurrences for `variable` and derive the
/// conditional probabilities by exact division.
pub fn fit_stats(ds: &Dataset, variable: &str) -> Result<CategoryStats> {
    if ds.n_rows() == 0 {
        return Err(Error::EmptyDataset);
    }
    let col = ds.categorical_column(variable)?;
    let mut order: Vec<CategoryId> = Vec::new();
    let mut counts: HashMap<CategoryId, (u64, u64)> = HashMap::new();
    for row in 0..ds.n_rows() {
        let id = ds.category_at(row, col);
        let entry = counts.entry(id).or_insert_with(|| {
            order.push(id);
            (0, 0)
        });
        match ds.target()[row] {
            ClassLabel::Normal => entry.0 += 1,
            ClassLabel::Attack => entry.1 += 1,
        }
    }
    let records = order
        .into_iter()
        .map(|id| {
            let (c1, c2) = counts[&id];
            let total = c1 + c2;
            CategoryRecord {
                category: id,
                name: ds.resolve(id).to_string(),
                count_total: total,
                count_c1: c1,
                count_c2: c2,
                p1: c1 as f64 / total as f64,
                p2: c2 as f64 / total as f64,
            }
        })
        .collect();
    CategoryStats::from_records(variable, records)
}

/// Fit stats for every categorical variable, in schema order.
pub fn fit_all_stats(ds: &Dataset) -> Result<Vec<CategoryStats>> {
    let names: Vec<String> = ds.schema().categorical().map(|c| c.name.clone()).collect();
    names.iter().map(|name| fit_stats(ds, name)).collect()
}
