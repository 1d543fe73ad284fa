use crate::error::{Error, Result};
use crate::eval::rank_row;

/// Accuracy ties within this distance count as ties.
pub const TIE_TOL: f64 = 1e-9;

/// Cross-validated accuracy and time of one classifier on one dataset.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Cell {
    pub acc_mean: f64,
    pub acc_std: f64,
    pub time_mean: f64,
    pub time_std: f64,
}

/// Datasets × classifiers grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultTable {
    datasets: Vec<String>,
    classifiers: Vec<String>,
    cells: Vec<Vec<Cell>>,
}

impl ResultTable {
    pub fn new(
        datasets: Vec<String>,
        classifiers: Vec<String>,
        cells: Vec<Vec<Cell>>,
    ) -> Result<Self> {
        if datasets.is_empty() || classifiers.is_empty() {
            return Err(Error::arg(
                "result table needs at least one dataset and classifier",
            ));
        }
        if cells.len() != datasets.len() || cells.iter().any(|r| r.len() != classifiers.len()) {
            return Err(Error::dim("result table is not rectangular"));
        }
        for (d, row) in datasets.iter().zip(&cells) {
            for (c, cell) in classifiers.iter().zip(row) {
                let ok = (0.0..=1.0).contains(&cell.acc_mean)
                    && cell.acc_std >= 0.0
                    && cell.time_std >= 0.0
                    && cell.time_mean.is_finite()
                    && cell.acc_std.is_finite()
                    && cell.time_std.is_finite();
                if !ok {
                    return Err(Error::arg(format!("invalid cell for {d}/{c}: {cell:?}")));
                }
            }
        }
        Ok(ResultTable {
            datasets,
            classifiers,
            cells,
        })
    }

    pub fn datasets(&self) -> &[String] {
        &self.datasets
    }

    pub fn classifiers(&self) -> &[String] {
        &self.classifiers
    }

    pub fn cell(&self, dataset: usize, classifier: usize) -> &Cell {
        &self.cells[dataset][classifier]
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.cells
    }

    pub fn classifier_index(&self, name: &str) -> Result<usize> {
        self.classifiers
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::arg(format!("unknown classifier {name:?}")))
    }
}

/// Per-dataset ranks, `K` for the best.
#[derive(Clone, Debug, PartialEq)]
pub struct RankTable {
    datasets: Vec<String>,
    classifiers: Vec<String>,
    ranks: Vec<Vec<f64>>,
}

impl RankTable {
    /// Higher mean accuracy ranks higher.
    pub fn by_accuracy(t: &ResultTable) -> Result<Self> {
        Self::build(t, |c| c.acc_mean, true)
    }

    /// Lower mean time ranks higher.
    pub fn by_time(t: &ResultTable) -> Result<Self> {
        Self::build(t, |c| c.time_mean, false)
    }

    fn build(t: &ResultTable, key: impl Fn(&Cell) -> f64, higher: bool) -> Result<Self> {
        let ranks = t
            .cells
            .iter()
            .map(|row| match row.len() {
                1 => Ok(vec![1.0]),
                _ => rank_row(&row.iter().map(&key).collect::<Vec<_>>(), higher),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RankTable {
            datasets: t.datasets.clone(),
            classifiers: t.classifiers.clone(),
            ranks,
        })
    }

    pub fn ranks(&self) -> &[Vec<f64>] {
        &self.ranks
    }

    pub fn datasets(&self) -> &[String] {
        &self.datasets
    }

    pub fn classifiers(&self) -> &[String] {
        &self.classifiers
    }

    /// Column means over datasets.
    pub fn average_ranks(&self) -> Vec<f64> {
        let n = self.ranks.len() as f64;
        (0..self.classifiers.len())
            .map(|j| self.ranks.iter().map(|r| r[j]).sum::<f64>() / n)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Wtl {
    pub wins: usize,
    pub ties: usize,
    pub losses: usize,
}

/// For each other classifier, the datasets where `reference` has the higher,
/// equal (within [`TIE_TOL`]) or lower mean accuracy.
pub fn wtl(table: &ResultTable, reference: &str) -> Result<Vec<(String, Wtl)>> {
    let r = table.classifier_index(reference)?;
    let mut out = Vec::new();
    for (j, name) in table.classifiers.iter().enumerate() {
        if j == r {
            continue;
        }
        let mut t = Wtl::default();
        for row in &table.cells {
            let d = row[r].acc_mean - row[j].acc_mean;
            if d.abs() <= TIE_TOL {
                t.ties += 1;
            } else if d > 0.0 {
                t.wins += 1;
            } else {
                t.losses += 1;
            }
        }
        out.push((name.clone(), t));
    }
    Ok(out)
}
