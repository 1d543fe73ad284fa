use std::fmt::Write as _;
use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::eval::{friedman_chi2, nemenyi_cd, wtl, RankTable, ResultTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(Error::arg(format!("unknown report format {other:?}"))),
        }
    }
}

/// Friedman statistic and Nemenyi critical difference for a rank table.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportStats {
    pub n: usize,
    pub chi2: f64,
    pub dof: usize,
    pub p: f64,
    pub alpha: f64,
    /// `None` when the number of classifiers is outside the q table.
    pub cd: Option<f64>,
}

/// `n` defaults to the number of datasets in the table. A single classifier
/// gives `χ² = 0`, `p = 1` and no critical difference.
pub fn summarize(ranks: &RankTable, n: Option<usize>, alpha: f64) -> Result<ReportStats> {
    let n = n.unwrap_or(ranks.datasets().len());
    if ranks.classifiers().len() < 2 {
        return Ok(ReportStats {
            n,
            chi2: 0.0,
            dof: 0,
            p: 1.0,
            alpha,
            cd: None,
        });
    }
    let (chi2, dof, p) = friedman_chi2(&ranks.average_ranks(), n)?;
    let k = ranks.classifiers().len();
    let cd = if (2..=10).contains(&k) {
        Some(nemenyi_cd(k, n, alpha)?)
    } else {
        None
    };
    Ok(ReportStats {
        n,
        chi2,
        dof,
        p,
        alpha,
        cd,
    })
}

/// Writes the result grid, the rank table, the Friedman and Nemenyi
/// statistics and, given a reference classifier, its win/tie/loss tallies.
///
/// CSV output has the header `dataset,classifier,acc_mean,acc_std,time_mean,
/// time_std` followed by one line per cell; the remaining sections follow as
/// `#` comment lines.
pub fn emit_report<W: Write>(
    table: &ResultTable,
    ranks: &RankTable,
    stats: &ReportStats,
    reference: Option<&str>,
    mut sink: W,
    format: ReportFormat,
) -> Result<()> {
    if ranks.datasets() != table.datasets() || ranks.classifiers() != table.classifiers() {
        return Err(Error::dim("rank table does not match the result table"));
    }
    let tallies = reference
        .map(|r| wtl(table, r).map(|w| (r, w)))
        .transpose()?;
    let out = match format {
        ReportFormat::Csv => csv(table, ranks, stats, tallies.as_ref()),
        ReportFormat::Markdown => markdown(table, ranks, stats, tallies.as_ref()),
    };
    sink.write_all(out.as_bytes())?;
    sink.flush()?;
    Ok(())
}

type Tallies<'a> = (&'a str, Vec<(String, crate::eval::Wtl)>);

fn join(vals: impl Iterator<Item = String>, sep: &str) -> String {
    vals.collect::<Vec<_>>().join(sep)
}

fn csv(
    table: &ResultTable,
    ranks: &RankTable,
    stats: &ReportStats,
    tallies: Option<&Tallies>,
) -> String {
    let mut s = String::from("dataset,classifier,acc_mean,acc_std,time_mean,time_std\n");
    for (d, row) in table.datasets().iter().zip(table.rows()) {
        for (c, cell) in table.classifiers().iter().zip(row) {
            let _ = writeln!(
                s,
                "{d},{c},{:.6},{:.6},{:.6},{:.6}",
                cell.acc_mean, cell.acc_std, cell.time_mean, cell.time_std
            );
        }
    }
    let _ = writeln!(s, "# ranks,dataset,{}", table.classifiers().join(","));
    for (d, r) in ranks.datasets().iter().zip(ranks.ranks()) {
        let _ = writeln!(
            s,
            "# rank,{d},{}",
            join(r.iter().map(|v| format!("{v}")), ",")
        );
    }
    let _ = writeln!(
        s,
        "# average_rank,,{}",
        join(ranks.average_ranks().iter().map(|v| format!("{v:.4}")), ",")
    );
    if table.classifiers().len() < 2 {
        s.push_str("# statistics omitted: fewer than two classifiers\n");
        return s;
    }
    let _ = writeln!(
        s,
        "# friedman,n={},chi2={:.4},dof={},p={:.4e}",
        stats.n, stats.chi2, stats.dof, stats.p
    );
    match stats.cd {
        Some(cd) => {
            let _ = writeln!(s, "# nemenyi,alpha={},cd={cd:.4}", stats.alpha);
        }
        None => {
            let _ = writeln!(s, "# nemenyi,alpha={},cd=n/a", stats.alpha);
        }
    }
    if let Some((r, w)) = tallies {
        let cells = join(
            w.iter()
                .map(|(c, t)| format!("{c}={}/{}/{}", t.wins, t.ties, t.losses)),
            ",",
        );
        let _ = writeln!(s, "# wtl,reference={r},{cells}");
    }
    s
}

fn markdown(
    table: &ResultTable,
    ranks: &RankTable,
    stats: &ReportStats,
    tallies: Option<&Tallies>,
) -> String {
    let header = |s: &mut String, first: &str| {
        let _ = writeln!(s, "| {first} | {} |", table.classifiers().join(" | "));
        let _ = writeln!(s, "|---|{}", "---|".repeat(table.classifiers().len()));
    };
    let mut s = String::from("## Accuracy (%) and time (s)\n\n");
    header(&mut s, "Dataset");
    for (d, row) in table.datasets().iter().zip(table.rows()) {
        let cells = join(
            row.iter().map(|c| {
                format!(
                    "{:.2} ± {:.2} ({:.4} ± {:.4})",
                    100.0 * c.acc_mean,
                    100.0 * c.acc_std,
                    c.time_mean,
                    c.time_std
                )
            }),
            " | ",
        );
        let _ = writeln!(s, "| {d} | {cells} |");
    }
    if let Some((r, w)) = tallies {
        let cells = join(
            table.classifiers().iter().map(|c| {
                w.iter().find(|(n, _)| n == c).map_or_else(
                    || "-".to_string(),
                    |(_, t)| format!("{}/{}/{}", t.wins, t.ties, t.losses),
                )
            }),
            " | ",
        );
        let _ = writeln!(s, "| W/T/L vs {r} | {cells} |");
    }
    s.push_str("\n## Ranks by accuracy\n\n");
    header(&mut s, "Dataset");
    for (d, r) in ranks.datasets().iter().zip(ranks.ranks()) {
        let _ = writeln!(
            s,
            "| {d} | {} |",
            join(r.iter().map(|v| format!("{v}")), " | ")
        );
    }
    let _ = writeln!(
        s,
        "| Average | {} |",
        join(
            ranks.average_ranks().iter().map(|v| format!("{v:.4}")),
            " | "
        )
    );
    if table.classifiers().len() < 2 {
        s.push_str("\nStatistics omitted: fewer than two classifiers.\n");
        return s;
    }
    let _ = writeln!(
        s,
        "\nFriedman: chi2 = {:.4}, dof = {}, p = {:.4e} (N = {})",
        stats.chi2, stats.dof, stats.p, stats.n
    );
    match stats.cd {
        Some(cd) => {
            let _ = writeln!(s, "Nemenyi CD (alpha = {}): {cd:.4}", stats.alpha);
        }
        None => {
            let _ = writeln!(s, "Nemenyi CD (alpha = {}): n/a", stats.alpha);
        }
    }
    s
}
