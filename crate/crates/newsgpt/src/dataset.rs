//! Labelled-title loaders.
//!
//! Two layouts are understood:
//! - a CSV file with a header containing `title` and `label` columns, where
//!   the label is `fake`/`real` (also `true`/`false`) or `0`/`1`;
//! - a directory holding `Fake.csv` and `True.csv`, each with a `title`
//!   column; the file decides the label.

use std::fs::File;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use newsgpt_core::classifier::{Label, TitleExample};

/// What a numeric `1` in the label column stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OneMeans {
    Real,
    Fake,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadStats {
    pub rows: usize,
    /// Rows dropped for a blank title.
    pub skipped: usize,
}

fn parse_label(raw: &str, one_means: OneMeans) -> Result<Label> {
    let t = raw.trim().to_ascii_lowercase();
    let by_bit = |bit: bool| match (bit, one_means) {
        (true, OneMeans::Real) | (false, OneMeans::Fake) => Label::Real,
        _ => Label::Fake,
    };
    Ok(match t.as_str() {
        "fake" | "false" => Label::Fake,
        "real" | "true" => Label::Real,
        "1" | "1.0" => by_bit(true),
        "0" | "0.0" => by_bit(false),
        _ => bail!("unrecognised label `{raw}`"),
    })
}

fn column(headers: &csv::StringRecord, name: &str) -> Option<usize> {
    headers
        .iter()
        .position(|h| h.trim().trim_start_matches('\u{feff}').eq_ignore_ascii_case(name))
}

fn read_titles(path: &Path, label: Option<Label>, one_means: OneMeans, out: &mut Vec<TitleExample>, stats: &mut LoadStats) -> Result<()> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(file);
    let headers = reader.headers()?.clone();
    let title_col = column(&headers, "title").ok_or_else(|| anyhow!("{}: no `title` column", path.display()))?;
    let label_col = match label {
        Some(_) => None,
        None => Some(column(&headers, "label").ok_or_else(|| anyhow!("{}: no `label` column", path.display()))?),
    };
    for (i, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("{} row {}", path.display(), i + 2))?;
        stats.rows += 1;
        let title = record.get(title_col).unwrap_or("");
        if title.trim().is_empty() {
            stats.skipped += 1;
            continue;
        }
        let label = match (label, label_col) {
            (Some(l), _) => l,
            (None, Some(c)) => parse_label(record.get(c).unwrap_or(""), one_means)
                .with_context(|| format!("{} row {}", path.display(), i + 2))?,
            (None, None) => unreachable!(),
        };
        out.push(TitleExample::new(title.trim(), label)?);
    }
    Ok(())
}

/// Loads a dataset from a CSV file or a `Fake.csv`/`True.csv` directory.
pub fn load_dataset(path: &Path, one_means: OneMeans) -> Result<(Vec<TitleExample>, LoadStats)> {
    let mut out = Vec::new();
    let mut stats = LoadStats::default();
    if path.is_dir() {
        read_titles(&path.join("Fake.csv"), Some(Label::Fake), one_means, &mut out, &mut stats)?;
        read_titles(&path.join("True.csv"), Some(Label::Real), one_means, &mut out, &mut stats)?;
    } else {
        read_titles(path, None, one_means, &mut out, &mut stats)?;
    }
    if out.is_empty() {
        bail!("{}: no usable rows", path.display());
    }
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn labels() {
        assert_eq!(parse_label("REAL", OneMeans::Fake).unwrap(), Label::Real);
        assert_eq!(parse_label("1", OneMeans::Real).unwrap(), Label::Real);
        assert_eq!(parse_label("1", OneMeans::Fake).unwrap(), Label::Fake);
        assert_eq!(parse_label(" 0 ", OneMeans::Fake).unwrap(), Label::Real);
        assert!(parse_label("maybe", OneMeans::Real).is_err());
    }

    #[test]
    fn csv_and_directory_layouts() {
        let dir = tempfile::tempdir().unwrap();
        let csv_path = dir.path().join("titles.csv");
        let mut f = File::create(&csv_path).unwrap();
        writeln!(f, "id,title,label\n1,\"Senate passes bill, again\",real\n2,,fake\n3,Aliens built it,fake").unwrap();
        let (rows, stats) = load_dataset(&csv_path, OneMeans::Real).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].text, "Senate passes bill, again");
        assert_eq!(stats, LoadStats { rows: 3, skipped: 1 });

        std::fs::write(dir.path().join("Fake.csv"), "title,text\nShock claim,x\n").unwrap();
        std::fs::write(dir.path().join("True.csv"), "title,text\nMarkets close higher,y\nRates held,z\n").unwrap();
        let (rows, _) = load_dataset(dir.path(), OneMeans::Real).unwrap();
        let labels: Vec<_> = rows.iter().map(|r| r.label).collect();
        assert_eq!(labels, [Label::Fake, Label::Real, Label::Real]);
    }
}
