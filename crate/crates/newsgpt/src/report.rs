//! File side of the evaluation report: session logs and rating sheets in,
//! report files out.

use std::collections::BTreeMap;
use std::fs::File;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use newsgpt_core::evalkit::{
    emit_report, record_session, Accuracy, Criterion, CriterionRating, QARecord, Report, SDResponse, ScaleValue,
    Unmatched,
};

use crate::session_log::{log_files, read_messages};

/// Header of the semantic-differential sheet, also used by the server.
pub const SD_HEADER: [&str; 3] = ["respondent", "item", "rating"];

fn reader(path: &Path) -> Result<(csv::Reader<File>, BTreeMap<String, usize>)> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut r = csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(file);
    let cols = r
        .headers()?
        .iter()
        .enumerate()
        .map(|(i, h)| (h.trim_start_matches('\u{feff}').to_ascii_lowercase(), i))
        .collect();
    Ok((r, cols))
}

fn col(cols: &BTreeMap<String, usize>, name: &str, path: &Path) -> Result<usize> {
    cols.get(name)
        .copied()
        .ok_or_else(|| anyhow!("{}: no `{name}` column", path.display()))
}

fn parse_int(raw: &str) -> Result<i64> {
    raw.trim_start_matches('+')
        .parse()
        .map_err(|_| anyhow!("`{raw}` is not an integer"))
}

/// `criterion,value` rows; extra columns (a rater id, say) are ignored.
pub fn read_ratings(path: &Path) -> Result<Vec<CriterionRating>> {
    let (mut r, cols) = reader(path)?;
    let (c, v) = (col(&cols, "criterion", path)?, col(&cols, "value", path)?);
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let ctx = || format!("{} row {}", path.display(), i + 2);
        let raw_value = rec.get(v).unwrap_or("");
        if raw_value.is_empty() {
            continue;
        }
        let criterion: Criterion = rec.get(c).unwrap_or("").parse().with_context(ctx)?;
        let value = ScaleValue::new(parse_int(raw_value).with_context(ctx)?).with_context(ctx)?;
        out.push(CriterionRating { criterion, value });
    }
    Ok(out)
}

/// `respondent,item,rating` rows.
pub fn read_sd(path: &Path) -> Result<Vec<SDResponse>> {
    let (mut r, cols) = reader(path)?;
    let (p, it, v) = (
        col(&cols, SD_HEADER[0], path)?,
        col(&cols, SD_HEADER[1], path)?,
        col(&cols, SD_HEADER[2], path)?,
    );
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let ctx = || format!("{} row {}", path.display(), i + 2);
        out.push(SDResponse {
            respondent: rec.get(p).unwrap_or("").to_string(),
            item: rec.get(it).unwrap_or("").to_string(),
            rating: ScaleValue::new(parse_int(rec.get(v).unwrap_or("")).with_context(ctx)?).with_context(ctx)?,
        });
    }
    Ok(out)
}

/// `index,accuracy[,note]` rows tagging records by their 1-based index.
pub fn apply_accuracy(path: &Path, records: &mut [QARecord]) -> Result<()> {
    let (mut r, cols) = reader(path)?;
    let (ix, acc) = (col(&cols, "index", path)?, col(&cols, "accuracy", path)?);
    let note = cols.get("note").copied();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let ctx = || format!("{} row {}", path.display(), i + 2);
        let index: usize = rec.get(ix).unwrap_or("").parse().with_context(ctx)?;
        let record = index
            .checked_sub(1)
            .and_then(|k| records.get_mut(k))
            .ok_or_else(|| anyhow!("{}: no record {index}", ctx()))?;
        let raw = rec.get(acc).unwrap_or("");
        if !raw.is_empty() {
            record.accuracy = Some(raw.parse::<Accuracy>().with_context(ctx)?);
        }
        if let Some(n) = note.and_then(|n| rec.get(n)).filter(|n| !n.is_empty()) {
            record.note = Some(n.to_string());
        }
    }
    Ok(())
}

/// Question/answer records from a log file or directory of logs. Sessions
/// are paired independently, then concatenated in file-name order.
pub fn records_from_logs(path: &Path) -> Result<(Vec<QARecord>, Vec<Unmatched>)> {
    let mut records = Vec::new();
    let mut unmatched = Vec::new();
    for file in log_files(path)? {
        let s = record_session(&read_messages(&file)?);
        records.extend(s.records);
        unmatched.extend(s.unmatched);
    }
    Ok((records, unmatched))
}

pub struct ReportInputs<'a> {
    pub session: &'a Path,
    pub ratings: Option<&'a Path>,
    pub sd: Option<&'a Path>,
    pub accuracy: Option<&'a Path>,
}

pub fn build_report(inputs: &ReportInputs<'_>) -> Result<(Report, Vec<Unmatched>)> {
    let (mut records, unmatched) = records_from_logs(inputs.session)?;
    if let Some(p) = inputs.accuracy {
        apply_accuracy(p, &mut records)?;
    }
    let ratings = inputs.ratings.map(read_ratings).transpose()?.unwrap_or_default();
    let sd = inputs.sd.map(read_sd).transpose()?.unwrap_or_default();
    Ok((emit_report(&records, &ratings, &sd), unmatched))
}

/// Writes the report files into `dir` and returns their paths.
pub fn write_report(report: &Report, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    report
        .files()
        .iter()
        .map(|(name, body)| {
            let p = dir.join(name);
            std::fs::write(&p, body).with_context(|| format!("writing {}", p.display()))?;
            Ok(p)
        })
        .collect()
}
