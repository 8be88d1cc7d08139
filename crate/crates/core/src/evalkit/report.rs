use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use super::{classify_speed, Criterion, CriterionRating, QARecord, SDResponse};

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SdSummary {
    pub item: String,
    pub mean: f64,
    pub count: usize,
}

/// Mean rating per item, sorted by item id. Items without responses are absent.
pub fn aggregate_sd(responses: &[SDResponse]) -> Vec<SdSummary> {
    let mut acc: BTreeMap<&str, (i64, usize)> = BTreeMap::new();
    for r in responses {
        let e = acc.entry(r.item.as_str()).or_default();
        e.0 += r.rating.get() as i64;
        e.1 += 1;
    }
    acc.into_iter()
        .map(|(item, (sum, count))| SdSummary {
            item: item.into(),
            mean: sum as f64 / count as f64,
            count,
        })
        .collect()
}

/// Rendered report files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub records_csv: String,
    pub criteria_csv: String,
    pub sd_csv: String,
    pub summary: String,
}

impl Report {
    /// `(file name, contents)` pairs in a fixed order.
    pub fn files(&self) -> [(&'static str, &str); 4] {
        [
            ("records.csv", &self.records_csv),
            ("criteria.csv", &self.criteria_csv),
            ("sd.csv", &self.sd_csv),
            ("summary.txt", &self.summary),
        ]
    }
}

fn csv_field(out: &mut String, field: &str) {
    if field.contains([',', '"', '\n', '\r']) {
        out.push('"');
        out.push_str(&field.replace('"', "\"\""));
        out.push('"');
    } else {
        out.push_str(field);
    }
}

fn csv_row(out: &mut String, fields: &[&str]) {
    for (i, f) in fields.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        csv_field(out, f);
    }
    out.push('\n');
}

fn criterion_means(ratings: &[CriterionRating]) -> Vec<(Criterion, usize, Option<f64>)> {
    Criterion::ALL
        .into_iter()
        .map(|c| {
            let values: Vec<i64> = ratings
                .iter()
                .filter(|r| r.criterion == c)
                .map(|r| r.value.get() as i64)
                .collect();
            let mean = (!values.is_empty())
                .then(|| values.iter().sum::<i64>() as f64 / values.len() as f64);
            (c, values.len(), mean)
        })
        .collect()
}

/// Renders records, criterion ratings and SD responses. Output depends only on
/// the inputs.
pub fn emit_report(records: &[QARecord], ratings: &[CriterionRating], sd: &[SDResponse]) -> Report {
    let mut records_csv = String::new();
    csv_row(
        &mut records_csv,
        &["index", "question", "answer", "response_speed_s", "speed_class", "accuracy", "note"],
    );
    let mut class_counts = [0usize; 3];
    let mut accuracy_counts = [0usize; 4];
    for (i, r) in records.iter().enumerate() {
        let class = classify_speed(r.response_speed_s).ok();
        if let Some(c) = class {
            class_counts[2 - c as usize] += 1;
        }
        match r.accuracy {
            Some(a) => accuracy_counts[(1 - a.value()) as usize] += 1,
            None => accuracy_counts[3] += 1,
        }
        csv_row(
            &mut records_csv,
            &[
                &alloc::format!("{}", i + 1),
                &r.question,
                &r.answer,
                &alloc::format!("{:.2}", r.response_speed_s),
                class.map_or("", |c| c.as_str()),
                &r.accuracy.map(|a| alloc::format!("{a}")).unwrap_or_default(),
                r.note.as_deref().unwrap_or(""),
            ],
        );
    }

    let criteria = criterion_means(ratings);
    let mut criteria_csv = String::new();
    csv_row(&mut criteria_csv, &["criterion", "count", "mean"]);
    for (c, n, mean) in &criteria {
        let mean = mean.map(|m| alloc::format!("{m:.2}")).unwrap_or_default();
        csv_row(&mut criteria_csv, &[c.as_str(), &alloc::format!("{n}"), &mean]);
    }

    let sd_means = aggregate_sd(sd);
    let mut sd_csv = String::new();
    csv_row(&mut sd_csv, &["item", "count", "mean"]);
    for s in &sd_means {
        csv_row(
            &mut sd_csv,
            &[&s.item, &alloc::format!("{}", s.count), &alloc::format!("{:.2}", s.mean)],
        );
    }

    let mut summary = String::new();
    let _ = writeln!(summary, "Questions answered: {}", records.len());
    if !records.is_empty() {
        let mean_s = records.iter().map(|r| r.response_speed_s).sum::<f64>() / records.len() as f64;
        let class = classify_speed(mean_s).map(|c| c.as_str()).unwrap_or("n/a");
        let _ = writeln!(summary, "Mean response time: {mean_s:.2} s ({class})");
    }
    let _ = writeln!(
        summary,
        "Speed classes: good {}, average {}, poor {}",
        class_counts[0], class_counts[1], class_counts[2]
    );
    let _ = writeln!(
        summary,
        "Accuracy: +1 {}, 0 {}, -1 {}, untagged {}",
        accuracy_counts[0], accuracy_counts[1], accuracy_counts[2], accuracy_counts[3]
    );
    let _ = writeln!(summary, "\nCriterion ratings");
    for (c, n, mean) in &criteria {
        match mean {
            Some(m) => {
                let _ = writeln!(summary, "  {:<20}{:>6.2}  (n={n})", c.as_str(), m);
            }
            None => {
                let _ = writeln!(summary, "  {:<20}{:>6}  (n=0)", c.as_str(), "-");
            }
        }
    }
    let _ = writeln!(summary, "\nSemantic differential");
    for s in &sd_means {
        let _ = writeln!(summary, "  {:<20}{:>6.2}  (n={})", s.item, s.mean, s.count);
    }

    Report {
        records_csv,
        criteria_csv,
        sd_csv,
        summary,
    }
}
