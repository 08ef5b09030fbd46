//! Subjective-test datasets and correlation of pause measures with MOS.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const TABLE3_CSV: &str = include_str!("../data/table3.csv");
const TABLE5_CSV: &str = include_str!("../data/table5.csv");

pub const DATASET_HEADER: [&str; 6] = [
    "video_id",
    "content",
    "pi",
    "pause_frequency",
    "avg_pause_duration",
    "mos",
];
pub const CORRELATION_HEADER: &str = "content,r_frequency,r_duration,r_pi";

/// Pause frequency at or above which a Rally clip counts as the
/// high-frequency/short-pause composition.
pub const HIGH_FREQUENCY_THRESHOLD: f64 = 0.09;

/// Video content class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Content {
    /// MotoGP
    M,
    /// Run
    R1,
    /// News
    N,
    /// Cartoon
    C,
    /// Rally
    R2,
}

impl fmt::Display for Content {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Content::M => "M",
            Content::R1 => "R1",
            Content::N => "N",
            Content::C => "C",
            Content::R2 => "R2",
        };
        f.write_str(s)
    }
}

impl FromStr for Content {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "M" => Ok(Content::M),
            "R1" => Ok(Content::R1),
            "N" => Ok(Content::N),
            "C" => Ok(Content::C),
            "R2" => Ok(Content::R2),
            other => Err(format!("unknown content label `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum DatasetSource {
    Table3,
    Table5,
    External(PathBuf),
}

impl fmt::Display for DatasetSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatasetSource::Table3 => f.write_str("builtin-table-3"),
            DatasetSource::Table5 => f.write_str("builtin-table-5"),
            DatasetSource::External(p) => write!(f, "{}", p.display()),
        }
    }
}

/// One rated clip.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubjectiveRecord {
    pub source: DatasetSource,
    pub video_id: u32,
    pub content: Content,
    pub pi: f64,
    pub pause_frequency: f64,
    pub avg_pause_duration: f64,
    pub mos: f64,
}

impl SubjectiveRecord {
    /// `|pi − frequency × duration|`; nonzero from rounding of the printed
    /// values.
    pub fn composition_residual(&self) -> f64 {
        (self.pi - self.pause_frequency * self.avg_pause_duration).abs()
    }

    pub fn is_high_frequency(&self) -> bool {
        self.pause_frequency >= HIGH_FREQUENCY_THRESHOLD
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubjectiveDataset {
    pub records: Vec<SubjectiveRecord>,
}

impl SubjectiveDataset {
    fn validated(records: Vec<SubjectiveRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::Config("dataset has no records".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for r in &records {
            if !seen.insert((r.source.clone(), r.video_id)) {
                return Err(Error::Config(format!(
                    "duplicate video id {} in {}",
                    r.video_id, r.source
                )));
            }
        }
        Ok(SubjectiveDataset { records })
    }

    /// Concatenate two datasets; `(source, video_id)` must stay unique.
    pub fn merge(self, other: SubjectiveDataset) -> Result<Self> {
        let mut records = self.records;
        records.extend(other.records);
        SubjectiveDataset::validated(records)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn with_content(&self, content: Content) -> impl Iterator<Item = &SubjectiveRecord> {
        self.records.iter().filter(move |r| r.content == content)
    }
}

/// Load a bundled table or an external CSV with the dataset schema.
pub fn load_dataset(source: DatasetSource) -> Result<SubjectiveDataset> {
    let text = match &source {
        DatasetSource::Table3 => TABLE3_CSV.to_owned(),
        DatasetSource::Table5 => TABLE5_CSV.to_owned(),
        DatasetSource::External(path) => read(path)?,
    };
    parse_dataset(&text, source)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_dataset(text: &str, source: DatasetSource) -> Result<SubjectiveDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let mut columns = [0usize; 6];
    for (slot, name) in columns.iter_mut().zip(DATASET_HEADER) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse {
                line: 1,
                message: format!("missing column `{name}`"),
            })?;
    }

    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let field = |i: usize| row.get(columns[i]).unwrap_or("");
        let num = |i: usize| -> Result<f64> {
            field(i).parse::<f64>().map_err(|_| Error::Parse {
                line,
                message: format!("bad {} `{}`", DATASET_HEADER[i], field(i)),
            })
        };
        let video_id = field(0).parse::<u32>().map_err(|_| Error::Parse {
            line,
            message: format!("bad video_id `{}`", field(0)),
        })?;
        let content = field(1)
            .parse::<Content>()
            .map_err(|message| Error::Parse { line, message })?;
        let record = SubjectiveRecord {
            source: source.clone(),
            video_id,
            content,
            pi: num(2)?,
            pause_frequency: num(3)?,
            avg_pause_duration: num(4)?,
            mos: num(5)?,
        };
        if !(0.0..1.0).contains(&record.pi) {
            return Err(Error::Parse {
                line,
                message: format!("pi {} outside [0, 1)", record.pi),
            });
        }
        if !(1.0..=5.0).contains(&record.mos) {
            return Err(Error::Parse {
                line,
                message: format!("mos {} outside [1, 5]", record.mos),
            });
        }
        if record.pause_frequency < 0.0 || record.avg_pause_duration < 0.0 {
            return Err(Error::Parse {
                line,
                message: "negative pause frequency or duration".into(),
            });
        }
        records.push(record);
    }
    SubjectiveDataset::validated(records)
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(Error::UndefinedCorrelation("need at least 3 observations"));
    }
    Ok(())
}

/// Pearson product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation("constant input"));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Fractional ranks (1-based), ties sharing their average rank.
pub fn fractional_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation: Pearson on fractional ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    pearson(&fractional_ranks(x), &fractional_ranks(y))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationRow {
    pub content: Content,
    pub r_frequency: f64,
    pub r_duration: f64,
    pub r_pi: f64,
}

/// Pearson r of MOS against frequency, duration and PI per content class,
/// in order of first appearance.
pub fn correlation_table(ds: &SubjectiveDataset) -> Result<Vec<CorrelationRow>> {
    let mut order: Vec<Content> = Vec::new();
    for r in &ds.records {
        if !order.contains(&r.content) {
            order.push(r.content);
        }
    }
    order
        .into_iter()
        .map(|content| {
            let group: Vec<&SubjectiveRecord> = ds.with_content(content).collect();
            if group.len() < 3 {
                return Err(Error::GroupTooSmall {
                    group: content.to_string(),
                    count: group.len(),
                });
            }
            let col =
                |f: fn(&SubjectiveRecord) -> f64| group.iter().map(|r| f(r)).collect::<Vec<_>>();
            let mos = col(|r| r.mos);
            Ok(CorrelationRow {
                content,
                r_frequency: pearson(&col(|r| r.pause_frequency), &mos)?,
                r_duration: pearson(&col(|r| r.avg_pause_duration), &mos)?,
                r_pi: pearson(&col(|r| r.pi), &mos)?,
            })
        })
        .collect()
}

/// Table as CSV with three-decimal coefficients.
pub fn correlation_csv(rows: &[CorrelationRow]) -> String {
    let mut out = String::from(CORRELATION_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{:.3},{:.3},{:.3}\n",
            r.content, r.r_frequency, r.r_duration, r.r_pi
        ));
    }
    out
}
