//! Pause/play event traces and the empirical pause metrics measured on them.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

pub const TRACE_HEADER: &str = "time_s,event";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    PauseStart,
    PlayStart,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::PauseStart => "pause_start",
            EventKind::PlayStart => "play_start",
        }
    }
}

impl FromStr for EventKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "pause_start" => Ok(EventKind::PauseStart),
            "play_start" => Ok(EventKind::PlayStart),
            other => Err(format!("unknown event `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceEvent {
    pub time: f64,
    pub kind: EventKind,
}

/// An alternating sequence of pause and play events.
///
/// The first event is `play_start` (playback beginning after the initial
/// fill). `end_time`, when known, marks the end of the observed session.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SessionTrace {
    events: Vec<TraceEvent>,
    end_time: Option<f64>,
    /// `(time, bytes)` buffer occupancy samples; not part of the CSV form.
    pub occupancy: Vec<(f64, f64)>,
}

impl SessionTrace {
    pub fn new(events: Vec<TraceEvent>, end_time: Option<f64>) -> Result<Self> {
        validate(&events, end_time, |i| i + 1)?;
        Ok(SessionTrace {
            events,
            end_time,
            occupancy: Vec::new(),
        })
    }

    pub fn events(&self) -> &[TraceEvent] {
        &self.events
    }

    pub fn end_time(&self) -> Option<f64> {
        self.end_time
    }

    pub fn pause_count(&self) -> usize {
        self.events
            .iter()
            .filter(|e| e.kind == EventKind::PauseStart)
            .count()
    }

    /// `(start, resume)` for every pause; `resume` is `None` for a pause still
    /// in progress at the end of the trace.
    pub fn pauses(&self) -> Vec<(f64, Option<f64>)> {
        self.events
            .iter()
            .enumerate()
            .filter(|(_, e)| e.kind == EventKind::PauseStart)
            .map(|(i, e)| (e.time, self.events.get(i + 1).map(|n| n.time)))
            .collect()
    }

    /// Canonical CSV: header, one `time,event` row per event with six
    /// decimals, and a final `time,end` row when the end time is known.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(24 * (self.events.len() + 2));
        out.push_str(TRACE_HEADER);
        out.push('\n');
        for e in &self.events {
            let _ = writeln!(out, "{:.6},{}", e.time, e.kind.as_str());
        }
        if let Some(t) = self.end_time {
            let _ = writeln!(out, "{t:.6},end");
        }
        out
    }

    /// Parse the CSV form; errors carry 1-based line numbers.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header.trim() == TRACE_HEADER => {}
            _ => {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("expected header `{TRACE_HEADER}`"),
                })
            }
        }
        let mut events = Vec::new();
        let mut line_numbers = Vec::new();
        let mut end_time = None;
        for (idx, raw) in lines {
            let line = idx + 1;
            let raw = raw.trim();
            if raw.is_empty() {
                continue;
            }
            if end_time.is_some() {
                return Err(Error::Parse {
                    line,
                    message: "rows after the `end` marker".into(),
                });
            }
            let (time, kind) = raw.split_once(',').ok_or_else(|| Error::Parse {
                line,
                message: "expected `time_s,event`".into(),
            })?;
            let time: f64 = time.trim().parse().map_err(|_| Error::Parse {
                line,
                message: format!("bad time `{}`", time.trim()),
            })?;
            if !time.is_finite() {
                return Err(Error::Parse {
                    line,
                    message: "time must be finite".into(),
                });
            }
            match kind.trim() {
                "end" => end_time = Some(time),
                k => {
                    let kind = k
                        .parse()
                        .map_err(|message| Error::Parse { line, message })?;
                    events.push(TraceEvent { time, kind });
                    line_numbers.push(line);
                }
            }
        }
        validate(&events, end_time, |i| line_numbers[i])?;
        Ok(SessionTrace {
            events,
            end_time,
            occupancy: Vec::new(),
        })
    }
}

fn validate(
    events: &[TraceEvent],
    end_time: Option<f64>,
    line_of: impl Fn(usize) -> usize,
) -> Result<()> {
    for (i, e) in events.iter().enumerate() {
        let expected = if i % 2 == 0 {
            EventKind::PlayStart
        } else {
            EventKind::PauseStart
        };
        if e.kind != expected {
            return Err(Error::Alternation {
                line: line_of(i),
                time: e.time,
            });
        }
        if i > 0 && !(e.time > events[i - 1].time) {
            return Err(Error::Parse {
                line: line_of(i),
                message: format!("time {} does not increase", e.time),
            });
        }
    }
    if let (Some(end), Some(last)) = (end_time, events.last()) {
        if end < last.time {
            return Err(Error::Config(format!(
                "end time {end} precedes the last event at {}",
                last.time
            )));
        }
    }
    Ok(())
}

/// Read and validate a trace CSV file.
pub fn ingest_trace(path: impl AsRef<Path>) -> Result<SessionTrace> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    SessionTrace::from_csv(&text)
}

/// Pause metrics measured over a window of a trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalMetrics {
    /// Mean of pauses that start and resume inside the window.
    pub mean_pause_duration: Option<f64>,
    /// Number of such completed pauses.
    pub pause_count: usize,
    /// Completed pause-play cycles per second of window.
    pub pause_frequency: f64,
    /// `mean_pause_duration × pause_frequency`.
    pub pause_intensity: f64,
    /// All paused time in the window, including partial pauses, over the
    /// window length.
    pub paused_fraction: f64,
    pub window: (f64, f64),
}

/// Empirical `v̄`, `f̄_v` and PI.
///
/// The default window runs from the first pause start to the last pause
/// start, which spans whole cycles. With a single pause it runs to the end
/// of the trace (or to the resume when no end is recorded).
pub fn compute_metrics(
    trace: &SessionTrace,
    window: Option<(f64, f64)>,
) -> Result<EmpiricalMetrics> {
    let pauses = trace.pauses();
    let trace_end = trace
        .end_time
        .or_else(|| trace.events.last().map(|e| e.time))
        .unwrap_or(0.0);

    let (start, end) = match window {
        Some((s, e)) => {
            if !(e > s) {
                return Err(Error::Config(format!(
                    "window end {e} must exceed start {s}"
                )));
            }
            (s, e)
        }
        None => match pauses.as_slice() {
            [] => (trace.events.first().map_or(0.0, |e| e.time), trace_end),
            [(s, resume)] => (*s, trace.end_time.or(*resume).unwrap_or(*s)),
            [first, .., last] => (first.0, last.0),
        },
    };
    let length = end - start;

    let mut completed = Vec::new();
    let mut paused = 0.0;
    for &(s, resume) in &pauses {
        let stop = resume.unwrap_or(trace_end.max(end));
        paused += (stop.min(end) - s.max(start)).max(0.0);
        if let Some(r) = resume {
            if s >= start && r <= end {
                completed.push(r - s);
            }
        }
    }

    let count = completed.len();
    let mean = (count > 0).then(|| completed.iter().sum::<f64>() / count as f64);
    let (frequency, fraction) = if length > 0.0 {
        (count as f64 / length, paused / length)
    } else {
        (0.0, 0.0)
    };
    Ok(EmpiricalMetrics {
        mean_pause_duration: mean,
        pause_count: count,
        pause_frequency: frequency,
        pause_intensity: mean.map_or(0.0, |v| v * frequency),
        paused_fraction: fraction,
        window: (start, end),
    })
}
