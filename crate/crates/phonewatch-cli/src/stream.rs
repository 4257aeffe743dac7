//! Throttled streaming simulation: one dispatcher pacing frames at the
//! FPS cap, N stateless workers running the vision pipeline and the
//! classifier, and one aggregator that restores input order before
//! window bookkeeping.
//!
//! Frames go to workers round-robin over bounded channels and results
//! are drained in the same round-robin order, so the output is
//! byte-identical for any worker count. Each frame prints
//! `frame_id fraction level` where the fraction is the positive share of
//! the previous completed window; a window at or above the red boundary
//! emits an alarm record when it completes.

use std::io::Write;
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use phonewatch_core::error::{Error, Result};
use phonewatch_core::pipeline::process_frame;
use phonewatch_core::pnm::read_ppm_file;
use phonewatch_core::svm::SvmModel;

use crate::config::{RunConfig, StatusLevel};
use crate::manifest::ManifestEntry;

const CHANNEL_DEPTH: usize = 4;

struct FrameRecord {
    frame_id: String,
    timestamp: f64,
    /// Some(predicted positive) when the frame was usable.
    verdict: Option<bool>,
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct StreamSummary {
    pub frames: usize,
    pub usable: usize,
    pub alarms: usize,
    pub windows: usize,
}

struct WindowState {
    t0: f64,
    window: f64,
    current: usize,
    usable: usize,
    positives: usize,
    prev_fraction: f64,
}

impl WindowState {
    fn bucket(&self, t: f64) -> usize {
        (((t - self.t0) / self.window).floor()).max(0.0) as usize
    }

    fn fraction(&self) -> f64 {
        if self.usable > 0 {
            self.positives as f64 / self.usable as f64
        } else {
            0.0
        }
    }
}

fn process_entry(entry: &ManifestEntry, model: &SvmModel, seg_fraction: f64) -> Option<bool> {
    let face = entry.face?;
    let img = read_ppm_file(&entry.path).ok()?;
    let out = process_frame(&img, face, seg_fraction).ok()?;
    let pred = model.predict(&out.features.as_point()).ok()?;
    Some(pred > 0)
}

/// Runs the stream over the manifest, writing frame lines, alarm records,
/// and a trailing summary to `out`.
pub fn run_stream(
    entries: &[ManifestEntry],
    model: &SvmModel,
    config: &RunConfig,
    out: &mut impl Write,
) -> Result<StreamSummary> {
    config.validate()?;
    if entries.is_empty() {
        return Err(Error::InvalidInput("stream manifest is empty".into()));
    }
    let workers = config.workers;
    let fps = config.fps_cap;
    let seg_fraction = config.seg_fraction;

    let mut summary = StreamSummary {
        frames: entries.len(),
        ..StreamSummary::default()
    };
    let mut state: Option<WindowState> = None;

    thread::scope(|scope| -> Result<()> {
        let mut to_workers = Vec::with_capacity(workers);
        let mut from_workers = Vec::with_capacity(workers);
        for _ in 0..workers {
            let (tx_in, rx_in) = mpsc::sync_channel::<(usize, &ManifestEntry)>(CHANNEL_DEPTH);
            let (tx_out, rx_out) = mpsc::sync_channel::<FrameRecord>(CHANNEL_DEPTH);
            to_workers.push(tx_in);
            from_workers.push(rx_out);
            scope.spawn(move || {
                while let Ok((index, entry)) = rx_in.recv() {
                    let record = FrameRecord {
                        frame_id: entry.frame_id(),
                        timestamp: entry.timestamp.unwrap_or(index as f64 / fps),
                        verdict: process_entry(entry, model, seg_fraction),
                    };
                    if tx_out.send(record).is_err() {
                        break;
                    }
                }
            });
        }

        scope.spawn(move || {
            let started = Instant::now();
            for (i, entry) in entries.iter().enumerate() {
                let due = Duration::from_secs_f64(i as f64 / fps);
                if let Some(wait) = due.checked_sub(started.elapsed()) {
                    thread::sleep(wait);
                }
                if to_workers[i % workers].send((i, entry)).is_err() {
                    break;
                }
            }
        });

        for i in 0..entries.len() {
            let record = from_workers[i % workers]
                .recv()
                .map_err(|_| Error::InvalidInput("stream worker hung up".into()))?;

            let st = state.get_or_insert(WindowState {
                t0: record.timestamp,
                window: config.period_window,
                current: 0,
                usable: 0,
                positives: 0,
                prev_fraction: 0.0,
            });
            let bucket = st.bucket(record.timestamp);
            if st.current < bucket {
                let fraction = st.fraction();
                if fraction >= config.status_red_lower {
                    summary.alarms += 1;
                    writeln!(out, "alarm period {} fraction {}", st.current, fraction)?;
                }
                st.prev_fraction = fraction;
                st.usable = 0;
                st.positives = 0;
                st.current += 1;
                summary.windows += 1;
                // fully empty windows in a timestamp gap carry fraction 0
                // and raise no alarms; skip them arithmetically
                if st.current < bucket {
                    summary.windows += bucket - st.current;
                    st.current = bucket;
                    st.prev_fraction = 0.0;
                }
            }
            if let Some(positive) = record.verdict {
                summary.usable += 1;
                st.usable += 1;
                if positive {
                    st.positives += 1;
                }
            }
            let level = StatusLevel::of(
                st.prev_fraction,
                config.status_green_upper,
                config.status_red_lower,
            );
            writeln!(
                out,
                "{} {} {}",
                record.frame_id,
                st.prev_fraction,
                level.name()
            )?;
        }
        Ok(())
    })?;

    if let Some(st) = &state {
        let fraction = st.fraction();
        if fraction >= config.status_red_lower {
            summary.alarms += 1;
            writeln!(out, "alarm period {} fraction {}", st.current, fraction)?;
        }
        summary.windows += 1;
    }
    writeln!(
        out,
        "# frames {} usable {} windows {} alarms {}",
        summary.frames, summary.usable, summary.windows, summary.alarms
    )?;
    Ok(summary)
}
