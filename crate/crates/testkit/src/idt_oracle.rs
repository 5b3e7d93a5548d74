//! Brute-force reference for gap classification, median smoothing and
//! sliding-window dispersion-threshold fixation detection over a whole trace.

use eyedoc_core::{GazeEvent, GazeSample, PipelineConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefFixation {
    pub start_ms: u64,
    pub end_ms: u64,
    pub cx: f64,
    pub cy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefGap {
    Blink { start_ms: u64, end_ms: u64 },
    Lookaway { start_ms: u64, end_ms: u64 },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Reference {
    pub fixations: Vec<RefFixation>,
    pub gaps: Vec<RefGap>,
}

fn usable(s: &GazeSample, cfg: &PipelineConfig) -> Option<(f64, f64)> {
    let c = &cfg.calibration;
    let p = s.point?;
    let x = c.a * p.x + c.b * p.y + c.c;
    let y = c.d * p.x + c.e * p.y + c.f;
    let on = x.is_finite() && y.is_finite() && x >= 0.0 && x < cfg.screen_w && y >= 0.0 && y < cfg.screen_h;
    on.then_some((x, y))
}

fn ref_median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn dispersion(pts: &[(u64, f64, f64)]) -> f64 {
    let xs = pts.iter().map(|p| p.1);
    let ys = pts.iter().map(|p| p.2);
    let span = |it: &mut dyn Iterator<Item = f64>| {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in it {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        hi - lo
    };
    span(&mut xs.into_iter()).max(span(&mut ys.into_iter()))
}

fn centroid(pts: &[(u64, f64, f64)]) -> (f64, f64) {
    let mut sx = 0.0;
    let mut sy = 0.0;
    for p in pts {
        sx += p.1;
        sy += p.2;
    }
    (sx / pts.len() as f64, sy / pts.len() as f64)
}

/// Textbook I-DT over one uninterrupted run of smoothed points.
pub fn idt_batch(points: &[(u64, f64, f64)], dispersion_px: f64, min_ms: u64) -> Vec<RefFixation> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < points.len() {
        let Some(mut j) = (i..points.len()).find(|&j| points[j].0 - points[i].0 >= min_ms) else { break };
        if dispersion(&points[i..=j]) <= dispersion_px {
            while j + 1 < points.len() && dispersion(&points[i..=j + 1]) <= dispersion_px {
                j += 1;
            }
            let (cx, cy) = centroid(&points[i..=j]);
            out.push(RefFixation { start_ms: points[i].0, end_ms: points[j].0, cx, cy });
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

pub fn reference(trace: &[GazeSample], cfg: &PipelineConfig) -> Reference {
    let marks: Vec<Option<(f64, f64)>> = trace.iter().map(|s| usable(s, cfg)).collect();
    let mut reference = Reference::default();
    let mut runs: Vec<Vec<(u64, f64, f64)>> = vec![Vec::new()];

    let mut i = 0;
    while i < trace.len() {
        if let Some((x, y)) = marks[i] {
            runs.last_mut().unwrap().push((trace[i].t_ms, x, y));
            i += 1;
            continue;
        }
        let start = trace[i].t_ms;
        let mut j = i;
        while j < trace.len() && marks[j].is_none() {
            j += 1;
        }
        if j < trace.len() {
            let end = trace[j].t_ms;
            let dur = end - start;
            if dur > cfg.blink_max_ms {
                reference.gaps.push(RefGap::Lookaway { start_ms: start, end_ms: end });
                runs.push(Vec::new());
            } else if dur >= cfg.blink_min_ms {
                reference.gaps.push(RefGap::Blink { start_ms: start, end_ms: end });
                runs.push(Vec::new());
            }
        } else {
            let last = trace[j - 1].t_ms;
            if last - start > cfg.blink_max_ms {
                reference.gaps.push(RefGap::Lookaway { start_ms: start, end_ms: last });
            }
        }
        i = j;
    }

    let w = cfg.smoothing_window;
    for run in &runs {
        let smoothed: Vec<(u64, f64, f64)> = (0..run.len())
            .map(|k| {
                let lo = (k + 1).saturating_sub(w);
                let xs: Vec<f64> = run[lo..=k].iter().map(|p| p.1).collect();
                let ys: Vec<f64> = run[lo..=k].iter().map(|p| p.2).collect();
                (run[k].0, ref_median(&xs), ref_median(&ys))
            })
            .collect();
        reference.fixations.extend(idt_batch(&smoothed, cfg.dispersion_px, cfg.min_fixation_ms));
    }
    reference
}


/// Collects fixations and classified gaps from pipeline output, for comparison
/// with [`reference`].
pub fn from_events(events: &[GazeEvent]) -> Reference {
    let mut r = Reference::default();
    let mut away_from = None;
    for ev in events {
        match *ev {
            GazeEvent::FixationEnd { t_ms, cx, cy, duration_ms } => {
                r.fixations.push(RefFixation { start_ms: t_ms - duration_ms, end_ms: t_ms, cx, cy })
            }
            GazeEvent::Blink { t_start_ms, t_end_ms } => r.gaps.push(RefGap::Blink { start_ms: t_start_ms, end_ms: t_end_ms }),
            GazeEvent::LookawayStart { t_ms } => away_from = Some(t_ms),
            GazeEvent::LookawayEnd { t_ms } => {
                let start_ms = away_from.take().expect("look-away end without start");
                r.gaps.push(RefGap::Lookaway { start_ms, end_ms: t_ms })
            }
            _ => {}
        }
    }
    r
}
