use std::io::Write;

use serde::{Deserialize, Serialize};

use super::dopri::DenseSegment;
use crate::error::{Error, Result};
use crate::util::fmt_machine;

/// One point `(r, u(r), u'(r))` of a radial solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub r: f64,
    pub u: f64,
    pub du: f64,
}

/// Samples of a radial solution at strictly increasing radii, optionally with
/// the integrator's continuous extension for evaluation between samples.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    samples: Vec<Sample>,
    dense: Vec<DenseSegment>,
}

impl Trajectory {
    /// Builds a trajectory from raw samples (no dense output); radii must be
    /// positive and strictly increasing.
    pub fn from_samples(samples: Vec<Sample>) -> Result<Self> {
        if let Some(first) = samples.first() {
            if !(first.r > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "trajectory must start at r > 0 (got {})",
                    first.r
                )));
            }
        }
        if samples.windows(2).any(|w| !(w[1].r > w[0].r)) {
            return Err(Error::InvalidParameter(
                "trajectory radii must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            samples,
            dense: Vec::new(),
        })
    }

    pub(crate) fn with_start(sample: Sample) -> Self {
        Self {
            samples: vec![sample],
            dense: Vec::new(),
        }
    }

    pub(crate) fn push_step(&mut self, sample: Sample, segment: DenseSegment) {
        self.samples.push(sample);
        self.dense.push(segment);
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn has_dense_output(&self) -> bool {
        !self.dense.is_empty()
    }

    pub fn r_start(&self) -> f64 {
        self.samples.first().map_or(f64::NAN, |s| s.r)
    }

    pub fn r_end(&self) -> f64 {
        self.samples.last().map_or(f64::NAN, |s| s.r)
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    /// Value at `r ∈ [r_start, r_end]`: dense output when available, cubic
    /// Hermite in `u` and linear in `du` otherwise.
    pub fn eval(&self, r: f64) -> Option<Sample> {
        if self.samples.is_empty() || r < self.r_start() || r > self.r_end() {
            return None;
        }
        if !self.dense.is_empty() {
            let idx = self.dense.partition_point(|s| s.end() < r);
            if let Some(seg) = self.dense.get(idx) {
                if r >= seg.start() {
                    let [u, du] = seg.eval(r);
                    return Some(Sample { r, u, du });
                }
            }
        }
        let idx = self.samples.partition_point(|s| s.r < r);
        if idx < self.samples.len() && self.samples[idx].r == r {
            return Some(self.samples[idx]);
        }
        let (a, b) = (self.samples[idx - 1], self.samples[idx]);
        let h = b.r - a.r;
        let t = (r - a.r) / h;
        let (t2, t3) = (t * t, t * t * t);
        let u = (2.0 * t3 - 3.0 * t2 + 1.0) * a.u
            + (t3 - 2.0 * t2 + t) * h * a.du
            + (-2.0 * t3 + 3.0 * t2) * b.u
            + (t3 - t2) * h * b.du;
        let du = a.du + t * (b.du - a.du);
        Some(Sample { r, u, du })
    }

    /// Uniform resampling `r_start + k·dr` up to `r_end`.
    pub fn resample(&self, dr: f64) -> Result<Trajectory> {
        if !(dr > 0.0) {
            return Err(Error::InvalidParameter(format!("dr must be positive (got {dr})")));
        }
        if self.samples.len() < 2 {
            return Err(Error::InsufficientSamples {
                needed: 2,
                got: self.samples.len(),
            });
        }
        let (r0, r1) = (self.r_start(), self.r_end());
        let count = ((r1 - r0) / dr).floor() as usize + 1;
        let samples = (0..count)
            .filter_map(|k| self.eval(r0 + k as f64 * dr))
            .collect();
        Ok(Trajectory {
            samples,
            dense: Vec::new(),
        })
    }

    /// Keeps samples with `r <= r_cut` and the dense segments that end by then.
    pub(crate) fn truncate(&mut self, r_cut: f64) {
        self.samples.retain(|s| s.r <= r_cut);
        self.dense.retain(|s| s.end() <= r_cut * (1.0 + 1e-15));
    }

    /// Appends `other`, dropping its first sample when it repeats our last radius.
    pub(crate) fn extend(&mut self, other: Trajectory) {
        let end = self.r_end();
        let mut iter = other.samples.into_iter().peekable();
        if let Some(first) = iter.peek() {
            if first.r <= end {
                iter.next();
            }
        }
        self.samples.extend(iter);
        self.dense.extend(other.dense);
    }

    /// Writes `r,u,du` rows with a header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "r,u,du")?;
        for s in &self.samples {
            writeln!(out, "{},{},{}", fmt_machine(s.r), fmt_machine(s.u), fmt_machine(s.du))?;
        }
        Ok(())
    }
}
