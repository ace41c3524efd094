//! Outcome records of inequality checks.
//!
//! A certificate carries the worst slack seen over all samples; it passes iff
//! `worst_slack ≥ −tolerance`. Slack records merge associatively, so sample
//! sets may be split and recombined in any grouping.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub inequality: String,
    pub samples: usize,
    pub seed: u64,
    pub worst_slack: f64,
    pub witness: Vec<f64>,
    pub pass: bool,
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub constants: BTreeMap<String, f64>,
}

impl Certificate {
    pub fn tolerance(&self) -> f64 {
        self.tolerances.get("slack").copied().unwrap_or(0.0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serialises")
    }
}

/// Running minimum of slack values with the witness that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SlackRecord {
    pub count: usize,
    pub worst: f64,
    pub witness: Vec<f64>,
    pub index: usize,
}

impl Default for SlackRecord {
    fn default() -> Self {
        Self {
            count: 0,
            worst: f64::INFINITY,
            witness: Vec::new(),
            index: usize::MAX,
        }
    }
}

impl SlackRecord {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records one sample; `index` orders ties so merges are deterministic.
    pub fn push(&mut self, index: usize, slack: f64, witness: &[f64]) {
        self.count += 1;
        let slack = if slack.is_nan() { f64::NEG_INFINITY } else { slack };
        if slack < self.worst || (slack == self.worst && index < self.index) {
            self.worst = slack;
            self.witness = witness.to_vec();
            self.index = index;
        }
    }

    pub fn merge(mut self, other: SlackRecord) -> SlackRecord {
        self.count += other.count;
        if other.worst < self.worst || (other.worst == self.worst && other.index < self.index) {
            self.worst = other.worst;
            self.witness = other.witness;
            self.index = other.index;
        }
        self
    }

    pub fn finish(self, inequality: &str, seed: u64, tolerance: f64) -> Result<Certificate> {
        if self.count == 0 {
            return Err(Error::domain(format!("{inequality}: no samples to certify")));
        }
        // JSON has no infinities.
        let worst = self.worst.clamp(-f64::MAX, f64::MAX);
        let mut tolerances = BTreeMap::new();
        tolerances.insert("slack".to_string(), tolerance);
        Ok(Certificate {
            inequality: inequality.to_string(),
            samples: self.count,
            seed,
            worst_slack: worst,
            witness: self.witness,
            pass: worst >= -tolerance,
            tolerances,
            constants: BTreeMap::new(),
        })
    }
}

/// Slack of a two-sided multiplicative envelope `e^{−k} ≤ ratio ≤ e^{k}`, in
/// log space: `k − |log ratio|`.
pub fn envelope_slack(ratio: f64, kappa: f64) -> f64 {
    if !(ratio > 0.0) {
        return f64::NEG_INFINITY;
    }
    kappa - ratio.ln().abs()
}

/// Relative slack of `value ≤ bound`.
pub fn upper_slack(value: f64, bound: f64) -> f64 {
    (bound - value) / bound.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pass_iff_slack_above_negative_tolerance() {
        let mut r = SlackRecord::new();
        r.push(0, -1e-7, &[1.0]);
        let c = r.clone().finish("x", 1, 1e-6).unwrap();
        assert!(c.pass);
        let c = r.finish("x", 1, 1e-8).unwrap();
        assert!(!c.pass);
        assert!(SlackRecord::new().finish("x", 0, 1.0).is_err());
    }

    #[test]
    fn json_round_trip() {
        let mut r = SlackRecord::new();
        r.push(3, 0.25, &[0.1, 0.2]);
        let c = r.finish("harnack", 42, 1e-9).unwrap();
        let back: Certificate = serde_json::from_str(&c.to_json()).unwrap();
        assert_eq!(back, c);
        let v: serde_json::Value = serde_json::from_str(&c.to_json()).unwrap();
        for key in ["inequality", "samples", "seed", "worst_slack", "witness", "pass", "tolerances"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }

    proptest! {
        #[test]
        fn merge_is_associative_and_order_independent(
            slacks in proptest::collection::vec(-1.0f64..1.0, 1..40),
            split1 in 0usize..40,
            split2 in 0usize..40,
        ) {
            let n = slacks.len();
            let (a, b) = (split1.min(n), split2.min(n));
            let (lo, hi) = (a.min(b), a.max(b));
            let rec = |range: std::ops::Range<usize>| {
                let mut r = SlackRecord::new();
                for i in range { r.push(i, slacks[i], &[i as f64]); }
                r
            };
            let whole = rec(0..n);
            let left = rec(0..lo).merge(rec(lo..hi).merge(rec(hi..n)));
            let right = rec(hi..n).merge(rec(0..lo)).merge(rec(lo..hi));
            prop_assert_eq!(&whole, &left);
            prop_assert_eq!(&whole, &right);
        }
    }
}
