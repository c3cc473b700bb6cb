//! Finite windows of sequence values `x(k)`, `k in [k_min, k_max]`.
//!
//! A window stands in for the infinite sequence spaces: the whole window
//! models a two-sided sequence, the known prefix `k <= s` its one-sided
//! trace, and the complement of the known mask the missing set.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SampleWindow {
    k_min: i64,
    values: Vec<Complex64>,
    known: Vec<bool>,
    step: Option<f64>,
    origin: Option<f64>,
}

impl SampleWindow {
    /// All-known window starting at index `k_min`.
    pub fn from_values(k_min: i64, values: Vec<Complex64>) -> Result<Self> {
        let known = vec![true; values.len()];
        Self::with_mask(k_min, values, known)
    }

    pub fn with_mask(k_min: i64, values: Vec<Complex64>, known: Vec<bool>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("window must not be empty".into()));
        }
        if values.len() != known.len() {
            return Err(Error::InvalidArgument(format!(
                "values ({}) and mask ({}) lengths differ",
                values.len(),
                known.len()
            )));
        }
        Ok(Self {
            k_min,
            values,
            known,
            step: None,
            origin: None,
        })
    }

    pub fn zeros(k_min: i64, k_max: i64) -> Result<Self> {
        if k_max < k_min {
            return Err(Error::InvalidArgument(format!(
                "empty index range [{k_min}, {k_max}]"
            )));
        }
        Self::from_values(k_min, vec![Complex64::new(0.0, 0.0); (k_max - k_min + 1) as usize])
    }

    pub fn set_grid(&mut self, step: f64, origin: f64) {
        self.step = Some(step);
        self.origin = Some(origin);
    }

    pub fn step(&self) -> Option<f64> {
        self.step
    }

    pub fn origin(&self) -> Option<f64> {
        self.origin
    }

    pub fn k_min(&self) -> i64 {
        self.k_min
    }

    pub fn k_max(&self) -> i64 {
        self.k_min + self.values.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn known_mask(&self) -> &[bool] {
        &self.known
    }

    pub fn contains(&self, k: i64) -> bool {
        k >= self.k_min && k <= self.k_max()
    }

    fn offset(&self, k: i64) -> Option<usize> {
        self.contains(k).then(|| (k - self.k_min) as usize)
    }

    pub fn get(&self, k: i64) -> Option<Complex64> {
        self.offset(k).map(|i| self.values[i])
    }

    pub fn is_known(&self, k: i64) -> bool {
        self.offset(k).is_some_and(|i| self.known[i])
    }

    /// `(k, x(k))` pairs in index order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.k_min + i as i64, v))
    }

    pub fn known_count(&self) -> usize {
        self.known.iter().filter(|&&b| b).count()
    }

    pub fn unknown_count(&self) -> usize {
        self.len() - self.known_count()
    }

    pub fn unknown_indices(&self) -> Vec<i64> {
        self.known
            .iter()
            .enumerate()
            .filter(|(_, &b)| !b)
            .map(|(i, _)| self.k_min + i as i64)
            .collect()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Marks `k > s` unknown; the remaining known part is the one-sided
    /// trace `{x(k)}_{k <= s}`.
    pub fn mark_onesided(&mut self, s: i64) {
        for (i, flag) in self.known.iter_mut().enumerate() {
            *flag = self.k_min + i as i64 <= s;
        }
    }

    pub fn mark_unknown(&mut self, k: i64) -> Result<()> {
        let i = self
            .offset(k)
            .ok_or_else(|| Error::InvalidArgument(format!("index {k} outside window")))?;
        self.known[i] = false;
        Ok(())
    }

    /// Marks every odd index unknown.
    pub fn mark_odd_unknown(&mut self) {
        for (i, flag) in self.known.iter_mut().enumerate() {
            *flag = (self.k_min + i as i64).rem_euclid(2) == 0;
        }
    }

    pub fn mark_all_known(&mut self) {
        self.known.iter_mut().for_each(|b| *b = true);
    }

    /// True if the known samples form a non-empty proper prefix or suffix,
    /// i.e. the mask describes a one-sided trace.
    pub fn is_onesided(&self) -> bool {
        let n_known = self.known_count();
        if n_known == 0 || n_known == self.len() {
            return false;
        }
        let prefix = self.known.iter().take_while(|&&b| b).count();
        let suffix = self.known.iter().rev().take_while(|&&b| b).count();
        prefix == n_known || suffix == n_known
    }

    /// Copy of the window shifted by `shift` indices (values unchanged).
    pub fn shifted(&self, shift: i64) -> Self {
        let mut out = self.clone();
        out.k_min += shift;
        out
    }

    /// Writes `k,re,im,known` rows, preceded by `# step=` / `# origin=`
    /// comment lines when the grid is known.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        if let Some(step) = self.step {
            writeln!(out, "# step={step}")?;
        }
        if let Some(origin) = self.origin {
            writeln!(out, "# origin={origin}")?;
        }
        let mut writer = csv::Writer::from_writer(out);
        for (i, (k, v)) in self.iter().enumerate() {
            writer.serialize(WindowRow {
                k,
                re: v.re,
                im: v.im,
                known: u8::from(self.known[i]),
            })?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Reads the CSV written by [`SampleWindow::write_csv`]. Rows must be
    /// contiguous in `k` and ascending.
    pub fn read_csv<R: Read>(mut input: R) -> Result<Self> {
        let mut text = String::new();
        input.read_to_string(&mut text)?;
        let (mut step, mut origin) = (None, None);
        for line in text.lines().take_while(|l| l.starts_with('#')) {
            let body = line.trim_start_matches('#').trim();
            if let Some((key, value)) = body.split_once('=') {
                let parsed = value.trim().parse::<f64>().ok();
                match key.trim() {
                    "step" => step = parsed,
                    "origin" => origin = parsed,
                    _ => {}
                }
            }
        }
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = reader.headers()?.clone();
        for column in ["k", "re", "im", "known"] {
            if !headers.iter().any(|h| h == column) {
                return Err(Error::Parse(format!("window CSV lacks column `{column}`")));
            }
        }
        let mut rows = Vec::new();
        for row in reader.deserialize::<WindowRow>() {
            rows.push(row?);
        }
        let first = rows
            .first()
            .ok_or_else(|| Error::Parse("window CSV has no rows".into()))?;
        let k_min = first.k;
        let mut values = Vec::with_capacity(rows.len());
        let mut known = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            if row.k != k_min + i as i64 {
                return Err(Error::Parse(format!(
                    "window CSV indices must be contiguous ascending; row {} has k={}",
                    i + 1,
                    row.k
                )));
            }
            if row.known > 1 {
                return Err(Error::Parse(format!("known flag must be 0 or 1, got {}", row.known)));
            }
            values.push(Complex64::new(row.re, row.im));
            known.push(row.known == 1);
        }
        let mut window = Self::with_mask(k_min, values, known)?;
        window.step = step;
        window.origin = origin;
        Ok(window)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct WindowRow {
    k: i64,
    re: f64,
    im: f64,
    known: u8,
}
