//! Problem instances: travel-time matrix, processing times and fleet.
//!
//! Location 0 is the depot; customers are locations `1..=n`.

mod tsplib;
mod variant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use tsplib::{parse_tsplib, write_tsplib, RawTsplib};
pub use variant::{build_instance, derive_seed, fleet_for, VariantKind, VariantSpec};

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("unsupported edge weight type: {0}")]
    UnsupportedWeightType(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("dimension mismatch: expected {expected} values, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not symmetric at ({i}, {j})")]
    Asymmetric { i: usize, j: usize },
    #[error("invalid matrix entry at ({i}, {j}): {value}")]
    InvalidEntry { i: usize, j: usize, value: f64 },
    #[error("instance needs at least 2 locations, got {0}")]
    TooSmall(usize),
    #[error("invalid fleet: m={m}, k={k}")]
    InvalidFleet { m: usize, k: usize },
    #[error("invalid processing time for customer {customer}: {value}")]
    InvalidProcessingTime { customer: usize, value: f64 },
    #[error("unknown variant kind '{0}'")]
    UnknownVariant(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Dense square travel-time matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DistMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, InstanceError> {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(InstanceError::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m.validate()?;
        Ok(m)
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    /// Zero diagonal, non-negative finite entries, symmetric within 1e-9 relative.
    pub fn validate(&self) -> Result<(), InstanceError> {
        for i in 0..self.n {
            for j in 0..self.n {
                let v = self.get(i, j);
                if !v.is_finite() || v < 0.0 || (i == j && v != 0.0) {
                    return Err(InstanceError::InvalidEntry { i, j, value: v });
                }
                let w = self.get(j, i);
                if (v - w).abs() > 1e-9 * v.abs().max(w.abs()).max(1.0) {
                    return Err(InstanceError::Asymmetric { i, j });
                }
            }
        }
        Ok(())
    }

    /// Smallest and largest off-diagonal entries.
    pub fn off_diagonal_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    let v = self.get(i, j);
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
        }
        (lo, hi)
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|v| v.fract() == 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FleetConfig {
    /// Number of vehicles.
    pub m: usize,
    /// Resources carried by each vehicle when leaving the depot.
    pub k: usize,
}

impl FleetConfig {
    pub fn new(m: usize, k: usize) -> Result<Self, InstanceError> {
        if m == 0 || k == 0 {
            return Err(InstanceError::InvalidFleet { m, k });
        }
        Ok(Self { m, k })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub label: String,
    n: usize,
    dist: DistMatrix,
    /// Indexed by location; entry 0 (depot) is always 0.
    processing: Vec<f64>,
    pub fleet: FleetConfig,
    pub variant: Option<VariantSpec>,
}

impl Instance {
    /// `processing[c - 1]` is the processing time of customer `c`.
    pub fn new(
        label: impl Into<String>,
        dist: DistMatrix,
        processing: Vec<f64>,
        fleet: FleetConfig,
    ) -> Result<Self, InstanceError> {
        dist.validate()?;
        if dist.size() < 2 {
            return Err(InstanceError::TooSmall(dist.size()));
        }
        let n = dist.size() - 1;
        if processing.len() != n {
            return Err(InstanceError::DimensionMismatch {
                expected: n,
                found: processing.len(),
            });
        }
        FleetConfig::new(fleet.m, fleet.k)?;
        for (i, &p) in processing.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(InstanceError::InvalidProcessingTime {
                    customer: i + 1,
                    value: p,
                });
            }
        }
        let mut by_location = Vec::with_capacity(n + 1);
        by_location.push(0.0);
        by_location.extend(processing);
        Ok(Self {
            label: label.into(),
            n,
            dist,
            processing: by_location,
            fleet,
            variant: None,
        })
    }

    /// Convenience constructor from a dense row list.
    pub fn from_rows(
        label: impl Into<String>,
        rows: &[Vec<f64>],
        processing: Vec<f64>,
        m: usize,
        k: usize,
    ) -> Result<Self, InstanceError> {
        Self::new(label, DistMatrix::from_rows(rows)?, processing, FleetConfig::new(m, k)?)
    }

    /// Number of customers.
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.fleet.m
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.fleet.k
    }

    /// Travel time between two locations.
    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist.get(i, j)
    }

    /// Processing time of customer `c` (1-based).
    #[inline]
    pub fn p(&self, c: usize) -> f64 {
        self.processing[c]
    }

    pub fn matrix(&self) -> &DistMatrix {
        &self.dist
    }

    pub fn customers(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.n
    }

    /// Processing times of customers `1..=n`.
    pub fn processing_times(&self) -> &[f64] {
        &self.processing[1..]
    }

    /// Makespan of serving every customer with one vehicle as isolated depot
    /// round trips, plus the farthest depot distance.
    pub fn serial_upper_bound(&self) -> f64 {
        let serial: f64 = self
            .customers()
            .map(|c| 2.0 * self.d(0, c) + self.p(c))
            .sum();
        let far = self.customers().map(|c| self.d(0, c)).fold(0.0, f64::max);
        serial + far
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            label: self.label.clone(),
            n: self.n,
            m: self.fleet.m,
            k: self.fleet.k,
            matrix: self.dist.rows(),
            processing_times: self.processing_times().to_vec(),
            variant: self.variant.map(|v| v.kind.to_string()),
            seed: self.variant.map(|v| v.seed),
            replicate: self.variant.map(|v| v.replicate),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, InstanceError> {
        let file: InstanceFile = serde_json::from_str(text)?;
        file.into_instance()
    }
}

/// On-disk interchange form of an [`Instance`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub label: String,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub matrix: Vec<Vec<f64>>,
    pub processing_times: Vec<f64>,
    #[serde(default)]
    pub variant: Option<String>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub replicate: Option<u32>,
}

impl InstanceFile {
    pub fn into_instance(self) -> Result<Instance, InstanceError> {
        if self.matrix.len() != self.n + 1 {
            return Err(InstanceError::DimensionMismatch {
                expected: self.n + 1,
                found: self.matrix.len(),
            });
        }
        let mut inst = Instance::from_rows(self.label, &self.matrix, self.processing_times, self.m, self.k)?;
        if let (Some(kind), Some(seed)) = (self.variant, self.seed) {
            inst.variant = Some(VariantSpec {
                kind: kind.parse()?,
                seed,
                replicate: self.replicate.unwrap_or(0),
            });
        }
        Ok(inst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let inst = Instance::from_rows(
            "toy",
            &[vec![0.0, 10.0, 12.0], vec![10.0, 0.0, 5.0], vec![12.0, 5.0, 0.0]],
            vec![20.0, 20.0],
            1,
            2,
        )
        .unwrap();
        let back = Instance::from_json(&inst.to_json()).unwrap();
        assert_eq!(back, inst);
        assert_eq!(back.p(2), 20.0);
        assert_eq!(back.d(1, 2), 5.0);
    }

    #[test]
    fn rejects_negative_processing() {
        let err = Instance::from_rows("x", &[vec![0.0, 1.0], vec![1.0, 0.0]], vec![-1.0], 1, 1);
        assert!(matches!(err, Err(InstanceError::InvalidProcessingTime { customer: 1, .. })));
    }

    #[test]
    fn rejects_nonzero_diagonal() {
        let err = DistMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 0.0]]);
        assert!(matches!(err, Err(InstanceError::InvalidEntry { i: 0, j: 0, .. })));
    }
}
