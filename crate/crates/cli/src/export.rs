//! Particle-path export as JSON lines, one record per particle.
//!
//! Non-finite numbers, which JSON cannot represent, are written as the strings
//! `"-inf"`, `"inf"` and `"nan"`.

use std::io::{self, BufRead, Write};

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use regchain::ParticleCloud;

mod real {
    use super::*;

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    fn to_repr(v: f64) -> Repr {
        if v.is_finite() {
            Repr::Num(v)
        } else if v.is_nan() {
            Repr::Text("nan".into())
        } else if v > 0.0 {
            Repr::Text("inf".into())
        } else {
            Repr::Text("-inf".into())
        }
    }

    fn from_repr<E: de::Error>(r: Repr) -> Result<f64, E> {
        match r {
            Repr::Num(v) => Ok(v),
            Repr::Text(s) => match s.as_str() {
                "nan" => Ok(f64::NAN),
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(E::custom(format!("not a number: {other:?}"))),
            },
        }
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        to_repr(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        from_repr(Repr::deserialize(d)?)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(|&x| to_repr(x)))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            Vec::<Repr>::deserialize(d)?
                .into_iter()
                .map(from_repr)
                .collect()
        }
    }
}

/// One particle of one test instance. Per-stage arrays are in chain order; `path`
/// is in target column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    pub instance_id: usize,
    pub particle_id: usize,
    #[serde(with = "real::vec")]
    pub path: Vec<f64>,
    pub order: Vec<usize>,
    #[serde(with = "real")]
    pub log_weight: f64,
    #[serde(with = "real")]
    pub initial_log_weight: f64,
    #[serde(with = "real::vec")]
    pub stage_log_weights: Vec<f64>,
    #[serde(with = "real::vec")]
    pub resample_corrections: Vec<f64>,
    #[serde(with = "real")]
    pub log_density: f64,
    #[serde(with = "real::vec")]
    pub stage_log_densities: Vec<f64>,
    /// Stages after which the cloud was resampled.
    pub resampled_at: Vec<usize>,
    /// `ln Σ_m exp(log_weight)` over the instance's particles.
    #[serde(with = "real")]
    pub log_z: f64,
}

impl PathRecord {
    /// `initial + Σ (stage weight + correction)`.
    pub fn rebuilt_log_weight(&self) -> f64 {
        self.initial_log_weight
            + self
                .stage_log_weights
                .iter()
                .zip(&self.resample_corrections)
                .map(|(a, b)| a + b)
                .sum::<f64>()
    }
}

pub fn cloud_records(cloud: &ParticleCloud<f64>, instance_id: usize) -> Vec<PathRecord> {
    let resampled_at: Vec<usize> = cloud.resample_events.iter().map(|e| e.stage).collect();
    (0..cloud.n_particles())
        .map(|p| PathRecord {
            instance_id,
            particle_id: p,
            path: cloud.paths[p].clone(),
            order: cloud.order.clone(),
            log_weight: cloud.log_weights[p],
            initial_log_weight: cloud.initial_log_weight,
            stage_log_weights: cloud.stage_log_weights[p].clone(),
            resample_corrections: cloud.resample_corrections[p].clone(),
            log_density: cloud.path_log_densities[p],
            stage_log_densities: cloud.stage_log_densities[p].clone(),
            resampled_at: resampled_at.clone(),
            log_z: cloud.log_z,
        })
        .collect()
}

/// Write one JSON line per particle and return how many were written.
pub fn export_paths<W: Write>(
    cloud: &ParticleCloud<f64>,
    instance_id: usize,
    sink: &mut W,
) -> io::Result<usize> {
    let records = cloud_records(cloud, instance_id);
    for r in &records {
        serde_json::to_writer(&mut *sink, r)?;
        sink.write_all(b"\n")?;
    }
    Ok(records.len())
}

pub fn read_paths<R: BufRead>(reader: R) -> io::Result<Vec<PathRecord>> {
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_finite_values_round_trip() {
        let r = PathRecord {
            instance_id: 3,
            particle_id: 1,
            path: vec![0.1, -2.5],
            order: vec![0, 1],
            log_weight: f64::NEG_INFINITY,
            initial_log_weight: -(2f64).ln(),
            stage_log_weights: vec![f64::NEG_INFINITY, 0.0],
            resample_corrections: vec![0.0, 0.0],
            log_density: f64::NEG_INFINITY,
            stage_log_densities: vec![f64::NEG_INFINITY, 1.0 / 3.0],
            resampled_at: vec![],
            log_z: 0.0,
        };
        let line = serde_json::to_string(&r).unwrap();
        assert!(line.contains("\"-inf\""));
        let back: PathRecord = serde_json::from_str(&line).unwrap();
        assert_eq!(back, r);
    }
}
