// Copyright 2026 PLME Lab Contributors
// SPDX-License-Identifier: Apache-2.0

//! Binary cache for map time series.
//!
//! Layout, all little-endian:
//!
//! ```text
//! b"PLMEMAP1"
//! u64            header length in bytes
//! [u8]           JSON header
//! f64 × 32 × T   deviation V − I per time, column-stacking, row-major,
//!                re/im interleaved
//! f64 × 9 × T    standard errors of the Bloch block (ensembles only)
//! f64 × 9 × T×B  batch-mean Bloch deviations (ensembles only)
//! ```

use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{EnsembleResult, Provenance, QuantumMap};
use crate::error::{Error, Result};
use crate::qmath::{Basis, Mat, Mat3, Superoperator, C64};

const MAGIC: &[u8; 8] = b"PLMEMAP1";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CacheHeader {
    pub provenance: Provenance,
    pub times: Vec<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub n_traj: Option<usize>,
    /// Trajectories per batch; empty unless the file holds an ensemble.
    #[serde(default)]
    pub batch_counts: Vec<usize>,
    /// Free-form description of how the maps were produced.
    #[serde(default)]
    pub meta: serde_json::Value,
}

fn put(out: &mut Vec<u8>, x: f64) {
    out.extend_from_slice(&x.to_le_bytes());
}

fn put_mat3(out: &mut Vec<u8>, m: &Mat3) {
    for row in &m.0 {
        for &x in row {
            put(out, x);
        }
    }
}

fn write_file(path: &Path, header: &CacheHeader, payload: &[u8]) -> Result<()> {
    let json = serde_json::to_vec(header).map_err(|e| Error::Cache(e.to_string()))?;
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    // Write then rename so readers never observe a partial file.
    let tmp = path.with_extension("tmp");
    {
        let mut w = BufWriter::new(fs::File::create(&tmp)?);
        w.write_all(MAGIC)?;
        w.write_all(&(json.len() as u64).to_le_bytes())?;
        w.write_all(&json)?;
        w.write_all(payload)?;
        w.flush()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn map_payload(maps: &[QuantumMap], out: &mut Vec<u8>) {
    for m in maps {
        let d = m.deviation.column_stacking();
        for i in 0..4 {
            for j in 0..4 {
                put(out, d[(i, j)].re);
                put(out, d[(i, j)].im);
            }
        }
    }
}

pub fn write_maps(path: &Path, maps: &[QuantumMap], meta: serde_json::Value) -> Result<()> {
    let provenance = maps.first().map(|m| m.provenance).unwrap_or(Provenance::Plme2);
    let header = CacheHeader {
        provenance,
        times: maps.iter().map(|m| m.t).collect(),
        seed: None,
        n_traj: None,
        batch_counts: Vec::new(),
        meta,
    };
    let mut payload = Vec::with_capacity(maps.len() * 256);
    map_payload(maps, &mut payload);
    write_file(path, &header, &payload)
}

pub fn write_ensemble(path: &Path, ens: &EnsembleResult, meta: serde_json::Value) -> Result<()> {
    let header = CacheHeader {
        provenance: Provenance::ExactEnsemble,
        times: ens.grid(),
        seed: Some(ens.seed),
        n_traj: Some(ens.n_traj),
        batch_counts: ens.batch_counts.clone(),
        meta,
    };
    let mut payload = Vec::new();
    map_payload(&ens.maps, &mut payload);
    for s in &ens.std_err {
        put_mat3(&mut payload, s);
    }
    for b in &ens.batch_means {
        for m in b {
            put_mat3(&mut payload, m);
        }
    }
    write_file(path, &header, &payload)
}

struct Reader {
    data: Vec<u8>,
    pos: usize,
}

impl Reader {
    fn f64(&mut self) -> Result<f64> {
        let b = self.data.get(self.pos..self.pos + 8).ok_or_else(|| Error::Cache("truncated payload".into()))?;
        self.pos += 8;
        Ok(f64::from_le_bytes(b.try_into().expect("8 bytes")))
    }

    fn mat3(&mut self) -> Result<Mat3> {
        let mut m = Mat3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.f64()?;
            }
        }
        Ok(m)
    }
}

fn read_file(path: &Path) -> Result<(CacheHeader, Vec<QuantumMap>, Reader)> {
    let mut data = Vec::new();
    fs::File::open(path)?.read_to_end(&mut data)?;
    if data.len() < 16 || &data[..8] != MAGIC {
        return Err(Error::Cache(format!("{} is not a map cache", path.display())));
    }
    let len = u64::from_le_bytes(data[8..16].try_into().expect("8 bytes")) as usize;
    let json = data.get(16..16 + len).ok_or_else(|| Error::Cache("truncated header".into()))?;
    let header: CacheHeader = serde_json::from_slice(json).map_err(|e| Error::Cache(e.to_string()))?;
    let mut r = Reader { pos: 16 + len, data };
    let mut maps = Vec::with_capacity(header.times.len());
    for &t in &header.times {
        let mut d = Mat::<4>::zeros();
        for i in 0..4 {
            for j in 0..4 {
                let re = r.f64()?;
                let im = r.f64()?;
                d[(i, j)] = C64::new(re, im);
            }
        }
        maps.push(QuantumMap::from_deviation(&Superoperator::new(d, Basis::ColumnStacking), t, header.provenance));
    }
    Ok((header, maps, r))
}

pub fn read_maps(path: &Path) -> Result<(CacheHeader, Vec<QuantumMap>)> {
    let (header, maps, _) = read_file(path)?;
    Ok((header, maps))
}

pub fn read_ensemble(path: &Path) -> Result<(CacheHeader, EnsembleResult)> {
    let (header, maps, mut r) = read_file(path)?;
    let (Some(seed), Some(n_traj)) = (header.seed, header.n_traj) else {
        return Err(Error::Cache("file does not hold an ensemble".into()));
    };
    let t = maps.len();
    let std_err = (0..t).map(|_| r.mat3()).collect::<Result<Vec<_>>>()?;
    let batch_means = header
        .batch_counts
        .iter()
        .map(|_| (0..t).map(|_| r.mat3()).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    if r.pos != r.data.len() {
        return Err(Error::Cache("trailing bytes after payload".into()));
    }
    let batch_counts = header.batch_counts.clone();
    Ok((header, EnsembleResult { maps, std_err, batch_means, batch_counts, n_traj, seed }))
}
