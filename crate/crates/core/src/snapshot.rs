//! Binary field snapshots.
//!
//! Layout: magic `TFLOW1\0\0`, u32-le grid size n, u32-le field count,
//! f64-le time, then per field a u16-le name length, the name bytes, and
//! n×n f64-le collocation values in row-major order. Round trips are
//! bit-exact.

use std::fs;
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::material::MaterialLaws;
use crate::spectral::{ScalarField, TorusGrid, VectorField};
use crate::state::FlowState;

pub const MAGIC: &[u8; 8] = b"TFLOW1\0\0";

/// A named set of physical fields at one time instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub n: usize,
    pub fields: Vec<(String, Array2<f64>)>,
}

pub fn encode(snap: &Snapshot) -> Vec<u8> {
    let mut out = Vec::with_capacity(24 + snap.fields.len() * (8 * snap.n * snap.n + 16));
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(snap.n as u32).to_le_bytes());
    out.extend_from_slice(&(snap.fields.len() as u32).to_le_bytes());
    out.extend_from_slice(&snap.time.to_le_bytes());
    for (name, data) in &snap.fields {
        out.extend_from_slice(&(name.len() as u16).to_le_bytes());
        out.extend_from_slice(name.as_bytes());
        for v in data.iter() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<Snapshot> {
    let bad = |msg: &str| Error::SnapshotFormat(msg.to_string());
    if bytes.len() < 24 {
        return Err(bad("file shorter than the fixed header"));
    }
    if &bytes[0..8] != MAGIC {
        return Err(bad("bad magic"));
    }
    let n = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let count = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    let time = f64::from_le_bytes(bytes[16..24].try_into().unwrap());
    let mut pos = 24usize;
    let mut fields = Vec::with_capacity(count);
    for _ in 0..count {
        if pos + 2 > bytes.len() {
            return Err(bad("truncated field name length"));
        }
        let name_len = u16::from_le_bytes(bytes[pos..pos + 2].try_into().unwrap()) as usize;
        pos += 2;
        if pos + name_len > bytes.len() {
            return Err(bad("truncated field name"));
        }
        let name = std::str::from_utf8(&bytes[pos..pos + name_len])
            .map_err(|_| bad("field name is not utf-8"))?
            .to_string();
        pos += name_len;
        let payload = n * n * 8;
        if pos + payload > bytes.len() {
            return Err(bad("truncated field payload"));
        }
        let mut data = Vec::with_capacity(n * n);
        for chunk in bytes[pos..pos + payload].chunks_exact(8) {
            data.push(f64::from_le_bytes(chunk.try_into().unwrap()));
        }
        pos += payload;
        let array = Array2::from_shape_vec((n, n), data)
            .map_err(|_| bad("field payload has the wrong shape"))?;
        fields.push((name, array));
    }
    if pos != bytes.len() {
        return Err(bad("trailing bytes after the last field"));
    }
    Ok(Snapshot { time, n, fields })
}

pub fn write_snapshot(path: &Path, snap: &Snapshot) -> Result<()> {
    fs::write(path, encode(snap)).map_err(|e| Error::io(path, e))
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}

/// Dump a state's fields (u1, u2, phi, theta) in physical representation.
pub fn snapshot_from_state(state: &FlowState) -> Snapshot {
    Snapshot {
        time: state.t(),
        n: state.grid().n(),
        fields: vec![
            ("u1".into(), state.velocity().x.physical_data().into_owned()),
            ("u2".into(), state.velocity().y.physical_data().into_owned()),
            ("phi".into(), state.order_parameter().physical_data().into_owned()),
            ("theta".into(), state.temperature().physical_data().into_owned()),
        ],
    }
}

/// Rebuild a state from a snapshot (used to restart a run as a fresh
/// initial condition).
pub fn state_from_snapshot(snap: &Snapshot, material: &MaterialLaws) -> Result<FlowState> {
    let grid = TorusGrid::new(snap.n)?;
    let get = |name: &str| -> Result<ScalarField> {
        let data = snap
            .fields
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.clone())
            .ok_or_else(|| Error::SnapshotFormat(format!("missing field `{name}`")))?;
        ScalarField::from_physical(grid.clone(), data)
    };
    let u = VectorField::new(get("u1")?, get("u2")?)?;
    FlowState::new(snap.time, u, get("phi")?, get("theta")?, material)
}
