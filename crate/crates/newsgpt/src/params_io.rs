//! Binary parameter file.
//!
//! Layout, all little-endian: `b"NGPT"`, `u32` version, six `u32` shape
//! fields (buffer, vocab, embed, filters, kernel, dense), then every tensor
//! as raw `f64` bits in [`ModelParams::tensors`] order. Values round-trip bit
//! for bit, NaN payloads included.

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use newsgpt_core::classifier::{ModelConfig, ModelParams};

pub const MAGIC: &[u8; 4] = b"NGPT";
pub const VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ParamsFileError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("not a parameter file (bad magic)")]
    BadMagic,
    #[error("unsupported parameter file version {0}")]
    Version(u32),
    #[error("invalid model shape: {0}")]
    Shape(String),
    #[error("{0} trailing bytes after the last tensor")]
    Trailing(usize),
}

pub fn write_params<W: Write>(mut w: W, params: &ModelParams) -> Result<(), ParamsFileError> {
    params
        .check_shapes()
        .map_err(|e| ParamsFileError::Shape(e.to_string()))?;
    let c = &params.config;
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    for dim in [c.buffer_size, c.vocab_size, c.embed_dim, c.conv_filters, c.kernel_size, c.dense_units] {
        let dim = u32::try_from(dim).map_err(|_| ParamsFileError::Shape(format!("dimension {dim} too large")))?;
        w.write_all(&dim.to_le_bytes())?;
    }
    for tensor in params.tensors() {
        for v in tensor {
            w.write_all(&v.to_bits().to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> io::Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_bits(u64::from_le_bytes(b)))
}

pub fn read_params<R: Read>(mut r: R) -> Result<ModelParams, ParamsFileError> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    params_from_bytes(&bytes)
}

/// Parses a whole file image. The payload length is checked against the
/// header before anything is allocated.
pub fn params_from_bytes(bytes: &[u8]) -> Result<ModelParams, ParamsFileError> {
    let mut r = bytes;
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(ParamsFileError::BadMagic);
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(ParamsFileError::Version(version));
    }
    let mut dims = [0usize; 6];
    for d in &mut dims {
        *d = read_u32(&mut r)? as usize;
    }
    let config = ModelConfig {
        buffer_size: dims[0],
        vocab_size: dims[1],
        embed_dim: dims[2],
        conv_filters: dims[3],
        kernel_size: dims[4],
        dense_units: dims[5],
    };
    config
        .validate()
        .map_err(|e| ParamsFileError::Shape(e.to_string()))?;
    let expected = checked_byte_len(&config);
    match expected {
        Some(n) if n == r.len() => {}
        Some(n) if n < r.len() => return Err(ParamsFileError::Trailing(r.len() - n)),
        _ => return Err(io::Error::from(io::ErrorKind::UnexpectedEof).into()),
    }
    let mut params = ModelParams::zeros(config);
    for tensor in params.tensors_mut() {
        for v in tensor.iter_mut() {
            *v = read_f64(&mut r)?;
        }
    }
    Ok(params)
}

fn checked_byte_len(c: &ModelConfig) -> Option<usize> {
    let flat = c.buffer_size.checked_sub(c.kernel_size)?.checked_add(1)?.checked_mul(c.conv_filters)?;
    let parts = [
        c.vocab_size.checked_mul(c.embed_dim)?,
        c.kernel_size.checked_mul(c.embed_dim)?.checked_mul(c.conv_filters)?,
        c.conv_filters,
        flat.checked_mul(c.dense_units)?,
        c.dense_units,
        c.dense_units,
        1,
    ];
    parts
        .into_iter()
        .try_fold(0usize, |acc, n| acc.checked_add(n))?
        .checked_mul(8)
}

pub fn save_params(path: &Path, params: &ModelParams) -> Result<(), ParamsFileError> {
    let mut buf = Vec::with_capacity(40 + 8 * (params.config.parameter_count()));
    write_params(&mut buf, params)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn load_params(path: &Path) -> Result<ModelParams, ParamsFileError> {
    params_from_bytes(&fs::read(path)?)
}
