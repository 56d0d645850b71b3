//! CAMT: a minimal little-endian container for dense tensors.
//!
//! Layout:
//!
//! ```text
//! offset  size        field
//! 0       4           magic "CAMT"
//! 4       1           version (1)
//! 5       1           dtype (0 = f32 LE, 1 = u8)
//! 6       1           ndim (1..=4)
//! 7       4 * ndim    dims, u32 LE, outermost first
//! ...     prod(dims)  row-major payload, innermost dimension last
//! ```

use thiserror::Error;

pub const MAGIC: [u8; 4] = *b"CAMT";
pub const VERSION: u8 = 1;
pub const MAX_NDIM: usize = 4;
/// Upper bound on the element count of a single tensor.
pub const MAX_ELEMENTS: u64 = 1 << 31;

const FIXED_HEADER_LEN: usize = 7;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CamtError {
    #[error("bad magic: expected \"CAMT\", found {found:?}")]
    BadMagic { found: [u8; 4] },
    #[error("unsupported version {0} (expected {VERSION})")]
    UnsupportedVersion(u8),
    #[error("unsupported dtype code {0}")]
    UnsupportedDtype(u8),
    #[error("ndim must be in 1..={MAX_NDIM}, got {0}")]
    BadRank(usize),
    #[error("dims[{axis}] is zero")]
    ZeroDim { axis: usize },
    #[error("dims product overflows the {MAX_ELEMENTS}-element limit")]
    DimOverflow,
    #[error("truncated header: need {expected} bytes, have {found}")]
    TruncatedHeader { expected: usize, found: usize },
    #[error("truncated payload: need {expected} bytes, have {found}")]
    TruncatedPayload { expected: usize, found: usize },
    #[error("{extra} trailing bytes after payload")]
    TrailingBytes { extra: usize },
    #[error("value count {found} does not match dims product {expected}")]
    LengthMismatch { expected: usize, found: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dtype {
    F32,
    U8,
}

impl Dtype {
    pub fn code(self) -> u8 {
        match self {
            Dtype::F32 => 0,
            Dtype::U8 => 1,
        }
    }

    pub fn from_code(code: u8) -> Result<Self, CamtError> {
        match code {
            0 => Ok(Dtype::F32),
            1 => Ok(Dtype::U8),
            other => Err(CamtError::UnsupportedDtype(other)),
        }
    }

    pub fn size(self) -> usize {
        match self {
            Dtype::F32 => 4,
            Dtype::U8 => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CamtData {
    F32(Vec<f32>),
    U8(Vec<u8>),
}

impl CamtData {
    pub fn len(&self) -> usize {
        match self {
            CamtData::F32(v) => v.len(),
            CamtData::U8(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dtype(&self) -> Dtype {
        match self {
            CamtData::F32(_) => Dtype::F32,
            CamtData::U8(_) => Dtype::U8,
        }
    }
}

/// A validated tensor: dims are non-zero, rank is 1..=4 and the payload
/// length matches the dims product.
#[derive(Clone, Debug, PartialEq)]
pub struct CamtTensor {
    dims: Vec<usize>,
    data: CamtData,
}

fn checked_element_count(dims: &[usize]) -> Result<usize, CamtError> {
    if dims.is_empty() || dims.len() > MAX_NDIM {
        return Err(CamtError::BadRank(dims.len()));
    }
    let mut count: u64 = 1;
    for (axis, &d) in dims.iter().enumerate() {
        if d == 0 {
            return Err(CamtError::ZeroDim { axis });
        }
        if d as u64 > u32::MAX as u64 {
            return Err(CamtError::DimOverflow);
        }
        count = count.checked_mul(d as u64).ok_or(CamtError::DimOverflow)?;
        if count > MAX_ELEMENTS {
            return Err(CamtError::DimOverflow);
        }
    }
    Ok(count as usize)
}

impl CamtTensor {
    pub fn new(dims: Vec<usize>, data: CamtData) -> Result<Self, CamtError> {
        let expected = checked_element_count(&dims)?;
        if data.len() != expected {
            return Err(CamtError::LengthMismatch {
                expected,
                found: data.len(),
            });
        }
        Ok(Self { dims, data })
    }

    pub fn from_f32(dims: Vec<usize>, values: Vec<f32>) -> Result<Self, CamtError> {
        Self::new(dims, CamtData::F32(values))
    }

    pub fn from_u8(dims: Vec<usize>, values: Vec<u8>) -> Result<Self, CamtError> {
        Self::new(dims, CamtData::U8(values))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &CamtData {
        &self.data
    }

    pub fn dtype(&self) -> Dtype {
        self.data.dtype()
    }

    pub fn as_f32(&self) -> Option<&[f32]> {
        match &self.data {
            CamtData::F32(v) => Some(v),
            CamtData::U8(_) => None,
        }
    }

    pub fn as_u8(&self) -> Option<&[u8]> {
        match &self.data {
            CamtData::U8(v) => Some(v),
            CamtData::F32(_) => None,
        }
    }

    /// Size in bytes of the encoded file.
    pub fn encoded_len(&self) -> usize {
        FIXED_HEADER_LEN + 4 * self.dims.len() + self.data.len() * self.dtype().size()
    }
}

pub fn read_camt(bytes: &[u8]) -> Result<CamtTensor, CamtError> {
    if bytes.len() < FIXED_HEADER_LEN {
        return Err(CamtError::TruncatedHeader {
            expected: FIXED_HEADER_LEN,
            found: bytes.len(),
        });
    }
    let magic: [u8; 4] = bytes[..4].try_into().unwrap();
    if magic != MAGIC {
        return Err(CamtError::BadMagic { found: magic });
    }
    if bytes[4] != VERSION {
        return Err(CamtError::UnsupportedVersion(bytes[4]));
    }
    let dtype = Dtype::from_code(bytes[5])?;
    let ndim = bytes[6] as usize;
    if ndim == 0 || ndim > MAX_NDIM {
        return Err(CamtError::BadRank(ndim));
    }

    let header_len = FIXED_HEADER_LEN + 4 * ndim;
    if bytes.len() < header_len {
        return Err(CamtError::TruncatedHeader {
            expected: header_len,
            found: bytes.len(),
        });
    }
    let dims: Vec<usize> = bytes[FIXED_HEADER_LEN..header_len]
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()) as usize)
        .collect();
    let count = checked_element_count(&dims)?;

    let payload = &bytes[header_len..];
    let expected = count * dtype.size();
    if payload.len() < expected {
        return Err(CamtError::TruncatedPayload {
            expected,
            found: payload.len(),
        });
    }
    if payload.len() > expected {
        return Err(CamtError::TrailingBytes {
            extra: payload.len() - expected,
        });
    }

    let data = match dtype {
        Dtype::F32 => CamtData::F32(
            payload
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
                .collect(),
        ),
        Dtype::U8 => CamtData::U8(payload.to_vec()),
    };
    Ok(CamtTensor { dims, data })
}

pub fn write_camt(tensor: &CamtTensor) -> Vec<u8> {
    let mut out = Vec::with_capacity(tensor.encoded_len());
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.push(tensor.dtype().code());
    out.push(tensor.dims.len() as u8);
    for &d in &tensor.dims {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    match &tensor.data {
        CamtData::F32(values) => {
            for v in values {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        CamtData::U8(values) => out.extend_from_slice(values),
    }
    out
}
