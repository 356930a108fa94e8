//! Compact binary format for sum-sets.
//!
//! The lowest value is stored as a 32-bit base; every following value is a
//! delta from its predecessor, written as base-1024 digits, least significant
//! first. Each digit occupies an 11-bit unit: one continuation bit (set when
//! more digits follow) and the 10-bit digit. Units are packed MSB-first and
//! the stream is zero-padded to a byte boundary, so a set whose gaps are all
//! below 1024 costs exactly 11 bits per value after the first.
//!
//! Layout (multi-byte header fields little-endian):
//!
//! | bytes  | field                          |
//! |--------|--------------------------------|
//! | 0..4   | magic `NSUM`                   |
//! | 4      | version (1)                    |
//! | 5      | arity `n`                      |
//! | 6      | flags, bit 0 = dedup           |
//! | 7      | reserved, 0                    |
//! | 8..16  | value count, u64               |
//! | 16..20 | base (lowest value), u32       |
//! | 20..   | delta units                    |
//!
//! A count of zero ends the blob after byte 16.

use std::io;
use std::path::Path;

use thiserror::Error;

use crate::encryptor::SumSet;

pub const MAGIC: [u8; 4] = *b"NSUM";
pub const VERSION: u8 = 1;
pub const FLAG_DEDUP: u8 = 0x01;
pub const UNIT_BITS: u32 = 11;
const DIGIT_BITS: u32 = 10;
const DIGIT_MASK: u32 = (1 << DIGIT_BITS) - 1;
const CONTINUE: u32 = 1 << DIGIT_BITS;
/// A 32-bit delta never needs more than four base-1024 digits.
const MAX_UNITS: u32 = 4;
const FIXED_HEADER: usize = 16;
const BASE_LEN: usize = 4;

#[derive(Debug, Error)]
pub enum CodecError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("bad magic")]
    BadMagic,
    #[error("unsupported version {0}")]
    UnsupportedVersion(u8),
    #[error("unknown flag bits {0:#04x}")]
    UnknownFlags(u8),
    #[error("reserved byte is {0}, expected 0")]
    ReservedNonZero(u8),
    #[error("arity must be in 1..=255, got {0}")]
    BadArity(usize),
    #[error("header truncated: {len} bytes")]
    TruncatedHeader { len: usize },
    #[error("payload truncated at bit {bit_offset}")]
    Truncated { bit_offset: u64 },
    #[error("non-zero padding at bit {bit_offset}")]
    NonZeroPadding { bit_offset: u64 },
    #[error("non-minimal digit encoding at bit {bit_offset}")]
    NonMinimal { bit_offset: u64 },
    #[error("value overflows 32 bits at bit {bit_offset}")]
    Overflow { bit_offset: u64 },
    #[error("repeated value in a deduplicated blob at bit {bit_offset}")]
    DedupViolation { bit_offset: u64 },
    #[error("{extra} trailing bytes after payload at byte {byte_offset}")]
    TrailingBytes { byte_offset: usize, extra: usize },
    #[error("values are not sorted at index {0}")]
    NotSorted(usize),
    #[error("value {value} at index {index} does not fit in 32 bits")]
    ValueTooLarge { index: usize, value: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct BlobHeader {
    pub version: u8,
    pub n: u8,
    pub dedup: bool,
    pub count: u64,
    /// Lowest value; absent when `count == 0`.
    pub base: Option<u32>,
}

impl BlobHeader {
    pub fn len_bytes(&self) -> usize {
        FIXED_HEADER + if self.count > 0 { BASE_LEN } else { 0 }
    }
}

/// A serialized sum-set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedBlob {
    header: BlobHeader,
    payload: Vec<u8>,
    payload_bits: u64,
}

impl EncodedBlob {
    pub fn header(&self) -> &BlobHeader {
        &self.header
    }

    /// Packed delta units including the final padding.
    pub fn payload(&self) -> &[u8] {
        &self.payload
    }

    /// Bits used by delta units, excluding padding.
    pub fn payload_bits(&self) -> u64 {
        self.payload_bits
    }

    /// Header plus unit bits, excluding padding.
    pub fn total_bits(&self) -> u64 {
        self.header.len_bytes() as u64 * 8 + self.payload_bits
    }

    pub fn len_bytes(&self) -> usize {
        self.header.len_bytes() + self.payload.len()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let h = &self.header;
        let mut out = Vec::with_capacity(self.len_bytes());
        out.extend_from_slice(&MAGIC);
        out.push(h.version);
        out.push(h.n);
        out.push(if h.dedup { FLAG_DEDUP } else { 0 });
        out.push(0);
        out.extend_from_slice(&h.count.to_le_bytes());
        if let Some(base) = h.base {
            out.extend_from_slice(&base.to_le_bytes());
        }
        out.extend_from_slice(&self.payload);
        out
    }

    /// Parses and fully validates a serialized blob.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CodecError> {
        let header = parse_header(bytes)?;
        let payload = bytes[header.len_bytes()..].to_vec();
        let (_, payload_bits) = scan(&header, &payload)?;
        Ok(Self {
            header,
            payload,
            payload_bits,
        })
    }
}

fn parse_header(bytes: &[u8]) -> Result<BlobHeader, CodecError> {
    if bytes.len() < 4 || bytes[..4] != MAGIC {
        return Err(CodecError::BadMagic);
    }
    if bytes.len() < FIXED_HEADER {
        return Err(CodecError::TruncatedHeader { len: bytes.len() });
    }
    if bytes[4] != VERSION {
        return Err(CodecError::UnsupportedVersion(bytes[4]));
    }
    if bytes[5] == 0 {
        return Err(CodecError::BadArity(0));
    }
    if bytes[6] & !FLAG_DEDUP != 0 {
        return Err(CodecError::UnknownFlags(bytes[6]));
    }
    if bytes[7] != 0 {
        return Err(CodecError::ReservedNonZero(bytes[7]));
    }
    let count = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes"));
    let base = if count > 0 {
        let raw = bytes
            .get(FIXED_HEADER..FIXED_HEADER + BASE_LEN)
            .ok_or(CodecError::TruncatedHeader { len: bytes.len() })?;
        Some(u32::from_le_bytes(raw.try_into().expect("4 bytes")))
    } else {
        None
    };
    Ok(BlobHeader {
        version: bytes[4],
        n: bytes[5],
        dedup: bytes[6] & FLAG_DEDUP != 0,
        count,
        base,
    })
}

struct BitWriter {
    bytes: Vec<u8>,
    acc: u64,
    pending: u32,
    written: u64,
}

impl BitWriter {
    fn new() -> Self {
        Self {
            bytes: Vec::new(),
            acc: 0,
            pending: 0,
            written: 0,
        }
    }

    fn push(&mut self, value: u32, width: u32) {
        self.acc = (self.acc << width) | u64::from(value);
        self.pending += width;
        self.written += u64::from(width);
        while self.pending >= 8 {
            self.pending -= 8;
            self.bytes.push((self.acc >> self.pending) as u8);
        }
        self.acc &= (1u64 << self.pending) - 1;
    }

    fn finish(mut self) -> (Vec<u8>, u64) {
        if self.pending > 0 {
            self.bytes.push((self.acc << (8 - self.pending)) as u8);
        }
        (self.bytes, self.written)
    }
}

struct BitReader<'a> {
    data: &'a [u8],
    pos: u64,
}

impl<'a> BitReader<'a> {
    fn read(&mut self, width: u32) -> Option<u32> {
        if self.pos + u64::from(width) > self.data.len() as u64 * 8 {
            return None;
        }
        let mut value = 0u32;
        for _ in 0..width {
            let byte = self.data[(self.pos / 8) as usize];
            let bit = (byte >> (7 - (self.pos % 8))) & 1;
            value = (value << 1) | u32::from(bit);
            self.pos += 1;
        }
        Some(value)
    }
}

pub fn encode(sumset: &SumSet) -> Result<EncodedBlob, CodecError> {
    let n = u8::try_from(sumset.n())
        .ok()
        .filter(|&n| n > 0)
        .ok_or(CodecError::BadArity(sumset.n()))?;
    let values = sumset.values();
    let mut writer = BitWriter::new();
    let mut base = None;
    let mut prev = 0u32;
    for (index, &value) in values.iter().enumerate() {
        let v = u32::try_from(value).map_err(|_| CodecError::ValueTooLarge { index, value })?;
        if index == 0 {
            base = Some(v);
        } else {
            if v < prev {
                return Err(CodecError::NotSorted(index));
            }
            let mut delta = v - prev;
            loop {
                let digit = delta & DIGIT_MASK;
                delta >>= DIGIT_BITS;
                let flag = if delta != 0 { CONTINUE } else { 0 };
                writer.push(flag | digit, UNIT_BITS);
                if delta == 0 {
                    break;
                }
            }
        }
        prev = v;
    }
    let (payload, payload_bits) = writer.finish();
    Ok(EncodedBlob {
        header: BlobHeader {
            version: VERSION,
            n,
            dedup: sumset.dedup(),
            count: values.len() as u64,
            base,
        },
        payload,
        payload_bits,
    })
}

pub fn decode(blob: &EncodedBlob) -> Result<SumSet, CodecError> {
    let (values, _) = scan(&blob.header, &blob.payload)?;
    Ok(
        SumSet::new(usize::from(blob.header.n), values, blob.header.dedup)
            .expect("scan yields sorted values honoring the dedup flag"),
    )
}

/// Walks the delta stream, returning the values and the unit bits consumed.
fn scan(header: &BlobHeader, payload: &[u8]) -> Result<(Vec<u64>, u64), CodecError> {
    let offset = header.len_bytes() as u64 * 8;
    let Some(base) = header.base else {
        if !payload.is_empty() {
            return Err(CodecError::TrailingBytes {
                byte_offset: header.len_bytes(),
                extra: payload.len(),
            });
        }
        return Ok((Vec::new(), 0));
    };
    // Every delta takes at least one unit, which bounds a hostile count.
    let max_deltas = payload.len() as u64 * 8 / u64::from(UNIT_BITS);
    let deltas = header.count - 1;
    let mut values = Vec::with_capacity(deltas.min(max_deltas) as usize + 1);
    values.push(u64::from(base));
    let mut reader = BitReader {
        data: payload,
        pos: 0,
    };
    let mut current = u64::from(base);
    for _ in 0..deltas {
        let start = offset + reader.pos;
        let mut delta = 0u64;
        let mut units = 0;
        loop {
            let unit_at = offset + reader.pos;
            let unit = reader.read(UNIT_BITS).ok_or(CodecError::Truncated {
                bit_offset: unit_at,
            })?;
            let digit = unit & DIGIT_MASK;
            delta |= u64::from(digit) << (DIGIT_BITS * units);
            units += 1;
            if unit & CONTINUE == 0 {
                if digit == 0 && units > 1 {
                    return Err(CodecError::NonMinimal {
                        bit_offset: unit_at,
                    });
                }
                break;
            }
            if units == MAX_UNITS {
                return Err(CodecError::Overflow {
                    bit_offset: unit_at,
                });
            }
        }
        if header.dedup && delta == 0 {
            return Err(CodecError::DedupViolation { bit_offset: start });
        }
        current += delta;
        if current > u64::from(u32::MAX) {
            return Err(CodecError::Overflow { bit_offset: start });
        }
        values.push(current);
    }
    let used = reader.pos;
    let used_bytes = used.div_ceil(8) as usize;
    if !used.is_multiple_of(8) {
        let tail_bits = 8 - (used % 8) as u32;
        let tail = payload[used_bytes - 1] & ((1u8 << tail_bits) - 1);
        if tail != 0 {
            return Err(CodecError::NonZeroPadding {
                bit_offset: offset + used,
            });
        }
    }
    if payload.len() > used_bytes {
        return Err(CodecError::TrailingBytes {
            byte_offset: header.len_bytes() + used_bytes,
            extra: payload.len() - used_bytes,
        });
    }
    Ok((values, used))
}

pub fn encode_to_vec(sumset: &SumSet) -> Result<Vec<u8>, CodecError> {
    Ok(encode(sumset)?.to_bytes())
}

pub fn decode_slice(bytes: &[u8]) -> Result<SumSet, CodecError> {
    decode(&EncodedBlob::from_bytes(bytes)?)
}

pub fn write_blob(path: impl AsRef<Path>, sumset: &SumSet) -> Result<EncodedBlob, CodecError> {
    let blob = encode(sumset)?;
    std::fs::write(path, blob.to_bytes())?;
    Ok(blob)
}

pub fn read_blob(path: impl AsRef<Path>) -> Result<EncodedBlob, CodecError> {
    EncodedBlob::from_bytes(&std::fs::read(path)?)
}
