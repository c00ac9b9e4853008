//! The `.nsrl` field container: a little-endian binary layout holding one
//! space-time stack with a CRC-32 integrity check.
//!
//! Layout (all multi-byte values little-endian):
//!
//! ```text
//! offset  size  field
//! 0       4     magic "NSRL"
//! 4       2     format version (u16) = 1
//! 6       2     field count (u16)
//! 8       16    nx, ny, nz, nt (u32 each)
//! 24      24    domain_length, dt, t0 (f64 each)
//! 48      4     CRC-32 (IEEE) of the payload (u32)
//! 52      4     flags (bit 0: non-solution, bit 1: derived vorticity,
//!               bit 2: viscosity present)
//! 56      8     viscosity (f64; zero when absent)
//! 64      28*k  directory: name (8 bytes, NUL padded), components (u32),
//!               payload offset (u64), byte length (u64)
//! ...           payload
//! ```
//!
//! Samples are IEEE-754 binary64 ordered slowest to fastest as
//! `(field, t, z, y, x, component)`.

use std::io::{Read, Write};
use std::path::Path;

use nsrlab::fieldlab::{make_grid, FieldStack, ScalarField, VectorField};

use crate::error::CliError;

pub const MAGIC: [u8; 4] = *b"NSRL";
pub const FORMAT_VERSION: u16 = 1;

const FLAG_NON_SOLUTION: u32 = 1;
const FLAG_DERIVED_VORTICITY: u32 = 2;
const FLAG_HAS_VISCOSITY: u32 = 4;

const HEADER_LEN: usize = 64;
const DIR_ENTRY_LEN: usize = 28;

// CRC-32 (IEEE reflected, polynomial 0xEDB88320), table-driven.
const fn crc_table() -> [u32; 256] {
    let mut table = [0u32; 256];
    let mut i = 0;
    while i < 256 {
        let mut c = i as u32;
        let mut k = 0;
        while k < 8 {
            c = if c & 1 != 0 { 0xEDB8_8320 ^ (c >> 1) } else { c >> 1 };
            k += 1;
        }
        table[i] = c;
        i += 1;
    }
    table
}

static CRC_TABLE: [u32; 256] = crc_table();

pub fn crc32(bytes: &[u8]) -> u32 {
    let mut c = 0xFFFF_FFFFu32;
    for &b in bytes {
        c = (c >> 8) ^ CRC_TABLE[((c ^ b as u32) & 0xFF) as usize];
    }
    !c
}

struct FieldBlock<'a> {
    name: &'a str,
    components: u32,
    samples: &'a [f64],
}

fn push_le_f64(out: &mut Vec<u8>, values: &[f64]) {
    out.reserve(values.len() * 8);
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

/// Serialize a stack to the container byte layout.
pub fn to_bytes(stack: &FieldStack) -> Vec<u8> {
    let mut blocks: Vec<FieldBlock<'_>> = Vec::new();
    blocks.push(FieldBlock {
        name: "u",
        components: 3,
        samples: stack.u.data.as_slice().expect("contiguous"),
    });
    if let Some(p) = &stack.p {
        blocks.push(FieldBlock {
            name: "p",
            components: 1,
            samples: p.data.as_slice().expect("contiguous"),
        });
    }
    if let Some(w) = &stack.w {
        blocks.push(FieldBlock {
            name: "w",
            components: 3,
            samples: w.data.as_slice().expect("contiguous"),
        });
    }
    if let Some(f) = &stack.f {
        blocks.push(FieldBlock {
            name: "f",
            components: 3,
            samples: f.data.as_slice().expect("contiguous"),
        });
    }

    let mut payload = Vec::new();
    let mut directory = Vec::with_capacity(blocks.len());
    for b in &blocks {
        let offset = payload.len() as u64;
        push_le_f64(&mut payload, b.samples);
        directory.push((b.name, b.components, offset, (b.samples.len() * 8) as u64));
    }

    let g = &stack.grid;
    let mut out = Vec::with_capacity(HEADER_LEN + directory.len() * DIR_ENTRY_LEN + payload.len());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(blocks.len() as u16).to_le_bytes());
    for dim in [g.nx, g.ny, g.nz, g.nt] {
        out.extend_from_slice(&(dim as u32).to_le_bytes());
    }
    for v in [g.domain_length, g.dt, g.t0] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(&crc32(&payload).to_le_bytes());
    let mut flags = 0u32;
    if stack.non_solution {
        flags |= FLAG_NON_SOLUTION;
    }
    if stack.w_is_derived {
        flags |= FLAG_DERIVED_VORTICITY;
    }
    if stack.viscosity.is_some() {
        flags |= FLAG_HAS_VISCOSITY;
    }
    out.extend_from_slice(&flags.to_le_bytes());
    out.extend_from_slice(&stack.viscosity.unwrap_or(0.0).to_le_bytes());
    for (name, comps, offset, len) in &directory {
        let mut name_bytes = [0u8; 8];
        name_bytes[..name.len()].copy_from_slice(name.as_bytes());
        out.extend_from_slice(&name_bytes);
        out.extend_from_slice(&comps.to_le_bytes());
        out.extend_from_slice(&offset.to_le_bytes());
        out.extend_from_slice(&len.to_le_bytes());
    }
    out.extend_from_slice(&payload);
    out
}

fn read_u16(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes(b[at..at + 2].try_into().unwrap())
}
fn read_u32(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(b[at..at + 4].try_into().unwrap())
}
fn read_u64(b: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(b[at..at + 8].try_into().unwrap())
}
fn read_f64(b: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(b[at..at + 8].try_into().unwrap())
}

/// Deserialize and verify a container.
pub fn from_bytes(bytes: &[u8]) -> Result<FieldStack, CliError> {
    if bytes.len() < HEADER_LEN {
        return Err(CliError::Format("container shorter than its header".into()));
    }
    if bytes[..4] != MAGIC {
        return Err(CliError::Format("bad magic, not an NSRL container".into()));
    }
    let version = read_u16(bytes, 4);
    if version != FORMAT_VERSION {
        return Err(CliError::Format(format!("unsupported format version {version}")));
    }
    let field_count = read_u16(bytes, 6) as usize;
    let nx = read_u32(bytes, 8) as usize;
    let ny = read_u32(bytes, 12) as usize;
    let nz = read_u32(bytes, 16) as usize;
    let nt = read_u32(bytes, 20) as usize;
    let domain_length = read_f64(bytes, 24);
    let dt = read_f64(bytes, 32);
    let t0 = read_f64(bytes, 40);
    let stored_crc = read_u32(bytes, 48);
    let flags = read_u32(bytes, 52);
    let viscosity = read_f64(bytes, 56);
    if ny != nx || nz != nx {
        return Err(CliError::Format(format!(
            "non-cubic grid {nx}x{ny}x{nz} not supported"
        )));
    }
    let grid = make_grid(nx, nt, domain_length, dt, t0).map_err(CliError::Lib)?;

    let dir_end = HEADER_LEN + field_count * DIR_ENTRY_LEN;
    if bytes.len() < dir_end {
        return Err(CliError::Format("directory truncated".into()));
    }
    let payload = &bytes[dir_end..];
    if crc32(payload) != stored_crc {
        return Err(CliError::Format("payload CRC-32 mismatch".into()));
    }

    let spatial = nx * ny * nz;
    let mut u = None;
    let mut p = None;
    let mut w = None;
    let mut f = None;
    let mut cursor_guard: Vec<(u64, u64)> = Vec::new();
    for k in 0..field_count {
        let at = HEADER_LEN + k * DIR_ENTRY_LEN;
        let name_raw = &bytes[at..at + 8];
        let name: String = name_raw
            .iter()
            .take_while(|&&b| b != 0)
            .map(|&b| b as char)
            .collect();
        let comps = read_u32(bytes, at + 8) as usize;
        let offset = read_u64(bytes, at + 12);
        let length = read_u64(bytes, at + 20);
        if offset + length > payload.len() as u64 {
            return Err(CliError::Format(format!("field {name} exceeds the payload")));
        }
        for &(o, l) in &cursor_guard {
            let overlap = offset < o + l && o < offset + length;
            if overlap && length > 0 {
                return Err(CliError::Format(format!("field {name} overlaps the directory")));
            }
        }
        cursor_guard.push((offset, length));
        let expect = (nt * spatial * comps * 8) as u64;
        if length != expect {
            return Err(CliError::Format(format!(
                "field {name} has {length} bytes, expected {expect}"
            )));
        }
        let raw = &payload[offset as usize..(offset + length) as usize];
        let values: Vec<f64> = raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        match (name.as_str(), comps) {
            ("u", 3) | ("w", 3) | ("f", 3) => {
                let mut field = VectorField::zeros(grid);
                field
                    .data
                    .as_slice_mut()
                    .expect("contiguous")
                    .copy_from_slice(&values);
                match name.as_str() {
                    "u" => u = Some(field),
                    "w" => w = Some(field),
                    _ => f = Some(field),
                }
            }
            ("p", 1) => {
                let mut field = ScalarField::zeros(grid);
                field
                    .data
                    .as_slice_mut()
                    .expect("contiguous")
                    .copy_from_slice(&values);
                p = Some(field);
            }
            _ => {
                return Err(CliError::Format(format!(
                    "unknown field {name} with {comps} components"
                )))
            }
        }
    }
    let u = u.ok_or_else(|| CliError::Format("container has no velocity field".into()))?;
    let mut stack = FieldStack::new(grid, u).map_err(CliError::Lib)?;
    stack.p = p;
    stack.w = w;
    stack.f = f;
    stack.non_solution = flags & FLAG_NON_SOLUTION != 0;
    stack.w_is_derived = flags & FLAG_DERIVED_VORTICITY != 0;
    stack.viscosity = (flags & FLAG_HAS_VISCOSITY != 0).then_some(viscosity);
    stack.validate().map_err(CliError::Lib)?;
    Ok(stack)
}

/// Write a container file; returns the payload checksum.
pub fn write_container(path: &Path, stack: &FieldStack) -> Result<u32, CliError> {
    let bytes = to_bytes(stack);
    let crc = read_u32(&bytes, 48);
    let mut file = std::fs::File::create(path)?;
    file.write_all(&bytes)?;
    Ok(crc)
}

/// Read and verify a container file.
pub fn read_container(path: &Path) -> Result<FieldStack, CliError> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    from_bytes(&bytes)
}

/// Checksum stored in a container file without loading the fields.
pub fn stored_crc(path: &Path) -> Result<u32, CliError> {
    let mut bytes = vec![0u8; 52];
    std::fs::File::open(path)?.read_exact(&mut bytes)?;
    if bytes[..4] != MAGIC {
        return Err(CliError::Format("bad magic, not an NSRL container".into()));
    }
    Ok(read_u32(&bytes, 48))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nsrlab::fieldlab::make_grid;

    #[test]
    fn crc_matches_the_reference_vector() {
        assert_eq!(crc32(b"123456789"), 0xCBF4_3926);
        assert_eq!(crc32(b""), 0);
    }

    #[test]
    fn roundtrip_is_byte_identical() {
        let g = make_grid(8, 3, 1.0, 0.1, -0.2).unwrap();
        let u = VectorField::from_fn(g, |x, y, z, t| [x + t, y - z, z * 0.5]);
        let mut stack = FieldStack::new(g, u).unwrap();
        stack.p = Some(ScalarField::from_fn(g, |x, _, _, _| x * x));
        stack.viscosity = Some(0.07);
        stack.w_is_derived = true;
        let bytes = to_bytes(&stack);
        let back = from_bytes(&bytes).unwrap();
        let again = to_bytes(&back);
        assert_eq!(bytes, again);
        assert_eq!(back.viscosity, Some(0.07));
        assert!(back.w_is_derived);
    }

    #[test]
    fn corrupted_payload_is_rejected() {
        let g = make_grid(8, 2, 1.0, 0.1, 0.0).unwrap();
        let stack = FieldStack::new(g, VectorField::zeros(g)).unwrap();
        let mut bytes = to_bytes(&stack);
        let last = bytes.len() - 1;
        bytes[last] ^= 0x40;
        assert!(matches!(from_bytes(&bytes), Err(CliError::Format(_))));
    }
}
