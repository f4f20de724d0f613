//! Bitstream file formats.
//!
//! Two on-disk encodings are supported:
//!
//! * ASCII: the characters `0` and `1`, with all ASCII whitespace ignored.
//! * Packed: the 8-byte magic `GKBITS01`, a little-endian `u64` bit count,
//!   then the bits packed into bytes most-significant-bit first.
//!
//! Readers detect the format from the magic; writers choose via
//! [`BitFormat`].

use std::io::{self, Read, Write};

/// Magic header of the packed format.
pub const PACKED_MAGIC: &[u8; 8] = b"GKBITS01";

/// On-disk bitstream encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitFormat {
    Ascii,
    Packed,
}

impl std::str::FromStr for BitFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ascii" => Ok(BitFormat::Ascii),
            "packed" => Ok(BitFormat::Packed),
            other => Err(format!(
                "unknown format '{other}' (expected ascii or packed)"
            )),
        }
    }
}

/// Reads an entire bitstream, auto-detecting the format from the magic.
pub fn read_bits<R: Read>(reader: &mut R) -> io::Result<Vec<bool>> {
    let mut raw = Vec::new();
    reader.read_to_end(&mut raw)?;
    if raw.len() >= PACKED_MAGIC.len() && raw[..PACKED_MAGIC.len()] == PACKED_MAGIC[..] {
        decode_packed(&raw)
    } else {
        decode_ascii(&raw)
    }
}

fn decode_ascii(raw: &[u8]) -> io::Result<Vec<bool>> {
    let mut bits = Vec::with_capacity(raw.len());
    for &b in raw {
        match b {
            b'0' => bits.push(false),
            b'1' => bits.push(true),
            b' ' | b'\t' | b'\n' | b'\r' | 0x0b | 0x0c => {}
            other => {
                return Err(io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("invalid byte 0x{other:02x} in ASCII bitstream"),
                ))
            }
        }
    }
    Ok(bits)
}

fn decode_packed(raw: &[u8]) -> io::Result<Vec<bool>> {
    let header = PACKED_MAGIC.len() + 8;
    if raw.len() < header {
        return Err(io::Error::new(
            io::ErrorKind::UnexpectedEof,
            "packed bitstream truncated before bit count",
        ));
    }
    let mut count_bytes = [0u8; 8];
    count_bytes.copy_from_slice(&raw[PACKED_MAGIC.len()..header]);
    let count = u64::from_le_bytes(count_bytes);
    let count_usize = usize::try_from(count).map_err(|_| {
        io::Error::new(
            io::ErrorKind::InvalidData,
            "bit count exceeds address space",
        )
    })?;
    let needed = count_usize.div_ceil(8);
    let body = &raw[header..];
    if body.len() < needed {
        return Err(io::Error::new(
            io::ErrorKind::UnexpectedEof,
            format!(
                "packed bitstream declares {count} bits but carries only {} payload bytes",
                body.len()
            ),
        ));
    }
    let mut bits = Vec::with_capacity(count_usize);
    for i in 0..count_usize {
        let byte = body[i / 8];
        bits.push((byte >> (7 - (i % 8))) & 1 == 1);
    }
    Ok(bits)
}

/// Writes a bitstream in the requested format. ASCII output ends with a
/// newline.
pub fn write_bits<W: Write>(writer: &mut W, bits: &[bool], format: BitFormat) -> io::Result<()> {
    match format {
        BitFormat::Ascii => {
            let mut line: Vec<u8> = bits.iter().map(|&b| if b { b'1' } else { b'0' }).collect();
            line.push(b'\n');
            writer.write_all(&line)
        }
        BitFormat::Packed => {
            writer.write_all(PACKED_MAGIC)?;
            writer.write_all(&(bits.len() as u64).to_le_bytes())?;
            let mut bytes = vec![0u8; bits.len().div_ceil(8)];
            for (i, &b) in bits.iter().enumerate() {
                if b {
                    bytes[i / 8] |= 1 << (7 - (i % 8));
                }
            }
            writer.write_all(&bytes)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ascii_roundtrip_ignores_whitespace() {
        let bits = decode_ascii(b" 01\n10\t1 ").unwrap();
        assert_eq!(bits, vec![false, true, true, false, true]);
        let mut out = Vec::new();
        write_bits(&mut out, &bits, BitFormat::Ascii).unwrap();
        assert_eq!(out, b"01101\n");
    }

    #[test]
    fn ascii_rejects_garbage() {
        assert!(decode_ascii(b"01x").is_err());
    }

    #[test]
    fn packed_roundtrip_all_lengths() {
        for len in 0..=17usize {
            let bits: Vec<bool> = (0..len).map(|i| i % 3 == 0).collect();
            let mut buf = Vec::new();
            write_bits(&mut buf, &bits, BitFormat::Packed).unwrap();
            assert_eq!(&buf[..8], PACKED_MAGIC);
            let back = read_bits(&mut buf.as_slice()).unwrap();
            assert_eq!(back, bits);
        }
    }

    #[test]
    fn packed_truncation_detected() {
        let bits = vec![true; 64];
        let mut buf = Vec::new();
        write_bits(&mut buf, &bits, BitFormat::Packed).unwrap();
        buf.truncate(buf.len() - 1);
        assert!(read_bits(&mut buf.as_slice()).is_err());
    }

    #[test]
    fn autodetect_prefers_magic() {
        // A file starting with the magic is packed even though the payload
        // bytes are not ASCII digits.
        let mut buf = Vec::new();
        write_bits(&mut buf, &[true, false, true], BitFormat::Packed).unwrap();
        assert_eq!(
            read_bits(&mut buf.as_slice()).unwrap(),
            vec![true, false, true]
        );
    }
}
