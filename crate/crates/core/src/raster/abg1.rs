//! `ABG1` tensor interchange files.
//!
//! Layout: the ASCII magic `ABG1`, then little-endian `u32` layer count,
//! height and width, then `layers * height * width` little-endian `f32`
//! values, layer-major, each layer row-major from the bottom row up.

use std::io::{Read, Write};

use super::LayerTensor;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"ABG1";
const HEADER_LEN: usize = 16;

pub fn to_bytes(tensor: &LayerTensor) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + tensor.data().len() * 4);
    out.extend_from_slice(MAGIC);
    for dim in [tensor.layers(), tensor.height(), tensor.width()] {
        out.extend_from_slice(&(dim as u32).to_le_bytes());
    }
    for v in tensor.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn from_bytes(bytes: &[u8]) -> Result<LayerTensor> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format(format!(
            "file is {} bytes, shorter than the {HEADER_LEN}-byte header",
            bytes.len()
        )));
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::Format("bad magic, expected ABG1".into()));
    }
    let dim =
        |i: usize| u32::from_le_bytes(bytes[4 + 4 * i..8 + 4 * i].try_into().unwrap()) as usize;
    let (layers, height, width) = (dim(0), dim(1), dim(2));
    let count = layers
        .checked_mul(height)
        .and_then(|n| n.checked_mul(width))
        .ok_or_else(|| Error::Format("dimensions overflow".into()))?;
    let payload = &bytes[HEADER_LEN..];
    if payload.len() != count * 4 {
        return Err(Error::Format(format!(
            "{layers}x{height}x{width} needs {} payload bytes, found {}",
            count * 4,
            payload.len()
        )));
    }
    let data = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    LayerTensor::from_vec(layers, height, width, data)
}

pub fn write<W: Write>(tensor: &LayerTensor, mut w: W) -> Result<()> {
    w.write_all(&to_bytes(tensor))?;
    Ok(())
}

pub fn read<R: Read>(mut r: R) -> Result<LayerTensor> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    from_bytes(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let t = LayerTensor::from_vec(1, 1, 2, vec![1.0, -2.5]).unwrap();
        let b = to_bytes(&t);
        assert_eq!(&b[..4], b"ABG1");
        assert_eq!(&b[4..16], &[1, 0, 0, 0, 1, 0, 0, 0, 2, 0, 0, 0]);
        assert_eq!(&b[16..20], &1.0f32.to_le_bytes());
        assert_eq!(&b[20..], &(-2.5f32).to_le_bytes());
    }

    #[test]
    fn rejects_truncated_and_bad_magic() {
        let t = LayerTensor::zeros(5, 2, 2);
        let mut b = to_bytes(&t);
        assert!(from_bytes(&b[..b.len() - 1]).is_err());
        assert!(from_bytes(&b[..10]).is_err());
        b[0] = b'X';
        assert!(from_bytes(&b).is_err());
    }

    #[test]
    fn nan_payload_survives_bit_exact() {
        let nan = f32::from_bits(0x7fc0_1234);
        let t = LayerTensor::from_vec(1, 1, 1, vec![nan]).unwrap();
        let back = from_bytes(&to_bytes(&t)).unwrap();
        assert_eq!(back.data()[0].to_bits(), 0x7fc0_1234);
    }
}
