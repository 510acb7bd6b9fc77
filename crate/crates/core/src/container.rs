//! Self-describing tensor container used for checkpoints, datasets and
//! sample dumps.
//!
//! Layout: magic `FGTC`, u32 format version, u32 tensor count, then per
//! tensor a header (u32 name length, utf-8 name, u8 dtype, u32 rank,
//! u32 dims...), then all payloads in header order as row-major
//! little-endian f64. Round-trips are bit-exact.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{FgoError, Result};

const MAGIC: &[u8; 4] = b"FGTC";
const VERSION: u32 = 1;
const DTYPE_F64: u8 = 0;

/// A named tensor: shape plus row-major f64 data.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        let expect: usize = shape.iter().product();
        if expect != data.len() {
            return Err(FgoError::Shape(format!(
                "tensor data length {} does not match shape {:?}",
                data.len(),
                shape
            )));
        }
        Ok(Self { shape, data })
    }

    pub fn scalar(value: f64) -> Self {
        Self { shape: vec![1], data: vec![value] }
    }
}

/// An ordered collection of named tensors.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Container {
    tensors: BTreeMap<String, Tensor>,
}

impl Container {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: &str, tensor: Tensor) {
        self.tensors.insert(name.to_string(), tensor);
    }

    pub fn get(&self, name: &str) -> Result<&Tensor> {
        self.tensors
            .get(name)
            .ok_or_else(|| FgoError::Container(format!("missing tensor: {name}")))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.tensors.keys().map(|s| s.as_str())
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(self.tensors.len() as u32).to_le_bytes())?;
        for (name, tensor) in &self.tensors {
            w.write_all(&(name.len() as u32).to_le_bytes())?;
            w.write_all(name.as_bytes())?;
            w.write_all(&[DTYPE_F64])?;
            w.write_all(&(tensor.shape.len() as u32).to_le_bytes())?;
            for dim in &tensor.shape {
                w.write_all(&(*dim as u32).to_le_bytes())?;
            }
        }
        for tensor in self.tensors.values() {
            for v in &tensor.data {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(FgoError::Container("bad magic".into()));
        }
        let version = read_u32(&mut r)?;
        if version != VERSION {
            return Err(FgoError::Container(format!(
                "unsupported container version {version} (expected {VERSION})"
            )));
        }
        let count = read_u32(&mut r)? as usize;
        let mut headers = Vec::with_capacity(count);
        for _ in 0..count {
            let name_len = read_u32(&mut r)? as usize;
            let mut name_bytes = vec![0u8; name_len];
            r.read_exact(&mut name_bytes)?;
            let name = String::from_utf8(name_bytes)
                .map_err(|e| FgoError::Container(format!("bad tensor name: {e}")))?;
            let mut dtype = [0u8; 1];
            r.read_exact(&mut dtype)?;
            if dtype[0] != DTYPE_F64 {
                return Err(FgoError::Container(format!("unknown dtype {}", dtype[0])));
            }
            let rank = read_u32(&mut r)? as usize;
            let mut shape = Vec::with_capacity(rank);
            for _ in 0..rank {
                shape.push(read_u32(&mut r)? as usize);
            }
            headers.push((name, shape));
        }
        let mut tensors = BTreeMap::new();
        for (name, shape) in headers {
            let len: usize = shape.iter().product();
            let mut data = Vec::with_capacity(len);
            let mut buf = [0u8; 8];
            for _ in 0..len {
                r.read_exact(&mut buf)?;
                data.push(f64::from_le_bytes(buf));
            }
            tensors.insert(name, Tensor { shape, data });
        }
        Ok(Self { tensors })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_to(std::io::BufWriter::new(file))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(file))
    }
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;
    use rand::Rng;

    #[test]
    fn round_trip_is_bit_exact() {
        let mut rng = seeded_rng(31);
        let mut c = Container::new();
        c.insert(
            "weights",
            Tensor::new(vec![3, 4], (0..12).map(|_| rng.random::<f64>() * 1e3 - 500.0).collect())
                .unwrap(),
        );
        c.insert("bias", Tensor::new(vec![4], vec![1.5e-300, -0.0, 7.25, f64::MIN]).unwrap());
        c.insert("step", Tensor::scalar(42.0));

        let mut buf = Vec::new();
        c.write_to(&mut buf).unwrap();
        let back = Container::read_from(buf.as_slice()).unwrap();
        assert_eq!(c, back);
        for (a, b) in c.get("bias").unwrap().data.iter().zip(&back.get("bias").unwrap().data) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn rejects_bad_magic_and_truncation() {
        let mut c = Container::new();
        c.insert("x", Tensor::scalar(1.0));
        let mut buf = Vec::new();
        c.write_to(&mut buf).unwrap();

        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(Container::read_from(bad.as_slice()).is_err());

        let truncated = &buf[..buf.len() - 4];
        assert!(Container::read_from(truncated).is_err());
    }

    #[test]
    fn shape_mismatch_rejected() {
        assert!(Tensor::new(vec![2, 2], vec![0.0; 3]).is_err());
    }

    #[test]
    fn missing_tensor_is_an_error() {
        let c = Container::new();
        assert!(c.get("nope").is_err());
    }
}
