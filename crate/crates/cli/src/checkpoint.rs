//! Versioned binary weight checkpoints. Layout:
//!
//! ```text
//! magic  b"ORBW"
//! u16    format version (little-endian, currently 1)
//! u32    trunk layer count
//! u32    value-stream layer count
//! u32    advantage-stream layer count
//! layers in that order, each:
//!     u32 rows, u32 cols,
//!     rows*cols f64 weights (row-major), cols f64 biases
//! ```
//!
//! All scalars are little-endian; f64 values are stored as raw bits, so a
//! save/load round trip is bit-exact.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use orbitee_core::ndarray::{Array1, Array2};
use orbitee_core::nn::{DuelingNet, Linear};

const MAGIC: &[u8; 4] = b"ORBW";
const VERSION: u16 = 1;

pub fn save(path: &Path, net: &DuelingNet) -> Result<()> {
    let file = File::create(path)
        .with_context(|| format!("cannot create checkpoint {}", path.display()))?;
    let mut w = BufWriter::new(file);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    for count in [net.trunk.len(), net.value.len(), net.advantage.len()] {
        w.write_all(&u32::try_from(count)?.to_le_bytes())?;
    }
    for layer in net.trunk.iter().chain(&net.value).chain(&net.advantage) {
        write_layer(&mut w, layer)?;
    }
    w.flush()?;
    Ok(())
}

pub fn load(path: &Path) -> Result<DuelingNet> {
    let file =
        File::open(path).with_context(|| format!("cannot open checkpoint {}", path.display()))?;
    let mut r = BufReader::new(file);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        bail!("{} is not a weight checkpoint", path.display());
    }
    let version = read_u16(&mut r)?;
    if version != VERSION {
        bail!("unsupported checkpoint version {version}");
    }
    let n_trunk = read_u32(&mut r)? as usize;
    let n_value = read_u32(&mut r)? as usize;
    let n_adv = read_u32(&mut r)? as usize;
    let mut read_stream = |n: usize| -> Result<Vec<Linear>> {
        (0..n).map(|_| read_layer(&mut r)).collect()
    };
    let trunk = read_stream(n_trunk)?;
    let value = read_stream(n_value)?;
    let advantage = read_stream(n_adv)?;
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing)? != 0 {
        bail!("trailing bytes after checkpoint payload in {}", path.display());
    }
    Ok(DuelingNet::from_layers(trunk, value, advantage))
}

fn write_layer<W: Write>(w: &mut W, layer: &Linear) -> Result<()> {
    w.write_all(&u32::try_from(layer.weights.nrows())?.to_le_bytes())?;
    w.write_all(&u32::try_from(layer.weights.ncols())?.to_le_bytes())?;
    for &x in layer.weights.iter() {
        w.write_all(&x.to_le_bytes())?;
    }
    for &x in layer.bias.iter() {
        w.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

fn read_layer<R: Read>(r: &mut R) -> Result<Linear> {
    let rows = read_u32(r)? as usize;
    let cols = read_u32(r)? as usize;
    let mut weights = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        weights.push(read_f64(r)?);
    }
    let mut bias = Vec::with_capacity(cols);
    for _ in 0..cols {
        bias.push(read_f64(r)?);
    }
    Ok(Linear {
        weights: Array2::from_shape_vec((rows, cols), weights)?,
        bias: Array1::from_vec(bias),
    })
}

fn read_u16<R: Read>(r: &mut R) -> Result<u16> {
    let mut buf = [0u8; 2];
    r.read_exact(&mut buf)?;
    Ok(u16::from_le_bytes(buf))
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(f64::from_le_bytes(buf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use orbitee_core::rng::stream;

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = std::env::temp_dir().join("orbitee-ckpt-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("net.bin");
        let net = DuelingNet::standard(64, 5, &mut stream(9, "ckpt", 0, 0));
        save(&path, &net).unwrap();
        let loaded = load(&path).unwrap();
        assert_eq!(loaded.input_dim(), 64);
        assert_eq!(loaded.n_actions(), 5);
        let a = net.flat_params();
        let b = loaded.flat_params();
        assert_eq!(a.len(), b.len());
        assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
        std::fs::remove_file(&path).unwrap();
    }

    #[test]
    fn rejects_foreign_files() {
        let dir = std::env::temp_dir().join("orbitee-ckpt-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("not-a-checkpoint.bin");
        std::fs::write(&path, b"definitely not weights").unwrap();
        assert!(load(&path).is_err());
        std::fs::remove_file(&path).unwrap();
    }
}
