//! Binary checkpoint format, little endian throughout:
//!
//! ```text
//! magic   8 bytes  "HYPOPGNN"
//! version u32      1
//! n       u64
//! f       u64
//! hidden  u64
//! variant u8       0 = modified, 1 = standard
//! values  u64      0 for the sigmoid head, else the softmax value count
//!         i64 × values
//! σ       f64 × n·f        row major
//! W0      f64 × f·hidden
//! W1      f64 × hidden·out
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;

use super::{Head, HyperGnnModel};
use crate::error::{Error, Result};
use crate::hypergraph::OperatorVariant;

const MAGIC: &[u8; 8] = b"HYPOPGNN";
const VERSION: u32 = 1;

pub fn write_checkpoint(model: &HyperGnnModel, mut out: impl Write) -> Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    for v in [model.n(), model.width(), model.hidden()] {
        out.write_all(&(v as u64).to_le_bytes())?;
    }
    out.write_all(&[model.variant.as_u8()])?;
    match &model.head {
        Head::Sigmoid => out.write_all(&0u64.to_le_bytes())?,
        Head::Softmax(values) => {
            out.write_all(&(values.len() as u64).to_le_bytes())?;
            for v in values {
                out.write_all(&v.to_le_bytes())?;
            }
        }
    }
    for block in [&model.embedding, &model.w0, &model.w1] {
        for v in block.iter() {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn save_checkpoint(model: &HyperGnnModel, path: impl AsRef<Path>) -> Result<()> {
    write_checkpoint(model, BufWriter::new(File::create(path)?))
}

fn read_array<const K: usize>(input: &mut impl Read) -> Result<[u8; K]> {
    let mut buf = [0u8; K];
    input.read_exact(&mut buf).map_err(|e| {
        if e.kind() == std::io::ErrorKind::UnexpectedEof {
            Error::ShapeMismatch("checkpoint is truncated".into())
        } else {
            Error::Io(e)
        }
    })?;
    Ok(buf)
}

fn read_u64(input: &mut impl Read) -> Result<usize> {
    let v = u64::from_le_bytes(read_array(input)?);
    usize::try_from(v).map_err(|_| Error::ShapeMismatch(format!("dimension {v} too large")))
}

fn read_matrix(input: &mut impl Read, rows: usize, cols: usize) -> Result<Array2<f64>> {
    let len = rows
        .checked_mul(cols)
        .ok_or_else(|| Error::ShapeMismatch("checkpoint dimensions overflow".into()))?;
    let mut data = Vec::with_capacity(len.min(1 << 24));
    for _ in 0..len {
        data.push(f64::from_le_bytes(read_array(input)?));
    }
    Array2::from_shape_vec((rows, cols), data).map_err(|e| Error::ShapeMismatch(e.to_string()))
}

pub fn read_checkpoint(mut input: impl Read) -> Result<HyperGnnModel> {
    let magic: [u8; 8] = read_array(&mut input)?;
    if &magic != MAGIC {
        return Err(Error::ShapeMismatch("not a model checkpoint".into()));
    }
    let version = u32::from_le_bytes(read_array(&mut input)?);
    if version != VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let n = read_u64(&mut input)?;
    let f = read_u64(&mut input)?;
    let hidden = read_u64(&mut input)?;
    let [variant] = read_array::<1>(&mut input)?;
    let variant = OperatorVariant::from_u8(variant)
        .ok_or_else(|| Error::ShapeMismatch(format!("unknown operator variant {variant}")))?;
    let n_values = read_u64(&mut input)?;
    let head = if n_values == 0 {
        Head::Sigmoid
    } else {
        let mut values = Vec::with_capacity(n_values.min(1024));
        for _ in 0..n_values {
            values.push(i64::from_le_bytes(read_array(&mut input)?));
        }
        Head::Softmax(values)
    };
    let embedding = read_matrix(&mut input, n, f)?;
    let w0 = read_matrix(&mut input, f, hidden)?;
    let w1 = read_matrix(&mut input, hidden, head.outputs())?;
    let mut rest = [0u8; 1];
    if input.read(&mut rest)? != 0 {
        return Err(Error::ShapeMismatch(
            "trailing bytes after checkpoint".into(),
        ));
    }
    Ok(HyperGnnModel {
        embedding,
        w0,
        w1,
        head,
        variant,
    })
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<HyperGnnModel> {
    read_checkpoint(BufReader::new(File::open(path)?))
}
