//! Reading and writing version 1.0 NPY containers.
//!
//! Only little-endian `f4`/`f8` element types in C order are accepted. Matrices must be
//! 2-D; log-probability vectors must be 1-D.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

const MAGIC: &[u8; 6] = b"\x93NUMPY";
const PREAMBLE_LEN: usize = 10;
const ALIGN: usize = 64;

/// Element type stored in the container.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dtype {
    F4,
    F8,
}

impl Dtype {
    fn descr(self) -> &'static str {
        match self {
            Dtype::F4 => "<f4",
            Dtype::F8 => "<f8",
        }
    }

    fn size(self) -> usize {
        match self {
            Dtype::F4 => 4,
            Dtype::F8 => 8,
        }
    }
}

#[derive(Debug)]
struct Header {
    dtype: Dtype,
    shape: Vec<usize>,
    data_offset: usize,
}

fn npy_err(path: &Path, offset: usize, message: impl Into<String>) -> Error {
    Error::Npy {
        path: path.to_path_buf(),
        offset,
        message: message.into(),
    }
}

pub fn read_matrix(path: &Path) -> Result<Matrix> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_matrix(path, &bytes)
}

pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_vector(path, &bytes)
}

/// Decodes a 2-D NPY buffer. `path` is only used in error messages.
pub fn parse_matrix(path: &Path, bytes: &[u8]) -> Result<Matrix> {
    let header = parse_header(path, bytes)?;
    let (rows, cols) = match header.shape[..] {
        [r, c] => (r, c),
        _ => {
            return Err(npy_err(
                path,
                PREAMBLE_LEN,
                format!("expected a 2-D shape, got {}-D", header.shape.len()),
            ))
        }
    };
    if rows == 0 || cols == 0 {
        return Err(npy_err(
            path,
            PREAMBLE_LEN,
            format!("empty shape ({rows}, {cols})"),
        ));
    }
    let data = read_values(path, bytes, &header, rows * cols)?;
    Matrix::new(rows, cols, data)
}

/// Decodes a 1-D NPY buffer.
pub fn parse_vector(path: &Path, bytes: &[u8]) -> Result<Vec<f64>> {
    let header = parse_header(path, bytes)?;
    let len = match header.shape[..] {
        [n] => n,
        _ => {
            return Err(npy_err(
                path,
                PREAMBLE_LEN,
                format!("expected a 1-D shape, got {}-D", header.shape.len()),
            ))
        }
    };
    read_values(path, bytes, &header, len)
}

fn read_values(path: &Path, bytes: &[u8], header: &Header, count: usize) -> Result<Vec<f64>> {
    let size = header.dtype.size();
    let body = &bytes[header.data_offset..];
    let needed = count
        .checked_mul(size)
        .ok_or_else(|| npy_err(path, PREAMBLE_LEN, "shape overflows"))?;
    if body.len() != needed {
        return Err(npy_err(
            path,
            header.data_offset,
            format!("expected {needed} data bytes, found {}", body.len()),
        ));
    }
    let mut values = Vec::with_capacity(count);
    for (i, chunk) in body.chunks_exact(size).enumerate() {
        let v = match header.dtype {
            Dtype::F4 => f32::from_le_bytes(chunk.try_into().unwrap()) as f64,
            Dtype::F8 => f64::from_le_bytes(chunk.try_into().unwrap()),
        };
        if !v.is_finite() {
            return Err(npy_err(
                path,
                header.data_offset + i * size,
                format!("non-finite value at element {i}"),
            ));
        }
        values.push(v);
    }
    Ok(values)
}

fn parse_header(path: &Path, bytes: &[u8]) -> Result<Header> {
    if bytes.len() < PREAMBLE_LEN || &bytes[..6] != MAGIC {
        return Err(npy_err(path, 0, "missing NPY magic string"));
    }
    if (bytes[6], bytes[7]) != (1, 0) {
        return Err(npy_err(
            path,
            6,
            format!("unsupported NPY version {}.{}", bytes[6], bytes[7]),
        ));
    }
    let header_len = u16::from_le_bytes([bytes[8], bytes[9]]) as usize;
    let data_offset = PREAMBLE_LEN + header_len;
    if bytes.len() < data_offset {
        return Err(npy_err(path, 8, "header length exceeds file size"));
    }
    let text = std::str::from_utf8(&bytes[PREAMBLE_LEN..data_offset])
        .map_err(|e| npy_err(path, PREAMBLE_LEN + e.valid_up_to(), "header is not ASCII"))?;
    let dict = parse_dict(text).map_err(|(pos, msg)| npy_err(path, PREAMBLE_LEN + pos, msg))?;

    let field = |key: &str| {
        dict.iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v)
            .ok_or_else(|| npy_err(path, PREAMBLE_LEN, format!("header is missing '{key}'")))
    };
    let dtype = match field("descr")? {
        Value::Str(s) if s == "<f8" => Dtype::F8,
        Value::Str(s) if s == "<f4" => Dtype::F4,
        Value::Str(s) => {
            return Err(npy_err(
                path,
                PREAMBLE_LEN,
                format!("unsupported element type '{s}'"),
            ))
        }
        _ => return Err(npy_err(path, PREAMBLE_LEN, "'descr' must be a string")),
    };
    match field("fortran_order")? {
        Value::Bool(false) => {}
        Value::Bool(true) => return Err(npy_err(path, PREAMBLE_LEN, "unsupported layout")),
        _ => return Err(npy_err(path, PREAMBLE_LEN, "'fortran_order' must be a bool")),
    }
    let shape = match field("shape")? {
        Value::Tuple(dims) => dims.clone(),
        _ => return Err(npy_err(path, PREAMBLE_LEN, "'shape' must be a tuple")),
    };
    Ok(Header {
        dtype,
        shape,
        data_offset,
    })
}

#[derive(Debug, PartialEq)]
enum Value {
    Str(String),
    Bool(bool),
    Tuple(Vec<usize>),
}

type ParseError = (usize, String);

/// Parses the Python dict literal in an NPY header.
fn parse_dict(text: &str) -> std::result::Result<Vec<(String, Value)>, ParseError> {
    let mut p = DictParser {
        s: text.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    p.expect(b'{')?;
    let mut entries = Vec::new();
    loop {
        p.skip_ws();
        if p.eat(b'}') {
            break;
        }
        let key = p.string()?;
        p.skip_ws();
        p.expect(b':')?;
        p.skip_ws();
        let value = p.value()?;
        entries.push((key, value));
        p.skip_ws();
        if p.eat(b',') {
            continue;
        }
        p.skip_ws();
        p.expect(b'}')?;
        break;
    }
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err((p.pos, "trailing bytes after header dict".into()));
    }
    Ok(entries)
}

struct DictParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl DictParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> std::result::Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err((self.pos, format!("expected '{}'", c as char)))
        }
    }

    fn string(&mut self) -> std::result::Result<String, ParseError> {
        let quote = match self.s.get(self.pos) {
            Some(&q @ (b'\'' | b'"')) => q,
            _ => return Err((self.pos, "expected a quoted string".into())),
        };
        self.pos += 1;
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos] != quote {
            self.pos += 1;
        }
        if self.pos == self.s.len() {
            return Err((start, "unterminated string".into()));
        }
        let out = String::from_utf8_lossy(&self.s[start..self.pos]).into_owned();
        self.pos += 1;
        Ok(out)
    }

    fn value(&mut self) -> std::result::Result<Value, ParseError> {
        let rest = &self.s[self.pos..];
        if rest.starts_with(b"True") {
            self.pos += 4;
            Ok(Value::Bool(true))
        } else if rest.starts_with(b"False") {
            self.pos += 5;
            Ok(Value::Bool(false))
        } else if rest.first() == Some(&b'(') {
            self.pos += 1;
            let mut dims = Vec::new();
            loop {
                self.skip_ws();
                if self.eat(b')') {
                    break;
                }
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
                let dim = digits
                    .parse::<usize>()
                    .map_err(|_| (start, "expected a dimension".to_string()))?;
                dims.push(dim);
                self.skip_ws();
                if !self.eat(b',') {
                    self.skip_ws();
                    self.expect(b')')?;
                    break;
                }
            }
            Ok(Value::Tuple(dims))
        } else {
            self.string().map(Value::Str)
        }
    }
}

/// Encodes a matrix as an NPY 1.0 buffer. `F4` narrows each value to `f32`.
pub fn encode_matrix(m: &Matrix, dtype: Dtype) -> Vec<u8> {
    encode(&[m.rows(), m.cols()], m.as_slice(), dtype)
}

pub fn encode_vector(values: &[f64], dtype: Dtype) -> Vec<u8> {
    encode(&[values.len()], values, dtype)
}

fn encode(shape: &[usize], values: &[f64], dtype: Dtype) -> Vec<u8> {
    let shape_text = match shape {
        [n] => format!("({n},)"),
        _ => format!(
            "({})",
            shape
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        ),
    };
    let mut dict = format!(
        "{{'descr': '{}', 'fortran_order': False, 'shape': {}, }}",
        dtype.descr(),
        shape_text
    );
    // Pad with spaces so the data starts on an aligned boundary; the header ends in '\n'.
    let unpadded = PREAMBLE_LEN + dict.len() + 1;
    let padding = (ALIGN - unpadded % ALIGN) % ALIGN;
    dict.extend(std::iter::repeat_n(' ', padding));
    dict.push('\n');

    let mut out = Vec::with_capacity(PREAMBLE_LEN + dict.len() + values.len() * dtype.size());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&[1, 0]);
    out.extend_from_slice(&(dict.len() as u16).to_le_bytes());
    out.extend_from_slice(dict.as_bytes());
    for &v in values {
        match dtype {
            Dtype::F4 => out.extend_from_slice(&(v as f32).to_le_bytes()),
            Dtype::F8 => out.extend_from_slice(&v.to_le_bytes()),
        }
    }
    out
}

pub fn write_matrix(path: &Path, m: &Matrix, dtype: Dtype) -> Result<()> {
    fs::write(path, encode_matrix(m, dtype)).map_err(|e| Error::io(path, e))
}

pub fn write_vector(path: &Path, values: &[f64], dtype: Dtype) -> Result<()> {
    fs::write(path, encode_vector(values, dtype)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p() -> &'static Path {
        Path::new("test.npy")
    }

    fn raw(header: &str, body: &[u8]) -> Vec<u8> {
        let mut out = MAGIC.to_vec();
        out.extend_from_slice(&[1, 0]);
        out.extend_from_slice(&(header.len() as u16).to_le_bytes());
        out.extend_from_slice(header.as_bytes());
        out.extend_from_slice(body);
        out
    }

    #[test]
    fn f4_identity_promotes_to_f64() {
        let m = Matrix::identity(2);
        let bytes = encode_matrix(&m, Dtype::F4);
        assert_eq!((PREAMBLE_LEN + u16::from_le_bytes([bytes[8], bytes[9]]) as usize) % ALIGN, 0);
        let back = parse_matrix(p(), &bytes).unwrap();
        assert_eq!(back.as_slice(), &[1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn fortran_order_is_rejected() {
        let body: Vec<u8> = [1.0f64, 0.0, 0.0, 1.0]
            .iter()
            .flat_map(|v| v.to_le_bytes())
            .collect();
        let bytes = raw(
            "{'descr': '<f8', 'fortran_order': True, 'shape': (2, 2), }\n",
            &body,
        );
        let err = parse_matrix(p(), &bytes).unwrap_err();
        assert!(err.to_string().contains("unsupported layout"), "{err}");
    }

    #[test]
    fn rejects_bad_dtype_version_and_shape() {
        let body = [0u8; 16];
        let big = raw("{'descr': '>f8', 'fortran_order': False, 'shape': (2,), }\n", &body);
        assert!(parse_vector(p(), &big)
            .unwrap_err()
            .to_string()
            .contains("unsupported element type"));

        let ints = raw("{'descr': '<i8', 'fortran_order': False, 'shape': (2,), }\n", &body);
        assert!(parse_vector(p(), &ints).is_err());

        let three_d = raw(
            "{'descr': '<f8', 'fortran_order': False, 'shape': (1, 1, 2), }\n",
            &body,
        );
        assert!(parse_matrix(p(), &three_d)
            .unwrap_err()
            .to_string()
            .contains("2-D"));

        let mut v2 = encode_matrix(&Matrix::identity(2), Dtype::F8);
        v2[6] = 2;
        assert!(parse_matrix(p(), &v2).unwrap_err().to_string().contains("byte 6"));

        assert!(parse_matrix(p(), b"not an npy file").is_err());
    }

    #[test]
    fn truncated_data_reports_offset() {
        let mut bytes = encode_matrix(&Matrix::identity(2), Dtype::F8);
        let data_start = bytes.len() - 32;
        bytes.truncate(bytes.len() - 3);
        let err = parse_matrix(p(), &bytes).unwrap_err();
        assert!(err.to_string().contains(&format!("byte {data_start}")), "{err}");
    }

    #[test]
    fn non_finite_reports_element_offset() {
        let m = Matrix::identity(2);
        let mut bytes = encode_matrix(&m, Dtype::F8);
        let at = bytes.len() - 32 + 8 * 2;
        bytes[at..at + 8].copy_from_slice(&f64::INFINITY.to_le_bytes());
        let err = parse_matrix(p(), &bytes).unwrap_err();
        assert!(err.to_string().contains(&format!("byte {at}")), "{err}");
    }

    #[test]
    fn vector_round_trip() {
        let v = vec![-0.5, -1.25, 0.0];
        let back = parse_vector(p(), &encode_vector(&v, Dtype::F8)).unwrap();
        assert_eq!(back, v);
        assert!(parse_matrix(p(), &encode_vector(&v, Dtype::F8)).is_err());
    }

    #[test]
    fn accepts_numpy_style_header_spacing() {
        let body: Vec<u8> = [2.0f64, 3.0].iter().flat_map(|v| v.to_le_bytes()).collect();
        let bytes = raw(
            "{\"descr\": \"<f8\",   \"shape\": (1,2), \"fortran_order\": False}   \n",
            &body,
        );
        let m = parse_matrix(p(), &bytes).unwrap();
        assert_eq!(m.shape(), (1, 2));
    }

    proptest! {
        #[test]
        fn f8_round_trip_is_bit_exact(
            rows in 1usize..12,
            cols in 1usize..12,
            seed in any::<u64>(),
        ) {
            let m = crate::gen::standard_normal(rows, cols, seed).scaled(1e3).unwrap();
            let once = parse_matrix(p(), &encode_matrix(&m, Dtype::F8)).unwrap();
            let bytes = encode_matrix(&once, Dtype::F8);
            let twice = parse_matrix(p(), &bytes).unwrap();
            prop_assert_eq!(&twice, &m);
            prop_assert_eq!(bytes, encode_matrix(&m, Dtype::F8));
        }
    }
}
