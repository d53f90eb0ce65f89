//! Byte-exact file formats: BECGRID1 complex rasters and plain CSV.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use num_complex::Complex64;

use bec_core::gpe::{FieldState, Grid2D};

pub const GRID_MAGIC: &[u8; 8] = b"BECGRID1";
pub const GRID_VERSION: u32 = 1;

/// A d-dimensional complex raster as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFile {
    pub dims: Vec<u32>,
    pub spacing: Vec<f64>,
    pub origin: Vec<f64>,
    /// Row-major, last index fastest.
    pub data: Vec<Complex64>,
}

impl GridFile {
    pub fn from_field(field: &FieldState<f64>) -> Self {
        let g = &field.grid;
        let (ox, oy) = g.origin();
        Self {
            dims: vec![g.nx as u32, g.ny as u32],
            spacing: vec![g.dx, g.dy],
            origin: vec![ox, oy],
            data: field.amps.clone(),
        }
    }

    /// Back to a 2D field; the geometry must be one [`Grid2D`] can express.
    pub fn to_field(&self) -> io::Result<FieldState<f64>> {
        if self.dims.len() != 2 {
            return Err(bad(format!("expected a 2D grid, found d = {}", self.dims.len())));
        }
        let (nx, ny) = (self.dims[0] as usize, self.dims[1] as usize);
        let grid = Grid2D::rect(nx, ny, self.spacing[0] * nx as f64, self.spacing[1] * ny as f64)
            .map_err(|e| bad(e.to_string()))?;
        let (ox, oy) = grid.origin();
        if ox.to_bits() != self.origin[0].to_bits() || oy.to_bits() != self.origin[1].to_bits() {
            return Err(bad("origin is not the centered grid origin".into()));
        }
        FieldState::new(grid, self.data.clone()).map_err(|e| bad(e.to_string()))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let d = self.dims.len();
        let mut out = Vec::with_capacity(8 + 4 * (2 + d) + 16 * d + 16 * self.data.len());
        out.extend_from_slice(GRID_MAGIC);
        out.extend_from_slice(&GRID_VERSION.to_le_bytes());
        out.extend_from_slice(&(d as u32).to_le_bytes());
        for n in &self.dims {
            out.extend_from_slice(&n.to_le_bytes());
        }
        for v in self.spacing.iter().chain(&self.origin) {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for z in &self.data {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> io::Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(8)? != GRID_MAGIC {
            return Err(bad("bad magic".into()));
        }
        let version = r.u32()?;
        if version != GRID_VERSION {
            return Err(bad(format!("unsupported version {version}")));
        }
        let d = r.u32()? as usize;
        if d == 0 || d > 3 {
            return Err(bad(format!("bad dimension {d}")));
        }
        let dims = (0..d).map(|_| r.u32()).collect::<io::Result<Vec<_>>>()?;
        let spacing = (0..d).map(|_| r.f64()).collect::<io::Result<Vec<_>>>()?;
        let origin = (0..d).map(|_| r.f64()).collect::<io::Result<Vec<_>>>()?;
        let count = dims
            .iter()
            .try_fold(1usize, |a, &n| a.checked_mul(n as usize))
            .ok_or_else(|| bad("size overflow".into()))?;
        if bytes.len() - r.pos != count * 16 {
            return Err(bad(format!("expected {} sample bytes, found {}", count * 16, bytes.len() - r.pos)));
        }
        let mut data = Vec::with_capacity(count);
        for _ in 0..count {
            let re = r.f64()?;
            data.push(Complex64::new(re, r.f64()?));
        }
        Ok(Self { dims, spacing, origin, data })
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> io::Result<&'a [u8]> {
        let end = self.pos + n;
        if end > self.bytes.len() {
            return Err(io::Error::new(io::ErrorKind::UnexpectedEof, "truncated grid file"));
        }
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> io::Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> io::Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

fn bad(msg: String) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg)
}

pub fn write_grid(field: &FieldState<f64>, path: &Path) -> io::Result<()> {
    fs::write(path, GridFile::from_field(field).to_bytes())
}

pub fn read_grid(path: &Path) -> io::Result<GridFile> {
    GridFile::from_bytes(&fs::read(path)?)
}

/// Column-oriented CSV table. Floats use Rust's shortest round-trip form, so
/// the text never depends on locale and parses back to the same bits.
#[derive(Debug, Clone, Default)]
pub struct Csv {
    header: Vec<String>,
    body: String,
}

impl Csv {
    pub fn new(columns: &[&str]) -> Self {
        Self { header: columns.iter().map(|s| s.to_string()).collect(), body: String::new() }
    }

    pub fn row(&mut self, values: &[f64]) {
        assert_eq!(values.len(), self.header.len(), "CSV row width");
        for (i, v) in values.iter().enumerate() {
            if i > 0 {
                self.body.push(',');
            }
            write!(self.body, "{v:?}").unwrap();
        }
        self.body.push('\n');
    }

    pub fn render(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        s.push_str(&self.body);
        s
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        fs::write(path, self.render())
    }
}

/// Parses a CSV written by [`Csv`] into its header and rows.
pub fn read_csv(path: &Path) -> io::Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header: Vec<String> =
        lines.next().ok_or_else(|| bad("empty CSV".into()))?.split(',').map(String::from).collect();
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        let row = line
            .split(',')
            .map(|v| v.parse::<f64>().map_err(|e| bad(format!("row {}: {e}", k + 1))))
            .collect::<io::Result<Vec<_>>>()?;
        if row.len() != header.len() {
            return Err(bad(format!("row {} has {} fields, header has {}", k + 1, row.len(), header.len())));
        }
        rows.push(row);
    }
    Ok((header, rows))
}

/// One column of a parsed CSV by name.
pub fn column(header: &[String], rows: &[Vec<f64>], name: &str) -> io::Result<Vec<f64>> {
    let i = header.iter().position(|h| h == name).ok_or_else(|| bad(format!("missing column {name}")))?;
    Ok(rows.iter().map(|r| r[i]).collect())
}
