//! Binary container and CSV export for spectral fields.
//!
//! Container layout, all little-endian:
//!
//! | bytes | content |
//! |---|---|
//! | 4 | magic `KPLF` |
//! | 4 | format version (`u32`, currently 1) |
//! | 8 x 4 | `k_max`, `y_points`, `y_dims`, `t_points` (`u64`) |
//! | 8 x 2 | `y_length`, `t_window` (`f64`) |
//! | 8 x 3 | array dimensions `(2 k_max + 1, y_points, y_points or 1)` (`u64`) |
//! | 16 x len | coefficients as `(re, im)` `f64` pairs in row-major order |

use std::io::{Read, Write};

use num_complex::Complex64;

use super::grid::{GridParams, GridSpec};
use super::spectral::SpectralField;
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"KPLF";
const VERSION: u32 = 1;

pub fn write_field<W: Write>(f: &SpectralField, mut w: W) -> Result<()> {
    let g = f.grid();
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    for v in [g.k_max(), g.y_points(), g.y_dims(), g.t_points()] {
        w.write_all(&(v as u64).to_le_bytes())?;
    }
    w.write_all(&g.y_length().to_le_bytes())?;
    w.write_all(&g.t_window().to_le_bytes())?;
    for v in [g.x_points(), g.y_points(), g.y_points2()] {
        w.write_all(&(v as u64).to_le_bytes())?;
    }
    for c in f.coeffs() {
        w.write_all(&c.re.to_le_bytes())?;
        w.write_all(&c.im.to_le_bytes())?;
    }
    Ok(())
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    Ok(f64::from_bits(read_u64(r)?))
}

pub fn read_field<R: Read>(mut r: R) -> Result<SpectralField> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Io("not a field container".into()));
    }
    let mut vb = [0u8; 4];
    r.read_exact(&mut vb)?;
    let version = u32::from_le_bytes(vb);
    if version != VERSION {
        return Err(Error::Io(format!("unsupported container version {version}")));
    }
    let k_max = read_u64(&mut r)? as usize;
    let y_points = read_u64(&mut r)? as usize;
    let y_dims = read_u64(&mut r)? as usize;
    let t_points = read_u64(&mut r)? as usize;
    let y_length = read_f64(&mut r)?;
    let t_window = read_f64(&mut r)?;
    let grid = GridSpec::new(GridParams { k_max, y_points, y_length, y_dims, t_points, t_window })?;
    let dims = [read_u64(&mut r)?, read_u64(&mut r)?, read_u64(&mut r)?];
    let expected = [grid.x_points(), grid.y_points(), grid.y_points2()].map(|x| x as u64);
    if dims != expected {
        return Err(Error::ShapeMismatch {
            expected: format!("{expected:?}"),
            found: format!("{dims:?}"),
        });
    }
    let mut coeffs = Vec::with_capacity(grid.mode_count());
    for _ in 0..grid.mode_count() {
        let re = read_f64(&mut r)?;
        let im = read_f64(&mut r)?;
        coeffs.push(Complex64::new(re, im));
    }
    SpectralField::from_coeffs(grid, coeffs)
}

/// Nonzero coefficients as CSV rows `k,n1,n2,eta1,eta2,re,im`.
pub fn write_field_csv<W: Write>(f: &SpectralField, mut w: W) -> Result<()> {
    writeln!(w, "k,n1,n2,eta1,eta2,re,im")?;
    for (m, c) in f.support() {
        let eta = f.eta(m.n);
        writeln!(w, "{},{},{},{:e},{:e},{:e},{:e}", m.k, m.n[0], m.n[1], eta[0], eta[1], c.re, c.im)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::random::{random_field, BandSpec};

    #[test]
    fn container_round_trip() {
        for y_dims in [1, 2] {
            let g = GridSpec::new(GridParams {
                k_max: 6,
                y_points: 8,
                y_length: 12.5,
                y_dims,
                t_points: 16,
                t_window: 3.0,
            })
            .unwrap();
            let band = BandSpec { k_lo: 1, k_hi: 6, eta_max: 1.0, amplitude: 1.0 };
            let f = random_field(g, &band, 3).unwrap();
            let mut buf = Vec::new();
            write_field(&f, &mut buf).unwrap();
            assert_eq!(buf.len(), 4 + 4 + 32 + 16 + 24 + 16 * g.mode_count());
            let back = read_field(buf.as_slice()).unwrap();
            assert_eq!(back, f);
            buf[0] = b'X';
            assert!(read_field(buf.as_slice()).is_err());
        }
    }

    #[test]
    fn csv_lists_support() {
        let g = GridSpec::new(GridParams {
            k_max: 2,
            y_points: 8,
            y_length: 8.0,
            y_dims: 1,
            t_points: 16,
            t_window: 3.0,
        })
        .unwrap();
        let mut f = SpectralField::zeros(g);
        f.set(1, [2, 0], Complex64::new(0.5, -1.0)).unwrap();
        let mut out = Vec::new();
        write_field_csv(&f, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[1].starts_with("1,2,0,"));
    }
}
