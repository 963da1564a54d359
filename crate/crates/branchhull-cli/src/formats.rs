//! File formats: decimal CSV matrices, the phase-portrait table and PGM
//! images. All numbers are written with 17 significant digits so matrix
//! round-trips are bit-exact for finite doubles.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use branchhull::imaging::GrayImage;
use branchhull::PhaseCell;
use nalgebra::{DMatrix, DVector};

/// Writes "rows,cols" then one comma-separated line per row.
pub fn write_matrix(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    let mut out = String::with_capacity(m.len() * 26 + 16);
    out.push_str(&format!("{},{}\n", m.nrows(), m.ncols()));
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            if c > 0 {
                out.push(',');
            }
            out.push_str(&format!("{:.16e}", m[(r, c)]));
        }
        out.push('\n');
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().context("matrix file is empty")?;
    let (rows, cols) = parse_header(header)?;
    let mut data = Vec::with_capacity(rows * cols);
    for (i, line) in lines.enumerate() {
        if i >= rows {
            bail!("matrix file has more than {rows} data rows");
        }
        for tok in line.split(',') {
            let v: f64 = tok
                .trim()
                .parse()
                .with_context(|| format!("bad number {tok:?} on data row {i}"))?;
            data.push(v);
        }
        if data.len() != (i + 1) * cols {
            bail!("data row {i} has {} values, expected {cols}", data.len() - i * cols);
        }
    }
    if data.len() != rows * cols {
        bail!("matrix file has {} values, expected {}", data.len(), rows * cols);
    }
    Ok(DMatrix::from_row_slice(rows, cols, &data))
}

fn parse_header(header: &str) -> Result<(usize, usize)> {
    let mut it = header.split(',');
    let rows = it
        .next()
        .and_then(|v| v.trim().parse().ok())
        .context("bad row count in matrix header")?;
    let cols = it
        .next()
        .and_then(|v| v.trim().parse().ok())
        .context("bad column count in matrix header")?;
    if it.next().is_some() {
        bail!("matrix header has extra fields");
    }
    Ok((rows, cols))
}

/// A vector as a single-column matrix file.
pub fn write_vector(path: &Path, v: &DVector<f64>) -> Result<()> {
    write_matrix(path, &DMatrix::from_column_slice(v.len(), 1, v.as_slice()))
}

/// Accepts either an n x 1 or a 1 x n matrix file.
pub fn read_vector(path: &Path) -> Result<DVector<f64>> {
    let m = read_matrix(path)?;
    if m.ncols() != 1 && m.nrows() != 1 {
        bail!(
            "{} holds a {} x {} matrix, expected a vector",
            path.display(),
            m.nrows(),
            m.ncols()
        );
    }
    Ok(DVector::from_iterator(m.len(), m.iter().copied()))
}

/// Phase-portrait table plus a trailing comment with the reference-line
/// constant.
pub fn write_phase_csv(path: &Path, cells: &[PhaseCell], line_c: f64) -> Result<()> {
    let mut out = String::from("N,K,L,S1,S2,trials,successes,success_rate\n");
    for cell in cells {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{:.6}\n",
            cell.n, cell.k, cell.l, cell.s1, cell.s2, cell.trials, cell.successes,
            cell.success_rate()
        ));
    }
    out.push_str(&format!("# line: C={line_c}\n"));
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Reads P2 (ASCII) or P5 (8-bit binary) grayscale images, maxval up to 255.
pub fn read_pgm(path: &Path) -> Result<GrayImage> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    if bytes.len() < 2 {
        bail!("{} is not a PGM file", path.display());
    }
    let magic = &bytes[0..2];
    let binary = match magic {
        b"P5" => true,
        b"P2" => false,
        _ => bail!("{} has unsupported magic {:?}", path.display(), magic),
    };
    let mut pos = 2;
    let mut header = [0usize; 3]; // width, height, maxval
    let mut field = 0;
    while field < 3 {
        skip_whitespace_and_comments(&bytes, &mut pos)?;
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let tok = std::str::from_utf8(&bytes[start..pos]).context("non-ASCII header")?;
        header[field] = tok.parse().with_context(|| format!("bad header token {tok:?}"))?;
        field += 1;
    }
    let (width, height, maxval) = (header[0], header[1], header[2]);
    if maxval == 0 || maxval > 255 {
        bail!("unsupported maxval {maxval} (only 8-bit images)");
    }
    let n = width * height;
    let mut raster = Vec::with_capacity(n);
    if binary {
        // Exactly one whitespace byte separates maxval from the raster.
        pos += 1;
        if bytes.len() < pos + n {
            bail!("truncated raster: {} of {} bytes", bytes.len() - pos, n);
        }
        raster.extend(bytes[pos..pos + n].iter().map(|b| *b as f64));
    } else {
        let text = std::str::from_utf8(&bytes[pos..]).context("non-ASCII raster")?;
        for tok in text.split_whitespace().take(n) {
            let v: u16 = tok.parse().with_context(|| format!("bad pixel {tok:?}"))?;
            raster.push(v as f64);
        }
        if raster.len() != n {
            bail!("truncated raster: {} of {} pixels", raster.len(), n);
        }
    }
    if raster.iter().any(|v| *v > maxval as f64) {
        bail!("pixel value exceeds maxval {maxval}");
    }
    // Raster order is row-major; the image stores column-major.
    let mut pixels = DVector::zeros(n);
    for r in 0..height {
        for c in 0..width {
            pixels[r + c * height] = raster[r * width + c];
        }
    }
    Ok(GrayImage::new(height, width, pixels)?)
}

fn skip_whitespace_and_comments(bytes: &[u8], pos: &mut usize) -> Result<()> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        if *pos >= bytes.len() {
            bail!("unexpected end of PGM header");
        }
        return Ok(());
    }
}

/// Writes an 8-bit binary (P5) PGM; pixels are rounded and clamped to [0, 255].
pub fn write_pgm(path: &Path, img: &GrayImage) -> Result<()> {
    let (height, width) = (img.rows(), img.cols());
    let mut out = Vec::with_capacity(width * height + 32);
    write!(out, "P5\n{width} {height}\n255\n")?;
    for r in 0..height {
        for c in 0..width {
            out.push(img.get(r, c).round().clamp(0.0, 255.0) as u8);
        }
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
