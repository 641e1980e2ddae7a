//! OD matrix CSV: three `# key=value` header lines, then
//! `xo_idx,yo_idx,xd_idx,yd_idx,density` with 1-based indices and zero
//! entries omitted.

use std::io::{BufRead, BufReader, Read, Write};

use super::OdMatrix;
use crate::error::{Result, TransitError};
use crate::grid::Grid;

pub fn write_od_csv<W: Write>(od: &OdMatrix, mut out: W) -> Result<()> {
    let g = od.grid();
    writeln!(out, "# side_length={}", g.side_length())?;
    writeln!(out, "# cell_size={}", g.cell_size())?;
    writeln!(out, "# total_demand={}", od.total_demand())?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["xo_idx", "yo_idx", "xd_idx", "yd_idx", "density"])?;
    let n = g.n_cells();
    for xo in 0..n {
        for yo in 0..n {
            for xd in 0..n {
                for yd in 0..n {
                    let v = od.get(xo, yo, xd, yd);
                    if v != 0.0 {
                        w.write_record(&[
                            (xo + 1).to_string(),
                            (yo + 1).to_string(),
                            (xd + 1).to_string(),
                            (yd + 1).to_string(),
                            v.to_string(),
                        ])?;
                    }
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_od_csv<R: Read>(input: R) -> Result<OdMatrix> {
    let mut reader = BufReader::new(input);
    let mut header = |key: &str| -> Result<f64> {
        let mut line = String::new();
        reader.read_line(&mut line)?;
        let value = line
            .trim()
            .strip_prefix('#')
            .map(str::trim)
            .and_then(|rest| rest.strip_prefix(key))
            .and_then(|rest| rest.trim_start().strip_prefix('='))
            .ok_or_else(|| TransitError::InvalidDemand(format!("expected header `# {key}=...`, got `{}`", line.trim())))?;
        value
            .trim()
            .parse()
            .map_err(|e| TransitError::InvalidDemand(format!("bad {key}: {e}")))
    };
    let side = header("side_length")?;
    let cell = header("cell_size")?;
    let total = header("total_demand")?;
    let grid = Grid::new(side, cell)?;
    let n = grid.n_cells();
    let mut density = vec![0.0; n.pow(4)];
    let mut rdr = csv::Reader::from_reader(reader);
    for rec in rdr.deserialize() {
        let (xo, yo, xd, yd, v): (usize, usize, usize, usize, f64) = rec?;
        let idx = [xo, yo, xd, yd];
        if idx.iter().any(|i| *i < 1 || *i > n) {
            return Err(TransitError::InvalidDemand(format!("index out of range 1..={n}: {idx:?}")));
        }
        density[(((xo - 1) * n + yo - 1) * n + xd - 1) * n + yd - 1] = v;
    }
    OdMatrix::new(grid, density, total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demand::{generate_chessboard_demand, generate_uniform_demand};

    #[test]
    fn round_trip_is_exact() {
        let g = Grid::new(10.0, 2.5).unwrap();
        let (od, _) = generate_chessboard_demand(&g, 5000.0, 2, 0.9, 0.9).unwrap();
        let mut buf = Vec::new();
        write_od_csv(&od, &mut buf).unwrap();
        let back = read_od_csv(buf.as_slice()).unwrap();
        assert_eq!(back, od);
    }

    #[test]
    fn header_layout() {
        let g = Grid::new(2.0, 1.0).unwrap();
        let od = generate_uniform_demand(&g, 16.0).unwrap();
        let mut buf = Vec::new();
        write_od_csv(&od, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# side_length=2");
        assert_eq!(lines[1], "# cell_size=1");
        assert_eq!(lines[2], "# total_demand=16");
        assert_eq!(lines[3], "xo_idx,yo_idx,xd_idx,yd_idx,density");
        assert_eq!(lines[4], "1,1,1,1,1");
        assert_eq!(lines.len(), 4 + 16);
    }

    #[test]
    fn out_of_range_index_rejected() {
        let text = "# side_length=2\n# cell_size=1\n# total_demand=1\nxo_idx,yo_idx,xd_idx,yd_idx,density\n3,1,1,1,1\n";
        assert!(read_od_csv(text.as_bytes()).is_err());
    }
}
