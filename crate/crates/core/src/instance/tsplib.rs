//! TSPLIB95 reader and writer for symmetric instances.
//!
//! Explicit matrices (`LOWER_DIAG_ROW`, `UPPER_ROW`, `UPPER_DIAG_ROW`,
//! `LOWER_ROW`, `FULL_MATRIX`) are read verbatim. Coordinate types are
//! expanded with the TSPLIB rounding rule of each type.

use std::fmt::Write as _;

use super::{DistMatrix, InstanceError};

/// A parsed TSPLIB problem reduced to its full symmetric weight matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTsplib {
    pub name: String,
    pub dimension: usize,
    pub edge_weights: DistMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum WeightType {
    Explicit,
    Euc2d,
    Ceil2d,
    Geo,
    Att,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum WeightFormat {
    FullMatrix,
    UpperRow,
    LowerRow,
    UpperDiagRow,
    LowerDiagRow,
}

impl WeightType {
    fn parse(s: &str) -> Result<Self, InstanceError> {
        match s {
            "EXPLICIT" => Ok(Self::Explicit),
            "EUC_2D" => Ok(Self::Euc2d),
            "CEIL_2D" => Ok(Self::Ceil2d),
            "GEO" => Ok(Self::Geo),
            "ATT" => Ok(Self::Att),
            other => Err(InstanceError::UnsupportedWeightType(other.to_string())),
        }
    }
}

impl WeightFormat {
    fn parse(s: &str) -> Result<Self, InstanceError> {
        match s {
            "FULL_MATRIX" => Ok(Self::FullMatrix),
            "UPPER_ROW" => Ok(Self::UpperRow),
            "LOWER_ROW" => Ok(Self::LowerRow),
            "UPPER_DIAG_ROW" => Ok(Self::UpperDiagRow),
            "LOWER_DIAG_ROW" => Ok(Self::LowerDiagRow),
            other => Err(InstanceError::UnsupportedWeightType(format!(
                "EXPLICIT/{other}"
            ))),
        }
    }

    /// (row, col) cells in file order.
    fn cells(self, n: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            let cols: Box<dyn Iterator<Item = usize>> = match self {
                Self::FullMatrix => Box::new(0..n),
                Self::UpperRow => Box::new(i + 1..n),
                Self::UpperDiagRow => Box::new(i..n),
                Self::LowerRow => Box::new(0..i),
                Self::LowerDiagRow => Box::new(0..=i),
            };
            out.extend(cols.map(|j| (i, j)));
        }
        out
    }
}

fn malformed(msg: impl Into<String>) -> InstanceError {
    InstanceError::Malformed(msg.into())
}

/// Parses TSPLIB text into a full symmetric matrix.
pub fn parse_tsplib(text: &str) -> Result<RawTsplib, InstanceError> {
    let mut name = String::new();
    let mut dimension: Option<usize> = None;
    let mut weight_type: Option<WeightType> = None;
    let mut weight_format: Option<WeightFormat> = None;
    let mut weights: Option<Vec<f64>> = None;
    let mut coords: Option<Vec<(f64, f64)>> = None;

    let mut lines = text.lines().peekable();
    while let Some(line) = lines.next() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line == "EOF" {
            break;
        }
        if let Some((key, value)) = line.split_once(':') {
            let key = key.trim();
            let value = value.trim();
            match key {
                "NAME" => name = value.to_string(),
                "TYPE" => {
                    if value != "TSP" {
                        return Err(InstanceError::UnsupportedWeightType(format!("TYPE {value}")));
                    }
                }
                "DIMENSION" => {
                    dimension = Some(
                        value
                            .parse()
                            .map_err(|_| malformed(format!("bad DIMENSION '{value}'")))?,
                    )
                }
                "EDGE_WEIGHT_TYPE" => weight_type = Some(WeightType::parse(value)?),
                "EDGE_WEIGHT_FORMAT" => weight_format = Some(WeightFormat::parse(value)?),
                _ => {}
            }
            continue;
        }
        match line {
            "EDGE_WEIGHT_SECTION" => {
                let dim = dimension.ok_or_else(|| malformed("EDGE_WEIGHT_SECTION before DIMENSION"))?;
                let format = weight_format.unwrap_or(WeightFormat::FullMatrix);
                let expected = format.cells(dim).len();
                let mut values = Vec::with_capacity(expected);
                while values.len() < expected {
                    let Some(next) = lines.peek() else { break };
                    if is_section_boundary(next) {
                        break;
                    }
                    let next = lines.next().unwrap_or_default();
                    for tok in next.split_whitespace() {
                        let v: f64 = tok
                            .parse()
                            .map_err(|_| malformed(format!("bad weight '{tok}'")))?;
                        values.push(v);
                    }
                }
                if values.len() != expected {
                    return Err(InstanceError::DimensionMismatch {
                        expected,
                        found: values.len(),
                    });
                }
                weights = Some(values);
            }
            "NODE_COORD_SECTION" => {
                let dim = dimension.ok_or_else(|| malformed("NODE_COORD_SECTION before DIMENSION"))?;
                let mut pts = Vec::with_capacity(dim);
                while pts.len() < dim {
                    let Some(next) = lines.peek() else { break };
                    if is_section_boundary(next) {
                        break;
                    }
                    let next = lines.next().unwrap_or_default();
                    let toks: Vec<&str> = next.split_whitespace().collect();
                    if toks.is_empty() {
                        continue;
                    }
                    if toks.len() < 3 {
                        return Err(malformed(format!("bad coordinate line '{next}'")));
                    }
                    let x: f64 = toks[1].parse().map_err(|_| malformed(format!("bad x '{}'", toks[1])))?;
                    let y: f64 = toks[2].parse().map_err(|_| malformed(format!("bad y '{}'", toks[2])))?;
                    pts.push((x, y));
                }
                if pts.len() != dim {
                    return Err(InstanceError::DimensionMismatch {
                        expected: dim,
                        found: pts.len(),
                    });
                }
                coords = Some(pts);
            }
            "DISPLAY_DATA_SECTION" => {
                while let Some(next) = lines.peek() {
                    if is_section_boundary(next) {
                        break;
                    }
                    lines.next();
                }
            }
            other => return Err(malformed(format!("unexpected line '{other}'"))),
        }
    }

    let dimension = dimension.ok_or_else(|| malformed("missing DIMENSION"))?;
    let weight_type = weight_type.ok_or_else(|| malformed("missing EDGE_WEIGHT_TYPE"))?;
    let matrix = match weight_type {
        WeightType::Explicit => {
            let values = weights.ok_or_else(|| malformed("missing EDGE_WEIGHT_SECTION"))?;
            let format = weight_format.unwrap_or(WeightFormat::FullMatrix);
            let mut m = DistMatrix::zeros(dimension);
            for ((i, j), v) in format.cells(dimension).into_iter().zip(values) {
                m.set(i, j, v);
                if format != WeightFormat::FullMatrix {
                    m.set(j, i, v);
                }
            }
            m
        }
        coord_type => {
            let pts = coords.ok_or_else(|| malformed("missing NODE_COORD_SECTION"))?;
            let mut m = DistMatrix::zeros(dimension);
            for i in 0..dimension {
                for j in i + 1..dimension {
                    let w = coordinate_distance(coord_type, pts[i], pts[j]);
                    m.set(i, j, w);
                    m.set(j, i, w);
                }
            }
            m
        }
    };
    matrix.validate()?;
    Ok(RawTsplib {
        name,
        dimension,
        edge_weights: matrix,
    })
}

fn is_section_boundary(line: &str) -> bool {
    let t = line.trim();
    t == "EOF" || t.ends_with("_SECTION") || t.contains(':')
}

/// TSPLIB `nint`: round half away from zero.
fn nint(x: f64) -> f64 {
    (x + 0.5).floor()
}

fn coordinate_distance(kind: WeightType, a: (f64, f64), b: (f64, f64)) -> f64 {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    match kind {
        WeightType::Euc2d => nint((dx * dx + dy * dy).sqrt()),
        WeightType::Ceil2d => (dx * dx + dy * dy).sqrt().ceil(),
        WeightType::Att => {
            let r = ((dx * dx + dy * dy) / 10.0).sqrt();
            let t = nint(r);
            if t < r {
                t + 1.0
            } else {
                t
            }
        }
        WeightType::Geo => {
            const PI: f64 = 3.141592;
            const RRR: f64 = 6378.388;
            let to_rad = |v: f64| {
                let deg = v.trunc();
                let min = v - deg;
                PI * (deg + 5.0 * min / 3.0) / 180.0
            };
            let (lat_i, lon_i) = (to_rad(a.0), to_rad(a.1));
            let (lat_j, lon_j) = (to_rad(b.0), to_rad(b.1));
            let q1 = (lon_i - lon_j).cos();
            let q2 = (lat_i - lat_j).cos();
            let q3 = (lat_i + lat_j).cos();
            (RRR * (0.5 * ((1.0 + q1) * q2 - (1.0 - q1) * q3)).acos() + 1.0).trunc()
        }
        WeightType::Explicit => unreachable!("explicit weights have no coordinates"),
    }
}

/// Writes the matrix back as an `EXPLICIT`/`FULL_MATRIX` TSPLIB document.
pub fn write_tsplib(raw: &RawTsplib) -> String {
    let n = raw.dimension;
    let mut out = String::new();
    let _ = writeln!(out, "NAME: {}", raw.name);
    let _ = writeln!(out, "TYPE: TSP");
    let _ = writeln!(out, "DIMENSION: {n}");
    let _ = writeln!(out, "EDGE_WEIGHT_TYPE: EXPLICIT");
    let _ = writeln!(out, "EDGE_WEIGHT_FORMAT: FULL_MATRIX");
    let _ = writeln!(out, "EDGE_WEIGHT_SECTION");
    for i in 0..n {
        let row: Vec<String> = (0..n)
            .map(|j| format!("{}", raw.edge_weights.get(i, j)))
            .collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out.push_str("EOF\n");
    out
}
