//! Instance, tour and trace file formats.
//!
//! Instances are read either as native JSON
//! (`{"name": .., "points": [[x, y], ..]}` or `{"name": .., "matrix": [[..], ..]}`)
//! or as the TSPLIB subset `NAME`, `COMMENT`, `TYPE: TSP`, `DIMENSION`,
//! `EDGE_WEIGHT_TYPE: EUC_2D`, `NODE_COORD_SECTION`, `EOF`. TSPLIB instances
//! carry the rounded `EUC_2D` distance convention; native point instances use
//! exact Euclidean distances unless `"distance": "tsplib-rounded"` is given.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use thiserror::Error;

use crate::heuristic::RunTrace;
use crate::instance::{DistanceConvention, Instance, InstanceError, Point, PointId, Tour};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("TSPLIB line {line}: {msg}")]
    Tsplib { line: usize, msg: String },
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

fn tsplib_err(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Tsplib { line, msg: msg.into() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum NativeBody {
    Points { points: Vec<[f64; 2]> },
    Matrix { matrix: Vec<Vec<f64>> },
}

fn is_exact(c: &DistanceConvention) -> bool {
    *c == DistanceConvention::Exact
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct NativeInstance {
    #[serde(default)]
    name: String,
    #[serde(flatten)]
    body: NativeBody,
    #[serde(default, skip_serializing_if = "is_exact")]
    distance: DistanceConvention,
}

pub fn parse_native(text: &str) -> Result<Instance, FormatError> {
    let doc: NativeInstance = serde_json::from_str(text)?;
    let inst = match doc.body {
        NativeBody::Points { points } => Instance::from_points_with(
            points.into_iter().map(|[x, y]| Point::new(x, y)).collect(),
            doc.distance,
        )?,
        NativeBody::Matrix { matrix } => {
            if doc.distance != DistanceConvention::Exact {
                return Err(FormatError::Unsupported("distance convention on a matrix instance".into()));
            }
            Instance::from_matrix(matrix)?
        }
    };
    Ok(inst.with_name(doc.name))
}

pub fn emit_native(inst: &Instance) -> String {
    let body = match inst.coords() {
        Some(pts) => NativeBody::Points {
            points: pts.iter().map(|p| [p.x, p.y]).collect(),
        },
        None => NativeBody::Matrix { matrix: inst.matrix() },
    };
    let doc = NativeInstance {
        name: inst.name().to_string(),
        body,
        distance: inst.convention(),
    };
    serde_json::to_string_pretty(&doc).expect("instance serializes") + "\n"
}

fn split_keyword(line: &str) -> (String, &str) {
    match line.split_once(':') {
        Some((k, v)) => (k.trim().to_ascii_uppercase(), v.trim()),
        None => (line.trim().to_ascii_uppercase(), ""),
    }
}

/// Parses the `EUC_2D` subset of TSPLIB.
pub fn parse_tsplib(text: &str) -> Result<Instance, FormatError> {
    let mut name = String::new();
    let mut dimension: Option<usize> = None;
    let mut weight_type: Option<String> = None;
    let mut coords: Vec<Option<Point>> = Vec::new();
    let mut in_coords = false;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if in_coords && line.chars().next().is_some_and(|c| c.is_ascii_digit() || c == '-' || c == '+') {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(tsplib_err(lineno, "expected `id x y`"));
            }
            let id: usize = fields[0].parse().map_err(|_| tsplib_err(lineno, "bad node id"))?;
            let x: f64 = fields[1].parse().map_err(|_| tsplib_err(lineno, "bad x coordinate"))?;
            let y: f64 = fields[2].parse().map_err(|_| tsplib_err(lineno, "bad y coordinate"))?;
            if id == 0 || id > coords.len() {
                return Err(tsplib_err(lineno, format!("node id {id} outside 1..={}", coords.len())));
            }
            if coords[id - 1].replace(Point::new(x, y)).is_some() {
                return Err(tsplib_err(lineno, format!("node {id} listed twice")));
            }
            continue;
        }
        in_coords = false;
        let (key, value) = split_keyword(line);
        match key.as_str() {
            "NAME" => name = value.to_string(),
            "COMMENT" => {}
            "TYPE" => {
                if !value.eq_ignore_ascii_case("TSP") {
                    return Err(FormatError::Unsupported(format!("TYPE {value}")));
                }
            }
            "DIMENSION" => {
                let d: usize = value.parse().map_err(|_| tsplib_err(lineno, "bad DIMENSION"))?;
                dimension = Some(d);
            }
            "EDGE_WEIGHT_TYPE" => {
                if !value.eq_ignore_ascii_case("EUC_2D") {
                    return Err(FormatError::Unsupported(format!("EDGE_WEIGHT_TYPE {value}")));
                }
                weight_type = Some(value.to_string());
            }
            "NODE_COORD_SECTION" => {
                let d = dimension.ok_or_else(|| tsplib_err(lineno, "NODE_COORD_SECTION before DIMENSION"))?;
                coords = vec![None; d];
                in_coords = true;
            }
            "EOF" => break,
            other => return Err(FormatError::Unsupported(format!("keyword {other}"))),
        }
    }
    if weight_type.is_none() {
        return Err(tsplib_err(0, "missing EDGE_WEIGHT_TYPE"));
    }
    if dimension.is_none() || coords.is_empty() {
        return Err(tsplib_err(0, "missing DIMENSION or NODE_COORD_SECTION"));
    }
    let points = coords
        .into_iter()
        .enumerate()
        .map(|(i, p)| p.ok_or_else(|| tsplib_err(0, format!("node {} has no coordinates", i + 1))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Instance::from_points_with(points, DistanceConvention::TsplibRounded)?.with_name(name))
}

/// Writes a coordinate instance as TSPLIB `EUC_2D`.
///
/// Reading it back yields rounded integer distances.
pub fn emit_tsplib(inst: &Instance) -> Result<String, FormatError> {
    let pts = inst.require_coords()?;
    let mut s = String::new();
    let name = if inst.name().is_empty() { "unnamed" } else { inst.name() };
    writeln!(s, "NAME : {name}").unwrap();
    writeln!(s, "TYPE : TSP").unwrap();
    writeln!(s, "DIMENSION : {}", pts.len()).unwrap();
    writeln!(s, "EDGE_WEIGHT_TYPE : EUC_2D").unwrap();
    writeln!(s, "NODE_COORD_SECTION").unwrap();
    for (i, p) in pts.iter().enumerate() {
        writeln!(s, "{} {} {}", i + 1, p.x, p.y).unwrap();
    }
    writeln!(s, "EOF").unwrap();
    Ok(s)
}

/// Native JSON if the text is a JSON object, TSPLIB otherwise.
pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    if text.trim_start().starts_with('{') {
        parse_native(text)
    } else {
        parse_tsplib(text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TourFile {
    pub instance_name: String,
    pub order: Vec<PointId>,
    pub length: f64,
}

impl TourFile {
    pub fn tour(&self) -> Tour {
        Tour::new(self.order.clone())
    }
}

pub fn emit_tour_json(tf: &TourFile) -> String {
    serde_json::to_string_pretty(tf).expect("tour serializes") + "\n"
}

/// Writes a TSPLIB `.opt.tour`-style file with 1-based ids.
pub fn emit_tsplib_tour(name: &str, tour: &Tour) -> String {
    let mut s = String::new();
    writeln!(s, "NAME : {name}").unwrap();
    writeln!(s, "TYPE : TOUR").unwrap();
    writeln!(s, "DIMENSION : {}", tour.len()).unwrap();
    writeln!(s, "TOUR_SECTION").unwrap();
    for &p in tour.order() {
        writeln!(s, "{}", p + 1).unwrap();
    }
    writeln!(s, "-1").unwrap();
    writeln!(s, "EOF").unwrap();
    s
}

/// Reads a TSPLIB tour; returns the instance name (from `NAME`, minus any
/// `.opt.tour`/`.tour` suffix) and the 0-based order.
pub fn parse_tsplib_tour(text: &str) -> Result<(String, Tour), FormatError> {
    let mut name = String::new();
    let mut dimension = None;
    let mut order = Vec::new();
    let mut in_section = false;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if in_section {
            for tok in line.split_whitespace() {
                let v: i64 = tok.parse().map_err(|_| tsplib_err(lineno, format!("bad tour entry `{tok}`")))?;
                if v == -1 {
                    in_section = false;
                    break;
                }
                if v < 1 {
                    return Err(tsplib_err(lineno, format!("tour ids are 1-based, got {v}")));
                }
                order.push(v as usize - 1);
            }
            continue;
        }
        let (key, value) = split_keyword(line);
        match key.as_str() {
            "NAME" => {
                name = value
                    .trim_end_matches(".opt.tour")
                    .trim_end_matches(".tour")
                    .to_string()
            }
            "COMMENT" => {}
            "TYPE" => {
                if !value.eq_ignore_ascii_case("TOUR") {
                    return Err(FormatError::Unsupported(format!("TYPE {value}")));
                }
            }
            "DIMENSION" => dimension = Some(value.parse::<usize>().map_err(|_| tsplib_err(lineno, "bad DIMENSION"))?),
            "TOUR_SECTION" => in_section = true,
            "EOF" => break,
            other => return Err(FormatError::Unsupported(format!("keyword {other}"))),
        }
    }
    if let Some(d) = dimension {
        if d != order.len() {
            return Err(tsplib_err(0, format!("DIMENSION {d} but {} tour entries", order.len())));
        }
    }
    Ok((name, Tour::new(order)))
}

/// JSON tour file or TSPLIB tour, by content. Returns the named instance and the order.
pub fn parse_tour(text: &str) -> Result<(String, Tour), FormatError> {
    if text.trim_start().starts_with('{') {
        let tf: TourFile = serde_json::from_str(text)?;
        Ok((tf.instance_name.clone(), tf.tour()))
    } else {
        parse_tsplib_tour(text)
    }
}

pub const TRACE_FORMAT: &str = "ylab-run-trace";
pub const TRACE_VERSION: u32 = 1;

/// Versioned envelope around a [`RunTrace`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDocument {
    pub format: String,
    pub version: u32,
    pub instance_name: String,
    pub n: usize,
    pub trace: RunTrace,
}

impl TraceDocument {
    pub fn new(inst: &Instance, trace: RunTrace) -> Self {
        Self {
            format: TRACE_FORMAT.to_string(),
            version: TRACE_VERSION,
            instance_name: inst.name().to_string(),
            n: inst.len(),
            trace,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        let doc: TraceDocument = serde_json::from_str(text)?;
        if doc.format != TRACE_FORMAT || doc.version != TRACE_VERSION {
            return Err(FormatError::Unsupported(format!("trace {} v{}", doc.format, doc.version)));
        }
        Ok(doc)
    }
}
