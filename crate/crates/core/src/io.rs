//! JSON formats for inputs and reports. Rationals are written as `"p/q"`
//! strings; on input, JSON numbers are accepted as well.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::complement::ComplementMap;
use crate::error::{Error, Result};
use crate::exact::{parse_rational, to_int, IntVec, Matrix, Rational};
use crate::geometry::{Cone, Polytope};
use crate::interpolator::{MuEntry, MuTable, MuValue, Provenance};
use crate::series::{LaurentJson, MultiSeries, TermJson};
use crate::valuations::{IdentityReport, LocalCount};

/// A scalar given either as a JSON number or a `"p/q"` string.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Text(String),
}

impl Scalar {
    pub fn to_rational(&self) -> Result<Rational> {
        match self {
            Scalar::Int(i) => Ok(crate::exact::rat(*i)),
            Scalar::Text(s) => parse_rational(s),
        }
    }
}

fn rat_rows(rows: &[Vec<Scalar>]) -> Result<Vec<Vec<Rational>>> {
    rows.iter()
        .map(|r| r.iter().map(Scalar::to_rational).collect())
        .collect()
}

fn int_rows(rows: &[Vec<Scalar>]) -> Result<Vec<IntVec>> {
    rat_rows(rows)?
        .into_iter()
        .map(|r| {
            r.iter()
                .map(to_int)
                .collect::<Option<IntVec>>()
                .ok_or_else(|| Error::NotIntegral(format!("{:?}", strings(&r))))
        })
        .collect()
}

pub fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(|c| c.to_string()).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolytopeJson {
    pub vertices: Vec<Vec<Scalar>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConeJson {
    pub generators: Vec<Vec<Scalar>>,
    /// Needed only for the zero cone, which has no generators.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ambient: Option<usize>,
}

/// A parsed input file.
#[derive(Clone, Debug)]
pub enum Input {
    Polytope(Polytope),
    Cone(Cone),
}

impl Input {
    pub fn ambient(&self) -> usize {
        match self {
            Input::Polytope(p) => p.ambient(),
            Input::Cone(c) => c.ambient(),
        }
    }
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn parse_polytope(text: &str) -> Result<Polytope> {
    let p: PolytopeJson = serde_json::from_str(text).map_err(parse_err)?;
    Polytope::from_rational(&rat_rows(&p.vertices)?)
}

pub fn parse_cone(text: &str) -> Result<Cone> {
    let c: ConeJson = serde_json::from_str(text).map_err(parse_err)?;
    let gens = int_rows(&c.generators)?;
    let ambient = gens
        .first()
        .map(Vec::len)
        .or(c.ambient)
        .ok_or_else(|| Error::Parse("a cone without generators needs \"ambient\"".into()))?;
    Cone::new(gens, ambient)
}

/// Parses either `{"vertices": ...}` or `{"generators": ...}`.
pub fn parse_input(text: &str) -> Result<Input> {
    let v: Value = serde_json::from_str(text).map_err(parse_err)?;
    if v.get("vertices").is_some() {
        Ok(Input::Polytope(parse_polytope(text)?))
    } else if v.get("generators").is_some() {
        Ok(Input::Cone(parse_cone(text)?))
    } else {
        Err(Error::Parse(
            "expected a \"vertices\" or \"generators\" field".into(),
        ))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RayEntryJson {
    pub ray: Vec<Scalar>,
    pub u: Vec<Scalar>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MapJson {
    InnerProduct { gram: Vec<Vec<Scalar>> },
    Flag { basis: Vec<Vec<Scalar>> },
    RayTable { entries: Vec<RayEntryJson> },
}

pub fn parse_map(text: &str) -> Result<ComplementMap> {
    let m: MapJson = serde_json::from_str(text).map_err(parse_err)?;
    map_from_json(&m)
}

pub fn map_from_json(m: &MapJson) -> Result<ComplementMap> {
    match m {
        MapJson::InnerProduct { gram } => {
            let rows = rat_rows(gram)?;
            let n = rows.len();
            if rows.iter().any(|r| r.len() != n) {
                return Err(Error::InvalidMap("Gram matrix is not square".into()));
            }
            ComplementMap::inner_product(Matrix::from_rows(rows, n))
        }
        MapJson::Flag { basis } => ComplementMap::flag(rat_rows(basis)?),
        MapJson::RayTable { entries } => {
            let mut out = Vec::with_capacity(entries.len());
            for e in entries {
                let ray = int_rows(std::slice::from_ref(&e.ray))?.remove(0);
                let u = rat_rows(std::slice::from_ref(&e.u))?.remove(0);
                out.push((ray, u));
            }
            ComplementMap::ray_table(out)
        }
    }
}

pub fn map_to_json(map: &ComplementMap) -> MapJson {
    let text = |v: &[Rational]| v.iter().map(|c| Scalar::Text(c.to_string())).collect();
    match map {
        ComplementMap::InnerProduct { gram } => MapJson::InnerProduct {
            gram: (0..gram.rows()).map(|r| text(&gram.row(r))).collect(),
        },
        ComplementMap::Flag { basis } => MapJson::Flag {
            basis: basis.iter().map(|b| text(b)).collect(),
        },
        ComplementMap::RayTable { entries } => MapJson::RayTable {
            entries: entries
                .iter()
                .map(|(r, u)| RayEntryJson {
                    ray: r.iter().map(|&x| Scalar::Int(x)).collect(),
                    u: text(u),
                })
                .collect(),
        },
    }
}

/// One row of a serialized table, also used for single-cone output.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct MuRowJson {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub face_vertex_indices: Option<Vec<usize>>,
    pub normal_cone_generators: Vec<IntVec>,
    pub mu_series: Vec<TermJson>,
    pub mu0: String,
    pub provenance: Provenance,
}

pub fn mu_row(face: Option<&[usize]>, mu: &MuValue) -> MuRowJson {
    MuRowJson {
        face_vertex_indices: face.map(<[usize]>::to_vec),
        normal_cone_generators: mu.cone.generators().to_vec(),
        mu_series: mu.series.to_json_terms(),
        mu0: mu.mu0().to_string(),
        provenance: mu.provenance,
    }
}

pub fn mu_table_json(table: &MuTable) -> Vec<MuRowJson> {
    table
        .entries
        .iter()
        .map(|e| mu_row(Some(&e.face_vertices), &e.mu))
        .collect()
}

/// Reads a table written by [`mu_table_json`] back against its polytope.
pub fn parse_mu_table(text: &str, p: &Polytope, degree: u32, map_id: &str) -> Result<MuTable> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum TableInput {
        Rows(Vec<MuRowJson>),
        Wrapped { faces: Vec<MuRowJson> },
    }
    let rows = match serde_json::from_str(text).map_err(parse_err)? {
        TableInput::Rows(r) | TableInput::Wrapped { faces: r } => r,
    };
    if rows.len() != p.faces().len() {
        return Err(Error::DimensionMismatch(format!(
            "table has {} rows for {} faces",
            rows.len(),
            p.faces().len()
        )));
    }
    let mut entries = Vec::with_capacity(rows.len());
    for (i, (row, face)) in rows.iter().zip(p.faces()).enumerate() {
        if let Some(fv) = &row.face_vertex_indices {
            if *fv != face.vertices {
                return Err(Error::Parse(format!(
                    "row {i} is for face {fv:?} but face {i} is {:?}",
                    face.vertices
                )));
            }
        }
        let cone = p.normal_cone(face);
        let series = MultiSeries::from_json_terms(p.ambient(), degree, &row.mu_series)?;
        entries.push(MuEntry {
            face_index: i,
            face_vertices: face.vertices.clone(),
            face_dim: face.dim,
            mu: MuValue {
                cone,
                map_id: map_id.to_string(),
                order: degree,
                series,
                provenance: row.provenance,
            },
        });
    }
    Ok(MuTable {
        order: degree,
        map_id: map_id.to_string(),
        entries,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CountTermJson {
    pub face_vertex_indices: Vec<usize>,
    pub mu0: String,
    pub volume: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CountJson {
    pub count: String,
    pub brute_force: usize,
    #[serde(rename = "match")]
    pub matches: bool,
    pub map: String,
    pub breakdown: Vec<CountTermJson>,
}

pub fn count_json(c: &LocalCount, brute_force: usize, map_id: &str) -> CountJson {
    CountJson {
        count: c.count.to_string(),
        brute_force,
        matches: c.count == crate::exact::rat(brute_force as i64),
        map: map_id.to_string(),
        breakdown: c
            .terms
            .iter()
            .map(|t| CountTermJson {
                face_vertex_indices: t.face_vertices.clone(),
                mu0: t.mu0.to_string(),
                volume: t.volume.to_string(),
            })
            .collect(),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ReportJson {
    pub polytope_id: String,
    pub map: String,
    pub pass: bool,
    pub seed: Option<u64>,
    pub direction_attempts: u32,
    pub y0: Vec<String>,
    pub degree: u32,
    pub order: i64,
    pub max_comparable_order: i64,
    pub left: LaurentJson,
    pub right: LaurentJson,
    pub residual: LaurentJson,
    pub failing_orders: Vec<i64>,
}

pub fn report_json(r: &IdentityReport) -> ReportJson {
    ReportJson {
        polytope_id: r.polytope_id.clone(),
        map: r.map_id.clone(),
        pass: r.pass(),
        seed: r.direction.seed,
        direction_attempts: r.direction.attempts,
        y0: strings(&r.direction.y0),
        degree: r.degree,
        order: r.order,
        max_comparable_order: r.max_comparable_order,
        left: r.left.to_json(),
        right: r.right.to_json(),
        residual: r.residual.to_json(),
        failing_orders: r.failing_orders(),
    }
}

pub fn to_pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable report");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, ratio};

    #[test]
    fn polytope_and_cone_inputs() {
        let p = parse_polytope(r#"{"vertices": [[0, 0], ["2", 0], [0, "2/1"]]}"#).unwrap();
        assert_eq!(p.vertices(), &[vec![0, 0], vec![2, 0], vec![0, 2]]);
        assert!(matches!(
            parse_polytope(r#"{"vertices": [["1/2"], [1]]}"#),
            Err(Error::NotIntegral(_))
        ));
        let c = parse_cone(r#"{"generators": [[2, 4]]}"#).unwrap();
        assert_eq!(c.generators(), &[vec![1, 2]]);
        let z = parse_cone(r#"{"generators": [], "ambient": 3}"#).unwrap();
        assert!(z.is_zero());
        assert!(parse_cone(r#"{"generators": []}"#).is_err());
        assert!(matches!(parse_input("{}"), Err(Error::Parse(_))));
        assert!(matches!(parse_input("not json"), Err(Error::Parse(_))));
    }

    #[test]
    fn map_round_trip() {
        let texts = [
            r#"{"type": "inner_product", "gram": [[2, 1], [1, "3/2"]]}"#,
            r#"{"type": "flag", "basis": [[1, "1/3"], [0, 1]]}"#,
            r#"{"type": "ray_table", "entries": [{"ray": [1, 0], "u": [1, -1]}, {"ray": [0, 1], "u": [0, 1]}]}"#,
        ];
        for t in texts {
            let m = parse_map(t).unwrap();
            let again = map_from_json(&map_to_json(&m)).unwrap();
            assert_eq!(m, again);
        }
        let m = parse_map(texts[0]).unwrap();
        let ComplementMap::InnerProduct { gram } = m else {
            panic!()
        };
        assert_eq!(gram.get(1, 1), &ratio(3, 2));
    }

    #[test]
    fn table_round_trip() {
        let p = parse_polytope(r#"{"vertices": [[0, 0], [1, 0], [0, 1]]}"#).unwrap();
        let map = ComplementMap::standard_inner_product(2);
        let t = crate::interpolator::mu_table(&p, &map, 3, false).unwrap();
        let text = to_pretty(&mu_table_json(&t));
        let back = parse_mu_table(&text, &p, 3, &map.id()).unwrap();
        assert_eq!(back, t);
        assert_eq!(t.entries[0].mu.mu0(), ratio(1, 4));
        assert_eq!(t.entries.last().unwrap().mu.mu0(), rat(1));
    }
}
