//! File formats: complex matrices as JSON or CSV, the symmetry-data document,
//! sample archives and run manifests.
//!
//! JSON matrices are row-major arrays of `[re, im]` pairs, nested by row; a
//! flat array of `n * n` pairs is accepted on input. CSV matrices have the
//! header `i,j,re,im` and one entry per line. Doubles are printed with the
//! shortest representation that round-trips.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::classifier::{SymmetryClass, SymmetryData};
use crate::ensembles::{EnsembleSpec, Hamiltonian};
use crate::error::{Error, Result};
use crate::linalg::{c64, AntiUnitaryOp, ComplexMatrix};

pub const SCHEMA_VERSION: &str = "1.0";
pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const CSV_HEADER: &str = "i,j,re,im";
/// Comment line carrying the schema version in CSV files.
pub const CSV_SCHEMA_LINE: &str = "# schema_version 1.0";

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

pub fn matrix_to_json(m: &ComplexMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect()))
            .collect(),
    )
}

fn entry(v: &Value) -> Result<num_complex::Complex64> {
    let pair = v.as_array().filter(|p| p.len() == 2).ok_or_else(|| schema("matrix entries must be [re, im] pairs"))?;
    let re = pair[0].as_f64().ok_or_else(|| schema("matrix entry is not a number"))?;
    let im = pair[1].as_f64().ok_or_else(|| schema("matrix entry is not a number"))?;
    Ok(c64(re, im))
}

/// Parses a square matrix, nested by row or flat row-major.
pub fn matrix_from_json(v: &Value) -> Result<ComplexMatrix> {
    let outer = v.as_array().ok_or_else(|| schema("matrix must be an array"))?;
    if outer.is_empty() {
        return Err(schema("matrix is empty"));
    }
    let nested = outer[0].as_array().is_some_and(|r| r.first().is_some_and(Value::is_array));
    let entries: Vec<num_complex::Complex64> = if nested {
        let n = outer.len();
        let mut out = Vec::with_capacity(n * n);
        for row in outer {
            let row = row.as_array().ok_or_else(|| schema("matrix rows must be arrays"))?;
            if row.len() != n {
                return Err(schema(format!("matrix must be square: row of length {} in {n} rows", row.len())));
            }
            for e in row {
                out.push(entry(e)?);
            }
        }
        out
    } else {
        outer.iter().map(entry).collect::<Result<_>>()?
    };
    let n = (entries.len() as f64).sqrt().round() as usize;
    if n * n != entries.len() {
        return Err(schema(format!("{} entries do not form a square matrix", entries.len())));
    }
    Ok(ComplexMatrix::from_row_slice(n, n, &entries))
}

fn op_to_json(op: &Option<AntiUnitaryOp>) -> Value {
    match op {
        Some(op) => json!({ "w": matrix_to_json(op.linear_part()), "present": true }),
        None => json!({ "w": null, "present": false }),
    }
}

fn op_from_json(v: Option<&Value>, name: &str) -> Result<Option<AntiUnitaryOp>> {
    let Some(v) = v.filter(|v| !v.is_null()) else { return Ok(None) };
    let obj = v.as_object().ok_or_else(|| schema(format!("\"{name}\" must be an object")))?;
    let present = match obj.get("present") {
        None => true,
        Some(p) => p.as_bool().ok_or_else(|| schema(format!("\"{name}.present\" must be a boolean")))?,
    };
    if !present {
        return Ok(None);
    }
    let w = matrix_from_json(obj.get("w").ok_or_else(|| schema(format!("\"{name}.w\" is missing")))?)?;
    AntiUnitaryOp::new(w).map(Some).map_err(|e| schema(format!("\"{name}\": {e}")))
}

pub fn symmetry_data_to_json(data: &SymmetryData) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "dim": data.dim,
        "g0_generators": data.g0_generators.iter().map(matrix_to_json).collect::<Vec<_>>(),
        "t": op_to_json(&data.t_op),
        "c": op_to_json(&data.c_op),
        "chirality": data.chirality.as_ref().map(matrix_to_json),
        "nambu": data.nambu,
    })
}

fn check_version(v: &Value) -> Result<()> {
    match v.get("schema_version") {
        None => Ok(()),
        Some(Value::String(s)) if s.split('.').next() == SCHEMA_VERSION.split('.').next() => Ok(()),
        Some(other) => Err(schema(format!("unsupported schema_version {other}"))),
    }
}

pub fn symmetry_data_from_json(v: &Value) -> Result<SymmetryData> {
    check_version(v)?;
    let obj = v.as_object().ok_or_else(|| schema("document must be an object"))?;
    let dim = obj.get("dim").and_then(Value::as_u64).ok_or_else(|| schema("\"dim\" must be a positive integer"))? as usize;
    let generators = match obj.get("g0_generators") {
        None | Some(Value::Null) => Vec::new(),
        Some(Value::Array(gs)) => gs.iter().map(matrix_from_json).collect::<Result<_>>()?,
        Some(_) => return Err(schema("\"g0_generators\" must be an array")),
    };
    let chirality = match obj.get("chirality") {
        None | Some(Value::Null) => None,
        Some(m) => Some(matrix_from_json(m)?),
    };
    let nambu = match obj.get("nambu") {
        None => false,
        Some(b) => b.as_bool().ok_or_else(|| schema("\"nambu\" must be a boolean"))?,
    };
    Ok(SymmetryData {
        dim,
        g0_generators: generators,
        t_op: op_from_json(obj.get("t"), "t")?,
        c_op: op_from_json(obj.get("c"), "c")?,
        chirality,
        nambu,
    })
}

pub fn parse_symmetry_data(text: &str) -> Result<SymmetryData> {
    let v: Value = serde_json::from_str(text).map_err(|e| schema(format!("malformed JSON: {e}")))?;
    symmetry_data_from_json(&v)
}

pub fn matrix_to_csv(m: &ComplexMatrix) -> String {
    let mut out = format!("{CSV_SCHEMA_LINE}\n{CSV_HEADER}\n");
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            out.push_str(&format!("{i},{j},{:?},{:?}\n", z.re, z.im));
        }
    }
    out
}

pub fn matrix_from_csv(text: &str) -> Result<ComplexMatrix> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    if lines.next().map(str::trim) != Some(CSV_HEADER) {
        return Err(schema(format!("CSV header must be \"{CSV_HEADER}\"")));
    }
    let mut entries = Vec::new();
    for (k, line) in lines.enumerate() {
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != 4 {
            return Err(schema(format!("CSV line {} has {} fields", k + 2, fields.len())));
        }
        let idx = |s: &str| s.parse::<usize>().map_err(|_| schema(format!("bad index {s:?} on CSV line {}", k + 2)));
        let num = |s: &str| s.parse::<f64>().map_err(|_| schema(format!("bad number {s:?} on CSV line {}", k + 2)));
        entries.push((idx(fields[0])?, idx(fields[1])?, c64(num(fields[2])?, num(fields[3])?)));
    }
    let n = entries.iter().map(|(i, j, _)| i.max(j) + 1).max().ok_or_else(|| schema("CSV matrix has no entries"))?;
    let mut m = ComplexMatrix::zeros(n, n);
    let mut seen = vec![false; n * n];
    for (i, j, z) in entries {
        if std::mem::replace(&mut seen[i * n + j], true) {
            return Err(schema(format!("duplicate CSV entry ({i}, {j})")));
        }
        m[(i, j)] = z;
    }
    if seen.iter().any(|s| !s) {
        return Err(schema("CSV matrix is missing entries"));
    }
    Ok(m)
}

/// Sampled matrices tagged with their RNG streams.
#[derive(Clone, Debug)]
pub struct Archive {
    pub class: SymmetryClass,
    pub spec: Option<EnsembleSpec>,
    pub seed: Option<u64>,
    pub stream_ids: Vec<u64>,
    pub matrices: Vec<ComplexMatrix>,
}

impl Archive {
    pub fn from_samples(spec: EnsembleSpec, seed: u64, samples: &[Hamiltonian]) -> Self {
        Archive {
            class: spec.class,
            spec: Some(spec),
            seed: Some(seed),
            stream_ids: (0..samples.len() as u64).collect(),
            matrices: samples.iter().map(|h| h.matrix.clone()).collect(),
        }
    }
}

/// JSON archive when the path ends in `.json`, otherwise a directory of CSV files.
pub fn is_json_path(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn header_json(archive: &Archive) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "class": archive.class,
        "spec": archive.spec,
        "seed": archive.seed,
        "stream_ids": archive.stream_ids,
    })
}

fn csv_name(stream_id: u64) -> String {
    format!("matrix_{stream_id:06}.csv")
}

/// Writes the archive; the returned paths are the data files in stream order.
pub fn write_archive(path: &Path, archive: &Archive) -> Result<Vec<PathBuf>> {
    if is_json_path(path) {
        let mut doc = header_json(archive);
        doc["matrices"] = Value::Array(archive.matrices.iter().map(matrix_to_json).collect());
        fs::write(path, serde_json::to_string(&doc).expect("serializable") + "\n")?;
        return Ok(vec![path.to_path_buf()]);
    }
    fs::create_dir_all(path)?;
    fs::write(path.join("archive.json"), serde_json::to_string_pretty(&header_json(archive)).expect("serializable") + "\n")?;
    let mut files = Vec::with_capacity(archive.matrices.len());
    for (id, m) in archive.stream_ids.iter().zip(&archive.matrices) {
        let file = path.join(csv_name(*id));
        fs::write(&file, matrix_to_csv(m))?;
        files.push(file);
    }
    Ok(files)
}

/// Class, spec, seed and stream ids.
type ArchiveHeader = (SymmetryClass, Option<EnsembleSpec>, Option<u64>, Vec<u64>);

fn archive_header(doc: &Value) -> Result<ArchiveHeader> {
    check_version(doc)?;
    let class = serde_json::from_value(doc.get("class").cloned().unwrap_or(Value::Null))
        .map_err(|e| schema(format!("archive class: {e}")))?;
    let spec = match doc.get("spec") {
        None | Some(Value::Null) => None,
        Some(s) => Some(serde_json::from_value(s.clone()).map_err(|e| schema(format!("archive spec: {e}")))?),
    };
    let seed = doc.get("seed").and_then(Value::as_u64);
    let ids = match doc.get("stream_ids") {
        None | Some(Value::Null) => Vec::new(),
        Some(v) => serde_json::from_value(v.clone()).map_err(|e| schema(format!("archive stream_ids: {e}")))?,
    };
    Ok((class, spec, seed, ids))
}

pub fn read_archive(path: &Path) -> Result<Archive> {
    if is_json_path(path) {
        let text = fs::read_to_string(path)?;
        let doc: Value = serde_json::from_str(&text).map_err(|e| schema(format!("malformed JSON: {e}")))?;
        let (class, spec, seed, mut stream_ids) = archive_header(&doc)?;
        let matrices: Vec<ComplexMatrix> = doc
            .get("matrices")
            .and_then(Value::as_array)
            .ok_or_else(|| schema("archive has no \"matrices\" array"))?
            .iter()
            .map(matrix_from_json)
            .collect::<Result<_>>()?;
        if stream_ids.is_empty() {
            stream_ids = (0..matrices.len() as u64).collect();
        }
        return Ok(Archive { class, spec, seed, stream_ids, matrices });
    }
    let text = fs::read_to_string(path.join("archive.json"))?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| schema(format!("malformed JSON: {e}")))?;
    let (class, spec, seed, stream_ids) = archive_header(&doc)?;
    let matrices = stream_ids
        .iter()
        .map(|id| matrix_from_csv(&fs::read_to_string(path.join(csv_name(*id)))?))
        .collect::<Result<_>>()?;
    Ok(Archive { class, spec, seed, stream_ids, matrices })
}

/// Sidecar manifest location: `<output>.manifest.json` for files,
/// `<output>/manifest.json` for directories.
pub fn manifest_path(output: &Path) -> PathBuf {
    if output.is_dir() {
        output.join("manifest.json")
    } else {
        let mut name = output.as_os_str().to_owned();
        name.push(".manifest.json");
        PathBuf::from(name)
    }
}

/// Record of a run: exact config, seed, toolkit version, streams and time.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: String,
    pub toolkit_version: String,
    pub command: String,
    pub config: Value,
    pub seed: Option<u64>,
    pub stream_ids: Vec<u64>,
    pub rng: String,
    pub threads: usize,
    pub unix_time: u64,
}

pub fn write_manifest(output: &Path, manifest: &Manifest) -> Result<PathBuf> {
    let path = manifest_path(output);
    fs::write(&path, serde_json::to_string_pretty(manifest).expect("serializable") + "\n")?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::sample_campaign;
    use crate::linalg::{i_sigma_y, identity, kron, pauli_z, random_hermitian, RngStream};
    use proptest::prelude::*;

    #[test]
    fn symmetry_data_round_trip() {
        let data = SymmetryData::new(4)
            .with_generators(vec![kron(&pauli_z(), &identity(2))])
            .with_t(AntiUnitaryOp::new(kron(&i_sigma_y(), &identity(2))).unwrap())
            .with_nambu(false);
        let text = serde_json::to_string(&symmetry_data_to_json(&data)).unwrap();
        let back = parse_symmetry_data(&text).unwrap();
        assert_eq!(back.dim, 4);
        assert_eq!(back.g0_generators, data.g0_generators);
        assert_eq!(back.t_op.unwrap().linear_part(), data.t_op.unwrap().linear_part());
        assert!(back.c_op.is_none() && back.chirality.is_none());
    }

    #[test]
    fn schema_violations() {
        for bad in [
            "{",
            "[]",
            r#"{"dim": -1}"#,
            r#"{"dim": 2, "g0_generators": [[[1, 0], [0, 0]]]}"#,
            r#"{"dim": 2, "t": {"w": [[[2, 0], [0, 0]], [[0, 0], [1, 0]]], "present": true}}"#,
            r#"{"dim": 2, "schema_version": "2.0"}"#,
        ] {
            assert!(matches!(parse_symmetry_data(bad), Err(Error::Schema(_))), "{bad}");
        }
        let flat = r#"{"dim": 2, "g0_generators": [[[1, 0], [0, 0], [0, 0], [-1, 0]]], "t": {"w": null, "present": false}}"#;
        let data = parse_symmetry_data(flat).unwrap();
        assert_eq!(data.g0_generators[0], pauli_z());
        assert!(data.t_op.is_none());
    }

    #[test]
    fn csv_rejects_malformed_input() {
        assert!(matrix_from_csv("a,b\n").is_err());
        assert!(matrix_from_csv("i,j,re,im\n0,0,1,0\n1,1,1,0\n").is_err());
        assert!(matrix_from_csv("i,j,re,im\n0,0,x,0\n").is_err());
    }

    #[test]
    fn archives_round_trip_in_both_formats() {
        let dir = tempfile::tempdir().unwrap();
        let spec = EnsembleSpec::new(SymmetryClass::C, 4);
        let archive = Archive::from_samples(spec, 9, &sample_campaign(&spec, 9, 3).unwrap());
        for path in [dir.path().join("a.json"), dir.path().join("csv")] {
            write_archive(&path, &archive).unwrap();
            let back = read_archive(&path).unwrap();
            assert_eq!(back.matrices, archive.matrices);
            assert_eq!(back.stream_ids, vec![0, 1, 2]);
            assert_eq!(back.class, SymmetryClass::C);
            assert_eq!(back.spec, Some(spec));
        }
        assert!(manifest_path(&dir.path().join("csv")).ends_with("csv/manifest.json"));
        assert!(manifest_path(&dir.path().join("a.json")).ends_with("a.json.manifest.json"));
    }

    fn arb_double() -> impl Strategy<Value = f64> {
        prop_oneof![any::<f64>().prop_filter("finite", |x| x.is_finite()), -1e3..1e3f64, Just(-0.0), Just(5e-324)]
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_bit_exact(entries in proptest::collection::vec((arb_double(), arb_double()), 9)) {
            let m = ComplexMatrix::from_fn(3, 3, |i, j| c64(entries[3 * i + j].0, entries[3 * i + j].1));
            let back = matrix_from_csv(&matrix_to_csv(&m)).unwrap();
            for (a, b) in m.iter().zip(back.iter()) {
                prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
                prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
            }
        }

        #[test]
        fn json_round_trip_is_bit_exact(seed in any::<u64>(), n in 1usize..6) {
            let m = random_hermitian(&mut RngStream::new(seed, 0), n);
            let text = serde_json::to_string(&matrix_to_json(&m)).unwrap();
            let back = matrix_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
            prop_assert_eq!(back, m);
        }
    }
}
