//! File formats: curve JSON/CSV, frame JSON, similarity JSON, and
//! `example://name?a=..&b=..` references to built-in curves.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::catalog::AnalyticCurve;
use crate::curve::{CurveSamples, Derivatives, ParamKind};
use crate::error::{Error, Result};
use crate::minkowski::MinkowskiVec;

pub const EXAMPLE_SCHEME: &str = "example://";

#[derive(Serialize, Deserialize)]
struct DerivJson {
    d1: Vec<MinkowskiVec>,
    d2: Vec<MinkowskiVec>,
    d3: Vec<MinkowskiVec>,
}

#[derive(Serialize, Deserialize)]
struct CurveJson {
    #[serde(default)]
    param_kind: ParamKind,
    samples: Vec<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    derivatives: Option<DerivJson>,
}

pub fn curve_to_json(c: &CurveSamples) -> serde_json::Value {
    let samples = c
        .params()
        .iter()
        .zip(c.points())
        .map(|(t, p)| [*t, p.x0, p.x1, p.x2])
        .collect();
    let derivatives = c.analytic().map(|d| DerivJson {
        d1: d.d1.clone(),
        d2: d.d2.clone(),
        d3: d.d3.clone(),
    });
    serde_json::to_value(CurveJson {
        param_kind: c.kind(),
        samples,
        derivatives,
    })
    .expect("curve serializes")
}

pub fn curve_from_json(v: serde_json::Value) -> Result<CurveSamples> {
    let cj: CurveJson = serde_json::from_value(v)?;
    let params = cj.samples.iter().map(|s| s[0]).collect();
    let points = cj
        .samples
        .iter()
        .map(|s| MinkowskiVec::new(s[1], s[2], s[3]))
        .collect();
    let d = cj.derivatives.map(|d| Derivatives {
        d1: d.d1,
        d2: d.d2,
        d3: d.d3,
    });
    CurveSamples::build(params, points, d, cj.param_kind)
}

/// Curve CSV with header `t,x0,x1,x2`.
pub fn curve_from_csv<R: std::io::Read>(r: R, kind: ParamKind) -> Result<CurveSamples> {
    let mut rd = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(r);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != ["t", "x0", "x1", "x2"] {
        return Err(Error::InvalidInput(format!(
            "curve CSV header must be t,x0,x1,x2 (got {})",
            header.join(",")
        )));
    }
    let mut params = Vec::new();
    let mut points = Vec::new();
    for rec in rd.deserialize::<[f64; 4]>() {
        let [t, a, b, c] = rec?;
        params.push(t);
        points.push(MinkowskiVec::new(a, b, c));
    }
    CurveSamples::build(params, points, None, kind)
}

pub fn curve_to_csv<W: Write>(c: &CurveSamples, w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["t", "x0", "x1", "x2"])?;
    for (t, p) in c.params().iter().zip(c.points()) {
        wr.write_record([t, &p.x0, &p.x1, &p.x2].map(|x| format!("{x:?}")))?;
    }
    wr.flush()?;
    Ok(())
}

/// Parsed `example://name?key=value&...` reference.
#[derive(Debug, Clone, PartialEq)]
pub struct ExampleRef {
    pub name: String,
    pub constants: BTreeMap<String, f64>,
    pub range: Option<(f64, f64)>,
    pub n: Option<usize>,
}

impl ExampleRef {
    /// Keys `a`, `b` set constants; `lo`, `hi` the σ-range; `n` the node
    /// count.
    pub fn parse(uri: &str) -> Result<Self> {
        let rest = uri
            .strip_prefix(EXAMPLE_SCHEME)
            .ok_or_else(|| Error::InvalidInput(format!("not an example reference: {uri}")))?;
        let (name, query) = rest.split_once('?').unwrap_or((rest, ""));
        let mut constants = BTreeMap::new();
        let (mut lo, mut hi, mut n) = (None, None, None);
        for kv in query.split('&').filter(|s| !s.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("bad query item '{kv}'")))?;
            let num = || {
                v.parse::<f64>()
                    .map_err(|_| Error::InvalidInput(format!("'{k}' is not a number: {v}")))
            };
            match k {
                "lo" => lo = Some(num()?),
                "hi" => hi = Some(num()?),
                "n" => {
                    n = Some(
                        v.parse::<usize>()
                            .map_err(|_| Error::InvalidInput(format!("'n' is not a count: {v}")))?,
                    )
                }
                _ => {
                    constants.insert(k.to_string(), num()?);
                }
            }
        }
        let range = match (lo, hi) {
            (None, None) => None,
            (Some(a), Some(b)) => Some((a, b)),
            _ => return Err(Error::InvalidInput("give both lo and hi".into())),
        };
        Ok(Self {
            name: name.to_string(),
            constants,
            range,
            n,
        })
    }

    /// Samples the curve; without `n`, nodes are spaced by `step`.
    pub fn sample(&self, step: f64) -> Result<CurveSamples> {
        let curve = AnalyticCurve::builtin(&self.name, &self.constants)?;
        let range = self.range.unwrap_or(curve.example.default_range());
        let n = self.n.unwrap_or_else(|| nodes_for(range, step));
        curve.sample(range, n)
    }
}

/// Node count of a grid on `range` with spacing close to `step`.
pub fn nodes_for(range: (f64, f64), step: f64) -> usize {
    ((range.1 - range.0) / step).round().max(1.0) as usize + 1
}

pub fn read_json(path: &Path) -> Result<serde_json::Value> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Reads a curve from an `example://` reference, a `.csv` file or a JSON
/// file.
pub fn read_curve(source: &str, step: f64) -> Result<CurveSamples> {
    if source.starts_with(EXAMPLE_SCHEME) {
        return ExampleRef::parse(source)?.sample(step);
    }
    let path = Path::new(source);
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        curve_from_csv(fs::File::open(path)?, ParamKind::Arbitrary)
    } else {
        curve_from_json(read_json(path)?)
    }
}

/// JSON text with sorted keys and shortest round-trip floats.
pub fn to_json_string<T: Serialize>(v: &T) -> Result<String> {
    // going through Value sorts object keys
    let value = serde_json::to_value(v)?;
    let mut s = serde_json::to_string_pretty(&value)?;
    s.push('\n');
    Ok(s)
}

/// Writes through a temporary sibling file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidInput(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::Io(e)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Example;

    #[test]
    fn example_uri() {
        let r = ExampleRef::parse("example://self_similar_t?a=1&b=0.5").unwrap();
        assert_eq!(r.name, "self_similar_t");
        assert_eq!(r.constants["b"], 0.5);
        let c = r.sample(1e-3).unwrap();
        assert_eq!(c.len(), 2001);
        let r = ExampleRef::parse("example://c_i4?a=2&lo=0&hi=1&n=11").unwrap();
        assert_eq!(r.range, Some((0.0, 1.0)));
        assert_eq!(r.sample(1e-3).unwrap().len(), 11);
        assert!(ExampleRef::parse("example://x?a=z").is_err());
        assert!(matches!(
            ExampleRef::parse("example://nope").unwrap().sample(1e-3),
            Err(Error::UnknownExample(_))
        ));
    }

    #[test]
    fn json_round_trip_keeps_channels() {
        let c = AnalyticCurve::new(Example::OrI, 1.0, 0.0)
            .unwrap()
            .sample((0.0, 1.0), 21)
            .unwrap();
        let back = curve_from_json(curve_to_json(&c)).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn csv_round_trip_and_monotonicity() {
        let c = AnalyticCurve::new(Example::OrII, 2.0, 0.0)
            .unwrap()
            .sample((0.0, 1.0), 21)
            .unwrap()
            .without_analytic();
        let mut buf = Vec::new();
        curve_to_csv(&c, &mut buf).unwrap();
        let back = curve_from_csv(buf.as_slice(), ParamKind::SphericalArcLength).unwrap();
        assert_eq!(back.points(), c.points());
        let bad = "t,x0,x1,x2\n0,0,0,0\n2,1,0,0\n1,2,0,0\n3,0,0,0\n4,0,0,0\n5,0,0,0\n6,0,0,0\n";
        assert!(matches!(
            curve_from_csv(bad.as_bytes(), ParamKind::Arbitrary),
            Err(Error::NonMonotoneGrid(2))
        ));
        assert!(curve_from_csv("a,b\n1,2\n".as_bytes(), ParamKind::Arbitrary).is_err());
    }

    #[test]
    fn sorted_keys() {
        let v = serde_json::json!({"b": 1.0, "a": [0.1, 1e-17]});
        let s = to_json_string(&v).unwrap();
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn atomic_write() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.json");
        write_atomic(&p, b"{}").unwrap();
        write_atomic(&p, b"[1]").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "[1]");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
