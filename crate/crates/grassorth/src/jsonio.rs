//! JSON encoding for scalars, matrices, chart points, and polynomial map
//! files. Scalars serialize as {"re": string, "im": string} where each part is
//! a decimal or a "p/q" rational, so both backends round-trip losslessly.

use serde_json::{json, Value};
use thiserror::Error;

use crate::grassmannian::{ChartMatrix, GrassPoint};
use crate::maps::{MapsError, MultiPoly, PolyMatrixMap};
use crate::mat::Mat;
use crate::scalar::{ParseScalarError, Scalar};

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error(transparent)]
    Scalar(#[from] ParseScalarError),
    #[error(transparent)]
    Maps(#[from] MapsError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn malformed(what: &str) -> JsonError {
    JsonError::Malformed(what.to_string())
}

pub fn scalar_to_json<S: Scalar>(x: &S) -> Value {
    let (re, im) = x.encode_parts();
    json!({ "re": re, "im": im })
}

pub fn scalar_from_json<S: Scalar>(v: &Value) -> Result<S, JsonError> {
    let re = v
        .get("re")
        .and_then(Value::as_str)
        .ok_or_else(|| malformed("scalar re"))?;
    let im = v
        .get("im")
        .and_then(Value::as_str)
        .ok_or_else(|| malformed("scalar im"))?;
    Ok(S::decode_parts(re, im)?)
}

pub fn scalar_vec_to_json<S: Scalar>(xs: &[S]) -> Value {
    Value::Array(xs.iter().map(scalar_to_json).collect())
}

pub fn mat_to_json<S: Scalar>(m: &Mat<S>) -> Value {
    Value::Array(m.rows_iter().map(scalar_vec_to_json).collect())
}

pub fn mat_from_json<S: Scalar>(v: &Value) -> Result<Mat<S>, JsonError> {
    let rows = v.as_array().ok_or_else(|| malformed("matrix"))?;
    let mut out: Vec<Vec<S>> = Vec::with_capacity(rows.len());
    for row in rows {
        let row = row.as_array().ok_or_else(|| malformed("matrix row"))?;
        out.push(
            row.iter()
                .map(scalar_from_json)
                .collect::<Result<_, _>>()?,
        );
    }
    if out.is_empty() || out.iter().any(|r| r.len() != out[0].len()) {
        return Err(malformed("matrix shape"));
    }
    Ok(Mat::from_rows(out))
}

pub fn chart_to_json<S: Scalar>(z: &ChartMatrix<S>) -> Value {
    json!({ "r": z.r, "s": z.s, "Z": mat_to_json(&z.z) })
}

pub fn chart_from_json<S: Scalar>(v: &Value) -> Result<ChartMatrix<S>, JsonError> {
    let z = mat_from_json(v.get("Z").ok_or_else(|| malformed("chart Z"))?)?;
    Ok(ChartMatrix::new(z))
}

pub fn point_to_json<S: Scalar>(p: &GrassPoint<S>) -> Value {
    let (r, s) = p.shape();
    json!({ "r": r, "s": s, "A": mat_to_json(p.representative()) })
}

pub fn polymap_to_json<S: Scalar>(f: &PolyMatrixMap<S>) -> Value {
    let mut entries = Vec::new();
    for i in 0..f.tgt().0 {
        for j in 0..f.tgt().1 {
            let p = f.entry(i, j);
            if p.is_zero_poly() {
                continue;
            }
            let terms: Vec<Value> = p
                .terms()
                .iter()
                .map(|(exp, coef)| json!({ "exp": exp, "coef": scalar_to_json(coef) }))
                .collect();
            entries.push(json!({ "row": i, "col": j, "terms": terms }));
        }
    }
    json!({
        "src": [f.src().0, f.src().1],
        "tgt": [f.tgt().0, f.tgt().1],
        "entries": entries,
    })
}

fn pair_from_json(v: &Value, what: &str) -> Result<(usize, usize), JsonError> {
    let arr = v.as_array().filter(|a| a.len() == 2);
    let arr = arr.ok_or_else(|| malformed(what))?;
    let a = arr[0].as_u64().ok_or_else(|| malformed(what))? as usize;
    let b = arr[1].as_u64().ok_or_else(|| malformed(what))? as usize;
    Ok((a, b))
}

pub fn polymap_from_json<S: Scalar>(v: &Value) -> Result<PolyMatrixMap<S>, JsonError> {
    let src = pair_from_json(v.get("src").ok_or_else(|| malformed("src"))?, "src")?;
    let tgt = pair_from_json(v.get("tgt").ok_or_else(|| malformed("tgt"))?, "tgt")?;
    let nvars = src.0 * src.1;
    let mut entries: Vec<Vec<MultiPoly<S>>> = (0..tgt.0)
        .map(|_| (0..tgt.1).map(|_| MultiPoly::zero(nvars)).collect())
        .collect();
    let list = v
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| malformed("entries"))?;
    for e in list {
        let row = e
            .get("row")
            .and_then(Value::as_u64)
            .ok_or_else(|| malformed("entry row"))? as usize;
        let col = e
            .get("col")
            .and_then(Value::as_u64)
            .ok_or_else(|| malformed("entry col"))? as usize;
        if row >= tgt.0 || col >= tgt.1 {
            return Err(malformed("entry index out of range"));
        }
        let terms = e
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| malformed("entry terms"))?;
        for t in terms {
            let exp_v = t
                .get("exp")
                .and_then(Value::as_array)
                .ok_or_else(|| malformed("term exp"))?;
            if exp_v.len() != nvars {
                return Err(malformed("term exp length"));
            }
            let exp: Vec<u32> = exp_v
                .iter()
                .map(|x| x.as_u64().map(|n| n as u32))
                .collect::<Option<_>>()
                .ok_or_else(|| malformed("term exp entry"))?;
            let coef = scalar_from_json(t.get("coef").ok_or_else(|| malformed("term coef"))?)?;
            entries[row][col].add_term(exp, coef);
        }
    }
    Ok(PolyMatrixMap::new(src, tgt, entries)?)
}

pub fn polymap_from_str<S: Scalar>(text: &str) -> Result<PolyMatrixMap<S>, JsonError> {
    polymap_from_json(&serde_json::from_str(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{standard_embedding, whitney_map};
    use crate::scalar::GaussianRational;
    use num_complex::Complex64;

    #[test]
    fn scalar_round_trip_both_backends() {
        let c = Complex64::new(0.25, -3.0);
        let back: Complex64 = scalar_from_json(&scalar_to_json(&c)).unwrap();
        assert_eq!(c, back);
        let q = GaussianRational::from_ratio(-7, 3).add(&GaussianRational::i());
        let back: GaussianRational = scalar_from_json(&scalar_to_json(&q)).unwrap();
        assert_eq!(q, back);
    }

    #[test]
    fn mat_round_trip() {
        let m = Mat::<Complex64>::from_ints(vec![vec![1, -2], vec![0, 5]]);
        let back: Mat<Complex64> = mat_from_json(&mat_to_json(&m)).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn polymap_round_trip() {
        for f in [
            standard_embedding::<Complex64>(3, 2, 4).unwrap(),
            whitney_map::<Complex64>(2, 3).unwrap(),
        ] {
            let v = polymap_to_json(&f);
            let back: PolyMatrixMap<Complex64> = polymap_from_json(&v).unwrap();
            assert_eq!(f, back);
        }
        let f = whitney_map::<GaussianRational>(3, 2).unwrap();
        let back: PolyMatrixMap<GaussianRational> =
            polymap_from_json(&polymap_to_json(&f)).unwrap();
        assert_eq!(f, back);
    }

    #[test]
    fn malformed_documents_are_rejected() {
        assert!(polymap_from_str::<Complex64>("{}").is_err());
        assert!(polymap_from_str::<Complex64>("not json").is_err());
        let bad = r#"{"src":[1,2],"tgt":[1,1],"entries":[{"row":5,"col":0,"terms":[]}]}"#;
        assert!(polymap_from_str::<Complex64>(bad).is_err());
    }
}
