use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::{BiPoly, Rational};
use crate::error::{Error, Result};

/// Wire format: `{"u":"m","v":"z","coeffs":[[["num","den"],...],...]}` with
/// row `j` holding the coefficients of `u^j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyJson {
    pub u: String,
    pub v: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    pub coeffs: Vec<Vec<[String; 2]>>,
}

impl PolyJson {
    pub fn from_poly(p: &BiPoly, kind: Option<&str>) -> Self {
        PolyJson {
            u: p.u_label().to_string(),
            v: p.v_label().to_string(),
            kind: kind.map(str::to_string),
            coeffs: p
                .matrix()
                .into_iter()
                .map(|row| row.iter().map(|c| [c.numer().to_string(), c.denom().to_string()]).collect())
                .collect(),
        }
    }

    pub fn to_poly(&self) -> Result<BiPoly> {
        let mut rows = Vec::with_capacity(self.coeffs.len());
        for row in &self.coeffs {
            let mut r = Vec::with_capacity(row.len());
            for [n, d] in row {
                let n: BigInt = n.trim().parse().map_err(|_| Error::Json(format!("bad integer '{n}'")))?;
                let d: BigInt = d.trim().parse().map_err(|_| Error::Json(format!("bad integer '{d}'")))?;
                if d == BigInt::from(0) {
                    return Err(Error::Json("zero denominator".into()));
                }
                r.push(Rational::new(n, d));
            }
            rows.push(r);
        }
        Ok(BiPoly::from_matrix(&self.u, &self.v, rows))
    }

    pub fn to_string_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let p = BiPoly::parse("-1/3*z*m^2+(2-z)*m+7", "m", "z").unwrap();
        let j = PolyJson::from_poly(&p, Some("mz"));
        let text = j.to_string_pretty();
        let back = PolyJson::parse(&text).unwrap();
        assert_eq!(back.kind.as_deref(), Some("mz"));
        assert_eq!(back.to_poly().unwrap(), p);
    }

    #[test]
    fn layout() {
        let p = BiPoly::parse("z*m+1", "m", "z").unwrap();
        let j = serde_json::to_value(PolyJson::from_poly(&p, None)).unwrap();
        assert_eq!(j["coeffs"][1][1][0], "1");
        assert_eq!(j["coeffs"][0][0][1], "1");
        assert_eq!(j["coeffs"][1][0][0], "0");
    }

    #[test]
    fn rejects_garbage() {
        assert!(PolyJson::parse(r#"{"u":"m","v":"z","coeffs":[[["x","1"]]]}"#).unwrap().to_poly().is_err());
        assert!(PolyJson::parse("{").is_err());
    }
}
