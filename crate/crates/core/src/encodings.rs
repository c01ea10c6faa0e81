//! The six polynomial encodings of an algebraic distribution and the
//! substitutions between them. `mz` is the hub: every conversion goes
//! through it.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::bipoly::{BiPoly, PolyJson, Rational, UniPoly};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    /// Stieltjes transform `m(z)`.
    Mz,
    /// Cauchy transform `g(z) = -m(z)`.
    Gz,
    /// R transform `r(g)`.
    Rg,
    /// S transform `s(y)`.
    Sy,
    /// Moment generating function `mu(z)`.
    MuZ,
    /// `eta(z) = (1/z) m(-1/z)`.
    EtaZ,
}

impl Kind {
    pub const ALL: [Kind; 6] = [Kind::Mz, Kind::Gz, Kind::Rg, Kind::Sy, Kind::MuZ, Kind::EtaZ];

    pub fn labels(self) -> (&'static str, &'static str) {
        match self {
            Kind::Mz => ("m", "z"),
            Kind::Gz => ("g", "z"),
            Kind::Rg => ("r", "g"),
            Kind::Sy => ("s", "y"),
            Kind::MuZ => ("mu", "z"),
            Kind::EtaZ => ("eta", "z"),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::Mz => "mz",
            Kind::Gz => "gz",
            Kind::Rg => "rg",
            Kind::Sy => "sy",
            Kind::MuZ => "muz",
            Kind::EtaZ => "etaz",
        }
    }

    fn parse_in(self, text: &str) -> BiPoly {
        let (u, v) = self.labels();
        BiPoly::parse(text, u, v).expect("substitution expression")
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Kind> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidParameter(format!("unknown encoding '{s}' (expected mz, gz, rg, sy, muz or etaz)")))
    }
}

/// A canonical polynomial tagged with the transform it encodes.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodedDistribution {
    kind: Kind,
    poly: BiPoly,
}

impl EncodedDistribution {
    /// Canonicalizes `poly`; its labels must match `kind`.
    pub fn new(kind: Kind, poly: BiPoly) -> Result<Self> {
        let (u, v) = kind.labels();
        if poly.u_label() != u || poly.v_label() != v {
            return Err(Error::LabelMismatch(
                format!("{}({})", poly.u_label(), poly.v_label()),
                format!("{u}({v}) for {kind}"),
            ));
        }
        let poly = poly.canonicalize()?;
        if poly.deg_u().unwrap_or(0) == 0 {
            return Err(Error::Degenerate(format!("{kind} polynomial has no dependence on {u}")));
        }
        Ok(EncodedDistribution { kind, poly })
    }

    pub fn parse(kind: Kind, text: &str) -> Result<Self> {
        let (u, v) = kind.labels();
        Self::new(kind, BiPoly::parse(text, u, v)?)
    }

    pub fn mz(poly: BiPoly) -> Result<Self> {
        Self::new(Kind::Mz, poly)
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn poly(&self) -> &BiPoly {
        &self.poly
    }

    pub fn into_poly(self) -> BiPoly {
        self.poly
    }

    pub fn to_json(&self) -> PolyJson {
        PolyJson::from_poly(&self.poly, Some(self.kind.name()))
    }

    /// Reads the JSON wire format; a missing `kind` is inferred from the labels.
    pub fn from_json(j: &PolyJson) -> Result<Self> {
        let kind = match &j.kind {
            Some(k) => k.parse()?,
            None => Kind::ALL
                .into_iter()
                .find(|k| k.labels() == (j.u.as_str(), j.v.as_str()))
                .ok_or_else(|| Error::Json(format!("cannot infer encoding from labels ({}, {})", j.u, j.v)))?,
        };
        Self::new(kind, j.to_poly()?)
    }

    pub fn equivalent(&self, o: &EncodedDistribution) -> bool {
        self.kind == o.kind && self.poly.equivalent(&o.poly)
    }

    pub fn convert(&self, target: Kind) -> Result<EncodedDistribution> {
        if target == self.kind {
            return Ok(self.clone());
        }
        let hub = self.to_mz()?;
        if target == Kind::Mz {
            return Ok(hub);
        }
        let t = target;
        // (u numerator, u denominator, v numerator, v denominator) in the target variables.
        let (pu, qu, pv, qv, poles): (_, _, _, _, &[&str]) = match t {
            Kind::Gz => ("-g", "1", "z", "1", &[]),
            Kind::Rg => ("-g", "1", "r*g+1", "g", &["g"]),
            Kind::Sy => ("-y*s", "1", "y+1", "s*y", &["s", "y"]),
            Kind::MuZ => ("-z*mu", "1", "1", "z", &["z"]),
            Kind::EtaZ => ("z*eta", "1", "-1", "z", &["z"]),
            Kind::Mz => unreachable!(),
        };
        let poly = hub.poly.relabel(t.labels().0, t.labels().1);
        let raw = poly.substitute_raw(&t.parse_in(pu), &t.parse_in(qu), &t.parse_in(pv), &t.parse_in(qv))?;
        Self::new(t, strip(raw, t, poles)?)
    }

    fn to_mz(&self) -> Result<EncodedDistribution> {
        let mz = |s: &str| Kind::Mz.parse_in(s);
        let (pu, qu, pv, qv, poles): (_, _, _, _, &[&str]) = match self.kind {
            Kind::Mz => return Ok(self.clone()),
            Kind::Gz => ("-m", "1", "z", "1", &[]),
            Kind::Rg => ("z*m+1", "m", "-m", "1", &["m"]),
            Kind::Sy => ("m", "z*m+1", "-z*m-1", "1", &["z*m+1", "m"]),
            Kind::MuZ => ("-z*m", "1", "1", "z", &["z"]),
            Kind::EtaZ => ("-z*m", "1", "-1", "z", &["z"]),
        };
        let poly = self.poly.relabel("m", "z");
        let raw = poly.substitute_raw(&mz(pu), &mz(qu), &mz(pv), &mz(qv))?;
        Self::new(Kind::Mz, strip(raw, Kind::Mz, poles)?)
    }
}

/// Remove the factors introduced by clearing the denominators of a substitution.
fn strip(mut raw: BiPoly, kind: Kind, poles: &[&str]) -> Result<BiPoly> {
    if raw.is_zero() {
        return Err(Error::Degenerate(format!("substitution into {kind} gave the zero polynomial")));
    }
    for p in poles {
        let d = kind.parse_in(p);
        while let Some(q) = raw.div_exact(&d) {
            raw = q;
        }
    }
    Ok(raw)
}

impl fmt::Display for EncodedDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.poly.pretty())
    }
}

/// Semicircle law of variance one: `m^2 + z m + 1`.
pub fn semicircle() -> EncodedDistribution {
    EncodedDistribution::parse(Kind::Mz, "m^2+z*m+1").unwrap()
}

/// Marcenko-Pastur law with ratio `c`: `c z m^2 - (1 - c - z) m + 1`.
pub fn marcenko_pastur(c: &Rational) -> Result<EncodedDistribution> {
    if *c <= Rational::zero() {
        return Err(Error::InvalidParameter(format!("Wishart ratio must be positive, got {c}")));
    }
    let rows = vec![
        UniPoly::one(),
        UniPoly::new(vec![c - Rational::one(), Rational::one()]),
        UniPoly::new(vec![Rational::zero(), c.clone()]),
    ];
    EncodedDistribution::mz(BiPoly::new("m", "z", rows))
}

/// Finitely many atoms `(weight, location)`; weights must be positive and sum to one.
pub fn atomic(atoms: &[(Rational, Rational)]) -> Result<EncodedDistribution> {
    if atoms.is_empty() {
        return Err(Error::InvalidParameter("atomic distribution needs at least one atom".into()));
    }
    let total: Rational = atoms.iter().map(|(p, _)| p.clone()).sum();
    if !total.is_one() {
        return Err(Error::InvalidParameter(format!("atom weights sum to {total}, not 1")));
    }
    for (i, (p, l)) in atoms.iter().enumerate() {
        if *p <= Rational::zero() {
            return Err(Error::InvalidParameter(format!("atom weight {p} is not positive")));
        }
        if atoms[..i].iter().any(|(_, l2)| l2 == l) {
            return Err(Error::InvalidParameter(format!("repeated atom location {l}")));
        }
    }
    // m = sum p_i / (l_i - z)
    let lin = |l: &Rational| UniPoly::new(vec![l.clone(), -Rational::one()]);
    let den = atoms.iter().fold(UniPoly::one(), |acc, (_, l)| &acc * &lin(l));
    let mut num = UniPoly::zero();
    for (i, (p, _)) in atoms.iter().enumerate() {
        let others = atoms
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .fold(UniPoly::one(), |acc, (_, (_, l))| &acc * &lin(l));
        num = &num + &others.scale(p);
    }
    EncodedDistribution::mz(BiPoly::new("m", "z", vec![-num, den]))
}

/// Point mass at one: the identity matrix.
pub fn identity() -> EncodedDistribution {
    point_mass(&Rational::one())
}

pub fn point_mass(l: &Rational) -> EncodedDistribution {
    atomic(&[(Rational::one(), l.clone())]).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipoly::rat;

    fn conv(k: Kind, s: &str, t: Kind) -> EncodedDistribution {
        EncodedDistribution::parse(k, s).unwrap().convert(t).unwrap()
    }

    fn is(d: &EncodedDistribution, s: &str) -> bool {
        let (u, v) = d.kind().labels();
        d.poly().equivalent(&BiPoly::parse(s, u, v).unwrap())
    }

    #[test]
    fn forward_examples() {
        let mp = "2*z*m^2-(1-2-z)*m+1";
        assert!(is(&conv(Kind::Mz, mp, Kind::Rg), "(2*g-1)*r+1"));
        assert!(is(&conv(Kind::Mz, "m^2+m*z+1", Kind::Sy), "s^2*y-1"));
        assert!(is(&conv(Kind::Mz, "m*(2*z^2-2*z)-(1-2*z)", Kind::EtaZ), "(2*z+2)*eta-2-z"));
        assert!(is(&conv(Kind::Mz, "m^2+m*z+1", Kind::MuZ), "mu^2*z^2-mu+1"));
    }

    #[test]
    fn inverse_examples() {
        assert!(is(&conv(Kind::Rg, "r-g", Kind::Mz), "m^2+z*m+1"));
        assert!(is(&conv(Kind::Sy, "(2*y+1)*s-1", Kind::Mz), "2*z*m^2+(1+z)*m+1"));
        let back = conv(Kind::Rg, "(g-1)*r+1", Kind::Mz);
        assert!(is(&back, "z*m^2+z*m+1"));
        assert!(is(&back.convert(Kind::Rg).unwrap(), "(g-1)*r+1"));
    }

    #[test]
    fn generators() {
        assert!(is(&marcenko_pastur(&rat(1, 2)).unwrap(), "1/2*z*m^2-(1/2-z)*m+1"));
        assert!(is(&identity(), "(1-z)*m-1"));
        let a = atomic(&[(rat(1, 2), rat(0, 1)), (rat(1, 2), rat(1, 1))]).unwrap();
        assert!(is(&a, "m*(2*z^2-2*z)-(1-2*z)"));
        assert!(atomic(&[(rat(1, 2), rat(0, 1))]).is_err());
        assert!(marcenko_pastur(&rat(0, 1)).is_err());
    }

    #[test]
    fn degenerate_conversion() {
        // A point mass at zero has no S transform.
        let zero = point_mass(&rat(0, 1));
        assert!(matches!(zero.convert(Kind::Sy), Err(Error::Degenerate(_))));
    }

    #[test]
    fn kind_parsing_and_labels() {
        assert_eq!("EtaZ".parse::<Kind>().unwrap(), Kind::EtaZ);
        assert!("xy".parse::<Kind>().is_err());
        let bad = BiPoly::parse("m+z", "m", "z").unwrap();
        assert!(EncodedDistribution::new(Kind::Rg, bad).is_err());
    }

    #[test]
    fn json_roundtrip_infers_kind() {
        let d = conv(Kind::Mz, "m^2+m*z+1", Kind::Rg);
        let mut j = d.to_json();
        j.kind = None;
        assert_eq!(EncodedDistribution::from_json(&j).unwrap(), d);
    }
}
