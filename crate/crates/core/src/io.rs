//! JSON formats for matrices, tuples, polynomials, Γ-maps and pencils.
//!
//! Complex numbers are `[re, im]`, matrices are row-major lists of rows.
//! Words are written with 1-based letters (`x = 1`, `y = 2`) while the
//! library indexes variables from 0. Floats round-trip bit-exactly.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::GammaMap;
use crate::ncpoly::{default_names, FreePoly, HermitianTuple, MatrixPoly, Word};
use crate::numerics::{CMatrix, C64};
use crate::pencil::GammaPencil;

pub type ComplexJson = [f64; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatrixJson(pub Vec<Vec<ComplexJson>>);

impl From<&CMatrix> for MatrixJson {
    fn from(m: &CMatrix) -> Self {
        MatrixJson(
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                .collect(),
        )
    }
}

impl TryFrom<&MatrixJson> for CMatrix {
    type Error = Error;

    fn try_from(m: &MatrixJson) -> Result<CMatrix> {
        let rows = m.0.len();
        let cols = m.0.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return Err(Error::Malformed("empty matrix".into()));
        }
        if m.0.iter().any(|r| r.len() != cols) {
            return Err(Error::Malformed("ragged matrix rows".into()));
        }
        Ok(CMatrix::from_fn(rows, cols, |i, j| {
            let [re, im] = m.0[i][j];
            C64::new(re, im)
        }))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleJson {
    pub level: usize,
    pub entries: Vec<MatrixJson>,
}

impl From<&HermitianTuple> for TupleJson {
    fn from(t: &HermitianTuple) -> Self {
        TupleJson {
            level: t.level(),
            entries: t.entries().iter().map(MatrixJson::from).collect(),
        }
    }
}

impl TryFrom<&TupleJson> for HermitianTuple {
    type Error = Error;

    fn try_from(t: &TupleJson) -> Result<HermitianTuple> {
        if t.entries.is_empty() {
            return Err(Error::Malformed("tuple has no entries".into()));
        }
        let entries = t.entries.iter().map(CMatrix::try_from).collect::<Result<Vec<_>>>()?;
        if let Some(m) = entries.iter().find(|m| m.nrows() != t.level || m.ncols() != t.level) {
            return Err(Error::Malformed(format!(
                "tuple declares level {} but has a {}x{} entry",
                t.level,
                m.nrows(),
                m.ncols()
            )));
        }
        HermitianTuple::new(entries)
    }
}

/// A coefficient: a complex scalar or a matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffJson {
    Scalar(ComplexJson),
    Matrix(MatrixJson),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    /// 1-based letters.
    pub word: Vec<usize>,
    pub coeff: CoeffJson,
}

fn word_to_json(w: &Word) -> Vec<usize> {
    w.letters().iter().map(|&j| j + 1).collect()
}

fn word_from_json(letters: &[usize], nvars: usize) -> Result<Word> {
    if let Some(&bad) = letters.iter().find(|&&j| j == 0 || j > nvars) {
        return Err(Error::Malformed(format!("word letter {bad} outside 1..={nvars}")));
    }
    Ok(Word::new(letters.iter().map(|&j| j - 1).collect()))
}

pub fn poly_to_json(p: &FreePoly) -> Vec<TermJson> {
    p.terms()
        .map(|(w, c)| TermJson {
            word: word_to_json(w),
            coeff: CoeffJson::Scalar([c.re, c.im]),
        })
        .collect()
}

pub fn poly_from_json(terms: &[TermJson], nvars: usize) -> Result<FreePoly> {
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        let c = match &t.coeff {
            CoeffJson::Scalar([re, im]) => C64::new(*re, *im),
            CoeffJson::Matrix(_) => return Err(Error::Malformed("scalar polynomial with a matrix coefficient".into())),
        };
        out.push((word_from_json(&t.word, nvars)?, c));
    }
    FreePoly::from_terms(nvars, out)
}

pub fn matrix_poly_to_json(p: &MatrixPoly) -> Vec<TermJson> {
    p.terms()
        .map(|(w, a)| TermJson {
            word: word_to_json(w),
            coeff: CoeffJson::Matrix(a.into()),
        })
        .collect()
}

/// The coefficient shape is read from the first term, so the list must be
/// nonempty.
pub fn matrix_poly_from_json(terms: &[TermJson], nvars: usize) -> Result<MatrixPoly> {
    let mut out = Vec::with_capacity(terms.len());
    for t in terms {
        let a = match &t.coeff {
            CoeffJson::Scalar([re, im]) => CMatrix::from_element(1, 1, C64::new(*re, *im)),
            CoeffJson::Matrix(m) => CMatrix::try_from(m)?,
        };
        out.push((word_from_json(&t.word, nvars)?, a));
    }
    let (rows, cols) = match out.first() {
        Some((_, a)) => (a.nrows(), a.ncols()),
        None => return Err(Error::Malformed("matrix polynomial without terms has no shape".into())),
    };
    MatrixPoly::from_terms(nvars, rows, cols, out)
}

/// A built-in map by name, or the coordinate polynomials inline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GammaJson {
    Named(String),
    Inline(Vec<Vec<TermJson>>),
}

impl From<&GammaMap> for GammaJson {
    fn from(g: &GammaMap) -> Self {
        match g.name() {
            Some(n) => GammaJson::Named(n.to_string()),
            None => GammaJson::Inline(g.coords().iter().map(poly_to_json).collect()),
        }
    }
}

/// `r` is the coordinate count, which fixes `g` for the named map `"x"`.
/// Inline maps take `g` from the largest letter used.
pub fn gamma_from_json(g: &GammaJson, r: usize) -> Result<GammaMap> {
    match g {
        GammaJson::Named(name) => {
            let m = GammaMap::named(name, if name == "x" { r } else { 2 })?;
            if m.r() != r {
                return Err(Error::mismatch("Γ-map coordinate count", m.r(), r));
            }
            Ok(m)
        }
        GammaJson::Inline(coords) => {
            let nvars = coords.iter().flatten().flat_map(|t| t.word.iter().copied()).max().unwrap_or(0);
            if nvars == 0 {
                return Err(Error::Malformed("inline Γ-map uses no variables".into()));
            }
            let polys = coords.iter().map(|c| poly_from_json(c, nvars)).collect::<Result<Vec<_>>>()?;
            let m = GammaMap::new(nvars, polys)?;
            if m.r() != r {
                return Err(Error::mismatch("Γ-map coordinate count", m.r(), r));
            }
            Ok(m)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PencilJson {
    pub gamma: GammaJson,
    pub size: usize,
    pub coeffs: Vec<MatrixJson>,
}

impl From<&GammaPencil> for PencilJson {
    fn from(p: &GammaPencil) -> Self {
        PencilJson {
            gamma: p.gmap().into(),
            size: p.size(),
            coeffs: p.coeffs().iter().map(MatrixJson::from).collect(),
        }
    }
}

impl TryFrom<&PencilJson> for GammaPencil {
    type Error = Error;

    fn try_from(p: &PencilJson) -> Result<GammaPencil> {
        if p.coeffs.is_empty() {
            return Err(Error::Malformed("pencil has no coefficients".into()));
        }
        let gmap = gamma_from_json(&p.gamma, p.coeffs.len() - 1)?;
        let coeffs = p.coeffs.iter().map(CMatrix::try_from).collect::<Result<Vec<_>>>()?;
        if coeffs.iter().any(|a| a.nrows() != p.size || a.ncols() != p.size) {
            return Err(Error::Malformed(format!("pencil declares size {} but a coefficient differs", p.size)));
        }
        GammaPencil::new(gmap, coeffs)
    }
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Malformed(format!("{what}: {e}")))
}

pub fn parse_tuple(text: &str) -> Result<HermitianTuple> {
    HermitianTuple::try_from(&parse::<TupleJson>(text, "tuple")?)
}

/// A nonempty JSON list of tuples of a common width.
pub fn parse_points(text: &str) -> Result<Vec<HermitianTuple>> {
    let raw: Vec<TupleJson> = parse(text, "point list")?;
    if raw.is_empty() {
        return Err(Error::Malformed("point list is empty".into()));
    }
    let pts = raw.iter().map(HermitianTuple::try_from).collect::<Result<Vec<_>>>()?;
    let width = pts[0].width();
    if let Some(p) = pts.iter().find(|p| p.width() != width) {
        return Err(Error::Malformed(format!("point widths differ: {width} and {}", p.width())));
    }
    Ok(pts)
}

pub fn parse_pencil(text: &str) -> Result<GammaPencil> {
    GammaPencil::try_from(&parse::<PencilJson>(text, "pencil")?)
}

pub fn parse_poly(text: &str, nvars: usize) -> Result<FreePoly> {
    poly_from_json(&parse::<Vec<TermJson>>(text, "polynomial")?, nvars)
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Latex,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "latex" => Ok(Format::Latex),
            other => Err(Error::InvalidParameter(format!("unknown format {other:?}; expected json or latex"))),
        }
    }
}

pub fn emit_pencil(p: &GammaPencil, format: Format) -> Result<String> {
    match format {
        Format::Json => to_json(&PencilJson::from(p)),
        Format::Latex => Ok(p.to_latex()),
    }
}

pub fn emit_poly(p: &FreePoly, format: Format) -> Result<String> {
    match format {
        Format::Json => to_json(&poly_to_json(p)),
        Format::Latex => Ok(p.render(&default_names(p.nvars())).replace('*', " ")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::random::{random_hermitian, rng_for};
    use crate::pencil::{degenerate_pencil, tv_pencil, tv_pencil_explicit};
    use proptest::prelude::*;

    #[test]
    fn tuple_format() {
        let t = HermitianTuple::scalars(&[1.5, -0.25]);
        let v: serde_json::Value = serde_json::from_str(&to_json(&TupleJson::from(&t)).unwrap()).unwrap();
        assert_eq!(v, serde_json::json!({"level": 1, "entries": [[[[1.5, 0.0]]], [[[-0.25, 0.0]]]]}));
    }

    #[test]
    fn words_are_one_based() {
        let p = FreePoly::monomial(2, Word::new(vec![0, 1, 1]), C64::new(2.0, 0.0)).unwrap();
        let v = serde_json::to_value(poly_to_json(&p)).unwrap();
        assert_eq!(v, serde_json::json!([{"word": [1, 2, 2], "coeff": [2.0, 0.0]}]));
        assert_eq!(parse_poly(&v.to_string(), 2).unwrap(), p);
        assert!(parse_poly(r#"[{"word": [0], "coeff": [1, 0]}]"#, 2).is_err());
        assert!(parse_poly(r#"[{"word": [3], "coeff": [1, 0]}]"#, 2).is_err());
    }

    #[test]
    fn explicit_pencil_round_trips() {
        for p in [tv_pencil_explicit(3, false).unwrap(), tv_pencil_explicit(4, true).unwrap(), tv_pencil(5).unwrap()] {
            let text = emit_pencil(&p, Format::Json).unwrap();
            assert_eq!(parse_pencil(&text).unwrap(), p);
        }
    }

    #[test]
    fn inline_gamma_round_trips() {
        let q = FreePoly::monomial(2, Word::new(vec![0, 0]), C64::new(1.0, 0.0)).unwrap();
        let g = GammaMap::with_extra(2, vec![q]).unwrap();
        let mut a = CMatrix::zeros(1, 1);
        a[(0, 0)] = C64::new(-1.0, 0.0);
        let p = GammaPencil::new(g, vec![CMatrix::identity(1, 1), CMatrix::zeros(1, 1), CMatrix::zeros(1, 1), a]).unwrap();
        let json = PencilJson::from(&p);
        assert!(matches!(json.gamma, GammaJson::Inline(_)));
        assert_eq!(parse_pencil(&to_json(&json).unwrap()).unwrap(), p);
    }

    #[test]
    fn latex_of_degenerate_pencil_mentions_y_squared() {
        assert!(emit_pencil(&degenerate_pencil(), Format::Latex).unwrap().contains("y^2"));
        assert!("pdf".parse::<Format>().is_err());
    }

    #[test]
    fn malformed_inputs() {
        assert!(parse_points("[]").is_err());
        assert!(parse_points("not json").is_err());
        assert!(parse_tuple(r#"{"level": 2, "entries": [[[[1, 0]]]]}"#).is_err());
        assert!(parse_tuple(r#"{"level": 1, "entries": [[[[0, 1]]]]}"#).is_err());
        assert!(parse_pencil(r#"{"gamma": "y2", "size": 1, "coeffs": [[[[1, 0]]]]}"#).is_err());
        assert!(parse_pencil(r#"{"gamma": "zz", "size": 1, "coeffs": [[[[1, 0]]]]}"#).is_err());
        let mixed = r#"[{"level": 1, "entries": [[[[0, 0]]]]}, {"level": 1, "entries": [[[[0, 0]]], [[[0, 0]]]]}]"#;
        assert!(parse_points(mixed).is_err());
    }

    #[test]
    fn matrix_poly_round_trip() {
        let p = tv_pencil(2).unwrap().to_matrix_poly().unwrap();
        let back = matrix_poly_from_json(&matrix_poly_to_json(&p), 2).unwrap();
        assert_eq!(back, p);
        assert!(matrix_poly_from_json(&[], 2).is_err());
    }

    proptest! {
        #[test]
        fn tuples_round_trip_bit_exactly(seed in 0u64..1000, level in 1usize..4) {
            let mut rng = rng_for(seed, 0);
            let t = HermitianTuple::new(vec![random_hermitian(level, &mut rng), random_hermitian(level, &mut rng)]).unwrap();
            let back = parse_tuple(&to_json(&TupleJson::from(&t)).unwrap()).unwrap();
            prop_assert_eq!(back, t);
        }
    }
}
