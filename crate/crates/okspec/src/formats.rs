//! Input formats: Gram pairs, ultrametric norm trees, value tables and
//! sampled weights.

use std::path::Path;
use std::str::FromStr;

use num_rational::{BigRational, Rational64};
use okspec_core::hermitian::{HermitianForm, HermitianPair, ScalarKind};
use okspec_core::linalg::{CMat, C64};
use okspec_core::okounkov::{SemigroupSample, ValueTable};
use okspec_core::series::{chart_point, Variety};
use okspec_core::ultra::{
    degree_ultra, slopes_ultra, to_log, truncate_ultra, DiagonalNorm, Exponent, Mat, PAdic, Poly, RatFunc, TAdic,
    UltraNormExpr, ValuedField,
};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::config::Complex;

/// Two Gram matrices given by rows.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GramPairFile {
    pub phi: Vec<Vec<Complex>>,
    pub psi: Vec<Vec<Complex>>,
}

fn matrix(rows: &[Vec<Complex>]) -> Result<CMat, String> {
    let r = rows.len();
    if r == 0 || rows.iter().any(|row| row.len() != r) {
        return Err("Gram matrices must be square and non-empty".into());
    }
    Ok(CMat::from_fn(r, r, |i, j| rows[i][j].value()))
}

impl GramPairFile {
    pub fn pair(&self) -> Result<HermitianPair, String> {
        let (a, b) = (matrix(&self.phi)?, matrix(&self.psi)?);
        let real = a.iter().chain(b.iter()).all(|z| z.im == 0.0);
        let kind = if real { ScalarKind::Real } else { ScalarKind::Complex };
        let phi = HermitianForm::new(a, kind).map_err(|e| format!("phi: {e}"))?;
        let psi = HermitianForm::new(b, kind).map_err(|e| format!("psi: {e}"))?;
        HermitianPair::new(phi, psi).map_err(|e| e.to_string())
    }
}

pub fn read_gram_pair(text: &str) -> Result<HermitianPair, String> {
    let file: GramPairFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
    file.pair()
}

/// Field of an ultrametric pair: `{"p-adic": p}` or `"t-adic"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldSpec {
    PAdic(u64),
    TAdic,
}

/// Norm tree over a valued field. Field elements are rationals written as
/// strings or integers; over `Q(T)` an element is a coefficient list
/// `[c_0, c_1, ...]` or `{"num": [...], "den": [...]}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum UltraTree {
    /// `‖Σ λ_i b_i‖ = max |λ_i| q^{e_i}`; the basis columns default to the
    /// coordinate basis.
    Diagonal {
        exponents: Vec<Value>,
        #[serde(default)]
        basis: Option<Vec<Vec<Value>>>,
    },
    Scale { norm: Box<UltraTree>, a: Value },
    Max(Box<UltraTree>, Box<UltraTree>),
    /// Subspace spanned by the given columns.
    Restrict { norm: Box<UltraTree>, columns: Vec<Vec<Value>> },
    Quotient { norm: Box<UltraTree>, columns: Vec<Vec<Value>> },
    Dual(Box<UltraTree>),
    Tensor(Box<UltraTree>, Box<UltraTree>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UltraPairFile {
    pub field: FieldSpec,
    pub phi: UltraTree,
    pub psi: UltraTree,
    /// Truncation levels, as exponents.
    #[serde(default)]
    pub a: Vec<Value>,
}

fn scalar_text(v: &Value) -> Result<String, String> {
    match v {
        Value::String(s) => Ok(s.trim().to_string()),
        Value::Number(n) if n.is_i64() => Ok(n.to_string()),
        _ => Err(format!("expected an integer or a rational string, found {v}")),
    }
}

pub fn parse_exponent(v: &Value) -> Result<Exponent, String> {
    let s = scalar_text(v)?;
    Rational64::from_str(&s).map_err(|e| format!("bad exponent {s:?}: {e}"))
}

fn parse_rational(v: &Value) -> Result<BigRational, String> {
    let s = scalar_text(v)?;
    BigRational::from_str(&s).map_err(|e| format!("bad rational {s:?}: {e}"))
}

fn parse_poly(v: &Value) -> Result<Poly, String> {
    match v {
        Value::Array(cs) => Ok(Poly::new(cs.iter().map(parse_rational).collect::<Result<_, _>>()?)),
        _ => Ok(Poly::constant(parse_rational(v)?)),
    }
}

fn parse_ratfunc(v: &Value) -> Result<RatFunc, String> {
    match v {
        Value::Object(m) => {
            let num = parse_poly(m.get("num").ok_or("missing num")?)?;
            let den = m.get("den").map(parse_poly).transpose()?.unwrap_or_else(|| parse_poly(&json!(1)).unwrap());
            RatFunc::new(num, den).ok_or_else(|| "zero denominator".to_string())
        }
        _ => Ok(RatFunc::from_poly(parse_poly(v)?)),
    }
}

fn columns<E: Clone>(cols: &[Vec<Value>], parse: &dyn Fn(&Value) -> Result<E, String>) -> Result<Mat<E>, String> {
    let parsed: Vec<Vec<E>> =
        cols.iter().map(|c| c.iter().map(parse).collect::<Result<Vec<E>, String>>()).collect::<Result<_, _>>()?;
    if parsed.is_empty() {
        return Err("empty column list".into());
    }
    let len = parsed[0].len();
    if parsed.iter().any(|c| c.len() != len) {
        return Err("columns of unequal length".into());
    }
    Ok(Mat::from_columns(&parsed))
}

impl UltraTree {
    pub fn build<F: ValuedField>(
        &self,
        f: &F,
        parse: &dyn Fn(&Value) -> Result<F::Elem, String>,
    ) -> Result<UltraNormExpr<F>, String> {
        Ok(match self {
            UltraTree::Diagonal { exponents, basis } => {
                let exps: Vec<Exponent> = exponents.iter().map(parse_exponent).collect::<Result<_, _>>()?;
                let d = match basis {
                    None => DiagonalNorm::coordinate(f, exps),
                    Some(cols) => DiagonalNorm::new(f, columns(cols, parse)?, exps).map_err(|e| e.to_string())?,
                };
                UltraNormExpr::Diagonal(d)
            }
            UltraTree::Scale { norm, a } => norm.build(f, parse)?.scale(parse_exponent(a)?),
            UltraTree::Max(a, b) => a.build(f, parse)?.max(b.build(f, parse)?),
            UltraTree::Restrict { norm, columns: c } => norm.build(f, parse)?.restrict(columns(c, parse)?),
            UltraTree::Quotient { norm, columns: c } => norm.build(f, parse)?.quotient(columns(c, parse)?),
            UltraTree::Dual(n) => n.build(f, parse)?.dual(),
            UltraTree::Tensor(a, b) => a.build(f, parse)?.tensor(b.build(f, parse)?),
        })
    }
}

fn exponent_json(e: Exponent) -> Value {
    Value::String(e.to_string())
}

/// Failure of [`ultra_report`]: malformed input or a failed computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UltraError {
    Input(String),
    Numerical(String),
}

impl std::fmt::Display for UltraError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            UltraError::Input(m) | UltraError::Numerical(m) => f.write_str(m),
        }
    }
}

fn ultra_report_in<F: ValuedField>(
    f: &F,
    file: &UltraPairFile,
    parse: &dyn Fn(&Value) -> Result<F::Elem, String>,
) -> Result<Value, UltraError> {
    let num = |e: okspec_core::Error| UltraError::Numerical(e.to_string());
    let phi = file.phi.build(f, parse).map_err(UltraError::Input)?;
    let psi = file.psi.build(f, parse).map_err(UltraError::Input)?;
    let levels: Vec<Exponent> = file.a.iter().map(parse_exponent).collect::<Result<_, _>>().map_err(UltraError::Input)?;
    let degree = degree_ultra(f, &phi, &psi).map_err(num)?;
    let slopes = slopes_ultra(f, &phi, &psi, Exponent::new(1, 2)).map_err(num)?;
    let mut truncations = Vec::new();
    for a in levels {
        let t = truncate_ultra(f, &phi, &psi, a).map_err(num)?;
        truncations.push(json!({
            "a": exponent_json(a),
            "degree": exponent_json(t.degree),
            "slope_sum": exponent_json(t.slope_sum),
            "equal": t.degree == t.slope_sum,
        }));
    }
    Ok(json!({
        "log_base": f.log_base(),
        "degree_exponent": exponent_json(degree),
        "degree": to_log(f, degree),
        "slope_exponents": slopes.exponents.iter().map(|&e| exponent_json(e)).collect::<Vec<_>>(),
        "slopes": slopes.profile.slopes(),
        "alpha_exponent": exponent_json(slopes.alpha_exponent),
        "truncations": truncations,
    }))
}

/// Exact degree, slopes, orthogonality exponent and truncation identities
/// of an ultrametric pair.
pub fn ultra_report(text: &str) -> Result<Value, UltraError> {
    let file: UltraPairFile = serde_json::from_str(text).map_err(|e| UltraError::Input(e.to_string()))?;
    match file.field {
        FieldSpec::PAdic(p) => {
            if p < 2 || (2..p).take_while(|d| d * d <= p).any(|d| p % d == 0) {
                return Err(UltraError::Input(format!("{p} is not prime")));
            }
            ultra_report_in(&PAdic::new(p), &file, &parse_rational)
        }
        FieldSpec::TAdic => ultra_report_in(&TAdic, &file, &parse_ratfunc),
    }
}

/// Value table from CSV rows `n, α_1, ..., α_d, value` with a header line.
pub fn read_value_table(text: &str) -> Result<(SemigroupSample, ValueTable), String> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let width = reader.headers().map_err(|e| e.to_string())?.len();
    if !(3..=5).contains(&width) {
        return Err("value table needs columns n, α_1..α_d, value with 1 ≤ d ≤ 3".into());
    }
    let d = width - 2;
    let mut rows: Vec<(usize, Vec<i64>, f64)> = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        let bad = |what: &str| format!("row {}: bad {what}", line + 2);
        let n: usize = rec[0].parse().map_err(|_| bad("level"))?;
        let a: Vec<i64> = (1..=d).map(|k| rec[k].parse().map_err(|_| bad("exponent"))).collect::<Result<_, _>>()?;
        let v: f64 = rec[d + 1].parse().map_err(|_| bad("value"))?;
        rows.push((n, a, v));
    }
    let n_max = rows.iter().map(|r| r.0).max().ok_or("empty value table")?;
    let mut levels: Vec<Vec<(Vec<i64>, f64)>> = vec![Vec::new(); n_max + 1];
    for (n, a, v) in rows {
        levels[n].push((a, v));
    }
    for l in &mut levels {
        l.sort_by(|x, y| x.0.cmp(&y.0));
        if l.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err("repeated exponent within a level".into());
        }
    }
    let sample = SemigroupSample::new(d, levels.iter().map(|l| l.iter().map(|p| p.0.clone()).collect()).collect())
        .map_err(|e| e.to_string())?;
    let table = ValueTable::new(&sample, levels.iter().map(|l| l.iter().map(|p| p.1).collect()).collect())
        .map_err(|e| e.to_string())?;
    Ok((sample, table))
}

/// Weight values `u(x)` on a finite set of points, each given in a standard
/// affine chart.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledWeight {
    pub variety: Variety,
    /// Homogeneous points with the chart coordinate equal to one.
    pub points: Vec<Vec<C64>>,
    pub values: Vec<f64>,
}

/// CSV rows `chart, re_1, im_1, [re_2, im_2,] u` with a header line; on the
/// plane the affine coordinates are the two remaining homogeneous ones in
/// increasing index order.
pub fn read_sampled_weight(path: &Path, variety: Variety) -> Result<SampledWeight, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_sampled_weight(&text, variety)
}

pub fn parse_sampled_weight(text: &str, variety: Variety) -> Result<SampledWeight, String> {
    let d = variety.dim();
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let width = reader.headers().map_err(|e| e.to_string())?.len();
    if width != 2 * d + 2 {
        return Err(format!("sampled weight needs {} columns", 2 * d + 2));
    }
    let (mut points, mut values) = (Vec::new(), Vec::new());
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        let bad = || format!("row {}: malformed entry", line + 2);
        let chart: usize = rec[0].parse().map_err(|_| bad())?;
        if chart >= variety.coords() {
            return Err(format!("row {}: chart {chart} out of range", line + 2));
        }
        let nums: Vec<f64> = (1..width).map(|k| rec[k].parse::<f64>().map_err(|_| bad())).collect::<Result<_, _>>()?;
        if nums.iter().any(|x| !x.is_finite()) {
            return Err(bad());
        }
        let polar: Vec<(f64, f64)> = (0..d)
            .map(|j| {
                let z = C64::new(nums[2 * j], nums[2 * j + 1]);
                (z.norm(), z.arg())
            })
            .collect();
        points.push(chart_point(variety, chart, &polar));
        values.push(nums[2 * d]);
    }
    if points.is_empty() {
        return Err("sampled weight has no rows".into());
    }
    Ok(SampledWeight { variety, points, values })
}
