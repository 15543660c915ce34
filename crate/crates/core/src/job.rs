//! JSON job files and result documents.
//!
//! Rationals are written as `"a/b"` strings; rational functions of `q` as
//! `{"shift", "num", "den"}` with coefficient lists in increasing degree.
//! Maps are ordered, so identical jobs give byte-identical documents.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cone_h::{basis_from_matrix, input_target, j_function, monomial_basis, Family, PhiPoly};
use crate::cone_k::{eps_basis, input_target_k, j_function_k, k_birkhoff, FamilyK, KNormalization, PsiPoly};
use crate::error::{Error, Result};
use crate::invariants::{nd_invariants, required_caps};
use crate::matrix::Mat;
use crate::ratfn::RatFn;
use crate::rational::{parse, to_canonical, Rat};
use crate::seed::{seed_terms, seed_terms_k, Target};
use crate::series::{Algebra, Coeff, HSeries, KSeries, Series, Truncation};
use crate::smatrix::{commutation_check, quantum_product, reconstruct_s, s_algebra, structural_checks, Direction};

pub const SCHEMA_VERSION: u32 = 1;

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    Seed,
    JFunction,
    SMatrix,
    NdInvariants,
    KJFunction,
    KBirkhoff,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Caps {
    pub q_degree: u32,
    pub def_degree: u32,
    /// `(M, N)`: reported powers `z^{-M}..z^N`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_window: Option<(u32, u32)>,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { q_degree: 3, def_degree: 5, z_window: None }
    }
}

/// `coeff · Π vars · Q^novikov · z^power φ_index` (`q^power` for K-theory).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputTerm {
    #[serde(default)]
    pub power: i32,
    pub index: usize,
    #[serde(default = "one_string")]
    pub coeff: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vars: Vec<String>,
    #[serde(default, skip_serializing_if = "is_zero_u32")]
    pub novikov: u32,
}

fn one_string() -> String {
    "1".into()
}

fn is_zero_u32(x: &u32) -> bool {
    *x == 0
}

fn is_default_norm(n: &KNormalization) -> bool {
    *n == KNormalization::default()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Job {
    #[serde(default = "schema_version")]
    pub schema: u32,
    pub target: Target,
    pub pipeline: Pipeline,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caps: Option<Caps>,
    /// Rows are coordinates of `Φ_α` (`Ψ_α` in K-theory) in the ring basis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub input: Vec<InputTerm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dmax: Option<u32>,
    /// Flat directions of the S-matrix; all by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directions: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "is_default_norm")]
    pub normalization: KNormalization,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}

impl Job {
    pub fn parse(text: &str) -> Result<Job> {
        let job: Job = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        job.validate()?;
        Ok(job)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("job serializes")
    }

    pub fn caps(&self) -> Caps {
        if let Some(c) = &self.caps {
            return c.clone();
        }
        match (self.pipeline, self.dmax) {
            (Pipeline::NdInvariants, Some(d)) => {
                let (q, t) = required_caps(d);
                Caps { q_degree: q, def_degree: t, z_window: None }
            }
            _ => Caps::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(invalid(format!("unsupported schema version {}", self.schema)));
        }
        self.target.validate()?;
        let n = self.target.n();
        let k = self.target.is_k();
        let ok = match self.pipeline {
            Pipeline::Seed => true,
            Pipeline::JFunction | Pipeline::SMatrix => !k,
            Pipeline::NdInvariants => self.target == Target::Projective { n: 3 },
            Pipeline::KJFunction | Pipeline::KBirkhoff => k,
        };
        if !ok {
            return Err(invalid(format!("pipeline {:?} does not apply to target {:?}", self.pipeline, self.target)));
        }
        if self.pipeline == Pipeline::NdInvariants && self.dmax.is_none_or(|d| d == 0) {
            return Err(invalid("nd-invariants needs dmax ≥ 1"));
        }
        if self.caps().q_degree == 0 {
            return Err(invalid("the Novikov cap must be positive"));
        }
        if let Some(b) = &self.basis {
            if b.len() != n || b.iter().any(|r| r.len() != n) {
                return Err(invalid(format!("basis must be a {n}×{n} matrix")));
            }
            for x in b.iter().flatten() {
                parse(x)?;
            }
        }
        for t in &self.input {
            if t.index >= n {
                return Err(invalid(format!("input index {} out of range", t.index)));
            }
            parse(&t.coeff)?;
            if t.vars.is_empty() && t.novikov == 0 {
                return Err(invalid(
                    "input terms need a formal variable or a positive Novikov degree (divergent exponentials otherwise)",
                ));
            }
            if !k && t.power < 0 {
                return Err(invalid("cohomological input is a power series in z"));
            }
        }
        if let Some(d) = &self.directions {
            if d.is_empty() || d.iter().any(|&a| a >= n) {
                return Err(invalid("directions must be non-empty basis indices"));
            }
        }
        Ok(())
    }

    fn input_vars(&self) -> Vec<String> {
        let mut v: Vec<String> = self.input.iter().flat_map(|t| t.vars.iter().cloned()).collect();
        v.sort();
        v.dedup();
        v
    }

    fn algebra(&self, vars: &[String], caps: &Caps) -> Result<Arc<Algebra>> {
        let refs: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
        let mut trunc = Truncation::new(caps.q_degree, caps.def_degree).with_lambda_order(self.target.lambda_order());
        if let Some((m, n)) = caps.z_window {
            trunc = trunc.with_z_window(m, n);
        }
        Algebra::new(Arc::new(self.target.ring()?), &refs, self.target.lambda_mode(), trunc)
    }

    fn basis_rows(&self) -> Result<Option<Vec<Vec<Rat>>>> {
        self.basis.as_ref().map(|b| b.iter().map(|r| r.iter().map(|x| parse(x)).collect()).collect()).transpose()
    }

    fn phis(&self) -> Result<Vec<PhiPoly>> {
        Ok(match self.basis_rows()? {
            Some(m) => basis_from_matrix(&m),
            None => monomial_basis(self.target.n()),
        })
    }

    fn psis(&self) -> Result<Vec<PsiPoly>> {
        Ok(match self.basis_rows()? {
            Some(m) => m.iter().map(|r| PsiPoly::from_eps_coeffs(r)).collect(),
            None => eps_basis(self.target.n()),
        })
    }

    fn input_value<C: Coeff>(&self, alg: &Arc<Algebra>, t: &InputTerm) -> Result<Series<C>> {
        let mut v = Series::<C>::constant(alg, C::from_rat(parse(&t.coeff)?));
        for name in &t.vars {
            v = &v * &Series::var(alg, name)?;
        }
        if t.novikov > 0 {
            v = &v * &Series::novikov(alg, 0, t.novikov as i16);
        }
        Ok(v)
    }
}

/// Result document and whether every embedded check passed.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub document: Value,
    pub ok: bool,
}

pub fn rat_json(x: &Rat) -> Value {
    Value::String(to_canonical(x))
}

pub fn ratfn_json(f: &RatFn) -> Value {
    json!({
        "shift": f.shift(),
        "num": f.numerator().coeffs().iter().map(rat_json).collect::<Vec<_>>(),
        "den": f.denominator().coeffs().iter().map(rat_json).collect::<Vec<_>>(),
    })
}

/// One row per term: Novikov degree, `z` power, `λ` exponents, deformation
/// monomial, basis index, coefficient.
pub fn series_json<C: Coeff>(s: &Series<C>, coeff: impl Fn(&C) -> Value) -> Value {
    Value::Array(
        s.entries()
            .into_iter()
            .map(|e| {
                let mut row = serde_json::Map::new();
                row.insert("q".into(), json!(e.novikov));
                row.insert("z".into(), json!(e.z));
                if !e.lambda.is_empty() {
                    row.insert("lambda".into(), json!(e.lambda));
                }
                let mono: BTreeMap<String, i16> = e.def.into_iter().collect();
                row.insert("t".into(), json!(mono));
                row.insert("index".into(), json!(e.component));
                row.insert("value".into(), coeff(&e.coeff));
                Value::Object(row)
            })
            .collect(),
    )
}

fn h_json(s: &HSeries) -> Value {
    series_json(&s.in_z_window(), rat_json)
}

fn k_json(s: &KSeries) -> Value {
    series_json(s, ratfn_json)
}

fn mat_json<C: Coeff>(m: &Mat<C>, f: impl Fn(&Series<C>) -> Value) -> Value {
    Value::Array(m.rows.iter().map(|r| Value::Array(r.iter().map(&f).collect())).collect())
}

/// Runs a validated job.
pub fn run(job: &Job) -> Result<Outcome> {
    job.validate()?;
    let caps = job.caps();
    let mut ok = true;
    let result = match job.pipeline {
        Pipeline::Seed => {
            let alg = job.algebra(&[], &caps)?;
            if job.target.is_k() {
                let terms = seed_terms_k(&alg)?;
                json!({ "terms": terms.iter().map(k_json).collect::<Vec<_>>() })
            } else {
                let terms = seed_terms(&job.target.seed()?, &alg)?;
                json!({ "terms": terms.iter().map(h_json).collect::<Vec<_>>() })
            }
        }
        Pipeline::JFunction => {
            let alg = job.algebra(&job.input_vars(), &caps)?;
            let family = Family::new(&alg, seed_terms(&job.target.seed()?, &alg)?, job.phis()?)?;
            let t: Vec<(u32, usize, HSeries)> = job
                .input
                .iter()
                .map(|t| Ok((t.power as u32, t.index, job.input_value(&alg, t)?)))
                .collect::<Result<_>>()?;
            let m = crate::cone_h::match_input(&family, &input_target(&alg, &t))?;
            debug_assert_eq!(m.point, j_function(&family, &input_target(&alg, &t))?);
            json!({
                "j": h_json(&m.point),
                "tau": m.tau.iter().map(h_json).collect::<Vec<_>>(),
                "iterations": m.iterations,
            })
        }
        Pipeline::SMatrix => {
            let dirs = job.directions.clone().unwrap_or_else(|| (0..job.target.n()).collect());
            let alg = s_algebra(&job.target, &dirs, caps.q_degree, caps.def_degree)?;
            let alg = match caps.z_window {
                Some((m, n)) => alg.with_truncation(alg.trunc().clone().with_z_window(m, n)),
                None => alg,
            };
            let family = Family::new(&alg, seed_terms(&job.target.seed()?, &alg)?, job.phis()?)?.with_sign(-1);
            let r = reconstruct_s(&family)?;
            let string = dirs.contains(&0).then(|| crate::cone_h::t_name(0));
            let divisor = dirs.contains(&1).then(|| crate::cone_h::t_name(1));
            let mut checks = structural_checks(&r.s, string.as_deref(), divisor.as_deref())?;
            let mut products = Vec::new();
            let mut mats = Vec::new();
            for &a in &dirs {
                let name = crate::cone_h::t_name(a);
                let m = quantum_product(&r.s, &Direction::Var(name.clone()))?;
                products.push(json!({ "direction": name, "matrix": mat_json(&m, h_json) }));
                mats.push(m);
            }
            checks.push(commutation_check(&mats));
            ok &= checks.iter().all(|c| c.passed);
            json!({
                "s": mat_json(&r.s, h_json),
                "mirror": r.mirror.iter().map(h_json).collect::<Vec<_>>(),
                "products": products,
                "checks": checks.iter().map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail })).collect::<Vec<_>>(),
            })
        }
        Pipeline::NdInvariants => {
            let d = job.dmax.expect("validated");
            let rows = nd_invariants(d, caps.q_degree, caps.def_degree)?;
            ok &= rows.iter().all(|r| r.value == r.oracle);
            json!({
                "rows": rows
                    .iter()
                    .map(|r| json!({ "d": r.d, "n": rat_json(&r.value), "oracle": rat_json(&r.oracle), "agree": r.value == r.oracle }))
                    .collect::<Vec<_>>(),
            })
        }
        Pipeline::KJFunction => {
            let alg = job.algebra(&job.input_vars(), &caps)?;
            let family = FamilyK::new(&alg, seed_terms_k(&alg)?, job.psis()?)?;
            let t: Vec<(i32, usize, KSeries)> =
                job.input.iter().map(|t| Ok((t.power, t.index, job.input_value(&alg, t)?))).collect::<Result<_>>()?;
            let m = crate::cone_k::match_input_k(&family, &input_target_k(&alg, &t))?;
            debug_assert_eq!(m.point, j_function_k(&family, &input_target_k(&alg, &t))?);
            json!({
                "j": k_json(&m.point),
                "tau": m.tau.iter().map(k_json).collect::<Vec<_>>(),
                "iterations": m.iterations,
            })
        }
        Pipeline::KBirkhoff => {
            let names: Vec<String> = (0..job.target.n()).map(crate::cone_h::tau_name).collect();
            let alg = job.algebra(&names, &caps)?;
            let family = FamilyK::new(&alg, seed_terms_k(&alg)?, job.psis()?)?;
            let (u, f) = k_birkhoff(&family, job.normalization)?;
            let check = crate::birkhoff::check_factorization(&u, &f);
            ok &= check.is_ok() || job.normalization == KNormalization::AtZero && f.v.mul(&f.w) == u;
            json!({
                "u": mat_json(&u, k_json),
                "v": mat_json(&f.v, k_json),
                "w": mat_json(&f.w, k_json),
                "sweeps": f.sweeps,
            })
        }
    };
    let document = json!({
        "schema": SCHEMA_VERSION,
        "generator": concat!("gwrecon ", env!("CARGO_PKG_VERSION")),
        "job": serde_json::to_value(job).expect("job serializes"),
        "ring": job.target.ring()?.to_json(),
        "result": result,
        "ok": ok,
    });
    Ok(Outcome { document, ok })
}

/// CSV rendering; only N_d tables have one.
pub fn to_csv(job: &Job, doc: &Value) -> Result<String> {
    if job.pipeline != Pipeline::NdInvariants {
        return Err(invalid("csv output is available for nd-invariants only"));
    }
    let mut out = String::from("d,N_d,oracle,agree\n");
    for r in doc["result"]["rows"].as_array().into_iter().flatten() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r["d"],
            r["n"].as_str().unwrap_or_default(),
            r["oracle"].as_str().unwrap_or_default(),
            r["agree"]
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn job(text: &str) -> Job {
        Job::parse(text).unwrap()
    }

    #[test]
    fn cp1_small_j() {
        let j = job(
            r#"{"target": {"type": "projective", "n": 2}, "pipeline": "j-function", "caps": {"q_degree": 2, "def_degree": 0}}"#,
        );
        let out = run(&j).unwrap();
        let rows = out.document["result"]["j"].as_array().unwrap();
        let at = |q: i64, z: i64, i: u64| {
            rows.iter()
                .find(|r| r["q"] == json!([q]) && r["z"] == json!(z) && r["index"] == json!(i))
                .map(|r| r["value"].clone())
        };
        // Q^1: -1/z - 2p/z^2
        assert_eq!(at(1, -1, 0), Some(json!("-1/1")));
        assert_eq!(at(1, -2, 1), Some(json!("-2/1")));
    }

    #[test]
    fn nd_table_and_csv() {
        let j = job(r#"{"target": {"type": "projective", "n": 3}, "pipeline": "nd-invariants", "dmax": 2}"#);
        let out = run(&j).unwrap();
        assert!(out.ok);
        assert_eq!(to_csv(&j, &out.document).unwrap(), "d,N_d,oracle,agree\n1,1/1,1/1,true\n2,1/1,1/1,true\n");
    }

    #[test]
    fn validation_messages() {
        let e = Job::parse(r#"{"target": {"type": "projective", "n": 0}, "pipeline": "seed"}"#).unwrap_err();
        assert!(e.to_string().contains("n must be ≥ 1"), "{e}");
        assert!(matches!(
            Job::parse(r#"{"target": {"type": "projective", "n": 2}, "pipeline": "nd-invariants", "dmax": 2}"#),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            Job::parse(
                r#"{"target": {"type": "projective", "n": 2}, "pipeline": "j-function", "input": [{"index": 1, "coeff": "1"}]}"#
            ),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn round_trip_and_determinism() {
        let text = r#"{"target": {"type": "projective-k", "n": 2}, "pipeline": "k-j-function",
            "caps": {"q_degree": 1, "def_degree": 1}, "input": [{"index": 1, "vars": ["s"]}]}"#;
        let j = job(text);
        assert_eq!(job(&j.to_json()).to_json(), j.to_json());
        let a = serde_json::to_string(&run(&j).unwrap().document).unwrap();
        let b = serde_json::to_string(&run(&j).unwrap().document).unwrap();
        assert_eq!(a, b);
    }
}
