//! One handler per subcommand: JSON in, JSON out.

use serde::Deserialize;
use serde_json::{json, Value};

use obslab::chern::{newton_theta, sigma_names, ChernJson, ChernVector};
use obslab::deformation::atiyah::P1Bundle;
use obslab::deformation::cotangent::{kodaira_spencer, ArtinianFamily, SquareZeroExtension};
use obslab::deformation::trace::{super_trace, ChainEndo};
use obslab::derham::{kunneth_check, DeRhamComplex, QuotientRing};
use obslab::divided_powers::ideals::{gamma_p_nilpotence, ideal_generators, pd_square_chain};
use obslab::divided_powers::{PdAlgebra, PdDescriptor};
use obslab::exact::complex::FreeComplex;
use obslab::exact::matrix::Matrix;
use obslab::exact::poly::MultiPoly;
use obslab::exact::polyparse::parse_poly;
use obslab::exact::scalar::{parse_rational, BaseRing, Scalar};
use obslab::gauss_manin::{bloch_obstruction, hodge_type_check, picard_fuchs, FamilyJson, HypersurfaceFamily};
use obslab::hochschild::{
    cy_cohomology_dims, evaluation_matrix, hkr_homology_dims, kunneth_hh, random_left_invertible, semiregularity_injectivity_check,
    GradedAlgebra, HodgeDatum,
};
use obslab::Error;

use crate::limits::Limits;

/// A failed job: exit code 2 for bad input, 3 for an exceeded limit.
#[derive(Debug)]
pub struct JobError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for JobError {
    fn from(e: Error) -> Self {
        JobError { code: if e.is_limit() { 3 } else { 2 }, message: e.to_string() }
    }
}

pub fn invalid(msg: impl Into<String>) -> JobError {
    JobError { code: 2, message: msg.into() }
}

pub type JobResult = Result<Value, JobError>;

fn decode<T: for<'de> Deserialize<'de>>(v: &Value) -> Result<T, JobError> {
    serde_json::from_value(v.clone()).map_err(|e| invalid(format!("input does not match the schema: {e}")))
}

fn require(input: Option<&Value>) -> Result<&Value, JobError> {
    input.ok_or_else(|| invalid("this subcommand needs --input"))
}

/// "QQ", a prime p, or {"p": p, "n": n}.
fn field(v: Option<&Value>) -> Result<BaseRing, JobError> {
    match v {
        None => Ok(BaseRing::Rationals),
        Some(Value::String(s)) if s == "QQ" || s == "Q" => Ok(BaseRing::Rationals),
        Some(Value::Number(n)) => n
            .as_u64()
            .filter(|&p| obslab::exact::scalar::is_prime(p))
            .map(BaseRing::fp)
            .ok_or_else(|| invalid("field must be QQ or a prime")),
        Some(o @ Value::Object(_)) => {
            let spec: obslab::divided_powers::BaseSpec = decode(o)?;
            Ok(spec.ring()?)
        }
        Some(other) => Err(invalid(format!("unrecognized field {other}"))),
    }
}

fn strings(v: Option<&Value>) -> Result<Vec<String>, JobError> {
    match v {
        None => Ok(Vec::new()),
        Some(v) => decode(v),
    }
}

fn polys(src: &[String], names: &[String], ring: BaseRing) -> Result<Vec<MultiPoly>, JobError> {
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    src.iter().map(|s| parse_poly(s, &refs, ring).map_err(JobError::from)).collect()
}

fn scalar(v: &Value, ring: BaseRing) -> Result<Scalar, JobError> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) if n.is_i64() => n.to_string(),
        _ => return Err(invalid(format!("expected an exact number, got {v}"))),
    };
    let q = parse_rational(&text).ok_or_else(|| invalid(format!("not a rational number: {text}")))?;
    ring.embed(&q).ok_or_else(|| invalid(format!("{text} is not defined in {}", ring.label())))
}

fn matrix(v: &Value, rows: usize, cols: usize, ring: BaseRing) -> Result<Matrix<Scalar>, JobError> {
    let raw: Vec<Vec<Value>> = decode(v)?;
    if raw.len() != rows || raw.iter().any(|r| r.len() != cols) {
        return Err(invalid(format!("expected a {rows}×{cols} matrix")));
    }
    let entries = raw.iter().map(|r| r.iter().map(|x| scalar(x, ring)).collect::<Result<Vec<_>, _>>()).collect::<Result<Vec<_>, _>>()?;
    Ok(Matrix::from_rows_with_cols(entries, cols).expect("shape checked"))
}

fn show(s: &Scalar) -> Value {
    Value::String(s.to_string())
}

fn show_series(v: &[Scalar]) -> Value {
    Value::Array(v.iter().map(show).collect())
}

// ---- divided powers ----

fn pd_input(input: &Value, prime: Option<u32>) -> Result<(PdAlgebra, u32), JobError> {
    let desc: PdDescriptor = decode(input)?;
    let a = PdAlgebra::from_descriptor(&desc)?;
    let p = prime
        .or_else(|| input.get("p").and_then(Value::as_u64).map(|p| p as u32))
        .or_else(|| a.base.prime().map(|p| p as u32))
        .ok_or_else(|| invalid("a prime is needed: pass --prime or a base Z/p^n"))?;
    Ok((a, p))
}

fn ideal_label(a: &PdAlgebra, s: &obslab::exact::zpn::Span) -> String {
    let gens = ideal_generators(a, s);
    if gens.is_empty() {
        "0".into()
    } else {
        format!("({})", gens.iter().map(|g| a.format(g)).collect::<Vec<_>>().join(", "))
    }
}

pub fn pd_chain(input: Option<&Value>, prime: Option<u32>) -> JobResult {
    let (a, p) = pd_input(require(input)?, prime)?;
    let chain = pd_square_chain(&a, p)?;
    Ok(json!({
        "prime": p,
        "chain": chain.iter().map(|s| ideal_label(&a, s)).collect::<Vec<_>>(),
        "lengths": chain.iter().map(|s| a.ideal_length(s)).collect::<Vec<_>>(),
    }))
}

pub fn gamma_nilpotent(input: Option<&Value>, prime: Option<u32>) -> JobResult {
    let (a, p) = pd_input(require(input)?, prime)?;
    let r = gamma_p_nilpotence(&a, p)?;
    Ok(json!({
        "prime": p,
        "nilpotent": r.is_nilpotent,
        "steps": r.k,
        "chain": r.chain.iter().map(|s| ideal_label(&a, s)).collect::<Vec<_>>(),
    }))
}

// ---- de Rham ----

pub fn derham(input: Option<&Value>, kunneth: Option<&str>, limits: &Limits) -> JobResult {
    let input = require(input)?;
    let ring = field(input.get("field"))?;
    let vars = strings(input.get("vars"))?;
    let rels = polys(&strings(input.get("relations"))?, &vars, ring)?;
    let b = QuotientRing::new(ring, vars.clone(), rels)?;
    if let Some(var) = kunneth {
        if vars.iter().any(|v| v == var) {
            return Err(invalid(format!("{var} is already a variable")));
        }
        let w = kunneth_check(&b, var)?;
        return Ok(json!({
            "variable": var,
            "forward_well_defined": w.forward_well_defined,
            "backward_well_defined": w.backward_well_defined,
            "back_after_forward": w.back_after_forward,
            "forward_after_back": w.forward_after_back,
            "isomorphism": w.is_isomorphism(),
        }));
    }
    let weights: Vec<u32> = match input.get("weights") {
        Some(w) => decode(w)?,
        None => vec![1; vars.len()],
    };
    let n = vars.len();
    let cx = DeRhamComplex::new(b, weights, n)?;
    let reports = (0..=limits.degree_cap).map(|w| cx.weight_report(w)).collect::<Result<Vec<_>, _>>()?;
    Ok(json!({ "weights": reports }))
}

// ---- Chern ----

pub fn chern(input: Option<&Value>, theta: Option<usize>, limits: &Limits) -> JobResult {
    if let Some(i) = theta {
        if i == 0 {
            return Err(invalid("θ_i needs i ≥ 1"));
        }
        if i as u32 > limits.degree_cap.max(8) * 2 {
            return Err(JobError { code: 3, message: format!("θ_{i} exceeds the degree cap") });
        }
        return Ok(json!({ "theta": i, "polynomial": newton_theta(i).fmt_with(&sigma_names(i)) }));
    }
    let j: ChernJson = decode(require(input)?)?;
    let v = ChernVector::from_json(&j)?;
    let top = v.ring.cap.min(limits.degree_cap) as usize;
    let ch = (0..=top).map(|i| v.chern_character(i).map(|p| v.ring.format(&p))).collect::<Result<Vec<_>, _>>()?;
    Ok(json!({ "rank": v.rank, "chern_character": ch }))
}

// ---- Atiyah classes on the projective line ----

pub fn atiyah(input: Option<&Value>, line: Option<i64>) -> JobResult {
    let (ring, degrees): (BaseRing, Vec<i64>) = match (line, input) {
        (Some(a), _) => (BaseRing::Rationals, vec![a]),
        (None, Some(v)) => (field(v.get("field"))?, decode(v.get("line_degrees").ok_or_else(|| invalid("missing line_degrees"))?)?),
        (None, None) => return Err(invalid("pass --line a or an input with line_degrees")),
    };
    let mut it = degrees.iter();
    let first = *it.next().ok_or_else(|| invalid("line_degrees is empty"))?;
    let bundle = it.fold(P1Bundle::line(ring, first), |acc, &a| acc.direct_sum(&P1Bundle::line(ring, a)));
    let split = bundle.trace_class();
    let ch = (0..=2).map(|i| bundle.chern_via_atiyah(i).map(|c| show(&c))).collect::<Result<Vec<_>, _>>()?;
    Ok(json!({
        "line_degrees": degrees,
        "rank": bundle.rank(),
        "trace_residue": show(&split.residue),
        "degree_from_determinant": bundle.degree_from_determinant(),
        "ch_via_atiyah": ch,
    }))
}

// ---- traces ----

pub fn trace(input: Option<&Value>) -> JobResult {
    let input = require(input)?;
    let ring = field(input.get("field"))?;
    let lo = input.get("lo").and_then(Value::as_i64).unwrap_or(0);
    let ranks: Vec<usize> = decode(input.get("ranks").ok_or_else(|| invalid("missing ranks"))?)?;
    let diffs_raw: Vec<Value> = match input.get("diffs") {
        Some(d) => decode(d)?,
        None => Vec::new(),
    };
    let maps_raw: Vec<Value> = decode(input.get("maps").ok_or_else(|| invalid("missing maps"))?)?;
    if diffs_raw.len() + 1 != ranks.len().max(1) || maps_raw.len() != ranks.len() {
        return Err(invalid("need one map per term and one differential between consecutive terms"));
    }
    let diffs = diffs_raw.iter().enumerate().map(|(k, d)| matrix(d, ranks[k + 1], ranks[k], ring)).collect::<Result<Vec<_>, _>>()?;
    let maps = maps_raw.iter().enumerate().map(|(k, m)| matrix(m, ranks[k], ranks[k], ring)).collect::<Result<Vec<_>, _>>()?;
    let cx = FreeComplex::new(lo, ranks, diffs)?;
    let f = ChainEndo::new(cx, maps)?;
    Ok(json!({ "super_trace": show(&super_trace(&f)) }))
}

// ---- Kodaira–Spencer obstruction of an Artinian family ----

pub fn obstruction(input: Option<&Value>) -> JobResult {
    let input = require(input)?;
    let ring = field(input.get("field"))?;
    let base_vars = strings(input.get("base_vars"))?;
    let fibre_vars = strings(input.get("fibre_vars"))?;
    let big = QuotientRing::new(ring, base_vars.clone(), polys(&strings(input.get("base_relations"))?, &base_vars, ring)?)?;
    let ideal = polys(&strings(input.get("ideal"))?, &base_vars, ring)?;
    let ext = SquareZeroExtension::new(big, ideal)?;
    let mut all = base_vars.clone();
    all.extend(fibre_vars.iter().cloned());
    let weights: Vec<u32> = decode(input.get("weights").ok_or_else(|| invalid("missing weights"))?)?;
    let rels = polys(&strings(input.get("fibre_relations"))?, &all, ring)?;
    let names: Vec<&str> = fibre_vars.iter().map(|s| s.as_str()).collect();
    let fam = ArtinianFamily::new(ext, &names, weights, rels)?;
    let ks = kodaira_spencer(&fam)?;
    Ok(json!({
        "kodaira_spencer_zero": ks.is_zero()?,
        "ext1_dim": ks.ext1_dim()?,
        "restricts_to_projection": ks.recovers_projection()?,
        "dims": {"base": fam.ext.dim_big, "ideal": fam.ext.dim_ideal},
    }))
}

// ---- Gauss–Manin ----

pub struct GmOptions {
    pub picard_fuchs: bool,
    pub lift: bool,
    pub obstruction: Option<usize>,
    pub class: usize,
    pub algebraic: Option<usize>,
    pub max_order: usize,
}

pub fn gm(input: Option<&Value>, opts: &GmOptions, limits: &Limits) -> JobResult {
    let mut desc: FamilyJson = decode(require(input)?)?;
    if let Some(t) = limits.trunc {
        desc.trunc_order = t;
    }
    let fam = HypersurfaceFamily::from_json(&desc)?;
    let m = fam.order;
    let names = &fam.names[1..];
    let basis: Vec<Value> = fam
        .basis
        .iter()
        .map(|(k, mu)| json!({"pole_order": k, "numerator": MultiPoly::monomial(mu.clone(), Scalar::rational(1, 1)).fmt_with(names)}))
        .collect();
    let mut out = json!({
        "ambient_dim": fam.n,
        "degree": fam.degree,
        "trunc_order": m,
        "smoothness_certificate": fam.certificate,
        "pole_dims": fam.pole_dims(),
        "basis": basis,
    });
    let class = |order: usize| -> Result<_, JobError> {
        match opts.algebraic {
            Some(j) => Ok(fam.algebraic_class(j, order)?),
            None if opts.class < fam.basis.len() => Ok(fam.basis_class(opts.class, order)),
            None => Err(invalid(format!("class index {} out of range", opts.class))),
        }
    };
    if opts.picard_fuchs {
        let pf = picard_fuchs(&fam, &class(m)?, opts.max_order)?;
        out["picard_fuchs"] = json!({
            "order": pf.order,
            "precision": pf.precision,
            "series": pf.series.iter().map(|s| show_series(s)).collect::<Vec<_>>(),
            "operator": pf.operator.as_ref().map(|op| op.coeffs.iter().map(|c| show_series(c)).collect::<Vec<_>>()),
        });
    }
    if opts.lift {
        let w = fam.horizontal_lift(&class(1)?, m)?;
        out["horizontal_lift"] = json!({
            "coefficients": w.coeffs.iter().map(|s| show_series(s)).collect::<Vec<_>>(),
            "algebraic": w.algebraic.as_ref().map(|(j, a)| json!({"power": j, "series": show_series(a)})),
        });
    }
    if let Some(i) = opts.obstruction {
        let v0 = class(1)?;
        let rep = bloch_obstruction(&v0, &fam, i, m.max(2))?;
        let hodge = hodge_type_check(&v0, &fam, i, m.max(2))?;
        out["obstruction"] = json!({
            "level": rep.level,
            "order": rep.order,
            "de_rham": rep.dr.iter().map(show).collect::<Vec<_>>(),
            "bloch": rep.bloch.iter().map(show).collect::<Vec<_>>(),
            "vanishes": rep.vanishes,
            "sign_relation": rep.sign_relation,
            "stays_in_filtration": hodge,
        });
    }
    Ok(out)
}

// ---- Hochschild ----

pub fn hkr(input: Option<&Value>, kunneth: bool, injectivity: bool, seed: u64) -> JobResult {
    let h: HodgeDatum = decode(require(input)?)?;
    h.validate()?;
    let hh = hkr_homology_dims(&h);
    let mut out = json!({
        "dim": h.dim,
        "hh_min_degree": hh.min,
        "hh_dims": hh.dims,
        "euler": hh.euler(),
    });
    if kunneth {
        let sq = kunneth_hh(&hh, &hh);
        out["kunneth_square"] = json!({"min_degree": sq.min, "dims": sq.dims, "hh0": sq.get(0)});
    }
    if injectivity {
        use rand::SeedableRng;
        let coh = cy_cohomology_dims(&h)?;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let a = GradedAlgebra::random_unital(BaseRing::Rationals, &coh, &mut rng)?;
        let ev = evaluation_matrix(&a);
        let (phi, l) = random_left_invertible(BaseRing::Rationals, ev.rows() + 2, ev.rows(), &mut rng)?;
        let v = semiregularity_injectivity_check(&a, coh.max(), &phi, &l)?;
        out["injectivity"] = json!({
            "seed": seed,
            "algebra_dim": v.algebra_dim,
            "action_injective": v.action_injective,
            "composite_rank": v.composite_rank,
            "composite_injective": v.composite_injective,
        });
    }
    Ok(out)
}
