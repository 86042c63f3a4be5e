//! Frozen example inputs shared by the acceptance suite and the command line.

use serde::Serialize;
use serde_json::{json, Value};

use crate::divided_powers::PdDescriptor;
use crate::error::{Error, Result};
use crate::gauss_manin::FamilyJson;
use crate::hochschild::HodgeDatum;

pub const NAMES: [&str; 6] = ["legendre", "dwork-quartic", "fermat-cubic", "k3-diamond", "pd-samples", "diamonds"];

/// One Artinian divided-power algebra together with its prime.
#[derive(Clone, Debug, Serialize)]
pub struct PdSample {
    pub name: String,
    pub p: u32,
    pub descriptor: PdDescriptor,
}

fn family(n: usize, d: u32, f: &str, order: usize, vars: &[&str]) -> FamilyJson {
    FamilyJson { ambient_dim: n, degree: d, f: f.into(), trunc_order: order, vars: vars.iter().map(|s| s.to_string()).collect() }
}

/// Legendre pencil centred at λ = −1 (t = λ + 1).
pub fn legendre() -> FamilyJson {
    family(2, 3, "y^2*z - x*(x-z)*(x+z-t*z)", 12, &["t", "x", "y", "z"])
}

pub fn dwork_quartic() -> FamilyJson {
    family(3, 4, "x^4 + y^4 + z^4 + w^4 - 4*t*x*y*z*w", 3, &["t", "x", "y", "z", "w"])
}

/// The Hesse pencil through the Fermat cubic at t = 0.
pub fn fermat_cubic() -> FamilyJson {
    family(2, 3, "x^3 + y^3 + z^3 - 3*t*x*y*z", 12, &["t", "x", "y", "z"])
}

pub fn k3_diamond() -> HodgeDatum {
    HodgeDatum { dim: 2, h: vec![vec![1, 0, 1], vec![0, 20, 0], vec![1, 0, 1]], calabi_yau: true, conjugation: true }
}

fn diamond(dim: usize, h: Vec<Vec<u64>>, cy: bool) -> HodgeDatum {
    HodgeDatum { dim, h, calabi_yau: cy, conjugation: true }
}

/// Hodge diamonds: point, ℙ¹, elliptic curve, ℙ², K3, abelian surface, quintic threefold.
pub fn diamonds() -> Vec<(String, HodgeDatum)> {
    vec![
        ("point".into(), diamond(0, vec![vec![1]], true)),
        ("projective-line".into(), diamond(1, vec![vec![1, 0], vec![0, 1]], false)),
        ("elliptic-curve".into(), diamond(1, vec![vec![1, 1], vec![1, 1]], true)),
        ("projective-plane".into(), diamond(2, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]], false)),
        ("k3".into(), k3_diamond()),
        ("abelian-surface".into(), diamond(2, vec![vec![1, 2, 1], vec![2, 4, 2], vec![1, 2, 1]], true)),
        ("quintic-threefold".into(), diamond(3, vec![vec![1, 0, 0, 1], vec![0, 1, 101, 0], vec![0, 101, 1, 0], vec![1, 0, 0, 1]], true)),
    ]
}

fn pd(name: &str, p: u32, v: Value) -> PdSample {
    PdSample { name: name.into(), p, descriptor: serde_json::from_value(v).expect("frozen descriptor") }
}

/// Ten Artinian divided-power algebras on which γ_p is nilpotent.
pub fn pd_samples() -> Vec<PdSample> {
    vec![
        pd("Z/9", 3, json!({"base": {"p": 3, "n": 2}})),
        pd("Z/27", 3, json!({"base": {"p": 3, "n": 3}})),
        pd("Z/25", 5, json!({"base": {"p": 5, "n": 2}})),
        pd("Z/49", 7, json!({"base": {"p": 7, "n": 2}})),
        pd("F2<z>/z^[4]", 2, json!({"base": {"p": 2, "n": 1}, "pd_gens": ["z"], "trunc": {"z": 4}})),
        pd("F3<z>/z^[9]", 3, json!({"base": {"p": 3, "n": 1}, "pd_gens": ["z"], "trunc": {"z": 9}})),
        pd("F5<z>/z^[7]", 5, json!({"base": {"p": 5, "n": 1}, "pd_gens": ["z"], "trunc": {"z": 7}})),
        pd("F7<z>/z^[8]", 7, json!({"base": {"p": 7, "n": 1}, "pd_gens": ["z"], "trunc": {"z": 8}})),
        pd("F2<z,w>/(z^[2],w^[4])", 2, json!({"base": {"p": 2, "n": 1}, "pd_gens": ["z", "w"], "trunc": {"z": 2, "w": 4}})),
        pd("F3<z,w>/(z^[4],w^[3])", 3, json!({"base": {"p": 3, "n": 1}, "pd_gens": ["z", "w"], "trunc": {"z": 4, "w": 3}})),
    ]
}

/// The named corpus as JSON.
pub fn corpus(name: &str) -> Result<Value> {
    let v = match name {
        "legendre" => serde_json::to_value(legendre()),
        "dwork-quartic" => serde_json::to_value(dwork_quartic()),
        "fermat-cubic" => serde_json::to_value(fermat_cubic()),
        "k3-diamond" => serde_json::to_value(k3_diamond()),
        "pd-samples" => serde_json::to_value(pd_samples()),
        "diamonds" => serde_json::to_value(diamonds().into_iter().map(|(n, d)| json!({"name": n, "diamond": d})).collect::<Vec<_>>()),
        _ => return Err(Error::UnknownCorpus(name.into())),
    };
    v.map_err(|e| Error::Invalid(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divided_powers::{pd_square_chain, PdAlgebra};

    #[test]
    fn every_name_materializes() {
        for n in NAMES {
            assert!(corpus(n).is_ok(), "{n}");
        }
        assert!(matches!(corpus("nope"), Err(Error::UnknownCorpus(_))));
    }

    #[test]
    fn diamonds_are_valid() {
        for (name, d) in diamonds() {
            d.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn pd_samples_descend() {
        for s in pd_samples() {
            let a = PdAlgebra::from_descriptor(&s.descriptor).unwrap();
            let chain = pd_square_chain(&a, s.p).unwrap_or_else(|e| panic!("{}: {e}", s.name));
            assert!(chain.len() >= 2, "{}", s.name);
        }
    }
}
