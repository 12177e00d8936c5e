//! Hand-built source derivations covering every typing rule, used by the
//! typeable-implies-SN suite.

use crate::error::CcvError;
use crate::types::ccv::{Sub, Union};
use crate::types::cderiv::{CcvDerivation as D, Delta, Gamma};

fn gm(pairs: &[(&str, &str)]) -> Gamma {
    pairs.iter().map(|(x, s)| (x.to_string(), Sub::parse(s).expect("type"))).collect()
}

fn dl(pairs: &[(&str, &str)]) -> Delta {
    pairs.iter().map(|(k, t)| (k.to_string(), Union::parse(t).expect("type"))).collect()
}

fn u(s: &str) -> Union {
    Union::parse(s).expect("type")
}

fn var(g: &[(&str, &str)], d: &[(&str, &str)], x: &str) -> Result<D, CcvError> {
    D::var(&gm(g), &dl(d), x)
}

/// `(name, derivation)` pairs; every subject has distinct binders.
pub fn ccv_fixtures() -> Result<Vec<(&'static str, D)>, CcvError> {
    let mut out = Vec::new();

    out.push(("variable", var(&[("x", "a")], &[], "x")?));

    out.push(("identity", D::lam("x", vec![var(&[("x", "a")], &[], "x")?])?));

    let g = [("x", "a -> b"), ("y", "a")];
    out.push(("value application", D::app(var(&g, &[], "x")?, vec![var(&g, &[], "y")?])?));

    let id = D::lam("x", vec![var(&[("y", "a"), ("x", "a")], &[], "x")?])?;
    out.push(("identity redex", D::app(id, vec![var(&[("y", "a")], &[], "y")?])?));

    out.push((
        "trivial let",
        D::let_("x", var(&[("y", "a")], &[], "y")?, vec![var(&[("y", "a"), ("x", "a")], &[], "x")?])?,
    ));

    let x = var(&[("x", "a")], &[("h", "a")], "x")?;
    out.push(("mu jump", D::mu("h", D::jump("h", x)?)?));

    // let x = y z in x w
    let g = [("y", "a -> b -> c"), ("z", "a"), ("w", "b")];
    let yz = D::app(var(&g, &[], "y")?, vec![var(&g, &[], "z")?])?;
    let g2 = [("y", "a -> b -> c"), ("z", "a"), ("w", "b"), ("x", "b -> c")];
    let xw = D::app(var(&g2, &[], "x")?, vec![var(&g2, &[], "w")?])?;
    out.push(("let of an application", D::let_("x", yz, vec![xw])?));

    // μh.[h](λx.μl.[h]x) with x : a ∩ (a→b)
    let s = "a & (a -> b)";
    let t = "(a & (a -> b)) -> b";
    let inner = var(&[("x", s)], &[("h", t), ("l", "b")], "x")?.sub(u(t));
    let lam = D::lam("x", vec![D::mu("l", D::jump("h", inner)?)?])?;
    out.push(("escaping jump under a λ", D::mu("h", D::jump("h", lam)?)?));

    // (λx.x x)(λy.y)
    let s = "((b -> b) -> b -> b) & (b -> b)";
    let g = [("x", s)];
    let f = var(&g, &[], "x")?.sub(u("(b -> b) -> b -> b"));
    let a = var(&g, &[], "x")?.sub(u("b -> b"));
    let self_app = D::lam("x", vec![D::app(f, vec![a])?])?;
    let idy = D::lam("y", vec![var(&[("y", "b -> b")], &[], "y")?, var(&[("y", "b")], &[], "y")?])?;
    out.push(("self application at an intersection", D::app(self_app, vec![idy])?));

    // let x = μk.[k]y in x
    let my = D::mu("k", D::jump("k", var(&[("y", "a")], &[("k", "a")], "y")?)?)?;
    out.push(("let of a μ", D::let_("x", my, vec![var(&[("y", "a"), ("x", "a")], &[], "x")?])?));

    // μh.let x = y in [h]x
    let jx = D::jump("h", var(&[("y", "a"), ("x", "a")], &[("h", "a")], "x")?)?;
    let jl = D::let_("x", var(&[("y", "a")], &[("h", "a")], "y")?, vec![jx])?;
    out.push(("jump-level let", D::mu("h", jl)?));

    // let z = μk.[k]x in z, with k : a | b
    let xk = var(&[("x", "a")], &[("k", "a | b")], "x")?.sub(u("a | b"));
    let mk = D::mu("k", D::jump("k", xk)?)?;
    let za = var(&[("x", "a"), ("z", "a")], &[], "z")?.sub(u("a | b"));
    let zb = var(&[("x", "a"), ("z", "b")], &[], "z")?.sub(u("a | b"));
    out.push(("let over a union", D::let_("z", mk, vec![za, zb])?));

    // (μl.[l]f) y with f : (a→c) ∪ (b→c) after subsumption and y : a ∩ b
    let g = [("f", "a -> c"), ("y", "a & b")];
    let fu = "(a -> c) | (b -> c)";
    let fl = var(&g, &[("l", fu)], "f")?.sub(u(fu));
    let ml = D::mu("l", D::jump("l", fl)?)?;
    let ya = var(&g, &[], "y")?.sub(u("a"));
    let yb = var(&g, &[], "y")?.sub(u("b"));
    out.push(("union-typed function", D::app(ml, vec![ya, yb])?));

    // (μl.[l]f)(μm.[m]y)
    let g = [("f", "a -> b"), ("y", "a")];
    let ml = D::mu("l", D::jump("l", var(&g, &[("l", "a -> b")], "f")?)?)?;
    let mm = D::mu("m", D::jump("m", var(&g, &[("m", "a")], "y")?)?)?;
    out.push(("two computations applied", D::app(ml, vec![mm])?));

    // f (μm.[m]y)
    let mm = D::mu("m", D::jump("m", var(&g, &[("m", "a")], "y")?)?)?;
    out.push(("value applied to a computation", D::app(var(&g, &[], "f")?, vec![mm])?));

    // (λx.x)(μm.[m]y)
    let idx = D::lam("x", vec![var(&[("y", "a"), ("x", "a")], &[], "x")?])?;
    let mm = D::mu("m", D::jump("m", var(&[("y", "a")], &[("m", "a")], "y")?)?)?;
    out.push(("λ applied to a computation", D::app(idx, vec![mm])?));

    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::cderiv::check_ccv;

    #[test]
    fn all_fixtures_check() {
        let fx = ccv_fixtures().unwrap();
        assert!(fx.len() >= 10);
        for (name, d) in &fx {
            if let Err(e) = check_ccv(d) {
                panic!("{name}: {e}");
            }
        }
    }
}
