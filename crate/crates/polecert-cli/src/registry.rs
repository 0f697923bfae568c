use polecert_core::placement::{
    design_p, design_pd, ControllerDesign, ControllerKind, RootPair, RootTriple,
};
use polecert_core::{Error, Result};

/// A gain-synthesis strategy. Each controller kind registers one scheme;
/// commands look the scheme up by kind and stay ignorant of arity and of
/// the concrete synthesis entry point.
pub trait DesignScheme {
    fn kind(&self) -> ControllerKind;
    fn name(&self) -> &'static str;
    /// Number of prescribed real roots the scheme consumes.
    fn arity(&self) -> usize;
    fn design(&self, nu: f64, mu: f64, roots: &[f64]) -> Result<ControllerDesign>;
}

struct PdScheme;

impl DesignScheme for PdScheme {
    fn kind(&self) -> ControllerKind {
        ControllerKind::Pd
    }
    fn name(&self) -> &'static str {
        "delayed proportional-derivative"
    }
    fn arity(&self) -> usize {
        3
    }
    fn design(&self, nu: f64, mu: f64, roots: &[f64]) -> Result<ControllerDesign> {
        let [s1, s2, s3] = expect_arity::<3>(self, roots)?;
        design_pd(nu, mu, &RootTriple::new(s1, s2, s3)?)
    }
}

struct PScheme;

impl DesignScheme for PScheme {
    fn kind(&self) -> ControllerKind {
        ControllerKind::P
    }
    fn name(&self) -> &'static str {
        "delayed proportional"
    }
    fn arity(&self) -> usize {
        2
    }
    fn design(&self, nu: f64, mu: f64, roots: &[f64]) -> Result<ControllerDesign> {
        let [s1, s2] = expect_arity::<2>(self, roots)?;
        let pair = if s1 == s2 { RootPair::coincident(s1)? } else { RootPair::new(s1, s2)? };
        design_p(nu, mu, &pair)
    }
}

fn expect_arity<const N: usize>(scheme: &dyn DesignScheme, roots: &[f64]) -> Result<[f64; N]> {
    <[f64; N]>::try_from(roots).map_err(|_| {
        Error::InvalidInput(format!(
            "a {} controller places exactly {} real roots, got {}",
            scheme.name(),
            scheme.arity(),
            roots.len()
        ))
    })
}

pub fn registry() -> Vec<Box<dyn DesignScheme>> {
    vec![Box::new(PdScheme), Box::new(PScheme)]
}

pub fn scheme_for(kind: ControllerKind) -> Box<dyn DesignScheme> {
    registry()
        .into_iter()
        .find(|s| s.kind() == kind)
        .expect("every controller kind is registered")
}
