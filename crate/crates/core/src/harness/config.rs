use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::contact::{ConformalFactor, ModelKind};
use crate::contact::FactorSpec;
use crate::error::{Error, Result};
use crate::jerison_lee::family_scale;
use crate::yamabe::{OptimizerConfig, QuadratureRule, RuleKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Transform,
    JerisonLee,
    Appendix,
    Yamabe,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Transform => "transform",
            Suite::JerisonLee => "jerison-lee",
            Suite::Appendix => "appendix",
            Suite::Yamabe => "yamabe",
            Suite::All => "all",
        }
    }

    /// Smallest theta jet order the suite's checks can run with.
    pub fn min_jet_order(self) -> usize {
        match self {
            Suite::Yamabe => 3,
            _ => 4,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    #[default]
    Json,
    CsvSummary,
}

/// Per-family tolerances. `--tol` replaces all of them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Transformation laws against direct recomputation.
    pub law: f64,
    /// Engine self-consistency identities.
    pub engine: f64,
    /// Sphere Ricci calibration.
    pub curvature: f64,
    /// Divergence identity and everything derived from it.
    pub identity: f64,
    /// Scalar curvature and Einstein hypotheses of the pair.
    pub hypothesis: f64,
    /// Quadrature of the divergence side, relative to the integral of its modulus.
    pub divergence: f64,
    /// Adapted-metric formulas against the Christoffel oracle.
    pub appendix: f64,
    /// Yamabe quotients, relative.
    pub yamabe: f64,
    /// Volumes, relative.
    pub volume: f64,
    /// Negative part of the relative Sobolev gap.
    pub sobolev: f64,
    /// Two-path volume density, relative.
    pub density: f64,
    /// Change of the volume under refinement, relative.
    pub refinement: f64,
    /// Minimizer value above the sharp constant, relative.
    pub minimizer: f64,
    /// Family fit residual of the minimizer.
    pub fit: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            law: 1e-8,
            engine: 1e-8,
            curvature: 1e-8,
            identity: 1e-7,
            hypothesis: 1e-8,
            divergence: 1e-6,
            appendix: 1e-7,
            yamabe: 1e-5,
            volume: 1e-6,
            sobolev: 1e-6,
            density: 1e-8,
            refinement: 1e-7,
            minimizer: 1e-3,
            fit: 1e-2,
        }
    }
}

impl Tolerances {
    pub fn uniform(tol: f64) -> Self {
        Tolerances {
            law: tol,
            engine: tol,
            curvature: tol,
            identity: tol,
            hypothesis: tol,
            divergence: tol,
            appendix: tol,
            yamabe: tol,
            volume: tol,
            sobolev: tol,
            density: tol,
            refinement: tol,
            minimizer: tol,
            fit: tol,
        }
    }

    fn all(&self) -> [f64; 14] {
        [
            self.law,
            self.engine,
            self.curvature,
            self.identity,
            self.hypothesis,
            self.divergence,
            self.appendix,
            self.yamabe,
            self.volume,
            self.sobolev,
            self.density,
            self.refinement,
            self.minimizer,
            self.fit,
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelKind,
    pub m: usize,
    pub factor: FactorSpec,
    pub jet_order: usize,
    pub points: usize,
    pub seed: u64,
    pub suite: Suite,
    pub tolerances: Tolerances,
    /// `None` picks a rule by dimension.
    pub quadrature: Option<RuleKind>,
    /// Degree of the positive-function basis used by the minimizer.
    pub basis_degree: usize,
    pub optimizer: OptimizerConfig,
    pub out: Option<PathBuf>,
    pub format: ReportFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: ModelKind::Sphere,
            m: 1,
            factor: FactorSpec::one(),
            jet_order: 4,
            points: 20,
            seed: 1,
            suite: Suite::All,
            tolerances: Tolerances::default(),
            quadrature: None,
            basis_degree: 4,
            optimizer: OptimizerConfig::default(),
            out: None,
            format: ReportFormat::Json,
        }
    }
}

pub const MAX_JET_ORDER: usize = 8;

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.m) {
            return Err(Error::Config(format!("m must be 1, 2 or 3, got {}", self.m)));
        }
        let needed = self.suite.min_jet_order();
        if self.jet_order < needed {
            return Err(Error::Config(format!(
                "jet order {} is below the {} the {} suite needs",
                self.jet_order,
                needed,
                self.suite.name()
            )));
        }
        if self.jet_order > MAX_JET_ORDER {
            return Err(Error::Config(format!("jet order above {MAX_JET_ORDER} is not supported")));
        }
        if self.points == 0 {
            return Err(Error::Config("point count must be positive".into()));
        }
        if self.tolerances.all().iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
            return Err(Error::Config("tolerances must be positive and finite".into()));
        }
        if self.suite == Suite::Yamabe && self.model != ModelKind::Sphere {
            return Err(Error::Config("the yamabe suite needs the sphere model".into()));
        }
        if self.basis_degree == 0 {
            return Err(Error::Config("basis degree must be at least 1".into()));
        }
        check_factor(&self.factor, self.m)?;
        ConformalFactor::new(self.factor.clone())?;
        self.optimizer.validate()?;
        self.rule()?;
        Ok(())
    }

    /// The configured quadrature rule, or the default for `m`.
    pub fn rule(&self) -> Result<QuadratureRule> {
        match &self.quadrature {
            Some(RuleKind::Product { radial, angular }) => QuadratureRule::product(self.m, *radial, *angular),
            Some(RuleKind::MonteCarlo { samples, seed }) => QuadratureRule::monte_carlo(self.m, *samples, *seed),
            None => default_rule(self.m),
        }
    }
}

/// Full-resolution rule for `m = 1`, coarser product rules above.
pub fn default_rule(m: usize) -> Result<QuadratureRule> {
    match m {
        1 => QuadratureRule::standard(1),
        2 => QuadratureRule::product(2, 4, 8),
        3 => QuadratureRule::product(3, 2, 6),
        _ => Err(Error::Config(format!("m must be 1, 2 or 3, got {m}"))),
    }
}

fn check_factor(f: &FactorSpec, m: usize) -> Result<()> {
    match f {
        FactorSpec::JlFamily { c, t, xi } => {
            if xi.len() != m + 1 {
                return Err(Error::Config(format!("xi needs {} complex entries, got {}", m + 1, xi.len())));
            }
            let norm: f64 = xi.iter().map(|p| p[0] * p[0] + p[1] * p[1]).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-9 {
                return Err(Error::Config(format!("xi must be a unit vector, |xi| = {norm}")));
            }
            if !(*c > 0.0) || !(*t >= 0.0) {
                return Err(Error::Config("family needs c > 0 and t >= 0".into()));
            }
            Ok(())
        }
        FactorSpec::Product { factors } => factors.iter().try_for_each(|g| check_factor(g, m)),
        FactorSpec::Power { base, .. } => check_factor(base, m),
        _ => Ok(()),
    }
}

/// Parses the command-line factor shorthand.
///
/// Accepted forms: `one`, `constant:V`, `random-trig:SEED[:AMPLITUDE]`,
/// `jl-family:T[:C]` (with `xi` the first basis vector and `C` defaulting to
/// the normalizing scale), `expr:EXPRESSION`, or a JSON descriptor.
pub fn parse_factor(text: &str, m: usize) -> Result<FactorSpec> {
    let text = text.trim();
    if text.starts_with('{') {
        return serde_json::from_str(text).map_err(|e| Error::Config(format!("factor: {e}")));
    }
    let (head, rest) = match text.split_once(':') {
        Some((h, r)) => (h, Some(r)),
        None => (text, None),
    };
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| Error::Config(format!("factor: bad number '{s}'")));
    match (head, rest) {
        ("one", None) => Ok(FactorSpec::one()),
        ("constant", Some(v)) => Ok(FactorSpec::Constant { value: num(v)? }),
        ("random-trig", Some(r)) => {
            let mut parts = r.split(':');
            let seed = parts
                .next()
                .unwrap_or_default()
                .trim()
                .parse::<u64>()
                .map_err(|_| Error::Config(format!("factor: bad seed in '{text}'")))?;
            match parts.next() {
                None => Ok(FactorSpec::random_trig(seed)),
                Some(a) => Ok(FactorSpec::RandomTrig { seed, amplitude: num(a)?, modes: 4 }),
            }
        }
        ("jl-family", Some(r)) => {
            let mut parts = r.split(':');
            let t = num(parts.next().unwrap_or_default())?;
            let mut xi = vec![Complex64::new(0.0, 0.0); m + 1];
            xi[0] = Complex64::new(1.0, 0.0);
            let c = match parts.next() {
                Some(c) => num(c)?,
                None => family_scale(m, t, &xi)?,
            };
            Ok(FactorSpec::jl_family(c, t, &xi))
        }
        ("expr", Some(e)) => Ok(FactorSpec::Expression { expr: e.to_string() }),
        _ => Err(Error::Config(format!("unrecognized factor '{text}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn toml_round_trip() {
        let c = RunConfig {
            factor: FactorSpec::jl_family(1.0, 0.4, &[Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)]),
            quadrature: Some(RuleKind::Product { radial: 4, angular: 8 }),
            ..RunConfig::default()
        };
        let back = RunConfig::from_toml(&c.to_toml().unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn rejects_bad_values() {
        let bad = [
            RunConfig { m: 4, ..Default::default() },
            RunConfig { jet_order: 3, ..Default::default() },
            RunConfig { points: 0, ..Default::default() },
            RunConfig { model: ModelKind::Heisenberg, suite: Suite::Yamabe, ..Default::default() },
            RunConfig { factor: parse_factor("jl-family:0.3", 2).unwrap(), ..Default::default() },
        ];
        for c in bad {
            assert!(matches!(c.validate(), Err(Error::Config(_))), "{c:?}");
        }
        assert!(RunConfig::from_toml("bogus = 1").is_err());
    }

    #[test]
    fn factor_shorthand() {
        assert_eq!(parse_factor("one", 1).unwrap(), FactorSpec::one());
        assert_eq!(parse_factor("random-trig:5", 1).unwrap(), FactorSpec::random_trig(5));
        assert!(matches!(parse_factor("jl-family:0.5", 2).unwrap(), FactorSpec::JlFamily { ref xi, .. } if xi.len() == 3));
        assert!(matches!(parse_factor(r#"{"kind":"constant","value":2.0}"#, 1).unwrap(), FactorSpec::Constant { value } if value == 2.0));
        assert!(parse_factor("nope", 1).is_err());
    }
}
