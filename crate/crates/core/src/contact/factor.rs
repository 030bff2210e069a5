//! Positive conformal factors and their descriptors.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::expr::{self, Env, Expr};
use super::model::{ContactModel, ModelKind};
use crate::error::{Error, Result};
use crate::jets::{CJet, Jet};

/// Serializable description of a conformal factor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FactorSpec {
    Constant {
        value: f64,
    },
    /// `c |cosh t + sinh t <zeta, xi>|^-2` on the ambient sphere.
    JlFamily {
        c: f64,
        t: f64,
        /// `xi` as `[re, im]` pairs, unit length.
        xi: Vec<[f64; 2]>,
    },
    /// `exp(amplitude * sum a_k sin(w_k . X + p_k))`, with X the chart
    /// coordinates on the Heisenberg group and the ambient coordinates on the
    /// sphere.
    RandomTrig {
        seed: u64,
        amplitude: f64,
        #[serde(default = "default_modes")]
        modes: usize,
    },
    Expression {
        expr: String,
    },
    Product {
        factors: Vec<FactorSpec>,
    },
    Power {
        base: Box<FactorSpec>,
        exponent: f64,
    },
}

fn default_modes() -> usize {
    4
}

pub const DEFAULT_TRIG_AMPLITUDE: f64 = 0.3;

impl FactorSpec {
    pub fn one() -> Self {
        FactorSpec::Constant { value: 1.0 }
    }

    pub fn random_trig(seed: u64) -> Self {
        FactorSpec::RandomTrig { seed, amplitude: DEFAULT_TRIG_AMPLITUDE, modes: default_modes() }
    }

    /// Family member with `xi` given as complex numbers.
    pub fn jl_family(c: f64, t: f64, xi: &[Complex64]) -> Self {
        FactorSpec::JlFamily { c, t, xi: xi.iter().map(|z| [z.re, z.im]).collect() }
    }

    /// `1 / self`: moves between the two directions `theta~ = phi^-1 theta`
    /// and `theta = phi theta~`.
    pub fn inverse(&self) -> Self {
        self.powf(-1.0)
    }

    pub fn powf(&self, exponent: f64) -> Self {
        FactorSpec::Power { base: Box::new(self.clone()), exponent }
    }

    pub fn times(&self, other: &FactorSpec) -> Self {
        FactorSpec::Product { factors: vec![self.clone(), other.clone()] }
    }

    pub fn is_constant_one(&self) -> bool {
        matches!(self, FactorSpec::Constant { value } if *value == 1.0)
    }
}

#[derive(Clone, Debug)]
enum Compiled {
    Constant(f64),
    Jl { c: f64, t: f64, xi: Vec<Complex64> },
    Trig { amplitude: f64, modes: Vec<TrigMode>, seed: u64, count: usize },
    Expr(Expr),
    Product(Vec<Compiled>),
    Power(Box<Compiled>, f64),
}

#[derive(Clone, Debug)]
struct TrigMode {
    weight: f64,
    freq: Vec<f64>,
    phase: f64,
}

/// A validated factor ready for evaluation.
#[derive(Clone, Debug)]
pub struct ConformalFactor {
    spec: FactorSpec,
    compiled: Compiled,
}

impl ConformalFactor {
    pub fn new(spec: FactorSpec) -> Result<Self> {
        let compiled = compile(&spec)?;
        Ok(ConformalFactor { spec, compiled })
    }

    pub fn one() -> Self {
        ConformalFactor::new(FactorSpec::one()).expect("constant factor is valid")
    }

    pub fn spec(&self) -> &FactorSpec {
        &self.spec
    }

    /// Jet of the factor at chart point `p`; errors unless the value is positive.
    pub fn eval(&self, model: &ContactModel, p: &[f64], order: usize) -> Result<Jet> {
        let chart = model.coordinates(p, order)?;
        let ambient = if needs_ambient(&self.compiled) {
            model
                .ambient(p, order)?
                .into_iter()
                .map(|z| (z.re, z.im))
                .collect()
        } else {
            Vec::new()
        };
        let v = eval(&self.compiled, model, &chart, &ambient)?;
        if !(v.value() > 0.0) {
            return Err(Error::NonPositive(v.value()));
        }
        Ok(v)
    }

    /// Value only, at an ambient sphere point.
    pub fn value_at(&self, model: &ContactModel, zeta: &[Complex64]) -> Result<f64> {
        let centred = model.centred_at(zeta)?;
        Ok(self.eval(&centred, &vec![0.0; model.dim()], 0)?.value())
    }
}

fn needs_ambient(c: &Compiled) -> bool {
    match c {
        Compiled::Constant(_) => false,
        Compiled::Jl { .. } | Compiled::Trig { .. } => true,
        Compiled::Expr(_) => true,
        Compiled::Product(v) => v.iter().any(needs_ambient),
        Compiled::Power(b, _) => needs_ambient(b),
    }
}

fn compile(spec: &FactorSpec) -> Result<Compiled> {
    Ok(match spec {
        FactorSpec::Constant { value } => {
            if !(*value > 0.0) || !value.is_finite() {
                return Err(Error::NonPositive(*value));
            }
            Compiled::Constant(*value)
        }
        FactorSpec::JlFamily { c, t, xi } => {
            if !(*c > 0.0) {
                return Err(Error::Factor(format!("family scale must be positive, got {c}")));
            }
            if !(*t >= 0.0) || !t.is_finite() {
                return Err(Error::Factor(format!("family parameter t must be >= 0, got {t}")));
            }
            let xi: Vec<Complex64> = xi.iter().map(|p| Complex64::new(p[0], p[1])).collect();
            let n: f64 = xi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if (n - 1.0).abs() > 1e-9 {
                return Err(Error::Factor(format!("xi must be a unit vector, |xi| = {n}")));
            }
            Compiled::Jl { c: *c, t: *t, xi }
        }
        FactorSpec::RandomTrig { seed, amplitude, modes } => {
            if !(*amplitude >= 0.0) {
                return Err(Error::Factor("amplitude must be non-negative".into()));
            }
            if *modes == 0 {
                return Err(Error::Factor("at least one mode is required".into()));
            }
            // Frequencies depend on the variable count, which is only known
            // at evaluation time; draw them lazily from the seed then.
            Compiled::Trig { amplitude: *amplitude, modes: Vec::new(), seed: *seed, count: *modes }
        }
        FactorSpec::Expression { expr } => Compiled::Expr(expr::parse(expr)?),
        FactorSpec::Product { factors } => {
            if factors.is_empty() {
                return Err(Error::Factor("empty product".into()));
            }
            Compiled::Product(factors.iter().map(compile).collect::<Result<_>>()?)
        }
        FactorSpec::Power { base, exponent } => {
            if !exponent.is_finite() {
                return Err(Error::Factor("non-finite exponent".into()));
            }
            Compiled::Power(Box::new(compile(base)?), *exponent)
        }
    })
}

fn trig_modes(seed: u64, count: usize, dim: usize) -> Vec<TrigMode> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut modes: Vec<TrigMode> = (0..count)
        .map(|_| TrigMode {
            weight: rng.random_range(-1.0..1.0),
            freq: (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect(),
            phase: rng.random_range(0.0..std::f64::consts::TAU),
        })
        .collect();
    let total: f64 = modes.iter().map(|m| m.weight.abs()).sum();
    for m in &mut modes {
        m.weight /= total;
    }
    modes
}

fn eval(c: &Compiled, model: &ContactModel, chart: &[Jet], ambient: &[(Jet, Jet)]) -> Result<Jet> {
    let proto = &chart[0];
    Ok(match c {
        Compiled::Constant(v) => proto.splat(*v),
        Compiled::Jl { c, t, xi } => {
            if xi.len() != ambient.len() {
                return Err(Error::Factor(format!(
                    "xi has {} entries, the sphere needs {}",
                    xi.len(),
                    ambient.len()
                )));
            }
            let mut s = CJet::from_real(proto.splat(t.cosh()));
            for ((re, im), x) in ambient.iter().zip(xi) {
                let z = CJet { re: re.clone(), im: im.clone() };
                s = &s + &z.scale_c(x.conj() * t.sinh());
            }
            s.norm_sqr().recip()?.scale(*c)
        }
        Compiled::Trig { amplitude, modes, seed, count } => {
            let vars: Vec<&Jet> = match model.kind() {
                ModelKind::Heisenberg => chart.iter().collect(),
                ModelKind::Sphere => ambient.iter().flat_map(|(a, b)| [a, b]).collect(),
            };
            let owned;
            let modes = if modes.is_empty() {
                owned = trig_modes(*seed, *count, vars.len());
                &owned
            } else {
                modes
            };
            let mut acc = proto.splat(0.0);
            for md in modes {
                let mut arg = proto.splat(md.phase);
                for (w, x) in md.freq.iter().zip(&vars) {
                    arg = &arg + &x.scale(*w);
                }
                acc = &acc + &arg.sin().scale(md.weight);
            }
            acc.scale(*amplitude).exp()
        }
        Compiled::Expr(e) => e.eval(&Env { chart, ambient })?,
        Compiled::Product(fs) => {
            let mut acc = proto.splat(1.0);
            for f in fs {
                acc = &acc * &eval(f, model, chart, ambient)?;
            }
            acc
        }
        Compiled::Power(b, e) => {
            let v = eval(b, model, chart, ambient)?;
            if *e == -1.0 {
                v.recip()?
            } else {
                v.powf(*e)?
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_lower_bound() {
        let s = ContactModel::sphere(1).unwrap();
        let xi = [Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)];
        let (c, t) = (1.3, 0.8);
        let f = ConformalFactor::new(FactorSpec::jl_family(c, t, &xi)).unwrap();
        for p in [[0.0, 0.0, 0.0], [0.5, -0.3, 1.0], [-2.0, 1.0, 3.0]] {
            let v = f.eval(&s, &p, 0).unwrap().value();
            assert!(v >= c * (-2.0 * t).exp() - 1e-12);
        }
    }

    #[test]
    fn rejects_invalid_descriptors() {
        assert!(ConformalFactor::new(FactorSpec::Constant { value: -1.0 }).is_err());
        let bad_xi = FactorSpec::JlFamily { c: 1.0, t: 0.1, xi: vec![[0.5, 0.0], [0.0, 0.0]] };
        assert!(ConformalFactor::new(bad_xi).is_err());
        assert!(ConformalFactor::new(FactorSpec::Expression { expr: "x1 +".into() }).is_err());
    }

    #[test]
    fn non_positive_expression_is_reported() {
        let h = ContactModel::heisenberg(1).unwrap();
        let f = ConformalFactor::new(FactorSpec::Expression { expr: "x1 - 1".into() }).unwrap();
        assert!(matches!(f.eval(&h, &[0.0, 0.0, 0.0], 1), Err(Error::NonPositive(_))));
    }

    #[test]
    fn inverse_cancels() {
        let h = ContactModel::heisenberg(1).unwrap();
        let f = FactorSpec::random_trig(9);
        let g = ConformalFactor::new(f.times(&f.inverse())).unwrap();
        let v = g.eval(&h, &[0.2, 0.1, -0.4], 3).unwrap();
        assert!((v.value() - 1.0).abs() < 1e-15);
        assert!(v.coeffs()[1..].iter().all(|c| c.abs() < 1e-14));
    }

    #[test]
    fn descriptor_roundtrips_through_toml() {
        let f = FactorSpec::jl_family(1.0, 0.5, &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        #[derive(Serialize, Deserialize)]
        struct W {
            factor: FactorSpec,
        }
        let s = toml::to_string(&W { factor: f.clone() }).unwrap();
        let back: W = toml::from_str(&s).unwrap();
        assert_eq!(back.factor, f);
    }
}
