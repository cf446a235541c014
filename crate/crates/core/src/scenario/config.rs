//! JSON scenario configuration.
//!
//! A config is `{ "name", "kind", "seed", "params" }`; `params` is parsed
//! according to `kind`, so errors carry a path like `params.dt`.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::curve::{AmbientState, CurveData, FilterParams};
use crate::particles::ParticleSystem;
use crate::series::{AnalyticField, Series, DEFAULT_MAX_DEGREE, DEFAULT_RADIUS};

use super::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Smooth,
    Blowup,
    Genericity,
    Curve,
    InteractTangent,
    InteractEndpoint,
    Particles,
    Accretion,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Smooth => "smooth",
            Kind::Blowup => "blowup",
            Kind::Genericity => "genericity",
            Kind::Curve => "curve",
            Kind::InteractTangent => "interact-tangent",
            Kind::InteractEndpoint => "interact-endpoint",
            Kind::Particles => "particles",
            Kind::Accretion => "accretion",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub kind: Kind,
    #[serde(default)]
    pub seed: u64,
    pub params: Value,
}

/// A series given either as a constant or as `(exponent, coefficient)`
/// terms about `center`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeriesLit {
    Constant(f64),
    Terms {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        degree: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<f64>,
        terms: Vec<(Vec<usize>, f64)>,
    },
}

impl SeriesLit {
    pub fn terms(terms: &[(&[usize], f64)]) -> Self {
        SeriesLit::Terms {
            center: None,
            degree: None,
            radius: None,
            terms: terms.iter().map(|(e, c)| (e.to_vec(), *c)).collect(),
        }
    }

    pub fn to_series<const N: usize>(&self, path: &str) -> Result<Series<N>, RunError> {
        let bad = |m: String| RunError::config(path, m);
        match self {
            SeriesLit::Constant(c) => Ok(Series::constant([0.0; N], DEFAULT_MAX_DEGREE, *c)),
            SeriesLit::Terms {
                center,
                degree,
                radius,
                terms,
            } => {
                let c: [f64; N] = match center {
                    None => [0.0; N],
                    Some(v) => v
                        .as_slice()
                        .try_into()
                        .map_err(|_| bad(format!("center needs {N} coordinates, got {}", v.len())))?,
                };
                let mut typed = Vec::with_capacity(terms.len());
                for (e, a) in terms {
                    let e: [usize; N] = e
                        .as_slice()
                        .try_into()
                        .map_err(|_| bad(format!("exponent {e:?} needs {N} entries")))?;
                    typed.push((e, *a));
                }
                let r = radius.unwrap_or(DEFAULT_RADIUS);
                if !(r > 0.0) {
                    return Err(bad("radius must be positive".into()));
                }
                Series::from_terms(c, degree.unwrap_or(DEFAULT_MAX_DEGREE), &typed)
                    .map(|s| s.with_radius(r))
                    .map_err(|e| bad(e.to_string()))
            }
        }
    }
}

/// Initial velocity `w` and optional density `ρ̄`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub w1: SeriesLit,
    pub w2: SeriesLit,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<SeriesLit>,
}

impl FieldSpec {
    pub fn build(&self, path: &str) -> Result<AnalyticField, RunError> {
        let w1 = self.w1.to_series(&format!("{path}.w1"))?;
        let w2 = self.w2.to_series(&format!("{path}.w2"))?;
        let rho = self.rho.as_ref().map(|r| r.to_series(&format!("{path}.rho"))).transpose()?;
        AnalyticField::new(w1, w2, rho).map_err(|e| RunError::config(path, e.to_string()))
    }
}

/// Ambient gas as series in `(t, x₁, x₂)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmbientSpec {
    pub rho_plus: SeriesLit,
    pub rho_minus: SeriesLit,
    pub v_plus: [SeriesLit; 2],
    pub v_minus: [SeriesLit; 2],
}

impl AmbientSpec {
    pub fn constant(rho_plus: f64, rho_minus: f64, v_plus: [f64; 2], v_minus: [f64; 2]) -> Self {
        let c = SeriesLit::Constant;
        Self {
            rho_plus: c(rho_plus),
            rho_minus: c(rho_minus),
            v_plus: [c(v_plus[0]), c(v_plus[1])],
            v_minus: [c(v_minus[0]), c(v_minus[1])],
        }
    }

    pub fn build(&self, path: &str) -> Result<AmbientState, RunError> {
        let s = |l: &SeriesLit, f: &str| l.to_series::<3>(&format!("{path}.{f}"));
        AmbientState::new(
            s(&self.rho_plus, "rho_plus")?,
            s(&self.rho_minus, "rho_minus")?,
            [s(&self.v_plus[0], "v_plus[0]")?, s(&self.v_plus[1], "v_plus[1]")?],
            [s(&self.v_minus[0], "v_minus[0]")?, s(&self.v_minus[1], "v_minus[1]")?],
        )
        .map_err(|e| RunError::config(path, e.to_string()))
    }
}

/// Curve data as coefficient lists in powers of `ξ − xi0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    #[serde(default)]
    pub xi0: f64,
    #[serde(default = "default_degree")]
    pub degree: usize,
    pub y: [Vec<f64>; 2],
    pub eta: Vec<f64>,
    pub v: [Vec<f64>; 2],
}

fn default_degree() -> usize {
    DEFAULT_MAX_DEGREE
}

impl CurveSpec {
    pub fn build(&self, path: &str) -> Result<CurveData, RunError> {
        CurveData::from_coeffs(
            self.xi0,
            self.degree,
            [&self.y[0], &self.y[1]],
            &self.eta,
            [&self.v[0], &self.v[1]],
        )
        .map_err(|e| RunError::config(path, e.to_string()))
    }
}

/// `n` equispaced nodes on `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Nodes {
    pub a: f64,
    pub b: f64,
    pub n: usize,
}

impl Nodes {
    pub fn validate(&self, path: &str, min: usize) -> Result<Vec<f64>, RunError> {
        if !(self.b > self.a) {
            return Err(RunError::config(path, "need a < b"));
        }
        if self.n < min {
            return Err(RunError::config(&format!("{path}.n"), format!("need at least {min} nodes")));
        }
        Ok(crate::curve::stencil::uniform_nodes(self.a, self.b, self.n))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmoothParams {
    pub field: FieldSpec,
    /// `(t, y₁, y₂)` query points.
    pub points: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlowupParams {
    pub field: FieldSpec,
    pub lo: [f64; 2],
    pub hi: [f64; 2],
    pub n: usize,
    pub t_max: f64,
    #[serde(default = "default_polish")]
    pub polish_top: usize,
    /// Also write the per-cell blow-up times.
    #[serde(default)]
    pub write_cells: bool,
}

fn default_polish() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenericityParams {
    pub field: FieldSpec,
    pub lo: [f64; 2],
    pub hi: [f64; 2],
    pub t_max: f64,
    pub grid: usize,
    #[serde(default = "default_max_roots")]
    pub max_roots: usize,
}

fn default_max_roots() -> usize {
    64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Ck,
    Mol,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveParams {
    pub curve: CurveSpec,
    pub ambient: AmbientSpec,
    pub nodes: Nodes,
    pub solver: Solver,
    #[serde(default)]
    pub t0: f64,
    pub t_end: f64,
    pub dt: f64,
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default)]
    pub filter: FilterParams,
}

fn default_order() -> usize {
    8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractParams {
    pub curve1: CurveSpec,
    pub curve2: CurveSpec,
    pub ambient: AmbientSpec,
    #[serde(default)]
    pub t0: f64,
    #[serde(default)]
    pub xi0: f64,
    #[serde(default)]
    pub s0: f64,
    pub xi: Nodes,
    #[serde(default = "default_order")]
    pub order: usize,
    /// Extent in `x₂ = t − t♯(ξ)` of the sampled merged chart.
    pub chart_span: f64,
    #[serde(default = "default_chart_samples")]
    pub chart_samples: usize,
}

fn default_chart_samples() -> usize {
    11
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleParams {
    pub system: ParticleSystem,
    /// Omitted: run until no further merges.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AccretionParams {
    pub curve: CurveSpec,
    pub ambient: AmbientSpec,
    pub nodes: Nodes,
    #[serde(default)]
    pub t0: f64,
    pub n_particles: usize,
    pub window: [f64; 2],
    pub duration: f64,
    #[serde(default = "default_batches")]
    pub batches: usize,
}

fn default_batches() -> usize {
    16
}

/// Parameters after parsing, by kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    Smooth(SmoothParams),
    Blowup(BlowupParams),
    Genericity(GenericityParams),
    Curve(CurveParams),
    Interact(InteractParams),
    Particles(ParticleParams),
    Accretion(AccretionParams),
}

fn parse<T: DeserializeOwned>(v: &Value) -> Result<T, RunError> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let p = e.path().to_string();
        let path = if p == "." { "params".to_string() } else { format!("params.{p}") };
        RunError::config(&path, e.into_inner().to_string())
    })
}

fn positive(path: &str, x: f64) -> Result<(), RunError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(RunError::config(path, format!("must be positive, got {x}")))
    }
}

impl ScenarioConfig {
    pub fn new<T: Serialize>(name: &str, kind: Kind, seed: u64, params: &T) -> Self {
        Self {
            name: name.into(),
            kind,
            seed,
            params: serde_json::to_value(params).expect("params serialize"),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, RunError> {
        let mut de = serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let p = e.path().to_string();
            RunError::config(if p == "." { "config" } else { &p }, e.into_inner().to_string())
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Parses and checks the kind-specific parameters.
    pub fn params(&self) -> Result<Params, RunError> {
        let v = &self.params;
        let p = match self.kind {
            Kind::Smooth => Params::Smooth(parse(v)?),
            Kind::Blowup => {
                let p: BlowupParams = parse(v)?;
                positive("params.t_max", p.t_max)?;
                if p.n < 2 {
                    return Err(RunError::config("params.n", "need at least 2 nodes per side"));
                }
                Params::Blowup(p)
            }
            Kind::Genericity => {
                let p: GenericityParams = parse(v)?;
                positive("params.t_max", p.t_max)?;
                if p.grid < 2 {
                    return Err(RunError::config("params.grid", "need at least 2 nodes per side"));
                }
                Params::Genericity(p)
            }
            Kind::Curve => {
                let p: CurveParams = parse(v)?;
                positive("params.dt", p.dt)?;
                if !(p.t_end >= p.t0) {
                    return Err(RunError::config("params.t_end", "must not precede t0"));
                }
                if p.order == 0 {
                    return Err(RunError::config("params.order", "must be at least 1"));
                }
                positive("params.filter.high_mode_tol", p.filter.high_mode_tol)?;
                Params::Curve(p)
            }
            Kind::InteractTangent | Kind::InteractEndpoint => {
                let p: InteractParams = parse(v)?;
                positive("params.chart_span", p.chart_span)?;
                if p.order == 0 {
                    return Err(RunError::config("params.order", "must be at least 1"));
                }
                if p.chart_samples < 2 {
                    return Err(RunError::config("params.chart_samples", "need at least 2"));
                }
                Params::Interact(p)
            }
            Kind::Particles => {
                let p: ParticleParams = parse(v)?;
                if let Some(t) = p.t_end {
                    if !(t >= p.system.time) {
                        return Err(RunError::config("params.t_end", "must not precede the system time"));
                    }
                }
                Params::Particles(p)
            }
            Kind::Accretion => {
                let p: AccretionParams = parse(v)?;
                positive("params.duration", p.duration)?;
                if p.n_particles == 0 {
                    return Err(RunError::config("params.n_particles", "must be positive"));
                }
                if !(p.window[1] > p.window[0]) {
                    return Err(RunError::config("params.window", "need window[0] < window[1]"));
                }
                Params::Accretion(p)
            }
        };
        Ok(p)
    }
}
