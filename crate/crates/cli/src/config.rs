//! Experiment configs: `[section]` blocks of `key = value` lines, lists as comma lists.
//!
//! Every block is parsed into a typed struct with defaults filled in, and
//! [`ExperimentConfig::to_ini_string`] writes every field back, so a config read
//! from its own output compares equal.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::str::FromStr;

use ini::Ini;

use crate::CliError;

type Section = BTreeMap<String, String>;

/// Key lookup that remembers what was consumed, so leftovers can be reported.
struct Reader {
    name: &'static str,
    keys: Section,
}

impl Reader {
    fn take<T: FromStr>(&mut self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        match self.keys.remove(key) {
            None => Ok(None),
            Some(raw) => raw
                .trim()
                .parse()
                .map(Some)
                .map_err(|e| CliError::Config(format!("[{}] {key} = {raw:?}: {e}", self.name))),
        }
    }

    fn or<T: FromStr>(&mut self, key: &str, default: T) -> Result<T, CliError>
    where
        T::Err: Display,
    {
        Ok(self.take(key)?.unwrap_or(default))
    }

    fn required<T: FromStr>(&mut self, key: &str) -> Result<T, CliError>
    where
        T::Err: Display,
    {
        self.take(key)?.ok_or_else(|| CliError::Config(format!("[{}] is missing the key {key}", self.name)))
    }

    fn list<T: FromStr>(&mut self, key: &str, default: Vec<T>) -> Result<Vec<T>, CliError>
    where
        T::Err: Display,
    {
        let Some(raw) = self.keys.remove(key) else {
            return Ok(default);
        };
        raw.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|e| CliError::Config(format!("[{}] {key}: {s:?}: {e}", self.name))))
            .collect()
    }

    fn finish(self) -> Result<(), CliError> {
        match self.keys.keys().next() {
            Some(k) => Err(CliError::Config(format!("[{}] has an unknown key {k}", self.name))),
            None => Ok(()),
        }
    }
}

fn join<T: Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

macro_rules! keyword_enum {
    ($name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq)]
        pub enum $name { $($variant),+ }

        impl FromStr for $name {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($text => Ok(Self::$variant),)+
                    _ => Err(format!("expected one of: {}", [$($text),+].join(", "))),
                }
            }
        }

        impl Display for $name {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str(match self { $(Self::$variant => $text),+ })
            }
        }
    };
}

keyword_enum!(BoundaryKind { Profile => "profile", Constant => "constant", Linear => "linear", CosTheta => "cos_theta" });
keyword_enum!(Shape { Box => "box", Ball => "ball" });
keyword_enum!(SchemeKind { FdRelax => "fd_relax", DppIter => "dpp_iter" });
keyword_enum!(Source { Snapshot => "snapshot", Profile => "profile" });
keyword_enum!(Mode { Level => "level", Growth => "growth" });

#[derive(Debug, Clone, PartialEq)]
pub struct RunBlock {
    pub seed: u64,
    /// Output directory.
    pub out: String,
}

/// Equation, constant modulus `a ≡ lambda0` and boundary data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemBlock {
    pub n: usize,
    pub p: f64,
    pub gamma: f64,
    pub m: f64,
    pub lambda0: f64,
    /// `profile`: the radial profile `C_ND (|x| − core_radius)_+^β`;
    /// `constant`/`linear`: `value` and `value · x₁`; `cos_theta`: `x₁/|x|`.
    pub boundary: BoundaryKind,
    pub value: f64,
    pub core_radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridBlock {
    pub shape: Shape,
    pub lower: f64,
    pub upper: f64,
    pub cells: usize,
    pub radius: f64,
    pub cells_per_radius: usize,
    pub pad: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverBlock {
    pub scheme: SchemeKind,
    pub eps_g: Option<f64>,
    pub relax: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub eps_dpp: Option<f64>,
}

/// Cartesian sweep; `m` lists absolute exponents, `m_fraction` multiples of `γ + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialBlock {
    pub n: Vec<usize>,
    pub p: Vec<f64>,
    pub gamma: Vec<f64>,
    pub m: Vec<f64>,
    pub m_fraction: Vec<f64>,
    pub lambda0: Vec<f64>,
    pub core_radius: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeBlock {
    pub source: Source,
    /// `solution.csv` written by `solve` on the same `[grid]`.
    pub snapshot: String,
    /// The analysis point is the free-boundary point nearest `anchor`.
    pub anchor: Vec<f64>,
    /// Empty means `4h · 2^{k/2}` up to half the distance to the boundary.
    pub radii: Vec<f64>,
    /// Empty means `4h, 8h, 16h`.
    pub porosity_radii: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameBlock {
    pub dim: usize,
    pub p: f64,
    pub cells_per_radius: usize,
    /// `ε` in grid spacings.
    pub eps_cells: f64,
    pub n_walks: usize,
    pub max_steps: Option<usize>,
    pub payoff: BoundaryKind,
    pub value: f64,
    pub x0: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiouvilleBlock {
    pub mode: Mode,
    pub theta: f64,
    pub s: f64,
    pub radii: Vec<f64>,
    pub probe_x: Vec<f64>,
    pub probe_y: Vec<f64>,
    pub cells_per_radius: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepBlock {
    pub cells: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub run: RunBlock,
    pub problem: Option<ProblemBlock>,
    pub grid: Option<GridBlock>,
    pub solver: SolverBlock,
    pub radial: Option<RadialBlock>,
    pub analyze: Option<AnalyzeBlock>,
    pub game: Option<GameBlock>,
    pub liouville: Option<LiouvilleBlock>,
    pub sweep: Option<SweepBlock>,
}

const SECTIONS: [&str; 9] = ["run", "problem", "grid", "solver", "radial", "analyze", "game", "liouville", "sweep"];

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let ini = Ini::load_from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let mut sections: BTreeMap<String, Section> = BTreeMap::new();
        for (name, props) in ini.iter() {
            let Some(name) = name else {
                if props.is_empty() {
                    continue;
                }
                return Err(CliError::Config("keys outside of a [section]".into()));
            };
            if !SECTIONS.contains(&name) {
                return Err(CliError::Config(format!("unknown section [{name}]")));
            }
            let entry = sections.entry(name.to_string()).or_default();
            for (k, v) in props.iter() {
                entry.insert(k.to_string(), v.to_string());
            }
        }
        let mut open = |name: &'static str| sections.remove(name).map(|keys| Reader { name, keys });

        let run = match open("run") {
            Some(mut r) => {
                let b = RunBlock { seed: r.or("seed", 0)?, out: r.or("out", "out".to_string())? };
                r.finish()?;
                b
            }
            None => RunBlock { seed: 0, out: "out".into() },
        };
        let problem = open("problem")
            .map(|mut r| {
                let b = ProblemBlock {
                    n: r.required("n")?,
                    p: r.required("p")?,
                    gamma: r.required("gamma")?,
                    m: r.required("m")?,
                    lambda0: r.or("lambda0", 1.0)?,
                    boundary: r.or("boundary", BoundaryKind::Profile)?,
                    value: r.or("value", 0.0)?,
                    core_radius: r.or("core_radius", 0.0)?,
                };
                r.finish().map(|_| b)
            })
            .transpose()?;
        let grid = open("grid")
            .map(|mut r| {
                let b = GridBlock {
                    shape: r.or("shape", Shape::Box)?,
                    lower: r.or("lower", -1.0)?,
                    upper: r.or("upper", 1.0)?,
                    cells: r.or("cells", 64)?,
                    radius: r.or("radius", 1.0)?,
                    cells_per_radius: r.or("cells_per_radius", 32)?,
                    pad: r.or("pad", 1)?,
                };
                r.finish().map(|_| b)
            })
            .transpose()?;
        let solver = match open("solver") {
            Some(mut r) => {
                let b = SolverBlock {
                    scheme: r.or("scheme", SchemeKind::FdRelax)?,
                    eps_g: r.take("eps_g")?,
                    relax: r.or("relax", 0.8)?,
                    tol: r.or("tol", 1e-8)?,
                    max_iter: r.or("max_iter", 200_000)?,
                    eps_dpp: r.take("eps_dpp")?,
                };
                r.finish()?;
                b
            }
            None => SolverBlock::default(),
        };
        let radial = open("radial")
            .map(|mut r| {
                let b = RadialBlock {
                    n: r.list("n", vec![])?,
                    p: r.list("p", vec![])?,
                    gamma: r.list("gamma", vec![])?,
                    m: r.list("m", vec![])?,
                    m_fraction: r.list("m_fraction", vec![])?,
                    lambda0: r.list("lambda0", vec![1.0])?,
                    core_radius: r.or("core_radius", 0.0)?,
                    samples: r.or("samples", 200)?,
                };
                r.finish().map(|_| b)
            })
            .transpose()?;
        let analyze = open("analyze")
            .map(|mut r| {
                let b = AnalyzeBlock {
                    source: r.or("source", Source::Snapshot)?,
                    snapshot: r.or("snapshot", String::new())?,
                    anchor: r.list("anchor", vec![0.0, 0.0])?,
                    radii: r.list("radii", vec![])?,
                    porosity_radii: r.list("porosity_radii", vec![])?,
                };
                r.finish().map(|_| b)
            })
            .transpose()?;
        let game = open("game")
            .map(|mut r| {
                let b = GameBlock {
                    dim: r.or("dim", 2)?,
                    p: r.or("p", 4.0)?,
                    cells_per_radius: r.or("cells_per_radius", 32)?,
                    eps_cells: r.or("eps_cells", 4.0)?,
                    n_walks: r.or("n_walks", 100_000)?,
                    max_steps: r.take("max_steps")?,
                    payoff: r.or("payoff", BoundaryKind::CosTheta)?,
                    value: r.or("value", 1.0)?,
                    x0: r.list("x0", vec![0.0, 0.0])?,
                };
                r.finish().map(|_| b)
            })
            .transpose()?;
        let liouville = open("liouville")
            .map(|mut r| {
                let b = LiouvilleBlock {
                    mode: r.or("mode", Mode::Level)?,
                    theta: r.or("theta", 0.25)?,
                    s: r.or("s", 1.0)?,
                    radii: r.list("radii", vec![4.0, 8.0, 16.0])?,
                    probe_x: r.list("probe_x", vec![0.0])?,
                    probe_y: r.list("probe_y", vec![0.0])?,
                    cells_per_radius: r.or("cells_per_radius", 32)?,
                };
                r.finish().map(|_| b)
            })
            .transpose()?;
        let sweep = open("sweep")
            .map(|mut r| {
                let b = SweepBlock { cells: r.list("cells", vec![32, 64, 128])? };
                r.finish().map(|_| b)
            })
            .transpose()?;
        Ok(Self { run, problem, grid, solver, radial, analyze, game, liouville, sweep })
    }

    /// Every field, defaults included; floats use the shortest round-trip form.
    pub fn to_ini_string(&self) -> String {
        let mut ini = Ini::new();
        ini.with_section(Some("run")).set("seed", self.run.seed.to_string()).set("out", self.run.out.clone());
        if let Some(b) = &self.problem {
            ini.with_section(Some("problem"))
                .set("n", b.n.to_string())
                .set("p", b.p.to_string())
                .set("gamma", b.gamma.to_string())
                .set("m", b.m.to_string())
                .set("lambda0", b.lambda0.to_string())
                .set("boundary", b.boundary.to_string())
                .set("value", b.value.to_string())
                .set("core_radius", b.core_radius.to_string());
        }
        if let Some(b) = &self.grid {
            ini.with_section(Some("grid"))
                .set("shape", b.shape.to_string())
                .set("lower", b.lower.to_string())
                .set("upper", b.upper.to_string())
                .set("cells", b.cells.to_string())
                .set("radius", b.radius.to_string())
                .set("cells_per_radius", b.cells_per_radius.to_string())
                .set("pad", b.pad.to_string());
        }
        {
            let b = &self.solver;
            let mut s = ini.with_section(Some("solver"));
            s.set("scheme", b.scheme.to_string());
            if let Some(e) = b.eps_g {
                s.set("eps_g", e.to_string());
            }
            s.set("relax", b.relax.to_string()).set("tol", b.tol.to_string()).set("max_iter", b.max_iter.to_string());
            if let Some(e) = b.eps_dpp {
                s.set("eps_dpp", e.to_string());
            }
        }
        if let Some(b) = &self.radial {
            ini.with_section(Some("radial"))
                .set("n", join(&b.n))
                .set("p", join(&b.p))
                .set("gamma", join(&b.gamma))
                .set("m", join(&b.m))
                .set("m_fraction", join(&b.m_fraction))
                .set("lambda0", join(&b.lambda0))
                .set("core_radius", b.core_radius.to_string())
                .set("samples", b.samples.to_string());
        }
        if let Some(b) = &self.analyze {
            ini.with_section(Some("analyze"))
                .set("source", b.source.to_string())
                .set("snapshot", b.snapshot.clone())
                .set("anchor", join(&b.anchor))
                .set("radii", join(&b.radii))
                .set("porosity_radii", join(&b.porosity_radii));
        }
        if let Some(b) = &self.game {
            let mut s = ini.with_section(Some("game"));
            s.set("dim", b.dim.to_string())
                .set("p", b.p.to_string())
                .set("cells_per_radius", b.cells_per_radius.to_string())
                .set("eps_cells", b.eps_cells.to_string())
                .set("n_walks", b.n_walks.to_string());
            if let Some(k) = b.max_steps {
                s.set("max_steps", k.to_string());
            }
            s.set("payoff", b.payoff.to_string()).set("value", b.value.to_string()).set("x0", join(&b.x0));
        }
        if let Some(b) = &self.liouville {
            ini.with_section(Some("liouville"))
                .set("mode", b.mode.to_string())
                .set("theta", b.theta.to_string())
                .set("s", b.s.to_string())
                .set("radii", join(&b.radii))
                .set("probe_x", join(&b.probe_x))
                .set("probe_y", join(&b.probe_y))
                .set("cells_per_radius", b.cells_per_radius.to_string());
        }
        if let Some(b) = &self.sweep {
            ini.with_section(Some("sweep")).set("cells", join(&b.cells));
        }
        let mut out = Vec::new();
        ini.write_to(&mut out).expect("writing to a Vec cannot fail");
        String::from_utf8(out).expect("config text is UTF-8")
    }
}

impl Default for SolverBlock {
    fn default() -> Self {
        Self { scheme: SchemeKind::FdRelax, eps_g: None, relax: 0.8, tol: 1e-8, max_iter: 200_000, eps_dpp: None }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_and_sections_are_rejected() {
        assert!(ExperimentConfig::parse("[problem]\nn = 2\np = 3\ngamma = 1\nm = 0.5\ncolour = red\n").is_err());
        assert!(ExperimentConfig::parse("[nonsense]\na = 1\n").is_err());
        assert!(ExperimentConfig::parse("[problem]\nn = two\n").is_err());
        assert!(ExperimentConfig::parse("[problem]\nn = 2\n").is_err());
    }

    #[test]
    fn empty_lists_parse() {
        let c = ExperimentConfig::parse("[radial]\nn =\n").unwrap();
        assert!(c.radial.unwrap().n.is_empty());
    }
}
