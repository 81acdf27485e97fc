use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "planarlab", version, about = "Planar dynamics laboratory: limit cycles, certified roots, stability statistics")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Global {
    /// Seed for every random choice of the run.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads; never changes results.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Integration / quadrature tolerance (each subcommand has its own default).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Directory for result.json, CSV tables and manifest.json.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Human-readable tables instead of JSON.
    #[arg(long, global = true)]
    pub pretty: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

fn pair(s: &str) -> Result<(f64, f64), String> {
    let v = floats(s)?;
    match v[..] {
        [a, b] if a < b => Ok((a, b)),
        [_, _] => Err("expected A,B with A < B".into()),
        _ => Err("expected two comma-separated numbers".into()),
    }
}

fn floats(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("'{t}' is not a number")))
        .collect()
}

fn float_list(s: &str) -> Result<FloatList, String> {
    floats(s).map(FloatList)
}

/// Comma-separated numbers, e.g. `--coeffs -1,0,2`.
#[derive(Clone, Debug, Serialize)]
#[serde(transparent)]
pub struct FloatList(pub Vec<f64>);

/// Either a named built-in or a JSON file.
#[derive(Args, Debug, Clone, Serialize)]
pub struct FieldSource {
    /// Built-in field, e.g. `loud:-1/2,1/2`, `equivariant:1,1`, `linear-centre`.
    #[arg(long, conflicts_with = "field")]
    pub builtin: Option<String>,
    /// Field spec JSON: {"kind": "polynomial"|"rational"|"builtin:<name>", "components": [...]}.
    #[arg(long)]
    pub field: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case", tag = "name")]
pub enum Command {
    /// Limit cycles from the return map on the positive x-axis.
    Cycles(CyclesArgs),
    /// Melnikov function of a perturbed homogeneous Hamiltonian.
    Melnikov(MelnikovArgs),
    /// Periodic solutions of a periodic scalar (Abel-type) equation.
    Abel(AbelArgs),
    /// Bendixson–Dulac certification for a user-proposed V.
    Dulac(DulacArgs),
    /// Period function and critical periods of a centre.
    Period(PeriodArgs),
    /// Crossing limit cycles of a two-zone piecewise-linear system.
    Pwl(PwlArgs),
    #[command(subcommand)]
    /// Stability criteria, Monte Carlo probabilities, Markus–Yamabe and La Salle checks.
    Stability(StabilityCmd),
    #[command(subcommand)]
    /// Certified positive-root census and coefficient-sign bounds.
    Fewnomial(FewnomialCmd),
    #[command(subcommand)]
    /// Triangle billiards and the Poncelet map.
    Geometry(GeometryCmd),
    #[command(subcommand)]
    /// Digit sequences, Pascal-triangle multiplicities, rational recurrences.
    Seq(SeqCmd),
    /// Exact moments of a polynomial over the unit square.
    Moments(MomentsArgs),
    /// Loewner operator field and its index at the origin.
    Loewner(LoewnerArgs),
    /// Run the acceptance suite and print one line per criterion.
    VerifyPaper(VerifyArgs),
}

impl Command {
    pub fn name(&self) -> String {
        let sub = |s: &str| s.to_string();
        match self {
            Command::Cycles(_) => sub("cycles"),
            Command::Melnikov(_) => sub("melnikov"),
            Command::Abel(_) => sub("abel"),
            Command::Dulac(_) => sub("dulac"),
            Command::Period(_) => sub("period"),
            Command::Pwl(_) => sub("pwl"),
            Command::Stability(c) => format!("stability {}", c.name()),
            Command::Fewnomial(c) => format!("fewnomial {}", c.name()),
            Command::Geometry(c) => format!("geometry {}", c.name()),
            Command::Seq(c) => format!("seq {}", c.name()),
            Command::Moments(_) => sub("moments"),
            Command::Loewner(_) => sub("loewner"),
            Command::VerifyPaper(_) => sub("verify-paper"),
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CyclesArgs {
    #[command(flatten)]
    pub source: FieldSource,
    /// Section range on the positive x-axis.
    #[arg(long, value_parser = pair, allow_hyphen_values = true, default_value = "0.05,2")]
    pub range: (f64, f64),
    #[arg(long, default_value_t = 40)]
    pub grid: usize,
    #[arg(long, default_value_t = 1)]
    pub windings: u32,
    #[arg(long, default_value_t = 1e3)]
    pub t_max: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct PeriodArgs {
    #[command(flatten)]
    pub source: FieldSource,
    /// Section range on the positive x-axis (the centre sits at the origin).
    #[arg(long, value_parser = pair, allow_hyphen_values = true, default_value = "0.01,1")]
    pub range: (f64, f64),
    #[arg(long, default_value_t = 80)]
    pub grid: usize,
    /// Refine each bracket of T′ on finer grids.
    #[arg(long)]
    pub refine: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MelnikovArgs {
    /// `melnikov-two-cycles`, or omit and give --k, --l, --coeffs.
    #[arg(long)]
    pub builtin: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    #[arg(long, default_value_t = 1)]
    pub l: u32,
    /// Target coefficients c₀, c₁, … of M as a polynomial in ρ².
    #[arg(long, value_parser = float_list, allow_hyphen_values = true)]
    pub coeffs: Option<FloatList>,
    /// Energy levels at which the formula is compared with the direct line integral.
    #[arg(long, value_parser = float_list, default_value = "0.5,2,8")]
    pub levels: FloatList,
    /// Range of h for the (h, M(h)) table (log-spaced).
    #[arg(long, value_parser = pair, default_value = "0.01,100")]
    pub h_range: (f64, f64),
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    /// Also search the ε-perturbed field for limit cycles.
    #[arg(long)]
    pub simulate: Option<f64>,
    /// Section range for --simulate.
    #[arg(long, value_parser = pair, default_value = "0.2,8")]
    pub section: (f64, f64),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct AbelArgs {
    /// Scalar equation JSON: {"period": "2*pi", "terms": [{"power": 3, "harmonics": [...]}, ...]}.
    #[arg(long, conflicts_with_all = ["random", "rigid"])]
    pub spec: Option<PathBuf>,
    /// Random Abel equation with harmonics 0..=K, coefficients uniform in [−1, 1].
    #[arg(long, conflicts_with = "rigid")]
    pub random: Option<u32>,
    /// With --random: fix A₃ = 1.
    #[arg(long, requires = "random")]
    pub a3_one: bool,
    /// Cubic rigid system F = a + bx + cy + dx² + exy + fy², reduced to a scalar equation.
    #[arg(long, value_parser = float_list, allow_hyphen_values = true)]
    pub rigid: Option<FloatList>,
    #[arg(long, value_parser = pair, allow_hyphen_values = true, default_value = "-2,2")]
    pub range: (f64, f64),
    #[arg(long, default_value_t = 81)]
    pub grid: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DulacExample {
    Polynomial,
    Rational,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DulacArgs {
    /// Packaged Liénard example (F = cx³ + x⁵ or the rational one).
    #[arg(long, value_enum, conflicts_with = "spec")]
    pub example: Option<DulacExample>,
    /// Parameter c of the packaged example.
    #[arg(long, allow_hyphen_values = true, default_value = "-1")]
    pub c: String,
    /// JSON {"p": .., "q": .., "v": .., "s": "1"}; components in the polynomial schema or {"num", "den"}.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Certification box xmin,xmax,ymin,ymax.
    #[arg(long, value_parser = float_list, allow_hyphen_values = true, default_value = "-5,5,-5,5")]
    pub bounds: FloatList,
    #[arg(long, default_value_t = 20)]
    pub depth: u32,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct PwlArgs {
    /// `chebyshev10` or `chebyshev:N,EPS`.
    #[arg(long, conflicts_with = "system")]
    pub builtin: Option<String>,
    /// PwlSystem JSON.
    #[arg(long)]
    pub system: Option<PathBuf>,
    /// Range of x on the separation curve.
    #[arg(long, value_parser = pair, default_value = "0.03,1")]
    pub range: (f64, f64),
    #[arg(long, default_value_t = 98)]
    pub grid: usize,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case", tag = "action")]
pub enum StabilityCmd {
    /// Monte-Carlo probability that a random linear equation is stable.
    Mc {
        #[arg(long)]
        order: usize,
        /// diff (differential, Routh–Hurwitz) or ddiff (difference, Jury).
        #[arg(long, default_value = "diff")]
        kind: String,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
    },
    /// Routh–Hurwitz test; coefficients in ascending order.
    Routh {
        #[arg(long, value_parser = float_list, allow_hyphen_values = true)]
        coeffs: FloatList,
    },
    /// Jury (Schur–Cohn) test; coefficients in ascending order.
    Jury {
        #[arg(long, value_parser = float_list, allow_hyphen_values = true)]
        coeffs: FloatList,
    },
    /// Markus–Yamabe counterexample check in dimension n.
    My {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long, default_value_t = 5.0)]
        t_max: f64,
    },
    /// Sampled spectral-radius conditions for a map.
    Lasalle {
        /// Polynomial map JSON: {"equations": [...]}.
        #[arg(long, conflicts_with = "rotation")]
        map: Option<PathBuf>,
        /// Linear map s·R(θ), given as S,THETA.
        #[arg(long, value_parser = float_list, allow_hyphen_values = true)]
        rotation: Option<FloatList>,
        /// c1: ρ(DF) < 1; c2: ρ(|DF|) < 1.
        #[arg(long, default_value = "c1")]
        condition: String,
        /// Sampling box lo,hi (applied to every coordinate).
        #[arg(long, value_parser = pair, allow_hyphen_values = true, default_value = "-1,1")]
        bounds: (f64, f64),
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Equilibria of a planar polynomial field and their types.
    Equilibria {
        #[command(flatten)]
        source: FieldSource,
        /// Search box lo,hi (both coordinates).
        #[arg(long, value_parser = pair, allow_hyphen_values = true, default_value = "-4,4")]
        bounds: (f64, f64),
        #[arg(long, default_value_t = 64)]
        grid: usize,
    },
}

impl StabilityCmd {
    fn name(&self) -> &'static str {
        match self {
            StabilityCmd::Mc { .. } => "mc",
            StabilityCmd::Routh { .. } => "routh",
            StabilityCmd::Jury { .. } => "jury",
            StabilityCmd::My { .. } => "my",
            StabilityCmd::Lasalle { .. } => "lasalle",
            StabilityCmd::Equilibria { .. } => "equilibria",
        }
    }
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case", tag = "action")]
pub enum FewnomialCmd {
    /// Certified count of positive roots in a box.
    Census {
        /// Polynomial system JSON: a list of polynomials or {"equations": [...]}.
        #[arg(long, conflicts_with = "builtin")]
        system: Option<PathBuf>,
        /// `kou`.
        #[arg(long)]
        builtin: Option<String>,
        #[arg(long, default_value_t = 14)]
        depth: u32,
        /// Box lo,hi for every variable.
        #[arg(long, value_parser = pair, default_value = "0.01,2")]
        bounds: (f64, f64),
    },
    /// Descartes bound on positive roots of a univariate polynomial.
    Descartes {
        #[arg(long)]
        poly: PathBuf,
    },
    /// Casas-Alvero predicate over ℚ or modulo a prime.
    Casas {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        modulus: Option<u64>,
    },
}

impl FewnomialCmd {
    fn name(&self) -> &'static str {
        match self {
            FewnomialCmd::Census { .. } => "census",
            FewnomialCmd::Descartes { .. } => "descartes",
            FewnomialCmd::Casas { .. } => "casas",
        }
    }
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case", tag = "action")]
pub enum GeometryCmd {
    /// Fagnano period-3 orbit of an acute triangle.
    Fagnano {
        /// ax,ay,bx,by,cx,cy
        #[arg(long, value_parser = float_list, allow_hyphen_values = true)]
        triangle: FloatList,
    },
    /// Billiard trajectory in a triangle (polyline CSV).
    Billiard {
        #[arg(long, value_parser = float_list, allow_hyphen_values = true)]
        triangle: FloatList,
        #[arg(long, value_parser = float_list, allow_hyphen_values = true)]
        start: FloatList,
        #[arg(long, value_parser = float_list, allow_hyphen_values = true)]
        direction: FloatList,
        #[arg(long, default_value_t = 20)]
        bounces: usize,
    },
    /// Rotation number of the Poncelet map between x²ⁿ + y²ⁿ = a²ⁿ and x²ᵐ + y²ᵐ = 2.
    Rotation {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 1.0)]
        inner_scale: f64,
        /// Angle of the start point on the outer curve.
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.3)]
        angle: f64,
        #[arg(long, default_value_t = 1000)]
        iterations: usize,
    },
    /// Is the Poncelet map conjugate to a rotation?
    Conjugacy {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 1.0)]
        inner_scale: f64,
        #[arg(long, default_value_t = 16)]
        samples: usize,
        #[arg(long, default_value_t = 200)]
        iterations: usize,
    },
}

impl GeometryCmd {
    fn name(&self) -> &'static str {
        match self {
            GeometryCmd::Fagnano { .. } => "fagnano",
            GeometryCmd::Billiard { .. } => "billiard",
            GeometryCmd::Rotation { .. } => "rotation",
            GeometryCmd::Conjugacy { .. } => "conjugacy",
        }
    }
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case", tag = "action")]
pub enum SeqCmd {
    /// Multiplicative persistence of n, or the smallest-n record table.
    Persistence {
        #[arg(long, required_unless_present = "records")]
        n: Option<String>,
        #[arg(long, default_value_t = 10)]
        base: u32,
        /// Tabulate the smallest n with persistence 1..=K (base 10).
        #[arg(long, conflicts_with = "n")]
        records: Option<u32>,
        /// Search limit for --records.
        #[arg(long, default_value_t = 100_000)]
        limit: u64,
    },
    /// Reverse-and-add until a palindrome.
    Lychrel {
        #[arg(long)]
        n: String,
        #[arg(long, default_value_t = 10)]
        base: u32,
        #[arg(long, default_value_t = 1000)]
        cap: u32,
    },
    /// Number of times N occurs in Pascal's triangle.
    Singmaster {
        #[arg(long)]
        n: String,
    },
    /// Periodicity of a rational difference equation from random starts.
    Diffeq {
        /// JSON {"k": K, "a": [...], "b": [...]}.
        #[arg(long, conflicts_with = "builtin")]
        spec: Option<PathBuf>,
        /// lyness, todd or ratio.
        #[arg(long)]
        builtin: Option<String>,
        /// Unfold the equation by this factor first.
        #[arg(long)]
        unfold: Option<usize>,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value_t = 200)]
        horizon: usize,
        #[arg(long, default_value_t = 4096)]
        max_bits: u64,
    },
}

impl SeqCmd {
    fn name(&self) -> &'static str {
        match self {
            SeqCmd::Persistence { .. } => "persistence",
            SeqCmd::Lychrel { .. } => "lychrel",
            SeqCmd::Singmaster { .. } => "singmaster",
            SeqCmd::Diffeq { .. } => "diffeq",
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MomentsArgs {
    /// Polynomial JSON (one or two variables).
    #[arg(long)]
    pub poly: PathBuf,
    #[arg(long, default_value_t = 6)]
    pub m_max: u32,
    /// Cap on m_max · deg f.
    #[arg(long, default_value_t = 200)]
    pub cap: u32,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct LoewnerArgs {
    /// Bivariate polynomial JSON with f(0, 0) = 0.
    #[arg(long)]
    pub poly: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    /// Radius of the circle used for the index.
    #[arg(long, default_value_t = 0.5)]
    pub radius: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct VerifyArgs {
    /// Run only these criteria (default: all).
    #[arg(long, value_delimiter = ',')]
    pub criterion: Vec<u32>,
}
