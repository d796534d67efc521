//! The command tree. Each argument struct is both a clap subcommand and a
//! JSON config node; its clap defaults are the only defaults.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

macro_rules! clap_default {
    ($($t:ty),* $(,)?) => {$(
        impl Default for $t {
            fn default() -> Self {
                <$t as Parser>::parse_from(["sparse-ergodic"])
            }
        }
    )*};
}

#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "module", rename_all = "kebab-case")]
pub enum Command {
    /// Block plans, Tempelman sweeps, the divergence witness, unrestricted counts.
    #[command(subcommand)]
    Blocks(BlocksOp),
    /// Speckled and plaid random sets.
    Random(RandomArgs),
    /// Curve sets over finite fields.
    #[command(subcommand)]
    Arith(ArithOp),
    /// Word balls, group block plans, random subsets, coloring, gaps.
    #[command(subcommand)]
    Group(GroupOp),
    /// Ergodic averages, maximal functions, transference.
    #[command(subcommand)]
    Dyn(DynOp),
    /// The full acceptance suite.
    AllAcceptance(AcceptanceArgs),
}

impl Command {
    /// Dotted op name used in reports, e.g. `arith.weil`.
    pub fn op_name(&self) -> String {
        match self {
            Command::Blocks(o) => format!("blocks.{}", kebab(o)),
            Command::Random(a) => format!("random.{}.{}", a.family.name(), a.action.name()),
            Command::Arith(o) => format!("arith.{}", kebab(o)),
            Command::Group(o) => format!("group.{}", kebab(o)),
            Command::Dyn(o) => format!("dyn.{}", kebab(o)),
            Command::AllAcceptance(_) => "all-acceptance".into(),
        }
    }
}

fn kebab<T: Serialize>(op: &T) -> String {
    serde_json::to_value(op)
        .ok()
        .and_then(|v| v.get("op").and_then(|s| s.as_str()).map(String::from))
        .unwrap_or_default()
}

// ---- blocks ----

#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum BlocksOp {
    /// Generate a plan and validate its three conditions.
    Plan(PlanArgs),
    /// Sweep #(A−A)/#A over the intermediate sets A(k, r).
    Tempelman(TempelmanArgs),
    /// Square-block divergence witness in ℤ².
    Diverge(DivergeArgs),
    /// #E_n for identity enumerations.
    CountEn(CountArgs),
}

#[derive(Parser, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlanArgs {
    #[arg(long, default_value_t = 6)]
    pub blocks: usize,
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    /// Regularity constant C.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
}

#[derive(Parser, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TempelmanArgs {
    #[arg(long, default_value_t = 8)]
    pub blocks: usize,
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// Evaluate every r instead of the breakpoint candidates.
    #[arg(long)]
    pub exhaustive: bool,
}

#[derive(Parser, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DivergeArgs {
    #[arg(long, default_value_t = 5)]
    pub k_max: usize,
}

#[derive(Parser, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CountArgs {
    #[arg(long, default_value_t = 100_000)]
    pub n: u64,
}

// ---- random ----

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Speckled,
    Plaid,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RandomAction {
    Sample,
    Profile,
    Sweep,
    Enumerate,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Speckled => "speckled",
            Family::Plaid => "plaid",
        }
    }
}

impl RandomAction {
    pub fn name(&self) -> &'static str {
        match self {
            RandomAction::Sample => "sample",
            RandomAction::Profile => "profile",
            RandomAction::Sweep => "sweep",
            RandomAction::Enumerate => "enumerate",
        }
    }
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomArgs {
    #[arg(value_enum)]
    pub family: Family,
    #[arg(value_enum)]
    pub action: RandomAction,
    #[command(flatten)]
    #[serde(flatten)]
    pub params: RandomParams,
}

#[derive(Parser, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RandomParams {
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Speckled sparsity γ ∈ (0, d).
    #[arg(long, default_value_t = 0.8)]
    pub gamma: f64,
    /// Plaid sparsity α ∈ (0, 1).
    #[arg(long, default_value_t = 0.4)]
    pub alpha: f64,
    #[arg(long, default_value_t = 4)]
    pub jmin: u32,
    #[arg(long, default_value_t = 8)]
    pub jmax: u32,
    /// Seeds in a sweep (seed, seed + 1, …).
    #[arg(long, default_value_t = 10)]
    pub trials: u64,
    /// Points to enumerate.
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
}

// ---- arith ----

#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum ArithOp {
    /// Prime schedule.
    Schedule(ScheduleArgs),
    /// Build the curve set and check its block conditions.
    Build(BuildArgs),
    /// Exhaustive Weil-bound check on one prime.
    Weil(WeilArgs),
    /// ℓ¹ norm of the smoothed multiplier ψ̂.
    Psi(PsiArgs),
    /// Transfer operators Γ₁, Γ₂ and the majorization of μ‴.
    Transfer(TransferArgs),
    /// Oscillation bookkeeping along lacunary times.
    Osc(OscArgs),
    /// Weil bound for a product of blocks.
    Product(ProductArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    Ratio,
    DyadicHalf,
}

#[derive(Parser, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScheduleArgs {
    #[arg(long, value_enum, default_value_t = ScheduleKind::Ratio)]
    pub mode: ScheduleKind,
    #[arg(long, default_value_t = 2.0)]
    pub c: f64,
    #[arg(long, default_value_t = 4.0)]
    pub cap: f64,
    #[arg(long, default_value_t = 5)]
    pub first: u64,
    #[arg(long, default_value_t = 8)]
    pub count: usize,
}

#[derive(Parser, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BuildArgs {
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 1)]
    pub q: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub schedule: ScheduleArgs,
}

#[derive(Parser, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WeilArgs {
    #[arg(long, default_value_t = 7)]
    pub p: u64,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
}

#[derive(Parser, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PsiArgs {
    #[arg(long, default_value_t = 11)]
    pub p: u64,
    /// Modulation η; defaults to 1/(2p).
    #[arg(long)]
    pub eta: Option<f64>,
    /// Admissible range |η| ≤ constant/p.
    #[arg(long, default_value_t = 1.0)]
    pub eta_constant: f64,
}

#[derive(Parser, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TransferArgs {
    #[arg(long, default_value_t = 11)]
    pub p: u64,
    #[arg(long, default_value_t = 1)]
    pub q: usize,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Random frequencies for the Fourier identity.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
}

#[derive(Parser, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OscArgs {
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 1)]
    pub q: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [5u64, 11, 23, 47, 97])]
    pub primes: Vec<u64>,
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    #[arg(long, default_value_t = 64)]
    pub torus: usize,
    #[arg(long, default_value_t = 2.0)]
    pub lacunary_ratio: f64,
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
}

#[derive(Parser, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProductArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [5u64, 7])]
    pub primes: Vec<u64>,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
}

// ---- group ----

#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum GroupOp {
    /// Word-ball growth by BFS.
    Ball(BallArgs),
    /// Block plan in the group and its Tempelman ratios.
    Blocks(GroupBlocksArgs),
    /// Random subset profile across dyadic scales.
    Random(GroupRandomArgs),
    /// ‖(ν̃∗ν)^M‖ bounds and a sampled operator-norm check.
    Ttstar(TtStarArgs),
    /// Gap profile and thinning of a sequence.
    Gaps(GapsArgs),
    /// Sampled lower bound on the upper Banach density.
    Banach(BanachArgs),
}

#[derive(Parser, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BallArgs {
    /// z1..z4, king1..king4, heis3 or cyclic:N.
    #[arg(long, default_value = "heis3")]
    pub group: String,
    #[arg(long, default_value_t = 18)]
    pub n: u32,
    /// Ratio window [lo, hi]; defaults to [2n/3, n].
    #[arg(long, value_delimiter = ',')]
    pub window: Vec<u32>,
}

#[derive(Parser, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GroupBlocksArgs {
    #[arg(long, default_value = "heis3")]
    pub group: String,
    #[arg(long, default_value_t = 3)]
    pub blocks: usize,
    /// ℓ₁.
    #[arg(long, default_value_t = 2)]
    pub first: u32,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
}

#[derive(Parser, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GroupRandomArgs {
    #[arg(long, default_value = "z2")]
    pub group: String,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 5)]
    pub jmax: u32,
}

#[derive(Parser, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TtStarArgs {
    #[arg(long, default_value = "z2")]
    pub group: String,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 3)]
    pub j: u32,
    /// Largest power M (1..3).
    #[arg(long, default_value_t = 2)]
    pub m: u32,
    /// Random test functions for the operator-norm check.
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapSource {
    /// Base-3 digits in {0, 1} on ℤ.
    Cantor,
    /// Speckled enumeration on ℤ^d (sup-norm order).
    Speckled,
}

#[derive(Parser, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GapsArgs {
    #[arg(long, default_value = "king2")]
    pub group: String,
    #[arg(long, value_enum, default_value_t = GapSource::Speckled)]
    pub source: GapSource,
    #[arg(long, default_value_t = 12_000)]
    pub count: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [1u32, 2, 3, 4, 6, 8, 12, 16])]
    pub grid: Vec<u32>,
    #[arg(long, default_value_t = 0.05)]
    pub budget: f64,
    #[arg(long, default_value_t = 0.8)]
    pub gamma: f64,
    #[arg(long, default_value_t = 14)]
    pub jmax: u32,
    /// Index k at which n_k/k is reported.
    #[arg(long, default_value_t = 10_000)]
    pub at: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensitySource {
    /// Speckled set (lattice models only).
    Speckled,
    /// Random subset with P(g) = ρ(g, e)^{−α}.
    Random,
}

#[derive(Parser, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BanachArgs {
    #[arg(long, default_value = "king2")]
    pub group: String,
    #[arg(long, value_enum, default_value_t = DensitySource::Speckled)]
    pub source: DensitySource,
    #[arg(long, value_delimiter = ',', default_values_t = [16u32, 32, 64])]
    pub n: Vec<u32>,
    /// Random shifts drawn from 𝔸^{2N} (the identity is always included).
    #[arg(long, default_value_t = 20)]
    pub shifts: usize,
    #[arg(long, default_value_t = 0.8)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
}

// ---- dyn ----

#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum DynOp {
    /// Ergodic averages A_N f(x) along an enumeration.
    Run(RunArgs),
    /// sup_j |φ∗μ_j| on a window and its distribution function.
    Maximal(MaximalArgs),
    /// Transference inequality on a finite torus.
    Transfer(DynTransferArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemKind {
    /// ℤ² acting on 𝕋² by the rotations √2 − 1 and √3 − 1, one per coordinate.
    Rotation,
    /// ℤ² acting on ℤ_L² by coordinate shifts.
    Finite,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SequenceKind {
    /// The curve set in ℤ², evaluated at complete blocks.
    Arith,
    /// All of ℤ² in sup-norm order, evaluated at dyadic counts.
    Lattice,
    /// The full box [0, L)², a complete orbit of the finite system.
    Orbit,
}

#[derive(Parser, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunArgs {
    #[arg(long, value_enum, default_value_t = SystemKind::Rotation)]
    pub system: SystemKind,
    #[arg(long, value_enum, default_value_t = SequenceKind::Arith)]
    pub sequence: SequenceKind,
    /// Curve-set q.
    #[arg(long, default_value_t = 1)]
    pub q: usize,
    /// Largest N: total length of the enumeration.
    #[arg(long, default_value_t = 1_000_000)]
    pub limit: u64,
    /// Finite torus side L.
    #[arg(long, default_value_t = 31)]
    pub side: u64,
    /// Declared threshold on |A_N f − ∫f| at the last N.
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MaximalFamily {
    /// Normalized sup-norm balls of radius 2^j.
    Balls,
    /// Speckled measures μ_j.
    Speckled,
}

#[derive(Parser, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MaximalArgs {
    #[arg(long, value_enum, default_value_t = MaximalFamily::Speckled)]
    pub family: MaximalFamily,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 0.8)]
    pub gamma: f64,
    #[arg(long, default_value_t = 1)]
    pub jmin: u32,
    #[arg(long, default_value_t = 5)]
    pub jmax: u32,
    #[arg(long, default_value_t = 64)]
    pub window: i64,
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 0.25, 0.125, 0.0625])]
    pub lambdas: Vec<f64>,
}

#[derive(Parser, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DynTransferArgs {
    #[arg(long, default_value_t = 128)]
    pub side: u64,
    /// Averaging radius K of the transference window.
    #[arg(long, default_value_t = 16)]
    pub k: u32,
    /// ℓ¹ radii of the averaging family.
    #[arg(long, value_delimiter = ',', default_values_t = [0u32, 1])]
    pub radii: Vec<u32>,
    /// Heights λ as fractions.
    #[arg(long, value_delimiter = ',', default_values = ["1/10", "1/5", "1/2"])]
    pub lambdas: Vec<String>,
    /// Location of the point mass f.
    #[arg(long, value_delimiter = ',', default_values_t = [40i64, 77])]
    pub point: Vec<i64>,
}

// ---- acceptance ----

#[derive(Parser, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AcceptanceArgs {
    /// Run only these criteria (1..15); empty runs all.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<u8>,
}

clap_default!(
    PlanArgs,
    TempelmanArgs,
    DivergeArgs,
    CountArgs,
    RandomParams,
    ScheduleArgs,
    BuildArgs,
    WeilArgs,
    PsiArgs,
    TransferArgs,
    OscArgs,
    ProductArgs,
    BallArgs,
    GroupBlocksArgs,
    GroupRandomArgs,
    TtStarArgs,
    GapsArgs,
    BanachArgs,
    RunArgs,
    MaximalArgs,
    DynTransferArgs,
    AcceptanceArgs,
);
