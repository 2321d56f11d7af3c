use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use quasisym_core::convexity::CertificateMode;
use quasisym_core::nonlin::{SourceKind, Weight};

#[derive(Parser, Debug)]
#[command(
    name = "quasisym",
    version,
    about = "Change of variable, convexity certificates and symmetry checks for quasi-linear elliptic problems",
    args_override_self = true
)]
pub struct Cli {
    /// Flat `key = value` file whose keys mirror the subcommand's flags.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Γ/Π/Q_p certificates for convexity of h and h'.
    Certify(CertifyArgs),
    /// Smallest certified exponent p_k.
    FindPk(FindPkArgs),
    /// Samples h'' or h''' over an s-interval.
    Scan(ScanArgs),
    /// Tabulates g and g' on [-smax, smax].
    TabulateG(TabulateArgs),
    /// Radial solution on a ball or annulus by shooting.
    SolveRadial(SolveRadialArgs),
    /// Morse index of a radial solution file.
    Morse(MorseArgs),
    /// Nodal-domain bound for a radial solution file.
    NodalCheck(NodalArgs),
    /// Solution on an x1-symmetric rectangle by Newton's method.
    SolvePlanar(SolvePlanarArgs),
    /// Reflection and symmetry diagnostics for a solution file.
    Diagnose(DiagnoseArgs),
    /// Subcritical growth bound ((k+1)N+2)/(N-2).
    GrowthCheck(GrowthArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    Sharp,
    Sufficient,
}

impl From<ModeArg> for CertificateMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Sharp => CertificateMode::Sharp,
            ModeArg::Sufficient => CertificateMode::Sufficient,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainArg {
    Ball,
    Annulus,
}

/// The nonlinearity. Every field is optional so that values stored in a
/// solution file can fill the gaps.
#[derive(Args, Debug, Clone, Default)]
pub struct SpecArgs {
    /// Diffusion exponent in a(s) = 1 + |s|^k [default: 2].
    #[arg(long)]
    pub k: Option<f64>,
    /// Source exponent.
    #[arg(long)]
    pub p: Option<f64>,
    /// Constant diffusion a ≡ C instead of 1 + |s|^k.
    #[arg(long = "const-a", value_name = "C")]
    pub const_a: Option<f64>,
    /// Source sign convention [default: positive-part].
    #[arg(long, value_parser = clap::value_parser!(SourceKind))]
    pub fsign: Option<SourceKind>,
    /// Weight ψ as kind:value (const, radial, gauss, lorentz) [default: const:1].
    #[arg(long, value_parser = clap::value_parser!(Weight))]
    pub psi: Option<Weight>,
    /// Half-width of the g table; grows automatically when omitted.
    #[arg(long = "table-smax")]
    pub table_smax: Option<f64>,
    /// Integration tolerance for g [default: 1e-12].
    #[arg(long = "g-tol")]
    pub g_tol: Option<f64>,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    #[arg(long, default_value_t = 2.0)]
    pub k: f64,
    #[arg(long)]
    pub p: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Sharp)]
    pub mode: ModeArg,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FindPkArgs {
    #[arg(long, default_value_t = 2.0)]
    pub k: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Sharp)]
    pub mode: ModeArg,
    #[arg(long, default_value = "1e-3")]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// 2 for h'', 3 for h'''.
    #[arg(long, default_value_t = 2)]
    pub order: u32,
    #[arg(long, default_value_t = 0.001)]
    pub smin: f64,
    #[arg(long, default_value_t = 2.0)]
    pub smax: f64,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// CSV path (`s,value`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TabulateArgs {
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long = "const-a", value_name = "C")]
    pub const_a: Option<f64>,
    #[arg(long, default_value_t = 20.0)]
    pub smax: f64,
    #[arg(long = "g-tol", default_value = "1e-12")]
    pub g_tol: f64,
    /// CSV path (`s,g,gprime`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SolveRadialArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long = "N", default_value_t = 3)]
    pub dim: usize,
    #[arg(long, value_enum, default_value_t = DomainArg::Ball)]
    pub domain: DomainArg,
    /// Ball radius.
    #[arg(long = "R", default_value_t = 1.0)]
    pub radius: f64,
    /// Annulus inner radius.
    #[arg(long = "R0", default_value_t = 1.0)]
    pub inner: f64,
    /// Annulus outer radius.
    #[arg(long = "R1", default_value_t = 2.0)]
    pub outer: f64,
    /// Interior zeros of the profile.
    #[arg(long, default_value_t = 0)]
    pub nodes: usize,
    /// Grid intervals.
    #[arg(long, default_value_t = 4000)]
    pub grid: usize,
    #[arg(long = "ode-tol", default_value = "1e-12")]
    pub ode_tol: f64,
    #[arg(long = "bc-tol", default_value = "1e-9")]
    pub bc_tol: f64,
    #[arg(long = "max-bisections", default_value_t = 200)]
    pub max_bisections: usize,
    /// First shooting parameter tried.
    #[arg(long = "initial", default_value_t = 1.0)]
    pub initial: f64,
    /// CSV path (`r,v,u,dv`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MorseArgs {
    /// Radial solution CSV.
    #[arg(long)]
    pub solution: PathBuf,
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Highest angular mode; stops at the first mode without negative eigenvalues when omitted.
    #[arg(long = "l-max")]
    pub l_max: Option<usize>,
    /// Eigenvalue grid intervals; reuses the solution grid when omitted.
    #[arg(long = "modes-grid")]
    pub modes_grid: Option<usize>,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-mode CSV path.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct NodalArgs {
    #[arg(long)]
    pub solution: PathBuf,
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long = "l-max")]
    pub l_max: Option<usize>,
    #[arg(long = "modes-grid")]
    pub modes_grid: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SolvePlanarArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Half-width L of (-L, L) x (0, H).
    #[arg(long = "L", default_value_t = 1.0)]
    pub half_width: f64,
    #[arg(long = "H", default_value_t = 1.0)]
    pub height: f64,
    /// Intervals along x1 (even).
    #[arg(long, default_value_t = 128)]
    pub n1: usize,
    #[arg(long, default_value_t = 64)]
    pub n2: usize,
    #[arg(long, default_value = "1e-9")]
    pub tol: f64,
    #[arg(long = "max-iterations", default_value_t = 60)]
    pub max_iterations: usize,
    #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
    pub tilt: f64,
    /// CSV path (`x1,x2,v,u`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DiagnoseArgs {
    /// Planar or radial solution CSV.
    #[arg(long)]
    pub solution: PathBuf,
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Residual below which the field counts as a solution.
    #[arg(long = "solution-tol", default_value = "1e-6")]
    pub solution_tol: f64,
    /// Directions sampled for the foliated-Schwarz test.
    #[arg(long, default_value_t = 360)]
    pub directions: usize,
    /// Half the nodes per axis when a radial profile is spread over a disk.
    #[arg(long = "half-nodes", default_value_t = 64)]
    pub half_nodes: usize,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GrowthArgs {
    #[arg(long, default_value_t = 2.0)]
    pub k: f64,
    #[arg(long)]
    pub p: f64,
    #[arg(long = "N", default_value_t = 3)]
    pub dim: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
