use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "scalent", version, about = "Epsilon-entropy, transport distances and scaling-entropy profiles")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    /// Re-run a manifest and compare output hashes.
    #[arg(long, value_name = "MANIFEST")]
    pub replay: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Worker threads (defaults to one per core).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Master seed.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Report entropies in bits instead of nats.
    #[arg(long, global = true)]
    pub bits: bool,
    /// Most windows an exact realization may enumerate.
    #[arg(long = "exact-cap", global = true, default_value_t = scalent_core::systems::DEFAULT_EXACT_CAP)]
    pub exact_cap: usize,
    /// Fixed-point prefix length for substitution statistics.
    #[arg(long = "prefix-len", global = true, default_value_t = scalent_core::systems::DEFAULT_PREFIX_LEN)]
    pub prefix_len: usize,
    /// Flat `key = value` file; flags given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Where to write the run manifest (default: next to the first output).
    #[arg(long, global = true, value_name = "FILE")]
    pub manifest: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Finite metric triples: validation, sampling, summaries.
    #[command(subcommand)]
    Triple(TripleCmd),
    /// Epsilon-entropy and its relatives.
    #[command(subcommand)]
    Entropy(EntropyCmd),
    /// Symbolic systems and their averaged-metric triples.
    #[command(subcommand)]
    System(SystemCmd),
    /// Entropy profiles over (eps, n) grids and asymptotic fits.
    #[command(subcommand)]
    Scale(ScaleCmd),
    /// Distributions of sampled distance matrices.
    #[command(subcommand)]
    Mdist(MdistCmd),
    /// Distances between triples.
    #[command(subcommand)]
    Dist(DistCmd),
    /// Partition-function metrics.
    #[command(subcommand)]
    Omega(OmegaCmd),
}

#[derive(Args, Debug, Clone)]
pub struct OutArg {
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum TripleCmd {
    /// Checks a matrix or triple file; exit 1 on any violation.
    Validate {
        file: PathBuf,
        /// Also require positive off-diagonal distances.
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// Size, diameter and mean distance of a triple file.
    Info {
        file: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Draws `n` points from a source and writes the sampled triple.
    Sample {
        #[arg(long)]
        source: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        replica: u64,
        /// Window length for symbolic sources.
        #[arg(long, default_value_t = 8)]
        horizon: usize,
        /// Discretization for rotations.
        #[arg(long, default_value_t = 256)]
        m: usize,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Subcommand, Debug)]
pub enum EntropyCmd {
    /// Epsilon-entropy of a triple file.
    Eps {
        #[arg(long)]
        triple: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        /// exact, greedy or pack-lb.
        #[arg(long, default_value = "exact")]
        method: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// Entropy of the best discrete approximation in the transport metric.
    Kantorovich {
        #[arg(long)]
        triple: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        /// exact-tiny or greedy.
        #[arg(long, default_value = "exact-tiny")]
        mode: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// Whether a triple contains at least `eps * n` points pairwise `eps` apart.
    Admissible {
        #[arg(long)]
        triple: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        /// exact or greedy.
        #[arg(long, default_value = "exact")]
        method: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// Smallest heaviest-first index set holding `1 - delta` of the mass.
    Tail {
        /// Probability vector, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        delta: Vec<f64>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Entropy of random subsamples against the full source.
    Subsample {
        #[arg(long)]
        source: String,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 50)]
        replicas: usize,
        #[arg(long, default_value = "exact")]
        method: String,
        /// iid or identity.
        #[arg(long, default_value = "iid")]
        scheme: String,
        #[arg(long, default_value_t = 8)]
        horizon: usize,
        #[arg(long, default_value_t = 256)]
        m: usize,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Subcommand, Debug)]
pub enum SystemCmd {
    /// Structural facts about a system.
    Info {
        #[arg(long)]
        system: String,
        /// Factor lengths to count.
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
        lengths: Vec<usize>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Windows of length `n` with their probabilities.
    Law {
        #[arg(long)]
        system: String,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// The averaged-metric triple at horizon `n`, as a triple file.
    Triple {
        #[arg(long)]
        system: String,
        #[arg(long)]
        n: usize,
        /// exact or montecarlo:M.
        #[arg(long, default_value = "exact")]
        realization: String,
        #[arg(long, default_value_t = 256)]
        m: usize,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Args, Debug, Clone)]
pub struct FitArgs {
    #[arg(long)]
    pub profile: PathBuf,
    /// auto, or a comma list of bounded, log, power, linear, exp, adic=1/0/1.
    #[arg(long, default_value = "auto")]
    pub classes: String,
    #[arg(long, default_value_t = 1)]
    pub nmin: usize,
}

#[derive(Subcommand, Debug)]
pub enum ScaleCmd {
    /// Computes an entropy profile over an (eps, n) grid.
    Grid {
        #[arg(long)]
        system: String,
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        /// Comma list; `a..b` ranges are inclusive.
        #[arg(long, required = true)]
        n: String,
        #[arg(long, default_value = "exact")]
        method: String,
        #[arg(long, default_value = "exact")]
        realization: String,
        #[arg(long, default_value_t = 1)]
        replicas: usize,
        /// average, or omega for the partition-function metric at z = 1 - 1/n.
        #[arg(long, default_value = "average")]
        metric: String,
        /// Shift terms kept by the omega metric.
        #[arg(long = "omega-terms", default_value_t = 12)]
        omega_terms: usize,
        #[arg(long, default_value_t = 256)]
        m: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Fits a growth class to every eps row.
    Fit {
        #[command(flatten)]
        fit: FitArgs,
        /// Also write a log-log SVG chart.
        #[arg(long)]
        plot: Option<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Checks that the fitted class does not depend on eps.
    Stability {
        #[command(flatten)]
        fit: FitArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Upper and lower entropy dimension read from tail slopes.
    Dimension {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long, default_value_t = 1)]
        nmin: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Grid proxy of slow entropy for a scale family.
    Slow {
        #[arg(long)]
        profile: PathBuf,
        /// power, exp, log-power or constant.
        #[arg(long)]
        family: String,
        /// Comma list of t values; `a..b:step` ranges allowed.
        #[arg(long)]
        t: String,
        #[arg(long, default_value_t = 1)]
        nmin: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Pointwise exponential of a profile.
    Exp {
        #[arg(long)]
        profile: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// SVG chart of a profile, one series per eps.
    Plot {
        #[arg(long)]
        profile: PathBuf,
        /// Linear (n, H) axes instead of log-log.
        #[arg(long)]
        linear: bool,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Args, Debug, Clone)]
pub struct SampleArgs {
    #[arg(long)]
    pub system: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub replicas: usize,
    /// Window length for symbolic systems.
    #[arg(long, default_value_t = 8)]
    pub horizon: usize,
    #[arg(long, default_value_t = 256)]
    pub m: usize,
}

#[derive(Subcommand, Debug)]
pub enum MdistCmd {
    /// Sampled matrices, one matrix-file block per replica.
    Sample {
        #[command(flatten)]
        s: SampleArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Eigenvalues of leading minors as CSV.
    Spectra {
        #[command(flatten)]
        s: SampleArgs,
        /// Minor sizes (default 1, 2, 4, ..., n).
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        /// Also write the interlacing and trace summary here.
        #[arg(long)]
        summary: Option<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Two-sample test of invariance under relabeling.
    Invariance {
        #[command(flatten)]
        s: SampleArgs,
        /// spectral or entrywise.
        #[arg(long, default_value = "spectral")]
        statistic: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// Leading-block consistency over a range of seeds.
    Projectivity {
        #[arg(long)]
        system: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        seeds: u64,
        #[arg(long, default_value_t = 8)]
        horizon: usize,
        #[arg(long, default_value_t = 256)]
        m: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Entropy of growing corner minors of one sampled matrix.
    Corner {
        #[command(flatten)]
        s: SampleArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Subcommand, Debug)]
pub enum DistCmd {
    /// Coupling and transport distances between two triple files.
    Pair {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// distm, distk or both.
        #[arg(long, default_value = "both")]
        metric: String,
        /// exact or heur.
        #[arg(long, default_value = "exact")]
        mode: String,
        /// Random restarts for the local searches.
        #[arg(long, default_value_t = 8)]
        budget: usize,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Subcommand, Debug)]
pub enum OmegaCmd {
    /// The truncated partition-function triple, as a triple file.
    Triple {
        #[arg(long)]
        system: String,
        #[arg(long)]
        z: f64,
        /// Truncation tolerance; ignored when --terms is given.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        terms: Option<usize>,
        #[arg(long, default_value = "exact")]
        realization: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// Worst case of the pointwise comparison with the averaged metric.
    Margin {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Profiles of both metrics on one grid and their fitted classes.
    Compare {
        #[arg(long)]
        system: String,
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        #[arg(long, required = true)]
        n: String,
        #[arg(long = "omega-terms", default_value_t = 12)]
        omega_terms: usize,
        #[arg(long, default_value = "auto")]
        classes: String,
        #[arg(long, default_value_t = 1)]
        nmin: usize,
        #[command(flatten)]
        out: OutArg,
    },
}
