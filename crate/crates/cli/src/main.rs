use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use qkd_mops::analysis::{self, sig6};
use qkd_mops::attack_sim::{self, McRow};
use qkd_mops::cut_combinatorics::{self as cuts, ENUMERATION_CAP};
use qkd_mops::key_protocol::{self as proto, Transcript};
use qkd_mops::net_model::{self, LSchemeParams, Network, NodeId, PathSystem};
use qkd_mops::path_routing;

#[derive(Parser)]
#[command(
    name = "qkd-mops",
    version,
    about = "Compromise analysis of multi-path key relay in trusted-node QKD networks"
)]
struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

/// Where a command takes its network from: a file, disjoint paths, or an l-scheme.
#[derive(Args, Clone)]
struct NetSource {
    /// Network file in the line format written by gen-mnop / gen-lscheme.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["lengths", "n"])]
    net: Option<PathBuf>,
    /// Disjoint path lengths, e.g. 2,3.
    #[arg(long, value_delimiter = ',', conflicts_with = "n")]
    lengths: Option<Vec<usize>>,
    /// Columns of an l-scheme (with --l).
    #[arg(long, requires = "l")]
    n: Option<usize>,
    /// Rows of an l-scheme (with --n).
    #[arg(long, requires = "n")]
    l: Option<usize>,
}

impl NetSource {
    /// Loads the network; `p` overrides every trust value when given.
    fn load(&self, p: Option<f64>) -> anyhow::Result<Network> {
        let base = p.unwrap_or(0.0);
        let net = if let Some(path) = &self.net {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            net_model::parse_network(&text)?
        } else if let Some(lengths) = &self.lengths {
            net_model::build_mnop(lengths, base)?
        } else if let (Some(n), Some(l)) = (self.n, self.l) {
            net_model::build_lscheme(&LSchemeParams::new(n, l, base)?)?
        } else {
            return Err(usage("give --net FILE, --lengths, or --n with --l"));
        };
        Ok(match p {
            Some(p) => net.with_uniform_trust(p)?,
            None => net,
        })
    }

    fn label(&self) -> (String, Option<usize>, Option<usize>) {
        if self.net.is_some() {
            ("file".into(), None, None)
        } else if let Some(lengths) = &self.lengths {
            let n = (lengths.iter().all(|&x| x == lengths[0])).then_some(lengths[0]);
            ("mnop".into(), n, Some(lengths.len()))
        } else {
            ("lscheme".into(), self.n, self.l)
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    HopByHop,
    HopByHopCombined,
    MopsBroadcast,
    MopsPathcover,
}

#[derive(Subcommand)]
enum Command {
    /// Network of vertex-disjoint paths with the given lengths.
    GenMnop {
        #[arg(long, value_delimiter = ',', required = true)]
        lengths: Vec<usize>,
        #[arg(long, default_value_t = 0.0)]
        p: f64,
    },
    /// The l-scheme: l rows of n nodes with rungs every (l-1)-th column.
    GenLscheme {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 0.0)]
        p: f64,
    },
    /// Minimum A-B vertex cut.
    MinCut {
        #[command(flatten)]
        src: NetSource,
    },
    /// Minimum-total-length vertex-disjoint A-B paths.
    DisjointPaths {
        #[command(flatten)]
        src: NetSource,
        #[arg(long)]
        count: usize,
    },
    /// Number of disjoint paths minimizing the linearized compromise bound.
    OptimizePaths {
        #[command(flatten)]
        src: NetSource,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        max_paths: Option<usize>,
    },
    /// Minimal cuts per column of the l-scheme.
    Alpha {
        #[arg(long)]
        l: usize,
    },
    /// Exact minimal-cut count of the (n, l) scheme by dynamic programming.
    CountMinCuts {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
    },
    /// Brute-force count of disconnecting subsets, for one size or all sizes.
    CountCuts {
        #[command(flatten)]
        src: NetSource,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Check the cut-growth inequalities on the (n, l) scheme.
    VerifyBeta {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
    },
    /// Exact compromise probability by enumeration.
    ExactProb {
        #[command(flatten)]
        src: NetSource,
        /// Uniform trust; omit to use the trust values in --net.
        #[arg(long)]
        p: Option<f64>,
    },
    /// Upper bound alpha(l) n p^l / (1 - r).
    Bound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        r: f64,
    },
    /// Monte Carlo estimate of the compromise probability.
    McAttack {
        #[command(flatten)]
        src: NetSource,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Optimal finite-resource attack on disjoint paths, with grid-search check.
    Correlated {
        #[arg(long, value_delimiter = ',', required = true)]
        lengths: Vec<usize>,
        #[arg(long)]
        alpha_slope: f64,
        #[arg(long)]
        resources: f64,
        #[arg(long, default_value_t = 10)]
        grid_steps: usize,
    },
    /// One path versus two on the crossover example graph.
    Crossover {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
    },
    /// Efficiency of the l-scheme against l+1 disjoint paths.
    Eta {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        r: f64,
    },
    /// gamma(mu) = mu (1 - e^(-1/mu)), optionally with v_n(mu).
    Gamma {
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        n: Option<usize>,
        /// Also report 1 / gamma^(l+1).
        #[arg(long)]
        l: Option<usize>,
    },
    /// Range of p where the l-scheme bound applies and wins.
    PRange {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 0.1)]
        r: f64,
    },
    /// Effect of one mid-column rung on the two-cut count of two paths.
    SingleLink {
        #[arg(long)]
        n: usize,
    },
    /// Run a key relay protocol and print its public transcript.
    Simulate {
        #[command(flatten)]
        src: NetSource,
        #[arg(long, value_enum)]
        scheme: SchemeArg,
        #[arg(long, default_value_t = 128)]
        key_length: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Whether compromised nodes learn the key; all subsets when none given.
    Leakage {
        #[command(flatten)]
        src: NetSource,
        #[arg(long, value_enum)]
        scheme: SchemeArg,
        #[arg(long, value_delimiter = ',')]
        compromised: Option<Vec<String>>,
    },
    /// p-range grids over n and l.
    FigureData {
        #[arg(long, default_value_t = 0.1)]
        r: f64,
        #[arg(long, default_value_t = 5)]
        n_min: usize,
        #[arg(long, default_value_t = 100)]
        n_max: usize,
        #[arg(long, default_value_t = 2)]
        l_min: usize,
        #[arg(long, default_value_t = 10)]
        l_max: usize,
    },
}

/// Bad input from the command line, reported with exit code 2.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let user = err.downcast_ref::<UsageError>().is_some()
                || err
                    .downcast_ref::<qkd_mops::Error>()
                    .is_some_and(qkd_mops::Error::is_user_error);
            ExitCode::from(if user { 2 } else { 1 })
        }
    }
}

fn csv_out(out: Box<dyn Write>) -> csv::Writer<Box<dyn Write>> {
    csv::Writer::from_writer(out)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let out: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match cli.command {
        Command::GenMnop { lengths, p } => emit_network(out, &net_model::build_mnop(&lengths, p)?),
        Command::GenLscheme { n, l, p } => emit_network(
            out,
            &net_model::build_lscheme(&LSchemeParams::new(n, l, p)?)?,
        ),
        Command::MinCut { src } => {
            let net = src.load(None)?;
            let cut = path_routing::min_vertex_cut(&net)?;
            table(
                out,
                &["cut_order", "nodes"],
                [vec![cut.len().to_string(), join(&cut)]],
            )
        }
        Command::DisjointPaths { src, count } => {
            let net = src.load(None)?;
            let sys = path_routing::find_disjoint_paths(&net, count)?;
            let rows = sys
                .paths()
                .iter()
                .enumerate()
                .map(|(j, path)| vec![(j + 1).to_string(), path.len().to_string(), join(path)]);
            table(out, &["path", "length", "nodes"], rows)
        }
        Command::OptimizePaths { src, p, max_paths } => {
            let net = src.load(None)?;
            let max = max_paths.unwrap_or(net.intermediate_count().max(1));
            let choice = path_routing::optimize_path_count(&net, p, max)?;
            let rows = choice.candidates.iter().map(|c| {
                vec![
                    c.count.to_string(),
                    c.total_nodes.to_string(),
                    sig6(c.bound),
                    (c.count == choice.best_count).to_string(),
                ]
            });
            table(out, &["paths", "total_nodes", "bound", "best"], rows)
        }
        Command::Alpha { l } => {
            let closed = cuts::alpha_closed(l)?;
            let matrix = if l >= 2 {
                cuts::alpha_matrix(l)?.to_string()
            } else {
                "1".into()
            };
            table(
                out,
                &["l", "alpha_closed", "alpha_matrix"],
                [vec![l.to_string(), sig6(closed), matrix]],
            )
        }
        Command::CountMinCuts { n, l } => {
            let c = cuts::count_min_cuts_dp(n, l)?;
            table(
                out,
                &["n", "l", "min_cuts"],
                [vec![n.to_string(), l.to_string(), c.to_string()]],
            )
        }
        Command::CountCuts { src, k } => {
            let net = src.load(None)?;
            match k {
                Some(k) => {
                    let c = cuts::count_cuts_bruteforce(&net, k)?;
                    table(out, &["k", "beta"], [vec![k.to_string(), c.to_string()]])
                }
                None => Ok(cuts::cut_census(&net)?.write_csv(out)?),
            }
        }
        Command::VerifyBeta { n, l } => {
            let rep = cuts::verify_beta_lemma(n, l)?;
            for v in &rep.violations {
                eprintln!("violation: {v}");
            }
            table(
                out,
                &[
                    "n",
                    "l",
                    "result",
                    "max_ratio",
                    "max_ratio_k",
                    "leading_ratio",
                ],
                [vec![
                    n.to_string(),
                    l.to_string(),
                    if rep.passed() { "PASS" } else { "FAIL" }.into(),
                    sig6(rep.max_ratio),
                    rep.max_ratio_k.to_string(),
                    sig6(rep.leading_ratio()),
                ]],
            )
        }
        Command::ExactProb { src, p } => {
            let net = src.load(p)?;
            let exact = match net.uniform_trust() {
                Some(p) => cuts::exact_hack_probability(&net, p)?,
                None => cuts::exact_hack_probability_weighted(&net)?,
            };
            let p = net
                .uniform_trust()
                .map(|p| p.to_string())
                .unwrap_or_default();
            table(out, &["p", "exact"], [vec![p, exact.to_string()]])
        }
        Command::Bound { n, l, p, r } => {
            let b = cuts::hack_prob_upper_bound(n, l, p, r)?;
            table(
                out,
                &["n", "l", "p", "r", "bound"],
                [vec![
                    n.to_string(),
                    l.to_string(),
                    p.to_string(),
                    r.to_string(),
                    b.to_string(),
                ]],
            )
        }
        Command::McAttack {
            src,
            p,
            trials,
            seed,
        } => {
            let net = src.load(p)?;
            let result = attack_sim::simulate_uncorrelated(&net, trials, seed)?;
            let exact = if net.intermediate_count() <= ENUMERATION_CAP {
                Some(cuts::exact_hack_probability_weighted(&net)?)
            } else {
                None
            };
            let (scheme, n, l) = src.label();
            let row = McRow {
                scheme,
                n,
                l,
                p: net.uniform_trust().unwrap_or(f64::NAN),
                result,
                exact,
            };
            Ok(attack_sim::write_mc_csv(&[row], out)?)
        }
        Command::Correlated {
            lengths,
            alpha_slope,
            resources,
            grid_steps,
        } => {
            let net = net_model::build_mnop(&lengths, 0.0)?;
            let sys = path_routing::find_disjoint_paths(&net, lengths.len())?;
            let (_, optimal) = attack_sim::correlated_optimal_attack(&sys, alpha_slope, resources)?;
            let grid = if lengths.iter().sum::<usize>() <= attack_sim::GRID_NODE_CAP {
                let g = attack_sim::correlated_grid_oracle(
                    &lengths,
                    alpha_slope,
                    resources,
                    grid_steps,
                )?;
                (sig6(g.probability), g.single_node_paths().to_string())
            } else {
                eprintln!(
                    "note: grid search skipped, more than {} nodes",
                    attack_sim::GRID_NODE_CAP
                );
                (String::new(), String::new())
            };
            table(
                out,
                &[
                    "paths",
                    "alpha_r",
                    "optimal",
                    "grid_best",
                    "grid_single_node_paths",
                    "grid_steps",
                ],
                [vec![
                    lengths.len().to_string(),
                    sig6(alpha_slope * resources),
                    sig6(optimal),
                    grid.0,
                    grid.1,
                    grid_steps.to_string(),
                ]],
            )
        }
        Command::Crossover { n, p } => {
            if !(0.0..=1.0).contains(&p) {
                bail!(usage(format!("p = {p} is not a probability")));
            }
            let c = attack_sim::appendix1_crossover(n, p);
            if !c.in_regime {
                eprintln!(
                    "warning: (n+1)p = {} is not small; linearized values are rough",
                    (n + 1) as f64 * p
                );
            }
            table(
                out,
                &["n", "p", "p1", "p2", "best", "threshold", "in_regime"],
                [vec![
                    n.to_string(),
                    p.to_string(),
                    sig6(c.single),
                    sig6(c.double),
                    c.best.to_string(),
                    sig6(attack_sim::crossover_threshold(n)),
                    c.in_regime.to_string(),
                ]],
            )
        }
        Command::Eta { n, l, p, r } => {
            let rep = analysis::eta(n, l, p, r)?;
            table(
                out,
                &[
                    "n",
                    "l",
                    "p",
                    "r",
                    "compared",
                    "eta",
                    "eta_corrected",
                    "verdict",
                ],
                [vec![
                    n.to_string(),
                    l.to_string(),
                    p.to_string(),
                    r.to_string(),
                    format!("{l}-scheme vs {} disjoint paths", l + 1),
                    sig6(rep.eta),
                    sig6(rep.eta_corrected),
                    rep.verdict.to_string(),
                ]],
            )
        }
        Command::Gamma { mu, n, l } => {
            let g = analysis::gamma(mu)?;
            let mut header = vec!["mu", "gamma"];
            let mut row = vec![mu.to_string(), sig6(g)];
            if let Some(n) = n {
                header.extend(["n", "v_n"]);
                row.extend([n.to_string(), sig6(analysis::v_n(mu, n)?)]);
            }
            if let Some(l) = l {
                header.extend(["l", "correction"]);
                row.extend([l.to_string(), sig6(1.0 / g.powi(l as i32 + 1))]);
            }
            table(out, &header, [row])
        }
        Command::PRange { n, l, r } => {
            let pr = analysis::p_range(n, l, r)?;
            table(
                out,
                &[
                    "n",
                    "l",
                    "r",
                    "p_min",
                    "p_max",
                    "nonempty",
                    "p_min_corrected",
                    "nonempty_corrected",
                ],
                [vec![
                    n.to_string(),
                    l.to_string(),
                    r.to_string(),
                    sig6(pr.p_min),
                    sig6(pr.p_max),
                    pr.nonempty.to_string(),
                    pr.p_min_corrected.map(sig6).unwrap_or_default(),
                    pr.nonempty_corrected().to_string(),
                ]],
            )
        }
        Command::SingleLink { n } => {
            let f = analysis::single_link_factor(n)?;
            let base = n * n;
            let with = (f * base as f64).round() as u64;
            table(
                out,
                &["n", "two_cuts_with_link", "two_cuts_without", "ratio"],
                [vec![
                    n.to_string(),
                    with.to_string(),
                    base.to_string(),
                    sig6(f),
                ]],
            )
        }
        Command::Simulate {
            src,
            scheme,
            key_length,
            seed,
        } => {
            let net = src.load(None)?;
            let t = run_scheme(&net, scheme, key_length, seed)?;
            eprintln!(
                "{}: alice {} bob {} ({})",
                t.scheme,
                t.alice_key.bits.to_hex(),
                t.bob_key.bits.to_hex(),
                if t.keys_agree() { "agree" } else { "DIFFER" }
            );
            eprintln!("key = {}", t.space.render(&t.alice_key.combination));
            Ok(t.write_csv(out)?)
        }
        Command::Leakage {
            src,
            scheme,
            compromised,
        } => {
            let net = src.load(None)?;
            let t = run_scheme(&net, scheme, 8, 0)?;
            let rows = match compromised {
                Some(ids) => {
                    let set: BTreeSet<NodeId> = ids.into_iter().map(NodeId::from).collect();
                    let verdict = proto::leakage_oracle(&t, &set)?;
                    eprintln!("{verdict}");
                    vec![(set.into_iter().collect(), verdict)]
                }
                None => proto::leakage_sweep(&t)?,
            };
            Ok(proto::write_leakage_csv(&rows, out)?)
        }
        Command::FigureData {
            r,
            n_min,
            n_max,
            l_min,
            l_max,
        } => {
            let ns: Vec<usize> = (n_min..=n_max).collect();
            let ls: Vec<usize> = (l_min..=l_max).collect();
            let cells = analysis::figure_data(&ns, &ls, r)?;
            Ok(analysis::write_figure_csv(&cells, out)?)
        }
    }
}

fn run_scheme(
    net: &Network,
    scheme: SchemeArg,
    key_length: usize,
    seed: u64,
) -> anyhow::Result<Transcript> {
    let cover = || -> anyhow::Result<PathSystem> {
        let order = path_routing::min_vertex_cut_order(net)?;
        Ok(path_routing::find_disjoint_paths(net, order)?)
    };
    Ok(match scheme {
        SchemeArg::HopByHop => proto::run_hop_by_hop(net, &cover()?, key_length, seed)?,
        SchemeArg::HopByHopCombined => {
            proto::run_hop_by_hop_combined(net, &cover()?, key_length, seed)?
        }
        SchemeArg::MopsBroadcast => proto::run_mops_broadcast(net, key_length, seed)?,
        SchemeArg::MopsPathcover => {
            let sys = cover()?;
            if !sys.spans(net) {
                return Err(usage("the maximum disjoint path system does not cover every node; use mops-broadcast"));
            }
            proto::run_mops_pathcover(net, &sys, key_length, seed)?
        }
    })
}

fn emit_network(mut out: Box<dyn Write>, net: &Network) -> anyhow::Result<()> {
    out.write_all(net_model::serialize_network(net).as_bytes())?;
    out.flush()?;
    Ok(())
}

fn join(ids: &[NodeId]) -> String {
    ids.iter().map(NodeId::as_str).collect::<Vec<_>>().join(";")
}

fn table(
    out: Box<dyn Write>,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> anyhow::Result<()> {
    let mut w = csv_out(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
