use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bushlab::bush::{alpha_beta_count, s_normalize, AlphaBetaParams};
use bushlab::constructions::{star_report, steiner_report};
use bushlab::containment::{contains_blowup, contains_bush};
use bushlab::delta::{find_sunflower, kernels, partition_procedure, verify_certificate, ExtractConfig};
use bushlab::shadow_bounds::{
    apex_g_families, g_roots, heavy_vertices, kk_check, shadow_spread, stability_roots_check, ShadowBoundReport,
};
use bushlab::tree::{blowup, bush_tree, path_tree, read_tree, BipartiteTree, BlowupSpec, BushParams};
use bushlab::turan::{table_csv, turan_table, OracleConfig, TableRow};
use bushlab::{read_hypergraph, write_hypergraph, Hypergraph, VertexSet};

#[derive(Parser)]
#[command(name = "bushlab", version, about = "Bushes, delta systems and exact Turán numbers")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output format for subcommands that offer more than one.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Star,
    Steiner,
    Blowup,
    Bush,
}

#[derive(Args)]
struct Pattern {
    /// Bush `B_{s,h}` given as `s,h`.
    #[arg(long, value_parser = parse_pair)]
    bush: Option<(usize, usize)>,
    /// Path with this many edges.
    #[arg(long)]
    path: Option<usize>,
    /// Tree file (`s t` header, then one `i j` edge per line).
    #[arg(long)]
    tree: Option<PathBuf>,
    /// Blob sizes `a,b`.
    #[arg(long, value_parser = parse_pair)]
    ab: Option<(usize, usize)>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a family: star, steiner, blowup (of a tree or path) or bush.
    Construct {
        kind: Kind,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        s: Option<usize>,
        #[command(flatten)]
        pattern: Pattern,
    },
    /// Search a host for a blowup; prints `absent` or `present` plus the embedding.
    Contains {
        #[arg(long)]
        host: PathBuf,
        #[command(flatten)]
        pattern: Pattern,
    },
    /// The (r-1)-shadow of a host, as a hypergraph file.
    Shadow {
        #[arg(long)]
        host: PathBuf,
    },
    /// A q-sunflower with the given kernel (e.g. `--kernel 1,2`).
    Sunflower {
        #[arg(long)]
        host: PathBuf,
        #[arg(long)]
        kernel: String,
        #[arg(long)]
        q: usize,
    },
    /// All (b, q)-kernels of a host, one per line.
    Kernels {
        #[arg(long)]
        host: PathBuf,
        #[arg(long)]
        b: usize,
        #[arg(long)]
        q: usize,
    },
    /// Partition procedure with certificates.
    Extract {
        #[arg(long)]
        host: PathBuf,
        #[arg(long)]
        q: usize,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
    },
    /// α(Y), β(Y) counts over the partition procedure's classes.
    Alphabeta {
        #[arg(long)]
        host: PathBuf,
        #[arg(long)]
        q: usize,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, value_parser = parse_pair)]
        ab: (usize, usize),
        #[arg(long)]
        s: usize,
    },
    /// Drop every edge containing an (r-1)-set of codegree below s, repeatedly.
    Normalize {
        #[arg(long)]
        host: PathBuf,
        #[arg(long)]
        s: usize,
    },
    /// Exact Turán numbers; `--n` takes a value, a list `6,7,8` or a range `6-8`.
    Turan {
        #[arg(long)]
        n: String,
        #[arg(long)]
        r: Option<usize>,
        #[command(flatten)]
        pattern: Pattern,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        memo_depth: Option<usize>,
    },
    /// Kruskal-Katona check of a host.
    Kk {
        #[arg(long)]
        host: PathBuf,
    },
    /// Heavy vertices and the root-sequence check.
    Stability {
        #[arg(long)]
        host: PathBuf,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        c0: f64,
        /// Apex set for the G(v) families; the s-1 vertices of largest degree when omitted.
        #[arg(long)]
        apex: Option<String>,
    },
}

enum Status {
    Ok,
    Flagged,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected `x,y`, got `{s}`"))?;
    let p = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
    Ok((p(x)?, p(y)?))
}

fn parse_set(s: &str) -> Result<VertexSet, String> {
    let xs = s
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().map_err(|e| format!("`{t}`: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    VertexSet::try_from_slice(&xs).ok_or_else(|| format!("`{s}` is not a set of distinct vertices in 1..=64"))
}

fn parse_ns(s: &str) -> Result<Vec<usize>, String> {
    let p = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
    if let Some((lo, hi)) = s.split_once('-') {
        let (lo, hi) = (p(lo)?, p(hi)?);
        if lo > hi {
            return Err(format!("empty range `{s}`"));
        }
        Ok((lo..=hi).collect())
    } else {
        s.split(',').map(p).collect()
    }
}

fn read_host(path: &Path) -> Result<Hypergraph, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    read_hypergraph(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T, String> {
    v.ok_or_else(|| format!("--{flag} is required here"))
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

impl Pattern {
    fn spec(&self) -> Result<BlowupSpec, String> {
        let (a, b) = need(self.ab, "ab")?;
        BlowupSpec::new(a, b).map_err(err)
    }

    fn resolve(&self) -> Result<(BipartiteTree, String), String> {
        let given = [self.bush.is_some(), self.path.is_some(), self.tree.is_some()];
        if given.iter().filter(|&&g| g).count() != 1 {
            return Err("give exactly one of --bush, --path, --tree".into());
        }
        let (a, b) = need(self.ab, "ab")?;
        if let Some((s, h)) = self.bush {
            let p = BushParams::new(s, h).map_err(err)?;
            Ok((bush_tree(p), format!("B_{s},{h}({a},{b})")))
        } else if let Some(len) = self.path {
            Ok((path_tree(len).map_err(err)?, format!("P_{len}({a},{b})")))
        } else {
            let path = self.tree.as_ref().unwrap();
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let name = path.file_stem().map_or("tree".into(), |s| s.to_string_lossy().into_owned());
            Ok((read_tree(&text).map_err(err)?, format!("{name}({a},{b})")))
        }
    }
}

fn json<T: serde::Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(err)
}

fn run(cli: &Cli) -> Result<(String, Status), String> {
    let fmt = cli.format;
    match &cli.cmd {
        Cmd::Construct { kind, n, r, s, pattern } => {
            let h = match kind {
                Kind::Star | Kind::Steiner => {
                    let (n, r, s) = (need(*n, "n")?, need(*r, "r")?, need(*s, "s")?);
                    let (h, rep) = match kind {
                        Kind::Star => star_report(n, r, s),
                        _ => steiner_report(n, r, s),
                    }
                    .map_err(err)?;
                    eprintln!("{}", serde_json::to_string(&rep).map_err(err)?);
                    h
                }
                Kind::Blowup | Kind::Bush => {
                    if matches!(kind, Kind::Bush) && pattern.bush.is_none() {
                        return Err("--bush s,h is required for `construct bush`".into());
                    }
                    let (tree, _) = pattern.resolve()?;
                    blowup(&tree, pattern.spec()?).map_err(err)?
                }
            };
            Ok((write_hypergraph(&h), Status::Ok))
        }
        Cmd::Contains { host, pattern } => {
            let host = read_host(host)?;
            let spec = pattern.spec()?;
            let (tree, _) = pattern.resolve()?;
            let found = if let Some((s, h)) = pattern.bush {
                let p = BushParams::new(s, h).map_err(err)?;
                contains_bush(&host, p, spec).map_err(err)?.map(|e| serde_json::to_value(e).unwrap())
            } else {
                contains_blowup(&host, &tree, spec).map_err(err)?.map(|e| serde_json::to_value(e).unwrap())
            };
            let out = match found {
                None => "absent\n".to_string(),
                Some(e) => format!("present\n{}\n", serde_json::to_string_pretty(&e).map_err(err)?),
            };
            Ok((out, Status::Ok))
        }
        Cmd::Shadow { host } => {
            let h = read_host(host)?;
            if h.r() < 2 {
                return Err("the shadow of a 1-graph is not a hypergraph".into());
            }
            let sh = Hypergraph::new(h.n(), h.r() - 1, h.shadow()).map_err(err)?;
            Ok((write_hypergraph(&sh), Status::Ok))
        }
        Cmd::Sunflower { host, kernel, q } => {
            let h = read_host(host)?;
            let k = parse_set(kernel)?;
            let sf = find_sunflower(&h, k, *q);
            Ok((json(&sf)?, Status::Ok))
        }
        Cmd::Kernels { host, b, q } => {
            let h = read_host(host)?;
            let ks = kernels(&h, *b, *q).map_err(err)?;
            if fmt == Some(Format::Json) {
                return Ok((json(&ks)?, Status::Ok));
            }
            let mut out = String::new();
            for k in ks {
                out.push_str(&k.to_string());
                out.push('\n');
            }
            Ok((out, Status::Ok))
        }
        Cmd::Extract { host, q, c, restarts } => {
            let h = read_host(host)?;
            let cfg = ExtractConfig { seed: cli.seed, restarts: *restarts, ..Default::default() };
            let pr = partition_procedure(&h, *q, *c, &cfg).map_err(err)?;
            let ok = pr.is_partition_of(&h) && pr.classes.iter().all(|c| verify_certificate(c).passed());
            let out = serde_json::to_string_pretty(&pr.to_json()).map_err(err)? + "\n";
            Ok((out, if ok { Status::Ok } else { Status::Flagged }))
        }
        Cmd::Alphabeta { host, q, c, ab, s } => {
            let h = read_host(host)?;
            let params = AlphaBetaParams { a: ab.0, b: ab.1, s: *s };
            if params.r() != h.r() {
                return Err(format!("a + b = {} but the host is {}-uniform", params.r(), h.r()));
            }
            let cfg = ExtractConfig { seed: cli.seed, ..Default::default() };
            let pr = partition_procedure(&h, *q, *c, &cfg).map_err(err)?;
            let rep = alpha_beta_count(&pr, params).map_err(err)?;
            for w in &rep.warnings {
                eprintln!("warning: {w}");
            }
            eprintln!(
                "max alpha {}, per-set {}, aggregate {}",
                rep.max_alpha,
                if rep.per_set_holds() { "holds" } else { "fails" },
                if rep.aggregate_holds() { "holds" } else { "fails" }
            );
            let status = if rep.warnings.is_empty() && rep.per_set_holds() { Status::Ok } else { Status::Flagged };
            let out = match fmt {
                Some(Format::Json) => json(&rep)?,
                _ => rep.to_csv().map_err(err)?,
            };
            Ok((out, status))
        }
        Cmd::Normalize { host, s } => {
            let h = read_host(host)?;
            Ok((write_hypergraph(&s_normalize(&h, *s)), Status::Ok))
        }
        Cmd::Turan { n, r, pattern, budget, memo_depth } => {
            let spec = pattern.spec()?;
            let (tree, name) = pattern.resolve()?;
            let r = r.unwrap_or(spec.r());
            let rows: Vec<TableRow> = parse_ns(n)?
                .into_iter()
                .map(|n| TableRow { n, r, tree: tree.clone(), spec, pattern: name.clone() })
                .collect();
            let mut cfg = OracleConfig { node_budget: *budget, ..Default::default() };
            if let Some(d) = memo_depth {
                cfg.memo_depth = *d;
            }
            let res = turan_table(&rows, &cfg).map_err(err)?;
            for row in &res {
                if !row.exact {
                    eprintln!("n = {}: node budget exhausted, value is a lower bound", row.n);
                }
            }
            let status = if res.iter().all(|x| x.exact) { Status::Ok } else { Status::Flagged };
            let out = match fmt {
                Some(Format::Json) => json(&res)?,
                _ => table_csv(&res).map_err(err)?,
            };
            Ok((out, status))
        }
        Cmd::Kk { host } => {
            let h = read_host(host)?;
            Ok((json(&kk_check(&h).map_err(err)?)?, Status::Ok))
        }
        Cmd::Stability { host, s, c, c0, apex } => {
            let h = read_host(host)?;
            if *s < 2 {
                return Err("--s must be at least 2".into());
            }
            let heavy = heavy_vertices(&h, *s, 3.0 * (c + c0));
            let degrees = h.degrees()[1..].to_vec();
            let apex = match apex {
                Some(a) => parse_set(a)?,
                None => {
                    let mut by_deg: Vec<usize> = (1..=h.n()).collect();
                    by_deg.sort_by(|&x, &y| degrees[y - 1].cmp(&degrees[x - 1]).then(x.cmp(&y)));
                    by_deg.into_iter().take(s - 1).collect()
                }
            };
            let g = apex_g_families(&h, apex);
            let roots = g_roots(&g, h.n(), h.r());
            let stability = stability_roots_check(&roots, h.n(), h.r(), *s, *c, *c0).map_err(err)?;
            let spread = shadow_spread(&g, h.r(), *s);
            let kk = kk_check(&h).map_err(err)?;
            let flagged = !stability.flags.is_empty() || !heavy.enough || !stability.passed();
            let rep = ShadowBoundReport {
                families: vec![kk],
                degrees,
                stability: Some(stability),
                heavy: Some(heavy),
                spread: Some(spread),
            };
            Ok((rep.to_json().map_err(err)? + "\n", if flagged { Status::Flagged } else { Status::Ok }))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(k) = std::env::var("BUSHLAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if k > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
        }
    }
    match run(&cli) {
        Ok((text, status)) => {
            let written = match &cli.out {
                Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            match (written, status) {
                (Err(e), _) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
                (Ok(()), Status::Ok) => ExitCode::SUCCESS,
                (Ok(()), Status::Flagged) => ExitCode::from(2),
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
