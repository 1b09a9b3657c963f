use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use bhswitch::construct::{bush_type, circulant_bh, fourier, kronecker, paley_seed};
use bhswitch::equiv::{certificate, equivalent_monomial};
use bhswitch::explorer::{classify_store, orbit_bfs, parse_families, ClassStore, OrbitConfig};
use bhswitch::sites::{
    check_genhall_form, find_fourier_sites, find_genhall_layouts, find_rank1_sites, fourier_set_switch,
    genhall_rank2_layout, genhall_switch, rank1_switch, rank2_switch, GenHallForm, GenHallLayout, Rank2Layout,
};
use bhswitch::trades::{min_trade_size, TradeSearch};
use bhswitch::{BHMatrix, Error, UMatrix};

#[derive(Parser)]
#[command(name = "bhswitch", version, about = "Switching, equivalence and trades for Butson Hadamard matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SiteFamily {
    Fourier,
    Genhall,
    Rank1,
    Rank2,
}

#[derive(Subcommand)]
enum Command {
    /// Exit 0 iff the matrix is Hadamard.
    Verify {
        file: PathBuf,
        /// Read a `UM n` complex matrix and check in floating point.
        #[arg(long)]
        float: bool,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Print a constructed matrix in BH format.
    Construct {
        #[command(subcommand)]
        kind: Construct,
    },
    /// List switching sites of one family.
    Sites {
        file: PathBuf,
        #[arg(long, value_enum)]
        family: SiteFamily,
        /// Row subsets up to this size for the rank-1 search.
        #[arg(long, default_value_t = 4)]
        max_rows: usize,
        /// Layouts reported for genhall and rank2.
        #[arg(long, default_value_t = 4)]
        limit: usize,
    },
    /// Apply one switch from `sites` output. Genhall and rank2 switches act
    /// on the rearranged layout, which is printed switched.
    Switch {
        file: PathBuf,
        #[arg(long, value_enum)]
        family: SiteFamily,
        #[arg(long, default_value_t = 0)]
        site: usize,
        #[arg(long, default_value_t = 0)]
        block: usize,
        #[arg(long)]
        coeff: u32,
        #[arg(long, default_value_t = 4)]
        max_rows: usize,
    },
    /// Print the equivalence certificate digest.
    Cert { file: PathBuf },
    /// Exit 0 if the matrices are monomially equivalent, 1 otherwise.
    Equiv { a: PathBuf, b: PathBuf },
    /// Breadth-first switching-class exploration into a store directory.
    Orbit {
        #[arg(long = "seed", required = true, num_args = 1..)]
        seeds: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "all")]
        families: String,
        #[arg(long, default_value_t = 1000)]
        max_classes: usize,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
    },
    /// Smallest trade over the Butson alphabet, up to a size bound.
    TradeMin {
        file: PathBuf,
        /// Defaults to the order.
        #[arg(long)]
        bound: Option<usize>,
        #[arg(long, default_value_t = 50_000_000)]
        budget: u64,
    },
    /// Summarize a class store.
    Classify { dir: PathBuf },
}

#[derive(Subcommand)]
enum Construct {
    Fourier { n: usize },
    Kron { a: PathBuf, b: PathBuf },
    Circulant { k: usize },
    Bush { file: PathBuf },
    Paley { q: usize },
}

fn read_matrix(path: &Path) -> Result<BHMatrix, Error> {
    fs::read_to_string(path)?.parse()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(Error::BudgetExhausted(b)) => {
            eprintln!("error: search budget of {b} nodes exhausted");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn verdict(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Verify { file, float, tol } => {
            if float {
                let u: UMatrix = fs::read_to_string(&file)?.parse()?;
                let ok = u.is_complex_hadamard_float(tol);
                println!("{}", if ok { "hadamard" } else { "not hadamard" });
                return Ok(verdict(ok));
            }
            let h = read_matrix(&file)?;
            match h.ensure_hadamard() {
                Ok(()) => {
                    println!("hadamard BH({}, {})", h.n(), h.k());
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    println!("{e}");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Construct { kind } => {
            let h = match kind {
                Construct::Fourier { n } => fourier(n),
                Construct::Kron { a, b } => kronecker(&read_matrix(&a)?, &read_matrix(&b)?),
                Construct::Circulant { k } => circulant_bh(k)?,
                Construct::Bush { file } => bush_type(&read_matrix(&file)?)?,
                Construct::Paley { q } => paley_seed(q)?,
            };
            print!("{}", h.emit());
            Ok(ExitCode::SUCCESS)
        }
        Command::Sites { file, family, max_rows, limit } => {
            let h = read_matrix(&file)?;
            let count = match family {
                SiteFamily::Fourier => {
                    let sites = find_fourier_sites(&h)?;
                    for (i, s) in sites.iter().enumerate() {
                        println!("site {i} {s}");
                    }
                    sites.len()
                }
                SiteFamily::Rank1 => {
                    let sites = find_rank1_sites(&h, max_rows)?;
                    for (i, s) in sites.iter().enumerate() {
                        println!("site {i} {s}");
                    }
                    sites.len()
                }
                SiteFamily::Genhall => {
                    let layouts = genhall_layouts(&h, limit)?;
                    for (i, lay) in layouts.iter().enumerate() {
                        println!("site {i} left {} right {}", lay.left, lay.right);
                        print_genhall(&lay.form);
                    }
                    layouts.len()
                }
                SiteFamily::Rank2 => {
                    let forms = rank2_layouts(&h, limit)?;
                    for (i, lay) in forms.iter().enumerate() {
                        let p = &lay.form.parts;
                        let cells = |v: &[Vec<usize>; 3]| v.iter().map(|c| join(c)).collect::<Vec<_>>().join("|");
                        println!(
                            "site {i} rows {} cols {} s {} left {} right {}",
                            cells(&p.rows),
                            cells(&p.cols),
                            lay.form.s,
                            lay.left,
                            lay.right
                        );
                    }
                    forms.len()
                }
            };
            Ok(verdict(count > 0))
        }
        Command::Switch { file, family, site, block, coeff, max_rows } => {
            let h = read_matrix(&file)?;
            let pick = |len: usize| if site < len { Ok(site) } else { Err(Error::IndexOutOfRange { index: site, size: len }) };
            let out = match family {
                SiteFamily::Fourier => {
                    let sites = find_fourier_sites(&h)?;
                    fourier_set_switch(&h, &sites[pick(sites.len())?], block, coeff)?
                }
                SiteFamily::Rank1 => {
                    let sites = find_rank1_sites(&h, max_rows)?;
                    rank1_switch(&h, &sites[pick(sites.len())?], block, coeff)?
                }
                SiteFamily::Genhall => {
                    let layouts = genhall_layouts(&h, site + 1)?;
                    let lay = &layouts[pick(layouts.len())?];
                    genhall_switch(&lay.matrix, &lay.form, block, coeff)?
                }
                SiteFamily::Rank2 => {
                    let forms = rank2_layouts(&h, usize::MAX)?;
                    let lay = &forms[pick(forms.len())?];
                    rank2_switch(&lay.matrix, &lay.form, coeff)?
                }
            };
            print!("{}", out.emit());
            Ok(ExitCode::SUCCESS)
        }
        Command::Cert { file } => {
            println!("{}", certificate(&read_matrix(&file)?)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Equiv { a, b } => {
            let (a, b) = (read_matrix(&a)?, read_matrix(&b)?);
            match equivalent_monomial(&a, &b) {
                Some((l, r)) => {
                    println!("equivalent left {l} right {r}");
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    println!("inequivalent");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Orbit { seeds, out, families, max_classes, depth, workers, budget } => {
            let seeds: Vec<BHMatrix> = seeds.iter().map(|p| read_matrix(p)).collect::<Result<_, _>>()?;
            let cfg = OrbitConfig {
                families: parse_families(&families)?,
                max_classes,
                max_depth: depth,
                node_budget: budget,
                workers,
                ..OrbitConfig::default()
            };
            let store = ClassStore::open(&out)?;
            let s = orbit_bfs(&seeds, &cfg, &store)?;
            println!(
                "classes {} inserted {} expanded {} self-loops {} nodes {}",
                s.classes, s.inserted, s.expanded, s.self_loops, s.nodes
            );
            match s.halted {
                Some(reason) => {
                    println!("halted: {reason}");
                    Ok(if reason.contains("budget") { ExitCode::from(3) } else { ExitCode::SUCCESS })
                }
                None => Ok(ExitCode::SUCCESS),
            }
        }
        Command::TradeMin { file, bound, budget } => {
            let h = read_matrix(&file)?;
            let bound = bound.unwrap_or(h.n());
            match min_trade_size(&h, bound, budget)? {
                TradeSearch::Found(t) => {
                    println!("size {} b {}", t.size(), t.b());
                    for ((r, c), e) in t.cells() {
                        println!("{r} {c} {e}");
                    }
                    Ok(ExitCode::SUCCESS)
                }
                TradeSearch::NoneUpTo(b) => {
                    println!("no trade of size at most {b}");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Classify { dir } => {
            if !dir.is_dir() {
                return Err(Error::Store(format!("{} is not a store directory", dir.display())));
            }
            println!("{}", classify_store(&ClassStore::open(&dir)?)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn join(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn genhall_layouts(h: &BHMatrix, limit: usize) -> Result<Vec<GenHallLayout>, Error> {
    if let Err(e @ Error::Condition(_)) = check_genhall_form(h, h.k()) {
        eprintln!("literal layout: {e}");
    }
    find_genhall_layouts(h, limit)
}

fn rank2_layouts(h: &BHMatrix, limit: usize) -> Result<Vec<Rank2Layout>, Error> {
    let mut out = Vec::new();
    for lay in genhall_layouts(h, limit)? {
        for m in 0..lay.form.k {
            let r2 = genhall_rank2_layout(&lay.matrix, &lay.form, m)?;
            let left = lay.left.compose(&r2.left)?;
            let right = lay.right.compose(&r2.right)?;
            out.push(Rank2Layout { left, right, ..r2 });
        }
    }
    Ok(out)
}

fn print_genhall(form: &GenHallForm) {
    println!("k {} n {} S {}", form.k, form.n, form.s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
    for (m, l) in form.lambdas.iter().enumerate() {
        println!("lambda {m} = {l}");
    }
    for i in 0..form.k {
        for j in 0..form.k {
            let (rs, cs) = form.block_sums(i, j);
            let all_same = rs.iter().chain(&cs).all(|x| *x == rs[0]);
            let label = match (all_same, rs[0].is_zero()) {
                (false, _) => "mixed".to_string(),
                (true, true) => "0".to_string(),
                (true, false) => rs[0].to_string(),
            };
            println!("A {} {} sums {label}", i + 1, j + 1);
        }
    }
}
