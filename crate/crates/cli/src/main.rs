use std::fmt::Display;
use std::fs;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use vhgenus::cocycle::{lattice_cocycle, verify_cocycle};
use vhgenus::genus::{genus_symbol, parse_symbol};
use vhgenus::genus_enum::{enumerate_genus_with, EnumOptions, DEFAULT_BUDGET};
use vhgenus::gradedchar::lattice_voa_dims;
use vhgenus::isom::{aut_order, is_isometric};
use vhgenus::lattice::named_lattice;
use vhgenus::mass::sms_mass;
use vhgenus::voa::{known_index, load_hol_table, maximal_lattice, vh_mass, floor_of_entry, AffineVoaSpec};
use vhgenus::IntLattice;

#[derive(Parser)]
#[command(name = "vhgenus", about = "Genera, masses and automorphisms of even lattices and their vertex algebras")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(clap::Args, Default)]
struct LatticeArgs {
    /// Lattice file: {"label": ..., "gram": [[...]]}; repeatable for `isom`.
    #[arg(long)]
    lattice: Vec<String>,
    /// Named lattice such as E8, sqrt2E8+D8, II1,1, D16+; repeatable for `isom`.
    #[arg(long)]
    name: Vec<String>,
}

#[derive(Subcommand)]
enum Verb {
    /// Print the lattice as JSON.
    Construct(LatticeArgs),
    /// Print the genus symbol.
    Symbol(LatticeArgs),
    /// Print the mass of a genus as p/q.
    Mass {
        #[command(flatten)]
        l: LatticeArgs,
        #[arg(long)]
        symbol: Option<String>,
    },
    /// Print |O(L)|, and the generators with --generators.
    Aut {
        #[command(flatten)]
        l: LatticeArgs,
        #[arg(long)]
        generators: bool,
    },
    /// Decide whether two lattices are isometric.
    Isom(LatticeArgs),
    /// List the classes of the genus.
    Enumerate {
        #[command(flatten)]
        l: LatticeArgs,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Progress on stderr.
        #[arg(long)]
        verbose: bool,
    },
    /// Print the cocycle bits and verify it on coefficient-bounded samples.
    Cocycle {
        #[command(flatten)]
        l: LatticeArgs,
        #[arg(long, default_value_t = 2)]
        bound: i64,
    },
    /// Maximal lattice of an affine vertex algebra extension.
    VoaMaxlat {
        #[arg(long)]
        spec: String,
    },
    /// Mass of the VH pair: mass of the maximal lattice times the index.
    VoaMass {
        #[arg(long)]
        spec: String,
    },
    /// Graded dimensions of the lattice vertex algebra, one per line.
    Char {
        #[command(flatten)]
        l: LatticeArgs,
        #[arg(long, default_value_t = 8)]
        nmax: usize,
    },
    /// The Lie algebras of c = 24 holomorphic VOAs with the genus of each floor lattice.
    Table,
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl From<vhgenus::Error> for Failure {
    fn from(e: vhgenus::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

type Outcome = Result<String, Failure>;

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

fn read(path: &str) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Domain(format!("cannot read {path}: {e}")))
}

fn lattices(a: &LatticeArgs) -> Result<Vec<IntLattice>, Failure> {
    let mut out = Vec::new();
    for p in &a.lattice {
        out.push(IntLattice::from_json(&read(p)?)?);
    }
    for n in &a.name {
        out.push(named_lattice(n)?);
    }
    Ok(out)
}

fn one_lattice(a: &LatticeArgs) -> Result<IntLattice, Failure> {
    let mut v = lattices(a)?;
    match v.len() {
        1 => Ok(v.remove(0)),
        0 => usage("give a lattice with --lattice or --name"),
        _ => usage("expected exactly one lattice"),
    }
}

fn big(x: impl Display) -> Value {
    Value::Number(serde_json::from_str(&x.to_string()).expect("decimal integer"))
}

fn gram_json(l: &IntLattice) -> Value {
    Value::Array(l.gram().iter().map(|r| Value::Array(r.iter().map(big).collect())).collect())
}

fn spec_of(path: &str) -> Result<AffineVoaSpec, Failure> {
    Ok(AffineVoaSpec::from_json(&read(path)?)?)
}

fn run(verb: Verb) -> Outcome {
    match verb {
        Verb::Construct(a) => Ok(one_lattice(&a)?.to_json()),
        Verb::Symbol(a) => Ok(genus_symbol(&one_lattice(&a)?)?.to_string()),
        Verb::Mass { l, symbol } => {
            let sym = match (symbol, l.lattice.is_empty() && l.name.is_empty()) {
                (Some(s), true) => parse_symbol(&s)?,
                (None, false) => genus_symbol(&one_lattice(&l)?)?,
                _ => return usage("give exactly one of --symbol, --lattice, --name"),
            };
            Ok(sms_mass(&sym)?.to_string())
        }
        Verb::Aut { l, generators } => {
            let a = aut_order(&one_lattice(&l)?)?;
            let mut out = a.order.to_string();
            if generators {
                out.push('\n');
                out.push_str(&serde_json::to_string(&a.generators).expect("matrices serialize"));
            }
            Ok(out)
        }
        Verb::Isom(a) => {
            let v = lattices(&a)?;
            if v.len() != 2 {
                return usage("isom needs exactly two lattices");
            }
            let w = is_isometric(&v[0], &v[1])?;
            Ok(json!({"isometric": w.matrix.is_some(), "matrix": w.matrix}).to_string())
        }
        Verb::Enumerate { l, budget, verbose } => {
            let l = one_lattice(&l)?;
            let e = enumerate_genus_with(&l, &EnumOptions { budget, verbose, ..Default::default() })?;
            let classes: Vec<Value> = e
                .classes
                .iter()
                .map(|c| json!({"label": c.lattice.label_or(""), "gram": gram_json(&c.lattice), "aut_order": big(&c.aut_order)}))
                .collect();
            Ok(json!({
                "classes": classes,
                "mass": e.accumulated_mass.to_string(),
                "target_mass": e.target_mass.to_string(),
                "complete": e.complete,
            })
            .to_string())
        }
        Verb::Cocycle { l, bound } => {
            let c = lattice_cocycle(&one_lattice(&l)?)?;
            let mut out: Vec<String> = c
                .bits
                .iter()
                .map(|r| r.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(" "))
                .collect();
            let r = verify_cocycle(&c, bound);
            out.push(format!(
                "sample {} triples {} normalized {} cocycle {} commutator {} bilinear {}",
                r.sample_size, r.triples_checked, r.normalized, r.cocycle_identity, r.commutator_identity, r.bilinear
            ));
            if !r.ok() {
                return Err(Failure::Domain(format!("cocycle verification failed: {}", out.join("; "))));
            }
            Ok(out.join("\n"))
        }
        Verb::VoaMaxlat { spec } => Ok(maximal_lattice(&spec_of(&spec)?)?.to_json()),
        Verb::VoaMass { spec } => {
            let s = spec_of(&spec)?;
            let Some(index) = s.index.or_else(|| known_index(&s.components)) else {
                return Err(Failure::Domain("the index [Aut L~ : G] is unknown; give \"index\" in the spec".into()));
            };
            Ok(vh_mass(&maximal_lattice(&s)?, index)?.to_string())
        }
        Verb::Char { l, nmax } => {
            let d = lattice_voa_dims(&one_lattice(&l)?, nmax)?;
            Ok(d.by_degree.iter().map(|(_, x)| x.to_string()).collect::<Vec<_>>().join("\n"))
        }
        Verb::Table => {
            let mut out = Vec::new();
            for e in load_hol_table()? {
                let sym = genus_symbol(&floor_of_entry(&e)?)?;
                out.push(format!("{}\t{}\t{}", e.rank, e.lie_symbol, sym));
            }
            Ok(out.join("\n"))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("vhgenus-error[usage]: {first}");
            return ExitCode::from(2);
        }
    };
    if let Some(w) = cli.workers {
        if w == 0 {
            eprintln!("vhgenus-error[usage]: --workers must be positive");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new().num_threads(w).build_global().expect("thread pool is configured once");
    }
    match run(cli.verb) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(m)) => {
            eprintln!("vhgenus-error[usage]: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(m)) => {
            eprintln!("vhgenus-error[domain]: {}", m.replace('\n', " "));
            ExitCode::from(1)
        }
    }
}
