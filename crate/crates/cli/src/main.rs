use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use bhgenus::exactmath::{fmt_rat, parse_rat, Rat};
use bhgenus::genus::{ell_genus_series, GenusOptions, Orbifold};
use bhgenus::potential::{compute_charges, decompose_atoms, parse_potential, transpose_potential, Potential};
use bhgenus::symmetry::{
    admissible_group, admissible_subgroups, aut_group, dual_group, grading_element, grading_subgroup, parse_generators,
    sl_subgroup, SymmetryGroup,
};
use bhgenus::verify::{self, Verdict};

#[derive(Parser)]
#[command(name = "bhgenus", version, about = "Elliptic genera of invertible Landau-Ginzburg orbifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Charges, atoms, central charge and symmetry groups of a potential.
    Info(Common),
    /// All admissible groups J ⊆ G ⊆ SL.
    Groups(Common),
    /// Transposed potential and dual group.
    Dual(Common),
    /// Exact q,y-expansion of the genus.
    Genus(Common),
    /// Run verification checks.
    Check {
        #[command(flatten)]
        common: Common,
        /// Comma-separated checks; all by default.
        #[arg(long, value_enum, value_delimiter = ',')]
        set: Vec<CheckName>,
    },
    /// Same as `check --set oracle`.
    OracleCheck(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// Potential as a file path or inline text (`x1^3*x2+x2^4` or `[[3,1],[0,4]]`).
    #[arg(long)]
    potential: String,
    /// Generators `a/b,…;…`, or `J` / `SL`. Defaults to `J`.
    #[arg(long)]
    group: Option<String>,
    #[arg(long, default_value_t = 2)]
    qmax: i64,
    /// Initial y half-width of the series window.
    #[arg(long)]
    ywin: Option<String>,
    /// Residual tolerance; by default 1e-6 for |G| ≤ 100, else 1e-5.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 5)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CheckName {
    Holo,
    Jacobi,
    Mirror,
    Star,
    Flow,
    Oracle,
}

const ALL_CHECKS: [CheckName; 6] =
    [CheckName::Holo, CheckName::Jacobi, CheckName::Mirror, CheckName::Star, CheckName::Flow, CheckName::Oracle];

/// Default y half-width for the free-state comparison; state counts grow fast with it.
const ORACLE_YWIN: i64 = 1;

enum Failure {
    /// Bad input: exit status 2.
    Input(anyhow::Error),
    /// A computation or check failed: exit status 1.
    Check(anyhow::Error),
}

type Outcome = Result<(Value, bool), Failure>;

fn input<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Input(e.into())
}

fn compute<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Check(e.into())
}

fn load_potential(source: &str) -> Result<Potential, Failure> {
    let text = if Path::new(source).is_file() {
        std::fs::read_to_string(source).with_context(|| format!("reading {source}")).map_err(input)?
    } else {
        source.to_string()
    };
    parse_potential(&text).map_err(input)
}

fn load_group(p: &Potential, spec: Option<&str>) -> Result<SymmetryGroup, Failure> {
    match spec.map(str::trim) {
        None | Some("J") => grading_subgroup(p).map_err(input),
        Some("SL") => {
            grading_subgroup(p).map_err(input)?;
            Ok(sl_subgroup(p))
        }
        Some(text) => {
            let gens = parse_generators(text, p.dim()).map_err(input)?;
            admissible_group(p, &gens).map_err(input)
        }
    }
}

fn load_orbifold(c: &Common) -> Result<Orbifold, Failure> {
    let p = load_potential(&c.potential)?;
    let g = load_group(&p, c.group.as_deref())?;
    Orbifold::new(p, g).map_err(input)
}

fn genus_options(c: &Common) -> Result<GenusOptions, Failure> {
    if c.qmax < 0 {
        return Err(input(anyhow!("--qmax must be non-negative")));
    }
    let ywin: Option<Rat> = c.ywin.as_deref().map(parse_rat).transpose().map_err(input)?;
    Ok(GenusOptions { ywin, ..GenusOptions::with_qmax(c.qmax) })
}

fn group_json(g: &SymmetryGroup) -> Value {
    json!({"order": g.order(), "generators": g.generator_strings(), "structure": g.structure_text()})
}

fn matrix_json(p: &Potential) -> Value {
    json!(p.matrix().to_rows())
}

fn cmd_info(c: &Common) -> Outcome {
    let p = load_potential(&c.potential)?;
    let charges = compute_charges(&p).map_err(input)?;
    let atoms = decompose_atoms(&p).map_err(input)?;
    let aut = aut_group(&p);
    let mut v = json!({
        "d": p.dim(),
        "potential": p.canonical_text(),
        "A": matrix_json(&p),
        "atoms": atoms.atoms.iter().map(|a| json!({"kind": a.kind, "vars": a.vars, "exponents": a.exponents})).collect::<Vec<_>>(),
        "charges": charges.q.iter().map(fmt_rat).collect::<Vec<_>>(),
        "k": charges.cy_degree,
        "calabi_yau": charges.is_calabi_yau(),
        "cbar": fmt_rat(&charges.cbar),
        "aut_order": aut.order(),
        "aut_structure": aut.structure_text(),
        "J": grading_element(&p).map_err(input)?.to_string(),
        "sl_order": sl_subgroup(&p).order(),
        "sl_structure": sl_subgroup(&p).structure_text(),
    });
    if !charges.is_calabi_yau() {
        v["note"] = json!(format!("not Calabi-Yau: sum of charges is {}", fmt_rat(&charges.sum())));
    }
    if atoms.has_quadratic_fermat() {
        v["quadratic_fermat"] = json!(true);
    }
    Ok((v, true))
}

fn cmd_groups(c: &Common) -> Outcome {
    let p = load_potential(&c.potential)?;
    let groups = admissible_subgroups(&p).map_err(input)?;
    Ok((json!({"potential": p.canonical_text(), "groups": groups.iter().map(group_json).collect::<Vec<_>>()}), true))
}

fn cmd_dual(c: &Common) -> Outcome {
    let p = load_potential(&c.potential)?;
    let g = load_group(&p, c.group.as_deref())?;
    let dual = dual_group(&p, &g).map_err(input)?;
    let t = transpose_potential(&p);
    Ok((
        json!({
            "potential": p.canonical_text(),
            "group": group_json(&g),
            "dual_potential": t.canonical_text(),
            "dual_A": matrix_json(&t),
            "dual_group": group_json(&dual),
            "abs_det": p.abs_det(),
            "order_product": g.order() * dual.order(),
        }),
        true,
    ))
}

fn cmd_genus(c: &Common) -> Outcome {
    let orb = load_orbifold(c)?;
    let g = ell_genus_series(&orb, &genus_options(c)?).map_err(compute)?;
    Ok((g.to_json(), true))
}

fn run_check(orb: &Orbifold, c: &Common, name: CheckName, tol: f64) -> Result<Verdict, Failure> {
    let samples = verify::sample_points(c.seed, c.samples);
    let laws = |r: Result<verify::LawReport, _>| r.map(|r: verify::LawReport| r.verdict(tol)).map_err(compute);
    match name {
        CheckName::Holo => Ok(verify::check_holomorphy(orb)),
        CheckName::Jacobi => laws(verify::check_jacobi_transformations(orb, &samples)),
        CheckName::Mirror => {
            let mut v = verify::check_mirror_series(orb, &genus_options(c)?).map_err(compute)?;
            let numeric = laws(verify::check_mirror_numeric(orb, &samples))?;
            if !numeric.passed() {
                v.status = numeric.status;
            }
            v.details.push(numeric.to_json());
            Ok(v)
        }
        CheckName::Star => laws(verify::check_star_substitution(orb, &samples)),
        CheckName::Flow => laws(verify::check_spectral_flow(orb, &samples)),
        CheckName::Oracle => {
            let y0 = bhgenus::genus::default_ywin(orb.cbar(), &Rat::from_integer(c.qmax.into()));
            let y = genus_options(c)?.ywin.unwrap_or_else(|| Rat::from_integer(ORACLE_YWIN.into()));
            verify::check_oracle(orb, c.qmax, &y, &y0).map_err(compute)
        }
    }
}

fn cmd_check(c: &Common, set: &[CheckName]) -> Outcome {
    let orb = load_orbifold(c)?;
    let tol = c.tol.unwrap_or_else(|| verify::default_tolerance(orb.group().order()));
    let set = if set.is_empty() { ALL_CHECKS.to_vec() } else { set.to_vec() };
    let mut verdicts = Vec::new();
    let mut ok = true;
    for name in set {
        let v = match run_check(&orb, c, name, tol) {
            Ok(v) => v,
            Err(Failure::Input(e)) => return Err(Failure::Input(e)),
            Err(Failure::Check(e)) => Verdict {
                check: format!("{:?}", name).to_lowercase(),
                status: verify::Status::Fail,
                max_residual: verify::Residual::Exact,
                details: vec![json!({"error": format!("{e:#}")})],
            },
        };
        ok &= v.passed();
        verdicts.push(v.to_json());
    }
    Ok((
        json!({
            "potential": orb.potential().canonical_text(),
            "group": orb.group().generator_strings(),
            "seed": c.seed,
            "tol": tol,
            "status": if ok { "pass" } else { "fail" },
            "verdicts": verdicts,
        }),
        ok,
    ))
}

fn emit(v: &Value, out: Option<&Path>) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(v)? + "\n";
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let (common, outcome) = match &cli.command {
        Command::Info(c) => (c, cmd_info(c)),
        Command::Groups(c) => (c, cmd_groups(c)),
        Command::Dual(c) => (c, cmd_dual(c)),
        Command::Genus(c) => (c, cmd_genus(c)),
        Command::Check { common, set } => (common, cmd_check(common, set)),
        Command::OracleCheck(c) => (c, cmd_check(c, &[CheckName::Oracle])),
    };
    match outcome {
        Ok((value, ok)) => {
            if let Err(e) = emit(&value, common.out.as_deref()) {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Check(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
