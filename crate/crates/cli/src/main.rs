//! catgw: batch front end for the A_n categorical Gromov-Witten computations.

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use catgw_core::checks::verify;
use catgw_core::coeffs::Field;
use catgw_core::costello::{inv_03, inv_11};
use catgw_core::homology::central_homology;
use catgw_core::pairing::{coproduct, mukai_words};
use catgw_core::potential::{
    check_dimension_axiom, check_primitive_axioms, check_wdvv, correlator, potential_derivatives,
};
use catgw_core::solver::{flat_coordinates, solve_primitive_form, SolverConfig};
use catgw_core::{Error, Scalar};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "catgw", version, about = "Exact A_n categorical Gromov-Witten invariants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Level n of the A_n singularity x^{n+1}/(n+1).
    #[arg(long, global = true)]
    n: Option<usize>,
    /// t-order N of the computation.
    #[arg(long, global = true, default_value_t = 4)]
    order: u32,
    /// Highest u-power kept in ζ (default: order + 2).
    #[arg(long = "u-cap", global = true)]
    u_cap: Option<i64>,
    /// Longest bar word kept (default: (n+1)(order + u_cap + 1) + n).
    #[arg(long = "bar-cap", global = true)]
    bar_cap: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Hochschild homology, pairings, coproduct and the Costello invariants.
    Invariants,
    /// The primitive form ζ and its J-terms.
    PrimitiveForm,
    /// Flat coordinates, potential derivatives, correlators and axioms.
    Potential,
    /// Run every identity check; exit 1 if any fails.
    Verify,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

fn rat(x: &Scalar) -> Value {
    Value::String(x.to_string())
}

fn config(cli: &Cli) -> Result<SolverConfig, Error> {
    let n = cli.n.ok_or_else(|| Error::usage("--n is required"))?;
    if n == 0 {
        return Err(Error::usage("--n must be at least 1"));
    }
    if cli.order == 0 {
        return Err(Error::usage("--order must be at least 1"));
    }
    let mut cfg = SolverConfig::new(n, cli.order);
    if let Some(u) = cli.u_cap {
        if u < 0 {
            return Err(Error::usage("--u-cap must be nonnegative"));
        }
        cfg.u_cap = u;
    }
    cfg.bar_cap = cli.bar_cap;
    Ok(cfg)
}

fn header(cmd: &str, cfg: &SolverConfig) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("command".into(), json!(cmd));
    m.insert("n".into(), json!(cfg.n));
    m.insert("order".into(), json!(cfg.order));
    m.insert("u_cap".into(), json!(cfg.u_cap));
    m.insert("bar_cap".into(), json!(cfg.bar_cap()));
    m
}

fn invariants(cfg: &SolverConfig) -> Result<(Map<String, Value>, String), Error> {
    let n = cfg.n;
    let mut out = header("invariants", cfg);
    let mut text = String::new();
    let h = central_homology::<Scalar>(n, 3 * n + 3)?;
    let basis: Vec<String> = h.basis.iter().map(|w| w.to_string()).collect();
    out.insert("hochschild".into(), json!({"dim": h.dim, "basis": basis, "odd_only": h.odd_only}));
    text += &format!("HH_*(A_{n}): dim {} basis [{}] odd {}\n", h.dim, basis.join(", "), h.odd_only);

    let mut mukai = Vec::new();
    text += "Mukai pairing <eps|eps^i, eps|eps^j>:\n";
    for i in 0..n {
        let row = (0..n)
            .map(|j| mukai_words::<Scalar>(n, catgw_core::bar::BarWord::eps(i), catgw_core::bar::BarWord::eps(j)))
            .collect::<Result<Vec<_>, _>>()?;
        text += &format!("  {}\n", row.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "));
        mukai.push(Value::Array(row.iter().map(rat).collect()));
    }
    out.insert("mukai".into(), Value::Array(mukai));

    let mut cop = Map::new();
    text += "coproduct:\n";
    for k in 0..n {
        let terms = coproduct(catgw_core::bar::BarWord::eps(k))?;
        let pairs: Vec<Value> = terms.iter().map(|(a, b)| json!([a.tail, b.tail])).collect();
        text += &format!(
            "  D(eps|eps^{k}) = {}\n",
            terms.iter().map(|(a, b)| format!("{a} (x) {b}")).collect::<Vec<_>>().join(" + ")
        );
        cop.insert(format!("k={k}"), Value::Array(pairs));
    }
    out.insert("coproduct".into(), Value::Object(cop));

    let mut i03 = Map::new();
    let mut i11 = Map::new();
    text += "inv_03 (nonzero entries):\n";
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let v: Scalar = inv_03(n, i, j, k)?;
                if v != Scalar::from_int(0) {
                    text += &format!("  <{i},{j},{k}> = {v}\n");
                }
                i03.insert(format!("i={i},j={j},k={k}"), rat(&v));
            }
        }
    }
    text += "inv_11:\n";
    for k in 0..n {
        for l in 0..2 {
            let v: Scalar = inv_11(n, k, l)?;
            text += &format!("  <eps|eps^{k} u^{l}>_(1,1) = {v}\n");
            i11.insert(format!("k={k},l={l}"), rat(&v));
        }
    }
    out.insert("costello".into(), json!({"inv_03": i03, "inv_11": i11}));
    Ok((out, text))
}

fn primitive_form(cfg: &SolverConfig) -> Result<(Map<String, Value>, String), Error> {
    let st = solve_primitive_form::<Scalar>(cfg)?;
    let mut out = header("primitive-form", cfg);
    if let Value::Object(m) = st.to_json() {
        for key in ["J", "zeta", "r"] {
            out.insert(key.into(), m[key].clone());
        }
    }
    let mut text = format!("r = {}\n", st.r);
    for (d, v) in &st.j_terms {
        for (j, s) in v.iter().enumerate() {
            if !s.is_zero() {
                text += &format!("J_-{d}[s_{j}] = {s}\n");
            }
        }
    }
    text += &format!("zeta through u^{}:\n{}", st.u_cap, st.zeta.dump());
    Ok((out, text))
}

fn potential(cfg: &SolverConfig) -> Result<(Map<String, Value>, String, bool), Error> {
    let n = cfg.n;
    let st = solve_primitive_form::<Scalar>(cfg)?;
    let pot = potential_derivatives(&st)?;
    let mut out = header("potential", cfg);
    let mut text = String::new();

    let mut fc = Map::new();
    for (k, s) in flat_coordinates(&st).iter().enumerate() {
        text += &format!("tau_{k} = {s}\n");
        fc.insert(format!("tau_{k}"), s.to_json());
    }
    out.insert("flat_coords".into(), Value::Object(fc));
    let mut pd = Map::new();
    for (l, s) in pot.derivs.iter().enumerate() {
        text += &format!("dF/dtau_{l} = {s}\n");
        pd.insert(format!("tau_{l}"), s.to_json());
    }
    out.insert("potential_derivs".into(), Value::Object(pd));

    let mut two = Vec::new();
    for i in 0..n {
        let row = (0..n).map(|j| correlator(&st, &pot, &[i, j])).collect::<Result<Vec<_>, _>>()?;
        text += &format!("<{i}, .> = {}\n", row.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "));
        two.push(Value::Array(row.iter().map(rat).collect()));
    }
    let mut three = Map::new();
    if cfg.order >= 2 {
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let v = correlator(&st, &pot, &[i, j, k])?;
                    if v != Scalar::from_int(0) {
                        text += &format!("<{i},{j},{k}> = {v}\n");
                    }
                    three.insert(format!("{i},{j},{k}"), rat(&v));
                }
            }
        }
    }
    let four = if n >= 2 && cfg.order >= 3 {
        let v = correlator(&st, &pot, &[1, 1, n - 1, n - 1])?;
        text += &format!("<1,1,{0},{0}> = {v}\n", n - 1);
        rat(&v)
    } else {
        Value::Null
    };
    out.insert("correlators".into(), json!({"two_point": two, "three_point": three, "four_point_11nn": four}));

    let ax = check_primitive_axioms(&st)?;
    let checks = [
        ("P1", ax.p1.clone()),
        ("P2", ax.p2.clone()),
        ("P3", ax.p3.clone()),
        ("P4", ax.p4.clone()),
        ("WDVV", check_wdvv(&pot)),
        ("dimension", check_dimension_axiom(&pot)),
    ];
    let mut axioms = Map::new();
    let mut ok = true;
    for (name, r) in checks {
        ok &= r.passed();
        text += &format!("{name}: {r}\n");
        axioms.insert(name.into(), r.to_json());
    }
    out.insert("axioms".into(), Value::Object(axioms));
    Ok((out, text, ok))
}

/// Prints the requested output; returns whether every reported check passed.
fn run(cli: &Cli) -> Result<bool, Error> {
    let cfg = config(cli)?;
    let (out, text, ok) = match cli.command {
        Command::Invariants => {
            let (o, t) = invariants(&cfg)?;
            (o, t, true)
        }
        Command::PrimitiveForm => {
            let (o, t) = primitive_form(&cfg)?;
            (o, t, true)
        }
        Command::Potential => potential(&cfg)?,
        Command::Verify => {
            let reports = verify::<Scalar>(&cfg)?;
            let mut out = header("verify", &cfg);
            let mut text = String::new();
            for r in &reports {
                text += &format!("{r}\n");
            }
            let failed = reports.iter().filter(|r| !r.passed()).count();
            text += &format!("{} checks, {failed} failed\n", reports.len());
            out.insert("checks".into(), Value::Array(reports.iter().map(|r| r.to_json()).collect()));
            out.insert("failed".into(), json!(failed));
            (out, text, failed == 0)
        }
    };
    match cli.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&Value::Object(out)).expect("serializable")),
        Format::Text => print!("{text}"),
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("catgw: {e}");
            ExitCode::from(match e {
                Error::Usage(_) => 2,
                Error::Truncation(_) => 3,
                _ => 1,
            })
        }
    }
}
