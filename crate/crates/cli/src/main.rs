use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gwcycle::cycle_classes::fcurve_degree;
use gwcycle::nef_cone::{contracted_fcurves, negative_fcurves};
use gwcycle::qh_ring::star_product_all;
use gwcycle::verify;
use gwcycle::{
    decompose_in_rays, divisor_class, fourpoint_divisor, npoint_codim0, parse_element,
    parse_element_list, pushforward_divisor, ClassVector, Error, FCurve, GwSpec,
    Rational, RayTable, TargetSpace,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "gwcycle", version, about = "Gromov-Witten classes on M_0,n")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Human)]
    format: Format,

    /// Worker threads for the F-curve sums (default: 1).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Args)]
struct SpecArgs {
    /// Target space, e.g. P3, Q5 or Q6.
    #[arg(long)]
    space: String,
    /// Degree of the curve class.
    #[arg(long)]
    degree: u32,
    /// Comma-separated insertions, e.g. H1,H3,q*H0,Xi1.
    #[arg(long, allow_hyphen_values = true)]
    insertions: String,
}

#[derive(Subcommand)]
enum Command {
    /// Quantum product of the given elements.
    QhMult {
        #[arg(long)]
        space: String,
        /// Elements to multiply, e.g. H1 H2 or "H1,H2".
        #[arg(required = true)]
        elements: Vec<String>,
    },
    /// Codimension-0 number I^0_d.
    GwNpoint(SpecArgs),
    /// Degree of the four-point divisor I^1_d.
    GwFourpoint(SpecArgs),
    /// Degree of the divisor I^1_d on one F-curve.
    FcurveDeg {
        #[command(flatten)]
        spec: SpecArgs,
        /// F-curve such as "F{1|2|3|4,5,6}".
        #[arg(long)]
        fcurve: String,
    },
    /// Divisor class in the nonadjacent basis (n = 5, 6).
    Class {
        #[command(flatten)]
        spec: SpecArgs,
        /// Number of markings; must match the insertions.
        #[arg(long)]
        n: Option<u32>,
    },
    /// Pushforward of a codimension-2 class forgetting the last marking.
    Pushforward(SpecArgs),
    /// F-nefness, contracted F-curves and a ray decomposition.
    NefCheck {
        /// Coefficients in the nonadjacent basis of M_0,6.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "class_json")]
        vector: Option<String>,
        /// ClassVector JSON file.
        #[arg(long)]
        class_json: Option<PathBuf>,
        /// Ray table JSON file.
        #[arg(long, env = "GWCYCLE_RAYS")]
        rays: Option<PathBuf>,
    },
    /// Replay every worked example and report pass/fail per item.
    Verify,
}

/// Failure carrying its exit status.
struct Failure {
    status: u8,
    error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let parse = error
            .chain()
            .any(|e| matches!(e.downcast_ref::<Error>(), Some(Error::Parse(_))));
        Failure {
            status: if parse { 2 } else { 1 },
            error,
        }
    }
}

fn usage(error: anyhow::Error) -> Failure {
    Failure { status: 2, error }
}

fn parse_spec(a: &SpecArgs) -> Result<GwSpec, Failure> {
    let space: TargetSpace = a.space.parse().map_err(|e: Error| usage(e.into()))?;
    let ins = parse_element_list(space, &a.insertions).map_err(|e| usage(e.into()))?;
    GwSpec::with_inferred_codim(space, a.degree, ins)
        .context("building the class")
        .map_err(Failure::from)
}

fn require_codim(spec: &GwSpec, codim: u32) -> Result<(), Failure> {
    if spec.codim != codim {
        return Err(anyhow!(
            "insertions give a codimension-{} class, expected codimension {codim}",
            spec.codim
        )
        .into());
    }
    Ok(())
}

fn scalar(format: Format, name: &str, value: impl ToString) -> String {
    let v = value.to_string();
    match format {
        Format::Human => v,
        Format::Json => json!({ name: v }).to_string(),
        Format::Csv => format!("{name}\n{v}"),
    }
}

fn class_out(format: Format, v: &ClassVector) -> String {
    match format {
        Format::Human => {
            let rows: Vec<String> = v
                .basis_labels()
                .iter()
                .zip(v.coeffs())
                .map(|(l, c)| format!("{l:>5} {c}"))
                .collect();
            format!("{v}\n{}", rows.join("\n"))
        }
        Format::Json => v.to_json(),
        Format::Csv => v.to_csv().trim_end().to_string(),
    }
}

fn load_rays(path: &Option<PathBuf>) -> Result<RayTable, Failure> {
    match path {
        None => Ok(RayTable::builtin()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading {}", p.display()))
                .map_err(usage)?;
            RayTable::from_json(&text).map_err(|e| usage(e.into()))
        }
    }
}

fn parse_vector(s: &str) -> Result<ClassVector, Failure> {
    let coeffs = s
        .trim()
        .trim_start_matches('[')
        .trim_end_matches(']')
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<Rational>()
                .map_err(|_| usage(anyhow!("bad coefficient `{}`", t.trim())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let n = match coeffs.len() {
        5 => 5,
        16 => 6,
        k => return Err(usage(anyhow!("{k} coefficients; expected 5 (n=5) or 16 (n=6)"))),
    };
    ClassVector::new(n, coeffs).map_err(|e| usage(e.into()))
}

fn nef_check(format: Format, v: &ClassVector, table: &RayTable) -> Result<String, Failure> {
    let negative = negative_fcurves(v).map_err(anyhow::Error::from)?;
    let contracted = contracted_fcurves(v).map_err(anyhow::Error::from)?;
    let decomposition = if v.n() == table.n() {
        decompose_in_rays(v, table).map_err(anyhow::Error::from)?
    } else {
        None
    };
    let used: BTreeMap<String, String> = decomposition
        .iter()
        .flatten()
        .filter(|(_, c)| **c != Rational::from_integer(0.into()))
        .map(|(k, c)| (k.clone(), c.to_string()))
        .collect();
    Ok(match format {
        Format::Json => json!({
            "class": serde_json::from_str::<Value>(&v.to_json()).expect("valid json"),
            "f_nef": negative.is_empty(),
            "negative": negative.iter().map(|(f, d)| json!({"fcurve": f.to_string(), "degree": d.to_string()})).collect::<Vec<_>>(),
            "contracted": contracted.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
            "decomposition": decomposition.as_ref().map(|_| json!(used)),
        })
        .to_string(),
        Format::Csv => {
            let mut out = String::from("fcurve,degree\n");
            for f in gwcycle::all_fcurves(v.n()) {
                out.push_str(&format!("\"{f}\",{}\n", v.pair_fcurve(&f).map_err(anyhow::Error::from)?));
            }
            out.trim_end().to_string()
        }
        Format::Human => {
            let mut out = format!("class {v}\nF-nef: {}\n", if negative.is_empty() { "yes" } else { "no" });
            for (f, d) in &negative {
                out.push_str(&format!("  negative on {f}: {d}\n"));
            }
            out.push_str(&format!("contracted F-curves: {}\n", contracted.len()));
            match decomposition {
                Some(_) => {
                    let parts: Vec<String> = used.iter().map(|(k, c)| format!("{c} {k}")).collect();
                    out.push_str(&format!("rays: {}", if parts.is_empty() { "0".into() } else { parts.join(" + ") }));
                }
                None => out.push_str("rays: no decomposition in the table"),
            }
            out
        }
    })
}

fn verify_out(format: Format) -> (String, bool) {
    let reports = verify::run_all();
    let all = reports.iter().all(|r| r.passed());
    let text = match format {
        Format::Json => json!({
            "passed": all,
            "criteria": reports.iter().map(|r| json!({
                "id": r.id,
                "title": r.title,
                "passed": r.passed(),
                "items": r.items.iter().map(|i| json!({"label": i.label, "passed": i.passed, "detail": i.detail})).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
        .to_string(),
        Format::Csv => {
            let mut out = String::from("criterion,item,passed,detail\n");
            for r in &reports {
                for i in &r.items {
                    out.push_str(&format!(
                        "{},\"{}\",{},\"{}\"\n",
                        r.id,
                        i.label.replace('"', "\"\""),
                        i.passed,
                        i.detail.replace('"', "\"\"")
                    ));
                }
            }
            out.trim_end().to_string()
        }
        Format::Human => {
            let mut out = String::new();
            for r in &reports {
                let s = if r.passed() { "PASS" } else { "FAIL" };
                out.push_str(&format!("{s} {}: {}\n", r.id, r.title));
                for i in &r.items {
                    let s = if i.passed { "ok  " } else { "FAIL" };
                    out.push_str(&format!("    {s} {}: {}\n", i.label, i.detail));
                }
            }
            out.trim_end().to_string()
        }
    };
    (text, all)
}

/// Runs the command; `Ok(false)` means it completed with failed checks.
fn run(cli: &Cli) -> Result<(String, bool), Failure> {
    let f = cli.format;
    let out = match &cli.command {
        Command::QhMult { space, elements } => {
            let space: TargetSpace = space.parse().map_err(|e: Error| usage(e.into()))?;
            let mut items = Vec::new();
            for e in elements {
                let parsed = if e.contains(',') {
                    parse_element_list(space, e)
                } else {
                    parse_element(space, e).map(|x| vec![x])
                };
                items.extend(parsed.map_err(|e| usage(e.into()))?);
            }
            let p = star_product_all(&items).map_err(anyhow::Error::from)?;
            scalar(f, "product", p)
        }
        Command::GwNpoint(a) => {
            let spec = parse_spec(a)?;
            require_codim(&spec, 0)?;
            scalar(f, "value", npoint_codim0(&spec).map_err(anyhow::Error::from)?)
        }
        Command::GwFourpoint(a) => {
            let spec = parse_spec(a)?;
            if spec.n() != 4 {
                return Err(anyhow!("four-point divisors need 4 insertions, got {}", spec.n()).into());
            }
            require_codim(&spec, 1)?;
            scalar(f, "value", fourpoint_divisor(&spec).map_err(anyhow::Error::from)?)
        }
        Command::FcurveDeg { spec, fcurve } => {
            let spec = parse_spec(spec)?;
            require_codim(&spec, 1)?;
            let curve: FCurve = fcurve.parse().map_err(|e: Error| usage(e.into()))?;
            scalar(f, "degree", fcurve_degree(&spec, &curve).map_err(anyhow::Error::from)?)
        }
        Command::Class { spec, n } => {
            let spec = parse_spec(spec)?;
            if let Some(n) = n {
                if *n as usize != spec.n() {
                    return Err(usage(anyhow!("--n {n} but {} insertions", spec.n())));
                }
            }
            require_codim(&spec, 1)?;
            class_out(f, &divisor_class(&spec).map_err(anyhow::Error::from)?)
        }
        Command::Pushforward(a) => {
            let spec = parse_spec(a)?;
            require_codim(&spec, 2)?;
            class_out(f, &pushforward_divisor(&spec).map_err(anyhow::Error::from)?)
        }
        Command::NefCheck {
            vector,
            class_json,
            rays,
        } => {
            let v = match (vector, class_json) {
                (Some(s), _) => parse_vector(s)?,
                (None, Some(p)) => {
                    let text = std::fs::read_to_string(p)
                        .with_context(|| format!("reading {}", p.display()))
                        .map_err(usage)?;
                    ClassVector::from_json(&text).map_err(|e| usage(e.into()))?
                }
                (None, None) => return Err(usage(anyhow!("give --vector or --class-json"))),
            };
            nef_check(f, &v, &load_rays(rays)?)?
        }
        Command::Verify => return Ok(verify_out(f)),
    };
    Ok((out, true))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads.unwrap_or(1);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match pool.install(|| run(&cli)) {
        Ok((out, ok)) => {
            println!("{out}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure { status, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(status)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn vectors_need_a_known_length() {
        assert!(parse_vector("1,2,3").is_err());
        assert_eq!(parse_vector("[1,0,1,1,0,1,1,0,1,0,0,0,2,0,0,0]").ok().map(|v| v.n()), Some(6));
        assert!(parse_vector("1,x,0,0,0").is_err());
    }

    #[test]
    fn scalar_formats() {
        assert_eq!(scalar(Format::Human, "value", 16), "16");
        assert_eq!(scalar(Format::Json, "value", 16), r#"{"value":"16"}"#);
        assert_eq!(scalar(Format::Csv, "value", 16), "value\n16");
    }

    #[test]
    fn bad_specs_are_usage_errors() {
        let a = SpecArgs {
            space: "X7".into(),
            degree: 1,
            insertions: "H1".into(),
        };
        assert_eq!(parse_spec(&a).err().map(|f| f.status), Some(2));
        let a = SpecArgs {
            space: "Q3".into(),
            degree: 1,
            insertions: "H1,H9".into(),
        };
        assert_eq!(parse_spec(&a).err().map(|f| f.status), Some(2));
    }

    #[test]
    fn domain_errors_exit_with_one() {
        let f: Failure = anyhow::Error::from(Error::Unsupported("x".into())).into();
        assert_eq!(f.status, 1);
        let f: Failure = anyhow::Error::from(Error::Parse("x".into())).into();
        assert_eq!(f.status, 2);
    }
}
