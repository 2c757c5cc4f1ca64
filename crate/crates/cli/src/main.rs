mod render;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gstruct::analysis::{analyze, verify_claims, AnalysisFlags, Claim};
use gstruct::groupconn::{
    canonical_torsion_family, half_bracket, laquer_eta, laquer_nu, metricity_defect, named_algebra, theta_kernel_adjoint, trace_metric,
    BilinearConnectionMap,
};
use gstruct::liealg::MatrixLieAlgebra;
use gstruct::numkernel::rank;
use gstruct::repdecomp::{isotypic_decompose, lambda3_action, subgroup_decompose, theta_map, v14_x_v70};
use gstruct::{sp3catalog, Error, MetricParams, SpaceId, ToleranceProfile};
use serde::Serialize;
use serde_json::{json, Value};

const OK: u8 = 0;
const USAGE: u8 = 1;
const INFEASIBLE: u8 = 2;
const INVARIANT: u8 = 3;

#[derive(Parser)]
#[command(name = "gstruct", version, about = "Invariant connections with skew torsion on Sp(3)-structured homogeneous spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand)]
enum Command {
    /// Full report for one space: su4-so2, u4-so2so2, u4u1-so2so2so2, su5-sp2 (or M1..M4).
    Analyze { space: String },
    /// Casimir decomposition: lambda3 or v14xv70.
    Decompose { selector: String },
    /// Kernel of the Θ map: sp3 or su3-adjoint.
    Theta { selector: String },
    /// Block decompositions of V¹⁴ under the listed subgroups of Sp(3).
    Subgroups,
    /// Biinvariant connections on a compact group: su2, su3, su2+su2, su2+u1.
    Liegroup { selector: String },
    /// Re-evaluate every closed form for one space, or all of them.
    Verify { space: Option<String> },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Args)]
struct Opts {
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    alpha2: Option<f64>,
    #[arg(long, global = true)]
    alpha3: Option<f64>,
    #[arg(long, global = true)]
    alpha4: Option<f64>,
    #[arg(long, global = true)]
    alpha5: Option<f64>,
    #[arg(long, global = true)]
    alpha6: Option<f64>,
    #[arg(long, global = true)]
    alpha7: Option<f64>,
    #[arg(long, global = true)]
    alpha8: Option<f64>,
    #[arg(long, global = true)]
    beta: Option<f64>,
    #[arg(long, global = true)]
    gamma: Option<f64>,
    /// Output format (verify defaults to table, everything else to json).
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Relative rank cutoff.
    #[arg(long, global = true, env = "GSTRUCT_TOL")]
    tol: Option<f64>,
    #[arg(long, global = true)]
    no_spin: bool,
    #[arg(long, global = true)]
    no_holonomy: bool,
    #[arg(long, global = true)]
    no_curvature: bool,
}

struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BadParams(_) | Error::BadTolerance(_) | Error::DimensionMismatch(_) => USAGE,
            Error::Infeasible(_) => INFEASIBLE,
            _ => INVARIANT,
        };
        Failure(code, e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure(USAGE, msg.into())
}

impl Opts {
    fn tolerance(&self) -> Result<ToleranceProfile, Failure> {
        match self.tol {
            Some(t) => ToleranceProfile::default().with_rank_tol(t).map_err(Failure::from),
            None => Ok(ToleranceProfile::default()),
        }
    }

    fn params(&self, id: SpaceId) -> Result<MetricParams, Failure> {
        let extra = [self.alpha2, self.alpha3, self.alpha4, self.alpha5, self.alpha6, self.alpha7, self.alpha8];
        let arity = id.alphas_arity();
        if let Some(n) = extra.iter().enumerate().skip(arity).find(|(_, x)| x.is_some()).map(|(i, _)| i + 2) {
            let allowed = if arity == 0 { "no --alphaN".to_string() } else { format!("only --alpha2..--alpha{}", arity + 1) };
            return Err(usage(format!("{id} takes {allowed}; got --alpha{n}")));
        }
        let alpha = self.alpha.unwrap_or(1.0);
        let alphas = extra[..arity].iter().map(|x| x.unwrap_or(alpha)).collect();
        let p = MetricParams::new(alpha, alphas, self.beta.unwrap_or(1.0), self.gamma.unwrap_or(1.0));
        p.validate(id)?;
        Ok(p)
    }

    fn flags(&self) -> AnalysisFlags {
        AnalysisFlags {
            holonomy: !self.no_holonomy,
            curvature: !self.no_curvature,
            spin: !self.no_spin,
        }
    }
}

fn space(s: &str) -> Result<SpaceId, Failure> {
    s.parse().map_err(|_| usage(format!("unknown space '{s}' (expected su4-so2, u4-so2so2, u4u1-so2so2so2, su5-sp2 or M1..M4)")))
}

/// Refuses to run on a catalog whose isotropy tables are inconsistent.
fn catalog_check(tol: &ToleranceProfile) -> Result<(), Failure> {
    let derived = sp3catalog::derive_isotropy(tol)?;
    let res = sp3catalog::load().homomorphism_residual(&derived);
    if res > 1e-9 {
        return Err(Failure(INVARIANT, format!("catalog homomorphism residual {res:.3e}")));
    }
    Ok(())
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn eigen_map(table: &[(f64, usize)]) -> Value {
    let mut t = table.to_vec();
    t.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut m = serde_json::Map::new();
    for (ev, d) in t {
        m.insert(render::number(ev), json!(d));
    }
    Value::Object(m)
}

fn decompose(sel: &str, tol: &ToleranceProfile) -> Result<Value, Failure> {
    let rho = &sp3catalog::load().rho;
    let (rep, dec) = match sel {
        "lambda3" => {
            let rep = lambda3_action(rho)?;
            let dec = isotypic_decompose(&rep, tol)?;
            (rep, dec)
        }
        "v14xv70" => v14_x_v70(tol)?,
        _ => return Err(usage(format!("unknown representation '{sel}' (expected lambda3 or v14xv70)"))),
    };
    let table = dec.table();
    let mut dims: Vec<usize> = table.iter().map(|t| t.1).collect();
    dims.sort_unstable();
    Ok(json!({
        "representation": sel,
        "dim": rep.dim,
        "components": eigen_map(&table),
        "dimensions": dims,
    }))
}

fn theta(sel: &str, tol: &ToleranceProfile) -> Result<Value, Failure> {
    let (name, gens) = match sel {
        "sp3" => ("rho(sp(3)) in so(14)", sp3catalog::load().rho.clone()),
        "su3-adjoint" => ("ad(su(3)) in so(8)", gstruct::groupconn::adjoint_generators(&MatrixLieAlgebra::su(3), tol)?),
        _ => return Err(usage(format!("unknown group '{sel}' (expected sp3 or su3-adjoint)"))),
    };
    let th = theta_map(name, &gens, tol)?;
    let r = rank(&th.matrix, tol);
    Ok(json!({
        "group": name,
        "n": th.n,
        "rows": th.matrix.nrows(),
        "cols": th.matrix.ncols(),
        "rank": r,
        "kernel_dim": th.matrix.ncols() - r,
    }))
}

fn subgroups(tol: &ToleranceProfile) -> Result<Value, Failure> {
    let mut rows = Vec::new();
    for row in sp3catalog::subgroup_rows() {
        let blocks = subgroup_decompose(&row, tol)?;
        let mut want = row.expected_blocks.clone();
        want.sort_unstable_by(|a, b| b.cmp(a));
        let mut got = blocks.clone();
        got.sort_unstable_by(|a, b| b.cmp(a));
        rows.push(json!({
            "subgroup": row.name,
            "dim": row.generators.len(),
            "blocks": got,
            "expected": want,
            "match": got == want,
        }));
    }
    Ok(json!({ "rows": rows }))
}

const METRICITY_SAMPLES: usize = 100;

fn liegroup(sel: &str, tol: &ToleranceProfile) -> Result<Value, Failure> {
    let (alg, part) = named_algebra(sel, tol).ok_or_else(|| usage(format!("unknown algebra '{sel}' (expected su2, su3, su2+su2 or su2+u1)")))?;
    let kernel = theta_kernel_adjoint(&alg, tol)?;
    let family = canonical_torsion_family(&alg, &part, tol)?;
    let family_residual = family.iter().map(|f| kernel.residual(f)).fold(0.0f64, f64::max);
    let simple_n = match sel {
        "su2" => Some(2),
        "su3" => Some(3),
        _ => None,
    };
    let laquer = match simple_n {
        Some(n) => {
            let g = trace_metric(&alg, n);
            let half = half_bracket(&alg, tol)?;
            let eta = BilinearConnectionMap::from_fn(&alg, tol, |x, y| laquer_eta(x, y, n))?;
            let un = MatrixLieAlgebra::u(n);
            let nu = BilinearConnectionMap::from_fn(&un, tol, laquer_nu)?;
            let gu = trace_metric(&un, n);
            json!({
                "metric": format!("-{}*tr(XY)", 2 * n),
                "half_bracket_defect": metricity_defect(&half, &g, METRICITY_SAMPLES, 1),
                "eta_defect": metricity_defect(&eta, &g, METRICITY_SAMPLES, 2),
                "nu_defect": metricity_defect(&nu, &gu, METRICITY_SAMPLES, 3),
            })
        }
        None => Value::Null,
    };
    Ok(json!({
        "algebra": alg.name,
        "dim": alg.dim(),
        "ideals": part.len(),
        "theta_kernel_dim": kernel.dim(),
        "canonical_family_dim": family.len(),
        "family_theta_residual": family_residual,
        "laquer": laquer,
    }))
}

fn verify_table(claims: &[Claim]) -> String {
    let w = claims.iter().map(|c| c.claim.len()).max().unwrap_or(0);
    let mut out = String::new();
    for c in claims {
        let status = match (c.pass, c.known_discrepancy) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        out.push_str(&format!(
            "{status:<12}  {:<16} {:<w$}  observed={}  expected={}  error={}\n",
            c.space_id,
            c.claim,
            render::number(c.observed),
            render::number(c.expected),
            render::number(c.error),
        ));
    }
    out
}

fn emit(v: &Value, format: Format) {
    match format {
        Format::Json => print!("{}", render::json(v)),
        Format::Table => print!("{}", render::table(v)),
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let o = &cli.opts;
    let tol = o.tolerance()?;
    let format = o.format.unwrap_or(Format::Json);
    match &cli.command {
        Command::Analyze { space: s } => {
            let id = space(s)?;
            let p = o.params(id)?;
            catalog_check(&tol)?;
            let r = analyze(id, &p, o.flags(), &tol)?;
            emit(&to_value(&r), format);
            Ok(if r.exists() { OK } else { INFEASIBLE })
        }
        Command::Decompose { selector } => {
            catalog_check(&tol)?;
            emit(&decompose(selector, &tol)?, format);
            Ok(OK)
        }
        Command::Theta { selector } => {
            catalog_check(&tol)?;
            emit(&theta(selector, &tol)?, format);
            Ok(OK)
        }
        Command::Subgroups => {
            catalog_check(&tol)?;
            let v = subgroups(&tol)?;
            let all = v["rows"].as_array().is_some_and(|r| r.iter().all(|x| x["match"] == json!(true)));
            emit(&v, format);
            Ok(if all { OK } else { INVARIANT })
        }
        Command::Liegroup { selector } => {
            emit(&liegroup(selector, &tol)?, format);
            Ok(OK)
        }
        Command::Verify { space: s } => {
            let ids = match s {
                Some(s) => vec![space(s)?],
                None => SpaceId::ALL.to_vec(),
            };
            let params = ids.iter().map(|&id| o.params(id)).collect::<Result<Vec<_>, _>>()?;
            catalog_check(&tol)?;
            let mut claims = Vec::new();
            for (id, p) in ids.into_iter().zip(&params) {
                claims.extend(verify_claims(id, p, &tol)?);
            }
            match o.format.unwrap_or(Format::Table) {
                Format::Table => print!("{}", verify_table(&claims)),
                Format::Json => print!("{}", render::json(&to_value(&claims))),
            }
            Ok(if claims.iter().all(|c| c.pass || c.known_discrepancy) { OK } else { INVARIANT })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("gstruct: {msg}");
            ExitCode::from(code)
        }
    }
}
