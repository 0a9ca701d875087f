mod spec_file;

use clap::{Parser, Subcommand};
use conecount::cones::{dual, gorenstein_check, make_cone, Cone};
use conecount::counting::{count_cone, count_polytope};
use conecount::error::Error;
use conecount::orbifold::orbifold_period;
use conecount::ratmath::*;
use conecount::reeb::{minimize_volume, nearby_primitive_directions, rationalize, ReebResult};
use conecount::verify::{reeb_summary, verify_main_theorem, verify_polytope_bound, ReebSummary};
use spec_file::{load, Spec, SpecKind};
use std::path::PathBuf;
use std::process::ExitCode;

/// Exact lattice point counts in rational cones below moving hyperplanes,
/// canonical Reeb directions by volume minimization, and verification of the
/// coefficient identities and lower bound of the counting quasi-polynomial.
#[derive(Parser)]
#[command(name = "conecount", version)]
struct Cli {
    /// Cap the number of worker threads used for counting
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Gorenstein and smoothness certification of a cone file
    Check { file: PathBuf },
    /// Count lattice points of the dual cone at level k
    Count {
        file: PathBuf,
        /// Cutting vector, comma separated (defaults to the file's xi)
        #[arg(long)]
        xi: Option<String>,
        #[arg(long)]
        k: u64,
    },
    /// Dilation count fit and coefficient bound for a polytope file
    Ehrhart {
        file: PathBuf,
        #[arg(long)]
        kmax: Option<u64>,
        /// Write the structured report as JSON
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Minimize the slice volume and certify the direction when rational
    Reeb {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 1_000_000)]
        max_den: u64,
    },
    /// Full verification: counts, fit, coefficient equalities, bound margins
    Verify {
        file: PathBuf,
        /// Cutting vector, comma separated (defaults to the file's xi, then
        /// the certified Reeb direction, then the closest primitive candidate)
        #[arg(long)]
        xi: Option<String>,
        #[arg(long)]
        kmax: Option<u64>,
        /// Write the structured report as JSON
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn parse_xi(s: &str, dim: usize) -> Result<IntVec, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != dim {
        return Err(format!("--xi has {} entries, expected {}", parts.len(), dim));
    }
    parts
        .iter()
        .map(|p| {
            p.trim()
                .parse::<i64>()
                .map(Int::from)
                .map_err(|e| format!("--xi entry {p:?}: {e}"))
        })
        .collect()
}

/// exit code 2: malformed input or a failed hypothesis
const EXIT_INPUT: u8 = 2;
/// exit code 1: the verification itself failed
const EXIT_FAIL: u8 = 1;

fn fail_input(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_INPUT)
}

fn build_cone(spec: &Spec) -> Result<(Cone, Option<IntVec>), ExitCode> {
    match &spec.kind {
        SpecKind::Cone { rays, xi } => match make_cone(rays) {
            Ok(c) => Ok((c, xi.clone())),
            Err(e) => Err(fail_input(format!("{}: {e}", spec.name))),
        },
        SpecKind::Polytope { .. } => Err(fail_input(format!(
            "{}: this command needs a cone file (rays), not a polytope file",
            spec.name
        ))),
    }
}

fn run_reeb(cone: &Cone, tol: f64, max_den: u64) -> Result<ReebResult, Error> {
    let gd = gorenstein_check(cone)?;
    let mut r = minimize_volume(cone, &gd, tol)?;
    r.rational_xi = rationalize(&r, cone, &gd, max_den);
    Ok(r)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .ok();
    }
    match cli.cmd {
        Cmd::Check { file } => {
            let spec = match load(&file) {
                Ok(s) => s,
                Err(e) => return fail_input(e),
            };
            let (cone, _) = match build_cone(&spec) {
                Ok(v) => v,
                Err(c) => return c,
            };
            match gorenstein_check(&cone) {
                Ok(gd) => {
                    println!("name: {}", spec.name);
                    println!("dim: {}", cone.dim);
                    println!("rays: {}", fmt_vecs(&cone.rays));
                    println!("facet normals: {}", fmt_vecs(&cone.facet_normals));
                    println!("lambda: {}", fmt_vec(&gd.lambda));
                    println!("l: {}", gd.l);
                    println!("smooth: {}", gd.smooth);
                    if let Some(f) = &gd.offending_facet {
                        println!("offending facet (ray indices): {f:?}");
                        return ExitCode::from(EXIT_INPUT);
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail_input(format!("{}: {e}", spec.name)),
            }
        }
        Cmd::Count { file, xi, k } => {
            let spec = match load(&file) {
                Ok(s) => s,
                Err(e) => return fail_input(e),
            };
            match &spec.kind {
                SpecKind::Cone { .. } => {
                    let (cone, file_xi) = match build_cone(&spec) {
                        Ok(v) => v,
                        Err(c) => return c,
                    };
                    let xi = match xi {
                        Some(s) => match parse_xi(&s, cone.dim) {
                            Ok(v) => v,
                            Err(e) => return fail_input(e),
                        },
                        None => match file_xi {
                            Some(v) => v,
                            None => return fail_input("no xi given and none in the file"),
                        },
                    };
                    match count_cone(&dual(&cone), &xi, k) {
                        Ok(c) => {
                            println!("{c}");
                            ExitCode::SUCCESS
                        }
                        Err(e) => fail_input(e),
                    }
                }
                SpecKind::Polytope { vertices } => match count_polytope(vertices, k) {
                    Ok(c) => {
                        println!("{c}");
                        ExitCode::SUCCESS
                    }
                    Err(e) => fail_input(e),
                },
            }
        }
        Cmd::Ehrhart { file, kmax, json } => {
            let spec = match load(&file) {
                Ok(s) => s,
                Err(e) => return fail_input(e),
            };
            let SpecKind::Polytope { vertices } = &spec.kind else {
                return fail_input(format!(
                    "{}: ehrhart needs a polytope file (polytope_vertices)",
                    spec.name
                ));
            };
            let kmax = kmax.unwrap_or(spec.dim as u64 + 4);
            match verify_polytope_bound(&spec.name, vertices, kmax) {
                Ok(r) => {
                    println!("name: {}", r.name);
                    println!("reflexive: {}", r.reflexive);
                    println!("balanced: {}", r.balanced);
                    println!("volume: {}", r.vol);
                    println!("coefficients (k^0 ..): {}", r.coefficients.join(", "));
                    match (&r.a_low, &r.bound, &r.margin) {
                        (Some(a), Some(b), Some(m)) if r.hypotheses_met => {
                            println!("a_(n-2): {a}  bound: {b}  margin: {m}");
                        }
                        (Some(a), Some(b), _) => {
                            println!("a_(n-2): {a}  bound (not asserted, hypotheses unmet): {b}");
                        }
                        _ => println!("bound not applicable for n = {}", r.n),
                    }
                    println!("pass: {}", r.pass);
                    if let Some(p) = json {
                        if let Err(e) = std::fs::write(&p, r.to_json()) {
                            return fail_input(format!("{}: {e}", p.display()));
                        }
                    }
                    if r.pass {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(EXIT_FAIL)
                    }
                }
                Err(e) => fail_input(format!("{}: {e}", spec.name)),
            }
        }
        Cmd::Reeb { file, tol, max_den } => {
            let spec = match load(&file) {
                Ok(s) => s,
                Err(e) => return fail_input(e),
            };
            let (cone, _) = match build_cone(&spec) {
                Ok(v) => v,
                Err(c) => return c,
            };
            match run_reeb(&cone, tol, max_den) {
                Ok(r) => {
                    println!("name: {}", spec.name);
                    println!(
                        "xi_c: [{}]",
                        r.xi_c
                            .iter()
                            .map(|x| format!("{x:.12e}"))
                            .collect::<Vec<_>>()
                            .join(", ")
                    );
                    println!("volume at xi_c: {:.12e}", r.f_value);
                    println!("projected gradient norm: {:.12e}", r.grad_norm);
                    println!("iterations: {}", r.iterations);
                    println!("converged: {}", r.converged);
                    println!("hessian positive definite: {}", r.hessian_pd);
                    match &r.rational_xi {
                        Some(v) => println!(
                            "certified rational direction: {} (exact zero projected gradient)",
                            fmt_vec(v)
                        ),
                        None => {
                            let cands = nearby_primitive_directions(&r, &cone, 5);
                            println!("no rational certificate; nearest primitive directions:");
                            for c in cands {
                                println!("  {}", fmt_vec(&c));
                            }
                        }
                    }
                    if r.converged {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(EXIT_FAIL)
                    }
                }
                Err(e) => fail_input(format!("{}: {e}", spec.name)),
            }
        }
        Cmd::Verify {
            file,
            xi,
            kmax,
            json,
        } => {
            let spec = match load(&file) {
                Ok(s) => s,
                Err(e) => return fail_input(e),
            };
            let (cone, file_xi) = match build_cone(&spec) {
                Ok(v) => v,
                Err(c) => return c,
            };
            let n = cone.dim - 1;
            // xi priority: flag, file, certified reeb, closest candidate
            let mut reeb_sum: Option<ReebSummary> = None;
            let (xi, source): (IntVec, &str) = if let Some(s) = xi {
                match parse_xi(&s, cone.dim) {
                    Ok(v) => (v, "flag"),
                    Err(e) => return fail_input(e),
                }
            } else if let Some(v) = file_xi {
                (v, "file")
            } else {
                match run_reeb(&cone, 1e-10, 1_000_000) {
                    Ok(r) => {
                        reeb_sum = Some(reeb_summary(&r));
                        match &r.rational_xi {
                            Some(v) => (v.clone(), "reeb-certified"),
                            None => {
                                let mut cands = nearby_primitive_directions(&r, &cone, 3);
                                if cands.is_empty() {
                                    return fail_input("no primitive direction candidates");
                                }
                                (cands.remove(0), "reeb-candidate")
                            }
                        }
                    }
                    Err(e) => return fail_input(format!("{}: {e}", spec.name)),
                }
            };
            let kmax = match kmax {
                Some(k) => k,
                None => match orbifold_period(&cone, &xi) {
                    Ok(p) => p * (n as u64 + 4),
                    Err(e) => return fail_input(format!("{}: {e}", spec.name)),
                },
            };
            match verify_main_theorem(&spec.name, &cone, &xi, kmax, source, reeb_sum) {
                Ok(r) => {
                    print_verification(&r);
                    if let Some(p) = json {
                        if let Err(e) = std::fs::write(&p, r.to_json()) {
                            return fail_input(format!("{}: {e}", p.display()));
                        }
                    }
                    if r.pass {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(EXIT_FAIL)
                    }
                }
                Err(e) => fail_input(format!("{}: {e}", spec.name)),
            }
        }
    }
}

fn fmt_vec(v: &[Int]) -> String {
    format!(
        "({})",
        v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
    )
}

fn fmt_vecs(vs: &[IntVec]) -> String {
    vs.iter().map(|v| fmt_vec(v)).collect::<Vec<_>>().join(" ")
}

fn print_verification(r: &conecount::verify::VerificationReport) {
    println!("name: {}", r.name);
    println!("xi: ({}) [{}]", r.xi.join(", "), r.xi_source);
    println!("lambda: ({})  l: {}  q: {}", r.lambda.join(", "), r.l, r.q);
    println!("volume: {}", r.vol);
    println!("fit: degree {}, period {}, kmax {}", r.degree, r.period, r.kmax);
    for (res, row) in r.coefficients.iter().enumerate() {
        println!("  k = {res} mod {}: [{}]", r.period, row.join(", "));
    }
    println!(
        "leading coefficient equals volume: {}",
        r.leading_equals_volume
    );
    println!(
        "subleading equals (1+q)(n+1)/2 * vol = {}: {}",
        r.subleading_expected, r.subleading_equals_expected
    );
    println!("bound constant c_(q,n): {}", r.bound.c_qn);
    for (res, (b, m)) in r.bound.per_residue.iter().zip(&r.margins).enumerate() {
        println!("  residue {res}: bound {b}, margin {m}");
    }
    if let Some(exact) = r.surface_identity_exact {
        println!("surface closed-form identity exact: {exact}");
    }
    for row in &r.orbifold_rays {
        println!(
            "ray ({}): d = {}, g = {}, c = {}, S = [{}], w = {}",
            row.ray.join(", "),
            row.d,
            row.g,
            row.c_rho,
            row.correction_values.join(", "),
            row.w
        );
    }
    if let Some(reeb) = &r.reeb {
        println!(
            "reeb: xi_c = [{}], grad = {}, iterations = {}, certified = {}",
            reeb.xi_c.join(", "),
            reeb.grad_norm,
            reeb.iterations,
            reeb.certified_direction
                .as_ref()
                .map(|v| format!("({})", v.join(", ")))
                .unwrap_or_else(|| "no".into())
        );
    }
    println!("pass: {}", r.pass);
}
