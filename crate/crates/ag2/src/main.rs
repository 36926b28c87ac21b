//! Command-line entry point: builds the Baker-Akhiezer function, runs the
//! verification suites, and emits machine-readable reports.

use ag2::algebra::Rat;
use ag2::ba::{
    ba_equal, ba_linear_oracle_numeric, ba_linear_oracle_symbolic, rational_limit_identities,
    verify_axioms, verify_eigen_difference, verify_eigen_schrodinger, verify_subleading,
    BuildRoute,
};
use ag2::diffop::{
    apply_to_poly, check_structural_conditions, commutator, make_d1, make_d2, residue_pair_sum,
    DifferenceOperator,
};
use ag2::io::{append_manifest, cached_ba, content_hash, save_ba, RunManifest};
use ag2::lattice::{build_config, reflect, ConfigName, LatticeVector};
use ag2::quasi::{is_quasi_invariant, sample_ring_elements};
use ag2::reductions::{verify_a1_identities, verify_a2_preservation, verify_d0_preservation};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::collections::BTreeMap;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "ag2", about = "Exact engine for the AG2 CMS bispectral system")]
struct Cli {
    /// worker threads for the parallel kernels
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Via {
    D1,
    D2,
}

impl Via {
    fn route(self) -> BuildRoute {
        match self {
            Via::D1 => BuildRoute::D1,
            Via::D2 => BuildRoute::D2,
        }
    }
    fn operator(self, m: u32) -> DifferenceOperator {
        match self {
            Via::D1 => make_d1(m),
            Via::D2 => make_d2(m),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyTarget {
    Axioms,
    Bispectral,
    Schrodinger,
    Subleading,
    Uniqueness,
    All,
}

#[derive(Subcommand)]
enum Cmd {
    /// Construct the function via a dual operator and cache it
    Build {
        #[arg(long)]
        m: u32,
        #[arg(long, value_enum)]
        via: Via,
        /// re-verify ring membership after every iteration (diagnostic)
        #[arg(long)]
        check_each: bool,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Run verification suites against the (cached) construction
    Verify {
        #[arg(value_enum)]
        target: VerifyTarget,
        #[arg(long)]
        m: u32,
    },
    /// Residue pairs of the operator coefficients on a hyperplane
    Residues {
        #[arg(long, value_enum)]
        operator: Via,
        /// hyperplane as `<root>=<c>`, e.g. beta1=2
        #[arg(long)]
        hyperplane: String,
        /// comma-separated m values
        #[arg(long)]
        m_values: String,
    },
    /// Structural conditions (degree, pole catalogue, Weyl equivariance)
    CheckStructure {
        #[arg(long, value_enum)]
        operator: Via,
        #[arg(long)]
        m: u32,
    },
    /// Ring preservation on seeded samples
    Preserve {
        /// d1 | d2 | d0 | a2
        #[arg(long)]
        operator: String,
        #[arg(long, default_value_t = 0)]
        m: u32,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// The m = 0 reduction identities
    Reductions,
    /// The rational-limit identities
    LimitIdentities {
        #[arg(long)]
        m: u32,
    },
    /// Linear-system oracle (symbolic for m = 0, numeric-E otherwise)
    Oracle {
        #[arg(long)]
        m: u32,
        /// nonzero rational E values `r1,r2` for the numeric solve
        #[arg(long)]
        e: Option<String>,
    },
}

fn parse_root(name: &str) -> Option<LatticeVector> {
    use ag2::lattice::{ALPHA1, ALPHA2, ALPHA3, BETA1, BETA2, BETA3};
    match name {
        "beta1" => Some(BETA1),
        "beta2" => Some(BETA2),
        "beta3" => Some(BETA3),
        "alpha1" => Some(ALPHA1),
        "alpha2" => Some(ALPHA2),
        "alpha3" => Some(ALPHA3),
        _ => None,
    }
}

fn main() {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .ok();
    }
    let t0 = Instant::now();
    let mut params = BTreeMap::new();
    let mut cache_hits = 0u32;
    let mut artifacts = BTreeMap::new();
    let (command, result) = run(&cli.cmd, &mut params, &mut cache_hits, &mut artifacts);
    let ok = result.is_ok();
    match &result {
        Ok(value) => println!("{}", serde_json::to_string_pretty(value).unwrap()),
        Err(value) => println!("{}", serde_json::to_string_pretty(value).unwrap()),
    }
    let manifest = RunManifest {
        command,
        parameters: params,
        code_version: ag2::io::code_version(),
        elapsed_ms: t0.elapsed().as_millis(),
        cache_hits,
        artifact_hashes: artifacts,
        ok,
    };
    append_manifest(&manifest).ok();
    std::process::exit(if ok { 0 } else { 1 });
}

type RunResult = Result<serde_json::Value, serde_json::Value>;

fn fail(detail: impl Into<serde_json::Value>) -> RunResult {
    Err(json!({ "status": "fail", "detail": detail.into() }))
}

fn run(
    cmd: &Cmd,
    params: &mut BTreeMap<String, String>,
    cache_hits: &mut u32,
    artifacts: &mut BTreeMap<String, String>,
) -> (String, RunResult) {
    match cmd {
        Cmd::Build {
            m,
            via,
            check_each,
            out,
        } => {
            params.insert("m".into(), m.to_string());
            params.insert("via".into(), format!("{}", via.route()));
            params.insert("check_each".into(), check_each.to_string());
            let r = do_build(*m, *via, *check_each, out.as_deref(), cache_hits, artifacts);
            ("build".into(), r)
        }
        Cmd::Verify { target, m } => {
            params.insert("m".into(), m.to_string());
            ("verify".into(), do_verify(*target, *m, cache_hits))
        }
        Cmd::Residues {
            operator,
            hyperplane,
            m_values,
        } => {
            params.insert("hyperplane".into(), hyperplane.clone());
            params.insert("m_values".into(), m_values.clone());
            ("residues".into(), do_residues(*operator, hyperplane, m_values))
        }
        Cmd::CheckStructure { operator, m } => {
            params.insert("m".into(), m.to_string());
            ("check-structure".into(), do_check_structure(*operator, *m))
        }
        Cmd::Preserve {
            operator,
            m,
            samples,
            seed,
        } => {
            params.insert("operator".into(), operator.clone());
            params.insert("m".into(), m.to_string());
            params.insert("samples".into(), samples.to_string());
            params.insert("seed".into(), seed.to_string());
            ("preserve".into(), do_preserve(operator, *m, *samples, *seed))
        }
        Cmd::Reductions => ("reductions".into(), do_reductions()),
        Cmd::LimitIdentities { m } => {
            params.insert("m".into(), m.to_string());
            let rep = rational_limit_identities(*m);
            let ok = rep.passed();
            let v = serde_json::to_value(&rep).unwrap();
            ("limit-identities".into(), if ok { Ok(v) } else { Err(v) })
        }
        Cmd::Oracle { m, e } => {
            params.insert("m".into(), m.to_string());
            ("oracle".into(), do_oracle(*m, e.as_deref(), cache_hits))
        }
    }
}

fn do_build(
    m: u32,
    via: Via,
    check_each: bool,
    out: Option<&std::path::Path>,
    cache_hits: &mut u32,
    artifacts: &mut BTreeMap<String, String>,
) -> RunResult {
    if check_each {
        // diagnostic mode: rebuild without cache, checking ring membership
        // of every iterate
        match ag2::ba::construct_ba_checked(m, via.route()) {
            Ok(_) => {}
            Err(e) => return fail(e.to_string()),
        }
    }
    let t0 = Instant::now();
    let (ba, hit) = match cached_ba(m, via.route()) {
        Ok(x) => x,
        Err(e) => return fail(e),
    };
    if hit {
        *cache_hits += 1;
    }
    let path = out
        .map(|p| p.to_path_buf())
        .unwrap_or_else(|| ag2::io::ba_cache_path(m, via.route()));
    if save_ba(&ba, t0.elapsed().as_secs_f64(), &path).is_err() {
        return fail("could not write artifact");
    }
    if let Ok(bytes) = std::fs::read(&path) {
        artifacts.insert(path.display().to_string(), content_hash(&bytes));
    }
    Ok(json!({
        "status": "ok",
        "m": m,
        "via": format!("{}", via.route()),
        "degree": ba.z_degree(),
        "degree_trace": ba.degree_trace,
        "c_divides_exactly": ba.c_divides_exactly,
        "cache_hit": hit,
        "artifact": path.display().to_string(),
        "elapsed_s": t0.elapsed().as_secs_f64(),
    }))
}

fn do_verify(target: VerifyTarget, m: u32, cache_hits: &mut u32) -> RunResult {
    let load = |via: BuildRoute, hits: &mut u32| -> Result<ag2::ba::BAFunction, String> {
        let (ba, hit) = cached_ba(m, via)?;
        if hit {
            *hits += 1;
        }
        Ok(ba)
    };
    let ba = match load(BuildRoute::D1, cache_hits) {
        Ok(b) => b,
        Err(e) => return fail(e),
    };
    let mut checks: BTreeMap<String, bool> = BTreeMap::new();
    let mut timings: BTreeMap<String, f64> = BTreeMap::new();
    let mut timed = |name: &str, f: &mut dyn FnMut() -> bool, checks: &mut BTreeMap<String, bool>| {
        let t = Instant::now();
        let ok = f();
        timings.insert(name.into(), t.elapsed().as_secs_f64());
        checks.insert(name.into(), ok);
    };
    let want = |t: VerifyTarget, which: VerifyTarget| -> bool {
        matches!(t, VerifyTarget::All) || std::mem::discriminant(&t) == std::mem::discriminant(&which)
    };
    if want(target, VerifyTarget::Axioms) {
        timed(
            "axioms",
            &mut || verify_axioms(&ba).values().all(|&v| v),
            &mut checks,
        );
    }
    if want(target, VerifyTarget::Bispectral) {
        timed(
            "bispectral_d1",
            &mut || verify_eigen_difference(&ba, &make_d1(m)),
            &mut checks,
        );
        timed(
            "bispectral_d2",
            &mut || verify_eigen_difference(&ba, &make_d2(m)),
            &mut checks,
        );
    }
    if want(target, VerifyTarget::Schrodinger) {
        timed("schrodinger", &mut || verify_eigen_schrodinger(&ba), &mut checks);
    }
    if want(target, VerifyTarget::Subleading) {
        timed("subleading", &mut || verify_subleading(&ba), &mut checks);
    }
    if want(target, VerifyTarget::Uniqueness) {
        let other = match load(BuildRoute::D2, cache_hits) {
            Ok(b) => b,
            Err(e) => return fail(e),
        };
        timed("uniqueness", &mut || ba_equal(&ba, &other), &mut checks);
    }
    let ok = checks.values().all(|&v| v);
    let v = json!({
        "status": if ok { "ok" } else { "fail" },
        "m": m,
        "checks": checks,
        "timings_s": timings,
    });
    if ok {
        Ok(v)
    } else {
        Err(v)
    }
}

fn do_residues(operator: Via, hyperplane: &str, m_values: &str) -> RunResult {
    let Some((root_name, c_str)) = hyperplane.split_once('=') else {
        return fail("hyperplane must be <root>=<c>");
    };
    let Some(alpha) = parse_root(root_name.trim()) else {
        return fail(format!("unknown root {:?}", root_name));
    };
    let Ok(c) = c_str.trim().parse::<Rat>() else {
        return fail("bad hyperplane constant");
    };
    let ms: Vec<u32> = match m_values
        .split(',')
        .map(|s| s.trim().parse::<u32>())
        .collect::<Result<_, _>>()
    {
        Ok(v) => v,
        Err(_) => return fail("bad m list"),
    };
    let mut rows = Vec::new();
    let mut all_zero = true;
    for &m in &ms {
        let d = operator.operator(m);
        // singular partners on this hyperplane: tau with the form present
        // and lambda = s_alpha(tau) - 2 c alpha in the shift set
        let shift_set: Vec<LatticeVector> =
            d.terms.iter().filter_map(|t| t.shift_lattice).collect();
        let mut seen: Vec<LatticeVector> = Vec::new();
        for tau in shift_set.clone() {
            let s = reflect(alpha, tau);
            let two_c = &c + &c;
            if !two_c.is_integer() {
                continue;
            }
            let lam = LatticeVector(
                s.0 - i64::try_from(two_c.numer().clone()).unwrap() * alpha.0,
                s.1 - i64::try_from(two_c.numer().clone()).unwrap() * alpha.1,
            );
            if lam.is_zero() || !shift_set.contains(&lam) || seen.contains(&tau) {
                continue;
            }
            // only pairs whose coefficients actually carry the pole
            match residue_pair_sum(&d, tau, lam, alpha, &c) {
                Ok(pair) => {
                    if pair.res_tau.is_zero() && pair.res_lambda.is_zero() {
                        continue;
                    }
                    all_zero &= pair.sum_is_zero;
                    seen.push(tau);
                    seen.push(lam);
                    rows.push(json!({
                        "m": m,
                        "tau": format!("{:?}", tau),
                        "lambda": format!("{:?}", lam),
                        "res_tau": serde_json::to_value(&pair.res_tau).unwrap(),
                        "res_lambda": serde_json::to_value(&pair.res_lambda).unwrap(),
                        "sum_is_zero": pair.sum_is_zero,
                    }));
                }
                Err(_) => continue,
            }
        }
    }
    let v = json!({
        "status": if all_zero { "ok" } else { "fail" },
        "hyperplane": hyperplane,
        "pairs": rows,
    });
    if all_zero {
        Ok(v)
    } else {
        Err(v)
    }
}

fn do_check_structure(operator: Via, m: u32) -> RunResult {
    let d = operator.operator(m);
    let cfg = build_config(ConfigName::AG2, m);
    let rep = check_structural_conditions(&d, &cfg);
    let ok = rep.passed();
    let v = json!({
        "status": if ok { "ok" } else { "fail" },
        "m": m,
        "report": serde_json::to_value(&rep).unwrap(),
    });
    if ok {
        Ok(v)
    } else {
        Err(v)
    }
}

fn do_preserve(operator: &str, m: u32, samples: usize, seed: u64) -> RunResult {
    match operator {
        "d1" | "d2" => {
            let d = if operator == "d1" {
                make_d1(m)
            } else {
                make_d2(m)
            };
            let cfg = build_config(ConfigName::AG2, m);
            let list = sample_ring_elements(&cfg, samples, seed);
            let mut failures = Vec::new();
            for (i, p) in list.iter().enumerate() {
                match apply_to_poly(&d, p) {
                    Ok(q) => {
                        if !is_quasi_invariant(&q, &cfg).passed() {
                            failures.push(format!("sample {}: image left the ring", i));
                        }
                    }
                    Err(e) => failures.push(format!("sample {}: {}", i, e)),
                }
            }
            let ok = failures.is_empty();
            let v = json!({
                "status": if ok { "ok" } else { "fail" },
                "operator": operator,
                "m": m,
                "samples": samples,
                "failures": failures,
            });
            if ok {
                Ok(v)
            } else {
                Err(v)
            }
        }
        "d0" => {
            let rep = verify_d0_preservation(samples, seed);
            let ok = rep.passed();
            let v = serde_json::to_value(&rep).unwrap();
            if ok {
                Ok(v)
            } else {
                Err(v)
            }
        }
        "a2" => {
            let rep = verify_a2_preservation(samples, seed);
            let ok = rep.passed();
            let v = serde_json::to_value(&rep).unwrap();
            if ok {
                Ok(v)
            } else {
                Err(v)
            }
        }
        other => fail(format!("unknown operator {:?}", other)),
    }
}

fn do_reductions() -> RunResult {
    let reports = verify_a1_identities();
    let d0 = verify_d0_preservation(5, 0);
    let a2 = verify_a2_preservation(5, 0);
    let qm_ok = make_d2(0).eq_operator(&ag2::diffop::quasiminuscule_doubled_a2());
    let comm = commutator(&make_d1(0), &make_d2(0));
    let _ = comm;
    let ok = reports.iter().all(|r| r.holds_on_line)
        && d0.passed()
        && a2.passed()
        && qm_ok;
    let v = json!({
        "status": if ok { "ok" } else { "fail" },
        "a1_identities": serde_json::to_value(&reports).unwrap(),
        "d0_preservation": serde_json::to_value(&d0).unwrap(),
        "a2_preservation": serde_json::to_value(&a2).unwrap(),
        "d2_m0_is_quasiminuscule": qm_ok,
    });
    if ok {
        Ok(v)
    } else {
        Err(v)
    }
}

fn do_oracle(m: u32, e: Option<&str>, cache_hits: &mut u32) -> RunResult {
    match e {
        None => {
            if m > 0 {
                return fail("symbolic oracle is supported for m = 0 only; pass --e r1,r2");
            }
            let oracle = match ba_linear_oracle_symbolic(m) {
                Ok(o) => o,
                Err(e) => return fail(e.to_string()),
            };
            let (ba, hit) = match cached_ba(m, BuildRoute::D1) {
                Ok(x) => x,
                Err(e) => return fail(e),
            };
            if hit {
                *cache_hits += 1;
            }
            let equal = ba.to_exp_polynomial().poly == oracle.poly;
            let v = json!({
                "status": if equal { "ok" } else { "fail" },
                "m": m,
                "mode": "symbolic",
                "matches_construction": equal,
            });
            if equal {
                Ok(v)
            } else {
                Err(v)
            }
        }
        Some(vals) => {
            let parts: Vec<&str> = vals.split(',').collect();
            if parts.len() != 2 {
                return fail("--e expects r1,r2");
            }
            let (Ok(e1), Ok(e2)) = (parts[0].trim().parse::<Rat>(), parts[1].trim().parse::<Rat>())
            else {
                return fail("bad E values");
            };
            let poly = match ba_linear_oracle_numeric(m, (e1.clone(), e2.clone())) {
                Ok(p) => p,
                Err(e) => return fail(e.to_string()),
            };
            let (ba, hit) = match cached_ba(m, BuildRoute::D1) {
                Ok(x) => x,
                Err(e) => return fail(e),
            };
            if hit {
                *cache_hits += 1;
            }
            let spec = ag2::ba::specialize_exp_polynomial(&ba.to_exp_polynomial(), &e1, &e2);
            let equal = spec == poly;
            let v = json!({
                "status": if equal { "ok" } else { "fail" },
                "m": m,
                "mode": "numeric",
                "e": [e1.to_string(), e2.to_string()],
                "matches_construction": equal,
            });
            if equal {
                Ok(v)
            } else {
                Err(v)
            }
        }
    }
}
