use std::fmt::{Display, Write as _};
use std::fs;
use std::path::Path;

use fiid_core::derive::{blow_up, builtin, derive_inequality, known_inequality, lift_base, Construction};
use fiid_core::entropy::{ln_rational, rational_to_f64};
use fiid_core::graph::{parse_graph, write_graph};
use fiid_core::inequality::{type_name, EntropyInequality};
use fiid_core::lift::{estimate_type_entropy, project_rule, r_nice_flags, random_lift, sharpness_ratio, BuiltinRule};
use fiid_core::oracle::{brute_force_expected_colorings, expected_colorings, rate, ConsistentCollection};
use fiid_core::{markov, MarkovChain};
use num_traits::Signed;

use crate::{BlowupArgs, DeriveArgs, LiftArgs, MarkovArgs, OracleArgs, SharpnessArgs, SimulateArgs};

/// A failed command: exit code 1 for usage problems, 2 for domain errors.
pub struct Failure {
    pub code: u8,
    pub message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

fn domain(e: impl Display) -> Failure {
    Failure {
        code: 2,
        message: e.to_string(),
    }
}

type Outcome = Result<String, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| domain(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| domain(format!("{}: {e}", path.display())))
}

/// `builtin:<name>` from the catalog, otherwise an inequality file.
fn load_ineq(spec: &str, d: Option<usize>) -> Result<EntropyInequality, Failure> {
    let ineq = match spec.strip_prefix("builtin:") {
        Some(name) => {
            let d = d.ok_or_else(|| usage("--d is required for builtin: inequalities"))?;
            known_inequality(name, d).map_err(domain)?
        }
        None => EntropyInequality::parse(&read(Path::new(spec))?).map_err(domain)?,
    };
    if let Some(d) = d {
        if ineq.d() != d {
            return Err(domain(format!("inequality is for d = {}, expected d = {d}", ineq.d())));
        }
    }
    Ok(ineq)
}

fn show(ineq: &EntropyInequality) -> String {
    format!("{}\n{}", ineq.render(), ineq.to_text())
}

pub fn derive(a: DeriveArgs) -> Outcome {
    let ineq = match (&a.graph, &a.builtin) {
        (Some(path), _) => {
            let file = parse_graph(&read(path)?).map_err(domain)?;
            derive_inequality(&file.graph, &file.walks).map_err(domain)?
        }
        (None, Some(name)) => {
            let d = a.d.ok_or_else(|| usage("--d is required with --builtin"))?;
            let c = Construction::parse(name, a.i, a.k).map_err(domain)?;
            let out = builtin(c, d).map_err(domain)?;
            if let Some(path) = &a.emit_graph {
                write(path, &write_graph(&out.graph, Some(&out.walks)))?;
            }
            out.inequality
        }
        (None, None) => return Err(usage("either --graph or --builtin is required")),
    };
    if let Some(path) = &a.out {
        write(path, &ineq.to_text())?;
    }
    Ok(show(&ineq))
}

pub fn blowup(a: BlowupArgs) -> Outcome {
    let ineq = load_ineq(&a.ineq, a.d)?;
    let big = blow_up(&ineq, a.k);
    if let Some(path) = &a.out {
        write(path, &big.to_text())?;
    }
    Ok(show(&big))
}

pub fn lift(a: LiftArgs) -> Outcome {
    let file = parse_graph(&read(&a.graph)?).map_err(domain)?;
    let g = lift_base(&file.graph, a.n, a.seed).map_err(domain)?;
    let text = format!("# seed={} n={}\n{}", a.seed, a.n, write_graph(&g, None));
    if let Some(path) = &a.out {
        write(path, &text)?;
    }
    Ok(text)
}

pub fn simulate(a: SimulateArgs) -> Outcome {
    let file = parse_graph(&read(&a.graph)?).map_err(domain)?;
    let g = file.graph;
    let d = g
        .regular_degree()
        .ok_or_else(|| domain("simulation needs a regular base graph"))?;
    let ineq = load_ineq(&a.ineq, Some(d))?;
    let rule = BuiltinRule::parse(&a.rule).map_err(domain)?;
    if a.samples == 0 {
        return Err(usage("--samples must be positive"));
    }
    let lift = random_lift(&g, a.n, a.seed).map_err(domain)?;
    let coloring = project_rule(&lift, &rule, a.seed.wrapping_add(1));
    let (vflags, eflags) = r_nice_flags(&lift, a.radius);
    let bad = |flags: &[bool]| flags.iter().filter(|&&f| !f).count() as f64 / flags.len() as f64;
    let mut out = String::new();
    writeln!(
        out,
        "# seed={} n={} rule={} radius={} samples={}",
        a.seed,
        a.n,
        rule.name(),
        a.radius,
        a.samples
    )
    .unwrap();
    writeln!(
        out,
        "# non_nice_vertex_fraction={} non_nice_edge_fraction={}",
        bad(&vflags),
        bad(&eflags)
    )
    .unwrap();
    writeln!(out, "term\tcoefficient\tentropy\tstd_error\tsamples").unwrap();
    let mut slack = 0.0;
    let mut var = 0.0;
    for (idx, (t, c)) in ineq.terms().iter().enumerate() {
        let seed = a.seed.wrapping_add(2 + idx as u64);
        let est = estimate_type_entropy::<f64>(&lift, &coloring, t, a.samples, seed).map_err(domain)?;
        let coef = rational_to_f64(c);
        slack += coef * est.entropy;
        var += coef * coef * est.std_error * est.std_error;
        writeln!(
            out,
            "H({})\t{c}\t{:.6}\t{:.6}\t{}",
            type_name(t),
            est.entropy,
            est.std_error,
            est.samples
        )
        .unwrap();
    }
    writeln!(out, "slack\t\t{slack:.6}\t{:.6}\t", var.sqrt()).unwrap();
    Ok(out)
}

pub fn markov(a: MarkovArgs) -> Outcome {
    let ineq = load_ineq(&a.ineq, Some(a.d))?;
    let unit = if a.bits { std::f64::consts::LN_2 } else { 1.0 };
    let label = ineq.name().unwrap_or("inequality").to_string();
    if let Some(family) = &a.family {
        if family != "binary-symmetric" {
            return Err(usage(format!("unknown family `{family}`")));
        }
        if let Some(scan) = &a.scan {
            let (lo, hi, tol) = (scan[0], scan[1], scan[2]);
            let result = markov::scan_regime(MarkovChain::binary_symmetric, &ineq, lo, hi, tol).map_err(domain)?;
            let mut out = format!("# family={family} d={} ineq={label} lo={lo} hi={hi} tol={tol}\n", a.d);
            for t in &result.thresholds {
                writeln!(out, "threshold\t{t:.8}").unwrap();
            }
            // |1 - 2ε| = 1/sqrt(d-1)
            let edge = (1.0 - 1.0 / (a.d as f64 - 1.0).sqrt()) / 2.0;
            for s in [edge, 1.0 - edge] {
                if (lo..=hi).contains(&s) {
                    writeln!(out, "spectral_threshold\t{s:.8}").unwrap();
                }
            }
            return Ok(out);
        }
        let eps = a.param.ok_or_else(|| usage("--param or --scan is required with --family"))?;
        let chain = MarkovChain::binary_symmetric(eps).map_err(domain)?;
        return Ok(chain_report(&chain, &ineq, a.d, unit, &format!("# family={family} param={eps} d={} ineq={label}\n", a.d)));
    }
    if a.scan.is_some() {
        return Err(usage("--scan needs --family"));
    }
    let path = a.chain.as_ref().ok_or_else(|| usage("--chain or --family is required"))?;
    let chain = MarkovChain::parse_tsv(&read(path)?).map_err(domain)?;
    let header = format!("# chain={} d={} ineq={label}\n", path.display(), a.d);
    let slack = chain.check(&ineq).map_err(domain)?;
    Ok(report_lines(&chain, slack, a.d, unit, header))
}

fn chain_report(chain: &MarkovChain, ineq: &EntropyInequality, d: usize, unit: f64, header: &str) -> String {
    match chain.check(ineq) {
        Ok(slack) => report_lines(chain, slack, d, unit, header.to_string()),
        Err(e) => format!("{header}error\t{e}\n"),
    }
}

fn report_lines(chain: &MarkovChain, slack: f64, d: usize, unit: f64, mut out: String) -> String {
    let (rho, pass) = chain.spectral_bound(d);
    writeln!(out, "vertex_entropy\t{:.10}", chain.vertex_entropy() / unit).unwrap();
    writeln!(out, "edge_entropy\t{:.10}", chain.edge_entropy() / unit).unwrap();
    writeln!(out, "slack\t{:.10}", slack / unit).unwrap();
    writeln!(out, "spectral_radius\t{rho:.10}").unwrap();
    writeln!(out, "spectral_pass\t{pass}").unwrap();
    out
}

pub fn oracle(a: OracleArgs) -> Outcome {
    let file = parse_graph(&read(&a.graph)?).map_err(domain)?;
    let g = file.graph;
    let mu = ConsistentCollection::parse_tsv(&g, &read(&a.collection)?).map_err(domain)?;
    if a.n == 0 {
        return Err(usage("--n must be positive"));
    }
    let exact = expected_colorings(&g, &mu, a.n);
    let mut out = format!("# n={}\n", a.n);
    writeln!(out, "expected\t{exact}").unwrap();
    let log_rate = if exact.is_positive() {
        format!("{:.10}", ln_rational(&exact) / a.n as f64)
    } else {
        "-inf".to_string()
    };
    writeln!(out, "log_over_n\t{log_rate}").unwrap();
    writeln!(out, "rate\t{:.10}", rate::<f64>(&g, &mu)).unwrap();
    if a.brute_force {
        let brute = brute_force_expected_colorings(&g, &mu, a.n).map_err(domain)?;
        writeln!(out, "brute_force\t{brute}").unwrap();
        writeln!(out, "agree\t{}", brute == exact).unwrap();
    }
    Ok(out)
}

pub fn sharpness(a: SharpnessArgs) -> Outcome {
    let ineq = load_ineq(&a.ineq, a.d)?;
    let mut out = format!("# ineq={}\nr\tratio\tvalue\n", ineq.name().unwrap_or("inequality"));
    for r in 0..=a.r {
        let q = sharpness_ratio(&ineq, r).map_err(domain)?;
        writeln!(out, "{r}\t{q}\t{:.10}", rational_to_f64(&q)).unwrap();
    }
    Ok(out)
}
