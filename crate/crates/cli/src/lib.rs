//! Argument parsing and dispatch for the `lastjump` binary.

pub mod report;
pub mod verify;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, to_value, Value};

use lastjump_core::asw_abelian::{
    count_abelian_by_last_jump, discriminant_exponent, last_jump, quotient_jumps, ramification_filtration, CountMode, GroupShape,
    ReducedCocycle,
};
use lastjump_core::counterexample_h3::counterexample;
use lastjump_core::d4_heisenberg::{
    count_d4_le, count_minlift, is_totally_ramified, lift_distribution, local_a, minlift_bruteforce, minlift_d4,
    urtwist_invariance_check, CountMethod, SparseTPoly,
};
use lastjump_core::gf::{field_of_order, prime_power, FieldDescriptor};
use lastjump_core::global_euler::{abelian_global_series, global_series, growth_diagnostic, place_census};

pub use report::{usage, CliError, Format, Report};

#[derive(Debug, Parser)]
#[command(name = "lastjump", version, about = "Exact counts of wild p-extensions ordered by last jump")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
    /// Worker threads for enumeration; defaults to all cores.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,
    /// Seed for the randomized parts of `verify`.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
pub struct AbelianDatum {
    /// Defaults to the characteristic of `--q`.
    #[arg(long)]
    pub p: Option<u32>,
    #[arg(long)]
    pub q: u64,
    /// Cyclic factor exponents: `2,1` is Z/p^2 x Z/p.
    #[arg(long, default_value = "1")]
    pub group: String,
    /// Terms `n:coefficient` joined by `,`; see the README for the grammar.
    #[arg(long)]
    pub terms: String,
}

#[derive(Debug, Args)]
pub struct D4Pair {
    #[arg(long)]
    pub q: u64,
    /// Terms `e:c` of a polynomial in `T^-1`.
    #[arg(long)]
    pub a: String,
    #[arg(long)]
    pub c: String,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Homs,
    Types,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum MethodArg {
    Closed,
    Enumeration,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Last jump of an abelian datum.
    Lj(AbelianDatum),
    /// Discriminant exponent and ramification filtration of an abelian datum.
    Disc(AbelianDatum),
    /// Homomorphisms or inertial types of an abelian p-group with a given last jump.
    CountAbelian {
        #[arg(long)]
        p: Option<u32>,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value = "1")]
        group: String,
        #[arg(long)]
        v: u64,
        #[arg(long, value_enum, default_value = "types")]
        mode: ModeArg,
        #[arg(long, default_value_t = lastjump_core::asw_abelian::DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Minimal D4 lift height of a (Z/2)^2 datum.
    Minlift {
        #[command(flatten)]
        pair: D4Pair,
        /// Also minimize the Imai formula over `b` with `w(b)` up to this bound.
        #[arg(long)]
        bruteforce: Option<u64>,
        #[arg(long, default_value_t = lastjump_core::d4_heisenberg::DEFAULT_B_BUDGET)]
        budget: u64,
    },
    /// Last jumps of all D4 lifts, with multiplicities.
    LiftDist {
        #[command(flatten)]
        pair: D4Pair,
        #[arg(long)]
        v_max: u64,
    },
    /// Lift distributions of all unramified twists of a datum.
    UrtwistCheck {
        #[command(flatten)]
        pair: D4Pair,
        #[arg(long)]
        v_max: u64,
        #[arg(long, default_value_t = lastjump_core::d4_heisenberg::DEFAULT_B_BUDGET)]
        budget: u64,
    },
    /// Inertial types of (Z/2)^2 data with minimal lift height `v`.
    CountMinlift {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        v: u64,
        #[arg(long, value_enum, default_value = "closed")]
        method: MethodArg,
        #[arg(long, default_value_t = 1 << 24)]
        budget: u64,
    },
    /// `(1/8) #{D4 homomorphisms with last jump <= v}`.
    CountD4 {
        #[arg(long)]
        q: BigUint,
        #[arg(long)]
        v: u64,
    },
    /// `(1/8) #{D4 homomorphisms with last jump = v}`.
    LocalA {
        #[arg(long)]
        q: BigUint,
        #[arg(long)]
        v: u64,
    },
    /// Places of F_q(T) by degree.
    Census {
        #[arg(long)]
        q: u64,
        /// Largest degree.
        #[arg(long)]
        d: usize,
    },
    /// Euler product over the places of F_q(T), for D4 or an abelian group.
    GlobalSeries {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        x_max: usize,
        /// Use abelian local factors for this group instead of D4.
        #[arg(long)]
        group: Option<String>,
    },
    /// `r(X) = N(X) / (q^{3X} X)` and its relative changes.
    Growth {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        x_max: usize,
    },
    /// Local and global Heisenberg counts and their ratio.
    Counterexample {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        q: u64,
    },
    /// Runs the invariant suites of every module.
    Verify,
}

fn field(q: u64, flag: &str) -> Result<FieldDescriptor, CliError> {
    field_of_order(q).map_err(usage(flag))
}

fn shape(p: Option<u32>, q: u64, group: &str) -> Result<(GroupShape, FieldDescriptor), CliError> {
    let (r, _) = prime_power(q).ok_or_else(|| usage("--q")(format!("{q} is not a prime power")))?;
    let p = match p {
        Some(p) if p != r => return Err(usage("--q")(format!("{q} is not a power of p = {p}"))),
        _ => r,
    };
    let exps = group
        .split(',')
        .map(|e| e.trim().parse::<u32>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(usage("--group"))?;
    let shape = GroupShape::new(p, exps).map_err(usage("--group"))?;
    Ok((shape, field(q, "--q")?))
}

fn datum(d: &AbelianDatum) -> Result<(GroupShape, ReducedCocycle), CliError> {
    let (shape, desc) = shape(d.p, d.q, &d.group)?;
    let m = ReducedCocycle::parse(&shape, &desc, &d.terms).map_err(usage("--terms"))?;
    Ok((shape, m))
}

fn d4_pair(pair: &D4Pair) -> Result<(SparseTPoly, SparseTPoly), CliError> {
    let desc = field(pair.q, "--q")?;
    if desc.p() != 2 {
        return Err(usage("--q")("D4 data need q even"));
    }
    let a = SparseTPoly::parse(&desc, &pair.a).map_err(usage("--a"))?;
    let c = SparseTPoly::parse(&desc, &pair.c).map_err(usage("--c"))?;
    if !a.is_reduced() {
        return Err(usage("--a")("exponents must be 0 or odd"));
    }
    if !c.is_reduced() {
        return Err(usage("--c")("exponents must be 0 or odd"));
    }
    Ok((a.canonical(), c.canonical()))
}

fn value<T: serde::Serialize>(x: &T) -> Value {
    to_value(x).expect("report types serialize")
}

pub fn run(cli: &Cli) -> Result<Report, CliError> {
    if let Some(n) = cli.global.threads {
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global();
    }
    Ok(match &cli.command {
        Command::Lj(d) => {
            let (shape, m) = datum(d)?;
            let lj = last_jump(&m);
            Report::new("lj", json!({"q": d.q, "group": shape.to_string(), "terms": m.to_string()}), json!({"last_jump": lj}))
                .table(&["group", "terms", "last_jump"], [vec![shape.to_string(), m.to_string(), lj.to_string()]])
        }
        Command::Disc(d) => {
            let (shape, m) = datum(d)?;
            let disc = discriminant_exponent(&m).map_err(usage("--group"))?;
            let filtration = ramification_filtration(&m).map_err(usage("--group"))?;
            let jumps: Vec<Value> = quotient_jumps(&m)
                .map_err(usage("--group"))?
                .into_iter()
                .map(|(h, t)| json!({"generators": h.generators(), "order": h.order(), "t": t}))
                .collect();
            Report::new(
                "disc",
                json!({"q": d.q, "group": shape.to_string(), "terms": m.to_string()}),
                json!({"discriminant_exponent": disc, "last_jump": last_jump(&m), "filtration": filtration, "quotient_jumps": jumps}),
            )
            .table(
                &["v", "s_v"],
                filtration.iter().enumerate().map(|(v, s)| vec![v.to_string(), s.to_string()]),
            )
        }
        Command::CountAbelian { p, q, group, v, mode, budget } => {
            let (shape, _) = shape(*p, *q, group)?;
            let m = match mode {
                ModeArg::Homs => CountMode::Homomorphisms,
                ModeArg::Types => CountMode::InertialTypes,
            };
            let n = count_abelian_by_last_jump(&shape, *q, *v, m, *budget).map_err(usage("--budget"))?;
            let mode = format!("{mode:?}").to_lowercase();
            Report::new(
                "count-abelian",
                json!({"q": q, "group": shape.to_string(), "v": v, "mode": mode}),
                json!({"count": n.to_string()}),
            )
            .table(&["group", "q", "v", "mode", "count"], [vec![shape.to_string(), q.to_string(), v.to_string(), mode, n.to_string()]])
        }
        Command::Minlift { pair, bruteforce, budget } => {
            let (a, c) = d4_pair(pair)?;
            let ml = minlift_d4(&a, &c);
            let tr = is_totally_ramified(&a, &c);
            let brute = match bruteforce {
                Some(bound) if tr => Some(minlift_bruteforce(&a, &c, *bound, *budget).map_err(usage("--bruteforce"))?),
                _ => None,
            };
            let ok = brute.map_or(true, |j| j == num_rational::Ratio::from_integer(ml));
            Report::new(
                "minlift",
                json!({"q": pair.q, "a": a.to_string(), "c": c.to_string(), "bruteforce_bound": bruteforce}),
                json!({"minlift": ml, "totally_ramified": tr, "bruteforce": brute.map(|j| j.to_string())}),
            )
            .table(
                &["a", "c", "minlift", "totally_ramified", "bruteforce"],
                [vec![a.to_string(), c.to_string(), ml.to_string(), tr.to_string(), brute.map_or("-".into(), |j| j.to_string())]],
            )
            .with_status(ok)
        }
        Command::LiftDist { pair, v_max } => {
            let (a, c) = d4_pair(pair)?;
            let dist = lift_distribution(&a, &c, *v_max).map_err(usage("--a"))?;
            Report::new("lift-dist", json!({"q": pair.q, "a": a.to_string(), "c": c.to_string(), "v_max": v_max}), value(&dist))
                .table(&["last_jump", "count"], dist.counts.iter().map(|(j, n)| vec![j.to_string(), n.to_string()]))
        }
        Command::UrtwistCheck { pair, v_max, budget } => {
            let (a, c) = d4_pair(pair)?;
            let r = urtwist_invariance_check(&a, &c, *v_max, *budget).map_err(usage("--budget"))?;
            Report::new("urtwist-check", json!({"q": pair.q, "a": a.to_string(), "c": c.to_string(), "v_max": v_max}), value(&r))
                .table(
                    &["alpha", "gamma", "formula_equal", "imai_equal"],
                    r.twists.iter().map(|t| {
                        vec![t.alpha.to_string(), t.gamma.to_string(), t.formula_equal.to_string(), t.imai_equal.map_or("-".into(), |b| b.to_string())]
                    }),
                )
                .with_status(r.all_equal)
        }
        Command::CountMinlift { q, v, method, budget } => {
            let m = match method {
                MethodArg::Closed => CountMethod::ClosedForm,
                MethodArg::Enumeration => CountMethod::Enumeration,
            };
            let n = count_minlift(*q, *v, m, *budget).map_err(usage("--q"))?;
            Report::new("count-minlift", json!({"q": q, "v": v, "method": format!("{method:?}").to_lowercase()}), json!({"count": n.to_string()}))
                .table(&["q", "v", "count"], [vec![q.to_string(), v.to_string(), n.to_string()]])
        }
        Command::CountD4 { q, v } => {
            check_even_power(q)?;
            let n = count_d4_le(q, *v);
            Report::new("count-d4", json!({"q": q.to_string(), "v": v}), json!({"count": n.to_string()}))
                .table(&["q", "v", "count"], [vec![q.to_string(), v.to_string(), n.to_string()]])
        }
        Command::LocalA { q, v } => {
            check_even_power(q)?;
            let n = local_a(q, *v);
            Report::new("local-a", json!({"q": q.to_string(), "v": v}), json!({"a": n.to_string()}))
                .table(&["q", "v", "a"], [vec![q.to_string(), v.to_string(), n.to_string()]])
        }
        Command::Census { q, d } => {
            let c = place_census(*q, *d).map_err(usage("--d"))?;
            Report::new("census", json!({"q": q, "d": d}), value(&c))
                .table(&["degree", "places"], c.counts.iter().map(|(d, n)| vec![d.to_string(), n.to_string()]))
        }
        Command::GlobalSeries { q, x_max, group } => {
            let (s, g) = match group {
                Some(g) => {
                    let (shape, _) = shape(None, *q, g)?;
                    (abelian_global_series(&shape, *q, *x_max).map_err(series_error)?, shape.to_string())
                }
                None => (global_series(*q, *x_max).map_err(series_error)?, "D4".to_string()),
            };
            Report::new("global-series", json!({"q": q, "x_max": x_max, "group": g}), value(&s))
                .table(&["x", "coefficient"], s.coefficients.iter().enumerate().map(|(x, c)| vec![x.to_string(), c.to_string()]))
        }
        Command::Growth { q, x_max } => {
            let rows = growth_diagnostic(*q, *x_max).map_err(series_error)?;
            Report::new("growth", json!({"q": q, "x_max": x_max}), value(&rows)).table(
                &["x", "n", "r", "r_approx", "relative_change"],
                rows.iter().map(|r| {
                    vec![
                        r.x.to_string(),
                        r.n.to_string(),
                        r.r.to_string(),
                        format!("{:.6}", r.r_approx),
                        r.relative_change_approx.map_or("-".into(), |c| format!("{c:.6}")),
                    ]
                }),
            )
        }
        Command::Counterexample { p, q } => {
            let r = counterexample(*p, *q).map_err(usage("--q"))?;
            let ok = r.consistent();
            let mut rows: Vec<Vec<String>> = Vec::new();
            for (side, b) in [("local", &r.local_breakdown), ("global", &r.global_breakdown)] {
                rows.extend(b.iter().map(|c| vec![side.to_string(), c.case.clone(), c.count.to_string()]));
            }
            rows.push(vec!["local".into(), "total".into(), r.local_count.to_string()]);
            rows.push(vec!["global".into(), "total".into(), r.global_count.to_string()]);
            rows.push(vec!["ratio".into(), "global/local".into(), r.discrepancy_ratio.to_string()]);
            Report::new("counterexample", json!({"p": p, "q": q}), value(&r)).table(&["side", "case", "count"], rows).with_status(ok)
        }
        Command::Verify => {
            let checks = verify::run_suite(cli.global.seed);
            let ok = checks.iter().all(|c| c.passed);
            Report::new("verify", json!({"seed": cli.global.seed}), json!({"passed": ok, "checks": value(&checks)}))
                .table(
                    &["check", "status", "detail"],
                    checks.iter().map(|c| vec![c.name.to_string(), if c.passed { "pass" } else { "FAIL" }.to_string(), c.detail.clone()]),
                )
                .with_status(ok)
        }
    })
}

fn series_error(e: lastjump_core::Error) -> CliError {
    match e {
        lastjump_core::Error::TruncationTooLarge { .. } => usage("--x-max")(e),
        lastjump_core::Error::BudgetExceeded { .. } => usage("--group")(e),
        _ => usage("--q")(e),
    }
}

fn check_even_power(q: &BigUint) -> Result<(), CliError> {
    let bits = q.bits();
    if bits < 2 || q.count_ones() != 1 {
        return Err(usage("--q")(format!("{q} is not a power of 2 greater than 1")));
    }
    Ok(())
}
