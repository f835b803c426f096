use cl_entropy::entropy::{
    entropy, entropy_strictly_decreasing, exceptional_margins, scan_exceptions,
};
use cl_entropy::groups::{groups_of_order, is_prime, lemma1_holds};
use cl_entropy::measures::{cl_measure, fu_depth, hall_sum_partial, hall_tail_bounds, normalizing_constant};
use cl_entropy::zeta::{
    kl_closed, kl_direct_auto, zeta_log_derivative, zeta_product, zeta_sum, ZetaLevel, ZetaParams,
};
use cl_entropy::{CLParams, CertifiedValue, Error, Interval, UnitRank};

use crate::args::{EntropyArgs, KlArgs, KlMode, Suite, TableArgs, VerifyArgs, ZetaArgs};
use crate::output::{Field, Record};
use crate::CliError;

pub const MAX_PRIME: u64 = 97;
pub const MAX_TABLE_ORDER_EXPONENT: u32 = 20;

type Params = Vec<(&'static str, Field)>;

fn prime(p: u64) -> Result<u32, CliError> {
    if !is_prime(p) {
        return Err(CliError::Usage(format!("{p} is not prime")));
    }
    if p > MAX_PRIME {
        return Err(CliError::Usage(format!("p must be at most {MAX_PRIME}, got {p}")));
    }
    Ok(p as u32)
}

fn unit_rank(u: f64) -> Result<UnitRank, CliError> {
    UnitRank::from_f64(u).map_err(usage)
}

fn usage(e: Error) -> CliError {
    CliError::Usage(e.to_string())
}

fn record(command: &'static str, params: &Params) -> Record {
    let mut r = Record::new().with("command", Field::Str(command.into()));
    for (k, v) in params {
        r.push(k, v.clone());
    }
    r
}

fn certified(command: &'static str, params: &Params, cv: &CertifiedValue) -> Record {
    record(command, params)
        .with("value_lo", Field::Float(cv.value.lo()))
        .with("value_hi", Field::Float(cv.value.hi()))
        .with("truncation_level", Field::Int(i64::from(cv.truncation_level)))
        .with("tail_bound", Field::Float(cv.tail_bound))
        .with("status", Field::Str("ok".into()))
        .with("diagnostic", Field::Null)
}

fn refused(command: &'static str, params: &Params, message: String) -> Record {
    record(command, params)
        .with("value_lo", Field::Null)
        .with("value_hi", Field::Null)
        .with("truncation_level", Field::Null)
        .with("tail_bound", Field::Null)
        .with("status", Field::Str("refused".into()))
        .with("diagnostic", Field::Str(message))
}

/// Turns a core result into a record, or into a refusal carrying only the
/// refused record.
fn settle(
    command: &'static str,
    params: &Params,
    result: cl_entropy::Result<CertifiedValue>,
) -> Result<Record, CliError> {
    match result {
        Ok(cv) => Ok(certified(command, params, &cv)),
        Err(Error::Refused(msg)) => {
            let record = refused(command, params, msg.clone());
            Err(CliError::Refused { record, message: msg })
        }
        Err(e) => Err(usage(e)),
    }
}

pub fn cmd_entropy(args: &EntropyArgs) -> Result<Vec<Record>, CliError> {
    if !(1e-12..=1e-1).contains(&args.eps) {
        return Err(CliError::Usage(format!(
            "eps must lie in [1e-12, 1e-1], got {:e}",
            args.eps
        )));
    }
    let primes = args.p.iter().map(|&p| prime(p)).collect::<Result<Vec<_>, _>>()?;
    let ranks = args.u.iter().map(|&u| unit_rank(u)).collect::<Result<Vec<_>, _>>()?;
    let mut out = Vec::new();
    for &p in &primes {
        for (&u_raw, &u) in args.u.iter().zip(&ranks) {
            let params: Params = vec![
                ("p", Field::Int(i64::from(p))),
                ("u", Field::Float(u_raw)),
                ("eps", Field::Float(args.eps)),
            ];
            let cl = CLParams::new(p, u).map_err(usage)?;
            out.push(settle("entropy", &params, entropy(&cl, args.eps).map(|r| r.h))?);
        }
    }
    Ok(out)
}

pub fn cmd_kl(args: &KlArgs) -> Result<Vec<Record>, CliError> {
    let p = prime(args.p)?;
    let (u1, u2) = (unit_rank(args.u1)?, unit_rank(args.u2)?);
    for (name, t) in [("tol", args.tol), ("eps", args.eps)] {
        if !(t > 0.0 && t <= 1e-1) {
            return Err(CliError::Usage(format!("{name} must lie in (0, 1e-1], got {t:e}")));
        }
    }
    let params = |mode: &str| -> Params {
        vec![
            ("p", Field::Int(i64::from(p))),
            ("u1", Field::Float(args.u1)),
            ("u2", Field::Float(args.u2)),
            ("mode", Field::Str(mode.into())),
        ]
    };
    let closed = || settle("kl", &params("closed"), kl_closed(p, u1, u2, args.tol));
    let direct = || settle("kl", &params("direct"), kl_direct_auto(p, u1, u2, args.eps));
    match args.mode {
        KlMode::Closed => Ok(vec![closed()?]),
        KlMode::Direct => Ok(vec![direct()?]),
        KlMode::Both => {
            let (c, d) = (closed()?, direct()?);
            let bounds = |r: &Record| match (r.get("value_lo"), r.get("value_hi")) {
                (Some(Field::Float(lo)), Some(Field::Float(hi))) => (*lo, *hi),
                _ => unreachable!("certified records carry both endpoints"),
            };
            let ((clo, chi), (dlo, dhi)) = (bounds(&c), bounds(&d));
            let overlap = clo <= dhi && dlo <= chi;
            Ok(vec![
                c.with("overlap", Field::Bool(overlap)),
                d.with("overlap", Field::Bool(overlap)),
            ])
        }
    }
}

pub fn cmd_table(args: &TableArgs) -> Result<Vec<Record>, CliError> {
    let p = prime(args.p)?;
    if args.max_order_exponent > MAX_TABLE_ORDER_EXPONENT {
        return Err(CliError::Usage(format!(
            "max-order-exponent must be at most {MAX_TABLE_ORDER_EXPONENT}, got {}",
            args.max_order_exponent
        )));
    }
    let params = CLParams::new(p, unit_rank(args.u)?).map_err(usage)?;
    let depth = fu_depth(&params, 1e-15).map_err(usage)?;
    let mut rows = Vec::new();
    for n in 0..=args.max_order_exponent {
        for g in groups_of_order(p, n).map_err(usage)? {
            let nu = cl_measure(&params, &g, depth).map_err(usage)?;
            rows.push(
                Record::new()
                    .with("partition", Field::Str(g.lambda_prime().to_string()))
                    .with("order", Field::Digits(g.order().to_string()))
                    .with("aut_order", Field::Digits(g.aut_order().to_string()))
                    .with("measure_lo", Field::Float(nu.lo()))
                    .with("measure_hi", Field::Float(nu.hi())),
            );
        }
    }
    Ok(rows)
}

pub fn cmd_zeta(args: &ZetaArgs) -> Result<Vec<Record>, CliError> {
    let p = prime(args.p)?;
    let k = match args.k.as_str() {
        "inf" | "infinity" => ZetaLevel::Infinite,
        s => ZetaLevel::Finite(s.parse::<u32>().map_err(|_| {
            CliError::Usage(format!("k must be a positive integer or `inf`, got `{s}`"))
        })?),
    };
    let zp = ZetaParams::new(p, k, args.s).map_err(usage)?;
    let level = match k {
        ZetaLevel::Finite(k) => k,
        ZetaLevel::Infinite => 0,
    };
    let params = |quantity: &str| -> Params {
        vec![
            ("p", Field::Int(i64::from(p))),
            ("k", Field::Str(args.k.clone())),
            ("s", Field::Float(args.s)),
            ("quantity", Field::Str(quantity.into())),
        ]
    };
    let exact = |iv: Interval| CertifiedValue::new(iv, level, 0.0);
    let mut out = vec![settle("zeta", &params("product"), zeta_product(&zp).map(exact))?];
    if let ZetaLevel::Finite(_) = k {
        out.push(settle("zeta", &params("sum"), zeta_sum(&zp, args.max_order_exponent))?);
    }
    out.push(settle(
        "zeta",
        &params("derivative"),
        zeta_log_derivative(&zp).map(exact),
    )?);
    Ok(out)
}

struct SuiteReport {
    checked: u64,
    failures: Vec<String>,
    summary: String,
}

impl SuiteReport {
    fn new() -> Self {
        SuiteReport {
            checked: 0,
            failures: Vec::new(),
            summary: String::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

/// Refusals inside a suite count as failures; other errors are usage errors.
fn attempt<T>(report: &mut SuiteReport, what: &str, r: cl_entropy::Result<T>) -> Result<Option<T>, CliError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Refused(msg)) => {
            report.check(false, || format!("{what}: {msg}"));
            Ok(None)
        }
        Err(e) => Err(usage(e)),
    }
}

const MAX_LISTED: usize = 10;

fn suite_record(name: &str, report: SuiteReport) -> Record {
    let pass = report.failures.is_empty();
    let mut detail = report.summary;
    if !pass {
        let listed: Vec<&str> = report.failures.iter().take(MAX_LISTED).map(String::as_str).collect();
        detail = format!("counterexamples: {}", listed.join("; "));
        if report.failures.len() > MAX_LISTED {
            detail.push_str(&format!("; and {} more", report.failures.len() - MAX_LISTED));
        }
    }
    Record::new()
        .with("command", Field::Str("verify".into()))
        .with("suite", Field::Str(name.into()))
        .with("status", Field::Str(if pass { "pass" } else { "fail" }.into()))
        .with("checked", Field::Int(report.checked as i64))
        .with("failures", Field::Int(report.failures.len() as i64))
        .with("detail", Field::Str(detail))
}

fn primes_up_to(p_max: u32) -> Vec<u32> {
    (2..=p_max).filter(|&p| is_prime(u64::from(p))).collect()
}

fn suite_lemma1(args: &VerifyArgs) -> Result<SuiteReport, CliError> {
    let mut r = SuiteReport::new();
    for p in primes_up_to(args.p_max) {
        for n in 1..=args.lemma1_max_order_exponent {
            for g in groups_of_order(p, n).map_err(usage)? {
                let report = lemma1_holds(&g).map_err(usage)?;
                r.check(report.holds(), || format!("{g}"));
            }
        }
    }
    r.summary = format!("all {} nontrivial groups satisfy both lower bounds", r.checked);
    Ok(r)
}

/// The four classes violating the decreasing inequality: `(p, u, λ')`.
const KNOWN_EXCEPTIONS: [(u32, u32, u32); 4] = [(2, 0, 1), (2, 0, 2), (2, 1, 1), (3, 0, 1)];

fn suite_exceptions(args: &VerifyArgs) -> Result<SuiteReport, CliError> {
    let u_max = args.u_max.unwrap_or(5);
    let n_max = args.exceptions_max_order_exponent;
    let found = scan_exceptions(args.p_max, n_max, u_max).map_err(usage)?;
    let expected: Vec<(u32, u32, Vec<u32>)> = KNOWN_EXCEPTIONS
        .iter()
        .filter(|&&(p, u, e)| p <= args.p_max && u <= u_max && e <= n_max)
        .map(|&(p, u, e)| (p, u, vec![e]))
        .collect();
    let got: Vec<(u32, u32, Vec<u32>)> = found
        .iter()
        .map(|e| (e.p, e.u, e.lambda_prime.parts().to_vec()))
        .collect();
    let describe = |(p, u, parts): &(u32, u32, Vec<u32>)| {
        let lp = cl_entropy::Partition::new(parts.clone()).expect("scan yields partitions");
        format!("p={p} u={u} {lp}")
    };
    let mut r = SuiteReport::new();
    for case in &got {
        r.check(expected.contains(case), || format!("unexpected {}", describe(case)));
    }
    for case in &expected {
        if !got.contains(case) {
            r.check(false, || format!("missing {}", describe(case)));
        }
    }
    let listed: Vec<String> = got.iter().map(describe).collect();
    r.summary = format!("exceptions found: {}", listed.join("; "));
    Ok(r)
}

fn suite_monotone(args: &VerifyArgs) -> Result<SuiteReport, CliError> {
    let mut r = SuiteReport::new();
    let mut closest = f64::INFINITY;
    for p in [2, 3, 5] {
        for u in 0..=args.u_max.unwrap_or(8) {
            let what = format!("p={p} u={u}->{}", u + 1);
            if let Some((a, b, separated)) =
                attempt(&mut r, &what, entropy_strictly_decreasing(p, u, args.eps))?
            {
                closest = closest.min(a.h.value.lo() - b.h.value.hi());
                r.check(separated, || {
                    format!("{what}: H={} vs {}", a.h.value, b.h.value)
                });
            }
        }
    }
    r.summary = format!(
        "H(u).lo > H(u+1).hi in all {} cases; smallest gap {closest:.3e}",
        r.checked
    );
    Ok(r)
}

fn suite_hall(args: &VerifyArgs) -> Result<SuiteReport, CliError> {
    let n = args.hall_order_exponent;
    if n > 40 {
        return Err(CliError::Usage(format!("hall-order-exponent must be at most 40, got {n}")));
    }
    let mut r = SuiteReport::new();
    for p in [2, 3] {
        let limit = normalizing_constant(&CLParams::integral(p, 0).map_err(usage)?, 80)
            .and_then(Interval::recip)
            .map_err(usage)?;
        let (s_aut, s_ord) = hall_sum_partial(p, n).map_err(usage)?;
        let Some(tails) = attempt(&mut r, "tail", hall_tail_bounds(p, n))? else {
            continue;
        };
        for (name, s, tail) in [("S_aut", s_aut, tails.by_aut), ("S_ord", s_ord, tails.by_order)] {
            let s = Interval::from_ratio(&s);
            let bracket = Interval::new(s.lo(), s.hi() + tail).map_err(usage)?;
            r.check(bracket.overlaps(&limit), || {
                format!("p={p} {name}({n}) + tail = {bracket} misses {limit}")
            });
        }
    }
    r.summary = format!("both partial sums at N={n} bracket the limit for p=2,3");
    Ok(r)
}

fn suite_zeta() -> Result<SuiteReport, CliError> {
    let mut r = SuiteReport::new();
    for p in [2, 3] {
        for k in [1, 2, 3, 5] {
            for s in [-0.5, 0.0, 1.0, 2.0] {
                let zp = ZetaParams::new(p, ZetaLevel::Finite(k), s).map_err(usage)?;
                let what = format!("p={p} k={k} s={s}");
                let Some(sum) = attempt(&mut r, &what, zeta_sum(&zp, 30))? else {
                    continue;
                };
                let prod = zeta_product(&zp).map_err(usage)?;
                r.check(sum.value.overlaps(&prod), || {
                    format!("{what}: sum {} product {prod}", sum.value)
                });
            }
        }
    }
    // fixed sample points for the central-difference check
    let h = 1e-6;
    for i in 0..20u32 {
        let p = [2, 3, 5, 7][(i % 4) as usize];
        let k = 1 + (7 * i) % 10;
        let s = -0.9 + 0.23 * f64::from(i);
        let at = |s: f64| -> Result<f64, CliError> {
            let zp = ZetaParams::new(p, ZetaLevel::Finite(k), s).map_err(usage)?;
            Ok(zeta_product(&zp).map_err(usage)?.mid())
        };
        let fd = (at(s + h)? - at(s - h)?) / (2.0 * h);
        let zp = ZetaParams::new(p, ZetaLevel::Finite(k), s).map_err(usage)?;
        let d = zeta_log_derivative(&zp).map_err(usage)?.widen(1e-4);
        r.check(d.contains(fd), || format!("p={p} k={k} s={s}: {fd} outside {d}"));
    }
    r.summary = "32 sum/product cells overlap; 20 derivative samples agree".into();
    Ok(r)
}

fn suite_margins() -> Result<SuiteReport, CliError> {
    let mut r = SuiteReport::new();
    let margins = exceptional_margins().map_err(usage)?;
    let mut parts = Vec::new();
    for m in &margins {
        r.check(m.holds(), || format!("{}: {} < {}", m.label, m.value, m.claimed_lower_bound));
        parts.push(format!("{}: {:.6} >= {}", m.label, m.value.lo(), m.claimed_lower_bound));
    }
    r.summary = parts.join("; ");
    Ok(r)
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<Vec<Record>, CliError> {
    if args.p_max < 2 {
        return Err(CliError::Usage("p-max must be at least 2".into()));
    }
    if args.lemma1_max_order_exponent > 30 || args.exceptions_max_order_exponent > 20 {
        return Err(CliError::Usage(
            "scan bounds too large: lemma1 order exponent <= 30, exceptions <= 20".into(),
        ));
    }
    if !(1e-12..=1e-1).contains(&args.eps) {
        return Err(CliError::Usage(format!("eps must lie in [1e-12, 1e-1], got {:e}", args.eps)));
    }
    let suites: &[Suite] = match args.suite {
        Suite::All => &[
            Suite::Lemma1,
            Suite::Exceptions,
            Suite::Monotone,
            Suite::Hall,
            Suite::Zeta,
            Suite::Margins,
        ],
        ref one => std::slice::from_ref(one),
    };
    let mut out = Vec::new();
    for suite in suites {
        let (name, report) = match suite {
            Suite::Lemma1 => ("lemma1", suite_lemma1(args)?),
            Suite::Exceptions => ("exceptions", suite_exceptions(args)?),
            Suite::Monotone => ("monotone", suite_monotone(args)?),
            Suite::Hall => ("hall", suite_hall(args)?),
            Suite::Zeta => ("zeta", suite_zeta()?),
            Suite::Margins => ("margins", suite_margins()?),
            Suite::All => unreachable!("expanded above"),
        };
        out.push(suite_record(name, report));
    }
    Ok(out)
}
