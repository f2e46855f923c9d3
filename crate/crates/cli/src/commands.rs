use std::fs;
use std::path::Path;

use expsmooth::classes::{
    self, color_wrapper, labelled_01_verdict, labelled_totals, unlabelled_01_verdict,
    unlabelled_totals, ClassConfig, ClassSpec,
};
use expsmooth::coeffbox::{parse_rational, Rational, Real};
use expsmooth::counterexample::{build_counterexample, CounterexampleConfig};
use expsmooth::diagnostics::{ratio_sequence, smallest_certified_onset, TrendConfig};
use expsmooth::oracles::{self, oracle_table};
use expsmooth::saddle::{self, builtin_polynomials, exponent_fit, saddle_grid, SaddleConfig};
use expsmooth::series::{self, egf_count, split_at, AnySeries, SeriesFile};
use expsmooth::smoothing::{cr_bound, decompose, lemma31_check, theorem_demo, DemoConfig};
use expsmooth::{Backend, Coeff, Precision, SequenceRule, Series};
use serde_json::json;

use crate::args::{BackendChoice, Command, GlobalOpts, PolyInput, ScopeArg, SeriesInput, SideArg};
use crate::error::CliError;
use crate::report::{run_config, Report, RunConfig};

macro_rules! on_series {
    ($any:expr, |$s:ident| $body:expr) => {
        match $any {
            AnySeries::Exact($s) => $body,
            AnySeries::Float($s) => $body,
        }
    };
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn need<T: Clone>(v: &Option<T>, flag: &str) -> Result<T, CliError> {
    v.clone()
        .ok_or_else(|| usage(format!("missing required flag {flag}")))
}

fn json_error(path: &Path, e: serde_json::Error) -> CliError {
    usage(format!(
        "{}: line {}, column {}: {e}",
        path.display(),
        e.line(),
        e.column()
    ))
}

/// A rule from a JSON file, inline JSON, or a shorthand.
pub fn load_rule(text: &str) -> Result<SequenceRule, CliError> {
    let path = Path::new(text);
    if path.is_file() {
        let body =
            fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        return serde_json::from_str(&body).map_err(|e| json_error(path, e));
    }
    text.parse()
        .map_err(|e| usage(format!("rule `{text}`: {e}")))
}

fn load_series_file(path: &Path) -> Result<AnySeries, CliError> {
    let body = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let file: SeriesFile = serde_json::from_str(&body).map_err(|e| json_error(path, e))?;
    AnySeries::try_from(&file).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// The rule read as EGF counts: `p(n) / n!`.
fn egf_rule(rule: SequenceRule) -> SequenceRule {
    SequenceRule::Product {
        factors: vec![
            rule,
            SequenceRule::power_over_factorial(Rational::ZERO, false),
        ],
    }
}

enum Source {
    Rule(SequenceRule),
    File(AnySeries),
}

impl Source {
    fn load(input: &SeriesInput) -> Result<Self, CliError> {
        match (&input.rule, &input.input) {
            (Some(r), None) => {
                let rule = load_rule(r)?;
                Ok(Source::Rule(if input.egf { egf_rule(rule) } else { rule }))
            }
            (None, Some(p)) => Ok(Source::File(load_series_file(p)?)),
            _ => Err(usage("exactly one of --rule and --input is required")),
        }
    }

    fn exact_possible(&self) -> bool {
        match self {
            Source::Rule(r) => r.is_exact(),
            Source::File(f) => matches!(f, AnySeries::Exact(_)),
        }
    }

    fn file_order(&self) -> Option<u64> {
        match self {
            Source::File(f) => Some(on_series!(f, |s| s.order())),
            Source::Rule(_) => None,
        }
    }

    /// The series, with the rule's value at 0 kept only when `constant` is set.
    fn series(&self, backend: Backend, order: u64, constant: bool) -> Result<AnySeries, CliError> {
        Ok(match self {
            Source::Rule(rule) => {
                fn build<C: Coeff>(
                    rule: &SequenceRule,
                    order: u64,
                    ctx: C::Ctx,
                    constant: bool,
                ) -> expsmooth::Result<Series<C>> {
                    if constant {
                        Series::from_rule(rule, order, ctx)
                    } else {
                        Series::without_constant(rule, order, ctx)
                    }
                }
                match backend {
                    Backend::Exact => AnySeries::Exact(build(rule, order, (), constant)?),
                    Backend::Float { precision } => {
                        AnySeries::Float(build(rule, order, precision, constant)?)
                    }
                }
            }
            Source::File(f) => match f {
                AnySeries::Exact(s) => AnySeries::Exact(s.resized(order)),
                AnySeries::Float(s) => AnySeries::Float(s.resized(order)),
            },
        })
    }
}

fn resolve_backend(
    choice: BackendChoice,
    exact_possible: bool,
    precision: usize,
) -> Result<Backend, CliError> {
    let float = Backend::Float {
        precision: Precision(precision),
    };
    match choice {
        BackendChoice::Exact if !exact_possible => {
            Err(CliError::Compute(expsmooth::Error::DomainMismatch(
                "the input has irrational values; use the float backend".into(),
            )))
        }
        BackendChoice::Exact => Ok(Backend::Exact),
        BackendChoice::Float => Ok(float),
        BackendChoice::Auto if exact_possible => Ok(Backend::Exact),
        BackendChoice::Auto => Ok(float),
    }
}

fn trend(cfg: &RunConfig) -> TrendConfig {
    TrendConfig {
        kappa: cfg.kappa,
        delta: cfg.delta,
        ..TrendConfig::default()
    }
}

fn series_rows<C: Coeff>(s: &Series<C>) -> Vec<Vec<String>> {
    s.coeffs()
        .iter()
        .enumerate()
        .map(|(n, c)| vec![n.to_string(), c.render()])
        .collect()
}

fn poly_series(input: &PolyInput) -> Result<Series<Rational>, CliError> {
    match (&input.poly, &input.rule) {
        (Some(name), None) => builtin_polynomials()
            .into_iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s)
            .ok_or_else(|| {
                usage(format!(
                    "unknown polynomial `{name}`; expected x, x+x^2 or x^2+x^3"
                ))
            }),
        (None, Some(r)) => {
            let rule = load_rule(r)?;
            let SequenceRule::Explicit { values } = &rule else {
                return Err(usage(
                    "a polynomial rule must be an explicit coefficient list",
                ));
            };
            Ok(Series::from_rule(
                &rule,
                values.len().saturating_sub(1) as u64,
                (),
            )?)
        }
        _ => Err(usage("exactly one of --poly and --rule is required")),
    }
}

fn class_spec(
    name: &Option<String>,
    spec: &Option<std::path::PathBuf>,
    colors: u64,
) -> Result<ClassSpec, CliError> {
    let base = match (name, spec) {
        (Some(n), None) => ClassSpec::builtin(n)?,
        (None, Some(p)) => {
            let body = fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&body).map_err(|e| json_error(p, e))?
        }
        _ => return Err(usage("exactly one of --name and --spec is required")),
    };
    Ok(color_wrapper(&base, colors)?)
}

fn backend_for(global: &GlobalOpts, command: &Command) -> Result<Backend, CliError> {
    let float = Backend::Float {
        precision: Precision(global.precision),
    };
    Ok(match command {
        Command::Exp { g }
        | Command::Log { f: g }
        | Command::Split { g, .. }
        | Command::CrBound { g, .. }
        | Command::Ratios { g, .. } => match Source::load(g)? {
            Source::File(f) => {
                let backend = on_series!(&f, |s| s.backend());
                let requested = match global.backend {
                    BackendChoice::Auto => backend,
                    BackendChoice::Exact => Backend::Exact,
                    BackendChoice::Float => float,
                };
                if requested != backend {
                    return Err(usage(
                        "--backend disagrees with the backend recorded in the input file",
                    ));
                }
                backend
            }
            src => resolve_backend(global.backend, src.exact_possible(), global.precision)?,
        },
        Command::TheoremDemo { rule, .. } => {
            let exact = rule
                .as_deref()
                .map(load_rule)
                .transpose()?
                .is_none_or(|r| r.is_exact());
            resolve_backend(global.backend, exact, global.precision)?
        }
        Command::Saddle { .. } | Command::Counterexample { .. } => float,
        Command::ExponentFit { .. }
        | Command::Euler { .. }
        | Command::Class { .. }
        | Command::Oracle { .. }
        | Command::Radius { .. } => Backend::Exact,
    })
}

/// Resolves the configuration and runs the pipeline.
pub fn execute(global: &GlobalOpts, command: &Command) -> Result<(RunConfig, Report), CliError> {
    let backend = backend_for(global, command)?;
    let mut cfg = run_config(global, command, backend);
    if global.order.is_none() {
        let file_order = match command {
            Command::Exp { g }
            | Command::Log { f: g }
            | Command::Ratios { g, .. }
            | Command::Split { g, .. }
            | Command::CrBound { g, .. } => Source::load(g)?.file_order(),
            _ => None,
        };
        if let Some(o) = file_order {
            cfg.order = o;
        }
    }
    let report = dispatch(&cfg, command)?;
    Ok((cfg, report))
}

fn dispatch(cfg: &RunConfig, command: &Command) -> Result<Report, CliError> {
    let order = cfg.order;
    match command {
        Command::Exp { g } => {
            let any = Source::load(g)?.series(cfg.backend, order, false)?;
            let (file, rows, counts) = match any {
                AnySeries::Exact(s) => {
                    let f = series::exp(&s)?;
                    let counts: Vec<Option<String>> = (0..=order)
                        .map(|n| egf_count(f.coeff(n), n).map(|v| v.to_string()))
                        .collect();
                    (SeriesFile::from(&f), series_rows(&f), counts)
                }
                AnySeries::Float(s) => {
                    let f = series::exp(&s)?;
                    (
                        SeriesFile::from(&f),
                        series_rows(&f),
                        vec![None; order as usize + 1],
                    )
                }
            };
            let rows = rows
                .into_iter()
                .zip(&counts)
                .map(|(mut r, c)| {
                    r.push(c.clone().unwrap_or_default());
                    r
                })
                .collect();
            Report::new(
                json!({ "series": file, "counts": counts }),
                &["n", "f", "count"],
                rows,
            )
        }
        Command::Log { f } => {
            let any = Source::load(f)?.series(cfg.backend, order, true)?;
            on_series!(any, |s| {
                let g = series::log(&s)?;
                Report::new(
                    json!({ "series": SeriesFile::from(&g) }),
                    &["n", "g"],
                    series_rows(&g),
                )
            })
        }
        Command::Euler { rule } => {
            let rule = load_rule(&need(rule, "--rule")?)?;
            let a = series::euler_product(&rule, order)?;
            let counts: Vec<String> = a
                .nonnegative_integers()?
                .iter()
                .map(|c| c.to_string())
                .collect();
            let rows = counts
                .iter()
                .enumerate()
                .map(|(n, c)| vec![n.to_string(), c.clone()])
                .collect();
            Report::new(json!({ "counts": counts }), &["n", "a"], rows)
        }
        Command::Ratios { g, direct, start } => {
            let src = Source::load(g)?;
            let any = src.series(cfg.backend, order, *direct)?;
            on_series!(any, |s| {
                let f = if *direct { s } else { series::exp(&s)? };
                let rep = ratio_sequence(&f, *start, &trend(cfg))?;
                let rows = rep
                    .points
                    .iter()
                    .map(|p| {
                        vec![
                            p.n.to_string(),
                            p.f.clone(),
                            p.ratio.map(|r| r.to_string()).unwrap_or_default(),
                        ]
                    })
                    .collect();
                Report::new(&rep, &["n", "f", "ratio"], rows)
            })
        }
        Command::Saddle { poly, n } => {
            let g = poly_series(poly)?;
            let scfg = SaddleConfig {
                precision: Precision(cfg.precision),
                ..SaddleConfig::default()
            };
            let reports = saddle_grid(&g, n, &scfg, cfg.mode())?;
            let rows = reports.iter().map(|r| r.csv_row().to_vec()).collect();
            Report::new(&reports, &saddle::CSV_HEADER, rows)
        }
        Command::ExponentFit { poly, n } => {
            let g = poly_series(poly)?;
            let fit = exponent_fit(&g, n)?;
            let rows = fit
                .points
                .iter()
                .map(|p| vec![p.n.to_string(), p.s.to_string()])
                .collect();
            Report::new(&fit, &["n", "s"], rows)
        }
        Command::Split { g, ell } => {
            let ell = need(ell, "--ell")?;
            let any = Source::load(g)?.series(cfg.backend, order, false)?;
            on_series!(any, |s| {
                let pair = split_at(&s, ell)?;
                let rows = (0..=order)
                    .map(|n| {
                        vec![
                            n.to_string(),
                            pair.low.coeff(n).render(),
                            pair.high.coeff(n).render(),
                        ]
                    })
                    .collect();
                Report::new(
                    json!({
                        "ell": ell,
                        "low": SeriesFile::from(&pair.low),
                        "high": SeriesFile::from(&pair.high),
                    }),
                    &["n", "low", "high"],
                    rows,
                )
            })
        }
        Command::CrBound { g, l, ell, r } => {
            let ell = need(ell, "--ell")?;
            let any = Source::load(g)?.series(cfg.backend, order, false)?;
            on_series!(any, |s| {
                let l = match l {
                    Some(l) => *l,
                    None => {
                        smallest_certified_onset(&s, order.saturating_sub(1))?.ok_or_else(|| {
                            expsmooth::Error::PreconditionViolation(
                                "no certified positivity onset within the window".into(),
                            )
                        })?
                    }
                };
                let dec = decompose(&s, l, ell)?;
                let mut entries = Vec::new();
                let mut rows = Vec::new();
                for &shift in r {
                    let bound = cr_bound(&dec, shift)?;
                    let check = lemma31_check(&dec, &bound)?;
                    rows.push(vec![
                        shift.to_string(),
                        bound.c_r.render(),
                        bound.argmax_n.map(|n| n.to_string()).unwrap_or_default(),
                        bound.window.0.to_string(),
                        bound.window.1.to_string(),
                        check.checked.to_string(),
                        check.max_quotient.render(),
                        check.violations.to_string(),
                    ]);
                    entries.push(json!({ "bound": bound, "check": check }));
                }
                Report::new(
                    json!({ "L": l, "ell": ell, "convolution_holds": dec.convolution_holds()?, "bounds": entries }),
                    &[
                        "r",
                        "c_r",
                        "argmax_n",
                        "window_lo",
                        "window_hi",
                        "checked",
                        "max_quotient",
                        "violations",
                    ],
                    rows,
                )
            })
        }
        Command::TheoremDemo {
            rule,
            theta,
            hypothesis_cap,
        } => {
            let rule = load_rule(&need(rule, "--rule")?)?;
            let theta_text = need(theta, "--theta")?;
            let theta = parse_rational(&theta_text)
                .map_err(|e| usage(format!("--theta `{theta_text}`: {e}")))?;
            let demo = DemoConfig {
                trend: trend(cfg),
                hypothesis_cap: *hypothesis_cap,
                ..DemoConfig::default()
            };
            let rep = match cfg.backend {
                Backend::Exact => theorem_demo::<Rational>(&rule, &theta, order, (), &demo)?,
                Backend::Float { precision } => {
                    theorem_demo::<Real>(&rule, &theta, order, precision, &demo)?
                }
            };
            let rows = rep
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.f.clone(),
                        r.ratio.map(|x| x.to_string()).unwrap_or_default(),
                        r.eps.map(|x| x.to_string()).unwrap_or_default(),
                    ]
                })
                .collect();
            Report::new(&rep, &["n", "f", "ratio", "eps"], rows)
        }
        Command::Counterexample {
            t,
            m_cutoff,
            stages,
            search_cap,
            tol,
        } => {
            let t = load_rule(&need(t, "--t")?)?;
            let ccfg = CounterexampleConfig {
                precision: Precision(cfg.precision),
                tol: *tol,
                search_cap: *search_cap,
                mode: cfg.mode(),
            };
            let res = build_counterexample(&t, *m_cutoff, *stages, order, &ccfg)?;
            let rows = res
                .ratio_report
                .points
                .iter()
                .map(|p| {
                    vec![
                        p.n.to_string(),
                        p.f.clone(),
                        p.ratio.map(|x| x.to_string()).unwrap_or_default(),
                        p.defined.to_string(),
                    ]
                })
                .collect();
            Report::new(&res, &["n", "f", "ratio", "defined"], rows)
        }
        Command::Class {
            name,
            spec,
            colors,
            check,
            theta_max,
            radius_cutoff,
        } => {
            let spec = class_spec(name, spec, *colors)?;
            let ccfg = ClassConfig {
                trend: trend(cfg),
                theta_max: *theta_max,
                radius_cutoff: *radius_cutoff,
                ..ClassConfig::default()
            };
            let a_l = spec
                .p_l
                .as_ref()
                .map(|_| labelled_totals(&spec, order))
                .transpose()?;
            let a_u = spec
                .p_u
                .as_ref()
                .map(|_| unlabelled_totals(&spec, order))
                .transpose()?;
            let text = |t: &Option<classes::Totals>| -> Option<Vec<String>> {
                t.as_ref()
                    .map(|t| t.counts.iter().map(|c| c.to_string()).collect())
            };
            let (a_l, a_u) = (text(&a_l), text(&a_u));
            let mut verdicts = Vec::new();
            for side in check {
                verdicts.push(match side {
                    SideArg::Labelled => labelled_01_verdict(&spec, order, &ccfg)?,
                    SideArg::Unlabelled => unlabelled_01_verdict(&spec, order, &ccfg)?,
                });
            }
            let cell = |v: &Option<Vec<String>>, n: usize| {
                v.as_ref().map(|v| v[n].clone()).unwrap_or_default()
            };
            let rows = (0..=order as usize)
                .map(|n| vec![n.to_string(), cell(&a_l, n), cell(&a_u, n)])
                .collect();
            Report::new(
                json!({ "spec": spec, "totals": { "a_L": a_l, "a_U": a_u }, "verdicts": verdicts }),
                &["n", "a_L", "a_U"],
                rows,
            )
        }
        Command::Oracle {
            class,
            n,
            side,
            scope,
        } => {
            let class = need(class, "--class")?;
            let n = need(n, "--n")?;
            let side = match side {
                SideArg::Labelled => classes::Side::Labelled,
                SideArg::Unlabelled => classes::Side::Unlabelled,
            };
            let scope = match scope {
                ScopeArg::Total => oracles::Scope::Total,
                ScopeArg::Connected => oracles::Scope::Connected,
            };
            let table = oracle_table(&class, n, side, scope, cfg.mode())?;
            let rows = table
                .iter()
                .map(|c| c.csv_row().split(',').map(String::from).collect())
                .collect();
            Report::new(&table, &["class", "n", "side", "scope", "count"], rows)
        }
        Command::Radius { rule, class, side } => {
            let est = match (rule, class) {
                (Some(r), None) => classes::radius_estimate_rule(&load_rule(r)?, order)?,
                (None, Some(c)) => {
                    let spec = ClassSpec::builtin(c)?;
                    match side {
                        SideArg::Unlabelled => classes::radius_estimate_rule(spec.p_u()?, order)?,
                        SideArg::Labelled => {
                            classes::radius_estimate_series(&labelled_totals(&spec, order)?.series)?
                        }
                    }
                }
                _ => return Err(usage("exactly one of --rule and --class is required")),
            };
            let rows = vec![vec![
                est.radius.to_string(),
                est.band.to_string(),
                est.window.0.to_string(),
                est.window.1.to_string(),
            ]];
            Report::new(&est, &["radius", "band", "window_lo", "window_hi"], rows)
        }
    }
}
